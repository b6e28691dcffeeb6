//! RLC realisation of the unidirectional model: component synthesis, circuit
//! Laplacians `J(ω)`, Green's-function reconstruction, stability and netlists.
//!
//! At resonance the ideal circuit satisfies `J(k; ω_r) = −iω_r H₁(k)` with
//! couplings `(c0, ±c_m, ±c_n)` in farads.

pub mod netlist;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Hopping, Mat2, ModelSpec, Variant};
use crate::spectra::dense::{self, DenseMatrix, Lu};
use crate::spectra::BoundaryCondition;
use crate::{Error, Result};

pub use netlist::{format_si, parse_si, Element, ElementCounts, Netlist, Node};

/// Target frequency used when none is requested, Hz.
pub const DEFAULT_FREQUENCY: f64 = 200e3;
/// Grounding resistance, Ω.
pub const DEFAULT_R0: f64 = 20.0;
/// Inductor ESR presets, Ω.
pub const ESR_PRESET_LOW: f64 = 0.1;
pub const ESR_PRESET_HIGH: f64 = 0.5;
/// Relative tolerance of the resonance consistency check.
pub const DETUNE_TOL: f64 = 1e-6;
/// Condition number above which the Laplacian counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Component values of one circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    #[serde(rename = "C_AB0")]
    pub c0: f64,
    #[serde(rename = "C_ABm")]
    pub c_m: f64,
    #[serde(rename = "C_ABn")]
    pub c_n: f64,
    #[serde(rename = "L_a")]
    pub l_a: f64,
    #[serde(rename = "L_b")]
    pub l_b: f64,
    /// `None` is an open circuit.
    #[serde(rename = "R0")]
    pub r0: Option<f64>,
    #[serde(rename = "ESR", default)]
    pub esr: f64,
    #[serde(default)]
    pub inic_leak: f64,
    pub m: usize,
    pub n: usize,
    #[serde(default = "plus")]
    pub polarity_m: i8,
    #[serde(default = "plus")]
    pub polarity_n: i8,
}

fn plus() -> i8 {
    1
}

impl CircuitParams {
    /// Printed preset row for phase 1..=4 (`c0` = 4.7 nF, m = 2, n = 1, r0 = ∞).
    pub fn phase_preset(phase: u8) -> Result<CircuitParams> {
        let (c_m, c_n, l_a, l_b) = match phase {
            1 => (0.94e-9, 2e-9, 94.52e-6, 112.28e-6),
            2 => (0.94e-9, 20e-9, 25.64e-6, 112.28e-6),
            3 => (20e-9, 2e-9, 94.52e-6, 25.64e-6),
            4 => (20e-9, 20e-9, 25.64e-6, 25.64e-6),
            p => return Err(Error::Precondition(format!("phase must be 1..=4, got {p}"))),
        };
        Ok(CircuitParams {
            c0: 4.7e-9,
            c_m,
            c_n,
            l_a,
            l_b,
            r0: None,
            esr: 0.0,
            inic_leak: 0.0,
            m: 2,
            n: 1,
            polarity_m: 1,
            polarity_n: 1,
        })
    }

    /// Model whose synthesis yields the preset row for `phase`, in units of nF.
    pub fn phase_model(phase: u8) -> Result<ModelSpec> {
        let p = Self::phase_preset(phase)?;
        ModelSpec::h1(4.7, p.c_m * 1e9, p.c_n * 1e9, 2, 1)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Precondition(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("C_AB0", self.c0)?;
        positive("C_ABm", self.c_m)?;
        positive("C_ABn", self.c_n)?;
        positive("L_a", self.l_a)?;
        positive("L_b", self.l_b)?;
        if let Some(r) = self.r0 {
            positive("R0", r)?;
        }
        if !(self.esr >= 0.0 && self.esr.is_finite()) {
            return Err(Error::Precondition(format!("ESR must be non-negative, got {}", self.esr)));
        }
        if !(0.0..=1.0).contains(&self.inic_leak) {
            return Err(Error::Precondition(format!("inic_leak must lie in [0, 1], got {}", self.inic_leak)));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::Precondition("ranges m and n must be at least 1".into()));
        }
        if self.polarity_m.abs() != 1 || self.polarity_n.abs() != 1 {
            return Err(Error::Precondition("polarities must be +1 or -1".into()));
        }
        Ok(())
    }

    /// `1/√(L_a(c0 + c_n))`.
    pub fn omega_a(&self) -> f64 {
        1.0 / (self.l_a * (self.c0 + self.c_n)).sqrt()
    }

    /// `1/√(L_b(c0 + c_m))`.
    pub fn omega_b(&self) -> f64 {
        1.0 / (self.l_b * (self.c0 + self.c_m)).sqrt()
    }

    /// Resonant angular frequency, the mean of the two sublattice values.
    pub fn omega_r(&self) -> f64 {
        0.5 * (self.omega_a() + self.omega_b())
    }

    pub fn resonant_frequency(&self) -> f64 {
        self.omega_r() / (2.0 * PI)
    }

    /// The two sublattices resonate at different frequencies.
    pub fn detuned(&self) -> bool {
        let a = self.l_a * (self.c0 + self.c_n);
        let b = self.l_b * (self.c0 + self.c_m);
        (a - b).abs() > DETUNE_TOL * a.abs().max(b.abs())
    }

    /// The model realised at resonance, couplings in farads.
    pub fn to_model(&self) -> Result<ModelSpec> {
        ModelSpec::h1(
            self.c0,
            f64::from(self.polarity_m) * self.c_m,
            f64::from(self.polarity_n) * self.c_n,
            self.m,
            self.n,
        )
    }

    fn branch_admittance(&self, l: f64, omega: f64) -> C64 {
        let g0 = self.r0.map_or(0.0, |r| 1.0 / r);
        1.0 / C64::new(self.esr, omega * l) + g0
    }

    /// Elements of an `cells`-cell chain. Shared by [`laplacian_real`] and the netlist writer.
    pub fn elements(&self, cells: usize, bc: BoundaryCondition) -> Result<Vec<Element>> {
        self.validate()?;
        let required = self.m + self.n + 1;
        if cells < required {
            return Err(Error::ChainTooSmall { cells, required });
        }
        if 2 * cells > dense::MAX_DIM {
            return Err(Error::TooLarge(2 * cells));
        }
        let (c1m, c2m) = inic_split(self.c_m, self.inic_leak);
        let (c1n, c2n) = inic_split(self.c_n, self.inic_leak);
        let mut out = Vec::new();
        let mut compensation = Vec::new();
        for x in 0..cells {
            let j = x + 1;
            for (label, node, l) in [("A", Node::a(x), self.l_a), ("B", Node::b(x), self.l_b)] {
                if self.esr > 0.0 {
                    let mid = Node::Internal(format!("nL{label}{j}"));
                    out.push(Element::Inductor { name: format!("L{label}{j}"), a: node.clone(), b: mid.clone(), henry: l });
                    out.push(Element::Resistor { name: format!("RS{label}{j}"), a: mid, b: Node::Ground, ohm: self.esr });
                } else {
                    out.push(Element::Inductor { name: format!("L{label}{j}"), a: node.clone(), b: Node::Ground, henry: l });
                }
                if let Some(r) = self.r0 {
                    out.push(Element::Resistor { name: format!("R0{label}{j}"), a: node, b: Node::Ground, ohm: r });
                }
            }
            out.push(Element::Capacitor { name: format!("CAB{j}"), a: Node::a(x), b: Node::b(x), farad: self.c0 });
            // C_m bond: A_x → B_{x−m}
            let target = x as i64 - self.m as i64;
            let wrapped = target.rem_euclid(cells as i64) as usize;
            if target >= 0 || bc == BoundaryCondition::Pbc {
                out.push(inic(format!("XM{j}"), Node::a(x), Node::b(wrapped), c1m, c2m, self.polarity_m < 0));
            } else {
                compensation.push(Element::Capacitor {
                    name: format!("CCB{}", wrapped + 1),
                    a: Node::b(wrapped),
                    b: Node::Ground,
                    farad: self.c_m,
                });
                if self.inic_leak > 0.0 {
                    compensation.push(Element::Capacitor {
                        name: format!("CLA{j}"),
                        a: Node::a(x),
                        b: Node::Ground,
                        farad: self.inic_leak * self.c_m,
                    });
                }
            }
            // C_n bond: B_x → A_{x+n}
            let target = x + self.n;
            let wrapped = target % cells;
            if target < cells || bc == BoundaryCondition::Pbc {
                out.push(inic(format!("XN{j}"), Node::b(x), Node::a(wrapped), c1n, c2n, self.polarity_n < 0));
            } else {
                compensation.push(Element::Capacitor {
                    name: format!("CCA{}", wrapped + 1),
                    a: Node::a(wrapped),
                    b: Node::Ground,
                    farad: self.c_n,
                });
                if self.inic_leak > 0.0 {
                    compensation.push(Element::Capacitor {
                        name: format!("CLB{j}"),
                        a: Node::b(x),
                        b: Node::Ground,
                        farad: self.inic_leak * self.c_n,
                    });
                }
            }
        }
        out.extend(compensation);
        Ok(out)
    }

    pub fn netlist(&self, cells: usize, bc: BoundaryCondition) -> Result<Netlist> {
        Ok(Netlist { cells, bc: Some(bc), elements: self.elements(cells, bc)? })
    }
}

fn inic(name: String, from: Node, to: Node, c1: f64, c2: f64, negative: bool) -> Element {
    Element::Inic { name, from, to, c1, c2, negative, ra: netlist::DEFAULT_RA, ca: netlist::DEFAULT_CA }
}

/// `(c1, c2)` realising forward coupling `c` with reverse leak `λ·c`.
pub fn inic_split(c: f64, leak: f64) -> (f64, f64) {
    (0.5 * c * (1.0 - leak), 0.5 * c * (1.0 + leak))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InicDirection {
    Forward,
    Reverse,
}

impl FromStr for InicDirection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(InicDirection::Forward),
            "reverse" => Ok(InicDirection::Reverse),
            other => Err(Error::Precondition(format!("unknown direction `{other}`"))),
        }
    }
}

impl fmt::Display for InicDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InicDirection::Forward => "forward",
            InicDirection::Reverse => "reverse",
        })
    }
}

/// Effective capacitance of an INIC: `c1 + c2` forward, `c2 − c1` reverse.
pub fn inic_effective(c1: f64, c2: f64, direction: InicDirection) -> f64 {
    match direction {
        InicDirection::Forward => c1 + c2,
        InicDirection::Reverse => c2 - c1,
    }
}

/// Corner frequency `1/(2πRC)` of an RC low-pass, Hz.
pub fn lowpass_3db(r: f64, c: f64) -> Result<f64> {
    if !(r > 0.0 && c > 0.0) {
        return Err(Error::Precondition(format!("R and C must be positive, got R = {r}, C = {c}")));
    }
    Ok(1.0 / (2.0 * PI * r * c))
}

/// Component values realising an H1 model at frequency `f_target` (default 200 kHz).
pub fn synthesize(model: &ModelSpec, c0_phys: f64, f_target: Option<f64>) -> Result<CircuitParams> {
    let u = match (model.variant(), model.hopping()) {
        (Variant::H1 | Variant::H2, Hopping::Unidirectional(u)) => u,
        _ => return Err(Error::NotRepresentable("only the unidirectional model maps onto the circuit".into())),
    };
    let onsite = model.onsite();
    if onsite.c_i != 0.0 || onsite.c_z != 0.0 {
        return Err(Error::NotRepresentable("on-site terms have no circuit element".into()));
    }
    if !(c0_phys > 0.0 && c0_phys.is_finite()) {
        return Err(Error::Precondition(format!("c0 must be positive, got {c0_phys}")));
    }
    let f = f_target.unwrap_or(DEFAULT_FREQUENCY);
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::Precondition(format!("frequency must be positive, got {f}")));
    }
    for (name, z) in [("C_AB,0", u.c_ab0), ("C_AB,-m", u.c_ab_neg_m), ("C_BA,n", u.c_ba_n)] {
        if z.im != 0.0 {
            return Err(Error::NotRepresentable(format!("{name} = {z} is complex")));
        }
        if z.re == 0.0 {
            return Err(Error::NotRepresentable(format!("{name} is zero")));
        }
    }
    let ratio_m = u.c_ab_neg_m.re / u.c_ab0.re;
    let ratio_n = u.c_ba_n.re / u.c_ab0.re;
    let c_m = ratio_m.abs() * c0_phys;
    let c_n = ratio_n.abs() * c0_phys;
    let w2 = (2.0 * PI * f).powi(2);
    let params = CircuitParams {
        c0: c0_phys,
        c_m,
        c_n,
        l_a: 1.0 / (w2 * (c0_phys + c_n)),
        l_b: 1.0 / (w2 * (c0_phys + c_m)),
        r0: Some(DEFAULT_R0),
        esr: 0.0,
        inic_leak: 0.0,
        m: u.m,
        n: u.n,
        polarity_m: if ratio_m < 0.0 { -1 } else { 1 },
        polarity_n: if ratio_n < 0.0 { -1 } else { 1 },
    };
    params.validate()?;
    Ok(params)
}

/// Bloch Laplacian `J(k)` at angular frequency `omega`.
pub fn laplacian_k(params: &CircuitParams, omega: f64, k: f64) -> Result<Mat2> {
    if !(omega > 0.0) {
        return Err(Error::Precondition(format!("omega must be positive, got {omega}")));
    }
    let jw = C64::new(0.0, omega);
    let lam = params.inic_leak;
    let (sm, sn) = (f64::from(params.polarity_m), f64::from(params.polarity_n));
    let (m, n) = (params.m as f64, params.n as f64);
    let e = |x: f64| C64::from_polar(1.0, x * k);
    let a11 = jw * (params.c0 + params.c_n + lam * params.c_m) + params.branch_admittance(params.l_a, omega);
    let a22 = jw * (params.c0 + params.c_m + lam * params.c_n) + params.branch_admittance(params.l_b, omega);
    let a12 = -jw * (params.c0 + sm * params.c_m * e(-m) + sn * lam * params.c_n * e(-n));
    let a21 = -jw * (params.c0 + sn * params.c_n * e(n) + sm * lam * params.c_m * e(m));
    Ok(Mat2::new(a11, a12, a21, a22))
}

/// Real-space Laplacian of an `cells`-cell chain, rows ordered `A1, B1, A2, …`.
pub fn laplacian_real(params: &CircuitParams, omega: f64, cells: usize, bc: BoundaryCondition) -> Result<DenseMatrix> {
    if !(omega > 0.0) {
        return Err(Error::Precondition(format!("omega must be positive, got {omega}")));
    }
    params.netlist(cells, bc)?.laplacian(omega)
}

/// Max over `samples` momenta of the relative distance between `eig J(k; ω_r)`
/// and `−iω_r E±(k)` of the realised model.
pub fn correspondence_residual(params: &CircuitParams, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Precondition("need at least one k sample".into()));
    }
    let omega = params.omega_r();
    let model = params.to_model()?;
    let factor = C64::new(0.0, -omega);
    let mut worst: f64 = 0.0;
    for s in 0..samples {
        let k = -PI + 2.0 * PI * (s as f64 + 0.5) / samples as f64;
        let (j1, j2) = laplacian_k(params, omega, k)?.eigenvalues();
        let (e1, e2) = model.bloch_eigenvalues(k);
        let (t1, t2) = (factor * e1, factor * e2);
        let scale = t1.norm().max(t2.norm()).max(f64::MIN_POSITIVE);
        let straight = (j1 - t1).norm().max((j2 - t2).norm());
        let crossed = (j1 - t2).norm().max((j2 - t1).norm());
        worst = worst.max(straight.min(crossed) / scale);
    }
    Ok(worst)
}

/// Result of the simulated Green's-function measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub laplacian: DenseMatrix,
    pub greens: DenseMatrix,
    pub error: f64,
    pub condition: f64,
}

/// Inject unit currents at every node, collect the voltages into `G`, and invert.
pub fn greens_reconstruct(params: &CircuitParams, omega: f64, cells: usize, bc: BoundaryCondition) -> Result<Reconstruction> {
    let j = laplacian_real(params, omega, cells, bc)?;
    let dim = j.dim();
    let lu = Lu::new(&j).map_err(|_| Error::ResonantSingularity(f64::INFINITY))?;
    let mut g = DenseMatrix::zeros(dim);
    for col in 0..dim {
        let mut e = vec![C64::new(0.0, 0.0); dim];
        e[col] = C64::new(1.0, 0.0);
        let v = lu.solve(&e);
        for (row, x) in v.into_iter().enumerate() {
            g[(row, col)] = x;
        }
    }
    let condition = j.norm_1() * g.norm_1();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::ResonantSingularity(condition));
    }
    let rebuilt = dense::inverse(&g).map_err(|_| Error::ResonantSingularity(condition))?;
    let error = rebuilt.sub(&j).norm_fro() / j.norm_fro();
    Ok(Reconstruction { laplacian: rebuilt, greens: g, error, condition })
}

/// Stability verdict. `min_growth` is the smallest imaginary part of the
/// spectrum of `iJ`; negative values grow in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    pub min_growth: f64,
    pub scale: f64,
    pub stable: bool,
}

pub fn stability_check(params: &CircuitParams, omega: f64, cells: usize, bc: BoundaryCondition) -> Result<Stability> {
    let j = laplacian_real(params, omega, cells, bc)?;
    let eig = dense::eigenvalues(&j)?;
    let i = C64::new(0.0, 1.0);
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max).max(j.norm_fro() / (j.dim() as f64).sqrt());
    let min_growth = eig.iter().map(|z| (i * z).im).fold(f64::INFINITY, f64::min);
    Ok(Stability { min_growth, scale, stable: min_growth >= -1e-9 * scale })
}

fn check_tolerance(pct: f64) -> Result<f64> {
    if !(0.0..50.0).contains(&pct) {
        return Err(Error::Precondition(format!("tolerance must lie in [0, 50) percent, got {pct}")));
    }
    Ok(pct / 100.0)
}

fn factors(t: f64, seed: u64) -> impl FnMut() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    move || if t == 0.0 { 1.0 } else { rng.gen_range(1.0 - t..=1.0 + t) }
}

/// Every coupling and on-site term scaled by an independent factor in `[1 − t, 1 + t]`.
pub fn disorder_model(model: &ModelSpec, tolerance_pct: f64, seed: u64) -> Result<ModelSpec> {
    let mut draw = factors(check_tolerance(tolerance_pct)?, seed);
    let hopping = match model.hopping() {
        Hopping::Unidirectional(u) => {
            let mut u = *u;
            u.c_ab0 *= draw();
            u.c_ab_neg_m *= draw();
            u.c_ba_n *= draw();
            Hopping::Unidirectional(u)
        }
        Hopping::Bidirectional(b) => {
            let mut b = b.clone();
            for v in [&mut b.ab_left, &mut b.ab_right, &mut b.ba_left, &mut b.ba_right] {
                for c in v.iter_mut() {
                    *c *= draw();
                }
            }
            Hopping::Bidirectional(b)
        }
    };
    let mut onsite = model.onsite();
    onsite.c_i *= draw();
    onsite.c_z *= draw();
    ModelSpec::new(model.variant(), hopping, onsite)
}

/// Every component value scaled by an independent factor in `[1 − t, 1 + t]`.
pub fn disorder_params(params: &CircuitParams, tolerance_pct: f64, seed: u64) -> Result<CircuitParams> {
    let mut draw = factors(check_tolerance(tolerance_pct)?, seed);
    let mut p = *params;
    p.c0 *= draw();
    p.c_m *= draw();
    p.c_n *= draw();
    p.l_a *= draw();
    p.l_b *= draw();
    let f = draw();
    p.r0 = p.r0.map(|r| r * f);
    p.esr *= draw();
    Ok(p)
}
