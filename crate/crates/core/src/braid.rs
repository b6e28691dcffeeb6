//! Braiding index, reference windings, braid words, knot names and phase diagrams.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::model::{ModelSpec, ParamPath};
use crate::spectra::track_strands;
use crate::{Error, Result};

/// Distance from an integer above which a winding is resampled.
pub const ROUNDING_GUARD: f64 = 0.05;
/// Number of 2× refinements tried before giving up.
pub const MAX_REFINEMENTS: usize = 4;
/// Relative `|β| = 1` band for root-based boundary detection.
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// An integer winding with its rounding residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub value: i32,
    pub residual: f64,
    pub samples: usize,
}

fn unwrap_step(f: &dyn Fn(f64) -> C64, a: f64, b: f64, fa: C64, fb: C64, floor: f64, depth: u32) -> Result<f64> {
    let d = (fb / fa).arg();
    if d.abs() <= PI / 2.0 || depth == 0 {
        return Ok(d);
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm.norm() < floor {
        return Err(Error::OnPhaseBoundary(format!("|det| = {:e} at k = {mid}", fm.norm())));
    }
    Ok(unwrap_step(f, a, mid, fa, fm, floor, depth - 1)? + unwrap_step(f, mid, b, fm, fb, floor, depth - 1)?)
}

/// Winding number of `f` around the origin as k runs over [0, 2π).
/// `floor` is the smallest admissible `|f|`.
fn winding_of(f: &dyn Fn(f64) -> C64, samples: usize, floor: f64, on_zero: &dyn Fn(f64) -> Error) -> Result<Winding> {
    if samples < 64 {
        return Err(Error::Precondition(format!("need at least 64 k samples, got {samples}")));
    }
    let mut k_count = samples;
    let mut last = None;
    for _ in 0..=MAX_REFINEMENTS {
        let ks: Vec<f64> = (0..=k_count).map(|j| 2.0 * PI * j as f64 / k_count as f64).collect();
        let vals: Vec<C64> = ks.iter().map(|&k| f(k)).collect();
        let min = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if min < floor {
            return Err(on_zero(min));
        }
        let mut total = 0.0;
        for j in 0..k_count {
            total += unwrap_step(f, ks[j], ks[j + 1], vals[j], vals[j + 1], floor, 40)
                .map_err(|_| on_zero(floor))?;
        }
        let w = total / (2.0 * PI);
        let value = w.round();
        let residual = (w - value).abs();
        let result = Winding { value: value as i32, residual, samples: k_count };
        if residual < ROUNDING_GUARD {
            return Ok(result);
        }
        last = Some(result);
        k_count *= 2;
    }
    let r = last.map(|w| w.residual).unwrap_or(f64::NAN);
    Err(Error::OnPhaseBoundary(format!("winding residual {r:.3} after refinement")))
}

/// ξ from the phase winding of `det H̃(k)`.
pub fn braiding_index_integral(model: &ModelSpec, samples: usize) -> Result<Winding> {
    let scale = model.coupling_scale();
    let f = |k: f64| model.bloch_hamiltonian(k).traceless().det();
    winding_of(&f, samples, 1e-10 * scale * scale, &|min| {
        Error::OnPhaseBoundary(format!("min |det H̃| = {min:e}"))
    })
}

/// ξ_r(E) from the phase winding of `det(H(k) − E)`.
pub fn winding_ref(model: &ModelSpec, e_ref: C64, samples: usize) -> Result<Winding> {
    let scale = model.coupling_scale().max(e_ref.norm());
    let f = |k: f64| model.bloch_hamiltonian(k).shifted(e_ref).det();
    winding_of(&f, samples, 1e-10 * scale * scale, &|min| Error::ReferenceOnSpectrum { min_det: min })
}

/// Zero/pole count of `det H̃(β)` inside the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootIndex {
    pub xi: i32,
    pub zeros_inside: usize,
    pub poles: usize,
    pub on_boundary: bool,
}

/// ξ = N − P via the argument principle on the characteristic polynomial at E = ½Tr H.
pub fn braiding_index_roots(model: &ModelSpec) -> Result<RootIndex> {
    let half_trace = model.bloch_hamiltonian(0.0).trace() * 0.5;
    let rs = model.char_polynomial(half_trace)?.roots()?;
    let count = rs.count_by_modulus(1.0, UNIT_CIRCLE_TOL);
    let poles = model.pole_order();
    Ok(RootIndex {
        xi: count.inside as i32 - poles as i32,
        zeros_inside: count.inside,
        poles,
        on_boundary: count.on > 0,
    })
}

/// Closed-form zero families of the unidirectional model at E = 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticZeros {
    /// Roots of `C_AB,0 + C_AB,-m β^{-m}`, or `None` when `C_AB,-m = 0`.
    pub beta1: Option<Vec<C64>>,
    /// Roots of `C_AB,0 + C_BA,n β^n`, or `None` when `C_BA,n = 0`.
    pub beta2: Option<Vec<C64>>,
}

pub fn analytic_zeros(model: &ModelSpec) -> Result<AnalyticZeros> {
    let u = model
        .unidirectional()
        .filter(|_| model.onsite().c_i == 0.0 && model.onsite().c_z == 0.0)
        .ok_or_else(|| Error::InvalidModel("closed-form zeros need the H1 model without on-site terms".into()))?;
    let c0 = u.c_ab0;
    let family = |num: C64, den: C64, order: usize| -> Option<Vec<C64>> {
        if num.norm() == 0.0 || den.norm() == 0.0 {
            return None;
        }
        let r = (num.norm() / den.norm()).powf(1.0 / order as f64);
        Some(
            (0..order)
                .map(|j| {
                    let phase = (num.arg() - den.arg() + (2 * j + 1) as f64 * PI) / order as f64;
                    C64::from_polar(r, phase)
                })
                .collect(),
        )
    };
    Ok(AnalyticZeros { beta1: family(u.c_ab_neg_m, c0, u.m), beta2: family(c0, u.c_ba_n, u.n) })
}

/// A word in the two-strand braid group; each letter is τ₁^{±1}.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BraidWord(pub Vec<i8>);

impl BraidWord {
    pub fn exponent_sum(&self) -> i32 {
        self.0.iter().map(|&e| e as i32).sum()
    }

    /// Free reduction: cancel adjacent τ₁ τ₁^{-1} pairs.
    pub fn reduced(&self) -> BraidWord {
        let mut out: Vec<i8> = Vec::with_capacity(self.0.len());
        for &e in &self.0 {
            if out.last().is_some_and(|&l| l == -e) {
                out.pop();
            } else {
                out.push(e);
            }
        }
        BraidWord(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<&str> = self.0.iter().map(|&e| if e > 0 { "s1" } else { "s1^-1" }).collect();
        f.write_str(&letters.join(" "))
    }
}

impl std::str::FromStr for BraidWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|tok| match tok {
                "s1" => Ok(1),
                "s1^-1" => Ok(-1),
                _ => Err(Error::Domain(format!("unknown braid letter `{tok}`"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(BraidWord)
    }
}

impl Serialize for BraidWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Fractional grid offset that keeps sample points off symmetric k values.
const GRID_OFFSET: f64 = 0.381_966_011_250_105;

/// Braid word read off the tracked strands: one letter per sign change of
/// `Re(E₁ − E₂)`, exponent `−sign(Im ΔE · dRe ΔE/dk)` so that a counter-clockwise
/// turn of ΔE is τ₁^{+1}. The raw (unreduced) crossing sequence is returned.
pub fn braid_word(model: &ModelSpec, samples: usize) -> Result<BraidWord> {
    if samples < 64 {
        return Err(Error::Precondition(format!("need at least 64 k samples, got {samples}")));
    }
    let k0 = 2.0 * PI * GRID_OFFSET / samples as f64;
    let ks: Vec<f64> = (0..=samples).map(|j| k0 + 2.0 * PI * j as f64 / samples as f64).collect();
    let strands = track_strands(model, &ks)?;
    let scale = model.coupling_scale();
    let delta: Vec<C64> = strands.e1.iter().zip(&strands.e2).map(|(a, b)| a - b).collect();
    let mut word = Vec::new();
    for j in 0..samples {
        let (a, b) = (delta[j], delta[j + 1]);
        if (a.re >= 0.0) == (b.re >= 0.0) {
            continue;
        }
        let t = a.re / (a.re - b.re);
        let im = a.im + t * (b.im - a.im);
        let k = ks[j] + t * (ks[j + 1] - ks[j]);
        if im.abs() < 1e-10 * scale {
            return Err(Error::EpOnGrid { k });
        }
        let d_re = b.re - a.re;
        word.push(if im * d_re < 0.0 { 1 } else { -1 });
    }
    Ok(BraidWord(word))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnotName {
    Unlink,
    Unknot,
    HopfLink,
    Trefoil,
    Other(u32),
}

impl KnotName {
    /// Remark attached to names outside the tabulated range.
    pub fn note(&self) -> Option<&'static str> {
        match self {
            KnotName::Other(_) => Some(
                "only knots with unknotting number one arise in this two-band family; \
                 the cinquefoil (unknotting number two) is excluded",
            ),
            _ => None,
        }
    }
}

impl fmt::Display for KnotName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotName::Unlink => f.write_str("unlink"),
            KnotName::Unknot => f.write_str("unknot"),
            KnotName::HopfLink => f.write_str("Hopf link"),
            KnotName::Trefoil => f.write_str("trefoil"),
            KnotName::Other(n) => write!(f, "other({n})"),
        }
    }
}

impl Serialize for KnotName {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn knot_name(xi: i32) -> KnotName {
    match xi.unsigned_abs() {
        0 => KnotName::Unlink,
        1 => KnotName::Unknot,
        2 => KnotName::HopfLink,
        3 => KnotName::Trefoil,
        n => KnotName::Other(n),
    }
}

/// Everything known about the braid of one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraidReport {
    pub xi_integral: Option<i32>,
    pub integral_residual: Option<f64>,
    pub xi_roots: i32,
    pub agreement: bool,
    pub on_boundary: bool,
    /// Freely reduced braid word.
    pub braid_word: Option<BraidWord>,
    pub knot: KnotName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

fn is_boundary_error(e: &Error) -> bool {
    matches!(e, Error::OnPhaseBoundary(_) | Error::EpOnGrid { .. })
}

/// Both ξ methods, the braid word and the knot name. On a phase boundary the
/// integral and the word are absent and `on_boundary` is set.
pub fn analyze(model: &ModelSpec, samples: usize) -> Result<BraidReport> {
    let roots = braiding_index_roots(model)?;
    let mut on_boundary = roots.on_boundary;
    let mut integral = None;
    let mut word = None;
    if !on_boundary {
        match braiding_index_integral(model, samples) {
            Ok(w) => integral = Some(w),
            Err(e) if is_boundary_error(&e) => on_boundary = true,
            Err(e) => return Err(e),
        }
    }
    if !on_boundary {
        match braid_word(model, samples) {
            Ok(w) => word = Some(w.reduced()),
            Err(e) if is_boundary_error(&e) => on_boundary = true,
            Err(e) => return Err(e),
        }
    }
    let knot = knot_name(roots.xi);
    Ok(BraidReport {
        xi_integral: integral.map(|w| w.value),
        integral_residual: integral.map(|w| w.residual),
        xi_roots: roots.xi,
        agreement: integral.is_some_and(|w| w.value == roots.xi),
        on_boundary,
        braid_word: word,
        knot,
        note: knot.note(),
    })
}

/// One sweep axis: `points` values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub param: ParamPath,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(param: ParamPath, min: f64, max: f64, points: usize) -> Self {
        Self { param, min, max, points }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.points <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseCell {
    pub xi: Option<i32>,
    pub boundary: bool,
}

/// ξ over a 2D parameter grid; `cells[i * axis2.points + j]` is at
/// `(axis1.value(i), axis2.value(j))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub axis1: Axis,
    pub axis2: Axis,
    pub cells: Vec<PhaseCell>,
}

impl PhaseDiagram {
    pub fn get(&self, i: usize, j: usize) -> PhaseCell {
        self.cells[i * self.axis2.points + j]
    }

    pub fn count_xi(&self, xi: i32) -> usize {
        self.cells.iter().filter(|c| c.xi == Some(xi)).count()
    }

    pub fn boundary_count(&self) -> usize {
        self.cells.iter().filter(|c| c.boundary).count()
    }

    /// Sorted distinct ξ values.
    pub fn values(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.cells.iter().filter_map(|c| c.xi).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// CSV with columns `axis1,axis2,xi,boundary_flag`; ξ is empty on boundary cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis1,axis2,xi,boundary_flag\n");
        for i in 0..self.axis1.points {
            for j in 0..self.axis2.points {
                let c = self.get(i, j);
                let xi = c.xi.map(|x| x.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{},{}", self.axis1.value(i), self.axis2.value(j), xi, c.boundary as u8);
            }
        }
        out
    }
}

fn phase_cell(model: Result<ModelSpec>) -> PhaseCell {
    match model.and_then(|m| braiding_index_roots(&m)) {
        Ok(r) if !r.on_boundary => PhaseCell { xi: Some(r.xi), boundary: false },
        _ => PhaseCell { xi: None, boundary: true },
    }
}

/// Root-count ξ on every grid point, in parallel. Points where the model is
/// invalid or singular are reported as boundary cells.
pub fn phase_diagram(template: &ModelSpec, axis1: Axis, axis2: Axis) -> Result<PhaseDiagram> {
    if axis1.points == 0 || axis2.points == 0 {
        return Err(Error::Precondition("grid resolution must be at least 1".into()));
    }
    if axis1.param == axis2.param {
        return Err(Error::Precondition("axes must reference distinct parameters".into()));
    }
    template.param(axis1.param)?;
    template.param(axis2.param)?;
    let total = axis1.points * axis2.points;
    let cells = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / axis2.points, idx % axis2.points);
            phase_cell(
                template
                    .with_param(axis1.param, axis1.value(i))
                    .and_then(|m| m.with_param(axis2.param, axis2.value(j))),
            )
        })
        .collect();
    Ok(PhaseDiagram { axis1, axis2, cells })
}
