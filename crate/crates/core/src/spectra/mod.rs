//! Band strands under periodic boundaries, finite chains, skin-effect statistics
//! and β-root diagnostics.

pub mod dense;

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

pub use dense::{eig_general, eigenvalues, DenseMatrix, EigenDecomposition, EigenPair};

use crate::model::ModelSpec;
use crate::polyalg::RootSet;
use crate::{Error, Result};

/// Default relative threshold for topological zero modes, `|E| < tol · ‖M‖`.
pub const TZM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Obc,
    Pbc,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Obc => "obc",
            BoundaryCondition::Pbc => "pbc",
        })
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obc" => Ok(BoundaryCondition::Obc),
            "pbc" => Ok(BoundaryCondition::Pbc),
            _ => Err(Error::Domain(format!("unknown boundary condition `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Two eigenvalue strands tracked continuously along a momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrandSet {
    pub k: Vec<f64>,
    pub e1: Vec<C64>,
    pub e2: Vec<C64>,
}

impl StrandSet {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Largest per-step jump divided by the median step, over both strands.
    pub fn max_jump_ratio(&self) -> f64 {
        let mut steps: Vec<f64> = self
            .e1
            .windows(2)
            .chain(self.e2.windows(2))
            .map(|w| (w[1] - w[0]).norm())
            .collect();
        if steps.is_empty() {
            return 0.0;
        }
        steps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = steps[steps.len() / 2];
        let max = *steps.last().unwrap();
        if median == 0.0 {
            if max == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            max / median
        }
    }

    /// CSV with columns `k,band,re_e,im_e`; band 1 rows precede band 2 rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,band,re_e,im_e\n");
        for (band, strand) in [(1, &self.e1), (2, &self.e2)] {
            for (k, e) in self.k.iter().zip(strand.iter()) {
                let _ = writeln!(out, "{},{},{},{}", k, band, e.re, e.im);
            }
        }
        out
    }
}

/// Track the two bands over the given momenta. The first point orders the
/// strands with `e1` on the principal branch.
pub fn track_strands(model: &ModelSpec, ks: &[f64]) -> Result<StrandSet> {
    let scale = model.coupling_scale();
    let mut e1 = Vec::with_capacity(ks.len());
    let mut e2 = Vec::with_capacity(ks.len());
    for (j, &k) in ks.iter().enumerate() {
        let (minus, plus) = model.bloch_eigenvalues(k);
        if (plus - minus).norm() < 1e-10 * scale {
            return Err(Error::EpOnGrid { k });
        }
        if j == 0 {
            e1.push(plus);
            e2.push(minus);
        } else {
            let (p1, p2) = (e1[j - 1], e2[j - 1]);
            let keep = (plus - p1).norm() + (minus - p2).norm();
            let swap = (minus - p1).norm() + (plus - p2).norm();
            if keep <= swap {
                e1.push(plus);
                e2.push(minus);
            } else {
                e1.push(minus);
                e2.push(plus);
            }
        }
    }
    Ok(StrandSet { k: ks.to_vec(), e1, e2 })
}

/// Strands on the uniform grid `k_j = 2πj/K`, `j = 0..K`.
pub fn pbc_strands(model: &ModelSpec, samples: usize) -> Result<StrandSet> {
    if samples < 64 {
        return Err(Error::Precondition(format!("need at least 64 k samples, got {samples}")));
    }
    let ks: Vec<f64> = (0..samples).map(|j| 2.0 * PI * j as f64 / samples as f64).collect();
    track_strands(model, &ks)
}

/// Finite-chain Hamiltonian. Unit cell `j` (0-based) occupies rows `2j` (A) and `2j+1` (B).
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpaceMatrix {
    pub matrix: DenseMatrix,
    pub cells: usize,
    pub bc: BoundaryCondition,
}

impl RealSpaceMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Smallest chain that fits every bond of the model.
pub fn min_cells(model: &ModelSpec) -> usize {
    let (left, right) = model.hopping_reach();
    left + right + 1
}

pub fn real_space_matrix(model: &ModelSpec, cells: usize, bc: BoundaryCondition) -> Result<RealSpaceMatrix> {
    build_real_space(model, cells, bc, 1.0)
}

/// OBC chain after the similarity transform `ψ_x → r^x ψ_x`, which maps each
/// hopping `c β^e` to `c r^e` and leaves the spectrum unchanged.
pub fn real_space_matrix_rescaled(model: &ModelSpec, cells: usize, r: f64) -> Result<RealSpaceMatrix> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("rescaling radius must be positive, got {r}")));
    }
    build_real_space(model, cells, BoundaryCondition::Obc, r)
}

fn build_real_space(model: &ModelSpec, cells: usize, bc: BoundaryCondition, r: f64) -> Result<RealSpaceMatrix> {
    let required = min_cells(model);
    if cells < required {
        return Err(Error::ChainTooSmall { cells, required });
    }
    let dim = 2 * cells;
    if dim > dense::MAX_DIM {
        return Err(Error::TooLarge(dim));
    }
    let mut m = DenseMatrix::zeros(dim);
    let (upper, lower) = model.off_diagonals();
    let (d1, d2) = model.diagonal();
    let n = cells as i64;
    for x in 0..n {
        m[(2 * x as usize, 2 * x as usize)] += d1;
        m[(2 * x as usize + 1, 2 * x as usize + 1)] += d2;
        for (row_off, col_off, poly) in [(0usize, 1usize, &upper), (1, 0, &lower)] {
            for (e, c) in poly.terms() {
                let target = x + e as i64;
                let target = match bc {
                    BoundaryCondition::Pbc => target.rem_euclid(n),
                    BoundaryCondition::Obc if (0..n).contains(&target) => target,
                    BoundaryCondition::Obc => continue,
                };
                let weight = if r == 1.0 { c } else { c * r.powi(e) };
                m[(2 * x as usize + row_off, 2 * target as usize + col_off)] += weight;
            }
        }
    }
    Ok(RealSpaceMatrix { matrix: m, cells, bc })
}

/// Spatial statistics of one eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationStats {
    /// `Σ x |ψ_x|² / Σ |ψ_x|²` over 1-based node index `x`.
    pub center_of_mass: f64,
    pub side: Side,
    pub ipr: f64,
}

pub fn localization(vector: &[C64]) -> Result<LocalizationStats> {
    let weights: Vec<f64> = vector.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::Domain("eigenvector is zero".into()));
    }
    let com = weights.iter().enumerate().map(|(i, w)| (i + 1) as f64 * w).sum::<f64>() / total;
    let ipr = weights.iter().map(|w| w * w).sum::<f64>() / (total * total);
    let mid = (vector.len() as f64 + 1.0) / 2.0;
    let side = if com < mid { Side::Left } else { Side::Right };
    Ok(LocalizationStats { center_of_mass: com, side, ipr })
}

/// One OBC eigenstate with its localization data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainState {
    pub energy: C64,
    pub stats: LocalizationStats,
    pub residual: f64,
    pub zero_mode: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpectrum {
    pub cells: usize,
    pub bc: BoundaryCondition,
    pub matrix_norm: f64,
    pub near_defective: bool,
    pub states: Vec<ChainState>,
}

impl ChainSpectrum {
    pub fn left_fraction(&self) -> f64 {
        if self.states.is_empty() {
            return 0.0;
        }
        let left = self.states.iter().filter(|s| s.stats.side == Side::Left).count();
        left as f64 / self.states.len() as f64
    }

    /// CSV with columns `index,re_e,im_e,center_of_mass,ipr,side`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re_e,im_e,center_of_mass,ipr,side\n");
        for (i, s) in self.states.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                i, s.energy.re, s.energy.im, s.stats.center_of_mass, s.stats.ipr, s.stats.side
            );
        }
        out
    }
}

/// Diagonalise a finite chain. States are sorted by `(Re E, Im E)`.
pub fn chain_spectrum(model: &ModelSpec, cells: usize, bc: BoundaryCondition) -> Result<ChainSpectrum> {
    let rs = real_space_matrix(model, cells, bc)?;
    spectrum_of(&rs)
}

pub fn spectrum_of(rs: &RealSpaceMatrix) -> Result<ChainSpectrum> {
    let dec = eig_general(&rs.matrix)?;
    let norm = rs.matrix.norm_fro();
    let mut states = dec
        .pairs
        .iter()
        .map(|p| {
            Ok(ChainState {
                energy: p.value,
                stats: localization(&p.vector)?,
                residual: p.residual,
                zero_mode: p.value.norm() < TZM_TOL * norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    states.sort_by(|a, b| {
        a.energy
            .re
            .partial_cmp(&b.energy.re)
            .unwrap()
            .then(a.energy.im.partial_cmp(&b.energy.im).unwrap())
    });
    Ok(ChainSpectrum { cells: rs.cells, bc: rs.bc, matrix_norm: norm, near_defective: dec.near_defective, states })
}

/// Fraction of OBC eigenstates localized on the left half of the chain.
pub fn left_fraction(model: &ModelSpec, cells: usize) -> Result<f64> {
    Ok(chain_spectrum(model, cells, BoundaryCondition::Obc)?.left_fraction())
}

/// The roots β_{a;E} of `char_polynomial(model, e)`, sorted by modulus.
pub fn beta_solutions(model: &ModelSpec, e: C64) -> Result<RootSet> {
    model.char_polynomial(e)?.roots()
}

/// Number of β_{a;E} with `|β| > 1`, including roots lost at infinity.
pub fn beta_outside_count(model: &ModelSpec, e: C64) -> Result<usize> {
    Ok(beta_solutions(model, e)?.count_by_modulus(1.0, 0.0).outside)
}

/// `beta_outside_count` over a list of energies, evaluated in parallel.
pub fn beta_outside_map(model: &ModelSpec, energies: &[C64]) -> Vec<Result<usize>> {
    energies.par_iter().map(|&e| beta_outside_count(model, e)).collect()
}

/// Reference winding from the β roots: `ξ_r(E) = n_inside − M`. The flag is set
/// when a root lies on the unit circle (E on the PBC spectrum).
pub fn xi_ref_roots(model: &ModelSpec, e: C64) -> Result<(i32, bool)> {
    let rs = beta_solutions(model, e)?;
    let count = rs.count_by_modulus(1.0, 1e-9);
    Ok((count.inside as i32 - model.pole_order() as i32, count.on > 0))
}

/// Binomial coefficient, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of linearly independent semi-infinite skin states at energy `e` on one side.
pub fn nhse_state_count(model: &ModelSpec, e: C64, side: Side) -> Result<u64> {
    let (xi, on) = xi_ref_roots(model, e)?;
    if on {
        return Err(Error::ReferenceOnSpectrum { min_det: 0.0 });
    }
    Ok(nhse_count_for(xi, model.pole_order() as u64, model.zero_order() as u64, side))
}

/// `C(n+|ξ|, n+1)` right-localized states for ξ < 0, `C(m+ξ, m+1)` left for ξ > 0.
pub fn nhse_count_for(xi: i32, m: u64, n: u64, side: Side) -> u64 {
    match side {
        Side::Right if xi < 0 => binomial(n + xi.unsigned_abs() as u64, n + 1),
        Side::Left if xi > 0 => binomial(m + xi as u64, m + 1),
        _ => 0,
    }
}

/// `||β_M| − |β_{M+1}||` for the modulus-sorted roots at energy `e`, M the pole order.
pub fn gbz_residual(model: &ModelSpec, e: C64) -> Result<f64> {
    let rs = beta_solutions(model, e)?;
    let m = model.pole_order();
    if m == 0 || rs.len() < m + 1 {
        return Err(Error::Precondition(format!(
            "need at least {} finite roots for the GBZ condition, found {}",
            m + 1,
            rs.len()
        )));
    }
    Ok((rs.moduli[m] - rs.moduli[m - 1]).abs())
}

/// Geometric mean `√(|β_M||β_{M+1}|)`, the decay radius of GBZ states at `e`.
pub fn gbz_radius(model: &ModelSpec, e: C64) -> Result<f64> {
    let rs = beta_solutions(model, e)?;
    let m = model.pole_order();
    if m == 0 || rs.len() < m + 1 {
        return Err(Error::Precondition("too few finite roots for the GBZ radius".into()));
    }
    Ok((rs.moduli[m] * rs.moduli[m - 1]).sqrt())
}

/// Skin direction at `e`: sign of ξ_r(E), and the GBZ decay radius when ξ_r(E) = 0.
pub fn predicted_side(model: &ModelSpec, e: C64) -> Result<Side> {
    let (xi, _) = xi_ref_roots(model, e)?;
    if xi > 0 {
        Ok(Side::Left)
    } else if xi < 0 {
        Ok(Side::Right)
    } else if gbz_radius(model, e)? < 1.0 {
        Ok(Side::Left)
    } else {
        Ok(Side::Right)
    }
}
