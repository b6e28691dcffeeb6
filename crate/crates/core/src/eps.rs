//! Exceptional points at real momentum and the type of ξ transitions.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::braid::{braiding_index_roots, UNIT_CIRCLE_TOL};
use crate::model::{ModelSpec, ParamPath};
use crate::{Error, Result};

/// Map an angle into (−π, π].
pub fn wrap_k(k: f64) -> f64 {
    let mut w = k.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    if (w + PI).abs() < 1e-12 {
        w = PI;
    }
    w
}

fn det_traceless(model: &ModelSpec, k: f64) -> C64 {
    model.bloch_hamiltonian(k).traceless().det()
}

/// Gauss–Newton on `|det H̃(e^{ik})|²` starting from `k`.
fn polish_k(model: &ModelSpec, mut k: f64) -> f64 {
    let h = 1e-6;
    for _ in 0..8 {
        let f = det_traceless(model, k);
        if f.norm() == 0.0 {
            break;
        }
        let df = (det_traceless(model, k + h) - det_traceless(model, k - h)) / (2.0 * h);
        let denom = df.norm_sqr();
        if denom == 0.0 {
            break;
        }
        let step = -(df.conj() * f).re / denom;
        let next = k + step;
        if det_traceless(model, next).norm() < f.norm() {
            k = next;
        } else {
            break;
        }
        if step.abs() < 1e-15 {
            break;
        }
    }
    wrap_k(k)
}

/// Real momenta in (−π, π] where the gap of `H̃(k)` closes, sorted ascending.
/// Empty for models off every phase boundary.
pub fn gap_zeros_real_k(model: &ModelSpec) -> Result<Vec<f64>> {
    let half_trace = model.bloch_hamiltonian(0.0).trace() * 0.5;
    let rs = model.char_polynomial(half_trace)?.roots()?;
    let mut ks: Vec<f64> = Vec::new();
    for (beta, modulus) in rs.roots.iter().zip(&rs.moduli) {
        if (modulus - 1.0).abs() >= UNIT_CIRCLE_TOL {
            continue;
        }
        let k = polish_k(model, wrap_k(beta.arg()));
        let dup = ks.iter().any(|&q| {
            let d = (q - k).abs();
            d.min(2.0 * PI - d) < 1e-7
        });
        if !dup {
            ks.push(k);
        }
    }
    ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ks)
}

/// True when `H̃(k)` is a nonzero nilpotent matrix, i.e. defective.
pub fn is_exceptional(model: &ModelSpec, k: f64, tol: f64) -> bool {
    let h = model.bloch_hamiltonian(k).traceless();
    let norm = h.frobenius_norm();
    norm > tol && (h * h).frobenius_norm() <= tol * norm.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TransitionType {
    Type1,
    Type2,
}

impl fmt::Display for TransitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransitionType::Type1 => "Type1",
            TransitionType::Type2 => "Type2",
        })
    }
}

/// Analytic phase-boundary lines of the unidirectional model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryLine {
    /// `C_BA,n = −C_AB,0`
    AB,
    /// `C_BA,n = +C_AB,0`
    EF,
    /// `C_AB,−m = −C_AB,0`
    PQ,
    /// `C_AB,−m = +C_AB,0`
    RS,
}

impl BoundaryLine {
    pub const ALL: [BoundaryLine; 4] = [BoundaryLine::AB, BoundaryLine::EF, BoundaryLine::PQ, BoundaryLine::RS];

    pub fn condition(&self) -> &'static str {
        match self {
            BoundaryLine::AB => "C_BA,n = -C_AB,0",
            BoundaryLine::EF => "C_BA,n = +C_AB,0",
            BoundaryLine::PQ => "C_AB,-m = -C_AB,0",
            BoundaryLine::RS => "C_AB,-m = +C_AB,0",
        }
    }

    pub fn transition(&self) -> TransitionType {
        match self {
            BoundaryLine::AB | BoundaryLine::EF => TransitionType::Type1,
            BoundaryLine::PQ | BoundaryLine::RS => TransitionType::Type2,
        }
    }

    /// The coupling that sits on the line, and its value for `C_AB,0 = 1`.
    pub fn on_line(&self) -> (ParamPath, f64) {
        match self {
            BoundaryLine::AB => (ParamPath::CbaN, -1.0),
            BoundaryLine::EF => (ParamPath::CbaN, 1.0),
            BoundaryLine::PQ => (ParamPath::CabNegM, -1.0),
            BoundaryLine::RS => (ParamPath::CabNegM, 1.0),
        }
    }

    /// H1 with `C_AB,0 = 1`, n = 1, on this line; the other coupling is 0.5.
    pub fn model(&self, m: usize) -> Result<ModelSpec> {
        let (path, value) = self.on_line();
        ModelSpec::h1(1.0, 0.5, 0.5, m, 1)?.with_param(path, value)
    }
}

impl fmt::Display for BoundaryLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of crossing a boundary along one parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    pub kind: TransitionType,
    pub xi_below: i32,
    pub xi_above: i32,
    pub ep_k: Vec<f64>,
    /// The handedness rule and the EP-count rule give the same type.
    pub consistent: bool,
}

fn xi_off_boundary(model: &ModelSpec) -> Result<i32> {
    let r = braiding_index_roots(model)?;
    if r.on_boundary {
        return Err(Error::OnPhaseBoundary("offset point still touches the unit circle".into()));
    }
    Ok(r.xi)
}

/// Classify the transition at `path = value` by comparing ξ at `value ± eps`.
/// Opposite signs give Type2, equal nonzero signs Type1; when one side is zero
/// the EP count decides (1 → Type1, more → Type2).
pub fn classify_transition(template: &ModelSpec, path: ParamPath, value: f64, eps: f64) -> Result<Transition> {
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("step must be positive, got {eps}")));
    }
    let below = xi_off_boundary(&template.with_param(path, value - eps)?)?;
    let above = xi_off_boundary(&template.with_param(path, value + eps)?)?;
    if below == above {
        return Err(Error::NotATransition(format!("ξ = {below} on both sides")));
    }
    let ep_k = gap_zeros_real_k(&template.with_param(path, value)?)?;
    let by_count = if ep_k.len() > 1 { TransitionType::Type2 } else { TransitionType::Type1 };
    let by_sign = if below * above < 0 {
        Some(TransitionType::Type2)
    } else if below != 0 && above != 0 {
        Some(TransitionType::Type1)
    } else {
        None
    };
    let kind = by_sign.unwrap_or(by_count);
    let consistent = kind == by_count && !ep_k.is_empty();
    Ok(Transition { kind, xi_below: below, xi_above: above, ep_k, consistent })
}

/// Bisect a ξ discontinuity on `[lo, hi]` along `path` down to width `tol`.
pub fn locate_boundary(template: &ModelSpec, path: ParamPath, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(hi > lo) {
        return Err(Error::Precondition("need lo < hi and tol > 0".into()));
    }
    let xi_at = |v: f64| -> Result<Option<i32>> {
        let r = braiding_index_roots(&template.with_param(path, v)?)?;
        Ok(if r.on_boundary { None } else { Some(r.xi) })
    };
    let (mut a, mut b) = (lo, hi);
    let xa = xi_at(a)?.ok_or_else(|| Error::OnPhaseBoundary(format!("start point {a} is on a boundary")))?;
    let xb = xi_at(b)?.ok_or_else(|| Error::OnPhaseBoundary(format!("end point {b} is on a boundary")))?;
    if xa == xb {
        return Err(Error::NotATransition(format!("ξ = {xa} at both ends")));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        match xi_at(mid)? {
            None => return Ok(mid),
            Some(x) if x == xa => a = mid,
            Some(_) => b = mid,
        }
    }
    Ok(0.5 * (a + b))
}

/// One cell of the EP table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpRow {
    pub m: usize,
    pub boundary: BoundaryLine,
    pub kind: TransitionType,
    pub k: Vec<f64>,
}

/// EP momenta on the four analytic lines for each long-range order `m`.
pub fn ep_table_generate(m_values: &[usize]) -> Result<Vec<EpRow>> {
    let mut rows = Vec::new();
    for &m in m_values {
        if !(2..=12).contains(&m) {
            return Err(Error::Precondition(format!("m must lie in 2..=12, got {m}")));
        }
        for line in BoundaryLine::ALL {
            let k = gap_zeros_real_k(&line.model(m)?)?;
            rows.push(EpRow { m, boundary: line, kind: line.transition(), k });
        }
    }
    Ok(rows)
}

/// CSV with columns `m,boundary,type,k`; k values are `;`-separated.
pub fn ep_table_csv(rows: &[EpRow]) -> String {
    let mut out = String::from("m,boundary,type,k\n");
    for r in rows {
        let ks: Vec<String> = r.k.iter().map(|k| format!("{k}")).collect();
        let _ = writeln!(out, "{},{},{},{}", r.m, r.boundary, r.kind, ks.join(";"));
    }
    out
}

/// One row per `m` with columns `m,AB,EF,PQ,RS`; k values are `;`-separated.
pub fn ep_table_wide_csv(rows: &[EpRow]) -> String {
    let mut out = String::from("m,AB,EF,PQ,RS\n");
    let mut ms: Vec<usize> = rows.iter().map(|r| r.m).collect();
    ms.dedup();
    for m in ms {
        let _ = write!(out, "{m}");
        for line in BoundaryLine::ALL {
            let ks: Vec<String> = rows
                .iter()
                .filter(|r| r.m == m && r.boundary == line)
                .flat_map(|r| r.k.iter().map(|k| format!("{k}")))
                .collect();
            let _ = write!(out, ",{}", ks.join(";"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_ks(got: &[f64], want: &[f64]) {
        let mut want = want.to_vec();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn rs_line_m2() {
        let ks = gap_zeros_real_k(&BoundaryLine::RS.model(2).unwrap()).unwrap();
        assert_ks(&ks, &[-PI / 2.0, PI / 2.0]);
    }

    #[test]
    fn ab_and_ef_lines_single_ep() {
        for m in 2..=6 {
            assert_ks(&gap_zeros_real_k(&BoundaryLine::AB.model(m).unwrap()).unwrap(), &[0.0]);
            assert_ks(&gap_zeros_real_k(&BoundaryLine::EF.model(m).unwrap()).unwrap(), &[PI]);
        }
    }

    #[test]
    fn pq_line_m5() {
        let ks = gap_zeros_real_k(&BoundaryLine::PQ.model(5).unwrap()).unwrap();
        let t = 2.0 * PI / 5.0;
        assert_ks(&ks, &[0.0, t, -t, 2.0 * t, -2.0 * t]);
    }

    #[test]
    fn type2_lines_have_m_zeros() {
        for m in 2..=12 {
            for line in [BoundaryLine::PQ, BoundaryLine::RS] {
                let model = line.model(m).unwrap();
                let ks = gap_zeros_real_k(&model).unwrap();
                assert_eq!(ks.len(), m, "{line} m={m}");
                for &k in &ks {
                    assert!(is_exceptional(&model, k, 1e-9));
                    assert!(ks.iter().any(|&q| (wrap_k(-k) - q).abs() < 1e-9), "not symmetric");
                }
            }
        }
    }

    #[test]
    fn off_boundary_is_empty() {
        let model = ModelSpec::h1(1.0, 1.4, 1.6, 3, 1).unwrap();
        assert!(gap_zeros_real_k(&model).unwrap().is_empty());
    }

    #[test]
    fn table_rows() {
        let rows = ep_table_generate(&[4, 6, 3]).unwrap();
        let find = |m, line| rows.iter().find(|r| r.m == m && r.boundary == line).unwrap();
        assert_ks(&find(4, BoundaryLine::PQ).k, &[0.0, PI / 2.0, -PI / 2.0, PI]);
        let p6 = PI / 6.0;
        assert_ks(&find(6, BoundaryLine::RS).k, &[p6, -p6, 5.0 * p6, -5.0 * p6, PI / 2.0, -PI / 2.0]);
        assert_ks(&find(3, BoundaryLine::EF).k, &[PI]);
        assert!(ep_table_generate(&[1]).is_err());
        let csv = ep_table_csv(&rows);
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.contains("3,EF,Type1,"));
        let wide = ep_table_wide_csv(&rows);
        assert_eq!(wide.lines().count(), 4);
        assert!(wide.lines().nth(3).unwrap().starts_with("3,0,"));
    }

    #[test]
    fn type1_transition_across_cban() {
        let template = ModelSpec::h1(1.0, 0.5, 0.0, 2, 1).unwrap();
        let t = classify_transition(&template, ParamPath::CbaN, 1.0, 0.05).unwrap();
        assert_eq!((t.xi_below, t.xi_above), (0, 1));
        assert_eq!(t.kind, TransitionType::Type1);
        assert_eq!(t.ep_k.len(), 1);
        assert!(t.consistent);
    }

    #[test]
    fn type2_transition_unlink_to_hopf() {
        let template = ModelSpec::h1(1.0, 0.0, 0.5, 2, 1).unwrap();
        let t = classify_transition(&template, ParamPath::CabNegM, -1.0, 0.05).unwrap();
        assert_eq!((t.xi_below, t.xi_above), (-2, 0));
        assert_eq!(t.kind, TransitionType::Type2);
        assert_eq!(t.ep_k.len(), 2);
        assert!(t.consistent);
    }

    #[test]
    fn handedness_flip_is_type2() {
        let template = ModelSpec::h1(1.0, 0.0, 1.5, 3, 1).unwrap();
        let t = classify_transition(&template, ParamPath::CabNegM, 1.0, 0.05).unwrap();
        assert_eq!((t.xi_below, t.xi_above), (1, -2));
        assert_eq!(t.kind, TransitionType::Type2);
        assert!(t.consistent);
    }

    #[test]
    fn degenerate_calls() {
        let template = ModelSpec::h1(1.0, 0.5, 0.0, 2, 1).unwrap();
        assert!(matches!(
            classify_transition(&template, ParamPath::CbaN, 1.0, 0.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            classify_transition(&template, ParamPath::CbaN, 0.3, 0.05),
            Err(Error::NotATransition(_))
        ));
    }

    #[test]
    fn bisection_finds_h2_boundary() {
        let template = ModelSpec::h2(1.0, 0.0, 0.5, 3, 1, 1.0).unwrap();
        let b = locate_boundary(&template, ParamPath::CabNegM, 0.0, 2.7, 1e-10).unwrap();
        let t = classify_transition(&template, ParamPath::CabNegM, b, 1e-4).unwrap();
        assert_ne!(t.xi_below, t.xi_above);
        assert!(!t.ep_k.is_empty());
    }

    #[test]
    fn wrap_into_half_open_interval() {
        assert!((wrap_k(-PI) - PI).abs() < 1e-15);
        assert!((wrap_k(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_k(0.5), 0.5);
    }
}
