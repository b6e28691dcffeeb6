//! Complex polynomials in β and their roots.

use num_complex::Complex64 as C64;

use crate::spectra::dense::{eigenvalues, DenseMatrix};
use crate::{Error, Result};

/// Default relative tolerance for grouping roots of equal modulus.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Polynomial with coefficients in ascending order, `Σ coeffs[i] β^i`.
///
/// The coefficient vector keeps its nominal length even if the top
/// coefficients vanish; see [`RootSet::degree_dropped`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Degree implied by the coefficient vector length.
    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| c.norm() != 0.0).unwrap_or(0)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.degree()]
    }

    pub fn trailing(&self) -> C64 {
        self.coeffs.first().copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn eval_derivative(&self, x: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * x + c * i as f64;
        }
        acc
    }

    /// `Σ |a_i| |x|^i`, the natural scale for evaluating at `x`.
    fn eval_scale(&self, x: C64) -> f64 {
        let r = x.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    /// All roots, via the companion matrix and one Newton polishing step.
    pub fn roots(&self) -> Result<RootSet> {
        if self.is_zero() {
            return Err(Error::IdenticallySingular);
        }
        let nominal = self.nominal_degree();
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let negligible = |c: &C64| c.norm() <= 1e-15 * max;
        let top = self.coeffs.iter().rposition(|c| !negligible(c)).unwrap_or(0);
        let bottom = self.coeffs.iter().position(|c| !negligible(c)).unwrap_or(0);
        if top == 0 {
            return Err(Error::ConstantPolynomial);
        }
        let dropped = nominal - top;
        let mut roots = vec![C64::new(0.0, 0.0); bottom];

        let core = &self.coeffs[bottom..=top];
        let d = core.len() - 1;
        if d > 0 {
            let lead = core[d];
            let mut comp = DenseMatrix::zeros(d);
            for j in 0..d {
                comp[(0, j)] = -core[d - 1 - j] / lead;
            }
            for i in 1..d {
                comp[(i, i - 1)] = C64::new(1.0, 0.0);
            }
            let core_poly = ComplexPolynomial::new(core.to_vec());
            for r in eigenvalues(&comp)? {
                roots.push(core_poly.newton_polish(r));
            }
        }

        let mut roots: Vec<(C64, f64)> = roots
            .into_iter()
            .map(|r| {
                let scale = self.eval_scale(r).max(f64::MIN_POSITIVE);
                (r, self.eval(r).norm() / scale)
            })
            .collect();
        roots.sort_by(|a, b| {
            a.0.norm()
                .partial_cmp(&b.0.norm())
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.arg().partial_cmp(&b.0.arg()).unwrap_or(std::cmp::Ordering::Equal))
        });
        let moduli = roots.iter().map(|(r, _)| r.norm()).collect();
        let residuals = roots.iter().map(|(_, e)| *e).collect();
        Ok(RootSet {
            roots: roots.into_iter().map(|(r, _)| r).collect(),
            moduli,
            residuals,
            degree_dropped: dropped,
            nominal_degree: nominal,
        })
    }

    fn newton_polish(&self, x: C64) -> C64 {
        let d = self.eval_derivative(x);
        if d.norm() == 0.0 {
            return x;
        }
        let y = x - self.eval(x) / d;
        if y.re.is_finite() && y.im.is_finite() && self.eval(y).norm() <= self.eval(x).norm() {
            y
        } else {
            x
        }
    }
}

/// Roots sorted by modulus (then argument).
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<C64>,
    pub moduli: Vec<f64>,
    /// Relative residual `|p(r)| / Σ|a_i||r|^i` for each root.
    pub residuals: Vec<f64>,
    /// Roots lost at infinity because the nominal leading coefficients vanish.
    pub degree_dropped: usize,
    pub nominal_degree: usize,
}

/// Root counts relative to a circle `|β| = r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModulusCount {
    pub inside: usize,
    pub on: usize,
    pub outside: usize,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Count roots inside, on and outside `|β| = r`. A root is "on" when
    /// `||β| - r| <= tol · max(1, r)`. Roots lost at infinity count as outside.
    pub fn count_by_modulus(&self, r: f64, tol: f64) -> ModulusCount {
        let band = tol * r.max(1.0);
        let mut out = ModulusCount { outside: self.degree_dropped, ..Default::default() };
        for &m in &self.moduli {
            if (m - r).abs() <= band {
                out.on += 1;
            } else if m < r {
                out.inside += 1;
            } else {
                out.outside += 1;
            }
        }
        out
    }

    /// Groups of consecutive indices whose moduli agree to `rel_tol`.
    pub fn tie_groups(&self, rel_tol: f64) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, &m) in self.moduli.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if {
                    let prev = self.moduli[*g.last().unwrap()];
                    (m - prev).abs() <= rel_tol * m.max(prev).max(f64::MIN_POSITIVE)
                } =>
                {
                    g.push(i)
                }
                _ => groups.push(vec![i]),
            }
        }
        groups
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quadratic_roots() {
        // (β - 2)(β - 0.5) = β² - 2.5β + 1
        let p = ComplexPolynomial::from_real(&[1.0, -2.5, 1.0]);
        let rs = p.roots().unwrap();
        assert_abs_diff_eq!(rs.roots[0].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rs.roots[1].re, 2.0, epsilon = 1e-14);
        assert_eq!(rs.count_by_modulus(1.0, 1e-9), ModulusCount { inside: 1, on: 0, outside: 1 });
    }

    #[test]
    fn roots_of_unity_are_on_circle() {
        let p = ComplexPolynomial::from_real(&[-1.0, 0.0, 0.0, 0.0, 1.0]);
        let rs = p.roots().unwrap();
        assert_eq!(rs.count_by_modulus(1.0, 1e-9).on, 4);
        assert_eq!(rs.tie_groups(DEFAULT_TIE_TOL).len(), 1);
    }

    #[test]
    fn zero_low_order_coefficients_give_roots_at_origin() {
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let rs = p.roots().unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.roots[0], c(0.0, 0.0));
        assert_eq!(rs.roots[1], c(0.0, 0.0));
        assert_abs_diff_eq!(rs.roots[2].re, 1.0, epsilon = 1e-14);
        assert_eq!(rs.count_by_modulus(0.5, 1e-9).inside, 2);
    }

    #[test]
    fn dropped_leading_coefficient_counts_outside() {
        let p = ComplexPolynomial::from_real(&[1.0, -2.0, 0.0]);
        let rs = p.roots().unwrap();
        assert_eq!(rs.degree_dropped, 1);
        assert_eq!(rs.len(), 1);
        let count = rs.count_by_modulus(1.0, 1e-9);
        assert_eq!(count, ModulusCount { inside: 1, on: 0, outside: 1 });
    }

    #[test]
    fn constant_and_zero_polynomials() {
        assert_eq!(ComplexPolynomial::from_real(&[3.0]).roots().unwrap_err(), Error::ConstantPolynomial);
        assert_eq!(ComplexPolynomial::from_real(&[3.0, 0.0]).roots().unwrap_err(), Error::ConstantPolynomial);
        assert_eq!(ComplexPolynomial::from_real(&[0.0, 0.0]).roots().unwrap_err(), Error::IdenticallySingular);
    }

    #[test]
    fn hopf_polynomial_has_one_root_inside() {
        let p = ComplexPolynomial::from_real(&[1.4, 2.24, 0.0, 1.0, 1.6]);
        let rs = p.roots().unwrap();
        let count = rs.count_by_modulus(1.0, 1e-9);
        assert_eq!(count, ModulusCount { inside: 1, on: 0, outside: 3 });
        assert!(rs.max_residual() < 1e-13);
    }

    #[test]
    fn eval_and_derivative() {
        let p = ComplexPolynomial::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(p.eval(c(2.0, 0.0)), c(17.0, 0.0));
        assert_eq!(p.eval_derivative(c(2.0, 0.0)), c(14.0, 0.0));
        assert_eq!(p.leading(), c(3.0, 0.0));
        assert_eq!(p.trailing(), c(1.0, 0.0));
    }

    proptest! {
        #[test]
        fn vieta_relations(coeffs in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 2..9)) {
            let mut coeffs: Vec<C64> = coeffs.into_iter().map(|(a, b)| c(a, b)).collect();
            let last = coeffs.len() - 1;
            if coeffs[last].norm() < 0.1 { coeffs[last] = c(1.0, 0.0); }
            if coeffs[0].norm() < 0.1 { coeffs[0] = c(0.5, 0.0); }
            let p = ComplexPolynomial::new(coeffs.clone());
            let rs = p.roots().unwrap();
            let d = rs.len();
            prop_assert_eq!(d, last);
            let sum: C64 = rs.roots.iter().sum();
            let prod: C64 = rs.roots.iter().product();
            let lead = coeffs[last];
            let want_sum = -coeffs[last - 1] / lead;
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            let want_prod = coeffs[0] / lead * sign;
            let scale = 1.0 + rs.moduli.iter().copied().fold(0.0, f64::max).powi(d as i32);
            prop_assert!((sum - want_sum).norm() < 1e-7 * scale);
            prop_assert!((prod - want_prod).norm() < 1e-7 * scale);
        }

        #[test]
        fn real_polynomial_roots_close_under_conjugation(coeffs in proptest::collection::vec(-3.0..3.0f64, 3..8)) {
            let mut coeffs = coeffs;
            let last = coeffs.len() - 1;
            if coeffs[last].abs() < 0.1 { coeffs[last] = 1.0; }
            let rs = ComplexPolynomial::from_real(&coeffs).roots().unwrap();
            for r in &rs.roots {
                let best = rs.roots.iter().map(|s| (s - r.conj()).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(best < 1e-6 * (1.0 + r.norm()));
            }
        }

        #[test]
        fn counts_partition_degree(coeffs in proptest::collection::vec(-3.0..3.0f64, 2..8), r in 0.1..3.0f64) {
            let p = ComplexPolynomial::from_real(&coeffs);
            if let Ok(rs) = p.roots() {
                let count = rs.count_by_modulus(r, 1e-9);
                prop_assert_eq!(count.inside + count.on + count.outside, p.nominal_degree());
            }
        }
    }
}
