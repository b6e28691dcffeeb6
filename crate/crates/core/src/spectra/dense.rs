//! Dense complex linear algebra: general eigenproblem and LU.
//!
//! Eigenvalues come from balancing, Householder reduction to Hessenberg form and
//! single-shift QR with Wilkinson shifts. Eigenvectors are obtained by inverse
//! iteration on the Hessenberg matrix and transformed back.

use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Largest dimension accepted by the dense solvers.
pub const MAX_DIM: usize = 2000;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Build from row-major data. Panics if `data.len() != n * n`.
    pub fn from_row_major(n: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), n * n, "expected {} entries", n * n);
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> DenseMatrix {
        DenseMatrix { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalue with a unit-norm right eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    pub vector: Vec<C64>,
    /// `‖M v - λ v‖ / ‖v‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub pairs: Vec<EigenPair>,
    /// Some eigenvectors are numerically parallel (close to an exceptional point).
    pub near_defective: bool,
    /// Every residual is below `1e-8 ‖M‖`.
    pub residuals_ok: bool,
}

fn check_input(m: &DenseMatrix) -> Result<()> {
    if m.dim() > MAX_DIM {
        return Err(Error::TooLarge(m.dim()));
    }
    if !m.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    Ok(())
}

fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett–Reinsch balancing by powers of two. Returns the diagonal scaling `D`
/// with `B = D^{-1} A D`.
fn balance(a: &mut DenseMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut d = vec![1.0; n];
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(a[(j, i)]);
                    r += abs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    d
}

/// Householder reduction to upper Hessenberg form, `A = Q H Q*`.
/// Returns the reflector vectors (reflector `k` acts on indices `k+1..n`).
fn hessenberg(a: &mut DenseMatrix) -> Vec<Vec<C64>> {
    let n = a.dim();
    let mut reflectors = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            reflectors.push(vec![ZERO; v.len()]);
            continue;
        }
        let phase = if v[0].norm() == 0.0 { ONE } else { v[0] / v[0].norm() };
        v[0] += phase * xnorm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2 v v*) A
        for j in 0..n {
            let mut s = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(k + 1 + idx, j)];
            }
            s *= 2.0;
            for (idx, vi) in v.iter().enumerate() {
                a[(k + 1 + idx, j)] -= vi * s;
            }
        }
        // A <- A (I - 2 v v*)
        for i in 0..n {
            let mut s = ZERO;
            for (idx, vi) in v.iter().enumerate() {
                s += a[(i, k + 1 + idx)] * vi;
            }
            s *= 2.0;
            for (idx, vi) in v.iter().enumerate() {
                a[(i, k + 1 + idx)] -= s * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
        reflectors.push(v);
    }
    reflectors
}

fn apply_q(reflectors: &[Vec<C64>], y: &mut [C64]) {
    for (k, v) in reflectors.iter().enumerate().rev() {
        let mut s = ZERO;
        for (idx, vi) in v.iter().enumerate() {
            s += vi.conj() * y[k + 1 + idx];
        }
        s *= 2.0;
        for (idx, vi) in v.iter().enumerate() {
            y[k + 1 + idx] -= vi * s;
        }
    }
}

/// Rotation `[c s; -s̄ c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, ONE);
    }
    let norm = an.hypot(bn);
    let alpha = a / an;
    (an / norm, alpha * b.conj() / norm)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroyed).
fn hessenberg_qr(h: &mut DenseMatrix) -> Result<Vec<C64>> {
    let n = h.dim();
    let mut values = vec![ZERO; n];
    if n == 0 {
        return Ok(values);
    }
    let max_iter = 30 * n.max(1);
    let mut total = 0usize;
    let mut iter_here = 0usize;
    let mut hi = n - 1;
    let mut found = 0usize;
    let norm = h.norm_fro().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    loop {
        // deflation search
        let mut l = hi;
        while l > 0 {
            let s = abs1(h[(l, l)]) + abs1(h[(l - 1, l - 1)]);
            let s = if s == 0.0 { norm } else { s };
            if abs1(h[(l, l - 1)]) <= eps * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            values[hi] = h[(hi, hi)];
            found += 1;
            iter_here = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if total >= max_iter {
            return Err(Error::NoConvergence { iterations: total, converged: found, dim: n });
        }
        total += 1;
        iter_here += 1;

        let sigma = if iter_here % 10 == 0 {
            let sub = h[(hi, hi - 1)].norm() + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + C64::new(0.75 * sub, 0.25 * sub)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in l..=hi {
            h[(i, i)] -= sigma;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = l + idx;
            for i in l..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] += sigma;
        }
    }
    Ok(values)
}

/// Eigenvalues only.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<C64>> {
    check_input(m)?;
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    hessenberg_qr(&mut a)
}

/// Solve `(H - λ I) y = b` for upper Hessenberg `H` with adjacent-row pivoting.
fn hessenberg_solve(h: &DenseMatrix, lambda: C64, b: &mut [C64], tiny: f64) {
    let n = h.dim();
    let mut t = h.clone();
    for i in 0..n {
        t[(i, i)] -= lambda;
    }
    for k in 0..n.saturating_sub(1) {
        if t[(k + 1, k)].norm() > t[(k, k)].norm() {
            for j in k..n {
                let tmp = t[(k, j)];
                t[(k, j)] = t[(k + 1, j)];
                t[(k + 1, j)] = tmp;
            }
            b.swap(k, k + 1);
        }
        if t[(k, k)].norm() < tiny {
            t[(k, k)] = C64::new(tiny, 0.0);
        }
        let l = t[(k + 1, k)] / t[(k, k)];
        if l != ZERO {
            for j in k..n {
                let v = t[(k, j)];
                t[(k + 1, j)] -= l * v;
            }
            let bk = b[k];
            b[k + 1] -= l * bk;
        }
    }
    for i in (0..n).rev() {
        if t[(i, i)].norm() < tiny {
            t[(i, i)] = C64::new(tiny, 0.0);
        }
        let mut s = b[i];
        for j in i + 1..n {
            s -= t[(i, j)] * b[j];
        }
        b[i] = s / t[(i, i)];
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let nrm = vec_norm(v);
    if nrm > 0.0 && nrm.is_finite() {
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
}

fn residual(m: &DenseMatrix, lambda: C64, v: &[C64]) -> f64 {
    let mv = m.mul_vec(v);
    let r: f64 = mv.iter().zip(v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum::<f64>().sqrt();
    r / vec_norm(v).max(f64::MIN_POSITIVE)
}

/// Full eigendecomposition with right eigenvectors.
pub fn eig_general(m: &DenseMatrix) -> Result<EigenDecomposition> {
    check_input(m)?;
    let n = m.dim();
    let mut b = m.clone();
    let d = balance(&mut b);
    let reflectors = hessenberg(&mut b);
    let h = b;
    let mut work = h.clone();
    let values = hessenberg_qr(&mut work)?;

    let hnorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let mnorm = m.norm_fro();
    let tiny = f64::EPSILON * hnorm;
    let tol = 1e-8 * mnorm.max(f64::MIN_POSITIVE);

    let mut pairs = Vec::with_capacity(n);
    for (idx, &lambda) in values.iter().enumerate() {
        // deterministic, index-dependent start vector
        let mut y: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 + 0.1 * ((i * 7 + idx * 3) % 11) as f64, 0.05 * ((i + idx) % 5) as f64))
            .collect();
        let mut best: Option<(f64, Vec<C64>)> = None;
        for _ in 0..4 {
            hessenberg_solve(&h, lambda, &mut y, tiny);
            if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                break;
            }
            normalize(&mut y);
            let mut v = y.clone();
            apply_q(&reflectors, &mut v);
            for (vi, di) in v.iter_mut().zip(&d) {
                *vi *= di;
            }
            normalize(&mut v);
            let r = residual(m, lambda, &v);
            if best.as_ref().is_none_or(|(br, _)| r < *br) {
                best = Some((r, v));
            }
            if r < tol * 1e-3 {
                break;
            }
        }
        let (res, vector) = best.unwrap_or_else(|| {
            let mut v = vec![ZERO; n];
            if n > 0 {
                v[0] = ONE;
            }
            (residual(m, lambda, &v), v)
        });
        pairs.push(EigenPair { value: lambda, vector, residual: res });
    }

    let residuals_ok = pairs.iter().all(|p| p.residual < tol.max(1e-300));
    let near_defective = detect_near_defective(&pairs, mnorm);
    Ok(EigenDecomposition { pairs, near_defective, residuals_ok })
}

fn detect_near_defective(pairs: &[EigenPair], scale: f64) -> bool {
    let close = 1e-6 * scale.max(f64::MIN_POSITIVE);
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            if (pairs[i].value - pairs[j].value).norm() > close {
                continue;
            }
            let overlap: C64 = pairs[i].vector.iter().zip(&pairs[j].vector).map(|(a, b)| a.conj() * b).sum();
            if overlap.norm() > 0.99 {
                return true;
            }
        }
    }
    false
}

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        check_input(a)?;
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == 0.0 {
                return Err(Error::Domain("matrix is singular".into()));
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / pivot;
                lu[(i, k)] = l;
                if l != ZERO {
                    for j in k + 1..n {
                        let v = lu[(k, j)];
                        lu[(i, j)] -= l * v;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.lu.dim();
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![ZERO; n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = ZERO);
            e[j] = ONE;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.dim();
        let mut det = ONE;
        for i in 0..n {
            det *= self.lu[(i, i)];
        }
        let mut seen = vec![false; n];
        let mut sign = 1.0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        det * sign
    }
}

/// Matrix inverse via LU.
pub fn inverse(a: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(Lu::new(a)?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn diagonal_matrix() {
        let m = DenseMatrix::from_rows(&[
            vec![c(3.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 2.0)],
        ]);
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!((ev[0] - c(-1.0, 2.0)).norm() < 1e-14);
        assert!((ev[1] - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_matrix_has_imaginary_pair() {
        let m = DenseMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_of_cubic() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        let m = DenseMatrix::from_rows(&[
            vec![c(6.0, 0.0), c(-11.0, 0.0), c(6.0, 0.0)],
            vec![o, z, z],
            vec![z, o, z],
        ]);
        let ev = sorted(eigenvalues(&m).unwrap());
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-12, "{got}");
        }
    }

    #[test]
    fn eigenvectors_have_small_residual() {
        let n = 12;
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(((i * 3 + j * 5) % 7) as f64 - 3.0, ((i + 2 * j) % 4) as f64 * 0.5);
            }
        }
        let dec = eig_general(&m).unwrap();
        assert!(dec.residuals_ok);
        assert!(!dec.near_defective);
        for p in &dec.pairs {
            assert!(p.residual < 1e-10 * m.norm_fro(), "residual {}", p.residual);
        }
    }

    #[test]
    fn jordan_block_flagged_near_defective() {
        let m = DenseMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let dec = eig_general(&m).unwrap();
        assert!(dec.near_defective);
    }

    #[test]
    fn too_large_rejected() {
        let m = DenseMatrix::zeros(MAX_DIM + 1);
        assert_eq!(eigenvalues(&m).unwrap_err(), Error::TooLarge(MAX_DIM + 1));
    }

    #[test]
    fn empty_matrix() {
        assert!(eigenvalues(&DenseMatrix::zeros(0)).unwrap().is_empty());
    }

    #[test]
    fn lu_inverse_and_det() {
        let m = DenseMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let lu = Lu::new(&m).unwrap();
        let prod = m.matmul(&lu.inverse());
        assert!(prod.sub(&DenseMatrix::identity(3)).norm_fro() < 1e-14);
        let ev = eigenvalues(&m).unwrap();
        let det_ev: C64 = ev.iter().product();
        assert!((det_ev - lu.det()).norm() < 1e-12);
    }

    #[test]
    fn singular_lu_rejected() {
        let m = DenseMatrix::zeros(2);
        assert!(Lu::new(&m).is_err());
    }

    proptest! {
        #[test]
        fn trace_and_determinant_preserved(entries in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 25)) {
            let m = DenseMatrix::from_row_major(5, entries.iter().map(|&(a, b)| c(a, b)).collect());
            let ev = eigenvalues(&m).unwrap();
            let tr: C64 = (0..5).map(|i| m[(i, i)]).sum();
            let sum: C64 = ev.iter().sum();
            prop_assert!((tr - sum).norm() < 1e-10 * (1.0 + m.norm_fro()));
            if let Ok(lu) = Lu::new(&m) {
                let prod: C64 = ev.iter().product();
                prop_assert!((prod - lu.det()).norm() < 1e-9 * (1.0 + m.norm_fro().powi(5)));
            }
        }

        #[test]
        fn eigenpairs_satisfy_definition(entries in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 36)) {
            let m = DenseMatrix::from_row_major(6, entries.iter().map(|&(a, b)| c(a, b)).collect());
            let dec = eig_general(&m).unwrap();
            if !dec.near_defective {
                prop_assert!(dec.residuals_ok);
            }
        }
    }
}
