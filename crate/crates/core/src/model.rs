//! Two-band Bloch Hamiltonians with long-range unidirectional or bidirectional
//! sublattice coupling, and their analytic continuation to complex β = e^{ik}.
//!
//! Three families are supported:
//!
//! - `H1`: zero diagonal, `H_AB = C_AB,0 + C_AB,-m β^{-m}`, `H_BA = C_AB,0 + C_BA,n β^n`.
//! - `H2`: `H1` plus the staggered on-site potential `diag(-C_i, +C_i)`.
//! - `H3`: arbitrary Laurent polynomials in both off-diagonal entries.
//!
//! Every family may carry a σ_z mass `C_z`, entering as `diag(+C_z, -C_z)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::polyalg::ComplexPolynomial;
use crate::{Error, Result};

/// Dense 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

impl Mat2 {
    pub fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// `H - ½ Tr(H) I`.
    pub fn traceless(&self) -> Self {
        let half = self.trace() * 0.5;
        Self::new(self.a11 - half, self.a12, self.a21, self.a22 - half)
    }

    pub fn shifted(&self, e: C64) -> Self {
        Self::new(self.a11 - e, self.a12, self.a21, self.a22 - e)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Closed-form eigenvalues `(E-, E+)` with `E± = ½Tr ± √(d² + a12·a21)`,
    /// `d = ½(a11 - a22)`, principal square root.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let half_tr = self.trace() * 0.5;
        let d = (self.a11 - self.a22) * 0.5;
        let s = (d * d + self.a12 * self.a21).sqrt();
        (half_tr - s, half_tr + s)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

/// Laurent polynomial `Σ coeffs[i] β^(lowest + i)` with a structural exponent range.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent {
    lowest: i32,
    coeffs: Vec<C64>,
}

impl Laurent {
    pub fn new(lowest: i32, coeffs: Vec<C64>) -> Self {
        Self { lowest, coeffs }
    }

    pub fn lowest(&self) -> i32 {
        self.lowest
    }

    pub fn highest(&self) -> i32 {
        self.lowest + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i32) -> C64 {
        let idx = exp - self.lowest;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(move |(i, &c)| (self.lowest + i as i32, c))
    }

    pub fn eval(&self, beta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * beta + c;
        }
        acc * beta.powi(self.lowest)
    }

    /// Derivative with respect to β.
    pub fn eval_derivative(&self, beta: C64) -> C64 {
        self.terms()
            .filter(|(e, _)| *e != 0)
            .map(|(e, c)| c * (e as f64) * beta.powi(e - 1))
            .sum()
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Laurent::new(self.lowest + other.lowest, coeffs)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Couplings of the unidirectional model: `C_AB,0`, `C_AB,-m` (m cells left), `C_BA,n` (n cells right).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnidirectionalCouplings {
    pub c_ab0: C64,
    pub c_ab_neg_m: C64,
    pub c_ba_n: C64,
    pub m: usize,
    pub n: usize,
}

impl UnidirectionalCouplings {
    pub fn real(c_ab0: f64, c_ab_neg_m: f64, c_ba_n: f64, m: usize, n: usize) -> Self {
        Self {
            c_ab0: C64::new(c_ab0, 0.0),
            c_ab_neg_m: C64::new(c_ab_neg_m, 0.0),
            c_ba_n: C64::new(c_ba_n, 0.0),
            m,
            n,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidModel("ranges m and n must be at least 1".into()));
        }
        if self.c_ab0.norm() == 0.0 {
            return Err(Error::InvalidModel("C_AB,0 must be nonzero".into()));
        }
        if ![self.c_ab0, self.c_ab_neg_m, self.c_ba_n].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidModel("couplings must be finite".into()));
        }
        Ok(())
    }
}

/// On-site terms: staggered potential `C_i` and σ_z mass `C_z`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OnsiteParams {
    pub c_i: f64,
    pub c_z: f64,
}

/// Bidirectional long-range couplings.
///
/// `ab_left[a-1]` multiplies β^{-a} (a = 1..m_AB), `ab_right[b]` multiplies β^{b}
/// (b = 0..n_AB); `ba_*` likewise for the lower-left element.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BidirectionalCouplings {
    pub ab_left: Vec<C64>,
    pub ab_right: Vec<C64>,
    pub ba_left: Vec<C64>,
    pub ba_right: Vec<C64>,
}

impl BidirectionalCouplings {
    pub fn m_ab(&self) -> usize {
        self.ab_left.len()
    }
    pub fn n_ab(&self) -> usize {
        self.ab_right.len().saturating_sub(1)
    }
    pub fn m_ba(&self) -> usize {
        self.ba_left.len()
    }
    pub fn n_ba(&self) -> usize {
        self.ba_right.len().saturating_sub(1)
    }

    fn validate(&self) -> Result<()> {
        if self.ab_right.is_empty() || self.ba_right.is_empty() {
            return Err(Error::InvalidModel(
                "ab_right and ba_right must contain at least the β^0 coefficient".into(),
            ));
        }
        let nonzero = |l: &[C64], r: &[C64]| l.iter().chain(r).any(|c| c.norm() > 0.0);
        if !nonzero(&self.ab_left, &self.ab_right) || !nonzero(&self.ba_left, &self.ba_right) {
            return Err(Error::InvalidModel(
                "each off-diagonal element needs at least one nonzero coupling".into(),
            ));
        }
        let all = self.ab_left.iter().chain(&self.ab_right).chain(&self.ba_left).chain(&self.ba_right);
        if !all.clone().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidModel("couplings must be finite".into()));
        }
        Ok(())
    }

    fn upper(&self) -> Laurent {
        let mut coeffs: Vec<C64> = self.ab_left.iter().rev().copied().collect();
        coeffs.extend_from_slice(&self.ab_right);
        Laurent::new(-(self.m_ab() as i32), coeffs)
    }

    fn lower(&self) -> Laurent {
        let mut coeffs: Vec<C64> = self.ba_left.iter().rev().copied().collect();
        coeffs.extend_from_slice(&self.ba_right);
        Laurent::new(-(self.m_ba() as i32), coeffs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    H1,
    H2,
    H3,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::H1 => "H1",
            Variant::H2 => "H2",
            Variant::H3 => "H3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hopping {
    Unidirectional(UnidirectionalCouplings),
    Bidirectional(BidirectionalCouplings),
}

/// A validated two-band model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDoc", into = "ModelDoc")]
pub struct ModelSpec {
    variant: Variant,
    hopping: Hopping,
    onsite: OnsiteParams,
}

impl ModelSpec {
    pub fn new(variant: Variant, hopping: Hopping, onsite: OnsiteParams) -> Result<Self> {
        if !onsite.c_i.is_finite() || !onsite.c_z.is_finite() {
            return Err(Error::InvalidModel("on-site terms must be finite".into()));
        }
        match (&variant, &hopping) {
            (Variant::H1, Hopping::Unidirectional(u)) => {
                u.validate()?;
                if onsite.c_i != 0.0 {
                    return Err(Error::InvalidModel("H1 has no on-site potential; use H2".into()));
                }
            }
            (Variant::H2, Hopping::Unidirectional(u)) => u.validate()?,
            (Variant::H3, Hopping::Bidirectional(b)) => b.validate()?,
            (v, _) => {
                return Err(Error::InvalidModel(format!("coupling record does not match variant {v}")))
            }
        }
        Ok(Self { variant, hopping, onsite })
    }

    /// Unidirectional model with real couplings.
    pub fn h1(c_ab0: f64, c_ab_neg_m: f64, c_ba_n: f64, m: usize, n: usize) -> Result<Self> {
        Self::new(
            Variant::H1,
            Hopping::Unidirectional(UnidirectionalCouplings::real(c_ab0, c_ab_neg_m, c_ba_n, m, n)),
            OnsiteParams::default(),
        )
    }

    pub fn h2(c_ab0: f64, c_ab_neg_m: f64, c_ba_n: f64, m: usize, n: usize, c_i: f64) -> Result<Self> {
        Self::new(
            Variant::H2,
            Hopping::Unidirectional(UnidirectionalCouplings::real(c_ab0, c_ab_neg_m, c_ba_n, m, n)),
            OnsiteParams { c_i, c_z: 0.0 },
        )
    }

    pub fn h3(couplings: BidirectionalCouplings, c_i: f64) -> Result<Self> {
        Self::new(Variant::H3, Hopping::Bidirectional(couplings), OnsiteParams { c_i, c_z: 0.0 })
    }

    /// Same model with the σ_z mass set to `c_z`.
    pub fn with_mass(&self, c_z: f64) -> Result<Self> {
        let mut onsite = self.onsite;
        onsite.c_z = c_z;
        Self::new(self.variant, self.hopping.clone(), onsite)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn hopping(&self) -> &Hopping {
        &self.hopping
    }

    pub fn onsite(&self) -> OnsiteParams {
        self.onsite
    }

    pub fn unidirectional(&self) -> Option<&UnidirectionalCouplings> {
        match &self.hopping {
            Hopping::Unidirectional(u) => Some(u),
            Hopping::Bidirectional(_) => None,
        }
    }

    pub fn bidirectional(&self) -> Option<&BidirectionalCouplings> {
        match &self.hopping {
            Hopping::Unidirectional(_) => None,
            Hopping::Bidirectional(b) => Some(b),
        }
    }

    /// Off-diagonal Laurent polynomials `(H_AB(β), H_BA(β))`.
    pub fn off_diagonals(&self) -> (Laurent, Laurent) {
        match &self.hopping {
            Hopping::Unidirectional(u) => {
                let mut upper = vec![C64::new(0.0, 0.0); u.m + 1];
                upper[0] = u.c_ab_neg_m;
                upper[u.m] = u.c_ab0;
                let mut lower = vec![C64::new(0.0, 0.0); u.n + 1];
                lower[0] = u.c_ab0;
                lower[u.n] = u.c_ba_n;
                (Laurent::new(-(u.m as i32), upper), Laurent::new(0, lower))
            }
            Hopping::Bidirectional(b) => (b.upper(), b.lower()),
        }
    }

    /// Diagonal entries `(H_AA, H_BB) = (-C_i + C_z, C_i - C_z)`.
    pub fn diagonal(&self) -> (C64, C64) {
        let d = -self.onsite.c_i + self.onsite.c_z;
        (C64::new(d, 0.0), C64::new(-d, 0.0))
    }

    /// Order of the pole of `det H(β)` at β = 0 (structural, from the declared ranges).
    pub fn pole_order(&self) -> usize {
        let (u, l) = self.off_diagonals();
        (-(u.lowest().min(0) + l.lowest().min(0))) as usize
    }

    /// Largest positive exponent of `det H(β)` (structural).
    pub fn zero_order(&self) -> usize {
        let (u, l) = self.off_diagonals();
        (u.highest().max(0) + l.highest().max(0)) as usize
    }

    /// Furthest hopping distance to the left and right, in cells.
    pub fn hopping_reach(&self) -> (usize, usize) {
        let (u, l) = self.off_diagonals();
        let left = (-u.lowest().min(0)).max(-l.lowest().min(0)) as usize;
        let right = u.highest().max(0).max(l.highest().max(0)) as usize;
        (left, right)
    }

    /// Scale of the model couplings, used for relative thresholds.
    pub fn coupling_scale(&self) -> f64 {
        let (u, l) = self.off_diagonals();
        let sum: f64 = u.coeffs().iter().chain(l.coeffs()).map(|c| c.norm()).sum();
        (sum + self.onsite.c_i.abs() + self.onsite.c_z.abs()).max(f64::MIN_POSITIVE)
    }

    pub fn surrogate_hamiltonian(&self, beta: C64) -> Result<Mat2> {
        if beta.norm() == 0.0 {
            return Err(Error::Domain("β = 0 is a pole of the surrogate Hamiltonian".into()));
        }
        Ok(self.eval_at(beta))
    }

    pub fn bloch_hamiltonian(&self, k: f64) -> Mat2 {
        self.eval_at(C64::from_polar(1.0, k))
    }

    fn eval_at(&self, beta: C64) -> Mat2 {
        let (u, l) = self.off_diagonals();
        let (d1, d2) = self.diagonal();
        Mat2::new(d1, u.eval(beta), l.eval(beta), d2)
    }

    /// `(E-, E+)` at real momentum. `E+` carries the principal square root of the
    /// half-gap, i.e. `Arg(E+ - ½Tr) ∈ (-π/2, π/2]`.
    pub fn bloch_eigenvalues(&self, k: f64) -> (C64, C64) {
        self.bloch_hamiltonian(k).eigenvalues()
    }

    /// Polynomial in β whose zeros are the β with `E` an eigenvalue of `H(β)`:
    /// `p(β) = β^M [H_AB H_BA - (H_AA - E)(H_BB - E)]`, with `M` the pole order.
    pub fn char_polynomial(&self, e: C64) -> Result<ComplexPolynomial> {
        let (u, l) = self.off_diagonals();
        let product = u.mul(&l);
        let (d1, d2) = self.diagonal();
        let constant = (d1 - e) * (d2 - e);
        let shift = self.pole_order() as i32;
        let top = shift + product.highest().max(0);
        let mut coeffs = vec![C64::new(0.0, 0.0); (top + 1) as usize];
        for (i, c) in product.coeffs().iter().enumerate() {
            let exp = product.lowest() + i as i32 + shift;
            coeffs[exp as usize] += c;
        }
        coeffs[shift as usize] -= constant;
        if coeffs.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::IdenticallySingular);
        }
        Ok(ComplexPolynomial::new(coeffs))
    }

    /// The equivalent bidirectional (`H3`) description of this model.
    pub fn to_bidirectional(&self) -> Result<ModelSpec> {
        let (u, l) = self.off_diagonals();
        let split = |p: &Laurent| {
            let left: Vec<C64> = (1..=(-p.lowest().min(0))).map(|a| p.coeff(-a)).collect();
            let right: Vec<C64> = (0..=p.highest().max(0)).map(|b| p.coeff(b)).collect();
            (left, right)
        };
        let (ab_left, ab_right) = split(&u);
        let (ba_left, ba_right) = split(&l);
        Self::new(
            Variant::H3,
            Hopping::Bidirectional(BidirectionalCouplings { ab_left, ab_right, ba_left, ba_right }),
            self.onsite,
        )
    }
}

/// A scalar model parameter, used as a sweep axis.
///
/// Text forms: `c_ab0`, `c_ab_neg_m`, `c_ba_n`, `c_i`, `c_z`, and for bidirectional
/// models `ab:<e>` / `ba:<e>` naming the coefficient of β^e, e.g. `ab:-3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamPath {
    CabZero,
    CabNegM,
    CbaN,
    Ci,
    Cz,
    Ab(i32),
    Ba(i32),
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamPath::CabZero => f.write_str("c_ab0"),
            ParamPath::CabNegM => f.write_str("c_ab_neg_m"),
            ParamPath::CbaN => f.write_str("c_ba_n"),
            ParamPath::Ci => f.write_str("c_i"),
            ParamPath::Cz => f.write_str("c_z"),
            ParamPath::Ab(e) => write!(f, "ab:{e}"),
            ParamPath::Ba(e) => write!(f, "ba:{e}"),
        }
    }
}

impl std::str::FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidModel(format!("unknown parameter `{s}`"));
        match s {
            "c_ab0" => Ok(ParamPath::CabZero),
            "c_ab_neg_m" => Ok(ParamPath::CabNegM),
            "c_ba_n" => Ok(ParamPath::CbaN),
            "c_i" => Ok(ParamPath::Ci),
            "c_z" => Ok(ParamPath::Cz),
            _ => {
                let (head, exp) = s.split_once(':').ok_or_else(bad)?;
                let exp: i32 = exp.trim().parse().map_err(|_| bad())?;
                match head {
                    "ab" => Ok(ParamPath::Ab(exp)),
                    "ba" => Ok(ParamPath::Ba(exp)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl Serialize for ParamPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ParamPath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn slot<'a>(left: &'a mut [C64], right: &'a mut [C64], exp: i32) -> Option<&'a mut C64> {
    if exp < 0 {
        left.get_mut((-exp - 1) as usize)
    } else {
        right.get_mut(exp as usize)
    }
}

impl ModelSpec {
    /// Current value of a parameter (real part for couplings).
    pub fn param(&self, path: ParamPath) -> Result<f64> {
        match path {
            ParamPath::Ci => Ok(self.onsite.c_i),
            ParamPath::Cz => Ok(self.onsite.c_z),
            _ => {
                let mut copy = self.clone();
                copy.coupling_slot(path).map(|v| v.re)
            }
        }
    }

    /// Copy of the model with one parameter set to a real value.
    pub fn with_param(&self, path: ParamPath, value: f64) -> Result<ModelSpec> {
        let mut copy = self.clone();
        match path {
            ParamPath::Ci => copy.onsite.c_i = value,
            ParamPath::Cz => copy.onsite.c_z = value,
            _ => *copy.coupling_slot(path)? = C64::new(value, 0.0),
        }
        Self::new(copy.variant, copy.hopping, copy.onsite)
    }

    fn coupling_slot(&mut self, path: ParamPath) -> Result<&mut C64> {
        let err = Error::InvalidModel(format!("parameter `{path}` does not apply to {}", self.variant));
        match (&mut self.hopping, path) {
            (Hopping::Unidirectional(u), ParamPath::CabZero) => Ok(&mut u.c_ab0),
            (Hopping::Unidirectional(u), ParamPath::CabNegM) => Ok(&mut u.c_ab_neg_m),
            (Hopping::Unidirectional(u), ParamPath::CbaN) => Ok(&mut u.c_ba_n),
            (Hopping::Bidirectional(b), ParamPath::Ab(e)) => slot(&mut b.ab_left, &mut b.ab_right, e).ok_or(err),
            (Hopping::Bidirectional(b), ParamPath::Ba(e)) => slot(&mut b.ba_left, &mut b.ba_right, e).ok_or(err),
            _ => Err(err),
        }
    }
}

/// Complex number on the wire: `[re, im]`, or a bare real number on input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum WireComplex {
    Pair([f64; 2]),
    Real(f64),
}

impl From<WireComplex> for C64 {
    fn from(w: WireComplex) -> Self {
        match w {
            WireComplex::Pair([re, im]) => C64::new(re, im),
            WireComplex::Real(re) => C64::new(re, 0.0),
        }
    }
}

impl From<C64> for WireComplex {
    fn from(z: C64) -> Self {
        WireComplex::Pair([z.re, z.im])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelDoc {
    variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_ab0: Option<WireComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_ab_neg_m: Option<WireComplex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_ba_n: Option<WireComplex>,
    #[serde(default)]
    c_i: f64,
    #[serde(default)]
    c_z: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ab_left: Option<Vec<WireComplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ab_right: Option<Vec<WireComplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ba_left: Option<Vec<WireComplex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ba_right: Option<Vec<WireComplex>>,
}

impl TryFrom<ModelDoc> for ModelSpec {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        let onsite = OnsiteParams { c_i: doc.c_i, c_z: doc.c_z };
        let hopping = match doc.variant {
            Variant::H1 | Variant::H2 => {
                let missing = |name: &str| Error::InvalidModel(format!("missing field `{name}`"));
                Hopping::Unidirectional(UnidirectionalCouplings {
                    c_ab0: doc.c_ab0.ok_or_else(|| missing("c_ab0"))?.into(),
                    c_ab_neg_m: doc.c_ab_neg_m.ok_or_else(|| missing("c_ab_neg_m"))?.into(),
                    c_ba_n: doc.c_ba_n.ok_or_else(|| missing("c_ba_n"))?.into(),
                    m: doc.m.ok_or_else(|| missing("m"))?,
                    n: doc.n.ok_or_else(|| missing("n"))?,
                })
            }
            Variant::H3 => {
                let conv = |v: Option<Vec<WireComplex>>| -> Vec<C64> {
                    v.unwrap_or_default().into_iter().map(C64::from).collect()
                };
                Hopping::Bidirectional(BidirectionalCouplings {
                    ab_left: conv(doc.ab_left),
                    ab_right: conv(doc.ab_right),
                    ba_left: conv(doc.ba_left),
                    ba_right: conv(doc.ba_right),
                })
            }
        };
        ModelSpec::new(doc.variant, hopping, onsite)
    }
}

impl From<ModelSpec> for ModelDoc {
    fn from(spec: ModelSpec) -> Self {
        let mut doc = ModelDoc {
            variant: spec.variant,
            m: None,
            n: None,
            c_ab0: None,
            c_ab_neg_m: None,
            c_ba_n: None,
            c_i: spec.onsite.c_i,
            c_z: spec.onsite.c_z,
            ab_left: None,
            ab_right: None,
            ba_left: None,
            ba_right: None,
        };
        match spec.hopping {
            Hopping::Unidirectional(u) => {
                doc.m = Some(u.m);
                doc.n = Some(u.n);
                doc.c_ab0 = Some(u.c_ab0.into());
                doc.c_ab_neg_m = Some(u.c_ab_neg_m.into());
                doc.c_ba_n = Some(u.c_ba_n.into());
            }
            Hopping::Bidirectional(b) => {
                let conv = |v: Vec<C64>| Some(v.into_iter().map(WireComplex::from).collect());
                doc.ab_left = conv(b.ab_left);
                doc.ab_right = conv(b.ab_right);
                doc.ba_left = conv(b.ba_left);
                doc.ba_right = conv(b.ba_right);
            }
        }
        doc
    }
}
