//! Complex log-gamma, digamma, Pochhammer symbols and vector shorthands.
//!
//! `lngamma` uses Stirling's series after upward recurrence to `|w| >= 12`,
//! with downward recurrence for `Re(z) < 0.5`. Observed accuracy against 30-digit
//! references is about 1e-15 relative for `|z| <= 50` off the poles.

use std::f64::consts::PI;
use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Distance to a nonpositive integer below which `lngamma`/`digamma` report a pole.
pub const POLE_TOL: f64 = 1e-14;
/// Distance used to detect poles that should cancel in Γ-ratios.
pub const CANCEL_TOL: f64 = 1e-10;

// B_{2k} / (2k (2k-1)), k = 1..9
const STIRLING: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
];

// B_{2k} / (2k), k = 1..9
const DIGAMMA_ASYM: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
];

const ASYM_RADIUS: f64 = 12.0;

/// An ordered list of complex parameters (the vectors **a**, **b**, **a**+β, **a**_\[k\]).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamVec(pub Vec<Complex64>);

impl ParamVec {
    pub fn new(entries: Vec<Complex64>) -> Self {
        ParamVec(entries)
    }

    pub fn from_real(entries: &[f64]) -> Self {
        ParamVec(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn empty() -> Self {
        ParamVec(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    /// **a** + β
    pub fn shift(&self, beta: Complex64) -> Self {
        ParamVec(self.0.iter().map(|&a| a + beta).collect())
    }

    /// β − **a**
    pub fn reflect(&self, beta: Complex64) -> Self {
        ParamVec(self.0.iter().map(|&a| beta - a).collect())
    }

    /// **a**\_\[k\]: the vector with entry `k` removed.
    pub fn without(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(k);
        ParamVec(v)
    }

    pub fn concat(&self, other: &ParamVec) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        ParamVec(v)
    }

    pub fn push(&mut self, z: Complex64) {
        self.0.push(z);
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        ParamVec(self.0[range].to_vec())
    }

    pub fn sum(&self) -> Complex64 {
        self.0.iter().sum()
    }
}

impl Index<usize> for ParamVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl From<Vec<Complex64>> for ParamVec {
    fn from(v: Vec<Complex64>) -> Self {
        ParamVec(v)
    }
}

impl FromIterator<Complex64> for ParamVec {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        ParamVec(iter.into_iter().collect())
    }
}

/// If `z` is within `tol` of a nonpositive integer, return that integer's magnitude.
pub fn pole_index(z: Complex64, tol: f64) -> Option<u64> {
    if z.re > tol {
        return None;
    }
    let n = z.re.round();
    if (z - Complex64::new(n, 0.0)).norm() <= tol {
        Some((-n) as u64)
    } else {
        None
    }
}

/// Distance from `z` to the nearest integer (measured in the complex plane).
pub fn dist_to_integer(z: Complex64) -> f64 {
    (z - Complex64::new(z.re.round(), 0.0)).norm()
}

fn stirling_ln_gamma(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series
}

/// Principal branch of log Γ(z).
pub fn lngamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParams(format!("non-finite argument {z}")));
    }
    if pole_index(z, POLE_TOL).is_some() {
        return Err(Error::Pole(z));
    }
    Ok(lngamma_unchecked(z))
}

fn lngamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // downward recurrence keeps the principal branch: the sum of principal
        // logs is analytic off (−∞, 0] and agrees with log Γ on the positive axis
        let n = (0.5 - z.re).ceil();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n as usize {
            acc += (z + k as f64).ln();
        }
        return lngamma_unchecked(z + n) - acc;
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < ASYM_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling_ln_gamma(w) - shift
}

/// sin(πz) with exact zeros at integers of the real axis.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = z.re - n;
    let sign = if (n as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let x = PI * r;
    let y = PI * z.im;
    Complex64::new(x.sin() * y.cosh(), x.cos() * y.sinh()) * sign
}

/// cos(πz)
pub fn cos_pi(z: Complex64) -> Complex64 {
    sin_pi(z + 0.5)
}

/// Γ(z) for complex z.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(lngamma(z)?.exp())
}

/// 1/Γ(z), zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    if pole_index(z, POLE_TOL).is_some() {
        Complex64::new(0.0, 0.0)
    } else {
        (-lngamma_unchecked(z)).exp()
    }
}

/// ψ(z) = Γ′(z)/Γ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParams(format!("non-finite argument {z}")));
    }
    if pole_index(z, POLE_TOL).is_some() {
        return Err(Error::Pole(z));
    }
    Ok(digamma_unchecked(z))
}

fn digamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // ψ(z) = ψ(1−z) − π cot(πz)
        let cot = cos_pi(z) / sin_pi(z);
        return digamma_unchecked(1.0 - z) - cot * PI;
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < ASYM_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in DIGAMMA_ASYM {
        series += p * c;
        p *= inv2;
    }
    w.ln() - inv * 0.5 - series - shift
}

/// Pochhammer symbol (a)_k = a (a+1) ⋯ (a+k−1) by direct product.
pub fn pochhammer(a: Complex64, k: usize) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, i| acc * (a + i as f64))
}

fn ln_factorial(n: u64) -> f64 {
    lngamma_unchecked(Complex64::new(n as f64 + 1.0, 0.0)).re
}

/// Γ(**num** + shift) / Γ(**den** + shift).
///
/// Numerator poles must be matched by denominator poles; each matched pair
/// contributes the ratio of residues `(-1)^(N-M) M!/N!`. Unmatched
/// denominator poles make the ratio vanish.
pub fn gamma_prod_ratio(num: &ParamVec, den: &ParamVec, shift: Complex64) -> Result<Complex64> {
    let mut log_sum = Complex64::new(0.0, 0.0);
    let mut num_poles = Vec::new();
    for &a in num.iter() {
        let x = a + shift;
        match pole_index(x, CANCEL_TOL) {
            Some(n) => num_poles.push((n, x)),
            None => log_sum += lngamma(x)?,
        }
    }
    let mut den_poles = Vec::new();
    for &b in den.iter() {
        let x = b + shift;
        match pole_index(x, CANCEL_TOL) {
            Some(n) => den_poles.push(n),
            None => log_sum -= lngamma(x)?,
        }
    }
    if num_poles.len() > den_poles.len() {
        return Err(Error::Pole(num_poles[den_poles.len()].1));
    }
    if den_poles.len() > num_poles.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut sign = 1.0;
    for (&(n, _), &m) in num_poles.iter().zip(den_poles.iter()) {
        log_sum += ln_factorial(m) - ln_factorial(n);
        if (n + m) % 2 == 1 {
            sign = -sign;
        }
    }
    Ok(log_sum.exp() * sign)
}

/// Π sin(v_i); the arguments are used as given (no factor π is applied).
pub fn sin_prod(v: &ParamVec) -> Complex64 {
    v.iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc * z.sin())
}

/// Π sin(π v_i)
pub fn sin_pi_prod(v: &ParamVec) -> Complex64 {
    v.iter().fold(Complex64::new(1.0, 0.0), |acc, &z| acc * sin_pi(z))
}

/// Principal power z^s, with 0^s = 0 for Re(s) > 0.
pub fn cpow(z: Complex64, s: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return if s.re > 0.0 {
            Complex64::new(0.0, 0.0)
        } else if s == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    (s * z.ln()).exp()
}
