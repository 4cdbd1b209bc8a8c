//! Generalized hypergeometric series and their continuation beyond the unit disk.

mod path;

pub use path::Point;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{ComplexEval, Method};
use crate::special::{cpow, dist_to_integer, gamma_prod_ratio, pole_index, ParamVec};

/// Hard cap on series length.
pub const MAX_TERMS: usize = 100_000;
/// Below |z| = NEAR_UNIT the (p = q+1) series is summed directly.
pub const NEAR_UNIT: f64 = 0.9;
/// Minimal distance to an integer for "distinct modulo integers".
pub const DISTINCT_TOL: f64 = 1e-8;
const TERMINATE_TOL: f64 = 1e-12;

/// ₚF_q(numerator; denominator; argument)
#[derive(Debug, Clone, PartialEq)]
pub struct HyperSpec {
    pub numerator: ParamVec,
    pub denominator: ParamVec,
    pub argument: Complex64,
}

impl HyperSpec {
    pub fn new(numerator: ParamVec, denominator: ParamVec, argument: Complex64) -> Self {
        HyperSpec {
            numerator,
            denominator,
            argument,
        }
    }

    pub fn at(&self, z: Complex64) -> Self {
        HyperSpec {
            argument: z,
            ..self.clone()
        }
    }

    fn params(&self) -> ParamSet {
        ParamSet {
            num: self.numerator.0.clone(),
            den: self.denominator.0.clone(),
        }
    }
}

/// Side of the cut `[1, ∞)` (or, for G, of the relevant cut) a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sheet {
    Upper,
    Lower,
}

impl Sheet {
    /// Upper for Im z ≥ 0 (including +0), lower for Im z < 0.
    pub fn of(z: Complex64) -> Sheet {
        if z.im > 0.0 || (z.im == 0.0 && z.im.is_sign_positive()) {
            Sheet::Upper
        } else {
            Sheet::Lower
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Sheet::Upper => 1.0,
            Sheet::Lower => -1.0,
        }
    }

    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Upper => Sheet::Lower,
            Sheet::Lower => Sheet::Upper,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ParamSet {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl ParamSet {
    pub fn leading(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
}

fn terminating_order(num: &[Complex64]) -> Option<u64> {
    num.iter().filter_map(|&a| pole_index(a, TERMINATE_TOL)).min()
}

fn check_denominators(num: &[Complex64], den: &[Complex64]) -> Result<()> {
    let stop = terminating_order(num);
    for &b in den {
        if let Some(m) = pole_index(b, TERMINATE_TOL) {
            match stop {
                Some(n) if n <= m => {}
                _ => return Err(Error::Pole(b)),
            }
        }
    }
    Ok(())
}

/// Terms `(a)_n/(b)_n z^n/n!` until convergence (or termination).
pub(crate) fn term_coefficients(params: &ParamSet, z: Complex64, tol: f64) -> Result<Vec<Complex64>> {
    let (terms, _) = series_terms(&params.num, &params.den, z, tol)?;
    Ok(terms)
}

fn series_terms(num: &[Complex64], den: &[Complex64], z: Complex64, tol: f64) -> Result<(Vec<Complex64>, f64)> {
    check_denominators(num, den)?;
    let stop = terminating_order(num);
    let mut terms = Vec::with_capacity(64);
    let mut t = Complex64::new(1.0, 0.0);
    let mut sum = t;
    terms.push(t);
    let mut small = 0;
    let limit = stop.map(|n| n as usize).unwrap_or(MAX_TERMS);
    let mut n = 0usize;
    while n < limit {
        let mut ratio = z / (n as f64 + 1.0);
        for &a in num {
            ratio *= a + n as f64;
        }
        for &b in den {
            ratio /= b + n as f64;
        }
        t *= ratio;
        sum += t;
        terms.push(t);
        n += 1;
        if stop.is_none() {
            if t.norm() <= tol * sum.norm() {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
    }
    if stop.is_none() && small < 3 {
        let r = terms[terms.len() - 1].norm() / terms[terms.len() - 2].norm().max(1e-300);
        let bound = if r < 1.0 {
            terms[terms.len() - 1].norm() * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        return Err(Error::NonConvergence { partial: sum, bound });
    }
    // tail bound from the last ratio
    let k = terms.len();
    let tail = if stop.is_some() || k < 2 {
        0.0
    } else {
        let r = terms[k - 1].norm() / terms[k - 2].norm().max(1e-300);
        if r < 1.0 {
            terms[k - 1].norm() * r / (1.0 - r)
        } else {
            terms[k - 1].norm()
        }
    };
    Ok((terms, tail))
}

fn sum_with_error(terms: &[Complex64], tail: f64) -> (Complex64, f64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for t in terms {
        s += t;
        mag += t.norm();
    }
    (s, tail + 2.0 * f64::EPSILON * mag)
}

/// Sum of the ₚF_q series.
///
/// For `p = q + 1` and `0.9 ≤ |z| < 1` the value is obtained by Taylor
/// re-centering along the ray from the origin instead of the raw series.
pub fn pfq(spec: &HyperSpec) -> Result<ComplexEval> {
    pfq_point(spec, Point::new(spec.argument))
}

/// As [`pfq`] with the argument given through its complement `1 − z`.
pub fn pfq_point(spec: &HyperSpec, z: Point) -> Result<ComplexEval> {
    let p = spec.numerator.len();
    let q = spec.denominator.len();
    let num = spec.numerator.as_slice();
    let den = spec.denominator.as_slice();
    if !spec.numerator.is_finite() || !spec.denominator.is_finite() {
        return Err(Error::InvalidParams("non-finite hypergeometric parameter".into()));
    }
    if z.z == Complex64::new(0.0, 0.0) {
        check_denominators(num, den)?;
        return Ok(ComplexEval::exact(Complex64::new(1.0, 0.0), Method::Series));
    }
    if terminating_order(num).is_some() {
        let (terms, _) = series_terms(num, den, z.z, 0.0)?;
        let (v, e) = sum_with_error(&terms, 0.0);
        return Ok(ComplexEval::new(v, e, Method::Terminating));
    }
    let r = z.z.norm();
    if p <= q || (p == q + 1 && r < NEAR_UNIT) {
        let (terms, tail) = series_terms(num, den, z.z, 1e-17)?;
        let (v, e) = sum_with_error(&terms, tail);
        return Ok(ComplexEval::new(v, e, Method::Series));
    }
    let on_cut = z.one_minus.im == 0.0 && z.one_minus.re <= 0.0;
    if p == q + 1 && (r < 1.0 || (r < 1.0 + 1e-12 && !on_cut)) {
        check_denominators(num, den)?;
        return path::continue_params(&spec.params(), &[z]);
    }
    Err(Error::NonConvergence {
        partial: Complex64::new(f64::NAN, f64::NAN),
        bound: f64::INFINITY,
    })
}

/// Continue ₚF_{p−1} along straight segments from the origin disk through
/// `waypoints` (the last one being the evaluation point).
pub fn pfq_path(spec: &HyperSpec, waypoints: &[Point]) -> Result<ComplexEval> {
    if spec.numerator.len() != spec.denominator.len() + 1 {
        return Err(Error::InvalidParams("path continuation needs p = q + 1".into()));
    }
    check_denominators(spec.numerator.as_slice(), spec.denominator.as_slice())?;
    if terminating_order(spec.numerator.as_slice()).is_some() {
        let last = waypoints
            .last()
            .ok_or_else(|| Error::InvalidParams("empty path".into()))?;
        return pfq(&spec.at(last.z));
    }
    path::continue_params(&spec.params(), waypoints)
}

/// Waypoints that reach `z` from the origin without crossing `[1, ∞)`,
/// passing on the requested side of the cut.
pub fn default_path(z: Complex64, sheet: Sheet) -> Vec<Point> {
    if z.im != 0.0 || z.re < 1.0 {
        if z.re > 0.5 && z.im.abs() < 0.5 && z.norm() >= 1.0 {
            // go around the branch point first
            let s = sheet.sign();
            return vec![
                Point::new(Complex64::new(0.5, 0.5 * s)),
                Point::new(Complex64::new(z.re.max(1.0), 0.5 * s)),
                Point::new(z),
            ];
        }
        return vec![Point::new(z)];
    }
    let s = sheet.sign();
    vec![
        Point::new(Complex64::new(0.5, 0.5 * s)),
        Point::new(Complex64::new(z.re.max(1.5), 0.5 * s)),
        Point::new(z),
    ]
}

/// ₚF_{p−1}(**a**; **b**; z) for |z| > 1 from the connection formula at infinity,
///
/// `F(z) = Σ_j Γ(b)Γ(a[j]−a_j) / (Γ(a[j])Γ(b−a_j)) · (−z)^{−a_j} · F(a_j, 1−b+a_j; 1−a[j]+a_j; 1/z)`
///
/// with `−z = e^{∓iπ} z` on the upper/lower sheet, combined so that only the
/// principal `z^{−a_j}` appears.
pub fn pfq_continue(spec: &HyperSpec, sheet: Sheet) -> Result<ComplexEval> {
    let a = &spec.numerator;
    let b = &spec.denominator;
    let z = spec.argument;
    let p = a.len();
    if p != b.len() + 1 {
        return Err(Error::InvalidParams("connection formula needs p = q + 1".into()));
    }
    if z.norm() <= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not > 1", z.norm())));
    }
    for i in 0..p {
        for j in (i + 1)..p {
            if dist_to_integer(a[i] - a[j]) < DISTINCT_TOL {
                return Err(Error::CoincidentParameters(format!(
                    "numerator entries {} and {} differ by an integer",
                    a[i], a[j]
                )));
            }
        }
    }
    let inv = z.inv();
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..p {
        let aj = a[j];
        let others = a.without(j);
        let mut gnum = b.clone();
        gnum.0.extend(others.iter().map(|&ak| ak - aj));
        let mut gden = others.clone();
        gden.0.extend(b.iter().map(|&bl| bl - aj));
        let coef = gamma_prod_ratio(&gnum, &gden, Complex64::new(0.0, 0.0))?;
        if coef == Complex64::new(0.0, 0.0) {
            continue;
        }
        // (e^{∓iπ} z)^{−a_j} = z^{−a_j} e^{±iπ a_j}
        let phase = (Complex64::new(0.0, std::f64::consts::PI * sheet.sign()) * aj).exp();
        let power = cpow(z, -aj) * phase;
        let mut inner_num = ParamVec::new(vec![aj]);
        inner_num.0.extend(b.iter().map(|&bl| 1.0 - bl + aj));
        let inner_den: ParamVec = others.iter().map(|&ak| 1.0 - ak + aj).collect();
        let inner = pfq(&HyperSpec::new(inner_num, inner_den, inv))?;
        let factor = coef * power;
        value += factor * inner.value;
        err += factor.norm() * inner.est_error + 4.0 * f64::EPSILON * (factor * inner.value).norm();
    }
    Ok(ComplexEval::new(value, err, Method::Connection))
}

/// Principal-branch value anywhere off `[1, ∞)`; on the cut, `sheet` picks the bank.
///
/// Uses the series inside the disk, the connection formula outside it, and
/// path continuation when the connection formula is unavailable
/// (numerator entries coinciding modulo integers).
pub fn pfq_principal(spec: &HyperSpec, sheet: Option<Sheet>) -> Result<ComplexEval> {
    let z = spec.argument;
    let p = spec.numerator.len();
    let q = spec.denominator.len();
    if z.norm() < 1.0 || p <= q || terminating_order(spec.numerator.as_slice()).is_some() {
        return pfq(spec);
    }
    let on_cut = z.im == 0.0 && z.re >= 1.0;
    let sheet = match (on_cut, sheet) {
        (true, None) => return Err(Error::OnBranchCut(z)),
        (true, Some(s)) => s,
        (false, _) => Sheet::of(z),
    };
    if z.norm() > 1.1 {
        match pfq_continue(spec, sheet) {
            Err(Error::CoincidentParameters(_)) => {}
            other => return other,
        }
    }
    pfq_path(spec, &default_path(z, sheet))
}
