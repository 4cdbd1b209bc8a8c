//! Characteristic polynomials for hypergeometric functions with integral
//! parameter differences, the two Euler-type transformations they feed, and
//! the resulting transformations of the Meijer–Nørlund function `G^{p,0}_{p,p}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::IdentityReport;
use crate::gfun::{eval_internal, GParams};
use crate::hyper::{pfq_continue, pfq_principal, HyperSpec, Sheet};
use crate::oracle::{residue_series_g, Side};
use crate::special::{cos_pi, cpow, gamma_prod_ratio, pochhammer, sin_pi, ParamVec};

const DEGENERACY_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which transformation (and characteristic polynomial) is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    First,
    Second,
}

/// Parameters `a, b, c, d`, the vector `f` and the integer shifts `m_vec`
/// of `F(a, b, f + m; c, f; x)` and of the related `G^{p,0}_{p,p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IpdSpec {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub f: ParamVec,
    pub m_vec: Vec<u32>,
}

impl IpdSpec {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64, f: ParamVec, m_vec: Vec<u32>) -> Result<Self> {
        if f.len() != m_vec.len() {
            return Err(Error::InvalidParams(format!(
                "f has {} entries but m has {}",
                f.len(),
                m_vec.len()
            )));
        }
        if m_vec.contains(&0) {
            return Err(Error::InvalidParams("entries of m must be positive".into()));
        }
        if !f.is_finite() || ![a, b, c, d].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        Ok(IpdSpec { a, b, c, d, f, m_vec })
    }

    pub fn from_real(a: f64, b: f64, cc: f64, d: f64, f: &[f64], m_vec: &[u32]) -> Result<Self> {
        IpdSpec::new(c(a), c(b), c(cc), c(d), ParamVec::from_real(f), m_vec.to_vec())
    }

    pub fn m(&self) -> usize {
        self.m_vec.iter().map(|&k| k as usize).sum()
    }

    /// `f + m`
    pub fn f_shifted(&self) -> ParamVec {
        self.f.iter().zip(&self.m_vec).map(|(&f, &k)| f + k as f64).collect()
    }

    /// `α = c + d − a − b − m − 1`
    pub fn alpha(&self) -> Complex64 {
        self.c + self.d - self.a - self.b - self.m() as f64 - 1.0
    }

    /// `β = d − a − 1`
    pub fn beta(&self) -> Complex64 {
        self.d - self.a - 1.0
    }
}

/// A characteristic polynomial with its roots.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicPolynomial {
    /// Coefficients in ascending powers of `t`.
    pub coefficients: Vec<Complex64>,
    pub roots: Vec<Complex64>,
    pub kind: Kind,
    /// `max_root |p′(root)|⁻¹ · max_k |coefficient_k|`
    pub condition_estimate: f64,
}

impl CharacteristicPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        horner(&self.coefficients, t)
    }
}

fn horner(coef: &[Complex64], t: Complex64) -> Complex64 {
    coef.iter().rev().fold(c(0.0), |acc, &x| acc * t + x)
}

fn derivative(coef: &[Complex64]) -> Vec<Complex64> {
    coef.iter().enumerate().skip(1).map(|(k, &x)| x * k as f64).collect()
}

fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![c(0.0); p.len() + q.len() - 1];
    for (i, &x) in p.iter().enumerate() {
        for (j, &y) in q.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(t)_k` in the monomial basis.
fn rising_in_t(k: usize) -> Vec<Complex64> {
    (0..k).fold(vec![c(1.0)], |acc, i| poly_mul(&acc, &[c(i as f64), c(1.0)]))
}

/// `(base − t)_k` in the monomial basis.
fn rising_of_reflected(base: Complex64, k: usize) -> Vec<Complex64> {
    (0..k).fold(vec![c(1.0)], |acc, i| poly_mul(&acc, &[base + i as f64, c(-1.0)]))
}

/// Terminating `F(−k, num; den; 1)` summed term by term.
fn terminating_at_one(k: usize, num: &[Complex64], den: &[Complex64]) -> Result<Complex64> {
    let mut term = c(1.0);
    let mut sum = term;
    for j in 0..k {
        let mut ratio = c(j as f64 - k as f64) / (j as f64 + 1.0);
        for &a in num {
            ratio *= a + j as f64;
        }
        for &b in den {
            let d = b + j as f64;
            if d.norm() < DEGENERACY_TOL {
                return Err(Error::Degenerate(format!("denominator parameter {b} meets zero")));
            }
            ratio /= d;
        }
        term *= ratio;
        sum += term;
    }
    Ok(sum)
}

fn check_pochhammer(x: Complex64, k: usize, what: &str) -> Result<Complex64> {
    let v = pochhammer(x, k);
    for i in 0..k {
        if (x + i as f64).norm() < DEGENERACY_TOL {
            return Err(Error::Degenerate(format!("({what})_{k} vanishes")));
        }
    }
    Ok(v)
}

/// Roots of a polynomial from the eigenvalues of its companion matrix, each
/// refined by one Newton step.
pub fn polynomial_roots(coef: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = coef.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coef[deg];
    if lead.norm() <= DEGENERACY_TOL * coef.iter().map(|x| x.norm()).fold(0.0, f64::max) {
        return Err(Error::Degenerate("leading coefficient vanishes".into()));
    }
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = c(1.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coef[i] / lead;
    }
    let eig = comp.schur().eigenvalues().ok_or_else(|| Error::NonConvergence {
        partial: c(f64::NAN),
        bound: f64::INFINITY,
    })?;
    let dcoef = derivative(coef);
    Ok(eig
        .iter()
        .map(|&r| {
            let dp = horner(&dcoef, r);
            if dp.norm() > 0.0 {
                r - horner(coef, r) / dp
            } else {
                r
            }
        })
        .collect())
}

fn finish(coefficients: Vec<Complex64>, kind: Kind) -> Result<CharacteristicPolynomial> {
    let roots = polynomial_roots(&coefficients)?;
    let scale = coefficients.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let dcoef = derivative(&coefficients);
    let condition_estimate = roots
        .iter()
        .map(|&r| scale / horner(&dcoef, r).norm())
        .fold(0.0, f64::max);
    Ok(CharacteristicPolynomial {
        coefficients,
        roots,
        kind,
        condition_estimate,
    })
}

/// First characteristic polynomial
/// `Q_m(t) = (c−b−m)_m⁻¹ Σ_k (b)_k (t)_k (c−b−m−t)_{m−k} (−1)^k/k! · F(−k, f+m; f; 1)`.
pub fn qm_poly(b: Complex64, cc: Complex64, f: &ParamVec, m_vec: &[u32]) -> Result<CharacteristicPolynomial> {
    let m: usize = m_vec.iter().map(|&k| k as usize).sum();
    let base = cc - b - m as f64;
    let norm = check_pochhammer(base, m, "c − b − m")?;
    let fm: Vec<Complex64> = f.iter().zip(m_vec).map(|(&x, &k)| x + k as f64).collect();
    let mut coef = vec![c(0.0); m + 1];
    let mut fact = 1.0;
    for k in 0..=m {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let scalar = pochhammer(b, k) * sign / fact * terminating_at_one(k, &fm, f.as_slice())?;
        let poly = poly_mul(&rising_in_t(k), &rising_of_reflected(base, m - k));
        for (i, &x) in poly.iter().enumerate() {
            coef[i] += scalar * x / norm;
        }
    }
    finish(coef, Kind::First)
}

/// Second characteristic polynomial
/// `Q̂_m(t) = Σ_k (−1)^k (a)_k (−b−m)_k (t)_k (c−a−m−t)_{m−k} / ((c−a−m)_m (c−b−m)_k k!)
///           · F(−k, b, f+m; b+m−k+1, f; 1)`.
pub fn qhat_poly(
    a: Complex64,
    b: Complex64,
    cc: Complex64,
    f: &ParamVec,
    m_vec: &[u32],
) -> Result<CharacteristicPolynomial> {
    let m: usize = m_vec.iter().map(|&k| k as usize).sum();
    let base = cc - a - m as f64;
    let norm = check_pochhammer(base, m, "c − a − m")?;
    let cbm = cc - b - m as f64;
    let fm: Vec<Complex64> = f.iter().zip(m_vec).map(|(&x, &k)| x + k as f64).collect();
    let mut coef = vec![c(0.0); m + 1];
    let mut fact = 1.0;
    for k in 0..=m {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut num = vec![b];
        num.extend(fm.iter().copied());
        let mut den = vec![b + (m - k) as f64 + 1.0];
        den.extend(f.iter().copied());
        let inner = terminating_at_one(k, &num, &den)?;
        let scalar = pochhammer(a, k) * pochhammer(-b - m as f64, k) * sign
            / (check_pochhammer(cbm, k, "c − b − m")? * fact)
            * inner;
        let poly = poly_mul(&rising_in_t(k), &rising_of_reflected(base, m - k));
        for (i, &x) in poly.iter().enumerate() {
            coef[i] += scalar * x / norm;
        }
    }
    finish(coef, Kind::Second)
}

/// Closed-form root of `Q_1`: `f(c − b − 1)/(f − b)`.
pub fn q1_root(b: Complex64, cc: Complex64, f: Complex64) -> Complex64 {
    f * (cc - b - 1.0) / (f - b)
}

/// Closed-form root of `Q̂_1`: `(c−a−1)(c−b−1)/(c−b−1 − a(f−b)/f)`.
pub fn qhat1_root(a: Complex64, b: Complex64, cc: Complex64, f: Complex64) -> Complex64 {
    (cc - a - 1.0) * (cc - b - 1.0) / (cc - b - 1.0 - a * (f - b) / f)
}

fn check_nondegenerate(spec: &IpdSpec, kind: Kind) -> Result<()> {
    let m = spec.m();
    check_pochhammer(spec.c - spec.b - m as f64, m, "c − b − m")?;
    if kind == Kind::Second {
        check_pochhammer(spec.c - spec.a - m as f64, m, "c − a − m")?;
        check_pochhammer(1.0 + spec.a + spec.b - spec.c, m, "1 + a + b − c")?;
    } else if spec.f.iter().any(|&f| (f - spec.b).norm() < DEGENERACY_TOL) {
        return Err(Error::Degenerate("b coincides with an entry of f".into()));
    }
    Ok(())
}

/// Both sides of the Euler-type transformations
///
/// * first: `F(a, b, f+m; c, f; x) = (1−x)^{−a} F(a, c−b−m, ζ+1; c, ζ; x/(x−1))`
/// * second: `F(a, b, f+m; c, f; x) = (1−x)^{c−a−b−m} F(c−a−m, c−b−m, η+1; c, η; x)`
///
/// with `ζ`, `η` the roots of `Q_m(b, c, f)` and `Q̂_m(a, b, c, f)`.
pub fn transform_check(spec: &IpdSpec, x: Complex64, kind: Kind, tol: f64) -> Result<IdentityReport> {
    check_nondegenerate(spec, kind)?;
    let (roots, _) = transform_roots(spec, kind)?;
    transform_check_with_roots(spec, x, kind, &roots, tol)
}

fn transform_roots(spec: &IpdSpec, kind: Kind) -> Result<(Vec<Complex64>, f64)> {
    let poly = match kind {
        Kind::First => qm_poly(spec.b, spec.c, &spec.f, &spec.m_vec)?,
        Kind::Second => qhat_poly(spec.a, spec.b, spec.c, &spec.f, &spec.m_vec)?,
    };
    Ok((poly.roots, poly.condition_estimate))
}

/// [`transform_check`] with externally supplied roots (any order).
pub fn transform_check_with_roots(
    spec: &IpdSpec,
    x: Complex64,
    kind: Kind,
    roots: &[Complex64],
    tol: f64,
) -> Result<IdentityReport> {
    if x.im == 0.0 && x.re >= 1.0 {
        return Err(Error::OnBranchCut(x));
    }
    let m = spec.m() as f64;
    let (a, b, cc) = (spec.a, spec.b, spec.c);
    let mut lnum = ParamVec::new(vec![a, b]);
    lnum.0.extend(spec.f_shifted().iter().copied());
    let mut lden = ParamVec::new(vec![cc]);
    lden.0.extend(spec.f.iter().copied());
    let lhs = pfq_principal(&HyperSpec::new(lnum, lden, x), None)?.value;

    let one = c(1.0);
    let (pre, first, arg) = match kind {
        Kind::First => (cpow(one - x, -a), a, x / (x - 1.0)),
        Kind::Second => (cpow(one - x, cc - a - b - m), cc - a - m, x),
    };
    let mut rnum = ParamVec::new(vec![first, cc - b - m]);
    rnum.0.extend(roots.iter().map(|&r| r + 1.0));
    let mut rden = ParamVec::new(vec![cc]);
    rden.0.extend(roots.iter().copied());
    let rhs = pre * pfq_principal(&HyperSpec::new(rnum, rden, arg), None)?.value;
    let name = match kind {
        Kind::First => "euler_type_first",
        Kind::Second => "euler_type_second",
    };
    Ok(IdentityReport::new(name, lhs, rhs, tol))
}

/// Row parameters of `G^{p,0}_{p,p}(z | c, d, f; a, b, f+m)`.
pub fn norlund_params(spec: &IpdSpec) -> Result<GParams> {
    let mut top = ParamVec::new(vec![spec.c, spec.d]);
    top.0.extend(spec.f.iter().copied());
    let mut bottom = ParamVec::new(vec![spec.a, spec.b]);
    bottom.0.extend(spec.f_shifted().iter().copied());
    let p = top.len();
    GParams::new(p, 0, top, bottom)
}

/// Both sides of the Meijer–Nørlund transformation of the given kind at `z ∈ (0, 1)`.
///
/// The left side is also computed by the residue oracle; its deviation is
/// attached to the report as `lhs_oracle`.
pub fn g_ipd_transform(spec: &IpdSpec, z: Complex64, kind: Kind, tol: f64) -> Result<IdentityReport> {
    let m = spec.m();
    let mf = m as f64;
    let (a, b, cc, d) = (spec.a, spec.b, spec.c, spec.d);
    let shift = |x: Complex64| x - d + 1.0;
    let fd: ParamVec = spec.f.iter().map(|&f| shift(f)).collect();
    let lhs_params = norlund_params(spec)?;
    let lhs = eval_internal(&lhs_params, z)?.value;
    let oracle = residue_series_g(&lhs_params, z, Side::Left)?.value;

    // Γ(A − d + 1) / Γ(B − d + 1) with A = (a, b, f+m), B = (c, f)
    let big_a: ParamVec = lhs_params.bottom().iter().map(|&x| shift(x)).collect();
    let mut big_b = ParamVec::new(vec![shift(cc)]);
    big_b.0.extend(fd.iter().copied());

    let (roots, top_rest, bottom_hat, expo, arg, lead_sign) = match kind {
        Kind::First => {
            let poly = qhat_poly(shift(a), shift(b), shift(cc), &fd, &spec.m_vec)?;
            let first = (cc - a - mf, cc - b - mf);
            (poly.roots, cc - d + 1.0, first, spec.alpha(), z, 1.0)
        }
        Kind::Second => {
            let poly = qm_poly(shift(b), shift(cc), &fd, &spec.m_vec)?;
            let first = (a - d + 1.0, cc - b - mf);
            (poly.roots, cc - d + 1.0, first, spec.beta(), c(1.0) - z, -1.0)
        }
    };
    let mut hat_a = ParamVec::new(vec![bottom_hat.0, bottom_hat.1]);
    hat_a.0.extend(roots.iter().map(|&r| r + 1.0));
    let mut hat_b = ParamVec::new(vec![top_rest]);
    hat_b.0.extend(roots.iter().copied());

    let mut num = big_a.clone();
    num.0.extend(hat_b.iter().copied());
    let mut den = hat_a.clone();
    den.0.extend(big_b.iter().copied());
    let ratio = gamma_prod_ratio(&num, &den, c(0.0))?;

    let mut top0 = ParamVec::new(vec![c(1.0)]);
    top0.0.extend(hat_b.iter().copied());
    let g0 = GParams::new(m + 2, 0, top0, hat_a.clone())?;
    let mut top1 = ParamVec::new(vec![c(1.0), c(1.5)]);
    top1.0.extend(hat_b.iter().copied());
    let mut bottom1 = hat_a.clone();
    bottom1.push(c(1.5));
    let g1 = GParams::new(m + 2, 1, top1, bottom1)?;

    let v0 = eval_internal(&g0, arg)?.value;
    let v1 = eval_internal(&g1, arg)?.value;
    let one = c(1.0);
    let pre = cpow(z, d - expo - 1.0) * cpow(one - z, expo) * ratio;
    let rhs = pre * (lead_sign * cos_pi(expo) * v0 + sin_pi(expo) * v1);
    let name = match kind {
        Kind::First => "norlund_ipd_first",
        Kind::Second => "norlund_ipd_second",
    };
    let scale = lhs.norm().max(1.0);
    Ok(IdentityReport::new(name, lhs, rhs, tol).with_extra("lhs_oracle", (lhs - oracle).norm() / scale, tol))
}

/// Jump of the continued `F(A − d + 1; B − d + 1; ·)` across `[1, ∞)` at `1/x`
/// against `2πi x^{1−d} Γ(B − d + 1)/Γ(A − d + 1) · G^{p,0}_{p,p}(x | d, B; A)`.
pub fn norlund_jump_check(
    top_rest: &ParamVec,
    bottom: &ParamVec,
    d: Complex64,
    x: f64,
    tol: f64,
) -> Result<IdentityReport> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is not in (0, 1)")));
    }
    let mut top = ParamVec::new(vec![d]);
    top.0.extend(top_rest.iter().copied());
    let p = top.len();
    let g = GParams::new(p, 0, top, bottom.clone())?;
    let gv = eval_internal(&g, c(x))?.value;
    let num = bottom.shift(1.0 - d);
    let den = top_rest.shift(1.0 - d);
    let ratio = gamma_prod_ratio(&den, &num, c(0.0))?;
    let lhs = Complex64::new(0.0, 2.0 * PI) * cpow(c(x), 1.0 - d) * ratio * gv;
    let spec = HyperSpec::new(num, den, c(1.0 / x));
    let up = pfq_continue(&spec, Sheet::Upper)?.value;
    let lo = pfq_continue(&spec, Sheet::Lower)?.value;
    Ok(IdentityReport::new("norlund_jump", lhs, up - lo, tol))
}
