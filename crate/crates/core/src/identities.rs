//! Integral identities for balanced G functions on (0, 1) and the digamma
//! series for the convolution coefficients `a_m`.
//!
//! Every check returns an [`IdentityReport`] with a closed-form side and a
//! side obtained by quadrature or series summation.

use num_complex::Complex64;

use crate::accel::levin_u;
use crate::error::{Error, Result};
use crate::eval::{ComplexEval, IdentityReport, Method};
use crate::gfun::{eval_internal_at, GParams};
use crate::hyper::Point;
use crate::quad::{quad_unit_interval, QuadratureSpec};
use crate::special::{digamma, dist_to_integer, gamma_prod_ratio, rgamma, sin_pi, ParamVec};

/// Requested accuracy of the quadratures behind the integral checks.
pub const QUAD_TOL: f64 = 1e-11;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Parameters shared by the integral identities and the `a_m` summation.
///
/// `a` has length `p` and `b` length `q`. Not every field matters for every
/// check: `mu`, `nu` enter the moment identities, `alpha`, `beta`, `m` the
/// difference identity, and `lambda`, `m` the coefficients `a_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumIntegralSpec {
    pub a: ParamVec,
    pub b: ParamVec,
    pub mu: Complex64,
    pub nu: Complex64,
    pub alpha: f64,
    pub beta: f64,
    pub m: usize,
    pub lambda: Complex64,
}

impl SumIntegralSpec {
    pub fn new(a: ParamVec, b: ParamVec) -> Self {
        SumIntegralSpec {
            a,
            b,
            mu: c(0.0),
            nu: c(0.0),
            alpha: 1.0,
            beta: 1.0,
            m: 0,
            lambda: c(0.0),
        }
    }

    pub fn from_real(a: &[f64], b: &[f64]) -> Self {
        SumIntegralSpec::new(ParamVec::from_real(a), ParamVec::from_real(b))
    }

    pub fn with_mu_nu(mut self, mu: f64, nu: f64) -> Self {
        self.mu = c(mu);
        self.nu = c(nu);
        self
    }

    pub fn with_alpha_beta(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = c(lambda);
        self
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    fn even(&self) -> bool {
        (self.p() - self.q()).is_multiple_of(2)
    }

    fn min_re_a(&self) -> f64 {
        self.a.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
    }

    fn check_shape(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(Error::InvalidParams("a must not be empty".into()));
        }
        if self.p() < self.q() {
            return Err(Error::Precondition(format!("p = {} < q = {}", self.p(), self.q())));
        }
        if !self.a.is_finite() || !self.b.is_finite() || !(self.mu + self.nu + self.lambda).is_finite() {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        Ok(())
    }

    /// `(p − q)(1 − μ − ν) + 2(Σb − Σa)`, the exponent shift of the integrand's G at x = 1.
    fn psi_moment(&self) -> Complex64 {
        (self.p() - self.q()) as f64 * (1.0 - self.mu - self.nu) + 2.0 * (self.b.sum() - self.a.sum())
    }

    /// Integrability conditions of the moment integral.
    pub fn check_theorem51(&self) -> Result<()> {
        self.check_shape()?;
        let left = self.min_re_a() + self.mu.re.min(self.nu.re);
        if left <= 0.0 {
            return Err(Error::Precondition(format!(
                "min Re(a + μ), Re(a + ν) = {left} must be positive"
            )));
        }
        // For odd p − q the G factor is analytic at x = 1 and no condition applies.
        if self.even() && self.psi_moment().re <= 0.0 {
            return Err(Error::Precondition(format!(
                "Re(Σb − Σa + (p−q)(1−μ−ν)/2) = {} must be positive",
                self.psi_moment().re / 2.0
            )));
        }
        Ok(())
    }

    /// Convergence condition of the digamma series, on real parts.
    pub fn check_digamma_series(&self) -> Result<()> {
        self.check_shape()?;
        let lhs = (self.b.sum() - self.a.sum()).re;
        let rhs = ((self.p() - self.q()) as f64 * (self.lambda.re + self.m as f64 - 1.0) + 1.0) / 2.0;
        if lhs <= rhs {
            return Err(Error::Precondition(format!("Σb − Σa = {lhs} must exceed {rhs}")));
        }
        for i in 0..self.p() {
            for j in 0..i {
                if dist_to_integer(self.a[i] - self.a[j]) < 1e-8 {
                    return Err(Error::CoincidentParameters(format!(
                        "a[{i}] − a[{j}] = {} is an integer",
                        self.a[i] - self.a[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `ln x`, accurate also when only `1 − x` is known precisely.
fn ln_with_complement(x: f64, t: f64) -> f64 {
    if t < 0.5 {
        (-t).ln_1p()
    } else {
        x.ln()
    }
}

/// Left cut-off for an integrand `x^{−w}·G(x)` with `G ~ x^{g}`: both factors
/// must stay well inside the double range at the cut-off.
fn quad_spec(sigma0: f64, sigma1: f64, weight_exp: f64, g_exp: f64) -> QuadratureSpec {
    let mut q = QuadratureSpec::unit(sigma0, sigma1, QUAD_TOL);
    let worst = weight_exp.abs().max(g_exp.abs()).max(1.0);
    q.delta0 = q.delta0.max((-600.0 / worst).exp());
    q
}

fn cpow_real(x: f64, ln_x: f64, s: Complex64) -> Complex64 {
    debug_assert!(x > 0.0);
    (s * ln_x).exp()
}

/// The moment integral
/// `∫₀¹ (x^{−μ−1} + x^{−ν−1}) G^{p,p}_{r,r}(x | 1−a, b+μ+ν; a+μ+ν, 1−b) dx`, r = p + q.
pub fn theorem51_integral(spec: &SumIntegralSpec) -> Result<ComplexEval> {
    spec.check_theorem51()?;
    let p = spec.p();
    let sh = spec.mu + spec.nu;
    let top = spec.a.reflect(c(1.0)).concat(&spec.b.shift(sh));
    let bottom = spec.a.shift(sh).concat(&spec.b.reflect(c(1.0)));
    let g = GParams::new(p, p, top, bottom)?;
    let sigma0 = spec.min_re_a() + spec.mu.re.min(spec.nu.re) - 1.0;
    let sigma1 = if spec.even() {
        (spec.psi_moment().re - 1.0).min(0.0)
    } else {
        0.0
    };
    let (mu, nu) = (spec.mu, spec.nu);
    quad_unit_interval(
        |x, t| {
            let lx = ln_with_complement(x, t);
            let w = cpow_real(x, lx, -mu - 1.0) + cpow_real(x, lx, -nu - 1.0);
            Ok(w * eval_internal_at(
                &g,
                Point {
                    z: c(x),
                    one_minus: c(t),
                },
            )?
            .value)
        },
        &quad_spec(sigma0, sigma1, mu.re.max(nu.re) + 1.0, spec.min_re_a() + (mu + nu).re),
    )
}

/// `Γ(a+μ)Γ(a+ν)/(Γ(b+μ)Γ(b+ν))` against the moment integral.
pub fn verify_theorem51(spec: &SumIntegralSpec, tol: f64) -> Result<IdentityReport> {
    spec.check_theorem51()?;
    let lhs = gamma_prod_ratio(
        &spec.a.shift(spec.mu).concat(&spec.a.shift(spec.nu)),
        &spec.b.shift(spec.mu).concat(&spec.b.shift(spec.nu)),
        c(0.0),
    )?;
    let rhs = theorem51_integral(spec)?;
    Ok(IdentityReport::new("thm51", lhs, rhs.value, tol))
}

/// `∫₀¹ x^{s−1} G^{p,0}_{p,p}(x | b; a) dx` by quadrature (p = q).
pub fn norlund_moment(a: &ParamVec, b: &ParamVec, s: Complex64) -> Result<ComplexEval> {
    let p = a.len();
    let g = GParams::new(p, 0, b.clone(), a.clone())?;
    let min_a = a.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let excess = (b.sum() - a.sum()).re;
    if min_a + s.re <= 0.0 || excess <= 0.0 {
        return Err(Error::Precondition(format!(
            "moment diverges: min Re(a) + Re(s) = {}, Σ Re(b − a) = {excess}",
            min_a + s.re
        )));
    }
    quad_unit_interval(
        |x, t| {
            let lx = ln_with_complement(x, t);
            Ok(cpow_real(x, lx, s - 1.0)
                * eval_internal_at(
                    &g,
                    Point {
                        z: c(x),
                        one_minus: c(t),
                    },
                )?
                .value)
        },
        &quad_spec(min_a + s.re - 1.0, excess - 1.0, 1.0 - s.re, min_a),
    )
}

/// Product of two Meijer–Nørlund moments against the moment integral (p = q).
///
/// The closed Γ form of the product is attached as an extra residual.
pub fn verify_cor52(spec: &SumIntegralSpec, tol: f64) -> Result<IdentityReport> {
    spec.check_shape()?;
    if spec.p() != spec.q() {
        return Err(Error::Precondition(format!(
            "p = {} must equal q = {}",
            spec.p(),
            spec.q()
        )));
    }
    spec.check_theorem51()?;
    let m1 = norlund_moment(&spec.a, &spec.b, spec.mu)?;
    let m2 = if spec.mu == spec.nu {
        m1
    } else {
        norlund_moment(&spec.a, &spec.b, spec.nu)?
    };
    let lhs = m1.value * m2.value;
    let rhs = theorem51_integral(spec)?;
    let closed = gamma_prod_ratio(
        &spec.a.shift(spec.mu).concat(&spec.a.shift(spec.nu)),
        &spec.b.shift(spec.mu).concat(&spec.b.shift(spec.nu)),
        c(0.0),
    )?;
    let closed_res = (closed - lhs).norm() / lhs.norm().max(1.0);
    Ok(IdentityReport::new("cor52", lhs, rhs.value, tol).with_extra("gamma_closed_form", closed_res, tol))
}

/// The finite Γ sum of the difference identity.
pub fn cor53_sum(spec: &SumIntegralSpec) -> Result<Complex64> {
    let (al, be) = (c(spec.alpha), c(spec.beta));
    let m = spec.m as f64;
    let mut total = c(0.0);
    for k in 0..=spec.m {
        let k = k as f64;
        let first = gamma_prod_ratio(
            &spec.a.shift(c(k)).concat(&spec.a.shift(al + be + m - k)),
            &spec.b.shift(c(k)).concat(&spec.b.shift(al + be + m - k)),
            c(0.0),
        )?;
        let second = gamma_prod_ratio(
            &spec.a.shift(al + k).concat(&spec.a.shift(be + m - k)),
            &spec.b.shift(al + k).concat(&spec.b.shift(be + m - k)),
            c(0.0),
        )?;
        total += first - second;
    }
    Ok(total)
}

/// The Γ sum with `α + β + m` split as an integral against
/// `G^{p,p}_{r,r}(x | 1−a−m, b+α+β; a+α+β, 1−b−m)`.
pub fn verify_cor53(spec: &SumIntegralSpec, tol: f64) -> Result<IdentityReport> {
    spec.check_shape()?;
    if !(spec.alpha > 0.0 && spec.beta > 0.0) {
        return Err(Error::Precondition("α and β must be positive".into()));
    }
    let p = spec.p();
    let m = spec.m;
    let sh = c(spec.alpha + spec.beta);
    let top = spec.a.reflect(c(1.0 - m as f64)).concat(&spec.b.shift(sh));
    let bottom = spec.a.shift(sh).concat(&spec.b.reflect(c(1.0 - m as f64)));
    let psi = top.sum() - bottom.sum();
    let sigma0 = spec.min_re_a() - 1.0;
    let sigma1 = 2.0 + if spec.even() { (psi.re - 1.0).min(0.0) } else { 0.0 };
    if sigma0 <= -1.0 || sigma1 <= -1.0 {
        return Err(Error::Precondition(format!(
            "integral diverges: endpoint exponents {sigma0} and {sigma1}"
        )));
    }
    let g = GParams::new(p, p, top, bottom)?;
    let (al, be) = (spec.alpha, spec.beta);
    let lhs = cor53_sum(spec)?;
    let rhs = quad_unit_interval(
        |x, t| {
            let lx = ln_with_complement(x, t);
            let geometric: f64 = (0..=m).map(|j| x.powi(j as i32)).sum();
            let weight = geometric * (-(al * lx).exp_m1()) * (-(be * lx).exp_m1()) * (-(al + be + 1.0) * lx).exp();
            Ok(eval_internal_at(
                &g,
                Point {
                    z: c(x),
                    one_minus: c(t),
                },
            )?
            .value
                * weight)
        },
        &quad_spec(sigma0, sigma1, al + be + 1.0, spec.min_re_a() + al + be),
    )?;
    Ok(IdentityReport::absolute("cor53", lhs, rhs.value, tol))
}

/// `a_m = Σ_{k=0}^m Γ(a+k)Γ(a+λ+m−k)/(Γ(b+k)Γ(b+λ+m−k))`.
pub fn a_m_direct(spec: &SumIntegralSpec) -> Result<Complex64> {
    let m = spec.m as f64;
    let mut total = c(0.0);
    for k in 0..=spec.m {
        let k = k as f64;
        total += gamma_prod_ratio(
            &spec.a.shift(c(k)).concat(&spec.a.shift(spec.lambda + m - k)),
            &spec.b.shift(c(k)).concat(&spec.b.shift(spec.lambda + m - k)),
            c(0.0),
        )?;
    }
    Ok(total)
}

const SERIES_TOL: f64 = 1e-13;
const MAX_TERMS: usize = 1 << 21;
const LEVIN_TERMS: usize = 40;

/// `a_m` through the expansion over the simple poles at `a_j`, with the
/// digamma differences `d_{j,n}(m)`.
pub fn a_m_digamma_series(spec: &SumIntegralSpec) -> Result<ComplexEval> {
    spec.check_digamma_series()?;
    let (p, q) = (spec.p(), spec.q());
    let lam = spec.lambda;
    let m = spec.m as f64;
    let alternating = (p - q) % 2 == 1;
    let mut value = c(0.0);
    let mut err = 0.0;
    for j in 0..p {
        let aj = spec.a[j];
        let others = spec.a.without(j);
        // sin(π(b − a_j))Γ(1 − b + a_j + n)/π = (−1)^n/Γ(b − a_j − n), which stays
        // finite when b − a_j is an integer; the series then terminates.
        let prefactor =
            std::f64::consts::PI.powi(p as i32 - 1) / others.iter().fold(c(1.0), |acc, &a| acc * sin_pi(a - aj));
        let num = spec.a.shift(aj + lam + m);
        let mut den = others.reflect(c(1.0) + aj).concat(&spec.b.shift(aj + lam + m));
        den.push(c(1.0));
        let b_minus: Vec<Complex64> = spec.b.iter().map(|&b| b - aj).collect();
        let mut coef = gamma_prod_ratio(&num, &den, c(0.0))? * b_minus.iter().fold(c(1.0), |acc, &x| acc * rgamma(x));
        let sign = if p % 2 == 1 { -1.0 } else { 1.0 };
        let d = |n: f64| -> Result<Complex64> {
            let mut s = digamma(aj + lam + m + n + 1.0)? - digamma(aj + lam + n)?;
            s += digamma(aj + m + n + 1.0)? - digamma(aj + n)?;
            Ok(s)
        };
        let mut next_term = |n: usize| -> Result<Option<Complex64>> {
            if coef == c(0.0) {
                return Ok(None);
            }
            let nf = n as f64;
            let t = coef * d(nf)?;
            let ratio = num.iter().fold(c(sign), |acc, &x| acc * (x + nf))
                * b_minus.iter().fold(c(1.0), |acc, &x| acc * (x - nf - 1.0))
                / den.iter().fold(c(1.0), |acc, &x| acc * (x + nf));
            coef *= ratio;
            Ok(Some(t))
        };
        let sum = if alternating {
            let mut terms = Vec::with_capacity(LEVIN_TERMS);
            let mut finite = false;
            for n in 0..LEVIN_TERMS {
                match next_term(n)? {
                    Some(t) => terms.push(t),
                    None => {
                        finite = true;
                        break;
                    }
                }
            }
            if finite {
                let s: Complex64 = terms.iter().sum();
                ComplexEval::new(s, 8.0 * f64::EPSILON * s.norm(), Method::Series)
            } else {
                let acc = levin_u(&terms);
                ComplexEval::new(acc.value, acc.error, Method::Accelerated)
            }
        } else {
            power_tail_sum(&mut next_term)?
        };
        value += prefactor * sum.value;
        err += prefactor.norm() * sum.est_error;
    }
    Ok(ComplexEval::new(value, err, Method::Series))
}

/// Sum of a positive-direction series whose terms decay like `C n^{−s}`.
///
/// Partial sums at n = 2^k are completed with the integral of the fitted
/// power law and a half-term correction, and successive completions are
/// combined by Richardson extrapolation in n.
fn power_tail_sum(next: &mut impl FnMut(usize) -> Result<Option<Complex64>>) -> Result<ComplexEval> {
    let mut partial = c(0.0);
    let mut n = 0usize;
    let mut checkpoint = 64usize;
    let mut half_term = c(0.0);
    let mut prev: Option<(Complex64, f64)> = None;
    let mut prev_extrap: Option<Complex64> = None;
    while n < MAX_TERMS {
        let Some(t) = next(n)? else {
            return Ok(ComplexEval::new(
                partial,
                8.0 * f64::EPSILON * partial.norm(),
                Method::Series,
            ));
        };
        partial += t;
        n += 1;
        if n == checkpoint / 2 {
            half_term = t;
        }
        if n == checkpoint {
            let s = (half_term.norm() / t.norm()).log2();
            // a NaN slope counts as too slow for the power-law completion
            if s.is_nan() || s <= 1.0 {
                if t.norm() <= SERIES_TOL * partial.norm() {
                    return Ok(ComplexEval::new(partial, t.norm(), Method::Series));
                }
                checkpoint *= 2;
                continue;
            }
            let nf = n as f64;
            let completed = partial + t * (nf / (s - 1.0) - 0.5);
            // completion error behaves like n^{−s}
            let extrap = prev.map(|(e, sp)| {
                let f = 2f64.powf(0.5 * (s + sp));
                (completed * f - e) / (f - 1.0)
            });
            if let (Some(x), Some(px)) = (extrap, prev_extrap) {
                let diff = (x - px).norm();
                if diff <= SERIES_TOL * x.norm().max(1e-300) {
                    return Ok(ComplexEval::new(x, diff + t.norm() * 1e-3, Method::Series));
                }
            }
            prev = Some((completed, s));
            prev_extrap = extrap;
            checkpoint *= 2;
        }
    }
    let best = prev_extrap.or(prev.map(|x| x.0)).unwrap_or(partial);
    Err(Error::NonConvergence {
        partial: best,
        bound: f64::INFINITY,
    })
}

/// `a_m` from the digamma series against the direct Γ sum.
pub fn verify_cor54(spec: &SumIntegralSpec, tol: f64) -> Result<IdentityReport> {
    let series = a_m_digamma_series(spec)?;
    let direct = a_m_direct(spec)?;
    Ok(IdentityReport::relative("cor54", series.value, direct, tol))
}

/// Taylor coefficients of `F(a, 1; b; z)·F(a+λ, 1; b+λ; z)` against
/// `Γ(b)Γ(b+λ)/(Γ(a)Γ(a+λ))·a_n`, one report per order `n ≤ order` (p = q).
pub fn cauchy_product_check(spec: &SumIntegralSpec, order: usize, tol: f64) -> Result<Vec<IdentityReport>> {
    spec.check_shape()?;
    if spec.p() != spec.q() {
        return Err(Error::Precondition(format!(
            "p = {} must equal q = {}",
            spec.p(),
            spec.q()
        )));
    }
    let coefficients = |a: &ParamVec, b: &ParamVec| -> Vec<Complex64> {
        let mut u = vec![c(1.0)];
        for k in 0..order {
            let k = k as f64;
            let r = a
                .iter()
                .zip(b.iter())
                .fold(c(1.0), |acc, (&x, &y)| acc * (x + k) / (y + k));
            u.push(u[u.len() - 1] * r);
        }
        u
    };
    let u = coefficients(&spec.a, &spec.b);
    let v = coefficients(&spec.a.shift(spec.lambda), &spec.b.shift(spec.lambda));
    let prefactor = gamma_prod_ratio(
        &spec.b.concat(&spec.b.shift(spec.lambda)),
        &spec.a.concat(&spec.a.shift(spec.lambda)),
        c(0.0),
    )?;
    (0..=order)
        .map(|n| {
            let conv: Complex64 = (0..=n).map(|k| u[k] * v[n - k]).sum();
            let mut s = spec.clone();
            s.m = n;
            let direct = prefactor * a_m_direct(&s)?;
            Ok(IdentityReport::relative(
                format!("cauchy_product[{n}]"),
                conv,
                direct,
                tol,
            ))
        })
        .collect()
}

/// `∫₀¹ x^a (1 − x^{m+1})/(1 − x) dx = ψ(a+m+2) − ψ(a+1)`.
pub fn psi_integral_check(a: f64, m: usize, tol: f64) -> Result<IdentityReport> {
    if a <= -1.0 {
        return Err(Error::NotIntegrable(format!("x^{a} at the origin")));
    }
    let lhs = quad_unit_interval(
        |x, _| Ok(c((0..=m).map(|j| x.powf(a + j as f64)).sum())),
        &QuadratureSpec::unit(a, 0.0, 1e-13),
    )?;
    let rhs = digamma(c(a + m as f64 + 2.0))? - digamma(c(a + 1.0))?;
    Ok(IdentityReport::new("psi_integral", lhs.value, rhs, tol))
}
