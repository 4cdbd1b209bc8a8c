//! Integration over an interval with algebraic endpoint singularities.
//!
//! The core is tanh-sinh (double-exponential) quadrature, which absorbs
//! integrable endpoint singularities of the form `x^{σ₀}(1−x)^{σ₁}`. The
//! integrand receives both `x` and its distance to the right endpoint, so it
//! can keep full precision where `1 − x` is tiny.
//!
//! The interval is shortened by `δ₀` and `δ₁` at the two ends, and the
//! discarded pieces are added back from the declared leading powers:
//! `∫₀^δ f ≈ f(δ)·δ/(σ + 1)`. Near the right end this avoids evaluating the
//! integrand at distances below `δ₁`, where continuation-based evaluators
//! become slow.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{ComplexEval, Method};

/// Description of an integral `∫_lo^hi f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub interval: (f64, f64),
    /// Exponent of the leading behaviour `(x − lo)^{σ₀}` at the left end.
    pub sigma0: f64,
    /// Exponent of the leading behaviour `(hi − x)^{σ₁}` at the right end.
    pub sigma1: f64,
    /// Target absolute error relative to `max(1, |integral|)`.
    pub tol: f64,
    /// Maximal number of integrand evaluations.
    pub max_nodes: usize,
    /// Cut-off distance at the left end (relative to the interval length).
    pub delta0: f64,
    /// Cut-off distance at the right end (relative to the interval length).
    pub delta1: f64,
}

impl QuadratureSpec {
    pub fn unit(sigma0: f64, sigma1: f64, tol: f64) -> Self {
        QuadratureSpec {
            interval: (0.0, 1.0),
            sigma0,
            sigma1,
            tol,
            max_nodes: 20_000,
            delta0: 1e-100,
            delta1: 1e-30,
        }
    }
}

const MAX_LEVEL: usize = 12;

/// Node `u ∈ (0, 1)` of the tanh-sinh map and its complement `1 − u`, with weight `du/dt`.
fn node(t: f64) -> (f64, f64, f64) {
    let s = PI * t.sinh();
    let u = 1.0 / (1.0 + (-s).exp());
    let v = 1.0 / (1.0 + s.exp());
    let w = u * v * PI * t.cosh();
    (u, v, w)
}

/// `∫_lo^hi f(x, hi − x) dx` for the declared endpoint exponents.
pub fn quad_unit_interval<F>(f: F, spec: &QuadratureSpec) -> Result<ComplexEval>
where
    F: Fn(f64, f64) -> Result<Complex64>,
{
    if spec.sigma0 <= -1.0 || spec.sigma1 <= -1.0 {
        return Err(Error::NotIntegrable(format!(
            "endpoint exponents {} and {} must exceed −1",
            spec.sigma0, spec.sigma1
        )));
    }
    let (lo, hi) = spec.interval;
    let len = hi - lo;
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::Domain(format!("empty or infinite interval ({lo}, {hi})")));
    }
    let d0 = spec.delta0 * len;
    let d1 = spec.delta1 * len;
    let inner = len - d0 - d1;
    let eval = |u: f64, v: f64| -> Result<Complex64> {
        // x = lo + d0 + inner·u, hi − x = d1 + inner·v
        f(lo + d0 + inner * u, d1 + inner * v)
    };

    // tails from the leading powers
    let f0 = f(lo + d0, len - d0)?;
    let f1 = f(hi - d1, d1)?;
    let tails = f0 * d0 / (spec.sigma0 + 1.0) + f1 * d1 / (spec.sigma1 + 1.0);

    let mut nodes_used = 2usize;
    let mut h = 1.0;
    let mut sum = eval(0.5, 0.5)? * (0.25 * PI);
    nodes_used += 1;
    sum += sweep(&eval, h, 1, 1, sum.norm(), &mut nodes_used, spec.max_nodes)?;
    let mut estimate = sum * h * inner;
    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        let add = sweep(&eval, h, 1, 2, sum.norm(), &mut nodes_used, spec.max_nodes)?;
        sum += add;
        let next = sum * h * inner;
        let diff = (next - estimate).norm();
        estimate = next;
        let total = estimate + tails;
        if diff <= spec.tol * total.norm().max(1.0) && _level >= 3 {
            let err = diff + 1e-3 * tails.norm() + 16.0 * f64::EPSILON * total.norm();
            return Ok(ComplexEval::new(total, err, Method::Quadrature));
        }
    }
    Err(Error::BudgetExhausted {
        estimate: estimate + tails,
        error: f64::INFINITY,
    })
}

/// Sum of weighted integrand values at `t = ±k h` for `k = start, start+step, …`,
/// stopping once the terms become negligible on both sides.
fn sweep<E>(
    eval: &E,
    h: f64,
    start: usize,
    step: usize,
    scale: f64,
    used: &mut usize,
    budget: usize,
) -> Result<Complex64>
where
    E: Fn(f64, f64) -> Result<Complex64>,
{
    let mut total = Complex64::new(0.0, 0.0);
    for sign in [1.0, -1.0] {
        let mut k = start;
        let mut small = 0;
        loop {
            let t = sign * k as f64 * h;
            let (u, v, w) = node(t);
            if w == 0.0 || u == 0.0 || v == 0.0 {
                break;
            }
            let val = eval(u, v)? * w;
            *used += 1;
            if *used > budget {
                return Err(Error::BudgetExhausted {
                    estimate: total,
                    error: f64::INFINITY,
                });
            }
            total += val;
            if val.norm() < 1e-20 * (scale + total.norm()).max(1e-300) || w < 1e-300 {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            k += step;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Result<Complex64> {
        Ok(Complex64::new(x, 0.0))
    }

    #[test]
    fn constant() {
        let v = quad_unit_interval(|_, _| re(1.0), &QuadratureSpec::unit(0.0, 0.0, 1e-12)).unwrap();
        assert!((v.value.re - 1.0).abs() < 1e-13, "{}", v.value);
    }

    #[test]
    fn inverse_sqrt() {
        let v = quad_unit_interval(|x, _| re(x.powf(-0.5)), &QuadratureSpec::unit(-0.5, 0.0, 1e-12)).unwrap();
        assert!((v.value.re - 2.0).abs() < 1e-11, "{}", v.value);
    }

    #[test]
    fn strong_singularity_on_the_right() {
        // ∫ (1−x)^{−0.9} = 10, where the part below the cut-off is about 1e-3
        let v = quad_unit_interval(|_, t| re(t.powf(-0.9)), &QuadratureSpec::unit(0.0, -0.9, 1e-12)).unwrap();
        assert!((v.value.re - 10.0).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn digamma_difference() {
        // ∫ (1 − x^{m+1})/(1 − x) x^a = ψ(a+m+2) − ψ(a+1)
        let (a, m) = (0.35, 3);
        let v = quad_unit_interval(
            |x, _| re((0..=m).map(|j| x.powf(a + j as f64)).sum()),
            &QuadratureSpec::unit(a, 0.0, 1e-12),
        )
        .unwrap();
        let want = (0..=m).map(|j| 1.0 / (a + j as f64 + 1.0)).sum::<f64>();
        assert!((v.value.re - want).abs() < 1e-12);
        let one = quad_unit_interval(|_, _| re(1.0), &QuadratureSpec::unit(0.0, 0.0, 1e-12)).unwrap();
        assert!((one.value.re - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_integrable() {
        assert!(matches!(
            quad_unit_interval(|x, _| re(1.0 / x), &QuadratureSpec::unit(-1.0, 0.0, 1e-8)),
            Err(Error::NotIntegrable(_))
        ));
    }
}
