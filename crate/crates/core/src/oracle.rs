//! Reference values of G by summing residues of the Mellin–Barnes integrand.
//!
//! Each residue (of any order) is a trapezoidal contour integral over a small
//! circle, so no series or continuation code from [`crate::gfun`] is involved.
//! A direct quadrature along the vertical line is not offered: in the
//! balanced case that integral converges only conditionally.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{ComplexEval, Method};
use crate::gfun::GParams;
use crate::special::{lngamma, pole_index, sin_pi, POLE_TOL};

const MIN_NODES: usize = 64;
const MAX_NODES: usize = 4096;
const MAX_LEVELS: usize = 500;
const MAX_RADIUS: f64 = 0.25;
const MIN_RADIUS: f64 = 1e-3;
const CLUSTER_TOL: f64 = 1e-6;
const SERIES_TOL: f64 = 1e-16;

/// The integrand `Γ(a¹+s)Γ(1−b¹−s)/(Γ(b²+s)Γ(1−a²−s)) z^{−s}` at a fixed `z`.
#[derive(Debug, Clone)]
pub struct IntegrandSpec {
    pub g: GParams,
    pub z: Complex64,
}

/// Which residues to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `log Γ(w)` modulo 2πi. Only its exponential is used, so the reflection
/// formula can be applied without tracking the branch.
fn log_gamma_value(w: Complex64) -> Result<Complex64> {
    if w.re < 0.5 {
        let s = sin_pi(w);
        if s.norm() == 0.0 {
            return Err(Error::Pole(w));
        }
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - lngamma(Complex64::new(1.0, 0.0) - w)?)
    } else {
        lngamma(w)
    }
}

impl IntegrandSpec {
    pub fn new(g: GParams, z: Complex64) -> Self {
        IntegrandSpec { g, z }
    }

    /// Value of the integrand at `s` (not at a pole).
    pub fn value(&self, s: Complex64) -> Result<Complex64> {
        let g = &self.g;
        let (m, n, p) = (g.m(), g.n(), g.p());
        let one = Complex64::new(1.0, 0.0);
        let mut log = -s * self.z.ln();
        for i in 0..p {
            let a = g.bottom()[i];
            let b = g.top()[i];
            if i < m {
                log += log_gamma_value(a + s)?;
            } else {
                let w = one - a - s;
                if pole_index(w, POLE_TOL).is_some() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                log -= log_gamma_value(w)?;
            }
            if i < n {
                log += log_gamma_value(one - b - s)?;
            } else {
                let w = b + s;
                if pole_index(w, POLE_TOL).is_some() {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                log -= log_gamma_value(w)?;
            }
        }
        Ok(log.exp())
    }

    /// Poles of the numerator within distance `r` of `s0` (denominator zeros are ignored).
    fn poles_near(&self, s0: Complex64, r: f64) -> Vec<Complex64> {
        let g = &self.g;
        let mut out = Vec::new();
        let left = (0..g.m()).map(|i| -g.bottom()[i]);
        for base in left {
            // poles base − l, l ≥ 0
            let center = (base - s0).re;
            let lo = (center - r).floor().max(0.0) as i64;
            let hi = (center + r).ceil() as i64;
            for l in lo..=hi.max(lo) {
                let pole = base - l as f64;
                if (pole - s0).norm() <= r {
                    out.push(pole);
                }
            }
        }
        let right = (0..g.n()).map(|j| 1.0 - g.top()[j]);
        for base in right {
            // poles base + l, l ≥ 0
            let center = (s0 - base).re;
            let lo = (center - r).floor().max(0.0) as i64;
            let hi = (center + r).ceil() as i64;
            for l in lo..=hi.max(lo) {
                let pole = base + l as f64;
                if (pole - s0).norm() <= r {
                    out.push(pole);
                }
            }
        }
        out
    }
}

/// `(1/2πi) ∮ 𝓘(s) z^{−s} ds` over the circle `|s − s0| = radius`.
///
/// Poles strictly inside `2/3·radius` are integrated over; a pole in the
/// band from `2/3·radius` to `1.5·radius` raises an enclosure error because
/// it would spoil the trapezoidal rule. Nodes are doubled from 64 until two
/// consecutive rules agree.
pub fn numeric_residue(spec: &IntegrandSpec, s0: Complex64, radius: f64) -> Result<Complex64> {
    if !(MIN_RADIUS..=0.4).contains(&radius) {
        return Err(Error::Domain(format!("radius {radius} outside [1e-3, 0.4]")));
    }
    for pole in spec.poles_near(s0, 1.5 * radius) {
        let d = (pole - s0).norm();
        if d >= 2.0 / 3.0 * radius {
            return Err(Error::Enclosure(format!(
                "pole {pole} at distance {d:.3e} from the contour center (radius {radius})"
            )));
        }
    }
    Ok(contour_integral(spec, s0, radius)?.0)
}

fn trapezoid(spec: &IntegrandSpec, s0: Complex64, radius: f64, nodes: usize) -> Result<(Complex64, f64)> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for k in 0..nodes {
        let theta = 2.0 * PI * k as f64 / nodes as f64;
        let e = Complex64::from_polar(1.0, theta);
        // ds/(2πi) = radius·e^{iθ} dθ/(2π)
        let term = spec.value(s0 + e * radius)? * e * radius;
        sum += term;
        mag += term.norm();
    }
    Ok((sum / nodes as f64, mag / nodes as f64))
}

fn contour_integral(spec: &IntegrandSpec, s0: Complex64, radius: f64) -> Result<(Complex64, f64)> {
    let mut nodes = MIN_NODES;
    let (mut prev, _) = trapezoid(spec, s0, radius, nodes)?;
    loop {
        nodes *= 2;
        let (cur, mag) = trapezoid(spec, s0, radius, nodes)?;
        let diff = (cur - prev).norm();
        if diff <= 1e-14 * mag.max(cur.norm()) || nodes >= MAX_NODES {
            return Ok((cur, diff + 1e-15 * mag));
        }
        prev = cur;
    }
}

/// One family of poles, shared by all entries congruent modulo integers.
/// `base` is the member whose poles start first.
#[derive(Debug)]
struct Family {
    base: Complex64,
}

fn families(entries: &[Complex64], side: Side) -> Vec<Family> {
    let mut fams: Vec<Vec<Complex64>> = Vec::new();
    for &e in entries {
        match fams.iter_mut().find(|f| {
            let d = f[0] - e;
            (d - Complex64::new(d.re.round(), 0.0)).norm() < CLUSTER_TOL
        }) {
            Some(f) => f.push(e),
            None => fams.push(vec![e]),
        }
    }
    fams.into_iter()
        .map(|f| {
            // first pole of the family: leftmost start for right poles, rightmost for left poles
            let base = match side {
                Side::Left => f
                    .iter()
                    .copied()
                    .fold(f[0], |acc, x| if x.re < acc.re { x } else { acc }),
                Side::Right => f
                    .iter()
                    .copied()
                    .fold(f[0], |acc, x| if x.re > acc.re { x } else { acc }),
            };
            Family { base }
        })
        .collect()
}

fn dist_to_lattice(x: Complex64) -> f64 {
    (x - Complex64::new(x.re.round(), 0.0)).norm()
}

/// G as a sum of residues: left poles (|z| < 1, sign +) or right poles
/// (|z| > 1, sign −). Coincident entries share one contour per lattice level.
pub fn residue_series_g(g: &GParams, z: Complex64, side: Side) -> Result<ComplexEval> {
    let spec = IntegrandSpec::new(g.clone(), z);
    let (entries, sign): (Vec<Complex64>, f64) = match side {
        Side::Left => {
            if z.norm() >= 1.0 {
                return Err(Error::Domain("left residue sum needs |z| < 1".into()));
            }
            ((0..g.m()).map(|i| g.bottom()[i]).collect(), 1.0)
        }
        Side::Right => {
            if z.norm() <= 1.0 {
                return Err(Error::Domain("right residue sum needs |z| > 1".into()));
            }
            ((0..g.n()).map(|j| g.top()[j]).collect(), -1.0)
        }
    };
    if entries.is_empty() {
        return Ok(ComplexEval::exact(Complex64::new(0.0, 0.0), Method::Residue));
    }
    let fams = families(&entries, side);
    // pole positions at level L: left −base−L, right 1−base+L
    let pole_at = |f: &Family, level: usize| match side {
        Side::Left => -f.base - level as f64,
        Side::Right => 1.0 - f.base + level as f64,
    };
    // foreign singularities: every lattice of the other side and of the other families
    let other_left: Vec<Complex64> = (0..g.m()).map(|i| -g.bottom()[i]).collect();
    let other_right: Vec<Complex64> = (0..g.n()).map(|j| 1.0 - g.top()[j]).collect();

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut small = 0;
    for level in 0..MAX_LEVELS {
        let mut level_sum = Complex64::new(0.0, 0.0);
        for (fi, f) in fams.iter().enumerate() {
            let s0 = pole_at(f, level);
            // nearest foreign pole, measured against whole integer lattices (conservative)
            let mut d = f64::INFINITY;
            for (k, other) in fams.iter().enumerate() {
                if k != fi {
                    d = d.min(dist_to_lattice(s0 - pole_at(other, 0)));
                }
            }
            let (same, opposite) = match side {
                Side::Left => (&other_left, &other_right),
                Side::Right => (&other_right, &other_left),
            };
            for &q in same.iter() {
                let x = dist_to_lattice(s0 - q);
                if x >= CLUSTER_TOL {
                    d = d.min(x);
                }
            }
            for &q in opposite.iter() {
                d = d.min(dist_to_lattice(s0 - q));
            }
            // cluster spread: members congruent within CLUSTER_TOL sit next to s0
            let radius = (0.5 * d).min(MAX_RADIUS);
            if radius < MIN_RADIUS {
                return Err(Error::Enclosure(format!(
                    "foreign pole at distance {d:.3e} from the cluster at {s0}"
                )));
            }
            let (v, e) = contour_integral(&spec, s0, radius)?;
            level_sum += v;
            err += e;
        }
        total += sign * level_sum;
        if level_sum.norm() <= SERIES_TOL * total.norm() {
            small += 1;
            if small >= 3 {
                return Ok(ComplexEval::new(
                    total,
                    err + 4.0 * f64::EPSILON * total.norm(),
                    Method::Residue,
                ));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        partial: total,
        bound: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfun::{eval_internal, g1011_closed_form};

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gamma_only() -> IntegrandSpec {
        // 𝓘(s) = Γ(s): m = 1, bottom 0, and the remaining pair cancels out of the way
        let g = GParams::from_real(1, 0, &[0.5], &[0.0]).unwrap();
        IntegrandSpec::new(g, cz(1.0, 0.0))
    }

    #[test]
    fn gamma_residues() {
        // Γ(s)/Γ(0.5 + s); at s = 0 and s = −1 the denominator gives 1/Γ(1/2) and 1/Γ(−1/2)
        let spec = gamma_only();
        let r0 = numeric_residue(&spec, cz(0.0, 0.0), 0.25).unwrap();
        let want0 = 1.0 / crate::special::gamma(cz(0.5, 0.0)).unwrap();
        assert!((r0 - want0).norm() < 1e-13, "{r0}");
        let r1 = numeric_residue(&spec, cz(-1.0, 0.0), 0.25).unwrap();
        let want1 = -1.0 / crate::special::gamma(cz(-0.5, 0.0)).unwrap();
        assert!((r1 - want1).norm() < 1e-13, "{r1}");
    }

    #[test]
    fn enclosure_error() {
        let spec = gamma_only();
        assert!(matches!(
            numeric_residue(&spec, cz(-0.5, 0.0), 0.4),
            Err(Error::Enclosure(_))
        ));
        assert!(matches!(
            numeric_residue(&spec, cz(0.0, 0.0), 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn residue_additivity() {
        let g = GParams::from_real(2, 0, &[1.5, 2.2], &[0.0, 0.1]).unwrap();
        let spec = IntegrandSpec::new(g, cz(0.4, 0.2));
        let both = numeric_residue(&spec, cz(-0.05, 0.0), 0.3).unwrap();
        let r1 = numeric_residue(&spec, cz(0.0, 0.0), 0.04).unwrap();
        let r2 = numeric_residue(&spec, cz(-0.1, 0.0), 0.04).unwrap();
        assert!((both - r1 - r2).norm() < 1e-9 * both.norm());
    }

    #[test]
    fn elementary_series() {
        let g = GParams::from_real(1, 0, &[2.0], &[0.0]).unwrap();
        let v = residue_series_g(&g, cz(0.5, 0.0), Side::Left).unwrap();
        assert!((v.value - cz(0.5, 0.0)).norm() < 1e-13, "{}", v.value);
        let g = GParams::from_real(1, 0, &[2.3], &[0.4]).unwrap();
        let z = cz(0.3, -0.5);
        let v = residue_series_g(&g, z, Side::Left).unwrap();
        let want = g1011_closed_form(cz(2.3, 0.0), cz(0.4, 0.0), z);
        assert!((v.value - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn double_pole_log_case() {
        let g = GParams::from_real(2, 0, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let v = residue_series_g(&g, cz(0.25, 0.0), Side::Left).unwrap();
        assert!((v.value.re - 4f64.ln()).abs() < 1e-12, "{}", v.value);
        assert!(v.value.im.abs() < 1e-13);
    }

    #[test]
    fn empty_sum() {
        let g = GParams::from_real(0, 1, &[2.0], &[0.0]).unwrap();
        let v = residue_series_g(&g, cz(0.5, 0.0), Side::Left).unwrap();
        assert_eq!(v.value, cz(0.0, 0.0));
    }

    #[test]
    fn matches_internal_and_external() {
        let g = GParams::from_real(2, 1, &[0.9, 1.4, 2.2], &[0.3, 0.55, 0.7]).unwrap();
        let z = cz(0.4, 0.5);
        let a = residue_series_g(&g, z, Side::Left).unwrap().value;
        let b = eval_internal(&g, z).unwrap().value;
        assert!((a - b).norm() < 1e-11 * b.norm(), "{a} vs {b}");
        let z = cz(-1.5, 2.0);
        let a = residue_series_g(&g, z, Side::Right).unwrap().value;
        let b = crate::gfun::eval_external(&g, z).unwrap().value;
        assert!((a - b).norm() < 1e-10 * b.norm(), "{a} vs {b}");
    }
}
