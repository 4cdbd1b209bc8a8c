//! Analytic continuation of pF(p−1) by Taylor re-centering along a path.
//!
//! The function satisfies the generalized hypergeometric equation
//! `[θ Π(θ+b−1) − z Π(θ+a)] F = 0`, `θ = z d/dz`. Around any regular point
//! `c` the Taylor coefficients obey a finite recurrence, so given
//! `F(c), …, F^(p−1)(c)` the expansion can be carried to `c + δ` inside the
//! disk of radius `min(|c|, |1−c|)`. Stepping at half that radius gives a
//! geometric rate of 1/2 per step.
//!
//! Points are carried as pairs `(z, 1−z)` so that arguments within 1e-15 or
//! closer to the singular point 1 keep full relative precision in `1−z`.

use num_complex::Complex64;

use super::{term_coefficients, ParamSet};
use crate::error::{Error, Result};
use crate::eval::{ComplexEval, Method};

const MAX_STEPS: usize = 4000;
const MAX_TERMS: usize = 600;
const STEP_FRACTION: f64 = 0.5;
const START_RADIUS: f64 = 0.5;

/// A point together with its complement `1 − z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub z: Complex64,
    pub one_minus: Complex64,
}

impl Point {
    pub fn new(z: Complex64) -> Self {
        Point {
            z,
            one_minus: Complex64::new(1.0, 0.0) - z,
        }
    }

    /// Build from the complement, preserving its precision.
    pub fn from_complement(one_minus: Complex64) -> Self {
        Point {
            z: Complex64::new(1.0, 0.0) - one_minus,
            one_minus,
        }
    }
}

struct Operator {
    /// r_j(z) = u[j] z^j − v[j] z^{j+1}, j = 0..=order
    u: Vec<Complex64>,
    v: Vec<Complex64>,
    order: usize,
}

fn poly_from_roots(shifts: &[Complex64]) -> Vec<Complex64> {
    // Π (θ + s_i), coefficients ascending in θ
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &s in shifts {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, &ci) in c.iter().enumerate() {
            next[i] += ci * s;
            next[i + 1] += ci;
        }
        c = next;
    }
    c
}

fn stirling2(n: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; n + 1]; n + 1];
    s[0][0] = 1.0;
    for i in 1..=n {
        for j in 1..=i {
            s[i][j] = j as f64 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s
}

impl Operator {
    fn new(params: &ParamSet) -> Self {
        let order = params.num.len();
        let mut b_shifts = vec![Complex64::new(0.0, 0.0)];
        b_shifts.extend(params.den.iter().map(|&b| b - 1.0));
        let pb = poly_from_roots(&b_shifts);
        let pa = poly_from_roots(&params.num);
        let s2 = stirling2(order);
        let mut u = vec![Complex64::new(0.0, 0.0); order + 1];
        let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
        for j in 0..=order {
            for k in j..=order {
                if k < pb.len() {
                    u[j] += pb[k] * s2[k][j];
                }
                if k < pa.len() {
                    v[j] += pa[k] * s2[k][j];
                }
            }
        }
        Operator { u, v, order }
    }

    /// Coefficients of r_j(c + w) in powers of w: rows j, columns i = 0..=j+1.
    fn recentered(&self, c: Point) -> Vec<Vec<Complex64>> {
        let mut rows = Vec::with_capacity(self.order + 1);
        for j in 0..=self.order {
            let mut row = vec![Complex64::new(0.0, 0.0); j + 2];
            for (i, slot) in row.iter_mut().enumerate() {
                // U_j C(j,i) c^{j−i} − V_j C(j+1,i) c^{j+1−i}
                let b_j = if i <= j { binom_coef(j, i) } else { 0.0 };
                let b_j1 = binom_coef(j + 1, i);
                let mut val = Complex64::new(0.0, 0.0);
                if i <= j {
                    val += self.u[j] * b_j * c.z.powu((j - i) as u32);
                }
                val -= self.v[j] * b_j1 * c.z.powu((j + 1 - i) as u32);
                *slot = val;
            }
            rows.push(row);
        }
        if self.u[self.order] == Complex64::new(1.0, 0.0) && self.v[self.order] == Complex64::new(1.0, 0.0) {
            // leading coefficient c^P (1 − c) computed from the carried complement
            rows[self.order][0] = c.z.powu(self.order as u32) * c.one_minus;
        }
        rows
    }
}

fn binom_coef(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn falling(m: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m as f64 - i as f64))
}

/// Extend scaled Taylor coefficients `g_0..g_{P−1}` at `c` (scale `h`) using the
/// recurrence, until the terms are negligible at |u| = 1.
fn extend_coefficients(op: &Operator, rows: &[Vec<Complex64>], h: Complex64, g: &mut Vec<Complex64>) {
    let p = op.order;
    let hp: Vec<Complex64> = (0..=p + 2).map(|e| h.powu(e as u32)).collect();
    let lead = rows[p][0];
    let mut small = 0;
    let mut n = 0usize;
    while g.len() < MAX_TERMS {
        // coefficient of w^n determines g_{n+p}
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, row) in rows.iter().enumerate() {
            for (i, &r) in row.iter().enumerate() {
                if (j == p && i == 0) || i > n {
                    continue;
                }
                let idx = n - i + j;
                // h exponent p + i − j ≥ 0
                acc += r * hp[p + i - j] * g[idx] * falling(idx, j);
            }
        }
        let next = -acc / (lead * falling(n + p, p));
        g.push(next);
        let scale: f64 = g.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if next.norm() <= 1e-17 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        n += 1;
    }
}

/// Continue the series `Σ t_n w^n` (a pF(p−1) with the given parameter set)
/// along straight segments through `waypoints` ending at `target`.
///
/// The first waypoint is reached directly from the origin disk: the
/// expansion is seeded at `0.5·w₁/|w₁|` (or at `w₁` when `|w₁| ≤ 0.5`).
pub(crate) fn continue_params(params: &ParamSet, waypoints: &[Point]) -> Result<ComplexEval> {
    let _ = *waypoints
        .last()
        .ok_or_else(|| Error::InvalidParams("empty path".into()))?;
    let first = waypoints[0].z;
    let start = if first.norm() <= START_RADIUS {
        waypoints[0]
    } else {
        Point::new(first / first.norm() * START_RADIUS)
    };
    if start.z.norm() == 0.0 {
        return Ok(ComplexEval::exact(params.leading(), Method::Series));
    }
    let op = Operator::new(params);
    let p = op.order;

    // seed: g_k = F^{(k)}(c)/k! · h^k from the convergent series at `start`
    let mut c = start;
    let mut remaining: Vec<Point> = waypoints.to_vec();
    if remaining[0] == start {
        remaining.remove(0);
    }
    if remaining.is_empty() {
        let (v, e) = seed_derivatives(params, start.z, Complex64::new(1.0, 0.0), 1)?;
        return Ok(ComplexEval::new(v[0], e, Method::Series));
    }
    let mut h = step_scale(c, remaining[0]);
    let (mut g, seed_err) = seed_derivatives(params, c.z, h, p)?;
    let mut err = seed_err;
    let mut steps = 0usize;

    for wp in remaining {
        loop {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::NonConvergence {
                    partial: g[0],
                    bound: f64::INFINITY,
                });
            }
            let rows = op.recentered(c);
            extend_coefficients(&op, &rows, h, &mut g);
            let dist = (wp.one_minus - c.one_minus).norm();
            let reach = h.norm();
            let last_leg = dist <= reach * (1.0 + 1e-12);
            let delta = if last_leg {
                c.one_minus - wp.one_minus
            } else {
                let d = c.one_minus - wp.one_minus;
                d / d.norm() * reach
            };
            let u = delta / h;
            let next = if last_leg {
                wp
            } else {
                Point {
                    z: c.z + delta,
                    one_minus: c.one_minus - delta,
                }
            };
            // scale for the following step
            let h_next = if last_leg {
                Complex64::new(STEP_FRACTION * next.z.norm().min(next.one_minus.norm()), 0.0)
            } else {
                step_scale(next, wp)
            };
            let ratio = h_next / h;
            let mut g_next = vec![Complex64::new(0.0, 0.0); p.max(1)];
            let mut upow = vec![Complex64::new(1.0, 0.0); g.len()];
            for n in 1..g.len() {
                upow[n] = upow[n - 1] * u;
            }
            let mut tail = 0.0;
            let mut mag = 0.0;
            for (k, slot) in g_next.iter_mut().enumerate() {
                let mut s = Complex64::new(0.0, 0.0);
                for n in k..g.len() {
                    let t = g[n] * binom_coef(n, k) * upow[n - k];
                    s += t;
                    if k == 0 {
                        mag += t.norm();
                    }
                }
                *slot = s * ratio.powu(k as u32);
                if k == 0 {
                    tail = (g[g.len() - 1] * upow[g.len() - 1]).norm();
                }
            }
            err += tail + 4.0 * f64::EPSILON * mag;
            c = next;
            h = h_next;
            g = g_next;
            if last_leg {
                break;
            }
        }
    }
    Ok(ComplexEval::new(g[0], err, Method::PathContinuation))
}

fn step_scale(c: Point, toward: Point) -> Complex64 {
    let radius = c.z.norm().min(c.one_minus.norm());
    let dist = (toward.one_minus - c.one_minus).norm();
    Complex64::new((STEP_FRACTION * radius).min(dist.max(1e-300)), 0.0)
}

fn seed_derivatives(params: &ParamSet, w0: Complex64, h: Complex64, p: usize) -> Result<(Vec<Complex64>, f64)> {
    // coefficients c_n of w^n, summed with derivative weights
    let coeffs = term_coefficients(params, w0, 1e-18)?;
    let mut out = vec![Complex64::new(0.0, 0.0); p.max(1)];
    let mut mag = 0.0;
    let hw = h / w0;
    for (k, slot) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (n, &t) in coeffs.iter().enumerate().skip(k) {
            // t = c_n w0^n ; F^{(k)}/k! h^k = Σ c_n C(n,k) w0^{n−k} h^k
            let term = t * binom_coef(n, k);
            s += term;
            if k == 0 {
                mag += term.norm();
            }
        }
        *slot = s * hw.powu(k as u32);
    }
    Ok((out, 4.0 * f64::EPSILON * mag))
}
