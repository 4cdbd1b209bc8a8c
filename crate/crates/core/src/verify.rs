//! Named identity checks with fixed examples and seeded random suites.
//!
//! Random parameters come from documented boxes: entries lie in
//! `[0.1, 2.5]` unless stated otherwise, and entries that must be distinct
//! modulo integers are at least `0.05` apart modulo 1. Case `i` of a suite
//! with seed `s` draws from ChaCha stream `i` of seed `s`, so a case does
//! not depend on how many other cases run or in which order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::IdentityReport;
use crate::gfun::{
    bank_value_direct, banks_cut1, banks_inner, banks_outer, continue_norlund, eval_external, eval_internal,
    eval_internal_connection, eval_internal_continuation, sine_identity, sine_sum, GParams, Sign,
};
use crate::hyper::{pfq_principal, HyperSpec, Sheet};
use crate::identities::{verify_cor52, verify_cor53, verify_cor54, verify_theorem51, SumIntegralSpec};
use crate::miller_paris::{g_ipd_transform, transform_check, IpdSpec, Kind};
use crate::special::{cpow, rgamma, ParamVec};

/// Offset used to approach a cut when checking bank values.
pub const BANK_OFFSET: f64 = 1e-6;
/// Minimal distance modulo 1 between entries drawn as distinct.
pub const MIN_SEPARATION: f64 = 0.05;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Identities known to the verifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    Lemma21,
    Thm22,
    Cor23,
    Cor24,
    Thm31,
    Thm32,
    Thm33,
    Eq42,
    Eq44,
    Thm41,
    Thm51,
    Cor52,
    Cor53,
    Cor54,
}

impl Identity {
    pub const ALL: [Identity; 14] = [
        Identity::Lemma21,
        Identity::Thm22,
        Identity::Cor23,
        Identity::Cor24,
        Identity::Thm31,
        Identity::Thm32,
        Identity::Thm33,
        Identity::Eq42,
        Identity::Eq44,
        Identity::Thm41,
        Identity::Thm51,
        Identity::Cor52,
        Identity::Cor53,
        Identity::Cor54,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Lemma21 => "lemma21",
            Identity::Thm22 => "thm22",
            Identity::Cor23 => "cor23",
            Identity::Cor24 => "cor24",
            Identity::Thm31 => "thm31",
            Identity::Thm32 => "thm32",
            Identity::Thm33 => "thm33",
            Identity::Eq42 => "eq42",
            Identity::Eq44 => "eq44",
            Identity::Thm41 => "thm41",
            Identity::Thm51 => "thm51",
            Identity::Cor52 => "cor52",
            Identity::Cor53 => "cor53",
            Identity::Cor54 => "cor54",
        }
    }

    /// Tolerance used when none is requested explicitly.
    ///
    /// Bank checks compare against an offset evaluation and the integral
    /// identities go through quadrature, so they get looser defaults.
    pub fn default_tol(self) -> f64 {
        match self {
            Identity::Lemma21 | Identity::Eq42 | Identity::Eq44 => 1e-10,
            Identity::Thm22 | Identity::Cor23 | Identity::Cor24 => 1e-8,
            Identity::Thm31 | Identity::Thm32 | Identity::Thm33 => 1e-5,
            Identity::Thm41 | Identity::Thm51 | Identity::Cor52 | Identity::Cor53 => 1e-5,
            Identity::Cor54 => 1e-7,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown identity '{s}'")))
    }
}

/// Outcome of one case: a report, or the error that prevented it.
pub type CaseResult = Result<IdentityReport>;

/// Map `f` over `items`, in parallel when the `parallel` feature is on.
/// The output order always follows the input order.
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

/// Always sequential; used for benchmarking against [`par_map`].
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

/// The RNG for case `index` of the suite with the given seed.
pub fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `count` random cases of `id`, computed in parallel when enabled.
pub fn random_suite(id: Identity, count: usize, seed: u64, tol: f64) -> Vec<CaseResult> {
    par_map((0..count).collect(), |i| random_case(id, &mut case_rng(seed, i), tol))
}

/// As [`random_suite`], always on the calling thread.
pub fn random_suite_sequential(id: Identity, count: usize, seed: u64, tol: f64) -> Vec<CaseResult> {
    seq_map((0..count).collect(), |i| random_case(id, &mut case_rng(seed, i), tol))
}

// ---------------------------------------------------------------- draws

fn mod1_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `n` values in `[lo, hi)` that are pairwise and from `avoid` at least
/// [`MIN_SEPARATION`] apart modulo 1.
pub fn draw_separated(rng: &mut impl Rng, n: usize, lo: f64, hi: f64, avoid: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.random_range(lo..hi);
        if avoid
            .iter()
            .chain(out.iter())
            .all(|&y| mod1_distance(x, y) >= MIN_SEPARATION)
        {
            out.push(x);
        }
    }
    out
}

fn draw_vec(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// A point with modulus in `[r0, r1)` and argument bounded away from the real axis.
fn draw_off_axis(rng: &mut impl Rng, r0: f64, r1: f64) -> Complex64 {
    let r = rng.random_range(r0..r1);
    let t = rng.random_range(0.05 * PI..0.95 * PI);
    let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    Complex64::from_polar(r, s * t)
}

/// Balanced rows with all `2p` entries distinct modulo 1 and `m ≥ m_min`.
fn draw_balanced(rng: &mut impl Rng, p: usize, m_min: usize) -> Result<GParams> {
    let m = rng.random_range(m_min..=p);
    let all = draw_separated(rng, 2 * p, 0.1, 2.5, &[]);
    GParams::from_real(m, p - m, &all[..p], &all[p..])
}

// ---------------------------------------------------------------- single checks

pub fn check_lemma21(a: &ParamVec, b: &ParamVec, z: Complex64, sign: Sign, tol: f64) -> CaseResult {
    let (lhs, rhs) = sine_identity(a, b, z, sign)?;
    let (sl, sr) = sine_sum(a, b)?;
    let sum_res = (sl - sr).norm() / sr.norm().max(1.0);
    Ok(IdentityReport::new("lemma21", lhs, rhs, tol).with_extra("sine_sum", sum_res, tol))
}

/// Outward continuation against the residue sum continued factor by factor.
pub fn check_thm22(g: &GParams, z: Complex64, tol: f64) -> CaseResult {
    let lhs = eval_internal_connection(g, z)?.value;
    let rhs = eval_internal_continuation(g, z)?.value;
    Ok(IdentityReport::relative("thm22", lhs, rhs, tol))
}

/// External function inside the disk against the reflection route through `1/z`.
pub fn check_cor23(g: &GParams, z: Complex64, tol: f64) -> CaseResult {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
    }
    let lhs = eval_external(g, z)?.value;
    let rhs = eval_internal_continuation(&g.reflected(g.n(), g.m())?, z.inv())?.value;
    Ok(IdentityReport::relative("cor23", lhs, rhs, tol))
}

/// `G^{2,0}_{2,2}(z | b; a) = z^{a₂}(1−z)^{s−1}/Γ(s) · ₂F₁(b₁−a₁, b₂−a₁; s; 1−z)`, `s = Σb − Σa`.
pub fn euler_pfaff_closed_form(b: [Complex64; 2], a: [Complex64; 2], z: Complex64) -> Result<Complex64> {
    let s = b[0] + b[1] - a[0] - a[1];
    let spec = HyperSpec::new(
        ParamVec::new(vec![b[0] - a[0], b[1] - a[0]]),
        ParamVec::new(vec![s]),
        c(1.0) - z,
    );
    let f = pfq_principal(&spec, None)?.value;
    Ok(cpow(z, a[1]) * cpow(c(1.0) - z, s - 1.0) * rgamma(s) * f)
}

/// Meijer–Nørlund continuation for p = 2 against the Euler–Pfaff closed form.
pub fn check_cor24(b: [f64; 2], a: [f64; 2], z: Complex64, tol: f64) -> CaseResult {
    let g = GParams::from_real(2, 0, &b, &a)?;
    let lhs = continue_norlund(&g, z)?.value;
    let rhs = euler_pfaff_closed_form([c(b[0]), c(b[1])], [c(a[0]), c(a[1])], z)?;
    Ok(IdentityReport::relative("cor24", lhs, rhs, tol))
}

fn bank_report(name: &str, bank: (f64, f64), offset: Complex64, tol: f64) -> IdentityReport {
    IdentityReport::new(name, Complex64::new(bank.0, bank.1), offset, tol)
}

/// Banks of `(−1, 0]` against an evaluation just above the cut; the residue
/// sum taken directly on the bank is attached as an extra residual.
pub fn check_thm31(g: &GParams, x: f64, tol: f64) -> CaseResult {
    let bank = banks_inner(g, x)?;
    let off = eval_internal(g, Complex64::from_polar(x, PI * (1.0 - BANK_OFFSET)))?.value;
    let direct = bank_value_direct(g, x, Sheet::Upper)?.value;
    let res = (direct - Complex64::new(bank.0, bank.1)).norm() / direct.norm().max(1.0);
    Ok(bank_report("thm31", bank, off, tol).with_extra("direct_bank", res, tol))
}

/// Banks of `(−∞, −1)` against an evaluation just above the cut.
pub fn check_thm32(g: &GParams, x: f64, tol: f64) -> CaseResult {
    let bank = banks_outer(g, x)?;
    let off = eval_internal(g, Complex64::from_polar(x, PI * (1.0 - BANK_OFFSET)))?.value;
    Ok(bank_report("thm32", bank, off, tol))
}

/// Banks of `(1, ∞)` against an evaluation just above the cut.
pub fn check_thm33(g: &GParams, x: f64, tol: f64) -> CaseResult {
    let bank = banks_cut1(g, x)?;
    let off = eval_internal(g, Complex64::new(x, x * BANK_OFFSET))?.value;
    Ok(bank_report("thm33", bank, off, tol))
}

pub fn check_eq42(spec: &IpdSpec, x: Complex64, tol: f64) -> CaseResult {
    let mut r = transform_check(spec, x, Kind::First, tol)?;
    r.name = "eq42".into();
    Ok(r)
}

pub fn check_eq44(spec: &IpdSpec, x: Complex64, tol: f64) -> CaseResult {
    let mut r = transform_check(spec, x, Kind::Second, tol)?;
    r.name = "eq44".into();
    Ok(r)
}

/// Both Meijer–Nørlund transformations; the report shows the first kind and
/// carries the second kind's residual and both oracle residuals as extras.
pub fn check_thm41(spec: &IpdSpec, z: f64, tol: f64) -> CaseResult {
    let first = g_ipd_transform(spec, c(z), Kind::First, tol)?;
    let second = g_ipd_transform(spec, c(z), Kind::Second, tol)?;
    let second_res = second.abs_residual / second.lhs.norm().max(second.rhs.norm()).max(1.0);
    let mut r = first;
    r.name = "thm41".into();
    r = r.with_extra("second_kind", second_res, tol);
    for (label, res) in second.extra {
        r = r.with_extra(format!("second_{label}"), res, tol);
    }
    Ok(r)
}

// ---------------------------------------------------------------- random cases

/// One random case of `id`.
pub fn random_case(id: Identity, rng: &mut ChaCha8Rng, tol: f64) -> CaseResult {
    match id {
        Identity::Lemma21 => {
            let m = rng.random_range(1..=4);
            let a = draw_separated(rng, m, 0.1, 2.5, &[]);
            let b = draw_vec(rng, m, 0.1, 2.5);
            let bi = draw_vec(rng, m, -0.3, 0.3);
            let ai = draw_vec(rng, m, -0.3, 0.3);
            let a: ParamVec = a.iter().zip(&ai).map(|(&r, &i)| Complex64::new(r, i)).collect();
            let b: ParamVec = b.iter().zip(&bi).map(|(&r, &i)| Complex64::new(r, i)).collect();
            let z = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.0..1.0));
            let sign = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
            check_lemma21(&a, &b, z, sign, tol)
        }
        Identity::Thm22 => {
            let p = rng.random_range(2..=3);
            let g = draw_balanced(rng, p, 1)?;
            let z = draw_off_axis(rng, 1.2, 4.0);
            check_thm22(&g, z, tol)
        }
        Identity::Cor23 => {
            let p = rng.random_range(2..=3);
            let m = rng.random_range(1..p);
            let all = draw_separated(rng, 2 * p, 0.1, 2.5, &[]);
            let g = GParams::from_real(m, p - m, &all[..p], &all[p..])?;
            let z = draw_off_axis(rng, 0.25, 0.8);
            check_cor23(&g, z, tol)
        }
        Identity::Cor24 => {
            let a = draw_separated(rng, 2, 0.1, 1.0, &[]);
            let b = draw_separated(rng, 2, 1.1, 2.5, &[]);
            let z = draw_off_axis(rng, 1.2, 4.0);
            check_cor24([b[0], b[1]], [a[0], a[1]], z, tol)
        }
        Identity::Thm31 | Identity::Thm32 | Identity::Thm33 => {
            let p = rng.random_range(1..=2);
            let g = draw_balanced(rng, p, 1)?;
            match id {
                Identity::Thm31 => check_thm31(&g, rng.random_range(0.1..0.9), tol),
                Identity::Thm32 => check_thm32(&g, rng.random_range(1.2..4.0), tol),
                _ => check_thm33(&g, rng.random_range(1.2..4.0), tol),
            }
        }
        Identity::Eq42 | Identity::Eq44 => {
            let spec = draw_ipd(rng, 2)?;
            let x = Complex64::from_polar(rng.random_range(0.1..0.8), rng.random_range(-PI..PI));
            if id == Identity::Eq42 {
                check_eq42(&spec, x, tol)
            } else {
                check_eq44(&spec, x, tol)
            }
        }
        Identity::Thm41 => {
            let spec = draw_ipd(rng, 1)?;
            check_thm41(&spec, rng.random_range(0.1..0.9), tol)
        }
        Identity::Thm51 => verify_theorem51(&draw_moment_spec(rng, false), tol),
        Identity::Cor52 => verify_cor52(&draw_moment_spec(rng, true), tol),
        Identity::Cor53 => {
            let (p, q) = draw_orders(rng, false);
            let mut spec = draw_rows(rng, p, q, 0.1);
            spec.alpha = rng.random_range(0.2..1.5);
            spec.beta = rng.random_range(0.2..1.5);
            spec.m = rng.random_range(0..=3);
            verify_cor53(&spec, tol)
        }
        Identity::Cor54 => {
            let (p, q) = draw_orders(rng, false);
            let lambda = rng.random_range(0.0..1.0);
            let m = rng.random_range(0..=5);
            let need = ((p - q) as f64 * (lambda + m as f64 - 1.0) + 1.0) / 2.0 + 0.5;
            let spec = draw_rows(rng, p, q, need).with_lambda(lambda).with_m(m);
            verify_cor54(&spec, tol)
        }
    }
}

/// `(p, q)` with `p ≤ 2`, `q ≥ 1` and `p − q ∈ {0, 1}` (`p = q` if `square`).
fn draw_orders(rng: &mut impl Rng, square: bool) -> (usize, usize) {
    let p = rng.random_range(1..=2);
    let q = if square || p == 1 { p } else { rng.random_range(1..=2) };
    (p, q)
}

/// Rows `a` (separated modulo 1) and `b` with `Σb − Σa ≥ excess`.
fn draw_rows(rng: &mut impl Rng, p: usize, q: usize, excess: f64) -> SumIntegralSpec {
    let a = draw_separated(rng, p, 0.1, 2.5, &[]);
    let mut b = draw_vec(rng, q, 0.1, 2.5);
    let gap = b.iter().sum::<f64>() - a.iter().sum::<f64>();
    if gap < excess {
        let lift = (excess - gap) / q as f64 + rng.random_range(0.0..1.0);
        b.iter_mut().for_each(|x| *x += lift);
    }
    SumIntegralSpec::from_real(&a, &b)
}

/// Admissible parameters for the moment identities.
fn draw_moment_spec(rng: &mut impl Rng, square: bool) -> SumIntegralSpec {
    let (p, q) = draw_orders(rng, square);
    let mu = rng.random_range(0.0..0.8);
    let nu = rng.random_range(0.0..0.8);
    // keeps Σb − Σa + (p − q)(1 − μ − ν)/2 ≥ 0.1
    let need = 0.1 - (p - q) as f64 * (1.0 - mu - nu) / 2.0;
    draw_rows(rng, p, q, need.max(0.1)).with_mu_nu(mu, nu)
}

/// `F(a, b, f+m; c, f)` data with `r ≤ max_r` and `Σm ≤ 3`; `c` sits above
/// `m + 1` so the Pochhammer prefactors stay away from zero.
fn draw_ipd(rng: &mut impl Rng, max_r: usize) -> Result<IpdSpec> {
    let r = rng.random_range(1..=max_r);
    let mut m_vec: Vec<u32> = (0..r).map(|_| rng.random_range(1..=2)).collect();
    while m_vec.iter().sum::<u32>() > 3 {
        m_vec[0] -= 1;
        if m_vec[0] == 0 {
            m_vec.remove(0);
        }
    }
    let r = m_vec.len();
    let m: u32 = m_vec.iter().sum();
    let ab = draw_separated(rng, 2, 0.1, 1.0, &[]);
    let f = draw_separated(rng, r, 0.3, 2.5, &ab);
    let cc = rng.random_range(m as f64 + 1.5..m as f64 + 3.5);
    let d = rng.random_range(0.6..1.8);
    IpdSpec::from_real(ab[0], ab[1], cc, d, &f, &m_vec)
}

// ---------------------------------------------------------------- fixed examples

/// The documented example(s) of `id`.
pub fn fixed_cases(id: Identity, tol: f64) -> Vec<CaseResult> {
    let g11 = || GParams::from_real(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
    match id {
        Identity::Lemma21 => vec![check_lemma21(
            &ParamVec::from_real(&[0.1, 0.7, 1.3]),
            &ParamVec::from_real(&[0.2, 0.5, 2.1]),
            Complex64::new(0.4, 0.3),
            Sign::Plus,
            tol,
        )],
        Identity::Thm22 => vec![
            g11().and_then(|g| check_thm22(&g, Complex64::from_polar(2.0, PI / 3.0), tol)),
            GParams::from_real(2, 1, &[0.9, 1.4, 2.2], &[0.3, 0.55, 0.7])
                .and_then(|g| check_thm22(&g, Complex64::from_polar(2.5, -0.8), tol)),
        ],
        Identity::Cor23 => vec![GParams::from_real(1, 2, &[0.35, 0.8, 1.9], &[0.2, 1.15, 0.6])
            .and_then(|g| check_cor23(&g, Complex64::new(0.3, 0.5), tol))],
        Identity::Cor24 => vec![check_cor24([1.3, 2.05], [0.2, 0.45], Complex64::new(-2.0, 0.5), tol)],
        Identity::Thm31 => vec![g11().and_then(|g| check_thm31(&g, 0.45, tol))],
        Identity::Thm32 => vec![g11().and_then(|g| check_thm32(&g, 2.5, tol))],
        Identity::Thm33 => vec![g11().and_then(|g| check_thm33(&g, 2.5, tol))],
        Identity::Eq42 => {
            vec![IpdSpec::from_real(0.5, 0.7, 3.2, 0.0, &[1.4], &[1]).and_then(|s| check_eq42(&s, c(0.3), tol))]
        }
        Identity::Eq44 => {
            vec![IpdSpec::from_real(0.3, 0.8, 2.6, 0.0, &[1.1], &[1]).and_then(|s| check_eq44(&s, c(0.4), tol))]
        }
        Identity::Thm41 => {
            vec![IpdSpec::from_real(0.4, 0.9, 3.1, 1.2, &[1.5], &[1]).and_then(|s| check_thm41(&s, 0.35, tol))]
        }
        Identity::Thm51 => vec![
            verify_theorem51(&SumIntegralSpec::from_real(&[1.0], &[2.0]), tol),
            verify_theorem51(&SumIntegralSpec::from_real(&[1.0], &[2.5]).with_mu_nu(0.3, 0.1), tol),
            verify_theorem51(
                &SumIntegralSpec::from_real(&[1.0, 1.5], &[2.0]).with_mu_nu(0.2, 0.2),
                tol,
            ),
        ],
        Identity::Cor52 => vec![verify_cor52(
            &SumIntegralSpec::from_real(&[1.0], &[2.0]).with_mu_nu(1.0, 1.0),
            tol,
        )],
        Identity::Cor53 => vec![verify_cor53(&SumIntegralSpec::from_real(&[1.0], &[2.0]), tol)],
        Identity::Cor54 => (0..=4)
            .map(|m| {
                verify_cor54(
                    &SumIntegralSpec::from_real(&[0.7], &[2.3]).with_lambda(0.6).with_m(m),
                    tol,
                )
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
        assert!("thm99".parse::<Identity>().is_err());
    }

    #[test]
    fn fixed_examples_pass() {
        for id in Identity::ALL {
            for (i, r) in fixed_cases(id, id.default_tol()).into_iter().enumerate() {
                let r = r.unwrap_or_else(|e| panic!("{id} case {i}: {e}"));
                assert!(r.pass, "{id} case {i}: {r:?}");
            }
        }
    }

    #[test]
    fn random_cases_are_reproducible() {
        let a = random_suite(Identity::Lemma21, 8, 7, 1e-10);
        let b = random_suite_sequential(Identity::Lemma21, 8, 7, 1e-10);
        assert_eq!(a, b);
    }

    #[test]
    fn separated_draws() {
        let mut rng = case_rng(3, 0);
        let v = draw_separated(&mut rng, 6, 0.1, 2.5, &[0.5]);
        for i in 0..v.len() {
            assert!(mod1_distance(v[i], 0.5) >= MIN_SEPARATION);
            for j in 0..i {
                assert!(mod1_distance(v[i], v[j]) >= MIN_SEPARATION);
            }
        }
    }
}
