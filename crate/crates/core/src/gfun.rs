//! The balanced Meijer G function `G^{m,n}_{p,p}` and its two branches.
//!
//! # Parameter convention
//!
//! [`GParams`] stores the two parameter rows as `top` and `bottom` and the
//! Mellin–Barnes integrand is
//!
//! ```text
//! Γ(a¹ + s) Γ(1 − b¹ − s)
//! ----------------------- z^{−s}
//! Γ(b² + s) Γ(1 − a² − s)
//! ```
//!
//! where `a¹`/`a²` are the first `m`/remaining entries of `bottom` and
//! `b¹`/`b²` the first `n`/remaining entries of `top`. In words: the left
//! poles come from the first `m` **bottom** entries and the right poles from
//! the first `n` **top** entries. The letters are swapped relative to the
//! usual `G(z | a_1..a_p; b_1..b_q)` notation (where `a` is the top row), but
//! row *positions* agree, so [`GParams::from_common_rows`] is a renaming.
//!
//! # Branches
//!
//! * The internal function 𝔊 is the left residue sum for |z| < 1, continued
//!   to `ℂ ∖ ((−∞, 0] ∪ [1, ∞))`.
//! * The external function 𝒢 is the right residue sum for |z| > 1, continued
//!   to `ℂ ∖ (−∞, 1]`.
//! * The standard G is 𝔊 inside the unit disk and 𝒢 outside it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{ComplexEval, Method};
use crate::hyper::{pfq_point, pfq_principal, HyperSpec, Point, Sheet};
use crate::special::{dist_to_integer, gamma_prod_ratio, pole_index, sin_pi, sin_pi_prod, ParamVec};

/// Pole-separation tolerance.
pub const SEPARATION_TOL: f64 = 1e-10;
/// Bottom entries closer than this (mod 1) are treated as coincident.
pub const COINCIDENCE_TOL: f64 = 1e-6;
/// Perturbation step for the logarithmic cases. Values at steps `1..=4` times
/// this are extrapolated to zero; smaller steps lose digits to cancellation
/// between the nearly singular terms.
pub const PERTURBATION: f64 = 1e-3;
/// Distance to the unit circle treated as "on" it.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;
const ANNULUS_INNER: f64 = 0.9;
const ANNULUS_OUTER: f64 = 1.1;
const INTEGER_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Phase shifts entering the continuation formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiShift {
    /// Σ_{j≤m} (b_{n+j} − a_j)
    pub psi_m: Complex64,
    /// Σ_{j≤n} (b_j − a_{m+j})
    pub psi_n: Complex64,
    /// Σ_{j≤p} (b_j − a_j)
    pub psi_p: Complex64,
}

impl PsiShift {
    fn new(m: usize, n: usize, top: &ParamVec, bottom: &ParamVec) -> Self {
        let psi_m = (0..m).map(|j| top[n + j] - bottom[j]).sum();
        let psi_n = (0..n).map(|j| top[j] - bottom[m + j]).sum();
        let psi_p = top.sum() - bottom.sum();
        let shift = PsiShift { psi_m, psi_n, psi_p };
        debug_assert!((shift.psi_p - shift.psi_m - shift.psi_n).norm() <= 1e-12 * (1.0 + shift.psi_p.norm()));
        shift
    }
}

/// Orders and parameter rows of `G^{m,n}_{p,p}(z | top; bottom)`.
///
/// See the module docs for the row convention. `m + n = p` is the balanced
/// case that the continuation formulas need; other orders are accepted so
/// that augmented functions such as `G^{m,n}_{p+1,p+1}` or `G^{p,p}_{r,r}`
/// can be evaluated inside the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct GParams {
    m: usize,
    n: usize,
    top: ParamVec,
    bottom: ParamVec,
    psi: Option<PsiShift>,
}

impl GParams {
    pub fn new(m: usize, n: usize, top: ParamVec, bottom: ParamVec) -> Result<Self> {
        let p = top.len();
        if p == 0 || bottom.len() != p {
            return Err(Error::InvalidParams(format!(
                "rows must have equal positive length (top {}, bottom {})",
                top.len(),
                bottom.len()
            )));
        }
        if m > p || n > p {
            return Err(Error::InvalidParams(format!("orders m={m}, n={n} exceed p={p}")));
        }
        if !top.is_finite() || !bottom.is_finite() {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        // left and right poles must not coincide: top_j − bottom_i ∉ {1, 2, …}
        for i in 0..m {
            for j in 0..n {
                let d = top[j] - bottom[i];
                if d.re > 0.5 && dist_to_integer(d) < SEPARATION_TOL {
                    return Err(Error::InvalidParams(format!(
                        "pole separation violated: top[{j}] − bottom[{i}] = {d} is a positive integer"
                    )));
                }
            }
        }
        let psi = (m + n == p).then(|| PsiShift::new(m, n, &top, &bottom));
        Ok(GParams { m, n, top, bottom, psi })
    }

    pub fn from_real(m: usize, n: usize, top: &[f64], bottom: &[f64]) -> Result<Self> {
        GParams::new(m, n, ParamVec::from_real(top), ParamVec::from_real(bottom))
    }

    /// Build from the common `G^{m,n}_{p,q}(z | a; b)` rows, `a` written on top.
    ///
    /// The common form has `Γ(b_j − s)` for `j ≤ m` and `Γ(1 − a_j + s)` for
    /// `j ≤ n`; after `s → −s` this is the integrand above with the same row
    /// positions, so only the names change.
    pub fn from_common_rows(m: usize, n: usize, a_top: ParamVec, b_bottom: ParamVec) -> Result<Self> {
        GParams::new(m, n, a_top, b_bottom)
    }

    /// The rows in the common convention: `(a, b)` with `a` on top.
    pub fn to_common_rows(&self) -> (ParamVec, ParamVec) {
        (self.top.clone(), self.bottom.clone())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &ParamVec {
        &self.top
    }

    pub fn bottom(&self) -> &ParamVec {
        &self.bottom
    }

    pub fn is_balanced(&self) -> bool {
        self.psi.is_some()
    }

    pub fn is_real(&self) -> bool {
        self.top.is_real() && self.bottom.is_real()
    }

    pub fn psi(&self) -> Result<PsiShift> {
        self.psi
            .ok_or_else(|| Error::Precondition(format!("m + n = {} differs from p = {}", self.m + self.n, self.p())))
    }

    /// `(1 − bottom; 1 − top)` with orders `(m', n')`.
    pub fn reflected(&self, m: usize, n: usize) -> Result<GParams> {
        GParams::new(m, n, self.bottom.reflect(c(1.0)), self.top.reflect(c(1.0)))
    }

    /// Append one entry to each row, keeping `m` and `n`.
    pub fn augmented(&self, top_extra: Complex64, bottom_extra: Complex64) -> Result<GParams> {
        let mut top = self.top.clone();
        let mut bottom = self.bottom.clone();
        top.push(top_extra);
        bottom.push(bottom_extra);
        GParams::new(self.m, self.n, top, bottom)
    }

    fn with_bottom(&self, bottom: ParamVec) -> Result<GParams> {
        GParams::new(self.m, self.n, self.top.clone(), bottom)
    }

    /// Sign of the hypergeometric argument in the left residue sum.
    fn series_sign(&self) -> f64 {
        if (self.p() + self.m + self.n).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Groups of left-pole indices whose bottom entries coincide modulo integers.
    fn coincident_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..self.m {
            match groups
                .iter_mut()
                .find(|g| dist_to_integer(self.bottom[g[0]] - self.bottom[i]) < COINCIDENCE_TOL)
            {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        groups.retain(|g| g.len() > 1);
        groups
    }
}

/// How the hypergeometric factors of the left residue sum are evaluated.
#[derive(Debug, Clone, Copy)]
enum Mode {
    /// Convergent series (with near-unit path continuation); |w| < 1 only.
    Series,
    /// Principal branch anywhere off the cut of the hypergeometric factor.
    Principal(Sheet),
}

/// The left residue sum
/// `Σ_k z^{a_k} Γ(a¹_[k] − a_k)Γ(1 − b¹ + a_k)/(Γ(1 − a² + a_k)Γ(b² − a_k)) ₚF_{p−1}(1 − b + a_k; 1 − a_[k] + a_k; ±z)`
/// with `z^{a_k} = exp(a_k ln_z)` and the hypergeometric argument `w`.
///
/// When some `a²_i − a_k` is a positive integer the first terms vanish and the
/// sum starts at the first nonzero term, shifted into a new series.
fn left_sum(g: &GParams, ln_z: Complex64, w: Point, mode: Mode) -> Result<ComplexEval> {
    let m = g.m;
    let top = &g.top;
    let bottom = &g.bottom;
    let b1 = top.slice(0..g.n);
    let b2 = top.slice(g.n..g.p());
    let a2 = bottom.slice(m..g.p());
    let mut value = c(0.0);
    let mut err = 0.0;
    let mut used_path = false;
    for k in 0..m {
        let ak = bottom[k];
        let mut n0: u64 = 0;
        for &ai in a2.iter() {
            if let Some(j) = pole_index(c(1.0) - ai + ak, INTEGER_TOL) {
                n0 = n0.max(j + 1);
            }
        }
        let shift = ak + n0 as f64;
        let mut num = ParamVec::empty();
        for i in 0..m {
            if i != k {
                num.push(bottom[i] - shift);
            }
        }
        num.0.extend(b1.iter().map(|&b| 1.0 - b + shift));
        let mut den: ParamVec = b2.iter().map(|&b| b - shift).collect();
        den.0.extend(a2.iter().map(|&a| 1.0 - a + shift));
        let mut coef = gamma_prod_ratio(&num, &den, c(0.0))?;
        if coef == c(0.0) {
            continue;
        }
        if n0 > 0 {
            let fact: f64 = (1..=n0).map(|j| j as f64).product();
            coef *= if n0.is_multiple_of(2) { 1.0 } else { -1.0 } / fact;
        }
        let prefactor = coef * (ln_z * shift).exp();
        let mut fnum: ParamVec = top.iter().map(|&b| 1.0 - b + shift).collect();
        let mut fden: ParamVec = (0..g.p())
            .filter(|&i| i != k)
            .map(|i| 1.0 - bottom[i] + shift)
            .collect();
        if n0 > 0 {
            fnum.push(c(1.0));
            fden.push(c(n0 as f64 + 1.0));
        }
        let spec = HyperSpec::new(fnum, fden, w.z);
        let f = match mode {
            Mode::Series => pfq_point(&spec, w)?,
            Mode::Principal(sheet) => {
                if w.z.norm() < 1.0 {
                    pfq_point(&spec, w)?
                } else {
                    pfq_principal(&spec, Some(sheet))?
                }
            }
        };
        used_path |= f.method == Method::PathContinuation;
        let term = prefactor * f.value;
        value += term;
        err += prefactor.norm() * f.est_error + 8.0 * f64::EPSILON * term.norm();
    }
    let method = if used_path {
        Method::PathContinuation
    } else {
        Method::Series
    };
    Ok(ComplexEval::new(value, err, method))
}

/// Evaluate `f` at `g`, or, when left-pole entries coincide modulo integers,
/// at perturbed copies followed by polynomial extrapolation.
fn with_degenerate_policy(g: &GParams, f: impl Fn(&GParams) -> Result<ComplexEval>) -> Result<ComplexEval> {
    let groups = g.coincident_groups();
    if groups.is_empty() {
        return f(g);
    }
    let perturbed = |eps: f64| -> Result<GParams> {
        let mut bottom = g.bottom.clone();
        for group in &groups {
            for (j, &i) in group.iter().enumerate() {
                bottom.0[i] += eps * j as f64;
            }
        }
        g.with_bottom(bottom)
    };
    let vals = (1..=4)
        .map(|j| f(&perturbed(j as f64 * PERTURBATION)?))
        .collect::<Result<Vec<_>>>()?;
    // cubic and quadratic extrapolation to zero from equally spaced steps
    let cubic = 4.0 * vals[0].value - 6.0 * vals[1].value + 4.0 * vals[2].value - vals[3].value;
    let quadratic = 3.0 * vals[0].value - 3.0 * vals[1].value + vals[2].value;
    let value = cubic;
    let err = 4.0 * vals[0].est_error
        + 6.0 * vals[1].est_error
        + 4.0 * vals[2].est_error
        + vals[3].est_error
        + (cubic - quadratic).norm();
    Ok(ComplexEval::new(value, err, Method::Perturbation))
}

fn on_internal_cut(z: Complex64) -> bool {
    z.im == 0.0 && (z.re <= 0.0 || z.re >= 1.0)
}

fn check_argument(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParams(format!("non-finite argument {z}")));
    }
    Ok(())
}

fn warn_complex(g: &GParams) {
    if !g.is_real() {
        log::warn!("continuation formula applied to complex parameters; only real rows are covered by the theory");
    }
}

/// The internal function 𝔊^{m,n}_{p,p}(z).
///
/// Uses the left residue sum for |z| ≤ 0.9 and the outward continuation
/// formula for |z| ≥ 1.1; in between both are tried and the one with the
/// smaller error estimate wins. Real `z ∈ (0, 1)` always uses the residue sum.
pub fn eval_internal(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    eval_internal_at(g, Point::new(z))
}

/// As [`eval_internal`] with the argument carried together with `1 − z`.
pub fn eval_internal_at(g: &GParams, z: Point) -> Result<ComplexEval> {
    check_argument(z.z)?;
    if on_internal_cut(z.z) && !(z.z.im == 0.0 && z.one_minus.re > 0.0 && z.z.re > 0.0) {
        return Err(Error::OnBranchCut(z.z));
    }
    if g.m == 0 {
        return Ok(ComplexEval::exact(c(0.0), Method::Series));
    }
    let r = z.z.norm();
    if !g.is_balanced() {
        let inside = r < 1.0 || (z.z.im == 0.0 && z.z.re > 0.0 && z.one_minus.re > 0.0 && z.one_minus.im == 0.0);
        if !inside {
            return Err(Error::Domain(format!(
                "|z| = {r}: continuation outside the unit disk needs m + n = p"
            )));
        }
        return with_degenerate_policy(g, |g| left_sum_series(g, z));
    }
    if r <= ANNULUS_INNER || z.z.im == 0.0 {
        return with_degenerate_policy(g, |g| left_sum_series(g, z));
    }
    if r >= ANNULUS_OUTER {
        return outward_continuation(g, z.z);
    }
    let direct = internal_connection(g, z.z);
    let continued = outward_continuation(g, z.z);
    match (direct, continued) {
        (Ok(a), Ok(b)) => Ok(if a.est_error <= b.est_error { a } else { b }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

fn left_sum_series(g: &GParams, z: Point) -> Result<ComplexEval> {
    let w = if g.series_sign() > 0.0 {
        z
    } else {
        Point {
            z: -z.z,
            one_minus: c(1.0) + z.z,
        }
    };
    left_sum(g, z.z.ln(), w, Mode::Series)
}

/// 𝔊 from the left residue sum with each hypergeometric factor continued on
/// its principal branch (connection formula or path continuation for |z| ≥ 1).
///
/// This is an independent route to the same function as the outward
/// continuation formula and is used to cross-check it.
pub fn eval_internal_connection(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    check_argument(z)?;
    if on_internal_cut(z) {
        return Err(Error::OnBranchCut(z));
    }
    g.psi()?;
    if g.m == 0 {
        return Ok(ComplexEval::exact(c(0.0), Method::Series));
    }
    internal_connection(g, z)
}

fn internal_connection(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    if g.m == 0 {
        return Ok(ComplexEval::exact(c(0.0), Method::Series));
    }
    let sheet = Sheet::of(z);
    with_degenerate_policy(g, |g| {
        let v = left_sum(g, z.ln(), Point::new(z), Mode::Principal(sheet))?;
        Ok(ComplexEval::new(v.value, v.est_error, Method::Connection))
    })
}

/// 𝔊 for |z| > 1 through the outward continuation formula
///
/// `𝔊^{m,n}(z | b; a) = −e^{∓iπψ_m} 𝔊^{p,0}(1/z | 1−a; 1−b) + 𝔊^{n,m}(1/z | 1−a; 1−b)`,
///
/// upper sign for Im z > 0.
pub fn eval_internal_continuation(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    check_argument(z)?;
    if on_internal_cut(z) {
        return Err(Error::OnBranchCut(z));
    }
    if g.m == 0 {
        return Ok(ComplexEval::exact(c(0.0), Method::Continuation));
    }
    outward_continuation(g, z)
}

fn outward_continuation(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    let psi = g.psi()?;
    warn_complex(g);
    let p = g.p();
    let inv = z.inv();
    let s = if z.im > 0.0 { -1.0 } else { 1.0 };
    let phase = (Complex64::new(0.0, s * PI) * psi.psi_m).exp();
    let nor = internal_connection(&g.reflected(p, 0)?, inv)?;
    let rest = internal_connection(&g.reflected(g.n, g.m)?, inv)?;
    let value = -phase * nor.value + rest.value;
    let err = phase.norm() * nor.est_error + rest.est_error + 4.0 * f64::EPSILON * value.norm();
    Ok(ComplexEval::new(value, err, Method::Continuation))
}

/// The external function 𝒢^{m,n}_{p,p}(z).
///
/// For |z| ≥ 1 this is 𝔊^{n,m}(1/z | 1−a; 1−b); inside the disk
/// `−e^{±iπψ_n} 𝔊^{p,0}(z | b; a) + 𝔊^{m,n}(z | b; a)`, upper sign for
/// Im z > 0. Real `z ∈ (0, 1)` lies on the cut of 𝒢 and is given the upper
/// bank value.
pub fn eval_external(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    check_argument(z)?;
    let psi = g.psi()?;
    if z.im == 0.0 && (z.re <= 0.0 || z.re == 1.0) {
        return Err(Error::OnBranchCut(z));
    }
    if g.n == 0 {
        return Ok(ComplexEval::exact(c(0.0), Method::Reflection));
    }
    if z.norm() >= 1.0 {
        let v = eval_internal(&g.reflected(g.n, g.m)?, z.inv())?;
        return Ok(ComplexEval::new(v.value, v.est_error, Method::Reflection));
    }
    warn_complex(g);
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    let phase = (Complex64::new(0.0, s * PI) * psi.psi_n).exp();
    let nor = eval_internal(&GParams::new(g.p(), 0, g.top.clone(), g.bottom.clone())?, z)?;
    let own = eval_internal(g, z)?;
    let value = -phase * nor.value + own.value;
    let err = phase.norm() * nor.est_error + own.est_error + 4.0 * f64::EPSILON * value.norm();
    Ok(ComplexEval::new(value, err, Method::Continuation))
}

/// The standard G: 𝔊 inside the unit disk, 𝒢 outside.
pub fn eval_standard(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    check_argument(z)?;
    let r = z.norm();
    if (r - 1.0).abs() <= UNIT_CIRCLE_TOL {
        return Err(Error::OnUnitCircle(z));
    }
    if r < 1.0 {
        eval_internal(g, z)
    } else {
        eval_external(g, z)
    }
}

/// Meijer–Nørlund continuation `𝔊^{p,0}(z) = −e^{∓iπψ_p} 𝔊^{p,0}(1/z | 1−a; 1−b)`
/// for |z| > 1, upper sign for Im z > 0.
pub fn continue_norlund(g: &GParams, z: Complex64) -> Result<ComplexEval> {
    check_argument(z)?;
    if g.m != g.p() || g.n != 0 {
        return Err(Error::Precondition(format!(
            "needs m = p and n = 0, got m = {}, n = {}",
            g.m, g.n
        )));
    }
    if z.norm() <= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not > 1", z.norm())));
    }
    if on_internal_cut(z) {
        return Err(Error::OnBranchCut(z));
    }
    let psi = g.psi()?;
    let s = if z.im > 0.0 { -1.0 } else { 1.0 };
    let phase = (Complex64::new(0.0, s * PI) * psi.psi_p).exp();
    let v = eval_internal(&g.reflected(g.p(), 0)?, z.inv())?;
    Ok(ComplexEval::new(-phase * v.value, v.est_error, Method::Continuation))
}

fn check_bank_params(g: &GParams) -> Result<PsiShift> {
    let psi = g.psi()?;
    if !g.is_real() {
        return Err(Error::Precondition("bank formulas need real parameters".into()));
    }
    Ok(psi)
}

/// Values on the banks of `(−1, 0]`: returns `(re, im_plus)` such that
/// `𝔊(x e^{±iπ}) = re ± i·im_plus`, for `0 < x < 1`.
pub fn banks_inner(g: &GParams, x: f64) -> Result<(f64, f64)> {
    check_bank_params(g)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is not in (0, 1)")));
    }
    let re = g.augmented(c(1.5), c(1.5))?;
    let im = g.augmented(c(1.0), c(1.0))?;
    let z = c(x);
    Ok((
        -PI * eval_internal(&re, z)?.value.re,
        PI * eval_internal(&im, z)?.value.re,
    ))
}

/// Values on the banks of `(−∞, −1)`: `𝔊(x e^{±iπ}) = re ± i·im_plus`, `x > 1`.
pub fn banks_outer(g: &GParams, x: f64) -> Result<(f64, f64)> {
    let psi = check_bank_params(g)?;
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x = {x} is not > 1")));
    }
    let p = g.p();
    let w = c(1.0 / x);
    let base_nor = g.reflected(p, 0)?;
    let base_rest = g.reflected(g.n, g.m)?;
    let half = c(0.5) - psi.psi_m;
    let one = c(1.0) - psi.psi_m;
    let nor_re = eval_internal(&base_nor.augmented(half, half)?, w)?.value.re;
    let rest_re = eval_internal(&base_rest.augmented(c(1.5), c(1.5))?, w)?.value.re;
    let nor_im = eval_internal(&base_nor.augmented(one, one)?, w)?.value.re;
    let rest_im = eval_internal(&base_rest.augmented(c(1.0), c(1.0))?, w)?.value.re;
    Ok((-PI * nor_re - PI * rest_re, PI * (nor_im - rest_im)))
}

/// Values on the banks of `(1, ∞)`: `𝔊(x ± i0) = re ± i·im_plus`, `x > 1`.
pub fn banks_cut1(g: &GParams, x: f64) -> Result<(f64, f64)> {
    let psi = check_bank_params(g)?;
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x = {x} is not > 1")));
    }
    let w = c(1.0 / x);
    let nor = eval_internal(&g.reflected(g.p(), 0)?, w)?.value.re;
    let rest = eval_internal(&g.reflected(g.n, g.m)?, w)?.value.re;
    let psi_m = psi.psi_m.re;
    Ok((-(PI * psi_m).cos() * nor + rest, (PI * psi_m).sin() * nor))
}

/// 𝔊 at `x e^{±iπ}` (0 < x < 1) straight from the left residue sum with the
/// phases `e^{±iπ a_k}` applied to the powers.
pub fn bank_value_direct(g: &GParams, x: f64, sheet: Sheet) -> Result<ComplexEval> {
    g.psi()?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} is not in (0, 1)")));
    }
    if g.m == 0 {
        return Ok(ComplexEval::exact(c(0.0), Method::Series));
    }
    let ln_z = Complex64::new(x.ln(), sheet.sign() * PI);
    with_degenerate_policy(g, |g| left_sum(g, ln_z, Point::new(c(-x)), Mode::Series))
}

/// Sign choice `±` in the sine identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn check_distinct(a: &ParamVec) -> Result<()> {
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if dist_to_integer(a[i] - a[j]) < INTEGER_TOL {
                return Err(Error::Degenerate(format!(
                    "entries {} and {} differ by an integer",
                    a[i], a[j]
                )));
            }
        }
    }
    Ok(())
}

/// Both sides of the sine identity
///
/// `Σ_k sin π(b − a_k) / sin π(a_[k] − a_k) · e^{±iπ(z−a_k)} / sin π(z − a_k)
///   = e^{±iπψ} − sin π(z − b) / sin π(z − a)`, `ψ = Σ(b − a)`.
pub fn sine_identity(a: &ParamVec, b: &ParamVec, z: Complex64, sign: Sign) -> Result<(Complex64, Complex64)> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidParams("a and b must have equal positive length".into()));
    }
    check_distinct(a)?;
    let s = sign.value();
    let mut lhs = c(0.0);
    for (k, &ak) in a.iter().enumerate() {
        let sz = sin_pi(z - ak);
        if sz.norm() < 1e-300 {
            return Err(Error::Degenerate(format!("z − a_{k} is an integer")));
        }
        let ratio = sin_pi_prod(&b.shift(-ak)) / sin_pi_prod(&a.without(k).shift(-ak));
        lhs += ratio * (Complex64::new(0.0, s * PI) * (z - ak)).exp() / sz;
    }
    let psi = b.sum() - a.sum();
    let rhs = (Complex64::new(0.0, s * PI) * psi).exp() - sin_pi_prod(&b.reflect(z)) / sin_pi_prod(&a.reflect(z));
    Ok((lhs, rhs))
}

/// Both sides of `Σ_k sin π(b − a_k) / sin π(a_[k] − a_k) = sin πψ`.
pub fn sine_sum(a: &ParamVec, b: &ParamVec) -> Result<(Complex64, Complex64)> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidParams("a and b must have equal positive length".into()));
    }
    check_distinct(a)?;
    let lhs = (0..a.len())
        .map(|k| sin_pi_prod(&b.shift(-a[k])) / sin_pi_prod(&a.without(k).shift(-a[k])))
        .sum();
    Ok((lhs, sin_pi(b.sum() - a.sum())))
}

/// `G^{1,0}_{1,1}(z | b; a) = z^a (1 − z)^{b−a−1} / Γ(b − a)`, principal powers.
pub fn g1011_closed_form(b: Complex64, a: Complex64, z: Complex64) -> Complex64 {
    use crate::special::{cpow, rgamma};
    cpow(z, a) * cpow(c(1.0) - z, b - a - 1.0) * rgamma(b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::cpow;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn g(m: usize, n: usize, top: &[f64], bottom: &[f64]) -> GParams {
        GParams::from_real(m, n, top, bottom).unwrap()
    }

    #[test]
    fn pole_separation_is_top_minus_bottom() {
        assert!(GParams::from_real(1, 1, &[3.0, 0.5], &[1.0, 0.2]).is_err());
        // bottom − top = 1 keeps the pole sets apart
        assert!(GParams::from_real(1, 1, &[0.0, 2.0], &[1.0, -1.0]).is_ok());
    }

    #[test]
    fn psi_bookkeeping() {
        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        let psi = gp.psi().unwrap();
        assert!((psi.psi_m - cz(1.1, 0.0)).norm() < 1e-15);
        assert!((psi.psi_n - cz(0.2, 0.0)).norm() < 1e-15);
        assert!((psi.psi_p - psi.psi_m - psi.psi_n).norm() < 1e-15);
        assert!(g(1, 0, &[1.0, 2.0], &[0.0, 0.5]).psi().is_err());
    }

    #[test]
    fn elementary_internal() {
        let v = eval_internal(&g(1, 0, &[2.0], &[0.0]), cz(0.5, 0.0)).unwrap();
        assert!((v.value - cz(0.5, 0.0)).norm() < 1e-14, "{}", v.value);
        for z in [
            cz(0.3, 0.4),
            cz(-0.5, 0.2),
            cz(2.0, 1.0),
            cz(0.95, -0.2),
            cz(-3.0, -0.5),
        ] {
            let v = eval_internal(&g(1, 0, &[2.3], &[0.4]), z).unwrap();
            let want = g1011_closed_form(cz(2.3, 0.0), cz(0.4, 0.0), z);
            assert!(
                (v.value - want).norm() < 1e-13 * want.norm(),
                "z={z}: {} vs {want}",
                v.value
            );
        }
    }

    #[test]
    fn log_case_by_perturbation() {
        let v = eval_internal(&g(2, 0, &[1.0, 1.0], &[0.0, 0.0]), cz(0.25, 0.0)).unwrap();
        assert_eq!(v.method, Method::Perturbation);
        assert!((v.value.re - 4f64.ln()).abs() < 1e-8, "{}", v.value);
    }

    #[test]
    fn cut_and_trivial_cases() {
        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        assert!(matches!(eval_internal(&gp, cz(-0.5, 0.0)), Err(Error::OnBranchCut(_))));
        assert!(matches!(eval_internal(&gp, cz(2.0, 0.0)), Err(Error::OnBranchCut(_))));
        let v = eval_internal(&g(0, 2, &[0.9, 1.4], &[0.3, 0.7]), cz(0.4, 0.1)).unwrap();
        assert_eq!(v.value, cz(0.0, 0.0));
    }

    #[test]
    fn dual_path_outside_disk() {
        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        let z = Complex64::from_polar(2.0, PI / 3.0);
        let a = eval_internal_continuation(&gp, z).unwrap();
        let b = eval_internal_connection(&gp, z).unwrap();
        assert!(
            (a.value - b.value).norm() < 1e-9 * a.value.norm(),
            "{} vs {}",
            a.value,
            b.value
        );
        let zc = z.conj();
        let c2 = eval_internal(&gp, zc).unwrap();
        assert!((c2.value - a.value.conj()).norm() < 1e-11 * a.value.norm());
    }

    #[test]
    fn annulus_is_continuous() {
        let gp = g(2, 1, &[0.9, 1.4, 2.2], &[0.3, 0.55, 0.7]);
        for r in [0.89, 0.95, 1.0, 1.05, 1.11] {
            let z = Complex64::from_polar(r, 0.8);
            let a = eval_internal(&gp, z).unwrap();
            let b = eval_internal_connection(&gp, z).unwrap();
            assert!((a.value - b.value).norm() < 1e-9 * b.value.norm(), "r={r}");
        }
    }

    #[test]
    fn external_examples() {
        let gp = g(0, 1, &[2.0], &[0.0]);
        let v = eval_external(&gp, cz(0.5, 0.0)).unwrap();
        assert!((v.value - cz(-0.5, 0.0)).norm() < 1e-14, "{}", v.value);

        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        let v = eval_external(&gp, cz(3.0, 0.0)).unwrap();
        let w = eval_internal(&gp.reflected(1, 1).unwrap(), cz(1.0 / 3.0, 0.0)).unwrap();
        assert!((v.value - w.value).norm() < 1e-12 * w.value.norm());
    }

    #[test]
    fn external_inside_matches_reflection_route() {
        let gp = g(1, 2, &[0.35, 0.8, 1.9], &[0.2, 1.15, 0.6]);
        for z in [cz(0.3, 0.5), cz(-0.4, -0.2), cz(0.1, -0.6)] {
            let inside = eval_external(&gp, z).unwrap();
            let via = eval_internal_continuation(&gp.reflected(2, 1).unwrap(), z.inv()).unwrap();
            assert!((inside.value - via.value).norm() < 1e-8 * via.value.norm(), "z={z}");
        }
    }

    #[test]
    fn standard_delegation() {
        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        let z = cz(0.3, 0.4);
        assert_eq!(eval_standard(&gp, z).unwrap(), eval_internal(&gp, z).unwrap());
        let z = cz(1.2, 1.6);
        assert_eq!(eval_standard(&gp, z).unwrap(), eval_external(&gp, z).unwrap());
        assert!(matches!(eval_standard(&gp, cz(0.6, 0.8)), Err(Error::OnUnitCircle(_))));
    }

    #[test]
    fn norlund_examples() {
        let v = continue_norlund(&g(1, 0, &[2.0], &[0.0]), cz(2.0, 1e-8)).unwrap();
        assert!((v.value - cz(-1.0, 0.0)).norm() < 1e-7, "{}", v.value);
    }

    /// The p = 2 closed form through ₂F₁ at 1 − z.
    fn g2020_closed(b: [f64; 2], a: [f64; 2], z: Complex64) -> Complex64 {
        let s = b[0] + b[1] - a[0] - a[1];
        let spec = HyperSpec::new(
            ParamVec::from_real(&[b[0] - a[0], b[1] - a[0]]),
            ParamVec::from_real(&[s]),
            c(1.0) - z,
        );
        let f = pfq_principal(&spec, None).unwrap().value;
        cpow(z, cz(a[1], 0.0)) * cpow(c(1.0) - z, cz(s - 1.0, 0.0)) * crate::special::rgamma(cz(s, 0.0)) * f
    }

    #[test]
    fn norlund_p2_matches_closed_form() {
        let (b, a) = ([1.3, 2.05], [0.2, 0.45]);
        let gp = g(2, 0, &b, &a);
        for z in [cz(0.4, 0.0), cz(0.3, 0.2)] {
            let v = eval_internal(&gp, z).unwrap().value;
            let want = g2020_closed(b, a, z);
            assert!((v - want).norm() < 1e-12 * want.norm(), "z={z}: {v} vs {want}");
        }
        for z in [cz(-2.0, 0.5), cz(1.5, -1.0), cz(3.0, 0.01)] {
            let v = continue_norlund(&gp, z).unwrap().value;
            let want = g2020_closed(b, a, z);
            assert!((v - want).norm() < 1e-10 * want.norm(), "z={z}: {v} vs {want}");
        }
    }

    #[test]
    fn bank_elementary() {
        let gp = g(1, 0, &[2.0], &[0.0]);
        let (re, im) = banks_inner(&gp, 0.3).unwrap();
        assert!((re - 1.3).abs() < 1e-12 && im.abs() < 1e-12, "{re} {im}");
        let (re, im) = banks_outer(&gp, 2.0).unwrap();
        assert!((re - 3.0).abs() < 1e-12 && im.abs() < 1e-12, "{re} {im}");
        let (re, im) = banks_cut1(&gp, 2.0).unwrap();
        assert!((re + 1.0).abs() < 1e-12 && im.abs() < 1e-12, "{re} {im}");
        assert!(matches!(banks_inner(&gp, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn bank_inner_matches_direct_and_offset() {
        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        let x = 0.45;
        let (re, im) = banks_inner(&gp, x).unwrap();
        let up = bank_value_direct(&gp, x, Sheet::Upper).unwrap().value;
        let lo = bank_value_direct(&gp, x, Sheet::Lower).unwrap().value;
        assert!((up - cz(re, im)).norm() < 1e-10, "{up} vs {re} {im}");
        assert!((lo - cz(re, -im)).norm() < 1e-10);
        let off = eval_internal(&gp, Complex64::from_polar(x, PI * (1.0 - 1e-6)))
            .unwrap()
            .value;
        assert!((off - cz(re, im)).norm() < 1e-5);
    }

    #[test]
    fn bank_outer_and_cut1_match_offsets() {
        let gp = g(1, 1, &[0.9, 1.4], &[0.3, 0.7]);
        let x = 2.5;
        let (re, im) = banks_outer(&gp, x).unwrap();
        let off = eval_internal(&gp, Complex64::from_polar(x, PI * (1.0 - 1e-6)))
            .unwrap()
            .value;
        assert!((off - cz(re, im)).norm() < 1e-5, "{off} vs {re} {im}");
        let (re, im) = banks_cut1(&gp, x).unwrap();
        let off = eval_internal(&gp, cz(x, x * 1e-8)).unwrap().value;
        assert!((off - cz(re, im)).norm() < 1e-6, "{off} vs {re} {im}");
        let off = eval_internal(&gp, cz(x, -x * 1e-8)).unwrap().value;
        assert!((off - cz(re, -im)).norm() < 1e-6);
    }

    #[test]
    fn sine_identity_examples() {
        let a = ParamVec::from_real(&[0.1, 0.7, 1.3]);
        let b = ParamVec::from_real(&[0.2, 0.5, 2.1]);
        let (l, r) = sine_identity(&a, &b, cz(0.4, 0.3), Sign::Plus).unwrap();
        assert!((l - r).norm() < 1e-11);
        let (l, r) = sine_identity(
            &ParamVec::from_real(&[0.3]),
            &ParamVec::from_real(&[0.3]),
            cz(0.8, 0.1),
            Sign::Minus,
        )
        .unwrap();
        assert!(l.norm() < 1e-15 && r.norm() < 1e-15);
        let (l, r) = sine_identity(&a, &b, b[0], Sign::Minus).unwrap();
        let psi = b.sum() - a.sum();
        assert!((r - (cz(0.0, -PI) * psi).exp()).norm() < 1e-14);
        assert!((l - r).norm() < 1e-11);
        let (l, r) = sine_sum(&a, &b).unwrap();
        assert!((l - r).norm() < 1e-12);
        assert!(sine_identity(
            &ParamVec::from_real(&[0.2, 1.2]),
            &ParamVec::from_real(&[0.5, 0.6]),
            cz(0.3, 0.1),
            Sign::Plus
        )
        .is_err());
    }
}
