//! Levin u-transform for slowly convergent or alternating series.

use num_complex::Complex64;

const BETA: f64 = 1.0;

/// Result of accelerating a sequence of partial sums.
#[derive(Debug, Clone, Copy)]
pub struct Accelerated {
    pub value: Complex64,
    pub error: f64,
}

/// Levin u-transform of the series with the given terms.
///
/// Returns the transform of the highest stable order together with the
/// difference between the two best consecutive orders as the error estimate.
/// Terms must be nonzero; zero terms end the sequence early.
pub fn levin_u(terms: &[Complex64]) -> Accelerated {
    let n_terms = terms.iter().take_while(|t| t.norm() > 0.0).count();
    let mut partial = Complex64::new(0.0, 0.0);
    let mut num = Vec::with_capacity(n_terms);
    let mut den = Vec::with_capacity(n_terms);
    let mut best = Accelerated {
        value: terms.iter().sum(),
        error: f64::INFINITY,
    };
    let mut prev: Option<Complex64> = None;
    for (n, &term) in terms.iter().enumerate().take(n_terms) {
        partial += term;
        let omega = term * (BETA + n as f64);
        num.push(partial / omega);
        den.push(omega.inv());
        // update the anti-diagonal in place: after this loop num[0] holds order n
        for k in 1..=n {
            let j = n - k;
            let bn = BETA + j as f64;
            let ratio = (bn + k as f64 - 1.0) / (bn + k as f64);
            let coef = bn / (bn + k as f64 - 1.0) * ratio.powi(k as i32 - 1);
            num[j] = num[j + 1] - num[j] * coef;
            den[j] = den[j + 1] - den[j] * coef;
        }
        let est = num[0] / den[0];
        if !(est.re.is_finite() && est.im.is_finite()) {
            break;
        }
        if let Some(p) = prev {
            let err = (est - p).norm();
            if err <= best.error {
                best = Accelerated { value: est, error: err };
            }
        }
        prev = Some(est);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_log2() {
        let terms: Vec<Complex64> = (0..30)
            .map(|n| Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 } / (n as f64 + 1.0), 0.0))
            .collect();
        let acc = levin_u(&terms);
        assert!((acc.value.re - std::f64::consts::LN_2).abs() < 1e-12, "{:?}", acc);
    }

    #[test]
    fn logarithmic_zeta2() {
        let terms: Vec<Complex64> = (1..25)
            .map(|n| Complex64::new(1.0 / (n as f64 * n as f64), 0.0))
            .collect();
        let acc = levin_u(&terms);
        let z2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((acc.value.re - z2).abs() < 1e-9, "{:?}", acc);
    }
}
