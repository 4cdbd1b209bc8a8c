use num_complex::Complex64;
use serde::Serialize;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Series,
    Terminating,
    PathContinuation,
    Connection,
    ResidueSeries,
    Continuation,
    Reflection,
    Perturbation,
    Residue,
    Quadrature,
    Accelerated,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Terminating => "terminating",
            Method::PathContinuation => "path_continuation",
            Method::Connection => "connection",
            Method::ResidueSeries => "residue_series",
            Method::Continuation => "continuation",
            Method::Reflection => "reflection",
            Method::Perturbation => "perturbation",
            Method::Residue => "residue",
            Method::Quadrature => "quadrature",
            Method::Accelerated => "accelerated",
        }
    }
}

/// A complex value with an estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEval {
    pub value: Complex64,
    pub est_error: f64,
    pub method: Method,
}

impl ComplexEval {
    pub fn new(value: Complex64, est_error: f64, method: Method) -> Self {
        ComplexEval {
            value,
            est_error,
            method,
        }
    }

    pub fn exact(value: Complex64, method: Method) -> Self {
        ComplexEval::new(value, 0.0, method)
    }

    /// Multiply by a constant, scaling the error bound with it.
    pub fn scale(self, factor: Complex64) -> Self {
        ComplexEval {
            value: self.value * factor,
            est_error: self.est_error * factor.norm(),
            method: self.method,
        }
    }
}

/// Outcome of checking one identity numerically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    #[serde(serialize_with = "ser_complex")]
    pub lhs: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub rhs: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Additional residuals, e.g. the oracle cross-check of one side.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<(String, f64)>,
}

impl IdentityReport {
    /// Builds a report; `pass` compares the relative residual (with unit
    /// floor on the scale) against `tolerance`.
    pub fn new(name: impl Into<String>, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let abs_residual = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm());
        let rel_residual = if scale > 0.0 { abs_residual / scale } else { 0.0 };
        let pass = abs_residual / scale.max(1.0) < tolerance;
        IdentityReport {
            name: name.into(),
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            tolerance,
            pass,
            extra: Vec::new(),
        }
    }

    /// Judge on absolute residual only.
    pub fn absolute(name: impl Into<String>, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let mut r = IdentityReport::new(name, lhs, rhs, tolerance);
        r.pass = r.abs_residual < tolerance;
        r
    }

    /// Judge on relative residual only.
    pub fn relative(name: impl Into<String>, lhs: Complex64, rhs: Complex64, tolerance: f64) -> Self {
        let mut r = IdentityReport::new(name, lhs, rhs, tolerance);
        r.pass = r.rel_residual < tolerance;
        r
    }

    pub fn with_extra(mut self, label: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        self.pass &= residual < tolerance;
        self.extra.push((label.into(), residual));
        self
    }
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}
