//! Command-line front end: argument parsing, JSON payloads and exit codes.
//!
//! Exit codes: 0 success, 1 malformed input, 2 domain or precondition error,
//! 3 at least one verification report failed its tolerance.

use std::io::Read;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::eval::IdentityReport;
use crate::gfun::{banks_cut1, banks_inner, banks_outer, eval_external, eval_internal, eval_standard, GParams, Sign};
use crate::identities::{verify_cor52, verify_cor53, verify_cor54, verify_theorem51, SumIntegralSpec};
use crate::miller_paris::IpdSpec;
use crate::special::ParamVec;
use crate::verify::{
    check_cor23, check_cor24, check_eq42, check_eq44, check_lemma21, check_thm22, check_thm31, check_thm32,
    check_thm33, check_thm41, fixed_cases, random_suite, CaseResult, Identity,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_FAILED: i32 = 3;

/// Default tolerance of `eval` and of `verify` with explicit parameters.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "balanced-g",
    version,
    about = "Evaluate balanced Meijer G functions and verify identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate G at one point; the payload is read from a file or `-` for stdin.
    Eval {
        #[arg(long, value_name = "FILE|-")]
        json: String,
        #[arg(long, env = "BALANCED_G_TOL")]
        tol: Option<f64>,
    },
    /// Bank values on one of the three cuts.
    Banks {
        #[arg(long, value_name = "FILE|-")]
        json: String,
    },
    /// Verify an identity on its built-in examples, on explicit parameters or on random draws.
    Verify {
        #[arg(long)]
        identity: String,
        /// Number of random cases.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "BALANCED_G_TOL")]
        tol: Option<f64>,
        /// Parameters of a single case.
        #[arg(long, value_name = "FILE|-")]
        json: Option<String>,
    },
}

/// Output text and exit code of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn json(v: &Value, code: i32) -> Self {
        Outcome {
            stdout: to_json(v),
            code,
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParams(_) => EXIT_MALFORMED,
        _ => EXIT_DOMAIN,
    }
}

fn error_value(e: &Error) -> Value {
    json!({ "error": e.code(), "message": e.to_string() })
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome::json(&error_value(e), exit_code(e))
}

fn malformed(msg: impl Into<String>) -> Outcome {
    Outcome::json(
        &json!({ "error": "malformed_input", "message": msg.into() }),
        EXIT_MALFORMED,
    )
}

/// Parse `args` (program name first) and run the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_MALFORMED,
            };
            Outcome {
                stdout: e.render().to_string(),
                code,
            }
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Eval { json, tol } => match (read_payload(&json), check_tol(tol)) {
            (Ok(v), Ok(tol)) => run_eval(&v, tol),
            (Err(o), _) | (_, Err(o)) => o,
        },
        Command::Banks { json } => match read_payload(&json) {
            Ok(v) => run_banks(&v),
            Err(o) => o,
        },
        Command::Verify {
            identity,
            random,
            seed,
            tol,
            json,
        } => {
            let id: Identity = match identity.parse() {
                Ok(id) => id,
                Err(e) => return malformed(e.to_string()),
            };
            let tol = match tol {
                Some(_) => match check_tol(tol) {
                    Ok(t) => t,
                    Err(o) => return o,
                },
                None => id.default_tol(),
            };
            let payload = match json.as_deref().map(read_payload).transpose() {
                Ok(p) => p,
                Err(o) => return o,
            };
            run_verify(id, random, seed, tol, payload.as_ref())
        }
    }
}

fn check_tol(tol: Option<f64>) -> Result<f64, Outcome> {
    let t = tol.unwrap_or(DEFAULT_TOL);
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(malformed(format!("tolerance {t} is not in (0, 1)")))
    }
}

fn read_payload(source: &str) -> Result<Value, Outcome> {
    let text = if source == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| malformed(format!("cannot read stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(source).map_err(|e| malformed(format!("cannot read {source}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| malformed(format!("invalid JSON: {e}")))
}

// ---------------------------------------------------------------- payloads

/// A real number or `{re, im}`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Num {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl Num {
    fn value(self) -> Complex64 {
        match self {
            Num::Real(x) => Complex64::new(x, 0.0),
            Num::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

fn params(v: &[Num]) -> ParamVec {
    v.iter().map(|x| x.value()).collect()
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Branch {
    #[default]
    Internal,
    External,
    Standard,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvalPayload {
    m: usize,
    n: usize,
    p: usize,
    top: Vec<Num>,
    bottom: Vec<Num>,
    z: Num,
    #[serde(default)]
    branch: Branch,
}

fn g_params(m: usize, n: usize, p: usize, top: &[Num], bottom: &[Num]) -> Result<GParams, Error> {
    if top.len() != p || bottom.len() != p {
        return Err(Error::InvalidParams(format!(
            "p = {p} but top has {} and bottom {} entries",
            top.len(),
            bottom.len()
        )));
    }
    GParams::new(m, n, params(top), params(bottom))
}

fn complex_value(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn run_eval(payload: &Value, tol: f64) -> Outcome {
    let req: EvalPayload = match serde_json::from_value(payload.clone()) {
        Ok(r) => r,
        Err(e) => return malformed(format!("eval payload: {e}")),
    };
    let g = match g_params(req.m, req.n, req.p, &req.top, &req.bottom) {
        Ok(g) => g,
        Err(e) => return error_outcome(&e),
    };
    let z = req.z.value();
    let result = match req.branch {
        Branch::Internal => eval_internal(&g, z),
        Branch::External => eval_external(&g, z),
        Branch::Standard => eval_standard(&g, z),
    };
    match result {
        Ok(v) => {
            if v.est_error > tol * v.value.norm().max(1.0) {
                log::warn!("estimated error {:e} exceeds tolerance {:e}", v.est_error, tol);
            }
            let psi = g.psi().ok().map_or(
                Value::Null,
                |s| json!({ "m": complex_value(s.psi_m), "n": complex_value(s.psi_n), "p": complex_value(s.psi_p) }),
            );
            Outcome::json(
                &json!({
                    "value": complex_value(v.value),
                    "est_error": v.est_error,
                    "method": v.method.as_str(),
                    "psi": psi,
                }),
                EXIT_OK,
            )
        }
        Err(e) => error_outcome(&e),
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Cut {
    Inner,
    Outer,
    One,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BanksPayload {
    m: usize,
    n: usize,
    p: usize,
    top: Vec<Num>,
    bottom: Vec<Num>,
    x: f64,
    cut: Cut,
}

pub fn run_banks(payload: &Value) -> Outcome {
    let req: BanksPayload = match serde_json::from_value(payload.clone()) {
        Ok(r) => r,
        Err(e) => return malformed(format!("banks payload: {e}")),
    };
    let res = g_params(req.m, req.n, req.p, &req.top, &req.bottom).and_then(|g| match req.cut {
        Cut::Inner => banks_inner(&g, req.x),
        Cut::Outer => banks_outer(&g, req.x),
        Cut::One => banks_cut1(&g, req.x),
    });
    match res {
        Ok((re, im)) => Outcome::json(&json!({ "re": re, "im_upper": im }), EXIT_OK),
        Err(e) => error_outcome(&e),
    }
}

/// Parameters of a single verification case; which fields are needed
/// depends on the identity.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CasePayload {
    m: Option<usize>,
    n: Option<usize>,
    top: Option<Vec<Num>>,
    bottom: Option<Vec<Num>>,
    z: Option<Num>,
    x: Option<Num>,
    a: Option<Value>,
    b: Option<Value>,
    c: Option<f64>,
    d: Option<f64>,
    f: Option<Vec<f64>>,
    shifts: Option<Vec<u32>>,
    sign: Option<String>,
    mu: Option<f64>,
    nu: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    lambda: Option<f64>,
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::InvalidParams(format!("missing field '{name}'")))
}

fn num_list(v: Option<&Value>, name: &str) -> Result<Vec<Num>, Error> {
    let v = need(v, name)?;
    serde_json::from_value(v.clone()).map_err(|e| Error::InvalidParams(format!("field '{name}': {e}")))
}

fn scalar(v: Option<&Value>, name: &str) -> Result<f64, Error> {
    need(v.and_then(Value::as_f64), name)
}

fn case_from_payload(id: Identity, payload: &Value, tol: f64) -> CaseResult {
    let p: CasePayload =
        serde_json::from_value(payload.clone()).map_err(|e| Error::InvalidParams(format!("case payload: {e}")))?;
    let point = || need(p.z.or(p.x), "z").map(Num::value);
    let rows = || -> Result<GParams, Error> {
        let top = need(p.top.as_ref(), "top")?;
        let bottom = need(p.bottom.as_ref(), "bottom")?;
        g_params(need(p.m, "m")?, need(p.n, "n")?, top.len(), top, bottom)
    };
    let ipd = || -> Result<IpdSpec, Error> {
        IpdSpec::from_real(
            scalar(p.a.as_ref(), "a")?,
            scalar(p.b.as_ref(), "b")?,
            need(p.c, "c")?,
            p.d.unwrap_or(0.0),
            &p.f.clone().unwrap_or_default(),
            &p.shifts.clone().unwrap_or_default(),
        )
    };
    let sum_spec = || -> Result<SumIntegralSpec, Error> {
        let a = params(&num_list(p.a.as_ref(), "a")?);
        let b = params(&num_list(p.b.as_ref(), "b")?);
        let mut s = SumIntegralSpec::new(a, b)
            .with_mu_nu(p.mu.unwrap_or(0.0), p.nu.unwrap_or(0.0))
            .with_alpha_beta(p.alpha.unwrap_or(1.0), p.beta.unwrap_or(1.0))
            .with_lambda(p.lambda.unwrap_or(0.0));
        s.m = p.m.unwrap_or(0);
        Ok(s)
    };
    match id {
        Identity::Lemma21 => {
            let a = params(&num_list(p.a.as_ref(), "a")?);
            let b = params(&num_list(p.b.as_ref(), "b")?);
            let sign = match p.sign.as_deref().unwrap_or("+") {
                "+" => Sign::Plus,
                "-" => Sign::Minus,
                s => return Err(Error::InvalidParams(format!("sign must be '+' or '-', got '{s}'"))),
            };
            check_lemma21(&a, &b, point()?, sign, tol)
        }
        Identity::Thm22 => check_thm22(&rows()?, point()?, tol),
        Identity::Cor23 => check_cor23(&rows()?, point()?, tol),
        Identity::Cor24 => {
            let top = need(p.top.as_ref(), "top")?;
            let bottom = need(p.bottom.as_ref(), "bottom")?;
            if top.len() != 2 || bottom.len() != 2 {
                return Err(Error::InvalidParams("top and bottom need two entries".into()));
            }
            let re = |v: &[Num], i: usize| v[i].value().re;
            check_cor24([re(top, 0), re(top, 1)], [re(bottom, 0), re(bottom, 1)], point()?, tol)
        }
        Identity::Thm31 => check_thm31(&rows()?, point()?.re, tol),
        Identity::Thm32 => check_thm32(&rows()?, point()?.re, tol),
        Identity::Thm33 => check_thm33(&rows()?, point()?.re, tol),
        Identity::Eq42 => check_eq42(&ipd()?, point()?, tol),
        Identity::Eq44 => check_eq44(&ipd()?, point()?, tol),
        Identity::Thm41 => check_thm41(&ipd()?, point()?.re, tol),
        Identity::Thm51 => verify_theorem51(&sum_spec()?, tol),
        Identity::Cor52 => verify_cor52(&sum_spec()?, tol),
        Identity::Cor53 => verify_cor53(&sum_spec()?, tol),
        Identity::Cor54 => verify_cor54(&sum_spec()?, tol),
    }
}

fn report_value(index: usize, r: &IdentityReport) -> Value {
    let mut v = serde_json::to_value(r).expect("reports serialize");
    if let Value::Object(map) = &mut v {
        map.insert("case".into(), json!(index));
        if let Some(Value::Array(extra)) = map.remove("extra") {
            let obj: Map<String, Value> = extra
                .into_iter()
                .filter_map(|pair| match pair {
                    Value::Array(mut kv) if kv.len() == 2 => {
                        let val = kv.pop()?;
                        Some((kv.pop()?.as_str()?.to_string(), val))
                    }
                    _ => None,
                })
                .collect();
            map.insert("extra".into(), Value::Object(obj));
        }
    }
    v
}

pub fn run_verify(id: Identity, random: Option<usize>, seed: u64, tol: f64, payload: Option<&Value>) -> Outcome {
    let cases: Vec<CaseResult> = match (random, payload) {
        (Some(_), Some(_)) => return malformed("--random and --json are mutually exclusive"),
        (Some(n), None) => random_suite(id, n, seed, tol),
        (None, Some(p)) => vec![case_from_payload(id, p, tol)],
        (None, None) => fixed_cases(id, tol),
    };
    let mut any_failed = false;
    let mut any_error = false;
    let mut any_malformed = false;
    let values: Vec<Value> = cases
        .iter()
        .enumerate()
        .map(|(i, c)| match c {
            Ok(r) => {
                any_failed |= !r.pass;
                report_value(i, r)
            }
            Err(e) => {
                any_error = true;
                any_malformed |= matches!(e, Error::InvalidParams(_));
                let mut v = error_value(e);
                v["case"] = json!(i);
                v["name"] = json!(id.name());
                v
            }
        })
        .collect();
    let code = if any_failed {
        EXIT_FAILED
    } else if any_malformed && payload.is_some() {
        EXIT_MALFORMED
    } else if any_error {
        EXIT_DOMAIN
    } else {
        EXIT_OK
    };
    Outcome::json(&Value::Array(values), code)
}

// ---------------------------------------------------------------- JSON text

/// Pretty JSON with every floating-point number written to 17 significant
/// digits; non-finite numbers become `null`.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(v: Value) -> (Value, i32) {
        let o = run_eval(&v, DEFAULT_TOL);
        (serde_json::from_str(&o.stdout).unwrap(), o.code)
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(f64::NAN), "null");
        let s = to_json(&json!({"x": 1.0 / 3.0, "k": 3}));
        assert!(s.contains("3.3333333333333331e-1"), "{s}");
        assert!(s.contains("\"k\": 3"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn eval_examples() {
        let (v, code) =
            eval(json!({"m":1,"n":0,"p":1,"top":[2],"bottom":[0],"z":{"re":0.5,"im":0},"branch":"internal"}));
        assert_eq!(code, 0);
        assert!((v["value"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-14);
        assert!(v["psi"]["m"]["re"].as_f64().is_some());
        let (v, code) = eval(json!({"m":2,"n":0,"p":2,"top":[1,1],"bottom":[0,0],"z":{"re":0.25,"im":0}}));
        assert_eq!(code, 0);
        assert!((v["value"]["re"].as_f64().unwrap() - 4f64.ln()).abs() < 1e-7);
    }

    #[test]
    fn eval_errors() {
        let (v, code) = eval(json!({"m":1,"n":1,"p":2,"top":[0.9,1.4],"bottom":[0.3,0.7],"z":2.0}));
        assert_eq!(code, EXIT_DOMAIN);
        assert_eq!(v["error"], "on_branch_cut");
        let (_, code) = eval(json!({"m":1,"n":0,"p":2,"top":[2],"bottom":[0],"z":0.5}));
        assert_eq!(code, EXIT_MALFORMED);
        let (_, code) = eval(json!({"m":1,"n":0,"p":1,"top":[2],"bottom":[0]}));
        assert_eq!(code, EXIT_MALFORMED);
    }

    #[test]
    fn verify_exit_codes() {
        let o = run_verify(Identity::Lemma21, Some(5), 7, 1e-10, None);
        assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
        let bad = json!({"a":[2.0],"b":[1.5]});
        let o = run_verify(Identity::Thm51, None, 0, 1e-6, Some(&bad));
        assert_eq!(o.code, EXIT_DOMAIN, "{}", o.stdout);
        assert!(o.stdout.contains("precondition_failed"));
        let o = run_verify(Identity::Lemma21, None, 0, 1e-300, None);
        assert_eq!(o.code, EXIT_FAILED, "{}", o.stdout);
    }

    #[test]
    fn argument_errors_are_malformed() {
        assert_eq!(run_args(["balanced-g", "verify"]).code, EXIT_MALFORMED);
        assert_eq!(
            run_args(["balanced-g", "verify", "--identity", "nope"]).code,
            EXIT_MALFORMED
        );
        assert_eq!(
            run_args(["balanced-g", "eval", "--json", "/nonexistent.json"]).code,
            EXIT_MALFORMED
        );
        assert_eq!(
            run_args(["balanced-g", "verify", "--identity", "cor24", "--tol", "2"]).code,
            EXIT_MALFORMED
        );
    }
}
