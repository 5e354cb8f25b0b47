//! Golden-file cases for the command-line tool.
//!
//! Each directory under `tests/golden` holds the input files, a `cmd` file
//! with the arguments (run with `--json` from inside the directory) and the
//! expected report in `expected.json`.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

/// Relative tolerance for floating-point fields such as `ln`.
pub const FLOAT_TOL: f64 = 1e-12;

pub struct Case {
    pub name: String,
    pub dir: PathBuf,
    pub args: Vec<String>,
}

pub fn golden_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn cases() -> Vec<Case> {
    let mut out: Vec<Case> = std::fs::read_dir(golden_root())
        .expect("golden directory")
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| {
            let dir = e.path();
            let cmd = std::fs::read_to_string(dir.join("cmd")).expect("cmd file");
            Case {
                name: e.file_name().to_string_lossy().into_owned(),
                args: cmd.split_whitespace().map(String::from).collect(),
                dir,
            }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name));
    out
}

/// Runs the binary in `dir`; returns stdout, stderr and the exit code.
pub fn run_in(dir: &Path, args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_maxtimes"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn maxtimes");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code().unwrap_or(-1),
    )
}

pub fn run_case(case: &Case) -> (Value, i32) {
    let mut args = vec!["--json"];
    args.extend(case.args.iter().map(String::as_str));
    let (stdout, stderr, code) = run_in(&case.dir, &args);
    let v = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("{}: invalid JSON ({e}); stderr: {stderr}", case.name));
    (v, code)
}

pub fn expected(case: &Case) -> Value {
    let text = std::fs::read_to_string(case.dir.join("expected.json")).expect("expected.json");
    serde_json::from_str(&text).expect("expected.json parses")
}

/// Structural equality with a relative tolerance on floats. Returns the
/// JSON path of the first difference.
pub fn json_diff(a: &Value, b: &Value, path: &str) -> Option<String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let scale = x.abs().max(y.abs()).max(1.0);
            ((x - y).abs() > FLOAT_TOL * scale).then(|| format!("{path}: {x} vs {y}"))
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!("{path}: length {} vs {}", x.len(), y.len()));
            }
            x.iter()
                .zip(y)
                .enumerate()
                .find_map(|(i, (p, q))| json_diff(p, q, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            if kx != ky {
                return Some(format!("{path}: keys {kx:?} vs {ky:?}"));
            }
            x.iter()
                .find_map(|(k, v)| json_diff(v, &y[k], &format!("{path}.{k}")))
        }
        _ => (a != b).then(|| format!("{path}: {a} vs {b}")),
    }
}

pub fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file")).expect("schema parses")
}

pub fn validator() -> jsonschema::Validator {
    jsonschema::validator_for(&schema()).expect("schema compiles")
}

/// Schema violations of a report, as messages.
pub fn schema_errors(v: &jsonschema::Validator, report: &Value) -> Vec<String> {
    v.iter_errors(report)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect()
}

/// Runs one case and checks report, exit code and schema.
pub fn check_case(case: &Case, v: &jsonschema::Validator) -> Result<(), String> {
    let (got, code) = run_case(case);
    let want = expected(case);
    if let Some(d) = json_diff(&got, &want, "$") {
        return Err(format!("{}: report differs at {d}", case.name));
    }
    if Some(code as i64) != want["exit_code"].as_i64() {
        return Err(format!("{}: exit code {code}", case.name));
    }
    let errs = schema_errors(v, &got);
    if !errs.is_empty() {
        return Err(format!("{}: schema violations {errs:?}", case.name));
    }
    Ok(())
}
