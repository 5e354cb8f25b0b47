//! Command-line front end.
//!
//! Node indices are 1-based in everything the CLI prints; the library is
//! 0-based.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::asymptotics::{
    csr_decompose_with, csr_power, default_budget, nachtigall_expansion_with, normalize_to_unit,
    transient_and_period_with, transient_bound,
};
use crate::balancing::max_balance;
use crate::commuting::{boolean_saturation_pair, common_eigenvector, commutes, commuting_cycle_witness};
use crate::convert;
use crate::digraph::{digraph_of, is_irreducible, scc, threshold_spectrum, Digraph};
use crate::error::{Error, Result};
use crate::io::{parse_matrix_file, MatrixFile, Mode};
use crate::matrix::{MaxMatrix, MaxVector};
use crate::scalar::{parse_rational, Domain, MaxPlus, Rational, Scalar, DEFAULT_TOLERANCE};
use crate::scaling::{
    apply_scaling, fp_scaling, has_equal_row_col_maxima, hadamard_scaling_test, is_row_diagonally_dominant,
    row_col_maxima_scalings, sandwich_scalings, satisfies_sandwich, saturation_graph, strong_fp_scaling,
    DiagonalScaling, SandwichTriple,
};
use crate::spectral::{critical_graph, eigenspace_basis, max_cycle_gmean, principal_eigenvector, CycleMean};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MODE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "maxtimes", version, about = "Max-times matrix analysis: scalings, spectra and power asymptotics")]
pub struct Cli {
    /// Use exact rational arithmetic regardless of the file header
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Use floating point arithmetic regardless of the file header
    #[arg(long, global = true)]
    float: bool,
    /// Relative tolerance for float mode
    #[arg(long, global = true, value_name = "EPS")]
    tol: Option<f64>,
    /// Print one JSON document instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled scalings
    #[arg(long, global = true, value_name = "K")]
    seed: Option<u64>,
    /// Cap on power iterations
    #[arg(long, global = true, value_name = "T")]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Size, irreducibility, components and cycle mean
    Info { file: PathBuf },
    /// Kleene star A* = I ⊕ A ⊕ A² ⊕ …
    Star { file: PathBuf },
    /// Maximum cycle geometric mean, critical graph and eigenvectors
    Eigen { file: PathBuf },
    /// Diagonal similarity scalings
    Scale {
        #[arg(value_enum)]
        kind: ScaleKind,
        file: PathBuf,
    },
    /// Scalings with lower ≤ X⁻¹ middle X ≤ upper; files come in triples
    Sandwich {
        #[arg(required = true, num_args = 3..)]
        files: Vec<PathBuf>,
    },
    /// Diagonal dominance by scaling for a real (signed) matrix
    Hadamard { file: PathBuf },
    /// Transient and period of the normalized powers
    Powers {
        file: PathBuf,
        /// Also print A^t
        #[arg(long)]
        t: Option<usize>,
    },
    /// CSR decomposition of the powers
    Csr {
        file: PathBuf,
        /// Also print the reconstruction of A^t
        #[arg(long)]
        t: Option<usize>,
    },
    /// Nachtigall expansion of the powers
    Nachtigall { file: PathBuf },
    /// Transient bound from the first two expansion terms
    Bound { file: PathBuf },
    /// Commutation, common eigenvector and saturation digraphs
    Commute { a: PathBuf, b: PathBuf },
    /// Strongly connected components of threshold digraphs
    Threshold { file: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ScaleKind {
    Fp,
    Strong,
    Eig,
    Rowcol,
    Balance,
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Info { .. } => "info".into(),
            Command::Star { .. } => "star".into(),
            Command::Eigen { .. } => "eigen".into(),
            Command::Scale { kind, .. } => format!(
                "scale {}",
                kind.to_possible_value().expect("no skipped variants").get_name()
            ),
            Command::Sandwich { .. } => "sandwich".into(),
            Command::Hadamard { .. } => "hadamard".into(),
            Command::Powers { .. } => "powers".into(),
            Command::Csr { .. } => "csr".into(),
            Command::Nachtigall { .. } => "nachtigall".into(),
            Command::Bound { .. } => "bound".into(),
            Command::Commute { .. } => "commute".into(),
            Command::Threshold { .. } => "threshold".into(),
        }
    }

    fn files(&self) -> Vec<PathBuf> {
        match self {
            Command::Info { file }
            | Command::Star { file }
            | Command::Eigen { file }
            | Command::Scale { file, .. }
            | Command::Hadamard { file }
            | Command::Powers { file, .. }
            | Command::Csr { file, .. }
            | Command::Nachtigall { file }
            | Command::Bound { file }
            | Command::Threshold { file } => vec![file.clone()],
            Command::Sandwich { files } => files.clone(),
            Command::Commute { a, b } => vec![a.clone(), b.clone()],
        }
    }
}

/// What one invocation prints and returns.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoScaling { .. }
        | Error::Inapplicable(_)
        | Error::HadamardFails { .. }
        | Error::Divergent { .. }
        | Error::NotCommuting
        | Error::ZeroDiagonal { .. } => EXIT_NEGATIVE,
        Error::ExactnessUnavailable(_) | Error::PrecisionLoss(_) | Error::ModeMismatch { .. } => EXIT_MODE,
        _ => EXIT_USAGE,
    }
}

fn one_based(v: &[usize]) -> Value {
    Value::from(v.iter().map(|&i| i + 1).collect::<Vec<_>>())
}

fn error_json(e: &Error) -> Value {
    let (kind, extra) = match e {
        Error::DimensionMismatch(_) => ("DimensionMismatch", json!({})),
        Error::ModeMismatch { .. } => ("ModeMismatch", json!({})),
        Error::InvalidEntry { row, col } => ("InvalidEntry", json!({"row": row + 1, "col": col + 1})),
        Error::InvalidArgument(_) => ("InvalidArgument", json!({})),
        Error::Divergent { cycle } => ("Divergent", json!({"cycle": one_based(cycle)})),
        Error::UndefinedDivision { row, col } => {
            ("UndefinedDivision", json!({"row": row + 1, "col": col + 1}))
        }
        Error::NoConstraint { column } => ("NoConstraint", json!({"column": column + 1})),
        Error::PrecisionLoss(_) => ("PrecisionLoss", json!({})),
        Error::ExactnessUnavailable(_) => ("ExactnessUnavailable", json!({})),
        Error::NotIrreducible => ("NotIrreducible", json!({})),
        Error::AcyclicMatrix => ("AcyclicMatrix", json!({})),
        Error::NoScaling { cycle, .. } => ("NoScaling", json!({"cycle": one_based(cycle)})),
        Error::NotAnFpScaling => ("NotAnFpScaling", json!({})),
        Error::NotPositive => ("NotPositive", json!({})),
        Error::ZeroDiagonal { index } => ("ZeroDiagonal", json!({"index": index + 1})),
        Error::PatternViolation { triple, row, col, .. } => (
            "PatternViolation",
            json!({"triple": triple + 1, "row": row + 1, "col": col + 1}),
        ),
        Error::HadamardFails { cycle } => ("HadamardFails", json!({"cycle": one_based(cycle)})),
        Error::SizeLimit { n, limit } => ("SizeLimit", json!({"n": n, "limit": limit})),
        Error::IterationBudget { budget } => ("IterationBudget", json!({"budget": budget})),
        Error::NotNormalized => ("NotNormalized", json!({})),
        Error::NodeNotOnCycle { node } => ("NodeNotOnCycle", json!({"node": node + 1})),
        Error::CertificationFailure(_) => ("CertificationFailure", json!({})),
        Error::Inapplicable(_) => ("Inapplicable", json!({})),
        Error::NotCommuting => ("NotCommuting", json!({})),
        Error::OutDegreeZero { graph, node } => ("OutDegreeZero", json!({"graph": graph, "node": node + 1})),
        Error::WitnessNotFound(_) => ("WitnessNotFound", json!({})),
        Error::Parse { line, col, .. } => ("Parse", json!({"line": line, "col": col})),
    };
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::from(kind));
    obj.insert("message".into(), Value::from(message(e)));
    if let Value::Object(m) = extra {
        obj.extend(m);
    }
    Value::Object(obj)
}

/// Error text with node indices shifted to 1-based.
fn message(e: &Error) -> String {
    let cyc = |c: &[usize]| {
        c.iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join("→")
    };
    match e {
        Error::Divergent { cycle } => format!("Kleene star diverges: cycle {} has weight greater than 1", cyc(cycle)),
        Error::NoScaling { cycle, reason } => format!("no scaling exists: {reason} (cycle {})", cyc(cycle)),
        Error::HadamardFails { cycle } => format!("cyclic product condition fails on cycle {}", cyc(cycle)),
        Error::ZeroDiagonal { index } => format!("zero diagonal entry at index {}", index + 1),
        Error::InvalidEntry { row, col } => format!("invalid entry at ({}, {})", row + 1, col + 1),
        Error::UndefinedDivision { row, col } => {
            format!("undefined division at ({}, {}): positive entry over zero", row + 1, col + 1)
        }
        Error::NoConstraint { column } => format!("column {} of the left operand is zero", column + 1),
        Error::PatternViolation { triple, row, col, detail } => format!(
            "pattern violation in triple {} at ({}, {}): {detail}",
            triple + 1,
            row + 1,
            col + 1
        ),
        Error::NodeNotOnCycle { node } => format!("node {} does not lie on any cycle", node + 1),
        Error::OutDegreeZero { graph, node } => {
            format!("node {} of graph {graph} has out-degree zero", node + 1)
        }
        Error::ExactnessUnavailable(m) => format!("exact arithmetic unavailable: {m}; rerun with --float"),
        other => other.to_string(),
    }
}

struct Input {
    path: PathBuf,
    digest: String,
    file: MatrixFile,
}

struct Context {
    command: Command,
    inputs: Vec<Input>,
    tol: f64,
    seed: Option<u64>,
    budget: Option<usize>,
}

/// Structured result of a subcommand.
struct Answer {
    results: Map<String, Value>,
    warnings: Vec<String>,
    /// A negative mathematical answer, reported with its results.
    negative: Option<Error>,
}

impl Answer {
    fn new() -> Self {
        Answer {
            results: Map::new(),
            warnings: Vec::new(),
            negative: None,
        }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.into(), v.into());
    }
}

/// A carrier the CLI can run on, with its float counterpart for fallbacks.
trait Carrier: Scalar {
    type Float: Carrier;
    fn float_matrix(m: &MaxMatrix<Self>) -> MaxMatrix<Self::Float>;
}

impl Carrier for Rational {
    type Float = f64;
    fn float_matrix(m: &MaxMatrix<Self>) -> MaxMatrix<f64> {
        convert::to_float(m)
    }
}

impl Carrier for f64 {
    type Float = f64;
    fn float_matrix(m: &MaxMatrix<Self>) -> MaxMatrix<f64> {
        m.clone()
    }
}

impl Carrier for MaxPlus<Rational> {
    type Float = MaxPlus<f64>;
    fn float_matrix(m: &MaxMatrix<Self>) -> MaxMatrix<MaxPlus<f64>> {
        convert::to_float_max_plus(m)
    }
}

impl Carrier for MaxPlus<f64> {
    type Float = MaxPlus<f64>;
    fn float_matrix(m: &MaxMatrix<Self>) -> MaxMatrix<MaxPlus<f64>> {
        m.clone()
    }
}

fn f64_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn matrix_json<S: Scalar>(m: &MaxMatrix<S>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(Scalar::to_json).collect()))
            .collect(),
    )
}

fn vector_json<S: Scalar>(v: &MaxVector<S>) -> Value {
    Value::Array(v.as_slice().iter().map(Scalar::to_json).collect())
}

fn edges_json<W: Clone>(g: &Digraph<W>) -> Value {
    Value::Array(
        g.edge_pairs()
            .into_iter()
            .map(|(i, j)| json!([i + 1, j + 1]))
            .collect(),
    )
}

fn components_json(cs: &[Vec<usize>]) -> Value {
    Value::Array(cs.iter().map(|c| one_based(c)).collect())
}

fn lambda_json<S: Scalar>(l: &CycleMean<S>) -> Value {
    let value = l.value().map_or(Value::Null, |v| v.to_json());
    json!({
        "value": value,
        "cycle_weight": l.weight.to_json(),
        "cycle_length": l.length,
        "ln": f64_json(l.ln()),
        "witness": one_based(&l.witness),
    })
}

/// Rescales so that the smallest nonzero entry is 1.
fn min_one<S: Scalar>(x: &MaxVector<S>, tol: f64) -> MaxVector<S> {
    let min = x
        .as_slice()
        .iter()
        .filter(|v| !v.is_zero())
        .fold(None::<&S>, |m, v| match m {
            Some(m) if !v.cmp_tol(m, tol).is_lt() => Some(m),
            _ => Some(v),
        });
    match min {
        Some(m) => x.scale(&m.inv()),
        None => x.clone(),
    }
}

fn scaling_json<S: Scalar>(x: &DiagonalScaling<S>) -> Value {
    vector_json(x.vector())
}

impl Context {
    fn matrix<S: Scalar>(&self, k: usize) -> Result<MaxMatrix<S>> {
        Ok(self.inputs[k].file.matrix::<S>()?.with_tol(self.tol))
    }

    fn rng(&self) -> Option<ChaCha8Rng> {
        self.seed.map(ChaCha8Rng::seed_from_u64)
    }
}

fn execute<S: Carrier>(ctx: &Context) -> Result<Answer> {
    let mut ans = Answer::new();
    match &ctx.command {
        Command::Info { .. } => info::<S>(ctx, &mut ans)?,
        Command::Star { .. } => {
            let a = ctx.matrix::<S>(0)?;
            ans.put("star", matrix_json(&a.kleene_star()?));
        }
        Command::Eigen { .. } => eigen::<S>(ctx, &mut ans)?,
        Command::Scale { kind, .. } => scale::<S>(ctx, *kind, &mut ans)?,
        Command::Sandwich { .. } => sandwich::<S>(ctx, &mut ans)?,
        Command::Hadamard { .. } => unreachable!("dispatched separately"),
        Command::Powers { t, .. } => powers::<S>(ctx, *t, &mut ans)?,
        Command::Csr { t, .. } => csr::<S>(ctx, *t, &mut ans)?,
        Command::Nachtigall { .. } => nachtigall::<S>(ctx, &mut ans)?,
        Command::Bound { .. } => bound::<S>(ctx, &mut ans)?,
        Command::Commute { .. } => commute::<S>(ctx, &mut ans)?,
        Command::Threshold { .. } => {
            let a = ctx.matrix::<S>(0)?;
            let levels: Vec<Value> = threshold_spectrum(&a)
                .iter()
                .map(|(theta, dec)| {
                    let comps: Vec<Vec<usize>> = dec.nontrivial_components().cloned().collect();
                    json!({"theta": theta.to_json(), "components": components_json(&comps)})
                })
                .collect();
            ans.put("levels", levels);
        }
    }
    Ok(ans)
}

fn info<S: Carrier>(ctx: &Context, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let g = digraph_of(&a);
    let dec = scc(&g);
    ans.put("n", a.n());
    ans.put("edges", g.edge_count());
    ans.put("irreducible", is_irreducible(&a));
    ans.put("full_out_degree", (0..g.n()).all(|v| g.out_degree(v) > 0));
    ans.put("components", components_json(&dec.components));
    let lambda = max_cycle_gmean(&a)?;
    ans.put("lambda", lambda_json(&lambda));
    if !lambda.is_zero() {
        ans.put("cyclicity", critical_graph(&a)?.cyclicity);
    }
    Ok(())
}

fn eigen<S: Carrier>(ctx: &Context, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let lambda = max_cycle_gmean(&a)?;
    ans.put("lambda", lambda_json(&lambda));
    if lambda.is_zero() {
        ans.warnings.push("the digraph is acyclic: λ = 0 and there is no critical graph".into());
        return Ok(());
    }
    let crit = critical_graph(&a)?;
    ans.put(
        "critical",
        json!({
            "nodes": one_based(&crit.nodes),
            "edges": edges_json(&crit.edges),
            "components": components_json(&crit.components),
            "cyclicity": crit.cyclicity,
        }),
    );
    let basis = eigenspace_basis(&a)?;
    match principal_eigenvector(&a) {
        Ok(x) => ans.put("eigenvector", vector_json(&min_one(&x, ctx.tol))),
        Err(Error::NotIrreducible) => ans
            .warnings
            .push("matrix is reducible and has no positive eigenvector for λ".into()),
        Err(e) => return Err(e),
    }
    ans.put(
        "eigenspace_basis",
        Value::Array(basis.iter().map(|v| vector_json(&min_one(v, ctx.tol))).collect()),
    );
    Ok(())
}

fn scale<S: Carrier>(ctx: &Context, kind: ScaleKind, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    match kind {
        ScaleKind::Fp => {
            let x = fp_scaling(&a)?;
            ans.put("scaling", scaling_json(&x));
            ans.put("scaled", matrix_json(&apply_scaling(&a, &x)?));
            ans.put("saturation_edges", edges_json(&saturation_graph(&a, &x)?.graph));
        }
        ScaleKind::Strong => {
            let x = strong_fp_scaling(&a)?;
            ans.put("scaling", scaling_json(&x));
            ans.put("scaled", matrix_json(&apply_scaling(&a, &x)?));
        }
        ScaleKind::Eig => {
            if !is_irreducible(&a) {
                return Err(Error::NotIrreducible);
            }
            let lambda = max_cycle_gmean(&a)?;
            let x = DiagonalScaling::new(min_one(&principal_eigenvector(&a)?, ctx.tol))?;
            let scaled = apply_scaling(&a, &x)?;
            ans.put("lambda", lambda_json(&lambda));
            ans.put("scaling", scaling_json(&x));
            ans.put("scaled", matrix_json(&scaled));
            if let Some(l) = lambda.value() {
                ans.put("visualized", matrix_json(&scaled.scale(&l.inv())));
            }
        }
        ScaleKind::Rowcol => {
            let fam = row_col_maxima_scalings(&a)?;
            let x = fam.canonical();
            let b = apply_scaling(&a, &x)?;
            ans.put("constraints", matrix_json(&fam.q));
            ans.put("scaling", scaling_json(&x));
            ans.put("scaled", matrix_json(&b));
            ans.put("verified", has_equal_row_col_maxima(&b));
            if let Some(mut rng) = ctx.rng() {
                let y = fam.sample_random(&mut rng);
                ans.put(
                    "sample",
                    json!({
                        "scaling": scaling_json(&y),
                        "scaled": matrix_json(&apply_scaling(&a, &y)?),
                    }),
                );
            }
        }
        ScaleKind::Balance => match max_balance(&a) {
            Ok(cert) => balance_results(&cert, ans),
            Err(Error::ExactnessUnavailable(why)) if S::EXACT => {
                ans.warnings.push(format!(
                    "exact balancing unavailable ({why}); result computed in float mode"
                ));
                let f = S::float_matrix(&a).with_tol(DEFAULT_TOLERANCE);
                let cert = max_balance(&f)?;
                balance_results(&cert, ans);
                ans.put("mode_used", "float");
            }
            Err(e) => return Err(e),
        },
    }
    Ok(())
}

fn balance_results<S: Scalar>(cert: &crate::balancing::BalancingCertificate<S>, ans: &mut Answer) {
    ans.put("scaling", scaling_json(&cert.scaling));
    ans.put("balanced", matrix_json(&cert.balanced));
    ans.put(
        "checked",
        Value::Array(cert.checked.iter().map(|p| Value::from(p.name())).collect()),
    );
    ans.put(
        "levels",
        Value::Array(cert.levels.iter().map(Scalar::to_json).collect()),
    );
}

fn sandwich<S: Carrier>(ctx: &Context, ans: &mut Answer) -> Result<()> {
    if ctx.inputs.len() % 3 != 0 {
        return Err(Error::InvalidArgument(
            "sandwich takes files in triples: lower middle upper".into(),
        ));
    }
    let mut triples = Vec::new();
    for k in (0..ctx.inputs.len()).step_by(3) {
        triples.push(SandwichTriple {
            lower: ctx.matrix::<S>(k)?,
            middle: ctx.matrix::<S>(k + 1)?,
            upper: ctx.matrix::<S>(k + 2)?,
        });
    }
    let fam = sandwich_scalings(&triples)?;
    let x = fam.canonical();
    ans.put("constraints", matrix_json(&fam.q));
    ans.put("scaling", scaling_json(&x));
    ans.put(
        "scaled",
        Value::Array(
            triples
                .iter()
                .map(|t| apply_scaling(&t.middle, &x).map(|m| matrix_json(&m)))
                .collect::<Result<Vec<_>>>()?,
        ),
    );
    ans.put("verified", satisfies_sandwich(&triples, &x));
    if let Some(mut rng) = ctx.rng() {
        let y = fam.sample_random(&mut rng);
        ans.put(
            "sample",
            json!({"scaling": scaling_json(&y), "verified": satisfies_sandwich(&triples, &y)}),
        );
    }
    Ok(())
}

fn unsigned_zero(t: &str) -> &str {
    if t == "." {
        "0"
    } else {
        t
    }
}

fn hadamard(ctx: &Context, exact: bool) -> Result<Answer> {
    let file = &ctx.inputs[0].file;
    if file.header.domain != Domain::MaxTimes {
        return Err(Error::InvalidArgument(
            "hadamard expects a real matrix in a maxtimes file".into(),
        ));
    }
    let mut ans = Answer::new();
    if exact {
        let b = file.map_cells(|t| parse_rational(unsigned_zero(t)))?;
        let cert = hadamard_scaling_test::<Rational, Rational>(&b, ctx.tol)?;
        ans.put("scaling", scaling_json(&cert.scaling));
        ans.put("scaled_abs", matrix_json(&cert.scaled_abs));
        ans.put("dominant", is_row_diagonally_dominant(&cert.scaled_abs));
    } else {
        let b = file.map_cells(|t| {
            let t = unsigned_zero(t);
            let v = if t.contains('/') {
                num_traits::ToPrimitive::to_f64(&parse_rational(t)?).unwrap_or(f64::NAN)
            } else {
                t.parse::<f64>().map_err(|_| format!("not a number: `{t}`"))?
            };
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("entry `{t}` is not finite"))
            }
        })?;
        let cert = hadamard_scaling_test::<f64, f64>(&b, ctx.tol)?;
        ans.put("scaling", scaling_json(&cert.scaling));
        ans.put("scaled_abs", matrix_json(&cert.scaled_abs));
        ans.put("dominant", is_row_diagonally_dominant(&cert.scaled_abs));
    }
    Ok(ans)
}

fn powers<S: Carrier>(ctx: &Context, t: Option<usize>, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let (normalized, lambda) = normalize_to_unit(&a)?;
    let profile = transient_and_period_with(&normalized, ctx.budget)?;
    ans.put("lambda", lambda_json(&lambda));
    ans.put("transient", profile.transient);
    ans.put("period", profile.period);
    ans.put("predicted_period", profile.predicted_period);
    if let Some(t) = t {
        ans.put("power", matrix_json(&a.power(t)?));
    }
    Ok(())
}

fn csr<S: Carrier>(ctx: &Context, t: Option<usize>, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let triple = csr_decompose_with(&a, ctx.budget)?;
    let term = &triple.term;
    ans.put("lambda", lambda_json(&term.lambda));
    ans.put("scaling", scaling_json(&term.scaling));
    ans.put("gamma", term.gamma);
    ans.put("critical_nodes", one_based(&term.critical_nodes));
    ans.put("c", matrix_json(&term.c));
    ans.put("s", matrix_json(&term.s));
    ans.put("r", matrix_json(&term.r));
    ans.put("transient", triple.transient);
    ans.put("csr_onset", triple.csr_onset);
    ans.put("certified_until", triple.certified_until);
    if let Some(t) = t {
        ans.put("power", matrix_json(&csr_power(&triple, t)?));
    }
    Ok(())
}

fn nachtigall<S: Carrier>(ctx: &Context, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let e = nachtigall_expansion_with(&a, ctx.budget)?;
    let terms: Vec<Value> = e
        .terms
        .iter()
        .map(|t| {
            json!({
                "lambda": lambda_json(&t.lambda),
                "support": one_based(&t.critical_nodes),
                "gamma": t.gamma,
                "scaling": scaling_json(&t.scaling),
                "c": matrix_json(&t.c),
                "s": matrix_json(&t.s),
                "r": matrix_json(&t.r),
            })
        })
        .collect();
    let n = a.n();
    ans.put("terms", terms);
    ans.put("budget", e.budget);
    match e.validity_start {
        Some(v) => {
            ans.put("validity_start", v);
            ans.put("within_3n2", v <= 3 * n * n);
        }
        None => {
            ans.put("validity_start", Value::Null);
            ans.put("within_3n2", Value::Null);
            ans.warnings.push(format!(
                "expansion did not match the powers within the budget of {}",
                e.budget
            ));
        }
    }
    Ok(())
}

fn bound<S: Carrier>(ctx: &Context, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let b = transient_bound(&a)?;
    ans.put("bound", f64_json(b));
    let floor = b.ceil() as usize + 1;
    if is_irreducible(&a) {
        let (normalized, _) = normalize_to_unit(&a)?;
        let gamma = critical_graph(&normalized)?.cyclicity;
        let budget = ctx
            .budget
            .unwrap_or_else(|| default_budget(a.n(), gamma).max(floor));
        match transient_and_period_with(&normalized, Some(budget)) {
            Ok(p) => {
                ans.put("measured_by", "periodicity");
                ans.put("measured_transient", p.transient);
                ans.put("within_bound", p.transient as f64 <= b);
            }
            Err(Error::IterationBudget { budget }) => ans
                .warnings
                .push(format!("transient not found within the budget of {budget}")),
            Err(e) => return Err(e),
        }
    } else {
        // Reducible powers need not be periodic; measure the onset of the
        // expansion instead.
        let e = nachtigall_expansion_with(&a, Some(ctx.budget.unwrap_or(floor)))?;
        match e.validity_start {
            Some(t) => {
                ans.put("measured_by", "expansion");
                ans.put("measured_transient", t);
                ans.put("within_bound", t as f64 <= b);
            }
            None => ans
                .warnings
                .push(format!("expansion onset not found within the budget of {}", e.budget)),
        }
    }
    Ok(())
}

fn commute<S: Carrier>(ctx: &Context, ans: &mut Answer) -> Result<()> {
    let a = ctx.matrix::<S>(0)?;
    let b = ctx.matrix::<S>(1)?;
    let c = commutes(&a, &b)?;
    ans.put("commutes", c);
    if !c {
        ans.negative = Some(Error::NotCommuting);
        return Ok(());
    }
    let e = match common_eigenvector(&a, &b) {
        Ok(e) => e,
        Err(err @ (Error::NotIrreducible | Error::ExactnessUnavailable(_))) => {
            ans.warnings.push(format!("no common eigenvector reported: {}", message(&err)));
            return Ok(());
        }
        Err(err) => return Err(err),
    };
    let x = min_one(&e.x, ctx.tol);
    ans.put(
        "common_eigenvector",
        json!({"x": vector_json(&x), "lambda_a": e.lambda_a.to_json(), "lambda_b": e.lambda_b.to_json()}),
    );
    let pair = boolean_saturation_pair(&a, &b, &x)?;
    let mut sat = json!({
        "g1": edges_json(&pair.g1),
        "g2": edges_json(&pair.g2),
        "commuting": pair.commuting,
    });
    match commuting_cycle_witness(&pair) {
        Ok((c1, c2)) => {
            sat["cycle1"] = one_based(&c1);
            sat["cycle2"] = one_based(&c2);
        }
        Err(err) => ans.warnings.push(format!("no cycle witness: {}", message(&err))),
    }
    ans.put("saturation", sat);
    Ok(())
}

fn load(path: &PathBuf) -> Result<Input> {
    let bytes = std::fs::read(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Parse {
            line: 1,
            col: 1,
            msg: format!("{} is not UTF-8", path.display()),
        })?;
    let file = parse_matrix_file(&text).map_err(|e| match e {
        Error::Parse { line, col, msg } => Error::Parse {
            line,
            col,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })?;
    Ok(Input {
        path: path.clone(),
        digest: hex::encode(Sha256::digest(&bytes)),
        file,
    })
}

struct Report {
    command: String,
    argv: Vec<String>,
    inputs: Vec<Value>,
    domain: Option<Domain>,
    mode: Option<Mode>,
    tol: Option<f64>,
    answer: Option<Answer>,
    error: Option<Error>,
}

impl Report {
    fn code(&self) -> i32 {
        match (&self.error, self.answer.as_ref().and_then(|a| a.negative.as_ref())) {
            (Some(e), _) | (None, Some(e)) => exit_code(e),
            (None, None) => EXIT_OK,
        }
    }

    fn to_json(&self) -> Value {
        let code = self.code();
        let status = match code {
            EXIT_OK => "ok",
            EXIT_NEGATIVE => "negative",
            _ => "error",
        };
        let (results, warnings) = match &self.answer {
            Some(a) => (Value::Object(a.results.clone()), a.warnings.clone()),
            None => (Value::Object(Map::new()), Vec::new()),
        };
        let error = self
            .error
            .as_ref()
            .or_else(|| self.answer.as_ref().and_then(|a| a.negative.as_ref()))
            .map_or(Value::Null, error_json);
        json!({
            "command": self.command,
            "argv": self.argv,
            "inputs": self.inputs,
            "domain": self.domain.map(Domain::name),
            "mode": self.mode.map(Mode::name),
            "tolerance": self.tol.map(f64_json),
            "status": status,
            "exit_code": code,
            "results": results,
            "warnings": warnings,
            "error": error,
        })
    }

    fn to_text(&self) -> String {
        let v = self.to_json();
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        if let (Some(d), Some(m)) = (self.domain, self.mode) {
            let _ = writeln!(out, "domain: {} ({})", d.name(), m.name());
        }
        if let Value::Object(r) = &v["results"] {
            for (k, val) in r {
                render(&mut out, k, val, 0);
            }
        }
        if let Value::Object(e) = &v["error"] {
            let _ = writeln!(out, "{}: {}", e["kind"].as_str().unwrap_or("error"), e["message"].as_str().unwrap_or(""));
        }
        for w in v["warnings"].as_array().into_iter().flatten() {
            let _ = writeln!(out, "warning: {}", w.as_str().unwrap_or_default());
        }
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_matrix(v: &Value) -> bool {
    matches!(v, Value::Array(rows) if !rows.is_empty()
        && rows.iter().all(|r| matches!(r, Value::Array(c) if c.iter().all(|x| !x.is_array() && !x.is_object()))))
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, val) in m {
                render(out, k, val, depth + 1);
            }
        }
        Value::Array(items) if is_matrix(v) => {
            let rows: Vec<Vec<String>> = items
                .iter()
                .map(|r| r.as_array().into_iter().flatten().map(scalar_text).collect())
                .collect();
            let width = rows.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
            let _ = writeln!(out, "{pad}{key}:");
            for r in rows {
                let cells: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
                let _ = writeln!(out, "{pad}  {}", cells.join("  "));
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, item) in items.iter().enumerate() {
                render(out, &format!("[{}]", i + 1), item, depth + 1);
            }
        }
        Value::Array(items) => {
            let cells: Vec<String> = items
                .iter()
                .map(|x| match x {
                    Value::Array(_) => x.to_string(),
                    _ => scalar_text(x),
                })
                .collect();
            let _ = writeln!(out, "{pad}{key}: [{}]", cells.join(", "));
        }
        _ => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar_text(v));
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run_command<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_OK,
                },
                _ => Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_USAGE,
                },
            };
        }
    };
    let json = cli.json;
    let report = build_report(cli, &args);
    let code = report.code();
    if json {
        let text = serde_json::to_string_pretty(&report.to_json()).expect("serializable") + "\n";
        Outcome {
            stdout: text,
            stderr: String::new(),
            code,
        }
    } else if report.error.is_some() {
        Outcome {
            stdout: String::new(),
            stderr: report.to_text(),
            code,
        }
    } else {
        Outcome {
            stdout: report.to_text(),
            stderr: String::new(),
            code,
        }
    }
}

fn build_report(cli: Cli, args: &[OsString]) -> Report {
    let mut report = Report {
        command: cli.command.name(),
        argv: args
            .iter()
            .skip(1)
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        inputs: Vec::new(),
        domain: None,
        mode: None,
        tol: None,
        answer: None,
        error: None,
    };
    let mut inputs = Vec::new();
    for path in cli.command.files() {
        match load(&path) {
            Ok(i) => {
                report.inputs.push(json!({
                    "path": i.path.to_string_lossy(),
                    "sha256": i.digest,
                }));
                inputs.push(i);
            }
            Err(e) => {
                report.error = Some(e);
                return report;
            }
        }
    }
    let header = inputs[0].file.header;
    if let Some(other) = inputs.iter().find(|i| i.file.header.domain != header.domain) {
        report.error = Some(Error::InvalidArgument(format!(
            "{} is in the {} domain, expected {}",
            other.path.display(),
            other.file.header.domain.name(),
            header.domain.name()
        )));
        return report;
    }
    let mode = if cli.exact {
        Mode::Exact
    } else if cli.float {
        Mode::Float
    } else {
        header.mode
    };
    let mut warnings = Vec::new();
    if !cli.exact && !cli.float && inputs.iter().any(|i| i.file.header.mode != mode) {
        warnings.push(format!("files declare different modes; using {}", mode.name()));
    }
    let tol = match mode {
        Mode::Exact => 0.0,
        Mode::Float => cli.tol.unwrap_or(DEFAULT_TOLERANCE),
    };
    if mode == Mode::Exact && cli.tol.is_some() {
        warnings.push("--tol has no effect in exact mode".into());
    }
    if mode == Mode::Float {
        warnings.push(format!("float mode: comparisons use relative tolerance {tol:e}"));
        report.tol = Some(tol);
    }
    report.domain = Some(header.domain);
    report.mode = Some(mode);
    let ctx = Context {
        command: cli.command,
        inputs,
        tol,
        seed: cli.seed,
        budget: cli.budget,
    };
    let result = if matches!(ctx.command, Command::Hadamard { .. }) {
        hadamard(&ctx, mode == Mode::Exact)
    } else {
        match (header.domain, mode) {
            (Domain::MaxTimes, Mode::Exact) => execute::<Rational>(&ctx),
            (Domain::MaxTimes, Mode::Float) => execute::<f64>(&ctx),
            (Domain::MaxPlus, Mode::Exact) => execute::<MaxPlus<Rational>>(&ctx),
            (Domain::MaxPlus, Mode::Float) => execute::<MaxPlus<f64>>(&ctx),
        }
    };
    match result {
        Ok(mut ans) => {
            warnings.append(&mut ans.warnings);
            ans.warnings = warnings;
            report.answer = Some(ans);
        }
        Err(e) => {
            report.answer = Some(Answer {
                results: Map::new(),
                warnings,
                negative: None,
            });
            report.error = Some(e);
        }
    }
    report
}
