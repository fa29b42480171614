//! Subcommand grammar, dispatch and exit codes.

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use influence_core::choi::{reconstruct_operator, state_eval, KrausSet};
use influence_core::cones::{
    decomposable_sum_membership, extremality_probe, is_popt, is_ppt, Certificate, ConeVerdict, DykstraConfig,
    ExtremalityConfig, ExtremalityVerdict, PoptConfig, SeesawConfig, Witness,
};
use influence_core::coupling::{backward_tests, forward_tests, fns_tests, InfluenceVerdict, Side, Stage, DEFAULT_TWO_STAGE_CAP};
use influence_core::linalg::{vector, ComplexMatrix};
use influence_core::teleport::{self, weyl};
use influence_core::test_space::StateViolation;
use influence_core::{DEFAULT_FEAS_TOL, DEFAULT_TOL};
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::acceptance;
use crate::documents::{
    map_from, vector_json, ApplyDocument, CorollaryDocument, DocResult, DocumentError, JointDocument, MatrixDocument,
    Space, StateDocument,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "influence", version, about = "Checks for influence-free states, Choi maps and product-positive operators")]
pub struct Cli {
    /// Eigenvalue and equality tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Residual bound for feasibility verdicts.
    #[arg(long = "feas-tol", global = true, default_value_t = DEFAULT_FEAS_TOL)]
    pub feas_tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Input {
    /// JSON input file; standard input when absent or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PivotSide {
    Alice,
    Bob,
    General,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    Alice,
    Bob,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is a table a state (or E-state) on its test space?
    VerifyState(Input),
    /// Influence-freeness of a joint table, with the worst signalling witness.
    InfluenceFree(Input),
    /// Forward and backward two-stage tests, and whether the table is a state on them.
    FnsTests {
        #[command(flatten)]
        input: Input,
        /// Cap on the number of two-stage tests.
        #[arg(long, default_value_t = DEFAULT_TWO_STAGE_CAP)]
        cap: u128,
    },
    /// Conditional state on the far side given one outcome.
    Condition {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "alice")]
        side: SideArg,
        /// Outcome label on `side`.
        #[arg(long)]
        outcome: String,
    },
    /// Mixture and operational Bayes residuals.
    BayesCheck(Input),
    /// Rebuilds an operator from its product-state values.
    Reconstruct {
        #[command(flatten)]
        input: Input,
        /// Use the evaluator |<x|y>|^2 on C^n ⊗ C^n instead of an input operator.
        #[arg(long)]
        overlap: Option<usize>,
    },
    /// Choi operator of `X ↦ Σ A_k X A_k^†` from a list of matrices.
    Choi(Input),
    /// Applies a map given by its Choi operator.
    ApplyMap(Input),
    /// Kraus operators of a CP map.
    Kraus(Input),
    CpCheck(Input),
    CoCpCheck(Input),
    PptCheck(Input),
    /// Product-positivity of a bipartite operator.
    Popt {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Membership in PSD + PSD^Γ.
    Decompose(Input),
    /// Whether a co-CP part splits off the map X ↦ A X A^†.
    Extremality(Input),
    /// Teleportation pivot identities for W on subsystem 1.
    Pivot {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "alice")]
        side: PivotSide,
        /// Weyl index `a,b` of V = X^a Z^b for `--side general`.
        #[arg(long, value_parser = parse_pair)]
        weyl: Option<(usize, usize)>,
    },
    /// Tr((T ⊗ B)(W ⊗ T)) against α Tr(W B).
    Corollary(Input),
    /// Product-test negativity of S/n on subsystem 1 times T on subsystem 2.
    WitnessDemo {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs the acceptance suite.
    Selftest,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

/// A verdict document and its exit code.
struct Report {
    code: i32,
    body: Map<String, Value>,
}

impl Report {
    fn new(verdict: &str, code: i32) -> Self {
        let mut body = Map::new();
        body.insert("verdict".into(), json!(verdict));
        Self { code, body }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body.insert(key.into(), value);
        self
    }
}

fn read_input<T: DeserializeOwned>(input: &Input) -> DocResult<T> {
    let text = match &input.input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| DocumentError::Invalid(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| DocumentError::Invalid(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn matrix_json(m: &ComplexMatrix, dims: Option<&[usize]>) -> Value {
    serde_json::to_value(MatrixDocument::from_matrix(m, dims.map(<[usize]>::to_vec))).expect("serializable")
}

fn config(cli: &Cli) -> Value {
    json!({ "tol": cli.tol, "feas_tol": cli.feas_tol })
}

fn witness_json(w: &Witness, dims: &[usize]) -> Value {
    match w {
        Witness::Eigenvector { vector, eigenvalue } => {
            json!({ "kind": "eigenvector", "vector": vector_json(vector), "eigenvalue": eigenvalue })
        }
        Witness::ProductPair { x, y, value } => {
            json!({ "kind": "product-pair", "x": vector_json(x), "y": vector_json(y), "value": value })
        }
        Witness::Separating { z, value } => {
            json!({ "kind": "separating", "z": matrix_json(z.matrix(), Some(dims)), "value": value })
        }
        Witness::Stall { gap } => json!({ "kind": "stall", "gap": matrix_json(gap.matrix(), Some(dims)) }),
    }
}

/// Member / refuted / inconclusive with the given verdict names.
fn cone_report(v: &ConeVerdict, dims: &[usize], names: [&str; 3]) -> Report {
    match v {
        ConeVerdict::Member { certificate, residual } => {
            let mut r = Report::new(names[0], EXIT_OK).with("residual", json!(residual));
            if let Certificate::Decomposition(c) = certificate {
                r = r.with(
                    "certificate",
                    json!({
                        "p": matrix_json(c.p.matrix(), Some(dims)),
                        "q": matrix_json(c.q.matrix(), Some(dims)),
                        "residual": c.residual,
                    }),
                );
            }
            r
        }
        ConeVerdict::Refuted { witness, residual } => Report::new(names[1], EXIT_NEGATIVE)
            .with("residual", json!(residual))
            .with("witness", witness_json(witness, dims)),
        ConeVerdict::Likely { min_value } => Report::new(names[2], EXIT_INCONCLUSIVE).with("min_value", json!(min_value)),
        ConeVerdict::Inconclusive { residual } => {
            Report::new(names[2], EXIT_INCONCLUSIVE).with("residual", json!(residual))
        }
    }
}

fn labelled(labels: &[String], values: &[f64]) -> Value {
    Value::Array(
        labels
            .iter()
            .zip(values)
            .map(|(l, v)| json!({ "outcome": l, "value": v }))
            .collect(),
    )
}

fn execute(cli: &Cli) -> DocResult<Report> {
    let tol = cli.tol;
    let report = match &cli.command {
        Command::VerifyState(input) => {
            let doc: StateDocument = read_input(input)?;
            match doc.space.to_space()? {
                Space::Plain(ts) => {
                    let pairs: Vec<(&str, f64)> = doc.values.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                    let f = ts.table(&pairs)?;
                    match ts.state_violation(&f, tol)? {
                        None => Report::new("state", EXIT_OK),
                        Some(StateViolation::OutOfRange { outcome, value }) => Report::new("not-state", EXIT_NEGATIVE)
                            .with("reason", json!(format!("outcome `{}` has value {value}", ts.label(outcome))))
                            .with("witness", json!({ "outcome": ts.label(outcome), "value": value })),
                        Some(StateViolation::TestSum { test, sum }) => {
                            let labels: Vec<&str> = ts.test(test)?.iter().map(|&i| ts.label(i)).collect();
                            Report::new("not-state", EXIT_NEGATIVE)
                                .with("reason", json!(format!("test {test} sums to {sum}")))
                                .with("witness", json!({ "test": test, "outcomes": labels, "sum": sum }))
                        }
                    }
                }
                Space::Weighted(es) => {
                    let mut f = vec![0.0; es.outcomes().len()];
                    for (k, v) in &doc.values {
                        f[es.outcome_index(k)?] = *v;
                    }
                    if es.is_estate(&f, tol)? {
                        Report::new("state", EXIT_OK)
                    } else {
                        Report::new("not-state", EXIT_NEGATIVE).with("reason", json!("an E-test does not sum to 1"))
                    }
                }
            }
        }
        Command::InfluenceFree(input) => {
            let s = read_input::<JointDocument>(input)?.to_state(tol)?;
            match s.is_influence_free(tol) {
                InfluenceVerdict::Free { deviation } => Report::new("influence-free", EXIT_OK).with("residual", json!(deviation)),
                InfluenceVerdict::Signalling(sig) => {
                    let (from, to) = match sig.direction {
                        influence_core::coupling::Direction::AliceToBob => ("alice", s.bob()),
                        influence_core::coupling::Direction::BobToAlice => ("bob", s.alice()),
                    };
                    Report::new("signalling", EXIT_NEGATIVE).with("residual", json!(sig.deviation)).with(
                        "witness",
                        json!({
                            "from": from,
                            "tests": [sig.tests.0, sig.tests.1],
                            "outcome": to.label(sig.outcome),
                            "deviation": sig.deviation,
                        }),
                    )
                }
            }
        }
        Command::FnsTests { input, cap } => {
            let s = read_input::<JointDocument>(input)?.to_state(tol)?;
            let tests = fns_tests(s.alice(), s.bob(), *cap)?;
            let counts = json!({
                "forward": forward_tests(s.alice(), s.bob(), *cap)?.len(),
                "backward": backward_tests(s.alice(), s.bob(), *cap)?.len(),
                "distinct": tests.len(),
            });
            let failing = tests.iter().find(|t| (s.sum_over(t.outcomes()) - 1.0).abs() > tol);
            match failing {
                None => Report::new("state-on-fns", EXIT_OK).with("tests", counts),
                Some(t) => {
                    let pairs: Vec<Value> = t
                        .outcomes()
                        .iter()
                        .map(|&(x, y)| json!([s.alice().label(x), s.bob().label(y)]))
                        .collect();
                    let stage = if t.direction == Stage::Forward { "forward" } else { "backward" };
                    let sum = s.sum_over(t.outcomes());
                    Report::new("not-state-on-fns", EXIT_NEGATIVE)
                        .with("tests", counts)
                        .with("reason", json!(format!("{stage} two-stage test sums to {sum}")))
                        .with("witness", json!({ "stage": stage, "outcomes": pairs, "sum": sum }))
                }
            }
        }
        Command::Condition { input, side, outcome } => {
            let s = read_input::<JointDocument>(input)?.to_state(tol)?;
            let (side, near, far) = match side {
                SideArg::Alice => (Side::Alice, s.alice(), s.bob()),
                SideArg::Bob => (Side::Bob, s.bob(), s.alice()),
            };
            let state = s.condition_on(side, near.outcome_index(outcome)?)?;
            Report::new("conditioned", EXIT_OK).with("state", labelled(far.outcomes(), &state))
        }
        Command::BayesCheck(input) => {
            let s = read_input::<JointDocument>(input)?.to_state(tol)?;
            let mut mixture: f64 = 0.0;
            for t in 0..s.alice().tests().len() {
                mixture = mixture.max(s.bayes_mixture_check(t)?);
            }
            let mut operational: f64 = 0.0;
            let wa = s.marginal(Side::Alice, 0)?;
            let wb = s.marginal(Side::Bob, 0)?;
            for a in 0..wa.len() {
                for b in 0..wb.len() {
                    if wa[a] > s.tolerance() && wb[b] > s.tolerance() {
                        operational = operational.max(s.operational_bayes_check(a, b)?);
                    }
                }
            }
            let worst = mixture.max(operational);
            let (v, c) = if worst <= tol { ("consistent", EXIT_OK) } else { ("inconsistent", EXIT_NEGATIVE) };
            Report::new(v, c)
                .with("residual", json!(worst))
                .with("mixture_residual", json!(mixture))
                .with("operational_residual", json!(operational))
        }
        Command::Reconstruct { input, overlap } => {
            let (w, dims) = match overlap {
                Some(n) => {
                    let got = reconstruct_operator(|x, y| vector::inner(x, y).norm_sqr(), *n, *n, cli.feas_tol)?;
                    (got, vec![*n, *n])
                }
                None => {
                    let doc: MatrixDocument = read_input(input)?;
                    let (op, shape) = doc.bipartite()?;
                    let d = shape.dims().to_vec();
                    let got = reconstruct_operator(
                        |x, y| state_eval(&op, &shape, x, y).unwrap_or(f64::NAN),
                        d[0],
                        d[1],
                        cli.feas_tol,
                    )?;
                    let gap = got.matrix().frobenius_distance(op.matrix());
                    return Ok(Report::new("reconstructed", EXIT_OK)
                        .with("residual", json!(gap))
                        .with("operator", matrix_json(got.matrix(), Some(&d)))
                        .with("config", config(cli)));
                }
            };
            Report::new("reconstructed", EXIT_OK).with("operator", matrix_json(w.matrix(), Some(&dims)))
        }
        Command::Choi(input) => {
            let docs: Vec<MatrixDocument> = read_input(input)?;
            let ops: DocResult<Vec<ComplexMatrix>> = docs.iter().map(MatrixDocument::to_matrix).collect();
            let ops = ops?;
            let first = ops.first().ok_or_else(|| DocumentError::Invalid("empty operator list".into()))?;
            let (dout, din) = (first.rows(), first.cols());
            if ops.iter().any(|a| a.rows() != dout || a.cols() != din) {
                return Err(DocumentError::Invalid("operators differ in size".into()));
            }
            let map = KrausSet { operators: ops, din, dout }.to_map()?;
            Report::new("choi", EXIT_OK).with("choi", matrix_json(map.choi().matrix(), Some(&[din, dout])))
        }
        Command::ApplyMap(input) => {
            let doc: ApplyDocument = read_input(input)?;
            let map = map_from(&doc.choi)?;
            let out = map.apply(&doc.input.to_matrix()?)?;
            Report::new("applied", EXIT_OK).with("output", matrix_json(&out, None))
        }
        Command::Kraus(input) => {
            let map = map_from(&read_input(input)?)?;
            match map.hk_representation(tol) {
                Ok(k) => {
                    let err = k.reconstruction_error(&map);
                    let ops: Vec<Value> = k.operators.iter().map(|a| matrix_json(a, None)).collect();
                    Report::new("cp", EXIT_OK).with("residual", json!(err)).with("certificate", json!(ops))
                }
                Err(influence_core::Error::NotCompletelyPositive { .. }) => {
                    cone_report(&map.is_cp(tol), &[map.din(), map.dout()], ["cp", "not-cp", "inconclusive"])
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::CpCheck(input) => {
            let map = map_from(&read_input(input)?)?;
            cone_report(&map.is_cp(tol), &[map.din(), map.dout()], ["cp", "not-cp", "inconclusive"])
        }
        Command::CoCpCheck(input) => {
            let map = map_from(&read_input(input)?)?;
            cone_report(&map.is_co_cp(tol), &[map.din(), map.dout()], ["co-cp", "not-co-cp", "inconclusive"])
        }
        Command::PptCheck(input) => {
            let (op, shape) = read_input::<MatrixDocument>(input)?.bipartite()?;
            cone_report(&is_ppt(&op, &shape, tol)?, shape.dims(), ["ppt", "not-ppt", "inconclusive"])
        }
        Command::Popt { input, seed, restarts } => {
            let (op, shape) = read_input::<MatrixDocument>(input)?.bipartite()?;
            let cfg = PoptConfig {
                tol,
                feas_tol: cli.feas_tol,
                seesaw: SeesawConfig {
                    restarts: *restarts,
                    ..SeesawConfig::new(*seed)
                },
                ..PoptConfig::new(*seed)
            };
            let v = is_popt(&op, &shape, &cfg)?;
            let via = match &v.verdict {
                ConeVerdict::Member { certificate, .. } => json!(match certificate {
                    Certificate::Psd { .. } => "psd",
                    Certificate::PartialTranspose { .. } => "ppt",
                    Certificate::Decomposition(_) => "decomposition",
                }),
                _ => Value::Null,
            };
            cone_report(&v.verdict, shape.dims(), ["certified-popt", "refuted-popt", "likely-popt"])
                .with("psd", json!(v.psd))
                .with("exact", json!(v.exact))
                .with("via", via)
                .with("min_value", json!(v.seesaw.min_value))
                .with("config", json!({ "tol": tol, "feas_tol": cli.feas_tol, "seed": seed, "restarts": restarts }))
        }
        Command::Decompose(input) => {
            let (op, shape) = read_input::<MatrixDocument>(input)?.bipartite()?;
            let cfg = DykstraConfig {
                tol,
                feas_tol: cli.feas_tol,
                ..DykstraConfig::default()
            };
            let out = decomposable_sum_membership(&op, &shape, &cfg)?;
            cone_report(&out.verdict, shape.dims(), ["decomposable", "not-decomposable", "inconclusive"])
                .with("iterations", json!(out.iterations))
        }
        Command::Extremality(input) => {
            let a = read_input::<MatrixDocument>(input)?.to_matrix()?;
            let cfg = ExtremalityConfig {
                tol,
                feas_tol: cli.feas_tol,
                ..ExtremalityConfig::default()
            };
            let n = a.rows();
            match extremality_probe(&a, &cfg)? {
                ExtremalityVerdict::Rigid {
                    residual,
                    iterations,
                    certificate,
                } => {
                    let cert = certificate.map(|c| {
                        json!({ "z2": matrix_json(c.z2.matrix(), Some(&[n, n])), "s": c.s, "value": c.value })
                    });
                    Report::new("rigid", EXIT_OK)
                        .with("residual", json!(residual))
                        .with("iterations", json!(iterations))
                        .with("certificate", cert.unwrap_or(Value::Null))
                }
                ExtremalityVerdict::DecomposableNontrivially { eta, residual, iterations } => {
                    Report::new("decomposable-nontrivially", EXIT_NEGATIVE)
                        .with("residual", json!(residual))
                        .with("iterations", json!(iterations))
                        .with("witness", matrix_json(eta.choi().matrix(), Some(&[n, n])))
                }
                ExtremalityVerdict::Inconclusive { residual, iterations } => Report::new("inconclusive", EXIT_INCONCLUSIVE)
                    .with("residual", json!(residual))
                    .with("iterations", json!(iterations)),
            }
        }
        Command::Pivot { input, side, weyl: index } => {
            let doc: MatrixDocument = read_input(input)?;
            let (w, shape) = doc.bipartite()?;
            let n = shape.dims()[0];
            if shape.dims()[1] != n {
                return Err(DocumentError::Invalid("pivot needs W on C^n ⊗ C^n".into()));
            }
            let bound = tol * w.frobenius_norm().max(1.0);
            match side {
                PivotSide::Alice | PivotSide::Bob => {
                    let rep = if matches!(side, PivotSide::Alice) {
                        teleport::pivot_alice(&w, n)?
                    } else {
                        teleport::pivot_bob(&w, n)?
                    };
                    let holds = rep.frobenius_gap <= bound;
                    Report::new(
                        if holds { "identity-holds" } else { "identity-fails" },
                        if holds { EXIT_OK } else { EXIT_NEGATIVE },
                    )
                    .with("alpha", json!(rep.alpha))
                    .with("pivot_factor", json!(rep.pivot_factor))
                    .with("residual", json!(rep.frobenius_gap))
                }
                PivotSide::General => {
                    let (a, b) = index.ok_or_else(|| DocumentError::Invalid("`--side general` needs `--weyl a,b`".into()))?;
                    if a >= n || b >= n {
                        return Err(DocumentError::Invalid(format!("Weyl index ({a},{b}) out of range for n = {n}")));
                    }
                    let g = teleport::pivot_general(&w, n, &weyl(n, a, b))?;
                    let holds = g.gap <= tol;
                    Report::new(
                        if holds { "identity-holds" } else { "identity-fails" },
                        if holds { EXIT_OK } else { EXIT_NEGATIVE },
                    )
                    .with("alpha", json!(g.alpha))
                    .with("factor", json!(g.factor))
                    .with("residual", json!(g.gap))
                    .with("adjoint_residual", json!(g.adjoint_gap))
                    .with("alice_t_residual", json!(g.alice_t_gap))
                    .with("alice_tv_residual", json!(g.alice_tv_gap))
                    .with("bob_operator", matrix_json(g.bob_operator.matrix(), Some(&[n, n])))
                }
            }
        }
        Command::Corollary(input) => {
            let doc: CorollaryDocument = read_input(input)?;
            let (w, shape) = doc.w.bipartite()?;
            let b = doc.b.to_operator()?;
            let (lhs, rhs) = teleport::corollary_check(&w, &b, shape.dims()[0])?;
            let holds = (lhs - rhs).abs() <= tol.max(1e-10);
            Report::new(
                if holds { "identity-holds" } else { "identity-fails" },
                if holds { EXIT_OK } else { EXIT_NEGATIVE },
            )
            .with("lhs", json!(lhs))
            .with("rhs", json!(rhs))
            .with("negative", json!(lhs < -tol))
            .with("residual", json!((lhs - rhs).abs()))
        }
        Command::WitnessDemo { n, seed } => {
            if *n < 2 {
                return Err(DocumentError::Invalid("`--n` must be at least 2".into()));
            }
            let rep = teleport::desideratum_violation_demo(*n, *seed)?;
            let negative = rep.witness.value < -tol;
            Report::new(
                if negative { "product-negative" } else { "no-violation" },
                if negative { EXIT_OK } else { EXIT_NEGATIVE },
            )
            .with("psd", json!(rep.w_psd))
            .with("popt_certified", json!(rep.w_popt_certified))
            .with("alpha", json!(rep.alpha))
            .with("min_value", json!(rep.witness.value))
            .with("predicted", json!(rep.predicted))
            .with("product_state_min", json!(rep.product_state_min))
            .with(
                "witness",
                json!({
                    "weyl": [rep.witness.weyl_index / n, rep.witness.weyl_index % n],
                    "bob_effect": rep.witness.effect_index,
                    "value": rep.witness.value,
                }),
            )
            .with("config", json!({ "tol": tol, "seed": seed }))
        }
        Command::Selftest => {
            let results = acceptance::run_all();
            let all = results.iter().all(|o| o.passed);
            let lines: Vec<Value> = results
                .iter()
                .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail }))
                .collect();
            Report::new(if all { "pass" } else { "fail" }, if all { EXIT_OK } else { EXIT_NEGATIVE })
                .with("criteria", json!(lines))
        }
    };
    Ok(if report.body.contains_key("config") {
        report
    } else {
        report.with("config", config(cli))
    })
}

/// Parses `args`, runs the subcommand, prints one JSON document and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    run_with(args, &mut out)
}

pub fn run_with<I, T>(args: I, out: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let reason = e.to_string().lines().next().unwrap_or("usage error").to_string();
            emit(out, &json!({ "verdict": "error", "kind": "usage", "reason": reason }));
            return EXIT_USAGE;
        }
    };
    match execute(&cli) {
        Ok(r) => {
            emit(out, &Value::Object(r.body));
            r.code
        }
        Err(e) => {
            emit(out, &json!({ "verdict": "error", "kind": "malformed-input", "reason": e.to_string() }));
            EXIT_DATA
        }
    }
}

fn emit(out: &mut dyn std::io::Write, v: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
}
