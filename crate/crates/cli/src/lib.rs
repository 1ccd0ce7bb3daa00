//! `qchlab` command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when checks ran and one failed,
//! 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qchlab::algebra::{af_filtration_check, central_blocks, check_ck_family, ck_to_channels, generate_algebra, kraus_choice_invariance};
use qchlab::circuit::{circuit_to_qch, parse_circuit};
use qchlab::format::{load_ck_family, load_qch, to_canonical_json, AlgebraSummary, QchFile};
use qchlab::qch::{validate_qch, verify_all, VerifyOptions};
use qchlab::{Check, Error, QchInstance, Report, Tolerances};
use serde_json::{json, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qchlab", version, about = "Verify quantum causal histories and their generated algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Tolerance for matrix and map equality.
    #[arg(long, global = true, default_value_t = qchlab::tolerance::EQ, value_parser = positive)]
    pub tol_eq: f64,
    /// Tolerance for eigensolver and span-closure quantities.
    #[arg(long, global = true, default_value_t = qchlab::tolerance::DERIVED, value_parser = positive)]
    pub tol_derived: f64,
    /// Slack on negative eigenvalues in positivity tests.
    #[arg(long, global = true, default_value_t = qchlab::tolerance::PSD, value_parser = positive)]
    pub tol_psd: f64,
    /// Machine-readable JSON report (default).
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// One line per check.
    #[arg(long, global = true)]
    pub text: bool,
    /// Run independent checks concurrently; output is unchanged.
    #[arg(long, global = true)]
    pub parallel: bool,
    /// Seed for randomized steps.
    #[arg(long, global = true, env = "QCHLAB_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check graph, edge maps and complete-pair data.
    Validate { file: PathBuf },
    /// Validate, then check extension, spacelike commutativity and composition.
    Axioms {
        file: PathBuf,
        /// Also enumerate every complete future and past of the graph.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Generate the operator algebra of the edge Kraus operators.
    Algebra {
        file: PathBuf,
        /// Also compute the block decomposition.
        #[arg(long)]
        blocks: bool,
    },
    /// Check Cuntz-Krieger relations and convert to channels.
    Ck {
        file: PathBuf,
        /// Also require edges into a vertex to have orthogonal ranges.
        #[arg(long)]
        orthogonal_ranges: bool,
    },
    /// Build the causal history of a circuit and run the axiom suite.
    Circuit {
        file: PathBuf,
        /// Write the generated instance here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the algebra ignores the choice of Kraus operators.
    Invariance {
        file: PathBuf,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("tolerance must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Result of one command before rendering.
pub struct Outcome {
    pub command: &'static str,
    pub report: Report,
    pub data: Value,
}

#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, std::io::Error),
    Lib(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Lib(e) => write!(f, "[{}] {e}", e.code()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn instance_data(q: &QchInstance) -> Value {
    json!({
        "vertices": q.graph.vertices().len(),
        "edges": q.graph.edges().len(),
        "complete_pairs": q.complete_pairs.len(),
    })
}

/// Validation, with domain/range mismatches promoted to an input error.
fn validated(q: &QchInstance, tol: &Tolerances) -> Result<Report, CliError> {
    let report = validate_qch(q, tol)?;
    let bad: Vec<String> = report
        .failures()
        .filter(|c| c.name.ends_with("/dims"))
        .map(|c| match &c.detail {
            Some(d) => format!("{} ({d})", c.name.trim_end_matches("/dims")),
            None => c.name.trim_end_matches("/dims").to_string(),
        })
        .collect();
    if !bad.is_empty() {
        return Err(Error::Dim(bad.join("; ")).into());
    }
    Ok(report)
}

fn axiom_suite(q: &QchInstance, opts: &VerifyOptions) -> Result<(Report, Value), CliError> {
    let mut report = validated(q, &opts.tol)?;
    let mut sections = serde_json::Map::new();
    sections.insert("validate".into(), section_summary(&report));
    if report.pass() {
        for (name, r) in verify_all(q, opts)? {
            sections.insert(name.into(), section_summary(&r));
            report.extend(r);
        }
    }
    Ok((report, Value::Object(sections)))
}

fn section_summary(r: &Report) -> Value {
    json!({ "checks": r.len(), "pass": r.pass(), "max_residual": r.max_residual() })
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    let tol = Tolerances { eq: g.tol_eq, derived: g.tol_derived, psd: g.tol_psd };
    let opts = |exhaustive| VerifyOptions { tol, exhaustive, parallel: g.parallel };
    match &cli.command {
        Command::Validate { file } => {
            let q = load_qch::<f64>(&read(file)?)?;
            let report = validated(&q, &tol)?;
            Ok(Outcome { command: "validate", report, data: instance_data(&q) })
        }
        Command::Axioms { file, exhaustive } => {
            let q = load_qch::<f64>(&read(file)?)?;
            let (report, sections) = axiom_suite(&q, &opts(*exhaustive))?;
            let mut data = instance_data(&q);
            data["sections"] = sections;
            Ok(Outcome { command: "axioms", report, data })
        }
        Command::Algebra { file, blocks } => {
            let q = load_qch::<f64>(&read(file)?)?;
            let d = q.graph.total_dim();
            let bound = (d * d) as f64;
            let alg = generate_algebra(&q.graph, &q.edge_maps)?;
            let mut report = Report::new();
            report.push(Check::below("algebra/closure", alg.closure_residual()?, tol.derived));
            report.push(Check::at_most("algebra/dim_bound", alg.dim() as f64, bound));
            report.push(Check::at_most("algebra/iterations", alg.iterations as f64, bound));
            let filtration = af_filtration_check(&q.graph, &q.edge_maps, tol.derived)?;
            report.extend(filtration.report);
            let decomposition = if *blocks {
                match central_blocks(&alg, g.seed) {
                    Ok(bs) => {
                        let n2: usize = bs.iter().map(|b| b.n * b.n).sum();
                        let nm: usize = bs.iter().map(|b| b.n * b.m).sum();
                        report.push(Check::flag("algebra/blocks/sum_squares", n2 == alg.dim()));
                        report.push(Check::at_most("algebra/blocks/multiplicity", nm as f64, d as f64));
                        Some(bs.iter().map(|b| (b.n, b.m)).collect::<Vec<_>>())
                    }
                    Err(e @ Error::Degenerate(_)) => {
                        report.push(Check::flag("algebra/blocks", false).with_detail(e.to_string()));
                        None
                    }
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            let summary = AlgebraSummary::new(&alg, decomposition.as_deref());
            let mut data = serde_json::to_value(summary).map_err(|e| Error::Parse(e.to_string()))?;
            data["filtration"] = json!(filtration.dims);
            Ok(Outcome { command: "algebra", report, data })
        }
        Command::Ck { file, orthogonal_ranges } => {
            let f = load_ck_family::<f64>(&read(file)?)?;
            let mut report = check_ck_family(&f, tol.eq, *orthogonal_ranges)?;
            let mut channels = serde_json::Map::new();
            if report.pass() {
                for (id, m) in ck_to_channels(&f, &tol)? {
                    let cp = m.choi().is_completely_positive(tol.psd);
                    report.push(Check::flag(format!("channel/{id}/cp"), cp));
                    report.push(Check::below(format!("channel/{id}/tp"), m.trace_preservation_residual(), tol.eq));
                    channels.insert(
                        id,
                        json!({
                            "kraus": m.kraus().len(),
                            "trace_preserving": m.is_trace_preserving(tol.eq),
                            "unital": m.is_unital(tol.eq),
                        }),
                    );
                }
            }
            Ok(Outcome { command: "ck", report, data: json!({ "total_dim": f.total_dim(), "channels": channels }) })
        }
        Command::Circuit { file, out } => {
            let circ = parse_circuit::<f64>(&read(file)?)?;
            let q = circuit_to_qch(&circ)?;
            if let Some(path) = out {
                let text = to_canonical_json(&QchFile::from_qch(&q))?;
                std::fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            let (report, sections) = axiom_suite(&q, &opts(false))?;
            let mut data = instance_data(&q);
            data["qubits"] = json!(circ.num_qubits);
            data["depth"] = json!(circ.depth());
            data["sections"] = sections;
            Ok(Outcome { command: "circuit", report, data })
        }
        Command::Invariance { file, trials } => {
            let q = load_qch::<f64>(&read(file)?)?;
            let report = kraus_choice_invariance(&q.graph, &q.edge_maps, *trials, g.seed, tol.derived)?;
            let dim = generate_algebra(&q.graph, &q.edge_maps)?.dim();
            Ok(Outcome { command: "invariance", report, data: json!({ "trials": trials, "seed": g.seed, "dim": dim }) })
        }
    }
}

/// Canonical JSON report.
pub fn render_json(o: &Outcome) -> Result<String, CliError> {
    let value = json!({
        "command": o.command,
        "pass": o.report.pass(),
        "checks": o.report.checks,
        "data": o.data,
    });
    Ok(to_canonical_json(&value)?)
}

pub fn render_text(o: &Outcome) -> String {
    let mut s = String::new();
    for c in &o.report.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        s.push_str(&format!("{tag} {} residual={:.3e} tol={:.1e}", c.name, c.residual, c.tolerance));
        if let Some(d) = &c.detail {
            s.push_str(&format!(" ({d})"));
        }
        s.push('\n');
    }
    let failed = o.report.failures().count();
    s.push_str(&format!("{}: {} checks, {failed} failed\n", o.command, o.report.len()));
    s
}

/// Parses `args`, runs the command and writes the report. Returns the exit code.
pub fn run<I, A>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let text = if cli.global.text {
        render_text(&outcome)
    } else {
        match render_json(&outcome) {
            Ok(t) => t,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_ERROR;
            }
        }
    };
    if stdout.write_all(text.as_bytes()).is_err() {
        return EXIT_ERROR;
    }
    if outcome.report.pass() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
