//! The `ptlp` command line: parse, ground, unfold and reason about
//! temporal probabilistic logic programs.
//!
//! [`run`] takes the full argument vector and returns the exit code together
//! with everything that would be written to stdout and stderr, so the whole
//! surface can be driven in-process.
//!
//! Exit codes: `0` success, `1` a negative answer (inconsistent, not
//! entailed, or only consistent at the ε boundary), `2` a usage or input
//! error, `3` a base larger than the world cap.

mod output;
mod profile;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ptlogic::compression::{self, CompressionError, VerifyMode};
use ptlogic::ground::{self, GroundError, GroundingMode, PProgram};
use ptlogic::interval::expr;
use ptlogic::model::{Diagnostic, PTProgram, TimePoint};
use ptlogic::parser::{self, Query, TightenAt};
use ptlogic::prob::{parse_literal, Prob};
use ptlogic::psat::{self, LpMode, PsatError, SolveOptions, Verdict};

use output::{interval_json, ratio_json, witness_json};

/// Environment variable overriding the default world cap.
pub const MAX_WORLD_ATOMS_ENV: &str = "TPLP_MAX_WORLD_ATOMS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "ptlp", version, about = "Temporal probabilistic logic programs")]
struct Cli {
    /// Margin for strict violation of body intervals (decimal or num/den).
    #[arg(long, global = true, value_name = "R")]
    epsilon: Option<String>,
    /// Largest Herbrand base the solver accepts.
    #[arg(long, global = true, value_name = "N")]
    max_world_atoms: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Grounding::Relevant)]
    grounding: Grounding,
    #[arg(long, global = true, value_enum, default_value_t = Lp::Exact)]
    lp: Lp,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Grounding {
    Full,
    Relevant,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Lp {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Verify {
    Literal,
    Conditional,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a program.
    Validate { file: PathBuf },
    /// Print the ground program.
    Ground { file: PathBuf },
    /// Print the unfolded p-program.
    Unfold { file: PathBuf },
    /// Decide whether the program has a model.
    Consistent { file: PathBuf },
    /// Check an `?entail` query.
    Entail { file: PathBuf, query: PathBuf },
    /// Answer a `?tighten` query.
    Tighten { file: PathBuf, query: PathBuf },
    /// Print the maximum-entropy model.
    Maxent { file: PathBuf },
    /// Build the evolution program of a skeleton and a CSV of slices.
    Evolve {
        skeleton: PathBuf,
        profile: PathBuf,
        #[arg(long, value_enum)]
        verify: Option<Verify>,
    },
    /// Evaluate an interval-algebra expression.
    Ialg { expr: String },
}

/// A failed command: exit code and message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<PsatError> for Failure {
    fn from(e: PsatError) -> Self {
        match e {
            PsatError::BaseTooLarge(b) => Failure {
                code: 3,
                message: format!("{b}; use --grounding relevant or raise --max-world-atoms"),
            },
            PsatError::InconsistentProgram => Failure { code: 1, message: e.to_string() },
            e => Failure::input(e.to_string()),
        }
    }
}

impl From<GroundError> for Failure {
    fn from(e: GroundError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<CompressionError> for Failure {
    fn from(e: CompressionError) -> Self {
        match e {
            CompressionError::Psat(e) => e.into(),
            e => Failure::input(e.to_string()),
        }
    }
}

struct Ctx {
    json: bool,
    grounding: GroundingMode,
    opts: SolveOptions,
    stderr: String,
}

/// Output of a successful command.
struct Done {
    code: i32,
    text: String,
    json: Value,
}

/// Runs the command line `args`; `args[0]` is the program name.
pub fn run<I, S>(args: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.use_stderr() {
                true => CommandResult { exit_code: 2, stdout: String::new(), stderr: text },
                false => CommandResult { exit_code: 0, stdout: text, stderr: String::new() },
            };
        }
    };
    let mut ctx = match context(&cli) {
        Ok(ctx) => ctx,
        Err(f) => return failed(f, String::new()),
    };
    match dispatch(&cli.command, &mut ctx) {
        Ok(done) => {
            let stdout = if ctx.json {
                let mut s = serde_json::to_string_pretty(&done.json).expect("values serialize");
                s.push('\n');
                s
            } else {
                done.text
            };
            CommandResult { exit_code: done.code, stdout, stderr: ctx.stderr }
        }
        Err(f) => failed(f, ctx.stderr),
    }
}

fn failed(f: Failure, mut stderr: String) -> CommandResult {
    stderr.push_str(&format!("error: {}\n", f.message));
    CommandResult { exit_code: f.code, stdout: String::new(), stderr }
}

fn context(cli: &Cli) -> Result<Ctx, Failure> {
    let mut opts = SolveOptions::default();
    if let Some(e) = &cli.epsilon {
        opts.epsilon = parse_rational(e).ok_or_else(|| Failure::input(format!("invalid --epsilon `{e}`")))?;
    }
    let env_cap = match std::env::var(MAX_WORLD_ATOMS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Failure::input(format!("invalid {MAX_WORLD_ATOMS_ENV} `{v}`")))?,
        ),
        Err(_) => None,
    };
    if let Some(cap) = cli.max_world_atoms.or(env_cap) {
        opts.max_world_atoms = cap;
    }
    opts.lp_mode = match cli.lp {
        Lp::Exact => LpMode::Exact,
        Lp::Float => LpMode::Float,
    };
    opts.validate().map_err(|e| Failure::input(e.to_string()))?;
    let grounding = match cli.grounding {
        Grounding::Full => GroundingMode::Full,
        Grounding::Relevant => GroundingMode::Relevant,
    };
    Ok(Ctx { json: cli.json, grounding, opts, stderr: String::new() })
}

fn parse_rational(text: &str) -> Option<Prob> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            (d != 0).then(|| Prob::new(n.into(), d.into()))
        }
        None => parse_literal(text.trim()).ok(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

impl Ctx {
    fn report(&mut self, path: &Path, diags: &[Diagnostic]) {
        for d in diags {
            self.stderr.push_str(&format!("{}:{d}\n", path.display()));
        }
    }

    fn program(&mut self, path: &Path) -> Result<(PTProgram, Vec<Diagnostic>), Failure> {
        let text = read(path)?;
        match parser::parse_program_with_warnings(&text) {
            Ok((p, warnings)) => {
                self.report(path, &warnings);
                Ok((p, warnings))
            }
            Err(diags) => {
                self.report(path, &diags);
                let errors = diags.iter().filter(|d| d.is_error()).count();
                Err(Failure::input(format!("{}: {errors} error(s)", path.display())))
            }
        }
    }

    fn unfolded(&mut self, path: &Path) -> Result<(PTProgram, PProgram), Failure> {
        let (p, _) = self.program(path)?;
        let gp = ground::ground_program(&p, self.grounding)?;
        let pp = ground::unfold(&gp)?;
        let warnings = pp.warnings.clone();
        self.report(path, &warnings);
        Ok((gp, pp))
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Done, Failure> {
    match cmd {
        Command::Validate { file } => validate(ctx, file),
        Command::Ground { file } => {
            let (p, _) = ctx.program(file)?;
            let gp = ground::ground_program(&p, ctx.grounding)?;
            let text = parser::render(&gp);
            let json = json!({ "calendar": gp.calendar.to_string(), "clauses": clause_lines(&text) });
            Ok(Done { code: 0, text, json })
        }
        Command::Unfold { file } => {
            let (gp, pp) = ctx.unfolded(file)?;
            let text = parser::render_unfolded(&pp, &gp.calendar);
            let json = json!({
                "calendar": gp.calendar.to_string(),
                "clauses": clause_lines(&text),
                "base": pp.base.atoms().iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            Ok(Done { code: 0, text, json })
        }
        Command::Consistent { file } => consistent(ctx, file),
        Command::Entail { file, query } => entail(ctx, file, query),
        Command::Tighten { file, query } => tighten(ctx, file, query),
        Command::Maxent { file } => maxent(ctx, file),
        Command::Evolve { skeleton, profile, verify } => evolve(ctx, skeleton, profile, *verify),
        Command::Ialg { expr: e } => {
            let value = expr::evaluate(e).map_err(|err| Failure::input(format!("ialg: {err}")))?;
            let json = match &value {
                expr::IalgValue::Interval(i) => json!({ "interval": interval_json(i), "consistent": i.is_consistent() }),
                expr::IalgValue::Bool(b) => json!({ "value": b }),
            };
            Ok(Done { code: 0, text: format!("{value}\n"), json })
        }
    }
}

fn clause_lines(text: &str) -> Vec<&str> {
    text.lines().skip(1).collect()
}

fn validate(ctx: &mut Ctx, file: &Path) -> Result<Done, Failure> {
    let (p, warnings) = ctx.program(file)?;
    let text = format!(
        "ok: {} clause(s), calendar {}, {} warning(s)\n",
        p.clauses.len(),
        p.calendar,
        warnings.len()
    );
    let json = json!({
        "valid": true,
        "clauses": p.clauses.len(),
        "calendar": p.calendar.to_string(),
        "warnings": warnings.iter().map(ToString::to_string).collect::<Vec<_>>(),
    });
    Ok(Done { code: 0, text, json })
}

fn eps_json(ctx: &Ctx) -> Value {
    ratio_json(&ctx.opts.epsilon)
}

fn consistent(ctx: &mut Ctx, file: &Path) -> Result<Done, Failure> {
    let (_, pp) = ctx.unfolded(file)?;
    let c = psat::check_consistency(&pp, &ctx.opts)?;
    let base = ground::herbrand_base(&pp, ctx.opts.max_world_atoms).map_err(PsatError::from)?;
    let mut text = format!("{}\n", c.verdict.as_str());
    if let Some(w) = &c.witness {
        text.push_str(&output::witness_text(w, &base));
    }
    if c.verdict == Verdict::UnknownEps {
        text.push_str("models exist only when strict violations may touch interval endpoints; try a smaller --epsilon\n");
    }
    let json = json!({
        "verdict": c.verdict.as_str(),
        "witness": c.witness.as_ref().map(|w| witness_json(w, &base)),
        "intervals": {},
        "branch_count": c.branch_count,
        "eps": eps_json(ctx),
    });
    Ok(Done { code: if c.is_consistent() { 0 } else { 1 }, text, json })
}

fn query(path: &Path, ctx: &mut Ctx) -> Result<Query, Failure> {
    let text = read(path)?;
    parser::parse_query(&text).map_err(|diags| {
        ctx.report(path, &diags);
        Failure::input(format!("{}: invalid query", path.display()))
    })
}

fn entail(ctx: &mut Ctx, file: &Path, qfile: &Path) -> Result<Done, Failure> {
    let (gp, pp) = ctx.unfolded(file)?;
    let Query::Entail { formula, annot } = query(qfile, ctx)? else {
        return Err(Failure::input(format!("{}: expected an `?entail` query", qfile.display())));
    };
    let e = match psat::entails(&pp, &formula, &annot, &gp.calendar, &ctx.opts) {
        Err(PsatError::InconsistentProgram) => {
            let json = json!({
                "verdict": "INCONSISTENT",
                "witness": null,
                "intervals": {},
                "branch_count": 0,
                "eps": eps_json(ctx),
            });
            ctx.stderr.push_str("error: the program has no model; entailment is not decided\n");
            return Ok(Done { code: 1, text: "INCONSISTENT\n".into(), json });
        }
        r => r?,
    };
    for w in &e.warnings {
        ctx.stderr.push_str(&format!("{}:{w}\n", qfile.display()));
    }
    let verdict = if e.holds { "ENTAILED" } else { "NOT_ENTAILED" };
    let mut text = format!("{verdict}\n");
    let mut intervals = BTreeMap::new();
    let mut points = Vec::new();
    for p in &e.points {
        text.push_str(&format!(
            "  {}: derived {} required {} {}\n",
            p.formula,
            p.derived,
            p.required,
            if p.holds { "ok" } else { "FAILS" }
        ));
        intervals.insert(p.formula.to_string(), interval_json(&p.derived));
        points.push(json!({
            "time": p.time,
            "formula": p.formula.to_string(),
            "derived": interval_json(&p.derived),
            "required": interval_json(&p.required),
            "holds": p.holds,
        }));
    }
    let json = json!({
        "verdict": verdict,
        "witness": null,
        "intervals": intervals,
        "points": points,
        "branch_count": 0,
        "eps": eps_json(ctx),
    });
    Ok(Done { code: if e.holds { 0 } else { 1 }, text, json })
}

fn tighten(ctx: &mut Ctx, file: &Path, qfile: &Path) -> Result<Done, Failure> {
    let (gp, pp) = ctx.unfolded(file)?;
    let Query::Tighten { formula, at } = query(qfile, ctx)? else {
        return Err(Failure::input(format!("{}: expected a `?tighten` query", qfile.display())));
    };
    let times: Vec<TimePoint> = match at {
        TightenAt::Point(t) => vec![t],
        TightenAt::All => gp.calendar.points().collect(),
    };
    let mut text = String::new();
    let mut intervals = BTreeMap::new();
    let mut branch_count = 0;
    for t in times {
        let f = formula.substitute_time(t);
        let r = psat::tighten(&pp, &f, &ctx.opts)?;
        branch_count += r.branch_count;
        text.push_str(&format!("{f}: {}\n", r.interval));
        intervals.insert(f.to_string(), interval_json(&r.interval));
    }
    let json = json!({
        "verdict": "CONSISTENT",
        "witness": null,
        "intervals": intervals,
        "branch_count": branch_count,
        "eps": eps_json(ctx),
    });
    Ok(Done { code: 0, text, json })
}

fn maxent(ctx: &mut Ctx, file: &Path) -> Result<Done, Failure> {
    let (_, pp) = ctx.unfolded(file)?;
    let m = psat::max_entropy_model(&pp, &ctx.opts)?;
    let base = ground::herbrand_base(&pp, ctx.opts.max_world_atoms).map_err(PsatError::from)?;
    let mut text = format!("entropy {:.6} nats\n", m.entropy);
    text.push_str(&output::witness_text(&m.distribution, &base));
    let mut intervals = BTreeMap::new();
    for atom in base.atoms() {
        let f = ptlogic::model::BasicFormula::single(atom.clone());
        let p = psat::formula_mass(&m.distribution, &f, &base)?;
        intervals.insert(atom.to_string(), json!([ratio_json(&p), ratio_json(&p)]));
    }
    let json = json!({
        "verdict": "CONSISTENT",
        "witness": witness_json(&m.distribution, &base),
        "intervals": intervals,
        "entropy": m.entropy,
        "branch_count": m.branch_count,
        "eps": eps_json(ctx),
    });
    Ok(Done { code: 0, text, json })
}

fn evolve(ctx: &mut Ctx, skeleton: &Path, profile: &Path, verify: Option<Verify>) -> Result<Done, Failure> {
    let text = read(skeleton)?;
    let sk = parser::parse_skeleton(&text).map_err(|diags| {
        ctx.report(skeleton, &diags);
        Failure::input(format!("{}: invalid skeleton", skeleton.display()))
    })?;
    let slices = profile::read_slices(profile)?;
    let program = compression::build_evolution_program(&sk, &slices)?;
    let rendered = parser::render(&program);
    let mut out = rendered.clone();
    let mut json = json!({ "program": clause_lines(&rendered), "calendar": program.calendar.to_string() });
    let mut code = 0;
    if let Some(v) = verify {
        let mode = match v {
            Verify::Literal => VerifyMode::Literal,
            Verify::Conditional => VerifyMode::Conditional,
        };
        let pi = compression::derive_profile(&sk, &slices, &ctx.opts)?;
        let report = compression::verify_evolution(&pi, &program, mode)?;
        let report_json = output::report_json(&report);
        if !ctx.json {
            out.push_str(&serde_json::to_string_pretty(&report_json).expect("values serialize"));
            out.push('\n');
        }
        json["report"] = report_json;
        if !report.holds() {
            code = 1;
        }
    }
    Ok(Done { code, text: out, json })
}
