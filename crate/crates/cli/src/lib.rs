//! Subcommands of `renormlab`. Each reads map-spec files, writes CSV into
//! the output directory plus a manifest, and prints a short summary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cfrac::ContinuedFraction;
use circlemap::{heights, read_map_spec, tune, CircleMapError, CircleMapSpec, HeightStop, MapSpecFile, Orbit, ORBIT_BUDGET};
use clap::{Args, Parser, Subcommand};
use conjugacy::{build_conjugacy, derivative_diagnostics, ConjugacyError};
use cxbounds::{default_anchor, growth_check, main_lemma_probe_seeded, CxError};
use numerics::{pow2, real, to_decimal, Real};
use partition::{build_partition, commensurability, refinement_check, PartitionError};
use renorm::{convergence_experiment, height, renorm_orbit, Height, RenormError};
use serde::Serialize;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PRECISION: u8 = 3;
pub const EXIT_INVALID: u8 = 4;

/// Error with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl CliError {
    fn input(m: impl fmt::Display) -> Self {
        CliError { code: EXIT_INPUT, message: m.to_string() }
    }

    fn precision(m: impl fmt::Display) -> Self {
        CliError { code: EXIT_PRECISION, message: m.to_string() }
    }

    fn invalid(m: impl fmt::Display) -> Self {
        CliError { code: EXIT_INVALID, message: m.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e)
    }
}

impl From<CircleMapError> for CliError {
    fn from(e: CircleMapError) -> Self {
        match e {
            CircleMapError::PrecisionExhausted { .. } => CliError::precision(e),
            CircleMapError::RationalRotationNumber | CircleMapError::TargetUnattainable(_) | CircleMapError::Numerics(_) => {
                CliError::invalid(e)
            }
            _ => CliError::input(e),
        }
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::PrecisionExhausted { .. } => CliError::precision(e),
            PartitionError::Csv(_) => CliError::input(e),
            _ => CliError::invalid(e),
        }
    }
}

impl From<RenormError> for CliError {
    fn from(e: RenormError) -> Self {
        match e {
            RenormError::PrecisionExhausted { .. } => CliError::precision(e),
            RenormError::Csv(_) => CliError::input(e),
            _ => CliError::invalid(e),
        }
    }
}

impl From<CxError> for CliError {
    fn from(e: CxError) -> Self {
        match e {
            CxError::PrecisionExhausted { .. } => CliError::precision(e),
            CxError::TooFewSamples(_) | CxError::AnchorTooDeep { .. } | CxError::RadiusTooSmall(_) | CxError::Csv(_) => {
                CliError::input(e)
            }
            _ => CliError::invalid(e),
        }
    }
}

impl From<ConjugacyError> for CliError {
    fn from(e: ConjugacyError) -> Self {
        match e {
            ConjugacyError::Partition(p) => p.into(),
            ConjugacyError::Numerics(_) | ConjugacyError::NotMonotone { .. } => CliError::invalid(e),
            _ => CliError::input(e),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::input(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "renormlab", version, about = "Renormalization experiments for multicritical circle maps")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Mantissa bits; defaults to the map file's own, then the environment.
    #[arg(long, global = true, env = circlemap::PRECISION_ENV)]
    pub precision_bits: Option<u32>,
    #[arg(long, global = true, default_value_t = 10)]
    pub depth: usize,
    /// Chebyshev nodes per side for pair distances.
    #[arg(long, global = true, default_value_t = 32)]
    pub grid: usize,
    #[arg(long, global = true, default_value_t = 72)]
    pub samples: usize,
    /// Jitters probe samples inside their strata; centers when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, short, global = true, default_value = "out")]
    pub output_dir: PathBuf,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum Command {
    /// Continued fraction of the rotation number.
    Rho { map: PathBuf },
    /// Tune ω so the rotation number matches a target prefix.
    Tune {
        map: PathBuf,
        /// "golden", "silver" or comma-separated quotients a_0,a_1,...
        #[arg(long, default_value = "golden")]
        target: String,
        /// Bracket width as a power of two: 2^-tol_bits.
        #[arg(long, default_value_t = 30)]
        tol_bits: i32,
    },
    /// Dynamical partition P_n(0) and its refinement into P_{n+1}.
    Partition {
        map: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Commensurability constants of P_n at the marked point.
    Realbounds {
        map: PathBuf,
        #[arg(long, default_value_t = 1)]
        from: usize,
        #[arg(long, default_value_t = 10)]
        to: usize,
    },
    /// Renormalization orbit levels 1..=depth.
    Renorm { map: PathBuf },
    /// Distances between the renormalizations of two maps.
    Converge { f: PathBuf, g: PathBuf },
    /// Inverse-branch envelope on levels M..M+levels-1 and the growth bound.
    Probe {
        map: PathBuf,
        /// Anchor level M; chosen from the critical points when absent.
        #[arg(long)]
        anchor: Option<usize>,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        /// First renormalization level in the growth fit.
        #[arg(long, default_value_t = 4)]
        growth_from: usize,
        #[arg(long, default_value_t = 2.0)]
        radius: f64,
    },
    /// Partition-matching conjugacy and its derivative oscillation.
    Conjugacy {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 9)]
        to: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rho { .. } => "rho",
            Command::Tune { .. } => "tune",
            Command::Partition { .. } => "partition",
            Command::Realbounds { .. } => "realbounds",
            Command::Renorm { .. } => "renorm",
            Command::Converge { .. } => "converge",
            Command::Probe { .. } => "probe",
            Command::Conjugacy { .. } => "conjugacy",
        }
    }

    fn inputs(&self) -> Vec<&Path> {
        match self {
            Command::Converge { f, g } | Command::Conjugacy { f, g, .. } => vec![f, g],
            Command::Rho { map }
            | Command::Tune { map, .. }
            | Command::Partition { map, .. }
            | Command::Realbounds { map, .. }
            | Command::Renorm { map }
            | Command::Probe { map, .. } => vec![map],
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: Vec<String>,
    version: &'a str,
    config: &'a RunConfig,
    args: &'a Command,
    /// Map files as read, so the run can be repeated from this file alone.
    inputs: Vec<(String, String)>,
    exit_code: u8,
    wall_time_s: f64,
}

/// Lines for stdout; also returned so tests can inspect them.
pub struct Outcome {
    pub lines: Vec<String>,
    pub code: u8,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out: &'a Path,
    lines: Vec<String>,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn load(&self, path: &Path) -> Result<CircleMapSpec, CliError> {
        // anything short of a built map is a problem with the file or flags
        read_map_spec(path, self.cfg.precision_bits).map_err(CliError::input)
    }

    fn csv(&self, name: &str) -> Result<fs::File, CliError> {
        Ok(fs::File::create(self.out.join(name))?)
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let out = &cli.config.output_dir;
    if let Err(e) = fs::create_dir_all(out) {
        return Outcome { lines: vec![format!("error: {}: {e}", out.display())], code: EXIT_INPUT };
    }
    let mut ctx = Ctx { cfg: &cli.config, out, lines: Vec::new() };
    let result = dispatch(&mut ctx, &cli.command);
    let code = match &result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            ctx.say(format!("error: {e}"));
            e.code
        }
    };
    let inputs = cli
        .command
        .inputs()
        .into_iter()
        .map(|p| (p.display().to_string(), fs::read_to_string(p).unwrap_or_default()))
        .collect();
    let manifest = Manifest {
        command: cli.command.name(),
        argv: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION"),
        config: &cli.config,
        args: &cli.command,
        inputs,
        exit_code: code,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let text = toml::to_string(&manifest).expect("manifest serializes");
    let path = out.join(format!("{}.manifest.toml", cli.command.name()));
    if let Err(e) = fs::write(&path, text) {
        ctx.say(format!("warning: manifest {}: {e}", path.display()));
    }
    Outcome { lines: ctx.lines, code }
}

fn dispatch(ctx: &mut Ctx, cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Rho { map } => cmd_rho(ctx, map),
        Command::Tune { map, target, tol_bits } => cmd_tune(ctx, map, target, *tol_bits),
        Command::Partition { map, level } => cmd_partition(ctx, map, *level),
        Command::Realbounds { map, from, to } => cmd_realbounds(ctx, map, *from, *to),
        Command::Renorm { map } => cmd_renorm(ctx, map),
        Command::Converge { f, g } => cmd_converge(ctx, f, g),
        Command::Probe { map, anchor, levels, growth_from, radius } => {
            cmd_probe(ctx, map, *anchor, *levels, *growth_from, *radius)
        }
        Command::Conjugacy { f, g, from, to } => cmd_conjugacy(ctx, f, g, *from, *to),
    }
}

fn show_quotients(q: &[u64]) -> String {
    format!("[{}]", q.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
}

fn cmd_rho(ctx: &mut Ctx, map: &Path) -> Result<(), CliError> {
    let spec = ctx.load(map)?;
    let depth = ctx.cfg.depth;
    let mut orbit = Orbit::new(&spec);
    let run = heights(&mut orbit, depth, ORBIT_BUDGET, |_| u64::MAX, |_, _| false);
    let terminated = run.stop == HeightStop::Infinite;
    let mut cf = ContinuedFraction::new(run.heights.clone());
    cf.terminated = terminated;
    ctx.say(format!("quotients {}", show_quotients(&run.heights)));
    if !run.heights.is_empty() {
        ctx.say(format!("value {}", to_decimal(&cf.value_real(spec.prec()))));
    }
    match run.stop {
        HeightStop::Depth => Ok(()),
        HeightStop::Infinite => {
            ctx.say("rational");
            Ok(())
        }
        _ => Err(CliError::precision(format!(
            "precision exhausted after {} quotients (asked for {depth})",
            run.heights.len()
        ))),
    }
}

fn parse_target(target: &str) -> Result<ContinuedFraction, CliError> {
    const LEN: usize = 200;
    match target {
        "golden" => Ok(ContinuedFraction::golden(LEN)),
        "silver" => Ok(ContinuedFraction::silver(LEN)),
        list => {
            let q = list
                .split(',')
                .map(|s| s.trim().parse::<u64>().ok().filter(|&a| a >= 1))
                .collect::<Option<Vec<u64>>>()
                .ok_or_else(|| CliError::input(format!("bad target {list:?}")))?;
            Ok(ContinuedFraction::new(q))
        }
    }
}

fn cmd_tune(ctx: &mut Ctx, map: &Path, target: &str, tol_bits: i32) -> Result<(), CliError> {
    let base = ctx.load(map)?;
    let target = parse_target(target)?;
    let depth = ctx.cfg.depth.min(target.len());
    let tol = pow2(base.prec(), -tol_bits);
    let report = tune(|w: &Real| Ok(base.with_omega(w)), &target, depth, &tol)?;
    let text = MapSpecFile::from_spec(&report.spec).to_toml();
    fs::write(ctx.out.join("tuned.toml"), text)?;
    ctx.say(format!("omega {}", to_decimal(report.spec.omega())));
    ctx.say(format!("matched {} quotients {}", report.depth, show_quotients(&report.quotients.quotients)));
    ctx.say(format!("bracket width {:.3e}", Real::with_val(base.prec(), &report.hi - &report.lo).to_f64()));
    Ok(())
}

fn cmd_partition(ctx: &mut Ctx, map: &Path, level: usize) -> Result<(), CliError> {
    let spec = ctx.load(map)?;
    let zero = spec.zero();
    let p = build_partition(&spec, &zero, level)?;
    p.write_csv(ctx.csv(&format!("partition_{level}.csv"))?)?;
    let next = build_partition(&spec, &zero, level + 1)?;
    let refine = refinement_check(&p, &next)?;
    ctx.say(format!(
        "level {level}: {} intervals (q_n={}, q_n+1={}), covering defect {:.3e}",
        p.count(),
        p.q_n,
        p.q_next,
        p.covering().defect().to_f64()
    ));
    ctx.say(format!(
        "refinement into level {}: {} (a = {}, worst mismatch {:.3e})",
        level + 1,
        if refine.pass { "pass" } else { "FAIL" },
        refine.expected_long,
        refine.worst_mismatch.to_f64()
    ));
    if refine.pass {
        Ok(())
    } else {
        Err(CliError::invalid("refinement check failed"))
    }
}

fn cmd_realbounds(ctx: &mut Ctx, map: &Path, from: usize, to: usize) -> Result<(), CliError> {
    if from > to {
        return Err(CliError::input("--from exceeds --to"));
    }
    let spec = ctx.load(map)?;
    let rows = commensurability(&spec, &spec.zero(), from..=to)?;
    let mut w = csv::Writer::from_writer(ctx.csv("realbounds.csv")?);
    w.write_record(["level", "c", "pre_asymptotic"])?;
    for r in &rows {
        w.write_record([r.level.to_string(), to_decimal(&r.c), r.pre_asymptotic.to_string()])?;
    }
    w.flush()?;
    let mut cs: Vec<f64> = rows.iter().map(|r| r.c.to_f64()).collect();
    cs.sort_by(f64::total_cmp);
    ctx.say(format!("C(n) for n in {from}..={to}: max {:.4} median {:.4}", cs[cs.len() - 1], cs[cs.len() / 2]));
    Ok(())
}

fn cmd_renorm(ctx: &mut Ctx, map: &Path) -> Result<(), CliError> {
    let spec = ctx.load(map)?;
    let orbit = renorm_orbit(&spec, ctx.cfg.depth);
    let mut w = csv::Writer::from_writer(ctx.csv("renorm.csv")?);
    w.write_record(["level", "height", "eta0", "xi0", "commutation_residual"])?;
    let mut hs = Vec::new();
    for p in &orbit.pairs {
        let h = match height(&p.pair, circlemap::HEIGHT_CAP)? {
            Height::Finite(a) => a.to_string(),
            Height::Infinite => "inf".to_string(),
        };
        w.write_record([
            p.pair.level.to_string(),
            h.clone(),
            to_decimal(&p.eta0()),
            to_decimal(&p.xi0()),
            to_decimal(&p.pair.commutation_residual()),
        ])?;
        hs.push(h);
    }
    w.flush()?;
    ctx.say(format!("{} levels, heights [{}]", orbit.pairs.len(), hs.join(",")));
    match orbit.error {
        None => Ok(()),
        Some(e) => Err(e.into()),
    }
}

fn cmd_converge(ctx: &mut Ctx, f: &Path, g: &Path) -> Result<(), CliError> {
    let (f, g) = (ctx.load(f)?, ctx.load(g)?);
    let report = convergence_experiment(&f, &g, ctx.cfg.depth, ctx.cfg.grid);
    report.write_csv(ctx.csv("converge.csv")?)?;
    ctx.say(report.summary());
    match report.error {
        Some(e) if report.levels.len() < 2 => Err(CliError::invalid(e)),
        Some(e) => {
            ctx.say(format!("stopped early: {e}"));
            Ok(())
        }
        None => Ok(()),
    }
}

fn cmd_probe(
    ctx: &mut Ctx,
    map: &Path,
    anchor: Option<usize>,
    levels: usize,
    growth_from: usize,
    radius: f64,
) -> Result<(), CliError> {
    let spec = ctx.load(map)?;
    let m = match anchor {
        Some(m) => m,
        None => default_anchor(&spec, ctx.cfg.depth)?,
    };
    let mut failure = None;
    for n in m..m + levels {
        match main_lemma_probe_seeded(&spec, n, m, ctx.cfg.samples, ctx.cfg.seed) {
            Ok(rep) => {
                rep.write_csv(ctx.csv(&format!("probe_{n}.csv"))?)?;
                ctx.say(rep.summary());
            }
            Err(e) => {
                ctx.say(format!("n={n}: {e}"));
                failure.get_or_insert(e);
            }
        }
    }
    if spec.marked_criticality().is_some() {
        let orbit = renorm_orbit(&spec, ctx.cfg.depth);
        let pairs: Vec<_> = orbit.pairs.into_iter().filter(|p| p.pair.level >= growth_from as i64).collect();
        let rep = growth_check(&pairs, &real(spec.prec(), radius), ctx.cfg.samples.max(50))?;
        let mut w = csv::Writer::from_writer(ctx.csv("growth.csv")?);
        w.write_record(["level", "c", "b", "samples"])?;
        for l in &rep.per_level {
            w.write_record([l.level.to_string(), to_decimal(&l.fit.slope), to_decimal(&l.fit.intercept), l.samples.to_string()])?;
        }
        w.flush()?;
        ctx.say(format!(
            "growth |R^n f(z)| >= c|z|^{} + b: c={:.4e} b={:.4e} success={}",
            rep.d,
            rep.c().to_f64(),
            rep.b().to_f64(),
            rep.success
        ));
    } else {
        ctx.say("growth check skipped: no critical point at 0");
    }
    match failure {
        None => Ok(()),
        Some(e) => Err(e.into()),
    }
}

fn cmd_conjugacy(ctx: &mut Ctx, f: &Path, g: &Path, from: usize, to: usize) -> Result<(), CliError> {
    if from > to {
        return Err(CliError::input("--from exceeds --to"));
    }
    let (f, g) = (ctx.load(f)?, ctx.load(g)?);
    let tables = (from..=to).map(|n| build_conjugacy(&f, &g, n)).collect::<Result<Vec<_>, _>>()?;
    let mut w = csv::Writer::from_writer(ctx.csv("conjugacy.csv")?);
    w.write_record(["level", "knot", "x", "y", "ratio"])?;
    for t in &tables {
        for (k, r) in t.knots.iter().zip(&t.ratios) {
            w.write_record([t.level.to_string(), k.index.to_string(), to_decimal(&k.x), to_decimal(&k.y), to_decimal(&r.ratio)])?;
        }
    }
    w.flush()?;
    let report = derivative_diagnostics(&tables)?;
    let mut w = csv::Writer::from_writer(ctx.csv("conjugacy_osc.csv")?);
    w.write_record(["level", "osc", "spread", "critical_residual"])?;
    for (t, (o, s)) in tables.iter().zip(report.osc.iter().zip(&report.spread)) {
        let c = t.critical_residual.as_ref().map(to_decimal).unwrap_or_default();
        w.write_record([t.level.to_string(), to_decimal(o), to_decimal(s), c])?;
    }
    w.flush()?;
    ctx.say(report.summary());
    Ok(())
}
