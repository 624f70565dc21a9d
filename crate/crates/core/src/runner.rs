//! Command dispatch: validate a config, run one experiment, write CSV (and
//! optionally SVG) artifacts.

use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, MapFamily, SystemDef};
use crate::dimension::{least_squares, pressure_dimension, DimensionBracket};
use crate::error::{Error, Result};
use crate::limit_geometry::{
    convergence_profile, eigenvalue_ratio_report, h_prime_one_profile, MAX_DENOMINATOR, RATIO_TOL,
};
use crate::marstrand::{count_overlaps, delta_rectangles, integral_estimate, Factor};
use crate::report::{fmt_num, LinePlot, Table};
use crate::scale_space::{
    calibrate_c5, default_tail, empirical_recurrence_map, ScalePair, DEFAULT_MAX_TAIL,
};
use crate::subcantor::{extract_subcantor, AUDIT_DEPTH, C_HAT_FACTOR};
use crate::sum_image::{dimension_scan, BivariateMap, FIT_SCALES};
use crate::symbolic::TailWord;
use crate::system::CantorSystem;

/// Multiplier applied to the largest observed normalized count when `c₅` is
/// calibrated.
pub const C5_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Dim,
    LimitGeom,
    Marstrand,
    SumScan,
    Extract,
    Recurrence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dim => "dim",
            Command::LimitGeom => "limitgeom",
            Command::Marstrand => "marstrand",
            Command::SumScan => "sumscan",
            Command::Extract => "extract",
            Command::Recurrence => "recurrence",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub budget: Option<usize>,
    /// Adds a wall-time column (breaks byte-identical reruns).
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// Set when a budget error cut the run short; the files hold what was done.
    pub partial: Option<Error>,
}

/// Lowercase hex SHA-256 of the raw config text.
pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    systems: std::collections::BTreeMap<String, CantorSystem>,
    hash: String,
    budget: usize,
    opts: &'a RunOptions,
}

impl Ctx<'_> {
    fn table(&self, command: Command, columns: &[&str]) -> Table {
        let mut cols: Vec<&str> = columns.to_vec();
        if self.opts.timings {
            cols.push("wall_ms");
        }
        let mut t = Table::new(&cols);
        t.meta("cantorlab", env!("CARGO_PKG_VERSION"))
            .meta("command", command.name())
            .meta("config_sha256", &self.hash)
            .meta("budget", self.budget);
        t
    }

    fn system(&self, name: &str) -> &CantorSystem {
        &self.systems[name]
    }

    fn bracket(&self, name: &str, depth: usize) -> Result<DimensionBracket> {
        pressure_dimension(self.system(name), depth, self.budget)
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn push_row(ctx: &Ctx<'_>, table: &mut Table, mut row: Vec<crate::report::Cell>, t: Instant) {
    if ctx.opts.timings {
        row.push(elapsed_ms(t).into());
    }
    table.push(row);
}

fn is_budget(e: &Error) -> bool {
    matches!(e, Error::BudgetExceeded { .. } | Error::ScaleTooFine { .. })
}

fn parse_checked(command: Command, text: &str) -> Result<ExperimentConfig> {
    let cfg = ExperimentConfig::parse(text)?;
    let present = match command {
        Command::Dim => cfg.dim.is_some(),
        Command::LimitGeom => cfg.limitgeom.is_some(),
        Command::Marstrand => cfg.marstrand.is_some(),
        Command::SumScan => cfg.sumscan.is_some(),
        Command::Extract => cfg.extract.is_some(),
        Command::Recurrence => cfg.recurrence.is_some(),
    };
    if !present {
        return Err(Error::Config(format!("missing [{}] section", command.name())));
    }
    Ok(cfg)
}

fn in_memory(command: Command, cfg: &ExperimentConfig, text: &str, opts: &RunOptions) -> Result<Exec> {
    let systems = cfg.validate()?;
    let budget = opts.budget.unwrap_or(cfg.budget);
    if budget == 0 {
        return Err(Error::Config("--budget: must be positive".into()));
    }
    let ctx = Ctx {
        cfg,
        systems,
        hash: config_hash(text),
        budget,
        opts,
    };
    execute(command, &ctx)
}

/// Validates, runs and writes. Validation failures return `Err` before any
/// file is created; budget failures write partial tables and are reported in
/// [`RunOutcome::partial`].
pub fn run(command: Command, config_text: &str, opts: &RunOptions) -> Result<RunOutcome> {
    let cfg = parse_checked(command, config_text)?;
    let (artifacts, partial) = in_memory(command, &cfg, config_text, opts)?;
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let files = write_artifacts(&out_dir, &artifacts)?;
    Ok(RunOutcome { files, partial })
}

/// Runs a command without touching the filesystem.
pub fn artifacts(command: Command, config_text: &str, opts: &RunOptions) -> Result<Vec<Artifact>> {
    let cfg = parse_checked(command, config_text)?;
    match in_memory(command, &cfg, config_text, opts)? {
        (a, None) => Ok(a),
        (_, Some(e)) => Err(e),
    }
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let p = dir.join(&a.file);
        std::fs::write(&p, &a.contents)?;
        out.push(p);
    }
    Ok(out)
}

type Exec = (Vec<Artifact>, Option<Error>);

fn execute(command: Command, ctx: &Ctx<'_>) -> Result<Exec> {
    match command {
        Command::Dim => run_dim(ctx),
        Command::LimitGeom => run_limitgeom(ctx),
        Command::Marstrand => run_marstrand(ctx),
        Command::SumScan => run_sumscan(ctx),
        Command::Extract => run_extract(ctx),
        Command::Recurrence => run_recurrence(ctx),
    }
}

fn finish(
    ctx: &Ctx<'_>,
    stem: &str,
    table: &mut Table,
    plot: Option<LinePlot>,
    partial: &Option<Error>,
    out: &mut Vec<Artifact>,
) {
    if let Some(e) = partial {
        table.meta("partial", e);
    }
    out.push(Artifact {
        file: format!("{stem}.csv"),
        contents: table.to_csv(),
    });
    if ctx.opts.svg {
        if let Some(p) = plot {
            out.push(Artifact {
                file: format!("{stem}.svg"),
                contents: p.render(),
            });
        }
    }
}

fn run_dim(ctx: &Ctx<'_>) -> Result<Exec> {
    let cfg = ctx.cfg.dim.as_ref().expect("checked");
    let mut t = ctx.table(Command::Dim, &["system", "depth", "d_lower", "d_upper", "width"]);
    t.meta_num("root_tolerance", crate::dimension::ROOT_TOL);
    let mut partial = None;
    let mut series = Vec::new();
    'outer: for name in &cfg.systems {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for &depth in &cfg.depths {
            let t0 = Instant::now();
            match ctx.bracket(name, depth) {
                Ok(b) => {
                    push_row(
                        ctx,
                        &mut t,
                        vec![name.as_str().into(), depth.into(), b.d_lower.into(), b.d_upper.into(), b.width().into()],
                        t0,
                    );
                    lo.push((depth as f64, b.d_lower));
                    hi.push((depth as f64, b.d_upper));
                }
                Err(e) if is_budget(&e) => {
                    partial = Some(e);
                    break 'outer;
                }
                Err(e) => return Err(e),
            }
        }
        series.push((format!("{name} lower"), lo));
        series.push((format!("{name} upper"), hi));
    }
    let plot = LinePlot {
        title: "dimension brackets".into(),
        x_label: "depth".into(),
        y_label: "dimension".into(),
        series,
    };
    let mut out = Vec::new();
    finish(ctx, "dim", &mut t, Some(plot), &partial, &mut out);
    Ok((out, partial))
}

fn run_limitgeom(ctx: &Ctx<'_>) -> Result<Exec> {
    let cfg = ctx.cfg.limitgeom.as_ref().expect("checked");
    let sys = ctx.system(&cfg.system);
    let tail = TailWord::new(sys.spec(), cfg.tail.clone())?;
    let mut out = Vec::new();

    let mut conv = ctx.table(Command::LimitGeom, &["depth", "residual", "ratio"]);
    conv.meta("system", &cfg.system)
        .meta("step", cfg.step)
        .meta("grid_points", cfg.grid_points);
    let profile = convergence_profile(sys, &tail, &cfg.depths, cfg.step, cfg.grid_points)?;
    for (i, &(n, r)) in profile.iter().enumerate() {
        let t0 = Instant::now();
        // ratio against the entry `step` depths earlier, when present
        let prev = profile.iter().take(i).find(|p| p.0 + cfg.step == n);
        let ratio = prev.map(|p| r / p.1).unwrap_or(f64::NAN);
        let cell = if ratio.is_nan() { "".into() } else { ratio.into() };
        push_row(ctx, &mut conv, vec![n.into(), r.into(), cell], t0);
    }
    let plot = LinePlot {
        title: format!("C1 residuals, {}", cfg.system),
        x_label: "depth".into(),
        y_label: "log10 residual".into(),
        series: vec![(
            "residual".into(),
            profile.iter().map(|&(n, r)| (n as f64, r.max(1e-300).log10())).collect(),
        )],
    };
    finish(ctx, "limitgeom_convergence", &mut conv, Some(plot), &None, &mut out);

    if let (Some(t0w), Some(t1w)) = (&cfg.tail0, &cfg.tail1) {
        let depth = cfg.h_depth.unwrap_or(t0w.len().min(t1w.len()) - 1);
        let t0 = TailWord::new(sys.spec(), t0w.clone())?;
        let t1 = TailWord::new(sys.spec(), t1w.clone())?;
        let grid = sys.base(t0.last()).grid(cfg.grid_points);
        let h = h_prime_one_profile(sys, &t0, &t1, depth, &grid)?;
        let mut tab = ctx.table(Command::LimitGeom, &["x", "log_derivative", "t", "t1", "t2"]);
        tab.meta("system", &cfg.system)
            .meta("depth", depth)
            .meta_num("max_abs", h.max_abs)
            .meta_num("residual_tail0", h.residuals.0)
            .meta_num("residual_tail1", h.residuals.1);
        for r in &h.rows {
            tab.push(vec![r.0.into(), r.1.into(), r.2.into(), r.3.into(), r.4.into()]);
            if ctx.opts.timings {
                tab.rows.last_mut().expect("row").push("".into());
            }
        }
        let plot = LinePlot {
            title: "D log DT".into(),
            x_label: "x".into(),
            y_label: "T''/T'".into(),
            series: vec![("profile".into(), h.rows.iter().map(|r| (r.0, r.1)).collect())],
        };
        finish(ctx, "limitgeom_hprime", &mut tab, Some(plot), &None, &mut out);
    }

    if cfg.periodic_words.len() >= 2 {
        let rep = eigenvalue_ratio_report(sys, &cfg.periodic_words)?;
        let mut tab = ctx.table(
            Command::LimitGeom,
            &["first", "second", "mu_first", "mu_second", "ratio", "last_p", "last_q", "q_at_tolerance"],
        );
        tab.meta("system", &cfg.system)
            .meta("max_denominator", MAX_DENOMINATOR)
            .meta_num("ratio_tolerance", RATIO_TOL);
        for r in &rep {
            let (p, q) = r.convergents.last().copied().unwrap_or((0, 0));
            let mut row: Vec<crate::report::Cell> = vec![
                r.first.into(),
                r.second.into(),
                r.eigenvalues.0.into(),
                r.eigenvalues.1.into(),
                r.ratio.into(),
                crate::report::Cell::Int(p),
                q.into(),
                r.denominator_at_tolerance.map(|q| q.to_string()).unwrap_or_default().into(),
            ];
            if ctx.opts.timings {
                row.push("".into());
            }
            tab.push(row);
        }
        finish(ctx, "limitgeom_eigen", &mut tab, None, &None, &mut out);
    }
    Ok((out, None))
}

fn run_marstrand(ctx: &Ctx<'_>) -> Result<Exec> {
    let cfg = ctx.cfg.marstrand.as_ref().expect("checked");
    let (k1, k2) = (ctx.system(&cfg.pair.0), ctx.system(&cfg.pair.1));
    let f1 = Factor::identity(k1, 0);
    let f2 = Factor::identity(k2, 0);
    let mut t = ctx.table(Command::Marstrand, &["rho", "rectangles", "integral"]);
    let mut counts = ctx.table(Command::Marstrand, &["rho", "s", "count"]);
    for tab in [&mut t, &mut counts] {
        tab.meta("pair", format!("{} x {}", cfg.pair.0, cfg.pair.1))
            .meta_num("c0", cfg.c0)
            .meta_num("R", cfg.r)
            .meta("start_symbols", "0, 0");
    }
    let mut partial = None;
    let mut pts = Vec::new();
    for rho in cfg.rho.values() {
        let t0 = Instant::now();
        let rects = match delta_rectangles(&f1, &f2, rho, cfg.c0, ctx.budget) {
            Ok(r) => r,
            Err(e) if is_budget(&e) => {
                partial = Some(e);
                break;
            }
            Err(e) => return Err(e),
        };
        let integral = integral_estimate(&rects, cfg.r);
        pts.push((rho.ln(), integral.ln()));
        push_row(ctx, &mut t, vec![rho.into(), rects.len().into(), integral.into()], t0);
        for &s in &cfg.s_values {
            let t1 = Instant::now();
            push_row(ctx, &mut counts, vec![rho.into(), s.into(), count_overlaps(&rects, s).into()], t1);
        }
    }
    if pts.len() >= 2 {
        let (slope, intercept) = least_squares(&pts);
        t.meta("slope", fmt_num(slope)).meta("intercept", fmt_num(intercept));
    }
    let plot = LinePlot {
        title: "integral of N over [-R, R]".into(),
        x_label: "log rho".into(),
        y_label: "log integral".into(),
        series: vec![("integral".into(), pts)],
    };
    let mut out = Vec::new();
    finish(ctx, "marstrand", &mut t, Some(plot), &partial, &mut out);
    if !cfg.s_values.is_empty() {
        finish(ctx, "marstrand_counts", &mut counts, None, &partial, &mut out);
    }
    Ok((out, partial))
}

fn run_sumscan(ctx: &Ctx<'_>) -> Result<Exec> {
    let cfg = ctx.cfg.sumscan.as_ref().expect("checked");
    let (k1, k2) = (ctx.system(&cfg.pair.0), ctx.system(&cfg.pair.1));
    let b1 = ctx.bracket(&cfg.pair.0, cfg.bracket_depth)?;
    let b2 = ctx.bracket(&cfg.pair.1, cfg.bracket_depth)?;
    let expected = cfg.expected.unwrap_or((b1.d_lower + b2.d_lower).min(1.0));
    let deltas = cfg.deltas.values();
    let grid = cfg.s_grid.values();
    let family = cfg.family;
    let t0 = Instant::now();
    let rows = dimension_scan(
        |s| match family {
            MapFamily::LinearProjection => BivariateMap::LinearProjection { s },
            MapFamily::Sum => BivariateMap::Sum { s },
        },
        &grid,
        k1,
        k2,
        &deltas,
        expected,
        cfg.tolerance,
        ctx.budget,
    );
    let rows = match rows {
        Ok(r) => r,
        Err(e) if is_budget(&e) => {
            let mut t = ctx.table(Command::SumScan, &["s", "slope", "residual", "flagged"]);
            let mut out = Vec::new();
            finish(ctx, "sumscan", &mut t, None, &Some(e.clone()), &mut out);
            return Ok((out, Some(e)));
        }
        Err(e) => return Err(e),
    };
    let mut cols: Vec<String> = ["s", "slope", "residual", "flagged"].iter().map(|s| s.to_string()).collect();
    cols.extend(deltas.iter().map(|d| format!("N({})", fmt_num(*d))));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = ctx.table(Command::SumScan, &col_refs);
    t.meta("pair", format!("{} x {}", cfg.pair.0, cfg.pair.1))
        .meta("family", format!("{family:?}"))
        .meta_num("expected", expected)
        .meta_num("tolerance", cfg.tolerance)
        .meta("fit_scales", FIT_SCALES)
        .meta("bracket_depth", cfg.bracket_depth)
        .meta("brackets", format!(
            "[{}, {}] + [{}, {}]",
            fmt_num(b1.d_lower),
            fmt_num(b1.d_upper),
            fmt_num(b2.d_lower),
            fmt_num(b2.d_upper)
        ))
        .meta("within_tolerance", format!("{}/{}", rows.iter().filter(|r| !r.flagged).count(), rows.len()));
    for r in &rows {
        let mut row: Vec<crate::report::Cell> = vec![r.s.into(), r.slope.into(), r.residual.into(), r.flagged.into()];
        row.extend(r.counts.iter().map(|c| c.1.into()));
        push_row(ctx, &mut t, row, t0);
    }
    let plot = LinePlot {
        title: "box-counting slope".into(),
        x_label: "s".into(),
        y_label: "slope".into(),
        series: vec![
            ("slope".into(), rows.iter().map(|r| (r.s, r.slope)).collect()),
            ("expected".into(), grid.iter().map(|&s| (s, expected)).collect()),
        ],
    };
    let mut out = Vec::new();
    finish(ctx, "sumscan", &mut t, Some(plot), &None, &mut out);
    Ok((out, None))
}

fn run_extract(ctx: &Ctx<'_>) -> Result<Exec> {
    let cfg = ctx.cfg.extract.as_ref().expect("checked");
    let sys = ctx.system(&cfg.system);
    let parent = ctx.bracket(&cfg.system, cfg.bracket_depth)?;
    let r = extract_subcantor(sys, cfg.a, cfg.b, parent.d_lower, cfg.target, ctx.budget)?;
    let names = sys.spec().names();
    let mut t = ctx.table(Command::Extract, &["word", "big_lambda", "lambda"]);
    t.meta("system", &cfg.system)
        .meta_num("a", cfg.a)
        .meta_num("b", cfg.b)
        .meta("target", format!("{:?}", cfg.target))
        .meta("n", r.n)
        .meta("markers", format!("{} {}", names[r.markers.0], names[r.markers.1]))
        .meta_num("c_hat", r.c_hat)
        .meta_num("c_hat_factor", C_HAT_FACTOR)
        .meta_num("d_n", r.d_n)
        .meta_num("kept_sum", r.kept_sum)
        .meta_num("sum_with_pivot", r.sum_with_pivot)
        .meta_num("lower_sum", r.lower_sum)
        .meta_num("upper_sum", r.upper_sum)
        .meta("pivot", word_text(names, &r.pivot.symbols))
        .meta("audit_depth", AUDIT_DEPTH)
        .meta("bracket", format!("[{}, {}]", fmt_num(r.bracket.d_lower), fmt_num(r.bracket.d_upper)));
    for w in &r.kept {
        let mut row: Vec<crate::report::Cell> =
            vec![word_text(names, &w.symbols).into(), w.big_lambda.into(), w.lambda.into()];
        if ctx.opts.timings {
            row.push("".into());
        }
        t.push(row);
    }
    let mut out = Vec::new();
    finish(ctx, "extract", &mut t, None, &None, &mut out);
    let emitted = ExperimentConfig {
        systems: vec![SystemDef::explicit(&format!("{}_sub", cfg.system), &r.system)],
        budget: ctx.budget,
        output: None,
        dim: None,
        limitgeom: None,
        marstrand: None,
        sumscan: None,
        extract: None,
        recurrence: None,
    };
    out.push(Artifact {
        file: "extract_system.toml".into(),
        contents: emitted.to_toml()?,
    });
    Ok((out, None))
}

fn word_text(names: &[String], w: &[usize]) -> String {
    w.iter().map(|&a| names[a].as_str()).collect::<Vec<_>>().join(" ")
}

fn run_recurrence(ctx: &Ctx<'_>) -> Result<Exec> {
    let cfg = ctx.cfg.recurrence.as_ref().expect("checked");
    let (k1, k2) = (ctx.system(&cfg.pair.0), ctx.system(&cfg.pair.1));
    let b1 = ctx.bracket(&cfg.pair.0, cfg.bracket_depth)?;
    let b2 = ctx.bracket(&cfg.pair.1, cfg.bracket_depth)?;
    let dim_sum = b1.d_lower + b2.d_lower;
    let mut pair = ScalePair::new(k1, k2);
    pair.c0 = cfg.c0;
    pair.budget = ctx.budget;
    let grid = crate::scale_space::log_grid(cfg.r, cfg.per_sign);
    let tails: Vec<(Vec<usize>, Vec<usize>)> = (0..k1.spec().alphabet_len())
        .flat_map(|a| (0..k2.spec().alphabet_len()).map(move |b| (a, b)))
        .map(|(a, b)| (default_tail(k1, a, cfg.tail_len), default_tail(k2, b, cfg.tail_len)))
        .collect();
    let t0 = Instant::now();
    let c5 = match cfg.c5 {
        Some(c) => c,
        None => calibrate_c5(&pair, &tails, &grid, cfg.rho, cfg.m, dim_sum, C5_FACTOR)?,
    };
    let rows = empirical_recurrence_map(&pair, cfg.rho, &grid, cfg.m, c5, dim_sum, cfg.r, cfg.tail_len)?;
    let mut t = ctx.table(Command::Recurrence, &["last", "last2", "s", "good", "fraction", "pairs"]);
    t.meta("pair", format!("{} x {}", cfg.pair.0, cfg.pair.1))
        .meta_num("rho", cfg.rho)
        .meta("m", cfg.m)
        .meta_num("R", cfg.r)
        .meta_num("c0", cfg.c0)
        .meta_num("c5", c5)
        .meta("c5_source", if cfg.c5.is_some() { "config" } else { "calibrated" })
        .meta_num("c5_factor", C5_FACTOR)
        .meta_num("dim_sum", dim_sum)
        .meta("tail_len", cfg.tail_len)
        .meta("max_tail", DEFAULT_MAX_TAIL)
        .meta_num("alpha", cfg.alpha);
    for r in &rows {
        push_row(
            ctx,
            &mut t,
            vec![r.last.0.into(), r.last.1.into(), r.s.into(), r.good.into(), r.fraction.into(), r.pairs.into()],
            t0,
        );
    }
    let plot = LinePlot {
        title: "recurrence fraction".into(),
        x_label: "s".into(),
        y_label: "fraction".into(),
        series: tails
            .iter()
            .map(|(a, b)| {
                let key = (*a.last().expect("tail"), *b.last().expect("tail"));
                (
                    format!("({}, {})", key.0, key.1),
                    rows.iter().filter(|r| r.last == key).map(|r| (r.s, r.fraction)).collect(),
                )
            })
            .collect(),
    };
    let mut out = Vec::new();
    finish(ctx, "recurrence", &mut t, Some(plot), &None, &mut out);
    Ok((out, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
[[system]]
kind = "middle_alpha"
name = "C"
alpha = 0.3333333333333333

[dim]
systems = ["C"]
depths = [4, 8]
"#;

    #[test]
    fn dim_middle_third() {
        let a = artifacts(Command::Dim, CFG, &RunOptions::default()).unwrap();
        let csv = &a[0].contents;
        assert!(csv.contains("# config_sha256: "));
        let last = csv.lines().last().unwrap();
        assert!(last.starts_with("C,8,0.630929753571,0.630929753571"), "{last}");
    }

    #[test]
    fn missing_section() {
        assert!(matches!(
            artifacts(Command::Marstrand, CFG, &RunOptions::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
