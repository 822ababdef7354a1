use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use riflex_core::io::config::{load_config, EffectiveConfig, ResolvedConfig, StrategySection};
use riflex_core::io::format::{fmt_float, matrix_csv, table_csv, to_json};
use riflex_core::io::frames::load_frames;
use riflex_core::io::svg::heatmap;
use riflex_core::{
    aggregate, check_non_repetition, diagnostics_table, identify_intrinsic, norepeat_score,
    propose_observed_n, strategy_report, AliasScanParams, Axis, AxisPlan, DiagnosticsRow, Error,
    ExtrapolationParams, FrequencySpec, IntrinsicResult, NoRepeatConfig, NoRepeatReport,
    NonRepetition, SimilarityReport, Strategy, StrategyResult,
};
use serde::{Deserialize, Serialize};

use crate::{
    Cli, Command, Format, FreqsArgs, IntrinsicArgs, NorepeatArgs, SimulateArgs, StrategyArgs,
    VerifyArgs,
};

pub const EXIT_VERIFY_FAILED: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }

    fn config(e: Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// Config-type core errors raised by flag values count as config errors,
    /// the rest as data errors.
    fn classify(e: Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Config(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("--config <PATH> is required".into()))?;
    let config = load_config(path)
        .and_then(|c| c.resolve())
        .map_err(CliError::config)?;

    if cli.print_effective_config {
        let text = to_json(&EffectiveConfig::from(&config)).map_err(CliError::classify)?;
        emit(cli.output.as_deref(), &text)?;
        return Ok(0);
    }

    let (text, code) = match &cli.command {
        Command::Freqs(a) => (freqs(&config, a)?, 0),
        Command::Strategy(a) => (strategy(&config, a)?, 0),
        Command::Intrinsic(a) => (intrinsic(&config, a)?, 0),
        Command::Simulate(a) => (simulate(&config, a)?, 0),
        Command::Norepeat(a) => (norepeat(&config, a)?, 0),
        Command::Verify(a) => verify(&config, a)?,
    };
    emit(cli.output.as_deref(), &text)?;
    Ok(code)
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn selected_axes(config: &ResolvedConfig, axis: Option<Axis>) -> CliResult<Vec<Axis>> {
    match axis {
        Some(a) => {
            config.model.axis(a).map_err(CliError::config)?;
            Ok(vec![a])
        }
        None => Ok(config.model.axes().iter().map(|a| a.axis).collect()),
    }
}

#[derive(Serialize)]
struct FreqsAxis {
    axis: Axis,
    length: f64,
    rows: Vec<DiagnosticsRow<f64>>,
}

#[derive(Serialize)]
struct FreqsOutput {
    axes: Vec<FreqsAxis>,
}

fn freqs(config: &ResolvedConfig, args: &FreqsArgs) -> CliResult<String> {
    let mut axes = Vec::new();
    for axis in selected_axes(config, args.axis)? {
        let entry = config.model.axis(axis).map_err(CliError::config)?;
        let length = args.length.unwrap_or(entry.train_len as f64);
        let rows = diagnostics_table(&entry.spec, length).map_err(CliError::classify)?;
        axes.push(FreqsAxis { axis, length, rows });
    }
    match args.format {
        Format::Json => to_json(&FreqsOutput { axes }).map_err(CliError::classify),
        Format::Csv => {
            let rows = axes
                .iter()
                .flat_map(|a| {
                    a.rows.iter().map(move |r| {
                        vec![
                            a.axis.to_string(),
                            fmt_float(a.length),
                            r.j.to_string(),
                            fmt_float(r.theta),
                            fmt_float(r.period),
                            fmt_float(r.repeat_count),
                            fmt_float(r.max_adjacent_delta),
                        ]
                    })
                })
                .collect();
            table_csv(
                &[
                    "axis",
                    "length",
                    "j",
                    "theta",
                    "period",
                    "repeat_count",
                    "max_adjacent_delta",
                ],
                rows,
            )
            .map_err(CliError::classify)
        }
    }
}

/// Builds the plan for `axis` from the configured plan and command-line overrides.
/// A named strategy reuses the configured parameters when the names match.
fn plan_for(
    config: &ResolvedConfig,
    axis: Axis,
    name: Option<&str>,
    scale: Option<f64>,
    k: Option<usize>,
) -> CliResult<AxisPlan<f64>> {
    let configured = config.plans.get(&axis);
    let intrinsic_k = config.intrinsic.get(&axis).copied();
    let strategy = match (name, configured) {
        (Some(n), Some(p)) if p.strategy.name() == n => with_k(p.strategy.clone(), k),
        (Some(n), _) => {
            let mut section =
                StrategySection::from_name(n).map_err(|e| CliError::Usage(e.to_string()))?;
            if let Some(k) = k {
                section = section.with_k(k);
            }
            section
                .resolve("--strategy", intrinsic_k)
                .map_err(|e| CliError::Usage(format!("{e} (pass --k)")))?
        }
        (None, Some(p)) => with_k(p.strategy.clone(), k),
        (None, None) => {
            return Err(CliError::Usage(format!(
                "no strategy configured for axis `{axis}`; pass --strategy"
            )))
        }
    };
    let scale = scale.or(configured.map(|p| p.scale)).ok_or_else(|| {
        CliError::Usage(format!(
            "no scale configured for axis `{axis}`; pass --scale"
        ))
    })?;
    Ok(AxisPlan { strategy, scale })
}

fn with_k(strategy: Strategy<f64>, k: Option<usize>) -> Strategy<f64> {
    match (strategy, k) {
        (Strategy::Riflex { .. }, Some(k)) => Strategy::Riflex { k },
        (Strategy::RiflexBase { .. }, Some(k)) => Strategy::RiflexBase { k },
        (Strategy::RiflexAllLow { .. }, Some(k)) => Strategy::RiflexAllLow { k },
        (s, _) => s,
    }
}

#[derive(Serialize, Deserialize)]
struct StrategyAxis {
    axis: Axis,
    train_len: u64,
    scale: f64,
    target_len: f64,
    result: StrategyResult<f64>,
}

#[derive(Serialize, Deserialize)]
struct StrategyOutput {
    axes: Vec<StrategyAxis>,
}

/// Axes a strategy applies to: `--axis`, else every planned axis, else (when a
/// strategy is named) the first axis.
fn strategy_axes(config: &ResolvedConfig, axis: Option<Axis>, named: bool) -> CliResult<Vec<Axis>> {
    if let Some(a) = axis {
        return selected_axes(config, Some(a));
    }
    if !config.plans.is_empty() {
        return Ok(config.plans.keys().copied().collect());
    }
    if named {
        return Ok(vec![config.model.axes()[0].axis]);
    }
    Err(CliError::Usage(
        "config has no strategies; pass --strategy".into(),
    ))
}

fn strategy(config: &ResolvedConfig, args: &StrategyArgs) -> CliResult<String> {
    let mut axes = Vec::new();
    for axis in strategy_axes(config, args.axis, args.strategy.is_some())? {
        let plan = plan_for(config, axis, args.strategy.as_deref(), args.scale, args.k)?;
        let entry = config.model.axis(axis).map_err(CliError::config)?;
        let params =
            ExtrapolationParams::new(entry.train_len, plan.scale).map_err(CliError::classify)?;
        let result = plan
            .strategy
            .apply(&entry.spec, &params)
            .map_err(CliError::classify)?;
        axes.push(StrategyAxis {
            axis,
            train_len: entry.train_len,
            scale: plan.scale,
            target_len: params.target_len(),
            result,
        });
    }
    match args.format {
        Format::Json => to_json(&StrategyOutput { axes }).map_err(CliError::classify),
        Format::Csv => {
            let rows = axes
                .iter()
                .flat_map(|a| {
                    let r = &a.result;
                    r.thetas_old.iter().zip(&r.thetas_new).enumerate().map(
                        move |(i, (old, new))| {
                            vec![
                                a.axis.to_string(),
                                (i + 1).to_string(),
                                fmt_float(*old),
                                fmt_float(*new),
                                r.modified_indices.contains(&(i + 1)).to_string(),
                            ]
                        },
                    )
                })
                .collect();
            table_csv(&["axis", "j", "theta_old", "theta_new", "modified"], rows)
                .map_err(CliError::classify)
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "lowercase")]
enum Source {
    Observed,
    Proposed,
}

#[derive(Serialize)]
struct IntrinsicOutput {
    axis: Axis,
    source: Source,
    probe_len: Option<usize>,
    periods: Vec<f64>,
    result: IntrinsicResult<f64>,
}

fn intrinsic(config: &ResolvedConfig, args: &IntrinsicArgs) -> CliResult<String> {
    let axis = args.axis.unwrap_or(config.simulation_axis);
    let entry = config.model.axis(axis).map_err(CliError::config)?;
    let (source, probe_len, n) = match args.observed_n {
        Some(n) => (Source::Observed, None, n),
        None => {
            let probe = args.probe_len.unwrap_or(4 * entry.train_len as usize);
            let scan = if axis == config.simulation_axis {
                config.scan
            } else {
                AliasScanParams::for_train_len(entry.train_len)
            };
            let n = propose_observed_n(&entry.spec, probe, &scan).map_err(CliError::classify)?;
            (Source::Proposed, Some(probe), n)
        }
    };
    let result = identify_intrinsic(&entry.spec, n).map_err(CliError::classify)?;
    let periods = entry
        .spec
        .thetas()
        .iter()
        .map(|t| std::f64::consts::TAU / t)
        .collect();
    to_json(&IntrinsicOutput {
        axis,
        source,
        probe_len,
        periods,
        result,
    })
    .map_err(CliError::classify)
}

#[derive(Serialize)]
struct CompareEntry {
    strategy: String,
    full_alias_p: Option<usize>,
    intrinsic_alias_p: Option<usize>,
    motion_proxy: f64,
    motion_proxy_delta: f64,
    alias_p_delta: Option<i64>,
}

#[derive(Serialize)]
struct Comparison {
    baseline: String,
    entries: Vec<CompareEntry>,
}

#[derive(Serialize)]
struct SimulateOutput {
    reports: Vec<SimilarityReport<f64>>,
    comparison: Option<Comparison>,
}

fn compare(reports: &[SimilarityReport<f64>]) -> Comparison {
    let base = &reports[0];
    let base_p = base.first_alias().map(|a| a.p as i64);
    let entries = reports[1..]
        .iter()
        .map(|r| {
            let p = r.first_alias().map(|a| a.p as i64);
            CompareEntry {
                strategy: r.strategy.clone(),
                full_alias_p: r.full_spectrum.first_alias.map(|a| a.p),
                intrinsic_alias_p: r
                    .intrinsic
                    .as_ref()
                    .and_then(|s| s.first_alias)
                    .map(|a| a.p),
                motion_proxy: r.motion_proxy,
                motion_proxy_delta: r.motion_proxy - base.motion_proxy,
                alias_p_delta: p.zip(base_p).map(|(a, b)| a - b),
            }
        })
        .collect();
    Comparison {
        baseline: base.strategy.clone(),
        entries,
    }
}

/// `dir/stem-suffix.ext` when several files share one flag.
fn suffixed(path: &Path, suffix: Option<&str>) -> PathBuf {
    let Some(suffix) = suffix else {
        return path.to_path_buf();
    };
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{suffix}"),
    };
    path.with_file_name(name)
}

fn simulate(config: &ResolvedConfig, args: &SimulateArgs) -> CliResult<String> {
    let axis = args.axis.unwrap_or(config.simulation_axis);
    let entry = config.model.axis(axis).map_err(CliError::config)?;
    let names: Vec<Option<&str>> = if args.strategy.is_empty() {
        vec![None]
    } else {
        args.strategy.iter().map(|s| Some(s.as_str())).collect()
    };
    if args.compare && names.len() < 2 {
        return Err(CliError::Usage(
            "--compare needs at least two --strategy values".into(),
        ));
    }
    let intrinsic_k = args.k.or_else(|| config.intrinsic.get(&axis).copied());
    let scan = if axis == config.simulation_axis {
        config.scan
    } else {
        AliasScanParams::for_train_len(entry.train_len)
    };
    let scan = AliasScanParams::new(
        args.alias_threshold.unwrap_or(scan.alias_threshold),
        args.min_separation.unwrap_or(scan.min_separation),
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let positions = args
        .positions
        .or((axis == config.simulation_axis && args.scale.is_none()).then_some(config.positions));
    let scale = args.scale.or(Some(config.scale(axis).unwrap_or(2.0)));

    let mut reports = Vec::new();
    for name in &names {
        let plan = plan_for(config, axis, *name, scale, args.k)?;
        let report = strategy_report(&config.model, axis, &plan, positions, &scan, intrinsic_k)
            .map_err(CliError::classify)?;
        reports.push(report);
    }

    let many = reports.len() > 1;
    for (i, r) in reports.iter().enumerate() {
        let suffix = many.then(|| format!("{}-{}", i + 1, r.strategy.replace(['(', ')'], "")));
        if let Some(p) = &args.svg {
            let title = format!("{} {} s={}", r.strategy, r.axis, r.scale);
            write_file(&suffixed(p, suffix.as_deref()), &heatmap(&r.matrix, &title))?;
        }
        if let Some(p) = &args.matrix_csv {
            let text = matrix_csv(&r.matrix).map_err(CliError::classify)?;
            write_file(&suffixed(p, suffix.as_deref()), &text)?;
        }
    }

    let comparison = args.compare.then(|| compare(&reports));
    to_json(&SimulateOutput {
        reports,
        comparison,
    })
    .map_err(CliError::classify)
}

#[derive(Serialize)]
struct VideoEntry {
    input: String,
    report: NoRepeatReport<f64>,
}

#[derive(Serialize)]
struct Aggregate {
    videos: usize,
    nonrepetitive: usize,
    fraction: f64,
    norepeat_score: f64,
}

#[derive(Serialize)]
struct NorepeatOutput {
    config: NoRepeatConfig<f64>,
    videos: Vec<VideoEntry>,
    aggregate: Aggregate,
}

fn norepeat(config: &ResolvedConfig, args: &NorepeatArgs) -> CliResult<String> {
    let period = args
        .expected_period
        .or(config.expected_period)
        .ok_or_else(|| {
            CliError::Config(
                "norepeat.expected_period: required (config or --expected-period)".into(),
            )
        })?;
    let threshold = args.threshold.unwrap_or(config.norepeat_threshold);
    let window = args
        .window
        .or(config.norepeat_window)
        .unwrap_or_else(|| period.div_ceil(10));
    let normalize = args.normalize.map_or(config.normalize, Into::into);
    let cfg = NoRepeatConfig::with(period, threshold, window)
        .map_err(|e| CliError::Usage(e.to_string()))?
        .normalized(normalize);

    let mut videos = Vec::new();
    for input in &args.input {
        let seq =
            load_frames(input).map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
        let report = norepeat_score(&seq, &cfg)
            .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
        videos.push(VideoEntry {
            input: input.display().to_string(),
            report,
        });
    }
    let reports: Vec<_> = videos.iter().map(|v| v.report.clone()).collect();
    let fraction = aggregate(&reports).map_err(CliError::classify)?;
    let agg = Aggregate {
        videos: videos.len(),
        nonrepetitive: reports.iter().filter(|r| r.is_nonrepetitive).count(),
        fraction,
        norepeat_score: 100.0 * fraction,
    };

    if let Some(p) = &args.aggregate_csv {
        let rows = videos
            .iter()
            .map(|v| {
                vec![
                    v.input.clone(),
                    v.report.anchor_index.to_string(),
                    fmt_float(v.report.mean_distance),
                    v.report.is_nonrepetitive.to_string(),
                ]
            })
            .collect();
        let text = table_csv(
            &["input", "anchor_index", "mean_distance", "is_nonrepetitive"],
            rows,
        )
        .map_err(CliError::classify)?;
        write_file(p, &text)?;
    }

    to_json(&NorepeatOutput {
        config: cfg,
        videos,
        aggregate: agg,
    })
    .map_err(CliError::classify)
}

#[derive(Serialize)]
struct VerifyCheck {
    axis: Axis,
    strategy: String,
    train_len: u64,
    scale: f64,
    check: NonRepetition<f64>,
}

#[derive(Serialize)]
struct VerifyOutput {
    passed: bool,
    checks: Vec<VerifyCheck>,
}

fn verify(config: &ResolvedConfig, args: &VerifyArgs) -> CliResult<(String, u8)> {
    let entries: Vec<StrategyAxis> = match &args.thetas {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let parsed: StrategyOutput = serde_json::from_str(&text)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            parsed.axes
        }
        None => {
            let mut out = Vec::new();
            for axis in strategy_axes(config, None, false)? {
                let plan = plan_for(config, axis, None, None, None)?;
                let entry = config.model.axis(axis).map_err(CliError::config)?;
                let params = ExtrapolationParams::new(entry.train_len, plan.scale)
                    .map_err(CliError::classify)?;
                let result = plan
                    .strategy
                    .apply(&entry.spec, &params)
                    .map_err(CliError::classify)?;
                out.push(StrategyAxis {
                    axis,
                    train_len: entry.train_len,
                    scale: plan.scale,
                    target_len: params.target_len(),
                    result,
                });
            }
            out
        }
    };

    let mut by_axis: BTreeMap<Axis, StrategyAxis> = BTreeMap::new();
    for e in entries {
        if args.axis.is_none_or(|a| a == e.axis) {
            by_axis.insert(e.axis, e);
        }
    }
    if by_axis.is_empty() {
        return Err(CliError::Usage(
            "nothing to verify for the selected axis".into(),
        ));
    }

    let mut checks = Vec::new();
    for (axis, e) in by_axis {
        let k = args
            .k
            .or_else(|| config.intrinsic.get(&axis).copied())
            .ok_or_else(|| {
                CliError::Config(format!(
                    "no intrinsic_k for axis `{axis}`; set it in the config or pass --k"
                ))
            })?;
        let spec = FrequencySpec::from_thetas(e.result.thetas_new.clone(), e.result.base)
            .map_err(|x| CliError::Data(format!("thetas_new: {x}")))?;
        let check =
            check_non_repetition(&spec, e.train_len, e.scale, k).map_err(CliError::classify)?;
        checks.push(VerifyCheck {
            axis,
            strategy: e.result.strategy.clone(),
            train_len: e.train_len,
            scale: e.scale,
            check,
        });
    }
    let passed = checks.iter().all(|c| c.check.satisfied);
    let text = to_json(&VerifyOutput { passed, checks }).map_err(CliError::classify)?;
    Ok((text, if passed { 0 } else { EXIT_VERIFY_FAILED }))
}
