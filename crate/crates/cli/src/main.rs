use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use composable_fabric::cost::{sweep_to_csv, SweepRow};
use composable_fabric::workload::TABLE1_CSV;
use composable_fabric::{
    builtin_table1, max_throughput_generic, max_throughput_targeted, place_all, scenarios, sweep,
    validate_dc, validate_plan, CostParams, DemandMatrix, GenericFabric, Mode, Scenario, Scope,
    TargetedFabric, WorkloadSet,
};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] composable_fabric::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
}

#[derive(Parser)]
#[command(
    name = "composable-fabric",
    version,
    about = "Composable rack placement, fabric throughput and cost experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Targeted,
    Generic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Traditional,
    Physical,
    Logical,
    Hybrid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Traditional => Mode::Traditional,
            ModeArg::Physical => Mode::Physical,
            ModeArg::Logical => Mode::Logical,
            ModeArg::Hybrid => Mode::Hybrid,
        }
    }
}

#[derive(clap::Args)]
struct Output {
    /// Output file; `.csv` selects CSV, anything else JSON. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format when it cannot be inferred from `--out`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Check scenario, workload and demand files. Exits 1 if any violation is found.
    Validate {
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        workloads: Option<String>,
        #[arg(long)]
        demand: Option<PathBuf>,
    },
    /// Place a workload set onto a scenario.
    Place {
        /// Scenario file, or the name of a built-in scenario.
        #[arg(long)]
        scenario: String,
        /// Workload CSV, or `table1` for the built-in table.
        #[arg(long, default_value = "table1")]
        workloads: String,
        /// Overrides the scenario's disaggregation mode.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Overrides the scenario's physical scale (`rack`, `pod` or `dc`).
        #[arg(long)]
        physical_scale: Option<String>,
        /// Accept a greedy result when the instance is too large for the exact solver.
        #[arg(long)]
        allow_heuristic: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Maximum carried traffic of a rack fabric for a demand matrix.
    Throughput {
        #[arg(long)]
        demand: PathBuf,
        #[arg(long, value_enum, default_value = "targeted")]
        design: DesignArg,
        /// Transceivers per interface (targeted).
        #[arg(long, default_value_t = TargetedFabric::DEFAULT_T)]
        t: usize,
        /// Per-wavelength rate in Gbps (targeted).
        #[arg(long, default_value_t = TargetedFabric::DEFAULT_RATE_GBPS)]
        rate: f64,
        /// Per-link capacity in Gbps (generic).
        #[arg(long, default_value_t = GenericFabric::DEFAULT_LINK_CAPACITY_GBPS)]
        link_cap: f64,
        #[command(flatten)]
        output: Output,
    },
    /// CAPEX of both fabrics over a grid of rack sizes and targeted prices.
    CostSweep {
        /// Node counts, `a..b` inclusive or a single value.
        #[arg(long)]
        n: String,
        /// Targeted price in $/Gbps, `a..b` inclusive (integer steps) or a single value.
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 800.0)]
        cap: f64,
        #[arg(long, default_value_t = 4)]
        t: u64,
        #[arg(long, default_value_t = 100.0)]
        rate: f64,
        #[arg(long, default_value_t = 1.0)]
        price_generic: f64,
        #[command(flatten)]
        output: Output,
    },
    /// List the built-in scenarios, or write them (and the reference workloads) into a directory.
    Scenarios {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let record = ErrorRecord {
                error: e.kind(),
                message: e.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&record).expect("error record serializes")
            );
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::Validate {
            scenario,
            workloads,
            demand,
        } => validate(scenario.as_deref(), workloads.as_deref(), demand.as_deref()),
        Command::Place {
            scenario,
            workloads,
            mode,
            physical_scale,
            allow_heuristic,
            output,
        } => {
            let mut s = load_scenario(&scenario)?;
            let ws = load_workload_arg(&workloads)?;
            if let Some(m) = mode {
                s.disaggregation.mode = m.into();
            }
            if let Some(scale) = physical_scale {
                s.disaggregation.physical_scale = parse_scope(&scale)?;
            }
            let report = place_all(&ws, &s.dc, &s.disaggregation)?;
            if report.heuristic && !allow_heuristic {
                return Err(composable_fabric::Error::BoundExceeded {
                    solver: "placement",
                    detail: format!(
                        "{} components / {} apps is beyond the exact solver; pass --allow-heuristic",
                        s.dc.component_count(),
                        ws.len()
                    ),
                }
                .into());
            }
            let text = match output.resolve(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Throughput {
            demand,
            design,
            t,
            rate,
            link_cap,
            output,
        } => {
            let d = DemandMatrix::load(&demand)?;
            let report = match design {
                DesignArg::Targeted => {
                    max_throughput_targeted(&TargetedFabric::new(d.n(), t, rate), &d)?
                }
                DesignArg::Generic => {
                    if !(link_cap > 0.0 && link_cap.is_finite()) {
                        return Err(CliError::Usage(format!(
                            "--link-cap must be positive, got {link_cap}"
                        )));
                    }
                    max_throughput_generic(&GenericFabric::new(d.n(), link_cap), &d)?
                }
            };
            let text = match output.resolve(Format::Json) {
                Format::Json => report.to_json(),
                Format::Csv => report.schedule_csv(),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CostSweep {
            n,
            y,
            cap,
            t,
            rate,
            price_generic,
            output,
        } => {
            let ns: Vec<u64> = parse_range(&n, "--n")?
                .into_iter()
                .map(|v| v as u64)
                .collect();
            let ys = parse_range(&y, "--y")?;
            let base = CostParams {
                generic_cap_gbps: cap,
                targeted_t: t,
                targeted_rate_gbps: rate,
                price_generic_per_gbps: price_generic,
                ..CostParams::default()
            };
            for &n in &ns {
                for &y in &ys {
                    CostParams {
                        n_nodes: n,
                        price_targeted_per_gbps: y,
                        ..base
                    }
                    .validate()?;
                }
            }
            let rows = sweep(&ns, &ys, &base);
            let text = match output.resolve(Format::Csv) {
                Format::Csv => sweep_to_csv(&rows),
                Format::Json => sweep_json(&rows),
            };
            emit(output.out.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Scenarios { out } => {
            let builtins = scenarios::builtin_scenarios();
            match out {
                None => {
                    let names: Vec<&str> = builtins.iter().map(|(name, _)| *name).collect();
                    emit(None, &format!("{}\n", names.join("\n")))?;
                }
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    for (name, s) in &builtins {
                        write_file(&dir.join(name), &s.to_json())?;
                    }
                    write_file(&dir.join("table1.csv"), TABLE1_CSV)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct Finding {
    file: String,
    entity: String,
    violation: String,
}

fn validate(
    scenario: Option<&str>,
    workloads: Option<&str>,
    demand: Option<&Path>,
) -> CliResult<ExitCode> {
    if scenario.is_none() && workloads.is_none() && demand.is_none() {
        return Err(CliError::Usage(
            "nothing to validate; pass --scenario, --workloads or --demand".into(),
        ));
    }
    let mut findings = Vec::new();
    if let Some(path) = scenario {
        let s = load_scenario(path)?;
        for v in validate_dc(&s.dc, &s.disaggregation) {
            findings.push(Finding {
                file: path.to_owned(),
                entity: v.entity().to_owned(),
                violation: v.to_string(),
            });
        }
    }
    if let Some(path) = workloads {
        // Workload invariants are enforced while loading.
        load_workload_arg(path)?;
    }
    if let Some(path) = demand {
        let d = DemandMatrix::load(path)?;
        for v in validate_plan(&TargetedFabric::with_defaults(d.n())) {
            findings.push(Finding {
                file: path.display().to_string(),
                entity: "fabric".into(),
                violation: v.to_string(),
            });
        }
    }
    let text = serde_json::to_string_pretty(&findings).expect("findings serialize");
    emit(None, &format!("{text}\n"))?;
    Ok(if findings.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

impl Output {
    fn resolve(&self, default: Format) -> Format {
        if let Some(f) = self.format {
            return f;
        }
        match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            Some(_) => Format::Json,
            None => default,
        }
    }
}

/// A scenario file, falling back to a built-in scenario of the same name.
fn load_scenario(arg: &str) -> CliResult<Scenario> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(Scenario::load(path)?);
    }
    let wanted = arg.strip_suffix(".json").unwrap_or(arg);
    scenarios::builtin_scenarios()
        .into_iter()
        .find(|(name, _)| name.strip_suffix(".json") == Some(wanted))
        .map(|(_, s)| s)
        .ok_or_else(|| CliError::Io {
            path: path.to_owned(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such file or built-in scenario",
            ),
        })
}

fn load_workload_arg(arg: &str) -> CliResult<WorkloadSet> {
    if arg.eq_ignore_ascii_case("table1") && !Path::new(arg).exists() {
        return Ok(builtin_table1());
    }
    Ok(WorkloadSet::load(arg)?)
}

fn parse_scope(s: &str) -> CliResult<Scope> {
    Scope::parse(s).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown scope {s:?}; expected node, rack, pod or dc"
        ))
    })
}

/// `a..b` (inclusive, integer steps) or a single number.
fn parse_range(s: &str, flag: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("{flag}: expected a..b or a number, got {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(CliError::Usage(format!("{flag}: empty range {s:?}")));
            }
            Ok((a..=b).map(|v| v as f64).collect())
        }
        None => {
            let v: f64 = s.trim().parse().map_err(|_| bad())?;
            if flag == "--n" && v.fract() != 0.0 {
                return Err(bad());
            }
            Ok(vec![v])
        }
    }
}

fn sweep_json(rows: &[SweepRow]) -> String {
    let mut text = serde_json::to_string_pretty(rows).expect("sweep rows serialize");
    text.push('\n');
    text
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
