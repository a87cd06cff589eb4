//! Command line front end.

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gpbg_core::board::{partition_classes, reduce_to_echelon, reduction_graph};
use gpbg_core::forest::build_forest;
use gpbg_core::kernel::{build_kernels, combine_factors, schedule_factor, DimMode, NormBound};
use gpbg_core::map::{enumerate_maps, CollisionMap};

use crate::error::{GpbgError, Result};
use crate::formats;
use crate::report::{reports_to_csv, reports_to_json, CheckReport};
use crate::suite::{run_all, run_target, SuiteConfig, Target, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gpbg",
    version,
    about = "Collision-map board game, kernel algebra and numeric checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Number of outer particles.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Number of Duhamel levels.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Collision map as comma-separated entries μ(k+1),…,μ(k+n).
    #[arg(long, global = true, value_delimiter = ',')]
    pub map: Option<Vec<usize>>,
    /// Grid points of the numeric checks (power of two, at least 8).
    #[arg(long = "N", global = true)]
    pub grid_n: Option<usize>,
    /// Box length of the numeric checks.
    #[arg(long = "L", global = true)]
    pub box_l: Option<f64>,
    /// Gauss-Legendre order per simplex coordinate.
    #[arg(long, global = true, default_value_t = 6)]
    pub quad: usize,
    /// Seed of the random corpora.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    pub seed: u64,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads.
    #[arg(long, global = true, env = "GPBG_JOBS")]
    pub jobs: Option<usize>,
    /// Dimension mode of the bound scheduler: 1, 2, or 3 for d ≥ 3.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub dim: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Invariance,
    DomainUnion,
    Factorization,
    Hierarchy,
    Dispersive,
    Trilinear,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every collision map of size (k, n).
    Enumerate,
    /// Reduce --map to special upper echelon form.
    Reduce,
    /// Partition all maps of size (k, n) into echelon classes.
    Classes,
    /// Binary forest of --map.
    Forest,
    /// Symbolic one-particle kernels of --map.
    Kernels,
    /// Bound exponents of --map, or of every class representative of (k, n).
    Schedule,
    /// Run a numeric verification suite.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| e.to_string())
}

impl VerifyTarget {
    fn target(self) -> Option<Target> {
        match self {
            VerifyTarget::Invariance => Some(Target::Invariance),
            VerifyTarget::DomainUnion => Some(Target::DomainUnion),
            VerifyTarget::Factorization => Some(Target::Factorization),
            VerifyTarget::Hierarchy => Some(Target::Hierarchy),
            VerifyTarget::Dispersive => Some(Target::Dispersive),
            VerifyTarget::Trilinear => Some(Target::Trilinear),
            VerifyTarget::All => None,
        }
    }
}

impl Options {
    fn need(&self, v: Option<usize>, flag: &str) -> Result<usize> {
        v.ok_or_else(|| GpbgError::Invalid(format!("--{flag} is required")))
    }

    fn collision_map(&self) -> Result<CollisionMap> {
        let mu = self
            .map
            .clone()
            .ok_or_else(|| GpbgError::Invalid("--map is required".into()))?;
        let k = self.need(self.k, "k")?;
        if let Some(n) = self.n {
            if n != mu.len() {
                return Err(GpbgError::Invalid(format!(
                    "--n {n} but --map has {} entries",
                    mu.len()
                )));
            }
        }
        Ok(CollisionMap::new(k, mu)?)
    }

    fn dim_mode(&self) -> DimMode {
        DimMode::ALL[usize::from(self.dim) - 1]
    }

    fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            k: self.k,
            n: self.n,
            grid_n: self.grid_n,
            l: self.box_l,
            quad: self.quad,
            seed: self.seed,
        }
    }
}

/// Rendered command output and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, pass: true }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn unsupported(cmd: &str, f: Format) -> GpbgError {
    GpbgError::Invalid(format!("{cmd} does not support --format {f:?}").to_lowercase())
}

fn schedule_map(m: &CollisionMap, mode: DimMode) -> Result<(Vec<NormBound>, NormBound)> {
    let fk = build_kernels(&build_forest(m))?;
    let bounds = fk
        .factors
        .iter()
        .map(|f| schedule_factor(&fk.arena, f, mode))
        .collect::<gpbg_core::Result<Vec<_>>>()?;
    let total = combine_factors(&bounds, m.k(), m.n())?;
    Ok((bounds, total))
}

pub fn execute(cmd: &Command, o: &Options) -> Result<Outcome> {
    let f = o.format;
    match cmd {
        Command::Enumerate => {
            let (k, n) = (o.need(o.k, "k")?, o.need(o.n, "n")?);
            let maps = enumerate_maps(k, n)?;
            Ok(Outcome::ok(match f {
                Format::Json => json_text(&json!({
                    "k": k, "n": n, "count": maps.len(),
                    "maps": maps.iter().map(|m| m.mu()).collect::<Vec<_>>(),
                })),
                Format::Csv => formats::maps_to_csv(&maps),
                Format::Pretty => maps.iter().map(|m| formats::join(m.mu()) + "\n").collect(),
                Format::Dot => return Err(unsupported("enumerate", f)),
            }))
        }
        Command::Reduce => {
            let m = o.collision_map()?;
            let r = reduce_to_echelon(&m);
            Ok(Outcome::ok(match f {
                Format::Json => json_text(&json!({
                    "map": formats::map_to_json(&m),
                    "representative": formats::matrix_to_json(&r.representative),
                    "sigma": r.sigma.as_slice(),
                    "moves": r.moves,
                })),
                Format::Pretty => format!(
                    "[{}] -> [{}] sigma=[{}] moves=[{}]\n",
                    formats::join(m.mu()),
                    formats::join(r.representative.highlights()),
                    formats::join(r.sigma.as_slice()),
                    formats::join(&r.moves)
                ),
                Format::Dot => formats::reduction_graph_to_dot(&reduction_graph(&m)),
                Format::Csv => return Err(unsupported("reduce", f)),
            }))
        }
        Command::Classes => {
            let (k, n) = (o.need(o.k, "k")?, o.need(o.n, "n")?);
            let classes = partition_classes(k, n)?;
            Ok(Outcome::ok(match f {
                Format::Json => json_text(&formats::classes_to_json(k, n, &classes)),
                Format::Csv => formats::classes_to_csv(&classes),
                Format::Pretty => {
                    let mut s = format!(
                        "{} classes (bound {})\n",
                        classes.len(),
                        gpbg_core::board::echelon_class_bound(k, n)
                    );
                    for c in &classes {
                        s += &format!(
                            "[{}]: {} members\n",
                            formats::join(c.representative.highlights()),
                            c.len()
                        );
                    }
                    s
                }
                Format::Dot => return Err(unsupported("classes", f)),
            }))
        }
        Command::Forest => {
            let forest = build_forest(&o.collision_map()?);
            Ok(Outcome::ok(match f {
                Format::Json => json_text(&formats::forest_to_json(&forest)),
                Format::Dot => formats::forest_to_dot(&forest),
                Format::Pretty => {
                    let mut s = String::new();
                    for j in 1..=forest.k() {
                        let t = forest.tree(j);
                        let mark = if j == forest.distinguished_index() { "*" } else { " " };
                        s += &format!(
                            "{mark}τ{j}: internal [{}] leaves [{}]\n",
                            formats::join(&t.internal),
                            formats::join(&t.leaves)
                        );
                    }
                    s
                }
                Format::Csv => return Err(unsupported("forest", f)),
            }))
        }
        Command::Kernels => {
            let fk = build_kernels(&build_forest(&o.collision_map()?))?;
            Ok(Outcome::ok(match f {
                Format::Json => json_text(&formats::kernels_to_json(&fk)),
                Format::Pretty => formats::kernels_to_pretty(&fk),
                _ => return Err(unsupported("kernels", f)),
            }))
        }
        Command::Schedule => schedule(o),
        Command::Verify { target } => {
            let cfg = o.suite_config();
            let reports = match target.target() {
                Some(t) => run_target(t, &cfg)?,
                None => run_all(&cfg)?,
            };
            Ok(render_reports(&reports, f)?)
        }
    }
}

fn schedule(o: &Options) -> Result<Outcome> {
    let mode = o.dim_mode();
    let f = o.format;
    if o.map.is_some() {
        let m = o.collision_map()?;
        let (bounds, total) = schedule_map(&m, mode)?;
        return Ok(Outcome::ok(match f {
            Format::Json => json_text(&json!({
                "map": formats::map_to_json(&m),
                "factors": bounds.iter().map(formats::bound_to_json).collect::<Vec<_>>(),
                "combined": formats::bound_to_json(&total),
            })),
            Format::Pretty => total.pretty() + "\n",
            _ => return Err(unsupported("schedule", f)),
        }));
    }
    let (k, n) = (o.need(o.k, "k")?, o.need(o.n, "n")?);
    let mut rows = Vec::new();
    for c in partition_classes(k, n)? {
        let rep = CollisionMap::from_matrix(&c.representative);
        let (_, total) = schedule_map(&rep, mode)?;
        rows.push((rep, total));
    }
    Ok(Outcome::ok(match f {
        Format::Json => json_text(&json!({
            "k": k, "n": n,
            "classes": rows.iter().map(|(m, b)| json!({"mu": m.mu(), "combined": formats::bound_to_json(b)})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("mu,time_power,phi_power,prefactor_log2\n");
            for (m, b) in &rows {
                s += &format!(
                    "{},{},{},{}\n",
                    formats::join(m.mu()),
                    b.time_power,
                    b.phi_power,
                    b.prefactor_log2
                );
            }
            s
        }
        Format::Pretty => rows
            .iter()
            .map(|(m, b)| format!("[{}] {}\n", formats::join(m.mu()), b.pretty()))
            .collect(),
        Format::Dot => return Err(unsupported("schedule", f)),
    }))
}

fn render_reports(reports: &[CheckReport], f: Format) -> Result<Outcome> {
    let pass = reports.iter().all(|r| r.pass);
    let text = match f {
        Format::Json => json_text(&reports_to_json(reports)),
        Format::Csv => reports_to_csv(reports),
        Format::Pretty => reports.iter().map(|r| r.pretty() + "\n").collect(),
        Format::Dot => return Err(unsupported("verify", f)),
    };
    Ok(Outcome { text, pass })
}

fn emit(o: &Options, text: &str) -> Result<()> {
    match &o.output {
        Some(path) => formats::write_atomic(path, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return EXIT_USAGE;
        }
    };
    if let Some(jobs) = cli.opts.jobs {
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let result = execute(&cli.command, &cli.opts).and_then(|out| emit(&cli.opts, &out.text).map(|()| out.pass));
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_guard() {
                EXIT_GUARD
            } else {
                EXIT_USAGE
            }
        }
    }
}
