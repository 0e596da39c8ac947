//! `rgauge`: Robinson-gauge computations and experiments from the shell.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use robinson_gauge::approx::{approx_report, region_map, robinson_approximation, ApproxOptions};
use robinson_gauge::cutnorm::{cutdist_blockperm, cutnorm_exact, cutnorm_heuristic};
use robinson_gauge::gamma::{
    gamma_exhaustive, gamma_localsearch, gamma_lower_certificate, GammaEstimate,
    EXHAUSTIVE_MAX_RESOLUTION,
};
use robinson_gauge::graph::{
    gamma_star_exhaustive, gamma_star_localsearch, gamma_star_pair_ub, sample_w_random,
    spectral_ordering, VertexOrdering, EXHAUSTIVE_MAX_VERTICES,
};
use robinson_gauge::{GraphonSpec, StepGraphon};

use robinson_gauge_cli::config::ExperimentConfig;
use robinson_gauge_cli::experiments::{
    approx_experiment, approx_rows_to_csv, decay_experiment, recognition_experiment,
    records_to_csv,
};
use robinson_gauge_cli::io;
use robinson_gauge_cli::report::{
    to_json_pretty, ApproxReportJson, CertificateJson, CutNormJson, GammaEstimateJson, Manifest,
    RegionMapHeaderJson,
};
use robinson_gauge_cli::svg::{loglog_plot, Series};
use robinson_gauge_cli::CliError;

#[derive(Parser)]
#[command(
    name = "rgauge",
    version,
    about = "Robinson gauge for step graphons and sampled graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphonKind {
    Flat,
    Steep,
    Tight,
    Matrix,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// Graphon family to use.
    #[arg(long, value_enum)]
    graphon: GraphonKind,
    /// Plateau / peak probability (flat and steep).
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Band half-width of the flat family.
    #[arg(long, default_value_t = 0.3)]
    d: f64,
    /// Slope of the steep family.
    #[arg(long, default_value_t = 0.4)]
    c: f64,
    /// Matrix file for `--graphon matrix`.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

impl SpecArgs {
    fn spec(&self) -> Result<GraphonSpec, CliError> {
        Ok(match self.graphon {
            GraphonKind::Flat => GraphonSpec::flat(self.p, self.d)?,
            GraphonKind::Steep => GraphonSpec::steep(self.p, self.c)?,
            GraphonKind::Tight => GraphonSpec::TightExample,
            GraphonKind::Matrix => {
                let path = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| CliError::config("--graphon matrix needs --matrix <file>"))?;
                GraphonSpec::Matrix(io::load_graphon(path)?)
            }
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GammaMethodArg {
    Exhaustive,
    Local,
    Certificate,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingArg {
    Natural,
    Spectral,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutMethodArg {
    Exact,
    Heuristic,
    Auto,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a w-random graph and write it in the graph text format.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        /// Vertex count.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory (file name derives from the parameters).
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Gauge of a step graphon: exhaustive / local search / certificate.
    Gamma {
        /// Step graphon matrix file (alternative to --graphon).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        graphon: Option<GraphonKind>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0.3)]
        d: f64,
        #[arg(long, default_value_t = 0.4)]
        c: f64,
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Grid resolution for discretizing an analytic family.
        #[arg(long, default_value_t = 8)]
        resolution: usize,
        /// Refine the input by this factor before searching.
        #[arg(long, default_value_t = 1)]
        refine: usize,
        #[arg(long, value_enum, default_value_t = GammaMethodArg::Auto)]
        method: GammaMethodArg,
        /// Hill-climb restarts for the local search.
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Interval width in cells for the certificate search.
        #[arg(long, default_value_t = 1)]
        alpha_cells: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Discrete gauge of a stored graph under orderings.
    GammaGraph {
        /// Graph file in the sample format.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderingArg::Both)]
        ordering: OrderingArg,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Cut norm of a kernel, or of the difference of two graphons.
    Cutnorm {
        /// Kernel matrix file (entries in [-1,1]).
        #[arg(long)]
        input: Option<PathBuf>,
        /// First graphon for a difference.
        #[arg(long)]
        a: Option<PathBuf>,
        /// Second graphon for a difference.
        #[arg(long)]
        b: Option<PathBuf>,
        /// Estimate the block-permutation cut distance instead of the norm.
        #[arg(long, default_value_t = false)]
        distance: bool,
        /// Annealing budget for --distance.
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = CutMethodArg::Auto)]
        method: CutMethodArg,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Robinson approximation of a step graphon plus the error report.
    RobinsonApprox {
        #[arg(long)]
        input: PathBuf,
        /// Gauge estimate to use; estimated from the input when omitted.
        #[arg(long)]
        gamma: Option<f64>,
        /// Resolution of the emitted approximation.
        #[arg(long)]
        output_resolution: Option<usize>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Black/white/grey region classification of a step graphon.
    RegionMap {
        #[arg(long)]
        input: PathBuf,
        /// Number of threshold levels.
        #[arg(long, default_value_t = 13)]
        levels: usize,
        /// Mass parameter of the probe cells; derived from the gauge when
        /// omitted.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Decay-rate experiment over a size grid (CSV + manifest + SVG).
    Decay {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "runs/decay")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Approximation-bound corpus run (CSV + manifest).
    Approx {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of random perturbed instances on top of the built-ins.
        #[arg(long, default_value_t = 30)]
        count: usize,
        #[arg(long, default_value = "runs/approx")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recognition experiment: a Robinson source vs the fixed non-Robinson
    /// example.
    Recognize {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "runs/recognize")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rgauge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_config(
    path: &Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(w) = workers {
        cfg.workers = w.max(1);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

fn write_manifest(
    out: &Path,
    config: BTreeMap<String, String>,
    csv_name: &str,
    csv: &str,
    summary: serde_json::Value,
    started: Instant,
) -> Result<(), CliError> {
    let manifest = Manifest {
        tool: "rgauge",
        version: env!("CARGO_PKG_VERSION"),
        config,
        csv_file: csv_name.to_string(),
        csv_sha256: io::sha256_hex(csv.as_bytes()),
        summary,
        total_runtime_ms: started.elapsed().as_millis() as u64,
    };
    std::fs::write(out.join("manifest.json"), to_json_pretty(&manifest))?;
    Ok(())
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Sample { spec, n, seed, out } => {
            let g = sample_w_random(&spec.spec()?, n, seed)?;
            ensure_dir(&out)?;
            let name = format!("sample_n{n}_seed{seed}.graph");
            let path = out.join(&name);
            io::save_graph(&path, &g)?;
            println!(
                "{}",
                serde_json::json!({
                    "file": path.display().to_string(),
                    "n": n,
                    "seed": seed,
                    "edges": g.edge_count(),
                })
            );
            Ok(())
        }
        Command::Gamma {
            input,
            graphon,
            p,
            d,
            c,
            matrix,
            resolution,
            refine,
            method,
            restarts,
            alpha_cells,
            seed,
        } => {
            let w = match (&input, graphon) {
                (Some(path), _) => io::load_graphon(path)?,
                (None, Some(kind)) => {
                    let spec = SpecArgs {
                        graphon: kind,
                        p,
                        d,
                        c,
                        matrix,
                    }
                    .spec()?;
                    spec.discretize(resolution)?
                }
                (None, None) => return Err(CliError::config("gamma needs --input or --graphon")),
            };
            let w = if refine > 1 { w.refine(refine)? } else { w };
            match method {
                GammaMethodArg::Certificate => {
                    let cert = gamma_lower_certificate(w.kernel(), alpha_cells)?;
                    println!("{}", to_json_pretty(&CertificateJson::from(&cert)));
                }
                m => {
                    let est: GammaEstimate = match m {
                        GammaMethodArg::Exhaustive => gamma_exhaustive(w.kernel())?,
                        GammaMethodArg::Local => gamma_localsearch(w.kernel(), restarts, seed),
                        _ => {
                            if w.resolution() <= EXHAUSTIVE_MAX_RESOLUTION {
                                gamma_exhaustive(w.kernel())?
                            } else {
                                gamma_localsearch(w.kernel(), restarts, seed)
                            }
                        }
                    };
                    println!("{}", to_json_pretty(&GammaEstimateJson::from(&est)));
                }
            }
            Ok(())
        }
        Command::GammaGraph {
            input,
            ordering,
            restarts,
            seed,
        } => {
            let g = io::load_graph(&input)?;
            let mut orderings: Vec<VertexOrdering> = Vec::new();
            if matches!(ordering, OrderingArg::Natural | OrderingArg::Both) {
                orderings.push(VertexOrdering::natural(g.n()));
            }
            if matches!(ordering, OrderingArg::Spectral | OrderingArg::Both) {
                orderings.push(spectral_ordering(&g));
            }
            let mut rows = Vec::new();
            for ord in &orderings {
                let og = g.with_ordering(ord)?;
                let row = if g.n() <= EXHAUSTIVE_MAX_VERTICES {
                    let (value, witness) = gamma_star_exhaustive(&og)?;
                    serde_json::json!({
                        "ordering": ord.tag.as_str(),
                        "value": value,
                        "witness_bits": witness.bit_string(),
                        "exact": true,
                    })
                } else {
                    let (lb, witness) = gamma_star_localsearch(&og, restarts, seed);
                    serde_json::json!({
                        "ordering": ord.tag.as_str(),
                        "lb": lb,
                        "pair_ub": gamma_star_pair_ub(&og),
                        "witness_bits": witness.bit_string(),
                        "exact": false,
                    })
                };
                rows.push(row);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "n": g.n(),
                    "orderings": rows,
                }))
                .expect("json")
            );
            Ok(())
        }
        Command::Cutnorm {
            input,
            a,
            b,
            distance,
            budget,
            method,
            restarts,
            seed,
        } => {
            if distance {
                let (pa, pb) = match (&a, &b) {
                    (Some(pa), Some(pb)) => (pa, pb),
                    _ => return Err(CliError::config("--distance needs --a and --b")),
                };
                let u = io::load_graphon(pa)?;
                let w = io::load_graphon(pb)?;
                let value = cutdist_blockperm(&u, &w, budget, seed)?;
                println!(
                    "{}",
                    serde_json::json!({ "restricted_cut_distance": value, "budget": budget })
                );
                return Ok(());
            }
            let kernel = match (&input, &a, &b) {
                (Some(path), None, None) => io::load_kernel(path)?,
                (None, Some(pa), Some(pb)) => {
                    let u = io::load_graphon(pa)?;
                    let w = io::load_graphon(pb)?;
                    u.diff(&w)?
                }
                _ => {
                    return Err(CliError::config(
                        "cutnorm needs --input KERNEL or --a W1 --b W2",
                    ))
                }
            };
            let result = match method {
                CutMethodArg::Exact => cutnorm_exact(&kernel)?,
                CutMethodArg::Heuristic => cutnorm_heuristic(&kernel, restarts, seed),
                CutMethodArg::Auto => {
                    if kernel.resolution() <= robinson_gauge::cutnorm::EXACT_MAX_RESOLUTION {
                        cutnorm_exact(&kernel)?
                    } else {
                        cutnorm_heuristic(&kernel, restarts, seed)
                    }
                }
            };
            println!("{}", to_json_pretty(&CutNormJson::from(&result)));
            Ok(())
        }
        Command::RobinsonApprox {
            input,
            gamma,
            output_resolution,
            out,
            seed,
        } => {
            let w = io::load_graphon(&input)?;
            ensure_dir(&out)?;
            let approximation: StepGraphon = if let Some(gamma_estimate) = gamma {
                let r = robinson_approximation(
                    &w,
                    gamma_estimate,
                    output_resolution.unwrap_or(w.resolution()),
                )?;
                println!(
                    "{}",
                    serde_json::json!({
                        "gamma": gamma_estimate,
                        "violation": w.robinson_violation(),
                        "output": out.join("r_w.mat").display().to_string(),
                    })
                );
                r
            } else {
                let options = ApproxOptions {
                    output_resolution,
                    seed,
                    ..ApproxOptions::default()
                };
                let report = approx_report(&w, &options)?;
                let json = to_json_pretty(&ApproxReportJson::from(&report));
                println!("{json}");
                std::fs::write(out.join("approx_report.json"), json)?;
                report.approximation
            };
            io::save_graphon(&out.join("r_w.mat"), &approximation)?;
            Ok(())
        }
        Command::RegionMap {
            input,
            levels,
            alpha,
            out,
        } => {
            let w = io::load_graphon(&input)?;
            let alpha = match alpha {
                Some(a) => a,
                None => {
                    let report = approx_report(&w, &ApproxOptions::default())?;
                    if report.alpha > 0.0 {
                        report.alpha.min(0.49)
                    } else {
                        return Err(CliError::config(
                            "input is Robinson; pass --alpha explicitly for a region map",
                        ));
                    }
                }
            };
            let map = region_map(&w, levels, alpha)?;
            ensure_dir(&out)?;
            std::fs::write(
                out.join("regionmap.json"),
                to_json_pretty(&RegionMapHeaderJson::from(&map)),
            )?;
            for k in 1..=map.levels() {
                std::fs::write(
                    out.join(format!("level_{k:02}.pgm")),
                    io::region_map_pgm(&map, k),
                )?;
            }
            println!(
                "{}",
                serde_json::json!({
                    "out": out.display().to_string(),
                    "levels": map.levels(),
                    "alpha": map.alpha(),
                    "grey_fraction_top": map.grey_fraction(map.levels()),
                })
            );
            Ok(())
        }
        Command::Decay {
            config,
            out,
            workers,
            seed,
        } => {
            let started = Instant::now();
            let cfg = load_config(&config, seed, workers)?;
            let output = decay_experiment(&cfg)?;
            ensure_dir(&out)?;
            let csv = records_to_csv(&output.records);
            std::fs::write(out.join("results.csv"), &csv)?;
            let lb_points: Vec<(f64, f64)> = output
                .records
                .iter()
                .map(|r| (r.n as f64, r.gamma_lb))
                .collect();
            let ub_points: Vec<(f64, f64)> = output
                .records
                .iter()
                .map(|r| (r.n as f64, r.gamma_pair_ub))
                .collect();
            let series = [
                Series {
                    label: "gauge lower estimate",
                    color: "#1f77b4",
                    points: &lb_points,
                    fit: output
                        .summary
                        .series
                        .lb_fit
                        .map(|f| (f.slope, f.intercept)),
                },
                Series {
                    label: "pairwise upper bound",
                    color: "#d62728",
                    points: &ub_points,
                    fit: output
                        .summary
                        .series
                        .ub_fit
                        .map(|f| (f.slope, f.intercept)),
                },
            ];
            let guide = format!("reference slope {:.3}", output.summary.reference_exponent);
            let svg = loglog_plot(
                &output.summary.experiment,
                &series,
                Some((output.summary.reference_exponent, &guide)),
            );
            std::fs::write(out.join("decay.svg"), svg)?;
            let summary = serde_json::to_value(&output.summary).expect("summary json");
            write_manifest(&out, cfg.to_map(), "results.csv", &csv, summary.clone(), started)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
            Ok(())
        }
        Command::Approx {
            config,
            count,
            out,
            workers,
            seed,
        } => {
            let started = Instant::now();
            let mut cfg = load_config(&config, seed, workers)?;
            cfg.kind = robinson_gauge_cli::config::ExperimentKind::Approx;
            let rows = approx_experiment(cfg.seed, count, cfg.workers)?;
            ensure_dir(&out)?;
            let csv = approx_rows_to_csv(&rows);
            std::fs::write(out.join("approx.csv"), &csv)?;
            let all_pass = rows.iter().all(|r| r.pass);
            let summary = serde_json::json!({
                "instances": rows.len(),
                "all_pass": all_pass,
                "rows": rows,
            });
            write_manifest(&out, cfg.to_map(), "approx.csv", &csv, summary, started)?;
            println!(
                "{}",
                serde_json::json!({ "instances": rows.len(), "all_pass": all_pass })
            );
            Ok(())
        }
        Command::Recognize {
            config,
            out,
            workers,
            seed,
        } => {
            let started = Instant::now();
            let mut cfg = load_config(&config, seed, workers)?;
            cfg.kind = robinson_gauge_cli::config::ExperimentKind::Recognize;
            let output = recognition_experiment(&cfg)?;
            ensure_dir(&out)?;
            let csv = records_to_csv(&output.records);
            std::fs::write(out.join("results.csv"), &csv)?;
            let summary = serde_json::to_value(&output.summary).expect("summary json");
            write_manifest(&out, cfg.to_map(), "results.csv", &csv, summary.clone(), started)?;
            println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
            Ok(())
        }
    }
}
