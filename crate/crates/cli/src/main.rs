//! `lowdeg`: command-line front end for the library.
//!
//! Thin dispatcher: every subcommand maps onto one library call plus
//! serialization. Randomized subcommands demand an explicit --seed; there
//! is no fallback to ambient entropy, so a repeated invocation always
//! reproduces its output bytes. Exit code 0 on success, 2 on any
//! validation or I/O failure with a one-line diagnostic on stderr.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lowdeg::collision::{
    collide_anneal, collide_census, collide_exact, AnnealParams, CensusReport, CollisionWitness,
};
use lowdeg::determinacy::{certify_unique, probability_bounds, thresholds};
use lowdeg::experiments::{emit_csv, parse_csv, run_sweep, SweepCell, SweepConfig};
use lowdeg::lp::{max_competitor, sign_certificate};
use lowdeg::{spectrum, BooleanFunction, Rational};

#[derive(Parser)]
#[command(name = "lowdeg", version, about = "Exact spectral analysis of Boolean functions")]
struct Cli {
    /// Worker pool size; results are byte-identical for any value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exact transform coefficients of a function.
    Spectrum {
        /// WBF1 function file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the strict residual test at one degree.
    Certify {
        /// WBF1 function file.
        #[arg(long)]
        input: PathBuf,
        /// Truncation degree.
        #[arg(long)]
        d: u32,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the closed-form failure bounds for one cell.
    Bounds {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Solve the two bound equations for the degree window.
    Thresholds {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo grid over (p, d) cells.
    Sweep {
        /// key=value config file; excludes the inline cell flags.
        #[arg(long, conflicts_with_all = ["p", "d", "samples", "seed", "eta", "omega",
            "run_exact_enum", "run_anneal", "run_lp", "no_certificate"])]
        config: Option<PathBuf>,
        /// Comma-separated dimensions, e.g. 4,8,12.
        #[arg(long, value_delimiter = ',', required_unless_present = "config")]
        p: Vec<u32>,
        /// Comma-separated degrees, or "all" for 0..=p (the default).
        #[arg(long)]
        d: Option<String>,
        #[arg(long, required_unless_present = "config")]
        samples: Option<u64>,
        #[arg(long, required_unless_present = "config")]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Exhaustive flip-set search per sample (p <= 4 only).
        #[arg(long)]
        run_exact_enum: bool,
        /// Annealing flip-set search per sample.
        #[arg(long)]
        run_anneal: bool,
        /// Rival-maximization solve per sample (p <= 8 only).
        #[arg(long)]
        run_lp: bool,
        /// Skip the residual test columns.
        #[arg(long)]
        no_certificate: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Exhaustive minimal flip-set search (p <= 4).
    CollideExact {
        /// WBF1 function file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Birthday census of the low-degree fingerprint map.
    CollideCensus {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Simulated-annealing flip-set search.
    CollideAnneal {
        /// WBF1 function file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Maximize the bounded rival overlap (p <= 8).
    CompetitorLp {
        /// WBF1 function file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search for a low-degree sign certificate (p <= 8).
    SignCert {
        /// WBF1 function file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Render a sweep CSV as an SVG success-rate chart.
    Plot {
        /// Sweep CSV file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            // Collapse clap's multi-line report (message, offending flag,
            // usage, help hint) into the one-line diagnostic contract.
            let rendered = err.render().to_string();
            let mut parts: Vec<&str> = Vec::new();
            for line in rendered.lines() {
                let line = line.trim();
                if line.starts_with("Usage:") || line.starts_with("For more information") {
                    break;
                }
                if !line.is_empty() {
                    parts.push(line);
                }
            }
            if parts.is_empty() {
                parts.push("error: invalid arguments");
            }
            eprintln!("{}", parts.join(" "));
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), String> {
    match command {
        Command::Spectrum { input, output, format } => {
            let f = read_function(&input)?;
            let s = spectrum(&f);
            let payload = match format {
                Format::Text | Format::Csv => s.to_csv(),
                Format::Json => {
                    let coefficients: Vec<Value> = s
                        .coeffs()
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| {
                            json!({
                                "mask": j,
                                "degree": lowdeg::transform::mask_degree(j as u32),
                                "coeff": c,
                            })
                        })
                        .collect();
                    json_line(json!({ "p": s.dimension(), "coefficients": coefficients }))
                }
            };
            write_output(&output, &payload)
        }
        Command::Certify { input, d, output, format } => {
            let f = read_function(&input)?;
            let cert = certify_unique(&f, d).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text => format!("{cert}\n"),
                Format::Csv => format!(
                    "p,d,holds,max_residual,denominator,eta_hat,sign_agrees,argmax_point\n\
                     {},{},{},{},{},{},{},{}\n",
                    cert.p,
                    cert.d,
                    cert.holds,
                    cert.max_residual_num,
                    cert.denominator(),
                    cert.eta_hat(),
                    cert.sign_agrees,
                    cert.argmax_point,
                ),
                Format::Json => json_line(json!({
                    "p": cert.p,
                    "d": cert.d,
                    "holds": cert.holds,
                    "max_residual": cert.max_residual_num,
                    "denominator": cert.denominator(),
                    "eta_hat": float_json(cert.eta_hat()),
                    "sign_agrees": cert.sign_agrees,
                    "argmax_point": cert.argmax_point,
                })),
            };
            write_output(&output, &payload)
        }
        Command::Bounds { p, d, eta, omega, output, format } => {
            let report = probability_bounds(p, d, eta, omega).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text => report.to_text_record(),
                Format::Csv => format!(
                    "p,d,eta,omega,K_d,M_d,Md_over_N,log_nonuniq_bound,log_uniq_fail_bound,\
                     nonuniqueness_vacuous,uniqueness_failure_vacuous,d_lower,d_upper\n\
                     {},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    report.p,
                    report.d,
                    report.eta,
                    report.omega,
                    report.k_d,
                    report.m_d,
                    report.md_over_n,
                    report.log_nonuniqueness_bound,
                    report.log_uniqueness_failure_bound,
                    report.nonuniqueness_vacuous,
                    report.uniqueness_failure_vacuous,
                    report.lower_threshold,
                    report.upper_threshold,
                ),
                Format::Json => json_line(json!({
                    "p": report.p,
                    "d": report.d,
                    "eta": float_json(report.eta),
                    "omega": float_json(report.omega),
                    "K_d": report.k_d.to_string(),
                    "M_d": report.m_d.to_string(),
                    "Md_over_N": float_json(report.md_over_n),
                    "log_nonuniq_bound": float_json(report.log_nonuniqueness_bound),
                    "log_uniq_fail_bound": float_json(report.log_uniqueness_failure_bound),
                    "nonuniqueness_vacuous": report.nonuniqueness_vacuous,
                    "uniqueness_failure_vacuous": report.uniqueness_failure_vacuous,
                    "d_lower": float_json(report.lower_threshold),
                    "d_upper": float_json(report.upper_threshold),
                })),
            };
            write_output(&output, &payload)
        }
        Command::Thresholds { p, eta, omega, output, format } => {
            let (d_lower, d_upper) = thresholds(p, omega, eta).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text => format!("d_lower={d_lower}\nd_upper={d_upper}\n"),
                Format::Csv => {
                    format!("p,omega,eta,d_lower,d_upper\n{p},{omega},{eta},{d_lower},{d_upper}\n")
                }
                Format::Json => json_line(json!({
                    "p": p,
                    "omega": float_json(omega),
                    "eta": float_json(eta),
                    "d_lower": float_json(d_lower),
                    "d_upper": float_json(d_upper),
                })),
            };
            write_output(&output, &payload)
        }
        Command::Sweep {
            config,
            p,
            d,
            samples,
            seed,
            eta,
            omega,
            run_exact_enum,
            run_anneal,
            run_lp,
            no_certificate,
            output,
            format,
        } => {
            let cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    SweepConfig::parse_key_value(&text).map_err(|e| e.to_string())?
                }
                None => {
                    let d_list = match d.as_deref() {
                        None | Some("all") => None,
                        Some(list) => {
                            let mut ds = Vec::new();
                            for part in list.split(',') {
                                let v: u32 = part.trim().parse().map_err(|_| {
                                    format!("--d: {part:?} is not a degree or \"all\"")
                                })?;
                                ds.push(v);
                            }
                            Some(ds)
                        }
                    };
                    // clap enforces presence of the unwrapped flags.
                    let mut cfg = SweepConfig::new(p, d_list, samples.unwrap(), seed.unwrap());
                    cfg.eta = eta;
                    cfg.omega = omega;
                    cfg.run_certificate = !no_certificate;
                    cfg.run_exact_enum = run_exact_enum;
                    cfg.run_anneal = run_anneal;
                    cfg.run_lp = run_lp;
                    cfg
                }
            };
            let cells = run_sweep(&cfg).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text | Format::Csv => emit_csv(&cells),
                Format::Json => json_line(Value::Array(
                    cells.iter().map(cell_json).collect::<Vec<Value>>(),
                )),
            };
            write_output(&output, &payload)
        }
        Command::CollideExact { input, d, output, format } => {
            let f = read_function(&input)?;
            let search = collide_exact(&f, d).map_err(|e| e.to_string())?;
            let payload = witness_payload(
                f.dimension(),
                d,
                None,
                search.witness.as_ref(),
                search.exhaustive,
                format,
            );
            write_output(&output, &payload)
        }
        Command::CollideCensus { p, d, samples, seed, output, format } => {
            let report = collide_census(p, d, samples, seed).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text => census_text(&report),
                Format::Csv => format!("{}\n{}\n", CensusReport::CSV_HEADER, report.csv_row()),
                Format::Json => {
                    let pairs: Vec<Value> =
                        report.collision_pairs.iter().map(|&(a, b)| json!([a, b])).collect();
                    json_line(json!({
                        "p": report.p,
                        "d": report.d,
                        "samples": report.samples,
                        "seed": report.seed,
                        "distinct_keys": report.distinct_keys,
                        "collision_pairs": report.collision_pairs.len(),
                        "log_image_bound": float_json(report.log_image_bound),
                        "pairs": pairs,
                    }))
                }
            };
            write_output(&output, &payload)
        }
        Command::CollideAnneal { input, d, seed, output, format } => {
            let f = read_function(&input)?;
            let params = AnnealParams::new(f.dimension(), seed);
            let witness = collide_anneal(&f, d, &params).map_err(|e| e.to_string())?;
            let payload =
                witness_payload(f.dimension(), d, Some(seed), witness.as_ref(), false, format);
            write_output(&output, &payload)
        }
        Command::CompetitorLp { input, d, output, format } => {
            let f = read_function(&input)?;
            let outcome = max_competitor(&f, d).map_err(|e| e.to_string())?;
            let optimum = rational_string(&outcome.optimum);
            let payload = match format {
                Format::Text => match &outcome.witness {
                    Some(w) => format!("optimum {optimum}\nh:\n{}", w.lines()),
                    None => format!("optimum {optimum}\n"),
                },
                Format::Csv => format!("p,d,optimum\n{},{d},{optimum}\n", f.dimension()),
                Format::Json => json_line(json!({
                    "p": f.dimension(),
                    "d": d,
                    "optimum": optimum,
                    "h": outcome.witness.as_ref().map(|w| {
                        w.h().iter().map(rational_string).collect::<Vec<String>>()
                    }),
                })),
            };
            write_output(&output, &payload)
        }
        Command::SignCert { input, d, output, format } => {
            let f = read_function(&input)?;
            let cert = sign_certificate(&f, d).map_err(|e| e.to_string())?;
            let payload = match format {
                Format::Text => match &cert {
                    Some(c) => {
                        format!("feasible, margin {}\ncoefficients:\n{}",
                            rational_string(&c.margin),
                            c.lines())
                    }
                    None => "infeasible\n".to_string(),
                },
                Format::Csv => {
                    let (feasible, margin) = match &cert {
                        Some(c) => (true, rational_string(&c.margin)),
                        None => (false, String::new()),
                    };
                    format!("p,d,feasible,margin\n{},{d},{feasible},{margin}\n", f.dimension())
                }
                Format::Json => json_line(json!({
                    "p": f.dimension(),
                    "d": d,
                    "feasible": cert.is_some(),
                    "margin": cert.as_ref().map(|c| rational_string(&c.margin)),
                    "coefficients": cert.as_ref().map(|c| {
                        c.coefficients()
                            .iter()
                            .map(|(mask, v)| json!([mask, rational_string(v)]))
                            .collect::<Vec<Value>>()
                    }),
                })),
            };
            write_output(&output, &payload)
        }
        Command::Plot { input, output } => {
            let text =
                fs::read_to_string(&input).map_err(|e| format!("{}: {e}", input.display()))?;
            let cells = parse_csv(&text).map_err(|e| e.to_string())?;
            let rendered = svg::emit_svg(&cells).map_err(|e| e.to_string())?;
            write_output(&output, &rendered)
        }
    }
}

fn read_function(path: &Path) -> Result<BooleanFunction, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    BooleanFunction::parse_wbf1(&text).map_err(|e| e.to_string())
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Finite floats stay numbers; infinities and NaN become the same literal
/// string the CSV column carries.
fn float_json(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(x.to_string()),
    }
}

fn opt_float_json(x: Option<f64>) -> Value {
    x.map(float_json).unwrap_or(Value::Null)
}

fn json_line(v: Value) -> String {
    format!("{v}\n")
}

fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn cell_json(cell: &SweepCell) -> Value {
    json!({
        "p": cell.p,
        "d": cell.d,
        "samples": cell.samples,
        "seed": cell.seed,
        "success_rate": opt_float_json(cell.success_rate),
        "mean_eta": opt_float_json(cell.mean_eta),
        "max_eta": opt_float_json(cell.max_eta),
        "collision_rate": opt_float_json(cell.collision_rate),
        "lp_zero_rate": opt_float_json(cell.lp_zero_rate),
        "K_d": cell.k_d.to_string(),
        "M_d": cell.m_d.to_string(),
        "Md_over_N": float_json(cell.md_over_n),
        "log_nonuniq_bound": float_json(cell.log_nonuniq_bound),
        "log_uniq_fail_bound": float_json(cell.log_uniq_fail_bound),
        "d_lower": float_json(cell.d_lower),
        "d_upper": float_json(cell.d_upper),
    })
}

fn census_text(report: &CensusReport) -> String {
    format!(
        "p={}\nd={}\nsamples={}\nseed={}\ndistinct_keys={}\ncollision_pairs={}\n\
         log_image_bound={}\npairs:\n{}",
        report.p,
        report.d,
        report.samples,
        report.seed,
        report.distinct_keys,
        report.collision_pairs.len(),
        report.log_image_bound,
        report.pair_list(),
    )
}

/// Shared serialization for the two flip-set searches. `seed` is present
/// only for the randomized one; `exhaustive` only means anything for the
/// exact one, where a miss is a proof.
fn witness_payload(
    p: u32,
    d: u32,
    seed: Option<u64>,
    witness: Option<&CollisionWitness>,
    exhaustive: bool,
    format: Format,
) -> String {
    match format {
        Format::Text => match witness {
            Some(w) => format!("COLLISION, size {}, flips {}\n", w.flip_set().len(), w.mask_list()),
            None if exhaustive => "NO-COLLISION, exhaustive\n".to_string(),
            None => "NO-COLLISION-FOUND\n".to_string(),
        },
        Format::Csv => {
            let found = witness.is_some();
            let size = witness.map(|w| w.flip_set().len().to_string()).unwrap_or_default();
            let flips = witness.map(|w| w.mask_list()).unwrap_or_default();
            match seed {
                Some(s) => format!(
                    "p,d,seed,found,size,flip_set\n{p},{d},{s},{found},{size},{flips}\n"
                ),
                None => format!(
                    "p,d,found,exhaustive,size,flip_set\n{p},{d},{found},{exhaustive},{size},{flips}\n"
                ),
            }
        }
        Format::Json => {
            let flips = witness.map(|w| w.flip_set().to_vec());
            let mut obj = json!({
                "p": p,
                "d": d,
                "found": witness.is_some(),
                "size": witness.map(|w| w.flip_set().len()),
                "flip_set": flips,
            });
            let map = obj.as_object_mut().expect("object literal");
            match seed {
                Some(s) => {
                    map.insert("seed".into(), json!(s));
                }
                None => {
                    map.insert("exhaustive".into(), json!(exhaustive));
                }
            }
            json_line(obj)
        }
    }
}
