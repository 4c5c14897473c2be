use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use triesz::algebra::{matrix_from_json, Algebra};
use triesz::config::{emit_report, parse_spec, spec_sha256};
use triesz::densities::DistributionSpec;
use triesz::samplers::RngStream;
use triesz::samplers::{sample_many, write_csv, write_jsonl, SampleHeader};
use triesz::verify::{
    check_normalization, gof_sampler_vs_density, identity_suite, jacobian_check, run_suite, worst, Budget,
    GofStatistic, NormMethod, SuiteConfig, Transform, TransformUnderTest, VerificationReport, CRITERIA,
};
use triesz::{Error, Result};

#[derive(Parser)]
#[command(
    name = "triesz",
    version,
    about = "Matricvariate Riesz-type distributions: densities, sampling and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the density at a point.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        point: PathBuf,
        /// Print only the log density.
        #[arg(long)]
        log: bool,
    },
    /// Draw from a distribution into a CSV or JSON-lines file.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Output path; the extension (.csv or .jsonl) selects the format.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one verification check.
    Check {
        #[command(subcommand)]
        check: Check,
    },
    /// Run the full default suite.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Quadrature,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Prop1,
    Prop2,
    Prop3,
    Prop4,
    Prop4Triangular,
}

#[derive(Clone, Copy, ValueEnum)]
enum Statistic {
    Ks,
    Trace,
    Logdet,
    Corner,
}

#[derive(Subcommand)]
enum Check {
    /// Total mass of the density.
    Normalization {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Quadrature)]
        method: Method,
        /// Importance-sampling draws.
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Tolerance (quadrature) or number of standard errors (mc).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Finite-difference Jacobian against the change-of-variables formula.
    Jacobian {
        #[arg(long, value_enum)]
        transform: TransformArg,
        #[arg(long)]
        beta: u32,
        /// `n,m`
        #[arg(long, value_parser = parse_dims)]
        dims: (usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Randomized special-function and highest-weight-vector identities.
    Identities {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Sampler against density.
    Gof {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        statistic: Statistic,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (n, m) = s.split_once(',').ok_or("expected n,m")?;
    Ok((
        n.trim().parse().map_err(|e| format!("n: {e}"))?,
        m.trim().parse().map_err(|e| format!("m: {e}"))?,
    ))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<DistributionSpec> {
    Ok(parse_spec(&read(path)?)?.spec)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Prints the reports and returns whether all passed.
fn finish(reports: &[VerificationReport]) -> bool {
    println!("{}", emit_report(reports));
    for r in reports {
        eprintln!("{r}");
    }
    reports.iter().all(|r| r.pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Eval { spec, point, log } => {
            let spec = load_spec(&spec)?;
            let x = matrix_from_json(&read(&point)?)?;
            let lp = spec.logpdf(&x)?;
            let out = if log {
                json!({ "family": spec.family().name(), "log_density": lp })
            } else {
                json!({ "family": spec.family().name(), "log_density": lp, "density": lp.exp() })
            };
            println!("{out}");
            Ok(true)
        }
        Command::Sample {
            spec,
            n,
            seed,
            stream,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let draws = sample_many(&spec, n, seed, stream)?;
            let header = SampleHeader {
                spec_sha256: spec_sha256(&spec),
                seed,
                stream,
            };
            let file = fs::File::create(&out).map_err(|e| Error::Parse(format!("{}: {e}", out.display())))?;
            let mut w = BufWriter::new(file);
            match out.extension().and_then(|e| e.to_str()) {
                Some("csv") => write_csv(&mut w, &header, &draws)?,
                Some("jsonl") => write_jsonl(&mut w, &header, &draws)?,
                _ => return Err(Error::Parse("--out must end in .csv or .jsonl".into())),
            }
            w.flush().map_err(|e| Error::Parse(e.to_string()))?;
            Ok(true)
        }
        Command::Check { check } => run_check(check),
        Command::Suite { seed, json } => {
            let entries = run_suite(&SuiteConfig::new(seed));
            let text = emit_report(&entries);
            match json {
                Some(path) => write_file(&path, &text)?,
                None => println!("{text}"),
            }
            for (c, name) in CRITERIA {
                let sel: Vec<_> = entries.iter().filter(|e| e.criterion == c).collect();
                let failed = sel.iter().filter(|e| !e.report.pass).count();
                eprintln!(
                    "{} criterion {c} ({name}): {} reports, {failed} failed",
                    if failed == 0 { "PASS" } else { "FAIL" },
                    sel.len()
                );
                for e in sel.iter().filter(|e| !e.report.pass) {
                    eprintln!("    {}", e.report);
                }
            }
            Ok(entries.iter().all(|e| e.report.pass))
        }
    }
}

fn run_check(check: Check) -> Result<bool> {
    let reports = match check {
        Check::Normalization {
            spec,
            method,
            budget,
            tol,
            seed,
        } => {
            let spec = load_spec(&spec)?;
            let method = match method {
                Method::Quadrature => NormMethod::Quadrature,
                Method::Mc => NormMethod::ImportanceMc,
            };
            let mut b = Budget::new(budget, seed, 0);
            b.tolerance = tol;
            vec![check_normalization(&spec, method, &b)?]
        }
        Check::Jacobian {
            transform,
            beta,
            dims: (n, m),
            seed,
            points,
        } => {
            let alg = Algebra::from_beta(beta)?;
            let t = match transform {
                TransformArg::Prop1 => Transform::Linear,
                TransformArg::Prop2 => Transform::Congruence,
                TransformArg::Prop3 => Transform::Inverse,
                TransformArg::Prop4 => Transform::Polar,
                TransformArg::Prop4Triangular => Transform::Triangular,
            };
            let mut rng = RngStream::new(seed, 0);
            let reports = (0..points.max(1))
                .map(|_| jacobian_check(&TransformUnderTest::random(t, alg, n, m, &mut rng)?))
                .collect::<Result<Vec<_>>>()?;
            vec![worst(&format!("jacobian/{}", t.name()), reports)]
        }
        Check::Identities { seed, trials } => identity_suite(seed, trials),
        Check::Gof {
            spec,
            n,
            statistic,
            seed,
            stream,
        } => {
            let spec = load_spec(&spec)?;
            let stat = match statistic {
                Statistic::Ks => GofStatistic::Ks,
                Statistic::Trace => GofStatistic::Trace,
                Statistic::Logdet => GofStatistic::Logdet,
                Statistic::Corner => GofStatistic::Corner,
            };
            vec![gof_sampler_vs_density(&spec, n, stat, seed, stream)?]
        }
    };
    Ok(finish(&reports))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
