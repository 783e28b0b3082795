//! `rindex`: certify equilibria, compare indices, bound connecting orbits.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rigorous_index::forcing::forcing_lower_bound;
use rigorous_index::index::relative_index_padded;
use rigorous_index::pipeline::{
    continue_branch, exit_code, forcing_input, read_seed_file, run_pipeline, BettiSpec, Manifest, RunConfig,
    SeedSpec, EXIT_CONFIG, EXIT_OK,
};
use rigorous_index::{EquilibriumCertificate, Error, ProblemSpec, Result};

/// Worker threads for seed certification and index counting.
const THREADS_VAR: &str = "RINDEX_THREADS";

#[derive(Parser)]
#[command(name = "rindex", version, about = "Rigorous equilibria, relative indices and forcing bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cr,
    Tw,
    Ok,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: Family,
    /// Comma-separated parameters: cr `λ₁,λ₂`; tw `λ,c`; ok `λ₁,λ₂,λ₃`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a TOML configuration end to end.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify coefficient files at one parameter set.
    Certify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, num_args = 1.., required = true)]
        seeds: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Betti numbers (TOML: `beta = [...]`, `provenance = "..."`).
        #[arg(long)]
        betti: Option<PathBuf>,
    },
    /// Relative index of two certificates.
    Index {
        #[arg(long, num_args = 2, required = true)]
        certs: Vec<PathBuf>,
        /// Common padded truncation (defaults to the larger `m`).
        #[arg(long)]
        pad: Option<usize>,
    },
    /// Connecting-orbit lower bound from a manifest.
    Force {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        betti: PathBuf,
    },
    /// Naive parameter continuation.
    Continue {
        #[arg(long, value_enum)]
        problem: Family,
        /// Fixed parameters; defaults to the reference set of the family.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        /// Varied parameter; `lambda12` moves λ₁ = λ₂ together.
        #[arg(long)]
        vary: Option<String>,
        /// `from:to`.
        #[arg(long, allow_hyphen_values = true)]
        param_range: String,
        #[arg(long)]
        step: f64,
        #[arg(long, default_value_t = 20)]
        m: usize,
        /// Certify each point with this weight and report its index.
        #[arg(long)]
        nu: Option<f64>,
        /// Start from a coefficient file instead of the zero state.
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn spec_of(family: Family, params: &[f64]) -> Result<ProblemSpec> {
    let need = |n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::Config(format!("expected {n} parameters, got {}", params.len())))
        }
    };
    Ok(match family {
        Family::Cr => {
            need(2)?;
            ProblemSpec::Cr { lambda1: params[0], lambda2: params[1] }
        }
        Family::Tw => {
            need(2)?;
            ProblemSpec::Tw { lambda: params[0], c: params[1] }
        }
        Family::Ok => {
            need(3)?;
            ProblemSpec::Ok { lambda1: params[0], lambda2: params[1], lambda3: params[2] }
        }
    })
}

fn load_betti(path: &Path) -> Result<BettiSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
}

fn load_cert(path: &Path) -> Result<EquilibriumCertificate> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    EquilibriumCertificate::from_json(&text)
}

fn report(m: &Manifest) {
    println!("{} equilibria from {} representatives", m.equilibria.len(), m.representatives.len());
    for r in &m.representatives {
        let i = &r.index;
        println!(
            "  {:<16} r0 = {:.3e}  index {:>3}  orbit {}",
            r.name,
            i.cert_a.r0.unwrap_or(f64::NAN),
            i.relative_index,
            r.orbit_size
        );
    }
    for (dup, of) in &m.duplicates {
        println!("  {dup}: same equilibrium as {of}");
    }
    for f in &m.failures {
        eprintln!("  {}: {}", f.seed, f.reason);
    }
    if let Some(f) = &m.forcing {
        print!("{}", f.to_text());
    }
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Run { config, out } => {
            let c = RunConfig::load(&config)?;
            let out = out.or_else(|| c.out.clone().map(|o| c.root.join(o))).ok_or_else(|| Error::Config("no output directory".into()))?;
            let m = run_pipeline(&c, &out)?;
            report(&m);
            Ok(m.exit_code)
        }
        Cmd::Certify { problem, nu, m, seeds, out, betti } => {
            let spec = spec_of(problem.problem, &problem.params)?;
            let seeds = seeds
                .iter()
                .map(|p| SeedSpec::File {
                    name: p.file_stem().map_or("seed".into(), |s| s.to_string_lossy().into_owned()),
                    path: p.clone(),
                })
                .collect();
            let betti = betti.map(|b| load_betti(&b)).transpose()?;
            let c = RunConfig { spec, nu, m, out: None, base: None, seeds, betti, root: PathBuf::from(".") };
            c.validate()?;
            let man = run_pipeline(&c, &out)?;
            report(&man);
            Ok(man.exit_code)
        }
        Cmd::Index { certs, pad } => {
            let (a, b) = (load_cert(&certs[0])?, load_cert(&certs[1])?);
            let ic = relative_index_padded(&a, &b, pad.unwrap_or(a.m.max(b.m)))?;
            println!("{}", serde_json::to_string_pretty(&ic)?);
            Ok(EXIT_OK)
        }
        Cmd::Force { manifest, betti } => {
            let man = Manifest::load(&manifest).map_err(|e| Error::Config(format!("{}: {e}", manifest.display())))?;
            let r = forcing_lower_bound(&forcing_input(&man, &load_betti(&betti)?));
            print!("{}", r.to_text());
            Ok(EXIT_OK)
        }
        Cmd::Continue { problem, params, vary, param_range, step, m, nu, seed, out } => {
            let params = if params.is_empty() {
                match problem {
                    Family::Cr => vec![6.0, 6.0],
                    Family::Tw => vec![12.0, 1.0],
                    Family::Ok => vec![9.0, 9.0, 4.5],
                }
            } else {
                params
            };
            let spec = spec_of(problem, &params)?;
            let vary = vary.unwrap_or_else(|| match problem {
                Family::Tw => "lambda".into(),
                _ => "lambda12".into(),
            });
            let (a, b) = param_range
                .split_once(':')
                .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
                .ok_or_else(|| Error::Config(format!("bad range `{param_range}`, expected from:to")))?;
            let p = spec.build()?;
            let start = match seed {
                Some(f) => read_seed_file(&spec, &f, m)?,
                None => DVector::zeros(p.dim(m)),
            };
            let branch = continue_branch(&spec, &vary, &start, (a, b), step, m, nu)?;
            let text = branch.to_text();
            match out {
                Some(o) => std::fs::write(o, &text)?,
                None => print!("{text}"),
            }
            if let Some(t) = &branch.truncated {
                eprintln!("branch truncated: {t}");
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    if let Ok(n) = std::env::var(THREADS_VAR) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("{THREADS_VAR} must be a positive integer");
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        }
    }
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
