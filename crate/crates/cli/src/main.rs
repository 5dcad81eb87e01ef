//! zeta-sampler: draw gamma-process heights, evaluate zeta two ways, run the
//! moment pipeline and the quadrature decompositions, and gate it all behind
//! `verify-all`.
//!
//! Scalar reports go out as a JSON envelope, grids as versioned CSV; both
//! embed the resolved configuration. Exit codes: 0 success, 1 numerical or
//! acceptance failure, 2 usage error.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use zeta_sampler::decomposition::{band_sums_pair, decomposition_report};
use zeta_sampler::gamma::{sample_batch, GammaParams};
use zeta_sampler::moment::{estimate_moments, sweep};
use zeta_sampler::oscillatory::{band_spec, check_case, quadratic_spec, CorpusCase, Lemma, VdCParams};
use zeta_sampler::zeta::{zeta_em_with_error, zeta_integral_repr, EvalConfig, ZetaArgument};
use zeta_sampler::{Error, Result};
use zeta_sampler_cli::acceptance;
use zeta_sampler_cli::report::{
    self, DecomposeReport, RunConfig, ZetaReport,
};

#[derive(Parser)]
#[command(name = "zeta-sampler", version, about = "Moments of zeta along the critical line: sampling, evaluation, verification")]
struct Cli {
    /// RNG seed; falls back to the ZS_SEED environment variable, then 42.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the report to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw gamma(t, 1) samples and export them as CSV (index, value).
    Sample {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
    },
    /// Evaluate zeta at sigma + i t with an absolute error estimate.
    Zeta {
        #[arg(long)]
        sigma: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Method::Em)]
        method: Method,
    },
    /// Monte Carlo first and second moments of zeta(1/2 + iX) at height ~ t.
    Moment {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Moment sweep over an ascending t grid, with residuals against log t.
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 60_000)]
        samples: usize,
    },
    /// Check one van der Corput transform against its direct sum.
    Vdc {
        #[arg(long, value_enum)]
        lemma: LemmaArg,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Family parameters: quadratic wants c,a,b[,amp] (amp 1 selects the
        /// x^(-1/2) amplitude); band wants t,n.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        params: Vec<f64>,
        /// Shift-window parameter, in (0, 1].
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Stationary-phase window parameter, in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        /// Tail-window parameter, > 1.
        #[arg(long, default_value_t = 2.0)]
        eta: f64,
    },
    /// Cross terms A1, A2, A3 and the damped band sums at one height.
    Decompose {
        #[arg(long)]
        t: f64,
        /// Quadrature tolerance for the cross terms.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Band offset, in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Report only this damping variant (default: both).
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Monte Carlo reference sample count for the cross terms.
        #[arg(long, default_value_t = 4_000)]
        samples: usize,
    },
    /// Run every acceptance criterion, one pass/fail line each.
    VerifyAll {
        /// Trim the largest heights from the long grids; same tolerances.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Truncated Dirichlet series with Euler–Maclaurin continuation.
    Em,
    /// Sawtooth integral representation.
    Integral,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Em => "em",
            Method::Integral => "integral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LemmaArg {
    #[value(name = "21")]
    L21,
    #[value(name = "22")]
    L22,
    #[value(name = "23")]
    L23,
}

impl From<LemmaArg> for Lemma {
    fn from(l: LemmaArg) -> Lemma {
        match l {
            LemmaArg::L21 => Lemma::L21,
            LemmaArg::L22 => Lemma::L22,
            LemmaArg::L23 => Lemma::L23,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Quadratic,
    Band,
}

impl FamilyArg {
    fn name(self) -> &'static str {
        match self {
            FamilyArg::Quadratic => "quadratic",
            FamilyArg::Band => "band",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    HalfSquare,
    AsPrinted,
}

impl VariantArg {
    fn name(self) -> &'static str {
        match self {
            VariantArg::HalfSquare => "half-square",
            VariantArg::AsPrinted => "as-printed",
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Domain(_) | Error::Config(_) => 2,
                _ => 1,
            };
            std::process::exit(code);
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("ZS_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("ZS_SEED must be an unsigned integer, got {v:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(42),
        Err(e) => Err(Error::config(format!("ZS_SEED: {e}"))),
    }
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    let seed = resolve_seed(cli.seed)?;
    let out_str = cli.out.as_ref().map(|p| p.display().to_string());
    match cli.command {
        Command::Sample { t, count } => {
            let config = RunConfig::Sample { t, count, seed, out: out_str };
            let batch = sample_batch(GammaParams::new(t)?, count, seed)?;
            emit(&cli.out, report::sample_csv(&config, &batch))?;
            Ok(0)
        }
        Command::Zeta { sigma, t, method } => {
            let config = RunConfig::Zeta {
                sigma,
                t,
                method: method.name().into(),
                seed,
                out: out_str,
            };
            let arg = ZetaArgument::new(sigma, t)?;
            let cfg = EvalConfig::default();
            let (value, error) = match method {
                Method::Em => zeta_em_with_error(arg, &cfg)?,
                Method::Integral => zeta_integral_repr(arg, &cfg)?,
            };
            let rep = ZetaReport { sigma, t, method: method.name().into(), value, error };
            emit(&cli.out, report::json_envelope(&config, &rep))?;
            Ok(0)
        }
        Command::Moment { t, samples } => {
            let config = RunConfig::Moment { t, samples, seed, out: out_str };
            let rep = estimate_moments(t, samples, seed)?;
            emit(&cli.out, report::json_envelope(&config, &rep))?;
            Ok(0)
        }
        Command::Sweep { t_list, samples } => {
            let config = RunConfig::Sweep { t_list: t_list.clone(), samples, seed, out: out_str };
            let rows = sweep(&t_list, samples, seed)?;
            emit(&cli.out, report::sweep_csv(&config, &rows))?;
            Ok(0)
        }
        Command::Vdc { lemma, family, params, epsilon, theta, eta } => {
            let config = RunConfig::Vdc {
                lemma: format!("{}", Lemma::from(lemma)),
                family: family.name().into(),
                params: params.clone(),
                epsilon,
                theta,
                eta,
                seed,
                out: out_str,
            };
            let spec = match (family, params.as_slice()) {
                (FamilyArg::Quadratic, [c, a, b]) => quadratic_spec(*c, *a, *b, false)?,
                (FamilyArg::Quadratic, [c, a, b, amp]) => quadratic_spec(*c, *a, *b, *amp != 0.0)?,
                (FamilyArg::Band, [t, n]) => band_spec(*t, *n)?,
                _ => {
                    return Err(Error::config(format!(
                        "--family {} wants {} parameters, got {}",
                        family.name(),
                        match family {
                            FamilyArg::Quadratic => "c,a,b[,amp]",
                            FamilyArg::Band => "t,n",
                        },
                        params.len()
                    )))
                }
            };
            let vparams = VdCParams::for_spec(&spec, epsilon, theta, eta)?;
            let joined =
                params.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
            let case = CorpusCase {
                label: format!("{} {}", family.name(), joined),
                lemma: lemma.into(),
                spec,
                params: vparams,
            };
            let check = check_case(&case)?;
            emit(&cli.out, report::vdc_csv(&config, family.name(), &joined, &check))?;
            Ok(0)
        }
        Command::Decompose { t, tol, delta, variant, samples } => {
            let config = RunConfig::Decompose {
                t,
                tol,
                delta,
                variant: variant.map(|v| v.name().into()),
                samples,
                seed,
                out: out_str,
            };
            let cross_terms = if (10.0..=1000.0).contains(&t) {
                Some(decomposition_report(t, tol, samples, seed)?)
            } else {
                None
            };
            let band_sums = if (100.0..=1e6).contains(&t) {
                let (half_square, as_printed) = band_sums_pair(t, delta)?;
                match variant {
                    None => vec![half_square, as_printed],
                    Some(VariantArg::HalfSquare) => vec![half_square],
                    Some(VariantArg::AsPrinted) => vec![as_printed],
                }
            } else {
                Vec::new()
            };
            if cross_terms.is_none() && band_sums.is_empty() {
                return Err(Error::domain(format!(
                    "t = {t} admits neither cross terms (10 <= t <= 1000) nor band sums (100 <= t <= 10^6)"
                )));
            }
            let rep = DecomposeReport { cross_terms, band_sums };
            emit(&cli.out, report::json_envelope(&config, &rep))?;
            Ok(0)
        }
        Command::VerifyAll { quick } => {
            let config = RunConfig::VerifyAll { quick, seed, out: out_str };
            let mut text = report::preamble(&config);
            let mut failed = Vec::new();
            for i in 1..=acceptance::COUNT {
                let outcome = acceptance::run_criterion(i, quick, seed);
                let line = acceptance::render_line(&outcome);
                println!("{line}");
                eprintln!("# {} finished in {:.1} s", outcome.name, outcome.elapsed.as_secs_f64());
                text.push_str(&line);
                text.push('\n');
                if !outcome.pass {
                    failed.push(outcome.name);
                }
            }
            let summary = if failed.is_empty() {
                format!("all {} criteria passed", acceptance::COUNT)
            } else if failed.len() == 1 {
                format!("1 criterion failed: {}", failed[0])
            } else {
                format!("{} criteria failed: {}", failed.len(), failed.join(", "))
            };
            println!("{summary}");
            text.push_str(&summary);
            text.push('\n');
            if let Some(path) = &cli.out {
                std::fs::write(path, text)
                    .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display())))?;
            }
            Ok(if failed.is_empty() { 0 } else { 1 })
        }
    }
}
