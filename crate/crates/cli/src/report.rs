//! Output formats: a JSON envelope for scalar reports and versioned CSV for
//! grids. Every emitted document embeds the resolved run configuration, and
//! everything round-trips: floats are printed with Rust's shortest
//! round-trip formatting, so re-parsing reproduces the exact bits.

use serde::{Deserialize, Serialize};
use zeta_sampler::decomposition::{BandSumReport, DecompositionReport};
use zeta_sampler::gamma::SampleBatch;
use zeta_sampler::moment::SweepRow;
use zeta_sampler::oscillatory::LemmaCheck;
use zeta_sampler::{Complex64, Error, Result};

pub const CSV_VERSION_LINE: &str = "# zeta-sampler v1";

/// The resolved configuration of one invocation, embedded verbatim in every
/// output so a file is enough to rerun the command that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum RunConfig {
    Sample { t: f64, count: usize, seed: u64, out: Option<String> },
    Zeta { sigma: f64, t: f64, method: String, seed: u64, out: Option<String> },
    Moment { t: f64, samples: usize, seed: u64, out: Option<String> },
    Sweep { t_list: Vec<f64>, samples: usize, seed: u64, out: Option<String> },
    Vdc {
        lemma: String,
        family: String,
        params: Vec<f64>,
        epsilon: f64,
        theta: f64,
        eta: f64,
        seed: u64,
        out: Option<String>,
    },
    Decompose {
        t: f64,
        tol: f64,
        delta: f64,
        variant: Option<String>,
        samples: usize,
        seed: u64,
        out: Option<String>,
    },
    VerifyAll { quick: bool, seed: u64, out: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub tool: String,
    pub format: u32,
    pub config: RunConfig,
    pub report: R,
}

pub fn json_envelope<R: Serialize>(config: &RunConfig, report: &R) -> String {
    let env = serde_json::json!({
        "tool": "zeta-sampler",
        "format": 1,
        "config": config,
        "report": report,
    });
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

/// Single zeta evaluation: which point, which method, value and an absolute
/// error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaReport {
    pub sigma: f64,
    pub t: f64,
    pub method: String,
    pub value: Complex64,
    pub error: f64,
}

/// Quadrature cross terms (when 10 <= t <= 1000) and damped band sums (when
/// 100 <= t <= 10^6), whichever the height admits. Both damping variants are
/// reported unless the command filtered to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub cross_terms: Option<DecompositionReport>,
    pub band_sums: Vec<BandSumReport>,
}

/// Version line plus a comment echoing the resolved configuration: the first
/// two lines of every CSV and of the verify-all transcript.
pub fn preamble(config: &RunConfig) -> String {
    format!(
        "{CSV_VERSION_LINE}\n# config: {}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

pub fn sample_csv(config: &RunConfig, batch: &SampleBatch) -> String {
    let mut s = format!("{}index,value\n", preamble(config));
    for (i, v) in batch.values.iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

pub fn parse_sample_csv(text: &str) -> Result<Vec<f64>> {
    data_rows(text, "index,value")?
        .map(|(line, cols)| {
            if cols.len() != 2 {
                return Err(Error::invariant(format!("bad sample row: {line}")));
            }
            parse_f64(cols[1])
        })
        .collect()
}

pub fn sweep_csv(config: &RunConfig, rows: &[SweepRow]) -> String {
    let mut s =
        format!("{}t,n,seed,first_re,first_im,second,se2,log_t,residual,band\n", preamble(config));
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.n_samples,
            r.seed,
            r.first_moment.re,
            r.first_moment.im,
            r.second_moment,
            r.se_second,
            r.log_t,
            r.residual,
            r.band,
        ));
    }
    s
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    data_rows(text, "t,n,seed,first_re,first_im,second,se2,log_t,residual,band")?
        .map(|(line, cols)| {
            if cols.len() != 10 {
                return Err(Error::invariant(format!("bad sweep row: {line}")));
            }
            Ok(SweepRow {
                t: parse_f64(cols[0])?,
                n_samples: parse_int(cols[1])? as usize,
                seed: parse_int(cols[2])?,
                first_moment: Complex64::new(parse_f64(cols[3])?, parse_f64(cols[4])?),
                second_moment: parse_f64(cols[5])?,
                se_second: parse_f64(cols[6])?,
                log_t: parse_f64(cols[7])?,
                residual: parse_f64(cols[8])?,
                band: parse_f64(cols[9])?,
            })
        })
        .collect()
}

/// One lemma check as a CSV row. The family parameters travel in a single
/// semicolon-joined column so the schema stays flat and unquoted.
pub fn vdc_csv(config: &RunConfig, family: &str, params: &str, check: &LemmaCheck) -> String {
    format!(
        "{}lemma,family,params,direct_re,direct_im,transform_re,transform_im,deviation,budget,ratio,terms\n{},{},{},{},{},{},{},{},{},{},{}\n",
        preamble(config),
        check.lemma,
        family,
        params,
        check.direct.re,
        check.direct.im,
        check.transform.re,
        check.transform.im,
        check.deviation,
        check.budget,
        check.ratio,
        check.term_count,
    )
}

/// Data rows of a versioned CSV: skips `#` comments, demands the version
/// line and the expected header, splits the rest on commas.
fn data_rows<'a>(
    text: &'a str,
    header: &str,
) -> Result<impl Iterator<Item = (&'a str, Vec<&'a str>)>> {
    if text.lines().next() != Some(CSV_VERSION_LINE) {
        return Err(Error::invariant(format!("missing version line {CSV_VERSION_LINE:?}")));
    }
    let mut lines = text.lines().skip(1).skip_while(|l| l.starts_with('#'));
    match lines.next() {
        Some(h) if h == header => {}
        other => return Err(Error::invariant(format!("expected header {header:?}, got {other:?}"))),
    }
    Ok(lines
        .filter(|l| !l.is_empty())
        .map(|l| (l, l.split(',').collect::<Vec<_>>())))
}

fn parse_f64(field: &str) -> Result<f64> {
    field.parse().map_err(|_| Error::invariant(format!("bad float field {field:?}")))
}

fn parse_int(field: &str) -> Result<u64> {
    field.parse().map_err(|_| Error::invariant(format!("bad integer field {field:?}")))
}
