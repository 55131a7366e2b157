//! `validate`: one pass/fail row per oracle comparison (raw second
//! moments, dark noise, mean rates, joint product moments, E, S and
//! negative fractions) at a five-standard-error tolerance. Exit code 0
//! only when every row passes; rows whose exact value is undefined at
//! χ = 0 report the degeneracy and count as expected passes.

use quadbell_core::bell::{
    bell_estimate, correlation_from_chunks, JointMomentAccumulator, RATE_LABELS,
};
use quadbell_core::lhv::{dark_noise_rates, rates_for, AnalyzerSettings, Sign};
use quadbell_core::oracle;
use quadbell_core::{CovarianceModel, Error, RandomStream};
use serde::Serialize;

use super::{run_err, Failure};
use crate::config::ExperimentConfig;
use crate::format::{number, write_json, CsvSink};

const TOLERANCE_SIGMAS: f64 = 5.0;

pub const CSV_HEADER: [&str; 9] = [
    "check",
    "chi",
    "representation",
    "observed",
    "expected",
    "stderr",
    "z",
    "tolerance_sigmas",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Pass,
    Fail,
    DegenerateExpected,
}

#[derive(Serialize)]
struct CheckRow {
    check: String,
    chi: f64,
    representation: String,
    observed: Option<f64>,
    expected: Option<f64>,
    stderr: Option<f64>,
    z: Option<f64>,
    status: Status,
}

impl CheckRow {
    fn compare(
        check: impl Into<String>,
        chi: f64,
        representation: &str,
        observed: f64,
        expected: f64,
        stderr: f64,
    ) -> Self {
        let (z, status) = if stderr > 0.0 {
            let z = (observed - expected).abs() / stderr;
            (
                Some(z),
                if z <= TOLERANCE_SIGMAS {
                    Status::Pass
                } else {
                    Status::Fail
                },
            )
        } else if observed == expected {
            (Some(0.0), Status::Pass)
        } else {
            (None, Status::Fail)
        };
        Self {
            check: check.into(),
            chi,
            representation: representation.to_string(),
            observed: Some(observed),
            expected: Some(expected),
            stderr: Some(stderr),
            z,
            status,
        }
    }

    fn degenerate(check: impl Into<String>, chi: f64, representation: &str) -> Self {
        Self {
            check: check.into(),
            chi,
            representation: representation.to_string(),
            observed: None,
            expected: None,
            stderr: None,
            z: None,
            status: Status::DegenerateExpected,
        }
    }

    fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Weighted mean over chunk (sum, count) pairs with a jackknife error.
fn jackknife_mean(chunks: &[(f64, u64)]) -> (f64, f64) {
    let total: f64 = chunks.iter().map(|(s, _)| s).sum();
    let count: u64 = chunks.iter().map(|(_, n)| n).sum();
    let mean = total / count as f64;
    let k = chunks.len();
    let loo: Vec<f64> = chunks
        .iter()
        .map(|(s, n)| (total - s) / (count - n) as f64)
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / k as f64;
    let ss: f64 = loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)).sum();
    (mean, ((k - 1) as f64 / k as f64 * ss).sqrt())
}

/// Per-chunk raw-moment sums gathered alongside the rate accumulator.
struct MomentChunk {
    n: u64,
    sq_re1: f64,
    re1_re2: f64,
    im1_im2: f64,
    abs_e5_sq: f64,
    dark_a: f64,
    acc: JointMomentAccumulator,
}

fn moments_pass(
    cfg: &ExperimentConfig,
    model: &CovarianceModel,
    stream: RandomStream,
) -> Vec<MomentChunk> {
    use rayon::prelude::*;
    let settings = AnalyzerSettings::new(cfg.angles.theta_a, cfg.angles.theta_b);
    let k = cfg.chunks as u64;
    let base = cfg.samples / k;
    let remainder = cfg.samples % k;
    (0..k)
        .into_par_iter()
        .map(|c| {
            let size = base + u64::from(c < remainder);
            let mut sampler = model.sampler(stream.substream(c));
            let mut chunk = MomentChunk {
                n: size,
                sq_re1: 0.0,
                re1_re2: 0.0,
                im1_im2: 0.0,
                abs_e5_sq: 0.0,
                dark_a: 0.0,
                acc: JointMomentAccumulator::new(cfg.representation),
            };
            for _ in 0..size {
                let s = sampler.next_sample();
                chunk.sq_re1 += s.e1.re * s.e1.re;
                chunk.re1_re2 += s.e1.re * s.e2.re;
                chunk.im1_im2 += s.e1.im * s.e2.im;
                chunk.abs_e5_sq += s.e5.norm_sqr();
                chunk.dark_a += dark_noise_rates(&s).r_a_plus;
                let rates = rates_for(cfg.representation, &s, &settings);
                chunk.acc.push(&rates).expect("fixed representation");
            }
            chunk
        })
        .collect()
}

fn rows_for_chi(cfg: &ExperimentConfig, chi: f64, row: usize) -> Result<Vec<CheckRow>, Failure> {
    let model = CovarianceModel::for_chi(chi).map_err(run_err)?;
    let rep = cfg.representation.to_string();
    let stream = RandomStream::new(cfg.seed, 0).substream(row as u64 * 5 * cfg.chunks as u64);
    let chunks = moments_pass(cfg, &model, stream);
    let mut rows = Vec::new();

    // Raw second moments of the hidden variables.
    type MomentCheck = (&'static str, fn(&MomentChunk) -> f64, f64);
    let second_moment_checks: [MomentCheck; 4] = [
        ("second_moment_re_e1_sq", |c| c.sq_re1, model.var_sq()),
        ("second_moment_re_e1_re_e2", |c| c.re1_re2, model.cov_x()),
        ("second_moment_im_e1_im_e2", |c| c.im1_im2, model.cov_y()),
        ("second_moment_abs_e5_sq", |c| c.abs_e5_sq, 0.5),
    ];
    for (name, extract, expected) in second_moment_checks {
        let stats: Vec<(f64, u64)> = chunks.iter().map(|c| (extract(c), c.n)).collect();
        let (mean, se) = jackknife_mean(&stats);
        rows.push(CheckRow::compare(name, chi, &rep, mean, expected, se));
    }

    // Dark-noise record mean: 4⟨|E_5|²⟩ = 2 at every χ.
    let dark_stats: Vec<(f64, u64)> = chunks.iter().map(|c| (c.dark_a, c.n)).collect();
    let (dark_mean, dark_se) = jackknife_mean(&dark_stats);
    rows.push(CheckRow::compare(
        "dark_noise_mean",
        chi,
        &rep,
        dark_mean,
        2.0,
        dark_se,
    ));

    // Mean rates of the four channels.
    for (slot, label) in RATE_LABELS.iter().enumerate() {
        let stats: Vec<(f64, u64)> = chunks
            .iter()
            .map(|c| (c.acc.rate_sum(slot), c.n))
            .collect();
        let (mean, se) = jackknife_mean(&stats);
        let expected = oracle::mean_rate(chi, cfg.representation).value;
        rows.push(CheckRow::compare(
            format!("mean_rate_{label}"),
            chi,
            &rep,
            mean,
            expected,
            se,
        ));
    }

    // Joint product moments at Δ = θ_A - θ_B.
    let delta = cfg.angles.theta_a - cfg.angles.theta_b;
    let channels = [
        ("pp", (Sign::Plus, Sign::Plus)),
        ("pm", (Sign::Plus, Sign::Minus)),
        ("mp", (Sign::Minus, Sign::Plus)),
        ("mm", (Sign::Minus, Sign::Minus)),
    ];
    for (slot, (label, signs)) in channels.into_iter().enumerate() {
        let stats: Vec<(f64, u64)> = chunks
            .iter()
            .map(|c| (c.acc.product_sum(slot), c.n))
            .collect();
        let (mean, se) = jackknife_mean(&stats);
        let expected = oracle::joint_moment(chi, delta, signs, cfg.representation).value;
        rows.push(CheckRow::compare(
            format!("joint_moment_{label}"),
            chi,
            &rep,
            mean,
            expected,
            se,
        ));
    }

    // Normalized correlation at (θ_A, θ_B).
    match oracle::correlation_e(chi, delta) {
        Ok(exact) => {
            let accs: Vec<JointMomentAccumulator> =
                chunks.iter().map(|c| c.acc.clone()).collect();
            let est = correlation_from_chunks(&accs, cfg.epsilon).map_err(run_err)?;
            rows.push(CheckRow::compare(
                "correlation_E",
                chi,
                &rep,
                est.e,
                exact.value,
                est.stderr,
            ));
        }
        Err(Error::DegenerateDenominator { .. }) => {
            rows.push(CheckRow::degenerate("correlation_E", chi, &rep));
        }
        Err(err) => return Err(run_err(err)),
    }

    // CHSH parameter over the full angle set.
    match oracle::bell_s(chi, &cfg.angles) {
        Ok(exact) => {
            let est = bell_estimate(
                &model,
                &cfg.angles,
                cfg.representation,
                &cfg.run_config(),
                stream.substream(cfg.chunks as u64),
            )
            .map_err(run_err)?;
            rows.push(CheckRow::compare(
                "bell_S",
                chi,
                &rep,
                est.s_value,
                exact.value,
                est.s_stderr,
            ));
        }
        Err(Error::DegenerateDenominator { .. }) => {
            rows.push(CheckRow::degenerate("bell_S", chi, &rep));
        }
        Err(err) => return Err(run_err(err)),
    }

    // Negative-rate fractions.
    let n_total: u64 = chunks.iter().map(|c| c.n).sum();
    let expected = oracle::negative_fraction(chi, cfg.representation).value;
    for (slot, label) in RATE_LABELS.iter().enumerate() {
        let negatives: u64 = chunks.iter().map(|c| c.acc.negative_count(slot)).sum();
        let fraction = negatives as f64 / n_total as f64;
        let se = (expected * (1.0 - expected) / n_total as f64).sqrt();
        rows.push(CheckRow::compare(
            format!("negative_fraction_{label}"),
            chi,
            &rep,
            fraction,
            expected,
            se,
        ));
    }

    Ok(rows)
}

#[derive(Serialize)]
struct JsonSummary {
    command: &'static str,
    seed: u64,
    samples: u64,
    chunks: u32,
    tolerance_sigmas: f64,
    all_passed: bool,
    rows: Vec<CheckRow>,
}

fn print_table(rows: &[CheckRow]) {
    println!(
        "{:<28} {:>6} {:>5} {:>14} {:>14} {:>11} {:>7}  status",
        "check", "chi", "rep", "observed", "expected", "stderr", "z"
    );
    for row in rows {
        let fmt_fixed = |v: Option<f64>| match v {
            Some(x) => format!("{x:>14.6}"),
            None => format!("{:>14}", "-"),
        };
        let fmt_sci = |v: Option<f64>| match v {
            Some(x) => format!("{x:>11.2e}"),
            None => format!("{:>11}", "-"),
        };
        let fmt_z = |v: Option<f64>| match v {
            Some(x) => format!("{x:>7.2}"),
            None => format!("{:>7}", "-"),
        };
        let status = match row.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::DegenerateExpected => "degenerate (expected)",
        };
        println!(
            "{:<28} {:>6.3} {:>5} {} {} {} {}  {}",
            row.check,
            row.chi,
            row.representation,
            fmt_fixed(row.observed),
            fmt_fixed(row.expected),
            fmt_sci(row.stderr),
            fmt_z(row.z),
            status
        );
    }
}

/// Returns whether every row passed.
pub fn run(cfg: &ExperimentConfig) -> Result<bool, Failure> {
    cfg.check_error_bars().map_err(Failure::Usage)?;
    let mut rows = Vec::new();
    for (row, &chi) in cfg.chi_grid.iter().enumerate() {
        rows.extend(rows_for_chi(cfg, chi, row)?);
    }
    let all_passed = rows.iter().all(CheckRow::passed);
    print_table(&rows);
    let passed = rows.iter().filter(|r| r.passed()).count();
    println!(
        "validation: {passed}/{} rows within {TOLERANCE_SIGMAS} sigma{}",
        rows.len(),
        if all_passed { "" } else { " -- FAILED" }
    );

    if let Some(path) = &cfg.out_csv {
        let mut csv = CsvSink::open(Some(path))?;
        csv.header(&CSV_HEADER)?;
        for row in &rows {
            let opt = |v: Option<f64>| v.map(number).unwrap_or_default();
            csv.row(&[
                row.check.clone(),
                number(row.chi),
                row.representation.clone(),
                opt(row.observed),
                opt(row.expected),
                opt(row.stderr),
                opt(row.z),
                number(TOLERANCE_SIGMAS),
                match row.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::DegenerateExpected => "degenerate_expected",
                }
                .to_string(),
            ])?;
        }
        csv.finish()?;
    }
    if let Some(path) = &cfg.out_json {
        write_json(
            path,
            &JsonSummary {
                command: "validate",
                seed: cfg.seed,
                samples: cfg.samples,
                chunks: cfg.chunks,
                tolerance_sigmas: TOLERANCE_SIGMAS,
                all_passed,
                rows,
            },
        )?;
    }
    Ok(all_passed)
}
