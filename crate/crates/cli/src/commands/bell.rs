//! `bell`: CHSH estimates over the χ grid, one CSV row per χ, with an
//! optional JSON summary carrying the exact values and deviations.

use quadbell_core::bell::bell_estimate;
use quadbell_core::oracle;
use quadbell_core::{CovarianceModel, RandomStream};
use serde::Serialize;

use super::{run_err, Failure};
use crate::config::ExperimentConfig;
use crate::format::{number, write_json, CsvSink};

pub const CSV_HEADER: [&str; 14] = [
    "chi",
    "theta_a",
    "theta_a_prime",
    "theta_b",
    "theta_b_prime",
    "representation",
    "E_ab",
    "E_abp",
    "E_apb",
    "E_apbp",
    "S",
    "stderr_S",
    "n",
    "seed",
];

#[derive(Serialize)]
struct OracleComparison {
    e_ab: f64,
    e_abp: f64,
    e_apb: f64,
    e_apbp: f64,
    s: f64,
    s_deviation: f64,
    s_deviation_sigmas: f64,
}

#[derive(Serialize)]
struct JsonRow {
    chi: f64,
    theta_a: f64,
    theta_a_prime: f64,
    theta_b: f64,
    theta_b_prime: f64,
    representation: String,
    e_ab: f64,
    e_abp: f64,
    e_apb: f64,
    e_apbp: f64,
    e_stderrs: [f64; 4],
    s: f64,
    stderr_s: f64,
    n: u64,
    seed: u64,
    /// Exact values; absent when the correlation is undefined (χ = 0).
    oracle: Option<OracleComparison>,
}

#[derive(Serialize)]
struct JsonSummary {
    command: &'static str,
    seed: u64,
    samples: u64,
    chunks: u32,
    epsilon: f64,
    representation: String,
    angles: [f64; 4],
    rows: Vec<JsonRow>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    cfg.check_error_bars().map_err(Failure::Usage)?;
    let run_cfg = cfg.run_config();
    let stream = RandomStream::new(cfg.seed, 0);
    let [ta, tap, tb, tbp] = cfg.angle_list();

    let mut rows = Vec::new();
    for (row, &chi) in cfg.chi_grid.iter().enumerate() {
        let model = CovarianceModel::for_chi(chi).map_err(run_err)?;
        let row_stream = stream.substream(row as u64 * 4 * cfg.chunks as u64);
        let est = bell_estimate(&model, &cfg.angles, cfg.representation, &run_cfg, row_stream)
            .map_err(run_err)?;
        let oracle = match (
            oracle::correlation_e_pairs(chi, &cfg.angles),
            oracle::bell_s(chi, &cfg.angles),
        ) {
            (Ok([e_ab, e_abp, e_apb, e_apbp]), Ok(s)) => Some(OracleComparison {
                e_ab,
                e_abp,
                e_apb,
                e_apbp,
                s: s.value,
                s_deviation: est.s_value - s.value,
                s_deviation_sigmas: if est.s_stderr > 0.0 {
                    (est.s_value - s.value) / est.s_stderr
                } else {
                    0.0
                },
            }),
            _ => None,
        };
        rows.push(JsonRow {
            chi,
            theta_a: ta,
            theta_a_prime: tap,
            theta_b: tb,
            theta_b_prime: tbp,
            representation: cfg.representation.to_string(),
            e_ab: est.e_values[0],
            e_abp: est.e_values[1],
            e_apb: est.e_values[2],
            e_apbp: est.e_values[3],
            e_stderrs: est.e_stderrs,
            s: est.s_value,
            stderr_s: est.s_stderr,
            n: est.n_per_pair,
            seed: cfg.seed,
            oracle,
        });
    }

    let mut csv = CsvSink::open(cfg.out_csv.as_deref())?;
    csv.header(&CSV_HEADER)?;
    for row in &rows {
        csv.row(&[
            number(row.chi),
            number(row.theta_a),
            number(row.theta_a_prime),
            number(row.theta_b),
            number(row.theta_b_prime),
            row.representation.clone(),
            number(row.e_ab),
            number(row.e_abp),
            number(row.e_apb),
            number(row.e_apbp),
            number(row.s),
            number(row.stderr_s),
            row.n.to_string(),
            row.seed.to_string(),
        ])?;
    }
    csv.finish()?;

    if let Some(path) = &cfg.out_json {
        write_json(
            path,
            &JsonSummary {
                command: "bell",
                seed: cfg.seed,
                samples: cfg.samples,
                chunks: cfg.chunks,
                epsilon: cfg.epsilon,
                representation: cfg.representation.to_string(),
                angles: cfg.angle_list(),
                rows,
            },
        )?;
    }
    Ok(())
}
