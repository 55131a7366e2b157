//! `positivity`: negative-count-rate fractions per χ and rate channel,
//! with the exact probabilities alongside.

use quadbell_core::bell::{positivity_report, RATE_LABELS};
use quadbell_core::lhv::AnalyzerSettings;
use quadbell_core::oracle;
use quadbell_core::{CovarianceModel, RandomStream};
use serde::Serialize;

use super::{run_err, Failure};
use crate::config::ExperimentConfig;
use crate::format::{number, write_json, CsvSink};

pub const CSV_HEADER: [&str; 6] = [
    "chi",
    "representation",
    "rate",
    "negative_fraction",
    "stderr",
    "oracle",
];

#[derive(Serialize)]
struct JsonRow {
    chi: f64,
    representation: String,
    rate: &'static str,
    negative_fraction: f64,
    stderr: f64,
    negatives: u64,
    n: u64,
    oracle: f64,
}

#[derive(Serialize)]
struct JsonSummary {
    command: &'static str,
    seed: u64,
    samples: u64,
    chunks: u32,
    rows: Vec<JsonRow>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    cfg.check_error_bars().map_err(Failure::Usage)?;
    let run_cfg = cfg.run_config();
    let stream = RandomStream::new(cfg.seed, 0);
    let settings = AnalyzerSettings::new(cfg.angles.theta_a, cfg.angles.theta_b);

    let mut rows = Vec::new();
    for (row, &chi) in cfg.chi_grid.iter().enumerate() {
        let model = CovarianceModel::for_chi(chi).map_err(run_err)?;
        let report = positivity_report(
            &model,
            &settings,
            cfg.representation,
            &run_cfg,
            stream.substream(row as u64 * cfg.chunks as u64),
        )
        .map_err(run_err)?;
        let exact = oracle::negative_fraction(chi, cfg.representation).value;
        for (slot, label) in RATE_LABELS.iter().enumerate() {
            let frac = report.fractions[slot];
            rows.push(JsonRow {
                chi,
                representation: cfg.representation.to_string(),
                rate: label,
                negative_fraction: frac.fraction,
                stderr: frac.stderr,
                negatives: frac.negatives,
                n: frac.n,
                oracle: exact,
            });
        }
    }

    let mut csv = CsvSink::open(cfg.out_csv.as_deref())?;
    csv.header(&CSV_HEADER)?;
    for row in &rows {
        csv.row(&[
            number(row.chi),
            row.representation.clone(),
            row.rate.to_string(),
            number(row.negative_fraction),
            number(row.stderr),
            number(row.oracle),
        ])?;
    }
    csv.finish()?;

    if let Some(path) = &cfg.out_json {
        write_json(
            path,
            &JsonSummary {
                command: "positivity",
                seed: cfg.seed,
                samples: cfg.samples,
                chunks: cfg.chunks,
                rows,
            },
        )?;
    }
    Ok(())
}
