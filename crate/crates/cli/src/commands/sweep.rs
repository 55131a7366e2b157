//! `sweep`: S and negative fractions across the χ grid. Rows that cannot
//! be estimated carry a status token instead of numbers; the sweep always
//! completes.

use quadbell_core::bell::sweep_chi;
use quadbell_core::oracle;
use quadbell_core::{Error, RandomStream};
use serde::Serialize;

use super::Failure;
use crate::config::ExperimentConfig;
use crate::format::{number, write_json, CsvSink};

pub const CSV_HEADER: [&str; 15] = [
    "chi",
    "theta_a",
    "theta_a_prime",
    "theta_b",
    "theta_b_prime",
    "representation",
    "S",
    "stderr_S",
    "neg_frac_r_a_plus",
    "neg_frac_r_a_minus",
    "neg_frac_r_b_plus",
    "neg_frac_r_b_minus",
    "n",
    "seed",
    "status",
];

fn status_token(err: &Error) -> &'static str {
    match err {
        Error::DegenerateDenominator { .. } => "degenerate_denominator",
        Error::InvalidSqueeze(_) => "invalid_chi",
        _ => "error",
    }
}

#[derive(Serialize)]
struct JsonRow {
    chi: f64,
    status: String,
    s: Option<f64>,
    stderr_s: Option<f64>,
    oracle_s: Option<f64>,
    negative_fractions: Option<[f64; 4]>,
    n: u64,
}

#[derive(Serialize)]
struct JsonSummary {
    command: &'static str,
    seed: u64,
    samples: u64,
    chunks: u32,
    representation: String,
    angles: [f64; 4],
    rows: Vec<JsonRow>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    cfg.check_error_bars().map_err(Failure::Usage)?;
    let run_cfg = cfg.run_config();
    let stream = RandomStream::new(cfg.seed, 0);
    let points = sweep_chi(
        &cfg.chi_grid,
        &cfg.angles,
        cfg.representation,
        &run_cfg,
        stream,
    );
    let [ta, tap, tb, tbp] = cfg.angle_list();

    let mut csv = CsvSink::open(cfg.out_csv.as_deref())?;
    csv.header(&CSV_HEADER)?;
    let mut json_rows = Vec::new();
    for point in &points {
        let (s_field, se_field, status) = match &point.bell {
            Ok(est) => (
                number(est.s_value),
                number(est.s_stderr),
                "ok".to_string(),
            ),
            Err(err) => (String::new(), String::new(), status_token(err).to_string()),
        };
        let fractions = point
            .positivity
            .as_ref()
            .ok()
            .map(|rep| std::array::from_fn::<f64, 4, _>(|slot| rep.fractions[slot].fraction));
        let frac_fields: [String; 4] = match &fractions {
            Some(f) => std::array::from_fn(|slot| number(f[slot])),
            None => std::array::from_fn(|_| String::new()),
        };
        let n = point.bell.as_ref().map(|b| b.n_per_pair).unwrap_or(0);
        csv.row(&[
            number(point.chi),
            number(ta),
            number(tap),
            number(tb),
            number(tbp),
            cfg.representation.to_string(),
            s_field,
            se_field,
            frac_fields[0].clone(),
            frac_fields[1].clone(),
            frac_fields[2].clone(),
            frac_fields[3].clone(),
            n.to_string(),
            cfg.seed.to_string(),
            status.clone(),
        ])?;
        json_rows.push(JsonRow {
            chi: point.chi,
            status,
            s: point.bell.as_ref().ok().map(|b| b.s_value),
            stderr_s: point.bell.as_ref().ok().map(|b| b.s_stderr),
            oracle_s: oracle::bell_s(point.chi, &cfg.angles).ok().map(|o| o.value),
            negative_fractions: fractions,
            n,
        });
    }
    csv.finish()?;

    if let Some(path) = &cfg.out_json {
        write_json(
            path,
            &JsonSummary {
                command: "sweep",
                seed: cfg.seed,
                samples: cfg.samples,
                chunks: cfg.chunks,
                representation: cfg.representation.to_string(),
                angles: cfg.angle_list(),
                rows: json_rows,
            },
        )?;
    }
    Ok(())
}
