//! `sample-dump`: raw hidden variables and the realities derived from
//! them, one CSV row per sample, for external analysis and plotting.
//!
//! Uses the first χ of the grid and the (θ_A, θ_B) pair of the angle set;
//! draws sequentially from substream 0.

use quadbell_core::lhv::{
    count_rates_from_quadratures, quadrature_realities, wigner_intensity_rates, AnalyzerSettings,
};
use quadbell_core::{CovarianceModel, RandomStream};

use super::{run_err, Failure};
use crate::config::ExperimentConfig;
use crate::format::{number, CsvSink};

pub const CSV_HEADER: [&str; 33] = [
    "index",
    "e1_re",
    "e1_im",
    "e2_re",
    "e2_im",
    "e3_re",
    "e3_im",
    "e4_re",
    "e4_im",
    "e5_re",
    "e5_im",
    "e6_re",
    "e6_im",
    "x_a_plus_1",
    "x_a_plus_2",
    "x_a_minus_1",
    "x_a_minus_2",
    "x_b_plus_1",
    "x_b_plus_2",
    "x_b_minus_1",
    "x_b_minus_2",
    "x_va_1",
    "x_va_2",
    "x_vb_1",
    "x_vb_2",
    "r_eq3_a_plus",
    "r_eq3_a_minus",
    "r_eq3_b_plus",
    "r_eq3_b_minus",
    "r_eq4_a_plus",
    "r_eq4_a_minus",
    "r_eq4_b_plus",
    "r_eq4_b_minus",
];

pub fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    if cfg.samples > cfg.dump_cap {
        return Err(Failure::Usage(format!(
            "refusing to dump {} samples: dump_cap is {}",
            cfg.samples, cfg.dump_cap
        )));
    }
    let chi = cfg.chi_grid[0];
    let model = CovarianceModel::for_chi(chi).map_err(run_err)?;
    let settings = AnalyzerSettings::new(cfg.angles.theta_a, cfg.angles.theta_b);
    let mut sampler = model.sampler(RandomStream::new(cfg.seed, 0));

    let mut csv = CsvSink::open(cfg.out_csv.as_deref())?;
    csv.header(&CSV_HEADER)?;
    for index in 0..cfg.samples {
        let sample = sampler.next_sample();
        let q = quadrature_realities(&sample, &settings);
        let eq3 = count_rates_from_quadratures(&q);
        let eq4 = wigner_intensity_rates(&sample, &settings);
        let mut fields = Vec::with_capacity(CSV_HEADER.len());
        fields.push(index.to_string());
        for e in sample.as_array() {
            fields.push(number(e.re));
            fields.push(number(e.im));
        }
        for pair in [q.a_plus, q.a_minus, q.b_plus, q.b_minus, q.vac_a, q.vac_b] {
            fields.push(number(pair[0]));
            fields.push(number(pair[1]));
        }
        for r in eq3.rates().into_iter().chain(eq4.rates()) {
            fields.push(number(r));
        }
        csv.row(&fields)?;
    }
    csv.finish()?;
    Ok(())
}
