//! Seeded Monte Carlo sweeps over (p, d) cells.
//!
//! A sweep draws `samples` uniform Boolean functions per cell, runs the
//! enabled analyses (certificate, exact enumeration, annealing, LP), and
//! pairs the empirical rates with the closed-form predictions from the
//! determinacy module. Output is a fixed-schema CSV that is byte-identical
//! for a given config no matter how many worker threads run it: each
//! sample's randomness is keyed by its global index, and all reductions
//! happen in index order.

pub mod rng;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;

use crate::collision::{collide_anneal, collide_exact, AnnealParams};
use crate::determinacy::{certify_unique, probability_bounds};
use crate::error::Error;
use crate::function::BooleanFunction;
use crate::lp::max_competitor;
use crate::MAX_DIMENSION;

pub use rng::{substream_key, SplitMix64, Xoshiro256StarStar};

/// Draws one uniform Boolean function from the given substream.
///
/// Each word of the truth table is one xoshiro256** output block; bit m of
/// the blocks is the sign at point mask m (set = -1).
pub fn sample_function(p: u32, stream_seed: u64) -> Result<BooleanFunction, Error> {
    if p == 0 || p > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange(p));
    }
    let n = 1usize << p;
    let mut generator = Xoshiro256StarStar::from_key(stream_seed);
    let words = (0..n.div_ceil(64))
        .map(|_| generator.next_u64())
        .collect();
    BooleanFunction::from_words(p, words)
}

/// What to run per cell and on which grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p_list: Vec<u32>,
    /// None means every d in 0..=p for each p.
    pub d_list: Option<Vec<u32>>,
    pub samples: u64,
    pub eta: f64,
    pub omega: f64,
    pub seed: u64,
    pub run_certificate: bool,
    pub run_exact_enum: bool,
    pub run_anneal: bool,
    pub run_lp: bool,
}

impl SweepConfig {
    /// Certificate-only config with the reporting defaults eta = omega = 1.
    pub fn new(p_list: Vec<u32>, d_list: Option<Vec<u32>>, samples: u64, seed: u64) -> Self {
        SweepConfig {
            p_list,
            d_list,
            samples,
            eta: 1.0,
            omega: 1.0,
            seed,
            run_certificate: true,
            run_exact_enum: false,
            run_anneal: false,
            run_lp: false,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.p_list.is_empty() {
            return Err(Error::Parse("p_list is empty".into()));
        }
        for &p in &self.p_list {
            if p == 0 || p > MAX_DIMENSION {
                return Err(Error::DimensionOutOfRange(p));
            }
            if self.run_exact_enum && p > 4 {
                return Err(Error::SizeCap {
                    operation: "exact enumeration in sweep",
                    dimension: p,
                    max: 4,
                });
            }
            if self.run_lp && p > 8 {
                return Err(Error::SizeCap {
                    operation: "LP in sweep",
                    dimension: p,
                    max: 8,
                });
            }
            if let Some(ds) = &self.d_list {
                for &d in ds {
                    if d > p {
                        return Err(Error::DegreeOutOfRange {
                            degree: d,
                            dimension: p,
                        });
                    }
                }
            }
        }
        if self.samples < 1 {
            return Err(Error::TooFewSamples {
                requested: self.samples,
                minimum: 1,
            });
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: "must lie in (0, 1]",
            });
        }
        if !(self.omega >= 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be finite and >= 0",
            });
        }
        Ok(())
    }

    /// Parses a flat `key=value` file; `#` starts a comment line.
    ///
    /// Keys: p_list, d_list (comma-separated or `all`), samples, eta,
    /// omega, seed, run_certificate, run_exact_enum, run_anneal, run_lp.
    /// p_list, samples and seed are required; the rest default as in
    /// [`SweepConfig::new`].
    pub fn parse_key_value(text: &str) -> Result<Self, Error> {
        let mut p_list: Option<Vec<u32>> = None;
        let mut d_list: Option<Vec<u32>> = None;
        let mut samples: Option<u64> = None;
        let mut seed: Option<u64> = None;
        let mut config = SweepConfig::new(Vec::new(), None, 0, 0);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Parse(format!("line {}: bad {what}: {value:?}", lineno + 1));
            match key {
                "p_list" => {
                    p_list = Some(parse_u32_list(value).ok_or_else(|| bad("p_list"))?);
                }
                "d_list" => {
                    if value != "all" {
                        d_list = Some(parse_u32_list(value).ok_or_else(|| bad("d_list"))?);
                    }
                }
                "samples" => samples = Some(value.parse().map_err(|_| bad("samples"))?),
                "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "eta" => config.eta = value.parse().map_err(|_| bad("eta"))?,
                "omega" => config.omega = value.parse().map_err(|_| bad("omega"))?,
                "run_certificate" => {
                    config.run_certificate = value.parse().map_err(|_| bad("run_certificate"))?
                }
                "run_exact_enum" => {
                    config.run_exact_enum = value.parse().map_err(|_| bad("run_exact_enum"))?
                }
                "run_anneal" => config.run_anneal = value.parse().map_err(|_| bad("run_anneal"))?,
                "run_lp" => config.run_lp = value.parse().map_err(|_| bad("run_lp"))?,
                other => return Err(Error::Parse(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        config.p_list = p_list.ok_or_else(|| Error::Parse("missing p_list".into()))?;
        config.d_list = d_list;
        config.samples = samples.ok_or_else(|| Error::Parse("missing samples".into()))?;
        config.seed = seed.ok_or_else(|| Error::Parse("missing seed".into()))?;
        config.validate()?;
        Ok(config)
    }
}

fn parse_u32_list(value: &str) -> Option<Vec<u32>> {
    let items: Result<Vec<u32>, _> = value.split(',').map(|v| v.trim().parse()).collect();
    match items {
        Ok(v) if !v.is_empty() => Some(v),
        _ => None,
    }
}

/// One (p, d) cell of a sweep: empirical rates next to the theory columns.
/// Empirical fields are None when their analysis was not enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub p: u32,
    pub d: u32,
    pub samples: u64,
    pub seed: u64,
    pub success_rate: Option<f64>,
    pub mean_eta: Option<f64>,
    pub max_eta: Option<f64>,
    pub collision_rate: Option<f64>,
    pub lp_zero_rate: Option<f64>,
    pub k_d: BigUint,
    pub m_d: BigUint,
    pub md_over_n: f64,
    pub log_nonuniq_bound: f64,
    pub log_uniq_fail_bound: f64,
    pub d_lower: f64,
    pub d_upper: f64,
}

/// The fixed CSV schema; one [`SweepCell`] per row in this column order.
pub const CSV_HEADER: &str = "p,d,samples,seed,success_rate,mean_eta,max_eta,collision_rate,lp_zero_rate,K_d,M_d,Md_over_N,log_nonuniq_bound,log_uniq_fail_bound,d_lower,d_upper";

#[derive(Default, Clone, Copy)]
struct SampleRecord {
    holds: bool,
    eta_hat: f64,
    collision: bool,
    lp_zero: bool,
}

/// Runs every cell of the config, p-major d-minor, and returns the cells
/// in that canonical order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepCell>, Error> {
    config.validate()?;
    let mut grid = Vec::new();
    for &p in &config.p_list {
        match &config.d_list {
            Some(ds) => grid.extend(ds.iter().map(|&d| (p, d))),
            None => grid.extend((0..=p).map(|d| (p, d))),
        }
    }
    grid.iter()
        .enumerate()
        .map(|(cell_index, &(p, d))| run_cell(config, cell_index as u64, p, d))
        .collect()
}

fn run_cell(config: &SweepConfig, cell_index: u64, p: u32, d: u32) -> Result<SweepCell, Error> {
    let n = (1u64 << p) as f64;
    let base = cell_index * config.samples;
    // Preconditions were validated for the whole grid, so per-sample
    // analysis failures below would be bugs, not user errors.
    let records: Vec<SampleRecord> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let key = substream_key(config.seed, base + i);
            let f = sample_function(p, key).expect("p validated");
            let mut record = SampleRecord::default();
            if config.run_certificate {
                let cert = certify_unique(&f, d).expect("d validated");
                record.holds = cert.holds;
                record.eta_hat = cert.max_residual_num as f64 / n;
            }
            if config.run_exact_enum {
                let search = collide_exact(&f, d).expect("cap validated");
                record.collision = search.witness.is_some();
            } else if config.run_anneal {
                let params = AnnealParams::new(p, key);
                record.collision = collide_anneal(&f, d, &params)
                    .expect("d validated")
                    .is_some();
            }
            if config.run_lp {
                let outcome = max_competitor(&f, d).expect("cap validated");
                record.lp_zero = outcome.optimum.is_zero();
            }
            record
        })
        .collect();

    let samples_f = config.samples as f64;
    let rate = |count: u64| count as f64 / samples_f;
    let (mut hold_count, mut eta_sum, mut eta_max) = (0u64, 0.0f64, 0.0f64);
    let (mut collision_count, mut lp_zero_count) = (0u64, 0u64);
    for r in &records {
        hold_count += r.holds as u64;
        eta_sum += r.eta_hat;
        eta_max = eta_max.max(r.eta_hat);
        collision_count += r.collision as u64;
        lp_zero_count += r.lp_zero as u64;
    }

    let bounds = probability_bounds(p, d, config.eta, config.omega)?;
    Ok(SweepCell {
        p,
        d,
        samples: config.samples,
        seed: config.seed,
        success_rate: config.run_certificate.then(|| rate(hold_count)),
        mean_eta: config.run_certificate.then(|| eta_sum / samples_f),
        max_eta: config.run_certificate.then_some(eta_max),
        collision_rate: (config.run_exact_enum || config.run_anneal)
            .then(|| rate(collision_count)),
        lp_zero_rate: config.run_lp.then(|| rate(lp_zero_count)),
        k_d: bounds.k_d,
        m_d: bounds.m_d,
        md_over_n: bounds.md_over_n,
        log_nonuniq_bound: bounds.log_nonuniqueness_bound,
        log_uniq_fail_bound: bounds.log_uniqueness_failure_bound,
        d_lower: bounds.lower_threshold,
        d_upper: bounds.upper_threshold,
    })
}

fn opt_f64(v: &Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Renders cells to the fixed schema. Floats use Rust's shortest
/// round-trip formatting; non-finite log bounds print as `-inf`.
pub fn emit_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.p,
            c.d,
            c.samples,
            c.seed,
            opt_f64(&c.success_rate),
            opt_f64(&c.mean_eta),
            opt_f64(&c.max_eta),
            opt_f64(&c.collision_rate),
            opt_f64(&c.lp_zero_rate),
            c.k_d,
            c.m_d,
            c.md_over_n,
            c.log_nonuniq_bound,
            c.log_uniq_fail_bound,
            c.d_lower,
            c.d_upper,
        ));
    }
    out
}

/// Parses [`emit_csv`] output back into cells (used by the plot command).
pub fn parse_csv(text: &str) -> Result<Vec<SweepCell>, Error> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected sweep CSV header, got {other:?}"
            )))
        }
    }
    let mut cells = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 16 {
            return Err(Error::Parse(format!(
                "row {}: expected 16 fields, got {}",
                i + 1,
                fields.len()
            )));
        }
        let bad = |col: &str| Error::Parse(format!("row {}: bad {col}", i + 1));
        let req_f64 = |s: &str, col: &str| -> Result<f64, Error> {
            s.parse().map_err(|_| bad(col))
        };
        let opt = |s: &str, col: &str| -> Result<Option<f64>, Error> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(req_f64(s, col)?))
            }
        };
        cells.push(SweepCell {
            p: fields[0].parse().map_err(|_| bad("p"))?,
            d: fields[1].parse().map_err(|_| bad("d"))?,
            samples: fields[2].parse().map_err(|_| bad("samples"))?,
            seed: fields[3].parse().map_err(|_| bad("seed"))?,
            success_rate: opt(fields[4], "success_rate")?,
            mean_eta: opt(fields[5], "mean_eta")?,
            max_eta: opt(fields[6], "max_eta")?,
            collision_rate: opt(fields[7], "collision_rate")?,
            lp_zero_rate: opt(fields[8], "lp_zero_rate")?,
            k_d: fields[9].parse().map_err(|_| bad("K_d"))?,
            m_d: fields[10].parse().map_err(|_| bad("M_d"))?,
            md_over_n: req_f64(fields[11], "Md_over_N")?,
            log_nonuniq_bound: req_f64(fields[12], "log_nonuniq_bound")?,
            log_uniq_fail_bound: req_f64(fields[13], "log_uniq_fail_bound")?,
            d_lower: req_f64(fields[14], "d_lower")?,
            d_upper: req_f64(fields[15], "d_upper")?,
        });
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::spectrum;

    #[test]
    fn sampled_functions_depend_on_the_stream_key() {
        let a = sample_function(10, substream_key(1, 0)).unwrap();
        let b = sample_function(10, substream_key(1, 1)).unwrap();
        assert_ne!(a, b);
        let again = sample_function(10, substream_key(1, 0)).unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn no_duplicates_among_a_thousand_draws() {
        let mut seen = std::collections::HashSet::new();
        for index in 0..1000u64 {
            let f = sample_function(10, substream_key(77, index)).unwrap();
            assert!(seen.insert(f.words().to_vec()), "duplicate at {index}");
        }
    }

    #[test]
    fn mean_coefficient_is_centered() {
        // CLT sanity: mean of S_0 over 10^4 draws at p=10 should sit
        // within 4 * sqrt(N * 10^4) / 10^4 of zero.
        let samples = 10_000u64;
        let mut sum = 0i64;
        for index in 0..samples {
            let f = sample_function(10, substream_key(5, index)).unwrap();
            sum += spectrum(&f).coeff(0);
        }
        let mean = sum as f64 / samples as f64;
        let tolerance = 4.0 * ((1024.0 * samples as f64).sqrt()) / samples as f64;
        assert!(mean.abs() < tolerance, "mean {mean}, tolerance {tolerance}");
    }

    #[test]
    fn sweep_cells_follow_canonical_order() {
        let config = SweepConfig::new(vec![3, 2], None, 4, 9);
        let cells = run_sweep(&config).unwrap();
        let order: Vec<(u32, u32)> = cells.iter().map(|c| (c.p, c.d)).collect();
        assert_eq!(
            order,
            vec![(3, 0), (3, 1), (3, 2), (3, 3), (2, 0), (2, 1), (2, 2)]
        );
    }

    #[test]
    fn full_degree_cell_always_succeeds() {
        for p in [2u32, 5, 8] {
            let config = SweepConfig::new(vec![p], Some(vec![p]), 50, 123);
            let cells = run_sweep(&config).unwrap();
            assert_eq!(cells[0].success_rate, Some(1.0), "p = {p}");
            assert_eq!(cells[0].max_eta, Some(0.0));
            assert_eq!(cells[0].log_uniq_fail_bound, f64::NEG_INFINITY);
        }
    }

    #[test]
    fn rates_stay_in_range_and_theory_columns_match() {
        let mut config = SweepConfig::new(vec![4], None, 30, 42);
        config.run_exact_enum = true;
        config.run_lp = true;
        let cells = run_sweep(&config).unwrap();
        assert_eq!(cells.len(), 5);
        for cell in &cells {
            for rate in [cell.success_rate, cell.collision_rate, cell.lp_zero_rate] {
                let r = rate.expect("all analyses enabled");
                assert!((0.0..=1.0).contains(&r));
            }
            let bounds = probability_bounds(cell.p, cell.d, config.eta, config.omega).unwrap();
            assert_eq!(cell.k_d, bounds.k_d);
            assert_eq!(cell.m_d, bounds.m_d);
            assert_eq!(cell.md_over_n, bounds.md_over_n);
            assert_eq!(cell.log_nonuniq_bound, bounds.log_nonuniqueness_bound);
            assert_eq!(cell.log_uniq_fail_bound, bounds.log_uniqueness_failure_bound);
            assert_eq!(cell.d_lower, bounds.lower_threshold);
            assert_eq!(cell.d_upper, bounds.upper_threshold);
        }
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let mut config = SweepConfig::new(vec![3], Some(vec![0, 3]), 16, 7);
        config.run_lp = true;
        let cells = run_sweep(&config).unwrap();
        let text = emit_csv(&cells);
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(emit_csv(&parsed), text);
        // -inf literal appears for the d = p cell.
        assert!(text.lines().nth(2).unwrap().contains("-inf"));
    }

    #[test]
    fn empty_cell_list_yields_header_only() {
        assert_eq!(emit_csv(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(parse_csv(&format!("{CSV_HEADER}\n")).unwrap(), vec![]);
    }

    #[test]
    fn config_validation_enforces_caps() {
        let mut config = SweepConfig::new(vec![5], None, 10, 1);
        config.run_exact_enum = true;
        assert!(matches!(
            run_sweep(&config),
            Err(Error::SizeCap { max: 4, .. })
        ));
        let mut config = SweepConfig::new(vec![9], None, 10, 1);
        config.run_lp = true;
        assert!(matches!(
            run_sweep(&config),
            Err(Error::SizeCap { max: 8, .. })
        ));
        let config = SweepConfig::new(vec![3], Some(vec![4]), 10, 1);
        assert!(run_sweep(&config).is_err());
        let config = SweepConfig::new(vec![3], None, 0, 1);
        assert!(run_sweep(&config).is_err());
        let config = SweepConfig::new(vec![], None, 10, 1);
        assert!(run_sweep(&config).is_err());
    }

    #[test]
    fn key_value_config_parses_and_validates() {
        let text = "\
# sweep over two dimensions
p_list = 3, 4
d_list = 0,1
samples = 25
seed = 99
eta = 0.5
run_lp = true
";
        let config = SweepConfig::parse_key_value(text).unwrap();
        assert_eq!(config.p_list, vec![3, 4]);
        assert_eq!(config.d_list, Some(vec![0, 1]));
        assert_eq!(config.samples, 25);
        assert_eq!(config.seed, 99);
        assert_eq!(config.eta, 0.5);
        assert!(config.run_lp && config.run_certificate);

        let all = SweepConfig::parse_key_value("p_list=2\nd_list=all\nsamples=5\nseed=0\n").unwrap();
        assert_eq!(all.d_list, None);

        for bad in [
            "samples=5\nseed=0\n",
            "p_list=2\nseed=0\n",
            "p_list=2\nsamples=5\n",
            "p_list=2\nsamples=5\nseed=0\nwhat=1\n",
            "p_list=2\nsamples=5\nseed=0\neta=2.0\n",
            "p_list=x\nsamples=5\nseed=0\n",
            "just a line\n",
        ] {
            assert!(SweepConfig::parse_key_value(bad).is_err(), "accepted {bad:?}");
        }
    }
}
