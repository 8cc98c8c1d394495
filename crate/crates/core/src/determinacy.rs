//! The uniqueness certificate and every closed-form quantity around it.
//!
//! `certify_unique` tests a sufficient condition: if the degree-d
//! truncation q_d satisfies max_m |N f(x_m) - N q_d(x_m)| < N, then the
//! sign of q_d recovers f at every point and no bounded function other
//! than f matches f's degree-<=d coefficients. The rest of the module is
//! exact combinatorics (K_d, M_d) and log-space probability bounds that
//! predict when the certificate should hold for random functions.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Float, One, ToPrimitive, Zero};

use crate::error::Error;
use crate::function::BooleanFunction;
use crate::transform::truncate;
use crate::{Coeff, Rational, MAX_DIMENSION};

/// Outcome of the strict residual test at one (f, d).
///
/// `holds` is the verdict; the other fields expose how close the call was.
/// `eta_hat` is max_residual_num / N, the residual sup-norm on the scale
/// where 1.0 is the boundary. A truncation value of exactly zero at some
/// point makes |rho_m| = N there, so ties fail the strict comparison on
/// their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniquenessCertificate {
    pub p: u32,
    pub d: u32,
    pub holds: bool,
    /// max_m |rho_m| where rho_m = N f(x_m) - t_m.
    pub max_residual_num: Coeff,
    /// First point mask attaining the maximum.
    pub argmax_point: u32,
    /// True when every t_m is nonzero and matches f's sign.
    pub sign_agrees: bool,
}

impl UniquenessCertificate {
    /// N = 2^p.
    pub fn denominator(&self) -> Coeff {
        1 << self.p
    }

    /// The residual sup-norm max|rho|/N as a float.
    pub fn eta_hat(&self) -> f64 {
        self.max_residual_num as f64 / self.denominator() as f64
    }

    /// The same ratio left unreduced, e.g. "8/8" for a full-size residual.
    pub fn eta_hat_fraction(&self) -> String {
        format!("{}/{}", self.max_residual_num, self.denominator())
    }
}

impl fmt::Display for UniquenessCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds {
            "UNIQUE-CERTIFIED"
        } else {
            "NOT UNIQUE-CERTIFIED"
        };
        write!(f, "{verdict}, max residual {}", self.eta_hat_fraction())
    }
}

/// Runs the residual test for f at degree d.
pub fn certify_unique(f: &BooleanFunction, d: u32) -> Result<UniquenessCertificate, Error> {
    let p = f.dimension();
    let n = 1 << p;
    let t = truncate(f, d)?;
    let (max_residual_num, argmax_point) = t.max_abs_residual();
    let sign_agrees = t
        .trunc_numerators()
        .iter()
        .enumerate()
        .all(|(m, &tm)| tm != 0 && (tm > 0) == (f.sign(m as u32) > 0));
    Ok(UniquenessCertificate {
        p,
        d,
        holds: max_residual_num < n,
        max_residual_num,
        argmax_point,
        sign_agrees,
    })
}

/// K_d = sum_{k <= d} C(p, k) and M_d = 2^p - K_d, exactly.
///
/// No dimension cap here: the arithmetic is big-integer and callers such
/// as the binomial-tail oracle want p beyond 24.
pub fn binomial_cumulative(p: u32, d: u32) -> Result<(BigUint, BigUint), Error> {
    if p == 0 {
        return Err(Error::DimensionOutOfRange(p));
    }
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    let mut k_d = BigUint::one();
    let mut row = BigUint::one();
    for k in 1..=d {
        // C(p, k) = C(p, k-1) * (p - k + 1) / k stays integral at each step.
        row = row * BigUint::from(p - k + 1) / BigUint::from(k);
        k_d += &row;
    }
    let total = BigUint::one() << p;
    let m_d = &total - &k_d;
    Ok((k_d, m_d))
}

/// Exact P(X <= k) for X ~ Bin(p, 1/2), as a rational.
///
/// Computed by its own running sum rather than through
/// [`binomial_cumulative`], so the two can serve as independent checks.
pub fn binomial_left_tail(p: u32, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let k = (k as u32).min(p);
    let mut acc = BigUint::one();
    let mut term = BigUint::one();
    for i in 1..=k {
        term = term * BigUint::from(p - i + 1) / BigUint::from(i);
        acc += &term;
    }
    Rational::new(BigInt::from(acc), BigInt::from(BigUint::one() << p))
}

/// The Chernoff-style tail exp(-2 t^2 / p), an upper bound on
/// P(X <= p/2 - t) for X ~ Bin(p, 1/2).
pub fn hoeffding_tail<F: Float>(p: u32, t: F) -> Result<F, Error> {
    if p == 0 {
        return Err(Error::DimensionOutOfRange(p));
    }
    if !(t > F::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: "must be positive and finite",
        });
    }
    let p = F::from(p).expect("u32 fits every float");
    let two = F::from(2).expect("small constant");
    Ok((-(two * t * t) / p).exp())
}

/// Tail bound 2 exp(-eta^2 / (2 ||a||^2)) for a Rademacher linear form
/// sum_i eps_i a_i with squared norm `sq_norm`.
pub fn rademacher_tail<F: Float>(sq_norm: F, eta: F) -> Result<F, Error> {
    if !(sq_norm > F::zero()) || !sq_norm.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sq_norm",
            reason: "must be positive and finite",
        });
    }
    if !(eta > F::zero()) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: "must be positive",
        });
    }
    let two = F::from(2).expect("small constant");
    Ok(two * (-(eta * eta) / (two * sq_norm)).exp())
}

/// d below which random functions stop being determined: p/2 minus a
/// sqrt(p log p)-sized window. Unchecked formula; see [`thresholds`].
pub(crate) fn lower_threshold(p: u32, omega: f64) -> f64 {
    let half = p as f64 / 2.0;
    half - (half * ((p as f64).ln() + omega)).sqrt()
}

/// d above which the certificate succeeds with probability 1 - 2^-p.
pub(crate) fn upper_threshold(p: u32, eta: f64) -> f64 {
    let half = p as f64 / 2.0;
    half + (half * (6.0 * p as f64 / (eta * eta)).ln()).sqrt()
}

/// Both critical-degree formulas. The lower one takes the slack parameter
/// `omega` (the asymptotic statement leaves it unspecified; 1.0 is the
/// conventional default upstream), the upper one the residual level `eta`.
pub fn thresholds(p: u32, omega: f64, eta: f64) -> Result<(f64, f64), Error> {
    if p == 0 {
        return Err(Error::DimensionOutOfRange(p));
    }
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: "must be finite and >= 0",
        });
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: "must lie in the open interval (0, 1)",
        });
    }
    Ok((lower_threshold(p, omega), upper_threshold(p, eta)))
}

/// Closed-form predictions for one (p, d) cell, all probabilities kept in
/// natural-log space: the raw quantities overflow for every interesting p.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub p: u32,
    pub d: u32,
    pub eta: f64,
    pub omega: f64,
    pub k_d: BigUint,
    pub m_d: BigUint,
    /// Residual variance M_d / N of the degree-d tail of a random function.
    pub md_over_n: f64,
    /// log of (N+1)^{K_d} / 2^N, bounding P(some Boolean collision exists).
    pub log_nonuniqueness_bound: f64,
    /// log of 2N exp(-eta^2 N / (2 M_d)), bounding P(max|rho| >= eta N).
    /// Negative infinity when M_d = 0: the residual is identically zero.
    pub log_uniqueness_failure_bound: f64,
    /// True when the corresponding log bound is >= 0 (bound says nothing).
    pub nonuniqueness_vacuous: bool,
    pub uniqueness_failure_vacuous: bool,
    pub lower_threshold: f64,
    pub upper_threshold: f64,
}

impl BoundsReport {
    /// Flat `key=value` lines, one field per line.
    pub fn to_text_record(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p={}\n", self.p));
        out.push_str(&format!("d={}\n", self.d));
        out.push_str(&format!("eta={}\n", self.eta));
        out.push_str(&format!("omega={}\n", self.omega));
        out.push_str(&format!("K_d={}\n", self.k_d));
        out.push_str(&format!("M_d={}\n", self.m_d));
        out.push_str(&format!("Md_over_N={}\n", self.md_over_n));
        out.push_str(&format!(
            "log_nonuniq_bound={}\n",
            self.log_nonuniqueness_bound
        ));
        out.push_str(&format!(
            "log_uniq_fail_bound={}\n",
            self.log_uniqueness_failure_bound
        ));
        out.push_str(&format!(
            "nonuniqueness_vacuous={}\n",
            self.nonuniqueness_vacuous
        ));
        out.push_str(&format!(
            "uniqueness_failure_vacuous={}\n",
            self.uniqueness_failure_vacuous
        ));
        out.push_str(&format!("d_lower={}\n", self.lower_threshold));
        out.push_str(&format!("d_upper={}\n", self.upper_threshold));
        out
    }
}

/// Evaluates both log bounds and both thresholds for one cell.
///
/// `eta` may be 1.0 here (the certificate's own level), unlike in
/// [`thresholds`] where the upper formula is only meaningful for
/// eta < 1; the report evaluates the formulas verbatim either way.
pub fn probability_bounds(p: u32, d: u32, eta: f64, omega: f64) -> Result<BoundsReport, Error> {
    if p == 0 || p > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange(p));
    }
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            reason: "must lie in (0, 1]",
        });
    }
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParameter {
            name: "omega",
            reason: "must be finite and >= 0",
        });
    }
    let (k_d, m_d) = binomial_cumulative(p, d)?;
    // Exact conversions: for p <= 24 both counts are below 2^24 << 2^53.
    let k_f = k_d.to_f64().expect("K_d fits f64");
    let m_f = m_d.to_f64().expect("M_d fits f64");
    let n = (1u64 << p) as f64;
    let log_nonuniqueness_bound = k_f * (n + 1.0).ln() - n * 2.0f64.ln();
    let log_uniqueness_failure_bound = if m_d.is_zero() {
        f64::NEG_INFINITY
    } else {
        (2.0 * n).ln() - eta * eta * n / (2.0 * m_f)
    };
    Ok(BoundsReport {
        p,
        d,
        eta,
        omega,
        md_over_n: m_f / n,
        log_nonuniqueness_bound,
        log_uniqueness_failure_bound,
        nonuniqueness_vacuous: log_nonuniqueness_bound >= 0.0,
        uniqueness_failure_vacuous: log_uniqueness_failure_bound >= 0.0,
        lower_threshold: lower_threshold(p, omega),
        upper_threshold: upper_threshold(p, eta),
        k_d,
        m_d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::spectrum;
    use num_traits::ToPrimitive;

    #[test]
    fn constant_function_certifies_at_degree_zero() {
        let f = BooleanFunction::constant(4, false).unwrap();
        let cert = certify_unique(&f, 0).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.max_residual_num, 0);
        assert!(cert.sign_agrees);
        assert_eq!(cert.eta_hat(), 0.0);
    }

    #[test]
    fn parity_fails_below_full_degree_with_residual_exactly_n() {
        for p in 1..=6u32 {
            let f = BooleanFunction::parity(p).unwrap();
            for d in 0..p {
                let cert = certify_unique(&f, d).unwrap();
                assert!(!cert.holds, "p = {p}, d = {d}");
                assert_eq!(cert.max_residual_num, 1 << p);
                assert_eq!(cert.eta_hat(), 1.0);
                assert!(!cert.sign_agrees);
            }
            let full = certify_unique(&f, p).unwrap();
            assert!(full.holds);
            assert_eq!(full.max_residual_num, 0);
        }
    }

    #[test]
    fn display_matches_cli_wording() {
        let f = BooleanFunction::parity(3).unwrap();
        let cert = certify_unique(&f, 2).unwrap();
        assert_eq!(cert.to_string(), "NOT UNIQUE-CERTIFIED, max residual 8/8");
        let g = BooleanFunction::constant(3, true).unwrap();
        let cert = certify_unique(&g, 0).unwrap();
        assert_eq!(cert.to_string(), "UNIQUE-CERTIFIED, max residual 0/8");
    }

    #[test]
    fn holds_implies_sign_agreement() {
        // Scan all 256 functions at p = 3 across every degree.
        for bits in 0..256u64 {
            let f = BooleanFunction::from_words(3, vec![bits]).unwrap();
            for d in 0..=3u32 {
                let cert = certify_unique(&f, d).unwrap();
                assert_eq!(cert.holds, cert.max_residual_num < 8);
                if cert.holds {
                    assert!(cert.sign_agrees, "bits {bits:#x}, d = {d}");
                }
            }
        }
    }

    #[test]
    fn certificate_rejects_degree_out_of_range() {
        let f = BooleanFunction::constant(3, false).unwrap();
        assert_eq!(
            certify_unique(&f, 4),
            Err(Error::DegreeOutOfRange {
                degree: 4,
                dimension: 3
            })
        );
    }

    #[test]
    fn cumulative_binomials_match_known_values() {
        let (k, m) = binomial_cumulative(4, 1).unwrap();
        assert_eq!((k.to_u64(), m.to_u64()), (Some(5), Some(11)));
        let (k, m) = binomial_cumulative(16, 8).unwrap();
        assert_eq!((k.to_u64(), m.to_u64()), (Some(39203), Some(26333)));
        let (k, m) = binomial_cumulative(10, 10).unwrap();
        assert_eq!((k.to_u64(), m.to_u64()), (Some(1024), Some(0)));
    }

    #[test]
    fn cumulative_binomials_sum_and_order() {
        for p in 1..=20u32 {
            let total = BigUint::one() << p;
            let mut prev_k = BigUint::zero();
            for d in 0..=p {
                let (k, m) = binomial_cumulative(p, d).unwrap();
                assert_eq!(&k + &m, total, "p = {p}, d = {d}");
                assert!(k > prev_k || d == 0, "K_d must increase");
                prev_k = k;
            }
        }
        assert!(binomial_cumulative(4, 5).is_err());
        assert!(binomial_cumulative(0, 0).is_err());
    }

    #[test]
    fn left_tail_agrees_with_cumulative_count() {
        // Two independent summations of the same binomial mass.
        for p in 1..=16u32 {
            for d in 0..=p {
                let (k, _) = binomial_cumulative(p, d).unwrap();
                let tail = binomial_left_tail(p, d as i64);
                let expect = Rational::new(
                    BigInt::from(k),
                    BigInt::from(BigUint::one() << p),
                );
                assert_eq!(tail, expect, "p = {p}, d = {d}");
            }
        }
        assert_eq!(binomial_left_tail(7, -1), Rational::zero());
        assert_eq!(binomial_left_tail(7, 99), Rational::one());
    }

    #[test]
    fn hoeffding_examples() {
        let v: f64 = hoeffding_tail(100, 5.0).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.6065306597126334).abs() < 1e-12);
        // t = sqrt(p/2 * ln p) collapses the bound to exactly 1/p.
        for p in [2u32, 10, 100, 1000] {
            let t = (p as f64 / 2.0 * (p as f64).ln()).sqrt();
            let v: f64 = hoeffding_tail(p, t).unwrap();
            assert!((v - 1.0 / p as f64).abs() < 1e-12 / p as f64, "p = {p}");
        }
        assert!(hoeffding_tail::<f64>(100, 0.0).is_err());
        assert!(hoeffding_tail::<f64>(100, -1.0).is_err());
        assert!(hoeffding_tail::<f64>(0, 1.0).is_err());
    }

    #[test]
    fn hoeffding_dominates_exact_tail_small_p() {
        // The full p <= 30 sweep lives in the acceptance suite; this is the
        // same comparison kept small enough for a unit test.
        for p in 1..=12u32 {
            for t in 1..=(p as i64 / 2 + 2) {
                let bound: f64 = hoeffding_tail(p, t as f64).unwrap();
                let k = (p as f64 / 2.0 - t as f64).floor() as i64;
                let exact = binomial_left_tail(p, k).to_f64().unwrap();
                assert!(
                    bound >= exact,
                    "p = {p}, t = {t}: bound {bound} < exact {exact}"
                );
            }
        }
    }

    #[test]
    fn rademacher_examples_and_enumeration() {
        // eta -> infinity drives the bound to 0.
        let far: f64 = rademacher_tail(1.0, 1e9).unwrap();
        assert_eq!(far, 0.0);
        // Substituting ||a||^2 = M_d/N reproduces the per-point bound shape.
        let md_over_n = 697.0 / 65536.0;
        let v: f64 = rademacher_tail(md_over_n, 1.0).unwrap();
        assert!((v - 2.0 * (-65536.0 / (2.0 * 697.0)).exp()).abs() < 1e-18);
        // Exhaustive oracle: ten equal weights, every sign pattern.
        let weights = [1.0f64; 10];
        let sq_norm: f64 = weights.iter().map(|a| a * a).sum();
        for eta in [0.5f64, 1.0, 2.0, 3.0, 5.0] {
            let mut hits = 0u32;
            for mask in 0..1u32 << 10 {
                let sum: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(i, a)| if mask >> i & 1 == 1 { -a } else { *a })
                    .sum();
                if sum.abs() >= eta {
                    hits += 1;
                }
            }
            let exact = hits as f64 / 1024.0;
            let bound = rademacher_tail(sq_norm, eta).unwrap();
            assert!(bound >= exact, "eta = {eta}: {bound} < {exact}");
        }
        assert!(rademacher_tail(0.0, 1.0).is_err());
        assert!(rademacher_tail(1.0, 0.0).is_err());
    }

    #[test]
    fn threshold_examples() {
        let (_, upper) = thresholds(100, 1.0, 0.5).unwrap();
        assert!((upper - 69.72).abs() < 1e-2, "got {upper}");
        assert!((upper - (50.0 + (50.0 * 2400.0f64.ln()).sqrt())).abs() < 1e-12);
        let (_, upper) = thresholds(16, 1.0, 0.9).unwrap();
        assert!((upper - 14.18).abs() < 1e-2, "got {upper}");
        for p in [1u32, 2, 7, 16, 100] {
            let (lo, hi) = thresholds(p, 0.7, 0.3).unwrap();
            assert!(lo <= p as f64 / 2.0 && p as f64 / 2.0 <= hi, "p = {p}");
        }
        assert!(thresholds(0, 1.0, 0.5).is_err());
        assert!(thresholds(10, -0.1, 0.5).is_err());
        assert!(thresholds(10, 1.0, 0.0).is_err());
        assert!(thresholds(10, 1.0, 1.0).is_err());
    }

    #[test]
    fn bounds_report_worked_example() {
        let report = probability_bounds(16, 12, 1.0, 1.0).unwrap();
        assert_eq!(report.m_d.to_u64(), Some(697));
        assert_eq!(report.k_d.to_u64(), Some(64839));
        assert!((report.log_uniqueness_failure_bound - -35.2294104125468).abs() < 1e-9);
        assert!(!report.uniqueness_failure_vacuous);
        assert!((report.md_over_n - 697.0 / 65536.0).abs() < 1e-18);
    }

    #[test]
    fn bounds_report_edge_cases() {
        // Full degree: the residual vanishes identically.
        let report = probability_bounds(16, 16, 1.0, 1.0).unwrap();
        assert_eq!(report.log_uniqueness_failure_bound, f64::NEG_INFINITY);
        assert!(!report.uniqueness_failure_vacuous);
        assert_eq!(report.md_over_n, 0.0);
        // Small case with a hand-computable non-uniqueness bound.
        let report = probability_bounds(4, 0, 1.0, 1.0).unwrap();
        let expect = 17.0f64.ln() - 16.0 * 2.0f64.ln();
        assert!((report.log_nonuniqueness_bound - expect).abs() < 1e-12);
        assert!(!report.nonuniqueness_vacuous);
        // High d makes the non-uniqueness bound vacuous.
        let report = probability_bounds(4, 4, 1.0, 1.0).unwrap();
        assert!(report.nonuniqueness_vacuous);
        // No overflow anywhere across the full supported range.
        for p in 1..=24u32 {
            for d in 0..=p {
                let r = probability_bounds(p, d, 1.0, 1.0).unwrap();
                assert!(r.log_nonuniqueness_bound.is_finite());
                assert!(
                    r.log_uniqueness_failure_bound.is_finite()
                        || r.log_uniqueness_failure_bound == f64::NEG_INFINITY
                );
            }
        }
        assert!(probability_bounds(25, 0, 1.0, 1.0).is_err());
        assert!(probability_bounds(16, 17, 1.0, 1.0).is_err());
        assert!(probability_bounds(16, 8, 1.5, 1.0).is_err());
        assert!(probability_bounds(16, 8, 1.0, -1.0).is_err());
    }

    #[test]
    fn text_record_lists_every_field() {
        let report = probability_bounds(16, 12, 1.0, 1.0).unwrap();
        let text = report.to_text_record();
        for key in [
            "p=16",
            "d=12",
            "K_d=64839",
            "M_d=697",
            "log_nonuniq_bound=",
            "log_uniq_fail_bound=",
            "d_lower=",
            "d_upper=",
        ] {
            assert!(text.contains(key), "missing {key} in {text}");
        }
    }

    #[test]
    fn residual_energy_identity_spot_check() {
        // Sigma rho^2 = N * high-degree energy ties the certificate's
        // numerators to the spectrum it came from.
        let f = BooleanFunction::from_words(5, vec![0xDEAD_BEEF]).unwrap();
        let s = spectrum(&f);
        for d in 0..=5u32 {
            let t = truncate(&f, d).unwrap();
            let high = s.total_energy() - s.low_energy(d);
            assert_eq!(t.residual_energy(), 32 * high, "d = {d}");
        }
    }
}
