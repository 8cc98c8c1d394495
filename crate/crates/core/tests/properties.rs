//! Cross-module invariants on randomized inputs.

use lowdeg::collision::{collide_exact, verify_witness};
use lowdeg::determinacy::certify_unique;
use lowdeg::experiments::rng::substream_key;
use lowdeg::experiments::sample_function;
use lowdeg::lp::max_competitor;
use lowdeg::transform::{low_frequency_data, spectrum, truncate};
use lowdeg::{BooleanFunction, Rational};
use num_traits::Zero;
use proptest::prelude::*;
use rayon::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn negation_flips_every_coefficient(bits in any::<u64>(), p in 1u32..=6) {
        let f = BooleanFunction::from_words(p, vec![bits]).unwrap();
        let s = spectrum(&f);
        let neg = spectrum(&f.negated());
        for (a, b) in s.coeffs().iter().zip(neg.coeffs()) {
            prop_assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn witnesses_survive_weaker_degrees(bits in any::<u64>(), d in 1u32..=4) {
        // A flip set meeting every constraint of degree <= d meets every
        // constraint of any smaller degree for free.
        let f = BooleanFunction::from_words(4, vec![bits]).unwrap();
        if let Some(w) = collide_exact(&f, d).unwrap().witness {
            for weaker in 0..d {
                prop_assert!(verify_witness(&f, weaker, w.flip_set()));
            }
        }
    }

    #[test]
    fn flipping_a_witness_preserves_the_low_layer(bits in any::<u64>(), d in 0u32..=4) {
        let f = BooleanFunction::from_words(4, vec![bits]).unwrap();
        if let Some(w) = collide_exact(&f, d).unwrap().witness {
            let g = w.apply(&f);
            prop_assert_ne!(&g, &f);
            prop_assert_eq!(
                low_frequency_data(&spectrum(&f), d).unwrap(),
                low_frequency_data(&spectrum(&g), d).unwrap()
            );
        }
    }

    #[test]
    fn certificate_rules_out_boolean_and_bounded_rivals(bits in any::<u64>(), d in 0u32..=4) {
        let f = BooleanFunction::from_words(4, vec![bits]).unwrap();
        if certify_unique(&f, d).unwrap().holds {
            prop_assert!(collide_exact(&f, d).unwrap().witness.is_none());
            prop_assert!(max_competitor(&f, d).unwrap().optimum.is_zero());
        }
    }

    #[test]
    fn boolean_collisions_are_bounded_competitors(bits in any::<u64>()) {
        // Flipping T moves the function by 2 per point, all moves within
        // the box, so the LP optimum is at least 2|T|.
        let f = BooleanFunction::from_words(4, vec![bits]).unwrap();
        for d in 0..=2u32 {
            if let Some(w) = collide_exact(&f, d).unwrap().witness {
                let out = max_competitor(&f, d).unwrap();
                let moved = Rational::from(num_bigint::BigInt::from(
                    2 * w.flip_set().len() as i64,
                ));
                prop_assert!(out.optimum >= moved);
            }
        }
    }
}

#[test]
fn residual_energy_matches_its_expectation() {
    // Each coefficient of a uniform random function is a sum of N
    // independent signs, so E[S_J^2] = N, and the point-space residual
    // energy sum_m rho_m^2 = N * sum_{|J| > d} S_J^2 has mean N^2 * M_d.
    // The sample mean over 10^4 draws at p = 12, d = 6 must land within
    // 5 empirical standard errors; the tolerance is self-normalizing,
    // not hand-tuned.
    let (p, d, samples) = (12u32, 6u32, 10_000u64);
    let energies: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let f = sample_function(p, substream_key(777, i)).unwrap();
            truncate(&f, d).unwrap().residual_energy() as f64
        })
        .collect();
    let n = samples as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let var = energies.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
    let standard_error = (var / n).sqrt();
    // M_6 at p = 12: 4096 - sum_{k <= 6} C(12, k) = 4096 - 2510.
    let expected = 4096.0 * 4096.0 * (4096.0 - 2510.0);
    assert!(
        (mean - expected).abs() <= 5.0 * standard_error,
        "mean {mean}, expected {expected}, se {standard_error}"
    );
}
