//! Boolean collisions: a g != f sharing all of f's degree-<=d coefficients.
//!
//! Collisions are parameterized by the flip set T = {x : g(x) != f(x)};
//! then g - f = -2 f 1_T, so g collides with f exactly when
//! sum_{x in T} f(x) w_J(x) = 0 for every mask of degree <= d. That system
//! is homogeneous, all arithmetic here is exact integers, and T and its
//! role survive every search mode: exhaustive subset scan at p <= 4,
//! birthday sampling over the whole function space, and simulated
//! annealing on the constraint energy.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::determinacy::binomial_cumulative;
use crate::error::Error;
use crate::experiments::rng::{substream_key, Xoshiro256StarStar};
use crate::experiments::sample_function;
use crate::function::BooleanFunction;
use crate::transform::{character, low_degree_masks, low_frequency_data, spectrum, wht_in_place};
use crate::Coeff;

/// Hard limit on samples * K_d for a census key table (about 0.5 GiB).
pub const CENSUS_CELL_BUDGET: u128 = 1 << 26;

/// A verified flip set: flipping f on these points preserves all
/// coefficients of degree <= d. Masks are sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionWitness {
    pub p: u32,
    pub d: u32,
    flip_set: Vec<u32>,
}

impl CollisionWitness {
    fn new(p: u32, d: u32, mut flip_set: Vec<u32>) -> Self {
        flip_set.sort_unstable();
        debug_assert!(!flip_set.is_empty());
        debug_assert!(flip_set.windows(2).all(|w| w[0] < w[1]));
        CollisionWitness { p, d, flip_set }
    }

    pub fn flip_set(&self) -> &[u32] {
        &self.flip_set
    }

    /// The colliding partner g = f flipped on T.
    pub fn apply(&self, f: &BooleanFunction) -> BooleanFunction {
        f.flipped(&self.flip_set)
    }

    /// Serialization format: the sorted masks in decimal, space-separated.
    pub fn mask_list(&self) -> String {
        let strings: Vec<String> = self.flip_set.iter().map(|m| m.to_string()).collect();
        strings.join(" ")
    }
}

/// Exact check of the flip-set constraint system.
///
/// True iff `flips` is a nonempty set of in-range, distinct masks with
/// sum_{x in T} f(x) w_J(x) = 0 for every |J| <= d. Duplicate masks do not
/// describe a set and yield false.
pub fn verify_witness(f: &BooleanFunction, d: u32, flips: &[u32]) -> bool {
    let n = f.point_count();
    if flips.is_empty() || d > f.dimension() {
        return false;
    }
    let mut masked = vec![0 as Coeff; n];
    for &m in flips {
        if m as usize >= n || masked[m as usize] != 0 {
            return false;
        }
        masked[m as usize] = f.sign(m);
    }
    // One transform evaluates every constraint sum at once.
    wht_in_place(&mut masked).expect("n is a power of two");
    masked
        .iter()
        .enumerate()
        .all(|(j, &c)| (j as u32).count_ones() > d || c == 0)
}

/// Result of the exhaustive search: either a minimal witness or a
/// proof-by-enumeration that none exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSearch {
    pub witness: Option<CollisionWitness>,
    /// Always true at p <= 4: the scan covered every nonempty subset.
    pub exhaustive: bool,
}

/// Scans all 2^N - 1 flip sets, smallest first.
///
/// Returns the witness with minimal |T|, breaking ties by the
/// lexicographically smallest sorted mask list. Capped at p <= 4.
pub fn collide_exact(f: &BooleanFunction, d: u32) -> Result<ExactSearch, Error> {
    let p = f.dimension();
    if p > 4 {
        return Err(Error::SizeCap {
            operation: "collide_exact",
            dimension: p,
            max: 4,
        });
    }
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    let n = f.point_count();
    // Row bitmask per constraint: bit m set iff f(x_m) w_J(x_m) = -1.
    // Then sum_{x in T} f w_J = |T| - 2 popcount(T & row).
    let rows: Vec<u32> = low_degree_masks(p, d)
        .into_iter()
        .map(|j| {
            let mut row = 0u32;
            for m in 0..n as u32 {
                if f.sign(m) * character(m, j) == -1 {
                    row |= 1 << m;
                }
            }
            row
        })
        .collect();
    for size in 1..=n as u32 {
        // Combinations of fixed size in lexicographic order of the sorted
        // mask list, so the first hit is the canonical minimal witness.
        let mut indices: Vec<u32> = (0..size).collect();
        loop {
            let subset = indices.iter().fold(0u32, |acc, &m| acc | 1 << m);
            if rows
                .iter()
                .all(|&row| 2 * (subset & row).count_ones() == size)
            {
                return Ok(ExactSearch {
                    witness: Some(CollisionWitness::new(p, d, indices)),
                    exhaustive: true,
                });
            }
            if !next_combination(&mut indices, n as u32) {
                break;
            }
        }
    }
    Ok(ExactSearch {
        witness: None,
        exhaustive: true,
    })
}

/// Advances `indices` to the next size-k combination of 0..n in
/// lexicographic order; false when exhausted.
fn next_combination(indices: &mut [u32], n: u32) -> bool {
    let k = indices.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if indices[i] + 1 <= n - (k - i) as u32 {
            indices[i] += 1;
            for j in i + 1..k {
                indices[j] = indices[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Birthday-style sampling census of the degree-<=d fingerprint map.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub p: u32,
    pub d: u32,
    pub samples: u64,
    pub seed: u64,
    /// Distinct exact coefficient tuples among the samples.
    pub distinct_keys: u64,
    /// Verified colliding sample-index pairs, sorted ascending.
    pub collision_pairs: Vec<(u64, u64)>,
    /// K_d * log(N + 1), the log of the fingerprint image-size cap.
    pub log_image_bound: f64,
}

impl CensusReport {
    pub const CSV_HEADER: &'static str =
        "p,d,samples,seed,distinct_keys,collision_pairs,log_image_bound";

    /// One summary row under [`Self::CSV_HEADER`]; the pair list itself is
    /// a separate artifact (see [`Self::pair_list`]).
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.p,
            self.d,
            self.samples,
            self.seed,
            self.distinct_keys,
            self.collision_pairs.len(),
            self.log_image_bound,
        )
    }

    /// `idx1,idx2` per line, ascending.
    pub fn pair_list(&self) -> String {
        let mut out = String::new();
        for (a, b) in &self.collision_pairs {
            out.push_str(&format!("{a},{b}\n"));
        }
        out
    }
}

/// Samples `samples` functions on substreams of `seed`, keys each by its
/// exact low-frequency tuple, and reports all colliding index pairs.
pub fn collide_census(p: u32, d: u32, samples: u64, seed: u64) -> Result<CensusReport, Error> {
    if p == 0 || p > crate::MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange(p));
    }
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    if samples < 2 {
        return Err(Error::TooFewSamples {
            requested: samples,
            minimum: 2,
        });
    }
    let (k_d, _) = binomial_cumulative(p, d)?;
    let k_d = k_d.to_u64().expect("K_d fits u64 for p <= 24");
    let cells = samples as u128 * k_d as u128;
    if cells > CENSUS_CELL_BUDGET {
        return Err(Error::CensusBudget {
            cells,
            budget: CENSUS_CELL_BUDGET,
        });
    }
    let keys: Vec<Vec<Coeff>> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let f = sample_function(p, substream_key(seed, index)).expect("p validated");
            low_frequency_data(&spectrum(&f), d)
                .expect("d validated")
                .entries()
                .to_vec()
        })
        .collect();
    let mut groups: HashMap<&[Coeff], Vec<u64>> = HashMap::new();
    for (index, key) in keys.iter().enumerate() {
        groups.entry(key).or_default().push(index as u64);
    }
    let mut collision_pairs = Vec::new();
    for indices in groups.values() {
        for (i, &a) in indices.iter().enumerate() {
            for &b in &indices[i + 1..] {
                // Hash grouping found them; the report only carries pairs
                // whose exact tuples compare equal.
                if keys[a as usize] == keys[b as usize] {
                    collision_pairs.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    collision_pairs.sort_unstable();
    let n = (1u64 << p) as f64;
    Ok(CensusReport {
        p,
        d,
        samples,
        seed,
        distinct_keys: groups.len() as u64,
        collision_pairs,
        log_image_bound: k_d as f64 * (n + 1.0).ln(),
    })
}

/// Simulated-annealing schedule; see [`AnnealParams::new`] for defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealParams {
    pub restarts: u32,
    pub max_iters: u64,
    pub init_temp: f64,
    pub cooling: f64,
    pub seed: u64,
}

impl AnnealParams {
    /// Defaults scaled to the dimension: 20 restarts of 50 N iterations,
    /// initial temperature N, geometric cooling 0.995.
    pub fn new(p: u32, seed: u64) -> Self {
        let n = 1u64 << p;
        AnnealParams {
            restarts: 20,
            max_iters: 50 * n,
            init_temp: n as f64,
            cooling: 0.995,
            seed,
        }
    }
}

/// The constraint energy E(T) = sum_{|J| <= d} (sum_{x in T} f(x) w_J(x))^2.
/// Zero with T nonempty is exactly the witness condition. E(Omega) is the
/// low-degree spectral energy of f, since the inner sums become S_J.
pub fn flip_set_energy(f: &BooleanFunction, d: u32, flips: &[u32]) -> Result<i128, Error> {
    if d > f.dimension() {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: f.dimension(),
        });
    }
    let masks = low_degree_masks(f.dimension(), d);
    Ok(masks
        .iter()
        .map(|&j| {
            let c: i64 = flips.iter().map(|&m| f.sign(m) * character(m, j)).sum();
            (c as i128) * (c as i128)
        })
        .sum())
}

/// Minimizes E(T) by single-point membership toggles with a geometric
/// annealing schedule; every move costs O(K_d).
///
/// Restarts run on independent substreams of `params.seed` and always use
/// their full budget, so the returned witness (the one from the smallest
/// successful restart index) does not depend on thread count. Returning
/// None is a normal outcome; every Some is re-verified exactly.
pub fn collide_anneal(
    f: &BooleanFunction,
    d: u32,
    params: &AnnealParams,
) -> Result<Option<CollisionWitness>, Error> {
    let p = f.dimension();
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    let masks = low_degree_masks(p, d);
    let found: Vec<Option<Vec<u32>>> = (0..params.restarts)
        .into_par_iter()
        .map(|restart| {
            anneal_restart(
                f,
                &masks,
                params,
                substream_key(params.seed, restart as u64),
            )
        })
        .collect();
    for flips in found.into_iter().flatten() {
        debug_assert!(verify_witness(f, d, &flips));
        if verify_witness(f, d, &flips) {
            return Ok(Some(CollisionWitness::new(p, d, flips)));
        }
    }
    Ok(None)
}

fn anneal_restart(
    f: &BooleanFunction,
    masks: &[u32],
    params: &AnnealParams,
    key: u64,
) -> Option<Vec<u32>> {
    let n = f.point_count();
    let k = masks.len();
    let mut rng = Xoshiro256StarStar::from_key(key);

    // Selection sampling: exactly N/2 members, one pass, no index buffer.
    let mut member = vec![false; n];
    let mut size = 0usize;
    let mut need = n / 2;
    for (m, slot) in member.iter_mut().enumerate() {
        let remaining = (n - m) as f64;
        if rng.next_f64() * remaining < need as f64 {
            *slot = true;
            size += 1;
            need -= 1;
        }
    }

    // Constraint sums c_J and their energy, maintained incrementally.
    let mut c: Vec<i64> = masks
        .iter()
        .map(|&j| {
            (0..n as u32)
                .filter(|&m| member[m as usize])
                .map(|m| f.sign(m) * character(m, j))
                .sum()
        })
        .collect();
    let mut energy: i128 = c.iter().map(|&v| (v as i128) * (v as i128)).sum();
    let mut temp = params.init_temp;

    if energy == 0 && size > 0 {
        return Some(collect_members(&member));
    }
    for _ in 0..params.max_iters {
        let m = rng.next_below(n as u64) as u32;
        let removing = member[m as usize];
        if removing && size == 1 {
            // The empty set solves the homogeneous system vacuously and
            // would absorb the walk; forbid the final removal instead.
            temp *= params.cooling;
            continue;
        }
        let toggle_sign: i64 = if removing { -1 } else { 1 };
        let dot: i64 = masks
            .iter()
            .zip(c.iter())
            .map(|(&j, &cj)| cj * f.sign(m) * character(m, j))
            .sum();
        // Each c_J moves by +-1, so the quadratic terms contribute K.
        let delta: i128 = k as i128 + 2 * toggle_sign as i128 * dot as i128;
        let accept = delta < 0 || {
            let exponent = (-(delta as f64) / temp).exp();
            rng.next_f64() < exponent
        };
        if accept {
            for (slot, &j) in c.iter_mut().zip(masks.iter()) {
                *slot += toggle_sign * f.sign(m) * character(m, j);
            }
            member[m as usize] = !removing;
            size = if removing { size - 1 } else { size + 1 };
            energy += delta;
            if energy == 0 && size > 0 {
                return Some(collect_members(&member));
            }
        }
        temp *= params.cooling;
    }
    None
}

fn collect_members(member: &[bool]) -> Vec<u32> {
    member
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(i, _)| i as u32)
        .collect()
}
