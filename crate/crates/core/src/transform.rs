//! Unnormalized Walsh-Hadamard transform and spectral containers.
//!
//! The transform of a table v is S_J = sum_m v_m * w_J(x_m) with character
//! w_J(x_m) = (-1)^popcount(m & J). It is its own inverse up to the factor
//! N = 2^p, and everything here stays in exact integers: coefficients of a
//! +-1 table lie in [-N, N] and share N's parity.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::Error;
use crate::function::BooleanFunction;
use crate::{Coeff, MAX_DIMENSION};

/// Butterfly stages switch to rayon above this length.
const PARALLEL_LEN: usize = 1 << 17;

/// Degree of a frequency mask: the number of coordinates it involves.
#[inline]
pub fn mask_degree(mask: u32) -> u32 {
    mask.count_ones()
}

/// The character value w_J(x_m) = (-1)^popcount(m & J), as +-1.
#[inline]
pub fn character(m: u32, j: u32) -> Coeff {
    1 - 2 * ((m & j).count_ones() & 1) as Coeff
}

/// In-place Walsh-Hadamard butterfly over any additive scalar.
///
/// Length must be a power of two (1 is allowed and a no-op). No overflow
/// guard is applied here; the checked entry point for exact integer work
/// is [`wht`].
pub fn wht_in_place<T>(values: &mut [T]) -> Result<(), Error>
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    if !values.len().is_power_of_two() {
        return Err(Error::LengthNotPowerOfTwo(values.len()));
    }
    butterfly(values);
    Ok(())
}

/// The stages of the transform commute, so recursing top-down (largest
/// stride first) computes the same result as the textbook bottom-up loop.
fn butterfly<T>(values: &mut [T])
where
    T: Copy + Send + Sync + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let n = values.len();
    if n < 2 {
        return;
    }
    if n <= PARALLEL_LEN {
        let mut half = 1;
        while half < n {
            for block in values.chunks_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (s, d) = (*a + *b, *a - *b);
                    *a = s;
                    *b = d;
                }
            }
            half *= 2;
        }
        return;
    }
    let (lo, hi) = values.split_at_mut(n / 2);
    lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, b)| {
        let (s, d) = (*a + *b, *a - *b);
        *a = s;
        *b = d;
    });
    rayon::join(|| butterfly(lo), || butterfly(hi));
}

/// Exact integer transform with the overflow guard |entry| <= 2^32.
///
/// The guard keeps every intermediate inside i64 for lengths up to 2^24:
/// each of the p stages at most doubles the largest absolute value.
pub fn wht(values: &[Coeff]) -> Result<Vec<Coeff>, Error> {
    if !values.len().is_power_of_two() {
        return Err(Error::LengthNotPowerOfTwo(values.len()));
    }
    if values.len() > (1 << MAX_DIMENSION) {
        return Err(Error::SizeCap {
            operation: "wht",
            dimension: values.len().trailing_zeros(),
            max: MAX_DIMENSION,
        });
    }
    const GUARD: Coeff = 1 << 32;
    for (index, &v) in values.iter().enumerate() {
        if v.abs() > GUARD {
            return Err(Error::EntryTooLarge { index });
        }
    }
    let mut out = values.to_vec();
    butterfly(&mut out);
    Ok(out)
}

/// Full spectrum of a Boolean function: S_J indexed by frequency mask J.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum {
    p: u32,
    coeffs: Vec<Coeff>,
}

impl Spectrum {
    pub fn dimension(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn coeff(&self, mask: u32) -> Coeff {
        self.coeffs[mask as usize]
    }

    /// All 2^p coefficients in mask order.
    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    /// sum_J S_J^2, wide enough for p = 24 where it reaches 2^48 * 2^24.
    pub fn total_energy(&self) -> i128 {
        self.coeffs.iter().map(|&s| (s as i128) * (s as i128)).sum()
    }

    /// sum over |J| <= d of S_J^2.
    pub fn low_energy(&self, d: u32) -> i128 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| mask_degree(*j as u32) <= d)
            .map(|(_, &s)| (s as i128) * (s as i128))
            .sum()
    }

    /// Serializes as CSV with header `mask,degree,coeff`, one row per mask.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask,degree,coeff\n");
        for (j, &s) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", j, mask_degree(j as u32), s));
        }
        out
    }

    /// Parses the output of [`to_csv`]; the transform round-trips through it.
    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines();
        match lines.next() {
            Some("mask,degree,coeff") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected spectrum header 'mask,degree,coeff', got {other:?}"
                )))
            }
        }
        let mut coeffs = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut fields = line.split(',');
            let (mask, degree, coeff) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(m), Some(k), Some(c), None) => (m, k, c),
                _ => return Err(Error::Parse(format!("row {i}: expected 3 fields"))),
            };
            let mask: u32 = mask
                .parse()
                .map_err(|_| Error::Parse(format!("row {i}: bad mask {mask:?}")))?;
            if mask as usize != i {
                return Err(Error::Parse(format!("row {i}: mask {mask} out of order")));
            }
            let degree: u32 = degree
                .parse()
                .map_err(|_| Error::Parse(format!("row {i}: bad degree {degree:?}")))?;
            if degree != mask_degree(mask) {
                return Err(Error::Parse(format!(
                    "row {i}: degree {degree} does not match mask {mask}"
                )));
            }
            let coeff: Coeff = coeff
                .parse()
                .map_err(|_| Error::Parse(format!("row {i}: bad coefficient {coeff:?}")))?;
            coeffs.push(coeff);
        }
        if !coeffs.len().is_power_of_two() || coeffs.is_empty() {
            return Err(Error::LengthNotPowerOfTwo(coeffs.len()));
        }
        let p = coeffs.len().trailing_zeros();
        if p == 0 || p > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange(p));
        }
        Ok(Spectrum { p, coeffs })
    }
}

/// Transforms the sign table of f. Never fails: signs are +-1 and p <= 24.
pub fn spectrum(f: &BooleanFunction) -> Spectrum {
    let mut values = f.sign_values();
    butterfly(&mut values);
    Spectrum {
        p: f.dimension(),
        coeffs: values,
    }
}

/// The low-degree slice of a spectrum: coefficients S_J for |J| <= d, in
/// ascending mask order. Two functions collide at degree d exactly when
/// these vectors are equal, so the type is hashable for census keying.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LowFrequencyData {
    p: u32,
    d: u32,
    entries: Vec<Coeff>,
}

impl LowFrequencyData {
    pub fn dimension(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// Coefficients for the masks of degree <= d, ascending mask order.
    pub fn entries(&self) -> &[Coeff] {
        &self.entries
    }

    /// Masks in the order the entries use.
    pub fn masks(&self) -> Vec<u32> {
        low_degree_masks(self.p, self.d)
    }
}

/// Frequency masks of degree <= d in ascending numeric order.
pub fn low_degree_masks(p: u32, d: u32) -> Vec<u32> {
    (0..1u32 << p).filter(|&j| mask_degree(j) <= d).collect()
}

/// Extracts the degree <= d slice of a spectrum.
pub fn low_frequency_data(s: &Spectrum, d: u32) -> Result<LowFrequencyData, Error> {
    if d > s.dimension() {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: s.dimension(),
        });
    }
    let entries = s
        .coeffs
        .iter()
        .enumerate()
        .filter(|(j, _)| mask_degree(*j as u32) <= d)
        .map(|(_, &v)| v)
        .collect();
    Ok(LowFrequencyData {
        p: s.dimension(),
        d,
        entries,
    })
}

/// Degree-d truncation of f, kept exact by storing numerators over N.
///
/// trunc_numerators[m] is t_m = sum over |J| <= d of S_J w_J(x_m), which is
/// N times the truncated polynomial at x_m; residual_numerators[m] is
/// rho_m = N f(x_m) - t_m. For p >= 1 both are even, since every S_J and
/// N f(x_m) share N's parity and N is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationResult {
    p: u32,
    d: u32,
    trunc_numerators: Vec<Coeff>,
    residual_numerators: Vec<Coeff>,
}

impl TruncationResult {
    pub fn dimension(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn trunc_numerators(&self) -> &[Coeff] {
        &self.trunc_numerators
    }

    pub fn residual_numerators(&self) -> &[Coeff] {
        &self.residual_numerators
    }

    /// (max |rho_m|, first attaining mask).
    pub fn max_abs_residual(&self) -> (Coeff, u32) {
        let mut best = (0, 0);
        for (m, &r) in self.residual_numerators.iter().enumerate() {
            if r.abs() > best.0 {
                best = (r.abs(), m as u32);
            }
        }
        best
    }

    /// sum_m rho_m^2 = N * sum over |J| > d of S_J^2.
    pub fn residual_energy(&self) -> i128 {
        self.residual_numerators
            .iter()
            .map(|&r| (r as i128) * (r as i128))
            .sum()
    }
}

/// Computes the degree-d truncation and residual of f.
///
/// Transforming the degree-masked spectrum once more evaluates
/// sum_{|J| <= d} S_J w_J(x_m) at every point, so no second definition of
/// the character sum is involved.
pub fn truncate(f: &BooleanFunction, d: u32) -> Result<TruncationResult, Error> {
    let p = f.dimension();
    if d > p {
        return Err(Error::DegreeOutOfRange {
            degree: d,
            dimension: p,
        });
    }
    let s = spectrum(f);
    let mut masked = s.coeffs;
    for (j, v) in masked.iter_mut().enumerate() {
        if mask_degree(j as u32) > d {
            *v = 0;
        }
    }
    butterfly(&mut masked);
    let n = 1 << p;
    let residual_numerators = masked
        .iter()
        .enumerate()
        .map(|(m, &t)| n * f.sign(m as u32) - t)
        .collect();
    Ok(TruncationResult {
        p,
        d,
        trunc_numerators: masked,
        residual_numerators,
    })
}

/// Groups every mask by degree; handy for per-degree energy summaries.
pub fn energy_by_degree(s: &Spectrum) -> HashMap<u32, i128> {
    let mut by_degree = HashMap::new();
    for (j, &v) in s.coeffs.iter().enumerate() {
        *by_degree.entry(mask_degree(j as u32)).or_insert(0i128) += (v as i128) * (v as i128);
    }
    by_degree
}
