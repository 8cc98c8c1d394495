//! Bit-packed Boolean functions on the hypercube {-1, +1}^p.
//!
//! Points of the cube are indexed by masks m in [0, 2^p): coordinate i of
//! the point x_m is (-1)^((m >> i) & 1). A function stores one bit per
//! point, bit m set meaning f(x_m) = -1, so the all-zero table is the
//! constant +1 function.

use crate::error::Error;
use crate::{Coeff, MAX_DIMENSION};

/// A Boolean function f : {-1, +1}^p -> {-1, +1}, 1 <= p <= 24.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    p: u32,
    /// ceil(2^p / 64) words; bits at positions >= 2^p are zero.
    words: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl BooleanFunction {
    /// Checks p and masks off any stray bits above 2^p.
    pub fn from_words(p: u32, mut words: Vec<u64>) -> Result<Self, Error> {
        if p == 0 || p > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange(p));
        }
        let n = 1usize << p;
        words.resize(words_for(n), 0);
        if n % 64 != 0 {
            let last = words.last_mut().expect("at least one word");
            *last &= (1u64 << (n % 64)) - 1;
        }
        Ok(BooleanFunction { p, words })
    }

    /// The constant function; `negative` picks -1 everywhere.
    pub fn constant(p: u32, negative: bool) -> Result<Self, Error> {
        let f = Self::from_words(p, Vec::new())?;
        if negative {
            Ok(f.negated())
        } else {
            Ok(f)
        }
    }

    /// The full parity function f(x_m) = (-1)^popcount(m).
    pub fn parity(p: u32) -> Result<Self, Error> {
        let n = 1usize << p;
        let mut words = vec![0u64; words_for(n)];
        for m in 0..n {
            if m.count_ones() % 2 == 1 {
                words[m / 64] |= 1u64 << (m % 64);
            }
        }
        Self::from_words(p, words)
    }

    /// Builds from explicit signs, one per point mask in ascending order.
    pub fn from_signs(p: u32, signs: &[Coeff]) -> Result<Self, Error> {
        if p == 0 || p > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange(p));
        }
        let n = 1usize << p;
        if signs.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} signs for p = {p}, got {}",
                signs.len()
            )));
        }
        let mut words = vec![0u64; words_for(n)];
        for (m, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => words[m / 64] |= 1u64 << (m % 64),
                other => {
                    return Err(Error::Parse(format!("sign at mask {m} is {other}, not +-1")))
                }
            }
        }
        Self::from_words(p, words)
    }

    pub fn dimension(&self) -> u32 {
        self.p
    }

    /// Number of points, N = 2^p.
    pub fn point_count(&self) -> usize {
        1usize << self.p
    }

    /// f(x_m) as +-1.
    #[inline]
    pub fn sign(&self, m: u32) -> Coeff {
        debug_assert!((m as usize) < self.point_count());
        let bit = (self.words[(m / 64) as usize] >> (m % 64)) & 1;
        1 - 2 * bit as Coeff
    }

    /// All N signs in mask order.
    pub fn sign_values(&self) -> Vec<Coeff> {
        (0..self.point_count() as u32).map(|m| self.sign(m)).collect()
    }

    /// -f.
    pub fn negated(&self) -> Self {
        let mut flipped = BooleanFunction {
            p: self.p,
            words: self.words.iter().map(|w| !w).collect(),
        };
        let n = self.point_count();
        if n % 64 != 0 {
            let last = flipped.words.last_mut().expect("at least one word");
            *last &= (1u64 << (n % 64)) - 1;
        }
        flipped
    }

    /// Copy of f with the sign at each mask in `flips` reversed.
    /// Repeated masks toggle repeatedly, matching symmetric difference.
    pub fn flipped(&self, flips: &[u32]) -> Self {
        let mut out = self.clone();
        for &m in flips {
            debug_assert!((m as usize) < out.point_count());
            out.words[(m / 64) as usize] ^= 1u64 << (m % 64);
        }
        out
    }

    /// Raw table words, low bit of word 0 = mask 0.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Parses the WBF1 text format: line 1 the literal `WBF1`, line 2 the
    /// decimal dimension, line 3 exactly 2^p characters from {+, -} where
    /// character m is the sign of f(x_m). One trailing newline is allowed;
    /// anything else is rejected.
    pub fn parse_wbf1(text: &str) -> Result<Self, Error> {
        let mut lines = text.split('\n');
        let magic = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?;
        if magic != "WBF1" {
            return Err(Error::Parse(format!(
                "first line must be 'WBF1', got {magic:?}"
            )));
        }
        let p_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing dimension line".into()))?;
        let p: u32 = p_line
            .parse()
            .map_err(|_| Error::Parse(format!("dimension line {p_line:?} is not a decimal integer")))?;
        if p == 0 || p > MAX_DIMENSION {
            return Err(Error::DimensionOutOfRange(p));
        }
        let table = lines
            .next()
            .ok_or_else(|| Error::Parse("missing sign table line".into()))?;
        match lines.next() {
            None => {}
            Some("") if lines.next().is_none() => {}
            Some(_) => return Err(Error::Parse("trailing content after sign table".into())),
        }
        let n = 1usize << p;
        if table.len() != n {
            return Err(Error::Parse(format!(
                "sign table has {} characters, expected {n}",
                table.len()
            )));
        }
        let mut words = vec![0u64; words_for(n)];
        for (m, c) in table.bytes().enumerate() {
            match c {
                b'+' => {}
                b'-' => words[m / 64] |= 1u64 << (m % 64),
                other => {
                    return Err(Error::Parse(format!(
                        "sign table character {} at mask {m} (only '+' and '-' allowed)",
                        other as char
                    )))
                }
            }
        }
        Self::from_words(p, words)
    }

    /// Serializes to WBF1, inverse of [`parse_wbf1`](Self::parse_wbf1).
    pub fn to_wbf1(&self) -> String {
        let n = self.point_count();
        let mut out = String::with_capacity(n + 16);
        out.push_str("WBF1\n");
        out.push_str(&self.p.to_string());
        out.push('\n');
        for m in 0..n as u32 {
            out.push(if self.sign(m) == 1 { '+' } else { '-' });
        }
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs_follow_bits() {
        let f = BooleanFunction::from_words(2, vec![0b0110]).unwrap();
        assert_eq!(f.sign_values(), vec![1, -1, -1, 1]);
    }

    #[test]
    fn all_zero_table_is_constant_plus_one() {
        let f = BooleanFunction::constant(3, false).unwrap();
        assert!(f.sign_values().iter().all(|&s| s == 1));
        let g = BooleanFunction::constant(3, true).unwrap();
        assert!(g.sign_values().iter().all(|&s| s == -1));
    }

    #[test]
    fn parity_matches_popcount() {
        let f = BooleanFunction::parity(4).unwrap();
        for m in 0..16u32 {
            let want = if m.count_ones() % 2 == 0 { 1 } else { -1 };
            assert_eq!(f.sign(m), want, "mask {m}");
        }
    }

    #[test]
    fn negation_masks_tail_bits() {
        // p = 3 uses 8 of 64 bits; negation must not pollute the rest.
        let f = BooleanFunction::constant(3, false).unwrap().negated();
        assert_eq!(f.words()[0], 0xFF);
        assert_eq!(f, BooleanFunction::constant(3, true).unwrap());
    }

    #[test]
    fn flip_is_involutive() {
        let f = BooleanFunction::parity(5).unwrap();
        let g = f.flipped(&[0, 7, 31]);
        assert_ne!(f, g);
        assert_eq!(f, g.flipped(&[31, 0, 7]));
    }

    #[test]
    fn dimension_bounds_enforced() {
        assert_eq!(
            BooleanFunction::from_words(0, vec![]),
            Err(Error::DimensionOutOfRange(0))
        );
        assert_eq!(
            BooleanFunction::from_words(25, vec![]),
            Err(Error::DimensionOutOfRange(25))
        );
    }

    #[test]
    fn wbf1_round_trip() {
        let f = BooleanFunction::parity(3).unwrap();
        let text = f.to_wbf1();
        assert_eq!(text, "WBF1\n3\n+--+-++-\n");
        assert_eq!(BooleanFunction::parse_wbf1(&text).unwrap(), f);
    }

    #[test]
    fn wbf1_rejects_malformed_inputs() {
        let bad = [
            "",
            "WBF2\n2\n++++\n",
            "WBF1\n2\n+++\n",
            "WBF1\n2\n+++++\n",
            "WBF1\n2\n++*+\n",
            "WBF1\nx\n++++\n",
            "WBF1\n0\n\n",
            "WBF1\n2\n++++\nextra\n",
            "WBF1\n2\n++++\n\n",
            "WBF1\r\n2\r\n++++\r\n",
        ];
        for text in bad {
            assert!(
                BooleanFunction::parse_wbf1(text).is_err(),
                "accepted {text:?}"
            );
        }
        // Missing trailing newline is fine.
        assert!(BooleanFunction::parse_wbf1("WBF1\n2\n++++").is_ok());
    }
}
