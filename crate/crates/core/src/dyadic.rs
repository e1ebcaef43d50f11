//! Binary words, dyadic intervals, neighbors and restriction to index sets.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A finite binary word, most significant letter first. Letter `ℓ` (1-based)
/// is `bits[ℓ - 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    bits: Vec<u8>,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Result<Self> {
        let bits: Vec<u8> = bits.into_iter().collect();
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse("letters must be 0 or 1".into()));
        }
        Ok(Self { bits })
    }

    /// The word of length `len` whose letters spell `index` in binary.
    pub fn from_index(index: u64, len: usize) -> Self {
        let bits = (0..len).rev().map(|k| if k < 64 { ((index >> k) & 1) as u8 } else { 0 }).collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Letter at 1-based generation `l`.
    pub fn letter(&self, l: usize) -> u8 {
        self.bits[l - 1]
    }

    pub fn push(&mut self, b: u8) {
        debug_assert!(b <= 1);
        self.bits.push(b);
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("unexpected letter {other:?} in word"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(|bits| Self { bits })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An exact dyadic rational `numerator / 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub numerator: BigUint,
    pub exponent: usize,
}

impl Dyadic {
    pub fn to_f64(&self) -> f64 {
        if self.numerator.is_zero() {
            return 0.0;
        }
        // Keep the top 64 bits so the conversion never overflows.
        let bits = self.numerator.bits() as usize;
        let shift = bits.saturating_sub(64);
        let top = (&self.numerator >> shift).to_f64().unwrap_or(f64::INFINITY);
        top * 2f64.powi(shift as i32 - self.exponent as i32)
    }
}

/// `x_w = Σ w_ℓ 2^{-ℓ}`, exactly.
pub fn value(w: &Word) -> Dyadic {
    let mut n = BigUint::zero();
    for &b in w.bits() {
        n <<= 1u32;
        if b == 1 {
            n += 1u32;
        }
    }
    Dyadic { numerator: n, exponent: w.len() }
}

/// Codings of `I_w - 2^{-j}` and `I_w + 2^{-j}`; `None` when the shifted
/// interval leaves `[0, 1)`.
pub fn neighbors(w: &Word) -> Result<(Option<Word>, Option<Word>)> {
    if w.is_empty() {
        return Err(Error::NoGeneration);
    }
    Ok((decrement(w), increment(w)))
}

fn increment(w: &Word) -> Option<Word> {
    let mut bits = w.bits.clone();
    for b in bits.iter_mut().rev() {
        if *b == 0 {
            *b = 1;
            return Some(Word { bits });
        }
        *b = 0;
    }
    None
}

fn decrement(w: &Word) -> Option<Word> {
    let mut bits = w.bits.clone();
    for b in bits.iter_mut().rev() {
        if *b == 1 {
            *b = 0;
            return Some(Word { bits });
        }
        *b = 1;
    }
    None
}

/// `(N0, N1)`.
pub fn digit_counts(w: &Word) -> (usize, usize) {
    let ones = w.bits.iter().filter(|&&b| b == 1).count();
    (w.len() - ones, ones)
}

/// A subset of the generations `1..=len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenIndexSet {
    members: Vec<bool>,
    // prefix[k] = #members among generations 1..=k
    prefix: Vec<u64>,
}

impl GenIndexSet {
    pub fn from_membership(members: Vec<bool>) -> Self {
        let mut prefix = Vec::with_capacity(members.len() + 1);
        prefix.push(0);
        let mut acc = 0;
        for &m in &members {
            acc += m as u64;
            prefix.push(acc);
        }
        Self { members, prefix }
    }

    pub fn empty(len: usize) -> Self {
        Self::from_membership(vec![false; len])
    }

    pub fn full(len: usize) -> Self {
        Self::from_membership(vec![true; len])
    }

    /// Builds the set from 1-based generation indices.
    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self> {
        let mut members = vec![false; len];
        for &i in indices {
            if i == 0 || i > len {
                return Err(Error::Parameter(format!("generation {i} outside 1..={len}")));
            }
            members[i - 1] = true;
        }
        Ok(Self::from_membership(members))
    }

    /// Number of generations the set is defined on.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Membership of 1-based generation `l`.
    pub fn contains(&self, l: usize) -> bool {
        l >= 1 && l <= self.members.len() && self.members[l - 1]
    }

    /// `#(B ∩ {1..=j})`.
    pub fn count_upto(&self, j: usize) -> u64 {
        self.prefix[j.min(self.members.len())]
    }

    /// `#(B ∩ {from..=to})` for `1 ≤ from`, `to ≤ len`.
    pub fn count_range(&self, from: usize, to: usize) -> u64 {
        if to < from {
            return 0;
        }
        self.prefix[to] - self.prefix[from - 1]
    }

    pub fn complement(&self) -> Self {
        Self::from_membership(self.members.iter().map(|m| !m).collect())
    }

    /// Maximal runs of members as 1-based inclusive ranges.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &m) in self.members.iter().enumerate() {
            match (m, start) {
                (true, None) => start = Some(i + 1),
                (false, Some(s)) => {
                    runs.push((s, i));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push((s, self.members.len()));
        }
        runs
    }

    pub fn from_runs(len: usize, runs: &[(usize, usize)]) -> Result<Self> {
        let mut members = vec![false; len];
        for &(s, e) in runs {
            if s == 0 || e > len || s > e {
                return Err(Error::Parse(format!("run [{s},{e}] outside 1..={len}")));
            }
            members[s - 1..e].iter_mut().for_each(|m| *m = true);
        }
        Ok(Self::from_membership(members))
    }

    pub fn to_bit_string(&self) -> String {
        self.members.iter().map(|&m| if m { '1' } else { '0' }).collect()
    }
}

/// Letters of `w` at generations in `b`, in order.
pub fn restrict(w: &Word, b: &GenIndexSet) -> Result<Word> {
    if b.len() < w.len() {
        return Err(Error::Depth { requested: w.len() as u64, available: b.len() as u64 });
    }
    let bits = w
        .bits
        .iter()
        .enumerate()
        .filter(|(i, _)| b.contains(i + 1))
        .map(|(_, &x)| x)
        .collect();
    Ok(Word { bits })
}

#[derive(Serialize, Deserialize)]
struct RunList {
    len: usize,
    runs: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IndexSetRepr {
    Bits(String),
    Runs(RunList),
}

impl Serialize for GenIndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RunList { len: self.len(), runs: self.runs() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GenIndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match IndexSetRepr::deserialize(d)? {
            IndexSetRepr::Bits(s) => {
                let w: Word = s.parse().map_err(serde::de::Error::custom)?;
                Ok(Self::from_membership(w.bits.iter().map(|&b| b == 1).collect()))
            }
            IndexSetRepr::Runs(r) => {
                Self::from_runs(r.len, &r.runs).map_err(serde::de::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn values() {
        assert_eq!(value(&w("")).to_f64(), 0.0);
        assert_eq!(value(&w("1")).to_f64(), 0.5);
        assert_eq!(value(&w("011")).to_f64(), 0.375);
        let v = value(&w("011"));
        assert_eq!(v.numerator, BigUint::from(3u32));
        assert_eq!(v.exponent, 3);
    }

    #[test]
    fn deep_word_value_is_exact() {
        let mut word = Word::new();
        for _ in 0..2000 {
            word.push(1);
        }
        let v = value(&word);
        assert_eq!(v.numerator.bits(), 2000);
        assert_eq!(v.to_f64(), 1.0);
    }

    #[test]
    fn neighbor_examples() {
        assert_eq!(neighbors(&w("01")).unwrap(), (Some(w("00")), Some(w("10"))));
        assert_eq!(neighbors(&w("00")).unwrap(), (None, Some(w("01"))));
        assert_eq!(neighbors(&w("11")).unwrap(), (Some(w("10")), None));
        assert_eq!(neighbors(&w("")), Err(Error::NoGeneration));
    }

    #[test]
    fn restrict_examples() {
        let b = GenIndexSet::from_indices(4, &[1, 3]).unwrap();
        assert_eq!(restrict(&w("1011"), &b).unwrap(), w("11"));
        assert_eq!(restrict(&w("1011"), &GenIndexSet::empty(4)).unwrap(), w(""));
        assert_eq!(restrict(&w("1011"), &GenIndexSet::full(4)).unwrap(), w("1011"));
    }

    #[test]
    fn counts() {
        assert_eq!(digit_counts(&w("0010")), (3, 1));
        assert_eq!(digit_counts(&w("")), (0, 0));
        assert_eq!(digit_counts(&w("1111")), (0, 4));
    }

    #[test]
    fn index_set_serde_forms() {
        let b = GenIndexSet::from_indices(6, &[1, 2, 5]).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"len":6,"runs":[[1,2],[5,5]]}"#);
        let back: GenIndexSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
        let from_bits: GenIndexSet = serde_json::from_str(r#""110010""#).unwrap();
        assert_eq!(from_bits, b);
        assert_eq!(b.count_range(2, 5), 2);
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        prop::collection::vec(0u8..2, 1..80).prop_map(|bits| Word::from_bits(bits).unwrap())
    }

    proptest! {
        #[test]
        fn plus_neighbor_shifts_by_one_cell(word in word_strategy()) {
            let (minus, plus) = neighbors(&word).unwrap();
            let x = value(&word);
            if let Some(p) = plus {
                let xp = value(&p);
                prop_assert_eq!(xp.numerator, &x.numerator + 1u32);
            }
            if let Some(m) = minus {
                let xm = value(&m);
                prop_assert_eq!(xm.numerator + 1u32, x.numerator);
            }
        }

        #[test]
        fn restriction_partitions_letters(
            word in word_strategy(),
            mask in prop::collection::vec(any::<bool>(), 80),
        ) {
            let b = GenIndexSet::from_membership(mask[..word.len()].to_vec());
            let on = restrict(&word, &b).unwrap();
            let off = restrict(&word, &b.complement()).unwrap();
            prop_assert_eq!(on.len() + off.len(), word.len());
            prop_assert_eq!(on.len() as u64, b.count_upto(word.len()));
            let (n0, n1) = digit_counts(&word);
            let (a0, a1) = digit_counts(&on);
            let (b0, b1) = digit_counts(&off);
            prop_assert_eq!((a0 + b0, a1 + b1), (n0, n1));
        }
    }
}
