use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A fixed-length bit vector written most-significant first, so that `"0110"`
/// has bit 0 (the leftmost character) clear.
///
/// Index `i` of a `Bits` maps to circuit line `i`. When a `Bits` is converted
/// to an integer index the leftmost bit is the most significant one, which
/// makes integer order agree with lexicographic string order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    /// Decode `index` into `len` bits, most significant first.
    pub fn from_index(index: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Bits(
            (0..len)
                .map(|i| (index >> (len - 1 - i)) & 1 == 1)
                .collect(),
        )
    }

    /// Inverse of [`Bits::from_index`]. Panics past 64 bits.
    pub fn to_index(&self) -> u64 {
        assert!(self.0.len() <= 64, "bit string too long for an index");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &Bits) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Bits(v)
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Bits(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_order_matches_string_order() {
        let b = Bits::from_index(6, 4);
        assert_eq!(b.to_string(), "0110");
        assert_eq!(b.to_index(), 6);
        assert!(Bits::from_index(5, 4) < b);
    }

    #[test]
    fn rejects_non_binary() {
        assert!("01x".parse::<Bits>().is_err());
        assert_eq!("".parse::<Bits>().unwrap().len(), 0);
    }

    #[test]
    fn hamming_distance() {
        let a: Bits = "0110".parse().unwrap();
        let b: Bits = "1001".parse().unwrap();
        assert_eq!(a.hamming(&b), 4);
        assert_eq!(a.hamming(&a), 0);
    }
}
