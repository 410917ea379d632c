use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the hypercube {0,1}^d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct BinaryPoint {
    bits: Vec<u8>,
}

impl BinaryPoint {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::InvalidBit { index, value });
        }
        Ok(Self { bits })
    }

    pub fn zeros(d: usize) -> Self {
        Self { bits: vec![0; d] }
    }

    pub fn ones(d: usize) -> Self {
        Self { bits: vec![1; d] }
    }

    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..d).map(|_| rng.random_range(0..2u8)).collect(),
        }
    }

    /// The point whose bits are the binary digits of `index`, least significant first.
    pub fn from_index(index: u64, d: usize) -> Self {
        Self {
            bits: (0..d).map(|i| ((index >> i) & 1) as u8).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    #[inline]
    pub fn is_set(&self, i: usize) -> bool {
        self.bits[i] == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut p = self.clone();
        p.flip(i);
        p
    }

    /// Number of ones, i.e. the l1 norm.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<u8>> for BinaryPoint {
    type Error = Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits)
    }
}

impl From<BinaryPoint> for Vec<u8> {
    fn from(p: BinaryPoint) -> Self {
        p.bits
    }
}

impl fmt::Display for BinaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BinaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .enumerate()
            .map(|(index, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidBit {
                    index,
                    value: c as u8,
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}
