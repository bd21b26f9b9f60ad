//! Permutations of `[n] = {1, ..., n}` with one-based values.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation sigma of `{1, ..., n}`, stored as `map[i-1] = sigma(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    map: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (1..=n as u32).collect(),
        }
    }

    /// Builds from one-based values `sigma(1), ..., sigma(n)`.
    pub fn from_one_based(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            if v < 1 || v > n || seen[v - 1] {
                return Err(Error::InvalidArgument(format!(
                    "{values:?} is not a permutation of [{n}]"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation {
            map: values.into_iter().map(|v| v as u32).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// sigma(i) for one-based i.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1] as usize
    }

    /// One-based values in position order.
    pub fn values(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.iter().map(|&v| v as usize)
    }

    /// Encoding used for deterministic lexicographic tie-breaks.
    pub fn encoding(&self) -> &[u32] {
        &self.map
    }

    /// Copy with the entries at one-based positions i and j exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut map = self.map.clone();
        map.swap(i - 1, j - 1);
        Permutation { map }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<u32> = (1..=n as u32).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    /// Bit-reversal ordering: positions sorted by the reversed binary
    /// representation of `i - 1` (width `ceil(log2 n)`), ties kept stable.
    pub fn bit_reversal(n: usize) -> Self {
        let width = if n <= 1 {
            0
        } else {
            usize::BITS - (n - 1).leading_zeros()
        };
        let mut order: Vec<u32> = (1..=n as u32).collect();
        order.sort_by_key(|&v| {
            let i = v - 1;
            i.reverse_bits() >> (32 - width.max(1))
        });
        Permutation { map: order }
    }

    /// Deal interleaving with `blocks` piles: 1, 1+b, 1+2b, ..., 2, 2+b, ...
    pub fn deal(n: usize, blocks: usize) -> Self {
        let mut map = Vec::with_capacity(n);
        for start in 1..=blocks.min(n) {
            let mut v = start;
            while v <= n {
                map.push(v as u32);
                v += blocks;
            }
        }
        Permutation { map }
    }

    /// Every permutation of `[n]`, in lexicographic order. Small n only.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        let mut used = vec![false; n + 1];
        fn rec(n: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { map: cur.clone() });
                return;
            }
            for v in 1..=n {
                if !used[v] {
                    used[v] = true;
                    cur.push(v as u32);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(values: Vec<usize>) -> Result<Self> {
        Permutation::from_one_based(values)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.values().collect()
    }
}
