//! Integer partitions as ramification profiles: automorphism counts,
//! conjugacy-class sizes, the cut/join moves, and the multiset splittings
//! that appear in the cut-and-join recursion.

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial};
use num::{BigInt, One};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// A partition stored with parts sorted in descending order. Parts are
/// strictly positive; the empty partition is allowed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Build from parts in any order; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput(
                "partition parts must be positive".to_string(),
            ));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts (the degree of the covering).
    pub fn size(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    /// Multiplicity of a given part value.
    pub fn multiplicity(&self, value: u32) -> u32 {
        self.0.iter().filter(|&&p| p == value).count() as u32
    }

    /// Map value -> multiplicity over the distinct part values.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// |Aut(mu)| = prod_k m_k! over multiplicities.
    pub fn aut_order(&self) -> BigInt {
        self.multiplicities()
            .values()
            .map(|&m| factorial(m as u64))
            .product()
    }

    /// Number of simple branch points forced by Riemann-Hurwitz:
    /// r = 2g - 2 + len + size. Errors when the count would be negative.
    pub fn rh_count(&self, g: u32) -> Result<u64> {
        let r = 2 * g as i64 - 2 + self.len() as i64 + self.size() as i64;
        if r < 0 {
            return Err(Error::InvalidInput(format!(
                "no simple branch points: 2g - 2 + len + size = {r} < 0 for g = {g}, mu = {self}"
            )));
        }
        Ok(r as u64)
    }

    /// Size of the conjugacy class of cycle type mu in S_d:
    /// d! / (prod_i mu_i * prod_k m_k!).
    pub fn conjugacy_class_size(&self) -> BigInt {
        let mut denom = self.aut_order();
        for &p in &self.0 {
            denom *= p;
        }
        factorial(self.size()) / denom
    }

    /// Replace parts at positions i and j by their sum.
    pub fn join_parts(&self, i: usize, j: usize) -> Result<Self> {
        if i == j || i >= self.len() || j >= self.len() {
            return Err(Error::InvalidInput(format!(
                "join needs two distinct valid positions, got {i}, {j}"
            )));
        }
        let mut parts = Vec::with_capacity(self.len() - 1);
        for (k, &p) in self.0.iter().enumerate() {
            if k != i && k != j {
                parts.push(p);
            }
        }
        parts.push(self.0[i] + self.0[j]);
        Partition::new(parts)
    }

    /// Replace the part at position i by two parts a, b with a + b = mu_i.
    pub fn split_part(&self, i: usize, a: u32, b: u32) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::InvalidInput(format!(
                "split position {i} out of range"
            )));
        }
        if a == 0 || b == 0 || a + b != self.0[i] {
            return Err(Error::InvalidInput(format!(
                "split of part {} into {a} + {b} is invalid",
                self.0[i]
            )));
        }
        let mut parts: Vec<u32> = self
            .0
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &p)| p)
            .collect();
        parts.push(a);
        parts.push(b);
        Partition::new(parts)
    }

    /// Remove the part at position i.
    pub fn remove_part(&self, i: usize) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::InvalidInput(format!(
                "position {i} out of range for {self}"
            )));
        }
        let parts = self
            .0
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &p)| p)
            .collect();
        Ok(Partition(parts))
    }

    /// Add an extra part.
    pub fn with_part(&self, value: u32) -> Result<Self> {
        let mut parts = self.0.clone();
        parts.push(value);
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", inner.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s.trim());
        if trimmed.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: std::result::Result<Vec<u32>, _> = trimmed
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect();
        match parts {
            Ok(v) => Partition::new(v),
            Err(e) => Err(Error::InvalidInput(format!("cannot parse partition: {e}"))),
        }
    }
}

/// All partitions of `size`, in descending lexicographic order of part lists.
pub fn enumerate_partitions(size: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn go(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(current.clone()));
            return;
        }
        let cap = max_part.min(remaining);
        for p in (1..=cap).rev() {
            current.push(p);
            go(remaining - p, p, current, out);
            current.pop();
        }
    }
    go(size, size, &mut current, &mut out);
    out
}

/// Partitions of `size` with exactly `len` parts.
pub fn enumerate_partitions_with_length(size: u32, len: usize) -> Vec<Partition> {
    enumerate_partitions(size)
        .into_iter()
        .filter(|p| p.len() == len)
        .collect()
}

/// All tuples of length `len` with entries 1..=part_max, in lexicographic
/// order. These are the unordered-to-ordered comparison grid for symmetric
/// summation identities.
pub fn enumerate_tuples(len: usize, part_max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(len);
    fn go(len: usize, part_max: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for v in 1..=part_max {
            current.push(v);
            go(len, part_max, current, out);
            current.pop();
        }
    }
    go(len, part_max, &mut current, &mut out);
    out
}

/// All ordered splittings of mu into sub-multisets (nu1, nu2) together with
/// the number of ways to realize the split on labeled cycles, namely
/// prod_k C(m_k(mu), m_k(nu1)). Both halves may be empty. The total count
/// over all splits is prod_k (m_k + 1) choices weighted by binomials,
/// i.e. 2^len(mu) realizations in all.
pub fn multiset_splits(mu: &Partition) -> Vec<(Partition, Partition, BigInt)> {
    let values: Vec<(u32, u32)> = mu.multiplicities().into_iter().collect();
    let mut out = Vec::new();
    let mut take = vec![0u32; values.len()];
    loop {
        let mut nu1 = Vec::new();
        let mut nu2 = Vec::new();
        let mut weight = BigInt::one();
        for (idx, &(value, mult)) in values.iter().enumerate() {
            let j = take[idx];
            for _ in 0..j {
                nu1.push(value);
            }
            for _ in 0..(mult - j) {
                nu2.push(value);
            }
            weight *= binomial(mult as u64, j as u64);
        }
        out.push((
            Partition::new(nu1).unwrap(),
            Partition::new(nu2).unwrap(),
            weight,
        ));
        // odometer increment over 0..=mult per value
        let mut idx = 0;
        loop {
            if idx == values.len() {
                return out;
            }
            if take[idx] < values[idx].1 {
                take[idx] += 1;
                break;
            }
            take[idx] = 0;
            idx += 1;
        }
    }
}
