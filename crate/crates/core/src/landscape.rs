//! NK and NKCS fitness landscapes.
//!
//! Each trait `i` owns a table of uniform random contributions indexed by the
//! bits that trait depends on. The index is built most-significant-first in
//! the order `[own trait, local neighbours..., partner 1 externals...,
//! partner 2 externals..., ...]`, so for `K = 0` the table is indexed by the
//! own bit directly. The fitness of a genotype is the mean contribution.
//!
//! Landscapes serialise to JSON as
//! `{"n":..,"k":..,"c":..,"s":..,"neighbors":[[..],..],"external":[[[..],..],..],"tables":[[..],..]}`
//! (NK landscapes omit `c`, `s` and `external`). Floats round-trip exactly.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

fn sample_excluding(rng: &mut impl Rng, n: usize, amount: usize, exclude: usize) -> Vec<usize> {
    index::sample(rng, n - 1, amount).into_iter().map(|j| if j >= exclude { j + 1 } else { j }).collect()
}

fn random_table(rng: &mut impl Rng, bits: usize) -> Vec<f64> {
    (0..1usize << bits).map(|_| rng.gen::<f64>()).collect()
}

#[inline]
fn push_bit(idx: usize, bit: bool) -> usize {
    (idx << 1) | bit as usize
}

fn check_table(i: usize, table: &[f64], bits: usize) -> Result<()> {
    if table.len() != 1 << bits {
        return param(format!("table {i} has {} entries, expected {}", table.len(), 1usize << bits));
    }
    if let Some(v) = table.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return param(format!("table {i} holds {v}, outside [0, 1]"));
    }
    Ok(())
}

fn check_distinct(what: &str, idx: &[usize], n: usize, own: Option<usize>) -> Result<()> {
    for (a, &x) in idx.iter().enumerate() {
        if x >= n || Some(x) == own || idx[..a].contains(&x) {
            return param(format!("{what} {idx:?} must be distinct, in [0, {n}) and not self"));
        }
    }
    Ok(())
}

/// An NK landscape: `n` traits, each epistatically linked to `k` others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    neighbors: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

impl NkLandscape {
    pub fn generate(rng: &mut impl Rng, n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return param("NK landscape needs n >= 1");
        }
        if k >= n {
            return param(format!("NK landscape needs k < n (k={k}, n={n})"));
        }
        let mut neighbors = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            neighbors.push(sample_excluding(rng, n, k, i));
            tables.push(random_table(rng, k + 1));
        }
        Ok(Self { n, k, neighbors, tables })
    }

    /// Build a landscape from explicit parts, checking every invariant.
    pub fn from_parts(n: usize, k: usize, neighbors: Vec<Vec<usize>>, tables: Vec<Vec<f64>>) -> Result<Self> {
        let land = Self { n, k, neighbors, tables };
        land.validate()?;
        Ok(land)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k >= self.n {
            return param(format!("need 0 <= k < n (k={}, n={})", self.k, self.n));
        }
        if self.neighbors.len() != self.n || self.tables.len() != self.n {
            return param("neighbors and tables need one entry per trait");
        }
        for i in 0..self.n {
            if self.neighbors[i].len() != self.k {
                return param(format!("trait {i} needs exactly k={} neighbours", self.k));
            }
            check_distinct("neighbours", &self.neighbors[i], self.n, Some(i))?;
            check_table(i, &self.tables[i], self.k + 1)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    /// Contribution of trait `i` alone.
    pub fn contribution(&self, i: usize, traits: &[bool]) -> f64 {
        let idx = self.neighbors[i].iter().fold(traits[i] as usize, |idx, &j| push_bit(idx, traits[j]));
        self.tables[i][idx]
    }

    pub fn fitness(&self, traits: &[bool]) -> Result<f64> {
        if traits.len() != self.n {
            return param(format!("genotype has {} bits, landscape has n={}", traits.len(), self.n));
        }
        Ok(self.score(traits))
    }

    /// [`fitness`](Self::fitness) without the length check.
    pub(crate) fn score(&self, traits: &[bool]) -> f64 {
        debug_assert_eq!(traits.len(), self.n);
        (0..self.n).map(|i| self.contribution(i, traits)).sum::<f64>() / self.n as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("landscape serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let land: Self = serde_json::from_str(text)?;
        land.validate()?;
        Ok(land)
    }
}

/// An NKCS landscape: an NK landscape whose traits also read `c` traits of
/// each of `s` partner genomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NkcsLandscape {
    n: usize,
    k: usize,
    c: usize,
    s: usize,
    neighbors: Vec<Vec<usize>>,
    /// `external[i][p]` lists the partner-`p` traits read by trait `i`.
    external: Vec<Vec<Vec<usize>>>,
    tables: Vec<Vec<f64>>,
}

impl NkcsLandscape {
    pub fn generate(rng: &mut impl Rng, n: usize, k: usize, c: usize, s: usize) -> Result<Self> {
        if n == 0 {
            return param("NKCS landscape needs n >= 1");
        }
        if k >= n {
            return param(format!("NKCS landscape needs k < n (k={k}, n={n})"));
        }
        if c > n {
            return param(format!("NKCS landscape needs c <= n (c={c}, n={n})"));
        }
        let bits = k + 1 + c * s;
        if bits >= usize::BITS as usize - 1 {
            return param(format!("table of 2^{bits} entries is too large"));
        }
        let mut neighbors = Vec::with_capacity(n);
        let mut external = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            neighbors.push(sample_excluding(rng, n, k, i));
            external.push((0..s).map(|_| index::sample(rng, n, c).into_vec()).collect());
            tables.push(random_table(rng, bits));
        }
        Ok(Self { n, k, c, s, neighbors, external, tables })
    }

    pub fn from_parts(
        n: usize,
        k: usize,
        c: usize,
        s: usize,
        neighbors: Vec<Vec<usize>>,
        external: Vec<Vec<Vec<usize>>>,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let land = Self { n, k, c, s, neighbors, external, tables };
        land.validate()?;
        Ok(land)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k >= self.n || self.c > self.n {
            return param(format!("need 0 <= k < n and c <= n (n={}, k={}, c={})", self.n, self.k, self.c));
        }
        if self.neighbors.len() != self.n || self.external.len() != self.n || self.tables.len() != self.n {
            return param("neighbors, external and tables need one entry per trait");
        }
        for i in 0..self.n {
            if self.neighbors[i].len() != self.k {
                return param(format!("trait {i} needs exactly k={} neighbours", self.k));
            }
            check_distinct("neighbours", &self.neighbors[i], self.n, Some(i))?;
            if self.external[i].len() != self.s {
                return param(format!("trait {i} needs external links for s={} partners", self.s));
            }
            for ext in &self.external[i] {
                if ext.len() != self.c {
                    return param(format!("trait {i} needs exactly c={} external links", self.c));
                }
                check_distinct("external links", ext, self.n, None)?;
            }
            check_table(i, &self.tables[i], self.k + 1 + self.c * self.s)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    pub fn external(&self) -> &[Vec<Vec<usize>>] {
        &self.external
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    pub fn contribution<P: AsRef<[bool]>>(&self, i: usize, own: &[bool], partners: &[P]) -> f64 {
        let mut idx = self.neighbors[i].iter().fold(own[i] as usize, |idx, &j| push_bit(idx, own[j]));
        for (ext, partner) in self.external[i].iter().zip(partners) {
            let partner = partner.as_ref();
            idx = ext.iter().fold(idx, |idx, &j| push_bit(idx, partner[j]));
        }
        self.tables[i][idx]
    }

    pub fn fitness<P: AsRef<[bool]>>(&self, own: &[bool], partners: &[P]) -> Result<f64> {
        if own.len() != self.n {
            return param(format!("genotype has {} bits, landscape has n={}", own.len(), self.n));
        }
        if partners.len() != self.s {
            return Err(Error::Parameter(format!(
                "landscape couples to s={} partners, got {}",
                self.s,
                partners.len()
            )));
        }
        if let Some(p) = partners.iter().find(|p| p.as_ref().len() != self.n) {
            return param(format!("partner genotype has {} bits, expected {}", p.as_ref().len(), self.n));
        }
        Ok(self.score(own, partners))
    }

    pub(crate) fn score<P: AsRef<[bool]>>(&self, own: &[bool], partners: &[P]) -> f64 {
        (0..self.n).map(|i| self.contribution(i, own, partners)).sum::<f64>() / self.n as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("landscape serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let land: Self = serde_json::from_str(text)?;
        land.validate()?;
        Ok(land)
    }
}
