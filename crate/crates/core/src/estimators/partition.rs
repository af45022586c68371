use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A split of the indices `0..n` into `m` disjoint groups whose sizes differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPartition {
    groups: Vec<Vec<usize>>,
    n: usize,
}

impl SubsetPartition {
    /// Builds a partition from explicit groups, checking that they cover
    /// `0..n` disjointly with balanced sizes. Indices inside each group are sorted.
    pub fn from_groups(n: usize, mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let m = groups.len();
        if m == 0 || m > n {
            return Err(Error::InvalidGroupCount { n, m });
        }
        let mut seen = vec![false; n];
        for g in &mut groups {
            g.sort_unstable();
            for &i in g.iter() {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Domain(format!(
                        "index {i} is out of range or repeated"
                    )));
                }
            }
            if g.len() != n / m && g.len() != n.div_ceil(m) {
                return Err(Error::Domain(format!(
                    "unbalanced group of size {}",
                    g.len()
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("groups do not cover every index".into()));
        }
        Ok(Self { groups, n })
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Uniformly random balanced partition: shuffle `0..n` with the seed, then cut
/// into `m` consecutive chunks (the first `n mod m` chunks get one extra index).
pub fn partition(n: usize, m: usize, seed: u64) -> Result<SubsetPartition> {
    if m == 0 || m > n {
        return Err(Error::InvalidGroupCount { n, m });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / m, n % m);
    let mut groups = Vec::with_capacity(m);
    let mut start = 0;
    for j in 0..m {
        let len = base + usize::from(j < extra);
        let mut g = idx[start..start + len].to_vec();
        g.sort_unstable();
        groups.push(g);
        start += len;
    }
    Ok(SubsetPartition { groups, n })
}
