//! Index subsets, binomial coefficients, and lexicographic
//! ranking/unranking of k-combinations.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Strictly increasing, nonempty list of indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSubset(Vec<usize>);

impl IndexSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(invalid("index subset must be nonempty"));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("index subset must be strictly increasing"));
        }
        Ok(Self(indices))
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices)
    }

    /// Checks every index is below `bound`.
    pub fn check_bound(&self, bound: usize) -> Result<()> {
        match self.0.last() {
            Some(&max) if max >= bound => Err(invalid(format!(
                "index {max} out of range for {bound} columns"
            ))),
            _ => Ok(()),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// First `k` indices.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        Self::new(self.0[..k.min(self.0.len())].to_vec())
    }
}

impl TryFrom<Vec<usize>> for IndexSubset {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<IndexSubset> for Vec<usize> {
    fn from(s: IndexSubset) -> Self {
        s.0
    }
}

/// `C(n, k)`, or `None` if it overflows `u128`.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // C(n, i+1) = C(n, i) (n - i) / (i + 1). After cancelling
        // g = gcd(acc, i + 1), the remaining denominator divides n - i.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul(num / (den / g))?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
pub fn unrank_combination(n: usize, k: usize, mut rank: u128) -> Result<Vec<usize>> {
    let total = binomial(n, k).ok_or_else(|| invalid("C(n, k) overflows"))?;
    if rank >= total {
        return Err(invalid(format!(
            "rank {rank} out of range for C({n}, {k}) = {total}"
        )));
    }
    let mut combo = Vec::with_capacity(k);
    let mut next = 0usize;
    for i in 0..k {
        let mut c = next;
        loop {
            let count = binomial(n - c - 1, k - i - 1).expect("smaller than total");
            if rank >= count {
                rank -= count;
                c += 1;
            } else {
                combo.push(c);
                next = c + 1;
                break;
            }
        }
    }
    Ok(combo)
}

/// Lexicographic rank of a strictly increasing k-subset of `0..n`.
pub fn rank_combination(n: usize, combo: &[usize]) -> u128 {
    let k = combo.len();
    let mut rank = 0u128;
    let mut start = 0usize;
    for (i, &c) in combo.iter().enumerate() {
        for j in start..c {
            rank += binomial(n - j - 1, k - i - 1).expect("rank fits when total fits");
        }
        start = c + 1;
    }
    rank
}

/// Advances `combo` to the lexicographic successor among k-subsets of
/// `0..n`. Returns `false` when `combo` was the last one.
pub fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(12, 3), Some(220));
        assert_eq!(binomial(64, 2), Some(2016));
        assert_eq!(binomial(64, 6), Some(74_974_368));
        assert_eq!(binomial(5, 6), Some(0));
        assert_eq!(binomial(200, 100), None);
        // C(130, 65) ~ 9.5e37 fits in u128 (max ~3.4e38).
        assert!(binomial(130, 65).is_some());
    }

    #[test]
    fn rank_unrank_round_trip() {
        let (n, k) = (9, 4);
        let mut combo: Vec<usize> = (0..k).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank_combination(n, k, rank).unwrap(), combo);
            assert_eq!(rank_combination(n, &combo), rank);
            rank += 1;
            if !next_combination(&mut combo, n) {
                break;
            }
        }
        assert_eq!(rank, binomial(n, k).unwrap());
        assert!(unrank_combination(n, k, rank).is_err());
    }

    #[test]
    fn subset_validation() {
        assert!(IndexSubset::new(vec![]).is_err());
        assert!(IndexSubset::new(vec![2, 1]).is_err());
        assert!(IndexSubset::new(vec![1, 1]).is_err());
        let s = IndexSubset::from_unsorted(vec![4, 1, 4, 0]).unwrap();
        assert_eq!(s.indices(), &[0, 1, 4]);
        assert!(s.check_bound(5).is_ok());
        assert!(s.check_bound(4).is_err());
        assert!(s.contains(4) && !s.contains(2));
    }
}
