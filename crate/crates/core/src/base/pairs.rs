use crate::error::{param, Result};

/// Number of unordered pairs among `n` points, `n(n-1)/2`.
#[inline]
pub const fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// An unordered pair `(i, j)` with `i < j`, laid out row-major over `i < j`:
/// `(0,1), (0,2), …, (0,n-1), (1,2), …`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairIndex {
    i: usize,
    j: usize,
}

impl PairIndex {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i >= j {
            return Err(param(format!("pair index requires i < j, got ({i}, {j})")));
        }
        Ok(Self { i, j })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// Linear offset of this pair in a length-`num_pairs(n)` array.
    pub fn offset(&self, n: usize) -> Result<usize> {
        pair_offset(self.i, self.j, n)
    }
}

/// Row-major linear offset of the pair `(i, j)`, `i < j < n`.
pub fn pair_offset(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j {
        return Err(param(format!("pair index requires i < j, got ({i}, {j})")));
    }
    if j >= n {
        return Err(param(format!("pair ({i}, {j}) out of range for order {n}")));
    }
    Ok(offset_unchecked(i, j, n))
}

#[inline]
pub(crate) fn offset_unchecked(i: usize, j: usize, n: usize) -> usize {
    // rows before i contribute (n-1) + (n-2) + … + (n-i) entries
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_offset`].
pub fn pair_from_offset(offset: usize, n: usize) -> Result<(usize, usize)> {
    if offset >= num_pairs(n) {
        return Err(param(format!("offset {offset} out of range for order {n} ({} pairs)", num_pairs(n))));
    }
    let mut rest = offset;
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if rest < row {
            return Ok((i, i + 1 + rest));
        }
        rest -= row;
        i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_and_last_pair() {
        assert_eq!(pair_offset(0, 1, 4).unwrap(), 0);
        assert_eq!(pair_offset(2, 3, 4).unwrap(), 5);
        assert_eq!(num_pairs(4), 6);
    }

    #[test]
    fn round_trip_is_a_bijection() {
        for n in 2..=12 {
            let mut seen = vec![false; num_pairs(n)];
            for i in 0..n {
                for j in i + 1..n {
                    let k = pair_offset(i, j, n).unwrap();
                    assert!(!seen[k]);
                    seen[k] = true;
                    assert_eq!(pair_from_offset(k, n).unwrap(), (i, j));
                }
            }
            assert!(seen.into_iter().all(|s| s));
        }
    }

    #[test]
    fn rejects_unordered_pairs() {
        assert!(pair_offset(2, 2, 4).is_err());
        assert!(pair_offset(3, 1, 4).is_err());
        assert!(pair_offset(1, 4, 4).is_err());
        assert!(PairIndex::new(1, 0).is_err());
        assert!(pair_from_offset(6, 4).is_err());
    }
}
