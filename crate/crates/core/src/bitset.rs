//! Edge indexing and a plain bitset over edge indices.

/// Number of unordered pairs on `n` vertices.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Rank of pair `(i, j)`, `i < j`, in lexicographic order.
#[inline]
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`edge_index`].
pub fn edge_pair(n: usize, mut index: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if index < row {
            return (i, i + 1 + index);
        }
        index -= row;
        i += 1;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    len: usize,
    words: Vec<u64>,
}

impl EdgeSet {
    pub fn new(len: usize) -> Self {
        EdgeSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn capacity(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Returns true if the bit was newly set.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let fresh = !self.contains(i);
        self.words[i / 64] |= 1 << (i % 64);
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_is_lexicographic_rank() {
        let n = 9;
        let mut expected = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(edge_index(n, i, j), expected);
                assert_eq!(edge_pair(n, expected), (i, j));
                expected += 1;
            }
        }
        assert_eq!(expected, pair_count(n));
    }

    #[test]
    fn edge_set_ops() {
        let mut s = EdgeSet::new(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert_eq!(s.count(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 129]);
        s.remove(0);
        assert!(!s.contains(0));
    }
}
