//! Word-packed point sets and the dense collinearity matrix.

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// A subset of `0..capacity`, one bit per point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
    capacity: usize,
}

impl std::fmt::Debug for PointSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl PointSet {
    pub fn new(capacity: usize) -> Self {
        PointSet {
            words: vec![0; words_for(capacity)],
            capacity,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = PointSet {
            words: vec![!0; words_for(capacity)],
            capacity,
        };
        s.trim();
        s
    }

    pub fn from_indices(capacity: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = PointSet::new(capacity);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub(crate) fn from_words(words: Vec<u64>, capacity: usize) -> Self {
        debug_assert_eq!(words.len(), words_for(capacity));
        let mut s = PointSet { words, capacity };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let rem = self.capacity % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.capacity && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    /// Returns true if `i` was newly inserted.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(i < self.capacity, "point {i} out of range {}", self.capacity);
        let w = &mut self.words[i / WORD];
        let bit = 1u64 << (i % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        if i >= self.capacity {
            return false;
        }
        let w = &mut self.words[i / WORD];
        let bit = 1u64 << (i % WORD);
        let had = *w & bit != 0;
        *w &= !bit;
        had
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with_words(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a |= b;
        }
    }

    pub fn union_with(&mut self, other: &PointSet) {
        self.union_with_words(&other.words);
    }

    pub fn intersect_with_words(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        self.intersect_with_words(&other.words);
    }

    pub fn difference_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn complement(&self) -> PointSet {
        let words = self.words.iter().map(|w| !w).collect();
        PointSet::from_words(words, self.capacity)
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        and_count(&self.words, &other.words)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The `n`-th smallest member, if there are more than `n`.
    pub fn nth(&self, mut n: usize) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            let c = w.count_ones() as usize;
            if n < c {
                let mut w = w;
                for _ in 0..n {
                    w &= w - 1;
                }
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
            n -= c;
        }
        None
    }
}

/// Popcount of `a & b`.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Popcount of `a & b & c`.
#[inline]
pub fn and3_count(a: &[u64], b: &[u64], c: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (x & y & z).count_ones() as usize)
        .sum()
}

/// Square symmetric bit matrix stored row-major in one allocation.
#[derive(Clone)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix {
            n,
            stride,
            words: vec![0; n * stride],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.words[i * self.stride + j / WORD] |= 1u64 << (j % WORD);
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    pub fn bytes(&self) -> usize {
        self.words.len() * 8
    }
}
