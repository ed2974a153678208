use smallvec::SmallVec;

/// Set of world indices of one model, stored as a bitset.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WorldSet {
    words: SmallVec<[u64; 1]>,
}

impl WorldSet {
    pub fn empty(n: usize) -> WorldSet {
        WorldSet {
            words: SmallVec::from_elem(0, n.div_ceil(64).max(1)),
        }
    }

    pub fn full(n: usize) -> WorldSet {
        let mut s = WorldSet::empty(n);
        for w in 0..n {
            s.insert(w);
        }
        s
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> WorldSet {
        let mut s = WorldSet::empty(n);
        for w in idx {
            s.insert(w);
        }
        s
    }

    pub fn insert(&mut self, w: usize) {
        self.words[w / 64] |= 1 << (w % 64);
    }

    pub fn contains(&self, w: usize) -> bool {
        self.words
            .get(w / 64)
            .is_some_and(|x| x & (1 << (w % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&x| x == 0)
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union(mut self, other: &WorldSet) -> WorldSet {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        self
    }

    pub fn intersect(mut self, other: &WorldSet) -> WorldSet {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        self
    }

    /// Complement relative to the first `n` worlds.
    pub fn complement(mut self, n: usize) -> WorldSet {
        for (k, a) in self.words.iter_mut().enumerate() {
            let lo = k * 64;
            let live = n.saturating_sub(lo).min(64);
            let mask = if live == 64 {
                u64::MAX
            } else {
                (1u64 << live) - 1
            };
            *a = !*a & mask;
        }
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &word)| {
            (0..64)
                .filter(move |b| word & (1 << b) != 0)
                .map(move |b| k * 64 + b)
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}
