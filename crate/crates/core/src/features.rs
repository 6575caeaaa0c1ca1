use std::fmt;

/// Most features a [`FeatureSet`] can hold.
pub const MAX_FEATURES: usize = 64;

/// A subset of the feature indices `0..m`, stored as a bitmask.
///
/// Indices are 0-based internally; rendering and serialized forms use the
/// 1-based feature ids.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const EMPTY: FeatureSet = FeatureSet(0);

    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_FEATURES);
        if m == MAX_FEATURES {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << m) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        FeatureSet(1 << i)
    }

    /// Builds a set from 1-based feature ids.
    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        ids.into_iter().map(|id| id - 1).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_FEATURES && self.0 & (1 << i) != 0
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        FeatureSet(self.0 | (1 << i))
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        FeatureSet(self.0 & !(1 << i))
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: FeatureSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: FeatureSet) -> bool {
        self.0 & other.0 != 0
    }

    #[must_use]
    pub fn union(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & !other.0)
    }

    /// Complement relative to `0..m`.
    #[must_use]
    pub fn complement(self, m: usize) -> Self {
        FeatureSet::full(m).difference(self)
    }

    /// 0-based indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// 1-based ids in ascending order.
    pub fn ids(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Every subset of `0..m`, in bitmask order.
    pub fn all_subsets(m: usize) -> impl Iterator<Item = FeatureSet> {
        assert!(m < MAX_FEATURES, "subset iteration needs m < 64");
        (0..1u64 << m).map(FeatureSet)
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = FeatureSet::EMPTY;
        for i in iter {
            set.insert(i);
        }
        set
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, id) in self.ids().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical order for reporting collections of sets: by size, then by the
/// sorted id lists.
pub fn canonical_cmp(a: &FeatureSet, b: &FeatureSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.ids().cmp(&b.ids()))
}
