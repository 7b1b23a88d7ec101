/// Dense set of points `0..capacity`, used for disjointness and partition checks.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
}

impl PointSet {
    pub fn with_capacity(n: usize) -> Self {
        Self { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::with_capacity(n);
        for p in 0..n {
            s.insert(p as u32);
        }
        s
    }

    pub fn from_points(n: usize, pts: impl IntoIterator<Item = u32>) -> Self {
        let mut s = Self::with_capacity(n);
        for p in pts {
            s.insert(p);
        }
        s
    }

    fn grow(&mut self, p: u32) {
        let w = p as usize / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
    }

    /// Inserts `p`; returns false if it was already present.
    pub fn insert(&mut self, p: u32) -> bool {
        self.grow(p);
        let (w, b) = (p as usize / 64, p % 64);
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, p: u32) {
        let (w, b) = (p as usize / 64, p % 64);
        if let Some(word) = self.words.get_mut(w) {
            *word &= !(1 << b);
        }
    }

    pub fn contains(&self, p: u32) -> bool {
        let (w, b) = (p as usize / 64, p % 64);
        self.words.get(w).is_some_and(|x| x >> b & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64u32).filter(move |b| w >> b & 1 == 1).map(move |b| i as u32 * 64 + b))
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn same_members(&self, other: &PointSet) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut s = PointSet::with_capacity(10);
        assert!(s.insert(3));
        assert!(!s.insert(3));
        assert!(s.insert(130));
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 130]);
        let t = PointSet::from_points(200, [3, 130, 5]);
        assert!(s.is_subset(&t));
        assert!(!t.is_subset(&s));
        s.remove(3);
        assert!(!s.contains(3));
        assert!(!s.is_disjoint(&t));
        assert!(PointSet::from_points(4, [0, 1]).is_disjoint(&PointSet::from_points(4, [2])));
    }
}
