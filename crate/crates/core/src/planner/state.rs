/// Fixed-width bitset over a grounded atom universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    words: Box<[u64]>,
}

impl State {
    pub fn empty(atom_count: usize) -> Self {
        Self {
            words: vec![0; atom_count.div_ceil(64)].into_boxed_slice(),
        }
    }

    pub fn from_atoms(atom_count: usize, atoms: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(atom_count);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    #[inline]
    pub fn contains(&self, atom: usize) -> bool {
        self.words.get(atom / 64).is_some_and(|w| w & (1 << (atom % 64)) != 0)
    }

    #[inline]
    pub fn insert(&mut self, atom: usize) {
        self.words[atom / 64] |= 1 << (atom % 64);
    }

    #[inline]
    pub fn remove(&mut self, atom: usize) {
        self.words[atom / 64] &= !(1 << (atom % 64));
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b))
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_iter() {
        let mut s = State::empty(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert!(s.contains(64));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        s.remove(64);
        assert!(!s.contains(64));
        assert_eq!(s.len(), 2);
        assert!(!s.contains(1000));
    }
}
