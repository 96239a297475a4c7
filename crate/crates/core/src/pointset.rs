//! Dense bitsets over the points of one space.
//!
//! Interval tables, halfspace sides and hull iterations all work on these;
//! the unique-median check is three word-wise intersections per triple.

use crate::space::PointId;
use std::fmt;

/// A subset of the points `0..universe` of a fixed space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    words: Vec<u64>,
    universe: usize,
}

impl PointSet {
    pub fn empty(universe: usize) -> PointSet {
        PointSet {
            words: vec![0; universe.div_ceil(64)],
            universe,
        }
    }

    pub fn full(universe: usize) -> PointSet {
        let mut s = PointSet::empty(universe);
        for w in &mut s.words {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn singleton(universe: usize, p: PointId) -> PointSet {
        let mut s = PointSet::empty(universe);
        s.insert(p);
        s
    }

    pub fn from_iter<I: IntoIterator<Item = PointId>>(universe: usize, iter: I) -> PointSet {
        let mut s = PointSet::empty(universe);
        for p in iter {
            s.insert(p);
        }
        s
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.universe;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0 >> extra;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, p: PointId) {
        let i = p.index();
        debug_assert!(i < self.universe);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, p: PointId) {
        let i = p.index();
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, p: PointId) -> bool {
        let i = p.index();
        i < self.universe && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// The member with the smallest id, if any.
    pub fn first(&self) -> Option<PointId> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(PointId::new(i * 64 + w.trailing_zeros() as usize));
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(PointId::new(i * 64 + b))
                }
            })
        })
    }

    pub fn union_with(&mut self, other: &PointSet) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s
    }

    pub fn complement(&self) -> PointSet {
        let mut s = self.clone();
        for w in &mut s.words {
            *w = !*w;
        }
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        !self.intersects(other)
    }

    /// Size of the three-way intersection without allocating.
    pub fn count_common3(&self, b: &PointSet, c: &PointSet) -> usize {
        self.words
            .iter()
            .zip(&b.words)
            .zip(&c.words)
            .map(|((x, y), z)| (x & y & z).count_ones() as usize)
            .sum()
    }

    /// The unique member of the three-way intersection, if it has exactly one.
    pub fn sole_common3(&self, b: &PointSet, c: &PointSet) -> Option<PointId> {
        let mut found: Option<PointId> = None;
        for (i, ((x, y), z)) in self.words.iter().zip(&b.words).zip(&c.words).enumerate() {
            let mut w = x & y & z;
            while w != 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(PointId::new(i * 64 + w.trailing_zeros() as usize));
                w &= w - 1;
            }
        }
        found
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|p| p.index())).finish()
    }
}
