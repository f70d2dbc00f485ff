use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::grid::{Cell, GridSpec};

/// A subset of the cells of one grid, stored as a dense bit set in row-major
/// order. Its union is the closed set the connectivity predicates talk about.
///
/// Binary set operations panic when the operands belong to different grids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    spec: GridSpec,
    bits: FixedBitSet,
}

impl CellSet {
    pub fn empty(spec: GridSpec) -> Self {
        CellSet { spec, bits: FixedBitSet::with_capacity(spec.cell_count()) }
    }

    pub fn full(spec: GridSpec) -> Self {
        let mut s = Self::empty(spec);
        s.bits.insert_range(..);
        s
    }

    pub fn from_cells<'a>(spec: GridSpec, cells: impl IntoIterator<Item = &'a Cell>) -> Result<Self> {
        let mut s = Self::empty(spec);
        for c in cells {
            s.insert(c)?;
        }
        Ok(s)
    }

    /// Builds a set from 1-based multi-indices.
    pub fn from_indices(spec: GridSpec, indices: &[&[usize]]) -> Result<Self> {
        let mut s = Self::empty(spec);
        for idx in indices {
            s.insert(&spec.cell(idx)?)?;
        }
        Ok(s)
    }

    pub fn from_linear(spec: GridSpec, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(spec);
        for l in cells {
            s.bits.insert(l);
        }
        s
    }

    pub fn from_fn(spec: GridSpec, mut member: impl FnMut(usize) -> bool) -> Self {
        let mut s = Self::empty(spec);
        for l in 0..spec.cell_count() {
            if member(l) {
                s.bits.insert(l);
            }
        }
        s
    }

    /// Decodes the bits of `mask` as membership of cells `0..cell_count`.
    pub fn from_mask(spec: GridSpec, mask: u64) -> Self {
        Self::from_fn(spec, |l| l < 64 && (mask >> l) & 1 == 1)
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.spec.check_cell(cell).is_ok() && self.bits.contains(self.spec.linear(cell))
    }

    #[inline]
    pub fn contains_linear(&self, linear: usize) -> bool {
        self.bits.contains(linear)
    }

    pub fn insert(&mut self, cell: &Cell) -> Result<()> {
        self.spec.check_cell(cell).map_err(|e| match e {
            Error::Usage(m) => Error::usage(format!("cannot insert into grid {}: {m}", self.spec)),
            other => other,
        })?;
        self.bits.insert(self.spec.linear(cell));
        Ok(())
    }

    pub fn insert_linear(&mut self, linear: usize) {
        self.bits.insert(linear);
    }

    pub fn remove_linear(&mut self, linear: usize) {
        self.bits.set(linear, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.spec.cell_count()
    }

    pub fn iter_linear(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.bits.ones().map(|l| self.spec.cell_at(l)).collect()
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.same_grid(other);
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.same_grid(other);
        self.bits.is_disjoint(&other.bits)
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        self.same_grid(other);
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        CellSet { spec: self.spec, bits }
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        self.same_grid(other);
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        CellSet { spec: self.spec, bits }
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.same_grid(other);
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        CellSet { spec: self.spec, bits }
    }

    pub fn complement(&self) -> CellSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        CellSet { spec: self.spec, bits }
    }

    fn same_grid(&self, other: &CellSet) {
        assert_eq!(self.spec, other.spec, "cell sets from different grids");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra() {
        let spec = GridSpec::new(2, 2).unwrap();
        let a = CellSet::from_indices(spec, &[&[1, 1], &[2, 1]]).unwrap();
        let b = CellSet::from_indices(spec, &[&[2, 1], &[2, 2]]).unwrap();
        assert_eq!(a.union(&b).len(), 3);
        assert_eq!(a.intersection(&b).cells(), vec![spec.cell(&[2, 1]).unwrap()]);
        assert_eq!(a.difference(&b).cells(), vec![spec.cell(&[1, 1]).unwrap()]);
        assert_eq!(a.complement().len(), 2);
        assert!(a.complement().complement() == a);
        assert!(CellSet::full(spec).is_full());
        assert!(CellSet::empty(spec).is_empty());
        assert!(a.intersection(&b).is_subset(&a));
    }

    #[test]
    fn insert_rejects_out_of_grid_cells() {
        let spec = GridSpec::new(2, 2).unwrap();
        let mut s = CellSet::empty(spec);
        let other = GridSpec::new(2, 3).unwrap().cell(&[3, 3]).unwrap();
        assert!(s.insert(&other).is_err());
        assert!(!s.contains(&other));
    }

    #[test]
    fn mask_decoding() {
        let spec = GridSpec::new(2, 2).unwrap();
        let s = CellSet::from_mask(spec, 0b1001);
        assert_eq!(s.cells(), vec![spec.cell(&[1, 1]).unwrap(), spec.cell(&[2, 2]).unwrap()]);
    }
}
