//! The cubical subdivision `K_k^n` of the unit cube.
//!
//! A grid with `k` subdivisions per axis has `k^n` closed cells. Cell indices
//! are 1-based: index `i_s` on axis `s` denotes the interval `[(i_s-1)/k, i_s/k]`.
//! Cells are stored row-major with axis 1 varying fastest. All coordinates
//! here are exact rationals `j/k`; nothing in this module touches floating
//! point.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest grid the engines accept, in cells.
pub const MAX_CELLS: usize = 1 << 28;

/// Largest supported dimension.
pub const MAX_DIM: usize = 12;

/// Default guard on the number of faces enumerated by [`FaceLattice`].
pub const FACE_LATTICE_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    k: usize,
}

/// A closed cell of the grid, addressed by its 1-based multi-index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cell {
    index: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

/// One of the `2n` facets of the cube: `{z_axis = 0}` for `Minus`,
/// `{z_axis = 1}` for `Plus`. Axes are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceId {
    pub axis: usize,
    pub sign: Sign,
}

impl FaceId {
    pub fn new(axis: usize, sign: Sign) -> Self {
        FaceId { axis, sign }
    }

    pub fn opposite(self) -> Self {
        FaceId { axis: self.axis, sign: self.sign.opposite() }
    }
}

/// Per-axis extent of a [`GridFace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    /// The single coordinate `j/k`, `0 <= j <= k`.
    Fixed(usize),
    /// The interval `[(j-1)/k, j/k]`, `1 <= j <= k`.
    Span(usize),
}

/// A face of the grid: a product of per-axis extents, each either a grid
/// coordinate or a grid interval.
///
/// Internally each axis is a code in `0..=2k`: even codes `2j` are the fixed
/// coordinate `j/k`, odd codes `2j-1` the interval `[(j-1)/k, j/k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridFace {
    codes: Vec<usize>,
}

impl GridSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("dimension n must be at least 1"));
        }
        if n > MAX_DIM {
            return Err(Error::usage(format!("dimension {n} exceeds the supported maximum {MAX_DIM}")));
        }
        if k == 0 {
            return Err(Error::usage("subdivision k must be at least 1"));
        }
        let mut count: usize = 1;
        for _ in 0..n {
            count = count
                .checked_mul(k)
                .filter(|&c| c <= MAX_CELLS)
                .ok_or_else(|| Error::SizeGuard {
                    what: format!("grid n={n}, k={k}"),
                    size: (k as u128).saturating_pow(n as u32),
                    limit: MAX_CELLS as u128,
                })?;
        }
        Ok(GridSpec { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cell_count(&self) -> usize {
        self.k.pow(self.n as u32)
    }

    pub fn vertex_count(&self) -> usize {
        (self.k + 1).pow(self.n as u32)
    }

    pub fn cell(&self, index: &[usize]) -> Result<Cell> {
        if index.len() != self.n {
            return Err(Error::usage(format!(
                "cell {:?} has {} coordinates, grid has dimension {}",
                index,
                index.len(),
                self.n
            )));
        }
        if let Some(bad) = index.iter().find(|&&i| i == 0 || i > self.k) {
            return Err(Error::usage(format!(
                "cell {:?}: coordinate {} outside [1, {}]",
                index, bad, self.k
            )));
        }
        Ok(Cell { index: index.to_vec() })
    }

    /// The cell at a row-major position (axis 1 fastest).
    pub fn cell_at(&self, linear: usize) -> Cell {
        debug_assert!(linear < self.cell_count());
        let mut rest = linear;
        let index = (0..self.n)
            .map(|_| {
                let i = rest % self.k + 1;
                rest /= self.k;
                i
            })
            .collect();
        Cell { index }
    }

    pub fn linear(&self, cell: &Cell) -> usize {
        cell.index
            .iter()
            .rev()
            .fold(0, |acc, &i| acc * self.k + (i - 1))
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cell_count()).map(move |l| self.cell_at(l))
    }

    pub fn check_cell(&self, cell: &Cell) -> Result<()> {
        self.cell(&cell.index).map(|_| ())
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis == 0 || axis > self.n {
            return Err(Error::usage(format!("axis {axis} outside [1, {}]", self.n)));
        }
        Ok(())
    }

    /// Dimension of `a ∩ b`, with `-1` for the empty intersection.
    pub fn intersection_dim(&self, a: &Cell, b: &Cell) -> Result<isize> {
        self.check_cell(a)?;
        self.check_cell(b)?;
        let mut dim = 0isize;
        for (&x, &y) in a.index.iter().zip(&b.index) {
            match x.abs_diff(y) {
                0 => dim += 1,
                1 => {}
                _ => return Ok(-1),
            }
        }
        Ok(dim)
    }

    /// The closed face `a ∩ b`, or `None` when the cells are disjoint.
    pub fn shared_face(&self, a: &Cell, b: &Cell) -> Result<Option<GridFace>> {
        if self.intersection_dim(a, b)? < 0 {
            return Ok(None);
        }
        let codes = a
            .index
            .iter()
            .zip(&b.index)
            .map(|(&x, &y)| if x == y { 2 * x - 1 } else { 2 * x.min(y) })
            .collect();
        Ok(Some(GridFace { codes }))
    }

    pub fn touches_face(&self, cell: &Cell, face: FaceId) -> Result<bool> {
        self.check_cell(cell)?;
        self.check_axis(face.axis)?;
        let i = cell.index[face.axis - 1];
        Ok(match face.sign {
            Sign::Minus => i == 1,
            Sign::Plus => i == self.k,
        })
    }

    /// Minimum shared-face dimension between consecutive cells of a color-`i`
    /// chain: `i - 1`. Chains with this threshold are exactly the chains that
    /// avoid the `(i-2)`-skeleton.
    pub fn adjacency_threshold(&self, i: usize) -> Result<usize> {
        self.check_axis(i)?;
        Ok(i - 1)
    }

    pub fn face_lattice(&self) -> Result<FaceLattice> {
        FaceLattice::with_limit(*self, FACE_LATTICE_LIMIT)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, k={}", self.n, self.k)
    }
}

impl Cell {
    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (s, i) in self.index.iter().enumerate() {
            if s > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

impl GridFace {
    /// Builds a face from per-axis extents; `k` bounds the coordinates.
    pub fn from_extents(k: usize, extents: &[Extent]) -> Result<Self> {
        let codes = extents
            .iter()
            .map(|e| match *e {
                Extent::Fixed(j) if j <= k => Ok(2 * j),
                Extent::Span(j) if (1..=k).contains(&j) => Ok(2 * j - 1),
                other => Err(Error::usage(format!("extent {other:?} outside grid k={k}"))),
            })
            .collect::<Result<_>>()?;
        Ok(GridFace { codes })
    }

    /// The full cell viewed as its own top-dimensional face.
    pub fn of_cell(cell: &Cell) -> Self {
        GridFace { codes: cell.index.iter().map(|&i| 2 * i - 1).collect() }
    }

    pub(crate) fn from_codes(codes: Vec<usize>) -> Self {
        GridFace { codes }
    }

    pub(crate) fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn extent(&self, axis: usize) -> Extent {
        let c = self.codes[axis - 1];
        if c % 2 == 0 {
            Extent::Fixed(c / 2)
        } else {
            Extent::Span((c + 1) / 2)
        }
    }

    pub fn dimension(&self) -> usize {
        self.codes.iter().filter(|&&c| c % 2 == 1).count()
    }

    /// Whether the face lies in the `i`-skeleton. `Skel_{-1}` is empty.
    pub fn in_skeleton(&self, i: isize) -> bool {
        (self.dimension() as isize) <= i
    }

    /// `self ⊆ other`.
    pub fn is_subface_of(&self, other: &GridFace) -> bool {
        self.codes.len() == other.codes.len()
            && self.codes.iter().zip(&other.codes).all(|(&a, &b)| {
                a == b || (b % 2 == 1 && a % 2 == 0 && (a + 1 == b || a == b + 1))
            })
    }

    /// Whether the face lies in the hyperplane of a cube facet.
    pub fn lies_on(&self, face: FaceId, k: usize) -> bool {
        let c = self.codes[face.axis - 1];
        match face.sign {
            Sign::Minus => c == 0,
            Sign::Plus => c == 2 * k,
        }
    }

    /// Whether the point with coordinates `nums[s] / den` lies in the relative
    /// interior of this face of a grid with `k` subdivisions.
    pub fn relint_contains(&self, k: usize, nums: &[u64], den: u64) -> bool {
        let (k, den) = (k as u128, den as u128);
        self.codes.iter().zip(nums).all(|(&c, &x)| {
            // compare x/den against j/k via x*k vs j*den
            let xk = x as u128 * k;
            if c % 2 == 0 {
                xk == (c as u128 / 2) * den
            } else {
                let j = (c as u128 + 1) / 2;
                (j - 1) * den < xk && xk < j * den
            }
        })
    }
}

impl fmt::Display for GridFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (s, &c) in self.codes.iter().enumerate() {
            if s > 0 {
                write!(f, " x ")?;
            }
            if c % 2 == 0 {
                write!(f, "{{{}}}", c / 2)?;
            } else {
                write!(f, "[{},{}]", (c - 1) / 2, (c + 1) / 2)?;
            }
        }
        write!(f, "]/k")
    }
}

/// Enumeration of every face of a grid, `(2k+1)^n` in total.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    spec: GridSpec,
    count: usize,
}

impl FaceLattice {
    pub fn with_limit(spec: GridSpec, limit: u128) -> Result<Self> {
        let size = (2 * spec.k as u128 + 1).saturating_pow(spec.n as u32);
        if size > limit {
            return Err(Error::SizeGuard {
                what: format!("face lattice of grid {spec}"),
                size,
                limit,
            });
        }
        Ok(FaceLattice { spec, count: size as usize })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Position of a face in the enumeration order (axis 1 fastest).
    pub fn position(&self, face: &GridFace) -> usize {
        let base = 2 * self.spec.k + 1;
        face.codes.iter().rev().fold(0, |acc, &c| acc * base + c)
    }

    pub fn face_at(&self, position: usize) -> GridFace {
        let base = 2 * self.spec.k + 1;
        let mut rest = position;
        let codes = (0..self.spec.n)
            .map(|_| {
                let c = rest % base;
                rest /= base;
                c
            })
            .collect();
        GridFace { codes }
    }

    pub fn iter(&self) -> impl Iterator<Item = GridFace> + '_ {
        (0..self.count).map(move |p| self.face_at(p))
    }

    pub fn contains(&self, inner: &GridFace, outer: &GridFace) -> bool {
        inner.is_subface_of(outer)
    }
}
