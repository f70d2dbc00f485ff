//! Reference semantics through the face lattice.
//!
//! `I^n` is the disjoint union of the relative interiors of its grid faces.
//! A face lies in `∪S` iff it is a face of some member cell; the faces not in
//! `∪S` form an up-closed family whose relative interiors make up the open
//! complement. Connectivity of either set is connectivity of the containment
//! graph on the corresponding faces. Everything here enumerates faces
//! explicitly and shares no code with [`crate::topology`].

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::cellset::CellSet;
use crate::error::Result;
use crate::grid::{Cell, FaceId, FaceLattice, GridFace, Sign};
use crate::topology;

/// Faces selected by a predicate, with the containment edges between them.
pub struct FaceGraph {
    lattice: FaceLattice,
    included: Vec<bool>,
    sets: UnionFind<usize>,
}

impl FaceGraph {
    pub fn new(lattice: FaceLattice, select: impl Fn(&GridFace) -> bool) -> Self {
        let included: Vec<bool> = lattice.iter().map(|f| select(&f)).collect();
        let mut sets = UnionFind::new(lattice.len());
        let k2 = 2 * lattice.spec().k();
        for (pos, face) in lattice.iter().enumerate() {
            if !included[pos] {
                continue;
            }
            // cover relations: widen one fixed coordinate to an adjacent span
            for (s, &c) in face.codes().iter().enumerate() {
                if c % 2 == 1 {
                    continue;
                }
                for up in [c.checked_sub(1), Some(c + 1).filter(|&u| u <= k2)].into_iter().flatten() {
                    let mut codes = face.codes().to_vec();
                    codes[s] = up;
                    let other = lattice.position(&GridFace::from_codes(codes));
                    if included[other] {
                        sets.union(pos, other);
                    }
                }
            }
        }
        FaceGraph { lattice, included, sets }
    }

    pub fn contains(&self, face: &GridFace) -> bool {
        self.included[self.lattice.position(face)]
    }

    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for f in self.lattice.iter().filter(|f| self.contains(f)) {
            for g in self.lattice.iter().filter(|g| self.contains(g)) {
                if f != g && f.is_subface_of(&g) {
                    count += 1;
                }
            }
        }
        count
    }

    /// True if some component of the included faces meets both facets
    /// normal to `axis`. Components without a full cell count too.
    pub fn spans_axis(&self, axis: usize) -> bool {
        let k = self.lattice.spec().k();
        let (lo, hi) = (FaceId::new(axis, Sign::Minus), FaceId::new(axis, Sign::Plus));
        let mut low_roots = Vec::new();
        for face in self.lattice.iter().filter(|f| self.contains(f) && f.lies_on(lo, k)) {
            low_roots.push(self.root(&face));
        }
        self.lattice
            .iter()
            .filter(|f| self.contains(f) && f.lies_on(hi, k))
            .any(|f| low_roots.contains(&self.root(&f)))
    }

    fn root(&self, face: &GridFace) -> usize {
        self.sets.find(self.lattice.position(face))
    }

    /// Groups the top-dimensional faces (cells) that are included, by
    /// component, with the cube facets each component meets.
    fn cell_components(&self) -> Vec<(Vec<Cell>, Vec<FaceId>)> {
        let spec = self.lattice.spec();
        let n = spec.n();
        let mut roots: Vec<usize> = Vec::new();
        let mut groups: Vec<(Vec<Cell>, Vec<FaceId>)> = Vec::new();
        for cell in spec.cells() {
            let face = GridFace::of_cell(&cell);
            if !self.contains(&face) {
                continue;
            }
            let r = self.root(&face);
            match roots.iter().position(|&x| x == r) {
                Some(i) => groups[i].0.push(cell),
                None => {
                    roots.push(r);
                    groups.push((vec![cell], Vec::new()));
                }
            }
        }
        let k = spec.k();
        for face in self.lattice.iter().filter(|f| self.contains(f)) {
            let r = self.root(&face);
            // every included face lies under an included cell, so r is known
            let Some(g) = roots.iter().position(|&x| x == r) else { continue };
            for axis in 1..=n {
                for sign in [Sign::Minus, Sign::Plus] {
                    let id = FaceId::new(axis, sign);
                    if face.lies_on(id, k) && !groups[g].1.contains(&id) {
                        groups[g].1.push(id);
                    }
                }
            }
        }
        for g in &mut groups {
            g.1.sort_by_key(|f| (f.axis, f.sign == Sign::Plus));
        }
        groups
    }
}

fn in_union(set: &CellSet, face: &GridFace) -> bool {
    set.cells().iter().any(|c| face.is_subface_of(&GridFace::of_cell(c)))
}

fn closed_graph(set: &CellSet) -> Result<FaceGraph> {
    let lattice = set.spec().face_lattice()?;
    Ok(FaceGraph::new(lattice, |f| in_union(set, f)))
}

fn open_graph(set: &CellSet) -> Result<FaceGraph> {
    let lattice = set.spec().face_lattice()?;
    Ok(FaceGraph::new(lattice, |f| !in_union(set, f)))
}

/// Components of `∪S`, as partitions of the member cells.
pub fn oracle_closed_components(set: &CellSet) -> Result<Vec<Vec<Cell>>> {
    Ok(closed_graph(set)?.cell_components().into_iter().map(|(c, _)| c).collect())
}

/// Components of the open complement, projected to non-member cells, with the
/// cube facets each meets.
pub fn oracle_complement_components(set: &CellSet) -> Result<Vec<topology::ComplementComponent>> {
    Ok(open_graph(set)?
        .cell_components()
        .into_iter()
        .map(|(cells, touches)| topology::ComplementComponent { cells, touches })
        .collect())
}

fn spans(touches: &[FaceId], axis: usize) -> bool {
    touches.contains(&FaceId::new(axis, Sign::Minus)) && touches.contains(&FaceId::new(axis, Sign::Plus))
}

pub fn oracle_connects(set: &CellSet, axis: usize) -> Result<bool> {
    set.spec().check_axis(axis)?;
    Ok(closed_graph(set)?.cell_components().iter().any(|(_, t)| spans(t, axis)))
}

pub fn oracle_separates(set: &CellSet, axis: usize) -> Result<bool> {
    set.spec().check_axis(axis)?;
    Ok(!open_graph(set)?.cell_components().iter().any(|(_, t)| spans(t, axis)))
}

/// Whether the point-set intersection `∩ ∪A_j` connects the facets normal to
/// `axis`. This is generally larger than the union of the common cells, since
/// cells from different sets may only share a lower-dimensional face.
pub fn oracle_intersection_connects(sets: &[CellSet], axis: usize) -> Result<bool> {
    let Some(first) = sets.first() else {
        return Err(crate::error::Error::usage("need at least one cell set"));
    };
    let spec = first.spec();
    spec.check_axis(axis)?;
    if sets.iter().any(|s| s.spec() != spec) {
        return Err(crate::error::Error::usage("cell sets live on different grids"));
    }
    let graph = FaceGraph::new(spec.face_lattice()?, |f| sets.iter().all(|s| in_union(s, f)));
    Ok(graph.spans_axis(axis))
}

/// Outcome of comparing the fast engine with the oracle on one cell set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub cells: Vec<Cell>,
    pub what: String,
}

/// Compares closed components (with `d = 0`), complement components and
/// their facet contacts between the engine and the oracle.
pub fn compare_with_engine(set: &CellSet) -> Result<Option<Mismatch>> {
    let spec = set.spec();
    let closed_fast = topology::components(set, 0)?;
    let closed_ref = oracle_closed_components(set)?;
    let mismatch = |what: String| Ok(Some(Mismatch { cells: set.cells(), what }));
    if closed_fast != closed_ref {
        return mismatch(format!("closed components differ: engine {closed_fast:?}, oracle {closed_ref:?}"));
    }
    let closed_touch = closed_graph(set)?.cell_components();
    let open_ref = oracle_complement_components(set)?;
    let open_fast = topology::complement_components(set);
    if open_fast != open_ref {
        return mismatch(format!("complement components differ: engine {open_fast:?}, oracle {open_ref:?}"));
    }
    for axis in 1..=spec.n() {
        let fast = topology::separates(set, axis)?.is_some();
        let reference = !open_ref.iter().any(|c| spans(&c.touches, axis));
        if fast != reference {
            return mismatch(format!("separates on axis {axis}: engine {fast}, oracle {reference}"));
        }
        let fast = topology::connects(set, axis, 0)?.is_some();
        let reference = closed_touch.iter().any(|(_, t)| spans(t, axis));
        if fast != reference {
            return mismatch(format!("connects on axis {axis}: engine {fast}, oracle {reference}"));
        }
    }
    Ok(None)
}
