//! Connect and separate predicates for unions of closed cells.
//!
//! A cell set `S` *connects* the `i`th opposite faces when some connected
//! piece of `∪S` meets both `{z_i = 0}` and `{z_i = 1}`. With a minimum shared
//! dimension `d`, only cells whose intersection has dimension at least `d`
//! count as linked; `d = 0` is ordinary connectivity of the closed union.
//!
//! `S` *separates* the `i`th faces when no component of the open complement
//! `I^n \ ∪S` meets both of them. Two complement cells `a`, `b` are linked
//! through the complement exactly when their shared face `F` is nonempty and
//! no member of `S` has `F` as a face: then the relative interior of `F`
//! survives in the complement, and every complement path crosses between cells
//! through such a relative interior. A complement cell touches the facet
//! `{z_i = 0}` iff its index on axis `i` is 1, since its own boundary facet
//! there belongs to no other cell.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::grid::{Cell, FaceId, GridFace, GridSpec, Sign};

const UNSET: u32 = u32::MAX;

/// A chain of cells `P_1, ..., P_r` from face `(axis, -)` to face `(axis, +)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub axis: usize,
    /// Minimum dimension required of every link `P_j ∩ P_{j+1}`.
    pub threshold: usize,
    pub cells: Vec<Cell>,
    /// `dim(P_j ∩ P_{j+1})` for each consecutive pair.
    pub link_dims: Vec<usize>,
}

/// Witness that a cell set separates the faces of one axis: the complement
/// cells split into components, none of which reaches both faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub axis: usize,
    pub components: Vec<Vec<Cell>>,
    /// Indices into `components` of those touching `(axis, -)`.
    pub touching_minus: Vec<usize>,
    /// Indices into `components` of those touching `(axis, +)`.
    pub touching_plus: Vec<usize>,
}

/// Precomputed neighbour offsets of a grid.
pub(crate) struct Stencil {
    n: usize,
    k: usize,
    offsets: Vec<Offset>,
}

struct Offset {
    /// Nonzero axes (0-based) with their step.
    moves: Vec<(usize, i8)>,
    linear: isize,
    /// Dimension of the shared face, i.e. the number of zero steps.
    shared_dim: usize,
    /// Linear offsets of the other cells containing the shared face.
    between: Vec<isize>,
}

impl Stencil {
    pub(crate) fn new(spec: GridSpec) -> Self {
        let (n, k) = (spec.n(), spec.k());
        let strides: Vec<isize> = (0..n).map(|s| (k as isize).pow(s as u32)).collect();
        let mut offsets = Vec::new();
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut rest = code;
            let delta: Vec<i8> = (0..n)
                .map(|_| {
                    let d = (rest % 3) as i8 - 1;
                    rest /= 3;
                    d
                })
                .collect();
            let moves: Vec<(usize, i8)> =
                delta.iter().enumerate().filter(|(_, &d)| d != 0).map(|(s, &d)| (s, d)).collect();
            if moves.is_empty() {
                continue;
            }
            let linear = moves.iter().map(|&(s, d)| d as isize * strides[s]).sum();
            let m = moves.len();
            let between = (1..(1usize << m) - 1)
                .map(|sub| {
                    moves
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| (sub >> b) & 1 == 1)
                        .map(|(_, &(s, d))| d as isize * strides[s])
                        .sum()
                })
                .collect();
            offsets.push(Offset { moves, linear, shared_dim: n - m, between });
        }
        Stencil { n, k, offsets }
    }

    #[inline]
    fn decode(&self, mut linear: usize, coords: &mut [usize]) {
        for c in coords.iter_mut().take(self.n) {
            *c = linear % self.k;
            linear /= self.k;
        }
    }

    #[inline]
    fn touch_mask(&self, coords: &[usize]) -> u64 {
        let mut mask = 0u64;
        for (s, &c) in coords.iter().enumerate().take(self.n) {
            if c == 0 {
                mask |= 1 << (2 * s);
            }
            if c + 1 == self.k {
                mask |= 1 << (2 * s + 1);
            }
        }
        mask
    }

    #[inline]
    fn in_range(&self, coords: &[usize], off: &Offset) -> bool {
        off.moves.iter().all(|&(s, d)| {
            let c = coords[s] as isize + d as isize;
            c >= 0 && (c as usize) < self.k
        })
    }

    /// Calls `visit(neighbour, shared_dim)` for every cell whose intersection
    /// with `linear` has dimension at least `min_dim`.
    #[inline]
    fn for_each_neighbour(
        &self,
        linear: usize,
        coords: &[usize],
        min_dim: usize,
        mut visit: impl FnMut(usize, usize, &Offset),
    ) {
        for off in &self.offsets {
            if off.shared_dim >= min_dim && self.in_range(coords, off) {
                visit((linear as isize + off.linear) as usize, off.shared_dim, off);
            }
        }
    }
}

/// Component labels of a cell set (or of its complement), with the facets
/// each component touches. Component ids follow the lowest row-major cell.
pub(crate) struct Labels {
    pub(crate) labels: Vec<u32>,
    /// Bit `2s` for facet `(s+1, -)`, bit `2s+1` for `(s+1, +)`.
    pub(crate) touches: Vec<u64>,
}

impl Labels {
    pub(crate) fn count(&self) -> usize {
        self.touches.len()
    }

    /// Whether some component meets both faces of `axis` (1-based).
    pub(crate) fn spans(&self, axis: usize) -> bool {
        let both = 0b11u64 << (2 * (axis - 1));
        self.touches.iter().any(|&t| t & both == both)
    }

    pub(crate) fn spans_mask(&self, n: usize) -> u64 {
        (1..=n).filter(|&i| self.spans(i)).fold(0, |m, i| m | 1 << (i - 1))
    }

    fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.count()];
        for (l, &c) in self.labels.iter().enumerate() {
            if c != UNSET {
                groups[c as usize].push(l);
            }
        }
        groups
    }
}

fn label(spec: GridSpec, stencil: &Stencil, member: impl Fn(usize) -> bool, linked: impl Fn(usize, &Offset) -> bool, min_dim: usize) -> Labels {
    let cells = spec.cell_count();
    let mut labels = vec![UNSET; cells];
    let mut touches = Vec::new();
    let mut queue = VecDeque::new();
    let mut coords = vec![0usize; spec.n()];
    for start in 0..cells {
        if labels[start] != UNSET || !member(start) {
            continue;
        }
        let id = touches.len() as u32;
        let mut mask = 0u64;
        labels[start] = id;
        queue.push_back(start);
        while let Some(cur) = queue.pop_front() {
            stencil.decode(cur, &mut coords);
            mask |= stencil.touch_mask(&coords);
            stencil.for_each_neighbour(cur, &coords, min_dim, |nb, _, off| {
                if labels[nb] == UNSET && member(nb) && linked(cur, off) {
                    labels[nb] = id;
                    queue.push_back(nb);
                }
            });
        }
        touches.push(mask);
    }
    Labels { labels, touches }
}

/// Components of `∪S` under links of dimension at least `min_dim`.
pub(crate) fn label_closed(set: &CellSet, min_dim: usize) -> Labels {
    let spec = set.spec();
    let stencil = Stencil::new(spec);
    label_closed_with(set, &stencil, min_dim)
}

pub(crate) fn label_closed_with(set: &CellSet, stencil: &Stencil, min_dim: usize) -> Labels {
    label(set.spec(), stencil, |l| set.contains_linear(l), |_, _| true, min_dim)
}

/// Components of the open complement `I^n \ ∪S`, projected to complement cells.
pub(crate) fn label_open(set: &CellSet) -> Labels {
    let stencil = Stencil::new(set.spec());
    label_open_with(set, &stencil)
}

pub(crate) fn label_open_with(set: &CellSet, stencil: &Stencil) -> Labels {
    label(
        set.spec(),
        stencil,
        |l| !set.contains_linear(l),
        |cur, off| {
            off.between
                .iter()
                .all(|&d| !set.contains_linear((cur as isize + d) as usize))
        },
        0,
    )
}

fn check_min_dim(spec: GridSpec, min_dim: usize) -> Result<()> {
    if min_dim > spec.n() {
        return Err(Error::usage(format!(
            "minimum shared dimension {min_dim} exceeds grid dimension {}",
            spec.n()
        )));
    }
    Ok(())
}

/// Maximal classes of `S` linked by intersections of dimension at least
/// `min_dim`, each sorted row-major, ordered by their lowest cell.
pub fn components(set: &CellSet, min_dim: usize) -> Result<Vec<Vec<Cell>>> {
    let spec = set.spec();
    check_min_dim(spec, min_dim)?;
    Ok(label_closed(set, min_dim)
        .groups()
        .into_iter()
        .map(|g| g.into_iter().map(|l| spec.cell_at(l)).collect())
        .collect())
}

/// The shortest chain through `S` from face `(axis, -)` to `(axis, +)` with
/// every link of dimension at least `min_dim`. Among shortest chains the one
/// whose row-major index sequence is lexicographically smallest is returned.
pub fn connects(set: &CellSet, axis: usize, min_dim: usize) -> Result<Option<Chain>> {
    let spec = set.spec();
    spec.check_axis(axis)?;
    check_min_dim(spec, min_dim)?;
    let stencil = Stencil::new(spec);
    let cells = spec.cell_count();
    let (minus, plus) = (1u64 << (2 * (axis - 1)), 1u64 << (2 * (axis - 1) + 1));
    let mut coords = vec![0usize; spec.n()];
    let touch = |l: usize, coords: &mut Vec<usize>| {
        stencil.decode(l, coords);
        stencil.touch_mask(coords)
    };

    // distance to the + face, computed backwards
    let mut dist = vec![u32::MAX; cells];
    let mut queue = VecDeque::new();
    for l in set.iter_linear() {
        if touch(l, &mut coords) & plus != 0 {
            dist[l] = 0;
            queue.push_back(l);
        }
    }
    while let Some(cur) = queue.pop_front() {
        stencil.decode(cur, &mut coords);
        let next = dist[cur] + 1;
        stencil.for_each_neighbour(cur, &coords, min_dim, |nb, _, _| {
            if dist[nb] == u32::MAX && set.contains_linear(nb) {
                dist[nb] = next;
                queue.push_back(nb);
            }
        });
    }

    let start = set
        .iter_linear()
        .filter(|&l| dist[l] != u32::MAX && touch(l, &mut coords) & minus != 0)
        .min_by_key(|&l| (dist[l], l));
    let Some(mut cur) = start else {
        return Ok(None);
    };
    let mut path = vec![cur];
    let mut link_dims = Vec::new();
    while dist[cur] > 0 {
        stencil.decode(cur, &mut coords);
        let mut best: Option<(usize, usize)> = None;
        stencil.for_each_neighbour(cur, &coords, min_dim, |nb, dim, _| {
            if set.contains_linear(nb) && dist[nb] + 1 == dist[cur] && best.map_or(true, |(b, _)| nb < b) {
                best = Some((nb, dim));
            }
        });
        let (nb, dim) = best.expect("BFS distances are consistent");
        path.push(nb);
        link_dims.push(dim);
        cur = nb;
    }
    Ok(Some(Chain {
        axis,
        threshold: min_dim,
        cells: path.into_iter().map(|l| spec.cell_at(l)).collect(),
        link_dims,
    }))
}

/// Whether complement cells `a` and `b` are linked through `I^n \ ∪S`: their
/// shared face is nonempty and is a face of no member of `S`.
pub fn complement_adjacent(a: &Cell, b: &Cell, set: &CellSet) -> Result<bool> {
    let spec = set.spec();
    if set.contains(a) || set.contains(b) {
        return Err(Error::usage(format!("complement adjacency asked for member cell {a} or {b}")));
    }
    if a == b {
        return Err(Error::usage(format!("complement adjacency asked for identical cells {a}")));
    }
    let Some(face) = spec.shared_face(a, b)? else {
        return Ok(false);
    };
    Ok(!set
        .iter_linear()
        .any(|l| face.is_subface_of(&GridFace::of_cell(&spec.cell_at(l)))))
}

/// Separation certificate for `axis`, if `S` separates its opposite faces.
pub fn separates(set: &CellSet, axis: usize) -> Result<Option<SeparationCertificate>> {
    let spec = set.spec();
    spec.check_axis(axis)?;
    let labels = label_open(set);
    if labels.spans(axis) {
        return Ok(None);
    }
    let (minus, plus) = (1u64 << (2 * (axis - 1)), 1u64 << (2 * (axis - 1) + 1));
    let touching = |bit: u64| {
        labels
            .touches
            .iter()
            .enumerate()
            .filter(|(_, &t)| t & bit != 0)
            .map(|(i, _)| i)
            .collect()
    };
    Ok(Some(SeparationCertificate {
        axis,
        touching_minus: touching(minus),
        touching_plus: touching(plus),
        components: labels
            .groups()
            .into_iter()
            .map(|g| g.into_iter().map(|l| spec.cell_at(l)).collect())
            .collect(),
    }))
}

/// A component of the open complement `I^n \ ∪S`, projected to the
/// complement cells it contains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementComponent {
    pub cells: Vec<Cell>,
    /// Cube facets the component meets, ordered by axis then sign.
    pub touches: Vec<FaceId>,
}

pub(crate) fn mask_to_faces(mask: u64, n: usize) -> Vec<FaceId> {
    (0..n)
        .flat_map(|s| [(s, Sign::Minus), (s, Sign::Plus)])
        .filter(|&(s, sign)| mask >> (2 * s + usize::from(sign == Sign::Plus)) & 1 == 1)
        .map(|(s, sign)| FaceId::new(s + 1, sign))
        .collect()
}

/// Components of the complement under [`complement_adjacent`], ordered by
/// their lowest cell.
pub fn complement_components(set: &CellSet) -> Vec<ComplementComponent> {
    let spec = set.spec();
    let labels = label_open(set);
    labels
        .groups()
        .into_iter()
        .zip(&labels.touches)
        .map(|(g, &t)| ComplementComponent {
            cells: g.into_iter().map(|l| spec.cell_at(l)).collect(),
            touches: mask_to_faces(t, spec.n()),
        })
        .collect()
}

/// `separates(S, i).is_some()` for each axis `i = 1..=n`.
pub fn separates_all_axes(set: &CellSet) -> Vec<bool> {
    let labels = label_open(set);
    (1..=set.spec().n()).map(|i| !labels.spans(i)).collect()
}

impl Chain {
    /// Checks the chain against its defining properties within `set`.
    pub fn verify(&self, set: &CellSet) -> Result<()> {
        let spec = set.spec();
        let fail = |msg: String| Err(Error::Soundness(format!("invalid chain on axis {}: {msg}", self.axis)));
        let (Some(first), Some(last)) = (self.cells.first(), self.cells.last()) else {
            return fail("empty".into());
        };
        if self.link_dims.len() + 1 != self.cells.len() {
            return fail("link count mismatch".into());
        }
        if let Some(c) = self.cells.iter().find(|c| !set.contains(c)) {
            return fail(format!("cell {c} not in the set"));
        }
        if !spec.touches_face(first, FaceId::new(self.axis, Sign::Minus))? {
            return fail(format!("first cell {first} misses the - face"));
        }
        if !spec.touches_face(last, FaceId::new(self.axis, Sign::Plus))? {
            return fail(format!("last cell {last} misses the + face"));
        }
        for (j, pair) in self.cells.windows(2).enumerate() {
            let d = spec.intersection_dim(&pair[0], &pair[1])?;
            if d < 0 || d as usize != self.link_dims[j] || (d as usize) < self.threshold || pair[0] == pair[1] {
                return fail(format!("link {} -> {} has dimension {d}", pair[0], pair[1]));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

impl SeparationCertificate {
    /// Re-derives every claim of the certificate from `set` using the
    /// definition-level adjacency test.
    pub fn verify(&self, set: &CellSet) -> Result<()> {
        let spec = set.spec();
        let fail = |msg: String| Err(Error::Soundness(format!("invalid separation certificate on axis {}: {msg}", self.axis)));
        let mut owner = vec![usize::MAX; spec.cell_count()];
        for (ci, comp) in self.components.iter().enumerate() {
            for c in comp {
                spec.check_cell(c)?;
                if set.contains(c) {
                    return fail(format!("component {ci} contains member cell {c}"));
                }
                let l = spec.linear(c);
                if owner[l] != usize::MAX {
                    return fail(format!("cell {c} listed twice"));
                }
                owner[l] = ci;
            }
        }
        let complement = set.complement();
        if complement.iter_linear().any(|l| owner[l] == usize::MAX) {
            return fail("components do not cover the complement".into());
        }
        let cells: Vec<Cell> = complement.cells();
        for (x, a) in cells.iter().enumerate() {
            for b in &cells[x + 1..] {
                let (oa, ob) = (owner[spec.linear(a)], owner[spec.linear(b)]);
                if oa != ob && complement_adjacent(a, b, set)? {
                    return fail(format!("cells {a} and {b} are linked but in different components"));
                }
            }
        }
        for (ci, comp) in self.components.iter().enumerate() {
            let touches = |sign| comp.iter().any(|c| spec.touches_face(c, FaceId::new(self.axis, sign)).unwrap_or(false));
            let (m, p) = (touches(Sign::Minus), touches(Sign::Plus));
            if m != self.touching_minus.contains(&ci) || p != self.touching_plus.contains(&ci) {
                return fail(format!("touch lists wrong for component {ci}"));
            }
            if m && p {
                return fail(format!("component {ci} reaches both faces"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, k: usize) -> GridSpec {
        GridSpec::new(n, k).unwrap()
    }

    fn set(s: GridSpec, cells: &[&[usize]]) -> CellSet {
        CellSet::from_indices(s, cells).unwrap()
    }

    #[test]
    fn components_examples() {
        let s = spec(2, 2);
        assert_eq!(components(&CellSet::full(s), 0).unwrap().len(), 1);
        let diag = set(s, &[&[1, 1], &[2, 2]]);
        assert_eq!(components(&diag, 1).unwrap().len(), 2);
        assert_eq!(components(&diag, 0).unwrap().len(), 1);
        assert!(components(&CellSet::empty(s), 0).unwrap().is_empty());
        assert!(components(&diag, 3).is_err());
    }

    #[test]
    fn components_are_ordered_by_lowest_cell() {
        let s = spec(2, 3);
        let x = set(s, &[&[3, 3], &[1, 1], &[3, 1]]);
        let comps = components(&x, 0).unwrap();
        let firsts: Vec<usize> = comps.iter().map(|c| s.linear(&c[0])).collect();
        assert_eq!(firsts, vec![0, 2, 8]);
    }

    #[test]
    fn connects_examples() {
        let s = spec(2, 2);
        let bottom = set(s, &[&[1, 1], &[2, 1]]);
        let chain = connects(&bottom, 1, 0).unwrap().unwrap();
        assert_eq!(chain.cells, vec![s.cell(&[1, 1]).unwrap(), s.cell(&[2, 1]).unwrap()]);
        assert_eq!(chain.link_dims, vec![1]);
        chain.verify(&bottom).unwrap();
        assert!(connects(&bottom, 2, 0).unwrap().is_none());
        assert!(connects(&CellSet::empty(s), 1, 0).unwrap().is_none());
        assert!(connects(&bottom, 3, 0).is_err());
    }

    #[test]
    fn connects_breaks_ties_lexicographically() {
        let s = spec(2, 2);
        let chain = connects(&CellSet::full(s), 1, 0).unwrap().unwrap();
        assert_eq!(chain.cells, vec![s.cell(&[1, 1]).unwrap(), s.cell(&[2, 1]).unwrap()]);
        let chain = connects(&CellSet::full(s), 2, 0).unwrap().unwrap();
        assert_eq!(chain.cells, vec![s.cell(&[1, 1]).unwrap(), s.cell(&[1, 2]).unwrap()]);
    }

    #[test]
    fn single_cell_grid_connects_everything() {
        let s = spec(3, 1);
        for i in 1..=3 {
            let c = connects(&CellSet::full(s), i, 3).unwrap().unwrap();
            assert_eq!(c.cells.len(), 1);
        }
    }

    #[test]
    fn complement_adjacent_examples() {
        let s = spec(2, 2);
        let anti = set(s, &[&[1, 2], &[2, 1]]);
        let a = s.cell(&[1, 1]).unwrap();
        let b = s.cell(&[2, 2]).unwrap();
        assert!(!complement_adjacent(&a, &b, &anti).unwrap());
        assert!(complement_adjacent(&a, &b, &CellSet::empty(s)).unwrap());
        let t = spec(2, 3);
        let far = t.cell(&[3, 3]).unwrap();
        assert!(!complement_adjacent(&t.cell(&[1, 1]).unwrap(), &far, &CellSet::empty(t)).unwrap());
        assert!(complement_adjacent(&s.cell(&[1, 2]).unwrap(), &b, &anti).is_err());
        assert!(complement_adjacent(&a, &a, &anti).is_err());
    }

    #[test]
    fn separates_examples() {
        let s = spec(2, 3);
        let middle = set(s, &[&[1, 2], &[2, 2], &[3, 2]]);
        let cert = separates(&middle, 2).unwrap().unwrap();
        assert_eq!(cert.components.len(), 2);
        assert_eq!(cert.touching_minus, vec![0]);
        assert_eq!(cert.touching_plus, vec![1]);
        cert.verify(&middle).unwrap();
        assert!(separates(&middle, 1).unwrap().is_none());
        assert_eq!(separates_all_axes(&middle), vec![false, true]);

        for (n, k) in [(1, 1), (2, 2), (3, 2)] {
            let e = CellSet::empty(spec(n, k));
            for i in 1..=n {
                assert!(separates(&e, i).unwrap().is_none());
            }
            assert!(separates_all_axes(&e).iter().all(|&b| !b));
            assert!(separates_all_axes(&CellSet::full(spec(n, k))).iter().all(|&b| b));
        }

        let t = spec(2, 2);
        let anti = set(t, &[&[1, 2], &[2, 1]]);
        let cert = separates(&anti, 1).unwrap().unwrap();
        cert.verify(&anti).unwrap();
        assert_eq!(cert.components.len(), 2);
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let s = spec(2, 3);
        let middle = set(s, &[&[1, 2], &[2, 2], &[3, 2]]);
        let mut cert = separates(&middle, 2).unwrap().unwrap();
        let moved = cert.components[1].pop().unwrap();
        cert.components[0].push(moved);
        assert!(cert.verify(&middle).is_err());
    }

    #[test]
    fn chain_verify_rejects_gaps() {
        let s = spec(2, 3);
        let all = CellSet::full(s);
        let bad = Chain {
            axis: 1,
            threshold: 0,
            cells: vec![s.cell(&[1, 1]).unwrap(), s.cell(&[3, 1]).unwrap()],
            link_dims: vec![0],
        };
        assert!(bad.verify(&all).is_err());
    }
}
