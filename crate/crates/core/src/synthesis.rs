//! Fields with prescribed Conn and Sep sets.
//!
//! Given sets `A_i` and `B_i`, [`validate_spec`] checks the five conditions
//! under which a continuous `g` with `Conn_i(g) = A_i` and `Sep_i(g) = B_i`
//! exists, and [`build_function`] writes one down: a slab ramp on the axis
//! whose `A` is empty plus thin tubes around axis-parallel segments, or, when
//! every `A_i` is nonempty, tubes on a constant background.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Expr, ExprField, ScalarField};

/// One prescribed set: empty, a point, or a nondegenerate closed interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Option<RawSet>", into = "Option<RawSet>")]
pub enum PrescribedSet {
    Empty,
    Point(f64),
    Interval(f64, f64),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawSet {
    Point(f64),
    Interval([f64; 2]),
}

impl From<Option<RawSet>> for PrescribedSet {
    fn from(raw: Option<RawSet>) -> Self {
        match raw {
            None => PrescribedSet::Empty,
            Some(RawSet::Point(a)) => PrescribedSet::Point(a),
            Some(RawSet::Interval([a, b])) if a == b => PrescribedSet::Point(a),
            Some(RawSet::Interval([a, b])) => PrescribedSet::Interval(a, b),
        }
    }
}

impl From<PrescribedSet> for Option<RawSet> {
    fn from(s: PrescribedSet) -> Self {
        match s {
            PrescribedSet::Empty => None,
            PrescribedSet::Point(a) => Some(RawSet::Point(a)),
            PrescribedSet::Interval(a, b) => Some(RawSet::Interval([a, b])),
        }
    }
}

impl PrescribedSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, PrescribedSet::Empty)
    }

    /// Closed bounds, `None` when empty.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match *self {
            PrescribedSet::Empty => None,
            PrescribedSet::Point(a) => Some((a, a)),
            PrescribedSet::Interval(a, b) => Some((a, b)),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.bounds().is_some_and(|(a, b)| a <= p && p <= b)
    }

    fn is_subset(&self, other: &PrescribedSet) -> bool {
        match (self.bounds(), other.bounds()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, b)), Some((c, d))) => c <= a && b <= d,
        }
    }

    fn well_formed(&self) -> bool {
        match *self {
            PrescribedSet::Empty => true,
            PrescribedSet::Point(a) => a.is_finite(),
            PrescribedSet::Interval(a, b) => a.is_finite() && b.is_finite() && a < b,
        }
    }
}

impl fmt::Display for PrescribedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrescribedSet::Empty => write!(f, "∅"),
            PrescribedSet::Point(a) => write!(f, "{{{a}}}"),
            PrescribedSet::Interval(a, b) => write!(f, "[{a}, {b}]"),
        }
    }
}

/// Prescribed `A_i` (Conn) and `B_i` (Sep) for `i = 1..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnSepSpec {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<PrescribedSet>,
    #[serde(rename = "B")]
    pub b: Vec<PrescribedSet>,
}

/// The first violated condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: u8,
    pub axis: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.axis {
            Some(i) => write!(f, "condition ({}) fails on axis {i}: {}", self.condition, self.detail),
            None => write!(f, "condition ({}) fails: {}", self.condition, self.detail),
        }
    }
}

fn violation(condition: u8, axis: Option<usize>, detail: String) -> Option<Violation> {
    Some(Violation { condition, axis, detail })
}

/// Checks conditions (1) to (5) in order and returns the first failure.
pub fn validate_spec(s: &ConnSepSpec) -> Result<Option<Violation>> {
    let n = s.n;
    if n < 2 {
        return Err(Error::Unsupported(format!("prescribed Conn/Sep sets need n >= 2, got n = {n}")));
    }
    if s.a.len() != n || s.b.len() != n {
        return Err(Error::usage(format!("need {n} sets A and {n} sets B, got {} and {}", s.a.len(), s.b.len())));
    }
    // (1) each set is empty, a point or a compact interval
    for i in 0..n {
        for (name, set) in [("A", &s.a[i]), ("B", &s.b[i])] {
            if !set.well_formed() {
                return Ok(violation(1, Some(i + 1), format!("{name}_{} = {set} is not a point or a compact interval", i + 1)));
            }
        }
    }
    // (2) A empty forces B an interval; A a point forces B = A; A an interval forces B empty
    for i in 0..n {
        let (a, b) = (s.a[i], s.b[i]);
        let bad = match a {
            PrescribedSet::Empty => !matches!(b, PrescribedSet::Interval(..)),
            PrescribedSet::Point(_) => a != b,
            PrescribedSet::Interval(..) => !b.is_empty(),
        };
        if bad {
            return Ok(violation(2, Some(i + 1), format!("A_{0} = {a} does not allow B_{0} = {b}", i + 1)));
        }
    }
    // (3) B_i inside every other A_j
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            if !s.b[i].is_subset(&s.a[j]) {
                return Ok(violation(3, Some(i + 1), format!("B_{} = {} is not inside A_{} = {}", i + 1, s.b[i], j + 1, s.a[j])));
            }
        }
    }
    // (4) nonempty A's share a point
    if s.a.iter().all(|a| !a.is_empty()) && common_interval(&s.a).is_none() {
        return Ok(violation(4, None, "the sets A_i are all nonempty but have no common point".into()));
    }
    // (5) in the plane Conn and Sep swap axes
    if n == 2 {
        for i in 0..2 {
            if s.a[i] != s.b[1 - i] {
                return Ok(violation(5, Some(i + 1), format!("A_{} = {} differs from B_{} = {}", i + 1, s.a[i], 2 - i, s.b[1 - i])));
            }
        }
    }
    Ok(None)
}

fn common_interval(sets: &[PrescribedSet]) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for s in sets {
        let (a, b) = s.bounds()?;
        lo = lo.max(a);
        hi = hi.min(b);
    }
    (lo <= hi).then_some((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Branch {
    /// `n ≥ 3` and `A_axis = ∅`: slab ramp along `axis` plus tubes.
    EmptyA { axis: usize },
    /// Every `A_i` nonempty: tubes around segments on the constant `p`.
    AllNonempty { p: f64 },
    /// `n = 2`, `A_axis = ∅`: `g = (b − a) x_axis + a`.
    PlaneLinear { axis: usize },
    /// `n = 2`, both `A` points: `g ≡ p`.
    PlaneConstant { p: f64 },
}

/// A geometric piece of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    /// `g` runs linearly from `low` at `x_axis = from` to `high` at `x_axis = to`.
    Slab { axis: usize, from: f64, to: f64, low: f64, high: f64 },
    /// Tube around the segment `[a, b]` (parallel to `axis`), with value
    /// `centre` on it, `middle` at distance `inner_radius` and `outside`
    /// from `outer_radius` on.
    Tube {
        axis: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        inner_radius: f64,
        outer_radius: f64,
        centre: f64,
        middle: f64,
        outside: f64,
    },
}

/// A constructed field with a record of how it was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedField {
    pub field: ExprField,
    pub branch: Branch,
    /// `permutation[r]` is the axis playing the role of axis `r + 1` in the
    /// construction (which is written with the empty `A` on axis 1).
    pub permutation: Vec<usize>,
    pub elements: Vec<Element>,
    /// Euclidean Lipschitz constant: the steepest ramp slope.
    pub lipschitz_bound: f64,
}

impl SynthesizedField {
    pub fn scalar(&self) -> ScalarField {
        self.field.clone().into()
    }
}

fn tube(axis: usize, a: Vec<f64>, b: Vec<f64>, j: usize, centre: f64, middle: f64, outside: f64) -> Element {
    let outer = 1.0 / 5f64.powi(j as i32);
    Element::Tube { axis, a, b, inner_radius: outer / 2.0, outer_radius: outer, centre, middle, outside }
}

/// `Ramp(dist(x, seg), ...) − outside`: zero away from the tube.
fn tube_expr(e: &Element) -> Expr {
    let Element::Tube { a, b, inner_radius, outer_radius, centre, middle, outside, .. } = e else {
        unreachable!("tube_expr on a slab")
    };
    Expr::sub(
        Expr::ramp(
            Expr::SegmentDist { a: a.clone(), b: b.clone() },
            vec![(0.0, *centre), (*inner_radius, *middle), (*outer_radius, *outside)],
        ),
        Expr::constant(*outside),
    )
}

/// Distance between two segments each parallel to an axis, spanning the
/// whole cube along it.
fn spanning_segment_distance(a: &[f64], axis_a: usize, b: &[f64], axis_b: usize) -> f64 {
    (0..a.len())
        .filter(|&s| s + 1 != axis_a && s + 1 != axis_b)
        .map(|s| (a[s] - b[s]).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn check_disjoint(elements: &[Element]) -> Result<()> {
    let tubes: Vec<(usize, &Vec<f64>, f64)> = elements
        .iter()
        .filter_map(|e| match e {
            Element::Tube { axis, a, outer_radius, .. } => Some((*axis, a, *outer_radius)),
            _ => None,
        })
        .collect();
    for (x, &(ax, a, ra)) in tubes.iter().enumerate() {
        for &(bx, b, rb) in &tubes[x + 1..] {
            let d = spanning_segment_distance(a, ax, b, bx);
            if d <= ra + rb {
                return Err(Error::Soundness(format!("tubes around axes {ax} and {bx} overlap: distance {d} ≤ {ra} + {rb}")));
            }
        }
        for e in elements {
            if let Element::Slab { axis, from, .. } = e {
                let reach = a[axis - 1] + ra;
                if reach >= *from {
                    return Err(Error::Soundness(format!("tube around axis {ax} reaches the slab: {reach} ≥ {from}")));
                }
            }
        }
    }
    Ok(())
}

/// Builds the field for a valid spec.
pub fn build_function(s: &ConnSepSpec) -> Result<SynthesizedField> {
    if let Some(v) = validate_spec(s)? {
        return Err(Error::usage(format!("invalid spec: {v}")));
    }
    let n = s.n;
    let empties: Vec<usize> = (0..n).filter(|&i| s.a[i].is_empty()).collect();
    if n >= 3 && empties.len() > 1 {
        return Err(Error::Soundness(format!("validated spec has {} empty A sets", empties.len())));
    }
    let identity: Vec<usize> = (1..=n).collect();
    let (expr, branch, permutation, elements) = if n == 2 {
        match empties.first() {
            Some(&e) => {
                let (lo, hi) = s.b[e].bounds().expect("B is an interval");
                let expr = Expr::sum(vec![
                    Expr::Mul { args: vec![Expr::constant(hi - lo), Expr::coord(e + 1)] },
                    Expr::constant(lo),
                ]);
                let slab = Element::Slab { axis: e + 1, from: 0.0, to: 1.0, low: lo, high: hi };
                (expr, Branch::PlaneLinear { axis: e + 1 }, identity, vec![slab])
            }
            None => {
                let p = s.a[0].bounds().expect("nonempty").0;
                (Expr::constant(p), Branch::PlaneConstant { p }, identity, vec![])
            }
        }
    } else if let Some(&e) = empties.first() {
        let (bl, br) = s.b[e].bounds().expect("B is an interval");
        // role r (1-based) is played by axis perm[r-1]: swap 1 and e+1
        let mut perm = identity.clone();
        perm.swap(0, e);
        let slab = Element::Slab { axis: e + 1, from: 0.5, to: 1.0, low: bl, high: br };
        let mut elements = vec![slab];
        for role in 2..=n {
            let axis = perm[role - 1];
            let (al, ar) = s.a[axis - 1].bounds().expect("A is an interval");
            let mut a = vec![0.5; n];
            a[e] = 1.0 / 2f64.powi(role as i32);
            a[axis - 1] = 0.0;
            let mut b = a.clone();
            b[axis - 1] = 1.0;
            elements.push(tube(axis, a, b, role, ar, al, bl));
        }
        let mut terms = vec![Expr::ramp(Expr::coord(e + 1), vec![(0.5, bl), (1.0, br)])];
        terms.extend(elements[1..].iter().map(tube_expr));
        (Expr::sum(terms), Branch::EmptyA { axis: e + 1 }, perm, elements)
    } else {
        let singles: Vec<f64> = s.a.iter().filter_map(|a| match a {
            PrescribedSet::Point(v) => Some(*v),
            _ => None,
        }).collect();
        let p = match singles.first() {
            Some(&v) => v,
            None => {
                let (lo, hi) = common_interval(&s.a).expect("condition (4)");
                lo + (hi - lo) / 2.0
            }
        };
        let mut elements = Vec::new();
        for j in 1..=n {
            if let PrescribedSet::Interval(al, ar) = s.a[j - 1] {
                let mut a = vec![1.0 / 2f64.powi(j as i32); n];
                a[j - 1] = 0.0;
                let mut b = a.clone();
                b[j - 1] = 1.0;
                elements.push(tube(j, a, b, j, ar, al, p));
            }
        }
        let mut terms = vec![Expr::constant(p)];
        terms.extend(elements.iter().map(tube_expr));
        let expr = if terms.len() == 1 { Expr::constant(p) } else { Expr::sum(terms) };
        (expr, Branch::AllNonempty { p }, identity, elements)
    };
    check_disjoint(&elements)?;
    let field = ExprField::new(n, expr)?;
    let mut lipschitz_bound = field.expr.max_ramp_slope();
    if let Branch::PlaneLinear { axis } = branch {
        let (lo, hi) = s.b[axis - 1].bounds().expect("interval");
        lipschitz_bound = hi - lo;
    }
    Ok(SynthesizedField { field, branch, permutation, elements, lipschitz_bound })
}

/// `g(x)` for `x` in the unit cube.
pub fn evaluate(f: &SynthesizedField, x: &[f64]) -> Result<f64> {
    if x.len() != f.field.n {
        return Err(Error::usage(format!("point has {} coordinates, field has {}", x.len(), f.field.n)));
    }
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::usage(format!("coordinate {v} is outside [0, 1]")));
    }
    Ok(f.field.expr.eval(x))
}
