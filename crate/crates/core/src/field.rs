//! Scalar fields on the unit cube with range enclosures on boxes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, GridSpec};
use crate::interval::{self, Interval};

/// Expression tree over the coordinates `x_1..x_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const { value: f64 },
    /// 1-based coordinate.
    Coord { axis: usize },
    Add { args: Vec<Expr> },
    Sub { lhs: Box<Expr>, rhs: Box<Expr> },
    Mul { args: Vec<Expr> },
    Min { args: Vec<Expr> },
    Max { args: Vec<Expr> },
    Abs { arg: Box<Expr> },
    /// Euclidean distance from `x` to the segment `[a, b]`.
    SegmentDist { a: Vec<f64>, b: Vec<f64> },
    /// Piecewise linear through `knots` (strictly increasing abscissae),
    /// constant outside them.
    Ramp { input: Box<Expr>, knots: Vec<(f64, f64)> },
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const { value }
    }

    pub fn coord(axis: usize) -> Expr {
        Expr::Coord { axis }
    }

    pub fn sum(args: Vec<Expr>) -> Expr {
        Expr::Add { args }
    }

    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Sub { lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn ramp(input: Expr, knots: Vec<(f64, f64)>) -> Expr {
        Expr::Ramp { input: Box::new(input), knots }
    }

    /// Checks arities, axes and knot order against the dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Parse(m));
        match self {
            Expr::Const { value } if !value.is_finite() => bad(format!("non-finite constant {value}")),
            Expr::Const { .. } => Ok(()),
            Expr::Coord { axis } if *axis == 0 || *axis > n => bad(format!("coordinate {axis} outside 1..={n}")),
            Expr::Coord { .. } => Ok(()),
            Expr::Add { args } | Expr::Mul { args } | Expr::Min { args } | Expr::Max { args } => {
                if args.is_empty() {
                    return bad("operator with no arguments".into());
                }
                args.iter().try_for_each(|a| a.validate(n))
            }
            Expr::Sub { lhs, rhs } => {
                lhs.validate(n)?;
                rhs.validate(n)
            }
            Expr::Abs { arg } => arg.validate(n),
            Expr::SegmentDist { a, b } => {
                if a.len() != n || b.len() != n {
                    return bad(format!("segment endpoints must have {n} coordinates"));
                }
                if a.iter().chain(b).any(|v| !v.is_finite()) {
                    return bad("non-finite segment endpoint".into());
                }
                Ok(())
            }
            Expr::Ramp { input, knots } => {
                if knots.is_empty() {
                    return bad("ramp without knots".into());
                }
                if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return bad("non-finite ramp knot".into());
                }
                if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return bad("ramp knots must be strictly increasing".into());
                }
                input.validate(n)
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const { value } => *value,
            Expr::Coord { axis } => x[axis - 1],
            Expr::Add { args } => args.iter().map(|a| a.eval(x)).sum(),
            Expr::Sub { lhs, rhs } => lhs.eval(x) - rhs.eval(x),
            Expr::Mul { args } => args.iter().map(|a| a.eval(x)).product(),
            Expr::Min { args } => args.iter().map(|a| a.eval(x)).fold(f64::INFINITY, f64::min),
            Expr::Max { args } => args.iter().map(|a| a.eval(x)).fold(f64::NEG_INFINITY, f64::max),
            Expr::Abs { arg } => arg.eval(x).abs(),
            Expr::SegmentDist { a, b } => segment_dist(x, a, b),
            Expr::Ramp { input, knots } => ramp_eval(knots, input.eval(x)),
        }
    }

    /// Enclosure of the expression over the box `x_s ∈ bx[s]`.
    pub fn range(&self, bx: &[Interval]) -> Interval {
        match self {
            Expr::Const { value } => Interval::point(*value),
            Expr::Coord { axis } => bx[axis - 1],
            Expr::Add { args } => fold(args, bx, |a, b| a + b),
            Expr::Sub { lhs, rhs } => lhs.range(bx) - rhs.range(bx),
            Expr::Mul { args } => fold(args, bx, |a, b| a * b),
            Expr::Min { args } => fold(args, bx, Interval::min),
            Expr::Max { args } => fold(args, bx, Interval::max),
            Expr::Abs { arg } => arg.range(bx).abs(),
            Expr::SegmentDist { a, b } => segment_dist_range(bx, a, b),
            Expr::Ramp { input, knots } => ramp_range(knots, input.range(bx)),
        }
    }

    /// Largest ramp slope anywhere in the tree.
    pub fn max_ramp_slope(&self) -> f64 {
        match self {
            Expr::Ramp { input, knots } => knots
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(input.max_ramp_slope(), f64::max),
            Expr::Add { args } | Expr::Mul { args } | Expr::Min { args } | Expr::Max { args } => {
                args.iter().map(Expr::max_ramp_slope).fold(0.0, f64::max)
            }
            Expr::Sub { lhs, rhs } => lhs.max_ramp_slope().max(rhs.max_ramp_slope()),
            Expr::Abs { arg } => arg.max_ramp_slope(),
            _ => 0.0,
        }
    }
}

fn fold(args: &[Expr], bx: &[Interval], op: impl Fn(Interval, Interval) -> Interval) -> Interval {
    let mut it = args.iter().map(|a| a.range(bx));
    let first = it.next().expect("validated arity");
    it.fold(first, op)
}

fn segment_dist(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(p, q)| q - p).collect();
    let len2: f64 = d.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (x.iter().zip(a).zip(&d).map(|((xi, ai), di)| (xi - ai) * di).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    x.iter()
        .zip(a)
        .zip(&d)
        .map(|((xi, ai), di)| {
            let r = xi - ai - t * di;
            r * r
        })
        .sum::<f64>()
        .sqrt()
}

/// Range of the distance from a box to an interval `[p, q]` on one axis.
fn gap_range(x: Interval, p: f64, q: f64) -> Interval {
    let lo = interval::add_down(x.lo, -q).max(interval::add_down(p, -x.hi)).max(0.0);
    let hi = interval::add_up(p, -x.lo).max(interval::add_up(x.hi, -q)).max(0.0);
    Interval::new(lo, hi)
}

fn segment_dist_range(bx: &[Interval], a: &[f64], b: &[f64]) -> Interval {
    let moving: Vec<usize> = (0..a.len()).filter(|&s| a[s] != b[s]).collect();
    if moving.len() <= 1 {
        // axis-parallel (or a point): the squared distance separates by axis
        let sum = (0..a.len())
            .map(|s| gap_range(bx[s], a[s].min(b[s]), a[s].max(b[s])).sqr())
            .fold(Interval::point(0.0), |acc, v| acc + v);
        return sum.sqrt();
    }
    // convex in x: maximum at a corner, minimum bounded via the centre
    let n = a.len();
    let mut hi = 0.0f64;
    for corner in 0..(1usize << n) {
        let p: Vec<Interval> =
            (0..n).map(|s| Interval::point(if corner >> s & 1 == 1 { bx[s].hi } else { bx[s].lo })).collect();
        hi = hi.max(point_dist_enclosure(&p, a, b).hi);
    }
    let centre: Vec<Interval> = bx.iter().map(|x| Interval::point(x.mid())).collect();
    let half_diag = bx
        .iter()
        .zip(&centre)
        .map(|(x, c)| (Interval::point(x.hi) - *c).abs().max((*c - Interval::point(x.lo)).abs()).sqr())
        .fold(Interval::point(0.0), |acc, v| acc + v)
        .sqrt();
    let lo = interval::add_down(point_dist_enclosure(&centre, a, b).lo, -half_diag.hi).max(0.0);
    Interval::new(lo, hi.max(lo))
}

/// Interval evaluation of the distance from a point to a general segment.
fn point_dist_enclosure(p: &[Interval], a: &[f64], b: &[f64]) -> Interval {
    let d: Vec<Interval> = a.iter().zip(b).map(|(x, y)| Interval::point(*y) - Interval::point(*x)).collect();
    let len2 = d.iter().fold(Interval::point(0.0), |acc, v| acc + v.sqr());
    let dot = p
        .iter()
        .zip(a)
        .zip(&d)
        .fold(Interval::point(0.0), |acc, ((x, ai), di)| acc + (*x - Interval::point(*ai)) * *di);
    let t = dot.div(len2).max(Interval::point(0.0)).min(Interval::point(1.0));
    p.iter()
        .zip(a)
        .zip(&d)
        .fold(Interval::point(0.0), |acc, ((x, ai), di)| acc + (*x - Interval::point(*ai) - t * *di).sqr())
        .sqrt()
}

fn ramp_eval(knots: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let j = knots.partition_point(|&(t, _)| t <= x);
    let ((t0, v0), (t1, v1)) = (knots[j - 1], knots[j]);
    v0 + (x - t0) * (v1 - v0) / (t1 - t0)
}

/// Enclosure of the ramp value at one point.
fn ramp_point(knots: &[(f64, f64)], x: f64) -> Interval {
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if x <= first.0 {
        return Interval::point(first.1);
    }
    if x >= last.0 {
        return Interval::point(last.1);
    }
    let j = knots.partition_point(|&(t, _)| t <= x);
    let ((t0, v0), (t1, v1)) = (knots[j - 1], knots[j]);
    if x == t0 {
        return Interval::point(v0);
    }
    let p = |v| Interval::point(v);
    let w = (p(x) - p(t0)).div(p(t1) - p(t0)).min(p(1.0)).max(p(0.0));
    // convex combination, exact at the knots
    (p(1.0) - w) * p(v0) + w * p(v1)
}

fn ramp_range(knots: &[(f64, f64)], x: Interval) -> Interval {
    let mut r = ramp_point(knots, x.lo).hull(&ramp_point(knots, x.hi));
    for &(t, v) in knots {
        if x.lo < t && t < x.hi {
            r = r.hull(&Interval::point(v));
        }
    }
    r
}

/// A closed-form field on `I^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExprField {
    pub n: usize,
    pub expr: Expr,
}

impl ExprField {
    pub fn new(n: usize, expr: Expr) -> Result<Self> {
        if n == 0 {
            return Err(Error::usage("field dimension must be positive"));
        }
        expr.validate(n)?;
        Ok(ExprField { n, expr })
    }
}

/// Multilinear interpolation of values on the `(k+1)^n` vertex lattice,
/// row-major with axis 1 fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexField {
    spec: GridSpec,
    values: Vec<f64>,
}

impl VertexField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.vertex_count() {
            return Err(Error::Parse(format!(
                "vertex field on {spec} needs {} values, got {}",
                spec.vertex_count(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite vertex value {v}")));
        }
        Ok(VertexField { spec, values })
    }

    /// Samples `f` at every vertex `j/k`.
    pub fn sample(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let (n, k) = (spec.n(), spec.k());
        let mut x = vec![0.0; n];
        let values = (0..spec.vertex_count())
            .map(|v| {
                let mut rest = v;
                for xs in x.iter_mut() {
                    *xs = (rest % (k + 1)) as f64 / k as f64;
                    rest /= k + 1;
                }
                f(&x)
            })
            .collect();
        VertexField { spec, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn vertex(&self, idx: &[usize]) -> f64 {
        let k1 = self.spec.k() + 1;
        let linear = idx.iter().rev().fold(0, |acc, &j| acc * k1 + j);
        self.values[linear]
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let (n, k) = (self.spec.n(), self.spec.k());
        let mut base = vec![0usize; n];
        let mut t = vec![0.0; n];
        for s in 0..n {
            let y = x[s].clamp(0.0, 1.0) * k as f64;
            let j = (y.floor() as usize).min(k - 1);
            base[s] = j;
            t[s] = y - j as f64;
        }
        let mut total = 0.0;
        let mut idx = vec![0usize; n];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            for s in 0..n {
                let bit = corner >> s & 1;
                idx[s] = base[s] + bit;
                w *= if bit == 1 { t[s] } else { 1.0 - t[s] };
            }
            total += w * self.vertex(&idx);
        }
        total
    }

    /// Enclosure over the box `∏ [num_lo[s]/den, num_hi[s]/den]`.
    ///
    /// Exact up to rounding: the box is split along native cells, and on
    /// each piece the multilinear extrema sit at the clipped corners.
    fn rational_box_range(&self, num_lo: &[u128], num_hi: &[u128], den: u128) -> Interval {
        let (n, k) = (self.spec.n(), self.spec.k() as u128);
        // native cells j (0-based) overlapping [lo, hi]: j/k < hi and (j+1)/k > lo
        let spans: Vec<(u128, u128)> = (0..n)
            .map(|s| {
                let first = (num_lo[s] * k) / den;
                let last = ((num_hi[s] * k).div_ceil(den)).max(first + 1) - 1;
                (first.min(k - 1), last.min(k - 1))
            })
            .collect();
        let mut out: Option<Interval> = None;
        let mut j: Vec<u128> = spans.iter().map(|&(a, _)| a).collect();
        loop {
            // local coordinates in [0, 1] of the clipped piece, as exact ratios
            let local: Vec<[Interval; 2]> = (0..n)
                .map(|s| {
                    let lo = (num_lo[s] * k).max(j[s] * den) - j[s] * den;
                    let hi = (num_hi[s] * k).min((j[s] + 1) * den) - j[s] * den;
                    [Interval::ratio(lo as f64, den as f64), Interval::ratio(hi as f64, den as f64)]
                })
                .collect();
            for corner in 0..(1usize << n) {
                let t: Vec<Interval> = (0..n).map(|s| local[s][corner >> s & 1]).collect();
                let v = self.interp(&j, &t);
                out = Some(out.map_or(v, |o| o.hull(&v)));
            }
            let mut s = 0;
            while s < n {
                if j[s] < spans[s].1 {
                    j[s] += 1;
                    break;
                }
                j[s] = spans[s].0;
                s += 1;
            }
            if s == n {
                break;
            }
        }
        out.expect("nonempty box")
    }

    /// Interval multilinear interpolation in native cell `j` (0-based) at
    /// local coordinates `t`; exact when every `t` is 0 or 1.
    fn interp(&self, j: &[u128], t: &[Interval]) -> Interval {
        let n = self.spec.n();
        let one = Interval::point(1.0);
        let mut total = Interval::point(0.0);
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut idx = vec![0usize; n];
        for corner in 0..(1usize << n) {
            let mut w = one;
            for s in 0..n {
                let bit = corner >> s & 1;
                idx[s] = j[s] as usize + bit;
                w = w * if bit == 1 { t[s] } else { one - t[s] };
            }
            let v = self.vertex(&idx);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
            if w.hi > 0.0 {
                total = total + w * Interval::point(v);
            }
        }
        // a convex combination stays within the vertex values
        Interval::new(total.lo.clamp(vmin, vmax), total.hi.clamp(vmin, vmax))
    }
}

/// Either kind of field; the analyzers only need evaluation and ranges.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarField {
    Vertex(VertexField),
    Expr(ExprField),
}

impl From<ExprField> for ScalarField {
    fn from(f: ExprField) -> Self {
        ScalarField::Expr(f)
    }
}

impl From<VertexField> for ScalarField {
    fn from(f: VertexField) -> Self {
        ScalarField::Vertex(f)
    }
}

impl ScalarField {
    pub fn dim(&self) -> usize {
        match self {
            ScalarField::Vertex(v) => v.spec.n(),
            ScalarField::Expr(e) => e.n,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Vertex(v) => v.eval(x),
            ScalarField::Expr(e) => e.expr.eval(x),
        }
    }

    /// Enclosure of the field on cell `c` of grid `spec` (which need not be
    /// the native grid of a vertex field).
    pub fn cell_range(&self, spec: GridSpec, c: &Cell) -> Result<Interval> {
        spec.check_cell(c)?;
        if spec.n() != self.dim() {
            return Err(Error::usage(format!("grid {spec} does not match a field of dimension {}", self.dim())));
        }
        Ok(self.cell_range_unchecked(spec, c.index()))
    }

    pub(crate) fn cell_range_unchecked(&self, spec: GridSpec, index: &[usize]) -> Interval {
        let k = spec.k() as u128;
        match self {
            ScalarField::Vertex(v) => {
                let lo: Vec<u128> = index.iter().map(|&i| i as u128 - 1).collect();
                let hi: Vec<u128> = index.iter().map(|&i| i as u128).collect();
                v.rational_box_range(&lo, &hi, k)
            }
            ScalarField::Expr(e) => {
                let bx: Vec<Interval> = index
                    .iter()
                    .map(|&i| {
                        let lo = interval::div_down((i - 1) as f64, k as f64);
                        let hi = interval::div_up(i as f64, k as f64);
                        Interval::new(lo, hi)
                    })
                    .collect();
                e.expr.range(&bx)
            }
        }
    }

    /// Enclosure over an arbitrary box inside the cube.
    pub fn box_range(&self, bx: &[Interval]) -> Interval {
        match self {
            ScalarField::Expr(e) => e.expr.range(bx),
            ScalarField::Vertex(v) => {
                // enlarge to dyadic rationals with a common denominator
                const DEN: u128 = 1 << 52;
                let lo: Vec<u128> = bx.iter().map(|x| (x.lo.clamp(0.0, 1.0) * DEN as f64).floor() as u128).collect();
                let hi: Vec<u128> = bx.iter().map(|x| (x.hi.clamp(0.0, 1.0) * DEN as f64).ceil() as u128).collect();
                v.rational_box_range(&lo, &hi, DEN)
            }
        }
    }
}
