//! One-sided certificates for `p ∈ Conn_i(g)` and `p ∈ Sep_i(g)`.
//!
//! Every certificate works on cell sets built from per-cell range
//! enclosures at level `p`:
//!
//! * `outer` holds every cell meeting the fiber `g = p`;
//! * `below_outer` / `above_outer` cover `{g < p}` / `{g > p}`;
//! * `strictly_below` / `strictly_above` lie inside `{g < p}` / `{g > p}`;
//! * `exact` cells are constant `p`, so they lie inside the fiber.
//!
//! Positive separation: a component of the fiber's complement sits inside
//! `{g < p}` or inside `{g > p}`. One inside `{g < p}` cannot join the
//! opposite faces if `below_outer` does not connect them, nor if
//! `strictly_above` separates them (it avoids that set). Symmetrically for
//! `{g > p}`. A fiber containing a separating `exact` set also separates.
//!
//! Positive connection: the fiber connects axis `i` if it separates some
//! other axis `j`, if it contains a connecting `exact` set, or if both
//! `strictly_below` and `strictly_above` connect axis `i` (the fiber then
//! lies between two connected sets spanning the axis).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{Cell, GridSpec, Sign};
use crate::interval::Interval;
use crate::topology::{self, label_closed_with, label_open_with, Chain, Stencil};

/// Cell-set approximations of the fiber `g = p` and the sets `g < p`,
/// `g > p`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberBracket {
    pub level: f64,
    pub outer: CellSet,
    pub strictly_below: CellSet,
    pub strictly_above: CellSet,
    pub below_outer: CellSet,
    pub above_outer: CellSet,
    /// Cells whose range is exactly `{p}`.
    pub exact: CellSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    In,
    Out,
    Undetermined,
}

/// Conn and Sep verdicts at one level, indexed by axis − 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelVerdict {
    pub p: f64,
    pub conn: Vec<Verdict>,
    pub sep: Vec<Verdict>,
}

/// Per-cell ranges of a field on one grid, with the predicates built on them.
pub struct Analyzer<'a> {
    field: &'a ScalarField,
    spec: GridSpec,
    ranges: Vec<Interval>,
    stencil: Stencil,
}

fn check_dim(field: &ScalarField, spec: GridSpec) -> Result<()> {
    if field.dim() != spec.n() {
        return Err(Error::usage(format!("grid {spec} does not match a field of dimension {}", field.dim())));
    }
    Ok(())
}

fn all_axes(n: usize) -> u64 {
    (1u64 << n) - 1
}

impl<'a> Analyzer<'a> {
    pub fn new(field: &'a ScalarField, spec: GridSpec) -> Result<Self> {
        check_dim(field, spec)?;
        let ranges = (0..spec.cell_count())
            .into_par_iter()
            .map(|l| field.cell_range_unchecked(spec, spec.cell_at(l).index()))
            .collect();
        Ok(Analyzer { field, spec, ranges, stencil: Stencil::new(spec) })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn field(&self) -> &ScalarField {
        self.field
    }

    pub fn range(&self, cell: &Cell) -> Result<Interval> {
        self.spec.check_cell(cell)?;
        Ok(self.ranges[self.spec.linear(cell)])
    }

    /// Hull of all cell ranges.
    pub fn value_range(&self) -> Interval {
        self.ranges.iter().skip(1).fold(self.ranges[0], |a, r| a.hull(r))
    }

    /// Values of cells on which the enclosure is a single point.
    pub fn degenerate_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.ranges.iter().filter(|r| r.is_point()).map(|r| r.lo).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    fn select(&self, pred: impl Fn(&Interval) -> bool) -> CellSet {
        CellSet::from_fn(self.spec, |l| pred(&self.ranges[l]))
    }

    pub fn bracket(&self, p: f64) -> FiberBracket {
        FiberBracket {
            level: p,
            outer: self.select(|r| r.contains(p)),
            strictly_below: self.select(|r| r.hi < p),
            strictly_above: self.select(|r| r.lo > p),
            below_outer: self.select(|r| r.lo < p),
            above_outer: self.select(|r| r.hi > p),
            exact: self.select(|r| r.lo == p && r.hi == p),
        }
    }

    /// Axes (bit `i−1`) that `∪set` connects.
    fn conn_mask(&self, set: &CellSet) -> u64 {
        if set.is_empty() {
            return 0;
        }
        label_closed_with(set, &self.stencil, 0).spans_mask(self.spec.n())
    }

    /// Axes (bit `i−1`) that `∪set` separates.
    fn sep_mask(&self, set: &CellSet) -> u64 {
        let n = self.spec.n();
        if set.is_empty() {
            return 0;
        }
        if set.is_full() {
            return all_axes(n);
        }
        !label_open_with(set, &self.stencil).spans_mask(n) & all_axes(n)
    }

    /// Masks of the axes with a positive separation certificate.
    fn sep_certified(&self, b: &FiberBracket) -> u64 {
        let full = all_axes(self.spec.n());
        let below_free = !self.conn_mask(&b.below_outer) & full;
        let above_free = !self.conn_mask(&b.above_outer) & full;
        let mut below_ok = below_free;
        let mut above_ok = above_free;
        if below_ok != full {
            below_ok |= self.sep_mask(&b.strictly_above);
        }
        if above_ok != full {
            above_ok |= self.sep_mask(&b.strictly_below);
        }
        let mut sep = below_ok & above_ok;
        if sep != full && !b.exact.is_empty() {
            sep |= self.sep_mask(&b.exact);
        }
        sep
    }

    fn check_axis(&self, i: usize) -> Result<u64> {
        self.spec.check_axis(i)?;
        Ok(1u64 << (i - 1))
    }

    pub fn certify_not_conn(&self, p: f64, i: usize) -> Result<bool> {
        let bit = self.check_axis(i)?;
        Ok(self.conn_mask(&self.bracket(p).outer) & bit == 0)
    }

    pub fn certify_sep(&self, p: f64, i: usize) -> Result<bool> {
        let bit = self.check_axis(i)?;
        Ok(self.sep_certified(&self.bracket(p)) & bit != 0)
    }

    pub fn certify_not_sep(&self, p: f64, i: usize) -> Result<bool> {
        let bit = self.check_axis(i)?;
        let b = self.bracket(p);
        Ok((self.conn_mask(&b.strictly_below) | self.conn_mask(&b.strictly_above)) & bit != 0)
    }

    pub fn certify_conn(&self, p: f64, i: usize) -> Result<bool> {
        let bit = self.check_axis(i)?;
        if self.spec.n() == 1 {
            return Err(Error::Unsupported(
                "positive connection certificates need n >= 2; only not-conn and not-sep are available".into(),
            ));
        }
        Ok(self.conn_certified(&self.bracket(p), None) & bit != 0)
    }

    fn conn_certified(&self, b: &FiberBracket, sep: Option<u64>) -> u64 {
        let n = self.spec.n();
        let sep = sep.unwrap_or_else(|| self.sep_certified(b));
        // separating axis j certifies every other axis
        let mut conn = 0u64;
        for j in 0..n {
            if sep >> j & 1 == 1 {
                conn |= all_axes(n) & !(1 << j);
            }
        }
        if conn != all_axes(n) {
            conn |= self.conn_mask(&b.strictly_below) & self.conn_mask(&b.strictly_above);
        }
        if conn != all_axes(n) && !b.exact.is_empty() {
            conn |= self.conn_mask(&b.exact);
        }
        conn
    }

    /// All four certificates on every axis at level `p`.
    ///
    /// Fails with a soundness error if a level is certified both in and out
    /// of the same set, or if a separation certificate on one axis does not
    /// yield connection certificates on all others.
    pub fn level(&self, p: f64) -> Result<LevelVerdict> {
        let n = self.spec.n();
        let b = self.bracket(p);
        let not_conn = !self.conn_mask(&b.outer) & all_axes(n);
        let not_sep = self.conn_mask(&b.strictly_below) | self.conn_mask(&b.strictly_above);
        let sep = self.sep_certified(&b);
        let conn = if n >= 2 { self.conn_certified(&b, Some(sep)) } else { 0 };
        if n >= 2 {
            for j in 0..n {
                let others = all_axes(n) & !(1 << j);
                if sep >> j & 1 == 1 && conn & others != others {
                    return Err(Error::Soundness(format!(
                        "level {p}: separation on axis {} without connection on every other axis",
                        j + 1
                    )));
                }
            }
        }
        if conn & not_conn != 0 || sep & not_sep != 0 {
            return Err(Error::Soundness(format!(
                "level {p} on {}: conn in {conn:b} / out {not_conn:b}, sep in {sep:b} / out {not_sep:b}",
                self.spec
            )));
        }
        let verdict = |inside: u64, outside: u64, s: usize| {
            if inside >> s & 1 == 1 {
                Verdict::In
            } else if outside >> s & 1 == 1 {
                Verdict::Out
            } else {
                Verdict::Undetermined
            }
        };
        Ok(LevelVerdict {
            p,
            conn: (0..n).map(|s| verdict(conn, not_conn, s)).collect(),
            sep: (0..n).map(|s| verdict(sep, not_sep, s)).collect(),
        })
    }

    /// Whether `g ≤ p` on the boundary layer at `(i, -)` and `g ≥ p` on the
    /// layer at `(i, +)`, or the same with the roles swapped.
    pub fn pm_sign_check(&self, i: usize, p: f64) -> Result<bool> {
        self.spec.check_axis(i)?;
        let k = self.spec.k();
        let layer = |sign: Sign| {
            let want = if sign == Sign::Minus { 1 } else { k };
            self.spec.cells().filter(move |c| c.index()[i - 1] == want).map(|c| self.ranges[self.spec.linear(&c)])
        };
        let below = |s: Sign| layer(s).all(|r| r.hi <= p);
        let above = |s: Sign| layer(s).all(|r| r.lo >= p);
        Ok((below(Sign::Minus) && above(Sign::Plus)) || (above(Sign::Minus) && below(Sign::Plus)))
    }
}

pub fn cell_range(field: &ScalarField, spec: GridSpec, c: &Cell) -> Result<Interval> {
    field.cell_range(spec, c)
}

pub fn fiber_bracket(field: &ScalarField, spec: GridSpec, p: f64) -> Result<FiberBracket> {
    Ok(Analyzer::new(field, spec)?.bracket(p))
}

pub fn certify_not_conn(field: &ScalarField, spec: GridSpec, p: f64, i: usize) -> Result<bool> {
    Analyzer::new(field, spec)?.certify_not_conn(p, i)
}

pub fn certify_sep(field: &ScalarField, spec: GridSpec, p: f64, i: usize) -> Result<bool> {
    Analyzer::new(field, spec)?.certify_sep(p, i)
}

pub fn certify_not_sep(field: &ScalarField, spec: GridSpec, p: f64, i: usize) -> Result<bool> {
    Analyzer::new(field, spec)?.certify_not_sep(p, i)
}

pub fn certify_conn(field: &ScalarField, spec: GridSpec, p: f64, i: usize) -> Result<bool> {
    Analyzer::new(field, spec)?.certify_conn(p, i)
}

pub fn pm_sign_check(field: &ScalarField, spec: GridSpec, i: usize, p: f64) -> Result<bool> {
    Analyzer::new(field, spec)?.pm_sign_check(i, p)
}

/// A chain through the common outer fiber of `fields[m]` at `levels[m]`
/// joining the faces of `i0`. Each `fields[m]` must be sep-certified at its
/// level on axis `sigma[m]`, and `sigma` must enumerate the axes other than
/// `i0`.
pub fn pm_product_witness(
    fields: &[ScalarField],
    levels: &[f64],
    sigma: &[usize],
    i0: usize,
    spec: GridSpec,
) -> Result<Chain> {
    let n = spec.n();
    spec.check_axis(i0)?;
    if fields.len() + 1 != n || levels.len() != fields.len() || sigma.len() != fields.len() {
        return Err(Error::usage(format!("need {} fields, levels and axis assignments", n - 1)));
    }
    let mut assigned: Vec<usize> = sigma.to_vec();
    assigned.push(i0);
    assigned.sort_unstable();
    if assigned != (1..=n).collect::<Vec<_>>() {
        return Err(Error::usage(format!("axes {sigma:?} with {i0} are not a permutation of 1..={n}")));
    }
    let mut common = CellSet::full(spec);
    for ((f, &p), &axis) in fields.iter().zip(levels).zip(sigma) {
        let an = Analyzer::new(f, spec)?;
        let b = an.bracket(p);
        if an.sep_certified(&b) >> (axis - 1) & 1 == 0 {
            return Err(Error::usage(format!("level {p} is not certified to separate axis {axis} on {spec}")));
        }
        common = common.intersection(&b.outer);
    }
    topology::connects(&common, i0, 0)?.ok_or_else(|| {
        Error::Soundness(format!(
            "no chain on axis {i0} through the common outer fiber {:?} at levels {levels:?}",
            common.cells()
        ))
    })
}

/// Settings for [`bracket_sets`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// 1-based axes to report.
    pub axes: Vec<usize>,
    /// Grid resolutions, increasing.
    pub ks: Vec<usize>,
    /// Spacing of the level lattice.
    pub dp: f64,
    /// Cap on extra levels (degenerate cell values, vertex values) per grid.
    pub max_extra_levels: usize,
}

impl ScanConfig {
    pub fn new(axes: Vec<usize>, ks: Vec<usize>, dp: f64) -> Self {
        ScanConfig { axes, ks, dp, max_extra_levels: 256 }
    }
}

/// Certified sets on one axis as unions of closed level intervals; adjacent
/// scanned levels with the same verdict are merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AxisSets {
    pub axis: usize,
    pub conn_certified_in: Vec<(f64, f64)>,
    pub conn_certified_out: Vec<(f64, f64)>,
    pub sep_certified_in: Vec<(f64, f64)>,
    pub sep_certified_out: Vec<(f64, f64)>,
}

/// Scan of every level on one grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridScan {
    pub k: usize,
    pub value_range: Interval,
    pub levels: Vec<LevelVerdict>,
    pub axes: Vec<AxisSets>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedSets {
    pub dp: f64,
    pub scans: Vec<GridScan>,
    /// Levels certified at a coarse grid but not at a finer multiple of it.
    pub nesting_violations: Vec<String>,
}

impl CertifiedSets {
    pub fn finest(&self) -> &GridScan {
        self.scans.last().expect("at least one grid")
    }

    /// Axes on which the finest scan certified nothing positive.
    pub fn undetermined_axes(&self) -> Vec<usize> {
        self.finest()
            .axes
            .iter()
            .filter(|a| a.conn_certified_in.is_empty() && a.sep_certified_in.is_empty())
            .map(|a| a.axis)
            .collect()
    }
}

/// The level `m · dp`, exact when `1/dp` is an integer.
pub fn lattice_level(m: i64, dp: f64) -> f64 {
    let inv = (1.0 / dp).round();
    if (inv * dp - 1.0).abs() < 1e-12 {
        m as f64 / inv
    } else {
        m as f64 * dp
    }
}

fn lattice_index(p: f64, dp: f64) -> Option<i64> {
    let m = (p / dp).round() as i64;
    (lattice_level(m, dp) == p).then_some(m)
}

fn scan_levels(an: &Analyzer<'_>, dp: f64, cap: usize) -> Vec<f64> {
    let range = an.value_range();
    let first = (range.lo / dp).ceil() as i64;
    let last = (range.hi / dp).floor() as i64;
    let mut levels: Vec<f64> = (first..=last).map(|m| lattice_level(m, dp)).collect();
    let mut extra = an.degenerate_values();
    if let ScalarField::Vertex(v) = an.field() {
        extra.extend_from_slice(v.values());
        extra.sort_by(f64::total_cmp);
        extra.dedup();
    }
    if extra.len() > cap {
        let step = extra.len() as f64 / cap as f64;
        extra = (0..cap).map(|j| extra[(j as f64 * step) as usize]).collect();
    }
    levels.extend(extra);
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels
}

fn merge(levels: &[LevelVerdict], pick: impl Fn(&LevelVerdict) -> Verdict, want: Verdict) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut open = false;
    for lv in levels {
        if pick(lv) == want {
            if open {
                out.last_mut().expect("open run").1 = lv.p;
            } else {
                out.push((lv.p, lv.p));
                open = true;
            }
        } else {
            open = false;
        }
    }
    out
}

/// No `Out` verdict may sit between two `In` verdicts.
fn check_interval_structure(levels: &[LevelVerdict], pick: impl Fn(&LevelVerdict) -> Verdict, what: &str, k: usize) -> Result<()> {
    let ins: Vec<usize> = (0..levels.len()).filter(|&j| pick(&levels[j]) == Verdict::In).collect();
    if let (Some(&a), Some(&b)) = (ins.first(), ins.last()) {
        if let Some(bad) = (a..=b).find(|&j| pick(&levels[j]) == Verdict::Out) {
            return Err(Error::Soundness(format!(
                "{what} at k={k}: level {} certified out between certified levels {} and {}",
                levels[bad].p, levels[a].p, levels[b].p
            )));
        }
    }
    Ok(())
}

/// Scans every grid of the schedule and assembles the certified sets.
pub fn bracket_sets(field: &ScalarField, config: &ScanConfig) -> Result<CertifiedSets> {
    let n = field.dim();
    if config.ks.is_empty() {
        return Err(Error::usage("empty grid schedule"));
    }
    if !(config.dp > 0.0 && config.dp.is_finite()) {
        return Err(Error::usage(format!("scan resolution must be positive, got {}", config.dp)));
    }
    if config.ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("grid schedule must be strictly increasing"));
    }
    for &a in &config.axes {
        if a == 0 || a > n {
            return Err(Error::usage(format!("axis {a} outside 1..={n}")));
        }
    }
    let mut scans = Vec::new();
    for &k in &config.ks {
        let spec = GridSpec::new(n, k)?;
        let an = Analyzer::new(field, spec)?;
        let levels = scan_levels(&an, config.dp, config.max_extra_levels);
        let verdicts = levels.par_iter().map(|&p| an.level(p)).collect::<Result<Vec<_>>>()?;
        let mut axes = Vec::new();
        for &axis in &config.axes {
            let s = axis - 1;
            let conn = |lv: &LevelVerdict| lv.conn[s];
            let sep = |lv: &LevelVerdict| lv.sep[s];
            check_interval_structure(&verdicts, conn, &format!("conn on axis {axis}"), k)?;
            check_interval_structure(&verdicts, sep, &format!("sep on axis {axis}"), k)?;
            axes.push(AxisSets {
                axis,
                conn_certified_in: merge(&verdicts, conn, Verdict::In),
                conn_certified_out: merge(&verdicts, conn, Verdict::Out),
                sep_certified_in: merge(&verdicts, sep, Verdict::In),
                sep_certified_out: merge(&verdicts, sep, Verdict::Out),
            });
        }
        scans.push(GridScan { k, value_range: an.value_range(), levels: verdicts, axes });
    }
    let nesting_violations = nesting(&scans, &config.axes, config.dp);
    Ok(CertifiedSets { dp: config.dp, scans, nesting_violations })
}

/// Compares lattice levels common to two scans whose grids divide.
fn nesting(scans: &[GridScan], axes: &[usize], dp: f64) -> Vec<String> {
    let mut out = Vec::new();
    for (a, coarse) in scans.iter().enumerate() {
        for fine in &scans[a + 1..] {
            if fine.k % coarse.k != 0 {
                continue;
            }
            let fine_at: std::collections::HashMap<i64, &LevelVerdict> =
                fine.levels.iter().filter_map(|lv| lattice_index(lv.p, dp).map(|m| (m, lv))).collect();
            for lv in &coarse.levels {
                let Some(f) = lattice_index(lv.p, dp).and_then(|m| fine_at.get(&m)) else {
                    continue;
                };
                for &axis in axes {
                    let s = axis - 1;
                    for (what, c, g) in [("conn", lv.conn[s], f.conn[s]), ("sep", lv.sep[s], f.sep[s])] {
                        if c != Verdict::Undetermined && c != g {
                            out.push(format!(
                                "{what} on axis {axis} at level {}: {c:?} at k={} but {g:?} at k={}",
                                lv.p, coarse.k, fine.k
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}
