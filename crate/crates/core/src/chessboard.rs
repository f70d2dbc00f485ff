//! Chessboard witnesses: colorings of the grid always contain a color `i`
//! whose cells join the `i`th opposite faces, and integer fields with unit
//! steps always have a level that connects or separates.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cellset::CellSet;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::topology::{self, Chain, SeparationCertificate};

/// Default cap on exhaustive enumeration sizes.
pub const DEFAULT_ENUM_GUARD: u128 = 10_000_000;

/// A coloring of the cells with colors `1..=n`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    spec: GridSpec,
    colors: Vec<u8>,
}

impl Labeling {
    pub fn new(spec: GridSpec, colors: Vec<u8>) -> Result<Self> {
        if colors.len() != spec.cell_count() {
            return Err(Error::Parse(format!(
                "labeling on {spec} needs {} colors, got {}",
                spec.cell_count(),
                colors.len()
            )));
        }
        if let Some((l, &c)) = colors.iter().enumerate().find(|(_, &c)| c == 0 || c as usize > spec.n()) {
            return Err(Error::Parse(format!("cell {} has color {c}, expected 1..={}", spec.cell_at(l), spec.n())));
        }
        Ok(Labeling { spec, colors })
    }

    pub fn constant(spec: GridSpec, color: u8) -> Result<Self> {
        Self::new(spec, vec![color; spec.cell_count()])
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// `F⁻¹(color)`.
    pub fn class(&self, color: usize) -> CellSet {
        CellSet::from_fn(self.spec, |l| self.colors[l] as usize == color)
    }
}

/// An integer per cell; values of intersecting cells differ by at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerField {
    spec: GridSpec,
    values: Vec<i64>,
}

impl IntegerField {
    pub fn new(spec: GridSpec, values: Vec<i64>) -> Result<Self> {
        if values.len() != spec.cell_count() {
            return Err(Error::Parse(format!(
                "integer field on {spec} needs {} values, got {}",
                spec.cell_count(),
                values.len()
            )));
        }
        let f = IntegerField { spec, values };
        if let Some((a, b)) = f.lipschitz_violation() {
            return Err(Error::usage(format!(
                "not adjacency-Lipschitz: cells {} and {} intersect but hold {} and {}",
                spec.cell_at(a),
                spec.cell_at(b),
                f.values[a],
                f.values[b]
            )));
        }
        Ok(f)
    }

    /// Like [`IntegerField::new`] but returns `None` for non-Lipschitz input.
    pub fn checked(spec: GridSpec, values: Vec<i64>) -> Option<Self> {
        let f = IntegerField { spec, values };
        f.lipschitz_violation().is_none().then_some(f)
    }

    fn lipschitz_violation(&self) -> Option<(usize, usize)> {
        let spec = self.spec;
        let n = spec.n();
        let k = spec.k() as isize;
        let strides: Vec<isize> = (0..n).map(|s| k.pow(s as u32)).collect();
        for l in 0..spec.cell_count() {
            let idx = spec.cell_at(l);
            for code in 0..3usize.pow(n as u32) {
                let mut rest = code;
                let mut other = l as isize;
                let mut ok = true;
                for s in 0..n {
                    let d = (rest % 3) as isize - 1;
                    rest /= 3;
                    let c = idx.index()[s] as isize + d;
                    ok &= (1..=k).contains(&c);
                    other += d * strides[s];
                }
                if ok && other as usize > l && (self.values[l] - self.values[other as usize]).abs() > 1 {
                    return Some((l, other as usize));
                }
            }
        }
        None
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// `G⁻¹(p)`.
    pub fn level_set(&self, p: i64) -> CellSet {
        CellSet::from_fn(self.spec, |l| self.values[l] == p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub axis: usize,
    pub chain: Chain,
}

/// The smallest color `i` whose class connects the `i`th faces, with links of
/// dimension at least `i − 1` when `generalized`.
pub fn steinhaus_witness(f: &Labeling, generalized: bool) -> Result<Witness> {
    let spec = f.spec;
    for i in 1..=spec.n() {
        let d = if generalized { spec.adjacency_threshold(i)? } else { 0 };
        if let Some(chain) = topology::connects(&f.class(i), i, d)? {
            return Ok(Witness { axis: i, chain });
        }
    }
    Err(Error::Soundness(format!(
        "no {} chessboard witness on {spec}; labeling {:?}",
        if generalized { "generalized" } else { "plain" },
        f.colors
    )))
}

/// The smallest `i` for which `A_i` connects the `i`th faces with links of
/// dimension at least `i − 1`. The sets must cover the grid.
pub fn lebesgue_witness(sets: &[CellSet]) -> Result<Witness> {
    let Some(first) = sets.first() else {
        return Err(Error::usage("no sets given"));
    };
    let spec = first.spec();
    if sets.len() != spec.n() {
        return Err(Error::usage(format!("need {} sets on {spec}, got {}", spec.n(), sets.len())));
    }
    if let Some(s) = sets.iter().find(|s| s.spec() != spec) {
        return Err(Error::usage(format!("sets on different grids {spec} and {}", s.spec())));
    }
    let cover = sets.iter().fold(CellSet::empty(spec), |acc, s| acc.union(s));
    if !cover.is_full() {
        let missing = cover.complement().cells();
        return Err(Error::usage(format!("sets do not cover the grid; uncovered cells {missing:?}")));
    }
    for (s, set) in sets.iter().enumerate() {
        let i = s + 1;
        if let Some(chain) = topology::connects(set, i, spec.adjacency_threshold(i)?)? {
            return Ok(Witness { axis: i, chain });
        }
    }
    let dump: Vec<_> = sets.iter().map(|s| s.cells()).collect();
    Err(Error::Soundness(format!("no covering witness on {spec}; sets {dump:?}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum LevelOutcome {
    Connecting { p: i64, chain: Chain },
    Separating { p: i64, certificate: SeparationCertificate },
}

impl LevelOutcome {
    pub fn level(&self) -> i64 {
        match self {
            LevelOutcome::Connecting { p, .. } | LevelOutcome::Separating { p, .. } => *p,
        }
    }
}

/// The smallest level whose set connects axis `i`, or failing that the
/// smallest level whose set separates it.
pub fn separating_level(g: &IntegerField, i: usize) -> Result<LevelOutcome> {
    g.spec.check_axis(i)?;
    let lo = *g.values.iter().min().expect("nonempty grid");
    let hi = *g.values.iter().max().expect("nonempty grid");
    for p in lo..=hi {
        if let Some(chain) = topology::connects(&g.level_set(p), i, 0)? {
            return Ok(LevelOutcome::Connecting { p, chain });
        }
    }
    for p in lo..=hi {
        if let Some(certificate) = topology::separates(&g.level_set(p), i)? {
            return Ok(LevelOutcome::Separating { p, certificate });
        }
    }
    Err(Error::Soundness(format!(
        "no connecting or separating level on axis {i} of {}; values {:?}",
        g.spec, g.values
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    /// Every labeling, links of any dimension.
    Plain,
    /// Every labeling, links of dimension at least `i − 1`.
    Generalized,
    /// Every cover by `n` sets (each cell in a nonempty subset of them).
    Lebesgue,
    /// Every adjacency-Lipschitz field with values in `{0, 1, 2}`, all axes.
    Level,
}

impl VerifyMode {
    /// Choices per cell.
    fn base(self, n: usize) -> u128 {
        match self {
            VerifyMode::Plain | VerifyMode::Generalized => n as u128,
            VerifyMode::Lebesgue => (1u128 << n) - 1,
            VerifyMode::Level => LEVEL_VALUES as u128,
        }
    }
}

const LEVEL_VALUES: usize = 3;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Instances enumerated (or drawn).
    pub total: u64,
    /// Instances actually checked; fewer than `total` in level mode, where
    /// non-Lipschitz candidates are skipped.
    pub checked: u64,
    pub failures: u64,
    /// Witness color (or level branch) counts.
    pub histogram: BTreeMap<String, u64>,
    pub max_chain_len: usize,
    /// First few failures, replayable.
    pub failure_samples: Vec<String>,
}

const MAX_SAMPLES: usize = 5;

impl VerifyReport {
    fn merge(mut self, other: VerifyReport) -> VerifyReport {
        self.total += other.total;
        self.checked += other.checked;
        self.failures += other.failures;
        for (key, v) in other.histogram {
            *self.histogram.entry(key).or_default() += v;
        }
        self.max_chain_len = self.max_chain_len.max(other.max_chain_len);
        self.failure_samples.extend(other.failure_samples);
        self.failure_samples.truncate(MAX_SAMPLES);
        self
    }

    fn fail(&mut self, what: String) {
        self.failures += 1;
        if self.failure_samples.len() < MAX_SAMPLES {
            self.failure_samples.push(what);
        }
    }
}

/// Number of instances `exhaustive_verify` would enumerate.
pub fn enumeration_size(n: usize, k: usize, mode: VerifyMode) -> Result<u128> {
    let spec = GridSpec::new(n, k)?;
    let base = mode.base(n);
    let mut total: u128 = 1;
    for _ in 0..spec.cell_count() {
        total = total.checked_mul(base).unwrap_or(u128::MAX);
        if total == u128::MAX {
            break;
        }
    }
    Ok(total)
}

/// Checks one instance given by its per-cell digits.
fn check_instance(spec: GridSpec, mode: VerifyMode, digits: &[usize], report: &mut VerifyReport) {
    report.total += 1;
    let record = |report: &mut VerifyReport, outcome: Result<(String, Chain)>, set: &CellSet| match outcome {
        Ok((key, chain)) => match chain.verify(set) {
            Ok(()) => {
                *report.histogram.entry(key).or_default() += 1;
                report.max_chain_len = report.max_chain_len.max(chain.len());
            }
            Err(e) => report.fail(format!("invalid chain {chain:?}: {e}")),
        },
        Err(e) => report.fail(e.to_string()),
    };
    match mode {
        VerifyMode::Plain | VerifyMode::Generalized => {
            let colors = digits.iter().map(|&d| d as u8 + 1).collect();
            let f = Labeling::new(spec, colors).expect("digits are valid colors");
            report.checked += 1;
            let w = steinhaus_witness(&f, mode == VerifyMode::Generalized);
            let set = w.as_ref().map(|w| f.class(w.axis)).unwrap_or_else(|_| CellSet::empty(spec));
            record(report, w.map(|w| (w.axis.to_string(), w.chain)), &set);
        }
        VerifyMode::Lebesgue => {
            let n = spec.n();
            let sets: Vec<CellSet> =
                (0..n).map(|s| CellSet::from_fn(spec, |l| (digits[l] + 1) >> s & 1 == 1)).collect();
            report.checked += 1;
            let w = lebesgue_witness(&sets);
            let set = w.as_ref().map(|w| sets[w.axis - 1].clone()).unwrap_or_else(|_| CellSet::empty(spec));
            record(report, w.map(|w| (w.axis.to_string(), w.chain)), &set);
        }
        VerifyMode::Level => {
            let values = digits.iter().map(|&d| d as i64).collect();
            let Some(g) = IntegerField::checked(spec, values) else {
                return;
            };
            report.checked += 1;
            for i in 1..=spec.n() {
                check_level(&g, i, report);
            }
        }
    }
}

/// Runs `separating_level` and re-verifies whatever it returns.
fn check_level(g: &IntegerField, i: usize, report: &mut VerifyReport) {
    match separating_level(g, i) {
        Ok(LevelOutcome::Connecting { p, chain }) => match chain.verify(&g.level_set(p)) {
            Ok(()) => {
                *report.histogram.entry("connecting".into()).or_default() += 1;
                report.max_chain_len = report.max_chain_len.max(chain.len());
            }
            Err(e) => report.fail(format!("level {p} chain invalid: {e}")),
        },
        Ok(LevelOutcome::Separating { p, certificate }) => match certificate.verify(&g.level_set(p)) {
            Ok(()) => *report.histogram.entry("separating".into()).or_default() += 1,
            Err(e) => report.fail(format!("level {p} certificate invalid: {e}")),
        },
        Err(e) => report.fail(e.to_string()),
    }
}

/// Checks every instance of `mode` on the grid `(n, k)`.
pub fn exhaustive_verify(n: usize, k: usize, mode: VerifyMode, guard: u128) -> Result<VerifyReport> {
    let spec = GridSpec::new(n, k)?;
    let size = enumeration_size(n, k, mode)?;
    if size > guard {
        return Err(Error::usage(format!(
            "{size} instances of {mode:?} on {spec} exceed the limit {guard}; use randomized mode (--trials)"
        )));
    }
    let base = mode.base(n) as u64;
    let cells = spec.cell_count();
    const CHUNK: u64 = 1024;
    let chunks = (size as u64).div_ceil(CHUNK);
    let report = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut report = VerifyReport::default();
            let mut digits = vec![0usize; cells];
            for index in c * CHUNK..((c + 1) * CHUNK).min(size as u64) {
                let mut rest = index;
                for d in digits.iter_mut() {
                    *d = (rest % base) as usize;
                    rest /= base;
                }
                check_instance(spec, mode, &digits, &mut report);
            }
            report
        })
        .reduce(VerifyReport::default, VerifyReport::merge);
    Ok(report)
}

/// Random Lipschitz integer field: `floor(k · Σ a_s h_s(x_s) + b)` at cell
/// centres, with 1-Lipschitz zigzags `h_s` and `Σ |a_s| ≤ 1`.
pub fn random_lipschitz_field(spec: GridSpec, rng: &mut impl Rng) -> IntegerField {
    let (n, k) = (spec.n(), spec.k());
    let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm: f64 = weights.iter().map(|w: &f64| w.abs()).sum::<f64>().max(1.0);
    weights.iter_mut().for_each(|w| *w /= norm);
    let folds: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut t: Vec<f64> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0.0..1.0)).collect();
            t.sort_by(f64::total_cmp);
            t
        })
        .collect();
    // slope ±1 between successive fold points
    let zigzag = |x: f64, folds: &[f64]| {
        let (mut y, mut last, mut slope) = (0.0, 0.0, 1.0);
        for &t in folds.iter().filter(|&&t| t < x) {
            y += slope * (t - last);
            last = t;
            slope = -slope;
        }
        y + slope * (x - last)
    };
    let offset = rng.gen_range(0.0..3.0);
    let values = (0..spec.cell_count())
        .map(|l| {
            let c = spec.cell_at(l);
            let v: f64 = (0..n)
                .map(|s| weights[s] * zigzag((c.index()[s] as f64 - 0.5) / k as f64, &folds[s]))
                .sum();
            // shave a hair off the slope so rounding cannot push a step past 1
            (0.999_999 * k as f64 * v + offset).floor() as i64
        })
        .collect();
    IntegerField::new(spec, values).expect("construction is Lipschitz")
}

/// Seeded random instances of `mode`; trial `t` draws from a generator
/// seeded with `seed + t`, so any trial replays on its own.
pub fn randomized_verify(n: usize, k: usize, mode: VerifyMode, seed: u64, trials: u64) -> Result<VerifyReport> {
    let spec = GridSpec::new(n, k)?;
    let cells = spec.cell_count();
    let base = mode.base(n) as usize;
    let report = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t));
            let mut report = VerifyReport::default();
            if mode == VerifyMode::Level {
                let g = random_lipschitz_field(spec, &mut rng);
                report.total += 1;
                report.checked += 1;
                for i in 1..=n {
                    check_level(&g, i, &mut report);
                }
            } else {
                let digits: Vec<usize> = (0..cells).map(|_| rng.gen_range(0..base)).collect();
                check_instance(spec, mode, &digits, &mut report);
            }
            report
        })
        .reduce(VerifyReport::default, VerifyReport::merge);
    Ok(report)
}
