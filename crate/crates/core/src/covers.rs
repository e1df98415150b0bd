//! Covers seen through a finite sample of points.
//!
//! A countable cover `⟨Uₙ⟩` is recorded by the trace of each sample point,
//! `{n : x ∈ Uₙ}`. Large, γ- and (sample-relative) ω-covers become
//! statements about these traces, and gluing consecutive members along an
//! increasing `h` is exactly compression of every trace by `h`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::compression::{build_slalom, compress_unchecked};
use crate::epset::EpSet;
use crate::error::{LabError, Result};
use crate::qafun::QaFun;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointTrace {
    pub label: String,
    pub trace: EpSet,
}

/// One cover, as a trace per sample point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawCover", into = "RawCover")]
pub struct CoverTrace {
    points: Vec<PointTrace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawCover {
    pub points: Vec<PointTrace>,
}

impl TryFrom<RawCover> for CoverTrace {
    type Error = LabError;

    fn try_from(raw: RawCover) -> Result<Self> {
        CoverTrace::new(raw.points.into_iter().map(|p| (p.label, p.trace)))
    }
}

impl From<CoverTrace> for RawCover {
    fn from(c: CoverTrace) -> Self {
        RawCover { points: c.points }
    }
}

pub(crate) fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.')
}

impl CoverTrace {
    pub fn new(points: impl IntoIterator<Item = (String, EpSet)>) -> Result<Self> {
        let points: Vec<PointTrace> = points
            .into_iter()
            .map(|(label, trace)| PointTrace { label, trace })
            .collect();
        if points.is_empty() {
            return Err(LabError::InvalidArgument("a cover needs at least one point".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !valid_label(&p.label) {
                return Err(LabError::InvalidArgument(format!("invalid point label {:?}", p.label)));
            }
            if points[..i].iter().any(|q| q.label == p.label) {
                return Err(LabError::InvalidArgument(format!("duplicate point label {:?}", p.label)));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PointTrace] {
        &self.points
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.points.iter().map(|p| p.label.as_str())
    }

    pub fn traces(&self) -> Vec<EpSet> {
        self.points.iter().map(|p| p.trace.clone()).collect()
    }

    pub fn trace(&self, label: &str) -> Option<&EpSet> {
        self.points.iter().find(|p| p.label == label).map(|p| &p.trace)
    }

    fn require_admissible(&self) -> Result<()> {
        match self.points.iter().find(|p| p.trace.is_empty()) {
            Some(p) => Err(LabError::EmptyTrace(p.label.clone())),
            None => Ok(()),
        }
    }

    fn map_traces(&self, f: impl Fn(&EpSet) -> EpSet) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| PointTrace {
                    label: p.label.clone(),
                    trace: f(&p.trace),
                })
                .collect(),
        }
    }
}

impl fmt::Display for CoverTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[points]")?;
        for p in &self.points {
            writeln!(f, "{}: {}", p.label, p.trace)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverTags {
    pub gamma: bool,
    pub large: bool,
    pub omega_rel: bool,
}

impl CoverTags {
    pub fn of(traces: &[EpSet]) -> Self {
        let meet = traces
            .iter()
            .skip(1)
            .fold(traces.first().cloned().unwrap_or_else(EpSet::naturals), |acc, t| acc.intersect(t));
        Self {
            gamma: traces.iter().all(EpSet::is_cofinite),
            large: traces.iter().all(EpSet::is_infinite),
            // intersections over subsets only grow, so the full one decides
            omega_rel: meet.is_infinite(),
        }
    }
}

impl fmt::Display for CoverTags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<&str> = [
            (self.gamma, "gamma"),
            (self.large, "large"),
            (self.omega_rel, "omega_rel"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        if tags.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&tags.join(","))
        }
    }
}

pub fn classify_cover(c: &CoverTrace) -> Result<CoverTags> {
    c.require_admissible()?;
    Ok(CoverTags::of(&c.traces()))
}

/// Replaces `⟨Uₙ⟩` by `Vₙ = ⋃{U_k : k ∈ [h(n), h(n+1))}`.
pub fn glue_cover(c: &CoverTrace, h: &QaFun) -> Result<CoverTrace> {
    h.require_increasing()?;
    c.require_admissible()?;
    Ok(c.map_traces(|t| compress_unchecked(t, h)))
}

/// Whether `s` and its complement both pick out large subcovers.
pub fn split_cover(c: &CoverTrace, s: &EpSet) -> Result<bool> {
    c.require_admissible()?;
    s.require_infinite()?;
    let sc = s.complement();
    Ok(c.points
        .iter()
        .all(|p| p.trace.intersect(s).is_infinite() && p.trace.intersect(&sc).is_infinite()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GlueCase {
    /// Every piece covers the sample.
    Case1,
    /// The unions of the pieces form a γ-cover of the sample.
    Case2,
}

/// Partition of the cover indices into the finite pieces
/// `[b(n), b(n+1))`, where `b(0) = 0` and `b(n)` for `n ≥ 1` is `h(n)`
/// (Case 2) or the selector `g(n) = h(e(n))` with `e` the increasing
/// enumeration of the covering windows (Case 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluePartition {
    pub mode: GlueCase,
    pub h: QaFun,
    pub selector: Option<QaFun>,
}

impl GluePartition {
    /// The boundary function `b`; strictly increasing with `b(0) = 0`.
    pub fn boundaries(&self) -> QaFun {
        let f = self.selector.as_ref().unwrap_or(&self.h);
        zero_at_origin(f)
    }

    /// The first `count` pieces.
    pub fn pieces(&self, count: u64) -> Vec<std::ops::Range<u64>> {
        let b = self.boundaries();
        (0..count).map(|n| b.eval(n)..b.eval(n + 1)).collect()
    }

    /// Re-checks the partition against the cover it was built for.
    pub fn verify(&self, c: &CoverTrace) -> bool {
        let b = self.boundaries();
        if !b.is_increasing() || b.eval(0) != 0 {
            return false;
        }
        match self.mode {
            GlueCase::Case2 => glue_cover(c, &self.h).is_ok_and(|glued| CoverTags::of(&glued.traces()).gamma),
            GlueCase::Case1 => c
                .points
                .iter()
                .all(|p| compress_unchecked(&p.trace, &b) == EpSet::naturals()),
        }
    }
}

fn zero_at_origin(f: &QaFun) -> QaFun {
    QaFun::tabulate(f.start().max(1), f.period(), f.incr(), |n| if n == 0 { 0 } else { f.eval(n) })
}

/// Partitions a large cover into finite pieces witnessing γ-glueability,
/// using the linear slalom of the traces as `h`.
pub fn gamma_glueable(c: &CoverTrace) -> Result<GluePartition> {
    gamma_glueable_with(c, None)
}

/// As [`gamma_glueable`], with an optional caller-supplied `h` (needed to
/// reach Case 1, since the built slalom always lands in Case 2).
pub fn gamma_glueable_with(c: &CoverTrace, forced_h: Option<&QaFun>) -> Result<GluePartition> {
    c.require_admissible()?;
    let traces = c.traces();
    for t in &traces {
        t.require_infinite()?;
    }
    let h = match forced_h {
        Some(h) => {
            h.require_increasing()?;
            h.clone()
        }
        None => build_slalom(&traces)?,
    };
    let covering = traces
        .iter()
        .map(|t| compress_unchecked(t, &h))
        .reduce(|a, b| a.intersect(&b))
        .expect("nonempty cover");
    if covering.is_cofinite() {
        return Ok(GluePartition {
            mode: GlueCase::Case2,
            h,
            selector: None,
        });
    }
    if !covering.is_infinite() {
        return Err(LabError::Unglueable(h.to_string()));
    }
    let selector = zero_at_origin(&h.compose(&covering.enumeration()?));
    Ok(GluePartition {
        mode: GlueCase::Case1,
        h,
        selector: Some(selector),
    })
}

/// Cyclically presented sequence of covers: round `k` uses `covers[k mod L]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct CoverSequence {
    covers: Vec<CoverTrace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSequence {
    pub covers: Vec<CoverTrace>,
}

impl TryFrom<RawSequence> for CoverSequence {
    type Error = LabError;

    fn try_from(raw: RawSequence) -> Result<Self> {
        CoverSequence::new(raw.covers)
    }
}

impl From<CoverSequence> for RawSequence {
    fn from(s: CoverSequence) -> Self {
        RawSequence { covers: s.covers }
    }
}

impl CoverSequence {
    pub fn new(covers: Vec<CoverTrace>) -> Result<Self> {
        let first = covers
            .first()
            .ok_or_else(|| LabError::InvalidArgument("a cover sequence needs at least one cover".into()))?;
        let labels: Vec<&str> = first.labels().collect();
        if let Some(i) = covers.iter().position(|c| !c.labels().eq(labels.iter().copied())) {
            return Err(LabError::InvalidArgument(format!(
                "cover {i} does not share the point list of cover 0"
            )));
        }
        Ok(Self { covers })
    }

    pub fn constant(c: CoverTrace) -> Self {
        Self { covers: vec![c] }
    }

    pub fn covers(&self) -> &[CoverTrace] {
        &self.covers
    }

    /// Rotates the cyclic list left by `r` positions.
    pub fn rotated(&self, r: usize) -> Self {
        let mut covers = self.covers.clone();
        let len = covers.len();
        covers.rotate_left(r % len);
        Self { covers }
    }
}

impl fmt::Display for CoverSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.covers.iter().enumerate() {
            writeln!(f, "[cover {i}]")?;
            for p in &c.points {
                writeln!(f, "{}: {}", p.label, p.trace)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    S1,
    Sfin,
    Ufin,
}

impl SelectionMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Some(SelectionMode::S1),
            "sfin" => Some(SelectionMode::Sfin),
            "ufin" => Some(SelectionMode::Ufin),
            _ => None,
        }
    }
}

/// How the selector picks at round `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PickSchedule {
    /// One member: index `p(k)`.
    Single(QaFun),
    /// Finitely many members: indices `[h(k), h(k+1))` for increasing `h`.
    Windows(QaFun),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionVerdict {
    pub mode: SelectionMode,
    /// Per point, the rounds whose selection contains it.
    pub hits: Vec<PointTrace>,
    pub tags: CoverTags,
    /// The mode's target class was missed (γ for Ufin, large otherwise).
    pub fails: bool,
}

impl SelectionVerdict {
    fn from_hits(mode: SelectionMode, hits: Vec<PointTrace>) -> Self {
        let sets: Vec<EpSet> = hits.iter().map(|p| p.trace.clone()).collect();
        let tags = CoverTags::of(&sets);
        let fails = match mode {
            SelectionMode::Ufin => !tags.gamma,
            SelectionMode::S1 | SelectionMode::Sfin => !tags.large,
        };
        Self { mode, hits, tags, fails }
    }

    /// Recomputes the tags from the stored hit sets.
    pub fn tags_consistent(&self) -> bool {
        *self == Self::from_hits(self.mode, self.hits.clone())
    }
}

/// Plays the selection game against a cyclic cover sequence with a fixed
/// schedule and returns the exact hit set of every point.
pub fn evaluate_selection(seq: &CoverSequence, schedule: &PickSchedule, mode: SelectionMode) -> Result<SelectionVerdict> {
    let f = match (mode, schedule) {
        (SelectionMode::S1, PickSchedule::Single(p)) => p,
        (SelectionMode::Sfin | SelectionMode::Ufin, PickSchedule::Windows(h)) => {
            h.require_increasing()?;
            h
        }
        _ => {
            return Err(LabError::ShapeMismatch(format!(
                "{mode:?} needs a {} schedule",
                if mode == SelectionMode::S1 { "single-pick" } else { "window" }
            )))
        }
    };
    for c in &seq.covers {
        c.require_admissible()?;
    }
    let len = seq.covers.len() as u64;
    let all = seq.covers.iter().flat_map(|c| c.points.iter().map(|p| &p.trace));
    let (bound, period) = all.fold((0u64, 1u64), |(b, p), t| (b.max(t.start()), p.lcm(&t.period())));
    // past `start`, the pick indices sit in every trace's periodic part and
    // `cycle` rounds shift them by a multiple of `period`
    let start = match schedule {
        PickSchedule::Single(p) => p.eventually_at_least(bound),
        PickSchedule::Windows(h) => h.start().max(bound),
    };
    let cycle = len.lcm(&(f.period() * (period / f.incr().gcd(&period))));
    let hits = seq.covers[0]
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let trace_at = |k: u64| &seq.covers[(k % len) as usize].points[i].trace;
            let trace = EpSet::from_fn(start, cycle, |k| match schedule {
                PickSchedule::Single(p) => trace_at(k).contains(p.eval(k)),
                PickSchedule::Windows(h) => trace_at(k).meets_window(h.eval(k), h.eval(k + 1)),
            });
            PointTrace {
                label: p.label.clone(),
                trace,
            }
        })
        .collect();
    Ok(SelectionVerdict::from_hits(mode, hits))
}
