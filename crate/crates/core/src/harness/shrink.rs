//! Greedy shrinking of failing inputs.
//!
//! Candidates are tried in order and the first one that still fails is
//! kept, until no candidate fails or the step limit is hit.

use super::gen::{FunFields, SetFields};
use crate::covers::{CoverSequence, CoverTrace};
use crate::epset::EpSet;
use crate::qafun::QaFun;

pub trait Shrink: Sized {
    /// Strictly smaller variants, most aggressive first.
    fn shrink(&self) -> Vec<Self>;
}

pub const MAX_STEPS: usize = 500;

/// Shrinks `input` while `fails` keeps holding. Returns the minimised input
/// and the number of accepted steps.
pub fn minimise<T: Shrink + Clone>(input: &T, fails: impl Fn(&T) -> bool) -> (T, usize) {
    let mut cur = input.clone();
    let mut steps = 0;
    'outer: while steps < MAX_STEPS {
        for cand in cur.shrink() {
            if fails(&cand) {
                cur = cand;
                steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    (cur, steps)
}

fn smaller_u64(x: u64, floor: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if x > floor {
        out.push(floor);
        let half = floor + (x - floor) / 2;
        if half != floor {
            out.push(half);
        }
        if x - 1 != half && x - 1 != floor {
            out.push(x - 1);
        }
    }
    out
}

fn drop_each<T: Clone>(xs: &[T]) -> Vec<Vec<T>> {
    (0..xs.len())
        .map(|i| {
            let mut v = xs.to_vec();
            v.remove(i);
            v
        })
        .collect()
}

impl Shrink for u64 {
    fn shrink(&self) -> Vec<Self> {
        smaller_u64(*self, 0)
    }
}

impl Shrink for SetFields {
    fn shrink(&self) -> Vec<Self> {
        let mut out = Vec::new();
        for p in smaller_u64(self.period, 1) {
            let pattern: Vec<u64> = self.pattern.iter().copied().filter(|&r| r < p).collect();
            out.push(SetFields {
                period: p,
                pattern,
                ..self.clone()
            });
        }
        for s in smaller_u64(self.start, 0) {
            out.push(SetFields {
                start: s,
                prefix: self.prefix.iter().copied().filter(|&x| x < s).collect(),
                ..self.clone()
            });
        }
        for pattern in drop_each(&self.pattern) {
            out.push(SetFields {
                pattern,
                ..self.clone()
            });
        }
        for prefix in drop_each(&self.prefix) {
            out.push(SetFields { prefix, ..self.clone() });
        }
        out
    }
}

impl Shrink for EpSet {
    fn shrink(&self) -> Vec<Self> {
        let fields = SetFields {
            prefix: self.prefix().to_vec(),
            start: self.start(),
            period: self.period(),
            pattern: self.pattern().to_vec(),
        };
        let mut out: Vec<EpSet> = Vec::new();
        for c in fields.shrink() {
            let a = c.build();
            // stays in the infinite class when the original was infinite
            if (a.is_infinite() || !self.is_infinite()) && a != *self && !out.contains(&a) {
                out.push(a);
            }
        }
        out
    }
}

impl Shrink for FunFields {
    fn shrink(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if !self.table.is_empty() {
            out.push(FunFields {
                table: Vec::new(),
                ..self.clone()
            });
            out.push(FunFields {
                table: self.table[1..].to_vec(),
                ..self.clone()
            });
        }
        if self.period > 1 {
            out.push(FunFields {
                period: 1,
                base: vec![self.base[0]],
                incr: self.incr / self.period,
                ..self.clone()
            });
        }
        for incr in smaller_u64(self.incr, 0) {
            out.push(FunFields { incr, ..self.clone() });
        }
        for (i, &b) in self.base.iter().enumerate() {
            for v in smaller_u64(b, 0) {
                let mut base = self.base.clone();
                base[i] = v;
                out.push(FunFields { base, ..self.clone() });
            }
        }
        out
    }
}

impl Shrink for QaFun {
    fn shrink(&self) -> Vec<Self> {
        let fields = FunFields {
            table: self.table().to_vec(),
            period: self.period(),
            incr: self.incr(),
            base: self.base().to_vec(),
        };
        let mut out: Vec<QaFun> = Vec::new();
        for c in fields.shrink() {
            let f = c.build();
            // keep the monotonicity class of the original
            let same_class = (f.is_increasing() || !self.is_increasing())
                && (f.is_nondecreasing() || !self.is_nondecreasing());
            if same_class && f != *self && !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }
}

impl<T: Shrink + Clone> Shrink for Vec<T> {
    fn shrink(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.len() > 1 {
            out.extend(drop_each(self));
        }
        for i in 0..self.len() {
            for c in self[i].shrink() {
                let mut v = self.clone();
                v[i] = c;
                out.push(v);
            }
        }
        out
    }
}

impl<A: Shrink + Clone, B: Shrink + Clone> Shrink for (A, B) {
    fn shrink(&self) -> Vec<Self> {
        let mut out: Vec<Self> = self.0.shrink().into_iter().map(|a| (a, self.1.clone())).collect();
        out.extend(self.1.shrink().into_iter().map(|b| (self.0.clone(), b)));
        out
    }
}

impl<A: Shrink + Clone, B: Shrink + Clone, C: Shrink + Clone> Shrink for (A, B, C) {
    fn shrink(&self) -> Vec<Self> {
        let mut out: Vec<Self> = self
            .0
            .shrink()
            .into_iter()
            .map(|a| (a, self.1.clone(), self.2.clone()))
            .collect();
        out.extend(self.1.shrink().into_iter().map(|b| (self.0.clone(), b, self.2.clone())));
        out.extend(self.2.shrink().into_iter().map(|c| (self.0.clone(), self.1.clone(), c)));
        out
    }
}

impl Shrink for CoverTrace {
    fn shrink(&self) -> Vec<Self> {
        let points: Vec<(String, EpSet)> = self
            .points()
            .iter()
            .map(|p| (p.label.clone(), p.trace.clone()))
            .collect();
        let mut out = Vec::new();
        if points.len() > 1 {
            for v in drop_each(&points) {
                out.extend(CoverTrace::new(v).ok());
            }
        }
        for i in 0..points.len() {
            for t in points[i].1.shrink() {
                if t.is_empty() {
                    continue;
                }
                let mut v = points.clone();
                v[i].1 = t;
                out.extend(CoverTrace::new(v).ok());
            }
        }
        out
    }
}

impl Shrink for CoverSequence {
    fn shrink(&self) -> Vec<Self> {
        let covers = self.covers().to_vec();
        let mut out = Vec::new();
        if covers.len() > 1 {
            for v in drop_each(&covers) {
                out.extend(CoverSequence::new(v).ok());
            }
        }
        for i in 0..covers.len() {
            for c in covers[i].shrink() {
                let mut v = covers.clone();
                v[i] = c;
                out.extend(CoverSequence::new(v).ok());
            }
        }
        out
    }
}
