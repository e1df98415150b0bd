//! Brute-force references. Everything here works from raw fields or from
//! pointwise evaluation, never from the canonical machinery it checks.

use num_integer::Integer;

use super::gen::{FunFields, SetFields};
use crate::epset::EpSet;
use crate::qafun::QaFun;

/// `2·(max start + lcm of periods) + 64`.
pub fn window(sets: &[&SetFields]) -> u64 {
    let start = sets.iter().map(|a| a.start).max().unwrap_or(0);
    let lcm = sets.iter().fold(1u64, |l, a| l.lcm(&a.period));
    2 * (start + lcm) + 64
}

/// `a ∖ b ⊆ [0, D)`, checked one full common period past `D`.
pub fn almost_subset(a: &SetFields, b: &SetFields) -> bool {
    let d = window(&[a, b]);
    let l = a.period.lcm(&b.period);
    (d..d + l).all(|n| !a.contains(n) || b.contains(n))
}

/// Infinite iff some residue past every start is a member.
pub fn is_infinite(member: impl Fn(u64) -> bool, settled: u64, period: u64) -> bool {
    (settled..settled + period).any(member)
}

pub fn is_cofinite(member: impl Fn(u64) -> bool, settled: u64, period: u64) -> bool {
    (settled..settled + period).all(member)
}

/// Agreement of a computed set with a predicate on `[0, bound)`.
pub fn agrees(a: &EpSet, bound: u64, member: impl Fn(u64) -> bool) -> Option<u64> {
    (0..bound).find(|&n| a.contains(n) != member(n))
}

/// A window for functions: `4·(largest table + lcm of periods) + 64`.
pub fn fun_window(fs: &[&FunFields]) -> u64 {
    let start = fs.iter().map(|f| f.table.len() as u64).max().unwrap_or(0);
    let lcm = fs.iter().fold(1u64, |l, f| l.lcm(&f.period));
    4 * (start + lcm) + 64
}

/// A point past which `g − f` keeps one sign on every residue class mod the
/// common period, together with that period.
///
/// On a class, `g − f` is `d₀ + kΔ` with `|d₀| ≤ M`, the largest value on
/// the first common period; when `Δ ≠ 0` the sign is settled once `k > M`.
pub fn settled(f: &QaFun, g: &QaFun) -> (u64, u64) {
    let s = f.start().max(g.start());
    let l = f.period().lcm(&g.period());
    let m = (s..s + l).map(|n| f.eval(n).max(g.eval(n))).max().unwrap_or(0);
    (s + l * (m + 1), l)
}

/// `f ≤* g`, by brute force past the settling point.
pub fn le_star(f: &QaFun, g: &QaFun) -> bool {
    let (t, l) = settled(f, g);
    (t..t + l).all(|n| f.eval(n) <= g.eval(n))
}

/// `[f ≤ g]` (or `[f < g]`) is infinite, by brute force.
pub fn le_infinite(f: &QaFun, g: &QaFun, strict: bool) -> bool {
    let (t, l) = settled(f, g);
    (t..t + l).any(|n| if strict { f.eval(n) < g.eval(n) } else { f.eval(n) <= g.eval(n) })
}

/// Window `n` of `h` meets `a`.
pub fn meets(a: &EpSet, h: &QaFun, n: u64) -> bool {
    (h.eval(n)..h.eval(n + 1)).any(|x| a.contains(x))
}

/// `a/h` is cofinite: past both starts, whether window `n` meets `a`
/// depends on `h(n) mod p` and the window width, both periodic in `n` with
/// period `period(h)·p`.
pub fn compressed_cofinite(a: &EpSet, h: &QaFun) -> bool {
    let s = a.start().max(h.start());
    (s..s + h.period() * a.period()).all(|n| meets(a, h, n))
}

pub fn compressed_infinite(a: &EpSet, h: &QaFun) -> bool {
    let s = a.start().max(h.start());
    (s..s + h.period() * a.period()).any(|n| meets(a, h, n))
}

/// Infinite / cofinite for a canonical set via a fixed brute window.
pub fn set_infinite(a: &EpSet) -> bool {
    is_infinite(|n| a.contains(n), a.start(), a.period())
}

pub fn set_cofinite(a: &EpSet) -> bool {
    is_cofinite(|n| a.contains(n), a.start(), a.period())
}

/// `a ⊆* b` for canonical sets, checked one common period past both starts.
pub fn set_almost_subset(a: &EpSet, b: &EpSet) -> bool {
    let s = a.start().max(b.start());
    let l = a.period().lcm(&b.period());
    (s..s + l).all(|n| !a.contains(n) || b.contains(n))
}
