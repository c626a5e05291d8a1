//! A c.e. preorder on `{c, d} ∪ {a_i} ∪ {b_j}` whose isomorphism type
//! encodes a Δ⁰₂ set `B` with `0 ∉ B`.
//!
//! The `b_j` form a descending chain below `d`; the `a_i` sit above `c`.
//! Each `a_i` eventually receives a threshold `v(i)` and then lies above
//! every `b_j` with `j ≥ v(i)`. The positive thresholds that survive are
//! exactly the members of `B`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seq::Delta02SetApprox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PElement {
    C,
    D,
    A(usize),
    B(usize),
}

impl fmt::Display for PElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PElement::C => write!(f, "c"),
            PElement::D => write!(f, "d"),
            PElement::A(i) => write!(f, "a{i}"),
            PElement::B(j) => write!(f, "b{j}"),
        }
    }
}

impl FromStr for PElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::format(format!("not a preorder element: {s:?}"));
        let index = |rest: &str| rest.parse::<usize>().map_err(|_| bad());
        match s {
            "c" => Ok(PElement::C),
            "d" => Ok(PElement::D),
            _ if s.starts_with('a') => Ok(PElement::A(index(&s[1..])?)),
            _ if s.starts_with('b') => Ok(PElement::B(index(&s[1..])?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for PElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VEventKind {
    Assign,
    Reset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VEvent {
    pub stage: u64,
    pub i: usize,
    pub value: u64,
    pub kind: VEventKind,
}

/// Staged thresholds `v(i)[s]`.
///
/// Thresholds are always handed to the least fresh `a_i`, so the defined
/// indices form an initial segment `0..defined_count()`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VTable {
    stage: u64,
    v: Vec<u64>,
    defined_at: Vec<u64>,
    changes: Vec<u8>,
    /// Indices currently holding each nonzero value.
    holders: BTreeMap<u64, BTreeSet<usize>>,
    events: Vec<VEvent>,
}

impl VTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// A table where `v(i) = values[i]`, as if assigned before stage 1.
    pub fn with_values(values: &[u64]) -> Self {
        let mut t = Self::new();
        for &v in values {
            t.define(v, 0);
        }
        t
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn defined_count(&self) -> usize {
        self.v.len()
    }

    pub fn v(&self, i: usize) -> Option<u64> {
        self.v.get(i).copied()
    }

    pub fn defined_at(&self, i: usize) -> Option<u64> {
        self.defined_at.get(i).copied()
    }

    pub fn change_count(&self, i: usize) -> u8 {
        self.changes.get(i).copied().unwrap_or(0)
    }

    pub fn max_changes(&self) -> u8 {
        self.changes.iter().copied().max().unwrap_or(0)
    }

    pub fn values(&self) -> &[u64] {
        &self.v
    }

    pub fn events(&self) -> &[VEvent] {
        &self.events
    }

    /// Indices `i` with `v(i) = x`.
    pub fn holders(&self, x: u64) -> Vec<usize> {
        if x == 0 {
            return (0..self.v.len()).filter(|&i| self.v[i] == 0).collect();
        }
        self.holders
            .get(&x)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    fn define(&mut self, value: u64, stage: u64) -> usize {
        let i = self.v.len();
        self.v.push(value);
        self.defined_at.push(stage);
        self.changes.push(0);
        if value != 0 {
            self.holders.entry(value).or_default().insert(i);
        }
        self.events.push(VEvent {
            stage,
            i,
            value,
            kind: VEventKind::Assign,
        });
        i
    }

    fn reset(&mut self, i: usize, stage: u64) -> Result<()> {
        if self.changes[i] > 0 || self.v[i] == 0 {
            return Err(Error::Invariant(format!(
                "v({i}) would change a second time at stage {stage}"
            )));
        }
        if let Some(set) = self.holders.get_mut(&self.v[i]) {
            set.remove(&i);
            if set.is_empty() {
                self.holders.remove(&self.v[i]);
            }
        }
        self.v[i] = 0;
        self.changes[i] += 1;
        self.events.push(VEvent {
            stage,
            i,
            value: 0,
            kind: VEventKind::Reset,
        });
        Ok(())
    }
}

/// Run stage `s + 1`. On even stages `B` is read as `g(x, s)`.
pub fn preorder_step(t: &mut VTable, g: &Delta02SetApprox) -> Result<()> {
    let s = t.stage;
    let next = s + 1;
    if next % 2 == 1 {
        t.define(0, next);
    } else {
        for x in 1..=s {
            let current: Vec<usize> = t
                .holders
                .get(&x)
                .map(|h| h.iter().copied().collect())
                .unwrap_or_default();
            match g.value(x as usize, s as usize) {
                0 => {
                    for i in current {
                        t.reset(i, next)?;
                    }
                }
                _ if current.is_empty() => {
                    t.define(x, next);
                }
                _ => {}
            }
        }
    }
    t.stage = next;
    Ok(())
}

pub fn run_preorder(g: &Delta02SetApprox, stages: u64) -> Result<VTable> {
    if stages == 0 {
        return Err(Error::input("stage budget must be at least 1"));
    }
    let mut t = VTable::new();
    for _ in 0..stages {
        preorder_step(&mut t, g)?;
    }
    Ok(t)
}

/// The preorder restricted to `c, d, a_0..a_{n_a}, b_0..b_{n_b}`, stored as
/// a closed bit matrix (`leq[x]` has bit `y` set iff `x ≤ y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreorderSnapshot {
    n_a: usize,
    n_b: usize,
    leq: Vec<Vec<u64>>,
}

impl PreorderSnapshot {
    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn size(&self) -> usize {
        2 + self.n_a + self.n_b
    }

    pub fn index(&self, x: PElement) -> Option<usize> {
        match x {
            PElement::C => Some(0),
            PElement::D => Some(1),
            PElement::A(i) if i < self.n_a => Some(2 + i),
            PElement::B(j) if j < self.n_b => Some(2 + self.n_a + j),
            _ => None,
        }
    }

    pub fn element(&self, idx: usize) -> PElement {
        match idx {
            0 => PElement::C,
            1 => PElement::D,
            _ if idx < 2 + self.n_a => PElement::A(idx - 2),
            _ => PElement::B(idx - 2 - self.n_a),
        }
    }

    fn bit(&self, x: usize, y: usize) -> bool {
        self.leq[x][y / 64] >> (y % 64) & 1 == 1
    }

    /// `x ≤ y`; `None` when either element lies outside the window.
    pub fn leq(&self, x: PElement, y: PElement) -> Option<bool> {
        Some(self.bit(self.index(x)?, self.index(y)?))
    }

    pub fn incomparable(&self, x: PElement, y: PElement) -> Option<bool> {
        Some(!self.leq(x, y)? && !self.leq(y, x)?)
    }

    pub fn matrix(&self) -> Vec<Vec<bool>> {
        let n = self.size();
        (0..n)
            .map(|x| (0..n).map(|y| self.bit(x, y)).collect())
            .collect()
    }

    pub fn pairs(&self) -> Vec<(PElement, PElement)> {
        let n = self.size();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.bit(x, y) {
                    out.push((self.element(x), self.element(y)));
                }
            }
        }
        out
    }

    /// Every positive fact of `self` also holds in `other` (same window).
    pub fn is_subrelation_of(&self, other: &PreorderSnapshot) -> bool {
        self.n_a == other.n_a
            && self.n_b == other.n_b
            && self
                .leq
                .iter()
                .zip(&other.leq)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x & !y == 0))
    }
}

/// Generating facts of the window: the fixed skeleton plus `b_{v(i)} ≤ a_i`.
pub fn generating_pairs(t: &VTable, n_a: usize, n_b: usize) -> Vec<(PElement, PElement)> {
    let mut out = Vec::new();
    for i in 0..n_a {
        out.push((PElement::C, PElement::A(i)));
        if let Some(v) = t.v(i) {
            if (v as usize) < n_b {
                out.push((PElement::B(v as usize), PElement::A(i)));
            }
        }
    }
    for j in 0..n_b {
        out.push((PElement::B(j), PElement::D));
        if j + 1 < n_b {
            out.push((PElement::B(j + 1), PElement::B(j)));
        }
    }
    out
}

pub fn materialize(t: &VTable, n_a: usize, n_b: usize) -> PreorderSnapshot {
    let mut snap = PreorderSnapshot {
        n_a,
        n_b,
        leq: Vec::new(),
    };
    let n = snap.size();
    let mut succ = vec![Vec::new(); n];
    for (x, y) in generating_pairs(t, n_a, n_b) {
        let (x, y) = (snap.index(x).unwrap(), snap.index(y).unwrap());
        succ[x].push(y);
    }
    let words = n.div_ceil(64);
    let mut leq = vec![vec![0u64; words]; n];
    let mut stack = Vec::new();
    for (src, row) in leq.iter_mut().enumerate() {
        row[src / 64] |= 1 << (src % 64);
        stack.push(src);
        while let Some(x) = stack.pop() {
            for &y in &succ[x] {
                if row[y / 64] >> (y % 64) & 1 == 0 {
                    row[y / 64] |= 1 << (y % 64);
                    stack.push(y);
                }
            }
        }
    }
    snap.leq = leq;
    snap
}

/// Window that shows every defined threshold.
pub fn default_window(t: &VTable) -> (usize, usize) {
    let n_b = t
        .values()
        .iter()
        .copied()
        .max()
        .map_or(1, |m| m as usize + 1);
    (t.defined_count(), n_b)
}

/// Number of `b_j` in the window incomparable with `a_i`.
pub fn incomparable_b_count(snap: &PreorderSnapshot, i: usize) -> Result<usize> {
    if i >= snap.n_a {
        return Err(Error::OutOfWindow {
            element: i,
            window: snap.n_a,
        });
    }
    Ok((0..snap.n_b)
        .filter(|&j| snap.incomparable(PElement::B(j), PElement::A(i)).unwrap())
        .count())
}

/// `{ v(i) : v(i) ≥ 1 }`.
pub fn fingerprint(t: &VTable) -> BTreeSet<u64> {
    t.values().iter().copied().filter(|&v| v >= 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimEntry {
    pub x: u64,
    pub in_b: bool,
    pub witnesses: Vec<usize>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub format: u32,
    pub stages: u64,
    pub horizon: u64,
    pub entries: Vec<ClaimEntry>,
    pub zero_count: usize,
    pub fingerprint: Vec<u64>,
    pub fingerprint_matches: bool,
    pub max_changes: u8,
}

impl ClaimReport {
    pub fn ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
            && self.zero_count as u64 >= self.horizon
            && self.fingerprint_matches
            && self.max_changes <= 1
    }
}

/// Stages after which every `x ≤ horizon` has been handled with settled `g`.
pub fn required_stages(g: &Delta02SetApprox, horizon: u64) -> u64 {
    g.settle_index() as u64 + 2 * (horizon + 1)
}

pub fn verify_claim(t: &VTable, g: &Delta02SetApprox, horizon: u64) -> Result<ClaimReport> {
    let required = required_stages(g, horizon);
    if t.stage() < required {
        return Err(Error::InsufficientHorizon {
            what: format!("thresholds up to {horizon}"),
            required,
            actual: t.stage(),
        });
    }
    let entries: Vec<ClaimEntry> = (1..=horizon)
        .map(|x| {
            let in_b = g.contains(x as usize);
            let witnesses = t.holders(x);
            let ok = witnesses.len() == usize::from(in_b);
            ClaimEntry {
                x,
                in_b,
                witnesses,
                ok,
            }
        })
        .collect();
    let fp: Vec<u64> = fingerprint(t)
        .into_iter()
        .filter(|&x| x <= horizon)
        .collect();
    let expected: Vec<u64> = (1..=horizon).filter(|&x| g.contains(x as usize)).collect();
    Ok(ClaimReport {
        format: 1,
        stages: t.stage(),
        horizon,
        entries,
        zero_count: t.holders(0).len(),
        fingerprint_matches: fp == expected,
        fingerprint: fp,
        max_changes: t.max_changes(),
    })
}

#[derive(Serialize, Deserialize)]
struct RawSnapshot {
    format: u32,
    na: usize,
    nb: usize,
    leq: Vec<(PElement, PElement)>,
}

impl Serialize for PreorderSnapshot {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSnapshot {
            format: 1,
            na: self.n_a,
            nb: self.n_b,
            leq: self.pairs(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PreorderSnapshot {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawSnapshot::deserialize(deserializer)?;
        let mut snap = PreorderSnapshot {
            n_a: raw.na,
            n_b: raw.nb,
            leq: Vec::new(),
        };
        let n = snap.size();
        snap.leq = vec![vec![0u64; n.div_ceil(64)]; n];
        for (x, y) in raw.leq {
            let (Some(x), Some(y)) = (snap.index(x), snap.index(y)) else {
                return Err(D::Error::custom(format!(
                    "pair ({x}, {y}) lies outside the window"
                )));
            };
            snap.leq[x][y / 64] |= 1 << (y % 64);
        }
        Ok(snap)
    }
}
