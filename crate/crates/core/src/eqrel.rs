//! Equivalence relations on a finite window `[0, window)` of ω, class
//! characters, and the spectrum induced by a limitwise monotonic function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seq::ApproxTable;

/// An equivalence relation on `[0, window)`, stored as a union-find forest
/// with union by size. Queries never mutate, so snapshots can be shared.
#[derive(Clone, Debug)]
pub struct Partition {
    parent: Vec<usize>,
    size: Vec<usize>,
    min: Vec<usize>,
    mentioned: BTreeSet<usize>,
}

impl Partition {
    /// The identity relation on `[0, window)`.
    pub fn identity(window: usize) -> Self {
        Self {
            parent: (0..window).collect(),
            size: vec![1; window],
            min: (0..window).collect(),
            mentioned: BTreeSet::new(),
        }
    }

    pub fn window(&self) -> usize {
        self.parent.len()
    }

    fn check(&self, x: usize) -> Result<()> {
        if x < self.window() {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                element: x,
                window: self.window(),
            })
        }
    }

    fn root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Coarsen so that `x ~ y`.
    pub fn merge(&mut self, x: usize, y: usize) -> Result<()> {
        self.check(x)?;
        self.check(y)?;
        self.mentioned.insert(x);
        self.mentioned.insert(y);
        let (mut a, mut b) = (self.root(x), self.root(y));
        if a == b {
            return Ok(());
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.min[a] = self.min[a].min(self.min[b]);
        Ok(())
    }

    /// Functional form of [`Partition::merge`].
    pub fn merged(mut self, x: usize, y: usize) -> Result<Self> {
        self.merge(x, y)?;
        Ok(self)
    }

    /// Enlarge the window; new elements are singletons.
    pub fn grow(&mut self, window: usize) {
        for x in self.window()..window {
            self.parent.push(x);
            self.size.push(1);
            self.min.push(x);
        }
    }

    pub fn same_class(&self, x: usize, y: usize) -> Result<bool> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.root(x) == self.root(y))
    }

    pub fn class_size(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.size[self.root(x)])
    }

    /// Least element of the class of `x`.
    pub fn class_min(&self, x: usize) -> Result<usize> {
        self.check(x)?;
        Ok(self.min[self.root(x)])
    }

    pub fn mentioned(&self) -> &BTreeSet<usize> {
        &self.mentioned
    }

    /// Minimum of the oldest class (least minimum) having exactly `k` elements.
    pub fn oldest_class_min(&self, k: usize) -> Option<usize> {
        (0..self.window()).find(|&x| {
            let r = self.root(x);
            self.min[r] == x && self.size[r] == k
        })
    }

    pub fn has_class_of_size(&self, k: usize) -> bool {
        self.oldest_class_min(k).is_some()
    }

    /// All classes, sorted by minimum, members ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.window() {
            by_root.entry(self.root(x)).or_default().push(x);
        }
        let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    /// The relation restricted to `[0, window)`.
    pub fn restrict(&self, window: usize) -> Partition {
        let window = window.min(self.window());
        let mut p = Partition::identity(window);
        for class in self.classes() {
            let inside: Vec<usize> = class.into_iter().take_while(|&x| x < window).collect();
            for pair in inside.windows(2) {
                p.merge(pair[0], pair[1])
                    .expect("restricted members lie in window");
            }
        }
        p.mentioned = self.mentioned.range(..window).copied().collect();
        p
    }

    /// `self ⊆ other` as relations on the common window.
    pub fn refines(&self, other: &Partition) -> bool {
        let w = self.window().min(other.window());
        let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
        (0..w).all(|x| {
            let theirs = other.root(x);
            *rep.entry(self.root(x)).or_insert(theirs) == theirs
        })
    }

    pub fn from_classes(window: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut p = Partition::identity(window);
        let mut seen = BTreeSet::new();
        for class in classes {
            for &x in class {
                p.check(x)?;
                if !seen.insert(x) {
                    return Err(Error::format(format!("element {x} listed in two classes")));
                }
            }
            for pair in class.windows(2) {
                p.merge(pair[0], pair[1])?;
            }
        }
        Ok(p)
    }

    /// Character over the classes whose minimum lies in `stable_only`.
    pub fn character_of(&self, stable_only: &BTreeSet<usize>) -> Character {
        let mut ch = Character::default();
        for x in stable_only.range(..self.window()) {
            let r = self.root(*x);
            if self.min[r] == *x {
                ch.add(Card::Finite(self.size[r] as u64), 1);
            }
        }
        ch
    }

    /// Character over every class in the window.
    pub fn character(&self) -> Character {
        self.character_of(&(0..self.window()).collect())
    }
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.window() == other.window() && self.classes() == other.classes()
    }
}

impl Eq for Partition {}

#[derive(Serialize, Deserialize)]
struct RawPartition {
    window: usize,
    classes: Vec<Vec<usize>>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawPartition {
            window: self.window(),
            classes: self.classes(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPartition::deserialize(deserializer)?;
        Partition::from_classes(raw.window, &raw.classes).map_err(D::Error::custom)
    }
}

/// A cardinal in `ω ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Card {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Card::Finite(n) => serializer.serialize_u64(*n),
            Card::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(n) => Ok(Card::Finite(n)),
            Raw::Str(s) if s == "inf" => Ok(Card::Infinite),
            Raw::Str(s) => Err(D::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Which class sizes occur, and how often: `size ↦ count`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Character {
    entries: BTreeMap<Card, Card>,
}

impl Character {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `count` classes of the given size. Zero-count additions are ignored.
    pub fn add(&mut self, size: Card, count: u64) {
        if count == 0 {
            return;
        }
        let slot = self.entries.entry(size).or_insert(Card::Finite(0));
        if let Card::Finite(c) = slot {
            *c += count;
        }
    }

    pub fn insert(&mut self, size: Card, count: Card) {
        if count != Card::Finite(0) {
            self.entries.insert(size, count);
        }
    }

    pub fn count(&self, size: Card) -> Option<Card> {
        self.entries.get(&size).copied()
    }

    pub fn count_finite(&self, size: u64) -> u64 {
        match self.count(Card::Finite(size)) {
            Some(Card::Finite(c)) => c,
            Some(Card::Infinite) => u64::MAX,
            None => 0,
        }
    }

    pub fn has_size(&self, size: u64) -> bool {
        self.entries.contains_key(&Card::Finite(size))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Card, Card)> + '_ {
        self.entries.iter().map(|(&s, &c)| (s, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(u64, u64)> for Character {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        let mut ch = Character::new();
        for (size, count) in iter {
            ch.add(Card::Finite(size), count);
        }
        ch
    }
}

#[derive(Serialize, Deserialize)]
struct RawCharacter {
    entries: Vec<(Card, Card)>,
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawCharacter {
            entries: self.entries().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCharacter::deserialize(deserializer)?;
        let mut ch = Character::new();
        for (size, count) in raw.entries {
            if size == Card::Finite(0) {
                return Err(D::Error::custom("class size 0 is not allowed"));
            }
            if ch.entries.insert(size, count).is_some() {
                return Err(D::Error::custom(format!("size {size} listed twice")));
            }
        }
        ch.entries.retain(|_, c| *c != Card::Finite(0));
        Ok(ch)
    }
}

/// Columns `f(x, ·)` that are nondecreasing in the stage, hence convergent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LmFunctionTable {
    table: ApproxTable<u64>,
}

impl LmFunctionTable {
    pub fn new(table: ApproxTable<u64>) -> Result<Self> {
        for (x, col) in table.columns().iter().enumerate() {
            if !col.is_nondecreasing() {
                return Err(Error::input(format!(
                    "column {x} is not nondecreasing in the stage"
                )));
            }
            if col.limits().liminf == 0 {
                return Err(Error::input(format!(
                    "column {x} converges to 0, which is not a class size"
                )));
            }
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &ApproxTable<u64> {
        &self.table
    }

    /// `κ ↦ |{x : lim_s f(x, s) = κ}|`.
    pub fn spectrum(&self) -> Character {
        let mut ch = Character::new();
        for col in self.table.columns() {
            let limit = col.limits().limit.expect("monotone columns converge");
            ch.add(Card::Finite(limit), 1);
        }
        ch
    }
}

impl<'de> Deserialize<'de> for LmFunctionTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let table = ApproxTable::<u64>::deserialize(deserializer)?;
        LmFunctionTable::new(table).map_err(D::Error::custom)
    }
}

/// Spectrum of a limitwise monotonic approximation given as a raw table.
pub fn lm_spectrum(table: &ApproxTable<u64>) -> Result<Character> {
    Ok(LmFunctionTable::new(table.clone())?.spectrum())
}
