//! Ultimately periodic sequences and the two-argument approximation tables
//! built from them. Every `lim`/`lim inf` over stages is computed exactly
//! from the periodic tail.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::Natural;

/// `prefix` followed by `period` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UltimatelyPeriodic<N> {
    prefix: Vec<N>,
    period: Vec<N>,
}

/// Limit data of an ultimately periodic sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits<N> {
    pub liminf: N,
    pub limsup: N,
    /// Present iff the tail is constant.
    pub limit: Option<N>,
}

impl<N: Natural> UltimatelyPeriodic<N> {
    pub fn new(prefix: Vec<N>, period: Vec<N>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::input(
                "ultimately periodic sequence needs a nonempty period",
            ));
        }
        Ok(Self { prefix, period })
    }

    pub fn constant(value: N) -> Self {
        Self {
            prefix: Vec::new(),
            period: vec![value],
        }
    }

    pub fn prefix(&self) -> &[N] {
        &self.prefix
    }

    pub fn period(&self) -> &[N] {
        &self.period
    }

    /// Value at index `s`.
    pub fn eval(&self, s: usize) -> N {
        match self.prefix.get(s) {
            Some(&v) => v,
            None => self.period[(s - self.prefix.len()) % self.period.len()],
        }
    }

    pub fn limits(&self) -> Limits<N> {
        let liminf = *self.period.iter().min().expect("period is nonempty");
        let limsup = *self.period.iter().max().expect("period is nonempty");
        Limits {
            liminf,
            limsup,
            limit: (liminf == limsup).then_some(liminf),
        }
    }

    /// Index from which the sequence is purely periodic.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }

    /// Nondecreasing along its whole evaluation order (forces a constant tail).
    pub fn is_nondecreasing(&self) -> bool {
        let tail_constant = self.period.windows(2).all(|w| w[0] == w[1]);
        tail_constant
            && self
                .prefix
                .iter()
                .chain(std::iter::once(&self.period[0]))
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[0] <= w[1])
    }

    pub fn values(&self) -> impl Iterator<Item = N> + '_ {
        self.prefix.iter().chain(self.period.iter()).copied()
    }
}

#[derive(Serialize, Deserialize)]
struct RawSeq<N> {
    #[serde(default = "Vec::new")]
    prefix: Vec<N>,
    period: Vec<N>,
}

impl<N: Natural + Serialize> Serialize for UltimatelyPeriodic<N> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSeq {
            prefix: self.prefix.clone(),
            period: self.period.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de, N: Natural + Deserialize<'de>> Deserialize<'de> for UltimatelyPeriodic<N> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSeq::<N>::deserialize(deserializer)?;
        UltimatelyPeriodic::new(raw.prefix, raw.period).map_err(D::Error::custom)
    }
}

/// `g(x, s)` for `x < K`, one ultimately periodic column per argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "N: Natural + Serialize",
    deserialize = "N: Natural + Deserialize<'de>"
))]
pub struct ApproxTable<N> {
    columns: Vec<UltimatelyPeriodic<N>>,
}

impl<N: Natural> ApproxTable<N> {
    pub fn new(columns: Vec<UltimatelyPeriodic<N>>) -> Self {
        Self { columns }
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[UltimatelyPeriodic<N>] {
        &self.columns
    }

    pub fn column(&self, x: usize) -> Result<&UltimatelyPeriodic<N>> {
        self.columns.get(x).ok_or_else(|| {
            Error::input(format!(
                "column {x} out of range (K = {})",
                self.columns.len()
            ))
        })
    }

    /// `g(x, s)`, or `default` for columns beyond the table.
    pub fn value_or(&self, x: usize, s: usize, default: N) -> N {
        self.columns.get(x).map_or(default, |c| c.eval(s))
    }
}

/// A {0,1}-valued approximation `B(x) = lim_s g(x, s)` of a set with `0 ∉ B`.
/// Columns beyond the table approximate non-members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Delta02SetApprox {
    table: ApproxTable<u64>,
}

impl Delta02SetApprox {
    pub fn new(table: ApproxTable<u64>) -> Result<Self> {
        for (x, col) in table.columns().iter().enumerate() {
            if col.values().any(|v| v > 1) {
                return Err(Error::input(format!(
                    "column {x} has a value outside {{0,1}}"
                )));
            }
            if col.limits().limit.is_none() {
                return Err(Error::input(format!(
                    "column {x} has no limit (non-constant period)"
                )));
            }
        }
        if let Some(c0) = table.columns().first() {
            if c0.limits().limit != Some(0) {
                return Err(Error::input(
                    "column 0 must have limit 0 (0 is never a member)",
                ));
            }
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &ApproxTable<u64> {
        &self.table
    }

    /// Number of declared columns.
    pub fn width(&self) -> usize {
        self.table.width()
    }

    pub fn value(&self, x: usize, s: usize) -> u64 {
        self.table.value_or(x, s, 0)
    }

    /// Exact limit membership.
    pub fn contains(&self, x: usize) -> bool {
        self.table
            .columns()
            .get(x)
            .is_some_and(|c| c.limits().limit == Some(1))
    }

    /// Stage after which every column has settled: the longest prefix plus
    /// one period.
    pub fn settle_index(&self) -> usize {
        self.table
            .columns()
            .iter()
            .map(|c| c.tail_start() + c.period().len())
            .max()
            .unwrap_or(0)
    }
}

impl<'de> Deserialize<'de> for Delta02SetApprox {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let table = ApproxTable::<u64>::deserialize(deserializer)?;
        Delta02SetApprox::new(table).map_err(D::Error::custom)
    }
}
