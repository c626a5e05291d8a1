//! Co-c.e. equivalence relation whose class labelled `k` has exactly
//! `lim inf_s g(k, s)` elements.
//!
//! At the end of stage `s` every element of `A[s]` carries a label in
//! `{0, …, s-1}`; elements with distinct labels are permanently separated.
//! Label classes are grown with fresh elements and shrunk by dropping their
//! greatest members, so each class tracks `g(k, s)` exactly while its least
//! members survive the dips.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::eqrel::Partition;
use crate::error::{Error, Result};
use crate::seq::{ApproxTable, UltimatelyPeriodic};

/// `g(k, s) ≥ 1`; columns beyond the table are constantly 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct GTable {
    table: ApproxTable<u64>,
}

impl GTable {
    /// Zero entries are raised to 1: a class size is never 0, and the
    /// `lim inf` of the column is unchanged wherever it was positive.
    pub fn new(table: ApproxTable<u64>) -> Self {
        let columns = table
            .columns()
            .iter()
            .map(|c| {
                let lift = |v: &[u64]| v.iter().map(|&x| x.max(1)).collect::<Vec<_>>();
                UltimatelyPeriodic::new(lift(c.prefix()), lift(c.period()))
                    .expect("period stays nonempty")
            })
            .collect();
        Self {
            table: ApproxTable::new(columns),
        }
    }

    pub fn table(&self) -> &ApproxTable<u64> {
        &self.table
    }

    pub fn width(&self) -> usize {
        self.table.width()
    }

    pub fn value(&self, k: usize, s: u64) -> u64 {
        self.table.value_or(k, s as usize, 1)
    }

    pub fn column(&self, k: usize) -> UltimatelyPeriodic<u64> {
        self.table
            .columns()
            .get(k)
            .cloned()
            .unwrap_or_else(|| UltimatelyPeriodic::constant(1))
    }
}

impl<'de> Deserialize<'de> for GTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let table = ApproxTable::<u64>::deserialize(deserializer)?;
        if table.columns().is_empty() {
            return Err(D::Error::custom("g table needs at least one column"));
        }
        Ok(GTable::new(table))
    }
}

/// What happened during one stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDelta {
    pub stage: u64,
    /// Element that received the new label `stage - 1`.
    pub founder: usize,
    /// `(element, label)` pairs assigned from fresh elements.
    pub added: Vec<(usize, usize)>,
    /// `(element, label)` pairs that lost their label.
    pub removed: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi01Trace {
    pub format: u32,
    pub stages: Vec<StageDelta>,
}

impl Pi01Trace {
    pub fn len(&self) -> u64 {
        self.stages.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Label transitions `(stage, label)` of element `x`, in order.
    pub fn history(&self, x: usize) -> Vec<(u64, Option<usize>)> {
        let mut out = Vec::new();
        for d in &self.stages {
            if d.founder == x {
                out.push((d.stage, Some(d.stage as usize - 1)));
            }
            for &(y, k) in &d.added {
                if y == x {
                    out.push((d.stage, Some(k)));
                }
            }
            for &(y, _) in &d.removed {
                if y == x {
                    out.push((d.stage, None));
                }
            }
        }
        out
    }

    /// Replay the deltas into a [`LabelState`] after `stage` stages.
    pub fn state_at(&self, stage: u64) -> LabelState {
        let mut st = LabelState::new();
        for d in self.stages.iter().take(stage as usize) {
            st.apply(d);
        }
        st
    }
}

/// `A[s]` and the labelling `ℓ[s]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelState {
    stage: u64,
    /// `label[x]` for every element that has ever been in `A`.
    label: Vec<Option<usize>>,
    /// Current members of each label class.
    members: Vec<BTreeSet<usize>>,
    /// Non-fresh elements currently outside `A`.
    idle: BTreeSet<usize>,
}

impl LabelState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    /// Least fresh element; everything below it has been in `A` at some stage.
    pub fn next_fresh(&self) -> usize {
        self.label.len()
    }

    pub fn label(&self, x: usize) -> Option<usize> {
        self.label.get(x).copied().flatten()
    }

    pub fn class(&self, k: usize) -> Option<&BTreeSet<usize>> {
        self.members.get(k)
    }

    pub fn class_count(&self, k: usize) -> usize {
        self.members.get(k).map_or(0, BTreeSet::len)
    }

    pub fn idle(&self) -> &BTreeSet<usize> {
        &self.idle
    }

    /// Elements currently in `A`.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.label.len()).filter(|&x| self.label[x].is_some())
    }

    fn fresh(&mut self) -> usize {
        self.label.push(None);
        self.label.len() - 1
    }

    fn assign(&mut self, x: usize, k: usize) {
        if x >= self.label.len() {
            self.label.resize(x + 1, None);
        }
        self.label[x] = Some(k);
        if self.members.len() <= k {
            self.members.resize(k + 1, BTreeSet::new());
        }
        self.members[k].insert(x);
        self.idle.remove(&x);
    }

    fn unassign(&mut self, x: usize, k: usize) {
        self.label[x] = None;
        self.members[k].remove(&x);
        self.idle.insert(x);
    }

    fn apply(&mut self, d: &StageDelta) {
        self.assign(d.founder, d.stage as usize - 1);
        for &(x, k) in &d.added {
            self.assign(x, k);
        }
        for &(x, k) in &d.removed {
            self.unassign(x, k);
        }
        self.stage = d.stage;
    }

    /// `R[s]` on `[0, next_fresh)`: same defined label, or equal.
    pub fn snapshot(&self) -> Partition {
        let mut p = Partition::identity(self.next_fresh());
        for class in &self.members {
            let mut it = class.iter();
            if let Some(&first) = it.next() {
                for &x in it {
                    p.merge(first, x).expect("members are below next_fresh");
                }
            }
        }
        p
    }

    /// Labels `k < s - 1` whose class size differs from `g(k, s)` at the end
    /// of stage `s`.
    pub fn count_mismatches(&self, g: &GTable) -> Vec<usize> {
        let s = self.stage;
        (0..s.saturating_sub(1) as usize)
            .filter(|&k| self.class_count(k) as u64 != g.value(k, s))
            .collect()
    }
}

/// Run stage `s + 1`.
pub fn pi01_step(st: &mut LabelState, g: &GTable) -> StageDelta {
    let s = st.stage;
    let next = s + 1;
    let founder = match st.idle.first().copied() {
        Some(w) => w,
        None => st.fresh(),
    };
    st.assign(founder, s as usize);

    let mut added = Vec::new();
    let mut removed = Vec::new();
    for k in 0..s as usize {
        let have = st.class_count(k) as u64;
        let want = g.value(k, next);
        if want > have {
            for _ in 0..want - have {
                let y = st.fresh();
                st.assign(y, k);
                added.push((y, k));
            }
        } else if want < have {
            let drop: Vec<usize> = st.members[k]
                .iter()
                .rev()
                .take((have - want) as usize)
                .copied()
                .collect();
            for z in drop {
                st.unassign(z, k);
                removed.push((z, k));
            }
        }
    }
    st.stage = next;
    StageDelta {
        stage: next,
        founder,
        added,
        removed,
    }
}

pub fn run_pi01(g: &GTable, stages: u64) -> Result<(LabelState, Pi01Trace)> {
    if stages == 0 {
        return Err(Error::input("stage budget must be at least 1"));
    }
    let mut st = LabelState::new();
    let deltas = (0..stages).map(|_| pi01_step(&mut st, g)).collect();
    Ok((
        st,
        Pi01Trace {
            format: 1,
            stages: deltas,
        },
    ))
}

/// Shape of one element's label history up to the end of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "pattern", rename_all = "lowercase")]
pub enum HistoryPattern {
    /// Labelled once at `s0`, never changed.
    A { s0: u64, label: usize },
    /// Labelled at `s0`, dropped at `s1`, relabelled with a larger label at `s2`.
    B {
        s0: u64,
        s1: u64,
        s2: u64,
        first: usize,
        second: usize,
    },
    /// Dropped at `s1` and not yet relabelled when the trace ends.
    Unstable { s0: u64, s1: u64 },
}

pub fn classify_history(trace: &Pi01Trace, x: usize) -> Result<HistoryPattern> {
    let h = trace.history(x);
    match h.as_slice() {
        [] => Err(Error::input(format!(
            "element {x} never appears in the trace"
        ))),
        &[(s0, Some(label))] => Ok(HistoryPattern::A { s0, label }),
        &[(s0, Some(_)), (s1, None)] => Ok(HistoryPattern::Unstable { s0, s1 }),
        &[(s0, Some(first)), (s1, None), (s2, Some(second))] if first < second => {
            Ok(HistoryPattern::B {
                s0,
                s1,
                s2,
                first,
                second,
            })
        }
        other => Err(Error::Invariant(format!(
            "element {x} has an impossible history {other:?}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCount {
    pub k: usize,
    pub expected: u64,
    pub observed: u64,
    #[serde(rename = "match")]
    pub matches: bool,
    /// Elements certified to keep label `k` forever.
    pub stable: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCountReport {
    pub format: u32,
    pub stages: u64,
    pub labels: Vec<LabelCount>,
    /// On certified-stable elements, `R`-equivalence coincides with equality
    /// of limit labels.
    pub lstar_consistent: bool,
}

impl LabelCountReport {
    pub fn all_match(&self) -> bool {
        self.lstar_consistent && self.labels.iter().all(|l| l.matches)
    }
}

/// Stages needed before labels `0..=max_label` can be certified.
pub fn required_stages(g: &GTable, max_label: usize) -> u64 {
    let worst = (0..=max_label)
        .map(|k| {
            let c = g.column(k);
            c.tail_start() + 3 * c.period().len()
        })
        .max()
        .unwrap_or(0);
    (max_label + 1 + worst) as u64
}

/// Compare the certified size of every label class `k ≤ max_label` with
/// `lim inf_s g(k, s)`.
///
/// Label `k` is certified from the last stage `t` in the periodic regime
/// (`t ≥ k + 2`) at which `g(k, t)` attains its tail minimum: later removals
/// only take the greatest members and never push the class below that
/// minimum, so the members present at `t` and still labelled `k` at the end
/// are permanent.
pub fn verify_liminf_counts(
    trace: &Pi01Trace,
    g: &GTable,
    max_label: usize,
) -> Result<LabelCountReport> {
    let required = required_stages(g, max_label);
    if trace.len() < required {
        return Err(Error::InsufficientHorizon {
            what: format!("label counts up to {max_label}"),
            required,
            actual: trace.len(),
        });
    }
    let end = trace.len();

    let mut anchors: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    let mut expected = Vec::new();
    for k in 0..=max_label {
        let col = g.column(k);
        let liminf = col.limits().liminf;
        let from = (k as u64 + 2).max(col.tail_start() as u64);
        let t = (from..=end)
            .rev()
            .find(|&t| col.eval(t as usize) == liminf)
            .expect("horizon covers a full period");
        anchors.entry(t).or_default().push(k);
        expected.push(liminf);
    }

    let mut at_anchor: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); max_label + 1];
    let mut st = LabelState::new();
    for d in &trace.stages {
        st.apply(d);
        if let Some(ks) = anchors.get(&d.stage) {
            for &k in ks {
                at_anchor[k] = st.class(k).cloned().unwrap_or_default();
            }
        }
    }

    let mut labels = Vec::new();
    let mut lstar: BTreeMap<usize, usize> = BTreeMap::new();
    for k in 0..=max_label {
        let stable: Vec<usize> = at_anchor[k]
            .iter()
            .copied()
            .filter(|&x| st.label(x) == Some(k))
            .collect();
        for &x in &stable {
            lstar.insert(x, k);
        }
        labels.push(LabelCount {
            k,
            expected: expected[k],
            observed: stable.len() as u64,
            matches: stable.len() as u64 == expected[k],
            stable,
        });
    }

    let snap = st.snapshot();
    let lstar_consistent = lstar.iter().all(|(&x, &kx)| {
        lstar.iter().all(|(&y, &ky)| {
            snap.same_class(x, y)
                .expect("stable elements are in the window")
                == (kx == ky)
        })
    });

    Ok(LabelCountReport {
        format: 1,
        stages: end,
        labels,
        lstar_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn g_of(cols: &[(&[u64], &[u64])]) -> GTable {
        GTable::new(ApproxTable::new(
            cols.iter()
                .map(|(p, q)| UltimatelyPeriodic::new(p.to_vec(), q.to_vec()).unwrap())
                .collect(),
        ))
    }

    #[test]
    fn all_ones_is_identity() {
        let g = g_of(&[(&[], &[1])]);
        let (st, trace) = run_pi01(&g, 50).unwrap();
        assert!(trace
            .stages
            .iter()
            .all(|d| d.added.is_empty() && d.removed.is_empty()));
        for k in 0..50 {
            assert_eq!(st.class(k).unwrap().len(), 1);
        }
        assert_eq!(st.snapshot(), Partition::identity(50));
        assert_eq!(
            classify_history(&trace, 0).unwrap(),
            HistoryPattern::A { s0: 1, label: 0 }
        );
    }

    #[test]
    fn one_stage() {
        let g = g_of(&[(&[], &[1])]);
        let (st, _) = run_pi01(&g, 1).unwrap();
        assert_eq!(st.active().collect::<Vec<_>>(), vec![0]);
        assert_eq!(st.label(0), Some(0));
        assert!(run_pi01(&g, 0).is_err());
    }

    #[test]
    fn grow_drop_and_recycle() {
        // g(0, ·) = 1, 1, 2, 1, 1, …
        let g = g_of(&[(&[1, 1, 2], &[1])]);
        let (_, trace) = run_pi01(&g, 6).unwrap();
        // stage 2: founder 1 for label 1, fresh 2 joins label 0
        assert_eq!(trace.stages[1].founder, 1);
        assert_eq!(trace.stages[1].added, vec![(2, 0)]);
        // stage 3: label 0 sheds its greatest member
        assert_eq!(trace.stages[2].removed, vec![(2, 0)]);
        // stage 4: the dropped element founds label 3
        assert_eq!(trace.stages[3].founder, 2);
        assert_eq!(
            classify_history(&trace, 2).unwrap(),
            HistoryPattern::B {
                s0: 2,
                s1: 3,
                s2: 4,
                first: 0,
                second: 3
            }
        );
        let (_, short) = run_pi01(&g, 3).unwrap();
        assert_eq!(
            classify_history(&short, 2).unwrap(),
            HistoryPattern::Unstable { s0: 2, s1: 3 }
        );
    }

    #[test]
    fn liminf_count_examples() {
        let g = g_of(&[(&[], &[1])]);
        let need = required_stages(&g, 5);
        let (_, trace) = run_pi01(&g, need).unwrap();
        let rep = verify_liminf_counts(&trace, &g, 5).unwrap();
        assert!(rep.all_match());
        assert!(rep.labels.iter().all(|l| l.observed == 1));

        let g = g_of(&[(&[], &[1]), (&[], &[1]), (&[], &[1, 5]), (&[2], &[4])]);
        let need = required_stages(&g, 3);
        let (_, trace) = run_pi01(&g, need).unwrap();
        let rep = verify_liminf_counts(&trace, &g, 3).unwrap();
        assert!(rep.all_match());
        assert_eq!(rep.labels[2].observed, 1);
        assert_eq!(rep.labels[3].observed, 4);
    }

    #[test]
    fn short_trace_refused() {
        let g = g_of(&[(&[3, 3, 3], &[2, 7])]);
        let (_, trace) = run_pi01(&g, 5).unwrap();
        match verify_liminf_counts(&trace, &g, 0) {
            Err(Error::InsufficientHorizon {
                required, actual, ..
            }) => {
                assert_eq!(required, 1 + 3 + 6);
                assert_eq!(actual, 5);
            }
            other => panic!("expected a horizon error, got {other:?}"),
        }
    }

    #[test]
    fn zeros_are_lifted() {
        let g = g_of(&[(&[0], &[0, 3])]);
        assert_eq!(g.value(0, 0), 1);
        assert_eq!(g.column(0).limits().liminf, 1);
        assert_eq!(g.value(9, 4), 1);
    }

    #[test]
    fn trace_json_round_trip() {
        let g = g_of(&[(&[1, 4], &[2, 1])]);
        let (_, trace) = run_pi01(&g, 12).unwrap();
        let text = serde_json::to_string(&trace).unwrap();
        assert_eq!(serde_json::from_str::<Pi01Trace>(&text).unwrap(), trace);
        assert_eq!(trace.state_at(12), run_pi01(&g, 12).unwrap().0);
    }

    fn arb_g() -> impl Strategy<Value = GTable> {
        prop::collection::vec(
            (
                prop::collection::vec(1u64..6, 0..5),
                prop::collection::vec(1u64..6, 1..4),
            ),
            1..5,
        )
        .prop_map(|cols| {
            GTable::new(ApproxTable::new(
                cols.into_iter()
                    .map(|(p, q)| UltimatelyPeriodic::new(p, q).unwrap())
                    .collect(),
            ))
        })
    }

    proptest! {
        #[test]
        fn invariants_along_runs(g in arb_g()) {
            let mut st = LabelState::new();
            let mut prev = st.snapshot();
            let mut founders: Vec<usize> = Vec::new();
            for _ in 0..30 {
                let d = pi01_step(&mut st, &g);
                founders.push(d.founder);
                prop_assert!(st.count_mismatches(&g).is_empty());
                let snap = st.snapshot();
                prop_assert!(snap.refines(&prev));
                let w = snap.window().min(30);
                prop_assert!(oracle::is_equivalence(&oracle::relation_matrix(&snap.restrict(w))));
                let pw = prev.window().min(w);
                prop_assert!(oracle::is_subrelation(
                    &oracle::relation_matrix(&snap.restrict(pw)),
                    &oracle::relation_matrix(&prev.restrict(pw)),
                ));
                // every founder is still the least member of its class
                for (k, &f) in founders.iter().enumerate() {
                    prop_assert_eq!(st.class(k).and_then(|c| c.first()).copied(), Some(f));
                }
                // the labelling is onto {0, …, s-1}
                prop_assert!((0..st.stage() as usize).all(|k| st.class_count(k) >= 1));
                prev = snap;
            }
        }

        #[test]
        fn histories_have_two_shapes(g in arb_g()) {
            let (_, trace) = run_pi01(&g, 40).unwrap();
            let st = trace.state_at(40);
            for x in 0..st.next_fresh() {
                match classify_history(&trace, x).unwrap() {
                    HistoryPattern::Unstable { .. } => prop_assert!(st.idle().contains(&x)),
                    HistoryPattern::B { first, second, .. } => prop_assert!(first < second),
                    HistoryPattern::A { .. } => {}
                }
            }
        }

        #[test]
        fn counts_match_liminf(g in arb_g()) {
            let k = g.width() - 1;
            let (_, trace) = run_pi01(&g, required_stages(&g, k)).unwrap();
            let rep = verify_liminf_counts(&trace, &g, k).unwrap();
            for l in &rep.labels {
                let col = g.column(l.k);
                let brute = (col.tail_start()..col.tail_start() + 10 * col.period().len())
                    .map(|s| col.eval(s)).min().unwrap();
                prop_assert_eq!(l.observed, brute);
            }
            prop_assert!(rep.lstar_consistent);
        }
    }
}
