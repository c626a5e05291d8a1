//! Finitely presented families of ceer approximations `R_e[s]`.
//!
//! A member is either a script of merge events (constant after its last
//! event) or a churn generator, which builds a fresh block of `k` elements in
//! every round and then folds it into the class of `0`, so the oldest class of
//! size `k` changes forever while no class of size `k` survives in the limit.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::eqrel::{Card, Character, Partition};
use crate::error::{Error, Result};

/// Merge events `(stage, (x, y))`, sorted by stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawScript")]
pub struct CeerScript {
    events: Vec<(u64, (usize, usize))>,
}

#[derive(Deserialize)]
struct RawScript {
    events: Vec<(u64, (usize, usize))>,
}

impl TryFrom<RawScript> for CeerScript {
    type Error = Error;

    fn try_from(raw: RawScript) -> Result<Self> {
        CeerScript::new(raw.events)
    }
}

impl CeerScript {
    pub fn new(events: Vec<(u64, (usize, usize))>) -> Result<Self> {
        if events.windows(2).any(|w| w[0].0 > w[1].0) {
            return Err(Error::input("script events must be sorted by stage"));
        }
        Ok(Self { events })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[(u64, (usize, usize))] {
        &self.events
    }

    pub fn last_event_stage(&self) -> Option<u64> {
        self.events.last().map(|e| e.0)
    }

    /// Window covering every referenced element plus one untouched element.
    pub fn universe(&self) -> usize {
        self.events
            .iter()
            .map(|&(_, (x, y))| x.max(y) + 2)
            .max()
            .unwrap_or(1)
    }

    /// `R[s]` on the script's universe (at least `window`).
    fn full_snapshot(&self, s: u64, window: usize) -> Partition {
        let mut p = Partition::identity(self.universe().max(window));
        for &(_, (x, y)) in self.events.iter().take_while(|ev| ev.0 <= s) {
            p.merge(x, y).expect("universe covers every event");
        }
        p
    }

    pub fn snapshot(&self, s: u64, window: usize) -> Partition {
        self.full_snapshot(s, window).restrict(window)
    }

    /// The limit relation on the script's universe.
    pub fn limit(&self) -> Partition {
        self.full_snapshot(u64::MAX, 0)
    }
}

/// Round `r` forms block `[1 + rk, 1 + (r+1)k)` at stage `(2r+1)·spacing` and
/// merges it into the class of `0` at stage `(2r+2)·spacing`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawChurn")]
pub struct ChurnGenerator {
    k: usize,
    spacing: u64,
}

#[derive(Deserialize)]
struct RawChurn {
    k: usize,
    spacing: u64,
}

impl TryFrom<RawChurn> for ChurnGenerator {
    type Error = Error;

    fn try_from(raw: RawChurn) -> Result<Self> {
        ChurnGenerator::new(raw.k, raw.spacing)
    }
}

impl ChurnGenerator {
    pub fn new(k: usize, spacing: u64) -> Result<Self> {
        if k < 2 {
            return Err(Error::input("churn generators need target size k >= 2"));
        }
        if spacing == 0 {
            return Err(Error::input("churn spacing must be at least 1"));
        }
        Ok(Self { k, spacing })
    }

    pub fn target_size(&self) -> usize {
        self.k
    }

    pub fn spacing(&self) -> u64 {
        self.spacing
    }

    fn formed(&self, s: u64) -> usize {
        (s / self.spacing).div_ceil(2) as usize
    }

    fn absorbed(&self, s: u64) -> usize {
        (s / self.spacing / 2) as usize
    }

    fn block_min(&self, r: usize) -> usize {
        1 + r * self.k
    }

    /// `(size, min)` of every class shape present at stage `s`; the trailing
    /// entry stands for the infinitely many untouched singletons.
    fn shapes(&self, s: u64) -> Vec<(usize, usize)> {
        let (f, a) = (self.formed(s), self.absorbed(s));
        let mut out = vec![(1 + a * self.k, 0)];
        if f > a {
            out.push((self.k, self.block_min(a)));
        }
        out.push((1, self.block_min(f)));
        out
    }

    pub fn oldest_class_min(&self, s: u64, size: usize) -> Option<usize> {
        self.shapes(s)
            .into_iter()
            .filter(|&(sz, _)| sz == size)
            .map(|(_, m)| m)
            .min()
    }

    pub fn snapshot(&self, s: u64, window: usize) -> Partition {
        let (f, a) = (self.formed(s), self.absorbed(s));
        let mut p = Partition::identity(window.max(self.block_min(f)));
        for r in 0..f {
            let lo = self.block_min(r);
            let anchor = if r < a { 0 } else { lo };
            for x in lo..lo + self.k {
                p.merge(anchor, x).expect("window covers formed blocks");
            }
        }
        p.restrict(window)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CeerMember {
    Script(CeerScript),
    Churn(ChurnGenerator),
}

impl CeerMember {
    pub fn snapshot(&self, s: u64, window: usize) -> Partition {
        match self {
            CeerMember::Script(sc) => sc.snapshot(s, window),
            CeerMember::Churn(ch) => ch.snapshot(s, window),
        }
    }

    /// Stage after which the member never changes, if any.
    pub fn settles_at(&self) -> Option<u64> {
        match self {
            CeerMember::Script(sc) => Some(sc.last_event_stage().unwrap_or(0)),
            CeerMember::Churn(_) => None,
        }
    }
}

/// A finite uniform family `{R_e}`; index `e` addresses `members[e]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CeerFamily {
    pub members: Vec<CeerMember>,
}

impl CeerFamily {
    pub fn new(members: Vec<CeerMember>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, e: usize) -> Result<&CeerMember> {
        self.members.get(e).ok_or_else(|| {
            Error::input(format!(
                "family has no member {e} (size {})",
                self.members.len()
            ))
        })
    }
}

/// `R_e[s]` restricted to `[0, window)`.
pub fn ceer_snapshot(fam: &CeerFamily, e: usize, s: u64, window: usize) -> Result<Partition> {
    Ok(fam.member(e)?.snapshot(s, window))
}

/// Exact limit data of one family member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSpectrum {
    /// For scripts, the limit character on the requested window; for churn,
    /// the single infinite class.
    pub character: Character,
    source: LimitSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum LimitSource {
    Script(Partition),
    Churn(usize),
}

impl LimitSpectrum {
    /// Whether the limit relation on all of ω has a class of exactly `size`.
    pub fn has_class_of_size(&self, size: usize) -> Result<bool> {
        match &self.source {
            // untouched elements are singletons forever
            LimitSource::Script(p) => Ok(size == 1 || p.has_class_of_size(size)),
            LimitSource::Churn(k) if size == *k || size == 1 => Ok(false),
            LimitSource::Churn(k) => Err(Error::Unsupported(format!(
                "churn generator with target {k} only answers sizes {k} and 1, not {size}"
            ))),
        }
    }
}

pub fn limit_spectrum(fam: &CeerFamily, e: usize, window: usize) -> Result<LimitSpectrum> {
    Ok(match fam.member(e)? {
        CeerMember::Script(sc) => {
            let limit = sc.limit();
            LimitSpectrum {
                character: sc.snapshot(u64::MAX, window).character(),
                source: LimitSource::Script(limit),
            }
        }
        CeerMember::Churn(ch) => {
            let mut character = Character::new();
            character.insert(Card::Infinite, Card::Finite(1));
            LimitSpectrum {
                character,
                source: LimitSource::Churn(ch.target_size()),
            }
        }
    })
}

/// True iff `current` exists and differs from every recorded minimum.
pub fn oldest_tracker_update(history: &[Option<usize>], current: Option<usize>) -> bool {
    current.is_some_and(|m| history.iter().all(|&h| h != Some(m)))
}

/// Running record of the oldest size-`k` class minima seen at every stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OldestHistory {
    seen: BTreeSet<usize>,
    observations: u64,
}

impl OldestHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one stage's oldest minimum; returns whether it is new.
    pub fn observe(&mut self, current: Option<usize>) -> bool {
        self.observations += 1;
        current.is_some_and(|m| self.seen.insert(m))
    }

    /// Record the oldest size-`k` class of `p`.
    pub fn update(&mut self, p: &Partition, k: usize) -> bool {
        self.observe(p.oldest_class_min(k))
    }

    pub fn seen(&self) -> &BTreeSet<usize> {
        &self.seen
    }

    pub fn observations(&self) -> u64 {
        self.observations
    }
}

/// Incremental stage-by-stage view of one member, used by constructions that
/// poll `R_e[s]` at every stage.
#[derive(Clone, Debug)]
pub(crate) struct MemberCursor {
    member: CeerMember,
    partition: Option<Partition>,
    next_event: usize,
    stage: u64,
}

impl MemberCursor {
    pub(crate) fn new(member: &CeerMember) -> Self {
        let partition = match member {
            CeerMember::Script(sc) => Some(Partition::identity(sc.universe())),
            CeerMember::Churn(_) => None,
        };
        Self {
            member: member.clone(),
            partition,
            next_event: 0,
            stage: 0,
        }
    }

    pub(crate) fn advance_to(&mut self, s: u64) {
        self.stage = s;
        if let (CeerMember::Script(sc), Some(p)) = (&self.member, &mut self.partition) {
            while let Some(&(t, (x, y))) = sc.events().get(self.next_event) {
                if t > s {
                    break;
                }
                p.merge(x, y).expect("universe covers every event");
                self.next_event += 1;
            }
        }
    }

    pub(crate) fn oldest_class_min(&self, size: usize) -> Option<usize> {
        match (&self.member, &self.partition) {
            (CeerMember::Script(_), Some(p)) => p.oldest_class_min(size),
            (CeerMember::Churn(ch), _) => ch.oldest_class_min(self.stage, size),
            _ => unreachable!("script cursors always hold a partition"),
        }
    }

    pub(crate) fn has_class_of_size(&self, size: usize) -> bool {
        self.oldest_class_min(size).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn script(events: &[(u64, (usize, usize))]) -> CeerMember {
        CeerMember::Script(CeerScript::new(events.to_vec()).unwrap())
    }

    fn churn(k: usize, d: u64) -> CeerMember {
        CeerMember::Churn(ChurnGenerator::new(k, d).unwrap())
    }

    #[test]
    fn snapshot_examples() {
        let fam = CeerFamily::new(vec![script(&[]), script(&[(1, (0, 1))]), churn(2, 3)]);
        assert_eq!(
            ceer_snapshot(&fam, 0, 99, 5).unwrap(),
            Partition::identity(5)
        );
        assert_eq!(
            ceer_snapshot(&fam, 1, 0, 4).unwrap(),
            Partition::identity(4)
        );
        assert_eq!(
            ceer_snapshot(&fam, 1, 1, 4).unwrap().classes(),
            vec![vec![0, 1], vec![2], vec![3]]
        );
        // churn(k=2, spacing 3): block {1,2} formed at 3, absorbed at 6
        let mid = ceer_snapshot(&fam, 2, 3, 5).unwrap();
        assert_eq!(mid.classes(), vec![vec![0], vec![1, 2], vec![3], vec![4]]);
        let end_of_round_0 = ceer_snapshot(&fam, 2, 6, 5).unwrap();
        assert_eq!(
            end_of_round_0.classes(),
            vec![vec![0, 1, 2], vec![3], vec![4]]
        );
        assert!(!end_of_round_0.has_class_of_size(2));
        assert!(ceer_snapshot(&fam, 3, 0, 4).is_err());
    }

    #[test]
    fn limit_examples() {
        let fam = CeerFamily::new(vec![script(&[]), script(&[(4, (0, 1))]), churn(3, 2)]);
        let l = limit_spectrum(&fam, 0, 4).unwrap();
        assert_eq!(l.character, [(1, 4)].into_iter().collect());
        assert!(limit_spectrum(&fam, 1, 4)
            .unwrap()
            .has_class_of_size(2)
            .unwrap());
        assert!(!limit_spectrum(&fam, 1, 4)
            .unwrap()
            .has_class_of_size(3)
            .unwrap());
        let c = limit_spectrum(&fam, 2, 4).unwrap();
        assert!(!c.has_class_of_size(3).unwrap());
        assert!(!c.has_class_of_size(1).unwrap());
        assert!(matches!(c.has_class_of_size(5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tracker_examples() {
        assert!(oldest_tracker_update(&[], Some(0)));
        assert!(!oldest_tracker_update(&[Some(0)], Some(0)));
        assert!(oldest_tracker_update(&[Some(0), None], Some(4)));
        assert!(!oldest_tracker_update(&[Some(0)], None));

        let mut h = OldestHistory::new();
        assert!(h.observe(Some(0)));
        assert!(!h.observe(None));
        assert!(!h.observe(Some(0)));
        assert!(h.observe(Some(4)));
        assert_eq!(h.observations(), 4);
    }

    #[test]
    fn family_json() {
        let text = r#"{"members":[{"type":"script","events":[[1,[0,1]],[3,[1,2]]]},{"type":"churn","k":3,"spacing":2}]}"#;
        let fam: CeerFamily = serde_json::from_str(text).unwrap();
        assert_eq!(
            fam,
            CeerFamily::new(vec![script(&[(1, (0, 1)), (3, (1, 2))]), churn(3, 2)])
        );
        assert_eq!(serde_json::to_string(&fam).unwrap(), text);
        assert!(serde_json::from_str::<CeerFamily>(
            r#"{"members":[{"type":"churn","k":1,"spacing":2}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<CeerFamily>(
            r#"{"members":[{"type":"script","events":[[3,[0,1]],[1,[1,2]]]}]}"#
        )
        .is_err());
    }

    #[test]
    fn churn_minima_strictly_increase() {
        for (k, d) in [(2, 1), (3, 2), (5, 4)] {
            let ch = ChurnGenerator::new(k, d).unwrap();
            let mut observed = Vec::new();
            for s in 0..40 * d {
                let snap = ch.snapshot(s, 1 + 25 * k);
                let sized: Vec<_> = snap
                    .classes()
                    .into_iter()
                    .filter(|c| c.len() == k)
                    .collect();
                assert!(sized.len() <= 1, "two classes of size {k} at stage {s}");
                if let Some(m) = ch.oldest_class_min(s, k) {
                    if observed.last() != Some(&m) {
                        observed.push(m);
                    }
                }
            }
            assert!(observed.len() >= 15);
            assert!(observed.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn churn_closed_form_matches_snapshot() {
        let ch = ChurnGenerator::new(3, 2).unwrap();
        for s in 0..60 {
            let window = 1 + 3 * (ch.formed(s) + 1);
            let m = oracle::relation_matrix(&ch.snapshot(s, window));
            for size in 1..8 {
                assert_eq!(
                    ch.oldest_class_min(s, size),
                    oracle::oldest_class_min(&m, size),
                    "s={s} size={size}"
                );
            }
        }
    }

    fn arb_script() -> impl Strategy<Value = CeerScript> {
        prop::collection::vec((0u64..40, (0usize..10, 0usize..10)), 0..25).prop_map(|mut ev| {
            ev.sort_by_key(|e| e.0);
            CeerScript::new(ev).unwrap()
        })
    }

    proptest! {
        #[test]
        fn snapshots_only_coarsen(sc in arb_script(), window in 1usize..12) {
            for s in 0..41 {
                prop_assert!(sc.snapshot(s, window).refines(&sc.snapshot(s + 1, window)));
            }
        }

        #[test]
        fn identity_by_minimum(sc in arb_script(), k in 1usize..5) {
            let w = sc.universe();
            let snaps: Vec<Partition> = (0..42).map(|s| sc.snapshot(s, w)).collect();
            for t in 0..snaps.len() {
                for s in t + 1..snaps.len() {
                    if let (Some(a), Some(b)) = (snaps[t].oldest_class_min(k), snaps[s].oldest_class_min(k)) {
                        if a == b {
                            let ca: Vec<usize> = (0..w).filter(|&x| snaps[t].same_class(a, x).unwrap()).collect();
                            let cb: Vec<usize> = (0..w).filter(|&x| snaps[s].same_class(b, x).unwrap()).collect();
                            prop_assert_eq!(ca, cb);
                        }
                    }
                }
            }
        }

        #[test]
        fn cursor_agrees_with_snapshots(sc in arb_script(), k in 1usize..5) {
            let member = CeerMember::Script(sc.clone());
            let mut cur = MemberCursor::new(&member);
            for s in 0..45 {
                cur.advance_to(s);
                prop_assert_eq!(cur.oldest_class_min(k), sc.snapshot(s, sc.universe()).oldest_class_min(k));
            }
        }
    }
}
