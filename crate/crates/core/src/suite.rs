//! The seven end-to-end property suites, shared by `verify-all` and the
//! acceptance test target.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blocks;
use crate::ceersim::{CeerFamily, CeerMember, CeerScript};
use crate::coceer::{init_coceer, verify_requirement, Mode};
use crate::eqrel::Partition;
use crate::error::{Error, Result};
use crate::gen;
use crate::oracle;
use crate::pi01::{self, HistoryPattern, LabelState};
use crate::preorder::{self, VTable};

/// Largest window on which snapshots are checked by brute force.
pub const CHECK_WINDOW: usize = 12;
/// Largest stage budget the co-ceer suite may use.
pub const MAX_COCEER_STAGES: u64 = 20_000;
const FAILURE_SAMPLES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Stage budget for every co-ceer run.
    pub stages: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            stages: 5000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Individual checks performed.
    pub checks: u64,
    pub failures: Vec<String>,
}

impl CriterionOutcome {
    fn new(id: u8, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: true,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < FAILURE_SAMPLES {
                self.failures.push(what());
            }
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut out = format!(
            "[{verdict}] {}. {} ({} checks)",
            self.id, self.name, self.checks
        );
        for f in &self.failures {
            out.push_str(&format!("\n    - {f}"));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub format: u32,
    pub config: SuiteConfig,
    pub criteria: Vec<CriterionOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

/// The relation is an equivalence, and it refines `prev` where both are defined.
fn shrinks(prev: &Partition, next: &Partition) -> bool {
    let w = next.window().min(prev.window()).min(CHECK_WINDOW);
    let a = oracle::relation_matrix(&next.restrict(w));
    let b = oracle::relation_matrix(&prev.restrict(w));
    oracle::is_equivalence(&a) && oracle::is_subrelation(&a, &b)
}

/// Layout of the co-ceer suite: five families of six members. Member 0 is an
/// empty filler; members 1..=5 hold two scripts with a class of the target
/// size, two without and one churn generator, in seeded order.
pub fn coceer_families(seed: u64) -> Vec<CeerFamily> {
    let mut rng = gen::rng(seed);
    (0..5)
        .map(|_| {
            let mut kinds = [0u8, 0, 1, 1, 2];
            kinds.shuffle(&mut rng);
            let mut members = vec![CeerMember::Script(CeerScript::empty())];
            for (i, kind) in kinds.into_iter().enumerate() {
                let (k, _) = Mode::Spaced.sizes(i + 1);
                members.push(match kind {
                    0 => CeerMember::Script(gen::script_for_size(&mut rng, k, true)),
                    1 => CeerMember::Script(gen::script_for_size(&mut rng, k, false)),
                    _ => CeerMember::Churn(gen::churn_for_size(&mut rng, k)),
                });
            }
            CeerFamily::new(members)
        })
        .collect()
}

/// Criteria 1, 2 and the co-ceer half of 4 from one pass over the runs.
pub fn coceer_suites(
    cfg: &SuiteConfig,
) -> Result<(CriterionOutcome, CriterionOutcome, CriterionOutcome)> {
    if cfg.stages == 0 || cfg.stages > MAX_COCEER_STAGES {
        return Err(Error::input(format!(
            "co-ceer stage budget must lie in [1, {MAX_COCEER_STAGES}]"
        )));
    }
    let mut c1 = CriterionOutcome::new(
        1,
        "co-ceer diagonalization: every requirement satisfied and certified",
    );
    let mut c2 = CriterionOutcome::new(
        2,
        "witness-class identity at every stage; churn returns to the initial witnesses",
    );
    let mut c4 = CriterionOutcome::new(4, "monotone shrinking equivalence snapshots");

    for (f, fam) in coceer_families(cfg.seed).iter().enumerate() {
        let mut state = init_coceer(fam.len(), Mode::Spaced)?;
        let mut prev = state.snapshot(CHECK_WINDOW);
        for _ in 0..cfg.stages {
            state.step(fam)?;
            let bad = state.witness_class_violations();
            c2.check(bad.is_empty(), || {
                format!("family {f} stage {}: columns {bad:?}", state.stage())
            });
            let snap = state.snapshot(CHECK_WINDOW);
            c4.check(shrinks(&prev, &snap), || {
                format!("co-ceer family {f} stage {}", state.stage())
            });
            prev = snap;
        }
        for e in 1..fam.len() {
            let rep = verify_requirement(&state, fam, e)?;
            c1.check(rep.satisfied && rep.certified, || {
                format!(
                    "family {f} column {e} ({}): satisfied={} certified={}",
                    rep.member, rep.satisfied, rep.certified
                )
            });
            if let CeerMember::Churn(_) = fam.member(e)? {
                let initial: Vec<usize> =
                    state.column(e)?.initial_witnesses().into_iter().collect();
                c2.check(rep.limit_witnesses == initial, || {
                    format!(
                        "family {f} column {e}: limit {:?} != initial {initial:?}",
                        rep.limit_witnesses
                    )
                });
            }
        }
    }
    Ok((c1, c2, c4))
}

/// Criterion 3 and the Π⁰₁ half of 4.
pub fn pi01_suites(cfg: &SuiteConfig) -> Result<(CriterionOutcome, CriterionOutcome)> {
    let mut c3 = CriterionOutcome::new(3, "label classes have exactly lim inf g elements");
    let mut c4 = CriterionOutcome::new(4, "monotone shrinking equivalence snapshots");
    let mut rng = gen::rng(cfg.seed ^ 0x3);
    for n in 0..50u64 {
        let max_label = rng.gen_range(0..=8usize);
        let g = gen::generate_gtable(cfg.seed.wrapping_mul(1000).wrapping_add(n), max_label);
        let stages = pi01::required_stages(&g, max_label);
        let mut st = LabelState::new();
        let mut deltas = Vec::new();
        let mut prev = st.snapshot();
        for _ in 0..stages {
            deltas.push(pi01::pi01_step(&mut st, &g));
            let bad = st.count_mismatches(&g);
            c3.check(bad.is_empty(), || {
                format!("table {n} stage {}: labels {bad:?}", st.stage())
            });
            let snap = st.snapshot();
            c4.check(shrinks(&prev, &snap), || {
                format!("pi01 table {n} stage {}", st.stage())
            });
            prev = snap;
        }
        let trace = pi01::Pi01Trace {
            format: 1,
            stages: deltas,
        };
        let rep = pi01::verify_liminf_counts(&trace, &g, max_label)?;
        c3.check(rep.lstar_consistent, || {
            format!("table {n}: stable labels disagree with R")
        });
        for l in &rep.labels {
            let period_min = g
                .column(l.k)
                .period()
                .iter()
                .copied()
                .min()
                .expect("nonempty period");
            c3.check(l.observed == period_min && l.expected == period_min, || {
                format!(
                    "table {n} label {}: observed {} expected {period_min}",
                    l.k, l.observed
                )
            });
        }
        for x in 0..st.next_fresh() {
            let verdict = pi01::classify_history(&trace, x);
            let ok = match verdict {
                Ok(HistoryPattern::A { .. }) => true,
                Ok(HistoryPattern::B { first, second, .. }) => first < second,
                // dropped in the last stages and still waiting to be refounded
                Ok(HistoryPattern::Unstable { .. }) => st.idle().contains(&x),
                Err(_) => false,
            };
            c3.check(ok, || format!("table {n} element {x}: {verdict:?}"));
        }
    }
    Ok((c3, c4))
}

pub fn merge_monotonicity(a: CriterionOutcome, b: CriterionOutcome) -> CriterionOutcome {
    CriterionOutcome {
        id: a.id,
        name: a.name,
        passed: a.passed && b.passed,
        checks: a.checks + b.checks,
        failures: a
            .failures
            .into_iter()
            .chain(b.failures)
            .take(FAILURE_SAMPLES)
            .collect(),
    }
}

/// Criterion 5.
pub fn preorder_suite(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let mut c = CriterionOutcome::new(5, "preorder fingerprint recovers B");
    let mut rng = gen::rng(cfg.seed ^ 0x5);
    let mut flipped = 0;
    for n in 0..30u64 {
        let max_x = rng.gen_range(1..=10usize);
        let seed = cfg.seed.wrapping_mul(1000).wrapping_add(n);
        let b = if n < 10 {
            gen::generate_b_with_flip(seed, max_x)
        } else {
            gen::generate_b(seed, max_x)
        };
        if !gen::flip_columns(&b).is_empty() {
            flipped += 1;
        }
        let horizon = max_x as u64;
        let mut t = VTable::new();
        let mut prev = preorder::materialize(&t, 8, 8);
        for _ in 0..preorder::required_stages(&b, horizon) {
            preorder::preorder_step(&mut t, &b)?;
            if t.stage().is_multiple_of(10) {
                let snap = preorder::materialize(&t, 8, 8);
                let m = snap.matrix();
                c.check(
                    oracle::is_reflexive(&m) && oracle::is_transitive(&m),
                    || format!("approximation {n} stage {}: not a preorder", t.stage()),
                );
                c.check(prev.is_subrelation_of(&snap), || {
                    format!("approximation {n} stage {}: lost a fact", t.stage())
                });
                prev = snap;
            }
        }
        let rep = preorder::verify_claim(&t, &b, horizon)?;
        c.check(rep.ok(), || format!("approximation {n}: {rep:?}"));
    }
    c.check(flipped >= 10, || {
        format!("only {flipped} approximations contain a 1 -> 0 flip")
    });
    Ok(c)
}

/// Criterion 6.
pub fn blocks_suite(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let mut c = CriterionOutcome::new(6, "block coder round trip");
    let mut rng = gen::rng(cfg.seed ^ 0x6);
    for i in 0..100usize {
        let x: Vec<bool> = (0..64).map(|_| rng.gen_bool(0.5)).collect();
        let ch = blocks::block_character(&x, x.len())?;
        let decoded = blocks::decode_character(&ch, x.len());
        c.check(decoded.as_ref().is_ok_and(|d| *d == x), || {
            format!("{} decoded as {decoded:?}", blocks::bits_to_string(&x))
        });
        let n = i % 33;
        let structure = blocks::encode_blocks(&x, n)?;
        c.check(
            structure.character() == blocks::block_character(&x, n)?,
            || {
                format!(
                    "{} on {n} blocks: structure and formula disagree",
                    blocks::bits_to_string(&x)
                )
            },
        );
    }
    Ok(c)
}

fn random_pairs(rng: &mut impl Rng, window: usize) -> Vec<(usize, usize)> {
    let count = rng.gen_range(0..=window);
    (0..count)
        .map(|_| (rng.gen_range(0..window), rng.gen_range(0..window)))
        .collect()
}

/// Criterion 7.
pub fn oracle_suite(cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let mut c = CriterionOutcome::new(7, "fast implementations agree with brute force");
    let mut rng = gen::rng(cfg.seed ^ 0x7);
    for n in 0..200 {
        let w = rng.gen_range(1..=CHECK_WINDOW);
        let pairs = random_pairs(&mut rng, w);
        let mut p = Partition::identity(w);
        for &(x, y) in &pairs {
            p.merge(x, y)?;
        }
        let m = oracle::closure_of_pairs(w, &pairs);
        for k in 1..=w {
            c.check(
                p.oldest_class_min(k) == oracle::oldest_class_min(&m, k),
                || format!("instance {n}: oldest class of size {k}"),
            );
        }
        let stable: BTreeSet<usize> = (0..w).filter(|_| rng.gen_bool(0.6)).collect();
        c.check(
            p.character_of(&stable) == oracle::character(&m, &stable),
            || format!("instance {n}: character"),
        );

        let n_a = rng.gen_range(0..=5usize);
        let n_b = rng.gen_range(0..=(CHECK_WINDOW - 2 - n_a));
        let defined = rng.gen_range(0..=n_a + 1);
        let values: Vec<u64> = (0..defined)
            .map(|_| rng.gen_range(0..=n_b as u64 + 1))
            .collect();
        let t = VTable::with_values(&values);
        let snap = preorder::materialize(&t, n_a, n_b);
        let idx: Vec<(usize, usize)> = preorder::generating_pairs(&t, n_a, n_b)
            .into_iter()
            .map(|(x, y)| {
                (
                    snap.index(x).expect("in window"),
                    snap.index(y).expect("in window"),
                )
            })
            .collect();
        c.check(
            snap.matrix() == oracle::preorder_closure(snap.size(), &idx),
            || format!("instance {n}: preorder closure with v = {values:?}, window ({n_a}, {n_b})"),
        );
    }
    Ok(c)
}

/// Run all seven criteria.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let (c1, c2, c4a) = coceer_suites(cfg)?;
    let (c3, c4b) = pi01_suites(cfg)?;
    let criteria = vec![
        c1,
        c2,
        c3,
        merge_monotonicity(c4a, c4b),
        preorder_suite(cfg)?,
        blocks_suite(cfg)?,
        oracle_suite(cfg)?,
    ];
    Ok(SuiteReport {
        format: 1,
        config: *cfg,
        criteria,
    })
}
