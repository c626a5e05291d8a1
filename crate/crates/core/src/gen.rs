//! Seeded instance generators for the property suites and `verify-all`.
//!
//! Everything is driven by a `ChaCha8Rng`, so a seed fixes the output on
//! every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ceersim::{CeerFamily, CeerMember, CeerScript, ChurnGenerator};
use crate::coceer::Mode;
use crate::pi01::GTable;
use crate::seq::{ApproxTable, Delta02SetApprox, UltimatelyPeriodic};

pub const MAX_EVENTS: usize = 50;
pub const MAX_PREFIX: usize = 8;
pub const MAX_PERIOD: usize = 6;
pub const MAX_VALUE: u64 = 9;
/// Scripts finish by this stage so short runs still certify them.
pub const LAST_EVENT_STAGE: u64 = 1500;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A script on a small universe whose limit has a class of size `k` exactly
/// when `with_class` holds. Classes of size `k` may appear and disappear on
/// the way.
pub fn script_for_size(rng: &mut ChaCha8Rng, k: usize, with_class: bool) -> CeerScript {
    loop {
        let width = k + 2 + rng.gen_range(0..=2 * k);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        if with_class {
            let mut pool: Vec<usize> = (0..width).collect();
            pool.shuffle(rng);
            pairs.extend(pool[..k].windows(2).map(|w| (w[0], w[1])));
        }
        let noise = rng.gen_range(0..=(MAX_EVENTS - pairs.len()).min(2 * k));
        for _ in 0..noise {
            pairs.push((rng.gen_range(0..width), rng.gen_range(0..width)));
        }
        pairs.shuffle(rng);
        let mut stages: Vec<u64> = (0..pairs.len())
            .map(|_| rng.gen_range(1..=LAST_EVENT_STAGE))
            .collect();
        stages.sort_unstable();
        let script =
            CeerScript::new(stages.into_iter().zip(pairs).collect()).expect("stages are sorted");
        if script.limit().has_class_of_size(k) == with_class {
            return script;
        }
    }
}

pub fn churn_for_size(rng: &mut ChaCha8Rng, k: usize) -> ChurnGenerator {
    ChurnGenerator::new(k, rng.gen_range(1..=3)).expect("k >= 2 and spacing >= 1")
}

/// `count` members sized for spaced columns: member `e` targets `2e + 2`.
/// Member 0 is always a script; the rest mix scripts with and without a
/// target-size class and churn generators.
pub fn generate_family(seed: u64, count: usize) -> CeerFamily {
    let mut rng = rng(seed);
    let members = (0..count)
        .map(|e| {
            let (k, _) = Mode::Spaced.sizes(e);
            match (e, rng.gen_range(0..3)) {
                (0, _) => {
                    let with_class = rng.gen_bool(0.5);
                    CeerMember::Script(script_for_size(&mut rng, k, with_class))
                }
                (_, 0) => CeerMember::Script(script_for_size(&mut rng, k, true)),
                (_, 1) => CeerMember::Script(script_for_size(&mut rng, k, false)),
                _ => CeerMember::Churn(churn_for_size(&mut rng, k)),
            }
        })
        .collect();
    CeerFamily::new(members)
}

fn values(rng: &mut ChaCha8Rng, len: usize, lo: u64, hi: u64) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(lo..=hi)).collect()
}

pub fn upseq(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> UltimatelyPeriodic<u64> {
    let prefix_len = rng.gen_range(0..=MAX_PREFIX);
    let period_len = rng.gen_range(1..=MAX_PERIOD);
    let prefix = values(rng, prefix_len, lo, hi);
    let period = values(rng, period_len, lo, hi);
    UltimatelyPeriodic::new(prefix, period).expect("period is nonempty")
}

/// Columns `0..=max_label` with values in `0..=9`.
pub fn generate_gtable(seed: u64, max_label: usize) -> GTable {
    let mut rng = rng(seed);
    GTable::new(ApproxTable::new(
        (0..=max_label)
            .map(|_| upseq(&mut rng, 0, MAX_VALUE))
            .collect(),
    ))
}

fn b_columns(rng: &mut ChaCha8Rng, max_x: usize) -> Vec<UltimatelyPeriodic<u64>> {
    (0..=max_x)
        .map(|x| {
            if x == 0 {
                return UltimatelyPeriodic::constant(0);
            }
            let len = rng.gen_range(0..=MAX_PREFIX);
            let prefix = values(rng, len, 0, 1);
            UltimatelyPeriodic::new(prefix, vec![rng.gen_range(0..=1)]).expect("period is nonempty")
        })
        .collect()
}

/// A Δ⁰₂ approximation on `0..=max_x`; column 0 is constantly 0.
pub fn generate_b(seed: u64, max_x: usize) -> Delta02SetApprox {
    let mut rng = rng(seed);
    Delta02SetApprox::new(ApproxTable::new(b_columns(&mut rng, max_x)))
        .expect("columns are settled 0/1 sequences")
}

/// Like [`generate_b`], but one column `x ≥ 1` reads 1 long enough to be
/// assigned and then drops to 0 for good.
pub fn generate_b_with_flip(seed: u64, max_x: usize) -> Delta02SetApprox {
    assert!(max_x >= 1, "a flip needs a column x >= 1");
    let mut rng = rng(seed);
    let mut cols = b_columns(&mut rng, max_x);
    let x = rng.gen_range(1..=max_x.min(MAX_PREFIX - 2));
    cols[x] = UltimatelyPeriodic::new(vec![1; x + 2], vec![0]).expect("period is nonempty");
    Delta02SetApprox::new(ApproxTable::new(cols)).expect("columns are settled 0/1 sequences")
}

/// Column `x ≥ 1` whose approximation shows 1 before settling at 0.
pub fn flip_columns(b: &Delta02SetApprox) -> Vec<usize> {
    b.table()
        .columns()
        .iter()
        .enumerate()
        .filter(|(x, c)| *x >= 1 && c.limits().limit == Some(0) && c.prefix().contains(&1))
        .map(|(x, _)| x)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preorder;

    #[test]
    fn deterministic() {
        assert_eq!(generate_family(7, 10), generate_family(7, 10));
        assert_eq!(generate_gtable(3, 8), generate_gtable(3, 8));
        assert_eq!(generate_b(3, 10), generate_b(3, 10));
        assert_ne!(generate_family(7, 10), generate_family(8, 10));
    }

    #[test]
    fn family_mix() {
        let fam = generate_family(7, 10);
        assert_eq!(fam.len(), 10);
        let churn = fam
            .members
            .iter()
            .filter(|m| matches!(m, CeerMember::Churn(_)))
            .count();
        assert!(churn > 0 && churn < 10);
        for (e, m) in fam.members.iter().enumerate() {
            match m {
                CeerMember::Script(sc) => {
                    assert!(sc.events().len() <= MAX_EVENTS);
                    assert!(sc.last_event_stage().unwrap_or(0) <= LAST_EVENT_STAGE);
                }
                CeerMember::Churn(ch) => assert_eq!(ch.target_size(), 2 * e + 2),
            }
        }
    }

    #[test]
    fn targeted_scripts() {
        let mut r = rng(1);
        for k in [2, 4, 8, 12] {
            assert!(script_for_size(&mut r, k, true)
                .limit()
                .has_class_of_size(k));
            assert!(!script_for_size(&mut r, k, false)
                .limit()
                .has_class_of_size(k));
        }
    }

    #[test]
    fn table_shapes() {
        for seed in 0..20 {
            let g = generate_gtable(seed, 8);
            assert_eq!(g.width(), 9);
            for c in g.table().columns() {
                assert!(c.prefix().len() <= MAX_PREFIX && c.period().len() <= MAX_PERIOD);
                assert!(c.values().all(|v| (1..=MAX_VALUE).contains(&v)));
            }
            let b = generate_b(seed, 10);
            assert_eq!(b.table().columns()[0], UltimatelyPeriodic::constant(0));
        }
    }

    #[test]
    fn flips_reach_the_construction() {
        for seed in 0..10 {
            let b = generate_b_with_flip(seed, 10);
            let flips = flip_columns(&b);
            assert!(!flips.is_empty());
            let t = preorder::run_preorder(&b, preorder::required_stages(&b, 10)).unwrap();
            assert!(t
                .events()
                .iter()
                .any(|ev| ev.kind == preorder::VEventKind::Reset));
        }
    }
}
