//! The comparison kernel: value/rule dominance, the semantic comparability
//! relation, and brute-force skyline / representative-rule oracles used as
//! ground truth by the fast selection algorithm.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{Direction, Measure, RelationalTable};
use crate::miner::Rule;
use crate::numeric::Rational;

/// Per-measure comparison of two values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueDominance {
    StrictlyDominates,
    /// At least as preferred, but not strictly (i.e., equal).
    Dominates,
    Neither,
}

pub fn value_dominates(x: &Rational, y: &Rational, m: Measure) -> ValueDominance {
    match m.direction() {
        Direction::Higher => {
            if x > y {
                ValueDominance::StrictlyDominates
            } else if x == y {
                ValueDominance::Dominates
            } else {
                ValueDominance::Neither
            }
        }
    }
}

/// Outcome of comparing two rules over every measure of a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceOutcome {
    StrictlyDominates,
    StrictlyDominated,
    Equivalent,
    /// Neither dominates: each is strictly better somewhere.
    Incomparable,
}

/// Counts rule-pair dominance comparisons, for cost instrumentation.
#[derive(Debug, Default)]
pub struct PairCounter(AtomicU64);

impl PairCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// Compares two rows of the table. Runs on the per-column rank matrix,
/// which is order-isomorphic to the exact values (with the preference
/// orientation already applied), so this is exact.
pub fn compare_rows(t: &RelationalTable, a: usize, b: usize) -> DominanceOutcome {
    let ra = t.rank_vector(a);
    let rb = t.rank_vector(b);
    let mut gt = false;
    let mut lt = false;
    for (x, y) in ra.iter().zip(rb) {
        if x > y {
            gt = true;
        } else if x < y {
            lt = true;
        }
        if gt && lt {
            return DominanceOutcome::Incomparable;
        }
    }
    match (gt, lt) {
        (true, false) => DominanceOutcome::StrictlyDominates,
        (false, true) => DominanceOutcome::StrictlyDominated,
        (false, false) => DominanceOutcome::Equivalent,
        (true, true) => unreachable!("handled by the early return"),
    }
}

/// Compares two rules by id lookup; errors if either is not in the table.
pub fn compare_rules(t: &RelationalTable, r: &Rule, r2: &Rule) -> Result<DominanceOutcome> {
    let a = t
        .row_of(r.id)
        .ok_or_else(|| Error::Domain(format!("rule id {} is not in the table", r.id)))?;
    let b = t
        .row_of(r2.id)
        .ok_or_else(|| Error::Domain(format!("rule id {} is not in the table", r2.id)))?;
    Ok(compare_rows(t, a, b))
}

/// The semantic comparability relation: one rule's premise and conclusion
/// both include (or are both included in) the other's. Reflexive, symmetric,
/// not transitive.
pub fn comparable(r: &Rule, r2: &Rule) -> bool {
    (r.premise.is_subset(&r2.premise) && r.conclusion.is_subset(&r2.conclusion))
        || (r2.premise.is_subset(&r.premise) && r2.conclusion.is_subset(&r.conclusion))
}

/// All-pairs skyline: rows strictly dominated by no other row. Equivalent
/// undominated rows are all kept.
pub fn skyline_naive(t: &RelationalTable) -> Vec<usize> {
    skyline_naive_counted(t, &PairCounter::new())
}

pub fn skyline_naive_counted(t: &RelationalTable, counter: &PairCounter) -> Vec<usize> {
    let n = t.len();
    (0..n)
        .into_par_iter()
        .filter(|&r| {
            let mut local = 0u64;
            let mut dominated = false;
            for o in 0..n {
                if o == r {
                    continue;
                }
                local += 1;
                if compare_rows(t, o, r) == DominanceOutcome::StrictlyDominates {
                    dominated = true;
                    break;
                }
            }
            counter.add(local);
            !dominated
        })
        .collect()
}

/// Rows strictly dominated by `row` but not comparable with it.
pub fn icomp(t: &RelationalTable, row: usize) -> Vec<usize> {
    let rule = &t.rules()[row];
    (0..t.len())
        .filter(|&o| {
            o != row
                && compare_rows(t, row, o) == DominanceOutcome::StrictlyDominates
                && !comparable(rule, &t.rules()[o])
        })
        .collect()
}

/// Definitional representative-rule set: every row not strictly dominated
/// by a comparable undominated row. Ground truth for the fast algorithm;
/// quadratic and proud of it.
pub fn representative_oracle(t: &RelationalTable) -> Vec<usize> {
    representative_oracle_counted(t, &PairCounter::new())
}

pub fn representative_oracle_counted(t: &RelationalTable, counter: &PairCounter) -> Vec<usize> {
    let sky = skyline_naive_counted(t, counter);
    (0..t.len())
        .into_par_iter()
        .filter(|&r| {
            let mut local = 0u64;
            let mut eliminated = false;
            for &s in &sky {
                if s == r || !comparable(&t.rules()[s], &t.rules()[r]) {
                    continue;
                }
                local += 1;
                if compare_rows(t, s, r) == DominanceOutcome::StrictlyDominates {
                    eliminated = true;
                    break;
                }
            }
            counter.add(local);
            !eliminated
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::Itemset;
    use crate::measures::tests::{demo_table, row_by_labels};
    use crate::numeric::ratio;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn value_dominance_orientation() {
        let m = Measure::Confidence;
        assert_eq!(
            value_dominates(&ratio(66, 100), &ratio(40, 100), m),
            ValueDominance::StrictlyDominates
        );
        assert_eq!(
            value_dominates(&ratio(1, 5), &ratio(1, 5), m),
            ValueDominance::Dominates
        );
        assert_eq!(
            value_dominates(&ratio(2, 100), &ratio(5, 100), Measure::Pearl),
            ValueDominance::Neither
        );
    }

    #[test]
    fn rule_comparison_outcomes_on_demo() {
        let (ds, t) = demo_table();
        let row = |p, c| row_by_labels(&t, ds.vocab(), p, c);
        let b_c = row("b", "c");
        let a_d = row("a", "d");
        let b_d = row("b", "d");
        let c_d = row("c", "d");
        assert_eq!(
            compare_rows(&t, b_c, a_d),
            DominanceOutcome::StrictlyDominates
        );
        assert_eq!(
            compare_rows(&t, a_d, b_c),
            DominanceOutcome::StrictlyDominated
        );
        assert_eq!(compare_rows(&t, a_d, b_d), DominanceOutcome::Equivalent);
        assert_eq!(compare_rows(&t, b_c, c_d), DominanceOutcome::Incomparable);
        assert_eq!(compare_rows(&t, c_d, c_d), DominanceOutcome::Equivalent);

        let r = &t.rules()[b_c];
        let r2 = &t.rules()[a_d];
        assert_eq!(
            compare_rules(&t, r, r2).unwrap(),
            DominanceOutcome::StrictlyDominates
        );
        let stranger = Rule {
            id: 999,
            premise: Itemset::new(vec![0]),
            conclusion: Itemset::new(vec![1]),
        };
        assert!(compare_rules(&t, &stranger, r2).is_err());
    }

    #[test]
    fn comparison_is_antisymmetric_on_demo() {
        let (_, t) = demo_table();
        for a in 0..t.len() {
            for b in 0..t.len() {
                let ab = compare_rows(&t, a, b);
                let ba = compare_rows(&t, b, a);
                let mirrored = match ab {
                    DominanceOutcome::StrictlyDominates => DominanceOutcome::StrictlyDominated,
                    DominanceOutcome::StrictlyDominated => DominanceOutcome::StrictlyDominates,
                    other => other,
                };
                assert_eq!(ba, mirrored, "rows {a},{b}");
            }
        }
    }

    fn rule(id: u32, premise: &[u32], conclusion: &[u32]) -> Rule {
        Rule {
            id,
            premise: Itemset::new(premise.to_vec()),
            conclusion: Itemset::new(conclusion.to_vec()),
        }
    }

    #[test]
    fn comparability_examples() {
        // a->d vs b->c: no inclusions either way.
        assert!(!comparable(&rule(0, &[0], &[3]), &rule(1, &[1], &[2])));
        // c->d vs bc->d: premise c ⊆ bc, conclusion d ⊆ d.
        assert!(comparable(&rule(0, &[2], &[3]), &rule(1, &[1, 2], &[3])));
        // Reflexive.
        let r = rule(0, &[1], &[2, 3]);
        assert!(comparable(&r, &r));
    }

    #[test]
    fn comparability_is_not_transitive() {
        // a->c and b->c are each comparable with ab->c but not with each
        // other (items: a=0, b=1, c=2).
        let r = rule(0, &[0], &[2]);
        let r2 = rule(1, &[0, 1], &[2]);
        let r3 = rule(2, &[1], &[2]);
        assert!(comparable(&r, &r2));
        assert!(comparable(&r2, &r3));
        assert!(!comparable(&r, &r3));
    }

    #[test]
    fn skyline_of_demo() {
        let (ds, t) = demo_table();
        let sky: BTreeSet<usize> = skyline_naive(&t).into_iter().collect();
        let expect: BTreeSet<usize> = [
            row_by_labels(&t, ds.vocab(), "b", "c"),
            row_by_labels(&t, ds.vocab(), "c", "d"),
        ]
        .into_iter()
        .collect();
        assert_eq!(sky, expect);
    }

    #[test]
    fn skyline_degenerate_cases() {
        let one = RelationalTable::from_parts(
            vec![rule(0, &[0], &[1])],
            vec![Measure::Frequency],
            vec![ratio(1, 2)],
            false,
        )
        .unwrap();
        assert_eq!(skyline_naive(&one), vec![0]);

        // Two equivalent rules: both kept.
        let twins = RelationalTable::from_parts(
            vec![rule(0, &[0], &[1]), rule(1, &[1], &[0])],
            vec![Measure::Frequency, Measure::Confidence],
            vec![ratio(1, 2), ratio(1, 3), ratio(1, 2), ratio(1, 3)],
            false,
        )
        .unwrap();
        assert_eq!(skyline_naive(&twins), vec![0, 1]);
    }

    #[test]
    fn icomp_of_top_rule_on_demo() {
        let (ds, t) = demo_table();
        let row = |p, c| row_by_labels(&t, ds.vocab(), p, c);
        let got: BTreeSet<usize> = icomp(&t, row("b", "c")).into_iter().collect();
        let expect: BTreeSet<usize> = [
            row("a", "d"),
            row("b", "d"),
            row("c", "b"),
            row("d", "a"),
            row("d", "b"),
            row("c", "b d"),
            row("d", "b c"),
            row("b c", "d"),
            row("c d", "b"),
        ]
        .into_iter()
        .collect();
        // The dominated-and-comparable rules b->cd and bd->c are excluded.
        assert_eq!(got, expect);
        assert!(!got.contains(&row("b", "c d")));
        assert!(!got.contains(&row("b d", "c")));
    }

    #[test]
    fn icomp_misc_cases() {
        let (ds, t) = demo_table();
        let row = |p, c| row_by_labels(&t, ds.vocab(), p, c);
        // The weakest rule dominates nothing.
        assert!(icomp(&t, row("d", "b c")).is_empty());
        // c->d strictly dominates c->b (same premise, conclusions
        // incomparable as sets).
        assert!(icomp(&t, row("c", "d")).contains(&row("c", "b")));
    }

    #[test]
    fn representative_oracle_on_demo() {
        let (ds, t) = demo_table();
        let row = |p, c| row_by_labels(&t, ds.vocab(), p, c);
        let got: BTreeSet<usize> = representative_oracle(&t).into_iter().collect();
        let excluded: BTreeSet<usize> = [row("b", "c d"), row("c", "b d"), row("b d", "c")]
            .into_iter()
            .collect();
        let expect: BTreeSet<usize> = (0..t.len()).filter(|r| !excluded.contains(r)).collect();
        assert_eq!(got, expect);
        assert_eq!(got.len(), 11);
        // Skyline is always contained in the representatives.
        for s in skyline_naive(&t) {
            assert!(got.contains(&s));
        }
    }

    #[test]
    fn oracle_keeps_everything_when_nothing_is_comparable() {
        // Three rules over pairwise-disjoint items; arbitrary values.
        let t = RelationalTable::from_parts(
            vec![
                rule(0, &[0], &[1]),
                rule(1, &[2], &[3]),
                rule(2, &[4], &[5]),
            ],
            vec![Measure::Frequency, Measure::Confidence],
            vec![
                ratio(9, 10),
                ratio(9, 10),
                ratio(1, 2),
                ratio(1, 2),
                ratio(1, 10),
                ratio(1, 10),
            ],
            false,
        )
        .unwrap();
        assert_eq!(representative_oracle(&t), vec![0, 1, 2]);
    }

    #[test]
    fn counters_track_comparisons() {
        let (_, t) = demo_table();
        let c1 = PairCounter::new();
        skyline_naive_counted(&t, &c1);
        let sky_cost = c1.get();
        assert!(sky_cost > 0);
        assert!(sky_cost <= (t.len() * (t.len() - 1)) as u64);

        let c2 = PairCounter::new();
        representative_oracle_counted(&t, &c2);
        assert!(c2.get() >= sky_cost);
    }

    /// Random tables with structured rules (shared item universe so that
    /// comparability actually fires) and coarse values (so that dominance
    /// and ties actually fire).
    pub(crate) fn arb_table() -> impl Strategy<Value = RelationalTable> {
        let k_range = 1usize..=4;
        k_range.prop_flat_map(|k| {
            let row = (
                1u32..31,
                0u32..63,
                prop::collection::vec((0i128..5, 1i128..3), k),
            );
            prop::collection::vec(row, 1..20).prop_map(move |rows| {
                let mut rules = Vec::new();
                let mut values = Vec::new();
                for (i, (pmask, cseed, vals)) in rows.into_iter().enumerate() {
                    let premise: Vec<u32> = (0..5).filter(|b| pmask & (1 << b) != 0).collect();
                    let mut conclusion: Vec<u32> = (0..6)
                        .filter(|b| cseed & (1 << b) != 0 && pmask & (1 << b) == 0)
                        .collect();
                    if conclusion.is_empty() {
                        conclusion = vec![5]; // premise never uses item 5
                    }
                    rules.push(Rule {
                        id: i as u32,
                        premise: Itemset::new(premise),
                        conclusion: Itemset::new(conclusion),
                    });
                    values.extend(vals.into_iter().map(|(n, d)| ratio(n, d)));
                }
                let measures = Measure::ALL[..values.len() / rules.len()].to_vec();
                RelationalTable::from_parts(rules, measures, values, false).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn strict_dominance_is_irreflexive_and_transitive(t in arb_table()) {
            let n = t.len();
            for a in 0..n {
                prop_assert_ne!(compare_rows(&t, a, a), DominanceOutcome::StrictlyDominates);
                prop_assert_eq!(compare_rows(&t, a, a), DominanceOutcome::Equivalent);
            }
            for a in 0..n {
                for b in 0..n {
                    if compare_rows(&t, a, b) != DominanceOutcome::StrictlyDominates {
                        continue;
                    }
                    for c in 0..n {
                        if compare_rows(&t, b, c) == DominanceOutcome::StrictlyDominates {
                            prop_assert_eq!(
                                compare_rows(&t, a, c),
                                DominanceOutcome::StrictlyDominates
                            );
                        }
                    }
                }
            }
        }

        #[test]
        fn skyline_matches_its_own_definition(t in arb_table()) {
            let sky: BTreeSet<usize> = skyline_naive(&t).into_iter().collect();
            for r in 0..t.len() {
                let dominated = (0..t.len())
                    .any(|o| compare_rows(&t, o, r) == DominanceOutcome::StrictlyDominates);
                prop_assert_eq!(sky.contains(&r), !dominated, "row {}", r);
            }
        }

        #[test]
        fn skyline_is_subset_of_representatives(t in arb_table()) {
            let sky: BTreeSet<usize> = skyline_naive(&t).into_iter().collect();
            let rr: BTreeSet<usize> = representative_oracle(&t).into_iter().collect();
            prop_assert!(sky.is_subset(&rr));
        }

        #[test]
        fn dominance_implies_smaller_reference_distance(t in arb_table()) {
            use crate::measures::deg_sim;
            let reference = t.reference_rule();
            for a in 0..t.len() {
                for b in 0..t.len() {
                    if compare_rows(&t, a, b) == DominanceOutcome::StrictlyDominates {
                        let da = deg_sim(&reference, t.vector(a)).unwrap();
                        let db = deg_sim(&reference, t.vector(b)).unwrap();
                        prop_assert!(da < db);
                    }
                }
            }
        }

        #[test]
        fn normalization_never_changes_outcomes(t in arb_table()) {
            let n = t.normalize().unwrap();
            for a in 0..t.len() {
                for b in 0..t.len() {
                    prop_assert_eq!(compare_rows(&t, a, b), compare_rows(&n, a, b));
                }
            }
        }
    }
}
