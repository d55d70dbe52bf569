//! Frequent itemset mining and candidate rule generation.
//!
//! Mining is level-wise: candidates of size k are joined from frequent
//! itemsets of size k-1 sharing a prefix, pruned by the downward-closure
//! property and counted against the dataset's tid-lists.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::dataset::{Itemset, TransactionDataset, Vocabulary};
use crate::error::{Error, Result};
use crate::numeric::{from_u64, Rational};

/// An association rule `premise -> conclusion` over interned item ids.
///
/// Premise and conclusion are non-empty and disjoint; `id` is unique within
/// one generation run and is the tie-breaker everywhere a deterministic
/// order over rules is needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: u32,
    pub premise: Itemset,
    pub conclusion: Itemset,
}

impl Rule {
    pub fn items(&self) -> Itemset {
        self.premise.union(&self.conclusion)
    }

    /// Renders the rule as `x y -> z` using item labels.
    pub fn display(&self, vocab: &Vocabulary) -> String {
        format!(
            "{} -> {}",
            self.premise.labels(vocab),
            self.conclusion.labels(vocab)
        )
    }
}

/// Mines all itemsets whose relative support reaches `min_freq`.
///
/// `min_freq` must lie in (0, 1]. The result is ordered by (size, itemset)
/// and includes the singletons.
pub fn mine_frequent(ds: &TransactionDataset, min_freq: &Rational) -> Result<Vec<(Itemset, u64)>> {
    use num::Zero;
    if min_freq <= &Rational::zero() || min_freq > &Rational::from_integer(1.into()) {
        return Err(Error::Parameter(format!(
            "min_freq must be in (0, 1], got {min_freq}"
        )));
    }
    // support(x) / |D| >= min_freq, compared exactly.
    let threshold = min_freq * from_u64(ds.len() as u64);
    let is_frequent = |support: u64| from_u64(support) >= threshold;

    let mut result: Vec<(Itemset, u64)> = Vec::new();
    let mut level: Vec<(Itemset, u64)> = (0..ds.item_count() as u32)
        .map(|id| {
            let x = Itemset::from_sorted(vec![id]);
            let s = ds.support(&x)?;
            Ok((x, s))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, s)| is_frequent(*s))
        .collect();

    while !level.is_empty() {
        result.extend(level.iter().cloned());
        let prev: HashSet<&Itemset> = level.iter().map(|(x, _)| x).collect();
        let candidates = join_level(&level, &prev);
        level = candidates
            .into_par_iter()
            .map(|x| {
                let s = ds.support(&x)?;
                Ok((x, s))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, s)| is_frequent(*s))
            .collect();
    }
    Ok(result)
}

/// Joins two size-k itemsets sharing their first k-1 items and prunes
/// candidates with an infrequent subset.
fn join_level(level: &[(Itemset, u64)], prev: &HashSet<&Itemset>) -> Vec<Itemset> {
    let mut out = Vec::new();
    for i in 0..level.len() {
        for j in (i + 1)..level.len() {
            let (a, b) = (level[i].0.ids(), level[j].0.ids());
            let k = a.len();
            if a[..k - 1] != b[..k - 1] {
                continue;
            }
            let (lo, hi) = if a[k - 1] < b[k - 1] {
                (a[k - 1], b[k - 1])
            } else {
                (b[k - 1], a[k - 1])
            };
            let mut ids = a[..k - 1].to_vec();
            ids.push(lo);
            ids.push(hi);
            let cand = Itemset::from_sorted(ids);
            if all_subsets_frequent(&cand, prev) {
                out.push(cand);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn all_subsets_frequent(cand: &Itemset, prev: &HashSet<&Itemset>) -> bool {
    let ids = cand.ids();
    (0..ids.len()).all(|drop| {
        let sub: Vec<u32> = ids
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != drop)
            .map(|(_, &v)| v)
            .collect();
        prev.contains(&Itemset::from_sorted(sub))
    })
}

/// Generates every premise/conclusion split of each frequent itemset with at
/// least two items: 2^n - 2 rules per n-itemset.
///
/// Ids are assigned in a deterministic enumeration order: itemsets sorted
/// lexicographically, splits by ascending premise bitmask.
pub fn generate_rules(frequent: &[(Itemset, u64)]) -> Vec<Rule> {
    let mut itemsets: Vec<&Itemset> = frequent
        .iter()
        .map(|(x, _)| x)
        .filter(|x| x.len() >= 2)
        .collect();
    itemsets.sort_unstable();

    let mut rules = Vec::new();
    let mut next_id = 0u32;
    for z in itemsets {
        let ids = z.ids();
        let n = ids.len();
        assert!(n < 32, "itemset too large to enumerate rule splits");
        let full = (1u32 << n) - 1;
        for mask in 1..full {
            let mut premise = Vec::new();
            let mut conclusion = Vec::new();
            for (bit, &id) in ids.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    premise.push(id);
                } else {
                    conclusion.push(id);
                }
            }
            rules.push(Rule {
                id: next_id,
                premise: Itemset::from_sorted(premise),
                conclusion: Itemset::from_sorted(conclusion),
            });
            next_id += 1;
        }
    }
    rules
}
