//! Fast representative-rule discovery.
//!
//! Rules are consumed in ascending order of distance to the reference rule
//! (ties by rule id). Each selected rule purges the incomparable pool and
//! partitions the subspaces it lives in; rules it strictly dominates are
//! discarded when comparable and parked in the incomparable pool otherwise,
//! while the rest move into per-measure subspaces of the new owner. Since a
//! strict dominator always has a strictly smaller reference distance, every
//! rule is selected or eliminated before anything it dominates — which is
//! what makes the single forward pass sound.
//!
//! Two modes are provided. `Definitional` grants elimination power only to
//! rules undominated in the whole table (checked lazily against the rules
//! already selected) and keeps rules whose vectors tie with their owner; its
//! output provably equals the brute-force representative oracle.
//! `FaithfulAlg1` is the literal pseudocode variant: every selected rule
//! purges, and vector-equivalent rules vanish during partitioning. The two
//! differ on real inputs (see the tests), which is exactly why both exist.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::dominance::{comparable, compare_rows, DominanceOutcome};
use crate::error::{Error, Result};
use crate::measures::{deg_sim, RelationalTable};
use crate::numeric::{to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RarMode {
    /// Elimination per the representative-rule definition; equals the
    /// brute-force oracle on every input.
    #[default]
    Definitional,
    /// Literal pseudocode: selected-but-dominated rules still purge, and
    /// rules with vectors equal to their owner's are silently dropped.
    FaithfulAlg1,
}

/// One selection step, as emitted to JSONL traces. Only the six public
/// fields serialize; the rest are in-process diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub step: usize,
    pub chosen_rule_id: u32,
    pub degsim: f64,
    pub rr_size: usize,
    pub incomp_size: usize,
    pub candidates_remaining: usize,
    #[serde(skip)]
    pub chosen_row: usize,
    #[serde(skip)]
    pub degsim_exact: Rational,
    #[serde(skip)]
    pub from_incomp: bool,
    #[serde(skip)]
    pub discarded_rows: Vec<usize>,
}

#[derive(Debug)]
pub struct RarOutcome {
    /// Selected rows, in discovery order.
    pub rr_rows: Vec<usize>,
    pub iterations: Vec<IterationRecord>,
    /// Rule-pair dominance comparisons performed.
    pub comparisons: u64,
}

/// A rule's per-measure undominated subspaces, per the static definition:
/// subspace i holds every row the owner does not strictly dominate whose
/// value on measure i strictly exceeds the owner's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndominatedSpace {
    pub owner: usize,
    pub subspaces: Vec<BTreeSet<usize>>,
}

/// Computes the owner's undominated subspaces over the whole table.
pub fn undominated_space(t: &RelationalTable, owner: usize) -> UndominatedSpace {
    let k = t.measures().len();
    let mut subspaces = vec![BTreeSet::new(); k];
    for r in 0..t.len() {
        if r == owner {
            continue;
        }
        if compare_rows(t, owner, r) == DominanceOutcome::StrictlyDominates {
            continue;
        }
        for (i, sub) in subspaces.iter_mut().enumerate() {
            if t.rank(r, i) > t.rank(owner, i) {
                sub.insert(r);
            }
        }
    }
    UndominatedSpace { owner, subspaces }
}

/// Three-way split of a candidate set around a freshly selected owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOutcome {
    /// Strictly dominated and comparable: eliminated.
    pub discarded: Vec<usize>,
    /// Strictly dominated but not comparable: parked for later selection.
    pub to_incomp: Vec<usize>,
    /// Not dominated: per-measure subspaces where the candidate strictly
    /// exceeds the owner. A candidate may appear under several measures.
    pub subspaces: Vec<Vec<usize>>,
    /// Vector-equivalent to the owner: exceeds it nowhere, dominated by it
    /// nowhere; kept as live candidates rather than silently dropped.
    pub retained_equivalents: Vec<usize>,
}

/// Splits `candidates` around `owner` (rows; owner excluded if present).
pub fn partition_subspace(
    t: &RelationalTable,
    owner: usize,
    candidates: &[usize],
) -> PartitionOutcome {
    classify_candidates(t, owner, candidates.iter().copied(), &mut 0)
}

fn classify_candidates(
    t: &RelationalTable,
    owner: usize,
    candidates: impl Iterator<Item = usize>,
    comparisons: &mut u64,
) -> PartitionOutcome {
    let k = t.measures().len();
    let mut out = PartitionOutcome {
        discarded: Vec::new(),
        to_incomp: Vec::new(),
        subspaces: vec![Vec::new(); k],
        retained_equivalents: Vec::new(),
    };
    for c in candidates {
        if c == owner {
            continue;
        }
        *comparisons += 1;
        match compare_rows(t, owner, c) {
            DominanceOutcome::StrictlyDominates => {
                if comparable(&t.rules()[owner], &t.rules()[c]) {
                    out.discarded.push(c);
                } else {
                    out.to_incomp.push(c);
                }
            }
            DominanceOutcome::Equivalent => out.retained_equivalents.push(c),
            _ => {
                for (i, sub) in out.subspaces.iter_mut().enumerate() {
                    if t.rank(c, i) > t.rank(owner, i) {
                        sub.push(c);
                    }
                }
            }
        }
    }
    out
}

pub fn rar(t: &RelationalTable) -> Result<Vec<usize>> {
    Ok(rar_trace(t, RarMode::Definitional)?.rr_rows)
}

pub fn rar_with_mode(t: &RelationalTable, mode: RarMode) -> Result<Vec<usize>> {
    Ok(rar_trace(t, mode)?.rr_rows)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum St {
    /// Candidate, member of at least one live subspace.
    Space,
    /// Candidate in the incomparable pool.
    Incomp,
    Selected,
    Discarded,
}

struct Space {
    alive: bool,
    /// Per-measure member lists; the initial pseudo-space uses a single
    /// bucket. Entries may be stale (their state moved on) and are skipped
    /// lazily.
    buckets: Vec<Vec<usize>>,
}

pub fn rar_trace(t: &RelationalTable, mode: RarMode) -> Result<RarOutcome> {
    if !t.is_normalized() && !t.all_measures_share_unit_interval() {
        return Err(Error::Precondition(
            "similarity-driven selection needs a normalized table (or measures that \
             already share the unit interval); call normalize() first"
                .into(),
        ));
    }
    let n = t.len();
    let reference = t.reference_rule();
    let degsim: Vec<Rational> = (0..n)
        .into_par_iter()
        .map(|i| deg_sim(&reference, t.vector(i)))
        .collect::<Result<Vec<_>>>()?;

    // Global selection order: ascending reference distance, ties by rule id.
    // Candidacy only ever shrinks, so a single forward pointer yields the
    // argmin over the live candidates at every step.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        degsim[a]
            .cmp(&degsim[b])
            .then(t.rules()[a].id.cmp(&t.rules()[b].id))
    });

    let mut st = vec![St::Space; n];
    let mut spaces = vec![Space {
        alive: true,
        buckets: vec![(0..n).collect()],
    }];
    // spaces each row was added to; entries can go stale.
    let mut memberships: Vec<Vec<usize>> = vec![vec![0]; n];
    let mut incomp_list: Vec<usize> = Vec::new();
    let mut seen = vec![0u64; n];
    let mut generation = 0u64;

    let mut rr_rows = Vec::new();
    // Selected rows that passed the power check, i.e. are undominated in
    // the whole table.
    let mut powered: Vec<usize> = Vec::new();
    let mut iterations = Vec::new();
    let mut comparisons = 0u64;
    let mut incomp_count = 0usize;
    let mut live = n;
    let mut pointer = 0usize;

    loop {
        while pointer < n && !matches!(st[order[pointer]], St::Space | St::Incomp) {
            pointer += 1;
        }
        if pointer == n {
            break;
        }
        let star = order[pointer];
        let from_incomp = st[star] == St::Incomp;

        // A rule may only eliminate others if it is undominated in the
        // whole table. Any strict-dominator chain tops out at an
        // undominated rule, which has a strictly smaller reference
        // distance, is never eliminated, and passed its own power check —
        // so scanning the powered selections decides the question exactly.
        let power = match mode {
            RarMode::FaithfulAlg1 => true,
            RarMode::Definitional => !powered.iter().any(|&u| {
                comparisons += 1;
                compare_rows(t, u, star) == DominanceOutcome::StrictlyDominates
            }),
        };
        if power && mode == RarMode::Definitional {
            powered.push(star);
        }

        st[star] = St::Selected;
        if from_incomp {
            incomp_count -= 1;
        }
        live -= 1;
        rr_rows.push(star);
        let mut discarded_rows = Vec::new();

        // Purge the incomparable pool, compacting stale entries as we go.
        if power {
            let mut kept = 0;
            for idx in 0..incomp_list.len() {
                let q = incomp_list[idx];
                if st[q] != St::Incomp {
                    continue;
                }
                comparisons += 1;
                if compare_rows(t, star, q) == DominanceOutcome::StrictlyDominates
                    && comparable(&t.rules()[star], &t.rules()[q])
                {
                    st[q] = St::Discarded;
                    incomp_count -= 1;
                    live -= 1;
                    discarded_rows.push(q);
                } else {
                    incomp_list[kept] = q;
                    kept += 1;
                }
            }
            incomp_list.truncate(kept);
        }

        // Partition every live subspace the selected rule belongs to.
        if !from_incomp {
            generation += 1;
            let mut pooled: Vec<usize> = Vec::new();
            for &sid in &memberships[star] {
                if !spaces[sid].alive {
                    continue;
                }
                for bucket in &spaces[sid].buckets {
                    for &r in bucket {
                        if r != star && st[r] == St::Space && seen[r] != generation {
                            seen[r] = generation;
                            pooled.push(r);
                        }
                    }
                }
                spaces[sid].alive = false;
            }
            let split = classify_candidates(t, star, pooled.into_iter(), &mut comparisons);
            for q in split.discarded {
                if power {
                    st[q] = St::Discarded;
                    live -= 1;
                    discarded_rows.push(q);
                } else {
                    // The selected rule lacks elimination power; dominated
                    // comparable rules stay candidates.
                    st[q] = St::Incomp;
                    incomp_count += 1;
                    incomp_list.push(q);
                }
            }
            for q in split.to_incomp {
                st[q] = St::Incomp;
                incomp_count += 1;
                incomp_list.push(q);
            }
            for q in split.retained_equivalents {
                match mode {
                    RarMode::Definitional => {
                        st[q] = St::Incomp;
                        incomp_count += 1;
                        incomp_list.push(q);
                    }
                    RarMode::FaithfulAlg1 => {
                        // The pseudocode assigns these to no subspace, so
                        // they simply disappear.
                        st[q] = St::Discarded;
                        live -= 1;
                        discarded_rows.push(q);
                    }
                }
            }
            if split.subspaces.iter().any(|b| !b.is_empty()) {
                let sid = spaces.len();
                for bucket in &split.subspaces {
                    for &r in bucket {
                        if memberships[r].last() != Some(&sid) {
                            memberships[r].push(sid);
                        }
                    }
                }
                spaces.push(Space {
                    alive: true,
                    buckets: split.subspaces,
                });
            }
        }

        iterations.push(IterationRecord {
            step: rr_rows.len(),
            chosen_rule_id: t.rules()[star].id,
            degsim: to_f64(&degsim[star]),
            rr_size: rr_rows.len(),
            incomp_size: incomp_count,
            candidates_remaining: live,
            chosen_row: star,
            degsim_exact: degsim[star].clone(),
            from_incomp,
            discarded_rows,
        });
    }

    debug_assert_eq!(live, 0);
    Ok(RarOutcome {
        rr_rows,
        iterations,
        comparisons,
    })
}
