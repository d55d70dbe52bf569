//! Association-rule mining with skyline and representative-rule selection.
//!
//! The pipeline: load a transaction dataset ([`dataset`]), mine frequent
//! itemsets and derive rules ([`miner`]), score them with interestingness
//! measures into a relational table ([`measures`]), then shrink the rule
//! set — either to the Pareto front under value dominance ([`dominance`])
//! or to the representative rules that additionally exploit the semantic
//! comparability of rules ([`rar`]). The [`baseline`] module provides the
//! threshold filter the representative set is measured against, and
//! [`cli`] wires everything into the `rulesky` binary.
//!
//! All scores are exact rationals; floating point appears only at the
//! reporting edge.

pub mod baseline;
pub mod cli;
pub mod dataset;
pub mod dominance;
pub mod error;
pub mod measures;
pub mod miner;
pub mod numeric;
pub mod rar;

pub use dataset::{Itemset, TransactionDataset, Vocabulary};
pub use dominance::{
    comparable, compare_rows, compare_rules, icomp, representative_oracle, skyline_naive,
    DominanceOutcome, PairCounter,
};
pub use error::{Error, Result};
pub use measures::{deg_sim, parse_measure_list, Measure, RelationalTable, RuleSupports};
pub use miner::{generate_rules, mine_frequent, Rule};
pub use numeric::Rational;
pub use rar::{rar, rar_trace, rar_with_mode, undominated_space, RarMode, RarOutcome};
