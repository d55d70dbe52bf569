//! Transaction datasets: basket parsing, item interning and exact support queries.
//!
//! The basket format is one transaction per line, items as whitespace-separated
//! tokens. Lines whose first non-blank character is `#` are comments; blank
//! lines are skipped; duplicate tokens within a line collapse to one item.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use crate::error::{Error, Result};
use crate::numeric::{ratio, Rational};

pub type ItemId = u32;

/// Item label interner. Ids are dense and assigned in first-appearance order,
/// so the label/id mapping is a bijection determined by the input.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    labels: Vec<String>,
    index: HashMap<String, ItemId>,
}

impl Vocabulary {
    pub fn intern(&mut self, label: &str) -> ItemId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as ItemId;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn id_of(&self, label: &str) -> Option<ItemId> {
        self.index.get(label).copied()
    }

    pub fn label_of(&self, id: ItemId) -> Option<&str> {
        self.labels.get(id as usize).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Canonical itemset: item ids sorted strictly ascending.
///
/// The derived `Ord` is lexicographic on the id sequence, which fixes the
/// deterministic enumeration order used by rule generation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    /// Builds an itemset from ids in any order; duplicates collapse.
    pub fn new(mut ids: Vec<ItemId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Itemset(ids)
    }

    /// Wraps a vector that is already sorted and duplicate-free.
    pub fn from_sorted(ids: Vec<ItemId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        Itemset(ids)
    }

    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn ids(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn is_subset(&self, other: &Itemset) -> bool {
        if self.0.len() > other.0.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for &x in &self.0 {
            for &y in it.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_disjoint(&self, other: &Itemset) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Itemset(out)
    }

    /// Renders the itemset as space-joined labels.
    pub fn labels(&self, vocab: &Vocabulary) -> String {
        self.0
            .iter()
            .map(|&id| vocab.label_of(id).unwrap_or("?"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone)]
pub struct Transaction {
    pub tid: u32,
    pub items: Itemset,
}

/// Immutable transaction dataset with per-item tid-lists.
#[derive(Debug, Clone)]
pub struct TransactionDataset {
    transactions: Vec<Transaction>,
    vocab: Vocabulary,
    tid_lists: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub item_count: usize,
    pub transaction_count: usize,
    /// Mean number of items per transaction, exact.
    pub avg_transaction_size: Rational,
}

impl TransactionDataset {
    /// Parses basket-format text from any reader.
    pub fn load_basket<R: Read>(source: R) -> Result<Self> {
        let reader = BufReader::new(source);
        let mut vocab = Vocabulary::default();
        let mut transactions = Vec::new();
        let mut tid_lists: Vec<Vec<u32>> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tid = transactions.len() as u32;
            let ids: Vec<ItemId> = trimmed
                .split_whitespace()
                .map(|tok| vocab.intern(tok))
                .collect();
            let items = Itemset::new(ids);
            for &id in items.ids() {
                let idx = id as usize;
                if tid_lists.len() <= idx {
                    tid_lists.resize(idx + 1, Vec::new());
                }
                tid_lists[idx].push(tid);
            }
            transactions.push(Transaction { tid, items });
        }
        if transactions.is_empty() {
            return Err(Error::Input("dataset contains no transactions".into()));
        }
        tid_lists.resize(vocab.len(), Vec::new());
        let ds = TransactionDataset {
            transactions,
            vocab,
            tid_lists,
        };
        debug_assert_eq!(
            ds.transactions.iter().map(|t| t.items.len()).sum::<usize>(),
            ds.tid_lists.iter().map(|l| l.len()).sum::<usize>(),
        );
        Ok(ds)
    }

    pub fn load_basket_str(text: &str) -> Result<Self> {
        Self::load_basket(text.as_bytes())
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn item_count(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Absolute support of `x`: the number of transactions containing every
    /// item of `x`. The empty itemset is contained in every transaction.
    pub fn support(&self, x: &Itemset) -> Result<u64> {
        for &id in x.ids() {
            if id as usize >= self.vocab.len() {
                return Err(Error::Domain(format!("unknown item id {id}")));
            }
        }
        if x.is_empty() {
            return Ok(self.transactions.len() as u64);
        }
        // Intersect tid-lists smallest-first so the running set only shrinks.
        let mut lists: Vec<&Vec<u32>> = x
            .ids()
            .iter()
            .map(|&id| &self.tid_lists[id as usize])
            .collect();
        lists.sort_by_key(|l| l.len());
        let mut acc: Vec<u32> = lists[0].clone();
        for list in &lists[1..] {
            if acc.is_empty() {
                break;
            }
            acc = intersect_sorted(&acc, list);
        }
        Ok(acc.len() as u64)
    }

    pub fn stats(&self) -> DatasetStats {
        let total_items: usize = self.transactions.iter().map(|t| t.items.len()).sum();
        DatasetStats {
            item_count: self.vocab.len(),
            transaction_count: self.transactions.len(),
            avg_transaction_size: ratio(total_items as i128, self.transactions.len() as i128),
        }
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Support index: memoized itemset supports on top of a dataset.
///
/// Mining fills the memo with every frequent itemset it counts; later measure
/// evaluation then never re-intersects tid-lists for those sets. Lookups of
/// itemsets missing from the memo fall back to the dataset.
pub struct SupportIndex<'d> {
    ds: &'d TransactionDataset,
    memo: HashMap<Itemset, u64>,
}

impl<'d> SupportIndex<'d> {
    pub fn new(ds: &'d TransactionDataset) -> Self {
        SupportIndex {
            ds,
            memo: HashMap::new(),
        }
    }

    pub fn from_frequent(ds: &'d TransactionDataset, frequent: &[(Itemset, u64)]) -> Self {
        let memo = frequent.iter().cloned().collect();
        SupportIndex { ds, memo }
    }

    pub fn dataset(&self) -> &TransactionDataset {
        self.ds
    }

    pub fn transaction_count(&self) -> u64 {
        self.ds.len() as u64
    }

    pub fn get(&self, x: &Itemset) -> Result<u64> {
        if let Some(&s) = self.memo.get(x) {
            return Ok(s);
        }
        self.ds.support(x)
    }
}
