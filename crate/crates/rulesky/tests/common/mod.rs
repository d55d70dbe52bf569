//! Shared helpers for the integration tests.

#![allow(dead_code)]

use rulesky::numeric::ratio;
use rulesky::*;
use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::{Mutex, MutexGuard};

/// Serializes timing-sensitive tests. The test harness runs functions on
/// parallel threads; on a small machine overlapping heavy tests would
/// distort each other's wall-clock budgets.
static SEQUENTIAL: Mutex<()> = Mutex::new(());

pub fn lock() -> MutexGuard<'static, ()> {
    SEQUENTIAL.lock().unwrap_or_else(|e| e.into_inner())
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rulesky")
}

pub fn demo_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/example.basket")
}

pub fn demo_dataset() -> TransactionDataset {
    TransactionDataset::load_basket(std::fs::File::open(demo_path()).unwrap()).unwrap()
}

/// The ten-transaction example dataset scored on freq/conf/pearl at
/// min_freq 0.10: four items, fourteen rules.
pub fn demo_table() -> (TransactionDataset, RelationalTable) {
    let ds = demo_dataset();
    let frequent = mine_frequent(&ds, &ratio(1, 10)).unwrap();
    let rules = generate_rules(&frequent);
    let measures = parse_measure_list("freq,conf,pearl").unwrap();
    let t = RelationalTable::build(&ds, rules, measures).unwrap();
    (ds, t)
}

pub fn itemset(vocab: &Vocabulary, spec: &str) -> Itemset {
    Itemset::new(
        spec.split_whitespace()
            .map(|l| vocab.id_of(l).expect("unknown label"))
            .collect(),
    )
}

/// Row index of the rule `premise -> conclusion`, both given as
/// space-separated item labels in any order.
pub fn row(t: &RelationalTable, vocab: &Vocabulary, premise: &str, conclusion: &str) -> usize {
    let p = itemset(vocab, premise);
    let c = itemset(vocab, conclusion);
    t.rules()
        .iter()
        .position(|r| r.premise == p && r.conclusion == c)
        .expect("rule not in table")
}

/// Runs rar on a table that may hold measures outside the unit interval,
/// normalizing first exactly as the CLI does.
pub fn rar_rows(t: &RelationalTable) -> Vec<usize> {
    if t.all_measures_share_unit_interval() {
        rar(t).unwrap()
    } else {
        rar(&t.normalize().unwrap()).unwrap()
    }
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("failed to spawn the binary")
}

pub fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}
