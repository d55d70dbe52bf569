//! Interestingness measures and the rule/measure relational table.
//!
//! Every measure is computed in exact rational arithmetic from the four
//! support counts (|D|, supp(X), supp(Y), supp(X∪Y)); comparisons elsewhere
//! in the crate never look at rounded renderings.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Itemset, TransactionDataset, Vocabulary};
use crate::error::{Error, Result};
use crate::miner::Rule;
use crate::numeric::{parse_decimal, ratio, render_decimal, Rational};

/// Preference orientation of a measure. Dominance comparisons consult this;
/// a lower-is-better measure would be added by giving it `Lower` here and
/// flipping the comparison in one place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Higher,
}

/// The measure registry: six scoring functions over support counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    Frequency,
    Confidence,
    Recall,
    Pearl,
    Loevinger,
    Zhang,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Frequency,
        Measure::Confidence,
        Measure::Recall,
        Measure::Pearl,
        Measure::Loevinger,
        Measure::Zhang,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Measure::Frequency => "freq",
            Measure::Confidence => "conf",
            Measure::Recall => "recall",
            Measure::Pearl => "pearl",
            Measure::Loevinger => "loev",
            Measure::Zhang => "zhang",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            Measure::Frequency => "frequency",
            Measure::Confidence => "confidence",
            Measure::Recall => "recall",
            Measure::Pearl => "pearl",
            Measure::Loevinger => "loevinger",
            Measure::Zhang => "zhang",
        }
    }

    pub fn direction(self) -> Direction {
        Direction::Higher
    }

    /// True when the measure's natural range is already [0,1], so tables
    /// restricted to such measures can skip normalization.
    pub fn shares_unit_interval(self) -> bool {
        match self {
            Measure::Frequency | Measure::Confidence | Measure::Recall | Measure::Pearl => true,
            // Loevinger reaches below 0; Zhang spans [-1, 1].
            Measure::Loevinger | Measure::Zhang => false,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Measure> {
        for m in Measure::ALL {
            if s == m.short_name() || s == m.full_name() {
                return Ok(m);
            }
        }
        Err(Error::Parameter(format!(
            "unknown measure '{s}' (valid: freq|frequency, conf|confidence, recall, \
             pearl, loev|loevinger, zhang)"
        )))
    }
}

/// Parses a comma-separated measure list, rejecting duplicates.
pub fn parse_measure_list(s: &str) -> Result<Vec<Measure>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let m: Measure = part.parse()?;
        if out.contains(&m) {
            return Err(Error::Parameter(format!("duplicate measure '{part}'")));
        }
        out.push(m);
    }
    if out.is_empty() {
        return Err(Error::Parameter("empty measure list".into()));
    }
    Ok(out)
}

/// The four support counts every measure is a function of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSupports {
    /// |D|, number of transactions.
    pub n: u64,
    /// supp(X), premise support.
    pub sx: u64,
    /// supp(Y), conclusion support.
    pub sy: u64,
    /// supp(X ∪ Y), joint support.
    pub sxy: u64,
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// Evaluates one measure from support counts, exactly.
///
/// Two boundary cases have no defined value and are clamped (each clamp is
/// logged at debug level): Loevinger with supp(Y) = |D| becomes 1 when
/// confidence is 1 and 0 otherwise; Zhang with a zero denominator becomes 0.
pub fn evaluate(m: Measure, s: &RuleSupports) -> Result<Rational> {
    if s.n == 0 {
        return Err(Error::Domain("empty dataset: |D| = 0".into()));
    }
    if s.sxy > s.sx || s.sxy > s.sy || s.sx > s.n || s.sy > s.n {
        return Err(Error::Domain(format!(
            "inconsistent support counts: n={} sx={} sy={} sxy={}",
            s.n, s.sx, s.sy, s.sxy
        )));
    }
    let val = match m {
        Measure::Frequency => Rational::new(big(s.sxy), big(s.n)),
        Measure::Confidence => {
            if s.sx == 0 {
                return Err(Error::Domain("confidence undefined: supp(X) = 0".into()));
            }
            Rational::new(big(s.sxy), big(s.sx))
        }
        Measure::Recall => {
            if s.sy == 0 {
                return Err(Error::Domain("recall undefined: supp(Y) = 0".into()));
            }
            Rational::new(big(s.sxy), big(s.sy))
        }
        Measure::Pearl => {
            // P(X) · |conf − P(Y)| = |sxy·n − sx·sy| / n²
            let num = (big(s.sxy) * big(s.n) - big(s.sx) * big(s.sy)).abs();
            Rational::new(num, big(s.n) * big(s.n))
        }
        Measure::Loevinger => {
            if s.sy == s.n {
                // (conf − P(Y)) / (1 − P(Y)) with P(Y) = 1.
                let v = if s.sxy == s.sx {
                    ratio(1, 1)
                } else {
                    Rational::zero()
                };
                log::debug!(
                    "loevinger clamp: supp(Y) = |D| = {}, sxy={} sx={} -> {}",
                    s.n,
                    s.sxy,
                    s.sx,
                    v
                );
                v
            } else {
                if s.sx == 0 {
                    return Err(Error::Domain("loevinger undefined: supp(X) = 0".into()));
                }
                let num = big(s.sxy) * big(s.n) - big(s.sx) * big(s.sy);
                let den = big(s.sx) * (big(s.n) - big(s.sy));
                Rational::new(num, den)
            }
        }
        Measure::Zhang => {
            let num = big(s.sxy) * big(s.n) - big(s.sx) * big(s.sy);
            let d1 = big(s.sxy) * (big(s.n) - big(s.sy));
            let d2 = big(s.sy) * (big(s.sx) - big(s.sxy));
            let den = d1.max(d2);
            if den.is_zero() {
                log::debug!(
                    "zhang clamp: zero denominator for n={} sx={} sy={} sxy={} -> 0",
                    s.n,
                    s.sx,
                    s.sy,
                    s.sxy
                );
                Rational::zero()
            } else {
                Rational::new(num, den)
            }
        }
    };
    Ok(val)
}

/// Evaluates one measure for a rule straight off a dataset.
pub fn evaluate_rule(ds: &TransactionDataset, r: &Rule, m: Measure) -> Result<Rational> {
    let s = RuleSupports {
        n: ds.len() as u64,
        sx: ds.support(&r.premise)?,
        sy: ds.support(&r.conclusion)?,
        sxy: ds.support(&r.items())?,
    };
    evaluate(m, &s)
}

/// The relational table: rules as rows, measures as columns, with exact
/// values, per-column active-domain bounds, and a per-column dense rank
/// matrix the dominance kernel runs on.
#[derive(Debug, Clone)]
pub struct RelationalTable {
    rules: Vec<Rule>,
    measures: Vec<Measure>,
    /// Row-major: values[row * measures.len() + col].
    values: Vec<Rational>,
    normalized: bool,
    col_min: Vec<Rational>,
    col_max: Vec<Rational>,
    /// Row-major dense ranks, order-isomorphic to `values` within a column.
    ranks: Vec<u32>,
    row_index: HashMap<u32, usize>,
}

impl RelationalTable {
    /// Evaluates every (rule, measure) pair against `ds`.
    pub fn build(
        ds: &TransactionDataset,
        rules: Vec<Rule>,
        measures: Vec<Measure>,
    ) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Parameter(
                "relational table needs at least one rule".into(),
            ));
        }
        if measures.is_empty() {
            return Err(Error::Parameter(
                "relational table needs at least one measure".into(),
            ));
        }
        // Distinct itemsets first, so each support is counted once.
        let mut wanted: HashSet<Itemset> = HashSet::new();
        for r in &rules {
            wanted.insert(r.premise.clone());
            wanted.insert(r.conclusion.clone());
            wanted.insert(r.items());
        }
        let wanted: Vec<Itemset> = wanted.into_iter().collect();
        let supports: HashMap<Itemset, u64> = wanted
            .into_par_iter()
            .map(|x| {
                let s = ds.support(&x)?;
                Ok((x, s))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .collect();

        let n = ds.len() as u64;
        let values: Vec<Rational> = rules
            .par_iter()
            .map(|r| {
                let s = RuleSupports {
                    n,
                    sx: supports[&r.premise],
                    sy: supports[&r.conclusion],
                    sxy: supports[&r.items()],
                };
                measures
                    .iter()
                    .map(|&m| evaluate(m, &s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<Vec<_>>>>()?
            .into_iter()
            .flatten()
            .collect();

        Self::from_parts(rules, measures, values, false)
    }

    /// Assembles a table from an explicit value matrix (row-major).
    pub fn from_parts(
        rules: Vec<Rule>,
        measures: Vec<Measure>,
        values: Vec<Rational>,
        normalized: bool,
    ) -> Result<Self> {
        if rules.is_empty() || measures.is_empty() {
            return Err(Error::Parameter(
                "relational table must be non-empty".into(),
            ));
        }
        if values.len() != rules.len() * measures.len() {
            return Err(Error::Parameter(format!(
                "value matrix is {} entries, expected {} rules x {} measures",
                values.len(),
                rules.len(),
                measures.len()
            )));
        }
        let mut row_index = HashMap::with_capacity(rules.len());
        for (row, r) in rules.iter().enumerate() {
            if row_index.insert(r.id, row).is_some() {
                return Err(Error::Parameter(format!("duplicate rule id {}", r.id)));
            }
        }
        let k = measures.len();
        let mut col_min = Vec::with_capacity(k);
        let mut col_max = Vec::with_capacity(k);
        for j in 0..k {
            let mut lo = &values[j];
            let mut hi = &values[j];
            for i in 1..rules.len() {
                let v = &values[i * k + j];
                if v < lo {
                    lo = v;
                }
                if v > hi {
                    hi = v;
                }
            }
            col_min.push(lo.clone());
            col_max.push(hi.clone());
        }
        let ranks = rank_matrix(&values, rules.len(), k);
        Ok(RelationalTable {
            rules,
            measures,
            values,
            normalized,
            col_min,
            col_max,
            ranks,
            row_index,
        })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn value(&self, row: usize, col: usize) -> &Rational {
        &self.values[row * self.measures.len() + col]
    }

    /// The full measure vector of one row.
    pub fn vector(&self, row: usize) -> &[Rational] {
        let k = self.measures.len();
        &self.values[row * k..(row + 1) * k]
    }

    /// Dense per-column rank of one cell; order-isomorphic to `value`.
    pub fn rank(&self, row: usize, col: usize) -> u32 {
        self.ranks[row * self.measures.len() + col]
    }

    pub fn rank_vector(&self, row: usize) -> &[u32] {
        let k = self.measures.len();
        &self.ranks[row * k..(row + 1) * k]
    }

    pub fn col_min(&self, col: usize) -> &Rational {
        &self.col_min[col]
    }

    pub fn col_max(&self, col: usize) -> &Rational {
        &self.col_max[col]
    }

    pub fn row_of(&self, rule_id: u32) -> Option<usize> {
        self.row_index.get(&rule_id).copied()
    }

    /// True when every column's natural range is the unit interval, which
    /// lets similarity-based selection run without normalization.
    pub fn all_measures_share_unit_interval(&self) -> bool {
        self.measures.iter().all(|m| m.shares_unit_interval())
    }

    /// Min-max rescaling of every column onto [0,1]; constant columns map
    /// to 0. Per-column value ordering is preserved, so dominance outcomes
    /// are unchanged.
    pub fn normalize(&self) -> Result<RelationalTable> {
        if self.normalized {
            return Err(Error::Precondition("table is already normalized".into()));
        }
        let k = self.measures.len();
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.rules.len() {
            for j in 0..k {
                let width = &self.col_max[j] - &self.col_min[j];
                let v = if width.is_zero() {
                    Rational::zero()
                } else {
                    (self.value(i, j) - &self.col_min[j]) / width
                };
                values.push(v);
            }
        }
        Self::from_parts(self.rules.clone(), self.measures.clone(), values, true)
    }

    /// The fictitious best rule: per-column maximum of the active domain.
    pub fn reference_rule(&self) -> Vec<Rational> {
        self.col_max.clone()
    }

    /// Writes the table as CSV: `id,premise,conclusion,<measures>` with
    /// items space-separated inside a field and values rendered with enough
    /// significant digits that re-importing preserves every value ordering.
    pub fn write_csv<W: Write>(&self, vocab: &Vocabulary, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "id".to_string(),
            "premise".to_string(),
            "conclusion".to_string(),
        ];
        header.extend(self.measures.iter().map(|m| m.short_name().to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for (i, r) in self.rules.iter().enumerate() {
            let mut rec = vec![
                r.id.to_string(),
                r.premise.labels(vocab),
                r.conclusion.labels(vocab),
            ];
            for j in 0..self.measures.len() {
                rec.push(render_decimal(self.value(i, j), CSV_SIG_DIGITS));
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a table back from `write_csv` output (or any CSV in that
    /// layout). Labels are interned into a fresh vocabulary; rule ids come
    /// from the file.
    pub fn read_csv<R: Read>(input: R) -> Result<(RelationalTable, Vocabulary)> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.len() < 4 || cols[0] != "id" || cols[1] != "premise" || cols[2] != "conclusion" {
            return Err(Error::Input(
                "rule CSV must start with columns id,premise,conclusion and at least one measure"
                    .into(),
            ));
        }
        let measures: Vec<Measure> = cols[3..]
            .iter()
            .map(|c| c.parse())
            .collect::<Result<Vec<_>>>()?;
        let mut vocab = Vocabulary::default();
        let mut rules = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != cols.len() {
                return Err(Error::Input(format!(
                    "CSV row has {} fields, expected {}",
                    rec.len(),
                    cols.len()
                )));
            }
            let id: u32 = rec[0]
                .parse()
                .map_err(|_| Error::Input(format!("bad rule id '{}'", &rec[0])))?;
            let premise = intern_field(&mut vocab, &rec[1], "premise")?;
            let conclusion = intern_field(&mut vocab, &rec[2], "conclusion")?;
            if !premise.is_disjoint(&conclusion) {
                return Err(Error::Input(format!(
                    "rule {id}: premise and conclusion overlap"
                )));
            }
            for j in 3..rec.len() {
                values.push(parse_decimal(&rec[j])?);
            }
            rules.push(Rule {
                id,
                premise,
                conclusion,
            });
        }
        let table = RelationalTable::from_parts(rules, measures, values, false)?;
        Ok((table, vocab))
    }

    /// Projects the table onto a subset of its measures, in the given order.
    pub fn project(&self, measures: &[Measure]) -> Result<RelationalTable> {
        let cols: Vec<usize> = measures
            .iter()
            .map(|m| {
                self.measures
                    .iter()
                    .position(|have| have == m)
                    .ok_or_else(|| {
                        Error::Parameter(format!("measure '{m}' not present in input table"))
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = Vec::with_capacity(self.rules.len() * cols.len());
        for i in 0..self.rules.len() {
            for &j in &cols {
                values.push(self.value(i, j).clone());
            }
        }
        Self::from_parts(
            self.rules.clone(),
            measures.to_vec(),
            values,
            self.normalized,
        )
    }
}

/// Significant digits used for CSV value rendering. Distinct support-ratio
/// values at desk scale differ by far more than 1e-18, so exporting and
/// re-importing never merges or reorders values.
pub const CSV_SIG_DIGITS: usize = 18;

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!("is_io_error guaranteed an Io kind"),
        }
    } else {
        Error::Input(format!("malformed CSV: {e}"))
    }
}

fn intern_field(vocab: &mut Vocabulary, field: &str, what: &str) -> Result<Itemset> {
    let ids: Vec<u32> = field
        .split_whitespace()
        .map(|tok| vocab.intern(tok))
        .collect();
    if ids.is_empty() {
        return Err(Error::Input(format!("empty {what} field")));
    }
    Ok(Itemset::new(ids))
}

/// Dense per-column ranks: equal values share a rank, ranks start at 0 and
/// increase with the value.
fn rank_matrix(values: &[Rational], rows: usize, k: usize) -> Vec<u32> {
    let mut ranks = vec![0u32; rows * k];
    let mut idx: Vec<usize> = Vec::with_capacity(rows);
    for j in 0..k {
        idx.clear();
        idx.extend(0..rows);
        idx.sort_by(|&a, &b| values[a * k + j].cmp(&values[b * k + j]));
        let mut rank = 0u32;
        for (pos, &row) in idx.iter().enumerate() {
            if pos > 0 && values[idx[pos - 1] * k + j] != values[row * k + j] {
                rank += 1;
            }
            ranks[row * k + j] = rank;
        }
    }
    ranks
}

/// Mean absolute difference of two equal-length measure vectors.
pub fn deg_sim(a: &[Rational], b: &[Rational]) -> Result<Rational> {
    if a.len() != b.len() {
        return Err(Error::Parameter(format!(
            "vector length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Parameter(
            "deg_sim needs at least one measure".into(),
        ));
    }
    let mut sum = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d.abs();
    }
    Ok(sum / ratio(a.len() as i128, 1))
}
