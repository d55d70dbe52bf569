//! Threshold-based rule filtering, the baseline the representative set is
//! measured against. Thresholds are taken columnwise from a rule set (its
//! per-measure minima) and filtering keeps every rule at or above all of
//! them, so the originating set is always contained in the result.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::RelationalTable;
use crate::numeric::Rational;

/// One inclusive lower bound per table column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdVector {
    pub eps: Vec<Rational>,
}

/// Columnwise minima over `rows`, one per measure.
pub fn thresholds_from_rules(t: &RelationalTable, rows: &[usize]) -> Result<ThresholdVector> {
    if rows.is_empty() {
        return Err(Error::Parameter(
            "cannot derive thresholds from an empty rule set".into(),
        ));
    }
    let k = t.measures().len();
    let mut eps = Vec::with_capacity(k);
    for col in 0..k {
        let mut min = t.value(rows[0], col).clone();
        for &r in &rows[1..] {
            let v = t.value(r, col);
            if *v < min {
                min = v.clone();
            }
        }
        eps.push(min);
    }
    Ok(ThresholdVector { eps })
}

/// Rows meeting or exceeding every threshold, in row order.
pub fn tb_rules(t: &RelationalTable, thresholds: &ThresholdVector) -> Result<Vec<usize>> {
    if thresholds.eps.len() != t.measures().len() {
        return Err(Error::Parameter(format!(
            "threshold vector has {} entries but the table has {} measures",
            thresholds.eps.len(),
            t.measures().len()
        )));
    }
    Ok((0..t.len())
        .into_par_iter()
        .filter(|&row| {
            (0..thresholds.eps.len()).all(|col| *t.value(row, col) >= thresholds.eps[col])
        })
        .collect())
}

/// |TB| / |RR|: how many threshold-passing rules each representative stands
/// in for.
pub fn gain(tb_count: usize, rr_count: usize) -> Result<Rational> {
    if rr_count == 0 {
        return Err(Error::Parameter(
            "gain is undefined for an empty representative set".into(),
        ));
    }
    Ok(Rational::new(
        (tb_count as i64).into(),
        (rr_count as i64).into(),
    ))
}
