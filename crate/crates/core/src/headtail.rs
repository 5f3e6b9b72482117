//! Head/tail breaks and the ht-index.
//!
//! The series is split at its mean: values strictly above the mean form the
//! head, the rest the tail. Each split with a non-empty head and tail is
//! counted; the recursion then continues on the head while the head is a
//! minority of the current subset (`|head| / |subset| <= head_limit`) and has
//! at least two values. The ht-index is the number of counted splits plus one.

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_HEAD_LIMIT: f64 = 0.4;

/// Smallest ht-index for which a series counts as fractal (two recurrences).
pub const FRACTAL_HT_INDEX: u32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeadTailResult {
    /// Mean of the subset at each counted split, in split order (ascending).
    pub breaks: Vec<f64>,
    /// Class sizes from class 1 (first tail, smallest values) to the final head.
    pub class_counts: Vec<usize>,
    pub ht_index: u32,
    pub head_limit: f64,
    /// `|head| / |subset|` at each counted split.
    pub head_fractions: Vec<f64>,
}

impl HeadTailResult {
    /// How many times the far-more-small-than-large pattern recurs.
    pub fn recurrences(&self) -> u32 {
        self.ht_index - 1
    }

    pub fn is_fractal(&self) -> bool {
        self.ht_index >= FRACTAL_HT_INDEX
    }

    /// Class of `value`: one plus the number of breaks it strictly exceeds.
    pub fn class_of(&self, value: f64) -> u32 {
        1 + self.breaks.iter().take_while(|&&b| value > b).count() as u32
    }

    /// Values of the last head, i.e. those in the top class.
    pub fn final_head(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .copied()
            .filter(|&v| self.class_of(v) == self.ht_index)
            .collect()
    }

    pub fn total(&self) -> usize {
        self.class_counts.iter().sum()
    }
}

pub fn head_tail_breaks(values: &[f64], head_limit: f64) -> Result<HeadTailResult> {
    if values.is_empty() {
        return Err(Error::invalid("head/tail breaks needs at least one value"));
    }
    if !(head_limit > 0.0 && head_limit <= 1.0) {
        return Err(Error::invalid(format!(
            "head limit must lie in (0, 1], got {head_limit}"
        )));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::invalid(format!(
            "values must be finite and positive, found {v}"
        )));
    }

    // Sorted once so the sums, and hence the result, ignore input order; every
    // head is then a suffix.
    let mut current = values.to_vec();
    current.sort_by(f64::total_cmp);
    let mut breaks = Vec::new();
    let mut class_counts = Vec::new();
    let mut head_fractions = Vec::new();
    loop {
        let mean = pairwise_sum(&current) / current.len() as f64;
        let tail_len = current.partition_point(|&v| v <= mean);
        if tail_len == 0 || tail_len == current.len() {
            break;
        }
        let fraction = (current.len() - tail_len) as f64 / current.len() as f64;
        breaks.push(mean);
        class_counts.push(tail_len);
        head_fractions.push(fraction);
        current.drain(..tail_len);
        if fraction > head_limit || current.len() < 2 {
            break;
        }
    }
    class_counts.push(current.len());

    Ok(HeadTailResult {
        ht_index: breaks.len() as u32 + 1,
        breaks,
        class_counts,
        head_limit,
        head_fractions,
    })
}

pub fn ht_index(values: &[f64]) -> Result<u32> {
    Ok(head_tail_breaks(values, DEFAULT_HEAD_LIMIT)?.ht_index)
}

/// Whether the series is fractal under the ht-index criterion, with its ht-index.
pub fn is_fractal_third_definition(values: &[f64]) -> Result<(bool, u32)> {
    let ht = ht_index(values)?;
    Ok((ht >= FRACTAL_HT_INDEX, ht))
}

/// Pairwise summation over blocks of eight.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
