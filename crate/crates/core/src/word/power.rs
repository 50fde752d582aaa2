//! Repetition scanning: maximal powers `A^k` occurring as contiguous blocks.
//!
//! For each period `p` the scan samples positions `0, p, 2p, ..`; every
//! repetition of period `p` and exponent at least 2 contains a sample `j`
//! with `j + p` inside it, and the maximal run through `j` is recovered with
//! one forward and one backward longest-common-extension query. With O(1)
//! queries the whole scan is O(n log n).

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::lce::Lce;

/// `exponent` consecutive copies of the block `seq[start .. start + period]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PowerWitness {
    pub start: usize,
    pub period: usize,
    pub exponent: usize,
}

impl PowerWitness {
    pub fn end(&self) -> usize {
        self.start + self.period * self.exponent
    }

    /// Re-checks the witness letter by letter.
    pub fn holds_in<T: PartialEq>(&self, seq: &[T]) -> bool {
        self.period > 0
            && self.exponent >= 1
            && self.end() <= seq.len()
            && (self.start + self.period..self.end()).all(|i| seq[i] == seq[i - self.period])
    }
}

struct Scanner {
    lce: Lce,
    n: usize,
}

impl Scanner {
    fn new<T: Eq + Hash>(seq: &[T]) -> Self {
        let mut ids: HashMap<&T, u32> = HashMap::new();
        let coded: Vec<u32> = seq
            .iter()
            .map(|t| {
                let next = ids.len() as u32 + 1;
                *ids.entry(t).or_insert(next)
            })
            .collect();
        let n = coded.len();
        // text = seq # reverse(seq); the single 0 separator stops every extension
        let mut text = coded.clone();
        text.push(0);
        text.extend(coded.iter().rev());
        Scanner {
            lce: Lce::new(&text),
            n,
        }
    }

    fn forward(&self, i: usize, j: usize) -> usize {
        self.lce.query(i, j)
    }

    /// Common suffix length of `seq[..=i]` and `seq[..=j]`.
    fn backward(&self, i: usize, j: usize) -> usize {
        let n = self.n;
        self.lce.query(n + 1 + (n - 1 - i), n + 1 + (n - 1 - j))
    }

    /// Maximal run of period `p` through sample `j`, as (start, length).
    fn run_at(&self, j: usize, p: usize) -> (usize, usize) {
        let fwd = self.forward(j, j + p);
        let bwd = if j == 0 { 0 } else { self.backward(j - 1, j + p - 1) };
        let start = j - bwd.min(j);
        (start, bwd + p + fwd)
    }

    /// Scans periods `1..` while `period * min_exponent <= n`. Returns the
    /// first witness with exponent at least `min_exponent`, or with
    /// `maximize` the best one found.
    fn scan(&self, min_exponent: usize, maximize: bool) -> Option<PowerWitness> {
        let n = self.n;
        let mut best: Option<PowerWitness> = None;
        let mut p = 1;
        loop {
            let need = best.map_or(min_exponent, |b| b.exponent + 1).max(2);
            if p * need > n {
                break;
            }
            let mut j = 0;
            while j + p < n {
                let (start, len) = self.run_at(j, p);
                let exponent = len / p;
                if exponent >= need {
                    let w = PowerWitness {
                        start,
                        period: p,
                        exponent,
                    };
                    if !maximize {
                        return Some(w);
                    }
                    if best.is_none_or(|b| exponent > b.exponent) {
                        best = Some(w);
                    }
                }
                // samples whose successor still lies inside this run repeat it
                let run_end = start + len;
                let resume = (run_end.saturating_sub(p)).div_ceil(p) * p;
                j = (j + p).max(resume);
            }
            p += 1;
        }
        best
    }
}

/// The largest `k` such that some `A^k` occurs contiguously, with a witness
/// when `k >= 2`. Empty input has order 0.
pub fn max_power_order<T: Eq + Hash>(seq: &[T]) -> (usize, Option<PowerWitness>) {
    if seq.is_empty() {
        return (0, None);
    }
    let w = Scanner::new(seq).scan(2, true);
    (w.map_or(1, |w| w.exponent), w)
}

/// Some repetition of exponent at least `exponent`, if one exists.
pub fn power_at_least<T: Eq + Hash>(seq: &[T], exponent: usize) -> Option<PowerWitness> {
    if exponent <= 1 {
        return (!seq.is_empty()).then_some(PowerWitness {
            start: 0,
            period: seq.len(),
            exponent: 1,
        });
    }
    if seq.len() < exponent {
        return None;
    }
    Scanner::new(seq).scan(exponent, false)
}

/// A `(k+1)`-th power inside `seq`, if there is one.
pub fn k_aperiodicity_witness<T: Eq + Hash>(seq: &[T], k: usize) -> Option<PowerWitness> {
    power_at_least(seq, k + 1)
}

/// No `k + 1` consecutive identical blocks.
pub fn is_k_aperiodic<T: Eq + Hash>(seq: &[T], k: usize) -> bool {
    k_aperiodicity_witness(seq, k).is_none()
}
