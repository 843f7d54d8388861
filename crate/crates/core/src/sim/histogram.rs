//! Outcome histograms over a classical register.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Counts keyed by the register value; bit `c` of the key is clbit `c`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    n_bits: usize,
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new(n_bits: usize) -> Self {
        Self {
            n_bits,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn from_counts(n_bits: usize, counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = Self::new(n_bits);
        for (k, c) in counts {
            h.add(k, c);
        }
        h
    }

    pub fn record(&mut self, outcome: u64) {
        self.add(outcome, 1);
    }

    pub fn add(&mut self, outcome: u64, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(outcome).or_insert(0) += count;
        self.total += count;
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn count(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn probability(&self, outcome: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(outcome) as f64 / self.total as f64
        }
    }

    /// Histogram over the listed clbits; bit `j` of the new key is `clbits[j]`.
    pub fn marginal(&self, clbits: &[usize]) -> Self {
        let mut h = Self::new(clbits.len());
        for (&k, &c) in &self.counts {
            let key = clbits
                .iter()
                .enumerate()
                .map(|(j, &b)| (k >> b & 1) << j)
                .sum();
            h.add(key, c);
        }
        h
    }

    /// Dense probability vector over `2^n_bits` outcomes.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        if self.n_bits > 24 {
            return Err(Error::Unsupported(format!(
                "dense vector over {} bits",
                self.n_bits
            )));
        }
        let mut p = vec![0.0; 1 << self.n_bits];
        if self.total > 0 {
            for (&k, &c) in &self.counts {
                p[k as usize] = c as f64 / self.total as f64;
            }
        }
        Ok(p)
    }

    /// Merges counts from another histogram over the same register.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if other.n_bits != self.n_bits {
            return Err(Error::DimensionMismatch("histogram widths differ".into()));
        }
        for (&k, &c) in &other.counts {
            self.add(k, c);
        }
        Ok(())
    }

    pub fn bit_string(&self, outcome: u64) -> String {
        (0..self.n_bits)
            .rev()
            .map(|b| if outcome >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// CSV `outcome_bits,count,probability`; bit strings print the highest clbit first.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("outcome_bits,count,probability\n");
        for (&k, &c) in &self.counts {
            let _ = writeln!(
                s,
                "{},{},{:.12e}",
                self.bit_string(k),
                c,
                self.probability(k)
            );
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "outcome_bits,count,probability" => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "missing histogram header".into(),
                })
            }
        }
        let mut hist: Option<Histogram> = None;
        for (i, line) in lines {
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 3 {
                return Err(bad("expected three fields"));
            }
            let bits = fields[0];
            if bits.is_empty() || bits.len() > 64 || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(bad("invalid bit string"));
            }
            let key = u64::from_str_radix(bits, 2).map_err(|_| bad("invalid bit string"))?;
            let count: u64 = fields[1].parse().map_err(|_| bad("invalid count"))?;
            let h = hist.get_or_insert_with(|| Histogram::new(bits.len()));
            if h.n_bits != bits.len() {
                return Err(bad("inconsistent bit-string width"));
            }
            h.add(key, count);
        }
        Ok(hist.unwrap_or_default())
    }
}
