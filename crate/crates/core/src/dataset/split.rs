//! Stratified train/validation/test splitting.
//!
//! Shuffling uses SplitMix64 seeded with `seed XOR FNV-1a-64(label)` and a
//! descending Fisher–Yates pass in which position `i` swaps with
//! `j = (next_u64() * (i + 1)) >> 64` (128-bit product). Both are simple enough
//! to reimplement bit-for-bit in any language.
//!
//! Per-class quotas use largest-remainder rounding with exact integer weights.
//! Equal remainders go to the split whose running total across the classes seen
//! so far (in label order) lags its exact share the most, then to validation,
//! test and train in that order.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LabeledExample;
use crate::{jsonl, Error, Result};

pub const SPLIT_NAMES: [&str; 3] = ["train", "validation", "test"];

/// Split proportions as positive integer weights, e.g. `80:10:10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[u64; 3]", into = "[u64; 3]")]
pub struct SplitRatios([u64; 3]);

impl SplitRatios {
    pub fn new(train: u64, validation: u64, test: u64) -> Result<Self> {
        let w = [train, validation, test];
        if w.contains(&0) {
            return Err(Error::InvalidConfig(format!(
                "split ratios must all be positive, got {train}:{validation}:{test}"
            )));
        }
        if w.iter().try_fold(0u64, |acc, &x| acc.checked_add(x)).is_none_or(|s| s > 1 << 32) {
            return Err(Error::InvalidConfig("split ratio weights too large".into()));
        }
        Ok(Self(w))
    }

    pub fn weights(&self) -> [u64; 3] {
        self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Exact fraction for split `s` as a float.
    pub fn fraction(&self, s: usize) -> f64 {
        self.0[s] as f64 / self.total() as f64
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self([80, 10, 10])
    }
}

impl TryFrom<[u64; 3]> for SplitRatios {
    type Error = Error;

    fn try_from(w: [u64; 3]) -> Result<Self> {
        Self::new(w[0], w[1], w[2])
    }
}

impl From<SplitRatios> for [u64; 3] {
    fn from(r: SplitRatios) -> Self {
        r.0
    }
}

impl fmt::Display for SplitRatios {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Parses `80:10:10`, `8,1,1` or decimal fractions such as `0.8:0.1:0.1`.
impl FromStr for SplitRatios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("cannot parse split ratios `{s}`"));
        let parts: Vec<&str> = s.split([':', ',']).map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let scale = parts
            .iter()
            .map(|p| p.split_once('.').map_or(0, |(_, frac)| frac.len()))
            .max()
            .unwrap_or(0);
        if scale > 9 {
            return Err(bad());
        }
        let mut w = [0u64; 3];
        for (slot, part) in w.iter_mut().zip(&parts) {
            let (int, frac) = part.split_once('.').unwrap_or((part, ""));
            let digits = format!("{int}{frac:0<scale$}");
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            *slot = digits.parse().map_err(|_| bad())?;
        }
        let sum: u64 = w.iter().sum();
        if scale > 0 && sum != 10u64.pow(scale as u32) {
            return Err(Error::InvalidConfig(format!("split fractions `{s}` do not sum to 1")));
        }
        let g = gcd(gcd(w[0], w[1]), w[2]).max(1);
        Self::new(w[0] / g, w[1] / g, w[2] / g)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub ratios: SplitRatios,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            ratios: SplitRatios::default(),
            seed: 42,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitResult {
    pub train: Vec<LabeledExample>,
    pub validation: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
    /// split name → label → count
    pub per_class_counts: BTreeMap<String, BTreeMap<String, usize>>,
}

impl SplitResult {
    pub fn splits(&self) -> [(&'static str, &[LabeledExample]); 3] {
        [
            (SPLIT_NAMES[0], &self.train),
            (SPLIT_NAMES[1], &self.validation),
            (SPLIT_NAMES[2], &self.test),
        ]
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.train.len(), self.validation.len(), self.test.len()]
    }
}

/// The SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    /// Generator for one label class.
    pub fn for_class(seed: u64, label: &str) -> Self {
        Self(seed ^ fnv1a64(label.as_bytes()))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..n` by multiply-shift.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

pub fn stratified_split(examples: &[LabeledExample], spec: &SplitSpec) -> Result<SplitResult> {
    let mut classes: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, e) in examples.iter().enumerate() {
        let key = if spec.stratified { e.label.as_str() } else { "" };
        classes.entry(key).or_default().push(i);
    }
    if spec.stratified {
        if let Some((label, idx)) = classes.iter().find(|(_, idx)| idx.len() < 3) {
            return Err(Error::ClassTooSmall {
                label: label.to_string(),
                count: idx.len(),
            });
        }
    }

    let weights = spec.ratios.weights();
    let total = spec.ratios.total() as u128;
    let mut target = [0u128; 3];
    let mut assigned = [0u128; 3];
    let mut destination = vec![0usize; examples.len()];

    for (label, mut members) in classes {
        SplitMix64::for_class(spec.seed, label).shuffle(&mut members);
        let n = members.len() as u128;
        let mut quota = [0u128; 3];
        let mut remainder = [0u128; 3];
        for s in 0..3 {
            let exact = n * weights[s] as u128;
            quota[s] = exact / total;
            remainder[s] = exact % total;
            target[s] += exact;
        }
        let leftover = (n - quota.iter().sum::<u128>()) as usize;
        // Deficit of each split, in units of 1/total examples, before this
        // class's leftovers are handed out.
        let deficit = |s: usize| target[s] as i128 - (total * (assigned[s] + quota[s])) as i128;
        let mut order = [1usize, 2, 0];
        order.sort_by(|&a, &b| {
            remainder[b]
                .cmp(&remainder[a])
                .then_with(|| deficit(b).cmp(&deficit(a)))
        });
        for &s in &order[..leftover] {
            quota[s] += 1;
        }
        for s in 0..3 {
            assigned[s] += quota[s];
        }

        let (train_n, validation_n) = (quota[0] as usize, quota[1] as usize);
        for (pos, &idx) in members.iter().enumerate() {
            destination[idx] = if pos < train_n {
                0
            } else if pos < train_n + validation_n {
                1
            } else {
                2
            };
        }
    }

    let mut result = SplitResult::default();
    for name in SPLIT_NAMES {
        result.per_class_counts.insert(name.to_string(), BTreeMap::new());
    }
    for (example, &s) in examples.iter().zip(&destination) {
        *result
            .per_class_counts
            .get_mut(SPLIT_NAMES[s])
            .expect("split initialized")
            .entry(example.label.clone())
            .or_insert(0) += 1;
        let list = match s {
            0 => &mut result.train,
            1 => &mut result.validation,
            _ => &mut result.test,
        };
        list.push(example.clone());
    }
    Ok(result)
}

#[derive(Serialize)]
struct SplitReport<'a> {
    seed: u64,
    ratios: SplitRatios,
    stratified: bool,
    totals: BTreeMap<&'static str, usize>,
    per_class_counts: &'a BTreeMap<String, BTreeMap<String, usize>>,
}

/// Writes `train.jsonl`, `validation.jsonl`, `test.jsonl` and
/// `split_report.json` into `dir`.
pub fn write_split(dir: &Path, result: &SplitResult, spec: &SplitSpec) -> Result<()> {
    for (name, examples) in result.splits() {
        jsonl::write(&dir.join(format!("{name}.jsonl")), examples)?;
    }
    let report = SplitReport {
        seed: spec.seed,
        ratios: spec.ratios,
        stratified: spec.stratified,
        totals: SPLIT_NAMES.into_iter().zip(result.sizes()).collect(),
        per_class_counts: &result.per_class_counts,
    };
    jsonl::write_pretty(&dir.join("split_report.json"), &report)
}
