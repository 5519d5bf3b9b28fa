//! The universal dyadic-cell map on (0,1) and its sampler.
//!
//! The cells `(1 − 2^{-(n-1)}, 1 − 2^{-n}]`, `n ≥ 1`, partition the open
//! unit interval, and `G(x) = inf{n : 1 − 2^{-n} ≥ x}` names the cell of
//! `x`. Composing with an enumeration `ι` of a finite point set turns any
//! finitely supported law into a measure on the cells whose pushforward
//! under `H = ι ∘ G` is exactly the law: the same fixed map realizes every
//! law by the choice of interval measure alone. Countably supported targets
//! need a dense enumeration and are out of reach here; the enumeration is
//! truncated to the support actually used. Likewise only the identity
//! quantity is realized directly — general quantities reduce to it because
//! companionship composes.
//!
//! The sampler composes the inverse-transform lookup within the cell
//! structure with pseudo-uniform draws from a seeded ChaCha8 stream, each
//! draw an exact dyadic rational, so runs are reproducible bit for bit.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rational::{pow2, Rational};

/// Distinct point labels `s₁, s₂, …` — the enumeration of the (truncated)
/// target support.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    labels: Vec<String>,
}

impl Enumeration {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateAtom(l.clone()));
            }
        }
        Ok(Enumeration { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Label of cell `n` (1-based), when enumerated.
    pub fn label_of_cell(&self, n: u32) -> Option<&str> {
        self.labels.get(n as usize - 1).map(|s| s.as_str())
    }

    pub fn cell_of_label(&self, label: &str) -> Option<u32> {
        self.labels.iter().position(|l| l == label).map(|i| i as u32 + 1)
    }
}

/// Nonnegative masses on the dyadic cells, total at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMeasure {
    masses: BTreeMap<u32, Rational>,
}

impl IntervalMeasure {
    pub fn new(masses: BTreeMap<u32, Rational>) -> Result<Self> {
        if masses.keys().any(|&n| n == 0) {
            return Err(Error::DimensionMismatch("cells are indexed from 1".into()));
        }
        if masses.values().any(|m| m.is_negative()) {
            return Err(Error::NegativeValue);
        }
        let total: Rational = masses.values().cloned().sum();
        if total > Rational::one() {
            return Err(Error::NotALaw);
        }
        Ok(IntervalMeasure { masses })
    }

    pub fn masses(&self) -> &BTreeMap<u32, Rational> {
        &self.masses
    }

    pub fn mass_of_cell(&self, n: u32) -> Rational {
        self.masses.get(&n).cloned().unwrap_or_else(Rational::zero)
    }

    /// The half-open interval `(1 − 2^{-(n-1)}, 1 − 2^{-n}]` of cell `n`.
    pub fn cell_interval(n: u32) -> (Rational, Rational) {
        let lo = Rational::one() - pow2(-(n as i32) + 1);
        let hi = Rational::one() - pow2(-(n as i32));
        (lo, hi)
    }
}

/// `G(x) = inf{n ∈ ℕ : 1 − 2^{-n} ≥ x}`, evaluated exactly: the smallest
/// `n` with `2^n (1 − x) ≥ 1`.
pub fn universal_index(x: &Rational) -> Result<u32> {
    if !x.is_positive() || *x >= Rational::one() {
        return Err(Error::OutsideUnitInterval);
    }
    let gap = Rational::one() - x;
    let mut n = 1u32;
    let mut scaled = Rational::from_integer(2.into()) * &gap;
    while scaled < Rational::one() {
        scaled *= Rational::from_integer(2.into());
        n += 1;
    }
    Ok(n)
}

fn validate_law(law: &BTreeMap<String, Rational>) -> Result<()> {
    if law.is_empty() || law.values().any(|m| !m.is_positive()) {
        return Err(Error::NotALaw);
    }
    if law.values().cloned().sum::<Rational>() != Rational::one() {
        return Err(Error::NotALaw);
    }
    Ok(())
}

/// Places the mass of each support point on its enumeration cell; the
/// pushforward of the result under `H = ι ∘ G` is exactly the law.
pub fn pushforward_measure(
    law: &BTreeMap<String, Rational>,
    enumeration: &Enumeration,
) -> Result<IntervalMeasure> {
    validate_law(law)?;
    let mut masses = BTreeMap::new();
    for (label, mass) in law {
        let cell = enumeration
            .cell_of_label(label)
            .ok_or(Error::UnenumeratedSupport)?;
        masses.insert(cell, mass.clone());
    }
    IntervalMeasure::new(masses)
}

/// Exact check of `Σ_s h(s)·m(s) = Σ_n h(ι(n))·μ(n)` for every test
/// function; absent keys read as zero.
pub fn verify_pushforward(
    law: &BTreeMap<String, Rational>,
    enumeration: &Enumeration,
    im: &IntervalMeasure,
    tests: &[BTreeMap<String, Rational>],
) -> Result<bool> {
    validate_law(law)?;
    for (&cell, mass) in im.masses() {
        if !mass.is_zero() && enumeration.label_of_cell(cell).is_none() {
            return Err(Error::UnenumeratedSupport);
        }
    }
    let value = |h: &BTreeMap<String, Rational>, label: &str| -> Rational {
        h.get(label).cloned().unwrap_or_else(Rational::zero)
    };
    for h in tests {
        let lhs: Rational = law.iter().map(|(s, m)| value(h, s) * m).sum();
        let rhs: Rational = im
            .masses()
            .iter()
            .map(|(&n, m)| value(h, enumeration.label_of_cell(n).expect("checked")) * m)
            .sum();
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The empirical law of a sampling run and its exact total-variation
/// distance to the target.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub counts: BTreeMap<String, u64>,
    pub empirical: BTreeMap<String, Rational>,
    pub tv_distance: Rational,
}

/// Draws `n_samples` pseudo-uniform points from the seeded ChaCha8 stream,
/// maps each through the inverse transform of the cell measure induced by
/// the law, and reports the empirical law with its total-variation distance
/// to the target. Deterministic for a fixed `(seed, n_samples)`.
pub fn sample_companion(
    law: &BTreeMap<String, Rational>,
    enumeration: &Enumeration,
    n_samples: u64,
    seed: u64,
) -> Result<SampleReport> {
    if n_samples == 0 {
        return Err(Error::DimensionMismatch("need at least one draw".into()));
    }
    let im = pushforward_measure(law, enumeration)?;
    // cumulative thresholds in cell order; the final cell absorbs the top
    let ordered: Vec<(&u32, &Rational)> = im.masses().iter().collect();
    let mut cumulative = Vec::with_capacity(ordered.len());
    let mut acc = Rational::zero();
    for (_, m) in &ordered {
        acc += *m;
        cumulative.push(acc.clone());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = num_bigint::BigInt::from(2u8).pow(65);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..n_samples {
        let k = rng.next_u64();
        // (2k + 1) / 2^65 lies strictly inside (0, 1)
        let u = Rational::new(
            num_bigint::BigInt::from(k) * 2 + 1,
            denom.clone(),
        );
        let mut idx = cumulative.len() - 1;
        for (i, c) in cumulative.iter().enumerate() {
            if u <= *c {
                idx = i;
                break;
            }
        }
        let cell = *ordered[idx].0;
        let label = enumeration.label_of_cell(cell).expect("cell from the law");
        *counts.entry(label.to_string()).or_insert(0) += 1;
    }

    let total = Rational::from_integer(n_samples.into());
    let empirical: BTreeMap<String, Rational> = counts
        .iter()
        .map(|(l, &c)| (l.clone(), Rational::from_integer(c.into()) / &total))
        .collect();
    let labels: std::collections::BTreeSet<&String> =
        law.keys().chain(empirical.keys()).collect();
    let mut tv = Rational::zero();
    for label in labels {
        let p = law.get(label).cloned().unwrap_or_else(Rational::zero);
        let q = empirical.get(label).cloned().unwrap_or_else(Rational::zero);
        tv += (p - q).abs();
    }
    tv /= Rational::from_integer(2.into());
    Ok(SampleReport {
        counts,
        empirical,
        tv_distance: tv,
    })
}
