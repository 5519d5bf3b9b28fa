//! Real-valued functions on the atoms of a ground set, simple functions over
//! a ring, and maps between ground sets.
//!
//! On a finite ground set every function is simple, so the uniform closure
//! of the simple functions collapses onto them and no separate
//! bounded-closure type exists here.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sets::{GroundSet, SetRing, Subset};

/// An exact-rational-valued function on the atoms of a ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomQuantity {
    ground: GroundSet,
    values: Vec<Rational>,
}

impl RandomQuantity {
    pub fn new(ground: GroundSet, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ground.len() {
            return Err(Error::DimensionMismatch(
                "one value per atom required".into(),
            ));
        }
        Ok(RandomQuantity { ground, values })
    }

    pub fn constant(ground: GroundSet, c: Rational) -> Self {
        let values = vec![c; ground.len()];
        RandomQuantity { ground, values }
    }

    pub fn indicator(s: &Subset) -> Self {
        let ground = s.ground().clone();
        let values = (0..ground.len())
            .map(|i| {
                if s.contains_index(i) {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            })
            .collect();
        RandomQuantity { ground, values }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> &Rational {
        &self.values[atom]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let values = self.values.iter().map(|v| v * c).collect();
        RandomQuantity {
            ground: self.ground.clone(),
            values,
        }
    }

    pub fn add(&self, other: &RandomQuantity) -> Result<Self> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RandomQuantity {
            ground: self.ground.clone(),
            values,
        })
    }

    pub fn mul(&self, other: &RandomQuantity) -> Result<Self> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(RandomQuantity {
            ground: self.ground.clone(),
            values,
        })
    }

    pub fn negate(&self) -> Self {
        self.scale(&Rational::from_integer((-1).into()))
    }

    /// Pointwise `max(X, 0)`.
    pub fn positive_part(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| if v.is_positive() { v.clone() } else { Rational::zero() })
            .collect();
        RandomQuantity {
            ground: self.ground.clone(),
            values,
        }
    }

    /// Pointwise `max(-X, 0)`.
    pub fn negative_part(&self) -> Self {
        self.negate().positive_part()
    }

    /// The level set `{X > t}`.
    pub fn above(&self, t: &Rational) -> Subset {
        self.ground
            .subset_of_indices((0..self.ground.len()).filter(|&i| &self.values[i] > t))
    }

    /// The level set `{X ≥ t}`.
    pub fn at_least(&self, t: &Rational) -> Subset {
        self.ground
            .subset_of_indices((0..self.ground.len()).filter(|&i| &self.values[i] >= t))
    }

    /// Distinct strictly positive values, sorted ascending.
    pub fn positive_values(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = self
            .values
            .iter()
            .filter(|v| v.is_positive())
            .cloned()
            .collect();
        vals.sort();
        vals.dedup();
        vals
    }

    /// `X` restricted to `A` and zero elsewhere, i.e. `X · 1_A`.
    pub fn restrict(&self, a: &Subset) -> Result<Self> {
        if a.ground() != &self.ground {
            return Err(Error::GroundMismatch);
        }
        let values = (0..self.ground.len())
            .map(|i| {
                if a.contains_index(i) {
                    self.values[i].clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        Ok(RandomQuantity {
            ground: self.ground.clone(),
            values,
        })
    }

    /// The composite `h ∘ X` on the domain of `X`, where `self` lives on the
    /// codomain of `X`.
    pub fn compose(&self, x: &PointMap) -> Result<Self> {
        if x.codomain() != &self.ground {
            return Err(Error::GroundMismatch);
        }
        let values = x.targets().iter().map(|&t| self.values[t].clone()).collect();
        Ok(RandomQuantity {
            ground: x.domain().clone(),
            values,
        })
    }
}

/// A map between two finite ground sets, `ω ↦ X(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMap {
    domain: GroundSet,
    codomain: GroundSet,
    targets: Vec<usize>, // per domain atom, index into codomain
}

impl PointMap {
    pub fn new(domain: GroundSet, codomain: GroundSet, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != domain.len() {
            return Err(Error::DimensionMismatch(
                "one target per domain atom required".into(),
            ));
        }
        if targets.iter().any(|&t| t >= codomain.len()) {
            return Err(Error::DimensionMismatch("target index out of range".into()));
        }
        Ok(PointMap {
            domain,
            codomain,
            targets,
        })
    }

    pub fn from_labels(
        domain: GroundSet,
        codomain: GroundSet,
        assignment: &[(&str, &str)],
    ) -> Result<Self> {
        let mut targets = vec![usize::MAX; domain.len()];
        for (from, to) in assignment {
            targets[domain.index_of(from)?] = codomain.index_of(to)?;
        }
        if targets.contains(&usize::MAX) {
            return Err(Error::DimensionMismatch(
                "assignment must cover every domain atom".into(),
            ));
        }
        PointMap::new(domain, codomain, targets)
    }

    pub fn identity(ground: &GroundSet) -> Self {
        PointMap {
            domain: ground.clone(),
            codomain: ground.clone(),
            targets: (0..ground.len()).collect(),
        }
    }

    pub fn domain(&self) -> &GroundSet {
        &self.domain
    }

    pub fn codomain(&self) -> &GroundSet {
        &self.codomain
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn target_of(&self, atom: usize) -> usize {
        self.targets[atom]
    }

    /// Preimage `{X ∈ E}` as a subset of the domain.
    pub fn preimage(&self, e: &Subset) -> Result<Subset> {
        if e.ground() != &self.codomain {
            return Err(Error::GroundMismatch);
        }
        Ok(self.domain.subset_of_indices(
            (0..self.domain.len()).filter(|&i| e.contains_index(self.targets[i])),
        ))
    }
}

/// A finite linear combination of indicators of ring members.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction {
    ring: SetRing,
    terms: Vec<(Rational, Subset)>,
}

impl SimpleFunction {
    pub fn new(ring: SetRing, terms: Vec<(Rational, Subset)>) -> Result<Self> {
        for (_, s) in &terms {
            if !ring.contains(s) {
                return Err(Error::NotInRing);
            }
        }
        Ok(SimpleFunction { ring, terms })
    }

    pub fn zero(ring: SetRing) -> Self {
        SimpleFunction { ring, terms: vec![] }
    }

    pub fn ring(&self) -> &SetRing {
        &self.ring
    }

    pub fn terms(&self) -> &[(Rational, Subset)] {
        &self.terms
    }

    pub fn eval(&self, atom: usize) -> Rational {
        self.terms
            .iter()
            .filter(|(_, s)| s.contains_index(atom))
            .map(|(c, _)| c.clone())
            .sum()
    }

    pub fn as_quantity(&self) -> RandomQuantity {
        let ground = self.ring.ground().clone();
        let values = (0..ground.len()).map(|i| self.eval(i)).collect();
        RandomQuantity { ground, values }
    }
}
