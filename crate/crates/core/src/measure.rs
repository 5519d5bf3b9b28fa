//! Additive set functions on rings, outer and inner measures, the carrier
//! ring where they agree, and the extension order between structures.
//!
//! On a finite ring, finite additivity is equivalent to modularity
//! `λ(A) + λ(B) = λ(A∪B) + λ(A∩B)` together with `λ(∅) = 0`, which is what
//! the validating constructor checks pairwise.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{ExtendedRational, Rational};
use crate::sets::{GroundSet, SetRing, Subset};

/// A nonnegative additive set function on an enumerated ring.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveSetFunction {
    ring: SetRing,
    values: Vec<Rational>, // aligned with ring.sets()
}

impl AdditiveSetFunction {
    /// Validates nonnegativity, `λ(∅) = 0` and modularity over all pairs.
    pub fn new(ring: SetRing, values: Vec<Rational>) -> Result<Self> {
        if values.len() != ring.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} ring members, {} values",
                ring.len(),
                values.len()
            )));
        }
        let f = AdditiveSetFunction { ring, values };
        for (s, v) in f.ring.sets().iter().zip(&f.values) {
            if v < &Rational::zero() {
                return Err(Error::NegativeValue);
            }
            if s.is_empty() && !v.is_zero() {
                return Err(Error::NotAdditive("λ(∅) ≠ 0".into()));
            }
        }
        for a in f.ring.sets() {
            for b in f.ring.sets() {
                let lhs = f.value(a)? + f.value(b)?;
                let rhs = f.value(&a.union(b)?)? + f.value(&a.intersection(b)?)?;
                if lhs != rhs {
                    return Err(Error::NotAdditive(format!(
                        "modularity fails on {a} and {b}"
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Builds the ring of all unions of the given disjoint cells together
    /// with the additive function summing the cell masses. Additive by
    /// construction, so the quadratic modularity check is skipped.
    pub fn from_cell_masses(
        ground: &GroundSet,
        cells: &[Subset],
        masses: &[Rational],
    ) -> Result<Self> {
        if cells.len() != masses.len() {
            return Err(Error::DimensionMismatch(
                "one mass per cell required".into(),
            ));
        }
        if cells.len() > 24 {
            return Err(Error::GroundTooLarge {
                max: 24,
                got: cells.len(),
            });
        }
        let mut seen = 0u128;
        for (c, m) in cells.iter().zip(masses) {
            if c.ground() != ground {
                return Err(Error::GroundMismatch);
            }
            if c.is_empty() || seen & c.bits() != 0 {
                return Err(Error::NotAdditive("cells must be nonempty and disjoint".into()));
            }
            if m < &Rational::zero() {
                return Err(Error::NegativeValue);
            }
            seen |= c.bits();
        }
        let mut members = Vec::with_capacity(1 << cells.len());
        for choice in 0u32..(1 << cells.len()) {
            let mut bits = 0u128;
            for (j, c) in cells.iter().enumerate() {
                if choice >> j & 1 == 1 {
                    bits |= c.bits();
                }
            }
            members.push(bits);
        }
        let ring = SetRing::from_masks(ground.clone(), members);
        let values = ring
            .sets()
            .iter()
            .map(|s| {
                cells
                    .iter()
                    .zip(masses)
                    .filter(|(c, _)| c.bits() & s.bits() == c.bits())
                    .map(|(_, m)| m.clone())
                    .sum()
            })
            .collect();
        Ok(AdditiveSetFunction {
            ring,
            values,
        })
    }

    /// For callers that construct values known to be additive (restrictions
    /// and extensions of validated structures).
    pub(crate) fn from_parts(ring: SetRing, values: Vec<Rational>) -> Self {
        debug_assert_eq!(ring.len(), values.len());
        AdditiveSetFunction { ring, values }
    }

    pub fn ring(&self) -> &SetRing {
        &self.ring
    }

    pub fn value(&self, s: &Subset) -> Result<&Rational> {
        self.ring
            .position(s)
            .map(|i| &self.values[i])
            .ok_or(Error::NotInRing)
    }

    pub fn values(&self) -> impl Iterator<Item = (&Subset, &Rational)> {
        self.ring.sets().iter().zip(self.values.iter())
    }

    pub fn total(&self) -> Rational {
        let span = self.ring.span();
        self.value(&span).cloned().unwrap_or_else(|_| Rational::zero())
    }
}

/// A ring of subsets paired with a nonnegative additive set function on it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureStructure {
    lambda: AdditiveSetFunction,
}

impl MeasureStructure {
    pub fn new(lambda: AdditiveSetFunction) -> Self {
        MeasureStructure { lambda }
    }

    /// Power-set structure from per-atom masses.
    pub fn from_atom_masses(ground: &GroundSet, masses: &[Rational]) -> Result<Self> {
        if masses.len() != ground.len() {
            return Err(Error::DimensionMismatch("one mass per atom required".into()));
        }
        let cells: Vec<Subset> = (0..ground.len()).map(|i| ground.singleton(i)).collect();
        Ok(MeasureStructure::new(AdditiveSetFunction::from_cell_masses(
            ground, &cells, masses,
        )?))
    }

    pub fn lambda(&self) -> &AdditiveSetFunction {
        &self.lambda
    }

    pub fn ring(&self) -> &SetRing {
        self.lambda.ring()
    }

    pub fn ground(&self) -> &GroundSet {
        self.lambda.ring().ground()
    }

    pub fn value(&self, s: &Subset) -> Result<&Rational> {
        self.lambda.value(s)
    }
}

/// `inf { λ(A) : A ∈ ring, E ⊆ A }`, infinite when no member covers `E`.
pub fn outer_measure(ms: &MeasureStructure, e: &Subset) -> Result<ExtendedRational> {
    if e.ground() != ms.ground() {
        return Err(Error::GroundMismatch);
    }
    let mut best: Option<&Rational> = None;
    for (s, v) in ms.lambda.values() {
        if e.bits() & !s.bits() == 0 && best.is_none_or(|b| v < b) {
            best = Some(v);
        }
    }
    Ok(best
        .map(|b| ExtendedRational::Finite(b.clone()))
        .unwrap_or(ExtendedRational::Infinite))
}

/// `sup { λ(B) : B ∈ ring, B ⊆ E }`; the empty set always competes, so the
/// supremum is finite.
pub fn inner_measure(ms: &MeasureStructure, e: &Subset) -> Result<Rational> {
    if e.ground() != ms.ground() {
        return Err(Error::GroundMismatch);
    }
    let mut best = Rational::zero();
    for (s, v) in ms.lambda.values() {
        if s.bits() & !e.bits() == 0 && *v > best {
            best = v.clone();
        }
    }
    Ok(best)
}

/// Outer and inner measure agree finitely on `e`; returns the common value.
pub fn carried_value(ms: &MeasureStructure, e: &Subset) -> Result<Option<Rational>> {
    let inner = inner_measure(ms, e)?;
    match outer_measure(ms, e)? {
        ExtendedRational::Finite(outer) if outer == inner => Ok(Some(inner)),
        _ => Ok(None),
    }
}

/// The carrier structure: the ring of all subsets where outer and inner
/// measures agree finitely, carrying the unique extension of λ.
///
/// Enumerates every subset of the ground set, so it is limited to small
/// grounds; per-set queries should use `carried_value` instead.
pub fn carrier_ring(ms: &MeasureStructure) -> Result<MeasureStructure> {
    let n = ms.ground().len();
    if n > 20 {
        return Err(Error::GroundTooLarge { max: 20, got: n });
    }
    let mut members = Vec::new();
    let mut values = Vec::new();
    for bits in 0u128..(1u128 << n) {
        let e = ms.ground().subset_of_indices((0..n).filter(|&i| bits >> i & 1 == 1));
        if let Some(v) = carried_value(ms, &e)? {
            members.push(e.bits());
            values.push(v);
        }
    }
    let ring = SetRing::from_masks(ms.ground().clone(), members);
    let values = ring
        .sets()
        .iter()
        .map(|s| Ok(carried_value(ms, s)?.expect("member of the carrier is carried")))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureStructure::new(AdditiveSetFunction { ring, values }))
}

/// The extension order: every member of `small`'s ring is carried by `big`
/// with the same value. Errors when the structures live on different grounds.
pub fn is_extension(small: &MeasureStructure, big: &MeasureStructure) -> Result<bool> {
    if small.ground() != big.ground() {
        return Err(Error::GroundMismatch);
    }
    for (s, v) in small.lambda.values() {
        match carried_value(big, s)? {
            Some(w) if w == *v => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};
    use crate::sets::generate_ring;
    use num_traits::Zero;

    fn ground(labels: &[&str]) -> GroundSet {
        GroundSet::new(labels.iter().copied()).unwrap()
    }

    /// The running structure: ring {∅, {a}, {b,c}, Ω} on {a,b,c} with
    /// λ{a} = λ{b,c} = 1/2, λΩ = 1.
    fn split_structure() -> MeasureStructure {
        let g = ground(&["a", "b", "c"]);
        let cells = [g.subset(["a"]).unwrap(), g.subset(["b", "c"]).unwrap()];
        let masses = [rat(1, 2), rat(1, 2)];
        MeasureStructure::new(
            AdditiveSetFunction::from_cell_masses(&g, &cells, &masses).unwrap(),
        )
    }

    #[test]
    fn outer_measure_examples() {
        let ms = split_structure();
        let g = ms.ground().clone();
        assert_eq!(
            outer_measure(&ms, &g.empty()).unwrap(),
            ExtendedRational::Finite(Rational::zero())
        );
        assert_eq!(
            outer_measure(&ms, &g.subset(["b"]).unwrap()).unwrap(),
            ExtendedRational::Finite(rat(1, 2))
        );
        assert_eq!(
            outer_measure(&ms, &g.subset(["a", "b"]).unwrap()).unwrap(),
            ExtendedRational::Finite(rint(1))
        );
    }

    #[test]
    fn outer_measure_is_infinite_without_covers() {
        let g = ground(&["a", "b"]);
        let ring = generate_ring(&g, &[g.subset(["a"]).unwrap()]).unwrap();
        let ms = MeasureStructure::new(
            AdditiveSetFunction::new(ring, vec![Rational::zero(), rat(1, 2)]).unwrap(),
        );
        assert_eq!(
            outer_measure(&ms, &g.subset(["b"]).unwrap()).unwrap(),
            ExtendedRational::Infinite
        );
    }

    #[test]
    fn inner_measure_examples() {
        let ms = split_structure();
        let g = ms.ground().clone();
        assert_eq!(inner_measure(&ms, &g.full()).unwrap(), rint(1));
        assert_eq!(
            inner_measure(&ms, &g.subset(["b"]).unwrap()).unwrap(),
            Rational::zero()
        );
        assert_eq!(
            inner_measure(&ms, &g.subset(["a", "b"]).unwrap()).unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn carrier_of_split_structure_is_itself() {
        let ms = split_structure();
        let carrier = carrier_ring(&ms).unwrap();
        assert_eq!(carrier.ring().len(), 4);
        for (s, v) in ms.lambda().values() {
            assert_eq!(carrier.value(s).unwrap(), v);
        }
    }

    #[test]
    fn carrier_of_power_set_is_power_set() {
        let g = ground(&["a", "b"]);
        let ms = MeasureStructure::from_atom_masses(&g, &[rat(1, 3), rat(2, 3)]).unwrap();
        let carrier = carrier_ring(&ms).unwrap();
        assert_eq!(carrier.ring().len(), 4);
        assert_eq!(carrier.value(&g.subset(["b"]).unwrap()).unwrap(), &rat(2, 3));
    }

    #[test]
    fn null_total_mass_carries_everything() {
        let g = ground(&["a", "b"]);
        let ring = generate_ring(&g, &[g.full()]).unwrap();
        let ms = MeasureStructure::new(
            AdditiveSetFunction::new(ring, vec![Rational::zero(), Rational::zero()]).unwrap(),
        );
        let carrier = carrier_ring(&ms).unwrap();
        assert_eq!(carrier.ring().len(), 4);
        for (_, v) in carrier.lambda().values() {
            assert!(v.is_zero());
        }
    }

    #[test]
    fn extension_order_examples() {
        let ms = split_structure();
        assert!(is_extension(&ms, &ms).unwrap());

        let g = ms.ground().clone();
        let fine =
            MeasureStructure::from_atom_masses(&g, &[rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        assert!(is_extension(&ms, &fine).unwrap());

        let skew =
            MeasureStructure::from_atom_masses(&g, &[rat(1, 3), rat(1, 3), rat(1, 3)]).unwrap();
        assert!(!is_extension(&ms, &skew).unwrap());

        let other = ground(&["x", "y"]);
        let o = MeasureStructure::from_atom_masses(&other, &[rint(1), rint(0)]).unwrap();
        assert_eq!(is_extension(&ms, &o).unwrap_err(), Error::GroundMismatch);
    }

    #[test]
    fn structure_extends_into_its_carrier() {
        let ms = split_structure();
        let carrier = carrier_ring(&ms).unwrap();
        assert!(is_extension(&ms, &carrier).unwrap());
    }

    #[test]
    fn additivity_validation_rejects_non_modular_values() {
        let g = ground(&["a", "b"]);
        let ring = generate_ring(&g, &[g.subset(["a"]).unwrap(), g.subset(["b"]).unwrap()])
            .unwrap();
        // λ{a} = λ{b} = 1/2 but λΩ = 2 breaks modularity
        let bad = AdditiveSetFunction::new(
            ring.clone(),
            vec![Rational::zero(), rat(1, 2), rint(2), rat(1, 2)],
        );
        assert!(matches!(bad.unwrap_err(), Error::NotAdditive(_)));
        let neg = AdditiveSetFunction::new(
            ring,
            vec![Rational::zero(), rat(-1, 2), Rational::zero(), rat(-1, 2)],
        );
        assert!(matches!(neg.unwrap_err(), Error::NegativeValue));
    }
}
