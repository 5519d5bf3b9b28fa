//! Measurability and layer-cake integration of random quantities, density
//! measures, and minimal representing structures.
//!
//! On a finite ground set the map `t ↦ {X > t}` is a step function of `t`
//! whose only jumps sit at the distinct positive values of `X`. Density of
//! the carried thresholds `{t > 0 : {X > t} ∈ A(λ)}` in `(0, ∞)` is therefore
//! equivalent to the finitely many level sets `{X ≥ v}`, one per distinct
//! positive value `v`, all being carried: between consecutive values the
//! level set is constant, so either every threshold in the gap qualifies or
//! none does, and finitely many isolated points never affect density. The
//! same reduction applies to `-X` for the negative tail. Topological
//! tightness is vacuous here since the range of `X` is finite.
//!
//! A signed quantity integrates through its two tails: both the positive and
//! negative part must have equal lower and upper layer integrals, and the
//! integral is their difference. Failures are reported as values, not
//! panics, so batch drivers can continue.

use num_traits::Zero;

use crate::error::{Error, LayerGap, Result};
use crate::measure::{
    carried_value, inner_measure, outer_measure, AdditiveSetFunction, MeasureStructure,
};
use crate::quantity::{RandomQuantity, SimpleFunction};
use crate::rational::{pow2, ExtendedRational, Rational};
use crate::sets::generate_ring;

/// The finitely many discontinuities of `t ↦ λ_*(X > t)` on `(0, ∞)`; the
/// set of continuity thresholds is their complement.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    pub discontinuities: Vec<Rational>,
}

fn check_ground(x: &RandomQuantity, ms: &MeasureStructure) -> Result<()> {
    if x.ground() != ms.ground() {
        return Err(Error::GroundMismatch);
    }
    Ok(())
}

/// Points `t > 0` where the left and right limits of `t ↦ λ_*(X > t)`
/// disagree. Only positive values attained by `X` can qualify.
pub fn jump_set(x: &RandomQuantity, ms: &MeasureStructure) -> Result<JumpReport> {
    check_ground(x, ms)?;
    let mut discontinuities = Vec::new();
    for v in x.positive_values() {
        // left limit: inner measure of {X ≥ v}; right limit: of {X > v}
        let left = inner_measure(ms, &x.at_least(&v))?;
        let right = inner_measure(ms, &x.above(&v))?;
        if left != right {
            discontinuities.push(v);
        }
    }
    Ok(JumpReport { discontinuities })
}

/// Decides measurability by checking that every level set `{X ≥ v}`, for `v`
/// a distinct positive value of `X`, is carried — and symmetrically for `-X`.
pub fn is_measurable(x: &RandomQuantity, ms: &MeasureStructure) -> Result<bool> {
    check_ground(x, ms)?;
    for part in [x.positive_part(), x.negative_part()] {
        for v in part.positive_values() {
            if carried_value(ms, &part.at_least(&v))?.is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Lower and upper layer integrals `∫₀^∞ λ_*(X > t) dt` and
/// `∫₀^∞ λ^*(X > t) dt` of a nonnegative quantity, as exact finite sums over
/// the constancy intervals of the level sets.
fn tail_integrals(
    x: &RandomQuantity,
    ms: &MeasureStructure,
) -> Result<(Rational, ExtendedRational)> {
    debug_assert!(x.is_nonnegative());
    let mut lower = Rational::zero();
    let mut upper = Rational::zero();
    let mut unbounded = false;
    let mut prev = Rational::zero();
    for v in x.positive_values() {
        let level = x.at_least(&v);
        let width = &v - &prev;
        lower += &width * inner_measure(ms, &level)?;
        match outer_measure(ms, &level)? {
            ExtendedRational::Finite(o) => upper += &width * o,
            ExtendedRational::Infinite => unbounded = true,
        }
        prev = v;
    }
    let upper = if unbounded {
        ExtendedRational::Infinite
    } else {
        ExtendedRational::Finite(upper)
    };
    Ok((lower, upper))
}

/// The layer-cake integral `∫ X dλ = ∫ X⁺ dλ − ∫ X⁻ dλ`.
///
/// Integrable exactly when, for both tails, the lower and upper layer
/// integrals agree and are finite; otherwise the offending gap is returned.
pub fn integral(x: &RandomQuantity, ms: &MeasureStructure) -> Result<Rational> {
    check_ground(x, ms)?;
    let mut signed_total = Rational::zero();
    for (sign, part) in [(1i64, x.positive_part()), (-1i64, x.negative_part())] {
        let (lower, upper) = tail_integrals(&part, ms)?;
        match upper {
            ExtendedRational::Finite(u) if u == lower => {}
            ExtendedRational::Finite(u) => {
                return Err(Error::NotIntegrable(Box::new(LayerGap {
                    lower,
                    upper: Some(u),
                })))
            }
            ExtendedRational::Infinite => {
                return Err(Error::NotIntegrable(Box::new(LayerGap {
                    lower,
                    upper: None,
                })))
            }
        }
        signed_total += Rational::from_integer(sign.into()) * lower;
    }
    Ok(signed_total)
}

/// The staircase approximant `X_n = Σ tᵢ 1{tᵢ < X ≤ tᵢ₊₁}` over a carried
/// threshold grid of mesh `2^{-(n+1)}` reaching `2^n`.
///
/// Empty bands are dropped, so the term count stays proportional to the
/// number of distinct values rather than the grid size. Requires `X ≥ 0` and
/// measurable; then every threshold is carried, `X_n ≤ X`, and
/// `|X − X_n| < 2^{-n}` wherever `X ≤ 2^{n-1}`.
pub fn staircase(x: &RandomQuantity, ms: &MeasureStructure, n: u32) -> Result<SimpleFunction> {
    check_ground(x, ms)?;
    if !x.is_nonnegative() {
        return Err(Error::NegativeQuantity);
    }
    if !is_measurable(x, ms)? {
        return Err(Error::NotMeasurable);
    }
    let mesh = pow2(-(n as i32) - 1);
    let steps: i64 = 1i64 << (2 * n + 1); // 2^n / mesh
    let mut terms = Vec::new();
    let mut level_sets = Vec::new();
    for i in 0..steps {
        let lo = Rational::from_integer(i.into()) * &mesh;
        let hi = Rational::from_integer((i + 1).into()) * &mesh;
        // band {lo < X ≤ hi} = {X > lo} \ {X > hi}
        let band = x.above(&lo).difference(&x.above(&hi))?;
        if !band.is_empty() && !lo.is_zero() {
            level_sets.push(x.above(&lo));
            level_sets.push(x.above(&hi));
            terms.push((lo, band));
        }
    }
    let ring = generate_ring(x.ground(), &level_sets)?;
    SimpleFunction::new(ring, terms)
}

/// The density structure `(R_g, λ_g)` with `λ_g(A) = ∫ 1_A · g dλ`, defined
/// on the whole carrier ring (every such product is integrable on a finite
/// ground set). Requires `g ≥ 0` and measurable.
pub fn density_measure(ms: &MeasureStructure, g: &RandomQuantity) -> Result<MeasureStructure> {
    check_ground(g, ms)?;
    if !g.is_nonnegative() {
        return Err(Error::NegativeQuantity);
    }
    if !is_measurable(g, ms)? {
        return Err(Error::NotMeasurable);
    }
    let carrier = crate::measure::carrier_ring(ms)?;
    let ring = carrier.ring().clone();
    let values = ring
        .sets()
        .iter()
        .map(|a| integral(&g.restrict(a)?, ms))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureStructure::new(AdditiveSetFunction::from_parts(
        ring, values,
    )))
}

/// The minimal structure `(R_φ, λ_φ)` representing the integrals of a family
/// of nonnegative integrable quantities: the ring generated by the level
/// sets `{h > t}` over continuity thresholds — one per constancy interval,
/// i.e. the sets `{h ≥ v}` for the distinct positive values `v` — with the
/// carried extension restricted to it.
///
/// Callers pass generators; level sets of the Stonean cone the family spans
/// add nothing, because membership patterns of the generator level sets
/// already separate atoms with distinct generator values.
pub fn minimal_structure(
    family: &[RandomQuantity],
    ms: &MeasureStructure,
) -> Result<MeasureStructure> {
    let mut level_sets = Vec::new();
    for h in family {
        check_ground(h, ms)?;
        if !h.is_nonnegative() {
            return Err(Error::NegativeQuantity);
        }
        // integrability of h is required, not just measurability
        integral(h, ms)?;
        for v in h.positive_values() {
            level_sets.push(h.at_least(&v));
        }
    }
    let ring = generate_ring(ms.ground(), &level_sets)?;
    let values = ring
        .sets()
        .iter()
        .map(|s| carried_value(ms, s)?.ok_or(Error::NotMeasurable))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasureStructure::new(AdditiveSetFunction::from_parts(
        ring, values,
    )))
}
