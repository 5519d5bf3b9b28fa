//! Decomposition of convex functions on ℝ into kink measures.
//!
//! A convex function normalized to have both one-sided derivatives zero at a
//! minimizer `x₀` satisfies `φ(v) = φ(u) + ∫ h_u^v dν`, where `ν` is the
//! measure of its slope increments and the kernel is
//! `h_u^v(x) = (v − x∨u)⁺·1{x > x₀} − (v∧x − u)⁺·1{x ≤ x₀}`.
//! For piecewise linear input the decomposition is exact: one atom per kink
//! with the slope jump as mass. For sampled input the curvature seen at each
//! interior grid node is split evenly onto the midpoints of the two adjacent
//! cells, which is the midpoint quadrature of the underlying kink measure
//! and reconstructs with second-order accuracy.
//!
//! The companion Stieltjes construction realizes the same measure on a
//! finite ground set: cells between consecutive thresholds carry the
//! increments of `F(x) = D⁺φ(x∨x₀) + D⁻φ(x∧x₀)`, and on a grid refining all
//! kinks each cell's mass sits exactly at its representative point (the
//! endpoint nearer `x₀`'s far side), so layer-cake integrals of the kernel
//! against the cell structure agree with the atom sums exactly.
//!
//! Minimizer conventions: the reported minimizer is the smallest one; when
//! the flat piece attaining the infimum is unbounded below, its smallest
//! breakpoint stands in, and a function with no breakpoints normalizes at
//! its anchor. Functions whose infimum is not attained (strictly monotone
//! with a kink, or a strictly monotone sample grid) are rejected; the
//! conventions for minimizers at infinity stay unimplemented.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{AdditiveSetFunction, MeasureStructure};
use crate::quantity::RandomQuantity;
use crate::rational::Rational;
use crate::sets::GroundSet;

/// A convex piecewise linear function: strictly increasing breakpoints,
/// nondecreasing slopes (one more than breakpoints, strict increase exactly
/// at genuine kinks — zero jumps are merged away), and an anchor fixing the
/// additive constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearConvex {
    breakpoints: Vec<Rational>,
    slopes: Vec<Rational>,
    anchor: (Rational, Rational),
}

impl PiecewiseLinearConvex {
    pub fn new(
        breakpoints: Vec<Rational>,
        slopes: Vec<Rational>,
        anchor: (Rational, Rational),
    ) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::DimensionMismatch(
                "need one slope per piece, i.e. breakpoints + 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotConvex("breakpoints must strictly increase".into()));
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotConvex("slopes must not decrease".into()));
        }
        // merge pieces across breakpoints with no slope jump
        let mut kept_bps = Vec::new();
        let mut kept_slopes = vec![slopes[0].clone()];
        for (b, s) in breakpoints.iter().zip(slopes.iter().skip(1)) {
            if s != kept_slopes.last().unwrap() {
                kept_bps.push(b.clone());
                kept_slopes.push(s.clone());
            }
        }
        Ok(PiecewiseLinearConvex {
            breakpoints: kept_bps,
            slopes: kept_slopes,
            anchor,
        })
    }

    pub fn affine(slope: Rational, anchor: (Rational, Rational)) -> Self {
        PiecewiseLinearConvex {
            breakpoints: vec![],
            slopes: vec![slope],
            anchor,
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn anchor(&self) -> &(Rational, Rational) {
        &self.anchor
    }

    /// Slope immediately right of `x`.
    pub fn right_slope(&self, x: &Rational) -> &Rational {
        let idx = self.breakpoints.iter().filter(|b| *b <= x).count();
        &self.slopes[idx]
    }

    /// Slope immediately left of `x`.
    pub fn left_slope(&self, x: &Rational) -> &Rational {
        let idx = self.breakpoints.iter().filter(|b| *b < x).count();
        &self.slopes[idx]
    }

    /// Kinks as `(location, slope jump)` pairs; jumps are strictly positive.
    pub fn kinks(&self) -> Vec<(Rational, Rational)> {
        self.breakpoints
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), &self.slopes[i + 1] - &self.slopes[i]))
            .collect()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let (x_ref, y_ref) = &self.anchor;
        let (lo, hi, sign) = if x >= x_ref {
            (x_ref.clone(), x.clone(), 1i64)
        } else {
            (x.clone(), x_ref.clone(), -1i64)
        };
        // integrate the slope over [lo, hi], cutting at interior breakpoints
        let mut total = Rational::zero();
        let mut cursor = lo;
        for (i, b) in self.breakpoints.iter().enumerate() {
            if *b <= cursor {
                continue;
            }
            if *b >= hi {
                break;
            }
            total += (b - &cursor) * &self.slopes[i];
            cursor = b.clone();
        }
        total += (&hi - &cursor) * self.right_slope(&cursor);
        y_ref + Rational::from_integer(sign.into()) * total
    }

}

/// A discretely convex function sampled on a uniform rational grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledConvex {
    start: Rational,
    step: Rational,
    values: Vec<Rational>,
}

impl SampledConvex {
    pub fn new(start: Rational, step: Rational, values: Vec<Rational>) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::NotConvex("grid step must be positive".into()));
        }
        if values.len() < 2 {
            return Err(Error::DimensionMismatch(
                "need at least two grid values".into(),
            ));
        }
        for w in values.windows(3) {
            if &w[2] - &w[1] < &w[1] - &w[0] {
                return Err(Error::NotConvex("second differences must be nonnegative".into()));
            }
        }
        Ok(SampledConvex {
            start,
            step,
            values,
        })
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    pub fn step(&self) -> &Rational {
        &self.step
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn grid_point(&self, j: usize) -> Rational {
        &self.start + Rational::from_integer((j as i64).into()) * &self.step
    }
}

/// Evaluates `h_u^v(x) = (v − x∨u)⁺·1{x > x₀} − (v∧x − u)⁺·1{x ≤ x₀}`.
pub fn kernel_eval(u: &Rational, v: &Rational, x0: &Rational, x: &Rational) -> Rational {
    if x > x0 {
        let inner = v - (if x > u { x } else { u });
        if inner.is_positive() {
            inner
        } else {
            Rational::zero()
        }
    } else {
        let inner = (if v < x { v } else { x }) - u;
        if inner.is_positive() {
            -inner
        } else {
            Rational::zero()
        }
    }
}

/// Normalizes a piecewise linear convex function at its smallest minimizer:
/// subtracts `D⁺φ(x₀)(x−x₀)` right of `x₀` and `D⁻φ(x₀)(x−x₀)` on the other
/// side, leaving both one-sided derivatives zero there.
pub fn normalize_at_min(
    phi: &PiecewiseLinearConvex,
) -> Result<(Rational, PiecewiseLinearConvex)> {
    let x0 = smallest_minimizer(phi)?;
    let normalized = normalize_at(phi, &x0);
    Ok((x0, normalized))
}

fn smallest_minimizer(phi: &PiecewiseLinearConvex) -> Result<Rational> {
    if phi.breakpoints.is_empty() {
        // affine: normalization at the anchor flattens it entirely
        return Ok(phi.anchor.0.clone());
    }
    let j = phi
        .slopes
        .iter()
        .position(|s| !s.is_negative())
        .ok_or(Error::NoMinimizer)?;
    if j == 0 {
        // the flat piece attaining the infimum is unbounded below; its
        // smallest breakpoint stands in for the nonexistent least minimizer
        if phi.slopes[0].is_positive() {
            return Err(Error::NoMinimizer);
        }
        return Ok(phi.breakpoints[0].clone());
    }
    Ok(phi.breakpoints[j - 1].clone())
}

/// Normalization at a caller-chosen minimizer: pieces left of `x₀` shed
/// `D⁻φ(x₀)`, pieces from `x₀` on shed `D⁺φ(x₀)`. When `x₀` is interior to a
/// piece both corrections coincide, so assigning that piece to the right
/// side is consistent.
fn normalize_at(phi: &PiecewiseLinearConvex, x0: &Rational) -> PiecewiseLinearConvex {
    let d_plus = phi.right_slope(x0).clone();
    let d_minus = phi.left_slope(x0).clone();
    let pivot = phi.breakpoints.iter().filter(|b| *b <= x0).count();
    let slopes: Vec<Rational> = phi
        .slopes
        .iter()
        .enumerate()
        .map(|(i, s)| if i < pivot { s - &d_minus } else { s - &d_plus })
        .collect();
    let anchor = (x0.clone(), phi.eval(x0));
    PiecewiseLinearConvex::new(phi.breakpoints.clone(), slopes, anchor)
        .expect("shifted slopes stay nondecreasing on each side")
}

/// Normalizes a sampled convex function at its smallest grid minimizer by
/// subtracting the central-difference secant there (the second-order
/// estimate of the derivative; for boundary minimizers nothing is known
/// about the far side, so nothing is subtracted).
pub fn normalize_sampled_at_min(phi: &SampledConvex) -> Result<(Rational, SampledConvex)> {
    let n = phi.values.len();
    let strictly_increasing = phi.values.windows(2).all(|w| w[0] < w[1]);
    let strictly_decreasing = phi.values.windows(2).all(|w| w[0] > w[1]);
    if strictly_increasing || strictly_decreasing {
        return Err(Error::NoMinimizer);
    }
    let min_val = phi.values.iter().min().unwrap().clone();
    let j = phi.values.iter().position(|v| *v == min_val).unwrap();
    let x0 = phi.grid_point(j);
    let secant = if j > 0 && j + 1 < n {
        (&phi.values[j + 1] - &phi.values[j - 1]) / (Rational::from_integer(2.into()) * &phi.step)
    } else {
        Rational::zero()
    };
    let values: Vec<Rational> = phi
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v - &secant * (phi.grid_point(i) - &x0))
        .collect();
    Ok((
        x0,
        SampledConvex::new(phi.start.clone(), phi.step.clone(), values)?,
    ))
}

/// Masses on uniform cells, each mass standing at its cell's midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMasses {
    pub start: Rational,
    pub step: Rational,
    pub masses: Vec<Rational>,
}

impl CellMasses {
    pub fn midpoint(&self, j: usize) -> Rational {
        &self.start
            + (Rational::from_integer((j as i64).into()) + Rational::new(1.into(), 2.into()))
                * &self.step
    }
}

/// A finite nonnegative measure on ℝ: atoms plus an optional gridded part.
#[derive(Debug, Clone, PartialEq)]
pub struct KinkMeasure {
    atoms: Vec<(Rational, Rational)>,
    density: Option<CellMasses>,
}

impl KinkMeasure {
    pub fn new(mut atoms: Vec<(Rational, Rational)>, density: Option<CellMasses>) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::DimensionMismatch("atom locations must be distinct".into()));
        }
        if atoms.iter().any(|(_, m)| !m.is_positive()) {
            return Err(Error::NegativeValue);
        }
        if let Some(cells) = &density {
            if cells.masses.iter().any(|m| m.is_negative()) {
                return Err(Error::NegativeValue);
            }
        }
        Ok(KinkMeasure { atoms, density })
    }

    pub fn zero() -> Self {
        KinkMeasure {
            atoms: vec![],
            density: None,
        }
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&CellMasses> {
        self.density.as_ref()
    }

    pub fn total_mass(&self) -> Rational {
        let atom_mass: Rational = self.atoms.iter().map(|(_, m)| m.clone()).sum();
        let cell_mass: Rational = self
            .density
            .iter()
            .flat_map(|c| c.masses.iter().cloned())
            .sum();
        atom_mass + cell_mass
    }

    /// Mass assigned to the open interval `(lo, hi)`.
    pub fn open_interval_mass(&self, lo: &Rational, hi: &Rational) -> Rational {
        let mut total: Rational = self
            .atoms
            .iter()
            .filter(|(x, _)| x > lo && x < hi)
            .map(|(_, m)| m.clone())
            .sum();
        if let Some(cells) = &self.density {
            for (j, m) in cells.masses.iter().enumerate() {
                let mid = cells.midpoint(j);
                if &mid > lo && &mid < hi {
                    total += m;
                }
            }
        }
        total
    }

    /// `∫ h_u^v dν` for this measure.
    pub fn integrate_kernel(&self, u: &Rational, v: &Rational, x0: &Rational) -> Rational {
        let mut total: Rational = self
            .atoms
            .iter()
            .map(|(x, m)| m * kernel_eval(u, v, x0, x))
            .sum();
        if let Some(cells) = &self.density {
            for (j, m) in cells.masses.iter().enumerate() {
                if !m.is_zero() {
                    total += m * kernel_eval(u, v, x0, &cells.midpoint(j));
                }
            }
        }
        total
    }
}

/// A minimizer together with the kink measure of the function normalized
/// there.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub x0: Rational,
    pub nu: KinkMeasure,
}

/// Decomposes a piecewise linear convex function, normalizing internally at
/// its smallest minimizer: one atom per kink of the normalized function,
/// with the slope jump as its mass. The normalization removes any kink at
/// `x₀` itself, so `ν` never charges the minimizer.
pub fn decompose(phi: &PiecewiseLinearConvex) -> Result<Decomposition> {
    let (x0, normalized) = normalize_at_min(phi)?;
    Ok(Decomposition {
        nu: KinkMeasure::new(normalized.kinks(), None)?,
        x0,
    })
}

/// Decomposition normalized at a caller-chosen minimizer, which must attain
/// the infimum.
pub fn decompose_at(phi: &PiecewiseLinearConvex, x0: &Rational) -> Result<Decomposition> {
    // x₀ attains the infimum iff D⁻φ(x₀) ≤ 0 ≤ D⁺φ(x₀)
    if phi.left_slope(x0).is_positive() || phi.right_slope(x0).is_negative() {
        return Err(Error::NoMinimizer);
    }
    let normalized = normalize_at(phi, x0);
    Ok(Decomposition {
        nu: KinkMeasure::new(normalized.kinks(), None)?,
        x0: x0.clone(),
    })
}

/// Decomposes a sampled convex function: the curvature `Δ²φ(x_j)/h` seen at
/// each interior grid node is split evenly onto the midpoints of the two
/// adjacent cells. Midpoints never coincide with grid nodes, so the measure
/// cannot charge the minimizer.
pub fn decompose_sampled(phi: &SampledConvex) -> Result<Decomposition> {
    let (x0, normalized) = normalize_sampled_at_min(phi)?;
    let n = normalized.values.len();
    let step = normalized.step.clone();
    // node curvature masses; boundary nodes are unobservable and carry zero
    let mut node_mass = vec![Rational::zero(); n];
    for (j, window) in normalized.values.windows(3).enumerate() {
        let second =
            &window[2] - Rational::from_integer(2.into()) * &window[1] + &window[0];
        node_mass[j + 1] = second / &step;
    }
    let masses: Vec<Rational> = (0..n - 1)
        .map(|j| (&node_mass[j] + &node_mass[j + 1]) / Rational::from_integer(2.into()))
        .collect();
    Ok(Decomposition {
        x0,
        nu: KinkMeasure::new(
            vec![],
            Some(CellMasses {
                start: normalized.start.clone(),
                step,
                masses,
            }),
        )?,
    })
}

/// Evaluates `φ(v) = φ(u) + ∫ h_u^v dν`; for `v < u` the identity is applied
/// in reverse.
pub fn reconstruct(
    x0: &Rational,
    nu: &KinkMeasure,
    u: &Rational,
    phi_u: &Rational,
    v: &Rational,
) -> Rational {
    if v >= u {
        phi_u + nu.integrate_kernel(u, v, x0)
    } else {
        phi_u - nu.integrate_kernel(v, u, x0)
    }
}

/// A cell of the Stieltjes structure: the half-open interval `(lo, hi]` with
/// the representative point where its mass concentrates on a kink-refining
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StieltjesCell {
    pub lo: Rational,
    pub hi: Rational,
    pub representative: Rational,
}

/// The measure `λ₀` on the ring generated by the threshold cells, realizing
/// the slope-increment measure of a normalized convex function on a finite
/// ground set with the identity as the underlying quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct StieltjesMeasure {
    pub x0: Rational,
    pub cells: Vec<StieltjesCell>,
    pub structure: MeasureStructure,
}

impl StieltjesMeasure {
    /// The kernel `h_u^v` sampled at the cell representatives, ready for
    /// layer-cake integration against the structure.
    pub fn kernel_quantity(&self, u: &Rational, v: &Rational) -> RandomQuantity {
        let values = self
            .cells
            .iter()
            .map(|c| kernel_eval(u, v, &self.x0, &c.representative))
            .collect();
        RandomQuantity::new(self.structure.ground().clone(), values)
            .expect("one value per cell atom")
    }

    /// `λ₀((u, v])` for thresholds `u ≤ v`; errors when the interval does
    /// not align with cell boundaries.
    pub fn interval_mass(&self, u: &Rational, v: &Rational) -> Result<Rational> {
        let idx: Vec<usize> = self
            .cells
            .iter()
            .enumerate()
            .filter(|(_, c)| &c.lo >= u && &c.hi <= v)
            .map(|(i, _)| i)
            .collect();
        let covered: Rational = idx
            .iter()
            .map(|&i| &self.cells[i].hi - &self.cells[i].lo)
            .sum();
        if covered != v - u {
            return Err(Error::UnbracketedBreakpoints);
        }
        let subset = self.structure.ground().subset_of_indices(idx);
        self.structure.value(&subset).cloned()
    }
}

/// Builds the Stieltjes structure of a piecewise linear convex function over
/// a threshold grid: cells between consecutive thresholds (the minimizer is
/// inserted as a threshold) with masses `F(hi) − F(lo)`,
/// `F(x) = D⁺φ(x∨x₀) + D⁻φ(x∧x₀)`. Thresholds must strictly bracket every
/// kink. Representatives sit at the endpoint that carries the cell's mass
/// when the grid refines all kinks: the right endpoint right of `x₀`, the
/// left endpoint left of it.
pub fn stieltjes_lambda(
    phi: &PiecewiseLinearConvex,
    thresholds: &[Rational],
) -> Result<StieltjesMeasure> {
    let (x0, normalized) = normalize_at_min(phi)?;
    let mut grid: Vec<Rational> = thresholds.to_vec();
    grid.push(x0.clone());
    grid.sort();
    grid.dedup();
    if grid.len() < 2 {
        return Err(Error::UnbracketedBreakpoints);
    }
    let (lo, hi) = (&grid[0], &grid[grid.len() - 1]);
    for (b, _) in normalized.kinks() {
        if &b <= lo || &b >= hi {
            return Err(Error::UnbracketedBreakpoints);
        }
    }
    let f = |x: &Rational| -> Rational {
        let up = if x > &x0 { x } else { &x0 };
        let down = if x < &x0 { x } else { &x0 };
        normalized.right_slope(up) + normalized.left_slope(down)
    };
    let mut cells = Vec::new();
    let mut masses = Vec::new();
    for w in grid.windows(2) {
        let (cl, ch) = (&w[0], &w[1]);
        let representative = if cl >= &x0 { ch.clone() } else { cl.clone() };
        cells.push(StieltjesCell {
            lo: cl.clone(),
            hi: ch.clone(),
            representative,
        });
        masses.push(f(ch) - f(cl));
    }
    let ground = GroundSet::new(cells.iter().map(|c| format!("({},{}]", c.lo, c.hi)))?;
    let cell_subsets: Vec<_> = (0..cells.len()).map(|i| ground.singleton(i)).collect();
    let lambda = AdditiveSetFunction::from_cell_masses(&ground, &cell_subsets, &masses)?;
    Ok(StieltjesMeasure {
        x0,
        cells,
        structure: MeasureStructure::new(lambda),
    })
}
