//! Exact rational linear feasibility with complementary certificates.
//!
//! Decides `{x ≥ 0 : Ax = b}`, optionally with the normalization row
//! `Σx = 1`, by the two-phase simplex method over arbitrary-precision
//! rationals. Phase one minimizes the sum of artificial variables under
//! Bland's anti-cycling rule (smallest eligible entering index; ties in the
//! ratio test broken by the smallest basic variable), which both guarantees
//! termination and pins down the returned basic solution deterministically.
//! Phase two runs with the zero objective of a pure feasibility problem and
//! therefore accepts the phase-one point unchanged.
//!
//! When the phase-one optimum is positive, the simplex multipliers yield a
//! certificate `y` with `yᵀA ≥ 0` componentwise and `yᵀb < 0`: the two
//! branches are mutually exclusive by weak duality and each witness
//! re-verifies by direct substitution. Certificates are scaled so that their
//! first nonzero entry has absolute value one.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// The system `A·x = b`, `x ≥ 0`, with an optional `Σx = 1` row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySystem {
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    normalized: bool,
}

impl FeasibilitySystem {
    pub fn new(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Result<Self> {
        Self::build(matrix, rhs, false)
    }

    /// Same system with the additional requirement that the solution sums
    /// to one.
    pub fn normalized(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>) -> Result<Self> {
        Self::build(matrix, rhs, true)
    }

    fn build(matrix: Vec<Vec<Rational>>, rhs: Vec<Rational>, normalized: bool) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::DimensionMismatch(
                "system needs at least one row and one column".into(),
            ));
        }
        let n = matrix[0].len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch("ragged matrix".into()));
        }
        if rhs.len() != matrix.len() {
            return Err(Error::DimensionMismatch(
                "one right-hand side entry per row required".into(),
            ));
        }
        Ok(FeasibilitySystem {
            matrix,
            rhs,
            normalized,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// The system with the normalization row materialized, when flagged.
    fn effective(&self) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let mut a = self.matrix.clone();
        let mut b = self.rhs.clone();
        if self.normalized {
            a.push(vec![Rational::one(); self.cols()]);
            b.push(Rational::one());
        }
        (a, b)
    }

    /// Number of rows of the effective system, i.e. the certificate length.
    pub fn effective_rows(&self) -> usize {
        self.rows() + usize::from(self.normalized)
    }

    /// Exact re-substitution of a witness, either branch.
    pub fn verify(&self, outcome: &FeasibilityOutcome) -> bool {
        let (a, b) = self.effective();
        match outcome {
            FeasibilityOutcome::Feasible(x) => {
                x.len() == self.cols()
                    && x.iter().all(|v| !v.is_negative())
                    && a.iter().zip(&b).all(|(row, bi)| {
                        row.iter()
                            .zip(x)
                            .map(|(aij, xj)| aij * xj)
                            .sum::<Rational>()
                            == *bi
                    })
            }
            FeasibilityOutcome::Infeasible(y) => {
                if y.len() != a.len() {
                    return false;
                }
                let combo_ok = (0..self.cols()).all(|j| {
                    !y.iter()
                        .zip(&a)
                        .map(|(yi, row)| yi * &row[j])
                        .sum::<Rational>()
                        .is_negative()
                });
                let value = y.iter().zip(&b).map(|(yi, bi)| yi * bi).sum::<Rational>();
                combo_ok && value.is_negative()
            }
        }
    }
}

/// Exactly one of a representing nonnegative solution or a separating
/// certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityOutcome {
    Feasible(Vec<Rational>),
    /// `y` with `yᵀA ≥ 0` and `yᵀb < 0`, over the effective rows (the
    /// normalization row contributes the final entry when present).
    Infeasible(Vec<Rational>),
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible(_))
    }

    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityOutcome::Feasible(x) => Some(x),
            FeasibilityOutcome::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityOutcome::Feasible(_) => None,
            FeasibilityOutcome::Infeasible(y) => Some(y),
        }
    }
}

/// Outcome together with solver metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub outcome: FeasibilityOutcome,
    pub pivots: u64,
}

struct Tableau {
    /// `rows × (cols + artificials)` working matrix, kept as `B⁻¹·[A | I]`.
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    pivots: u64,
}

impl Tableau {
    fn width(&self) -> usize {
        self.rows[0].len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for j in 0..self.width() {
                let delta = &factor * &self.rows[row][j];
                self.rows[i][j] -= delta;
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[i] -= delta;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        (0..self.width())
            .map(|j| {
                let through_basis: Rational = self
                    .basis
                    .iter()
                    .zip(&self.rows)
                    .map(|(&b, row)| &cost[b] * &row[j])
                    .sum();
                &cost[j] - through_basis
            })
            .collect()
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, v)| &cost[b] * v)
            .sum()
    }

    /// Minimizes `cost` with Bland's rule until no entering column remains.
    fn run(&mut self, cost: &[Rational]) {
        loop {
            let reduced = self.reduced_costs(cost);
            let Some(entering) = reduced.iter().position(|r| r.is_negative()) else {
                return;
            };
            let mut leaving: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][entering].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][entering];
                let replace = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b
                            || (ratio == *b
                                && self.basis[i] < self.basis[leaving.unwrap()])
                    }
                };
                if replace {
                    best = Some(ratio);
                    leaving = Some(i);
                }
            }
            // phase-one objectives are bounded below by zero and the zero
            // objective of phase two never selects an entering column
            let row = leaving.expect("feasibility objective cannot be unbounded");
            self.pivot(row, entering);
        }
    }
}

/// Decides the system, returning exactly one verified branch.
pub fn solve_feasibility(sys: &FeasibilitySystem) -> SolveReport {
    let (a, b) = sys.effective();
    let d = a.len();
    let n = sys.cols();

    // orient all right-hand sides nonnegative, remembering the flips
    let mut signs = vec![1i8; d];
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(d);
    let mut rhs: Vec<Rational> = Vec::with_capacity(d);
    for i in 0..d {
        let flip = b[i].is_negative();
        signs[i] = if flip { -1 } else { 1 };
        let mut row: Vec<Rational> = a[i]
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        // artificial block
        for k in 0..d {
            row.push(if k == i {
                Rational::one()
            } else {
                Rational::zero()
            });
        }
        rows.push(row);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }

    let mut tableau = Tableau {
        rows,
        rhs,
        basis: (n..n + d).collect(),
        pivots: 0,
    };

    // phase one: drive the artificial variables to zero
    let mut phase_one_cost = vec![Rational::zero(); n + d];
    for c in phase_one_cost.iter_mut().skip(n) {
        *c = Rational::one();
    }
    tableau.run(&phase_one_cost);

    let outcome = if tableau.objective(&phase_one_cost).is_positive() {
        // infeasible: read the multipliers off the artificial reduced costs
        let reduced = tableau.reduced_costs(&phase_one_cost);
        let certificate: Vec<Rational> = (0..d)
            .map(|i| {
                let y_star = Rational::one() - &reduced[n + i];
                let w = -y_star;
                if signs[i] < 0 {
                    -w
                } else {
                    w
                }
            })
            .collect();
        FeasibilityOutcome::Infeasible(normalize_certificate(certificate))
    } else {
        // phase two: the zero objective accepts the basic point as-is
        let phase_two_cost = vec![Rational::zero(); n + d];
        tableau.run(&phase_two_cost);
        let mut x = vec![Rational::zero(); n];
        for (i, &bvar) in tableau.basis.iter().enumerate() {
            if bvar < n {
                x[bvar] = tableau.rhs[i].clone();
            }
        }
        FeasibilityOutcome::Feasible(x)
    };

    debug_assert!(sys.verify(&outcome), "simplex witness failed to re-verify");
    SolveReport {
        outcome,
        pivots: tableau.pivots,
    }
}

/// Scales so that the first nonzero entry has absolute value one.
fn normalize_certificate(mut y: Vec<Rational>) -> Vec<Rational> {
    if let Some(first) = y.iter().find(|v| !v.is_zero()) {
        let scale = first.abs();
        for v in y.iter_mut() {
            *v /= &scale;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| rint(v)).collect())
            .collect()
    }

    fn v(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&x| rint(x)).collect()
    }

    #[test]
    fn diagonal_system_splits_evenly() {
        let sys = FeasibilitySystem::new(m(&[&[2, 0], &[0, 2]]), v(&[1, 1])).unwrap();
        let report = solve_feasibility(&sys);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rat(1, 2), rat(1, 2)])
        );
        assert!(sys.verify(&report.outcome));
    }

    #[test]
    fn negative_rhs_on_a_nonnegative_row_is_certified() {
        let sys = FeasibilitySystem::new(m(&[&[2, 0], &[0, 2]]), v(&[-1, 0])).unwrap();
        let report = solve_feasibility(&sys);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Infeasible(vec![rint(1), rint(0)])
        );
        assert!(sys.verify(&report.outcome));
    }

    #[test]
    fn zero_rhs_admits_the_zero_solution() {
        let sys = FeasibilitySystem::new(m(&[&[3, -7, 2], &[1, 1, -5]]), v(&[0, 0])).unwrap();
        let report = solve_feasibility(&sys);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rint(0), rint(0), rint(0)])
        );
    }

    #[test]
    fn normalization_row_forces_probability_mass() {
        // columns (1,0) and (1,1); the midpoint evaluation is a mixture
        let sys =
            FeasibilitySystem::normalized(m(&[&[1, 1], &[0, 1]]), vec![rint(1), rat(1, 2)])
                .unwrap();
        let report = solve_feasibility(&sys);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rat(1, 2), rat(1, 2)])
        );

        // evaluation outside the segment has a separating certificate
        let sys = FeasibilitySystem::normalized(m(&[&[1, 1], &[0, 1]]), v(&[1, 2])).unwrap();
        let report = solve_feasibility(&sys);
        assert!(!report.outcome.is_feasible());
        assert!(sys.verify(&report.outcome));
    }

    #[test]
    fn certificate_first_nonzero_entry_is_unit() {
        let sys = FeasibilitySystem::new(m(&[&[0, 0], &[3, 5]]), v(&[7, -2])).unwrap();
        let report = solve_feasibility(&sys);
        let y = report.outcome.certificate().expect("infeasible");
        let first = y.iter().find(|c| !c.is_zero()).unwrap();
        assert_eq!(first.abs(), rint(1));
        assert!(sys.verify(&report.outcome));
    }

    #[test]
    fn row_scaling_does_not_change_the_branch() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=4);
            let a: Vec<Vec<Rational>> = (0..d)
                .map(|_| (0..n).map(|_| rint(rng.gen_range(-5..=5))).collect())
                .collect();
            let b: Vec<Rational> = (0..d).map(|_| rint(rng.gen_range(-5..=5))).collect();
            let sys = FeasibilitySystem::new(a.clone(), b.clone()).unwrap();
            let before = solve_feasibility(&sys).outcome.is_feasible();

            let row = rng.gen_range(0..d);
            let factor = rat(rng.gen_range(1..=7), rng.gen_range(1..=7));
            let mut a2 = a;
            for vcol in a2[row].iter_mut() {
                *vcol *= &factor;
            }
            let mut b2 = b;
            b2[row] *= &factor;
            let scaled = FeasibilitySystem::new(a2, b2).unwrap();
            assert_eq!(solve_feasibility(&scaled).outcome.is_feasible(), before);
        }
    }

    #[test]
    fn dichotomy_on_random_systems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let d = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=6);
            let a: Vec<Vec<Rational>> = (0..d)
                .map(|_| (0..n).map(|_| rint(rng.gen_range(-10..=10))).collect())
                .collect();
            let b: Vec<Rational> = (0..d).map(|_| rint(rng.gen_range(-10..=10))).collect();
            let sys = if rng.gen_bool(0.3) {
                FeasibilitySystem::normalized(a, b).unwrap()
            } else {
                FeasibilitySystem::new(a, b).unwrap()
            };
            let report = solve_feasibility(&sys);
            assert!(sys.verify(&report.outcome));
            // the opposite branch must not verify
            let flipped = match &report.outcome {
                FeasibilityOutcome::Feasible(x) => FeasibilityOutcome::Infeasible(x.clone()),
                FeasibilityOutcome::Infeasible(y) => FeasibilityOutcome::Feasible(y.clone()),
            };
            assert!(!sys.verify(&flipped));
        }
    }

    #[test]
    fn rejects_malformed_systems() {
        assert!(FeasibilitySystem::new(vec![], vec![]).is_err());
        assert!(FeasibilitySystem::new(m(&[&[1, 2], &[1]]), v(&[1, 1])).is_err());
        assert!(FeasibilitySystem::new(m(&[&[1, 2]]), v(&[1, 1])).is_err());
    }
}
