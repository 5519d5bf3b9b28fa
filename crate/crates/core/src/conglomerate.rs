//! Decision procedures for the representation of linear functionals:
//! conglomerability, probability barycentres, companions with and without a
//! null ideal, disintegration into a prior mixture, takeout kernels, and
//! directedness.
//!
//! A functional `φ` given by its values on a finite basis `h₁…h_d`, together
//! with the evaluations `(Th_i)(ω)` on a finite column set, is conglomerative
//! exactly when `φ` lies in the conical hull of the evaluation columns. With
//! finitely many columns that hull is polyhedral and hence closed, so no
//! closure operation is needed and membership is a pure Farkas alternative:
//! either a nonnegative representing vector or a combination `h = Σ aᵢhᵢ`
//! with `φ(h) < 0` and `(Th)(ω) ≥ 0` everywhere. Nonlinear generator
//! families are admitted by reading an instance as the linear lifting of
//! its evaluations, so nothing here assumes the basis spans a lattice.
//!
//! Directedness of `T` — every `|Th|` dominated by some `Th'` pointwise — is
//! decided by a second feasibility problem: it holds iff some combination
//! `a` attains `Σ aᵢ(Thᵢ)(ω) ≥ 1` on every column where `T` is nonzero.
//! If such an `a` exists, any `|Th|` is dominated by the witness scaled by
//! `max_ω |Th(ω)|`, which stays in the span; conversely a directed `T`
//! dominates some combination that is nonzero on the whole support, and
//! scaling by the inverse of its minimum gives the witness. A brute-force
//! grid oracle in the tests guards this reduction.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::integrate::{integral, minimal_structure};
use crate::lp::{solve_feasibility, FeasibilityOutcome, FeasibilitySystem, SolveReport};
use crate::measure::{AdditiveSetFunction, MeasureStructure};
use crate::quantity::{PointMap, RandomQuantity};
use crate::rational::Rational;
use crate::sets::{GroundSet, SetRing, Subset};

/// A finite basis `h₁…h_d`, the evaluation matrix `T[i][ω] = (Th_i)(ω)`
/// over the columns `ω`, and the target values `φ(h_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConglomerabilityInstance {
    basis_labels: Vec<String>,
    omega: GroundSet,
    t: Vec<Vec<Rational>>,
    phi: Vec<Rational>,
}

impl ConglomerabilityInstance {
    pub fn new(
        basis_labels: Vec<String>,
        omega: GroundSet,
        t: Vec<Vec<Rational>>,
        phi: Vec<Rational>,
    ) -> Result<Self> {
        let d = basis_labels.len();
        if d == 0 {
            return Err(Error::DimensionMismatch("empty basis".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &basis_labels {
            if !seen.insert(l) {
                return Err(Error::DuplicateAtom(l.clone()));
            }
        }
        if t.len() != d || phi.len() != d {
            return Err(Error::DimensionMismatch(
                "one matrix row and one target per basis element required".into(),
            ));
        }
        if t.iter().any(|row| row.len() != omega.len()) {
            return Err(Error::DimensionMismatch(
                "one matrix column per atom required".into(),
            ));
        }
        Ok(ConglomerabilityInstance {
            basis_labels,
            omega,
            t,
            phi,
        })
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn omega(&self) -> &GroundSet {
        &self.omega
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.t
    }

    pub fn phi(&self) -> &[Rational] {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn system(&self, normalized: bool) -> FeasibilitySystem {
        let sys = if normalized {
            FeasibilitySystem::normalized(self.t.clone(), self.phi.clone())
        } else {
            FeasibilitySystem::new(self.t.clone(), self.phi.clone())
        };
        sys.expect("instance dimensions validated at construction")
    }

    /// `Σ aᵢ φ(hᵢ)` for a combination over the basis.
    pub fn apply_phi(&self, a: &[Rational]) -> Rational {
        a.iter().zip(&self.phi).map(|(ai, pi)| ai * pi).sum()
    }

    /// Pointwise values of `T(Σ aᵢ hᵢ)` over the columns.
    pub fn apply_t(&self, a: &[Rational]) -> Vec<Rational> {
        (0..self.omega.len())
            .map(|w| a.iter().zip(&self.t).map(|(ai, row)| ai * &row[w]).sum())
            .collect()
    }
}

/// Farkas alternative for `φ ∈ cone{columns of T}`: a representing `μ ≥ 0`
/// with `Σ_ω μ(ω) T[i][ω] = φ(hᵢ)`, or a certificate `a` whose combination
/// `h = Σ aᵢhᵢ` has `φ(h) < 0` yet `(Th)(ω) ≥ 0` for every column.
pub fn check_conglomerability(inst: &ConglomerabilityInstance) -> SolveReport {
    solve_feasibility(&inst.system(false))
}

/// Same alternative with `‖μ‖ = 1` required: membership of `φ` in the convex
/// hull of the columns. Infeasible instances yield `a` (over the basis, with
/// the normalization multiplier dropped) violating the minorant inequality:
/// `Σ aᵢφ(hᵢ) < min_ω Σ aᵢ(Thᵢ)(ω)`.
pub fn probability_representation(inst: &ConglomerabilityInstance) -> SolveReport {
    solve_feasibility(&inst.system(true))
}

/// Checks the minorant violation witnessed by the basis part of a
/// probability certificate.
pub fn violates_minorant(inst: &ConglomerabilityInstance, a: &[Rational]) -> bool {
    if a.len() != inst.dim() {
        return false;
    }
    let lhs = inst.apply_phi(a);
    inst.apply_t(a).iter().min().is_some_and(|min| lhs < *min)
}

/// Whether `T` is directed, together with the witnessing combination when it
/// is: `a` with `Σ aᵢ(Thᵢ)(ω) ≥ 1` on the support columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectednessReport {
    pub directed: bool,
    pub witness: Option<Vec<Rational>>,
}

pub fn is_directed(inst: &ConglomerabilityInstance) -> DirectednessReport {
    let d = inst.dim();
    let support: Vec<usize> = (0..inst.omega.len())
        .filter(|&w| inst.t.iter().any(|row| !row[w].is_zero()))
        .collect();
    if support.is_empty() {
        // T vanishes: every |Th| = 0 is dominated by Th' = 0
        return DirectednessReport {
            directed: true,
            witness: Some(vec![Rational::zero(); d]),
        };
    }
    // free coefficients split into positive and negative parts, one surplus
    // variable per support column: Σ (pᵢ−mᵢ) T[i][ω] − s_ω = 1
    let cols = 2 * d + support.len();
    let mut matrix = Vec::with_capacity(support.len());
    for (k, &w) in support.iter().enumerate() {
        let mut row = vec![Rational::zero(); cols];
        for i in 0..d {
            row[i] = inst.t[i][w].clone();
            row[d + i] = -&inst.t[i][w];
        }
        row[2 * d + k] = -Rational::one();
        matrix.push(row);
    }
    let rhs = vec![Rational::one(); support.len()];
    let sys = FeasibilitySystem::new(matrix, rhs).expect("nonempty by construction");
    match solve_feasibility(&sys).outcome {
        FeasibilityOutcome::Feasible(x) => {
            let witness: Vec<Rational> = (0..d).map(|i| &x[i] - &x[d + i]).collect();
            DirectednessReport {
                directed: true,
                witness: Some(witness),
            }
        }
        FeasibilityOutcome::Infeasible(_) => DirectednessReport {
            directed: false,
            witness: None,
        },
    }
}

/// An ideal of subsets given by generators; on a finite ground set
/// membership reduces to inclusion in the union of the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealOfSets {
    ground: GroundSet,
    generators: Vec<Subset>,
    union: Subset,
}

impl IdealOfSets {
    pub fn new(ground: GroundSet, generators: Vec<Subset>) -> Result<Self> {
        let mut union = ground.empty();
        for g in &generators {
            union = union.union(g)?;
        }
        Ok(IdealOfSets {
            ground,
            generators,
            union,
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn generators(&self) -> &[Subset] {
        &self.generators
    }

    pub fn union(&self) -> &Subset {
        &self.union
    }

    pub fn contains(&self, s: &Subset) -> Result<bool> {
        s.is_subset_of(&self.union)
    }
}

/// A companion verdict: the lifted instance, the solver report, and on the
/// feasible branch the representing measure restricted to the minimal ring
/// generated by the level sets of the transported basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionSolution {
    pub instance: ConglomerabilityInstance,
    pub report: SolveReport,
    pub minimal: Option<MeasureStructure>,
}

fn companion_instance(
    m: &MeasureStructure,
    x: &PointMap,
    family: &[RandomQuantity],
    x_prime: &PointMap,
) -> Result<ConglomerabilityInstance> {
    if x.domain() != m.ground() || x.codomain() != x_prime.codomain() {
        return Err(Error::GroundMismatch);
    }
    if family.is_empty() {
        return Err(Error::DimensionMismatch("empty family".into()));
    }
    let mut phi = Vec::with_capacity(family.len());
    let mut t = Vec::with_capacity(family.len());
    for h in family {
        if h.ground() != x.codomain() {
            return Err(Error::GroundMismatch);
        }
        phi.push(integral(&h.compose(x)?, m)?);
        t.push(h.compose(x_prime)?.values().to_vec());
    }
    let labels = (1..=family.len()).map(|i| format!("h{i}")).collect();
    ConglomerabilityInstance::new(labels, x_prime.domain().clone(), t, phi)
}

/// The minimal representing structure for the transported family under the
/// pointwise measure found by the solver.
fn minimal_restriction(
    family: &[RandomQuantity],
    x_prime: &PointMap,
    mu: &[Rational],
) -> Result<MeasureStructure> {
    let ground = x_prime.domain().clone();
    let full = MeasureStructure::from_atom_masses(&ground, mu)?;
    let mut parts = Vec::new();
    for h in family {
        let hx = h.compose(x_prime)?;
        parts.push(hx.positive_part());
        parts.push(hx.negative_part());
    }
    minimal_structure(&parts, &full)
}

/// Finds `(X', μ)` reproducing every `∫ hᵢ(X) dm` as `Σ_ω' μ(ω') hᵢ(X'(ω'))`,
/// or certifies that none exists.
pub fn solve_companion(
    m: &MeasureStructure,
    x: &PointMap,
    family: &[RandomQuantity],
    x_prime: &PointMap,
) -> Result<CompanionSolution> {
    let instance = companion_instance(m, x, family, x_prime)?;
    let report = check_conglomerability(&instance);
    let minimal = match &report.outcome {
        FeasibilityOutcome::Feasible(mu) => Some(minimal_restriction(family, x_prime, mu)?),
        FeasibilityOutcome::Infeasible(_) => None,
    };
    Ok(CompanionSolution {
        instance,
        report,
        minimal,
    })
}

/// Companion solving with every column inside the ideal forced to carry zero
/// mass: the columns in the union of `neg` are deleted before solving and
/// the solution is re-inflated with zeros.
pub fn solve_companion_with_nulls(
    m: &MeasureStructure,
    x: &PointMap,
    family: &[RandomQuantity],
    x_prime: &PointMap,
    neg: &IdealOfSets,
) -> Result<CompanionSolution> {
    if neg.ground() != x_prime.domain() {
        return Err(Error::GroundMismatch);
    }
    let instance = companion_instance(m, x, family, x_prime)?;
    let keep: Vec<usize> = (0..instance.omega.len())
        .filter(|&w| !neg.union().contains_index(w))
        .collect();
    if keep.is_empty() {
        // every column is null: only the zero functional is representable
        let zero = vec![Rational::zero(); instance.omega.len()];
        let outcome = if instance.phi.iter().all(|p| p.is_zero()) {
            FeasibilityOutcome::Feasible(zero)
        } else {
            // certificate: minus the first basis element with nonzero target
            let k = instance.phi.iter().position(|p| !p.is_zero()).unwrap();
            let mut cert = vec![Rational::zero(); instance.dim()];
            cert[k] = if instance.phi[k].is_positive() {
                -Rational::one()
            } else {
                Rational::one()
            };
            FeasibilityOutcome::Infeasible(cert)
        };
        let report = SolveReport { outcome, pivots: 0 };
        let minimal = match &report.outcome {
            FeasibilityOutcome::Feasible(mu) => {
                Some(minimal_restriction(family, x_prime, mu)?)
            }
            _ => None,
        };
        return Ok(CompanionSolution {
            instance,
            report,
            minimal,
        });
    }
    let reduced: Vec<Vec<Rational>> = instance
        .t
        .iter()
        .map(|row| keep.iter().map(|&w| row[w].clone()).collect())
        .collect();
    let sys = FeasibilitySystem::new(reduced, instance.phi.clone())?;
    let reduced_report = solve_feasibility(&sys);
    let report = SolveReport {
        outcome: match reduced_report.outcome {
            FeasibilityOutcome::Feasible(xs) => {
                let mut mu = vec![Rational::zero(); instance.omega.len()];
                for (k, &w) in keep.iter().enumerate() {
                    mu[w] = xs[k].clone();
                }
                FeasibilityOutcome::Feasible(mu)
            }
            infeasible => infeasible,
        },
        pivots: reduced_report.pivots,
    };
    let minimal = match &report.outcome {
        FeasibilityOutcome::Feasible(mu) => Some(minimal_restriction(family, x_prime, mu)?),
        FeasibilityOutcome::Infeasible(_) => None,
    };
    Ok(CompanionSolution {
        instance,
        report,
        minimal,
    })
}

/// A marginal probability on an algebra together with a parametric family of
/// probabilities on the same algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct DisintegrationInstance {
    algebra: SetRing,
    m: AdditiveSetFunction,
    thetas: Vec<String>,
    q: Vec<AdditiveSetFunction>,
}

impl DisintegrationInstance {
    pub fn new(
        m: AdditiveSetFunction,
        thetas: Vec<String>,
        q: Vec<AdditiveSetFunction>,
    ) -> Result<Self> {
        let algebra = m.ring().clone();
        if thetas.is_empty() || q.len() != thetas.len() {
            return Err(Error::DimensionMismatch(
                "one kernel per parameter required".into(),
            ));
        }
        let full = algebra.ground().full();
        if !algebra.contains(&full) {
            return Err(Error::NotAProbability);
        }
        if m.value(&full)? != &Rational::one() {
            return Err(Error::NotAProbability);
        }
        for qt in &q {
            if qt.ring() != &algebra {
                return Err(Error::GroundMismatch);
            }
            if qt.value(&full)? != &Rational::one() {
                return Err(Error::NotAProbability);
            }
        }
        Ok(DisintegrationInstance {
            algebra,
            m,
            thetas,
            q,
        })
    }

    pub fn algebra(&self) -> &SetRing {
        &self.algebra
    }

    pub fn marginal(&self) -> &AdditiveSetFunction {
        &self.m
    }

    pub fn thetas(&self) -> &[String] {
        &self.thetas
    }

    pub fn kernels(&self) -> &[AdditiveSetFunction] {
        &self.q
    }

    /// One row per algebra member: `Σ_θ λ(θ) Q_θ(A) = m(A)`, with `Σλ = 1`.
    pub fn system(&self) -> FeasibilitySystem {
        let matrix: Vec<Vec<Rational>> = self
            .algebra
            .sets()
            .iter()
            .map(|a| {
                self.q
                    .iter()
                    .map(|qt| qt.value(a).expect("same algebra").clone())
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = self
            .algebra
            .sets()
            .iter()
            .map(|a| self.m.value(a).expect("own algebra").clone())
            .collect();
        FeasibilitySystem::normalized(matrix, rhs).expect("validated dimensions")
    }
}

/// A prior `λ ≥ 0`, `Σλ = 1`, with `m(A) = Σ_θ λ(θ) Q_θ(A)` on the whole
/// algebra — or a separating certificate over the algebra members.
pub fn disintegrate(inst: &DisintegrationInstance) -> SolveReport {
    solve_feasibility(&inst.system())
}

/// Exhaustive check of the takeout identity
/// `K(A ∩ {X ∈ E}; s) = K(A; s)·1_E(s)` over all ring members `A`, all
/// `E ⊆ S` and all `s ∈ S`.
///
/// `K(·, s)` must be a nonnegative additive set function on the ring for
/// each `s`; when `A ∩ {X ∈ E}` falls outside the ring the identity is
/// evaluated through the carried extension, and fails if the set is not
/// carried.
pub fn verify_takeout<K>(kernel: K, ring: &SetRing, x: &PointMap) -> Result<bool>
where
    K: Fn(&Subset, usize) -> Rational,
{
    if x.domain() != ring.ground() {
        return Err(Error::GroundMismatch);
    }
    let s_count = x.codomain().len();
    if s_count > 16 {
        return Err(Error::GroundTooLarge {
            max: 16,
            got: s_count,
        });
    }
    // validate additivity of every section by constructing it as a measure
    let mut sections = Vec::with_capacity(s_count);
    for s in 0..s_count {
        let values: Vec<Rational> = ring.sets().iter().map(|a| kernel(a, s)).collect();
        let section = AdditiveSetFunction::new(ring.clone(), values)
            .map_err(|e| match e {
                Error::NegativeValue => Error::NegativeValue,
                other => Error::NotAdditive(format!("section s = {s}: {other}")),
            })?;
        sections.push(MeasureStructure::new(section));
    }
    for a in ring.sets() {
        for e_bits in 0u128..(1u128 << s_count) {
            let e = x
                .codomain()
                .subset_of_indices((0..s_count).filter(|&i| e_bits >> i & 1 == 1));
            let trace = a.intersection(&x.preimage(&e)?)?;
            for (s, section) in sections.iter().enumerate() {
                let lhs = if ring.contains(&trace) {
                    kernel(&trace, s)
                } else {
                    match crate::measure::carried_value(section, &trace)? {
                        Some(v) => v,
                        None => return Ok(false),
                    }
                };
                let rhs = if e.contains_index(s) {
                    kernel(a, s)
                } else {
                    Rational::zero()
                };
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rint};

    fn ground(labels: &[&str]) -> GroundSet {
        GroundSet::new(labels.iter().copied()).unwrap()
    }

    fn instance(t: &[&[i64]], phi: &[i64]) -> ConglomerabilityInstance {
        let omega = GroundSet::new((0..t[0].len()).map(|i| format!("w{i}"))).unwrap();
        ConglomerabilityInstance::new(
            (1..=t.len()).map(|i| format!("h{i}")).collect(),
            omega,
            t.iter()
                .map(|row| row.iter().map(|&v| rint(v)).collect())
                .collect(),
            phi.iter().map(|&v| rint(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_functional_is_conglomerative() {
        let inst = instance(&[&[3, -2], &[1, 1]], &[0, 0]);
        let report = check_conglomerability(&inst);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rint(0), rint(0)])
        );
    }

    #[test]
    fn single_row_with_mixed_signs_represents_positives() {
        let inst = instance(&[&[1, -1]], &[5]);
        let report = check_conglomerability(&inst);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rint(5), rint(0)])
        );
    }

    #[test]
    fn negative_target_on_nonnegative_row_is_certified() {
        let inst = instance(&[&[1, 2]], &[-1]);
        let report = check_conglomerability(&inst);
        let cert = report.outcome.certificate().expect("infeasible").to_vec();
        assert_eq!(cert, vec![rint(1)]);
        // the combination h = Σ aᵢhᵢ violates conglomerability directly
        assert!(inst.apply_phi(&cert).is_negative());
        assert!(inst.apply_t(&cert).iter().all(|v| !v.is_negative()));
    }

    #[test]
    fn barycentre_inside_the_segment() {
        // evaluations of {1, x} at V = {0, 1}; target evaluates the midpoint
        let omega = ground(&["v0", "v1"]);
        let inst = ConglomerabilityInstance::new(
            vec!["one".into(), "x".into()],
            omega,
            vec![vec![rint(1), rint(1)], vec![rint(0), rint(1)]],
            vec![rint(1), rat(1, 2)],
        )
        .unwrap();
        let report = probability_representation(&inst);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rat(1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn evaluation_outside_the_segment_violates_the_minorant() {
        let omega = ground(&["v0", "v1"]);
        let inst = ConglomerabilityInstance::new(
            vec!["one".into(), "x".into()],
            omega,
            vec![vec![rint(1), rint(1)], vec![rint(0), rint(1)]],
            vec![rint(1), rint(2)],
        )
        .unwrap();
        let report = probability_representation(&inst);
        let cert = report.outcome.certificate().expect("infeasible");
        // basis part of the certificate violates φ(h) ≥ min_ω (Th)(ω)
        assert!(violates_minorant(&inst, &cert[..inst.dim()]));
    }

    #[test]
    fn point_mass_represents_a_single_column() {
        let omega = ground(&["v0"]);
        let inst = ConglomerabilityInstance::new(
            vec!["h1".into(), "h2".into()],
            omega,
            vec![vec![rat(2, 3)], vec![rat(-1, 5)]],
            vec![rat(2, 3), rat(-1, 5)],
        )
        .unwrap();
        let report = probability_representation(&inst);
        assert_eq!(report.outcome, FeasibilityOutcome::Feasible(vec![rint(1)]));
    }

    #[test]
    fn directedness_examples() {
        let lone = instance(&[&[1, -1]], &[0]);
        let r = is_directed(&lone);
        assert!(!r.directed);

        let pair = instance(&[&[1, -1], &[1, 1]], &[0, 0]);
        let r = is_directed(&pair);
        assert!(r.directed);
        let a = r.witness.unwrap();
        let th = pair.apply_t(&a);
        assert!(th.iter().all(|v| v >= &rint(1)));

        let zero = instance(&[&[0, 0], &[0, 0]], &[0, 0]);
        let r = is_directed(&zero);
        assert!(r.directed);
        assert_eq!(r.witness.unwrap(), vec![rint(0), rint(0)]);
    }

    #[test]
    fn directedness_agrees_with_grid_brute_force() {
        use rand::{Rng, SeedableRng};
        // entries in {-1,0,1} keep every basic witness inside the grid
        // {-3..3}/{1,2}, so the LP reduction and the grid search must agree
        let grid: Vec<Rational> = (-6..=6).map(|k| rat(k, 2)).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..300 {
            let d = rng.gen_range(1..=2);
            let w = rng.gen_range(1..=3);
            let t: Vec<Vec<Rational>> = (0..d)
                .map(|_| (0..w).map(|_| rint(rng.gen_range(-1..=1))).collect())
                .collect();
            let inst = ConglomerabilityInstance::new(
                (1..=d).map(|i| format!("h{i}")).collect(),
                GroundSet::new((0..w).map(|i| format!("w{i}"))).unwrap(),
                t,
                vec![Rational::zero(); d],
            )
            .unwrap();
            let support: Vec<usize> = (0..w)
                .filter(|&c| inst.matrix().iter().any(|row| !row[c].is_zero()))
                .collect();
            let mut grid_directed = support.is_empty();
            if !grid_directed {
                let mut combos: Vec<Vec<Rational>> = vec![vec![]];
                for _ in 0..d {
                    combos = combos
                        .into_iter()
                        .flat_map(|c| {
                            grid.iter().map(move |g| {
                                let mut c2 = c.clone();
                                c2.push(g.clone());
                                c2
                            })
                        })
                        .collect();
                }
                grid_directed = combos.iter().any(|a| {
                    support
                        .iter()
                        .all(|&cidx| inst.apply_t(a)[cidx] >= rint(1))
                });
            }
            assert_eq!(is_directed(&inst).directed, grid_directed);
        }
    }

    fn two_point_uniform() -> (MeasureStructure, PointMap, Vec<RandomQuantity>, PointMap) {
        let omega = ground(&["o1", "o2"]);
        let s = ground(&["s1", "s2"]);
        let m = MeasureStructure::from_atom_masses(&omega, &[rat(1, 2), rat(1, 2)]).unwrap();
        let x = PointMap::from_labels(
            omega.clone(),
            s.clone(),
            &[("o1", "s1"), ("o2", "s2")],
        )
        .unwrap();
        let family = vec![
            RandomQuantity::indicator(&s.subset(["s1"]).unwrap()),
            RandomQuantity::indicator(&s.subset(["s2"]).unwrap()),
        ];
        let omega_prime = ground(&["p1", "p2", "p3"]);
        let x_prime = PointMap::from_labels(
            omega_prime,
            s,
            &[("p1", "s1"), ("p2", "s2"), ("p3", "s2")],
        )
        .unwrap();
        (m, x, family, x_prime)
    }

    #[test]
    fn companion_reproduces_every_basis_integral() {
        let (m, x, family, x_prime) = two_point_uniform();
        let sol = solve_companion(&m, &x, &family, &x_prime).unwrap();
        let mu = sol.report.outcome.solution().expect("feasible").to_vec();
        for (i, h) in family.iter().enumerate() {
            let lhs = integral(&h.compose(&x).unwrap(), &m).unwrap();
            let hx: Vec<Rational> = h.compose(&x_prime).unwrap().values().to_vec();
            let rhs: Rational = mu.iter().zip(&hx).map(|(a, b)| a * b).sum();
            assert_eq!(lhs, rhs, "basis element {i}");
        }
        // minimal ring {∅, {p1}, {p2,p3}, Ω'} carries the unique masses
        let minimal = sol.minimal.unwrap();
        assert_eq!(minimal.ring().len(), 4);
        let g = x_prime_ground(&sol.instance);
        assert_eq!(minimal.value(&g.subset(["p1"]).unwrap()).unwrap(), &rat(1, 2));
        assert_eq!(
            minimal.value(&g.subset(["p2", "p3"]).unwrap()).unwrap(),
            &rat(1, 2)
        );
    }

    fn x_prime_ground(inst: &ConglomerabilityInstance) -> GroundSet {
        inst.omega().clone()
    }

    #[test]
    fn identity_companion_restates_the_marginal() {
        let omega = ground(&["o1", "o2"]);
        let s = ground(&["s1", "s2"]);
        let m = MeasureStructure::from_atom_masses(&omega, &[rat(1, 3), rat(2, 3)]).unwrap();
        let x = PointMap::from_labels(omega.clone(), s.clone(), &[("o1", "s1"), ("o2", "s2")])
            .unwrap();
        let family = vec![
            RandomQuantity::indicator(&s.subset(["s1"]).unwrap()),
            RandomQuantity::indicator(&s.subset(["s2"]).unwrap()),
        ];
        let sol = solve_companion(&m, &x, &family, &x.clone()).unwrap();
        assert_eq!(
            sol.report.outcome,
            FeasibilityOutcome::Feasible(vec![rat(1, 3), rat(2, 3)])
        );
    }

    #[test]
    fn constant_target_cannot_host_charged_values() {
        let omega = ground(&["o1", "o2"]);
        let s = ground(&["s1", "s2"]);
        let m = MeasureStructure::from_atom_masses(&omega, &[rat(1, 2), rat(1, 2)]).unwrap();
        let x = PointMap::from_labels(omega.clone(), s.clone(), &[("o1", "s1"), ("o2", "s2")])
            .unwrap();
        // X' collapses to s2, but the indicator of s1 carries mass under m
        let omega_prime = ground(&["p1"]);
        let x_prime =
            PointMap::from_labels(omega_prime, s.clone(), &[("p1", "s2")]).unwrap();
        let family = vec![RandomQuantity::indicator(&s.subset(["s1"]).unwrap())];
        let sol = solve_companion(&m, &x, &family, &x_prime).unwrap();
        let cert = sol.report.outcome.certificate().expect("infeasible");
        assert_eq!(cert, &[rint(-1)]);
        assert!(sol.instance.apply_phi(cert).is_negative());
        assert!(sol.instance.apply_t(cert).iter().all(|v| !v.is_negative()));
    }

    #[test]
    fn null_ideal_deletes_columns() {
        let (m, x, family, x_prime) = two_point_uniform();
        let op = x_prime.domain().clone();
        let neg = IdealOfSets::new(op.clone(), vec![op.subset(["p3"]).unwrap()]).unwrap();
        let sol = solve_companion_with_nulls(&m, &x, &family, &x_prime, &neg).unwrap();
        assert_eq!(
            sol.report.outcome,
            FeasibilityOutcome::Feasible(vec![rat(1, 2), rat(1, 2), rint(0)])
        );
    }

    #[test]
    fn null_ideal_swallowing_needed_mass_is_infeasible() {
        let (m, x, family, x_prime) = two_point_uniform();
        let op = x_prime.domain().clone();
        let neg = IdealOfSets::new(op.clone(), vec![op.subset(["p2", "p3"]).unwrap()]).unwrap();
        let sol = solve_companion_with_nulls(&m, &x, &family, &x_prime, &neg).unwrap();
        assert!(!sol.report.outcome.is_feasible());
    }

    #[test]
    fn empty_ideal_recovers_plain_companions() {
        let (m, x, family, x_prime) = two_point_uniform();
        let op = x_prime.domain().clone();
        let neg = IdealOfSets::new(op, vec![]).unwrap();
        let with = solve_companion_with_nulls(&m, &x, &family, &x_prime, &neg).unwrap();
        let without = solve_companion(&m, &x, &family, &x_prime).unwrap();
        assert_eq!(with.report.outcome, without.report.outcome);
    }

    fn delta_disintegration() -> DisintegrationInstance {
        let g = ground(&["w1", "w2"]);
        let m = MeasureStructure::from_atom_masses(&g, &[rat(1, 2), rat(1, 2)]).unwrap();
        let q1 = MeasureStructure::from_atom_masses(&g, &[rint(1), rint(0)]).unwrap();
        let q2 = MeasureStructure::from_atom_masses(&g, &[rint(0), rint(1)]).unwrap();
        DisintegrationInstance::new(
            m.lambda().clone(),
            vec!["t1".into(), "t2".into()],
            vec![q1.lambda().clone(), q2.lambda().clone()],
        )
        .unwrap()
    }

    #[test]
    fn uniform_marginal_mixes_point_masses_evenly() {
        let inst = delta_disintegration();
        let report = disintegrate(&inst);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rat(1, 2), rat(1, 2)])
        );
    }

    #[test]
    fn point_marginal_cannot_mix_a_flat_kernel() {
        let g = ground(&["w1", "w2"]);
        let m = MeasureStructure::from_atom_masses(&g, &[rint(1), rint(0)]).unwrap();
        let q = MeasureStructure::from_atom_masses(&g, &[rat(1, 2), rat(1, 2)]).unwrap();
        let inst = DisintegrationInstance::new(
            m.lambda().clone(),
            vec!["t1".into()],
            vec![q.lambda().clone()],
        )
        .unwrap();
        let report = disintegrate(&inst);
        let sys = inst.system();
        assert!(!report.outcome.is_feasible());
        assert!(sys.verify(&report.outcome));
    }

    #[test]
    fn marginal_equal_to_a_kernel_is_a_point_prior() {
        let g = ground(&["w1", "w2"]);
        let q0 = MeasureStructure::from_atom_masses(&g, &[rat(1, 4), rat(3, 4)]).unwrap();
        let q1 = MeasureStructure::from_atom_masses(&g, &[rat(3, 4), rat(1, 4)]).unwrap();
        let inst = DisintegrationInstance::new(
            q0.lambda().clone(),
            vec!["t0".into(), "t1".into()],
            vec![q0.lambda().clone(), q1.lambda().clone()],
        )
        .unwrap();
        let report = disintegrate(&inst);
        assert_eq!(
            report.outcome,
            FeasibilityOutcome::Feasible(vec![rint(1), rint(0)])
        );
    }

    #[test]
    fn identity_kernel_satisfies_takeout() {
        let g = ground(&["s1", "s2", "s3"]);
        let ring = crate::sets::generate_ring(
            &g,
            &(0..3).map(|i| g.singleton(i)).collect::<Vec<_>>(),
        )
        .unwrap();
        let x = PointMap::identity(&g);
        let ok = verify_takeout(
            |a: &Subset, s: usize| {
                if a.contains_index(s) {
                    rint(1)
                } else {
                    rint(0)
                }
            },
            &ring,
            &x,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn state_blind_kernel_fails_takeout() {
        let omega = ground(&["w1", "w2"]);
        let s = ground(&["s1", "s2"]);
        let ring = crate::sets::generate_ring(
            &omega,
            &[omega.subset(["w1"]).unwrap(), omega.subset(["w2"]).unwrap()],
        )
        .unwrap();
        let x = PointMap::from_labels(omega.clone(), s, &[("w1", "s1"), ("w2", "s2")]).unwrap();
        let m = MeasureStructure::from_atom_masses(&omega, &[rat(1, 2), rat(1, 2)]).unwrap();
        let ok = verify_takeout(
            |a: &Subset, _s: usize| m.value(a).unwrap().clone(),
            &ring,
            &x,
        )
        .unwrap();
        assert!(!ok);
    }

    #[test]
    fn non_additive_kernel_is_rejected() {
        let g = ground(&["s1", "s2"]);
        let ring = crate::sets::generate_ring(
            &g,
            &[g.subset(["s1"]).unwrap(), g.subset(["s2"]).unwrap()],
        )
        .unwrap();
        let x = PointMap::identity(&g);
        let err = verify_takeout(|a: &Subset, _s: usize| rint(a.len() as i64 * a.len() as i64), &ring, &x)
            .unwrap_err();
        assert!(matches!(err, Error::NotAdditive(_)));
    }

    #[test]
    fn companionship_is_transitive() {
        let (m, x, family, x_prime) = two_point_uniform();
        let first = solve_companion(&m, &x, &family, &x_prime).unwrap();
        let mu = first.report.outcome.solution().unwrap().to_vec();
        let mu_ms =
            MeasureStructure::from_atom_masses(x_prime.domain(), &mu).unwrap();

        // second hop: from (X', μ) to a two-point X''
        let s = x.codomain().clone();
        let omega2 = ground(&["q1", "q2"]);
        let x_second =
            PointMap::from_labels(omega2, s, &[("q1", "s1"), ("q2", "s2")]).unwrap();
        let second = solve_companion(&mu_ms, &x_prime, &family, &x_second).unwrap();
        let nu = second.report.outcome.solution().unwrap().to_vec();

        for h in &family {
            let lhs = integral(&h.compose(&x).unwrap(), &m).unwrap();
            let hx2: Vec<Rational> = h.compose(&x_second).unwrap().values().to_vec();
            let rhs: Rational = nu.iter().zip(&hx2).map(|(a, b)| a * b).sum();
            assert_eq!(lhs, rhs);
        }
    }
}
