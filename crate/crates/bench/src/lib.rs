//! Deterministic instance builders shared by the benchmarks.

use charges::conglomerate::ConglomerabilityInstance;
use charges::convex::PiecewiseLinearConvex;
use charges::lp::FeasibilitySystem;
use charges::rational::Rational;
use charges::{GroundSet, MeasureStructure, RandomQuantity, Subset};

fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

/// A small multiplicative stream so the inputs look irregular without any
/// RNG dependency.
fn mix(state: &mut u64) -> i64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*state >> 33) as i64
}

/// Dense feasibility system with integer entries in [-10, 10].
pub fn dense_system(rows: usize, cols: usize, seed: u64) -> FeasibilitySystem {
    let mut state = seed | 1;
    let matrix: Vec<Vec<Rational>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| Rational::from_integer((mix(&mut state) % 21 - 10).into()))
                .collect()
        })
        .collect();
    let rhs: Vec<Rational> = (0..rows)
        .map(|_| Rational::from_integer((mix(&mut state) % 21 - 10).into()))
        .collect();
    FeasibilitySystem::new(matrix, rhs).unwrap()
}

/// Power-set structure over `n` atoms with irregular rational masses.
pub fn power_structure(n: usize, seed: u64) -> MeasureStructure {
    let mut state = seed | 1;
    let ground = GroundSet::new((0..n).map(|i| format!("w{i}"))).unwrap();
    let masses: Vec<Rational> = (0..n)
        .map(|_| rat((mix(&mut state) % 9).abs() + 1, (mix(&mut state) % 4).abs() + 1))
        .collect();
    MeasureStructure::from_atom_masses(&ground, &masses).unwrap()
}

pub fn quantity_on(ms: &MeasureStructure, seed: u64) -> RandomQuantity {
    let mut state = seed | 1;
    RandomQuantity::new(
        ms.ground().clone(),
        (0..ms.ground().len())
            .map(|_| rat(mix(&mut state) % 17 - 8, (mix(&mut state) % 3).abs() + 1))
            .collect(),
    )
    .unwrap()
}

/// Generators for a ring over `atoms` atoms.
pub fn ring_generators(atoms: usize, count: usize, seed: u64) -> (GroundSet, Vec<Subset>) {
    let mut state = seed | 1;
    let ground = GroundSet::new((0..atoms).map(|i| format!("w{i}"))).unwrap();
    let gens = (0..count)
        .map(|_| {
            let mask = mix(&mut state) as u64;
            ground.subset_of_indices((0..atoms).filter(|i| mask >> i & 1 == 1))
        })
        .collect();
    (ground, gens)
}

/// Convex piecewise linear function with `kinks` kinks and a minimizer.
pub fn convex_with_kinks(kinks: usize, seed: u64) -> PiecewiseLinearConvex {
    let mut state = seed | 1;
    let mut bps = Vec::new();
    let mut cursor = rat(-50, 1);
    for _ in 0..kinks {
        cursor += rat((mix(&mut state) % 5).abs() + 1, 2);
        bps.push(cursor.clone());
    }
    let jumps: Vec<Rational> = (0..kinks)
        .map(|_| rat((mix(&mut state) % 4).abs() + 1, 3))
        .collect();
    let pivot = kinks / 2;
    let offset: Rational = jumps.iter().take(pivot).cloned().sum();
    let mut acc = Rational::from_integer(0.into());
    let mut slopes = vec![-offset.clone()];
    for j in &jumps {
        acc += j;
        slopes.push(&acc - &offset);
    }
    PiecewiseLinearConvex::new(bps, slopes, (rat(0, 1), rat(0, 1))).unwrap()
}

/// Conglomerability instance of the given shape.
pub fn conglomerability(rows: usize, cols: usize, seed: u64) -> ConglomerabilityInstance {
    let mut state = seed | 1;
    let omega = GroundSet::new((0..cols).map(|i| format!("w{i}"))).unwrap();
    let t: Vec<Vec<Rational>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| Rational::from_integer((mix(&mut state) % 11 - 5).into()))
                .collect()
        })
        .collect();
    let phi: Vec<Rational> = (0..rows)
        .map(|_| Rational::from_integer((mix(&mut state) % 11 - 5).into()))
        .collect();
    ConglomerabilityInstance::new(
        (1..=rows).map(|i| format!("h{i}")).collect(),
        omega,
        t,
        phi,
    )
    .unwrap()
}
