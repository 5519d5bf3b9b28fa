//! Shared generators and independent oracles for the integration suites.

#![allow(dead_code)]

use charges::convex::PiecewiseLinearConvex;
use charges::rational::Rational;
use charges::{GroundSet, MeasureStructure, RandomQuantity};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_denom: i64) -> Rational {
    rat(rng.gen_range(lo..=hi), rng.gen_range(1..=max_denom))
}

pub fn ground_of_size(n: usize, prefix: &str) -> GroundSet {
    GroundSet::new((0..n).map(|i| format!("{prefix}{i}"))).unwrap()
}

/// Power-set structure with nonnegative random atom masses (zeros allowed).
pub fn random_power_structure(
    rng: &mut ChaCha8Rng,
    max_atoms: usize,
) -> MeasureStructure {
    let n = rng.gen_range(1..=max_atoms);
    let g = ground_of_size(n, "w");
    let masses: Vec<Rational> = (0..n)
        .map(|_| random_rational(rng, 0, 8, 4))
        .collect();
    MeasureStructure::from_atom_masses(&g, &masses).unwrap()
}

/// A coarse structure: a random partition of a random subset of the atoms,
/// with random nonnegative block masses. Every finite ring arises this way.
pub fn random_partition_structure(
    rng: &mut ChaCha8Rng,
    max_atoms: usize,
) -> MeasureStructure {
    let n = rng.gen_range(1..=max_atoms);
    let g = ground_of_size(n, "w");
    // random subset as the carrier of the ring
    let mut in_union: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.8)).collect();
    if in_union.is_empty() {
        in_union.push(0);
    }
    // random partition of the carrier into blocks
    let block_count = rng.gen_range(1..=in_union.len());
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); block_count];
    for &atom in &in_union {
        blocks[rng.gen_range(0..block_count)].push(atom);
    }
    blocks.retain(|b| !b.is_empty());
    let cells: Vec<_> = blocks
        .iter()
        .map(|b| g.subset_of_indices(b.iter().copied()))
        .collect();
    let masses: Vec<Rational> = blocks
        .iter()
        .map(|_| random_rational(rng, 0, 8, 4))
        .collect();
    MeasureStructure::new(
        charges::AdditiveSetFunction::from_cell_masses(&g, &cells, &masses).unwrap(),
    )
}

pub fn random_quantity(
    rng: &mut ChaCha8Rng,
    ground: &GroundSet,
    lo: i64,
    hi: i64,
    max_denom: i64,
) -> RandomQuantity {
    let values = (0..ground.len())
        .map(|_| random_rational(rng, lo, hi, max_denom))
        .collect();
    RandomQuantity::new(ground.clone(), values).unwrap()
}

/// Exact Gaussian elimination for `A x = b`. Returns the unique solution, or
/// `None` when the system is inconsistent or the columns are dependent.
#[allow(clippy::needless_range_loop)]
pub fn gauss_unique_solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivot_row = 0usize;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(r) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            // dependent column: no unique solution
            return None;
        };
        m.swap(pivot_row, r);
        let p = m[pivot_row][col].clone();
        for v in m[pivot_row].iter_mut() {
            *v /= &p;
        }
        for r2 in 0..rows {
            if r2 == pivot_row || m[r2][col].is_zero() {
                continue;
            }
            let f = m[r2][col].clone();
            for c2 in 0..=cols {
                let delta = &f * &m[pivot_row][c2];
                m[r2][c2] -= delta;
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    if pivots.len() < cols {
        return None;
    }
    // consistency of the remaining rows
    for r in pivot_row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = m[i][cols].clone();
    }
    Some(x)
}

/// Convex-hull membership by exhaustive search over affinely independent
/// subsets of at most `d + 1` columns, each solved exactly.
pub fn in_convex_hull(columns: &[Vec<Rational>], target: &[Rational]) -> bool {
    let d = target.len();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        columns: &[Vec<Rational>],
        target: &[Rational],
        d: usize,
        start: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if !chosen.is_empty() {
            // lifted system: columns extended with a row of ones
            let rows = d + 1;
            let a: Vec<Vec<Rational>> = (0..rows)
                .map(|r| {
                    chosen
                        .iter()
                        .map(|&j| {
                            if r < d {
                                columns[j][r].clone()
                            } else {
                                Rational::one()
                            }
                        })
                        .collect()
                })
                .collect();
            let mut b: Vec<Rational> = target.to_vec();
            b.push(Rational::one());
            if let Some(x) = gauss_unique_solve(&a, &b) {
                if x.iter().all(|v| !v.is_negative()) {
                    return true;
                }
            }
        }
        if chosen.len() == d + 1 {
            return false;
        }
        for j in start..columns.len() {
            chosen.push(j);
            if rec(columns, target, d, j + 1, chosen) {
                chosen.pop();
                return true;
            }
            chosen.pop();
        }
        false
    }
    rec(columns, target, d, 0, &mut chosen)
}

/// Random convex piecewise linear function whose infimum is attained: the
/// slope sequence passes through zero at a random pivot.
pub fn random_pl_convex(rng: &mut ChaCha8Rng, max_kinks: usize) -> PiecewiseLinearConvex {
    let k = rng.gen_range(1..=max_kinks);
    let mut bps: Vec<Rational> = Vec::new();
    let mut cursor = random_rational(rng, -30, -10, 3);
    for _ in 0..k {
        cursor += random_rational(rng, 1, 8, 3);
        bps.push(cursor.clone());
    }
    let jumps: Vec<Rational> = (0..k).map(|_| random_rational(rng, 1, 6, 3)).collect();
    let pivot = rng.gen_range(0..=k);
    // slopes s_i = Σ_{l ≤ i} j_l − Σ_{l ≤ pivot} j_l, so s_pivot = 0
    let offset: Rational = jumps.iter().take(pivot).cloned().sum();
    let mut acc = Rational::zero();
    let mut slopes = vec![-offset.clone()];
    for j in &jumps {
        acc += j;
        slopes.push(&acc - &offset);
    }
    let anchor = (
        random_rational(rng, -5, 5, 2),
        random_rational(rng, -10, 10, 3),
    );
    PiecewiseLinearConvex::new(bps, slopes, anchor).unwrap()
}
