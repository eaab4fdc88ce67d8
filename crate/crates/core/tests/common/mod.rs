#![allow(dead_code)]

use bieberbach::catalog::{catalog_entries, CatalogEntry};
use bieberbach::cohomology::Overlattice;
use bieberbach::cryst::{AffineGenerator, CrystGroup};
use bieberbach::group::{generate_closure, FiniteMatrixGroup};
use bieberbach::linalg::{IntMatrix, RatVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn random_vector(rng: &mut StdRng, n: usize, max_den: i64) -> RatVector {
    RatVector(
        (0..n)
            .map(|_| {
                let q = rng.gen_range(1..=max_den);
                rat(rng.gen_range(0..q), q)
            })
            .collect(),
    )
}

/// Catalog entries of rank at most 4.
pub fn small_entries() -> Vec<CatalogEntry> {
    catalog_entries().into_iter().filter(|e| e.group.rank <= 4).collect()
}

/// A valid vector system on a catalog point group with generator
/// translations of denominator at most `max_den`, found by rejection.
pub fn random_group(rng: &mut StdRng, entry: &CatalogEntry, max_den: i64) -> CrystGroup {
    let base = entry.build().unwrap();
    let n = base.rank();
    for _ in 0..500 {
        let gens: Vec<AffineGenerator> = base
            .generators()
            .iter()
            .map(|(l, _)| (l.clone(), random_vector(rng, n, max_den)))
            .collect();
        let c = CrystGroup::from_generators(n, &gens).unwrap();
        if c.validate().is_valid() {
            return c;
        }
    }
    base
}

/// `Z^n` plus the span of a random orbit, kept if the index is at most
/// `max_index`.
pub fn random_overlattice(rng: &mut StdRng, g: &FiniteMatrixGroup, max_index: u32) -> Overlattice {
    let n = g.rank();
    let id = |i: usize| RatVector::from_integers(&(0..n).map(|j| BigInt::from(i64::from(i == j))).collect::<Vec<_>>());
    loop {
        let mut gens: Vec<RatVector> = (0..n).map(id).collect();
        let seeds = rng.gen_range(1..=2);
        for _ in 0..seeds {
            let v = random_vector(rng, n, 4);
            for x in g.elements() {
                gens.push(x.mul_rat(&v));
            }
        }
        let l = Overlattice::from_generators(n, &gens).unwrap();
        if l.index() <= BigInt::from(max_index) {
            return l;
        }
    }
}

pub fn signed_permutation(rng: &mut StdRng, n: usize) -> IntMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let signs: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    IntMatrix::from_fn(n, n, |i, j| if perm[j] == i { BigInt::from(signs[j]) } else { BigInt::from(0) })
}

/// Random subgroup of the signed permutation matrices with `|G| <= max_order`.
pub fn random_point_group(rng: &mut StdRng, max_rank: usize, max_order: usize) -> FiniteMatrixGroup {
    loop {
        let n = rng.gen_range(1..=max_rank);
        let k = rng.gen_range(1..=3);
        let gens: Vec<IntMatrix> = (0..k).map(|_| signed_permutation(rng, n)).collect();
        if let Ok(g) = generate_closure(n, &gens, max_order) {
            return g;
        }
    }
}
