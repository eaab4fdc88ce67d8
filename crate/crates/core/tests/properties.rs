mod common;

use std::sync::Arc;

use bieberbach::catalog::catalog_entries;
use bieberbach::cohomology::{apply_differential, cochain_len, extension_class, GModule};
use bieberbach::cryst::CrystGroup;
use bieberbach::cyclotomic::CyclotomicField;
use bieberbach::group::{multiplicity, CharacterTable};
use bieberbach::hodge::{component_dimensions, enumerate_hodge_types, isotypical_decomposition};
use bieberbach::io::GroupSpec;
use bieberbach::linalg::{IntMatrix, SmithForm};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{random_group, random_point_group, random_vector, small_entries};

fn entry_group(rng: &mut StdRng) -> CrystGroup {
    let entries = small_entries();
    let e = &entries[rng.gen_range(0..entries.len())];
    random_group(rng, e, 4)
}

/// Product of random elementary matrices.
fn unimodular(rng: &mut StdRng, n: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let k: i64 = rng.gen_range(-2..=2);
        let e = IntMatrix::from_fn(n, n, |r, c| {
            BigInt::from(i64::from(r == c) + if r == i && c == j { k } else { 0 })
        });
        u = u.mul(&e);
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn smith_form_reconstructs(entries in proptest::collection::vec(-6i64..7, 12)) {
        let a = IntMatrix::from_fn(3, 4, |i, j| entries[i * 4 + j].into());
        let s = SmithForm::compute(&a);
        let d = s.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        // U A V = D
        let ua = s.left().mul(&a).mul(&s.right());
        for i in 0..3 {
            for j in 0..4 {
                let expected = if i == j { d.get(i).cloned().unwrap_or_else(BigInt::zero) } else { BigInt::zero() };
                prop_assert_eq!(&ua[(i, j)], &expected);
            }
        }
    }

    #[test]
    fn cyclotomic_field_axioms(order in 1usize..13, a in proptest::collection::vec(-5i64..6, 6), b in proptest::collection::vec(-5i64..6, 6)) {
        let k = CyclotomicField::new(order);
        let make = |v: &[i64]| v.iter().enumerate().fold(k.zero(), |acc, (i, &c)| &acc + &(&k.from_int(c) * &k.zeta_pow(i as i64)));
        let x = make(&a);
        let y = make(&b);
        prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
        prop_assert_eq!(&(&x + &y) * &x, &(&x * &x) + &(&y * &x));
        if !x.is_zero() {
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }
        let zx = x.to_complex() * y.to_complex();
        let z = (&x * &y).to_complex();
        prop_assert!((zx - z).norm() < 1e-6);
    }

    #[test]
    fn random_point_groups_have_orthogonal_tables(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let g = random_point_group(&mut rng, 4, 48);
        let t = CharacterTable::compute(&g).unwrap();
        prop_assert_eq!(t.len(), g.conjugacy_classes().len());
        let degrees: usize = (0..t.len()).map(|c| t.degree(c).pow(2)).sum();
        prop_assert_eq!(degrees, g.order());
        for a in 0..t.len() {
            for b in 0..t.len() {
                let ip = t.inner_product(t.values(a), t.values(b));
                prop_assert_eq!(ip.is_one(), a == b);
                prop_assert_eq!(ip.is_zero(), a != b);
            }
        }
        // the lattice character decomposes with non-negative integer multiplicities
        let traces: Vec<BigInt> = g.conjugacy_classes().iter().map(|c| g.element(c.representative).trace()).collect();
        let lattice = t.class_function(&traces);
        let total: usize = (0..t.len()).map(|c| multiplicity(&t, &lattice, c).unwrap() * t.degree(c)).sum();
        prop_assert_eq!(total, g.rank());
    }

    #[test]
    fn torsion_is_basis_independent(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = entry_group(&mut rng);
        let u = unimodular(&mut rng, c.rank());
        let moved = c.change_basis(&u).unwrap();
        prop_assert!(moved.validate().is_valid());
        prop_assert_eq!(
            c.torsion_status().unwrap().is_torsion_free,
            moved.torsion_status().unwrap().is_torsion_free
        );
        prop_assert_eq!(c.minimal_denominator().unwrap().d, moved.minimal_denominator().unwrap().d);
    }

    #[test]
    fn translate_conjugate_preserves_invariants(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = entry_group(&mut rng);
        let w = random_vector(&mut rng, c.rank(), 6);
        let moved = c.translate_conjugate(&w).unwrap();
        prop_assert!(moved.validate().is_valid());
        prop_assert_eq!(c.torsion_status().unwrap().is_torsion_free, moved.torsion_status().unwrap().is_torsion_free);
        prop_assert_eq!(c.minimal_denominator().unwrap().d, moved.minimal_denominator().unwrap().d);
        prop_assert_eq!(extension_class(&c).unwrap().class_coords, extension_class(&moved).unwrap().class_coords);
    }

    #[test]
    fn extension_order_divides_group_order(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = entry_group(&mut rng);
        let e = extension_class(&c).unwrap();
        prop_assert!((BigInt::from(c.order()) % &e.order).is_zero());
        let d = c.minimal_denominator().unwrap();
        prop_assert_eq!(BigInt::from(d.d), e.order);
    }

    #[test]
    fn missing_eigenvalue_one_forces_torsion(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = entry_group(&mut rng);
        let t = c.torsion_status().unwrap();
        for (g, has_one) in c.eigenvalue_one_filter() {
            if !has_one {
                let powers: Vec<usize> = (1..c.group().element_order(g)).map(|k| c.group().power(g, k)).collect();
                prop_assert!(t.witnesses.iter().any(|w| powers.contains(&w.element)));
            }
        }
        prop_assert_eq!(t.witnesses.is_empty(), t.is_torsion_free);
        for w in &t.witnesses {
            let image = c.linear(w.element).mul_rat(&w.x).add(c.translation(w.element));
            prop_assert!(image.sub(&w.x).is_integral());
        }
    }

    #[test]
    fn bar_differentials_compose_to_zero(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = entry_group(&mut rng);
        let m = GModule::lattice(c.group());
        for k in 0..2 {
            let f: Vec<BigInt> = (0..cochain_len(&m, k)).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
            let df = apply_differential(&m, k, &f);
            let ddf = apply_differential(&m, k + 1, &df);
            prop_assert!(ddf.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn json_echo_is_canonical(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = entry_group(&mut rng);
        let spec = GroupSpec::from_group(&c);
        let again: GroupSpec = serde_json::from_str(&spec.to_json()).unwrap();
        let rebuilt = again.to_group().unwrap();
        prop_assert_eq!(rebuilt.vector_system(), c.vector_system());
        prop_assert_eq!(GroupSpec::from_group(&rebuilt), spec);
    }
}

#[test]
fn hodge_type_counts_and_dimensions() {
    for e in catalog_entries() {
        let c = e.build().unwrap();
        let data = isotypical_decomposition(&c).unwrap();
        let types = enumerate_hodge_types(&data);
        let pairs: usize = data
            .characters
            .iter()
            .filter(|ch| !ch.real && ch.index < ch.partner)
            .map(|ch| ch.multiplicity + 1)
            .product();
        assert_eq!(types.len(), pairs, "{}", e.name);
        for t in &types {
            assert_eq!(2 * t.h10_dimension(&data), c.rank(), "{}", e.name);
            assert_eq!(t.conjugate(&data).conjugate(&data), *t);
        }
        for r in component_dimensions(&data) {
            let real: usize = data.characters.iter().filter(|ch| ch.real).map(|ch| (ch.multiplicity / 2).pow(2)).sum();
            let pair: usize = data
                .characters
                .iter()
                .filter(|ch| !ch.real && ch.index < ch.partner)
                .map(|ch| 2 * r.hodge_type.nu[ch.index] * (ch.multiplicity - r.hodge_type.nu[ch.index]))
                .sum();
            assert_eq!(r.dimension, real + pair);
        }
    }
}

#[test]
fn trivial_group_components_match_grassmannians() {
    for n in 1..=3usize {
        let c = CrystGroup::from_generators(2 * n, &[]).unwrap();
        let data = isotypical_decomposition(&c).unwrap();
        let comps = component_dimensions(&data);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].dimension, n * n);
    }
}

#[test]
fn scaled_and_finite_modules_are_consistent() {
    // (1/d) Z^n is isomorphic to Z^n as a G-module
    let c = catalog_entries().into_iter().find(|e| e.name == "Z2-hyperelliptic").unwrap().build().unwrap();
    let g: &Arc<_> = c.group();
    let a = bieberbach::cohomology::cohomology_group(&GModule::lattice(g), 1).unwrap();
    let b = bieberbach::cohomology::cohomology_group(&GModule::scaled(g, BigInt::from(3)).unwrap(), 1).unwrap();
    assert_eq!(a.invariant_factors(), b.invariant_factors());
}
