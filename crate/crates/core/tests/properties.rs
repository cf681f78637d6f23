use proptest::prelude::*;

use mtc_core::analyze;
use mtc_core::format;
use mtc_core::moddata::{deligne_product, equivalent_data, ModularData};
use mtc_core::zoo::{self, MetricGroup};
use mtc_core::Cyclo;

fn zoo_data() -> Vec<ModularData> {
    zoo::standard_zoo().into_iter().map(|e| e.data).collect()
}

fn odd_cyclic() -> impl Strategy<Value = (u64, i64)> {
    (0u64..12).prop_map(|k| 2 * k + 1).prop_flat_map(|n| {
        let units: Vec<i64> = (0..n as i64).filter(|a| num_integer::gcd(*a, n as i64) == 1).collect();
        (Just(n), proptest::sample::select(units))
    })
}

#[test]
fn condensation_conserves_dimension_for_every_zoo_boson() {
    let mut seen = 0;
    for md in zoo_data() {
        for b in analyze::bosons(&md) {
            let rep = analyze::condense_boson(&md, b).unwrap();
            let total: Cyclo = rep.inventory.iter().map(|s| &s.dim * &s.dim).sum();
            assert!(rep.conserved, "{}", md.name(b));
            assert_eq!(total, rep.condensed_dim);
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn json_round_trip_for_the_zoo() {
    for md in zoo_data().into_iter().chain(zoo::z2z2_premodular_family()) {
        let text = format::data_to_json(&md);
        let back = format::data_from_json(&text).unwrap();
        assert_eq!(back, md);
        assert_eq!(format::data_to_json(&back), text);
    }
}

#[test]
fn zoo_products_verify() {
    let zoo = zoo_data();
    for a in &zoo {
        for b in &zoo {
            if a.rank() * b.rank() > 24 {
                continue;
            }
            let p = deligne_product(a, b).unwrap();
            assert!(p.verify().passed(), "{} x {}", a.names().join(","), b.names().join(","));
            assert_eq!(p.global_dim(), a.global_dim() * b.global_dim());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cyclic_pointed_data_is_modular((n, a) in odd_cyclic()) {
        let md = zoo::pointed_data(&MetricGroup::cyclic(n, a, n).unwrap()).unwrap();
        prop_assert!(md.verify().passed());
        prop_assert!(md.is_modular());
        prop_assert_eq!(md.global_dim(), Cyclo::from_integer(n as i64));
    }

    #[test]
    fn particle_hole_is_a_symmetry((n, a) in odd_cyclic()) {
        let rep = analyze::particle_hole(&MetricGroup::cyclic(n, a, n).unwrap()).unwrap();
        prop_assert!(rep.confirmed());
        prop_assert_eq!(rep.free_orbits.len(), (n as usize - 1) / 2);
    }

    #[test]
    fn relabelled_data_is_equivalent(idx in 0usize..20, seed in any::<u64>()) {
        let zoo = zoo_data();
        let md = &zoo[idx % zoo.len()];
        let r = md.rank();
        // a unit-fixing permutation from the seed
        let mut perm: Vec<usize> = (0..r).collect();
        let mut s = seed;
        for i in (2..r).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, 1 + (s >> 33) as usize % i);
        }
        let moved = md.permuted(&perm);
        prop_assert!(moved.verify().passed());
        let phi = equivalent_data(md, &moved);
        prop_assert!(phi.is_some());
    }

    #[test]
    fn strictly_weakly_integral_has_four_dividing((i, j) in (0usize..20, 0usize..20)) {
        let zoo = zoo_data();
        let (a, b) = (&zoo[i % zoo.len()], &zoo[j % zoo.len()]);
        let dims: Vec<Cyclo> = a.dims().iter().flat_map(|x| b.dims().into_iter().map(move |y| x * &y)).collect();
        prop_assert!(analyze::swi_divisibility_from_dims(&dims).unwrap().holds);
    }
}
