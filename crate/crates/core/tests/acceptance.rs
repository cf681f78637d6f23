//! End-to-end checks over the metaplectic family and the zoo.
//! Run with `--nocapture` to see the per-check detail lines.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::Rational64;

use mtc_core::analyze::{self, Pattern};
use mtc_core::cyclo::sqrt_int;
use mtc_core::fusion::FusionRing;
use mtc_core::moddata::{deligne_product, equivalent_data, InvertibleKind, ModularData};
use mtc_core::zoo::{self, MetaplecticLabels, MetricGroup};
use mtc_core::Cyclo;

const ODD_N: [u64; 8] = [1, 3, 5, 7, 9, 11, 13, 15];

fn metaplectic(n: u64) -> &'static ModularData {
    static CACHE: OnceLock<Vec<ModularData>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        ODD_N
            .iter()
            .map(|&n| {
                let md = zoo::metaplectic_data(n).unwrap();
                let ring = md.verlinde_ring().unwrap();
                md.with_fusion(ring).unwrap()
            })
            .collect()
    });
    &all[(n as usize - 1) / 2]
}

fn report(what: &str, start: Instant, limit: Option<Duration>, failures: &[String]) {
    let took = start.elapsed();
    let late = limit.is_some_and(|l| took > l);
    let status = if failures.is_empty() && !late { "PASS" } else { "FAIL" };
    println!("{status} {what} ({took:.2?})");
    for f in failures {
        println!("    {f}");
    }
    if late {
        println!("    exceeded {:?}", limit.unwrap());
    }
    assert!(failures.is_empty() && !late, "{what}: {failures:?}");
}

fn pointed(mg: &MetricGroup) -> ModularData {
    zoo::pointed_data(mg).unwrap()
}

#[test]
fn metaplectic_axiom_suite() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in ODD_N {
        let md = zoo::metaplectic_data(n).unwrap();
        let ring = md.verlinde_ring().unwrap();
        let md = md.with_fusion(ring).unwrap();
        let premodular = md.verify_premodular();
        if !premodular.passed() {
            failures.push(format!("N={n}: {premodular}"));
        }
        if !md.modularity_defects().unwrap().is_empty() || !md.is_modular() {
            failures.push(format!("N={n}: not modular"));
        }
        if md.global_dim() != Cyclo::from_integer(8 * n as i64) {
            failures.push(format!("N={n}: global dimension {}", md.global_dim()));
        }
    }
    report("metaplectic data: premodular axioms, modularity, D = 8N", start, Some(Duration::from_secs(60)), &failures);
}

#[test]
fn metaplectic_fusion_rules() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in [3, 5, 7] {
        let ring = metaplectic(n).attached_fusion().unwrap();
        let rules = zoo::metaplectic_rules(n, ring);
        println!("    N={n}: {} rules checked", rules.len());
        for r in rules.iter().filter(|r| !r.holds) {
            failures.push(format!("N={n}: {}", r.rule));
        }
        let mut needed = vec!["V1 V1 = g + sum Y", "X1 X1 = 1 + g2 + X"];
        if n >= 5 {
            needed.push("X1 X2 = X");
        }
        for needed in needed {
            if !rules.iter().any(|r| r.rule.starts_with(needed)) {
                failures.push(format!("N={n}: rule {needed} not checked"));
            }
        }
    }
    report("Verlinde ring reproduces the metaplectic fusion rules", start, None, &failures);
}

#[test]
fn order_two_invertible_is_boson() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in ODD_N {
        let md = metaplectic(n);
        let g2 = MetaplecticLabels::G2;
        if !md.t(g2).is_one() || md.classify_invertible(g2) != Ok(InvertibleKind::Boson) {
            failures.push(format!("N={n}: g2 has twist {}", md.t(g2)));
        }
    }
    report("g2 is a boson", start, None, &failures);
}

#[test]
fn boson_condensation_counts() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in ODD_N {
        let md = metaplectic(n);
        let l = MetaplecticLabels { n };
        let rep = analyze::condense_boson(md, MetaplecticLabels::G2).unwrap();
        let is_v = |s: &analyze::CondensedSimple| s.parents.iter().any(|&p| p >= l.v(1));
        let from_v: Vec<_> = rep.inventory.iter().filter(|s| is_v(s)).collect();
        let rest: Vec<_> = rep.inventory.iter().filter(|s| !is_v(s)).collect();
        let root = sqrt_int(n);
        let ok = rest.len() == 2 * n as usize
            && rest.iter().all(|s| s.dim.is_one())
            && from_v.len() == 2
            && from_v.iter().all(|s| s.dim == root)
            && rep.condensed_dim == Cyclo::from_integer(4 * n as i64)
            && rep.conserved;
        println!("    N={n}: {}", rep.summary());
        if !ok {
            failures.push(format!("N={n}: {}", rep.summary()));
        }
    }
    report("condensing g2: 2N invertibles, 2 simples of dimension √N, dimension 4N", start, None, &failures);
}

#[test]
fn metaplectic_family_count() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (n, want) in [(9, 8), (15, 16), (25, 8)] {
        let c = analyze::count_metaplectic(n).unwrap();
        if c.count != want {
            failures.push(format!("N={n}: count {} expected {want}", c.count));
        }
    }
    for n in (1..=25).step_by(2) {
        let c = analyze::count_metaplectic(n).unwrap();
        println!("    N={n}: r={} classes={} count={}", c.r, c.classes, c.count);
        if !c.matches() || c.semion_classes != 2 {
            failures.push(format!("N={n}: {c:?}"));
        }
    }
    report("metaplectic count 2^(r+2) with 2^(r+1) cyclic classes", start, Some(Duration::from_secs(300)), &failures);
}

fn modular_zoo() -> Vec<zoo::ZooEntry> {
    zoo::standard_zoo().into_iter().filter(|e| e.data.claims_modular()).collect()
}

#[test]
fn weakly_integral_divisible_by_four() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let zoo = modular_zoo();
    let mut swi = 0;
    let mut checked = 0;
    for e in &zoo {
        let r = analyze::check_swi_divisibility(&e.data).unwrap();
        checked += 1;
        swi += usize::from(r.strictly_weakly_integral);
        if !r.holds {
            failures.push(format!("{}: D = {}", e.name, r.global_dim));
        }
    }
    for (i, a) in zoo.iter().enumerate() {
        for b in &zoo[i..] {
            let dims: Vec<Cyclo> =
                a.data.dims().iter().flat_map(|x| b.data.dims().into_iter().map(move |y| x * &y)).collect();
            let from_dims = analyze::swi_divisibility_from_dims(&dims).unwrap();
            let r = if a.data.rank() * b.data.rank() <= 64 {
                let product = deligne_product(&a.data, &b.data).unwrap();
                let direct = analyze::check_swi_divisibility(&product).unwrap();
                if direct != from_dims {
                    failures.push(format!("{} x {}: product and dimension lists disagree", a.name, b.name));
                }
                direct
            } else {
                from_dims
            };
            checked += 1;
            swi += usize::from(r.strictly_weakly_integral);
            if !r.holds {
                failures.push(format!("{} x {}: D = {}", a.name, b.name, r.global_dim));
            }
        }
    }
    println!("    {checked} data checked, {swi} strictly weakly integral");
    report("strictly weakly integral zoo members and products have 4 | D", start, None, &failures);
}

#[test]
fn metaplectic_structure_facts() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in ODD_N.into_iter().filter(|&n| n > 1) {
        let s = analyze::metaplectic_structure(n).unwrap();
        let checks = [
            ("U = Z/4", s.universal_is_z4),
            ("2-dim simples self-dual", s.two_dim_self_dual),
            ("V* = g3 V", s.v_dual_holds),
            ("X V = V + g2 V", s.x_times_v),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("N={n}: {name}"));
            }
        }
    }
    report("universal grading Z/4, self-dual 2-dim simples, V* = g3 V, X V = V + g2 V", start, None, &failures);
}

#[test]
fn adjoint_subring_is_dihedral() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in [3, 5, 7] {
        let s = analyze::metaplectic_structure(n).unwrap();
        println!("    N={n}: adjoint {:?}, dim {} = 2 * {}", s.adjoint_labels, s.adjoint_dim, s.dihedral_m);
        if s.adjoint_dim != 2 * s.dihedral_m || s.adjoint_dihedral_isomorphism.is_none() {
            failures.push(format!("N={n}: no isomorphism with Rep(D_2m), m = {}", s.dihedral_m));
        }
    }
    report("adjoint subring is the dihedral representation ring", start, None, &failures);
}

#[test]
fn semion_oracle_over_z2z2_family() {
    let start = Instant::now();
    let rep = analyze::semion_prop_oracle().unwrap();
    let mut failures = Vec::new();
    if rep.members.len() != 32 {
        failures.push(format!("family has {} members", rep.members.len()));
    }
    for &i in &rep.transparent.counterexamples {
        failures.push(format!("member {i}: twists {:?}", rep.members[i].twists));
    }
    println!(
        "    transparent reading: {} qualifying, {} counterexamples; literal reading: {} qualifying, {} counterexamples",
        rep.transparent.qualifying.len(),
        rep.transparent.counterexamples.len(),
        rep.literal.qualifying.len(),
        rep.literal.counterexamples.len()
    );
    if rep.transparent.qualifying.is_empty() {
        failures.push("no qualifying member".into());
    }
    report("semion oracle over the Z2 x Z2 premodular family", start, Some(Duration::from_secs(10)), &failures);
}

#[test]
fn ising_inequivalence_and_detection() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let nus: Vec<i64> = (1..16).step_by(2).collect();
    let data: Vec<ModularData> = nus.iter().map(|&nu| zoo::ising(nu).unwrap()).collect();
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            if equivalent_data(&data[i], &data[j]).is_some() {
                failures.push(format!("ising({}) ~ ising({})", nus[i], nus[j]));
            }
        }
    }
    let dim4 = [
        ("Z4", pointed(&MetricGroup::cyclic(4, 1, 8).unwrap())),
        ("toric code", pointed(&MetricGroup::new(&[2, 2], vec![0.into(), 0.into(), 0.into(), Rational64::new(1, 2)]).unwrap())),
        ("semion x semion", deligne_product(&zoo::semion(1), &zoo::semion(1)).unwrap()),
    ];
    for (nu, is) in nus.iter().zip(&data) {
        for (name, d) in &dim4 {
            let product = deligne_product(is, d).unwrap();
            if analyze::detect_subdata(&product, Pattern::Ising).unwrap().is_none() {
                failures.push(format!("ising({nu}) x {name}: no Ising span"));
            }
        }
    }
    report("8 Ising data pairwise inequivalent; Ising spans detected in products", start, None, &failures);
}

#[test]
fn primality_of_metaplectic_and_products() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in ODD_N {
        let rep = analyze::primality(metaplectic(n)).unwrap();
        if !rep.prime {
            failures.push(format!("metaplectic N={n} factors: {:?}", rep.witness));
        }
    }
    let zoo: Vec<_> = modular_zoo().into_iter().filter(|e| e.data.rank() > 1).collect();
    let mut products = 0;
    for (i, a) in zoo.iter().enumerate() {
        for b in &zoo[i..] {
            if a.data.rank() * b.data.rank() > 64 {
                continue;
            }
            let product = deligne_product(&a.data, &b.data).unwrap();
            products += 1;
            let rep = analyze::primality(&product).unwrap();
            match rep.witness {
                Some(w) if !rep.prime && w.verify(&product) => {}
                _ => failures.push(format!("{} x {}: no verified factorization", a.name, b.name)),
            }
        }
    }
    println!("    {products} products factor with verified witnesses");
    report("metaplectic data prime; zoo products factor", start, None, &failures);
}

fn float_s(md: &ModularData) -> Vec<Vec<Complex64>> {
    md.s_rows().map(|row| row.iter().map(Cyclo::to_complex::<f64>).collect()).collect()
}

#[test]
fn float_unitarity_cross_check() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in ODD_N {
        let s = float_s(metaplectic(n));
        let r = s.len();
        let mut worst = 0.0f64;
        for a in 0..r {
            for b in 0..r {
                let v: Complex64 = (0..r).map(|x| s[a][x] * s[b][x].conj()).sum();
                let want = if a == b { 8.0 * n as f64 } else { 0.0 };
                worst = worst.max((v - want).norm());
            }
        }
        println!("    N={n}: max |S S^† - 8N I| = {worst:.2e}");
        if worst > 1e-9 {
            failures.push(format!("N={n}: deviation {worst:e}"));
        }
    }
    report("floating-point S S^† = 8N I", start, None, &failures);
}

#[test]
fn zoo_rings_are_valid() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for e in zoo::standard_zoo() {
        let ring: FusionRing = e.data.fusion_ring().unwrap();
        if !ring.validate().is_valid() || !e.data.verify().passed() {
            failures.push(e.name.clone());
        }
    }
    report("zoo members verify", start, None, &failures);
}
