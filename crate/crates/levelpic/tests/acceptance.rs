//! Acceptance gate: one test per shipped claim, every comparison exact.
//! Each test prints a single `AC-n <name>: PASS|FAIL` line.

use levelpic::bigness::{
    builtin_catalog, max_epsilon, verify_certificate, CatalogEntry, EffectiveCatalog,
    MaxEpsilonOutcome,
};
use levelpic::divclass::{BasisSymbol, DivisorClass, SpaceDescriptor};
use levelpic::formulas;
use levelpic::linprog::{solve_by_enumeration, StandardLp};
use levelpic::porteous;
use levelpic::{rat, rat_int, Integer, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

fn gate(name: &str, failures: Vec<String>) {
    let ok = failures.is_empty();
    println!("{name}: {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {failures:?}");
}

fn lam(n: i64) -> (BasisSymbol, Rational) {
    (BasisSymbol::Lambda, rat_int(n))
}

/// The closed-form degeneracy class the pipeline must reproduce:
/// `lam_c * lambda + p_c * d0' + pp_c * d0'' + sum_a ram(l, a) * d0^(a)`.
fn closed_form(
    g: u32,
    level: u32,
    lam_c: i64,
    p_c: i64,
    pp_c: i64,
    ram: impl Fn(i64, i64) -> Rational,
) -> DivisorClass {
    let space = SpaceDescriptor::rprime(g, level).unwrap();
    let mut terms = vec![
        lam(lam_c),
        (BasisSymbol::Delta0Prime, rat_int(p_c)),
        (BasisSymbol::Delta0DoublePrime, rat_int(pp_c)),
    ];
    for a in 1..=(level / 2) {
        terms.push((
            BasisSymbol::Delta0Ram(a),
            ram(i64::from(level), i64::from(a)),
        ));
    }
    DivisorClass::from_terms(space, terms).unwrap()
}

#[test]
fn ac1_mukai_pipeline_g6() {
    let mut failures = Vec::new();
    for level in PRIMES {
        let derived = porteous::derive_mukai_class(6, level).unwrap();
        let expected = closed_form(6, level, 35, -5, -15, |l, a| {
            rat(-5 * (l * l - a * l + a * a), l)
        });
        if derived != expected {
            failures.push(format!("l={level}: {derived} != {expected}"));
        }
    }
    gate("AC-1 mukai-pipeline-g6", failures);
}

#[test]
fn ac2_mukai_pipeline_g8() {
    let mut failures = Vec::new();
    for level in PRIMES {
        let derived = porteous::derive_mukai_class(8, level).unwrap();
        let expected = closed_form(8, level, 196, -28, -56, |l, a| {
            rat(-14 * (2 * l * l - a * l + a * a), l)
        });
        if derived != expected {
            failures.push(format!("l={level}: {derived} != {expected}"));
        }
    }
    gate("AC-2 mukai-pipeline-g8", failures);
}

#[test]
fn ac3_koszul_improved_3_3() {
    let mut failures = Vec::new();
    let class = formulas::koszul_improved_class(3, 3).unwrap();
    let expected = DivisorClass::from_terms(
        SpaceDescriptor::rprime(8, 3).unwrap(),
        vec![
            lam(38),
            (BasisSymbol::Delta0Prime, rat_int(-6)),
            (BasisSymbol::Delta0DoublePrime, rat_int(-6)),
            (BasisSymbol::Delta0Ram(1), rat(-32, 3)),
        ],
    )
    .unwrap();
    if class != expected {
        failures.push(format!("{class} != {expected}"));
    }
    let order = formulas::koszul_boundary_degeneracy_order(3).unwrap();
    if order != Integer::from(10) {
        failures.push(format!("degeneracy order {order} != 10"));
    }
    gate("AC-3 koszul-improved-3-3", failures);
}

#[test]
fn ac4_mukai_improved_consistency() {
    let mut failures = Vec::new();
    let space = SpaceDescriptor::rprime(8, 3).unwrap();
    let wirtinger_part = DivisorClass::from_terms(
        space,
        vec![(BasisSymbol::Delta0DoublePrime, rat_int(28))],
    )
    .unwrap();
    let ramified_part =
        DivisorClass::from_terms(space, vec![(BasisSymbol::Delta0Ram(1), rat_int(28))])
            .unwrap();
    // Virtual minus the ramified correction, reached two ways.
    let via_improved = formulas::mukai_improved_class(8, 3)
        .unwrap()
        .add(&wirtinger_part)
        .unwrap();
    let via_virtual = formulas::mukai_virtual_class(8, 3)
        .unwrap()
        .sub(&ramified_part)
        .unwrap();
    let expected = closed_form(8, 3, 196, -28, -56, |_, _| rat(-308, 3));
    if via_improved != expected {
        failures.push(format!("improved + 28 d0'' = {via_improved} != {expected}"));
    }
    if via_virtual != expected {
        failures.push(format!("virtual - 28 d0^(1) = {via_virtual} != {expected}"));
    }
    gate("AC-4 mukai-improved-consistency", failures);
}

fn canonical_restricted_8_3() -> DivisorClass {
    formulas::canonical_class(8, 3)
        .unwrap()
        .restrict_to_partial()
        .unwrap()
}

#[test]
fn ac5_bigness_certificate_8_3() {
    let mut failures = Vec::new();
    let space = SpaceDescriptor::rprime(8, 3).unwrap();
    let k = canonical_restricted_8_3();
    let k_literal = DivisorClass::from_terms(
        space,
        vec![
            lam(13),
            (BasisSymbol::Delta0Prime, rat_int(-2)),
            (BasisSymbol::Delta0DoublePrime, rat_int(-2)),
            (BasisSymbol::Delta0Ram(1), rat_int(-4)),
        ],
    )
    .unwrap();
    if k != k_literal {
        failures.push(format!("canonical restriction {k} != {k_literal}"));
    }

    let catalog = builtin_catalog(8, 3).unwrap();
    let mukai_literal = closed_form(8, 3, 196, -28, -56, |_, _| rat(-308, 3));
    let koszul_literal = closed_form(8, 3, 38, -6, -6, |_, _| rat(-32, 3));
    if catalog.get("mukai-improved").map(|e| &e.class) != Some(&mukai_literal) {
        failures.push("catalog mukai entry differs from the literal class".into());
    }
    if catalog.get("koszul-improved").map(|e| &e.class) != Some(&koszul_literal) {
        failures.push("catalog koszul entry differs from the literal class".into());
    }

    match max_epsilon(&k, &catalog).unwrap() {
        MaxEpsilonOutcome::Certified(combo) => {
            if combo.epsilon != rat(3, 17) {
                failures.push(format!("epsilon {} != 3/17", combo.epsilon));
            }
            if combo.coefficients["mukai-improved"] != rat(1, 119)
                || combo.coefficients["koszul-improved"] != rat(5, 17)
            {
                failures.push(format!("coefficients {:?}", combo.coefficients));
            }
            let residual_expected = DivisorClass::from_terms(
                space,
                vec![(BasisSymbol::Delta0DoublePrime, rat(4, 17))],
            )
            .unwrap();
            if combo.residual != residual_expected {
                failures.push(format!("residual {}", combo.residual));
            }
            let report = verify_certificate(&k, &catalog, &combo.certificate()).unwrap();
            if !report.pass {
                failures.push(format!("verification failed: {:?}", report.failures));
            }
        }
        other => failures.push(format!("expected a certificate, got {other:?}")),
    }
    gate("AC-5 bigness-certificate-8-3", failures);
}

#[test]
fn ac6_virtual_catalog_insufficient() {
    let mut failures = Vec::new();
    let k = canonical_restricted_8_3();
    let catalog = EffectiveCatalog::new(
        SpaceDescriptor::rprime(8, 3).unwrap(),
        vec![
            CatalogEntry {
                name: "mukai-virtual".into(),
                provenance: String::new(),
                class: formulas::mukai_virtual_class(8, 3).unwrap(),
            },
            CatalogEntry {
                name: "koszul-virtual".into(),
                provenance: String::new(),
                class: formulas::koszul_virtual_class(3, 3).unwrap(),
            },
        ],
    )
    .unwrap();

    match max_epsilon(&k, &catalog).unwrap() {
        MaxEpsilonOutcome::NotPositive(combo) => {
            if combo.epsilon != rat(-15, 23) {
                failures.push(format!("best epsilon {} != -15/23", combo.epsilon));
            }
            // Independent brute-force confirmation of the optimum.
            let lp = StandardLp {
                c: vec![rat_int(196), rat_int(38)],
                a: vec![
                    vec![rat_int(28), rat_int(6)],
                    vec![rat_int(56), rat_int(6)],
                    vec![rat(224, 3), rat(2, 3)],
                ],
                b: vec![rat_int(2), rat_int(2), rat_int(4)],
            };
            match solve_by_enumeration(&lp) {
                Some((x, value)) => {
                    if rat_int(13) - value != combo.epsilon {
                        failures.push("oracle epsilon disagrees".into());
                    }
                    if x != vec![rat(17, 322), rat(2, 23)] {
                        failures.push(format!("oracle optimizer {x:?}"));
                    }
                }
                None => failures.push("oracle found no vertex".into()),
            }
        }
        other => failures.push(format!("expected a nonpositive optimum, got {other:?}")),
    }
    gate("AC-6 virtual-catalog-insufficient", failures);
}

// --------------------------------------------------------------------
// AC-7: randomized invariants, deterministic via a fixed seed.
// --------------------------------------------------------------------

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-20..=20), rng.gen_range(1..=12))
}

fn random_class(rng: &mut ChaCha8Rng, space: SpaceDescriptor) -> DivisorClass {
    let terms = space
        .basis()
        .into_iter()
        .map(|sym| (sym, random_rational(rng)))
        .collect::<Vec<_>>();
    DivisorClass::from_terms(space, terms).unwrap()
}

fn drop_level_two_problem(class: &DivisorClass, level: u32) -> DivisorClass {
    if level != 2 {
        return class.clone();
    }
    DivisorClass::from_terms(
        class.space(),
        class
            .terms()
            .filter(|(sym, _)| *sym != BasisSymbol::DeltaI(1))
            .map(|(sym, c)| (sym, c.clone())),
    )
    .unwrap()
}

fn random_catalog(rng: &mut ChaCha8Rng, space: SpaceDescriptor) -> EffectiveCatalog {
    let boundary = space.boundary_basis();
    let n = rng.gen_range(1..=3);
    let entries = (0..n)
        .map(|j| {
            let mut terms = vec![lam(rng.gen_range(1..=9))];
            for sym in &boundary {
                terms.push((*sym, rat(rng.gen_range(-6..=2), rng.gen_range(1..=4))));
            }
            CatalogEntry {
                name: format!("entry-{j}"),
                provenance: String::new(),
                class: DivisorClass::from_terms(space, terms).unwrap(),
            }
        })
        .collect();
    EffectiveCatalog::new(space, entries).unwrap()
}

fn epsilon_of(outcome: &MaxEpsilonOutcome) -> Option<Rational> {
    match outcome {
        MaxEpsilonOutcome::Certified(c) | MaxEpsilonOutcome::NotPositive(c) => {
            Some(c.epsilon.clone())
        }
        MaxEpsilonOutcome::Infeasible => None,
    }
}

#[test]
fn ac7_randomized_invariants() {
    let mut failures = Vec::new();

    // Binomial identity behind the boundary degeneracy orders.
    for i in 1..=12u32 {
        let lhs = Integer::from(5) * formulas::binom(2 * i - 1, i - 1)
            - Integer::from(2) * formulas::binom(2 * i, i);
        if lhs != formulas::binom(2 * i - 1, i - 1) {
            failures.push(format!("binomial identity fails at i={i}"));
        }
    }

    // Ramified-coefficient collection identity, both genera, all primes.
    for level in PRIMES {
        let l = i64::from(level);
        let g6 = formulas::mukai_virtual_class(6, level).unwrap();
        let g8 = formulas::mukai_virtual_class(8, level).unwrap();
        for a in 1..=(level / 2) {
            let av = i64::from(a);
            let uncollected6 = rat_int(-5 * l) + rat(5 * av * (l - av), l);
            let uncollected8 = rat_int(-28 * l) + rat(14 * av * (l - av), l);
            if g6.coeff(BasisSymbol::Delta0Ram(a)) != uncollected6 {
                failures.push(format!("g=6 collection identity fails at l={level} a={a}"));
            }
            if g8.coeff(BasisSymbol::Delta0Ram(a)) != uncollected8 {
                failures.push(format!("g=8 collection identity fails at l={level} a={a}"));
            }
        }
    }

    // Pullback linearity on 200 seeded random classes.
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e7e1);
    for case in 0..200 {
        let g = rng.gen_range(2..=12);
        let level = PRIMES[rng.gen_range(0..PRIMES.len())];
        let source = SpaceDescriptor::mbar(g, level).unwrap();
        let target = if rng.gen_bool(0.5) {
            SpaceDescriptor::rbar(g, level).unwrap()
        } else {
            SpaceDescriptor::rprime(g, level).unwrap()
        };
        let x = drop_level_two_problem(&random_class(&mut rng, source), level);
        let y = drop_level_two_problem(&random_class(&mut rng, source), level);
        let c = random_rational(&mut rng);
        let combined = x.scale(&c).add(&y).unwrap().pullback(&target).unwrap();
        let separate = x
            .pullback(&target)
            .unwrap()
            .scale(&c)
            .add(&y.pullback(&target).unwrap())
            .unwrap();
        if combined != separate {
            failures.push(format!("pullback linearity fails on case {case}"));
        }
    }

    // Certificate search on seeded random catalogs: soundness against
    // verification, optimality against the enumeration oracle (also run
    // internally), monotonicity under catalog extension.
    let space = SpaceDescriptor::rprime(8, 3).unwrap();
    let k = canonical_restricted_8_3();
    for case in 0..40 {
        let catalog = random_catalog(&mut rng, space);
        let outcome = max_epsilon(&k, &catalog).unwrap();
        if let MaxEpsilonOutcome::Certified(combo) = &outcome {
            let report = verify_certificate(&k, &catalog, &combo.certificate()).unwrap();
            if !report.pass {
                failures.push(format!("case {case}: certificate fails verification"));
            }
        }
        if catalog.len() > 1 {
            let smaller = EffectiveCatalog::new(
                space,
                catalog.entries()[..catalog.len() - 1].to_vec(),
            )
            .unwrap();
            let sub = epsilon_of(&max_epsilon(&k, &smaller).unwrap());
            let full = epsilon_of(&outcome);
            match (sub, full) {
                (Some(small), Some(big)) if small > big => {
                    failures.push(format!("case {case}: shrinking the catalog helped"));
                }
                (Some(_), None) => {
                    failures.push(format!("case {case}: superset became infeasible"));
                }
                _ => {}
            }
        }
    }

    gate("AC-7 randomized-invariants", failures);
}

#[test]
fn ac8_boundary_census_6_3() {
    let mut failures = Vec::new();
    let census = formulas::boundary_census(6, 3).unwrap();
    if census.delta0ram_degree != Integer::from(118098) {
        failures.push(format!("ramified degree {}", census.delta0ram_degree));
    }
    if census.delta0ram_degree != Integer::from(2) * Integer::from(3).pow(10) {
        failures.push("ramified degree is not 2 * 3^10".into());
    }
    if census.wirtinger_components != 1 {
        failures.push(format!(
            "wirtinger components {}",
            census.wirtinger_components
        ));
    }
    gate("AC-8 boundary-census-6-3", failures);
}
