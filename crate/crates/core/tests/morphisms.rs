use std::sync::Arc;

use pca_core::k1::{self, K1};
use pca_core::morphisms::{
    check_applicative, check_decider, check_effective_operation, check_i1, check_preorder, compose, HostFn,
    MorphismSpec,
};
use pca_core::oracle::{DialogueKit, Functional, FunctionalPca, OracleFn, OraclePca};
use pca_core::toolkit::{ap, booleans, c, v, Kit};
use pca_core::{Element, Fuel, Nat, Pca, PcaRef};

fn k1() -> PcaRef {
    Arc::new(K1)
}

fn dialogues() -> Arc<DialogueKit> {
    DialogueKit::new(Kit::new(k1()).unwrap()).unwrap()
}

fn k1_pairs() -> Vec<(Element, Element)> {
    let succ = k1::succ_code();
    let mut fuel = Fuel::new(1 << 20);
    let k7 = K1.apply(&k1::k_code(), &Nat::small(7), &mut fuel).unwrap();
    vec![
        (succ.clone(), Nat::small(3)),
        (k1::k_code(), Nat::small(4)),
        (k7, Nat::small(1)),
        (k1::s_code(), k1::k_code()),
        (k1::pred_code(), Nat::small(10)),
    ]
}

/// `ι_f: K1 → K1[f]`, `n ↦ {n}`.
fn iota(f: OracleFn) -> MorphismSpec {
    let dk = dialogues();
    let target: PcaRef = Arc::new(OraclePca::new(dk.clone(), f));
    let (tt, tf) = booleans(target.as_ref()).unwrap();
    // in K1, b T_f F_f selects the target boolean
    let select = dk
        .kit
        .abstract_vars(&ap(v("b"), [c(&tt), c(&tf)]), &["b"])
        .unwrap();
    let decider = dk.lift_index(&select).unwrap();
    MorphismSpec::new("iota", k1(), target, |a| vec![a.clone()], dk.application_realizer().unwrap(), Some(decider))
}

#[test]
fn identity_morphism_checks() {
    let id = MorphismSpec::canonical_identity(k1()).unwrap();
    assert!(check_applicative(&id, &k1_pairs(), 100_000).passed());
    assert!(check_decider(&id, 100_000).unwrap().passed());
    let wrong = MorphismSpec::identity(k1(), k1::k_code(), Some(k1::k_code()));
    let report = check_applicative(&wrong, &k1_pairs(), 100_000);
    assert!(!report.passed());
    assert!(report.to_string().lines().next().unwrap().starts_with("FAIL "));
    assert!(!check_decider(&wrong, 100_000).unwrap().passed());
}

#[test]
fn inclusion_into_oracle_structure() {
    let iota = iota(OracleFn::double());
    let report = check_applicative(&iota, &k1_pairs(), 1_000_000);
    assert!(report.passed(), "{report}");
    assert!(check_decider(&iota, 1_000_000).unwrap().passed());

    let id = MorphismSpec::canonical_identity(k1()).unwrap();
    let composed = compose(&id, &iota).unwrap();
    let report = check_applicative(&composed, &k1_pairs(), 1_000_000);
    assert!(report.passed(), "{report}");
    assert!(compose(&iota, &id).is_err());
}

#[test]
fn preorder_witnesses() {
    let id = MorphismSpec::canonical_identity(k1()).unwrap();
    let i = K1.apply(&K1.apply(&k1::s_code(), &k1::k_code(), &mut Fuel::new(10)).unwrap(), &k1::k_code(), &mut Fuel::new(10)).unwrap();
    let samples: Vec<Element> = (0..10).map(Nat::small).collect();
    assert!(check_preorder(&id, &id, &i, &samples, 1000).passed());
    assert!(!check_preorder(&id, &id, &k1::k_code(), &samples, 1000).passed());
}

#[test]
fn i1_membership() {
    let samples: Vec<Element> = (0..20).map(Nat::small).collect();
    assert!(check_i1(&K1, &k1::succ_code(), &OracleFn::successor(), &samples, 1000).passed());
    assert!(!check_i1(&K1, &k1::k_code(), &OracleFn::successor(), &samples, 1000).passed());
    let empty = |_: &Element, _: &mut Fuel| Err(pca_core::NoValue::Divergent);
    let vacuous = check_i1(&K1, &k1::k_code(), &empty, &samples, 1000);
    assert!(vacuous.passed() && vacuous.checked() == 0);

    let dk = dialogues();
    for f in [OracleFn::double(), OracleFn::identity(), OracleFn::successor(), OracleFn::undefined_at(5)] {
        let p = OraclePca::new(dk.clone(), f.clone());
        let report = check_i1(&p, &dk.query, &f, &samples, 1_000_000);
        assert!(report.passed(), "{} {report}", f.name());
    }
}

#[test]
fn effective_operations() {
    let dk = dialogues();
    let p = FunctionalPca::new(dk.clone(), Functional::at_zero(), 64);
    let mut indices = Vec::new();
    for cst in [0u64, 3, 9] {
        let kc = K1.apply(&k1::k_code(), &Nat::small(cst), &mut Fuel::new(10)).unwrap();
        let value = Nat::small(cst);
        let host = HostFn::new(&format!("const{cst}"), move |_| Some(value.clone()));
        indices.push((dk.lift_index(&kc).unwrap(), host.clone()));
        // a second index of the same function: s (k (k c)) i
        let alt = dk
            .kit
            .eval(&ap(c(&k1::s_code()), [ap(c(&k1::k_code()), [c(&kc)]), c(&dk.kit.id)]), &mut Fuel::new(1000))
            .unwrap();
        assert_ne!(alt, kc);
        indices.push((dk.lift_index(&alt).unwrap(), host));
    }
    let report = check_effective_operation(&p, &dk.query, &Functional::at_zero(), &indices, 1_000_000);
    assert!(report.passed(), "{report}");

    // In K1 itself a constant cannot decide the bounded existential.
    let one = K1.apply(&k1::k_code(), &Nat::small(1), &mut Fuel::new(10)).unwrap();
    let zero_at_3 = HostFn::new("zero_at_3", |x| Some(Nat::small(if x.as_u64() == Some(3) { 0 } else { 1 })));
    let never_zero = HostFn::new("never_zero", |_| Some(Nat::small(1)));
    let pairs = vec![(Nat::small(100), zero_at_3), (Nat::small(101), never_zero)];
    let report = check_effective_operation(&K1, &one, &Functional::bounded_e(8), &pairs, 1000);
    assert!(!report.passed());
}
