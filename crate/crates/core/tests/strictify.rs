use std::sync::Arc;
use std::time::Instant;

use pca_core::k1::{self, K1};
use pca_core::pca::{laws_check, sample_triples, strict_law_check, Trivial};
use pca_core::strictify::{sample_pool, strict_pca, StrictPca};
use pca_core::toolkit::Kit;
use pca_core::{Fuel, Nat, NoValue, Pca, PcaRef};

fn strict_k1() -> StrictPca {
    let base: PcaRef = Arc::new(K1);
    strict_pca(Kit::new(base).unwrap()).unwrap()
}

#[test]
fn clause_examples() {
    let p = strict_k1();
    let mut fuel = Fuel::new(1 << 24);
    let a = Nat::small(42);
    let ka = p.apply(&p.k(), &a, &mut fuel).unwrap();
    assert_eq!(p.apply(&ka, &Nat::small(7), &mut fuel), Ok(a.clone()));

    let sk = p.apply(&p.s(), &p.k(), &mut fuel).unwrap();
    let skk = p.apply(&sk, &p.k(), &mut fuel).unwrap();
    assert_eq!(p.apply(&skk, &a, &mut fuel), Ok(a.clone()));

    let embedded = p.apply(&p.embed_realizer(), &k1::succ_code(), &mut fuel).unwrap();
    assert_eq!(p.apply(&embedded, &Nat::small(7), &mut fuel), Ok(Nat::small(8)));
    // raw numbers are not codes
    assert_eq!(p.apply(&Nat::small(7), &a, &mut fuel), Err(NoValue::Divergent));
}

#[test]
fn first_three_clauses_only() {
    let base: PcaRef = Arc::new(K1);
    let p = StrictPca::new(Kit::new(base).unwrap(), true).unwrap();
    let out = p.apply(&p.embed_realizer(), &k1::succ_code(), &mut Fuel::new(1 << 20));
    assert_eq!(out, Err(NoValue::Divergent));
}

#[test]
fn laws_over_k1_and_trivial() {
    let start = Instant::now();
    let p = strict_k1();
    let base = p.base().clone();
    let pool = sample_pool(&p, &[base.k.clone(), base.s.clone(), base.id.clone(), k1::succ_code(), Nat::small(3)]).unwrap();
    let samples = sample_triples(&pool, 100, 0);
    let report = laws_check(&p, &samples, 100_000);
    assert!(report.passed(), "{report}");
    let strict = strict_law_check(&p, &samples, 100_000);
    assert!(strict.passed(), "{strict}");

    let tbase: PcaRef = Arc::new(Trivial);
    let t = strict_pca(Kit::new(tbase).unwrap()).unwrap();
    let star = Trivial::star();
    let samples = sample_triples(&[star], 10, 0);
    assert!(laws_check(&t, &samples, 100_000).passed());
    assert!(strict_law_check(&t, &samples, 100_000).passed());
    eprintln!("strict laws {:?}", start.elapsed());
}
