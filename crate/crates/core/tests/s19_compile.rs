use std::time::Instant;

use pca_core::oracle::{apply_functional, Functional};
use pca_core::s19::build;
use pca_core::s19::compile::{check_extensional_equiv, S19Compiler};
use pca_core::s19::{encode, S19Machine};
use pca_core::{Fuel, Nat, NoValue};

fn small(v: u64) -> Nat {
    Nat::small(v)
}

#[test]
fn compiled_examples() {
    let comp = S19Compiler::new().unwrap();
    let dk = comp.dialogue_kit().clone();
    let f = Functional::at_zero();
    let run = |e: &Nat, n: u64| {
        let c = comp.compile(e).unwrap();
        apply_functional(&dk, &f, &c, &small(n), &mut Fuel::new(1_000_000), 64)
    };
    assert_eq!(run(&small(25), 7).outcome, Ok(small(8)));
    assert_eq!(run(&encode(&[2, 1, 9]), 4).outcome, Ok(small(9)));
    let h = build::proj(2, 2);
    let r = run(&build::apply_f(1, &h), 6);
    assert_eq!(r.outcome, Ok(small(6)));
    assert_eq!(r.dialogue.rounds.len(), 1);
}

#[test]
fn runtime_decoder_agrees_with_host_parser() {
    let comp = S19Compiler::new().unwrap();
    let start = Instant::now();
    for m in 0..120u64 {
        let host = pca_core::s19::Schema::parse(&small(m)).ok().map(|s| s.arity() as u64);
        let got = comp.decode_at_runtime(&small(m), &mut Fuel::new(10_000_000)).unwrap();
        assert_eq!(got.map(|(a, _)| a.as_u64().unwrap()), host, "index {m}");
    }
    for m in [431u64] {
        let host = pca_core::s19::Schema::parse(&small(m)).ok().map(|s| s.arity() as u64);
        let got = comp.decode_at_runtime(&small(m), &mut Fuel::new(100_000_000)).unwrap();
        assert_eq!(got.map(|(a, _)| a.as_u64().unwrap()), host, "index {m}");
    }
    eprintln!("decoder sweep {:?}", start.elapsed());
}

#[test]
fn invocation_through_the_decoder() {
    let comp = S19Compiler::new().unwrap();
    let dk = comp.dialogue_kit().clone();
    let f = Functional::at_zero();
    // {<4,1,<9,1,0>,<2,1,25>>}(n) = {25}(n) = n + 1, decoded at run time
    let e = build::comp1(1, &build::invoke(1, 0), &build::konst(1, &small(25)));
    // hide the constant from the direct compilation of the drop pattern
    let e2 = build::comp1(1, &build::invoke(1, 0), &build::comp1(1, &build::konst(2, &small(25)), &build::succ()));
    let m = S19Machine::new(f.clone(), 64);
    for e in [&e, &e2] {
        let c = comp.compile(e).unwrap();
        for n in 0..4u64 {
            let start = Instant::now();
            let got = apply_functional(&dk, &f, &c, &small(n), &mut Fuel::new(1_000_000), 64).outcome;
            eprintln!("n={n} {:?}", start.elapsed());
            assert_eq!(got, m.apply(e, &[small(n)], &mut Fuel::new(1000)));
            assert_eq!(got, Ok(small(n + 1)));
        }
    }
}

#[test]
fn equivalence_report_flags_mismatch() {
    let comp = S19Compiler::new().unwrap();
    let dk = comp.dialogue_kit().clone();
    let f = Functional::at_zero();
    let samples: Vec<Nat> = (0..=20).map(small).collect();
    let lifted = dk.lift_index(&pca_core::k1::succ_code()).unwrap();
    let good = check_extensional_equiv(&dk, &lifted, &small(25), &f, &samples, 100_000, 64);
    assert_eq!(good.agreements, 21, "{good}");
    let konst = comp.compile(&encode(&[2, 1, 3])).unwrap();
    let bad = check_extensional_equiv(&dk, &konst, &small(25), &f, &samples, 100_000, 64);
    assert_eq!(bad.disagreements.len(), 20);
    assert!(!bad.passed());
    let div = check_extensional_equiv(&dk, &comp.diverging(), &encode(&[3, 2]), &f, &samples[..2], 1000, 64);
    assert_eq!(div.agreements, 2);
    let _ = NoValue::Divergent;
}
