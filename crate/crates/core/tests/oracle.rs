use std::sync::Arc;

use pca_core::k1::K1;
use pca_core::oracle::{apply_functional, apply_oracle, DialogueKit, DialogueStatus, Functional, OracleFn, OraclePca};
use pca_core::toolkit::Kit;
use pca_core::{Fuel, Nat, NoValue, Pca, PcaRef};

fn k1_dialogues() -> Arc<DialogueKit> {
    let base: PcaRef = Arc::new(K1);
    DialogueKit::new(Kit::new(base).unwrap()).unwrap()
}

#[test]
fn lifted_programs_never_ask() {
    let dk = k1_dialogues();
    let succ = dk.lift_index(&dk.kit.succ).unwrap();
    let three = dk.kit.numeral(3).unwrap();
    let (out, dialogue) = apply_oracle(&dk, &OracleFn::double(), &succ, &three, &mut Fuel::new(1 << 24));
    assert!(dialogue.rounds.is_empty());
    let n = dk.kit.numeral_value(&out.unwrap(), 10, &mut Fuel::new(1 << 20)).unwrap();
    assert_eq!(n, Some(4));
}

#[test]
fn query_forwards_to_the_oracle() {
    let dk = k1_dialogues();
    let (out, dialogue) = apply_oracle(&dk, &OracleFn::double(), &dk.query, &Nat::small(21), &mut Fuel::new(1 << 24));
    assert_eq!(out, Ok(Nat::small(42)));
    assert_eq!(dialogue.rounds, vec![(Nat::small(21), Nat::small(42))]);
    let lines = dialogue.trace_lines(&|e| e.to_string());
    assert_eq!(lines, vec!["ROUND 0 QUERY 21 ANSWER 42".to_string(), "HALT 42".to_string()]);
}

#[test]
fn undefined_oracle_answer_is_reported() {
    let dk = k1_dialogues();
    let (out, dialogue) =
        apply_oracle(&dk, &OracleFn::undefined_at(5), &dk.query, &Nat::small(5), &mut Fuel::new(1 << 24));
    assert_eq!(out, Err(NoValue::Divergent));
    assert_eq!(dialogue.status, DialogueStatus::OracleUndefined(Nat::small(5)));
}

#[test]
fn protocol_violation_diverges() {
    let dk = k1_dialogues();
    // `id` returns the input tuple, whose head is a numeral rather than a boolean.
    let (out, dialogue) = apply_oracle(&dk, &OracleFn::identity(), &dk.kit.id, &Nat::small(1), &mut Fuel::new(1 << 24));
    assert_eq!(out, Err(NoValue::Divergent));
    assert!(matches!(dialogue.status, DialogueStatus::Divergent(_)));
}

#[test]
fn k_and_s_of_the_relativized_structure() {
    let dk = k1_dialogues();
    let pca = OraclePca::new(dk.clone(), OracleFn::double());
    let mut fuel = Fuel::new(1 << 26);
    let k_a = pca.apply(&pca.k(), &Nat::small(7), &mut fuel).unwrap();
    assert_eq!(pca.apply(&k_a, &Nat::small(9), &mut fuel), Ok(Nat::small(7)));

    // s (k query) lift(SUCC) 4 = query (SUCC 4) = double 5 in raw codes.
    let lifted = dk.lift_index(&pca_core::k1::succ_code()).unwrap();
    let k_query = pca.apply(&pca.k(), &dk.query, &mut fuel).unwrap();
    let sa = pca.apply(&pca.s(), &k_query, &mut fuel).unwrap();
    let sab = pca.apply(&sa, &lifted, &mut fuel).unwrap();
    let (out, dialogue) = pca.run(&sab, &Nat::small(4), &mut fuel);
    assert_eq!(out, Ok(Nat::small(10)));
    assert_eq!(dialogue.rounds.len(), 1);
}

#[test]
fn functional_depth_is_tracked() {
    let dk = k1_dialogues();
    let f = Functional::at_zero();
    // Querying `lift(succ)`: F answers with succ(0) in raw codes, one level deep.
    let lifted = dk.lift_index(&dk.kit.succ).unwrap();
    let run = apply_functional(&dk, &f, &dk.query, &lifted, &mut Fuel::new(1 << 24), 8);
    assert_eq!(run.depth_used, 1);
    assert!(run.outcome.is_ok());
    let starved = apply_functional(&dk, &f, &dk.query, &lifted, &mut Fuel::new(1 << 24), 0);
    assert_eq!(starved.outcome, Err(NoValue::Exhausted));
}

#[test]
fn nested_queries_need_more_depth() {
    let dk = k1_dialogues();
    let f = Functional::at_zero();
    // `query` asked about `query`: answering needs `query ·F 0`, itself a query about 0.
    let run = apply_functional(&dk, &f, &dk.query, &dk.query, &mut Fuel::new(1 << 24), 8);
    assert_eq!(run.depth_used, 2);
    let shallow = apply_functional(&dk, &f, &dk.query, &dk.query, &mut Fuel::new(1 << 24), 1);
    assert_eq!(shallow.outcome, Err(NoValue::Exhausted));
}

#[test]
fn query_bound_is_enforced() {
    let greedy = Functional::new("greedy", 1, |g, fuel| {
        g(&Nat::small(0), fuel)?;
        g(&Nat::small(1), fuel)
    });
    let probe = |_: &pca_core::Element, _: &mut Fuel| Ok(Nat::small(0));
    assert_eq!(greedy.call(&probe, &mut Fuel::new(100)), Err(NoValue::Divergent));
    assert_eq!(Functional::bounded_e(3).call(&probe, &mut Fuel::new(100)), Ok(Nat::small(0)));
}
