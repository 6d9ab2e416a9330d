//! Kleene's first model as a tagged combinatory machine over ℕ.
//!
//! A code `n` is read as `(tag, payload) = unpair(n)`:
//!
//! | tag | meaning            | application            |
//! |-----|--------------------|------------------------|
//! | 0   | `K0`               | `K0·a = K1(a)`         |
//! | 1   | `K1(a)`            | `K1(a)·b = a`          |
//! | 2   | `S0`               | `S0·a = S1(a)`         |
//! | 3   | `S1(a)`            | `S1(a)·b = S2(a,b)`    |
//! | 4   | `S2(pair(a,b))`    | `S2(a,b)·c ≃ (a·c)·(b·c)` |
//! | 5   | `SUCC`             | `a+1`                  |
//! | 6   | `PRED`             | `a∸1`                  |
//! | 7   | `IFZ0`             | `IFZ1(c)`              |
//! | 8   | `IFZ1(c)`          | `IFZ2(c,a)`            |
//! | 9   | `IFZ2(pair(c,a))`  | `a` if `c = 0`, else `b` |
//!
//! Payloads of the nullary tags are ignored; tags from 10 on are inert and
//! every application of them diverges. Each rule costs one unit of fuel.

use thiserror::Error;

use crate::nat::Nat;
use crate::pca::{Element, Eval, Fuel, NoValue, Pca, Term};

pub const TAG_K0: u64 = 0;
pub const TAG_K1: u64 = 1;
pub const TAG_S0: u64 = 2;
pub const TAG_S1: u64 = 3;
pub const TAG_S2: u64 = 4;
pub const TAG_SUCC: u64 = 5;
pub const TAG_PRED: u64 = 6;
pub const TAG_IFZ0: u64 = 7;
pub const TAG_IFZ1: u64 = 8;
pub const TAG_IFZ2: u64 = 9;

pub fn pair_nat(x: u64, y: u64) -> Nat {
    Nat::pair(&x.into(), &y.into())
}

pub fn unpair_nat(n: &Nat) -> (Nat, Nat) {
    n.unpair()
}

fn code(tag: u64, payload: &Nat) -> Nat {
    Nat::pair(&Nat::small(tag), payload)
}

pub fn k_code() -> Element {
    code(TAG_K0, &Nat::zero())
}

pub fn s_code() -> Element {
    code(TAG_S0, &Nat::zero())
}

pub fn succ_code() -> Element {
    code(TAG_SUCC, &Nat::zero())
}

pub fn pred_code() -> Element {
    code(TAG_PRED, &Nat::zero())
}

pub fn ifz_code() -> Element {
    code(TAG_IFZ0, &Nat::zero())
}

/// Kleene's first model.
#[derive(Debug, Clone, Copy, Default)]
pub struct K1;

enum Frame {
    /// `a·c` is being computed; afterwards compute `b·c`.
    Second { b: Nat, c: Nat },
    /// The operand is being computed; afterwards apply `f` to it.
    Call { f: Nat },
}

/// Application in K1. Runs on an explicit stack so that deep `S2` nesting
/// does not consume host stack.
pub fn k1_apply(f: &Element, x: &Element, fuel: &mut Fuel) -> Eval {
    let mut stack: Vec<Frame> = Vec::new();
    let (mut f, mut x) = (f.clone(), x.clone());
    loop {
        fuel.tick()?;
        let (tag, payload) = f.unpair();
        let result = match tag.as_u64() {
            Some(TAG_K0) => code(TAG_K1, &x),
            Some(TAG_K1) => payload,
            Some(TAG_S0) => code(TAG_S1, &x),
            Some(TAG_S1) => code(TAG_S2, &Nat::pair(&payload, &x)),
            Some(TAG_S2) => {
                let (a, b) = payload.unpair();
                stack.push(Frame::Second { b, c: x.clone() });
                f = a;
                continue;
            }
            Some(TAG_SUCC) => fuel.spend(|b| x.succ_bounded(b))?,
            Some(TAG_PRED) => fuel.spend(|b| x.pred_bounded(b))?,
            Some(TAG_IFZ0) => code(TAG_IFZ1, &x),
            Some(TAG_IFZ1) => code(TAG_IFZ2, &Nat::pair(&payload, &x)),
            Some(TAG_IFZ2) => {
                let (c, a) = payload.unpair();
                if c.is_zero() {
                    a
                } else {
                    x
                }
            }
            _ => return Err(NoValue::Divergent),
        };
        // unwind until a frame needs another application
        let value = result;
        loop {
            match stack.pop() {
                None => return Ok(value),
                Some(Frame::Second { b, c }) => {
                    stack.push(Frame::Call { f: value });
                    f = b;
                    x = c;
                    break;
                }
                Some(Frame::Call { f: g }) => {
                    f = g;
                    x = value;
                    break;
                }
            }
        }
    }
}

impl Pca for K1 {
    fn name(&self) -> String {
        "k1".into()
    }

    fn apply(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> Eval {
        k1_apply(a, b, fuel)
    }

    fn k(&self) -> Element {
        k_code()
    }

    fn s(&self) -> Element {
        s_code()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("`{0}` is not a K1 primitive (expected K, S, SUCC, PRED or IFZ)")]
    NotPrimitive(String),
    #[error("term has no value in K1 within the construction budget")]
    NoValue,
}

pub fn primitive(name: &str) -> Option<Element> {
    Some(match name {
        "K" => k_code(),
        "S" => s_code(),
        "SUCC" => succ_code(),
        "PRED" => pred_code(),
        "IFZ" => ifz_code(),
        _ => return None,
    })
}

const CODE_BUDGET: u64 = 1 << 24;

/// The code of a closed term over K1 primitives (named by variables) and
/// previously built codes (constants).
pub fn code_of(t: &Term) -> Result<Element, CodeError> {
    fn resolve(t: &Term) -> Result<Term, CodeError> {
        Ok(match t {
            Term::Const(_) => t.clone(),
            Term::Var(v) => Term::Const(primitive(v).ok_or_else(|| CodeError::NotPrimitive(v.clone()))?),
            Term::App(f, x) => Term::app(resolve(f)?, resolve(x)?),
        })
    }
    let closed = resolve(t)?;
    crate::pca::denote(&K1, &closed, &mut Fuel::new(CODE_BUDGET)).map_err(|_| CodeError::NoValue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::{apply, eval_term, Outcome};

    fn n(v: u64) -> Nat {
        Nat::small(v)
    }

    #[test]
    fn primitive_codes() {
        assert_eq!(k_code(), n(0));
        assert_eq!(s_code(), n(3));
        assert_eq!(succ_code(), n(15));
        assert_eq!(pred_code(), n(21));
        assert_eq!(ifz_code(), n(28));
    }

    #[test]
    fn k_on_nine() {
        assert_eq!(apply(&K1, &n(0), &n(9), 10), Outcome::Value(n(64)));
    }

    #[test]
    fn succ_on_seven() {
        assert_eq!(apply(&K1, &n(15), &n(7), 10), Outcome::Value(n(8)));
        assert_eq!(apply(&K1, &n(21), &n(0), 10), Outcome::Value(n(0)));
    }

    #[test]
    fn skk_is_identity() {
        let t = Term::apps(Term::Const(n(3)), [Term::Const(n(0)), Term::Const(n(0)), Term::Const(n(42))]);
        assert_eq!(eval_term(&K1, &t, 100).unwrap(), Outcome::Value(n(42)));
        // S0·K = S1(K), S1(K)·K = S2(K,K), then K·42, K·42, K1(42)·K1(42): 6 steps
        assert_eq!(eval_term(&K1, &t, 5).unwrap(), Outcome::Exhausted);
        assert_eq!(eval_term(&K1, &t, 6).unwrap(), Outcome::Value(n(42)));
    }

    #[test]
    fn ifz_selects() {
        let pick = |c: u64| {
            let t = Term::apps(Term::Const(ifz_code()), [Term::Const(n(c)), Term::Const(n(10)), Term::Const(n(20))]);
            eval_term(&K1, &t, 10).unwrap()
        };
        assert_eq!(pick(0), Outcome::Value(n(10)));
        assert_eq!(pick(3), Outcome::Value(n(20)));
    }

    #[test]
    fn inert_tags_diverge() {
        let inert = pair_nat(10, 0);
        assert_eq!(apply(&K1, &inert, &n(1), 10), Outcome::Divergent);
        assert_eq!(apply(&K1, &inert, &n(1), 0), Outcome::Exhausted);
    }

    #[test]
    fn codes_of_terms() {
        assert_eq!(code_of(&Term::var("K")).unwrap(), n(0));
        assert_eq!(code_of(&Term::var("S")).unwrap(), n(3));
        assert_eq!(code_of(&Term::app(Term::var("K"), Term::var("S"))).unwrap(), n(13));
        assert!(matches!(code_of(&Term::var("Q")), Err(CodeError::NotPrimitive(_))));
    }

    #[test]
    fn deep_s_chain_runs_without_recursion() {
        // S (S (... (S K K) ...)) K style nesting of depth 5000
        let mut f = crate::pca::denote(&K1, &Term::apps(Term::Const(n(3)), [Term::Const(n(0)), Term::Const(n(0))]), &mut Fuel::new(10)).unwrap();
        for _ in 0..5000 {
            f = code(TAG_S2, &Nat::pair(&f, &k_code()));
        }
        // I·x applied through the chain: each level computes (f·x)·(K·x)
        let out = apply(&K1, &f, &n(7), 1_000_000);
        assert!(out.is_value() || out == Outcome::Divergent);
    }
}
