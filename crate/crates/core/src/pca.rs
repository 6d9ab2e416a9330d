//! Partial applicative structures, closed-term denotation under a fuel
//! budget, Kleene refinement between terms, and the pca law checker.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::nat::Nat;

/// A member of a pca carrier. Every structure in this crate lives on the
/// natural numbers (the trivial pca uses `0` for `*`).
pub type Element = Nat;

/// Budget of primitive application steps shared by a whole evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    remaining: u64,
}

impl Fuel {
    pub fn new(steps: u64) -> Fuel {
        Fuel { remaining: steps }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining
    }

    /// Pays for one primitive step.
    pub fn tick(&mut self) -> Result<(), NoValue> {
        if self.remaining == 0 {
            return Err(NoValue::Exhausted);
        }
        self.remaining -= 1;
        Ok(())
    }

    /// Runs an operation metered in the same units, such as
    /// [`Nat::succ_bounded`] on a pair-structured number.
    pub fn spend<T>(&mut self, op: impl FnOnce(&mut u64) -> Option<T>) -> Result<T, NoValue> {
        let out = op(&mut self.remaining);
        out.ok_or_else(|| {
            self.remaining = 0;
            NoValue::Exhausted
        })
    }
}

/// Why an evaluation did not produce a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoValue {
    /// Ran out of fuel; a larger budget may still denote.
    Exhausted,
    /// The structure certified that the application is undefined.
    Divergent,
}

pub type Eval = Result<Element, NoValue>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Value(Element),
    Exhausted,
    Divergent,
}

impl Outcome {
    pub fn value(&self) -> Option<&Element> {
        match self {
            Outcome::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, Outcome::Value(_))
    }

    pub fn into_result(self) -> Eval {
        match self {
            Outcome::Value(v) => Ok(v),
            Outcome::Exhausted => Err(NoValue::Exhausted),
            Outcome::Divergent => Err(NoValue::Divergent),
        }
    }
}

impl From<Eval> for Outcome {
    fn from(r: Eval) -> Outcome {
        match r {
            Ok(v) => Outcome::Value(v),
            Err(NoValue::Exhausted) => Outcome::Exhausted,
            Err(NoValue::Divergent) => Outcome::Divergent,
        }
    }
}

/// A partial applicative structure with distinguished `k` and `s`.
///
/// Implementations must be deterministic and must charge at least one unit
/// of fuel per primitive reduction, so that a `Value` at some budget is
/// reproduced at every larger budget.
pub trait Pca: Send + Sync {
    fn name(&self) -> String;

    fn apply(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> Eval;

    fn k(&self) -> Element;

    fn s(&self) -> Element;

    fn render(&self, e: &Element) -> String {
        e.to_string()
    }
}

pub type PcaRef = Arc<dyn Pca>;

const EVAL_STACK: usize = 256 << 20;

thread_local! {
    static ON_BIG_STACK: std::cell::Cell<bool> = const { std::cell::Cell::new(false) };
}

/// Runs `f` on a thread with a large stack unless already on one. Used by
/// structures whose application recurses on the host.
pub(crate) fn on_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    if ON_BIG_STACK.with(|b| b.get()) {
        return f();
    }
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .stack_size(EVAL_STACK)
            .spawn_scoped(scope, || {
                ON_BIG_STACK.with(|b| b.set(true));
                f()
            })
            .expect("spawn evaluation thread")
            .join()
            .unwrap_or_else(|panic| std::panic::resume_unwind(panic))
    })
}

/// One application with a fresh budget.
pub fn apply(p: &dyn Pca, a: &Element, b: &Element, fuel: u64) -> Outcome {
    p.apply(a, b, &mut Fuel::new(fuel)).into()
}

/// The one-point pca `{*}` with `** = *`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Trivial;

impl Trivial {
    pub fn star() -> Element {
        Nat::zero()
    }
}

impl Pca for Trivial {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn apply(&self, _a: &Element, _b: &Element, fuel: &mut Fuel) -> Eval {
        fuel.tick()?;
        Ok(Trivial::star())
    }

    fn k(&self) -> Element {
        Trivial::star()
    }

    fn s(&self) -> Element {
        Trivial::star()
    }

    fn render(&self, _e: &Element) -> String {
        "*".into()
    }
}

/// Terms over a carrier: constants, variables and application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Const(Element),
    Var(String),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(f: Term, x: Term) -> Term {
        Term::App(Box::new(f), Box::new(x))
    }

    /// Left-associated application `f a1 a2 ... an`.
    pub fn apps<I: IntoIterator<Item = Term>>(f: Term, args: I) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn has_free(&self, name: &str) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Var(v) => v == name,
            Term::App(f, x) => f.has_free(name) || x.has_free(name),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn walk(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Const(_) => {}
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Term::App(f, x) => {
                    walk(f, out);
                    walk(x, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::App(f, x) => f.is_closed() && x.is_closed(),
        }
    }

    /// Renders with constants printed by `p`; application associates left.
    pub fn render(&self, p: &dyn Pca) -> String {
        let mut out = String::new();
        self.render_into(p, &mut out, false);
        out
    }

    fn render_into(&self, p: &dyn Pca, out: &mut String, as_argument: bool) {
        match self {
            Term::Const(c) => {
                let text = p.render(c);
                if text.starts_with('#') || text == "*" {
                    out.push_str(&text);
                } else {
                    out.push('#');
                    out.push_str(&text);
                }
            }
            Term::Var(v) => out.push_str(v),
            Term::App(f, x) => {
                if as_argument {
                    out.push('(');
                }
                f.render_into(p, out, false);
                out.push(' ');
                x.render_into(p, out, true);
                if as_argument {
                    out.push(')');
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("term has free variable `{0}`")]
    FreeVariable(String),
}

/// Replaces variables bound in `env` by constants.
pub fn substitute(t: &Term, env: &BTreeMap<String, Element>) -> Term {
    match t {
        Term::Const(_) => t.clone(),
        Term::Var(v) => match env.get(v) {
            Some(a) => Term::Const(a.clone()),
            None => t.clone(),
        },
        Term::App(f, x) => Term::app(substitute(f, env), substitute(x, env)),
    }
}

/// Denotation of a closed term: operator first, then operand, then apply.
pub fn eval_with(p: &dyn Pca, t: &Term, fuel: &mut Fuel) -> Result<Eval, TermError> {
    if let Some(v) = t.free_vars().into_iter().next() {
        return Err(TermError::FreeVariable(v));
    }
    Ok(denote(p, t, fuel))
}

pub(crate) fn denote(p: &dyn Pca, t: &Term, fuel: &mut Fuel) -> Eval {
    match t {
        Term::Const(a) => Ok(a.clone()),
        Term::Var(_) => Err(NoValue::Divergent),
        Term::App(f, x) => {
            let f = denote(p, f, fuel)?;
            let x = denote(p, x, fuel)?;
            p.apply(&f, &x, fuel)
        }
    }
}

pub fn eval_term(p: &dyn Pca, t: &Term, fuel: u64) -> Result<Outcome, TermError> {
    Ok(eval_with(p, t, &mut Fuel::new(fuel))?.into())
}

/// Observation of `t ≲ s` at a finite budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refinement {
    ConsistentSoFar,
    Witnessed(Element),
    Violated(String),
}

impl Refinement {
    pub fn is_violated(&self) -> bool {
        matches!(self, Refinement::Violated(_))
    }
}

/// Checks `t ≲ s`: whenever `s` denotes, `t` must denote the same value.
pub fn kleene_refines(p: &dyn Pca, t: &Term, s: &Term, fuel: u64) -> Result<Refinement, TermError> {
    let right = eval_term(p, s, fuel)?;
    let left = eval_term(p, t, fuel)?;
    Ok(compare_refinement(p, &left, &right))
}

pub fn compare_refinement(p: &dyn Pca, left: &Outcome, right: &Outcome) -> Refinement {
    match (left, right) {
        (Outcome::Value(w), Outcome::Value(v)) if w == v => Refinement::Witnessed(v.clone()),
        (Outcome::Value(w), Outcome::Value(v)) => Refinement::Violated(format!(
            "left denotes {} but right denotes {}",
            p.render(w),
            p.render(v)
        )),
        (Outcome::Divergent, Outcome::Value(v)) => Refinement::Violated(format!(
            "left diverges but right denotes {}",
            p.render(v)
        )),
        _ => Refinement::ConsistentSoFar,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    KReturnsFirst,
    SPartialDenotes,
    SRefinesDistribution,
    StrictDistribution,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::KReturnsFirst => "k a b = a",
            Law::SPartialDenotes => "s a b denotes",
            Law::SRefinesDistribution => "s a b c <~ a c (b c)",
            Law::StrictDistribution => "s a b c ~= a c (b c)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawFailure {
    pub law: Law,
    pub sample: (Element, Element, Element),
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LawReport {
    pub structure: String,
    pub checked: usize,
    pub failures: Vec<LawFailure>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "PASS");
        }
        for fail in &self.failures {
            writeln!(
                f,
                "FAIL [{}] {} {} {}: {}",
                fail.law, fail.sample.0, fail.sample.1, fail.sample.2, fail.detail
            )?;
        }
        write!(f, "{} of {} samples failed", self.failures.len(), self.checked)
    }
}

fn c(e: &Element) -> Term {
    Term::Const(e.clone())
}

/// Checks `k a b = a`, `s a b` denotes and `s a b c ≲ a c (b c)` on each
/// sample triple, each evaluation with its own budget.
pub fn laws_check(p: &dyn Pca, samples: &[(Element, Element, Element)], fuel: u64) -> LawReport {
    let mut report = LawReport {
        structure: p.name(),
        checked: samples.len(),
        failures: Vec::new(),
    };
    let (k, s) = (c(&p.k()), c(&p.s()));
    for (a, b, cc) in samples {
        let sample = (a.clone(), b.clone(), cc.clone());
        let mut fail = |law, detail: String| {
            report.failures.push(LawFailure {
                law,
                sample: sample.clone(),
                detail,
            })
        };
        let kab = Term::apps(k.clone(), [c(a), c(b)]);
        match eval_term(p, &kab, fuel).expect("closed") {
            Outcome::Value(v) if &v == a => {}
            other => fail(Law::KReturnsFirst, format!("got {other:?}")),
        }
        let sab = Term::apps(s.clone(), [c(a), c(b)]);
        let sab_out = eval_term(p, &sab, fuel).expect("closed");
        if !sab_out.is_value() {
            fail(Law::SPartialDenotes, format!("got {sab_out:?}"));
        }
        let lhs = Term::apps(s.clone(), [c(a), c(b), c(cc)]);
        let rhs = Term::apps(c(a), [c(cc), Term::app(c(b), c(cc))]);
        if let Refinement::Violated(why) = kleene_refines(p, &lhs, &rhs, fuel).expect("closed") {
            fail(Law::SRefinesDistribution, why);
        }
    }
    report
}

/// The strict law `s a b c ≃ a c (b c)`: when one side denotes at `fuel`,
/// the other must denote the same value within `8 * fuel`.
pub fn strict_law_check(
    p: &dyn Pca,
    samples: &[(Element, Element, Element)],
    fuel: u64,
) -> LawReport {
    let mut report = LawReport {
        structure: p.name(),
        checked: samples.len(),
        failures: Vec::new(),
    };
    let s = c(&p.s());
    let retry = fuel.saturating_mul(8);
    for (a, b, cc) in samples {
        let lhs = Term::apps(s.clone(), [c(a), c(b), c(cc)]);
        let rhs = Term::apps(c(a), [c(cc), Term::app(c(b), c(cc))]);
        let l = eval_term(p, &lhs, fuel).expect("closed");
        let r = eval_term(p, &rhs, fuel).expect("closed");
        let (l, r) = match (&l, &r) {
            (Outcome::Value(_), Outcome::Value(_)) => (l, r),
            (Outcome::Value(_), _) => (l, eval_term(p, &rhs, retry).expect("closed")),
            (_, Outcome::Value(_)) => (eval_term(p, &lhs, retry).expect("closed"), r),
            _ => continue,
        };
        let ok = matches!((&l, &r), (Outcome::Value(x), Outcome::Value(y)) if x == y);
        if !ok {
            report.failures.push(LawFailure {
                law: Law::StrictDistribution,
                sample: (a.clone(), b.clone(), cc.clone()),
                detail: format!("s a b c gave {l:?}, a c (b c) gave {r:?}"),
            });
        }
    }
    report
}

/// `count` triples drawn with replacement from `pool` by a seeded generator.
pub fn sample_triples(pool: &[Element], count: usize, seed: u64) -> Vec<(Element, Element, Element)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut pick = || pool.choose(&mut rng).cloned().expect("nonempty pool");
            let a = pick();
            let b = pick();
            let c = pick();
            (a, b, c)
        })
        .collect()
}
