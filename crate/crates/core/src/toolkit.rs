//! Bracket abstraction and the standard library of combinators every other
//! construction programs with: booleans, pairing, Curry numerals, tuples,
//! the fixpoint combinator and a compiler for partial recursive definitions.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::nat::Nat;
use crate::pca::{denote, Element, Eval, Fuel, NoValue, Pca, PcaRef, Term};

/// Budget for evaluating the closed terms that define kit elements.
pub const BUILD_FUEL: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToolkitError {
    #[error("variable `{0}` is free in the term but not abstracted")]
    Unbound(String),
    #[error("construction of `{0}` did not denote ({1:?})")]
    NoDenotation(String, NoValue),
    #[error("arity mismatch: {0}")]
    Arity(String),
}

/// `⟨x⟩t` at the term level:
/// `⟨x⟩x = s k k`, `⟨x⟩a = k a` for any other constant or variable,
/// `⟨x⟩(t u) = s (⟨x⟩t) (⟨x⟩u)`.
pub fn abstract_var(k: &Element, s: &Element, t: &Term, x: &str) -> Term {
    let kt = || Term::Const(k.clone());
    let st = || Term::Const(s.clone());
    match t {
        Term::Var(v) if v == x => Term::apps(st(), [kt(), kt()]),
        Term::Var(_) | Term::Const(_) => Term::app(kt(), t.clone()),
        Term::App(f, a) => Term::apps(st(), [abstract_var(k, s, f, x), abstract_var(k, s, a, x)]),
    }
}

/// `⟨x1 ... xn⟩t`, abstracting the last variable first.
pub fn abstract_term(p: &dyn Pca, t: &Term, vars: &[&str]) -> Term {
    let (k, s) = (p.k(), p.s());
    vars.iter().rev().fold(t.clone(), |acc, x| abstract_var(&k, &s, &acc, x))
}

/// Compiles `⟨x1 ... xn⟩t` to an element.
pub fn abstract_vars(p: &dyn Pca, t: &Term, vars: &[&str]) -> Result<Element, ToolkitError> {
    if let Some(v) = t.free_vars().into_iter().find(|v| !vars.contains(&v.as_str())) {
        return Err(ToolkitError::Unbound(v));
    }
    let closed = abstract_term(p, t, vars);
    denote(p, &closed, &mut Fuel::new(BUILD_FUEL))
        .map_err(|e| ToolkitError::NoDenotation(format!("<{}>", vars.join(" ")), e))
}

static FRESH: AtomicUsize = AtomicUsize::new(0);

fn fresh(prefix: &str) -> String {
    format!("{prefix}%{}", FRESH.fetch_add(1, Ordering::Relaxed))
}

pub fn c(e: &Element) -> Term {
    Term::Const(e.clone())
}

pub fn v(name: &str) -> Term {
    Term::var(name)
}

pub fn ap<const N: usize>(f: Term, args: [Term; N]) -> Term {
    Term::apps(f, args)
}

/// Description of a partial recursive function on ℕ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PRDef {
    /// The constant zero function of the given arity.
    Zero(usize),
    Succ,
    /// `Proj(i, k)`: the `i`-th (1-based) of `k` arguments.
    Proj(usize, usize),
    /// `f(g1(x), ..., gm(x))`.
    Comp(Box<PRDef>, Vec<PRDef>),
    /// `h(0, x) = base(x)`, `h(y+1, x) = step(y, h(y, x), x)`.
    PrimRec(Box<PRDef>, Box<PRDef>),
    /// `μy. f(y, x) = 0`.
    Mu(Box<PRDef>),
}

impl PRDef {
    /// Arity, or a description of the first inconsistency.
    pub fn arity(&self) -> Result<usize, String> {
        match self {
            PRDef::Zero(k) => Ok(*k),
            PRDef::Succ => Ok(1),
            PRDef::Proj(i, k) => {
                if *i >= 1 && i <= k {
                    Ok(*k)
                } else {
                    Err(format!("projection {i} of {k}"))
                }
            }
            PRDef::Comp(f, gs) => {
                if f.arity()? != gs.len() {
                    return Err(format!("outer function takes {} arguments, {} supplied", f.arity()?, gs.len()));
                }
                let mut arity = None;
                for g in gs {
                    let a = g.arity()?;
                    if *arity.get_or_insert(a) != a {
                        return Err("inner functions disagree on arity".into());
                    }
                }
                arity.ok_or_else(|| "composition needs at least one inner function".into())
            }
            PRDef::PrimRec(base, step) => {
                let k = base.arity()?;
                if step.arity()? != k + 2 {
                    return Err(format!("step must take {} arguments", k + 2));
                }
                Ok(k + 1)
            }
            PRDef::Mu(f) => f.arity()?.checked_sub(1).ok_or_else(|| "minimization of a nullary function".into()),
        }
    }
}

/// Combinators built once per structure.
pub struct Kit {
    pca: PcaRef,
    pub k: Element,
    pub s: Element,
    pub t: Element,
    pub f: Element,
    pub id: Element,
    pub pair: Element,
    pub p0: Element,
    pub p1: Element,
    pub zero: Element,
    pub succ: Element,
    pub pred: Element,
    pub iszero: Element,
    pub eq_num: Element,
    pub add: Element,
    pub mul: Element,
    pub monus: Element,
    pub less: Element,
    /// `[]`
    pub empty: Element,
    pub length: Element,
    pub nth: Element,
    pub proj: Element,
    pub take: Element,
    pub append: Element,
    pub concat: Element,
    pub prefix: Element,
    pub cons: Element,
    pub snoc: Element,
    pub tail: Element,
    /// `(⟨e a⟩ e a)`'s fixpoint: every application of it runs forever.
    pub loop_forever: Element,
}

impl std::fmt::Debug for Kit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Kit({})", self.pca.name())
    }
}

impl Kit {
    pub fn new(pca: PcaRef) -> Result<Arc<Kit>, ToolkitError> {
        let p: &dyn Pca = pca.as_ref();
        let (k, s) = (p.k(), p.s());
        let lam = |vars: &[&str], body: Term| abstract_vars(p, &body, vars);
        let fix = |f: &Element| fixpoint(p, f);

        let t = k.clone();
        let f = lam(&["x", "y"], v("y"))?;
        let id = lam(&["x"], v("x"))?;
        let pair = lam(&["x", "y", "z"], ap(v("z"), [v("x"), v("y")]))?;
        let p0 = lam(&["w"], ap(v("w"), [c(&t)]))?;
        let p1 = lam(&["w"], ap(v("w"), [c(&f)]))?;
        let zero = eval_closed(p, &ap(c(&pair), [c(&t), c(&t)]), "0")?;
        let succ = lam(&["n"], ap(c(&pair), [c(&f), v("n")]))?;
        let iszero = p0.clone();
        let pred = lam(&["n"], ap(c(&p0), [v("n")]).app_all([c(&zero), ap(c(&p1), [v("n")])]))?;

        let ifte = |cond: Term, then: Term, other: Term| ifte_with(&k, &s, cond, then, other);
        let isz = |t: Term| ap(c(&iszero), [t]);
        let dec = |t: Term| ap(c(&pred), [t]);

        let eq_num = fix(&lam(
            &["e", "n", "m"],
            ifte(
                isz(v("n")),
                isz(v("m")),
                ifte(isz(v("m")), c(&f), ap(v("e"), [dec(v("n")), dec(v("m"))])),
            ),
        )?)?;
        let add = fix(&lam(
            &["e", "n", "m"],
            ifte(isz(v("m")), v("n"), ap(c(&succ), [ap(v("e"), [v("n"), dec(v("m"))])])),
        )?)?;
        let mul = fix(&lam(
            &["e", "n", "m"],
            ifte(isz(v("m")), c(&zero), ap(c(&add), [ap(v("e"), [v("n"), dec(v("m"))]), v("n")])),
        )?)?;
        let monus = fix(&lam(
            &["e", "n", "m"],
            ifte(isz(v("m")), v("n"), dec(ap(v("e"), [v("n"), dec(v("m"))]))),
        )?)?;
        // i < n iff n ∸ i is nonzero
        let less = lam(&["i", "n"], ap(isz(ap(c(&monus), [v("n"), v("i")])), [c(&f), c(&t)]))?;

        let loop_forever = fix(&lam(&["e", "a"], ap(v("e"), [v("a")]))?)?;
        let diverge = || ap(c(&loop_forever), [c(&k)]);

        let empty = eval_closed(p, &ap(c(&pair), [c(&zero), c(&zero)]), "[]")?;
        let length = p0.clone();
        let nth = fix(&lam(
            &["e", "i", "l"],
            ifte(isz(v("i")), ap(c(&p0), [v("l")]), ap(v("e"), [dec(v("i")), ap(c(&p1), [v("l")])])),
        )?)?;
        let proj = lam(
            &["i", "u"],
            ifte(
                ap(c(&less), [v("i"), ap(c(&p0), [v("u")])]),
                ap(c(&nth), [v("i"), ap(c(&p1), [v("u")])]),
                diverge(),
            ),
        )?;
        let take = fix(&lam(
            &["e", "n", "l"],
            ifte(
                isz(v("n")),
                c(&zero),
                ap(c(&pair), [ap(c(&p0), [v("l")]), ap(v("e"), [dec(v("n")), ap(c(&p1), [v("l")])])]),
            ),
        )?)?;
        let append = fix(&lam(
            &["e", "n", "l", "r"],
            ifte(
                isz(v("n")),
                v("r"),
                ap(c(&pair), [ap(c(&p0), [v("l")]), ap(v("e"), [dec(v("n")), ap(c(&p1), [v("l")]), v("r")])]),
            ),
        )?)?;
        let len = |u: &str| ap(c(&p0), [v(u)]);
        let body = |u: &str| ap(c(&p1), [v(u)]);
        let concat = lam(
            &["u", "w"],
            ap(c(&pair), [ap(c(&add), [len("u"), len("w")]), ap(c(&append), [len("u"), body("u"), body("w")])]),
        )?;
        let prefix = lam(
            &["i", "u"],
            ifte(
                ap(c(&less), [v("i"), len("u")]),
                ap(c(&pair), [ap(c(&succ), [v("i")]), ap(c(&take), [ap(c(&succ), [v("i")]), body("u")])]),
                diverge(),
            ),
        )?;
        let cons = lam(
            &["x", "u"],
            ap(c(&pair), [ap(c(&succ), [len("u")]), ap(c(&pair), [v("x"), body("u")])]),
        )?;
        let snoc = lam(
            &["u", "x"],
            ap(c(&concat), [v("u"), ap(c(&cons), [v("x"), c(&empty)])]),
        )?;
        let tail = lam(&["u"], ap(c(&pair), [dec(len("u")), ap(c(&p1), [body("u")])]))?;

        Ok(Arc::new(Kit {
            pca: pca.clone(),
            k,
            s,
            t,
            f,
            id,
            pair,
            p0,
            p1,
            zero,
            succ,
            pred,
            iszero,
            eq_num,
            add,
            mul,
            monus,
            less,
            empty,
            length,
            nth,
            proj,
            take,
            append,
            concat,
            prefix,
            cons,
            snoc,
            tail,
            loop_forever,
        }))
    }

    pub fn pca(&self) -> &dyn Pca {
        self.pca.as_ref()
    }

    pub fn pca_ref(&self) -> &PcaRef {
        &self.pca
    }

    /// `f a1 ... an`, sharing one budget.
    pub fn call(&self, f: &Element, args: &[Element], fuel: &mut Fuel) -> Eval {
        let mut acc = f.clone();
        for a in args {
            acc = self.pca.apply(&acc, a, fuel)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, t: &Term, fuel: &mut Fuel) -> Eval {
        denote(self.pca(), t, fuel)
    }

    pub fn abstract_vars(&self, t: &Term, vars: &[&str]) -> Result<Element, ToolkitError> {
        abstract_vars(self.pca(), t, vars)
    }

    /// `if cond then a else b`, with both branches guarded by a dummy
    /// abstraction so only the selected one runs.
    pub fn ifte(&self, cond: Term, then: Term, other: Term) -> Term {
        ifte_with(&self.k, &self.s, cond, then, other)
    }

    pub fn fixpoint(&self, f: &Element) -> Result<Element, ToolkitError> {
        fixpoint(self.pca(), f)
    }

    fn build(&self, f: &Element, args: &[Element], what: &str) -> Result<Element, ToolkitError> {
        self.call(f, args, &mut Fuel::new(BUILD_FUEL))
            .map_err(|e| ToolkitError::NoDenotation(what.into(), e))
    }

    pub fn make_pair(&self, a: &Element, b: &Element) -> Result<Element, ToolkitError> {
        self.build(&self.pair, &[a.clone(), b.clone()], "pair")
    }

    /// The Curry numeral `n̄`: `0̄ = p T T`, `(n+1)̄ = p F n̄`.
    pub fn numeral(&self, n: u64) -> Result<Element, ToolkitError> {
        self.numeral_in(n, &mut Fuel::new(BUILD_FUEL))
            .map_err(|e| ToolkitError::NoDenotation("numeral".into(), e))
    }

    pub fn numeral_in(&self, n: u64, fuel: &mut Fuel) -> Eval {
        let mut acc = self.zero.clone();
        for _ in 0..n {
            acc = self.call(&self.pair, &[self.f.clone(), acc], fuel)?;
        }
        Ok(acc)
    }

    /// Reads a Curry numeral back, looking at most `max` successors deep.
    pub fn numeral_value(&self, e: &Element, max: u64, fuel: &mut Fuel) -> Result<Option<u64>, NoValue> {
        let mut cur = e.clone();
        for n in 0..=max {
            let head = self.pca.apply(&self.p0, &cur, fuel)?;
            if head == self.t && self.pca.apply(&self.p1, &cur, fuel)? == self.t {
                return Ok(Some(n));
            }
            if head != self.f {
                return Ok(None);
            }
            cur = self.pca.apply(&self.p1, &cur, fuel)?;
        }
        Ok(None)
    }

    /// `[u0, ..., un] = p (n+1)̄ (p u0 (p u1 (... (p un 0̄))))`.
    pub fn tuple(&self, items: &[Element]) -> Result<Element, ToolkitError> {
        self.tuple_in(items, &mut Fuel::new(BUILD_FUEL))
            .map_err(|e| ToolkitError::NoDenotation("tuple".into(), e))
    }

    /// [`Kit::tuple`] charged to an existing budget.
    pub fn tuple_in(&self, items: &[Element], fuel: &mut Fuel) -> Eval {
        let mut chain = self.zero.clone();
        for u in items.iter().rev() {
            chain = self.call(&self.pair, &[u.clone(), chain], fuel)?;
        }
        let len = self.numeral_in(items.len() as u64, fuel)?;
        self.call(&self.pair, &[len, chain], fuel)
    }

    /// Host-side inverse of [`Kit::tuple`].
    pub fn untuple(&self, u: &Element, max_len: u64, fuel: &mut Fuel) -> Result<Option<Vec<Element>>, NoValue> {
        let len = self.pca.apply(&self.p0, u, fuel)?;
        let Some(n) = self.numeral_value(&len, max_len, fuel)? else {
            return Ok(None);
        };
        let mut chain = self.pca.apply(&self.p1, u, fuel)?;
        let mut out = Vec::with_capacity(n as usize);
        for _ in 0..n {
            out.push(self.pca.apply(&self.p0, &chain, fuel)?);
            chain = self.pca.apply(&self.p1, &chain, fuel)?;
        }
        Ok(Some(out))
    }

    /// Compiles a partial recursive definition to an element taking its
    /// arguments as Curry numerals, one at a time.
    pub fn compile_primrec(&self, d: &PRDef) -> Result<Element, ToolkitError> {
        let arity = d.arity().map_err(ToolkitError::Arity)?;
        let xs: Vec<String> = (0..arity).map(|i| format!("x{i}")).collect();
        let xrefs: Vec<&str> = xs.iter().map(String::as_str).collect();
        let args = || xs.iter().map(|x| v(x));
        let isz = |t: Term| ap(c(&self.iszero), [t]);
        let dec = |t: Term| ap(c(&self.pred), [t]);
        match d {
            PRDef::Zero(_) => self.abstract_vars(&c(&self.zero), &xrefs),
            PRDef::Succ => Ok(self.succ.clone()),
            PRDef::Proj(i, _) => self.abstract_vars(&v(&xs[i - 1]), &xrefs),
            PRDef::Comp(f, gs) => {
                let f = self.compile_primrec(f)?;
                let inner = gs
                    .iter()
                    .map(|g| Ok(Term::apps(c(&self.compile_primrec(g)?), args())))
                    .collect::<Result<Vec<_>, ToolkitError>>()?;
                self.abstract_vars(&Term::apps(c(&f), inner), &xrefs)
            }
            PRDef::PrimRec(base, step) => {
                let base = self.compile_primrec(base)?;
                let step = self.compile_primrec(step)?;
                let rest: Vec<Term> = args().skip(1).collect();
                let y = || v(&xs[0]);
                let recursive = Term::apps(ap(v("e"), [dec(y())]), rest.clone());
                let body = self.ifte(
                    isz(y()),
                    Term::apps(c(&base), rest.clone()),
                    Term::apps(c(&step), [dec(y()), recursive].into_iter().chain(rest)),
                );
                let mut vars = vec!["e"];
                vars.extend(&xrefs);
                self.fixpoint(&self.abstract_vars(&body, &vars)?)
            }
            PRDef::Mu(f) => {
                let f = self.compile_primrec(f)?;
                let call = Term::apps(c(&f), std::iter::once(v("y")).chain(args()));
                let again = Term::apps(ap(v("e"), [ap(c(&self.succ), [v("y")])]), args());
                let body = self.ifte(isz(call), v("y"), again);
                let mut vars = vec!["e", "y"];
                vars.extend(&xrefs);
                let search = self.fixpoint(&self.abstract_vars(&body, &vars)?)?;
                let start = Term::apps(ap(c(&search), [c(&self.zero)]), args());
                if arity == 0 {
                    eval_closed(self.pca(), &start, "mu")
                } else {
                    self.abstract_vars(&start, &xrefs)
                }
            }
        }
    }
}

trait AppAll {
    fn app_all<const N: usize>(self, args: [Term; N]) -> Term;
}

impl AppAll for Term {
    fn app_all<const N: usize>(self, args: [Term; N]) -> Term {
        Term::apps(self, args)
    }
}

fn eval_closed(p: &dyn Pca, t: &Term, what: &str) -> Result<Element, ToolkitError> {
    denote(p, t, &mut Fuel::new(BUILD_FUEL)).map_err(|e| ToolkitError::NoDenotation(what.into(), e))
}

/// `cond (⟨x⟩then) (⟨x⟩else) k` for a variable `x` fresh for both branches.
pub fn ifte_with(k: &Element, s: &Element, cond: Term, then: Term, other: Term) -> Term {
    let x = fresh("if");
    Term::apps(
        cond,
        [abstract_var(k, s, &then, &x), abstract_var(k, s, &other, &x), Term::Const(k.clone())],
    )
}

/// The booleans `T = k` and `F = ⟨x y⟩ y` of any structure.
pub fn booleans(p: &dyn Pca) -> Result<(Element, Element), ToolkitError> {
    Ok((p.k(), abstract_vars(p, &v("y"), &["x", "y"])?))
}

/// `W W` with `W = ⟨x y⟩ f (x x) y`, so that `e a ≲ f e a`.
pub fn fixpoint(p: &dyn Pca, f: &Element) -> Result<Element, ToolkitError> {
    let w = abstract_vars(p, &ap(c(f), [ap(v("x"), [v("x")]), v("y")]), &["x", "y"])?;
    eval_closed(p, &ap(c(&w), [c(&w)]), "fixpoint")
}

/// Elements worth sampling when checking laws on `kit`'s structure.
pub fn sample_pool(kit: &Kit, extra: &[Element]) -> Result<Vec<Element>, ToolkitError> {
    let mut pool = vec![
        kit.k.clone(),
        kit.s.clone(),
        kit.f.clone(),
        kit.id.clone(),
        kit.pair.clone(),
        kit.p0.clone(),
        kit.succ.clone(),
        kit.pred.clone(),
    ];
    for n in 0..3 {
        pool.push(kit.numeral(n)?);
    }
    pool.extend((0..6).map(Nat::small));
    pool.extend_from_slice(extra);
    Ok(pool)
}
