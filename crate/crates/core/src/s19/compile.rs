//! Compiling indices to K1 programs that run as dialogues against a
//! functional, so that `c(e) ·^F b ≃ {e}(args)`.
//!
//! A compiled index is a *handler* `h args rest k`: `args` is a chain of
//! pairs `p n1 (p n2 (… (p nr 0)))`, `rest` is the tuple of oracle answers
//! not yet consumed, and `k value rest′` is the continuation. An S8 node
//! with no answer left abandons the continuation and returns the query
//! `p F v` as the result of the whole program, where `v` is a dialogue
//! program for `k ↦ {h}(k, n)`. Divergence applies the inert code
//! `pair(10, 0)`.
//!
//! S9 decodes its index at run time with raw arithmetic (unpairing by
//! linear search), so it is only practical for small indices.

use std::fmt;
use std::sync::Arc;

use crate::k1::{self, pair_nat, K1};
use crate::nat::Nat;
use crate::oracle::{apply_functional, DialogueKit, Functional};
use crate::pca::{Element, Eval, Fuel, NoValue, PcaRef, Term};
use crate::toolkit::{abstract_var, ap, c, v, Kit, ToolkitError};

use super::{IndexError, S19Machine, Schema};

fn app(f: Term, args: Vec<Term>) -> Term {
    args.into_iter().fold(f, Term::app)
}

fn raw(n: u64) -> Term {
    c(&Nat::small(n))
}

/// `(⟨x⟩ body) value`
fn let_in(kit: &Kit, x: &str, value: Term, body: Term) -> Term {
    Term::app(abstract_var(&kit.k, &kit.s, &body, x), value)
}

/// Handler constructors and the run-time decoder, built once.
pub struct S19Compiler {
    dk: Arc<DialogueKit>,
    diverge: Element,
    finish: Element,
    h_div: Element,
    h_succ: Element,
    h_const: Element,
    h_proj: Element,
    h_comp: Element,
    h_rec: Element,
    h_perm: Element,
    h_apply: Element,
    h_invoke: Element,
    h_drop: Element,
    entry_unary: Element,
    entry_tuple: Element,
    decode: Element,
}

impl fmt::Debug for S19Compiler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("S19Compiler")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("malformed index: {0}")]
    Index(#[from] IndexError),
    #[error(transparent)]
    Toolkit(#[from] ToolkitError),
}

impl S19Compiler {
    pub fn new() -> Result<S19Compiler, ToolkitError> {
        let base: PcaRef = Arc::new(K1);
        let dk = DialogueKit::new(Kit::new(base)?)?;
        let kit = dk.kit.clone();
        let kit = &*kit;

        let p = |a: Term, b: Term| ap(c(&kit.pair), [a, b]);
        let p0 = |a: Term| ap(c(&kit.p0), [a]);
        let p1 = |a: Term| ap(c(&kit.p1), [a]);
        let succ = |a: Term| ap(c(&k1::succ_code()), [a]);
        let pred = |a: Term| ap(c(&k1::pred_code()), [a]);
        // raw zero test as a boolean
        let zr = |a: Term| ap(c(&k1::ifz_code()), [a, c(&kit.t), c(&kit.f)]);
        let head = |d: Term| p0(p1(d));
        let tail = |d: Term| ap(c(&kit.tail), [d]);
        let fix = |body: &Term, vars: &[&str]| -> Result<Element, ToolkitError> {
            kit.fixpoint(&kit.abstract_vars(body, vars)?)
        };

        let diverge = pair_nat(10, 0);
        let stuck = |a: Term| ap(c(&diverge), [a]);
        let finish = kit.abstract_vars(&p(c(&kit.t), v("z")), &["z", "r"])?;
        let handler = |body: Term, extra: &[&str]| {
            let mut vars: Vec<&str> = extra.to_vec();
            vars.extend(["args", "rest", "k"]);
            kit.abstract_vars(&body, &vars)
        };
        let ret = |value: Term| app(v("k"), vec![value, v("rest")]);

        let h_div = handler(stuck(v("args")), &[])?;
        let h_succ = handler(ret(succ(p0(v("args")))), &[])?;
        let h_const = handler(ret(v("m")), &["m"])?;
        let h_proj = handler(ret(p0(v("args"))), &[])?;

        let after_h = kit.abstract_vars(
            &app(v("g"), vec![p(v("val"), v("args")), v("r"), v("k")]),
            &["g", "args", "k", "val", "r"],
        )?;
        let h_comp = handler(
            app(v("h"), vec![v("args"), v("rest"), app(c(&after_h), vec![v("g"), v("args"), v("k")])]),
            &["g", "h"],
        )?;

        let after_rec = kit.abstract_vars(
            &app(v("h"), vec![p(v("y"), p(v("val"), v("n"))), v("r"), v("k")]),
            &["h", "y", "n", "k", "val", "r"],
        )?;
        let y = pred(p0(v("args")));
        let h_rec = fix(
            &kit.ifte(
                zr(p0(v("args"))),
                app(v("g"), vec![p1(v("args")), v("rest"), v("k")]),
                app(
                    v("self"),
                    vec![
                        v("g"),
                        v("h"),
                        p(y.clone(), p1(v("args"))),
                        v("rest"),
                        app(c(&after_rec), vec![v("h"), y, p1(v("args")), v("k")]),
                    ],
                ),
            ),
            &["self", "g", "h", "args", "rest", "k"],
        )?;

        // rotate: (n1..nk, n_{k+1}, …) ↦ (n_{k+1}, n1..nk, …)
        let rotate = fix(
            &kit.ifte(
                zr(v("kk")),
                v("args"),
                let_in(
                    kit,
                    "r",
                    app(v("self"), vec![pred(v("kk")), p1(v("args"))]),
                    p(p0(v("r")), p(p0(v("args")), p1(v("r")))),
                ),
            ),
            &["self", "kk", "args"],
        )?;
        let h_perm = handler(
            app(v("g"), vec![app(c(&rotate), vec![v("kk"), v("args")]), v("rest"), v("k")]),
            &["kk", "g"],
        )?;

        let query_program = kit.abstract_vars(
            &app(v("h"), vec![p(head(v("d")), v("args")), tail(v("d")), c(&finish)]),
            &["h", "args", "d"],
        )?;
        let h_apply = handler(
            kit.ifte(
                ap(c(&kit.iszero), [p0(v("rest"))]),
                p(c(&kit.f), app(c(&query_program), vec![v("h"), v("args")])),
                app(v("k"), vec![head(v("rest")), tail(v("rest"))]),
            ),
            &["h"],
        )?;

        let take = fix(
            &kit.ifte(
                zr(v("kk")),
                raw(0),
                p(p0(v("c")), app(v("self"), vec![pred(v("kk")), p1(v("c"))])),
            ),
            &["self", "kk", "c"],
        )?;
        let h_drop = handler(
            app(v("g"), vec![app(c(&take), vec![v("kk"), v("args")]), v("rest"), v("k")]),
            &["kk", "g"],
        )?;

        // raw arithmetic for the decoder
        let le = fix(
            &kit.ifte(
                zr(v("x")),
                c(&kit.t),
                kit.ifte(zr(v("y")), c(&kit.f), app(v("self"), vec![pred(v("x")), pred(v("y"))])),
            ),
            &["self", "x", "y"],
        )?;
        let eqr = fix(
            &kit.ifte(
                zr(v("x")),
                zr(v("y")),
                kit.ifte(zr(v("y")), c(&kit.f), app(v("self"), vec![pred(v("x")), pred(v("y"))])),
            ),
            &["self", "x", "y"],
        )?;
        let sub = fix(
            &kit.ifte(zr(v("y")), v("x"), app(v("self"), vec![pred(v("x")), pred(v("y"))])),
            &["self", "x", "y"],
        )?;
        let add = fix(
            &kit.ifte(zr(v("y")), v("x"), app(v("self"), vec![succ(v("x")), pred(v("y"))])),
            &["self", "x", "y"],
        )?;
        let walk = fix(
            &kit.ifte(
                app(c(&le), vec![v("r"), v("d")]),
                p(app(c(&sub), vec![v("d"), v("r")]), v("r")),
                app(v("self"), vec![app(c(&sub), vec![v("r"), succ(v("d"))]), succ(v("d"))]),
            ),
            &["self", "r", "d"],
        )?;
        let unpair = kit.abstract_vars(&app(c(&walk), vec![v("n"), raw(0)]), &["n"])?;
        // The decoder is split into small closed combinators; bracket
        // abstraction over one large body would grow exponentially.
        let fail = || p(c(&kit.f), raw(0));
        let close = |body: Term, vars: &[&str]| kit.abstract_vars(&body, vars);
        let call = |f: &Element, args: Vec<Term>| app(c(f), args);

        let items_end = close(kit.ifte(zr(v("b")), p(c(&kit.t), raw(0)), fail()), &["b"])?;
        let items_cons = close(
            kit.ifte(p0(v("tl")), p(c(&kit.t), p(v("x"), p1(v("tl")))), fail()),
            &["x", "tl"],
        )?;
        let items_step = close(
            call(&items_cons, vec![p0(v("ub")), app(v("e"), vec![pred(v("len")), p1(v("ub"))])]),
            &["e", "len", "ub"],
        )?;
        let items = fix(
            &kit.ifte(
                zr(v("len")),
                call(&items_end, vec![v("body")]),
                call(&items_step, vec![v("self"), v("len"), call(&unpair, vec![v("body")])]),
            ),
            &["self", "len", "body"],
        )?;

        // `valid d want`: `d` decoded successfully with arity `want`
        let valid = close(
            kit.ifte(p0(v("d")), app(c(&eqr), vec![p0(p1(v("d"))), v("want")]), c(&kit.f)),
            &["d", "want"],
        )?;
        let handler_of = |x: Term| p1(p1(x));

        let invoke_checked = close(
            kit.ifte(
                call(&valid, vec![v("dm"), v("kk")]),
                app(
                    handler_of(v("dm")),
                    vec![call(&take, vec![v("kk"), p1(v("args"))]), v("rest"), v("k")],
                ),
                stuck(v("args")),
            ),
            &["dm", "kk", "args", "rest", "k"],
        )?;
        let invoke_with = close(
            call(&invoke_checked, vec![app(v("dec"), vec![p0(v("args"))]), v("kk"), v("args"), v("rest"), v("k")]),
            &["dec", "kk", "args", "rest", "k"],
        )?;

        let and = |a: Term, b: Term| kit.ifte(a, b, c(&kit.f));
        let eqc = |x: Term, n: u64| app(c(&eqr), vec![x, raw(n)]);
        let pos = |x: Term| kit.ifte(zr(x), c(&kit.f), c(&kit.t));
        let item = |i: usize| {
            let mut t = v("xs");
            for _ in 0..i {
                t = p1(t);
            }
            p0(t)
        };
        let ok = |arity: Term, h: Term| p(c(&kit.t), p(arity, h));
        let len = || v("len");
        let r = || item(1);
        let dec = |i: usize| app(v("dec"), vec![item(i)]);

        // one sub-index: `⟨d r x⟩ if valid d want then ok(r, make …) else fail`
        let one_sub = |want: Term, make: Term| {
            close(kit.ifte(call(&valid, vec![v("d"), want]), ok(v("r"), make), fail()), &["d", "r", "x"])
        };
        let two_subs = |want_g: Term, want_h: Term, ctor: &Element| {
            close(
                kit.ifte(
                    and(call(&valid, vec![v("dg"), want_g]), call(&valid, vec![v("dh"), want_h])),
                    ok(v("r"), call(ctor, vec![handler_of(v("dg")), handler_of(v("dh"))])),
                    fail(),
                ),
                &["dg", "dh", "r"],
            )
        };
        let comp_subs = two_subs(succ(v("r")), v("r"), &h_comp)?;
        let rec_subs = two_subs(pred(v("r")), succ(v("r")), &h_rec)?;
        let perm_sub = one_sub(v("r"), call(&h_perm, vec![v("x"), handler_of(v("d"))]))?;
        let apply_sub = one_sub(succ(v("r")), call(&h_apply, vec![handler_of(v("d"))]))?;

        let cases: Vec<(u64, Term, Term)> = vec![
            (1, and(eqc(len(), 2), eqc(r(), 1)), ok(raw(1), c(&h_succ))),
            (2, and(eqc(len(), 3), pos(r())), ok(r(), call(&h_const, vec![item(2)]))),
            (3, and(eqc(len(), 2), pos(r())), ok(r(), c(&h_proj))),
            (4, and(eqc(len(), 4), pos(r())), call(&comp_subs, vec![dec(2), dec(3), r()])),
            (
                5,
                and(eqc(len(), 4), and(pos(r()), pos(pred(r())))),
                call(&rec_subs, vec![dec(2), dec(3), r()]),
            ),
            (
                6,
                and(eqc(len(), 4), and(pos(item(2)), app(c(&le), vec![succ(item(2)), r()]))),
                call(&perm_sub, vec![dec(3), r(), item(2)]),
            ),
            (8, and(eqc(len(), 3), pos(r())), call(&apply_sub, vec![dec(2), r(), raw(0)])),
            (
                9,
                and(eqc(len(), 3), pos(r())),
                ok(succ(app(c(&add), vec![r(), item(2)])), call(&invoke_with, vec![v("dec"), r()])),
            ),
        ];
        let vars = ["dec", "len", "xs"];
        let mut dispatch = close(fail(), &vars)?;
        for (tag, guard, result) in cases.into_iter().rev() {
            let case = close(kit.ifte(guard, result, fail()), &vars)?;
            let here = |f: &Element| call(f, vec![v("dec"), v("len"), v("xs")]);
            dispatch = close(kit.ifte(eqc(item(0), tag), here(&case), here(&dispatch)), &vars)?;
        }
        let with_items = close(
            kit.ifte(p0(v("it")), call(&dispatch, vec![v("dec"), v("len"), p1(v("it"))]), fail()),
            &["dec", "len", "it"],
        )?;
        let with_length = close(
            kit.ifte(
                app(c(&le), vec![p0(v("lb")), raw(16)]),
                call(&with_items, vec![v("dec"), p0(v("lb")), call(&items, vec![p0(v("lb")), p1(v("lb"))])]),
                fail(),
            ),
            &["dec", "lb"],
        )?;
        let decode_elem = fix(
            &call(&with_length, vec![v("dec"), call(&unpair, vec![v("m")])]),
            &["dec", "m"],
        )?;
        let h_invoke = kit
            .call(&invoke_with, &[decode_elem.clone()], &mut Fuel::new(crate::toolkit::BUILD_FUEL))
            .map_err(|e| ToolkitError::NoDenotation("invoke".into(), e))?;

        let entry_unary = kit.abstract_vars(
            &app(v("h"), vec![p(head(v("d")), raw(0)), tail(v("d")), c(&finish)]),
            &["h", "d"],
        )?;
        let entry_tuple = kit.abstract_vars(
            &kit.ifte(
                ap(c(&kit.eq_num), [p0(head(v("d"))), v("ar")]),
                app(v("h"), vec![p1(head(v("d"))), tail(v("d")), c(&finish)]),
                stuck(v("d")),
            ),
            &["h", "ar", "d"],
        )?;

        Ok(S19Compiler {
            dk,
            diverge,
            finish,
            h_div,
            h_succ,
            h_const,
            h_proj,
            h_comp,
            h_rec,
            h_perm,
            h_apply,
            h_invoke,
            h_drop,
            entry_unary,
            entry_tuple,
            decode: decode_elem,
        })
    }
}

impl S19Compiler {
    pub fn dialogue_kit(&self) -> &Arc<DialogueKit> {
        &self.dk
    }

    fn build(&self, f: &Element, args: &[Element]) -> Element {
        self.dk
            .kit
            .call(f, args, &mut Fuel::new(crate::toolkit::BUILD_FUEL))
            .expect("handler constructors are total")
    }

    /// The handler for a validated index.
    pub fn handler(&self, node: &Schema) -> Element {
        let n = |x: usize| Nat::small(x as u64);
        match node {
            Schema::Succ => self.h_succ.clone(),
            Schema::Const { value, .. } => self.build(&self.h_const, &[value.clone()]),
            Schema::Proj { .. } => self.h_proj.clone(),
            Schema::Comp { arity, g, h } => {
                // `<4,k+l,<9,k,l>,<2,k+l,m>>` runs `m` on the first k arguments;
                // with `m` known it is compiled directly.
                if let (Schema::Invoke { k, l }, Schema::Const { value, .. }) = (&**g, &**h) {
                    if k + l == *arity {
                        return match Schema::parse(value) {
                            Ok(m) if m.arity() == *k => self.build(&self.h_drop, &[n(*k), self.handler(&m)]),
                            _ => self.h_div.clone(),
                        };
                    }
                }
                self.build(&self.h_comp, &[self.handler(g), self.handler(h)])
            }
            Schema::PrimRec { g, h, .. } => self.build(&self.h_rec, &[self.handler(g), self.handler(h)]),
            Schema::Perm { k, g, .. } => self.build(&self.h_perm, &[n(*k), self.handler(g)]),
            Schema::ApplyF { h, .. } => self.build(&self.h_apply, &[self.handler(h)]),
            Schema::Invoke { k, .. } => self.build(&self.h_invoke, &[n(*k)]),
        }
    }

    /// A dialogue program `c` with `c ·^F b ≃ {e}(args)`, where `b` is the
    /// argument itself for unary `e` and [`S19Compiler::pack`] of the
    /// arguments otherwise.
    pub fn compile(&self, e: &Nat) -> Result<Element, CompileError> {
        let node = Schema::parse(e)?;
        let h = self.handler(&node);
        Ok(if node.arity() == 1 {
            self.build(&self.entry_unary, &[h])
        } else {
            let ar = self.dk.kit.numeral(node.arity() as u64)?;
            self.build(&self.entry_tuple, &[h, ar])
        })
    }

    /// The input expected by compiled programs of arity `args.len()`.
    pub fn pack(&self, args: &[Nat]) -> Result<Element, ToolkitError> {
        match args {
            [single] => Ok(single.clone()),
            _ => self.dk.kit.tuple(args),
        }
    }

    /// Runs the index decoder on `m`: `Some((arity, handler))` if valid.
    pub fn decode_at_runtime(&self, m: &Nat, fuel: &mut Fuel) -> Result<Option<(Nat, Element)>, NoValue> {
        let kit = &self.dk.kit;
        let r = kit.call(&self.decode, &[m.clone()], fuel)?;
        let flag = kit.call(&kit.p0, &[r.clone()], fuel)?;
        if flag != kit.t {
            return Ok(None);
        }
        let body = kit.call(&kit.p1, &[r], fuel)?;
        let arity = kit.call(&kit.p0, &[body.clone()], fuel)?;
        let h = kit.call(&kit.p1, &[body], fuel)?;
        Ok(Some((arity, h)))
    }

    /// Element whose every application diverges.
    pub fn diverging(&self) -> Element {
        self.diverge.clone()
    }

    pub fn finish(&self) -> Element {
        self.finish.clone()
    }
}

/// Compiles with a freshly built [`S19Compiler`].
pub fn compile_s19_to_k1f(e: &Nat) -> Result<Element, CompileError> {
    S19Compiler::new()?.compile(e)
}

/// Outcome counts of comparing a K1 dialogue program with an index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivReport {
    pub agreements: usize,
    pub disagreements: Vec<(Nat, Eval, Eval)>,
    pub undecided: Vec<Nat>,
}

impl EquivReport {
    pub fn total(&self) -> usize {
        self.agreements + self.disagreements.len() + self.undecided.len()
    }

    pub fn undecided_rate(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.undecided.len() as f64 / t as f64,
        }
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }
}

impl fmt::Display for EquivReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |e: &Eval| match e {
            Ok(v) => format!("VALUE {v}"),
            Err(NoValue::Exhausted) => "EXHAUSTED".into(),
            Err(NoValue::Divergent) => "DIVERGENT".into(),
        };
        for (n, a, b) in &self.disagreements {
            writeln!(f, "FAIL {n} program {} index {}", show(a), show(b))?;
        }
        for n in &self.undecided {
            writeln!(f, "UNDECIDED {n}")?;
        }
        write!(
            f,
            "{} agree, {} disagree, {} undecided",
            self.agreements,
            self.disagreements.len(),
            self.undecided.len()
        )
    }
}

/// Compares `a ·^F n` with `{e}(n)` for each sample. A pair where either side
/// ran out of fuel, with the other not already refuting it, is undecided.
pub fn check_extensional_equiv(
    dk: &DialogueKit,
    a: &Element,
    e: &Nat,
    functional: &Functional,
    samples: &[Nat],
    fuel: u64,
    depth: u32,
) -> EquivReport {
    let machine = S19Machine::new(functional.clone(), depth);
    let mut report = EquivReport::default();
    for n in samples {
        let program = apply_functional(dk, functional, a, n, &mut Fuel::new(fuel), depth).outcome;
        let index = machine.apply(e, std::slice::from_ref(n), &mut Fuel::new(fuel));
        match (&program, &index) {
            (Ok(x), Ok(y)) if x == y => report.agreements += 1,
            (Err(NoValue::Divergent), Err(NoValue::Divergent)) => report.agreements += 1,
            (Err(NoValue::Exhausted), _) | (_, Err(NoValue::Exhausted)) => report.undecided.push(n.clone()),
            _ => report.disagreements.push((n.clone(), program, index)),
        }
    }
    report
}
