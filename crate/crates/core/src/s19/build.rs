//! Building indices from smaller ones, and the `k`, `s` of `K1^F`.
//!
//! Composition with several inner functions is assembled from S4, which
//! prepends one value at a time; dropping trailing arguments goes through
//! S9 with a constant index.

use crate::nat::Nat;
use crate::toolkit::PRDef;

use super::Schema;

fn seq(parts: Vec<Nat>) -> Nat {
    Nat::encode_seq(&parts)
}

fn n(v: usize) -> Nat {
    Nat::small(v as u64)
}

pub fn succ() -> Nat {
    seq(vec![n(1), n(1)])
}

pub fn konst(arity: usize, value: &Nat) -> Nat {
    seq(vec![n(2), n(arity), value.clone()])
}

/// `x ↦ x_i` for 1-based `i ≤ arity`.
pub fn proj(i: usize, arity: usize) -> Nat {
    assert!(1 <= i && i <= arity, "projection {i} of {arity}");
    let first = seq(vec![n(3), n(arity)]);
    if i == 1 {
        first
    } else {
        rotate(arity, i - 1, &first)
    }
}

/// `<4,r,g,h>`.
pub fn comp1(arity: usize, g: &Nat, h: &Nat) -> Nat {
    seq(vec![n(4), n(arity), g.clone(), h.clone()])
}

pub fn primrec(arity: usize, g: &Nat, h: &Nat) -> Nat {
    seq(vec![n(5), n(arity), g.clone(), h.clone()])
}

pub fn rotate(arity: usize, k: usize, g: &Nat) -> Nat {
    seq(vec![n(6), n(arity), n(k), g.clone()])
}

pub fn apply_f(arity: usize, h: &Nat) -> Nat {
    seq(vec![n(8), n(arity), h.clone()])
}

pub fn invoke(k: usize, l: usize) -> Nat {
    seq(vec![n(9), n(k), n(l)])
}

/// Arity `arity`: `x_i + 1`.
pub fn succ_of(arity: usize, i: usize) -> Nat {
    arrange(&succ(), &[i], arity)
}

/// Arity `k + l`: `g` applied to the first `k` arguments.
pub fn drop_tail(g: &Nat, k: usize, l: usize) -> Nat {
    if l == 0 {
        return g.clone();
    }
    comp1(k + l, &invoke(k, l), &konst(k + l, g))
}

/// Arity `arity`: `f(g_1(x), ..., g_m(x))`, each `g_j` of arity `arity`.
pub fn comp(f: &Nat, gs: &[Nat], arity: usize) -> Nat {
    assert!(!gs.is_empty(), "composition needs an inner function");
    // Built inside out: the innermost stage pushes y_1, the outermost y_m.
    let m = gs.len();
    let mut stage = drop_tail(f, m, arity);
    for j in 0..m {
        // this stage sees (y_{j+2}..y_m, x) and pushes y_{j+1}
        let pushed = m - j - 1;
        let g = lift_over(&gs[j], pushed, arity);
        stage = comp1(pushed + arity, &stage, &g);
    }
    stage
}

/// Arity `skip + arity`: `g` applied to the arguments after the first `skip`.
fn lift_over(g: &Nat, skip: usize, arity: usize) -> Nat {
    if skip == 0 {
        return g.clone();
    }
    let total = skip + arity;
    let sources: Vec<usize> = (skip + 1..=total).collect();
    arrange(g, &sources, total)
}

/// Arity `arity`: `g(x_{s_1}, ..., x_{s_p})`.
pub fn arrange(g: &Nat, sources: &[usize], arity: usize) -> Nat {
    let p = sources.len();
    let mut stage = drop_tail(g, p, arity);
    for j in 0..p {
        let pushed = p - j - 1;
        stage = comp1(pushed + arity, &stage, &proj(sources[j] + pushed, pushed + arity));
    }
    stage
}

/// Compiles a primitive recursive definition to schemata S1–S6 (S9 only to
/// discard arguments). Minimization and nullary functions have no
/// counterpart and are rejected.
pub fn from_prdef(d: &PRDef) -> Result<Nat, String> {
    let arity = d.arity()?;
    if arity == 0 {
        return Err("nullary functions have no index".into());
    }
    Ok(match d {
        PRDef::Zero(k) => konst(*k, &Nat::zero()),
        PRDef::Succ => succ(),
        PRDef::Proj(i, k) => proj(*i, *k),
        PRDef::Comp(f, gs) => {
            let f = from_prdef(f)?;
            let gs = gs.iter().map(from_prdef).collect::<Result<Vec<_>, _>>()?;
            comp(&f, &gs, arity)
        }
        PRDef::PrimRec(base, step) => primrec(arity, &from_prdef(base)?, &from_prdef(step)?),
        PRDef::Mu(_) => return Err("minimization is not primitive recursive".into()),
    })
}

/// `(y, x) ↦ y + x`.
pub fn add_def() -> PRDef {
    PRDef::PrimRec(
        Box::new(PRDef::Proj(1, 1)),
        Box::new(PRDef::Comp(Box::new(PRDef::Succ), vec![PRDef::Proj(2, 3)])),
    )
}

/// `n ↦ n(n+1)/2`.
pub fn tri_def() -> PRDef {
    let step = PRDef::Comp(
        Box::new(add_def()),
        vec![PRDef::Comp(Box::new(PRDef::Succ), vec![PRDef::Proj(1, 3)]), PRDef::Proj(2, 3)],
    );
    let with_dummy = PRDef::PrimRec(Box::new(PRDef::Zero(1)), Box::new(step));
    PRDef::Comp(Box::new(with_dummy), vec![PRDef::Proj(1, 1), PRDef::Proj(1, 1)])
}

/// Cantor pairing `(x, y) ↦ (x+y)(x+y+1)/2 + y`, as used by the index coding.
pub fn pair_def() -> PRDef {
    let sum = PRDef::Comp(Box::new(add_def()), vec![PRDef::Proj(1, 2), PRDef::Proj(2, 2)]);
    PRDef::Comp(
        Box::new(add_def()),
        vec![PRDef::Comp(Box::new(tri_def()), vec![sum]), PRDef::Proj(2, 2)],
    )
}

pub fn pair_index() -> Nat {
    from_prdef(&pair_def()).expect("pairing is primitive recursive")
}

/// Describes an index whose parts may depend on the arguments.
#[derive(Debug, Clone)]
pub enum Template {
    Lit(Nat),
    /// The `i`-th argument, 1-based.
    Arg(usize),
    Seq(Vec<Template>),
}

impl Template {
    fn lit(v: usize) -> Template {
        Template::Lit(n(v))
    }

    /// The code denoted for the given arguments.
    pub fn eval(&self, args: &[Nat]) -> Nat {
        match self {
            Template::Lit(v) => v.clone(),
            Template::Arg(i) => args[i - 1].clone(),
            Template::Seq(parts) => Nat::encode_seq(&parts.iter().map(|p| p.eval(args)).collect::<Vec<_>>()),
        }
    }

    /// An index of the given arity computing the code this template denotes.
    pub fn compile(&self, arity: usize, pair: &Nat) -> Nat {
        match self {
            Template::Lit(v) => konst(arity, v),
            Template::Arg(i) => proj(*i, arity),
            Template::Seq(parts) => {
                if parts.iter().all(|p| matches!(p, Template::Lit(_))) {
                    let lits: Vec<Nat> = parts
                        .iter()
                        .map(|p| match p {
                            Template::Lit(v) => v.clone(),
                            _ => unreachable!(),
                        })
                        .collect();
                    return konst(arity, &Nat::encode_seq(&lits));
                }
                let mut body = konst(arity, &Nat::zero());
                for part in parts.iter().rev() {
                    body = comp(pair, &[part.compile(arity, pair), body], arity);
                }
                comp(pair, &[konst(arity, &n(parts.len())), body], arity)
            }
        }
    }
}

/// `k` with `k·a = <2,1,a>`, so that `k·a·b = a`.
pub fn s19_k() -> Nat {
    let pair = pair_index();
    Template::Seq(vec![Template::lit(2), Template::lit(1), Template::Arg(1)]).compile(1, &pair)
}

/// `{a}(c)` with `a` fixed: `<4,1,<9,1,0>,<2,1,a>>`.
fn eval_at(a: Template) -> Template {
    use Template::*;
    Seq(vec![
        Template::lit(4),
        Template::lit(1),
        Lit(invoke(1, 0)),
        Seq(vec![Template::lit(2), Template::lit(1), a]),
    ])
}

/// The index of `c ↦ {{a}(c)}({b}(c))`.
fn sab_template(a: Template, b: Template) -> Template {
    use Template::*;
    // On (y, c): rotate to (c, y), then <9,1,1> on (a, c, y) gives {a}(c).
    let a_of_c = Seq(vec![
        Template::lit(6),
        Template::lit(2),
        Template::lit(1),
        Seq(vec![
            Template::lit(4),
            Template::lit(2),
            Lit(invoke(1, 1)),
            Seq(vec![Template::lit(2), Template::lit(2), a]),
        ]),
    ]);
    // On (y, c) with y = {b}(c): <9,1,1> on ({a}(c), y, c) gives {{a}(c)}(y).
    let apply = Seq(vec![Template::lit(4), Template::lit(2), Lit(invoke(1, 1)), a_of_c]);
    Seq(vec![Template::lit(4), Template::lit(1), apply, eval_at(b)])
}

/// The index of `(a, b) ↦ code of c ↦ {{a}(c)}({b}(c))`.
pub fn sab_builder() -> Nat {
    sab_template(Template::Arg(1), Template::Arg(2)).compile(2, &pair_index())
}

/// The value of `sab_builder()` at `(a, b)`, computed directly.
pub fn sab_code(a: &Nat, b: &Nat) -> Nat {
    sab_template(Template::Arg(1), Template::Arg(2)).eval(&[a.clone(), b.clone()])
}

/// `s` with `s·a = <4,1,T,<2,1,a>>` for `T = sab_builder()`, so that
/// `s·a·b = T(a, b)` and `s·a·b·c ≃ {{a}(c)}({b}(c))`.
pub fn s19_s() -> Nat {
    let pair = pair_index();
    Template::Seq(vec![
        Template::lit(4),
        Template::lit(1),
        Template::Lit(sab_builder()),
        Template::Seq(vec![Template::lit(2), Template::lit(1), Template::Arg(1)]),
    ])
    .compile(1, &pair)
}

/// Parsed form of an index built here; panics on malformed input, which
/// would be a bug in this module.
pub fn schema(e: &Nat) -> Schema {
    Schema::parse(e).expect("constructed index is well formed")
}
