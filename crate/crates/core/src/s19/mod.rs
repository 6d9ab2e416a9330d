//! Kleene's schemata S1–S6, S8 and S9, computed relative to a type-2
//! functional, and the pca `K1^F` they define.
//!
//! Indices use the sequence coding of [`Nat::encode_seq`]. Every index
//! carries its arity:
//!
//! | index            | arity   | meaning                                   |
//! |------------------|---------|-------------------------------------------|
//! | `<1,1>`          | 1       | `n+1`                                     |
//! | `<2,r,m>`        | r       | constant `m`                              |
//! | `<3,r>`          | r       | first argument                            |
//! | `<4,r,g,h>`      | r       | `{g}({h}(n), n)`                          |
//! | `<5,r,g,h>`      | r ≥ 2   | recursion on the first argument           |
//! | `<6,r,k,g>`      | r       | `{g}(n_{k+1}, n_1..n_k, n_{k+2}..n_r)`    |
//! | `<8,r,h>`        | r       | `F(λk.{h}(k, n))`                         |
//! | `<9,k,l>`        | 1+k+l   | `{m}(n_1..n_k)`, `m` the first argument   |
//!
//! Indices are validated eagerly (sub-indices included) without charging
//! fuel; the index called by S9 is validated when it is called.

pub mod build;
pub mod compile;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::nat::Nat;
use crate::oracle::Functional;
use crate::pca::{Element, Eval, Fuel, NoValue, Outcome, Pca};

/// Nesting of clause applications beyond which evaluation is treated as
/// out of resources.
pub const NEST_LIMIT: u32 = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("{0} is not a sequence code")]
    NotSequence(String),
    #[error("unknown schema tag {0}")]
    UnknownTag(String),
    #[error("schema {tag} expects {expected} components, found {found}")]
    Length { tag: u64, expected: usize, found: usize },
    #[error("{0}")]
    Arity(String),
}

/// A validated index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schema {
    Succ,
    Const { arity: usize, value: Nat },
    Proj { arity: usize },
    Comp { arity: usize, g: Box<Schema>, h: Box<Schema> },
    PrimRec { arity: usize, g: Box<Schema>, h: Box<Schema> },
    Perm { arity: usize, k: usize, g: Box<Schema> },
    ApplyF { arity: usize, h: Box<Schema> },
    Invoke { k: usize, l: usize },
}

fn small_usize(n: &Nat, what: &str) -> Result<usize, IndexError> {
    n.as_u64()
        .filter(|&v| v <= u32::MAX as u64)
        .map(|v| v as usize)
        .ok_or_else(|| IndexError::Arity(format!("{what} {n} is too large")))
}

fn positive(n: &Nat, what: &str) -> Result<usize, IndexError> {
    match small_usize(n, what)? {
        0 => Err(IndexError::Arity(format!("{what} must be at least 1"))),
        v => Ok(v),
    }
}

/// Decodes a sequence, insisting that the code is canonical.
pub fn decode(e: &Nat) -> Option<Vec<Nat>> {
    let items = e.decode_seq(16)?;
    (Nat::encode_seq(&items) == *e).then_some(items)
}

pub fn encode(items: &[u64]) -> Nat {
    Nat::encode_seq(&items.iter().map(|&x| Nat::small(x)).collect::<Vec<_>>())
}

impl Schema {
    pub fn parse(e: &Nat) -> Result<Schema, IndexError> {
        let items = decode(e).ok_or_else(|| IndexError::NotSequence(e.to_string()))?;
        let tag = items
            .first()
            .and_then(Nat::as_u64)
            .ok_or_else(|| IndexError::UnknownTag(items.first().map_or("none".into(), |t| t.to_string())))?;
        let want = |n: usize| {
            if items.len() == n {
                Ok(())
            } else {
                Err(IndexError::Length {
                    tag,
                    expected: n,
                    found: items.len(),
                })
            }
        };
        let sub_with_arity = |i: usize, arity: usize| -> Result<Box<Schema>, IndexError> {
            let s = Schema::parse(&items[i])?;
            if s.arity() != arity {
                return Err(IndexError::Arity(format!(
                    "schema {tag} needs a sub-index of arity {arity}, found arity {}",
                    s.arity()
                )));
            }
            Ok(Box::new(s))
        };
        match tag {
            1 => {
                want(2)?;
                if items[1].as_u64() != Some(1) {
                    return Err(IndexError::Arity("successor has arity 1".into()));
                }
                Ok(Schema::Succ)
            }
            2 => {
                want(3)?;
                Ok(Schema::Const {
                    arity: positive(&items[1], "arity")?,
                    value: items[2].clone(),
                })
            }
            3 => {
                want(2)?;
                Ok(Schema::Proj {
                    arity: positive(&items[1], "arity")?,
                })
            }
            4 => {
                want(4)?;
                let arity = positive(&items[1], "arity")?;
                Ok(Schema::Comp {
                    arity,
                    g: sub_with_arity(2, arity + 1)?,
                    h: sub_with_arity(3, arity)?,
                })
            }
            5 => {
                want(4)?;
                let arity = positive(&items[1], "arity")?;
                if arity < 2 {
                    return Err(IndexError::Arity("recursion needs arity at least 2".into()));
                }
                Ok(Schema::PrimRec {
                    arity,
                    g: sub_with_arity(2, arity - 1)?,
                    h: sub_with_arity(3, arity + 1)?,
                })
            }
            6 => {
                want(4)?;
                let arity = positive(&items[1], "arity")?;
                let k = positive(&items[2], "rotation")?;
                if k >= arity {
                    return Err(IndexError::Arity(format!("rotation {k} needs more than {k} arguments")));
                }
                Ok(Schema::Perm {
                    arity,
                    k,
                    g: sub_with_arity(3, arity)?,
                })
            }
            8 => {
                want(3)?;
                let arity = positive(&items[1], "arity")?;
                Ok(Schema::ApplyF {
                    arity,
                    h: sub_with_arity(2, arity + 1)?,
                })
            }
            9 => {
                want(3)?;
                Ok(Schema::Invoke {
                    k: positive(&items[1], "k")?,
                    l: small_usize(&items[2], "l")?,
                })
            }
            other => Err(IndexError::UnknownTag(other.to_string())),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Schema::Succ => 1,
            Schema::Const { arity, .. }
            | Schema::Proj { arity }
            | Schema::Comp { arity, .. }
            | Schema::PrimRec { arity, .. }
            | Schema::Perm { arity, .. }
            | Schema::ApplyF { arity, .. } => *arity,
            Schema::Invoke { k, l } => 1 + k + l,
        }
    }

    pub fn encode(&self) -> Nat {
        let n = |v: usize| Nat::small(v as u64);
        let parts = match self {
            Schema::Succ => vec![n(1), n(1)],
            Schema::Const { arity, value } => vec![n(2), n(*arity), value.clone()],
            Schema::Proj { arity } => vec![n(3), n(*arity)],
            Schema::Comp { arity, g, h } => vec![n(4), n(*arity), g.encode(), h.encode()],
            Schema::PrimRec { arity, g, h } => vec![n(5), n(*arity), g.encode(), h.encode()],
            Schema::Perm { arity, k, g } => vec![n(6), n(*arity), n(*k), g.encode()],
            Schema::ApplyF { arity, h } => vec![n(8), n(*arity), h.encode()],
            Schema::Invoke { k, l } => vec![n(9), n(*k), n(*l)],
        };
        Nat::encode_seq(&parts)
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schema::Succ => write!(f, "<1,1>"),
            Schema::Const { arity, value } => write!(f, "<2,{arity},{value}>"),
            Schema::Proj { arity } => write!(f, "<3,{arity}>"),
            Schema::Comp { arity, g, h } => write!(f, "<4,{arity},{g},{h}>"),
            Schema::PrimRec { arity, g, h } => write!(f, "<5,{arity},{g},{h}>"),
            Schema::Perm { arity, k, g } => write!(f, "<6,{arity},{k},{g}>"),
            Schema::ApplyF { arity, h } => write!(f, "<8,{arity},{h}>"),
            Schema::Invoke { k, l } => write!(f, "<9,{k},{l}>"),
        }
    }
}

/// The interpreter: a functional plus a bound on the nesting of S8.
#[derive(Debug, Clone)]
pub struct S19Machine {
    pub functional: Functional,
    pub depth: u32,
}

impl S19Machine {
    pub fn new(functional: Functional, depth: u32) -> S19Machine {
        S19Machine { functional, depth }
    }

    /// `{e}(args)` charged to `fuel`.
    pub fn apply(&self, e: &Nat, args: &[Nat], fuel: &mut Fuel) -> Eval {
        crate::pca::on_big_stack(|| self.call(e, args, fuel, self.depth, 0))
    }

    fn call(&self, e: &Nat, args: &[Nat], fuel: &mut Fuel, depth: u32, nest: u32) -> Eval {
        let node = Schema::parse(e).map_err(|_| NoValue::Divergent)?;
        if node.arity() != args.len() {
            return Err(NoValue::Divergent);
        }
        self.run(&node, args, fuel, depth, nest)
    }

    fn run(&self, node: &Schema, args: &[Nat], fuel: &mut Fuel, depth: u32, nest: u32) -> Eval {
        if nest > NEST_LIMIT {
            return Err(NoValue::Exhausted);
        }
        fuel.tick()?;
        let nest = nest + 1;
        match node {
            Schema::Succ => fuel.spend(|b| args[0].succ_bounded(b)),
            Schema::Const { value, .. } => Ok(value.clone()),
            Schema::Proj { .. } => Ok(args[0].clone()),
            Schema::Comp { g, h, .. } => {
                let v = self.run(h, args, fuel, depth, nest)?;
                let mut inner = Vec::with_capacity(args.len() + 1);
                inner.push(v);
                inner.extend_from_slice(args);
                self.run(g, &inner, fuel, depth, nest)
            }
            Schema::PrimRec { g, h, .. } => {
                // {m}(y, n) unfolds into y applications of h over {g}(n); the
                // descent is charged one unit per level, then evaluated upwards.
                let rest = &args[1..];
                let mut y = args[0].clone();
                let mut levels: u64 = 0;
                while !y.is_zero() {
                    fuel.tick()?;
                    y = fuel.spend(|b| y.pred_bounded(b))?;
                    levels += 1;
                }
                let mut acc = self.run(g, rest, fuel, depth, nest)?;
                let mut k = Nat::zero();
                let mut inner = Vec::with_capacity(args.len() + 1);
                for _ in 0..levels {
                    inner.clear();
                    inner.push(k.clone());
                    inner.push(acc);
                    inner.extend_from_slice(rest);
                    acc = self.run(h, &inner, fuel, depth, nest)?;
                    k = k.succ();
                }
                Ok(acc)
            }
            Schema::Perm { k, g, .. } => {
                let mut permuted = Vec::with_capacity(args.len());
                permuted.push(args[*k].clone());
                permuted.extend_from_slice(&args[..*k]);
                permuted.extend_from_slice(&args[k + 1..]);
                self.run(g, &permuted, fuel, depth, nest)
            }
            Schema::ApplyF { h, .. } => {
                if depth == 0 {
                    return Err(NoValue::Exhausted);
                }
                let handle = |k: &Element, fuel: &mut Fuel| {
                    let mut inner = Vec::with_capacity(args.len() + 1);
                    inner.push(k.clone());
                    inner.extend_from_slice(args);
                    self.run(h, &inner, fuel, depth - 1, nest)
                };
                self.functional.call(&handle, fuel)
            }
            Schema::Invoke { k, .. } => self.call(&args[0], &args[1..=*k], fuel, depth, nest),
        }
    }
}

/// `{e}(args)` as an [`Outcome`].
pub fn s19_apply(machine: &S19Machine, e: &Nat, args: &[Nat], fuel: u64) -> Outcome {
    machine.apply(e, args, &mut Fuel::new(fuel)).into()
}

/// `K1^F`: the naturals under `e·n = {e}(n)`.
#[derive(Debug, Clone)]
pub struct S19Pca {
    machine: S19Machine,
    k: Nat,
    s: Nat,
}

impl S19Pca {
    pub fn new(functional: Functional, depth: u32) -> S19Pca {
        S19Pca {
            machine: S19Machine::new(functional, depth),
            k: build::s19_k(),
            s: build::s19_s(),
        }
    }

    pub fn machine(&self) -> &S19Machine {
        &self.machine
    }
}

pub fn s19_pca(functional: Functional) -> Arc<S19Pca> {
    Arc::new(S19Pca::new(functional, crate::oracle::DEFAULT_DEPTH))
}

impl Pca for S19Pca {
    fn name(&self) -> String {
        format!("k1^{}", self.machine.functional.name())
    }

    fn apply(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> Eval {
        self.machine.apply(a, std::slice::from_ref(b), fuel)
    }

    fn k(&self) -> Element {
        self.k.clone()
    }

    fn s(&self) -> Element {
        self.s.clone()
    }
}
