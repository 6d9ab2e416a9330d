//! The strict pca `A′` over any pca `A`.
//!
//! Codes are toolkit tuples over `A` headed by a numeral naming a clause:
//!
//! ```text
//! [1̄]·a = [1̄,a]          [1̄,a]·b = a
//! [2̄]·[a,b,c] ≃ a·c·(b·c)                      (in A′)
//! [3̄,e]·a = [3̄,e,a]      [3̄,e,a]·b = [3̄,e,a,b]
//! [3̄,e,a,b]·c ≃ e·[a,b,c]                      (in A′)
//! [4̄]·a = [4̄,a]          [4̄,a]·b ≃ a b          (in A)
//! ```
//!
//! Every other shape diverges. With `k′ = [1̄]` and `s′ = [3̄,[2̄]]`,
//! `s′abc ≃ ac(bc)` holds in both directions.

use std::sync::Arc;

use crate::pca::{on_big_stack, Element, Eval, Fuel, NoValue, Pca};
use crate::toolkit::{Kit, ToolkitError};

/// Nesting of `A′` applications beyond which evaluation counts as exhausted.
pub const STRICT_NEST_LIMIT: u32 = 100_000;

/// Clause tag and length of every advancing code, in matching order.
const SHAPES: [(u64, usize); 8] = [(1, 1), (1, 2), (2, 1), (3, 2), (3, 3), (3, 4), (4, 1), (4, 2)];

pub struct StrictPca {
    kit: Arc<Kit>,
    k: Element,
    s: Element,
    embed: Element,
    /// Without clause 4 the base application is no longer reachable.
    first_three_only: bool,
}

impl std::fmt::Debug for StrictPca {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StrictPca({})", self.name())
    }
}

impl StrictPca {
    pub fn new(kit: Arc<Kit>, first_three_only: bool) -> Result<StrictPca, ToolkitError> {
        let tag = |n: u64| kit.numeral(n);
        let k = kit.tuple(&[tag(1)?])?;
        let s = kit.tuple(&[tag(3)?, kit.tuple(&[tag(2)?])?])?;
        let embed = kit.tuple(&[tag(4)?])?;
        Ok(StrictPca {
            kit,
            k,
            s,
            embed,
            first_three_only,
        })
    }

    pub fn base(&self) -> &Arc<Kit> {
        &self.kit
    }

    /// `[4̄]`, realizing the embedding `A → A′`.
    pub fn embed_realizer(&self) -> Element {
        self.embed.clone()
    }

    /// Builds a code `[taḡ, items…]`.
    pub fn code(&self, tag: u64, items: &[Element]) -> Result<Element, ToolkitError> {
        let mut all = vec![self.kit.numeral(tag)?];
        all.extend_from_slice(items);
        self.kit.tuple(&all)
    }

    /// The tuple items of `x` if it is exactly a tuple of length `len`.
    fn read_tuple(&self, x: &Element, len: usize, fuel: &mut Fuel) -> Result<Option<Vec<Element>>, NoValue> {
        let kit = &self.kit;
        let p = kit.pca();
        let mut chain = p.apply(&kit.p1, x, fuel)?;
        let mut items = Vec::with_capacity(len);
        for _ in 0..len {
            items.push(p.apply(&kit.p0, &chain, fuel)?);
            chain = p.apply(&kit.p1, &chain, fuel)?;
        }
        Ok((kit.tuple_in(&items, fuel)? == *x).then_some(items))
    }

    /// Finds the clause `x` is a code for, trying the length its head
    /// announces first and then every shape in order.
    fn decode(&self, x: &Element, fuel: &mut Fuel) -> Result<Option<(u64, Vec<Element>)>, NoValue> {
        let kit = &self.kit;
        let announced = {
            let len = kit.pca().apply(&kit.p0, x, fuel)?;
            kit.numeral_value(&len, 4, fuel)?
        };
        let mut tried = Vec::new();
        let candidates = SHAPES
            .iter()
            .filter(|(_, l)| Some(*l as u64) == announced)
            .chain(SHAPES.iter());
        for &(tag, len) in candidates {
            if tried.contains(&(tag, len)) {
                continue;
            }
            tried.push((tag, len));
            if let Some(items) = self.read_tuple(x, len, fuel)? {
                if items[0] == kit.numeral_in(tag, fuel)? {
                    return Ok(Some((tag, items)));
                }
            }
        }
        Ok(None)
    }

    fn apply_nested(&self, x: &Element, y: &Element, fuel: &mut Fuel, nest: u32) -> Eval {
        if nest > STRICT_NEST_LIMIT {
            return Err(NoValue::Exhausted);
        }
        fuel.tick()?;
        let kit = &self.kit;
        let Some((tag, items)) = self.decode(x, fuel)? else {
            return Err(NoValue::Divergent);
        };
        let extend = |fuel: &mut Fuel| {
            let mut next = items.clone();
            next.push(y.clone());
            kit.tuple_in(&next, fuel)
        };
        match (tag, items.len()) {
            (1, 1) | (3, 2) | (3, 3) => extend(fuel),
            (1, 2) => Ok(items[1].clone()),
            (2, 1) => {
                let Some(abc) = self.read_tuple(y, 3, fuel)? else {
                    return Err(NoValue::Divergent);
                };
                let (a, b, c) = (&abc[0], &abc[1], &abc[2]);
                let ac = self.apply_nested(a, c, fuel, nest + 1)?;
                let bc = self.apply_nested(b, c, fuel, nest + 1)?;
                self.apply_nested(&ac, &bc, fuel, nest + 1)
            }
            (3, 4) => {
                let abc = kit.tuple_in(&[items[2].clone(), items[3].clone(), y.clone()], fuel)?;
                self.apply_nested(&items[1], &abc, fuel, nest + 1)
            }
            (4, _) if self.first_three_only => Err(NoValue::Divergent),
            (4, 1) => extend(fuel),
            (4, 2) => kit.pca().apply(&items[1], y, fuel),
            _ => Err(NoValue::Divergent),
        }
    }
}

impl Pca for StrictPca {
    fn name(&self) -> String {
        let base = self.kit.pca().name();
        if self.first_three_only {
            format!("strict123:{base}")
        } else {
            format!("strict:{base}")
        }
    }

    fn apply(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> Eval {
        on_big_stack(|| self.apply_nested(a, b, fuel, 0))
    }

    fn k(&self) -> Element {
        self.k.clone()
    }

    fn s(&self) -> Element {
        self.s.clone()
    }

    fn render(&self, e: &Element) -> String {
        self.kit.pca().render(e)
    }
}

/// `A′` for the structure of `kit`, with all four clauses.
pub fn strict_pca(kit: Arc<Kit>) -> Result<StrictPca, ToolkitError> {
    StrictPca::new(kit, false)
}

/// `x·y` in `A′`.
pub fn strict_apply(p: &StrictPca, x: &Element, y: &Element, fuel: u64) -> crate::pca::Outcome {
    p.apply(x, y, &mut Fuel::new(fuel)).into()
}

/// Elements worth sampling in `A′`: the combinators, embedded base
/// elements and a few partial codes.
pub fn sample_pool(p: &StrictPca, base_elements: &[Element]) -> Result<Vec<Element>, ToolkitError> {
    let mut pool = vec![p.k(), p.s(), p.embed_realizer()];
    for e in base_elements {
        pool.push(p.code(4, &[e.clone()])?);
        pool.push(p.code(1, &[e.clone()])?);
    }
    pool.push(p.code(3, &[p.k()])?);
    pool.push(p.code(2, &[])?);
    Ok(pool)
}
