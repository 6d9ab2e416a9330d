//! Structure selectors and the constants their terms may name.
//!
//! ```text
//! sel ::= base suffix*
//! base ::= trivial | k1 | strict:sel | strict123:sel | k1^functional
//! suffix ::= [oracle] | {functional}
//! ```

use std::sync::{Arc, OnceLock};

use pca_core::k1::{self, K1};
use pca_core::oracle::{DialogueKit, Functional, FunctionalPca, OracleFn, OraclePca};
use pca_core::pca::Trivial;
use pca_core::s19::S19Pca;
use pca_core::strictify::StrictPca;
use pca_core::toolkit::{abstract_term, ap, v, Kit};
use pca_core::{Element, Pca, PcaRef, Term};

pub enum Kind {
    Trivial,
    K1,
    Strict(Arc<StrictPca>),
    Oracle(Arc<OraclePca>),
    Functional(Arc<FunctionalPca>),
    Kleene,
}

pub struct Structure {
    pub pca: PcaRef,
    pub kind: Kind,
    kit: OnceLock<Result<Arc<Kit>, String>>,
}

impl Structure {
    fn new(pca: PcaRef, kind: Kind) -> Structure {
        Structure {
            pca,
            kind,
            kit: OnceLock::new(),
        }
    }

    pub fn kit(&self) -> Result<Arc<Kit>, String> {
        self.kit
            .get_or_init(|| Kit::new(self.pca.clone()).map_err(|e| e.to_string()))
            .clone()
    }

    /// The dialogue machinery of the base, for relativized structures.
    pub fn dialogues(&self) -> Option<&Arc<DialogueKit>> {
        match &self.kind {
            Kind::Oracle(p) => Some(p.dialogue_kit()),
            Kind::Functional(p) => Some(p.dialogue_kit()),
            _ => None,
        }
    }

    /// Element named `name`, if any.
    pub fn lookup(&self, name: &str) -> Result<Option<Element>, String> {
        let p = self.pca.as_ref();
        match name {
            "K" => return Ok(Some(p.k())),
            "S" => return Ok(Some(p.s())),
            "SUCC" | "PRED" | "IFZ" if matches!(self.kind, Kind::K1) => {
                return Ok(k1::primitive(name));
            }
            "QUERY" => return Ok(self.dialogues().map(|dk| dk.query.clone())),
            _ => {}
        }
        if let Some(digits) = name.strip_prefix('N') {
            if let Ok(n) = digits.parse::<u64>() {
                return self.kit()?.numeral(n).map(Some).map_err(|e| e.to_string());
            }
        }
        let needs_kit = [
            "I", "T", "F", "P", "P0", "P1", "NSUCC", "NPRED", "ISZERO", "EQ", "ADD", "MUL", "MONUS", "LESS", "FIX",
        ];
        if !needs_kit.contains(&name) {
            return Ok(None);
        }
        let kit = self.kit()?;
        Ok(Some(match name {
            "I" => kit.id.clone(),
            "T" => kit.t.clone(),
            "F" => kit.f.clone(),
            "P" => kit.pair.clone(),
            "P0" => kit.p0.clone(),
            "P1" => kit.p1.clone(),
            "NSUCC" => kit.succ.clone(),
            "NPRED" => kit.pred.clone(),
            "ISZERO" => kit.iszero.clone(),
            "EQ" => kit.eq_num.clone(),
            "ADD" => kit.add.clone(),
            "MUL" => kit.mul.clone(),
            "MONUS" => kit.monus.clone(),
            "LESS" => kit.less.clone(),
            _ => fix_combinator(p)?,
        }))
    }
}

/// `⟨f⟩ W W` with `W = ⟨x y⟩ f (x x) y`.
fn fix_combinator(p: &dyn Pca) -> Result<Element, String> {
    let w = || abstract_term(p, &ap(v("f"), [ap(v("x"), [v("x")]), v("y")]), &["x", "y"]);
    let body = Term::app(w(), w());
    let t = abstract_term(p, &body, &["f"]);
    pca_core::pca::eval_term(p, &t, 1 << 24)
        .map_err(|e| e.to_string())?
        .value()
        .cloned()
        .ok_or_else(|| "fixpoint combinator has no value".to_string())
}

/// Names available to base-level terms of `oracle run` and `functional run`.
pub fn dialogue_names(dk: &DialogueKit, name: &str) -> Option<Element> {
    match name {
        "QUERY" => Some(dk.query.clone()),
        "LIFT" => Some(dk.lift.clone()),
        "KF" => Some(dk.k.clone()),
        "SF" => Some(dk.s.clone()),
        "APPLY" => dk.application_realizer().ok(),
        _ => None,
    }
}

pub fn functional_by_name(name: &str) -> Result<Functional, String> {
    Functional::by_name(name).ok_or_else(|| format!("unknown functional `{name}` (try at_zero, self_apply, bounded_E(n))"))
}

pub fn oracle_by_name(name: &str) -> Result<OracleFn, String> {
    OracleFn::by_name(name)
        .ok_or_else(|| format!("unknown oracle `{name}` (try {})", OracleFn::builtin_names().join(", ")))
}

fn dialogue_kit_over(pca: &PcaRef) -> Result<Arc<DialogueKit>, String> {
    let kit = Kit::new(pca.clone()).map_err(|e| e.to_string())?;
    DialogueKit::new(kit).map_err(|e| e.to_string())
}

/// Parses a selector.
pub fn select(text: &str, depth: u32) -> Result<Structure, String> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("strict:").or_else(|| text.strip_prefix("strict123:")) {
        let only_three = text.starts_with("strict123:");
        let base = select(rest, depth)?;
        let kit = base.kit()?;
        let p = Arc::new(StrictPca::new(kit, only_three).map_err(|e| e.to_string())?);
        return Ok(Structure::new(p.clone(), Kind::Strict(p)));
    }
    // split off trailing suffixes
    let mut end = text.len();
    let mut suffixes = Vec::new();
    while end > 0 {
        let close = text[..end].chars().last().unwrap();
        let open = match close {
            ']' => '[',
            '}' => '{',
            _ => break,
        };
        let start = matching_open(&text[..end], open, close).ok_or_else(|| format!("unbalanced `{close}` in `{text}`"))?;
        suffixes.push((open, text[start + 1..end - 1].to_string()));
        end = start;
    }
    suffixes.reverse();
    let base = &text[..end];
    let mut current = match base {
        "trivial" => Structure::new(Arc::new(Trivial), Kind::Trivial),
        "k1" => Structure::new(Arc::new(K1), Kind::K1),
        _ => {
            if let Some(name) = base.strip_prefix("k1^") {
                let p = Arc::new(S19Pca::new(functional_by_name(name)?, depth));
                Structure::new(p, Kind::Kleene)
            } else {
                return Err(format!(
                    "unknown structure `{base}` (try trivial, k1, strict:<sel>, strict123:<sel>, k1^<functional>, <sel>[<oracle>], <sel>{{<functional>}})"
                ));
            }
        }
    };
    for (kind, name) in suffixes {
        let dk = dialogue_kit_over(&current.pca)?;
        current = if kind == '[' {
            let p = Arc::new(OraclePca::new(dk, oracle_by_name(&name)?));
            Structure::new(p.clone(), Kind::Oracle(p))
        } else {
            let p = Arc::new(FunctionalPca::new(dk, functional_by_name(&name)?, depth));
            Structure::new(p.clone(), Kind::Functional(p))
        };
    }
    Ok(current)
}

fn matching_open(text: &str, open: char, close: char) -> Option<usize> {
    let mut level = 0;
    for (i, ch) in text.char_indices().rev() {
        if ch == close {
            level += 1;
        } else if ch == open {
            level -= 1;
            if level == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// A term mentioning only `K` and `S` as named constants, for display.
pub fn render_term(p: &dyn Pca, t: &Term) -> String {
    let (k, s) = (p.k(), p.s());
    fn go(t: &Term, k: &Element, s: &Element, p: &dyn Pca, out: &mut String, arg: bool) {
        match t {
            Term::Const(e) if e == k => out.push('K'),
            Term::Const(e) if e == s => out.push('S'),
            Term::Const(e) => {
                let text = p.render(e);
                if !text.starts_with('#') && text != "*" {
                    out.push('#');
                }
                out.push_str(&text);
            }
            Term::Var(x) => out.push_str(x),
            Term::App(f, a) => {
                if arg {
                    out.push('(');
                }
                go(f, k, s, p, out, false);
                out.push(' ');
                go(a, k, s, p, out, true);
                if arg {
                    out.push(')');
                }
            }
        }
    }
    let mut out = String::new();
    go(t, &k, &s, p, &mut out, false);
    out
}
