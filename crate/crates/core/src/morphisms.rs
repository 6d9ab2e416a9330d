//! Applicative morphisms as finitely sampled data.
//!
//! A morphism `γ: A → B` is a map from elements of `A` to nonempty finite
//! sets of elements of `B` together with a realizer `r ∈ B` such that
//! `r γ(a) γ(a′) ⊆ γ(a a′)` whenever `a a′` denotes. The checkers below test
//! such conditions on explicit samples.

use std::fmt;
use std::sync::Arc;

use crate::oracle::{Functional, Oracle};
use crate::pca::{Element, Eval, Fuel, NoValue, Pca, PcaRef};
use crate::toolkit::{ap, booleans, c, v, ToolkitError};

type Relation = dyn Fn(&Element) -> Vec<Element> + Send + Sync;

#[derive(Clone)]
pub struct MorphismSpec {
    pub name: String,
    pub source: PcaRef,
    pub target: PcaRef,
    relation: Arc<Relation>,
    pub realizer: Element,
    pub decider: Option<Element>,
}

impl fmt::Debug for MorphismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MorphismSpec({}: {} -> {})", self.name, self.source.name(), self.target.name())
    }
}

impl MorphismSpec {
    pub fn new(
        name: &str,
        source: PcaRef,
        target: PcaRef,
        relation: impl Fn(&Element) -> Vec<Element> + Send + Sync + 'static,
        realizer: Element,
        decider: Option<Element>,
    ) -> MorphismSpec {
        MorphismSpec {
            name: name.to_string(),
            source,
            target,
            relation: Arc::new(relation),
            realizer,
            decider,
        }
    }

    /// `a ↦ {a}` on one structure.
    pub fn identity(p: PcaRef, realizer: Element, decider: Option<Element>) -> MorphismSpec {
        MorphismSpec::new("id", p.clone(), p, |a| vec![a.clone()], realizer, decider)
    }

    /// The identity with its canonical realizer `⟨x y⟩ x y` and decider `⟨x⟩ x`.
    pub fn canonical_identity(p: PcaRef) -> Result<MorphismSpec, ToolkitError> {
        let r = crate::toolkit::abstract_vars(p.as_ref(), &ap(v("x"), [v("y")]), &["x", "y"])?;
        let d = crate::toolkit::abstract_vars(p.as_ref(), &v("x"), &["x"])?;
        Ok(MorphismSpec::identity(p, r, Some(d)))
    }

    pub fn image(&self, a: &Element) -> Vec<Element> {
        (self.relation)(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphismError {
    #[error("cannot compose: {0} is not {1}")]
    Mismatch(String, String),
    #[error("{0} has an empty image somewhere")]
    EmptyImage(String),
    #[error(transparent)]
    Toolkit(#[from] ToolkitError),
}

/// One line of a check report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckLine {
    Pass,
    Fail { a: String, a2: String, expected: String, got: String },
    Undecided(String),
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckLine::Pass => write!(f, "PASS"),
            CheckLine::Fail { a, a2, expected, got } => write!(f, "FAIL {a} {a2} expected {expected} got {got}"),
            CheckLine::Undecided(what) => write!(f, "UNDECIDED {what}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        !self.lines.iter().any(|l| matches!(l, CheckLine::Fail { .. }))
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| matches!(l, CheckLine::Fail { .. })).count()
    }

    pub fn undecided(&self) -> usize {
        self.lines.iter().filter(|l| matches!(l, CheckLine::Undecided(_))).count()
    }

    pub fn checked(&self) -> usize {
        self.lines.len()
    }

    fn pass(&mut self) {
        self.lines.push(CheckLine::Pass);
    }

    fn fail(&mut self, a: String, a2: String, expected: String, got: String) {
        self.lines.push(CheckLine::Fail { a, a2, expected, got });
    }

    fn undecided_line(&mut self, what: String) {
        self.lines.push(CheckLine::Undecided(what));
    }
}

/// Failures and undecided cases one per line, then `PASS` or `FAIL`.
impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines.iter().filter(|l| **l != CheckLine::Pass) {
            writeln!(f, "{line}")?;
        }
        if self.passed() {
            write!(f, "PASS")
        } else {
            write!(f, "FAIL")
        }
    }
}

fn show(p: &dyn Pca, e: &Eval) -> String {
    match e {
        Ok(v) => p.render(v),
        Err(NoValue::Exhausted) => "EXHAUSTED".into(),
        Err(NoValue::Divergent) => "DIVERGENT".into(),
    }
}

fn show_set(p: &dyn Pca, set: &[Element]) -> String {
    let items: Vec<String> = set.iter().map(|e| p.render(e)).collect();
    format!("{{{}}}", items.join(","))
}

fn apply2(p: &dyn Pca, f: &Element, x: &Element, y: &Element, fuel: u64) -> Eval {
    let mut fuel = Fuel::new(fuel);
    let fx = p.apply(f, x, &mut fuel)?;
    p.apply(&fx, y, &mut fuel)
}

/// `r x y ∈ γ(a a′)` for all `x ∈ γ(a)`, `y ∈ γ(a′)`, on pairs whose
/// product denotes in the source.
pub fn check_applicative(ms: &MorphismSpec, pairs: &[(Element, Element)], fuel: u64) -> CheckReport {
    let (src, tgt) = (ms.source.as_ref(), ms.target.as_ref());
    let mut report = CheckReport::default();
    for (a, a2) in pairs {
        let (ra, ra2) = (src.render(a), src.render(a2));
        let aa = match src.apply(a, a2, &mut Fuel::new(fuel)) {
            Ok(v) => v,
            Err(e) => {
                report.undecided_line(format!("{ra} {ra2} source product {}", show(src, &Err(e))));
                continue;
            }
        };
        let expected = ms.image(&aa);
        for x in ms.image(a) {
            for y in ms.image(a2) {
                match apply2(tgt, &ms.realizer, &x, &y, fuel) {
                    Ok(w) if expected.contains(&w) => report.pass(),
                    Err(NoValue::Exhausted) => {
                        report.undecided_line(format!("{ra} {ra2} realizer {}", show(tgt, &Err(NoValue::Exhausted))))
                    }
                    got => report.fail(ra.clone(), ra2.clone(), show_set(tgt, &expected), show(tgt, &got)),
                }
            }
        }
    }
    report
}

/// `d γ(T) = {T}` and `d γ(F) = {F}`.
pub fn check_decider(ms: &MorphismSpec, fuel: u64) -> Result<CheckReport, MorphismError> {
    let (src, tgt) = (ms.source.as_ref(), ms.target.as_ref());
    let (st, sf) = booleans(src)?;
    let (tt, tf) = booleans(tgt)?;
    let mut report = CheckReport::default();
    let Some(d) = &ms.decider else {
        report.fail("decider".into(), "-".into(), "an element".into(), "none".into());
        return Ok(report);
    };
    for (b, want, label) in [(st, tt, "T"), (sf, tf, "F")] {
        for x in ms.image(&b) {
            match tgt.apply(d, &x, &mut Fuel::new(fuel)) {
                Ok(w) if w == want => report.pass(),
                Err(NoValue::Exhausted) => report.undecided_line(format!("{label} decider EXHAUSTED")),
                got => report.fail(label.into(), tgt.render(&x), tgt.render(&want), show(tgt, &got)),
            }
        }
    }
    Ok(report)
}

/// `δ ∘ γ` with the realizer `⟨z w⟩ r′ (r′ u z) w` for some `u ∈ δ(r)`,
/// and the decider `⟨z⟩ d′ (r′ u_d z)` for some `u_d ∈ δ(d)`.
pub fn compose(gamma: &MorphismSpec, delta: &MorphismSpec) -> Result<MorphismSpec, MorphismError> {
    if gamma.target.name() != delta.source.name() {
        return Err(MorphismError::Mismatch(gamma.target.name(), delta.source.name()));
    }
    let tgt = delta.target.clone();
    let first = |e: &Element| {
        delta
            .image(e)
            .into_iter()
            .next()
            .ok_or_else(|| MorphismError::EmptyImage(delta.name.clone()))
    };
    let u = first(&gamma.realizer)?;
    let r2 = &delta.realizer;
    let body = ap(c(r2), [ap(c(r2), [c(&u), v("z")]), v("w")]);
    let realizer = crate::toolkit::abstract_vars(tgt.as_ref(), &body, &["z", "w"])?;
    let decider = match (&gamma.decider, &delta.decider) {
        (Some(d1), Some(d2)) => {
            let ud = first(d1)?;
            let body = ap(c(d2), [ap(c(r2), [c(&ud), v("z")])]);
            Some(crate::toolkit::abstract_vars(tgt.as_ref(), &body, &["z"])?)
        }
        _ => None,
    };
    let (g, d) = (gamma.clone(), delta.clone());
    Ok(MorphismSpec::new(
        &format!("{}.{}", delta.name, gamma.name),
        gamma.source.clone(),
        tgt,
        move |a| {
            let mut out: Vec<Element> = Vec::new();
            for x in g.image(a) {
                for y in d.image(&x) {
                    if !out.contains(&y) {
                        out.push(y);
                    }
                }
            }
            out
        },
        realizer,
        decider,
    ))
}

/// `γ ≼ δ` witnessed by `t`: `t γ(a) ⊆ δ(a)` on the samples.
pub fn check_preorder(gamma: &MorphismSpec, delta: &MorphismSpec, t: &Element, samples: &[Element], fuel: u64) -> CheckReport {
    let (src, tgt) = (gamma.source.as_ref(), gamma.target.as_ref());
    let mut report = CheckReport::default();
    for a in samples {
        let expected = delta.image(a);
        for x in gamma.image(a) {
            match tgt.apply(t, &x, &mut Fuel::new(fuel)) {
                Ok(w) if expected.contains(&w) => report.pass(),
                Err(NoValue::Exhausted) => report.undecided_line(format!("{} witness EXHAUSTED", src.render(a))),
                got => report.fail(src.render(a), tgt.render(&x), show_set(tgt, &expected), show(tgt, &got)),
            }
        }
    }
    report
}

/// Membership of `a` in `I₁(f)`: `a b ≲ f(b)` on the samples. Samples
/// where `f` is undefined hold vacuously.
pub fn check_i1(p: &dyn Pca, a: &Element, f: &dyn Oracle, samples: &[Element], fuel: u64) -> CheckReport {
    let mut report = CheckReport::default();
    for b in samples {
        let want = match f.ask(b, &mut Fuel::new(fuel)) {
            Ok(w) => w,
            Err(_) => continue,
        };
        match p.apply(a, b, &mut Fuel::new(fuel)) {
            Ok(w) if w == want => report.pass(),
            Err(NoValue::Exhausted) => report.undecided_line(format!("{} EXHAUSTED", p.render(b))),
            got => report.fail(p.render(a), p.render(b), p.render(&want), show(p, &got)),
        }
    }
    report
}

type HostCallback = dyn Fn(&Element) -> Option<Element> + Send + Sync;

/// A function on the carrier described on the host, for comparison.
#[derive(Clone)]
pub struct HostFn {
    pub name: String,
    f: Arc<HostCallback>,
}

impl fmt::Debug for HostFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HostFn({})", self.name)
    }
}

impl HostFn {
    pub fn new(name: &str, f: impl Fn(&Element) -> Option<Element> + Send + Sync + 'static) -> HostFn {
        HostFn {
            name: name.to_string(),
            f: Arc::new(f),
        }
    }

    pub fn call(&self, x: &Element) -> Option<Element> {
        (self.f)(x)
    }
}

/// `e` as an effective operation for `F`: `e·i ≃ F(g)` for each index `i`
/// of a host function `g`, and indices of the same function (same name)
/// must be sent to the same value.
pub fn check_effective_operation(
    p: &dyn Pca,
    e: &Element,
    functional: &Functional,
    fn_indices: &[(Element, HostFn)],
    fuel: u64,
) -> CheckReport {
    let mut report = CheckReport::default();
    let mut seen: Vec<(String, Element, Element)> = Vec::new();
    for (index, g) in fn_indices {
        let handle = |x: &Element, _: &mut Fuel| g.call(x).ok_or(NoValue::Divergent);
        let want = functional.call(&handle, &mut Fuel::new(fuel));
        let got = p.apply(e, index, &mut Fuel::new(fuel));
        match (&want, &got) {
            (_, Err(NoValue::Exhausted)) | (Err(NoValue::Exhausted), _) => {
                report.undecided_line(format!("{} {} EXHAUSTED", g.name, p.render(index)))
            }
            (Ok(w), Ok(v)) if w == v => report.pass(),
            (Err(NoValue::Divergent), Err(NoValue::Divergent)) => report.pass(),
            _ => report.fail(p.render(e), p.render(index), show(p, &want), show(p, &got)),
        }
        if let Ok(v) = &got {
            for (name, other, value) in &seen {
                if *name == g.name && value != v {
                    report.fail(
                        p.render(other),
                        p.render(index),
                        format!("equal values for indices of {name}"),
                        format!("{} and {}", p.render(value), p.render(v)),
                    );
                }
            }
            seen.push((g.name.clone(), index.clone(), v.clone()));
        }
    }
    report
}
