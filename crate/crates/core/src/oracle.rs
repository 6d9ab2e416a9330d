//! Relativized structures: `A[f]`, whose application runs an f-dialogue,
//! and `A[F]`, where the oracle answers a query `v` with `F` applied to the
//! function that `v` indexes in `A[F]` itself.
//!
//! A dialogue program `a` is run on `b` by repeatedly evaluating
//! `a ([b] * [u0 .. ui-1])` in the base structure. A result `p F v` asks the
//! oracle about `v` and appends the answer; `p T c` halts with `c`.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use crate::nat::Nat;
use crate::pca::{Element, Eval, Fuel, NoValue, Pca, Term};
use crate::toolkit::{ap, c, v, Kit, ToolkitError};

/// A partial function consulted by dialogues.
pub trait Oracle: Send + Sync {
    fn ask(&self, query: &Element, fuel: &mut Fuel) -> Eval;
}

type OracleCallback = dyn Fn(&Element, &mut Fuel) -> Eval + Send + Sync;

/// Named host function used as an oracle.
#[derive(Clone)]
pub struct OracleFn {
    name: String,
    f: Arc<OracleCallback>,
}

impl fmt::Debug for OracleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleFn({})", self.name)
    }
}

fn raw(n: u64) -> Element {
    Nat::small(n)
}

impl OracleFn {
    pub fn new(name: &str, f: impl Fn(&Element, &mut Fuel) -> Eval + Send + Sync + 'static) -> OracleFn {
        OracleFn {
            name: name.to_string(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `n ↦ 2n` on inline naturals; undefined on codes too large to double.
    pub fn double() -> OracleFn {
        OracleFn::new("double", |v, fuel| {
            fuel.tick()?;
            match v.as_u64() {
                Some(n) if n < (1 << 61) => Ok(raw(2 * n)),
                _ => Err(NoValue::Divergent),
            }
        })
    }

    pub fn identity() -> OracleFn {
        OracleFn::new("identity", |v, fuel| {
            fuel.tick()?;
            Ok(v.clone())
        })
    }

    pub fn successor() -> OracleFn {
        OracleFn::new("succ", |v, fuel| {
            fuel.tick()?;
            fuel.spend(|b| v.succ_bounded(b))
        })
    }

    /// `n ↦ n + 3`.
    pub fn plus_three() -> OracleFn {
        OracleFn::new("plus3", |v, fuel| {
            fuel.tick()?;
            fuel.spend(|b| v.succ_bounded(b)?.succ_bounded(b)?.succ_bounded(b))
        })
    }

    /// `n ↦ n ∸ 2`
    pub fn minus_two() -> OracleFn {
        OracleFn::new("minus2", |v, fuel| {
            fuel.tick()?;
            fuel.spend(|b| v.pred_bounded(b)?.pred_bounded(b))
        })
    }

    /// The identity, undefined at `hole`.
    pub fn undefined_at(hole: u64) -> OracleFn {
        OracleFn::new(&format!("undefined_at_{hole}"), move |v, fuel| {
            fuel.tick()?;
            if v.as_u64() == Some(hole) {
                Err(NoValue::Divergent)
            } else {
                Ok(v.clone())
            }
        })
    }

    pub fn by_name(name: &str) -> Option<OracleFn> {
        Some(match name {
            "double" => OracleFn::double(),
            "identity" => OracleFn::identity(),
            "succ" => OracleFn::successor(),
            "plus3" => OracleFn::plus_three(),
            "minus2" => OracleFn::minus_two(),
            _ => {
                let hole = name.strip_prefix("undefined_at_")?.parse().ok()?;
                OracleFn::undefined_at(hole)
            }
        })
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["double", "identity", "succ", "plus3", "minus2", "undefined_at_<n>"]
    }
}

impl Oracle for OracleFn {
    fn ask(&self, query: &Element, fuel: &mut Fuel) -> Eval {
        (self.f)(query, fuel)
    }
}

impl<F> Oracle for F
where
    F: Fn(&Element, &mut Fuel) -> Eval + Send + Sync,
{
    fn ask(&self, query: &Element, fuel: &mut Fuel) -> Eval {
        self(query, fuel)
    }
}

/// The dialogue protocol's combinators over one base structure.
pub struct DialogueKit {
    pub kit: Arc<Kit>,
    /// `⟨a u⟩ p T (a u₀)`: `lift · a` runs `a` without consulting the oracle.
    pub lift: Element,
    /// Forwards its argument to the oracle and returns the answer.
    pub query: Element,
    /// `k` of the relativized structure.
    pub k: Element,
    /// `s` of the relativized structure.
    pub s: Element,
    /// `drive m d r k`: replays the dialogue of `m` from input tuple `d`
    /// against the answer tuple `r`, then continues with `k value rest`.
    pub drive: Element,
}

impl fmt::Debug for DialogueKit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DialogueKit({})", self.kit.pca().name())
    }
}

impl DialogueKit {
    pub fn new(kit: Arc<Kit>) -> Result<Arc<DialogueKit>, ToolkitError> {
        // Applying a combinator abstracted over n variables costs about
        // 3^(n-1) times its body, so every piece below keeps n small and
        // branches by selecting closed continuations instead of `ifte`.
        let kk = &kit;
        let lam = |vars: &[&str], body: Term| kk.abstract_vars(&body, vars);
        let head = |u: &str| ap(c(&kk.p0), [ap(c(&kk.p1), [v(u)])]);
        let second = |u: &str| ap(c(&kk.p0), [ap(c(&kk.p1), [ap(c(&kk.p1), [v(u)])])]);
        let halt = |t: Term| ap(c(&kk.pair), [c(&kk.t), t]);
        let ask = |t: Term| ap(c(&kk.pair), [c(&kk.f), t]);
        let one = kit.numeral(1)?;
        // [x] = p 1̄ (p x 0̄)
        let single = lam(&["x"], ap(c(&kk.pair), [c(&one), ap(c(&kk.pair), [v("x"), c(&kk.zero)])]))?;
        let single = |t: Term| ap(c(&single), [t]);

        let lift = lam(&["a", "u"], halt(ap(v("a"), [head("u")])))?;

        // a one-item input is a question for the oracle; with an answer
        // appended, the answer is the result
        let ask_head = lam(&["u"], ask(head("u")))?;
        let halt_second = lam(&["u"], halt(second("u")))?;
        let one_item = ap(c(&kk.iszero), [ap(c(&kk.pred), [ap(c(&kk.p0), [v("u")])])]);
        let query = lam(&["u"], ap(one_item, [c(&ask_head), c(&halt_second), v("u")]))?;

        let k = lam(&["u"], halt(ap(c(&lift), [ap(c(&kit.k), [head("u")])])))?;

        // drive m d r k: loop e m d r, continuation k supplied last.
        // Each continuation below is applied to e m d r and then k.
        let call_k = lam(&["x", "r", "k"], ap(v("k"), [v("x"), v("r")]))?;
        let drop3 = lam(&["x", "e", "m", "d"], v("x"))?;
        let on_halt = lam(&["res"], ap(c(&drop3), [ap(c(&call_k), [ap(c(&kk.p1), [v("res")])])]))?;
        let drop5 = lam(&["x", "e", "m", "d", "r", "k"], v("x"))?;
        let on_ask = lam(&["res"], ap(c(&drop5), [ask(ap(c(&kk.p1), [v("res")]))]))?;
        let next = lam(
            &["e", "m", "d", "r"],
            ap(v("e"), [v("m"), ap(c(&kk.snoc), [v("d"), head("r")]), ap(c(&kk.tail), [v("r")])]),
        )?;
        let dispatch = lam(
            &["res", "left"],
            ap(
                c(&kk.p0),
                [
                    v("res"),
                    ap(c(&on_halt), [v("res")]),
                    ap(c(&kk.iszero), [v("left"), ap(c(&on_ask), [v("res")]), c(&next)]),
                ],
            ),
        )?;
        let step = lam(
            &["e", "m", "d", "r"],
            ap(
                c(&dispatch),
                [ap(v("m"), [v("d")]), ap(c(&kk.p0), [v("r")]), v("e"), v("m"), v("d"), v("r")],
            ),
        )?;
        let drive = kit.fixpoint(&step)?;

        let finish = lam(&["z", "r"], halt(v("z")))?;
        let then_x = lam(&["x", "y", "r"], ap(c(&drive), [v("x"), single(v("y")), v("r"), c(&finish)]))?;
        let then_b = lam(
            &["b", "cc", "x", "r"],
            ap(c(&drive), [v("b"), single(v("cc")), v("r"), ap(c(&then_x), [v("x")])]),
        )?;
        let s2 = lam(
            &["a", "b", "u"],
            ap(
                c(&drive),
                [
                    v("a"),
                    single(head("u")),
                    ap(c(&kk.tail), [v("u")]),
                    ap(c(&then_b), [v("b"), head("u")]),
                ],
            ),
        )?;
        let s1 = lam(&["a", "u"], halt(ap(c(&s2), [v("a"), head("u")])))?;
        let s = lam(&["u"], halt(ap(c(&s1), [head("u")])))?;

        Ok(Arc::new(DialogueKit {
            kit,
            lift,
            query,
            k,
            s,
            drive,
        }))
    }

    /// `a′` with `a′ ·^f b ≃ a b` for every oracle `f`.
    pub fn lift_index(&self, a: &Element) -> Result<Element, ToolkitError> {
        self.kit
            .call(&self.lift, &[a.clone()], &mut Fuel::new(crate::toolkit::BUILD_FUEL))
            .map_err(|e| ToolkitError::NoDenotation("lift".into(), e))
    }

    /// `r` with `r ·^f x ·^f y ≃ x y` for every oracle `f`: realizes the
    /// inclusion of the base structure.
    pub fn application_realizer(&self) -> Result<Element, ToolkitError> {
        let kit = &self.kit;
        let head = ap(c(&kit.p0), [ap(c(&kit.p1), [v("u")])]);
        let body = ap(c(&kit.pair), [c(&kit.t), ap(c(&self.lift), [head])]);
        kit.abstract_vars(&body, &["u"])
    }

    pub fn query_index(&self) -> Element {
        self.query.clone()
    }

    /// Elements for sampling the relativized laws.
    pub fn sample_pool(&self) -> Result<Vec<Element>, ToolkitError> {
        let kit = &self.kit;
        let mut pool = vec![self.k.clone(), self.s.clone(), self.query.clone()];
        for base in [&kit.id, &kit.succ, &kit.k, &kit.pair, &kit.f] {
            pool.push(self.lift_index(base)?);
        }
        pool.push(kit.numeral(1)?);
        pool.extend((0..4).map(Nat::small));
        Ok(pool)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DialogueStatus {
    Halt(Element),
    Exhausted,
    /// The base evaluation diverged or broke the `p T c` / `p F v` protocol.
    Divergent(String),
    OracleUndefined(Element),
}

/// Transcript of one dialogue: queries with their answers, then how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub rounds: Vec<(Element, Element)>,
    pub status: DialogueStatus,
}

impl Dialogue {
    pub fn trace_lines(&self, render: &dyn Fn(&Element) -> String) -> Vec<String> {
        let mut out: Vec<String> = self
            .rounds
            .iter()
            .enumerate()
            .map(|(i, (q, a))| format!("ROUND {i} QUERY {} ANSWER {}", render(q), render(a)))
            .collect();
        out.push(match &self.status {
            DialogueStatus::Halt(c) => format!("HALT {}", render(c)),
            DialogueStatus::Exhausted => "EXHAUSTED".into(),
            DialogueStatus::Divergent(why) => format!("DIVERGENT {why}"),
            DialogueStatus::OracleUndefined(q) => format!("ORACLE-UNDEFINED {}", render(q)),
        });
        out
    }
}

/// Runs the dialogue between `a` and `b`, charging every base evaluation
/// and oracle probe to `fuel`.
pub fn apply_oracle(dk: &DialogueKit, oracle: &dyn Oracle, a: &Element, b: &Element, fuel: &mut Fuel) -> (Eval, Dialogue) {
    let kit = &dk.kit;
    let p = kit.pca();
    let mut rounds: Vec<(Element, Element)> = Vec::new();
    let finish = |rounds, status, eval| (eval, Dialogue { rounds, status });
    loop {
        let mut items = Vec::with_capacity(rounds.len() + 1);
        items.push(b.clone());
        items.extend(rounds.iter().map(|(_, ans): &(Element, Element)| ans.clone()));
        let step = kit.tuple_in(&items, fuel).and_then(|d| p.apply(a, &d, fuel)).and_then(|r| {
            let head = p.apply(&kit.p0, &r, fuel)?;
            let body = p.apply(&kit.p1, &r, fuel)?;
            Ok((head, body))
        });
        let (head, body) = match step {
            Ok(hb) => hb,
            Err(NoValue::Exhausted) => return finish(rounds, DialogueStatus::Exhausted, Err(NoValue::Exhausted)),
            Err(NoValue::Divergent) => {
                return finish(
                    rounds,
                    DialogueStatus::Divergent("base evaluation diverged".into()),
                    Err(NoValue::Divergent),
                )
            }
        };
        if head == kit.t {
            return finish(rounds, DialogueStatus::Halt(body.clone()), Ok(body));
        }
        if head != kit.f {
            return finish(
                rounds,
                DialogueStatus::Divergent(format!("response head {} is not a boolean", p.render(&head))),
                Err(NoValue::Divergent),
            );
        }
        match oracle.ask(&body, fuel) {
            Ok(answer) => rounds.push((body, answer)),
            Err(NoValue::Exhausted) => return finish(rounds, DialogueStatus::Exhausted, Err(NoValue::Exhausted)),
            Err(NoValue::Divergent) => {
                return finish(rounds, DialogueStatus::OracleUndefined(body), Err(NoValue::Divergent))
            }
        }
    }
}

/// `A[f]`: same carrier, application by f-dialogues.
pub struct OraclePca {
    dk: Arc<DialogueKit>,
    oracle: OracleFn,
}

impl OraclePca {
    pub fn new(dk: Arc<DialogueKit>, oracle: OracleFn) -> OraclePca {
        OraclePca { dk, oracle }
    }

    pub fn dialogue_kit(&self) -> &Arc<DialogueKit> {
        &self.dk
    }

    pub fn oracle(&self) -> &OracleFn {
        &self.oracle
    }

    pub fn run(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> (Eval, Dialogue) {
        apply_oracle(&self.dk, &self.oracle, a, b, fuel)
    }
}

pub fn oracle_pca(dk: Arc<DialogueKit>, f: OracleFn) -> OraclePca {
    OraclePca::new(dk, f)
}

impl Pca for OraclePca {
    fn name(&self) -> String {
        format!("{}[{}]", self.dk.kit.pca().name(), self.oracle.name)
    }

    fn apply(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> Eval {
        self.run(a, b, fuel).0
    }

    fn k(&self) -> Element {
        self.dk.k.clone()
    }

    fn s(&self) -> Element {
        self.dk.s.clone()
    }

    fn render(&self, e: &Element) -> String {
        self.dk.kit.pca().render(e)
    }
}

/// A probe into the function an element indexes.
pub type Handle<'a> = &'a dyn Fn(&Element, &mut Fuel) -> Eval;

type FunctionalCallback = dyn Fn(Handle<'_>, &mut Fuel) -> Eval + Send + Sync;

/// A continuous type-2 functional with a declared bound on distinct probes.
#[derive(Clone)]
pub struct Functional {
    name: String,
    query_bound: usize,
    eval: Arc<FunctionalCallback>,
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functional({}, bound {})", self.name, self.query_bound)
    }
}

impl Functional {
    pub fn new(
        name: &str,
        query_bound: usize,
        eval: impl Fn(Handle<'_>, &mut Fuel) -> Eval + Send + Sync + 'static,
    ) -> Functional {
        Functional {
            name: name.to_string(),
            query_bound,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn query_bound(&self) -> usize {
        self.query_bound
    }

    /// Applies the functional; probing beyond the declared bound diverges.
    pub fn call(&self, g: Handle<'_>, fuel: &mut Fuel) -> Eval {
        let probes = Cell::new(0usize);
        let bounded = |w: &Element, fuel: &mut Fuel| {
            probes.set(probes.get() + 1);
            if probes.get() > self.query_bound {
                return Err(NoValue::Divergent);
            }
            g(w, fuel)
        };
        fuel.tick()?;
        (self.eval)(&bounded, fuel)
    }

    /// `F(g) = g(0)`.
    pub fn at_zero() -> Functional {
        Functional::new("at_zero", 1, |g, fuel| g(&raw(0), fuel))
    }

    /// `F(g) = g(g(0))`.
    pub fn self_apply() -> Functional {
        Functional::new("self_apply", 2, |g, fuel| {
            let first = g(&raw(0), fuel)?;
            g(&first, fuel)
        })
    }

    /// `0` if `g(n) = 0` for some `n < bound`, else `1`; probes in order and
    /// stops at the first zero.
    pub fn bounded_e(bound: u64) -> Functional {
        Functional::new(&format!("bounded_E({bound})"), bound as usize, move |g, fuel| {
            for n in 0..bound {
                if g(&raw(n), fuel)?.is_zero() {
                    return Ok(raw(0));
                }
            }
            Ok(raw(1))
        })
    }

    /// `H(g) = p F(g) G(g)` in the structure of `kit`.
    pub fn combine(f: &Functional, g: &Functional, kit: Arc<Kit>) -> Functional {
        let (f, g) = (f.clone(), g.clone());
        let name = format!("pair({},{})", f.name, g.name);
        Functional::new(&name, f.query_bound + g.query_bound, move |h, fuel| {
            let x = (f.eval)(h, fuel)?;
            let y = (g.eval)(h, fuel)?;
            kit.call(&kit.pair, &[x, y], fuel)
        })
    }

    pub fn by_name(name: &str) -> Option<Functional> {
        match name {
            "at_zero" => Some(Functional::at_zero()),
            "self_apply" => Some(Functional::self_apply()),
            _ => {
                let n = name
                    .strip_prefix("bounded_E(")
                    .or_else(|| name.strip_prefix("bounded_e("))?
                    .strip_suffix(')')?
                    .parse()
                    .ok()?;
                Some(Functional::bounded_e(n))
            }
        }
    }
}

/// Result of running an `A[F]` application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalRun {
    pub outcome: Eval,
    /// Deepest nesting of oracle answers actually needed; `0` if none.
    pub depth_used: u32,
    pub dialogue: Dialogue,
}

/// Application in `A[F]`, with oracle nesting limited to `depth`.
///
/// A query `v` is answered by `F` applied to `w ↦ v ·^F w`, evaluated one
/// level deeper; at depth `0` every query is left unanswered (`Exhausted`).
pub fn apply_functional(
    dk: &DialogueKit,
    functional: &Functional,
    a: &Element,
    b: &Element,
    fuel: &mut Fuel,
    depth: u32,
) -> FunctionalRun {
    let used = Cell::new(0u32);
    let oracle = |query: &Element, fuel: &mut Fuel| -> Eval {
        if depth == 0 {
            return Err(NoValue::Exhausted);
        }
        let handle = |w: &Element, fuel: &mut Fuel| -> Eval {
            let inner = apply_functional(dk, functional, query, w, fuel, depth - 1);
            used.set(used.get().max(inner.depth_used + 1));
            inner.outcome
        };
        used.set(used.get().max(1));
        functional.call(&handle, fuel)
    };
    let (outcome, dialogue) = apply_oracle_local(dk, &oracle, a, b, fuel);
    FunctionalRun {
        outcome,
        depth_used: used.get(),
        dialogue,
    }
}

// `apply_oracle` needs `Send + Sync` oracles; the per-call closure above
// borrows a `Cell`, so it goes through this adapter instead.
fn apply_oracle_local(
    dk: &DialogueKit,
    oracle: &dyn Fn(&Element, &mut Fuel) -> Eval,
    a: &Element,
    b: &Element,
    fuel: &mut Fuel,
) -> (Eval, Dialogue) {
    struct Local<'a>(&'a dyn Fn(&Element, &mut Fuel) -> Eval);
    // SAFETY: the wrapper never leaves this call frame and is only used from
    // the current thread.
    unsafe impl Send for Local<'_> {}
    unsafe impl Sync for Local<'_> {}
    impl Oracle for Local<'_> {
        fn ask(&self, query: &Element, fuel: &mut Fuel) -> Eval {
            (self.0)(query, fuel)
        }
    }
    apply_oracle(dk, &Local(oracle), a, b, fuel)
}

/// Default nesting depth for `A[F]` application.
pub const DEFAULT_DEPTH: u32 = 64;

/// `A[F]`: application by recursive dialogues, nested at most `depth` deep.
pub struct FunctionalPca {
    dk: Arc<DialogueKit>,
    functional: Functional,
    depth: u32,
}

impl FunctionalPca {
    pub fn new(dk: Arc<DialogueKit>, functional: Functional, depth: u32) -> FunctionalPca {
        FunctionalPca { dk, functional, depth }
    }

    pub fn dialogue_kit(&self) -> &Arc<DialogueKit> {
        &self.dk
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn run(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> FunctionalRun {
        apply_functional(&self.dk, &self.functional, a, b, fuel, self.depth)
    }
}

pub fn functional_pca(dk: Arc<DialogueKit>, functional: Functional) -> FunctionalPca {
    FunctionalPca::new(dk, functional, DEFAULT_DEPTH)
}

impl Pca for FunctionalPca {
    fn name(&self) -> String {
        format!("{}[{}]", self.dk.kit.pca().name(), self.functional.name)
    }

    fn apply(&self, a: &Element, b: &Element, fuel: &mut Fuel) -> Eval {
        self.run(a, b, fuel).outcome
    }

    fn k(&self) -> Element {
        self.dk.k.clone()
    }

    fn s(&self) -> Element {
        self.dk.s.clone()
    }

    fn render(&self, e: &Element) -> String {
        self.dk.kit.pca().render(e)
    }
}
