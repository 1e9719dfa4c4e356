//! Coalgebras, their morphisms, simulations, bisimilarity relative to a set
//! of morphisms, and the cover modality `∇`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::endo::{evaluate, map_objects, up_closure, EndoExpr, Evaluated};
use crate::error::{Error, Result};
use crate::lifting::{closed_form_entry, lift_via_collage, lift_via_collage_on, ClosedForm};
use crate::quantale::{QValue, Quantale};
use crate::vcat::{Limits, VCat, VFunctor};
use crate::vmod::Module;

/// A coalgebra `ξ: X → T X`.
#[derive(Clone, Debug)]
pub struct Coalgebra {
    pub space: Arc<VCat>,
    pub expr: EndoExpr,
    /// `T X`.
    pub ev: Arc<Evaluated>,
    pub xi: VFunctor,
}

impl Coalgebra {
    /// `xi[x]` indexes the objects of `T X` in their canonical order.
    pub fn new(space: Arc<VCat>, expr: EndoExpr, xi: Vec<usize>, limits: Limits) -> Result<Coalgebra> {
        let ev = Arc::new(evaluate(&expr, &space, limits)?);
        Coalgebra::on(space, expr, ev, xi)
    }

    /// As [`Coalgebra::new`] with a precomputed `T X`.
    pub fn on(space: Arc<VCat>, expr: EndoExpr, ev: Arc<Evaluated>, xi: Vec<usize>) -> Result<Coalgebra> {
        let xi = VFunctor::checked(space.clone(), ev.cat.clone(), xi)?;
        Ok(Coalgebra { space, expr, ev, xi })
    }

    pub fn quantale(&self) -> &Quantale {
        self.space.quantale()
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// The table of `ξ(x)` when `T X` is a presheaf or power object.
    pub fn successors(&self, x: usize) -> Option<&[QValue]> {
        self.ev.table(self.xi.apply(x))
    }

    /// Whether `f` is a coalgebra morphism `self → other`: `ν·f = Tf·ξ`.
    pub fn is_morphism_to(&self, other: &Coalgebra, f: &VFunctor) -> Result<bool> {
        if self.expr != other.expr {
            return Err(Error::Precondition("coalgebras for different functors".into()));
        }
        if !f.is_valid() {
            return Ok(false);
        }
        let tf = map_objects(&self.expr, f, &self.ev, &other.ev)?;
        Ok((0..self.len()).all(|x| other.xi.apply(f.apply(x)) == tf[self.xi.apply(x)]))
    }
}

/// All coalgebra morphisms `c1 → c2`, in lexicographic order of object maps.
pub fn find_coalgebra_morphisms(c1: &Coalgebra, c2: &Coalgebra, max_candidates: u128) -> Result<Vec<VFunctor>> {
    if c1.expr != c2.expr {
        return Err(Error::Precondition("coalgebras for different functors".into()));
    }
    c1.space.same_quantale(&c2.space)?;
    let (n, m) = (c1.len(), c2.len());
    let candidates = (m as u128).saturating_pow(n as u32);
    if candidates > max_candidates {
        return Err(Error::TooManyObjects {
            what: "the space of state maps".into(),
            count: candidates,
            limit: max_candidates.min(usize::MAX as u128) as usize,
        });
    }
    let mut out = Vec::new();
    if m == 0 && n > 0 {
        return Ok(out);
    }
    let mut map = vec![0usize; n];
    loop {
        let f = VFunctor::new(c1.space.clone(), c2.space.clone(), map.clone())?;
        if c1.is_morphism_to(c2, &f)? {
            out.push(f);
        }
        // next map, last state least significant
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            map[k] += 1;
            if map[k] < m {
                break;
            }
            map[k] = 0;
        }
    }
}

/// A partition of the disjoint union of several state spaces; members are
/// `(coalgebra index, state)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<(usize, usize)>>,
}

impl Partition {
    pub fn same_block(&self, x: (usize, usize), y: (usize, usize)) -> bool {
        self.blocks.iter().any(|b| b.contains(&x) && b.contains(&y))
    }
}

/// A morphism between two of the listed coalgebras.
#[derive(Clone, Debug)]
pub struct Witness {
    pub from: usize,
    pub to: usize,
    pub map: Vec<usize>,
}

/// The equivalence generated by `x ~ f(x)` over the supplied morphisms.
///
/// This is bisimilarity only relative to the given witnesses; states that
/// would be identified through coalgebras not listed stay apart.
pub fn bisimilarity_closure(sizes: &[usize], witnesses: &[Witness]) -> Result<Partition> {
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    let mut uf = UnionFind::<usize>::new(total);
    for w in witnesses {
        if w.from >= sizes.len() || w.to >= sizes.len() {
            return Err(Error::Precondition(format!("witness refers to coalgebra {} or {}", w.from, w.to)));
        }
        if w.map.len() != sizes[w.from] || w.map.iter().any(|&y| y >= sizes[w.to]) {
            return Err(Error::Shape("witness map does not fit the state spaces".into()));
        }
        for (x, &y) in w.map.iter().enumerate() {
            uf.union(offsets[w.from] + x, offsets[w.to] + y);
        }
    }
    let mut blocks: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut block_of_root: HashMap<usize, usize> = HashMap::new();
    for (c, &n) in sizes.iter().enumerate() {
        for x in 0..n {
            let root = uf.find(offsets[c] + x);
            let b = *block_of_root.entry(root).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push((c, x));
        }
    }
    Ok(Partition { blocks })
}

/// Result of the simulation fixpoint.
#[derive(Clone, Debug)]
pub struct Simulation {
    /// `R: X -|-> Y`, rows indexed by states of the second coalgebra.
    pub relation: Module,
    pub converged: bool,
    pub iterations: usize,
    /// Steps at which `Φ` failed to descend along a descending chain.
    pub non_monotone_steps: Vec<usize>,
    /// `Φ(R) = R` at return.
    pub is_fixpoint: bool,
    /// Whether the result satisfies the bimodule laws.
    pub is_module: bool,
}

/// How `T̄` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LiftPath {
    /// The closed form when `T` is `L`, `U` or `P`, the collage otherwise.
    #[default]
    Auto,
    /// Always through the collage.
    Collage,
}

/// `Φ(R)(y, x) = T̄(R)(ν y, ξ x)`.
pub fn simulation_step(c1: &Coalgebra, c2: &Coalgebra, r: &Module, path: LiftPath, limits: Limits) -> Result<Module> {
    if let (LiftPath::Auto, Some(which)) = (path, ClosedForm::of(&c1.expr)) {
        return Module::from_fn(c1.space.clone(), c2.space.clone(), |y, x| {
            let nu = c2.successors(y).expect("table");
            let xi = c1.successors(x).expect("table");
            closed_form_entry(which, r, nu, xi)
        });
    }
    let lifted = lift_via_collage_on(&c1.expr, r, &c1.ev, &c2.ev, limits)?;
    Module::from_fn(c1.space.clone(), c2.space.clone(), |y, x| {
        lifted.module.get(c2.xi.apply(y), c1.xi.apply(x)).clone()
    })
}

/// The greatest simulation from `c1` to `c2`, by descending iteration from
/// the top matrix. Over infinite quantales the iteration is capped.
pub fn largest_simulation(
    c1: &Coalgebra,
    c2: &Coalgebra,
    max_iterations: usize,
    path: LiftPath,
    limits: Limits,
) -> Result<Simulation> {
    if c1.expr != c2.expr {
        return Err(Error::Precondition("coalgebras for different functors".into()));
    }
    let q = c1.quantale().clone();
    let top = q.top();
    let mut r = Module::from_fn(c1.space.clone(), c2.space.clone(), |_, _| top.clone())?;
    let mut prev_phi: Option<Module> = None;
    let mut non_monotone_steps = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        iterations += 1;
        let phi = simulation_step(c1, c2, &r, path, limits)?;
        if let Some(p) = &prev_phi {
            if !phi.le(p) {
                non_monotone_steps.push(iterations);
            }
        }
        let next = r.meet(&phi)?;
        prev_phi = Some(phi);
        if next == r {
            converged = true;
            break;
        }
        r = next;
    }
    let phi = simulation_step(c1, c2, &r, path, limits)?;
    let is_fixpoint = phi == r;
    let is_module = r.is_valid();
    Ok(Simulation { relation: r, converged, iterations, non_monotone_steps, is_fixpoint, is_module })
}

/// Formulas of the `∇`-logic, with finite conjunctions and disjunctions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Const(QValue),
    Meet(Vec<Formula>),
    Join(Vec<Formula>),
    /// `∇γ` with `γ` a finite weighting of formulas.
    Nabla(Vec<(Formula, QValue)>),
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => f.write_str(a),
            Formula::Const(v) => write!(f, "{v:?}"),
            Formula::Meet(xs) => write!(f, "and{xs:?}"),
            Formula::Join(xs) => write!(f, "or{xs:?}"),
            Formula::Nabla(g) => write!(f, "nabla{g:?}"),
        }
    }
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    /// `∇`-nesting depth.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Const(_) => 0,
            Formula::Meet(xs) | Formula::Join(xs) => xs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Nabla(g) => 1 + g.iter().map(|(f, _)| f.depth()).max().unwrap_or(0),
        }
    }

    /// The weighting of a `∇` with duplicate keys joined and keys sorted.
    pub fn normalized_weights(q: &Quantale, g: &[(Formula, QValue)]) -> Vec<(Formula, QValue)> {
        let mut acc: BTreeMap<&Formula, QValue> = BTreeMap::new();
        for (f, w) in g {
            let slot = acc.entry(f).or_insert_with(|| q.bottom());
            *slot = q.join2(slot, w);
        }
        acc.into_iter().map(|(f, w)| (f.clone(), w)).collect()
    }

    pub fn render(&self, q: &Quantale) -> String {
        match self {
            Formula::Atom(a) => a.clone(),
            Formula::Const(v) => q.format_value(v),
            Formula::Meet(xs) | Formula::Join(xs) => {
                let op = if matches!(self, Formula::Meet(_)) { " ∧ " } else { " ∨ " };
                let unit = if matches!(self, Formula::Meet(_)) { "⊤" } else { "⊥" };
                if xs.is_empty() {
                    unit.to_string()
                } else {
                    format!("({})", xs.iter().map(|x| x.render(q)).collect::<Vec<_>>().join(op))
                }
            }
            Formula::Nabla(g) => {
                let parts: Vec<String> =
                    g.iter().map(|(f, w)| format!("{}: {}", f.render(q), q.format_value(w))).collect();
                format!("∇{{{}}}", parts.join(", "))
            }
        }
    }
}

/// A coalgebra with predicates for atoms. Each predicate is a V-functor
/// `X → V`: `X(x,x') ⊗ φx ≤ φx'`.
#[derive(Clone, Debug)]
pub struct Model {
    pub coalgebra: Arc<Coalgebra>,
    pub valuation: BTreeMap<String, Vec<QValue>>,
}

impl Model {
    /// With `closure`, each predicate is replaced by its up-closure first.
    pub fn new(coalgebra: Arc<Coalgebra>, valuation: BTreeMap<String, Vec<QValue>>, closure: bool) -> Result<Model> {
        let x = &coalgebra.space;
        let q = x.quantale();
        let mut out = BTreeMap::new();
        for (name, table) in valuation {
            if table.len() != x.len() {
                return Err(Error::Shape(format!("atom `{name}` needs one value per state")));
            }
            for v in &table {
                q.check(v)?;
            }
            let table = if closure { up_closure(x, &table) } else { table };
            for a in 0..x.len() {
                for b in 0..x.len() {
                    if !q.le(&q.tensor(x.hom(a, b), &table[a]), &table[b]) {
                        return Err(Error::NotAFunctor(format!(
                            "atom `{name}` is not monotone from `{}` to `{}`",
                            x.label(a),
                            x.label(b)
                        )));
                    }
                }
            }
            out.insert(name, table);
        }
        Ok(Model { coalgebra, valuation: out })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EvalOptions {
    /// Also compute `∇` through the generic collage lifting and compare.
    pub cross_check: bool,
    pub limits: Limits,
}

/// Evaluates formulas on one model, memoising truth tables.
pub struct Evaluator<'m> {
    model: &'m Model,
    options: EvalOptions,
    memo: HashMap<Formula, Vec<QValue>>,
    /// `∇` subformulas whose generic cross-check was skipped by the size guard.
    pub cross_checks_skipped: usize,
    pub cross_checks_done: usize,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model, options: EvalOptions) -> Evaluator<'m> {
        Evaluator { model, options, memo: HashMap::new(), cross_checks_skipped: 0, cross_checks_done: 0 }
    }

    pub fn eval(&mut self, phi: &Formula, x: usize) -> Result<QValue> {
        Ok(self.table(phi)?[x].clone())
    }

    /// `⟦φ⟧` as a table over states.
    pub fn table(&mut self, phi: &Formula) -> Result<Vec<QValue>> {
        if let Some(t) = self.memo.get(phi) {
            return Ok(t.clone());
        }
        let c = &self.model.coalgebra;
        let q = c.quantale().clone();
        let n = c.len();
        let t = match phi {
            Formula::Atom(a) => {
                self.model.valuation.get(a).cloned().ok_or_else(|| Error::Precondition(format!("atom `{a}` has no valuation")))?
            }
            Formula::Const(v) => {
                q.check(v)?;
                vec![v.clone(); n]
            }
            Formula::Meet(xs) | Formula::Join(xs) => {
                let tables = xs.iter().map(|x| self.table(x)).collect::<Result<Vec<_>>>()?;
                (0..n)
                    .map(|s| {
                        let vals = tables.iter().map(|t| t[s].clone());
                        if matches!(phi, Formula::Meet(_)) {
                            q.meet(vals)
                        } else {
                            q.join(vals)
                        }
                    })
                    .collect()
            }
            Formula::Nabla(g) => self.nabla(g)?,
        };
        self.memo.insert(phi.clone(), t.clone());
        Ok(t)
    }

    fn nabla(&mut self, g: &[(Formula, QValue)]) -> Result<Vec<QValue>> {
        let c = self.model.coalgebra.clone();
        let q = c.quantale().clone();
        let g = Formula::normalized_weights(&q, g);
        for (_, w) in &g {
            q.check(w)?;
        }
        let sub = g.iter().map(|(f, _)| self.table(f)).collect::<Result<Vec<_>>>()?;
        let gamma: Vec<QValue> = g.iter().map(|(_, w)| w.clone()).collect();
        let closed = ClosedForm::of(&c.expr);
        let closed_values = closed.map(|which| {
            // ⊩ as a module from the discrete formula stage to X^op; its
            // lifting under T∂ has the closed form of the dual shape.
            let sat = satisfaction_module(&c, &sub);
            let dual_shape = match which {
                ClosedForm::L => ClosedForm::U,
                ClosedForm::U => ClosedForm::L,
                ClosedForm::P => ClosedForm::P,
            };
            (0..c.len())
                .map(|x| closed_form_entry(dual_shape, &sat, c.successors(x).expect("table"), &gamma))
                .collect::<Vec<_>>()
        });
        if closed.is_some() && !self.options.cross_check {
            return Ok(closed_values.expect("closed form"));
        }
        let generic = match self.generic_nabla(&c, &sub, &gamma) {
            Ok(v) => v,
            Err(Error::TooManyObjects { .. }) if closed.is_some() => {
                self.cross_checks_skipped += 1;
                return Ok(closed_values.expect("closed form"));
            }
            Err(e) => return Err(e),
        };
        if let Some(cv) = closed_values {
            self.cross_checks_done += 1;
            if cv != generic {
                return Err(Error::Internal(format!(
                    "∇ closed form {cv:?} disagrees with the collage lifting {generic:?}"
                )));
            }
        }
        Ok(generic)
    }

    fn generic_nabla(&self, c: &Coalgebra, sub: &[Vec<QValue>], gamma: &[QValue]) -> Result<Vec<QValue>> {
        let sat = satisfaction_module(c, sub);
        let dual = EndoExpr::dual(c.expr.clone());
        let lifted = lift_via_collage(&dual, &sat, self.options.limits)?;
        let gamma_obj = lifted
            .src
            .index_of(&crate::endo::Elem::Table(gamma.to_vec()))
            .ok_or_else(|| Error::Precondition("∇ needs T of the form L, U or P over the formula stage".into()))?;
        (0..c.len())
            .map(|x| {
                let elem = &c.ev.elems[c.xi.apply(x)];
                let row = lifted.dst.index_of(elem).ok_or_else(|| Error::Internal("ξ(x) missing from T X".into()))?;
                Ok(lifted.module.get(row, gamma_obj).clone())
            })
            .collect()
    }
}

/// `⊩(y, φ_i)` as a module from the discrete stage `{φ_i}` to `X^op`.
fn satisfaction_module(c: &Coalgebra, sub: &[Vec<QValue>]) -> Module {
    let q = c.quantale();
    let stage = Arc::new(VCat::discrete_on(q, (0..sub.len()).map(|i| format!("φ{i}")).collect()).expect("labels"));
    let xop = Arc::new(c.space.opposite());
    Module::from_fn(stage, xop, |y, i| sub[i][y].clone()).expect("satisfaction shape")
}

/// One-shot evaluation.
pub fn eval(model: &Model, phi: &Formula, x: usize, options: EvalOptions) -> Result<QValue> {
    Evaluator::new(model, options).eval(phi, x)
}

/// A failed invariance check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceFailure {
    pub formula: Formula,
    pub state: usize,
    pub image: usize,
    pub source_value: QValue,
    pub target_value: QValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub checks: usize,
    pub failure: Option<InvarianceFailure>,
}

/// For a coalgebra morphism `f: m1 → m2` with compatible valuations, checks
/// `⟦φ⟧₁(x) = ⟦φ⟧₂(f x)` for all formulas and states.
pub fn check_invariance(
    m1: &Model,
    m2: &Model,
    f: &VFunctor,
    formulas: &[Formula],
    options: EvalOptions,
) -> Result<InvarianceReport> {
    if !m1.coalgebra.is_morphism_to(&m2.coalgebra, f)? {
        return Err(Error::Precondition("not a coalgebra morphism".into()));
    }
    for (name, t1) in &m1.valuation {
        let t2 = m2.valuation.get(name).ok_or_else(|| Error::Precondition(format!("atom `{name}` missing in target")))?;
        if (0..t1.len()).any(|x| t1[x] != t2[f.apply(x)]) {
            return Err(Error::Precondition(format!("valuation of `{name}` is not preserved by the morphism")));
        }
    }
    let mut e1 = Evaluator::new(m1, options);
    let mut e2 = Evaluator::new(m2, options);
    let mut checks = 0;
    for phi in formulas {
        let (t1, t2) = (e1.table(phi)?, e2.table(phi)?);
        for x in 0..t1.len() {
            checks += 1;
            if t1[x] != t2[f.apply(x)] {
                return Ok(InvarianceReport {
                    checks,
                    failure: Some(InvarianceFailure {
                        formula: phi.clone(),
                        state: x,
                        image: f.apply(x),
                        source_value: t1[x].clone(),
                        target_value: t2[f.apply(x)].clone(),
                    }),
                });
            }
        }
    }
    Ok(InvarianceReport { checks, failure: None })
}

/// The stream functor `2 ⊗ Id` with `2` the two-object indiscrete category,
/// and the 2-state unrollings of `000…` and `0101…`.
pub fn stream_example(limits: Limits) -> Result<(Coalgebra, Coalgebra)> {
    let q = Quantale::two();
    let two = VCat::from_fn(q.clone(), vec!["0".into(), "1".into()], |_, _| q.unit())?;
    let expr = EndoExpr::tensor(EndoExpr::constant("2", two), EndoExpr::Id);
    let zeros = Arc::new(VCat::discrete_on(&q, vec!["z0".into(), "z1".into()])?);
    let alt = Arc::new(VCat::discrete_on(&q, vec!["s0".into(), "s1".into()])?);
    let ev_z = Arc::new(evaluate(&expr, &zeros, limits)?);
    let ev_a = Arc::new(evaluate(&expr, &alt, limits)?);
    let pair = |ev: &Evaluated, out: usize, next: usize| {
        ev.index_of(&crate::endo::Elem::Pair(out, next)).ok_or_else(|| Error::Internal("stream pair".into()))
    };
    let xi_z = vec![pair(&ev_z, 0, 1)?, pair(&ev_z, 0, 0)?];
    let xi_a = vec![pair(&ev_a, 0, 1)?, pair(&ev_a, 1, 0)?];
    Ok((Coalgebra::on(zeros, expr.clone(), ev_z, xi_z)?, Coalgebra::on(alt, expr, ev_a, xi_a)?))
}
