//! Relation lifting through collages, the closed forms for `L`, `U` and `P`,
//! distributive laws over the presheaf monad, and falsification batteries for
//! the Beck–Chevalley condition.

use std::sync::Arc;

use crate::endo::{evaluate, EndoExpr, Evaluated};
use crate::error::{Error, Result};
use crate::quantale::{QValue, Quantale};
use crate::squares::{cocomma, LaxSquare};
use crate::vcat::{Limits, VCat, VFunctor};
use crate::vmod::{collage, graph_lower, graph_upper, yoneda, Module};

/// `T̄(R): TA -|-> TB` together with the evaluations of `T` it lives on.
#[derive(Clone, Debug)]
pub struct Lifting {
    pub module: Module,
    pub src: Arc<Evaluated>,
    pub dst: Arc<Evaluated>,
}

/// `T̄(R)(Y, X) = T(Coll R)(T i0 Y, T i1 X)`.
pub fn lift_via_collage(expr: &EndoExpr, r: &Module, limits: Limits) -> Result<Lifting> {
    let src = Arc::new(evaluate(expr, r.src(), limits)?);
    let dst = Arc::new(evaluate(expr, r.dst(), limits)?);
    lift_via_collage_on(expr, r, &src, &dst, limits)
}

/// As [`lift_via_collage`], reusing evaluations of `T` at both ends.
pub fn lift_via_collage_on(
    expr: &EndoExpr,
    r: &Module,
    src: &Arc<Evaluated>,
    dst: &Arc<Evaluated>,
    limits: Limits,
) -> Result<Lifting> {
    let c = collage(r);
    let ev = evaluate(expr, &c.coll, limits)?;
    let ti0 = dst.functor_to(&ev, &c.i0)?;
    let ti1 = src.functor_to(&ev, &c.i1)?;
    let module = Module::from_fn(src.cat.clone(), dst.cat.clone(), |y, x| ev.cat.hom(ti0.apply(y), ti1.apply(x)).clone())?;
    Ok(Lifting { module, src: src.clone(), dst: dst.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    L,
    U,
    P,
}

impl ClosedForm {
    pub fn expr(self) -> EndoExpr {
        match self {
            ClosedForm::L => EndoExpr::lower(EndoExpr::Id),
            ClosedForm::U => EndoExpr::upper(EndoExpr::Id),
            ClosedForm::P => EndoExpr::power(EndoExpr::Id),
        }
    }

    /// Recognises `L(id)`, `U(id)` and `P(id)`.
    pub fn of(expr: &EndoExpr) -> Option<ClosedForm> {
        [ClosedForm::L, ClosedForm::U, ClosedForm::P].into_iter().find(|c| c.expr() == *expr)
    }
}

/// `⋀_b [B b, ⋁_a R(b,a) ⊗ A a]`, the lower half of the Egli–Milner lifting.
fn lower_half(q: &Quantale, r: &Module, big_b: &[QValue], big_a: &[QValue]) -> QValue {
    q.meet((0..big_b.len()).map(|b| {
        q.hom(&big_b[b], &q.join((0..big_a.len()).map(|a| q.tensor(r.get(b, a), &big_a[a]))))
    }))
}

/// `⋀_a [A a, ⋁_b R(b,a) ⊗ B b]`.
fn upper_half(q: &Quantale, r: &Module, big_b: &[QValue], big_a: &[QValue]) -> QValue {
    q.meet((0..big_a.len()).map(|a| {
        q.hom(&big_a[a], &q.join((0..big_b.len()).map(|b| q.tensor(r.get(b, a), &big_b[b]))))
    }))
}

/// The closed-form value of `T̄(R)(B, A)` on tables `B` over `R`'s
/// destination and `A` over its source.
pub fn closed_form_entry(which: ClosedForm, r: &Module, big_b: &[QValue], big_a: &[QValue]) -> QValue {
    let q = r.src().quantale();
    match which {
        ClosedForm::L => lower_half(q, r, big_b, big_a),
        ClosedForm::U => upper_half(q, r, big_b, big_a),
        ClosedForm::P => q.tensor(&lower_half(q, r, big_b, big_a), &upper_half(q, r, big_b, big_a)),
    }
}

/// `L̄`, `Ū` or `P̄` from the closed formulas, on the same objects as
/// [`lift_via_collage`] with `L(id)`, `U(id)` or `P(id)`.
pub fn lift_closed_form(which: ClosedForm, r: &Module, limits: Limits) -> Result<Lifting> {
    let expr = which.expr();
    let src = Arc::new(evaluate(&expr, r.src(), limits)?);
    let dst = Arc::new(evaluate(&expr, r.dst(), limits)?);
    let module = Module::from_fn(src.cat.clone(), dst.cat.clone(), |y, x| {
        closed_form_entry(which, r, dst.table(y).expect("table"), src.table(x).expect("table"))
    })?;
    Ok(Lifting { module, src, dst })
}

/// Outcome of one law in a battery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawOutcome {
    pub law: String,
    pub cases: usize,
    pub failure: Option<String>,
}

impl LawOutcome {
    fn new(law: &str) -> LawOutcome {
        LawOutcome { law: law.to_string(), cases: 0, failure: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(witness());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatteryReport {
    pub functor: String,
    pub outcomes: Vec<LawOutcome>,
    /// Samples skipped because of the size guard.
    pub skipped: usize,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failure.is_none())
    }

    pub fn first_failure(&self) -> Option<(&str, &str)> {
        self.outcomes.iter().find_map(|o| o.failure.as_deref().map(|f| (o.law.as_str(), f)))
    }
}

fn lifts_equal(x: &Lifting, y: &Module) -> bool {
    x.module.matrix() == y.matrix()
}

/// Checks `T̄(id) = id`, `T̄(S·R) = T̄(S)·T̄(R)` and `T̄(f◇) = (Tf)◇`.
///
/// A failure of any of these means `T` has no functorial lifting (the
/// collage formula is the only candidate), so `T` fails the Beck–Chevalley
/// condition. Passing proves nothing beyond the samples.
pub fn functoriality_battery(
    expr: &EndoExpr,
    pairs: &[(Module, Module)],
    functors: &[VFunctor],
    limits: Limits,
) -> Result<BatteryReport> {
    let mut identity = LawOutcome::new("identity");
    let mut composition = LawOutcome::new("composition");
    let mut extension = LawOutcome::new("extension");
    let mut skipped = 0;
    for (s, r) in pairs {
        let outcome = (|| -> Result<()> {
            let sr = s.after(r)?;
            let ls = lift_via_collage(expr, s, limits)?;
            let lr = lift_via_collage_on(expr, r, &Arc::new(evaluate(expr, r.src(), limits)?), &ls.src, limits)?;
            let lsr = lift_via_collage_on(expr, &sr, &lr.src, &ls.dst, limits)?;
            let product = ls.module.after(&lr.module)?;
            composition.record(lifts_equal(&lsr, &product), || {
                format!("T̄(S·R) ≠ T̄(S)·T̄(R) for S over {:?}, R over {:?}", s.dst().objects(), r.src().objects())
            });
            for a in [r.src(), r.dst()] {
                let lid = lift_via_collage(expr, &Module::identity(a.clone()), limits)?;
                identity.record(lifts_equal(&lid, &Module::identity(lid.src.cat.clone())), || {
                    format!("T̄(id) ≠ id on {:?}", a.objects())
                });
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => {}
            Err(Error::TooManyObjects { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    for f in functors {
        let outcome = (|| -> Result<()> {
            let lifted = lift_via_collage(expr, &graph_lower(f), limits)?;
            let tf = lifted.src.functor_to(&lifted.dst, f)?;
            extension.record(lifts_equal(&lifted, &graph_lower(&tf)), || format!("T̄(f◇) ≠ (Tf)◇ for {f:?}"));
            Ok(())
        })();
        match outcome {
            Ok(()) => {}
            Err(Error::TooManyObjects { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(BatteryReport { functor: expr.to_string(), outcomes: vec![identity, composition, extension], skipped })
}

/// Witness of a comparison functor failing to be a fully faithful functor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomWitness {
    pub from: String,
    pub to: String,
    pub src_value: QValue,
    pub dst_value: QValue,
}

fn ff_witness(f: &VFunctor) -> Option<HomWitness> {
    let (a, b) = (f.src(), f.dst());
    let n = a.len();
    (0..n * n).map(|k| (k / n, k % n)).find_map(|(x, y)| {
        let (u, v) = (a.hom(x, y), b.hom(f.apply(x), f.apply(y)));
        (u != v).then(|| HomWitness {
            from: a.label(x).to_string(),
            to: a.label(y).to_string(),
            src_value: u.clone(),
            dst_value: v.clone(),
        })
    })
}

/// `T` applied to every functor of a lax square.
pub fn image_square(expr: &EndoExpr, sq: &LaxSquare, limits: Limits) -> Result<LaxSquare> {
    let ev = |c: &Arc<VCat>| evaluate(expr, c, limits);
    let (p, a, b, c) = (ev(sq.p0.src())?, ev(sq.p0.dst())?, ev(sq.p1.dst())?, ev(sq.f.dst())?);
    LaxSquare::new(p.functor_to(&a, &sq.p0)?, p.functor_to(&b, &sq.p1)?, a.functor_to(&c, &sq.f)?, b.functor_to(&c, &sq.g)?)
}

/// Checks that `T` preserves full faithfulness of each `j`, and that for
/// each `(f, g)` with common source the comparison `Tf ▷ Tg → T(f ▷ g)` is a
/// fully faithful functor.
pub fn bcc_battery(
    expr: &EndoExpr,
    ff_samples: &[VFunctor],
    cocomma_samples: &[(VFunctor, VFunctor)],
    limits: Limits,
) -> Result<BccReport> {
    let mut ff = LawOutcome::new("ff_preservation");
    let mut can = LawOutcome::new("cocomma_comparison");
    let mut ff_witness_out = None;
    let mut can_witness_out = None;
    let mut skipped = 0;
    for j in ff_samples {
        if !j.is_fully_faithful() {
            return Err(Error::Precondition(format!("ff sample {j:?} is not fully faithful")));
        }
        let tj = match evaluate(expr, j.src(), limits).and_then(|a| {
            let b = evaluate(expr, j.dst(), limits)?;
            a.functor_to(&b, j)
        }) {
            Ok(tj) => tj,
            Err(Error::TooManyObjects { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let w = ff_witness(&tj);
        if w.is_some() && ff_witness_out.is_none() {
            ff_witness_out = w.clone();
        }
        ff.record(w.is_none(), || {
            let w = w.as_ref().expect("witness");
            format!("T{j:?} is not fully faithful at ({}, {})", w.from, w.to)
        });
    }
    for (f, g) in cocomma_samples {
        let result = (|| -> Result<(VFunctor, Option<HomWitness>, bool)> {
            let k = cocomma(f, g)?;
            let ev = |c: &Arc<VCat>| evaluate(expr, c, limits);
            let (tc, ta, tb, tk) = (ev(f.src())?, ev(f.dst())?, ev(g.dst())?, ev(&k.cat)?);
            let tf = tc.functor_to(&ta, f)?;
            let tg = tc.functor_to(&tb, g)?;
            let kk = cocomma(&tf, &tg)?;
            let ti0 = ta.functor_to(&tk, &k.i0)?;
            let ti1 = tb.functor_to(&tk, &k.i1)?;
            let map: Vec<usize> = ti0.map().iter().chain(ti1.map()).copied().collect();
            let comparison = VFunctor::new(kk.cat.clone(), tk.cat.clone(), map)?;
            let valid = comparison.is_valid();
            let w = ff_witness(&comparison);
            Ok((comparison, w, valid))
        })();
        match result {
            Ok((comparison, w, valid)) => {
                if w.is_some() && can_witness_out.is_none() {
                    can_witness_out = w.clone();
                }
                can.record(valid && w.is_none(), || match &w {
                    Some(w) => format!("comparison not fully faithful at ({}, {})", w.from, w.to),
                    None => format!("comparison {comparison:?} is not a functor"),
                });
            }
            Err(Error::TooManyObjects { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(BccReport {
        functor: expr.to_string(),
        outcomes: vec![ff, can],
        ff_witness: ff_witness_out,
        cocomma_witness: can_witness_out,
        skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BccReport {
    pub functor: String,
    pub outcomes: Vec<LawOutcome>,
    pub ff_witness: Option<HomWitness>,
    pub cocomma_witness: Option<HomWitness>,
    pub skipped: usize,
}

impl BccReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failure.is_none())
    }
}

/// `δ_A: T L A → L T A` derived from the lifting of `ev_A`.
#[derive(Clone, Debug)]
pub struct DistributiveLaw {
    pub base: Arc<VCat>,
    /// `L A`.
    pub la: Arc<Evaluated>,
    /// `T (L A)`.
    pub tla: Arc<Evaluated>,
    /// `L (T A)`.
    pub lta: Arc<Evaluated>,
    /// `T A`.
    pub ta: Arc<Evaluated>,
    pub component: VFunctor,
}

fn lower_id() -> EndoExpr {
    EndoExpr::lower(EndoExpr::Id)
}

/// `R = T̄((yon_A)^◇)`, curried: `δ_A(Φ)(x) = R(x, Φ)`.
pub fn derive_distributive_law(expr: &EndoExpr, a: &Arc<VCat>, limits: Limits) -> Result<DistributiveLaw> {
    let la = Arc::new(evaluate(&lower_id(), a, limits)?);
    let la_tables = crate::vcat::TableCategory::new((*la.cat).clone(), la.elems.iter().map(|e| match e {
        crate::endo::Elem::Table(t) => t.clone(),
        _ => unreachable!("presheaf objects are tables"),
    }).collect());
    let yon = yoneda(a, &la_tables)?;
    let yon = VFunctor::new(a.clone(), la.cat.clone(), yon.map().to_vec())?;
    let lifted = lift_via_collage(expr, &graph_upper(&yon), limits)?;
    // lifted.module: T(LA) -|-> TA
    let tla = lifted.src.clone();
    let ta = lifted.dst.clone();
    let lta = Arc::new(evaluate(&lower_id(), &ta.cat, limits)?);
    let map = (0..tla.len())
        .map(|phi| {
            let table: Vec<QValue> = (0..ta.len()).map(|x| lifted.module.get(x, phi).clone()).collect();
            lta.index_of(&crate::endo::Elem::Table(table)).ok_or_else(|| {
                Error::NotAFunctor(format!("δ sends `{}` outside the presheaves on T A", tla.cat.label(phi)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let component = VFunctor::new(tla.cat.clone(), lta.cat.clone(), map)?;
    if let Some(v) = component.validate().first() {
        return Err(Error::NotAFunctor(format!(
            "δ violates the hom inequality at ({}, {})",
            tla.cat.label(v.a),
            tla.cat.label(v.a2)
        )));
    }
    Ok(DistributiveLaw { base: a.clone(), la, tla, lta, ta, component })
}

/// `mult: L L A → L A`, `W ↦ (a ↦ ⋁_w W(w) ⊗ w(a))`.
pub fn multiplication(la: &Evaluated, lla: &Evaluated) -> Result<VFunctor> {
    let q = la.cat.quantale();
    let n = la.base.len();
    let map = (0..lla.len())
        .map(|w| {
            let big_w = lla.table(w).expect("table");
            let table: Vec<QValue> = (0..n)
                .map(|a| q.join(big_w.iter().enumerate().map(|(x, v)| q.tensor(v, &la.table(x).expect("table")[a]))))
                .collect();
            la.index_of(&crate::endo::Elem::Table(table)).ok_or_else(|| Error::Internal("mult left L A".into()))
        })
        .collect::<Result<_>>()?;
    VFunctor::new(lla.cat.clone(), la.cat.clone(), map)
}

/// Outcome of the two distributive-law diagrams on one base category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributiveOutcome {
    pub base: Vec<String>,
    pub unit: Option<bool>,
    /// `None` when the double-presheaf layer exceeded the size guard.
    pub multiplication: Option<bool>,
    pub error: Option<String>,
}

fn same_object_map(f: &VFunctor, g: &VFunctor) -> bool {
    f.map() == g.map() && **f.dst() == **g.dst()
}

/// Checks `δ ∘ T(yon) = yon_T` and `δ ∘ T(mult) = mult_T ∘ L(δ) ∘ δ_L`.
pub fn check_distributive_axioms(expr: &EndoExpr, bases: &[Arc<VCat>], limits: Limits) -> Vec<DistributiveOutcome> {
    bases
        .iter()
        .map(|a| {
            let mut out =
                DistributiveOutcome { base: a.objects().to_vec(), unit: None, multiplication: None, error: None };
            let dl = match derive_distributive_law(expr, a, limits) {
                Ok(dl) => dl,
                Err(e) => {
                    out.error = Some(e.to_string());
                    return out;
                }
            };
            match unit_law(&dl) {
                Ok(ok) => out.unit = Some(ok),
                Err(e) => out.error = Some(e.to_string()),
            }
            match multiplication_law(expr, &dl, limits) {
                Ok(ok) => out.multiplication = Some(ok),
                Err(Error::TooManyObjects { .. }) => {}
                Err(e) => out.error = Some(e.to_string()),
            }
            out
        })
        .collect()
}

fn unit_law(dl: &DistributiveLaw) -> Result<bool> {
    let a = &dl.base;
    let la_tables = table_category(&dl.la);
    let yon = yoneda(a, &la_tables)?;
    let yon = VFunctor::new(a.clone(), dl.la.cat.clone(), yon.map().to_vec())?;
    let t_yon = dl.ta.functor_to(&dl.tla, &yon)?;
    let lhs = t_yon.then(&dl.component)?;
    let yon_t = yoneda(&dl.ta.cat, &table_category(&dl.lta))?;
    Ok(lhs.map() == yon_t.map())
}

fn table_category(ev: &Evaluated) -> crate::vcat::TableCategory {
    crate::vcat::TableCategory::new(
        (*ev.cat).clone(),
        (0..ev.len()).map(|x| ev.table(x).expect("table").to_vec()).collect(),
    )
}

fn multiplication_law(expr: &EndoExpr, dl: &DistributiveLaw, limits: Limits) -> Result<bool> {
    // L L A and T(L L A)
    let lla = evaluate(&lower_id(), &dl.la.cat, limits)?;
    let mult_a = multiplication(&dl.la, &lla)?;
    let tlla = evaluate(expr, &lla.cat, limits)?;
    let t_mult = tlla.functor_to(&dl.tla, &mult_a)?;
    let lhs = t_mult.then(&dl.component)?;
    // δ at L A: T(L(LA)) → L(T(LA))
    let dl_la = derive_distributive_law(expr, &dl.la.cat, limits)?;
    // L(δ_A): L(T L A) → L(L T A)
    let l_tla = &dl_la.lta;
    let llta = evaluate(&lower_id(), &dl.lta.cat, limits)?;
    let l_delta = l_tla.functor_to(&llta, &dl.component)?;
    let mult_ta = multiplication(&dl.lta, &llta)?;
    // dl_la.component goes T(L(LA)) → L(T(LA)); its source must be T(LLA).
    if *dl_la.tla.cat != *tlla.cat {
        return Err(Error::Internal("T(L L A) evaluated inconsistently".into()));
    }
    let rhs_map: Vec<usize> =
        dl_la.component.map().iter().map(|&x| mult_ta.apply(l_delta.apply(x))).collect();
    let rhs = VFunctor::new(tlla.cat.clone(), dl.lta.cat.clone(), rhs_map)?;
    Ok(same_object_map(&lhs, &rhs))
}

/// `R ≤ R' ⇒ T̄(R) ≤ T̄(R')` on one pair.
pub fn lifting_is_monotone_on(expr: &EndoExpr, r: &Module, r2: &Module, limits: Limits) -> Result<bool> {
    if !r.le(r2) {
        return Err(Error::Precondition("monotonicity check needs R ≤ R'".into()));
    }
    let x = lift_via_collage(expr, r, limits)?;
    let y = lift_via_collage_on(expr, r2, &x.src, &x.dst, limits)?;
    Ok(x.module.le(&y.module))
}
