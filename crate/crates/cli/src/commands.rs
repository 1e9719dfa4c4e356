//! One function per subcommand. Each returns a [`Report`]; input problems
//! become `InputError` reports rather than panics.

use std::sync::Arc;

use qcat::coalg::{
    bisimilarity_closure, find_coalgebra_morphisms, largest_simulation, EvalOptions, Evaluator, LiftPath, Witness,
};
use qcat::gen;
use qcat::lifting::{
    bcc_battery, check_distributive_axioms, functoriality_battery, image_square, lift_closed_form, lift_via_collage,
    BatteryReport, ClosedForm, LawOutcome,
};
use qcat::squares::{cocomma, compose_collages, factorize, LaxSquare, Route};
use qcat::vmod::{collage, module_of_cospan, Module};
use qcat::{Error, Limits, VCat, VFunctor};
use rand::Rng;
use rayon::prelude::*;

use crate::report::{category_table, matrix_inline, module_table, values_inline, Report};
use crate::workspace::Workspace;

/// Flags shared by all commands.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub limits: Limits,
    pub seed: u64,
    pub route: Route,
}

type Outcome = Result<Report, String>;

fn module<'w>(ws: &'w Workspace, name: &str) -> Result<&'w Module, String> {
    ws.modules.get(name).ok_or_else(|| format!("unknown module `{name}`"))
}

fn functor<'w>(ws: &'w Workspace, name: &str) -> Result<&'w VFunctor, String> {
    ws.functors.get(name).ok_or_else(|| format!("unknown functor `{name}`"))
}

fn input(e: Error) -> String {
    e.to_string()
}

fn render_map(f: &VFunctor) -> String {
    let parts: Vec<String> =
        (0..f.src().len()).map(|x| format!("{}->{}", f.src().label(x), f.dst().label(f.apply(x)))).collect();
    format!("{{{}}}", parts.join(","))
}

pub fn validate(ws: &Workspace) -> Outcome {
    let mut r = Report::new("validate");
    r.key("quantale", &ws.quantale)
        .key("categories", ws.categories.len())
        .key("functors", ws.functors.len())
        .key("modules", ws.modules.len())
        .key("squares", ws.squares.len())
        .key("exprs", ws.exprs.len())
        .key("coalgebras", ws.coalgebras.len())
        .key("models", ws.models.len())
        .key("formulas", ws.formulas.len());
    r.line(format!("workspace over {} is well formed", ws.quantale));
    for (name, c) in &ws.categories {
        r.line(format!("category {name}: {} object(s)", c.len()));
    }
    for (name, f) in &ws.functors {
        let ff = if f.is_fully_faithful() { ", fully faithful" } else { "" };
        r.line(format!("functor {name}: {}{ff}", render_map(f)));
    }
    for (name, e) in &ws.exprs {
        r.line(format!("expression {name}: {e}"));
    }
    Ok(r)
}

pub fn compose(ws: &Workspace, first: &str, second: &str, opts: Options) -> Outcome {
    let (rm, sm) = (module(ws, first)?, module(ws, second)?);
    let sr = sm.after(rm).map_err(input)?;
    let (cs, cr) = (collage(sm), collage(rm));
    let mut rep = Report::new("compose");
    rep.key("matrix", matrix_inline(&ws.quantale, &sr.matrix()));
    for (key, route) in [("pushout_route", Route::Pushout), ("cocomma_route", Route::Cocomma)] {
        let c = compose_collages(&cs, &cr, route).map_err(input)?;
        let via = c.module();
        let agrees = via.matrix() == sr.matrix();
        rep.key(key, if agrees { "agrees" } else { "differs" });
        if !agrees {
            rep.fail();
            rep.line(format!("{key} gives {}", matrix_inline(&ws.quantale, &via.matrix())));
        }
        if route == opts.route {
            rep.line(format!("composite collage via the {key}:"));
            for l in category_table(&c.coll) {
                rep.line(l);
            }
        }
    }
    rep.line(format!("{second} · {first}:"));
    for l in module_table(&sr) {
        rep.line(l);
    }
    Ok(rep)
}

pub fn collage_cmd(ws: &Workspace, name: &str) -> Outcome {
    let r = module(ws, name)?;
    let c = collage(r);
    let back = module_of_cospan(&c.i0, &c.i1).map_err(input)?;
    let mut rep = Report::new("collage");
    rep.key("objects", format!("[{}]", c.coll.objects().join(",")));
    rep.key("hom", matrix_inline(&ws.quantale, &c.coll.hom_matrix()));
    let ok = back.matrix() == r.matrix();
    rep.key("round_trip", ok);
    if !ok {
        rep.fail();
    }
    rep.line(format!("collage of {name} (codomain objects first):"));
    for l in category_table(&c.coll) {
        rep.line(l);
    }
    Ok(rep)
}

fn exactness_into(rep: &mut Report, prefix: &str, sq: &LaxSquare) {
    let q = sq.f.dst().quantale().clone();
    let e = sq.exactness();
    rep.key(&format!("{prefix}exact"), e.exact);
    if let Some(w) = &e.witness {
        rep.fail();
        let (a, b) = (sq.f.src().label(w.a), sq.g.src().label(w.b));
        rep.key(&format!("{prefix}witness"), format!("({a}, {b})"));
        rep.key(&format!("{prefix}lhs"), q.format_value(&w.lhs));
        rep.key(&format!("{prefix}rhs"), q.format_value(&w.rhs));
        rep.line(format!(
            "not exact at ({a}, {b}): C(fa, gb) = {} but the join over the apex is {}",
            q.format_value(&w.lhs),
            q.format_value(&w.rhs)
        ));
    }
    if let Some(w) = &e.near_exactness_failure {
        rep.key(&format!("{prefix}near_exactness"), "violated");
        rep.line(format!("near-exactness fails at ({}, {})", sq.f.src().label(w.a), sq.g.src().label(w.b)));
    }
}

pub fn exact(ws: &Workspace, square: Option<&str>, functor: Option<&str>, opts: Options) -> Outcome {
    let names: Vec<&String> = match square {
        Some(n) => vec![ws.squares.get_key_value(n).ok_or_else(|| format!("unknown square `{n}`"))?.0],
        None => ws.squares.keys().collect(),
    };
    if names.is_empty() {
        return Err("the workspace has no squares".into());
    }
    let flag = functor.map(|f| ws.expr(f)).transpose()?;
    let mut rep = Report::new("exact");
    for name in names {
        let entry = &ws.squares[name];
        let expr = flag.clone().or_else(|| entry.under.clone());
        let sq = match &expr {
            Some(t) => image_square(t, &entry.square, opts.limits).map_err(input)?,
            None => entry.square.clone(),
        };
        let title = match &expr {
            Some(t) => format!("{t} applied to square {name}"),
            None => format!("square {name}"),
        };
        rep.line(title);
        exactness_into(&mut rep, &format!("{name}."), &sq);
    }
    Ok(rep)
}

pub fn cocomma_cmd(ws: &Workspace, f: &str, g: &str) -> Outcome {
    let (f, g) = (functor(ws, f)?, functor(ws, g)?);
    let k = cocomma(f, g).map_err(input)?;
    let sq = k.square(f, g).map_err(input)?;
    let mut rep = Report::new("cocomma");
    rep.key("objects", format!("[{}]", k.cat.objects().join(",")));
    rep.key("hom", matrix_inline(&ws.quantale, &k.cat.hom_matrix()));
    for l in category_table(&k.cat) {
        rep.line(l);
    }
    exactness_into(&mut rep, "", &sq);
    Ok(rep)
}

pub fn factorize_cmd(ws: &Workspace, name: &str) -> Outcome {
    let f = functor(ws, name)?;
    let (e, j) = factorize(f).map_err(input)?;
    let mut rep = Report::new("factorize");
    let recomposed = e.then(&j).map_err(input)?;
    let checks = [
        ("surjective_on_objects", e.is_surjective_on_objects()),
        ("fully_faithful", j.is_fully_faithful()),
        ("recomposes", recomposed.map() == f.map()),
    ];
    rep.key("middle", format!("[{}]", j.src().objects().join(",")));
    rep.key("middle_hom", matrix_inline(&ws.quantale, &j.src().hom_matrix()));
    for (k, ok) in checks {
        rep.key(k, ok);
        if !ok {
            rep.fail();
        }
    }
    rep.line(format!("{name} = j · e through:"));
    for l in category_table(j.src()) {
        rep.line(l);
    }
    Ok(rep)
}

pub fn lift(ws: &Workspace, functor: &str, module_name: &str, opts: Options) -> Outcome {
    let expr = ws.expr(functor)?;
    let r = module(ws, module_name)?;
    let l = lift_via_collage(&expr, r, opts.limits).map_err(input)?;
    let mut rep = Report::new("lift");
    rep.key("functor", &expr);
    rep.key("rows", format!("[{}]", l.module.dst().objects().join(",")));
    rep.key("cols", format!("[{}]", l.module.src().objects().join(",")));
    rep.key("matrix", matrix_inline(&ws.quantale, &l.module.matrix()));
    if let Some(which) = ClosedForm::of(&expr) {
        let closed = lift_closed_form(which, r, opts.limits).map_err(input)?;
        let agrees = closed.module.matrix() == l.module.matrix();
        rep.key("closed_form", if agrees { "agrees" } else { "differs" });
        if !agrees {
            rep.fail();
        }
    }
    rep.line(format!("{expr} lifting of {module_name} (rows: T of its codomain, columns: T of its domain):"));
    for line in module_table(&l.module) {
        rep.line(line);
    }
    Ok(rep)
}

fn random_size<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(1..=3)
}

fn merge_outcomes(into: &mut Vec<LawOutcome>, from: &[LawOutcome]) {
    for o in from {
        match into.iter_mut().find(|x| x.law == o.law) {
            Some(x) => {
                x.cases += o.cases;
                if x.failure.is_none() {
                    x.failure.clone_from(&o.failure);
                }
            }
            None => into.push(o.clone()),
        }
    }
}

fn outcomes_into(rep: &mut Report, outcomes: &[LawOutcome]) {
    for o in outcomes {
        rep.key(&format!("{}.cases", o.law), o.cases);
        rep.key(&format!("{}.pass", o.law), o.failure.is_none());
        if let Some(f) = &o.failure {
            rep.fail();
            rep.key(&format!("{}.witness", o.law), f);
            rep.line(format!("{}: {f}", o.law));
        } else {
            rep.line(format!("{}: {} case(s) hold", o.law, o.cases));
        }
    }
}

pub fn battery(ws: &Workspace, functor: &str, samples: usize, opts: Options) -> Outcome {
    let expr = ws.expr(functor)?;
    let q = ws.quantale.clone();
    let mut pairs: Vec<(Module, Module)> = Vec::new();
    for s in ws.modules.values() {
        for r in ws.modules.values() {
            if **s.src() == **r.dst() {
                pairs.push((s.clone(), r.clone()));
            }
        }
    }
    let mut functors: Vec<VFunctor> = ws.functors.values().cloned().collect();
    let mut rng = gen::rng(opts.seed);
    for i in 0..samples {
        let a = Arc::new(gen::category(&q, "a", random_size(&mut rng), &mut rng));
        let b = Arc::new(gen::category(&q, "b", random_size(&mut rng), &mut rng));
        let c = Arc::new(gen::category(&q, "c", random_size(&mut rng), &mut rng));
        let r = gen::module(&a, &b, &mut rng);
        let s = gen::module(&b, &c, &mut rng);
        pairs.push((s, r));
        if i % 2 == 0 {
            functors.push(gen::functor(&a, &b, &mut rng));
        }
    }
    let chunks: Vec<Result<BatteryReport, Error>> = pairs
        .par_iter()
        .map(|p| functoriality_battery(&expr, std::slice::from_ref(p), &[], opts.limits))
        .chain(functors.par_iter().map(|f| functoriality_battery(&expr, &[], std::slice::from_ref(f), opts.limits)))
        .collect();
    let mut outcomes = Vec::new();
    let mut skipped = 0;
    for c in chunks {
        let c = c.map_err(input)?;
        skipped += c.skipped;
        merge_outcomes(&mut outcomes, &c.outcomes);
    }
    let mut rep = Report::new("battery");
    rep.key("functor", &expr);
    rep.key("skipped", skipped);
    rep.line(format!("functoriality battery for {expr} ({} module pair(s), {} functor(s))", pairs.len(), functors.len()));
    outcomes_into(&mut rep, &outcomes);
    if !expr.is_known_bcc(&q) {
        rep.line(format!("note: {expr} is not known to satisfy the Beck-Chevalley condition over {q}"));
    }
    Ok(rep)
}

pub fn bcc(ws: &Workspace, functor: &str, samples: usize, opts: Options) -> Outcome {
    let expr = ws.expr(functor)?;
    let q = ws.quantale.clone();
    let mut ff: Vec<VFunctor> = ws.functors.values().filter(|f| f.is_fully_faithful()).cloned().collect();
    let mut spans: Vec<(VFunctor, VFunctor)> = Vec::new();
    for f in ws.functors.values() {
        for g in ws.functors.values() {
            if **f.src() == **g.src() {
                spans.push((f.clone(), g.clone()));
            }
        }
    }
    let mut rng = gen::rng(opts.seed);
    for _ in 0..samples {
        let b = gen::category(&q, "b", random_size(&mut rng) + 1, &mut rng);
        let keep: Vec<usize> = (0..b.len()).filter(|_| rng.gen_bool(0.6)).collect();
        let a = Arc::new(b.full_subcategory(&keep).map_err(input)?);
        ff.push(VFunctor::new(a, Arc::new(b), keep).map_err(input)?);
        let c = Arc::new(gen::category(&q, "c", random_size(&mut rng), &mut rng));
        let a = Arc::new(gen::category(&q, "a", random_size(&mut rng), &mut rng));
        let b = Arc::new(gen::category(&q, "b", random_size(&mut rng), &mut rng));
        spans.push((gen::functor(&c, &a, &mut rng), gen::functor(&c, &b, &mut rng)));
    }
    let reports: Vec<_> = ff
        .par_iter()
        .map(|j| bcc_battery(&expr, std::slice::from_ref(j), &[], opts.limits))
        .chain(spans.par_iter().map(|s| bcc_battery(&expr, &[], std::slice::from_ref(s), opts.limits)))
        .collect();
    let mut rep = Report::new("bcc");
    rep.key("functor", &expr);
    let mut outcomes = Vec::new();
    let mut skipped = 0;
    let mut ff_witness = None;
    let mut cocomma_witness = None;
    for r in reports {
        let r = r.map_err(input)?;
        skipped += r.skipped;
        merge_outcomes(&mut outcomes, &r.outcomes);
        ff_witness = ff_witness.or(r.ff_witness);
        cocomma_witness = cocomma_witness.or(r.cocomma_witness);
    }
    rep.key("skipped", skipped);
    if let Some(w) = &ff_witness {
        rep.key("ff_witness", format!("({}, {})", w.from, w.to));
    }
    if let Some(w) = &cocomma_witness {
        rep.key("cocomma_witness", format!("({}, {})", w.from, w.to));
    }
    rep.line(format!("Beck-Chevalley battery for {expr} ({} ff functor(s), {} span(s))", ff.len(), spans.len()));
    outcomes_into(&mut rep, &outcomes);
    for (name, entry) in &ws.squares {
        if !entry.square.is_exact() {
            continue;
        }
        match image_square(&expr, &entry.square, opts.limits) {
            Ok(sq) => exactness_into(&mut rep, &format!("square.{name}."), &sq),
            Err(Error::TooManyObjects { .. }) => {
                rep.key(&format!("square.{name}.skipped"), true);
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(rep)
}

pub fn delta(ws: &Workspace, functor: &str, categories: &[String], opts: Options) -> Outcome {
    let expr = ws.expr(functor)?;
    let bases: Vec<(String, Arc<VCat>)> = if categories.is_empty() {
        ws.categories.iter().filter(|(_, c)| c.len() <= 2).map(|(k, v)| (k.clone(), v.clone())).collect()
    } else {
        categories
            .iter()
            .map(|n| ws.categories.get(n).map(|c| (n.clone(), c.clone())).ok_or_else(|| format!("unknown category `{n}`")))
            .collect::<Result<_, _>>()?
    };
    if bases.is_empty() {
        return Err("no base categories (pass --category)".into());
    }
    let cats: Vec<Arc<VCat>> = bases.iter().map(|(_, c)| c.clone()).collect();
    let outcomes = check_distributive_axioms(&expr, &cats, opts.limits);
    let mut rep = Report::new("delta");
    rep.key("functor", &expr);
    for ((name, _), o) in bases.iter().zip(&outcomes) {
        let show = |b: Option<bool>| b.map_or("skipped".to_string(), |b| b.to_string());
        rep.key(&format!("{name}.unit"), show(o.unit));
        rep.key(&format!("{name}.multiplication"), show(o.multiplication));
        if o.unit == Some(false) || o.multiplication == Some(false) {
            rep.fail();
        }
        if let Some(e) = &o.error {
            rep.fail();
            rep.key(&format!("{name}.error"), e);
            rep.line(format!("{name}: {e}"));
        }
        rep.line(format!("{name}: unit {}, multiplication {}", show(o.unit), show(o.multiplication)));
    }
    Ok(rep)
}

pub fn eval(ws: &Workspace, model: &str, formula: &str, state: Option<&str>, cross_check: bool, opts: Options) -> Outcome {
    let m = ws.models.get(model).ok_or_else(|| format!("unknown model `{model}`"))?;
    let phi = ws.formula(formula)?;
    let c = &m.coalgebra;
    let mut ev = Evaluator::new(m, EvalOptions { cross_check, limits: opts.limits });
    let table = ev.table(&phi).map_err(input)?;
    let q = &ws.quantale;
    let mut rep = Report::new("eval");
    rep.key("formula", phi.render(q));
    rep.key("states", format!("[{}]", c.space.objects().join(",")));
    rep.key("table", values_inline(q, &table));
    if let Some(s) = state {
        let x = c.space.index_of(s).ok_or_else(|| format!("unknown state `{s}`"))?;
        rep.key("value", q.format_value(&table[x]));
    }
    if cross_check {
        rep.key("cross_checks", ev.cross_checks_done);
        rep.key("cross_checks_skipped", ev.cross_checks_skipped);
    }
    if !c.expr.is_known_bcc(q) {
        rep.key("warning", format!("{} is not known to satisfy the Beck-Chevalley condition", c.expr));
    }
    for (x, v) in table.iter().enumerate() {
        rep.line(format!("{} ⊩ {} = {}", c.space.label(x), phi.render(q), q.format_value(v)));
    }
    Ok(rep)
}

fn coalgebra<'w>(ws: &'w Workspace, name: &str) -> Result<&'w Arc<qcat::coalg::Coalgebra>, String> {
    ws.coalgebras.get(name).ok_or_else(|| format!("unknown coalgebra `{name}`"))
}

const MAX_CANDIDATE_MAPS: u128 = 1 << 22;

pub fn morphisms(ws: &Workspace, from: &str, to: &str) -> Outcome {
    let (c1, c2) = (coalgebra(ws, from)?, coalgebra(ws, to)?);
    let ms = find_coalgebra_morphisms(c1, c2, MAX_CANDIDATE_MAPS).map_err(input)?;
    let mut rep = Report::new("morphisms");
    rep.key("count", ms.len());
    for (i, m) in ms.iter().enumerate() {
        rep.key(&format!("morphism.{i}"), render_map(m));
    }
    rep.line(format!("{} coalgebra morphism(s) {from} → {to}", ms.len()));
    Ok(rep)
}

pub fn simulate(ws: &Workspace, from: &str, to: &str, max_iterations: usize, opts: Options) -> Outcome {
    let (c1, c2) = (coalgebra(ws, from)?, coalgebra(ws, to)?);
    let sim = largest_simulation(c1, c2, max_iterations, LiftPath::Auto, opts.limits).map_err(input)?;
    let mut rep = Report::new("simulate");
    rep.key("converged", sim.converged);
    rep.key("iterations", sim.iterations);
    rep.key("fixpoint", sim.is_fixpoint);
    rep.key("module", sim.is_module);
    rep.key("rows", format!("[{}]", c2.space.objects().join(",")));
    rep.key("cols", format!("[{}]", c1.space.objects().join(",")));
    rep.key("matrix", matrix_inline(&ws.quantale, &sim.relation.matrix()));
    if !sim.non_monotone_steps.is_empty() {
        rep.fail();
        rep.key("non_monotone_steps", format!("{:?}", sim.non_monotone_steps));
    }
    if !c1.expr.is_known_bcc(&ws.quantale) {
        rep.key("warning", format!("{} is not known to satisfy the Beck-Chevalley condition", c1.expr));
    }
    rep.line(format!("largest simulation {from} → {to} (rows: states of {to}, columns: states of {from}):"));
    for l in module_table(&sim.relation) {
        rep.line(l);
    }
    Ok(rep)
}

pub fn bisim(ws: &Workspace, names: &[String]) -> Outcome {
    let names: Vec<String> = if names.is_empty() { ws.coalgebras.keys().cloned().collect() } else { names.to_vec() };
    let cs = names.iter().map(|n| coalgebra(ws, n)).collect::<Result<Vec<_>, _>>()?;
    let mut witnesses = Vec::new();
    for (i, c1) in cs.iter().enumerate() {
        for (j, c2) in cs.iter().enumerate() {
            if c1.expr != c2.expr {
                continue;
            }
            for m in find_coalgebra_morphisms(c1, c2, MAX_CANDIDATE_MAPS).map_err(input)? {
                witnesses.push(Witness { from: i, to: j, map: m.map().to_vec() });
            }
        }
    }
    let sizes: Vec<usize> = cs.iter().map(|c| c.len()).collect();
    let partition = bisimilarity_closure(&sizes, &witnesses).map_err(input)?;
    let mut rep = Report::new("bisim");
    rep.key("witnesses", witnesses.len());
    rep.key("blocks", partition.blocks.len());
    let render: Vec<String> = partition
        .blocks
        .iter()
        .map(|b| {
            let members: Vec<String> =
                b.iter().map(|&(c, x)| format!("{}.{}", names[c], cs[c].space.label(x))).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    rep.key("partition", render.join(" "));
    rep.line("bisimilarity relative to the coalgebra morphisms among the listed coalgebras:");
    for b in render {
        rep.line(format!("  {b}"));
    }
    Ok(rep)
}
