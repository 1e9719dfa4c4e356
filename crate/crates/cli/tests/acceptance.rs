//! Acceptance suite: one line per criterion, `PASS`, `FAIL` or `DEVIATION`.
//!
//! `DEVIATION` marks a criterion whose literal statement was checked as
//! written and found not to hold (or not to be checkable as stated); the
//! line says what was checked instead. Only `FAIL` makes the run fail.
//!
//! Pass criterion numbers as arguments to run a subset.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qcat::coalg::{
    bisimilarity_closure, check_invariance, find_coalgebra_morphisms, largest_simulation, stream_example, Coalgebra,
    EvalOptions, Evaluator, Formula, LiftPath, Model, Witness,
};
use qcat::endo::{evaluate, Elem, EndoExpr, Evaluated};
use qcat::gen;
use qcat::lifting::{
    check_distributive_axioms, functoriality_battery, image_square, lift_closed_form, lift_via_collage, ClosedForm,
};
use qcat::squares::{cocomma, compose_collages, LaxSquare, Route};
use qcat::vcat::{Limits, VCat, VFunctor};
use qcat::vmod::{collage, Module};
use qcat::{QValue, Quantale};
use qcat_cli::workspace::{load, Workspace};
use rand::Rng;

enum Verdict {
    Pass(String),
    Fail(String),
    Deviation(String),
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Verdict::Fail(format!($($arg)*));
        }
    };
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Verdict::Fail(format!("{}: {e}", stringify!($e))),
        }
    };
}

type Criterion = fn() -> Verdict;

const CRITERIA: [(u32, &str, Criterion); 13] = [
    (1, "quantale laws", quantale_laws),
    (2, "worked values", worked_values),
    (3, "near-exactness", near_exactness),
    (4, "structured exactness", structured_exactness),
    (5, "collage round trip", collage_round_trip),
    (6, "collage composition", collage_composition),
    (7, "lifting oracle agreement", lifting_agreement),
    (8, "functoriality battery", functoriality),
    (9, "counterexample reproduction", counterexamples),
    (10, "classical reduction at two", classical_reduction),
    (11, "distributive-law axioms", distributive_axioms),
    (12, "nabla invariance", nabla_invariance),
    (13, "simulation", simulation),
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, check) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Verdict::Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (status, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Deviation(d) => ("DEVIATION", d),
        };
        println!("criterion {n:>2} {status:<9} {name} [{secs:.2}s]: {detail}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- helpers

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn workspace(name: &str) -> Workspace {
    load(&corpus(name), Limits::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Runs the `qcat` binary; returns the exit code, stdout and wall time.
fn qcat(args: &[&str]) -> (i32, String, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_qcat")).args(args).output().expect("qcat runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned(), start.elapsed())
}

fn machine_value<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report.lines().take_while(|l| *l != "---").find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
}

fn bit(b: bool) -> QValue {
    QValue::Level(u32::from(b))
}

fn is_set(m: u32, i: usize) -> bool {
    m >> i & 1 == 1
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn discrete(prefix: &str, n: usize) -> Arc<VCat> {
    Arc::new(VCat::discrete_on(&Quantale::two(), labels(prefix, n)).unwrap())
}

/// A Boolean table as a bit mask (bit `i` for object `i`).
fn mask_of(table: &[QValue]) -> u32 {
    table.iter().enumerate().filter(|(_, v)| **v == QValue::Level(1)).fold(0, |m, (i, _)| m | 1 << i)
}

fn table_of(mask: u32, n: usize) -> Vec<QValue> {
    (0..n).map(|i| bit(is_set(mask, i))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Least representatives of the orbits of `0..2^bits` under a group given
/// by its action; each orbit is marked as soon as its least member is met.
fn orbit_representatives<G>(bits: usize, group: &[G], act: impl Fn(u32, &G) -> u32) -> Vec<u32> {
    let total = 1usize << bits;
    let mut seen = vec![false; total];
    let mut reps = Vec::new();
    for m in 0..total {
        if seen[m] {
            continue;
        }
        reps.push(m as u32);
        for g in group {
            seen[act(m as u32, g) as usize] = true;
        }
    }
    reps
}

/// Relabels an `n × n` adjacency mask (bit `i*n + j` for `i → j`).
fn relabel_square(m: u32, p: &[usize], n: usize) -> u32 {
    let mut out = 0;
    let mut rest = m;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1 << (p[k / n] * n + p[k % n]);
    }
    out
}

/// Relabels a `rows × cols` mask (bit `i*cols + j`) by independent row and
/// column permutations.
fn relabel_rect(m: u32, (pr, pc): &(Vec<usize>, Vec<usize>), cols: usize) -> u32 {
    let mut out = 0;
    let mut rest = m;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1 << (pr[k / cols] * cols + pc[k % cols]);
    }
    out
}

fn rect_group(rows: usize, cols: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (pr, pc) = (permutations(rows), permutations(cols));
    pr.iter().flat_map(|r| pc.iter().map(move |c| (r.clone(), c.clone()))).collect()
}

/// Rows of an adjacency mask: `succ[i]` is the set of successors of `i`.
fn rows_of(m: u32, rows: usize, cols: usize) -> Vec<u32> {
    (0..rows).map(|i| (m >> (i * cols)) & ((1 << cols) - 1)).collect()
}

/// A Boolean module `X -|-> Y` from a `|Y| × |X|` mask.
fn boolean_module(x: &Arc<VCat>, y: &Arc<VCat>, m: u32) -> Module {
    let (nx, ny) = (x.len(), y.len());
    let matrix = (0..ny).map(|b| (0..nx).map(|a| bit(is_set(m, b * nx + a))).collect()).collect();
    Module::new(x.clone(), y.clone(), matrix).unwrap()
}

/// Coalgebras on a discrete space of `n` states for a table functor over
/// two, all sharing one evaluation.
struct TableCoalgebras {
    space: Arc<VCat>,
    expr: EndoExpr,
    ev: Arc<Evaluated>,
    index: Vec<usize>,
}

impl TableCoalgebras {
    fn new(expr: EndoExpr, prefix: &str, n: usize) -> TableCoalgebras {
        let space = discrete(prefix, n);
        let ev = Arc::new(evaluate(&expr, &space, Limits::default()).unwrap());
        let index = (0..1u32 << n).map(|m| ev.index_of(&Elem::Table(table_of(m, n))).expect("every subset")).collect();
        TableCoalgebras { space, expr, ev, index }
    }

    fn coalgebra(&self, succ: &[u32]) -> Coalgebra {
        let xi = succ.iter().map(|&s| self.index[s as usize]).collect();
        Coalgebra::on(self.space.clone(), self.expr.clone(), self.ev.clone(), xi).unwrap()
    }
}

fn finite_quantales() -> Vec<Quantale> {
    let mut qs = vec![Quantale::two()];
    for n in 1..=5 {
        qs.push(Quantale::lukasiewicz_chain(n));
        qs.push(Quantale::godel_chain(n));
    }
    qs
}

fn size<R: Rng>(rng: &mut R, max: usize) -> usize {
    rng.gen_range(1..=max)
}

// ---------------------------------------------------------------- 1

fn quantale_laws() -> Verdict {
    let start = Instant::now();
    let mut exhaustive = 0;
    let finite = finite_quantales();
    for q in &finite {
        let r = q.validate_laws(&[]);
        ensure!(r.passed(), "{q}: {:?}", r.failures().next());
        let n = q.carrier_size().expect("finite");
        ensure!(r.triples == n * n * n, "{q}: only {} of {} triples", r.triples, n * n * n);
        exhaustive += r.triples;
    }
    let texts = ["0", "1", "1/3", "1/2", "2/7", "5/8", "3/4", "2", "5/2", "7", "inf"];
    let infinite = [
        Quantale::unit_lukasiewicz(),
        Quantale::unit_godel(),
        Quantale::unit_product(),
        Quantale::lawvere_plus(),
        Quantale::unit_ultrametric(),
    ];
    let mut sampled = Vec::new();
    for q in &infinite {
        let samples: Vec<QValue> = texts.iter().filter_map(|t| q.parse_value(t).ok()).collect();
        let r = q.validate_laws(&samples);
        ensure!(r.passed(), "{q}: {:?}", r.failures().next());
        ensure!(r.triples >= 200, "{q}: only {} sampled triples", r.triples);
        sampled.push(r.triples);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Verdict::Pass(format!(
        "{} finite quantales on all {exhaustive} triples; {} interval quantales on {:?} sampled triples",
        finite.len(),
        infinite.len(),
        sampled
    ))
}

// ---------------------------------------------------------------- 2

/// `A∞(v, w)`: 0 when `v` is a prefix of `w`, else `2^-n` with `n` the
/// length of the longest common prefix.
fn word_distance(v: &str, w: &str) -> QValue {
    if w.starts_with(v) {
        return QValue::ratio(0, 1);
    }
    let n = v.chars().zip(w.chars()).take_while(|(a, b)| a == b).count();
    QValue::ratio(1, 1 << n)
}

fn worked_values() -> Verdict {
    let luk = Quantale::unit_lukasiewicz();
    let r = QValue::ratio;
    ensure!(luk.tensor(&r(7, 10), &r(1, 2)) == r(1, 5), "7/10 ⊗ 1/2");
    ensure!(luk.hom(&r(7, 10), &r(1, 2)) == r(4, 5), "hom(7/10, 1/2)");
    let law = Quantale::lawvere_plus();
    ensure!(law.hom(&QValue::integer(2), &QValue::integer(5)) == QValue::integer(3), "Lawvere hom(2, 5)");

    let ws = workspace("a_infinity.ws");
    let a = &ws.categories["A_inf"];
    let word = |i: usize| a.label(i).replace('ε', "");
    let (ab, aa) = (a.require("ab").unwrap(), a.require("aa").unwrap());
    ensure!(*a.hom(ab, aa) == r(1, 2), "A∞(ab, aa) = {}", ws.quantale.format_value(a.hom(ab, aa)));
    let mut prefix_pairs = 0;
    let preorder = a.underlying_preorder();
    for i in 0..a.len() {
        for j in 0..a.len() {
            let (v, w) = (word(i), word(j));
            ensure!(*a.hom(i, j) == word_distance(&v, &w), "A∞({v:?}, {w:?}) disagrees with the word oracle");
            ensure!(preorder.le[i][j] == w.starts_with(&v), "underlying order at ({v:?}, {w:?})");
            if w.starts_with(&v) {
                prefix_pairs += 1;
            }
        }
    }
    Verdict::Pass(format!(
        "Łukasiewicz, Lawvere values exact; A∞ ({} words) matches the word oracle on all pairs, {prefix_pairs} prefix pairs at 0, underlying order = prefix order",
        a.len()
    ))
}

// ---------------------------------------------------------------- 3

fn near_exactness() -> Verdict {
    let start = Instant::now();
    let mut rng = gen::rng(3);
    let (mut squares, mut entries, mut exact) = (0, 0, 0);
    for q in [Quantale::two(), Quantale::godel_chain(3)] {
        for _ in 0..100 {
            let sq = gen::lax_square(&q, 4, &mut rng);
            let report = sq.exactness();
            ensure!(report.near_exactness_failure.is_none(), "near-exactness fails on {sq:?}");
            let (a, b, c) = (sq.f.src(), sq.g.src(), sq.f.dst());
            let apex = sq.p0.src().len();
            for x in 0..a.len() {
                for y in 0..b.len() {
                    let lhs = c.hom(sq.f.apply(x), sq.g.apply(y));
                    let rhs = q.join((0..apex).map(|w| q.tensor(a.hom(x, sq.p0.apply(w)), b.hom(sq.p1.apply(w), y))));
                    ensure!(q.le(&rhs, lhs), "oracle: join exceeds C(fa, gb) at ({x}, {y})");
                    entries += 1;
                }
            }
            squares += 1;
            exact += usize::from(report.exact);
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Verdict::Pass(format!("{squares} random lax squares, {entries} entries, zero failures ({exact} happen to be exact)"))
}

// ---------------------------------------------------------------- 4

fn fully_faithful_oracle(f: &VFunctor) -> bool {
    let (a, b) = (f.src(), f.dst());
    (0..a.len()).all(|x| (0..a.len()).all(|y| a.hom(x, y) == b.hom(f.apply(x), f.apply(y))))
}

fn structured_exactness() -> Verdict {
    let two = Quantale::two();
    let cats = |prefix: &str, max: usize| -> Vec<Arc<VCat>> {
        (1..=max).flat_map(|n| gen::all_categories(&two, prefix, n)).map(Arc::new).collect()
    };
    let (srcs, dsts) = (cats("a", 3), cats("b", 3));
    let (mut functors, mut ff) = (0, 0);
    for a in &srcs {
        for b in &dsts {
            for f in gen::all_functors(a, b) {
                let oracle = fully_faithful_oracle(&f);
                ensure!(f.is_fully_faithful() == oracle, "is_fully_faithful wrong on {f:?}");
                ensure!(LaxSquare::ff_square(&f).is_exact() == oracle, "ff-square criterion wrong on {f:?}");
                ensure!(LaxSquare::yoneda_left(&f).is_exact(), "left Yoneda square of {f:?} not exact");
                ensure!(LaxSquare::yoneda_right(&f).is_exact(), "right Yoneda square of {f:?} not exact");
                functors += 1;
                ff += usize::from(oracle);
            }
        }
    }
    // every cocomma square over two with corners of at most two objects
    let small: Vec<(Arc<VCat>, Arc<VCat>, Arc<VCat>)> = {
        let (cs, as_, bs) = (cats("c", 2), cats("a", 2), cats("b", 2));
        let mut out = Vec::new();
        for c in &cs {
            for a in &as_ {
                for b in &bs {
                    out.push((c.clone(), a.clone(), b.clone()));
                }
            }
        }
        out
    };
    let mut cocommas = 0;
    for (c, a, b) in &small {
        for f in gen::all_functors(c, a) {
            for g in gen::all_functors(c, b) {
                let k = attempt!(cocomma(&f, &g));
                ensure!(attempt!(k.square(&f, &g)).is_exact(), "cocomma square of {f:?}, {g:?} not exact");
                cocommas += 1;
            }
        }
    }
    // random ones over richer quantales
    let mut rng = gen::rng(4);
    let mut sampled = 0;
    for q in [Quantale::godel_chain(2), Quantale::lukasiewicz_chain(3), Quantale::unit_lukasiewicz()] {
        for _ in 0..40 {
            let c = Arc::new(gen::category(&q, "c", size(&mut rng, 3), &mut rng));
            let a = Arc::new(gen::category(&q, "a", size(&mut rng, 3), &mut rng));
            let b = Arc::new(gen::category(&q, "b", size(&mut rng, 3), &mut rng));
            let (f, g) = (gen::functor(&c, &a, &mut rng), gen::functor(&c, &b, &mut rng));
            ensure!(LaxSquare::yoneda_left(&f).is_exact() && LaxSquare::yoneda_right(&f).is_exact(), "{q}: Yoneda");
            let k = attempt!(cocomma(&f, &g));
            ensure!(attempt!(k.square(&f, &g)).is_exact(), "{q}: cocomma square of {f:?}, {g:?}");
            ensure!(LaxSquare::ff_square(&f).is_exact() == fully_faithful_oracle(&f), "{q}: ff criterion on {f:?}");
            sampled += 1;
        }
    }
    Verdict::Pass(format!(
        "all {functors} functors between ≤3-object preorders ({ff} fully faithful): ff criterion and Yoneda squares agree; all {cocommas} small cocomma squares exact; {sampled} random samples over three more quantales"
    ))
}

// ---------------------------------------------------------------- 5

fn collage_round_trip() -> Verdict {
    let mut rng = gen::rng(5);
    let mut count = 0;
    for (q, n) in [(Quantale::two(), 34), (Quantale::godel_chain(3), 33), (Quantale::unit_lukasiewicz(), 33)] {
        for _ in 0..n {
            let a = Arc::new(gen::category(&q, "a", size(&mut rng, 4), &mut rng));
            let b = Arc::new(gen::category(&q, "b", size(&mut rng, 4), &mut rng));
            let r = gen::module(&a, &b, &mut rng);
            let c = collage(&r);
            ensure!(c.coll.is_valid(), "collage of {r:?} is not a category");
            ensure!(c.module() == r, "round trip changed {r:?}");
            count += 1;
        }
    }
    Verdict::Pass(format!("{count} random modules recovered exactly from their collages"))
}

// ---------------------------------------------------------------- 6

fn collage_composition() -> Verdict {
    let mut rng = gen::rng(6);
    let mut count = 0;
    for q in [Quantale::two(), Quantale::godel_chain(2)] {
        for _ in 0..25 {
            let a = Arc::new(gen::category(&q, "a", size(&mut rng, 3), &mut rng));
            let b = Arc::new(gen::category(&q, "b", size(&mut rng, 3), &mut rng));
            let c = Arc::new(gen::category(&q, "c", size(&mut rng, 3), &mut rng));
            let r = gen::module(&a, &b, &mut rng);
            let s = gen::module(&b, &c, &mut rng);
            let sr = attempt!(s.after(&r));
            for z in 0..c.len() {
                for x in 0..a.len() {
                    let oracle = q.join((0..b.len()).map(|y| q.tensor(s.get(z, y), r.get(y, x))));
                    ensure!(*sr.get(z, x) == oracle, "matrix composition disagrees with the sup-of-tensor oracle");
                }
            }
            let expected = collage(&sr);
            let (cs, cr) = (collage(&s), collage(&r));
            for route in [Route::Pushout, Route::Cocomma] {
                let got = attempt!(compose_collages(&cs, &cr, route));
                ensure!(*got.coll == *expected.coll, "{route:?} route: collage differs from collage(S·R)");
                ensure!(got.module() == sr, "{route:?} route: module differs from S·R");
            }
            count += 1;
        }
    }
    Verdict::Pass(format!("{count} composable pairs: pushout route = cocomma route = collage(S·R)"))
}

// ---------------------------------------------------------------- 7

fn lifting_agreement() -> Verdict {
    let start = Instant::now();
    let mut rng = gen::rng(7);
    let limits = Limits::default();
    let mut count = 0;
    for q in [Quantale::two(), Quantale::godel_chain(2)] {
        for _ in 0..25 {
            let a = Arc::new(gen::category(&q, "a", size(&mut rng, 3), &mut rng));
            let b = Arc::new(gen::category(&q, "b", size(&mut rng, 3), &mut rng));
            let r = gen::module(&a, &b, &mut rng);
            for which in [ClosedForm::L, ClosedForm::U, ClosedForm::P] {
                let generic = attempt!(lift_via_collage(&which.expr(), &r, limits));
                let closed = attempt!(lift_closed_form(which, &r, limits));
                ensure!(generic.module == closed.module, "{which:?} disagrees on {r:?}");
                count += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Verdict::Pass(format!("{count} liftings (L, U, P on 50 modules) agree exactly"))
}

// ---------------------------------------------------------------- 8

/// Kripke-polynomial expressions of depth at most 2 over the leaves `Id`,
/// `Id∂` and one constant, with `∂` pushed to the leaves and `+`, `⊗` taken
/// up to commutativity.
fn kripke_polynomial_expressions(k: &VCat) -> Vec<EndoExpr> {
    let leaves = vec![EndoExpr::Id, EndoExpr::dual(EndoExpr::Id), EndoExpr::constant("K", k.clone())];
    let grow = |all: &[EndoExpr], fresh_from: usize| -> Vec<EndoExpr> {
        let mut out = Vec::new();
        for i in 0..all.len() {
            for j in i..all.len() {
                if j < fresh_from {
                    continue;
                }
                out.push(EndoExpr::sum(all[i].clone(), all[j].clone()));
                out.push(EndoExpr::tensor(all[i].clone(), all[j].clone()));
            }
        }
        for t in &all[fresh_from..] {
            out.push(EndoExpr::lower(t.clone()));
            out.push(EndoExpr::upper(t.clone()));
        }
        out
    };
    let mut all = leaves.clone();
    let depth1 = grow(&all, 0);
    let n0 = all.len();
    all.extend(depth1);
    let depth2 = grow(&all, n0);
    all.extend(depth2);
    all
}

fn functoriality() -> Verdict {
    let limits = Limits { max_objects: 1024 };
    let (mut expressions, mut batteries, mut cases, mut skipped) = (0, 0, 0, 0);
    let mut unchecked = Vec::new();
    for q in [Quantale::two(), Quantale::godel_chain(2)] {
        let mut rng = gen::rng(8);
        let k = VCat::from_order(&q, vec!["lo".into(), "hi".into()], &[(0, 1)]).unwrap();
        let mut exprs = kripke_polynomial_expressions(&k);
        exprs.push(EndoExpr::power(EndoExpr::Id));
        let cat = |p: &str, n: usize, rng: &mut rand_chacha::ChaCha8Rng| Arc::new(gen::category(&q, p, n, rng));
        let shapes = [(1, 1, 1), (1, 2, 1), (2, 1, 2)];
        let triples: Vec<_> =
            shapes.iter().map(|&(x, y, z)| (cat("a", x, &mut rng), cat("b", y, &mut rng), cat("c", z, &mut rng))).collect();
        let pairs: Vec<(Module, Module)> = triples
            .iter()
            .map(|(a, b, c)| (gen::module(b, c, &mut rng), gen::module(a, b, &mut rng)))
            .collect();
        let one = cat("a", 1, &mut rng);
        let (two_obj, three_obj) = (cat("b", 2, &mut rng), cat("c", 3, &mut rng));
        let other_one = cat("d", 1, &mut rng);
        let functors = vec![
            gen::functor(&one, &other_one, &mut rng),
            gen::functor(&one, &two_obj, &mut rng),
            gen::functor(&two_obj, &three_obj, &mut rng),
            gen::functor(&three_obj, &two_obj, &mut rng),
        ];
        for e in &exprs {
            let report = attempt!(functoriality_battery(e, &pairs, &functors, limits));
            if let Some((law, witness)) = report.first_failure() {
                return Verdict::Fail(format!("{q}: {e}: {law}: {witness}"));
            }
            let n: usize = report.outcomes.iter().map(|o| o.cases).sum();
            if report.outcomes.iter().any(|o| o.cases == 0) {
                unchecked.push(format!("{q}:{e}"));
            }
            cases += n;
            skipped += report.skipped;
            batteries += 1;
        }
        expressions = exprs.len();
    }
    ensure!(unchecked.is_empty(), "laws never exercised (size guard) for {unchecked:?}");
    Verdict::Pass(format!(
        "{expressions} expressions (depth ≤ 2 Kripke-polynomial plus P) × 2 quantales: {batteries} batteries, {cases} law instances, zero failures; {skipped} samples over the size guard"
    ))
}

// ---------------------------------------------------------------- 9

fn counterexamples() -> Verdict {
    let path = |n: &str| corpus(n).to_string_lossy().into_owned();
    let (code, _, t) = qcat(&["validate", &path("empty.ws")]);
    ensure!(code == 0, "validate empty.ws exited {code}");
    ensure!(t < Duration::from_secs(1), "validate took {t:?}");

    let (code, out_a, t) = qcat(&["exact", &path("paper_notbcc.ws")]);
    ensure!(code == 1, "connected components: exit {code}\n{out_a}");
    ensure!(machine_value(&out_a, "ff_j.witness") == Some("(comp_a, comp_b)"), "witness:\n{out_a}");
    ensure!(t < Duration::from_secs(1), "connected components took {t:?}");
    let (code, _, _) = qcat(&["bcc", &path("paper_notbcc.ws"), "--functor", "T", "--samples", "0"]);
    ensure!(code == 1, "bcc on connected components exited {code}");

    let (code, out_disc, t) = qcat(&["exact", &path("triple_diag.ws"), "--square", "disc"]);
    ensure!(code == 1, "triple diagonal on the discrete square: exit {code}");
    let witness = machine_value(&out_disc, "disc.witness").unwrap_or("").to_string();
    ensure!(witness == "((a,a,b), (a,b,a))", "discrete witness {witness:?}");
    ensure!(t < Duration::from_secs(1), "triple diagonal took {t:?}");
    let (code, out_all, _) = qcat(&["exact", &path("triple_diag.ws"), "--square", "all"]);

    // the literal square: recompute the image's exactness independently
    let ws = workspace("triple_diag.ws");
    for name in ["all", "disc"] {
        ensure!(ws.squares[name].square.is_exact(), "square {name} itself is not exact");
    }
    let entry = &ws.squares["all"];
    let image = attempt!(image_square(entry.under.as_ref().expect("under"), &entry.square, Limits::default()));
    let q = &ws.quantale;
    let (a, b, c) = (image.f.src(), image.g.src(), image.f.dst());
    let literal_exact = (0..a.len()).all(|x| {
        (0..b.len()).all(|y| {
            let rhs = q.join(
                (0..image.p0.src().len()).map(|w| q.tensor(a.hom(x, image.p0.apply(w)), b.hom(image.p1.apply(w), y))),
            );
            *c.hom(image.f.apply(x), image.g.apply(y)) == rhs
        })
    });
    ensure!(literal_exact == (code == 0), "CLI and oracle disagree on the literal square\n{out_all}");
    if literal_exact {
        Verdict::Deviation(format!(
            "(a) connected components: exit 1, witness (comp_a, comp_b); (b) with A(x,y) = I everywhere A is equivalent to the unit category and the image square is exact (checked by CLI and oracle), so the literal claim does not hold; the discrete two-object A reproduces the failure: exit 1, witness {witness}"
        ))
    } else {
        Verdict::Pass(format!("(a) witness (comp_a, comp_b); (b) witness {witness}"))
    }
}

// ---------------------------------------------------------------- 10

fn classical_reduction() -> Verdict {
    let mut parts = Vec::new();
    for part in [composition_oracle, egli_milner_hom_oracle, egli_milner_lifting_oracle, moss_oracle, classical_corpus] {
        match part() {
            Verdict::Pass(d) => parts.push(d),
            other => return other,
        }
    }
    Verdict::Pass(parts.join("; "))
}

/// `S · R` for every pair with `|X|, |Y|, |Z| ≤ 4`, up to relabelling:
/// `R` ranges over orbit representatives under `S_Y × S_X` and `S` over
/// row-sorted matrices (relabelling `Z`). Composition commutes with
/// relabelling, so this covers every pair.
fn composition_oracle() -> Verdict {
    let mut pairs = 0u64;
    for nx in 1..=4 {
        for ny in 1..=4 {
            let (x, y) = (discrete("x", nx), discrete("y", ny));
            let group = rect_group(ny, nx);
            let reps = orbit_representatives(nx * ny, &group, |m, g| relabel_rect(m, g, nx));
            let rs: Vec<(u32, Module)> = reps.iter().map(|&m| (m, boolean_module(&x, &y, m))).collect();
            for nz in 1..=4 {
                let z = discrete("z", nz);
                let mut rows = vec![0u32; nz];
                loop {
                    let s_mask = rows.iter().enumerate().fold(0, |acc, (i, r)| acc | r << (i * ny));
                    let s = boolean_module(&y, &z, s_mask);
                    for (r_mask, r) in &rs {
                        let got = attempt!(s.after(r));
                        let r_rows = rows_of(*r_mask, ny, nx);
                        for (k, s_row) in rows.iter().enumerate() {
                            for i in 0..nx {
                                let oracle = (0..ny).any(|j| is_set(*s_row, j) && is_set(r_rows[j], i));
                                ensure!(*got.get(k, i) == bit(oracle), "S·R differs from relational composition");
                            }
                        }
                        pairs += 1;
                    }
                    // next nondecreasing row sequence
                    let top = (1u32 << ny) - 1;
                    let Some(k) = (0..nz).rev().find(|&k| rows[k] < top) else { break };
                    let v = rows[k] + 1;
                    for r in rows.iter_mut().skip(k) {
                        *r = v;
                    }
                }
            }
        }
    }
    Verdict::Pass(format!("composition = relational composition on {pairs} pairs (all shapes ≤ 4, up to relabelling)"))
}

fn egli_milner_hom_oracle() -> Verdict {
    let two = Quantale::two();
    let p = EndoExpr::power(EndoExpr::Id);
    let mut checks = 0;
    let mut orders = 0;
    for n in 0..=4 {
        for a in gen::all_categories(&two, "x", n) {
            let le = a.underlying_preorder().le;
            let a = Arc::new(a);
            let ev = attempt!(evaluate(&p, &a, Limits::default()));
            ensure!(ev.len() == 1 << n, "P of a {n}-point preorder has {} objects", ev.len());
            for s in 0..ev.len() {
                for t in 0..ev.len() {
                    let (u, v) = (mask_of(ev.table(s).unwrap()), mask_of(ev.table(t).unwrap()));
                    let lower = (0..n).filter(|&i| is_set(u, i)).all(|i| (0..n).any(|j| is_set(v, j) && le[i][j]));
                    let upper = (0..n).filter(|&j| is_set(v, j)).all(|j| (0..n).any(|i| is_set(u, i) && le[i][j]));
                    ensure!(*ev.cat.hom(s, t) == bit(lower && upper), "Egli–Milner hom on {a:?}");
                    checks += 1;
                }
            }
            orders += 1;
        }
    }
    Verdict::Pass(format!("P's hom = Egli–Milner order on all {orders} preorders ≤ 4 points ({checks} subset pairs)"))
}

/// Classical `P̄(R)(B, A)`: every `a ∈ A` has an `R`-partner in `B` and
/// every `b ∈ B` one in `A`.
fn egli_milner_relation(r_rows: &[u32], big_b: u32, big_a: u32, nx: usize, ny: usize) -> bool {
    (0..nx).filter(|&a| is_set(big_a, a)).all(|a| (0..ny).any(|b| is_set(big_b, b) && is_set(r_rows[b], a)))
        && (0..ny).filter(|&b| is_set(big_b, b)).all(|b| (0..nx).any(|a| is_set(big_a, a) && is_set(r_rows[b], a)))
}

/// The lifting through the collage for every relation between sets of at
/// most four elements, up to relabelling of either side.
fn egli_milner_lifting_oracle() -> Verdict {
    let p = EndoExpr::power(EndoExpr::Id);
    let mut relations = 0;
    let mut entries = 0;
    for nx in 1..=4 {
        for ny in 1..=4 {
            let (x, y) = (discrete("x", nx), discrete("y", ny));
            let group = rect_group(ny, nx);
            for m in orbit_representatives(nx * ny, &group, |m, g| relabel_rect(m, g, nx)) {
                let r = boolean_module(&x, &y, m);
                let lifted = attempt!(lift_via_collage(&p, &r, Limits::default()));
                let r_rows = rows_of(m, ny, nx);
                for bi in 0..lifted.dst.len() {
                    let big_b = mask_of(lifted.dst.table(bi).unwrap());
                    for ai in 0..lifted.src.len() {
                        let big_a = mask_of(lifted.src.table(ai).unwrap());
                        let oracle = egli_milner_relation(&r_rows, big_b, big_a, nx, ny);
                        ensure!(*lifted.module.get(bi, ai) == bit(oracle), "P̄ differs on relation {m:#b} ({ny}×{nx})");
                        entries += 1;
                    }
                }
                relations += 1;
            }
        }
    }
    Verdict::Pass(format!(
        "P̄ through the collage = Egli–Milner relation lifting on {relations} relations ({entries} entries; all shapes ≤ 4×4 up to relabelling)"
    ))
}

/// Moss's semantics on a Kripke frame (bit masks), weights in `{0, 1}`.
fn moss(phi: &Formula, succ: &[u32], val: &BTreeMap<String, u32>) -> u32 {
    let n = succ.len();
    let all = (1u32 << n) - 1;
    match phi {
        Formula::Atom(p) => val[p],
        Formula::Const(v) => {
            if *v == QValue::Level(1) {
                all
            } else {
                0
            }
        }
        Formula::Meet(fs) => fs.iter().fold(all, |acc, f| acc & moss(f, succ, val)),
        Formula::Join(fs) => fs.iter().fold(0, |acc, f| acc | moss(f, succ, val)),
        Formula::Nabla(g) => {
            let sets: Vec<u32> =
                g.iter().filter(|(_, w)| *w == QValue::Level(1)).map(|(f, _)| moss(f, succ, val)).collect();
            (0..n)
                .filter(|&x| {
                    sets.iter().all(|s| succ[x] & s != 0)
                        && (0..n).filter(|&y| is_set(succ[x], y)).all(|y| sets.iter().any(|s| is_set(*s, y)))
                })
                .fold(0, |acc, x| acc | 1 << x)
        }
    }
}

fn nabla(fs: Vec<Formula>) -> Formula {
    Formula::Nabla(fs.into_iter().map(|f| (f, QValue::Level(1))).collect())
}

fn moss_formulas(atoms: &[&str]) -> Vec<Formula> {
    let a: Vec<Formula> = atoms.iter().map(|p| Formula::atom(p)).collect();
    let top = Formula::Const(QValue::Level(1));
    let mut out = vec![
        nabla(vec![]),
        nabla(vec![top.clone()]),
        nabla(vec![a[0].clone()]),
        nabla(vec![a[0].clone(), top.clone()]),
        nabla(vec![nabla(vec![a[0].clone()])]),
        nabla(vec![a[0].clone(), nabla(vec![])]),
        Formula::Join(vec![a[0].clone(), nabla(vec![Formula::Meet(vec![a[0].clone(), nabla(vec![top])])])]),
    ];
    if let Some(b) = a.get(1) {
        out.push(nabla(vec![a[0].clone(), b.clone()]));
        out.push(nabla(vec![Formula::Meet(vec![a[0].clone(), b.clone()]), nabla(vec![b.clone()])]));
        out.push(Formula::Meet(vec![nabla(vec![b.clone()]), nabla(vec![a[0].clone(), b.clone()])]));
    }
    out
}

fn check_moss(family: &TableCoalgebras, succ: &[u32], val: &BTreeMap<String, u32>, formulas: &[Formula]) -> Verdict {
    let n = succ.len();
    let c = Arc::new(family.coalgebra(succ));
    let valuation = val.iter().map(|(k, m)| (k.clone(), table_of(*m, n))).collect();
    let model = attempt!(Model::new(c, valuation, false));
    let options = EvalOptions { cross_check: n <= 2, limits: Limits::default() };
    let mut ev = Evaluator::new(&model, options);
    for phi in formulas {
        let got = mask_of(&attempt!(ev.table(phi)));
        let want = moss(phi, succ, val);
        ensure!(got == want, "{phi:?} on frame {succ:?} with {val:?}: {got:#b} vs Moss {want:#b}");
    }
    Verdict::Pass(String::new())
}

/// Every P-coalgebra over two on at most four states: with two atoms for
/// up to three states (all labelled frames and valuations) and one atom
/// for four states (up to relabelling of frame and valuation together).
fn moss_oracle() -> Verdict {
    let p = EndoExpr::power(EndoExpr::Id);
    let (one, two_atoms) = (moss_formulas(&["p"]), moss_formulas(&["p", "q"]));
    let mut models = 0;
    for n in 1..=3usize {
        let family = TableCoalgebras::new(p.clone(), "x", n);
        for frame in 0..1u32 << (n * n) {
            let succ = rows_of(frame, n, n);
            for pv in 0..1u32 << n {
                for qv in 0..1u32 << n {
                    let val = BTreeMap::from([("p".to_string(), pv), ("q".to_string(), qv)]);
                    if let v @ Verdict::Fail(_) = check_moss(&family, &succ, &val, &two_atoms) {
                        return v;
                    }
                    models += 1;
                }
            }
        }
    }
    let n = 4;
    let family = TableCoalgebras::new(p, "x", n);
    let perms = permutations(n);
    let act = |m: u32, perm: &Vec<usize>| {
        let frame = relabel_square(m & 0xffff, perm, n);
        let val = (0..n).filter(|&i| is_set(m >> 16, i)).fold(0, |acc, i| acc | 1 << perm[i]);
        frame | val << 16
    };
    let reps = orbit_representatives(n * n + n, &perms, act);
    for m in &reps {
        let succ = rows_of(m & 0xffff, n, n);
        let val = BTreeMap::from([("p".to_string(), m >> 16)]);
        if let v @ Verdict::Fail(_) = check_moss(&family, &succ, &val, &one) {
            return v;
        }
        models += 1;
    }
    Verdict::Pass(format!(
        "∇ over P-coalgebras = Moss semantics on {models} models (≤ 3 states labelled with two atoms, 4 states up to relabelling with one atom)"
    ))
}

/// The classical corpus file: Boolean composition, the ∀∃ lifting table and
/// the three readings of one Kripke frame.
fn classical_corpus() -> Verdict {
    let ws = workspace("classical.ws");
    let (r, s) = (&ws.modules["R"], &ws.modules["S"]);
    let sr = attempt!(s.after(r));
    for z in 0..s.dst().len() {
        for x in 0..r.src().len() {
            let oracle = (0..r.dst().len()).any(|y| *s.get(z, y) == bit(true) && *r.get(y, x) == bit(true));
            ensure!(*sr.get(z, x) == bit(oracle), "classical.ws: S·R at ({z}, {x})");
        }
    }
    let toy = &ws.modules["toy"];
    let lifted = attempt!(lift_via_collage(&EndoExpr::lower(EndoExpr::Id), toy, Limits::default()));
    let (nx, ny) = (toy.src().len(), toy.dst().len());
    for bi in 0..lifted.dst.len() {
        for ai in 0..lifted.src.len() {
            let (big_b, big_a) = (mask_of(lifted.dst.table(bi).unwrap()), mask_of(lifted.src.table(ai).unwrap()));
            // presheaves on discrete sets are subsets; L̄ relates B to A when
            // every b ∈ B has an R-partner in A
            let oracle =
                (0..ny).filter(|&b| is_set(big_b, b)).all(|b| (0..nx).any(|a| is_set(big_a, a) && *toy.get(b, a) == bit(true)));
            ensure!(*lifted.module.get(bi, ai) == bit(oracle), "classical.ws: L̄(toy) at ({bi}, {ai})");
        }
    }
    let mut evaluations = 0;
    for name in ["box_model", "diamond_model", "moss_model"] {
        let model = &ws.models[name];
        let c = &model.coalgebra;
        let n = c.len();
        let succ: Vec<u32> = (0..n).map(|x| mask_of(c.successors(x).unwrap())).collect();
        let val: BTreeMap<String, u32> = model.valuation.iter().map(|(k, t)| (k.clone(), mask_of(t))).collect();
        let mut ev = Evaluator::new(model, EvalOptions { cross_check: true, limits: Limits::default() });
        for (fname, phi) in &ws.formulas {
            let got = mask_of(&attempt!(ev.table(phi)));
            let want = match (name, phi) {
                ("moss_model", _) | (_, Formula::Atom(_)) => moss(phi, &succ, &val),
                (_, Formula::Nabla(g)) => {
                    let sets: Vec<u32> = g.iter().map(|(f, _)| moss(f, &succ, &val)).collect();
                    (0..n)
                        .filter(|&x| {
                            let (xs, ys) = (succ[x], (0..n).filter(|&y| is_set(succ[x], y)));
                            if name == "box_model" {
                                ys.clone().all(|y| sets.iter().any(|s| is_set(*s, y)))
                            } else {
                                sets.iter().all(|s| xs & s != 0)
                            }
                        })
                        .fold(0, |acc, x| acc | 1 << x)
                }
                _ => return Verdict::Fail(format!("unexpected corpus formula {fname}")),
            };
            ensure!(got == want, "classical.ws: {fname} on {name}: {got:#b} vs {want:#b}");
            evaluations += 1;
        }
    }
    Verdict::Pass(format!("classical.ws: composition, L̄(toy) and {evaluations} box/diamond/Moss evaluations"))
}

// ---------------------------------------------------------------- 11

fn distributive_axioms() -> Verdict {
    let two = Quantale::two();
    let limits = Limits { max_objects: 1 << 16 };
    let bases: Vec<Arc<VCat>> = (0..=2).flat_map(|n| gen::all_categories(&two, "a", n)).map(Arc::new).collect();
    let mut checked = 0;
    for expr in [EndoExpr::Id, EndoExpr::lower(EndoExpr::Id), EndoExpr::upper(EndoExpr::Id)] {
        for out in check_distributive_axioms(&expr, &bases, limits) {
            ensure!(out.error.is_none(), "{expr} on {:?}: {}", out.base, out.error.unwrap());
            ensure!(out.unit == Some(true), "{expr} on {:?}: unit diagram {:?}", out.base, out.unit);
            ensure!(out.multiplication == Some(true), "{expr} on {:?}: multiplication diagram {:?}", out.base, out.multiplication);
            checked += 1;
        }
    }
    // one step beyond, under the default size guard
    let three: Vec<Arc<VCat>> = gen::all_categories(&two, "a", 3).into_iter().map(Arc::new).collect();
    let (mut beyond, mut skipped) = (0, 0);
    for expr in [EndoExpr::Id, EndoExpr::lower(EndoExpr::Id), EndoExpr::upper(EndoExpr::Id)] {
        for out in check_distributive_axioms(&expr, &three, Limits::default()) {
            ensure!(
                out.error.is_none() && out.unit == Some(true) && out.multiplication != Some(false),
                "{expr} on {:?} violates a diagram",
                out.base
            );
            beyond += 1;
            skipped += usize::from(out.multiplication.is_none());
        }
    }
    Verdict::Pass(format!(
        "Id, L, U on all {} preorders with ≤ 2 points: both diagrams hold ({checked} checks); on 3 points {beyond} more checks hold, {skipped} multiplication checks over the size guard",
        bases.len()
    ))
}

// ---------------------------------------------------------------- 12

fn nabla_invariance() -> Verdict {
    let (mut morphisms, mut non_identity, mut checks, mut incompatible) = (0, 0, 0, 0);
    for file in ["coalgebras_two.ws", "coalgebras_godel.ws"] {
        let ws = workspace(file);
        let formulas: Vec<Formula> = ws.formulas.values().filter(|f| f.depth() <= 2).cloned().collect();
        ensure!(formulas.len() == ws.formulas.len(), "{file}: corpus formulas deeper than 2");
        for (n1, m1) in &ws.models {
            for (n2, m2) in &ws.models {
                let (c1, c2) = (&m1.coalgebra, &m2.coalgebra);
                if c1.expr != c2.expr {
                    continue;
                }
                ensure!(c1.len() <= 4 && c2.len() <= 4, "{file}: sample coalgebras exceed four states");
                for f in attempt!(find_coalgebra_morphisms(c1, c2, 1 << 20)) {
                    morphisms += 1;
                    let compatible = m1.valuation.iter().all(|(p, t1)| {
                        m2.valuation.get(p).is_some_and(|t2| (0..t1.len()).all(|x| t1[x] == t2[f.apply(x)]))
                    });
                    if !compatible {
                        incompatible += 1;
                        continue;
                    }
                    let options = EvalOptions { cross_check: true, limits: Limits::default() };
                    let report = attempt!(check_invariance(m1, m2, &f, &formulas, options));
                    if let Some(fail) = report.failure {
                        return Verdict::Fail(format!("{file}: {n1} → {n2}: {:?} at state {}", fail.formula, fail.state));
                    }
                    checks += report.checks;
                    non_identity += usize::from(n1 != n2);
                }
            }
        }
    }
    ensure!(non_identity > 0, "no non-identity morphism was exercised");
    Verdict::Pass(format!(
        "{morphisms} morphisms among the sample coalgebras ({non_identity} between distinct coalgebras, {incompatible} with incompatible valuations); {checks} state/formula checks all equal"
    ))
}

// ---------------------------------------------------------------- 13

/// Classical similarity by refinement: `sim[x]` holds the states that
/// simulate `x`; a pair is dropped once some successor of `x` has no
/// simulating successor of `y`.
fn similarity_oracle(succ: &[u32]) -> Vec<u32> {
    let n = succ.len();
    let mut sim = vec![(1u32 << n) - 1; n];
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if !is_set(sim[x], y) {
                    continue;
                }
                let ok = (0..n).filter(|&x2| is_set(succ[x], x2)).all(|x2| sim[x2] & succ[y] != 0);
                if !ok {
                    sim[x] &= !(1 << y);
                    changed = true;
                }
            }
        }
        if !changed {
            return sim;
        }
    }
}

fn simulation() -> Verdict {
    // A000595: digraphs with loops on n unlabelled nodes
    const ORBITS: [usize; 6] = [1, 2, 10, 104, 3044, 291_968];
    let u = EndoExpr::upper(EndoExpr::Id);
    let limits = Limits::default();
    let mut frames = 0;
    for n in 1..=5 {
        let family = TableCoalgebras::new(u.clone(), "x", n);
        let perms = permutations(n);
        let reps = orbit_representatives(n * n, &perms, |m, p| relabel_square(m, p, n));
        ensure!(reps.len() == ORBITS[n], "{} frames up to relabelling on {n} states, expected {}", reps.len(), ORBITS[n]);
        for m in reps {
            let succ = rows_of(m, n, n);
            let c = family.coalgebra(&succ);
            let path = if n <= 3 { LiftPath::Collage } else { LiftPath::Auto };
            let s = attempt!(largest_simulation(&c, &c, 64, path, limits));
            ensure!(s.converged && s.is_fixpoint, "no fixpoint on {succ:?}");
            let want = similarity_oracle(&succ);
            for x in 0..n {
                let got = (0..n).filter(|&y| *s.relation.get(y, x) == bit(true)).fold(0, |acc, y| acc | 1 << y);
                ensure!(got == want[x], "frame {succ:?}: simulators of {x} are {got:#b}, oracle {:#b}", want[x]);
            }
            frames += 1;
        }
    }
    // between distinct coalgebras, labelled, at most five states in total
    let mut pairs = 0;
    for n1 in 1..=4usize {
        for n2 in 1..=(5 - n1) {
            let (f1, f2) = (TableCoalgebras::new(u.clone(), "x", n1), TableCoalgebras::new(u.clone(), "y", n2));
            for m1 in 0..1u32 << (n1 * n1) {
                let s1 = rows_of(m1, n1, n1);
                let c1 = f1.coalgebra(&s1);
                for m2 in 0..1u32 << (n2 * n2) {
                    let s2 = rows_of(m2, n2, n2);
                    let c2 = f2.coalgebra(&s2);
                    let s = attempt!(largest_simulation(&c1, &c2, 64, LiftPath::Auto, limits));
                    let union: Vec<u32> = s1.iter().copied().chain(s2.iter().map(|r| r << n1)).collect();
                    let want = similarity_oracle(&union);
                    for x in 0..n1 {
                        for y in 0..n2 {
                            ensure!(
                                *s.relation.get(y, x) == bit(is_set(want[x], n1 + y)),
                                "{s1:?} vs {s2:?} at ({x}, {y})"
                            );
                        }
                    }
                    pairs += 1;
                }
            }
        }
    }
    // streams: mutual simulation without a connecting morphism
    let (zeros, alt) = attempt!(stream_example(limits));
    let ws = workspace("streams.ws");
    for (c1, c2) in [(&zeros, &alt), (&*ws.coalgebras["zeros"], &*ws.coalgebras["alternating"])] {
        for (a, b) in [(c1, c2), (c2, c1)] {
            let s = attempt!(largest_simulation(a, b, 64, LiftPath::Auto, limits));
            ensure!(s.converged && s.is_fixpoint, "stream simulation did not converge");
            ensure!(s.relation.matrix().iter().flatten().all(|v| *v == bit(true)), "streams are not mutually similar");
            ensure!(attempt!(find_coalgebra_morphisms(a, b, 1 << 20)).is_empty(), "a morphism relates the streams");
        }
        let witnesses = [(0, 0), (1, 1)]
            .into_iter()
            .flat_map(|(i, j)| {
                let c = [c1, c2][i];
                find_coalgebra_morphisms(c, c, 1 << 20)
                    .unwrap()
                    .into_iter()
                    .map(move |f| Witness { from: i, to: j, map: f.map().to_vec() })
            })
            .collect::<Vec<_>>();
        let partition = attempt!(bisimilarity_closure(&[c1.len(), c2.len()], &witnesses));
        ensure!(!partition.same_block((0, 0), (1, 0)), "streams identified as bisimilar");
    }
    Verdict::Pass(format!(
        "all {frames} Kripke frames on ≤ 5 states up to relabelling and {pairs} labelled coalgebra pairs with ≤ 5 states in total match the similarity oracle; streams 000… and 0101… simulate each other with no morphism between them"
    ))
}
