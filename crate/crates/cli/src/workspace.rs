//! Workspace files: one quantale plus named categories, functors, modules,
//! squares, functor expressions, coalgebras, models and formulas.
//!
//! Parsing happens in three passes: JSON syntax (errors carry line and
//! column), per-entry shape, and resolution of values and references. The
//! last two passes collect every problem instead of stopping at the first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use qcat::coalg::{Coalgebra, Formula, Model};
use qcat::endo::{evaluate, EndoExpr};
use qcat::squares::{cocomma, LaxSquare};
use qcat::{Limits, QValue, Quantale, VCat, VFunctor};
use qcat::vmod::Module;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

/// One schema or reference problem, located by a path like
/// `modules.R.matrix[1][0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub at: String,
    pub message: String,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.at, self.message)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{} problem(s) in workspace:\n{}", .0.len(), .0.iter().map(|p| format!("  {p}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Problem>),
}

/// A hom value as written: canonical form is a string (`"1/2"`, `"inf"`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueDoc {
    Int(i64),
    Text(String),
    Float(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantaleDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

/// A category: an explicit hom matrix (row = from, column = to), a
/// generating order `le` (reflexive-transitive closure, homs `I` or `⊥`),
/// or neither for a discrete category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom: Option<Vec<Vec<ValueDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub le: Option<Vec<(String, String)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDoc {
    pub src: String,
    pub dst: String,
    pub map: BTreeMap<String, String>,
}

/// Rows are indexed by `dst` objects, columns by `src` objects. With
/// `closure`, the least module above the matrix is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub src: String,
    pub dst: String,
    pub matrix: Vec<Vec<ValueDoc>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub closure: bool,
}

/// A lax square: four legs, or one of the standard squares of a functor, or
/// the cocomma square of two functors. `under` applies a functor expression
/// to the whole square.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ff: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yoneda_left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yoneda_right: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocomma: Option<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub under: Option<Json>,
}

/// `xi` sends each state to an object of `T X`, named by its label or by
/// its index in the enumeration order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetDoc {
    Index(usize),
    Label(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalgebraDoc {
    pub space: String,
    pub functor: Json,
    pub xi: BTreeMap<String, TargetDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub coalgebra: String,
    pub valuation: BTreeMap<String, BTreeMap<String, ValueDoc>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub closure: bool,
}

/// The file as written, after canonicalisation of values, expressions and
/// formulas. Emitting this and parsing again gives the same document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub quantale: QuantaleDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub categories: BTreeMap<String, CategoryDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functors: BTreeMap<String, FunctorDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub squares: BTreeMap<String, SquareDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exprs: BTreeMap<String, Json>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coalgebras: BTreeMap<String, CoalgebraDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub models: BTreeMap<String, ModelDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub formulas: BTreeMap<String, Json>,
}

/// A square together with the expression it is to be transported along.
#[derive(Clone, Debug)]
pub struct SquareEntry {
    pub square: LaxSquare,
    pub under: Option<EndoExpr>,
}

/// A resolved workspace.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub doc: Document,
    pub quantale: Quantale,
    pub limits: Limits,
    pub categories: BTreeMap<String, Arc<VCat>>,
    pub functors: BTreeMap<String, VFunctor>,
    pub modules: BTreeMap<String, Module>,
    pub squares: BTreeMap<String, SquareEntry>,
    pub exprs: BTreeMap<String, EndoExpr>,
    pub coalgebras: BTreeMap<String, Arc<Coalgebra>>,
    pub models: BTreeMap<String, Model>,
    pub formulas: BTreeMap<String, Formula>,
}

const SECTIONS: [&str; 10] =
    ["description", "quantale", "categories", "functors", "modules", "squares", "exprs", "coalgebras", "models", "formulas"];

pub fn load(path: &std::path::Path, limits: Limits) -> Result<Workspace, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_workspace(&text, limits)
}

pub fn parse_workspace(text: &str, limits: Limits) -> Result<Workspace, LoadError> {
    let root: Json = serde_json::from_str(text)
        .map_err(|e| LoadError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })?;
    let mut problems = Vec::new();
    let doc = shape(&root, &mut problems);
    let Some(doc) = doc else {
        return Err(LoadError::Invalid(problems));
    };
    let ws = Resolver::new(limits, &mut problems).resolve(doc);
    match ws {
        Some(ws) if problems.is_empty() => Ok(ws),
        _ => Err(LoadError::Invalid(problems)),
    }
}

/// The canonical text of a workspace.
pub fn emit_workspace(ws: &Workspace) -> String {
    let mut s = serde_json::to_string_pretty(&ws.doc).expect("documents serialise");
    s.push('\n');
    s
}

fn problem(at: impl Into<String>, message: impl Into<String>) -> Problem {
    Problem { at: at.into(), message: message.into() }
}

fn section<T: for<'de> Deserialize<'de>>(
    root: &Map<String, Json>,
    name: &str,
    problems: &mut Vec<Problem>,
) -> BTreeMap<String, T> {
    let mut out = BTreeMap::new();
    match root.get(name) {
        None => {}
        Some(Json::Object(entries)) => {
            for (key, v) in entries {
                match serde_json::from_value::<T>(v.clone()) {
                    Ok(t) => {
                        out.insert(key.clone(), t);
                    }
                    Err(e) => problems.push(problem(format!("{name}.{key}"), e.to_string())),
                }
            }
        }
        Some(_) => problems.push(problem(name, "expected an object of named entries")),
    }
    out
}

fn shape(root: &Json, problems: &mut Vec<Problem>) -> Option<Document> {
    let Json::Object(root) = root else {
        problems.push(problem("$", "a workspace is a JSON object"));
        return None;
    };
    for key in root.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            problems.push(problem(key.clone(), "unknown section"));
        }
    }
    let quantale = match root.get("quantale") {
        None => {
            problems.push(problem("quantale", "missing"));
            None
        }
        Some(v) => match serde_json::from_value::<QuantaleDoc>(v.clone()) {
            Ok(q) => Some(q),
            Err(e) => {
                problems.push(problem("quantale", e.to_string()));
                None
            }
        },
    };
    let description = match root.get("description") {
        None => None,
        Some(Json::String(s)) => Some(s.clone()),
        Some(_) => {
            problems.push(problem("description", "expected a string"));
            None
        }
    };
    // keep going past shape problems so that reference and law problems in
    // the well-formed entries are reported in the same pass
    let quantale = quantale?;
    let doc = Document {
        description,
        quantale,
        categories: section(root, "categories", problems),
        functors: section(root, "functors", problems),
        modules: section(root, "modules", problems),
        squares: section(root, "squares", problems),
        exprs: section(root, "exprs", problems),
        coalgebras: section(root, "coalgebras", problems),
        models: section(root, "models", problems),
        formulas: section(root, "formulas", problems),
    };
    Some(doc)
}

/// Parses one value in the workspace quantale.
pub fn parse_value(q: &Quantale, v: &ValueDoc) -> Result<QValue, String> {
    match v {
        ValueDoc::Int(i) => q.parse_value(&i.to_string()).map_err(|e| e.to_string()),
        ValueDoc::Text(s) => q.parse_value(s).map_err(|e| e.to_string()),
        ValueDoc::Float(x) => Err(format!("`{x}` is a decimal; use p/q")),
    }
}

/// The canonical JSON of a functor expression.
pub fn expr_to_json(e: &EndoExpr) -> Json {
    match e {
        EndoExpr::Id => json!("id"),
        EndoExpr::ConnectedComponents => json!("cc"),
        EndoExpr::TripleDiag => json!("triple"),
        EndoExpr::Const(name, _) => json!({ "const": name }),
        EndoExpr::Sum(s, t) => json!({ "sum": [expr_to_json(s), expr_to_json(t)] }),
        EndoExpr::Tensor(s, t) => json!({ "tensor": [expr_to_json(s), expr_to_json(t)] }),
        EndoExpr::Dual(t) => json!({ "dual": expr_to_json(t) }),
        EndoExpr::Lower(t) => json!({ "lower": expr_to_json(t) }),
        EndoExpr::Upper(t) => json!({ "upper": expr_to_json(t) }),
        EndoExpr::Power(t) => json!({ "power": expr_to_json(t) }),
    }
}

/// Reads a functor expression: either the compact text syntax (`"P(id)"`)
/// or nested tags (`{"power": "id"}`).
pub fn expr_from_json(v: &Json, constants: &HashMap<String, Arc<VCat>>) -> Result<EndoExpr, String> {
    match v {
        Json::String(s) => EndoExpr::parse(s, constants).map_err(|e| e.to_string()),
        Json::Object(m) if m.len() == 1 => {
            let (tag, arg) = m.iter().next().expect("one entry");
            let unary = |wrap: fn(EndoExpr) -> EndoExpr| expr_from_json(arg, constants).map(wrap);
            let binary = |wrap: fn(EndoExpr, EndoExpr) -> EndoExpr| match arg {
                Json::Array(xs) if xs.len() == 2 => {
                    Ok(wrap(expr_from_json(&xs[0], constants)?, expr_from_json(&xs[1], constants)?))
                }
                _ => Err(format!("`{tag}` takes a list of two expressions")),
            };
            match tag.as_str() {
                "lower" | "L" => unary(EndoExpr::lower),
                "upper" | "U" => unary(EndoExpr::upper),
                "power" | "P" => unary(EndoExpr::power),
                "dual" => unary(EndoExpr::dual),
                "sum" => binary(EndoExpr::sum),
                "tensor" => binary(EndoExpr::tensor),
                "const" => match arg {
                    Json::String(name) => constants
                        .get(name)
                        .map(|c| EndoExpr::Const(name.clone(), c.clone()))
                        .ok_or_else(|| format!("unknown category `{name}`")),
                    _ => Err("`const` takes a category name".into()),
                },
                _ => Err(format!("unknown functor tag `{tag}`")),
            }
        }
        _ => Err("expected a functor expression".into()),
    }
}

/// The canonical JSON of a formula.
pub fn formula_to_json(q: &Quantale, f: &Formula) -> Json {
    match f {
        Formula::Atom(a) => json!({ "atom": a }),
        Formula::Const(v) => json!({ "const": q.format_value(v) }),
        Formula::Meet(xs) => json!({ "and": xs.iter().map(|x| formula_to_json(q, x)).collect::<Vec<_>>() }),
        Formula::Join(xs) => json!({ "or": xs.iter().map(|x| formula_to_json(q, x)).collect::<Vec<_>>() }),
        Formula::Nabla(g) => json!({
            "nabla": g.iter().map(|(x, w)| json!({ "formula": formula_to_json(q, x), "weight": q.format_value(w) })).collect::<Vec<_>>()
        }),
    }
}

/// Reads a formula; `{"ref": name}` refers to another named formula.
pub fn formula_from_json(q: &Quantale, v: &Json, named: &BTreeMap<String, Json>) -> Result<Formula, String> {
    formula_inner(q, v, named, &mut Vec::new())
}

fn formula_inner(q: &Quantale, v: &Json, named: &BTreeMap<String, Json>, stack: &mut Vec<String>) -> Result<Formula, String> {
    let list = |arg: &Json, stack: &mut Vec<String>| match arg {
        Json::Array(xs) => xs.iter().map(|x| formula_inner(q, x, named, stack)).collect(),
        _ => Err("expected a list of formulas".to_string()),
    };
    match v {
        Json::String(a) => Ok(Formula::Atom(a.clone())),
        Json::Object(m) if m.len() == 1 => {
            let (tag, arg) = m.iter().next().expect("one entry");
            match tag.as_str() {
                "atom" => arg.as_str().map(|a| Formula::Atom(a.to_string())).ok_or_else(|| "atom takes a name".into()),
                "const" => {
                    let doc: ValueDoc = serde_json::from_value(arg.clone()).map_err(|e| e.to_string())?;
                    parse_value(q, &doc).map(Formula::Const)
                }
                "and" => list(arg, stack).map(Formula::Meet),
                "or" => list(arg, stack).map(Formula::Join),
                "nabla" => {
                    let Json::Array(xs) = arg else {
                        return Err("nabla takes a list of {formula, weight}".into());
                    };
                    let mut out = Vec::new();
                    for x in xs {
                        let (Some(f), Some(w)) = (x.get("formula"), x.get("weight")) else {
                            return Err("nabla entries need `formula` and `weight`".into());
                        };
                        let w: ValueDoc = serde_json::from_value(w.clone()).map_err(|e| e.to_string())?;
                        out.push((formula_inner(q, f, named, stack)?, parse_value(q, &w)?));
                    }
                    Ok(Formula::Nabla(out))
                }
                "ref" => {
                    let name = arg.as_str().ok_or("ref takes a formula name")?;
                    if stack.iter().any(|s| s == name) {
                        return Err(format!("formula `{name}` refers to itself"));
                    }
                    let body = named.get(name).ok_or_else(|| format!("unknown formula `{name}`"))?;
                    stack.push(name.to_string());
                    let out = formula_inner(q, body, named, stack);
                    stack.pop();
                    out
                }
                _ => Err(format!("unknown formula tag `{tag}`")),
            }
        }
        _ => Err("expected a formula".into()),
    }
}

struct Resolver<'p> {
    limits: Limits,
    problems: &'p mut Vec<Problem>,
}

impl<'p> Resolver<'p> {
    fn new(limits: Limits, problems: &'p mut Vec<Problem>) -> Resolver<'p> {
        Resolver { limits, problems }
    }

    fn report(&mut self, at: impl Into<String>, message: impl Into<String>) {
        self.problems.push(problem(at, message));
    }

    fn value(&mut self, q: &Quantale, at: String, v: &mut ValueDoc) -> Option<QValue> {
        match parse_value(q, v) {
            Ok(x) => {
                *v = ValueDoc::Text(q.format_value(&x));
                Some(x)
            }
            Err(e) => {
                self.report(at, e);
                None
            }
        }
    }

    fn matrix(&mut self, q: &Quantale, at: &str, rows: &mut [Vec<ValueDoc>], n: usize, m: usize) -> Option<Vec<Vec<QValue>>> {
        if rows.len() != n {
            self.report(at, format!("expected {n} rows, found {}", rows.len()));
            return None;
        }
        let mut ok = true;
        let mut out = Vec::with_capacity(n);
        for (i, row) in rows.iter_mut().enumerate() {
            if row.len() != m {
                self.report(format!("{at}[{i}]"), format!("expected {m} entries, found {}", row.len()));
                ok = false;
                continue;
            }
            let mut r = Vec::with_capacity(m);
            for (j, v) in row.iter_mut().enumerate() {
                match self.value(q, format!("{at}[{i}][{j}]"), v) {
                    Some(x) => r.push(x),
                    None => ok = false,
                }
            }
            out.push(r);
        }
        ok.then_some(out)
    }

    fn category(&mut self, q: &Quantale, name: &str, doc: &mut CategoryDoc) -> Option<VCat> {
        let at = format!("categories.{name}");
        let objects = doc.objects.clone();
        let cat = match (&mut doc.hom, &doc.le) {
            (Some(_), Some(_)) => {
                self.report(&at, "give either `hom` or `le`, not both");
                return None;
            }
            (Some(rows), None) => {
                let hom = self.matrix(q, &format!("{at}.hom"), rows, objects.len(), objects.len())?;
                VCat::new(q.clone(), objects, hom)
            }
            (None, Some(pairs)) => {
                let mut idx = Vec::new();
                for (x, y) in pairs {
                    match (objects.iter().position(|o| o == x), objects.iter().position(|o| o == y)) {
                        (Some(i), Some(j)) => idx.push((i, j)),
                        _ => {
                            self.report(format!("{at}.le"), format!("unknown object in `{x} ≤ {y}`"));
                            return None;
                        }
                    }
                }
                VCat::from_order(q, objects, &idx)
            }
            (None, None) => VCat::discrete_on(q, objects),
        };
        let cat = match cat {
            Ok(c) => c,
            Err(e) => {
                self.report(&at, e.to_string());
                return None;
            }
        };
        let violations = cat.validate();
        if let Some(v) = violations.first() {
            self.report(&at, format!("not a V-category: {v:?}"));
            return None;
        }
        Some(cat)
    }

    fn cat_ref(&mut self, at: &str, name: &str, cats: &BTreeMap<String, Arc<VCat>>) -> Option<Arc<VCat>> {
        let c = cats.get(name).cloned();
        if c.is_none() {
            self.report(at, format!("unknown category `{name}`"));
        }
        c
    }

    fn functor_ref(&mut self, at: &str, name: &str, fs: &BTreeMap<String, VFunctor>) -> Option<VFunctor> {
        let f = fs.get(name).cloned();
        if f.is_none() {
            self.report(at, format!("unknown functor `{name}`"));
        }
        f
    }

    fn resolve(mut self, mut doc: Document) -> Option<Workspace> {
        let q = match Quantale::from_descriptor(&doc.quantale.kind, doc.quantale.n) {
            Ok(q) => q,
            Err(e) => {
                self.report("quantale", e.to_string());
                return None;
            }
        };
        let mut categories = BTreeMap::new();
        for (name, c) in doc.categories.iter_mut() {
            if let Some(cat) = self.category(&q, name, c) {
                categories.insert(name.clone(), Arc::new(cat));
            }
        }
        let constants: HashMap<String, Arc<VCat>> = categories.iter().map(|(k, v)| (k.clone(), v.clone())).collect();

        let mut functors = BTreeMap::new();
        for (name, f) in doc.functors.iter() {
            let at = format!("functors.{name}");
            let (Some(src), Some(dst)) =
                (self.cat_ref(&at, &f.src, &categories), self.cat_ref(&at, &f.dst, &categories))
            else {
                continue;
            };
            let mut map = Vec::new();
            let mut ok = true;
            for x in src.objects() {
                match f.map.get(x).map(|y| dst.index_of(y)) {
                    Some(Some(y)) => map.push(y),
                    Some(None) => {
                        self.report(format!("{at}.map.{x}"), format!("`{}` is not an object of `{}`", f.map[x], f.dst));
                        ok = false;
                    }
                    None => {
                        self.report(format!("{at}.map"), format!("object `{x}` is not mapped"));
                        ok = false;
                    }
                }
            }
            for x in f.map.keys() {
                if src.index_of(x).is_none() {
                    self.report(format!("{at}.map.{x}"), format!("`{x}` is not an object of `{}`", f.src));
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            match VFunctor::checked(src, dst, map) {
                Ok(f) => {
                    functors.insert(name.clone(), f);
                }
                Err(e) => self.report(&at, e.to_string()),
            }
        }

        let mut modules = BTreeMap::new();
        for (name, m) in doc.modules.iter_mut() {
            let at = format!("modules.{name}");
            let (Some(src), Some(dst)) =
                (self.cat_ref(&at, &m.src, &categories), self.cat_ref(&at, &m.dst, &categories))
            else {
                continue;
            };
            let Some(raw) = self.matrix(&q, &format!("{at}.matrix"), &mut m.matrix, dst.len(), src.len()) else {
                continue;
            };
            let module = if m.closure { Module::bimodule_closure(src, dst, raw) } else { Module::new(src, dst, raw) };
            match module {
                Ok(r) if r.is_valid() => {
                    modules.insert(name.clone(), r);
                }
                Ok(r) => self.report(&at, format!("not a module: {:?}", r.validate()[0])),
                Err(e) => self.report(&at, e.to_string()),
            }
        }

        let mut exprs = BTreeMap::new();
        for (name, e) in doc.exprs.iter_mut() {
            match expr_from_json(e, &constants) {
                Ok(x) => {
                    *e = expr_to_json(&x);
                    exprs.insert(name.clone(), x);
                }
                Err(msg) => self.report(format!("exprs.{name}"), msg),
            }
        }

        let mut squares = BTreeMap::new();
        for (name, s) in doc.squares.iter_mut() {
            let at = format!("squares.{name}");
            if let Some(entry) = self.square(&at, s, &functors, &constants) {
                squares.insert(name.clone(), entry);
            }
        }

        let mut coalgebras = BTreeMap::new();
        for (name, c) in doc.coalgebras.iter_mut() {
            let at = format!("coalgebras.{name}");
            if let Some(coalg) = self.coalgebra(&at, c, &categories, &constants) {
                coalgebras.insert(name.clone(), Arc::new(coalg));
            }
        }

        let mut models = BTreeMap::new();
        for (name, m) in doc.models.iter_mut() {
            let at = format!("models.{name}");
            let Some(c) = coalgebras.get(&m.coalgebra).cloned() else {
                self.report(&at, format!("unknown coalgebra `{}`", m.coalgebra));
                continue;
            };
            let mut valuation = BTreeMap::new();
            let mut ok = true;
            for (atom, table) in m.valuation.iter_mut() {
                let mut values = vec![None; c.len()];
                for (state, v) in table.iter_mut() {
                    let vat = format!("{at}.valuation.{atom}.{state}");
                    match c.space.index_of(state) {
                        Some(x) => values[x] = self.value(&q, vat, v),
                        None => {
                            self.report(vat, format!("unknown state `{state}`"));
                            ok = false;
                        }
                    }
                }
                if let Some(missing) = values.iter().position(Option::is_none) {
                    self.report(format!("{at}.valuation.{atom}"), format!("no value for state `{}`", c.space.label(missing)));
                    ok = false;
                    continue;
                }
                valuation.insert(atom.clone(), values.into_iter().map(Option::unwrap).collect());
            }
            if !ok {
                continue;
            }
            match Model::new(c, valuation, m.closure) {
                Ok(model) => {
                    models.insert(name.clone(), model);
                }
                Err(e) => self.report(&at, e.to_string()),
            }
        }

        let mut formulas = BTreeMap::new();
        let raw_formulas = doc.formulas.clone();
        for (name, f) in doc.formulas.iter_mut() {
            match formula_from_json(&q, f, &raw_formulas) {
                Ok(phi) => {
                    // references are kept as written so shared subformulas stay shared
                    if !contains_ref(f) {
                        *f = formula_to_json(&q, &phi);
                    }
                    formulas.insert(name.clone(), phi);
                }
                Err(msg) => self.report(format!("formulas.{name}"), msg),
            }
        }

        Some(Workspace {
            doc,
            quantale: q,
            limits: self.limits,
            categories,
            functors,
            modules,
            squares,
            exprs,
            coalgebras,
            models,
            formulas,
        })
    }

    fn square(
        &mut self,
        at: &str,
        s: &mut SquareDoc,
        functors: &BTreeMap<String, VFunctor>,
        constants: &HashMap<String, Arc<VCat>>,
    ) -> Option<SquareEntry> {
        let under = match &s.under {
            None => None,
            Some(e) => match expr_from_json(e, constants) {
                Ok(x) => {
                    s.under = Some(expr_to_json(&x));
                    Some(x)
                }
                Err(msg) => {
                    self.report(format!("{at}.under"), msg);
                    return None;
                }
            },
        };
        let legs = [&s.p0, &s.p1, &s.f, &s.g];
        let forms = [legs.iter().any(|l| l.is_some()), s.ff.is_some(), s.yoneda_left.is_some(), s.yoneda_right.is_some(), s.cocomma.is_some()];
        if forms.iter().filter(|&&b| b).count() != 1 {
            self.report(at, "give exactly one of: p0/p1/f/g, ff, yoneda_left, yoneda_right, cocomma");
            return None;
        }
        let square = if forms[0] {
            let mut fs = Vec::new();
            for (leg, name) in ["p0", "p1", "f", "g"].iter().zip(legs) {
                match name {
                    Some(n) => fs.push(self.functor_ref(&format!("{at}.{leg}"), n, functors)),
                    None => {
                        self.report(at, format!("missing leg `{leg}`"));
                        fs.push(None);
                    }
                }
            }
            let fs: Option<Vec<VFunctor>> = fs.into_iter().collect();
            let mut fs = fs?.into_iter();
            let (p0, p1, f, g) = (fs.next()?, fs.next()?, fs.next()?, fs.next()?);
            LaxSquare::new(p0, p1, f, g)
        } else if let Some(n) = &s.ff {
            Ok(LaxSquare::ff_square(&self.functor_ref(&format!("{at}.ff"), n, functors)?))
        } else if let Some(n) = &s.yoneda_left {
            Ok(LaxSquare::yoneda_left(&self.functor_ref(&format!("{at}.yoneda_left"), n, functors)?))
        } else if let Some(n) = &s.yoneda_right {
            Ok(LaxSquare::yoneda_right(&self.functor_ref(&format!("{at}.yoneda_right"), n, functors)?))
        } else {
            let (f, g) = s.cocomma.as_ref().expect("cocomma form");
            let f = self.functor_ref(&format!("{at}.cocomma"), f, functors);
            let g = self.functor_ref(&format!("{at}.cocomma"), g, functors);
            let (f, g) = (f?, g?);
            cocomma(&f, &g).and_then(|k| k.square(&f, &g))
        };
        match square {
            Ok(square) => Some(SquareEntry { square, under }),
            Err(e) => {
                self.report(at, e.to_string());
                None
            }
        }
    }

    fn coalgebra(
        &mut self,
        at: &str,
        c: &mut CoalgebraDoc,
        categories: &BTreeMap<String, Arc<VCat>>,
        constants: &HashMap<String, Arc<VCat>>,
    ) -> Option<Coalgebra> {
        let space = self.cat_ref(&format!("{at}.space"), &c.space, categories);
        let expr = match expr_from_json(&c.functor, constants) {
            Ok(e) => {
                c.functor = expr_to_json(&e);
                Some(e)
            }
            Err(msg) => {
                self.report(format!("{at}.functor"), msg);
                None
            }
        };
        let (space, expr) = (space?, expr?);
        let ev = match evaluate(&expr, &space, self.limits) {
            Ok(ev) => Arc::new(ev),
            Err(e) => {
                self.report(format!("{at}.functor"), e.to_string());
                return None;
            }
        };
        let mut xi = vec![None; space.len()];
        let mut ok = true;
        for (state, target) in c.xi.iter_mut() {
            let sat = format!("{at}.xi.{state}");
            let Some(x) = space.index_of(state) else {
                self.report(sat, format!("unknown state `{state}`"));
                ok = false;
                continue;
            };
            let t = match &*target {
                TargetDoc::Index(i) if *i < ev.len() => Some(*i),
                TargetDoc::Label(l) => ev.cat.index_of(l),
                TargetDoc::Index(_) => None,
            };
            match t {
                Some(t) => {
                    *target = TargetDoc::Label(ev.cat.label(t).to_string());
                    xi[x] = Some(t);
                }
                None => {
                    self.report(sat, format!("no object {target:?} in {}", expr));
                    ok = false;
                }
            }
        }
        if let Some(missing) = xi.iter().position(Option::is_none) {
            if ok {
                self.report(format!("{at}.xi"), format!("state `{}` has no successor structure", space.label(missing)));
            }
            return None;
        }
        if !ok {
            return None;
        }
        match Coalgebra::on(space, expr, ev, xi.into_iter().map(Option::unwrap).collect()) {
            Ok(c) => Some(c),
            Err(e) => {
                self.report(at, e.to_string());
                None
            }
        }
    }
}

fn contains_ref(v: &Json) -> bool {
    match v {
        Json::Object(m) => m.contains_key("ref") || m.values().any(contains_ref),
        Json::Array(xs) => xs.iter().any(contains_ref),
        _ => false,
    }
}

impl Workspace {
    /// A functor expression by name in `exprs`, or in the text syntax.
    pub fn expr(&self, text: &str) -> Result<EndoExpr, String> {
        if let Some(e) = self.exprs.get(text) {
            return Ok(e.clone());
        }
        let constants = self.categories.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        EndoExpr::parse(text, &constants).map_err(|e| e.to_string())
    }

    /// A formula by name, or inline JSON.
    pub fn formula(&self, text: &str) -> Result<Formula, String> {
        if let Some(f) = self.formulas.get(text) {
            return Ok(f.clone());
        }
        let v: Json = serde_json::from_str(text).map_err(|_| format!("unknown formula `{text}`"))?;
        formula_from_json(&self.quantale, &v, &self.doc.formulas)
    }
}
