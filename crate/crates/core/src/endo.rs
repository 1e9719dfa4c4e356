//! Endofunctors of V-categories as evaluable expressions.
//!
//! The grammar covers the Kripke-polynomial functors (identity, constants,
//! sums, tensors, duals, lower sets `L`, upper sets `U`), the power functor
//! `P`, and two functors without the Beck–Chevalley condition: connected
//! components and the "some two coordinates agree" subfunctor of `A³`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantale::{QValue, Quantale};
use crate::vcat::{enumerate_presheaf_tables, functor_le, pointwise_hom, table_label, Limits, VCat, VFunctor};

#[derive(Clone, PartialEq, Eq)]
pub enum EndoExpr {
    Id,
    /// Constant functor; the name is used only for display.
    Const(String, Arc<VCat>),
    Sum(Box<EndoExpr>, Box<EndoExpr>),
    Tensor(Box<EndoExpr>, Box<EndoExpr>),
    /// `T∂ A = (T(A^op))^op`.
    Dual(Box<EndoExpr>),
    /// `L T A = [(TA)^op, V]`.
    Lower(Box<EndoExpr>),
    /// `U T A = [TA, V]^op`.
    Upper(Box<EndoExpr>),
    /// `P T A`: all V-subsets of `TA`, Egli–Milner homs.
    Power(Box<EndoExpr>),
    /// Connected components of the underlying preorder, discretely ordered.
    ConnectedComponents,
    /// Triples `(a1,a2,a3)` of `A⊗A⊗A` with two equal coordinates.
    TripleDiag,
}

impl fmt::Debug for EndoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for EndoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndoExpr::Id => f.write_str("id"),
            EndoExpr::Const(name, _) => write!(f, "const({name})"),
            EndoExpr::Sum(s, t) => write!(f, "sum({s},{t})"),
            EndoExpr::Tensor(s, t) => write!(f, "tensor({s},{t})"),
            EndoExpr::Dual(t) => write!(f, "dual({t})"),
            EndoExpr::Lower(t) => write!(f, "L({t})"),
            EndoExpr::Upper(t) => write!(f, "U({t})"),
            EndoExpr::Power(t) => write!(f, "P({t})"),
            EndoExpr::ConnectedComponents => f.write_str("cc"),
            EndoExpr::TripleDiag => f.write_str("triple"),
        }
    }
}

impl EndoExpr {
    pub fn lower(t: EndoExpr) -> EndoExpr {
        EndoExpr::Lower(Box::new(t))
    }

    pub fn upper(t: EndoExpr) -> EndoExpr {
        EndoExpr::Upper(Box::new(t))
    }

    pub fn power(t: EndoExpr) -> EndoExpr {
        EndoExpr::Power(Box::new(t))
    }

    pub fn dual(t: EndoExpr) -> EndoExpr {
        EndoExpr::Dual(Box::new(t))
    }

    pub fn sum(s: EndoExpr, t: EndoExpr) -> EndoExpr {
        EndoExpr::Sum(Box::new(s), Box::new(t))
    }

    pub fn tensor(s: EndoExpr, t: EndoExpr) -> EndoExpr {
        EndoExpr::Tensor(Box::new(s), Box::new(t))
    }

    pub fn constant(name: impl Into<String>, x: VCat) -> EndoExpr {
        EndoExpr::Const(name.into(), Arc::new(x))
    }

    /// Nesting depth of functor constructors; `Id` and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            EndoExpr::Id | EndoExpr::Const(..) => 0,
            EndoExpr::ConnectedComponents | EndoExpr::TripleDiag => 1,
            EndoExpr::Sum(s, t) | EndoExpr::Tensor(s, t) => 1 + s.depth().max(t.depth()),
            EndoExpr::Dual(t) => t.depth(),
            EndoExpr::Lower(t) | EndoExpr::Upper(t) | EndoExpr::Power(t) => 1 + t.depth(),
        }
    }

    /// Built only from `Id`, constants, `+`, `⊗`, `∂`, `L` and `U`.
    pub fn is_kripke_polynomial(&self) -> bool {
        match self {
            EndoExpr::Id | EndoExpr::Const(..) => true,
            EndoExpr::Sum(s, t) | EndoExpr::Tensor(s, t) => s.is_kripke_polynomial() && t.is_kripke_polynomial(),
            EndoExpr::Dual(t) | EndoExpr::Lower(t) | EndoExpr::Upper(t) => t.is_kripke_polynomial(),
            _ => false,
        }
    }

    /// Whether the functor is known to satisfy the Beck–Chevalley condition
    /// over `q`: Kripke-polynomial functors always, `P` when `⊗ = ∧`.
    pub fn is_known_bcc(&self, q: &Quantale) -> bool {
        match self {
            EndoExpr::Id | EndoExpr::Const(..) => true,
            EndoExpr::Sum(s, t) | EndoExpr::Tensor(s, t) => s.is_known_bcc(q) && t.is_known_bcc(q),
            EndoExpr::Dual(t) | EndoExpr::Lower(t) | EndoExpr::Upper(t) => t.is_known_bcc(q),
            EndoExpr::Power(t) => q.is_idempotent() && t.is_known_bcc(q),
            EndoExpr::ConnectedComponents | EndoExpr::TripleDiag => false,
        }
    }

    /// Whether evaluation needs a finite carrier.
    pub fn needs_finite_quantale(&self) -> bool {
        match self {
            EndoExpr::Lower(_) | EndoExpr::Upper(_) | EndoExpr::Power(_) => true,
            EndoExpr::Sum(s, t) | EndoExpr::Tensor(s, t) => s.needs_finite_quantale() || t.needs_finite_quantale(),
            EndoExpr::Dual(t) => t.needs_finite_quantale(),
            _ => false,
        }
    }

    /// Parses the compact syntax used by [`fmt::Display`], e.g. `P(id)`,
    /// `sum(const(X),L(dual(id)))`. `L`, `U`, `P` and `dual` with no argument
    /// list mean application to `id`.
    pub fn parse(text: &str, constants: &HashMap<String, Arc<VCat>>) -> Result<EndoExpr> {
        let mut p = ExprParser { s: text.as_bytes(), pos: 0, constants };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
    constants: &'a HashMap<String, Arc<VCat>>,
}

impl ExprParser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Precondition(format!(
            "functor expression `{}`: {what} at offset {}",
            String::from_utf8_lossy(self.s),
            self.pos
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"_.-".contains(&self.s[self.pos])) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.pos < self.s.len() && self.s[self.pos] == c {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn args(&mut self, n: usize) -> Result<Vec<EndoExpr>> {
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 && !self.eat(b',') {
                return Err(self.error("expected `,`"));
            }
            out.push(self.expr()?);
        }
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<EndoExpr> {
        let name = self.ident()?;
        let open = self.eat(b'(');
        let unary = |this: &mut Self, wrap: fn(EndoExpr) -> EndoExpr| -> Result<EndoExpr> {
            if open {
                Ok(wrap(this.args(1)?.pop().expect("one argument")))
            } else {
                Ok(wrap(EndoExpr::Id))
            }
        };
        match name.as_str() {
            "id" | "Id" if !open => Ok(EndoExpr::Id),
            "cc" | "connected_components" if !open => Ok(EndoExpr::ConnectedComponents),
            "triple" | "triple_diag" if !open => Ok(EndoExpr::TripleDiag),
            "L" | "lower" => unary(self, EndoExpr::lower),
            "U" | "upper" => unary(self, EndoExpr::upper),
            "P" | "power" => unary(self, EndoExpr::power),
            "dual" => unary(self, EndoExpr::dual),
            "sum" | "tensor" if open => {
                let mut a = self.args(2)?;
                let (t, s) = (a.pop().unwrap(), a.pop().unwrap());
                Ok(if name == "sum" { EndoExpr::sum(s, t) } else { EndoExpr::tensor(s, t) })
            }
            "const" if open => {
                let c = self.ident()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                let x = self.constants.get(&c).ok_or_else(|| Error::Precondition(format!("unknown category `{c}`")))?;
                Ok(EndoExpr::Const(c, x.clone()))
            }
            _ => Err(self.error(&format!("unknown functor `{name}`"))),
        }
    }
}

/// An object of an evaluated functor, described structurally.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    /// An object of the argument (`Id`) or of a constant.
    Base(usize),
    Inl(usize),
    Inr(usize),
    Pair(usize, usize),
    /// A (co)presheaf or V-subset, as a table over the child's objects.
    Table(Vec<QValue>),
    /// A connected component, named by its least member.
    Component(usize),
    Triple(usize, usize, usize),
}

/// `T A` together with enough structure to apply `T` to functors.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub expr: EndoExpr,
    /// The argument `A`.
    pub base: Arc<VCat>,
    pub cat: Arc<VCat>,
    pub elems: Vec<Elem>,
    pub children: Vec<Arc<Evaluated>>,
    /// For `ConnectedComponents`: the component index of each base object.
    pub component_of: Vec<usize>,
    index: HashMap<Elem, usize>,
}

impl Evaluated {
    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// The table behind object `x` of an `L`/`U`/`P` node.
    pub fn table(&self, x: usize) -> Option<&[QValue]> {
        match &self.elems[x] {
            Elem::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// The child evaluation (for unary nodes).
    pub fn child(&self) -> &Arc<Evaluated> {
        &self.children[0]
    }

    /// `T f` for `f: self.base → target.base`.
    pub fn functor_to(&self, target: &Evaluated, f: &VFunctor) -> Result<VFunctor> {
        if self.expr != target.expr {
            return Err(Error::Precondition("evaluations of different functors".into()));
        }
        let map = map_objects(&self.expr, f, self, target)?;
        VFunctor::new(self.cat.clone(), target.cat.clone(), map)
    }
}

fn finish(expr: &EndoExpr, base: Arc<VCat>, cat: VCat, elems: Vec<Elem>, children: Vec<Arc<Evaluated>>) -> Evaluated {
    let index = elems.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    Evaluated { expr: expr.clone(), base, cat: Arc::new(cat), elems, children, component_of: Vec::new(), index }
}

fn check_size(what: &str, n: u128, limits: Limits) -> Result<()> {
    if n > limits.max_objects as u128 {
        Err(Error::TooManyObjects { what: what.to_string(), count: n, limit: limits.max_objects })
    } else {
        Ok(())
    }
}

/// `φ↑(a) = ⋁_{a'} φ(a') ⊗ A(a',a)`.
pub fn up_closure(a: &VCat, phi: &[QValue]) -> Vec<QValue> {
    let q = a.quantale();
    (0..a.len()).map(|x| q.join((0..a.len()).map(|y| q.tensor(&phi[y], a.hom(y, x))))).collect()
}

/// `φ↓(a) = ⋁_{a'} φ(a') ⊗ A(a,a')`.
pub fn down_closure(a: &VCat, phi: &[QValue]) -> Vec<QValue> {
    let q = a.quantale();
    (0..a.len()).map(|x| q.join((0..a.len()).map(|y| q.tensor(&phi[y], a.hom(x, y))))).collect()
}

/// All tables `objects(A) → carrier`, first object most significant.
fn all_tables(a: &VCat, limits: Limits) -> Result<Vec<Vec<QValue>>> {
    let q = a.quantale();
    let carrier = q.carrier().ok_or(Error::InfiniteQuantale)?;
    let n = a.len();
    check_size(
        &format!("the power object of a {n}-object category"),
        (carrier.len() as u128).saturating_pow(n as u32),
        limits,
    )?;
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<QValue>| {
                carrier.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

/// The Egli–Milner hom `PA(φ,ψ)` given precomputed closures.
fn egli_milner(q: &Quantale, phi: &[QValue], phi_up: &[QValue], psi: &[QValue], psi_down: &[QValue]) -> QValue {
    q.tensor(&pointwise_hom(q, phi, psi_down), &pointwise_hom(q, psi, phi_up))
}

/// `PA(φ,ψ)` on a single pair.
pub fn power_hom(a: &VCat, phi: &[QValue], psi: &[QValue]) -> QValue {
    egli_milner(a.quantale(), phi, &up_closure(a, phi), psi, &down_closure(a, psi))
}

fn connected_components(a: &VCat) -> Vec<usize> {
    let pre = a.underlying_preorder();
    let n = a.len();
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
    for x in 0..n {
        for y in 0..n {
            if pre.le[x][y] {
                uf.union(x, y);
            }
        }
    }
    // components numbered by their least member
    let mut rep_of_root: HashMap<usize, usize> = HashMap::new();
    let mut component = vec![0; n];
    let mut count = 0;
    for (x, slot) in component.iter_mut().enumerate() {
        let root = uf.find(x);
        *slot = *rep_of_root.entry(root).or_insert_with(|| {
            count += 1;
            count - 1
        });
    }
    component
}

/// Evaluates `T A`.
pub fn evaluate(expr: &EndoExpr, a: &Arc<VCat>, limits: Limits) -> Result<Evaluated> {
    let q = a.quantale().clone();
    match expr {
        EndoExpr::Id => Ok(finish(expr, a.clone(), (**a).clone(), (0..a.len()).map(Elem::Base).collect(), vec![])),
        EndoExpr::Const(_, x) => {
            x.same_quantale(a)?;
            Ok(finish(expr, a.clone(), (**x).clone(), (0..x.len()).map(Elem::Base).collect(), vec![]))
        }
        EndoExpr::Sum(s, t) => {
            let (l, r) = (evaluate(s, a, limits)?, evaluate(t, a, limits)?);
            let (n, m) = (l.len(), r.len());
            check_size("a sum", (n + m) as u128, limits)?;
            let labels = l
                .cat
                .objects()
                .iter()
                .map(|x| format!("inl({x})"))
                .chain(r.cat.objects().iter().map(|y| format!("inr({y})")))
                .collect();
            let bot = q.bottom();
            let cat = VCat::from_fn(q.clone(), labels, |x, y| match (x < n, y < n) {
                (true, true) => l.cat.hom(x, y).clone(),
                (false, false) => r.cat.hom(x - n, y - n).clone(),
                _ => bot.clone(),
            })?;
            let elems = (0..n).map(Elem::Inl).chain((0..m).map(Elem::Inr)).collect();
            Ok(finish(expr, a.clone(), cat, elems, vec![Arc::new(l), Arc::new(r)]))
        }
        EndoExpr::Tensor(s, t) => {
            let (l, r) = (evaluate(s, a, limits)?, evaluate(t, a, limits)?);
            check_size("a tensor", (l.len() * r.len()) as u128, limits)?;
            let cat = l.cat.tensor_product(&r.cat)?;
            let elems = (0..l.len()).flat_map(|x| (0..r.len()).map(move |y| Elem::Pair(x, y))).collect();
            Ok(finish(expr, a.clone(), cat, elems, vec![Arc::new(l), Arc::new(r)]))
        }
        EndoExpr::Dual(t) => {
            let child = evaluate(t, &Arc::new(a.opposite()), limits)?;
            let cat = child.cat.opposite();
            let elems = child.elems.clone();
            Ok(finish(expr, a.clone(), cat, elems, vec![Arc::new(child)]))
        }
        EndoExpr::Lower(t) | EndoExpr::Upper(t) => {
            let child = evaluate(t, a, limits)?;
            let covariant = matches!(expr, EndoExpr::Upper(_));
            let tables = enumerate_presheaf_tables(&child.cat, covariant, limits)?;
            let labels = tables.iter().map(|t| table_label(&q, t)).collect();
            let cat = VCat::from_fn(q.clone(), labels, |x, y| {
                if covariant {
                    pointwise_hom(&q, &tables[y], &tables[x])
                } else {
                    pointwise_hom(&q, &tables[x], &tables[y])
                }
            })?;
            let elems = tables.into_iter().map(Elem::Table).collect();
            Ok(finish(expr, a.clone(), cat, elems, vec![Arc::new(child)]))
        }
        EndoExpr::Power(t) => {
            let child = evaluate(t, a, limits)?;
            let tables = all_tables(&child.cat, limits)?;
            let ups: Vec<Vec<QValue>> = tables.iter().map(|t| up_closure(&child.cat, t)).collect();
            let downs: Vec<Vec<QValue>> = tables.iter().map(|t| down_closure(&child.cat, t)).collect();
            let labels = tables.iter().map(|t| table_label(&q, t)).collect();
            let cat = VCat::from_fn(q.clone(), labels, |x, y| egli_milner(&q, &tables[x], &ups[x], &tables[y], &downs[y]))?;
            let elems = tables.into_iter().map(Elem::Table).collect();
            Ok(finish(expr, a.clone(), cat, elems, vec![Arc::new(child)]))
        }
        EndoExpr::ConnectedComponents => {
            let component_of = connected_components(a);
            let count = component_of.iter().copied().max().map_or(0, |c| c + 1);
            let mut reps = vec![usize::MAX; count];
            for (x, &c) in component_of.iter().enumerate() {
                if reps[c] == usize::MAX {
                    reps[c] = x;
                }
            }
            let labels = reps.iter().map(|&x| format!("comp_{}", a.label(x))).collect();
            let cat = VCat::discrete_on(&q, labels)?;
            let elems = reps.into_iter().map(Elem::Component).collect();
            let mut ev = finish(expr, a.clone(), cat, elems, vec![]);
            ev.component_of = component_of;
            Ok(ev)
        }
        EndoExpr::TripleDiag => {
            let n = a.len();
            check_size("a triple product", (n as u128).pow(3), limits)?;
            let mut keep = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        if x == y || x == z || y == z {
                            keep.push((x, y, z));
                        }
                    }
                }
            }
            let labels = keep.iter().map(|&(x, y, z)| format!("({},{},{})", a.label(x), a.label(y), a.label(z))).collect();
            let cat = VCat::from_fn(q.clone(), labels, |i, j| {
                let ((x, y, z), (u, v, w)) = (keep[i], keep[j]);
                q.tensor(&q.tensor(a.hom(x, u), a.hom(y, v)), a.hom(z, w))
            })?;
            let elems = keep.into_iter().map(|(x, y, z)| Elem::Triple(x, y, z)).collect();
            Ok(finish(expr, a.clone(), cat, elems, vec![]))
        }
    }
}

fn lookup(ev: &Evaluated, e: Elem) -> Result<usize> {
    ev.index_of(&e).ok_or_else(|| Error::Internal(format!("image {e:?} is not an object of {}", ev.expr)))
}

/// The object map of `T f: T A → T B`.
pub fn map_objects(expr: &EndoExpr, f: &VFunctor, ev_a: &Evaluated, ev_b: &Evaluated) -> Result<Vec<usize>> {
    let q = ev_a.cat.quantale().clone();
    match expr {
        EndoExpr::Id => Ok(f.map().to_vec()),
        EndoExpr::Const(..) => Ok((0..ev_a.len()).collect()),
        EndoExpr::Sum(s, t) => {
            let l = map_objects(s, f, &ev_a.children[0], &ev_b.children[0])?;
            let r = map_objects(t, f, &ev_a.children[1], &ev_b.children[1])?;
            ev_a.elems
                .iter()
                .map(|e| match e {
                    Elem::Inl(x) => lookup(ev_b, Elem::Inl(l[*x])),
                    Elem::Inr(y) => lookup(ev_b, Elem::Inr(r[*y])),
                    _ => Err(Error::Internal("sum element".into())),
                })
                .collect()
        }
        EndoExpr::Tensor(s, t) => {
            let l = map_objects(s, f, &ev_a.children[0], &ev_b.children[0])?;
            let r = map_objects(t, f, &ev_a.children[1], &ev_b.children[1])?;
            ev_a.elems
                .iter()
                .map(|e| match e {
                    Elem::Pair(x, y) => lookup(ev_b, Elem::Pair(l[*x], r[*y])),
                    _ => Err(Error::Internal("tensor element".into())),
                })
                .collect()
        }
        EndoExpr::Dual(t) => {
            let fop = VFunctor::new(ev_a.children[0].base.clone(), ev_b.children[0].base.clone(), f.map().to_vec())?;
            map_objects(t, &fop, &ev_a.children[0], &ev_b.children[0])
        }
        EndoExpr::Lower(t) | EndoExpr::Upper(t) | EndoExpr::Power(t) => {
            let (ca, cb) = (&ev_a.children[0], &ev_b.children[0]);
            let inner = map_objects(t, f, ca, cb)?;
            let tb = &cb.cat;
            ev_a.elems
                .iter()
                .map(|e| {
                    let Elem::Table(phi) = e else {
                        return Err(Error::Internal("table element".into()));
                    };
                    let image: Vec<QValue> = (0..tb.len())
                        .map(|y| match expr {
                            // ⋁_x φx ⊗ TB(y, Tf x)
                            EndoExpr::Lower(_) => q.join(phi.iter().enumerate().map(|(x, v)| q.tensor(v, tb.hom(y, inner[x])))),
                            // ⋁_x φx ⊗ TB(Tf x, y)
                            EndoExpr::Upper(_) => q.join(phi.iter().enumerate().map(|(x, v)| q.tensor(v, tb.hom(inner[x], y)))),
                            // ⋁_{x: Tf x = y} φx
                            _ => q.join(phi.iter().enumerate().filter(|(x, _)| inner[*x] == y).map(|(_, v)| v.clone())),
                        })
                        .collect();
                    lookup(ev_b, Elem::Table(image))
                })
                .collect()
        }
        EndoExpr::ConnectedComponents => ev_a
            .elems
            .iter()
            .map(|e| match e {
                Elem::Component(x) => {
                    let c = ev_b.component_of[f.apply(*x)];
                    Ok(c)
                }
                _ => Err(Error::Internal("component element".into())),
            })
            .collect(),
        EndoExpr::TripleDiag => ev_a
            .elems
            .iter()
            .map(|e| match e {
                Elem::Triple(x, y, z) => lookup(ev_b, Elem::Triple(f.apply(*x), f.apply(*y), f.apply(*z))),
                _ => Err(Error::Internal("triple element".into())),
            })
            .collect(),
    }
}

/// `T A`.
pub fn apply_to_category(expr: &EndoExpr, a: &Arc<VCat>, limits: Limits) -> Result<Arc<VCat>> {
    Ok(evaluate(expr, a, limits)?.cat)
}

/// `T f`, evaluating `T` at both ends of `f`.
pub fn apply_to_functor(expr: &EndoExpr, f: &VFunctor, limits: Limits) -> Result<VFunctor> {
    let ev_a = evaluate(expr, f.src(), limits)?;
    let ev_b = evaluate(expr, f.dst(), limits)?;
    ev_a.functor_to(&ev_b, f)
}

/// `Tf ≤ Tg`, given `f ≤ g`.
pub fn check_local_monotonicity(expr: &EndoExpr, f: &VFunctor, g: &VFunctor, limits: Limits) -> Result<bool> {
    if !functor_le(f, g)? {
        return Err(Error::Precondition("local monotonicity needs f ≤ g".into()));
    }
    let ev_a = evaluate(expr, f.src(), limits)?;
    let ev_b = evaluate(expr, f.dst(), limits)?;
    functor_le(&ev_a.functor_to(&ev_b, f)?, &ev_a.functor_to(&ev_b, g)?)
}
