//! Finite V-categories and V-functors.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantale::{QValue, Quantale};

/// Guard against the exponential blow-up of presheaf-style constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_objects: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_objects: 4096 }
    }
}

/// A finite category enriched in a commutative quantale.
///
/// `hom(a, b)` stores `A(a, b)`; rows are sources, columns are targets.
#[derive(Clone)]
pub struct VCat {
    quantale: Quantale,
    objects: Vec<String>,
    hom: Vec<QValue>,
    index: HashMap<String, usize>,
}

impl PartialEq for VCat {
    fn eq(&self, other: &Self) -> bool {
        self.quantale == other.quantale && self.objects == other.objects && self.hom == other.hom
    }
}

impl Eq for VCat {}

impl fmt::Debug for VCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "VCat over {} {:?}", self.quantale, self.objects)?;
        for a in 0..self.len() {
            let row: Vec<String> = (0..self.len()).map(|b| self.quantale.format_value(self.hom(a, b))).collect();
            writeln!(f, "  {}: [{}]", self.objects[a], row.join(", "))?;
        }
        Ok(())
    }
}

/// A violated category axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryViolation {
    /// `I ≰ A(a,a)`.
    Identity { a: usize, value: QValue },
    /// `A(b,c) ⊗ A(a,b) ≰ A(a,c)`.
    Composition { a: usize, b: usize, c: usize, composite: QValue, direct: QValue },
}

/// A violated hom inequality `A(a,a') ≰ B(fa,fa')`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorViolation {
    pub a: usize,
    pub a2: usize,
    pub src_value: QValue,
    pub dst_value: QValue,
}

/// A preorder on labelled elements, `le[i][j]` meaning `i ≤ j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preorder {
    pub objects: Vec<String>,
    pub le: Vec<Vec<bool>>,
}

impl Preorder {
    pub fn is_preorder(&self) -> bool {
        let n = self.objects.len();
        (0..n).all(|i| self.le[i][i])
            && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(self.le[i][j] && self.le[j][k]) || self.le[i][k])))
    }
}

impl VCat {
    /// Builds a category from a hom matrix; only shape, labels and carrier
    /// membership are checked here, the axioms are left to [`VCat::validate`].
    pub fn new(quantale: Quantale, objects: Vec<String>, hom: Vec<Vec<QValue>>) -> Result<VCat> {
        let n = objects.len();
        if hom.len() != n || hom.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("hom matrix must be {n}×{n}")));
        }
        VCat::from_flat(quantale, objects, hom.into_iter().flatten().collect())
    }

    pub fn from_flat(quantale: Quantale, objects: Vec<String>, hom: Vec<QValue>) -> Result<VCat> {
        let n = objects.len();
        if hom.len() != n * n {
            return Err(Error::Shape(format!("hom matrix must have {} entries, got {}", n * n, hom.len())));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, label) in objects.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        for v in &hom {
            quantale.check(v)?;
        }
        Ok(VCat { quantale, objects, hom, index })
    }

    pub fn from_fn(
        quantale: Quantale,
        objects: Vec<String>,
        mut hom: impl FnMut(usize, usize) -> QValue,
    ) -> Result<VCat> {
        let n = objects.len();
        let flat = (0..n * n).map(|k| hom(k / n, k % n)).collect();
        VCat::from_flat(quantale, objects, flat)
    }

    /// The one-object category `*` with `hom = I`.
    pub fn unit(quantale: &Quantale) -> VCat {
        VCat::from_flat(quantale.clone(), vec!["*".into()], vec![quantale.unit()]).expect("unit category")
    }

    pub fn empty(quantale: &Quantale) -> VCat {
        VCat::from_flat(quantale.clone(), Vec::new(), Vec::new()).expect("empty category")
    }

    /// The discrete category on the given labels.
    pub fn discrete_on(quantale: &Quantale, objects: Vec<String>) -> Result<VCat> {
        let (i, bot) = (quantale.unit(), quantale.bottom());
        VCat::from_fn(quantale.clone(), objects, |a, b| if a == b { i.clone() } else { bot.clone() })
    }

    pub fn quantale(&self) -> &Quantale {
        &self.quantale
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn label(&self, a: usize) -> &str {
        &self.objects[a]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    #[inline]
    pub fn hom(&self, a: usize, b: usize) -> &QValue {
        &self.hom[a * self.objects.len() + b]
    }

    pub fn hom_matrix(&self) -> Vec<Vec<QValue>> {
        let n = self.len();
        (0..n).map(|a| self.hom[a * n..(a + 1) * n].to_vec()).collect()
    }

    pub fn same_quantale(&self, other: &VCat) -> Result<()> {
        if self.quantale == other.quantale {
            Ok(())
        } else {
            Err(Error::QuantaleMismatch(self.quantale.to_string(), other.quantale.to_string()))
        }
    }

    /// All violated identity and composition inequalities.
    pub fn validate(&self) -> Vec<CategoryViolation> {
        let q = &self.quantale;
        let n = self.len();
        let unit = q.unit();
        let mut out = Vec::new();
        for a in 0..n {
            if !q.le(&unit, self.hom(a, a)) {
                out.push(CategoryViolation::Identity { a, value: self.hom(a, a).clone() });
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let composite = q.tensor(self.hom(b, c), self.hom(a, b));
                    if !q.le(&composite, self.hom(a, c)) {
                        out.push(CategoryViolation::Composition {
                            a,
                            b,
                            c,
                            composite,
                            direct: self.hom(a, c).clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn opposite(&self) -> VCat {
        VCat::from_fn(self.quantale.clone(), self.objects.clone(), |a, b| self.hom(b, a).clone())
            .expect("opposite preserves shape")
    }

    /// `A ⊗ B`: pairs of objects, pointwise tensor of homs.
    pub fn tensor_product(&self, other: &VCat) -> Result<VCat> {
        self.same_quantale(other)?;
        let q = &self.quantale;
        let m = other.len();
        let objects = self
            .objects
            .iter()
            .flat_map(|a| other.objects.iter().map(move |b| format!("({a},{b})")))
            .collect();
        VCat::from_fn(q.clone(), objects, |x, y| q.tensor(self.hom(x / m, y / m), other.hom(x % m, y % m)))
    }

    /// `A + B`: `A`'s objects first; cross-homs are `⊥`.
    ///
    /// If the two label sets collide, every label is prefixed with `L.` or `R.`.
    pub fn coproduct(&self, other: &VCat) -> Result<VCat> {
        self.same_quantale(other)?;
        let clash = other.objects.iter().any(|b| self.index.contains_key(b));
        let objects = if clash {
            self.objects
                .iter()
                .map(|a| format!("L.{a}"))
                .chain(other.objects.iter().map(|b| format!("R.{b}")))
                .collect()
        } else {
            self.objects.iter().chain(other.objects.iter()).cloned().collect()
        };
        let n = self.len();
        let bot = self.quantale.bottom();
        VCat::from_fn(self.quantale.clone(), objects, |x, y| match (x < n, y < n) {
            (true, true) => self.hom(x, y).clone(),
            (false, false) => other.hom(x - n, y - n).clone(),
            _ => bot.clone(),
        })
    }

    /// `|A|`: same objects, identity homs only.
    pub fn discrete(&self) -> VCat {
        VCat::discrete_on(&self.quantale, self.objects.clone()).expect("labels already distinct")
    }

    /// `a ≤ b` iff `I ≤ A(a,b)`.
    pub fn underlying_preorder(&self) -> Preorder {
        let unit = self.quantale.unit();
        let n = self.len();
        Preorder {
            objects: self.objects.clone(),
            le: (0..n).map(|a| (0..n).map(|b| self.quantale.le(&unit, self.hom(a, b))).collect()).collect(),
        }
    }

    /// The free category on a preorder: `I` where related, `⊥` elsewhere.
    pub fn free_on_preorder(quantale: &Quantale, p: &Preorder) -> Result<VCat> {
        let (i, bot) = (quantale.unit(), quantale.bottom());
        VCat::from_fn(quantale.clone(), p.objects.clone(), |a, b| if p.le[a][b] { i.clone() } else { bot.clone() })
    }

    /// The free category on the reflexive-transitive closure of `pairs`.
    pub fn from_order(quantale: &Quantale, objects: Vec<String>, pairs: &[(usize, usize)]) -> Result<VCat> {
        let n = objects.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::Shape(format!("order pair ({a},{b}) out of range")));
            }
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        VCat::free_on_preorder(quantale, &Preorder { objects, le })
    }

    /// `2 * A`: two copies of `A`, with `I` from the lower copy to the upper
    /// one and `⊥` back.
    pub fn tensor_two(&self) -> VCat {
        let n = self.len();
        let objects = (0..2).flat_map(|i| self.objects.iter().map(move |a| format!("({i},{a})"))).collect();
        let (unit, bot) = (self.quantale.unit(), self.quantale.bottom());
        VCat::from_fn(self.quantale.clone(), objects, |x, y| match (x / n, y / n) {
            (0, 0) | (1, 1) => self.hom(x % n, y % n).clone(),
            (0, 1) => unit.clone(),
            _ => bot.clone(),
        })
        .expect("labels distinct")
    }

    /// Relabels objects, keeping homs.
    pub fn relabel(&self, objects: Vec<String>) -> Result<VCat> {
        if objects.len() != self.len() {
            return Err(Error::Shape("relabel needs one label per object".into()));
        }
        VCat::from_flat(self.quantale.clone(), objects, self.hom.clone())
    }

    /// The full subcategory on the listed objects, in that order.
    pub fn full_subcategory(&self, keep: &[usize]) -> Result<VCat> {
        let objects = keep.iter().map(|&a| self.objects[a].clone()).collect();
        VCat::from_fn(self.quantale.clone(), objects, |x, y| self.hom(keep[x], keep[y]).clone())
    }
}

/// A category whose objects are value tables over some base category, kept
/// alongside the tables themselves.
#[derive(Clone, Debug)]
pub struct TableCategory {
    pub cat: Arc<VCat>,
    pub tables: Vec<Vec<QValue>>,
    index: HashMap<Vec<QValue>, usize>,
}

impl TableCategory {
    pub fn new(cat: VCat, tables: Vec<Vec<QValue>>) -> TableCategory {
        let index = tables.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        TableCategory { cat: Arc::new(cat), tables, index }
    }

    pub fn index_of(&self, table: &[QValue]) -> Option<usize> {
        self.index.get(table).copied()
    }
}

/// Renders a table as `[v1,v2,…]`.
pub fn table_label(q: &Quantale, table: &[QValue]) -> String {
    let parts: Vec<String> = table.iter().map(|v| q.format_value(v)).collect();
    format!("[{}]", parts.join(","))
}

/// Enumerates maps `objects(A) → carrier` with `A(a',a) ⊗ φa ≤ φa'`
/// (contravariant) or `A(a,a') ⊗ φa ≤ φa'` (covariant), in lexicographic
/// order with the first object most significant.
pub fn enumerate_presheaf_tables(a: &VCat, covariant: bool, limits: Limits) -> Result<Vec<Vec<QValue>>> {
    let q = a.quantale();
    let carrier = q.carrier().ok_or(Error::InfiniteQuantale)?;
    let n = a.len();
    // weight(x, y): the hom that must transport a value at x to one at y
    let weight: Vec<QValue> =
        (0..n * n).map(|k| if covariant { a.hom(k / n, k % n) } else { a.hom(k % n, k / n) }.clone()).collect();
    let mut out = Vec::new();
    let mut current: Vec<QValue> = Vec::with_capacity(n);
    fn dfs(
        k: usize,
        n: usize,
        carrier: &[QValue],
        q: &Quantale,
        weight: &[QValue],
        current: &mut Vec<QValue>,
        out: &mut Vec<Vec<QValue>>,
        limits: Limits,
    ) -> bool {
        if k == n {
            out.push(current.clone());
            return out.len() <= limits.max_objects;
        }
        for v in carrier {
            let ok = (0..k).all(|j| {
                q.le(&q.tensor(&weight[j * n + k], &current[j]), v)
                    && q.le(&q.tensor(&weight[k * n + j], v), &current[j])
            }) && q.le(&q.tensor(&weight[k * n + k], v), v);
            if ok {
                current.push(v.clone());
                let keep_going = dfs(k + 1, n, carrier, q, weight, current, out, limits);
                current.pop();
                if !keep_going {
                    return false;
                }
            }
        }
        true
    }
    if !dfs(0, n, &carrier, q, &weight, &mut current, &mut out, limits) {
        return Err(Error::TooManyObjects {
            what: format!("{} of a {n}-object category", if covariant { "copresheaves" } else { "presheaves" }),
            count: (carrier.len() as u128).saturating_pow(n as u32),
            limit: limits.max_objects,
        });
    }
    Ok(out)
}

/// `[A^op, V]`, with homs `⋀_a [φa, ψa]`.
pub fn presheaf_category(a: &VCat, limits: Limits) -> Result<TableCategory> {
    let tables = enumerate_presheaf_tables(a, false, limits)?;
    let q = a.quantale();
    let cat = VCat::from_fn(q.clone(), tables.iter().map(|t| table_label(q, t)).collect(), |x, y| {
        pointwise_hom(q, &tables[x], &tables[y])
    })?;
    Ok(TableCategory::new(cat, tables))
}

/// `[A, V]^op`, with homs `⋀_a [ψa, φa]`.
pub fn copresheaf_category(a: &VCat, limits: Limits) -> Result<TableCategory> {
    let tables = enumerate_presheaf_tables(a, true, limits)?;
    let q = a.quantale();
    let cat = VCat::from_fn(q.clone(), tables.iter().map(|t| table_label(q, t)).collect(), |x, y| {
        pointwise_hom(q, &tables[y], &tables[x])
    })?;
    Ok(TableCategory::new(cat, tables))
}

/// `⋀_a [φa, ψa]`.
pub fn pointwise_hom(q: &Quantale, phi: &[QValue], psi: &[QValue]) -> QValue {
    q.meet(phi.iter().zip(psi).map(|(x, y)| q.hom(x, y)))
}

/// A V-functor between finite categories, given by its object map.
#[derive(Clone, PartialEq, Eq)]
pub struct VFunctor {
    src: Arc<VCat>,
    dst: Arc<VCat>,
    map: Vec<usize>,
}

impl fmt::Debug for VFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> =
            self.map.iter().enumerate().map(|(a, &b)| format!("{}↦{}", self.src.label(a), self.dst.label(b))).collect();
        write!(f, "VFunctor {{{}}}", pairs.join(", "))
    }
}

fn same_cat(x: &Arc<VCat>, y: &Arc<VCat>) -> bool {
    Arc::ptr_eq(x, y) || **x == **y
}

impl VFunctor {
    /// Builds a functor from an object map; the hom inequality is not checked
    /// (see [`VFunctor::validate`] and [`VFunctor::checked`]).
    pub fn new(src: Arc<VCat>, dst: Arc<VCat>, map: Vec<usize>) -> Result<VFunctor> {
        src.same_quantale(&dst)?;
        if map.len() != src.len() {
            return Err(Error::Shape(format!("object map has {} entries for {} objects", map.len(), src.len())));
        }
        if let Some(&b) = map.iter().find(|&&b| b >= dst.len()) {
            return Err(Error::Shape(format!("object map targets index {b} outside {} objects", dst.len())));
        }
        Ok(VFunctor { src, dst, map })
    }

    /// Like [`VFunctor::new`] but rejects maps that are not V-functors.
    pub fn checked(src: Arc<VCat>, dst: Arc<VCat>, map: Vec<usize>) -> Result<VFunctor> {
        let f = VFunctor::new(src, dst, map)?;
        if let Some(v) = f.validate().first() {
            let q = f.src.quantale();
            return Err(Error::NotAFunctor(format!(
                "hom({},{}) = {} exceeds hom({},{}) = {}",
                f.src.label(v.a),
                f.src.label(v.a2),
                q.format_value(&v.src_value),
                f.dst.label(f.map[v.a]),
                f.dst.label(f.map[v.a2]),
                q.format_value(&v.dst_value),
            )));
        }
        Ok(f)
    }

    /// Builds a functor from `(source label, target label)` pairs.
    pub fn from_labels(src: Arc<VCat>, dst: Arc<VCat>, pairs: &[(&str, &str)]) -> Result<VFunctor> {
        let mut map = vec![usize::MAX; src.len()];
        for (a, b) in pairs {
            map[src.require(a)?] = dst.require(b)?;
        }
        if let Some(a) = map.iter().position(|&b| b == usize::MAX) {
            return Err(Error::Shape(format!("object `{}` is not mapped", src.label(a))));
        }
        VFunctor::new(src, dst, map)
    }

    pub fn identity(a: Arc<VCat>) -> VFunctor {
        let map = (0..a.len()).collect();
        VFunctor { src: a.clone(), dst: a, map }
    }

    /// The functor constant at `b`.
    pub fn constant(src: Arc<VCat>, dst: Arc<VCat>, b: usize) -> Result<VFunctor> {
        let map = vec![b; src.len()];
        VFunctor::new(src, dst, map)
    }

    pub fn src(&self) -> &Arc<VCat> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<VCat> {
        &self.dst
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &VFunctor) -> Result<VFunctor> {
        if !same_cat(&self.dst, &g.src) {
            return Err(Error::Precondition("composite needs matching middle categories".into()));
        }
        Ok(VFunctor { src: self.src.clone(), dst: g.dst.clone(), map: self.map.iter().map(|&b| g.map[b]).collect() })
    }

    /// The same object map viewed between the opposite categories.
    pub fn opposite(&self) -> VFunctor {
        VFunctor { src: Arc::new(self.src.opposite()), dst: Arc::new(self.dst.opposite()), map: self.map.clone() }
    }

    /// All pairs with `A(a,a') ≰ B(fa,fa')`.
    pub fn validate(&self) -> Vec<FunctorViolation> {
        let q = self.src.quantale();
        let n = self.src.len();
        let mut out = Vec::new();
        for a in 0..n {
            for a2 in 0..n {
                let (x, y) = (self.src.hom(a, a2), self.dst.hom(self.map[a], self.map[a2]));
                if !q.le(x, y) {
                    out.push(FunctorViolation { a, a2, src_value: x.clone(), dst_value: y.clone() });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `A(a,a') = B(fa,fa')` for all pairs.
    pub fn is_fully_faithful(&self) -> bool {
        let n = self.src.len();
        (0..n).all(|a| (0..n).all(|a2| self.src.hom(a, a2) == self.dst.hom(self.map[a], self.map[a2])))
    }

    pub fn is_surjective_on_objects(&self) -> bool {
        let mut hit = vec![false; self.dst.len()];
        for &b in &self.map {
            hit[b] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut hit = vec![false; self.dst.len()];
        self.map.iter().all(|&b| !std::mem::replace(&mut hit[b], true))
    }

    /// Same source and target (by value).
    pub fn parallel_to(&self, g: &VFunctor) -> bool {
        same_cat(&self.src, &g.src) && same_cat(&self.dst, &g.dst)
    }
}

/// `f ≤ g` iff `I ≤ B(fa, ga)` for every `a`.
pub fn functor_le(f: &VFunctor, g: &VFunctor) -> Result<bool> {
    if !f.parallel_to(g) {
        return Err(Error::Precondition("functor_le needs parallel functors".into()));
    }
    let q = f.dst.quantale();
    let unit = q.unit();
    Ok((0..f.src.len()).all(|a| q.le(&unit, f.dst.hom(f.map[a], g.map[a]))))
}
