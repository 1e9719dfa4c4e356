//! Modules (V-valued relations), graphs of functors and collages.
//!
//! A module `R: A -|-> B` is stored as a matrix `R(b, a)`: rows are objects of
//! the destination `B`, columns objects of the source `A`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantale::QValue;
use crate::vcat::{presheaf_category, Limits, TableCategory, VCat, VFunctor};

#[derive(Clone, PartialEq, Eq)]
pub struct Module {
    src: Arc<VCat>,
    dst: Arc<VCat>,
    matrix: Vec<QValue>,
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.src.quantale();
        writeln!(f, "Module {:?} -|-> {:?}", self.src.objects(), self.dst.objects())?;
        for b in 0..self.dst.len() {
            let row: Vec<String> = (0..self.src.len()).map(|a| q.format_value(self.get(b, a))).collect();
            writeln!(f, "  {}: [{}]", self.dst.label(b), row.join(", "))?;
        }
        Ok(())
    }
}

/// A violated bimodule inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleViolation {
    /// `B(b2,b) ⊗ R(b,a) ≰ R(b2,a)`.
    Left { b2: usize, b: usize, a: usize },
    /// `R(b,a) ⊗ A(a,a2) ≰ R(b,a2)`.
    Right { b: usize, a: usize, a2: usize },
}

impl Module {
    pub fn new(src: Arc<VCat>, dst: Arc<VCat>, matrix: Vec<Vec<QValue>>) -> Result<Module> {
        let (n, m) = (dst.len(), src.len());
        if matrix.len() != n || matrix.iter().any(|row| row.len() != m) {
            return Err(Error::Shape(format!("module matrix must be {n}×{m} (rows = destination objects)")));
        }
        Module::from_flat(src, dst, matrix.into_iter().flatten().collect())
    }

    pub fn from_flat(src: Arc<VCat>, dst: Arc<VCat>, matrix: Vec<QValue>) -> Result<Module> {
        src.same_quantale(&dst)?;
        if matrix.len() != src.len() * dst.len() {
            return Err(Error::Shape("module matrix has the wrong number of entries".into()));
        }
        for v in &matrix {
            src.quantale().check(v)?;
        }
        Ok(Module { src, dst, matrix })
    }

    pub fn from_fn(
        src: Arc<VCat>,
        dst: Arc<VCat>,
        mut entry: impl FnMut(usize, usize) -> QValue,
    ) -> Result<Module> {
        let m = src.len();
        let flat = (0..dst.len() * m).map(|k| entry(k / m, k % m)).collect();
        Module::from_flat(src, dst, flat)
    }

    pub fn src(&self) -> &Arc<VCat> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<VCat> {
        &self.dst
    }

    /// `R(b, a)`.
    #[inline]
    pub fn get(&self, b: usize, a: usize) -> &QValue {
        &self.matrix[b * self.src.len() + a]
    }

    pub fn matrix(&self) -> Vec<Vec<QValue>> {
        let m = self.src.len();
        (0..self.dst.len()).map(|b| self.matrix[b * m..(b + 1) * m].to_vec()).collect()
    }

    pub fn validate(&self) -> Vec<ModuleViolation> {
        let q = self.src.quantale();
        let (n, m) = (self.dst.len(), self.src.len());
        let mut out = Vec::new();
        for b in 0..n {
            for a in 0..m {
                let r = self.get(b, a);
                for b2 in 0..n {
                    if !q.le(&q.tensor(self.dst.hom(b2, b), r), self.get(b2, a)) {
                        out.push(ModuleViolation::Left { b2, b, a });
                    }
                }
                for a2 in 0..m {
                    if !q.le(&q.tensor(r, self.src.hom(a, a2)), self.get(b, a2)) {
                        out.push(ModuleViolation::Right { b, a, a2 });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The least module above a raw matrix:
    /// `R̂(b,a) = ⋁_{b',a'} B(b,b') ⊗ M(b',a') ⊗ A(a',a)`.
    pub fn bimodule_closure(src: Arc<VCat>, dst: Arc<VCat>, raw: Vec<Vec<QValue>>) -> Result<Module> {
        let m = Module::new(src, dst, raw)?;
        let q = m.src.quantale().clone();
        let (nb, na) = (m.dst.len(), m.src.len());
        Module::from_fn(m.src.clone(), m.dst.clone(), |b, a| {
            q.join((0..nb).flat_map(|b2| {
                let (q, m) = (&q, &m);
                (0..na).map(move |a2| q.tensor(&q.tensor(m.dst.hom(b, b2), m.get(b2, a2)), m.src.hom(a2, a)))
            }))
        })
    }

    /// The hom-functor `A(a', a)` as a module `A -|-> A`.
    pub fn identity(a: Arc<VCat>) -> Module {
        let matrix = (0..a.len() * a.len()).map(|k| a.hom(k / a.len(), k % a.len()).clone()).collect();
        Module { src: a.clone(), dst: a, matrix }
    }

    /// `S · R` for `self = S: B -|-> C` and `r = R: A -|-> B`:
    /// `(S·R)(c,a) = ⋁_b S(c,b) ⊗ R(b,a)`.
    pub fn after(&self, r: &Module) -> Result<Module> {
        if !(Arc::ptr_eq(&self.src, &r.dst) || *self.src == *r.dst) {
            return Err(Error::Precondition("composite needs matching middle categories".into()));
        }
        let q = self.src.quantale();
        let nb = self.src.len();
        Module::from_fn(r.src.clone(), self.dst.clone(), |c, a| {
            q.join((0..nb).map(|b| q.tensor(self.get(c, b), r.get(b, a))))
        })
    }

    /// Pointwise order.
    pub fn le(&self, other: &Module) -> bool {
        let q = self.src.quantale();
        self.matrix.len() == other.matrix.len() && self.matrix.iter().zip(&other.matrix).all(|(x, y)| q.le(x, y))
    }

    /// Pointwise meet of two parallel modules.
    pub fn meet(&self, other: &Module) -> Result<Module> {
        if self.matrix.len() != other.matrix.len() {
            return Err(Error::Shape("meet needs parallel modules".into()));
        }
        let q = self.src.quantale();
        let matrix = self.matrix.iter().zip(&other.matrix).map(|(x, y)| q.meet2(x, y)).collect();
        Ok(Module { src: self.src.clone(), dst: self.dst.clone(), matrix })
    }

    /// The same matrix, transposed, as a module `B^op -|-> A^op`.
    pub fn dual(&self) -> Module {
        let (n, m) = (self.dst.len(), self.src.len());
        let matrix = (0..m * n).map(|k| self.get(k % n, k / n).clone()).collect();
        Module { src: Arc::new(self.dst.opposite()), dst: Arc::new(self.src.opposite()), matrix }
    }
}

/// `f◇: A -|-> B` for `f: A → B`, with `f◇(b,a) = B(b, fa)`.
pub fn graph_lower(f: &VFunctor) -> Module {
    let (src, dst) = (f.src().clone(), f.dst().clone());
    Module::from_fn(src, dst.clone(), |b, a| dst.hom(b, f.apply(a)).clone()).expect("graph shape")
}

/// `f^◇: B -|-> A` for `f: A → B`, with `f^◇(a,b) = B(fa, b)`.
pub fn graph_upper(f: &VFunctor) -> Module {
    let (src, dst) = (f.src().clone(), f.dst().clone());
    Module::from_fn(dst.clone(), src, |a, b| dst.hom(f.apply(a), b).clone()).expect("graph shape")
}

/// Outcome of checking `f◇ ⊣ f^◇`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    /// `A ≤ f^◇ · f◇` entrywise.
    pub unit_holds: bool,
    /// `f◇ · f^◇ ≤ B` entrywise.
    pub counit_holds: bool,
    pub unit_is_iso: bool,
    pub counit_is_iso: bool,
    /// First `(a, a')` where the unit is strict, if any.
    pub unit_strict_at: Option<(usize, usize)>,
}

pub fn check_graph_adjunction(f: &VFunctor) -> AdjunctionReport {
    let (lower, upper) = (graph_lower(f), graph_upper(f));
    let unit = upper.after(&lower).expect("graphs compose");
    let counit = lower.after(&upper).expect("graphs compose");
    let id_a = Module::identity(f.src().clone());
    let id_b = Module::identity(f.dst().clone());
    let n = f.src().len();
    let unit_strict_at =
        (0..n * n).map(|k| (k / n, k % n)).find(|&(a, a2)| id_a.get(a, a2) != unit.get(a, a2));
    AdjunctionReport {
        unit_holds: id_a.le(&unit),
        counit_holds: counit.le(&id_b),
        unit_is_iso: unit == id_a,
        counit_is_iso: counit == id_b,
        unit_strict_at,
    }
}

/// The collage of `R: A -|-> B`: `B`'s objects first, then `A`'s.
#[derive(Clone, Debug)]
pub struct Collage {
    pub coll: Arc<VCat>,
    /// `B → Coll R`.
    pub i0: VFunctor,
    /// `A → Coll R`.
    pub i1: VFunctor,
}

pub fn collage(r: &Module) -> Collage {
    let (a, b) = (r.src(), r.dst());
    let labels = b.coproduct(a).expect("same quantale").objects().to_vec();
    let nb = b.len();
    let bot = a.quantale().bottom();
    let coll = VCat::from_fn(a.quantale().clone(), labels, |x, y| match (x < nb, y < nb) {
        (true, true) => b.hom(x, y).clone(),
        (false, false) => a.hom(x - nb, y - nb).clone(),
        (true, false) => r.get(x, y - nb).clone(),
        (false, true) => bot.clone(),
    })
    .expect("collage labels are distinct");
    let coll = Arc::new(coll);
    let i0 = VFunctor::new(b.clone(), coll.clone(), (0..nb).collect()).expect("leg");
    let i1 = VFunctor::new(a.clone(), coll.clone(), (nb..nb + a.len()).collect()).expect("leg");
    Collage { coll, i0, i1 }
}

impl Collage {
    /// Reads the module back off the cospan.
    pub fn module(&self) -> Module {
        module_of_cospan(&self.i0, &self.i1).expect("legs share a target")
    }
}

/// `(i0)^◇ · (i1)◇: A -|-> B` for a cospan `B → K ← A`.
pub fn module_of_cospan(i0: &VFunctor, i1: &VFunctor) -> Result<Module> {
    if !(Arc::ptr_eq(i0.dst(), i1.dst()) || **i0.dst() == **i1.dst()) {
        return Err(Error::Precondition("cospan legs must share a target".into()));
    }
    graph_upper(i0).after(&graph_lower(i1))
}

/// The Yoneda embedding `A → [A^op, V]`, `a ↦ A(−, a)`.
pub fn yoneda(a: &Arc<VCat>, la: &TableCategory) -> Result<VFunctor> {
    let n = a.len();
    let map = (0..n)
        .map(|x| {
            let table: Vec<QValue> = (0..n).map(|y| a.hom(y, x).clone()).collect();
            la.index_of(&table).ok_or_else(|| Error::Internal("representable missing from presheaves".into()))
        })
        .collect::<Result<_>>()?;
    VFunctor::new(a.clone(), la.cat.clone(), map)
}

/// `ev_A: [A^op,V] -|-> A`, `ev(a, φ) = φ(a)`.
pub fn evaluation_module(a: &Arc<VCat>, la: &TableCategory) -> Module {
    Module::from_fn(la.cat.clone(), a.clone(), |x, phi| la.tables[phi][x].clone()).expect("evaluation shape")
}

/// `R†: [A^op,V] → [B^op,V]`, `R†(φ)(b) = ⋁_a φa ⊗ R(b,a)`.
pub fn module_dagger(r: &Module, la: &TableCategory, lb: &TableCategory) -> Result<VFunctor> {
    let q = r.src().quantale();
    let map = la
        .tables
        .iter()
        .map(|phi| {
            let image: Vec<QValue> = (0..r.dst().len())
                .map(|b| q.join(phi.iter().enumerate().map(|(a, v)| q.tensor(v, r.get(b, a)))))
                .collect();
            lb.index_of(&image).ok_or_else(|| Error::Internal("R† left the presheaf category".into()))
        })
        .collect::<Result<_>>()?;
    VFunctor::new(la.cat.clone(), lb.cat.clone(), map)
}

/// Convenience wrapper building both presheaf categories.
pub fn module_dagger_with(r: &Module, limits: Limits) -> Result<VFunctor> {
    let la = presheaf_category(r.src(), limits)?;
    let lb = presheaf_category(r.dst(), limits)?;
    module_dagger(r, &la, &lb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Quantale;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn lv(xs: &[&[u32]]) -> Vec<Vec<QValue>> {
        xs.iter().map(|r| r.iter().map(|&i| QValue::Level(i)).collect()).collect()
    }

    #[test]
    fn identity_module_is_valid_and_unital() {
        let q = Quantale::godel_chain(2);
        let a = Arc::new(VCat::from_order(&q, labels(&["x", "y", "z"]), &[(0, 1)]).unwrap());
        let id = Module::identity(a.clone());
        assert!(id.is_valid());
        assert_eq!(id.after(&id).unwrap(), id);
    }

    #[test]
    fn closure_saturates_down_and_up() {
        let q = Quantale::two();
        let a = Arc::new(VCat::from_order(&q, labels(&["a0", "a1"]), &[(0, 1)]).unwrap());
        let b = Arc::new(VCat::from_order(&q, labels(&["b0", "b1"]), &[(0, 1)]).unwrap());
        let r = Module::bimodule_closure(a, b, lv(&[&[0, 0], &[1, 0]])).unwrap();
        // B(b0,b1)⊗R(b1,a0) forces R(b0,a0); R(·,a0)⊗A(a0,a1) forces column a1.
        assert_eq!(r.matrix(), lv(&[&[1, 1], &[1, 1]]));
        assert!(r.is_valid());
    }

    #[test]
    fn closure_fixes_modules() {
        let q = Quantale::two();
        let a = Arc::new(VCat::from_order(&q, labels(&["a0", "a1"]), &[(0, 1)]).unwrap());
        let id = Module::identity(a.clone());
        assert_eq!(Module::bimodule_closure(a.clone(), a, id.matrix()).unwrap(), id);
    }

    #[test]
    fn graph_of_identity_is_identity() {
        let q = Quantale::two();
        let a = Arc::new(VCat::from_order(&q, labels(&["p", "q"]), &[(0, 1)]).unwrap());
        let id = VFunctor::identity(a.clone());
        assert_eq!(graph_lower(&id), Module::identity(a.clone()));
        assert_eq!(graph_upper(&id), Module::identity(a));
    }

    #[test]
    fn collapsing_functor_has_strict_unit() {
        let q = Quantale::two();
        let a = Arc::new(VCat::discrete_on(&q, labels(&["a", "b"])).unwrap());
        let one = Arc::new(VCat::unit(&q));
        let f = VFunctor::constant(a, one, 0).unwrap();
        let rep = check_graph_adjunction(&f);
        assert!(rep.unit_holds && rep.counit_holds);
        assert!(!rep.unit_is_iso);
        assert_eq!(rep.unit_strict_at, Some((0, 1)));
    }

    #[test]
    fn collage_of_identity() {
        let q = Quantale::godel_chain(2);
        let a = Arc::new(VCat::from_order(&q, labels(&["x", "y"]), &[(0, 1)]).unwrap());
        let c = collage(&Module::identity(a.clone()));
        assert_eq!(c.coll.len(), 4);
        assert!(c.coll.is_valid());
        assert_eq!(c.coll.hom(0, 2), &QValue::Level(2));
        assert_eq!(c.coll.hom(2, 0), &QValue::Level(0));
        assert!(c.i0.is_fully_faithful() && c.i1.is_fully_faithful());
        assert_eq!(c.module(), Module::identity(a));
    }

    #[test]
    fn yoneda_is_fully_faithful() {
        let q = Quantale::godel_chain(2);
        let a = Arc::new(VCat::from_order(&q, labels(&["x", "y"]), &[(0, 1)]).unwrap());
        let la = presheaf_category(&a, Limits::default()).unwrap();
        let y = yoneda(&a, &la).unwrap();
        assert!(y.is_valid() && y.is_fully_faithful());
        let ev = evaluation_module(&a, &la);
        assert!(ev.is_valid());
    }

    #[test]
    fn dagger_of_identity_is_identity() {
        let q = Quantale::two();
        let a = Arc::new(VCat::from_order(&q, labels(&["x", "y"]), &[(0, 1)]).unwrap());
        let la = presheaf_category(&a, Limits::default()).unwrap();
        let d = module_dagger(&Module::identity(a), &la, &la).unwrap();
        assert_eq!(d, VFunctor::identity(la.cat.clone()));
    }

    #[test]
    fn middle_mismatch() {
        let q = Quantale::two();
        let a = Arc::new(VCat::unit(&q));
        let b = Arc::new(VCat::discrete_on(&q, labels(&["p", "q"])).unwrap());
        let r = Module::identity(a);
        let s = Module::identity(b);
        assert!(s.after(&r).is_err());
    }
}
