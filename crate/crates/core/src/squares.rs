//! Lax squares, exactness, cocommas, pushouts along fully faithful functors,
//! the (surjective, fully faithful) factorisation and collage composition.
//!
//! A lax square is drawn as
//!
//! ```text
//!      p1
//!   P ----> B
//!   |       |
//! p0|   ↗   | g
//!   v       v
//!   A ----> C
//!       f
//! ```
//!
//! with `f·p0 ≤ g·p1`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantale::QValue;
use crate::vcat::{VCat, VFunctor};
use crate::vmod::{collage, Collage, Module};

#[derive(Clone, Debug)]
pub struct LaxSquare {
    pub p0: VFunctor,
    pub p1: VFunctor,
    pub f: VFunctor,
    pub g: VFunctor,
}

/// Where exactness fails: both sides of the exactness equation at `(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessWitness {
    pub a: usize,
    pub b: usize,
    /// `C(fa, gb)`.
    pub lhs: QValue,
    /// `⋁_w A(a, p0 w) ⊗ B(p1 w, b)`.
    pub rhs: QValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub exact: bool,
    /// First `(a, b)` where the two sides differ.
    pub witness: Option<ExactnessWitness>,
    /// First `(a, b)` where the supremum exceeds `C(fa, gb)`; always `None`
    /// for a genuine lax square.
    pub near_exactness_failure: Option<ExactnessWitness>,
}

fn same(x: &Arc<VCat>, y: &Arc<VCat>) -> bool {
    Arc::ptr_eq(x, y) || **x == **y
}

impl LaxSquare {
    /// Checks that the four functors fit together and that the square is lax.
    pub fn new(p0: VFunctor, p1: VFunctor, f: VFunctor, g: VFunctor) -> Result<LaxSquare> {
        let fits = same(p0.src(), p1.src())
            && same(p0.dst(), f.src())
            && same(p1.dst(), g.src())
            && same(f.dst(), g.dst());
        if !fits {
            return Err(Error::Precondition("square sides do not compose".into()));
        }
        let sq = LaxSquare { p0, p1, f, g };
        if let Some(w) = sq.laxity_failure() {
            return Err(Error::Precondition(format!(
                "square is not lax at `{}`",
                sq.p0.src().label(w)
            )));
        }
        Ok(sq)
    }

    /// First `w` with `I ≰ C(f p0 w, g p1 w)`.
    pub fn laxity_failure(&self) -> Option<usize> {
        let c = self.f.dst();
        let q = c.quantale();
        let unit = q.unit();
        (0..self.p0.src().len())
            .find(|&w| !q.le(&unit, c.hom(self.f.apply(self.p0.apply(w)), self.g.apply(self.p1.apply(w)))))
    }

    /// Both sides of the exactness equation at `(a, b)`.
    pub fn sides(&self, a: usize, b: usize) -> (QValue, QValue) {
        let (ca, cb) = (self.f.dst(), self.p0.dst());
        let bb = self.p1.dst();
        let q = ca.quantale();
        let lhs = ca.hom(self.f.apply(a), self.g.apply(b)).clone();
        let rhs = q.join(
            (0..self.p0.src().len()).map(|w| q.tensor(cb.hom(a, self.p0.apply(w)), bb.hom(self.p1.apply(w), b))),
        );
        (lhs, rhs)
    }

    pub fn exactness(&self) -> ExactnessReport {
        let q = self.f.dst().quantale();
        let mut witness = None;
        let mut near = None;
        for a in 0..self.f.src().len() {
            for b in 0..self.g.src().len() {
                let (lhs, rhs) = self.sides(a, b);
                if lhs != rhs && witness.is_none() {
                    witness = Some(ExactnessWitness { a, b, lhs: lhs.clone(), rhs: rhs.clone() });
                }
                if !q.le(&rhs, &lhs) && near.is_none() {
                    near = Some(ExactnessWitness { a, b, lhs, rhs });
                }
            }
        }
        ExactnessReport { exact: witness.is_none(), witness, near_exactness_failure: near }
    }

    pub fn is_exact(&self) -> bool {
        self.exactness().exact
    }

    /// The square between opposite categories with the legs swapped
    /// (`p0 ↔ p1`, `f ↔ g`); it is lax and is exact iff `self` is.
    pub fn dual(&self) -> Result<LaxSquare> {
        let p = Arc::new(self.p0.src().opposite());
        let a = Arc::new(self.p0.dst().opposite());
        let b = Arc::new(self.p1.dst().opposite());
        let c = Arc::new(self.f.dst().opposite());
        let p0 = VFunctor::new(p.clone(), a.clone(), self.p0.map().to_vec())?;
        let p1 = VFunctor::new(p, b.clone(), self.p1.map().to_vec())?;
        let f = VFunctor::new(a, c.clone(), self.f.map().to_vec())?;
        let g = VFunctor::new(b, c, self.g.map().to_vec())?;
        LaxSquare::new(p1, p0, g, f)
    }

    /// `P = A`, `p0 = 1`, `p1 = f`, `f`, `g = 1`.
    pub fn yoneda_left(f: &VFunctor) -> LaxSquare {
        let p0 = VFunctor::identity(f.src().clone());
        let g = VFunctor::identity(f.dst().clone());
        LaxSquare { p0, p1: f.clone(), f: f.clone(), g }
    }

    /// `P = A`, `p0 = f`, `p1 = 1`, `f = 1`, `g = f`.
    pub fn yoneda_right(f: &VFunctor) -> LaxSquare {
        let p1 = VFunctor::identity(f.src().clone());
        let bottom = VFunctor::identity(f.dst().clone());
        LaxSquare { p0: f.clone(), p1, f: bottom, g: f.clone() }
    }

    /// `(1, 1, f, f)`: exact iff `f` is fully faithful.
    pub fn ff_square(f: &VFunctor) -> LaxSquare {
        let id = VFunctor::identity(f.src().clone());
        LaxSquare { p0: id.clone(), p1: id, f: f.clone(), g: f.clone() }
    }
}

/// `f ▷ g` with its two legs.
#[derive(Clone, Debug)]
pub struct Cocomma {
    pub cat: Arc<VCat>,
    /// `A → f▷g`.
    pub i0: VFunctor,
    /// `B → f▷g`.
    pub i1: VFunctor,
}

impl Cocomma {
    /// The cocomma square `(f, g, i0, i1)`.
    pub fn square(&self, f: &VFunctor, g: &VFunctor) -> Result<LaxSquare> {
        LaxSquare::new(f.clone(), g.clone(), self.i0.clone(), self.i1.clone())
    }
}

/// The cocomma object of `f: C → A` and `g: C → B`.
///
/// Objects are `A ⊔ B` (`A` first); the blocks are `A`, `B`,
/// `(i0 a → i1 b) = ⋁_c A(a, fc) ⊗ B(gc, b)` and `⊥` from `B` to `A`.
pub fn cocomma(f: &VFunctor, g: &VFunctor) -> Result<Cocomma> {
    if !same(f.src(), g.src()) {
        return Err(Error::Precondition("cocomma needs a common source".into()));
    }
    let (a, b, c) = (f.dst(), g.dst(), f.src());
    a.same_quantale(b)?;
    let q = a.quantale().clone();
    let labels = a.coproduct(b)?.objects().to_vec();
    let na = a.len();
    let bot = q.bottom();
    let cat = VCat::from_fn(q.clone(), labels, |x, y| match (x < na, y < na) {
        (true, true) => a.hom(x, y).clone(),
        (false, false) => b.hom(x - na, y - na).clone(),
        (true, false) => q.join((0..c.len()).map(|w| q.tensor(a.hom(x, f.apply(w)), b.hom(g.apply(w), y - na)))),
        (false, true) => bot.clone(),
    })?;
    let cat = Arc::new(cat);
    let i0 = VFunctor::new(a.clone(), cat.clone(), (0..na).collect())?;
    let i1 = VFunctor::new(b.clone(), cat.clone(), (na..na + b.len()).collect())?;
    Ok(Cocomma { cat, i0, i1 })
}

/// The pushout of `f: A → C` along a fully faithful `j: A → B`.
#[derive(Clone, Debug)]
pub struct Pushout {
    pub cat: Arc<VCat>,
    /// `C → P`, fully faithful.
    pub i0: VFunctor,
    /// `B → P`.
    pub i1: VFunctor,
}

/// Objects are `C` followed by the objects of `B` outside the image of `j`.
///
/// Homs: `P(c,c') = C(c,c')`, `P(c,b) = ⋁_a C(c,fa) ⊗ B(ja,b)`,
/// `P(b,c) = ⋁_a B(b,ja) ⊗ C(fa,c)` and
/// `P(b,b') = B(b,b') ∨ ⋁_{a,a'} B(b,ja) ⊗ C(fa,fa') ⊗ B(ja',b')`.
/// An object `ja` of `B` is sent to `f a` for the least such `a`.
pub fn pushout_along_ff(j: &VFunctor, f: &VFunctor) -> Result<Pushout> {
    if !same(j.src(), f.src()) {
        return Err(Error::Precondition("pushout needs a common source".into()));
    }
    if !j.is_fully_faithful() {
        return Err(Error::Precondition("pushout_along_ff needs a fully faithful j".into()));
    }
    let (a, b, c) = (j.src(), j.dst(), f.dst());
    b.same_quantale(c)?;
    let q = c.quantale().clone();
    let mut preimage = vec![None; b.len()];
    for x in 0..a.len() {
        preimage[j.apply(x)].get_or_insert(x);
    }
    let rest: Vec<usize> = (0..b.len()).filter(|&y| preimage[y].is_none()).collect();
    let rest_cat = b.full_subcategory(&rest)?;
    let labels = c.coproduct(&rest_cat)?.objects().to_vec();
    let nc = c.len();
    let na = a.len();
    let via = |x: usize, y: usize| -> QValue {
        // ⋁_{a,a'} B(x, ja) ⊗ C(fa, fa') ⊗ B(ja', y)
        q.join((0..na).flat_map(|s| {
            let q = &q;
            (0..na).map(move |t| {
                q.tensor(&q.tensor(b.hom(x, j.apply(s)), c.hom(f.apply(s), f.apply(t))), b.hom(j.apply(t), y))
            })
        }))
    };
    let cat = VCat::from_fn(q.clone(), labels, |x, y| match (x < nc, y < nc) {
        (true, true) => c.hom(x, y).clone(),
        (true, false) => q.join((0..na).map(|s| q.tensor(c.hom(x, f.apply(s)), b.hom(j.apply(s), rest[y - nc])))),
        (false, true) => q.join((0..na).map(|s| q.tensor(b.hom(rest[x - nc], j.apply(s)), c.hom(f.apply(s), y)))),
        (false, false) => q.join2(b.hom(rest[x - nc], rest[y - nc]), &via(rest[x - nc], rest[y - nc])),
    })?;
    let cat = Arc::new(cat);
    let i0 = VFunctor::new(c.clone(), cat.clone(), (0..nc).collect())?;
    let mut i1_map = Vec::with_capacity(b.len());
    let mut k = 0;
    for pre in &preimage {
        match pre {
            Some(s) => i1_map.push(f.apply(*s)),
            None => {
                i1_map.push(nc + k);
                k += 1;
            }
        }
    }
    let i1 = VFunctor::new(b.clone(), cat.clone(), i1_map)?;
    Ok(Pushout { cat, i0, i1 })
}

/// `f = j · e` with `e` surjective on objects and `j` fully faithful.
///
/// The middle category has `A`'s objects and homs `B(fa, fa')`.
pub fn factorize(f: &VFunctor) -> Result<(VFunctor, VFunctor)> {
    let (a, b) = (f.src(), f.dst());
    let mid = VCat::from_fn(a.quantale().clone(), a.objects().to_vec(), |x, y| {
        b.hom(f.apply(x), f.apply(y)).clone()
    })?;
    let mid = Arc::new(mid);
    let e = VFunctor::new(a.clone(), mid.clone(), (0..a.len()).collect())?;
    let j = VFunctor::new(mid, b.clone(), f.map().to_vec())?;
    Ok((e, j))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Pushout,
    Cocomma,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Route> {
        match s {
            "pushout" => Ok(Route::Pushout),
            "cocomma" => Ok(Route::Cocomma),
            other => Err(Error::Precondition(format!("unknown route `{other}` (pushout|cocomma)"))),
        }
    }
}

/// Composes collages of `S: B -|-> C` and `R: A -|-> B` into a collage of
/// `S · R`, without ever multiplying matrices.
pub fn compose_collages(s: &Collage, r: &Collage, route: Route) -> Result<Collage> {
    // s.i0: C → Coll S, s.i1: B → Coll S; r.i0: B → Coll R, r.i1: A → Coll R.
    if !same(s.i1.src(), r.i0.src()) {
        return Err(Error::Precondition("collages do not share a middle category".into()));
    }
    let (c, a) = (s.i0.src().clone(), r.i1.src().clone());
    let (target, into_s, into_r) = match route {
        Route::Pushout => {
            let p = pushout_along_ff(&r.i0, &s.i1)?;
            (p.cat, p.i0, p.i1)
        }
        Route::Cocomma => {
            let k = cocomma(&s.i1, &r.i0)?;
            (k.cat, k.i0, k.i1)
        }
    };
    let left = s.i0.then(&into_s)?;
    let right = r.i1.then(&into_r)?;
    let sum = Arc::new(c.coproduct(&a)?);
    let copair: Vec<usize> = left.map().iter().chain(right.map()).copied().collect();
    let copair = VFunctor::new(sum, target, copair)?;
    let (_, j) = factorize(&copair)?;
    let coll = j.src().clone();
    let i0 = VFunctor::new(c.clone(), coll.clone(), (0..c.len()).collect())?;
    let i1 = VFunctor::new(a.clone(), coll.clone(), (c.len()..c.len() + a.len()).collect())?;
    Ok(Collage { coll, i0, i1 })
}

/// The embedding of the composite collage into the middle object, for
/// inspection: `j` in `[p0 i0, p1 i1] = j · e`.
pub fn composition_embedding(s: &Collage, r: &Collage, route: Route) -> Result<VFunctor> {
    let (target, into_s, into_r) = match route {
        Route::Pushout => {
            let p = pushout_along_ff(&r.i0, &s.i1)?;
            (p.cat, p.i0, p.i1)
        }
        Route::Cocomma => {
            let k = cocomma(&s.i1, &r.i0)?;
            (k.cat, k.i0, k.i1)
        }
    };
    let sum = Arc::new(s.i0.src().coproduct(r.i1.src())?);
    let map = s.i0.then(&into_s)?.map().iter().chain(r.i1.then(&into_r)?.map()).copied().collect();
    Ok(factorize(&VFunctor::new(sum, target, map)?)?.1)
}

/// `collage(S · R)` computed by composing matrices, for comparison.
pub fn collage_of_composite(s: &Module, r: &Module) -> Result<Collage> {
    Ok(collage(&s.after(r)?))
}
