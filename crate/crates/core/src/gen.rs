//! Seeded random generators and small exhaustive enumerators, used by the
//! test batteries and the CLI's sampled checks.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::quantale::{QValue, Quantale, QuantaleKind};
use crate::squares::LaxSquare;
use crate::vcat::{VCat, VFunctor};
use crate::vmod::Module;

/// The generator used throughout; identical seeds give identical samples.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random element of the carrier. Infinite carriers are sampled from a
/// small grid: dyadics with denominator up to 8 on the unit interval, and
/// integers up to 6 (plus `∞`) for the Lawvere quantale.
pub fn value<R: Rng>(q: &Quantale, rng: &mut R) -> QValue {
    match q.kind() {
        QuantaleKind::Two => QValue::Level(rng.gen_range(0..=1)),
        QuantaleKind::LukasiewiczChain(n) | QuantaleKind::GodelChain(n) => QValue::Level(rng.gen_range(0..=n)),
        QuantaleKind::LawverePlus => {
            if rng.gen_ratio(1, 8) {
                QValue::Infinity
            } else {
                QValue::integer(rng.gen_range(0..=6))
            }
        }
        _ => {
            let k: i64 = rng.gen_range(0..=8);
            QValue::Real(BigRational::new(BigInt::from(k), BigInt::from(8)))
        }
    }
}

/// A value biased towards the ends of the carrier, which keeps closures
/// from collapsing everything to the top.
fn biased_value<R: Rng>(q: &Quantale, rng: &mut R) -> QValue {
    match rng.gen_range(0..4) {
        0 => q.bottom(),
        1 => q.top(),
        _ => value(q, rng),
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// The least V-category above a raw matrix (diagonal forced to `⊤`).
pub fn close_category(q: &Quantale, labels: Vec<String>, mut hom: Vec<Vec<QValue>>) -> Result<VCat> {
    let n = hom.len();
    for (i, row) in hom.iter_mut().enumerate() {
        row[i] = q.top();
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = q.tensor(&hom[i][k], &hom[k][j]);
                hom[i][j] = q.join2(&hom[i][j], &via);
            }
        }
    }
    VCat::new(q.clone(), labels, hom)
}

/// A random V-category on `n` objects labelled `{prefix}0, {prefix}1, …`.
pub fn category<R: Rng>(q: &Quantale, prefix: &str, n: usize, rng: &mut R) -> VCat {
    let raw = (0..n).map(|_| (0..n).map(|_| biased_value(q, rng)).collect()).collect();
    close_category(q, labels(prefix, n), raw).expect("closure is a category")
}

/// A random V-functor; falls back to a constant functor when random maps
/// keep failing.
pub fn functor<R: Rng>(a: &Arc<VCat>, b: &Arc<VCat>, rng: &mut R) -> VFunctor {
    assert!(!b.is_empty() || a.is_empty(), "no functor into an empty category");
    for _ in 0..64 {
        let map = (0..a.len()).map(|_| rng.gen_range(0..b.len())).collect();
        let f = VFunctor::new(a.clone(), b.clone(), map).expect("shape");
        if f.is_valid() {
            return f;
        }
    }
    let c = rng.gen_range(0..b.len());
    VFunctor::new(a.clone(), b.clone(), vec![c; a.len()]).expect("shape")
}

/// A random module `A -|-> B`, the bimodule closure of a random matrix.
pub fn module<R: Rng>(a: &Arc<VCat>, b: &Arc<VCat>, rng: &mut R) -> Module {
    let q = a.quantale().clone();
    let raw = (0..b.len()).map(|_| (0..a.len()).map(|_| biased_value(&q, rng)).collect()).collect();
    Module::bimodule_closure(a.clone(), b.clone(), raw).expect("shapes agree")
}

/// A random lax square with corner categories of at most `max_objects`
/// objects. The apex consists of pairs `(a, b)` with `I ≤ C(fa, gb)`, with
/// homs below `A(a,a') ∧ B(b,b')` so both projections are functors.
pub fn lax_square<R: Rng>(q: &Quantale, max_objects: usize, rng: &mut R) -> LaxSquare {
    let size = |rng: &mut R| rng.gen_range(1..=max_objects);
    let a = Arc::new(category(q, "a", size(rng), rng));
    let b = Arc::new(category(q, "b", size(rng), rng));
    let c = Arc::new(category(q, "c", size(rng), rng));
    let f = functor(&a, &c, rng);
    let g = functor(&b, &c, rng);
    let unit = q.unit();
    let mut pairs: Vec<(usize, usize)> = (0..a.len())
        .flat_map(|x| (0..b.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| q.le(&unit, c.hom(f.apply(x), g.apply(y))))
        .collect();
    pairs.shuffle(rng);
    let keep = if pairs.is_empty() { 0 } else { rng.gen_range(0..=pairs.len().min(max_objects)) };
    pairs.truncate(keep);
    let bound = |i: usize, j: usize| {
        let ((x, y), (x2, y2)) = (pairs[i], pairs[j]);
        q.meet2(a.hom(x, x2), b.hom(y, y2))
    };
    let raw = (0..keep)
        .map(|i| {
            (0..keep)
                .map(|j| {
                    let bd = bound(i, j);
                    let v = biased_value(q, rng);
                    q.meet2(&bd, &v)
                })
                .collect()
        })
        .collect();
    let p = Arc::new(close_category(q, labels("w", keep), raw).expect("closure is a category"));
    let p0 = VFunctor::new(p.clone(), a, pairs.iter().map(|pr| pr.0).collect()).expect("shape");
    let p1 = VFunctor::new(p, b, pairs.iter().map(|pr| pr.1).collect()).expect("shape");
    LaxSquare::new(p0, p1, f, g).expect("apex pairs make the square lax")
}

/// Every V-category on `n` objects over a finite quantale, in lexicographic
/// order of off-diagonal entries.
pub fn all_categories(q: &Quantale, prefix: &str, n: usize) -> Vec<VCat> {
    let carrier = q.carrier().expect("finite quantale");
    let off: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut digits = vec![0usize; off.len()];
    let mut out = Vec::new();
    loop {
        let hom = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match off.iter().position(|&p| p == (i, j)) {
                        Some(k) => carrier[digits[k]].clone(),
                        None => q.top(),
                    })
                    .collect()
            })
            .collect();
        let cat = VCat::new(q.clone(), labels(prefix, n), hom).expect("shape");
        if cat.is_valid() {
            out.push(cat);
        }
        let mut k = off.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < carrier.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Every V-functor `A → B`, in lexicographic order of object maps.
pub fn all_functors(a: &Arc<VCat>, b: &Arc<VCat>) -> Vec<VFunctor> {
    let (n, m) = (a.len(), b.len());
    let mut out = Vec::new();
    if m == 0 && n > 0 {
        return out;
    }
    let mut map = vec![0usize; n];
    loop {
        let f = VFunctor::new(a.clone(), b.clone(), map.clone()).expect("shape");
        if f.is_valid() {
            out.push(f);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
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
