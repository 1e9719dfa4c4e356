//! Commutative quantales with exact arithmetic.
//!
//! Every supported quantale is a complete chain, so joins and meets of finite
//! families reduce to pairwise max/min in the quantale order. The finite kinds
//! store a level index; the interval kinds store exact rationals, and the
//! Lawvere quantale adds a distinct infinity token.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The supported quantale kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantaleKind {
    /// `{0 ≤ 1}` with meet as tensor and implication as hom.
    Two,
    /// `x0 < … < xn` with `xi ⊗ xj = x_max(i+j-n, 0)`.
    LukasiewiczChain(u32),
    /// `x0 < … < xn` with `xi ⊗ xj = x_min(i, j)`.
    GodelChain(u32),
    /// `[0,1]`, usual order, `max(x+y-1, 0)`.
    UnitLukasiewicz,
    /// `[0,1]`, usual order, `min`.
    UnitGodel,
    /// `[0,1]`, usual order, multiplication.
    UnitProduct,
    /// `[0,∞]`, reversed order, addition.
    LawverePlus,
    /// `[0,1]`, reversed order, `max` in the real order.
    UnitUltrametric,
}

impl QuantaleKind {
    pub fn name(&self) -> &'static str {
        match self {
            QuantaleKind::Two => "two",
            QuantaleKind::LukasiewiczChain(_) => "lukasiewicz_chain",
            QuantaleKind::GodelChain(_) => "godel_chain",
            QuantaleKind::UnitLukasiewicz => "unit_lukasiewicz",
            QuantaleKind::UnitGodel => "unit_godel",
            QuantaleKind::UnitProduct => "unit_product",
            QuantaleKind::LawverePlus => "lawvere_plus",
            QuantaleKind::UnitUltrametric => "unit_ultrametric",
        }
    }

    /// Chain length for the finite kinds.
    pub fn levels(&self) -> Option<u32> {
        match self {
            QuantaleKind::Two => Some(1),
            QuantaleKind::LukasiewiczChain(n) | QuantaleKind::GodelChain(n) => Some(*n),
            _ => None,
        }
    }
}

/// An element of a quantale carrier.
///
/// Which variant is legal depends on the quantale: finite kinds use
/// [`QValue::Level`], interval kinds use [`QValue::Real`], and only
/// `lawvere_plus` admits [`QValue::Infinity`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QValue {
    Level(u32),
    Real(BigRational),
    Infinity,
}

impl QValue {
    pub fn ratio(numer: i64, denom: i64) -> QValue {
        QValue::Real(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(n: i64) -> QValue {
        QValue::Real(BigRational::from_integer(BigInt::from(n)))
    }
}

/// A commutative quantale, identified by its kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quantale {
    kind: QuantaleKind,
}

impl fmt::Display for Quantale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            QuantaleKind::LukasiewiczChain(n) | QuantaleKind::GodelChain(n) => {
                write!(f, "{}({})", self.kind.name(), n)
            }
            _ => f.write_str(self.kind.name()),
        }
    }
}

fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

impl Quantale {
    /// Builds a quantale; chain kinds need at least one step.
    pub fn new(kind: QuantaleKind) -> Result<Quantale> {
        match kind {
            QuantaleKind::LukasiewiczChain(0) | QuantaleKind::GodelChain(0) => Err(Error::Precondition(
                format!("{} needs n ≥ 1", kind.name()),
            )),
            _ => Ok(Quantale { kind }),
        }
    }

    /// Builds a quantale from its descriptor name and optional chain length.
    pub fn from_descriptor(name: &str, n: Option<u32>) -> Result<Quantale> {
        let need_n = |n: Option<u32>| {
            n.ok_or_else(|| Error::Precondition(format!("{name} needs a chain length n")))
        };
        let kind = match name {
            "two" => QuantaleKind::Two,
            "lukasiewicz_chain" => QuantaleKind::LukasiewiczChain(need_n(n)?),
            "godel_chain" => QuantaleKind::GodelChain(need_n(n)?),
            "unit_lukasiewicz" => QuantaleKind::UnitLukasiewicz,
            "unit_godel" => QuantaleKind::UnitGodel,
            "unit_product" => QuantaleKind::UnitProduct,
            "lawvere_plus" => QuantaleKind::LawverePlus,
            "unit_ultrametric" => QuantaleKind::UnitUltrametric,
            "probabilistic" | "probabilistic_metric" => {
                return Err(Error::OutOfScope(name.to_string()))
            }
            other => return Err(Error::UnsupportedKind(other.to_string())),
        };
        Quantale::new(kind)
    }

    pub fn two() -> Quantale {
        Quantale { kind: QuantaleKind::Two }
    }

    /// Panics if `n == 0`; use [`Quantale::new`] for fallible construction.
    pub fn lukasiewicz_chain(n: u32) -> Quantale {
        Quantale::new(QuantaleKind::LukasiewiczChain(n)).expect("chain length must be positive")
    }

    /// Panics if `n == 0`; use [`Quantale::new`] for fallible construction.
    pub fn godel_chain(n: u32) -> Quantale {
        Quantale::new(QuantaleKind::GodelChain(n)).expect("chain length must be positive")
    }

    pub fn unit_lukasiewicz() -> Quantale {
        Quantale { kind: QuantaleKind::UnitLukasiewicz }
    }

    pub fn unit_godel() -> Quantale {
        Quantale { kind: QuantaleKind::UnitGodel }
    }

    pub fn unit_product() -> Quantale {
        Quantale { kind: QuantaleKind::UnitProduct }
    }

    pub fn lawvere_plus() -> Quantale {
        Quantale { kind: QuantaleKind::LawverePlus }
    }

    pub fn unit_ultrametric() -> Quantale {
        Quantale { kind: QuantaleKind::UnitUltrametric }
    }

    pub fn kind(&self) -> QuantaleKind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        self.kind.levels().is_some()
    }

    /// True when the carrier order is the reverse of the real order.
    pub fn is_reversed(&self) -> bool {
        matches!(self.kind, QuantaleKind::LawverePlus | QuantaleKind::UnitUltrametric)
    }

    /// True when `x ⊗ x = x` for all `x`, i.e. tensor is meet.
    pub fn is_idempotent(&self) -> bool {
        matches!(
            self.kind,
            QuantaleKind::Two
                | QuantaleKind::GodelChain(_)
                | QuantaleKind::UnitGodel
                | QuantaleKind::UnitUltrametric
        )
    }

    /// The carrier in ascending order, for finite kinds.
    pub fn carrier(&self) -> Option<Vec<QValue>> {
        self.kind.levels().map(|n| (0..=n).map(QValue::Level).collect())
    }

    pub fn carrier_size(&self) -> Option<usize> {
        self.kind.levels().map(|n| n as usize + 1)
    }

    pub fn contains(&self, x: &QValue) -> bool {
        match (self.kind.levels(), x) {
            (Some(n), QValue::Level(i)) => *i <= n,
            (Some(_), _) => false,
            (None, QValue::Level(_)) => false,
            (None, QValue::Infinity) => self.kind == QuantaleKind::LawverePlus,
            (None, QValue::Real(r)) => {
                !r.is_negative() && (self.kind == QuantaleKind::LawverePlus || *r <= BigRational::one())
            }
        }
    }

    pub fn check(&self, x: &QValue) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::NotInCarrier { value: format!("{x:?}"), quantale: self.to_string() })
        }
    }

    pub fn bottom(&self) -> QValue {
        match self.kind {
            QuantaleKind::LawverePlus => QValue::Infinity,
            QuantaleKind::UnitUltrametric => QValue::integer(1),
            k if k.levels().is_some() => QValue::Level(0),
            _ => QValue::integer(0),
        }
    }

    pub fn top(&self) -> QValue {
        match self.kind.levels() {
            Some(n) => QValue::Level(n),
            None if self.is_reversed() => QValue::integer(0),
            None => QValue::integer(1),
        }
    }

    /// The tensor unit `I`. Every supported kind is integral, so `I = ⊤`.
    pub fn unit(&self) -> QValue {
        self.top()
    }

    /// Comparison in the real order; `Infinity` is above every real.
    fn real_cmp(x: &QValue, y: &QValue) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (x, y) {
            (QValue::Infinity, QValue::Infinity) => Equal,
            (QValue::Infinity, _) => Greater,
            (_, QValue::Infinity) => Less,
            (QValue::Real(a), QValue::Real(b)) => a.cmp(b),
            (QValue::Level(a), QValue::Level(b)) => a.cmp(b),
            _ => panic!("mixed value representations: {x:?} vs {y:?}"),
        }
    }

    /// The quantale order `x ≤ y`.
    pub fn le(&self, x: &QValue, y: &QValue) -> bool {
        if let (QValue::Level(a), QValue::Level(b)) = (x, y) {
            return a <= b;
        }
        let ord = Self::real_cmp(x, y);
        if self.is_reversed() {
            ord.is_ge()
        } else {
            ord.is_le()
        }
    }

    pub fn join2(&self, x: &QValue, y: &QValue) -> QValue {
        if self.le(x, y) {
            y.clone()
        } else {
            x.clone()
        }
    }

    pub fn meet2(&self, x: &QValue, y: &QValue) -> QValue {
        if self.le(x, y) {
            x.clone()
        } else {
            y.clone()
        }
    }

    /// Least upper bound of a finite family; the empty join is `⊥`.
    pub fn join<I: IntoIterator<Item = QValue>>(&self, xs: I) -> QValue {
        xs.into_iter().fold(self.bottom(), |acc, x| self.join2(&acc, &x))
    }

    /// Greatest lower bound of a finite family; the empty meet is `⊤`.
    pub fn meet<I: IntoIterator<Item = QValue>>(&self, xs: I) -> QValue {
        xs.into_iter().fold(self.top(), |acc, x| self.meet2(&acc, &x))
    }

    pub fn tensor(&self, x: &QValue, y: &QValue) -> QValue {
        use QuantaleKind::*;
        match (self.kind, x, y) {
            (Two | GodelChain(_), QValue::Level(a), QValue::Level(b)) => QValue::Level(*a.min(b)),
            (LukasiewiczChain(n), QValue::Level(a), QValue::Level(b)) => {
                QValue::Level((a + b).saturating_sub(n))
            }
            (UnitLukasiewicz, QValue::Real(a), QValue::Real(b)) => {
                let s = a + b - BigRational::one();
                QValue::Real(if s.is_negative() { BigRational::zero() } else { s })
            }
            (UnitGodel, QValue::Real(a), QValue::Real(b)) => QValue::Real(a.min(b).clone()),
            (UnitProduct, QValue::Real(a), QValue::Real(b)) => QValue::Real(a * b),
            (LawverePlus, QValue::Infinity, _) | (LawverePlus, _, QValue::Infinity) => QValue::Infinity,
            (LawverePlus, QValue::Real(a), QValue::Real(b)) => QValue::Real(a + b),
            (UnitUltrametric, QValue::Real(a), QValue::Real(b)) => QValue::Real(a.max(b).clone()),
            _ => panic!("values {x:?}, {y:?} are not in the carrier of {self}"),
        }
    }

    /// Internal hom `[x, y]`: the largest `z` with `x ⊗ z ≤ y`.
    pub fn hom(&self, x: &QValue, y: &QValue) -> QValue {
        use QuantaleKind::*;
        match (self.kind, x, y) {
            (Two, QValue::Level(a), QValue::Level(b)) => QValue::Level(u32::from(a <= b)),
            (GodelChain(n), QValue::Level(a), QValue::Level(b)) => {
                QValue::Level(if a <= b { n } else { *b })
            }
            (LukasiewiczChain(n), QValue::Level(a), QValue::Level(b)) => {
                QValue::Level(if a <= b { n } else { n - a + b })
            }
            (UnitLukasiewicz, QValue::Real(a), QValue::Real(b)) => QValue::Real(if a <= b {
                BigRational::one()
            } else {
                BigRational::one() - a + b
            }),
            (UnitGodel, QValue::Real(a), QValue::Real(b)) => {
                QValue::Real(if a <= b { BigRational::one() } else { b.clone() })
            }
            (UnitProduct, QValue::Real(a), QValue::Real(b)) => {
                QValue::Real(if a <= b { BigRational::one() } else { b / a })
            }
            // truncated subtraction y ∸ x
            (LawverePlus, _, _) => {
                if Self::real_cmp(x, y).is_ge() {
                    QValue::integer(0)
                } else {
                    match (x, y) {
                        (QValue::Real(_), QValue::Infinity) => QValue::Infinity,
                        (QValue::Real(a), QValue::Real(b)) => QValue::Real(b - a),
                        _ => unreachable!("x < y forces x finite"),
                    }
                }
            }
            (UnitUltrametric, QValue::Real(a), QValue::Real(b)) => {
                QValue::Real(if a >= b { BigRational::zero() } else { b.clone() })
            }
            _ => panic!("values {x:?}, {y:?} are not in the carrier of {self}"),
        }
    }

    pub fn try_tensor(&self, x: &QValue, y: &QValue) -> Result<QValue> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.tensor(x, y))
    }

    pub fn try_hom(&self, x: &QValue, y: &QValue) -> Result<QValue> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.hom(x, y))
    }

    pub fn try_join(&self, xs: &[QValue]) -> Result<QValue> {
        xs.iter().try_for_each(|x| self.check(x))?;
        Ok(self.join(xs.iter().cloned()))
    }

    pub fn try_meet(&self, xs: &[QValue]) -> Result<QValue> {
        xs.iter().try_for_each(|x| self.check(x))?;
        Ok(self.meet(xs.iter().cloned()))
    }

    /// Parses the exact textual form: `p/q`, an integer, or `inf`.
    ///
    /// Chain levels are written as the rational `i/n`, so `x2` in a chain of
    /// length 4 is `1/2`.
    pub fn parse_value(&self, text: &str) -> Result<QValue> {
        let s = text.trim();
        let bad = |why: &str| Error::BadValue(text.to_string(), why.to_string());
        if s == "inf" {
            return if self.kind == QuantaleKind::LawverePlus {
                Ok(QValue::Infinity)
            } else {
                Err(bad("inf is accepted only for lawvere_plus"))
            };
        }
        if s.contains(['.', 'e', 'E']) {
            return Err(bad("decimal notation is not exact; use p/q"));
        }
        let r = match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad("malformed numerator"))?;
                let q: BigInt = q.trim().parse().map_err(|_| bad("malformed denominator"))?;
                if q.is_zero() {
                    return Err(bad("zero denominator"));
                }
                BigRational::new(p, q)
            }
            None => BigRational::from_integer(s.parse().map_err(|_| bad("expected p/q, an integer or inf"))?),
        };
        let not_in = || Error::NotInCarrier { value: text.to_string(), quantale: self.to_string() };
        match self.kind.levels() {
            Some(n) => {
                let scaled = r * BigRational::from_integer(BigInt::from(n));
                if !scaled.is_integer() || scaled.is_negative() || scaled > BigRational::from_integer(BigInt::from(n)) {
                    return Err(not_in());
                }
                let level: u32 = scaled.to_integer().try_into().map_err(|_| not_in())?;
                Ok(QValue::Level(level))
            }
            None => {
                let v = QValue::Real(r);
                if self.contains(&v) {
                    Ok(v)
                } else {
                    Err(not_in())
                }
            }
        }
    }

    /// Inverse of [`Quantale::parse_value`].
    pub fn format_value(&self, x: &QValue) -> String {
        fn show(r: &BigRational) -> String {
            if r.is_integer() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        }
        match (x, self.kind.levels()) {
            (QValue::Level(i), Some(n)) => show(&rat(*i as i64, n as i64)),
            (QValue::Level(i), None) => format!("x{i}"),
            (QValue::Real(r), _) => show(r),
            (QValue::Infinity, _) => "inf".to_string(),
        }
    }

    /// Checks the quantale laws.
    ///
    /// Finite kinds are checked exhaustively and `samples` is ignored; interval
    /// kinds are checked on all pairs and triples drawn from `samples`.
    pub fn validate_laws(&self, samples: &[QValue]) -> LawReport {
        let mut checks = Vec::new();
        let values: Vec<QValue> = match self.carrier() {
            Some(c) => c,
            None => {
                let stray: Vec<QValue> = samples.iter().filter(|x| !self.contains(x)).cloned().collect();
                checks.push(LawCheck {
                    law: "samples.in_carrier",
                    cases: samples.len(),
                    counterexample: stray.first().map(|x| vec![x.clone()]),
                });
                checks.push(LawCheck {
                    law: "samples.nonempty",
                    cases: 1,
                    counterexample: samples.is_empty().then(Vec::new),
                });
                samples.iter().filter(|x| self.contains(x)).cloned().collect()
            }
        };
        let v = &values;
        let (bot, top, unit) = (self.bottom(), self.top(), self.unit());

        let mut law = |name: &'static str, arity: usize, pred: &dyn Fn(&[&QValue]) -> bool| {
            let mut cases = 0;
            let mut counterexample = None;
            for_each_tuple(v, arity, &mut |t| {
                cases += 1;
                if counterexample.is_none() && !pred(t) {
                    counterexample = Some(t.iter().map(|x| (*x).clone()).collect());
                }
            });
            checks.push(LawCheck { law: name, cases, counterexample });
        };

        law("order.reflexive", 1, &|t| self.le(t[0], t[0]));
        law("order.antisymmetric", 2, &|t| !(self.le(t[0], t[1]) && self.le(t[1], t[0])) || t[0] == t[1]);
        law("order.transitive", 3, &|t| !(self.le(t[0], t[1]) && self.le(t[1], t[2])) || self.le(t[0], t[2]));
        law("order.bounds", 1, &|t| self.le(&bot, t[0]) && self.le(t[0], &top));
        law("join.least_upper_bound", 3, &|t| {
            let j = self.join2(t[0], t[1]);
            self.le(t[0], &j)
                && self.le(t[1], &j)
                && (!(self.le(t[0], t[2]) && self.le(t[1], t[2])) || self.le(&j, t[2]))
        });
        law("meet.greatest_lower_bound", 3, &|t| {
            let m = self.meet2(t[0], t[1]);
            self.le(&m, t[0])
                && self.le(&m, t[1])
                && (!(self.le(t[2], t[0]) && self.le(t[2], t[1])) || self.le(t[2], &m))
        });
        law("tensor.commutative", 2, &|t| self.tensor(t[0], t[1]) == self.tensor(t[1], t[0]));
        law("tensor.associative", 3, &|t| {
            self.tensor(&self.tensor(t[0], t[1]), t[2]) == self.tensor(t[0], &self.tensor(t[1], t[2]))
        });
        law("tensor.unit", 1, &|t| self.tensor(&unit, t[0]) == *t[0] && self.tensor(t[0], &unit) == *t[0]);
        law("tensor.monotone", 3, &|t| !self.le(t[1], t[2]) || self.le(&self.tensor(t[0], t[1]), &self.tensor(t[0], t[2])));
        law("adjunction", 3, &|t| self.le(&self.tensor(t[0], t[1]), t[2]) == self.le(t[1], &self.hom(t[0], t[2])));
        law("tensor.distributes_over_join", 3, &|t| {
            self.tensor(t[0], &self.join2(t[1], t[2])) == self.join2(&self.tensor(t[0], t[1]), &self.tensor(t[0], t[2]))
                && self.tensor(t[0], &bot) == bot
        });

        let n = values.len();
        LawReport { quantale: self.clone(), sample_size: n, triples: n * n * n, checks }
    }
}

fn for_each_tuple<'a>(values: &'a [QValue], arity: usize, f: &mut dyn FnMut(&[&'a QValue])) {
    fn go<'a>(values: &'a [QValue], arity: usize, acc: &mut Vec<&'a QValue>, f: &mut dyn FnMut(&[&'a QValue])) {
        if acc.len() == arity {
            f(acc);
            return;
        }
        for x in values {
            acc.push(x);
            go(values, arity, acc, f);
            acc.pop();
        }
    }
    go(values, arity, &mut Vec::with_capacity(arity), f)
}

/// Outcome of one law over all tuples it was checked on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawCheck {
    pub law: &'static str,
    pub cases: usize,
    pub counterexample: Option<Vec<QValue>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub quantale: Quantale,
    pub sample_size: usize,
    /// Number of value triples the ternary laws ranged over.
    pub triples: usize,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.counterexample.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| c.counterexample.is_some())
    }
}
