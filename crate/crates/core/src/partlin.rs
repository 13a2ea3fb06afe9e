//! Formal linear combinations of partitions with coefficients in Q[n], and the
//! antisymmetrized two-point calculus.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::partition::{Partition, Row, Side};
use crate::poly::PolyQ;

/// Σ c_p·p over P(k,l); zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartLin {
    k: usize,
    l: usize,
    terms: BTreeMap<Partition, PolyQ>,
}

impl PartLin {
    pub fn zero(k: usize, l: usize) -> Self {
        PartLin { k, l, terms: BTreeMap::new() }
    }

    pub fn from_partition(p: Partition) -> Self {
        Self::term(PolyQ::one(), p)
    }

    pub fn term(c: PolyQ, p: Partition) -> Self {
        let mut out = Self::zero(p.k(), p.l());
        out.add_term(p, c);
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn arity(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    pub fn terms(&self) -> &BTreeMap<Partition, PolyQ> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p: &Partition) -> PolyQ {
        self.terms.get(p).cloned().unwrap_or_else(PolyQ::zero)
    }

    fn add_term(&mut self, p: Partition, c: PolyQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&p) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&p);
                }
            }
            None => {
                self.terms.insert(p, c);
            }
        }
    }

    fn check_same(&self, other: &PartLin, op: &str) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::Arity(format!(
                "{op}: P({},{}) vs P({},{})",
                self.k, self.l, other.k, other.l
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PartLin) -> Result<PartLin> {
        self.check_same(other, "add")?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PartLin) -> Result<PartLin> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PartLin {
        self.scale(&PolyQ::int(-1))
    }

    pub fn scale(&self, c: &PolyQ) -> PartLin {
        let mut out = Self::zero(self.k, self.l);
        for (p, d) in &self.terms {
            out.add_term(p.clone(), c * d);
        }
        out
    }

    pub fn scale_rational(&self, c: &BigRational) -> PartLin {
        self.scale(&PolyQ::constant(c.clone()))
    }

    /// self ∘ rhs (rhs applied first); each loop contributes a factor n.
    pub fn compose(&self, rhs: &PartLin) -> Result<PartLin> {
        if rhs.l != self.k {
            return Err(Error::Arity(format!(
                "cannot compose P({},{}) after P({},{})",
                self.k, self.l, rhs.k, rhs.l
            )));
        }
        let mut acc: BTreeMap<Partition, BTreeMap<usize, PolyQ>> = BTreeMap::new();
        for (q, cq) in &self.terms {
            for (p, cp) in &rhs.terms {
                let (r, loops) = q.compose(p)?;
                let slot = acc.entry(r).or_default().entry(loops).or_insert_with(PolyQ::zero);
                *slot = &*slot + &(cq * cp);
            }
        }
        let mut out = Self::zero(rhs.k, self.l);
        for (r, by_loops) in acc {
            let mut c = PolyQ::zero();
            for (loops, d) in by_loops {
                c = c + d * crate::poly::n_pow(loops);
            }
            out.add_term(r, c);
        }
        Ok(out)
    }

    pub fn tensor(&self, rhs: &PartLin) -> PartLin {
        let mut out = Self::zero(self.k + rhs.k, self.l + rhs.l);
        for (p, cp) in &self.terms {
            for (q, cq) in &rhs.terms {
                out.add_term(p.tensor(q), cp * cq);
            }
        }
        out
    }

    pub fn adjoint(&self) -> PartLin {
        self.map_partitions(self.l, self.k, Partition::adjoint)
    }

    pub fn rotate(&self, side: Side, from: Row) -> Result<PartLin> {
        let src = match from {
            Row::Upper => self.k,
            Row::Lower => self.l,
        };
        if src == 0 {
            return invalid("cannot rotate: the source row is empty");
        }
        let (k, l) = match from {
            Row::Upper => (self.k - 1, self.l + 1),
            Row::Lower => (self.k + 1, self.l - 1),
        };
        let mut out = Self::zero(k, l);
        for (p, c) in &self.terms {
            out.add_term(p.rotate(side, from)?, c.clone());
        }
        Ok(out)
    }

    fn map_partitions(&self, k: usize, l: usize, f: impl Fn(&Partition) -> Partition) -> PartLin {
        let mut out = Self::zero(k, l);
        for (p, c) in &self.terms {
            out.add_term(f(p), c.clone());
        }
        out
    }

    /// Value of every coefficient at n = N.
    pub fn eval_coeffs(&self, n: i64) -> Vec<(Partition, BigRational)> {
        self.terms
            .iter()
            .map(|(p, c)| (p.clone(), c.eval_int(n)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(p, c)| json!({ "partition": p.to_string(), "coeff": c.to_string() }))
            .collect();
        json!({ "k": self.k, "l": self.l, "terms": terms })
    }
}

fn coeff_text(c: &PolyQ) -> (bool, String) {
    let neg = c.coeffs().last().is_some_and(|x| x.is_negative());
    let a = if neg { -c.clone() } else { c.clone() };
    let s = a.factored();
    let s = if s.contains(' ') { format!("({s})") } else { s };
    (neg, s)
}

impl fmt::Display for PartLin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 · P({},{})", self.k, self.l);
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let (neg, s) = coeff_text(c);
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if s == "1" {
                write!(f, "{p}")?;
            } else {
                write!(f, "{s} · {p}")?;
            }
        }
        Ok(())
    }
}

/// Å = ½(id₂ − cross).
pub fn antisym2() -> PartLin {
    let half = PolyQ::rational(1, 2);
    PartLin::term(half.clone(), Partition::identity(2))
        .sub(&PartLin::term(half, Partition::cross()))
        .expect("same arity")
}

/// Every subset of the two-points on a row of `len` points, as (point permutation, sign).
fn two_point_flips(len: usize) -> Vec<(Vec<usize>, i64)> {
    let pairs = len / 2;
    (0..1u64 << pairs)
        .map(|mask| {
            let mut perm: Vec<usize> = (0..len).collect();
            let mut sign = 1;
            for t in 0..pairs {
                if mask >> t & 1 == 1 {
                    perm.swap(2 * t, 2 * t + 1);
                    sign = -sign;
                }
            }
            (perm, sign)
        })
        .collect()
}

/// p̊ = Å^{⊗l/2} ∘ p ∘ Å^{⊗k/2}, expanded by relabeling points within two-points.
pub fn antisymmetrize(p: &Partition) -> Result<PartLin> {
    antisymmetrize_lin(&PartLin::from_partition(p.clone()))
}

/// Linear extension of `antisymmetrize`.
pub fn antisymmetrize_lin(e: &PartLin) -> Result<PartLin> {
    if e.k % 2 == 1 || e.l % 2 == 1 {
        return invalid(format!("antisymmetrizing needs even rows, got P({},{})", e.k, e.l));
    }
    let ups = two_point_flips(e.k);
    let lows = two_point_flips(e.l);
    let scale = BigRational::new(1.into(), (num_bigint::BigInt::one()) << ((e.k + e.l) / 2));
    let mut out = PartLin::zero(e.k, e.l);
    for (p, c) in &e.terms {
        let c = c.scale(&scale);
        for (up, su) in &ups {
            for (low, sl) in &lows {
                out.add_term(p.permute(up, low), c.scale(&BigRational::from_integer((su * sl).into())));
            }
        }
    }
    Ok(out)
}

/// Composes with the antisymmetrized crossing of the two-points at positions i and i+1
/// (0-based) on the given row. On antisymmetrized elements this exchanges the two-points.
pub fn two_point_swap(e: &PartLin, row: Row, i: usize) -> Result<PartLin> {
    let len = match row {
        Row::Upper => e.k,
        Row::Lower => e.l,
    };
    if len % 2 == 1 || 2 * i + 4 > len {
        return invalid(format!("no two-points {i} and {} on a row of {len} points", i + 1));
    }
    let cross = Partition::permutation(&[2, 3, 0, 1])?;
    let ring = antisymmetrize(&cross)?;
    let pad = |n: usize| PartLin::from_partition(Partition::identity(n));
    let op = pad(2 * i).tensor(&ring).tensor(&pad(len - 2 * i - 4));
    match row {
        Row::Upper => e.compose(&op),
        Row::Lower => op.compose(e),
    }
}

/// Outcome of comparing two linear combinations term by term.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub equal: bool,
    /// lhs − rhs, empty when equal.
    pub difference: PartLin,
}

pub fn verify_identity(lhs: &PartLin, rhs: &PartLin) -> Result<IdentityReport> {
    let difference = lhs.sub(rhs)?;
    Ok(IdentityReport { equal: difference.is_empty(), difference })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition as P;

    fn lin(s: &str) -> PartLin {
        PartLin::from_partition(P::parse(s).unwrap())
    }

    #[test]
    fn loop_factor() {
        let e = PartLin::from_partition(P::cap()).compose(&PartLin::from_partition(P::cup())).unwrap();
        assert_eq!(e, PartLin::term(PolyQ::n(), P::parse("P(0,0){}").unwrap()));
        assert_eq!(e.to_string(), "n · P(0,0){}");
    }

    #[test]
    fn cancellation_and_distribution() {
        let p = lin("P(2,2){1 2 | 1' 2'}");
        let a = p.scale(&PolyQ::linear(4)).add(&p.scale(&(PolyQ::int(4) - PolyQ::n()))).unwrap();
        assert!(a.is_empty());
        let s = lin("P(2,2){1 1' | 2 2'}").add(&lin("P(2,2){1 2'| 2 1'}")).unwrap();
        let q = lin("P(2,1){1 2 1'}");
        let lhs = q.compose(&s).unwrap();
        let rhs = q.compose(&lin("P(2,2){1 1' | 2 2'}")).unwrap().add(&q.compose(&lin("P(2,2){1 2'| 2 1'}")).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn antisym2_is_a_selfadjoint_idempotent() {
        let a = antisym2();
        assert_eq!(a.compose(&a).unwrap(), a);
        assert_eq!(a.adjoint(), a);
        assert_eq!(a.to_string(), "1/2 · P(2,2){1 1' | 2 2'} - 1/2 · P(2,2){1 2' | 2 1'}");
    }

    #[test]
    fn antisymmetrize_matches_composition_definition() {
        let a = antisym2();
        for s in ["P(2,2){1 1' | 2 2'}", "P(0,4){1' 4' | 2' 3'}", "P(4,2){1 2 | 3 1' | 4 2'}", "P(2,2){1 2 1' | 2'}"] {
            let p = P::parse(s).unwrap();
            let (k, l) = p.arity();
            let pow = |n: usize| (0..n / 2).fold(PartLin::from_partition(P::identity(0)), |acc, _| acc.tensor(&a));
            let direct = pow(l).compose(&PartLin::from_partition(p.clone())).unwrap().compose(&pow(k)).unwrap();
            assert_eq!(antisymmetrize(&p).unwrap(), direct, "{s}");
        }
        assert!(antisymmetrize(&P::cross().tensor(&P::singleton())).is_err());
    }

    #[test]
    fn antisymmetrize_examples() {
        assert_eq!(antisymmetrize(&P::identity(2)).unwrap(), antisym2());
        assert_eq!(antisymmetrize(&P::cross()).unwrap(), antisym2().neg());
        let p = P::parse("P(2,4){1 3' | 2 1' | 2' 4'}").unwrap();
        let once = antisymmetrize(&p).unwrap();
        assert_eq!(antisymmetrize_lin(&once).unwrap(), once);
    }

    #[test]
    fn swaps() {
        let p2 = antisymmetrize(&P::pk(2).unwrap()).unwrap();
        let swapped = two_point_swap(&p2, Row::Lower, 0).unwrap();
        assert!(swapped == p2 || swapped == p2.neg());
        assert_eq!(swapped, p2);
        let x = antisymmetrize(&P::parse("P(0,4){1' 2' | 3' 4'}").unwrap()).unwrap();
        assert_eq!(two_point_swap(&two_point_swap(&x, Row::Lower, 0).unwrap(), Row::Lower, 0).unwrap(), x);
        // exchanging the factors of a ⊗ b
        let a = antisymmetrize(&P::parse("P(0,2){1' 2'}").unwrap()).unwrap();
        let b = antisymmetrize(&P::parse("P(2,2){1 1' | 2 2'}").unwrap()).unwrap();
        let ab = b.compose(&a).unwrap();
        let y = ab.tensor(&antisym2().compose(&PartLin::from_partition(P::pk(1).unwrap())).unwrap());
        let z = two_point_swap(&y, Row::Lower, 0).unwrap();
        assert_eq!(two_point_swap(&z, Row::Lower, 0).unwrap(), y);
        assert!(two_point_swap(&p2, Row::Lower, 1).is_err());
        assert!(two_point_swap(&p2, Row::Upper, 0).is_err());
    }

    #[test]
    fn verify_identity_reports_difference() {
        let n_empty = PartLin::term(PolyQ::n(), P::parse("P(0,0){}").unwrap());
        assert!(verify_identity(&n_empty, &n_empty).unwrap().equal);
        let half = PolyQ::rational(1, 2);
        let plus = PartLin::term(half.clone(), P::identity(2)).add(&PartLin::term(half, P::cross())).unwrap();
        let r = verify_identity(&antisym2(), &plus).unwrap();
        assert!(!r.equal);
        assert_eq!(r.difference, PartLin::term(PolyQ::int(-1), P::cross()));
        assert!(verify_identity(&n_empty, &antisym2()).is_err());
    }
}
