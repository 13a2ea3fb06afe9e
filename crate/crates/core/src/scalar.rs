//! Scalar abstraction shared by tensors, cyclotomic numbers and polynomials.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, ToPrimitive, Zero};

/// A commutative ring with an involution, embedding the rationals.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn conj(&self) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
}

/// Coefficient field for cyclotomic numbers and polynomials: a real scalar with a total order.
pub trait Coeff: Scalar + Display {
    fn to_f64(&self) -> f64;

    fn mul_i64(&self, v: i64) -> Self {
        self.mul_ref(&Self::from_i64(v))
    }

    fn cmp_coeff(&self, other: &Self) -> Ordering;

    /// Exact rational value, when the coefficient type carries one.
    fn to_rational(&self) -> Option<BigRational>;
}

impl Scalar for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Coeff for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn mul_i64(&self, v: i64) -> Self {
        self * BigInt::from(v)
    }

    fn cmp_coeff(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

impl Scalar for f64 {
    fn conj(&self) -> Self {
        *self
    }

    fn from_rational(q: &BigRational) -> Self {
        Coeff::to_f64(q)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Coeff for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn mul_i64(&self, v: i64) -> Self {
        self * v as f64
    }

    fn cmp_coeff(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
}

/// Shorthand for an exact rational.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as "p" or "p/q".
pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn is_negative<F: Coeff>(c: &F) -> bool {
    c.cmp_coeff(&F::zero()) == Ordering::Less
}

/// Exact rational kept as a pair of i64 while it fits, promoted to BigRational on overflow.
#[derive(Clone, Debug)]
pub enum HybridRational {
    Small(Ratio<i64>),
    Big(BigRational),
}

impl HybridRational {
    pub fn to_big(&self) -> BigRational {
        match self {
            HybridRational::Small(r) => BigRational::new((*r.numer()).into(), (*r.denom()).into()),
            HybridRational::Big(b) => b.clone(),
        }
    }

    fn demote(b: BigRational) -> Self {
        match (b.numer().to_i64(), b.denom().to_i64()) {
            (Some(n), Some(d)) => HybridRational::Small(Ratio::new_raw(n, d)),
            _ => HybridRational::Big(b),
        }
    }

    fn combine(
        &self,
        other: &Self,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Self {
        if let (HybridRational::Small(a), HybridRational::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return HybridRational::Small(r);
            }
        }
        Self::demote(big(self.to_big(), other.to_big()))
    }
}

impl PartialEq for HybridRational {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (HybridRational::Small(a), HybridRational::Small(b)) => a == b,
            _ => self.to_big() == other.to_big(),
        }
    }
}

impl Zero for HybridRational {
    fn zero() -> Self {
        HybridRational::Small(Ratio::zero())
    }

    fn is_zero(&self) -> bool {
        match self {
            HybridRational::Small(r) => r.is_zero(),
            HybridRational::Big(b) => b.is_zero(),
        }
    }
}

impl One for HybridRational {
    fn one() -> Self {
        HybridRational::Small(Ratio::one())
    }
}

impl Add for HybridRational {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        self.add_ref(&other)
    }
}

impl Sub for HybridRational {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self.combine(&other, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl Mul for HybridRational {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        self.mul_ref(&other)
    }
}

impl Neg for HybridRational {
    type Output = Self;
    fn neg(self) -> Self {
        match self {
            HybridRational::Small(r) if *r.numer() != i64::MIN => HybridRational::Small(-r),
            other => HybridRational::Big(-other.to_big()),
        }
    }
}

impl Scalar for HybridRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(q: &BigRational) -> Self {
        Self::demote(q.clone())
    }

    fn from_i64(v: i64) -> Self {
        HybridRational::Small(Ratio::from_integer(v))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.checked_add(b), |a, b| a + b)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hybrid_promotes_on_overflow() {
        let big = HybridRational::from_i64(i64::MAX);
        let sq = big.mul_ref(&big);
        assert!(matches!(sq, HybridRational::Big(_)));
        assert_eq!(sq.to_big(), q(i64::MAX, 1) * q(i64::MAX, 1));
        let back = sq.mul_ref(&HybridRational::from_rational(&q(1, i64::MAX)));
        assert!(matches!(back, HybridRational::Small(_)));
        assert_eq!(back, big);
        let third = HybridRational::from_rational(&q(1, 3));
        assert_eq!(third.add_ref(&third).add_ref(&third), HybridRational::one());
        assert_eq!(-HybridRational::from_i64(i64::MIN), HybridRational::Big(q(i64::MIN, 1) * q(-1, 1)));
    }
}
