//! Exact arithmetic in the cyclotomic field Q(ζ_M).
//!
//! An element is stored as coefficients in the basis 1, ζ, …, ζ^{φ(M)−1}, reduced
//! modulo the M-th cyclotomic polynomial, so equal numbers at equal levels have equal
//! coefficient vectors. Operands at different levels are lifted to the lcm level.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::scalar::{is_negative, Coeff, Scalar};

/// Reduction data for one level M: `powers[e]` expresses ζ_M^e in the canonical basis.
#[derive(Debug)]
pub struct Level {
    m: u64,
    phi: usize,
    powers: Vec<Vec<i64>>,
}

impl Level {
    /// Shared reduction table for level `m` (memoized; the table is immutable once built).
    pub fn get(m: u64) -> Arc<Level> {
        assert!(m >= 1, "cyclotomic level must be positive");
        static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Level>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(level) = cache.read().expect("level cache poisoned").get(&m) {
            return level.clone();
        }
        let built = Arc::new(Level::build(m));
        cache
            .write()
            .expect("level cache poisoned")
            .entry(m)
            .or_insert(built)
            .clone()
    }

    fn build(m: u64) -> Level {
        let phi_poly = cyclotomic_polynomial(m);
        let phi = phi_poly.len() - 1;
        let mut powers: Vec<Vec<i64>> = Vec::with_capacity(m as usize);
        for e in 0..m as usize {
            if e < phi {
                let mut v = vec![0i64; phi];
                v[e] = 1;
                powers.push(v);
            } else {
                // x·(previous) then eliminate x^phi using the monic Φ_M
                let prev = &powers[e - 1];
                let top = prev[phi - 1];
                let mut v = vec![0i64; phi];
                for t in (1..phi).rev() {
                    v[t] = prev[t - 1];
                }
                for (t, slot) in v.iter_mut().enumerate() {
                    *slot = slot
                        .checked_sub(top.checked_mul(phi_poly[t]).expect("level too large"))
                        .expect("level too large");
                }
                powers.push(v);
            }
        }
        Level { m, phi, powers }
    }

    pub fn order(&self) -> u64 {
        self.m
    }

    /// Euler's totient φ(M), the dimension of Q(ζ_M) over Q.
    pub fn degree(&self) -> usize {
        self.phi
    }
}

/// Integer coefficients (constant term first) of the M-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    // x^m − 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            num = exact_divide(&num, &div);
        }
    }
    num
}

fn exact_divide(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

/// An element of Q(ζ_M) with coefficients in `F`.
#[derive(Clone)]
pub struct Cyclotomic<F> {
    level: Arc<Level>,
    coeffs: Vec<F>,
}

impl<F: Coeff> Cyclotomic<F> {
    pub fn zero_at(m: u64) -> Self {
        let level = Level::get(m);
        let coeffs = vec![F::zero(); level.phi];
        Cyclotomic { level, coeffs }
    }

    pub fn from_coeff_at(m: u64, c: F) -> Self {
        let mut x = Self::zero_at(m);
        x.coeffs[0] = c;
        x
    }

    /// ζ_M^e.
    pub fn root(m: u64, e: i64) -> Self {
        let level = Level::get(m);
        let e = e.rem_euclid(m as i64) as usize;
        let coeffs = level.powers[e].iter().map(|&c| F::from_i64(c)).collect();
        Cyclotomic { level, coeffs }
    }

    /// Σ c·ζ_M^e over the given (exponent, coefficient) pairs, reduced to canonical form.
    pub fn from_exponents(m: u64, terms: &[(i64, F)]) -> Self {
        let level = Level::get(m);
        let mut acc = vec![F::zero(); m as usize];
        for (e, c) in terms {
            acc[e.rem_euclid(m as i64) as usize].add_assign_ref(c);
        }
        reduce(level, acc)
    }

    /// Builds from canonical-basis coefficients; fails if the length is not φ(M).
    pub fn from_coeffs(m: u64, coeffs: Vec<F>) -> Option<Self> {
        let level = Level::get(m);
        (coeffs.len() == level.phi).then_some(Cyclotomic { level, coeffs })
    }

    pub fn level(&self) -> u64 {
        self.level.m
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Re-expresses the number at level `m`, which must be a multiple of the current level.
    pub fn lift(&self, m: u64) -> Self {
        let d = self.level.m;
        if d == m {
            return self.clone();
        }
        assert!(m.is_multiple_of(d), "cannot lift level {d} to {m}");
        let step = (m / d) as i64;
        let terms: Vec<(i64, F)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as i64 * step, c.clone()))
            .collect();
        Self::from_exponents(m, &terms)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.level.m == b.level.m {
            (a.clone(), b.clone())
        } else {
            let m = a.level.m.lcm(&b.level.m);
            (a.lift(m), b.lift(m))
        }
    }

    /// Image under ζ ↦ ζ^{−1}, which is complex conjugation.
    pub fn conjugate(&self) -> Self {
        let m = self.level.m as usize;
        let mut acc = vec![F::zero(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc[(m - j) % m].add_assign_ref(c);
            }
        }
        reduce(self.level.clone(), acc)
    }

    /// Evaluation at ζ_M = exp(2πi/M).
    pub fn to_complex(&self) -> Complex64 {
        let m = self.level.m as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let angle = 2.0 * std::f64::consts::PI * j as f64 / m;
                Complex64::from_polar(1.0, angle) * c.to_f64()
            })
            .sum()
    }

    /// The coefficient of 1 when every other coefficient vanishes.
    pub fn as_coeff(&self) -> Option<F> {
        self.coeffs[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.coeffs[0].clone())
    }

    /// Real part (x + conj x)/2 as an exact element.
    pub fn real_part(&self) -> Self {
        let half = F::from_rational(&BigRational::new(1.into(), 2.into()));
        let s = self + &self.conjugate();
        let coeffs = s.coeffs.iter().map(|c| c.mul_ref(&half)).collect();
        Cyclotomic { level: s.level, coeffs }
    }

    /// Canonical order: descending real part (decided exactly), then lexicographic on
    /// coefficients at the common level.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = Self::common(self, other);
        if a == b {
            return Ordering::Equal;
        }
        let diff = &a.real_part() - &b.real_part();
        if !diff.is_zero() {
            // the float image of a nonzero exact difference carries its sign
            return 0f64.total_cmp(&diff.to_complex().re);
        }
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            match x.cmp_coeff(y) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn to_json(&self) -> Value {
        let z = self.to_complex();
        json!({
            "level": self.level.m,
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "approx": [z.re, z.im],
        })
    }
}

impl Cyclotomic<BigRational> {
    pub fn from_rational_at(m: u64, q: BigRational) -> Self {
        Self::from_coeff_at(m, q)
    }

    pub fn from_json(v: &Value) -> Option<Self> {
        let m = v.get("level")?.as_u64()?;
        let coeffs = v
            .get("coeffs")?
            .as_array()?
            .iter()
            .map(|c| c.as_str()?.parse::<BigRational>().ok())
            .collect::<Option<Vec<_>>>()?;
        Self::from_coeffs(m, coeffs)
    }
}

fn reduce<F: Coeff>(level: Arc<Level>, acc: Vec<F>) -> Cyclotomic<F> {
    let phi = level.phi;
    let mut coeffs: Vec<F> = Vec::with_capacity(phi);
    let mut acc = acc.into_iter();
    for _ in 0..phi {
        coeffs.push(acc.next().unwrap_or_else(F::zero));
    }
    for (e, c) in acc.enumerate() {
        if c.is_zero() {
            continue;
        }
        for (t, &p) in level.powers[e + phi].iter().enumerate() {
            if p != 0 {
                let add = c.mul_i64(p);
                coeffs[t].add_assign_ref(&add);
            }
        }
    }
    Cyclotomic { level, coeffs }
}

impl<F: Coeff> PartialEq for Cyclotomic<F> {
    fn eq(&self, other: &Self) -> bool {
        if self.level.m == other.level.m {
            self.coeffs == other.coeffs
        } else {
            let (a, b) = Self::common(self, other);
            a.coeffs == b.coeffs
        }
    }
}

impl<F: Coeff> fmt::Debug for Cyclotomic<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<F: Coeff> fmt::Display for Cyclotomic<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_coeff() {
            return write!(f, "{c}");
        }
        let m = self.level.m;
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = is_negative(c);
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = mag.is_one();
            match (j, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{m}^{j}")?,
                (_, false) => write!(f, "{mag}*z{m}^{j}")?,
            }
        }
        Ok(())
    }
}

impl<F: Coeff> Add for Cyclotomic<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<F: Coeff> Add for &Cyclotomic<F> {
    type Output = Cyclotomic<F>;
    fn add(self, rhs: Self) -> Cyclotomic<F> {
        if self.level.m == rhs.level.m {
            let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.add_ref(b)).collect();
            Cyclotomic { level: self.level.clone(), coeffs }
        } else {
            let (a, b) = Cyclotomic::common(self, rhs);
            &a + &b
        }
    }
}

impl<F: Coeff> Sub for Cyclotomic<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        &self + &(-rhs)
    }
}

impl<F: Coeff> Sub for &Cyclotomic<F> {
    type Output = Cyclotomic<F>;
    fn sub(self, rhs: Self) -> Cyclotomic<F> {
        self + &(-rhs.clone())
    }
}

impl<F: Coeff> Neg for Cyclotomic<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Cyclotomic { level: self.level, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<F: Coeff> Mul for Cyclotomic<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<F: Coeff> Mul for &Cyclotomic<F> {
    type Output = Cyclotomic<F>;
    fn mul(self, rhs: Self) -> Cyclotomic<F> {
        if self.level.m != rhs.level.m {
            let (a, b) = Cyclotomic::common(self, rhs);
            return &a * &b;
        }
        // rational scalars take the cheap path
        if let Some(c) = self.as_coeff() {
            let coeffs = rhs.coeffs.iter().map(|x| c.mul_ref(x)).collect();
            return Cyclotomic { level: self.level.clone(), coeffs };
        }
        if let Some(c) = rhs.as_coeff() {
            let coeffs = self.coeffs.iter().map(|x| x.mul_ref(&c)).collect();
            return Cyclotomic { level: self.level.clone(), coeffs };
        }
        let m = self.level.m as usize;
        let mut acc = vec![F::zero(); m];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    acc[(i + j) % m].add_assign_ref(&a.mul_ref(b));
                }
            }
        }
        reduce(self.level.clone(), acc)
    }
}

impl<F: Coeff> Zero for Cyclotomic<F> {
    fn zero() -> Self {
        Self::zero_at(1)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl<F: Coeff> One for Cyclotomic<F> {
    fn one() -> Self {
        Self::from_coeff_at(1, F::one())
    }
}

impl<F: Coeff> Scalar for Cyclotomic<F> {
    fn conj(&self) -> Self {
        self.conjugate()
    }

    fn from_rational(q: &BigRational) -> Self {
        Self::from_coeff_at(1, F::from_rational(q))
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_assign_ref(&mut self, other: &Self) {
        if self.level.m == other.level.m {
            for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
                a.add_assign_ref(b);
            }
        } else {
            *self = &*self + other;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::Cyclo;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(Level::get(15).degree(), 8);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Cyclo::root(4, 1);
        assert_eq!(&i * &i, Cyclo::from_rational_at(4, q(-1, 1)));
    }

    #[test]
    fn third_roots_sum_to_zero() {
        let s = Cyclo::one() + Cyclo::root(3, 1) + Cyclo::root(3, 2);
        assert!(s.is_zero());
    }

    #[test]
    fn conj_of_zeta5() {
        assert_eq!(Cyclo::root(5, 1).conjugate(), Cyclo::root(5, 4));
    }

    #[test]
    fn mixed_levels_lift_to_lcm() {
        let s = Cyclo::root(2, 1) + Cyclo::root(3, 1);
        assert_eq!(s.level(), 6);
        assert_eq!(Cyclo::root(2, 1), Cyclo::from_rational_at(1, q(-1, 1)));
        assert_eq!(Cyclo::root(12, 3), Cyclo::root(4, 1));
    }

    #[test]
    fn canonical_order_is_by_real_part_then_coefficients() {
        let three = Cyclo::from_rational_at(1, q(3, 1));
        let i = Cyclo::root(4, 1);
        let minus_i = Cyclo::root(4, 3);
        assert_eq!(three.canonical_cmp(&i), Ordering::Less);
        assert_eq!(minus_i.canonical_cmp(&i), Ordering::Less);
        assert_eq!(i.canonical_cmp(&i.lift(8)), Ordering::Equal);
    }

    #[test]
    fn json_round_trip() {
        let x = Cyclo::from_exponents(5, &[(1, q(1, 2)), (3, q(-2, 3))]);
        let v = x.to_json();
        assert_eq!(v["level"], 5);
        assert_eq!(Cyclo::from_json(&v).unwrap(), x);
    }

    fn arb_cyclo() -> impl Strategy<Value = Cyclo> {
        (1u64..=12, proptest::collection::vec((0i64..24, -5i64..=5, 1i64..=4), 0..6)).prop_map(
            |(m, terms)| {
                let t: Vec<_> = terms.into_iter().map(|(e, n, d)| (e, q(n, d))).collect();
                Cyclo::from_exponents(m, &t)
            },
        )
    }

    proptest! {
        #[test]
        fn float_image_is_multiplicative(a in arb_cyclo(), b in arb_cyclo()) {
            let lhs = (&a * &b).to_complex();
            let rhs = a.to_complex() * b.to_complex();
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }

        #[test]
        fn conj_matches_float_conjugate(a in arb_cyclo()) {
            let lhs = a.conjugate().to_complex();
            prop_assert!((lhs - a.to_complex().conj()).norm() < 1e-9);
        }

        #[test]
        fn float_image_matches_direct_sum(m in 1u64..=20, e in -30i64..30) {
            let z = Cyclo::root(m, e).to_complex();
            let angle = 2.0 * std::f64::consts::PI * e as f64 / m as f64;
            prop_assert!((z - Complex64::from_polar(1.0, angle)).norm() < 1e-12);
        }

        #[test]
        fn renormalizing_is_identity(a in arb_cyclo()) {
            let terms: Vec<_> = a.coeffs().iter().cloned().enumerate().map(|(j, c)| (j as i64, c)).collect();
            let b = Cyclo::from_exponents(a.level(), &terms);
            prop_assert_eq!(b.coeffs(), a.coeffs());
        }

        #[test]
        fn ring_axioms(a in arb_cyclo(), b in arb_cyclo(), c in arb_cyclo()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((a.clone() - a.clone()).is_zero());
        }
    }
}
