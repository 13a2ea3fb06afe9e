//! Univariate polynomials in the loop parameter n with rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::rational_string;

/// Σ c_i n^i, constant term first, trailing zeros stripped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<BigRational>,
}

impl PolyQ {
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        PolyQ { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::constant(BigRational::new(num.into(), den.into()))
    }

    /// The indeterminate n.
    pub fn n() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    /// n − r.
    pub fn linear(r: i64) -> Self {
        Self::n() - Self::int(r)
    }

    /// Product of (n − r) over the roots, times c.
    pub fn from_roots(c: BigRational, roots: &[i64]) -> Self {
        roots.iter().fold(Self::constant(c), |acc, &r| acc * Self::linear(r))
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc * self.clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&BigRational::from_integer(x.into()))
    }

    /// Leading coefficient times the integer roots with multiplicity, when the polynomial
    /// splits over Z.
    pub fn integer_roots(&self) -> Option<(BigRational, Vec<i64>)> {
        let lead = self.coeffs.last()?.clone();
        let mut rest = self.scale(&lead.recip());
        let mut roots = Vec::new();
        while rest.coeffs.len() > 1 {
            // a monic polynomial with an integer root r has r | c_0 once denominators are cleared
            let c0 = &rest.coeffs[0];
            let r = if c0.is_zero() {
                Some(0)
            } else {
                if !c0.is_integer() {
                    return None;
                }
                let c = c0.to_integer().abs();
                let c = i64::try_from(c).ok()?;
                divisors(c).into_iter().flat_map(|d| [d, -d]).find(|&d| rest.eval_int(d).is_zero())
            }?;
            rest = rest.divide_linear(r);
            roots.push(r);
        }
        roots.sort_unstable();
        Some((lead, roots))
    }

    /// Quotient by (n − r), assuming r is a root.
    fn divide_linear(&self, r: i64) -> Self {
        let r = BigRational::from_integer(r.into());
        let d = self.coeffs.len();
        let mut q = vec![BigRational::zero(); d - 1];
        let mut carry = BigRational::zero();
        for i in (1..d).rev() {
            carry = &self.coeffs[i] + carry * &r;
            q[i - 1] = carry.clone();
        }
        Self::from_coeffs(q)
    }

    /// "c(n-4)(n-6)" style string when the polynomial splits over Z, else the expanded form.
    pub fn factored(&self) -> String {
        match self.integer_roots() {
            Some((lead, roots)) if !roots.is_empty() => {
                let mut s = String::new();
                if lead == -BigRational::one() {
                    s.push('-');
                } else if !lead.is_one() {
                    s.push_str(&rational_string(&lead));
                }
                for r in roots {
                    match r.cmp(&0) {
                        std::cmp::Ordering::Equal => s.push('n'),
                        std::cmp::Ordering::Greater => s.push_str(&format!("(n-{r})")),
                        std::cmp::Ordering::Less => s.push_str(&format!("(n+{})", -r)),
                    }
                }
                s
            }
            _ => self.to_string(),
        }
    }
}

fn divisors(c: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= c {
        if c % d == 0 {
            out.push(d);
            if d * d != c {
                out.push(c / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

impl fmt::Display for PolyQ {
    /// Expanded form, highest degree first, e.g. "n^2 - 1/2*n + 3".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "n".to_string(),
                _ => format!("n^{i}"),
            };
            match (a.is_one(), mono.is_empty()) {
                (_, true) => write!(f, "{}", rational_string(&a))?,
                (true, false) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{}*{mono}", rational_string(&a))?,
            }
        }
        Ok(())
    }
}

impl Add for PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: PolyQ) -> PolyQ {
        &self + &rhs
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let d = self.coeffs.len().max(rhs.coeffs.len());
        let z = BigRational::zero();
        PolyQ::from_coeffs(
            (0..d)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + rhs.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl Neg for PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Sub for PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: PolyQ) -> PolyQ {
        self + (-rhs)
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        self + &(-rhs.clone())
    }
}

impl Mul for PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: PolyQ) -> PolyQ {
        &self * &rhs
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return PolyQ::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyQ::from_coeffs(out)
    }
}

impl Zero for PolyQ {
    fn zero() -> Self {
        PolyQ { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for PolyQ {
    fn one() -> Self {
        PolyQ::int(1)
    }
}

/// n^e as a rational polynomial.
pub fn n_pow(e: usize) -> PolyQ {
    let mut c = vec![BigRational::zero(); e + 1];
    c[e] = BigRational::one();
    PolyQ::from_coeffs(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_forms() {
        assert_eq!(PolyQ::zero().to_string(), "0");
        assert_eq!(PolyQ::n().to_string(), "n");
        assert_eq!((PolyQ::n() * PolyQ::rational(1, 2) - PolyQ::int(1)).to_string(), "1/2*n - 1");
        let alpha = PolyQ::from_roots(BigRational::one(), &[4, 6, 8]);
        assert_eq!(alpha.to_string(), "n^3 - 18*n^2 + 104*n - 192");
        assert_eq!(alpha.factored(), "(n-4)(n-6)(n-8)");
        assert_eq!((-PolyQ::linear(-2)).factored(), "-(n+2)");
        assert_eq!(PolyQ::rational(1, 4).factored(), "1/4");
        assert_eq!((PolyQ::n() * PolyQ::n() + PolyQ::int(1)).factored(), "n^2 + 1");
    }

    #[test]
    fn cancellation() {
        let p = PolyQ::linear(4);
        assert!((p.clone() + (-p)).is_zero());
        assert_eq!(PolyQ::linear(4).eval_int(4), BigRational::zero());
    }

    #[test]
    fn roots_recovered() {
        let p = PolyQ::from_roots(BigRational::new(3.into(), 2.into()), &[-1, 0, 2, 2]);
        let (c, r) = p.integer_roots().unwrap();
        assert_eq!(c, BigRational::new(3.into(), 2.into()));
        assert_eq!(r, vec![-1, 0, 2, 2]);
    }

    fn arb_poly() -> impl Strategy<Value = PolyQ> {
        prop::collection::vec((-9i64..=9, 1i64..=4), 0..5).prop_map(|v| {
            PolyQ::from_coeffs(v.into_iter().map(|(a, b)| BigRational::new(a.into(), b.into())).collect())
        })
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_map(a in arb_poly(), b in arb_poly(), x in -6i64..6) {
            prop_assert_eq!((&a * &b).eval_int(x), a.eval_int(x) * b.eval_int(x));
            prop_assert_eq!((&a + &b).eval_int(x), a.eval_int(x) + b.eval_int(x));
        }

        #[test]
        fn distributive(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
