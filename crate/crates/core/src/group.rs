//! Finite abelian groups Z_{m_1} × ⋯ × Z_{m_n} and their characters.

use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{invalid, Result};
use crate::scalar::Coeff;
use crate::cyclotomic::Cyclotomic;

/// Exponent tuple; also used as a character label μ.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    /// Number of nonzero coordinates.
    pub fn degree(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn to_json(&self) -> Value {
        json!(self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    orders: Vec<u64>,
    size: u64,
    exponent: u64,
}

impl AbelianGroup {
    pub fn new(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return invalid("group needs at least one cyclic factor");
        }
        if orders.contains(&0) {
            return invalid("cyclic factor orders must be positive");
        }
        let mut size: u64 = 1;
        for &m in orders {
            size = size
                .checked_mul(m)
                .ok_or_else(|| crate::Error::InvalidInput("group order overflows".into()))?;
        }
        let exponent = orders.iter().fold(1u64, |acc, &m| acc.lcm(&m));
        Ok(AbelianGroup { orders: orders.to_vec(), size, exponent })
    }

    /// Z_m^n.
    pub fn power(m: u64, n: usize) -> Result<Self> {
        Self::new(&vec![m; n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Group order N.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Exponent M = lcm of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Element with coordinates reduced mod m_i.
    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.orders.len() {
            return invalid(format!(
                "element {coords:?} has {} coordinates, group has {}",
                coords.len(),
                self.orders.len()
            ));
        }
        Ok(GroupElement(
            coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &m)| c.rem_euclid(m as i64) as u64)
                .collect(),
        ))
    }

    /// Checks arity and that every coordinate is already in range.
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() != self.orders.len() {
            return invalid(format!("element {:?} does not match group orders {:?}", g.0, self.orders));
        }
        for (c, m) in g.0.iter().zip(&self.orders) {
            if c >= m {
                return invalid(format!("coordinate {c} out of range for Z_{m}"));
            }
        }
        Ok(())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.orders.len()])
    }

    /// Unit vector ε_i (0-based i), scaled by `a`.
    pub fn unit(&self, i: usize, a: u64) -> GroupElement {
        let mut v = vec![0; self.orders.len()];
        v[i] = a % self.orders[i];
        GroupElement(v)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter().zip(&b.0).zip(&self.orders).map(|((x, y), m)| (x + y) % m).collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().zip(&self.orders).map(|(x, m)| (m - x) % m).collect())
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    /// Position in the fixed enumeration order (lexicographic, last coordinate fastest).
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter().zip(&self.orders).fold(0u64, |acc, (c, m)| acc * m + c) as usize
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut v = vec![0; self.orders.len()];
        for (slot, &m) in v.iter_mut().zip(&self.orders).rev() {
            *slot = idx as u64 % m;
            idx /= m as usize;
        }
        GroupElement(v)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.size as usize).map(move |i| self.element_at(i))
    }

    /// Exponent e with τ_μ(α) = ζ_M^e, namely Σ (M/m_i)·α_i·μ_i mod M.
    pub fn char_exponent(&self, mu: &GroupElement, alpha: &GroupElement) -> u64 {
        let m = self.exponent;
        let mut e = 0u64;
        for ((a, u), &mi) in alpha.0.iter().zip(&mu.0).zip(&self.orders) {
            let t = ((a * u) % mi) * (m / mi);
            e = (e + t) % m;
        }
        e
    }

    /// Character value τ_μ(α) = Π ζ_M^{(M/m_i) α_i μ_i}.
    pub fn char_value<F: Coeff>(&self, mu: &GroupElement, alpha: &GroupElement) -> Result<Cyclotomic<F>> {
        self.validate(mu)?;
        self.validate(alpha)?;
        Ok(Cyclotomic::root(self.exponent, self.char_exponent(mu, alpha) as i64))
    }

    /// Orthogonality sum Σ_α conj(τ_μ(α)) τ_ν(α).
    pub fn character_inner<F: Coeff>(&self, mu: &GroupElement, nu: &GroupElement) -> Cyclotomic<F> {
        let m = self.exponent;
        let mut counts = vec![0i64; m as usize];
        for a in self.elements() {
            let e = (m - self.char_exponent(mu, &a) + self.char_exponent(nu, &a)) % m;
            counts[e as usize] += 1;
        }
        let terms: Vec<(i64, F)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (e as i64, F::from_i64(c)))
            .collect();
        if terms.is_empty() {
            return Cyclotomic::zero();
        }
        Cyclotomic::from_exponents(m, &terms)
    }

    /// Subgroup generated by `gens` equals the whole group.
    pub fn generated_by(&self, gens: &[GroupElement]) -> bool {
        let n = self.size as usize;
        let mut seen = vec![false; n];
        let mut stack = vec![self.zero()];
        seen[0] = true;
        let mut count = 1;
        while let Some(g) = stack.pop() {
            for s in gens {
                let h = self.add(&g, s);
                let i = self.index_of(&h);
                if !seen[i] {
                    seen[i] = true;
                    count += 1;
                    stack.push(h);
                }
            }
        }
        count == n
    }

    pub fn to_json(&self) -> Value {
        json!({ "orders": self.orders })
    }
}
