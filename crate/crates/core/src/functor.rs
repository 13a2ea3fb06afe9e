//! The tensor functors T_p and T̆_p, antisymmetrizers and the permanent.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::guard;
use crate::partition::Partition;
use crate::partlin::PartLin;
use crate::scalar::Scalar;
use crate::tensor::SparseTensor;

/// Axis layout of T_p: lower points 1'..l' (outputs), then upper points 1..k (inputs).
pub(crate) fn axis_labels(p: &Partition) -> Vec<usize> {
    let labels = p.labels();
    let (k, l) = p.arity();
    labels[k..k + l].iter().chain(&labels[..k]).copied().collect()
}

fn functor_entries<S: Scalar>(p: &Partition, n: usize, deformed: bool) -> Result<SparseTensor<S>> {
    if n == 0 {
        return invalid("N must be at least 1");
    }
    let (k, l) = p.arity();
    let shape = vec![n; k + l];
    let axes = axis_labels(p);
    let blocks = p.block_count();
    let count = guard::checked_pow("T_p nonzeros", n as u64, blocks)?;
    guard::check_sparse("T_p", count)?;
    guard::checked_pow("T_p index space", n as u64, k + l)?;
    let mut entries = BTreeMap::new();
    let mut values = vec![0usize; blocks];
    let mut idx = vec![0usize; k + l];
    for _ in 0..count {
        for (slot, &b) in idx.iter_mut().zip(&axes) {
            *slot = values[b];
        }
        let lin = idx.iter().fold(0u64, |acc, &i| acc * n as u64 + i as u64);
        let v = if deformed && sign_sigma(&idx[..l]) * sign_sigma(&idx[l..]) < 0 {
            -S::one()
        } else {
            S::one()
        };
        entries.insert(lin, v);
        for v in values.iter_mut().rev() {
            *v += 1;
            if *v < n {
                break;
            }
            *v = 0;
        }
    }
    Ok(SparseTensor::from_map(shape, l, entries))
}

/// [T_p]^{j}_{i} = 1 iff the indices agree within every block.
pub fn functor_t<S: Scalar>(p: &Partition, n: usize) -> Result<SparseTensor<S>> {
    functor_entries(p, n, false)
}

/// (−1)^{#inversions}, where an inversion is a pair k < l with i_k > i_l.
pub fn sign_sigma(idx: &[usize]) -> i64 {
    let mut inv = 0usize;
    for a in 0..idx.len() {
        for b in a + 1..idx.len() {
            if idx[a] > idx[b] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// [T̆_p]^{j}_{i} = σ_i σ_j [T_p]^{j}_{i}; defined only when every block has even size.
pub fn functor_t_deformed<S: Scalar>(p: &Partition, n: usize) -> Result<SparseTensor<S>> {
    if p.block_sizes().iter().any(|s| s % 2 == 1) {
        return invalid(format!("deformed functor needs blocks of even size, {p} has an odd block"));
    }
    functor_entries(p, n, true)
}

/// Σ c_p(N)·T_p (or T̆_p) at n := N.
pub fn eval_partlin<S: Scalar>(e: &PartLin, n: usize, deformed: bool) -> Result<SparseTensor<S>> {
    let (k, l) = e.arity();
    let terms: Vec<(&Partition, BigRational)> = e
        .terms()
        .iter()
        .map(|(p, c)| (p, c.eval_int(n as i64)))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let parts: Vec<SparseTensor<S>> = terms
        .par_iter()
        .map(|(p, c)| {
            let t = if deformed { functor_t_deformed::<S>(p, n)? } else { functor_t::<S>(p, n)? };
            Ok(t.scale(&S::from_rational(c)))
        })
        .collect::<Result<_>>()?;
    let mut acc = SparseTensor::zeros(&vec![n; k + l], l)?;
    for t in parts {
        acc = acc.add(&t)?;
    }
    Ok(acc)
}

/// All permutations of 0..k in lexicographic order, with signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push((cur.clone(), sign_sigma(&cur)));
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// A_k = (1/k!) Σ_σ sgn(σ)·P_σ, or Ă_k = (1/k!) Σ_σ P_σ on tuples of distinct indices.
/// Shape [n;k] ++ [n;k].
pub fn antisymmetrizer<S: Scalar>(k: usize, n: usize, deformed: bool) -> Result<SparseTensor<S>> {
    if n == 0 {
        return invalid("dimension must be at least 1");
    }
    let shape = vec![n; 2 * k];
    let side = guard::checked_pow("antisymmetrizer", n as u64, k)?;
    if k > n {
        return SparseTensor::zeros(&shape, k);
    }
    let tuples = (0..k as u64).fold(1u64, |acc, i| acc * (n as u64 - i));
    guard::check_sparse("antisymmetrizer", tuples.saturating_mul(factorial(k)))?;
    let perms = permutations(k);
    let inv = BigRational::new(1.into(), factorial(k).into());
    let pos = S::from_rational(&inv);
    let neg = S::from_rational(&-inv);
    let mut entries = BTreeMap::new();
    let mut tuple = vec![0usize; k];
    for col in 0..side {
        let mut r = col;
        for slot in tuple.iter_mut().rev() {
            *slot = (r % n as u64) as usize;
            r /= n as u64;
        }
        let mut seen = tuple.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        for (perm, sign) in &perms {
            let row = perm.iter().fold(0u64, |acc, &i| acc * n as u64 + tuple[i] as u64);
            let v = if !deformed && *sign < 0 { neg.clone() } else { pos.clone() };
            entries.insert(row * side + col, v);
        }
    }
    Ok(SparseTensor::from_map(shape, k, entries))
}

/// Σ_σ Π_i M[i][σ(i)].
pub fn permanent(m: &[Vec<BigRational>]) -> Result<BigRational> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("permanent needs a square matrix".into()));
    }
    Ok(permutations(n)
        .into_iter()
        .map(|(p, _)| p.iter().enumerate().fold(BigRational::one(), |acc, (i, &j)| acc * &m[i][j]))
        .fold(BigRational::zero(), |a, b| a + b))
}

/// The permanent read off from Ă_n·M^{⊗n}·Ă_n = perm(M)·Ă_n, evaluated on the image vector
/// Ă_n·e_{(1,…,n)}.
pub fn permanent_via_wedge(m: &[Vec<BigRational>]) -> Result<BigRational> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("permanent needs a non-empty square matrix".into()));
    }
    if n > 6 {
        return Err(Error::Guard(format!("permanent_via_wedge supports n ≤ 6, got {n}")));
    }
    let a: SparseTensor<BigRational> = antisymmetrizer(n, n, true)?;
    let base: Vec<usize> = (0..n).collect();
    let e = SparseTensor::from_entries(&vec![n; n], n, [(base, BigRational::one())])?;
    let mut w = a.compose(&e)?;
    let image = w.clone();
    for axis in 0..n {
        w = w.mode_product(axis, m)?;
    }
    let result = a.compose(&w)?;
    let (lin, v0) = image.linear_entries().next().ok_or_else(|| Error::Shape("empty image".into()))?;
    let c = result.matrix_entry(lin, 0) / v0;
    if result != image.scale(&c) {
        return invalid("Ă_n M^{⊗n} Ă_n is not proportional to Ă_n");
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition as P;
    use crate::scalar::q;
    use crate::QTensor;

    #[test]
    fn identity_strand_and_merge() {
        let t: QTensor = functor_t(&P::identity(1), 3).unwrap();
        assert_eq!(t, QTensor::identity(&[3]).unwrap());
        let m: QTensor = functor_t(&P::merge(), 2).unwrap();
        assert_eq!(m.shape(), &[2, 2, 2]);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let want = if i == j && j == k { 1 } else { 0 };
                    assert_eq!(m.value(&[k, i, j]), q(want, 1));
                }
            }
        }
    }

    #[test]
    fn worked_example_from_the_partition_section() {
        let p = P::parse("P(4,4){1 | 4 | 2 3' 4' | 3 2' | 1'}").unwrap();
        let n = 3;
        let t: QTensor = functor_t(&p, n).unwrap();
        let mut count = 0;
        for (idx, v) in t.entries() {
            let (j, i) = idx.split_at(4);
            assert_eq!(*v, q(1, 1));
            assert!(i[1] == j[2] && j[2] == j[3] && i[2] == j[1]);
            count += 1;
        }
        assert_eq!(count, 3usize.pow(5));
    }

    #[test]
    fn signs() {
        assert_eq!(sign_sigma(&[1, 2]), 1);
        assert_eq!(sign_sigma(&[2, 1]), -1);
        assert_eq!(sign_sigma(&[1, 1]), 1);
        assert_eq!(sign_sigma(&[3, 1, 2]), 1);
    }

    #[test]
    fn deformed_functor() {
        let t: QTensor = functor_t_deformed(&P::cross(), 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1 } else { -1 };
                assert_eq!(t.value(&[j, i, i, j]), q(want, 1));
            }
        }
        let cup: QTensor = functor_t_deformed(&P::cup(), 3).unwrap();
        assert_eq!(cup, functor_t(&P::cup(), 3).unwrap());
        assert!(functor_t_deformed::<BigRational>(&P::merge(), 3).is_err());
    }

    #[test]
    fn antisymmetrizer_values() {
        let a: QTensor = antisymmetrizer(2, 3, false).unwrap();
        assert_eq!(a.value(&[0, 1, 0, 1]), q(1, 2));
        assert_eq!(a.value(&[1, 0, 0, 1]), q(-1, 2));
        let d: QTensor = antisymmetrizer(2, 3, true).unwrap();
        assert_eq!(d.value(&[1, 0, 0, 1]), q(1, 2));
        for r in 0..9 {
            assert!(d.matrix_entry(r, 0).is_zero());
        }
    }

    #[test]
    fn antisymmetrizers_are_projections_of_binomial_rank() {
        for n in 1..=4 {
            for k in 0..=n {
                for deformed in [false, true] {
                    let a: QTensor = antisymmetrizer(k, n, deformed).unwrap();
                    assert_eq!(a.compose(&a).unwrap(), a);
                    assert_eq!(a.adjoint(), a);
                    let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                    assert_eq!(a.rank().unwrap(), binom, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn permanents() {
        let m = vec![vec![q(1, 1), q(2, 1)], vec![q(3, 1), q(4, 1)]];
        assert_eq!(permanent(&m).unwrap(), q(10, 1));
        assert_eq!(permanent_via_wedge(&m).unwrap(), q(10, 1));
        let id: Vec<Vec<BigRational>> =
            (0..4).map(|i| (0..4).map(|j| q((i == j) as i64, 1)).collect()).collect();
        assert_eq!(permanent_via_wedge(&id).unwrap(), q(1, 1));
        let perm: Vec<Vec<BigRational>> =
            (0..3).map(|i| (0..3).map(|j| q(((i + 1) % 3 == j) as i64, 1)).collect()).collect();
        assert_eq!(permanent_via_wedge(&perm).unwrap(), q(1, 1));
    }

    #[test]
    fn permutation_enumeration() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], (vec![0, 2, 1], -1));
        assert_eq!(p.iter().map(|x| x.1).sum::<i64>(), 0);
    }
}
