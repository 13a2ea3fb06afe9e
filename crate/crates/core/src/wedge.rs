//! Tensor oracle for expressions built from antisymmetrized two-points.
//!
//! A tensor antisymmetric in every two-point (axes 2t, 2t+1 of each row) is determined by its
//! entries with strictly increasing two-point indices. Values here are kept in that restricted
//! form, which is 2^(points/2) times smaller than the full tensor. An expression qualifies when
//! every subterm commutes with the antisymmetrizers; anything else is reported as unsupported
//! and left to the full oracle.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;

use crate::dsl::{apply_in, apply_out, identity_width, names_in, tensor_factors, Binary, Builtin, Expr, ExprKind, TensorEnv, Unary};
use crate::error::{Error, Result};
use crate::functor::axis_labels;
use crate::guard;
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::tensor::SparseTensor;

/// Restricted value of Å·T·Å together with whether T itself absorbs Å on each side.
#[derive(Clone, Debug, PartialEq)]
pub struct Wedge<S> {
    pub t: SparseTensor<S>,
    pub anti_out: bool,
    pub anti_in: bool,
}

impl<S: Scalar> Wedge<S> {
    /// True when the restricted form determines the full tensor.
    pub fn is_antisymmetric(&self) -> bool {
        self.anti_out && self.anti_in
    }
}

pub type WedgeEnv<S> = BTreeMap<String, Wedge<S>>;

fn power_of_two<S: Scalar>(e: usize) -> S {
    S::from_rational(&BigRational::from_integer(num_bigint::BigInt::from(2).pow(e as u32)))
}

/// Entries of Å·T·Å at strictly increasing two-point indices, from a full tensor T.
pub fn restrict<S: Scalar>(t: &SparseTensor<S>) -> Result<SparseTensor<S>> {
    let r = t.shape().len();
    if t.out_axes() % 2 == 1 || r % 2 == 1 {
        return Err(Error::Arity("two-point restriction needs even rows".into()));
    }
    let half = S::from_rational(&BigRational::new(1.into(), 2.into()));
    let scale = (0..r / 2).fold(S::one(), |acc, _| acc * half.clone());
    let mut acc: BTreeMap<Vec<usize>, S> = BTreeMap::new();
    'entries: for (mut idx, v) in t.entries() {
        let mut negate = false;
        for p in 0..r / 2 {
            let (a, b) = (idx[2 * p], idx[2 * p + 1]);
            if a == b {
                continue 'entries;
            }
            if a > b {
                idx.swap(2 * p, 2 * p + 1);
                negate = !negate;
            }
        }
        let c = if negate { -v.clone() } else { v.clone() };
        match acc.get_mut(&idx) {
            Some(slot) => slot.add_assign_ref(&c),
            None => {
                acc.insert(idx, c);
            }
        }
    }
    let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v * scale.clone()));
    SparseTensor::from_entries(t.shape(), t.out_axes(), entries)
}

/// restrict(T_p) straight from the block assignments of p, without building T_p.
pub fn restricted_functor<S: Scalar>(p: &Partition, n: usize) -> Result<SparseTensor<S>> {
    let (k, l) = p.arity();
    if k % 2 == 1 || l % 2 == 1 {
        return Err(Error::Arity("two-point restriction needs even rows".into()));
    }
    let axes = axis_labels(p);
    let blocks = p.block_count();
    let count = guard::checked_pow("T_p nonzeros", n as u64, blocks)?;
    guard::check_sparse("T_p", count)?;
    guard::checked_pow("T_p index space", n as u64, k + l)?;
    let mut acc: HashMap<u64, i64> = HashMap::new();
    let mut values = vec![0usize; blocks];
    let mut idx = vec![0usize; k + l];
    'assignments: for step in 0..count {
        if step > 0 {
            for v in values.iter_mut().rev() {
                *v += 1;
                if *v < n {
                    break;
                }
                *v = 0;
            }
        }
        for (slot, &b) in idx.iter_mut().zip(&axes) {
            *slot = values[b];
        }
        let mut sign = 1;
        for pair in idx.chunks_exact_mut(2) {
            match pair[0].cmp(&pair[1]) {
                std::cmp::Ordering::Equal => continue 'assignments,
                std::cmp::Ordering::Greater => {
                    pair.swap(0, 1);
                    sign = -sign;
                }
                std::cmp::Ordering::Less => {}
            }
        }
        let lin = idx.iter().fold(0u64, |a, &i| a * n as u64 + i as u64);
        *acc.entry(lin).or_insert(0) += sign;
    }
    let denom = BigRational::from_integer(num_bigint::BigInt::from(2).pow(((k + l) / 2) as u32));
    let entries: BTreeMap<u64, S> = acc
        .into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|(lin, c)| (lin, S::from_rational(&(BigRational::from_integer(c.into()) / &denom))))
        .collect();
    Ok(SparseTensor::from_map(vec![n; k + l], l, entries))
}

/// A permutation partition that maps two-points onto two-points.
fn permutes_two_points(p: &Partition) -> bool {
    let (k, l) = p.arity();
    if k != l || k % 2 == 1 || !p.block_sizes().iter().all(|&s| s == 2) {
        return false;
    }
    let labels = p.labels();
    let mut perm = vec![usize::MAX; k];
    for (i, slot) in perm.iter_mut().enumerate() {
        match (0..l).find(|&j| labels[k + j] == labels[i]) {
            Some(j) => *slot = j,
            None => return false,
        }
    }
    (0..k / 2).all(|t| perm[2 * t] / 2 == perm[2 * t + 1] / 2)
}

fn closed_atom<S: Scalar>(p: &Partition, n: usize) -> Result<Option<Wedge<S>>> {
    if !permutes_two_points(p) {
        return Ok(None);
    }
    Ok(Some(Wedge { t: restricted_functor(p, n)?, anti_out: false, anti_in: false }))
}

/// Å·T·Å for an arbitrary subterm, through the full tensor oracle.
fn antisymmetrized_full<S: Scalar>(e: &Expr, env: &WedgeEnv<S>, n: usize) -> Result<Option<Wedge<S>>> {
    let t = match &e.kind {
        ExprKind::Literal(p) => restricted_functor(p, n)?,
        ExprKind::Builtin(b) => restricted_functor(&b.partition()?, n)?,
        _ => match eval_wedge(e, env, n)? {
            Some(w) => return Ok(Some(Wedge { anti_out: true, anti_in: true, ..w })),
            None => return Ok(None),
        },
    };
    Ok(Some(Wedge { t, anti_out: true, anti_in: true }))
}

fn compose<S: Scalar>(a: &Wedge<S>, b: &Wedge<S>) -> Result<Wedge<S>> {
    let t = a.t.compose(&b.t)?.scale(&power_of_two(a.t.in_axes() / 2));
    Ok(Wedge { t, anti_out: a.anti_out || b.anti_out, anti_in: b.anti_in || a.anti_in })
}

/// Body x of a factor asym(x) that is applied to its operand instead of being materialized:
/// a literal that mixes two-points, or a name-free composite.
pub fn deferred(f: &Expr) -> Option<&Expr> {
    let ExprKind::Unary(Unary::Asym, x) = &f.kind else { return None };
    let lazy = match &x.kind {
        ExprKind::Literal(p) => !permutes_two_points(p),
        ExprKind::Binary(Binary::Compose | Binary::Tensor, ..) => names_in(x).is_empty(),
        _ => false,
    };
    let (k, l) = crate::dsl::check(x, &crate::dsl::Env::new()).ok()?;
    (lazy && k % 2 == 0 && l % 2 == 0).then_some(x)
}

/// Full entries of Å·T·Å in the two-points of `axes` (pairs of axis positions), from entries
/// restricted there.
fn expand_pairs<S: Scalar>(t: &SparseTensor<S>, pairs: &[usize]) -> Result<SparseTensor<S>> {
    let mut out = Vec::with_capacity(t.nnz() << pairs.len());
    for (idx, v) in t.entries() {
        for mask in 0..1usize << pairs.len() {
            let mut j = idx.clone();
            let mut c = v.clone();
            for (bit, &a) in pairs.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    j.swap(a, a + 1);
                    c = -c;
                }
            }
            out.push((j, c));
        }
    }
    SparseTensor::from_entries(t.shape(), t.out_axes(), out)
}

/// Restriction in the two-points starting at the given axes only.
fn restrict_pairs<S: Scalar>(t: &SparseTensor<S>, pairs: &[usize]) -> Result<SparseTensor<S>> {
    let half = S::from_rational(&BigRational::new(1.into(), 2.into()));
    let scale = pairs.iter().fold(S::one(), |acc, _| acc * half.clone());
    let mut acc: BTreeMap<Vec<usize>, S> = BTreeMap::new();
    'entries: for (mut idx, v) in t.entries() {
        let mut negate = false;
        for &a in pairs {
            match idx[a].cmp(&idx[a + 1]) {
                std::cmp::Ordering::Equal => continue 'entries,
                std::cmp::Ordering::Greater => {
                    idx.swap(a, a + 1);
                    negate = !negate;
                }
                std::cmp::Ordering::Less => {}
            }
        }
        let c = if negate { -v.clone() } else { v.clone() };
        match acc.get_mut(&idx) {
            Some(slot) => slot.add_assign_ref(&c),
            None => {
                acc.insert(idx, c);
            }
        }
    }
    let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v * scale.clone()));
    SparseTensor::from_entries(t.shape(), t.out_axes(), entries)
}

/// Restricted value of (id ox Å·x·Å ox id) applied to a restricted operand at `offset`, on its
/// outputs or inputs. Returns the value and the number of points x leaves on that side.
fn apply_deferred<S: Scalar>(x: &Expr, acc: &SparseTensor<S>, offset: usize, outputs: bool, n: usize) -> Result<(SparseTensor<S>, usize)> {
    let (k, l) = crate::dsl::check(x, &crate::dsl::Env::new())?;
    let (consumed, produced) = if outputs { (k, l) } else { (l, k) };
    let (base, side) = if outputs { (0, acc.out_axes()) } else { (acc.out_axes(), acc.in_axes()) };
    if offset + consumed > side {
        return Err(Error::Arity(format!("{consumed} points at offset {offset} exceed a row of {side}")));
    }
    let pairs: Vec<usize> = (0..consumed / 2).map(|t| base + offset + 2 * t).collect();
    let full = expand_pairs(acc, &pairs)?;
    let env = TensorEnv::new();
    let t = if outputs { apply_out(x, full, offset, &env, n)? } else { apply_in(x, full, offset, &env, n)? };
    let base = if outputs { 0 } else { t.out_axes() };
    let pairs: Vec<usize> = (0..produced / 2).map(|t| base + offset + 2 * t).collect();
    Ok((restrict_pairs(&t, &pairs)?, produced))
}

/// Evaluates `e` at dimension n in restricted form; None when a subterm does not commute with Å.
pub fn eval_wedge<S: Scalar>(e: &Expr, env: &WedgeEnv<S>, n: usize) -> Result<Option<Wedge<S>>> {
    Ok(Some(match &e.kind {
        ExprKind::Literal(p) => match closed_atom(p, n)? {
            Some(w) => w,
            None => return Ok(None),
        },
        ExprKind::Builtin(Builtin::Pk(_)) => return Ok(None),
        ExprKind::Builtin(b) => match closed_atom(&b.partition()?, n)? {
            Some(w) => w,
            None => return Ok(None),
        },
        ExprKind::Name(name) => match env.get(name) {
            Some(w) => w.clone(),
            None => return Ok(None),
        },
        ExprKind::Scale(c, x) => match eval_wedge(x, env, n)? {
            Some(w) => Wedge { t: w.t.scale(&S::from_rational(&c.eval_int(n as i64))), ..w },
            None => return Ok(None),
        },
        ExprKind::Unary(Unary::Asym, x) => return antisymmetrized_full(x, env, n),
        ExprKind::Unary(Unary::Adj, x) => match eval_wedge(x, env, n)? {
            Some(w) => Wedge { t: w.t.adjoint(), anti_out: w.anti_in, anti_in: w.anti_out },
            None => return Ok(None),
        },
        ExprKind::Unary(Unary::Rot(..), _) => return Ok(None),
        ExprKind::Binary(Binary::Compose, a, b) => {
            let (fa, fb) = (tensor_factors(a), tensor_factors(b));
            let chained = |fs: &[&Expr]| fs.iter().any(|f| identity_width(f).is_some() || deferred(f).is_some());
            if chained(&fa) {
                let Some(mut acc) = eval_wedge(b, env, n)? else { return Ok(None) };
                let mut offset = 0;
                for f in fa {
                    if let Some(k) = identity_width(f) {
                        if k % 2 == 1 {
                            return Ok(None);
                        }
                        offset += k;
                        continue;
                    }
                    if let Some(x) = deferred(f) {
                        let (t, width) = apply_deferred(x, &acc.t, offset, true, n)?;
                        offset += width;
                        acc = Wedge { t, ..acc };
                        continue;
                    }
                    let Some(w) = eval_wedge(f, env, n)? else { return Ok(None) };
                    let t = acc.t.apply_on_outputs(offset, &w.t)?.scale(&power_of_two(w.t.in_axes() / 2));
                    offset += w.t.out_axes();
                    acc = Wedge { t, ..acc };
                }
                acc
            } else if chained(&fb) {
                let Some(mut acc) = eval_wedge(a, env, n)? else { return Ok(None) };
                let mut offset = 0;
                for f in fb {
                    if let Some(k) = identity_width(f) {
                        if k % 2 == 1 {
                            return Ok(None);
                        }
                        offset += k;
                        continue;
                    }
                    if let Some(x) = deferred(f) {
                        let (t, width) = apply_deferred(x, &acc.t, offset, false, n)?;
                        offset += width;
                        acc = Wedge { t, ..acc };
                        continue;
                    }
                    let Some(w) = eval_wedge(f, env, n)? else { return Ok(None) };
                    let t = acc.t.apply_on_inputs(offset, &w.t)?.scale(&power_of_two(w.t.out_axes() / 2));
                    offset += w.t.in_axes();
                    acc = Wedge { t, ..acc };
                }
                acc
            } else {
                let (Some(x), Some(y)) = (eval_wedge(a, env, n)?, eval_wedge(b, env, n)?) else { return Ok(None) };
                compose(&x, &y)?
            }
        }
        ExprKind::Binary(op, a, b) => {
            let (Some(x), Some(y)) = (eval_wedge(a, env, n)?, eval_wedge(b, env, n)?) else { return Ok(None) };
            match op {
                Binary::Tensor => Wedge {
                    t: x.t.kron(&y.t)?,
                    anti_out: x.anti_out && y.anti_out,
                    anti_in: x.anti_in && y.anti_in,
                },
                Binary::Add | Binary::Sub => {
                    let t = if *op == Binary::Add { x.t.add(&y.t)? } else { x.t.sub(&y.t)? };
                    Wedge { t, anti_out: x.anti_out && y.anti_out, anti_in: x.anti_in && y.anti_in }
                }
                Binary::Compose => unreachable!("handled above"),
            }
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{eval_tensor, parse, TensorEnv};
    use crate::functor::functor_t;
    use crate::scalar::HybridRational;
    use num_traits::Zero;

    fn both(text: &str, n: usize) -> (Option<Wedge<HybridRational>>, SparseTensor<HybridRational>) {
        let e = parse(text).unwrap();
        (eval_wedge(&e, &WedgeEnv::new(), n).unwrap(), eval_tensor(&e, &TensorEnv::new(), n).unwrap())
    }

    #[test]
    fn agrees_with_full_oracle() {
        for text in [
            "asym(pk(3))",
            "(id(2) ox asym(P(2,4){1 1' | 2 4' | 2' 3'})) * asym(pk(2))",
            "asym(P(4,4){1 1' | 2 3 | 2' 3' | 4 4'}) * asym(P(4,4){1 3' | 2 4' | 3 1' | 4 2'})",
            "(P(4,4){1 3' | 2 4' | 3 1' | 4 2'} ox id(2)) * asym(pk(3))",
            "adj(asym(pk(2)) ox asym(pk(1))) - scale(n, adj(asym(pk(3))))",
            "asym(pk(2)) * adj(asym(pk(2)))",
            "(asym(P(2,4){1 1' | 2 4' | 2' 3'}) ox id(2)) * asym(pk(2))",
            "adj(asym(pk(2))) * (id(2) ox asym(P(4,2){1 1' | 2 3 | 4 2'}))",
            "asym((id(1) ox cup ox id(1)) * (id(1) ox cap ox id(1))) * asym(pk(2))",
        ] {
            for n in [3, 4] {
                let (w, full) = both(text, n);
                let w = w.unwrap_or_else(|| panic!("{text} not closed"));
                assert!(w.is_antisymmetric(), "{text}");
                assert_eq!(w.t, restrict(&full).unwrap(), "{text} at {n}");
            }
        }
    }

    #[test]
    fn restricted_functor_matches_restriction() {
        for text in ["P(2,4){1 1' | 2 4' | 2' 3'}", "P(4,2){1 2 3 1' | 4 2'}", "P(0,6){1' 4' | 2' 3' | 5' 6'}"] {
            let p = Partition::parse(text).unwrap();
            for n in [1, 2, 3, 4] {
                let full = functor_t::<HybridRational>(&p, n).unwrap();
                assert_eq!(restricted_functor(&p, n).unwrap(), restrict(&full).unwrap(), "{text} at {n}");
            }
        }
    }

    #[test]
    fn unsupported_terms() {
        assert!(both("cap", 3).0.is_none());
        assert!(both("rotr(asym(pk(2)), lower)", 3).0.is_none());
        let (w, _) = both("P(4,4){1 3' | 2 4' | 3 1' | 4 2'}", 3);
        assert!(!w.unwrap().is_antisymmetric());
        assert!(both("P(4,4){1 2' | 2 3' | 3 4' | 4 1'}", 3).0.is_none());
    }

    #[test]
    fn restriction_drops_repeated_indices() {
        let t = functor_t::<HybridRational>(&Partition::identity(2), 3).unwrap();
        let r = restrict(&t).unwrap();
        assert_eq!(r.nnz(), 3);
        assert_eq!(r.value(&[0, 1, 0, 1]), HybridRational::from_rational(&BigRational::new(1.into(), 2.into())));
        assert!(r.value(&[0, 1, 1, 0]).is_zero());
    }
}
