//! Fourier-transformed block intertwiners, eigenspace projections and intertwiner checks.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cayley::{transform_axes, CayleyGraph, SpectralDecomposition, Transform};
use crate::cyclotomic::Cyclotomic;
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};
use crate::guard;
use crate::partition::Partition;
use crate::scalar::{Coeff, Scalar};
use crate::tensor::SparseTensor;
use crate::{Cyclo, Tensor};

/// Closed form [T̂_{b_{k,l}}]^{ν}_{μ} = N^{1−l}·δ_{Σμ, Σν}, shape [N;l] ++ [N;k].
pub fn hat_block_intertwiner(g: &AbelianGroup, k: usize, l: usize) -> Result<Tensor> {
    if k + l == 0 {
        return invalid("block intertwiner needs k + l ≥ 1");
    }
    guard::check_group_order(g.size())?;
    let n = g.size() as usize;
    let count = guard::checked_pow("block intertwiner nonzeros", n as u64, k + l - 1)?;
    guard::check_sparse("block intertwiner", count)?;
    let scale = rational_power(g.size(), 1 - l as i64);
    let value = Cyclo::from_rational_at(1, scale);
    let mut entries = Vec::with_capacity(count as usize);
    // enumerate all axes but the last, which is then fixed by the sum constraint
    let free = k + l - 1;
    let mut idx = vec![0usize; free];
    for _ in 0..count {
        let elems: Vec<GroupElement> = idx.iter().map(|&i| g.element_at(i)).collect();
        let mut out_sum = g.zero();
        let mut in_sum = g.zero();
        for (a, e) in elems.iter().enumerate() {
            if a < l {
                out_sum = g.add(&out_sum, e);
            } else {
                in_sum = g.add(&in_sum, e);
            }
        }
        // last axis is an input when k ≥ 1, otherwise an output
        let last = if k >= 1 { g.sub(&out_sum, &in_sum) } else { g.sub(&in_sum, &out_sum) };
        let mut full = idx.clone();
        full.push(g.index_of(&last));
        entries.push((full, value.clone()));
        for v in idx.iter_mut().rev() {
            *v += 1;
            if *v < n {
                break;
            }
            *v = 0;
        }
    }
    SparseTensor::from_entries(&vec![n; k + l], l, entries)
}

/// N^e as an exact rational.
pub fn rational_power(n: u64, e: i64) -> BigRational {
    let b = BigRational::from_integer(n.into());
    if e >= 0 {
        num_traits::pow(b, e as usize)
    } else {
        num_traits::pow(b.recip(), (-e) as usize)
    }
}

/// F^{-1⊗l}·T·F^{⊗k} for a tensor with all axes of size N.
pub fn fourier_conjugate_tensor<F: Coeff>(
    g: &AbelianGroup,
    t: &SparseTensor<Cyclotomic<F>>,
) -> Result<SparseTensor<Cyclotomic<F>>> {
    let axes: Vec<(usize, Transform)> = (0..t.shape().len())
        .map(|a| (a, if a < t.out_axes() { Transform::Inverse } else { Transform::Forward }))
        .collect();
    transform_axes(g, t, &axes)
}

/// Selected character labels W and the unnormalized coisometry U^μ_α = conj τ_μ(α).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenprojectionBasis {
    group: AbelianGroup,
    /// Selected eigenspaces, each as its label list, in selection order.
    pub spaces: Vec<Vec<GroupElement>>,
    labels: Vec<GroupElement>,
}

impl EigenprojectionBasis {
    pub fn new(group: &AbelianGroup, spaces: Vec<Vec<GroupElement>>) -> Result<Self> {
        let labels: Vec<GroupElement> = spaces.iter().flatten().cloned().collect();
        if labels.is_empty() {
            return invalid("empty eigenspace selection");
        }
        for l in &labels {
            group.validate(l)?;
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("eigenspace selection repeats a label");
        }
        Ok(EigenprojectionBasis { group: group.clone(), spaces, labels })
    }

    /// Eigenspaces V_i chosen by index in the canonical order.
    pub fn from_spectrum<F: Coeff>(
        group: &AbelianGroup,
        spec: &SpectralDecomposition<F>,
        which: &[usize],
    ) -> Result<Self> {
        let spaces = which
            .iter()
            .map(|&i| {
                spec.items.get(i).map(|e| e.labels.clone()).ok_or_else(|| {
                    Error::InvalidInput(format!("V{i} does not exist ({} eigenspaces)", spec.items.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, spaces)
    }

    /// All labels in enumeration order (projection onto the whole space).
    pub fn full(group: &AbelianGroup) -> Self {
        let labels: Vec<GroupElement> = group.elements().collect();
        EigenprojectionBasis { group: group.clone(), spaces: vec![labels.clone()], labels }
    }

    pub fn labels(&self) -> &[GroupElement] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// U·U* = scale·I.
    pub fn scale(&self) -> u64 {
        self.group.size()
    }

    /// U as |W| rows of length N.
    pub fn matrix<F: Coeff>(&self) -> Vec<Vec<Cyclotomic<F>>> {
        let m = self.group.exponent();
        self.labels
            .iter()
            .map(|mu| {
                self.group
                    .elements()
                    .map(|a| Cyclotomic::root(m, -(self.group.char_exponent(mu, &a) as i64)))
                    .collect()
            })
            .collect()
    }
}

/// Parses "V1", "V1+V3" or "V1+Vn" (n = rank of the group) into eigenspace indices.
pub fn parse_selection(text: &str, rank: usize) -> Result<Vec<usize>> {
    text.split('+')
        .map(|part| {
            let p = part.trim();
            let body = p
                .strip_prefix('V')
                .ok_or_else(|| Error::InvalidInput(format!("eigenspace selector {p:?} must look like V<k>")))?;
            if body == "n" {
                return Ok(rank);
            }
            body.parse().map_err(|_| Error::InvalidInput(format!("eigenspace selector {p:?} must look like V<k>")))
        })
        .collect()
}

/// N^{−l}·U_out^{⊗l}·T·U_in^{*⊗k}: the restriction of F^{-1⊗l}·T·F^{⊗k} to the selected labels.
pub fn project<F: Coeff>(
    t: &SparseTensor<Cyclotomic<F>>,
    out: &EigenprojectionBasis,
    inn: &EigenprojectionBasis,
) -> Result<SparseTensor<Cyclotomic<F>>> {
    let n = out.group.size() as usize;
    if inn.group != out.group {
        return Err(Error::Shape("projection bases belong to different groups".into()));
    }
    if t.shape().iter().any(|&d| d != n) {
        return Err(Error::Shape(format!("tensor shape {:?} is not a power of N = {n}", t.shape())));
    }
    let u_out = out.matrix::<F>();
    let inv_n = Cyclotomic::from_coeff_at(1, F::from_rational(&BigRational::new(1.into(), (n as i64).into())));
    let u_out: Vec<Vec<Cyclotomic<F>>> =
        u_out.iter().map(|r| r.iter().map(|x| x * &inv_n).collect()).collect();
    let u_in_conj: Vec<Vec<Cyclotomic<F>>> =
        inn.matrix::<F>().iter().map(|r| r.iter().map(Cyclotomic::conjugate).collect()).collect();
    let mut cur = t.clone();
    for a in 0..t.shape().len() {
        let m = if a < t.out_axes() { &u_out } else { &u_in_conj };
        cur = cur.mode_product(a, m)?;
    }
    Ok(cur)
}

/// T·(⊗ reps_in) == (⊗ reps_out)·T, with one square matrix per axis.
pub fn check_intertwiner<S: Scalar>(
    t: &SparseTensor<S>,
    reps_out: &[SparseTensor<S>],
    reps_in: &[SparseTensor<S>],
) -> Result<bool> {
    if reps_out.len() != t.out_axes() || reps_in.len() != t.in_axes() {
        return Err(Error::Shape(format!(
            "need {} output and {} input matrices, got {} and {}",
            t.out_axes(),
            t.in_axes(),
            reps_out.len(),
            reps_in.len()
        )));
    }
    let mut left = t.clone();
    let mut right = t.clone();
    for (a, u) in reps_out.iter().chain(reps_in).enumerate() {
        let d = t.shape()[a];
        if u.shape() != [d, d] {
            return Err(Error::Shape(format!("matrix for axis {a} has shape {:?}, expected {d}×{d}", u.shape())));
        }
        let dense = u.to_dense()?;
        if a < t.out_axes() {
            right = right.mode_product(a, &dense)?;
        } else {
            // (T·u)[…, b] = Σ_a T[…, a]·u[a][b], i.e. the mode product with uᵀ
            let transposed: Vec<Vec<S>> = (0..d).map(|b| (0..d).map(|c| dense[c][b].clone()).collect()).collect();
            left = left.mode_product(a, &transposed)?;
        }
    }
    Ok(left == right)
}

/// True iff F^{-1}·P·F has no entry between labels of distinct eigenvalues.
pub fn preserves_eigenspaces(graph: &CayleyGraph, spec: &SpectralDecomposition<BigRational>, perm: &[usize]) -> Result<bool> {
    let g = graph.group();
    let p: Tensor = crate::cayley::perm_matrix(perm)?;
    let hat = crate::cayley::conjugate_by_fourier(g, &p)?;
    let mut which = vec![0usize; g.size() as usize];
    for (i, e) in spec.items.iter().enumerate() {
        for l in &e.labels {
            which[g.index_of(l)] = i;
        }
    }
    let n = g.size();
    let ok = hat.linear_entries().all(|(k, _)| which[(k / n) as usize] == which[(k % n) as usize]);
    Ok(ok)
}

/// Integer-valued tensor of given shape from an indicator predicate on index tuples, times c.
pub fn indicator_tensor(
    shape: &[usize],
    out_axes: usize,
    c: &BigRational,
    pred: impl Fn(&[usize]) -> bool,
) -> Result<Tensor> {
    let total = shape.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d as u64));
    let total = total.ok_or_else(|| Error::Guard("indicator index space overflows".into()))?;
    guard::check_dense("indicator tensor", total)?;
    let value = Cyclo::from_rational_at(1, c.clone());
    let mut entries = Vec::new();
    let mut idx = vec![0usize; shape.len()];
    for _ in 0..total {
        if pred(&idx) {
            entries.push((idx.clone(), value.clone()));
        }
        for (v, &d) in idx.iter_mut().zip(shape).rev() {
            *v += 1;
            if *v < d {
                break;
            }
            *v = 0;
        }
    }
    SparseTensor::from_entries(shape, out_axes, entries)
}

/// T_p at dimension N with cyclotomic entries.
pub fn functor_tensor(p: &Partition, n: usize) -> Result<Tensor> {
    crate::functor::functor_t(p, n)
}

pub fn one_over(n: u64) -> BigRational {
    BigRational::one() / BigRational::from_integer(n.into())
}

pub fn is_zero_tensor(t: &Tensor) -> bool {
    t.linear_entries().all(|(_, v)| v.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::family;
    use crate::scalar::q;

    fn brute(g: &AbelianGroup, k: usize, l: usize) -> Tensor {
        let t = functor_tensor(&Partition::block(k, l), g.size() as usize).unwrap();
        fourier_conjugate_tensor(g, &t).unwrap()
    }

    #[test]
    fn closed_form_small_cases() {
        let g = AbelianGroup::new(&[5]).unwrap();
        assert_eq!(hat_block_intertwiner(&g, 1, 1).unwrap(), Tensor::identity(&[5]).unwrap());
        let z22 = AbelianGroup::power(2, 2).unwrap();
        let t = hat_block_intertwiner(&z22, 2, 1).unwrap();
        assert_eq!(t.nnz(), 16);
        assert_eq!(t.value(&[3, 1, 2]), Cyclo::from_rational_at(1, q(1, 1)));
        assert_eq!(t.value(&[0, 1, 2]), Cyclo::from_rational_at(1, q(0, 1)));
        let t = hat_block_intertwiner(&z22, 1, 2).unwrap();
        assert_eq!(t.value(&[1, 2, 3]), Cyclo::from_rational_at(1, q(1, 4)));
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for orders in [vec![2], vec![3], vec![2, 2], vec![4], vec![2, 3]] {
            let g = AbelianGroup::new(&orders).unwrap();
            for (k, l) in [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 0), (0, 2), (2, 2), (3, 1), (0, 3)] {
                assert_eq!(hat_block_intertwiner(&g, k, l).unwrap(), brute(&g, k, l), "{orders:?} ({k},{l})");
            }
        }
    }

    #[test]
    fn full_projection_is_fourier_conjugation() {
        let g = AbelianGroup::new(&[3, 2]).unwrap();
        let t = functor_tensor(&Partition::merge(), 6).unwrap();
        let full = EigenprojectionBasis::full(&g);
        assert_eq!(project(&t, &full, &full).unwrap(), fourier_conjugate_tensor(&g, &t).unwrap());
        assert_eq!(full.scale(), 6);
    }

    #[test]
    fn coisometry_scale() {
        let q3 = family("hypercube:3").unwrap();
        let spec = q3.spectrum::<BigRational>().unwrap();
        let b = EigenprojectionBasis::from_spectrum(q3.group(), &spec, &[1]).unwrap();
        let u = Tensor::from_rows(&b.matrix::<BigRational>()).unwrap();
        let uu = u.compose(&u.adjoint()).unwrap();
        assert_eq!(uu, Tensor::identity(&[3]).unwrap().scale(&Cyclo::from_rational_at(1, q(8, 1))));
    }

    #[test]
    fn selections() {
        assert_eq!(parse_selection("V1", 4).unwrap(), vec![1]);
        assert_eq!(parse_selection("V1+Vn", 4).unwrap(), vec![1, 4]);
        assert!(parse_selection("W1", 4).is_err());
    }

    #[test]
    fn automorphism_intertwines_adjacency() {
        let q3 = family("hypercube:3").unwrap();
        let g = q3.group().clone();
        let swap: Vec<usize> =
            g.elements().map(|a| g.index_of(&GroupElement(vec![a.0[1], a.0[0], a.0[2]]))).collect();
        let p: Tensor = crate::cayley::perm_matrix(&swap).unwrap();
        let a: Tensor = q3.adjacency().unwrap();
        assert!(check_intertwiner(&a, &[p.clone()], &[p.clone()]).unwrap());
        let spec = q3.spectrum::<BigRational>().unwrap();
        assert!(preserves_eigenspaces(&q3, &spec, &swap).unwrap());
        let bad: Vec<usize> = vec![3, 0, 2, 1, 4, 5, 6, 7];
        let pb: Tensor = crate::cayley::perm_matrix(&bad).unwrap();
        assert!(!check_intertwiner(&a, &[pb.clone()], &[pb]).unwrap());
        assert!(!preserves_eigenspaces(&q3, &spec, &bad).unwrap());
    }
}
