//! Cayley graphs of finite abelian groups, their character-basis spectra and the
//! Fourier transform that diagonalizes them.

use std::cmp::Ordering;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cyclotomic::Cyclotomic;
use crate::error::{invalid, Error, Result};
use crate::group::{AbelianGroup, GroupElement};
use crate::guard;
use crate::scalar::{Coeff, Scalar};
use crate::tensor::SparseTensor;

/// Generator set S ⊂ Γ with its derived flags.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingSet {
    elems: Vec<GroupElement>,
    symmetric: bool,
    generates: bool,
}

impl GeneratingSet {
    /// Validates and stores S; 0 ∈ S, duplicates and the empty set are rejected.
    pub fn new(group: &AbelianGroup, elems: Vec<GroupElement>) -> Result<Self> {
        if elems.is_empty() {
            return invalid("generating set is empty");
        }
        for s in &elems {
            group.validate(s)?;
            if s.degree() == 0 {
                return invalid("generating set contains the identity (loops are not allowed)");
            }
        }
        let mut sorted = elems.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("generating set contains duplicate elements");
        }
        let symmetric = elems.iter().all(|s| sorted.binary_search(&group.neg(s)).is_ok());
        let generates = group.generated_by(&elems);
        Ok(GeneratingSet { elems, symmetric, generates })
    }

    pub fn elems(&self) -> &[GroupElement] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// S = −S.
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }

    /// S generates the whole group.
    pub fn generates(&self) -> bool {
        self.generates
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CayleyGraph {
    group: AbelianGroup,
    gens: GeneratingSet,
}

/// One distinct eigenvalue with the character labels spanning its eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenspace<F: Coeff> {
    pub value: Cyclotomic<F>,
    pub labels: Vec<GroupElement>,
}

/// Distinct eigenvalues in canonical order (descending real part, then coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition<F: Coeff> {
    pub items: Vec<Eigenspace<F>>,
}

impl<F: Coeff> SpectralDecomposition<F> {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.items.iter().map(|e| e.labels.len()).collect()
    }

    pub fn values(&self) -> Vec<Cyclotomic<F>> {
        self.items.iter().map(|e| e.value.clone()).collect()
    }

    /// Index of the eigenspace containing `label`.
    pub fn position_of(&self, label: &GroupElement) -> Option<usize> {
        self.items.iter().position(|e| e.labels.contains(label))
    }

    /// Union of the labels of the selected eigenspaces, in selection order.
    pub fn select(&self, which: &[usize]) -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        for &k in which {
            let space = self.items.get(k).ok_or_else(|| {
                Error::InvalidInput(format!("V{k} does not exist ({} eigenspaces)", self.items.len()))
            })?;
            out.extend(space.labels.iter().cloned());
        }
        Ok(out)
    }
}

impl CayleyGraph {
    pub fn new(group: AbelianGroup, gens: GeneratingSet) -> Result<Self> {
        guard::check_group_order(group.size())?;
        for s in gens.elems() {
            group.validate(s)?;
        }
        Ok(CayleyGraph { group, gens })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn gens(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn size(&self) -> usize {
        self.group.size() as usize
    }

    /// Non-fatal remarks about the input (disconnected or directed graph).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.gens.generates() {
            w.push("generating set does not generate the group; the graph is disconnected".into());
        }
        if !self.gens.symmetric() {
            w.push("generating set is not closed under negation; the graph is directed".into());
        }
        w
    }

    /// Adjacency matrix with A[β][α] = 1 iff β − α ∈ S (rows are β).
    pub fn adjacency<S: Scalar>(&self) -> Result<SparseTensor<S>> {
        let n = self.size();
        let mut entries = Vec::with_capacity(n * self.gens.len());
        for alpha in self.group.elements() {
            let a = self.group.index_of(&alpha);
            for s in self.gens.elems() {
                let b = self.group.index_of(&self.group.add(&alpha, s));
                entries.push((vec![b, a], S::one()));
            }
        }
        SparseTensor::from_entries(&[n, n], 1, entries)
    }

    pub fn edge_count(&self) -> usize {
        let arcs = self.size() * self.gens.len();
        if self.gens.symmetric() {
            arcs / 2
        } else {
            arcs
        }
    }

    /// λ_μ = Σ_{θ∈S} τ_μ(−θ).
    pub fn eigenvalue<F: Coeff>(&self, mu: &GroupElement) -> Result<Cyclotomic<F>> {
        self.group.validate(mu)?;
        let m = self.group.exponent();
        let terms: Vec<(i64, F)> = self
            .gens
            .elems()
            .iter()
            .map(|s| (self.group.char_exponent(mu, &self.group.neg(s)) as i64, F::one()))
            .collect();
        Ok(Cyclotomic::from_exponents(m, &terms))
    }

    /// Eigenvalues grouped by exact equality, canonically ordered.
    pub fn spectrum<F: Coeff>(&self) -> Result<SpectralDecomposition<F>> {
        let labels: Vec<GroupElement> = self.group.elements().collect();
        let values: Vec<Cyclotomic<F>> =
            labels.par_iter().map(|mu| self.eigenvalue(mu)).collect::<Result<_>>()?;
        let mut items: Vec<Eigenspace<F>> = Vec::new();
        for (mu, v) in labels.into_iter().zip(values) {
            match items.iter_mut().find(|e| e.value == v) {
                Some(e) => e.labels.push(mu),
                None => items.push(Eigenspace { value: v, labels: vec![mu] }),
            }
        }
        items.sort_by(|a, b| a.value.canonical_cmp(&b.value));
        Ok(SpectralDecomposition { items })
    }

    pub fn spectrum_json<F: Coeff>(&self, spec: &SpectralDecomposition<F>) -> Value {
        json!({
            "group": self.group.to_json(),
            "gens": self.gens.elems().iter().map(GroupElement::to_json).collect::<Vec<_>>(),
            "symmetric": self.gens.symmetric(),
            "eigenvalues": spec.items.iter().map(|e| json!({
                "value": e.value.to_json(),
                "multiplicity": e.labels.len(),
                "labels": e.labels.iter().map(GroupElement::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    /// True iff the vertex permutation commutes with the adjacency matrix.
    pub fn is_automorphism(&self, perm: &[usize]) -> Result<bool> {
        check_permutation(perm, self.size())?;
        for alpha in self.group.elements() {
            let a = self.group.index_of(&alpha);
            for s in self.gens.elems() {
                let b = self.group.index_of(&self.group.add(&alpha, s));
                let diff = self
                    .group
                    .sub(&self.group.element_at(perm[b]), &self.group.element_at(perm[a]));
                if !self.gens.elems().contains(&diff) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Fails unless `perm` is a bijection of 0..n.
pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return invalid(format!("permutation has length {}, expected {n}", perm.len()));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return invalid("vertex map is not a bijection");
        }
    }
    Ok(())
}

/// Permutation matrix P with P[perm(α)][α] = 1.
pub fn perm_matrix<S: Scalar>(perm: &[usize]) -> Result<SparseTensor<S>> {
    let n = perm.len();
    check_permutation(perm, n)?;
    SparseTensor::from_entries(&[n, n], 1, perm.iter().enumerate().map(|(a, &b)| (vec![b, a], S::one())))
}

/// Fourier matrix F[α][μ] = τ_μ(α) of the group (dense, guarded).
pub fn fourier_matrix<F: Coeff>(group: &AbelianGroup) -> Result<SparseTensor<Cyclotomic<F>>> {
    guard::check_group_order(group.size())?;
    let n = group.size() as usize;
    guard::check_dense("Fourier matrix", (n as u64) * (n as u64))?;
    let m = group.exponent();
    let mut entries = Vec::with_capacity(n * n);
    for alpha in group.elements() {
        let a = group.index_of(&alpha);
        for mu in group.elements() {
            let e = group.char_exponent(&mu, &alpha) as i64;
            entries.push((vec![a, group.index_of(&mu)], Cyclotomic::root(m, e)));
        }
    }
    SparseTensor::from_entries(&[n, n], 1, entries)
}

type Block<F> = Vec<Vec<Cyclotomic<F>>>;

/// Per-factor Fourier blocks: F_i[α][μ] = ζ_M^{(M/m_i)αμ} and (F_i)^{-1} = F_i*/m_i.
pub(crate) fn factor_blocks<F: Coeff>(group: &AbelianGroup) -> Vec<(Block<F>, Block<F>)> {
    let m = group.exponent();
    group
        .orders()
        .iter()
        .map(|&mi| {
            let step = (m / mi) as i64;
            let fwd: Vec<Vec<Cyclotomic<F>>> = (0..mi as i64)
                .map(|a| (0..mi as i64).map(|u| Cyclotomic::root(m, step * a * u)).collect())
                .collect();
            let scale = Cyclotomic::from_coeff_at(m, F::from_rational(&crate::scalar::q(1, mi as i64)));
            let inv = (0..mi as i64)
                .map(|u| (0..mi as i64).map(|a| &Cyclotomic::root(m, -step * a * u) * &scale).collect())
                .collect();
            (fwd, inv)
        })
        .collect()
}

/// Which Fourier factor to apply on an axis of size N.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// Contract with F: values indexed by α become indexed by μ via Σ_α F[α][μ]·x_α.
    Forward,
    /// Contract with F^{-1} = F*/N.
    Inverse,
}

/// Applies the Fourier transform on the listed axes (each of size N) by factorized mode
/// products, one cyclic factor at a time.
pub fn transform_axes<F: Coeff>(
    group: &AbelianGroup,
    t: &SparseTensor<Cyclotomic<F>>,
    axes: &[(usize, Transform)],
) -> Result<SparseTensor<Cyclotomic<F>>> {
    let n = group.size() as usize;
    for &(a, _) in axes {
        if t.shape().get(a) != Some(&n) {
            return Err(Error::Shape(format!("axis {a} of {:?} is not of size {n}", t.shape())));
        }
    }
    let blocks = factor_blocks::<F>(group);
    // split every axis of size N into the cyclic factor axes
    let mut fine_shape = Vec::new();
    let mut offsets = Vec::new();
    let mut fine_out = 0;
    for (i, &d) in t.shape().iter().enumerate() {
        offsets.push(fine_shape.len());
        if axes.iter().any(|&(a, _)| a == i) {
            fine_shape.extend(group.orders().iter().map(|&m| m as usize));
        } else {
            fine_shape.push(d);
        }
        if i + 1 == t.out_axes() {
            fine_out = fine_shape.len();
        }
    }
    let mut cur = t.reshape(&fine_shape, fine_out)?;
    for &(a, kind) in axes {
        for (f, (fwd, inv)) in blocks.iter().enumerate() {
            // F_i is symmetric, so contracting its column index equals using it as rows
            let mat = match kind {
                Transform::Forward => fwd,
                Transform::Inverse => inv,
            };
            cur = cur.mode_product(offsets[a] + f, mat)?;
        }
    }
    cur.reshape(t.shape(), t.out_axes())
}

/// (1/N)·F*·X·F for a square N×N operator X.
pub fn conjugate_by_fourier<F: Coeff>(
    group: &AbelianGroup,
    x: &SparseTensor<Cyclotomic<F>>,
) -> Result<SparseTensor<Cyclotomic<F>>> {
    let n = group.size() as usize;
    if x.shape() != [n, n] || x.out_axes() != 1 {
        return Err(Error::Shape(format!("expected a {n}×{n} operator, got shape {:?}", x.shape())));
    }
    transform_axes(group, x, &[(0, Transform::Inverse), (1, Transform::Forward)])
}

/// Presentation order for Z_2^n labels: by degree, then descending lexicographic.
pub fn degree_major_order(group: &AbelianGroup) -> Vec<GroupElement> {
    let mut all: Vec<GroupElement> = group.elements().collect();
    all.sort_by(|a, b| match a.degree().cmp(&b.degree()) {
        Ordering::Equal => b.cmp(a),
        o => o,
    });
    all
}

/// Adjacency matrix of the Cartesian product Σ_i I⊗⋯⊗A_i⊗⋯⊗I (row-major vertex order).
pub fn cartesian_adjacency<S: Scalar>(graphs: &[CayleyGraph]) -> Result<SparseTensor<S>> {
    if graphs.is_empty() {
        return invalid("Cartesian product of no graphs");
    }
    let adjs: Vec<SparseTensor<S>> = graphs.iter().map(|g| g.adjacency()).collect::<Result<_>>()?;
    let total: u64 = graphs.iter().map(|g| g.size() as u64).product();
    guard::check_group_order(total)?;
    let mut sum: Option<SparseTensor<S>> = None;
    for i in 0..graphs.len() {
        let mut term = SparseTensor::<S>::scalar(S::one());
        for (j, g) in graphs.iter().enumerate() {
            let factor = if i == j { adjs[j].clone() } else { SparseTensor::identity(&[g.size()])? };
            term = term.kron(&factor)?;
        }
        sum = Some(match sum {
            None => term,
            Some(s) => s.add(&term)?,
        });
    }
    let a = sum.expect("non-empty");
    let n = total as usize;
    a.reshape(&[n, n], 1)
}

/// Diagonal of F^{-1}AF as a list matched to the labels, if it is diagonal.
pub fn fourier_diagonal<F: Coeff>(graph: &CayleyGraph) -> Result<Option<Vec<Cyclotomic<F>>>> {
    let a: SparseTensor<Cyclotomic<F>> = graph.adjacency()?;
    let hat = conjugate_by_fourier(graph.group(), &a)?;
    Ok(hat.diagonal())
}

/// Column vector of character values τ_μ(α), indexed by α.
pub fn character_vector<F: Coeff>(group: &AbelianGroup, mu: &GroupElement) -> Vec<Cyclotomic<F>> {
    let m = group.exponent();
    group.elements().map(|a| Cyclotomic::root(m, group.char_exponent(mu, &a) as i64)).collect()
}

/// Checks A·τ_μ = λ_μ·τ_μ exactly for one label.
pub fn is_eigenvector<F: Coeff>(graph: &CayleyGraph, mu: &GroupElement) -> Result<bool> {
    let g = graph.group();
    let tau = character_vector::<F>(g, mu);
    let lambda = graph.eigenvalue::<F>(mu)?;
    for beta in g.elements() {
        let mut acc = Cyclotomic::<F>::zero();
        for s in graph.gens().elems() {
            acc = &acc + &tau[g.index_of(&g.sub(&beta, s))];
        }
        if acc != &lambda * &tau[g.index_of(&beta)] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::{Cyclo, Tensor};
    use num_rational::BigRational;

    fn graph(orders: &[u64], gens: &[&[i64]]) -> CayleyGraph {
        let g = AbelianGroup::new(orders).unwrap();
        let s = gens.iter().map(|c| g.element(c).unwrap()).collect();
        CayleyGraph::new(g.clone(), GeneratingSet::new(&g, s).unwrap()).unwrap()
    }

    fn int(v: i64) -> Cyclo {
        Cyclo::from_rational_at(1, q(v, 1))
    }

    #[test]
    fn generating_set_validation() {
        let g = AbelianGroup::new(&[4]).unwrap();
        assert!(GeneratingSet::new(&g, vec![]).is_err());
        assert!(GeneratingSet::new(&g, vec![GroupElement(vec![0])]).is_err());
        assert!(GeneratingSet::new(&g, vec![GroupElement(vec![1]), GroupElement(vec![1])]).is_err());
        let s = GeneratingSet::new(&g, vec![GroupElement(vec![1])]).unwrap();
        assert!(!s.symmetric() && s.generates());
        let s = GeneratingSet::new(&g, vec![GroupElement(vec![2])]).unwrap();
        assert!(s.symmetric() && !s.generates());
    }

    #[test]
    fn cube_edges_and_regularity() {
        let q3 = graph(&[2, 2, 2], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(q3.edge_count(), 12);
        let a: Tensor = q3.adjacency().unwrap();
        assert_eq!(a.nnz(), 24);
        assert_eq!(a.adjoint(), a);
        assert!(a.diagonal().is_none());
    }

    #[test]
    fn spot_eigenvalues() {
        let q3 = graph(&[2, 2, 2], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let v: Cyclo = q3.eigenvalue(&GroupElement(vec![1, 1, 0])).unwrap();
        assert_eq!(v, int(-1));
        let k4 = graph(&[4], &[&[1], &[2], &[3]]);
        assert_eq!(k4.eigenvalue::<BigRational>(&GroupElement(vec![0])).unwrap(), int(3));
    }

    #[test]
    fn cube_spectrum() {
        let q3 = graph(&[2, 2, 2], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let s = q3.spectrum::<BigRational>().unwrap();
        assert_eq!(s.values(), vec![int(3), int(1), int(-1), int(-3)]);
        assert_eq!(s.multiplicities(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn directed_cycle_has_complex_spectrum_in_canonical_order() {
        let c4 = graph(&[4], &[&[1]]);
        let s = c4.spectrum::<BigRational>().unwrap();
        // λ_μ = i^{−μ}: 1, −i, −1, i ordered by real part then coefficients
        assert_eq!(s.values(), vec![int(1), Cyclo::root(4, 3), Cyclo::root(4, 1), int(-1)]);
    }

    #[test]
    fn fourier_matrix_small_cases() {
        let z2 = AbelianGroup::new(&[2]).unwrap();
        let f: Tensor = fourier_matrix(&z2).unwrap();
        assert_eq!(f.to_dense().unwrap(), vec![vec![int(1), int(1)], vec![int(1), int(-1)]]);
        let g = AbelianGroup::power(2, 3).unwrap();
        let f: Tensor = fourier_matrix(&g).unwrap();
        assert_eq!(f.value(&[4, 4]), int(-1));
    }

    #[test]
    fn fourier_matrix_is_unitary_up_to_n() {
        for orders in [vec![3], vec![2, 3], vec![4, 2], vec![5], vec![2, 2, 2]] {
            let g = AbelianGroup::new(&orders).unwrap();
            let f: Tensor = fourier_matrix(&g).unwrap();
            let n = g.size() as usize;
            let prod = f.compose(&f.adjoint()).unwrap();
            let expected = Tensor::identity(&[n]).unwrap().scale(&int(n as i64));
            assert_eq!(prod, expected, "orders {orders:?}");
        }
    }

    #[test]
    fn factorized_conjugation_matches_dense_definition() {
        let g = AbelianGroup::new(&[3, 2]).unwrap();
        let c = graph(&[3, 2], &[&[1, 0], &[2, 0], &[0, 1], &[1, 1]]);
        let a: Tensor = c.adjacency().unwrap();
        let f: Tensor = fourier_matrix(&g).unwrap();
        let dense = f.adjoint().compose(&a).unwrap().compose(&f).unwrap().scale(&Cyclo::from_rational_at(1, q(1, 6)));
        assert_eq!(conjugate_by_fourier(&g, &a).unwrap(), dense);
        let id = Tensor::identity(&[6]).unwrap();
        assert_eq!(conjugate_by_fourier(&g, &id).unwrap(), id);
    }

    #[test]
    fn automorphism_checks() {
        let q3 = graph(&[2, 2, 2], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let g = q3.group().clone();
        let shift = g.element(&[1, 0, 1]).unwrap();
        let translation: Vec<usize> = g.elements().map(|a| g.index_of(&g.add(&a, &shift))).collect();
        assert!(q3.is_automorphism(&translation).unwrap());
        let swap: Vec<usize> =
            g.elements().map(|a| g.index_of(&GroupElement(vec![a.0[1], a.0[0], a.0[2]]))).collect();
        assert!(q3.is_automorphism(&swap).unwrap());
        // 3-cycle 0 → 3 → 1 → 0 on vertex indices, moving 0 to the degree-2 vertex (0,1,1)
        let mut bad: Vec<usize> = (0..8).collect();
        bad[0] = 3;
        bad[3] = 1;
        bad[1] = 0;
        assert!(!q3.is_automorphism(&bad).unwrap());
        assert!(q3.is_automorphism(&[0, 0, 1, 2, 3, 4, 5, 6]).is_err());
    }

    #[test]
    fn cartesian_products() {
        let k2 = graph(&[2], &[&[1]]);
        let q2 = graph(&[2, 2], &[&[1, 0], &[0, 1]]);
        let prod: Tensor = cartesian_adjacency(&[k2.clone(), k2.clone()]).unwrap();
        assert_eq!(prod, q2.adjacency().unwrap());
        let single: Tensor = cartesian_adjacency(&[k2.clone()]).unwrap();
        assert_eq!(single, k2.adjacency().unwrap());
        let k3 = graph(&[3], &[&[1], &[2]]);
        let h23 = graph(&[3, 3], &[&[1, 0], &[2, 0], &[0, 1], &[0, 2]]);
        let prod: Tensor = cartesian_adjacency(&[k3.clone(), k3]).unwrap();
        assert_eq!(prod, h23.adjacency().unwrap());
    }

    #[test]
    fn degree_major_cube_order() {
        let g = AbelianGroup::power(2, 3).unwrap();
        let order: Vec<Vec<u64>> = degree_major_order(&g).into_iter().map(|e| e.0).collect();
        assert_eq!(order[0], vec![0, 0, 0]);
        assert_eq!(order[1..4], [vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(order[7], vec![1, 1, 1]);
    }
}
