//! Exact sparse multi-index arrays with an operator split (output axes first).
//!
//! Entries are keyed by the row-major linear index, so iteration order is lexicographic
//! in the index tuple. Absent entries are zero; stored entries are never zero.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::guard;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseTensor<S> {
    shape: Vec<usize>,
    out_axes: usize,
    entries: BTreeMap<u64, S>,
}

fn product(dims: &[usize]) -> Result<u64> {
    dims.iter().try_fold(1u64, |acc, &d| {
        acc.checked_mul(d as u64)
            .ok_or_else(|| Error::Guard(format!("index space {dims:?} overflows")))
    })
}

impl<S: Scalar> SparseTensor<S> {
    pub fn zeros(shape: &[usize], out_axes: usize) -> Result<Self> {
        if out_axes > shape.len() {
            return Err(Error::Shape(format!("{out_axes} output axes for shape {shape:?}")));
        }
        product(shape)?;
        Ok(SparseTensor { shape: shape.to_vec(), out_axes, entries: BTreeMap::new() })
    }

    /// Identity operator on the given axis dimensions.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        let mut shape = dims.to_vec();
        shape.extend_from_slice(dims);
        let mut t = Self::zeros(&shape, dims.len())?;
        let n = product(dims)?;
        guard::check_sparse("identity", n)?;
        for i in 0..n {
            t.entries.insert(i * n + i, S::one());
        }
        Ok(t)
    }

    /// Builds from (index tuple, value) pairs; repeated indices accumulate.
    pub fn from_entries<I>(shape: &[usize], out_axes: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, S)>,
    {
        let mut t = Self::zeros(shape, out_axes)?;
        for (idx, v) in entries {
            let lin = t.linear(&idx)?;
            t.add_at(lin, v);
        }
        Ok(t)
    }

    /// Square matrix from dense rows.
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        let mut t = Self::zeros(&[n, m], 1)?;
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                if !v.is_zero() {
                    t.entries.insert((i * m + j) as u64, v.clone());
                }
            }
        }
        Ok(t)
    }

    pub(crate) fn from_map(shape: Vec<usize>, out_axes: usize, entries: BTreeMap<u64, S>) -> Self {
        debug_assert!(entries.values().all(|v| !v.is_zero()));
        SparseTensor { shape, out_axes, entries }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn out_axes(&self) -> usize {
        self.out_axes
    }

    pub fn in_axes(&self) -> usize {
        self.shape.len() - self.out_axes
    }

    pub fn out_shape(&self) -> &[usize] {
        &self.shape[..self.out_axes]
    }

    pub fn in_shape(&self) -> &[usize] {
        &self.shape[self.out_axes..]
    }

    /// Number of rows of the operator (product of output dimensions).
    pub fn rows(&self) -> u64 {
        self.out_shape().iter().map(|&d| d as u64).product()
    }

    /// Number of columns of the operator (product of input dimensions).
    pub fn cols(&self) -> u64 {
        self.in_shape().iter().map(|&d| d as u64).product()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn linear(&self, idx: &[usize]) -> Result<u64> {
        if idx.len() != self.shape.len() {
            return Err(Error::Shape(format!("index {idx:?} for shape {:?}", self.shape)));
        }
        let mut lin = 0u64;
        for (&i, &d) in idx.iter().zip(&self.shape) {
            if i >= d {
                return Err(Error::Shape(format!("index {idx:?} out of bounds for {:?}", self.shape)));
            }
            lin = lin * d as u64 + i as u64;
        }
        Ok(lin)
    }

    pub fn unravel(&self, mut lin: u64) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, &d) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = (lin % d as u64) as usize;
            lin /= d as u64;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> Option<&S> {
        self.linear(idx).ok().and_then(|l| self.entries.get(&l))
    }

    /// Entry value with zero for absent indices.
    pub fn value(&self, idx: &[usize]) -> S {
        self.get(idx).cloned().unwrap_or_else(S::zero)
    }

    /// Matrix entry at (row, column) of the operator view.
    pub fn matrix_entry(&self, row: u64, col: u64) -> S {
        self.entries.get(&(row * self.cols() + col)).cloned().unwrap_or_else(S::zero)
    }

    pub fn linear_entries(&self) -> impl Iterator<Item = (u64, &S)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &S)> {
        self.entries.iter().map(move |(&k, v)| (self.unravel(k), v))
    }

    pub(crate) fn add_at(&mut self, lin: u64, v: S) {
        if v.is_zero() {
            return;
        }
        match self.entries.get_mut(&lin) {
            Some(slot) => {
                slot.add_assign_ref(&v);
                if slot.is_zero() {
                    self.entries.remove(&lin);
                }
            }
            None => {
                self.entries.insert(lin, v);
            }
        }
    }

    /// Adds `v` at the given index tuple.
    pub fn add_entry(&mut self, idx: &[usize], v: S) -> Result<()> {
        let lin = self.linear(idx)?;
        self.add_at(lin, v);
        Ok(())
    }

    /// Reinterprets the index space; the total size must be unchanged.
    pub fn reshape(&self, shape: &[usize], out_axes: usize) -> Result<Self> {
        if product(shape)? != product(&self.shape)? || out_axes > shape.len() {
            return Err(Error::Shape(format!("cannot reshape {:?} into {shape:?}", self.shape)));
        }
        Ok(SparseTensor { shape: shape.to_vec(), out_axes, entries: self.entries.clone() })
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseTensor<T> {
        let entries = self
            .entries
            .iter()
            .filter_map(|(&k, v)| {
                let w = f(v);
                (!w.is_zero()).then_some((k, w))
            })
            .collect();
        SparseTensor { shape: self.shape.clone(), out_axes: self.out_axes, entries }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| c.mul_ref(v))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.shape != other.shape || self.out_axes != other.out_axes {
            return Err(Error::Shape(format!(
                "{op} of {:?}/{} and {:?}/{}",
                self.shape, self.out_axes, other.shape, other.out_axes
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "sum")?;
        let mut out = self.clone();
        for (&k, v) in &other.entries {
            out.add_at(k, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Operator composition `self ∘ rhs` (rhs applied first).
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.in_shape() != rhs.out_shape() {
            return Err(Error::Shape(format!(
                "cannot compose input {:?} with output {:?}",
                self.in_shape(),
                rhs.out_shape()
            )));
        }
        let mid = self.cols();
        let cols = rhs.cols();
        let mut by_row: HashMap<u64, Vec<(u64, &S)>> = HashMap::new();
        for (&k, v) in &rhs.entries {
            by_row.entry(k / cols).or_default().push((k % cols, v));
        }
        // group left entries by output row; rows are independent
        let mut rows: Vec<(u64, Vec<(u64, &S)>)> = Vec::new();
        for (&k, v) in &self.entries {
            let (r, c) = (k / mid, k % mid);
            match rows.last_mut() {
                Some((row, list)) if *row == r => list.push((c, v)),
                _ => rows.push((r, vec![(c, v)])),
            }
        }
        let work: u64 = rows
            .iter()
            .flat_map(|(_, l)| l.iter().map(|(c, _)| by_row.get(c).map_or(0, Vec::len) as u64))
            .sum();
        guard::check_sparse("composition", work)?;
        let computed: Vec<Vec<(u64, S)>> = rows
            .par_iter()
            .map(|(r, list)| {
                let mut acc: BTreeMap<u64, S> = BTreeMap::new();
                for (c, a) in list {
                    if let Some(right) = by_row.get(c) {
                        for (j, b) in right {
                            let p = a.mul_ref(b);
                            match acc.get_mut(j) {
                                Some(slot) => slot.add_assign_ref(&p),
                                None => {
                                    acc.insert(*j, p);
                                }
                            }
                        }
                    }
                }
                acc.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (r * cols + j, v))
                    .collect()
            })
            .collect();
        let mut shape = self.out_shape().to_vec();
        shape.extend_from_slice(rhs.in_shape());
        let entries = computed.into_iter().flatten().collect();
        Ok(SparseTensor { shape, out_axes: self.out_axes, entries })
    }

    /// Operator tensor product: outputs and inputs are concatenated separately.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let total = (self.nnz() as u64).saturating_mul(rhs.nnz() as u64);
        guard::check_sparse("tensor product", total)?;
        let mut shape = self.out_shape().to_vec();
        shape.extend_from_slice(rhs.out_shape());
        shape.extend_from_slice(self.in_shape());
        shape.extend_from_slice(rhs.in_shape());
        product(&shape)?;
        let (ac, bc, br) = (self.cols(), rhs.cols(), rhs.rows());
        let cols = ac * bc;
        let mut entries = BTreeMap::new();
        for (&ka, va) in &self.entries {
            let (ra, ca) = (ka / ac, ka % ac);
            for (&kb, vb) in &rhs.entries {
                let (rb, cb) = (kb / bc, kb % bc);
                let row = ra * br + rb;
                let col = ca * bc + cb;
                let v = va.mul_ref(vb);
                if !v.is_zero() {
                    entries.insert(row * cols + col, v);
                }
            }
        }
        Ok(SparseTensor { shape, out_axes: self.out_axes + rhs.out_axes, entries })
    }

    /// Tensor power with `k` factors; k = 0 gives the 1×1 identity.
    pub fn kron_power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::scalar(S::one());
        for _ in 0..k {
            acc = acc.kron(self)?;
        }
        Ok(acc)
    }

    /// The 0-axis tensor holding `v`.
    pub fn scalar(v: S) -> Self {
        let mut entries = BTreeMap::new();
        if !v.is_zero() {
            entries.insert(0, v);
        }
        SparseTensor { shape: vec![], out_axes: 0, entries }
    }

    /// Conjugate transpose: inputs and outputs swap roles.
    pub fn adjoint(&self) -> Self {
        let (rows, cols) = (self.rows(), self.cols());
        let entries = self
            .entries
            .iter()
            .map(|(&k, v)| {
                let (r, c) = (k / cols, k % cols);
                (c * rows + r, v.conj())
            })
            .collect();
        let mut shape = self.in_shape().to_vec();
        shape.extend_from_slice(self.out_shape());
        SparseTensor { shape, out_axes: self.in_axes(), entries }
    }

    /// Contracts `axis` with a d'×d matrix given by rows: T'[…,i,…] = Σ_j M[i][j]·T[…,j,…].
    pub fn mode_product(&self, axis: usize, matrix: &[Vec<S>]) -> Result<Self> {
        let d = *self
            .shape
            .get(axis)
            .ok_or_else(|| Error::Shape(format!("axis {axis} out of range")))?;
        if matrix.iter().any(|r| r.len() != d) {
            return Err(Error::Shape(format!("matrix width does not match axis dimension {d}")));
        }
        let dn = matrix.len();
        let lo: u64 = self.shape[axis + 1..].iter().map(|&x| x as u64).product();
        let mut columns: Vec<Vec<(u64, &S)>> = vec![Vec::new(); d];
        for (i, row) in matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    columns[j].push((i as u64, v));
                }
            }
        }
        let mut shape = self.shape.clone();
        shape[axis] = dn;
        let bound = (self.nnz() as u64).saturating_mul(dn as u64);
        guard::check_sparse("mode product", bound.min(product(&shape)?))?;
        let mut acc: HashMap<u64, S> = HashMap::new();
        for (&k, v) in &self.entries {
            let low = k % lo;
            let j = (k / lo) % d as u64;
            let high = k / (lo * d as u64);
            for (i, m) in &columns[j as usize] {
                let key = (high * dn as u64 + i) * lo + low;
                let p = m.mul_ref(v);
                match acc.get_mut(&key) {
                    Some(slot) => slot.add_assign_ref(&p),
                    None => {
                        acc.insert(key, p);
                    }
                }
            }
        }
        let entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(SparseTensor { shape, out_axes: self.out_axes, entries })
    }

    /// (id ⊗ b ⊗ id) ∘ self, with b acting on output axes start..start + b.in_axes().
    pub fn apply_on_outputs(&self, start: usize, b: &Self) -> Result<Self> {
        let kb = b.in_axes();
        if start + kb > self.out_axes || self.shape[start..start + kb] != *b.in_shape() {
            return Err(Error::Shape(format!(
                "cannot apply {:?} → {:?} at output axis {start} of {:?}",
                b.in_shape(),
                b.out_shape(),
                self.shape
            )));
        }
        let mut shape = self.shape[..start].to_vec();
        shape.extend_from_slice(b.out_shape());
        shape.extend_from_slice(&self.shape[start + kb..]);
        let out_axes = self.out_axes - kb + b.out_axes;
        let mut out = Self::zeros(&shape, out_axes)?;
        let bcols = b.cols();
        let mut by_col: HashMap<u64, Vec<(Vec<usize>, &S)>> = HashMap::new();
        for (&k, v) in &b.entries {
            let idx = b.unravel(k);
            by_col.entry(k % bcols).or_default().push((idx[..b.out_axes].to_vec(), v));
        }
        let width = b.in_shape().iter().fold(1u64, |acc, &d| acc * d as u64);
        let mut budget = 0u64;
        for (&k, v) in &self.entries {
            let idx = self.unravel(k);
            let col = idx[start..start + kb].iter().zip(b.in_shape()).fold(0u64, |acc, (&i, &d)| acc * d as u64 + i as u64);
            debug_assert!(col < width.max(1));
            let Some(rows) = by_col.get(&col) else { continue };
            budget += rows.len() as u64;
            guard::check_sparse("partial application", budget)?;
            for (row, bv) in rows {
                let mut new_idx = idx[..start].to_vec();
                new_idx.extend_from_slice(row);
                new_idx.extend_from_slice(&idx[start + kb..]);
                let lin = out.linear(&new_idx)?;
                out.add_at(lin, bv.mul_ref(v));
            }
        }
        Ok(out)
    }

    /// self ∘ (id ⊗ b ⊗ id), with b acting on input axes start..start + b.out_axes().
    pub fn apply_on_inputs(&self, start: usize, b: &Self) -> Result<Self> {
        Ok(self.adjoint().apply_on_outputs(start, &b.adjoint())?.adjoint())
    }

    /// Reorders axes: new axis a is old axis perm[a]; the first `out_axes` become outputs.
    pub fn permute_axes(&self, perm: &[usize], out_axes: usize) -> Result<Self> {
        let r = self.shape.len();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&a| a >= r || std::mem::replace(&mut seen[a], true)) {
            return Err(Error::Shape(format!("{perm:?} is not a permutation of {r} axes")));
        }
        if out_axes > r {
            return Err(Error::Shape(format!("{out_axes} output axes for {r} axes")));
        }
        let shape: Vec<usize> = perm.iter().map(|&a| self.shape[a]).collect();
        let mut out = Self::zeros(&shape, out_axes)?;
        for (k, v) in &self.entries {
            let idx = self.unravel(*k);
            let new_idx: Vec<usize> = perm.iter().map(|&a| idx[a]).collect();
            let lin = out.linear(&new_idx)?;
            out.entries.insert(lin, v.clone());
        }
        Ok(out)
    }

    /// Keeps, on every axis, only the listed positions (in the listed order).
    pub fn restrict(&self, selections: &[Vec<usize>]) -> Result<Self> {
        if selections.len() != self.shape.len() {
            return Err(Error::Shape("one selection per axis required".into()));
        }
        let maps: Vec<HashMap<usize, usize>> = selections
            .iter()
            .map(|sel| sel.iter().enumerate().map(|(new, &old)| (old, new)).collect())
            .collect();
        let shape: Vec<usize> = selections.iter().map(Vec::len).collect();
        let mut out = Self::zeros(&shape, self.out_axes)?;
        'entries: for (k, v) in &self.entries {
            let idx = self.unravel(*k);
            let mut new_idx = Vec::with_capacity(idx.len());
            for (i, m) in idx.iter().zip(&maps) {
                match m.get(i) {
                    Some(&j) => new_idx.push(j),
                    None => continue 'entries,
                }
            }
            let lin = out.linear(&new_idx)?;
            out.entries.insert(lin, v.clone());
        }
        Ok(out)
    }

    /// Diagonal of a square operator, or None if some off-diagonal entry is nonzero.
    pub fn diagonal(&self) -> Option<Vec<S>> {
        let (rows, cols) = (self.rows(), self.cols());
        if rows != cols {
            return None;
        }
        let mut diag = vec![S::zero(); rows as usize];
        for (&k, v) in &self.entries {
            let (r, c) = (k / cols, k % cols);
            if r != c {
                return None;
            }
            diag[r as usize] = v.clone();
        }
        Some(diag)
    }

    /// Dense row-major matrix of the operator view (guarded).
    pub fn to_dense(&self) -> Result<Vec<Vec<S>>> {
        let (rows, cols) = (self.rows(), self.cols());
        guard::check_dense("dense matrix", rows.saturating_mul(cols))?;
        let mut m = vec![vec![S::zero(); cols as usize]; rows as usize];
        for (&k, v) in &self.entries {
            m[(k / cols) as usize][(k % cols) as usize] = v.clone();
        }
        Ok(m)
    }

    pub fn trace(&self) -> S {
        let cols = self.cols();
        let mut acc = S::zero();
        for (&k, v) in &self.entries {
            if k / cols == k % cols {
                acc.add_assign_ref(v);
            }
        }
        acc
    }

    /// JSON with entries sorted lexicographically by index tuple.
    pub fn to_json_with(&self, value: impl Fn(&S) -> Value) -> Value {
        let entries: Vec<Value> =
            self.entries().map(|(idx, v)| json!({ "idx": idx, "value": value(v) })).collect();
        json!({ "shape": self.shape, "out_axes": self.out_axes, "entries": entries })
    }
}

impl SparseTensor<BigRational> {
    /// Rank of the operator view over Q. Rows and columns are split into the connected
    /// components of the support graph and each block is eliminated densely (guarded).
    pub fn rank(&self) -> Result<usize> {
        let cols = self.cols();
        let mut row_ids: HashMap<u64, usize> = HashMap::new();
        let mut col_ids: HashMap<u64, usize> = HashMap::new();
        for &k in self.entries.keys() {
            let next = row_ids.len();
            row_ids.entry(k / cols).or_insert(next);
            let next = col_ids.len();
            col_ids.entry(k % cols).or_insert(next);
        }
        let nr = row_ids.len();
        let mut parent: Vec<usize> = (0..nr + col_ids.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &k in self.entries.keys() {
            let a = find(&mut parent, row_ids[&(k / cols)]);
            let b = find(&mut parent, nr + col_ids[&(k % cols)]);
            parent[a] = b;
        }
        let mut blocks: HashMap<usize, Vec<(usize, usize, &BigRational)>> = HashMap::new();
        for (&k, v) in &self.entries {
            let (r, c) = (row_ids[&(k / cols)], col_ids[&(k % cols)]);
            let root = find(&mut parent, r);
            blocks.entry(root).or_default().push((r, c, v));
        }
        let mut rank = 0;
        for entries in blocks.into_values() {
            let mut rs: Vec<usize> = entries.iter().map(|e| e.0).collect();
            let mut cs: Vec<usize> = entries.iter().map(|e| e.1).collect();
            rs.sort_unstable();
            rs.dedup();
            cs.sort_unstable();
            cs.dedup();
            guard::check_dense("rank block", (rs.len() as u64) * (cs.len() as u64))?;
            let mut m = vec![vec![BigRational::zero(); cs.len()]; rs.len()];
            for (r, c, v) in entries {
                let i = rs.binary_search(&r).expect("row in block");
                let j = cs.binary_search(&c).expect("column in block");
                m[i][j] = v.clone();
            }
            rank += rational_rank(&mut m);
        }
        Ok(rank)
    }
}

/// Rank by Gaussian elimination; the matrix is consumed as scratch space.
pub fn rational_rank(m: &mut [Vec<BigRational>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / &m[rank][c];
        let pivot_row: Vec<BigRational> = m[rank].iter().map(|x| x * &inv).collect();
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot_row).skip(c) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::rational_rank;
    use crate::scalar::q;
    use num_rational::BigRational;
    use crate::QTensor;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> QTensor {
        QTensor::from_rows(&rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn compose_matches_matrix_product() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let b = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.compose(&b).unwrap(), mat(&[&[2, 1], &[4, 3]]));
        assert_eq!(b.compose(&a).unwrap(), mat(&[&[3, 4], &[1, 2]]));
    }

    #[test]
    fn kron_layout() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let i = QTensor::identity(&[2]).unwrap();
        let k = a.kron(&i).unwrap();
        assert_eq!(k.shape(), &[2, 2, 2, 2]);
        // (a ⊗ I)[(r1,r2),(c1,c2)] = a[r1][c1]·δ(r2,c2)
        assert_eq!(k.value(&[1, 0, 0, 0]), q(3, 1));
        assert_eq!(k.value(&[1, 0, 0, 1]), q(0, 1));
        assert_eq!(k.value(&[0, 1, 1, 1]), q(2, 1));
    }

    #[test]
    fn adjoint_transposes() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.adjoint(), mat(&[&[1, 3], &[2, 4]]));
    }

    #[test]
    fn mode_product_is_left_multiplication_on_matrices() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let m = vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        let left = a.mode_product(0, &m).unwrap();
        assert_eq!(left, mat(&[&[0, 1], &[1, 1]]).compose(&a).unwrap());
    }

    #[test]
    fn rank_and_restrict() {
        let a = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(a.rank().unwrap(), 2);
        let r = a.restrict(&[vec![2, 0], vec![1]]).unwrap();
        assert_eq!(r, mat(&[&[1], &[2]]));
        let b = mat(&[&[1, 0, 0, 2], &[0, 3, 0, 0], &[2, 0, 0, 4], &[0, 0, 0, 0]]);
        assert_eq!(b.rank().unwrap(), 2);
        assert_eq!(mat(&[&[0, 0], &[0, 0]]).rank().unwrap(), 0);
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = QTensor> {
        proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
            let rows: Vec<Vec<_>> = v.chunks(n).map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect();
            QTensor::from_rows(&rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn compose_is_associative(a in arb_matrix(3), b in arb_matrix(3), c in arb_matrix(3)) {
            let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
            let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn kron_interchange_law(a in arb_matrix(2), b in arb_matrix(2), c in arb_matrix(2), d in arb_matrix(2)) {
            let lhs = a.kron(&b).unwrap().compose(&c.kron(&d).unwrap()).unwrap();
            let rhs = a.compose(&c).unwrap().kron(&b.compose(&d).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn blockwise_rank_matches_dense_rank(a in proptest::collection::vec(prop_oneof![3 => Just(0i64), 1 => -2i64..=2], 25)) {
            let rows: Vec<Vec<BigRational>> = a.chunks(5).map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect();
            let t = QTensor::from_rows(&rows).unwrap();
            let mut dense = rows.clone();
            prop_assert_eq!(t.rank().unwrap(), rational_rank(&mut dense));
        }

        #[test]
        fn adjoint_reverses_composition(a in arb_matrix(3), b in arb_matrix(3)) {
            prop_assert_eq!(a.compose(&b).unwrap().adjoint(), b.adjoint().compose(&a.adjoint()).unwrap());
        }
    }
}
