//! The wreath-product representation ũ of G ≀ S_n on the n-fold Cartesian power of a graph,
//! instantiated with classical (commuting) matrices.

use crate::cayley::check_permutation;
use crate::error::{invalid, Result};
use crate::guard;
use crate::scalar::Scalar;
use crate::tensor::SparseTensor;

/// u^{ai}_{bj} := (v_j)^a_b·δ_{i,w(j)} as an (mn)×(mn) matrix with row (a,i) ↦ i·m + a.
pub fn wreath_u<S: Scalar>(vs: &[Vec<Vec<S>>], w: &[usize]) -> Result<Vec<Vec<S>>> {
    let (m, n) = dims(vs, w)?;
    let mut u = vec![vec![S::zero(); m * n]; m * n];
    for (j, v) in vs.iter().enumerate() {
        let i = w[j];
        for a in 0..m {
            for b in 0..m {
                u[i * m + a][j * m + b] = v[a][b].clone();
            }
        }
    }
    Ok(u)
}

fn dims<S>(vs: &[Vec<Vec<S>>], w: &[usize]) -> Result<(usize, usize)> {
    let n = vs.len();
    if n == 0 {
        return invalid("wreath representation needs at least one factor");
    }
    check_permutation(w, n)?;
    let m = vs[0].len();
    if m == 0 || vs.iter().any(|v| v.len() != m || v.iter().any(|r| r.len() != m)) {
        return invalid("all v_i must be square matrices of one common size m ≥ 1");
    }
    Ok((m, n))
}

/// ũ^{b_1…b_n}_{a_1…a_n} = Σ_{k_1,…,k_n} Π_j u^{b_{k_j} k_j}_{a_j j}, an m^n × m^n matrix whose
/// multi-indices are ordered row-major (first coordinate slowest).
pub fn wreath_rep<S: Scalar>(vs: &[Vec<Vec<S>>], w: &[usize]) -> Result<SparseTensor<S>> {
    let (m, n) = dims(vs, w)?;
    let u = wreath_u(vs, w)?;
    let size = guard::checked_pow("wreath representation", m as u64, n)?;
    guard::check_group_order(size)?;
    let size = size as usize;
    let multi = |mut x: usize| {
        let mut t = vec![0; n];
        for slot in t.iter_mut().rev() {
            *slot = x % m;
            x /= m;
        }
        t
    };
    let mut entries = Vec::new();
    for row in 0..size {
        let b = multi(row);
        for col in 0..size {
            let a = multi(col);
            // commuting entries let the sum over (k_1,…,k_n) factor into a product of sums
            let mut prod = S::one();
            for (j, &aj) in a.iter().enumerate() {
                let mut s = S::zero();
                for (k, &bk) in b.iter().enumerate() {
                    s.add_assign_ref(&u[k * m + bk][j * m + aj]);
                }
                prod = prod.mul_ref(&s);
                if prod.is_zero() {
                    break;
                }
            }
            if !prod.is_zero() {
                entries.push((vec![row, col], prod));
            }
        }
    }
    SparseTensor::from_entries(&[size, size], 1, entries)
}

/// Vertex map of the product action (x_1,…,x_n) ↦ y with y_{w(j)} = v_j(x_j), in row-major
/// vertex indices.
pub fn product_action(perms: &[Vec<usize>], w: &[usize]) -> Result<Vec<usize>> {
    let n = perms.len();
    if n == 0 {
        return invalid("product action needs at least one factor");
    }
    check_permutation(w, n)?;
    let m = perms[0].len();
    for p in perms {
        check_permutation(p, m)?;
    }
    let size = guard::checked_pow("product action", m as u64, n)? as usize;
    let mut out = vec![0; size];
    for (x, slot) in out.iter_mut().enumerate() {
        let mut coords = vec![0; n];
        let mut r = x;
        for c in coords.iter_mut().rev() {
            *c = r % m;
            r /= m;
        }
        let mut y = vec![0; n];
        for j in 0..n {
            y[w[j]] = perms[j][coords[j]];
        }
        *slot = y.iter().fold(0, |acc, &c| acc * m + c);
    }
    Ok(out)
}

/// Permutation matrix with P[p(a)][a] = 1, as dense rows.
pub fn perm_rows<S: Scalar>(p: &[usize]) -> Result<Vec<Vec<S>>> {
    check_permutation(p, p.len())?;
    let mut rows = vec![vec![S::zero(); p.len()]; p.len()];
    for (a, &b) in p.iter().enumerate() {
        rows[b][a] = S::one();
    }
    Ok(rows)
}
