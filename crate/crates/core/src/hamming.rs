//! Operators on the first eigenspace of the Hamming graph H(n, m) built from delta formulas.
//!
//! The index set is (a, i) with a ∈ 1..m−1 and i ∈ 1..n, stored 0-based as i·(m−1) + (a−1).
//! Index sums on a are taken modulo m.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::functor::functor_t;
use crate::intertwiner::{project, EigenprojectionBasis};
use crate::partition::Partition;
use crate::group::{AbelianGroup, GroupElement};
use crate::guard;
use crate::scalar::rational_string;
use crate::{QTensor, Tensor};

/// Index constraint of R_AAbb.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AabbIndex {
    /// i_1 = i_2 and j_1 = j_2, the reading under which N·T̂_connecter on V_1 splits into
    /// R_connecter + R_AAbb + R_aBaB + R_aBBa.
    Wide,
    /// i_1 = i_2 ≠ j_1 = j_2, as printed next to the delta formula.
    Strict,
}

impl AabbIndex {
    pub fn name(self) -> &'static str {
        match self {
            AabbIndex::Wide => "wide",
            AabbIndex::Strict => "strict",
        }
    }
}

/// Index constraint read off the glyph of R_AABB.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AabbReading {
    /// i_1 = i_2 = j_1 = j_2.
    SameIndex,
    /// i_1 = i_2 ≠ j_1 = j_2, as for R_AAbb.
    Mirror,
}

impl AabbReading {
    pub fn name(self) -> &'static str {
        match self {
            AabbReading::SameIndex => "same-index",
            AabbReading::Mirror => "mirror",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HammingOps {
    pub m: usize,
    pub n: usize,
}

type Pred<'a> = dyn Fn([usize; 2], [usize; 2], [usize; 2], [usize; 2]) -> bool + 'a;

impl HammingOps {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 1 {
            return invalid(format!("Hamming operators need m ≥ 2 and n ≥ 1, got m={m}, n={n}"));
        }
        let d = ((m - 1) * n) as u64;
        guard::check_dense("Hamming two-point operator", d.pow(4))?;
        Ok(HammingOps { m, n })
    }

    /// Dimension (m−1)·n of the first eigenspace.
    pub fn dim(&self) -> usize {
        (self.m - 1) * self.n
    }

    /// (a, i) of a flat index, 1-based in a and 0-based in i.
    pub fn label(&self, x: usize) -> (usize, usize) {
        (x % (self.m - 1) + 1, x / (self.m - 1))
    }

    pub fn index(&self, a: usize, i: usize) -> usize {
        i * (self.m - 1) + (a - 1)
    }

    /// The character label a·e_i of Z_m^n.
    pub fn group_label(&self, x: usize) -> GroupElement {
        let (a, i) = self.label(x);
        let mut v = vec![0u64; self.n];
        v[i] = a as u64;
        GroupElement(v)
    }

    pub fn group(&self) -> Result<AbelianGroup> {
        AbelianGroup::new(&vec![self.m as u64; self.n])
    }

    fn zero_sum(&self, a: usize, b: usize) -> bool {
        (a + b).is_multiple_of(self.m)
    }

    /// [R_merge]^{bj}_{a1 i1, a2 i2} = δ_{i1 i2 j} δ_{a1+a2, b}.
    pub fn merge(&self) -> Result<QTensor> {
        let d = self.dim();
        let mut entries = Vec::new();
        for x1 in 0..d {
            for x2 in 0..d {
                let ((a1, i1), (a2, i2)) = (self.label(x1), self.label(x2));
                let b = (a1 + a2) % self.m;
                if i1 == i2 && b != 0 {
                    entries.push((vec![self.index(b, i1), x1, x2], BigRational::one()));
                }
            }
        }
        QTensor::from_entries(&[d, d, d], 1, entries)
    }

    /// R_merge* · R_merge.
    pub fn connecter(&self) -> Result<QTensor> {
        let m = self.merge()?;
        m.adjoint().compose(&m)
    }

    /// Four-point operator from a predicate on ([b1, j1], [b2, j2], [a1, i1], [a2, i2]).
    fn four_point(&self, pred: &Pred<'_>) -> Result<QTensor> {
        let d = self.dim();
        let mut entries = Vec::new();
        for y1 in 0..d {
            for y2 in 0..d {
                for x1 in 0..d {
                    for x2 in 0..d {
                        let l = |x| {
                            let (a, i) = self.label(x);
                            [a, i]
                        };
                        if pred(l(y1), l(y2), l(x1), l(x2)) {
                            entries.push((vec![y1, y2, x1, x2], BigRational::one()));
                        }
                    }
                }
            }
        }
        QTensor::from_entries(&[d, d, d, d], 2, entries)
    }

    /// δ_{a1+a2,0} δ_{b1+b2,0} δ_{i1=i2} δ_{j1=j2}, with i1 ≠ j1 under the strict reading.
    pub fn aabb(&self, index: AabbIndex) -> Result<QTensor> {
        self.four_point(&|[b1, j1], [b2, j2], [a1, i1], [a2, i2]| {
            self.zero_sum(a1, a2)
                && self.zero_sum(b1, b2)
                && i1 == i2
                && j1 == j2
                && (index == AabbIndex::Wide || i1 != j1)
        })
    }

    /// δ_{a1+a2,0} δ_{b1+b2,0} δ_{i1=i2=j1=j2}: the gap between the two readings of R_AAbb.
    pub fn aabb_same_index(&self) -> Result<QTensor> {
        self.four_point(&|[b1, j1], [b2, j2], [a1, i1], [a2, i2]| {
            self.zero_sum(a1, a2) && self.zero_sum(b1, b2) && i1 == i2 && j1 == j2 && i1 == j1
        })
    }

    /// δ_{a1 b2} δ_{a2 b1} δ_{i1=j2≠i2=j1}.
    pub fn abab(&self) -> Result<QTensor> {
        self.four_point(&|[b1, j1], [b2, j2], [a1, i1], [a2, i2]| {
            a1 == b2 && a2 == b1 && i1 == j2 && i2 == j1 && i1 != i2
        })
    }

    /// δ_{a1 b1} δ_{a2 b2} δ_{i1=j1≠i2=j2}.
    pub fn abba(&self) -> Result<QTensor> {
        self.four_point(&|[b1, j1], [b2, j2], [a1, i1], [a2, i2]| {
            a1 == b1 && a2 == b2 && i1 == j1 && i2 == j2 && i1 != i2
        })
    }

    /// δ_{a1+a2,0} δ_{b1+b2,0} δ_{a1 a2 b1 b2} with the chosen index constraint.
    pub fn aabb_big(&self, reading: AabbReading) -> Result<QTensor> {
        self.four_point(&|[b1, j1], [b2, j2], [a1, i1], [a2, i2]| {
            let idx = match reading {
                AabbReading::SameIndex => i1 == i2 && j1 == j2 && i1 == j1,
                AabbReading::Mirror => i1 == i2 && j1 == j2 && i1 != j1,
            };
            self.zero_sum(a1, a2) && self.zero_sum(b1, b2) && a1 == a2 && a1 == b1 && a1 == b2 && idx
        })
    }

    /// R_AAbb + R_aBaB + R_aBBa.
    pub fn sum(&self, index: AabbIndex) -> Result<QTensor> {
        self.aabb(index)?.add(&self.abab()?)?.add(&self.abba()?)
    }
}

/// Result of writing a tensor as Σ c_i·X_i over named operators with disjoint supports.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub terms: Vec<(String, BigRational)>,
    /// Nonzeros left over outside the named supports.
    pub remainder_nnz: usize,
}

impl Decomposition {
    pub fn is_exact(&self) -> bool {
        self.remainder_nnz == 0
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(n, c)| json!({"operator": n, "coefficient": rational_string(c)}))
            .collect();
        json!({"terms": terms, "remainder_nnz": self.remainder_nnz})
    }
}

impl std::fmt::Display for Decomposition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.terms.iter().map(|(n, c)| format!("{}·{n}", rational_string(c))).collect();
        if parts.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", parts.join(" + "))?;
        }
        if self.remainder_nnz > 0 {
            write!(f, " + ({} unexplained entries)", self.remainder_nnz)?;
        }
        Ok(())
    }
}

/// Peels off c·X for each named 0/1 operator X, reading c at X's first support entry.
pub fn decompose(t: &QTensor, basis: &[(&str, &QTensor)]) -> Result<Decomposition> {
    let mut rest = t.clone();
    let mut terms = Vec::new();
    for (name, x) in basis {
        let Some((k, _)) = x.linear_entries().next() else { continue };
        let c = rest.matrix_entry(k / x.cols(), k % x.cols());
        if !c.is_zero() {
            rest = rest.sub(&x.scale(&c))?;
            terms.push((name.to_string(), c));
        }
    }
    Ok(Decomposition { terms, remainder_nnz: rest.nnz() })
}

/// Exact outcome of the R-operator identities for one (m, n).
#[derive(Clone, Debug)]
pub struct HammingReport {
    pub m: usize,
    pub n: usize,
    pub index: AabbIndex,
    pub reading: AabbReading,
    /// N·T̂_connecter restricted to V_1 == R_connecter + R_AAbb + R_aBaB + R_aBBa.
    pub connecter_split: bool,
    pub aabb_abab_zero: bool,
    pub aabb_abba_zero: bool,
    /// S³ − 4S == 4m(m−2)·R_AAbb with S = R_AAbb + R_aBaB + R_aBBa.
    pub cube_identity: bool,
    /// S³ − 4S over R_AAbb, R_AAbb|i=j, R_aBaB, R_aBBa.
    pub cube_minus_four_sum: Decomposition,
    /// S² == 2(m−1)·R_AABB + 2R_aBBa + 2R_aBaB.
    pub square_identity: bool,
    /// S² − 2R_aBBa − 2R_aBaB over R_AABB, R_AAbb, R_AAbb|i=j.
    pub square_minus_swaps: Decomposition,
}

impl HammingReport {
    /// Every displayed identity holds.
    pub fn passed(&self) -> bool {
        self.connecter_split && self.aabb_abab_zero && self.aabb_abba_zero && self.cube_identity && self.square_identity
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "n": self.n,
            "aabb_index": self.index.name(),
            "aabb_big_reading": self.reading.name(),
            "connecter_split": self.connecter_split,
            "aabb_abab_zero": self.aabb_abab_zero,
            "aabb_abba_zero": self.aabb_abba_zero,
            "cube_identity": self.cube_identity,
            "cube_minus_four_sum": self.cube_minus_four_sum.to_json(),
            "square_identity": self.square_identity,
            "square_minus_swaps": self.square_minus_swaps.to_json(),
        })
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// N·T̂_connecter restricted to the first eigenspace, via projection of T_connecter.
pub fn projected_connecter(ops: &HammingOps) -> Result<QTensor> {
    let g = ops.group()?;
    let labels = (0..ops.dim()).map(|x| ops.group_label(x)).collect();
    let basis = EigenprojectionBasis::new(&g, vec![labels])?;
    let big_n = g.size();
    let t: Tensor = functor_t(&Partition::block(2, 2), big_n as usize)?;
    let p = project(&t, &basis, &basis)?;
    let mut entries = Vec::with_capacity(p.nnz());
    for (idx, v) in p.entries() {
        let r = v.as_coeff().ok_or_else(|| Error::InvalidInput("projected connecter is not rational".into()))?;
        entries.push((idx, r * int(big_n as i64)));
    }
    QTensor::from_entries(p.shape(), 2, entries)
}

pub fn hamming_report(m: usize, n: usize, index: AabbIndex, reading: AabbReading) -> Result<HammingReport> {
    let ops = HammingOps::new(m, n)?;
    let (aabb, abab, abba) = (ops.aabb(index)?, ops.abab()?, ops.abba()?);
    let same = ops.aabb_same_index()?;
    let big = ops.aabb_big(reading)?;
    let s = aabb.add(&abab)?.add(&abba)?;
    let s2 = s.compose(&s)?;
    let s3 = s2.compose(&s)?;
    let mi = m as i64;

    let split = ops.connecter()?.add(&s)?;
    let cube = s3.sub(&s.scale(&int(4)))?;
    let swaps = abba.scale(&int(2)).add(&abab.scale(&int(2)))?;
    let square = s2.sub(&swaps)?;
    let mut named = vec![("R_AAbb", &aabb), ("R_aBaB", &abab), ("R_aBBa", &abba)];
    if index == AabbIndex::Strict {
        named.insert(1, ("R_AAbb|i=j", &same));
    }
    let mut square_named = vec![("R_AABB", &big), ("R_AAbb", &aabb)];
    if index == AabbIndex::Strict {
        square_named.push(("R_AAbb|i=j", &same));
    }
    Ok(HammingReport {
        m,
        n,
        index,
        reading,
        connecter_split: projected_connecter(&ops)? == split,
        aabb_abab_zero: aabb.compose(&abab)?.is_zero(),
        aabb_abba_zero: aabb.compose(&abba)?.is_zero(),
        cube_identity: cube == aabb.scale(&int(4 * mi * (mi - 2))),
        cube_minus_four_sum: decompose(&cube, &named)?,
        square_identity: square == big.scale(&int(2 * (mi - 1))),
        square_minus_swaps: decompose(&square, &square_named)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn to_cyclo(t: &QTensor) -> Tensor {
        t.map(|v| crate::Cyclo::from_rational_at(1, v.clone()))
    }

    #[test]
    fn merge_spot_entry() {
        let ops = HammingOps::new(3, 2).unwrap();
        let r = ops.merge().unwrap();
        let one = ops.index(1, 0);
        assert_eq!(r.value(&[ops.index(2, 0), one, one]), q(1, 1));
        assert_eq!(r.value(&[ops.index(1, 0), one, one]), q(0, 1));
    }

    #[test]
    fn merge_is_projected_fourier_merge() {
        for (m, n) in [(3, 2), (4, 2), (2, 3)] {
            let ops = HammingOps::new(m, n).unwrap();
            let g = ops.group().unwrap();
            let labels = (0..ops.dim()).map(|x| ops.group_label(x)).collect();
            let b = EigenprojectionBasis::new(&g, vec![labels]).unwrap();
            let t = functor_t(&Partition::merge(), m.pow(n as u32)).unwrap();
            assert_eq!(project(&t, &b, &b).unwrap(), to_cyclo(&ops.merge().unwrap()), "({m},{n})");
        }
    }

    #[test]
    fn connecter_split_needs_wide_reading() {
        for (m, n) in [(3, 2), (4, 2), (3, 3)] {
            let ops = HammingOps::new(m, n).unwrap();
            let lhs = projected_connecter(&ops).unwrap();
            let wide = ops.connecter().unwrap().add(&ops.sum(AabbIndex::Wide).unwrap()).unwrap();
            let strict = ops.connecter().unwrap().add(&ops.sum(AabbIndex::Strict).unwrap()).unwrap();
            assert_eq!(lhs, wide, "({m},{n})");
            assert_eq!(lhs.sub(&strict).unwrap(), ops.aabb_same_index().unwrap());
        }
    }

    #[test]
    fn connecter_formula() {
        let ops = HammingOps::new(4, 2).unwrap();
        let c = ops.connecter().unwrap();
        let direct = ops
            .four_point(&|[b1, j1], [b2, j2], [a1, i1], [a2, i2]| {
                i1 == i2 && i2 == j1 && j1 == j2 && (a1 + a2) % 4 == (b1 + b2) % 4 && (a1 + a2) % 4 != 0
            })
            .unwrap();
        assert_eq!(c, direct);
    }

    #[test]
    fn wide_reading_powers() {
        for (m, n) in [(2, 1), (3, 2), (4, 3), (5, 2)] {
            let r = hamming_report(m, n, AabbIndex::Wide, AabbReading::SameIndex).unwrap();
            assert!(r.connecter_split && r.aabb_abab_zero && r.aabb_abba_zero);
            let c = (m as i64 - 1).pow(2) * (n as i64).pow(2) - 4;
            let expected = if c == 0 { vec![] } else { vec![("R_AAbb".to_string(), q(c, 1))] };
            assert_eq!(r.cube_minus_four_sum.terms, expected, "({m},{n})");
            assert!(r.cube_minus_four_sum.is_exact());
            assert_eq!(r.cube_identity, n == 2);
        }
    }

    #[test]
    fn strict_reading_powers() {
        for (m, n) in [(3, 2), (4, 3), (5, 2)] {
            let r = hamming_report(m, n, AabbIndex::Strict, AabbReading::SameIndex).unwrap();
            assert!(r.aabb_abab_zero && r.aabb_abba_zero && !r.connecter_split && !r.cube_identity);
            let (mi, ni) = (m as i64, n as i64);
            let c1 = (mi - 1).pow(2) * (ni * ni - 3 * ni + 3) - 4;
            let c2 = (mi - 1).pow(2) * (ni - 1) * (ni - 2);
            let expected: Vec<(String, BigRational)> = [("R_AAbb", c1), ("R_AAbb|i=j", c2)]
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(n, c)| (n.to_string(), q(c, 1)))
                .collect();
            assert_eq!(r.cube_minus_four_sum.terms, expected, "({m},{n})");
        }
    }

    #[test]
    fn square_of_sum() {
        let r = hamming_report(3, 3, AabbIndex::Wide, AabbReading::SameIndex).unwrap();
        assert!(!r.square_identity);
        assert_eq!(r.square_minus_swaps.terms, vec![("R_AAbb".to_string(), q(6, 1))]);
    }

    #[test]
    fn aabb_big_forces_half_labels() {
        let odd = HammingOps::new(3, 2).unwrap();
        assert!(odd.aabb_big(AabbReading::SameIndex).unwrap().is_zero());
        let even = HammingOps::new(4, 2).unwrap();
        assert_eq!(even.aabb_big(AabbReading::SameIndex).unwrap().nnz(), 2);
        assert_eq!(even.aabb_big(AabbReading::Mirror).unwrap().nnz(), 2);
    }
}
