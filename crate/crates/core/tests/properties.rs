use num_rational::BigRational;
use proptest::prelude::*;

use qsym::cayley::{fourier_diagonal, is_eigenvector, CayleyGraph, GeneratingSet};
use qsym::functor::functor_t;
use qsym::group::{AbelianGroup, GroupElement};
use qsym::intertwiner::{fourier_conjugate_tensor, hat_block_intertwiner};
use qsym::partition::Partition;
use qsym::{QTensor, Rational, Tensor};

/// Cyclic orders with product at most 16 and a symmetric generating set drawn from `picks`.
fn graph_from(orders: &[u64], picks: &[usize]) -> Option<CayleyGraph> {
    let g = AbelianGroup::new(orders).ok()?;
    let n = g.size() as usize;
    let mut elems: Vec<GroupElement> = Vec::new();
    for &p in picks {
        let idx = 1 + p % (n - 1);
        let s = g.element_at(idx);
        for t in [g.neg(&s), s] {
            if !elems.contains(&t) {
                elems.push(t);
            }
        }
    }
    let set = GeneratingSet::new(&g, elems).ok()?;
    CayleyGraph::new(g, set).ok()
}

fn orders() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(2u64..=5, 1..=2).prop_filter("N <= 16", |o| o.iter().product::<u64>() <= 16)
}

fn partition(k: usize, l: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0usize..(k + l).max(1), k + l)
        .prop_map(move |labels| Partition::from_labels(k, l, &labels).expect("valid labels"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Every character is an eigenvector of the adjacency matrix, checked by direct
    /// multiplication, and the eigenvalues sum to trace A = 0.
    #[test]
    fn characters_diagonalize(orders in orders(), picks in prop::collection::vec(0usize..64, 1..4)) {
        let Some(graph) = graph_from(&orders, &picks) else { return Ok(()) };
        let g = graph.group();
        for mu in g.elements() {
            prop_assert!(is_eigenvector::<Rational>(&graph, &mu).unwrap());
        }
        let spec = graph.spectrum::<Rational>().unwrap();
        let trace = spec.items.iter().fold(qsym::Cyclo::from_rational_at(1, BigRational::from_integer(0.into())), |acc, e| {
            &acc + &(&e.value * &qsym::Cyclo::from_rational_at(1, BigRational::from_integer((e.labels.len() as i64).into())))
        });
        prop_assert!(trace.as_coeff().map(|q| q == BigRational::from_integer(0.into())).unwrap_or(false));
        prop_assert!(fourier_diagonal::<Rational>(&graph).unwrap().is_some());
    }

    /// T_q·T_p = N^loops·T_{q∘p}.
    #[test]
    fn functor_is_monoidal_on_composition(
        (p, q) in (0usize..=3, 0usize..=3, 0usize..=3).prop_flat_map(|(k, l, m)| (partition(k, l), partition(l, m))),
        n in 2usize..=4,
    ) {
        let (r, loops) = q.compose(&p).unwrap();
        let lhs: QTensor = functor_t::<BigRational>(&q, n).unwrap().compose(&functor_t(&p, n).unwrap()).unwrap();
        let rhs: QTensor = functor_t::<BigRational>(&r, n).unwrap().scale(&num_traits::pow(BigRational::from_integer((n as i64).into()), loops));
        prop_assert_eq!(lhs, rhs);
    }

    /// Composition of partitions is associative, loops included.
    #[test]
    fn composition_is_associative(
        (a, b, c) in (0usize..=3, 0usize..=3, 0usize..=3, 0usize..=3)
            .prop_flat_map(|(i, j, k, l)| (partition(i, j), partition(j, k), partition(k, l))),
    ) {
        let (bc, l1) = c.compose(&b).unwrap();
        let (left, l2) = bc.compose(&a).unwrap();
        let (ab, l3) = b.compose(&a).unwrap();
        let (right, l4) = c.compose(&ab).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(l1 + l2, l3 + l4);
    }

    /// The adjoint of a partition is the adjoint tensor.
    #[test]
    fn adjoint_commutes_with_functor(p in (0usize..=3, 0usize..=3).prop_flat_map(|(k, l)| partition(k, l)), n in 2usize..=3) {
        let t: QTensor = functor_t(&p, n).unwrap();
        prop_assert_eq!(functor_t::<BigRational>(&p.adjoint(), n).unwrap(), t.adjoint());
    }

    /// The closed-form Fourier-transformed block intertwiner equals explicit conjugation.
    #[test]
    fn block_intertwiner_closed_form(orders in orders(), k in 0usize..=2, l in 0usize..=2) {
        prop_assume!(k + l > 0);
        let g = AbelianGroup::new(&orders).unwrap();
        let t: Tensor = functor_t(&Partition::block(k, l), g.size() as usize).unwrap();
        prop_assert_eq!(hat_block_intertwiner(&g, k, l).unwrap(), fourier_conjugate_tensor(&g, &t).unwrap());
    }
}
