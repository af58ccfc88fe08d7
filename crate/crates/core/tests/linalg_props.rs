use proptest::prelude::*;
use stringbord_core::f2::{F2Matrix, F2Vector, Subspace};

fn matrix() -> impl Strategy<Value = F2Matrix> {
    (1usize..12, 1usize..80).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(
            move |rows| F2Matrix::from_rows(c, rows.into_iter().map(F2Vector::from_bits).collect()),
        )
    })
}

proptest! {
    #[test]
    fn transform_times_m_is_reduced(m in matrix()) {
        let rr = m.rref();
        prop_assert_eq!(rr.transform.mul(&m), rr.reduced.clone());
        prop_assert!(rr.pivots.windows(2).all(|w| w[0] < w[1]));
        for (row, &p) in rr.pivots.iter().enumerate() {
            let col = rr.reduced.column(p);
            prop_assert_eq!(col, F2Vector::unit(m.rows(), row));
        }
        for row in rr.rank()..m.rows() {
            prop_assert!(rr.reduced.row(row).is_zero());
        }
    }

    #[test]
    fn rank_matches_transpose(m in matrix()) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert_eq!(m.rank(), m.rref().rank());
    }

    #[test]
    fn kernel_is_annihilated_and_complete(m in matrix()) {
        let k = m.kernel_basis();
        for v in &k {
            prop_assert!(m.mul_vec(v).is_zero());
        }
        prop_assert_eq!(Subspace::from_vectors(m.cols(), k.iter().cloned()).dim(), k.len());
        prop_assert_eq!(k.len() + m.rank(), m.cols());
    }

    #[test]
    fn left_kernel_is_annihilated(m in matrix()) {
        let k = m.left_kernel_basis();
        for v in &k {
            prop_assert!(m.vec_mul(v).is_zero());
        }
        prop_assert_eq!(k.len() + m.rank(), m.rows());
    }

    #[test]
    fn solve_finds_witness(m in matrix(), seed in any::<u64>()) {
        let x = F2Vector::from_bits((0..m.cols()).map(|i| (seed.rotate_left(i as u32) & 1) == 1));
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap().expect("b is in the column space");
        prop_assert_eq!(m.mul_vec(&y), b);
    }
}
