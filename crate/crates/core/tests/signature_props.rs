mod common;

use common::{sl2_word, worked_example};
use loctorus::four_manifold::{
    auto_trinions, blow_up_corner, fundamental_group_report, meyer_tau1, necklace_matrix, total_signature,
    BoundaryContribution, BoundaryFacetData, NecklaceFacet, SignatureError, SingleCornerData,
};
use loctorus::{int_matrix, int_vector, IntegerMatrix};
use proptest::prelude::*;

fn tau(a: &IntegerMatrix, b: &IntegerMatrix) -> i64 {
    meyer_tau1(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn meyer_cocycle_identity(a in sl2_word(), b in sl2_word(), c in sl2_word()) {
        let lhs = tau(&a, &b) + tau(&(&a * &b), &c);
        let rhs = tau(&a, &(&b * &c)) + tau(&b, &c);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn meyer_vanishes_on_identity(c in sl2_word()) {
        let id = IntegerMatrix::identity(2);
        prop_assert_eq!(tau(&id, &c), 0);
        prop_assert_eq!(tau(&c, &id), 0);
    }

    #[test]
    fn meyer_is_bounded(a in sl2_word(), b in sl2_word()) {
        prop_assert!(tau(&a, &b).abs() <= 2);
    }
}

#[test]
fn meyer_reference_values() {
    let s = int_matrix(&[[0, -1], [1, 0]]);
    let t = int_matrix(&[[1, 1], [0, 1]]);
    let t_inv = int_matrix(&[[1, -1], [0, 1]]);
    let s_inv = int_matrix(&[[0, 1], [-1, 0]]);
    assert_eq!(tau(&s, &s), -2);
    assert_eq!(tau(&t, &t), 1);
    assert_eq!(tau(&s, &t), 1);
    assert_eq!(tau(&t, &s), 1);
    assert_eq!(tau(&t_inv, &t), 0);
    assert_eq!(tau(&s, &s_inv), 0);
}

#[test]
fn non_symplectic_input_is_rejected() {
    let bad = int_matrix(&[[1, 0], [0, -1]]);
    assert!(matches!(
        meyer_tau1(&bad, &IntegerMatrix::identity(2)),
        Err(SignatureError::NotSymplectic(_))
    ));
}

#[test]
fn worked_example_signature() {
    let (b, m, _) = worked_example();
    let pairs = auto_trinions(&b, &m, 1).unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0].c1, int_matrix(&[[1, 0], [1, 1]]));
    assert_eq!(pairs[0].c2, int_matrix(&[[0, -1], [1, 3]]));
    let corner = SingleCornerData {
        v: int_vector(&[1, 0]),
        other: int_vector(&[0, 1]),
        monodromy: int_matrix(&[[3, 1], [-1, 0]]),
    };
    let blow = blow_up_corner(&corner).unwrap();
    assert_eq!(blow.u1, int_vector(&[4, -1]));
    assert_eq!(blow.u2, int_vector(&[1, 1]));
    let s = total_signature(true, &pairs, &[BoundaryContribution::Corner(corner.clone())]).unwrap();
    assert_eq!(s.tau_values, vec![0]);
    assert_eq!(s.components[0].matrix, Some(int_matrix(&[[-1, 2], [2, -5]])));
    assert_eq!(s.components[0].signature, -2);
    assert_eq!(s.sigma_total, -1);
    assert_eq!(
        total_signature(false, &pairs, &[BoundaryContribution::Corner(corner)]).unwrap_err(),
        SignatureError::OrientationMissing
    );
    let pi1 = fundamental_group_report(&b, true);
    assert_eq!(pi1.free_rank, Some(2));
    assert_eq!(pi1.h1_consistent(), Some(true));
}

fn necklace(vs: &[[i64; 2]]) -> BoundaryFacetData {
    let k = vs.len();
    BoundaryFacetData {
        facets: (0..k)
            .map(|i| NecklaceFacet::from_i64(vs[(i + k - 1) % k], vs[i], vs[(i + 1) % k]))
            .collect(),
    }
}

#[test]
fn toric_necklaces() {
    let square = necklace(&[[1, 0], [0, 1], [-1, 0], [0, -1]]);
    let s = total_signature(true, &[], &[BoundaryContribution::Necklace(square)]).unwrap();
    assert_eq!(s.sigma_total, 0);

    let triangle = necklace(&[[1, 0], [0, 1], [-1, -1]]);
    let m = necklace_matrix(&triangle).unwrap();
    assert_eq!(m, int_matrix(&[[1, 1, 1], [1, 1, 1], [1, 1, 1]]));
    let s = total_signature(true, &[], &[BoundaryContribution::Necklace(triangle)]).unwrap();
    assert_eq!(s.sigma_total, 1);

    let wrong_order = necklace(&[[0, 1], [1, 0], [-1, -1]]);
    assert!(matches!(
        necklace_matrix(&wrong_order),
        Err(SignatureError::NormalizationViolation { .. })
    ));
    assert!(matches!(
        necklace_matrix(&necklace(&[[1, 0]])),
        Err(SignatureError::KTooSmall(1))
    ));
}
