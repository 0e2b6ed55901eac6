//! Closed-form total spaces: products and toric manifolds whose invariants
//! are known independently.

mod common;

use common::polygon;
use loctorus::base_complex::build_surface_base;
use loctorus::four_manifold::{fundamental_group_report, total_signature, BoundaryContribution, BoundaryFacetData, NecklaceFacet};
use loctorus::spectral::{euler_characteristic, k_groups, total_cohomology, Fibration};
use loctorus::torus_data::{CharacteristicData, MonodromyData};
use loctorus::AbelianGroup;

fn necklace(vs: &[[i64; 2]]) -> BoundaryContribution {
    let k = vs.len();
    BoundaryContribution::Necklace(BoundaryFacetData {
        facets: (0..k)
            .map(|i| NecklaceFacet::from_i64(vs[(i + k - 1) % k], vs[i], vs[(i + 1) % k]))
            .collect(),
    })
}

#[test]
fn square_is_a_product_of_spheres() {
    let vs = [[1, 0], [0, 1], [-1, 0], [0, -1]];
    let (b, m, ch) = polygon(&vs);
    let fib = Fibration::new(&b, &m, &ch, true).unwrap();
    let h = total_cohomology(&fib).unwrap();
    assert!(h.assembled);
    assert_eq!(h.ranks(), vec![1, 0, 2, 0, 1]);
    assert!((0..=4).all(|k| h.group(k).unwrap().is_free()));
    let k = k_groups(&fib).unwrap();
    assert_eq!(k.group(0), Some(&AbelianGroup::free(4)));
    assert_eq!(k.group(1), Some(&AbelianGroup::zero()));
    assert_eq!(euler_characteristic(&b), 4);
    assert_eq!(total_signature(true, &[], &[necklace(&vs)]).unwrap().sigma_total, 0);
    assert_eq!(fundamental_group_report(&b, true).to_string(), "pi1(X) = pi1(B) = 1");
}

#[test]
fn triangle_is_the_projective_plane() {
    let vs = [[1, 0], [0, 1], [-1, -1]];
    let (b, m, ch) = polygon(&vs);
    let fib = Fibration::new(&b, &m, &ch, true).unwrap();
    let h = total_cohomology(&fib).unwrap();
    assert_eq!(h.ranks(), vec![1, 0, 1, 0, 1]);
    let k = k_groups(&fib).unwrap();
    assert_eq!(k.group(0), Some(&AbelianGroup::free(3)));
    let s = total_signature(true, &[], &[necklace(&vs)]).unwrap();
    assert_eq!(s.sigma_total, 1);
    assert_eq!(s.components[0].matrix.as_ref().unwrap().to_rows().concat(), vec![1.into(); 9]);
}

#[test]
fn annulus_with_parallel_circles_is_sphere_times_torus() {
    let b = build_surface_base(0, &[0, 0]);
    let m = MonodromyData::trivial(2, &["gamma1", "gamma2"]);
    let ch = CharacteristicData::from_i64(&[("F1", &[1, 0]), ("F2", &[1, 0])]);
    let fib = Fibration::new(&b, &m, &ch, true).unwrap();
    let h = total_cohomology(&fib).unwrap();
    assert_eq!(h.ranks(), vec![1, 2, 2, 2, 1]);
    assert_eq!(euler_characteristic(&b), 0);
    let pi1 = fundamental_group_report(&b, true);
    assert!(pi1.to_string().contains("not asserted"));
}
