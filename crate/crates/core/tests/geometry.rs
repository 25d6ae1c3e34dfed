use nalgebra::DVector;

use qsl_core::geom::{gate_geodesic_check, survey_geodesic_vectors};
use qsl_core::matcore::haar_su;
use qsl_core::phfun::{PHFunctionSpec, RandersData};
use qsl_core::Tolerances;

fn randers(n: usize, b: &[f64]) -> PHFunctionSpec {
    PHFunctionSpec::randers(RandersData::with_identity_metric(n, DVector::from_vec(b.to_vec())).unwrap())
}

#[test]
fn randers_with_oneform_is_far_from_geodesic_somewhere() {
    let tol = Tolerances::default();
    for (n, b) in [(2, vec![0.2, -0.1, 0.05]), (3, vec![0.1, 0.0, -0.2, 0.0, 0.05, 0.0, 0.0, 0.1])] {
        let survey = survey_geodesic_vectors(&randers(n, &b), n, 100, 5, tol.fd_step, tol.geodesic).unwrap();
        assert!(survey.max_normalized > 1e-3, "N={n}: {:e}", survey.max_normalized);
    }
}

#[test]
fn randers_with_oneform_fails_on_haar_gates() {
    let tol = Tolerances::default();
    let f = randers(2, &[0.3, 0.0, 0.1]);
    let failures = (0..10)
        .filter(|&s| !gate_geodesic_check(&f, &haar_su(2, 300 + s), tol.fd_step, tol.geodesic).unwrap().passes)
        .count();
    assert_eq!(failures, 10);
}
