mod common;

use common::{angle, dense_smallest, oracle_pencils};
use spectra::eigensolver::smallest_eigenpair;

#[test]
fn sparse_matches_dense_on_assembled_pencils() {
    let pencils = oracle_pencils();
    assert!(pencils.len() >= 5);
    for (name, a, b) in &pencils {
        assert!(a.dim() <= 200, "{name} has {} unknowns", a.dim());
        let got = smallest_eigenpair(a, b, 1e-12).unwrap();
        let (want, vec) = dense_smallest(a, b);
        let rel = (got.value - want).abs() / want.abs();
        let theta = angle(&got.vector, &vec);
        assert!(rel < 1e-8, "{name}: eigenvalue {} vs {want} (rel {rel:e})", got.value);
        assert!(theta < 1e-6, "{name}: eigenvector angle {theta:e}");
    }
}

#[test]
fn eigenvector_is_mass_normalized_and_positive() {
    for (name, a, b) in oracle_pencils() {
        let p = smallest_eigenpair(&a, &b, 1e-12).unwrap();
        assert!((b.quadratic_form(&p.vector) - 1.0).abs() < 1e-10, "{name}");
        assert!(p.vector.iter().all(|&v| v >= -1e-12), "{name}: principal vector changes sign");
    }
}
