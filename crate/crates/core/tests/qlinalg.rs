use num_complex::Complex64;
use proptest::prelude::*;
use qphase::qlinalg::{hermitian_eig, psd_project, von_neumann_entropy, SquareMatrix};
use qphase::HermitianMatrix;

fn hermitian(dim: usize, entries: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_fn(dim, |j, k| Complex64::new(entries[2 * (j * dim + k)], entries[2 * (j * dim + k) + 1]))
}

fn matrix_strategy() -> impl Strategy<Value = HermitianMatrix> {
    (1usize..12).prop_flat_map(|d| prop::collection::vec(-3.0f64..3.0, 2 * d * d).prop_map(move |v| hermitian(d, &v)))
}

#[test]
fn small_spectra() {
    assert_eq!(hermitian_eig(&HermitianMatrix::identity(3)).unwrap().eigenvalues, vec![1.0; 3]);
    let e = hermitian_eig(&HermitianMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
    assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
    let x = HermitianMatrix::from_fn(2, |j, k| Complex64::new(if j == k { 0.0 } else { 1.0 }, 0.0));
    let e = hermitian_eig(&x).unwrap();
    assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14 && (e.eigenvalues[1] - 1.0).abs() < 1e-14);
    let v = e.eigenvector(0);
    assert!((v[0].re - 0.5f64.sqrt()).abs() < 1e-14 && (v[1].re + 0.5f64.sqrt()).abs() < 1e-14);
}

#[test]
fn entropy_examples() {
    let pure = HermitianMatrix::projector(&[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)], 1.0);
    assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
    assert!((von_neumann_entropy(&HermitianMatrix::identity(8).scale(0.125)).unwrap() - 3.0).abs() < 1e-12);
    assert!((von_neumann_entropy(&HermitianMatrix::diagonal(&[0.5, 0.5, 0.0])).unwrap() - 1.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn eigensystem_invariants(m in matrix_strategy()) {
        let e = hermitian_eig(&m).unwrap();
        let scale = m.frobenius_norm().max(1.0);
        for w in e.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for i in 0..m.dim() {
            let v = e.eigenvector(i);
            let mv = m.as_matrix().mul_vec(&v);
            let res: f64 = mv.iter().zip(&v).map(|(a, b)| (a - b * e.eigenvalues[i]).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-10 * scale);
            let lead = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let anchor = v.iter().find(|z| z.norm() >= lead * (1.0 - 1e-9)).unwrap();
            prop_assert!(anchor.im.abs() < 1e-12 && anchor.re >= 0.0);
        }
        let v = &e.eigenvectors;
        let gram = &v.adjoint() * v;
        prop_assert!((&gram - &SquareMatrix::identity(m.dim())).frobenius_norm() <= 1e-10);
        prop_assert!(e.reconstruct().sub(&m).frobenius_norm() <= 1e-9 * scale);
    }

    #[test]
    fn projection_is_idempotent(m in matrix_strategy()) {
        let p = psd_project(&m).unwrap();
        prop_assert!(hermitian_eig(&p).unwrap().eigenvalues[0] >= -1e-12);
        prop_assert!(psd_project(&p).unwrap().sub(&p).frobenius_norm() <= 1e-12 * m.frobenius_norm().max(1.0));
    }
}
