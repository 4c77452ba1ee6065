use proptest::prelude::*;

use wignerlab::eigensolve::{bisection_eigenvalues, count_below, count_in_interval, tridiagonalize};
use wignerlab::{builtin_ensemble, eigen_full, eigenvalues, sample_matrix, Builtin, Complex64, HermitianMatrix, Interval};

fn wigner(b: Builtin, n: usize, seed: u64) -> HermitianMatrix {
    sample_matrix(&builtin_ensemble(b), n, seed).wigner_view()
}

#[test]
fn residual_and_orthogonality_over_seeds() {
    for n in [10, 50, 200] {
        for seed in 0..100 {
            let b = if seed % 2 == 0 { Builtin::Gue } else { Builtin::Goe };
            let h = wigner(b, n, seed);
            let d = eigen_full(&h).unwrap();
            assert!(d.residual() <= 1e-10, "n={n} seed={seed}: residual {}", d.residual());
            assert!(d.gram_error() <= 1e-10, "n={n} seed={seed}: gram {}", d.gram_error());
            let t = tridiagonalize(&h, false);
            let bis = bisection_eigenvalues(&t);
            let scale = t.norm_inf().max(1.0);
            for (x, y) in d.eigenvalues().iter().zip(&bis) {
                assert!((x - y).abs() <= 1e-10 * scale, "n={n} seed={seed}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn shift_equivariance() {
    for seed in 0..10 {
        let h = wigner(Builtin::BernoulliComplex, 40, seed);
        let base = eigenvalues(&h).unwrap();
        for t in [-3.0, 0.5, 7.25] {
            let shifted = eigenvalues(&h.shifted(t)).unwrap();
            for (a, b) in base.iter().zip(&shifted) {
                assert!((a + t - b).abs() < 1e-11 * (1.0 + t.abs()));
            }
        }
    }
}

#[test]
fn sturm_partition_is_additive() {
    for seed in 0..20 {
        let n = 120;
        let t = tridiagonalize(&wigner(Builtin::ThreePointGoeMatched, n, seed), false);
        let r = 2.0 * t.norm_inf() + 1.0;
        let cuts = [-r, -1.5, -0.7, -0.1, 0.0, 0.3, 0.9, 1.8, r];
        let total: usize = cuts
            .windows(2)
            .map(|w| count_in_interval(&t, Interval::new(w[0], w[1]).unwrap()))
            .sum();
        assert_eq!(total, n);
        assert_eq!(count_below(&t, -r), 0);
        assert_eq!(count_below(&t, r), n);
    }
}

#[test]
fn sturm_matches_sorted_spectrum() {
    let h = wigner(Builtin::Gue, 80, 3);
    let eigs = eigenvalues(&h).unwrap();
    let t = tridiagonalize(&h, false);
    for x in [-2.5, -1.0, -0.2, 0.0, 0.4, 1.3, 2.5] {
        let expected = eigs.iter().filter(|&&l| l < x).count();
        assert_eq!(count_below(&t, x), expected, "x = {x}");
    }
}

fn arb_hermitian() -> impl Strategy<Value = HermitianMatrix> {
    (1usize..9).prop_flat_map(|n| {
        prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), n * n).prop_map(move |v| {
            HermitianMatrix::from_upper(n, |i, j| {
                let (re, im) = v[i * n + j];
                if i == j {
                    Complex64::new(re, 0.0)
                } else {
                    Complex64::new(re, im)
                }
            })
        })
    })
}

proptest! {
    #[test]
    fn random_hermitian_decomposes(h in arb_hermitian()) {
        let d = eigen_full(&h).unwrap();
        prop_assert!(d.residual() <= 1e-12 * h.max_abs().max(1.0) * h.n() as f64);
        prop_assert!(d.gram_error() <= 1e-12);
        prop_assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = (0..h.n()).map(|i| h.get(i, i).re).sum();
        let sum: f64 = d.eigenvalues().iter().sum();
        prop_assert!((trace - sum).abs() <= 1e-10 * (1.0 + h.max_abs() * h.n() as f64));
    }

    #[test]
    fn sturm_counts_are_monotone(h in arb_hermitian(), a in -20.0f64..20.0, w in 0.0f64..10.0) {
        let t = tridiagonalize(&h, false);
        prop_assert!(count_below(&t, a) <= count_below(&t, a + w));
    }
}
