//! Property-based checks of algebraic identities across the library.

use hodgepar::charspace::{weyl_act, CharVector};
use hodgepar::exactlin::{kernel, q, ExactScalar, Matrix, Subspace};
use hodgepar::extcalc::{t_d_for_module, Egl3Template};
use hodgepar::filphi::sample::random_module;
use hodgepar::filphi::{extension_class, extension_module};
use hodgepar::Perm;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..=3, rows * cols)
        .prop_map(move |v| Matrix::from_fn(rows, cols, |r, c| q(v[r * cols + c])))
}

fn parameter() -> impl Strategy<Value = ExactScalar> {
    (-12i64..=12, 1i64..=6)
        .prop_map(|(a, b)| ExactScalar::new(a.into(), b.into()))
        .prop_filter("non-critical parameter", |x| *x != q(0) && *x != q(1))
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_and_intersection_dimensions(a in small_matrix(3, 6), b in small_matrix(4, 6)) {
        let u = Subspace::from_row_matrix(&a);
        let v = Subspace::from_row_matrix(&b);
        let sum = u.sum(&v).unwrap();
        let inter = u.intersect(&v).unwrap();
        prop_assert_eq!(sum.dim() + inter.dim(), u.dim() + v.dim());
        prop_assert_eq!(sum.dim(), a.vstack(&b).rank());
        prop_assert!(sum.contains_subspace(&u) && u.contains_subspace(&inter));
    }

    #[test]
    fn rank_nullity(m in small_matrix(4, 7)) {
        prop_assert_eq!(m.rank() + kernel(&m).dim(), 7);
        for v in kernel(&m).basis_vectors() {
            prop_assert!(m.apply(&v).iter().all(|x| *x == q(0)));
        }
    }

    #[test]
    fn canonical_form_ignores_spanning_set(a in small_matrix(3, 5), mix in small_matrix(3, 3)) {
        let u = Subspace::from_row_matrix(&a);
        let w = Subspace::from_row_matrix(&mix.mul(&a).vstack(&a));
        prop_assert_eq!(u.canonical_string(), w.canonical_string());
    }

    #[test]
    fn weyl_action_is_a_left_action(w1 in perm(4), w2 in perm(4), v in prop::collection::vec(-5i64..=5, 12)) {
        let psi = CharVector::from_flat(4, 2, &v.iter().map(|&x| q(x)).collect::<Vec<_>>()).unwrap();
        let lhs = weyl_act(&w1.compose(&w2), &psi).unwrap();
        let rhs = weyl_act(&w1, &weyl_act(&w2, &psi).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hodge_parameter_round_trip(a in parameter(), t in prop::collection::vec(1i64..=9, 3)) {
        let m = Egl3Template::standard(5).module(&a).unwrap();
        let torus: Vec<ExactScalar> = t.iter().map(|&x| q(x)).collect();
        prop_assert_eq!(m.extract_a3(0).unwrap(), a.clone());
        prop_assert_eq!(m.rescale(&torus).unwrap().extract_a3(0).unwrap(), a);
    }

    #[test]
    fn extension_class_rebuilds_the_module(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_module(&mut rng, 5, 3, 1, true).unwrap();
        let (n, m, c) = extension_class(&x, &[0, 1]).unwrap();
        let rebuilt = extension_module(&n, &m, &c).unwrap();
        prop_assert!(rebuilt.isomorphic(&x).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_is_an_isomorphism_invariant(a in parameter(), t in prop::collection::vec(1i64..=9, 3)) {
        let m = Egl3Template::standard(7).module(&a).unwrap();
        let torus: Vec<ExactScalar> = t.iter().map(|&x| q(x)).collect();
        let k1 = t_d_for_module(&m).unwrap().model.ker;
        let k2 = t_d_for_module(&m.rescale(&torus).unwrap()).unwrap().model.ker;
        prop_assert_eq!(k1, k2);
    }
}
