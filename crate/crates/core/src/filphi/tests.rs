use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sample::{random_egl3, random_module};
use super::*;
use crate::exactlin::{q, qr};

fn egl3(p: u64, alphas: &[i64], h: &[i64], a: i64) -> (FilteredPhiModule, AdmissibilityReport) {
    build_from_parameter(
        p,
        alphas.iter().map(|&x| q(x)).collect(),
        &[h.to_vec()],
        &HodgeData::Egl3(vec![q(a)]),
        BuildOptions::default(),
    )
    .unwrap()
}

fn admissible_egl3(a: i64) -> FilteredPhiModule {
    // α = (1, 2p^{-1}, 3p^{-2}) against weights (2, 1, 0) at p = 5.
    let alphas = vec![q(1), qr(2, 5), qr(3, 25)];
    build_from_parameter(5, alphas, &[vec![2, 1, 0]], &HodgeData::Egl3(vec![q(a)]), BuildOptions::default()).unwrap().0
}

#[test]
fn filtration_normalisation() {
    let f = Filtration::from_flag(&[2, 1, 0], &egl3_rows(&q(5))).unwrap();
    assert_eq!(f.jumps(), vec![-2, -1, 0]);
    assert_eq!(f.weights(), vec![2, 1, 0]);
    assert_eq!(f.at(-5).dim(), 3);
    assert_eq!(f.at(-1).dim(), 2);
    assert_eq!(f.at(0).dim(), 1);
    assert_eq!(f.at(1).dim(), 0);
    assert!(f.is_regular());
    let g = Filtration::from_flag(&[1, 1, 0], &egl3_rows(&q(5))).unwrap();
    assert_eq!(g.jumps(), vec![-1, -1, 0]);
    assert!(!g.is_regular());
    assert_eq!(g.steps().len(), 2);
}

#[test]
fn cyclotomic_character_is_admissible() {
    let f = Filtration::single_jump(1, -1);
    let m = FilteredPhiModule::new(5, vec![qr(1, 5)], vec![f.clone()]).unwrap();
    let r = m.admissibility_report().unwrap();
    assert_eq!((r.t_n, r.t_h), (-1, -1));
    assert!(r.admissible);
    let bad = FilteredPhiModule::new(5, vec![q(5)], vec![f]).unwrap();
    assert!(!bad.weak_admissibility().unwrap());
}

#[test]
fn integral_eigenvalues_against_positive_weights_fail() {
    let (m, r) = egl3(7, &[1, 2, 4], &[2, 1, 0], 5);
    assert!(m.genericity_check());
    assert!(!r.admissible);
    assert_eq!((r.t_n, r.t_h), (0, -3));
    let strict = BuildOptions { admissibility: AdmissibilityPolicy::Require, require_noncritical: true };
    let err = build_from_parameter(7, vec![q(1), q(2), q(4)], &[vec![2, 1, 0]], &HodgeData::Egl3(vec![q(5)]), strict);
    assert!(matches!(err, Err(Error::NotAdmissible(_))));
}

#[test]
fn admissible_rank_two_example() {
    let rows = HodgeData::Rows(vec![vec![vec![q(1), q(1)], vec![q(1), q(0)]]]);
    let (_, r) = build_from_parameter(5, vec![q(1), qr(2, 5)], &[vec![1, 0]], &rows, BuildOptions::default()).unwrap();
    assert!(r.admissible);
    let (_, r) = build_from_parameter(5, vec![q(1), q(10)], &[vec![1, 0]], &rows, BuildOptions::default()).unwrap();
    assert!(!r.admissible);
}

#[test]
fn hodge_parameter_roundtrip_and_torus_invariance() {
    for a in [5, -2, 7, 3] {
        let m = admissible_egl3(a);
        assert!(m.noncritical_all().unwrap());
        assert_eq!(m.extract_a3(0).unwrap(), q(a));
        let moved = m.rescale(&[q(3), qr(-1, 2), q(7)]).unwrap();
        assert_ne!(moved.filtration(0), m.filtration(0));
        assert_eq!(moved.extract_a3(0).unwrap(), q(a));
        assert!(m.isomorphic(&moved).unwrap());
        assert_eq!(moved.hodge_parameter(0).unwrap(), m.hodge_parameter(0).unwrap());
    }
    assert!(!admissible_egl3(5).isomorphic(&admissible_egl3(3)).unwrap());
}

#[test]
fn critical_parameters_are_rejected() {
    for a in [0, 1] {
        let res = build_from_parameter(
            5,
            vec![q(1), qr(2, 5), qr(3, 25)],
            &[vec![2, 1, 0]],
            &HodgeData::Egl3(vec![q(a)]),
            BuildOptions::default(),
        );
        assert!(matches!(res, Err(Error::NoncriticalRequired(_))), "a = {a}");
    }
}

#[test]
fn isomorphism_witness_is_a_torus_element() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let m = random_module(&mut rng, 5, 3, 2, true).unwrap();
        let t = vec![q(2), q(-3), qr(5, 7)];
        let moved = m.rescale(&t).unwrap();
        match m.isomorphism(&moved).unwrap() {
            IsoVerdict::Yes(s) => assert_eq!(m.rescale(&s).unwrap(), moved),
            IsoVerdict::No(r) => panic!("not isomorphic: {r}"),
        }
    }
}

#[test]
fn ext1_dimension_of_endomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, d) in [(2, 1), (3, 1), (2, 2), (3, 2), (4, 1)] {
        let m = random_module(&mut rng, 5, n, d, true).unwrap();
        assert_eq!(hom_filtered(&m, &m).unwrap().dim(), 1, "End at n={n} d={d}");
        let ext = Ext1Space::new(&m, &m).unwrap();
        assert_eq!(ext.dim(), 1 + n * (n - 1) / 2 * d, "n={n} d={d}");
        assert_eq!(fil0_hom(&m, &m, 0).unwrap().dim(), n * (n + 1) / 2);
    }
}

#[test]
fn eigen_deformation_vanishes_on_coboundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = random_module(&mut rng, 5, 3, 2, true).unwrap();
    let ext = Ext1Space::new(&m, &m).unwrap();
    let c = Morphism::new(vec![
        Matrix::from_i64(&[&[1, 2, 0], &[0, 3, 1], &[4, 0, 5]]),
        Matrix::from_i64(&[&[2, 0, 1], &[1, 1, 0], &[0, 7, 1]]),
    ]);
    let cob = Ext1Space::coboundary(&m, &m, &c);
    assert!(ext.is_trivial(&cob).unwrap());
    assert!(ext.eigen_deformation(&cob).unwrap().iter().all(Zero::is_zero));
    // The eigenvalue deformation is onto E^n.
    assert_eq!(ext.eigen_deformation_matrix().unwrap().rank(), 3);
}

#[test]
fn rank_three_hom_from_d1_to_c1() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let m = random_egl3(&mut rng, 5, 1).unwrap();
        let (d1, c1) = m.d1_c1().unwrap();
        let homs = hom_filtered(&d1, &c1).unwrap();
        assert_eq!(homs.dim(), 2);
        let alphas = m.alpha_maps().unwrap();
        let a1 = alphas[0].clone().unwrap();
        let a2 = alphas[1].clone().unwrap();
        assert_eq!(a1.maps[0], Matrix::diagonal(&[q(0), q(1)]));
        assert_eq!(a2.maps[0], Matrix::diagonal(&[q(1), q(0)]));
        assert!(a1.is_filtered_phi_map(&d1, &c1).unwrap());
        let iota = m.iota().unwrap();
        assert!(iota.is_filtered_phi_map(&d1, &c1).unwrap());
        let sum: Vec<ExactScalar> = a1.to_flat().iter().zip(a2.to_flat()).map(|(x, y)| x + y).collect();
        assert_eq!(sum, iota.to_flat());
    }
}

#[test]
fn extension_class_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, d) in [(3, 1), (3, 2), (4, 1)] {
        let x = random_module(&mut rng, 5, n, d, true).unwrap();
        let sub: Vec<usize> = (0..n - 1).collect();
        let (nsub, mquo, class) = extension_class(&x, &sub).unwrap();
        let ext = Ext1Space::new(&mquo, &nsub).unwrap();
        assert!(!ext.is_trivial(&class).unwrap());
        let rebuilt = extension_module(&nsub, &mquo, &class).unwrap();
        assert_eq!(rebuilt, x);
        // Any representative of the class gives an isomorphic module.
        let coords = ext.class_of(&class).unwrap();
        let other = extension_module(&nsub, &mquo, &ext.representative(&coords).unwrap()).unwrap();
        assert!(x.isomorphic(&other).unwrap());
    }
}

#[test]
fn collapsed_module_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = random_module(&mut rng, 5, 3, 2, true).unwrap();
    for sigma in 0..2 {
        let c = m.cow_functor(sigma).unwrap();
        assert!(c.noncritical_all().unwrap());
        assert_eq!(c.filtration(sigma), m.filtration(sigma));
        let tau = 1 - sigma;
        assert_eq!(c.filtration(tau).jumps(), vec![-m.weights()[tau][2]; 3]);
        for r in [vec![0usize], vec![0, 2], vec![1, 2]] {
            let (ms, mq) = m.sub_quotient(&r).unwrap();
            let (cs, cq) = c.sub_quotient(&r).unwrap();
            assert_eq!(ms.cow_functor(sigma).unwrap().filtration(sigma), cs.filtration(sigma));
            assert_eq!(mq.cow_functor(sigma).unwrap().filtration(sigma), cq.filtration(sigma));
        }
    }
}

#[test]
fn json_roundtrip_and_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let m = random_module(&mut rng, 5, 3, 2, true).unwrap();
    let text = serde_json::to_string(&m).unwrap();
    assert!(text.contains("\"d_K\":2"));
    assert_eq!(FilteredPhiModule::from_json_str(&text).unwrap(), m);
    let broken = text.replacen("\"alphas\":[\"", "\"alphas\":[\"x", 1);
    match FilteredPhiModule::from_json_str(&broken) {
        Err(Error::Parse { field, .. }) => assert_eq!(field, "alphas[0]"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn genericity_detects_forbidden_ratios() {
    let f = Filtration::single_jump(2, 0);
    let m = FilteredPhiModule::new(5, vec![q(1), q(5)], vec![f.clone()]).unwrap();
    assert!(!m.genericity_check());
    let m = FilteredPhiModule::new(5, vec![q(1), q(25)], vec![f.clone(), f]).unwrap();
    assert!(!m.genericity_check());
    assert!(FilteredPhiModule::new(5, vec![q(2), q(2)], vec![Filtration::single_jump(2, 0)]).is_err());
}

#[test]
fn hodge_class_is_orthogonal_to_iota() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..6 {
        let d = random_module(&mut rng, 5, 3, 1, true).unwrap();
        assert!(d.hodge_pushforward().unwrap().iter().all(Zero::is_zero));
        let (perp, class) = d.hodge_orthogonal().unwrap();
        assert_eq!(perp.dim(), 1);
        assert!(perp.contains(&class));
        let lam = q(-3);
        let scaled: Vec<ExactScalar> = class.iter().map(|c| c * &lam).collect();
        let d2 = d.with_top_class(&scaled).unwrap();
        assert_eq!(d2.d1_c1().unwrap(), d.d1_c1().unwrap());
        assert!(d.isomorphic(&d2).unwrap());
        let mut other = class.clone();
        let k = other.iter().position(|c| c.is_zero()).unwrap_or(0);
        other[k] += q(1);
        let d3 = d.with_top_class(&other).unwrap();
        assert!(!d.isomorphic(&d3).unwrap());
    }
}

#[test]
fn rank_four_hom_depends_on_quotient_isomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (d, want_hom) in [(1, 2), (2, 1)] {
        for _ in 0..3 {
            let m = random_module(&mut rng, 5, 4, d, true).unwrap();
            let (d1, c1) = m.d1_c1().unwrap();
            let alphas = m.alpha_maps().unwrap();
            let all_iso = alphas.iter().all(Option::is_some);
            assert_eq!(all_iso, d == 1);
            assert_eq!(hom_filtered(&d1, &c1).unwrap().dim(), want_hom);
        }
    }
}
