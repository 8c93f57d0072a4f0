use super::*;
use crate::exactlin::q;
use crate::filphi::sample::random_module;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rank2() -> FilteredPhiModule {
    let (m, _) = crate::filphi::build_from_parameter(
        5,
        vec![q(1), ExactScalar::new(2.into(), 5.into())],
        &[vec![1, 0]],
        &crate::filphi::HodgeData::Rows(vec![vec![vec![q(1), q(1)], vec![q(1), q(0)]]]),
        crate::filphi::BuildOptions::default(),
    )
    .unwrap();
    m
}

#[test]
fn automorphic_model_dimensions() {
    let m = build_aut_model(3, 1).unwrap();
    assert_eq!(m.target_dim(), 10);
    assert_eq!(m.image_dim(), 10);
    assert_eq!(m.relations().dim(), 6 * 6 - 10);
    let m2 = build_aut_model(2, 2).unwrap();
    assert_eq!(m2.target_dim(), 2 + 3 * 2);
    assert_eq!(m2.image_dim(), m2.target_dim());
}

#[test]
fn automorphic_routes_intertwine() {
    for n in 2..=4 {
        for d in 1..=2 {
            let m = build_aut_model(n, d).unwrap();
            for shape in ParabolicShape::all(n) {
                let (count, failures) = m.check_intertwining(&shape).unwrap();
                assert!(count > 0);
                assert!(failures.is_empty(), "{failures:?}");
            }
        }
    }
}

#[test]
fn galois_model_rank2() {
    let g = build_gal_model(&rank2()).unwrap();
    assert_eq!(g.model().target_dim(), 5);
    assert_eq!(g.model().image_dim(), 5);
}

#[test]
fn galois_model_rank3() {
    let d = Egl3Template::standard(5).module(&q(2)).unwrap();
    let g = build_gal_model(&d).unwrap();
    assert_eq!(g.v_dim(), 14);
    assert_eq!(g.l_dim(), 5);
    assert_eq!(g.model().target_dim(), 9);
    assert!(g.relations_checked() > 0);
    for shape in ParabolicShape::all(3) {
        assert!(g.model().check_intertwining(&shape).unwrap().1.is_empty());
    }
}

#[test]
fn kernel_dimensions_small_rank() {
    let r2 = kernel_report(&rank2()).unwrap();
    assert_eq!(r2.dims.ker, 0);
    assert!(r2.checks.iter().all(|c| c.pass), "{:?}", r2.checks);
    let d = Egl3Template::standard(5).module(&q(3)).unwrap();
    let r3 = kernel_report(&d).unwrap();
    assert_eq!((r3.dims.aut, r3.dims.gal, r3.dims.ker), (10, 9, 1));
    assert!(r3.checks.iter().all(|c| c.pass), "{:?}", r3.checks);
}

#[test]
fn recursive_and_direct_models_share_the_kernel() {
    let d = Egl3Template::standard(7).module(&q(-2)).unwrap();
    let comp = t_d_for_module(&d).unwrap();
    let direct = t_d(&comp.model.aut, comp.gal.direct().model()).unwrap();
    assert_eq!(direct.ker, comp.model.ker);
    assert_eq!(direct.kernel_hash(), comp.model.kernel_hash());
}

#[test]
fn kernel_rank4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = random_module(&mut rng, 5, 4, 1, true).unwrap();
    let r = kernel_report(&d).unwrap();
    assert_eq!(r.dims.ker, 5);
    assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
}

#[test]
fn kernel_with_two_embeddings() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = random_module(&mut rng, 5, 3, 2, true).unwrap();
    let r = kernel_report(&d).unwrap();
    assert!(r.checks.iter().all(|c| c.pass), "{:?}", r.checks);
}

#[test]
fn hodge_recovery_is_injective() {
    let t = Egl3Template::standard(5);
    let samples: Vec<ExactScalar> =
        [2, 3, 5, -1, 7].iter().map(|&k| q(k)).chain([ExactScalar::new(1.into(), 2.into())]).collect();
    let seq = hodge_recovery(&t, &samples, false).unwrap();
    assert!(seq.injective && seq.round_trip_ok);
    let par = hodge_recovery(&t, &samples, true).unwrap();
    assert_eq!(seq, par);
    let dup = hodge_recovery(&t, &[q(2), q(3), q(2)], false).unwrap();
    assert_eq!(dup.duplicates, vec!["2".to_string()]);
    assert!(dup.injective && dup.round_trip_ok);
}

#[test]
fn surrogate_grid_passes() {
    let t = Egl3Template::standard(5);
    let checks = validate_surrogate(&t, &default_grid(12), None).unwrap();
    assert!(checks.iter().all(|c| c.pass), "{checks:?}");
}

#[test]
fn corrupted_surrogate_is_named() {
    let t = Egl3Template::standard(5);
    for c in [Corruption::CollapseIminus, Corruption::KillIplus] {
        let checks = validate_surrogate(&t, &default_grid(4), Some(c)).unwrap();
        assert!(checks.iter().any(|k| !k.pass && k.name.contains("dim")), "{c:?}: {checks:?}");
        assert!(build_gal_model_with(&t.module(&q(2)).unwrap(), Some(c)).is_err());
    }
}

#[test]
fn degenerate_ratios_rejected() {
    let t = Egl3Template::standard(5);
    for (a, b) in [(q(0), q(1)), (q(2), q(2)), (q(1), q(0))] {
        let e = t.module_for_ratio(&a, &b).unwrap_err();
        assert!(e.to_string().contains("non-degenerate-ratio"));
    }
}

#[test]
fn higher_intertwining_examples() {
    let d = Egl3Template::standard(5).module(&q(2)).unwrap();
    let (d1, _) = d.d1_c1().unwrap();
    let direct = DirectGal::new(&d1).unwrap();
    let zero = vec![q(0); direct.dim()];
    let h = higher_intertwining_check(&d, &zero, &[q(0), q(0)]).unwrap();
    assert!(h.holds);
    let psi = [q(1), q(0)];
    let t = direct.twist(&psi);
    let h = higher_intertwining_check(&d, &t, &psi).unwrap();
    assert!(h.holds);
    assert!(higher_intertwining_check(&d, &zero, &[q(0)]).is_err());
}
