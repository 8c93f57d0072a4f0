//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Every check is exact; runtime budgets are part of the verdict.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hodgepar::exactlin::{q, ExactScalar, Subspace};
use hodgepar::extcalc::{
    build_aut_model, default_grid, hodge_recovery, t_d_for_module, validate_surrogate, Egl3Template,
};
use hodgepar::filphi::sample::{admissible_alphas, random_egl3, random_module, random_scalar, regular_weights};
use hodgepar::filphi::{build_from_parameter, hom_filtered, BuildOptions, Ext1Space, HodgeData};
use hodgepar::glncomb::{exact_sequence_checks, ext_dim, ExtKind};
use hodgepar::{ParabolicShape, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;

/// Name, check and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn dimension_formulas() -> Outcome {
    let mut identities = 0;
    let mut formulas = 0;
    for n in 2..=6 {
        for d in 1..=3 {
            let mut shapes = vec![None];
            shapes.extend(ParabolicShape::all(n).into_iter().map(Some));
            for s in &shapes {
                for c in lift(exact_sequence_checks(n, d, s.as_ref()))? {
                    identities += 1;
                    ensure(c.pass, || {
                        format!("{} at n = {n}, d_K = {d}, shape {s:?}: {} ≠ {}", c.name, c.formula, c.computed)
                    })?;
                }
                for kind in ExtKind::ALL.into_iter().filter(|k| k.needs_shape() == s.is_some() && n >= k.min_n()) {
                    lift(ext_dim(kind, n, d, s.as_ref()))?;
                    formulas += 1;
                }
            }
            let f = |k| ext_dim(k, n, d, None).unwrap();
            ensure(f(ExtKind::AutPi1) - f(ExtKind::GalBar) == f(ExtKind::KerTd), || {
                format!("kernel ledger at ({n}, {d})")
            })?;
        }
    }
    Ok(format!("{identities} identities, {formulas} formula evaluations"))
}

fn filtered_ext() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut count = 0;
    for (n, d) in [(2, 1), (3, 1), (3, 2)] {
        for _ in 0..20 {
            let m = lift(if d == 2 { random_egl3(&mut rng, 5, d) } else { random_module(&mut rng, 5, n, d, true) })?;
            let got = lift(Ext1Space::new(&m, &m))?.dim();
            let want = 1 + n * (n - 1) / 2 * d;
            ensure(got == want, || format!("n = {n}, d_K = {d}: dim {got} ≠ {want}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} modules"))
}

fn hom_dimension() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let m = lift(random_module(&mut rng, 5, 3, 1, true))?;
        let (d1, c1) = lift(m.d1_c1())?;
        let h = lift(hom_filtered(&d1, &c1))?.dim();
        ensure(h == 2, || format!("dim Hom(D₁, C₁) = {h}"))?;
        let maps: Vec<Vec<ExactScalar>> =
            lift(m.alpha_maps())?.into_iter().map(|a| a.expect("α_i exists").to_flat()).collect();
        let span = lift(Subspace::span(maps[0].len(), &maps))?.dim();
        ensure(span == 2, || "α₁, α₂ are dependent".into())?;
    }
    let mut counter = 0;
    for _ in 0..5 {
        let m = lift(random_module(&mut rng, 5, 4, 2, true))?;
        let (d1, c1) = lift(m.d1_c1())?;
        if lift(m.alpha_maps())?.iter().any(Option::is_none) {
            let h = lift(hom_filtered(&d1, &c1))?.dim();
            ensure(h == 1, || format!("rank-4 obstruction case has dim {h}"))?;
            counter += 1;
        }
    }
    ensure(counter > 0, || "no rank-4 obstruction case was produced".into())?;
    Ok(format!("50 rank-3 pairs, {counter} rank-4 obstruction cases"))
}

fn hodge_class() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pairs = 0;
    for k in 0..50 {
        let d = lift(random_module(&mut rng, 5, 3, 1, true))?;
        ensure(lift(d.hodge_pushforward())?.iter().all(|x| *x == q(0)), || "ι_*[D] ≠ 0".into())?;
        if k < 25 {
            let (perp, class) = lift(d.hodge_orthogonal())?;
            ensure(perp.dim() == 1 && perp.contains(&class), || "the orthogonal of ι is not the line of [D]".into())?;
            let lam = random_scalar(&mut rng);
            let scaled: Vec<ExactScalar> = class.iter().map(|x| x * &lam).collect();
            let d2 = lift(d.with_top_class(&scaled))?;
            ensure(lift(d2.d1_c1())? == lift(d.d1_c1())?, || "D′ has different D₁ or C₁".into())?;
            ensure(lift(d.isomorphic(&d2))?, || "D′ with proportional class is not isomorphic to D".into())?;
            pairs += 1;
        }
    }
    Ok(format!("50 vanishing pushforwards, {pairs} determined pairs"))
}

fn egl3_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let a = random_scalar(&mut rng);
        let weights = regular_weights(&mut rng, 3, 1);
        let alphas = admissible_alphas(&mut rng, 5, &weights);
        let (m, _) = lift(build_from_parameter(
            5,
            alphas,
            &weights,
            &HodgeData::Egl3(vec![a.clone()]),
            BuildOptions::default(),
        ))?;
        let t: Vec<ExactScalar> = (0..3).map(|_| q(rng.gen_range(1..20)) / q(rng.gen_range(1..20))).collect();
        let got = lift(lift(m.rescale(&t))?.extract_a3(0))?;
        ensure(got == a && lift(m.extract_a3(0))? == a, || format!("a = {a} came back as {got}"))?;
    }
    Ok("100 parameters".into())
}

fn model_relations() -> Outcome {
    let mut instances = 0;
    for n in 2..=4 {
        for d in 1..=2 {
            let m = lift(build_aut_model(n, d))?;
            let want = n + ((1 << n) - 1) * d;
            ensure(m.image_dim() == want && m.target_dim() == want, || format!("target dimension at ({n}, {d})"))?;
            for s in ParabolicShape::all(n) {
                let (c, f) = lift(m.check_intertwining(&s))?;
                ensure(f.is_empty(), || f.join("; "))?;
                instances += c;
            }
        }
    }
    Ok(format!("{instances} intertwining instances"))
}

fn t_d_existence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    for (n, want) in [(2, 0), (3, 1)] {
        for _ in 0..4 {
            let d = lift(random_module(&mut rng, 5, n, 1, true))?;
            let comp = lift(t_d_for_module(&d))?;
            let model = &comp.model;
            ensure(model.aut.image_dim() == model.aut.target_dim(), || "automorphic routes do not span".into())?;
            for (w, m) in model.aut.routes() {
                ensure(&model.td.mul(m) == model.gal.mu(w), || format!("commutation fails at {w}"))?;
            }
            ensure(model.ker.dim() == want, || format!("n = {n}: dim Ker = {}", model.ker.dim()))?;
            for (w, k) in lift(model.kernel_route_intersections())? {
                ensure(k == 0, || format!("Ker meets image(μ_{w})"))?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} modules; unique solution since the automorphic routes span the target"))
}

fn hodge_recovery_sweep() -> Outcome {
    let t = Egl3Template::standard(5);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut samples: Vec<ExactScalar> = Vec::new();
    while samples.len() < 24 {
        let a = random_scalar(&mut rng);
        if !samples.contains(&a) {
            samples.push(a);
        }
    }
    let r = lift(hodge_recovery(&t, &samples, true))?;
    ensure(r.injective, || format!("collisions: {:?}", r.collisions))?;
    let first = lift(t_d_for_module(&lift(t.module(&samples[0]))?))?.model.kernel_canonical();
    let second = lift(t_d_for_module(&lift(t.module(&samples[0]))?))?.model.kernel_canonical();
    ensure(first.as_bytes() == second.as_bytes(), || "equal parameters gave different kernels".into())?;
    Ok(format!("{} distinct kernels; repeated parameter byte-identical", samples.len()))
}

fn surrogate_validity() -> Outcome {
    let checks = lift(validate_surrogate(&Egl3Template::standard(5), &default_grid(50), None))?;
    for c in &checks {
        ensure(c.pass, || format!("{}: {}", c.name, c.detail))?;
    }
    Ok(format!("{} constraints over 50 ratios", checks.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 dimension-formula suite", dimension_formulas, 10),
        ("2 filtered Ext cross-check", filtered_ext, 30),
        ("3 Hom(D1, C1) dimension", hom_dimension, 60),
        ("4 Hodge class orthogonality and determination", hodge_class, 60),
        ("5 rank-3 Hodge parameter round trip", egl3_round_trip, 5),
        ("6 automorphic model relations", model_relations, 60),
        ("7 t_D existence and uniqueness", t_d_existence, 60),
        ("8 Hodge recovery", hodge_recovery_sweep, 60),
        ("9 surrogate validity", surrogate_validity, 60),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(budget) => Err(format!("{msg}; over the {budget} s budget")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({:.2} s)", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} ({:.2} s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
