//! The invariant suite behind `selfcheck`.

use std::fmt::Write as _;

use hodgepar::exactlin::{q, ExactScalar, Subspace};
use hodgepar::extcalc::{
    build_aut_model, build_gal_model_with, default_grid, hodge_recovery, kernel_report, validate_surrogate, Corruption,
    Egl3Template,
};
use hodgepar::filphi::sample::{random_egl3, random_module, random_scalar};
use hodgepar::filphi::{hom_filtered, Ext1Space};
use hodgepar::glncomb::{exact_sequence_checks, ext_dim, ExtKind};
use hodgepar::{FilteredPhiModule, ParabolicShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::{CliResult, Report, EXIT_FAILURE, EXIT_OK};

/// How much of the suite to run.
#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Depth {
    /// `n ≤ 4`, `d_K ≤ 2`, small sample counts.
    Quick,
    /// Adds `n ≤ 6` combinatorics, `d_K = 3`, 50-sample oracles and a
    /// 20-sample recovery sweep.
    Full,
}

/// Suite parameters.
#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    /// Depth.
    pub depth: Depth,
    /// Prime.
    pub prime: u64,
    /// Seed of the random oracles.
    pub seed: u64,
    /// Deliberate damage to the pairing (negative control).
    pub corruption: Option<Corruption>,
    /// Run the recovery sweep in parallel.
    pub parallel: bool,
}

/// One suite verdict.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SuiteCheck {
    /// Area of the suite.
    pub group: String,
    /// Constraint name.
    pub name: String,
    /// Verdict.
    pub pass: bool,
    /// Expected value or first failure.
    pub detail: String,
}

struct Collector(Vec<SuiteCheck>);

impl Collector {
    fn push(&mut self, group: &str, name: &str, pass: bool, detail: impl Into<String>) {
        self.0.push(SuiteCheck { group: group.into(), name: name.into(), pass, detail: detail.into() });
    }

    fn error(&mut self, group: &str, name: &str, e: hodgepar::Error) {
        self.push(group, name, false, e.to_string());
    }
}

/// Tallies a family of instances into one verdict.
#[derive(Default)]
struct Tally {
    count: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    fn finish(self, c: &mut Collector, group: &str, name: &str) {
        let pass = self.first_failure.is_none();
        let detail = self.first_failure.unwrap_or_else(|| format!("{} instances", self.count));
        c.push(group, name, pass, detail);
    }
}

fn dimension_identities(c: &mut Collector, max_n: usize, max_d: usize) {
    let mut by_name: Vec<(String, Tally)> = Vec::new();
    for n in 2..=max_n {
        for d in 1..=max_d {
            let mut shapes: Vec<Option<ParabolicShape>> = vec![None];
            shapes.extend(ParabolicShape::all(n).into_iter().map(Some));
            for s in &shapes {
                match exact_sequence_checks(n, d, s.as_ref()) {
                    Ok(checks) => {
                        for k in checks {
                            let idx = match by_name.iter().position(|(nm, _)| *nm == k.name) {
                                Some(i) => i,
                                None => {
                                    by_name.push((k.name.clone(), Tally::default()));
                                    by_name.len() - 1
                                }
                            };
                            let at = s.as_ref().map_or(String::new(), |s| format!(", shape {s}"));
                            by_name[idx]
                                .1
                                .record(k.pass, || format!("n = {n}, d_K = {d}{at}: {} vs {}", k.formula, k.computed));
                        }
                    }
                    Err(e) => c.error("dimension-identities", "identity-evaluation", e),
                }
            }
        }
    }
    for (name, t) in by_name {
        t.finish(c, "dimension-identities", &name);
    }
}

fn sample_module(rng: &mut ChaCha8Rng, p: u64, n: usize, d: usize) -> hodgepar::Result<FilteredPhiModule> {
    if n == 3 && d >= 2 {
        random_egl3(rng, p, d)
    } else {
        random_module(rng, p, n, d, true)
    }
}

fn filtered_ext(c: &mut Collector, rng: &mut ChaCha8Rng, p: u64, samples: usize) {
    let mut t = Tally::default();
    for k in 0..samples {
        let (n, d) = [(2, 1), (3, 1), (3, 2)][k % 3];
        match sample_module(rng, p, n, d).and_then(|m| Ext1Space::new(&m, &m)) {
            Ok(ext) => {
                let want = 1 + n * (n - 1) / 2 * d;
                t.record(ext.dim() == want, || format!("n = {n}, d_K = {d}: dim {} ≠ {want}", ext.dim()));
            }
            Err(e) => t.record(false, || e.to_string()),
        }
    }
    t.finish(c, "filtered-ext", "filtered-ext-dim");
}

fn hom_d1_c1(c: &mut Collector, rng: &mut ChaCha8Rng, p: u64, samples: usize) {
    let mut dims = Tally::default();
    let mut indep = Tally::default();
    for _ in 0..samples {
        let mut run = || -> hodgepar::Result<(usize, usize)> {
            let m = random_module(rng, p, 3, 1, true)?;
            let (d1, c1) = m.d1_c1()?;
            let h = hom_filtered(&d1, &c1)?.dim();
            let flats: Vec<Vec<ExactScalar>> = m.alpha_maps()?.into_iter().flatten().map(|a| a.to_flat()).collect();
            let span = Subspace::span(flats.first().map_or(0, Vec::len), &flats)?.dim();
            Ok((h, span))
        };
        match run() {
            Ok((h, span)) => {
                dims.record(h == 2, || format!("dim Hom(D₁, C₁) = {h}"));
                indep.record(span == 2, || format!("the maps α₁, α₂ span {span} dimensions"));
            }
            Err(e) => dims.record(false, || e.to_string()),
        }
    }
    dims.finish(c, "hom-d1-c1", "hom-d1-c1-dim");
    indep.finish(c, "hom-d1-c1", "alpha-maps-independent");
    let mut obstruction = Tally::default();
    for _ in 0..3 {
        let mut run = || -> hodgepar::Result<(bool, usize)> {
            let m = random_module(rng, p, 4, 2, true)?;
            let (d1, c1) = m.d1_c1()?;
            Ok((m.alpha_maps()?.iter().all(Option::is_some), hom_filtered(&d1, &c1)?.dim()))
        };
        match run() {
            Ok((all_iso, h)) => obstruction
                .record(all_iso || h == 1, || format!("dim Hom(D₁, C₁) = {h} without the quotient isomorphisms")),
            Err(e) => obstruction.record(false, || e.to_string()),
        }
    }
    obstruction.finish(c, "hom-d1-c1", "hom-rank4-obstruction");
}

fn hodge_class(c: &mut Collector, rng: &mut ChaCha8Rng, p: u64, samples: usize) {
    let mut zero = Tally::default();
    let mut determined = Tally::default();
    for _ in 0..samples {
        let mut run = || -> hodgepar::Result<(bool, bool)> {
            let d = random_module(rng, p, 3, 1, true)?;
            let vanishes = d.hodge_pushforward()?.iter().all(|x| *x == q(0));
            let (perp, class) = d.hodge_orthogonal()?;
            let lam = random_scalar(rng);
            let scaled: Vec<ExactScalar> = class.iter().map(|x| x * &lam).collect();
            let d2 = d.with_top_class(&scaled)?;
            Ok((vanishes, perp.dim() == 1 && perp.contains(&class) && d.isomorphic(&d2)?))
        };
        match run() {
            Ok((v, iso)) => {
                zero.record(v, || "ι_*[D] ≠ 0".into());
                determined.record(iso, || "a module with proportional class is not isomorphic".into());
            }
            Err(e) => zero.record(false, || e.to_string()),
        }
    }
    zero.finish(c, "hodge-class", "hodge-class-pushforward-zero");
    determined.finish(c, "hodge-class", "hodge-class-determines-module");
}

fn round_trip(c: &mut Collector, rng: &mut ChaCha8Rng, p: u64, samples: usize) {
    let t = Egl3Template::standard(p);
    let mut tally = Tally::default();
    for _ in 0..samples {
        let a = random_scalar(rng);
        let tor: Vec<ExactScalar> =
            (0..3).map(|_| q(rng.gen_range(1..9)) * q(if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
        let got = t.module(&a).and_then(|m| m.rescale(&tor)).and_then(|m| m.extract_a3(0));
        tally.record(got.as_ref() == Ok(&a), || format!("a = {a}: recovered {got:?}"));
    }
    tally.finish(c, "hodge-parameter", "hodge-parameter-round-trip");
}

fn aut_models(c: &mut Collector) {
    let mut dims = Tally::default();
    let mut inter = Tally::default();
    for n in 2..=4 {
        for d in 1..=2 {
            match build_aut_model(n, d) {
                Ok(m) => {
                    let want = n + ((1usize << n) - 1) * d;
                    dims.record(m.image_dim() == want && m.target_dim() == want, || {
                        format!("n = {n}, d_K = {d}: routes span {} ≠ {want}", m.image_dim())
                    });
                    for s in ParabolicShape::all(n) {
                        match m.check_intertwining(&s) {
                            Ok((_, f)) => inter.record(f.is_empty(), || f.join("; ")),
                            Err(e) => inter.record(false, || e.to_string()),
                        }
                    }
                }
                Err(e) => dims.record(false, || e.to_string()),
            }
        }
    }
    dims.finish(c, "automorphic-model", "aut-target-dim");
    inter.finish(c, "automorphic-model", "aut-intertwining");
}

fn kernels(c: &mut Collector, rng: &mut ChaCha8Rng, p: u64) {
    let mut cases: Vec<(String, hodgepar::Result<FilteredPhiModule>)> = vec![
        ("n=2 d_K=1".into(), random_module(rng, p, 2, 1, true)),
        ("n=3 d_K=1 a=3".into(), Egl3Template::standard(p).module(&q(3))),
        ("n=3 d_K=2".into(), random_egl3(rng, p, 2)),
        ("n=4 d_K=1".into(), random_module(rng, p, 4, 1, true)),
    ];
    for (label, m) in cases.drain(..) {
        let group = format!("t_D {label}");
        match m.and_then(|m| kernel_report(&m)) {
            Ok(r) => {
                for k in r.checks {
                    c.push(&group, &k.name, k.pass, k.detail);
                }
            }
            Err(e) => c.error(&group, "kernel-construction", e),
        }
    }
}

fn surrogate(c: &mut Collector, p: u64, grid: usize, corruption: Option<Corruption>) {
    let t = Egl3Template::standard(p);
    match validate_surrogate(&t, &default_grid(grid), corruption) {
        Ok(checks) => {
            for k in checks {
                c.push("surrogate", &k.name, k.pass, k.detail);
            }
        }
        Err(e) => c.error("surrogate", "surrogate-construction", e),
    }
    if let Some(cor) = corruption {
        match t.module(&q(2)).and_then(|m| build_gal_model_with(&m, Some(cor))) {
            Ok(_) => {
                c.push("surrogate", "galois-relation-space", true, "the damaged pairing still presents the target")
            }
            Err(e) => c.error("surrogate", "galois-relation-space", e),
        }
    }
}

fn recovery(c: &mut Collector, rng: &mut ChaCha8Rng, p: u64, samples: usize, parallel: bool) {
    let t = Egl3Template::standard(p);
    let mut a: Vec<ExactScalar> = Vec::new();
    while a.len() < samples {
        let x = random_scalar(rng);
        if !a.contains(&x) {
            a.push(x);
        }
    }
    match hodge_recovery(&t, &a, parallel) {
        Ok(r) => c.push(
            "hodge-recovery",
            "hodge-recovery-injective",
            r.injective,
            r.collisions
                .first()
                .map_or_else(|| format!("{samples} distinct kernels"), |(x, y)| format!("a = {x} and a = {y} collide")),
        ),
        Err(e) => c.error("hodge-recovery", "hodge-recovery-injective", e),
    }
    let twice = [a[0].clone(), a[0].clone()];
    match hodge_recovery(&t, &twice, parallel) {
        Ok(r) => c.push(
            "hodge-recovery",
            "hodge-recovery-repeatable",
            r.round_trip_ok && r.entries[0].kernel_canonical_hash == r.entries[1].kernel_canonical_hash,
            "equal parameters give byte-identical kernels",
        ),
        Err(e) => c.error("hodge-recovery", "hodge-recovery-repeatable", e),
    }
}

/// Runs the suite.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<SuiteCheck> {
    let full = cfg.depth == Depth::Full;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = Collector(Vec::new());
    let (max_n, max_d) = if full { (6, 3) } else { (4, 2) };
    dimension_identities(&mut c, max_n, max_d);
    let samples = if full { 50 } else { 9 };
    filtered_ext(&mut c, &mut rng, cfg.prime, samples);
    hom_d1_c1(&mut c, &mut rng, cfg.prime, samples);
    hodge_class(&mut c, &mut rng, cfg.prime, samples);
    round_trip(&mut c, &mut rng, cfg.prime, if full { 100 } else { 20 });
    aut_models(&mut c);
    kernels(&mut c, &mut rng, cfg.prime);
    surrogate(&mut c, cfg.prime, if full { 50 } else { 12 }, cfg.corruption);
    recovery(&mut c, &mut rng, cfg.prime, if full { 20 } else { 6 }, cfg.parallel);
    let ker_ledger = (2..=max_n).all(|n| {
        (1..=max_d).all(|d| {
            let f = |k| ext_dim(k, n, d, None).unwrap_or(0);
            f(ExtKind::AutPi1) - f(ExtKind::GalBar) == f(ExtKind::KerTd)
        })
    });
    c.push("dimension-identities", "kernel-ledger", ker_ledger, "dim Ker = aut − gal for every (n, d_K)");
    c.0
}

/// `selfcheck`: runs the suite and exits non-zero on any failure.
pub fn cmd_selfcheck(cfg: &SuiteConfig) -> CliResult {
    let checks = run_suite(cfg);
    let failures: Vec<&SuiteCheck> = checks.iter().filter(|k| !k.pass).collect();
    let mut text = String::new();
    for k in &checks {
        let _ = writeln!(text, "[{}] {} / {}: {}", if k.pass { "PASS" } else { "FAIL" }, k.group, k.name, k.detail);
    }
    let _ = writeln!(text, "{} checks, {} failures", checks.len(), failures.len());
    let rows: Vec<Vec<String>> =
        checks.iter().map(|k| vec![k.group.clone(), k.name.clone(), k.pass.to_string(), k.detail.clone()]).collect();
    let warnings =
        failures.iter().map(|k| format!("violated constraint: {} ({}): {}", k.name, k.group, k.detail)).collect();
    Ok(Report {
        json: json!({"depth": format!("{:?}", cfg.depth).to_lowercase(), "seed": cfg.seed, "checks": checks, "failures": failures.len()}),
        csv: crate::csv_table(&["group", "name", "pass", "detail"], &rows),
        text,
        code: if failures.is_empty() { EXIT_OK } else { EXIT_FAILURE },
        warnings,
    })
}
