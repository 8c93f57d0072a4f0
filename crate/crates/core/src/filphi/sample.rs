//! Random generators for weights, eigenvalues and non-critical modules.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{build_from_parameter, BuildOptions, FilteredPhiModule, HodgeData};
use crate::error::{Error, Result};
use crate::exactlin::{q, scalar_pow, ExactScalar};

/// Random regular weights `h_{σ,1} > … > h_{σ,n} ≥ 0` for every embedding.
pub fn regular_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Vec<Vec<i64>> {
    (0..d)
        .map(|_| {
            let mut pool: Vec<i64> = (0..(n as i64 + 3)).collect();
            pool.shuffle(rng);
            let mut h = pool[..n].to_vec();
            h.sort_unstable_by(|a, b| b.cmp(a));
            h
        })
        .collect()
}

/// `n` distinct nonzero integers coprime to `p`, with random signs.
pub fn distinct_units<R: Rng + ?Sized>(rng: &mut R, p: u64, n: usize) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::with_capacity(n);
    while out.len() < n {
        let mut u: i64 = rng.gen_range(1..60);
        if u as u64 % p == 0 {
            continue;
        }
        if rng.gen_bool(0.5) {
            u = -u;
        }
        if !out.contains(&u) {
            out.push(u);
        }
    }
    out
}

/// Eigenvalues making every generic filtration with weights `h` weakly
/// admissible: `α_i = u_i · p^{−Σ_σ h_{σ,τ(i)}}` for a random permutation `τ`
/// and distinct units `u_i`.
pub fn admissible_alphas<R: Rng + ?Sized>(rng: &mut R, p: u64, weights: &[Vec<i64>]) -> Vec<ExactScalar> {
    let n = weights.first().map_or(0, Vec::len);
    let mut tau: Vec<usize> = (0..n).collect();
    tau.shuffle(rng);
    let units = distinct_units(rng, p, n);
    (0..n)
        .map(|i| {
            let e: i64 = weights.iter().map(|h| h[tau[i]]).sum();
            q(units[i]) * scalar_pow(&q(p as i64), -e)
        })
        .collect()
}

/// A random rational in `{±1, …, ±k} ∪ {±1/2, …}` that is neither 0 nor 1.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> ExactScalar {
    loop {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=4);
        let x = ExactScalar::new(num.into(), den.into());
        if x != q(0) && x != q(1) {
            return x;
        }
    }
}

/// Random rows `g_1, …, g_n` of an upper-unitriangular-shaped Hodge
/// parameter: `g_k ∈ span(e_1..e_{n−k+1})` with first and last coordinates 1.
pub fn random_rows<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<ExactScalar>> {
    (1..=n)
        .map(|k| {
            let len = n - k + 1;
            (0..n)
                .map(|c| {
                    if c == 0 || c + 1 == len {
                        q(1)
                    } else if c < len {
                        random_scalar(rng)
                    } else {
                        q(0)
                    }
                })
                .collect()
        })
        .collect()
}

/// A random generic, non-critical module of rank `n` over `d` embeddings with
/// regular weights; weakly admissible when `admissible` is set.
pub fn random_module<R: Rng + ?Sized>(
    rng: &mut R,
    p: u64,
    n: usize,
    d: usize,
    admissible: bool,
) -> Result<FilteredPhiModule> {
    for _ in 0..200 {
        let weights = regular_weights(rng, n, d);
        let alphas = if admissible {
            admissible_alphas(rng, p, &weights)
        } else {
            distinct_units(rng, p, n).into_iter().map(q).collect()
        };
        let rows = HodgeData::Rows((0..d).map(|_| random_rows(rng, n)).collect());
        let built = build_from_parameter(p, alphas, &weights, &rows, BuildOptions::default());
        if let Ok((m, report)) = built {
            if m.genericity_check() && (!admissible || report.admissible) {
                return Ok(m);
            }
        }
    }
    Err(Error::ModelInvariant("could not sample a non-critical module in 200 attempts".into()))
}

/// A random weakly admissible, non-critical rank-3 module in the normal form
/// with scalar parameters `a_σ`.
pub fn random_egl3<R: Rng + ?Sized>(rng: &mut R, p: u64, d: usize) -> Result<FilteredPhiModule> {
    for _ in 0..200 {
        let weights = regular_weights(rng, 3, d);
        let alphas = admissible_alphas(rng, p, &weights);
        let a: Vec<ExactScalar> = (0..d).map(|_| random_scalar(rng)).collect();
        if let Ok((m, report)) = build_from_parameter(p, alphas, &weights, &HodgeData::Egl3(a), BuildOptions::default())
        {
            if m.genericity_check() && report.admissible {
                return Ok(m);
            }
        }
    }
    Err(Error::ModelInvariant("could not sample a non-critical rank-3 module in 200 attempts".into()))
}
