//! The automorphic side: a presented model of `Ext¹(π_alg, π₁)`.
//!
//! The target is `Hom_{g'}(T(K), E) ⊕ ⊕_C E`, one coordinate for every
//! constituent `C = C(I, i, σ)` of the middle layer. The route attached to a
//! refinement `w` sends `ψ` to `w⁻¹ · P_{g'}(ψ)` in the first summand and puts
//! the simple-root difference `c_an[i][σ] − c_an[i+1][σ]` at the constituent
//! with `I = w⁻¹({1..i})`.

use num_traits::Zero;

use super::PresentedModel;
use crate::charspace::{char_dim, project_gprime, weyl_act, CharVector};
use crate::error::{Error, Result};
use crate::exactlin::{ExactScalar, Matrix};
use crate::glncomb::{constituent_of, constituents_pi1};
use crate::perm::Perm;

/// Builds the automorphic model for `(n, d_K)`.
pub fn build_aut_model(n: usize, d_k: usize) -> Result<PresentedModel> {
    if n < 2 || d_k == 0 {
        return Err(Error::InvalidInput(format!("the automorphic model needs n ≥ 2 and d_K ≥ 1 (got {n}, {d_k})")));
    }
    let constituents = constituents_pi1(n, d_k);
    let mut labels: Vec<String> = (0..n).map(|i| format!("sm[{}]", i + 1)).collect();
    labels.extend((0..d_k).map(|s| format!("det_an[sigma={s}]")));
    labels.extend(constituents.iter().map(ToString::to_string));
    let offset = n + d_k;
    let target = offset + constituents.len();
    let mut mu = Vec::new();
    for w in Perm::all(n) {
        let winv = w.inverse();
        // Position of each constituent reached by w.
        let mut slots = vec![vec![0usize; n]; d_k];
        for (s, row) in slots.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate().skip(1) {
                let c = constituent_of(&w, i, s)?;
                *slot = offset + constituents.iter().position(|x| *x == c).expect("constituent is listed");
            }
        }
        let m = Matrix::of_linear_map(char_dim(n, d_k), target, |v| {
            let psi = CharVector::from_flat(n, d_k, v).expect("flat character");
            let moved = weyl_act(&winv, &project_gprime(&psi)).expect("degree");
            let mut out = vec![ExactScalar::zero(); target];
            out[..n].clone_from_slice(&moved.c_sm);
            for s in 0..d_k {
                out[n + s] = moved.c_an[0][s].clone();
                for i in 1..n {
                    out[slots[s][i]] = &psi.c_an[i - 1][s] - &psi.c_an[i][s];
                }
            }
            out
        });
        mu.push((w, m));
    }
    PresentedModel::new("automorphic", n, d_k, labels, mu)
}
