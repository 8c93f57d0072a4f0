//! The pairing `Ext¹(C₁, D₁) → Ext̄¹(D₁, D₁) × Ext̄¹(C₁, C₁)` that generates
//! the relation space `ℒ`, its rank/containment validation, and the higher
//! intertwining membership test.
//!
//! The source `X = Ext¹_f(C₁, D₁) ⊕ ⊕_σ Fil⁰Hom(C₁, D₁)_σ` models the full
//! extension space (crystalline classes plus their Sen-weight directions);
//! its dimension equals the Euler-characteristic count `(n−1)² d_K`. A
//! crystalline class `m` is sent to the eigenvalue deformations of `ι^* m`
//! and `ι_* m`; a filtered map `X₀ : C₁ → D₁` to the Borel elements `X₀ ∘ ι`
//! and `ι ∘ X₀`.

use num_traits::Zero;

use super::gal::DirectGal;
use crate::error::{Error, Result};
use crate::exactlin::{image, q, ExactScalar, Matrix, Subspace};
use crate::filphi::{
    build_from_parameter, fil0_hom, AdmissibilityPolicy, BuildOptions, Ext1Space, FilteredPhiModule, HodgeData,
};
use crate::glncomb::{exact_sequence_checks, ext_dim, ExtKind};

/// Deliberate damage applied to a pairing (negative controls).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Corruption {
    /// Replace the second column of `iminus` by the first.
    CollapseIminus,
    /// Zero out `iplus`.
    KillIplus,
}

/// The two maps of the pairing, in direct coordinates of `Ext̄¹(D₁, D₁)` and
/// `Ext̄¹(C₁, C₁)`.
#[derive(Clone, Debug)]
pub struct SurrogatePairing {
    /// `dim X`.
    pub x_dim: usize,
    /// Dimension of the crystalline part `Ext¹_f(C₁, D₁)`.
    pub crystalline_dim: usize,
    /// `X → Ext̄¹(D₁, D₁)`.
    pub iminus: Matrix,
    /// `X → Ext̄¹(C₁, C₁)`.
    pub iplus: Matrix,
    /// Eigenvalue-deformation subspace of `Ext̄¹(D₁, D₁)` (image of the
    /// crystalline classes).
    pub g_minus: Subspace,
    /// Same for `C₁`.
    pub g_plus: Subspace,
    /// Dimension of `Hom(K^×, E)`.
    pub twist_dim: usize,
}

impl SurrogatePairing {
    /// A damaged copy (negative control).
    pub fn corrupted(&self, c: Corruption) -> SurrogatePairing {
        let mut out = self.clone();
        match c {
            Corruption::CollapseIminus => {
                if out.iminus.cols() >= 2 {
                    for r in 0..out.iminus.rows() {
                        let v = out.iminus.get(r, 0).clone();
                        out.iminus.set(r, 1, v);
                    }
                }
            }
            Corruption::KillIplus => out.iplus = Matrix::zeros(out.iplus.rows(), out.iplus.cols()),
        }
        out
    }

    /// `dim ℒ`: the pairing relations `(iminus x, 0, −iplus x, 0)` plus the
    /// twists, which are independent of them (nonzero `Hom(K^×, E)` parts).
    pub fn relation_dim(&self) -> usize {
        self.iminus.vstack(&self.iplus).rank() + self.twist_dim
    }
}

/// The pairing attached to `D` (rank ≥ 2, generic, non-critical).
pub fn surrogate_pairing(d: &FilteredPhiModule) -> Result<SurrogatePairing> {
    let (d1, c1) = d.d1_c1()?;
    let dk = d.d_k();
    let m = d1.n();
    let direct_d1 = DirectGal::new(&d1)?;
    let direct_c1 = DirectGal::new(&c1)?;
    let iota = d.iota()?;
    let ext = Ext1Space::new(&c1, &d1)?;
    let mut minus_cols = Vec::new();
    let mut plus_cols = Vec::new();
    let zero_borel = vec![Matrix::zeros(m, m); dk];
    for k in 0..ext.dim() {
        let rep = ext.representative(&crate::exactlin::unit(ext.dim(), k))?;
        let eig = |phi_of: &dyn Fn(usize) -> Matrix, a: &dyn Fn(usize) -> Matrix| -> Vec<ExactScalar> {
            (0..m)
                .map(|i| (0..dk).fold(ExactScalar::zero(), |acc, s| acc + a(s).get(i, i) / phi_of(s).get(i, i)))
                .collect()
        };
        let pulled = eig(&|s| d1.phi(s), &|s| rep.a[s].mul(&iota.maps[s]));
        let pushed = eig(&|s| c1.phi(s), &|s| iota.maps[(s + 1) % dk].mul(&rep.a[s]));
        minus_cols.push(direct_d1.encode(&pulled, &zero_borel)?);
        plus_cols.push(direct_c1.encode(&pushed, &zero_borel)?);
    }
    let crystalline_dim = ext.dim();
    for s in 0..dk {
        for x0 in fil0_hom(&c1, &d1, s)?.basis_vectors() {
            let x0 = Matrix::from_fn(m, m, |r, c| x0[r * m + c].clone());
            let mut bm = zero_borel.clone();
            bm[s] = x0.mul(&iota.maps[s]);
            minus_cols.push(direct_d1.encode(&vec![ExactScalar::zero(); m], &bm)?);
            let mut bp = zero_borel.clone();
            bp[s] = iota.maps[s].mul(&x0);
            plus_cols.push(direct_c1.encode(&vec![ExactScalar::zero(); m], &bp)?);
        }
    }
    Ok(SurrogatePairing {
        x_dim: minus_cols.len(),
        crystalline_dim,
        iminus: Matrix::from_columns(direct_d1.dim(), &minus_cols),
        iplus: Matrix::from_columns(direct_c1.dim(), &plus_cols),
        g_minus: direct_d1.smooth_subspace(),
        g_plus: direct_c1.smooth_subspace(),
        twist_dim: 1 + dk,
    })
}

/// Eigenvalues and weights of the rank-3 family used for the surrogate grid.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Egl3Template {
    /// The prime.
    pub p: u64,
    /// Eigenvalues of φ.
    pub alphas: Vec<ExactScalar>,
    /// Weights `h_1 > h_2 > h_3`.
    pub weights: Vec<i64>,
}

impl Egl3Template {
    /// `α = (1, 2/p, 3/p²)` against weights `(2, 1, 0)`: generic and weakly
    /// admissible for every non-critical parameter.
    pub fn standard(p: u64) -> Self {
        let pp = p as i64;
        Self {
            p,
            alphas: vec![q(1), ExactScalar::new(2.into(), pp.into()), ExactScalar::new(3.into(), (pp * pp).into())],
            weights: vec![2, 1, 0],
        }
    }

    /// The module with Hodge parameter `a`.
    pub fn module(&self, a: &ExactScalar) -> Result<FilteredPhiModule> {
        let opts = BuildOptions { admissibility: AdmissibilityPolicy::Report, require_noncritical: true };
        Ok(build_from_parameter(
            self.p,
            self.alphas.clone(),
            std::slice::from_ref(&self.weights),
            &HodgeData::Egl3(vec![a.clone()]),
            opts,
        )?
        .0)
    }

    /// The module whose `ι` is `x₁α₁ + x₂α₂`: Hodge parameter `a = x₂/x₁`.
    pub fn module_for_ratio(&self, x1: &ExactScalar, x2: &ExactScalar) -> Result<FilteredPhiModule> {
        if x1.is_zero() || x2.is_zero() {
            return Err(Error::InvalidInput(
                "non-degenerate-ratio: x₁x₂ = 0 makes ι critical (it kills an eigenvector)".into(),
            ));
        }
        let a = x2 / x1;
        if a == q(1) {
            return Err(Error::InvalidInput("non-degenerate-ratio: x₁ = x₂ is the critical parameter a = 1".into()));
        }
        self.module(&a)
    }
}

/// A grid of `count` pairwise non-proportional, non-degenerate `(x₁ : x₂)`.
pub fn default_grid(count: usize) -> Vec<(ExactScalar, ExactScalar)> {
    let mut out: Vec<(ExactScalar, ExactScalar)> = Vec::new();
    let mut seen: Vec<ExactScalar> = Vec::new();
    'outer: for total in 2i64.. {
        for x1 in 1..total {
            let x2 = total - x1;
            for (a, b) in [(x1, x2), (x1, -x2)] {
                let r = ExactScalar::new(b.into(), a.into());
                if r == q(1) || seen.contains(&r) {
                    continue;
                }
                seen.push(r);
                out.push((q(a), q(b)));
                if out.len() == count {
                    break 'outer;
                }
            }
        }
    }
    out
}

/// Re-verifies every rank and containment constraint of the pairing over a
/// grid of ratios. With `corruption` set, the damaged pairing is checked
/// instead (and is expected to fail, naming the violated constraint).
pub fn validate_surrogate(
    template: &Egl3Template,
    grid: &[(ExactScalar, ExactScalar)],
    corruption: Option<Corruption>,
) -> Result<Vec<super::ConstraintCheck>> {
    let n = template.alphas.len();
    let dk = 1usize;
    let x_expected = (n - 1) * (n - 1) * dk;
    let image_expected = ext_dim(ExtKind::GalIota, n, dk, None)? as usize;
    let bar = |k: usize| ext_dim(ExtKind::GalBar, k, dk, None).map(|v| v as usize);
    let v_dim = 2 * (bar(n - 1)? + 1 + dk);
    let l_expected = v_dim - bar(n)?;
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut images: Vec<(ExactScalar, Subspace)> = Vec::new();
    let mut fail = |name: &str, msg: String| failures.push((name.to_string(), msg));
    for (x1, x2) in grid {
        let d = template.module_for_ratio(x1, x2)?;
        let mut pairing = surrogate_pairing(&d)?;
        if let Some(c) = corruption {
            pairing = pairing.corrupted(c);
        }
        let at = format!("(x1:x2) = ({x1}:{x2})");
        if pairing.x_dim != x_expected {
            fail("pairing-source-dim", format!("{at}: dim X = {} ≠ {x_expected}", pairing.x_dim));
        }
        for (name, m) in [("iminus", &pairing.iminus), ("iplus", &pairing.iplus)] {
            let r = m.rank();
            if pairing.x_dim - r != 1 {
                fail(&format!("{name}-kernel-dim"), format!("{at}: kernel dimension {} ≠ 1", pairing.x_dim - r));
            }
            if r != image_expected {
                fail(&format!("{name}-image-dim"), format!("{at}: image dimension {r} ≠ {image_expected}"));
            }
        }
        let im_minus = image(&pairing.iminus);
        let im_plus = image(&pairing.iplus);
        if !im_minus.contains_subspace(&pairing.g_minus) || !im_plus.contains_subspace(&pairing.g_plus) {
            fail("g-subspace-in-image", format!("{at}: eigenvalue deformations are not in the image"));
        }
        let l = pairing.relation_dim();
        if l != l_expected {
            fail("relation-space-dim", format!("{at}: dim ℒ = {l} ≠ {l_expected}"));
        }
        if v_dim - l != bar(n)? {
            fail("presentation-dim-additivity", format!("{at}: dim V − dim ℒ = {} ≠ {}", v_dim - l, bar(n)?));
        }
        images.push((x2 / x1, im_minus));
    }
    for i in 0..images.len() {
        for j in 0..i {
            if images[i].1 == images[j].1 {
                fail(
                    "ratio-separation",
                    format!("ratios {} and {} give the same image of iminus", images[j].0, images[i].0),
                );
            }
        }
    }
    let ledger = exact_sequence_checks(n, dk, None)?;
    for c in ledger.iter().filter(|c| !c.pass) {
        fail("dimension-ledger", format!("{}: {} ≠ {}", c.name, c.formula, c.computed));
    }
    let names = [
        ("pairing-source-dim", format!("dim X = {x_expected}")),
        ("iminus-kernel-dim", "kernel dimension 1".to_string()),
        ("iplus-kernel-dim", "kernel dimension 1".to_string()),
        ("iminus-image-dim", format!("image dimension {image_expected}")),
        ("iplus-image-dim", format!("image dimension {image_expected}")),
        ("g-subspace-in-image", "eigenvalue deformations lie in both images".to_string()),
        ("relation-space-dim", format!("dim ℒ = {l_expected}")),
        ("presentation-dim-additivity", format!("dim V − dim ℒ = {}", bar(n)?)),
        ("ratio-separation", format!("{} pairwise distinct images", grid.len())),
        ("dimension-ledger", format!("{} identities", ledger.len())),
    ];
    Ok(names
        .iter()
        .map(|(name, ok)| {
            let first = failures.iter().find(|(n, _)| n == name);
            super::ConstraintCheck {
                name: (*name).to_string(),
                pass: first.is_none(),
                detail: first.map_or_else(|| ok.clone(), |(_, m)| m.clone()),
            }
        })
        .collect())
}

/// Result of the higher intertwining membership test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HigherIntertwining {
    /// Whether the twisted class lies in the image of `iminus`.
    pub holds: bool,
    /// A witness `M ∈ X` with `iminus(M)` equal to the twisted class.
    pub witness: Option<Vec<ExactScalar>>,
}

/// Tests whether the class `D̃₁` (direct coordinates of `Ext̄¹(D₁, D₁)`),
/// twisted by `1 − ψ` for `ψ ∈ Hom(K^×, E)`, lies in the image of `iminus`.
pub fn higher_intertwining_check(
    d: &FilteredPhiModule,
    class: &[ExactScalar],
    psi: &[ExactScalar],
) -> Result<HigherIntertwining> {
    let (d1, _) = d.d1_c1()?;
    let direct = DirectGal::new(&d1)?;
    if class.len() != direct.dim() || psi.len() != 1 + d.d_k() {
        return Err(Error::Dimension(format!(
            "class of length {} (expected {}) and character of length {} (expected {})",
            class.len(),
            direct.dim(),
            psi.len(),
            1 + d.d_k()
        )));
    }
    let pairing = surrogate_pairing(d)?;
    let twist = direct.twist(psi);
    let target: Vec<ExactScalar> = class.iter().zip(&twist).map(|(c, t)| c - t).collect();
    let witness = pairing.iminus.solve(&target);
    Ok(HigherIntertwining { holds: witness.is_some(), witness })
}
