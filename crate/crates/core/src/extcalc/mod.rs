//! Presented models of the automorphic and Galois extension spaces, the
//! comparison map `t_D` between them, its kernel, and the rank-3 Hodge
//! recovery sweep.
//!
//! A [`PresentedModel`] is a target vector space together with one linear
//! route `μ_w : Hom(T(K), E) → target` per refinement `w ∈ S_n`. The
//! automorphic model is independent of `D`; the Galois model is built from
//! `D`. `t_D` is the unique linear map with `t_D ∘ μ_w^{aut} = μ_w^{gal}` for
//! every `w`, and its kernel is the part of the automorphic extension space
//! that remembers the Hodge parameter of `D`.

mod aut;
mod gal;
mod pairing;

pub use aut::build_aut_model;
pub use gal::{build_gal_model, build_gal_model_with, DirectGal, GalModel, MAX_FULL_RANK};
pub use pairing::{
    default_grid, higher_intertwining_check, surrogate_pairing, validate_surrogate, Corruption, Egl3Template,
    HigherIntertwining, SurrogatePairing,
};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::charspace::{char_dim, subspace_pgprime, weyl_matrix, CharVector};
use crate::error::{dim_err, Error, Result};
use crate::exactlin::{display_scalar, format_scalar, image, kernel, ExactScalar, Matrix, Subspace};
use crate::filphi::FilteredPhiModule;
use crate::glncomb::{ext_dim, ExtKind, ParabolicShape};
use crate::perm::Perm;

/// One named constraint with its verdict.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ConstraintCheck {
    /// Constraint name.
    pub name: String,
    /// Verdict.
    pub pass: bool,
    /// Expected value, or what went wrong.
    pub detail: String,
}

impl ConstraintCheck {
    fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, detail: detail.into() }
    }
}

/// A target space with one route per refinement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PresentedModel {
    name: String,
    n: usize,
    d_k: usize,
    labels: Vec<String>,
    mu: Vec<(Perm, Matrix)>,
}

impl PresentedModel {
    /// Validates the shapes of the routes.
    pub fn new(name: &str, n: usize, d_k: usize, labels: Vec<String>, mu: Vec<(Perm, Matrix)>) -> Result<Self> {
        for (w, m) in &mu {
            if w.n() != n || m.rows() != labels.len() || m.cols() != char_dim(n, d_k) {
                return Err(dim_err(format!(
                    "route of {w} is {}×{} but the model is {}×{}",
                    m.rows(),
                    m.cols(),
                    labels.len(),
                    char_dim(n, d_k)
                )));
            }
        }
        Ok(Self { name: name.into(), n, d_k, labels, mu })
    }

    /// Model name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Rank `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree `d_K`.
    pub fn d_k(&self) -> usize {
        self.d_k
    }

    /// Coordinate labels of the target.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Dimension of the target.
    pub fn target_dim(&self) -> usize {
        self.labels.len()
    }

    /// Dimension of the source of each route.
    pub fn source_dim(&self) -> usize {
        char_dim(self.n, self.d_k)
    }

    /// All routes, in the order of [`Perm::all`].
    pub fn routes(&self) -> &[(Perm, Matrix)] {
        &self.mu
    }

    /// The route matrix of `w`.
    pub fn mu(&self, w: &Perm) -> &Matrix {
        &self.mu.iter().find(|(x, _)| x == w).expect("every permutation has a route").1
    }

    /// `μ_w(ψ)`.
    pub fn apply(&self, w: &Perm, psi: &CharVector) -> Result<Vec<ExactScalar>> {
        if psi.n() != self.n || (self.n > 0 && psi.d_k() != self.d_k) {
            return Err(dim_err(format!(
                "character of shape ({}, {}) for a model of shape ({}, {})",
                psi.n(),
                psi.d_k(),
                self.n,
                self.d_k
            )));
        }
        Ok(self.mu(w).apply(&psi.to_flat()))
    }

    /// `[μ_{w_1} | μ_{w_2} | …]`.
    pub fn assembled(&self) -> Matrix {
        let mut it = self.mu.iter().map(|(_, m)| m.clone());
        let first = it.next().unwrap_or_else(|| Matrix::zeros(self.target_dim(), 0));
        it.fold(first, |acc, m| acc.hstack(&m))
    }

    /// Dimension of the span of all route images.
    pub fn image_dim(&self) -> usize {
        self.assembled().rank()
    }

    /// Kernel of the assembled map `⊕_w Hom(T(K), E) → target`.
    pub fn relations(&self) -> Subspace {
        kernel(&self.assembled())
    }

    /// Image of one route.
    pub fn route_image(&self, w: &Perm) -> Subspace {
        image(self.mu(w))
    }

    /// Checks `μ_{w₁}(ψ) = μ_{w₂}((w₂w₁⁻¹)ψ)` for every `w₁`, every `u = w₂w₁⁻¹ ∈ W_P`
    /// and every basis vector `ψ` of `Hom_{P,g'}(T(K), E)`. Returns the number
    /// of instances checked and the failures.
    pub fn check_intertwining(&self, shape: &ParabolicShape) -> Result<(usize, Vec<String>)> {
        if shape.n() != self.n {
            return Err(dim_err(format!("shape {shape} for a rank {} model", self.n)));
        }
        let basis = subspace_pgprime(shape, self.d_k).embedding();
        let mut checked = 0;
        let mut failures = Vec::new();
        for u in shape.weyl_group() {
            let moved = weyl_matrix(&u, self.d_k).mul(&basis);
            for (w1, m1) in &self.mu {
                let w2 = u.compose(w1);
                let lhs = m1.mul(&basis);
                let rhs = self.mu(&w2).mul(&moved);
                checked += basis.cols();
                if lhs != rhs {
                    failures.push(format!("{}: shape {shape}, w1 = {w1}, w2 = {w2}", self.name));
                }
            }
        }
        Ok((checked, failures))
    }
}

/// The comparison map `t_D` and its kernel.
#[derive(Clone, Debug)]
pub struct TDModel {
    /// Automorphic model.
    pub aut: PresentedModel,
    /// Galois model.
    pub gal: PresentedModel,
    /// `t_D` as a `gal.target × aut.target` matrix.
    pub td: Matrix,
    /// `Ker(t_D)`.
    pub ker: Subspace,
}

/// Solves `t_D ∘ μ_w^{aut} = μ_w^{gal}` for all `w` simultaneously.
pub fn t_d(aut: &PresentedModel, gal: &PresentedModel) -> Result<TDModel> {
    if aut.n() != gal.n() || aut.d_k() != gal.d_k() {
        return Err(dim_err("automorphic and Galois models of different shapes"));
    }
    let ma = aut.assembled();
    let mg = gal.assembled();
    let (_, piv) = ma.rref();
    if piv.len() != aut.target_dim() {
        return Err(Error::ModelInvariant(format!(
            "the automorphic routes span {} of {} dimensions",
            piv.len(),
            aut.target_dim()
        )));
    }
    let rows_a: Vec<usize> = (0..aut.target_dim()).collect();
    let rows_g: Vec<usize> = (0..gal.target_dim()).collect();
    let basis_inv = ma.select(&rows_a, &piv).inverse().expect("pivot columns are independent");
    let td = mg.select(&rows_g, &piv).mul(&basis_inv);
    if td.mul(&ma) != mg {
        return Err(Error::ModelInvariant(
            "route-commutation: no linear map intertwines the automorphic and Galois routes".into(),
        ));
    }
    let ker = kernel(&td);
    Ok(TDModel { aut: aut.clone(), gal: gal.clone(), td, ker })
}

/// Everything computed for one module: both models, `t_D` and the checks.
#[derive(Clone, Debug)]
pub struct TdComputation {
    /// The recursive Galois model.
    pub gal: GalModel,
    /// `t_D`.
    pub model: TDModel,
}

/// Builds both models for `D` and solves for `t_D`.
pub fn t_d_for_module(d: &FilteredPhiModule) -> Result<TdComputation> {
    let aut = build_aut_model(d.n(), d.d_k())?;
    let gal = build_gal_model(d)?;
    let model = t_d(&aut, gal.model())?;
    Ok(TdComputation { gal, model })
}

impl TDModel {
    /// `dim Ker(t_D) ∩ image(μ_w^{aut})` for every `w`.
    pub fn kernel_route_intersections(&self) -> Result<Vec<(Perm, usize)>> {
        self.aut
            .routes()
            .iter()
            .map(|(w, _)| Ok((w.clone(), self.ker.intersect(&self.aut.route_image(w))?.dim())))
            .collect()
    }

    /// `dim Ker(t_D) ∩ W_σ`, where `W_σ` is spanned by the `σ`-analytic
    /// determinant coordinate and the constituents at `σ`.
    pub fn kernel_sigma_parts(&self) -> Result<Vec<usize>> {
        let n = self.aut.n();
        let dk = self.aut.d_k();
        (0..dk)
            .map(|s| {
                let tag = format!("sigma={s})");
                let idx: Vec<usize> = self
                    .aut
                    .labels()
                    .iter()
                    .enumerate()
                    .filter(|(k, l)| *k == n + s || (*k >= n + dk && l.ends_with(&tag)))
                    .map(|(k, _)| k)
                    .collect();
                Ok(self.ker.intersect(&Subspace::coordinate(self.aut.target_dim(), &idx))?.dim())
            })
            .collect()
    }

    /// `dim Ker(t_D) ∩ Σ_{w(n) = last} image(μ_w^{aut})`: the part of the kernel
    /// reached through the maximal parabolic fixing the last (`last = n−1`) or
    /// sending it to the first (`last = 0`) position.
    pub fn kernel_routed_dim(&self, last: usize) -> Result<usize> {
        let n = self.aut.n();
        let cols: Vec<Matrix> =
            self.aut.routes().iter().filter(|(w, _)| w.images()[n - 1] == last).map(|(_, m)| m.clone()).collect();
        let first = cols[0].clone();
        let span = image(&cols[1..].iter().fold(first, |acc, m| acc.hstack(m)));
        Ok(self.ker.intersect(&span)?.dim())
    }

    /// Every structural constraint of the comparison, with the number of
    /// individual identities verified.
    pub fn verify(&self) -> Result<(Vec<ConstraintCheck>, usize)> {
        let n = self.aut.n();
        let dk = self.aut.d_k();
        let mut checks = Vec::new();
        let mut count = 0usize;
        let want_aut = ext_dim(ExtKind::AutPi1, n, dk, None)? as usize;
        let want_gal = ext_dim(ExtKind::GalBar, n, dk, None)? as usize;
        let want_ker = ext_dim(ExtKind::KerTd, n, dk, None)? as usize;
        let (ra, rg) = (self.aut.image_dim(), self.gal.image_dim());
        checks.push(ConstraintCheck::new(
            "aut-target-dim",
            ra == want_aut && self.aut.target_dim() == want_aut,
            format!("routes span {ra}, expected {want_aut}"),
        ));
        checks.push(ConstraintCheck::new(
            "gal-target-dim",
            rg == want_gal && self.gal.target_dim() == want_gal,
            format!("routes span {rg}, expected {want_gal}"),
        ));
        let injective = self.aut.routes().iter().all(|(_, m)| m.rank() == m.cols());
        checks.push(ConstraintCheck::new("aut-routes-injective", injective, "every μ_w is injective"));
        let commute = self.aut.routes().iter().all(|(w, m)| &self.td.mul(m) == self.gal.mu(w));
        count += self.aut.routes().len() * self.aut.source_dim();
        checks.push(ConstraintCheck::new("route-commutation", commute, "t_D ∘ μ_w^aut = μ_w^gal for every w"));
        checks.push(ConstraintCheck::new(
            "kernel-dim",
            self.ker.dim() == want_ker,
            format!("dim Ker = {}, expected {want_ker}", self.ker.dim()),
        ));
        let meets = self.kernel_route_intersections()?;
        let bad: Vec<String> = meets.iter().filter(|(_, k)| *k != 0).map(|(w, k)| format!("{w}: {k}")).collect();
        count += meets.len();
        checks.push(ConstraintCheck::new(
            "kernel-meets-routes-trivially",
            bad.is_empty(),
            if bad.is_empty() { "Ker ∩ image(μ_w) = 0 for every w".to_string() } else { bad.join(", ") },
        ));
        let parts = self.kernel_sigma_parts()?;
        let total: usize = parts.iter().sum();
        checks.push(ConstraintCheck::new(
            "kernel-sigma-decomposition",
            total == self.ker.dim(),
            format!("Σ_σ dim(Ker ∩ W_σ) = {parts:?} vs dim Ker = {}", self.ker.dim()),
        ));
        if n >= 2 {
            let want_sub = ext_dim(ExtKind::KerTd, n - 1, dk, None)? as usize;
            for (name, side) in [("kernel-parabolic-f", n - 1), ("kernel-parabolic-g", 0)] {
                let got = self.kernel_routed_dim(side)?;
                checks.push(ConstraintCheck::new(
                    name,
                    got == want_sub,
                    format!("dim(Ker ∩ routed span) = {got}, expected dim Ker at rank {} = {want_sub}", n - 1),
                ));
            }
        }
        for model in [&self.aut, &self.gal] {
            let mut failures = Vec::new();
            for shape in ParabolicShape::all(n) {
                let (c, f) = model.check_intertwining(&shape)?;
                count += c;
                failures.extend(f);
            }
            let name = if std::ptr::eq(model, &self.aut) { "aut-intertwining" } else { "gal-intertwining" };
            checks.push(ConstraintCheck::new(
                name,
                failures.is_empty(),
                failures.first().cloned().unwrap_or_else(|| "all parabolic relations hold".into()),
            ));
        }
        Ok((checks, count))
    }

    /// Canonical textual form of the kernel.
    pub fn kernel_canonical(&self) -> String {
        self.ker.canonical_string()
    }

    /// SHA-256 of [`TDModel::kernel_canonical`], hex encoded.
    pub fn kernel_hash(&self) -> String {
        hex::encode(Sha256::digest(self.kernel_canonical().as_bytes()))
    }

    /// Kernel basis rows as `"num/den"` strings.
    pub fn kernel_basis_strings(&self) -> Vec<Vec<String>> {
        self.ker.basis_vectors().iter().map(|v| v.iter().map(format_scalar).collect()).collect()
    }
}

/// Dimensions block of the report.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Dims {
    /// Automorphic target.
    pub aut: usize,
    /// Galois target.
    pub gal: usize,
    /// Kernel.
    pub ker: usize,
}

/// One sample of the recovery sweep.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SweepEntry {
    /// Hodge parameter.
    pub a: String,
    /// SHA-256 of the canonical kernel.
    pub kernel_canonical_hash: String,
    /// Kernel basis rows.
    #[serde(skip)]
    pub kernel: Subspace,
}

/// The kernel report.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct KernelReport {
    /// Rank.
    pub n: usize,
    /// Degree.
    #[serde(rename = "d_K")]
    pub d_k: usize,
    /// Dimensions.
    pub dims: Dims,
    /// Number of identities verified.
    pub relations_checked: usize,
    /// Kernel basis (rows in automorphic target coordinates).
    pub kernel_basis: Vec<Vec<String>>,
    /// Automorphic target coordinate labels.
    pub labels: Vec<String>,
    /// Constraint verdicts.
    pub checks: Vec<ConstraintCheck>,
    /// Sweep entries (empty for a single module).
    pub sweep: Vec<SweepEntry>,
}

/// Computes `Ker(t_D)` with every check.
pub fn kernel_report(d: &FilteredPhiModule) -> Result<KernelReport> {
    let comp = t_d_for_module(d)?;
    let (checks, count) = comp.model.verify()?;
    Ok(KernelReport {
        n: d.n(),
        d_k: d.d_k(),
        dims: Dims { aut: comp.model.aut.target_dim(), gal: comp.model.gal.target_dim(), ker: comp.model.ker.dim() },
        relations_checked: count + comp.gal.relations_checked(),
        kernel_basis: comp.model.kernel_basis_strings(),
        labels: comp.model.aut.labels().to_vec(),
        checks,
        sweep: vec![],
    })
}

/// Outcome of the Hodge recovery sweep.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RecoveryReport {
    /// Per-sample kernels, in sample order.
    pub entries: Vec<SweepEntry>,
    /// Whether distinct parameters always give distinct kernels.
    pub injective: bool,
    /// Pairs of distinct parameters with equal kernels.
    pub collisions: Vec<(String, String)>,
    /// Parameters listed more than once.
    pub duplicates: Vec<String>,
    /// For each sample, the parameters whose kernel equals its kernel.
    pub round_trip_ok: bool,
}

/// Computes `Ker(t_D(a))` for each sample `a` of the rank-3 family and
/// checks that `a ↦ Ker(t_D(a))` is injective. Samples may be processed in
/// parallel; the report is always in sample order.
pub fn hodge_recovery(template: &Egl3Template, samples: &[ExactScalar], parallel: bool) -> Result<RecoveryReport> {
    let one = |a: &ExactScalar| -> Result<SweepEntry> {
        let d = template.module(a)?;
        let comp = t_d_for_module(&d)?;
        Ok(SweepEntry { a: display_scalar(a), kernel_canonical_hash: comp.model.kernel_hash(), kernel: comp.model.ker })
    };
    let entries: Vec<SweepEntry> = if parallel {
        samples.par_iter().map(one).collect::<Result<Vec<_>>>()?
    } else {
        samples.iter().map(one).collect::<Result<Vec<_>>>()?
    };
    let mut collisions = Vec::new();
    let mut duplicates = Vec::new();
    let mut round_trip_ok = true;
    for i in 0..entries.len() {
        for j in 0..i {
            let same_a = samples[i] == samples[j];
            let same_ker = entries[i].kernel == entries[j].kernel;
            if same_a {
                if !duplicates.contains(&entries[i].a) {
                    duplicates.push(entries[i].a.clone());
                }
                if !same_ker || entries[i].kernel_canonical_hash != entries[j].kernel_canonical_hash {
                    round_trip_ok = false;
                }
            } else if same_ker {
                collisions.push((entries[j].a.clone(), entries[i].a.clone()));
                round_trip_ok = false;
            }
        }
    }
    Ok(RecoveryReport { injective: collisions.is_empty(), entries, collisions, duplicates, round_trip_ok })
}

#[cfg(test)]
mod tests;
