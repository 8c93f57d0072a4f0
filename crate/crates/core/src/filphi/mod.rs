//! Filtered φ-modules over an unramified extension `K/Q_p` of degree `d_K`
//! with coefficients in `E = Q`.
//!
//! A module of rank `n` is stored in *eigen-normal form*: each component
//! `D_σ` is `E^n` with basis `e_1, …, e_n` of eigenvectors of `φ^{d_K}`,
//! `φ_σ = Id` for `σ < d_K − 1` and `φ_{d_K−1} = diag(α)`. Every generic
//! module is isomorphic to one in this form, and the automorphisms
//! preserving the form are exactly the diagonal torus acting identically on
//! every component. The Hodge filtration of each component is a
//! [`Filtration`]; a Hodge–Tate weight `h` corresponds to a jump at `−h`.

mod hom;
pub mod sample;

pub use hom::{
    cup_pushforward, extension_class, extension_module, fil0_hom, hom_filtered, morphism_from_flat, Cocycle, Ext1Space,
    Morphism,
};

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::exactlin::{
    format_scalar, p_adic_valuation, parse_scalar, q, scalar_pow, unit, ExactScalar, Flag, Matrix, Subspace,
};
use crate::perm::Perm;

/// A decreasing, exhaustive, separated filtration of `E^n`, stored as the
/// list of jumps `j` (ascending) with `Fil^j`; `Fil^{j'}` equals the entry
/// with the smallest jump `≥ j'`, and is `0` beyond the last jump.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Filtration {
    n: usize,
    steps: Vec<(i64, Subspace)>,
}

impl Filtration {
    /// Validates a step list: ascending jumps, strictly decreasing nonzero
    /// subspaces, the first one being the whole space.
    pub fn new(n: usize, steps: Vec<(i64, Subspace)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidInput("a filtration needs at least one jump".into()));
        }
        if steps[0].1.dim() != n {
            return Err(Error::InvalidInput("the first filtration step must be the whole space".into()));
        }
        for (k, (j, s)) in steps.iter().enumerate() {
            if s.ambient_dim() != n {
                return Err(dim_err(format!("filtration step at jump {j} lives in E^{}", s.ambient_dim())));
            }
            if s.dim() == 0 {
                return Err(Error::InvalidInput(format!("filtration step at jump {j} is zero")));
            }
            if k > 0 {
                let (pj, ps) = &steps[k - 1];
                if *pj >= *j {
                    return Err(Error::InvalidInput(format!("jumps must be strictly increasing ({pj} then {j})")));
                }
                if !ps.contains_subspace(s) || ps.dim() == s.dim() {
                    return Err(Error::InvalidInput(format!(
                        "step at jump {j} is not strictly inside the previous step"
                    )));
                }
            }
        }
        Ok(Self { n, steps })
    }

    /// Builds a filtration from an arbitrary chain of `(jump, Fil^jump)` pairs
    /// (not necessarily strict): for repeated jumps the largest subspace
    /// wins, equal consecutive subspaces are merged keeping the last jump,
    /// and zero subspaces are dropped.
    pub fn from_chain(n: usize, chain: Vec<(i64, Subspace)>) -> Result<Self> {
        let mut by_jump: BTreeMap<i64, Subspace> = BTreeMap::new();
        for (j, s) in chain {
            match by_jump.get(&j) {
                Some(old) if old.dim() >= s.dim() => {}
                _ => {
                    by_jump.insert(j, s);
                }
            }
        }
        let mut steps: Vec<(i64, Subspace)> = Vec::new();
        for (j, s) in by_jump {
            if s.dim() == 0 {
                continue;
            }
            if let Some(last) = steps.last_mut() {
                if last.1 == s {
                    last.0 = j;
                    continue;
                }
            }
            steps.push((j, s));
        }
        Self::new(n, steps)
    }

    /// The filtration with a single jump at `j`.
    pub fn single_jump(n: usize, j: i64) -> Self {
        Self { n, steps: vec![(j, Subspace::full(n))] }
    }

    /// The filtration with weights `h` (non-increasing) whose `k`-dimensional
    /// steps are spanned by the first `k` of `vectors`: `Fil^{−h_i}` is the span
    /// of the first `n − i + 1` vectors.
    pub fn from_flag(h: &[i64], vectors: &[Vec<ExactScalar>]) -> Result<Self> {
        let n = h.len();
        if vectors.len() != n {
            return Err(dim_err(format!("{} weights but {} flag vectors", n, vectors.len())));
        }
        if h.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("weights {h:?} must be non-increasing")));
        }
        if Subspace::span(n, vectors)?.dim() != n {
            return Err(Error::InvalidInput("flag vectors are linearly dependent".into()));
        }
        let chain = (0..n).map(|i| Ok((-h[i], Subspace::span(n, &vectors[..n - i])?))).collect::<Result<Vec<_>>>()?;
        Self::from_chain(n, chain)
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The `(jump, Fil^jump)` list.
    pub fn steps(&self) -> &[(i64, Subspace)] {
        &self.steps
    }

    /// `Fil^j`.
    pub fn at(&self, j: i64) -> Subspace {
        self.steps.iter().find(|(jj, _)| *jj >= j).map_or_else(|| Subspace::zero(self.n), |(_, s)| s.clone())
    }

    /// Jump multiset (ascending, with multiplicity `dim gr^j`).
    pub fn jumps(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.n);
        for (k, (j, s)) in self.steps.iter().enumerate() {
            let next = self.steps.get(k + 1).map_or(0, |(_, t)| t.dim());
            out.extend(std::iter::repeat(*j).take(s.dim() - next));
        }
        out
    }

    /// Hodge–Tate weights `h_1 ≥ … ≥ h_n` (negated jumps).
    pub fn weights(&self) -> Vec<i64> {
        self.jumps().into_iter().map(|j| -j).collect()
    }

    /// True when all jumps are distinct.
    pub fn is_regular(&self) -> bool {
        self.steps.len() == self.n
    }

    /// The step of dimension `k`, if any.
    pub fn step_of_dim(&self, k: usize) -> Option<&Subspace> {
        self.steps.iter().map(|(_, s)| s).find(|s| s.dim() == k)
    }

    /// The Hodge flag `H^1 ⊂ … ⊂ H^n` (steps by dimension) for regular weights.
    pub fn hodge_flag(&self) -> Option<Flag> {
        if !self.is_regular() {
            return None;
        }
        Flag::new(self.steps.iter().rev().map(|(_, s)| s.clone()).collect()).ok()
    }

    /// Jump multiset of the filtration induced on a subspace `U`.
    pub fn induced_jumps(&self, u: &Subspace) -> Result<Vec<i64>> {
        let dims = self.steps.iter().map(|(_, s)| s.intersect(u).map(|x| x.dim())).collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for (k, (j, _)) in self.steps.iter().enumerate() {
            let next = dims.get(k + 1).copied().unwrap_or(0);
            out.extend(std::iter::repeat(*j).take(dims[k] - next));
        }
        Ok(out)
    }

    /// Induced filtration on the coordinate subspace `span(e_idx)`, written in
    /// the coordinates `idx`.
    pub fn restrict_coords(&self, idx: &[usize]) -> Result<Filtration> {
        let u = Subspace::coordinate(self.n, idx);
        let chain = self
            .steps
            .iter()
            .map(|(j, s)| {
                let inter = s.intersect(&u)?;
                let vecs: Vec<Vec<ExactScalar>> =
                    inter.basis_vectors().iter().map(|v| idx.iter().map(|&i| v[i].clone()).collect()).collect();
                Ok((*j, Subspace::span(idx.len(), &vecs)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Filtration::from_chain(idx.len(), chain)
    }

    /// Quotient filtration on `E^n / span(e_k : k ∉ idx)`, written in the
    /// coordinates `idx`.
    pub fn project_coords(&self, idx: &[usize]) -> Result<Filtration> {
        let chain = self
            .steps
            .iter()
            .map(|(j, s)| {
                let vecs: Vec<Vec<ExactScalar>> =
                    s.basis_vectors().iter().map(|v| idx.iter().map(|&i| v[i].clone()).collect()).collect();
                Ok((*j, Subspace::span(idx.len(), &vecs)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Filtration::from_chain(idx.len(), chain)
    }

    /// Image under an invertible matrix.
    pub fn transform(&self, m: &Matrix) -> Result<Filtration> {
        let chain = self
            .steps
            .iter()
            .map(|(j, s)| Ok((*j, crate::exactlin::map_subspace(m, s)?)))
            .collect::<Result<Vec<_>>>()?;
        Filtration::from_chain(self.n, chain)
    }
}

/// A refinement: an ordering of the φ-eigenvalues, recorded as the
/// permutation `w` whose `i`-th piece is the eigenvector `e_{w⁻¹(i)}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Refinement {
    /// The permutation `w`.
    pub w: Perm,
}

impl Refinement {
    /// Wraps a permutation.
    pub fn new(w: Perm) -> Self {
        Self { w }
    }

    /// Eigen-indices in refinement order: `w⁻¹(1), …, w⁻¹(n)` (0-based).
    pub fn order(&self) -> Vec<usize> {
        self.w.inverse().images().to_vec()
    }

    /// The φ-stable flag: step `i` is spanned by `e_{w⁻¹(1)}, …, e_{w⁻¹(i)}`.
    pub fn flag(&self) -> Flag {
        Flag::coordinate(&self.order()).expect("permutation order")
    }

    /// Step `i` of the flag (0 ≤ i ≤ n).
    pub fn step(&self, i: usize) -> Subspace {
        Subspace::coordinate(self.w.n(), &self.order()[..i])
    }
}

/// How a constructor treats weak admissibility.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AdmissibilityPolicy {
    /// Compute it and report it, but accept non-admissible filtrations.
    Report,
    /// Reject non-admissible filtrations.
    Require,
}

/// Outcome of the weak admissibility test.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AdmissibilityReport {
    /// Verdict.
    pub admissible: bool,
    /// `t_N` of the whole module.
    pub t_n: i64,
    /// `t_H` of the whole module.
    pub t_h: i64,
    /// The first eigen-subset (1-based) with `t_N < t_H`, if any.
    pub violating_subset: Option<Vec<usize>>,
}

/// A filtered φ-module in eigen-normal form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FilteredPhiModule {
    p: u64,
    alphas: Vec<ExactScalar>,
    fil: Vec<Filtration>,
}

impl FilteredPhiModule {
    /// Builds a module from its eigenvalues (of `φ^{d_K}`) and one filtration
    /// per embedding. The eigenvalues must be nonzero and pairwise distinct.
    pub fn new(p: u64, alphas: Vec<ExactScalar>, fil: Vec<Filtration>) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidInput(format!("p = {p} is not prime")));
        }
        let n = alphas.len();
        if n == 0 {
            return Err(Error::InvalidInput("rank must be positive".into()));
        }
        if fil.is_empty() {
            return Err(Error::InvalidInput("d_K must be positive".into()));
        }
        if alphas.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("φ-eigenvalues must be nonzero".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if alphas[i] == alphas[j] {
                    return Err(Error::InvalidInput(format!("eigenvalues α_{} and α_{} coincide", j + 1, i + 1)));
                }
            }
        }
        if let Some(f) = fil.iter().find(|f| f.n() != n) {
            return Err(dim_err(format!("filtration on E^{} for a rank {n} module", f.n())));
        }
        Ok(Self { p, alphas, fil })
    }

    /// Rank `n`.
    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    /// Degree `d_K`.
    pub fn d_k(&self) -> usize {
        self.fil.len()
    }

    /// The configured prime.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Eigenvalues of `φ^{d_K}` in eigenbasis order.
    pub fn alphas(&self) -> &[ExactScalar] {
        &self.alphas
    }

    /// Filtration of component `σ`.
    pub fn filtration(&self, sigma: usize) -> &Filtration {
        &self.fil[sigma]
    }

    /// All filtrations.
    pub fn filtrations(&self) -> &[Filtration] {
        &self.fil
    }

    /// Weights `h_{σ,1} ≥ … ≥ h_{σ,n}` per embedding.
    pub fn weights(&self) -> Vec<Vec<i64>> {
        self.fil.iter().map(Filtration::weights).collect()
    }

    /// The Frobenius matrix `φ_σ : D_σ → D_{σ+1}` (indices mod `d_K`).
    pub fn phi(&self, sigma: usize) -> Matrix {
        if sigma + 1 == self.d_k() {
            Matrix::diagonal(&self.alphas)
        } else {
            Matrix::identity(self.n())
        }
    }

    /// `φ^{d_K}` on component `σ` (composite of the `φ_τ` around the cycle).
    pub fn phi_power(&self, sigma: usize) -> Matrix {
        let d = self.d_k();
        (0..d).fold(Matrix::identity(self.n()), |acc, k| self.phi((sigma + k) % d).mul(&acc))
    }

    /// True when every embedding has distinct jumps.
    pub fn has_regular_weights(&self) -> bool {
        self.fil.iter().all(Filtration::is_regular)
    }

    /// Hodge flag at `σ` (regular weights only).
    pub fn hodge_flag(&self, sigma: usize) -> Option<Flag> {
        self.fil[sigma].hodge_flag()
    }

    /// Genericity: `α_i ≠ α_j` and `α_i/α_j ≠ p^{±d_K}` for all `i ≠ j`.
    pub fn genericity_check(&self) -> bool {
        let pd = scalar_pow(&q(self.p as i64), self.d_k() as i64);
        let pd_inv = pd.recip();
        for i in 0..self.n() {
            for j in 0..self.n() {
                if i == j {
                    continue;
                }
                let r = &self.alphas[i] / &self.alphas[j];
                if r.is_one() || r == pd || r == pd_inv {
                    return false;
                }
            }
        }
        true
    }

    /// `t_N(S) = Σ_{i∈S} v_p(α_i)` for the eigen-subset `S` (0-based).
    pub fn t_newton(&self, subset: &[usize]) -> i64 {
        subset.iter().map(|&i| p_adic_valuation(&self.alphas[i], self.p).expect("nonzero eigenvalue")).sum()
    }

    /// `t_H(S) = Σ_σ Σ (jumps induced on span(e_S))`.
    pub fn t_hodge(&self, subset: &[usize]) -> Result<i64> {
        let u = Subspace::coordinate(self.n(), subset);
        let mut total = 0;
        for f in &self.fil {
            total += f.induced_jumps(&u)?.iter().sum::<i64>();
        }
        Ok(total)
    }

    /// Full weak admissibility report over all `2^n` eigen-subsets (the
    /// φ-stable subspaces of a generic module).
    pub fn admissibility_report(&self) -> Result<AdmissibilityReport> {
        if !self.genericity_check() {
            return Err(Error::Unsupported(
                "weak admissibility is only decided for generic modules (φ-stable subspaces = eigen-subsets)".into(),
            ));
        }
        let n = self.n();
        let all: Vec<usize> = (0..n).collect();
        let t_n = self.t_newton(&all);
        let t_h = self.t_hodge(&all)?;
        let mut violating = None;
        for mask in 1u64..(1 << n) - 1 {
            let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if self.t_newton(&s) < self.t_hodge(&s)? {
                violating = Some(s.iter().map(|i| i + 1).collect());
                break;
            }
        }
        Ok(AdmissibilityReport { admissible: t_n == t_h && violating.is_none(), t_n, t_h, violating_subset: violating })
    }

    /// Weak admissibility (`t_N = t_H` overall and `t_N ≥ t_H` on every
    /// φ-stable subspace).
    pub fn weak_admissibility(&self) -> Result<bool> {
        Ok(self.admissibility_report()?.admissible)
    }

    /// Non-criticality for one refinement: for every `σ` and `i`, the jumps
    /// induced on the `i`-th refinement step are `−h_{σ,1}, …, −h_{σ,i}`.
    pub fn noncritical(&self, r: &Refinement) -> Result<bool> {
        if r.w.n() != self.n() {
            return Err(dim_err(format!("refinement of degree {} for rank {}", r.w.n(), self.n())));
        }
        for f in &self.fil {
            let jumps = f.jumps();
            for i in 1..=self.n() {
                if f.induced_jumps(&r.step(i))? != jumps[..i] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Non-criticality for all `n!` refinements.
    pub fn noncritical_all(&self) -> Result<bool> {
        for w in Perm::all(self.n()) {
            if !self.noncritical(&Refinement::new(w))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Refinements that are critical (for reports).
    pub fn critical_refinements(&self) -> Result<Vec<Perm>> {
        let mut out = vec![];
        for w in Perm::all(self.n()) {
            if !self.noncritical(&Refinement::new(w.clone()))? {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// `(M_r, M^r)`: the eigen-span of `r` with the induced filtration, and the
    /// quotient by the eigen-span of the complement with the quotient
    /// filtration. Both keep the eigen-order of `r`.
    pub fn sub_quotient(&self, r: &[usize]) -> Result<(FilteredPhiModule, FilteredPhiModule)> {
        let mut idx = r.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() || idx.len() != r.len() || idx.iter().any(|&i| i >= self.n()) {
            return Err(Error::InvalidInput(format!("{r:?} is not a nonempty subset of 0..{}", self.n())));
        }
        let alphas: Vec<ExactScalar> = idx.iter().map(|&i| self.alphas[i].clone()).collect();
        let sub = self.fil.iter().map(|f| f.restrict_coords(&idx)).collect::<Result<Vec<_>>>()?;
        let quo = self.fil.iter().map(|f| f.project_coords(&idx)).collect::<Result<Vec<_>>>()?;
        Ok((FilteredPhiModule::new(self.p, alphas.clone(), sub)?, FilteredPhiModule::new(self.p, alphas, quo)?))
    }

    /// `D₁ = D_{{1..n−1}}` and `C₁ = D^{{1..n−1}}`.
    pub fn d1_c1(&self) -> Result<(FilteredPhiModule, FilteredPhiModule)> {
        if self.n() < 2 {
            return Err(Error::InvalidInput("D₁ and C₁ need rank ≥ 2".into()));
        }
        let r: Vec<usize> = (0..self.n() - 1).collect();
        self.sub_quotient(&r)
    }

    /// Rescales the eigenbasis by the torus element `t` (`e_i ↦ t_i e_i` in
    /// every component); the result is isomorphic to `self`.
    pub fn rescale(&self, t: &[ExactScalar]) -> Result<FilteredPhiModule> {
        if t.len() != self.n() || t.iter().any(Zero::is_zero) {
            return Err(Error::InvalidInput("torus element must have n nonzero entries".into()));
        }
        let m = Matrix::diagonal(t);
        let fil = self.fil.iter().map(|f| f.transform(&m)).collect::<Result<Vec<_>>>()?;
        FilteredPhiModule::new(self.p, self.alphas.clone(), fil)
    }

    /// The torus element `t` (with `t_1 = 1`) putting the Hodge flag at `σ`
    /// into canonical position (see [`FilteredPhiModule::hodge_parameter`]).
    pub fn normalizing_torus(&self, sigma: usize) -> Result<Vec<ExactScalar>> {
        let rows = self.raw_parameter_rows(sigma)?;
        let n = self.n();
        let mut t = vec![ExactScalar::one(); n];
        for k in 1..n {
            // Row g_{n−k} (0-based index n−1−k) has its last nonzero coordinate at k.
            let row = &rows[n - 1 - k];
            t[k] = &row[0] / &row[k];
        }
        Ok(t)
    }

    /// Generators `g_k` of `H^k ∩ span(e_1, …, e_{n−k+1})`, scaled so the first
    /// coordinate is 1.
    fn raw_parameter_rows(&self, sigma: usize) -> Result<Vec<Vec<ExactScalar>>> {
        let n = self.n();
        let f = self.fil.get(sigma).ok_or_else(|| Error::InvalidInput(format!("no embedding {sigma}")))?;
        let flag = f
            .hodge_flag()
            .ok_or_else(|| Error::Unsupported(format!("weights at embedding {sigma} are not regular")))?;
        let mut rows = Vec::with_capacity(n);
        for k in 1..=n {
            let cut = Subspace::coordinate(n, &(0..=n - k).collect::<Vec<_>>());
            let line = flag.step(k).intersect(&cut)?;
            let bad = || {
                Error::NoncriticalRequired(format!(
                    "the Hodge flag at embedding {sigma} is not in general position with the eigenflags"
                ))
            };
            if line.dim() != 1 {
                return Err(bad());
            }
            let v = line.basis_vectors().remove(0);
            if v[0].is_zero() || v[n - k].is_zero() {
                return Err(bad());
            }
            let s = v[0].clone();
            rows.push(v.into_iter().map(|x| x / &s).collect());
        }
        Ok(rows)
    }

    /// The Hodge parameter at `σ`: rows `g_1, …, g_n` with
    /// `H^k = span(g_1, …, g_k)`, `g_k ∈ span(e_1, …, e_{n−k+1})`, first
    /// coordinates 1 and the torus fixed by making the last nonzero coordinate
    /// of every row equal to 1. For `n = 3` the rows are
    /// `(1, a, 1), (1, 1, 0), (1, 0, 0)`.
    pub fn hodge_parameter(&self, sigma: usize) -> Result<Matrix> {
        let t = self.normalizing_torus(sigma)?;
        let rows: Vec<Vec<ExactScalar>> = self
            .raw_parameter_rows(sigma)?
            .into_iter()
            .map(|r| r.iter().zip(&t).map(|(x, s)| x * s).collect())
            .collect();
        Matrix::from_rows(self.n(), &rows)
    }

    /// The Hodge parameter of every embedding.
    pub fn hodge_parameters(&self) -> Result<Vec<Matrix>> {
        (0..self.d_k()).map(|s| self.hodge_parameter(s)).collect()
    }

    /// The scalar `a ∈ E ∖ {0, 1}` of a rank-3 module at `σ`.
    pub fn extract_a3(&self, sigma: usize) -> Result<ExactScalar> {
        if self.n() != 3 {
            return Err(Error::InvalidInput(format!("the scalar Hodge parameter needs rank 3, got {}", self.n())));
        }
        Ok(self.hodge_parameter(sigma)?.get(0, 1).clone())
    }

    /// The map `ι_D : D₁ → C₁` (the identity in eigen-coordinates).
    pub fn iota(&self) -> Result<Morphism> {
        if self.n() < 2 {
            return Err(Error::InvalidInput("ι_D needs rank ≥ 2".into()));
        }
        Ok(Morphism::new(vec![Matrix::identity(self.n() - 1); self.d_k()]))
    }

    /// `D` as an extension of its top rank-one quotient `M` by `D₁`:
    /// returns `(D₁, M, [D])`.
    pub fn top_extension(&self) -> Result<(FilteredPhiModule, FilteredPhiModule, Cocycle)> {
        let r: Vec<usize> = (0..self.n().saturating_sub(1)).collect();
        extension_class(self, &r)
    }

    /// `ι_{D*}[D] ∈ Ext¹(M, C₁)` in class coordinates (zero for every `D`).
    pub fn hodge_pushforward(&self) -> Result<Vec<ExactScalar>> {
        let (d1, m, class) = self.top_extension()?;
        let (_, c1) = self.d1_c1()?;
        cup_pushforward(&m, &d1, &class, &self.iota()?, &c1)
    }

    /// The kernel of `ι_{D*} : Ext¹(M, D₁) → Ext¹(M, C₁)` together with the
    /// class coordinates of `[D]` in `Ext¹(M, D₁)`.
    pub fn hodge_orthogonal(&self) -> Result<(Subspace, Vec<ExactScalar>)> {
        let (d1, m, class) = self.top_extension()?;
        let (_, c1) = self.d1_c1()?;
        let ext = Ext1Space::new(&m, &d1)?;
        let push = ext.pushforward(&self.iota()?, &Ext1Space::new(&m, &c1)?)?;
        Ok((crate::exactlin::kernel(&push), ext.class_of(&class)?))
    }

    /// The module attached to the class with coordinates `coords` in
    /// `Ext¹(M, D₁)`, for the same `D₁` and `M` as `self`.
    pub fn with_top_class(&self, coords: &[ExactScalar]) -> Result<FilteredPhiModule> {
        let (d1, m, _) = self.top_extension()?;
        let ext = Ext1Space::new(&m, &d1)?;
        extension_module(&d1, &m, &ext.representative(coords)?)
    }

    /// The collapsed module `D_σ`: same φ, filtration at `σ` kept, every other
    /// embedding carrying the single jump at `−h_{τ,n}`.
    pub fn cow_functor(&self, sigma: usize) -> Result<FilteredPhiModule> {
        if sigma >= self.d_k() {
            return Err(Error::InvalidInput(format!("embedding {sigma} out of range")));
        }
        let fil = self
            .fil
            .iter()
            .enumerate()
            .map(|(tau, f)| {
                if tau == sigma {
                    f.clone()
                } else {
                    let top = *f.jumps().last().expect("nonempty");
                    Filtration::single_jump(self.n(), top)
                }
            })
            .collect();
        FilteredPhiModule::new(self.p, self.alphas.clone(), fil)
    }

    /// Decides whether `self ≅ other` and returns the torus element `t` with
    /// `other = t · self` when they are.
    pub fn isomorphism(&self, other: &FilteredPhiModule) -> Result<IsoVerdict> {
        if self.n() != other.n() || self.d_k() != other.d_k() {
            return Ok(IsoVerdict::No("ranks or degrees differ".into()));
        }
        if self.alphas != other.alphas {
            return Ok(IsoVerdict::No("φ-eigenvalues differ".into()));
        }
        if self.weights() != other.weights() {
            return Ok(IsoVerdict::No("Hodge–Tate weights differ".into()));
        }
        if !self.genericity_check() {
            return Err(Error::Unsupported("isomorphism testing needs generic eigenvalues".into()));
        }
        // Morphisms between generic modules in eigen-normal form are diagonal
        // and equal in every component, so Hom is a subspace V of the torus
        // Lie algebra E^n; an isomorphism exists iff V meets the open torus,
        // i.e. no coordinate vanishes identically on V.
        let homs = hom_filtered(self, other)?;
        let n = self.n();
        let diag: Vec<Vec<ExactScalar>> =
            homs.basis_vectors().iter().map(|v| (0..n).map(|i| v[i * n + i].clone()).collect()).collect();
        if let Some(i) = (0..n).find(|&i| diag.iter().all(|v| v[i].is_zero())) {
            return Ok(IsoVerdict::No(format!("every filtered φ-morphism kills the eigenvector e_{}", i + 1)));
        }
        for k in 1i64.. {
            let mut t = vec![ExactScalar::zero(); n];
            let mut c = ExactScalar::one();
            for v in &diag {
                for i in 0..n {
                    t[i] += &c * &v[i];
                }
                c *= q(k);
            }
            if t.iter().all(|x| !x.is_zero()) {
                let t0 = t[0].clone();
                return Ok(IsoVerdict::Yes(t.into_iter().map(|x| x / &t0).collect()));
            }
        }
        unreachable!("a generic combination avoids finitely many hyperplanes")
    }

    /// The maps `α_i : D₁ → C₁` (`i = 1, …, n−1`): kill `e_i`, identify
    /// `(D₁)^{r}` with `(C₁)_{r}` for `r = {1..n−1} ∖ {i}` and include. `None`
    /// when those two modules are not isomorphic.
    pub fn alpha_maps(&self) -> Result<Vec<Option<Morphism>>> {
        let n = self.n();
        if n < 3 {
            return Err(Error::InvalidInput("the maps α_i need rank ≥ 3".into()));
        }
        let (d1, c1) = self.d1_c1()?;
        (0..n - 1)
            .map(|i| {
                let r: Vec<usize> = (0..n - 1).filter(|&k| k != i).collect();
                let (_, d1_quo) = d1.sub_quotient(&r)?;
                let (c1_sub, _) = c1.sub_quotient(&r)?;
                Ok(match d1_quo.isomorphism(&c1_sub)? {
                    IsoVerdict::Yes(t) => {
                        let mut diag = vec![ExactScalar::zero(); n - 1];
                        for (k, &idx) in r.iter().enumerate() {
                            diag[idx] = t[k].clone();
                        }
                        Some(Morphism::new(vec![Matrix::diagonal(&diag); self.d_k()]))
                    }
                    IsoVerdict::No(_) => None,
                })
            })
            .collect()
    }

    /// `self ≅ other` as filtered φ-modules.
    pub fn isomorphic(&self, other: &FilteredPhiModule) -> Result<bool> {
        Ok(matches!(self.isomorphism(other)?, IsoVerdict::Yes(_)))
    }

    /// Encodes as JSON.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ModuleJson::from(self)).expect("serializable")
    }

    /// Decodes from JSON text, naming the offending field on failure.
    pub fn from_json_str(s: &str) -> Result<FilteredPhiModule> {
        let j: ModuleJson = serde_json::from_str(s).map_err(|e| Error::Parse {
            field: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        j.into_module()
    }
}

/// Outcome of an isomorphism test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum IsoVerdict {
    /// Isomorphic via the torus element.
    Yes(Vec<ExactScalar>),
    /// Not isomorphic, with the reason.
    No(String),
}

/// Flag data for [`build_from_parameter`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum HodgeData {
    /// Rank 3: one scalar `a` per embedding, flag `(1,a,1), (1,1,0), (1,0,0)`.
    Egl3(Vec<ExactScalar>),
    /// Rows `g_1, …, g_n` per embedding with `H^k = span(g_1, …, g_k)`.
    Rows(Vec<Vec<Vec<ExactScalar>>>),
}

/// Options for [`build_from_parameter`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BuildOptions {
    /// Treatment of weak admissibility.
    pub admissibility: AdmissibilityPolicy,
    /// Reject modules that are critical for some refinement.
    pub require_noncritical: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { admissibility: AdmissibilityPolicy::Report, require_noncritical: true }
    }
}

/// The rows `(1,a,1), (1,1,0), (1,0,0)` of the rank-3 normal form.
pub fn egl3_rows(a: &ExactScalar) -> Vec<Vec<ExactScalar>> {
    vec![vec![q(1), a.clone(), q(1)], vec![q(1), q(1), q(0)], vec![q(1), q(0), q(0)]]
}

/// Builds a module from eigenvalues, weights `h[σ]` (non-increasing) and the
/// Hodge flag data.
pub fn build_from_parameter(
    p: u64,
    alphas: Vec<ExactScalar>,
    weights: &[Vec<i64>],
    data: &HodgeData,
    opts: BuildOptions,
) -> Result<(FilteredPhiModule, AdmissibilityReport)> {
    let n = alphas.len();
    let d = weights.len();
    let rows: Vec<Vec<Vec<ExactScalar>>> = match data {
        HodgeData::Egl3(a) => {
            if n != 3 {
                return Err(Error::InvalidInput("the scalar parameter describes rank-3 modules".into()));
            }
            if a.len() != d {
                return Err(dim_err(format!("{} scalars for {d} embeddings", a.len())));
            }
            a.iter().map(egl3_rows).collect()
        }
        HodgeData::Rows(r) => r.clone(),
    };
    if rows.len() != d {
        return Err(dim_err(format!("flag data for {} embeddings but weights for {d}", rows.len())));
    }
    let fil = weights
        .iter()
        .zip(&rows)
        .map(|(h, r)| {
            if h.len() != n {
                return Err(dim_err(format!("{} weights for rank {n}", h.len())));
            }
            Filtration::from_flag(h, r)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = FilteredPhiModule::new(p, alphas, fil)?;
    if opts.require_noncritical {
        let crit = m.critical_refinements()?;
        if !crit.is_empty() {
            let names: Vec<String> = crit.iter().map(ToString::to_string).collect();
            return Err(Error::NoncriticalRequired(format!("critical for refinements {}", names.join(" "))));
        }
    }
    let report = if m.genericity_check() {
        m.admissibility_report()?
    } else {
        AdmissibilityReport { admissible: false, t_n: 0, t_h: 0, violating_subset: None }
    };
    if opts.admissibility == AdmissibilityPolicy::Require && !report.admissible {
        return Err(Error::NotAdmissible(format!(
            "t_N = {}, t_H = {}, violating subset {:?}",
            report.t_n, report.t_h, report.violating_subset
        )));
    }
    Ok((m, report))
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    jump: i64,
    basis: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    n: usize,
    #[serde(rename = "d_K")]
    d_k: usize,
    p: u64,
    alphas: Vec<String>,
    weights: Vec<Vec<i64>>,
    filtration: Vec<Vec<StepJson>>,
}

impl From<&FilteredPhiModule> for ModuleJson {
    fn from(m: &FilteredPhiModule) -> Self {
        ModuleJson {
            n: m.n(),
            d_k: m.d_k(),
            p: m.p,
            alphas: m.alphas.iter().map(format_scalar).collect(),
            weights: m.weights(),
            filtration: m
                .fil
                .iter()
                .map(|f| {
                    f.steps()
                        .iter()
                        .map(|(j, s)| StepJson {
                            jump: *j,
                            basis: s.basis_vectors().iter().map(|v| v.iter().map(format_scalar).collect()).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl ModuleJson {
    fn into_module(self) -> Result<FilteredPhiModule> {
        let perr = |field: String, message: String| Error::Parse { field, message };
        let alphas = self
            .alphas
            .iter()
            .enumerate()
            .map(|(i, s)| parse_scalar(s).map_err(|e| perr(format!("alphas[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if alphas.len() != self.n {
            return Err(perr("alphas".into(), format!("{} entries but n = {}", alphas.len(), self.n)));
        }
        if self.filtration.len() != self.d_k {
            return Err(perr(
                "filtration".into(),
                format!("{} components but d_K = {}", self.filtration.len(), self.d_k),
            ));
        }
        let mut fil = Vec::new();
        for (sigma, steps) in self.filtration.iter().enumerate() {
            let mut chain = Vec::new();
            for (k, st) in steps.iter().enumerate() {
                let field = format!("filtration[{sigma}][{k}]");
                let vecs = st
                    .basis
                    .iter()
                    .map(|row| {
                        if row.len() != self.n {
                            return Err(perr(
                                field.clone(),
                                format!("basis row of length {} in E^{}", row.len(), self.n),
                            ));
                        }
                        row.iter().map(|s| parse_scalar(s).map_err(|e| perr(field.clone(), e.to_string()))).collect()
                    })
                    .collect::<Result<Vec<Vec<ExactScalar>>>>()?;
                chain.push((st.jump, Subspace::span(self.n, &vecs).map_err(|e| perr(field, e.to_string()))?));
            }
            fil.push(Filtration::new(self.n, chain).map_err(|e| perr(format!("filtration[{sigma}]"), e.to_string()))?);
        }
        let m = FilteredPhiModule::new(self.p, alphas, fil)?;
        if m.weights() != self.weights {
            return Err(perr(
                "weights".into(),
                format!("declared {:?} but the filtration has {:?}", self.weights, m.weights()),
            ));
        }
        Ok(m)
    }
}

impl Serialize for FilteredPhiModule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModuleJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FilteredPhiModule {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ModuleJson::deserialize(d)?.into_module().map_err(serde::de::Error::custom)
    }
}

/// The standard basis vector helper re-exported for flag construction.
pub fn e(n: usize, i: usize) -> Vec<ExactScalar> {
    unit(n, i)
}

#[cfg(test)]
mod tests;
