//! The Galois side: presented models of `Ext̄¹(D, D)`.
//!
//! [`DirectGal`] realises `Ext̄¹(D, D)` as `E^n ⊕ ⊕_σ 𝔟_σ`, where `E^n` records
//! the first-order deformation of the φ-eigenvalues and `𝔟_σ = Fil⁰End(D_σ)` is
//! the Borel subalgebra of the Hodge flag at `σ`. The route of a refinement
//! `w` sends `ψ` to `(w⁻¹ψ_sm ; Σ_i ψ_an[i][σ] · P^w_{σ,i})`, where `P^w_{σ,i}`
//! projects onto the line `𝒯_w^i ∩ H_σ^{n−i+1}` along the other such lines.
//!
//! [`GalModel`] is the recursive presentation
//! `V(D₁, C₁) / ℒ(D, D₁, C₁)` with
//! `V = (Ext̄¹(D₁, D₁) ⊕ Hom(K^×, E)) ⊕ (Ext̄¹(C₁, C₁) ⊕ Hom(K^×, E))`, built on
//! the two parabolic filtrations `F : D₁ ⊂ D` and `G : E·e_n ⊂ D`. Its
//! realisation map into the direct model is verified to be an isomorphism
//! intertwining all routes.

use num_traits::Zero;

use super::pairing::{surrogate_pairing, Corruption, SurrogatePairing};
use super::PresentedModel;
use crate::charspace::{char_dim, weyl_act, CharVector};
use crate::error::{Error, Result};
use crate::exactlin::{q, ExactScalar, Matrix, Quotient, Subspace};
use crate::filphi::{fil0_hom, FilteredPhiModule, Refinement};
use crate::perm::Perm;

/// Largest rank for which the recursive relation construction is run.
pub const MAX_FULL_RANK: usize = 4;

/// `E^n ⊕ ⊕_σ Fil⁰End(D_σ)` with the Borel routes.
#[derive(Clone, Debug)]
pub struct DirectGal {
    module: FilteredPhiModule,
    borel: Vec<Subspace>,
    model: PresentedModel,
}

impl DirectGal {
    /// Builds the direct model; `D` must be generic and non-critical with
    /// regular weights.
    pub fn new(d: &FilteredPhiModule) -> Result<Self> {
        let n = d.n();
        let dk = d.d_k();
        if !d.has_regular_weights() {
            return Err(Error::Unsupported("the Galois model needs regular Hodge–Tate weights".into()));
        }
        if !d.genericity_check() {
            return Err(Error::InvalidInput("the Galois model needs a generic module".into()));
        }
        let borel = (0..dk).map(|s| fil0_hom(d, d, s)).collect::<Result<Vec<_>>>()?;
        let mut labels: Vec<String> = (0..n).map(|i| format!("eig[{}]", i + 1)).collect();
        for (s, b) in borel.iter().enumerate() {
            labels.extend((0..b.dim()).map(|k| format!("borel[sigma={s}][{k}]")));
        }
        let mut this = Self {
            module: d.clone(),
            borel,
            model: PresentedModel::new("galois-direct", n, dk, labels.clone(), vec![])?,
        };
        let mut mu = Vec::new();
        for w in Perm::all(n) {
            let projs = (0..dk).map(|s| this.line_projections(&w, s)).collect::<Result<Vec<_>>>()?;
            let winv = w.inverse();
            let m = Matrix::of_linear_map(char_dim(n, dk), labels.len(), |v| {
                let psi = CharVector::from_flat(n, dk, v).expect("flat character");
                let smooth = weyl_act(&winv, &psi).expect("degree").c_sm;
                let borel: Vec<Matrix> = (0..dk)
                    .map(|s| (0..n).fold(Matrix::zeros(n, n), |acc, i| acc.add(&projs[s][i].scale(&psi.c_an[i][s]))))
                    .collect();
                this.encode(&smooth, &borel).expect("Borel element")
            });
            mu.push((w, m));
        }
        this.model = PresentedModel::new("galois-direct", n, dk, labels, mu)?;
        Ok(this)
    }

    /// Projections onto the lines `𝒯_w^i ∩ H^{n−i+1}`, `i = 1..n`.
    fn line_projections(&self, w: &Perm, sigma: usize) -> Result<Vec<Matrix>> {
        let n = self.module.n();
        let flag = self.module.hodge_flag(sigma).expect("regular weights");
        let refinement = Refinement::new(w.clone());
        let mut cols = Vec::with_capacity(n);
        for i in 1..=n {
            let line = refinement.step(i).intersect(flag.step(n - i + 1))?;
            if line.dim() != 1 {
                return Err(Error::NoncriticalRequired(format!(
                    "refinement {w} is critical at embedding {sigma} (step {i})"
                )));
            }
            cols.push(line.basis_vectors().remove(0));
        }
        let b = Matrix::from_columns(n, &cols);
        let binv = b.inverse().ok_or_else(|| Error::NoncriticalRequired(format!("refinement {w} is critical")))?;
        Ok((0..n)
            .map(|i| {
                let mut e = Matrix::zeros(n, n);
                e.set(i, i, q(1));
                b.mul(&e).mul(&binv)
            })
            .collect())
    }

    /// The module.
    pub fn module(&self) -> &FilteredPhiModule {
        &self.module
    }

    /// The presented model.
    pub fn model(&self) -> &PresentedModel {
        &self.model
    }

    /// `Fil⁰End(D_σ)`.
    pub fn borel(&self, sigma: usize) -> &Subspace {
        &self.borel[sigma]
    }

    /// Dimension `n + Σ_σ dim 𝔟_σ`.
    pub fn dim(&self) -> usize {
        self.module.n() + self.borel.iter().map(Subspace::dim).sum::<usize>()
    }

    /// Offset of the `σ`-Borel block.
    pub fn borel_offset(&self, sigma: usize) -> usize {
        self.module.n() + self.borel[..sigma].iter().map(Subspace::dim).sum::<usize>()
    }

    /// Coordinates of `(eigenvalue deformation, Borel elements)`.
    pub fn encode(&self, smooth: &[ExactScalar], borel: &[Matrix]) -> Result<Vec<ExactScalar>> {
        let mut out = smooth.to_vec();
        for (s, b) in borel.iter().enumerate() {
            let c = self.borel[s].coords(b.entries()).ok_or_else(|| {
                Error::ModelInvariant(format!("endomorphism at embedding {s} does not preserve the Hodge filtration"))
            })?;
            out.extend(c);
        }
        Ok(out)
    }

    /// Inverse of [`DirectGal::encode`].
    pub fn decode(&self, v: &[ExactScalar]) -> (Vec<ExactScalar>, Vec<Matrix>) {
        let n = self.module.n();
        let smooth = v[..n].to_vec();
        let borel = (0..self.borel.len())
            .map(|s| {
                let off = self.borel_offset(s);
                let flat = self.borel[s].from_coords(&v[off..off + self.borel[s].dim()]);
                Matrix::from_fn(n, n, |r, c| flat[r * n + c].clone())
            })
            .collect();
        (smooth, borel)
    }

    /// The subspace of pure eigenvalue deformations (the image of the
    /// crystalline classes).
    pub fn smooth_subspace(&self) -> Subspace {
        Subspace::coordinate(self.dim(), &(0..self.module.n()).collect::<Vec<_>>())
    }

    /// The twist by `ψ ∈ Hom(K^×, E)`: `(ψ_sm, …, ψ_sm ; ψ_an[σ] · Id)`.
    pub fn twist(&self, psi: &[ExactScalar]) -> Vec<ExactScalar> {
        let n = self.module.n();
        let smooth = vec![psi[0].clone(); n];
        let borel: Vec<Matrix> = (0..self.borel.len()).map(|s| Matrix::identity(n).scale(&psi[1 + s])).collect();
        self.encode(&smooth, &borel).expect("scalars preserve every filtration")
    }
}

/// The recursive presentation `V(D₁, C₁)/ℒ` (or `Hom(K^×, E)` in rank 1).
#[derive(Clone, Debug)]
pub struct GalModel {
    model: PresentedModel,
    direct: DirectGal,
    realization: Matrix,
    realization_inv: Matrix,
    v_dim: usize,
    l_dim: usize,
    pairing: Option<SurrogatePairing>,
    relations_checked: usize,
}

impl GalModel {
    /// The presented model (coordinates of `V/ℒ`).
    pub fn model(&self) -> &PresentedModel {
        &self.model
    }

    /// The direct model of the same module.
    pub fn direct(&self) -> &DirectGal {
        &self.direct
    }

    /// `V/ℒ → E^n ⊕ ⊕_σ 𝔟_σ`.
    pub fn realization(&self) -> &Matrix {
        &self.realization
    }

    /// `dim V` (0 in rank 1).
    pub fn v_dim(&self) -> usize {
        self.v_dim
    }

    /// `dim ℒ` (0 in rank 1).
    pub fn l_dim(&self) -> usize {
        self.l_dim
    }

    /// The pairing used for `ℒ` (absent in rank 1).
    pub fn pairing(&self) -> Option<&SurrogatePairing> {
        self.pairing.as_ref()
    }

    /// Number of route identities verified during construction (including
    /// the sub-models).
    pub fn relations_checked(&self) -> usize {
        self.relations_checked
    }

    /// Target coordinates from direct coordinates.
    pub fn from_direct(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        self.realization_inv.apply(v)
    }
}

/// Builds the recursive Galois model of `D`.
pub fn build_gal_model(d: &FilteredPhiModule) -> Result<GalModel> {
    build_gal_model_with(d, None)
}

/// As [`build_gal_model`], optionally corrupting the top-level pairing (a
/// negative control: construction then fails with a named invariant).
pub fn build_gal_model_with(d: &FilteredPhiModule, corruption: Option<Corruption>) -> Result<GalModel> {
    let n = d.n();
    if n > MAX_FULL_RANK {
        return Err(Error::Unsupported(format!(
            "relation construction is limited to rank ≤ {MAX_FULL_RANK}; use the dimension ledger for rank {n}"
        )));
    }
    let direct = DirectGal::new(d)?;
    if n == 1 {
        let dim = direct.dim();
        return Ok(GalModel {
            model: direct.model().clone(),
            realization: Matrix::identity(dim),
            realization_inv: Matrix::identity(dim),
            direct,
            v_dim: 0,
            l_dim: 0,
            pairing: None,
            relations_checked: 0,
        });
    }
    let dk = d.d_k();
    let h = 1 + dk;
    let (d1, c1) = d.d1_c1()?;
    let r1 = build_gal_model(&d1)?;
    let r2 = build_gal_model(&c1)?;
    let (g1, g2) = (r1.model.target_dim(), r2.model.target_dim());
    let v_dim = g1 + h + g2 + h;
    let emb_f = parabolic_embeddings(&direct, r1.direct(), Side::F)?;
    let emb_g = parabolic_embeddings(&direct, r2.direct(), Side::G)?;
    let big = direct.dim();
    let phi = Matrix::of_linear_map(v_dim, big, |v| {
        let mut out = vec![ExactScalar::zero(); big];
        let add = |out: &mut Vec<ExactScalar>, x: Vec<ExactScalar>| {
            for (o, y) in out.iter_mut().zip(x) {
                *o += y;
            }
        };
        add(&mut out, emb_f.apply(&r1.realization.apply(&v[..g1]), &v[g1..g1 + h]));
        add(&mut out, emb_g.apply(&r2.realization.apply(&v[g1 + h..g1 + h + g2]), &v[g1 + h + g2..]));
        out
    });
    if phi.rank() != big {
        return Err(Error::ModelInvariant("the parabolic routes do not span the Galois target".into()));
    }
    // Generators of ℒ.
    let mut gens: Vec<Vec<ExactScalar>> = Vec::new();
    let id1 = Perm::identity(n - 1);
    for k in 0..h {
        let psi = crate::exactlin::unit(h, k);
        let t1 = r1.model.apply(&id1, &CharVector::diagonal(n - 1, &psi))?;
        let t2 = r2.model.apply(&id1, &CharVector::diagonal(n - 1, &psi))?;
        let mut g = t1;
        g.extend(psi.iter().cloned());
        g.extend(t2.into_iter().map(|x| -x));
        g.extend(psi.iter().map(|x| -x.clone()));
        gens.push(g);
    }
    let mut pairing = surrogate_pairing(d)?;
    if let Some(c) = corruption {
        pairing = pairing.corrupted(c);
    }
    for x in 0..pairing.x_dim {
        let minus = r1.from_direct(&pairing.iminus.col(x));
        let plus = r2.from_direct(&pairing.iplus.col(x));
        let mut g = minus;
        g.extend(std::iter::repeat(ExactScalar::zero()).take(h));
        g.extend(plus.into_iter().map(|y| -y));
        g.extend(std::iter::repeat(ExactScalar::zero()).take(h));
        gens.push(g);
    }
    let ell = Subspace::span(v_dim, &gens)?;
    for g in ell.basis_vectors() {
        if !crate::exactlin::is_zero_vec(&phi.apply(&g)) {
            return Err(Error::ModelInvariant(
                "relation-space-in-kernel: a generator of ℒ is not killed by the parabolic routes".into(),
            ));
        }
    }
    if ell.dim() != v_dim - big {
        return Err(Error::ModelInvariant(format!(
            "relation-space-dim: dim ℒ = {} but the presentation needs {}",
            ell.dim(),
            v_dim - big
        )));
    }
    let quotient = Quotient::new(ell.clone());
    let realization = phi.mul(&quotient.section());
    let realization_inv = realization
        .inverse()
        .ok_or_else(|| Error::ModelInvariant("the realisation of V/ℒ is not invertible".into()))?;
    let labels: Vec<String> = (0..quotient.dim()).map(|k| format!("v_mod_l[{k}]")).collect();
    let route = Router { n, dk, r1: &r1, r2: &r2, g1, g2, h };
    let mut mu = Vec::new();
    let mut checked = r1.relations_checked + r2.relations_checked;
    for w in Perm::all(n) {
        let m = Matrix::of_linear_map(char_dim(n, dk), quotient.dim(), |v| {
            let psi = CharVector::from_flat(n, dk, v).expect("flat character");
            quotient.coords(&route.route(&w, &psi).expect("route"))
        });
        let expected = direct.model().mu(&w);
        if &realization.mul(&m) != expected {
            return Err(Error::ModelInvariant(format!("route-commutation: the recursive route of {w} disagrees")));
        }
        checked += char_dim(n, dk);
        mu.push((w, m));
    }
    Ok(GalModel {
        model: PresentedModel::new("galois-recursive", n, dk, labels, mu)?,
        direct,
        realization,
        realization_inv,
        v_dim,
        l_dim: ell.dim(),
        pairing: Some(pairing),
        relations_checked: checked,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `D₁ ⊂ D`: sub-object on the first `n − 1` eigenvectors.
    F,
    /// `E·e_n ⊂ D` with quotient `C₁`.
    G,
}

/// The maps `Ext̄¹(D₁) ⊕ Hom(K^×, E) → Ext̄¹(D)` (resp. with `C₁`): the smooth
/// parts are concatenated and the Borel parts glued through the unique
/// element of `𝔟_H ∩ 𝔭` with the prescribed graded pieces.
struct Embedding {
    n: usize,
    dk: usize,
    /// Per σ: (`𝔟` coordinates of the rank `n−1` piece, scalar) → `𝔟(D)_σ` coordinates.
    glue: Vec<Matrix>,
    small_offsets: Vec<(usize, usize)>,
    big_offsets: Vec<usize>,
}

impl Embedding {
    fn apply(&self, small: &[ExactScalar], psi: &[ExactScalar]) -> Vec<ExactScalar> {
        let n = self.n;
        let mut out = vec![ExactScalar::zero(); *self.big_offsets.last().expect("offsets")];
        out[..n - 1].clone_from_slice(&small[..n - 1]);
        out[n - 1] = psi[0].clone();
        for s in 0..self.dk {
            let (off, len) = self.small_offsets[s];
            let mut input = small[off..off + len].to_vec();
            input.push(psi[1 + s].clone());
            let b = self.glue[s].apply(&input);
            out[self.big_offsets[s]..self.big_offsets[s] + b.len()].clone_from_slice(&b);
        }
        out
    }
}

fn parabolic_embeddings(big: &DirectGal, small: &DirectGal, side: Side) -> Result<Embedding> {
    let n = big.module().n();
    let dk = big.module().d_k();
    let mut glue = Vec::with_capacity(dk);
    for s in 0..dk {
        // The parabolic: entries that must vanish.
        let zero_idx: Vec<usize> = match side {
            Side::F => (0..n - 1).map(|c| (n - 1) * n + c).collect(),
            Side::G => (0..n - 1).map(|r| r * n + (n - 1)).collect(),
        };
        let keep: Vec<usize> = (0..n * n).filter(|i| !zero_idx.contains(i)).collect();
        let para = Subspace::coordinate(n * n, &keep);
        let inter = big.borel(s).intersect(&para)?;
        let restrict = |flat: &[ExactScalar]| -> Result<Vec<ExactScalar>> {
            let block: Vec<ExactScalar> = (0..n - 1)
                .flat_map(|r| (0..n - 1).map(move |c| (r, c)))
                .map(|(r, c)| flat[r * n + c].clone())
                .collect();
            let mut v = small
                .borel(s)
                .coords(&block)
                .ok_or_else(|| Error::ModelInvariant("graded piece of a Borel element is not filtered".into()))?;
            v.push(flat[n * n - 1].clone());
            Ok(v)
        };
        let basis = inter.basis_vectors();
        let cols = basis.iter().map(|b| restrict(b)).collect::<Result<Vec<_>>>()?;
        let rmat = Matrix::from_columns(small.borel(s).dim() + 1, &cols);
        let rinv = rmat.inverse().ok_or_else(|| {
            Error::ModelInvariant(format!(
                "parabolic-restriction: 𝔟 ∩ 𝔭 → graded pieces is not bijective at embedding {s}"
            ))
        })?;
        let big_cols: Vec<Vec<ExactScalar>> =
            basis.iter().map(|b| big.borel(s).coords(b).expect("element of the Borel")).collect();
        glue.push(Matrix::from_columns(big.borel(s).dim(), &big_cols).mul(&rinv));
    }
    let small_offsets = (0..dk).map(|s| (small.borel_offset(s), small.borel(s).dim())).collect();
    let mut big_offsets: Vec<usize> = (0..dk).map(|s| big.borel_offset(s)).collect();
    big_offsets.push(big.dim());
    Ok(Embedding { n, dk, glue, small_offsets, big_offsets })
}

/// Routes `ψ` through the parabolic filtrations: `w(n) = n` uses `F`,
/// `w(n) = 1` uses `G`, other refinements decompose `ψ` into characters of
/// maximal-parabolic type and Weyl-transport each to one of those cases.
struct Router<'a> {
    n: usize,
    dk: usize,
    r1: &'a GalModel,
    r2: &'a GalModel,
    g1: usize,
    g2: usize,
    h: usize,
}

impl Router<'_> {
    fn route(&self, w: &Perm, psi: &CharVector) -> Result<Vec<ExactScalar>> {
        let n = self.n;
        let last = w.apply(n - 1);
        let mut out = vec![ExactScalar::zero(); self.g1 + self.h + self.g2 + self.h];
        if last == n - 1 {
            let wf = Perm::from_images(w.images()[..n - 1].to_vec())?;
            let sub = psi.restrict(&(0..n - 1).collect::<Vec<_>>());
            let x = self.r1.model.apply(&wf, &sub)?;
            out[..self.g1].clone_from_slice(&x);
            out[self.g1..self.g1 + self.h].clone_from_slice(&psi.factor(n - 1));
            return Ok(out);
        }
        if last == 0 {
            let wg = Perm::from_images(w.images()[..n - 1].iter().map(|&x| x - 1).collect())?;
            let sub = psi.restrict(&(1..n).collect::<Vec<_>>());
            let x = self.r2.model.apply(&wg, &sub)?;
            let o = self.g1 + self.h;
            out[o..o + self.g2].clone_from_slice(&x);
            out[o + self.g2..].clone_from_slice(&psi.factor(0));
            return Ok(out);
        }
        // Smooth part: a character of Hom_{G,g'}, transported by (last n).
        let mut acc = {
            let u = Perm::transposition(n, last, n - 1);
            let mut smooth = CharVector::zero(n, self.dk);
            smooth.c_sm = psi.c_sm.clone();
            self.route(&u.compose(w), &weyl_act(&u, &smooth)?)?
        };
        // Analytic part: Σ_j χ_j v_j with v_j the indicator of the first j
        // factors, a character of the maximal parabolic with blocks of sizes
        // (j, n − j), invariant under its Weyl group.
        for s in 0..self.dk {
            for j in 1..=n {
                let chi = if j < n { &psi.c_an[j - 1][s] - &psi.c_an[j][s] } else { psi.c_an[n - 1][s].clone() };
                if chi.is_zero() {
                    continue;
                }
                let mut v = CharVector::zero(n, self.dk);
                for i in 0..j {
                    v.c_an[i][s] = q(1);
                }
                let u = if last < j { Perm::transposition(n, 0, last) } else { Perm::transposition(n, last, n - 1) };
                let part = self.route(&u.compose(w), &v)?;
                for (a, b) in acc.iter_mut().zip(part) {
                    *a += &chi * b;
                }
            }
        }
        Ok(acc)
    }
}
