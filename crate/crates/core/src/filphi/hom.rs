//! Filtered morphisms, `Ext¹` in the category of filtered φ-modules and
//! extension classes.
//!
//! `Ext¹(M, N)` is the first cohomology of the complex
//! `Hom(M, N) → Hom_φ(M, N) ⊕ Hom(M, N)/Fil⁰`, `c ↦ (δc, c)`. A cocycle is a
//! pair `(a, b)`: `a_σ : M_σ → N_{σ+1}` deforms Frobenius and
//! `b_σ : M_σ → N_σ` deforms the Hodge filtration. The extension attached to
//! `(a, b)` is `N ⊕ M` with `φ_σ = [[φ^N_σ, a_σ], [0, φ^M_σ]]` and
//! `Fil^j = {(b_σ m + x, m) : m ∈ Fil^j M_σ, x ∈ Fil^j N_σ}`. Changing the
//! splitting by `c` replaces `(a, b)` by `(a + δc, b + c)` with
//! `(δc)_σ = c_{σ+1} φ^M_σ − φ^N_σ c_σ`.

use num_traits::Zero;

use super::{FilteredPhiModule, Filtration};
use crate::error::{dim_err, Error, Result};
use crate::exactlin::{kernel, ExactScalar, Matrix, Quotient, Subspace};

/// A morphism given by one matrix per embedding (`f_σ : M_σ → N_σ`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    /// The components `f_σ`.
    pub maps: Vec<Matrix>,
}

impl Morphism {
    /// Wraps the components.
    pub fn new(maps: Vec<Matrix>) -> Self {
        Self { maps }
    }

    /// The composite `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        Morphism { maps: self.maps.iter().zip(&other.maps).map(|(a, b)| a.mul(b)).collect() }
    }

    /// Flattens the components (σ-major, each row-major).
    pub fn to_flat(&self) -> Vec<ExactScalar> {
        self.maps.iter().flat_map(|m| m.entries().to_vec()).collect()
    }

    fn from_flat(d: usize, rows: usize, cols: usize, v: &[ExactScalar]) -> Morphism {
        let block = rows * cols;
        Morphism {
            maps: (0..d).map(|s| Matrix::from_fn(rows, cols, |r, c| v[s * block + r * cols + c].clone())).collect(),
        }
    }

    /// True when `f_{σ+1} φ^M_σ = φ^N_σ f_σ` and every `f_σ` respects the
    /// filtrations.
    pub fn is_filtered_phi_map(&self, m: &FilteredPhiModule, n: &FilteredPhiModule) -> Result<bool> {
        check_shapes(m, n)?;
        let space = hom_filtered(m, n)?;
        Ok(space.contains(&self.to_flat()))
    }
}

fn check_shapes(m: &FilteredPhiModule, n: &FilteredPhiModule) -> Result<()> {
    if m.d_k() != n.d_k() {
        return Err(dim_err(format!("modules over d_K = {} and {}", m.d_k(), n.d_k())));
    }
    if m.p() != n.p() {
        return Err(Error::InvalidInput(format!("modules for p = {} and {}", m.p(), n.p())));
    }
    Ok(())
}

/// Values `y · f · x` over `x ∈ Fil^j M`, `y ∈ ann(Fil^j N)` and every jump `j`
/// of `M`; these vanish exactly when `f` respects the filtrations.
fn filtration_constraints(fm: &Filtration, fnn: &Filtration, f: &Matrix) -> Vec<ExactScalar> {
    let mut out = Vec::new();
    for (j, sm) in fm.steps() {
        let ann = fnn.at(*j).annihilator();
        for x in sm.basis_vectors() {
            let fx = f.apply(&x);
            for y in ann.basis_vectors() {
                out.push(crate::exactlin::dot(&y, &fx));
            }
        }
    }
    out
}

/// `Fil⁰ Hom(M_σ, N_σ)`: linear maps `M_σ → N_σ` respecting the filtrations,
/// as a subspace of row-major `n_N × n_M` matrices. For `M = N` with regular
/// weights this is the Borel subalgebra fixing the Hodge flag.
pub fn fil0_hom(m: &FilteredPhiModule, n: &FilteredPhiModule, sigma: usize) -> Result<Subspace> {
    check_shapes(m, n)?;
    if sigma >= m.d_k() {
        return Err(Error::InvalidInput(format!("embedding {sigma} out of range")));
    }
    let (rows, cols) = (n.n(), m.n());
    let fm = m.filtration(sigma);
    let fnn = n.filtration(sigma);
    let probe = filtration_constraints(fm, fnn, &Matrix::zeros(rows, cols)).len();
    let c = Matrix::of_linear_map(rows * cols, probe, |v| {
        filtration_constraints(fm, fnn, &Matrix::from_fn(rows, cols, |r, k| v[r * cols + k].clone()))
    });
    Ok(kernel(&c))
}

/// `Hom(M, N)` in the category of filtered φ-modules, as a subspace of the
/// flattened tuples `(f_σ)_σ` (σ-major, row-major).
pub fn hom_filtered(m: &FilteredPhiModule, n: &FilteredPhiModule) -> Result<Subspace> {
    check_shapes(m, n)?;
    let d = m.d_k();
    let (rows, cols) = (n.n(), m.n());
    let constraints = |v: &[ExactScalar]| {
        let f = Morphism::from_flat(d, rows, cols, v);
        let mut out = Vec::new();
        for s in 0..d {
            let lhs = f.maps[(s + 1) % d].mul(&m.phi(s));
            let rhs = n.phi(s).mul(&f.maps[s]);
            out.extend(lhs.sub(&rhs).entries().iter().cloned());
            out.extend(filtration_constraints(m.filtration(s), n.filtration(s), &f.maps[s]));
        }
        out
    };
    let probe = constraints(&vec![ExactScalar::zero(); d * rows * cols]).len();
    Ok(kernel(&Matrix::of_linear_map(d * rows * cols, probe, constraints)))
}

/// Decodes an element of [`hom_filtered`] into a morphism.
pub fn morphism_from_flat(m: &FilteredPhiModule, n: &FilteredPhiModule, v: &[ExactScalar]) -> Result<Morphism> {
    let (d, rows, cols) = (m.d_k(), n.n(), m.n());
    if v.len() != d * rows * cols {
        return Err(dim_err(format!("{} coordinates for Hom of size {}", v.len(), d * rows * cols)));
    }
    Ok(Morphism::from_flat(d, rows, cols, v))
}

/// A cocycle `(a, b)` for `Ext¹(M, N)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cocycle {
    /// Frobenius part, `a_σ : M_σ → N_{σ+1}`.
    pub a: Vec<Matrix>,
    /// Hodge part, `b_σ : M_σ → N_σ`.
    pub b: Vec<Matrix>,
}

impl Cocycle {
    /// The zero cocycle.
    pub fn zero(d: usize, rows: usize, cols: usize) -> Self {
        Self { a: vec![Matrix::zeros(rows, cols); d], b: vec![Matrix::zeros(rows, cols); d] }
    }

    /// Flat layout `[a_0, …, a_{d−1}, b_0, …, b_{d−1}]`, each row-major.
    pub fn to_flat(&self) -> Vec<ExactScalar> {
        self.a.iter().chain(&self.b).flat_map(|m| m.entries().to_vec()).collect()
    }

    fn from_flat(d: usize, rows: usize, cols: usize, v: &[ExactScalar]) -> Self {
        let block = rows * cols;
        let get = |k: usize| Matrix::from_fn(rows, cols, |r, c| v[k * block + r * cols + c].clone());
        Self { a: (0..d).map(get).collect(), b: (d..2 * d).map(get).collect() }
    }
}

/// `Ext¹(M, N)` with an explicit basis of classes.
#[derive(Clone, Debug)]
pub struct Ext1Space {
    source: FilteredPhiModule,
    target: FilteredPhiModule,
    quotient: Quotient,
}

impl Ext1Space {
    /// Builds `Ext¹(M, N)` (extensions of `M` by `N`).
    pub fn new(m: &FilteredPhiModule, n: &FilteredPhiModule) -> Result<Self> {
        check_shapes(m, n)?;
        let d = m.d_k();
        let (rows, cols) = (n.n(), m.n());
        let block = rows * cols;
        let ambient = 2 * d * block;
        let mut gens: Vec<Vec<ExactScalar>> = Vec::new();
        for k in 0..d * block {
            let c = Morphism::from_flat(d, rows, cols, &crate::exactlin::unit(d * block, k));
            gens.push(Self::coboundary(m, n, &c).to_flat());
        }
        for s in 0..d {
            for x in fil0_hom(m, n, s)?.basis_vectors() {
                let mut v = vec![ExactScalar::zero(); ambient];
                v[(d + s) * block..(d + s + 1) * block].clone_from_slice(&x);
                gens.push(v);
            }
        }
        let relations = Subspace::span(ambient, &gens)?;
        Ok(Self { source: m.clone(), target: n.clone(), quotient: Quotient::new(relations) })
    }

    /// The coboundary `(δc, c)` of `c ∈ Hom(M, N)`.
    pub fn coboundary(m: &FilteredPhiModule, n: &FilteredPhiModule, c: &Morphism) -> Cocycle {
        let d = m.d_k();
        Cocycle {
            a: (0..d).map(|s| c.maps[(s + 1) % d].mul(&m.phi(s)).sub(&n.phi(s).mul(&c.maps[s]))).collect(),
            b: c.maps.clone(),
        }
    }

    /// The module `M`.
    pub fn source(&self) -> &FilteredPhiModule {
        &self.source
    }

    /// The module `N`.
    pub fn target(&self) -> &FilteredPhiModule {
        &self.target
    }

    /// `dim Ext¹(M, N)`.
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// Coordinates of the class of a cocycle.
    pub fn class_of(&self, c: &Cocycle) -> Result<Vec<ExactScalar>> {
        let v = c.to_flat();
        if v.len() != self.quotient.ambient_dim() {
            return Err(dim_err("cocycle shape does not match the Ext¹ space"));
        }
        Ok(self.quotient.coords(&v))
    }

    /// A cocycle representing the class with the given coordinates.
    pub fn representative(&self, coords: &[ExactScalar]) -> Result<Cocycle> {
        if coords.len() != self.dim() {
            return Err(dim_err(format!("{} coordinates for Ext¹ of dimension {}", coords.len(), self.dim())));
        }
        Ok(Cocycle::from_flat(self.source.d_k(), self.target.n(), self.source.n(), &self.quotient.lift(coords)))
    }

    /// True when the cocycle is a coboundary (plus `Fil⁰`).
    pub fn is_trivial(&self, c: &Cocycle) -> Result<bool> {
        Ok(self.class_of(c)?.iter().all(Zero::is_zero))
    }

    fn induced_matrix(&self, other: &Ext1Space, f: impl Fn(&Cocycle) -> Cocycle) -> Result<Matrix> {
        let cols = (0..self.dim())
            .map(|k| {
                let rep = self.representative(&crate::exactlin::unit(self.dim(), k))?;
                other.class_of(&f(&rep))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(other.dim(), &cols))
    }

    /// Matrix of `f_* : Ext¹(M, N) → Ext¹(M, N')` for `f : N → N'`,
    /// `(a, b) ↦ (f_{σ+1} a_σ, f_σ b_σ)`.
    pub fn pushforward(&self, f: &Morphism, other: &Ext1Space) -> Result<Matrix> {
        let d = self.source.d_k();
        self.induced_matrix(other, |c| Cocycle {
            a: (0..d).map(|s| f.maps[(s + 1) % d].mul(&c.a[s])).collect(),
            b: (0..d).map(|s| f.maps[s].mul(&c.b[s])).collect(),
        })
    }

    /// Matrix of `g^* : Ext¹(M, N) → Ext¹(M', N)` for `g : M' → M`,
    /// `(a, b) ↦ (a_σ g_σ, b_σ g_σ)`.
    pub fn pullback(&self, g: &Morphism, other: &Ext1Space) -> Result<Matrix> {
        let d = self.source.d_k();
        self.induced_matrix(other, |c| Cocycle {
            a: (0..d).map(|s| c.a[s].mul(&g.maps[s])).collect(),
            b: (0..d).map(|s| c.b[s].mul(&g.maps[s])).collect(),
        })
    }

    /// First-order deformation of the eigenvalues of `φ^{d_K}` along the class
    /// (for `M` and `N` with the same eigenvalues):
    /// `s_k = Σ_σ (a_σ)_{kk} / (φ_σ)_{kk}`.
    pub fn eigen_deformation(&self, c: &Cocycle) -> Result<Vec<ExactScalar>> {
        if self.source.alphas() != self.target.alphas() {
            return Err(Error::InvalidInput("eigenvalue deformations need equal eigenvalues".into()));
        }
        let n = self.source.n();
        Ok((0..n)
            .map(|k| {
                (0..self.source.d_k())
                    .fold(ExactScalar::zero(), |acc, s| acc + c.a[s].get(k, k) / self.source.phi(s).get(k, k))
            })
            .collect())
    }

    /// Matrix of the eigenvalue deformation on class coordinates (`n × dim`).
    pub fn eigen_deformation_matrix(&self) -> Result<Matrix> {
        let cols = (0..self.dim())
            .map(|k| self.eigen_deformation(&self.representative(&crate::exactlin::unit(self.dim(), k))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(self.source.n(), &cols))
    }
}

/// The class in `Ext¹(X/X_A, X_A)` of a module `X` viewed as an extension of
/// the quotient by the eigen-span of `sub` (0-based indices). The Frobenius
/// part vanishes because the eigen-decomposition splits φ.
///
/// Returns the sub-object `N = X_A`, the quotient `M` and the cocycle.
pub fn extension_class(
    x: &FilteredPhiModule,
    sub: &[usize],
) -> Result<(FilteredPhiModule, FilteredPhiModule, Cocycle)> {
    let n = x.n();
    let mut a_idx = sub.to_vec();
    a_idx.sort_unstable();
    let b_idx: Vec<usize> = (0..n).filter(|i| !a_idx.contains(i)).collect();
    if b_idx.is_empty() {
        return Err(Error::InvalidInput("the sub-object must be proper".into()));
    }
    let (nsub, _) = x.sub_quotient(&a_idx)?;
    let (_, mquo) = x.sub_quotient(&b_idx)?;
    let (na, nb) = (a_idx.len(), b_idx.len());
    let d = x.d_k();
    let mut b_maps = Vec::with_capacity(d);
    for s in 0..d {
        let f = x.filtration(s);
        let mut ms: Vec<Vec<ExactScalar>> = Vec::new();
        let mut lifts: Vec<Vec<ExactScalar>> = Vec::new();
        for (_, step) in f.steps().iter().rev() {
            for v in step.basis_vectors() {
                let pb: Vec<ExactScalar> = b_idx.iter().map(|&i| v[i].clone()).collect();
                let mut trial = ms.clone();
                trial.push(pb.clone());
                if Subspace::span(nb, &trial)?.dim() > ms.len() {
                    ms.push(pb);
                    lifts.push(a_idx.iter().map(|&i| v[i].clone()).collect());
                }
            }
        }
        for k in 0..nb {
            let u = crate::exactlin::unit(nb, k);
            let mut trial = ms.clone();
            trial.push(u.clone());
            if Subspace::span(nb, &trial)?.dim() > ms.len() {
                ms.push(u);
                lifts.push(vec![ExactScalar::zero(); na]);
            }
        }
        let bmat = Matrix::from_columns(nb, &ms);
        let lmat = Matrix::from_columns(na, &lifts);
        let inv = bmat.inverse().ok_or_else(|| Error::ModelInvariant("quotient basis is singular".into()))?;
        b_maps.push(lmat.mul(&inv));
    }
    Ok((nsub, mquo, Cocycle { a: vec![Matrix::zeros(na, nb); d], b: b_maps }))
}

/// The extension of `m` by `n` attached to a cocycle, in eigen-normal form
/// (eigenvalues of `n` first). Requires the Frobenius part to be a
/// coboundary, which holds whenever `m` and `n` share no eigenvalue.
pub fn extension_module(n: &FilteredPhiModule, m: &FilteredPhiModule, class: &Cocycle) -> Result<FilteredPhiModule> {
    check_shapes(m, n)?;
    let d = m.d_k();
    let (rows, cols) = (n.n(), m.n());
    let block = rows * cols;
    // Solve δc = −a so that (a + δc, b + c) has vanishing Frobenius part.
    let delta = Matrix::of_linear_map(d * block, d * block, |v| {
        let c = Morphism::from_flat(d, rows, cols, v);
        Ext1Space::coboundary(m, n, &c).a.iter().flat_map(|x| x.entries().to_vec()).collect()
    });
    let minus_a: Vec<ExactScalar> =
        class.a.iter().flat_map(|x| x.entries().iter().map(|e| -e.clone()).collect::<Vec<_>>()).collect();
    let c = delta.solve(&minus_a).ok_or_else(|| {
        Error::Unsupported("the Frobenius part of the class is not a coboundary (shared eigenvalues)".into())
    })?;
    let c = Morphism::from_flat(d, rows, cols, &c);
    let total = rows + cols;
    let mut alphas = n.alphas().to_vec();
    alphas.extend(m.alphas().iter().cloned());
    let mut fil = Vec::with_capacity(d);
    for s in 0..d {
        let b = class.b[s].add(&c.maps[s]);
        let mut jumps: Vec<i64> = n.filtration(s).steps().iter().map(|(j, _)| *j).collect();
        jumps.extend(m.filtration(s).steps().iter().map(|(j, _)| *j));
        jumps.sort_unstable();
        jumps.dedup();
        let chain = jumps
            .iter()
            .map(|&j| {
                let mut vecs: Vec<Vec<ExactScalar>> = Vec::new();
                for x in n.filtration(s).at(j).basis_vectors() {
                    let mut v = x.clone();
                    v.extend(std::iter::repeat(ExactScalar::zero()).take(cols));
                    vecs.push(v);
                }
                for y in m.filtration(s).at(j).basis_vectors() {
                    let mut v = b.apply(&y);
                    v.extend(y.iter().cloned());
                    vecs.push(v);
                }
                Ok((j, Subspace::span(total, &vecs)?))
            })
            .collect::<Result<Vec<_>>>()?;
        fil.push(Filtration::from_chain(total, chain)?);
    }
    FilteredPhiModule::new(n.p(), alphas, fil)
}

/// `f_*[c] ∈ Ext¹(M, N')` for a cocycle `c` of `Ext¹(M, N)` and `f : N → N'`,
/// in class coordinates of `Ext¹(M, N')`.
pub fn cup_pushforward(
    m: &FilteredPhiModule,
    n: &FilteredPhiModule,
    class: &Cocycle,
    f: &Morphism,
    target: &FilteredPhiModule,
) -> Result<Vec<ExactScalar>> {
    let ext = Ext1Space::new(m, n)?;
    let other = Ext1Space::new(m, target)?;
    Ok(ext.pushforward(f, &other)?.apply(&ext.class_of(class)?))
}
