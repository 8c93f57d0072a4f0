//! Coordinates on `Hom(T(K), E)` for the diagonal torus `T ≅ (K^×)^n`.
//!
//! Each factor `K^×` contributes one smooth direction and one analytic
//! direction per embedding `σ`, so `Hom(T(K), E) ≅ E^{n(1+d_K)}`. The flat
//! layout is `[c_sm[0..n] | c_an[0][0..d] | c_an[1][0..d] | …]`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::exactlin::{format_scalar, parse_scalar, ExactScalar, Matrix, Subspace};
use crate::glncomb::ParabolicShape;
use crate::perm::Perm;

/// An element of `Hom(T(K), E)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharVector {
    /// Smooth coordinates, one per factor.
    pub c_sm: Vec<ExactScalar>,
    /// Analytic coordinates `c_an[i][σ]`.
    pub c_an: Vec<Vec<ExactScalar>>,
}

/// Dimension of `Hom(T(K), E)`.
pub fn char_dim(n: usize, d_k: usize) -> usize {
    n * (1 + d_k)
}

/// Flat index of the smooth coordinate of factor `i`.
pub fn sm_index(i: usize) -> usize {
    i
}

/// Flat index of the `σ`-analytic coordinate of factor `i`.
pub fn an_index(n: usize, d_k: usize, i: usize, sigma: usize) -> usize {
    n + i * d_k + sigma
}

impl CharVector {
    /// The zero character.
    pub fn zero(n: usize, d_k: usize) -> Self {
        Self { c_sm: vec![ExactScalar::zero(); n], c_an: vec![vec![ExactScalar::zero(); d_k]; n] }
    }

    /// Number of torus factors.
    pub fn n(&self) -> usize {
        self.c_sm.len()
    }

    /// Number of embeddings.
    pub fn d_k(&self) -> usize {
        self.c_an.first().map_or(0, Vec::len)
    }

    /// Decodes the flat layout.
    pub fn from_flat(n: usize, d_k: usize, v: &[ExactScalar]) -> Result<Self> {
        if v.len() != char_dim(n, d_k) {
            return Err(dim_err(format!("character vector of length {} for n={n}, d_K={d_k}", v.len())));
        }
        Ok(Self {
            c_sm: v[..n].to_vec(),
            c_an: (0..n).map(|i| v[an_index(n, d_k, i, 0)..an_index(n, d_k, i, 0) + d_k].to_vec()).collect(),
        })
    }

    /// Encodes into the flat layout.
    pub fn to_flat(&self) -> Vec<ExactScalar> {
        let mut v = self.c_sm.clone();
        for row in &self.c_an {
            v.extend(row.iter().cloned());
        }
        v
    }

    /// The coordinates `(smooth, σ-analytic…)` of factor `i`, an element of
    /// `Hom(K^×, E) ≅ E^{1+d_K}`.
    pub fn factor(&self, i: usize) -> Vec<ExactScalar> {
        let mut v = vec![self.c_sm[i].clone()];
        v.extend(self.c_an[i].iter().cloned());
        v
    }

    /// The character of the sub-torus on the given factors.
    pub fn restrict(&self, factors: &[usize]) -> CharVector {
        CharVector {
            c_sm: factors.iter().map(|&i| self.c_sm[i].clone()).collect(),
            c_an: factors.iter().map(|&i| self.c_an[i].clone()).collect(),
        }
    }

    /// The character `ψ ∘ det` on `n` factors from `ψ ∈ Hom(K^×, E)`: every
    /// factor carries the same coordinates.
    pub fn diagonal(n: usize, psi: &[ExactScalar]) -> CharVector {
        CharVector { c_sm: vec![psi[0].clone(); n], c_an: vec![psi[1..].to_vec(); n] }
    }
}

/// JSON form `{n, d_K, c_sm[], c_an[][]}` with `"num/den"` scalars.
#[derive(Serialize, Deserialize)]
struct CharVectorJson {
    n: usize,
    #[serde(rename = "d_K")]
    d_k: usize,
    c_sm: Vec<String>,
    c_an: Vec<Vec<String>>,
}

impl Serialize for CharVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharVectorJson {
            n: self.n(),
            d_k: self.d_k(),
            c_sm: self.c_sm.iter().map(format_scalar).collect(),
            c_an: self.c_an.iter().map(|r| r.iter().map(format_scalar).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CharVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CharVectorJson::deserialize(d)?;
        let conv = |v: &[String]| v.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>();
        let c_sm = conv(&j.c_sm).map_err(D::Error::custom)?;
        let c_an = j.c_an.iter().map(|r| conv(r)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        if c_sm.len() != j.n || c_an.len() != j.n || c_an.iter().any(|r| r.len() != j.d_k) {
            return Err(D::Error::custom("character vector shape does not match n and d_K"));
        }
        Ok(CharVector { c_sm, c_an })
    }
}

fn span_flat(n: usize, d_k: usize, vectors: Vec<Vec<ExactScalar>>) -> Subspace {
    Subspace::span(char_dim(n, d_k), &vectors).expect("vectors of the character space")
}

fn unit_flat(n: usize, d_k: usize, idx: usize) -> Vec<ExactScalar> {
    crate::exactlin::unit(char_dim(n, d_k), idx)
}

/// Smooth characters: `c_an = 0`; dimension `n`.
pub fn subspace_sm(n: usize, d_k: usize) -> Subspace {
    span_flat(n, d_k, (0..n).map(|i| unit_flat(n, d_k, sm_index(i))).collect())
}

/// Characters analytic only along `σ`: `c_an[·][τ] = 0` for `τ ≠ σ`;
/// dimension `2n`.
pub fn subspace_sigma(n: usize, d_k: usize, sigma: usize) -> Result<Subspace> {
    if sigma >= d_k {
        return Err(Error::InvalidInput(format!("embedding index {sigma} out of range for d_K={d_k}")));
    }
    let mut v: Vec<Vec<ExactScalar>> = (0..n).map(|i| unit_flat(n, d_k, sm_index(i))).collect();
    v.extend((0..n).map(|i| unit_flat(n, d_k, an_index(n, d_k, i, sigma))));
    Ok(span_flat(n, d_k, v))
}

/// Characters whose analytic part factors through the determinant of the
/// blocks of `shape`: `c_an[i][τ]` constant on each block; dimension
/// `n + r·d_K`.
pub fn subspace_pgprime(shape: &ParabolicShape, d_k: usize) -> Subspace {
    let n = shape.n();
    let mut v: Vec<Vec<ExactScalar>> = (0..n).map(|i| unit_flat(n, d_k, sm_index(i))).collect();
    for block in shape.blocks() {
        for sigma in 0..d_k {
            let mut x = vec![ExactScalar::zero(); char_dim(n, d_k)];
            for &i in block {
                x[an_index(n, d_k, i, sigma)] = crate::exactlin::q(1);
            }
            v.push(x);
        }
    }
    span_flat(n, d_k, v)
}

/// Characters whose analytic part factors through the determinant:
/// dimension `n + d_K`.
pub fn subspace_gprime(n: usize, d_k: usize) -> Subspace {
    subspace_pgprime(&ParabolicShape::new(vec![n]).expect("single block"), d_k)
}

/// The Weyl action `(wψ)_j = ψ_{w⁻¹(j)}` on every coordinate family. This is
/// a left action: `(w₁w₂)ψ = w₁(w₂ψ)`.
pub fn weyl_act(w: &Perm, psi: &CharVector) -> Result<CharVector> {
    let n = psi.n();
    if w.n() != n {
        return Err(dim_err(format!("permutation of degree {} acting on {n} factors", w.n())));
    }
    let inv = w.inverse();
    Ok(CharVector {
        c_sm: (0..n).map(|j| psi.c_sm[inv.apply(j)].clone()).collect(),
        c_an: (0..n).map(|j| psi.c_an[inv.apply(j)].clone()).collect(),
    })
}

/// Matrix of `ψ ↦ wψ` on the flat layout.
pub fn weyl_matrix(w: &Perm, d_k: usize) -> Matrix {
    let n = w.n();
    let dim = char_dim(n, d_k);
    Matrix::of_linear_map(dim, dim, |v| {
        let psi = CharVector::from_flat(n, d_k, v).expect("flat vector");
        weyl_act(w, &psi).expect("degree").to_flat()
    })
}

/// Projection onto [`subspace_gprime`] along the complement
/// `{c_sm = 0, Σ_i c_an[i][σ] = 0 for every σ}`: keeps `c_sm`, replaces each
/// analytic column by its average.
pub fn project_gprime(psi: &CharVector) -> CharVector {
    let n = psi.n();
    let d_k = psi.d_k();
    let avg: Vec<ExactScalar> = (0..d_k)
        .map(|s| {
            let total = psi.c_an.iter().fold(ExactScalar::zero(), |acc, r| acc + &r[s]);
            total / crate::exactlin::q(n as i64)
        })
        .collect();
    CharVector { c_sm: psi.c_sm.clone(), c_an: vec![avg; n] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::q;

    #[test]
    fn dimensions_of_distinguished_subspaces() {
        assert_eq!(subspace_gprime(3, 1).dim(), 4);
        let s21 = ParabolicShape::new(vec![2, 1]).unwrap();
        assert_eq!(subspace_pgprime(&s21, 1).dim(), 5);
        let b = ParabolicShape::new(vec![1, 1, 1]).unwrap();
        assert_eq!(subspace_pgprime(&b, 2), Subspace::full(9));
        assert_eq!(subspace_sm(4, 2).dim(), 4);
        assert_eq!(subspace_sigma(3, 2, 1).unwrap().dim(), 6);
        assert!(subspace_sigma(3, 2, 2).is_err());
        let sm = subspace_sm(3, 2);
        let gp = subspace_gprime(3, 2);
        let pg = subspace_pgprime(&s21, 2);
        assert!(gp.contains_subspace(&sm) && pg.contains_subspace(&gp));
    }

    #[test]
    fn weyl_action_basics() {
        let w = Perm::from_one_line(&[2, 1, 3]).unwrap();
        let mut psi = CharVector::zero(3, 1);
        psi.c_sm[0] = q(1);
        let out = weyl_act(&w, &psi).unwrap();
        assert_eq!(out.c_sm, vec![q(0), q(1), q(0)]);
        let c = CharVector::diagonal(3, &[q(2), q(7)]);
        for w in Perm::all(3) {
            assert_eq!(weyl_act(&w, &c).unwrap().c_an, c.c_an);
        }
    }

    #[test]
    fn flat_roundtrip_and_json() {
        let v: Vec<ExactScalar> = (0..8).map(q).collect();
        let psi = CharVector::from_flat(2, 3, &v).unwrap();
        assert_eq!(psi.c_an[1], vec![q(5), q(6), q(7)]);
        assert_eq!(psi.to_flat(), v);
        let json = serde_json::to_string(&psi).unwrap();
        assert!(json.contains("\"d_K\":3"));
        assert_eq!(serde_json::from_str::<CharVector>(&json).unwrap(), psi);
    }
}
