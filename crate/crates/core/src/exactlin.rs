//! Exact rational linear algebra.
//!
//! Scalars are reduced rationals ([`ExactScalar`]). Matrices act on column
//! vectors; subspaces are stored in reduced row-echelon form so that equality
//! of subspaces is equality of their canonical bases.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{dim_err, Error, Result};

/// An exact rational number (always kept in lowest terms with positive
/// denominator by `num-rational`).
pub type ExactScalar = BigRational;

/// Shorthand for an integer scalar.
pub fn q(n: i64) -> ExactScalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the scalar `num/den`. Panics if `den == 0`.
pub fn qr(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"a"` or `"a/b"` into an exact scalar.
pub fn parse_scalar(s: &str) -> Result<ExactScalar> {
    let bad = |m: &str| Error::Parse { field: "scalar".into(), message: format!("`{s}`: {m}") };
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Formats a scalar as `"num/den"` (denominator always present).
pub fn format_scalar(x: &ExactScalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Formats a scalar compactly: integers without denominator.
pub fn display_scalar(x: &ExactScalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format_scalar(x)
    }
}

/// The `p`-adic valuation of a nonzero rational. Returns `None` for zero.
pub fn p_adic_valuation(x: &ExactScalar, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |mut m: BigInt| {
        let mut v = 0i64;
        m = m.abs();
        while (&m % &p).is_zero() {
            m /= &p;
            v += 1;
        }
        v
    };
    Some(count(x.numer().clone()) - count(x.denom().clone()))
}

/// Integer power of a scalar (negative exponents allowed for nonzero base).
pub fn scalar_pow(x: &ExactScalar, e: i64) -> ExactScalar {
    let mut r = ExactScalar::one();
    for _ in 0..e.unsigned_abs() {
        r *= x;
    }
    if e < 0 {
        r.recip()
    } else {
        r
    }
}

/// Dot product of two equally long vectors.
pub fn dot(a: &[ExactScalar], b: &[ExactScalar]) -> ExactScalar {
    a.iter().zip(b).fold(ExactScalar::zero(), |acc, (x, y)| acc + x * y)
}

/// True when every entry is zero.
pub fn is_zero_vec(v: &[ExactScalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Dense exact matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl Matrix {
    /// The zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ExactScalar::one();
        }
        m
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(d: &[ExactScalar]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
    }

    /// Builds a matrix entry by entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows; `cols` is needed for the empty case.
    pub fn from_rows(cols: usize, rows: &[Vec<ExactScalar>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(dim_err(format!("row {i} has length {} but {cols} columns expected", r.len())));
            }
            data.extend(r.iter().cloned());
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// Builds a matrix from integer rows (convenience for literals and tests).
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<ExactScalar>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Self::from_rows(cols, &rows).expect("ragged integer literal")
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<ExactScalar>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }

    /// Sets entry `(i, j)`.
    pub fn set(&mut self, i: usize, j: usize, x: ExactScalar) {
        self.data[i * self.cols + j] = x;
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// All rows as owned vectors.
    pub fn to_rows(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product, checked.
    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product. Panics on a shape mismatch (a programming error).
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix shape mismatch")
    }

    /// Applies the matrix to a column vector. Panics on a length mismatch.
    pub fn apply(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Entrywise sum. Panics on a shape mismatch.
    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Entrywise difference. Panics on a shape mismatch.
    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-ExactScalar::one()))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &ExactScalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// True when every entry is zero.
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Sub-matrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Rank by elimination.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix, or `None` if singular or non-square.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (r, piv) = self.hstack(&Matrix::identity(n)).rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.select(&rows, &cols))
    }

    /// Some solution `x` of `self · x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let aug = self.hstack(&Matrix::from_columns(self.rows, &[b.to_vec()]));
        let (r, piv) = aug.rref();
        if piv.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![ExactScalar::zero(); self.cols];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    /// A left inverse `L` with `L · self = I`, for a matrix of full column
    /// rank; `None` otherwise. On the image of `self`, `L` inverts `self`.
    pub fn left_inverse(&self) -> Option<Matrix> {
        let (_, piv) = self.transpose().rref();
        if piv.len() != self.cols {
            return None;
        }
        // Rows `piv` of `self` form an invertible square block.
        let all: Vec<usize> = (0..self.cols).collect();
        let block_inv = self.select(&piv, &all).inverse()?;
        let mut l = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.cols {
            for (k, &r) in piv.iter().enumerate() {
                l.set(i, r, block_inv.get(i, k).clone());
            }
        }
        Some(l)
    }

    /// Builds the matrix of a linear map given as a function on vectors, by
    /// evaluating it on the standard basis of `E^{dim_in}`.
    pub fn of_linear_map(dim_in: usize, dim_out: usize, f: impl Fn(&[ExactScalar]) -> Vec<ExactScalar>) -> Matrix {
        let cols: Vec<Vec<ExactScalar>> = (0..dim_in).map(|j| f(&unit(dim_in, j))).collect();
        for c in &cols {
            assert_eq!(c.len(), dim_out, "linear map produced a vector of the wrong length");
        }
        Matrix::from_columns(dim_out, &cols)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(display_scalar).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The `j`-th standard basis vector of `E^n`.
pub fn unit(n: usize, j: usize) -> Vec<ExactScalar> {
    let mut v = vec![ExactScalar::zero(); n];
    v[j] = ExactScalar::one();
    v
}

/// A linear subspace of `E^n` in canonical (reduced row-echelon) form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// The span of the given vectors of length `ambient`.
    pub fn span(ambient: usize, vectors: &[Vec<ExactScalar>]) -> Result<Self> {
        Ok(Self::from_row_matrix(&Matrix::from_rows(ambient, vectors)?))
    }

    /// The row space of a matrix.
    pub fn from_row_matrix(m: &Matrix) -> Self {
        let (r, pivots) = m.rref();
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let all: Vec<usize> = (0..m.cols()).collect();
        Self { ambient: m.cols(), basis: r.select(&keep, &all), pivots }
    }

    /// The zero subspace.
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Matrix::zeros(0, ambient), pivots: vec![] }
    }

    /// The whole space.
    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: Matrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// The span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let v: Vec<Vec<ExactScalar>> = indices.iter().map(|&i| unit(ambient, i)).collect();
        Self::span(ambient, &v).expect("coordinate span")
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Canonical basis (rows, reduced row-echelon).
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Canonical basis vectors.
    pub fn basis_vectors(&self) -> Vec<Vec<ExactScalar>> {
        self.basis.to_rows()
    }

    /// Pivot columns of the canonical basis.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(dim_err(format!("ambient dimensions {} and {} differ", self.ambient, other.ambient)));
        }
        Ok(())
    }

    /// Membership test.
    pub fn contains(&self, v: &[ExactScalar]) -> bool {
        self.coords(v).is_some()
    }

    /// `other ⊆ self`.
    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.ambient == self.ambient && other.basis.to_rows().iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v ∉ self`.
    /// Because the basis is reduced, the coordinates are the pivot entries.
    pub fn coords(&self, v: &[ExactScalar]) -> Option<Vec<ExactScalar>> {
        if v.len() != self.ambient {
            return None;
        }
        let c: Vec<ExactScalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        (self.from_coords(&c) == v).then_some(c)
    }

    /// The vector with the given coordinates in the canonical basis.
    pub fn from_coords(&self, c: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(c.len(), self.dim(), "coordinate length mismatch");
        let mut v = vec![ExactScalar::zero(); self.ambient];
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(k).iter().enumerate() {
                if !b.is_zero() {
                    v[j] += ck * b;
                }
            }
        }
        v
    }

    /// Matrix (ambient × dim) whose columns are the canonical basis vectors.
    pub fn embedding(&self) -> Matrix {
        self.basis.transpose()
    }

    /// Matrix (dim × ambient) extracting canonical coordinates of vectors
    /// lying in the subspace.
    pub fn coordinate_map(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.ambient, |k, j| {
            if self.pivots[k] == j {
                ExactScalar::one()
            } else {
                ExactScalar::zero()
            }
        })
    }

    /// `self + other`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        Ok(Subspace::from_row_matrix(&self.basis.vstack(&other.basis)))
    }

    /// `self ∩ other`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let ann = self.annihilator().sum(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    /// The annihilator `{y : y·x = 0 for all x ∈ self}` under the standard
    /// pairing.
    pub fn annihilator(&self) -> Subspace {
        kernel(&self.basis)
    }

    /// Canonical text serialization (used for hashing and byte comparison).
    pub fn canonical_string(&self) -> String {
        let rows: Vec<String> = (0..self.dim())
            .map(|i| self.basis.row(i).iter().map(format_scalar).collect::<Vec<_>>().join(","))
            .collect();
        format!("ambient={};rows=[{}]", self.ambient, rows.join(";"))
    }
}

/// Kernel `{x : M x = 0}` as a subspace of `E^{cols}`.
pub fn kernel(m: &Matrix) -> Subspace {
    let (r, piv) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !piv.contains(c)).collect();
    let vectors: Vec<Vec<ExactScalar>> = free
        .iter()
        .map(|&f| {
            let mut v = unit(m.cols(), f);
            for (i, &p) in piv.iter().enumerate() {
                v[p] = -r.get(i, f).clone();
            }
            v
        })
        .collect();
    Subspace::span(m.cols(), &vectors).expect("kernel vectors")
}

/// Image (column space) as a subspace of `E^{rows}`.
pub fn image(m: &Matrix) -> Subspace {
    Subspace::from_row_matrix(&m.transpose())
}

/// Preimage `{x : M x ∈ W}`.
pub fn preimage(m: &Matrix, w: &Subspace) -> Result<Subspace> {
    if w.ambient_dim() != m.rows() {
        return Err(dim_err(format!(
            "target subspace lives in E^{} but the map lands in E^{}",
            w.ambient_dim(),
            m.rows()
        )));
    }
    let ann = w.annihilator();
    Ok(kernel(&ann.basis().mul(m)))
}

/// Image of a subspace under a matrix.
pub fn map_subspace(m: &Matrix, u: &Subspace) -> Result<Subspace> {
    if u.ambient_dim() != m.cols() {
        return Err(dim_err(format!("subspace lives in E^{} but the map starts at E^{}", u.ambient_dim(), m.cols())));
    }
    Ok(image(&m.mul(&u.embedding())))
}

/// The quotient `E^n / S` with coordinates given by the non-pivot columns
/// of the canonical basis of `S`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quotient {
    sub: Subspace,
    free: Vec<usize>,
}

impl Quotient {
    /// Quotient of the ambient space of `sub` by `sub`.
    pub fn new(sub: Subspace) -> Self {
        let free = (0..sub.ambient_dim()).filter(|c| !sub.pivots().contains(c)).collect();
        Self { sub, free }
    }

    /// The subspace divided out.
    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    /// Dimension of the quotient.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Ambient dimension of the numerator.
    pub fn ambient_dim(&self) -> usize {
        self.sub.ambient_dim()
    }

    /// Reduces a vector modulo the subspace to its normal form (zero at the
    /// pivot columns of the subspace).
    pub fn reduce(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        let mut v = v.to_vec();
        for (k, &p) in self.sub.pivots().iter().enumerate() {
            let c = v[p].clone();
            if c.is_zero() {
                continue;
            }
            for (j, b) in self.sub.basis().row(k).iter().enumerate() {
                if !b.is_zero() {
                    v[j] -= &c * b;
                }
            }
        }
        v
    }

    /// Coordinates of the class of `v`.
    pub fn coords(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        let r = self.reduce(v);
        self.free.iter().map(|&j| r[j].clone()).collect()
    }

    /// The normal-form representative of the class with the given coordinates.
    pub fn lift(&self, c: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(c.len(), self.dim(), "quotient coordinate length mismatch");
        let mut v = vec![ExactScalar::zero(); self.ambient_dim()];
        for (k, &j) in self.free.iter().enumerate() {
            v[j] = c[k].clone();
        }
        v
    }

    /// Matrix (dim × ambient) of the projection onto quotient coordinates.
    pub fn projection(&self) -> Matrix {
        let n = self.ambient_dim();
        Matrix::of_linear_map(n, self.dim(), |v| self.coords(v))
    }

    /// Matrix (ambient × dim) of the normal-form section.
    pub fn section(&self) -> Matrix {
        Matrix::of_linear_map(self.dim(), self.ambient_dim(), |c| self.lift(c))
    }
}

/// A complete flag `F_1 ⊂ … ⊂ F_n` of `E^n` with `dim F_i = i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flag {
    steps: Vec<Subspace>,
}

impl Flag {
    /// Validates and builds a complete flag.
    pub fn new(steps: Vec<Subspace>) -> Result<Self> {
        let n = steps.len();
        for (i, s) in steps.iter().enumerate() {
            if s.ambient_dim() != n {
                return Err(dim_err(format!("flag step {} lives in E^{} instead of E^{n}", i + 1, s.ambient_dim())));
            }
            if s.dim() != i + 1 {
                return Err(Error::InvalidInput(format!("flag step {} has dimension {}", i + 1, s.dim())));
            }
            if i > 0 && !s.contains_subspace(&steps[i - 1]) {
                return Err(Error::InvalidInput(format!("flag step {} does not contain step {}", i + 1, i)));
            }
        }
        Ok(Self { steps })
    }

    /// Flag whose `i`-th step is spanned by the first `i` vectors.
    pub fn from_vectors(vectors: &[Vec<ExactScalar>]) -> Result<Self> {
        let n = vectors.len();
        let steps = (1..=n).map(|i| Subspace::span(n, &vectors[..i])).collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }

    /// Coordinate flag `span(e_{order[0]}, …, e_{order[i-1]})` (0-based indices).
    pub fn coordinate(order: &[usize]) -> Result<Self> {
        let n = order.len();
        Self::from_vectors(&order.iter().map(|&k| unit(n, k)).collect::<Vec<_>>())
    }

    /// The standard flag `span(e_1..e_i)`.
    pub fn standard(n: usize) -> Self {
        Self::coordinate(&(0..n).collect::<Vec<_>>()).expect("standard flag")
    }

    /// The antistandard flag `span(e_n..e_{n-i+1})`.
    pub fn antistandard(n: usize) -> Self {
        Self::coordinate(&(0..n).rev().collect::<Vec<_>>()).expect("antistandard flag")
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.steps.len()
    }

    /// Step `i` (1-based, `1 ≤ i ≤ n`).
    pub fn step(&self, i: usize) -> &Subspace {
        &self.steps[i - 1]
    }

    /// All steps.
    pub fn steps(&self) -> &[Subspace] {
        &self.steps
    }
}

/// Relative general position: `dim(F_i ∩ G_j) = max(0, i + j − n)` for all `i, j`.
pub fn general_position(f: &Flag, g: &Flag) -> Result<bool> {
    let n = f.ambient_dim();
    if g.ambient_dim() != n {
        return Err(dim_err(format!("flags in E^{n} and E^{}", g.ambient_dim())));
    }
    for i in 1..=n {
        for j in 1..=n {
            let d = f.step(i).intersect(g.step(j))?.dim();
            if d != (i + j).saturating_sub(n) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<ExactScalar> {
        x.iter().map(|&a| q(a)).collect()
    }

    #[test]
    fn scalar_roundtrip_and_valuation() {
        let x = parse_scalar("-6/4").unwrap();
        assert_eq!(format_scalar(&x), "-3/2");
        assert_eq!(parse_scalar("7").unwrap(), q(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert_eq!(p_adic_valuation(&qr(50, 3), 5), Some(2));
        assert_eq!(p_adic_valuation(&qr(2, 25), 5), Some(-2));
        assert_eq!(p_adic_valuation(&q(0), 5), None);
    }

    #[test]
    fn sum_and_intersection_of_lines() {
        let u = Subspace::span(3, &[v(&[1, 0, 0])]).unwrap();
        let w = Subspace::span(3, &[v(&[0, 1, 0])]).unwrap();
        assert_eq!(u.sum(&w).unwrap(), Subspace::coordinate(3, &[0, 1]));
        assert_eq!(u.sum(&u).unwrap(), u);
        let a = Subspace::coordinate(3, &[0, 1]);
        let b = Subspace::coordinate(3, &[1, 2]);
        assert_eq!(a.intersect(&b).unwrap(), Subspace::coordinate(3, &[1]));
        assert_eq!(a.intersect(&Subspace::full(3)).unwrap(), a);
        assert!(a.sum(&Subspace::full(4)).is_err());
    }

    #[test]
    fn kernel_image_preimage_extremes() {
        let i = Matrix::identity(4);
        assert_eq!(kernel(&i).dim(), 0);
        assert_eq!(image(&i), Subspace::full(4));
        let z = Matrix::zeros(3, 4);
        assert_eq!(kernel(&z), Subspace::full(4));
        assert_eq!(image(&z).dim(), 0);
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(preimage(&m, &image(&m)).unwrap(), Subspace::full(3));
        assert!(preimage(&m, &Subspace::full(5)).is_err());
    }

    #[test]
    fn inverse_solve_left_inverse() {
        let m = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
        let x = m.solve(&v(&[3, 2])).unwrap();
        assert_eq!(m.apply(&x), v(&[3, 2]));
        let tall = Matrix::from_i64(&[&[1, 0], &[1, 1], &[0, 1]]);
        let l = tall.left_inverse().unwrap();
        assert_eq!(l.mul(&tall), Matrix::identity(2));
    }

    #[test]
    fn quotient_coordinates() {
        let s = Subspace::span(3, &[v(&[1, 1, 0])]).unwrap();
        let qt = Quotient::new(s);
        assert_eq!(qt.dim(), 2);
        assert_eq!(qt.coords(&v(&[1, 1, 0])), v(&[0, 0]));
        assert_eq!(qt.coords(&v(&[2, 1, 5])), qt.coords(&v(&[1, 0, 5])));
        let c = v(&[3, -1]);
        assert_eq!(qt.coords(&qt.lift(&c)), c);
    }

    #[test]
    fn flags_and_general_position() {
        assert!(!general_position(&Flag::standard(2), &Flag::standard(2)).unwrap());
        assert!(general_position(&Flag::standard(3), &Flag::antistandard(3)).unwrap());
        // Egl3-shaped Hodge flag: <e1+a e2+e3> ⊂ <e1+a e2+e3, e1+e2> ⊂ E^3.
        for a in [5i64, -2, 7] {
            let hodge = Flag::from_vectors(&[v(&[1, a, 1]), v(&[1, 1, 0]), v(&[1, 0, 0])]).unwrap();
            for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                let eig = Flag::coordinate(&order).unwrap();
                assert!(general_position(&hodge, &eig).unwrap());
                assert!(general_position(&eig, &hodge).unwrap());
            }
        }
        // a = 0 puts the line inside a coordinate plane.
        let crit = Flag::from_vectors(&[v(&[1, 0, 1]), v(&[1, 1, 0]), v(&[1, 0, 0])]).unwrap();
        assert!(!general_position(&crit, &Flag::coordinate(&[0, 2, 1]).unwrap()).unwrap());
        assert!(Flag::new(vec![Subspace::full(2), Subspace::full(2)]).is_err());
    }
}
