//! Dense complex linear algebra for the small operators used everywhere else.
//!
//! Matrices are row-major. Composite systems follow one fixed ordering: subsystem 0
//! is the slowest-varying tensor factor, so `tensor(a, b)` puts `a` first.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Eigenvalues at or below this fraction of the largest one are treated as exact zeros.
pub const SUPPORT_EPS: f64 = 1e-10;

/// Absolute tolerance for the Hermitian and projector checks on inputs.
pub const INPUT_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Builds a matrix from real row slices; handy for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Column vector.
    pub fn ket(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Row vector holding the conjugate of `v`.
    pub fn bra(v: &[C64]) -> Self {
        Self {
            rows: 1,
            cols: v.len(),
            data: v.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `|a><b|`
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    /// `|v><v|`
    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    /// Computational basis vector `|i>` of dimension `dim`.
    pub fn basis(dim: usize, i: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entrywise deviation from Hermiticity, or `None` if not square.
    pub fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Some(dev)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation().is_some_and(|d| d <= tol)
    }

    /// `(M + M^dagger)/2`
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + adj[(i, j)]) * 0.5
        })
    }

    /// Sum of `conj(a_ij) * b_ij`, i.e. `Tr{A^dagger B}`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `Tr{A B}` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul of {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `A X A^dagger`
    pub fn sandwich(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = CMatrix::zeros(rows, cols);
    for ia in 0..a.rows {
        for ja in 0..a.cols {
            let s = a[(ia, ja)];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for ib in 0..b.rows {
                for jb in 0..b.cols {
                    out[(ia * b.rows + ib, ja * b.cols + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, first factor slowest.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::identity(1), |acc, f| tensor(&acc, f))
}

/// Kronecker product of vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Splits flat indices of a composite space into (kept, traced) indices.
struct IndexSplit {
    kept: Vec<usize>,
    traced: Vec<usize>,
    kept_dim: usize,
}

impl IndexSplit {
    fn new(dims: &[usize], keep: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        let kept_dim = keep.iter().map(|&k| dims[k]).product();
        let mut kept = Vec::with_capacity(total);
        let mut traced = Vec::with_capacity(total);
        let mut digits = vec![0usize; dims.len()];
        for flat in 0..total {
            let mut rem = flat;
            for s in (0..dims.len()).rev() {
                digits[s] = rem % dims[s];
                rem /= dims[s];
            }
            let (mut k, mut t) = (0usize, 0usize);
            for (s, &d) in dims.iter().enumerate() {
                if keep.contains(&s) {
                    k = k * d + digits[s];
                } else {
                    t = t * d + digits[s];
                }
            }
            kept.push(k);
            traced.push(t);
        }
        Self {
            kept,
            traced,
            kept_dim,
        }
    }
}

/// Traces out every subsystem not listed in `keep`. Kept subsystems stay in their
/// original relative order.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let total: usize = dims.iter().product();
    if total != m.rows {
        return Err(Error::DimensionMismatch {
            context: "partial trace",
            expected: total,
            found: m.rows,
        });
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch {
            context: "partial trace subsystem index",
            expected: dims.len(),
            found: bad,
        });
    }
    let split = IndexSplit::new(dims, keep);
    let mut out = CMatrix::zeros(split.kept_dim, split.kept_dim);
    for r in 0..total {
        for c in 0..total {
            if split.traced[r] == split.traced[c] {
                out[(split.kept[r], split.kept[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Places `op` on subsystem `target` of a composite space, identity elsewhere.
pub fn embed(op: &CMatrix, dims: &[usize], target: usize) -> CMatrix {
    let before: usize = dims[..target].iter().product();
    let after: usize = dims[target + 1..].iter().product();
    tensor(
        &tensor(&CMatrix::identity(before), op),
        &CMatrix::identity(after),
    )
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    /// Unitary whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

impl HermEig {
    /// `V f(Λ) V^dagger`
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in fv.iter().enumerate() {
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Eigenvalue cutoff separating support from numerical zeros.
    pub fn support_cutoff(&self) -> f64 {
        SUPPORT_EPS * self.max_value().max(0.0)
    }

    pub fn rank(&self) -> usize {
        let cut = self.support_cutoff();
        self.values.iter().filter(|&&l| l > cut).count()
    }

    /// Projector onto the span of eigenvectors with eigenvalue above the cutoff.
    pub fn support_projector(&self) -> CMatrix {
        let cut = self.support_cutoff();
        self.apply_fn(|l| {
            if l > cut {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian to [`INPUT_TOL`] relative to its largest entry; only its
/// Hermitian part is used.
pub fn eigh(m: &CMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let dev = m.hermitian_deviation().unwrap_or(0.0);
    if dev > INPUT_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = n <= 1 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) <= f64::EPSILON * 1e-2 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                // Rotation is negligible once the coupling is below rounding on the diagonal.
                if r <= f64::EPSILON * 1e-3 * (alpha.abs() + beta.abs()) {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                let g = apq / r;
                let theta = (beta - alpha) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -g.conj() * s;
                let jqq = g.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    if !converged {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) > 1e-13 * scale {
            return Err(Error::EigenNoConvergence);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermEig { values, vectors })
}

/// Eigendecomposition of a matrix that must be positive semidefinite.
pub fn eigh_psd(m: &CMatrix) -> Result<HermEig> {
    let eig = eigh(m)?;
    let floor = -INPUT_TOL * eig.max_value().abs().max(1.0);
    if eig.min_value() < floor {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min_value(),
        });
    }
    Ok(eig)
}

/// Complex power `m^z` on the support of a PSD matrix; the kernel maps to zero.
///
/// With `Re z < 0` this is the pseudo-inverse power, which is what the recovery maps
/// need for rank-deficient marginals.
pub fn mat_power_on_support(m: &CMatrix, z: C64) -> Result<CMatrix> {
    Ok(power_from_eig(&eigh_psd(m)?, z))
}

/// `m^z` on support from an existing decomposition.
pub fn power_from_eig(eig: &HermEig, z: C64) -> CMatrix {
    let cut = eig.support_cutoff();
    eig.apply_fn(|l| {
        if l > cut {
            (z * libm::log(l)).exp()
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = eigh_psd(m)?;
    Ok(eig.apply_fn(|l| C64::new(libm::sqrt(l.max(0.0)), 0.0)))
}

/// Checks that `m` is a density matrix: Hermitian, PSD and unit trace, each to `tol`.
pub fn check_density(m: &CMatrix, tol: f64) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let dev = m.hermitian_deviation().unwrap_or(0.0);
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > tol {
        return Err(Error::NotNormalized { trace: tr });
    }
    let eig = eigh(m)?;
    if eig.min_value() < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min_value(),
        });
    }
    Ok(eig)
}

/// Uhlmann fidelity `||sqrt(a) sqrt(b)||_1^2` of two density matrices.
///
/// Computed from the spectrum of `sqrt(a) b sqrt(a)`, so no non-Hermitian square root is
/// ever formed.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch {
            context: "fidelity",
            expected: a.rows,
            found: b.rows,
        });
    }
    let ea = check_density(a, 1e-8)?;
    let eb = check_density(b, 1e-8)?;
    // Work on the support of the lower-rank argument: the compressed r x r matrix
    // D^{1/2} V^† other V D^{1/2} has the same nonzero spectrum as sqrt(a) b sqrt(a)
    // without the round-off eigenvalues of the null space.
    let (eig, other) = if ea.rank() <= eb.rank() {
        (&ea, b)
    } else {
        (&eb, a)
    };
    let cut = eig.support_cutoff();
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > cut)
        .collect();
    let n = a.rows;
    let v = CMatrix::from_fn(n, kept.len(), |row, j| {
        eig.vectors[(row, kept[j])] * libm::sqrt(eig.values[kept[j]])
    });
    let inner = v.adjoint().matmul(other).matmul(&v).hermitian_part();
    let spectrum = eigh(&inner)?.values;
    let floor = 64.0 * f64::EPSILON * inner.frobenius_norm();
    let root_sum: f64 = spectrum
        .iter()
        .filter(|&&l| l > floor)
        .map(|&l| libm::sqrt(l))
        .sum();
    let f = root_sum * root_sum;
    debug_assert!((-1e-9..=1.0 + 1e-9).contains(&f), "fidelity {f}");
    Ok(f.clamp(0.0, 1.0))
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.rows == 0 || m.cols == 0 {
        return 0.0;
    }
    if m.is_hermitian(0.0) {
        return match eigh(m) {
            Ok(e) => e.max_value().abs().max(e.min_value().abs()),
            Err(_) => gram_norm(m),
        };
    }
    gram_norm(m)
}

fn gram_norm(m: &CMatrix) -> f64 {
    let gram = if m.rows <= m.cols {
        m.matmul(&m.adjoint())
    } else {
        m.adjoint().matmul(m)
    };
    eigh(&gram)
        .map(|e| libm::sqrt(e.max_value().max(0.0)))
        .unwrap_or(f64::NAN)
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(m: &CMatrix) -> Result<f64> {
    Ok(eigh(m)?.values.iter().map(|l| l.abs()).sum())
}

/// `||a - b||_1 / 2` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::DimensionMismatch {
            context: "trace distance",
            expected: a.rows,
            found: b.rows,
        });
    }
    Ok(0.5 * trace_norm_hermitian(&(a - b).hermitian_part())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    #[test]
    fn tensor_of_identities_is_identity() {
        let i2 = CMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), CMatrix::identity(4));
    }

    #[test]
    fn tensor_basis_bookkeeping() {
        let a = CMatrix::from_real_diag(&[1.0, 0.0]);
        let b = CMatrix::from_real_diag(&[0.0, 1.0]);
        assert_eq!(
            tensor(&a, &b),
            CMatrix::from_real_diag(&[0.0, 1.0, 0.0, 0.0])
        );
    }

    #[test]
    fn tensor_trace_is_product_of_traces() {
        let mut rng = rng(3);
        for _ in 0..20 {
            let a = random_density(&mut rng, 2);
            let b = random_density(&mut rng, 2);
            let t = tensor(&a, &b).trace();
            let expected = a.trace() * b.trace();
            assert!((t - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = rng(5);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 2).scale_re(0.5);
        let out = partial_trace(&tensor(&a, &b), &[2, 2], &[1]).unwrap();
        assert_close(&out, &b.scale(a.trace()), 1e-14);
        let out = partial_trace(&tensor(&a, &b), &[2, 2], &[0]).unwrap();
        assert_close(&out, &a.scale(b.trace()), 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let phi = [c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)];
        let rho = CMatrix::projector(&phi);
        let out = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert_close(&out, &CMatrix::identity(2).scale_re(0.5), 1e-15);
    }

    #[test]
    fn partial_trace_matches_explicit_index_loops() {
        // Independent oracle: hand-written loops for the [2,2,2] -> keep {0,2} case.
        let mut rng = rng(11);
        let rho = random_density(&mut rng, 8);
        let mut oracle = CMatrix::zeros(4, 4);
        for a in 0..2 {
            for c in 0..2 {
                for a2 in 0..2 {
                    for c2 in 0..2 {
                        let mut acc = c64(0.0, 0.0);
                        for b in 0..2 {
                            acc += rho[(a * 4 + b * 2 + c, a2 * 4 + b * 2 + c2)];
                        }
                        oracle[(a * 2 + c, a2 * 2 + c2)] = acc;
                    }
                }
            }
        }
        let out = partial_trace(&rho, &[2, 2, 2], &[0, 2]).unwrap();
        assert_close(&out, &oracle, 1e-15);
        assert!((out.trace() - rho.trace()).norm() < 1e-12);
        let single = partial_trace(&rho, &[2, 2, 2], &[1]).unwrap();
        assert!((single.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = CMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = rng(17);
        for trial in 0..1000 {
            let n = 1 + trial % 16;
            let m = random_hermitian(&mut rng, n);
            let eig = eigh(&m).unwrap();
            let rec = eig.apply_fn(|l| c64(l, 0.0));
            let err = (&rec - &m).max_abs();
            assert!(err <= 1e-10 * m.max_abs().max(1e-300), "n={n} err={err}");
            let vv = eig.vectors.adjoint().matmul(&eig.vectors);
            assert!((&vv - &CMatrix::identity(n)).max_abs() <= 1e-10);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigh_handles_degenerate_and_diagonal() {
        let m = CMatrix::identity(5).scale_re(0.2);
        let eig = eigh(&m).unwrap();
        assert!(eig.values.iter().all(|&l| (l - 0.2).abs() < 1e-15));
        let zero = CMatrix::zeros(3, 3);
        assert_eq!(eigh(&zero).unwrap().values, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn power_of_scalar_matrix() {
        let pi2 = CMatrix::identity(2).scale_re(0.5);
        let out = mat_power_on_support(&pi2, c64(0.5, 0.0)).unwrap();
        assert_close(
            &out,
            &CMatrix::identity(2).scale_re(core::f64::consts::FRAC_1_SQRT_2),
            1e-15,
        );
    }

    #[test]
    fn negative_power_is_support_projection_on_projector() {
        let m = CMatrix::from_real_diag(&[1.0, 0.0]);
        let out = mat_power_on_support(&m, c64(-0.5, 0.0)).unwrap();
        assert_close(&out, &m, 1e-15);
    }

    #[test]
    fn complex_power_matches_scalar_oracle() {
        let z = c64(-0.5, 0.25);
        let m = CMatrix::from_real_diag(&[0.7, 0.3, 0.0]);
        let out = mat_power_on_support(&m, z).unwrap();
        // Scalar oracle: λ^z = exp(z ln λ) entry by entry.
        let p = |l: f64| (c64(libm::log(l), 0.0) * z).exp();
        let mut expected = CMatrix::zeros(3, 3);
        expected[(0, 0)] = p(0.7);
        expected[(1, 1)] = p(0.3);
        assert_close(&out, &expected, 1e-14);
    }

    #[test]
    fn power_rejects_negative_matrix() {
        let m = CMatrix::from_real_diag(&[1.0, -0.1]);
        assert!(matches!(
            mat_power_on_support(&m, c64(0.5, 0.0)),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn power_laws_on_support() {
        let mut rng = rng(23);
        for _ in 0..50 {
            let n = 2 + rng_usize(&mut rng, 5);
            let rank = 1 + rng_usize(&mut rng, n);
            let m = random_density_rank(&mut rng, n, rank);
            let one = mat_power_on_support(&m, c64(1.0, 0.0)).unwrap();
            assert_close(&one, &m, 1e-9);
            let a = c64(-0.5, 0.3);
            let b = c64(0.75, -1.1);
            let lhs = mat_power_on_support(&m, a)
                .unwrap()
                .matmul(&mat_power_on_support(&m, b).unwrap());
            let rhs = mat_power_on_support(&m, a + b).unwrap();
            assert_close(&lhs, &rhs, 1e-9 * rhs.max_abs().max(1.0));
        }
    }

    #[test]
    fn fidelity_basic_cases() {
        let mut rng = rng(29);
        let rho = random_density(&mut rng, 3);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        let p0 = CMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = CMatrix::from_real_diag(&[0.0, 1.0]);
        assert!(fidelity(&p0, &p1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn fidelity_symmetric_and_pure_overlap() {
        let mut rng = rng(31);
        for _ in 0..100 {
            let a = random_density(&mut rng, 3);
            let b = random_density(&mut rng, 3);
            let fab = fidelity(&a, &b).unwrap();
            let fba = fidelity(&b, &a).unwrap();
            assert!((fab - fba).abs() < 1e-10);
            let psi = random_ket(&mut rng, 3);
            let phi = random_ket(&mut rng, 3);
            let overlap: C64 = psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
            let f = fidelity(&CMatrix::projector(&psi), &CMatrix::projector(&phi)).unwrap();
            assert!((f - overlap.norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn op_norm_cases() {
        assert!((op_norm(&CMatrix::identity(2)) - 1.0).abs() < 1e-15);
        assert_eq!(op_norm(&CMatrix::zeros(2, 2)), 0.0);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let plus = [c64(s, 0.0), c64(s, 0.0)];
        let zero = CMatrix::basis(2, 0);
        let prod = CMatrix::projector(&plus).matmul(&CMatrix::projector(&zero));
        // 2x2 SVD oracle: prod = [[1/2, 0], [1/2, 0]], singular values sqrt(1/2) and 0.
        assert!((op_norm(&prod) - s).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_states() {
        let p0 = CMatrix::from_real_diag(&[1.0, 0.0]);
        let p1 = CMatrix::from_real_diag(&[0.0, 1.0]);
        assert!((trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-15);
    }
}
