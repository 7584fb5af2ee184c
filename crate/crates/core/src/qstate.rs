//! Density operators on labelled composite systems, projective measurements, and the
//! classical-quantum states they produce.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qmat::{
    self, c64, check_density, eigh, embed, op_norm, partial_trace, tensor, CMatrix, C64, INPUT_TOL,
};

/// Tolerance for the Hermitian / positivity / trace invariants of a state.
pub const STATE_TOL: f64 = 1e-10;

/// Positive unit-trace operator on a labelled tensor product of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, dims: &[usize], labels: &[&str]) -> Result<Self> {
        Self::with_tolerance(matrix, dims, labels, STATE_TOL)
    }

    /// Like [`DensityOperator::new`] with a caller-chosen invariant tolerance, for
    /// states produced by approximate pipelines.
    pub fn with_tolerance(
        matrix: CMatrix,
        dims: &[usize],
        labels: &[&str],
        tol: f64,
    ) -> Result<Self> {
        check_layout(&matrix, dims, labels)?;
        check_density(&matrix, tol)?;
        Ok(Self {
            matrix: matrix.hermitian_part(),
            dims: dims.to_vec(),
            labels: labels.iter().map(|&l| l.to_owned()).collect(),
        })
    }

    pub(crate) fn from_parts_unchecked(
        matrix: CMatrix,
        dims: Vec<usize>,
        labels: Vec<String>,
    ) -> Self {
        debug_assert_eq!(matrix.rows(), dims.iter().product::<usize>());
        Self {
            matrix,
            dims,
            labels,
        }
    }

    /// `|psi><psi|` for a normalized `psi`.
    pub fn pure(ket: &[C64], dims: &[usize], labels: &[&str]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { trace: norm });
        }
        Self::new(CMatrix::projector(ket), dims, labels)
    }

    pub fn maximally_mixed(dim: usize, label: &str) -> Self {
        Self::from_parts_unchecked(
            CMatrix::identity(dim).scale_re(1.0 / dim as f64),
            alloc::vec![dim],
            alloc::vec![label.to_owned()],
        )
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// Same matrix under new subsystem labels.
    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        check_layout(&self.matrix, &self.dims, labels)?;
        Ok(Self::from_parts_unchecked(
            self.matrix.clone(),
            self.dims.clone(),
            labels.iter().map(|&l| l.to_owned()).collect(),
        ))
    }

    /// Same matrix viewed under a different subsystem split.
    pub fn reshape(&self, dims: &[usize], labels: &[&str]) -> Result<Self> {
        check_layout(&self.matrix, dims, labels)?;
        Ok(Self::from_parts_unchecked(
            self.matrix.clone(),
            dims.to_vec(),
            labels.iter().map(|&l| l.to_owned()).collect(),
        ))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::from_parts_unchecked(tensor(&self.matrix, &other.matrix), dims, labels)
    }

    /// Marginal on the listed subsystems (kept in their original order).
    pub fn reduce(&self, keep: &[&str]) -> Result<Self> {
        let mut idx = keep
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        let m = partial_trace(&self.matrix, &self.dims, &idx)?;
        Ok(Self::from_parts_unchecked(
            m,
            idx.iter().map(|&i| self.dims[i]).collect(),
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
        ))
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_of_product(&self.matrix).re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        qmat::fidelity(&self.matrix, &other.matrix)
    }
}

fn check_layout(matrix: &CMatrix, dims: &[usize], labels: &[&str]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    let total: usize = dims.iter().product();
    if total != matrix.rows() {
        return Err(Error::DimensionMismatch {
            context: "subsystem dimensions",
            expected: matrix.rows(),
            found: total,
        });
    }
    if labels.len() != dims.len() {
        return Err(Error::DimensionMismatch {
            context: "subsystem labels",
            expected: dims.len(),
            found: labels.len(),
        });
    }
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::InvalidArgument(format!(
                "duplicate subsystem label {l:?}"
            )));
        }
    }
    Ok(())
}

/// Projection-valued measure. Outcome `x` is the index of its projector.
#[derive(Clone, Debug, PartialEq)]
pub struct Pvm {
    projectors: Vec<CMatrix>,
}

impl Pvm {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidPvm("no projectors".into()))?;
        let d = first.rows();
        let mut sum = CMatrix::zeros(d, d);
        for (x, p) in projectors.iter().enumerate() {
            if !p.is_square() || p.rows() != d {
                return Err(Error::InvalidPvm(format!(
                    "projector {x} is {}x{}, expected {d}x{d}",
                    p.rows(),
                    p.cols()
                )));
            }
            let herm = p.hermitian_deviation().unwrap_or(f64::INFINITY);
            if herm > INPUT_TOL {
                return Err(Error::InvalidPvm(format!(
                    "projector {x} is not Hermitian (deviation {herm:e})"
                )));
            }
            let idem = (&p.matmul(p) - p).max_abs();
            if idem > INPUT_TOL {
                return Err(Error::InvalidPvm(format!(
                    "projector {x} is not idempotent (deviation {idem:e})"
                )));
            }
            for (y, q) in projectors[..x].iter().enumerate() {
                let overlap = p.matmul(q).max_abs();
                if overlap > INPUT_TOL {
                    return Err(Error::InvalidPvm(format!(
                        "projectors {y} and {x} are not orthogonal (deviation {overlap:e})"
                    )));
                }
            }
            sum = &sum + p;
        }
        let completeness = (&sum - &CMatrix::identity(d)).max_abs();
        if completeness > INPUT_TOL {
            return Err(Error::InvalidPvm(format!(
                "projectors do not sum to the identity (deviation {completeness:e})"
            )));
        }
        Ok(Self { projectors })
    }

    /// Rank-one measurement in the orthonormal basis `vectors`.
    pub fn from_basis(vectors: &[Vec<C64>]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| CMatrix::projector(v)).collect())
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            projectors: (0..dim)
                .map(|i| CMatrix::projector(&CMatrix::basis(dim, i)))
                .collect(),
        }
    }

    /// Discrete Fourier basis `|k> = sum_j w^{jk} |j> / sqrt(d)`.
    pub fn fourier(dim: usize) -> Self {
        let s = 1.0 / libm::sqrt(dim as f64);
        let vectors: Vec<Vec<C64>> = (0..dim)
            .map(|k| {
                (0..dim)
                    .map(|j| {
                        let phase = 2.0 * core::f64::consts::PI * (j * k) as f64 / dim as f64;
                        c64(s * libm::cos(phase), s * libm::sin(phase))
                    })
                    .collect()
            })
            .collect();
        Self {
            projectors: vectors.iter().map(|v| CMatrix::projector(v)).collect(),
        }
    }

    /// Pauli Z eigenbasis, outcome 0 for eigenvalue +1.
    pub fn pauli_z() -> Self {
        Self::computational(2)
    }

    /// Pauli X eigenbasis `{|+>, |->}`.
    pub fn pauli_x() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            projectors: alloc::vec![
                CMatrix::projector(&[c64(s, 0.0), c64(s, 0.0)]),
                CMatrix::projector(&[c64(s, 0.0), c64(-s, 0.0)]),
            ],
        }
    }

    /// Pauli Y eigenbasis `{|+y>, |-y>}`.
    pub fn pauli_y() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        Self {
            projectors: alloc::vec![
                CMatrix::projector(&[c64(s, 0.0), c64(0.0, s)]),
                CMatrix::projector(&[c64(s, 0.0), c64(0.0, -s)]),
            ],
        }
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows()
    }

    pub fn is_rank_one(&self) -> bool {
        self.projectors
            .iter()
            .all(|p| (p.trace().re - 1.0).abs() <= 1e-8)
    }

    /// The basis vectors `|z>` of a rank-one measurement (each fixed up to a phase).
    pub fn basis_vectors(&self) -> Result<Vec<Vec<C64>>> {
        if !self.is_rank_one() {
            return Err(Error::NotRankOne);
        }
        Ok(self
            .projectors
            .iter()
            .map(|p| {
                let d = p.rows();
                let best = (0..d)
                    .max_by(|&i, &j| p[(i, i)].re.total_cmp(&p[(j, j)].re))
                    .unwrap_or(0);
                let norm = libm::sqrt(p[(best, best)].re);
                p.column(best).into_iter().map(|z| z / norm).collect()
            })
            .collect())
    }
}

/// Classical-quantum state `sum_x |x><x| ⊗ block_x` with the register kept implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct CqState {
    register: String,
    blocks: Vec<CMatrix>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl CqState {
    pub fn new(
        register: &str,
        blocks: Vec<CMatrix>,
        dims: &[usize],
        labels: &[&str],
    ) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut trace = 0.0;
        for b in &blocks {
            if !b.is_square() || b.rows() != total {
                return Err(Error::DimensionMismatch {
                    context: "cq-state block",
                    expected: total,
                    found: b.rows(),
                });
            }
            let eig = eigh(b)?;
            if eig.min_value() < -STATE_TOL {
                return Err(Error::NotPositive {
                    min_eigenvalue: eig.min_value(),
                });
            }
            trace += b.trace().re;
        }
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { trace });
        }
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                context: "subsystem labels",
                expected: dims.len(),
                found: labels.len(),
            });
        }
        Ok(Self {
            register: register.to_owned(),
            blocks,
            dims: dims.to_vec(),
            labels: labels.iter().map(|&l| l.to_owned()).collect(),
        })
    }

    /// Reads the diagonal blocks of a state whose subsystem 0 is the register.
    pub fn from_density(rho: &DensityOperator) -> Self {
        let n = rho.dims[0];
        let rest: usize = rho.dims[1..].iter().product();
        let m = rho.matrix();
        let blocks = (0..n)
            .map(|x| CMatrix::from_fn(rest, rest, |i, j| m[(x * rest + i, x * rest + j)]))
            .collect();
        Self {
            register: rho.labels[0].clone(),
            blocks,
            dims: rho.dims[1..].to_vec(),
            labels: rho.labels[1..].to_vec(),
        }
    }

    pub fn register(&self) -> &str {
        &self.register
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, x: usize) -> &CMatrix {
        &self.blocks[x]
    }

    pub fn outcomes(&self) -> usize {
        self.blocks.len()
    }

    /// Dimensions of the quantum part.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    /// Block-diagonal density operator with the register as subsystem 0.
    pub fn to_density(&self) -> DensityOperator {
        let n = self.blocks.len();
        let rest: usize = self.dims.iter().product();
        let mut m = CMatrix::zeros(n * rest, n * rest);
        for (x, b) in self.blocks.iter().enumerate() {
            for i in 0..rest {
                for j in 0..rest {
                    m[(x * rest + i, x * rest + j)] = b[(i, j)];
                }
            }
        }
        let mut dims = alloc::vec![n];
        dims.extend_from_slice(&self.dims);
        let mut labels = alloc::vec![self.register.clone()];
        labels.extend(self.labels.iter().cloned());
        DensityOperator::from_parts_unchecked(m, dims, labels)
    }
}

/// Measures subsystem `measured` of `rho` with `pvm`, recording the outcome in a
/// register named `register`: block `x` is `Tr_measured{(P^x ⊗ I) rho}`.
pub fn measure(
    rho: &DensityOperator,
    pvm: &Pvm,
    measured: &str,
    register: &str,
) -> Result<CqState> {
    let k = rho.index_of(measured)?;
    if pvm.dim() != rho.dims[k] {
        return Err(Error::DimensionMismatch {
            context: "measurement on subsystem",
            expected: rho.dims[k],
            found: pvm.dim(),
        });
    }
    let keep: Vec<usize> = (0..rho.dims.len()).filter(|&i| i != k).collect();
    let blocks = pvm
        .projectors()
        .iter()
        .map(|p| {
            let lifted = embed(p, &rho.dims, k);
            partial_trace(&lifted.matmul(&rho.matrix), &rho.dims, &keep).map(|b| b.hermitian_part())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CqState {
        register: register.to_owned(),
        blocks,
        dims: keep.iter().map(|&i| rho.dims[i]).collect(),
        labels: keep.iter().map(|&i| rho.labels[i].clone()).collect(),
    })
}

/// Measures and forgets the outcome: `sum_z (Q^z ⊗ I) rho (Q^z ⊗ I)`.
pub fn pinch(rho: &DensityOperator, pvm: &Pvm, measured: &str) -> Result<DensityOperator> {
    let k = rho.index_of(measured)?;
    if pvm.dim() != rho.dims[k] {
        return Err(Error::DimensionMismatch {
            context: "pinching on subsystem",
            expected: rho.dims[k],
            found: pvm.dim(),
        });
    }
    let n = rho.dim();
    let mut out = CMatrix::zeros(n, n);
    for q in pvm.projectors() {
        out = &out + &embed(q, &rho.dims, k).sandwich(&rho.matrix);
    }
    Ok(DensityOperator::from_parts_unchecked(
        out.hermitian_part(),
        rho.dims.clone(),
        rho.labels.clone(),
    ))
}

/// The X-register state after a rank-one `z_pvm` measurement on subsystem 0 (outcome
/// discarded) followed by `x_pvm`: blocks `theta^x = sum_z <z|P^x|z> omega^z`.
pub fn theta_state(rho: &DensityOperator, x_pvm: &Pvm, z_pvm: &Pvm) -> Result<CqState> {
    if !z_pvm.is_rank_one() {
        return Err(Error::NotRankOne);
    }
    let a = rho.labels[0].clone();
    let pinched = pinch(rho, z_pvm, &a)?;
    measure(&pinched, x_pvm, &a, "X")
}

/// `max_{x,z} ||P^x Q^z||_inf^2`
pub fn incompatibility_c(x_pvm: &Pvm, z_pvm: &Pvm) -> Result<f64> {
    if x_pvm.dim() != z_pvm.dim() {
        return Err(Error::DimensionMismatch {
            context: "incompatibility",
            expected: x_pvm.dim(),
            found: z_pvm.dim(),
        });
    }
    let mut c: f64 = 0.0;
    for p in x_pvm.projectors() {
        for q in z_pvm.projectors() {
            let n = op_norm(&p.matmul(q));
            c = c.max(n * n);
        }
    }
    Ok(c.min(1.0))
}

/// Stinespring isometry `U = sum_x |x>_X ⊗ |x>_X' ⊗ P^x`, mapping `A` into `X X' A`.
pub fn isometric_extension(pvm: &Pvm) -> CMatrix {
    let n = pvm.outcomes();
    let d = pvm.dim();
    let mut u = CMatrix::zeros(n * n * d, d);
    for (x, p) in pvm.projectors().iter().enumerate() {
        let base = (x * n + x) * d;
        for a in 0..d {
            for b in 0..d {
                u[(base + a, b)] = p[(a, b)];
            }
        }
    }
    u
}

/// Purification on `dims ++ [rank]` whose extra subsystem is labelled `purifier`.
pub fn purify_as(rho: &DensityOperator, purifier: &str) -> Result<DensityOperator> {
    let eig = eigh(rho.matrix())?;
    let cut = eig.support_cutoff();
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&i| eig.values[i] > cut)
        .collect();
    let r = kept.len();
    let d = rho.dim();
    let mass: f64 = kept.iter().map(|&i| eig.values[i]).sum();
    let mut psi = alloc::vec![c64(0.0, 0.0); d * r];
    for (slot, &i) in kept.iter().enumerate() {
        let amp = libm::sqrt(eig.values[i] / mass);
        for a in 0..d {
            psi[a * r + slot] = eig.vectors[(a, i)] * amp;
        }
    }
    let mut dims = rho.dims.clone();
    dims.push(r);
    let mut labels = rho.labels.clone();
    labels.push(purifier.to_owned());
    Ok(DensityOperator::from_parts_unchecked(
        CMatrix::projector(&psi),
        dims,
        labels,
    ))
}

/// Purification with the purifying subsystem labelled `"R"`.
pub fn purify(rho: &DensityOperator) -> Result<DensityOperator> {
    purify_as(rho, "R")
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Induced-measure random state: partial trace of a Gaussian pure state on `dim x rank`.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    random_state_on(&[dim], &["A"], rank, seed)
}

/// [`random_state`] on a labelled composite system.
pub fn random_state_on(
    dims: &[usize],
    labels: &[&str],
    rank: usize,
    seed: u64,
) -> Result<DensityOperator> {
    let dim: usize = dims.iter().product();
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { rank, dim });
    }
    let mut rng = seeded_rng(seed);
    random_state_with(&mut rng, dims, labels, rank)
}

pub(crate) fn random_state_with(
    rng: &mut ChaCha8Rng,
    dims: &[usize],
    labels: &[&str],
    rank: usize,
) -> Result<DensityOperator> {
    let dim: usize = dims.iter().product();
    let g = gaussian_matrix(rng, dim, rank);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    check_layout(&m, dims, labels)?;
    Ok(DensityOperator::from_parts_unchecked(
        m.scale_re(1.0 / tr).hermitian_part(),
        dims.to_vec(),
        labels.iter().map(|&l| l.to_owned()).collect(),
    ))
}

/// Rank-one measurement in a Haar-random basis (Gram-Schmidt on a Gaussian matrix).
pub fn random_pvm(dim: usize, seed: u64) -> Pvm {
    let mut rng = seeded_rng(seed);
    random_pvm_with(&mut rng, dim)
}

pub(crate) fn random_pvm_with(rng: &mut ChaCha8Rng, dim: usize) -> Pvm {
    let g = gaussian_matrix(rng, dim, dim);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // Two passes of modified Gram-Schmidt keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for u in &basis {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        basis.push(v.into_iter().map(|z| z / norm).collect());
    }
    Pvm {
        projectors: basis.iter().map(|v| CMatrix::projector(v)).collect(),
    }
}
