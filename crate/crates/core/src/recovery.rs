//! Completely positive maps and the recovery channels built from them.
//!
//! Choi convention: `J = sum_ij |i><j| ⊗ N(|i><j|)` with the input system first, so
//! `N(rho) = Tr_in{(rho^T ⊗ I) J}`.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qmat::{c64, eigh, eigh_psd, op_norm, power_from_eig, tensor, CMatrix, HermEig, C64};
use crate::qstate::{
    gaussian_matrix, measure, seeded_rng, theta_state, CqState, DensityOperator, Pvm,
};

/// Tolerance for the Choi positivity and Kraus consistency invariants.
pub const MAP_TOL: f64 = 1e-8;

/// Blocks whose trace is at or below this are treated as exactly zero.
const ZERO_BLOCK: f64 = 1e-14;

/// A completely positive map between finite-dimensional composite systems.
#[derive(Clone, Debug)]
pub struct CpMap {
    kraus: Option<Vec<CMatrix>>,
    choi: CMatrix,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
}

fn add_kraus_to_choi(choi: &mut CMatrix, k: &CMatrix, weight: f64) {
    let (dout, din) = (k.rows(), k.cols());
    for i in 0..din {
        for a in 0..dout {
            let left = k[(a, i)] * weight;
            if left.re == 0.0 && left.im == 0.0 {
                continue;
            }
            let row = i * dout + a;
            for j in 0..din {
                for b in 0..dout {
                    choi[(row, j * dout + b)] += left * k[(b, j)].conj();
                }
            }
        }
    }
}

/// Adds the Choi matrix of `xi -> Tr{(I - support) xi} state`.
fn add_completion(choi: &mut CMatrix, support: &CMatrix, state: &CMatrix) {
    let din = support.rows();
    let dout = state.rows();
    for i in 0..din {
        for j in 0..din {
            let delta = if i == j { 1.0 } else { 0.0 };
            // (I - P)^T at (i, j) is (I - P) at (j, i).
            let c = c64(delta, 0.0) - support[(j, i)];
            if c.norm() == 0.0 {
                continue;
            }
            for a in 0..dout {
                for b in 0..dout {
                    choi[(i * dout + a, j * dout + b)] += c * state[(a, b)];
                }
            }
        }
    }
}

impl CpMap {
    pub fn from_kraus(kraus: Vec<CMatrix>, in_dims: &[usize], out_dims: &[usize]) -> Result<Self> {
        let din: usize = in_dims.iter().product();
        let dout: usize = out_dims.iter().product();
        if kraus.is_empty() {
            return Err(Error::InvalidArgument(
                "a CP map needs at least one Kraus operator".into(),
            ));
        }
        for k in &kraus {
            if k.cols() != din {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator input",
                    expected: din,
                    found: k.cols(),
                });
            }
            if k.rows() != dout {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator output",
                    expected: dout,
                    found: k.rows(),
                });
            }
        }
        let mut choi = CMatrix::zeros(din * dout, din * dout);
        for k in &kraus {
            add_kraus_to_choi(&mut choi, k, 1.0);
        }
        Ok(Self {
            kraus: Some(kraus),
            choi,
            in_dims: in_dims.to_vec(),
            out_dims: out_dims.to_vec(),
        })
    }

    /// Validates that `choi` is PSD to [`MAP_TOL`].
    pub fn from_choi(choi: CMatrix, in_dims: &[usize], out_dims: &[usize]) -> Result<Self> {
        let din: usize = in_dims.iter().product();
        let dout: usize = out_dims.iter().product();
        if !choi.is_square() || choi.rows() != din * dout {
            return Err(Error::DimensionMismatch {
                context: "Choi matrix",
                expected: din * dout,
                found: choi.rows(),
            });
        }
        let eig = eigh(&choi)?;
        if eig.min_value() < -MAP_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.min_value(),
            });
        }
        Ok(Self {
            kraus: None,
            choi: choi.hermitian_part(),
            in_dims: in_dims.to_vec(),
            out_dims: out_dims.to_vec(),
        })
    }

    pub fn identity(dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        Self::from_kraus(vec![CMatrix::identity(d)], dims, dims).expect("identity is well formed")
    }

    /// Measurement channel `rho -> sum_x |x><x| Tr{P^x rho}` with Kraus operators
    /// `|x><j| P^x`.
    pub fn measurement(pvm: &Pvm) -> Self {
        let n = pvm.outcomes();
        let d = pvm.dim();
        let mut kraus = Vec::with_capacity(n * d);
        for (x, p) in pvm.projectors().iter().enumerate() {
            for j in 0..d {
                let k =
                    CMatrix::from_fn(n, d, |r, c| if r == x { p[(j, c)] } else { c64(0.0, 0.0) });
                kraus.push(k);
            }
        }
        Self::from_kraus(kraus, &[d], &[n]).expect("measurement Kraus operators are well formed")
    }

    /// `self ⊗ id` on extra trailing subsystems.
    pub fn tensor_identity(&self, dims: &[usize]) -> Self {
        let d: usize = dims.iter().product();
        let id = CMatrix::identity(d);
        let kraus = self
            .kraus_operators()
            .iter()
            .map(|k| tensor(k, &id))
            .collect();
        let mut in_dims = self.in_dims.clone();
        in_dims.extend_from_slice(dims);
        let mut out_dims = self.out_dims.clone();
        out_dims.extend_from_slice(dims);
        Self::from_kraus(kraus, &in_dims, &out_dims)
            .expect("tensor product keeps dimensions consistent")
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dim(&self) -> usize {
        self.in_dims.iter().product()
    }

    pub fn out_dim(&self) -> usize {
        self.out_dims.iter().product()
    }

    /// The stored Kraus operators, or a minimal set from the Choi spectrum.
    pub fn kraus_operators(&self) -> Vec<CMatrix> {
        if let Some(k) = &self.kraus {
            return k.clone();
        }
        let (din, dout) = (self.in_dim(), self.out_dim());
        let eig = match eigh(&self.choi) {
            Ok(e) => e,
            Err(_) => return Vec::new(),
        };
        let cut = eig.support_cutoff();
        eig.values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > cut)
            .map(|(k, &l)| {
                let s = libm::sqrt(l);
                CMatrix::from_fn(dout, din, |a, i| eig.vectors[(i * dout + a, k)] * s)
            })
            .collect()
    }

    pub fn has_kraus(&self) -> bool {
        self.kraus.is_some()
    }

    /// `N(rho)` for any square operator on the input space.
    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        let (din, dout) = (self.in_dim(), self.out_dim());
        if !rho.is_square() || rho.rows() != din {
            return Err(Error::DimensionMismatch {
                context: "map input",
                expected: din,
                found: rho.rows(),
            });
        }
        if let Some(kraus) = &self.kraus {
            let mut out = CMatrix::zeros(dout, dout);
            for k in kraus {
                out = &out + &k.sandwich(rho);
            }
            return Ok(out);
        }
        let mut out = CMatrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                let r = rho[(i, j)];
                if r.re == 0.0 && r.im == 0.0 {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        out[(a, b)] += r * self.choi[(i * dout + a, j * dout + b)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies the map to a state and labels the output subsystems.
    pub fn apply(&self, rho: &DensityOperator, out_labels: &[&str]) -> Result<DensityOperator> {
        if rho.dims() != self.in_dims.as_slice() {
            return Err(Error::DimensionMismatch {
                context: "map input subsystems",
                expected: self.in_dims.len(),
                found: rho.dims().len(),
            });
        }
        let out = self.apply_matrix(rho.matrix())?;
        DensityOperator::with_tolerance(out, &self.out_dims, out_labels, MAP_TOL)
    }

    /// Applies the map to the block-diagonal operator of a cq-state (register first).
    pub fn apply_cq(&self, cq: &CqState, out_labels: &[&str]) -> Result<DensityOperator> {
        self.apply(&cq.to_density(), out_labels)
    }

    /// Heisenberg-picture map `Y -> sum_k K_k^dagger Y K_k`.
    pub fn adjoint_apply(&self, y: &CMatrix) -> Result<CMatrix> {
        let (din, dout) = (self.in_dim(), self.out_dim());
        if !y.is_square() || y.rows() != dout {
            return Err(Error::DimensionMismatch {
                context: "adjoint map input",
                expected: dout,
                found: y.rows(),
            });
        }
        let mut out = CMatrix::zeros(din, din);
        for k in self.kraus_operators() {
            out = &out + &k.adjoint().matmul(y).matmul(&k);
        }
        Ok(out)
    }
}

/// Operator-norm distance between the Choi matrices of two maps.
pub fn choi_distance(a: &CpMap, b: &CpMap) -> Result<f64> {
    if a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim() {
        return Err(Error::DimensionMismatch {
            context: "Choi comparison",
            expected: a.choi.rows(),
            found: b.choi.rows(),
        });
    }
    Ok(op_norm(&(&a.choi - &b.choi)))
}

/// Random CPTP map with `kraus_count` Kraus operators, from a Gaussian isometry.
pub fn random_channel(din: usize, dout: usize, kraus_count: usize, seed: u64) -> Result<CpMap> {
    if din == 0 || dout == 0 || kraus_count == 0 || dout * kraus_count < din {
        return Err(Error::InvalidArgument(
            "random channel needs dout * kraus_count >= din > 0".into(),
        ));
    }
    let mut rng = seeded_rng(seed);
    let g = gaussian_matrix(&mut rng, dout * kraus_count, din);
    // Gram-Schmidt on the columns turns g into an isometry.
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(din);
    for j in 0..din {
        let mut v = g.column(j);
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let kraus = (0..kraus_count)
        .map(|k| CMatrix::from_fn(dout, din, |a, i| cols[i][k * dout + a]))
        .collect();
    CpMap::from_kraus(kraus, &[din], &[dout])
}

/// `p(t) = (pi/2) / (cosh(pi t) + 1)`, the density averaging the rotated Petz map.
pub fn time_density(t: f64) -> f64 {
    0.5 * PI / (libm::cosh(PI * t) + 1.0)
}

/// Integration rule against `p(t)`: nodes `t_i` and weights that already include `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    strict: bool,
}

/// Allowed deviation of the total weight from one.
pub const QUADRATURE_TOL: f64 = 1e-10;

fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order {
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

impl Quadrature {
    /// Composite Gauss-Legendre on `[-t_max, t_max]`, checked for normalization.
    pub fn composite(t_max: f64, panels: usize, order: usize) -> Result<Self> {
        if t_max.is_nan() || t_max <= 0.0 || panels == 0 || order == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs t_max > 0, panels and order >= 1".into(),
            ));
        }
        let (gx, gw) = gauss_legendre(order);
        let h = 2.0 * t_max / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let mid = -t_max + (p as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                let t = mid + 0.5 * h * x;
                nodes.push(t);
                weights.push(0.5 * h * w * time_density(t));
            }
        }
        let q = Self {
            nodes,
            weights,
            strict: true,
        };
        q.validate()?;
        Ok(q)
    }

    /// Nodes and folded weights taken as given, without the normalization check.
    pub fn from_raw(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::InvalidArgument(
                "quadrature needs matching, non-empty nodes and weights".into(),
            ));
        }
        if weights
            .iter()
            .any(|&w| w.is_nan() || w <= 0.0 || w.is_infinite())
            || nodes.iter().any(|t| !t.is_finite())
        {
            return Err(Error::InvalidArgument(
                "quadrature weights must be positive and finite".into(),
            ));
        }
        Ok(Self {
            nodes,
            weights,
            strict: false,
        })
    }

    /// `p(t_i)` as weights for the given nodes: a crude rule for testing the guards.
    pub fn truncated(nodes: &[f64]) -> Result<Self> {
        Self::from_raw(
            nodes.to_vec(),
            nodes.iter().map(|&t| time_density(t)).collect(),
        )
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn normalization_error(&self) -> f64 {
        (self.weights.iter().sum::<f64>() - 1.0).abs()
    }

    pub fn validate(&self) -> Result<()> {
        let error = self.normalization_error();
        if error > QUADRATURE_TOL {
            return Err(Error::QuadratureNotNormalized { error });
        }
        Ok(())
    }

    fn check_if_strict(&self) -> Result<()> {
        if self.strict {
            self.validate()
        } else {
            Ok(())
        }
    }

    fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

impl Default for Quadrature {
    /// 64 panels of 8-point Gauss-Legendre on `[-12, 12]`.
    fn default() -> Self {
        Self::composite(12.0, 64, 8).expect("default rule is normalized")
    }
}

fn check_sigma(sigma: &CMatrix, channel: &CpMap) -> Result<HermEig> {
    if !sigma.is_square() || sigma.rows() != channel.in_dim() {
        return Err(Error::DimensionMismatch {
            context: "recovery reference state",
            expected: channel.in_dim(),
            found: sigma.rows(),
        });
    }
    eigh_psd(sigma)
}

fn normalized(m: &CMatrix) -> CMatrix {
    let tr = m.trace().re;
    if tr > 0.0 {
        m.scale_re(1.0 / tr)
    } else {
        m.clone()
    }
}

/// Petz recovery channel `sigma^{1/2} N^dagger(N(sigma)^{-1/2} . N(sigma)^{-1/2}) sigma^{1/2}`,
/// completed outside `supp N(sigma)` by preparing `sigma / Tr sigma`.
pub fn petz_map(sigma: &CMatrix, channel: &CpMap) -> Result<CpMap> {
    let quad = Quadrature {
        nodes: vec![0.0],
        weights: vec![1.0],
        strict: true,
    };
    rotated_petz_map(sigma, channel, &quad)
}

/// Rotated Petz recovery channel, the `p(t)`-average of
/// `sigma^{-it/2} R_petz(N(sigma)^{it/2} . N(sigma)^{-it/2}) sigma^{it/2}`.
///
/// At node `t` the Kraus operators are `sigma^{(1-it)/2} A_k^dagger N(sigma)^{(-1+it)/2}`.
pub fn rotated_petz_map(sigma: &CMatrix, channel: &CpMap, quad: &Quadrature) -> Result<CpMap> {
    quad.check_if_strict()?;
    let sig_eig = check_sigma(sigma, channel)?;
    let n_sigma = channel.apply_matrix(sigma)?.hermitian_part();
    let n_eig = eigh_psd(&n_sigma)?;
    let kraus = channel.kraus_operators();
    let (din, dout) = (channel.in_dim(), channel.out_dim());
    // The recovery runs backwards: input is the channel output.
    let mut choi = CMatrix::zeros(din * dout, din * dout);
    for (t, w) in quad.iter() {
        let left = power_from_eig(&sig_eig, c64(0.5, -0.5 * t));
        let right = power_from_eig(&n_eig, c64(-0.5, 0.5 * t));
        for a in &kraus {
            let k = left.matmul(&a.adjoint()).matmul(&right);
            add_kraus_to_choi(&mut choi, &k, w);
        }
    }
    add_completion(&mut choi, &n_eig.support_projector(), &normalized(sigma));
    Ok(CpMap {
        kraus: None,
        choi: choi.hermitian_part(),
        in_dims: channel.out_dims.clone(),
        out_dims: channel.in_dims.clone(),
    })
}

/// Orthonormal vectors spanning the range of a projector.
fn projector_frame(p: &CMatrix) -> Result<Vec<Vec<C64>>> {
    let eig = eigh(p)?;
    Ok((0..eig.values.len())
        .filter(|&k| eig.values[k] > 0.5)
        .map(|k| eig.vectors.column(k))
        .collect())
}

fn block_eig(m: &CMatrix) -> Result<Option<HermEig>> {
    if m.trace().re <= ZERO_BLOCK {
        return Ok(None);
    }
    eigh_psd(m).map(Some)
}

/// The explicit recovery map `XB -> AB` for a rank-one `Z` measurement:
///
/// `R(xi) = sum_{z,x,z'} |z><z|P^x|z'><z'| ⊗ ∫dt p(t) W_{z,x}(t) xi^x W_{z',x}(t)^dagger`
///
/// with `W_{z,x}(t) = (omega^z)^{(1-it)/2} (theta^x)^{(-1+it)/2}` and `xi^x = <x|xi|x>`.
/// Inputs outside `supp theta_XB` are sent to `sum_z |z><z| ⊗ omega^z`.
#[derive(Clone, Debug)]
pub struct EurRecovery {
    z_basis: Vec<Vec<C64>>,
    x_projectors: Vec<CMatrix>,
    x_frames: Vec<Vec<Vec<C64>>>,
    omega: Vec<Option<HermEig>>,
    theta: Vec<Option<HermEig>>,
    completion: CMatrix,
    quad: Quadrature,
    d_a: usize,
    d_b: usize,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl EurRecovery {
    /// `rho_ab` has the measured system `A` as subsystem 0; everything else is `B`.
    pub fn new(
        rho_ab: &DensityOperator,
        x_pvm: &Pvm,
        z_pvm: &Pvm,
        quad: &Quadrature,
    ) -> Result<Self> {
        quad.check_if_strict()?;
        let z_basis = z_pvm.basis_vectors()?;
        if rho_ab.dims().len() < 2 {
            return Err(Error::InvalidArgument(
                "recovery needs a bipartite state".into(),
            ));
        }
        let d_a = rho_ab.dims()[0];
        if x_pvm.dim() != d_a || z_pvm.dim() != d_a {
            return Err(Error::DimensionMismatch {
                context: "measurement on A",
                expected: d_a,
                found: if x_pvm.dim() != d_a {
                    x_pvm.dim()
                } else {
                    z_pvm.dim()
                },
            });
        }
        let d_b = rho_ab.dim() / d_a;
        let a_label: String = rho_ab.labels().next().unwrap_or("A").to_owned();
        let omega_cq = measure(rho_ab, z_pvm, &a_label, "Z")?;
        let theta_cq = theta_state(rho_ab, x_pvm, z_pvm)?;
        let omega = omega_cq
            .blocks()
            .iter()
            .map(block_eig)
            .collect::<Result<Vec<_>>>()?;
        let theta = theta_cq
            .blocks()
            .iter()
            .map(block_eig)
            .collect::<Result<Vec<_>>>()?;
        let x_frames = x_pvm
            .projectors()
            .iter()
            .map(projector_frame)
            .collect::<Result<Vec<_>>>()?;
        let mut completion = CMatrix::zeros(d_a * d_b, d_a * d_b);
        for (z, block) in omega_cq.blocks().iter().enumerate() {
            completion = &completion + &tensor(&CMatrix::projector(&z_basis[z]), block);
        }
        Ok(Self {
            z_basis,
            x_projectors: x_pvm.projectors().to_vec(),
            x_frames,
            omega,
            theta,
            completion: normalized(&completion.hermitian_part()),
            quad: quad.clone(),
            d_a,
            d_b,
            dims: rho_ab.dims().to_vec(),
            labels: rho_ab.labels().map(|l| l.to_owned()).collect(),
        })
    }

    pub fn outcomes(&self) -> usize {
        self.x_projectors.len()
    }

    /// Input subsystem dimensions: the X register followed by B.
    pub fn in_dims(&self) -> Vec<usize> {
        let mut d = vec![self.outcomes()];
        d.extend_from_slice(&self.dims[1..]);
        d
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.dims
    }

    /// Projector onto `supp theta_XB`, block diagonal in the register.
    pub fn support_projector(&self) -> CMatrix {
        let n = self.outcomes();
        let mut p = CMatrix::zeros(n * self.d_b, n * self.d_b);
        for (x, th) in self.theta.iter().enumerate() {
            if let Some(eig) = th {
                let s = eig.support_projector();
                for i in 0..self.d_b {
                    for j in 0..self.d_b {
                        p[(x * self.d_b + i, x * self.d_b + j)] = s[(i, j)];
                    }
                }
            }
        }
        p
    }

    fn w(&self, z: usize, x: usize, t: f64) -> Option<CMatrix> {
        let om = self.omega[z].as_ref()?;
        let th = self.theta[x].as_ref()?;
        Some(power_from_eig(om, c64(0.5, -0.5 * t)).matmul(&power_from_eig(th, c64(-0.5, 0.5 * t))))
    }

    /// The map on register-diagonal input blocks `xi^x` (need not be normalized).
    pub fn apply_blocks(&self, blocks: &[CMatrix]) -> Result<CMatrix> {
        let n = self.outcomes();
        if blocks.len() != n {
            return Err(Error::DimensionMismatch {
                context: "recovery input register",
                expected: n,
                found: blocks.len(),
            });
        }
        for b in blocks {
            if !b.is_square() || b.rows() != self.d_b {
                return Err(Error::DimensionMismatch {
                    context: "recovery input block",
                    expected: self.d_b,
                    found: b.rows(),
                });
            }
        }
        let (d_a, d_b) = (self.d_a, self.d_b);
        let mut out = CMatrix::zeros(d_a * d_b, d_a * d_b);
        let mut leaked = 0.0;
        for x in 0..n {
            let Some(th) = &self.theta[x] else {
                leaked += blocks[x].trace().re;
                continue;
            };
            let support = th.support_projector();
            leaked += blocks[x].trace().re - support.trace_of_product(&blocks[x]).re;
            // coeff[z][z'] = <z|P^x|z'>
            let px = &self.x_projectors[x];
            let coeff: Vec<Vec<C64>> = (0..d_a)
                .map(|z| {
                    let pz = px.matmul(&CMatrix::ket(&self.z_basis[z]));
                    (0..d_a)
                        .map(|zp| {
                            let bra = CMatrix::bra(&self.z_basis[zp]);
                            // <z|P^x|z'> = conj(<z'|P^x|z>)
                            bra.matmul(&pz)[(0, 0)].conj()
                        })
                        .collect()
                })
                .collect();
            let mut acc: Vec<Vec<CMatrix>> = vec![vec![CMatrix::zeros(d_b, d_b); d_a]; d_a];
            for (t, wt) in self.quad.iter() {
                let ws: Vec<Option<CMatrix>> = (0..d_a).map(|z| self.w(z, x, t)).collect();
                let left: Vec<Option<CMatrix>> = ws
                    .iter()
                    .map(|w| w.as_ref().map(|w| w.matmul(&blocks[x])))
                    .collect();
                for z in 0..d_a {
                    let Some(lz) = &left[z] else { continue };
                    for zp in 0..d_a {
                        if coeff[z][zp].norm() == 0.0 {
                            continue;
                        }
                        let Some(wzp) = &ws[zp] else { continue };
                        let term = lz.matmul(&wzp.adjoint()).scale_re(wt);
                        acc[z][zp] = &acc[z][zp] + &term;
                    }
                }
            }
            for z in 0..d_a {
                for zp in 0..d_a {
                    if coeff[z][zp].norm() == 0.0 {
                        continue;
                    }
                    let basis =
                        CMatrix::outer(&self.z_basis[z], &self.z_basis[zp]).scale(coeff[z][zp]);
                    out = &out + &tensor(&basis, &acc[z][zp]);
                }
            }
        }
        if leaked.abs() > 0.0 {
            out = &out + &self.completion.scale_re(leaked);
        }
        Ok(out.hermitian_part())
    }

    /// `R(cq)`, labelled like the state the map was built from.
    pub fn apply(&self, cq: &CqState) -> Result<DensityOperator> {
        let out = self.apply_blocks(cq.blocks())?;
        let labels: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        DensityOperator::with_tolerance(out, &self.dims, &labels, MAP_TOL)
    }

    /// The same map as a [`CpMap`] on `X ⊗ B`, register first.
    pub fn to_cp_map(&self) -> Result<CpMap> {
        let n = self.outcomes();
        let (d_a, d_b) = (self.d_a, self.d_b);
        let din = n * d_b;
        let dout = d_a * d_b;
        let mut choi = CMatrix::zeros(din * dout, din * dout);
        for (t, wt) in self.quad.iter() {
            for x in 0..n {
                if self.theta[x].is_none() {
                    continue;
                }
                let ws: Vec<Option<CMatrix>> = (0..d_a).map(|z| self.w(z, x, t)).collect();
                for pk in &self.x_frames[x] {
                    let mut k = CMatrix::zeros(dout, din);
                    for z in 0..d_a {
                        let Some(w) = &ws[z] else { continue };
                        let amp: C64 = self.z_basis[z]
                            .iter()
                            .zip(pk)
                            .map(|(a, b)| a.conj() * b)
                            .sum();
                        if amp.norm() == 0.0 {
                            continue;
                        }
                        for (a, &za) in self.z_basis[z].iter().enumerate() {
                            let c = amp * za;
                            for i in 0..d_b {
                                for j in 0..d_b {
                                    k[(a * d_b + i, x * d_b + j)] += c * w[(i, j)];
                                }
                            }
                        }
                    }
                    add_kraus_to_choi(&mut choi, &k, wt);
                }
            }
        }
        add_completion(&mut choi, &self.support_projector(), &self.completion);
        Ok(CpMap {
            kraus: None,
            choi: choi.hermitian_part(),
            in_dims: self.in_dims(),
            out_dims: self.dims.clone(),
        })
    }
}

/// The explicit recovery map as a [`CpMap`] from `X ⊗ B` to `A ⊗ B`.
pub fn eur_recovery_map(
    rho_ab: &DensityOperator,
    x_pvm: &Pvm,
    z_pvm: &Pvm,
    quad: &Quadrature,
) -> Result<CpMap> {
    EurRecovery::new(rho_ab, x_pvm, z_pvm, quad)?.to_cp_map()
}

/// Outcome of [`verify_cptp`]. Residuals are operator norms.
#[derive(Clone, Debug, PartialEq)]
pub struct CptpReport {
    pub choi_min_eigenvalue: f64,
    /// Distance between the stored Choi matrix and the one rebuilt from Kraus operators.
    pub kraus_residual: Option<f64>,
    /// `|| P (Tr_out J)^T P - P ||` for the declared support projector `P`.
    pub tp_residual: f64,
    pub tolerance: f64,
    pub completely_positive: bool,
    pub trace_preserving: bool,
    pub kraus_consistent: bool,
}

impl CptpReport {
    pub fn pass(&self) -> bool {
        self.completely_positive && self.trace_preserving && self.kraus_consistent
    }
}

/// Checks complete positivity and trace preservation on `support` (the whole input
/// space when `None`).
pub fn verify_cptp(map: &CpMap, support: Option<&CMatrix>, tol: f64) -> Result<CptpReport> {
    let (din, dout) = (map.in_dim(), map.out_dim());
    let projector = match support {
        Some(p) => {
            if p.rows() != din || !p.is_square() {
                return Err(Error::DimensionMismatch {
                    context: "support projector",
                    expected: din,
                    found: p.rows(),
                });
            }
            p.clone()
        }
        None => CMatrix::identity(din),
    };
    let choi_min_eigenvalue = eigh(&map.choi)?.min_value();
    let kraus_residual = map.kraus.as_ref().map(|kraus| {
        let mut rebuilt = CMatrix::zeros(din * dout, din * dout);
        for k in kraus {
            add_kraus_to_choi(&mut rebuilt, k, 1.0);
        }
        op_norm(&(&rebuilt - &map.choi))
    });
    let mut reduced = CMatrix::zeros(din, din);
    for i in 0..din {
        for j in 0..din {
            let mut s = c64(0.0, 0.0);
            for a in 0..dout {
                s += map.choi[(i * dout + a, j * dout + a)];
            }
            // transpose on the way in
            reduced[(j, i)] = s;
        }
    }
    let tp = &projector.matmul(&reduced).matmul(&projector) - &projector;
    let tp_residual = op_norm(&tp);
    Ok(CptpReport {
        choi_min_eigenvalue,
        kraus_residual,
        tp_residual,
        tolerance: tol,
        completely_positive: choi_min_eigenvalue >= -tol,
        trace_preserving: tp_residual <= tol,
        kraus_consistent: kraus_residual.is_none_or(|r| r <= tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::relative_psd;
    use crate::qmat::{fidelity, mat_power_on_support, trace_distance};
    use crate::qstate::{pinch, random_pvm, random_state_on};
    use crate::testutil::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn ket(re: &[f64]) -> Vec<C64> {
        re.iter().map(|&r| c64(r, 0.0)).collect()
    }

    fn plus() -> Vec<C64> {
        ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
    }

    fn pi(d: usize) -> CMatrix {
        CMatrix::identity(d).scale_re(1.0 / d as f64)
    }

    fn product_with_pi(a: &[C64]) -> DensityOperator {
        DensityOperator::pure(a, &[2], &["A"])
            .unwrap()
            .tensor(&DensityOperator::maximally_mixed(2, "B"))
    }

    fn bell() -> DensityOperator {
        let s = FRAC_1_SQRT_2;
        DensityOperator::pure(&ket(&[s, 0.0, 0.0, s]), &[2, 2], &["A", "B"]).unwrap()
    }

    fn plus_y() -> Vec<C64> {
        let s = FRAC_1_SQRT_2;
        vec![c64(s, 0.0), c64(0.0, s)]
    }

    fn cq(blocks: Vec<CMatrix>) -> CqState {
        let d = blocks[0].rows();
        CqState::new("X", blocks, &[d], &["B"]).unwrap()
    }

    fn generic_for(rho_ab: &DensityOperator, x: &Pvm, z: &Pvm, quad: &Quadrature) -> CpMap {
        let b_dims = &rho_ab.dims()[1..];
        let channel = CpMap::measurement(x).tensor_identity(b_dims);
        let a = rho_ab.labels().next().unwrap().to_owned();
        let pinched = pinch(rho_ab, z, &a).unwrap();
        rotated_petz_map(pinched.matrix(), &channel, quad).unwrap()
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        for order in 1..=10 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                let got: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(xi, wi)| wi * libm::pow(*xi, deg as f64))
                    .sum();
                assert!((got - exact).abs() < 1e-13, "order {order} degree {deg}");
            }
        }
    }

    #[test]
    fn default_quadrature_normalizes_the_time_density() {
        let q = Quadrature::default();
        assert_eq!(q.nodes().len(), 512);
        assert!(q.normalization_error() < 1e-12);
        assert!(q.weights().iter().all(|&w| w > 0.0));
        // The density is symmetric with mean zero.
        let mean: f64 = q.nodes().iter().zip(q.weights()).map(|(t, w)| t * w).sum();
        assert!(mean.abs() < 1e-14);
        // Second moment of p(t) is 1/3.
        let m2: f64 = q
            .nodes()
            .iter()
            .zip(q.weights())
            .map(|(t, w)| t * t * w)
            .sum();
        assert!((m2 - 1.0 / 3.0).abs() < 1e-10, "{m2}");
    }

    #[test]
    fn coarse_quadrature_is_rejected_when_strict() {
        assert!(matches!(
            Quadrature::composite(1.0, 1, 2),
            Err(Error::QuadratureNotNormalized { .. })
        ));
        let raw = Quadrature::truncated(&[-1.0, 0.0, 1.0]).unwrap();
        assert!(!raw.is_strict());
        assert!(raw.normalization_error() > 1e-3);
        assert!(Quadrature::from_raw(vec![0.0], vec![-1.0]).is_err());
    }

    #[test]
    fn kraus_and_choi_views_agree() {
        let mut r = rng(3);
        for seed in 0..10 {
            let map = random_channel(2, 3, 2, seed).unwrap();
            let from_choi = CpMap::from_choi(map.choi().clone(), &[2], &[3]).unwrap();
            let rho = random_density(&mut r, 2);
            assert_close(
                &map.apply_matrix(&rho).unwrap(),
                &from_choi.apply_matrix(&rho).unwrap(),
                1e-12,
            );
            let rebuilt = CpMap::from_kraus(from_choi.kraus_operators(), &[2], &[3]).unwrap();
            assert!(choi_distance(&rebuilt, &map).unwrap() < 1e-10);
            let rep = verify_cptp(&map, None, 1e-10).unwrap();
            assert!(rep.pass(), "{rep:?}");
        }
    }

    #[test]
    fn adjoint_is_hilbert_schmidt_dual() {
        let mut r = rng(4);
        let map = random_channel(3, 2, 3, 17).unwrap();
        let rho = random_density(&mut r, 3);
        let y = random_hermitian(&mut r, 2);
        let lhs = map.apply_matrix(&rho).unwrap().trace_of_product(&y);
        let rhs = rho.trace_of_product(&map.adjoint_apply(&y).unwrap());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn from_choi_rejects_non_positive() {
        let mut j = CMatrix::identity(4);
        j[(0, 0)] = c64(-1.0, 0.0);
        assert!(matches!(
            CpMap::from_choi(j, &[2], &[2]),
            Err(Error::NotPositive { .. })
        ));
        assert!(CpMap::from_choi(CMatrix::identity(3), &[2], &[2]).is_err());
    }

    #[test]
    fn identity_map_is_identity() {
        let mut r = rng(5);
        let id = CpMap::identity(&[2, 2]);
        let rho = random_density(&mut r, 4);
        assert_close(&id.apply_matrix(&rho).unwrap(), &rho, 0.0);
        let rep = verify_cptp(&id, None, 1e-12).unwrap();
        assert!(rep.pass());
        assert!(rep.tp_residual <= 1e-12 && rep.kraus_residual.unwrap() <= 1e-12);
    }

    #[test]
    fn petz_of_identity_is_identity_on_support() {
        let mut r = rng(6);
        for rank in 1..=3 {
            let sigma = random_density_rank(&mut r, 3, rank);
            let petz = petz_map(&sigma, &CpMap::identity(&[3])).unwrap();
            let support = eigh(&sigma).unwrap().support_projector();
            let xi = support.sandwich(&random_density(&mut r, 3));
            assert_close(&petz.apply_matrix(&xi).unwrap(), &xi, 1e-10);
        }
    }

    #[test]
    fn petz_fixed_point_for_dephasing_in_eigenbasis() {
        let sigma = pi(2);
        let n = CpMap::measurement(&Pvm::pauli_z());
        let petz = petz_map(&sigma, &n).unwrap();
        assert_close(
            &petz.apply_matrix(&n.apply_matrix(&sigma).unwrap()).unwrap(),
            &sigma,
            1e-12,
        );
    }

    #[test]
    fn petz_matches_dense_formula_for_x_measurement() {
        let mut r = rng(7);
        let x = Pvm::pauli_x();
        let n = CpMap::measurement(&x);
        for _ in 0..20 {
            let sigma = random_density(&mut r, 2);
            let rho = random_density(&mut r, 2);
            let petz = petz_map(&sigma, &n).unwrap();
            // Independent evaluation with N(k) = sum_x <x|P^x k|x>-style diagonal and
            // N^dagger(k) = sum_x <x|k|x> P^x.
            let n_sigma = CMatrix::from_real_diag(&[
                x.projectors()[0].trace_of_product(&sigma).re,
                x.projectors()[1].trace_of_product(&sigma).re,
            ]);
            let n_rho = CMatrix::from_real_diag(&[
                x.projectors()[0].trace_of_product(&rho).re,
                x.projectors()[1].trace_of_product(&rho).re,
            ]);
            let inv_half = mat_power_on_support(&n_sigma, c64(-0.5, 0.0)).unwrap();
            let kappa = inv_half.matmul(&n_rho).matmul(&inv_half);
            let mut adj = CMatrix::zeros(2, 2);
            for (k, p) in x.projectors().iter().enumerate() {
                adj = &adj + &p.scale(kappa[(k, k)]);
            }
            let half = mat_power_on_support(&sigma, c64(0.5, 0.0)).unwrap();
            let expected = half.matmul(&adj).matmul(&half);
            assert_close(&petz.apply_matrix(&n_rho).unwrap(), &expected, 1e-10);
            assert_close(&petz.apply_matrix(&n_sigma).unwrap(), &sigma, 1e-10);
        }
    }

    #[test]
    fn rotated_petz_equals_petz_when_everything_commutes() {
        let sigma = CMatrix::from_real_diag(&[0.6, 0.3, 0.1]);
        let n = CpMap::measurement(&Pvm::computational(3));
        let plain = petz_map(&sigma, &n).unwrap();
        let rotated = rotated_petz_map(&sigma, &n, &Quadrature::default()).unwrap();
        assert!(choi_distance(&plain, &rotated).unwrap() < 1e-9);
    }

    #[test]
    fn rotated_petz_recovers_reference_state() {
        let mut r = rng(8);
        let n = CpMap::measurement(&Pvm::pauli_x());
        let quad = Quadrature::default();
        for _ in 0..20 {
            let sigma = random_density(&mut r, 2);
            let rec = rotated_petz_map(&sigma, &n, &quad).unwrap();
            let back = rec.apply_matrix(&n.apply_matrix(&sigma).unwrap()).unwrap();
            assert_close(&back, &sigma, 1e-8);
            assert!(verify_cptp(&rec, None, 1e-8).unwrap().pass());
        }
    }

    #[test]
    fn rotated_petz_on_max_uncertainty_state_gives_one_bit() {
        let rho = product_with_pi(&plus_y());
        let quad = Quadrature::default();
        let rec = generic_for(&rho, &Pvm::pauli_x(), &Pvm::pauli_z(), &quad);
        let channel = CpMap::measurement(&Pvm::pauli_x()).tensor_identity(&[2]);
        let sigma_xb = channel.apply_matrix(rho.matrix()).unwrap();
        let out = rec.apply_matrix(&sigma_xb).unwrap();
        let f = fidelity(rho.matrix(), &out).unwrap();
        assert!((-libm::log2(f) - 1.0).abs() < 1e-6, "{f}");
    }

    #[test]
    fn explicit_map_reproduces_worked_recoveries() {
        let quad = Quadrature::default();
        let (x, z) = (Pvm::pauli_x(), Pvm::pauli_z());

        let r1 = EurRecovery::new(&product_with_pi(&plus()), &x, &z, &quad).unwrap();
        let out = r1.apply(&cq(vec![pi(2), CMatrix::zeros(2, 2)])).unwrap();
        assert_close(
            out.matrix(),
            &tensor(&CMatrix::projector(&plus()), &pi(2)),
            1e-9,
        );
        let out = r1
            .apply(&cq(vec![pi(2).scale_re(0.5), pi(2).scale_re(0.5)]))
            .unwrap();
        assert_close(out.matrix(), &pi(4), 1e-9);

        let zero = ket(&[1.0, 0.0]);
        let r2 = EurRecovery::new(&product_with_pi(&zero), &x, &z, &quad).unwrap();
        let out = r2
            .apply(&cq(vec![pi(2).scale_re(0.5), pi(2).scale_re(0.5)]))
            .unwrap();
        assert_close(
            out.matrix(),
            &tensor(&CMatrix::projector(&zero), &pi(2)),
            1e-9,
        );

        let r3 = EurRecovery::new(&bell(), &x, &z, &quad).unwrap();
        let minus = ket(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        let input = cq(vec![
            CMatrix::projector(&plus()).scale_re(0.5),
            CMatrix::projector(&minus).scale_re(0.5),
        ]);
        assert_close(r3.apply(&input).unwrap().matrix(), bell().matrix(), 1e-9);
    }

    #[test]
    fn explicit_map_fast_path_matches_choi() {
        let mut r = rng(9);
        let quad = Quadrature::default();
        for seed in 0..8 {
            let d = 2 + (seed as usize % 2);
            let rho = random_state_on(&[d, 2], &["A", "B"], 1 + seed as usize % 4, seed).unwrap();
            let x = random_pvm(d, seed + 100);
            let z = random_pvm(d, seed + 200);
            let rec = EurRecovery::new(&rho, &x, &z, &quad).unwrap();
            let map = rec.to_cp_map().unwrap();
            let blocks: Vec<CMatrix> = (0..d)
                .map(|_| random_density(&mut r, 2).scale_re(1.0 / d as f64))
                .collect();
            let input = CqState::new("X", blocks.clone(), &[2], &["B"]).unwrap();
            let fast = rec.apply_blocks(&blocks).unwrap();
            let slow = map.apply_matrix(input.to_density().matrix()).unwrap();
            assert_close(&fast, &slow, 1e-10);
        }
    }

    #[test]
    fn explicit_map_equals_generic_rotated_petz() {
        let quad = Quadrature::default();
        for seed in 0..6 {
            let d = 2 + (seed as usize % 2);
            let rho =
                random_state_on(&[d, 2], &["A", "B"], 1 + seed as usize % 3, seed + 40).unwrap();
            let x = random_pvm(d, seed + 300);
            let z = random_pvm(d, seed + 400);
            let explicit = eur_recovery_map(&rho, &x, &z, &quad).unwrap();
            let generic = generic_for(&rho, &x, &z, &quad);
            let dist = choi_distance(&explicit, &generic).unwrap();
            assert!(dist < 1e-7, "seed {seed}: {dist}");
        }
    }

    #[test]
    fn explicit_map_is_cptp() {
        let quad = Quadrature::default();
        for seed in 0..6 {
            let d = 2 + (seed as usize % 2);
            let rho =
                random_state_on(&[d, 2], &["A", "B"], 1 + seed as usize % 2, seed + 70).unwrap();
            let x = random_pvm(d, seed + 500);
            let z = random_pvm(d, seed + 600);
            let rec = EurRecovery::new(&rho, &x, &z, &quad).unwrap();
            let map = rec.to_cp_map().unwrap();
            let on_support = verify_cptp(&map, Some(&rec.support_projector()), 1e-8).unwrap();
            assert!(on_support.pass(), "{on_support:?}");
            let global = verify_cptp(&map, None, 1e-8).unwrap();
            assert!(global.pass(), "{global:?}");
        }
    }

    #[test]
    fn explicit_map_reverses_x_after_z() {
        let quad = Quadrature::default();
        for seed in 0..30 {
            let d = 2 + (seed as usize % 2);
            let rho = random_state_on(
                &[d, d],
                &["A", "B"],
                1 + seed as usize % (d * d),
                seed + 900,
            )
            .unwrap();
            let x = random_pvm(d, seed + 700);
            let z = random_pvm(d, seed + 800);
            let rec = EurRecovery::new(&rho, &x, &z, &quad).unwrap();
            let theta = theta_state(&rho, &x, &z).unwrap();
            let out = rec.apply(&theta).unwrap();
            let expected = pinch(&rho, &z, "A").unwrap();
            let td = trace_distance(out.matrix(), expected.matrix()).unwrap();
            assert!(td < 1e-7, "seed {seed}: {td}");
        }
    }

    #[test]
    fn explicit_map_requires_rank_one_z() {
        let p = CMatrix::from_real_diag(&[1.0, 1.0, 0.0]);
        let q = CMatrix::from_real_diag(&[0.0, 0.0, 1.0]);
        let coarse = Pvm::new(vec![p, q]).unwrap();
        let rho = random_state_on(&[3, 2], &["A", "B"], 2, 1).unwrap();
        assert!(matches!(
            EurRecovery::new(
                &rho,
                &Pvm::computational(3),
                &coarse,
                &Quadrature::default()
            ),
            Err(Error::NotRankOne)
        ));
        // A coarse X measurement is fine.
        assert!(EurRecovery::new(&rho, &coarse, &Pvm::fourier(3), &Quadrature::default()).is_ok());
    }

    #[test]
    fn max_entangled_recovery_matches_kraus_form() {
        // Kraus operators sum_z (-1)^{xz} (|z>_A|z>_B)(<x|_X<z|_B).
        let kraus: Vec<CMatrix> = (0..2)
            .map(|x| {
                let mut k = CMatrix::zeros(4, 4);
                for z in 0..2 {
                    let sign = if x * z % 2 == 1 { -1.0 } else { 1.0 };
                    k[(z * 2 + z, x * 2 + z)] = c64(sign, 0.0);
                }
                k
            })
            .collect();
        let mut completeness = CMatrix::zeros(4, 4);
        for k in &kraus {
            completeness = &completeness + &k.adjoint().matmul(k);
        }
        assert_close(&completeness, &CMatrix::identity(4), 0.0);
        let closed = CpMap::from_kraus(kraus, &[2, 2], &[2, 2]).unwrap();
        let rep = verify_cptp(&closed, None, 1e-12).unwrap();
        assert!(rep.pass());
        let explicit = eur_recovery_map(
            &bell(),
            &Pvm::pauli_x(),
            &Pvm::pauli_z(),
            &Quadrature::default(),
        )
        .unwrap();
        assert!(choi_distance(&closed, &explicit).unwrap() < 1e-8);
    }

    #[test]
    fn truncated_quadrature_fails_trace_preservation() {
        let rho = random_state_on(&[2, 2], &["A", "B"], 4, 12).unwrap();
        let (x, z) = (random_pvm(2, 13), random_pvm(2, 14));
        let quad = Quadrature::truncated(&[-1.0, 0.0, 1.0]).unwrap();
        let rec = EurRecovery::new(&rho, &x, &z, &quad).unwrap();
        let map = rec.to_cp_map().unwrap();
        let rep = verify_cptp(&map, Some(&rec.support_projector()), 1e-8).unwrap();
        assert!(!rep.trace_preserving && !rep.pass());
        assert!(rep.tp_residual > 1e-3, "{rep:?}");
        assert!(rep.completely_positive);
    }

    #[test]
    fn refined_monotonicity_holds_for_random_channels() {
        let mut r = rng(10);
        let quad = Quadrature::default();
        for seed in 0..25 {
            let din = 2 + (seed as usize % 2);
            let channel = random_channel(din, 2, 2, seed).unwrap();
            let rho = random_density(&mut r, din);
            let sigma = random_density(&mut r, din);
            let rec = rotated_petz_map(&sigma, &channel, &quad).unwrap();
            let n_rho = channel.apply_matrix(&rho).unwrap();
            let n_sigma = channel.apply_matrix(&sigma).unwrap();
            let d1 = relative_psd(&rho, &sigma).unwrap().finite().unwrap();
            let d2 = relative_psd(&n_rho, &n_sigma).unwrap().finite().unwrap();
            let f = fidelity(&rho, &rec.apply_matrix(&n_rho).unwrap().hermitian_part()).unwrap();
            let slack = d1 - d2 + libm::log2(f);
            assert!(slack >= -1e-6, "seed {seed}: {slack}");
        }
    }

    #[test]
    fn cq_application_checks_dimensions() {
        let rec = EurRecovery::new(
            &bell(),
            &Pvm::pauli_x(),
            &Pvm::pauli_z(),
            &Quadrature::default(),
        )
        .unwrap();
        assert!(rec.apply_blocks(&[pi(2)]).is_err());
        assert!(rec.apply_blocks(&[pi(3), pi(3)]).is_err());
        let id = CpMap::identity(&[2]);
        assert!(id.apply_matrix(&pi(3)).is_err());
    }
}
