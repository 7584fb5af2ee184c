//! Von Neumann, conditional and relative entropies, all in bits.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::qmat::{eigh, eigh_psd, CMatrix, HermEig};
use crate::qstate::DensityOperator;

/// Relative entropy value: finite bits, or `+inf` when the support condition fails.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            EntropyValue::Finite(v) => Some(v),
            EntropyValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, EntropyValue::Infinite)
    }
}

/// Leakage `Tr{rho (I - Pi_sigma)}` above which `supp(rho) ⊄ supp(sigma)`.
const SUPPORT_LEAK_TOL: f64 = 1e-10;

fn entropy_of_spectrum(eig: &HermEig) -> f64 {
    let cut = eig.support_cutoff();
    -eig.values
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| l * libm::log2(l))
        .sum::<f64>()
}

/// `-Tr{m log2 m}` of a PSD matrix, with `0 log 0 = 0`.
pub fn entropy_of_psd(m: &CMatrix) -> Result<f64> {
    Ok(entropy_of_spectrum(&eigh_psd(m)?))
}

pub fn von_neumann(rho: &DensityOperator) -> f64 {
    // A DensityOperator is Hermitian by construction, so eigh cannot fail here.
    eigh(rho.matrix())
        .map(|e| entropy_of_spectrum(&e))
        .unwrap_or(f64::NAN)
}

/// `H(rest | cond) = H(all) - H(cond)`.
pub fn conditional(rho: &DensityOperator, cond: &[&str]) -> Result<f64> {
    for l in cond {
        rho.index_of(l)?;
    }
    let n_labels = rho.labels().count();
    let mut distinct: Vec<&str> = cond.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() >= n_labels {
        return Err(Error::InvalidArgument(
            "conditioning systems must be a proper subset".into(),
        ));
    }
    let marginal = rho.reduce(cond)?;
    Ok(von_neumann(rho) - von_neumann(&marginal))
}

/// `D(rho || sigma) = Tr{rho (log2 rho - log2 sigma)}` for a PSD `sigma`, which need not
/// be normalized.
pub fn relative(rho: &DensityOperator, sigma: &CMatrix) -> Result<EntropyValue> {
    relative_psd(rho.matrix(), sigma)
}

/// [`relative`] on raw matrices. `rho` need only be PSD.
///
/// `Tr{rho log rho}` comes from rho's own spectrum and `Tr{rho log sigma}` from sigma's
/// spectrum through the overlap `|<r_i|s_j>|^2` of the two eigenbases.
pub fn relative_psd(rho: &CMatrix, sigma: &CMatrix) -> Result<EntropyValue> {
    if rho.rows() != sigma.rows() {
        return Err(Error::DimensionMismatch {
            context: "relative entropy",
            expected: rho.rows(),
            found: sigma.rows(),
        });
    }
    let er = eigh_psd(rho)?;
    let es = eigh_psd(sigma)?;
    let cut_r = er.support_cutoff();
    let cut_s = es.support_cutoff();
    let overlap = er.vectors.adjoint().matmul(&es.vectors);

    let mut self_term = 0.0;
    let mut cross_term = 0.0;
    let mut leak = 0.0;
    for (i, &l) in er.values.iter().enumerate() {
        if l <= cut_r {
            continue;
        }
        self_term += l * libm::log2(l);
        for (j, &m) in es.values.iter().enumerate() {
            let w = overlap[(i, j)].norm_sqr();
            if m > cut_s {
                cross_term += l * w * libm::log2(m);
            } else {
                leak += l * w;
            }
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return Ok(EntropyValue::Infinite);
    }
    Ok(EntropyValue::Finite(self_term - cross_term))
}
