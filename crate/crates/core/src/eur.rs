//! Checkers for the four uncertainty relations and a seeded fuzzing harness.
//!
//! With `sigma_XB` the post-`X` state, `omega_ZB` (or `omega_ZE`) the post-`Z` state,
//! `c` the incompatibility and `f = F(rho_AB, R(sigma_XB))` the reversibility:
//!
//! - tripartite: `H(X|B) + H(Z|E) >= -log c`, refined by `- log f`;
//! - bipartite (rank-one `Z`): `H(X|B) + H(Z|B) >= -log c + H(A|B)`, refined by `- log f`.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::entropy::conditional;
use crate::error::{Error, Result};
use crate::qmat::fidelity;
use crate::qstate::{
    incompatibility_c, measure, pinch, purify_as, random_pvm, random_state_on, DensityOperator, Pvm,
};
use crate::recovery::{rotated_petz_map, CpMap, EurRecovery, Quadrature};

/// Entropy terms are exact up to eigenvalue round-off.
pub const ENTROPY_TOL: f64 = 1e-9;
/// `f` carries the quadrature error of the recovery map.
pub const FIDELITY_TOL: f64 = 1e-6;
/// Purity threshold for tripartite inputs.
pub const PURITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationId {
    Tripartite,
    TripartiteRefined,
    Bipartite,
    BipartiteRefined,
}

impl RelationId {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Tripartite => "tripartite",
            RelationId::TripartiteRefined => "tripartite_refined",
            RelationId::Bipartite => "bipartite",
            RelationId::BipartiteRefined => "bipartite_refined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tripartite" => Some(RelationId::Tripartite),
            "tripartite_refined" => Some(RelationId::TripartiteRefined),
            "bipartite" => Some(RelationId::Bipartite),
            "bipartite_refined" => Some(RelationId::BipartiteRefined),
            _ => None,
        }
    }

    pub fn is_tripartite(self) -> bool {
        matches!(self, RelationId::Tripartite | RelationId::TripartiteRefined)
    }

    /// The refined counterpart; checkers always evaluate both bounds.
    pub fn refined(self) -> Self {
        if self.is_tripartite() {
            RelationId::TripartiteRefined
        } else {
            RelationId::BipartiteRefined
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Every term of one uncertainty relation, in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct EurReport {
    pub relation_id: RelationId,
    pub h_xb: f64,
    pub h_zb: f64,
    /// Only set by the tripartite checker.
    pub h_ze: Option<f64>,
    pub h_ab: f64,
    pub c: f64,
    pub f: f64,
    pub lhs: f64,
    pub rhs_original: f64,
    pub rhs_refined: f64,
    pub slack_original: f64,
    pub slack_refined: f64,
    pub entropy_tol: f64,
    pub fidelity_tol: f64,
}

impl EurReport {
    fn assemble(
        relation_id: RelationId,
        h_xb: f64,
        h_zb: f64,
        h_ze: Option<f64>,
        h_ab: f64,
        c: f64,
        f: f64,
    ) -> Self {
        let neg_log_c = -libm::log2(c);
        let neg_log_f = -libm::log2(f);
        let (lhs, rhs_original) = match (relation_id.is_tripartite(), h_ze) {
            (true, Some(h_ze)) => (h_xb + h_ze, neg_log_c),
            _ => (h_xb + h_zb, neg_log_c + h_ab),
        };
        let rhs_refined = rhs_original + neg_log_f;
        Self {
            relation_id,
            h_xb,
            h_zb,
            h_ze,
            h_ab,
            c,
            f,
            lhs,
            rhs_original,
            rhs_refined,
            slack_original: lhs - rhs_original,
            slack_refined: lhs - rhs_refined,
            entropy_tol: ENTROPY_TOL,
            fidelity_tol: FIDELITY_TOL,
        }
    }

    /// `-log2 f`
    pub fn reversal_penalty(&self) -> f64 {
        -libm::log2(self.f)
    }

    /// The refined bound holds up to `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack_refined >= -tol
    }

    /// Refinement never loosens the bound.
    pub fn refinement_consistent(&self) -> bool {
        self.slack_refined <= self.slack_original + ENTROPY_TOL
    }
}

fn a_and_b_labels(rho: &DensityOperator, min_parts: usize) -> Result<(String, Vec<String>)> {
    let labels: Vec<String> = rho.labels().map(|l| l.to_owned()).collect();
    if labels.len() < min_parts {
        return Err(Error::InvalidArgument(alloc::format!(
            "state needs at least {min_parts} subsystems, has {}",
            labels.len()
        )));
    }
    Ok((labels[0].clone(), labels[1..].to_vec()))
}

fn conditional_on(state: &DensityOperator, cond: &[String]) -> Result<f64> {
    let cond: Vec<&str> = cond.iter().map(String::as_str).collect();
    conditional(state, &cond)
}

/// Reversibility `F(rho_AB, R(sigma_XB))` with the rotated Petz recovery of the
/// `X` measurement relative to the `Z`-pinched state. The explicit map is used for
/// rank-one `Z`, the generic construction otherwise.
pub fn reversibility(
    rho_ab: &DensityOperator,
    x_pvm: &Pvm,
    z_pvm: &Pvm,
    quad: &Quadrature,
) -> Result<f64> {
    let (a, _) = a_and_b_labels(rho_ab, 2)?;
    let sigma = measure(rho_ab, x_pvm, &a, "X")?;
    let recovered = if z_pvm.is_rank_one() {
        EurRecovery::new(rho_ab, x_pvm, z_pvm, quad)?
            .apply(&sigma)?
            .into_matrix()
    } else {
        let b_dims = &rho_ab.dims()[1..];
        let channel = CpMap::measurement(x_pvm).tensor_identity(b_dims);
        let pinched = pinch(rho_ab, z_pvm, &a)?;
        let map = rotated_petz_map(pinched.matrix(), &channel, quad)?;
        map.apply_matrix(sigma.to_density().matrix())?
            .hermitian_part()
    };
    fidelity(rho_ab.matrix(), &recovered)
}

/// Bipartite relation and its refinement. `A` is subsystem 0, all others form `B`.
pub fn check_bipartite(rho_ab: &DensityOperator, x_pvm: &Pvm, z_pvm: &Pvm) -> Result<EurReport> {
    check_bipartite_with(rho_ab, x_pvm, z_pvm, &Quadrature::default())
}

pub fn check_bipartite_with(
    rho_ab: &DensityOperator,
    x_pvm: &Pvm,
    z_pvm: &Pvm,
    quad: &Quadrature,
) -> Result<EurReport> {
    if !z_pvm.is_rank_one() {
        return Err(Error::NotRankOne);
    }
    let (a, b) = a_and_b_labels(rho_ab, 2)?;
    let sigma = measure(rho_ab, x_pvm, &a, "X")?.to_density();
    let omega = measure(rho_ab, z_pvm, &a, "Z")?.to_density();
    let h_xb = conditional_on(&sigma, &b)?;
    let h_zb = conditional_on(&omega, &b)?;
    let h_ab = conditional_on(rho_ab, &b)?;
    let c = incompatibility_c(x_pvm, z_pvm)?;
    let f = reversibility(rho_ab, x_pvm, z_pvm, quad)?;
    Ok(EurReport::assemble(
        RelationId::BipartiteRefined,
        h_xb,
        h_zb,
        None,
        h_ab,
        c,
        f,
    ))
}

/// Tripartite relation and its refinement for `rho_ABE` with `A` = subsystem 0,
/// `B` = subsystem 1 and `E` = the rest. A mixed input is purified into an enlarged
/// `E` when `purify` is set and rejected otherwise.
pub fn check_tripartite(
    rho_abe: &DensityOperator,
    x_pvm: &Pvm,
    z_pvm: &Pvm,
    purify: bool,
) -> Result<EurReport> {
    check_tripartite_with(rho_abe, x_pvm, z_pvm, purify, &Quadrature::default())
}

pub fn check_tripartite_with(
    rho_abe: &DensityOperator,
    x_pvm: &Pvm,
    z_pvm: &Pvm,
    purify: bool,
    quad: &Quadrature,
) -> Result<EurReport> {
    let (a, rest) = a_and_b_labels(rho_abe, 3)?;
    let psi = if rho_abe.is_pure(PURITY_TOL) {
        rho_abe.clone()
    } else if purify {
        let mut name = String::from("R");
        while rest.contains(&name) {
            name.push('\'');
        }
        purify_as(rho_abe, &name)?
    } else {
        return Err(Error::NotPure {
            purity: rho_abe.purity(),
        });
    };
    let b = rest[0].clone();
    let e: Vec<String> = psi.labels().skip(2).map(|l| l.to_owned()).collect();
    let rho_ab = psi.reduce(&[a.as_str(), b.as_str()])?;
    let sigma = measure(&rho_ab, x_pvm, &a, "X")?.to_density();
    let omega = measure(&psi, z_pvm, &a, "Z")?.to_density();
    let mut ze: Vec<&str> = alloc::vec!["Z"];
    ze.extend(e.iter().map(String::as_str));
    let omega_ze = omega.reduce(&ze)?;
    let omega_zb = omega.reduce(&["Z", b.as_str()])?;
    let b_only = [b.clone()];
    let h_xb = conditional_on(&sigma, &b_only)?;
    let h_ze = conditional_on(&omega_ze, &e)?;
    let h_zb = conditional_on(&omega_zb, &b_only)?;
    let h_ab = conditional_on(&rho_ab, &b_only)?;
    let c = incompatibility_c(x_pvm, z_pvm)?;
    let f = reversibility(&rho_ab, x_pvm, z_pvm, quad)?;
    Ok(EurReport::assemble(
        RelationId::TripartiteRefined,
        h_xb,
        h_zb,
        Some(h_ze),
        h_ab,
        c,
        f,
    ))
}

/// Which measurements the fuzzer draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvmChoice {
    /// Fourier (`X`) and computational (`Z`) bases: the Pauli pair for qubits.
    Pauli,
    /// Independent Haar-random rank-one measurements per trial.
    Random,
}

impl PvmChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            PvmChoice::Pauli => "pauli",
            PvmChoice::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pauli" => Some(PvmChoice::Pauli),
            "random" => Some(PvmChoice::Random),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzConfig {
    pub relation: RelationId,
    pub trials: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub pvms: PvmChoice,
    pub seed: u64,
}

impl FuzzConfig {
    pub fn new(
        relation: RelationId,
        trials: usize,
        dim: usize,
        pvms: PvmChoice,
        seed: u64,
    ) -> Self {
        Self {
            relation,
            trials,
            dim_a: dim,
            dim_b: dim,
            pvms,
            seed,
        }
    }
}

/// One generated input, enough to replay a trial.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzInstance {
    pub trial: usize,
    pub seed: u64,
    /// `rho_AB`; the tripartite relation purifies it into `E`.
    pub rho_ab: DensityOperator,
    pub x_pvm: Pvm,
    pub z_pvm: Pvm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub min_slack_original: f64,
    pub min_slack_refined: f64,
    /// Largest `slack_refined - slack_original`; never positive beyond round-off.
    pub max_refinement_excess: f64,
    pub worst_trial: usize,
    pub worst_instance: FuzzInstance,
    pub worst_report: EurReport,
}

impl FuzzSummary {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_slack_refined >= -tol
            && self.min_slack_original >= -tol
            && self.max_refinement_excess <= ENTROPY_TOL
    }
}

/// SplitMix64 finalizer; spreads `(seed, trial)` into independent stream seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    mix(seed ^ mix(trial as u64))
}

/// Rebuilds the input of trial `trial`.
pub fn fuzz_instance(config: &FuzzConfig, trial: usize) -> Result<FuzzInstance> {
    if config.dim_a < 2 || config.dim_b < 1 {
        return Err(Error::InvalidArgument(
            "fuzzing needs dim_a >= 2 and dim_b >= 1".into(),
        ));
    }
    let seed = trial_seed(config.seed, trial);
    let total = config.dim_a * config.dim_b;
    let rank = 1 + (mix(seed ^ 0x7261_6e6b) % total as u64) as usize;
    let rho_ab = random_state_on(
        &[config.dim_a, config.dim_b],
        &["A", "B"],
        rank,
        mix(seed ^ 1),
    )?;
    let (x_pvm, z_pvm) = match config.pvms {
        PvmChoice::Pauli => (Pvm::fourier(config.dim_a), Pvm::computational(config.dim_a)),
        PvmChoice::Random => (
            random_pvm(config.dim_a, mix(seed ^ 2)),
            random_pvm(config.dim_a, mix(seed ^ 3)),
        ),
    };
    Ok(FuzzInstance {
        trial,
        seed,
        rho_ab,
        x_pvm,
        z_pvm,
    })
}

/// Checks one instance against the configured relation.
pub fn check_instance(
    relation: RelationId,
    inst: &FuzzInstance,
    quad: &Quadrature,
) -> Result<EurReport> {
    if relation.is_tripartite() {
        let psi = purify_as(&inst.rho_ab, "E")?;
        check_tripartite_with(&psi, &inst.x_pvm, &inst.z_pvm, false, quad)
    } else {
        check_bipartite_with(&inst.rho_ab, &inst.x_pvm, &inst.z_pvm, quad)
    }
}

/// Runs `config.trials` seeded trials and keeps the worst refined slack (lowest trial
/// index on ties).
pub fn fuzz(config: &FuzzConfig) -> Result<FuzzSummary> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument(
            "fuzzing needs at least one trial".into(),
        ));
    }
    let quad = Quadrature::default();
    let mut worst: Option<(FuzzInstance, EurReport)> = None;
    let mut min_original = f64::INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    for trial in 0..config.trials {
        let inst = fuzz_instance(config, trial)?;
        let report = check_instance(config.relation, &inst, &quad)?;
        min_original = min_original.min(report.slack_original);
        max_excess = max_excess.max(report.slack_refined - report.slack_original);
        let replace = match &worst {
            None => true,
            Some((_, w)) => report.slack_refined < w.slack_refined,
        };
        if replace {
            worst = Some((inst, report));
        }
    }
    let (worst_instance, worst_report) = worst.expect("at least one trial ran");
    Ok(FuzzSummary {
        config: config.clone(),
        min_slack_original: min_original,
        min_slack_refined: worst_report.slack_refined,
        max_refinement_excess: max_excess,
        worst_trial: worst_instance.trial,
        worst_instance,
        worst_report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{c64, CMatrix, C64};
    use alloc::vec;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn product_with_pi(a: &[C64]) -> DensityOperator {
        DensityOperator::pure(a, &[2], &["A"])
            .unwrap()
            .tensor(&DensityOperator::maximally_mixed(2, "B"))
    }

    fn plus() -> Vec<C64> {
        vec![c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)]
    }

    fn bell_ket() -> Vec<C64> {
        let s = FRAC_1_SQRT_2;
        vec![c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)]
    }

    fn near(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn pauli() -> (Pvm, Pvm) {
        (Pvm::pauli_x(), Pvm::pauli_z())
    }

    #[test]
    fn x_eigenstate_is_saturated() {
        let (x, z) = pauli();
        let r = check_bipartite(&product_with_pi(&plus()), &x, &z).unwrap();
        assert_eq!(r.relation_id, RelationId::BipartiteRefined);
        assert!(near(r.lhs, 1.0, 1e-9) && near(r.rhs_original, 1.0, 1e-9));
        assert!(near(r.f, 1.0, 1e-6) && near(r.rhs_refined, 1.0, 1e-6));
        assert!(near(r.slack_refined, 0.0, 1e-6));
    }

    #[test]
    fn max_entangled_is_saturated() {
        let (x, z) = pauli();
        let rho = DensityOperator::pure(&bell_ket(), &[2, 2], &["A", "B"]).unwrap();
        let r = check_bipartite(&rho, &x, &z).unwrap();
        assert!(near(r.lhs, 0.0, 1e-9) && near(r.h_ab, -1.0, 1e-9));
        assert!(near(r.rhs_original, 0.0, 1e-9) && near(r.f, 1.0, 1e-6));
        assert!(r.refinement_consistent());
    }

    #[test]
    fn max_uncertainty_saturates_only_the_refined_bound() {
        let (x, z) = pauli();
        let y = vec![c64(FRAC_1_SQRT_2, 0.0), c64(0.0, FRAC_1_SQRT_2)];
        let r = check_bipartite(&product_with_pi(&y), &x, &z).unwrap();
        assert!(near(r.lhs, 2.0, 1e-9) && near(r.rhs_original, 1.0, 1e-9));
        assert!(near(r.f, 0.5, 1e-6) && near(r.rhs_refined, 2.0, 1e-6));
        assert!(near(r.slack_original, 1.0, 1e-9) && near(r.slack_refined, 0.0, 1e-6));
    }

    #[test]
    fn bipartite_refuses_coarse_z() {
        let coarse = Pvm::new(vec![
            CMatrix::from_real_diag(&[1.0, 1.0, 0.0]),
            CMatrix::from_real_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let rho = random_state_on(&[3, 2], &["A", "B"], 3, 5).unwrap();
        assert!(matches!(
            check_bipartite(&rho, &Pvm::fourier(3), &coarse),
            Err(Error::NotRankOne)
        ));
        let psi = purify_as(&rho, "E").unwrap();
        let r = check_tripartite(&psi, &Pvm::fourier(3), &coarse, false).unwrap();
        assert!(r.holds(1e-6) && r.refinement_consistent(), "{r:?}");
    }

    #[test]
    fn bell_with_product_eve() {
        let (x, z) = pauli();
        let mut ket = vec![c64(0.0, 0.0); 8];
        for (i, a) in bell_ket().into_iter().enumerate() {
            ket[2 * i] = a;
        }
        let psi = DensityOperator::pure(&ket, &[2, 2, 2], &["A", "B", "E"]).unwrap();
        let r = check_tripartite(&psi, &x, &z, false).unwrap();
        assert_eq!(r.relation_id, RelationId::TripartiteRefined);
        assert!(near(r.h_ze.unwrap(), 1.0, 1e-9) && near(r.h_xb, 0.0, 1e-9));
        assert!(near(r.f, 1.0, 1e-6) && near(r.slack_refined, 0.0, 1e-6));
    }

    #[test]
    fn ghz_state() {
        let (x, z) = pauli();
        let mut ket = vec![c64(0.0, 0.0); 8];
        ket[0] = c64(FRAC_1_SQRT_2, 0.0);
        ket[7] = c64(FRAC_1_SQRT_2, 0.0);
        let psi = DensityOperator::pure(&ket, &[2, 2, 2], &["A", "B", "E"]).unwrap();
        let r = check_tripartite(&psi, &x, &z, false).unwrap();
        assert!(near(r.h_ze.unwrap(), 0.0, 1e-9) && near(r.h_xb, 1.0, 1e-9));
        assert!(
            r.slack_original >= -1e-9 && r.slack_refined >= -1e-6,
            "{r:?}"
        );
    }

    #[test]
    fn mixed_tripartite_needs_purification_flag() {
        let (x, z) = pauli();
        let rho = product_with_pi(&plus())
            .tensor(&DensityOperator::pure(&[c64(1.0, 0.0), c64(0.0, 0.0)], &[2], &["E"]).unwrap());
        assert!(matches!(
            check_tripartite(&rho, &x, &z, false),
            Err(Error::NotPure { .. })
        ));
        let tri = check_tripartite(&rho, &x, &z, true).unwrap();
        let bi = check_bipartite(&product_with_pi(&plus()), &x, &z).unwrap();
        assert!(near(tri.h_xb, bi.h_xb, 1e-9) && near(tri.h_zb, bi.h_zb, 1e-9));
        assert!(near(tri.f, bi.f, 1e-9));
        // For the purified state, H(Z|E) - H(Z|B) = -H(A|B).
        assert!(near(tri.h_ze.unwrap() - tri.h_zb, -tri.h_ab, 1e-8));
    }

    #[test]
    fn duality_between_tripartite_and_bipartite_reports() {
        let quad = Quadrature::default();
        for seed in 0..40u64 {
            let d = 2 + (seed % 2) as usize;
            let rho =
                random_state_on(&[d, 2], &["A", "B"], 1 + (seed as usize % (2 * d)), seed).unwrap();
            let psi = purify_as(&rho, "E").unwrap();
            let x = random_pvm(d, seed + 11);
            let z = random_pvm(d, seed + 12);
            let tri = check_tripartite_with(&psi, &x, &z, false, &quad).unwrap();
            let bi = check_bipartite_with(&rho, &x, &z, &quad).unwrap();
            assert!(
                near(tri.h_ze.unwrap() - bi.h_zb, -bi.h_ab, 1e-8),
                "seed {seed}"
            );
            assert!(
                near(tri.slack_refined, bi.slack_refined, 1e-8),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn small_fuzz_runs_hold() {
        for relation in [RelationId::Bipartite, RelationId::Tripartite] {
            for pvms in [PvmChoice::Pauli, PvmChoice::Random] {
                let cfg = FuzzConfig::new(relation, 25, 2, pvms, 99);
                let s = fuzz(&cfg).unwrap();
                assert!(s.holds(1e-6), "{relation} {pvms:?}: {s:?}");
                let replay = check_instance(
                    relation,
                    &fuzz_instance(&cfg, s.worst_trial).unwrap(),
                    &Quadrature::default(),
                )
                .unwrap();
                assert_eq!(replay, s.worst_report);
            }
        }
    }

    #[test]
    fn fuzz_is_deterministic() {
        let cfg = FuzzConfig::new(RelationId::Bipartite, 1, 3, PvmChoice::Random, 7);
        let a = fuzz(&cfg).unwrap();
        let b = fuzz(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            a.worst_report.slack_refined.to_bits(),
            b.worst_report.slack_refined.to_bits()
        );
        let other = fuzz(&FuzzConfig {
            seed: 8,
            ..cfg.clone()
        })
        .unwrap();
        assert_ne!(a.worst_instance.rho_ab, other.worst_instance.rho_ab);
        assert!(fuzz(&FuzzConfig { trials: 0, ..cfg }).is_err());
    }

    #[test]
    fn relation_ids_round_trip() {
        for r in [
            RelationId::Tripartite,
            RelationId::TripartiteRefined,
            RelationId::Bipartite,
            RelationId::BipartiteRefined,
        ] {
            assert_eq!(RelationId::parse(r.as_str()), Some(r));
        }
        assert_eq!(RelationId::parse("quadripartite"), None);
        assert_eq!(PvmChoice::parse("pauli"), Some(PvmChoice::Pauli));
    }
}
