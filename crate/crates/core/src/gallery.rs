//! The four worked examples as golden cases.
//!
//! Each case stores only inputs and the closed-form outcomes (entropies, reversibility,
//! recovered states, the recovery map in Kraus form). [`run_all`] pushes the inputs
//! through the generic pipeline and compares.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use crate::error::{Error, Result};
use crate::eur::{check_bipartite_with, EurReport};
use crate::qmat::{c64, tensor, trace_distance, CMatrix, C64};
use crate::qstate::{incompatibility_c, CqState, DensityOperator, Pvm};
use crate::recovery::{choi_distance, CpMap, EurRecovery, Quadrature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    XEigen,
    ZEigen,
    MaxEntangled,
    MaxUncertainty,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [
        CaseId::XEigen,
        CaseId::ZEigen,
        CaseId::MaxEntangled,
        CaseId::MaxUncertainty,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::XEigen => "x_eigen",
            CaseId::ZEigen => "z_eigen",
            CaseId::MaxEntangled => "max_entangled",
            CaseId::MaxUncertainty => "max_uncertainty",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCase(s.into()))
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Closed-form values of the bipartite report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedReport {
    pub h_ab: f64,
    pub h_xb: f64,
    pub h_zb: f64,
    pub c: f64,
    pub f: f64,
    pub lhs: f64,
    pub rhs_original: f64,
    pub rhs_refined: f64,
}

impl ExpectedReport {
    fn new(h_ab: f64, h_xb: f64, h_zb: f64, f: f64) -> Self {
        let rhs_original = 1.0 + h_ab;
        Self {
            h_ab,
            h_xb,
            h_zb,
            c: 0.5,
            f,
            lhs: h_xb + h_zb,
            rhs_original,
            rhs_refined: rhs_original - libm::log2(f),
        }
    }

    pub fn slack_original(&self) -> f64 {
        self.lhs - self.rhs_original
    }

    pub fn slack_refined(&self) -> f64 {
        self.lhs - self.rhs_refined
    }
}

/// A recovery input and the state it must be mapped to.
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryExpectation {
    pub label: &'static str,
    pub input: CqState,
    pub output: DensityOperator,
}

#[derive(Clone, Debug)]
pub struct GalleryCase {
    pub id: CaseId,
    pub rho_ab: DensityOperator,
    pub x_pvm: Pvm,
    pub z_pvm: Pvm,
    pub expected: ExpectedReport,
    pub expected_recovery_outputs: Vec<RecoveryExpectation>,
    /// The recovery map in the Kraus form worked out by hand for this case.
    pub closed_form_map: CpMap,
}

fn real_ket(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| c64(x, 0.0)).collect()
}

fn pi2() -> CMatrix {
    CMatrix::identity(2).scale_re(0.5)
}

fn ab(m: CMatrix) -> DensityOperator {
    DensityOperator::new(m, &[2, 2], &["A", "B"]).expect("gallery states are valid")
}

fn cq(blocks: [CMatrix; 2]) -> CqState {
    CqState::new("X", blocks.to_vec(), &[2], &["B"]).expect("gallery cq-states are valid")
}

fn uniform_cq() -> CqState {
    cq([pi2().scale_re(0.5), pi2().scale_re(0.5)])
}

fn plus() -> Vec<C64> {
    real_ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
}

fn minus() -> Vec<C64> {
    real_ket(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
}

/// `R(xi) = sum_x |a_x><a_x| ⊗ <x|xi|x>`: measure the register, prepare `|a_x>`.
fn prepare_map(kets: [Vec<C64>; 2]) -> CpMap {
    let kraus = kets
        .iter()
        .enumerate()
        .map(|(x, a)| {
            let reg = CMatrix::bra(&CMatrix::basis(2, x));
            tensor(&CMatrix::ket(a).matmul(&reg), &CMatrix::identity(2))
        })
        .collect();
    CpMap::from_kraus(kraus, &[2, 2], &[2, 2]).expect("closed-form Kraus operators are well formed")
}

/// Kraus operators `sum_z (-1)^{xz} (|z>_A|z>_B)(<x|_X<z|_B)`.
fn copy_with_phase_map() -> CpMap {
    let kraus = (0..2)
        .map(|x| {
            let mut k = CMatrix::zeros(4, 4);
            for z in 0..2 {
                let sign = if x * z == 1 { -1.0 } else { 1.0 };
                k[(z * 2 + z, x * 2 + z)] = c64(sign, 0.0);
            }
            k
        })
        .collect();
    CpMap::from_kraus(kraus, &[2, 2], &[2, 2]).expect("closed-form Kraus operators are well formed")
}

pub fn build(id: CaseId) -> GalleryCase {
    let zero = real_ket(&[1.0, 0.0]);
    let pi_ab = || ab(tensor(&pi2(), &pi2()));
    let (rho_ab, expected, outputs, map) = match id {
        CaseId::XEigen => {
            let rho = ab(tensor(&CMatrix::projector(&plus()), &pi2()));
            let outputs = vec![
                RecoveryExpectation {
                    label: "sigma_to_rho",
                    input: cq([pi2(), CMatrix::zeros(2, 2)]),
                    output: rho.clone(),
                },
                RecoveryExpectation {
                    label: "theta_to_omega",
                    input: uniform_cq(),
                    output: pi_ab(),
                },
            ];
            (
                rho,
                ExpectedReport::new(0.0, 0.0, 1.0, 1.0),
                outputs,
                prepare_map([plus(), minus()]),
            )
        }
        CaseId::ZEigen => {
            let rho = ab(tensor(&CMatrix::projector(&zero), &pi2()));
            // sigma_XB and theta_XB coincide here, and so do rho_AB and omega.
            let outputs = vec![
                RecoveryExpectation {
                    label: "sigma_to_rho",
                    input: uniform_cq(),
                    output: rho.clone(),
                },
                RecoveryExpectation {
                    label: "theta_to_omega",
                    input: uniform_cq(),
                    output: rho.clone(),
                },
            ];
            (
                rho,
                ExpectedReport::new(0.0, 1.0, 0.0, 1.0),
                outputs,
                prepare_map([zero.clone(), zero.clone()]),
            )
        }
        CaseId::MaxEntangled => {
            let phi = real_ket(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
            let rho = ab(CMatrix::projector(&phi));
            let correlated = ab(CMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5]));
            let outputs = vec![
                RecoveryExpectation {
                    label: "sigma_to_rho",
                    input: cq([
                        CMatrix::projector(&plus()).scale_re(0.5),
                        CMatrix::projector(&minus()).scale_re(0.5),
                    ]),
                    output: rho.clone(),
                },
                RecoveryExpectation {
                    label: "theta_to_omega",
                    input: uniform_cq(),
                    output: correlated,
                },
            ];
            (
                rho,
                ExpectedReport::new(-1.0, 0.0, 0.0, 1.0),
                outputs,
                copy_with_phase_map(),
            )
        }
        CaseId::MaxUncertainty => {
            let y = vec![c64(FRAC_1_SQRT_2, 0.0), c64(0.0, FRAC_1_SQRT_2)];
            let rho = ab(tensor(&CMatrix::projector(&y), &pi2()));
            let outputs = vec![
                RecoveryExpectation {
                    label: "sigma_to_rho",
                    input: uniform_cq(),
                    output: pi_ab(),
                },
                RecoveryExpectation {
                    label: "theta_to_omega",
                    input: uniform_cq(),
                    output: pi_ab(),
                },
            ];
            (
                rho,
                ExpectedReport::new(0.0, 1.0, 1.0, 0.5),
                outputs,
                prepare_map([plus(), minus()]),
            )
        }
    };
    GalleryCase {
        id,
        rho_ab,
        x_pvm: Pvm::pauli_x(),
        z_pvm: Pvm::pauli_z(),
        expected,
        expected_recovery_outputs: outputs,
        closed_form_map: map,
    }
}

pub fn build_named(name: &str) -> Result<GalleryCase> {
    CaseId::parse(name).map(build)
}

/// How a ledger row is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ToleranceClass {
    /// Eigenvalue-exact entropy terms.
    Entropy,
    /// Trace distance of recovered states.
    Recovery,
    /// Anything through `f`, which inherits the quadrature error.
    Fidelity,
    /// Operator-norm distance of Choi matrices.
    Map,
}

impl ToleranceClass {
    pub fn default_tolerance(self) -> f64 {
        match self {
            ToleranceClass::Entropy => 1e-9,
            ToleranceClass::Recovery => 1e-7,
            ToleranceClass::Fidelity => 1e-6,
            ToleranceClass::Map => 1e-8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ToleranceClass::Entropy => "entropy",
            ToleranceClass::Recovery => "recovery",
            ToleranceClass::Fidelity => "fidelity",
            ToleranceClass::Map => "map",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LedgerRow {
    pub case: CaseId,
    pub quantity: String,
    pub expected: f64,
    pub computed: f64,
    pub residual: f64,
    pub class: ToleranceClass,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalleryLedger {
    pub rows: Vec<LedgerRow>,
}

impl GalleryLedger {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn cases(&self) -> Vec<CaseId> {
        let mut c: Vec<CaseId> = self.rows.iter().map(|r| r.case).collect();
        c.dedup();
        c
    }

    pub fn max_residual(&self, class: ToleranceClass) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.class == class)
            .map(|r| r.residual)
            .fold(0.0, f64::max)
    }
}

struct RowSink {
    case: CaseId,
    tolerance: Option<f64>,
    rows: Vec<LedgerRow>,
}

impl RowSink {
    fn push(&mut self, quantity: String, expected: f64, computed: f64, class: ToleranceClass) {
        let residual = (computed - expected).abs();
        let tolerance = self.tolerance.unwrap_or_else(|| class.default_tolerance());
        self.rows.push(LedgerRow {
            case: self.case,
            quantity,
            expected,
            computed,
            residual,
            class,
            tolerance,
            pass: residual <= tolerance,
        });
    }
}

/// The pipeline's bipartite report for a case.
pub fn pipeline_report(case: &GalleryCase, quad: &Quadrature) -> Result<EurReport> {
    check_bipartite_with(&case.rho_ab, &case.x_pvm, &case.z_pvm, quad)
}

/// Ledger rows for one case. `tolerance` overrides every class tolerance.
pub fn run_case(
    case: &GalleryCase,
    quad: &Quadrature,
    tolerance: Option<f64>,
) -> Result<Vec<LedgerRow>> {
    use ToleranceClass::*;
    let mut sink = RowSink {
        case: case.id,
        tolerance,
        rows: Vec::new(),
    };
    let e = &case.expected;
    let report = pipeline_report(case, quad)?;
    sink.push("H(A|B)".into(), e.h_ab, report.h_ab, Entropy);
    sink.push("H(X|B)".into(), e.h_xb, report.h_xb, Entropy);
    sink.push("H(Z|B)".into(), e.h_zb, report.h_zb, Entropy);
    sink.push(
        "c".into(),
        e.c,
        incompatibility_c(&case.x_pvm, &case.z_pvm)?,
        Entropy,
    );
    sink.push("lhs".into(), e.lhs, report.lhs, Entropy);
    sink.push(
        "rhs_original".into(),
        e.rhs_original,
        report.rhs_original,
        Entropy,
    );
    sink.push("f".into(), e.f, report.f, Fidelity);
    sink.push(
        "rhs_refined".into(),
        e.rhs_refined,
        report.rhs_refined,
        Fidelity,
    );
    sink.push(
        "slack_refined".into(),
        e.slack_refined(),
        report.slack_refined,
        Fidelity,
    );

    let rec = EurRecovery::new(&case.rho_ab, &case.x_pvm, &case.z_pvm, quad)?;
    for r in &case.expected_recovery_outputs {
        let out = rec.apply(&r.input)?;
        let td = trace_distance(out.matrix(), r.output.matrix())?;
        sink.push(format!("recovery:{}", r.label), 0.0, td, Recovery);
    }
    let map = rec.to_cp_map()?;
    sink.push(
        "map:closed_form".into(),
        0.0,
        choi_distance(&map, &case.closed_form_map)?,
        Map,
    );
    if case.id == CaseId::MaxUncertainty {
        let x_eigen = build(CaseId::XEigen);
        let other =
            EurRecovery::new(&x_eigen.rho_ab, &x_eigen.x_pvm, &x_eigen.z_pvm, quad)?.to_cp_map()?;
        sink.push(
            "map:same_as_x_eigen".into(),
            0.0,
            choi_distance(&map, &other)?,
            Map,
        );
    }
    Ok(sink.rows)
}

/// Runs every case through the pipeline.
pub fn run_all(quad: &Quadrature, tolerance: Option<f64>) -> Result<GalleryLedger> {
    if let Some(t) = tolerance {
        if t.is_nan() || t <= 0.0 || t.is_infinite() {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {t}"
            )));
        }
    }
    let mut rows = Vec::new();
    for id in CaseId::ALL {
        rows.extend(run_case(&build(id), quad, tolerance)?);
    }
    Ok(GalleryLedger { rows })
}
