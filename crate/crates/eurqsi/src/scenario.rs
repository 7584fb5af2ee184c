//! JSON scenario files: a state on `A ⊗ B (⊗ E)` plus the two measurements on `A`.
//!
//! ```json
//! {
//!   "name": "max_uncertainty",
//!   "dims": [2, 2],
//!   "state": [[[0.25, 0], [0, -0.25], 0, 0], ...],
//!   "x_pvm": "pauli_x",
//!   "z_pvm": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs or bare reals. A state may be given as a
//! density matrix (`state`) or as a ket (`ket`). A measurement is either a named
//! basis or a list of projector matrices.

use std::path::Path;

use eurqsi_core::eur::RelationId;
use eurqsi_core::qmat::{c64, CMatrix, C64};
use eurqsi_core::qstate::{DensityOperator, Pvm};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Complex {
    Pair([f64; 2]),
    Real(f64),
}

impl Complex {
    fn value(self) -> C64 {
        match self {
            Complex::Pair([re, im]) => c64(re, im),
            Complex::Real(re) => c64(re, 0.0),
        }
    }
}

pub type Rows = Vec<Vec<Complex>>;

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PvmSpec {
    Named(String),
    Projectors(Vec<Rows>),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    /// `"bipartite"` (default) or `"tripartite"`.
    #[serde(default)]
    pub relation: Option<String>,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub state: Option<Rows>,
    #[serde(default)]
    pub ket: Option<Vec<Complex>>,
    pub x_pvm: PvmSpec,
    pub z_pvm: PvmSpec,
    /// Purify a mixed input for the tripartite relation instead of rejecting it.
    #[serde(default)]
    pub purify: bool,
}

/// A validated scenario, ready for the checkers.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    pub relation: RelationId,
    pub rho: DensityOperator,
    pub x_pvm: Pvm,
    pub z_pvm: Pvm,
    pub purify: bool,
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("scenario JSON: {e}")))
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

fn matrix(rows: &Rows, what: &str) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::Validation(format!(
            "{what}: row {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }
    let data = rows.iter().flatten().map(|c| c.value()).collect();
    CMatrix::new(n, n, data).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

fn pvm(spec: &PvmSpec, dim: usize, what: &str) -> Result<Pvm, CliError> {
    let p = match spec {
        PvmSpec::Named(name) => match name.as_str() {
            "pauli_x" => Pvm::pauli_x(),
            "pauli_y" => Pvm::pauli_y(),
            "pauli_z" => Pvm::pauli_z(),
            "computational" => Pvm::computational(dim),
            "fourier" => Pvm::fourier(dim),
            other => {
                return Err(CliError::Validation(format!(
                    "{what}: unknown basis {other:?} (expected pauli_x, pauli_y, pauli_z, computational or fourier)"
                )))
            }
        },
        PvmSpec::Projectors(list) => {
            let projectors = list
                .iter()
                .enumerate()
                .map(|(i, rows)| matrix(rows, &format!("{what} projector {i}")))
                .collect::<Result<Vec<_>, _>>()?;
            Pvm::new(projectors).map_err(|e| CliError::Validation(format!("{what}: {e}")))?
        }
    };
    if p.dim() != dim {
        return Err(CliError::Validation(format!(
            "{what}: acts on dimension {}, but subsystem A has dimension {dim}",
            p.dim()
        )));
    }
    Ok(p)
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "A".to_string(),
            1 => "B".to_string(),
            2 => "E".to_string(),
            k => format!("E{}", k - 1),
        })
        .collect()
}

impl Scenario {
    pub fn validate(&self, relation_override: Option<RelationId>) -> Result<Problem, CliError> {
        let relation = match (relation_override, &self.relation) {
            (Some(r), _) => r,
            (None, None) => RelationId::BipartiteRefined,
            (None, Some(s)) => RelationId::parse(s)
                .ok_or_else(|| CliError::Validation(format!("relation: unknown relation {s:?}")))?,
        }
        .refined();
        let need = if relation.is_tripartite() { 3 } else { 2 };
        if self.dims.len() < need || (!relation.is_tripartite() && self.dims.len() != 2) {
            return Err(CliError::Validation(format!(
                "dims: relation {} needs {} subsystems, got {}",
                relation,
                if relation.is_tripartite() {
                    "at least 3"
                } else {
                    "exactly 2"
                },
                self.dims.len()
            )));
        }
        if self.dims.contains(&0) {
            return Err(CliError::Validation(
                "dims: every dimension must be positive".into(),
            ));
        }
        let labels = match &self.labels {
            Some(l) if l.len() != self.dims.len() => {
                return Err(CliError::Validation(format!(
                    "labels: {} labels for {} subsystems",
                    l.len(),
                    self.dims.len()
                )))
            }
            Some(l) => l.clone(),
            None => default_labels(self.dims.len()),
        };
        let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let m = match (&self.state, &self.ket) {
            (Some(rows), None) => matrix(rows, "state")?,
            (None, Some(ket)) => {
                let v: Vec<C64> = ket.iter().map(|c| c.value()).collect();
                CMatrix::projector(&v)
            }
            _ => {
                return Err(CliError::Validation(
                    "state: give exactly one of \"state\" or \"ket\"".into(),
                ))
            }
        };
        let rho = DensityOperator::new(m, &self.dims, &label_refs)
            .map_err(|e| CliError::Validation(format!("state: {e}")))?;
        let x_pvm = pvm(&self.x_pvm, self.dims[0], "x_pvm")?;
        let z_pvm = pvm(&self.z_pvm, self.dims[0], "z_pvm")?;
        Ok(Problem {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            relation,
            rho,
            x_pvm,
            z_pvm,
            purify: self.purify,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLUS_Y: &str = r#"{
        "name": "max_uncertainty",
        "dims": [2, 2],
        "state": [[[0.25, 0], 0, [0, -0.25], 0],
                  [0, [0.25, 0], 0, [0, -0.25]],
                  [[0, 0.25], 0, 0.25, 0],
                  [0, [0, 0.25], 0, 0.25]],
        "x_pvm": "pauli_x",
        "z_pvm": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]
    }"#;

    #[test]
    fn parses_and_validates() {
        let p = parse(PLUS_Y).unwrap().validate(None).unwrap();
        assert_eq!(p.relation, RelationId::BipartiteRefined);
        assert_eq!(p.rho.dims(), &[2, 2]);
        assert_eq!(p.name, "max_uncertainty");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse("{\"dims\": [2, 2],\n \"state\": [[1, 0]").unwrap_err();
        match err {
            CliError::Parse(msg) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_projective_measurement_is_rejected() {
        let text = PLUS_Y.replace(
            r#""z_pvm": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]"#,
            r#""z_pvm": [[[0.5, 0], [0, 0]], [[0, 0], [0, 1]]]"#,
        );
        let err = parse(&text).unwrap().validate(None).unwrap_err();
        match err {
            CliError::Validation(msg) => assert!(msg.contains("z_pvm"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ket_and_state_are_exclusive() {
        let text = r#"{"dims": [2, 2], "x_pvm": "pauli_x", "z_pvm": "pauli_z"}"#;
        assert!(matches!(
            parse(text).unwrap().validate(None),
            Err(CliError::Validation(_))
        ));
    }

    #[test]
    fn tripartite_needs_three_subsystems() {
        let p = parse(PLUS_Y).unwrap();
        assert!(p.validate(Some(RelationId::Tripartite)).is_err());
        let text = r#"{"dims": [2, 2, 2], "relation": "tripartite",
            "ket": [0.5, 0, 0, 0.5, 0, 0.5, 0.5, 0],
            "x_pvm": "pauli_x", "z_pvm": "pauli_z"}"#;
        let p = parse(text).unwrap().validate(None).unwrap();
        assert_eq!(p.relation, RelationId::TripartiteRefined);
        assert_eq!(p.rho.labels().collect::<Vec<_>>(), ["A", "B", "E"]);
    }
}
