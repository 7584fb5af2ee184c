//! Density-matrix simulation of the measurement-reversal circuits, with shot sampling
//! and a simple noise model.
//!
//! Qubit 0 is the most significant tensor factor. Measurements write their outcome
//! coherently into a register qubit that starts in `|0>`, so the whole run is a single
//! CPTP evolution and shots are drawn from the exact final distribution.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qmat::{self, c64, partial_trace, CMatrix, C64};
use crate::qstate::{seeded_rng, DensityOperator};

/// Identifier of the pseudo-random generator used for shot sampling.
pub const RNG_ID: &str = "chacha8";

pub const TRACE_TOL: f64 = 1e-12;

/// Largest register the simulator accepts; the density matrix is `4^n` entries.
pub const MAX_QUBITS: usize = 10;

const PROB_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
}

impl Gate {
    pub fn matrix(self) -> CMatrix {
        let s = FRAC_1_SQRT_2;
        let m = |a: [C64; 4]| CMatrix::new(2, 2, a.to_vec()).expect("2x2 gate");
        let (o, l, i) = (c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0));
        match self {
            Gate::H => m([c64(s, 0.0), c64(s, 0.0), c64(s, 0.0), c64(-s, 0.0)]),
            Gate::X => m([o, l, l, o]),
            Gate::Y => m([o, -i, i, o]),
            Gate::Z => m([l, o, o, -l]),
            Gate::S => m([l, o, o, i]),
            Gate::Sdg => m([l, o, o, -i]),
            Gate::T => m([l, o, o, c64(s, s)]),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::T => "t",
        }
    }
}

/// Single-qubit measurement basis. `YConj` measures the complex conjugate of Pauli Y,
/// whose `+1` eigenvector (outcome 0) is `|-y>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    X,
    Y,
    YConj,
    Z,
}

impl Basis {
    /// Eigenvectors for outcomes 0 and 1.
    pub fn vectors(self) -> [Vec<C64>; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Basis::Z => [
                vec![c64(1.0, 0.0), c64(0.0, 0.0)],
                vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            ],
            Basis::X => [
                vec![c64(s, 0.0), c64(s, 0.0)],
                vec![c64(s, 0.0), c64(-s, 0.0)],
            ],
            Basis::Y => [
                vec![c64(s, 0.0), c64(0.0, s)],
                vec![c64(s, 0.0), c64(0.0, -s)],
            ],
            Basis::YConj => [
                vec![c64(s, 0.0), c64(0.0, -s)],
                vec![c64(s, 0.0), c64(0.0, s)],
            ],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Basis::X => "X",
            Basis::Y => "Y",
            Basis::YConj => "Y*",
            Basis::Z => "Z",
        }
    }
}

/// Recovery channels available as circuit elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecoveryMap {
    /// Qubits `[register, output]`: CNOT register -> output, then H on output.
    XEigen,
    /// Qubits `[register, b, output]`: CNOT b -> output, then CZ(register, b).
    /// The register is discarded afterwards by ignoring it.
    MaxEntangled,
}

impl RecoveryMap {
    pub fn as_str(self) -> &'static str {
        match self {
            RecoveryMap::XEigen => "x_eigen",
            RecoveryMap::MaxEntangled => "max_entangled",
        }
    }

    fn arity(self) -> usize {
        match self {
            RecoveryMap::XEigen => 2,
            RecoveryMap::MaxEntangled => 3,
        }
    }

    fn expand(self, q: &[usize]) -> Vec<Op> {
        match self {
            RecoveryMap::XEigen => vec![
                Op::gate(Gate::X, &[q[1]], &[q[0]]),
                Op::gate(Gate::H, &[q[1]], &[]),
            ],
            RecoveryMap::MaxEntangled => vec![
                Op::gate(Gate::X, &[q[2]], &[q[1]]),
                Op::gate(Gate::Z, &[q[1]], &[q[0]]),
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    /// Applies `gate` to each target, conditioned on all controls being `|1>`.
    Gate {
        gate: Gate,
        targets: Vec<usize>,
        controls: Vec<usize>,
    },
    /// Projective measurement of `target` in `basis`; the outcome is XORed into `register`.
    Measure {
        target: usize,
        basis: Basis,
        register: usize,
    },
    Recovery {
        map: RecoveryMap,
        qubits: Vec<usize>,
    },
}

impl Op {
    pub fn gate(gate: Gate, targets: &[usize], controls: &[usize]) -> Self {
        Op::Gate {
            gate,
            targets: targets.to_vec(),
            controls: controls.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self {
            qubits,
            ops: Vec::new(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn push(&mut self, op: Op) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn gate(&mut self, gate: Gate, targets: &[usize], controls: &[usize]) -> &mut Self {
        self.push(Op::gate(gate, targets, controls))
    }

    pub fn measure(&mut self, target: usize, basis: Basis, register: usize) -> &mut Self {
        self.push(Op::Measure {
            target,
            basis,
            register,
        })
    }

    pub fn recovery(&mut self, map: RecoveryMap, qubits: &[usize]) -> &mut Self {
        self.push(Op::Recovery {
            map,
            qubits: qubits.to_vec(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.qubits > MAX_QUBITS {
            return Err(Error::InvalidCircuit(format!(
                "qubit count {} not in 1..={MAX_QUBITS}",
                self.qubits
            )));
        }
        let in_range = |q: usize| {
            if q < self.qubits {
                Ok(())
            } else {
                Err(Error::InvalidCircuit(format!(
                    "qubit {q} out of range for {} qubits",
                    self.qubits
                )))
            }
        };
        let mut written = vec![false; self.qubits];
        for op in &self.ops {
            match op {
                Op::Gate {
                    targets, controls, ..
                } => {
                    if targets.is_empty() {
                        return Err(Error::InvalidCircuit("gate without targets".into()));
                    }
                    let all: Vec<usize> = targets.iter().chain(controls).copied().collect();
                    for (i, &q) in all.iter().enumerate() {
                        in_range(q)?;
                        if all[..i].contains(&q) {
                            return Err(Error::InvalidCircuit(format!(
                                "qubit {q} used twice in one gate"
                            )));
                        }
                    }
                }
                Op::Measure {
                    target, register, ..
                } => {
                    in_range(*target)?;
                    in_range(*register)?;
                    if target == register {
                        return Err(Error::InvalidCircuit(format!(
                            "qubit {target} cannot record its own outcome"
                        )));
                    }
                    if written[*register] {
                        return Err(Error::InvalidCircuit(format!(
                            "register {register} written twice"
                        )));
                    }
                    written[*register] = true;
                }
                Op::Recovery { map, qubits } => {
                    if qubits.len() != map.arity() {
                        return Err(Error::InvalidCircuit(format!(
                            "recovery {} takes {} qubits, got {}",
                            map.as_str(),
                            map.arity(),
                            qubits.len()
                        )));
                    }
                    for (i, &q) in qubits.iter().enumerate() {
                        in_range(q)?;
                        if qubits[..i].contains(&q) {
                            return Err(Error::InvalidCircuit(format!(
                                "qubit {q} used twice in recovery"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseSpec {
    /// Depolarizing probability applied to every qubit a gate touches, after the gate.
    pub depolarizing_p: f64,
    /// Probability that a recorded measurement bit is flipped.
    pub readout_flip: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn new(depolarizing_p: f64, readout_flip: f64) -> Result<Self> {
        let n = Self {
            depolarizing_p,
            readout_flip,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("depolarizing", self.depolarizing_p),
            ("readout", self.readout_flip),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} probability {p} not in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_p == 0.0 && self.readout_flip == 0.0
    }
}

/// Density matrix of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Register {
    n: usize,
    rho: CMatrix,
}

impl Register {
    pub fn zero(n: usize) -> Self {
        let dim = 1 << n;
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(0, 0)] = c64(1.0, 0.0);
        Self { n, rho }
    }

    pub fn from_matrix(n: usize, rho: CMatrix) -> Result<Self> {
        let dim = 1usize << n;
        if !rho.is_square() || rho.rows() != dim {
            return Err(Error::DimensionMismatch {
                context: "qubit register",
                expected: dim,
                found: rho.rows(),
            });
        }
        Ok(Self { n, rho })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    fn bit(&self, index: usize, q: usize) -> usize {
        (index >> (self.n - 1 - q)) & 1
    }

    /// Full-register unitary of a (multi-)controlled single-qubit gate.
    fn controlled(&self, g: &CMatrix, target: usize, controls: &[usize]) -> CMatrix {
        let dim = 1 << self.n;
        let tmask = 1 << (self.n - 1 - target);
        CMatrix::from_fn(dim, dim, |i, j| {
            let active = controls.iter().all(|&c| self.bit(j, c) == 1);
            if !active {
                return if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) };
            }
            if i & !tmask != j & !tmask {
                return c64(0.0, 0.0);
            }
            g[(self.bit(i, target), self.bit(j, target))]
        })
    }

    pub fn apply_gate(&mut self, gate: Gate, target: usize, controls: &[usize]) -> Result<()> {
        self.check_qubit(target)?;
        for &c in controls {
            self.check_qubit(c)?;
        }
        let u = self.controlled(&gate.matrix(), target, controls);
        self.rho = u.sandwich(&self.rho);
        Ok(())
    }

    /// `rho -> sum_k K_k rho K_k^dagger` for full-register Kraus operators.
    pub fn apply_channel(&mut self, kraus: &[CMatrix]) -> Result<()> {
        let dim = self.rho.rows();
        let mut out = CMatrix::zeros(dim, dim);
        for k in kraus {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::DimensionMismatch {
                    context: "register channel",
                    expected: dim,
                    found: k.rows(),
                });
            }
            out = &out + &k.sandwich(&self.rho);
        }
        self.rho = out;
        Ok(())
    }

    pub fn depolarize(&mut self, q: usize, p: f64) -> Result<()> {
        self.check_qubit(q)?;
        if p == 0.0 {
            return Ok(());
        }
        let dims = vec![2; self.n];
        let mut kraus = vec![CMatrix::identity(1 << self.n).scale_re(libm::sqrt(1.0 - 0.75 * p))];
        for g in [Gate::X, Gate::Y, Gate::Z] {
            kraus.push(qmat::embed(&g.matrix(), &dims, q).scale_re(libm::sqrt(p / 4.0)));
        }
        self.apply_channel(&kraus)
    }

    pub fn bit_flip(&mut self, q: usize, p: f64) -> Result<()> {
        self.check_qubit(q)?;
        if p == 0.0 {
            return Ok(());
        }
        let dims = vec![2; self.n];
        let kraus = [
            CMatrix::identity(1 << self.n).scale_re(libm::sqrt(1.0 - p)),
            qmat::embed(&Gate::X.matrix(), &dims, q).scale_re(libm::sqrt(p)),
        ];
        self.apply_channel(&kraus)
    }

    /// Kraus operators `P_m ⊗ X^m`: project `target`, flip `register` on outcome 1.
    pub fn measure_into(&mut self, target: usize, basis: Basis, register: usize) -> Result<()> {
        self.check_qubit(target)?;
        self.check_qubit(register)?;
        let dims = vec![2; self.n];
        let flip = qmat::embed(&Gate::X.matrix(), &dims, register);
        let kraus: Vec<CMatrix> = basis
            .vectors()
            .iter()
            .enumerate()
            .map(|(m, v)| {
                let p = qmat::embed(&CMatrix::projector(v), &dims, target);
                if m == 1 {
                    flip.matmul(&p)
                } else {
                    p
                }
            })
            .collect();
        self.apply_channel(&kraus)
    }

    pub fn reduce(&self, keep: &[usize]) -> Result<CMatrix> {
        for &q in keep {
            self.check_qubit(q)?;
        }
        partial_trace(&self.rho, &vec![2; self.n], keep)
    }

    pub fn trace_error(&self) -> f64 {
        (self.rho.trace().re - 1.0).abs()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context: "qubit index",
                expected: self.n,
                found: q,
            })
        }
    }
}

/// Runs `circuit` from `|0...0>` and returns the final register state.
pub fn simulate(circuit: &Circuit, noise: &NoiseSpec) -> Result<Register> {
    circuit.validate()?;
    noise.validate()?;
    let mut reg = Register::zero(circuit.qubit_count());
    for op in circuit.ops() {
        apply_op(&mut reg, op, noise)?;
    }
    Ok(reg)
}

fn apply_op(reg: &mut Register, op: &Op, noise: &NoiseSpec) -> Result<()> {
    match op {
        Op::Gate {
            gate,
            targets,
            controls,
        } => {
            for &t in targets {
                reg.apply_gate(*gate, t, controls)?;
            }
            for &q in targets.iter().chain(controls) {
                reg.depolarize(q, noise.depolarizing_p)?;
            }
        }
        Op::Measure {
            target,
            basis,
            register,
        } => {
            reg.measure_into(*target, *basis, *register)?;
            reg.bit_flip(*register, noise.readout_flip)?;
        }
        Op::Recovery { map, qubits } => {
            for step in map.expand(qubits) {
                apply_op(reg, &step, noise)?;
            }
        }
    }
    Ok(())
}

/// Outcome distribution of measuring `qubits` of `rho` in the given bases, with each
/// recorded bit flipped independently with probability `readout_flip`.
/// Outcome strings list the measured qubits in order, `0` for the first eigenvector.
pub fn outcome_distribution(
    reg: &Register,
    qubits: &[usize],
    bases: &[Basis],
    readout_flip: f64,
) -> Result<Vec<f64>> {
    if qubits.len() != bases.len() || qubits.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "measurement bases",
            expected: qubits.len(),
            found: bases.len(),
        });
    }
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    let reduced = reg.reduce(&sorted)?;
    // partial_trace keeps the original order, so permute the bases to match
    let order: Vec<usize> = sorted
        .iter()
        .map(|q| qubits.iter().position(|p| p == q).expect("same set"))
        .collect();
    let k = qubits.len();
    let count = 1 << k;
    let mut probs = vec![0.0; count];
    for (outcome, slot) in probs.iter_mut().enumerate() {
        let mut v = vec![c64(1.0, 0.0)];
        for &pos in &order {
            let bit = (outcome >> (k - 1 - pos)) & 1;
            v = qmat::tensor_vec(&v, &bases[pos].vectors()[bit]);
        }
        let p = CMatrix::bra(&v).matmul(&reduced).matmul(&CMatrix::ket(&v))[(0, 0)].re;
        *slot = if p < PROB_FLOOR { 0.0 } else { p };
    }
    if readout_flip > 0.0 {
        let mut flipped = vec![0.0; count];
        for (m, &p) in probs.iter().enumerate() {
            for (r, slot) in flipped.iter_mut().enumerate() {
                let flips = (m ^ r).count_ones() as i32;
                *slot += p
                    * libm::pow(readout_flip, flips as f64)
                    * libm::pow(1.0 - readout_flip, (k as i32 - flips) as f64);
            }
        }
        probs = flipped;
    }
    let total: f64 = probs.iter().sum();
    Ok(probs.iter().map(|p| p / total).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShotTable {
    /// Which observable was measured, e.g. `"X"` or `"Y⊗Y*"`.
    pub label: String,
    pub outcomes: Vec<String>,
    pub counts: Vec<u64>,
    pub shots: u64,
}

impl ShotTable {
    pub fn new(label: &str, outcomes: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        if outcomes.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                context: "shot table",
                expected: outcomes.len(),
                found: counts.len(),
            });
        }
        let shots = counts.iter().sum();
        Ok(Self {
            label: label.to_string(),
            outcomes,
            counts,
            shots,
        })
    }

    /// Draws `shots` outcomes from `probs` (indexed like `outcomes`).
    pub fn sample(
        label: &str,
        outcomes: Vec<String>,
        probs: &[f64],
        shots: u64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in probs {
            acc += p;
            cumulative.push(acc);
        }
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut counts = vec![0u64; probs.len()];
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let i = cumulative.iter().position(|&c| u < c).unwrap_or(last);
            counts[i] += 1;
        }
        Self::new(label, outcomes, counts)
    }

    pub fn count(&self, outcome: &str) -> u64 {
        self.outcomes
            .iter()
            .position(|o| o == outcome)
            .map_or(0, |i| self.counts[i])
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.count(outcome) as f64 / self.shots as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }

    /// `sqrt(p(1-p)/shots)` with the empirical frequency `p`.
    pub fn stderr(&self, outcome: &str) -> f64 {
        binomial_stderr(self.frequency(outcome), self.shots)
    }

    pub fn stderrs(&self) -> Vec<f64> {
        self.frequencies()
            .iter()
            .map(|&p| binomial_stderr(p, self.shots))
            .collect()
    }
}

pub fn binomial_stderr(p: f64, shots: u64) -> f64 {
    libm::sqrt((p * (1.0 - p)).max(0.0) / shots as f64)
}

/// Bloch vector estimate: `p(0) - p(1)` per axis from X, Y and Z tables.
pub fn bloch_tomography(x: &ShotTable, y: &ShotTable, z: &ShotTable) -> Result<[f64; 3]> {
    for t in [y, z] {
        if t.shots != x.shots {
            return Err(Error::MismatchedShots {
                expected: x.shots,
                found: t.shots,
            });
        }
    }
    let axis = |t: &ShotTable| (t.frequency("0") - t.frequency("1")).clamp(-1.0, 1.0);
    Ok([axis(x), axis(y), axis(z)])
}

/// Bloch vector of a qubit density matrix.
pub fn bloch_vector(rho: &CMatrix) -> [f64; 3] {
    [
        2.0 * rho[(0, 1)].re,
        -2.0 * rho[(0, 1)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ]
}

/// Qubit roles in the experiment circuits.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentLayout {
    pub circuit: Circuit,
    /// Qubits holding the recovered state (`A'`, or `A'B` for the entangled runs).
    pub output: Vec<usize>,
    /// Final measurement settings: label and per-output-qubit bases.
    pub readouts: Vec<(String, Vec<Basis>)>,
    /// Noiseless target state of the output qubits.
    pub ideal_output: CMatrix,
}

pub fn experiment_layout(id: u8) -> Result<ExperimentLayout> {
    if !(1..=6).contains(&id) {
        return Err(Error::InvalidExperiment(id));
    }
    let mut c;
    let output;
    let readouts: Vec<(String, Vec<Basis>)>;
    let ideal_output;
    if id <= 4 {
        // A = 0, Z register = 1, X register = 2, A' = 3
        c = Circuit::new(4);
        c.gate(Gate::H, &[0], &[]);
        if id >= 3 {
            c.gate(Gate::S, &[0], &[]);
        }
        if id.is_multiple_of(2) {
            c.measure(0, Basis::Z, 1);
        }
        c.measure(0, Basis::X, 2);
        c.recovery(RecoveryMap::XEigen, &[2, 3]);
        output = vec![3];
        readouts = [Basis::X, Basis::Y, Basis::Z]
            .iter()
            .map(|&b| (b.as_str().to_string(), vec![b]))
            .collect();
        ideal_output = if id == 1 {
            CMatrix::projector(&Basis::X.vectors()[0])
        } else {
            CMatrix::identity(2).scale_re(0.5)
        };
    } else {
        // A = 0, B = 1, Z register = 2, X register = 3, A' = 4
        c = Circuit::new(5);
        c.gate(Gate::H, &[0], &[]);
        c.gate(Gate::X, &[1], &[0]);
        if id == 6 {
            c.measure(0, Basis::Z, 2);
        }
        c.measure(0, Basis::X, 3);
        c.recovery(RecoveryMap::MaxEntangled, &[3, 1, 4]);
        output = vec![4, 1];
        readouts = vec![
            ("X⊗X".into(), vec![Basis::X, Basis::X]),
            ("Y⊗Y*".into(), vec![Basis::Y, Basis::YConj]),
            ("Z⊗Z".into(), vec![Basis::Z, Basis::Z]),
        ];
        let s = FRAC_1_SQRT_2;
        let zero = c64(0.0, 0.0);
        ideal_output = if id == 5 {
            CMatrix::projector(&[c64(s, 0.0), zero, zero, c64(s, 0.0)])
        } else {
            CMatrix::from_real_diag(&[0.5, 0.0, 0.0, 0.5])
        };
    }
    Ok(ExperimentLayout {
        circuit: c,
        output,
        readouts,
        ideal_output,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub id: u8,
    pub shots: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub noise: NoiseSpec,
    pub tables: Vec<ShotTable>,
    /// Exact outcome probabilities behind each table, in the same order.
    pub probabilities: Vec<Vec<f64>>,
    /// Bloch estimate from the tables (single-qubit outputs only).
    pub bloch: Option<[f64; 3]>,
    /// Exact state of the output qubits under the chosen noise.
    pub output_state: DensityOperator,
    pub ideal_output: DensityOperator,
}

impl ExperimentResult {
    pub fn table(&self, label: &str) -> Option<&ShotTable> {
        self.tables.iter().find(|t| t.label == label)
    }

    pub fn exact_fidelity(&self) -> Result<f64> {
        self.output_state.fidelity(&self.ideal_output)
    }

    /// Sampled fidelity with the ideal output and its standard error, for the
    /// experiments whose ideal output is pure (1 and 5).
    pub fn estimated_fidelity(&self) -> Option<(f64, f64)> {
        match self.id {
            1 => {
                let t = self.table("X")?;
                Some((t.frequency("0"), t.stderr("0")))
            }
            5 => {
                // <Φ|ρ|Φ> = (1 + <XX> + <Y Y*> + <ZZ>) / 4, each correlator 2 p_same - 1
                let mut sum = 0.0;
                let mut var = 0.0;
                for t in &self.tables {
                    let p = t.frequency("00") + t.frequency("11");
                    sum += p;
                    var += p * (1.0 - p) / t.shots as f64;
                }
                Some(((sum - 1.0) / 2.0, libm::sqrt(var) / 2.0))
            }
            _ => None,
        }
    }
}

fn outcome_labels(k: usize) -> Vec<String> {
    (0..1usize << k)
        .map(|m| {
            (0..k)
                .map(|b| {
                    if (m >> (k - 1 - b)) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    }
                })
                .collect()
        })
        .collect()
}

/// Simulates experiment `id` (1-6), then samples `shots` outcomes for every readout.
pub fn run_experiment(
    id: u8,
    shots: u64,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<ExperimentResult> {
    let layout = experiment_layout(id)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let reg = simulate(&layout.circuit, noise)?;
    if reg.trace_error() > TRACE_TOL {
        return Err(Error::NotNormalized {
            trace: reg.matrix().trace().re,
        });
    }
    let mut rng = seeded_rng(seed);
    let k = layout.output.len();
    let mut tables = Vec::new();
    let mut probabilities = Vec::new();
    for (label, bases) in &layout.readouts {
        let probs = outcome_distribution(&reg, &layout.output, bases, noise.readout_flip)?;
        tables.push(ShotTable::sample(
            label,
            outcome_labels(k),
            &probs,
            shots,
            &mut rng,
        )?);
        probabilities.push(probs);
    }
    let bloch = if k == 1 {
        Some(bloch_tomography(&tables[0], &tables[1], &tables[2])?)
    } else {
        None
    };
    let (dims, labels): (Vec<usize>, Vec<&str>) = if k == 1 {
        (vec![2], vec!["A'"])
    } else {
        (vec![2, 2], vec!["A'", "B"])
    };
    let output_matrix = output_state(&reg, &layout.output)?;
    Ok(ExperimentResult {
        id,
        shots,
        seed,
        rng: RNG_ID,
        noise: *noise,
        tables,
        probabilities,
        bloch,
        output_state: DensityOperator::with_tolerance(output_matrix, &dims, &labels, 1e-9)?,
        ideal_output: DensityOperator::new(layout.ideal_output, &dims, &labels)?,
    })
}

/// Reduced state on `qubits` in the listed order (at most two qubits).
fn output_state(reg: &Register, qubits: &[usize]) -> Result<CMatrix> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    let m = reg.reduce(&sorted)?;
    if sorted == qubits {
        return Ok(m);
    }
    // two qubits in swapped order
    let swap = |i: usize| ((i & 1) << 1) | (i >> 1);
    Ok(CMatrix::from_fn(4, 4, |i, j| m[(swap(i), swap(j))]))
}
