//! Dense statevector simulation of parameterized circuits.
//!
//! Amplitudes are stored in natural binary order with qubit 0 as the least
//! significant bit of the basis index. Rotations follow the usual
//! `R_P(angle) = exp(-i angle P / 2)` convention, and a rotation gate's angle
//! is `scale * params[param]`.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::Counts;
use crate::error::{Error, Result};
use crate::hamiltonian::DiagonalHamiltonian;
use crate::MAX_QUBITS;

/// Norm slack tolerated by [`Statevector::from_amplitudes`].
pub const STATE_NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::RX | GateKind::RY | GateKind::RZ)
    }

    pub fn is_two_qubit(self) -> bool {
        matches!(self, GateKind::CNOT | GateKind::CZ)
    }
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

/// A single gate. For `CZ` the `control` is simply the second qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub scale: f64,
}

impl Gate {
    pub fn h(target: usize) -> Self {
        Gate {
            kind: GateKind::H,
            target,
            control: None,
            param: None,
            scale: 1.0,
        }
    }

    pub fn rotation(kind: GateKind, target: usize, param: usize) -> Self {
        debug_assert!(kind.is_rotation());
        Gate {
            kind,
            target,
            control: None,
            param: Some(param),
            scale: 1.0,
        }
    }

    pub fn rx(target: usize, param: usize) -> Self {
        Self::rotation(GateKind::RX, target, param)
    }

    pub fn ry(target: usize, param: usize) -> Self {
        Self::rotation(GateKind::RY, target, param)
    }

    pub fn rz(target: usize, param: usize) -> Self {
        Self::rotation(GateKind::RZ, target, param)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::CNOT,
            target,
            control: Some(control),
            param: None,
            scale: 1.0,
        }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate {
            kind: GateKind::CZ,
            target: b,
            control: Some(a),
            param: None,
            scale: 1.0,
        }
    }

    /// Multiplies the parameter before it becomes the rotation angle.
    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    /// Rotation angle under `params`; 0 for fixed gates.
    pub fn angle(&self, params: &[f64]) -> f64 {
        self.param.map_or(0.0, |p| self.scale * params[p])
    }

    fn validate(&self, n_qubits: usize, n_params: usize) -> Result<()> {
        let in_range = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitOutOfRange { qubit: q, n_qubits })
            }
        };
        in_range(self.target)?;
        match (self.kind.is_two_qubit(), self.control) {
            (true, Some(c)) => {
                in_range(c)?;
                if c == self.target {
                    return Err(Error::InvalidGate(alloc::format!(
                        "{:?} with control equal to target {c}",
                        self.kind
                    )));
                }
            }
            (true, None) => {
                return Err(Error::InvalidGate(alloc::format!(
                    "{:?} needs a control qubit",
                    self.kind
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidGate(alloc::format!(
                    "{:?} takes no control qubit",
                    self.kind
                )))
            }
            (false, None) => {}
        }
        match (self.kind.is_rotation(), self.param) {
            (true, Some(p)) if p >= n_params => Err(Error::InvalidGate(alloc::format!(
                "parameter slot {p} out of range for {n_params} parameters"
            ))),
            (true, None) => Err(Error::InvalidGate("rotation without a parameter".into())),
            (false, Some(_)) => Err(Error::InvalidGate(alloc::format!(
                "{:?} cannot carry a parameter",
                self.kind
            ))),
            _ if !self.scale.is_finite() => Err(Error::InvalidGate("non-finite scale".into())),
            _ => Ok(()),
        }
    }
}

/// Parameterized circuit `U(theta)` with layer markers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct ParamCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    layer_boundaries: Vec<usize>,
}

#[derive(Deserialize)]
struct RawCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    layer_boundaries: Vec<usize>,
}

impl TryFrom<RawCircuit> for ParamCircuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        ParamCircuit::new(raw.n_qubits, raw.gates, raw.n_params, raw.layer_boundaries)
    }
}

impl ParamCircuit {
    /// Validates gate wiring, parameter usage (every slot used at least
    /// once) and layer markers (strictly increasing, starting at 0).
    pub fn new(
        n_qubits: usize,
        gates: Vec<Gate>,
        n_params: usize,
        layer_boundaries: Vec<usize>,
    ) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut used = alloc::vec![false; n_params];
        for g in &gates {
            g.validate(n_qubits, n_params)?;
            if let Some(p) = g.param {
                used[p] = true;
            }
        }
        if let Some(p) = used.iter().position(|u| !u) {
            return Err(Error::InvalidCircuit(alloc::format!(
                "parameter slot {p} is not used by any gate"
            )));
        }
        if let Some(&first) = layer_boundaries.first() {
            if first != 0 {
                return Err(Error::InvalidCircuit("first layer must start at gate 0".into()));
            }
        }
        if layer_boundaries.windows(2).any(|w| w[0] >= w[1])
            || layer_boundaries.iter().any(|&b| b > 0 && b >= gates.len())
        {
            return Err(Error::InvalidCircuit(
                "layer boundaries must be strictly increasing gate offsets".into(),
            ));
        }
        Ok(ParamCircuit {
            n_qubits,
            gates,
            n_params,
            layer_boundaries,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn layer_boundaries(&self) -> &[usize] {
        &self.layer_boundaries
    }

    pub fn n_layers(&self) -> usize {
        self.layer_boundaries.len()
    }

    pub fn layer_gates(&self, layer: usize) -> &[Gate] {
        let start = self.layer_boundaries[layer];
        let end = self
            .layer_boundaries
            .get(layer + 1)
            .copied()
            .unwrap_or(self.gates.len());
        &self.gates[start..end]
    }

    /// Sorted, distinct parameter slots used inside `layer`.
    pub fn layer_params(&self, layer: usize) -> Vec<usize> {
        let mut ps: Vec<usize> = self.layer_gates(layer).iter().filter_map(|g| g.param).collect();
        ps.sort_unstable();
        ps.dedup();
        ps
    }

    /// Indices of the gates driven by parameter `param`.
    pub fn occurrences(&self, param: usize) -> Vec<usize> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.param == Some(param))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Normalized `2^n` amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    /// Uniform superposition `|+...+>`.
    pub fn plus(n_qubits: usize) -> Result<Self> {
        let mut sv = Self::zero(n_qubits)?;
        let a = Complex64::new(1.0 / libm::sqrt((1usize << n_qubits) as f64), 0.0);
        sv.amps.iter_mut().for_each(|x| *x = a);
        Ok(sv)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut sv = Self::zero(n_qubits)?;
        if index >= sv.amps.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "basis index {index} out of range"
            )));
        }
        sv.amps[0] = Complex64::new(0.0, 0.0);
        sv.amps[index] = Complex64::new(1.0, 0.0);
        Ok(sv)
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n_qubits,
                max: MAX_QUBITS,
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if libm::fabs(norm_sqr - 1.0) > STATE_NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Statevector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`; 1 when equal up to global phase.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Applies `gate` with its angle taken from `params`.
    pub fn apply(&mut self, gate: &Gate, params: &[f64]) {
        self.apply_with_angle(gate, gate.angle(params));
    }

    fn apply_with_angle(&mut self, gate: &Gate, angle: f64) {
        let t = gate.target;
        match gate.kind {
            GateKind::H => {
                let s = core::f64::consts::FRAC_1_SQRT_2;
                let r = Complex64::new(s, 0.0);
                self.apply_1q(t, [[r, r], [r, -r]]);
            }
            GateKind::RX => {
                let (c, s) = half_angle(angle);
                let c = Complex64::new(c, 0.0);
                let m = Complex64::new(0.0, -s);
                self.apply_1q(t, [[c, m], [m, c]]);
            }
            GateKind::RY => {
                let (c, s) = half_angle(angle);
                let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
                self.apply_1q(t, [[c, -s], [s, c]]);
            }
            GateKind::RZ => {
                let (c, s) = half_angle(angle);
                let bit = 1 << t;
                let lo = Complex64::new(c, -s);
                let hi = Complex64::new(c, s);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { lo } else { hi };
                }
            }
            GateKind::CNOT => {
                let cbit = 1 << gate.control.expect("validated");
                let tbit = 1 << t;
                for i in 0..self.amps.len() {
                    if i & cbit != 0 && i & tbit == 0 {
                        self.amps.swap(i, i | tbit);
                    }
                }
            }
            GateKind::CZ => {
                let mask = (1 << gate.control.expect("validated")) | (1 << t);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *a = -*a;
                    }
                }
            }
        }
    }

    fn apply_1q(&mut self, target: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1 << target;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + bit {
                let j = i + bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
            base += 2 * bit;
        }
    }
}

fn half_angle(angle: f64) -> (f64, f64) {
    (libm::cos(angle / 2.0), libm::sin(angle / 2.0))
}

/// Runs `circuit` on `initial` (default `|0...0>`).
pub fn run_circuit(
    circuit: &ParamCircuit,
    params: &[f64],
    initial: Option<&Statevector>,
) -> Result<Statevector> {
    run_shifted(circuit, params, initial, None)
}

/// Like [`run_circuit`], with `delta` added to the angle of gate `shift.0`.
fn run_shifted(
    circuit: &ParamCircuit,
    params: &[f64],
    initial: Option<&Statevector>,
    shift: Option<(usize, f64)>,
) -> Result<Statevector> {
    if params.len() != circuit.n_params() {
        return Err(Error::LengthMismatch {
            expected: circuit.n_params(),
            actual: params.len(),
        });
    }
    let mut state = match initial {
        Some(s) if s.n_qubits() != circuit.n_qubits() => {
            return Err(Error::LengthMismatch {
                expected: circuit.n_qubits(),
                actual: s.n_qubits(),
            })
        }
        Some(s) => s.clone(),
        None => Statevector::zero(circuit.n_qubits())?,
    };
    for (i, g) in circuit.gates().iter().enumerate() {
        let mut angle = g.angle(params);
        if let Some((at, delta)) = shift {
            if at == i {
                angle += delta;
            }
        }
        state.apply_with_angle(g, angle);
    }
    Ok(state)
}

/// The RNG behind shot sampling: ChaCha8 seeded with `seed`, on stream
/// `stream`. Training uses the objective-evaluation counter as the stream.
pub fn shot_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `shots` independent measurements of every qubit.
pub fn sample(state: &Statevector, shots: u64, seed: u64) -> Counts {
    sample_with(state, shots, &mut shot_rng(seed, 0))
}

pub fn sample_with<R: Rng + ?Sized>(state: &Statevector, shots: u64, rng: &mut R) -> Counts {
    let mut cumulative = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cumulative.push(acc);
    }
    let last = cumulative.len() - 1;
    let mut counts = Counts::new(state.n_qubits);
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let idx = cumulative.partition_point(|&c| c <= u).min(last);
        counts.add(idx, 1).expect("index within register");
    }
    counts
}

/// Exact gradient of `<H>` with respect to parameter `index` via the
/// parameter-shift rule.
///
/// Every rotation generator has eigenvalues `+-1/2`, so each gate occurrence
/// contributes `scale * (E(angle + pi/2) - E(angle - pi/2)) / 2`. For a
/// parameter driving a single unit-scale gate this is exactly
/// `(E(theta + pi/2) - E(theta - pi/2)) / 2`.
pub fn param_shift_gradient(
    circuit: &ParamCircuit,
    h: &DiagonalHamiltonian,
    params: &[f64],
    index: usize,
) -> Result<f64> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: circuit.n_qubits(),
            actual: h.n_qubits(),
        });
    }
    if index >= circuit.n_params() {
        return Err(Error::IncompatibleParameter {
            index,
            reason: "no such parameter slot",
        });
    }
    let mut grad = 0.0;
    for gate_idx in circuit.occurrences(index) {
        let scale = circuit.gates()[gate_idx].scale;
        let plus = run_shifted(circuit, params, None, Some((gate_idx, FRAC_PI_2)))?;
        let minus = run_shifted(circuit, params, None, Some((gate_idx, -FRAC_PI_2)))?;
        let diff = h.expectation_exact(plus.amplitudes())? - h.expectation_exact(minus.amplitudes())?;
        grad += scale * diff / 2.0;
    }
    Ok(grad)
}
