//! Dense statevector simulation with mid-circuit measurement.
//!
//! The simulator is deliberately small: registers of up to [`MAX_QUBITS`]
//! qubits, a handful of gates ([`GateOp`]), projective measurement of single
//! qubits with renormalization, and inner products for fidelity checks.
//! Qubit 0 is the most significant bit of the amplitude index.
//!
//! `RotX(angle)` denotes the full-angle convention `e^{-i * angle * X}`, so
//! `RotX(pi/4)` is the Clifford `e^{-i pi X / 4}` that undoes a gearbox
//! failure branch.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::error::Error;
use crate::Result;

/// Largest register the simulator accepts (dense amplitudes, 2^14 entries).
pub const MAX_QUBITS: usize = 14;

/// Measurement branches below this probability are treated as impossible:
/// renormalizing them would amplify roundoff into the computed state.
pub const BRANCH_CUTOFF: f64 = 1e-15;

/// Gates understood by the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    /// `e^{-i * angle * X}` on one qubit (full-angle convention).
    RotX { qubit: usize, angle: f64 },
    /// Hadamard on one qubit.
    Hadamard { qubit: usize },
    /// Pauli Z on one qubit.
    PauliZ { qubit: usize },
    /// Controlled NOT.
    CNot { control: usize, target: usize },
    /// `(i)^phase_exponent * X` on `target`, applied when every control is 1.
    ///
    /// `phase_exponent` is reduced mod 4; exponent 3 gives the `-iX` used by
    /// gearbox circuits, exponent `k-1` the phase of a `k`-input PAR circuit.
    MultiControlledIX {
        controls: Vec<usize>,
        target: usize,
        phase_exponent: u8,
    },
}

/// A pure state on `n_qubits` qubits; amplitude index bit `n_qubits-1-q`
/// holds qubit `q` (qubit 0 = most significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Creates the all-zeros computational basis state on `n_qubits` qubits.
pub fn new_state(n_qubits: usize) -> Result<StateVector> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::RegisterTooLarge { requested: n_qubits, max: MAX_QUBITS });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { n_qubits, amps })
}

impl StateVector {
    /// Builds a state from explicit amplitudes (length must be a power of
    /// two); the caller is responsible for normalization.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<StateVector> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::RegisterTooLarge { requested: len, max: 1 << MAX_QUBITS });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge { requested: n_qubits, max: MAX_QUBITS });
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Number of qubits in the register.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Raw amplitudes, indexed with qubit 0 as the most significant bit.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn bit(&self, qubit: usize) -> usize {
        self.n_qubits - 1 - qubit
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Applies a 2x2 matrix `[[a, b], [c, d]]` to one qubit.
    fn apply_single(&mut self, qubit: usize, m: [Complex64; 4]) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << self.bit(qubit);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[j] = m[2] * a0 + m[3] * a1;
            }
        }
        Ok(())
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        match gate {
            GateOp::RotX { qubit, angle } => {
                let (c, s) = (angle.cos(), angle.sin());
                self.apply_single(
                    *qubit,
                    [
                        Complex64::new(c, 0.0),
                        Complex64::new(0.0, -s),
                        Complex64::new(0.0, -s),
                        Complex64::new(c, 0.0),
                    ],
                )
            }
            GateOp::Hadamard { qubit } => {
                let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(*qubit, [h, h, h, -h])
            }
            GateOp::PauliZ { qubit } => {
                let one = Complex64::new(1.0, 0.0);
                self.apply_single(*qubit, [one, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), -one])
            }
            GateOp::CNot { control, target } => {
                self.apply_gate(&GateOp::MultiControlledIX {
                    controls: vec![*control],
                    target: *target,
                    phase_exponent: 0,
                })
            }
            GateOp::MultiControlledIX { controls, target, phase_exponent } => {
                self.check_qubit(*target)?;
                let mut cmask = 0usize;
                for &c in controls {
                    self.check_qubit(c)?;
                    if c == *target {
                        return Err(Error::QubitOutOfRange { qubit: c, n_qubits: self.n_qubits });
                    }
                    cmask |= 1 << self.bit(c);
                }
                let tmask = 1usize << self.bit(*target);
                let phase = match phase_exponent % 4 {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                };
                for i in 0..self.amps.len() {
                    if i & cmask == cmask && i & tmask == 0 {
                        let j = i | tmask;
                        let a0 = self.amps[i];
                        let a1 = self.amps[j];
                        self.amps[i] = phase * a1;
                        self.amps[j] = phase * a0;
                    }
                }
                Ok(())
            }
        }
    }

    /// Inverse GHZ basis change on the listed qubits: CNOTs from
    /// `qubits[0]` onto each later qubit, then Hadamard on `qubits[0]`.
    /// Maps `(|0..0> + |1..1>)/sqrt(2)` to `|0..0>` and
    /// `(|0..0> - |1..1>)/sqrt(2)` to `|10..0>`.
    pub fn apply_ghz_inverse(&mut self, qubits: &[usize]) -> Result<()> {
        let first = *qubits.first().ok_or(Error::QubitOutOfRange {
            qubit: 0,
            n_qubits: self.n_qubits,
        })?;
        for &q in &qubits[1..] {
            self.apply_gate(&GateOp::CNot { control: first, target: q })?;
        }
        self.apply_gate(&GateOp::Hadamard { qubit: first })
    }

    /// Probability that measuring `qubit` yields 0.
    pub fn prob_zero(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << self.bit(qubit);
        let mut p = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                p += a.norm_sqr();
            }
        }
        Ok(p)
    }

    /// Projects `qubit` onto `outcome` and renormalizes.
    ///
    /// Fails with [`Error::BranchTooImprobable`] when the branch carries
    /// probability below [`BRANCH_CUTOFF`].
    pub fn project(&mut self, qubit: usize, outcome: bool) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1usize << self.bit(qubit);
        let keep = if outcome { mask } else { 0 };
        let mut p = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == keep {
                p += a.norm_sqr();
            }
        }
        if p < BRANCH_CUTOFF {
            return Err(Error::BranchTooImprobable { prob: p });
        }
        let norm = p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *a /= norm;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(())
    }

    /// Measures one qubit in the computational basis, collapsing the state.
    ///
    /// Branches with probability below [`BRANCH_CUTOFF`] are never selected.
    pub fn measure<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool> {
        let p0 = self.prob_zero(qubit)?;
        let outcome = if p0 < BRANCH_CUTOFF {
            true
        } else if p0 > 1.0 - BRANCH_CUTOFF {
            false
        } else {
            rng.gen::<f64>() >= p0
        };
        self.project(qubit, outcome)?;
        Ok(outcome)
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::SizeMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(other.amps.iter()) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Squared norm of the state (should stay 1 within roundoff).
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}
