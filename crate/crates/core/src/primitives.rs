//! Gearbox (GB) and generalized parallel (PAR) rotation primitives.
//!
//! Both circuit families consume input rotations `e^{-i phi_j X}` on ancilla
//! qubits and, conditioned on ancilla measurement outcomes, apply a
//! non-linear function of the angles to a target qubit:
//!
//! * `GB(phi_1..phi_k)` applies `e^{-i arctan(tan^2 xi) X}` where
//!   `sin xi = |sin phi_1 ... sin phi_k|`; on failure it applies the fixed
//!   Clifford `e^{i pi X/4}`, which is undone by `RotX(pi/4)` before the
//!   next attempt.
//! * `PAR(phi_1..phi_k)` applies `e^{-+i arctan(tan phi_1 ... tan phi_k) X}`
//!   on the two GHZ outcomes (equally likely) and the identity otherwise,
//!   which makes retries free of corrections.
//!
//! Analytic maps ([`gb_angle`], [`par_angle`], success probabilities) are
//! pure; `run_*` functions execute the circuits on the statevector
//! simulator with mid-circuit measurement and return a [`RunTrace`].

use alloc::string::ToString;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::error::Error;
use crate::sim::{new_state, GateOp, StateVector};
use crate::Result;

/// Rotation angle in radians.
///
/// Angles are not reduced automatically; periodicity (shifts by pi) is a
/// caller obligation and is exercised by the property-test suite.
pub type Angle = f64;

/// Default attempt budget for repeat-until-success loops.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000;

/// What a circuit applied (or required) on a non-success branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionKind {
    /// Desired rotation applied; nothing to correct.
    None,
    /// The branch applied `e^{i pi X/4}`; corrected by `RotX(pi/4)`.
    CliffordExpIPi4X,
    /// The branch applied the identity; retry without correction.
    Identity,
    /// The branch applied the inverse rotation `e^{+i theta X}`.
    ReverseRotation,
}

/// Record of one repeat-until-success execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Number of full-circuit repetitions (>= 1 on success).
    pub attempts: u64,
    /// Single-qubit input rotations consumed across all attempts
    /// (>= k * attempts for a k-input primitive).
    pub leaf_rotations: u64,
    /// Angle actually applied to the target on the final branch.
    pub outcome_angle: Angle,
    /// Count of Clifford corrections applied (GB failure fix-ups, PAR sign
    /// flips by Z).
    pub corrections: u64,
}

/// Success angle of a gearbox circuit:
/// `arctan(tan^2(arcsin(|sin phi_1| ... |sin phi_k|)))`, in `[0, pi/2]`.
pub fn gb_angle(phis: &[Angle]) -> Angle {
    let s2: f64 = phis.iter().map(|p| p.sin() * p.sin()).product();
    // tan^2(arcsin sqrt(s2)) = s2 / (1 - s2); atan2 handles s2 -> 1.
    s2.atan2(1.0 - s2)
}

/// Per-attempt success probability of a gearbox circuit:
/// `(1 - prod sin^2)^2 + prod sin^4`.
pub fn gb_success_prob(phis: &[Angle]) -> f64 {
    let s2: f64 = phis.iter().map(|p| p.sin() * p.sin()).product();
    (1.0 - s2) * (1.0 - s2) + s2 * s2
}

/// Success angle of a generalized PAR circuit:
/// `arctan(tan phi_1 ... tan phi_k)`, in `(-pi/2, pi/2)`.
///
/// The physical circuit applies this angle or its negative with equal
/// probability; the sign branch shows up in run traces, not here. Inputs at
/// odd multiples of pi/2 are rejected.
pub fn par_angle(phis: &[Angle]) -> Result<Angle> {
    let mut t = 1.0f64;
    for (i, p) in phis.iter().enumerate() {
        if p.cos().abs() < 1e-12 {
            return Err(Error::TangentPole { input_index: i });
        }
        t *= p.tan();
    }
    Ok(t.atan())
}

/// Per-attempt success probability of PAR when both GHZ branches are usable:
/// `prod cos^2 + prod sin^2`.
pub fn par_success_prob(phis: &[Angle]) -> f64 {
    let c2: f64 = phis.iter().map(|p| p.cos() * p.cos()).product();
    let s2: f64 = phis.iter().map(|p| p.sin() * p.sin()).product();
    c2 + s2
}

/// Applies a plain X (up to no phase) to a measured qubit to reset it to
/// `|0>`; safe because a measured qubit is in a computational product state.
fn reset_to_zero(state: &mut StateVector, qubit: usize, outcome: bool) -> Result<()> {
    if outcome {
        state.apply_gate(&GateOp::MultiControlledIX {
            controls: Vec::new(),
            target: qubit,
            phase_exponent: 0,
        })?;
    }
    Ok(())
}

/// Picks `count` ancilla qubits (lowest indices, skipping the target) and
/// verifies they start in `|0>`.
fn select_ancillas(state: &StateVector, target_qubit: usize, count: usize) -> Result<Vec<usize>> {
    if state.n_qubits() < count + 1 {
        return Err(Error::RegisterTooLarge {
            requested: count + 1,
            max: state.n_qubits(),
        });
    }
    let ancillas: Vec<usize> = (0..state.n_qubits())
        .filter(|&q| q != target_qubit)
        .take(count)
        .collect();
    for &a in &ancillas {
        if state.prob_zero(a)? < 1.0 - 1e-9 {
            return Err(Error::Domain(
                "ancilla qubits must start in |0>".to_string(),
            ));
        }
    }
    Ok(ancillas)
}

/// Runs the gearbox circuit as a repeat-until-success loop.
///
/// Each attempt rotates the ancillas by `phi_j`, applies the
/// ancilla-controlled `-iX`, un-rotates the ancillas by `-phi_j`, and
/// measures them. All-zeros succeeds and leaves
/// `e^{-i gb_angle(phis) X} |psi>` on the target (up to global phase); any
/// other record applies `e^{i pi X/4}`, which is corrected with
/// `RotX(pi/4)` before the retry. Consumes `2k` input rotations per attempt.
pub fn run_gb<R: Rng + ?Sized>(
    phis: &[Angle],
    target_state: &StateVector,
    target_qubit: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<(StateVector, RunTrace)> {
    let k = phis.len();
    let mut state = target_state.clone();
    let ancillas = select_ancillas(&state, target_qubit, k)?;
    let mut trace = RunTrace {
        attempts: 0,
        leaf_rotations: 0,
        outcome_angle: 0.0,
        corrections: 0,
    };
    while trace.attempts < max_attempts {
        trace.attempts += 1;
        for (j, &phi) in phis.iter().enumerate() {
            state.apply_gate(&GateOp::RotX { qubit: ancillas[j], angle: phi })?;
        }
        state.apply_gate(&GateOp::MultiControlledIX {
            controls: ancillas.clone(),
            target: target_qubit,
            phase_exponent: 3,
        })?;
        for (j, &phi) in phis.iter().enumerate() {
            state.apply_gate(&GateOp::RotX { qubit: ancillas[j], angle: -phi })?;
        }
        trace.leaf_rotations += 2 * k as u64;
        let mut success = true;
        for &a in &ancillas {
            let outcome = state.measure(a, rng)?;
            reset_to_zero(&mut state, a, outcome)?;
            success &= !outcome;
        }
        if success {
            trace.outcome_angle = gb_angle(phis);
            return Ok((state, trace));
        }
        // Failure applied e^{i pi X/4}; undo it and go again.
        state.apply_gate(&GateOp::RotX {
            qubit: target_qubit,
            angle: core::f64::consts::FRAC_PI_4,
        })?;
        trace.corrections += 1;
    }
    Err(Error::AttemptsExhausted { trace })
}

/// Runs a PAR circuit on a freshly allocated register whose target starts in
/// `|0>`, where both GHZ outcomes are usable: the wrong-sign branch is
/// fixed by a Z gate (`Z e^{+i t X} |0> = e^{-i t X} |0>`), doubling the
/// success rate. Non-GHZ outcomes apply the identity and the attempt is
/// repeated. Returns the `(k+1)`-qubit register (target is qubit `k`).
pub fn run_par_on_zero<R: Rng + ?Sized>(
    phis: &[Angle],
    rng: &mut R,
    max_attempts: u64,
) -> Result<(StateVector, RunTrace)> {
    let k = phis.len();
    let target = k;
    let mut state = new_state(k + 1)?;
    let ancillas: Vec<usize> = (0..k).collect();
    let mut trace = RunTrace {
        attempts: 0,
        leaf_rotations: 0,
        outcome_angle: 0.0,
        corrections: 0,
    };
    let angle = par_angle(phis)?;
    while trace.attempts < max_attempts {
        trace.attempts += 1;
        par_unitary(&mut state, phis, &ancillas, target)?;
        trace.leaf_rotations += k as u64;
        let mut record = Vec::with_capacity(k);
        for &a in &ancillas {
            let outcome = state.measure(a, rng)?;
            reset_to_zero(&mut state, a, outcome)?;
            record.push(outcome);
        }
        let all_zero = record.iter().all(|&b| !b);
        let ghz_minus = record[0] && record[1..].iter().all(|&b| !b);
        if all_zero {
            trace.outcome_angle = angle;
            return Ok((state, trace));
        }
        if ghz_minus {
            state.apply_gate(&GateOp::PauliZ { qubit: target })?;
            trace.corrections += 1;
            trace.outcome_angle = angle;
            return Ok((state, trace));
        }
        // Identity branch: nothing to correct, try again.
    }
    Err(Error::AttemptsExhausted { trace })
}

/// The unitary part of a PAR attempt: input rotations, the all-ancilla
/// controlled `(i)^{k-1} X` on the target, and the inverse GHZ basis change.
fn par_unitary(
    state: &mut StateVector,
    phis: &[Angle],
    ancillas: &[usize],
    target: usize,
) -> Result<()> {
    for (j, &phi) in phis.iter().enumerate() {
        state.apply_gate(&GateOp::RotX { qubit: ancillas[j], angle: phi })?;
    }
    state.apply_gate(&GateOp::MultiControlledIX {
        controls: ancillas.to_vec(),
        target,
        phase_exponent: ((phis.len() - 1) % 4) as u8,
    })?;
    state.apply_ghz_inverse(ancillas)
}

/// Inverse of [`par_unitary`].
fn par_unitary_dagger(
    state: &mut StateVector,
    phis: &[Angle],
    ancillas: &[usize],
    target: usize,
) -> Result<()> {
    // (GHZ^-1)^-1 = H on the first ancilla, then the same CNOT fan-out.
    state.apply_gate(&GateOp::Hadamard { qubit: ancillas[0] })?;
    for &q in &ancillas[1..] {
        state.apply_gate(&GateOp::CNot { control: ancillas[0], target: q })?;
    }
    let k = phis.len();
    state.apply_gate(&GateOp::MultiControlledIX {
        controls: ancillas.to_vec(),
        target,
        phase_exponent: ((4 - (k - 1) % 4) % 4) as u8,
    })?;
    for (j, &phi) in phis.iter().enumerate() {
        state.apply_gate(&GateOp::RotX { qubit: ancillas[j], angle: -phi })?;
    }
    Ok(())
}

/// Reflection that is +1 on the flag pair `|00>` and -1 elsewhere,
/// decomposed as `Z(h) Z(a) CZ(h, a)` (CZ built from H and CNOT).
fn reflect_about_flags(state: &mut StateVector, h: usize, a: usize) -> Result<()> {
    state.apply_gate(&GateOp::PauliZ { qubit: h })?;
    state.apply_gate(&GateOp::PauliZ { qubit: a })?;
    state.apply_gate(&GateOp::Hadamard { qubit: a })?;
    state.apply_gate(&GateOp::CNot { control: h, target: a })?;
    state.apply_gate(&GateOp::Hadamard { qubit: a })?;
    Ok(())
}

/// Runs PAR de-randomized by oblivious amplitude amplification on an
/// arbitrary target state.
///
/// One attempt executes `U~ R U~^dag R U~` (global phase dropped), where
/// `U~` is a Hadamard on an extra poison flag tensored with the PAR
/// unitary and `R` reflects about the `|00>` subspace of (poison flag,
/// first ancilla). Success means both flags and the remaining ancillas all
/// read 0; every other record is treated as the identity branch and
/// retried. Consumes `3k` input rotations per attempt.
///
/// For a single input the first attempt always succeeds and the rotation is
/// exact. For two or more inputs the three-application construction is
/// *not* exact: the flag pair fails to read `00` with nonzero probability
/// and the success branch carries an O(1e-2) admixture; see the crate
/// README. The trace reports what actually happened.
pub fn run_par_oaa<R: Rng + ?Sized>(
    phis: &[Angle],
    target_state: &StateVector,
    target_qubit: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<(StateVector, RunTrace)> {
    let k = phis.len();
    let mut state = target_state.clone();
    // One poison flag plus k PAR ancillas.
    let free = select_ancillas(&state, target_qubit, k + 1)?;
    let h = free[0];
    let ancillas = &free[1..];
    let angle = par_angle(phis)?;
    let mut trace = RunTrace {
        attempts: 0,
        leaf_rotations: 0,
        outcome_angle: 0.0,
        corrections: 0,
    };
    while trace.attempts < max_attempts {
        trace.attempts += 1;
        // U~
        state.apply_gate(&GateOp::Hadamard { qubit: h })?;
        par_unitary(&mut state, phis, ancillas, target_qubit)?;
        // R
        reflect_about_flags(&mut state, h, ancillas[0])?;
        // U~^dag
        par_unitary_dagger(&mut state, phis, ancillas, target_qubit)?;
        state.apply_gate(&GateOp::Hadamard { qubit: h })?;
        // R
        reflect_about_flags(&mut state, h, ancillas[0])?;
        // U~
        state.apply_gate(&GateOp::Hadamard { qubit: h })?;
        par_unitary(&mut state, phis, ancillas, target_qubit)?;
        trace.leaf_rotations += 3 * k as u64;

        let flag_h = state.measure(h, rng)?;
        reset_to_zero(&mut state, h, flag_h)?;
        let flag_a = state.measure(ancillas[0], rng)?;
        reset_to_zero(&mut state, ancillas[0], flag_a)?;
        let mut rest_zero = true;
        for &a in &ancillas[1..] {
            let outcome = state.measure(a, rng)?;
            reset_to_zero(&mut state, a, outcome)?;
            rest_zero &= !outcome;
        }
        if !flag_h && !flag_a && rest_zero {
            trace.outcome_angle = angle;
            return Ok((state, trace));
        }
        // All other records are treated as the identity branch.
    }
    Err(Error::AttemptsExhausted { trace })
}

/// Runs the measurement-only gearbox variant, which needs no online
/// rotations: two offline `e^{-i phi X}|0>` resource states, one controlled
/// `-iX`, a CNOT, a Hadamard, and two measurements.
///
/// Outcomes and their probabilities (`Q = cos^4 phi + sin^4 phi`):
///
/// * [`CorrectionKind::None`] - applied `e^{-i gb_angle X}`, probability Q/2;
/// * [`CorrectionKind::ReverseRotation`] - applied `e^{+i gb_angle X}`,
///   probability Q/2;
/// * [`CorrectionKind::CliffordExpIPi4X`] - applied `e^{-+i pi X/4}`,
///   probability 1 - Q.
pub fn run_nonrus_gb<R: Rng + ?Sized>(phi: Angle, rng: &mut R) -> Result<(CorrectionKind, RunTrace)> {
    // Register: resource qubit 0 (top), resource qubit 1 (mid), target 2.
    let mut state = new_state(3)?;
    state.apply_gate(&GateOp::RotX { qubit: 0, angle: phi })?;
    state.apply_gate(&GateOp::RotX { qubit: 1, angle: phi })?;
    state.apply_gate(&GateOp::MultiControlledIX {
        controls: alloc::vec![1],
        target: 2,
        phase_exponent: 3,
    })?;
    state.apply_gate(&GateOp::CNot { control: 0, target: 1 })?;
    state.apply_gate(&GateOp::Hadamard { qubit: 0 })?;
    let top = state.measure(0, rng)?;
    let mid = state.measure(1, rng)?;
    let gb = gb_angle(&[phi]);
    let (kind, outcome_angle) = match (top, mid) {
        (true, false) => (CorrectionKind::None, gb),
        (false, false) => (CorrectionKind::ReverseRotation, -gb),
        // mid = 1: Clifford e^{-i pi X/4} for top = 0, e^{+i pi X/4} for top = 1.
        (false, true) => (CorrectionKind::CliffordExpIPi4X, core::f64::consts::FRAC_PI_4),
        (true, true) => (CorrectionKind::CliffordExpIPi4X, -core::f64::consts::FRAC_PI_4),
    };
    Ok((
        kind,
        RunTrace { attempts: 1, leaf_rotations: 2, outcome_angle, corrections: 0 },
    ))
}

/// Next angle in the failure-correction sequence for non-RUS gearboxes:
/// `phi_{j+1} = arctan(sqrt(tan(2 arctan(tan^2 phi_j))))`, which satisfies
/// `GB(phi_{j+1}) = 2 GB(phi_j)`.
///
/// Requires `2 gb_angle([phi]) < pi/2` so the tangent stays finite and the
/// square root real.
pub fn correction_angle_next(phi: Angle) -> Result<Angle> {
    let g = gb_angle(&[phi]);
    if 2.0 * g >= core::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(
            "correction sequence needs 2*GB(phi) < pi/2".to_string(),
        ));
    }
    Ok((2.0 * g).tan().sqrt().atan())
}
