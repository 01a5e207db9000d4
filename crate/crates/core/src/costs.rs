//! Analytic cost model for repeat-until-success circuits.
//!
//! Covers the mean/variance recursion for repeat-until-success loops, the
//! T-count formulas for gearbox and PAR circuits, recursive expression
//! costing, phase-encoding and classical-baseline T-counts, rotation
//! caching, flattened-circuit success probabilities, and the slicing policy
//! used to cost full-width multiplications.
//!
//! A "rotation" always means one consumption of an input-angle resource
//! (one leaf application). Multi-controlled Toffoli ladders are charged a
//! flat `4(k-1)` T-gates per attempt of a `k`-input node. Gearbox nodes
//! consume every child twice per attempt (compute and uncompute); their
//! per-attempt success probability is the verified `(1-s^2)^2 + s^4` form,
//! cross-checked against simulation.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::error::Error;
use crate::primitives::{gb_success_prob, par_success_prob, Angle, DEFAULT_MAX_ATTEMPTS};
use crate::synth::{gb_iterate_expr, run_expr, RusExpr};
use crate::Result;

/// Mean and variance of a nonnegative cost (rotation count or T-count).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostDist {
    /// Expected cost.
    pub mean: f64,
    /// Variance of the cost.
    pub variance: f64,
}

impl CostDist {
    /// A deterministic cost.
    pub fn exact(mean: f64) -> Self {
        CostDist { mean, variance: 0.0 }
    }
}

/// How a single-qubit rotation is priced in T-gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RotationCostModel {
    /// Every rotation costs a flat `c` (use 1 to count rotations).
    Constant(f64),
    /// Rotations are synthesized to accuracy `eps` at
    /// `1.15 log2(1/eps)` T-gates each.
    Synthesis {
        /// Per-rotation synthesis accuracy, in `(0, 1)`.
        eps: f64,
    },
}

impl RotationCostModel {
    /// T-gates charged per rotation under this model.
    pub fn rotation_cost(&self) -> Result<f64> {
        match *self {
            RotationCostModel::Constant(c) => {
                if c < 0.0 || !c.is_finite() {
                    return Err(Error::Domain(
                        "constant rotation cost must be nonnegative".to_string(),
                    ));
                }
                Ok(c)
            }
            RotationCostModel::Synthesis { eps } => {
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(Error::Domain(
                        "synthesis accuracy must lie in (0, 1)".to_string(),
                    ));
                }
                Ok(1.15 * (1.0 / eps).log2())
            }
        }
    }
}

/// T-count for one rotation synthesized to accuracy `eps`.
fn synthesis_tcount(eps: f64) -> f64 {
    1.15 * (1.0 / eps).log2()
}

/// Mean and variance of the total cost of a repeat-until-success loop that
/// pays the summed child costs every attempt and succeeds with probability
/// `p` per attempt.
///
/// With `N` geometric (`E(N) = 1/p`, `V(N) = (1-p)/p^2`) and independent
/// child costs, the total `R = sum over attempts` has
/// `E(R) = E(N) * sum E` and `V(R) = E(N) * sum V + V(N) * (sum E)^2`.
pub fn rus_repeat_cost(child_costs: &[CostDist], p: f64) -> Result<CostDist> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::BranchTooImprobable { prob: p });
    }
    if p > 1.0 + 1e-12 {
        return Err(Error::Domain("success probability exceeds 1".to_string()));
    }
    let p = p.min(1.0);
    let sum_e: f64 = child_costs.iter().map(|c| c.mean).sum();
    let sum_v: f64 = child_costs.iter().map(|c| c.variance).sum();
    let en = 1.0 / p;
    let vn = (1.0 - p) / (p * p);
    Ok(CostDist {
        mean: en * sum_e,
        variance: en * sum_v + vn * sum_e * sum_e,
    })
}

/// Expected T-count distribution of a `k`-angle gearbox attempt loop:
/// `4(k-1)` Toffoli T-gates plus two priced rotations per angle, every
/// attempt, at per-attempt success probability `Q`.
pub fn gb_tcount(phis: &[Angle], model: &RotationCostModel) -> Result<CostDist> {
    if phis.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let c = model.rotation_cost()?;
    let mut children = vec![CostDist::exact(4.0 * (phis.len() as f64 - 1.0))];
    children.extend(core::iter::repeat(CostDist::exact(c)).take(2 * phis.len()));
    rus_repeat_cost(&children, gb_success_prob(phis))
}

/// Expected T-count distribution of a `k`-angle PAR attempt loop:
/// `4(k-1)` Toffoli T-gates plus one priced rotation per angle, every
/// attempt, at per-attempt success probability `P`.
pub fn par_tcount(phis: &[Angle], model: &RotationCostModel) -> Result<CostDist> {
    if phis.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let c = model.rotation_cost()?;
    let mut children = vec![CostDist::exact(4.0 * (phis.len() as f64 - 1.0))];
    children.extend(core::iter::repeat(CostDist::exact(c)).take(phis.len()));
    rus_repeat_cost(&children, par_success_prob(phis))
}

/// Recursive expression cost with a configurable leaf price and Toffoli
/// charge scale; probabilities are evaluated from the child angles at the
/// given inputs.
fn expr_cost_rec(
    expr: &RusExpr,
    inputs: &[Angle],
    leaf_cost: f64,
    toffoli_unit: f64,
) -> Result<CostDist> {
    match expr {
        RusExpr::Const(_) | RusExpr::Affine { .. } => Ok(CostDist::exact(leaf_cost)),
        RusExpr::Neg(child) => expr_cost_rec(child, inputs, leaf_cost, toffoli_unit),
        RusExpr::Sum(children) => {
            if children.is_empty() {
                return Err(Error::ArityMismatch { expected: 1, got: 0 });
            }
            let mut total = CostDist::exact(0.0);
            for child in children {
                let c = expr_cost_rec(child, inputs, leaf_cost, toffoli_unit)?;
                total.mean += c.mean;
                total.variance += c.variance;
            }
            Ok(total)
        }
        RusExpr::GB(children) | RusExpr::PAR(children) => {
            if children.is_empty() {
                return Err(Error::ArityMismatch { expected: 1, got: 0 });
            }
            let doubled = matches!(expr, RusExpr::GB(_));
            let k = children.len();
            let mut attempt = vec![CostDist::exact(
                toffoli_unit * 4.0 * (k as f64 - 1.0),
            )];
            let mut angles = Vec::with_capacity(k);
            for child in children {
                let c = expr_cost_rec(child, inputs, leaf_cost, toffoli_unit)?;
                attempt.push(c);
                if doubled {
                    attempt.push(c);
                }
                angles.push(child.eval_angle(inputs)?);
            }
            let p = if doubled {
                gb_success_prob(&angles)
            } else {
                par_success_prob(&angles)
            };
            rus_repeat_cost(&attempt, p)
        }
    }
}

/// Expected T-count distribution of a full expression tree under the given
/// rotation price, with Toffoli ladders charged `4(k-1)` T per attempt.
///
/// Success probabilities are taken at zero inputs (angle leaves contribute
/// their offsets), matching the small-angle costing convention.
pub fn expr_cost(expr: &RusExpr, model: &RotationCostModel) -> Result<CostDist> {
    let zeros = vec![0.0; expr.arity()];
    expr_cost_rec(expr, &zeros, model.rotation_cost()?, 1.0)
}

/// Expected rotation count (leaf applications) of an expression at the
/// given inputs, ignoring Toffoli gates.
pub fn expr_rotation_cost(expr: &RusExpr, inputs: &[Angle]) -> Result<CostDist> {
    expr_cost_rec(expr, inputs, 1.0, 0.0)
}

/// Expected Toffoli T-count of an expression at the given inputs, ignoring
/// rotations.
pub fn expr_toffoli_tcount(expr: &RusExpr, inputs: &[Angle]) -> Result<CostDist> {
    expr_cost_rec(expr, inputs, 0.0, 1.0)
}

/// T-count of phase-encoding an `n`-bit string: `n + 2` rotations, each
/// synthesized to accuracy `2^-(n+2)/(n+2)`, i.e.
/// `1.15 (n+2) log2((n+2) 2^(n+2))`.
pub fn enc_cost(n: u32) -> f64 {
    let m = n as f64 + 2.0;
    1.15 * m * (m.log2() + m)
}

/// Classical baseline circuit families with closed-form costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BaselineMethod {
    /// Carry-ripple multiplier.
    CarryRipple,
    /// Table-lookup multiplier (one giant select network, 3 qubits).
    TableLookupMultiplier,
    /// Reciprocal via the extended Euclidean algorithm.
    Euclid,
    /// Reciprocal via Newton iteration.
    Newton,
    /// Reciprocal via table lookup.
    TableLookupReciprocal,
}

impl BaselineMethod {
    /// Stable label used in serialized reports.
    pub fn label(&self) -> &'static str {
        match self {
            BaselineMethod::CarryRipple => "carry_ripple",
            BaselineMethod::TableLookupMultiplier => "table_lookup_mult",
            BaselineMethod::Euclid => "euclid",
            BaselineMethod::Newton => "newton",
            BaselineMethod::TableLookupReciprocal => "table_lookup_recip",
        }
    }
}

/// One row of a baseline cost table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BaselineReport {
    /// Which circuit family.
    pub method: BaselineMethod,
    /// Bit width.
    pub n: u32,
    /// Total T-count (both queries of a compute/uncompute pair plus
    /// phase encoding).
    pub tcount: f64,
    /// Workspace qubits.
    pub qubits: u64,
    /// Whether the published-table variant of the formulas was used where
    /// prose and table disagree (Newton T-count, Euclid qubits).
    pub table_mode: bool,
}

/// Ceiling of `log2 n` for `n >= 1`.
fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

/// Closed-form T-count and qubit count of a classical baseline at bit
/// width `n >= 2`.
///
/// Where prose and published tables disagree, `table_mode` selects the
/// table-reconciled variant: Newton's T-count drops its `log2 n` iteration
/// factor, and Euclid's qubit count becomes `5n + log2 n + 1` instead of
/// `5n + 4 log2 n`.
pub fn baseline_cost(method: BaselineMethod, n: u32, table_mode: bool) -> Result<BaselineReport> {
    if n < 2 {
        return Err(Error::Domain("baseline formulas require n >= 2".to_string()));
    }
    let nf = n as f64;
    let enc = enc_cost(n);
    let log_n = ceil_log2(n) as f64;
    let (tcount, qubits) = match method {
        BaselineMethod::CarryRipple => (2.0 * (18.0 * nf * nf + 18.0 * nf) + enc, 2 * n as u64),
        BaselineMethod::TableLookupMultiplier => {
            // The published n=2 count is the special-cased "6,656 gates".
            let lookups = if n == 2 {
                6656.0
            } else {
                2.0 * (2.0 * nf).exp2() * (64.0 * nf * nf + 44.0 * nf - 168.0)
            };
            (lookups + enc, 3)
        }
        BaselineMethod::Euclid => {
            let qubits = if table_mode {
                5 * n as u64 + ceil_log2(n) as u64 + 1
            } else {
                5 * n as u64 + 4 * ceil_log2(n) as u64
            };
            (2.0 * 1890.0 * nf * nf + enc, qubits)
        }
        BaselineMethod::Newton => {
            let per_pass = 2.0 * (144.0 * nf * nf + 200.0 * nf - 28.0);
            let tcount = if table_mode { per_pass } else { per_pass * log_n } + enc;
            (tcount, (10 * n as u64 - 4) * ceil_log2(n) as u64 + 1)
        }
        BaselineMethod::TableLookupReciprocal => {
            let lookups = match n {
                2 => 112.0,
                4 => 8320.0,
                n if n >= 5 => (nf + 1.0).exp2() * (32.0 * nf * nf - 84.0 * nf),
                _ => {
                    return Err(Error::Domain(
                        "table-lookup reciprocal is specified for n = 2, 4, or n >= 5"
                            .to_string(),
                    ))
                }
            };
            (lookups + enc, 3)
        }
    };
    Ok(BaselineReport { method, n, tcount, qubits, table_mode })
}

/// T-count of a `k`-fold controlled NOT: 7 / 22 / 52 for `k` = 2 / 3 / 4,
/// and `32k - 84` for `k >= 5`.
pub fn multi_cnot_tcount(k: usize) -> Result<u64> {
    match k {
        0 | 1 => Err(Error::Domain(
            "multi-controlled NOT cost is defined for k >= 2 controls".to_string(),
        )),
        2 => Ok(7),
        3 => Ok(22),
        4 => Ok(52),
        k => Ok(32 * k as u64 - 84),
    }
}

/// Qubits and rotation count for caching a rotation angle to relative
/// accuracy `eps` with failure probability at most `delta`, then replaying
/// it: `t = ceil(log2(kappa/eps)) + ceil(log2(2 + 1/(2 delta)))` cache
/// qubits, and `2^t * n2 + n1` rotations for `n2` cached and `n1` direct
/// rotations.
pub fn cache_cost(kappa: f64, eps: f64, delta: f64, n1: f64, n2: f64) -> Result<(u32, f64)> {
    if !(kappa > 0.0) || !(eps > 0.0 && eps < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(
            "cache_cost needs kappa > 0, eps in (0,1), delta in (0,1)".to_string(),
        ));
    }
    let t = (kappa / eps).log2().ceil() + (2.0 + 1.0 / (2.0 * delta)).log2().ceil();
    if t < 0.0 || t > 62.0 {
        return Err(Error::Domain("cache register size out of range".to_string()));
    }
    let t = t as u32;
    Ok((t, (t as f64).exp2() * n2 + n1))
}

/// `cos^4 + sin^4` of an angle.
fn quartic_sum(x: f64) -> f64 {
    let c = x.cos();
    let s = x.sin();
    c.powi(4) + s.powi(4)
}

/// Success probability of the flattened (measurement-deferred) gearbox:
/// two conjugating gearboxes at `x/2 + pi/4` and the core at `x`, all
/// succeeding in one shot. Equals `1/4 - x^4/4 + O(x^6)`.
pub fn flattened_gb_success(x: f64) -> f64 {
    let w = quartic_sum(x / 2.0 + core::f64::consts::FRAC_PI_4);
    w * w * quartic_sum(x)
}

/// Success probability of the flattened PAR of two angles, with one
/// conjugating gearbox per input and the PAR core succeeding in one shot.
/// Equals `1/4 + (a^2 b^2 - a^4 - b^4)/4` to fourth order.
pub fn flattened_par_success(a: f64, b: f64) -> f64 {
    let wa = quartic_sum(a / 2.0 + core::f64::consts::FRAC_PI_4);
    let wb = quartic_sum(b / 2.0 + core::f64::consts::FRAC_PI_4);
    let (ca, sa) = (a.cos(), a.sin());
    let (cb, sb) = (b.cos(), b.sin());
    wa * wb * (ca * ca * cb * cb + sa * sa * sb * sb)
}

/// Monte Carlo estimate of the expected rotation count of the `k`-fold
/// composed gearbox at input `x` (compare with the rule of thumb
/// `2^(k - 1/2)`). Limited to `k <= 8`.
pub fn gbk_expected_rotations<R: Rng + ?Sized>(
    x: f64,
    k: u32,
    rng: &mut R,
    trials: u64,
) -> Result<f64> {
    if k > 8 {
        return Err(Error::Domain(
            "composed-gearbox sampling is limited to k <= 8".to_string(),
        ));
    }
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".to_string()));
    }
    let expr = gb_iterate_expr(k);
    let mut total = 0u64;
    for _ in 0..trials {
        let (_, trace) = run_expr(&expr, &[x], rng, DEFAULT_MAX_ATTEMPTS)?;
        total += trace.leaf_rotations;
    }
    Ok(total as f64 / trials as f64)
}

/// Cost breakdown of a sliced full-width multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiplicationCost {
    /// Number of serial slices.
    pub slices: u64,
    /// Expected total rotation count (all slices plus input preparation).
    pub expected_rotations: f64,
    /// Per-rotation synthesis accuracy implied by the error budget.
    pub rotation_precision: f64,
    /// Total expected T-count.
    pub tcount: f64,
}

/// Expected T-count for squaring the worst-case `n`-bit value
/// `x = 1 - 2^-n` with the multiplier expression `m`, under the slicing
/// policy used for the multiplication cost table:
///
/// * the approximation budget is `5/8 * 2^-n`; the slice count `s` is the
///   smallest integer with `|s * m(x/sqrt(s), x/sqrt(s)) - x^2|` inside it;
/// * slices beyond the first act on an already-rotated target, so `s >= 2`
///   prices every slice through 3x amplitude amplification (rotations and
///   Toffolis alike);
/// * three input-preparation rotations are charged on top;
/// * every rotation is synthesized to `eps_r = (2^-n / 4)` divided by the
///   expected rotation count, at `1.15 log2(1/eps_r)` T each, and Toffoli
///   ladders keep their `4(k-1)`-per-attempt charge.
pub fn multiplication_tcount(m: &RusExpr, n: u32) -> Result<MultiplicationCost> {
    if n < 2 {
        return Err(Error::Domain("multiplication table needs n >= 2".to_string()));
    }
    let x = 1.0 - (-(n as f64)).exp2();
    let target = x * x;
    let budget = 0.625 * (-(n as f64)).exp2();
    let max_slices = 1u64 << 26;
    let mut slices = 0u64;
    let mut arg = 0.0;
    for s in 1..=max_slices {
        let u = x / (s as f64).sqrt();
        let estimate = s as f64 * m.eval_angle(&[u, u])?;
        if (estimate - target).abs() <= budget {
            slices = s;
            arg = u;
            break;
        }
    }
    if slices == 0 {
        return Err(Error::Domain("slicing did not reach the error budget".to_string()));
    }
    let amplification = if slices >= 2 { 3.0 } else { 1.0 };
    let rot_per_slice = expr_rotation_cost(m, &[arg, arg])?.mean;
    let tof_per_slice = expr_toffoli_tcount(m, &[arg, arg])?.mean;
    let expected_rotations = amplification * rot_per_slice * slices as f64 + 3.0;
    let toffoli_t = amplification * tof_per_slice * slices as f64;
    let rotation_precision = (-(n as f64)).exp2() / 4.0 / expected_rotations;
    let tcount = expected_rotations * synthesis_tcount(rotation_precision) + toffoli_t;
    Ok(MultiplicationCost {
        slices,
        expected_rotations,
        rotation_precision,
        tcount,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::synth::{m4, m6};
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn repeat_cost_examples() {
        let one = CostDist::exact(1.0);
        assert_eq!(rus_repeat_cost(&[one], 1.0).unwrap(), CostDist::exact(1.0));
        let two = rus_repeat_cost(&[one, one], 0.5).unwrap();
        assert_eq!(two.mean, 4.0);
        assert_eq!(two.variance, 8.0);
        let noisy = rus_repeat_cost(&[CostDist { mean: 3.0, variance: 1.0 }], 0.25).unwrap();
        assert_eq!(noisy.mean, 12.0);
        assert_eq!(noisy.variance, 112.0);
    }

    #[test]
    fn repeat_cost_unit_probability_is_identity() {
        let children = [
            CostDist { mean: 2.5, variance: 0.5 },
            CostDist { mean: 4.0, variance: 1.5 },
        ];
        let total = rus_repeat_cost(&children, 1.0).unwrap();
        assert_eq!(total.mean, 6.5);
        assert_eq!(total.variance, 2.0);
    }

    #[test]
    fn repeat_cost_rejects_bad_probability() {
        assert!(matches!(
            rus_repeat_cost(&[CostDist::exact(1.0)], 0.0),
            Err(Error::BranchTooImprobable { .. })
        ));
        assert!(rus_repeat_cost(&[CostDist::exact(1.0)], 1.5).is_err());
    }

    #[test]
    fn gearbox_tcount_examples() {
        let free = gb_tcount(&[FRAC_PI_4], &RotationCostModel::Constant(0.0)).unwrap();
        assert_eq!(free.mean, 0.0);
        let unit = gb_tcount(&[0.1], &RotationCostModel::Constant(1.0)).unwrap();
        let q = gb_success_prob(&[0.1]);
        assert!((unit.mean - 2.0 / q).abs() < 1e-12);
        assert!((unit.mean - 2.0403).abs() < 1e-4, "mean {}", unit.mean);
    }

    #[test]
    fn par_tcount_example() {
        let cost = par_tcount(&[FRAC_PI_4, FRAC_PI_4], &RotationCostModel::Constant(10.0))
            .unwrap();
        assert!((cost.mean - 48.0).abs() < 1e-12);
        // sum E = 24, P = 1/2: V = (1-P)/P^2 * 24^2.
        assert!((cost.variance - 1152.0).abs() < 1e-9);
    }

    #[test]
    fn synthesis_model_prices_rotations() {
        let model = RotationCostModel::Synthesis { eps: 1.0 / 1024.0 };
        assert!((model.rotation_cost().unwrap() - 11.5).abs() < 1e-12);
        assert!(RotationCostModel::Synthesis { eps: 1.5 }.rotation_cost().is_err());
        assert!(RotationCostModel::Constant(-1.0).rotation_cost().is_err());
    }

    #[test]
    fn expr_cost_leaf_and_gearbox() {
        let leaf = expr_cost(&RusExpr::Const(0.3), &RotationCostModel::Constant(2.5)).unwrap();
        assert_eq!(leaf, CostDist::exact(2.5));

        let gb = RusExpr::GB(vec![
            RusExpr::Const(FRAC_PI_4),
            RusExpr::Const(FRAC_PI_4),
        ]);
        let cost = expr_cost(&gb, &RotationCostModel::Constant(1.0)).unwrap();
        // (4 + 2(1+1)) / Q with Q = (1 - 1/4)^2 + 1/16 = 0.625.
        assert!((cost.mean - 12.8).abs() < 1e-12, "mean {}", cost.mean);
    }

    #[test]
    fn expr_cost_m6_rotation_budget() {
        let cost = expr_cost(&m6(), &RotationCostModel::Constant(1.0)).unwrap();
        // At zero inputs: PAR children cost 1 + 1 + 17, Toffolis 8, P = 1/2.
        assert!((cost.mean - 54.0).abs() < 1e-9, "mean {}", cost.mean);
        // Within factor 1.5 of the quoted 40-rotation budget.
        assert!(cost.mean / 40.0 < 1.5);
    }

    #[test]
    fn expr_rotation_cost_m4() {
        let cost = expr_rotation_cost(&m4(), &[0.1, 0.1]).unwrap();
        let p = par_success_prob(&[0.1, 0.1]);
        assert!((cost.mean - 2.0 / p).abs() < 1e-12);
        assert!((cost.mean - 2.0).abs() < 0.05);
    }

    #[test]
    fn enc_cost_examples() {
        assert!((enc_cost(2) - 27.6).abs() < 1e-9);
        assert!((enc_cost(4) - 59.2).abs() < 0.05);
        assert!((enc_cost(16) - 459.0).abs() < 0.5);
    }

    #[test]
    fn baseline_reciprocal_rows() {
        let printed_euclid = [(2u32, 1.51e4), (4, 6.05e4), (8, 2.42e5), (16, 9.68e5)];
        for (n, want) in printed_euclid {
            let row = baseline_cost(BaselineMethod::Euclid, n, true).unwrap();
            assert!((row.tcount - want).abs() / want < 0.01, "euclid n={n}: {}", row.tcount);
        }
        let euclid_qubits: [(u32, u64); 4] = [(2, 12), (4, 23), (8, 44), (16, 85)];
        for (n, want) in euclid_qubits {
            assert_eq!(baseline_cost(BaselineMethod::Euclid, n, true).unwrap().qubits, want);
        }
        assert_eq!(baseline_cost(BaselineMethod::Euclid, 4, false).unwrap().qubits, 28);

        let printed_newton = [(2u32, 1.92e3), (4, 6.21e3), (8, 2.17e4), (16, 8.05e4)];
        let newton_qubits: [u64; 4] = [17, 73, 229, 625];
        for ((n, want), wq) in printed_newton.into_iter().zip(newton_qubits) {
            let row = baseline_cost(BaselineMethod::Newton, n, true).unwrap();
            assert!((row.tcount - want).abs() / want < 0.01, "newton n={n}: {}", row.tcount);
            assert_eq!(row.qubits, wq);
        }
        // The prose variant keeps the log2(n) iteration factor.
        let prose = baseline_cost(BaselineMethod::Newton, 8, false).unwrap();
        assert!((prose.tcount - (2.0 * 10788.0 * 3.0 + enc_cost(8))).abs() < 1e-9);

        let printed_lookup = [(2u32, 1.40e2), (4, 8.38e3), (8, 7.05e5), (16, 8.98e8)];
        for (n, want) in printed_lookup {
            let row = baseline_cost(BaselineMethod::TableLookupReciprocal, n, true).unwrap();
            assert!((row.tcount - want).abs() / want < 0.01, "lookup n={n}: {}", row.tcount);
            assert_eq!(row.qubits, 3);
        }
        assert!(baseline_cost(BaselineMethod::TableLookupReciprocal, 3, true).is_err());
    }

    #[test]
    fn baseline_multiplier_rows() {
        let printed_carry = [(2u32, 2.34e2), (4, 7.84e2), (8, 2.80e3), (16, 1.06e4)];
        for (n, want) in printed_carry {
            let row = baseline_cost(BaselineMethod::CarryRipple, n, true).unwrap();
            assert!((row.tcount - want).abs() / want < 0.05, "carry n={n}: {}", row.tcount);
            assert_eq!(row.qubits, 2 * n as u64);
        }
        // Table-lookup multiplier: formula as published. Its own table row
        // (3.26e6 at n=4) is not reproducible from it; keep the gap pinned.
        let special = baseline_cost(BaselineMethod::TableLookupMultiplier, 2, true).unwrap();
        assert!((special.tcount - (6656.0 + enc_cost(2))).abs() < 1e-9);
        let n4 = baseline_cost(BaselineMethod::TableLookupMultiplier, 4, true).unwrap();
        assert!((n4.tcount - (512.0 * 1032.0 + enc_cost(4))).abs() < 1e-9);
        assert!((n4.tcount - 3.26e6).abs() / 3.26e6 > 0.10);
    }

    #[test]
    fn multi_cnot_values() {
        assert_eq!(multi_cnot_tcount(2).unwrap(), 7);
        assert_eq!(multi_cnot_tcount(3).unwrap(), 22);
        assert_eq!(multi_cnot_tcount(4).unwrap(), 52);
        assert_eq!(multi_cnot_tcount(10).unwrap(), 236);
        assert!(multi_cnot_tcount(1).is_err());
    }

    #[test]
    fn cache_cost_examples() {
        // kappa/eps = 16, delta = 1/4: t = 4 + ceil(log2(4)) = 6.
        let (t16, _) = cache_cost(1.0, 1.0 / 16.0, 0.25, 0.0, 0.0).unwrap();
        assert_eq!(t16, 6);
        let (_, rot) = cache_cost(1.0, 0.5, 0.5, 7.0, 0.0).unwrap();
        assert_eq!(rot, 7.0);
        let (t, rot) = cache_cost(1.0, 1.0 / 1024.0, 0.5, 10.0, 3.0).unwrap();
        assert_eq!(t, 12);
        assert_eq!(rot, 3.0 * 4096.0 + 10.0);
        assert!(cache_cost(0.0, 0.5, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn flattened_success_probabilities() {
        assert!((flattened_gb_success(0.0) - 0.25).abs() < 1e-15);
        let g = flattened_gb_success(0.1);
        assert!((g - (0.25 - 2.5e-5)).abs() < 1e-6, "value {g}");
        // Deviation from the quartic model is O(x^6) with a bounded ratio.
        let r1 = (flattened_gb_success(0.05) - (0.25 - 0.05f64.powi(4) / 4.0)).abs()
            / 0.05f64.powi(6);
        let r2 = (flattened_gb_success(0.025) - (0.25 - 0.025f64.powi(4) / 4.0)).abs()
            / 0.025f64.powi(6);
        assert!(r1 < 2.0 && r2 < 2.0, "ratios {r1} {r2}");

        assert!((flattened_par_success(0.0, 0.0) - 0.25).abs() < 1e-15);
        // Fourth-order model; the sixth-order remainder needs small angles.
        let (a, b) = (0.05f64, 0.06f64);
        let model = 0.25 + (a * a * b * b - a.powi(4) - b.powi(4)) / 4.0;
        assert!((flattened_par_success(a, b) - model).abs() < 1e-6);
    }

    #[test]
    fn composed_gearbox_rotation_sampling() {
        let mut rng = RngStream::new(7, 0).rng();
        assert_eq!(gbk_expected_rotations(0.3, 0, &mut rng, 10).unwrap(), 1.0);
        let k1 = gbk_expected_rotations(0.05, 1, &mut rng, 4000).unwrap();
        assert!((k1 - 2.0 / gb_success_prob(&[0.05])).abs() < 0.1, "k=1 mean {k1}");
        let k4 = gbk_expected_rotations(0.1, 4, &mut rng, 2000).unwrap();
        let claim = 2f64.powf(3.5);
        assert!(k4 / claim < 2.0 && claim / k4 < 2.0, "k=4 mean {k4}");
        assert!(gbk_expected_rotations(0.1, 9, &mut rng, 10).is_err());
    }

    #[test]
    fn multiplication_cost_policy() {
        // Worst-case squaring at n=2 fits in one slice for the fourth-order
        // multiplier; the published table value is 61.1.
        let c = multiplication_tcount(&m4(), 2).unwrap();
        assert_eq!(c.slices, 1);
        assert!(c.tcount / 61.1 < 2.0 && 61.1 / c.tcount < 2.0, "tcount {}", c.tcount);
        let c4 = multiplication_tcount(&m4(), 4).unwrap();
        assert_eq!(c4.slices, 14);
        assert!(c4.tcount / 1970.0 < 2.0 && 1970.0 / c4.tcount < 2.0);
    }
}
