//! Function synthesis from rotation primitives.
//!
//! An [`RusExpr`] is a tree whose leaves are input or constant rotations and
//! whose interior nodes are gearbox (`GB`), generalized parallel (`PAR`),
//! negation, and serial-sum compositions. The tree has three consistent
//! semantics:
//!
//! * an exact output angle ([`RusExpr::eval_angle`]),
//! * a Taylor expansion around zero inputs ([`RusExpr::series`]), and
//! * a stochastic circuit execution on the statevector simulator
//!   ([`run_expr`]), where every interior node is a repeat-until-success
//!   loop.
//!
//! On top of the trees this module builds monomial approximants and
//! time-slicing, an automatic Taylor-term generator, the fourth- to
//! eighth-order multiplication formulas, large-angle product rewrites,
//! squaring/reciprocal constructions (Chebyshev and binomial), and
//! square-wave synthesis with its midpoint-interpolation fit.

use alloc::boxed::Box;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

use crate::error::Error;
use crate::linalg::{lu_solve, residual_inf};
use crate::primitives::{gb_angle, par_angle, Angle, RunTrace};
use crate::series::{gb_series, par_series, Series2};
use crate::sim::{new_state, GateOp, StateVector};
use crate::Result;

/// Coefficients this small are treated as exactly zero when generating or
/// subtracting Taylor terms.
const COEFF_TOLERANCE: f64 = 1e-12;

/// An expression tree over single-qubit X-rotation angles.
///
/// Leaves produce angles directly; interior nodes combine the angles of
/// their children:
///
/// * `Const(c)` - the fixed angle `c`.
/// * `Affine { input, scale, offset }` - `scale * x_input + offset`.
/// * `GB(children)` - gearbox: `arctan(tan^2 xi)` with
///   `sin xi = |prod sin(child)|`.
/// * `PAR(children)` - parallel: `arctan(prod tan(child))`.
/// * `Neg(child)` - negated child angle (the controlled `-iX` of the child
///   circuit is replaced by `+iX`).
/// * `Sum(children)` - serial composition; angles add.
#[derive(Debug, Clone, PartialEq)]
pub enum RusExpr {
    /// A fixed rotation angle.
    Const(Angle),
    /// `scale * inputs[input] + offset`.
    Affine {
        /// Index into the input list.
        input: usize,
        /// Multiplier applied to the input.
        scale: f64,
        /// Constant angle added to the scaled input.
        offset: Angle,
    },
    /// Gearbox composition of the children.
    GB(Vec<RusExpr>),
    /// Generalized PAR composition of the children.
    PAR(Vec<RusExpr>),
    /// Sign flip of the child's angle.
    Neg(Box<RusExpr>),
    /// Serial composition; the children's angles add.
    Sum(Vec<RusExpr>),
}

/// Shorthand for the identity leaf on input `i`.
fn aff(input: usize) -> RusExpr {
    RusExpr::Affine { input, scale: 1.0, offset: 0.0 }
}

impl RusExpr {
    /// Number of inputs the expression reads (one past the largest index).
    pub fn arity(&self) -> usize {
        match self {
            RusExpr::Const(_) => 0,
            RusExpr::Affine { input, .. } => input + 1,
            RusExpr::GB(ch) | RusExpr::PAR(ch) | RusExpr::Sum(ch) => {
                ch.iter().map(|c| c.arity()).max().unwrap_or(0)
            }
            RusExpr::Neg(c) => c.arity(),
        }
    }

    /// Exact output angle for the given inputs.
    ///
    /// Errors if an input index is out of range, a `GB`/`PAR`/`Sum` node has
    /// no children, or a PAR child angle sits at a tangent pole.
    pub fn eval_angle(&self, inputs: &[Angle]) -> Result<Angle> {
        match self {
            RusExpr::Const(c) => Ok(*c),
            RusExpr::Affine { input, scale, offset } => {
                let x = inputs.get(*input).copied().ok_or(Error::ArityMismatch {
                    expected: input + 1,
                    got: inputs.len(),
                })?;
                Ok(scale * x + offset)
            }
            RusExpr::GB(ch) => {
                let angles = Self::child_angles(ch, inputs)?;
                Ok(gb_angle(&angles))
            }
            RusExpr::PAR(ch) => {
                let angles = Self::child_angles(ch, inputs)?;
                par_angle(&angles)
            }
            RusExpr::Neg(c) => Ok(-c.eval_angle(inputs)?),
            RusExpr::Sum(ch) => {
                if ch.is_empty() {
                    return Err(Error::ArityMismatch { expected: 1, got: 0 });
                }
                let mut acc = 0.0;
                for c in ch {
                    acc += c.eval_angle(inputs)?;
                }
                Ok(acc)
            }
        }
    }

    fn child_angles(children: &[RusExpr], inputs: &[Angle]) -> Result<Vec<Angle>> {
        if children.is_empty() {
            return Err(Error::ArityMismatch { expected: 1, got: 0 });
        }
        children.iter().map(|c| c.eval_angle(inputs)).collect()
    }

    /// Taylor expansion of the output angle about zero inputs, truncated at
    /// total order `order`. Limited to expressions reading at most two
    /// inputs; `order` must be at least 1.
    pub fn series(&self, order: usize) -> Result<Series2> {
        if self.arity() > 2 {
            return Err(Error::Domain(
                "series expansion supports at most two inputs".to_string(),
            ));
        }
        if order == 0 {
            return Err(Error::Domain("series order must be at least 1".to_string()));
        }
        self.series_inner(order)
    }

    fn series_inner(&self, order: usize) -> Result<Series2> {
        match self {
            RusExpr::Const(c) => Ok(Series2::constant(order, *c)),
            RusExpr::Affine { input, scale, offset } => {
                let v = Series2::variable(order, *input);
                Ok(v.scale(*scale).add(&Series2::constant(order, *offset)))
            }
            RusExpr::GB(ch) => {
                let parts: Result<Vec<Series2>> =
                    ch.iter().map(|c| c.series_inner(order)).collect();
                gb_series(&parts?)
            }
            RusExpr::PAR(ch) => {
                let parts: Result<Vec<Series2>> =
                    ch.iter().map(|c| c.series_inner(order)).collect();
                par_series(&parts?)
            }
            RusExpr::Neg(c) => Ok(c.series_inner(order)?.neg()),
            RusExpr::Sum(ch) => {
                if ch.is_empty() {
                    return Err(Error::ArityMismatch { expected: 1, got: 0 });
                }
                let mut acc = Series2::zero(order);
                for c in ch {
                    acc = acc.add(&c.series_inner(order)?);
                }
                Ok(acc)
            }
        }
    }

    /// Number of ancilla qubits [`run_expr`] needs on top of the target.
    ///
    /// A `GB`/`PAR` node reserves one ancilla per child for the whole
    /// attempt, and its children recursively borrow from what is left, so
    /// the need is `k + max(child needs)`. Serial nodes reuse the same
    /// scratch space.
    pub fn qubit_need(&self) -> usize {
        match self {
            RusExpr::Const(_) | RusExpr::Affine { .. } => 0,
            RusExpr::GB(ch) | RusExpr::PAR(ch) => {
                ch.len() + ch.iter().map(|c| c.qubit_need()).max().unwrap_or(0)
            }
            RusExpr::Neg(c) => c.qubit_need(),
            RusExpr::Sum(ch) => ch.iter().map(|c| c.qubit_need()).max().unwrap_or(0),
        }
    }
}

impl core::fmt::Display for RusExpr {
    /// Prefix notation that round-trips through the CLI parser, e.g.
    /// `PAR(aff(0,1,0), GB(const(0.6155), aff(0,1,0)))`.
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        fn list(f: &mut core::fmt::Formatter<'_>, name: &str, ch: &[RusExpr]) -> core::fmt::Result {
            write!(f, "{name}(")?;
            for (i, c) in ch.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
        match self {
            RusExpr::Const(c) => write!(f, "const({c})"),
            RusExpr::Affine { input, scale, offset } => {
                write!(f, "aff({input},{scale},{offset})")
            }
            RusExpr::GB(ch) => list(f, "GB", ch),
            RusExpr::PAR(ch) => list(f, "PAR", ch),
            RusExpr::Neg(c) => write!(f, "neg({c})"),
            RusExpr::Sum(ch) => list(f, "sum", ch),
        }
    }
}

/// Splits a coefficient magnitude into `(copies, unit)` with
/// `copies * unit = magnitude`, `unit <= 1`, and `copies` a power of two.
fn scaled_copies(magnitude: f64) -> (usize, f64) {
    if magnitude <= 1.0 {
        (1, magnitude)
    } else {
        let copies = 1usize << (magnitude.log2().ceil() as u32);
        (copies, magnitude / copies as f64)
    }
}

/// Wraps a unit-coefficient builder with the copy-splitting and sign rules:
/// `|c| > 1` becomes a sum of `2^ceil(log2 |c|)` copies at `|c| / copies`,
/// and `c < 0` wraps the result in `Neg`.
fn signed_split<F: Fn(f64) -> RusExpr>(c: f64, build: F) -> RusExpr {
    let (copies, unit) = scaled_copies(c.abs());
    let body = if copies == 1 {
        build(unit)
    } else {
        RusExpr::Sum(vec![build(unit); copies])
    };
    if c < 0.0 {
        RusExpr::Neg(Box::new(body))
    } else {
        body
    }
}

/// Monomial approximant `c * x^b` on the given input, for `0 < |c| <= 1`.
///
/// Even powers use a gearbox seeded with `arcsin(sqrt c)`; odd powers >= 3
/// wrap the even-power gearbox in a PAR with one bare input.
fn unit_monomial(input: usize, c: f64, b: usize) -> RusExpr {
    let seed = RusExpr::Const(c.sqrt().asin());
    if b % 2 == 0 {
        let mut ch = vec![seed];
        ch.extend(core::iter::repeat(aff(input)).take(b / 2));
        RusExpr::GB(ch)
    } else {
        let mut ch = vec![seed];
        ch.extend(core::iter::repeat(aff(input)).take((b - 1) / 2));
        RusExpr::PAR(vec![aff(input), RusExpr::GB(ch)])
    }
}

/// Monomial approximant `a * x^b` on an arbitrary input index.
fn monomial_on(input: usize, a: f64, b: usize) -> RusExpr {
    assert!(b >= 1, "monomial power must be at least 1");
    assert!(a.is_finite(), "monomial coefficient must be finite");
    if b == 1 {
        return RusExpr::Affine { input, scale: a, offset: 0.0 };
    }
    signed_split(a, |unit| unit_monomial(input, unit, b))
}

/// Expression whose output angle is `a * x^b + O(x^(b+2))` for small `x`.
///
/// `b = 1` is exact (a plain scaled input). Even `b` uses
/// `GB(arcsin(sqrt a), x, ..., x)`; odd `b >= 3` uses
/// `PAR(x, GB(arcsin(sqrt a), x, ..., x))`. Coefficients with `|a| > 1` are
/// split into a sum of power-of-two many copies, and negative `a` is
/// handled by `Neg`.
pub fn monomial_expr(a: f64, b: usize) -> RusExpr {
    monomial_on(0, a, b)
}

/// Time-sliced monomial value: `r^b` serial repetitions of the monomial
/// approximant evaluated at `x / r`, which keeps the target value `a x^b`
/// while shrinking the `O(x^(b+2))` error by `1 / r^2`.
pub fn sliced_monomial_value(a: f64, b: usize, x: f64, r: usize) -> Result<Angle> {
    assert!(r >= 1, "slice count must be at least 1");
    let expr = monomial_expr(a, b);
    let slice = expr.eval_angle(&[x / r as f64])?;
    Ok((r as f64).powi(b as i32) * slice)
}

/// Builds the expression for one Taylor term `c * x^p * y^q` with both
/// exponents positive: even parts ride inside a seeded gearbox, odd
/// leftovers become direct PAR inputs.
fn cross_term(p: usize, q: usize, c: f64) -> RusExpr {
    let (ax, rx) = (p / 2, p % 2);
    let (ay, ry) = (q / 2, q % 2);
    if rx == 1 && ry == 1 && ax == 0 && ay == 0 {
        // c * x * y with no gearbox at all: tan(arctan c) = c exactly.
        return RusExpr::PAR(vec![aff(0), aff(1), RusExpr::Const(c.atan())]);
    }
    signed_split(c, |unit| {
        let mut gb_children = vec![RusExpr::Const(unit.sqrt().asin())];
        gb_children.extend(core::iter::repeat(aff(0)).take(ax));
        gb_children.extend(core::iter::repeat(aff(1)).take(ay));
        let gb = RusExpr::GB(gb_children);
        let mut par_children = Vec::new();
        if rx == 1 {
            par_children.push(aff(0));
        }
        if ry == 1 {
            par_children.push(aff(1));
        }
        if par_children.is_empty() {
            gb
        } else {
            par_children.push(gb);
            RusExpr::PAR(par_children)
        }
    })
}

/// Generates a list of expressions whose summed angles reproduce the given
/// Taylor series through total order `m` (inclusive), leaving an
/// `O(x^(m+1))` residual.
///
/// The series `f` must carry coefficients at least through order `m`, and
/// `arity` must be 1 or 2 (an arity-1 request rejects series with
/// second-variable terms). Terms are peeled lowest order first; within an
/// order, descending power of the first variable. The constant lands in a
/// `Const`, linear terms in exact `Affine` leaves, and every higher term in
/// a gearbox/PAR monomial whose full expansion is subtracted from the
/// residual before moving on.
pub fn taylor_generate(f: &Series2, arity: usize, m: usize) -> Result<Vec<RusExpr>> {
    if arity == 0 || arity > 2 {
        return Err(Error::Domain("taylor_generate supports arity 1 or 2".to_string()));
    }
    if m > f.order() {
        return Err(Error::Domain(
            "requested order exceeds the provided series".to_string(),
        ));
    }
    if arity == 1 {
        for i in 0..=f.order() {
            for j in 1..=(f.order() - i) {
                if f.coeff(i, j).abs() > COEFF_TOLERANCE {
                    return Err(Error::Domain(
                        "arity-1 series has second-variable terms".to_string(),
                    ));
                }
            }
        }
    }

    let mut residual = Series2::zero(m);
    for i in 0..=m {
        for j in 0..=(m - i) {
            residual.set_coeff(i, j, f.coeff(i, j));
        }
    }
    let mut terms = Vec::new();

    let c0 = residual.coeff(0, 0);
    if c0.abs() > COEFF_TOLERANCE {
        terms.push(RusExpr::Const(c0));
    }
    residual.set_coeff(0, 0, 0.0);

    if m >= 1 {
        for (p, q, input) in [(1, 0, 0), (0, 1, 1)] {
            let c = residual.coeff(p, q);
            if c.abs() > COEFF_TOLERANCE {
                terms.push(RusExpr::Affine { input, scale: c, offset: 0.0 });
            }
            residual.set_coeff(p, q, 0.0);
        }
    }

    for t in 2..=m {
        for p in (0..=t).rev() {
            let q = t - p;
            let c = residual.coeff(p, q);
            if c.abs() <= COEFF_TOLERANCE {
                residual.set_coeff(p, q, 0.0);
                continue;
            }
            let expr = if q == 0 {
                monomial_on(0, c, p)
            } else if p == 0 {
                monomial_on(1, c, q)
            } else {
                cross_term(p, q, c)
            };
            // A term's expansion only contains total orders >= t, and its
            // same-order content is exactly the targeted coefficient, so
            // subtracting keeps everything already matched at zero.
            residual = residual.sub(&expr.series(m)?);
            residual.set_coeff(p, q, 0.0);
            terms.push(expr);
        }
    }
    Ok(terms)
}

/// `arcsin(1/sqrt 6)`, the gearbox seed of the sixth-order multiplier.
fn gamma2() -> f64 {
    (1f64 / 6.0).sqrt().asin()
}

/// `arcsin(1/sqrt 15)`, the extra seed of the eighth-order multiplier.
fn gamma3() -> f64 {
    (1f64 / 15.0).sqrt().asin()
}

/// Shared third PAR input of the sixth- and eighth-order multipliers:
/// `pi/4 - GB(gamma2, x) - GB(gamma2, y)`.
fn order6_balance() -> RusExpr {
    RusExpr::Sum(vec![
        RusExpr::Const(FRAC_PI_4),
        RusExpr::Neg(Box::new(RusExpr::GB(vec![RusExpr::Const(gamma2()), aff(0)]))),
        RusExpr::Neg(Box::new(RusExpr::GB(vec![RusExpr::Const(gamma2()), aff(1)]))),
    ])
}

/// Fourth-order multiplier: `PAR(x, y)`, accurate to `O(x^4)`.
pub fn m4() -> RusExpr {
    RusExpr::PAR(vec![aff(0), aff(1)])
}

/// Sixth-order multiplier: `PAR(x, y, pi/4 - GB(gamma2, x) - GB(gamma2, y))`.
pub fn m6() -> RusExpr {
    RusExpr::PAR(vec![aff(0), aff(1), order6_balance()])
}

/// Eighth-order multiplier. The fourth PAR input is
/// `pi/4 - GB(gamma3, GB(x)) - GB(gamma3, GB(y)) + GB(gamma2, x, y)`.
///
/// The single-variable corrections feed the *squared* inputs (an inner
/// one-input gearbox) into the gamma3 gearbox; feeding the raw inputs
/// instead would reintroduce a second-order imbalance and drop the accuracy
/// to `O(x^4)`, inconsistent with this formula's documented error column.
pub fn m8() -> RusExpr {
    let fourth = RusExpr::Sum(vec![
        RusExpr::Const(FRAC_PI_4),
        RusExpr::Neg(Box::new(RusExpr::GB(vec![
            RusExpr::Const(gamma3()),
            RusExpr::GB(vec![aff(0)]),
        ]))),
        RusExpr::Neg(Box::new(RusExpr::GB(vec![
            RusExpr::Const(gamma3()),
            RusExpr::GB(vec![aff(1)]),
        ]))),
        RusExpr::GB(vec![RusExpr::Const(gamma2()), aff(0), aff(1)]),
    ]);
    RusExpr::PAR(vec![aff(0), aff(1), order6_balance(), fourth])
}

/// Input regime for [`big_angle_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BigAngleRegime {
    /// Both factors near 1: `xy = -1 + x + y + M(1-x, 1-y)`.
    BothNearOne,
    /// First factor near 0, second near 1: `xy = x - M(x, 1-y)`.
    Mixed,
}

/// Product of two angles outside the small-angle regime, rewritten so the
/// multiplier `m` only sees small arguments. The error is inherited from
/// `m` at the shifted inputs.
pub fn big_angle_product(
    phi1: f64,
    phi2: f64,
    regime: BigAngleRegime,
    m: &RusExpr,
) -> Result<Angle> {
    match regime {
        BigAngleRegime::BothNearOne => {
            Ok(-1.0 + phi1 + phi2 + m.eval_angle(&[1.0 - phi1, 1.0 - phi2])?)
        }
        BigAngleRegime::Mixed => Ok(phi1 - m.eval_angle(&[phi1, 1.0 - phi2])?),
    }
}

/// The three gearbox seeds of the eighth-order squaring identity for a
/// given `alpha`, as `sin^2` values: `alpha`, `alpha^2 - alpha/3`,
/// `2 alpha^3/3 - 8 alpha/45`.
fn squaring_seeds(alpha: f64) -> Result<[f64; 3]> {
    let seeds = [
        alpha,
        alpha * alpha - alpha / 3.0,
        2.0 * alpha * alpha * alpha / 3.0 - 8.0 * alpha / 45.0,
    ];
    for s in seeds {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(
                "squaring identity needs 2/sqrt(15) <= alpha <= 1".to_string(),
            ));
        }
    }
    Ok(seeds)
}

/// Eighth-order squaring identity:
/// `alpha x^2 = GB(x, arcsin sqrt(alpha))
///            - GB(x, x, arcsin sqrt(alpha^2 - alpha/3))
///            - GB(x, x, x, arcsin sqrt(2 alpha^3/3 - 8 alpha/45)) + O(x^8)`,
/// valid for `alpha` in `[2/sqrt 15, 1]` (all three arcsin arguments stay
/// in `[0, 1]`).
pub fn squaring_identity(x: f64, alpha: f64) -> Result<Angle> {
    let [s1, s2, s3] = squaring_seeds(alpha)?;
    let g1 = gb_angle(&[s1.sqrt().asin(), x]);
    let g2 = gb_angle(&[s2.sqrt().asin(), x, x]);
    let g3 = gb_angle(&[s3.sqrt().asin(), x, x, x]);
    Ok(g1 - g2 - g3)
}

/// [`squaring_identity`] as an expression over an arbitrary input leaf.
fn squaring_expr_on(alpha: f64, leaf: &RusExpr) -> Result<RusExpr> {
    let [s1, s2, s3] = squaring_seeds(alpha)?;
    let seeded = |s: f64, copies: usize| {
        let mut ch = vec![RusExpr::Const(s.sqrt().asin())];
        ch.extend(core::iter::repeat(leaf.clone()).take(copies));
        RusExpr::GB(ch)
    };
    Ok(RusExpr::Sum(vec![
        seeded(s1, 1),
        RusExpr::Neg(Box::new(seeded(s2, 2))),
        RusExpr::Neg(Box::new(seeded(s3, 3))),
    ]))
}

/// Expression computing `alpha x^2 + O(x^8)` from input 0 via
/// [`squaring_identity`].
pub fn squaring_expr(alpha: f64) -> Result<RusExpr> {
    squaring_expr_on(alpha, &aff(0))
}

/// A univariate polynomial `c_0 + c_1 y + ... + c_p y^p`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PolynomialApprox {
    /// Monomial coefficients, lowest order first.
    pub coefficients: Vec<f64>,
}

impl PolynomialApprox {
    /// Evaluates the polynomial by Horner's rule.
    pub fn eval(&self, y: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * y + c)
    }
}

/// Degree-`degree` Chebyshev approximant to `1/(1-y)` on `y in [0, 1/2]`,
/// expanded into monomial coefficients.
///
/// With `t = 4y - 1` the target is `4/(3-t)`, whose Chebyshev expansion has
/// the closed form `sqrt 2 + 2 sqrt 2 sum_n rho^(-n) T_n(t)` with
/// `rho = 3 + 2 sqrt 2`; truncating at `degree` and converting `T_n(4y-1)`
/// to monomials gives the returned coefficients.
pub fn chebyshev_reciprocal(degree: usize) -> PolynomialApprox {
    let rho = 3.0 + 2.0 * 2f64.sqrt();
    let c0 = 2f64.sqrt();
    // Chebyshev polynomials in y via T_{n+1}(t) = 2 t T_n - T_{n-1},
    // t = 4y - 1, kept as monomial coefficient vectors.
    let mut coeffs = vec![0.0; degree + 1];
    let mut t_prev = vec![0.0; degree + 1];
    t_prev[0] = 1.0;
    for (i, c) in t_prev.iter().enumerate().take(degree + 1) {
        coeffs[i] += c0 * c;
    }
    if degree == 0 {
        return PolynomialApprox { coefficients: coeffs };
    }
    let mut t_cur = vec![0.0; degree + 1];
    t_cur[0] = -1.0;
    t_cur[1] = 4.0;
    let mut cheb_coeff = 2.0 * 2f64.sqrt() / rho;
    for (i, c) in t_cur.iter().enumerate() {
        coeffs[i] += cheb_coeff * c;
    }
    for _ in 2..=degree {
        // t_next = 2 (4y - 1) t_cur - t_prev.
        let mut t_next = vec![0.0; degree + 1];
        for i in 0..degree {
            t_next[i + 1] += 8.0 * t_cur[i];
        }
        for i in 0..=degree {
            t_next[i] -= 2.0 * t_cur[i] + t_prev[i];
        }
        cheb_coeff /= rho;
        for (i, c) in t_next.iter().enumerate() {
            coeffs[i] += cheb_coeff * c;
        }
        t_prev = t_cur;
        t_cur = t_next;
    }
    PolynomialApprox { coefficients: coeffs }
}

/// Expression realizing the degree-2 Chebyshev reciprocal `R2` from input 0
/// (the variable `y`).
///
/// The quadratic `A + B y + C y^2` is restructured through the midpoint
/// identity `y^2 = (y - 1/4)^2 + y/2 - 1/16`, so the only nonlinear work is
/// `C (y - 1/4)^2`, realized as four copies of the eighth-order squaring
/// identity at `alpha = C/4` (which sits inside its `[2/sqrt 15, 1]`
/// domain). The constant and linear parts are exact leaves.
pub fn assemble_r2() -> RusExpr {
    let p = chebyshev_reciprocal(2);
    let (a, b, c) = (p.coefficients[0], p.coefficients[1], p.coefficients[2]);
    let shifted = RusExpr::Affine { input: 0, scale: 1.0, offset: -0.25 };
    let square = squaring_expr_on(c / 4.0, &shifted)
        .expect("C/4 ~ 0.666 is inside the squaring identity's domain");
    let mut parts = vec![
        RusExpr::Const(a - c / 16.0),
        RusExpr::Affine { input: 0, scale: b + c / 2.0, offset: 0.0 },
    ];
    parts.extend(core::iter::repeat(square).take(4));
    RusExpr::Sum(parts)
}

/// Closed form of the binomial reciprocal approximation:
/// `(1 - y^(2^n)) / (1 - y) = prod_{j<n} (1 + y^(2^j))`.
pub fn binomial_reciprocal_value(y: f64, n_stages: u32) -> f64 {
    if y == 0.0 {
        return 1.0;
    }
    let top = 1.0 - y.powi(1 << n_stages);
    top / (1.0 - y)
}

/// The literal product `prod_{j=0}^{n-1} (1 + y^(2^j))`.
pub fn binomial_product(y: f64, n_stages: u32) -> f64 {
    let mut acc = 1.0;
    let mut power = y;
    for _ in 0..n_stages {
        acc *= 1.0 + power;
        power *= power;
    }
    acc
}

/// Relative error of the `n`-stage binomial reciprocal: exactly `y^(2^n)`,
/// which respects the `2^(-2^n)` bound on `y in [0, 1/2]`.
pub fn binomial_error(y: f64, n_stages: u32) -> f64 {
    y.powi(1 << n_stages)
}

/// Rescales a positive value into the reciprocal method's input variable:
/// returns `(shift, y)` with `shift = ceil(log2 a)` and
/// `y = 1 - 2^(-shift) a`, so that `1/a = 2^(-shift) / (1 - y)` with
/// `y in [0, 1/2]`.
///
/// Errors if `a <= 0` or `a >= 2^m` for the declared bit width `m`.
pub fn normalize_input(a: f64, m: u32) -> Result<(i32, f64)> {
    if !(a > 0.0) {
        return Err(Error::Domain("normalize_input requires a > 0".to_string()));
    }
    if a >= (m as f64).exp2() {
        return Err(Error::Domain("input exceeds the declared bit width".to_string()));
    }
    let shift = a.log2().ceil() as i32;
    let y = 1.0 - a * (-shift as f64).exp2();
    Ok((shift, y))
}

/// `k`-fold composed gearbox on a single angle: `arctan(tan^(2^k) x)`.
///
/// `k = 0` returns `x` unchanged. Errors at a tangent pole of `x`; large
/// tangent powers saturate cleanly to `pi/2` through the `exp`/`atan`
/// limits.
pub fn gb_iterate(x: f64, k: u32) -> Result<Angle> {
    if k == 0 {
        return Ok(x);
    }
    if x.cos().abs() < 1e-12 {
        return Err(Error::TangentPole { input_index: 0 });
    }
    Ok(composed_wave(x, k))
}

/// Saturating composed-gearbox evaluator used for square-wave basis
/// assembly: `arctan(|tan u|^(2^k))`, with the tangent pole mapped to its
/// `pi/2` limit instead of an error.
fn composed_wave(u: f64, k: u32) -> f64 {
    let c = u.cos().abs();
    if c < 1e-12 {
        return FRAC_PI_2;
    }
    let log_tan = (u.sin().abs() / c).ln();
    (log_tan * (2f64).powi(k as i32)).exp().atan()
}

/// Nested-expression form of the `k`-fold composed gearbox on input 0.
pub fn gb_iterate_expr(k: u32) -> RusExpr {
    let mut expr = aff(0);
    for _ in 0..k {
        expr = RusExpr::GB(vec![expr]);
    }
    expr
}

/// A square-wave interpolation of a function on an interval.
///
/// The basis function for period `T_j` is
/// `S_j(x) = (4/pi) (GB^(k)((x - anchor) pi / T_j + pi/4) - pi/4)`,
/// where the anchor is the padded interval's left edge; each `S_j` ramps
/// between -1 and +1 with period `T_j`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SquareWaveFit {
    /// Interpolation weights `a_j`, one per basis wave.
    pub coefficients: Vec<f64>,
    /// Periods `T_j = 2 L j / N` over the padded length `L`.
    pub periods: Vec<f64>,
    /// Interpolation midpoints on the padded interval.
    pub midpoints: Vec<f64>,
    /// Gearbox recursion order of the basis waves.
    pub k: u32,
    /// Padding added to each side of the requested interval.
    pub padding: f64,
    /// The requested (unpadded) interval.
    pub interval: (f64, f64),
}

impl SquareWaveFit {
    /// Left edge of the padded interval; the phase reference of every wave.
    pub fn anchor(&self) -> f64 {
        self.interval.0 - self.padding
    }
}

/// Smoothed square-wave basis function of period `t_j` anchored at
/// `anchor`, evaluated at `x`.
fn wave_basis(x: f64, anchor: f64, t_j: f64, k: u32) -> f64 {
    let u = (x - anchor) * PI / t_j + FRAC_PI_4;
    (4.0 / PI) * (composed_wave(u, k) - FRAC_PI_4)
}

/// Ideal (infinite-`k`) square wave of period `t_j`: exactly +-1.
fn ideal_wave_basis(x: f64, anchor: f64, t_j: f64) -> f64 {
    let u = (x - anchor) * PI / t_j + FRAC_PI_4;
    let c = u.cos().abs();
    if u.sin().abs() >= c {
        1.0
    } else {
        -1.0
    }
}

/// Fits `f` on `[x_min, x_max]` with `n` smoothed square waves of gearbox
/// order `k`, by interpolation at the midpoints of the padded interval.
///
/// `padding` defaults to `0.1 (x_max - x_min)` on each side; the padded
/// interval supplies the midpoints, periods, and the common anchor. The
/// dense midpoint system is solved by pivoted LU; a singular system or a
/// relative residual above `1e-8` is reported as an error.
pub fn square_wave_fit<F: Fn(f64) -> f64>(
    f: F,
    x_min: f64,
    x_max: f64,
    n: usize,
    k: u32,
    padding: Option<f64>,
) -> Result<SquareWaveFit> {
    if n == 0 {
        return Err(Error::Domain("at least one square wave is required".to_string()));
    }
    if !(x_max > x_min) {
        return Err(Error::Domain("empty interpolation interval".to_string()));
    }
    let delta = padding.unwrap_or(0.1 * (x_max - x_min));
    if !(delta >= 0.0) {
        return Err(Error::Domain("padding must be nonnegative".to_string()));
    }
    let lo = x_min - delta;
    let length = (x_max + delta) - lo;
    let nf = n as f64;
    let midpoints: Vec<f64> = (1..=n)
        .map(|i| lo + length * (i as f64 - 0.5) / nf)
        .collect();
    let periods: Vec<f64> = (1..=n).map(|j| 2.0 * length * j as f64 / nf).collect();

    let mut matrix = vec![0.0; n * n];
    for (i, &x) in midpoints.iter().enumerate() {
        for (j, &t) in periods.iter().enumerate() {
            matrix[i * n + j] = wave_basis(x, lo, t, k);
        }
    }
    let rhs: Vec<f64> = midpoints.iter().map(|&x| f(x)).collect();
    let coefficients = lu_solve(matrix.clone(), rhs.clone(), n)?;

    let residual = residual_inf(&matrix, &coefficients, &rhs, n);
    let scale = rhs.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let bound = 1e-8 * scale;
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }
    Ok(SquareWaveFit {
        coefficients,
        periods,
        midpoints,
        k,
        padding: delta,
        interval: (x_min, x_max),
    })
}

/// Evaluates a square-wave fit at `x` using the order-`k` smoothed waves.
pub fn square_wave_eval(fit: &SquareWaveFit, x: f64) -> f64 {
    let anchor = fit.anchor();
    fit.coefficients
        .iter()
        .zip(fit.periods.iter())
        .map(|(&a, &t)| a * wave_basis(x, anchor, t, fit.k))
        .sum()
}

/// Evaluates a square-wave fit at `x` with ideal (+-1) square waves — the
/// limit the smoothed basis approaches as `k` grows.
pub fn square_wave_ideal_eval(fit: &SquareWaveFit, x: f64) -> f64 {
    let anchor = fit.anchor();
    fit.coefficients
        .iter()
        .zip(fit.periods.iter())
        .map(|(&a, &t)| a * ideal_wave_basis(x, anchor, t))
        .sum()
}

/// Expression for one weighted square-wave term `a_j S_j(x)` over input 0.
///
/// Each chunk `c <= pi/8` of the weight becomes
/// `GB(arctan(sqrt(tan 2c)), GB^(k)((x - anchor) pi / T_j + pi/4)) - c`,
/// which evaluates to `+c` where the composed gearbox saturates at `pi/2`
/// and to `-c` where it sits at 0. Weights above `pi/8` are split into
/// equal chunks; negative weights wrap the sum in `Neg`.
pub fn square_wave_expr_term(a_j: f64, t_j: f64, k: u32, anchor: f64) -> Result<RusExpr> {
    if !a_j.is_finite() || !t_j.is_finite() || t_j <= 0.0 {
        return Err(Error::Domain("square-wave term needs finite a_j and T_j > 0".to_string()));
    }
    if a_j == 0.0 {
        return Ok(RusExpr::Const(0.0));
    }
    let magnitude = a_j.abs();
    let chunks = (magnitude / (PI / 8.0)).ceil() as usize;
    let chunk = magnitude / chunks as f64;
    let seed = (2.0 * chunk).tan();
    if seed < 0.0 {
        return Err(Error::Domain("chunking failed to reach tan(2c) >= 0".to_string()));
    }
    let inner_leaf = RusExpr::Affine {
        input: 0,
        scale: PI / t_j,
        offset: -anchor * PI / t_j + FRAC_PI_4,
    };
    let mut inner = inner_leaf;
    for _ in 0..k {
        inner = RusExpr::GB(vec![inner]);
    }
    let one_chunk = RusExpr::Sum(vec![
        RusExpr::GB(vec![RusExpr::Const(seed.sqrt().atan()), inner]),
        RusExpr::Const(-chunk),
    ]);
    let body = if chunks == 1 {
        one_chunk
    } else {
        RusExpr::Sum(vec![one_chunk; chunks])
    };
    Ok(if a_j < 0.0 { RusExpr::Neg(Box::new(body)) } else { body })
}

/// Executes an expression tree as a live repeat-until-success circuit.
///
/// A fresh register of `1 + qubit_need()` qubits is allocated with the
/// target at qubit 0 and every other qubit in an ancilla pool. Leaves apply
/// their rotation directly. A gearbox node rotates one pooled ancilla per
/// child (running child sub-circuits in place), applies the
/// ancilla-controlled `-iX` (or `+iX` under negation), uncomputes the
/// children with negated sign, and measures; failures are fixed with
/// `RotX(+-pi/4)` and retried. A PAR node requires its target in `|0>` (the
/// wrong-sign GHZ branch is only Z-correctable there), so PAR may appear at
/// the root, under `Sum`/`Neg` while the running angle is still zero, or as
/// a PAR child — but not under a gearbox, whose uncompute leg would hand it
/// a rotated target; that case returns a domain error.
///
/// `max_attempts` budgets each node activation separately. The trace
/// accumulates attempts, leaf rotations (every `Const`/`Affine`
/// application, compute and uncompute alike), and Clifford corrections over
/// the whole tree; `outcome_angle` reports the exact composed angle.
pub fn run_expr<R: Rng + ?Sized>(
    expr: &RusExpr,
    inputs: &[Angle],
    rng: &mut R,
    max_attempts: u64,
) -> Result<(StateVector, RunTrace)> {
    let outcome_angle = expr.eval_angle(inputs)?;
    let n = 1 + expr.qubit_need();
    let mut state = new_state(n)?;
    let mut pool: Vec<usize> = (1..n).rev().collect();
    let mut trace = RunTrace {
        attempts: 0,
        leaf_rotations: 0,
        outcome_angle,
        corrections: 0,
    };
    run_node(expr, inputs, 1.0, &mut state, 0, &mut pool, rng, max_attempts, &mut trace)?;
    Ok((state, trace))
}

/// Recursive worker for [`run_expr`]; `sign` carries accumulated `Neg`s.
#[allow(clippy::too_many_arguments)]
fn run_node<R: Rng + ?Sized>(
    expr: &RusExpr,
    inputs: &[Angle],
    sign: f64,
    state: &mut StateVector,
    target: usize,
    pool: &mut Vec<usize>,
    rng: &mut R,
    max_attempts: u64,
    trace: &mut RunTrace,
) -> Result<()> {
    match expr {
        RusExpr::Const(_) | RusExpr::Affine { .. } => {
            let angle = expr.eval_angle(inputs)?;
            state.apply_gate(&GateOp::RotX { qubit: target, angle: sign * angle })?;
            trace.leaf_rotations += 1;
            Ok(())
        }
        RusExpr::Neg(child) => {
            run_node(child, inputs, -sign, state, target, pool, rng, max_attempts, trace)
        }
        RusExpr::Sum(children) => {
            if children.is_empty() {
                return Err(Error::ArityMismatch { expected: 1, got: 0 });
            }
            for child in children {
                run_node(child, inputs, sign, state, target, pool, rng, max_attempts, trace)?;
            }
            Ok(())
        }
        RusExpr::GB(children) => {
            let ancillas = take_ancillas(pool, children.len())?;
            let result = run_gb_node(
                children, inputs, sign, state, target, &ancillas, pool, rng, max_attempts, trace,
            );
            release_ancillas(pool, ancillas);
            result
        }
        RusExpr::PAR(children) => {
            let ancillas = take_ancillas(pool, children.len())?;
            let result = run_par_node(
                children, inputs, sign, state, target, &ancillas, pool, rng, max_attempts, trace,
            );
            release_ancillas(pool, ancillas);
            result
        }
    }
}

fn take_ancillas(pool: &mut Vec<usize>, count: usize) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    if pool.len() < count {
        return Err(Error::RegisterTooLarge { requested: count, max: pool.len() });
    }
    Ok((0..count).map(|_| pool.pop().expect("checked length")).collect())
}

fn release_ancillas(pool: &mut Vec<usize>, ancillas: Vec<usize>) {
    for a in ancillas.into_iter().rev() {
        pool.push(a);
    }
}

/// Measures `qubit` and restores it to `|0>` (X after a 1 outcome).
fn measure_and_reset<R: Rng + ?Sized>(
    state: &mut StateVector,
    qubit: usize,
    rng: &mut R,
) -> Result<bool> {
    let outcome = state.measure(qubit, rng)?;
    if outcome {
        state.apply_gate(&GateOp::MultiControlledIX {
            controls: Vec::new(),
            target: qubit,
            phase_exponent: 0,
        })?;
    }
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn run_gb_node<R: Rng + ?Sized>(
    children: &[RusExpr],
    inputs: &[Angle],
    sign: f64,
    state: &mut StateVector,
    target: usize,
    ancillas: &[usize],
    pool: &mut Vec<usize>,
    rng: &mut R,
    max_attempts: u64,
    trace: &mut RunTrace,
) -> Result<()> {
    // -iX for the positive circuit, +iX for the negated one; the failure
    // branch applies e^{+-i pi X/4} correspondingly.
    let phase_exponent = if sign > 0.0 { 3 } else { 1 };
    for _ in 0..max_attempts {
        trace.attempts += 1;
        for (child, &a) in children.iter().zip(ancillas) {
            run_node(child, inputs, 1.0, state, a, pool, rng, max_attempts, trace)?;
        }
        state.apply_gate(&GateOp::MultiControlledIX {
            controls: ancillas.to_vec(),
            target,
            phase_exponent,
        })?;
        for (child, &a) in children.iter().zip(ancillas).rev() {
            run_node(child, inputs, -1.0, state, a, pool, rng, max_attempts, trace)?;
        }
        let mut success = true;
        for &a in ancillas {
            success &= !measure_and_reset(state, a, rng)?;
        }
        if success {
            return Ok(());
        }
        state.apply_gate(&GateOp::RotX { qubit: target, angle: sign * FRAC_PI_4 })?;
        trace.corrections += 1;
    }
    Err(Error::AttemptsExhausted { trace: trace.clone() })
}

#[allow(clippy::too_many_arguments)]
fn run_par_node<R: Rng + ?Sized>(
    children: &[RusExpr],
    inputs: &[Angle],
    sign: f64,
    state: &mut StateVector,
    target: usize,
    ancillas: &[usize],
    pool: &mut Vec<usize>,
    rng: &mut R,
    max_attempts: u64,
    trace: &mut RunTrace,
) -> Result<()> {
    if state.prob_zero(target)? < 1.0 - 1e-9 {
        return Err(Error::Domain(
            "PAR composition requires its target in |0>; the wrong-sign branch \
             is not Z-correctable on a rotated target"
                .to_string(),
        ));
    }
    let k = children.len();
    for _ in 0..max_attempts {
        trace.attempts += 1;
        for (j, (child, &a)) in children.iter().zip(ancillas).enumerate() {
            // Negation flips the sign of one PAR input (the angle is odd in
            // each input); route it through the first child.
            let child_sign = if j == 0 { sign } else { 1.0 };
            run_node(child, inputs, child_sign, state, a, pool, rng, max_attempts, trace)?;
        }
        state.apply_gate(&GateOp::MultiControlledIX {
            controls: ancillas.to_vec(),
            target,
            phase_exponent: ((k - 1) % 4) as u8,
        })?;
        state.apply_ghz_inverse(ancillas)?;
        let mut record = Vec::with_capacity(k);
        for &a in ancillas {
            record.push(measure_and_reset(state, a, rng)?);
        }
        let all_zero = record.iter().all(|&b| !b);
        let ghz_minus = record[0] && record[1..].iter().all(|&b| !b);
        if all_zero {
            return Ok(());
        }
        if ghz_minus {
            state.apply_gate(&GateOp::PauliZ { qubit: target })?;
            trace.corrections += 1;
            return Ok(());
        }
        // Any other record applied the identity; retry without correction.
    }
    Err(Error::AttemptsExhausted { trace: trace.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
        a.overlap(b).unwrap().norm()
    }

    #[test]
    fn eval_angle_composed_circuits() {
        // PAR(GB(x1), x2) = arctan(tan^2(x1) tan(x2)).
        let expr = RusExpr::PAR(vec![RusExpr::GB(vec![aff(0)]), aff(1)]);
        let got = expr.eval_angle(&[0.2, 0.3]).unwrap();
        let want = (0.2f64.tan().powi(2) * 0.3f64.tan()).atan();
        assert!((got - want).abs() < 1e-15);

        let sum = RusExpr::Sum(vec![RusExpr::Const(0.1), RusExpr::Const(0.2)]);
        assert!((sum.eval_angle(&[]).unwrap() - 0.3).abs() < 1e-15);

        let neg = RusExpr::Neg(Box::new(RusExpr::Const(0.4)));
        assert_eq!(neg.eval_angle(&[]).unwrap(), -0.4);
    }

    #[test]
    fn eval_angle_checks_arity() {
        let expr = aff(1);
        assert!(matches!(
            expr.eval_angle(&[0.2]),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn display_round_trip_format() {
        let expr = RusExpr::PAR(vec![
            aff(0),
            RusExpr::GB(vec![RusExpr::Const(0.6155), aff(0)]),
        ]);
        assert_eq!(
            alloc::format!("{expr}"),
            "PAR(aff(0,1,0), GB(const(0.6155), aff(0,1,0)))"
        );
    }

    #[test]
    fn monomial_quadratic_leading_order() {
        let expr = monomial_expr(1.0, 2);
        let v = expr.eval_angle(&[0.1]).unwrap();
        assert!((v - 0.01).abs() < 1e-4, "value {v}");
        // Ratio test: eval(x)/x^2 -> 1 as x -> 0.
        let small = expr.eval_angle(&[1e-3]).unwrap();
        assert!((small / 1e-6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn monomial_cubic_ratio() {
        let expr = monomial_expr(0.5, 3);
        let v = expr.eval_angle(&[0.1]).unwrap();
        assert!((v / 1e-3 - 0.5).abs() / 0.5 < 2e-2, "ratio {}", v / 1e-3);
    }

    #[test]
    fn monomial_large_coefficient_splits() {
        let expr = monomial_expr(3.0, 2);
        match &expr {
            RusExpr::Sum(ch) => assert_eq!(ch.len(), 4),
            other => panic!("expected a 4-copy sum, got {other}"),
        }
        let v = expr.eval_angle(&[0.05]).unwrap();
        let want = 3.0 * 0.0025;
        assert!((v / want - 1.0).abs() < 1e-2, "ratio {}", v / want);
    }

    #[test]
    fn monomial_linear_is_exact() {
        let expr = monomial_expr(-2.5, 1);
        assert_eq!(expr.eval_angle(&[0.3]).unwrap(), -0.75);
    }

    #[test]
    fn sliced_monomial_error_shrinks_quadratically() {
        let e1 = (sliced_monomial_value(1.0, 2, 0.5, 1).unwrap() - 0.25).abs();
        assert!((e1 - 4.00309e-2).abs() < 1e-6, "r=1 error {e1}");
        let e2 = (sliced_monomial_value(1.0, 2, 0.5, 2).unwrap() - 0.25).abs();
        assert!((e2 - e1 / 4.0).abs() < 2e-3, "r=2 error {e2}");
        assert_eq!(sliced_monomial_value(1.0, 2, 0.0, 7).unwrap(), 0.0);
        for r in [2usize, 4, 8] {
            let err = (sliced_monomial_value(1.0, 2, 0.5, r).unwrap() - 0.25).abs();
            let c = err * (r * r) as f64;
            assert!((c - 2.0 / 3.0 * 0.0625).abs() / (2.0 / 3.0 * 0.0625) < 0.1,
                "c/r^2 fit broke at r={r}: {c}");
        }
    }

    #[test]
    fn taylor_generate_square() {
        let mut f = Series2::zero(4);
        f.set_coeff(2, 0, 1.0);
        let terms = taylor_generate(&f, 1, 4).unwrap();
        // x^2 needs the quadratic gearbox plus one quartic counterterm.
        assert_eq!(terms.len(), 2);
        let total = |x: f64| -> f64 {
            terms.iter().map(|t| t.eval_angle(&[x]).unwrap()).sum()
        };
        // (f - approx)/x^4 stays bounded as x -> 0 (the order-4 coefficient
        // is matched, so the ratio actually tends to zero).
        for x in [0.1, 0.05, 0.025] {
            let ratio = (total(x) - x * x).abs() / x.powi(4);
            assert!(ratio < 0.1, "ratio {ratio} at x={x}");
        }
    }

    #[test]
    fn taylor_generate_constant() {
        let f = Series2::constant(3, 0.37);
        let terms = taylor_generate(&f, 1, 3).unwrap();
        assert_eq!(terms, alloc::vec![RusExpr::Const(0.37)]);
    }

    #[test]
    fn taylor_generate_product_matches_sixth_order() {
        let mut f = Series2::zero(5);
        f.set_coeff(1, 1, 1.0);
        let terms = taylor_generate(&f, 2, 5).unwrap();
        let total: f64 = terms
            .iter()
            .map(|t| t.eval_angle(&[0.05, 0.05]).unwrap())
            .sum();
        assert!((total - 0.0025).abs() <= 1e-8, "error {}", (total - 0.0025).abs());
    }

    #[test]
    fn taylor_generate_validates_request() {
        let f = Series2::zero(3);
        assert!(taylor_generate(&f, 3, 2).is_err());
        assert!(taylor_generate(&f, 1, 5).is_err());
        let mut g = Series2::zero(3);
        g.set_coeff(0, 1, 1.0);
        assert!(taylor_generate(&g, 1, 3).is_err());
    }

    #[test]
    fn multiplication_formulas_match_closed_forms() {
        // M4 = PAR(x, y) exactly.
        let g4 = m4().eval_angle(&[0.3, 0.7]).unwrap();
        assert!((g4 - par_angle(&[0.3, 0.7]).unwrap()).abs() < 1e-15);
        // M6's third input equals pi/4 - GB(g2, x) - GB(g2, y).
        let third = RusExpr::Sum(vec![
            RusExpr::Const(FRAC_PI_4),
            RusExpr::Neg(Box::new(RusExpr::GB(vec![RusExpr::Const(gamma2()), aff(0)]))),
            RusExpr::Neg(Box::new(RusExpr::GB(vec![RusExpr::Const(gamma2()), aff(1)]))),
        ]);
        let want3 = FRAC_PI_4 - gb_angle(&[gamma2(), 0.2]) - gb_angle(&[gamma2(), 0.4]);
        assert!((third.eval_angle(&[0.2, 0.4]).unwrap() - want3).abs() < 1e-15);
        let g6 = m6().eval_angle(&[0.2, 0.4]).unwrap();
        let want6 = (0.2f64.tan() * 0.4f64.tan() * want3.tan()).atan();
        assert!((g6 - want6).abs() < 1e-15);
    }

    #[test]
    fn multiplication_error_table_small_angles() {
        let sq_err = |e: &RusExpr, x: f64| (e.eval_angle(&[x, x]).unwrap() - x * x).abs();
        let e4 = sq_err(&m4(), 0.01);
        assert!((e4 - 6.7e-9).abs() < 5e-11, "M4 at 0.01: {e4:.3e}");
        let e6 = sq_err(&m6(), 0.05);
        assert!((e6 - 1.0e-9).abs() < 5e-11, "M6 at 0.05: {e6:.3e}");
        let e8 = sq_err(&m8(), 0.5);
        assert!((e8 - 1.9e-3).abs() < 5e-5, "M8 at 0.5: {e8:.3e}");
    }

    #[test]
    fn multiplication_orders_by_series() {
        // Leading error orders: M4 at total order 4, M6 at 6, M8 at 8.
        let check = |expr: &RusExpr, order: usize| {
            let s = expr.series(order).unwrap();
            for i in 0..=order {
                for j in 0..=(order - i) {
                    let want = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                    let c = s.coeff(i, j);
                    if i + j < order {
                        assert!(
                            (c - want).abs() < 1e-10,
                            "order {order}: coeff({i},{j}) = {c}"
                        );
                    }
                }
            }
        };
        check(&m4(), 4);
        check(&m6(), 6);
        check(&m8(), 8);
    }

    #[test]
    fn big_angle_product_regimes() {
        let m = m4();
        let exact = big_angle_product(1.0, 1.0, BigAngleRegime::BothNearOne, &m).unwrap();
        assert_eq!(exact, 1.0);
        let zero = big_angle_product(0.0, 0.97, BigAngleRegime::Mixed, &m).unwrap();
        assert_eq!(zero, 0.0);
        let near = big_angle_product(0.95, 0.98, BigAngleRegime::BothNearOne, &m).unwrap();
        let err = (near - 0.931).abs();
        // Error inherited from M4 at (0.05, 0.02): (x^3 y + x y^3)/3 ~ 9.7e-7.
        assert!((err - 9.67e-7).abs() < 1e-8, "error {err:.3e}");
    }

    #[test]
    fn squaring_identity_examples() {
        assert_eq!(squaring_identity(0.0, 1.0).unwrap(), 0.0);
        // At alpha = 1 the second and third arcsin arguments are
        // sqrt(2/3) and sqrt(22/45).
        let [s1, s2, s3] = squaring_seeds(1.0).unwrap();
        assert_eq!(s1, 1.0);
        assert!((s2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((s3 - 22.0 / 45.0).abs() < 1e-15);
        // High-precision reference: error 5.6018e-9 (leading coefficient
        // of the eighth-order residual is about 0.559).
        let v = squaring_identity(0.1, 1.0).unwrap();
        let err = (v - 0.01).abs();
        assert!((err - 5.60175e-9).abs() < 1e-12 && err < 6e-9, "error {err:.5e}");
        // Below the domain edge the third seed goes negative.
        assert!(squaring_identity(0.1, 0.4).is_err());
    }

    #[test]
    fn squaring_expr_matches_identity() {
        let expr = squaring_expr(0.7).unwrap();
        for x in [0.0, 0.08, -0.13] {
            let want = squaring_identity(x, 0.7).unwrap();
            let got = expr.eval_angle(&[x]).unwrap();
            assert!((got - want).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn chebyshev_constant_terms() {
        // Published constants are rounded from a slightly different
        // computation; the analytic values agree to ~1e-6.
        let r2 = chebyshev_reciprocal(2);
        assert!((r2.eval(0.0) - 1.012194).abs() < 2e-6, "R2(0) = {}", r2.eval(0.0));
        assert_eq!(r2.coefficients.len(), 3);
        let r4 = chebyshev_reciprocal(4);
        assert!((r4.eval(0.0) - 1.000359).abs() < 2e-6);
        let r6 = chebyshev_reciprocal(6);
        assert!((r6.eval(0.0) - 1.000012).abs() < 2e-6);
    }

    #[test]
    fn chebyshev_r4_published_coefficients() {
        // Monomial coefficients as published for the degree-4 approximant;
        // the source rounds slightly differently (about 1e-3 in the high
        // coefficients), so the comparison is loose.
        let r4 = chebyshev_reciprocal(4);
        let printed = [1.000359, 0.966359, 1.490195, -1.362554, 5.019604];
        for (got, want) in r4.coefficients.iter().zip(printed.iter()) {
            assert!((got - want).abs() < 2e-3, "{got} vs {want}");
        }
    }

    #[test]
    fn chebyshev_max_errors_on_grid() {
        // Realized sup errors on [0, 1/2] for degrees 2/4/6. The degree-4
        // value rounds to its published 5.1e-4; the degree-2 and degree-6
        // sups (1.72e-2, 1.49e-5) do not reproduce their published
        // 1.6e-2 / 1.2e-5 under any grid convention tried.
        let sup = |p: &PolynomialApprox| {
            let mut worst = 0.0f64;
            for i in 0..=20_000 {
                let y = 0.5 * i as f64 / 20_000.0;
                worst = worst.max((p.eval(y) - 1.0 / (1.0 - y)).abs());
            }
            worst
        };
        let e2 = sup(&chebyshev_reciprocal(2));
        let e4 = sup(&chebyshev_reciprocal(4));
        let e6 = sup(&chebyshev_reciprocal(6));
        assert!((e2 - 1.724e-2).abs() < 2e-5, "R2 sup {e2:.4e}");
        assert!((e4 - 5.08e-4).abs() < 2e-6, "R4 sup {e4:.4e}");
        assert!((e6 - 1.49e-5).abs() < 2e-7, "R6 sup {e6:.4e}");
    }

    #[test]
    fn assemble_r2_tracks_the_polynomial() {
        let expr = assemble_r2();
        let poly = chebyshev_reciprocal(2);
        for y in [0.0, 0.1, 0.25, 0.35, 0.5] {
            let got = expr.eval_angle(&[y]).unwrap();
            // The squaring identity contributes only O((y - 1/4)^8).
            assert!(
                (got - poly.eval(y)).abs() < 2e-5,
                "y={y}: expr {got} vs poly {}",
                poly.eval(y)
            );
        }
        let err = (expr.eval_angle(&[0.35]).unwrap() - 1.0 / (1.0 - 0.35)).abs();
        assert!(err <= 0.016 + 1e-3, "reciprocal error {err}");
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_reciprocal_value(0.0, 3), 1.0);
        assert_eq!(binomial_reciprocal_value(0.5, 2), 1.875);
        assert_eq!(binomial_error(0.5, 2), 0.0625);
        assert_eq!(binomial_error(0.5, 5), 2f64.powi(-32));
        for n in 0..=6 {
            for i in 0..=10 {
                let y = 0.05 * i as f64;
                let lit = binomial_product(y, n);
                let closed = binomial_reciprocal_value(y, n);
                assert!((lit - closed).abs() < 1e-14, "y={y} n={n}");
                assert!(binomial_error(y, n) <= 2f64.powi(-(1 << n)) + 1e-15);
            }
        }
    }

    #[test]
    fn normalize_input_examples() {
        assert_eq!(normalize_input(1.0, 8).unwrap(), (0, 0.0));
        assert_eq!(normalize_input(8.0, 8).unwrap(), (3, 0.0));
        assert_eq!(normalize_input(5.0, 8).unwrap(), (3, 0.375));
        let (shift, y) = normalize_input(1.3, 8).unwrap();
        assert_eq!(shift, 1);
        assert!((y - 0.35).abs() < 1e-15);
        assert!(normalize_input(0.0, 8).is_err());
        assert!(normalize_input(300.0, 8).is_err());
    }

    #[test]
    fn gb_iterate_examples() {
        assert_eq!(gb_iterate(0.3, 0).unwrap(), 0.3);
        // pi/4 is the unstable fixpoint, held up to float roundoff in tan.
        assert!((gb_iterate(FRAC_PI_4, 5).unwrap() - FRAC_PI_4).abs() < 1e-12);
        let mut nested = 0.3;
        for _ in 0..3 {
            nested = gb_angle(&[nested]);
        }
        assert!((gb_iterate(0.3, 3).unwrap() - nested).abs() < 1e-12);
        assert!(matches!(
            gb_iterate(FRAC_PI_2, 2),
            Err(Error::TangentPole { .. })
        ));
        // Saturation without overflow.
        assert!((gb_iterate(1.0, 20).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert_eq!(gb_iterate(1e-3, 20).unwrap(), 0.0);
    }

    #[test]
    fn square_wave_fit_reproduces_a_basis_element() {
        let n = 8;
        let k = 8;
        // Build the fit geometry first, then feed basis wave 1 as f.
        let probe = square_wave_fit(|_| 1.0, 0.0, 1.0, n, k, None).unwrap();
        let anchor = probe.anchor();
        let t1 = probe.periods[0];
        let fit = square_wave_fit(|x| wave_basis(x, anchor, t1, k), 0.0, 1.0, n, k, None).unwrap();
        for (j, &c) in fit.coefficients.iter().enumerate() {
            let want = if j == 0 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-8, "coefficient {j} = {c}");
        }
    }

    #[test]
    fn square_wave_fit_single_constant() {
        let fit = square_wave_fit(|_| 0.42, 0.0, 1.0, 1, 6, None).unwrap();
        assert_eq!(fit.coefficients.len(), 1);
        let mid = fit.midpoints[0];
        assert!((square_wave_eval(&fit, mid) - 0.42).abs() < 1e-10);
    }

    #[test]
    fn square_wave_fit_validates_inputs() {
        assert!(square_wave_fit(|_| 1.0, 0.0, 1.0, 0, 4, None).is_err());
        assert!(square_wave_fit(|_| 1.0, 1.0, 0.0, 4, 4, None).is_err());
    }

    #[test]
    fn square_wave_expr_term_saturated_and_low() {
        let t_j = 0.8;
        let anchor = -0.1;
        let term = square_wave_expr_term(0.1, t_j, 8, anchor).unwrap();
        // Inner angle pi/2 <=> x = anchor + T_j/4.
        let high = term.eval_angle(&[anchor + t_j / 4.0]).unwrap();
        assert!((high - 0.1).abs() < 1e-10, "saturated value {high}");
        // Far below the first transition the composed gearbox sits at 0.
        let low = term.eval_angle(&[anchor - t_j / 5.0]).unwrap();
        assert!((low + 0.1).abs() < 1e-10, "low value {low}");

        // 0.3 < pi/8 stays a single chunk; 1.0 needs ceil(1.0/(pi/8)) = 3.
        let single = square_wave_expr_term(0.3, t_j, 8, anchor).unwrap();
        assert!((single.eval_angle(&[anchor + t_j / 4.0]).unwrap() - 0.3).abs() < 1e-10);
        let big = square_wave_expr_term(1.0, t_j, 8, anchor).unwrap();
        let high = big.eval_angle(&[anchor + t_j / 4.0]).unwrap();
        assert!((high - 1.0).abs() < 1e-10);
        match &big {
            RusExpr::Sum(ch) => assert_eq!(ch.len(), 3),
            other => panic!("expected chunked sum, got {other}"),
        }
    }

    #[test]
    fn square_wave_eval_matches_ideal_far_from_transitions() {
        let fit = square_wave_fit(|x| 1.0 + x, 0.0, 1.0, 6, 10, None).unwrap();
        // At anchor + 0.1 every wave (periods 0.4j) is deep in a high
        // plateau, the shortest at its quarter-period peak.
        let x = fit.anchor() + 0.1;
        let smooth = square_wave_eval(&fit, x);
        let ideal = square_wave_ideal_eval(&fit, x);
        assert!((smooth - ideal).abs() < 1e-6, "smooth {smooth} ideal {ideal}");
    }

    #[test]
    fn run_expr_leaf_and_neg() {
        let mut rng = RngStream::new(31, 0).rng();
        let expr = RusExpr::Neg(Box::new(RusExpr::Const(0.4)));
        let (out, trace) = run_expr(&expr, &[], &mut rng, 16).unwrap();
        assert_eq!(trace.leaf_rotations, 1);
        assert_eq!(trace.outcome_angle, -0.4);
        let mut want = new_state(1).unwrap();
        want.apply_gate(&GateOp::RotX { qubit: 0, angle: -0.4 }).unwrap();
        assert!(fidelity(&out, &want) > 1.0 - 1e-12);
    }

    #[test]
    fn run_expr_gearbox_applies_composed_angle() {
        let expr = RusExpr::GB(vec![RusExpr::Const(0.3), aff(0)]);
        let angle = expr.eval_angle(&[0.7]).unwrap();
        let mut rng = RngStream::new(32, 1).rng();
        let (out, trace) = run_expr(&expr, &[0.7], &mut rng, 1000).unwrap();
        let mut want = new_state(3).unwrap();
        want.apply_gate(&GateOp::RotX { qubit: 0, angle }).unwrap();
        assert!(fidelity(&out, &want) > 1.0 - 1e-10);
        assert_eq!(trace.leaf_rotations, 4 * trace.attempts);
    }

    #[test]
    fn run_expr_negated_gearbox() {
        let expr = RusExpr::Neg(Box::new(RusExpr::GB(vec![RusExpr::Const(0.55)])));
        let angle = expr.eval_angle(&[]).unwrap();
        assert!(angle < 0.0);
        let mut rng = RngStream::new(33, 2).rng();
        let (out, _) = run_expr(&expr, &[], &mut rng, 1000).unwrap();
        let mut want = new_state(2).unwrap();
        want.apply_gate(&GateOp::RotX { qubit: 0, angle }).unwrap();
        assert!(fidelity(&out, &want) > 1.0 - 1e-10);
    }

    #[test]
    fn run_expr_multiplier_tree() {
        let expr = m6();
        let inputs = [0.15, 0.25];
        let angle = expr.eval_angle(&inputs).unwrap();
        let mut rng = RngStream::new(34, 3).rng();
        let (out, trace) = run_expr(&expr, &inputs, &mut rng, 10_000).unwrap();
        let n = 1 + expr.qubit_need();
        let mut want = new_state(n).unwrap();
        want.apply_gate(&GateOp::RotX { qubit: 0, angle }).unwrap();
        assert!(fidelity(&out, &want) > 1.0 - 1e-10);
        assert!(trace.attempts >= 1);
        assert!(trace.leaf_rotations >= 3);
    }

    #[test]
    fn run_expr_rejects_par_under_gearbox() {
        // The uncompute leg hands the PAR a rotated target.
        let expr = RusExpr::GB(vec![RusExpr::PAR(vec![RusExpr::Const(0.3)])]);
        let mut rng = RngStream::new(35, 0).rng();
        match run_expr(&expr, &[], &mut rng, 16) {
            Err(Error::Domain(_)) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn run_expr_r2_smoke() {
        let expr = assemble_r2();
        let angle = expr.eval_angle(&[0.35]).unwrap();
        let mut rng = RngStream::new(36, 5).rng();
        let (out, _) = run_expr(&expr, &[0.35], &mut rng, 10_000).unwrap();
        let n = 1 + expr.qubit_need();
        let mut want = new_state(n).unwrap();
        want.apply_gate(&GateOp::RotX { qubit: 0, angle }).unwrap();
        assert!(fidelity(&out, &want) > 1.0 - 1e-10);
    }

    #[test]
    fn qubit_need_matches_structure() {
        assert_eq!(RusExpr::Const(0.1).qubit_need(), 0);
        assert_eq!(m4().qubit_need(), 2);
        assert_eq!(m6().qubit_need(), 5);
        assert_eq!(m8().qubit_need(), 7);
    }
}
