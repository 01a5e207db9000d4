//! Truncated bivariate power series over `f64`.
//!
//! Expression trees built from rotation primitives have closed-form output
//! angles, but order-of-accuracy analysis and automatic term generation both
//! need Taylor expansions of those angles around the origin. This module
//! provides a small dense polynomial algebra in at most two variables,
//! truncated at a fixed total order, together with composition rules for the
//! elementary functions (sin, cos, tan, arctan) that appear in the gearbox and
//! PAR closed forms.
//!
//! Only the coefficient grid entries with total degree `i + j <= order` are
//! meaningful; all operations keep the remaining entries identically zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Constant terms smaller than this are treated as zero when a series is
/// inverted; dividing by such a series would amplify truncation noise.
const RECIPROCAL_CUTOFF: f64 = 1e-12;

/// A bivariate polynomial truncated at a fixed total order.
///
/// `coeff(i, j)` is the coefficient of `x^i * y^j`. Entries with
/// `i + j > order` are identically zero and are never written.
#[derive(Debug, Clone, PartialEq)]
pub struct Series2 {
    order: usize,
    c: Vec<f64>,
}

impl Series2 {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.order + 1) + j
    }

    /// The zero series truncated at `order`.
    pub fn zero(order: usize) -> Self {
        Series2 {
            order,
            c: vec![0.0; (order + 1) * (order + 1)],
        }
    }

    /// The constant series with value `value`.
    pub fn constant(order: usize, value: f64) -> Self {
        let mut s = Series2::zero(order);
        s.c[0] = value;
        s
    }

    /// The series for variable `index` (0 for x, 1 for y).
    ///
    /// Panics if `index >= 2` or `order == 0`; both indicate a programming
    /// error rather than a data-dependent failure.
    pub fn variable(order: usize, index: usize) -> Self {
        assert!(index < 2, "series are bivariate; variable index {index} out of range");
        assert!(order >= 1, "order-0 series cannot represent a variable");
        let mut s = Series2::zero(order);
        let at = if index == 0 { s.idx(1, 0) } else { s.idx(0, 1) };
        s.c[at] = 1.0;
        s
    }

    /// Truncation order of the series.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `x^i * y^j` (zero beyond the truncation order).
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.c[i * (self.order + 1) + j]
        }
    }

    /// Overwrites the coefficient of `x^i * y^j`.
    ///
    /// Panics if `i + j` exceeds the truncation order.
    pub fn set_coeff(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            i + j <= self.order,
            "coefficient ({i},{j}) beyond truncation order {}",
            self.order
        );
        let at = self.idx(i, j);
        self.c[at] = value;
    }

    /// The constant (degree-zero) term.
    pub fn constant_term(&self) -> f64 {
        self.c[0]
    }

    /// Termwise sum. Panics if the truncation orders differ.
    pub fn add(&self, other: &Series2) -> Series2 {
        assert_eq!(self.order, other.order, "series order mismatch");
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(other.c.iter()) {
            *a += *b;
        }
        out
    }

    /// Termwise difference. Panics if the truncation orders differ.
    pub fn sub(&self, other: &Series2) -> Series2 {
        self.add(&other.neg())
    }

    /// Termwise negation.
    pub fn neg(&self) -> Series2 {
        self.scale(-1.0)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scale(&self, factor: f64) -> Series2 {
        let mut out = self.clone();
        for a in out.c.iter_mut() {
            *a *= factor;
        }
        out
    }

    /// Product, truncated at the common order. Panics on order mismatch.
    pub fn mul(&self, other: &Series2) -> Series2 {
        assert_eq!(self.order, other.order, "series order mismatch");
        let n = self.order;
        let mut out = Series2::zero(n);
        for i1 in 0..=n {
            for j1 in 0..=(n - i1) {
                let a = self.c[self.idx(i1, j1)];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(n - i1 - j1) {
                    for j2 in 0..=(n - i1 - j1 - i2) {
                        let b = other.c[other.idx(i2, j2)];
                        if b == 0.0 {
                            continue;
                        }
                        let at = out.idx(i1 + i2, j1 + j2);
                        out.c[at] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Evaluates the truncated polynomial at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in x of Horner in y keeps the summation well conditioned.
        let n = self.order;
        let mut acc = 0.0;
        for i in (0..=n).rev() {
            let mut row = 0.0;
            for j in (0..=(n - i)).rev() {
                row = row * y + self.c[i * (n + 1) + j];
            }
            acc = acc * x + row;
        }
        acc
    }

    /// Multiplicative inverse of the series.
    ///
    /// `outer` coefficients `(-1)^m / c0^(m+1)` compose the geometric series
    /// for `1 / (c0 + u)`. Errors if the constant term is (numerically) zero.
    pub fn reciprocal(&self) -> Result<Series2> {
        let c0 = self.constant_term();
        if c0.abs() < RECIPROCAL_CUTOFF {
            return Err(Error::Domain(alloc::string::String::from(
                "series reciprocal requires a nonzero constant term",
            )));
        }
        let mut outer = Vec::with_capacity(self.order + 1);
        let mut pow = 1.0 / c0;
        for m in 0..=self.order {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            outer.push(sign * pow);
            pow /= c0;
        }
        Ok(compose(&outer, self))
    }

    /// Quotient `self / den`, truncated. Errors if `den` starts at zero.
    pub fn div(&self, den: &Series2) -> Result<Series2> {
        Ok(self.mul(&den.reciprocal()?))
    }
}

/// Composes a univariate Taylor expansion with a bivariate series.
///
/// `outer[m]` must be the Taylor coefficient of order `m` of the outer
/// function expanded about `inner.constant_term()`. The deviation
/// `u = inner - c0` has no constant term, so `u^(order+1)` truncates to zero
/// and a Horner evaluation over `outer` is exact at the truncation order.
pub fn compose(outer: &[f64], inner: &Series2) -> Series2 {
    let order = inner.order();
    let u = inner.sub(&Series2::constant(order, inner.constant_term()));
    let mut acc = Series2::zero(order);
    for &coefficient in outer.iter().rev() {
        acc = acc.mul(&u);
        let at = acc.idx(0, 0);
        acc.c[at] += coefficient;
    }
    acc
}

/// Taylor coefficients of `sin` about `a`, through `order`.
pub fn sin_coeffs(a: f64, order: usize) -> Vec<f64> {
    let cycle = [a.sin(), a.cos(), -a.sin(), -a.cos()];
    derivative_cycle_coeffs(&cycle, order)
}

/// Taylor coefficients of `cos` about `a`, through `order`.
pub fn cos_coeffs(a: f64, order: usize) -> Vec<f64> {
    let cycle = [a.cos(), -a.sin(), -a.cos(), a.sin()];
    derivative_cycle_coeffs(&cycle, order)
}

fn derivative_cycle_coeffs(cycle: &[f64; 4], order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut factorial = 1.0;
    for m in 0..=order {
        if m > 0 {
            factorial *= m as f64;
        }
        out.push(cycle[m % 4] / factorial);
    }
    out
}

/// Taylor coefficients of `tan` about `a`, through `order`.
///
/// Computed as the series quotient `sin / cos`; errors with a tangent-pole
/// report when `a` sits at an odd multiple of pi/2.
pub fn tan_coeffs(a: f64, order: usize) -> Result<Vec<f64>> {
    if a.cos().abs() < RECIPROCAL_CUTOFF {
        return Err(Error::TangentPole { input_index: 0 });
    }
    let s = sin_coeffs(a, order);
    let c = cos_coeffs(a, order);
    let mut q = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut num = s[m];
        for j in 0..m {
            num -= q[j] * c[m - j];
        }
        q.push(num / c[0]);
    }
    Ok(q)
}

/// Taylor coefficients of `arctan` about `a`, through `order`.
///
/// The derivative `1 / (1 + t^2)` expanded about `a` is the reciprocal of the
/// quadratic `(1 + a^2) + 2a u + u^2`; integrating termwise gives the series.
pub fn atan_coeffs(a: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(a.atan());
    if order == 0 {
        return out;
    }
    let p = [1.0 + a * a, 2.0 * a, 1.0];
    let mut r: Vec<f64> = Vec::with_capacity(order);
    r.push(1.0 / p[0]);
    for m in 1..order {
        let mut acc = 0.0;
        for j in 1..=m.min(2) {
            acc += p[j] * r[m - j];
        }
        r.push(-acc / p[0]);
    }
    for m in 1..=order {
        out.push(r[m - 1] / m as f64);
    }
    out
}

/// `sin` of a series (expansion about the series' constant term).
pub fn sin_of(s: &Series2) -> Series2 {
    compose(&sin_coeffs(s.constant_term(), s.order()), s)
}

/// `cos` of a series.
pub fn cos_of(s: &Series2) -> Series2 {
    compose(&cos_coeffs(s.constant_term(), s.order()), s)
}

/// `tan` of a series; errors at a tangent pole of the constant term.
pub fn tan_of(s: &Series2) -> Result<Series2> {
    Ok(compose(&tan_coeffs(s.constant_term(), s.order())?, s))
}

/// `arctan` of a series.
pub fn atan_of(s: &Series2) -> Series2 {
    compose(&atan_coeffs(s.constant_term(), s.order()), s)
}

/// Taylor expansion of the gearbox output angle
/// `arctan(s2 / (1 - s2))` with `s2 = prod_i sin^2(phi_i)`,
/// where each `phi_i` is itself a series in the circuit inputs.
///
/// Errors on an empty input list, and with a domain report when the sine
/// product starts at 1 (the gearbox angle hits its pi/2 pole there).
pub fn gb_series(phis: &[Series2]) -> Result<Series2> {
    if phis.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let order = phis[0].order();
    let mut s2 = Series2::constant(order, 1.0);
    for phi in phis {
        let s = sin_of(phi);
        s2 = s2.mul(&s).mul(&s);
    }
    let den = Series2::constant(order, 1.0).sub(&s2);
    if den.constant_term().abs() < RECIPROCAL_CUTOFF {
        return Err(Error::Domain(alloc::string::String::from(
            "gearbox series undefined where the squared sine product is 1",
        )));
    }
    Ok(atan_of(&s2.div(&den)?))
}

/// Taylor expansion of the PAR output angle `arctan(prod_i tan(phi_i))`.
///
/// Errors on an empty input list; a tangent pole in input `i` is reported
/// with that index.
pub fn par_series(phis: &[Series2]) -> Result<Series2> {
    if phis.is_empty() {
        return Err(Error::ArityMismatch { expected: 1, got: 0 });
    }
    let order = phis[0].order();
    let mut t = Series2::constant(order, 1.0);
    for (i, phi) in phis.iter().enumerate() {
        let tphi = tan_of(phi).map_err(|e| match e {
            Error::TangentPole { .. } => Error::TangentPole { input_index: i },
            other => other,
        })?;
        t = t.mul(&tphi);
    }
    Ok(atan_of(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{gb_angle, par_angle};

    fn binomial(n: usize, k: usize) -> f64 {
        let mut acc = 1.0;
        for i in 0..k {
            acc = acc * (n - i) as f64 / (i + 1) as f64;
        }
        acc
    }

    /// A mildly generic test series: 0.3 + 0.2 x + 0.1 y + 0.05 x y.
    fn sample_inner(order: usize) -> Series2 {
        let mut s = Series2::constant(order, 0.3);
        s.set_coeff(1, 0, 0.2);
        s.set_coeff(0, 1, 0.1);
        s.set_coeff(1, 1, 0.05);
        s
    }

    #[test]
    fn mul_matches_direct_expansion() {
        // (1 + 2x + 3y) * (4 + 5x) = 4 + 13x + 12y + 10x^2 + 15xy.
        let mut a = Series2::constant(3, 1.0);
        a.set_coeff(1, 0, 2.0);
        a.set_coeff(0, 1, 3.0);
        let mut b = Series2::constant(3, 4.0);
        b.set_coeff(1, 0, 5.0);
        let p = a.mul(&b);
        assert_eq!(p.coeff(0, 0), 4.0);
        assert_eq!(p.coeff(1, 0), 13.0);
        assert_eq!(p.coeff(0, 1), 12.0);
        assert_eq!(p.coeff(2, 0), 10.0);
        assert_eq!(p.coeff(1, 1), 15.0);
        assert_eq!(p.coeff(0, 2), 0.0);
    }

    #[test]
    fn mul_truncates_at_total_order() {
        let x = Series2::variable(2, 0);
        let y = Series2::variable(2, 1);
        let p = x.mul(&x).mul(&y);
        for i in 0..=2 {
            for j in 0..=(2 - i) {
                assert_eq!(p.coeff(i, j), 0.0);
            }
        }
    }

    #[test]
    fn compose_geometric_series_gives_binomials() {
        // 1/(1-u) at u = x + y: coefficient of x^i y^j is C(i+j, i).
        let order = 6;
        let inner = Series2::variable(order, 0).add(&Series2::variable(order, 1));
        let outer = alloc::vec![1.0; order + 1];
        let g = compose(&outer, &inner);
        for i in 0..=order {
            for j in 0..=(order - i) {
                let want = binomial(i + j, i);
                assert!(
                    (g.coeff(i, j) - want).abs() < 1e-9,
                    "coeff({i},{j}) = {} want {want}",
                    g.coeff(i, j)
                );
            }
        }
    }

    #[test]
    fn elementary_functions_evaluate_correctly() {
        let order = 8;
        let inner = sample_inner(order);
        let (hx, hy) = (0.01, 0.012);
        let base = inner.eval(hx, hy);
        let cases: [(Series2, f64); 4] = [
            (sin_of(&inner), base.sin()),
            (cos_of(&inner), base.cos()),
            (tan_of(&inner).unwrap(), base.tan()),
            (atan_of(&inner), base.atan()),
        ];
        for (series, want) in cases.iter() {
            assert!(
                (series.eval(hx, hy) - want).abs() < 1e-12,
                "series value {} want {want}",
                series.eval(hx, hy)
            );
        }
    }

    #[test]
    fn atan_coeffs_about_zero_match_known_expansion() {
        let got = atan_coeffs(0.0, 7);
        let want = [0.0, 1.0, 0.0, -1.0 / 3.0, 0.0, 1.0 / 5.0, 0.0, -1.0 / 7.0];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).abs() < 1e-15, "{g} vs {w}");
        }
    }

    #[test]
    fn tan_coeffs_error_at_pole() {
        match tan_coeffs(core::f64::consts::FRAC_PI_2, 4) {
            Err(Error::TangentPole { .. }) => {}
            other => panic!("expected tangent pole, got {other:?}"),
        }
    }

    #[test]
    fn div_roundtrips_a_product() {
        let order = 6;
        let p = sample_inner(order);
        let mut q = Series2::constant(order, 2.0);
        q.set_coeff(1, 0, -0.3);
        q.set_coeff(0, 2, 0.7);
        let back = p.mul(&q).div(&q).unwrap();
        for i in 0..=order {
            for j in 0..=(order - i) {
                assert!(
                    (back.coeff(i, j) - p.coeff(i, j)).abs() < 1e-12,
                    "coeff({i},{j}) drifted: {} vs {}",
                    back.coeff(i, j),
                    p.coeff(i, j)
                );
            }
        }
    }

    #[test]
    fn gb_series_matches_closed_form_angle() {
        let order = 8;
        let a = {
            let mut s = Series2::constant(order, 0.2);
            s.set_coeff(1, 0, 1.0);
            s
        };
        let b = {
            let mut s = Series2::constant(order, 0.4);
            s.set_coeff(0, 1, 1.0);
            s
        };
        let g = gb_series(&[a, b]).unwrap();
        let (hx, hy) = (0.008, -0.006);
        let want = gb_angle(&[0.2 + hx, 0.4 + hy]);
        assert!((g.eval(hx, hy) - want).abs() < 1e-11);
    }

    #[test]
    fn gb_series_leading_coefficients_single_input() {
        // GB(x) = x^2 + (2/3) x^4 + O(x^6) about 0.
        let x = Series2::variable(6, 0);
        let g = gb_series(&[x]).unwrap();
        assert!(g.coeff(0, 0).abs() < 1e-15);
        assert!(g.coeff(1, 0).abs() < 1e-15);
        assert!((g.coeff(2, 0) - 1.0).abs() < 1e-12);
        assert!(g.coeff(3, 0).abs() < 1e-12);
        assert!((g.coeff(4, 0) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn par_series_matches_closed_form_angle() {
        let order = 8;
        let a = {
            let mut s = Series2::constant(order, 0.3);
            s.set_coeff(1, 0, 1.0);
            s
        };
        let b = {
            let mut s = Series2::constant(order, -0.5);
            s.set_coeff(0, 1, 1.0);
            s
        };
        let p = par_series(&[a, b]).unwrap();
        let (hx, hy) = (0.004, 0.009);
        let want = par_angle(&[0.3 + hx, -0.5 + hy]).unwrap();
        assert!((p.eval(hx, hy) - want).abs() < 1e-11);
    }

    #[test]
    fn par_series_reports_pole_index() {
        let order = 4;
        let good = Series2::constant(order, 0.3);
        let bad = Series2::constant(order, core::f64::consts::FRAC_PI_2);
        match par_series(&[good, bad]) {
            Err(Error::TangentPole { input_index }) => assert_eq!(input_index, 1),
            other => panic!("expected tangent pole, got {other:?}"),
        }
    }

    #[test]
    fn gb_series_rejects_empty_and_unit_sine() {
        match gb_series(&[]) {
            Err(Error::ArityMismatch { .. }) => {}
            other => panic!("expected arity mismatch, got {other:?}"),
        }
        let pole = Series2::constant(4, core::f64::consts::FRAC_PI_2);
        match gb_series(&[pole]) {
            Err(Error::Domain(_)) => {}
            other => panic!("expected domain error, got {other:?}"),
        }
    }
}
