//! Adaptive numerical integration and bracketed root finding.
//!
//! The radial wavevector integrals behind the interface response mix smooth
//! oscillation with inverse-square-root endpoint behaviour at the light line,
//! and the evanescent branch extends to infinity with exponential damping
//! `e^(-2 k0 |p| d)`. This module provides one engine for both: a 15-point
//! Gauss–Kronrod rule with recursive bisection for finite intervals, and a
//! geometrically growing segment sweep with an explicit tail bound for
//! semi-infinite ones.
//!
//! All drivers are vector-valued: a single pass integrates `N` components
//! sharing the same abscissae, so the expensive reflection coefficients are
//! evaluated once per node no matter how many angular weights are being
//! accumulated. Scalar wrappers are provided for the common case.
//!
//! Results are deterministic: for fixed inputs the subdivision sequence, and
//! therefore every bit of the output, is reproducible.

use num_complex::Complex64;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Default budget of integrand evaluations per integral.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Span, in units of the decay scale, after which a semi-infinite integrand
/// is declared non-decaying if it is still contributing. A genuinely
/// exponential tail has fallen below 1e-26 by this point.
const NON_DECAY_SPAN: f64 = 60.0;

/// Errors reported by the integration and root-finding drivers.
#[derive(Debug, Error)]
pub enum QuadratureError {
    /// Interval or tolerance arguments are unusable.
    #[error("invalid integration arguments: {0}")]
    InvalidArguments(String),
    /// Semi-infinite integrand still contributing far beyond its stated
    /// decay scale.
    #[error(
        "integrand not decaying: still contributing {contribution:.3e} after \
         {span:.1} decay scales"
    )]
    NonDecaying { contribution: f64, span: f64 },
    /// Root bracket does not straddle a sign change.
    #[error("no sign change in bracket [{lo:.6e}, {hi:.6e}]: g(lo)={glo:.3e}, g(hi)={ghi:.3e}")]
    NoSignChange { lo: f64, hi: f64, glo: f64, ghi: f64 },
}

/// How the per-component error estimates of a vector integration are judged
/// against the relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    /// Every component must meet the tolerance relative to its own value.
    /// Right when the components are consumed independently.
    PerComponent,
    /// Every component must meet the tolerance relative to the largest
    /// component magnitude. Right when the components are later combined
    /// with O(1) coefficients, where resolving a small, cancelling
    /// component to its own relative precision would be wasted effort.
    Joint,
}

/// Outcome of a scalar integration.
#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    /// Best estimate of the integral.
    pub value: Complex64,
    /// Estimated absolute error of `value`.
    pub error_estimate: f64,
    /// Number of integrand evaluations consumed.
    pub evaluations: usize,
    /// Whether the error estimate met the requested tolerance within budget.
    pub converged: bool,
}

/// Outcome of a vector integration of `N` components over shared abscissae.
#[derive(Debug, Clone, Copy)]
pub struct VectorIntegralResult<const N: usize> {
    /// Best estimate of each component integral.
    pub values: [Complex64; N],
    /// Estimated absolute error per component.
    pub errors: [f64; N],
    /// Number of integrand evaluations consumed (one evaluation yields all
    /// `N` components).
    pub evaluations: usize,
    /// Whether every component met the requested tolerance within budget.
    pub converged: bool,
}

impl<const N: usize> VectorIntegralResult<N> {
    fn zero() -> Self {
        Self {
            values: [Complex64::new(0.0, 0.0); N],
            errors: [0.0; N],
            evaluations: 0,
            converged: true,
        }
    }

    fn component(&self, i: usize) -> IntegralResult {
        IntegralResult {
            value: self.values[i],
            error_estimate: self.errors[i],
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

// 15-point Kronrod abscissae on [-1, 1] (non-negative half; the rule is
// symmetric). Odd indices together with the centre are the embedded 7-point
// Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_2,
    0.949_107_912_342_758_524_5,
    0.864_864_423_359_769_072_8,
    0.741_531_185_599_394_439_9,
    0.586_087_235_467_691_130_3,
    0.405_845_151_377_397_166_9,
    0.207_784_955_007_898_467_6,
    0.0,
];

// 7-point Gauss weights, paired with XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_3,
    0.279_705_391_489_276_667_9,
    0.381_830_050_505_118_944_9,
    0.417_959_183_673_469_387_8,
];

// 15-point Kronrod weights for XGK.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_96,
    0.063_092_092_629_978_553_29,
    0.104_790_010_322_250_183_8,
    0.140_653_259_715_525_918_7,
    0.169_004_726_639_267_902_8,
    0.190_350_578_064_785_409_9,
    0.204_432_940_075_298_892_4,
    0.209_482_141_084_727_828_0,
];

/// Kronrod-minus-Gauss difference rescaled so that it is a usable error
/// estimate even when the integrand is nearly resolved (roundoff floor) or
/// badly unresolved (asc saturation).
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut err = err.abs();
    if result_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / result_asc).powf(1.5);
        err = if scale < 1.0 { result_asc * scale } else { result_asc };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * result_abs);
    }
    err
}

/// One 15-point Kronrod application to `[a, b]`.
///
/// Returns per-component values, rescaled error estimates, and the integral
/// of the modulus (used for absolute-tolerance floors).
fn gk15<const N: usize>(f: &mut dyn FnMut(f64) -> [Complex64; N], a: f64, b: f64) -> Gk15Out<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_gauss = [Complex64::new(0.0, 0.0); N];
    let mut res_kron = [Complex64::new(0.0, 0.0); N];
    let mut res_abs = [0.0_f64; N];
    for i in 0..N {
        res_gauss[i] = fc[i] * WG[3];
        res_kron[i] = fc[i] * WGK[7];
        res_abs[i] = fc[i].norm() * WGK[7];
    }

    // Saved node values for the spread estimate below.
    let mut fv1 = [[Complex64::new(0.0, 0.0); N]; 8];
    let mut fv2 = [[Complex64::new(0.0, 0.0); N]; 8];
    fv1[7] = fc;

    for j in 0..7 {
        let dx = half * XGK[j];
        let f_lo = f(center - dx);
        let f_hi = f(center + dx);
        fv1[j] = f_lo;
        fv2[j] = f_hi;
        for i in 0..N {
            let fsum = f_lo[i] + f_hi[i];
            res_kron[i] += fsum * WGK[j];
            res_abs[i] += WGK[j] * (f_lo[i].norm() + f_hi[i].norm());
            if j % 2 == 1 {
                res_gauss[i] += fsum * WG[j / 2];
            }
        }
    }

    let mut values = [Complex64::new(0.0, 0.0); N];
    let mut errors = [0.0_f64; N];
    let mut resabs = [0.0_f64; N];
    for i in 0..N {
        // Spread of the integrand about its interval mean.
        let mean = res_kron[i] * 0.5;
        let mut res_asc = (fc[i] - mean).norm() * WGK[7];
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j][i] - mean).norm() + (fv2[j][i] - mean).norm());
        }
        values[i] = res_kron[i] * half;
        resabs[i] = res_abs[i] * abs_half;
        errors[i] = rescale_error(
            ((res_kron[i] - res_gauss[i]) * half).norm(),
            resabs[i],
            res_asc * abs_half,
        );
    }
    Gk15Out { values, errors, resabs }
}

struct Gk15Out<const N: usize> {
    values: [Complex64; N],
    errors: [f64; N],
    resabs: [f64; N],
}

/// Work item for the subdivision heap, ordered by worst component error.
struct Interval<const N: usize> {
    a: f64,
    b: f64,
    values: [Complex64; N],
    errors: [f64; N],
    resabs: [f64; N],
    key: f64,
}

impl<const N: usize> PartialEq for Interval<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<const N: usize> Eq for Interval<N> {}
impl<const N: usize> PartialOrd for Interval<N> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Interval<N> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.total_cmp(&other.key)
    }
}

impl<const N: usize> Interval<N> {
    fn from_rule(a: f64, b: f64, out: Gk15Out<N>) -> Self {
        let key = out.errors.iter().fold(0.0_f64, |m, &e| m.max(e));
        Interval { a, b, values: out.values, errors: out.errors, resabs: out.resabs, key }
    }

    /// Width below which further bisection only churns roundoff.
    fn splittable(&self) -> bool {
        let scale = self.a.abs().max(self.b.abs()).max(1.0);
        (self.b - self.a) > 100.0 * f64::EPSILON * scale
    }
}

fn validate_finite_args(a: f64, b: f64, tol: f64) -> Result<(), QuadratureError> {
    if !a.is_finite() || !b.is_finite() {
        return Err(QuadratureError::InvalidArguments(format!(
            "endpoints must be finite, got [{a}, {b}]"
        )));
    }
    if a >= b {
        return Err(QuadratureError::InvalidArguments(format!(
            "require a < b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidArguments(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Adaptive Gauss–Kronrod integration of `N` components over `[a, b]`.
///
/// `tol` is relative per component, with an absolute floor tied to the
/// integral of the modulus so that components that cancel to zero still
/// terminate. Endpoint singularities of integrable type are admissible: the
/// rule is open, and bisection concentrates nodes toward the singular end.
/// On budget exhaustion the best estimate is returned with
/// `converged = false`.
pub fn integrate_finite_vec<const N: usize>(
    f: impl FnMut(f64) -> [Complex64; N],
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<VectorIntegralResult<N>, QuadratureError> {
    integrate_finite_vec_with(f, a, b, tol, budget, ErrorNorm::PerComponent)
}

/// [`integrate_finite_vec`] with an explicit convergence norm.
pub fn integrate_finite_vec_with<const N: usize>(
    mut f: impl FnMut(f64) -> [Complex64; N],
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
    norm: ErrorNorm,
) -> Result<VectorIntegralResult<N>, QuadratureError> {
    validate_finite_args(a, b, tol)?;
    let f = &mut f as &mut dyn FnMut(f64) -> [Complex64; N];

    let mut evaluations = 15usize;
    let first = Interval::from_rule(a, b, gk15(f, a, b));

    let mut total_val = first.values;
    let mut total_err = first.errors;
    let mut total_abs = first.resabs;

    let mut heap: BinaryHeap<Interval<N>> = BinaryHeap::new();
    // Errors belonging to intervals too narrow to split further.
    let mut frozen_err = [0.0_f64; N];
    if first.splittable() {
        heap.push(first);
    } else {
        frozen_err = first.errors;
    }

    let done = |val: &[Complex64; N], err: &[f64; N], abs: &[f64; N]| {
        let joint_scale = match norm {
            ErrorNorm::PerComponent => 0.0,
            ErrorNorm::Joint => val.iter().map(|v| v.norm()).fold(0.0_f64, f64::max),
        };
        (0..N).all(|i| {
            // Components that cancel to zero can never satisfy a purely
            // relative criterion; grant them an absolute floor at the
            // roundoff level of the modulus integral. The floor must sit
            // above the 50·ε·resabs per-interval estimate floor of
            // `rescale_error`, or exact cancellations would grind the
            // budget without ever being allowed to finish.
            let floor = 100.0 * f64::EPSILON * abs[i] + f64::MIN_POSITIVE;
            let target = val[i].norm().max(joint_scale);
            err[i] <= (tol * target).max(floor)
        })
    };

    let mut converged = done(&total_val, &total_err, &total_abs);
    while !converged {
        if evaluations + 30 > budget {
            break;
        }
        let worst = match heap.pop() {
            Some(w) => w,
            None => break, // everything frozen at roundoff width
        };
        let mid = 0.5 * (worst.a + worst.b);
        let left = Interval::from_rule(worst.a, mid, gk15(f, worst.a, mid));
        let right = Interval::from_rule(mid, worst.b, gk15(f, mid, worst.b));
        evaluations += 30;

        for i in 0..N {
            total_val[i] += left.values[i] + right.values[i] - worst.values[i];
            total_err[i] += left.errors[i] + right.errors[i] - worst.errors[i];
            total_abs[i] += left.resabs[i] + right.resabs[i] - worst.resabs[i];
        }
        for child in [left, right] {
            if child.splittable() {
                heap.push(child);
            } else {
                for i in 0..N {
                    frozen_err[i] += child.errors[i];
                }
            }
        }
        // Intervals at roundoff width can never improve; stop once the
        // refinable error alone would satisfy the tolerance.
        converged = done(&total_val, &total_err, &total_abs);
        if !converged && heap.is_empty() {
            break;
        }
        let _ = &frozen_err;
    }

    Ok(VectorIntegralResult {
        values: total_val,
        errors: total_err,
        evaluations,
        converged,
    })
}

/// Scalar form of [`integrate_finite_vec`] with the default budget.
pub fn integrate_finite(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IntegralResult, QuadratureError> {
    let r = integrate_finite_vec(|x| [f(x)], a, b, tol, DEFAULT_BUDGET)?;
    Ok(r.component(0))
}

/// Adaptive integration of `N` components over `[a, ∞)` for integrands that
/// decay at least exponentially with scale `decay_scale` beyond their peak.
///
/// The axis is swept in segments of geometrically doubling width starting at
/// `decay_scale`, each integrated adaptively; the sweep stops when the
/// remaining tail bound `|f(b)|·decay_scale` and the last segment are both
/// negligible against the accumulated value. An integrand still contributing
/// after [`NON_DECAY_SPAN`] decay scales is reported as
/// [`QuadratureError::NonDecaying`].
pub fn integrate_evanescent_vec<const N: usize>(
    f: impl FnMut(f64) -> [Complex64; N],
    a: f64,
    decay_scale: f64,
    tol: f64,
    budget: usize,
) -> Result<VectorIntegralResult<N>, QuadratureError> {
    integrate_evanescent_vec_with(f, a, decay_scale, tol, budget, ErrorNorm::PerComponent)
}

/// [`integrate_evanescent_vec`] with an explicit convergence norm.
pub fn integrate_evanescent_vec_with<const N: usize>(
    mut f: impl FnMut(f64) -> [Complex64; N],
    a: f64,
    decay_scale: f64,
    tol: f64,
    budget: usize,
    norm: ErrorNorm,
) -> Result<VectorIntegralResult<N>, QuadratureError> {
    if !(decay_scale > 0.0 && decay_scale.is_finite()) {
        return Err(QuadratureError::InvalidArguments(format!(
            "decay scale must be > 0, got {decay_scale}"
        )));
    }
    if !a.is_finite() {
        return Err(QuadratureError::InvalidArguments(format!("lower endpoint {a} not finite")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidArguments(format!("tolerance must be > 0, got {tol}")));
    }

    let mut total = VectorIntegralResult::<N>::zero();
    let mut lo = a;
    let mut width = decay_scale;
    let seg_tol = 0.25 * tol;
    // Consecutive segment ends at which the tail bound was negligible; two
    // in a row guard against stopping on an isolated zero of the integrand.
    let mut tail_ok = 0u32;
    let mut prev_tail = f64::INFINITY;
    loop {
        let hi = lo + width;
        let seg = integrate_finite_vec_with(
            &mut f,
            lo,
            hi,
            seg_tol,
            budget.saturating_sub(total.evaluations),
            norm,
        )?;
        total.evaluations += seg.evaluations;
        let mut tot_norm = 0.0_f64;
        for i in 0..N {
            total.values[i] += seg.values[i];
            total.errors[i] += seg.errors[i];
            tot_norm = tot_norm.max(total.values[i].norm());
        }
        total.converged &= seg.converged;

        // Exponential tail bound from the modulus at the segment end:
        // the remainder of a tail decaying at least as e^{-x/s} is below
        // |f(hi)|·s.
        let f_end = f(hi);
        total.evaluations += 1;
        let end_norm = f_end.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        let tail = end_norm * decay_scale;

        let floor = (0.25 * tol * tot_norm).max(1e-300);
        tail_ok = if tail <= floor { tail_ok + 1 } else { 0 };
        if tail_ok >= 2 {
            for i in 0..N {
                total.errors[i] += tail;
            }
            return Ok(total);
        }
        // Far beyond the stated decay scale the tail bound must be falling
        // by at least the doubling of the segment widths; a bound that holds
        // its ground belongs to a non-decaying integrand.
        if hi - a > NON_DECAY_SPAN * decay_scale && tail_ok == 0 && tail >= 0.5 * prev_tail {
            return Err(QuadratureError::NonDecaying {
                contribution: tail,
                span: (hi - a) / decay_scale,
            });
        }
        if total.evaluations >= budget {
            total.converged = false;
            for i in 0..N {
                total.errors[i] += tail;
            }
            return Ok(total);
        }
        prev_tail = tail;
        lo = hi;
        width *= 2.0;
    }
}

/// Scalar form of [`integrate_evanescent_vec`] with the default budget.
pub fn integrate_evanescent(
    mut f: impl FnMut(f64) -> Complex64,
    a: f64,
    decay_scale: f64,
    tol: f64,
) -> Result<IntegralResult, QuadratureError> {
    let r = integrate_evanescent_vec(|x| [f(x)], a, decay_scale, tol, DEFAULT_BUDGET)?;
    Ok(r.component(0))
}

/// Root of `g` inside `[lo, hi]`, found by Brent's method.
///
/// Requires a sign change (or an exact zero) at the bracket ends; interior
/// bisection steps guarantee convergence even when the interpolation steps
/// stall. The returned abscissa satisfies a bracket width below
/// `tol · max(|x|, 1)` or an exact zero of `g`.
pub fn solve_root_bracketed(
    mut g: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(QuadratureError::InvalidArguments(format!(
            "bad bracket [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(QuadratureError::InvalidArguments(format!("tolerance must be > 0, got {tol}")));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = g(a);
    let mut fb = g(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(QuadratureError::NoSignChange { lo, hi, glo: fa, ghi: fb });
    }

    // Brent: b is the best iterate, a the previous, c the counterpoint.
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * b.abs().max(1.0);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, or secant when degenerate.
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q * 0.5).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if fb == 0.0 {
            return Ok(b);
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn light_line_weighted_cubic() {
        // ∫0..1 x^3/sqrt(1-x^2) dx = 2/3, the singular radial profile that
        // the propagating-branch integrals produce at the light line. Plain
        // bisection resolves the inverse-square-root endpoint to ~1e-7; the
        // production integrals remove it analytically instead.
        let r = integrate_finite(
            |x| Complex64::new(x.powi(3) / (1.0 - x * x).sqrt(), 0.0),
            0.0,
            1.0,
            1e-6,
        )
        .unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value.re, 2.0 / 3.0, max_relative = 1e-6);
        assert!(r.value.im.abs() < 1e-14);
        assert!(r.error_estimate <= 1e-6 * r.value.norm() * 1.01);
    }

    #[test]
    fn light_line_weighted_linear() {
        let r = integrate_finite(
            |x| Complex64::new(x / (1.0 - x * x).sqrt(), 0.0),
            0.0,
            1.0,
            1e-6,
        )
        .unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value.re, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn complex_exponential() {
        // ∫0..1 e^{2ix} dx = (e^{2i} - 1)/(2i).
        let r = integrate_finite(|x| Complex64::new(0.0, 2.0 * x).exp(), 0.0, 1.0, 1e-12).unwrap();
        let expect = (Complex64::new(0.0, 2.0).exp() - 1.0) / Complex64::new(0.0, 2.0);
        assert!(r.converged);
        assert!((r.value - expect).norm() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let r = integrate_evanescent(|x| Complex64::new((-x).exp(), 0.0), 1.0, 1.0, 1e-10).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value.re, (-1.0_f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn delayed_peak_tail() {
        // ∫0..∞ v^5 e^{-v/7} dv = 5! · 7^6: the mass sits well past the first
        // segment, exercising the growth-then-decay pattern of the
        // evanescent-branch integrands.
        let r = integrate_evanescent(
            |v| Complex64::new(v.powi(5) * (-v / 7.0).exp(), 0.0),
            0.0,
            7.0,
            1e-10,
        )
        .unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value.re, 120.0 * 7.0_f64.powi(6), max_relative = 1e-8);
    }

    #[test]
    fn constant_integrand_rejected() {
        let err = integrate_evanescent(|_| Complex64::new(1.0, 0.0), 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, QuadratureError::NonDecaying { .. }));
    }

    #[test]
    fn doubling_the_cutoff_is_converged_away() {
        // Self-consistency: restricting the same integrand to twice the span
        // the driver chose on its own must not move the result beyond tol.
        let f = |v: f64| Complex64::new(v.powi(3) * (-0.3 * v).exp(), 0.0);
        let r = integrate_evanescent(f, 1.0, 1.0 / 0.3, 1e-9).unwrap();
        let wide = integrate_finite(f, 1.0, 1.0 + 2.0 * NON_DECAY_SPAN / 0.3, 1e-11).unwrap();
        assert!((r.value - wide.value).norm() <= 1e-8 * wide.value.norm());
    }

    #[test]
    fn budget_exhaustion_flags_not_converged() {
        let r = integrate_finite_vec(
            |x: f64| [Complex64::new((1e6 * x).sin() / (x + 1e-12).sqrt(), 0.0)],
            0.0,
            1.0,
            1e-14,
            600,
        )
        .unwrap();
        assert!(!r.converged);
        assert!(r.evaluations <= 600);
    }

    #[test]
    fn deterministic_reruns() {
        let run = || {
            integrate_finite(
                |x| Complex64::new((10.0 * x).cos() * (-x).exp(), (3.0 * x).sin()),
                0.0,
                5.0,
                1e-11,
            )
            .unwrap()
        };
        let (r1, r2) = (run(), run());
        assert_eq!(r1.value, r2.value);
        assert_eq!(r1.evaluations, r2.evaluations);
    }

    #[test]
    fn vector_components_share_nodes() {
        let mut calls = 0usize;
        let r = integrate_finite_vec(
            |x| {
                calls += 1;
                [
                    Complex64::new(x * x, 0.0),
                    Complex64::new((2.0 * x).cos(), 0.0),
                ]
            },
            0.0,
            1.0,
            1e-12,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(calls, r.evaluations);
        assert_relative_eq!(r.values[0].re, 1.0 / 3.0, max_relative = 1e-11);
        assert_relative_eq!(r.values[1].re, 0.5 * 2.0_f64.sin(), max_relative = 1e-11);
    }

    #[test]
    fn square_root_of_two() {
        let x = solve_root_bracketed(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(x, 2.0_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn identity_root_at_zero() {
        let x = solve_root_bracketed(|x| x, -1.0, 1.0, 1e-14).unwrap();
        assert!(x.abs() < 1e-13);
    }

    #[test]
    fn linear_balance_root() {
        // A - B·Ω crosses zero at A/B, the generic torque-balance shape.
        let (a, b) = (3.7e-20, 5.2e-29);
        let x = solve_root_bracketed(|w| a - b * w, 0.0, 1e12, 1e-13).unwrap();
        assert_relative_eq!(x, a / b, max_relative = 1e-11);
    }

    #[test]
    fn missing_sign_change_is_an_error() {
        let err = solve_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, QuadratureError::NoSignChange { .. }));
    }

    #[test]
    fn trapezoid_oracle_agreement() {
        // Randomised damped-oscillatory family against a dense fixed-grid
        // trapezoid reference; adaptive results must land within 10x the
        // requested tolerance.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..6 {
            let decay: f64 = rng.gen_range(0.2..2.0);
            let freq: f64 = rng.gen_range(1.0..25.0);
            let phase: f64 = rng.gen_range(0.0..6.28);
            let f = |x: f64| {
                Complex64::new(
                    (-decay * x).exp() * (freq * x + phase).cos(),
                    (-decay * x).exp() * (freq * x).sin(),
                )
            };
            let tol = 1e-9;
            let r = integrate_finite(f, 0.0, 4.0, tol).unwrap();
            let n = 1_000_000usize;
            let h = 4.0 / n as f64;
            let mut acc = (f(0.0) + f(4.0)) * 0.5;
            for k in 1..n {
                acc += f(k as f64 * h);
            }
            let oracle = acc * h;
            assert!(
                (r.value - oracle).norm() <= 10.0 * tol * oracle.norm().max(1.0) + 1e-10,
                "adaptive {:?} vs trapezoid {:?}",
                r.value,
                oracle
            );
        }
    }
}
