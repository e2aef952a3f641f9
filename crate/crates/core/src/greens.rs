//! κ,φ-integrated Green's-function quantities at the sphere location: the
//! five dimensionless reflection weights, their electric-channel
//! counterparts (s↔p exchange), the off-diagonal components that drive
//! transverse torques, and the local density of states.
//!
//! Every weight g is normalized so that the corresponding Green's component
//! is (πωρ₀/8)·g with ρ₀ = ω²/π²c³ the free-space density of states. The
//! in-plane κ integrals split at the light line κ = 1: the propagating
//! branch uses κ = sin θ (which absorbs the 1/√(1−κ²) endpoint), the
//! evanescent branch κ = cosh t (absorbing 1/√(κ²−1), with the e^{−2k₀d√(κ²−1)}
//! factor providing the cutoff). For a φ-independent interface the
//! azimuthal integral is done analytically; otherwise φ is the outer
//! adaptive variable.

use crate::materials::Channel;
use crate::quadrature::{integrate_finite_vec_with, ErrorNorm, QuadratureError};
use crate::reflection::{ReflectionError, ReflectionMatrix, ReflectionProvider};
use crate::scenario::{InterfaceOrientation, C0};
use num_complex::Complex64;
use thiserror::Error;

/// The evanescent integrals substitute κ = cosh t; beyond
/// e^{−2k₀d·sinh t} < 10⁻²² the tail cannot move any weight at the
/// supported tolerances, so the t-domain is truncated there.
const EVANESCENT_DECADES: f64 = 22.0;

fn evanescent_cutoff(two_k0_d: f64) -> f64 {
    (EVANESCENT_DECADES * std::f64::consts::LN_10 / two_k0_d).asinh()
}

type C = Complex64;

/// Errors from weight or LDOS evaluation.
#[derive(Debug, Error)]
pub enum GreensError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Reflection(#[from] ReflectionError),
    #[error("invalid evaluation point: {0}")]
    Geometry(String),
    #[error("weight quadrature did not converge after {evaluations} evaluations")]
    NotConverged { evaluations: usize },
}

/// Free-space density of states ρ₀ = ω²/π²c³ (states·s/(m³·rad)).
pub fn vacuum_dos(omega: f64) -> f64 {
    let pi = std::f64::consts::PI;
    omega * omega / (pi * pi * C0.powi(3))
}

/// The five dimensionless weights of one channel at one frequency.
///
/// g_perp1 and g_perp2 weight the two directions parallel to the
/// interface, g_par the direction along its normal, and g_g1/g_g2 the two
/// antisymmetric off-diagonal combinations (in-plane/in-plane and
/// in-plane/normal respectively). In free space they are (4/3, 4/3, 2/3,
/// 0, 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreensWeights {
    pub g_perp1: f64,
    pub g_perp2: f64,
    pub g_par: f64,
    pub g_g1: f64,
    pub g_g2: f64,
    pub orientation: InterfaceOrientation,
}

/// Reduced off-diagonal Green's components in the lab frame, normalized the
/// same way: G_ab = (πωρ₀/8)·h_ab. Only the interface-reflected part
/// contributes; the free-space part integrates to zero over azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonalGreens {
    pub h_xz: C,
    pub h_zx: C,
    pub h_yz: C,
    pub h_zy: C,
}

impl OffDiagonalGreens {
    pub fn zero() -> Self {
        let z = C::new(0.0, 0.0);
        Self { h_xz: z, h_zx: z, h_yz: z, h_zy: z }
    }
}

/// Local density of states split by fluctuation channel,
/// states·s/(m³·rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ldos {
    pub electric: f64,
    pub magnetic: f64,
    pub total: f64,
}

fn channel_matrix(r: ReflectionMatrix, channel: Channel) -> ReflectionMatrix {
    match channel {
        Channel::Magnetic => r,
        Channel::Electric => r.swap_polarizations(),
    }
}

/// Shared state for one weight evaluation.
struct WeightKernel<'a> {
    provider: &'a dyn ReflectionProvider,
    channel: Channel,
    omega: f64,
    two_k0_d: f64,
    error: Option<GreensError>,
}

impl<'a> WeightKernel<'a> {
    /// After a failure the integrand returns zeros so the surrounding
    /// quadrature terminates promptly; the stored error is reported instead
    /// of the (meaningless) integral.
    fn reflect(&mut self, kappa: f64, phi: f64) -> Option<ReflectionMatrix> {
        if self.error.is_some() {
            return None;
        }
        match self.provider.reflection(self.omega, kappa, phi) {
            Ok(r) => Some(channel_matrix(r, self.channel)),
            Err(e) => {
                self.error.get_or_insert(GreensError::Reflection(e));
                None
            }
        }
    }

    /// Propagating-branch weight integrand at κ = sin θ, already multiplied
    /// by the Jacobian; `trig` carries the analytic azimuthal averages
    /// (φ-independent path) or the pointwise factors (general path).
    fn prop_terms(&mut self, theta: f64, phi: f64, fast: bool) -> [C; 5] {
        let (s, c) = theta.sin_cos();
        let Some(r) = self.reflect(s, phi) else {
            return [C::new(0.0, 0.0); 5];
        };
        let phase = C::new(0.0, self.two_k0_d * c).exp();
        let rpp = (r.r_pp * phase).re;
        let rss = (r.r_ss * phase).re;
        let conv_m = ((r.r_ps - r.r_sp) * phase).im;
        let conv_p = ((r.r_ps + r.r_sp) * phase).im;
        let rss_im = (r.r_ss * phase).im;
        if fast {
            let f1 = s * (1.0 + c * c + rpp - c * c * rss);
            [
                C::new(f1, 0.0),
                C::new(f1, 0.0),
                C::new(s * s * s * (1.0 + rss), 0.0),
                C::new(-s * c * conv_p, 0.0),
                C::new(0.0, 0.0),
            ]
        } else {
            let (sp, cp) = phi.sin_cos();
            let cross = ((r.r_ps - r.r_sp) * phase).re;
            [
                C::new(
                    s * (1.0 - s * s * cp * cp + sp * sp * rpp - c * c * cp * cp * rss
                        + c * sp * cp * cross),
                    0.0,
                ),
                C::new(
                    s * (1.0 - s * s * sp * sp + cp * cp * rpp - c * c * sp * sp * rss
                        - c * sp * cp * cross),
                    0.0,
                ),
                C::new(s * s * s * (1.0 + rss), 0.0),
                C::new(s * c * conv_p, 0.0),
                C::new(s * s * (c * sp * rss_im + 0.5 * cp * conv_m), 0.0),
            ]
        }
    }

    /// Evanescent-branch weight integrand at κ = cosh t.
    fn evan_terms(&mut self, t: f64, phi: f64, fast: bool) -> [C; 5] {
        let ch = t.cosh();
        let sh = t.sinh();
        let decay = (-self.two_k0_d * sh).exp();
        if decay == 0.0 {
            return [C::new(0.0, 0.0); 5];
        }
        let Some(r) = self.reflect(ch, phi) else {
            return [C::new(0.0, 0.0); 5];
        };
        if fast {
            let f1 = ch * (r.r_pp.im + sh * sh * r.r_ss.im) * decay;
            [
                C::new(f1, 0.0),
                C::new(f1, 0.0),
                C::new(ch * ch * ch * r.r_ss.im * decay, 0.0),
                C::new(-ch * sh * (r.r_ps + r.r_sp).im * decay, 0.0),
                C::new(0.0, 0.0),
            ]
        } else {
            let (sp, cp) = phi.sin_cos();
            let cross = (r.r_ps - r.r_sp).re;
            [
                C::new(
                    ch * (sp * sp * r.r_pp.im + sh * sh * cp * cp * r.r_ss.im
                        + sh * sp * cp * cross)
                        * decay,
                    0.0,
                ),
                C::new(
                    ch * (cp * cp * r.r_pp.im + sh * sh * sp * sp * r.r_ss.im
                        - sh * sp * cp * cross)
                        * decay,
                    0.0,
                ),
                C::new(ch * ch * ch * r.r_ss.im * decay, 0.0),
                C::new(ch * sh * (r.r_ps + r.r_sp).im * decay, 0.0),
                C::new(
                    ch * ch * (sh * sp * r.r_ss.im - 0.5 * cp * cross) * decay,
                    0.0,
                ),
            ]
        }
    }
}

fn check_point(omega: f64, distance: f64) -> Result<(), GreensError> {
    if !(omega > 0.0) {
        return Err(GreensError::Geometry(format!("frequency must be positive, got {omega}")));
    }
    if !(distance > 0.0) {
        return Err(GreensError::Geometry(format!("distance must be positive, got {distance}")));
    }
    Ok(())
}

/// The five weights of one channel at (ω, d). The reflection provider is
/// queried at the given frequency; callers pass ω > 0 and use parity for
/// the negative axis: reality of the field correlators makes the diagonal
/// weights (g_⊥1, g_⊥2, g_∥) even in ω and the gyrotropic cross weights
/// (g_g1, g_g2) odd.
pub fn greens_weights(
    omega: f64,
    distance: f64,
    orientation: InterfaceOrientation,
    provider: &dyn ReflectionProvider,
    channel: Channel,
    tol: f64,
    budget: usize,
) -> Result<GreensWeights, GreensError> {
    check_point(omega, distance)?;
    let mut kernel = WeightKernel {
        provider,
        channel,
        omega,
        two_k0_d: 2.0 * omega / C0 * distance,
        error: None,
    };
    let half_pi = 0.5 * std::f64::consts::PI;
    let inv_pi = 1.0 / std::f64::consts::PI;
    let t_max = evanescent_cutoff(kernel.two_k0_d);

    let (raw, evaluations, converged) = if provider.phi_independent() {
        let prop = integrate_finite_vec_with::<5>(
            &mut |theta| kernel.prop_terms(theta, 0.0, true),
            0.0,
            half_pi,
            tol,
            budget,
            ErrorNorm::Joint,
        )?;
        let evan = integrate_finite_vec_with::<5>(
            &mut |t| kernel.evan_terms(t, 0.0, true),
            0.0,
            t_max,
            tol,
            budget.saturating_sub(prop.evaluations).max(1000),
            ErrorNorm::Joint,
        )?;
        let mut sums = [0.0f64; 5];
        for i in 0..5 {
            sums[i] = prop.values[i].re + evan.values[i].re;
        }
        (
            sums,
            prop.evaluations + evan.evaluations,
            prop.converged && evan.converged,
        )
    } else {
        // φ outer, κ inner; the inner tolerances are tightened so the
        // inner noise stays below the outer error estimates.
        let inner_tol = 0.05 * tol;
        let mut inner_evals = 0usize;
        let mut inner_converged = true;
        let outer = integrate_finite_vec_with::<5>(
            &mut |phi| {
                let prop = match integrate_finite_vec_with::<5>(
                    &mut |theta| kernel.prop_terms(theta, phi, false),
                    0.0,
                    half_pi,
                    inner_tol,
                    budget,
                    ErrorNorm::Joint,
                ) {
                    Ok(r) => r,
                    Err(e) => {
                        kernel.error.get_or_insert(GreensError::Quadrature(e));
                        return [C::new(0.0, 0.0); 5];
                    }
                };
                let evan = match integrate_finite_vec_with::<5>(
                    &mut |t| kernel.evan_terms(t, phi, false),
                    0.0,
                    t_max,
                    inner_tol,
                    budget,
                    ErrorNorm::Joint,
                ) {
                    Ok(r) => r,
                    Err(e) => {
                        kernel.error.get_or_insert(GreensError::Quadrature(e));
                        return [C::new(0.0, 0.0); 5];
                    }
                };
                inner_evals += prop.evaluations + evan.evaluations;
                inner_converged &= prop.converged && evan.converged;
                let mut out = [C::new(0.0, 0.0); 5];
                for i in 0..5 {
                    out[i] = prop.values[i] + evan.values[i];
                }
                out
            },
            0.0,
            2.0 * std::f64::consts::PI,
            tol,
            budget,
            ErrorNorm::Joint,
        )?;
        let sums = [
            inv_pi * outer.values[0].re,
            inv_pi * outer.values[1].re,
            0.5 * inv_pi * outer.values[2].re,
            -0.5 * inv_pi * outer.values[3].re,
            inv_pi * outer.values[4].re,
        ];
        (sums, inner_evals, outer.converged && inner_converged)
    };

    if let Some(e) = kernel.error {
        return Err(e);
    }
    if !converged {
        return Err(GreensError::NotConverged { evaluations });
    }
    let [g1, g2, g3, g4, g5] = raw;
    // The φ-independent integrands already carry their prefactors and the
    // sign of the in-plane cross weight.
    let (g_g1, g_g2) = if provider.phi_independent() { (g4, 0.0) } else { (g4, g5) };
    let (g_perp1, g_perp2, g_par) = (g1, g2, g3);
    Ok(GreensWeights { g_perp1, g_perp2, g_par, g_g1, g_g2, orientation })
}

/// Off-diagonal reduced Green's components for the transverse torque. For a
/// φ-independent interface every component vanishes identically by the
/// azimuthal integral.
pub fn offdiagonal_greens(
    omega: f64,
    distance: f64,
    orientation: InterfaceOrientation,
    provider: &dyn ReflectionProvider,
    channel: Channel,
    tol: f64,
    budget: usize,
) -> Result<OffDiagonalGreens, GreensError> {
    check_point(omega, distance)?;
    if provider.phi_independent() {
        return Ok(OffDiagonalGreens::zero());
    }
    let two_k0_d = 2.0 * omega / C0 * distance;
    let mut error: Option<GreensError> = None;

    // Interface-frame kernel: measure·i·coef·e^{2ik₀pd}, reflected part
    // only, components [h_xy, h_yx, h_xz, h_zx, h_yz, h_zy].
    let coefs = |kappa: f64, p: C, measure_over_p: C, phase: C, phi: f64, r: ReflectionMatrix| -> [C; 6] {
        let (sp, cp) = phi.sin_cos();
        let i = C::new(0.0, 1.0);
        let front = measure_over_p * i * phase;
        let sym = -sp * cp * r.r_pp - p * p * sp * cp * r.r_ss;
        [
            front * (sym + p * sp * sp * r.r_ps + p * cp * cp * r.r_sp),
            front * (sym - p * cp * cp * r.r_ps - p * sp * sp * r.r_sp),
            front * (-p * kappa * cp * r.r_ss + kappa * sp * r.r_ps),
            front * (p * kappa * cp * r.r_ss + kappa * sp * r.r_sp),
            front * (-p * kappa * sp * r.r_ss - kappa * cp * r.r_ps),
            front * (p * kappa * sp * r.r_ss - kappa * cp * r.r_sp),
        ]
    };

    let inner_tol = 0.05 * tol;
    let t_max = evanescent_cutoff(two_k0_d);
    let mut inner_converged = true;
    let outer = integrate_finite_vec_with::<6>(
        &mut |phi| {
            let mut prop_f = |theta: f64| -> [C; 6] {
                if error.is_some() {
                    return [C::new(0.0, 0.0); 6];
                }
                let (s, c) = theta.sin_cos();
                match provider.reflection(omega, s, phi) {
                    Ok(r) => {
                        let r = channel_matrix(r, channel);
                        let p = C::new(c, 0.0);
                        let phase = C::new(0.0, two_k0_d * c).exp();
                        coefs(s, p, C::new(s, 0.0), phase, phi, r)
                    }
                    Err(e) => {
                        error.get_or_insert(GreensError::Reflection(e));
                        [C::new(0.0, 0.0); 6]
                    }
                }
            };
            let prop = match integrate_finite_vec_with::<6>(
                &mut prop_f,
                0.0,
                0.5 * std::f64::consts::PI,
                inner_tol,
                budget,
                ErrorNorm::Joint,
            ) {
                Ok(v) => v,
                Err(e) => {
                    error.get_or_insert(GreensError::Quadrature(e));
                    return [C::new(0.0, 0.0); 6];
                }
            };
            let mut evan_f = |t: f64| -> [C; 6] {
                let ch = t.cosh();
                let sh = t.sinh();
                let decay = (-two_k0_d * sh).exp();
                if error.is_some() || decay == 0.0 {
                    return [C::new(0.0, 0.0); 6];
                }
                match provider.reflection(omega, ch, phi) {
                    Ok(r) => {
                        let r = channel_matrix(r, channel);
                        let p = C::new(0.0, sh);
                        let phase = C::new(decay, 0.0);
                        coefs(ch, p, C::new(0.0, -ch), phase, phi, r)
                    }
                    Err(e) => {
                        error.get_or_insert(GreensError::Reflection(e));
                        [C::new(0.0, 0.0); 6]
                    }
                }
            };
            let evan = match integrate_finite_vec_with::<6>(
                &mut evan_f,
                0.0,
                t_max,
                inner_tol,
                budget,
                ErrorNorm::Joint,
            ) {
                Ok(v) => v,
                Err(e) => {
                    error.get_or_insert(GreensError::Quadrature(e));
                    return [C::new(0.0, 0.0); 6];
                }
            };
            inner_converged &= prop.converged && evan.converged;
            let mut out = [C::new(0.0, 0.0); 6];
            for i in 0..6 {
                out[i] = prop.values[i] + evan.values[i];
            }
            out
        },
        0.0,
        2.0 * std::f64::consts::PI,
        tol,
        budget,
        ErrorNorm::Joint,
    )?;
    if let Some(e) = error {
        return Err(e);
    }
    if !(outer.converged && inner_converged) {
        return Err(GreensError::NotConverged { evaluations: outer.evaluations });
    }
    let inv_pi = 1.0 / std::f64::consts::PI;
    let h = |i: usize| inv_pi * outer.values[i];
    // Relabel interface-frame components into the lab frame.
    Ok(match orientation {
        InterfaceOrientation::XyPlane => OffDiagonalGreens {
            h_xz: h(2),
            h_zx: h(3),
            h_yz: h(4),
            h_zy: h(5),
        },
        InterfaceOrientation::XzPlane => OffDiagonalGreens {
            h_xz: h(1),
            h_zx: h(0),
            h_yz: h(3),
            h_zy: h(2),
        },
    })
}

/// In-plane/in-plane antisymmetric component in the interface frame (the
/// quantity behind g_g1), exposed for cross-checks of the two kernels.
pub fn inplane_cross_weight(
    omega: f64,
    distance: f64,
    provider: &dyn ReflectionProvider,
    channel: Channel,
    tol: f64,
    budget: usize,
) -> Result<f64, GreensError> {
    let w = greens_weights(
        omega,
        distance,
        InterfaceOrientation::XyPlane,
        provider,
        channel,
        tol,
        budget,
    )?;
    Ok(w.g_g1)
}

/// Local density of states at (ω, d): both channels' diagonal weights
/// assembled as ρ = (ρ₀/8)(g_⊥1 + g_⊥2 + 2g_∥) per channel.
pub fn ldos(
    omega: f64,
    distance: f64,
    orientation: InterfaceOrientation,
    provider: &dyn ReflectionProvider,
    tol: f64,
    budget: usize,
) -> Result<Ldos, GreensError> {
    let rho0 = vacuum_dos(omega);
    let h = greens_weights(omega, distance, orientation, provider, Channel::Magnetic, tol, budget)?;
    let e = greens_weights(omega, distance, orientation, provider, Channel::Electric, tol, budget)?;
    let magnetic = rho0 / 8.0 * (h.g_perp1 + h.g_perp2 + 2.0 * h.g_par);
    let electric = rho0 / 8.0 * (e.g_perp1 + e.g_perp2 + 2.0 * e.g_par);
    Ok(Ldos { electric, magnetic, total: electric + magnetic })
}
