//! Frequency-dependent material response: gyrotropic permeability of a
//! biased ferrite, sphere polarizabilities in both fluctuation channels,
//! local and non-local metal permittivities, and the rotating-frame
//! effective polarizability.
//!
//! Conventions: time dependence e^(-iωt), so passive response has positive
//! imaginary part at positive frequency. All response functions obey
//! f(-ω) = f*(ω) so that signed-frequency evaluation (needed for the
//! rotation-shifted arguments ω ± Ω) is well defined without special casing.

use crate::scenario::{C0, MU0};
use num_complex::Complex64;
use thiserror::Error;

/// Errors from material-model evaluation.
#[derive(Debug, Error)]
pub enum MaterialError {
    /// The non-local argument u = (ω+iΓ)/(k v_F) sits on a logarithmic
    /// branch point; the caller should perturb k.
    #[error("non-local response at a branch point: |u∓1| = {distance:.3e}")]
    BranchPoint { distance: f64 },
    /// The sphere is too large for the point-dipole description.
    #[error("dipole approximation violated: k0·a = {k0a:.3e} ≥ 0.1")]
    DipoleApproximation { k0a: f64 },
}

/// Permeability triplet (μ_⊥, μ_g, μ_∥) of a ferrite biased along its local
/// z axis, absolute units (H/m). The full tensor is
/// [[μ_⊥, -μ_g, 0], [μ_g, μ_⊥, 0], [0, 0, μ_∥]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GyrotropicPermeability {
    pub mu_perp: Complex64,
    pub mu_g: Complex64,
    pub mu_par: Complex64,
}

/// Which fluctuation channel a polarizability belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Magnetic,
    Electric,
}

/// Polarizability triplet (α_⊥, α_g, α_∥) of the sphere, m³, with the same
/// tensor layout as [`GyrotropicPermeability`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityTensor {
    pub alpha_perp: Complex64,
    pub alpha_g: Complex64,
    pub alpha_par: Complex64,
    pub channel: Channel,
}

impl PolarizabilityTensor {
    /// The zero tensor for a given channel.
    pub fn zero(channel: Channel) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { alpha_perp: z, alpha_g: z, alpha_par: z, channel }
    }

    /// An isotropic (scalar) tensor.
    pub fn isotropic(alpha: Complex64, channel: Channel) -> Self {
        Self { alpha_perp: alpha, alpha_g: Complex64::new(0.0, 0.0), alpha_par: alpha, channel }
    }
}

/// Longitudinal and transverse relative permittivities of a non-local metal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlocalDielectricPair {
    pub eps_l: Complex64,
    pub eps_t: Complex64,
}

/// Larmor precession frequency of a spinning magnetized body: the applied
/// bias plus the rotation itself (the rotation magnetizes the body as if an
/// extra field Ω/μ₀γ were applied).
///
/// `bias_field` in A/m, `gyro_ratio` in rad s⁻¹ T⁻¹; returns rad/s.
pub fn barnett_larmor(rotation_rate: f64, bias_field: f64, gyro_ratio: f64) -> f64 {
    rotation_rate + MU0 * gyro_ratio * bias_field
}

/// Constant Gilbert damping factor from a resonance linewidth ΔH (A/m),
/// evaluated at the reference (Larmor) frequency: α = μ₀γΔH/(2ω_ref).
pub fn gilbert_damping(dh_field: f64, gyro_ratio: f64, omega_ref: f64) -> f64 {
    MU0 * gyro_ratio * dh_field / (2.0 * omega_ref)
}

/// Landau–Lifshitz–Gilbert permeability of a ferrite biased along z.
///
/// `omega0` is the Larmor frequency, `omega_m` = μ₀γM_s, `alpha` the Gilbert
/// damping. The α² terms are kept in full; μ_∥ is exactly μ₀ in this model.
pub fn yig_permeability(omega: f64, omega0: f64, omega_m: f64, alpha: f64) -> GyrotropicPermeability {
    let w2 = omega * omega;
    let a2 = alpha * alpha;
    let det = {
        let d1 = omega0 * omega0 - w2 * (1.0 + a2);
        d1 * d1 + 4.0 * omega0 * omega0 * w2 * a2
    };
    let chi_perp = Complex64::new(
        omega0 * omega_m * (omega0 * omega0 - w2) + omega0 * omega_m * w2 * a2,
        alpha * omega * omega_m * (omega0 * omega0 + w2 * (1.0 + a2)),
    ) / det;
    let chi_g = Complex64::new(
        -2.0 * omega0 * omega_m * w2 * alpha,
        omega * omega_m * (omega0 * omega0 - w2 * (1.0 + a2)),
    ) / det;
    GyrotropicPermeability {
        mu_perp: MU0 * (1.0 + chi_perp),
        mu_g: MU0 * chi_g,
        mu_par: Complex64::new(MU0, 0.0),
    }
}

/// Magnetostatic polarizability tensor of a sphere with gyrotropic
/// permeability (shape factor of a sphere, a³ scaling, fields uniform
/// inside).
pub fn sphere_polarizability_gyromagnetic(
    radius: f64,
    mu: &GyrotropicPermeability,
) -> PolarizabilityTensor {
    let v = 4.0 * std::f64::consts::PI * radius.powi(3);
    let mp2 = mu.mu_perp + 2.0 * MU0;
    let den = mp2 * mp2 + mu.mu_g * mu.mu_g;
    PolarizabilityTensor {
        alpha_perp: v * ((mu.mu_perp - MU0) * mp2 + mu.mu_g * mu.mu_g) / den,
        alpha_g: v * 3.0 * MU0 * mu.mu_g / den,
        alpha_par: v * (mu.mu_par - MU0) / (mu.mu_par + 2.0 * MU0),
        channel: Channel::Magnetic,
    }
}

/// Lab-frame effective polarizability of a sphere spinning at `rotation`
/// about z, from its rest-frame tensor evaluated at the shifted frequencies
/// ω± = ω ± Ω:
///
/// α_⊥^eff(ω) = ½[α_⊥(ω⁺) + α_⊥(ω⁻) + iα_g(ω⁺) − iα_g(ω⁻)]
/// α_g^eff(ω) = −(i/2)[α_⊥(ω⁺) − α_⊥(ω⁻) + iα_g(ω⁺) + iα_g(ω⁻)]
/// α_∥^eff(ω) = α_∥(ω)
pub fn effective_rotating_polarizability(
    alpha: impl Fn(f64) -> PolarizabilityTensor,
    omega: f64,
    rotation: f64,
) -> PolarizabilityTensor {
    let i = Complex64::new(0.0, 1.0);
    let plus = alpha(omega + rotation);
    let minus = alpha(omega - rotation);
    let at = alpha(omega);
    PolarizabilityTensor {
        alpha_perp: 0.5
            * (plus.alpha_perp + minus.alpha_perp + i * plus.alpha_g - i * minus.alpha_g),
        alpha_g: -0.5
            * i
            * (plus.alpha_perp - minus.alpha_perp + i * plus.alpha_g + i * minus.alpha_g),
        alpha_par: at.alpha_par,
        channel: at.channel,
    }
}

/// Local Drude relative permittivity 1 − ω_p²/(ω(ω+iΓ)).
pub fn drude_permittivity(omega: f64, omega_p: f64, gamma: f64) -> Complex64 {
    1.0 - omega_p * omega_p / (Complex64::new(omega, 0.0) * Complex64::new(omega, gamma))
}

/// Longitudinal and transverse permittivities of a non-local electron gas
/// at wavevector `k` (1/m) and frequency `omega`, with specular-reflection
/// closure in mind.
///
/// u = (ω+iΓ)/(k v_F); the logarithm is principal-branch, and arguments
/// within 1e-12 of the branch points u = ±1 are rejected so the caller can
/// perturb k instead of silently crossing a cut.
pub fn nonlocal_dielectrics(
    k: f64,
    omega: f64,
    omega_p: f64,
    gamma: f64,
    v_fermi: f64,
) -> Result<NonlocalDielectricPair, MaterialError> {
    let u = Complex64::new(omega, gamma) / (k * v_fermi);
    let d = (u - 1.0).norm().min((u + 1.0).norm());
    if d < 1e-12 {
        return Err(MaterialError::BranchPoint { distance: d });
    }
    let (f_l, f_t) = if u.norm() >= 5.0 {
        // Large-argument series: the closed forms subtract O(u²) terms that
        // cancel to O(1), which destroys all precision once |u| ≳ 1e8.
        let iu2 = 1.0 / (u * u);
        let mut pow = Complex64::new(1.0, 0.0);
        let mut f_l = Complex64::new(0.0, 0.0);
        let mut f_t = Complex64::new(1.0, 0.0);
        for n in 1..=12 {
            pow *= iu2;
            let m = (2 * n + 1) as f64;
            f_l -= pow / m;
            f_t += 3.0 * pow / (m * (m + 2.0));
        }
        (f_l, f_t)
    } else {
        let log_term = ((u + 1.0) / (u - 1.0)).ln();
        (
            1.0 - 0.5 * u * log_term,
            1.5 * u * u - 0.75 * u * (u * u - 1.0) * log_term,
        )
    };
    let wg = Complex64::new(omega, gamma);
    let kv = k * v_fermi;
    let eps_l = 1.0 + (3.0 * omega_p * omega_p / (kv * kv)) * wg * f_l / (omega + Complex64::new(0.0, gamma) * f_l);
    let eps_t = 1.0 - omega_p * omega_p / (Complex64::new(omega, 0.0) * wg) * f_t;
    Ok(NonlocalDielectricPair { eps_l, eps_t })
}

/// Electric and magnetic dipole polarizabilities of a small metal sphere.
///
/// Electric channel: quasistatic 4πa³(ε−1)/(ε+2). Magnetic channel: the
/// leading eddy-current term 4πa³(k₀a)²(ε−1)/30 — the magnetostatic part is
/// exactly zero for μ = μ₀, so the first finite-size correction carries the
/// whole response. Validity requires k₀a < 0.1.
pub fn metal_sphere_polarizability(
    omega: f64,
    radius: f64,
    eps: Complex64,
) -> Result<(PolarizabilityTensor, PolarizabilityTensor), MaterialError> {
    let k0a = omega.abs() / C0 * radius;
    if k0a >= 0.1 {
        return Err(MaterialError::DipoleApproximation { k0a });
    }
    let v = 4.0 * std::f64::consts::PI * radius.powi(3);
    let electric = v * (eps - 1.0) / (eps + 2.0);
    let magnetic = v * k0a * k0a * (eps - 1.0) / 30.0;
    Ok((
        PolarizabilityTensor::isotropic(electric, Channel::Electric),
        PolarizabilityTensor::isotropic(magnetic, Channel::Magnetic),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::oersted_to_a_per_m;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const GYRO: f64 = 1.760859e11;
    const PI2: f64 = 2.0 * std::f64::consts::PI;

    fn h_oe(oe: f64) -> f64 {
        oersted_to_a_per_m(oe)
    }

    #[test]
    fn barnett_zero_field_and_additivity() {
        let omega = PI2 * 1e9;
        assert_eq!(barnett_larmor(omega, 0.0, GYRO), omega);
        let h = h_oe(812.0);
        assert_relative_eq!(
            barnett_larmor(omega, h, GYRO) - barnett_larmor(0.0, h, GYRO),
            omega,
            max_relative = 1e-12
        );
        // 812 Oe alone puts the Larmor frequency at ~2.28 GHz.
        assert_relative_eq!(barnett_larmor(0.0, h, GYRO), 1.4298e10, max_relative = 1e-3);
    }

    #[test]
    fn permeability_static_limit() {
        let w0 = 1.43e10;
        let wm = 3.13e10;
        let mu = yig_permeability(0.0, w0, wm, 0.02);
        assert_relative_eq!(mu.mu_perp.re, MU0 * (1.0 + wm / w0), max_relative = 1e-14);
        assert_eq!(mu.mu_perp.im, 0.0);
        assert_eq!(mu.mu_g, Complex64::new(0.0, 0.0));
        assert_eq!(mu.mu_par, Complex64::new(MU0, 0.0));
    }

    #[test]
    fn undamped_resonance_diverges() {
        let w0 = 1.43e10;
        let mu = yig_permeability(w0 * (1.0 + 1e-12), w0, 3.13e10, 0.0);
        assert!(mu.mu_perp.norm() > 1e6 * MU0);
    }

    #[test]
    fn resonance_peak_height() {
        // M_s = 1780 Oe, ΔH = 45 Oe: the absorption peak of Im μ_⊥ sits at
        // the Larmor frequency with height ≈ μ₀·ω_m/(2αω₀) for small α.
        let w0 = barnett_larmor(0.0, h_oe(812.0), GYRO);
        let wm = MU0 * GYRO * h_oe(1780.0);
        let alpha = gilbert_damping(h_oe(45.0), GYRO, w0);
        let mut peak = 0.0_f64;
        let mut peak_w = 0.0_f64;
        for i in 0..10_000 {
            let w = w0 * (0.5 + 1e-4 * i as f64);
            let im = yig_permeability(w, w0, wm, alpha).mu_perp.im;
            if im > peak {
                peak = im;
                peak_w = w;
            }
        }
        assert_relative_eq!(peak, MU0 * wm / (2.0 * alpha * w0), max_relative = 0.1);
        assert_relative_eq!(peak_w, w0, max_relative = 2.0 * alpha);
    }

    #[test]
    fn vacuum_sphere_has_no_response() {
        let mu = GyrotropicPermeability {
            mu_perp: Complex64::new(MU0, 0.0),
            mu_g: Complex64::new(0.0, 0.0),
            mu_par: Complex64::new(MU0, 0.0),
        };
        let a = sphere_polarizability_gyromagnetic(200e-9, &mu);
        assert_eq!(a.alpha_perp, Complex64::new(0.0, 0.0));
        assert_eq!(a.alpha_g, Complex64::new(0.0, 0.0));
        assert_eq!(a.alpha_par, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn isotropic_point_value_and_cubic_scaling() {
        let mu = GyrotropicPermeability {
            mu_perp: Complex64::new(3.0 * MU0, 0.0),
            mu_g: Complex64::new(0.0, 0.0),
            mu_par: Complex64::new(MU0, 0.0),
        };
        let a = 200e-9;
        let t1 = sphere_polarizability_gyromagnetic(a, &mu);
        let vol = 4.0 * std::f64::consts::PI * a.powi(3);
        assert_relative_eq!(t1.alpha_perp.re, vol * 2.0 / 5.0, max_relative = 1e-14);
        assert_eq!(t1.alpha_g, Complex64::new(0.0, 0.0));
        let t2 = sphere_polarizability_gyromagnetic(2.0 * a, &mu);
        assert_relative_eq!(t2.alpha_perp.re, 8.0 * t1.alpha_perp.re, max_relative = 1e-14);
    }

    fn yig_tensor(omega: f64) -> PolarizabilityTensor {
        let w0 = barnett_larmor(PI2 * 1e9, h_oe(812.0), GYRO);
        let wm = MU0 * GYRO * h_oe(1780.0);
        let alpha = gilbert_damping(h_oe(45.0), GYRO, w0);
        sphere_polarizability_gyromagnetic(200e-9, &yig_permeability(omega, w0, wm, alpha))
    }

    #[test]
    fn effective_tensor_collapses_at_rest() {
        let w = PI2 * 3e9;
        let eff = effective_rotating_polarizability(yig_tensor, w, 0.0);
        let direct = yig_tensor(w);
        assert!((eff.alpha_perp - direct.alpha_perp).norm() < 1e-30);
        assert!((eff.alpha_g - direct.alpha_g).norm() < 1e-30);
    }

    #[test]
    fn effective_tensor_isotropic_average() {
        let scalar = |w: f64| {
            PolarizabilityTensor::isotropic(
                Complex64::new(1.0 / (1.0 + w * w * 1e-20), 1e-11 * w),
                Channel::Magnetic,
            )
        };
        let (w, rot) = (PI2 * 2e9, PI2 * 1e9);
        let eff = effective_rotating_polarizability(scalar, w, rot);
        let expect = 0.5 * (scalar(w + rot).alpha_perp + scalar(w - rot).alpha_perp);
        assert!((eff.alpha_perp - expect).norm() < 1e-25);
    }

    #[test]
    fn effective_tensor_conjugation() {
        let rot = PI2 * 1e9;
        for w in [PI2 * 0.3e9, PI2 * 2.2e9, PI2 * 40e9] {
            let plus = effective_rotating_polarizability(yig_tensor, w, rot);
            let minus = effective_rotating_polarizability(yig_tensor, -w, rot);
            assert!((minus.alpha_perp - plus.alpha_perp.conj()).norm() < 1e-10 * plus.alpha_perp.norm());
            assert!((minus.alpha_g - plus.alpha_g.conj()).norm() < 1e-10 * plus.alpha_perp.norm());
        }
    }

    #[test]
    fn nonlocal_reaches_local_drude() {
        // Scaling v_F down by 10³ sends u → large, where both permittivities
        // collapse to the local Drude form.
        let (wp, g, vf) = (2.24e16, 1.22e14, 2.03e6 * 1e-3);
        let w = PI2 * 1e9;
        let local = drude_permittivity(w, wp, g);
        for kappa in [0.5, 2.0, 50.0] {
            let k = w / C0 * (1.0_f64 + kappa * kappa).sqrt();
            let nl = nonlocal_dielectrics(k, w, wp, g, vf).unwrap();
            assert!((nl.eps_t - local).norm() < 1e-3 * local.norm());
            assert!((nl.eps_l - local).norm() < 1e-3 * local.norm());
        }
    }

    #[test]
    fn nonlocal_local_convergence_monotone() {
        let (wp, g) = (2.24e16, 1.22e14);
        let w = PI2 * 1e9;
        let k = w / C0 * 10.0;
        let local = drude_permittivity(w, wp, g);
        let mut prev = f64::INFINITY;
        for scale in [1.0, 1e-1, 1e-2, 1e-3] {
            let nl = nonlocal_dielectrics(k, w, wp, g, 2.03e6 * scale).unwrap();
            let dev = (nl.eps_t - local).norm();
            assert!(dev < prev, "deviation must shrink with v_F");
            prev = dev;
        }
    }

    #[test]
    fn branch_point_rejected() {
        // With Γ = 0 and k = ω/v_F the argument u is exactly +1.
        let w = 1e10;
        let vf = 2.03e6;
        let err = nonlocal_dielectrics(w / vf, w, 2.24e16, 0.0, vf).unwrap_err();
        assert!(matches!(err, MaterialError::BranchPoint { .. }));
    }

    #[test]
    fn metal_sphere_vacuum_and_quasistatic_point() {
        let a = 200e-9;
        let w = PI2 * 1e9;
        let (e, m) = metal_sphere_polarizability(w, a, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(e.alpha_perp, Complex64::new(0.0, 0.0));
        assert_eq!(m.alpha_perp, Complex64::new(0.0, 0.0));
        let (e, _) = metal_sphere_polarizability(w, a, Complex64::new(4.0, 0.0)).unwrap();
        let vol = 4.0 * std::f64::consts::PI * a.powi(3);
        assert_relative_eq!(e.alpha_perp.re, 0.5 * vol, max_relative = 1e-14);
    }

    #[test]
    fn oversized_sphere_rejected() {
        let a = 200e-9;
        let w = 0.2 * C0 / a;
        assert!(matches!(
            metal_sphere_polarizability(w, a, Complex64::new(4.0, 0.0)),
            Err(MaterialError::DipoleApproximation { .. })
        ));
    }

    /// First magnetic Mie coefficient b₁ for a nonmagnetic sphere of
    /// relative permittivity eps (Bohren & Huffman conventions), via
    /// Riccati–Bessel functions of order one.
    fn mie_b1(x: f64, eps: Complex64) -> Complex64 {
        let m = eps.sqrt();
        let z = m * x;
        let xi = Complex64::new(x, 0.0);
        let j0 = |z: Complex64| z.sin() / z;
        let j1 = |z: Complex64| z.sin() / (z * z) - z.cos() / z;
        let psi = |z: Complex64| z * j1(z);
        let dpsi = |z: Complex64| z * j0(z) - j1(z);
        let h0 = -Complex64::new(0.0, 1.0) * (Complex64::new(0.0, 1.0) * xi).exp() / xi;
        let h1 = -(Complex64::new(0.0, 1.0) * xi).exp() * (xi + Complex64::new(0.0, 1.0)) / (xi * xi);
        let xi1 = xi * h1;
        let dxi1 = xi * h0 - h1;
        (psi(z) * dpsi(xi) - m * psi(xi) * dpsi(z)) / (psi(z) * dxi1 - m * xi1 * dpsi(z))
    }

    #[test]
    fn eddy_current_term_matches_mie() {
        let x = 0.05;
        let a = 200e-9;
        let w = x * C0 / a;
        for eps in [Complex64::new(2.5, 0.1), Complex64::new(4.0, 1.0), Complex64::new(9.0, 3.0)] {
            let (_, mag) = metal_sphere_polarizability(w, a, eps).unwrap();
            let k = w / C0;
            let oracle = Complex64::new(0.0, 6.0 * std::f64::consts::PI) * mie_b1(x, eps) / k.powi(3);
            assert!(
                (mag.alpha_perp - oracle).norm() < 0.05 * oracle.norm(),
                "eddy term {} vs Mie {} at eps {}",
                mag.alpha_perp,
                oracle,
                eps
            );
        }
    }

    proptest! {
        #[test]
        fn polarizability_reality(w in 1e8f64..1e12, h0 in 0.0f64..3000.0, ms in 100.0f64..3000.0) {
            let w0 = barnett_larmor(PI2 * 1e9, h_oe(h0), GYRO);
            let wm = MU0 * GYRO * h_oe(ms);
            let alpha = gilbert_damping(h_oe(45.0), GYRO, w0);
            let at = |w: f64| sphere_polarizability_gyromagnetic(200e-9, &yig_permeability(w, w0, wm, alpha));
            let (p, n) = (at(w), at(-w));
            prop_assert!((n.alpha_perp - p.alpha_perp.conj()).norm() <= 1e-10 * p.alpha_perp.norm().max(1e-30));
            prop_assert!((n.alpha_g - p.alpha_g.conj()).norm() <= 1e-10 * p.alpha_g.norm().max(1e-30));
            prop_assert!((n.alpha_par - p.alpha_par.conj()).norm() <= 1e-10 * p.alpha_par.norm().max(1e-30));
        }

        #[test]
        fn metal_polarizability_reality(w in 1e8f64..1e12) {
            let eps_p = drude_permittivity(w, 2.24e16, 1.22e14);
            let eps_n = drude_permittivity(-w, 2.24e16, 1.22e14);
            prop_assert!((eps_n - eps_p.conj()).norm() <= 1e-12 * eps_p.norm());
            let (ep, mp) = metal_sphere_polarizability(w, 200e-9, eps_p).unwrap();
            let (en, mn) = metal_sphere_polarizability(-w, 200e-9, eps_n).unwrap();
            prop_assert!((en.alpha_perp - ep.alpha_perp.conj()).norm() <= 1e-12 * ep.alpha_perp.norm());
            prop_assert!((mn.alpha_perp - mp.alpha_perp.conj()).norm() <= 1e-12 * mp.alpha_perp.norm());
        }

        #[test]
        fn field_reversal_symmetry(w in 1e8f64..1e12) {
            // Reversing the bias (ω₀, ω_m, α) → −(ω₀, ω_m, α) leaves μ_⊥
            // unchanged and flips μ_g exactly.
            let (w0, wm, alpha) = (1.43e10, 3.13e10, 0.02);
            let fwd = yig_permeability(w, w0, wm, alpha);
            let rev = yig_permeability(w, -w0, -wm, -alpha);
            prop_assert_eq!(fwd.mu_perp, rev.mu_perp);
            prop_assert_eq!(fwd.mu_g, -rev.mu_g);
        }

        #[test]
        fn passivity_in_the_ghz_band(w in 1e8f64..1e11) {
            let t = yig_tensor(w);
            prop_assert!(t.alpha_perp.im > 0.0);
        }
    }
}
