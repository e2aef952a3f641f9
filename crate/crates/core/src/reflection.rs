//! Fresnel reflection matrices for the three interface families: local
//! isotropic half-spaces, non-local metals (specular-reflection surface
//! impedances), and gyrotropic magnetic half-spaces (quartic mode dispersion
//! plus 4×4 boundary matching).
//!
//! Geometry: the interface occupies z = 0 of its own frame with the medium
//! filling z < 0; vacuum wavevectors are normalized to k₀ = ω/c, with κ the
//! in-plane magnitude, φ the in-plane azimuth, and p = k_z/k₀ the normal
//! component (p = i√(κ²−1) on the evanescent branch). Negative frequencies
//! are evaluated by the reality convention r(−ω) = r*(ω).

use crate::materials::{
    drude_permittivity, nonlocal_dielectrics, GyrotropicPermeability, MaterialError,
};
use crate::quadrature::{integrate_finite_vec, QuadratureError};
use crate::scenario::{MetalParams, C0, MU0};
use num_complex::Complex64;
use thiserror::Error;

type C = Complex64;

/// Errors from reflection-coefficient evaluation.
#[derive(Debug, Error)]
pub enum ReflectionError {
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("surface-impedance quadrature did not converge after {evaluations} evaluations")]
    NotConverged { evaluations: usize },
    #[error("slab mode search failed: {detail}")]
    RootFinding { detail: String },
    #[error("boundary matching system is ill-conditioned: cond = {condition:.3e}")]
    IllConditioned { condition: f64 },
}

/// The 2×2 reflection matrix in the (s, p) polarization basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionMatrix {
    pub r_ss: C,
    pub r_sp: C,
    pub r_ps: C,
    pub r_pp: C,
}

impl ReflectionMatrix {
    pub fn zero() -> Self {
        let z = C::new(0.0, 0.0);
        Self { r_ss: z, r_sp: z, r_ps: z, r_pp: z }
    }

    /// Entry-wise complex conjugate (negative-frequency convention).
    pub fn conj(&self) -> Self {
        Self {
            r_ss: self.r_ss.conj(),
            r_sp: self.r_sp.conj(),
            r_ps: self.r_ps.conj(),
            r_pp: self.r_pp.conj(),
        }
    }

    /// Exchange the roles of the two polarizations (s↔p), which converts
    /// magnetic-channel weight formulas into electric-channel ones.
    pub fn swap_polarizations(&self) -> Self {
        Self { r_ss: self.r_pp, r_sp: self.r_ps, r_ps: self.r_sp, r_pp: self.r_ss }
    }
}

/// Normal wavevector component p = k_z/k₀ above the interface: real for
/// propagating waves, +i√(κ²−1) for evanescent ones.
pub fn vacuum_kz(kappa: f64) -> C {
    if kappa <= 1.0 {
        C::new((1.0 - kappa * kappa).sqrt(), 0.0)
    } else {
        C::new(0.0, (kappa * kappa - 1.0).sqrt())
    }
}

/// Normal wavevector inside a local isotropic medium, branch chosen to decay
/// or radiate into the half-space (principal square root, which maps passive
/// media to Im ≥ 0 at positive frequency).
fn medium_kz(kappa: f64, eps: C, mu: C) -> C {
    (eps * mu - kappa * kappa).sqrt()
}

/// Textbook reflection matrix of a local isotropic half-space.
pub fn fresnel_local(omega: f64, kappa: f64, eps: C, mu: C) -> ReflectionMatrix {
    if omega < 0.0 {
        return fresnel_local(-omega, kappa, eps.conj(), mu.conj()).conj();
    }
    let p = vacuum_kz(kappa);
    let w = medium_kz(kappa, eps, mu);
    ReflectionMatrix {
        r_ss: (mu * p - w) / (mu * p + w),
        r_sp: C::new(0.0, 0.0),
        r_ps: C::new(0.0, 0.0),
        r_pp: (eps * p - w) / (eps * p + w),
    }
}

/// Reflection matrix of a non-local metal half-space under the
/// specular-reflection closure: the s and p surface admittances are built
/// from wavevector-resolved longitudinal/transverse permittivities,
///
///   W_s = (2i/π)∫₀^∞ dq / (ε_t − q² − κ²),
///   W_p = (2i/π)∫₀^∞ dq [ q²/(ε_t − q² − κ²) + κ²/ε_l ] / (q² + κ²),
///
/// with q the normal wavevector in units of k₀ and both permittivities
/// evaluated at k = k₀√(q²+κ²). Then r_ss = (pW_s − 1)/(pW_s + 1) and
/// r_pp = (p − W_p)/(p + W_p); in the local limit W_s → 1/w and W_p → w/ε,
/// recovering the Fresnel forms.
pub fn fresnel_nonlocal_scib(
    omega: f64,
    kappa: f64,
    metal: &MetalParams,
    tol: f64,
    budget: usize,
) -> Result<ReflectionMatrix, ReflectionError> {
    if omega < 0.0 {
        return Ok(fresnel_nonlocal_scib(-omega, kappa, metal, tol, budget)?.conj());
    }
    let k0 = omega / C0;
    let eps_local = drude_permittivity(omega, metal.omega_p, metal.gamma);
    // Substitution q = Q t/(1−t) maps [0,1) onto the half-line with the
    // scale Q set by the slower of the κ cutoff and the bulk wave scale.
    let q_scale = (eps_local - kappa * kappa).sqrt().norm().max(kappa).max(1.0);
    let k2 = kappa * kappa;
    let mut material_error: Option<MaterialError> = None;
    let result = integrate_finite_vec::<2>(
        &mut |t: f64| {
            let q = q_scale * t / (1.0 - t);
            let jac = q_scale / ((1.0 - t) * (1.0 - t));
            let k = k0 * (q * q + k2).sqrt();
            match nonlocal_dielectrics(k, omega, metal.omega_p, metal.gamma, metal.v_fermi) {
                Ok(d) => {
                    let den_t = d.eps_t - q * q - k2;
                    let ws = jac / den_t;
                    let wp = jac
                        * (q * q / ((q * q + k2) * den_t) + k2 / ((q * q + k2) * d.eps_l));
                    [ws, wp]
                }
                Err(e) => {
                    material_error.get_or_insert(e);
                    [C::new(f64::NAN, 0.0); 2]
                }
            }
        },
        0.0,
        1.0,
        tol,
        budget,
    )?;
    if let Some(e) = material_error {
        return Err(ReflectionError::Material(e));
    }
    if !result.converged {
        return Err(ReflectionError::NotConverged { evaluations: result.evaluations });
    }
    let front = C::new(0.0, 2.0 / std::f64::consts::PI);
    let ws = front * result.values[0];
    let wp = front * result.values[1];
    let p = vacuum_kz(kappa);
    Ok(ReflectionMatrix {
        r_ss: (p * ws - 1.0) / (p * ws + 1.0),
        r_sp: C::new(0.0, 0.0),
        r_ps: C::new(0.0, 0.0),
        r_pp: (p - wp) / (p + wp),
    })
}

/// One transmitted eigenmode of the gyrotropic half-space.
#[derive(Debug, Clone, Copy)]
pub struct SlabMode {
    /// Normal wavevector in units of k₀, oriented so that Im > 0 means
    /// decay into the medium (the physical z-component is −k_z).
    pub k_z: C,
    /// Field eigenvector (E_x, E_y, E_z, η₀H_x, η₀H_y, η₀H_z).
    pub field: [C; 6],
}

/// The two downward modes of the slab at one (ω, κ, φ).
#[derive(Debug, Clone)]
pub struct SlabModeSet {
    pub modes: [SlabMode; 2],
    /// Largest |det| among the selected roots, normalized by the dispersion
    /// polynomial's own coefficient scale.
    pub residual: f64,
    /// True when the two roots are separated by less than 1e-8 of the
    /// spectral radius (isotropic degeneracy or near-crossing).
    pub near_degenerate: bool,
}

/// Relative 3×3 permeability tensor for a bias along the unit vector `n`
/// in the interface frame: μ_⊥ transverse, μ_∥ along the bias, and the
/// gyrotropic part μ_g n×.
pub fn mu_tensor_interface(mu: &GyrotropicPermeability, n: [f64; 3]) -> [[C; 3]; 3] {
    let perp = mu.mu_perp / MU0;
    let par = mu.mu_par / MU0;
    let g = mu.mu_g / MU0;
    let mut t = [[C::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            t[i][j] = perp * (delta - n[i] * n[j]) + par * (n[i] * n[j]);
        }
    }
    // n× cross-product matrix.
    t[0][1] -= g * n[2];
    t[1][0] += g * n[2];
    t[0][2] += g * n[1];
    t[2][0] -= g * n[1];
    t[1][2] -= g * n[0];
    t[2][1] += g * n[0];
    t
}

/// Determinant of the 6×6 Maxwell operator (M + M_k) for a plane wave with
/// normalized wavevector (k_x, k_y, q) inside the medium, where M holds the
/// material tensors and M_k the curl blocks.
fn maxwell_det(eps_s: C, mu_r: &[[C; 3]; 3], kx: f64, ky: f64, q: C) -> C {
    let mut a = [[C::new(0.0, 0.0); 6]; 6];
    for i in 0..3 {
        a[i][i] = eps_s;
        for j in 0..3 {
            a[3 + i][3 + j] = mu_r[i][j];
        }
    }
    // Cross-product matrix of (k_x, k_y, q) in the off-diagonal blocks.
    let k = [C::new(kx, 0.0), C::new(ky, 0.0), q];
    let cross = [
        [C::new(0.0, 0.0), -k[2], k[1]],
        [k[2], C::new(0.0, 0.0), -k[0]],
        [-k[1], k[0], C::new(0.0, 0.0)],
    ];
    for i in 0..3 {
        for j in 0..3 {
            a[i][3 + j] = cross[i][j];
            a[3 + i][j] = -cross[i][j];
        }
    }
    det6(a)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det6(mut a: [[C; 6]; 6]) -> C {
    let mut det = C::new(1.0, 0.0);
    for col in 0..6 {
        let pivot = (col..6)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..6 {
            let f = a[row][col] / a[col][col];
            for j in col..6 {
                a[row][j] = a[row][j] - f * a[col][j];
            }
        }
    }
    det
}

/// Nullspace basis of a 6×6 matrix by full-pivot elimination: returns one
/// vector per pivot smaller than `rel_thresh` times the largest pivot.
///
/// Rows are scaled to unit maximum first — that leaves the nullspace
/// untouched while keeping the rank decision meaningful when row scales
/// spread over many orders (large-κ dispersion matrices mix O(1) material
/// entries with O(κ²) wavevector entries).
fn nullspace6(mut a: [[C; 6]; 6], rel_thresh: f64) -> Vec<[C; 6]> {
    for row in a.iter_mut() {
        let m = row.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if m > 0.0 {
            for z in row.iter_mut() {
                *z /= m;
            }
        }
    }
    let mut col_perm = [0usize; 6];
    for (i, c) in col_perm.iter_mut().enumerate() {
        *c = i;
    }
    let mut pivots = [0.0f64; 6];
    for step in 0..6 {
        let (mut pr, mut pc, mut best) = (step, step, -1.0f64);
        for r in step..6 {
            for c in step..6 {
                if a[r][c].norm() > best {
                    best = a[r][c].norm();
                    pr = r;
                    pc = c;
                }
            }
        }
        a.swap(pr, step);
        if pc != step {
            for row in a.iter_mut() {
                row.swap(pc, step);
            }
            col_perm.swap(pc, step);
        }
        pivots[step] = a[step][step].norm();
        if pivots[step] == 0.0 {
            continue;
        }
        for r in step + 1..6 {
            let f = a[r][step] / a[step][step];
            for c in step..6 {
                a[r][c] = a[r][c] - f * a[step][c];
            }
        }
    }
    let scale = pivots.iter().cloned().fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    let rank = pivots.iter().take_while(|&&p| p > rel_thresh * scale).count();
    let mut basis = Vec::new();
    for free in rank..6 {
        let mut x = [C::new(0.0, 0.0); 6];
        x[free] = C::new(1.0, 0.0);
        for row in (0..rank).rev() {
            let mut s = a[row][free];
            for c in row + 1..rank {
                s += a[row][c] * x[c];
            }
            x[row] = -s / a[row][row];
        }
        let mut out = [C::new(0.0, 0.0); 6];
        for (i, &ci) in col_perm.iter().enumerate() {
            out[ci] = x[i];
        }
        let max = out.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        for z in &mut out {
            *z /= max;
        }
        basis.push(out);
    }
    basis
}

/// Evaluate the degree-≤4 dispersion polynomial's coefficients by sampling
/// the determinant on five points of a circle of radius `r` and inverting
/// the DFT (exact for polynomials of degree < 5, perfectly conditioned).
fn quartic_coefficients(
    eps_s: C,
    mu_r: &[[C; 3]; 3],
    kx: f64,
    ky: f64,
    r: f64,
) -> [C; 5] {
    let n = 5;
    let mut samples = [C::new(0.0, 0.0); 5];
    for (j, s) in samples.iter_mut().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let z = r * C::new(theta.cos(), theta.sin());
        *s = maxwell_det(eps_s, mu_r, kx, ky, z);
    }
    let mut coeffs = [C::new(0.0, 0.0); 5];
    for (m, c) in coeffs.iter_mut().enumerate() {
        let mut acc = C::new(0.0, 0.0);
        for (j, s) in samples.iter().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (j * m) as f64 / n as f64;
            acc += s * C::new(theta.cos(), theta.sin());
        }
        *c = acc / (n as f64 * r.powi(m as i32));
    }
    coeffs
}

/// All roots of a polynomial with the given coefficients (c[0] + c[1]x + …)
/// by Durand–Kerner iteration, after trimming negligible leading terms.
fn polynomial_roots(coeffs: &[C; 5], scale: f64) -> Result<Vec<C>, ReflectionError> {
    let coeff_scale = coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| c.norm() * scale.powi(m as i32))
        .fold(0.0f64, f64::max);
    let mut degree = 4usize;
    while degree > 0
        && coeffs[degree].norm() * scale.powi(degree as i32) < 1e-13 * coeff_scale
    {
        degree -= 1;
    }
    if degree == 0 {
        return Err(ReflectionError::RootFinding {
            detail: "dispersion polynomial is constant".into(),
        });
    }
    let lead = coeffs[degree];
    let mut roots: Vec<C> = (0..degree)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / degree as f64 + 0.4;
            0.8 * scale * C::new(theta.cos(), theta.sin())
        })
        .collect();
    let eval = |z: C| -> C {
        let mut acc = C::new(0.0, 0.0);
        for m in (0..=degree).rev() {
            acc = acc * z + coeffs[m];
        }
        acc
    };
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let mut denom = lead;
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                roots[i] += C::new(1e-8 * scale, 1e-8 * scale);
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * scale {
            break;
        }
    }
    Ok(roots)
}

/// Configuration of a gyrotropic half-space: scalar permittivity, LLG
/// permeability, and the bias direction expressed in the interface frame.
#[derive(Debug, Clone, Copy)]
pub struct GyromagneticSlab {
    pub eps_s: C,
    pub mu: GyrotropicPermeability,
    pub bias: [f64; 3],
}

/// Find the two transmitted eigenmodes of the gyrotropic half-space at one
/// (ω, κ, φ): roots of det(M + M_k) = 0 in the normal wavevector, selected
/// by decay into the medium, with their field eigenvectors.
pub fn slab_modes_gyromagnetic(
    kappa: f64,
    phi: f64,
    slab: &GyromagneticSlab,
) -> Result<SlabModeSet, ReflectionError> {
    let mu_r = mu_tensor_interface(&slab.mu, slab.bias);
    let kx = kappa * phi.cos();
    let ky = kappa * phi.sin();
    let mu_norm = mu_r
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let scale = (slab.eps_s.norm() * mu_norm).sqrt().max(kappa).max(1.0);
    let coeffs = quartic_coefficients(slab.eps_s, &mu_r, kx, ky, scale);
    let mut roots = polynomial_roots(&coeffs, scale)?;
    let coeff_scale = coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| c.norm() * scale.powi(m as i32))
        .fold(0.0f64, f64::max);

    // Newton polish against the actual determinant.
    let h = 1e-7 * scale;
    for q in roots.iter_mut() {
        for _ in 0..3 {
            let d0 = maxwell_det(slab.eps_s, &mu_r, kx, ky, *q);
            let dp = maxwell_det(slab.eps_s, &mu_r, kx, ky, *q + h);
            let dm = maxwell_det(slab.eps_s, &mu_r, kx, ky, *q - h);
            let deriv = (dp - dm) / (2.0 * h);
            if deriv.norm() == 0.0 {
                break;
            }
            let step = d0 / deriv;
            if step.norm() > 0.1 * scale {
                break;
            }
            *q -= step;
        }
    }

    // Keep roots that decay into z < 0 (Im q < 0), with the causal tie-break
    // Re q < 0 on the lossless propagating branch.
    let tie = 1e-9 * scale;
    let mut down: Vec<C> = roots
        .iter()
        .copied()
        .filter(|q| q.im < -tie || (q.im.abs() <= tie && q.re < 0.0))
        .collect();
    if down.len() != 2 {
        // Degenerate double roots can merge in the iteration; split clusters.
        if down.len() == 1 && roots.len() == 4 {
            let lone = down[0];
            let mut partners: Vec<C> = roots
                .iter()
                .copied()
                .filter(|q| (*q - lone).norm() < 1e-6 * scale)
                .collect();
            if partners.len() >= 2 {
                down = vec![lone, partners.pop().unwrap()];
            }
        }
        if down.len() != 2 {
            return Err(ReflectionError::RootFinding {
                detail: format!(
                    "expected 2 decaying modes, found {} among {:?}",
                    down.len(),
                    roots
                ),
            });
        }
    }

    let near_degenerate = (down[0] - down[1]).norm() < 1e-8 * scale;
    let residual = down
        .iter()
        .map(|q| maxwell_det(slab.eps_s, &mu_r, kx, ky, *q).norm())
        .fold(0.0f64, f64::max)
        / coeff_scale;

    let build = |q: C| -> [[C; 6]; 6] {
        let mut a = [[C::new(0.0, 0.0); 6]; 6];
        for i in 0..3 {
            a[i][i] = slab.eps_s;
            for j in 0..3 {
                a[3 + i][3 + j] = mu_r[i][j];
            }
        }
        let k = [C::new(kx, 0.0), C::new(ky, 0.0), q];
        let cross = [
            [C::new(0.0, 0.0), -k[2], k[1]],
            [k[2], C::new(0.0, 0.0), -k[0]],
            [-k[1], k[0], C::new(0.0, 0.0)],
        ];
        for i in 0..3 {
            for j in 0..3 {
                a[i][3 + j] = cross[i][j];
                a[3 + i][j] = -cross[i][j];
            }
        }
        a
    };

    // Collect candidate eigenfields from both roots. When the two roots are
    // close (as they are across-bias at large κ, where both modes decay
    // almost identically), each root's numerical nullspace blurs into its
    // neighbour's and can report two directions, or report the neighbour's
    // field as its own. The reflected amplitudes depend only on the span of
    // the two transmitted tangential traces, so the right pair to keep is
    // the one with the largest tangential Gram determinant over all
    // candidates; this also covers exactly degenerate roots, where a single
    // matrix supplies both directions.
    let mut candidates: Vec<(C, [C; 6])> = Vec::new();
    for &q in &down {
        for field in nullspace6(build(q), 1e-6) {
            candidates.push((q, field));
        }
    }
    if candidates.len() < 2 {
        return Err(ReflectionError::RootFinding {
            detail: "dispersion roots yield fewer than two eigenfields".into(),
        });
    }
    let tangential = |f: &[C; 6]| [f[0], f[1], f[3], f[4]];
    let gram = |x: &[C; 4], y: &[C; 4]| -> f64 {
        let nx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let ny: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        let dot: C = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
        nx * ny - dot.norm_sqr()
    };
    let mut best = (0usize, 1usize, -1.0f64);
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let g = gram(&tangential(&candidates[i].1), &tangential(&candidates[j].1));
            if g > best.2 {
                best = (i, j, g);
            }
        }
    }
    let (qa, fa) = candidates[best.0];
    let (qb, fb) = candidates[best.1];
    let modes = [
        SlabMode { k_z: -qa, field: fa },
        SlabMode { k_z: -qb, field: fb },
    ];

    Ok(SlabModeSet { modes, residual, near_degenerate })
}

/// Solve A x = b for several right-hand sides with a 4×4 partial-pivot LU;
/// returns the solutions and the 1-norm condition number estimate.
///
/// The matrix is row/column equilibrated first: boundary-matching systems
/// mix field components whose scales spread as κ² at large κ, which would
/// otherwise masquerade as ill-conditioning. The reported condition number
/// is that of the equilibrated matrix, which is what bounds the solution's
/// relative accuracy.
fn solve4(a: [[C; 4]; 4], rhs: &[[C; 4]]) -> Option<(Vec<[C; 4]>, f64)> {
    let mut a = a;
    let mut row_scale = [1.0f64; 4];
    for (i, row) in a.iter_mut().enumerate() {
        let m = row.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if m == 0.0 {
            return None;
        }
        row_scale[i] = m;
        for z in row.iter_mut() {
            *z /= m;
        }
    }
    let mut col_scale = [1.0f64; 4];
    for j in 0..4 {
        let m = (0..4).map(|i| a[i][j].norm()).fold(0.0f64, f64::max);
        if m == 0.0 {
            return None;
        }
        col_scale[j] = m;
        for row in a.iter_mut() {
            row[j] /= m;
        }
    }
    let norm1 = |m: &[[C; 4]; 4]| -> f64 {
        (0..4)
            .map(|c| (0..4).map(|r| m[r][c].norm()).sum::<f64>())
            .fold(0.0f64, f64::max)
    };
    let a_norm = norm1(&a);
    let mut lu = a;
    let mut perm = [0usize; 4];
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| lu[i][col].norm().total_cmp(&lu[j][col].norm()))
            .unwrap();
        if lu[pivot][col].norm() == 0.0 {
            return None;
        }
        lu.swap(pivot, col);
        perm.swap(pivot, col);
        for row in col + 1..4 {
            let f = lu[row][col] / lu[col][col];
            lu[row][col] = f;
            for j in col + 1..4 {
                lu[row][j] = lu[row][j] - f * lu[col][j];
            }
        }
    }
    // Solves the equilibrated system Ã y = b.
    let lu_solve = |b: &[C; 4]| -> [C; 4] {
        let mut x = [C::new(0.0, 0.0); 4];
        for i in 0..4 {
            x[i] = b[perm[i]];
            for j in 0..i {
                let f = lu[i][j];
                x[i] = x[i] - f * x[j];
            }
        }
        for i in (0..4).rev() {
            for j in i + 1..4 {
                let f = lu[i][j];
                x[i] = x[i] - f * x[j];
            }
            x[i] /= lu[i][i];
        }
        x
    };
    // Columns of Ã⁻¹ give the exact 1-norm of the inverse.
    let mut inv_norm = 0.0f64;
    for c in 0..4 {
        let mut e = [C::new(0.0, 0.0); 4];
        e[c] = C::new(1.0, 0.0);
        let col = lu_solve(&e);
        inv_norm = inv_norm.max(col.iter().map(|z| z.norm()).sum());
    }
    let solutions = rhs
        .iter()
        .map(|b| {
            let mut bs = [C::new(0.0, 0.0); 4];
            for (i, v) in bs.iter_mut().enumerate() {
                *v = b[i] / row_scale[i];
            }
            let mut x = lu_solve(&bs);
            for (xi, c) in x.iter_mut().zip(col_scale) {
                *xi /= c;
            }
            x
        })
        .collect();
    Some((solutions, a_norm * inv_norm))
}

/// Full reflection matrix of the gyrotropic half-space: matches tangential
/// E and H of the incident + reflected vacuum fields to the two transmitted
/// slab eigenmodes.
pub fn fresnel_gyromagnetic(
    omega: f64,
    kappa: f64,
    phi: f64,
    slab: &GyromagneticSlab,
) -> Result<ReflectionMatrix, ReflectionError> {
    if omega < 0.0 {
        let conj_slab = GyromagneticSlab {
            eps_s: slab.eps_s.conj(),
            mu: GyrotropicPermeability {
                mu_perp: slab.mu.mu_perp.conj(),
                mu_g: slab.mu.mu_g.conj(),
                mu_par: slab.mu.mu_par.conj(),
            },
            bias: slab.bias,
        };
        return Ok(fresnel_gyromagnetic(-omega, kappa, phi, &conj_slab)?.conj());
    }
    let modes = slab_modes_gyromagnetic(kappa, phi, slab)?;
    // Only the span of the transmitted tangential fields at z = 0 enters
    // the reflected amplitudes, so the two mode columns may be
    // orthonormalized in the tangential subspace. Near the Voigt geometry
    // (in-plane bias, propagation across it) the raw restrictions become
    // almost parallel and would poison the matching system's conditioning;
    // the orthonormalized basis keeps it benign without changing r.
    let mut fields = [modes.modes[0].field, modes.modes[1].field];
    {
        let tan_dot = |x: &[C; 6], y: &[C; 6]| {
            [0usize, 1, 3, 4]
                .iter()
                .map(|&i| x[i].conj() * y[i])
                .sum::<C>()
        };
        let n1 = tan_dot(&fields[0], &fields[0]).re.sqrt();
        if n1 > 0.0 {
            for z in fields[0].iter_mut() {
                *z /= n1;
            }
            let proj = tan_dot(&fields[0], &fields[1]);
            let f0 = fields[0];
            for (z, b) in fields[1].iter_mut().zip(f0) {
                *z -= proj * b;
            }
            let n2 = tan_dot(&fields[1], &fields[1]).re.sqrt();
            if n2 > 0.0 {
                for z in fields[1].iter_mut() {
                    *z /= n2;
                }
            }
        }
    }
    let p = vacuum_kz(kappa);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let s_hat = [C::new(sin_phi, 0.0), C::new(-cos_phi, 0.0), C::new(0.0, 0.0)];
    let p_up = [-p * cos_phi, -p * sin_phi, C::new(kappa, 0.0)];
    let p_down = [p * cos_phi, p * sin_phi, C::new(kappa, 0.0)];

    // Unknowns (t₁, t₂, x₃, x₄) where x₃ multiplies the reflected basis
    // (E, η₀H) = (ŝ, −p̂₊) and x₄ multiplies (p̂₊, ŝ); rows are the
    // tangential components (E_x, E_y, η₀H_x, η₀H_y).
    let mut a = [[C::new(0.0, 0.0); 4]; 4];
    for (j, field) in fields.iter().enumerate() {
        a[0][j] = field[0];
        a[1][j] = field[1];
        a[2][j] = field[3];
        a[3][j] = field[4];
    }
    a[0][2] = -s_hat[0];
    a[1][2] = -s_hat[1];
    a[2][2] = p_up[0];
    a[3][2] = p_up[1];
    a[0][3] = -p_up[0];
    a[1][3] = -p_up[1];
    a[2][3] = -s_hat[0];
    a[3][3] = -s_hat[1];

    let rhs_s = [s_hat[0], s_hat[1], -p_down[0], -p_down[1]];
    let rhs_p = [p_down[0], p_down[1], s_hat[0], s_hat[1]];
    let (sol, condition) = solve4(a, &[rhs_s, rhs_p]).ok_or(ReflectionError::RootFinding {
        detail: "singular boundary-matching matrix".into(),
    })?;
    if condition > 1e12 {
        return Err(ReflectionError::IllConditioned { condition });
    }
    Ok(ReflectionMatrix {
        r_ss: sol[0][2],
        r_ps: sol[0][3],
        r_sp: sol[1][2],
        r_pp: sol[1][3],
    })
}

/// A shared, thread-safe source of reflection matrices for the weight
/// integrals. Implementations must be pure in (ω, κ, φ).
pub trait ReflectionProvider: Sync {
    fn reflection(&self, omega: f64, kappa: f64, phi: f64)
        -> Result<ReflectionMatrix, ReflectionError>;
    /// True when the matrix does not depend on φ (isotropic media, or bias
    /// along the interface normal), enabling the analytic azimuthal
    /// integrals.
    fn phi_independent(&self) -> bool;
}

/// Free space: no interface, all reflection zero.
pub struct NoInterface;

impl ReflectionProvider for NoInterface {
    fn reflection(&self, _: f64, _: f64, _: f64) -> Result<ReflectionMatrix, ReflectionError> {
        Ok(ReflectionMatrix::zero())
    }
    fn phi_independent(&self) -> bool {
        true
    }
}

/// Local Drude metal half-space.
pub struct LocalMetalMirror {
    pub omega_p: f64,
    pub gamma: f64,
}

impl ReflectionProvider for LocalMetalMirror {
    fn reflection(&self, omega: f64, kappa: f64, _: f64)
        -> Result<ReflectionMatrix, ReflectionError> {
        let eps = drude_permittivity(omega.abs(), self.omega_p, self.gamma);
        let r = fresnel_local(omega.abs(), kappa, eps, C::new(1.0, 0.0));
        Ok(if omega < 0.0 { r.conj() } else { r })
    }
    fn phi_independent(&self) -> bool {
        true
    }
}

/// Non-local metal half-space under the specular-reflection closure.
pub struct NonlocalMetalMirror {
    pub metal: MetalParams,
    pub tol: f64,
    pub budget: usize,
}

impl ReflectionProvider for NonlocalMetalMirror {
    fn reflection(&self, omega: f64, kappa: f64, _: f64)
        -> Result<ReflectionMatrix, ReflectionError> {
        fresnel_nonlocal_scib(omega, kappa, &self.metal, self.tol, self.budget)
    }
    fn phi_independent(&self) -> bool {
        true
    }
}

/// Gyrotropic magnetic half-space; the permeability is rebuilt per ω from
/// the stored resonance parameters.
pub struct GyromagneticMirror {
    pub eps_s: C,
    /// Larmor frequency of the slab bias field (rad/s).
    pub larmor: f64,
    /// μ₀γM_s of the slab (rad/s).
    pub magnetization: f64,
    /// Gilbert damping factor.
    pub damping: f64,
    /// Bias direction in the interface frame.
    pub bias: [f64; 3],
}

impl GyromagneticMirror {
    fn slab_at(&self, omega: f64) -> GyromagneticSlab {
        GyromagneticSlab {
            eps_s: self.eps_s,
            mu: crate::materials::yig_permeability(
                omega,
                self.larmor,
                self.magnetization,
                self.damping,
            ),
            bias: self.bias,
        }
    }
}

/// Beyond this in-plane wavevector the full boundary solve is replaced by
/// its quasi-static asymptote anchored at this κ: the diagonal entries have
/// reached their magnetostatic/electrostatic limits to O(κ⁻²) and the
/// polarization-conversion entries fall as 1/κ. The full solver's two slab
/// modes coalesce numerically well above this point, so the anchor also
/// keeps the matching system comfortably conditioned.
const KAPPA_QUASISTATIC: f64 = 1e4;

impl ReflectionProvider for GyromagneticMirror {
    fn reflection(&self, omega: f64, kappa: f64, phi: f64)
        -> Result<ReflectionMatrix, ReflectionError> {
        if kappa > KAPPA_QUASISTATIC {
            let anchor = self.reflection(omega, KAPPA_QUASISTATIC, phi)?;
            let fall = KAPPA_QUASISTATIC / kappa;
            return Ok(ReflectionMatrix {
                r_ss: anchor.r_ss,
                r_pp: anchor.r_pp,
                r_ps: anchor.r_ps * fall,
                r_sp: anchor.r_sp * fall,
            });
        }
        // yig_permeability already satisfies μ(−ω) = μ*(ω), so the signed
        // slab feeds fresnel_gyromagnetic's own reality convention.
        fresnel_gyromagnetic(omega, kappa, phi, &self.slab_at(omega))
    }
    fn phi_independent(&self) -> bool {
        self.bias[2].abs() > 1.0 - 1e-12
    }
}
