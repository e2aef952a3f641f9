//! Experiment description, physical constants, unit conversions, and thermal
//! occupation factors.
//!
//! Everything downstream consumes a [`Scenario`]: an immutable, fully
//! validated record of the sphere, the interface, the environment, and the
//! numerical settings. Magnetic fields enter configuration files in Oersted
//! and pressures in Torr, because that is how the experimental literature
//! quotes them; both are converted to SI exactly once, here, and every other
//! module works in SI only.
//!
//! Scenario files are flat `section.key = value` text with `#` comments:
//!
//! ```text
//! sphere.material   = yig
//! interface.kind    = gyromagnetic
//! interface.bias_oe = 812
//! environment.t0_k  = 300
//! numerics.tol      = 1e-6
//! ```

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const KB: f64 = 1.380_649e-23;
/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability, H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;

/// Oe → A/m: 1 Oe = 10³/(4π) A/m.
pub const OE_TO_A_PER_M: f64 = 1e3 / (4.0 * std::f64::consts::PI);
/// Torr → Pa.
pub const TORR_TO_PA: f64 = 133.322;

/// Convert a magnetic field from Oersted to A/m.
pub fn oersted_to_a_per_m(h_oe: f64) -> f64 {
    h_oe * OE_TO_A_PER_M
}

/// Convert a magnetic field from A/m back to Oersted.
pub fn a_per_m_to_oersted(h: f64) -> f64 {
    h / OE_TO_A_PER_M
}

/// Convert a pressure from Torr to Pascal.
pub fn torr_to_pascal(p_torr: f64) -> f64 {
    p_torr * TORR_TO_PA
}

/// Convert a pressure from Pascal back to Torr.
pub fn pascal_to_torr(p: f64) -> f64 {
    p / TORR_TO_PA
}

/// What the sphere is made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereMaterial {
    Yig,
    Metal,
}

/// Response model of the half-space below the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceKind {
    /// Free space; all reflection coefficients vanish.
    None,
    /// Local Drude metal.
    MetalLocal,
    /// Non-local metal with specular electron reflection.
    MetalNonlocal,
    /// Magnetically biased gyrotropic half-space.
    Gyromagnetic,
}

/// Which lab plane the interface occupies. The rotation axis is always z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceOrientation {
    /// Interface normal along z (below the sphere).
    XyPlane,
    /// Interface normal along y (beside the sphere).
    XzPlane,
}

/// Lab axis of the slab bias field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasAxis {
    X,
    Y,
    Z,
}

/// Ferrite (YIG) material parameters, SI after parsing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YigParams {
    /// Saturation magnetization M_s, A/m.
    pub ms_a_per_m: f64,
    /// Resonance linewidth ΔH, A/m.
    pub dh_a_per_m: f64,
    /// Gyromagnetic ratio, rad s⁻¹ T⁻¹.
    pub gyro_ratio: f64,
    /// Relative permittivity for the electric channel; no default — must be
    /// configured explicitly when that channel is enabled.
    pub eps_rel: Option<f64>,
}

/// Drude metal parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetalParams {
    /// Plasma frequency ω_p, rad/s.
    pub omega_p: f64,
    /// Collision rate Γ, rad/s.
    pub gamma: f64,
    /// Fermi velocity, m/s (non-local model only).
    pub v_fermi: f64,
}

/// Settings for the laboratory-observable computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableParams {
    /// Dimensionless constant in the free-molecular drag torque.
    pub drag_coefficient: f64,
    /// Pressure at which the laser drive torque is calibrated, Pa.
    pub reference_pressure_pa: f64,
    /// Search window above the lab temperature for the steady-state sphere
    /// temperature; exceeding it is reported as thermal runaway.
    pub max_temperature_rise_k: f64,
}

/// Numerical controls shared by all integrals and sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    /// Relative tolerance for every adaptive integral.
    pub rel_tol: f64,
    /// Evaluation budget per integral.
    pub max_evals: usize,
    /// Default number of frequency-grid points for spectra.
    pub omega_points: usize,
}

/// Complete, validated description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sphere_material: SphereMaterial,
    /// Sphere radius a, m.
    pub sphere_radius_m: f64,
    /// Rotation rate Ω about z, rad/s.
    pub rotation_rate_rad_s: f64,
    /// Sphere temperature T₁, K.
    pub sphere_temperature_k: f64,
    /// Environment (field) temperature T₀, K.
    pub environment_temperature_k: f64,
    pub interface_kind: InterfaceKind,
    pub interface_orientation: InterfaceOrientation,
    /// Gap d from sphere center to the interface, m.
    pub distance_m: f64,
    /// Slab bias field magnitude, A/m.
    pub slab_bias_a_per_m: f64,
    pub slab_bias_axis: BiasAxis,
    /// Sphere bias field along z, A/m.
    pub sphere_bias_a_per_m: f64,
    /// Sphere mass density, kg/m³.
    pub sphere_density_kg_m3: f64,
    /// Whether electric-dipole fluctuations are included alongside the
    /// magnetic channel.
    pub electric_channel: bool,
    /// Residual gas pressure, Pa.
    pub gas_pressure_pa: f64,
    /// Mean molecular mass of the residual gas, kg.
    pub gas_molecular_mass_kg: f64,
    pub yig: YigParams,
    pub metal: MetalParams,
    pub observables: ObservableParams,
    pub numerics: Numerics,
    /// Canonical key/value form the scenario was built from, defaults
    /// included; `render` reproduces it verbatim.
    raw: BTreeMap<String, String>,
}

impl Scenario {
    /// Canonical text form; feeding it back to [`parse_scenario`] yields an
    /// identical scenario.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.raw {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// Copy of this scenario with the sphere temperature replaced, keeping
    /// the canonical text form in sync. Used by steady-state solvers that
    /// sweep T₁ while everything else stays fixed.
    pub fn with_sphere_temperature(&self, t1_k: f64) -> Self {
        let mut out = self.clone();
        out.sphere_temperature_k = t1_k;
        out.raw.insert("sphere.t1_k".into(), format!("{t1_k}"));
        out
    }
}

/// Errors from scenario parsing, validation, and occupation evaluation.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line_no}: expected `section.key = value`, got `{content}`")]
    Syntax { line_no: usize, content: String },
    #[error("missing required section `{0}` (no `{0}.*` keys present)")]
    MissingSection(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    BadValue { key: String, value: String, expected: &'static str },
    #[error("key `{key}`: {detail}")]
    OutOfRange { key: String, detail: String },
    #[error("thermal occupation has a pole at ω = 0; use the ω·n(ω) limit k_BT/ħ instead")]
    OccupationPole,
}

/// All recognized keys with their default value text (None = required or
/// conditionally defaulted).
const KEY_TABLE: &[(&str, Option<&str>)] = &[
    ("sphere.material", None),
    ("sphere.radius_nm", Some("200")),
    ("sphere.rotation_ghz", Some("1")),
    ("sphere.t1_k", Some("300")),
    // The sphere is magnetized by rotation alone unless a field is applied;
    // only the slab carries the 812 Oe reference bias by default.
    ("sphere.bias_oe", Some("0")),
    ("sphere.density_kg_m3", None), // default depends on sphere.material
    ("sphere.electric_channel", Some("off")),
    ("interface.kind", None),
    ("interface.orientation", Some("xz_plane")),
    ("interface.distance_nm", Some("500")),
    ("interface.bias_oe", Some("812")),
    ("interface.bias_axis", Some("y")),
    ("environment.t0_k", Some("300")),
    ("environment.pressure_torr", Some("0")),
    ("environment.gas_mass_amu", Some("28.966")),
    ("numerics.tol", Some("1e-6")),
    ("numerics.max_evals", Some("1000000")),
    ("numerics.omega_points", Some("200")),
    ("yig.ms_oe", Some("1780")),
    ("yig.dh_oe", Some("45")),
    ("yig.gyro_ratio", Some("1.760859e11")),
    ("yig.eps_rel", None), // optional, no default
    ("metal.omega_p", Some("2.24e16")),
    ("metal.gamma", Some("1.22e14")),
    ("metal.v_fermi", Some("2.03e6")),
    ("observables.drag_coefficient", Some("1.497")),
    ("observables.reference_pressure_torr", Some("1e-4")),
    ("observables.max_temperature_rise_k", Some("2000")),
];

const REQUIRED_SECTIONS: &[&str] = &["sphere", "interface", "environment", "numerics"];

/// Default sphere densities, kg/m³ (ferrite and aluminum).
const DENSITY_YIG: f64 = 5110.0;
const DENSITY_AL: f64 = 2700.0;

fn get_f64(map: &BTreeMap<String, String>, key: &str) -> Result<f64, ScenarioError> {
    let v = map.get(key).ok_or_else(|| ScenarioError::MissingKey(key.into()))?;
    v.parse::<f64>().map_err(|_| ScenarioError::BadValue {
        key: key.into(),
        value: v.clone(),
        expected: "a number",
    })
}

fn get_usize(map: &BTreeMap<String, String>, key: &str) -> Result<usize, ScenarioError> {
    let v = map.get(key).ok_or_else(|| ScenarioError::MissingKey(key.into()))?;
    v.parse::<usize>().map_err(|_| ScenarioError::BadValue {
        key: key.into(),
        value: v.clone(),
        expected: "a non-negative integer",
    })
}

fn get_bool(map: &BTreeMap<String, String>, key: &str) -> Result<bool, ScenarioError> {
    let v = map.get(key).ok_or_else(|| ScenarioError::MissingKey(key.into()))?;
    match v.as_str() {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(ScenarioError::BadValue {
            key: key.into(),
            value: v.clone(),
            expected: "on|off",
        }),
    }
}

fn require_positive(key: &str, x: f64) -> Result<f64, ScenarioError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ScenarioError::OutOfRange { key: key.into(), detail: format!("must be > 0, got {x}") })
    }
}

fn require_non_negative(key: &str, x: f64) -> Result<f64, ScenarioError> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ScenarioError::OutOfRange { key: key.into(), detail: format!("must be ≥ 0, got {x}") })
    }
}

/// Parse a scenario document, apply defaults, convert units, and validate.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Syntax {
            line_no: idx + 1,
            content: raw_line.trim().to_string(),
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if !key.contains('.') || value.is_empty() {
            return Err(ScenarioError::Syntax {
                line_no: idx + 1,
                content: raw_line.trim().to_string(),
            });
        }
        if !KEY_TABLE.iter().any(|(k, _)| *k == key) {
            return Err(ScenarioError::UnknownKey(key));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(ScenarioError::DuplicateKey(key));
        }
    }

    for section in REQUIRED_SECTIONS {
        if !map.keys().any(|k| k.starts_with(&format!("{section}."))) {
            return Err(ScenarioError::MissingSection(section.to_string()));
        }
    }
    for (key, default) in KEY_TABLE {
        if !map.contains_key(*key) {
            if let Some(d) = default {
                map.insert(key.to_string(), d.to_string());
            }
        }
    }

    let material_tok =
        map.get("sphere.material").ok_or_else(|| ScenarioError::MissingKey("sphere.material".into()))?;
    let sphere_material = match material_tok.as_str() {
        "yig" => SphereMaterial::Yig,
        "metal" => SphereMaterial::Metal,
        _ => {
            return Err(ScenarioError::BadValue {
                key: "sphere.material".into(),
                value: material_tok.clone(),
                expected: "yig|metal",
            })
        }
    };
    if !map.contains_key("sphere.density_kg_m3") {
        let d = match sphere_material {
            SphereMaterial::Yig => DENSITY_YIG,
            SphereMaterial::Metal => DENSITY_AL,
        };
        map.insert("sphere.density_kg_m3".into(), format!("{d}"));
    }

    let kind_tok =
        map.get("interface.kind").ok_or_else(|| ScenarioError::MissingKey("interface.kind".into()))?;
    let interface_kind = match kind_tok.as_str() {
        "none" => InterfaceKind::None,
        "metal_local" => InterfaceKind::MetalLocal,
        "metal_nonlocal" => InterfaceKind::MetalNonlocal,
        "gyromagnetic" => InterfaceKind::Gyromagnetic,
        _ => {
            return Err(ScenarioError::BadValue {
                key: "interface.kind".into(),
                value: kind_tok.clone(),
                expected: "none|metal_local|metal_nonlocal|gyromagnetic",
            })
        }
    };
    let orient_tok = map.get("interface.orientation").unwrap();
    let interface_orientation = match orient_tok.as_str() {
        "xy_plane" => InterfaceOrientation::XyPlane,
        "xz_plane" => InterfaceOrientation::XzPlane,
        _ => {
            return Err(ScenarioError::BadValue {
                key: "interface.orientation".into(),
                value: orient_tok.clone(),
                expected: "xy_plane|xz_plane",
            })
        }
    };
    let axis_tok = map.get("interface.bias_axis").unwrap();
    let slab_bias_axis = match axis_tok.as_str() {
        "x" => BiasAxis::X,
        "y" => BiasAxis::Y,
        "z" => BiasAxis::Z,
        _ => {
            return Err(ScenarioError::BadValue {
                key: "interface.bias_axis".into(),
                value: axis_tok.clone(),
                expected: "x|y|z",
            })
        }
    };

    let sphere_radius_m = require_positive("sphere.radius_nm", get_f64(&map, "sphere.radius_nm")?)? * 1e-9;
    let rotation_rate_rad_s =
        require_non_negative("sphere.rotation_ghz", get_f64(&map, "sphere.rotation_ghz")?)?
            * 2.0
            * std::f64::consts::PI
            * 1e9;
    let sphere_temperature_k = require_non_negative("sphere.t1_k", get_f64(&map, "sphere.t1_k")?)?;
    let environment_temperature_k =
        require_non_negative("environment.t0_k", get_f64(&map, "environment.t0_k")?)?;
    let distance_m =
        require_positive("interface.distance_nm", get_f64(&map, "interface.distance_nm")?)? * 1e-9;
    if interface_kind != InterfaceKind::None && distance_m <= sphere_radius_m {
        return Err(ScenarioError::OutOfRange {
            key: "interface.distance_nm".into(),
            detail: format!(
                "gap {distance_m:.3e} m must exceed the sphere radius {sphere_radius_m:.3e} m \
                 for the point-dipole description"
            ),
        });
    }
    let slab_bias_a_per_m =
        oersted_to_a_per_m(require_non_negative("interface.bias_oe", get_f64(&map, "interface.bias_oe")?)?);
    let sphere_bias_a_per_m =
        oersted_to_a_per_m(require_non_negative("sphere.bias_oe", get_f64(&map, "sphere.bias_oe")?)?);
    let sphere_density_kg_m3 =
        require_positive("sphere.density_kg_m3", get_f64(&map, "sphere.density_kg_m3")?)?;
    let electric_channel = get_bool(&map, "sphere.electric_channel")?;
    let gas_pressure_pa =
        torr_to_pascal(require_non_negative("environment.pressure_torr", get_f64(&map, "environment.pressure_torr")?)?);
    let gas_molecular_mass_kg =
        require_positive("environment.gas_mass_amu", get_f64(&map, "environment.gas_mass_amu")?)? * AMU;

    let yig = YigParams {
        ms_a_per_m: oersted_to_a_per_m(require_positive("yig.ms_oe", get_f64(&map, "yig.ms_oe")?)?),
        dh_a_per_m: oersted_to_a_per_m(require_non_negative("yig.dh_oe", get_f64(&map, "yig.dh_oe")?)?),
        gyro_ratio: require_positive("yig.gyro_ratio", get_f64(&map, "yig.gyro_ratio")?)?,
        eps_rel: match map.get("yig.eps_rel") {
            Some(_) => Some(require_positive("yig.eps_rel", get_f64(&map, "yig.eps_rel")?)?),
            None => None,
        },
    };
    if electric_channel && sphere_material == SphereMaterial::Yig && yig.eps_rel.is_none() {
        return Err(ScenarioError::MissingKey(
            "yig.eps_rel (required when sphere.electric_channel = on)".into(),
        ));
    }
    let metal = MetalParams {
        omega_p: require_positive("metal.omega_p", get_f64(&map, "metal.omega_p")?)?,
        gamma: require_positive("metal.gamma", get_f64(&map, "metal.gamma")?)?,
        v_fermi: require_positive("metal.v_fermi", get_f64(&map, "metal.v_fermi")?)?,
    };
    let observables = ObservableParams {
        drag_coefficient: require_positive(
            "observables.drag_coefficient",
            get_f64(&map, "observables.drag_coefficient")?,
        )?,
        reference_pressure_pa: torr_to_pascal(require_non_negative(
            "observables.reference_pressure_torr",
            get_f64(&map, "observables.reference_pressure_torr")?,
        )?),
        max_temperature_rise_k: require_positive(
            "observables.max_temperature_rise_k",
            get_f64(&map, "observables.max_temperature_rise_k")?,
        )?,
    };
    let numerics = Numerics {
        rel_tol: require_positive("numerics.tol", get_f64(&map, "numerics.tol")?)?,
        max_evals: get_usize(&map, "numerics.max_evals")?.max(1000),
        omega_points: get_usize(&map, "numerics.omega_points")?.max(2),
    };

    Ok(Scenario {
        sphere_material,
        sphere_radius_m,
        rotation_rate_rad_s,
        sphere_temperature_k,
        environment_temperature_k,
        interface_kind,
        interface_orientation,
        distance_m,
        slab_bias_a_per_m,
        slab_bias_axis,
        sphere_bias_a_per_m,
        sphere_density_kg_m3,
        electric_channel,
        gas_pressure_pa,
        gas_molecular_mass_kg,
        yig,
        metal,
        observables,
        numerics,
        raw: map,
    })
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Bose–Einstein occupation n(ω, T) for signed frequency.
///
/// For ω < 0 this is the analytic continuation −1 − n(|ω|, T); at T = 0 it
/// collapses to 0 (ω > 0) or −1 (ω < 0). ω = 0 is a genuine pole: callers
/// that need ω·n(ω) at the origin should use [`omega_times_occupation`].
pub fn thermal_occupation(omega: f64, t: f64) -> Result<f64, ScenarioError> {
    if omega == 0.0 {
        return Err(ScenarioError::OccupationPole);
    }
    let w = omega.abs();
    let n = if t == 0.0 {
        0.0
    } else {
        let x = HBAR * w / (KB * t);
        1.0 / x.exp_m1()
    };
    Ok(if omega > 0.0 { n } else { -1.0 - n })
}

/// The finite product ω·n(ω, T), with its analytic value k_BT/ħ at ω = 0.
///
/// The product is continuous through the origin from both sides, which is
/// what makes the radiated-power and torque integrands finite there.
pub fn omega_times_occupation(omega: f64, t: f64) -> f64 {
    if omega == 0.0 {
        return KB * t / HBAR;
    }
    match thermal_occupation(omega, t) {
        Ok(n) => omega * n,
        Err(_) => unreachable!("pole handled above"),
    }
}
