//! Scratch probe: where does the garnet-over-garnet emission actually sit?

use vacuum_friction::fluctuation::{provider_from_scenario, SpectralContext};
use vacuum_friction::greens::greens_weights;
use vacuum_friction::materials::Channel;
use vacuum_friction::materials::barnett_larmor;
use vacuum_friction::scenario::parse_scenario;

const TWO_PI: f64 = std::f64::consts::TAU;

fn scenario_doc(interface: &str) -> String {
    format!(
        "sphere.material = yig\n\
         sphere.radius_nm = 200\n\
         sphere.rotation_ghz = 1\n\
         sphere.t1_k = 300\n\
         sphere.bias_oe = 0\n\
         interface.kind = {interface}\n\
         interface.orientation = xz_plane\n\
         interface.distance_nm = 500\n\
         interface.bias_oe = 812\n\
         interface.bias_axis = y\n\
         environment.t0_k = 300\n\
         numerics.tol = 1e-6\n"
    )
}

fn main() {
    let scenario = parse_scenario(&scenario_doc("gyromagnetic")).expect("parse");
    let ctx = SpectralContext::new(&scenario).expect("context");

    let ghz = TWO_PI * 1e9;
    let larmor = barnett_larmor(
        scenario.rotation_rate_rad_s,
        scenario.sphere_bias_a_per_m,
        scenario.yig.gyro_ratio,
    );
    println!("# sphere larmor / slab features");
    println!("sphere omega0 = {:.4} GHz*2pi", larmor / ghz);

    println!("\n# photon-rate spectrum (omega/2pi GHz, gamma_rad(+w), gamma_rad(-w), rate_density)");
    let mut probe: Vec<f64> = Vec::new();
    let mut f = 0.05f64;
    while f < 8.0 {
        probe.push(f * ghz);
        f += 0.05;
    }
    let samples = ctx.spectrum_at(&probe).expect("spectrum");
    for s in &samples {
        println!(
            "{:8.3}  {:+.6e}  {:+.6e}",
            s.omega / ghz,
            s.gamma_rad,
            s.photon_rate_density
        );
    }

    // cumulative power by trapezoid over the probe band
    let mut acc = 0.0;
    for w in samples.windows(2) {
        let f0 = w[0].omega * w[0].gamma_rad;
        let f1 = w[1].omega * w[1].gamma_rad;
        acc += 0.5 * (f1 + f0) * (w[1].omega - w[0].omega);
    }
    println!("# band trapezoid power ~ {:.4e} W (hbar folded)", acc * 1.054571817e-34);

    let p = ctx.radiated_power().expect("power");
    println!("# adaptive radiated power = {:.4e} W", p);

    // weight spectrum at a few frequencies around the magnon band
    println!("\n# slab weights vs omega (g_perp1, g_perp2, g_par, g_g1, g_g2) at d=500nm");
    let ctx_provider = provider_from_scenario(&scenario);
    for fghz in [0.5, 1.0, 1.5, 2.0, 2.2756, 2.5, 2.9, 3.2756, 3.6, 4.07, 4.2756, 4.5, 4.77, 5.2, 6.0] {
        let omega = fghz * ghz;
        match greens_weights(
            omega,
            500e-9,
            scenario.interface_orientation,
            ctx_provider.as_ref(),
            Channel::Magnetic,
            1e-6,
            1_000_000,
        ) {
            Ok(w) => println!(
                "{:7.4}  {:+.5e} {:+.5e} {:+.5e} {:+.5e} {:+.5e}",
                fghz, w.g_perp1, w.g_perp2, w.g_par, w.g_g1, w.g_g2
            ),
            Err(e) => println!("{fghz:7.4}  ERR {e}"),
        }
    }

    // metal comparison
    let scen_metal = parse_scenario(&scenario_doc("metal_local")).expect("parse metal");
    let ctx_m = SpectralContext::new(&scen_metal).expect("metal ctx");
    println!("\n# metal-local mirror power = {:.4e} W", ctx_m.radiated_power().expect("metal power"));
}
