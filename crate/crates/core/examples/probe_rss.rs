//! Scratch probe: gyromagnetic-slab s-reflection at large κ against the
//! magnetostatic half-space value for bias along the interface normal.

use num_complex::Complex64;
use vacuum_friction::fluctuation::provider_from_scenario;
use vacuum_friction::materials::{gilbert_damping, yig_permeability};
use vacuum_friction::scenario::MU0;
use vacuum_friction::scenario::parse_scenario;

const TWO_PI: f64 = std::f64::consts::TAU;

fn main() {
    let doc = "sphere.material = yig\n\
               sphere.radius_nm = 200\n\
               sphere.rotation_ghz = 1\n\
               sphere.t1_k = 300\n\
               sphere.bias_oe = 0\n\
               interface.kind = gyromagnetic\n\
               interface.orientation = xz_plane\n\
               interface.distance_nm = 500\n\
               interface.bias_oe = 812\n\
               interface.bias_axis = y\n\
               environment.t0_k = 300\n\
               numerics.tol = 1e-6\n";
    let scenario = parse_scenario(doc).expect("parse");
    let provider = provider_from_scenario(&scenario);

    let gamma = scenario.yig.gyro_ratio;
    let larmor = MU0 * gamma * scenario.slab_bias_a_per_m;
    let omega_m = MU0 * gamma * scenario.yig.ms_a_per_m;
    let alpha = gilbert_damping(scenario.yig.dh_a_per_m, gamma, larmor);
    println!(
        "# slab larmor {:.4} GHz, omega_m {:.4} GHz, alpha {:.4}",
        larmor / (TWO_PI * 1e9),
        omega_m / (TWO_PI * 1e9),
        alpha
    );

    for fghz in [2.5, 3.0, 3.3, 3.8, 4.3] {
        let omega = fghz * TWO_PI * 1e9;
        let mu = yig_permeability(omega, larmor, omega_m, alpha);
        let ratio = mu.mu_perp / MU0;
        let n = ratio.sqrt();
        let n = if n.re < 0.0 { -n } else { n };
        let r_ms = (n - 1.0) / (n + 1.0);
        println!(
            "\n# f = {fghz} GHz  mu_perp/mu0 = {:.4}+{:.4}i   r_ms = {:.4}+{:.4}i",
            ratio.re, ratio.im, r_ms.re, r_ms.im
        );
        let k0 = omega / 299_792_458.0;
        for mult in [5.0, 50.0, 500.0, 5e3, 5e4] {
            let kappa = mult * k0;
            match provider.reflection(omega, kappa, 0.0) {
                Ok(m) => {
                    let rss: Complex64 = m.r_ss;
                    let rpp: Complex64 = m.r_pp;
                    println!(
                        "kappa/k0 = {mult:9.1}  r_ss = {:+.5} {:+.5}i   r_pp = {:+.5} {:+.5}i",
                        rss.re, rss.im, rpp.re, rpp.im
                    );
                }
                Err(e) => println!("kappa/k0 = {mult:9.1}  ERR {e}"),
            }
        }
    }
}
