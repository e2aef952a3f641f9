//! Scratch probe: damping-reference sensitivity for the garnet flagship.

use vacuum_friction::fluctuation::SpectralContext;
use vacuum_friction::scenario::parse_scenario;

fn doc(sphere: &str, interface: &str, distance_nm: f64, extra: &str) -> String {
    format!(
        "sphere.material = {sphere}\n\
         sphere.radius_nm = 200\n\
         sphere.rotation_ghz = 1\n\
         sphere.t1_k = 300\n\
         sphere.bias_oe = 0\n\
         interface.kind = {interface}\n\
         interface.orientation = xz_plane\n\
         interface.distance_nm = {distance_nm}\n\
         interface.bias_oe = 812\n\
         interface.bias_axis = y\n\
         environment.t0_k = 300\n\
         numerics.tol = 1e-6\n{extra}"
    )
}

fn power(sphere: &str, interface: &str, distance_nm: f64, extra: &str) -> f64 {
    let s = parse_scenario(&doc(sphere, interface, distance_nm, extra)).expect("parse");
    let ctx = SpectralContext::new(&s).expect("ctx");
    ctx.radiated_power().expect("power")
}

fn main() {
    println!("YIG/YIG d=500nm : {:.4e} W", power("yig", "gyromagnetic", 500.0, ""));
    println!("YIG/YIG d=700nm : {:.4e} W", power("yig", "gyromagnetic", 700.0, ""));
}
