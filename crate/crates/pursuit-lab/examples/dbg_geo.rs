use pursuit_lab::domain::catalog_domain;
use pursuit_lab::geodesy::*;
use pursuit_lab::Point;

fn main() {
    let d = catalog_domain("eroded_cube").unwrap();
    let a = Point::of3(0.0, 0.1, 0.0);
    let b = Point::of3(0.0, -0.1, 0.0);
    let params = GeodesyParams::default();
    let h = params.clearance(&d);
    println!("clearance h = {h:e}");
    // Manual seed over the top.
    let w = Point::of3(0.0, 0.0, 0.865);
    let seed = Path::new(vec![a, w, b], false).unwrap().resample(9).unwrap();
    let res = shorten_core(&d, &seed, &params, None).unwrap();
    println!(
        "over-top seed: len={} conv={} cert={} iters={} resid={:e}",
        res.length, res.converged, res.interior_certified, res.iterations, res.residual
    );
    let n = res.path.verts().len();
    println!("verts: {n}");
    for (i, v) in res.path.verts().iter().enumerate() {
        if i % (n / 12).max(1) == 0 {
            println!("  v[{i}] = {:?} phi={:e}", v, d.phi(v));
        }
    }
    // Chord seed.
    let chord = Path::new(vec![a, b], false).unwrap().resample(9).unwrap();
    let res = shorten_core(&d, &chord, &params, None).unwrap();
    println!(
        "chord seed: len={} conv={} cert={} iters={} resid={:e}",
        res.length, res.converged, res.interior_certified, res.iterations, res.residual
    );
}
