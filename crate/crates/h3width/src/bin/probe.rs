use h3width::geom::Isometry;
use h3width::manifold::DeckBall;
use nalgebra::Vector3;
use std::f64::consts::PI;

fn main() {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw = [
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ];
    let mut dirs: Vec<Vector3<f64>> = raw.iter().map(|v| v.normalize()).collect();
    for i in 0..6 {
        let d = dirs[i];
        dirs.push(-d);
    }
    let r = ((1.0 + 2.0 * 5.0f64.sqrt()) / 4.0f64).sqrt().asinh();
    let twist = 3.0 * PI / 5.0;
    let gens: Vec<Isometry> = dirs
        .iter()
        .map(|u| {
            Isometry::axis_rotation(u, twist)
                .compose(&Isometry::axis_translation(u, 2.0 * r))
                .renormalized()
        })
        .collect();
    for keep in [3.2f64, 4.0, 4.6, 5.2] {
        let t0 = std::time::Instant::now();
        let ball = DeckBall::generate(&gens, keep, 1.2265).unwrap();
        println!("keep {keep}: {} elements in {:.2?}", ball.len(), t0.elapsed());
    }
}
