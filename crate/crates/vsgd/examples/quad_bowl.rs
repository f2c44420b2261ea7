//! Trajectories in a 2-d noisy quadratic bowl with a 10x curvature ratio:
//! fixed rates oscillate at a noise-dependent depth, a cooling schedule
//! freezes early, vSGD keeps approaching the optimum.

use vsgd::harness::{quad_demo, QuadDemoData, QuadDemoKind};

fn main() {
    let out = "quad_bowl.csv";
    let data = quad_demo(QuadDemoKind::Bowl, out).expect("demo is self-contained");
    let QuadDemoData::Bowl { tracks } = &data else {
        unreachable!("bowl emits trajectories");
    };
    println!("{:<14} {:>14} {:>16}", "algorithm", "final loss", "dist to optimum");
    for track in tracks {
        let (x, y) = *track.path.last().unwrap();
        println!(
            "{:<14} {:>14.4} {:>16.4}",
            track.name,
            track.loss.last().unwrap(),
            (x * x + y * y).sqrt()
        );
    }
    println!("trajectories written to {out}");
}
