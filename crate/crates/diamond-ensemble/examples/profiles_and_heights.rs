//! Inspect profiles: per-parallel counts against the continuous reference
//! curve, optimal heights, and the growth-assumption lint.
//!
//! ```bash
//! cargo run --example profiles_and_heights
//! ```

use diamond_ensemble::profile::heuristic_r;
use diamond_ensemble::{ParallelLayout, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = Profile::quasioptimal(2)?;
    let p = profile.parallel_count();
    let k0 = 3.0 / std::f64::consts::PI;

    println!("quasioptimal m=2: integer counts r(j) vs the reference curve");
    for j in [1, 4, 7, 10, 14, 20, 27].iter().copied().filter(|&j| j <= p) {
        println!(
            "  j = {j:>2}: r = {:>3}   curve = {:7.2}",
            profile.eval_r(j)?,
            heuristic_r(k0, p, j)
        );
    }

    let layout = ParallelLayout::from_profile(&profile)?;
    println!("\noptimal heights (exact rationals over N-1 = {}):", layout.n_points() - 1);
    for j in [0usize, 1, 12, 13, 14, 25, 26] {
        match layout.height_numerator(j) {
            Some(u) => println!(
                "  z_{:<2} = 1 - {u}/{}  = {:+.9}",
                j + 1,
                layout.n_points() - 1,
                layout.z(j)
            ),
            None => println!("  z_{:<2} = {:+.9}", j + 1, layout.z(j)),
        }
    }

    let lint = profile.asymptotic_lint();
    println!("\ngrowth lint: smallest admissible A = {}, largest first-knot fraction c = {:.4}", lint.min_a, lint.max_c);

    println!("\nserialized profile document:");
    println!("{}", serde_json::to_string(&profile)?);
    Ok(())
}
