//! Generate a point set and export it.
//!
//! Builds the quasioptimal profile at scale m=2 (N = 958), samples a
//! realization with a fixed seed, and writes `points.csv` plus the
//! `points.json` provenance sidecar into a temporary directory.
//!
//! ```bash
//! cargo run --example generate_points
//! ```

use diamond_ensemble::{ParallelLayout, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = Profile::quasioptimal(2)?;
    let layout = ParallelLayout::from_profile(&profile)?;
    println!(
        "profile quasioptimal:m=2  ->  N = {} points on p = {} parallels",
        layout.n_points(),
        layout.parallel_count()
    );

    let points = layout.sample(42);
    println!("seed 42, first phase = {:.6} rad", points.phases()[0]);

    let dir = std::env::temp_dir().join("diamond-example");
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("points.csv");
    let mut csv = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    points.write_csv(&mut csv)?;

    let sidecar_path = dir.join("points.json");
    std::fs::write(&sidecar_path, serde_json::to_string_pretty(&points.sidecar())?)?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", sidecar_path.display());

    // a few rows for a quick look
    for (i, pt) in points.points().iter().take(4).enumerate() {
        println!("  point {i}: [{:+.6}, {:+.6}, {:+.6}]", pt[0], pt[1], pt[2]);
    }
    Ok(())
}
