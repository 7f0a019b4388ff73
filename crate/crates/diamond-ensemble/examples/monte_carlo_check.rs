//! Validate the closed-form expectations statistically: sample many seeded
//! realizations and compare the mean energy against the formula via a
//! z-score.
//!
//! ```bash
//! cargo run --release --example monte_carlo_check
//! ```

use diamond_ensemble::monte_carlo::mc_expected_energy;
use diamond_ensemble::{ParallelLayout, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases: Vec<(&str, ParallelLayout, u64)> = vec![
        ("counts [2,2]", ParallelLayout::from_counts(&[2, 2])?, 5000),
        (
            "quasioptimal m=1",
            ParallelLayout::from_profile(&Profile::quasioptimal(1)?)?,
            2000,
        ),
        (
            "quasioptimal m=2",
            ParallelLayout::from_profile(&Profile::quasioptimal(2)?)?,
            1000,
        ),
    ];

    for (name, layout, trials) in cases {
        let report = mc_expected_energy(&layout, trials, 20240)?;
        println!(
            "{name:<18} N = {:>4}  trials = {:>4}  mean = {:+.6}  closed form = {:+.6}  z = {:+.3}",
            layout.n_points(),
            report.trials,
            report.mean_energy,
            report.closed_form,
            report.z_score
        );
        assert!(report.z_score.abs() <= 4.0, "statistical mismatch");
    }
    println!("all z-scores within +-4");
    Ok(())
}
