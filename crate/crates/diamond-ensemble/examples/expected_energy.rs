//! Expected logarithmic energy: the A/B/C breakdown, the symmetric-layout
//! formula, and a sampled configuration side by side.
//!
//! ```bash
//! cargo run --example expected_energy
//! ```

use diamond_ensemble::energy::{
    expected_energy_general, expected_energy_symmetric, log_energy, riesz_energy,
};
use diamond_ensemble::{ParallelLayout, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let layout = ParallelLayout::from_profile(&Profile::elaborated(2)?)?;
    let breakdown = expected_energy_general(&layout);
    println!("elaborated m=2 (N = {}):", breakdown.n_points);
    println!("  pole terms      A = {:+.9}", breakdown.pole_terms);
    println!("  intra-parallel  B = {:+.9}", breakdown.intra_parallel);
    println!("  cross-parallel  C = {:+.9}", breakdown.cross_parallel);
    println!("  expected total    = {:+.9}", breakdown.total);

    let symmetric = expected_energy_symmetric(&layout)?;
    println!(
        "  symmetric form    = {:+.9}   (difference {:.2e})",
        symmetric,
        (breakdown.total - symmetric).abs()
    );

    let sampled = log_energy(layout.sample(7).points())?;
    println!(
        "  one realization   = {:+.9}   (deviation {:+.4e})",
        sampled,
        sampled - breakdown.total
    );

    // direct kernels also cover Riesz energies of arbitrary clouds
    let square: Vec<[f64; 3]> = (0..4)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 4.0;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    println!(
        "\nsquare on the equator: riesz(s=2) = {} (exactly 5 by hand)",
        riesz_energy(&square, 2.0)?
    );
    Ok(())
}
