//! Euler–Maclaurin accounting: the trapezoid rewrite is exact, the
//! continuum estimate converges, and every piece's remainder stays under
//! the third-derivative bound.
//!
//! ```bash
//! cargo run --release --example euler_maclaurin
//! ```

use diamond_ensemble::asymptotics::{
    continuum_estimate, em_error_check, expected_energy_trapezoid, extract_constant,
    EmIntegrand, C_QUASIOPTIMAL,
};
use diamond_ensemble::energy::expected_energy_symmetric;
use diamond_ensemble::{ParallelLayout, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = Profile::quasioptimal(4)?;
    let layout = ParallelLayout::from_profile(&profile)?;
    let exact = expected_energy_symmetric(&layout)?;
    let trap = expected_energy_trapezoid(&profile)?;
    println!("quasioptimal m=4 (N = {}):", layout.n_points());
    println!("  symmetric formula     {exact:+.9}");
    println!(
        "  trapezoid rewrite     {trap:+.9}   (relative gap {:.2e})",
        ((exact - trap) / exact).abs()
    );

    let cont = continuum_estimate(&profile)?;
    println!(
        "  continuum estimate    {cont:+.9}   (absolute gap {:+.3e})",
        cont - exact
    );

    println!("\nper-piece remainder vs bound (m=4):");
    for piece in 0..profile.pieces().len() {
        let g = em_error_check(&profile, piece, EmIntegrand::G)?;
        let h = em_error_check(&profile, piece, EmIntegrand::H)?;
        println!(
            "  piece {piece}: g {:.3e} <= {:.3e}   h {:.3e} <= {:.3e}",
            g.observed, g.bound, h.observed, h.bound
        );
    }

    println!("\nconstant from the continuum estimate alone:");
    for m in [5, 10, 20] {
        let profile = Profile::quasioptimal(m)?;
        let n = profile.total_points()?;
        let c = extract_constant(continuum_estimate(&profile)?, n);
        println!(
            "  m = {m:>2}: c = {c:+.9}   |c - limit| = {:.3e}",
            (c - C_QUASIOPTIMAL).abs()
        );
    }
    Ok(())
}
