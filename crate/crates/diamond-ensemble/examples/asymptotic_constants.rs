//! Reproduce the asymptotic energy constants of the three built-in
//! families: evaluate the exact expectation over a doubling ladder of
//! scales and watch the extracted order-N constant converge.
//!
//! ```bash
//! cargo run --release --example asymptotic_constants
//! ```

use diamond_ensemble::asymptotics::{
    convergence_reports, is_strictly_improving, reference_constants,
};
use diamond_ensemble::profile::ProfileFamily;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (family, scales) in [
        (ProfileFamily::Quasioptimal, vec![16, 32, 64, 128, 256]),
        (ProfileFamily::Simple { k: 4 }, vec![128, 256, 512, 1024, 2048]),
        (ProfileFamily::Elaborated, vec![16, 32, 64, 128, 256]),
    ] {
        let reports = convergence_reports(family, &scales)?;
        println!(
            "{family}  (target {:+.16}, {})",
            reports[0].target.unwrap(),
            if is_strictly_improving(&reports) {
                "strictly improving"
            } else {
                "NOT improving"
            }
        );
        for r in &reports {
            println!(
                "  N = {:>9}   c_N = {:+.12}   |c_N - target| = {:.3e}",
                r.n_points,
                r.constant,
                r.abs_error.unwrap()
            );
        }
        println!();
    }

    let rc = reference_constants();
    println!("reference constants:");
    println!("  continuous energy coefficient  {:+.13}", rc.w_log);
    println!("  known optimal-constant window  [{}, {}]", rc.c_log_lower, rc.c_log_upper);
    println!("  random-matrix family           {:+.12}", rc.c1);
    println!("  random-polynomial family       {:+.12}", rc.c2);
    println!("  simple family at K=4           {:+.12}", rc.c_simple_k4);
    println!("  elaborated family              {:+.15}", rc.c_elaborated);
    println!("  quasioptimal family            {:+.16}", rc.c_quasioptimal);
    println!(
        "  continuous-curve optimum       {:+.12} at K0 = {:.12}",
        rc.heuristic_optimum, rc.heuristic_minimizer
    );
    Ok(())
}
