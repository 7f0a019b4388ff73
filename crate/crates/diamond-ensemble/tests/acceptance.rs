//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them all).

use std::process::Command;

use diamond_ensemble::asymptotics::{
    convergence_reports, em_error_check, is_strictly_improving, AsymptoticReport, EmIntegrand,
    C_ELABORATED, C_QUASIOPTIMAL,
};
use diamond_ensemble::energy::{
    expected_energy_general, expected_energy_symmetric, log_energy, roots_of_unity_energy,
};
use diamond_ensemble::monte_carlo::mc_expected_energy;
use diamond_ensemble::profile::{Profile, ProfileFamily};
use diamond_ensemble::ParallelLayout;

const CONSTANT_TOL: f64 = 5e-3;
const EQUIVALENCE_REL_TOL: f64 = 1e-11;

fn xorshift(state: &mut u64) -> u64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    *state
}

fn assert_constant_reproduction(
    label: &str,
    family: ProfileFamily,
    scales: &[i64],
    target: f64,
) -> Vec<AsymptoticReport> {
    let reports = convergence_reports(family, scales).unwrap();
    assert!(
        is_strictly_improving(&reports),
        "{label}: |c_N - target| not strictly decreasing: {:?}",
        reports.iter().map(|r| r.abs_error).collect::<Vec<_>>()
    );
    let last = reports.last().unwrap();
    let err = (last.constant - target).abs();
    assert!(
        err <= CONSTANT_TOL,
        "{label}: |c_N - target| = {err:e} at N = {}",
        last.n_points
    );
    reports
}

#[test]
fn criterion_1_quasioptimal_constant() {
    let reports = assert_constant_reproduction(
        "quasioptimal",
        ProfileFamily::Quasioptimal,
        &[16, 32, 64, 128, 256],
        C_QUASIOPTIMAL,
    );
    let last = reports.last().unwrap();
    println!(
        "acceptance 1: PASS — quasioptimal c_N -> {C_QUASIOPTIMAL}, final error {:.3e} at N = {}",
        last.abs_error.unwrap(),
        last.n_points
    );
}

#[test]
fn criterion_2_simple_k4_constant() {
    let target = 2.0 * std::f64::consts::LN_2 / 3.0 - 0.5;
    let reports = assert_constant_reproduction(
        "simple K=4",
        ProfileFamily::Simple { k: 4 },
        &[128, 256, 512, 1024, 2048],
        target,
    );
    let last = reports.last().unwrap();
    println!(
        "acceptance 2: PASS — simple K=4 c_N -> {target}, final error {:.3e} at N = {}",
        last.abs_error.unwrap(),
        last.n_points
    );
}

#[test]
fn criterion_3_elaborated_constant() {
    let reports = assert_constant_reproduction(
        "elaborated",
        ProfileFamily::Elaborated,
        &[16, 32, 64, 128, 256],
        C_ELABORATED,
    );
    let last = reports.last().unwrap();
    println!(
        "acceptance 3: PASS — elaborated c_N -> {C_ELABORATED}, final error {:.3e} at N = {}",
        last.abs_error.unwrap(),
        last.n_points
    );
}

#[test]
fn criterion_4_formula_equivalence() {
    use diamond_ensemble::asymptotics::expected_energy_trapezoid;

    // built-ins: all three evaluation routes agree pairwise
    let mut worst_three_way: f64 = 0.0;
    for m in 1..=8 {
        for family in [
            ProfileFamily::Simple { k: 4 },
            ProfileFamily::Elaborated,
            ProfileFamily::Quasioptimal,
        ] {
            let profile = family.instantiate(m).unwrap();
            let layout = ParallelLayout::from_profile(&profile).unwrap();
            let general = expected_energy_general(&layout).total;
            let symmetric = expected_energy_symmetric(&layout).unwrap();
            let trapezoid = expected_energy_trapezoid(&profile).unwrap();
            let spread = (general - symmetric)
                .abs()
                .max((general - trapezoid).abs())
                .max((symmetric - trapezoid).abs())
                / general.abs();
            assert!(
                spread <= EQUIVALENCE_REL_TOL,
                "{family} m={m}: relative spread {spread:e}"
            );
            worst_three_way = worst_three_way.max(spread);
        }
    }

    // random symmetric count vectors: the two layout-level routes agree
    // (the trapezoid rewrite only exists for piecewise-linear profiles)
    let mut state = 0x2718_2818_2845_9045u64;
    let mut worst_pairwise: f64 = 0.0;
    for _ in 0..50 {
        let half = (xorshift(&mut state) % 11) as usize + 1; // p = 2·half-1 <= 21
        let mut counts: Vec<i64> = (0..half)
            .map(|_| (xorshift(&mut state) % 40) as i64 + 1)
            .collect();
        for j in (0..half - 1).rev() {
            counts.push(counts[j]);
        }
        let layout = ParallelLayout::from_counts(&counts).unwrap();
        let general = expected_energy_general(&layout).total;
        let symmetric = expected_energy_symmetric(&layout).unwrap();
        let rel = (general - symmetric).abs() / general.abs();
        assert!(rel <= EQUIVALENCE_REL_TOL, "counts {counts:?}: {rel:e}");
        worst_pairwise = worst_pairwise.max(rel);
    }
    println!(
        "acceptance 4: PASS — worst relative spread {worst_three_way:.3e} (three-route, built-ins), \
         {worst_pairwise:.3e} (50 random symmetric count vectors)"
    );
}

#[test]
fn criterion_5_monte_carlo_consistency() {
    let layout = ParallelLayout::from_profile(&Profile::quasioptimal(2).unwrap()).unwrap();
    assert_eq!(layout.n_points(), 958);
    let report = mc_expected_energy(&layout, 1000, 20240).unwrap();
    assert!(
        report.z_score.abs() <= 4.0,
        "z = {} (mean {}, closed {}, stderr {:e})",
        report.z_score,
        report.mean_energy,
        report.closed_form,
        report.stderr
    );
    println!(
        "acceptance 5: PASS — N=958, 1000 trials, z = {:+.3} (stderr {:.3e})",
        report.z_score, report.stderr
    );
}

#[test]
fn criterion_6_optimal_heights_optimality() {
    let mut state = 0x1357_9bdf_2468_aceu64;
    let mut worst_grad_frac: f64 = 0.0;
    let mut min_increase = f64::INFINITY;
    for _ in 0..20 {
        let p = (xorshift(&mut state) % 11) as usize + 1;
        let counts: Vec<i64> = (0..p)
            .map(|_| (xorshift(&mut state) % 100) as i64 + 1)
            .collect();
        let layout = ParallelLayout::from_counts(&counts).unwrap();
        let n = layout.n_points() as f64;
        let z0: Vec<f64> = (0..p).map(|j| layout.z(j)).collect();
        let energy_at = |z: &[f64]| {
            expected_energy_general(&ParallelLayout::with_heights(&counts, z).unwrap()).total
        };
        let e0 = energy_at(&z0);

        for l in 0..p {
            let h = 1e-6;
            let mut zp = z0.clone();
            zp[l] += h;
            let mut zm = z0.clone();
            zm[l] -= h;
            let grad = (energy_at(&zp) - energy_at(&zm)) / (2.0 * h);
            assert!(
                grad.abs() <= 1e-6 * n * n,
                "counts {counts:?}, l={l}: |dE/dz| = {} > 1e-6 N²",
                grad.abs()
            );
            worst_grad_frac = worst_grad_frac.max(grad.abs() / (1e-6 * n * n));

            for delta in [1e-3, -1e-3] {
                let mut z = z0.clone();
                z[l] += delta;
                let e = energy_at(&z);
                assert!(
                    e >= e0,
                    "counts {counts:?}, l={l}, delta={delta}: energy decreased by {}",
                    e0 - e
                );
                min_increase = min_increase.min(e - e0);
            }
        }
    }
    println!(
        "acceptance 6: PASS — worst gradient {worst_grad_frac:.2e} of the 1e-6·N² budget; \
         min perturbation increase {min_increase:.2e}"
    );
}

#[test]
fn criterion_7_exact_small_cases() {
    let layout = ParallelLayout::from_counts(&[1]).unwrap();
    let value = expected_energy_general(&layout).total;
    let want = -4.0 * std::f64::consts::LN_2;
    assert!((value - want).abs() <= 1e-13, "{value} vs {want}");

    let mut worst: f64 = 0.0;
    for n in 2..=64i64 {
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|i| {
                let angle = std::f64::consts::TAU * i as f64 / n as f64;
                [angle.cos(), angle.sin(), 0.0]
            })
            .collect();
        let direct = log_energy(&pts).unwrap();
        let closed = roots_of_unity_energy(n, 1.0);
        let err = (direct - closed).abs();
        assert!(err <= 1e-10, "n={n}: {err:e}");
        worst = worst.max(err);
    }
    println!(
        "acceptance 7: PASS — three-point value exact to {:.1e}; n-gon worst absolute error {worst:.3e}",
        (value - want).abs()
    );
}

#[test]
fn criterion_8_euler_maclaurin_bounds() {
    let families = [
        ProfileFamily::Simple { k: 4 },
        ProfileFamily::Elaborated,
        ProfileFamily::Quasioptimal,
    ];

    let mut worst_margin = f64::INFINITY;
    for m in 1..=20 {
        for family in families {
            let profile = family.instantiate(m).unwrap();
            for piece in 0..profile.pieces().len() {
                for which in [EmIntegrand::G, EmIntegrand::H] {
                    let check = em_error_check(&profile, piece, which).unwrap();
                    assert!(
                        check.observed <= check.bound,
                        "{family} m={m} piece {piece} {which:?}: {} > {}",
                        check.observed,
                        check.bound
                    );
                    worst_margin = worst_margin.min(check.bound / check.observed.max(1e-300));
                }
            }
        }
    }

    let mut worst_shrink = f64::INFINITY;
    for family in families {
        let max_g_err = |m: i64| -> f64 {
            let profile = family.instantiate(m).unwrap();
            (0..profile.pieces().len())
                .map(|p| em_error_check(&profile, p, EmIntegrand::G).unwrap().observed)
                .fold(0.0, f64::max)
        };
        let errs = [max_g_err(10), max_g_err(20), max_g_err(40)];
        for w in errs.windows(2) {
            let shrink = w[0] / w[1];
            assert!(
                shrink >= 1.5,
                "{family}: g error shrank only {shrink}x per doubling ({errs:?})"
            );
            worst_shrink = worst_shrink.min(shrink);
        }
    }
    println!(
        "acceptance 8: PASS — observed <= bound on every piece (min bound/observed {worst_margin:.2}); \
         g error shrinks >= {worst_shrink:.2}x per doubling"
    );
}

#[test]
fn criterion_9_generation_determinism() {
    let exe = env!("CARGO_BIN_EXE_diamond");
    let dir = tempfile::tempdir().unwrap();

    let generate = |name: &str, threads: &str| -> (Vec<u8>, Vec<u8>) {
        let out = dir.path().join(name);
        let status = Command::new(exe)
            .env("DIAMOND_THREADS", threads)
            .args([
                "generate",
                "--spec",
                "quasioptimal:m=2",
                "--seed",
                "42",
                "--out",
            ])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        (
            std::fs::read(&out).unwrap(),
            std::fs::read(out.with_extension("json")).unwrap(),
        )
    };

    let (csv_a, sidecar_a) = generate("a.csv", "1");
    let (csv_b, sidecar_b) = generate("b.csv", "1");
    let (csv_c, sidecar_c) = generate("c.csv", "4");
    let (csv_d, _) = generate("d.csv", "4");

    assert_eq!(csv_a, csv_b, "same-thread reruns differ");
    assert_eq!(csv_a, csv_c, "thread counts 1 vs 4 differ");
    assert_eq!(csv_c, csv_d, "4-thread reruns differ");
    assert_eq!(sidecar_a, sidecar_b);
    assert_eq!(sidecar_a, sidecar_c);
    let rows = csv_a.iter().filter(|&&b| b == b'\n').count();
    assert_eq!(rows, 959, "header plus 958 point rows");
    println!(
        "acceptance 9: PASS — byte-identical CSV ({} bytes) across reruns and thread counts 1/4",
        csv_a.len()
    );
}
