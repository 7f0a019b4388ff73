//! Statistical validation of the closed-form expectations against sampled
//! configurations.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::energy::{expected_energy_general, log_energy, EnergyError};
use crate::ensemble::ParallelLayout;
use crate::sum::{neumaier_sum, NeumaierSum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("need at least 2 trials, got {trials}")]
    TooFewTrials { trials: u64 },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Comparison of a sampled-energy mean against the closed-form expectation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub trials: u64,
    pub mean_energy: f64,
    /// Sample standard error of the mean.
    pub stderr: f64,
    pub closed_form: f64,
    pub z_score: f64,
    pub base_seed: u64,
}

/// Seed for trial `k`: stream `k` of the pinned generator seeded with
/// `base_seed`, so parallel trials never share a phase stream.
pub fn trial_seed(base_seed: u64, k: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(k);
    rng.next_u64()
}

/// Samples `trials` realizations of the layout and compares the mean
/// logarithmic energy against the expectation formula.
pub fn mc_expected_energy(
    layout: &ParallelLayout,
    trials: u64,
    base_seed: u64,
) -> Result<McReport, McError> {
    if trials < 2 {
        return Err(McError::TooFewTrials { trials });
    }
    // Trials run in parallel but are collected in trial order, so the report
    // is identical for any thread count.
    let energies: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|k| log_energy(layout.sample(trial_seed(base_seed, k)).points()))
        .collect::<Result<_, _>>()?;

    let mean = neumaier_sum(energies.iter().copied()) / trials as f64;
    let mut sq = NeumaierSum::new();
    for e in &energies {
        let d = e - mean;
        sq.add(d * d);
    }
    let variance = sq.value() / (trials - 1) as f64;
    let stderr = (variance / trials as f64).sqrt();

    let closed_form = expected_energy_general(layout).total;
    let diff = mean - closed_form;
    let z_score = if stderr == 0.0 && diff == 0.0 {
        0.0
    } else {
        diff / stderr
    };
    Ok(McReport {
        trials,
        mean_energy: mean,
        stderr,
        closed_form,
        z_score,
        base_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{sampled_intra_parallel_energy, sampled_pole_energy};
    use crate::profile::Profile;

    const LN_2: f64 = std::f64::consts::LN_2;

    #[test]
    fn single_parallel_has_no_variance() {
        // one free phase leaves every pairwise distance unchanged
        let layout = ParallelLayout::from_counts(&[1]).unwrap();
        let report = mc_expected_energy(&layout, 16, 5).unwrap();
        assert!((report.mean_energy + 4.0 * LN_2).abs() < 1e-12);
        assert!(report.stderr < 1e-13);
        assert!(report.z_score.is_finite());
    }

    #[test]
    fn rejects_too_few_trials() {
        let layout = ParallelLayout::from_counts(&[1]).unwrap();
        assert!(matches!(
            mc_expected_energy(&layout, 1, 0),
            Err(McError::TooFewTrials { trials: 1 })
        ));
    }

    #[test]
    fn same_base_seed_reproduces_report() {
        let layout = ParallelLayout::from_counts(&[2, 3, 2]).unwrap();
        let a = mc_expected_energy(&layout, 64, 777).unwrap();
        let b = mc_expected_energy(&layout, 64, 777).unwrap();
        assert_eq!(a, b);
        let c = mc_expected_energy(&layout, 64, 778).unwrap();
        assert_ne!(a.mean_energy, c.mean_energy);
    }

    #[test]
    fn trial_seeds_differ_across_streams() {
        let seeds: Vec<u64> = (0..32).map(|k| trial_seed(9, k)).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
    }

    #[test]
    fn two_by_two_layout_z_score() {
        // counts [2,2] have optimal heights ±2/5
        let layout = ParallelLayout::from_counts(&[2, 2]).unwrap();
        assert!((layout.z(0) - 0.4).abs() < 1e-15);
        let report = mc_expected_energy(&layout, 5000, 20240) .unwrap();
        assert!(
            report.z_score.abs() <= 4.0,
            "z = {}, mean {}, closed {}",
            report.z_score,
            report.mean_energy,
            report.closed_form
        );
    }

    #[test]
    fn stderr_shrinks_with_square_root_law() {
        let layout = ParallelLayout::from_counts(&[3, 5, 3]).unwrap();
        let small = mc_expected_energy(&layout, 1000, 42).unwrap();
        let large = mc_expected_energy(&layout, 2000, 42).unwrap();
        let ratio = large.stderr / small.stderr;
        assert!(
            (0.6..=0.85).contains(&ratio),
            "stderr ratio {ratio} outside [0.6, 0.85]"
        );
    }

    #[test]
    fn only_cross_parallel_terms_vary() {
        let layout =
            ParallelLayout::from_profile(&Profile::simple(2, 2).unwrap()).unwrap();
        let baseline = {
            let ps = layout.sample(trial_seed(3, 0));
            sampled_pole_energy(&ps).unwrap() + sampled_intra_parallel_energy(&ps).unwrap()
        };
        for k in 1..20 {
            let ps = layout.sample(trial_seed(3, k));
            let ab =
                sampled_pole_energy(&ps).unwrap() + sampled_intra_parallel_energy(&ps).unwrap();
            assert!((ab - baseline).abs() < 1e-10, "trial {k}: {ab} vs {baseline}");
        }
    }
}
