//! Ohmic losses of the strand bundle and their split into a uniform-share
//! term plus circulating-current terms, and time-domain waveform
//! reconstruction from the harmonic phasors.
//!
//! Phasors are RMS-valued throughout: `|I_jk|` is already the RMS of
//! harmonic `k` in strand `j`, so the multi-harmonic RMS is the root of the
//! sum of squared magnitudes and a loss is simply `R * I_rms^2` — no factor
//! of 1/2 appears anywhere. Time-domain signals are reconstructed as
//! `x(t) = sqrt(2) * sum_k Re(X_k exp(j k omega t))`, which makes the
//! rectangle-rule RMS over one period match the harmonic RMS exactly once
//! the sample count resolves every product harmonic (see
//! [`reconstruct_waveforms`]).
//!
//! Loss split: with `I_jk = I_bk/n + delta_jk/alpha` the total splits
//! algebraically as
//!
//! ```text
//! P_CC = P_CC0 + P_delta_active / alpha^2 + Y
//! ```
//!
//! where `P_CC0` is the loss the uniform shares alone would cause,
//! `P_delta_active` collects the alpha-normalized deviations, and the cross
//! term `Y` is proportional to `sum_j delta_jk` — zero up to solver
//! roundoff, because the deviations encode Kirchhoff's law. Reporting `Y`
//! makes that near-cancellation observable instead of silently assumed.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::solver::{CurrentDecomposition, SolutionSet};

/// Multi-harmonic RMS from RMS phasors: `sqrt(sum_k |X_k|^2)`.
pub fn strand_rms(phasors: &[Complex64]) -> f64 {
    phasors.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt()
}

/// Per-strand RMS currents and ohmic losses at one resistance.
#[derive(Debug, Clone, PartialEq)]
pub struct StrandLosses {
    /// Per-strand resistance the losses are computed with \[ohm\].
    pub resistance: f64,
    /// Per-strand multi-harmonic RMS current \[A\].
    pub rms_currents: Vec<f64>,
    /// Per-strand loss `R * I_rms^2` \[W\].
    pub losses: Vec<f64>,
    /// Sum of the per-strand losses \[W\].
    pub total: f64,
}

impl StrandLosses {
    /// Largest per-strand RMS current with its strand index.
    pub fn max_rms(&self) -> (usize, f64) {
        let mut best = (0usize, 0.0f64);
        for (j, &rms) in self.rms_currents.iter().enumerate() {
            if rms > best.1 {
                best = (j, rms);
            }
        }
        best
    }
}

/// Computes per-strand RMS currents and losses of a solved operating point.
pub fn bundle_losses(set: &SolutionSet, resistance: f64) -> Result<StrandLosses> {
    if !crate::is_positive_finite(resistance) {
        return Err(Error::InvalidParameter(format!(
            "strand resistance must be positive and finite, got {resistance}"
        )));
    }
    let n = set.n_strands();
    let mut rms_currents = vec![0.0f64; n];
    for sol in set.iter() {
        for (rms, current) in rms_currents.iter_mut().zip(&sol.strand_currents) {
            *rms += current.norm_sqr();
        }
    }
    for rms in &mut rms_currents {
        *rms = rms.sqrt();
    }
    let losses: Vec<f64> = rms_currents.iter().map(|&i| resistance * i * i).collect();
    let total = losses.iter().sum();
    Ok(StrandLosses { resistance, rms_currents, losses, total })
}

/// Loss decomposition of one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    /// Per-strand resistance used \[ohm\].
    pub resistance: f64,
    /// End-winding ratio of the decomposition.
    pub alpha: f64,
    /// Total bundle loss `R * sum_jk |I_jk|^2` \[W\], from solved currents.
    pub p_cc: f64,
    /// Loss of the uniform shares alone, `R * sum_k n |I_bk/n|^2` \[W\].
    pub p_cc0: f64,
    /// Alpha-normalized circulating loss `R * sum_jk |delta_jk|^2` \[W\];
    /// an active-geometry quantity that does not move with alpha in the
    /// diagonal regime.
    pub p_delta_cc_active: f64,
    /// Physical circulating loss `p_delta_cc_active / alpha^2` \[W\].
    pub p_delta_cc: f64,
    /// Cross term of the split; zero up to solver roundoff.
    pub y_residual: f64,
    /// Per-strand breakdown behind `p_cc`.
    pub per_strand: StrandLosses,
}

impl LossReport {
    /// Defect of the split identity `p_cc - (p_cc0 + p_delta_cc + y)`;
    /// pure floating-point noise when the decomposition came from the
    /// same solution set.
    pub fn closure_defect(&self) -> f64 {
        self.p_cc - (self.p_cc0 + self.p_delta_cc + self.y_residual)
    }
}

/// Splits the bundle loss along a current decomposition.
///
/// The total `p_cc` uses the solved currents; the share and deviation
/// terms use the decomposition. Pairing the general (by-definition)
/// decomposition with its own solution set makes the split exact; pairing
/// the diagonal-regime prediction with a solved set shows how well the
/// prediction explains the solution.
pub fn loss_decomposition(
    set: &SolutionSet,
    decomp: &CurrentDecomposition,
    resistance: f64,
) -> Result<LossReport> {
    let per_strand = bundle_losses(set, resistance)?;
    let n = set.n_strands();
    let alpha = decomp.alpha.value();
    let mut p_cc0 = 0.0f64;
    let mut p_delta_active = 0.0f64;
    let mut y = 0.0f64;
    for sol in set.iter() {
        let share = decomp.shares.get(&sol.k).ok_or_else(|| {
            Error::DimensionMismatch(format!("decomposition lacks harmonic {}", sol.k))
        })?;
        let delta = decomp.deltas.get(&sol.k).ok_or_else(|| {
            Error::DimensionMismatch(format!("decomposition lacks harmonic {}", sol.k))
        })?;
        if delta.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "decomposition at harmonic {} has {} strands, solution has {n}",
                sol.k,
                delta.len()
            )));
        }
        p_cc0 += n as f64 * share.norm_sqr();
        let mut delta_sum = Complex64::new(0.0, 0.0);
        for j in 0..n {
            p_delta_active += delta[j].norm_sqr();
            delta_sum += delta[j];
        }
        y += 2.0 * (share * delta_sum.conj()).re / alpha;
    }
    Ok(LossReport {
        resistance,
        alpha,
        p_cc: per_strand.total,
        p_cc0: resistance * p_cc0,
        p_delta_cc_active: resistance * p_delta_active,
        p_delta_cc: resistance * p_delta_active / (alpha * alpha),
        y_residual: resistance * y,
        per_strand,
    })
}

/// Time-domain reconstruction of strand and bundle currents over one
/// fundamental period.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveforms {
    /// Fundamental angular frequency [rad/s].
    pub omega: f64,
    /// Uniform sample instants over one period \[s\], length `samples`.
    pub times: Vec<f64>,
    /// Per-strand instantaneous current \[A\], indexed \[strand\]\[sample\].
    pub strands: Vec<Vec<f64>>,
    /// Bundle instantaneous current \[A\].
    pub bundle: Vec<f64>,
}

impl Waveforms {
    /// Largest instantaneous magnitude of one strand \[A\].
    pub fn strand_peak(&self, j: usize) -> f64 {
        waveform_peak(&self.strands[j])
    }

    /// Largest instantaneous strand magnitude with its strand index.
    pub fn max_strand_peak(&self) -> (usize, f64) {
        let mut best = (0usize, 0.0f64);
        for (j, w) in self.strands.iter().enumerate() {
            let p = waveform_peak(w);
            if p > best.1 {
                best = (j, p);
            }
        }
        best
    }
}

/// Largest absolute sample value.
pub fn waveform_peak(samples: &[f64]) -> f64 {
    samples.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Rectangle-rule RMS of uniformly spaced samples over one period.
///
/// The squared signal of a trigonometric polynomial of degree `N_h` has
/// harmonics up to `2 N_h`; with at least `2 N_h + 1` uniform samples the
/// rectangle rule integrates every one of them exactly (discrete
/// orthogonality), so this RMS agrees with the harmonic-domain RMS to
/// machine precision — there is no discretization error to tune away.
pub fn time_domain_rms(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    (samples.iter().map(|&x| x * x).sum::<f64>() / samples.len() as f64).sqrt()
}

/// Samples `x(t) = sqrt(2) * sum_k Re(X_k exp(j k omega t))` for every
/// strand and the bundle at `samples` uniform instants over one period.
///
/// Requires `samples >= 2 * N_h + 1` so the waveform (and its square) are
/// fully resolved; fewer samples alias harmonics onto each other and are
/// rejected rather than silently accepted.
pub fn reconstruct_waveforms(set: &SolutionSet, samples: u32) -> Result<Waveforms> {
    let required = 2 * set.max_harmonic() + 1;
    if samples < required {
        return Err(Error::Undersampled { samples, required });
    }
    if !crate::is_positive_finite(set.omega) {
        return Err(Error::InvalidParameter(format!(
            "omega must be positive and finite, got {}",
            set.omega
        )));
    }
    let n = set.n_strands();
    let s = samples as usize;
    let period = 2.0 * std::f64::consts::PI / set.omega;
    let times: Vec<f64> = (0..s).map(|i| period * i as f64 / s as f64).collect();
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut strands = vec![vec![0.0f64; s]; n];
    let mut bundle = vec![0.0f64; s];
    for sol in set.iter() {
        for (i, &t) in times.iter().enumerate() {
            // exp(j k omega t) as a unit phasor.
            let angle = f64::from(sol.k) * set.omega * t;
            let rot = Complex64::from_polar(1.0, angle);
            for (strand, current) in strands.iter_mut().zip(&sol.strand_currents) {
                strand[i] += sqrt2 * (current * rot).re;
            }
            bundle[i] += sqrt2 * (sol.bundle_current * rot).re;
        }
    }
    Ok(Waveforms { omega: set.omega, times, strands, bundle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{HarmonicSolution, SolutionSet};
    use crate::winding::AlphaW;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Hand-built solution with given per-strand phasors at one harmonic.
    fn solution(k: u32, omega: f64, currents: Vec<Complex64>, bundle: Complex64) -> HarmonicSolution {
        HarmonicSolution {
            k,
            omega,
            strand_currents: DVector::from_vec(currents),
            delta_phi: c(0.0, 0.0),
            bundle_current: bundle,
            residual: 0.0,
            condition: 1.0,
        }
    }

    #[test]
    fn rms_of_two_harmonics_is_the_quadrature_sum() {
        // Magnitudes 3 and 4 combine to 5.
        assert!((strand_rms(&[c(3.0, 0.0), c(0.0, 4.0)]) - 5.0).abs() < 1e-15);
        // A single 3+4j phasor also has magnitude 5.
        assert!((strand_rms(&[c(3.0, 4.0)]) - 5.0).abs() < 1e-15);
        assert_eq!(strand_rms(&[]), 0.0);
    }

    #[test]
    fn losses_for_even_and_uneven_splits() {
        let omega = 100.0;
        // Bundle current 2 A split evenly over two strands: 1 W + 1 W.
        let even = SolutionSet::new(
            omega,
            vec![solution(1, omega, vec![c(1.0, 0.0), c(1.0, 0.0)], c(2.0, 0.0))],
        )
        .unwrap();
        let losses = bundle_losses(&even, 1.0).unwrap();
        assert!((losses.total - 2.0).abs() < 1e-15);
        assert!((losses.losses[0] - 1.0).abs() < 1e-15);

        // Same bundle current through one strand only: 4 W.
        let uneven = SolutionSet::new(
            omega,
            vec![solution(1, omega, vec![c(2.0, 0.0), c(0.0, 0.0)], c(2.0, 0.0))],
        )
        .unwrap();
        let losses = bundle_losses(&uneven, 1.0).unwrap();
        assert!((losses.total - 4.0).abs() < 1e-15);
        assert_eq!(losses.max_rms(), (0, 2.0));
    }

    #[test]
    fn losses_reject_nonpositive_resistance() {
        let set = SolutionSet::new(
            100.0,
            vec![solution(1, 100.0, vec![c(1.0, 0.0)], c(1.0, 0.0))],
        )
        .unwrap();
        assert!(bundle_losses(&set, 0.0).is_err());
        assert!(bundle_losses(&set, f64::NAN).is_err());
    }

    #[test]
    fn split_identity_closes_for_the_general_decomposition() {
        use crate::solver::decompose_general;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0009);
        for _ in 0..50 {
            let omega = 314.0;
            let n = rng.gen_range(2..12);
            let mut sols = Vec::new();
            for k in 1..=rng.gen_range(1..6) {
                let bundle = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                // Currents that satisfy Kirchhoff: random deviations summing
                // to zero plus the uniform share.
                let share = bundle / c(n as f64, 0.0);
                let mut devs: Vec<Complex64> = (0..n)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let mean = devs.iter().sum::<Complex64>() / c(n as f64, 0.0);
                for d in &mut devs {
                    *d -= mean;
                }
                let currents: Vec<Complex64> = devs.iter().map(|d| share + d).collect();
                sols.push(solution(k, omega, currents, bundle));
            }
            let set = SolutionSet::new(omega, sols).unwrap();
            let alpha = AlphaW::new(rng.gen_range(1.0..5.0)).unwrap();
            let decomp = decompose_general(&set, alpha);
            let report = loss_decomposition(&set, &decomp, 0.7).unwrap();
            let scale = report.p_cc.max(1.0);
            assert!(
                report.closure_defect().abs() <= 1e-13 * scale,
                "split identity defect {:.3e}",
                report.closure_defect()
            );
            assert!(
                report.y_residual.abs() <= 1e-13 * scale,
                "cross term {:.3e} should be roundoff",
                report.y_residual
            );
            assert!(report.p_cc >= report.p_cc0 - 1e-13 * scale, "share loss is a lower bound");
        }
    }

    #[test]
    fn uniform_currents_put_all_loss_in_the_share_term() {
        use crate::solver::decompose_general;
        let omega = 100.0;
        let set = SolutionSet::new(
            omega,
            vec![solution(1, omega, vec![c(1.5, -0.5); 4], c(6.0, -2.0))],
        )
        .unwrap();
        let decomp = decompose_general(&set, AlphaW::new(3.0).unwrap());
        let report = loss_decomposition(&set, &decomp, 2.0).unwrap();
        assert!((report.p_cc - report.p_cc0).abs() < 1e-12 * report.p_cc);
        assert!(report.p_delta_cc_active < 1e-12 * report.p_cc);
    }

    #[test]
    fn single_harmonic_waveform_peaks_at_sqrt2() {
        // A 1 A RMS phasor at angle 0 peaks at sqrt(2) at t = 0.
        let omega = 2.0 * std::f64::consts::PI * 50.0;
        let set = SolutionSet::new(
            omega,
            vec![solution(1, omega, vec![c(1.0, 0.0)], c(1.0, 0.0))],
        )
        .unwrap();
        let w = reconstruct_waveforms(&set, 64).unwrap();
        assert!((w.strands[0][0] - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((w.strand_peak(0) - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(w.times.len(), 64);
        assert_eq!(w.times[0], 0.0);
    }

    #[test]
    fn time_domain_rms_matches_harmonic_rms_at_minimum_sampling() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_000a);
        let omega = 314.159;
        let n_h = 7u32;
        let mut sols = Vec::new();
        for k in 1..=n_h {
            let i = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            sols.push(solution(k, omega, vec![i], i));
        }
        let set = SolutionSet::new(omega, sols).unwrap();
        let harmonic_rms = {
            let phasors: Vec<Complex64> =
                set.iter().map(|s| s.strand_currents[0]).collect();
            strand_rms(&phasors)
        };
        // Exactly 2 * (2 N_h) + 1 points resolve the squared signal.
        for samples in [4 * n_h + 1, 4 * n_h + 2, 256] {
            let w = reconstruct_waveforms(&set, samples).unwrap();
            let rms = time_domain_rms(&w.strands[0]);
            assert!(
                (rms - harmonic_rms).abs() <= 1e-12 * harmonic_rms,
                "samples = {samples}: {rms} vs {harmonic_rms}"
            );
        }
    }

    #[test]
    fn undersampling_is_rejected_not_aliased() {
        let omega = 100.0;
        let set = SolutionSet::new(
            omega,
            vec![solution(5, omega, vec![c(1.0, 0.0)], c(1.0, 0.0))],
        )
        .unwrap();
        match reconstruct_waveforms(&set, 10) {
            Err(Error::Undersampled { samples: 10, required: 11 }) => {}
            other => panic!("expected undersampled error, got {other:?}"),
        }
        assert!(reconstruct_waveforms(&set, 11).is_ok());
    }

    #[test]
    fn bundle_waveform_is_the_sum_of_strand_waveforms() {
        let omega = 200.0;
        let set = SolutionSet::new(
            omega,
            vec![
                solution(1, omega, vec![c(1.0, 0.5), c(-0.25, 0.1)], c(0.75, 0.6)),
                solution(3, omega, vec![c(0.2, -0.3), c(0.1, 0.3)], c(0.3, 0.0)),
            ],
        )
        .unwrap();
        let w = reconstruct_waveforms(&set, 32).unwrap();
        for i in 0..32 {
            let sum = w.strands[0][i] + w.strands[1][i];
            assert!(
                (w.bundle[i] - sum).abs() < 1e-12,
                "sample {i}: bundle {} vs strand sum {sum}",
                w.bundle[i]
            );
        }
    }
}
