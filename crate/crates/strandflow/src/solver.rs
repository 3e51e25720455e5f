//! Per-harmonic solution of the bordered strand-current systems, the
//! closed-form inverse available in the diagonal regime, and the split of
//! strand currents into a uniform bundle share plus circulating deviations.
//!
//! Each harmonic is an independent `(Nsh+1) x (Nsh+1)` complex system, so
//! they are solved one at a time with a dense LU factorization — the
//! harmonics never couple, and keeping them separate bounds both cost and
//! conditioning by the strand count rather than by `Nsh * N_h`. Every solve
//! is gated by a condition-number estimate and an a-posteriori residual
//! check so a bad layout or degenerate map surfaces as a typed error
//! instead of quiet nonsense.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::assembly::{build_harmonic_system, HarmonicSystem, PhaseSystem, Regime};
use crate::error::{Error, Result};
use crate::winding::AlphaW;

/// Relative residual bound: a solve is rejected unless
/// `||A x - b||_2 <= RESIDUAL_REL_TOL * ||b||_2`. LU with partial pivoting
/// on these small well-scaled systems lands many orders of magnitude below
/// this; hitting it means the system was effectively singular.
pub const RESIDUAL_REL_TOL: f64 = 1e-10;

/// One-norm condition estimate above which a system is reported singular.
/// 1e12 leaves ~4 significant digits in double precision — past that the
/// strand currents would be numerically meaningless.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Floor for circulating-current detection, relative to the largest strand
/// current: deviations below `1e-9 * max |I|` are indistinguishable from
/// solver roundoff (residuals sit near 1e-15) and are not flagged.
pub const DETECTION_REL_FLOOR: f64 = 1e-9;

/// Solution of one harmonic's bordered system.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    /// Harmonic order (1 = fundamental).
    pub k: u32,
    /// Fundamental angular frequency [rad/s].
    pub omega: f64,
    /// Strand current phasors [A RMS], one per strand.
    pub strand_currents: DVector<Complex64>,
    /// Common potential difference across the bundle at this harmonic \[V\].
    pub delta_phi: Complex64,
    /// Bundle current phasor the constraint row enforced [A RMS].
    pub bundle_current: Complex64,
    /// Achieved residual `||A x - b||_2`.
    pub residual: f64,
    /// One-norm condition estimate `||A||_1 * ||A^-1||_1`.
    pub condition: f64,
}

impl HarmonicSolution {
    /// Number of strands.
    pub fn n_strands(&self) -> usize {
        self.strand_currents.len()
    }

    /// Sum of strand currents; equals the bundle current up to the
    /// residual bound.
    pub fn current_sum(&self) -> Complex64 {
        self.strand_currents.iter().sum()
    }
}

/// One-norm of a complex matrix: max over columns of the modulus sum.
fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves one bordered harmonic system by dense LU with partial pivoting.
///
/// Fails with a typed error when the condition estimate exceeds
/// [`CONDITION_LIMIT`] or the residual exceeds [`RESIDUAL_REL_TOL`] times
/// the right-hand-side norm.
pub fn solve_harmonic(system: &HarmonicSystem) -> Result<HarmonicSolution> {
    let n = system.n_strands();
    let lu = system.matrix.clone().lu();
    let inverse = lu
        .try_inverse()
        .ok_or(Error::SingularSystem { k: system.k, estimate: f64::INFINITY })?;
    let condition = one_norm(&system.matrix) * one_norm(&inverse);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::SingularSystem { k: system.k, estimate: condition });
    }
    let x = lu
        .solve(&system.rhs)
        .ok_or(Error::SingularSystem { k: system.k, estimate: condition })?;
    let residual = (&system.matrix * &x - &system.rhs).norm();
    let bound = RESIDUAL_REL_TOL * system.rhs.norm();
    if residual > bound {
        return Err(Error::ResidualTooLarge { k: system.k, residual, bound });
    }
    Ok(HarmonicSolution {
        k: system.k,
        omega: system.omega,
        strand_currents: x.rows(0, n).into_owned(),
        delta_phi: x[n],
        bundle_current: system.bundle_current,
        residual,
        condition,
    })
}

/// Exact inverse of the bordered system in the diagonal regime, where the
/// impedance block is `alpha * z_act * I`.
///
/// With `J` the all-ones matrix and `n` the strand count, the inverse is
///
/// ```text
/// [ (I - J/n) / (alpha * z_act)    1/n      ]
/// [          1/n                -alpha*z_act/n ]
/// ```
///
/// Reading it off: strand currents respond to flux deviations from the
/// mean through `1/(alpha * z_act)` — the 1/alpha decay of circulating
/// currents — while the bundle current splits uniformly through the `1/n`
/// border entries.
pub fn closed_form_inverse(
    n_strands: usize,
    z_act: Complex64,
    alpha: AlphaW,
) -> Result<DMatrix<Complex64>> {
    if n_strands == 0 {
        return Err(Error::InvalidParameter("n_strands must be >= 1".into()));
    }
    if z_act.norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "strand impedance must be nonzero for the closed-form inverse".into(),
        ));
    }
    let n = n_strands;
    let nf = Complex64::from(n as f64);
    let a = Complex64::from(alpha.value());
    let top = (Complex64::new(1.0, 0.0) / (a * z_act)) / nf; // (1/(alpha z)) * (1/n)
    let border = Complex64::new(1.0, 0.0) / nf;
    let corner = -a * z_act / nf;
    let mut m = DMatrix::from_element(n + 1, n + 1, Complex64::new(0.0, 0.0));
    for r in 0..n {
        for c in 0..n {
            // (I - J/n) / (alpha z) entrywise: (delta_rc * n - 1) / (alpha z n)
            let delta = if r == c { nf } else { Complex64::new(0.0, 0.0) };
            m[(r, c)] = top * (delta - Complex64::new(1.0, 0.0));
        }
        m[(r, n)] = border;
        m[(n, r)] = border;
    }
    m[(n, n)] = corner;
    Ok(m)
}

/// Solution phasors for every harmonic of one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSet {
    /// Fundamental angular frequency [rad/s].
    pub omega: f64,
    solutions: BTreeMap<u32, HarmonicSolution>,
}

impl SolutionSet {
    /// Wraps per-harmonic solutions; they must agree on strand count.
    pub fn new(omega: f64, solutions: Vec<HarmonicSolution>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut n_strands = None;
        for sol in solutions {
            match n_strands {
                None => n_strands = Some(sol.n_strands()),
                Some(n) if n != sol.n_strands() => {
                    return Err(Error::DimensionMismatch(format!(
                        "harmonic {} has {} strands, earlier harmonics have {n}",
                        sol.k,
                        sol.n_strands()
                    )));
                }
                _ => {}
            }
            if map.insert(sol.k, sol).is_some() {
                return Err(Error::DimensionMismatch(
                    "duplicate harmonic in solution set".into(),
                ));
            }
        }
        Ok(SolutionSet { omega, solutions: map })
    }

    /// Harmonic orders present, ascending.
    pub fn harmonics(&self) -> impl Iterator<Item = u32> + '_ {
        self.solutions.keys().copied()
    }

    /// Solution at one harmonic.
    pub fn get(&self, k: u32) -> Option<&HarmonicSolution> {
        self.solutions.get(&k)
    }

    /// All solutions in ascending harmonic order.
    pub fn iter(&self) -> impl Iterator<Item = &HarmonicSolution> {
        self.solutions.values()
    }

    /// Number of harmonics.
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    /// True when no harmonics are present.
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    /// Strand count (0 for an empty set).
    pub fn n_strands(&self) -> usize {
        self.solutions.values().next().map_or(0, HarmonicSolution::n_strands)
    }

    /// Highest harmonic order (0 for an empty set).
    pub fn max_harmonic(&self) -> u32 {
        self.solutions.keys().next_back().copied().unwrap_or(0)
    }
}

/// Solves harmonics `1..=n_harmonics` of a phase, taking flux vectors and
/// bundle currents from the supplied spectra (missing orders are zero).
pub fn solve_phase(
    phase: &PhaseSystem,
    omega: f64,
    n_harmonics: u32,
    flux: &BTreeMap<u32, DVector<Complex64>>,
    supply: &BTreeMap<u32, Complex64>,
    regime: Regime,
) -> Result<SolutionSet> {
    if n_harmonics == 0 {
        return Err(Error::InvalidParameter(
            "n_harmonics must be >= 1 (no harmonic content to solve)".into(),
        ));
    }
    let zero_flux = DVector::from_element(phase.n_strands, Complex64::new(0.0, 0.0));
    let mut solutions = Vec::with_capacity(n_harmonics as usize);
    for k in 1..=n_harmonics {
        let phi = flux.get(&k).unwrap_or(&zero_flux);
        if phi.len() != phase.n_strands {
            return Err(Error::DimensionMismatch(format!(
                "flux vector at harmonic {k} has {} entries, phase has {} strands",
                phi.len(),
                phase.n_strands
            )));
        }
        let bundle = supply.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0));
        let system = build_harmonic_system(phase, k, omega, phi, bundle, regime)?;
        solutions.push(solve_harmonic(&system)?);
    }
    SolutionSet::new(omega, solutions)
}

/// Strand currents split into the uniform bundle share and circulating
/// deviations:
///
/// ```text
/// I_jk = I_bk / n  +  delta_jk / alpha
/// ```
///
/// `deltas` stores the alpha-normalized deviation `delta_jk`; dividing by
/// alpha recovers the physical circulating part. In the diagonal regime
/// `delta_jk` depends only on the flux and the active-part impedance, which
/// is what makes circulating losses scale as `1/alpha^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentDecomposition {
    /// End-winding ratio the normalization used.
    pub alpha: AlphaW,
    /// Per harmonic: uniform share `I_bk / n` [A RMS].
    pub shares: BTreeMap<u32, Complex64>,
    /// Per harmonic: alpha-normalized deviations `delta_jk` [A RMS].
    pub deltas: BTreeMap<u32, DVector<Complex64>>,
}

impl CurrentDecomposition {
    /// Reconstructed strand current `share + delta / alpha`.
    pub fn strand_current(&self, k: u32, j: usize) -> Option<Complex64> {
        let share = self.shares.get(&k)?;
        let delta = self.deltas.get(&k)?;
        Some(share + delta[j] / Complex64::from(self.alpha.value()))
    }

    /// Harmonic orders present, ascending.
    pub fn harmonics(&self) -> impl Iterator<Item = u32> + '_ {
        self.shares.keys().copied()
    }

    /// Strand count (0 when empty).
    pub fn n_strands(&self) -> usize {
        self.deltas.values().next().map_or(0, DVector::len)
    }
}

/// Splits solved currents by definition: `delta_jk = alpha * (I_jk - I_bk/n)`.
/// Valid in every regime; reconstruction is exact by construction.
pub fn decompose_general(set: &SolutionSet, alpha: AlphaW) -> CurrentDecomposition {
    let a = Complex64::from(alpha.value());
    let mut shares = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    for sol in set.iter() {
        let n = sol.n_strands();
        let share = sol.bundle_current / Complex64::from(n as f64);
        let delta = DVector::from_fn(n, |j, _| a * (sol.strand_currents[j] - share));
        shares.insert(sol.k, share);
        deltas.insert(sol.k, delta);
    }
    CurrentDecomposition { alpha, shares, deltas }
}

/// Predicts the decomposition in the diagonal regime without solving:
///
/// ```text
/// delta_jk = (-j k omega / z_act_k) * (phi_jk - mean_j phi_jk)
/// ```
///
/// which, with the uniform share, reproduces the solved currents. The
/// deviations depend only on active-part quantities, so they are the same
/// for every alpha — the algebraic source of the inverse-square loss law.
pub fn decompose_diagonal(
    phase: &PhaseSystem,
    omega: f64,
    n_harmonics: u32,
    flux: &BTreeMap<u32, DVector<Complex64>>,
    supply: &BTreeMap<u32, Complex64>,
) -> Result<CurrentDecomposition> {
    if n_harmonics == 0 {
        return Err(Error::InvalidParameter("n_harmonics must be >= 1".into()));
    }
    let n = phase.n_strands;
    let zero_flux = DVector::from_element(n, Complex64::new(0.0, 0.0));
    let mut shares = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    for k in 1..=n_harmonics {
        let phi = flux.get(&k).unwrap_or(&zero_flux);
        if phi.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "flux vector at harmonic {k} has {} entries, phase has {n} strands",
                phi.len()
            )));
        }
        let (_, z_act) = phase.strand_impedance_at(k, omega);
        if z_act.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "active strand impedance is zero at harmonic {k}"
            )));
        }
        let mean = phi.iter().sum::<Complex64>() / Complex64::from(n as f64);
        let gain = Complex64::new(0.0, -(f64::from(k)) * omega) / z_act;
        let delta = DVector::from_fn(n, |j, _| gain * (phi[j] - mean));
        let bundle = supply.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0));
        shares.insert(k, bundle / Complex64::from(n as f64));
        deltas.insert(k, delta);
    }
    Ok(CurrentDecomposition { alpha: phase.alpha, shares, deltas })
}

/// Outcome of circulating-current detection.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculationReport {
    /// True when some strand current deviates from its uniform share by
    /// more than the detection floor.
    pub detected: bool,
    /// Largest deviation `|I_jk - I_bk/n|` found [A RMS].
    pub max_deviation: f64,
    /// Largest strand-current magnitude, the scale the floor is relative to.
    pub scale: f64,
    /// Threshold actually applied: `DETECTION_REL_FLOOR * scale`.
    pub threshold: f64,
    /// Harmonic of the witness deviation (when any current is nonzero).
    pub harmonic: Option<u32>,
    /// Strand of the witness deviation.
    pub strand: Option<usize>,
}

impl std::fmt::Display for CirculationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.detected {
            write!(
                f,
                "circulating currents detected: strand {} deviates by {:.6e} A at harmonic {} (threshold {:.6e} A)",
                self.strand.unwrap_or(0),
                self.max_deviation,
                self.harmonic.unwrap_or(0),
                self.threshold
            )
        } else {
            write!(
                f,
                "no circulating currents: max deviation {:.6e} A within threshold {:.6e} A",
                self.max_deviation, self.threshold
            )
        }
    }
}

/// Flags strand-current asymmetry: some `|I_jk - I_bk/n|` above
/// [`DETECTION_REL_FLOOR`] times the largest strand current. Works with
/// zero bundle current (any nonzero current is then pure circulation) and
/// reports the worst (harmonic, strand) pair as a witness.
pub fn detect_circulating(set: &SolutionSet) -> CirculationReport {
    let mut max_deviation = 0.0f64;
    let mut scale = 0.0f64;
    let mut witness = None;
    for sol in set.iter() {
        let n = sol.n_strands();
        let share = sol.bundle_current / Complex64::from(n as f64);
        for j in 0..n {
            let current = sol.strand_currents[j];
            scale = scale.max(current.norm());
            let deviation = (current - share).norm();
            if deviation > max_deviation {
                max_deviation = deviation;
                witness = Some((sol.k, j));
            }
        }
    }
    let threshold = DETECTION_REL_FLOOR * scale;
    let detected = max_deviation > threshold && max_deviation > 0.0;
    CirculationReport {
        detected,
        max_deviation,
        scale,
        threshold,
        harmonic: witness.map(|(k, _)| k),
        strand: witness.map(|(_, j)| j),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::bordered_system;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity_z(n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(n, n, |r, col| if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    #[test]
    fn solves_the_two_strand_unit_system() {
        // Z = I, no flux, bundle current 2: currents split evenly and the
        // border unknown balances the strand voltage drop.
        let flux = DVector::from_element(2, c(0.0, 0.0));
        let sys = bordered_system(1, 1.0, identity_z(2), &flux, c(2.0, 0.0)).unwrap();
        let sol = solve_harmonic(&sys).unwrap();
        assert!((sol.strand_currents[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((sol.strand_currents[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((sol.delta_phi - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(sol.residual <= RESIDUAL_REL_TOL * 2.0);
        assert!(sol.condition < 100.0);
    }

    #[test]
    fn single_strand_carries_the_whole_bundle() {
        let z = DMatrix::from_element(1, 1, c(3.0, 4.0));
        let flux = DVector::from_element(1, c(2.0, 0.0));
        let sys = bordered_system(2, 5.0, z, &flux, c(7.0, 0.0)).unwrap();
        let sol = solve_harmonic(&sys).unwrap();
        assert!((sol.strand_currents[0] - c(7.0, 0.0)).norm() < 1e-12);
        // Z I + delta_phi = -j k omega phi  =>  delta_phi = -20j - (3+4j)*7
        let want = c(0.0, -20.0) - c(3.0, 4.0) * c(7.0, 0.0);
        assert!((sol.delta_phi - want).norm() < 1e-12);
    }

    #[test]
    fn rejects_singular_systems() {
        // Two identical strands with identical coupling rows: rank deficient.
        let z = DMatrix::from_element(2, 2, c(1.0, 0.0));
        let flux = DVector::from_element(2, c(0.0, 0.0));
        let sys = bordered_system(1, 1.0, z, &flux, c(1.0, 0.0)).unwrap();
        match solve_harmonic(&sys) {
            Err(Error::SingularSystem { k: 1, .. }) => {}
            other => panic!("expected singular-system error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_pathologically_conditioned_systems() {
        let mut z = identity_z(2);
        z[(1, 1)] = c(1.0e20, 0.0);
        let flux = DVector::from_element(2, c(1.0, 0.0));
        let sys = bordered_system(1, 1.0, z, &flux, c(1.0, 0.0)).unwrap();
        match solve_harmonic(&sys) {
            Err(Error::SingularSystem { estimate, .. }) => {
                assert!(estimate > CONDITION_LIMIT, "estimate = {estimate}")
            }
            other => panic!("expected condition rejection, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_inverse_matches_hand_values() {
        // One strand: [[0, 1], [1, -alpha z]].
        let alpha = AlphaW::new(2.0).unwrap();
        let z = c(3.0, 1.0);
        let m = closed_form_inverse(1, z, alpha).unwrap();
        assert_eq!(m[(0, 0)], c(0.0, 0.0));
        assert_eq!(m[(0, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert!((m[(1, 1)] - (-c(2.0, 0.0) * z)).norm() < 1e-15);

        // Two strands, z = 1, alpha = 1.
        let m = closed_form_inverse(2, c(1.0, 0.0), AlphaW::new(1.0).unwrap()).unwrap();
        let want = [
            [0.5, -0.5, 0.5],
            [-0.5, 0.5, 0.5],
            [0.5, 0.5, -0.5],
        ];
        for r in 0..3 {
            for col in 0..3 {
                assert!(
                    (m[(r, col)] - c(want[r][col], 0.0)).norm() < 1e-15,
                    "entry ({r},{col}) = {}",
                    m[(r, col)]
                );
            }
        }
    }

    #[test]
    fn closed_form_inverse_times_system_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let z = c(rng.gen_range(0.1..10.0), rng.gen_range(-10.0..10.0));
            let alpha = AlphaW::new(rng.gen_range(1.0..5.0)).unwrap();
            let m = closed_form_inverse(n, z, alpha).unwrap();
            // Assemble the bordered diagonal system it must invert.
            let az = Complex64::from(alpha.value()) * z;
            let mut a = DMatrix::from_element(n + 1, n + 1, c(0.0, 0.0));
            for j in 0..n {
                a[(j, j)] = az;
                a[(j, n)] = c(1.0, 0.0);
                a[(n, j)] = c(1.0, 0.0);
            }
            let product = &a * &m;
            for r in 0..=n {
                for col in 0..=n {
                    let want = if r == col { 1.0 } else { 0.0 };
                    let err = (product[(r, col)] - c(want, 0.0)).norm();
                    assert!(err < 1e-12, "n={n}, ({r},{col}): err = {err:.3e}");
                }
            }
        }
    }

    #[test]
    fn lu_solve_agrees_with_closed_form_in_the_diagonal_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        for _ in 0..30 {
            let n = rng.gen_range(2..20);
            let z_act = c(rng.gen_range(0.01..1.0), rng.gen_range(-1.0..1.0));
            let alpha = AlphaW::new(rng.gen_range(1.0..4.0)).unwrap();
            let k = rng.gen_range(1..8);
            let omega = rng.gen_range(10.0..1000.0);
            let flux = DVector::from_fn(n, |_, _| {
                c(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3))
            });
            let bundle = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));

            let az = Complex64::from(alpha.value()) * z_act;
            let z = DMatrix::from_fn(n, n, |r, col| if r == col { az } else { c(0.0, 0.0) });
            let sys = bordered_system(k, omega, z, &flux, bundle).unwrap();
            let sol = solve_harmonic(&sys).unwrap();

            let m = closed_form_inverse(n, z_act, alpha).unwrap();
            let direct = &m * &sys.rhs;
            for j in 0..n {
                let err = (sol.strand_currents[j] - direct[j]).norm();
                let scale = direct[j].norm().max(1e-12);
                assert!(err <= 1e-10 * scale.max(1.0), "strand {j}: err = {err:.3e}");
            }
            assert!((sol.delta_phi - direct[n]).norm() <= 1e-10 * direct[n].norm().max(1.0));
        }
    }

    #[test]
    fn currents_are_gauge_invariant_under_flux_and_coupling_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        let n = 5;
        let k = 3;
        let omega = 314.0;
        // Random symmetric complex impedance block, diagonally dominant so
        // it stays well conditioned.
        let mut z = DMatrix::from_element(n, n, c(0.0, 0.0));
        for r in 0..n {
            for col in r..n {
                let v = c(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
                z[(r, col)] = v;
                z[(col, r)] = v;
            }
            z[(r, r)] += c(2.0, 1.0);
        }
        let flux = DVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let bundle = c(1.5, -0.5);
        let base = solve_harmonic(&bordered_system(k, omega, z.clone(), &flux, bundle).unwrap())
            .unwrap();
        let scale = base
            .strand_currents
            .iter()
            .map(|x| x.norm())
            .fold(1.0, f64::max);

        // Shift every flux entry by the same constant.
        let shift = c(0.3, -0.7);
        let flux_shifted = flux.map(|p| p + shift);
        let shifted =
            solve_harmonic(&bordered_system(k, omega, z.clone(), &flux_shifted, bundle).unwrap())
                .unwrap();
        for j in 0..n {
            assert!(
                (base.strand_currents[j] - shifted.strand_currents[j]).norm() < 1e-10 * scale,
                "flux gauge shift changed strand {j}"
            );
        }
        // delta_phi absorbs the shift: -j k omega * shift.
        let want = base.delta_phi + c(0.0, -(f64::from(k)) * omega) * shift;
        assert!((shifted.delta_phi - want).norm() < 1e-10 * want.norm().max(scale));

        // Shift every impedance entry by the same constant (all-ones matrix).
        let zshift = c(0.05, 0.02);
        let z_shifted = z.map(|v| v + zshift);
        let coupled =
            solve_harmonic(&bordered_system(k, omega, z_shifted, &flux, bundle).unwrap()).unwrap();
        for j in 0..n {
            assert!(
                (base.strand_currents[j] - coupled.strand_currents[j]).norm() < 1e-10 * scale,
                "coupling gauge shift changed strand {j}"
            );
        }
        // delta_phi absorbs z_shift * bundle current.
        let want = base.delta_phi - zshift * bundle;
        assert!((coupled.delta_phi - want).norm() < 1e-10 * want.norm().max(scale));
    }

    #[test]
    fn solutions_superpose_linearly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let n = 4;
        let z = DMatrix::from_fn(n, n, |r, col| {
            if r == col {
                c(1.0, 0.5)
            } else {
                c(0.01 * (r + col) as f64, -0.02)
            }
        });
        let flux1 = DVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), 0.0));
        let flux2 = DVector::from_fn(n, |_, _| c(0.0, rng.gen_range(-1.0..1.0)));
        let (b1, b2) = (c(2.0, 0.0), c(-1.0, 1.0));
        let s1 = solve_harmonic(&bordered_system(1, 100.0, z.clone(), &flux1, b1).unwrap()).unwrap();
        let s2 = solve_harmonic(&bordered_system(1, 100.0, z.clone(), &flux2, b2).unwrap()).unwrap();
        let s12 =
            solve_harmonic(&bordered_system(1, 100.0, z, &(&flux1 + &flux2), b1 + b2).unwrap())
                .unwrap();
        let scale = s12.strand_currents.iter().map(|x| x.norm()).fold(1.0, f64::max);
        for j in 0..n {
            let sum = s1.strand_currents[j] + s2.strand_currents[j];
            assert!((s12.strand_currents[j] - sum).norm() < 1e-10 * scale);
        }
    }

    #[test]
    fn kirchhoff_sum_matches_bundle_current() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
        for _ in 0..20 {
            let n = rng.gen_range(2..15);
            let z = DMatrix::from_fn(n, n, |r, col| {
                if r == col {
                    c(rng.gen_range(0.5..2.0), rng.gen_range(0.0..1.0))
                } else {
                    c(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05))
                }
            });
            let flux =
                DVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let bundle = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let sol =
                solve_harmonic(&bordered_system(2, 377.0, z, &flux, bundle).unwrap()).unwrap();
            let sum = sol.current_sum();
            assert!(
                (sum - bundle).norm() <= 1e-10 * bundle.norm().max(1.0),
                "sum {sum} vs bundle {bundle}"
            );
        }
    }

    #[test]
    fn general_decomposition_reconstructs_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
        let n = 6;
        let z = DMatrix::from_fn(n, n, |r, col| {
            if r == col {
                c(1.0, 2.0)
            } else {
                c(0.03, -0.01 * (r as f64 - col as f64))
            }
        });
        let flux = DVector::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let sol = solve_harmonic(&bordered_system(1, 50.0, z, &flux, c(4.0, 1.0)).unwrap()).unwrap();
        let set = SolutionSet::new(50.0, vec![sol.clone()]).unwrap();
        let alpha = AlphaW::new(2.5).unwrap();
        let decomp = decompose_general(&set, alpha);
        for j in 0..n {
            let rebuilt = decomp.strand_current(1, j).unwrap();
            let err = (rebuilt - sol.strand_currents[j]).norm();
            assert!(err < 1e-13, "strand {j}: err = {err:.3e}");
        }
        // Deviations sum to ~0 (they encode Kirchhoff).
        let delta_sum: Complex64 = decomp.deltas[&1].iter().sum();
        assert!(delta_sum.norm() < 1e-12);
    }

    #[test]
    fn diagonal_prediction_matches_solved_decomposition() {
        // Two strands with flux [phi0 + d, phi0 - d]: the prediction is
        // delta = (-j k omega / z_act) * [d, -d], independent of alpha.
        use crate::assembly::{assemble_phase_from_description, Regime};
        use crate::winding::{MachineGeometry, Material, WindingMap};
        use std::collections::BTreeMap as Map;

        let desc = crate::winding::WindingDescription::new(
            MachineGeometry {
                l_active: 0.2,
                l_end_winding: 0.3,
                n_slots: 6,
                poles: 2,
                slots_per_pole_per_phase: Some(1),
            },
            Material::circular(5.8e7, 0.5e-3),
            2,
            vec![[0.0, 0.0], [3.0e-3, 0.0]],
            Map::new(),
            vec![WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap()],
            None,
        )
        .unwrap();
        let phase = assemble_phase_from_description(&desc).unwrap();
        let omega = 2.0 * std::f64::consts::PI * 500.0;
        let k = 1u32;
        let phi0 = c(1.0e-3, 0.5e-3);
        let d = c(2.0e-4, -1.0e-4);
        let mut flux = Map::new();
        flux.insert(k, DVector::from_vec(vec![phi0 + d, phi0 - d]));
        let mut supply = Map::new();
        supply.insert(k, c(10.0, 0.0));

        let set = solve_phase(&phase, omega, 1, &flux, &supply, Regime::Diagonal).unwrap();
        let solved = decompose_general(&set, phase.alpha);
        let predicted = decompose_diagonal(&phase, omega, 1, &flux, &supply).unwrap();

        let (_, z_act) = phase.strand_impedance_at(k, omega);
        let gain = c(0.0, -omega) / z_act;
        let hand = [gain * d, gain * (-d)];
        for (j, &by_hand) in hand.iter().enumerate() {
            let ps = predicted.deltas[&k][j];
            let ss = solved.deltas[&k][j];
            assert!((ps - by_hand).norm() < 1e-10 * by_hand.norm().max(1e-12));
            assert!(
                (ss - ps).norm() <= 1e-10 * ps.norm().max(1e-12),
                "strand {j}: solved {ss}, predicted {ps}"
            );
        }
        assert_eq!(predicted.shares[&k], c(5.0, 0.0));
    }

    #[test]
    fn detection_splits_symmetric_from_asymmetric() {
        let n = 3;
        // Symmetric: equal currents from a pure bundle drive.
        let flux = DVector::from_element(n, c(0.0, 0.0));
        let sol =
            solve_harmonic(&bordered_system(1, 100.0, identity_z(n), &flux, c(3.0, 0.0)).unwrap())
                .unwrap();
        let set = SolutionSet::new(100.0, vec![sol]).unwrap();
        let report = detect_circulating(&set);
        assert!(!report.detected, "{report}");

        // Asymmetric flux with zero bundle current: pure circulation.
        let flux = DVector::from_vec(vec![c(1.0, 0.0), c(-0.5, 0.0), c(-0.5, 0.0)]);
        let sol =
            solve_harmonic(&bordered_system(1, 100.0, identity_z(n), &flux, c(0.0, 0.0)).unwrap())
                .unwrap();
        let set = SolutionSet::new(100.0, vec![sol]).unwrap();
        let report = detect_circulating(&set);
        assert!(report.detected, "{report}");
        assert_eq!(report.harmonic, Some(1));
        assert_eq!(report.strand, Some(0));
        assert!(report.max_deviation > 0.0);
    }

    #[test]
    fn empty_drive_detects_nothing() {
        let flux = DVector::from_element(2, c(0.0, 0.0));
        let sol =
            solve_harmonic(&bordered_system(1, 100.0, identity_z(2), &flux, c(0.0, 0.0)).unwrap())
                .unwrap();
        let set = SolutionSet::new(100.0, vec![sol]).unwrap();
        let report = detect_circulating(&set);
        assert!(!report.detected);
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn solve_phase_fills_missing_harmonics_with_zeros() {
        use crate::assembly::{assemble_phase_from_description, Regime};
        use crate::winding::{MachineGeometry, Material, WindingMap};
        use std::collections::BTreeMap as Map;

        let desc = crate::winding::WindingDescription::new(
            MachineGeometry {
                l_active: 0.1,
                l_end_winding: 0.1,
                n_slots: 6,
                poles: 2,
                slots_per_pole_per_phase: Some(1),
            },
            Material::circular(5.8e7, 0.5e-3),
            2,
            vec![[0.0, 0.0], [3.0e-3, 0.0]],
            Map::new(),
            vec![WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap()],
            None,
        )
        .unwrap();
        let phase = assemble_phase_from_description(&desc).unwrap();
        let mut supply = Map::new();
        supply.insert(2u32, c(4.0, 0.0));
        let set =
            solve_phase(&phase, 314.0, 3, &Map::new(), &supply, Regime::Diagonal).unwrap();
        assert_eq!(set.len(), 3);
        // Harmonics 1 and 3 have no drive at all: currents are exactly zero.
        for k in [1u32, 3] {
            let sol = set.get(k).unwrap();
            assert!(sol.strand_currents.iter().all(|i| i.norm() == 0.0));
        }
        let sol = set.get(2).unwrap();
        assert!((sol.current_sum() - c(4.0, 0.0)).norm() < 1e-12);
    }
}
