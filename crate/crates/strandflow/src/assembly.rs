//! Per-slot and per-phase impedance assembly, and the bordered per-harmonic
//! systems the solver consumes.
//!
//! Resistance of one slot's conductors is diagonal, `l_cond / (sigma * S)`.
//! Inductance uses the 2-D log-potential (partial inductance) convention:
//! diagonal entries `-mu0 * l_cond / (8 pi)` and off-diagonal entries
//! `-(mu0 * l_cond / (4 pi)) * [ln(d^2 / r^2) + 1]` for conductor distance
//! `d` and strand radius `r`. These entries share an arbitrary potential
//! reference, so only differences between strands are physical; the solver's
//! bordered formulation makes strand currents invariant under adding any
//! constant to every inductance entry (see the gauge test in `solver`).
//!
//! Slot matrices are folded into strand space by the congruence transforms
//! `M^T X M` with the per-slot winding maps `M`, summed over slots. The sums
//! cover only the active length; end windings link no slot flux and enter as
//! a uniform diagonal impedance increment `(alpha_w - 1) * Z_strd_act_k` so
//! that each strand's total self-impedance is `alpha_w` times its
//! active-part value.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::winding::{conductor_distance, AlphaW, SlotLayout, WindingDescription};

/// Vacuum permeability [H/m], exactly 4 pi x 10^-7 in this model.
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;

/// Which impedance structure the per-harmonic systems use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Uniform diagonal impedance `alpha_w * Z_strd_act_k * I`: the regime in
    /// which the inverse-square loss law is exact and the closed-form
    /// inverse applies.
    Diagonal,
    /// Full assembled matrices including mutual inductance, plus the
    /// end-winding diagonal increment.
    Full,
}

impl Regime {
    /// Stable lowercase name used in configs and reports.
    pub fn name(self) -> &'static str {
        match self {
            Regime::Diagonal => "diagonal",
            Regime::Full => "full",
        }
    }

    /// Parses the config-file spelling.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(Regime::Diagonal),
            "full" => Ok(Regime::Full),
            other => Err(Error::Config(format!(
                "regime must be \"diagonal\" or \"full\", got \"{other}\""
            ))),
        }
    }
}

/// Resistance and inductance matrices of one slot's conductors.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotMatrices {
    /// Slot these matrices belong to.
    pub slot: u32,
    /// Diagonal conductor resistance matrix \[ohm\].
    pub resistance: DMatrix<f64>,
    /// Symmetric conductor inductance matrix \[H\].
    pub inductance: DMatrix<f64>,
}

/// Diagonal slot resistance matrix: every entry `l_cond / (sigma * S)`.
pub fn slot_resistance_matrix(
    n_conductors: usize,
    conductivity: f64,
    cross_section: f64,
    l_cond: f64,
) -> Result<DMatrix<f64>> {
    for (name, value) in [
        ("conductivity", conductivity),
        ("cross_section", cross_section),
        ("l_cond", l_cond),
    ] {
        if !crate::is_positive_finite(value) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive and finite, got {value}"
            )));
        }
    }
    let r = l_cond / (conductivity * cross_section);
    Ok(DMatrix::from_diagonal(&DVector::from_element(n_conductors, r)))
}

/// Symmetric slot inductance matrix in the shared-reference log-distance
/// convention. Fails when two distinct conductors coincide (log of zero).
pub fn slot_inductance_matrix(
    layout: &SlotLayout,
    strand_radius: f64,
    l_cond: f64,
) -> Result<DMatrix<f64>> {
    if !crate::is_positive_finite(strand_radius) || !crate::is_positive_finite(l_cond) {
        return Err(Error::InvalidParameter(format!(
            "strand_radius and l_cond must be positive and finite, got {strand_radius} and {l_cond}"
        )));
    }
    let n = layout.n_conductors();
    let diag = -MU0 * l_cond / (8.0 * std::f64::consts::PI);
    let off_scale = -MU0 * l_cond / (4.0 * std::f64::consts::PI);
    let mut out = DMatrix::from_element(n, n, 0.0);
    for a in 0..n {
        out[(a, a)] = diag;
        for b in (a + 1)..n {
            let d = conductor_distance(layout, a, b)?;
            if d == 0.0 {
                return Err(Error::SingularLayout { slot: layout.slot, a, b });
            }
            let value = off_scale * ((d * d / (strand_radius * strand_radius)).ln() + 1.0);
            out[(a, b)] = value;
            out[(b, a)] = value;
        }
    }
    Ok(out)
}

/// Builds both slot matrices for one mapped slot of a winding, over the
/// active length.
pub fn slot_matrices(desc: &WindingDescription, slot: u32) -> Result<SlotMatrices> {
    let layout = desc
        .layout(slot)
        .ok_or_else(|| Error::InvalidWinding(format!("slot {slot} has no layout")))?;
    let resistance = slot_resistance_matrix(
        layout.n_conductors(),
        desc.material.conductivity,
        desc.material.cross_section,
        desc.geometry.l_active,
    )?;
    let inductance =
        slot_inductance_matrix(layout, desc.material.strand_radius, desc.geometry.l_active)?;
    Ok(SlotMatrices { slot, resistance, inductance })
}

/// Strand-space impedance description of one phase.
///
/// `resistance` and `inductance` are the active-part congruence sums
/// `sum_i M_i^T R_i M_i` and `sum_i M_i^T L_i M_i`. The scalar strand
/// impedance of the full coil is `alpha_w` times the active-part scalar,
/// read off the mean of the active diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSystem {
    /// Number of parallel strands Nsh.
    pub n_strands: usize,
    /// End-winding ratio used for the full-coil quantities.
    pub alpha: AlphaW,
    /// Active-part strand resistance matrix R_A \[ohm\].
    pub resistance: DMatrix<f64>,
    /// Active-part strand inductance matrix L_A \[H\].
    pub inductance: DMatrix<f64>,
    /// Active-part per-strand scalar resistance \[ohm\] (mean of diag(R_A)).
    pub strand_resistance_active: f64,
    /// Active-part per-strand scalar self-inductance \[H\] (mean of diag(L_A)).
    pub strand_inductance_active: f64,
}

impl PhaseSystem {
    /// Full-coil per-strand resistance `alpha_w * R_strd_act` \[ohm\].
    pub fn strand_resistance(&self) -> f64 {
        self.alpha.value() * self.strand_resistance_active
    }

    /// Full-coil per-strand self-inductance `alpha_w * L_strd_act` \[H\].
    pub fn strand_inductance(&self) -> f64 {
        self.alpha.value() * self.strand_inductance_active
    }

    /// Same active-part matrices under a different end-winding ratio: the
    /// sweep's way of varying l_EW with the active geometry fixed.
    pub fn with_alpha(&self, alpha: AlphaW) -> PhaseSystem {
        PhaseSystem { alpha, ..self.clone() }
    }

    /// Scalar strand impedance pair (full coil, active part) at harmonic k.
    /// The active value is built from the active-part scalars directly, so
    /// it does not move when only `alpha` changes (a sweep invariant).
    pub fn strand_impedance_at(&self, k: u32, omega: f64) -> (Complex64, Complex64) {
        let z_act = Complex64::new(
            self.strand_resistance_active,
            f64::from(k) * omega * self.strand_inductance_active,
        );
        (Complex64::from(self.alpha.value()) * z_act, z_act)
    }

    /// Strand-space impedance matrix `Z_A_k` at harmonic k under the given
    /// regime. In the full regime the end-winding increment
    /// `(alpha_w - 1) * Z_strd_act_k` is added to the active-part diagonal;
    /// in the diagonal regime the matrix is `alpha_w * Z_strd_act_k * I`.
    pub fn impedance_matrix(&self, k: u32, omega: f64, regime: Regime) -> DMatrix<Complex64> {
        let n = self.n_strands;
        let (_, z_act) = self.strand_impedance_at(k, omega);
        match regime {
            Regime::Diagonal => {
                let z = Complex64::from(self.alpha.value()) * z_act;
                DMatrix::from_fn(n, n, |r, c| if r == c { z } else { Complex64::new(0.0, 0.0) })
            }
            Regime::Full => {
                let jk_omega = Complex64::new(0.0, f64::from(k) * omega);
                let increment = Complex64::from(self.alpha.value() - 1.0) * z_act;
                DMatrix::from_fn(n, n, |r, c| {
                    let active = Complex64::from(self.resistance[(r, c)])
                        + jk_omega * Complex64::from(self.inductance[(r, c)]);
                    if r == c {
                        active + increment
                    } else {
                        active
                    }
                })
            }
        }
    }
}

/// Scalar strand impedances at harmonic k: the full-coil value
/// `R_strd + j k omega L_strd` and the active-part value, which is exactly
/// the full value divided by alpha_w.
pub fn strand_impedance(
    r_strand: f64,
    l_strand: f64,
    k: u32,
    omega: f64,
    alpha: AlphaW,
) -> (Complex64, Complex64) {
    let z_full = Complex64::new(r_strand, f64::from(k) * omega * l_strand);
    (z_full, z_full / Complex64::from(alpha.value()))
}

/// Folds per-slot matrices into the phase-level system via the winding
/// maps: `R_A = sum_i M_i^T R_i M_i` and likewise for `L_A`.
pub fn assemble_phase(desc: &WindingDescription, slots: &[SlotMatrices]) -> Result<PhaseSystem> {
    let n = desc.n_strands;
    let mut resistance = DMatrix::from_element(n, n, 0.0);
    let mut inductance = DMatrix::from_element(n, n, 0.0);
    for map in desc.maps() {
        let matrices = slots
            .iter()
            .find(|m| m.slot == map.slot)
            .ok_or_else(|| {
                Error::DimensionMismatch(format!("no slot matrices supplied for slot {}", map.slot))
            })?;
        if map.n_strands() != n {
            return Err(Error::DimensionMismatch(format!(
                "slot {} map has {} strand columns, phase has {}",
                map.slot,
                map.n_strands(),
                n
            )));
        }
        resistance += map.congruence(&matrices.resistance)?;
        inductance += map.congruence(&matrices.inductance)?;
    }
    let alpha = desc.alpha_w()?;
    let strand_resistance_active = resistance.diagonal().mean();
    let strand_inductance_active = inductance.diagonal().mean();
    Ok(PhaseSystem {
        n_strands: n,
        alpha,
        resistance,
        inductance,
        strand_resistance_active,
        strand_inductance_active,
    })
}

/// Builds slot matrices for every mapped slot, then assembles the phase.
pub fn assemble_phase_from_description(desc: &WindingDescription) -> Result<PhaseSystem> {
    let mut slots = Vec::new();
    for slot in desc.slots() {
        slots.push(slot_matrices(desc, slot)?);
    }
    assemble_phase(desc, &slots)
}

/// One harmonic's bordered linear system.
///
/// The matrix is `(Nsh+1) x (Nsh+1)`: the strand impedance block `Z_A_k`
/// bordered by a row and column of ones (zero corner). The border row is
/// the total-current constraint `sum_j I_jk = I_bundle_k`; the border
/// column carries the shared potential difference `delta_phi_k` every
/// strand sees. The right-hand side is `[-j k omega phi_A_k ; I_bundle_k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSystem {
    /// Harmonic order (1 = fundamental).
    pub k: u32,
    /// Fundamental angular frequency [rad/s].
    pub omega: f64,
    /// Bordered system matrix.
    pub matrix: DMatrix<Complex64>,
    /// Right-hand side.
    pub rhs: DVector<Complex64>,
    /// Bundle current phasor at this harmonic [A RMS].
    pub bundle_current: Complex64,
}

impl HarmonicSystem {
    /// Number of strands (system dimension minus the border).
    pub fn n_strands(&self) -> usize {
        self.matrix.nrows() - 1
    }
}

/// Borders an arbitrary strand impedance matrix into the per-harmonic
/// system. Exposed separately so tests and tools can drive the solver with
/// hand-built impedance matrices.
pub fn bordered_system(
    k: u32,
    omega: f64,
    z: DMatrix<Complex64>,
    phase_flux: &DVector<Complex64>,
    bundle_current: Complex64,
) -> Result<HarmonicSystem> {
    let n = z.nrows();
    if z.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "impedance matrix must be square, got {}x{}",
            z.nrows(),
            z.ncols()
        )));
    }
    if phase_flux.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "phase flux has {} entries, impedance matrix is {n}x{n}",
            phase_flux.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("harmonic order k must be >= 1".into()));
    }
    if !crate::is_positive_finite(omega) {
        return Err(Error::InvalidParameter(format!(
            "omega must be positive and finite, got {omega}"
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut matrix = DMatrix::from_element(n + 1, n + 1, zero);
    matrix.view_mut((0, 0), (n, n)).copy_from(&z);
    for j in 0..n {
        matrix[(j, n)] = one;
        matrix[(n, j)] = one;
    }
    let jk_omega = Complex64::new(0.0, f64::from(k) * omega);
    let mut rhs = DVector::from_element(n + 1, zero);
    for j in 0..n {
        rhs[j] = -jk_omega * phase_flux[j];
    }
    rhs[n] = bundle_current;
    Ok(HarmonicSystem { k, omega, matrix, rhs, bundle_current })
}

/// Assembles the per-harmonic bordered system for a phase under the given
/// regime, flux vector, and bundle current.
pub fn build_harmonic_system(
    phase: &PhaseSystem,
    k: u32,
    omega: f64,
    phase_flux: &DVector<Complex64>,
    bundle_current: Complex64,
    regime: Regime,
) -> Result<HarmonicSystem> {
    let z = phase.impedance_matrix(k, omega, regime);
    bordered_system(k, omega, z, phase_flux, bundle_current)
}
