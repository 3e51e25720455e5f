//! Winding geometry: machine dimensions, slot conductor layouts, and the
//! signed incidence maps that wire slot conductors into parallel strands.
//!
//! The model cross-section is 2-D: every conductor has an (x, y) position in
//! its slot, in meters. The axial direction enters only through the active
//! length `l_active` and the end-winding length `l_ew`; their ratio defines
//! [`AlphaW`], the parameter the loss law is stated against.
//!
//! A [`WindingMap`] per slot holds entries in {-1, 0, +1}: entry (c, s) is
//! nonzero when conductor `c` of that slot belongs to strand `s`, with the
//! sign giving the go/return direction of the coil side. Each conductor
//! belongs to at most one strand, so every row has at most one nonzero.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Axial and slot-count description of one machine phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineGeometry {
    /// Active (in-core) conductor length \[m\].
    pub l_active: f64,
    /// End-winding length outside the core \[m\]; links no slot flux.
    pub l_end_winding: f64,
    /// Total number of stator slots.
    pub n_slots: u32,
    /// Number of poles (p).
    pub poles: u32,
    /// Slots per pole per phase, when declared; checked against
    /// `n_slots = 3 * poles * spp` for three-phase windings.
    pub slots_per_pole_per_phase: Option<u32>,
}

impl MachineGeometry {
    /// End-winding ratio alpha_w = 1 + l_EW / l_active.
    pub fn alpha_w(&self) -> Result<AlphaW> {
        if !crate::is_positive_finite(self.l_active) {
            return Err(Error::InvalidGeometry(format!(
                "l_active must be positive and finite, got {}",
                self.l_active
            )));
        }
        if self.l_end_winding < 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "l_end_winding must be nonnegative, got {}",
                self.l_end_winding
            )));
        }
        AlphaW::new(1.0 + self.l_end_winding / self.l_active)
    }

    /// Structural checks that do not need the winding maps.
    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !crate::is_positive_finite(self.l_active) {
            out.push(Violation::NonPositiveLength { name: "l_active", value: self.l_active });
        }
        if self.l_end_winding < 0.0 {
            out.push(Violation::NonPositiveLength {
                name: "l_end_winding",
                value: self.l_end_winding,
            });
        }
        if self.n_slots == 0 {
            out.push(Violation::ZeroCount { name: "n_slots" });
        }
        if self.poles == 0 || self.poles % 2 != 0 {
            out.push(Violation::BadPoleCount { poles: self.poles });
        }
        if let Some(spp) = self.slots_per_pole_per_phase {
            if 3 * self.poles * spp != self.n_slots {
                out.push(Violation::SlotCountMismatch {
                    n_slots: self.n_slots,
                    poles: self.poles,
                    spp,
                });
            }
        }
        out
    }
}

/// End-winding ratio alpha_w = (half coil length) / (active length),
/// equal to 1 + l_EW / l_active. Always >= 1; equality means no end winding.
///
/// Circulating currents decay as 1/alpha_w and their losses as 1/alpha_w^2,
/// which is the property the sweep module verifies.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AlphaW(f64);

impl AlphaW {
    /// Validates alpha_w >= 1 (finite).
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 1.0 {
            return Err(Error::AlphaBelowOne(value));
        }
        Ok(AlphaW(value))
    }

    /// The ratio as a plain float.
    pub fn value(self) -> f64 {
        self.0
    }

    /// Full coil length 2 * alpha_w * l_active.
    pub fn coil_length(self, l_active: f64) -> f64 {
        2.0 * self.0 * l_active
    }
}

/// Cross-section positions of the conductors in one slot, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotLayout {
    /// Slot identifier (0-based around the bore).
    pub slot: u32,
    /// One (x, y) position per conductor, in meters.
    pub positions: Vec<[f64; 2]>,
}

impl SlotLayout {
    /// Number of conductor positions in this slot.
    pub fn n_conductors(&self) -> usize {
        self.positions.len()
    }
}

/// Euclidean distance between two conductors of one slot layout \[m\].
///
/// The distance from a conductor to itself is rejected rather than returned
/// as zero: the inductance formula takes its logarithm.
pub fn conductor_distance(layout: &SlotLayout, a: usize, b: usize) -> Result<f64> {
    let count = layout.positions.len();
    for &index in &[a, b] {
        if index >= count {
            return Err(Error::ConductorOutOfBounds { slot: layout.slot, index, count });
        }
    }
    if a == b {
        return Err(Error::SelfDistance { slot: layout.slot, index: a });
    }
    let pa = layout.positions[a];
    let pb = layout.positions[b];
    Ok(((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt())
}

/// Signed incidence map of one slot: which conductor belongs to which strand
/// and with which coil-side direction.
///
/// Stored dense and row-major (`n_conductors` rows by `n_strands` columns)
/// with entries in {-1, 0, +1}; each row carries at most one nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingMap {
    /// Slot this map describes.
    pub slot: u32,
    n_conductors: usize,
    n_strands: usize,
    entries: Vec<i8>,
}

impl WindingMap {
    /// Builds a map from sparse (conductor, strand, sign) triplets.
    pub fn from_triplets(
        slot: u32,
        n_conductors: usize,
        n_strands: usize,
        triplets: &[(usize, usize, i8)],
    ) -> Result<Self> {
        if n_strands == 0 {
            return Err(Error::InvalidWinding("n_strands must be at least 1".into()));
        }
        let mut entries = vec![0i8; n_conductors * n_strands];
        for &(conductor, strand, sign) in triplets {
            if conductor >= n_conductors {
                return Err(Error::InvalidWinding(format!(
                    "slot {slot}: conductor {conductor} out of range (n_conductors = {n_conductors})"
                )));
            }
            if strand >= n_strands {
                return Err(Error::InvalidWinding(format!(
                    "slot {slot}: strand {strand} out of range (n_strands = {n_strands})"
                )));
            }
            if sign != 1 && sign != -1 {
                return Err(Error::InvalidWinding(format!(
                    "slot {slot}: sign for conductor {conductor} must be +1 or -1, got {sign}"
                )));
            }
            let row = &mut entries[conductor * n_strands..(conductor + 1) * n_strands];
            if row.iter().any(|&e| e != 0) {
                return Err(Error::InvalidWinding(format!(
                    "slot {slot}: conductor {conductor} assigned to more than one strand"
                )));
            }
            row[strand] = sign;
        }
        Ok(WindingMap { slot, n_conductors, n_strands, entries })
    }

    /// Number of conductor rows.
    pub fn n_conductors(&self) -> usize {
        self.n_conductors
    }

    /// Number of strand columns.
    pub fn n_strands(&self) -> usize {
        self.n_strands
    }

    /// Entry at (conductor, strand).
    pub fn entry(&self, conductor: usize, strand: usize) -> i8 {
        self.entries[conductor * self.n_strands + strand]
    }

    /// Sparse view: (conductor, strand, sign) triplets in row order.
    pub fn triplets(&self) -> Vec<(usize, usize, i8)> {
        let mut out = Vec::new();
        for c in 0..self.n_conductors {
            for s in 0..self.n_strands {
                let e = self.entry(c, s);
                if e != 0 {
                    out.push((c, s, e));
                }
            }
        }
        out
    }

    /// Number of conductors assigned to each strand in this slot.
    pub fn conductors_per_strand(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_strands];
        for c in 0..self.n_conductors {
            for (s, count) in counts.iter_mut().enumerate() {
                if self.entry(c, s) != 0 {
                    *count += 1;
                }
            }
        }
        counts
    }

    /// Congruence transform M^T * X * M with this map as M (dimension
    /// n_conductors x n_strands), producing an n_strands x n_strands matrix.
    pub fn congruence(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.nrows() != self.n_conductors || x.ncols() != self.n_conductors {
            return Err(Error::DimensionMismatch(format!(
                "slot {}: matrix is {}x{}, map expects {}x{}",
                self.slot,
                x.nrows(),
                x.ncols(),
                self.n_conductors,
                self.n_conductors
            )));
        }
        let m = self.as_dense();
        Ok(m.transpose() * x * m)
    }

    /// Folds a per-conductor complex vector into a per-strand vector: M^T v.
    pub fn fold(&self, v: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        if v.len() != self.n_conductors {
            return Err(Error::DimensionMismatch(format!(
                "slot {}: vector has {} entries, map expects {}",
                self.slot,
                v.len(),
                self.n_conductors
            )));
        }
        let mut out = DVector::from_element(self.n_strands, Complex64::new(0.0, 0.0));
        for c in 0..self.n_conductors {
            for s in 0..self.n_strands {
                let e = self.entry(c, s);
                if e != 0 {
                    out[s] += f64::from(e) * v[c];
                }
            }
        }
        Ok(out)
    }

    /// Dense f64 copy of the map, for congruence products.
    pub fn as_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_conductors, self.n_strands, |c, s| f64::from(self.entry(c, s)))
    }
}

/// Strand material and cross-section data.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    /// Electrical conductivity sigma [S/m].
    pub conductivity: f64,
    /// Strand radius \[m\]; reference radius of the log-distance inductance.
    pub strand_radius: f64,
    /// Strand cross-section area [m^2]; defaults to pi * r^2 when built via
    /// [`Material::circular`].
    pub cross_section: f64,
}

impl Material {
    /// Circular strand: cross-section derived from the radius.
    pub fn circular(conductivity: f64, strand_radius: f64) -> Self {
        Material {
            conductivity,
            strand_radius,
            cross_section: std::f64::consts::PI * strand_radius * strand_radius,
        }
    }

    fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, value) in [
            ("conductivity", self.conductivity),
            ("strand_radius", self.strand_radius),
            ("cross_section", self.cross_section),
        ] {
            if !crate::is_positive_finite(value) {
                out.push(Violation::NonPositiveLength { name, value });
            }
        }
        out
    }
}

/// Complete phase winding description: geometry, material, conductor
/// layouts, and the strand incidence maps.
#[derive(Debug, Clone, PartialEq)]
pub struct WindingDescription {
    pub geometry: MachineGeometry,
    pub material: Material,
    /// Number of parallel strands Nsh in the bundle.
    pub n_strands: usize,
    /// Conductors per slot (rows of every map and layout).
    pub n_conductors_per_slot: usize,
    /// Materialized per-slot layouts for every slot that carries a map.
    layouts: BTreeMap<u32, SlotLayout>,
    /// One incidence map per slot that carries phase conductors.
    maps: Vec<WindingMap>,
    /// Declared parallel-slot-group count, when the winding is built from
    /// groups of slots in parallel; enables the strand-count consistency
    /// check n_strands = groups * strands_per_slot.
    pub parallel_slot_groups: Option<u32>,
}

impl WindingDescription {
    /// Assembles a description from a default layout (shared by all mapped
    /// slots), optional per-slot layout overrides, and per-slot maps.
    pub fn new(
        geometry: MachineGeometry,
        material: Material,
        n_strands: usize,
        default_positions: Vec<[f64; 2]>,
        overrides: BTreeMap<u32, Vec<[f64; 2]>>,
        maps: Vec<WindingMap>,
        parallel_slot_groups: Option<u32>,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidWinding("winding has no slot maps".into()));
        }
        let n_conductors_per_slot = default_positions.len();
        let mut layouts = BTreeMap::new();
        let mut seen = BTreeMap::new();
        for map in &maps {
            if seen.insert(map.slot, ()).is_some() {
                return Err(Error::InvalidWinding(format!(
                    "slot {} appears in more than one map",
                    map.slot
                )));
            }
            let positions = overrides.get(&map.slot).cloned().unwrap_or_else(|| default_positions.clone());
            layouts.insert(map.slot, SlotLayout { slot: map.slot, positions });
        }
        Ok(WindingDescription {
            geometry,
            material,
            n_strands,
            n_conductors_per_slot,
            layouts,
            maps,
            parallel_slot_groups,
        })
    }

    /// The per-slot incidence maps, ordered as supplied.
    pub fn maps(&self) -> &[WindingMap] {
        &self.maps
    }

    /// Layout of one mapped slot.
    pub fn layout(&self, slot: u32) -> Option<&SlotLayout> {
        self.layouts.get(&slot)
    }

    /// All mapped slots in ascending order.
    pub fn slots(&self) -> impl Iterator<Item = u32> + '_ {
        self.maps.iter().map(|m| m.slot)
    }

    /// End-winding ratio of the described geometry.
    pub fn alpha_w(&self) -> Result<AlphaW> {
        self.geometry.alpha_w()
    }

    /// Turns per strand when uniform across strands and slots: the number of
    /// conductors each strand contributes to one slot. `None` when strands
    /// differ (reported, never used in a formula).
    pub fn turns_per_strand_per_slot(&self) -> Option<usize> {
        let mut turns = None;
        for map in &self.maps {
            for count in map.conductors_per_strand() {
                if count == 0 {
                    continue;
                }
                match turns {
                    None => turns = Some(count),
                    Some(t) if t != count => return None,
                    _ => {}
                }
            }
        }
        turns
    }
}

/// One structural defect found by [`validate_winding`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A length or material constant that must be positive is not.
    NonPositiveLength { name: &'static str, value: f64 },
    /// A count that must be nonzero is zero.
    ZeroCount { name: &'static str },
    /// Pole count is zero or odd.
    BadPoleCount { poles: u32 },
    /// n_slots disagrees with 3 * poles * spp.
    SlotCountMismatch { n_slots: u32, poles: u32, spp: u32 },
    /// Slot id at or beyond n_slots.
    SlotOutOfRange { slot: u32, n_slots: u32 },
    /// Layout conductor count differs from the declared conductors per slot.
    LayoutSizeMismatch { slot: u32, expected: usize, got: usize },
    /// Map dimensions differ from the declared conductor/strand counts.
    MapShapeMismatch { slot: u32, expected_rows: usize, rows: usize, expected_cols: usize, cols: usize },
    /// Two conductors closer than one strand diameter (overlap), or
    /// coincident (which would make the inductance matrix singular).
    ConductorOverlap { slot: u32, a: usize, b: usize, distance: f64, minimum: f64 },
    /// A strand that no slot map references.
    OrphanStrand { strand: usize },
    /// Declared parallel grouping inconsistent with the maps
    /// (groups * strands-with-conductors-in-slot != n_strands).
    ParallelGroupMismatch { slot: u32, groups: u32, strands_in_slot: usize, n_strands: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonPositiveLength { name, value } => {
                write!(f, "{name} must be positive and finite, got {value}")
            }
            Violation::ZeroCount { name } => write!(f, "{name} must be nonzero"),
            Violation::BadPoleCount { poles } => {
                write!(f, "poles must be a positive even number, got {poles}")
            }
            Violation::SlotCountMismatch { n_slots, poles, spp } => write!(
                f,
                "n_slots = {n_slots} but 3 * poles * spp = {}",
                3 * poles * spp
            ),
            Violation::SlotOutOfRange { slot, n_slots } => {
                write!(f, "slot {slot} out of range (n_slots = {n_slots})")
            }
            Violation::LayoutSizeMismatch { slot, expected, got } => {
                write!(f, "slot {slot} layout has {got} positions, expected {expected}")
            }
            Violation::MapShapeMismatch { slot, expected_rows, rows, expected_cols, cols } => write!(
                f,
                "slot {slot} map is {rows}x{cols}, expected {expected_rows}x{expected_cols}"
            ),
            Violation::ConductorOverlap { slot, a, b, distance, minimum } => write!(
                f,
                "slot {slot}: conductors {a} and {b} overlap (distance {distance:.6e} m < {minimum:.6e} m)"
            ),
            Violation::OrphanStrand { strand } => {
                write!(f, "strand {strand} appears in no slot map")
            }
            Violation::ParallelGroupMismatch { slot, groups, strands_in_slot, n_strands } => write!(
                f,
                "slot {slot}: {groups} parallel slot groups x {strands_in_slot} strands in slot != {n_strands} strands"
            ),
        }
    }
}

/// Outcome of [`validate_winding`]: empty means structurally valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, violation) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{violation}")?;
        }
        Ok(())
    }
}

/// Structural validation: geometry sanity, layout sizes, conductor overlap,
/// map shapes and row cardinality, orphan strands, parallel-group
/// consistency. Returns every violation found rather than stopping at the
/// first, so `check` runs can report the full list.
pub fn validate_winding(desc: &WindingDescription) -> ValidationReport {
    let mut v = Vec::new();
    v.extend(desc.geometry.violations());
    v.extend(desc.material.violations());
    if desc.n_strands == 0 {
        v.push(Violation::ZeroCount { name: "n_strands" });
    }
    if desc.n_conductors_per_slot == 0 {
        v.push(Violation::ZeroCount { name: "n_conductors_per_slot" });
    }

    let min_distance = 2.0 * desc.material.strand_radius;
    for map in desc.maps() {
        if map.slot >= desc.geometry.n_slots {
            v.push(Violation::SlotOutOfRange { slot: map.slot, n_slots: desc.geometry.n_slots });
        }
        if map.n_conductors() != desc.n_conductors_per_slot || map.n_strands() != desc.n_strands {
            v.push(Violation::MapShapeMismatch {
                slot: map.slot,
                expected_rows: desc.n_conductors_per_slot,
                rows: map.n_conductors(),
                expected_cols: desc.n_strands,
                cols: map.n_strands(),
            });
        }
        if let Some(layout) = desc.layout(map.slot) {
            if layout.n_conductors() != desc.n_conductors_per_slot {
                v.push(Violation::LayoutSizeMismatch {
                    slot: map.slot,
                    expected: desc.n_conductors_per_slot,
                    got: layout.n_conductors(),
                });
            }
            for a in 0..layout.n_conductors() {
                for b in (a + 1)..layout.n_conductors() {
                    let d = conductor_distance(layout, a, b).unwrap_or(0.0);
                    if d < min_distance {
                        v.push(Violation::ConductorOverlap {
                            slot: map.slot,
                            a,
                            b,
                            distance: d,
                            minimum: min_distance,
                        });
                    }
                }
            }
        }
        if let Some(groups) = desc.parallel_slot_groups {
            let strands_in_slot =
                map.conductors_per_strand().iter().filter(|&&c| c > 0).count();
            if groups as usize * strands_in_slot != desc.n_strands {
                v.push(Violation::ParallelGroupMismatch {
                    slot: map.slot,
                    groups,
                    strands_in_slot,
                    n_strands: desc.n_strands,
                });
            }
        }
    }

    // Orphan strands: no conductor in any slot.
    let mut referenced = vec![false; desc.n_strands];
    for map in desc.maps() {
        for (_, s, _) in map.triplets() {
            if s < referenced.len() {
                referenced[s] = true;
            }
        }
    }
    for (strand, seen) in referenced.iter().enumerate() {
        if !seen {
            v.push(Violation::OrphanStrand { strand });
        }
    }

    ValidationReport { violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(l_active: f64, l_ew: f64) -> MachineGeometry {
        MachineGeometry {
            l_active,
            l_end_winding: l_ew,
            n_slots: 36,
            poles: 6,
            slots_per_pole_per_phase: Some(2),
        }
    }

    #[test]
    fn alpha_w_from_end_winding_lengths() {
        assert_eq!(geometry(0.1, 0.0).alpha_w().unwrap().value(), 1.0);
        assert_eq!(geometry(0.1, 0.1).alpha_w().unwrap().value(), 2.0);
        assert_eq!(geometry(0.1, 0.2).alpha_w().unwrap().value(), 3.0);
    }

    #[test]
    fn alpha_w_rejects_bad_lengths() {
        assert!(geometry(0.0, 0.1).alpha_w().is_err());
        assert!(geometry(-1.0, 0.1).alpha_w().is_err());
        assert!(geometry(0.1, -0.1).alpha_w().is_err());
        assert!(AlphaW::new(0.5).is_err());
        assert!(AlphaW::new(f64::NAN).is_err());
    }

    #[test]
    fn alpha_w_is_scale_invariant() {
        // Scaling both lengths by any factor leaves the ratio unchanged.
        let base = geometry(0.1, 0.25).alpha_w().unwrap().value();
        for scale in [0.01, 0.5, 3.0, 1000.0] {
            let scaled = geometry(0.1 * scale, 0.25 * scale).alpha_w().unwrap().value();
            assert!(
                (scaled - base).abs() <= 1e-12 * base,
                "scale {scale}: {scaled} vs {base}"
            );
        }
    }

    #[test]
    fn coil_length_doubles_active_length_at_unity() {
        let alpha = AlphaW::new(1.0).unwrap();
        assert_eq!(alpha.coil_length(0.2), 0.4);
        let alpha = AlphaW::new(2.5).unwrap();
        assert!((alpha.coil_length(0.1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conductor_distance_345_triangle() {
        let layout = SlotLayout { slot: 0, positions: vec![[0.0, 0.0], [3.0e-3, 4.0e-3]] };
        let d = conductor_distance(&layout, 0, 1).unwrap();
        assert!((d - 5.0e-3).abs() < 1e-18, "got {d}");
    }

    #[test]
    fn conductor_distance_rejects_self_and_out_of_bounds() {
        let layout = SlotLayout { slot: 7, positions: vec![[0.0, 0.0], [1.0, 0.0]] };
        assert!(matches!(
            conductor_distance(&layout, 1, 1),
            Err(Error::SelfDistance { slot: 7, index: 1 })
        ));
        assert!(matches!(
            conductor_distance(&layout, 0, 2),
            Err(Error::ConductorOutOfBounds { slot: 7, index: 2, count: 2 })
        ));
    }

    #[test]
    fn conductor_distance_symmetry_and_triangle_inequality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for _ in 0..100 {
            let n = rng.gen_range(3..12);
            let positions: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)])
                .collect();
            let layout = SlotLayout { slot: 0, positions };
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    let dab = conductor_distance(&layout, a, b).unwrap();
                    let dba = conductor_distance(&layout, b, a).unwrap();
                    assert_eq!(dab, dba, "distance must be symmetric");
                    for c in 0..n {
                        if c == a || c == b {
                            continue;
                        }
                        let dac = conductor_distance(&layout, a, c).unwrap();
                        let dcb = conductor_distance(&layout, c, b).unwrap();
                        assert!(
                            dab <= dac + dcb + 1e-15,
                            "triangle inequality violated: {dab} > {dac} + {dcb}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn winding_map_rejects_double_assignment_and_bad_signs() {
        assert!(WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (0, 1, 1)]).is_err());
        assert!(WindingMap::from_triplets(0, 2, 2, &[(0, 0, 2)]).is_err());
        assert!(WindingMap::from_triplets(0, 2, 2, &[(2, 0, 1)]).is_err());
        assert!(WindingMap::from_triplets(0, 2, 2, &[(0, 2, 1)]).is_err());
    }

    #[test]
    fn winding_map_round_trips_triplets() {
        let triplets = vec![(0usize, 1usize, 1i8), (1, 0, -1), (3, 1, -1)];
        let map = WindingMap::from_triplets(4, 4, 2, &triplets).unwrap();
        assert_eq!(map.triplets(), triplets);
        assert_eq!(map.entry(0, 1), 1);
        assert_eq!(map.entry(1, 0), -1);
        assert_eq!(map.entry(2, 0), 0);
        assert_eq!(map.conductors_per_strand(), vec![1, 2]);
    }

    fn tiny_description(positions: Vec<[f64; 2]>, maps: Vec<WindingMap>) -> WindingDescription {
        WindingDescription::new(
            MachineGeometry {
                l_active: 0.1,
                l_end_winding: 0.1,
                n_slots: 4,
                poles: 2,
                slots_per_pole_per_phase: None,
            },
            Material::circular(5.8e7, 0.5e-3),
            2,
            positions,
            BTreeMap::new(),
            maps,
            None,
        )
        .unwrap()
    }

    #[test]
    fn validate_accepts_a_clean_winding() {
        let maps = vec![
            WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap(),
            WindingMap::from_triplets(2, 2, 2, &[(0, 0, -1), (1, 1, -1)]).unwrap(),
        ];
        let desc = tiny_description(vec![[0.0, 0.0], [2.0e-3, 0.0]], maps);
        let report = validate_winding(&desc);
        assert!(report.is_valid(), "unexpected violations: {report}");
    }

    #[test]
    fn validate_flags_overlap_orphan_and_shape() {
        // Coincident conductors, strand 1 never referenced, map too small.
        let maps = vec![WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 0, 1)]).unwrap()];
        let desc = tiny_description(vec![[0.0, 0.0], [0.0, 0.0]], maps);
        let report = validate_winding(&desc);
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ConductorOverlap { a: 0, b: 1, .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OrphanStrand { strand: 1 })));
    }

    #[test]
    fn validate_checks_slot_count_against_pole_count() {
        let mut geo = geometry(0.1, 0.1);
        geo.n_slots = 35; // 3 * 6 * 2 = 36 expected
        let desc = WindingDescription::new(
            geo,
            Material::circular(5.8e7, 0.5e-3),
            2,
            vec![[0.0, 0.0], [2.0e-3, 0.0]],
            BTreeMap::new(),
            vec![WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap()],
            None,
        )
        .unwrap();
        let report = validate_winding(&desc);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::SlotCountMismatch { n_slots: 35, .. })));
    }

    #[test]
    fn validate_checks_parallel_group_consistency() {
        let maps = vec![WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap()];
        let mut desc = tiny_description(vec![[0.0, 0.0], [2.0e-3, 0.0]], maps);
        desc.parallel_slot_groups = Some(1);
        assert!(validate_winding(&desc).is_valid());
        desc.parallel_slot_groups = Some(2); // 2 groups x 2 strands-in-slot != 2 strands
        assert!(!validate_winding(&desc).is_valid());
    }

    #[test]
    fn turns_per_strand_reported_when_uniform() {
        let maps = vec![WindingMap::from_triplets(
            0,
            4,
            2,
            &[(0, 0, 1), (1, 1, 1), (2, 0, 1), (3, 1, 1)],
        )
        .unwrap()];
        let desc = WindingDescription::new(
            MachineGeometry {
                l_active: 0.1,
                l_end_winding: 0.0,
                n_slots: 4,
                poles: 2,
                slots_per_pole_per_phase: None,
            },
            Material::circular(5.8e7, 0.4e-3),
            2,
            vec![[0.0, 0.0], [2.0e-3, 0.0], [0.0, 2.0e-3], [2.0e-3, 2.0e-3]],
            BTreeMap::new(),
            maps,
            None,
        )
        .unwrap();
        assert_eq!(desc.turns_per_strand_per_slot(), Some(2));
    }
}
