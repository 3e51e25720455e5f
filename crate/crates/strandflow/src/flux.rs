//! Magnetic vector-potential data and the flux linkages derived from it.
//!
//! The field enters the model as per-conductor phasors of the axial vector
//! potential `A_z` [Wb/m], one per (slot, conductor, harmonic). Conductor
//! flux over the active length is `phi = l_active * A_z`; strand-level flux
//! is the winding-map fold `phi_A_k = sum_i M_i^T phi_i_k`.
//!
//! Harmonic scope: the harmonics a field carries define where coverage is
//! enforced. For an in-scope harmonic every mapped (slot, conductor) pair
//! must have a value — a gap is an error naming the missing entry, because a
//! silent zero there would fabricate flux asymmetry. Harmonics the field
//! does not carry at all contribute exactly zero flux, which lets a supply
//! harmonic exist without any field at that order (it then drives only the
//! uniform bundle share).
//!
//! Fields come from either a synthetic per-slot model (uniform value plus a
//! linear in-slot gradient, rotated slot to slot by the pole-pair angle) or
//! a strict five-column text file produced by an upstream field solver.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::winding::WindingDescription;

/// Per-conductor vector-potential phasors, keyed by harmonic order then by
/// (slot, conductor).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VectorPotentialField {
    entries: BTreeMap<u32, BTreeMap<(u32, usize), Complex64>>,
}

impl VectorPotentialField {
    /// Empty field: every harmonic out of scope, all flux zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets the phasor for one (slot, conductor, harmonic). Returns the
    /// previous value when overwriting.
    pub fn insert(
        &mut self,
        slot: u32,
        conductor: usize,
        k: u32,
        value: Complex64,
    ) -> Option<Complex64> {
        self.entries.entry(k).or_default().insert((slot, conductor), value)
    }

    /// Harmonic orders this field carries, ascending.
    pub fn harmonics(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.keys().copied()
    }

    /// Highest harmonic order carried, or 0 for an empty field.
    pub fn max_harmonic(&self) -> u32 {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    /// True when the field carries harmonic `k`.
    pub fn in_scope(&self, k: u32) -> bool {
        self.entries.contains_key(&k)
    }

    /// Phasor at one (slot, conductor, harmonic). Out-of-scope harmonics
    /// are zero; an in-scope harmonic missing this conductor is an error.
    pub fn value(&self, slot: u32, conductor: usize, k: u32) -> Result<Complex64> {
        match self.entries.get(&k) {
            None => Ok(Complex64::new(0.0, 0.0)),
            Some(at_k) => at_k
                .get(&(slot, conductor))
                .copied()
                .ok_or(Error::MissingFlux { slot, conductor, k }),
        }
    }

    /// All stored (slot, conductor, k, value) rows in deterministic order
    /// (harmonic, then slot, then conductor).
    pub fn rows(&self) -> Vec<(u32, usize, u32, Complex64)> {
        let mut out = Vec::new();
        for (&k, at_k) in &self.entries {
            for (&(slot, conductor), &value) in at_k {
                out.push((slot, conductor, k, value));
            }
        }
        out
    }
}

/// Per-conductor flux phasors of one slot at harmonic `k` \[Wb\]:
/// `phi_i = l_active * A_z_i` for each conductor of the slot's layout.
pub fn slot_flux(
    field: &VectorPotentialField,
    slot: u32,
    n_conductors: usize,
    l_active: f64,
    k: u32,
) -> Result<DVector<Complex64>> {
    let mut out = DVector::from_element(n_conductors, Complex64::new(0.0, 0.0));
    for c in 0..n_conductors {
        out[c] = Complex64::from(l_active) * field.value(slot, c, k)?;
    }
    Ok(out)
}

/// Strand-level flux vector of a phase at harmonic `k` \[Wb\]:
/// the winding-map fold `sum_i M_i^T phi_i_k` over all mapped slots.
pub fn phase_flux(
    desc: &WindingDescription,
    field: &VectorPotentialField,
    k: u32,
) -> Result<DVector<Complex64>> {
    let mut out = DVector::from_element(desc.n_strands, Complex64::new(0.0, 0.0));
    if !field.in_scope(k) {
        return Ok(out);
    }
    for map in desc.maps() {
        let phi =
            slot_flux(field, map.slot, map.n_conductors(), desc.geometry.l_active, k)?;
        out += map.fold(&phi)?;
    }
    Ok(out)
}

/// Strand-level flux vectors for harmonics 1..=n_harmonics, keyed by order.
/// Out-of-scope harmonics map to zero vectors so the solve loop can treat
/// every order uniformly.
pub fn flux_spectrum(
    desc: &WindingDescription,
    field: &VectorPotentialField,
    n_harmonics: u32,
) -> Result<BTreeMap<u32, DVector<Complex64>>> {
    let mut out = BTreeMap::new();
    for k in 1..=n_harmonics {
        out.insert(k, phase_flux(desc, field, k)?);
    }
    Ok(out)
}

/// One harmonic of the synthetic field model.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticHarmonic {
    /// Harmonic order (1 = fundamental).
    pub k: u32,
    /// Uniform in-slot vector potential [Wb/m].
    pub a0: Complex64,
    /// In-slot gradient [Wb/m^2] along the layout x and y axes; this is
    /// what makes conductor positions (and hence strands) see different
    /// flux and drives circulating currents.
    pub gradient: [Complex64; 2],
}

/// Builds a synthetic field over every mapped slot of a winding.
///
/// Conductor `c` of slot `s` at layout position `(x, y)` gets
/// `A = (a0 + gx * x + gy * y) * exp(j * k * theta_s)` with the electrical
/// slot angle `theta_s = 2 pi * (poles / 2) * s / n_slots`. The rotation
/// keeps slot fields phase-consistent with a field wave of `poles / 2`
/// pole pairs, so a balanced winding sees the usual winding-factor sums.
pub fn synthetic_field(
    desc: &WindingDescription,
    harmonics: &[SyntheticHarmonic],
) -> Result<VectorPotentialField> {
    if desc.geometry.n_slots == 0 || desc.geometry.poles == 0 {
        return Err(Error::InvalidGeometry(
            "synthetic field needs nonzero slot and pole counts".into(),
        ));
    }
    let pole_pairs = f64::from(desc.geometry.poles) / 2.0;
    let mut field = VectorPotentialField::new();
    for h in harmonics {
        if h.k == 0 {
            return Err(Error::InvalidParameter(
                "synthetic field harmonic order must be >= 1".into(),
            ));
        }
        for map in desc.maps() {
            let layout = desc.layout(map.slot).ok_or_else(|| {
                Error::InvalidWinding(format!("slot {} has no layout", map.slot))
            })?;
            let theta = 2.0 * std::f64::consts::PI * pole_pairs * f64::from(map.slot)
                / f64::from(desc.geometry.n_slots);
            let rotation = Complex64::from_polar(1.0, f64::from(h.k) * theta);
            for (c, pos) in layout.positions.iter().enumerate() {
                let local = h.a0
                    + h.gradient[0] * Complex64::from(pos[0])
                    + h.gradient[1] * Complex64::from(pos[1]);
                field.insert(map.slot, c, h.k, local * rotation);
            }
        }
    }
    Ok(field)
}

/// Column names of the flux file format, in canonical write order.
const FLUX_COLUMNS: [&str; 5] = ["slot_id", "conductor_id", "harmonic_k", "re_Az", "im_Az"];

/// Reads a vector-potential file.
///
/// Format: one header line naming all five columns (any order), then one
/// data row per (slot, conductor, harmonic). Values are comma-separated;
/// blank lines and lines starting with `#` are skipped. Unknown or missing
/// columns, non-numeric fields, and duplicate (slot, conductor, harmonic)
/// keys are hard errors carrying the 1-based line number.
pub fn read_flux_file(path: &Path) -> Result<VectorPotentialField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_flux_text(&text, &path.display().to_string())
}

fn parse_flux_text(text: &str, path: &str) -> Result<VectorPotentialField> {
    let err = |line: usize, message: String| Error::FluxParse {
        path: path.to_string(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(1, "file has no header line".into()))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    let mut order = [usize::MAX; 5];
    for (pos, name) in names.iter().enumerate() {
        match FLUX_COLUMNS.iter().position(|c| c == name) {
            Some(col) => {
                if order[col] != usize::MAX {
                    return Err(err(header_line, format!("duplicate column \"{name}\"")));
                }
                order[col] = pos;
            }
            None => {
                return Err(err(
                    header_line,
                    format!(
                        "unknown column \"{name}\" (expected {})",
                        FLUX_COLUMNS.join(", ")
                    ),
                ))
            }
        }
    }
    for (col, &pos) in order.iter().enumerate() {
        if pos == usize::MAX {
            return Err(err(header_line, format!("missing column \"{}\"", FLUX_COLUMNS[col])));
        }
    }

    let mut field = VectorPotentialField::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(err(line_no, format!("expected 5 fields, got {}", fields.len())));
        }
        let cell = |col: usize| fields[order[col]];
        let slot: u32 = cell(0)
            .parse()
            .map_err(|_| err(line_no, format!("bad slot_id \"{}\"", cell(0))))?;
        let conductor: usize = cell(1)
            .parse()
            .map_err(|_| err(line_no, format!("bad conductor_id \"{}\"", cell(1))))?;
        let k: u32 = cell(2)
            .parse()
            .map_err(|_| err(line_no, format!("bad harmonic_k \"{}\"", cell(2))))?;
        if k == 0 {
            return Err(err(line_no, "harmonic_k must be >= 1".into()));
        }
        let re: f64 = cell(3)
            .parse()
            .map_err(|_| err(line_no, format!("bad re_Az \"{}\"", cell(3))))?;
        let im: f64 = cell(4)
            .parse()
            .map_err(|_| err(line_no, format!("bad im_Az \"{}\"", cell(4))))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(err(line_no, "Az values must be finite".into()));
        }
        if field.insert(slot, conductor, k, Complex64::new(re, im)).is_some() {
            return Err(err(
                line_no,
                format!("duplicate entry for slot {slot}, conductor {conductor}, harmonic {k}"),
            ));
        }
    }
    Ok(field)
}

/// Serializes a field in the canonical column order with exact
/// (round-trippable) float formatting. Rows are sorted by harmonic, slot,
/// conductor, so equal fields always produce byte-identical text.
pub fn format_flux_file(field: &VectorPotentialField) -> String {
    let mut out = String::new();
    out.push_str(&FLUX_COLUMNS.join(","));
    out.push('\n');
    for (slot, conductor, k, value) in field.rows() {
        let _ = writeln!(
            out,
            "{slot},{conductor},{k},{},{}",
            fmt_exact(value.re),
            fmt_exact(value.im)
        );
    }
    out
}

/// Writes a field to a flux file (see [`format_flux_file`]).
pub fn write_flux_file(path: &Path, field: &VectorPotentialField) -> Result<()> {
    std::fs::write(path, format_flux_file(field)).map_err(|e| Error::io(path, e))
}

/// Shortest float text that parses back to the identical value; negative
/// zero is normalized so equal-valued fields serialize identically.
fn fmt_exact(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:e}")
}
