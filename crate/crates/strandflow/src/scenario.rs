//! Scenario files: the on-disk description of a machine winding, its
//! supply, its flux source, and the model options — plus the end-to-end
//! pipelines that turn a scenario into solved currents, losses, and sweeps.
//!
//! Files are TOML with unit-suffixed keys (`l_active_m`,
//! `strand_radius_mm`, `frequency_hz`, ...). Lengths in slot layouts are
//! millimeters on disk and meters in memory; every conversion happens at
//! the file boundary so the physics code only ever sees SI units. Unknown
//! keys are rejected rather than ignored — a typo in a tolerance-sensitive
//! input should fail loudly.
//!
//! Indices on disk are 0-based (slots, conductors, strands) and harmonic
//! orders are physical (k = 1 is the fundamental).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_phase_from_description, PhaseSystem, Regime};
use crate::error::{Error, Result};
use crate::flux::{
    flux_spectrum, read_flux_file, synthetic_field, SyntheticHarmonic, VectorPotentialField,
};
use crate::losses::{loss_decomposition, LossReport};
use crate::solver::{
    decompose_general, detect_circulating, solve_phase, CirculationReport, CurrentDecomposition,
    SolutionSet,
};
use crate::sweep::{run_sweep, SweepResult};
use crate::winding::{
    validate_winding, MachineGeometry, Material, WindingDescription, WindingMap,
};

/// Default number of waveform samples per fundamental period.
pub const DEFAULT_SAMPLES_PER_PERIOD: u32 = 256;

/// Where the vector-potential data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FluxSource {
    /// Synthetic per-slot model (uniform value plus in-slot gradient).
    Synthetic(Vec<SyntheticHarmonic>),
    /// External flux file; relative paths resolve against the scenario
    /// file's directory.
    File(PathBuf),
}

/// A complete modeling scenario, the in-memory form of a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: MachineGeometry,
    pub material: Material,
    /// Number of parallel strands.
    pub n_strands: usize,
    /// Conductor positions shared by slots without an override \[m\].
    pub default_positions: Vec<[f64; 2]>,
    /// Per-slot position overrides \[m\].
    pub position_overrides: BTreeMap<u32, Vec<[f64; 2]>>,
    /// Per-slot strand incidence maps.
    pub maps: Vec<WindingMap>,
    /// Declared parallel slot grouping, for consistency checks.
    pub parallel_slot_groups: Option<u32>,
    /// Fundamental angular frequency [rad/s].
    pub omega: f64,
    /// True when the bundle carries no supply current.
    pub no_load: bool,
    /// Bundle current phasors per harmonic [A RMS]; empty under no-load.
    pub supply: BTreeMap<u32, Complex64>,
    /// Flux data source.
    pub flux_source: FluxSource,
    /// Impedance regime to solve in.
    pub regime: Regime,
    /// Explicit harmonic count; `None` derives it from supply and flux.
    pub n_harmonics: Option<u32>,
    /// Waveform samples per fundamental period.
    pub samples_per_period: u32,
    /// Directory the scenario was loaded from, for resolving relative
    /// flux paths. `None` for scenarios built in code.
    pub base_dir: Option<PathBuf>,
}

impl Scenario {
    /// Builds the winding description this scenario defines.
    pub fn winding(&self) -> Result<WindingDescription> {
        WindingDescription::new(
            self.geometry.clone(),
            self.material.clone(),
            self.n_strands,
            self.default_positions.clone(),
            self.position_overrides.clone(),
            self.maps.clone(),
            self.parallel_slot_groups,
        )
    }

    /// Flux file path with relative paths resolved against `base_dir`.
    pub fn resolved_flux_path(&self) -> Option<PathBuf> {
        match &self.flux_source {
            FluxSource::File(p) => {
                if p.is_absolute() {
                    Some(p.clone())
                } else {
                    match &self.base_dir {
                        Some(dir) => Some(dir.join(p)),
                        None => Some(p.clone()),
                    }
                }
            }
            FluxSource::Synthetic(_) => None,
        }
    }

    /// Materializes the vector-potential field from the flux source.
    pub fn load_field(&self, desc: &WindingDescription) -> Result<VectorPotentialField> {
        match &self.flux_source {
            FluxSource::Synthetic(harmonics) => synthetic_field(desc, harmonics),
            FluxSource::File(_) => {
                let path = self.resolved_flux_path().expect("file source has a path");
                // An unreadable flux file is a configuration problem (the
                // scenario points at it), so surface it as one, with the
                // resolved path in the message.
                read_flux_file(&path).map_err(|e| match e {
                    Error::Io { path, source } => Error::Config(format!(
                        "cannot read flux file {}: {source}",
                        path.display()
                    )),
                    other => other,
                })
            }
        }
    }

    /// Harmonic count to solve: the explicit override, or the highest
    /// order present in the supply or the field.
    pub fn effective_n_harmonics(&self, field: &VectorPotentialField) -> Result<u32> {
        if let Some(n) = self.n_harmonics {
            return Ok(n);
        }
        let from_supply = self.supply.keys().next_back().copied().unwrap_or(0);
        let n = from_supply.max(field.max_harmonic());
        if n == 0 {
            return Err(Error::InvalidParameter(
                "scenario has no harmonic content (no supply harmonics and no flux)".into(),
            ));
        }
        Ok(n)
    }
}

/// Everything a single solve produces.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// Assembled phase system at the scenario's geometry.
    pub phase: PhaseSystem,
    /// Fundamental angular frequency [rad/s].
    pub omega: f64,
    /// Number of harmonics solved.
    pub n_harmonics: u32,
    /// Regime used.
    pub regime: Regime,
    /// The vector-potential field that drove the solve.
    pub field: VectorPotentialField,
    /// Strand-level flux vectors per harmonic \[Wb\].
    pub flux: BTreeMap<u32, DVector<Complex64>>,
    /// Per-harmonic solutions.
    pub set: SolutionSet,
    /// Share/deviation split of the solved currents.
    pub decomposition: CurrentDecomposition,
    /// Loss totals and split.
    pub report: LossReport,
    /// Circulating-current detection verdict.
    pub detection: CirculationReport,
}

/// Runs the full pipeline for one scenario: validate, assemble, load flux,
/// solve every harmonic, decompose, price losses, detect circulation.
///
/// Losses use the physical full-coil strand resistance of the scenario's
/// own geometry (this is a single operating point, not a sweep).
pub fn solve_scenario(scenario: &Scenario) -> Result<SolveOutput> {
    let desc = scenario.winding()?;
    let validation = validate_winding(&desc);
    if !validation.is_valid() {
        return Err(Error::InvalidWinding(validation.to_string()));
    }
    let phase = assemble_phase_from_description(&desc)?;
    let field = scenario.load_field(&desc)?;
    let n_harmonics = scenario.effective_n_harmonics(&field)?;
    let flux = flux_spectrum(&desc, &field, n_harmonics)?;
    let set = solve_phase(
        &phase,
        scenario.omega,
        n_harmonics,
        &flux,
        &scenario.supply,
        scenario.regime,
    )?;
    let decomposition = decompose_general(&set, phase.alpha);
    let report = loss_decomposition(&set, &decomposition, phase.strand_resistance())?;
    let detection = detect_circulating(&set);
    Ok(SolveOutput {
        phase,
        omega: scenario.omega,
        n_harmonics,
        regime: scenario.regime,
        field,
        flux,
        set,
        decomposition,
        report,
        detection,
    })
}

/// Runs an end-winding-ratio sweep for one scenario. The flux spectrum and
/// supply are computed once (they do not depend on the ratio) and reused at
/// every point.
pub fn sweep_scenario(scenario: &Scenario, alphas: &[f64]) -> Result<SweepResult> {
    let desc = scenario.winding()?;
    let validation = validate_winding(&desc);
    if !validation.is_valid() {
        return Err(Error::InvalidWinding(validation.to_string()));
    }
    let phase = assemble_phase_from_description(&desc)?;
    let field = scenario.load_field(&desc)?;
    let n_harmonics = scenario.effective_n_harmonics(&field)?;
    let flux = flux_spectrum(&desc, &field, n_harmonics)?;
    run_sweep(
        &phase,
        scenario.omega,
        n_harmonics,
        &flux,
        &scenario.supply,
        scenario.regime,
        alphas,
    )
}

// ---------------------------------------------------------------------------
// On-disk representation.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDto {
    geometry: GeometryDto,
    material: MaterialDto,
    winding: WindingDto,
    slots: SlotsDto,
    maps: Vec<MapDto>,
    supply: SupplyDto,
    flux: FluxDto,
    #[serde(default)]
    model: ModelDto,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryDto {
    l_active_m: f64,
    l_end_winding_m: f64,
    n_slots: u32,
    poles: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slots_per_pole_per_phase: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialDto {
    conductivity_s_per_m: f64,
    strand_radius_mm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cross_section_mm2: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindingDto {
    n_strands: usize,
    n_conductors_per_slot: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parallel_slot_groups: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlotsDto {
    default_positions_mm: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    overrides: BTreeMap<String, Vec<[f64; 2]>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDto {
    slot: u32,
    /// Rows of `[conductor, strand, sign]` with sign in {-1, +1}.
    entries: Vec<[i64; 3]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupplyDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega_rad_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    no_load: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    harmonics: Vec<SupplyHarmonicDto>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupplyHarmonicDto {
    k: u32,
    /// Bundle current phasor [re, im] in A RMS.
    amplitude_a: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FluxDto {
    /// "synthetic" or "file".
    source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    harmonics: Vec<FluxHarmonicDto>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FluxHarmonicDto {
    k: u32,
    /// Uniform vector potential [re, im] in Wb/m.
    a0_wb_per_m: [f64; 2],
    /// Gradient rows [[gx_re, gx_im], [gy_re, gy_im]] in Wb/m^2.
    gradient_wb_per_m2: [[f64; 2]; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDto {
    #[serde(default = "default_regime")]
    regime: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_harmonics: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples_per_period: Option<u32>,
}

fn default_regime() -> String {
    "full".to_string()
}

impl Default for ModelDto {
    fn default() -> Self {
        ModelDto { regime: default_regime(), n_harmonics: None, samples_per_period: None }
    }
}

const MM: f64 = 1.0e-3;
const MM2: f64 = 1.0e-6;

fn positions_to_m(mm: &[[f64; 2]]) -> Vec<[f64; 2]> {
    mm.iter().map(|p| [p[0] * MM, p[1] * MM]).collect()
}

fn positions_to_mm(m: &[[f64; 2]]) -> Vec<[f64; 2]> {
    m.iter().map(|p| [p[0] / MM, p[1] / MM]).collect()
}

fn dto_to_scenario(dto: ScenarioDto, base_dir: Option<PathBuf>) -> Result<Scenario> {
    let geometry = MachineGeometry {
        l_active: dto.geometry.l_active_m,
        l_end_winding: dto.geometry.l_end_winding_m,
        n_slots: dto.geometry.n_slots,
        poles: dto.geometry.poles,
        slots_per_pole_per_phase: dto.geometry.slots_per_pole_per_phase,
    };
    let strand_radius = dto.material.strand_radius_mm * MM;
    let material = match dto.material.cross_section_mm2 {
        Some(s) => Material {
            conductivity: dto.material.conductivity_s_per_m,
            strand_radius,
            cross_section: s * MM2,
        },
        None => Material::circular(dto.material.conductivity_s_per_m, strand_radius),
    };

    let default_positions = positions_to_m(&dto.slots.default_positions_mm);
    let mut position_overrides = BTreeMap::new();
    for (key, positions) in &dto.slots.overrides {
        let slot: u32 = key.parse().map_err(|_| {
            Error::Config(format!("slot override key \"{key}\" is not a slot number"))
        })?;
        position_overrides.insert(slot, positions_to_m(positions));
    }

    let mut maps = Vec::with_capacity(dto.maps.len());
    for map_dto in &dto.maps {
        let mut triplets = Vec::with_capacity(map_dto.entries.len());
        for row in &map_dto.entries {
            let conductor = usize::try_from(row[0]).map_err(|_| {
                Error::Config(format!(
                    "slot {}: conductor index {} is negative",
                    map_dto.slot, row[0]
                ))
            })?;
            let strand = usize::try_from(row[1]).map_err(|_| {
                Error::Config(format!(
                    "slot {}: strand index {} is negative",
                    map_dto.slot, row[1]
                ))
            })?;
            let sign = match row[2] {
                1 => 1i8,
                -1 => -1i8,
                other => {
                    return Err(Error::Config(format!(
                        "slot {}: sign must be 1 or -1, got {other}",
                        map_dto.slot
                    )))
                }
            };
            triplets.push((conductor, strand, sign));
        }
        maps.push(WindingMap::from_triplets(
            map_dto.slot,
            dto.winding.n_conductors_per_slot,
            dto.winding.n_strands,
            &triplets,
        )?);
    }

    let omega = match (dto.supply.omega_rad_per_s, dto.supply.frequency_hz) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either omega_rad_per_s or frequency_hz, not both".into(),
            ))
        }
        (Some(w), None) => w,
        (None, Some(f)) => 2.0 * std::f64::consts::PI * f,
        (None, None) => {
            return Err(Error::Config(
                "supply needs omega_rad_per_s or frequency_hz".into(),
            ))
        }
    };
    if !crate::is_positive_finite(omega) {
        return Err(Error::Config(format!(
            "fundamental frequency must be positive, got omega = {omega} rad/s"
        )));
    }

    if dto.supply.no_load && !dto.supply.harmonics.is_empty() {
        return Err(Error::Config(
            "no_load = true contradicts a nonempty supply harmonic list".into(),
        ));
    }
    let mut supply = BTreeMap::new();
    for h in &dto.supply.harmonics {
        if h.k == 0 {
            return Err(Error::Config("supply harmonic k must be >= 1".into()));
        }
        if !h.amplitude_a[0].is_finite() || !h.amplitude_a[1].is_finite() {
            return Err(Error::Config(format!(
                "supply harmonic {} has a non-finite amplitude",
                h.k
            )));
        }
        let value = Complex64::new(h.amplitude_a[0], h.amplitude_a[1]);
        if supply.insert(h.k, value).is_some() {
            return Err(Error::Config(format!("supply harmonic {} given twice", h.k)));
        }
    }

    let flux_source = match dto.flux.source.as_str() {
        "synthetic" => {
            if dto.flux.path.is_some() {
                return Err(Error::Config(
                    "flux.path is only valid with source = \"file\"".into(),
                ));
            }
            if dto.flux.harmonics.is_empty() {
                return Err(Error::Config(
                    "synthetic flux needs at least one [[flux.harmonics]] entry".into(),
                ));
            }
            let mut seen = BTreeMap::new();
            let mut harmonics = Vec::with_capacity(dto.flux.harmonics.len());
            for h in &dto.flux.harmonics {
                if h.k == 0 {
                    return Err(Error::Config("flux harmonic k must be >= 1".into()));
                }
                if seen.insert(h.k, ()).is_some() {
                    return Err(Error::Config(format!("flux harmonic {} given twice", h.k)));
                }
                harmonics.push(SyntheticHarmonic {
                    k: h.k,
                    a0: Complex64::new(h.a0_wb_per_m[0], h.a0_wb_per_m[1]),
                    gradient: [
                        Complex64::new(h.gradient_wb_per_m2[0][0], h.gradient_wb_per_m2[0][1]),
                        Complex64::new(h.gradient_wb_per_m2[1][0], h.gradient_wb_per_m2[1][1]),
                    ],
                });
            }
            FluxSource::Synthetic(harmonics)
        }
        "file" => {
            if !dto.flux.harmonics.is_empty() {
                return Err(Error::Config(
                    "flux.harmonics is only valid with source = \"synthetic\"".into(),
                ));
            }
            let path = dto.flux.path.as_ref().ok_or_else(|| {
                Error::Config("flux.source = \"file\" needs flux.path".into())
            })?;
            FluxSource::File(PathBuf::from(path))
        }
        other => {
            return Err(Error::Config(format!(
                "flux.source must be \"synthetic\" or \"file\", got \"{other}\""
            )))
        }
    };

    let regime = Regime::parse(&dto.model.regime)?;
    if dto.model.n_harmonics == Some(0) {
        return Err(Error::Config("model.n_harmonics must be >= 1".into()));
    }
    let samples_per_period =
        dto.model.samples_per_period.unwrap_or(DEFAULT_SAMPLES_PER_PERIOD);
    if samples_per_period == 0 {
        return Err(Error::Config("model.samples_per_period must be >= 1".into()));
    }

    Ok(Scenario {
        geometry,
        material,
        n_strands: dto.winding.n_strands,
        default_positions,
        position_overrides,
        maps,
        parallel_slot_groups: dto.winding.parallel_slot_groups,
        omega,
        no_load: dto.supply.no_load,
        supply,
        flux_source,
        regime,
        n_harmonics: dto.model.n_harmonics,
        samples_per_period,
        base_dir,
    })
}

fn scenario_to_dto(scenario: &Scenario) -> ScenarioDto {
    let geometry = GeometryDto {
        l_active_m: scenario.geometry.l_active,
        l_end_winding_m: scenario.geometry.l_end_winding,
        n_slots: scenario.geometry.n_slots,
        poles: scenario.geometry.poles,
        slots_per_pole_per_phase: scenario.geometry.slots_per_pole_per_phase,
    };
    let material = MaterialDto {
        conductivity_s_per_m: scenario.material.conductivity,
        strand_radius_mm: scenario.material.strand_radius / MM,
        cross_section_mm2: Some(scenario.material.cross_section / MM2),
    };
    let winding = WindingDto {
        n_strands: scenario.n_strands,
        n_conductors_per_slot: scenario.default_positions.len(),
        parallel_slot_groups: scenario.parallel_slot_groups,
    };
    let slots = SlotsDto {
        default_positions_mm: positions_to_mm(&scenario.default_positions),
        overrides: scenario
            .position_overrides
            .iter()
            .map(|(slot, p)| (slot.to_string(), positions_to_mm(p)))
            .collect(),
    };
    let maps = scenario
        .maps
        .iter()
        .map(|m| MapDto {
            slot: m.slot,
            entries: m
                .triplets()
                .into_iter()
                .map(|(c, s, sign)| [c as i64, s as i64, i64::from(sign)])
                .collect(),
        })
        .collect();
    let supply = SupplyDto {
        omega_rad_per_s: Some(scenario.omega),
        frequency_hz: None,
        no_load: scenario.no_load,
        harmonics: scenario
            .supply
            .iter()
            .map(|(&k, v)| SupplyHarmonicDto { k, amplitude_a: [v.re, v.im] })
            .collect(),
    };
    let flux = match &scenario.flux_source {
        FluxSource::Synthetic(harmonics) => FluxDto {
            source: "synthetic".into(),
            path: None,
            harmonics: harmonics
                .iter()
                .map(|h| FluxHarmonicDto {
                    k: h.k,
                    a0_wb_per_m: [h.a0.re, h.a0.im],
                    gradient_wb_per_m2: [
                        [h.gradient[0].re, h.gradient[0].im],
                        [h.gradient[1].re, h.gradient[1].im],
                    ],
                })
                .collect(),
        },
        FluxSource::File(path) => FluxDto {
            source: "file".into(),
            path: Some(path.display().to_string()),
            harmonics: Vec::new(),
        },
    };
    let model = ModelDto {
        regime: scenario.regime.name().to_string(),
        n_harmonics: scenario.n_harmonics,
        samples_per_period: Some(scenario.samples_per_period),
    };
    ScenarioDto { geometry, material, winding, slots, maps, supply, flux, model }
}

/// Parses scenario TOML text. `base_dir` resolves relative flux paths.
pub fn parse_scenario(text: &str, base_dir: Option<PathBuf>) -> Result<Scenario> {
    let dto: ScenarioDto =
        toml::from_str(text).map_err(|e| Error::Config(format!("scenario file: {e}")))?;
    dto_to_scenario(dto, base_dir)
}

/// Loads a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base_dir = path.parent().map(Path::to_path_buf);
    parse_scenario(&text, base_dir)
}

/// Serializes a scenario to TOML text (deterministic field and map order).
pub fn format_scenario(scenario: &Scenario) -> Result<String> {
    toml::to_string_pretty(&scenario_to_dto(scenario))
        .map_err(|e| Error::Config(format!("cannot serialize scenario: {e}")))
}

/// Writes a scenario file.
pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<()> {
    std::fs::write(path, format_scenario(scenario)?).map_err(|e| Error::io(path, e))
}
