//! Ready-made scenarios used by the examples, the test suite, and as
//! starting points for user configurations.
//!
//! [`demo_machine`] is a medium-size phase winding — 36 slots, 6 poles,
//! 30 parallel strands, 3 turns per strand per slot — driven at 500 Hz
//! with a mildly distorted supply (fundamental plus 5th and 7th) and a
//! synthetic flux with an in-slot gradient strong enough to make
//! circulating currents dominate the per-strand picture. [`minimal_machine`]
//! is a two-strand toy for fast tests and walkthroughs.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::assembly::Regime;
use crate::flux::SyntheticHarmonic;
use crate::scenario::{FluxSource, Scenario, DEFAULT_SAMPLES_PER_PERIOD};
use crate::winding::{MachineGeometry, Material, WindingMap};

/// Phase-A slots of the 36-slot, 6-pole, 2-slots-per-pole-per-phase
/// winding, with the go/return sign of each coil side.
const DEMO_SLOTS: [(u32, i8); 12] = [
    (0, 1),
    (1, 1),
    (6, -1),
    (7, -1),
    (12, 1),
    (13, 1),
    (18, -1),
    (19, -1),
    (24, 1),
    (25, 1),
    (30, -1),
    (31, -1),
];

const DEMO_STRANDS: usize = 30;
const DEMO_TURNS: usize = 3;
const DEMO_COLS: usize = 6;
const DEMO_ROWS: usize = 15;
const DEMO_PITCH_M: f64 = 1.9e-3;

/// Conductor grid of one demo slot: 6 columns by 15 rows, centered on the
/// slot axis. Conductor `c` sits at column `c % 6`, row `c / 6`.
fn demo_positions() -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(DEMO_COLS * DEMO_ROWS);
    for c in 0..DEMO_COLS * DEMO_ROWS {
        let col = (c % DEMO_COLS) as f64;
        let row = (c / DEMO_COLS) as f64;
        out.push([
            (col - (DEMO_COLS as f64 - 1.0) / 2.0) * DEMO_PITCH_M,
            (row - (DEMO_ROWS as f64 - 1.0) / 2.0) * DEMO_PITCH_M,
        ]);
    }
    out
}

/// Demo strand assignment: conductor `c` belongs to strand `c % 30`, so
/// each strand owns one conductor per turn, stacked 5 rows apart — strands
/// in different columns and row bands see genuinely different flux.
fn demo_map(slot: u32, sign: i8) -> WindingMap {
    let n_conductors = DEMO_STRANDS * DEMO_TURNS;
    let triplets: Vec<(usize, usize, i8)> =
        (0..n_conductors).map(|c| (c, c % DEMO_STRANDS, sign)).collect();
    WindingMap::from_triplets(slot, n_conductors, DEMO_STRANDS, &triplets)
        .expect("demo map construction is static")
}

/// 36-slot, 6-pole machine phase with 30 parallel strands and 3 turns per
/// strand per slot, at a base end-winding ratio of 2.
///
/// The supply carries 30 A at the fundamental plus small 5th and 7th
/// harmonics; the synthetic flux has in-slot gradients sized so the
/// circulating deviations reach several times the per-strand share — the
/// regime where transposition studies actually matter. Solved in the full
/// regime by default.
pub fn demo_machine() -> Scenario {
    let maps = DEMO_SLOTS.iter().map(|&(slot, sign)| demo_map(slot, sign)).collect();
    Scenario {
        geometry: MachineGeometry {
            l_active: 0.1,
            l_end_winding: 0.1,
            n_slots: 36,
            poles: 6,
            slots_per_pole_per_phase: Some(2),
        },
        material: Material::circular(5.8e7, 0.8e-3),
        n_strands: DEMO_STRANDS,
        default_positions: demo_positions(),
        position_overrides: BTreeMap::new(),
        maps,
        parallel_slot_groups: Some(1),
        omega: 2.0 * std::f64::consts::PI * 500.0,
        no_load: false,
        supply: BTreeMap::from([
            (1u32, Complex64::new(30.0, 0.0)),
            (5u32, Complex64::new(2.0, -1.0)),
            (7u32, Complex64::new(1.0, 0.5)),
        ]),
        flux_source: FluxSource::Synthetic(vec![
            SyntheticHarmonic {
                k: 1,
                a0: Complex64::new(2.0e-3, 0.0),
                // The x/y gradient ratio is deliberately non-commensurate
                // with the 6x15 conductor grid so no two strands bound the
                // same flux.
                gradient: [Complex64::new(4.0e-3, 0.0), Complex64::new(1.7e-3, 0.0)],
            },
            SyntheticHarmonic {
                k: 5,
                a0: Complex64::new(1.0e-4, -2.0e-5),
                gradient: [Complex64::new(2.0e-4, 1.0e-4), Complex64::new(1.0e-4, 0.0)],
            },
            SyntheticHarmonic {
                k: 7,
                a0: Complex64::new(5.0e-5, 0.0),
                gradient: [Complex64::new(1.0e-4, -5.0e-5), Complex64::new(5.0e-5, 2.0e-5)],
            },
        ]),
        regime: Regime::Full,
        n_harmonics: None,
        samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
        base_dir: None,
    }
}

/// Two-strand, two-slot toy winding for fast walkthroughs: one slot pair,
/// a single supply harmonic, and a flux gradient that visibly unbalances
/// the two strands.
pub fn minimal_machine() -> Scenario {
    Scenario {
        geometry: MachineGeometry {
            l_active: 0.2,
            l_end_winding: 0.2,
            n_slots: 6,
            poles: 2,
            slots_per_pole_per_phase: Some(1),
        },
        material: Material::circular(5.8e7, 0.5e-3),
        n_strands: 2,
        default_positions: vec![[0.0, 0.0], [3.0e-3, 0.0]],
        position_overrides: BTreeMap::new(),
        maps: vec![
            WindingMap::from_triplets(0, 2, 2, &[(0, 0, 1), (1, 1, 1)])
                .expect("static map"),
            WindingMap::from_triplets(3, 2, 2, &[(0, 0, -1), (1, 1, -1)])
                .expect("static map"),
        ],
        parallel_slot_groups: Some(1),
        omega: 2.0 * std::f64::consts::PI * 500.0,
        no_load: false,
        supply: BTreeMap::from([(1u32, Complex64::new(10.0, 0.0))]),
        flux_source: FluxSource::Synthetic(vec![SyntheticHarmonic {
            k: 1,
            a0: Complex64::new(1.0e-3, 0.0),
            gradient: [Complex64::new(0.2, 0.0), Complex64::new(0.0, 0.0)],
        }]),
        regime: Regime::Full,
        n_harmonics: None,
        samples_per_period: 64,
        base_dir: None,
    }
}
