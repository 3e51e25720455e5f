//! Circulating currents with zero bundle current: even when the machine
//! delivers no terminal current, an asymmetric slot field drives currents
//! around the loops formed by the parallel strands, and they dissipate
//! real power. This is why transposition matters even at no load.

use strandflow::presets::demo_machine;
use strandflow::scenario::solve_scenario;

fn main() -> strandflow::Result<()> {
    let mut scenario = demo_machine();
    scenario.no_load = true;
    scenario.supply.clear();

    let out = solve_scenario(&scenario)?;
    println!(
        "no-load solve: {} strands, {} harmonics, bundle current = 0 A",
        out.set.n_strands(),
        out.n_harmonics
    );
    println!();
    println!("share-current loss:  {:.6e} W (no bundle current, no share)", out.report.p_cc0);
    println!("total strand loss:   {:.6e} W", out.report.p_cc);
    println!();

    // Every harmonic's strand currents sum to zero, yet each strand
    // carries real current.
    for sol in out.set.iter() {
        let circulating: f64 =
            sol.strand_currents.iter().map(|i| i.norm_sqr()).sum::<f64>().sqrt();
        println!(
            "  harmonic {:>2}: |sum over strands| = {:.3e} A, strand-current magnitude = {:.4} A",
            sol.k,
            sol.current_sum().norm(),
            circulating
        );
    }
    println!();
    println!("{}", out.detection);
    Ok(())
}
