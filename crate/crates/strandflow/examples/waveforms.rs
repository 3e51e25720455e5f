//! Reconstructs time-domain strand currents from the per-harmonic
//! phasors and checks the RMS bookkeeping: with at least `2*N_h + 1`
//! samples per period the rectangle-rule RMS of the sampled waveform
//! equals the quadrature sum of the phasor magnitudes to machine
//! precision.

use num_complex::Complex64;

use strandflow::losses::{reconstruct_waveforms, strand_rms, time_domain_rms, waveform_peak};
use strandflow::presets::demo_machine;
use strandflow::scenario::solve_scenario;

fn main() -> strandflow::Result<()> {
    let scenario = demo_machine();
    let out = solve_scenario(&scenario)?;

    let samples = scenario.samples_per_period;
    let waveforms = reconstruct_waveforms(&out.set, samples)?;
    println!(
        "reconstructed {} strand waveforms at {samples} samples per {:.3e} s period",
        waveforms.strands.len(),
        2.0 * std::f64::consts::PI / waveforms.omega
    );
    println!();

    println!("strand  harmonic-domain rms  time-domain rms   relative gap   peak");
    for j in 0..out.set.n_strands().min(8) {
        let phasors: Vec<Complex64> =
            out.set.iter().map(|sol| sol.strand_currents[j]).collect();
        let harmonic = strand_rms(&phasors);
        let sampled = time_domain_rms(&waveforms.strands[j]);
        let gap = (sampled - harmonic).abs() / harmonic;
        let peak = waveform_peak(&waveforms.strands[j]);
        println!("  {j:>2}    {harmonic:>14.6} A    {sampled:>12.6} A    {gap:>9.2e}   {peak:>7.3} A");
    }
    println!("  ... ({} strands total)", out.set.n_strands());
    println!();

    let bundle_peak = waveform_peak(&waveforms.bundle);
    let bundle_rms = time_domain_rms(&waveforms.bundle);
    println!("bundle waveform: {bundle_rms:.4} A rms, {bundle_peak:.4} A peak");
    println!(
        "worst strand peaks at {:.4} A (strand {})",
        waveforms.max_strand_peak().1,
        waveforms.max_strand_peak().0
    );
    Ok(())
}
