//! Plain-text and CSV writers for solver results.
//!
//! Every formatter in this module is a pure function from results to a
//! `String`, with file-writing wrappers on top. Output is deterministic:
//! floats are printed with a fixed 12-significant-digit scientific format,
//! negative zero is folded into positive zero, map iteration is ordered,
//! and lines end with `\n`. Running the same computation twice therefore
//! produces byte-identical files, which makes the outputs diffable and
//! safe to commit as regression fixtures.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::losses::{LossReport, Waveforms};
use crate::solver::SolutionSet;
use crate::sweep::{SweepResult, VerdictReport};

/// Column header of the sweep CSV, fixed so downstream tooling can rely
/// on it.
pub const SWEEP_CSV_HEADER: &str =
    "alpha_w,inv_alpha_sq,P_CC,P_CC0,P_delta_CC,max_strand_current";

/// Column header of the per-harmonic current CSV.
pub const CURRENTS_CSV_HEADER: &str = "harmonic_k,strand_j,re_I,im_I";

/// Formats a float with 12 significant digits in scientific notation,
/// folding negative zero into positive zero so equal values always print
/// identically.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Formats a complex number as `re+imj` / `re-imj` using [`fmt_float`]
/// for both parts.
pub fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() && z.im != 0.0 { '-' } else { '+' };
    format!("{}{}{}j", fmt_float(z.re), sign, fmt_float(z.im.abs()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// CSV of strand current phasors per harmonic. Each harmonic block lists
/// the strands in order followed by one `delta_phi` row carrying the
/// potential-difference unknown of that harmonic's bordered system.
pub fn format_currents_csv(set: &SolutionSet) -> String {
    let mut out = String::from(CURRENTS_CSV_HEADER);
    out.push('\n');
    for sol in set.iter() {
        let k = sol.k;
        for (j, current) in sol.strand_currents.iter().enumerate() {
            let _ = writeln!(
                out,
                "{k},{j},{},{}",
                fmt_float(current.re),
                fmt_float(current.im)
            );
        }
        let _ = writeln!(
            out,
            "{k},delta_phi,{},{}",
            fmt_float(sol.delta_phi.re),
            fmt_float(sol.delta_phi.im)
        );
    }
    out
}

/// Writes [`format_currents_csv`] to `path`.
pub fn write_currents_csv(path: &Path, set: &SolutionSet) -> Result<()> {
    write_text(path, &format_currents_csv(set))
}

/// Two-column `quantity,value` text file with the loss decomposition
/// followed by per-strand losses and RMS currents.
pub fn format_losses_text(report: &LossReport) -> String {
    let mut out = String::from("quantity,value\n");
    let rows = [
        ("alpha_w", report.alpha),
        ("loss_resistance_ohm", report.resistance),
        ("p_cc_w", report.p_cc),
        ("p_cc0_w", report.p_cc0),
        ("p_delta_cc_w", report.p_delta_cc),
        ("p_delta_cc_active_w", report.p_delta_cc_active),
        ("y_residual_w", report.y_residual),
        ("closure_defect_w", report.closure_defect()),
    ];
    for (name, value) in rows {
        let _ = writeln!(out, "{name},{}", fmt_float(value));
    }
    for (j, loss) in report.per_strand.losses.iter().enumerate() {
        let _ = writeln!(out, "p_strand_{j}_w,{}", fmt_float(*loss));
    }
    for (j, rms) in report.per_strand.rms_currents.iter().enumerate() {
        let _ = writeln!(out, "i_rms_strand_{j}_a,{}", fmt_float(*rms));
    }
    out
}

/// Writes [`format_losses_text`] to `path`.
pub fn write_losses_text(path: &Path, report: &LossReport) -> Result<()> {
    write_text(path, &format_losses_text(report))
}

/// CSV of reconstructed time-domain currents: one row per sample, one
/// column per strand, with the bundle waveform last.
pub fn format_waveforms_csv(waveforms: &Waveforms) -> String {
    let n_strands = waveforms.strands.len();
    let mut out = String::from("time_s");
    for j in 0..n_strands {
        let _ = write!(out, ",strand_{j}_a");
    }
    out.push_str(",bundle_a\n");
    for (i, t) in waveforms.times.iter().enumerate() {
        let _ = write!(out, "{}", fmt_float(*t));
        for strand in &waveforms.strands {
            let _ = write!(out, ",{}", fmt_float(strand[i]));
        }
        let _ = writeln!(out, ",{}", fmt_float(waveforms.bundle[i]));
    }
    out
}

/// Writes [`format_waveforms_csv`] to `path`.
pub fn write_waveforms_csv(path: &Path, waveforms: &Waveforms) -> Result<()> {
    write_text(path, &format_waveforms_csv(waveforms))
}

/// CSV of the end-winding-ratio sweep. A leading `#` comment block records
/// the regime, the pinned loss resistance, and the fitted line
/// `P_CC = slope * inv_alpha_sq + intercept`; the data header is
/// [`SWEEP_CSV_HEADER`].
pub fn format_sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# circulating-current losses vs end-winding ratio");
    let _ = writeln!(out, "# regime: {}", result.regime.name());
    let _ = writeln!(
        out,
        "# loss_resistance_ohm: {}",
        fmt_float(result.resistance)
    );
    let _ = writeln!(out, "# fit: P_CC = slope * inv_alpha_sq + intercept");
    let _ = writeln!(out, "# slope_w: {}", fmt_float(result.fit.slope));
    let _ = writeln!(out, "# intercept_w: {}", fmt_float(result.fit.intercept));
    let _ = writeln!(out, "# r_squared: {}", fmt_float(result.fit.r_squared));
    out.push_str(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_float(p.alpha),
            fmt_float(p.inv_alpha_sq),
            fmt_float(p.p_cc),
            fmt_float(p.p_cc0),
            fmt_float(p.p_delta_cc),
            fmt_float(p.max_strand_rms)
        );
    }
    out
}

/// Writes [`format_sweep_csv`] to `path`.
pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    write_text(path, &format_sweep_csv(result))
}

/// Renders a verdict report with one line per check and a final verdict
/// line, ending in exactly one newline.
pub fn format_verdict_text(verdict: &VerdictReport) -> String {
    let mut text = verdict.to_string();
    while text.ends_with('\n') {
        text.pop();
    }
    text.push('\n');
    text
}

/// Writes [`format_verdict_text`] to `path`.
pub fn write_verdict_text(path: &Path, verdict: &VerdictReport) -> Result<()> {
    write_text(path, &format_verdict_text(verdict))
}

/// Space-separated dump of a complex matrix, one row per line, entries
/// formatted by [`fmt_complex`]. Useful for inspecting assembled
/// impedance matrices.
pub fn format_matrix(matrix: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    for r in 0..matrix.nrows() {
        for c in 0..matrix.ncols() {
            if c > 0 {
                out.push(' ');
            }
            out.push_str(&fmt_complex(matrix[(r, c)]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::StrandLosses;
    use crate::solver::HarmonicSolution;
    use crate::sweep::{LineFit, SweepPoint};
    use crate::assembly::Regime;
    use nalgebra::DVector;

    fn toy_set() -> SolutionSet {
        let sol = |k: u32| HarmonicSolution {
            k,
            omega: 100.0,
            strand_currents: DVector::from_vec(vec![
                Complex64::new(1.5, -0.25),
                Complex64::new(0.5, 0.25),
            ]),
            delta_phi: Complex64::new(0.0, -2.0),
            bundle_current: Complex64::new(2.0, 0.0),
            residual: 0.0,
            condition: 1.0,
        };
        SolutionSet::new(100.0, vec![sol(1), sol(3)]).unwrap()
    }

    #[test]
    fn float_format_uses_twelve_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000000e0");
        assert_eq!(fmt_float(-0.0), "0.00000000000e0");
        assert_eq!(fmt_float(0.1), "1.00000000000e-1");
        assert_eq!(fmt_float(-12345.6789), "-1.23456789000e4");
    }

    #[test]
    fn complex_format_carries_the_imaginary_sign() {
        assert_eq!(
            fmt_complex(Complex64::new(1.0, -2.0)),
            "1.00000000000e0-2.00000000000e0j"
        );
        assert_eq!(
            fmt_complex(Complex64::new(-1.0, 0.0)),
            "-1.00000000000e0+0.00000000000e0j"
        );
        assert_eq!(
            fmt_complex(Complex64::new(0.0, -0.0)),
            "0.00000000000e0+0.00000000000e0j"
        );
    }

    #[test]
    fn currents_csv_lists_strands_then_delta_phi_per_harmonic() {
        let text = format_currents_csv(&toy_set());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CURRENTS_CSV_HEADER);
        // Two harmonics, each with two strand rows and one delta_phi row.
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert_eq!(lines[1], "1,0,1.50000000000e0,-2.50000000000e-1");
        assert_eq!(lines[3], "1,delta_phi,0.00000000000e0,-2.00000000000e0");
        assert!(lines[4].starts_with("3,0,"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn losses_text_lists_decomposition_then_per_strand_rows() {
        let report = LossReport {
            resistance: 2.0,
            alpha: 1.5,
            p_cc: 10.0,
            p_cc0: 4.0,
            p_delta_cc_active: 13.5,
            p_delta_cc: 6.0,
            y_residual: 0.0,
            per_strand: StrandLosses {
                resistance: 2.0,
                rms_currents: vec![1.0, 2.0],
                losses: vec![2.0, 8.0],
                total: 10.0,
            },
        };
        let text = format_losses_text(&report);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "quantity,value");
        assert_eq!(lines[1], "alpha_w,1.50000000000e0");
        assert_eq!(lines[3], "p_cc_w,1.00000000000e1");
        assert!(lines.contains(&"p_strand_1_w,8.00000000000e0"));
        assert!(lines.contains(&"i_rms_strand_0_a,1.00000000000e0"));
        // closure defect of a consistent decomposition is zero
        assert!(lines.contains(&"closure_defect_w,0.00000000000e0"));
    }

    #[test]
    fn sweep_csv_has_fixed_header_and_comment_block() {
        let result = SweepResult {
            regime: Regime::Diagonal,
            resistance: 0.5,
            points: vec![
                SweepPoint {
                    alpha: 1.0,
                    inv_alpha_sq: 1.0,
                    p_cc: 3.0,
                    p_cc0: 1.0,
                    p_delta_cc: 2.0,
                    p_delta_cc_active: 2.0,
                    y_residual: 0.0,
                    max_strand_rms: 1.2,
                    max_deviation: 0.4,
                },
                SweepPoint {
                    alpha: 2.0,
                    inv_alpha_sq: 0.25,
                    p_cc: 1.5,
                    p_cc0: 1.0,
                    p_delta_cc: 0.5,
                    p_delta_cc_active: 2.0,
                    y_residual: 0.0,
                    max_strand_rms: 0.9,
                    max_deviation: 0.2,
                },
            ],
            fit: LineFit { slope: 2.0, intercept: 1.0, r_squared: 1.0 },
        };
        let text = format_sweep_csv(&result);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert!(lines.contains(&SWEEP_CSV_HEADER));
        let header_at = lines.iter().position(|l| *l == SWEEP_CSV_HEADER).unwrap();
        assert_eq!(lines.len() - header_at - 1, 2, "one data row per point");
        assert!(lines[header_at + 1].starts_with("1.00000000000e0,1.00000000000e0,"));
        assert!(lines.iter().any(|l| l.starts_with("# regime: diagonal")));
        // Byte-identical on repeated formatting.
        assert_eq!(text, format_sweep_csv(&result));
    }

    #[test]
    fn waveform_csv_has_time_strand_and_bundle_columns() {
        let waveforms = Waveforms {
            omega: 100.0,
            times: vec![0.0, 0.1],
            strands: vec![vec![1.0, -1.0], vec![0.5, 0.25]],
            bundle: vec![1.5, -0.75],
        };
        let text = format_waveforms_csv(&waveforms);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "time_s,strand_0_a,strand_1_a,bundle_a");
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[1],
            "0.00000000000e0,1.00000000000e0,5.00000000000e-1,1.50000000000e0"
        );
    }

    #[test]
    fn matrix_dump_is_row_major_with_complex_entries() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(2.0, 2.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let text = format_matrix(&m);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[0],
            "1.00000000000e0+0.00000000000e0j 0.00000000000e0-1.00000000000e0j"
        );
        assert!(lines[1].starts_with("2.00000000000e0+2.00000000000e0j"));
    }
}
