//! Report emitters: machine CSV and JSON-lines outputs and the two-decimal
//! human table view.
//!
//! Machine outputs carry 17 significant digits so golden files are stable
//! and lossless; the human view rounds to two decimals. All iteration runs
//! in deterministic order, so identical inputs give byte-identical files.

use std::fmt::Write as _;

use crate::scenario::{ScenarioAnalysis, TheoryReport};
use crate::signal::HarmonicSignal;
use crate::trajectory::{GeometricTrajectory, Waveform};

/// 17-significant-digit rendering for machine outputs.
pub fn machine_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn human_number(x: f64) -> String {
    format!("{x:.2}")
}

/// Closed-form rendering of a harmonic signal, e.g.
/// `86.52 cos(1wt) - 63.22 sin(1wt)`; `w` is the base angular frequency.
pub fn format_harmonic(signal: &HarmonicSignal, machine: bool) -> String {
    let fmt = |x: f64| if machine { machine_number(x) } else { human_number(x) };
    let mut out = String::new();
    let push_term = |amp: f64, text: String, out: &mut String| {
        if amp == 0.0 {
            return;
        }
        if out.is_empty() {
            if amp < 0.0 {
                out.push('-');
            }
        } else if amp < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let _ = write!(out, "{} {text}", fmt(amp.abs()));
    };
    if signal.dc() != 0.0 {
        let _ = write!(out, "{}", fmt(signal.dc()));
    }
    for term in signal.terms() {
        push_term(term.cos_amp, format!("cos({}wt)", term.order), &mut out);
        push_term(term.sin_amp, format!("sin({}wt)", term.order), &mut out);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Machine rendering of one trajectory channel.
pub fn machine_waveform(w: &Waveform) -> String {
    match w {
        Waveform::Harmonic(s) => format_harmonic(s, true),
        Waveform::Rational { num, den } => format!(
            "({}) / ({})",
            format_harmonic(num, true),
            format_harmonic(den, true)
        ),
        Waveform::Sampled { values, .. } => format!("sampled(n={})", values.len()),
    }
}

fn human_waveform(label: &str) -> String {
    // component channel labels arrive machine-formatted; compress the
    // mantissas down to two decimals for the table view
    let mut out = String::new();
    let mut chars = label.chars().peekable();
    let mut number = String::new();
    let flush = |number: &mut String, out: &mut String| {
        if number.is_empty() {
            return;
        }
        // leave integers (harmonic orders) alone, round real amplitudes
        if !number.contains('.') && !number.contains('e') {
            out.push_str(number);
        } else {
            match number.parse::<f64>() {
                Ok(x) => {
                    let _ = write!(out, "{x:.2}");
                }
                Err(_) => out.push_str(number),
            }
        }
        number.clear();
    };
    while let Some(c) = chars.next() {
        if c.is_ascii_digit() || c == '.' || c == 'e' && number.chars().next().is_some_and(|f| f.is_ascii_digit() || f == '-' || f == '.') {
            number.push(c);
            if c == 'e' {
                if let Some(&sign) = chars.peek() {
                    if sign == '-' || sign == '+' {
                        number.push(sign);
                        chars.next();
                    }
                }
            }
        } else if c == '-' && number.is_empty() && out.ends_with([' ', '(']) {
            number.push(c);
        } else {
            flush(&mut number, &mut out);
            out.push(c);
        }
    }
    flush(&mut number, &mut out);
    out
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn metadata_lines(analysis: &ScenarioAnalysis, report: &TheoryReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "# {k} = {v}");
    };
    kv("schema", "gapower-decomposition-v1".into());
    kv("scenario", analysis.scenario.clone());
    kv("theory", report.theory.clone());
    kv("mode", format!("{:?}", report.mode).to_lowercase());
    kv("base_omega_rad_s", machine_number(analysis.base_omega_rad_s));
    kv("n_phases", analysis.n_phases.to_string());
    kv("active_power_w", machine_number(report.active_power_w));
    if let Some(q) = report.budeanu_reactive_var {
        kv("budeanu_reactive_var", machine_number(q));
    }
    kv("power_factor_before", machine_number(report.power_factor_before));
    kv("power_factor_after", machine_number(report.power_factor_after));
    if let Some(pf) = report.power_factor_power_norm {
        kv("power_factor_power_norm", machine_number(pf));
    }
    kv(
        "compensation",
        match report.compensation {
            crate::engine::CompensationStrategy::KeepParallel => "keep_parallel".into(),
            crate::engine::CompensationStrategy::KeepFryze => "keep_fryze".into(),
        },
    );
    kv("voltage_rms_geometric", machine_number(report.voltage_rms));
    kv("current_rms_geometric", machine_number(report.current_rms));
    if let Some(orientation) = report.orientation_factor {
        kv("orientation_factor", machine_number(orientation));
    }
    kv("flagged_samples", report.flagged_samples.to_string());
    if let Some(check) = &analysis.oracle_cross_check {
        kv("oracle_active_power_w", machine_number(check.oracle_active_power_w));
        kv("oracle_reactive_var", machine_number(check.oracle_reactive_var));
        kv("oracle_active_power_rel_delta", machine_number(check.active_power_rel_delta));
        kv("oracle_reactive_abs_rel_delta", machine_number(check.reactive_abs_rel_delta));
    }
    if let Some(delta) = analysis.instantaneous_equivalence_delta {
        kv("instantaneous_equivalence_delta", machine_number(delta));
    }
    if let Some(seq) = &report.quadrature_sequence_rms {
        kv("quadrature_zero_sequence_rms_a", machine_number(seq.zero));
        kv("quadrature_negative_sequence_rms_a", machine_number(seq.negative));
        kv("quadrature_positive_sequence_rms_a", machine_number(seq.positive));
    }
    out
}

/// The decomposition table of one theory as CSV: a `#`-prefixed metadata
/// block, then one row per component with its RMS and per-channel forms.
pub fn decomposition_csv(analysis: &ScenarioAnalysis, report: &TheoryReport) -> String {
    let mut out = metadata_lines(analysis, report);
    let n_channels = report.components.iter().map(|c| c.channels.len()).max().unwrap_or(0);
    out.push_str("component,rms_amperes");
    for k in 0..n_channels {
        let _ = write!(out, ",channel_{}", k + 1);
    }
    out.push('\n');
    for row in &report.components {
        let _ = write!(out, "{},{}", csv_escape(&row.name), machine_number(row.rms_amperes));
        for k in 0..n_channels {
            let cell = row.channels.get(k).map(String::as_str).unwrap_or("");
            let _ = write!(out, ",{}", csv_escape(cell));
        }
        out.push('\n');
    }
    if !report.residual_spectrum.is_empty() {
        out.push_str("\n# residual symmetrical components\norder,sequence,magnitude_rms_a\n");
        for entry in &report.residual_spectrum {
            let _ = writeln!(
                out,
                "{},{},{}",
                entry.order,
                entry.sequence,
                machine_number(entry.magnitude)
            );
        }
    }
    out
}

/// The whole analysis as JSON lines: one `metadata` record, then one
/// `theory` record per theory run.
pub fn json_lines(analysis: &ScenarioAnalysis) -> String {
    #[derive(serde::Serialize)]
    struct Meta<'a> {
        record: &'static str,
        scenario: &'a str,
        description: &'a str,
        mode: crate::engine::AnalysisMode,
        pipeline: crate::scenario::Pipeline,
        base_omega_rad_s: f64,
        n_phases: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        oracle_cross_check: &'a Option<crate::scenario::OracleCrossCheck>,
        #[serde(skip_serializing_if = "Option::is_none")]
        instantaneous_equivalence_delta: &'a Option<f64>,
    }
    #[derive(serde::Serialize)]
    struct TheoryRecord<'a> {
        record: &'static str,
        #[serde(flatten)]
        report: &'a TheoryReport,
    }

    let mut out = serde_json::to_string(&Meta {
        record: "metadata",
        scenario: &analysis.scenario,
        description: &analysis.description,
        mode: analysis.mode,
        pipeline: analysis.pipeline,
        base_omega_rad_s: analysis.base_omega_rad_s,
        n_phases: analysis.n_phases,
        oracle_cross_check: &analysis.oracle_cross_check,
        instantaneous_equivalence_delta: &analysis.instantaneous_equivalence_delta,
    })
    .expect("metadata serializes");
    out.push('\n');
    for report in [&analysis.gapot, &analysis.cv].into_iter().flatten() {
        out.push_str(
            &serde_json::to_string(&TheoryRecord { record: "theory", report })
                .expect("theory serializes"),
        );
        out.push('\n');
    }
    out
}

/// Two-decimal table view of one theory's results, for terminals.
pub fn human_table(analysis: &ScenarioAnalysis, report: &TheoryReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "scenario {} [{}] mode={}",
        analysis.scenario,
        report.theory,
        format!("{:?}", report.mode).to_lowercase()
    );
    let _ = write!(out, "  P = {} W", human_number(report.active_power_w));
    if let Some(q) = report.budeanu_reactive_var {
        let _ = write!(out, "   Q = {} var", human_number(q));
    }
    let _ = writeln!(
        out,
        "   pf {} -> {}",
        human_number(report.power_factor_before),
        human_number(report.power_factor_after)
    );
    if let Some(check) = &analysis.oracle_cross_check {
        let _ = writeln!(
            out,
            "  oracle: P = {} W, Q = {} var (deltas {:.1e} / {:.1e})",
            human_number(check.oracle_active_power_w),
            human_number(check.oracle_reactive_var),
            check.active_power_rel_delta,
            check.reactive_abs_rel_delta,
        );
    }
    let name_width = report.components.iter().map(|c| c.name.len()).max().unwrap_or(4).max(4);
    let _ = writeln!(out, "  {:<name_width$}  {:>10}  waveform", "", "rms A");
    for row in &report.components {
        let channels: Vec<String> = row.channels.iter().map(|c| human_waveform(c)).collect();
        let _ = writeln!(
            out,
            "  {:<name_width$}  {:>10}  {}",
            row.name,
            human_number(row.rms_amperes),
            channels.join("  |  ")
        );
    }
    if let Some(seq) = &report.quadrature_sequence_rms {
        let _ = writeln!(
            out,
            "  i_q sequences: zero {} A, negative {} A, positive {} A",
            human_number(seq.zero),
            human_number(seq.negative),
            human_number(seq.positive)
        );
    }
    if !report.residual_spectrum.is_empty() {
        let entries: Vec<String> = report
            .residual_spectrum
            .iter()
            .map(|e| format!("({}, {}): {} A", e.order, e.sequence, human_number(e.magnitude)))
            .collect();
        let _ = writeln!(out, "  residual spectrum: {}", entries.join(", "));
    }
    out
}

/// Waveform CSV of one trajectory: `t,phase1,...,phasen` over one period.
/// Averaged-form trajectories emit the time-domain phases (quadrature
/// channels dropped); instantaneous ones emit every channel.
pub fn waveform_csv(
    traj: &GeometricTrajectory,
    averaged: bool,
    samples_per_period: usize,
) -> String {
    let phases = traj.sample_phases(samples_per_period, averaged);
    let period = traj.period();
    let mut out = String::from("t");
    for k in 0..phases.len() {
        let _ = write!(out, ",phase{}", k + 1);
    }
    out.push('\n');
    for j in 0..samples_per_period {
        let t = period * j as f64 / samples_per_period as f64;
        let _ = write!(out, "{}", machine_number(t));
        for phase in &phases {
            let _ = write!(out, ",{}", machine_number(phase[j]));
        }
        out.push('\n');
    }
    out
}
