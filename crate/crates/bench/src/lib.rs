//! Shared fixtures for the pipeline benchmarks.

use gapower_core::circuit::{solve_steady_state, LinearCircuit, SeriesRlc};
use gapower_core::signal::{HarmonicSignal, HarmonicTerm, PolyphaseSignal};

/// Three-phase supply with a balanced fundamental and a handful of
/// harmonics, U volts RMS per phase.
pub fn distorted_three_phase(u: f64) -> PolyphaseSignal {
    let deg = std::f64::consts::PI / 180.0;
    let sqrt2 = std::f64::consts::SQRT_2;
    let phases = [0.0, -120.0, 120.0]
        .into_iter()
        .map(|shift| {
            HarmonicSignal::new(
                1.0,
                vec![
                    HarmonicTerm::from_polar(1, sqrt2 * u, shift * deg),
                    HarmonicTerm::from_polar(5, 0.08 * sqrt2 * u, -shift * deg),
                    HarmonicTerm::from_polar(7, 0.05 * sqrt2 * u, shift * deg),
                ],
            )
            .unwrap()
        })
        .collect();
    PolyphaseSignal::new(phases).unwrap()
}

/// An unbalanced star load on the supply above.
pub fn unbalanced_star() -> LinearCircuit {
    LinearCircuit::Star {
        branches: vec![
            Some(SeriesRlc { resistance: 2.0, inductance: 0.4, capacitance: None }),
            Some(SeriesRlc { resistance: 5.0, inductance: 0.0, capacitance: Some(2.0) }),
            Some(SeriesRlc { resistance: 8.0, inductance: 1.2, capacitance: None }),
        ],
        neutral: true,
    }
}

/// Voltage/current pair ready for embedding.
pub fn solved_pair(u: f64) -> (PolyphaseSignal, PolyphaseSignal) {
    let supply = distorted_three_phase(u);
    let current = solve_steady_state(&unbalanced_star(), &supply).unwrap();
    (supply, current)
}
