//! Decompose the current of a single-phase RLC load under a two-harmonic
//! supply (the README example).

use gapower_core::signal::{HarmonicSignal, HarmonicTerm, PolyphaseSignal};
use gapower_core::{decompose, power_factor, AnalysisMode};

fn main() {
    let sqrt2 = std::f64::consts::SQRT_2;
    let supply = PolyphaseSignal::single(
        HarmonicSignal::new(
            1.0,
            vec![
                HarmonicTerm::cosine(1, 100.0 * sqrt2),
                HarmonicTerm::cosine(3, 100.0 * sqrt2),
            ],
        )
        .unwrap(),
    );
    let current = PolyphaseSignal::single(
        HarmonicSignal::new(
            1.0,
            vec![
                HarmonicTerm { order: 1, cos_amp: 80.0 * sqrt2, sin_amp: -40.0 * sqrt2 },
                HarmonicTerm { order: 3, cos_amp: 42.35 * sqrt2, sin_amp: 49.41 * sqrt2 },
            ],
        )
        .unwrap(),
    );

    let u = supply.to_geometric().unwrap();
    let i = current.to_geometric().unwrap();
    let d = decompose(&u, &i, AnalysisMode::Averaged).unwrap();
    println!(
        "P = {:.1} W, Q = {:.1} var",
        d.power().active_power(),
        d.power().budeanu_reactive_power()
    );
    println!("pf = {:.4}", power_factor(&u, &i).unwrap());
    println!("i_F rms = {:.2} A", d.rms().fryze);
}
