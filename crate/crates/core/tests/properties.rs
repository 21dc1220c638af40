//! Property-based invariants of the algebra, signal and decomposition
//! layers.

use gapower_core::circuit::{oracle_powers, solve_steady_state, LinearCircuit, SeriesRlc};
use gapower_core::engine::{
    compensate, decompose, geometric_power, power_factor, AnalysisMode, CompensationStrategy,
};
use gapower_core::ga::Multivector;
use gapower_core::irp::{cv_decompose, cv_powers};
use gapower_core::signal::{HarmonicSignal, HarmonicTerm, PolyphaseSignal};
use gapower_core::trajectory::GeometricTrajectory;
use proptest::prelude::*;

const AMP: f64 = 10.0;

fn any_dim() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 4, 6])
}

fn harmonic_signal(max_order: u32) -> impl Strategy<Value = HarmonicSignal> {
    prop::collection::btree_map(1..=max_order, (-AMP..AMP, -AMP..AMP), 1..4).prop_map(|terms| {
        HarmonicSignal::new(
            1.0,
            terms
                .into_iter()
                .map(|(order, (cos_amp, sin_amp))| HarmonicTerm { order, cos_amp, sin_amp })
                .collect(),
        )
        .expect("distinct orders by construction")
    })
}

/// A three-phase supply with a dominant balanced fundamental plus bounded
/// harmonic perturbations, so the squared voltage norm stays away from zero.
fn three_phase_supply() -> impl Strategy<Value = PolyphaseSignal> {
    let perturbation = prop::collection::btree_map(2..=5u32, (-3.0..3.0, -3.0..3.0), 0..3);
    (
        50.0..150.0f64,
        [perturbation.clone(), perturbation.clone(), perturbation],
    )
        .prop_map(|(amplitude, perturbations)| {
            let deg = std::f64::consts::PI / 180.0;
            let shifts = [0.0, -120.0 * deg, 120.0 * deg];
            let phases = perturbations
                .into_iter()
                .zip(shifts)
                .map(|(extra, shift)| {
                    let mut terms =
                        vec![HarmonicTerm::from_polar(1, std::f64::consts::SQRT_2 * amplitude, shift)];
                    terms.extend(extra.into_iter().map(|(order, (cos_amp, sin_amp))| {
                        HarmonicTerm { order, cos_amp, sin_amp }
                    }));
                    HarmonicSignal::new(1.0, terms).unwrap()
                })
                .collect();
            PolyphaseSignal::new(phases).unwrap()
        })
}

fn star_circuit() -> impl Strategy<Value = LinearCircuit> {
    let branch = (0.5..10.0f64, 0.0..2.0f64, prop::option::of(0.5..5.0f64)).prop_map(
        |(resistance, inductance, capacitance)| {
            Some(SeriesRlc { resistance, inductance, capacitance })
        },
    );
    prop::collection::vec(branch, 3).prop_map(|branches| LinearCircuit::Star {
        branches,
        neutral: true,
    })
}

fn averaged_pair(
    supply: &PolyphaseSignal,
    circuit: &LinearCircuit,
) -> (GeometricTrajectory, GeometricTrajectory) {
    let current = solve_steady_state(circuit, supply).expect("passive circuit solves");
    (
        supply.to_geometric().expect("dc-free"),
        current.to_geometric().expect("dc-free"),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_anticommutes((dim, seed) in any_dim().prop_flat_map(|d| (Just(d), prop::collection::vec(-AMP..AMP, 2 * d)))) {
        let a = Multivector::from_vector(&seed[..dim]);
        let b = Multivector::from_vector(&seed[dim..]);
        let forward = a.wedge(&b).unwrap();
        let backward = b.wedge(&a).unwrap();
        let sum = &forward + &backward;
        prop_assert!(sum.terms().all(|(_, c)| c.abs() < 1e-12));
    }

    #[test]
    fn geometric_product_splits_into_inner_and_wedge((dim, seed) in any_dim().prop_flat_map(|d| (Just(d), prop::collection::vec(-AMP..AMP, 2 * d)))) {
        let a = Multivector::from_vector(&seed[..dim]);
        let b = Multivector::from_vector(&seed[dim..]);
        let product = a.geometric_product(&b).unwrap();
        let split = &Multivector::scalar(dim, a.inner(&b).unwrap()) + &a.wedge(&b).unwrap();
        prop_assert!(product.max_coefficient_distance(&split) < 1e-10);
        // nothing outside grades 0 and 2
        prop_assert!(product.terms().all(|(blade, _)| blade.grade() == 0 || blade.grade() == 2));
    }

    #[test]
    fn contraction_identity((dim, seed) in any_dim().prop_flat_map(|d| (Just(d), prop::collection::vec(-AMP..AMP, 2 * d)))) {
        // u (u ^ i) = (u . u) i - (u . i) u
        let u = Multivector::from_vector(&seed[..dim]);
        let i = Multivector::from_vector(&seed[dim..]);
        let lhs = u.geometric_product(&u.wedge(&i).unwrap()).unwrap();
        let rhs = &i.scaled(u.inner(&u).unwrap()) - &u.scaled(u.inner(&i).unwrap());
        let scale = lhs.norm().max(1.0);
        prop_assert!(lhs.max_coefficient_distance(&rhs) < 1e-10 * scale);
    }

    #[test]
    fn vector_inverse_identity(dim in any_dim(), seed in prop::collection::vec(0.1..AMP, 6)) {
        let v = Multivector::from_vector(&seed[..dim]);
        let inv = v.vector_inverse().unwrap();
        let p = v.geometric_product(&inv).unwrap();
        prop_assert!((p.coefficient(gapower_core::Blade::SCALAR) - 1.0).abs() < 1e-12);
        prop_assert!(p.grade_project(2).norm() < 1e-12);
    }

    #[test]
    fn geometric_product_is_associative(seed in prop::collection::vec(-AMP..AMP, 18)) {
        let dim = 6;
        let a = Multivector::from_vector(&seed[..dim]);
        let b = Multivector::from_vector(&seed[dim..2 * dim]);
        let c = Multivector::from_vector(&seed[2 * dim..]);
        let left = a.geometric_product(&b).unwrap().geometric_product(&c).unwrap();
        let right = a.geometric_product(&b.geometric_product(&c).unwrap()).unwrap();
        let scale = left.norm().max(1.0);
        prop_assert!(left.max_coefficient_distance(&right) < 1e-10 * scale);
    }

    #[test]
    fn norm_of_vector_is_root_of_inner(v in prop::collection::vec(-AMP..AMP, 4)) {
        let v = Multivector::from_vector(&v);
        prop_assert!((v.norm() - v.inner(&v).unwrap().sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hilbert_is_linear(a in harmonic_signal(7), b in harmonic_signal(7), alpha in -5.0..5.0f64, beta in -5.0..5.0f64) {
        let combined = a.scaled(alpha).add(&b.scaled(beta)).hilbert().unwrap();
        let separate = a.hilbert().unwrap().scaled(alpha).add(&b.hilbert().unwrap().scaled(beta));
        prop_assert!(combined.sub(&separate).max_abs_coefficient() < 1e-12);
    }

    #[test]
    fn hilbert_squares_to_negation(s in harmonic_signal(7)) {
        let twice = s.hilbert().unwrap().hilbert().unwrap();
        let neg = s.scaled(-1.0);
        prop_assert!(twice.sub(&neg).max_abs_coefficient() < 1e-9 * s.max_abs_coefficient().max(1.0));
    }

    #[test]
    fn sampled_hilbert_matches_analytic(s in harmonic_signal(7)) {
        let sampled = PolyphaseSignal::single(s.clone()).sample(1024, 1);
        let discrete = sampled.hilbert();
        let analytic = s.hilbert().unwrap();
        let period = s.period();
        let scale = s.max_abs_coefficient().max(1.0);
        for j in 0..1024 {
            let t = period * j as f64 / 1024.0;
            prop_assert!((discrete.channels()[0][j] - analytic.eval(t)).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn embedding_doubles_energy_and_round_trips(supply in three_phase_supply()) {
        let traj = supply.to_geometric().unwrap();
        let direct: f64 = supply.phases().iter().map(|p| p.rms() * p.rms()).sum();
        prop_assert!((traj.rms().powi(2) - 2.0 * direct).abs() < 1e-9 * direct);
        let back = traj.project_to_time().unwrap();
        let back = back.as_harmonic().unwrap();
        for (a, b) in back.phases().iter().zip(supply.phases()) {
            prop_assert!(a.sub(b).max_abs_coefficient() < 1e-12);
        }
    }

    #[test]
    fn decomposition_invariants(supply in three_phase_supply(), circuit in star_circuit()) {
        let (u, i) = averaged_pair(&supply, &circuit);
        let d = decompose(&u, &i, AnalysisMode::Averaged).unwrap();
        let period = u.period();
        let i_scale = i.rms().max(1.0);

        for j in 0..16 {
            let t = period * (j as f64 + 0.21) / 16.0;
            // reconstruction through both splits
            let two_way = &d.parallel().at(t) + &d.quadrature().at(t);
            prop_assert!(two_way.max_coefficient_distance(&i.at(t)) < 1e-9 * i_scale);
            let four_way = &(&d.fryze().at(t) + &d.fryze_complement().at(t))
                + &(&d.budeanu().at(t) + &d.budeanu_complement().at(t));
            prop_assert!(four_way.max_coefficient_distance(&i.at(t)) < 1e-9 * i_scale);
            // pointwise orthogonality of the split
            let dot = d.parallel().at(t).inner(&d.quadrature().at(t)).unwrap();
            prop_assert!(dot.abs() < 1e-9 * i_scale * i_scale);
        }

        // Pythagorean RMS identities
        let r = d.rms();
        prop_assert!((r.total.powi(2) - (r.parallel.powi(2) + r.quadrature.powi(2))).abs() < 1e-6 * r.total.powi(2));
        prop_assert!((r.parallel.powi(2) - (r.fryze.powi(2) + r.fryze_complement.powi(2))).abs() < 1e-6 * r.parallel.powi(2).max(1.0));
        prop_assert!((r.quadrature.powi(2) - (r.budeanu.powi(2) + r.budeanu_complement.powi(2))).abs() < 1e-6 * r.quadrature.powi(2).max(1.0));
    }

    #[test]
    fn power_factor_is_in_unit_interval_and_compensation_preserves_power(
        supply in three_phase_supply(),
        circuit in star_circuit(),
    ) {
        let (u, i) = averaged_pair(&supply, &circuit);
        let pf = power_factor(&u, &i).unwrap();
        prop_assert!(pf > 0.0 && pf <= 1.0 + 1e-12, "pf = {pf}");

        let d = decompose(&u, &i, AnalysisMode::Averaged).unwrap();
        let p = d.power().active_power();
        for strategy in [CompensationStrategy::KeepParallel, CompensationStrategy::KeepFryze] {
            let residual = compensate(&d, strategy);
            let mean_power = u.mean_inner(&residual) / AnalysisMode::Averaged.energy_scale();
            prop_assert!((mean_power - p).abs() < 1e-9 * p.abs().max(1.0));
        }
        let fryze_pf = power_factor(&u, &compensate(&d, CompensationStrategy::KeepFryze)).unwrap();
        prop_assert!((fryze_pf - 1.0).abs() < 1e-9);
    }

    #[test]
    fn instantaneous_split_matches_cross_vector_theory(
        supply in three_phase_supply(),
        circuit in star_circuit(),
    ) {
        let current = solve_steady_state(&circuit, &supply).unwrap();
        let u = supply.to_geometric_instantaneous().unwrap();
        let i = current.to_geometric_instantaneous().unwrap();
        let d = decompose(&u, &i, AnalysisMode::Instantaneous).unwrap();
        let cv = cv_decompose(&supply, &current).unwrap();
        let period = u.period();
        let scale = i.rms().max(1.0);
        for j in 0..32 {
            let t = period * j as f64 / 32.0;
            let ga = d.parallel().values_at(t);
            let cvp = cv.parallel_at(t);
            for k in 0..3 {
                prop_assert!((ga[k] - cvp[k]).abs() < 1e-10 * scale, "t={t} k={k}");
            }
        }
        // the cross-product reactive norm equals the bivector norm
        let powers = cv_powers(&supply, &current).unwrap();
        let gp = geometric_power(&u, &i, AnalysisMode::Instantaneous).unwrap();
        for j in 0..16 {
            let t = period * j as f64 / 16.0;
            let q_norm = powers.reactive_norm_at(t);
            let mq_norm = gp.bivector_at(t).norm();
            prop_assert!((q_norm - mq_norm).abs() < 1e-9 * q_norm.max(1.0), "t={t}");
        }
    }

    #[test]
    fn oracle_and_engine_agree_on_power(supply in three_phase_supply(), circuit in star_circuit()) {
        let current = solve_steady_state(&circuit, &supply).unwrap();
        let (oracle_p, oracle_q) = oracle_powers(&supply, &current);
        let u = supply.to_geometric().unwrap();
        let i = current.to_geometric().unwrap();
        let power = geometric_power(&u, &i, AnalysisMode::Averaged).unwrap();
        prop_assert!((power.active_power() - oracle_p).abs() < 1e-9 * oracle_p.abs().max(1.0));
        prop_assert!(
            (power.budeanu_reactive_power().abs() - oracle_q.abs()).abs()
                < 1e-9 * oracle_q.abs().max(1.0)
        );
    }

    #[test]
    fn sampled_pipeline_matches_analytic_downstream(supply in three_phase_supply(), circuit in star_circuit()) {
        let current = solve_steady_state(&circuit, &supply).unwrap();
        let exact_u = supply.to_geometric().unwrap();
        let exact_i = current.to_geometric().unwrap();
        let sampled_u = supply.sample(2048, 1).to_geometric().unwrap();
        let sampled_i = current.sample(2048, 1).to_geometric().unwrap();
        let exact = decompose(&exact_u, &exact_i, AnalysisMode::Averaged).unwrap();
        let sampled = decompose(&sampled_u, &sampled_i, AnalysisMode::Averaged).unwrap();
        let pairs = [
            (exact.rms().parallel, sampled.rms().parallel),
            (exact.rms().quadrature, sampled.rms().quadrature),
            (exact.rms().fryze, sampled.rms().fryze),
            (exact.rms().total, sampled.rms().total),
        ];
        for (a, b) in pairs {
            prop_assert!((a - b).abs() < 1e-6 * a.max(1e-6), "exact {a} vs sampled {b}");
        }
        let exact_p = exact.power().active_power();
        let sampled_p = sampled.power().active_power();
        prop_assert!((exact_p - sampled_p).abs() < 1e-6 * exact_p.abs().max(1.0));
    }
}
