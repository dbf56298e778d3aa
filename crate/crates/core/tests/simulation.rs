use factscreen_core::design::FactorSet;
use factscreen_core::estimation::WeightVector;
use factscreen_core::simulation::{
    enumerate_assignments, run_monte_carlo, DesignSpec, EffectTerm, Engine, MeanSpec, Method, ScienceTable,
    SimulationConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_config(seed: u64) -> SimulationConfig {
    SimulationConfig {
        k: 3,
        seed,
        replications: 60,
        n0: vec![2, 3],
        effect_sizes: vec![0.5],
        mean: MeanSpec::Effects { terms: vec![EffectTerm { set: FactorSet::singleton(1), scale: 1.0 }] },
        ..SimulationConfig::default()
    }
}

#[test]
fn same_seed_gives_identical_rows() {
    let a = run_monte_carlo(&small_config(5)).unwrap();
    let b = run_monte_carlo(&small_config(5)).unwrap();
    assert_eq!(a.rows, b.rows);
    let c = run_monte_carlo(&small_config(6)).unwrap();
    assert_ne!(a.rows, c.rows);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = small_config(9);
    let many = run_monte_carlo(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let one = pool.install(|| run_monte_carlo(&cfg)).unwrap();
    assert_eq!(many.rows, one.rows);
}

#[test]
fn engines_report_the_same_metrics() {
    let streaming = run_monte_carlo(&small_config(3)).unwrap();
    let materialized = run_monte_carlo(&SimulationConfig { engine: Engine::Materialized, ..small_config(3) }).unwrap();
    let key = |r: &factscreen_core::simulation::MetricRow| {
        (r.n0, r.method.clone(), r.estimator.clone(), r.target.clone(), r.metric.clone())
    };
    let a: Vec<_> = streaming.rows.iter().map(key).collect();
    let b: Vec<_> = materialized.rows.iter().map(key).collect();
    assert_eq!(a, b);
    assert_eq!(streaming.manifest.grid_points, 2);
    for method in Method::ALL {
        let p = streaming.find(3, 0.5, method, "-", "-", "perfect_screening").unwrap();
        assert!((0.0..=1.0).contains(&p.value));
    }
}

#[test]
fn invalid_config_lists_every_problem() {
    let cfg = SimulationConfig { k: 2, replications: 0, n0: vec![], ..SimulationConfig::default() };
    let msg = run_monte_carlo(&cfg).unwrap_err().to_string();
    assert!(msg.contains("mean.factors"), "{msg}");
    assert!(msg.contains("replications"), "{msg}");
    assert!(msg.contains("n0"), "{msg}");
}

#[test]
fn enumerated_variance_matches_finite_population_formula() {
    // Var(fᵀŶ) = Σ f_z² S(z,z)/N(z) − S_f²/N with S_f² the variance of Σ_z f_z Y_i(z).
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (k, n) = (2u32, 8usize);
    let values: Vec<f64> = (0..n * 4).map(|_| rng.random_range(-2.0..2.0)).collect();
    let science = ScienceTable::new(k, n, values).unwrap();
    let design = DesignSpec::new(vec![2, 2, 3, 1]).unwrap();
    let exact = enumerate_assignments(&science, &design, &[]).unwrap();
    let f = [1.0, -0.5, 0.25, 2.0];

    let col = |r: usize| (0..n).map(|i| science.get(i, r)).collect::<Vec<_>>();
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let unit_f: Vec<f64> = (0..n).map(|i| (0..4).map(|r| f[r] * science.get(i, r)).sum()).collect();
    let formula = (0..4).map(|r| f[r] * f[r] * var(&col(r)) / design.counts[r] as f64).sum::<f64>() - var(&unit_f) / n as f64;

    let cov = &exact.cov_yhat;
    let enumerated: f64 = (0..4).flat_map(|a| (0..4).map(move |b| (a, b))).map(|(a, b)| f[a] * cov.get(a, b) * f[b]).sum();
    assert!((enumerated - formula).abs() < 1e-12);

    let wv = WeightVector::from_values(f.to_vec()).unwrap();
    assert!((wv.dot(&exact.mean_yhat) - science.gamma(&wv).unwrap()).abs() < 1e-12);

    // The arm with one unit leaves E[V̂] undefined.
    assert!(exact.mean_vhat.is_none());
}
