use kacsim::metrics::{brute_force_wpp, eps_n_p, fit_power_law, w_p_sorted, wpp_sorted, Target};
use kacsim::model::{InitialLaw, Order};
use kacsim::rng::seeded;
use rand::Rng;

#[test]
fn shift_moves_w1_by_the_shift() {
    let mut rng = seeded(1);
    let a: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = a.iter().rev().map(|x| x + 0.75).collect();
    assert!((w_p_sorted(&a, &b, Order::One).unwrap() - 0.75).abs() < 1e-12);
    assert!((w_p_sorted(&a, &b, Order::Two).unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn sorted_matches_exhaustive_on_small_inputs() {
    let mut rng = seeded(2);
    for _ in 0..200 {
        let n = rng.random_range(1..=7);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-8..8) as f64 / 2.0).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-8..8) as f64 / 2.0).collect();
        for p in [Order::One, Order::Two] {
            assert_eq!(wpp_sorted(&a, &b, p).unwrap(), brute_force_wpp(&a, &b, p).unwrap());
        }
    }
}

#[test]
fn empirical_rate_for_gaussian_is_about_one_half() {
    let mu = InitialLaw::standard_gaussian();
    let mut rng = seeded(3);
    let points: Vec<(f64, f64)> = [32, 128, 512, 2048]
        .into_iter()
        .map(|n| (n as f64, eps_n_p(Target::Law(mu), n, Order::One, 200, &mut rng).unwrap().mean))
        .collect();
    let fit = fit_power_law(&points).unwrap();
    assert!((fit.gamma_hat - 0.5).abs() < 0.08, "{fit:?}");
}
