use kacsim::metrics::{w_p_vs_law, McEstimate};
use kacsim::model::{model_hash, InitialLaw, InteractionLaw, Order};
use kacsim::reference::{build_pool_seeded, read_pool, write_pool, GridProvider, PoolProvider};

#[test]
fn kac_pool_stays_gaussian() {
    let law = InteractionLaw::kac(Order::Two);
    let p0 = InitialLaw::standard_gaussian();
    let pool = build_pool_seeded(&law, &p0, 3.0, 20_000, 5, false).unwrap();
    assert!(w_p_vs_law(pool.samples(), &p0, Order::One).unwrap() < 0.03);
}

#[test]
fn wealth_pool_keeps_its_mean_and_loses_variance() {
    let law = InteractionLaw::wealth_fixed(0.5, Order::One).unwrap();
    let p0 = InitialLaw::Exponential { rate: 1.0 };
    let pool = build_pool_seeded(&law, &p0, 2.0, 20_000, 6, false).unwrap();
    let mean = McEstimate::from_values(pool.samples());
    assert!(mean.agrees_with_value(1.0, 4.0), "{mean:?}");
    let var = pool.samples().iter().map(|x| (x - 1.0).powi(2)).sum::<f64>() / pool.len() as f64;
    assert!(var < 0.9, "{var}");
}

#[test]
fn pool_file_round_trip_preserves_quantiles() {
    let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
    let p0 = InitialLaw::Exponential { rate: 1.0 };
    let pool = build_pool_seeded(&law, &p0, 0.5, 1000, 7, false).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pool.txt");
    write_pool(std::fs::File::create(&path).unwrap(), &pool, &model_hash(&law, &p0), 7).unwrap();
    let (header, back) = read_pool(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(header.seed, 7);
    assert_eq!(back.samples(), pool.samples());
    for u in [0.001, 0.25, 0.5, 0.999] {
        assert_eq!(back.quantile(u).unwrap(), pool.quantile(u).unwrap());
    }
}

#[test]
fn grid_pools_are_reproducible_and_lazy() {
    let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
    let p0 = InitialLaw::Exponential { rate: 1.0 };
    let a = GridProvider::new(law.clone(), p0, 512, 0.1, 3).unwrap();
    let b = GridProvider::new(law, p0, 512, 0.1, 3).unwrap();
    b.prebuild(1.0).unwrap();
    for t in [0.0, 0.05, 0.3, 0.97] {
        let (va, vb) = (a.view(t).unwrap(), b.view(t).unwrap());
        for u in [0.1, 0.5, 0.9] {
            assert_eq!(va.quantile(u).unwrap(), vb.quantile(u).unwrap());
        }
    }
}
