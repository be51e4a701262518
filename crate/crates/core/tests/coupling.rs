use kacsim::coupling::{run_coupled, run_decoupled};
use kacsim::events::EventStream;
use kacsim::metrics::w_p_vs_law;
use kacsim::model::{InitialLaw, InteractionLaw, Order};
use kacsim::particles::{run_bird, TimeGrid};
use kacsim::reference::{AnalyticProvider, GridProvider};

#[test]
fn coupled_particle_path_is_the_bird_path() {
    let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
    let p0 = InitialLaw::Exponential { rate: 1.0 };
    let grid = TimeGrid::new(vec![0.5, 1.0]).unwrap();
    let pools = GridProvider::new(law.clone(), p0, 1024, 0.05, 1).unwrap();
    for seed in 0..5 {
        let bird = run_bird(&law, &p0, &grid, &mut EventStream::new(32, seed, 0).unwrap()).unwrap();
        let coupled = run_coupled(&law, &p0, &grid, &mut EventStream::new(32, seed, 0).unwrap(), &pools).unwrap();
        for (b, c) in bird.snapshots.iter().zip(&coupled.snapshots) {
            assert_eq!(b.states, c.x);
        }
    }
}

#[test]
fn coupled_processes_have_the_limit_marginal() {
    let law = InteractionLaw::kac(Order::Two);
    let p0 = InitialLaw::standard_gaussian();
    let grid = TimeGrid::single(1.0).unwrap();
    let pools = AnalyticProvider::new(&p0).unwrap();
    let mut all = Vec::new();
    for seed in 0..100 {
        let run = run_coupled(&law, &p0, &grid, &mut EventStream::new(100, seed, 0).unwrap(), &pools).unwrap();
        all.extend_from_slice(&run.snapshots[0].u);
    }
    assert!(w_p_vs_law(&all, &p0, Order::One).unwrap() < 0.03);
}

#[test]
fn decoupled_system_starts_equal_and_separates_rarely() {
    let law = InteractionLaw::wealth_fixed(0.7, Order::One).unwrap();
    let p0 = InitialLaw::Exponential { rate: 1.0 };
    let grid = TimeGrid::new(vec![1e-9, 1.0]).unwrap();
    let pools = GridProvider::new(law.clone(), p0, 1024, 0.05, 2).unwrap();
    let mut separated = 0;
    for seed in 0..200 {
        let mut stream = EventStream::new(64, seed, 0).unwrap();
        let mut copy = stream.fork_independent_copy();
        let run = run_decoupled(&law, &p0, 2, &grid, &mut stream, &mut copy, &pools).unwrap();
        assert_eq!(run.snapshots[0].u, run.snapshots[0].v);
        if run.snapshots[1].distance(0, Order::One) > 0.0 {
            separated += 1;
        }
    }
    // about 2/(N−1) of the runs by t = 1
    assert!((1..40).contains(&separated), "{separated}");
}
