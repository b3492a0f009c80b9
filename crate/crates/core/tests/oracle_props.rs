use simcone::cone::SimplicialCone;
use simcone::instance::{generate, GeneratorKind};
use simcone::linalg::{distance, norm2};
use simcone::newton::{solve, SolverConfig};
use simcone::oracle::{enumerate_project, enumerate_project_with, verify_kkt};
use simcone::par::Execution;
use simcone::rng::SplitMix64;

fn instance(i: usize, m: usize) -> (SimplicialCone, Vec<f64>) {
    let kind = GeneratorKind::ALL[i % 3];
    let inst = generate(kind, m, kind.default_param(), 77 + i as u64).unwrap();
    (inst.cone().unwrap(), inst.point)
}

#[test]
fn nondegenerate_instances_have_one_consistent_pattern() {
    let mut checked = 0;
    for i in 0..400 {
        let (c, z) = instance(i, 1 + i % 7);
        let r = enumerate_project(&c, &z).unwrap();
        assert!(r.consistent_count >= 1);
        assert_eq!(r.candidates_tested, 1 << c.dim());
        if r.solution.iter().all(|u| u.abs() > 1e-6) {
            assert_eq!(r.consistent_count, 1, "instance {i}");
            checked += 1;
        }
    }
    assert!(checked > 350);
}

#[test]
fn oracle_output_passes_kkt() {
    for i in 0..300 {
        let (c, z) = instance(i, 1 + i % 8);
        let r = enumerate_project(&c, &z).unwrap();
        assert!(verify_kkt(&c, &z, &r.projection, 1e-8), "instance {i}");
    }
}

#[test]
fn projection_beats_sampled_feasible_points() {
    let mut rng = SplitMix64::new(30);
    for i in 0..100 {
        let (c, z) = instance(i, 1 + i % 6);
        let p = enumerate_project(&c, &z).unwrap().projection;
        let best = distance(&z, &p);
        for _ in 0..1000 {
            // Mix interior samples with samples on random faces.
            let w: Vec<f64> = (0..c.dim())
                .map(|_| if rng.uniform() < 0.3 { 0.0 } else { rng.uniform_in(0.0, 2.0) })
                .collect();
            let y = c.generator().mul_vec(&w);
            assert!(best <= distance(&z, &y) + 1e-8);
        }
    }
}

#[test]
fn oracle_and_newton_agree() {
    for i in 0..300 {
        let (c, z) = instance(i, 1 + i % 8);
        let o = enumerate_project(&c, &z).unwrap();
        let n = solve(&c, &z, &SolverConfig::default()).unwrap();
        if !n.status.is_converged() {
            continue;
        }
        assert!(distance(&o.projection, &n.projection) <= 1e-7 * (1.0 + norm2(&z)));
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    for i in 0..30 {
        let (c, z) = instance(i, 2 + i % 9);
        let s = enumerate_project_with(&c, &z, Execution::Sequential).unwrap();
        let p = enumerate_project_with(&c, &z, Execution::Parallel).unwrap();
        assert_eq!(s, p);
    }
}
