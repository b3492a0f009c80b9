use simcone::instance::{generate, GeneratorKind};
use simcone::lcp::{default_pivot_limit, from_projection, lemke_solve, to_solution, LcpStatus};
use simcone::linalg::{distance, dot, norm2};
use simcone::newton::{residual, solve, SolverConfig};
use simcone::oracle::enumerate_project;

#[test]
fn lemke_matches_oracle_and_newton() {
    for i in 0..300 {
        let m = 1 + i % 10;
        let kind = GeneratorKind::ALL[i % 3];
        let inst = generate(kind, m, kind.default_param(), 4242 + i as u64).unwrap();
        let c = inst.cone().unwrap();
        let z = &inst.point;

        let p = from_projection(&c, z).unwrap();
        let s = lemke_solve(&p, default_pivot_limit(m)).unwrap();
        assert_eq!(s.status, LcpStatus::Solved, "instance {i}: {:?}", s.diagnostics);

        // complementarity residuals
        let mut mu_q = p.m_matrix.mul_vec(&s.u);
        mu_q.iter_mut().zip(&p.q).for_each(|(a, b)| *a += b);
        assert!(distance(&s.v, &mu_q) <= 1e-9 * (1.0 + norm2(&p.q)));
        assert!(s.u.iter().chain(&s.v).all(|&x| x >= -1e-10));
        assert!(dot(&s.u, &s.v) <= 1e-9 * (1.0 + norm2(&s.u) * norm2(&s.v)));

        let sol = to_solution(&s, &c).unwrap();
        let f = norm2(&residual(&c, z, &sol.x).unwrap());
        assert!(f <= 1e-8 * (1.0 + norm2(&c.gram_rhs(z))));

        let tol = 1e-7 * (1.0 + norm2(z));
        let oracle = enumerate_project(&c, z).unwrap();
        assert!(distance(&sol.projection, &oracle.projection) <= tol, "instance {i}");

        // Newton can cycle on badly conditioned generators; compare only
        // when it reached a definite answer.
        let newton = solve(&c, z, &SolverConfig::default()).unwrap();
        if newton.status.is_converged() {
            assert!(distance(&sol.projection, &newton.projection) <= tol, "instance {i}");
        }
    }
}
