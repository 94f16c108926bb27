mod common;

use common::random_vec;
use nlos_core::diffops::{
    apply_screened, gradient, gradient_adjoint, screened_poisson_solve, shrinkage, CurvWeight,
    VectorField3,
};
use nlos_core::grid::Shape;
use nlos_core::par;
use proptest::prelude::*;

fn objective(v: [f64; 3], x: [f64; 3], w: f64, mu: f64) -> f64 {
    let mag = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let d2: f64 = (0..3).map(|a| (v[a] - x[a]).powi(2)).sum();
    w * mag + 0.5 * mu * d2
}

fn field(x: [f64; 3]) -> VectorField3 {
    VectorField3::from_components(Shape::unit([1, 1, 1]), [vec![x[0]], vec![x[1]], vec![x[2]]])
        .unwrap()
}

proptest! {
    #[test]
    fn shrinkage_is_the_pointwise_minimizer(
        x in prop::array::uniform3(-2.0f64..2.0),
        w in 0.0f64..1.5,
        mu in 0.1f64..5.0,
    ) {
        let v = shrinkage(&field(x), &CurvWeight::constant(1, w), mu).unwrap().at(0);
        let best = objective(v, x, w, mu);
        for a in 0..3 {
            for s in [-1e-4, 1e-4] {
                let mut p = v;
                p[a] += s;
                prop_assert!(objective(p, x, w, mu) >= best - 1e-12);
            }
        }
    }

    #[test]
    fn gradient_adjoint_is_transpose(seed in 0u64..1000) {
        let shape = Shape::new([5, 4, 6], [0.5, 1.0, 2.0]);
        let f = random_vec(shape.len(), seed);
        let comps = [random_vec(shape.len(), seed + 1), random_vec(shape.len(), seed + 2), random_vec(shape.len(), seed + 3)];
        let v = VectorField3::from_components(shape, comps).unwrap();
        let lhs = gradient(&f, shape).dot(&v);
        let rhs = par::dot(&f, &gradient_adjoint(&v));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn screened_poisson_inverts_its_operator(seed in 0u64..1000, alpha in 0.01f64..10.0, mu in 0.0f64..100.0) {
        let shape = Shape::new([6, 5, 8], [1.0, 0.5, 0.25]);
        let rhs = random_vec(shape.len(), seed);
        let u = screened_poisson_solve(&rhs, shape, alpha, mu).unwrap();
        let back = apply_screened(&u, shape, alpha, mu);
        let res: Vec<f64> = back.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        prop_assert!(par::norm(&res) <= 1e-10 * par::norm(&rhs));
    }
}

#[test]
fn shrinkage_matches_radial_search() {
    // the minimizer lies on the ray through x, so a 1D search over its length is exact
    let data = random_vec(400, 11);
    for n in 0..100 {
        let x = [data[4 * n], data[4 * n + 1], data[4 * n + 2]];
        let w = data[4 * n + 3].abs();
        let mu = 0.5 + n as f64 / 50.0;
        let v = shrinkage(&field(x), &CurvWeight::constant(1, w), mu)
            .unwrap()
            .at(0);
        let m = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let along = |r: f64| objective([x[0] * r / m, x[1] * r / m, x[2] * r / m], x, w, mu);
        let (mut lo, mut hi) = (0.0, m);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if along(a) < along(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let oracle = along(0.5 * (lo + hi)).min(along(0.0));
        assert!(objective(v, x, w, mu) - oracle <= 1e-8, "instance {n}");
    }
}

#[test]
fn shrinkage_rejects_bad_arguments() {
    let x = field([1.0, 0.0, 0.0]);
    assert!(shrinkage(&x, &CurvWeight::constant(1, 1.0), 0.0).is_err());
    assert!(shrinkage(&x, &CurvWeight::constant(2, 1.0), 1.0).is_err());
    assert!(screened_poisson_solve(&[1.0], Shape::unit([1, 1, 1]), 0.0, 1.0).is_err());
}
