//! Periodic finite differences, curvature weights, the isotropic shrinkage
//! operator and the FFT screened-Poisson solve used by both solvers.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fft::Fft3;
use crate::grid::Shape;
use crate::par;

/// Default smoothing of `|∇u|` inside the curvature.
pub const DEFAULT_EPS_CURV: f64 = 1e-8;

/// A vector field with one component per grid axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField3 {
    shape: Shape,
    comps: [Vec<f64>; 3],
}

impl VectorField3 {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.len();
        VectorField3 {
            shape,
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn from_components(shape: Shape, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != shape.len()) {
            return invalid("vector field components do not match shape");
        }
        Ok(VectorField3 { shape, comps })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn component(&self, axis: usize) -> &[f64] {
        &self.comps[axis]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    pub fn at(&self, p: usize) -> [f64; 3] {
        [self.comps[0][p], self.comps[1][p], self.comps[2][p]]
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.len()];
        let [c0, c1, c2] = &self.comps;
        par::fill_with(&mut out, |p| {
            (c0[p] * c0[p] + c1[p] * c1[p] + c2[p] * c2[p]).sqrt()
        });
        out
    }

    /// `self + alpha * other`
    pub fn add_scaled(&self, alpha: f64, other: &VectorField3) -> VectorField3 {
        let mut out = self.clone();
        out.axpy(alpha, other);
        out
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &VectorField3) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            par::axpy(alpha, b, a);
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.comps.iter().map(|c| par::norm_sq(c)).sum()
    }

    pub fn dot(&self, other: &VectorField3) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| par::dot(a, b))
            .sum()
    }
}

/// Spatially varying total-variation weight `φ(κ) = a + b κ²`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvWeight(Vec<f64>);

impl CurvWeight {
    pub fn constant(len: usize, value: f64) -> Self {
        CurvWeight(vec![value; len])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        CurvWeight(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Forward differences with periodic wrap, scaled by `1/pitch`.
pub fn gradient(f: &[f64], shape: Shape) -> VectorField3 {
    assert_eq!(f.len(), shape.len());
    let [n0, n1, n2] = shape.dims;
    let slab = n1 * n2;
    let mut out = VectorField3::zeros(shape);
    let inv = shape.pitch.map(|h| 1.0 / h);
    let [g0, g1, g2] = &mut out.comps;

    par::for_each_chunk_mut(g0, slab, |i, dst| {
        let ip = (i + 1) % n0;
        let (cur, nxt) = (&f[i * slab..(i + 1) * slab], &f[ip * slab..(ip + 1) * slab]);
        for p in 0..slab {
            dst[p] = (nxt[p] - cur[p]) * inv[0];
        }
    });
    par::for_each_chunk_mut(g1, slab, |i, dst| {
        let src = &f[i * slab..(i + 1) * slab];
        for j in 0..n1 {
            let jp = (j + 1) % n1;
            for k in 0..n2 {
                dst[j * n2 + k] = (src[jp * n2 + k] - src[j * n2 + k]) * inv[1];
            }
        }
    });
    par::for_each_chunk_mut(g2, n2, |l, dst| {
        let src = &f[l * n2..(l + 1) * n2];
        for k in 0..n2 {
            let kp = if k + 1 == n2 { 0 } else { k + 1 };
            dst[k] = (src[kp] - src[k]) * inv[2];
        }
    });
    out
}

/// The adjoint `∇*` of [`gradient`]: `⟨∇f, g⟩ = ⟨f, ∇*g⟩`. Equal to minus the
/// backward-difference divergence.
pub fn gradient_adjoint(v: &VectorField3) -> Vec<f64> {
    let shape = v.shape;
    let [n0, n1, n2] = shape.dims;
    let slab = n1 * n2;
    let inv = shape.pitch.map(|h| 1.0 / h);
    let [c0, c1, c2] = &v.comps;
    let mut out = vec![0.0; shape.len()];
    par::for_each_chunk_mut(&mut out, slab, |i, dst| {
        let im = (i + n0 - 1) % n0;
        let base = i * slab;
        let prev = im * slab;
        for j in 0..n1 {
            let jm = (j + n1 - 1) % n1;
            for k in 0..n2 {
                let km = if k == 0 { n2 - 1 } else { k - 1 };
                let p = j * n2 + k;
                dst[p] = (c0[prev + p] - c0[base + p]) * inv[0]
                    + (c1[base + jm * n2 + k] - c1[base + p]) * inv[1]
                    + (c2[base + j * n2 + km] - c2[base + p]) * inv[2];
            }
        }
    });
    out
}

/// Backward-difference divergence, `-∇*`.
pub fn divergence(v: &VectorField3) -> Vec<f64> {
    let mut d = gradient_adjoint(v);
    par::scale(-1.0, &mut d);
    d
}

/// Mean curvature `∇·(∇f / sqrt(|∇f|² + eps²))`.
pub fn curvature(f: &[f64], shape: Shape, eps: f64) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return invalid(format!("curvature smoothing must be positive, got {eps}"));
    }
    let mut g = gradient(f, shape);
    let mag = g.magnitude();
    let eps2 = eps * eps;
    for c in g.comps.iter_mut() {
        par::for_each_chunk_mut(c, 4096, |ci, chunk| {
            let base = ci * 4096;
            for (q, x) in chunk.iter_mut().enumerate() {
                let m = mag[base + q];
                *x /= (m * m + eps2).sqrt();
            }
        });
    }
    Ok(divergence(&g))
}

/// `φ(κ(f)) = a + b κ(f)²`.
pub fn curv_weight(f: &[f64], shape: Shape, a: f64, b: f64, eps: f64) -> Result<CurvWeight> {
    if b == 0.0 {
        return Ok(CurvWeight::constant(f.len(), a));
    }
    let mut k = curvature(f, shape, eps)?;
    par::for_each_chunk_mut(&mut k, 4096, |_, c| {
        c.iter_mut().for_each(|x| *x = a + b * *x * *x)
    });
    Ok(CurvWeight(k))
}

/// Per-voxel isotropic soft threshold with threshold `w/mu`:
/// the exact minimizer of `w|v| + (mu/2)|v - x|²`.
pub fn shrinkage(x: &VectorField3, w: &CurvWeight, mu: f64) -> Result<VectorField3> {
    if !(mu > 0.0) {
        return invalid(format!("shrinkage penalty must be positive, got {mu}"));
    }
    if w.len() != x.shape.len() {
        return invalid("weight and field shapes differ");
    }
    let mag = x.magnitude();
    let mut factor = vec![0.0; mag.len()];
    let ws = w.as_slice();
    par::fill_with(&mut factor, |p| {
        let m = mag[p];
        if m == 0.0 {
            0.0
        } else {
            (m - ws[p] / mu).max(0.0) / m
        }
    });
    let mut out = x.clone();
    for c in out.comps.iter_mut() {
        par::for_each_chunk_mut(c, 4096, |ci, chunk| {
            let base = ci * 4096;
            for (q, v) in chunk.iter_mut().enumerate() {
                *v *= factor[base + q];
            }
        });
    }
    Ok(out)
}

/// Fourier symbol of `∇*∇`: `Σ 4 sin²(π k_i / n_i) / h_i²`.
pub fn laplacian_symbol(shape: Shape) -> Vec<f64> {
    let [n0, n1, n2] = shape.dims;
    let axis = |n: usize, h: f64| -> Vec<f64> {
        (0..n)
            .map(|k| 4.0 * (PI * k as f64 / n as f64).sin().powi(2) / (h * h))
            .collect()
    };
    let (s0, s1, s2) = (
        axis(n0, shape.pitch[0]),
        axis(n1, shape.pitch[1]),
        axis(n2, shape.pitch[2]),
    );
    let mut out = vec![0.0; shape.len()];
    par::fill_with(&mut out, |p| {
        let k = p % n2;
        let j = (p / n2) % n1;
        let i = p / (n1 * n2);
        s0[i] + s1[j] + s2[k]
    });
    out
}

/// Cached FFT solver for `(alpha I + mu ∇*∇) u = rhs` on a fixed shape.
#[derive(Clone, Debug)]
pub struct ScreenedPoisson {
    shape: Shape,
    fft: Fft3,
    symbol: Vec<f64>,
}

impl ScreenedPoisson {
    pub fn new(shape: Shape) -> Self {
        ScreenedPoisson {
            shape,
            fft: Fft3::new(shape.dims),
            symbol: laplacian_symbol(shape),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn solve(&self, rhs: &[f64], alpha: f64, mu: f64) -> Result<Vec<f64>> {
        if !(alpha > 0.0) {
            return invalid(format!(
                "screening coefficient must be positive, got {alpha}"
            ));
        }
        if !(mu >= 0.0) {
            return invalid(format!("penalty must be nonnegative, got {mu}"));
        }
        if rhs.len() != self.shape.len() {
            return invalid("right-hand side does not match solver shape");
        }
        let mut buf: Vec<Complex64> = rhs.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.fft.forward(&mut buf);
        let sym = &self.symbol;
        par::for_each_chunk_mut(&mut buf, 4096, |ci, chunk| {
            let base = ci * 4096;
            for (q, v) in chunk.iter_mut().enumerate() {
                *v /= alpha + mu * sym[base + q];
            }
        });
        self.fft.inverse(&mut buf);
        Ok(buf.into_iter().map(|c| c.re).collect())
    }
}

/// One-shot screened-Poisson solve; see [`ScreenedPoisson`].
pub fn screened_poisson_solve(rhs: &[f64], shape: Shape, alpha: f64, mu: f64) -> Result<Vec<f64>> {
    ScreenedPoisson::new(shape).solve(rhs, alpha, mu)
}

/// `alpha u + mu ∇*∇ u`
pub fn apply_screened(u: &[f64], shape: Shape, alpha: f64, mu: f64) -> Vec<f64> {
    let mut out = gradient_adjoint(&gradient(u, shape));
    par::scale(mu, &mut out);
    par::axpy(alpha, u, &mut out);
    out
}

/// `Σ w |∇f|`, the weighted total variation.
pub fn weighted_tv(f: &[f64], shape: Shape, w: &CurvWeight) -> f64 {
    let mag = gradient(f, shape).magnitude();
    let ws = w.as_slice();
    par::sum_by(mag.len(), |p| ws[p] * mag[p])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn random_field(shape: Shape, rng: &mut ChaCha8Rng) -> VectorField3 {
        let n = shape.len();
        VectorField3::from_components(shape, [random(n, rng), random(n, rng), random(n, rng)])
            .unwrap()
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let shape = Shape::new([4, 5, 6], [0.5, 1.0, 2.0]);
        let g = gradient(&vec![3.25; shape.len()], shape);
        assert!(g.components().iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn gradient_of_ramp_with_seam() {
        let shape = Shape::new([3, 2, 5], [1.0, 1.0, 0.25]);
        let f: Vec<f64> = (0..shape.len()).map(|p| (p % 5) as f64).collect();
        let g = gradient(&f, shape);
        for p in 0..shape.len() {
            let expect = if p % 5 == 4 { (1.0 - 5.0) / 0.25 } else { 4.0 };
            assert_eq!(g.component(2)[p], expect);
            assert_eq!(g.component(0)[p], 0.0);
        }
    }

    #[test]
    fn adjoint_identity_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for shape in [
            Shape::new([8, 8, 8], [0.1, 0.2, 0.3]),
            Shape::unit([8, 16, 32]),
        ] {
            for _ in 0..10 {
                let f = random(shape.len(), &mut rng);
                let g = random_field(shape, &mut rng);
                let lhs = gradient(&f, shape).dot(&g);
                let rhs = par::dot(&f, &gradient_adjoint(&g));
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                    "{lhs} vs {rhs}"
                );
                let div = divergence(&g);
                assert!((lhs + par::dot(&f, &div)).abs() <= 1e-12 * lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn divergence_of_zero_field() {
        let shape = Shape::unit([3, 3, 3]);
        assert!(divergence(&VectorField3::zeros(shape))
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn div_grad_sinusoid_eigenpair() {
        let shape = Shape::new([8, 6, 10], [0.5, 1.0, 0.2]);
        let k = [1usize, 2, 3];
        let s: Vec<f64> = (0..shape.len())
            .map(|p| {
                let (i, j, l) = (p / 60, (p / 10) % 6, p % 10);
                (2.0 * PI
                    * (k[0] as f64 * i as f64 / 8.0
                        + k[1] as f64 * j as f64 / 6.0
                        + k[2] as f64 * l as f64 / 10.0))
                    .cos()
            })
            .collect();
        let lam: f64 = (0..3)
            .map(|a| {
                4.0 * (PI * k[a] as f64 / shape.dims[a] as f64).sin().powi(2)
                    / shape.pitch[a].powi(2)
            })
            .sum();
        let dg = divergence(&gradient(&s, shape));
        for p in 0..shape.len() {
            assert!((dg[p] + lam * s[p]).abs() < 1e-9 * lam);
        }
    }

    #[test]
    fn curvature_of_ramp_is_flat() {
        let shape = Shape::new([6, 6, 12], [1.0, 1.0, 1.0]);
        let f: Vec<f64> = (0..shape.len()).map(|p| 0.7 * (p % 12) as f64).collect();
        let k = curvature(&f, shape, 1e-8).unwrap();
        for (p, kp) in k.iter().enumerate() {
            if (1..=10).contains(&(p % 12)) {
                assert!(kp.abs() <= 1e-8, "{kp}");
            }
        }
    }

    #[test]
    fn curvature_of_sphere_distance() {
        let n = 32;
        let h = 0.1;
        let shape = Shape::new([n; 3], [h; 3]);
        let c = 16.0 * h;
        let r = |p: usize| {
            let (i, j, l) = (p / (n * n), (p / n) % n, p % n);
            let d = |q: usize| q as f64 * h - c;
            (d(i).powi(2) + d(j).powi(2) + d(l).powi(2)).sqrt()
        };
        let f: Vec<f64> = (0..shape.len()).map(|p| r(p) - 0.8).collect();
        let k = curvature(&f, shape, 1e-8).unwrap();
        let mut checked = 0;
        for (p, kp) in k.iter().enumerate() {
            let (i, j, l) = (p / (n * n), (p / n) % n, p % n);
            let interior = [i, j, l].iter().all(|&q| (3..n - 3).contains(&q));
            let rp = r(p);
            if interior && rp >= 5.0 * h && rp <= 10.0 * h {
                let rel = (kp - 2.0 / rp).abs() / (2.0 / rp);
                assert!(rel < 0.10, "r={rp} kappa={kp} rel={rel}");
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn curvature_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shape = Shape::unit([6, 7, 8]);
        // dyadic values keep the constant shift exact
        let f: Vec<f64> = (0..shape.len())
            .map(|_| rng.random_range(-64i32..64) as f64 / 8.0)
            .collect();
        let k = curvature(&f, shape, 1e-3).unwrap();
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let kn = curvature(&neg, shape, 1e-3).unwrap();
        let shifted: Vec<f64> = f.iter().map(|v| v + 4.0).collect();
        let ks = curvature(&shifted, shape, 1e-3).unwrap();
        for p in 0..shape.len() {
            assert_eq!(kn[p], -k[p]);
            assert_eq!(ks[p], k[p]);
        }
        assert!(curvature(&f, shape, 0.0).is_err());
    }

    #[test]
    fn curv_weight_cases() {
        let shape = Shape::unit([4, 4, 4]);
        let w = curv_weight(&vec![2.0; 64], shape, 0.3, 0.7, 1e-8).unwrap();
        assert!(w.as_slice().iter().all(|&x| x == 0.3));
        let f: Vec<f64> = (0..64).map(|p| (p * p % 13) as f64).collect();
        let w = curv_weight(&f, shape, 0.25, 0.0, 1e-8).unwrap();
        assert!(w.as_slice().iter().all(|&x| x == 0.25));
        // a = b = 5e-5 with unit curvature
        assert!((5e-5 + 5e-5 * 1.0f64.powi(2) - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn shrinkage_examples() {
        let shape = Shape::unit([1, 1, 2]);
        let x =
            VectorField3::from_components(shape, [vec![3.0, 0.5], vec![0.0, 0.5], vec![0.0, 0.0]])
                .unwrap();
        let out = shrinkage(&x, &CurvWeight::constant(2, 2.0), 2.0).unwrap();
        assert_eq!(out.at(0), [2.0, 0.0, 0.0]);
        assert_eq!(out.at(1), [0.0, 0.0, 0.0]);
        let zero = VectorField3::zeros(shape);
        assert_eq!(
            shrinkage(&zero, &CurvWeight::constant(2, 1.0), 1.0).unwrap(),
            zero
        );
        assert!(shrinkage(&x, &CurvWeight::constant(2, 1.0), 0.0).is_err());
    }

    #[test]
    fn shrinkage_zero_weight_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let shape = Shape::unit([3, 4, 5]);
        let x = random_field(shape, &mut rng);
        assert_eq!(
            shrinkage(&x, &CurvWeight::constant(60, 0.0), 0.3).unwrap(),
            x
        );
    }

    #[test]
    fn screened_poisson_pure_screening() {
        let shape = Shape::unit([4, 4, 4]);
        let rhs: Vec<f64> = (0..64).map(|p| p as f64 - 10.0).collect();
        let u = screened_poisson_solve(&rhs, shape, 4.0, 0.0).unwrap();
        for (a, b) in u.iter().zip(&rhs) {
            assert!((a - b / 4.0).abs() < 1e-12);
        }
        assert!(screened_poisson_solve(&rhs, shape, 0.0, 1.0).is_err());
        assert!(screened_poisson_solve(&rhs, shape, -1.0, 1.0).is_err());
    }

    #[test]
    fn screened_poisson_eigenpair_and_residual() {
        let shape = Shape::new([8, 8, 16], [0.5, 0.5, 0.25]);
        let (alpha, mu) = (1.7, 0.3);
        let k = [1usize, 3, 5];
        let s: Vec<f64> = (0..shape.len())
            .map(|p| {
                let (i, j, l) = (p / 128, (p / 16) % 8, p % 16);
                (2.0 * PI
                    * (k[0] as f64 * i as f64 / 8.0
                        + k[1] as f64 * j as f64 / 8.0
                        + k[2] as f64 * l as f64 / 16.0))
                    .sin()
            })
            .collect();
        let lam: f64 = (0..3)
            .map(|a| {
                4.0 * (PI * k[a] as f64 / shape.dims[a] as f64).sin().powi(2)
                    / shape.pitch[a].powi(2)
            })
            .sum();
        let rhs: Vec<f64> = s.iter().map(|v| (alpha + mu * lam) * v).collect();
        let u = screened_poisson_solve(&rhs, shape, alpha, mu).unwrap();
        for (a, b) in u.iter().zip(&s) {
            assert!((a - b).abs() < 1e-10);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rhs = random(shape.len(), &mut rng);
        let u = screened_poisson_solve(&rhs, shape, alpha, mu).unwrap();
        let back = apply_screened(&u, shape, alpha, mu);
        let res: Vec<f64> = back.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        assert!(par::norm(&res) / par::norm(&rhs) <= 1e-10);
    }
}
