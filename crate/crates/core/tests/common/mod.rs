#![allow(dead_code)]

use nlos_core::grid::{Volume, VolumeGrid};
use nlos_core::par;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Isotropic Gaussian truncated at 3σ.
pub fn blob(vg: &VolumeGrid, center: [f64; 3], sigma: f64) -> Volume {
    let mut data = vec![0.0; vg.len()];
    for i in 0..vg.nx {
        for j in 0..vg.ny {
            for k in 0..vg.nz {
                let c = vg.center(i, j, k);
                let r2: f64 = (0..3).map(|a| (c[a] - center[a]).powi(2)).sum();
                if r2 <= 9.0 * sigma * sigma {
                    data[vg.shape().index(i, j, k)] = (-r2 / (2.0 * sigma * sigma)).exp();
                }
            }
        }
    }
    Volume::new(*vg, data).unwrap()
}

pub fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn rel_l2(x: &[f64], reference: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(reference).map(|(a, b)| a - b).collect();
    par::norm(&d) / par::norm(reference)
}

pub fn argmax(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[best] {
            best = i;
        }
    }
    best
}
