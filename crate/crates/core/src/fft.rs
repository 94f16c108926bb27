//! Planned 3D complex FFT over a row-major buffer (last axis fastest).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::par;

#[derive(Clone)]
pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("dims", &self.dims).finish()
    }
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|n| planner.plan_fft(n, FftDirection::Forward));
        let inverse = dims.map(|n| planner.plan_fft(n, FftDirection::Inverse));
        Fft3 {
            dims,
            forward,
            inverse,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform in place, scaled by `1/N` so that
    /// `inverse(forward(x)) == x`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let s = 1.0 / self.len() as f64;
        par::for_each_chunk_mut(data, 8192, |_, c| c.iter_mut().for_each(|v| *v *= s));
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(
            data.len(),
            self.len(),
            "buffer does not match FFT dimensions"
        );
        let [n0, n1, n2] = self.dims;

        // axis 2: contiguous lines
        let p2 = &plans[2];
        par::for_each_chunk_mut(data, n2, |_, line| p2.process(line));

        // axis 1: strided within each axis-0 slab
        let p1 = &plans[1];
        par::for_each_chunk_mut(data, n1 * n2, |_, slab| {
            let mut line = vec![Complex64::default(); n1];
            for k in 0..n2 {
                for j in 0..n1 {
                    line[j] = slab[j * n2 + k];
                }
                p1.process(&mut line);
                for j in 0..n1 {
                    slab[j * n2 + k] = line[j];
                }
            }
        });

        // axis 0: gather into a transposed buffer, transform, scatter back
        let p0 = &plans[0];
        let lines = n1 * n2;
        let mut t = vec![Complex64::default(); data.len()];
        {
            let src = &*data;
            par::for_each_chunk_mut(&mut t, n0, |l, line| {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = src[i * lines + l];
                }
                p0.process(line);
            });
        }
        let t = &t;
        par::for_each_chunk_mut(data, lines, |i, slab| {
            for (l, v) in slab.iter_mut().enumerate() {
                *v = t[l * n0 + i];
            }
        });
    }
}
