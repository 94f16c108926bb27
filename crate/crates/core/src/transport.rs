//! Confocal light transport.
//!
//! The volumetric albedo model maps a voxel at distance `d` from a scan point
//! to the time bin containing `2d/c` with weight `ΔV / d⁴`. Substituting
//! `v = (tc/2)²` and `w = z²` turns it into a shift-invariant 3D convolution:
//!
//! ```text
//! v^{3/2} τ(x', y', v) = ∫ u(x, y, √w) / (2√w) · δ(v - w - (x'-x)² - (y'-y)²) dx dy dw
//! ```
//!
//! [`LightTransport`] discretizes this as `A = R_t⁻¹ H R_z`: `R_z` resamples
//! each voxel column onto a uniform grid in `w`, `H` convolves with the
//! binned hypercone on a zero-padded grid, and `R_t⁻¹` integrates the
//! result over each time bin's `v` interval with the `v⁻²` attenuation.
//! [`forward_direct`] evaluates the model voxel by voxel and is the oracle
//! the operator is tested against.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::fft::Fft3;
use crate::grid::{ScanMask, Transient, TransientGrid, Volume, VolumeGrid};
use crate::par;

/// Power-iteration steps used for the Lipschitz constant.
pub const NORM_ITERS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportOptions {
    /// Samples of the squared-distance axis per time bin.
    pub oversample: usize,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { oversample: 2 }
    }
}

/// Linear interpolation of one `w` sample from the two nearest voxel centers,
/// already multiplied by `1/(2√w)`.
#[derive(Clone, Copy, Debug)]
struct DepthTap {
    lo: usize,
    w_lo: f64,
    w_hi: f64,
    /// `1/(2√w)`; the interpolation weights sum to one before this factor.
    jacobian: f64,
}

/// Precomputed resampling maps and hypercone spectrum realizing `A` and `Aᵀ`.
#[derive(Clone, Debug)]
pub struct LightTransport {
    vol: VolumeGrid,
    tr: TransientGrid,
    /// Width of one bin on the squared-distance axis (m²).
    sq_step: f64,
    n_v: usize,
    n_w: usize,
    /// `R_z`: one optional tap per `w` sample (`None` outside the volume).
    rz: Vec<Option<DepthTap>>,
    /// `R_t⁻¹` in CSR form: `v` bin `k` feeds time bins `rt_idx[rt_ptr[k]..rt_ptr[k+1]]`.
    rt_ptr: Vec<usize>,
    rt_idx: Vec<usize>,
    rt_w: Vec<f64>,
    padded: [usize; 3],
    fft: Fft3,
    kernel_fft: Vec<Complex64>,
    gain: f64,
    /// Per-bin weights folded into `R_t⁻¹` by [`LightTransport::falloff_compensated`].
    bin_weights: Option<Vec<f64>>,
}

impl LightTransport {
    pub fn new(vol: VolumeGrid, tr: TransientGrid) -> Result<Self> {
        Self::with_options(vol, tr, TransportOptions::default())
    }

    pub fn with_options(
        vol: VolumeGrid,
        tr: TransientGrid,
        opts: TransportOptions,
    ) -> Result<Self> {
        check_coregistered(&vol, &tr)?;
        if opts.oversample == 0 {
            return invalid("oversample must be at least 1");
        }
        let range = tr.depth_range();
        let n_v = opts.oversample * tr.nt;
        let sq_step = range * range / n_v as f64;
        let n_w = ((vol.z_max() * vol.z_max() / sq_step).ceil() as usize).clamp(1, n_v);

        let pz = vol.pitch()[2];
        let rz = (0..n_w)
            .map(|m| {
                let w = (m as f64 + 0.5) * sq_step;
                let z = w.sqrt();
                if z > vol.z_max() {
                    return None;
                }
                let s = (z / pz - 0.5).clamp(0.0, (vol.nz - 1) as f64);
                let lo = (s.floor() as usize).min(vol.nz - 2);
                let f = s - lo as f64;
                Some(DepthTap {
                    lo,
                    w_lo: 1.0 - f,
                    w_hi: f,
                    jacobian: 0.5 / z,
                })
            })
            .collect();

        // each v bin integrates v⁻² over its overlap with every time bin
        let bd = tr.bin_depth();
        let [wx, wy] = tr.wall_pitch();
        let area = wx * wy;
        let mut rt_ptr = Vec::with_capacity(n_v + 1);
        let mut rt_idx = Vec::new();
        let mut rt_w = Vec::new();
        rt_ptr.push(0);
        for k in 0..n_v {
            let (lo, hi) = (k as f64 * sq_step, (k + 1) as f64 * sq_step);
            let v_mid = (k as f64 + 0.5) * sq_step;
            let atten = area / (v_mid * v_mid);
            let j_first = (lo.sqrt() / bd).floor() as usize;
            for j in j_first..tr.nt {
                let (b_lo, b_hi) = ((j as f64 * bd).powi(2), ((j + 1) as f64 * bd).powi(2));
                if b_lo >= hi {
                    break;
                }
                let overlap = hi.min(b_hi) - lo.max(b_lo);
                if overlap > 0.0 {
                    rt_idx.push(j);
                    rt_w.push(overlap * atten);
                }
            }
            rt_ptr.push(rt_idx.len());
        }

        let padded = [2 * vol.nx, 2 * vol.ny, 2 * n_v];
        let fft = Fft3::new(padded);
        let kernel_fft = hypercone_spectrum(&vol, sq_step, n_v, padded, &fft);

        Ok(LightTransport {
            vol,
            tr,
            sq_step,
            n_v,
            n_w,
            rz,
            rt_ptr,
            rt_idx,
            rt_w,
            padded,
            fft,
            kernel_fft,
            gain: 1.0,
            bin_weights: None,
        })
    }

    /// Same operator rescaled so that `‖A‖₂ ≈ 1` (full sampling). Data
    /// simulated and reconstructed with the same normalized operator differ
    /// from physical units by one global factor.
    pub fn normalized(mut self) -> Self {
        self.gain = 1.0;
        let full = ScanMask::full(self.tr.ns_x, self.tr.ns_y);
        let n2 = operator_norm_sq(&self, &full, NORM_ITERS, 0);
        if n2 > 0.0 {
            self.gain = 1.0 / n2.sqrt();
        }
        self
    }

    /// Same operator rescaled so that a unit-albedo voxel on the central
    /// column at half the depth range returns a total of one count summed
    /// over all scan points and bins. With this scale, a photon scale `s`
    /// means `s` expected photons from that reference voxel.
    pub fn calibrated(mut self) -> Self {
        self.gain = 1.0;
        let g = self.vol;
        let mut probe = vec![0.0; g.len()];
        probe[g.shape().index(g.nx / 2, g.ny / 2, g.nz / 2)] = 1.0;
        let total: f64 = self.apply(&probe).iter().sum();
        if total > 0.0 {
            self.gain = 1.0 / total;
        }
        self
    }

    /// `W A` with `W = diag((d_j / d_max)⁴)` at time-bin center distances
    /// `d_j`, which undoes the `1/d⁴` falloff so that deep voxels are not
    /// swamped by those near the wall. Pair with [`LightTransport::compensate`]
    /// on the data; call before [`LightTransport::normalized`].
    pub fn falloff_compensated(mut self) -> Self {
        if self.bin_weights.is_some() {
            return self;
        }
        let w = falloff_weights(&self.tr);
        for (rw, &j) in self.rt_w.iter_mut().zip(&self.rt_idx) {
            *rw *= w[j];
        }
        self.bin_weights = Some(w);
        self
    }

    pub fn bin_weights(&self) -> Option<&[f64]> {
        self.bin_weights.as_deref()
    }

    /// Maps physical data into this operator's range: `W τ` when compensated,
    /// `τ` otherwise.
    pub fn compensate(&self, t: &Transient) -> Result<Transient> {
        self.reweight(t, |w| w)
    }

    /// Inverse of [`LightTransport::compensate`].
    pub fn decompensate(&self, t: &Transient) -> Result<Transient> {
        self.reweight(t, |w| 1.0 / w)
    }

    fn reweight(&self, t: &Transient, f: impl Fn(f64) -> f64) -> Result<Transient> {
        if t.grid() != &self.tr {
            return invalid("transient grid does not match the transport operator");
        }
        let Some(w) = &self.bin_weights else {
            return Ok(t.clone());
        };
        let nt = self.tr.nt;
        let data = t
            .data()
            .iter()
            .enumerate()
            .map(|(p, &v)| v * f(w[p % nt]))
            .collect();
        Transient::new(self.tr, data)
    }

    pub fn volume_grid(&self) -> &VolumeGrid {
        &self.vol
    }

    pub fn transient_grid(&self) -> &TransientGrid {
        &self.tr
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn padded_dims(&self) -> [usize; 3] {
        self.padded
    }

    pub fn kernel_fft(&self) -> &[Complex64] {
        &self.kernel_fft
    }

    pub fn sq_step(&self) -> f64 {
        self.sq_step
    }

    /// Interpolation weights of `R_z` before the `1/(2√w)` factor, one row
    /// per `w` sample inside the volume.
    pub fn depth_interp_row_sums(&self) -> Vec<f64> {
        self.rz.iter().flatten().map(|t| t.w_lo + t.w_hi).collect()
    }

    /// Fraction of each `v` bin covered by time bins, before attenuation.
    pub fn time_overlap_row_sums(&self) -> Vec<f64> {
        (0..self.n_v)
            .map(|k| {
                let v_mid = (k as f64 + 0.5) * self.sq_step;
                let [wx, wy] = self.tr.wall_pitch();
                let atten = wx * wy / (v_mid * v_mid);
                (self.rt_ptr[k]..self.rt_ptr[k + 1])
                    .map(|e| self.rt_w[e] / atten)
                    .sum::<f64>()
                    / self.sq_step
            })
            .collect()
    }

    /// `τ = A u`
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.vol.len());
        let mut buf = self.lift_volume(u);
        self.fft.forward(&mut buf);
        multiply(&mut buf, &self.kernel_fft, false);
        self.fft.inverse(&mut buf);
        self.collapse_time(&buf)
    }

    /// `u = Aᵀ τ`
    pub fn apply_adjoint(&self, t: &[f64]) -> Vec<f64> {
        assert_eq!(t.len(), self.tr.len());
        let mut buf = self.lift_time(t);
        self.fft.forward(&mut buf);
        multiply(&mut buf, &self.kernel_fft, true);
        self.fft.inverse(&mut buf);
        self.collapse_volume(&buf)
    }

    /// `R_z u` written into a zeroed padded buffer.
    fn lift_volume(&self, u: &[f64]) -> Vec<Complex64> {
        let [_, py, pz] = self.padded;
        let (ny, nz) = (self.vol.ny, self.vol.nz);
        let mut buf = vec![Complex64::default(); self.fft.len()];
        par::for_each_chunk_mut(&mut buf, py * pz, |i, slab| {
            if i >= self.vol.nx {
                return;
            }
            for j in 0..ny {
                let col = &u[(i * ny + j) * nz..(i * ny + j + 1) * nz];
                let dst = &mut slab[j * pz..j * pz + self.n_w];
                for (d, tap) in dst.iter_mut().zip(&self.rz) {
                    if let Some(t) = tap {
                        d.re = t.jacobian * (t.w_lo * col[t.lo] + t.w_hi * col[t.lo + 1]);
                    }
                }
            }
        });
        buf
    }

    /// `R_zᵀ` applied to the leading `w` samples of the padded buffer.
    fn collapse_volume(&self, buf: &[Complex64]) -> Vec<f64> {
        let [_, py, pz] = self.padded;
        let (ny, nz) = (self.vol.ny, self.vol.nz);
        let gain = self.gain;
        let mut u = vec![0.0; self.vol.len()];
        par::for_each_chunk_mut(&mut u, nz, |c, col| {
            let (i, j) = (c / ny, c % ny);
            let src = &buf[(i * py + j) * pz..(i * py + j) * pz + self.n_w];
            for (s, tap) in src.iter().zip(&self.rz) {
                if let Some(t) = tap {
                    let g = gain * t.jacobian * s.re;
                    col[t.lo] += t.w_lo * g;
                    col[t.lo + 1] += t.w_hi * g;
                }
            }
        });
        u
    }

    /// `R_t⁻¹` applied to the leading `v` samples of the padded buffer.
    fn collapse_time(&self, buf: &[Complex64]) -> Vec<f64> {
        let [_, py, pz] = self.padded;
        let (ns_y, nt) = (self.tr.ns_y, self.tr.nt);
        let gain = self.gain;
        let mut t = vec![0.0; self.tr.len()];
        par::for_each_chunk_mut(&mut t, nt, |c, hist| {
            let (a, b) = (c / ns_y, c % ns_y);
            let src = &buf[(a * py + b) * pz..(a * py + b) * pz + self.n_v];
            for (k, s) in src.iter().enumerate() {
                let g = gain * s.re;
                for e in self.rt_ptr[k]..self.rt_ptr[k + 1] {
                    hist[self.rt_idx[e]] += self.rt_w[e] * g;
                }
            }
        });
        t
    }

    /// `R_t⁻ᵀ τ` written into a zeroed padded buffer.
    fn lift_time(&self, t: &[f64]) -> Vec<Complex64> {
        let [_, py, pz] = self.padded;
        let (ns_y, nt) = (self.tr.ns_y, self.tr.nt);
        let mut buf = vec![Complex64::default(); self.fft.len()];
        par::for_each_chunk_mut(&mut buf, py * pz, |a, slab| {
            if a >= self.tr.ns_x {
                return;
            }
            for b in 0..ns_y {
                let hist = &t[(a * ns_y + b) * nt..(a * ns_y + b + 1) * nt];
                let dst = &mut slab[b * pz..b * pz + self.n_v];
                for (k, d) in dst.iter_mut().enumerate() {
                    d.re = (self.rt_ptr[k]..self.rt_ptr[k + 1])
                        .map(|e| self.rt_w[e] * hist[self.rt_idx[e]])
                        .sum();
                }
            }
        });
        buf
    }
}

/// `(d_j / d_max)⁴` with `d_j` the center distance of bin `j`.
pub fn falloff_weights(tr: &TransientGrid) -> Vec<f64> {
    let nt = tr.nt as f64;
    (0..tr.nt)
        .map(|j| ((j as f64 + 0.5) / nt).powi(4))
        .collect()
}

fn check_coregistered(vol: &VolumeGrid, tr: &TransientGrid) -> Result<()> {
    if vol.nx != tr.ns_x || vol.ny != tr.ns_y {
        return invalid(format!(
            "volume columns {}x{} must match scan points {}x{}",
            vol.nx, vol.ny, tr.ns_x, tr.ns_y
        ));
    }
    let [px, py, _] = vol.pitch();
    let [wx, wy] = tr.wall_pitch();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    if !close(px, wx) || !close(py, wy) {
        return invalid("voxel pitch and wall pitch differ");
    }
    Ok(())
}

/// Spectrum of `h(Δx, Δy, Δv) = 1[Δv bin contains Δx² + Δy²]`, laid out
/// circularly on the padded grid.
fn hypercone_spectrum(
    vol: &VolumeGrid,
    sq_step: f64,
    n_v: usize,
    padded: [usize; 3],
    fft: &Fft3,
) -> Vec<Complex64> {
    let [p0, p1, p2] = padded;
    let [px, py, _] = vol.pitch();
    let mut k = vec![Complex64::default(); fft.len()];
    let (nx, ny) = (vol.nx as isize, vol.ny as isize);
    for di in -(nx - 1)..nx {
        for dj in -(ny - 1)..ny {
            let rho2 = (di as f64 * px).powi(2) + (dj as f64 * py).powi(2);
            let bin = (rho2 / sq_step).round() as usize;
            if bin >= n_v {
                continue;
            }
            let i = di.rem_euclid(p0 as isize) as usize;
            let j = dj.rem_euclid(p1 as isize) as usize;
            k[(i * p1 + j) * p2 + bin].re += 1.0;
        }
    }
    fft.forward(&mut k);
    k
}

fn multiply(buf: &mut [Complex64], kernel: &[Complex64], conjugate: bool) {
    par::for_each_chunk_mut(buf, 4096, |ci, chunk| {
        let base = ci * 4096;
        for (q, v) in chunk.iter_mut().enumerate() {
            let k = kernel[base + q];
            *v *= if conjugate { k.conj() } else { k };
        }
    });
}

/// Brute-force evaluation of the volumetric albedo model: every voxel adds
/// `u ΔV / d⁴` to the bin containing `2d/c`. `O(ns² · nx·ny·nz)`.
pub fn forward_direct(u: &Volume, tr: &TransientGrid) -> Result<Transient> {
    forward_direct_sampled(u, tr, 1)
}

/// [`forward_direct`] with every voxel split into `depth_samples` point
/// masses evenly spaced through its depth. When time bins are finer than the
/// voxel pitch, one sample per voxel aliases onto alternating bins; a few
/// samples per voxel resolve the piecewise-constant volume instead.
pub fn forward_direct_sampled(
    u: &Volume,
    tr: &TransientGrid,
    depth_samples: usize,
) -> Result<Transient> {
    let vg = *u.grid();
    if depth_samples == 0 {
        return invalid("depth_samples must be at least 1");
    }
    let [wx, wy] = tr.wall_pitch();
    let [px, py, pz] = vg.pitch();
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    if !same(px * vg.nx as f64, wx * tr.ns_x as f64)
        || !same(py * vg.ny as f64, wy * tr.ns_y as f64)
    {
        return invalid("volume and wall extents differ");
    }
    let dv = vg.voxel_volume() / depth_samples as f64;
    let offsets: Vec<f64> = (0..depth_samples)
        .map(|q| ((q as f64 + 0.5) / depth_samples as f64 - 0.5) * pz)
        .collect();
    let bd = tr.bin_depth();
    let nt = tr.nt;
    let sources: Vec<([f64; 3], f64)> = (0..vg.nx)
        .flat_map(|i| (0..vg.ny).flat_map(move |j| (0..vg.nz).map(move |k| (i, j, k))))
        .filter_map(|(i, j, k)| {
            let a = u.get(i, j, k);
            (a != 0.0).then(|| (vg.center(i, j, k), a))
        })
        .collect();
    let mut data = vec![0.0; tr.len()];
    par::for_each_chunk_mut(&mut data, nt, |c, hist| {
        let [sx, sy] = tr.scan_point(c / tr.ns_y, c % tr.ns_y);
        for &([x, y, zc], a) in &sources {
            let lateral = (x - sx).powi(2) + (y - sy).powi(2);
            for off in &offsets {
                let z = zc + off;
                let d2 = lateral + z * z;
                let j = (d2.sqrt() / bd).floor() as usize;
                if j < nt {
                    hist[j] += a * dv / (d2 * d2);
                }
            }
        }
    });
    Transient::new(*tr, data)
}

fn check_volume(op: &LightTransport, u: &Volume) -> Result<()> {
    if u.grid() != &op.vol {
        return invalid("volume grid does not match the transport operator");
    }
    Ok(())
}

fn check_transient(op: &LightTransport, t: &Transient) -> Result<()> {
    if t.grid() != &op.tr {
        return invalid("transient grid does not match the transport operator");
    }
    Ok(())
}

pub fn forward(op: &LightTransport, u: &Volume) -> Result<Transient> {
    check_volume(op, u)?;
    Transient::new(op.tr, op.apply(u.data()))
}

pub fn adjoint(op: &LightTransport, t: &Transient) -> Result<Volume> {
    check_transient(op, t)?;
    Volume::new(op.vol, op.apply_adjoint(t.data()))
}

/// Back-projection baseline: `Aᵀτ`, clamped to be nonnegative and scaled to
/// a maximum of one.
pub fn backproject(op: &LightTransport, t: &Transient) -> Result<Volume> {
    check_transient(op, t)?;
    let mut u = op.apply_adjoint(t.data());
    u.iter_mut().for_each(|v| *v = v.max(0.0));
    let max = u.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        u.iter_mut().for_each(|v| *v /= max);
    }
    Volume::new(op.vol, u)
}

/// Wiener-filtered light-cone inversion. The kernel spectrum is normalized to
/// unit peak magnitude, so `snr` is independent of the operator's scale.
pub fn lct_reconstruct(op: &LightTransport, t: &Transient, snr: f64) -> Result<Volume> {
    if !(snr > 0.0 && snr.is_finite()) {
        return invalid(format!("snr must be positive, got {snr}"));
    }
    check_transient(op, t)?;
    let tr = op.tr;
    let [_, py, pz] = op.padded;
    let bd = tr.bin_depth();
    let nt = tr.nt;

    // time -> v with v^{3/2} attenuation
    let data = t.data();
    let mut buf = vec![Complex64::default(); op.fft.len()];
    par::for_each_chunk_mut(&mut buf, py * pz, |a, slab| {
        if a >= tr.ns_x {
            return;
        }
        for b in 0..tr.ns_y {
            let hist = &data[(a * tr.ns_y + b) * nt..(a * tr.ns_y + b + 1) * nt];
            for k in 0..op.n_v {
                let v = (k as f64 + 0.5) * op.sq_step;
                let s = (v.sqrt() / bd - 0.5).clamp(0.0, (nt - 1) as f64);
                let lo = (s.floor() as usize).min(nt - 2);
                let f = s - lo as f64;
                slab[b * pz + k].re = v.powf(1.5) * ((1.0 - f) * hist[lo] + f * hist[lo + 1]);
            }
        }
    });

    op.fft.forward(&mut buf);
    let peak = op.kernel_fft.iter().map(|k| k.norm()).fold(0.0, f64::max);
    let inv_snr = 1.0 / snr;
    let kernel = &op.kernel_fft;
    par::for_each_chunk_mut(&mut buf, 4096, |ci, chunk| {
        let base = ci * 4096;
        for (q, x) in chunk.iter_mut().enumerate() {
            let h = kernel[base + q] / peak;
            *x *= h.conj() / (h.norm_sqr() + inv_snr);
        }
    });
    op.fft.inverse(&mut buf);

    // w -> z: average of the w samples that interpolate into each voxel, times 2√w
    let (ny, nz) = (op.vol.ny, op.vol.nz);
    let mut u = vec![0.0; op.vol.len()];
    par::for_each_chunk_mut(&mut u, nz, |c, col| {
        let (i, j) = (c / ny, c % ny);
        let src = &buf[(i * py + j) * pz..(i * py + j) * pz + op.n_w];
        let mut wsum = vec![0.0; nz];
        for (s, tap) in src.iter().zip(&op.rz) {
            if let Some(tp) = tap {
                let val = s.re / tp.jacobian;
                col[tp.lo] += tp.w_lo * val;
                col[tp.lo + 1] += tp.w_hi * val;
                wsum[tp.lo] += tp.w_lo;
                wsum[tp.lo + 1] += tp.w_hi;
            }
        }
        for (x, w) in col.iter_mut().zip(&wsum) {
            *x = if *w > 0.0 { (*x / w).max(0.0) } else { 0.0 };
        }
    });
    Volume::new(op.vol, u)
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by power
/// iteration from a seeded random start. Returns the Rayleigh quotient of the
/// last iterate, which is nondecreasing in `iters`.
pub fn power_iteration<F>(mut apply: F, n: usize, iters: usize, seed: u64) -> f64
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nx = par::norm(&x);
    if nx == 0.0 {
        return 0.0;
    }
    par::scale(1.0 / nx, &mut x);
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let y = apply(&x);
        estimate = par::dot(&x, &y);
        let ny = par::norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        x = y;
        par::scale(1.0 / ny, &mut x);
    }
    estimate
}

/// `‖D A‖²` where `D` keeps the scanned points of `mask`.
pub fn operator_norm_sq(op: &LightTransport, mask: &ScanMask, iters: usize, seed: u64) -> f64 {
    let weights = mask.sample_weights(op.tr.nt);
    power_iteration(
        |x| {
            let mut t = op.apply(x);
            t.iter_mut().zip(&weights).for_each(|(v, w)| *v *= w);
            op.apply_adjoint(&t)
        },
        op.vol.len(),
        iters,
        seed,
    )
}
