//! Accuracy, depth RMSE, PSNR and SSIM on front-view projections.

use crate::error::{invalid, Result};
use crate::grid::Volume;

pub const DEFAULT_FG_THRESHOLD: f64 = 0.1;
pub const PSNR_CAP: f64 = 99.0;
const SSIM_WINDOW: usize = 8;
const SSIM_C1: f64 = 1e-4;
const SSIM_C2: f64 = 9e-4;

/// Max-intensity projection along z. Pixel `(i, j)` lives at `i * ny + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthIntensityMap {
    pub nx: usize,
    pub ny: usize,
    pub intensity: Vec<f64>,
    /// Meters on foreground pixels, NaN elsewhere.
    pub depth: Vec<f64>,
    pub foreground: Vec<bool>,
    /// Depth extent of the source volume.
    pub z_max: f64,
}

impl DepthIntensityMap {
    pub fn dims(&self) -> [usize; 2] {
        [self.nx, self.ny]
    }

    pub fn foreground_count(&self) -> usize {
        self.foreground.iter().filter(|&&f| f).count()
    }
}

pub fn project(u: &Volume, fg_threshold: f64) -> Result<DepthIntensityMap> {
    if !(fg_threshold > 0.0 && fg_threshold < 1.0) {
        return invalid(format!(
            "fg_threshold must lie in (0, 1), got {fg_threshold}"
        ));
    }
    let g = u.grid();
    let (nx, ny, nz) = (g.nx, g.ny, g.nz);
    let pz = g.pitch()[2];
    let mut intensity = vec![0.0; nx * ny];
    let mut arg = vec![0usize; nx * ny];
    for (p, column) in u.data().chunks_exact(nz).enumerate() {
        let (mut best, mut at) = (column[0], 0);
        for (k, &v) in column.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                at = k;
            }
        }
        intensity[p] = best.max(0.0);
        arg[p] = at;
    }
    let peak = intensity.iter().cloned().fold(0.0, f64::max);
    if peak > 0.0 {
        intensity.iter_mut().for_each(|v| *v /= peak);
    }
    let foreground: Vec<bool> = intensity.iter().map(|&v| v > fg_threshold).collect();
    let depth = arg
        .iter()
        .zip(&foreground)
        .map(|(&k, &fg)| if fg { (k as f64 + 0.5) * pz } else { f64::NAN })
        .collect();
    Ok(DepthIntensityMap {
        nx,
        ny,
        intensity,
        depth,
        foreground,
        z_max: g.z_max(),
    })
}

fn check_dims(a: &DepthIntensityMap, b: &DepthIntensityMap) -> Result<()> {
    if a.dims() != b.dims() {
        return invalid(format!(
            "map shapes differ: {:?} vs {:?}",
            a.dims(),
            b.dims()
        ));
    }
    Ok(())
}

/// `(TP + TN) / total` over the foreground masks.
pub fn accuracy(pred: &DepthIntensityMap, truth: &DepthIntensityMap) -> Result<f64> {
    check_dims(pred, truth)?;
    let agree = pred
        .foreground
        .iter()
        .zip(&truth.foreground)
        .filter(|(a, b)| a == b)
        .count();
    Ok(agree as f64 / pred.foreground.len() as f64)
}

/// Depth RMSE over the shared foreground; 0 when nothing overlaps.
pub fn rmse_depth(pred: &DepthIntensityMap, truth: &DepthIntensityMap) -> Result<f64> {
    check_dims(pred, truth)?;
    let (mut sum, mut n) = (0.0, 0usize);
    for p in 0..pred.depth.len() {
        if pred.foreground[p] && truth.foreground[p] {
            sum += (pred.depth[p] - truth.depth[p]).powi(2);
            n += 1;
        }
    }
    Ok(if n == 0 { 0.0 } else { (sum / n as f64).sqrt() })
}

pub fn foreground_overlap(pred: &DepthIntensityMap, truth: &DepthIntensityMap) -> usize {
    pred.foreground
        .iter()
        .zip(&truth.foreground)
        .filter(|(&a, &b)| a && b)
        .count()
}

pub fn psnr(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return invalid("psnr needs two non-empty images of equal size");
    }
    let mse = pred
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(if mse < 1e-10 {
        PSNR_CAP
    } else {
        (10.0 * (1.0 / mse).log10()).min(PSNR_CAP)
    })
}

/// Mean SSIM over every 8×8 window; `dims` is `[nx, ny]` with row-major `i * ny + j`.
pub fn ssim(pred: &[f64], truth: &[f64], dims: [usize; 2]) -> Result<f64> {
    let [nx, ny] = dims;
    if pred.len() != nx * ny || truth.len() != nx * ny {
        return invalid("ssim image sizes do not match dims");
    }
    if nx < SSIM_WINDOW || ny < SSIM_WINDOW {
        return invalid(format!(
            "ssim needs at least {SSIM_WINDOW}×{SSIM_WINDOW} pixels"
        ));
    }
    let n = (SSIM_WINDOW * SSIM_WINDOW) as f64;
    let mut total = 0.0;
    let mut count = 0usize;
    for i0 in 0..=nx - SSIM_WINDOW {
        for j0 in 0..=ny - SSIM_WINDOW {
            let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in i0..i0 + SSIM_WINDOW {
                for j in j0..j0 + SSIM_WINDOW {
                    let (x, y) = (pred[i * ny + j], truth[i * ny + j]);
                    sx += x;
                    sy += y;
                    sxx += x * x;
                    syy += y * y;
                    sxy += x * y;
                }
            }
            let (mx, my) = (sx / n, sy / n);
            let vx = sxx / n - mx * mx;
            let vy = syy / n - my * my;
            let cov = sxy / n - mx * my;
            total += ((2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2))
                / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2));
            count += 1;
        }
    }
    Ok((total / count as f64).clamp(-1.0, 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub scene: String,
    pub method: String,
    pub mask: String,
    pub accuracy: f64,
    pub rmse_m: f64,
    pub psnr_db: f64,
    pub ssim: f64,
    pub runtime_s: f64,
    /// Set when predicted and true foregrounds do not intersect.
    pub empty_overlap: bool,
}

pub const CSV_HEADER: &str = "scene,method,mask,accuracy,rmse_m,psnr_db,ssim,runtime_s";

impl MetricsReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.scene,
            self.method,
            self.mask,
            fmt_sig(self.accuracy),
            fmt_sig(self.rmse_m),
            fmt_sig(self.psnr_db),
            fmt_sig(self.ssim),
            fmt_sig(self.runtime_s)
        )
    }
}

/// All four metrics of `pred` against `truth`, with descriptors left empty.
pub fn evaluate(pred: &Volume, truth: &Volume, fg_threshold: f64) -> Result<MetricsReport> {
    if pred.grid() != truth.grid() {
        return invalid("prediction and truth live on different grids");
    }
    let (p, t) = (project(pred, fg_threshold)?, project(truth, fg_threshold)?);
    Ok(MetricsReport {
        scene: String::new(),
        method: String::new(),
        mask: String::new(),
        accuracy: accuracy(&p, &t)?,
        rmse_m: rmse_depth(&p, &t)?,
        psnr_db: psnr(&p.intensity, &t.intensity)?,
        ssim: ssim(&p.intensity, &t.intensity, p.dims())?,
        runtime_s: 0.0,
        empty_overlap: foreground_overlap(&p, &t) == 0,
    })
}

/// C-style `%.6g`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.5e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-4..6).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
