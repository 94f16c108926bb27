//! Tensor containers, coordinate conventions and scan masks.
//!
//! All 3D tensors are stored with the last axis fastest: index
//! `(i * ny + j) * nz + k` for volumes and `(a * ns_y + b) * nt + k` for
//! transients. Voxel `(i, j, k)` has its center at `((i+0.5)px, (j+0.5)py,
//! (k+0.5)pz)`; scan point `(a, b)` sits on the `z = 0` wall at
//! `((a+0.5)wx, (b+0.5)wy)`, so scan points and voxel columns coincide when the
//! lateral resolutions match.

use crate::error::{invalid, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Dimensions and sample spacing of a regular 3D grid. Transients use unit
/// spacing on every axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shape {
    pub dims: [usize; 3],
    pub pitch: [f64; 3],
}

impl Shape {
    pub fn new(dims: [usize; 3], pitch: [f64; 3]) -> Self {
        Shape { dims, pitch }
    }

    pub fn unit(dims: [usize; 3]) -> Self {
        Shape {
            dims,
            pitch: [1.0; 3],
        }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    /// Element stride of axis `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.dims[1] * self.dims[2],
            1 => self.dims[2],
            _ => 1,
        }
    }
}

/// The reconstruction half-space: `nx × ny × nz` voxels covering
/// `[0, wall_x] × [0, wall_y] × [0, z_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeGrid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pitch: [f64; 3],
}

impl VolumeGrid {
    pub fn new(
        nx: usize,
        ny: usize,
        nz: usize,
        wall_size_x: f64,
        wall_size_y: f64,
        z_max: f64,
    ) -> Result<Self> {
        Self::from_pitch(
            nx,
            ny,
            nz,
            [
                wall_size_x / nx as f64,
                wall_size_y / ny as f64,
                z_max / nz as f64,
            ],
        )
    }

    pub fn from_pitch(nx: usize, ny: usize, nz: usize, pitch: [f64; 3]) -> Result<Self> {
        if nx < 2 || ny < 2 || nz < 2 {
            return invalid(format!(
                "volume dimensions must be >= 2, got {nx}x{ny}x{nz}"
            ));
        }
        if pitch.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return invalid(format!(
                "volume pitch must be positive and finite, got {pitch:?}"
            ));
        }
        Ok(VolumeGrid { nx, ny, nz, pitch })
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pitch(&self) -> [f64; 3] {
        self.pitch
    }

    pub fn wall_size_x(&self) -> f64 {
        self.pitch[0] * self.nx as f64
    }

    pub fn wall_size_y(&self) -> f64 {
        self.pitch[1] * self.ny as f64
    }

    pub fn z_max(&self) -> f64 {
        self.pitch[2] * self.nz as f64
    }

    pub fn voxel_volume(&self) -> f64 {
        self.pitch.iter().product()
    }

    /// Center of voxel `(i, j, k)` in meters.
    pub fn center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            (i as f64 + 0.5) * self.pitch[0],
            (j as f64 + 0.5) * self.pitch[1],
            (k as f64 + 0.5) * self.pitch[2],
        ]
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.dims(), self.pitch)
    }
}

/// Albedo field on a [`VolumeGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Volume {
    grid: VolumeGrid,
    data: Vec<f64>,
}

impl Volume {
    pub fn new(grid: VolumeGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return invalid(format!(
                "volume data has {} entries, grid needs {}",
                data.len(),
                grid.len()
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return invalid("volume data contains non-finite entries");
        }
        Ok(Volume { grid, data })
    }

    pub fn zeros(grid: VolumeGrid) -> Self {
        Volume {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &VolumeGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.grid.shape().index(i, j, k)]
    }

    pub fn shape(&self) -> Shape {
        self.grid.shape()
    }

    /// Copy with negative entries set to zero.
    pub fn clamped_nonnegative(&self) -> Volume {
        Volume {
            grid: self.grid,
            data: self.data.iter().map(|v| v.max(0.0)).collect(),
        }
    }
}

/// Confocal scan geometry: `ns_x × ns_y` wall points, `nt` time bins.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransientGrid {
    pub ns_x: usize,
    pub ns_y: usize,
    pub nt: usize,
    wall_pitch: [f64; 2],
    bin_width: f64,
}

impl TransientGrid {
    pub fn new(
        ns_x: usize,
        ns_y: usize,
        nt: usize,
        wall_size_x: f64,
        wall_size_y: f64,
        bin_width: f64,
    ) -> Result<Self> {
        Self::from_pitch(
            ns_x,
            ns_y,
            nt,
            [wall_size_x / ns_x as f64, wall_size_y / ns_y as f64],
            bin_width,
        )
    }

    pub fn from_pitch(
        ns_x: usize,
        ns_y: usize,
        nt: usize,
        wall_pitch: [f64; 2],
        bin_width: f64,
    ) -> Result<Self> {
        if ns_x < 2 || ns_y < 2 || nt < 2 {
            return invalid(format!(
                "transient dimensions must be >= 2, got {ns_x}x{ns_y}x{nt}"
            ));
        }
        if wall_pitch.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return invalid(format!("wall pitch must be positive, got {wall_pitch:?}"));
        }
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return invalid(format!("bin width must be positive, got {bin_width}"));
        }
        Ok(TransientGrid {
            ns_x,
            ns_y,
            nt,
            wall_pitch,
            bin_width,
        })
    }

    /// Grid whose scan points coincide with the voxel columns of `vol` and
    /// whose time range covers the round trip to `z_max`.
    pub fn matching(vol: &VolumeGrid, nt: usize) -> Result<Self> {
        let bin_width = 2.0 * vol.z_max() / (SPEED_OF_LIGHT * nt as f64);
        Self::from_pitch(
            vol.nx,
            vol.ny,
            nt,
            [vol.pitch()[0], vol.pitch()[1]],
            bin_width,
        )
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.ns_x, self.ns_y, self.nt]
    }

    pub fn len(&self) -> usize {
        self.ns_x * self.ns_y * self.nt
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wall_pitch(&self) -> [f64; 2] {
        self.wall_pitch
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// One-way distance covered by one time bin, `c Δt / 2`.
    pub fn bin_depth(&self) -> f64 {
        SPEED_OF_LIGHT * self.bin_width / 2.0
    }

    /// One-way distance covered by the full histogram.
    pub fn depth_range(&self) -> f64 {
        self.bin_depth() * self.nt as f64
    }

    pub fn scan_point(&self, a: usize, b: usize) -> [f64; 2] {
        [
            (a as f64 + 0.5) * self.wall_pitch[0],
            (b as f64 + 0.5) * self.wall_pitch[1],
        ]
    }

    pub fn shape(&self) -> Shape {
        Shape::unit(self.dims())
    }
}

/// Photon-count histograms, one per scan point.
#[derive(Clone, Debug, PartialEq)]
pub struct Transient {
    grid: TransientGrid,
    data: Vec<f64>,
}

impl Transient {
    pub fn new(grid: TransientGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return invalid(format!(
                "transient data has {} entries, grid needs {}",
                data.len(),
                grid.len()
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return invalid("transient data contains non-finite entries");
        }
        Ok(Transient { grid, data })
    }

    pub fn zeros(grid: TransientGrid) -> Self {
        Transient {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &TransientGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn histogram(&self, a: usize, b: usize) -> &[f64] {
        let nt = self.grid.nt;
        let start = (a * self.grid.ns_y + b) * nt;
        &self.data[start..start + nt]
    }

    pub fn shape(&self) -> Shape {
        self.grid.shape()
    }
}

/// Scanned (`true`) and missing (`false`) wall points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanMask {
    ns_x: usize,
    ns_y: usize,
    scanned: Vec<bool>,
}

impl ScanMask {
    /// Mask from a row-major (`a * ns_y + b`) boolean grid. At least one
    /// point must be scanned.
    pub fn new(ns_x: usize, ns_y: usize, scanned: Vec<bool>) -> Result<Self> {
        if scanned.len() != ns_x * ns_y {
            return invalid(format!(
                "mask has {} entries, expected {}x{}",
                scanned.len(),
                ns_x,
                ns_y
            ));
        }
        if !scanned.iter().any(|&s| s) {
            return invalid("mask must contain at least one scanned point");
        }
        Ok(ScanMask {
            ns_x,
            ns_y,
            scanned,
        })
    }

    pub fn full(ns_x: usize, ns_y: usize) -> Self {
        ScanMask {
            ns_x,
            ns_y,
            scanned: vec![true; ns_x * ns_y],
        }
    }

    /// Degenerate mask with no scanned points. Solvers accept it and return
    /// the zero reconstruction.
    pub fn empty(ns_x: usize, ns_y: usize) -> Self {
        ScanMask {
            ns_x,
            ns_y,
            scanned: vec![false; ns_x * ns_y],
        }
    }

    pub fn dims(&self) -> [usize; 2] {
        [self.ns_x, self.ns_y]
    }

    pub fn is_scanned(&self, a: usize, b: usize) -> bool {
        self.scanned[a * self.ns_y + b]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.scanned
    }

    pub fn count(&self) -> usize {
        self.scanned.iter().filter(|&&s| s).count()
    }

    pub fn is_full(&self) -> bool {
        self.scanned.iter().all(|&s| s)
    }

    pub fn matches(&self, grid: &TransientGrid) -> bool {
        self.ns_x == grid.ns_x && self.ns_y == grid.ns_y
    }

    pub(crate) fn check(&self, grid: &TransientGrid) -> Result<()> {
        if self.matches(grid) {
            Ok(())
        } else {
            invalid(format!(
                "mask is {}x{} but transient has {}x{} scan points",
                self.ns_x, self.ns_y, grid.ns_x, grid.ns_y
            ))
        }
    }

    /// Per-sample 0/1 weights over a transient of `nt` bins.
    pub(crate) fn sample_weights(&self, nt: usize) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.scanned.len() * nt);
        for &s in &self.scanned {
            w.extend(std::iter::repeat_n(if s { 1.0 } else { 0.0 }, nt));
        }
        w
    }
}

/// Evenly spaced indices `round(i (n-1) / (k-1))`, or the center when `k = 1`.
pub(crate) fn even_indices(n: usize, k: usize) -> Vec<usize> {
    if k == 1 {
        return vec![(n - 1) / 2];
    }
    (0..k)
        .map(|i| ((i * (n - 1)) as f64 / (k - 1) as f64).round() as usize)
        .collect()
}

/// Regular `k_x × k_y` sub-sampling of the scan grid.
pub fn make_uniform_mask(grid: &TransientGrid, k_x: usize, k_y: usize) -> Result<ScanMask> {
    if k_x == 0 || k_x > grid.ns_x || k_y == 0 || k_y > grid.ns_y {
        return invalid(format!(
            "mask size {k_x}x{k_y} must lie in 1..={}x1..={}",
            grid.ns_x, grid.ns_y
        ));
    }
    let (ns_x, ns_y) = (grid.ns_x, grid.ns_y);
    let mut scanned = vec![false; ns_x * ns_y];
    for a in even_indices(ns_x, k_x) {
        for b in even_indices(ns_y, k_y) {
            scanned[a * ns_y + b] = true;
        }
    }
    ScanMask::new(ns_x, ns_y, scanned)
}

/// Zeroes the histograms of missing scan points.
pub fn apply_mask(t: &Transient, m: &ScanMask) -> Result<Transient> {
    m.check(&t.grid)?;
    let nt = t.grid.nt;
    let mut data = t.data.clone();
    for (p, hist) in data.chunks_mut(nt).enumerate() {
        if !m.scanned[p] {
            hist.fill(0.0);
        }
    }
    Ok(Transient { grid: t.grid, data })
}

/// Fills missing scan points by bilinear interpolation over the scanned
/// points, bin by bin. Separable masks (a product of scanned rows and
/// columns) use the bracketing scanned rows/columns with constant
/// extrapolation at the edges; other patterns fall back to the nearest
/// scanned point.
pub fn interpolate_missing(t: &Transient, m: &ScanMask) -> Result<Transient> {
    m.check(&t.grid)?;
    let TransientGrid { ns_x, ns_y, nt, .. } = t.grid;
    if m.is_full() {
        return Ok(t.clone());
    }
    let scanned_pts: Vec<(usize, usize)> = (0..ns_x)
        .flat_map(|a| (0..ns_y).map(move |b| (a, b)))
        .filter(|&(a, b)| m.is_scanned(a, b))
        .collect();
    if scanned_pts.is_empty() {
        return Ok(Transient::zeros(t.grid));
    }
    let rows: Vec<usize> = (0..ns_x)
        .filter(|&a| (0..ns_y).any(|b| m.is_scanned(a, b)))
        .collect();
    let cols: Vec<usize> = (0..ns_y)
        .filter(|&b| (0..ns_x).any(|a| m.is_scanned(a, b)))
        .collect();
    let separable = rows.len() * cols.len() == scanned_pts.len();

    // (lo, hi, weight of hi) along one axis
    let bracket = |set: &[usize], x: usize| -> (usize, usize, f64) {
        match set.iter().position(|&s| s >= x) {
            None => (*set.last().unwrap(), *set.last().unwrap(), 0.0),
            Some(0) => (set[0], set[0], 0.0),
            Some(p) => {
                let (lo, hi) = (set[p - 1], set[p]);
                if hi == x {
                    (hi, hi, 0.0)
                } else {
                    (lo, hi, (x - lo) as f64 / (hi - lo) as f64)
                }
            }
        }
    };

    let mut data = t.data.clone();
    for a in 0..ns_x {
        for b in 0..ns_y {
            if m.is_scanned(a, b) {
                continue;
            }
            let out = (a * ns_y + b) * nt;
            if separable {
                let (a0, a1, wa) = bracket(&rows, a);
                let (b0, b1, wb) = bracket(&cols, b);
                let h00 = t.histogram(a0, b0);
                let h01 = t.histogram(a0, b1);
                let h10 = t.histogram(a1, b0);
                let h11 = t.histogram(a1, b1);
                for k in 0..nt {
                    data[out + k] = (1.0 - wa) * ((1.0 - wb) * h00[k] + wb * h01[k])
                        + wa * ((1.0 - wb) * h10[k] + wb * h11[k]);
                }
            } else {
                let &(na, nb) = scanned_pts
                    .iter()
                    .min_by_key(|&&(sa, sb)| {
                        let da = sa as isize - a as isize;
                        let db = sb as isize - b as isize;
                        da * da + db * db
                    })
                    .unwrap();
                data[out..out + nt].copy_from_slice(t.histogram(na, nb));
            }
        }
    }
    Ok(Transient { grid: t.grid, data })
}
