//! Synthetic binary-albedo phantoms and measurement simulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Result};
use crate::grid::{Transient, Volume, VolumeGrid};
use crate::transport::LightTransport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhantomKind {
    Plane,
    TwoPlanes,
    Sphere,
    Letter,
}

/// Geometry of a phantom. Lengths are meters; `size` and `offset` are
/// fractions of the lateral extent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhantomParams {
    pub depth: f64,
    /// Depth of the rear plane for [`PhantomKind::TwoPlanes`].
    pub depth2: f64,
    /// Side of the square footprint (planes, letter).
    pub size: f64,
    /// Lateral separation of the two planes' centers.
    pub offset: f64,
    pub radius: f64,
    pub glyph: char,
    /// Extrusion of the letter in voxels.
    pub thickness: usize,
}

impl Default for PhantomParams {
    fn default() -> Self {
        PhantomParams {
            depth: 0.4,
            depth2: 0.7,
            size: 0.4,
            offset: 0.3,
            radius: 0.25,
            glyph: 'S',
            thickness: 1,
        }
    }
}

/// 5×7 bitmaps, top row first, `#` = set.
fn glyph_rows(c: char) -> Option<[&'static str; 7]> {
    Some(match c.to_ascii_uppercase() {
        'S' => [
            " ####", "#    ", "#    ", " ### ", "    #", "    #", "#### ",
        ],
        'U' => [
            "#   #", "#   #", "#   #", "#   #", "#   #", "#   #", " ### ",
        ],
        'N' => [
            "#   #", "##  #", "# # #", "#  ##", "#   #", "#   #", "#   #",
        ],
        'L' => [
            "#    ", "#    ", "#    ", "#    ", "#    ", "#    ", "#####",
        ],
        'O' => [
            " ### ", "#   #", "#   #", "#   #", "#   #", "#   #", " ### ",
        ],
        'T' => [
            "#####", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ",
        ],
        'H' => [
            "#   #", "#   #", "#   #", "#####", "#   #", "#   #", "#   #",
        ],
        'E' => [
            "#####", "#    ", "#    ", "#### ", "#    ", "#    ", "#####",
        ],
        'X' => [
            "#   #", "#   #", " # # ", "  #  ", " # # ", "#   #", "#   #",
        ],
        'I' => [
            " ### ", "  #  ", "  #  ", "  #  ", "  #  ", "  #  ", " ### ",
        ],
        _ => return None,
    })
}

fn depth_index(grid: &VolumeGrid, depth: f64) -> Result<usize> {
    if !(depth > 0.0 && depth < grid.z_max()) {
        return invalid(format!("depth {depth} outside (0, {})", grid.z_max()));
    }
    Ok(((depth / grid.pitch()[2]) as usize).min(grid.nz - 1))
}

/// Index range `[lo, hi)` of voxel centers inside `[c - half, c + half)`.
fn span(n: usize, pitch: f64, center: f64, half: f64) -> (usize, usize) {
    let lo = ((center - half) / pitch - 0.5).ceil().max(0.0) as usize;
    let hi = (((center + half) / pitch - 0.5).ceil().max(0.0) as usize).min(n);
    (lo.min(n), hi)
}

pub fn phantom(kind: PhantomKind, grid: &VolumeGrid, params: &PhantomParams) -> Result<Volume> {
    let mut data = vec![0.0; grid.len()];
    let shape = grid.shape();
    let [px, py, _] = grid.pitch();
    let (wx, wy) = (grid.wall_size_x(), grid.wall_size_y());
    if !(params.size > 0.0 && params.size <= 1.0) {
        return invalid(format!("size must lie in (0, 1], got {}", params.size));
    }
    let mut rect = |cx: f64, cy: f64, k: usize| {
        let (i0, i1) = span(grid.nx, px, cx, params.size * wx / 2.0);
        let (j0, j1) = span(grid.ny, py, cy, params.size * wy / 2.0);
        for i in i0..i1 {
            for j in j0..j1 {
                data[shape.index(i, j, k)] = 1.0;
            }
        }
    };
    match kind {
        PhantomKind::Plane => {
            let k = depth_index(grid, params.depth)?;
            rect(wx / 2.0, wy / 2.0, k);
        }
        PhantomKind::TwoPlanes => {
            let (k1, k2) = (
                depth_index(grid, params.depth)?,
                depth_index(grid, params.depth2)?,
            );
            if k1 == k2 {
                return invalid("the two planes must lie at distinct depths");
            }
            let shift = params.offset * wx / 2.0;
            rect(wx / 2.0 - shift, wy / 2.0, k1);
            rect(wx / 2.0 + shift, wy / 2.0, k2);
        }
        PhantomKind::Sphere => {
            let r = params.radius;
            if !(r > 0.0 && r < wx.min(wy) / 2.0) {
                return invalid(format!("radius {r} must lie in (0, extent/2)"));
            }
            if !(params.depth - r > 0.0 && params.depth + r < grid.z_max()) {
                return invalid("sphere does not fit inside the depth range");
            }
            let c = [wx / 2.0, wy / 2.0, params.depth];
            let half = grid.pitch().iter().cloned().fold(f64::INFINITY, f64::min) / 2.0;
            for i in 0..grid.nx {
                for j in 0..grid.ny {
                    for k in 0..grid.nz {
                        let p = grid.center(i, j, k);
                        let d =
                            ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2))
                                .sqrt();
                        if (d - r).abs() <= half {
                            data[shape.index(i, j, k)] = 1.0;
                        }
                    }
                }
            }
        }
        PhantomKind::Letter => {
            let rows = match glyph_rows(params.glyph) {
                Some(r) => r,
                None => return invalid(format!("no bitmap for glyph '{}'", params.glyph)),
            };
            let k0 = depth_index(grid, params.depth)?;
            let k1 = (k0 + params.thickness.max(1)).min(grid.nz);
            // glyph box: height = size·extent, width = 5/7 of it
            let (h, w) = (params.size * wy, params.size * wy * 5.0 / 7.0);
            let (x0, y0) = (wx / 2.0 - w / 2.0, wy / 2.0 - h / 2.0);
            for i in 0..grid.nx {
                for j in 0..grid.ny {
                    let [x, y, _] = grid.center(i, j, 0);
                    let (cx, cy) = ((x - x0) / w * 5.0, (y - y0) / h * 7.0);
                    if !(0.0..5.0).contains(&cx) || !(0.0..7.0).contains(&cy) {
                        continue;
                    }
                    if rows[cy as usize].as_bytes()[cx as usize] == b'#' {
                        for k in k0..k1 {
                            data[shape.index(i, j, k)] = 1.0;
                        }
                    }
                }
            }
        }
    }
    Volume::new(*grid, data)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exposure {
    Noiseless,
    Poisson,
}

/// Photon scales named after short and long captures.
pub fn photons_preset(name: &str) -> Option<f64> {
    match name {
        "15s" => Some(1e2),
        "60min" => Some(1e5),
        _ => None,
    }
}

/// Measurements of `u`. Noiseless output is `A u` with roundoff negatives
/// clipped to zero; Poisson output draws counts with mean
/// `photons_scale · A u`.
pub fn simulate(
    op: &LightTransport,
    u: &Volume,
    exposure: Exposure,
    photons_scale: f64,
    seed: u64,
) -> Result<Transient> {
    if u.grid() != op.volume_grid() {
        return invalid("volume grid does not match the transport operator");
    }
    let mut mean = op.apply(u.data());
    mean.iter_mut().for_each(|v| *v = v.max(0.0));
    match exposure {
        Exposure::Noiseless => Transient::new(*op.transient_grid(), mean),
        Exposure::Poisson => {
            if !(photons_scale > 0.0 && photons_scale.is_finite()) {
                return invalid(format!(
                    "photons_scale must be positive, got {photons_scale}"
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let counts = mean
                .iter()
                .map(|&m| {
                    let lambda = photons_scale * m;
                    if lambda > 0.0 {
                        Poisson::new(lambda)
                            .map(|d| d.sample(&mut rng))
                            .unwrap_or(0.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            Transient::new(*op.transient_grid(), counts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TransientGrid;

    fn grid() -> VolumeGrid {
        VolumeGrid::new(32, 32, 32, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn plane_occupies_one_layer() {
        let g = grid();
        let v = phantom(PhantomKind::Plane, &g, &PhantomParams::default()).unwrap();
        let nonzero: Vec<usize> = (0..g.len()).filter(|&p| v.data()[p] != 0.0).collect();
        let layers: std::collections::BTreeSet<usize> = nonzero.iter().map(|p| p % 32).collect();
        assert_eq!(layers.len(), 1);
        assert_eq!(*layers.iter().next().unwrap(), (0.4f64 * 32.0) as usize);
        // centers inside 16 ± 6.4 voxels
        assert_eq!(nonzero.len(), 12 * 12);
    }

    #[test]
    fn sphere_shell_count() {
        let g = grid();
        let p = PhantomParams {
            radius: 0.3,
            depth: 0.5,
            ..Default::default()
        };
        let v = phantom(PhantomKind::Sphere, &g, &p).unwrap();
        let count = v.data().iter().filter(|&&x| x != 0.0).count() as f64;
        let pitch = 1.0 / 32.0;
        let expect = 4.0 * std::f64::consts::PI * 0.3f64.powi(2) / (pitch * pitch);
        assert!(
            (count - expect).abs() / expect < 0.15,
            "{count} vs {expect}"
        );
    }

    #[test]
    fn two_planes_have_two_depths() {
        let g = grid();
        let v = phantom(PhantomKind::TwoPlanes, &g, &PhantomParams::default()).unwrap();
        let layers: std::collections::BTreeSet<usize> = (0..g.len())
            .filter(|&p| v.data()[p] != 0.0)
            .map(|p| p % 32)
            .collect();
        assert_eq!(layers.len(), 2);
        let same = PhantomParams {
            depth2: 0.4,
            ..Default::default()
        };
        assert!(phantom(PhantomKind::TwoPlanes, &g, &same).is_err());
    }

    #[test]
    fn letter_and_bad_params() {
        let g = grid();
        let v = phantom(
            PhantomKind::Letter,
            &g,
            &PhantomParams {
                size: 0.7,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(v.data().iter().any(|&x| x != 0.0));
        assert!(phantom(
            PhantomKind::Letter,
            &g,
            &PhantomParams {
                glyph: '?',
                ..Default::default()
            }
        )
        .is_err());
        assert!(phantom(
            PhantomKind::Plane,
            &g,
            &PhantomParams {
                depth: 1.5,
                ..Default::default()
            }
        )
        .is_err());
        assert!(phantom(
            PhantomKind::Sphere,
            &g,
            &PhantomParams {
                radius: 0.6,
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn phantoms_are_deterministic() {
        let g = grid();
        for kind in [
            PhantomKind::Plane,
            PhantomKind::TwoPlanes,
            PhantomKind::Sphere,
            PhantomKind::Letter,
        ] {
            let p = PhantomParams::default();
            assert_eq!(
                phantom(kind, &g, &p).unwrap(),
                phantom(kind, &g, &p).unwrap()
            );
        }
    }

    #[test]
    fn simulation_contracts() {
        let g = VolumeGrid::new(8, 8, 8, 1.0, 1.0, 1.0).unwrap();
        let tg = TransientGrid::matching(&g, 16).unwrap();
        let op = LightTransport::new(g, tg).unwrap().normalized();
        let zero = simulate(&op, &Volume::zeros(g), Exposure::Noiseless, 1.0, 0).unwrap();
        assert!(zero.data().iter().all(|&v| v == 0.0));

        let u = phantom(
            PhantomKind::Plane,
            &g,
            &PhantomParams {
                size: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        let a = simulate(&op, &u, Exposure::Poisson, 1e3, 42).unwrap();
        let b = simulate(&op, &u, Exposure::Poisson, 1e3, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.data().iter().all(|&v| v >= 0.0 && v.fract() == 0.0));
        assert!(simulate(&op, &u, Exposure::Poisson, 0.0, 1).is_err());
    }
}
