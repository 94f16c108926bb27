//! Operator setup and method dispatch shared by the CLI, tests and benches.
//!
//! Measurements are simulated with the literal operator, calibrated so the
//! photon scale counts photons from a reference voxel. The direct baselines
//! run on that operator with bilinearly filled data. The iterative solvers
//! run on the falloff-compensated, norm-one operator with masked data
//! brought into its range and scaled to unit peak.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::grid::{
    apply_mask, interpolate_missing, ScanMask, Transient, TransientGrid, Volume, VolumeGrid,
};
use crate::solver_dual::{solve_dual, DualSolverConfig};
use crate::solver_object::{solve_object, ObjectSolverConfig};
use crate::transport::{backproject, lct_reconstruct, LightTransport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Backproject,
    Lct,
    CurvObject,
    CurvDual,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Backproject,
        Method::Lct,
        Method::CurvObject,
        Method::CurvDual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Backproject => "backproject",
            Method::Lct => "lct",
            Method::CurvObject => "curv-object",
            Method::CurvDual => "curv-dual",
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Method::CurvObject | Method::CurvDual)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method '{s}' (expected backproject, lct, curv-object or curv-dual)"
                ))
            })
    }
}

/// The two operators of one scene geometry.
#[derive(Clone, Debug)]
pub struct Operators {
    /// Literal model, photon-calibrated.
    pub sim: LightTransport,
    /// Falloff-compensated model with unit norm.
    pub rec: LightTransport,
}

impl Operators {
    pub fn new(vol: VolumeGrid, tr: TransientGrid) -> Result<Self> {
        let raw = LightTransport::new(vol, tr)?;
        Ok(Operators {
            rec: raw.clone().falloff_compensated().normalized(),
            sim: raw.calibrated(),
        })
    }

    pub fn volume_grid(&self) -> &VolumeGrid {
        self.sim.volume_grid()
    }

    pub fn transient_grid(&self) -> &TransientGrid {
        self.sim.transient_grid()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodSettings {
    pub object: ObjectSolverConfig,
    pub dual: DualSolverConfig,
    pub lct_snr: f64,
}

impl Default for MethodSettings {
    fn default() -> Self {
        MethodSettings {
            object: ObjectSolverConfig::default(),
            dual: DualSolverConfig::default(),
            lct_snr: 100.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub volume: Volume,
    /// Empty for the direct methods.
    pub energy_history: Vec<f64>,
    /// Completed transient in measurement units (dual method only).
    pub transient: Option<Transient>,
}

/// Masked measurements mapped into the range of `rec` and scaled to unit
/// peak. Returns the data and the scale that was divided out.
pub fn solver_input(
    rec: &LightTransport,
    t: &Transient,
    mask: &ScanMask,
) -> Result<(Transient, f64)> {
    let compensated = rec.compensate(&apply_mask(t, mask)?)?;
    let peak = compensated
        .data()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok((compensated, 1.0));
    }
    let data = compensated.data().iter().map(|v| v / peak).collect();
    Ok((Transient::new(*compensated.grid(), data)?, peak))
}

pub fn reconstruct(
    ops: &Operators,
    method: Method,
    t: &Transient,
    mask: &ScanMask,
    settings: &MethodSettings,
) -> Result<Reconstruction> {
    if t.grid() != ops.transient_grid() {
        return invalid("transient grid does not match the scene geometry");
    }
    match method {
        Method::Backproject | Method::Lct => {
            let filled = if mask.count() == 0 {
                Transient::zeros(*t.grid())
            } else {
                interpolate_missing(t, mask)?
            };
            let volume = if method == Method::Backproject {
                backproject(&ops.sim, &filled)?
            } else {
                lct_reconstruct(&ops.sim, &filled, settings.lct_snr)?
            };
            Ok(Reconstruction {
                volume,
                energy_history: Vec::new(),
                transient: None,
            })
        }
        Method::CurvObject => {
            let (input, _) = solver_input(&ops.rec, t, mask)?;
            let sol = solve_object(&input, mask, &ops.rec, &settings.object)?;
            Ok(Reconstruction {
                volume: sol.volume,
                energy_history: sol.energy_history,
                transient: None,
            })
        }
        Method::CurvDual => {
            let (input, scale) = solver_input(&ops.rec, t, mask)?;
            let sol = solve_dual(&input, mask, &ops.rec, &settings.dual)?;
            let rescaled = sol.transient.data().iter().map(|v| v * scale).collect();
            let transient = ops
                .rec
                .decompensate(&Transient::new(*t.grid(), rescaled)?)?;
            Ok(Reconstruction {
                volume: sol.volume,
                energy_history: sol.energy_history,
                transient: Some(transient),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::{phantom, simulate, Exposure, PhantomKind, PhantomParams};

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!(matches!("sart".parse::<Method>(), Err(Error::Config(_))));
    }

    #[test]
    fn solver_input_has_unit_peak() {
        let g = VolumeGrid::new(8, 8, 8, 1.0, 1.0, 1.0).unwrap();
        let ops = Operators::new(g, TransientGrid::matching(&g, 16).unwrap()).unwrap();
        let u = phantom(
            PhantomKind::Plane,
            &g,
            &PhantomParams {
                size: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        let t = simulate(&ops.sim, &u, Exposure::Noiseless, 1.0, 0).unwrap();
        let (input, scale) = solver_input(&ops.rec, &t, &ScanMask::full(8, 8)).unwrap();
        assert!(scale > 0.0);
        let peak = input.data().iter().cloned().fold(0.0, f64::max);
        assert!((peak - 1.0).abs() < 1e-15);
        let zero = Transient::zeros(*t.grid());
        assert_eq!(
            solver_input(&ops.rec, &zero, &ScanMask::full(8, 8))
                .unwrap()
                .1,
            1.0
        );
    }

    #[test]
    fn every_method_runs() {
        let g = VolumeGrid::new(8, 8, 8, 1.0, 1.0, 1.0).unwrap();
        let ops = Operators::new(g, TransientGrid::matching(&g, 16).unwrap()).unwrap();
        let u = phantom(
            PhantomKind::Plane,
            &g,
            &PhantomParams {
                size: 0.5,
                ..Default::default()
            },
        )
        .unwrap();
        let t = simulate(&ops.sim, &u, Exposure::Noiseless, 1.0, 0).unwrap();
        let mut settings = MethodSettings::default();
        settings.object.t_max = 5;
        settings.dual.t_max = 5;
        settings.dual.warm_start_iters = 5;
        for m in Method::ALL {
            let r = reconstruct(&ops, m, &t, &ScanMask::full(8, 8), &settings).unwrap();
            assert!(r.volume.data().iter().all(|&v| v >= 0.0));
            assert_eq!(r.energy_history.is_empty(), !m.is_iterative());
            assert_eq!(r.transient.is_some(), m == Method::CurvDual);
        }
    }
}
