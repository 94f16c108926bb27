//! Command-line driver: `simulate`, `reconstruct`, `evaluate`, `benchmark`.
//!
//! Settings come from an INI file (`--config`) with `--set section.key=value`
//! overrides; every key has a default, so both are optional. Exit codes:
//! 0 success, 1 solver diverged, 2 usage or config error, 3 format error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ini::Ini;

use crate::error::{Error, Result};
use crate::grid::{make_uniform_mask, ScanMask, TransientGrid, VolumeGrid};
use crate::io::{self, Channel, Tensor};
use crate::metrics::{evaluate, project, MetricsReport, DEFAULT_FG_THRESHOLD};
use crate::pipeline::{reconstruct, Method, MethodSettings, Operators};
use crate::scenes::{phantom, photons_preset, simulate, Exposure, PhantomKind, PhantomParams};
use crate::solver_dual::{DualSolverConfig, UUpdate};
use crate::solver_object::ObjectSolverConfig;

pub const TRUTH_FILE: &str = "truth.vol";
pub const TRANSIENT_FILE: &str = "transient.trn";
pub const MASK_FILE: &str = "mask.msk";
pub const BENCHMARK_FILE: &str = "benchmark.csv";

/// Every recognized `section.key`.
const KNOWN_KEYS: &[(&str, &[&str])] = &[
    (
        "grid",
        &["nx", "ny", "nz", "nt", "wall_x", "wall_y", "z_max"],
    ),
    (
        "scene",
        &[
            "name",
            "kind",
            "depth",
            "depth2",
            "size",
            "offset",
            "radius",
            "glyph",
            "thickness",
        ],
    ),
    ("exposure", &["mode", "photons_scale", "seed"]),
    ("mask", &["points"]),
    ("io", &["dir"]),
    ("reconstruct", &["method"]),
    (
        "object",
        &[
            "a",
            "b",
            "mu",
            "eps_stop",
            "t_max",
            "eps_curv",
            "l_safety",
            "norm_iters",
            "seed",
        ],
    ),
    (
        "dual",
        &[
            "lambda",
            "a_u",
            "b_u",
            "a_tau",
            "b_tau",
            "mu1",
            "mu2",
            "mu3",
            "eps_stop",
            "t_max",
            "eps_curv",
            "l_safety",
            "norm_iters",
            "seed",
            "init_with_object",
            "warm_start_iters",
            "warm_start_mu",
            "u_update",
            "cg_iters",
        ],
    ),
    ("lct", &["snr"]),
    ("metrics", &["fg_threshold"]),
    ("benchmark", &["masks", "methods", "record_runtime"]),
];

#[derive(Parser, Debug)]
#[command(
    name = "nlos",
    version,
    about = "Curvature-regularized confocal NLOS reconstruction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ConfigArgs {
    /// INI configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one setting, e.g. `--set mask.points=8`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the ground-truth volume, the full transient and the scan mask.
    Simulate(ConfigArgs),
    /// Reconstruct a volume from the transient and mask in the output directory.
    Reconstruct {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Overrides `reconstruct.method`.
        #[arg(long)]
        method: Option<String>,
    },
    /// Append one metrics row comparing two volumes.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        scene: String,
        #[arg(long, default_value = "")]
        method: String,
        #[arg(long, default_value = "")]
        mask: String,
        /// Reported runtime in seconds.
        #[arg(long, default_value_t = 0.0)]
        runtime: f64,
        #[arg(long, default_value_t = DEFAULT_FG_THRESHOLD)]
        fg_threshold: f64,
    },
    /// Sweep masks × methods on one scene and write a CSV.
    Benchmark(ConfigArgs),
}

/// Parsed INI with typed, defaulted lookups.
#[derive(Clone, Debug)]
pub struct Config {
    ini: Ini,
}

impl Default for Config {
    fn default() -> Self {
        Config { ini: Ini::new() }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = Config { ini };
        cfg.check_keys()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn check_keys(&self) -> Result<()> {
        for (sec, props) in self.ini.iter() {
            let Some(sec) = sec else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::Config(format!("key '{k}' outside any section")));
                }
                continue;
            };
            let known = KNOWN_KEYS
                .iter()
                .find(|(s, _)| *s == sec)
                .ok_or_else(|| Error::Config(format!("unknown section [{sec}]")))?;
            for (k, _) in props.iter() {
                if !known.1.contains(&k) {
                    return Err(Error::Config(format!("unknown key '{sec}.{k}'")));
                }
            }
        }
        Ok(())
    }

    /// Applies one `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, value) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!("override '{assignment}' is not section.key=value"))
        })?;
        let (sec, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| Error::Config(format!("override key '{path}' is not section.key")))?;
        self.ini.with_section(Some(sec)).set(key, value.trim());
        self.check_keys()
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini
            .section(Some(section))
            .and_then(|p| p.get(key))
            .map(str::trim)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("bad value '{v}' for {section}.{key}"))),
        }
    }

    pub fn volume_grid(&self) -> Result<VolumeGrid> {
        VolumeGrid::new(
            self.get("grid", "nx", 32)?,
            self.get("grid", "ny", 32)?,
            self.get("grid", "nz", 64)?,
            self.get("grid", "wall_x", 1.0)?,
            self.get("grid", "wall_y", 1.0)?,
            self.get("grid", "z_max", 1.0)?,
        )
        .map_err(as_config)
    }

    pub fn transient_grid(&self, vol: &VolumeGrid) -> Result<TransientGrid> {
        TransientGrid::matching(vol, self.get("grid", "nt", 64)?).map_err(as_config)
    }

    pub fn phantom_kind(&self) -> Result<PhantomKind> {
        self.get("scene", "kind", PhantomKind::TwoPlanes)
    }

    pub fn scene_name(&self) -> Result<String> {
        Ok(match self.raw("scene", "name") {
            Some(n) => n.to_string(),
            None => self
                .raw("scene", "kind")
                .unwrap_or("two_planes")
                .to_string(),
        })
    }

    pub fn phantom_params(&self) -> Result<PhantomParams> {
        let d = PhantomParams::default();
        Ok(PhantomParams {
            depth: self.get("scene", "depth", d.depth)?,
            depth2: self.get("scene", "depth2", d.depth2)?,
            size: self.get("scene", "size", d.size)?,
            offset: self.get("scene", "offset", d.offset)?,
            radius: self.get("scene", "radius", d.radius)?,
            glyph: self.get("scene", "glyph", d.glyph)?,
            thickness: self.get("scene", "thickness", d.thickness)?,
        })
    }

    /// `(exposure, photons_scale, seed)`; the scale accepts a preset name.
    pub fn exposure(&self) -> Result<(Exposure, f64, u64)> {
        let mode = self.get("exposure", "mode", Exposure::Noiseless)?;
        let scale = match self.raw("exposure", "photons_scale") {
            None => 1e5,
            Some(s) => match photons_preset(s) {
                Some(v) => v,
                None => s
                    .parse()
                    .map_err(|_| Error::Config(format!("bad photons_scale '{s}'")))?,
            },
        };
        Ok((mode, scale, self.get("exposure", "seed", 0)?))
    }

    pub fn mask_spec(&self) -> Result<MaskSpec> {
        self.get("mask", "points", MaskSpec::Full)
    }

    pub fn output_dir(&self) -> Result<PathBuf> {
        self.get("io", "dir", PathBuf::from("out"))
    }

    pub fn method(&self) -> Result<Method> {
        self.get("reconstruct", "method", Method::CurvObject)
    }

    pub fn fg_threshold(&self) -> Result<f64> {
        self.get("metrics", "fg_threshold", DEFAULT_FG_THRESHOLD)
    }

    pub fn method_settings(&self) -> Result<MethodSettings> {
        let o = ObjectSolverConfig::default();
        let object = ObjectSolverConfig {
            a: self.get("object", "a", o.a)?,
            b: self.get("object", "b", o.b)?,
            mu: self.get("object", "mu", o.mu)?,
            eps_stop: self.get("object", "eps_stop", o.eps_stop)?,
            t_max: self.get("object", "t_max", o.t_max)?,
            eps_curv: self.get("object", "eps_curv", o.eps_curv)?,
            l_safety: self.get("object", "l_safety", o.l_safety)?,
            norm_iters: self.get("object", "norm_iters", o.norm_iters)?,
            seed: self.get("object", "seed", o.seed)?,
        };
        object.validate().map_err(as_config)?;
        let d = DualSolverConfig::default();
        let u_update = match self.raw("dual", "u_update").unwrap_or("majorize") {
            "majorize" => UUpdate::Majorize,
            "cg" => UUpdate::InnerCg {
                iters: self.get("dual", "cg_iters", 10)?,
            },
            other => {
                return Err(Error::Config(format!(
                    "dual.u_update must be majorize or cg, got '{other}'"
                )))
            }
        };
        let dual = DualSolverConfig {
            lambda: self.get("dual", "lambda", d.lambda)?,
            a_u: self.get("dual", "a_u", d.a_u)?,
            b_u: self.get("dual", "b_u", d.b_u)?,
            a_tau: self.get("dual", "a_tau", d.a_tau)?,
            b_tau: self.get("dual", "b_tau", d.b_tau)?,
            mu1: self.get("dual", "mu1", d.mu1)?,
            mu2: self.get("dual", "mu2", d.mu2)?,
            mu3: self.get("dual", "mu3", d.mu3)?,
            eps_stop: self.get("dual", "eps_stop", d.eps_stop)?,
            t_max: self.get("dual", "t_max", d.t_max)?,
            eps_curv: self.get("dual", "eps_curv", d.eps_curv)?,
            l_safety: self.get("dual", "l_safety", d.l_safety)?,
            norm_iters: self.get("dual", "norm_iters", d.norm_iters)?,
            seed: self.get("dual", "seed", d.seed)?,
            init_with_object: self.get("dual", "init_with_object", d.init_with_object)?,
            warm_start_iters: self.get("dual", "warm_start_iters", d.warm_start_iters)?,
            warm_start_mu: self.get("dual", "warm_start_mu", d.warm_start_mu)?,
            u_update,
        };
        dual.validate().map_err(as_config)?;
        let lct_snr = self.get("lct", "snr", 100.0)?;
        if !(lct_snr > 0.0) {
            return Err(Error::Config("lct.snr must be positive".into()));
        }
        Ok(MethodSettings {
            object,
            dual,
            lct_snr,
        })
    }

    pub fn benchmark_masks(&self) -> Result<Vec<MaskSpec>> {
        list(self.raw("benchmark", "masks").unwrap_or("4,6,8,full"))
    }

    pub fn benchmark_methods(&self) -> Result<Vec<Method>> {
        list(
            self.raw("benchmark", "methods")
                .unwrap_or("backproject,lct,curv-object,curv-dual"),
        )
    }
}

fn list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| Error::Config(format!("bad list entry '{x}'")))
        })
        .collect()
}

fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidArgument(m) => Error::Config(m),
        other => other,
    }
}

/// Scan pattern: every point, or `kx × ky` evenly spaced points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskSpec {
    Full,
    Uniform(usize, usize),
}

impl MaskSpec {
    pub fn build(self, tr: &TransientGrid) -> Result<ScanMask> {
        match self {
            MaskSpec::Full => Ok(ScanMask::full(tr.ns_x, tr.ns_y)),
            MaskSpec::Uniform(kx, ky) => make_uniform_mask(tr, kx, ky).map_err(as_config),
        }
    }

    pub fn label(self) -> String {
        match self {
            MaskSpec::Full => "full".into(),
            MaskSpec::Uniform(kx, ky) => format!("{kx}x{ky}"),
        }
    }
}

impl FromStr for MaskSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("mask must be 'full', 'N' or 'NxM', got '{s}'"));
        if s == "full" {
            return Ok(MaskSpec::Full);
        }
        let (a, b) = s.split_once('x').unwrap_or((s, s));
        let kx = a.parse().map_err(|_| bad())?;
        let ky = b.parse().map_err(|_| bad())?;
        Ok(MaskSpec::Uniform(kx, ky))
    }
}

impl FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane" => Ok(PhantomKind::Plane),
            "two_planes" => Ok(PhantomKind::TwoPlanes),
            "sphere" => Ok(PhantomKind::Sphere),
            "letter" => Ok(PhantomKind::Letter),
            other => Err(Error::Config(format!("unknown phantom kind '{other}'"))),
        }
    }
}

impl FromStr for Exposure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noiseless" => Ok(Exposure::Noiseless),
            "poisson" => Ok(Exposure::Poisson),
            other => Err(Error::Config(format!("unknown exposure '{other}'"))),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SolverDiverged { .. } => 1,
        Error::Format { .. } => 3,
        Error::InvalidArgument(_) | Error::Config(_) | Error::Io(_) => 2,
    }
}

fn load_config(args: &ConfigArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for o in &args.overrides {
        cfg.set(o)?;
    }
    Ok(cfg)
}

/// Files written by [`cmd_simulate`].
pub fn cmd_simulate(cfg: &Config) -> Result<PathBuf> {
    let dir = cfg.output_dir()?;
    let vol = cfg.volume_grid()?;
    let tr = cfg.transient_grid(&vol)?;
    let truth = phantom(cfg.phantom_kind()?, &vol, &cfg.phantom_params()?).map_err(as_config)?;
    let ops = Operators::new(vol, tr)?;
    let (exposure, scale, seed) = cfg.exposure()?;
    let t = simulate(&ops.sim, &truth, exposure, scale, seed).map_err(as_config)?;
    let mask = cfg.mask_spec()?.build(&tr)?;
    fs::create_dir_all(&dir)?;
    io::write_tensor(dir.join(TRUTH_FILE), &Tensor::Volume(truth))?;
    io::write_tensor(dir.join(TRANSIENT_FILE), &Tensor::Transient(t))?;
    io::write_tensor(dir.join(MASK_FILE), &Tensor::Mask(mask))?;
    Ok(dir)
}

/// Output of one reconstruction run.
#[derive(Clone, Debug)]
pub struct ReconstructOutput {
    pub volume_path: PathBuf,
    pub runtime_s: f64,
}

pub fn cmd_reconstruct(cfg: &Config, method: Method) -> Result<ReconstructOutput> {
    let dir = cfg.output_dir()?;
    let t = io::read_transient(dir.join(TRANSIENT_FILE))?;
    let mask = io::read_mask(dir.join(MASK_FILE))?;
    let tr = *t.grid();
    let vol = VolumeGrid::new(
        tr.ns_x,
        tr.ns_y,
        cfg.get("grid", "nz", 64)?,
        tr.wall_pitch()[0] * tr.ns_x as f64,
        tr.wall_pitch()[1] * tr.ns_y as f64,
        cfg.get("grid", "z_max", tr.depth_range())?,
    )
    .map_err(as_config)?;
    let ops = Operators::new(vol, tr)?;
    let settings = cfg.method_settings()?;
    let start = Instant::now();
    let rec = reconstruct(&ops, method, &t, &mask, &settings)?;
    let runtime_s = start.elapsed().as_secs_f64();

    let stem = format!("recon_{}", method.name());
    let volume_path = dir.join(format!("{stem}.vol"));
    io::write_tensor(&volume_path, &Tensor::Volume(rec.volume.clone()))?;
    io::write_energy_csv(
        dir.join(format!("energy_{}.csv", method.name())),
        &rec.energy_history,
    )?;
    let map = project(&rec.volume, cfg.fg_threshold()?)?;
    io::write_image(
        &map,
        dir.join(format!("{stem}_intensity.pgm")),
        Channel::Intensity,
    )?;
    io::write_image(&map, dir.join(format!("{stem}_depth.pgm")), Channel::Depth)?;
    if let Some(t) = &rec.transient {
        io::write_tensor(
            dir.join(format!("{stem}.trn")),
            &Tensor::Transient(t.clone()),
        )?;
    }
    fs::write(
        dir.join(format!("runtime_{}.txt", method.name())),
        format!("{runtime_s}\n"),
    )?;
    Ok(ReconstructOutput {
        volume_path,
        runtime_s,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_evaluate(
    pred: &Path,
    truth: &Path,
    out_csv: &Path,
    scene: &str,
    method: &str,
    mask: &str,
    runtime_s: f64,
    fg_threshold: f64,
) -> Result<MetricsReport> {
    let p = io::read_volume(pred)?;
    let t = io::read_volume(truth)?;
    let mut report = evaluate(&p, &t, fg_threshold)?;
    report.scene = scene.into();
    report.method = method.into();
    report.mask = mask.into();
    report.runtime_s = runtime_s;
    io::append_metrics_csv(out_csv, &report)?;
    Ok(report)
}

/// Runs every mask × method cell on the configured scene, in that order.
pub fn cmd_benchmark(cfg: &Config) -> Result<Vec<MetricsReport>> {
    let vol = cfg.volume_grid()?;
    let tr = cfg.transient_grid(&vol)?;
    let truth = phantom(cfg.phantom_kind()?, &vol, &cfg.phantom_params()?).map_err(as_config)?;
    let ops = Operators::new(vol, tr)?;
    let (exposure, scale, seed) = cfg.exposure()?;
    let t = simulate(&ops.sim, &truth, exposure, scale, seed).map_err(as_config)?;
    let settings = cfg.method_settings()?;
    let (masks, methods) = (cfg.benchmark_masks()?, cfg.benchmark_methods()?);
    let record_runtime: bool = cfg.get("benchmark", "record_runtime", false)?;
    let fg = cfg.fg_threshold()?;
    let scene = cfg.scene_name()?;
    let mut rows = Vec::with_capacity(masks.len() * methods.len());
    for spec in &masks {
        let mask = spec.build(&tr)?;
        for &method in &methods {
            let start = Instant::now();
            let rec = reconstruct(&ops, method, &t, &mask, &settings)?;
            let elapsed = start.elapsed().as_secs_f64();
            let mut r = evaluate(&rec.volume, &truth, fg)?;
            r.scene = scene.clone();
            r.method = method.name().into();
            r.mask = spec.label();
            r.runtime_s = if record_runtime { elapsed } else { 0.0 };
            rows.push(r);
        }
    }
    let dir = cfg.output_dir()?;
    fs::create_dir_all(&dir)?;
    io::write_metrics_csv(dir.join(BENCHMARK_FILE), &rows)?;
    Ok(rows)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => {
            let dir = cmd_simulate(&load_config(&args)?)?;
            println!(
                "wrote {}, {}, {} in {}",
                TRUTH_FILE,
                TRANSIENT_FILE,
                MASK_FILE,
                dir.display()
            );
        }
        Command::Reconstruct { cfg, method } => {
            let config = load_config(&cfg)?;
            let method = match method {
                Some(m) => m.parse()?,
                None => config.method()?,
            };
            let out = cmd_reconstruct(&config, method)?;
            println!("wrote {}", out.volume_path.display());
            println!("runtime_s={}", out.runtime_s);
        }
        Command::Evaluate {
            pred,
            truth,
            out,
            scene,
            method,
            mask,
            runtime,
            fg_threshold,
        } => {
            let r = cmd_evaluate(
                &pred,
                &truth,
                &out,
                &scene,
                &method,
                &mask,
                runtime,
                fg_threshold,
            )?;
            println!("{}", r.csv_row());
        }
        Command::Benchmark(args) => {
            let cfg = load_config(&args)?;
            let rows = cmd_benchmark(&cfg)?;
            println!("{}", crate::metrics::CSV_HEADER);
            for r in rows {
                println!("{}", r.csv_row());
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_spec_parsing() {
        assert_eq!("full".parse::<MaskSpec>().unwrap(), MaskSpec::Full);
        assert_eq!("8".parse::<MaskSpec>().unwrap(), MaskSpec::Uniform(8, 8));
        assert_eq!("4x6".parse::<MaskSpec>().unwrap(), MaskSpec::Uniform(4, 6));
        assert!("eight".parse::<MaskSpec>().is_err());
    }

    #[test]
    fn config_overrides_and_unknown_keys() {
        let mut cfg = Config::parse("[grid]\nnx = 16\n[object]\nmu = 0.5\n").unwrap();
        assert_eq!(cfg.get("grid", "nx", 0usize).unwrap(), 16);
        cfg.set("object.mu=0.25").unwrap();
        assert_eq!(cfg.method_settings().unwrap().object.mu, 0.25);
        assert!(cfg.set("object.bogus=1").is_err());
        assert!(cfg.set("nodot=1").is_err());
        assert!(Config::parse("[nowhere]\nx=1\n").is_err());
        assert!(matches!(
            Config::parse("[grid]\nnx = many\n").unwrap().volume_grid(),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn exposure_presets() {
        let cfg =
            Config::parse("[exposure]\nmode = poisson\nphotons_scale = 15s\nseed = 3\n").unwrap();
        assert_eq!(cfg.exposure().unwrap(), (Exposure::Poisson, 1e2, 3));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::SolverDiverged {
                iter: 1,
                energy: 1.0,
                initial: 1.0
            }),
            1
        );
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Format {
                offset: 0,
                message: "x".into()
            }),
            3
        );
        assert_eq!(run(["nlos", "frobnicate"]), 2);
        assert_eq!(run(["nlos", "reconstruct", "--method", "sart"]), 2);
    }
}
