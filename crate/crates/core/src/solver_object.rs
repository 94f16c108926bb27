//! Object-domain curvature-regularized ADMM with momentum.
//!
//! Minimizes `½‖D(Au − τ₀)‖² + Σ φ(κ(u)) |∇u|` with the splitting `v = ∇u`,
//! derivatives taken in voxel units.
//! Each outer iteration shrinks `v`, takes a linearized proximal step in `u`
//! (an FFT screened-Poisson solve with `α = L`), ascends the multiplier,
//! extrapolates with the FISTA momentum sequence and refreshes the
//! curvature weights from the new iterate.

use crate::diffops::{
    curv_weight, gradient, gradient_adjoint, shrinkage, weighted_tv, CurvWeight, ScreenedPoisson,
    VectorField3, DEFAULT_EPS_CURV,
};
use crate::error::{invalid, Error, Result};
use crate::grid::{ScanMask, Shape, Transient, Volume};
use crate::par;
use crate::transport::{operator_norm_sq, LightTransport, NORM_ITERS};

/// Energies beyond this multiple of the initial energy abort the solve.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectSolverConfig {
    /// Constant part of the curvature weight.
    pub a: f64,
    /// Coefficient of `κ²` in the curvature weight.
    pub b: f64,
    /// ADMM penalty.
    pub mu: f64,
    /// Relative energy change that stops the iteration.
    pub eps_stop: f64,
    pub t_max: usize,
    pub eps_curv: f64,
    /// Inflation applied to the power-iteration estimate of `‖A_D‖²`.
    pub l_safety: f64,
    pub norm_iters: usize,
    pub seed: u64,
}

impl Default for ObjectSolverConfig {
    fn default() -> Self {
        ObjectSolverConfig {
            a: 5e-5,
            b: 5e-5,
            mu: 0.1,
            eps_stop: 1e-6,
            t_max: 200,
            eps_curv: DEFAULT_EPS_CURV,
            l_safety: 1.05,
            norm_iters: NORM_ITERS,
            seed: 0,
        }
    }
}

impl ObjectSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return invalid(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.a >= 0.0 && self.b >= 0.0) {
            return invalid("curvature weights a, b must be nonnegative");
        }
        if self.t_max == 0 {
            return invalid("t_max must be at least 1");
        }
        if !(self.eps_stop > 0.0) {
            return invalid("eps_stop must be positive");
        }
        if !(self.eps_curv > 0.0) {
            return invalid("eps_curv must be positive");
        }
        if !(self.l_safety >= 1.0) {
            return invalid("l_safety must be at least 1");
        }
        Ok(())
    }
}

/// Next term of `t_{k+1} = (1 + sqrt(1 + 4 t_k²)) / 2`.
pub fn momentum_next(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

/// `L = 2 · safety · ‖D A‖²`, falling back to 1 when `D A = 0` (nothing
/// scanned), where any positive step leaves the zero iterate unchanged.
pub fn lipschitz(
    op: &LightTransport,
    mask: &ScanMask,
    safety: f64,
    iters: usize,
    seed: u64,
) -> f64 {
    let n2 = operator_norm_sq(op, mask, iters, seed);
    if n2 > 0.0 {
        2.0 * safety * n2
    } else {
        1.0
    }
}

/// Iterates and bookkeeping of one object-domain solve.
#[derive(Clone, Debug)]
pub struct ObjectSolverState {
    pub u: Vec<f64>,
    pub u_prev: Vec<f64>,
    pub u_bar: Vec<f64>,
    /// `A u`, kept so the energy and `A ū` need no extra forward pass.
    pub au: Vec<f64>,
    pub au_bar: Vec<f64>,
    pub v: VectorField3,
    pub lambda: VectorField3,
    pub t_momentum: f64,
    pub weight: CurvWeight,
    pub lipschitz: f64,
    /// `energy_history[k]` is the energy of `u^k`; entry 0 is the start.
    pub energy_history: Vec<f64>,
    pub iter: usize,
}

impl ObjectSolverState {
    pub fn volume(&self, op: &LightTransport) -> Volume {
        Volume::new(*op.volume_grid(), self.u.clone()).expect("iterate has volume shape")
    }
}

/// Fixed inputs of an object-domain solve.
pub struct ObjectProblem<'a> {
    op: &'a LightTransport,
    tau0: &'a [f64],
    weights: Vec<f64>,
    cfg: ObjectSolverConfig,
    poisson: ScreenedPoisson,
}

impl<'a> ObjectProblem<'a> {
    pub fn new(
        op: &'a LightTransport,
        tau0: &'a Transient,
        mask: &ScanMask,
        cfg: ObjectSolverConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if tau0.grid() != op.transient_grid() {
            return invalid("measurement grid does not match the transport operator");
        }
        mask.check(tau0.grid())?;
        Ok(ObjectProblem {
            op,
            tau0: tau0.data(),
            weights: mask.sample_weights(op.transient_grid().nt),
            cfg,
            poisson: ScreenedPoisson::new(regularizer_shape(op)),
        })
    }

    pub fn config(&self) -> &ObjectSolverConfig {
        &self.cfg
    }

    /// `½‖D(Au − τ₀)‖²` given `Au`.
    fn fidelity(&self, au: &[f64]) -> f64 {
        let (t0, w) = (self.tau0, &self.weights);
        0.5 * par::sum_by(au.len(), |p| w[p] * (au[p] - t0[p]).powi(2))
    }

    /// `½‖D(Au − τ₀)‖² + Σ φ(κ(u))|∇u|`
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        let shape = regularizer_shape(self.op);
        let w = curv_weight(u, shape, self.cfg.a, self.cfg.b, self.cfg.eps_curv)?;
        Ok(self.fidelity(&self.op.apply(u)) + weighted_tv(u, shape, &w))
    }

    /// Zero start with `L` from power iteration on `D A`.
    pub fn initial_state(&self, mask: &ScanMask) -> Result<ObjectSolverState> {
        let l = lipschitz(
            self.op,
            mask,
            self.cfg.l_safety,
            self.cfg.norm_iters,
            self.cfg.seed,
        );
        self.state_from(vec![0.0; self.op.volume_grid().len()], l)
    }

    /// Start from `u⁰ = ū⁰ = u0` with a given Lipschitz constant.
    pub fn state_from(&self, u0: Vec<f64>, lipschitz: f64) -> Result<ObjectSolverState> {
        let shape = regularizer_shape(self.op);
        if u0.len() != shape.len() {
            return invalid("initial volume has the wrong size");
        }
        if !(lipschitz > 0.0) {
            return invalid("Lipschitz constant must be positive");
        }
        let au = self.op.apply(&u0);
        let weight = curv_weight(&u0, shape, self.cfg.a, self.cfg.b, self.cfg.eps_curv)?;
        let e0 = self.fidelity(&au) + weighted_tv(&u0, shape, &weight);
        Ok(ObjectSolverState {
            u_prev: u0.clone(),
            u_bar: u0.clone(),
            au_bar: au.clone(),
            u: u0,
            au,
            v: VectorField3::zeros(shape),
            lambda: VectorField3::zeros(shape),
            t_momentum: 1.0,
            weight,
            lipschitz,
            energy_history: vec![e0],
            iter: 0,
        })
    }

    /// One outer iteration.
    pub fn step(&self, s: &mut ObjectSolverState) -> Result<()> {
        let op = self.op;
        let shape = regularizer_shape(op);
        let mu = self.cfg.mu;
        let l = s.lipschitz;

        // v-update at the extrapolated point
        let shifted = gradient(&s.u_bar, shape).add_scaled(-1.0 / mu, &s.lambda);
        s.v = shrinkage(&shifted, &s.weight, mu)?;

        // linearized proximal u-update
        let mut resid = s.au_bar.clone();
        let (t0, w) = (self.tau0, &self.weights);
        par::fill_with(&mut resid, |p| w[p] * (s.au_bar[p] - t0[p]));
        let grad_f = op.apply_adjoint(&resid);
        let mut rhs = gradient_adjoint(&s.v.add_scaled(1.0 / mu, &s.lambda));
        par::scale(mu, &mut rhs);
        par::axpy(l, &s.u_bar, &mut rhs);
        par::axpy(-1.0, &grad_f, &mut rhs);
        let u_new = self.poisson.solve(&rhs, l, mu)?;

        // multiplier ascent
        let gu = gradient(&u_new, shape);
        let mut diff = s.v.clone();
        diff.axpy(-1.0, &gu);
        s.lambda.axpy(mu, &diff);

        // momentum
        let t_next = momentum_next(s.t_momentum);
        let beta = (s.t_momentum - 1.0) / t_next;
        let au_new = op.apply(&u_new);
        extrapolate(&mut s.u_bar, &u_new, &s.u, beta);
        extrapolate(&mut s.au_bar, &au_new, &s.au, beta);
        s.u_prev = std::mem::replace(&mut s.u, u_new);
        s.au = au_new;
        s.t_momentum = t_next;

        // weights from the new iterate, then the energy they define
        s.weight = curv_weight(&s.u, shape, self.cfg.a, self.cfg.b, self.cfg.eps_curv)?;
        let mag = gu.magnitude();
        let ws = s.weight.as_slice();
        let energy = self.fidelity(&s.au) + par::sum_by(mag.len(), |p| ws[p] * mag[p]);
        s.iter += 1;
        check_divergence(s.iter, energy, s.energy_history[0])?;
        s.energy_history.push(energy);
        Ok(())
    }

    /// Iterates until `t_max` or the relative energy change drops to
    /// `eps_stop`.
    pub fn run(&self, s: &mut ObjectSolverState) -> Result<()> {
        while s.iter < self.cfg.t_max {
            self.step(s)?;
            if converged(&s.energy_history, self.cfg.eps_stop) {
                break;
            }
        }
        Ok(())
    }
}

/// Volume-domain derivatives in the regularizer are taken per voxel, so
/// `a`, `b` and `μ` do not depend on the physical pitch.
pub fn regularizer_shape(op: &LightTransport) -> Shape {
    Shape::unit(op.volume_grid().dims())
}

/// `bar = new + beta (new − old)`
pub(crate) fn extrapolate(bar: &mut [f64], new: &[f64], old: &[f64], beta: f64) {
    par::fill_with(bar, |p| new[p] + beta * (new[p] - old[p]));
}

pub(crate) fn check_divergence(iter: usize, energy: f64, initial: f64) -> Result<()> {
    if !energy.is_finite() || (initial > 0.0 && energy > DIVERGENCE_FACTOR * initial) {
        return Err(Error::SolverDiverged {
            iter,
            energy,
            initial,
        });
    }
    Ok(())
}

/// `|E_k − E_{k+1}| / |E_{k+1}| ≤ eps` on the last two entries.
pub(crate) fn converged(history: &[f64], eps: f64) -> bool {
    match history {
        [.., prev, last] => {
            let change = (prev - last).abs();
            change == 0.0 || change <= eps * last.abs()
        }
        _ => false,
    }
}

pub fn energy_object(
    u: &Volume,
    tau0: &Transient,
    mask: &ScanMask,
    op: &LightTransport,
    cfg: &ObjectSolverConfig,
) -> Result<f64> {
    if u.grid() != op.volume_grid() {
        return invalid("volume grid does not match the transport operator");
    }
    ObjectProblem::new(op, tau0, mask, *cfg)?.energy(u.data())
}

/// One outer iteration on an owned state.
pub fn step_object(
    mut state: ObjectSolverState,
    tau0: &Transient,
    mask: &ScanMask,
    op: &LightTransport,
    cfg: &ObjectSolverConfig,
) -> Result<ObjectSolverState> {
    ObjectProblem::new(op, tau0, mask, *cfg)?.step(&mut state)?;
    Ok(state)
}

/// Output of a solve: the nonnegative-clamped volume and the energy trace.
#[derive(Clone, Debug)]
pub struct ObjectSolution {
    pub volume: Volume,
    pub energy_history: Vec<f64>,
    pub iterations: usize,
}

pub fn solve_object(
    tau0: &Transient,
    mask: &ScanMask,
    op: &LightTransport,
    cfg: &ObjectSolverConfig,
) -> Result<ObjectSolution> {
    let problem = ObjectProblem::new(op, tau0, mask, *cfg)?;
    let mut state = problem.initial_state(mask)?;
    problem.run(&mut state)?;
    Ok(ObjectSolution {
        volume: state.volume(op).clamped_nonnegative(),
        energy_history: state.energy_history,
        iterations: state.iter,
    })
}
