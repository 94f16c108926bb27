//! Dual-domain (signal + object) curvature-regularized ADMM.
//!
//! Jointly recovers the volume `u` and a completed transient `τ` from
//! `½‖Au − τ‖² + (λ/2)‖D(τ − τ₀)‖² + Σ φ(κ(u))|∇u| + Σ φ(κ(τ))|∇τ|`
//! with the splittings `v = ∇u`, `w = ∇τ`, `f = τ`. Transient-domain
//! derivatives use unit pitch on all three axes.

use crate::diffops::{
    curv_weight, gradient, gradient_adjoint, shrinkage, weighted_tv, CurvWeight, ScreenedPoisson,
    VectorField3, DEFAULT_EPS_CURV,
};
use crate::error::{invalid, Result};
use crate::grid::{ScanMask, Shape, Transient, Volume};
use crate::par;
use crate::solver_object::{
    check_divergence, converged, extrapolate, lipschitz, momentum_next, regularizer_shape,
    solve_object, ObjectSolverConfig,
};
use crate::transport::{LightTransport, NORM_ITERS};

/// How the `u` subproblem is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UUpdate {
    /// Linearized proximal step with `α = L`, one FFT solve.
    Majorize,
    /// Conjugate gradients on `(AᵀA + μ₁∇*∇) u = Aᵀτ + μ₁∇*(v + Λ₁/μ₁)`,
    /// warm-started at `ū`.
    InnerCg { iters: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualSolverConfig {
    /// Weight of the measured-data term.
    pub lambda: f64,
    pub a_u: f64,
    pub b_u: f64,
    pub a_tau: f64,
    pub b_tau: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub eps_stop: f64,
    pub t_max: usize,
    pub eps_curv: f64,
    pub l_safety: f64,
    pub norm_iters: usize,
    pub seed: u64,
    /// Start from an object-domain solve instead of zero.
    pub init_with_object: bool,
    pub warm_start_iters: usize,
    /// ADMM penalty of the warm start; `mu1` applies to the dual iterations.
    pub warm_start_mu: f64,
    pub u_update: UUpdate,
}

impl Default for DualSolverConfig {
    fn default() -> Self {
        DualSolverConfig {
            lambda: 1.0,
            a_u: 5e-5,
            b_u: 5e-5,
            a_tau: 1e-4,
            b_tau: 1e-4,
            mu1: 1.0,
            mu2: 800.0,
            mu3: 2.0,
            eps_stop: 1e-6,
            t_max: 300,
            eps_curv: DEFAULT_EPS_CURV,
            l_safety: 1.05,
            norm_iters: NORM_ITERS,
            seed: 0,
            init_with_object: true,
            warm_start_iters: 50,
            warm_start_mu: 0.1,
            u_update: UUpdate::Majorize,
        }
    }
}

impl DualSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return invalid(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.mu1 > 0.0 && self.mu2 > 0.0 && self.mu3 > 0.0 && self.warm_start_mu > 0.0) {
            return invalid("penalties mu1, mu2, mu3, warm_start_mu must be positive");
        }
        if !(self.a_u >= 0.0 && self.b_u >= 0.0 && self.a_tau >= 0.0 && self.b_tau >= 0.0) {
            return invalid("curvature weights must be nonnegative");
        }
        if self.t_max == 0 {
            return invalid("t_max must be at least 1");
        }
        if !(self.eps_stop > 0.0 && self.eps_curv > 0.0) {
            return invalid("eps_stop and eps_curv must be positive");
        }
        if !(self.l_safety >= 1.0) {
            return invalid("l_safety must be at least 1");
        }
        if let UUpdate::InnerCg { iters: 0 } = self.u_update {
            return invalid("inner CG needs at least one iteration");
        }
        Ok(())
    }

    /// Settings of the object-domain warm start.
    pub fn warm_start_config(&self) -> ObjectSolverConfig {
        ObjectSolverConfig {
            a: self.a_u,
            b: self.b_u,
            mu: self.warm_start_mu,
            eps_stop: self.eps_stop,
            t_max: self.warm_start_iters.max(1),
            eps_curv: self.eps_curv,
            l_safety: self.l_safety,
            norm_iters: self.norm_iters,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualSolverState {
    pub u: Vec<f64>,
    pub u_prev: Vec<f64>,
    pub u_bar: Vec<f64>,
    pub au: Vec<f64>,
    pub au_bar: Vec<f64>,
    pub tau: Vec<f64>,
    pub tau_prev: Vec<f64>,
    pub tau_bar: Vec<f64>,
    pub f: Vec<f64>,
    pub v: VectorField3,
    pub w: VectorField3,
    pub lambda1: VectorField3,
    pub lambda2: VectorField3,
    pub lambda3: Vec<f64>,
    pub t_momentum: f64,
    pub weight_u: CurvWeight,
    pub weight_tau: CurvWeight,
    pub lipschitz: f64,
    pub energy_history: Vec<f64>,
    pub iter: usize,
}

impl DualSolverState {
    pub fn volume(&self, op: &LightTransport) -> Volume {
        Volume::new(*op.volume_grid(), self.u.clone()).expect("iterate has volume shape")
    }

    pub fn transient(&self, op: &LightTransport) -> Transient {
        Transient::new(*op.transient_grid(), self.tau.clone()).expect("iterate has transient shape")
    }
}

pub struct DualProblem<'a> {
    op: &'a LightTransport,
    tau0: &'a [f64],
    weights: Vec<f64>,
    cfg: DualSolverConfig,
    vol_shape: Shape,
    tr_shape: Shape,
    poisson_u: ScreenedPoisson,
    poisson_tau: ScreenedPoisson,
}

impl<'a> DualProblem<'a> {
    pub fn new(
        op: &'a LightTransport,
        tau0: &'a Transient,
        mask: &ScanMask,
        cfg: DualSolverConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if tau0.grid() != op.transient_grid() {
            return invalid("measurement grid does not match the transport operator");
        }
        mask.check(tau0.grid())?;
        let vol_shape = regularizer_shape(op);
        let tr_shape = op.transient_grid().shape();
        Ok(DualProblem {
            op,
            tau0: tau0.data(),
            weights: mask.sample_weights(op.transient_grid().nt),
            cfg,
            vol_shape,
            tr_shape,
            poisson_u: ScreenedPoisson::new(vol_shape),
            poisson_tau: ScreenedPoisson::new(tr_shape),
        })
    }

    pub fn config(&self) -> &DualSolverConfig {
        &self.cfg
    }

    fn data_terms(&self, au: &[f64], tau: &[f64]) -> f64 {
        let (t0, d, lam) = (self.tau0, &self.weights, self.cfg.lambda);
        par::sum_by(tau.len(), |p| {
            0.5 * (au[p] - tau[p]).powi(2) + 0.5 * lam * d[p] * (tau[p] - t0[p]).powi(2)
        })
    }

    pub fn energy(&self, u: &[f64], tau: &[f64]) -> Result<f64> {
        let c = &self.cfg;
        let wu = curv_weight(u, self.vol_shape, c.a_u, c.b_u, c.eps_curv)?;
        let wt = curv_weight(tau, self.tr_shape, c.a_tau, c.b_tau, c.eps_curv)?;
        Ok(self.data_terms(&self.op.apply(u), tau)
            + weighted_tv(u, self.vol_shape, &wu)
            + weighted_tv(tau, self.tr_shape, &wt))
    }

    /// Zero start, or the object-domain warm start when configured.
    pub fn initial_state(&self, mask: &ScanMask, tau0: &Transient) -> Result<DualSolverState> {
        let full = ScanMask::full(self.op.transient_grid().ns_x, self.op.transient_grid().ns_y);
        let l = lipschitz(
            self.op,
            &full,
            self.cfg.l_safety,
            self.cfg.norm_iters,
            self.cfg.seed,
        );
        if self.cfg.init_with_object && mask.count() > 0 {
            let warm = solve_object(tau0, mask, self.op, &self.cfg.warm_start_config())?;
            let u0 = warm.volume.into_data();
            let tau_init = self.op.apply(&u0);
            self.state_from(u0, tau_init, l)
        } else {
            let n = self.op.volume_grid().len();
            self.state_from(vec![0.0; n], vec![0.0; self.tau0.len()], l)
        }
    }

    /// Start from `(u0, tau_init)` with zero auxiliaries and multipliers.
    pub fn state_from(
        &self,
        u0: Vec<f64>,
        tau_init: Vec<f64>,
        lipschitz: f64,
    ) -> Result<DualSolverState> {
        if u0.len() != self.vol_shape.len() || tau_init.len() != self.tr_shape.len() {
            return invalid("initial iterates have the wrong size");
        }
        if !(lipschitz > 0.0) {
            return invalid("Lipschitz constant must be positive");
        }
        let c = &self.cfg;
        let au = self.op.apply(&u0);
        let weight_u = curv_weight(&u0, self.vol_shape, c.a_u, c.b_u, c.eps_curv)?;
        let weight_tau = curv_weight(&tau_init, self.tr_shape, c.a_tau, c.b_tau, c.eps_curv)?;
        let e0 = self.data_terms(&au, &tau_init)
            + weighted_tv(&u0, self.vol_shape, &weight_u)
            + weighted_tv(&tau_init, self.tr_shape, &weight_tau);
        Ok(DualSolverState {
            u_prev: u0.clone(),
            u_bar: u0.clone(),
            au_bar: au.clone(),
            u: u0,
            au,
            tau_prev: tau_init.clone(),
            tau_bar: tau_init.clone(),
            f: tau_init.clone(),
            tau: tau_init,
            v: VectorField3::zeros(self.vol_shape),
            w: VectorField3::zeros(self.tr_shape),
            lambda1: VectorField3::zeros(self.vol_shape),
            lambda2: VectorField3::zeros(self.tr_shape),
            lambda3: vec![0.0; self.tr_shape.len()],
            t_momentum: 1.0,
            weight_u,
            weight_tau,
            lipschitz,
            energy_history: vec![e0],
            iter: 0,
        })
    }

    /// Closed-form minimizer of `(λ/2) d (f − τ₀)² + (μ₃/2)(f − τ̄ + Λ₃/μ₃)²`.
    pub fn f_update(&self, tau_bar: &[f64], lambda3: &[f64]) -> Vec<f64> {
        let (t0, d) = (self.tau0, &self.weights);
        let (lam, mu3) = (self.cfg.lambda, self.cfg.mu3);
        let mut f = vec![0.0; tau_bar.len()];
        par::fill_with(&mut f, |p| {
            (lam * d[p] * t0[p] + mu3 * (tau_bar[p] - lambda3[p] / mu3)) / (lam * d[p] + mu3)
        });
        f
    }

    /// Right-hand side of the `τ` subproblem.
    pub fn tau_rhs(&self, s: &DualSolverState) -> Vec<f64> {
        let (mu2, mu3) = (self.cfg.mu2, self.cfg.mu3);
        let mut rhs = gradient_adjoint(&s.w.add_scaled(1.0 / mu2, &s.lambda2));
        par::scale(mu2, &mut rhs);
        par::axpy(1.0, &s.au_bar, &mut rhs);
        par::axpy(mu3, &s.f, &mut rhs);
        par::axpy(1.0, &s.lambda3, &mut rhs);
        rhs
    }

    fn u_update(&self, s: &DualSolverState) -> Result<Vec<f64>> {
        let mu1 = self.cfg.mu1;
        let mut prox = gradient_adjoint(&s.v.add_scaled(1.0 / mu1, &s.lambda1));
        par::scale(mu1, &mut prox);
        match self.cfg.u_update {
            UUpdate::Majorize => {
                let l = s.lipschitz;
                let mut resid = s.au_bar.clone();
                par::axpy(-1.0, &s.tau, &mut resid);
                let grad_f = self.op.apply_adjoint(&resid);
                let mut rhs = prox;
                par::axpy(l, &s.u_bar, &mut rhs);
                par::axpy(-1.0, &grad_f, &mut rhs);
                self.poisson_u.solve(&rhs, l, mu1)
            }
            UUpdate::InnerCg { iters } => {
                let mut rhs = self.op.apply_adjoint(&s.tau);
                par::axpy(1.0, &prox, &mut rhs);
                let normal = |x: &[f64]| {
                    let mut y = self.op.apply_adjoint(&self.op.apply(x));
                    let lap = gradient_adjoint(&gradient(x, self.vol_shape));
                    par::axpy(mu1, &lap, &mut y);
                    y
                };
                Ok(conjugate_gradient(normal, &rhs, s.u_bar.clone(), iters))
            }
        }
    }

    pub fn step(&self, s: &mut DualSolverState) -> Result<()> {
        let c = self.cfg;
        let (op, vs, ts) = (self.op, self.vol_shape, self.tr_shape);

        // (1), (2) shrinkage in both domains
        s.v = shrinkage(
            &gradient(&s.u_bar, vs).add_scaled(-1.0 / c.mu1, &s.lambda1),
            &s.weight_u,
            c.mu1,
        )?;
        s.w = shrinkage(
            &gradient(&s.tau_bar, ts).add_scaled(-1.0 / c.mu2, &s.lambda2),
            &s.weight_tau,
            c.mu2,
        )?;
        // (3) data-consistent copy
        s.f = self.f_update(&s.tau_bar, &s.lambda3);
        // (4) signal update
        let tau_new = self
            .poisson_tau
            .solve(&self.tau_rhs(s), 1.0 + c.mu3, c.mu2)?;
        s.tau_prev = std::mem::replace(&mut s.tau, tau_new);
        // (5) object update
        let u_new = self.u_update(s)?;

        // (6) multipliers
        let gu = gradient(&u_new, vs);
        let gt = gradient(&s.tau, ts);
        s.lambda1.axpy(c.mu1, &s.v.add_scaled(-1.0, &gu));
        s.lambda2.axpy(c.mu2, &s.w.add_scaled(-1.0, &gt));
        par::axpy(c.mu3, &s.f, &mut s.lambda3);
        par::axpy(-c.mu3, &s.tau, &mut s.lambda3);

        // (7) shared momentum
        let t_next = momentum_next(s.t_momentum);
        let beta = (s.t_momentum - 1.0) / t_next;
        let au_new = op.apply(&u_new);
        extrapolate(&mut s.u_bar, &u_new, &s.u, beta);
        extrapolate(&mut s.au_bar, &au_new, &s.au, beta);
        extrapolate(&mut s.tau_bar, &s.tau, &s.tau_prev, beta);
        s.u_prev = std::mem::replace(&mut s.u, u_new);
        s.au = au_new;
        s.t_momentum = t_next;

        // (8) weights, energy
        s.weight_u = curv_weight(&s.u, vs, c.a_u, c.b_u, c.eps_curv)?;
        s.weight_tau = curv_weight(&s.tau, ts, c.a_tau, c.b_tau, c.eps_curv)?;
        let (mu_, mt) = (gu.magnitude(), gt.magnitude());
        let (wu, wt) = (s.weight_u.as_slice(), s.weight_tau.as_slice());
        let energy = self.data_terms(&s.au, &s.tau)
            + par::sum_by(mu_.len(), |p| wu[p] * mu_[p])
            + par::sum_by(mt.len(), |p| wt[p] * mt[p]);
        s.iter += 1;
        check_divergence(s.iter, energy, s.energy_history[0])?;
        s.energy_history.push(energy);
        Ok(())
    }

    pub fn run(&self, s: &mut DualSolverState) -> Result<()> {
        while s.iter < self.cfg.t_max {
            self.step(s)?;
            if converged(&s.energy_history, self.cfg.eps_stop) {
                break;
            }
        }
        Ok(())
    }
}

/// Plain CG for a symmetric positive semidefinite operator.
pub fn conjugate_gradient<F>(apply: F, rhs: &[f64], x0: Vec<f64>, iters: usize) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = x0;
    let mut r = rhs.to_vec();
    par::axpy(-1.0, &apply(&x), &mut r);
    let mut p = r.clone();
    let mut rr = par::norm_sq(&r);
    let tol = 1e-30 * par::norm_sq(rhs).max(f64::MIN_POSITIVE);
    for _ in 0..iters {
        if rr <= tol {
            break;
        }
        let ap = apply(&p);
        let pap = par::dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        par::axpy(alpha, &p, &mut x);
        par::axpy(-alpha, &ap, &mut r);
        let rr_new = par::norm_sq(&r);
        let beta = rr_new / rr;
        par::scale(beta, &mut p);
        par::axpy(1.0, &r, &mut p);
        rr = rr_new;
    }
    x
}

pub fn energy_dual(
    u: &Volume,
    tau: &Transient,
    tau0: &Transient,
    mask: &ScanMask,
    op: &LightTransport,
    cfg: &DualSolverConfig,
) -> Result<f64> {
    if u.grid() != op.volume_grid() || tau.grid() != op.transient_grid() {
        return invalid("iterates do not match the transport operator");
    }
    DualProblem::new(op, tau0, mask, *cfg)?.energy(u.data(), tau.data())
}

pub fn step_dual(
    mut state: DualSolverState,
    tau0: &Transient,
    mask: &ScanMask,
    op: &LightTransport,
    cfg: &DualSolverConfig,
) -> Result<DualSolverState> {
    DualProblem::new(op, tau0, mask, *cfg)?.step(&mut state)?;
    Ok(state)
}

#[derive(Clone, Debug)]
pub struct DualSolution {
    pub volume: Volume,
    pub transient: Transient,
    pub energy_history: Vec<f64>,
    pub iterations: usize,
}

pub fn solve_dual(
    tau0: &Transient,
    mask: &ScanMask,
    op: &LightTransport,
    cfg: &DualSolverConfig,
) -> Result<DualSolution> {
    let problem = DualProblem::new(op, tau0, mask, *cfg)?;
    let mut state = problem.initial_state(mask, tau0)?;
    problem.run(&mut state)?;
    Ok(DualSolution {
        volume: state.volume(op).clamped_nonnegative(),
        transient: state.transient(op),
        energy_history: state.energy_history,
        iterations: state.iter,
    })
}
