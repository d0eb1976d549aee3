//! Linearly implicit BDF stepping of the coupled system
//! `M u' + A w = F_u`, `M w − A u = W'(u) + M θ + F_w`.

use crate::assembly::Discretisation;
use crate::error::{check_len, Error, Result};
use crate::field::AnalyticField;
use crate::linalg::LuSolver;
use crate::potentials::PotentialPair;
use crate::sparse::CsrMatrix;

use super::bdf::BdfScheme;
use super::history::{FieldState, History};

/// Right-hand sides `F_u(t)`, `F_w(t)` of the two equations, as load vectors.
pub trait ForcingProvider: Send + Sync {
    /// Load for the `u`-equation, or `None` when it vanishes.
    fn load_u(&self, disc: &Discretisation, t: f64) -> Option<Vec<f64>>;
    /// Load for the `w`-equation, or `None` when it vanishes.
    fn load_w(&self, disc: &Discretisation, t: f64) -> Option<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoForcing;

impl ForcingProvider for NoForcing {
    fn load_u(&self, _: &Discretisation, _: f64) -> Option<Vec<f64>> {
        None
    }

    fn load_w(&self, _: &Discretisation, _: f64) -> Option<Vec<f64>> {
        None
    }
}

/// Forcing given by analytic bulk and surface source terms.
#[derive(Debug, Clone)]
pub struct FieldForcing {
    pub u_bulk: AnalyticField,
    pub u_surf: AnalyticField,
    pub w_bulk: AnalyticField,
    pub w_surf: AnalyticField,
}

impl ForcingProvider for FieldForcing {
    fn load_u(&self, disc: &Discretisation, t: f64) -> Option<Vec<f64>> {
        Some(disc.forcing(&self.u_bulk, &self.u_surf, t))
    }

    fn load_w(&self, disc: &Discretisation, t: f64) -> Option<Vec<f64>> {
        Some(disc.forcing(&self.w_bulk, &self.w_surf, t))
    }
}

fn add_into(target: &mut [f64], extra: Option<&[f64]>) {
    if let Some(e) = extra {
        target.iter_mut().zip(e).for_each(|(a, b)| *a += b);
    }
}

/// Solves `M w⁰ = A u⁰ + nl(u⁰) + M θ + f_w`.
pub fn compute_initial_w(
    disc: &Discretisation,
    pot: &PotentialPair,
    u0: &[f64],
    theta: Option<&[f64]>,
    f_w: Option<&[f64]>,
) -> Result<Vec<f64>> {
    check_len(disc.n(), u0.len())?;
    let mut rhs = disc.stiffness.mul_vec(u0);
    add_into(&mut rhs, Some(&disc.nonlinear_load(pot, u0)?));
    if let Some(th) = theta {
        check_len(disc.n(), th.len())?;
        add_into(&mut rhs, Some(&disc.mass.mul_vec(th)));
    }
    if let Some(f) = f_w {
        check_len(disc.n(), f.len())?;
    }
    add_into(&mut rhs, f_w);
    disc.mass_solve(&rhs)
}

/// Initial-value correction `θ = w0_ritz − w̄` with
/// `M w̄ = A u0_ritz + nl(u0_ritz) + f_w`, so that the corrected initial `w`
/// equals `w0_ritz`.
pub fn compute_theta(
    disc: &Discretisation,
    pot: &PotentialPair,
    u0_ritz: &[f64],
    w0_ritz: &[f64],
    f_w: Option<&[f64]>,
) -> Result<Vec<f64>> {
    check_len(disc.n(), w0_ritz.len())?;
    let w_bar = compute_initial_w(disc, pot, u0_ritz, None, f_w)?;
    Ok(w0_ritz.iter().zip(&w_bar).map(|(a, b)| a - b).collect())
}

/// Everything that defines the semi-discrete problem apart from the data.
pub struct Problem<'a> {
    pub disc: &'a Discretisation,
    pub potential: PotentialPair,
    pub theta: Option<Vec<f64>>,
    pub forcing: &'a dyn ForcingProvider,
}

impl<'a> Problem<'a> {
    pub fn new(disc: &'a Discretisation, potential: PotentialPair) -> Self {
        Problem { disc, potential, theta: None, forcing: &NoForcing }
    }

    pub fn with_forcing(mut self, forcing: &'a dyn ForcingProvider) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Self {
        self.theta = Some(theta);
        self
    }

    /// Initial state at `t0` with `w⁰` from the elliptic equation.
    pub fn initial_state(&self, u0: Vec<f64>, t0: f64) -> Result<FieldState> {
        let f_w = self.forcing.load_w(self.disc, t0);
        let w0 = compute_initial_w(self.disc, &self.potential, &u0, self.theta.as_deref(), f_w.as_deref())?;
        FieldState::new(t0, u0, w0)
    }
}

/// Block matrix `[(δ₀/τ) M, A; −A, M]` of one step.
pub fn step_matrix(disc: &Discretisation, delta0: f64, tau: f64) -> CsrMatrix {
    let n = disc.n();
    let mut t = Vec::with_capacity(2 * (disc.mass.nnz() + disc.stiffness.nnz()));
    for (i, j, v) in disc.mass.triplets() {
        t.push((i, j, delta0 / tau * v));
        t.push((n + i, n + j, v));
    }
    for (i, j, v) in disc.stiffness.triplets() {
        t.push((i, n + j, v));
        t.push((n + i, j, -v));
    }
    CsrMatrix::from_triplets(2 * n, &t)
}

/// One BDF scheme at a fixed step size with its factorised step matrix.
pub struct BdfStepper<'p, 'a> {
    problem: &'p Problem<'a>,
    scheme: BdfScheme,
    tau: f64,
    solver: LuSolver,
}

impl<'p, 'a> BdfStepper<'p, 'a> {
    pub fn new(problem: &'p Problem<'a>, scheme: BdfScheme, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {tau}")));
        }
        let matrix = step_matrix(problem.disc, scheme.delta()[0], tau);
        let solver = LuSolver::new(&matrix, &format!("BDF{} step matrix", scheme.order()))?;
        Ok(BdfStepper { problem, scheme, tau, solver })
    }

    pub fn scheme(&self) -> &BdfScheme {
        &self.scheme
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Advances from a full history of `q` states to the next state.
    pub fn step(&self, history: &History) -> Result<FieldState> {
        let q = self.scheme.order();
        let disc = self.problem.disc;
        let n = disc.n();
        if history.len() != q {
            return Err(Error::History(format!("BDF{q} needs {q} past states, history holds {}", history.len())));
        }
        if (history.tau() - self.tau).abs() > 1e-12 * self.tau {
            return Err(Error::History(format!(
                "history spacing {} differs from step size {}",
                history.tau(),
                self.tau
            )));
        }
        let newest = history.newest().expect("history is non-empty");
        check_len(n, newest.len())?;
        let t = newest.t + self.tau;
        let (delta, gamma) = (self.scheme.delta(), self.scheme.gamma());

        let mut past = vec![0.0; n];
        let mut extrap = vec![0.0; n];
        for j in 1..=q {
            let u = &history.get(q - j).expect("history is full").u;
            past.iter_mut().zip(u).for_each(|(a, b)| *a += delta[j] * b);
            extrap.iter_mut().zip(u).for_each(|(a, b)| *a += gamma[j - 1] * b);
        }
        let mut rhs = disc.mass.mul_vec(&past);
        rhs.iter_mut().for_each(|v| *v *= -1.0 / self.tau);
        add_into(&mut rhs, self.problem.forcing.load_u(disc, t).as_deref());

        let mut r_w = disc.nonlinear_load(&self.problem.potential, &extrap)?;
        if let Some(th) = &self.problem.theta {
            add_into(&mut r_w, Some(&disc.mass.mul_vec(th)));
        }
        add_into(&mut r_w, self.problem.forcing.load_w(disc, t).as_deref());
        rhs.extend(r_w);
        if !rhs.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { step: 0, t });
        }

        let mut x = self.solver.solve(&rhs).map_err(|e| match e {
            Error::Solver { residual, .. } if !residual.is_finite() => Error::NonFinite { step: 0, t },
            other => other,
        })?;
        let w = x.split_off(n);
        let state = FieldState { t, u: x, w };
        if !state.is_finite() {
            return Err(Error::NonFinite { step: 0, t });
        }
        Ok(state)
    }
}

/// Receives every state produced by [`integrate`], including the initial one.
pub trait StepObserver {
    fn observe(&mut self, step: usize, state: &FieldState) -> Result<()>;
}

impl<F: FnMut(usize, &FieldState) -> Result<()>> StepObserver for F {
    fn observe(&mut self, step: usize, state: &FieldState) -> Result<()> {
        self(step, state)
    }
}

/// Observer that stores all states.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<FieldState>,
}

impl StepObserver for Trajectory {
    fn observe(&mut self, _: usize, state: &FieldState) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}

/// Substep count used to start BDF`q` from BDF`q−1`: `⌈τ^{−1/(q−1)}⌉`, so the
/// startup error `O((τ/m)^{q−1})` is `O(τ^q)`.
pub fn bootstrap_substeps(q: usize, tau: f64) -> usize {
    if q <= 2 || tau >= 1.0 {
        1
    } else {
        tau.powf(-1.0 / (q - 1) as f64).ceil() as usize
    }
}

/// Builds the history `u⁰, …, u^{q−1}` for BDF`q`. BDF1 needs only the
/// initial state; BDF2 takes one backward Euler step; higher orders run
/// BDF`q−1` (started the same way) on a substep `τ/m`.
pub fn bootstrap(problem: &Problem<'_>, scheme: &BdfScheme, tau: f64, initial: FieldState) -> Result<History> {
    let q = scheme.order();
    let t0 = initial.t;
    let mut history = History::new(q, tau)?;
    if q == 1 {
        history.push(initial)?;
        return Ok(history);
    }
    let m = bootstrap_substeps(q, tau);
    let sub = BdfScheme::new(q - 1)?;
    let mut collected = vec![initial.clone()];
    let mut keep = |k: usize, s: &FieldState| -> Result<()> {
        if k > 0 && k.is_multiple_of(m) {
            let mut s = s.clone();
            s.t = t0 + (k / m) as f64 * tau;
            collected.push(s);
        }
        Ok(())
    };
    integrate(problem, &sub, tau / m as f64, (q - 1) * m, initial, &mut keep)?;
    for s in collected {
        history.push(s)?;
    }
    Ok(history)
}

/// Runs `n_steps` steps of BDF`q` from `initial`, reporting every state to
/// `observer`, and returns the final state.
pub fn integrate(
    problem: &Problem<'_>,
    scheme: &BdfScheme,
    tau: f64,
    n_steps: usize,
    initial: FieldState,
    observer: &mut dyn StepObserver,
) -> Result<FieldState> {
    check_len(problem.disc.n(), initial.len())?;
    if !initial.is_finite() {
        return Err(Error::NonFinite { step: 0, t: initial.t });
    }
    let q = scheme.order();
    let t0 = initial.t;
    if n_steps == 0 {
        observer.observe(0, &initial)?;
        return Ok(initial);
    }
    let mut history = bootstrap(problem, scheme, tau, initial)?;
    for (k, s) in history.iter().enumerate().take(n_steps + 1) {
        observer.observe(k, s)?;
    }
    if n_steps < q {
        return Ok(history.get(n_steps).expect("bootstrap covers the step").clone());
    }
    let stepper = BdfStepper::new(problem, scheme.clone(), tau)?;
    for k in q..=n_steps {
        let mut state = stepper.step(&history).map_err(|e| match e {
            Error::NonFinite { t, .. } => Error::NonFinite { step: k, t },
            other => other,
        })?;
        state.t = t0 + k as f64 * tau;
        observer.observe(k, &state)?;
        history.push(state)?;
    }
    Ok(history.newest().expect("non-empty").clone())
}
