//! Symplectic Euler integration of the damped flows.
//!
//! One step of the scheme, with force `F(u) = b(u) .* div(c(u) grad u)`:
//!
//! ```text
//!     v <- (1 - eta dt) v + dt F(u)      (force at the old position)
//!     u <- u + dt v                      (new velocity moves the position)
//! ```
//!
//! Velocities start at zero. In first-order mode the damping is tied to
//! the step, `eta = 1/dt`, which makes the update plain gradient descent
//! with step `dt^2`; this is how the first-order flows are run when
//! comparing iteration counts against the damped second-order dynamics.
//!
//! The step size is either fixed (how all the reference experiments run)
//! or safeguarded by the spectral bound `dt <= min(1/eta, 1/sqrt(B))`,
//! where `B` is the mobility-scaled Gershgorin bound of the negated
//! operator. The safeguarded rule keeps the iteration matrix contractive;
//! see [`crate::spectral`] for the verification machinery.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::operators;
use crate::stopping::{self, Dft2, StoppingConfig};

/// Any iterate with `max |u|` beyond this alias is treated as blown up.
const DIVERGENCE_LIMIT: f64 = 1e10;

/// Which member of the flow family to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// Total-variation flow: constant mobility (`q = 0`).
    Tvf,
    /// Level-set mean-curvature flow: mobility `|grad u|` (`q = 1`).
    Lsmcf,
    /// General family member with mobility `|grad u|^q`, `q` in [0, 2].
    GeneralQ(f64),
}

impl FlowKind {
    /// Mobility exponent of this flow.
    pub fn exponent(&self) -> f64 {
        match self {
            FlowKind::Tvf => 0.0,
            FlowKind::Lsmcf => 1.0,
            FlowKind::GeneralQ(q) => *q,
        }
    }
}

/// First-order (gradient flow) or damped second-order dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    First,
    Second,
}

/// Step-size policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtPolicy {
    /// Uniform step, used by all the reference experiments.
    Fixed(f64),
    /// `min(dt_max, 1/eta, 1/sqrt(bound))` with the current iterate's
    /// spectral bound; a zero bound drops the spectral term.
    Safeguarded(f64),
}

/// Full configuration of one evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub kind: FlowKind,
    pub order: Order,
    /// Damping parameter; ignored (derived as `1/dt`) in first-order mode.
    pub eta: f64,
    /// Regularization inside the coefficient field.
    pub eps: f64,
    pub dt_policy: DtPolicy,
    pub max_iters: usize,
    /// High-frequency stopping rule; `None` runs exactly `max_iters` steps
    /// and skips the per-iteration Fourier transform.
    pub stop: Option<StoppingConfig>,
    /// Record metrics every `record_stride` iterations (the initial and
    /// final iterations are always recorded).
    pub record_stride: usize,
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let q = self.kind.exponent();
        if !(0.0..=2.0).contains(&q) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mobility exponent q must lie in [0, 2], got {q}"
            )));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "damping eta must be positive, got {}",
                self.eta
            )));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "regularization eps must be positive, got {}",
                self.eps
            )));
        }
        match self.dt_policy {
            DtPolicy::Fixed(dt) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "fixed time step must be positive, got {dt}"
                    )));
                }
            }
            DtPolicy::Safeguarded(dt_max) => {
                if !(dt_max > 0.0 && dt_max.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "safeguarded dt_max must be positive, got {dt_max}"
                    )));
                }
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "max_iters must be at least 1".into(),
            ));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParameter(
                "record_stride must be at least 1".into(),
            ));
        }
        if let Some(stop) = &self.stop {
            stop.validate()?;
        }
        Ok(())
    }

    /// Damping actually used for a step of size `dt`.
    pub(crate) fn eta_effective(&self, dt: f64) -> f64 {
        match self.order {
            Order::Second => self.eta,
            Order::First => 1.0 / dt,
        }
    }
}

/// Evolving pair `(u, v)` plus clocks.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub u: ImageGrid,
    pub v: ImageGrid,
    /// Iterations taken so far.
    pub k: usize,
    /// Elapsed model time.
    pub t: f64,
    /// Step used by the most recent iteration (0 before the first step).
    pub last_dt: f64,
}

impl FlowState {
    /// Initial state: given image, zero velocity.
    pub fn initial(u0: ImageGrid) -> Self {
        let v = ImageGrid::from_parts_unchecked(Array2::zeros((u0.rows(), u0.cols())), u0.h());
        Self {
            u: u0,
            v,
            k: 0,
            t: 0.0,
            last_dt: 0.0,
        }
    }
}

/// One recorded iteration of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub k: usize,
    pub t: f64,
    pub dt: f64,
    /// NaN when the run has no stopping rule (statistic not evaluated).
    pub rde: f64,
    pub tv: f64,
    pub kinetic: f64,
    pub entropy: f64,
    /// `t * tv`, the decay-trend monitor.
    pub t_tv: f64,
}

/// Per-iteration energy and stopping diagnostics of a run.
#[derive(Debug, Clone, Default)]
pub struct MetricsTrace {
    records: Vec<MetricsRecord>,
}

impl MetricsTrace {
    pub fn records(&self) -> &[MetricsRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&MetricsRecord> {
        self.records.last()
    }

    fn push(&mut self, rec: MetricsRecord) {
        self.records.push(rec);
    }

    /// CSV with header `k,t,dt,rde,tv,kinetic,entropy`, one row per
    /// recorded iteration, 13 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,t,dt,rde,tv,kinetic,entropy")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.k, r.t, r.dt, r.rde, r.tv, r.kinetic, r.entropy
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// TV, kinetic and total (entropy) energy of a state.
///
/// `kinetic = h^2/2 * sum v^2`, `entropy = kinetic + tv`.
pub fn energies(state: &FlowState) -> (f64, f64, f64) {
    let tv = operators::tv_energy(&state.u);
    let h2 = state.u.h() * state.u.h();
    let kinetic = 0.5 * h2 * state.v.as_slice().iter().map(|v| v * v).sum::<f64>();
    (tv, kinetic, kinetic + tv)
}

/// Picks the step size for the next iteration from the current state.
pub fn choose_dt(state: &FlowState, cfg: &FlowConfig) -> Result<f64> {
    match cfg.dt_policy {
        DtPolicy::Fixed(dt) => Ok(dt),
        DtPolicy::Safeguarded(dt_max) => {
            let bound = operators::gershgorin_bound(&state.u, cfg.eps, cfg.kind.exponent())?;
            let mut dt = dt_max;
            if let Order::Second = cfg.order {
                dt = dt.min(1.0 / cfg.eta);
            }
            if bound > 0.0 {
                dt = dt.min(1.0 / bound.sqrt());
            }
            Ok(dt)
        }
    }
}

/// Scratch buffers shared by all iterations of a run.
struct Workspace {
    c: Array2<f64>,
    b: Option<Array2<f64>>,
    force: Array2<f64>,
}

impl Workspace {
    fn new(rows: usize, cols: usize, q: f64) -> Self {
        Self {
            c: Array2::zeros((rows, cols)),
            b: (q != 0.0).then(|| Array2::zeros((rows, cols))),
            force: Array2::zeros((rows, cols)),
        }
    }
}

/// Advances `(u, v)` by one step of size `dt` in place.
fn advance(
    u: &mut ImageGrid,
    v: &mut ImageGrid,
    cfg: &FlowConfig,
    dt: f64,
    iteration: usize,
    ws: &mut Workspace,
) -> Result<()> {
    let q = cfg.kind.exponent();
    operators::fill_coefficients(u, cfg.eps, &mut ws.c);
    if let Some(b) = ws.b.as_mut() {
        operators::fill_mobility(u, q, b);
    }
    operators::stencil_apply(u, &ws.c, ws.b.as_ref(), &mut ws.force)?;

    let damp = 1.0 - cfg.eta_effective(dt) * dt;
    let fv = ws.force.as_slice().expect("standard layout");
    let uv = u.as_mut_slice();
    let vv = v.as_mut_slice();
    let mut max_abs = 0.0_f64;
    let mut finite = true;
    for p in 0..uv.len() {
        vv[p] = damp * vv[p] + dt * fv[p];
        uv[p] += dt * vv[p];
        let a = uv[p].abs();
        if a > max_abs {
            max_abs = a;
        }
        finite &= uv[p].is_finite() && vv[p].is_finite();
    }
    if !finite || max_abs > DIVERGENCE_LIMIT {
        return Err(Error::Diverged { iteration, max_abs });
    }
    Ok(())
}

/// One symplectic Euler step with the step size from [`choose_dt`].
pub fn step(state: &FlowState, cfg: &FlowConfig) -> Result<FlowState> {
    cfg.validate()?;
    let dt = choose_dt(state, cfg)?;
    let mut u = state.u.clone();
    let mut v = state.v.clone();
    let mut ws = Workspace::new(u.rows(), u.cols(), cfg.kind.exponent());
    advance(&mut u, &mut v, cfg, dt, state.k + 1, &mut ws)?;
    Ok(FlowState {
        u,
        v,
        k: state.k + 1,
        t: state.t + dt,
        last_dt: dt,
    })
}

/// Runs the evolution from `u0` until the stopping rule fires or
/// `max_iters` is reached (reaching `max_iters` is not an error).
pub fn run(u0: &ImageGrid, cfg: &FlowConfig) -> Result<(FlowState, MetricsTrace)> {
    cfg.validate()?;
    let (m, n) = (u0.rows(), u0.cols());
    let mut state = FlowState::initial(u0.clone());
    let mut ws = Workspace::new(m, n, cfg.kind.exponent());
    let mut trace = MetricsTrace::default();

    let mut dft = Dft2::new(m, n);
    let mut mags = Array2::zeros((m, n));
    let mut eval_rde = |u: &ImageGrid, stop: &StoppingConfig| -> Result<f64> {
        dft.magnitudes_into(u, &mut mags);
        stopping::rde_from_magnitudes(&mags, stop)
    };

    let mut rde_current = match &cfg.stop {
        Some(stop) => eval_rde(&state.u, stop)?,
        None => f64::NAN,
    };
    let record = |state: &FlowState, rde: f64, trace: &mut MetricsTrace| {
        let (tv, kinetic, entropy) = energies(state);
        trace.push(MetricsRecord {
            k: state.k,
            t: state.t,
            dt: state.last_dt,
            rde,
            tv,
            kinetic,
            entropy,
            t_tv: state.t * tv,
        });
    };
    record(&state, rde_current, &mut trace);

    loop {
        if let Some(stop) = &cfg.stop {
            if rde_current <= stop.tol {
                break;
            }
        }
        if state.k >= cfg.max_iters {
            break;
        }
        let dt = choose_dt(&state, cfg)?;
        advance(&mut state.u, &mut state.v, cfg, dt, state.k + 1, &mut ws)?;
        state.k += 1;
        state.t += dt;
        state.last_dt = dt;

        let mut terminal = state.k >= cfg.max_iters;
        if let Some(stop) = &cfg.stop {
            rde_current = eval_rde(&state.u, stop)?;
            terminal = terminal || rde_current <= stop.tol;
        }
        if state.k.is_multiple_of(cfg.record_stride) || terminal {
            record(&state, rde_current, &mut trace);
        }
        if terminal {
            break;
        }
    }
    Ok((state, trace))
}
