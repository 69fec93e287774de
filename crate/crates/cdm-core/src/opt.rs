//! Two-stage gradient-free constrained optimization of load paths: a
//! global-best particle swarm followed by a Nelder-Mead simplex refinement,
//! with the triaxiality constraint enforced by a quadratic penalty.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::driver::{run_control, ControlSpec, RunConfig, SimulationRecord, StopReason};
use crate::error::{Error, Result};
use crate::model::Material;
use crate::path::{bezier_fit_interior, PathSpec};
use crate::scalar::{clamp, Real};

/// Particle-swarm settings. Defaults are standard constriction-style
/// coefficients; every field is configurable because no canonical values
/// exist for this problem class.
#[derive(Clone, Copy, Debug)]
pub struct PsoConfig<T> {
    pub swarm: usize,
    pub inertia: T,
    pub cognitive: T,
    pub social: T,
    pub iterations: usize,
    pub seed: u64,
}

impl<T: Real> Default for PsoConfig<T> {
    fn default() -> Self {
        Self {
            swarm: 32,
            inertia: T::of(0.72),
            cognitive: T::of(1.49),
            social: T::of(1.49),
            iterations: 150,
            seed: 0,
        }
    }
}

/// Nelder-Mead settings; reflection/expansion/contraction/shrink are the
/// standard 1, 2, 0.5, 0.5.
#[derive(Clone, Copy, Debug)]
pub struct NmConfig<T> {
    /// Initial simplex edge, as a fraction of each coordinate's box span.
    pub scale: T,
    pub max_iter: usize,
    /// Relative spread of simplex values below which to stop.
    pub f_tol: T,
    /// Simplex diameter below which to stop.
    pub x_tol: T,
}

impl<T: Real> Default for NmConfig<T> {
    fn default() -> Self {
        Self {
            scale: T::of(0.01),
            max_iter: 400,
            f_tol: T::of(1e-9),
            x_tol: T::of(1e-9),
        }
    }
}

/// Outcome of a swarm run.
#[derive(Clone, Debug)]
pub struct PsoResult<T> {
    pub x: Vec<T>,
    pub value: T,
    /// Global best value after each iteration; non-increasing.
    pub history: Vec<T>,
    pub evaluations: usize,
}

/// Global-best particle swarm minimization over a box. Objective failures
/// must be encoded as infinite values by the caller. Deterministic for a
/// given seed: random draws happen sequentially on one thread, objective
/// evaluations run in parallel but are reduced in particle order.
///
/// `seeds` occupy the first particles (clamped into the box); the remainder
/// initialize uniformly at random. Velocities start at zero.
pub fn pso_minimize<T, F>(
    f: F,
    bounds: &[(T, T)],
    cfg: &PsoConfig<T>,
    seeds: &[Vec<T>],
) -> Result<PsoResult<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    let dim = bounds.len();
    if dim == 0 || cfg.swarm == 0 {
        return Err(Error::InvalidState(
            "swarm optimization needs at least one dimension and one particle".into(),
        ));
    }
    for &(lo, hi) in bounds {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidState("swarm bounds must be finite with lo < hi".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut unit = move || T::of(rng.gen::<f64>());

    let mut xs: Vec<Vec<T>> = Vec::with_capacity(cfg.swarm);
    for s in seeds.iter().take(cfg.swarm) {
        if s.len() != dim {
            return Err(Error::InvalidState("seed dimension mismatch".into()));
        }
        xs.push(
            s.iter()
                .zip(bounds)
                .map(|(&v, &(lo, hi))| clamp(v, lo, hi))
                .collect(),
        );
    }
    while xs.len() < cfg.swarm {
        xs.push(bounds.iter().map(|&(lo, hi)| lo + unit() * (hi - lo)).collect());
    }
    let mut vs = vec![vec![T::zero(); dim]; cfg.swarm];

    let eval_all = |xs: &[Vec<T>]| -> Vec<T> {
        xs.par_iter().map(|x| f(x)).collect()
    };

    let mut values = eval_all(&xs);
    let mut evaluations = cfg.swarm;
    let mut pbest = xs.clone();
    let mut pbest_val = values.clone();
    let mut gbest = 0usize;
    for i in 1..cfg.swarm {
        if pbest_val[i] < pbest_val[gbest] {
            gbest = i;
        }
    }
    let mut gx = pbest[gbest].clone();
    let mut gv = pbest_val[gbest];
    let mut history = Vec::with_capacity(cfg.iterations);

    for _ in 0..cfg.iterations {
        for i in 0..cfg.swarm {
            for d in 0..dim {
                let r1 = unit();
                let r2 = unit();
                let v = cfg.inertia * vs[i][d]
                    + cfg.cognitive * r1 * (pbest[i][d] - xs[i][d])
                    + cfg.social * r2 * (gx[d] - xs[i][d]);
                let mut x = xs[i][d] + v;
                let (lo, hi) = bounds[d];
                if x < lo || x > hi {
                    x = clamp(x, lo, hi);
                    vs[i][d] = T::zero();
                } else {
                    vs[i][d] = v;
                }
                xs[i][d] = x;
            }
        }
        values = eval_all(&xs);
        evaluations += cfg.swarm;
        for i in 0..cfg.swarm {
            if values[i] < pbest_val[i] {
                pbest_val[i] = values[i];
                pbest[i] = xs[i].clone();
                if values[i] < gv {
                    gv = values[i];
                    gx = xs[i].clone();
                }
            }
        }
        history.push(gv);
    }
    Ok(PsoResult {
        x: gx,
        value: gv,
        history,
        evaluations,
    })
}

/// Outcome of a simplex descent.
#[derive(Clone, Debug)]
pub struct NmResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Nelder-Mead simplex minimization from a start point with per-coordinate
/// initial steps. Unconstrained; callers wanting a box clamp inside `f`.
pub fn nelder_mead<T, F>(f: F, x0: &[T], steps: &[T], cfg: &NmConfig<T>) -> Result<NmResult<T>>
where
    T: Real,
    F: Fn(&[T]) -> T,
{
    let dim = x0.len();
    if dim == 0 || steps.len() != dim {
        return Err(Error::InvalidState(
            "simplex start and steps must share a nonzero dimension".into(),
        ));
    }
    let mut evaluations = 0usize;
    let mut eval = |x: &[T]| -> T {
        evaluations += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0);
    simplex.push((x0.to_vec(), v0));
    for d in 0..dim {
        let mut x = x0.to_vec();
        x[d] += steps[d];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let half = T::of(0.5);
    let two = T::of(2.0);
    let mut iterations = 0usize;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = (worst - best).abs();
        let diam = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(simplex[0].0.iter())
                    .map(|(&a, &b)| (a - b) * (a - b))
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), |m, d| m.max(d));
        if spread <= cfg.f_tol * (T::one() + best.abs()) || diam <= cfg.x_tol {
            break;
        }

        let centroid: Vec<T> = (0..dim)
            .map(|d| simplex[..dim].iter().map(|(x, _)| x[d]).sum::<T>() / T::of(dim as f64))
            .collect();
        let worst_x = simplex[dim].0.clone();
        let second_worst = simplex[dim - 1].1;
        let project = |t: T| -> Vec<T> {
            (0..dim)
                .map(|d| centroid[d] + t * (centroid[d] - worst_x[d]))
                .collect()
        };

        let xr = project(T::one());
        let vr = eval(&xr);
        if vr < best {
            let xe = project(two);
            let ve = eval(&xe);
            simplex[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
        } else if vr < second_worst {
            simplex[dim] = (xr, vr);
        } else {
            let (xc, vc) = if vr < worst {
                let xc = project(half);
                let vc = eval(&xc);
                (xc, vc)
            } else {
                let xc = project(-half);
                let vc = eval(&xc);
                (xc, vc)
            };
            if vc < worst.min(vr) {
                simplex[dim] = (xc, vc);
            } else {
                // shrink toward the best vertex
                let best_x = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for d in 0..dim {
                        entry.0[d] = best_x[d] + half * (entry.0[d] - best_x[d]);
                    }
                    entry.1 = eval(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal));
    Ok(NmResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        iterations,
        evaluations,
    })
}

/// One load-path component opened for optimization: a Bézier curve with
/// pinned endpoints, `free` interior control values, and box bounds.
#[derive(Clone, Debug)]
pub struct DesignComponent<T> {
    pub start: T,
    pub end: T,
    pub free: usize,
    pub lo: T,
    pub hi: T,
}

/// The design space of an optimization: one entry per controlled component.
#[derive(Clone, Debug)]
pub struct DesignSpace<T> {
    pub components: Vec<DesignComponent<T>>,
}

impl<T: Real> DesignSpace<T> {
    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.free).sum()
    }

    pub fn bounds(&self) -> Vec<(T, T)> {
        let mut b = Vec::with_capacity(self.dim());
        for c in &self.components {
            for _ in 0..c.free {
                b.push((c.lo, c.hi));
            }
        }
        b
    }

    /// Bézier schedules realized by a design vector.
    pub fn paths(&self, x: &[T]) -> Result<Vec<PathSpec<T>>> {
        if x.len() != self.dim() {
            return Err(Error::InvalidState("design vector dimension mismatch".into()));
        }
        let mut out = Vec::with_capacity(self.components.len());
        let mut k = 0;
        for c in &self.components {
            let mut control = Vec::with_capacity(c.free + 2);
            control.push(c.start);
            control.extend_from_slice(&x[k..k + c.free]);
            control.push(c.end);
            k += c.free;
            out.push(PathSpec::Bezier { control });
        }
        Ok(out)
    }

    /// Least-squares projection of reference schedules into the design
    /// space, clamped to the bounds; the swarm's first particle.
    pub fn seed_from(&self, reference: &[PathSpec<T>]) -> Result<Vec<T>> {
        if reference.len() != self.components.len() {
            return Err(Error::InvalidState(
                "one reference schedule per design component is required".into(),
            ));
        }
        let mut seed = Vec::with_capacity(self.dim());
        for (c, r) in self.components.iter().zip(reference) {
            let samples = 16 * (c.free + 1);
            let fit = bezier_fit_interior(c.start, c.end, c.free, &sample_path(r, samples))?;
            for v in fit {
                seed.push(clamp(v, c.lo, c.hi));
            }
        }
        Ok(seed)
    }
}

fn sample_path<T: Real>(p: &PathSpec<T>, n: usize) -> Vec<(T, T)> {
    (0..=n)
        .map(|k| {
            let t = T::of(k as f64 / n as f64);
            (t, p.eval(t))
        })
        .collect()
}

/// Scenario summary carried in the optimization report.
#[derive(Clone, Debug)]
pub struct RunSummary<T> {
    pub f_e_final: T,
    pub xi_e_final: T,
    pub eps_p_eq_final: T,
    /// Triaxiality per time step (NaN where the stress is degenerate).
    pub eta_trace: Vec<T>,
}

impl<T: Real> RunSummary<T> {
    fn of(rec: &SimulationRecord<T>) -> Self {
        let last = rec.last();
        Self {
            f_e_final: last.f_e,
            xi_e_final: last.xi_e,
            eps_p_eq_final: last.eps_p_eq,
            eta_trace: rec.rows.iter().map(|r| r.eta).collect(),
        }
    }
}

/// Result of a constrained load-path optimization.
#[derive(Clone, Debug)]
pub struct OptimizationReport<T> {
    pub reference: RunSummary<T>,
    pub optimized: RunSummary<T>,
    /// Winning design vector (empty for a zero-dimensional design space).
    pub design: Vec<T>,
    /// min over sampled steps of (eta_opt - eta_ref); >= -1e-6 means the
    /// triaxiality constraint holds everywhere.
    pub feasibility_margin: T,
    pub pso_history: Vec<T>,
    pub seed: u64,
    pub evaluations: usize,
}

/// Penalized objective: minimize -f_E(1) plus a quadratic penalty on
/// triaxiality shortfall against the reference trace.
fn penalized<T: Real>(rec: &SimulationRecord<T>, eta_ref: &[T], weight: T) -> (T, T) {
    let mut violation = T::zero();
    let mut margin = T::infinity();
    for (row, &er) in rec.rows.iter().zip(eta_ref) {
        if row.degenerate || !er.is_finite() {
            continue;
        }
        let gap = row.eta - er;
        margin = margin.min(gap);
        if gap < T::zero() {
            violation += gap * gap;
        }
    }
    if !margin.is_finite() {
        margin = T::zero();
    }
    (-rec.last().f_e + weight * violation, margin)
}

/// Maximize the final stiffness norm f_E(1) over Bézier load-path designs,
/// subject to the optimized triaxiality staying at or above the reference
/// trace at every sampled time.
///
/// `build` maps the per-component schedules to the full control law (which
/// components they drive, which stresses are held). The reference schedules
/// are simulated first; their least-squares projection into the design space
/// seeds the swarm. A zero-dimensional design space returns the reference
/// unchanged. After PSO and Nelder-Mead, the best feasible candidate among
/// {refined, swarm best, seed} is reported; if none is feasible the least
/// infeasible one is reported with its (negative) margin.
pub fn optimize_load_path<T, M, B>(
    model: &M,
    design: &DesignSpace<T>,
    reference: &[PathSpec<T>],
    build: B,
    run_cfg: &RunConfig<T>,
    pso_cfg: &PsoConfig<T>,
    nm_cfg: &NmConfig<T>,
) -> Result<OptimizationReport<T>>
where
    T: Real,
    M: Material<T>,
    B: Fn(Vec<PathSpec<T>>) -> ControlSpec<T> + Sync,
{
    let ref_record = run_control(model, &build(reference.to_vec()), run_cfg)?;
    if ref_record.stop != StopReason::Completed {
        return Err(Error::InvalidState(format!(
            "reference scenario must run to completion, stopped with {:?}",
            ref_record.stop
        )));
    }
    let eta_ref: Vec<T> = ref_record.rows.iter().map(|r| r.eta).collect();
    let reference_summary = RunSummary::of(&ref_record);

    if design.dim() == 0 {
        return Ok(OptimizationReport {
            optimized: reference_summary.clone(),
            reference: reference_summary,
            design: Vec::new(),
            feasibility_margin: T::zero(),
            pso_history: Vec::new(),
            seed: pso_cfg.seed,
            evaluations: 0,
        });
    }

    let weight = T::of(1e6) * ref_record.rows[0].f_e;
    let bounds = design.bounds();
    let simulate = |x: &[T]| -> Result<SimulationRecord<T>> {
        let law = build(design.paths(x)?);
        run_control(model, &law, run_cfg)
    };
    let objective = |x: &[T]| -> T {
        match simulate(x) {
            Ok(rec) if rec.stop == StopReason::Completed => penalized(&rec, &eta_ref, weight).0,
            _ => T::infinity(),
        }
    };

    let seed_x = design.seed_from(reference)?;
    let pso = pso_minimize(&objective, &bounds, pso_cfg, std::slice::from_ref(&seed_x))?;

    let steps: Vec<T> = bounds.iter().map(|&(lo, hi)| nm_cfg.scale * (hi - lo)).collect();
    let boxed = |x: &[T]| -> T {
        let clamped: Vec<T> = x
            .iter()
            .zip(bounds.iter())
            .map(|(&v, &(lo, hi))| clamp(v, lo, hi))
            .collect();
        objective(&clamped)
    };
    let nm = nelder_mead(&boxed, &pso.x, &steps, nm_cfg)?;
    let refined: Vec<T> = nm
        .x
        .iter()
        .zip(bounds.iter())
        .map(|(&v, &(lo, hi))| clamp(v, lo, hi))
        .collect();

    // deterministic final selection among the three champions
    let mut best: Option<(Vec<T>, SimulationRecord<T>, T, T, bool)> = None;
    for cand in [&refined, &pso.x, &seed_x] {
        let rec = match simulate(cand) {
            Ok(r) if r.stop == StopReason::Completed => r,
            _ => continue,
        };
        let (value, margin) = penalized(&rec, &eta_ref, weight);
        let feasible = margin >= T::of(-1e-6);
        let better = match &best {
            None => true,
            Some((_, _, bv, bm, bf)) => match (feasible, *bf) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => value < *bv,
                (false, false) => margin > *bm,
            },
        };
        if better {
            best = Some((cand.clone(), rec, value, margin, feasible));
        }
    }
    let (design_x, rec, _, margin, _) = best.ok_or_else(|| {
        Error::InvalidState("every optimization candidate failed to simulate".into())
    })?;

    Ok(OptimizationReport {
        reference: reference_summary,
        optimized: RunSummary::of(&rec),
        design: design_x,
        feasibility_margin: margin,
        pso_history: pso.history,
        seed: pso_cfg.seed,
        evaluations: pso.evaluations + nm.evaluations + 3,
    })
}
