//! Scalar load schedules over normalized time t in [0, 1]: piecewise-linear
//! interpolation, Bezier curves in Bernstein form, and Euler-angle rotation
//! schedules built from them.

use crate::error::{Error, Result};
use crate::scalar::{clamp, Real};

/// A scalar function of normalized time t in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub enum PathSpec<T> {
    /// Piecewise-linear with knots (t_i, value_i), t strictly increasing and
    /// covering [0, 1].
    Pwl { knots: Vec<(T, T)> },
    /// Bezier curve of order len-1 with the given control values.
    Bezier { control: Vec<T> },
}

impl<T: Real> PathSpec<T> {
    /// Constant value over the whole interval.
    pub fn constant(v: T) -> Self {
        PathSpec::Pwl {
            knots: vec![(T::zero(), v), (T::one(), v)],
        }
    }

    /// Linear ramp from `a` at t = 0 to `b` at t = 1.
    pub fn ramp(a: T, b: T) -> Self {
        PathSpec::Pwl {
            knots: vec![(T::zero(), a), (T::one(), b)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PathSpec::Pwl { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidState(
                        "piecewise-linear path needs at least two knots".into(),
                    ));
                }
                let eps = T::of(1e-12);
                if knots[0].0.abs() > eps || (knots[knots.len() - 1].0 - T::one()).abs() > eps {
                    return Err(Error::InvalidState(
                        "piecewise-linear knots must cover [0, 1]".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::InvalidState(
                            "piecewise-linear knots must be strictly increasing in t".into(),
                        ));
                    }
                }
                Ok(())
            }
            PathSpec::Bezier { control } => {
                if control.len() < 2 {
                    return Err(Error::InvalidState(
                        "Bezier path needs at least two control values (order >= 1)".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Value at normalized time t (clamped into [0, 1]).
    pub fn eval(&self, t: T) -> T {
        let t = clamp(t, T::zero(), T::one());
        match self {
            PathSpec::Pwl { knots } => eval_pwl(t, knots),
            PathSpec::Bezier { control } => eval_bezier(t, control),
        }
    }

    /// Value at the end of the interval.
    pub fn final_value(&self) -> T {
        self.eval(T::one())
    }
}

/// Linear interpolation between the bracketing knots.
pub fn eval_pwl<T: Real>(t: T, knots: &[(T, T)]) -> T {
    debug_assert!(knots.len() >= 2);
    if t <= knots[0].0 {
        return knots[0].1;
    }
    for w in knots.windows(2) {
        let ((t0, p0), (t1, p1)) = (w[0], w[1]);
        if t <= t1 {
            return p0 + (p1 - p0) * (t - t0) / (t1 - t0);
        }
    }
    knots[knots.len() - 1].1
}

/// Bernstein-form evaluation via de Casteljau's algorithm.
pub fn eval_bezier<T: Real>(t: T, control: &[T]) -> T {
    debug_assert!(!control.is_empty());
    let mut work = control.to_vec();
    let s = T::one() - t;
    for level in (1..work.len()).rev() {
        for i in 0..level {
            work[i] = s * work[i] + t * work[i + 1];
        }
    }
    work[0]
}

/// Least-squares fit of the interior control values of a Bezier curve with
/// fixed endpoints to samples (t_k, y_k). Returns the `free` interior values
/// (full control vector is [start, interior..., end], order free + 1).
pub fn bezier_fit_interior<T: Real>(
    start: T,
    end: T,
    free: usize,
    samples: &[(T, T)],
) -> Result<Vec<T>> {
    if free == 0 {
        return Ok(Vec::new());
    }
    if samples.len() < free {
        return Err(Error::InvalidState(
            "not enough samples for the Bezier fit".into(),
        ));
    }
    let order = free + 1;
    let bern = |i: usize, t: T| -> T {
        // C(order, i) (1-t)^(order-i) t^i
        let mut c = T::one();
        for j in 0..i {
            c = c * T::of((order - j) as f64) / T::of((j + 1) as f64);
        }
        c * (T::one() - t).powf(T::of((order - i) as f64)) * t.powf(T::of(i as f64))
    };
    // normal equations of min_q sum_k (sum_i B_i(t_k) q_i - r_k)^2
    let mut ata = vec![T::zero(); free * free];
    let mut atb = vec![T::zero(); free];
    for &(t, y) in samples {
        let r = y - start * bern(0, t) - end * bern(order, t);
        let basis: Vec<T> = (1..=free).map(|i| bern(i, t)).collect();
        for i in 0..free {
            atb[i] = atb[i] + basis[i] * r;
            for j in 0..free {
                ata[i * free + j] = ata[i * free + j] + basis[i] * basis[j];
            }
        }
    }
    crate::numerics::solve_linear(&mut ata, &mut atb)?;
    Ok(atb)
}

/// Euler-angle schedules of a rotating principal frame; all three angles must
/// vanish at t = 1 so rotated and proportional paths share their final state.
#[derive(Clone, Debug)]
pub struct RotationSchedule<T> {
    pub alpha: PathSpec<T>,
    pub beta: PathSpec<T>,
    pub gamma: PathSpec<T>,
}

impl<T: Real> RotationSchedule<T> {
    /// The identity schedule (no rotation at any time).
    pub fn identity() -> Self {
        Self {
            alpha: PathSpec::constant(T::zero()),
            beta: PathSpec::constant(T::zero()),
            gamma: PathSpec::constant(T::zero()),
        }
    }

    /// Half-sine bumps amp * sin(pi t) per angle: zero at both ends, peak
    /// amplitude at t = 1/2.
    pub fn sine_bumps(amp_alpha: T, amp_beta: T, amp_gamma: T) -> Self {
        let bump = |amp: T| {
            let n = 32;
            let knots = (0..=n)
                .map(|k| {
                    let t = T::of(k as f64 / n as f64);
                    (t, amp * (T::PI() * t).sin())
                })
                .collect();
            PathSpec::Pwl { knots }
        };
        Self {
            alpha: bump(amp_alpha),
            beta: bump(amp_beta),
            gamma: bump(amp_gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.validate()?;
        self.beta.validate()?;
        self.gamma.validate()?;
        let tol = T::of(1e-12);
        for (name, p) in [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
        ] {
            if p.final_value().abs() > tol {
                return Err(Error::InvalidState(format!(
                    "Euler angle {name} must vanish at t = 1"
                )));
            }
        }
        Ok(())
    }

    /// Rotation matrix at time t (intrinsic z-y'-x'' composition).
    pub fn rotation(&self, t: T) -> [[T; 3]; 3] {
        crate::tensor::euler_zyx(self.alpha.eval(t), self.beta.eval(t), self.gamma.eval(t))
    }

    /// True when all three schedules are identically zero.
    pub fn is_identity(&self) -> bool {
        let n = 64;
        (0..=n).all(|k| {
            let t = T::of(k as f64 / n as f64);
            self.alpha.eval(t) == T::zero()
                && self.beta.eval(t) == T::zero()
                && self.gamma.eval(t) == T::zero()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pwl_interpolates_its_knots() {
        let knots = vec![(0.0, 0.0), (0.5, 2.0), (1.0, 1.0)];
        assert_eq!(eval_pwl(0.0, &knots), 0.0);
        assert_eq!(eval_pwl(0.5, &knots), 2.0);
        assert_eq!(eval_pwl(1.0, &knots), 1.0);
    }

    #[test]
    fn pwl_two_knot_midpoint() {
        let knots = vec![(0.0, 0.0), (1.0, 1.0)];
        assert_relative_eq!(eval_pwl(0.25, &knots), 0.25);
    }

    #[test]
    fn pwl_three_knot_interpolation() {
        let knots = vec![(0.0, 0.0), (0.5, 2.0), (1.0, 1.0)];
        assert_relative_eq!(eval_pwl(0.75, &knots), 1.5);
    }

    #[test]
    fn bezier_endpoints_are_control_endpoints() {
        let q = vec![3.0, -1.0, 2.0, 7.0];
        assert_eq!(eval_bezier(0.0, &q), 3.0);
        assert_eq!(eval_bezier(1.0, &q), 7.0);
    }

    #[test]
    fn bezier_linear_midpoint() {
        assert_relative_eq!(eval_bezier(0.5, &[0.0, 2.0]), 1.0);
    }

    #[test]
    fn bezier_quadratic_midpoint() {
        // (q0 + 2 q1 + q2) / 4
        assert_relative_eq!(eval_bezier(0.5, &[0.0, 1.0, 0.0]), 0.5);
    }

    #[test]
    fn bezier_matches_bernstein_sum() {
        let q = [1.0, -2.0, 0.5, 3.0, -1.0, 2.0];
        let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let direct: f64 = q
                .iter()
                .zip(binom.iter())
                .enumerate()
                .map(|(i, (qi, c))| c * (1.0 - t).powi(5 - i as i32) * t.powi(i as i32) * qi)
                .sum();
            assert_relative_eq!(eval_bezier(t, &q), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn validation_rejects_bad_knots() {
        let bad = PathSpec::Pwl {
            knots: vec![(0.0, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 0.0)],
        };
        assert!(bad.validate().is_err());
        let uncovering = PathSpec::Pwl {
            knots: vec![(0.1, 0.0), (1.0, 1.0)],
        };
        assert!(uncovering.validate().is_err());
        let short = PathSpec::<f64>::Bezier { control: vec![1.0] };
        assert!(short.validate().is_err());
    }

    #[test]
    fn fit_recovers_exact_bezier_control_values() {
        let control = [0.0, 0.4, -0.2, 0.9, 0.1, 0.6];
        let samples: Vec<(f64, f64)> = (0..=40)
            .map(|k| {
                let t = k as f64 / 40.0;
                (t, eval_bezier(t, &control))
            })
            .collect();
        let interior = bezier_fit_interior(0.0, 0.6, 4, &samples).unwrap();
        for (got, want) in interior.iter().zip(&control[1..5]) {
            assert_relative_eq!(got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn fit_with_no_free_values_is_empty() {
        assert!(bezier_fit_interior(0.0, 1.0, 0, &[(0.5, 0.5)])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rotation_schedule_endpoint_constraint() {
        let ok = RotationSchedule::sine_bumps(0.4 * std::f64::consts::PI, -0.3, 0.2);
        ok.validate().unwrap();
        let bad = RotationSchedule {
            alpha: PathSpec::ramp(0.0, 0.5),
            beta: PathSpec::constant(0.0),
            gamma: PathSpec::constant(0.0),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn identity_schedule_rotation_is_identity_matrix() {
        let r = RotationSchedule::<f64>::identity().rotation(0.37);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(r[i][j], want, epsilon = 1e-15);
            }
        }
        assert!(RotationSchedule::<f64>::identity().is_identity());
    }
}
