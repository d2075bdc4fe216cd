//! Adaptive Dormand–Prince 5(4) integration for small fixed-size systems.
//!
//! Steps never straddle a breakpoint: the span is cut at every breakpoint and
//! each piece is integrated on its own, so discontinuous right-hand sides
//! (sudden frequency jumps) are handled exactly. The right-hand side receives
//! an *anchor* time, the midpoint of the step being taken, which it must use
//! to decide which piece of a piecewise definition applies. Stage times at
//! the very end of a piece therefore still see the left-hand definition.

use crate::error::{Error, Result};
use crate::real::Real;

/// Right-hand side `y' = f(t, y)` of a first-order system with `N` components.
pub trait OdeSystem<T: Real, const N: usize> {
    fn rhs(&self, t: T, y: &[T; N], anchor: T) -> [T; N];
}

impl<T: Real, const N: usize, F> OdeSystem<T, N> for F
where
    F: Fn(T, &[T; N], T) -> [T; N],
{
    fn rhs(&self, t: T, y: &[T; N], anchor: T) -> [T; N] {
        self(t, y, anchor)
    }
}

/// Error-control settings shared by every integration in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy<T> {
    pub rtol: T,
    pub atol: T,
    pub max_step: T,
    pub min_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for StepPolicy<T> {
    fn default() -> Self {
        StepPolicy {
            rtol: T::tol(1e-12, 64.0),
            atol: T::tol(1e-12, 64.0),
            max_step: T::lit(0.25),
            min_step: T::tol(1e-13, 16.0),
            max_steps: 5_000_000,
        }
    }
}

impl<T: Real> StepPolicy<T> {
    /// Policy with both tolerances set to `tol`.
    pub fn with_tolerance(tol: T) -> Self {
        StepPolicy { rtol: tol, atol: tol, ..Default::default() }
    }
}

/// Accepted steps of an integration. Consecutive grid points never straddle
/// a breakpoint, which is what makes [`Trajectory::dense`] safe.
#[derive(Debug, Clone)]
pub struct Trajectory<T, const N: usize> {
    pub t: Vec<T>,
    pub y: Vec<[T; N]>,
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    e: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        Tableau { c: C.map(T::lit), a: A.map(|row| row.map(T::lit)), e: E.map(T::lit) }
    }
}

/// One Dormand–Prince step of size `h` from `(t, y)`.
///
/// Returns the fifth-order solution and the embedded error estimate.
fn dp_step<T: Real, const N: usize, S: OdeSystem<T, N>>(
    sys: &S,
    tab: &Tableau<T>,
    t: T,
    y: &[T; N],
    h: T,
    anchor: T,
) -> ([T; N], [T; N]) {
    let mut k = [[T::zero(); N]; 7];
    k[0] = sys.rhs(t, y, anchor);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = tab.a[s][j];
            if a != T::zero() {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = sys.rhs(t + tab.c[s] * h, &ys, anchor);
    }
    // Row 6 of A holds the fifth-order weights (FSAL), so stage 7 was
    // evaluated at the new solution.
    let mut y_new = *y;
    let mut err = [T::zero(); N];
    for s in 0..7 {
        let b = if s < 6 { tab.a[6][s] } else { T::zero() };
        for i in 0..N {
            y_new[i] += h * b * k[s][i];
            err[i] += h * tab.e[s] * k[s][i];
        }
    }
    (y_new, err)
}

fn error_norm<T: Real, const N: usize>(y: &[T; N], y_new: &[T; N], err: &[T; N], policy: &StepPolicy<T>) -> T {
    let mut norm = T::zero();
    for i in 0..N {
        let scale = policy.atol + policy.rtol * y[i].abs().max(y_new[i].abs());
        norm = norm.max(err[i].abs() / scale);
    }
    norm
}

/// Integrates `sys` forward over `span`, cutting at `breakpoints`.
///
/// * `on_accept` runs after every accepted step and may abort the
///   integration by returning an error.
/// * `admissible` lets the caller reject a trial state; the step is then
///   retried with a smaller size, and if the step size underflows the
///   integration fails with [`Error::StepUnderflow`].
pub fn integrate<T, const N: usize, S, A, P>(
    sys: &S,
    span: (T, T),
    y0: [T; N],
    breakpoints: &[T],
    policy: &StepPolicy<T>,
    mut on_accept: A,
    admissible: P,
) -> Result<Trajectory<T, N>>
where
    T: Real,
    S: OdeSystem<T, N>,
    A: FnMut(T, &[T; N]) -> Result<()>,
    P: Fn(&[T; N]) -> bool,
{
    let (t_start, t_end) = span;
    if !(t_end > t_start) {
        return Err(Error::InvalidArgument(format!(
            "integration span must be increasing, got [{}, {}]",
            t_start.as_f64(),
            t_end.as_f64()
        )));
    }
    let tab = Tableau::new();
    let mut stops: Vec<T> = breakpoints.iter().copied().filter(|&b| b > t_start && b < t_end).collect();
    stops.sort_by(|a, b| a.partial_cmp(b).expect("NaN breakpoint"));
    stops.dedup();
    stops.push(t_end);

    let safety = T::lit(0.9);
    let grow = T::lit(5.0);
    let shrink = T::lit(0.2);
    let fifth = T::lit(0.2);

    let mut traj = Trajectory { t: vec![t_start], y: vec![y0] };
    let mut t = t_start;
    let mut y = y0;
    let mut h = policy.max_step.min((t_end - t_start) / T::lit(16.0)).min(T::lit(0.01));
    let mut steps = 0usize;

    for &stop in &stops {
        while t < stop {
            steps += 1;
            if steps > policy.max_steps {
                return Err(Error::StepLimit(t.as_f64()));
            }
            let remaining = stop - t;
            let mut h_try = h.min(policy.max_step);
            let last = h_try >= remaining;
            if last {
                h_try = remaining;
            }
            let anchor = t + h_try / T::lit(2.0);
            let (y_new, err) = dp_step(sys, &tab, t, &y, h_try, anchor);
            if y_new.iter().any(|v| !v.is_finite()) {
                if h_try <= policy.min_step {
                    return Err(Error::NonFinite(t.as_f64()));
                }
                h = h_try * shrink;
                continue;
            }
            let norm = error_norm(&y, &y_new, &err, policy);
            if norm > T::one() || !admissible(&y_new) {
                if h_try <= policy.min_step {
                    return Err(Error::StepUnderflow(t.as_f64()));
                }
                let factor = if norm > T::one() { (safety * norm.powf(-fifth)).max(shrink) } else { shrink };
                h = (h_try * factor).max(policy.min_step);
                continue;
            }
            t = if last { stop } else { t + h_try };
            y = y_new;
            traj.t.push(t);
            traj.y.push(y);
            on_accept(t, &y)?;
            let factor = if norm == T::zero() { grow } else { (safety * norm.powf(-fifth)).min(grow).max(shrink) };
            // A step clipped to a breakpoint says nothing about the natural
            // step size, so keep the previous proposal in that case.
            if !last {
                h = (h_try * factor).max(policy.min_step);
            } else {
                h = h.max(h_try * factor).max(policy.min_step);
            }
        }
    }
    Ok(traj)
}

impl<T: Real, const N: usize> Trajectory<T, N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn first_time(&self) -> T {
        self.t[0]
    }

    pub fn last_time(&self) -> T {
        *self.t.last().expect("empty trajectory")
    }

    /// Index `i` such that `t[i] <= t < t[i+1]` (clamped to the grid).
    pub fn interval(&self, t: T) -> usize {
        let n = self.t.len();
        if n < 2 || t <= self.t[0] {
            return 0;
        }
        match self.t.binary_search_by(|probe| probe.partial_cmp(&t).expect("NaN time")) {
            Ok(i) => i.min(n - 2),
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// State at an arbitrary time inside the grid.
    ///
    /// Takes a single Dormand–Prince step from the grid point to the left of
    /// `t`; the result carries the full fifth-order accuracy of an accepted
    /// step rather than that of a polynomial interpolant.
    pub fn dense<S: OdeSystem<T, N>>(&self, sys: &S, t: T) -> [T; N] {
        let i = self.interval(t);
        let t0 = self.t[i];
        if t == t0 {
            return self.y[i];
        }
        if self.t.len() > 1 && t == self.t[i + 1] {
            return self.y[i + 1];
        }
        let anchor = if self.t.len() > 1 { (self.t[i] + self.t[i + 1]) / T::lit(2.0) } else { t0 };
        let tab = Tableau::new();
        dp_step(sys, &tab, t0, &self.y[i], t - t0, anchor).0
    }
}
