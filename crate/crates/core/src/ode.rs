//! Adaptive explicit Runge-Kutta integration with dense output and events.
//!
//! The method is the Dormand-Prince 5(4) embedded pair with the classic
//! order-4 continuous extension and PI step-size control. Every ODE in this
//! crate goes through [`integrate`]; trajectories keep their dense
//! interpolants so callers can evaluate states (and their derivatives)
//! anywhere in the covered span.

use crate::num::Real;
use thiserror::Error;

/// Right-hand side evaluated in place: `dy` is filled with f(t, y).
pub trait Rhs<R: Real> {
    fn eval(&self, t: R, y: &[R], dy: &mut [R]);
}

impl<R: Real, F: Fn(R, &[R], &mut [R])> Rhs<R> for F {
    #[inline]
    fn eval(&self, t: R, y: &[R], dy: &mut [R]) {
        self(t, y, dy)
    }
}

/// An initial value problem on `[start, end]` (either direction).
pub struct Problem<'a, R: Real> {
    pub rhs: &'a dyn Rhs<R>,
    pub start: R,
    pub end: R,
    pub initial_state: Vec<R>,
}

impl<'a, R: Real> Problem<'a, R> {
    pub fn new(rhs: &'a dyn Rhs<R>, start: R, end: R, initial_state: Vec<R>) -> Self {
        Problem { rhs, start, end, initial_state }
    }

    pub fn dimension(&self) -> usize {
        self.initial_state.len()
    }
}

/// Crossing direction for event functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Any,
    /// Trigger when the functional crosses zero from below.
    Up,
    /// Trigger when the functional crosses zero from above.
    Down,
}

/// Scalar functional whose zero crossing terminates the integration.
pub struct EventSpec<'a, R: Real> {
    pub functional: Box<dyn Fn(R, &[R]) -> R + 'a>,
    pub direction: Direction,
}

impl<'a, R: Real> EventSpec<'a, R> {
    pub fn sign_change(f: impl Fn(R, &[R]) -> R + 'a, direction: Direction) -> Self {
        EventSpec { functional: Box::new(f), direction }
    }

    /// Triggers when the sup-norm of the state crosses `threshold` upward.
    pub fn norm_threshold(threshold: R) -> Self {
        EventSpec {
            functional: Box::new(move |_t, y: &[R]| {
                let mut m = R::zero();
                for &v in y {
                    m = m.max(v.abs());
                }
                m - threshold
            }),
            direction: Direction::Up,
        }
    }
}

/// How an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination<R: Real> {
    ReachedEnd,
    Event { location: R, index: usize },
    /// Norm threshold exceeded or step size underflow; `location` is the
    /// last accepted node.
    Blowup { location: R },
}

#[derive(Debug, Error)]
pub enum OdeError<R: Real> {
    #[error("right-hand side returned a non-finite value at t = {t}")]
    NonFiniteRhs { t: R, last_state: Vec<R> },
    #[error("invalid integration input: {0}")]
    InvalidInput(&'static str),
    #[error("step budget exhausted at t = {t}")]
    StepBudgetExhausted { t: R },
}

/// Integrator tolerances and guards.
#[derive(Debug, Clone)]
pub struct Options<R: Real> {
    pub rel_tol: R,
    pub abs_tol: R,
    pub max_steps: usize,
    /// State sup-norm above which the solution is declared blown up.
    pub blowup_norm: R,
    pub initial_step: Option<R>,
    pub max_step: Option<R>,
}

impl<R: Real> Default for Options<R> {
    fn default() -> Self {
        Options {
            rel_tol: R::of(1e-10),
            abs_tol: R::of(1e-12),
            max_steps: 10_000_000,
            blowup_norm: R::of(1e8),
            initial_step: None,
            max_step: None,
        }
    }
}

impl<R: Real> Options<R> {
    pub fn with_tols(rel_tol: R, abs_tol: R) -> Self {
        Options { rel_tol, abs_tol, ..Self::default() }
    }
}

/// One accepted step together with its interpolation coefficients.
#[derive(Debug, Clone)]
struct DenseSegment<R: Real> {
    t0: R,
    h: R,
    cont: [Vec<R>; 5],
}

impl<R: Real> DenseSegment<R> {
    fn eval_into(&self, t: R, out: &mut [R]) {
        let theta = (t - self.t0) / self.h;
        let th1 = R::one() - theta;
        for i in 0..out.len() {
            let c = [
                self.cont[0][i],
                self.cont[1][i],
                self.cont[2][i],
                self.cont[3][i],
                self.cont[4][i],
            ];
            out[i] = c[0] + theta * (c[1] + th1 * (c[2] + theta * (c[3] + th1 * c[4])));
        }
    }

    fn eval_deriv_into(&self, t: R, out: &mut [R]) {
        let theta = (t - self.t0) / self.h;
        let one = R::one();
        let two = R::of(2.0);
        let three = R::of(3.0);
        for i in 0..out.len() {
            let c2 = self.cont[1][i];
            let c3 = self.cont[2][i];
            let c4 = self.cont[3][i];
            let c5 = self.cont[4][i];
            // d/dtheta of c1 + th*c2 + th*(1-th)*c3 + th^2(1-th)*c4 + th^2(1-th)^2*c5
            let d = c2
                + (one - two * theta) * c3
                + theta * (two - three * theta) * c4
                + two * theta * (one - theta) * (one - two * theta) * c5;
            out[i] = d / self.h;
        }
    }
}

/// Result of [`integrate`]: accepted nodes, a dense evaluator over the
/// covered span, and the termination record.
#[derive(Debug, Clone)]
pub struct Trajectory<R: Real> {
    pub nodes: Vec<(R, Vec<R>)>,
    segments: Vec<DenseSegment<R>>,
    pub termination: Termination<R>,
}

impl<R: Real> Trajectory<R> {
    pub fn dimension(&self) -> usize {
        self.nodes[0].1.len()
    }

    /// First and last covered abscissa (in integration order).
    pub fn span(&self) -> (R, R) {
        (self.nodes[0].0, self.nodes.last().unwrap().0)
    }

    pub fn last_state(&self) -> (R, &[R]) {
        let (t, y) = self.nodes.last().unwrap();
        (*t, y)
    }

    fn locate(&self, t: R) -> &DenseSegment<R> {
        let fwd = self.segments[0].h > R::zero();
        let mut lo = 0usize;
        let mut hi = self.segments.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let inside = if fwd { t >= self.segments[mid].t0 } else { t <= self.segments[mid].t0 };
            if inside {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        &self.segments[lo]
    }

    /// Interpolated state at `t`, which must lie in the covered span.
    pub fn eval_into(&self, t: R, out: &mut [R]) {
        self.locate(t).eval_into(t, out);
    }

    pub fn eval(&self, t: R) -> Vec<R> {
        let mut out = vec![R::zero(); self.dimension()];
        self.eval_into(t, &mut out);
        out
    }

    /// Derivative of the interpolant at `t` (exact differentiation of the
    /// dense polynomial, no finite differencing).
    pub fn eval_deriv_into(&self, t: R, out: &mut [R]) {
        self.locate(t).eval_deriv_into(t, out);
    }

    pub fn eval_deriv(&self, t: R) -> Vec<R> {
        let mut out = vec![R::zero(); self.dimension()];
        self.eval_deriv_into(t, &mut out);
        out
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Error coefficients (5th minus 4th order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense-output coefficients (Hairer's contd5).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Stepper<'a, R: Real> {
    rhs: &'a dyn Rhs<R>,
    k: [Vec<R>; 7],
    ytmp: Vec<R>,
}

impl<'a, R: Real> Stepper<'a, R> {
    fn new(rhs: &'a dyn Rhs<R>, dim: usize) -> Self {
        Stepper {
            rhs,
            k: std::array::from_fn(|_| vec![R::zero(); dim]),
            ytmp: vec![R::zero(); dim],
        }
    }

    /// One trial step from (t, y) with k[0] already holding f(t, y).
    /// Writes y_new into `ynew`, returns the scaled error norm.
    fn trial(&mut self, t: R, y: &[R], h: R, ynew: &mut [R], opts: &Options<R>) -> R {
        let n = y.len();
        let [a21, a31, a32, a41, a42, a43] =
            [A21, A31, A32, A41, A42, A43].map(R::of);
        let [a51, a52, a53, a54] = [A51, A52, A53, A54].map(R::of);
        let [a61, a62, a63, a64, a65] = [A61, A62, A63, A64, A65].map(R::of);
        let [b1, b3, b4, b5, b6] = [B1, B3, B4, B5, B6].map(R::of);
        let [c2, c3, c4, c5] = [C2, C3, C4, C5].map(R::of);

        for i in 0..n {
            self.ytmp[i] = y[i] + h * a21 * self.k[0][i];
        }
        let (k0, rest) = self.k.split_at_mut(1);
        let _ = k0;
        self.rhs.eval(t + c2 * h, &self.ytmp, &mut rest[0]);
        for i in 0..n {
            self.ytmp[i] = y[i] + h * (a31 * self.k[0][i] + a32 * self.k[1][i]);
        }
        let (head, rest) = self.k.split_at_mut(2);
        self.rhs.eval(t + c3 * h, &self.ytmp, &mut rest[0]);
        let _ = head;
        for i in 0..n {
            self.ytmp[i] =
                y[i] + h * (a41 * self.k[0][i] + a42 * self.k[1][i] + a43 * self.k[2][i]);
        }
        let (head, rest) = self.k.split_at_mut(3);
        self.rhs.eval(t + c4 * h, &self.ytmp, &mut rest[0]);
        let _ = head;
        for i in 0..n {
            self.ytmp[i] = y[i]
                + h * (a51 * self.k[0][i]
                    + a52 * self.k[1][i]
                    + a53 * self.k[2][i]
                    + a54 * self.k[3][i]);
        }
        let (head, rest) = self.k.split_at_mut(4);
        self.rhs.eval(t + c5 * h, &self.ytmp, &mut rest[0]);
        let _ = head;
        for i in 0..n {
            self.ytmp[i] = y[i]
                + h * (a61 * self.k[0][i]
                    + a62 * self.k[1][i]
                    + a63 * self.k[2][i]
                    + a64 * self.k[3][i]
                    + a65 * self.k[4][i]);
        }
        let (head, rest) = self.k.split_at_mut(5);
        self.rhs.eval(t + h, &self.ytmp, &mut rest[0]);
        let _ = head;
        for i in 0..n {
            ynew[i] = y[i]
                + h * (b1 * self.k[0][i]
                    + b3 * self.k[2][i]
                    + b4 * self.k[3][i]
                    + b5 * self.k[4][i]
                    + b6 * self.k[5][i]);
        }
        let (head, rest) = self.k.split_at_mut(6);
        self.rhs.eval(t + h, ynew, &mut rest[0]);
        let _ = head;

        let [e1, e3, e4, e5, e6, e7] = [E1, E3, E4, E5, E6, E7].map(R::of);
        let mut err = R::zero();
        for i in 0..n {
            let e = h
                * (e1 * self.k[0][i]
                    + e3 * self.k[2][i]
                    + e4 * self.k[3][i]
                    + e5 * self.k[4][i]
                    + e6 * self.k[5][i]
                    + e7 * self.k[6][i]);
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
            err = err + (e / sc) * (e / sc);
        }
        (err / R::from_usize(n).unwrap()).sqrt()
    }

    fn dense_coeffs(&self, y: &[R], ynew: &[R], h: R) -> [Vec<R>; 5] {
        let n = y.len();
        let [d1, d3, d4, d5, d6, d7] = [D1, D3, D4, D5, D6, D7].map(R::of);
        let mut cont: [Vec<R>; 5] = std::array::from_fn(|_| vec![R::zero(); n]);
        for i in 0..n {
            let ydiff = ynew[i] - y[i];
            let bspl = h * self.k[0][i] - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * self.k[6][i] - bspl;
            cont[4][i] = h
                * (d1 * self.k[0][i]
                    + d3 * self.k[2][i]
                    + d4 * self.k[3][i]
                    + d5 * self.k[4][i]
                    + d6 * self.k[5][i]
                    + d7 * self.k[6][i]);
        }
        cont
    }
}

fn sup_norm<R: Real>(y: &[R]) -> R {
    let mut m = R::zero();
    for &v in y {
        m = m.max(v.abs());
    }
    m
}

fn all_finite<R: Real>(y: &[R]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Automatic initial step size (Hairer's HINIT, order 5).
fn initial_step<R: Real>(
    rhs: &dyn Rhs<R>,
    t0: R,
    y0: &[R],
    f0: &[R],
    posneg: R,
    opts: &Options<R>,
) -> R {
    let n = y0.len();
    let mut d0 = R::zero();
    let mut d1 = R::zero();
    for i in 0..n {
        let sc = opts.abs_tol + opts.rel_tol * y0[i].abs();
        d0 = d0 + (y0[i] / sc) * (y0[i] / sc);
        d1 = d1 + (f0[i] / sc) * (f0[i] / sc);
    }
    let nn = R::from_usize(n).unwrap();
    d0 = (d0 / nn).sqrt();
    d1 = (d1 / nn).sqrt();
    let mut h = if d0 < R::of(1e-5) || d1 < R::of(1e-5) {
        R::of(1e-6)
    } else {
        R::of(0.01) * (d0 / d1)
    };
    h = h * posneg;
    // One explicit Euler probe to estimate the second derivative scale.
    let mut y1 = vec![R::zero(); n];
    for i in 0..n {
        y1[i] = y0[i] + h * f0[i];
    }
    let mut f1 = vec![R::zero(); n];
    rhs.eval(t0 + h, &y1, &mut f1);
    let mut d2 = R::zero();
    for i in 0..n {
        let sc = opts.abs_tol + opts.rel_tol * y0[i].abs();
        let d = (f1[i] - f0[i]) / sc;
        d2 = d2 + d * d;
    }
    d2 = (d2 / nn).sqrt() / h.abs();
    let dmax = d1.max(d2);
    let h1 = if dmax <= R::of(1e-15) {
        (h.abs() * R::of(1e-3)).max(R::of(1e-6))
    } else {
        (R::of(0.01) / dmax).powf(R::of(0.2))
    };
    (h.abs() * R::of(100.0)).min(h1) * posneg
}

/// Integrate `problem` to its end, the first triggered event, or blowup.
///
/// Local error per step is controlled by the embedded 4th-order estimate
/// against `rel_tol`/`abs_tol`; events are located on the dense output by
/// bisection to 1e-12 of the independent variable.
pub fn integrate<R: Real>(
    problem: &Problem<'_, R>,
    opts: &Options<R>,
    events: &[EventSpec<'_, R>],
) -> Result<Trajectory<R>, OdeError<R>> {
    if problem.start == problem.end {
        return Err(OdeError::InvalidInput("zero-length integration domain"));
    }
    if !(opts.rel_tol > R::zero() && opts.abs_tol > R::zero()) {
        return Err(OdeError::InvalidInput("tolerances must be positive"));
    }
    let n = problem.initial_state.len();
    if n == 0 {
        return Err(OdeError::InvalidInput("empty state"));
    }

    let posneg = if problem.end > problem.start { R::one() } else { -R::one() };
    let mut t = problem.start;
    let mut y = problem.initial_state.clone();
    let mut stepper = Stepper::new(problem.rhs, n);
    problem.rhs.eval(t, &y, &mut stepper.k[0]);
    if !all_finite(&stepper.k[0]) {
        return Err(OdeError::NonFiniteRhs { t, last_state: y });
    }

    let mut h = match opts.initial_step {
        Some(h0) => h0.abs() * posneg,
        None => initial_step(problem.rhs, t, &y, &stepper.k[0], posneg, opts),
    };
    if let Some(hmax) = opts.max_step {
        if h.abs() > hmax {
            h = hmax * posneg;
        }
    }

    let mut nodes = vec![(t, y.clone())];
    let mut segments: Vec<DenseSegment<R>> = Vec::new();
    let mut ev_prev: Vec<R> =
        events.iter().map(|e| (e.functional)(t, &y)).collect();

    let safe = R::of(0.9);
    let beta = R::of(0.04);
    let expo1 = R::of(0.2) - beta * R::of(0.75);
    let facc1 = R::of(5.0); // max shrink factor
    let facc2 = R::of(0.1); // max growth factor (reciprocal)
    let mut facold = R::of(1e-4);
    let mut ynew = vec![R::zero(); n];

    for _step in 0..opts.max_steps {
        if (t - problem.end) * posneg >= R::zero() {
            return Ok(Trajectory { nodes, segments, termination: Termination::ReachedEnd });
        }
        // Step size underflow: the orbit cannot be continued.
        let scale = t.abs().max(R::one());
        if h.abs() < R::of(1e-14) * scale {
            return Ok(Trajectory {
                nodes,
                segments,
                termination: Termination::Blowup { location: t },
            });
        }
        let mut last = false;
        if (t + h - problem.end) * posneg > R::zero() {
            h = problem.end - t;
            last = true;
        }

        let err = stepper.trial(t, &y, h, &mut ynew, opts);

        if !err.is_finite() || err > R::one() {
            // Reject: shrink, with a plain halving fallback for NaN.
            let fac = if err.is_finite() {
                (err.powf(expo1) / safe).min(facc1)
            } else {
                R::of(2.0)
            };
            h = h / fac;
            continue;
        }

        // Accepted.
        let cont = stepper.dense_coeffs(&y, &ynew, h);
        segments.push(DenseSegment { t0: t, h, cont });
        let tnew = if last { problem.end } else { t + h };

        if !all_finite(&ynew) {
            return Err(OdeError::NonFiniteRhs { t, last_state: y });
        }

        // Event check on this step.
        let mut hit: Option<(R, usize)> = None;
        for (idx, ev) in events.iter().enumerate() {
            let g0 = ev_prev[idx];
            let g1 = (ev.functional)(tnew, &ynew);
            let crossed = match ev.direction {
                Direction::Up => g0 < R::zero() && g1 >= R::zero(),
                Direction::Down => g0 > R::zero() && g1 <= R::zero(),
                Direction::Any => g0 * g1 <= R::zero() && (g0 != R::zero() || g1 != R::zero()),
            };
            if crossed {
                let seg = segments.last().unwrap();
                let loc = locate_event(seg, &ev.functional, t, tnew, g0);
                match hit {
                    Some((best, _)) if (loc - best) * posneg >= R::zero() => {}
                    _ => hit = Some((loc, idx)),
                }
            }
            ev_prev[idx] = g1;
        }
        if let Some((loc, idx)) = hit {
            let seg = segments.last().unwrap();
            let mut yev = vec![R::zero(); n];
            seg.eval_into(loc, &mut yev);
            nodes.push((loc, yev));
            return Ok(Trajectory {
                nodes,
                segments,
                termination: Termination::Event { location: loc, index: idx },
            });
        }

        t = tnew;
        std::mem::swap(&mut y, &mut ynew);
        stepper.k.swap(0, 6); // FSAL
        nodes.push((t, y.clone()));

        if sup_norm(&y) > opts.blowup_norm {
            return Ok(Trajectory {
                nodes,
                segments,
                termination: Termination::Blowup { location: t },
            });
        }

        // PI step-size controller.
        let errc = err.max(R::of(1e-30));
        let fac11 = errc.powf(expo1);
        let fac = (fac11 / facold.powf(beta) / safe).max(facc2).min(facc1);
        h = h / fac;
        if let Some(hmax) = opts.max_step {
            if h.abs() > hmax {
                h = hmax * posneg;
            }
        }
        facold = errc.max(R::of(1e-4));
    }
    Err(OdeError::StepBudgetExhausted { t })
}

/// Bisect the dense output for the crossing location, to 1e-12 of the
/// independent variable.
fn locate_event<R: Real>(
    seg: &DenseSegment<R>,
    functional: &(dyn Fn(R, &[R]) -> R + '_),
    t0: R,
    t1: R,
    g0: R,
) -> R {
    let mut lo = t0;
    let mut hi = t1;
    let mut glo = g0;
    let mut state = vec![R::zero(); seg.cont[0].len()];
    let tol = R::of(1e-12) * t1.abs().max(R::one());
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = (lo + hi) / R::of(2.0);
        seg.eval_into(mid, &mut state);
        let gm = (functional)(mid, &state);
        if (glo <= R::zero()) == (gm <= R::zero()) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / R::of(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_rhs(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[0];
    }

    #[test]
    fn exponential_reaches_e() {
        let p = Problem::new(&exp_rhs, 0.0, 1.0, vec![1.0]);
        let traj = integrate(&p, &Options::default(), &[]).unwrap();
        assert_eq!(traj.termination, Termination::ReachedEnd);
        let (t, y) = traj.last_state();
        assert_eq!(t, 1.0);
        assert_relative_eq!(y[0], std::f64::consts::E, epsilon = 1e-10);
    }

    #[test]
    fn dense_output_matches_exponential() {
        let p = Problem::new(&exp_rhs, 0.0, 1.0, vec![1.0]);
        let traj = integrate(&p, &Options::default(), &[]).unwrap();
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            let y = traj.eval(t);
            assert_relative_eq!(y[0], t.exp(), epsilon = 1e-9);
            let dy = traj.eval_deriv(t);
            assert_relative_eq!(dy[0], t.exp(), epsilon = 1e-7);
        }
    }

    #[test]
    fn harmonic_event_at_pi() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let p = Problem::new(&rhs, 0.0, 10.0, vec![0.0, 1.0]);
        let ev = EventSpec::sign_change(|_t, y: &[f64]| y[0], Direction::Down);
        let traj = integrate(&p, &Options::default(), &[ev]).unwrap();
        match traj.termination {
            Termination::Event { location, index } => {
                assert_eq!(index, 0);
                assert_relative_eq!(location, std::f64::consts::PI, epsilon = 1e-9);
            }
            other => panic!("expected event, got {other:?}"),
        }
    }

    #[test]
    fn riccati_blowup_near_one() {
        // v' = v^2, v(0) = 1 has the pole 1/(1-x).
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0] * y[0];
        };
        let p = Problem::new(&rhs, 0.0, 2.0, vec![1.0]);
        let traj = integrate(&p, &Options::default(), &[]).unwrap();
        match traj.termination {
            Termination::Blowup { location } => {
                assert!((location - 1.0).abs() < 1e-6, "location {location}");
            }
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn norm_threshold_event() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0];
        };
        let p = Problem::new(&rhs, 0.0, 10.0, vec![1.0]);
        let ev = EventSpec::norm_threshold(std::f64::consts::E);
        let traj = integrate(&p, &Options::default(), &[ev]).unwrap();
        match traj.termination {
            Termination::Event { location, .. } => {
                assert_relative_eq!(location, 1.0, epsilon = 1e-9);
            }
            other => panic!("expected event, got {other:?}"),
        }
    }

    #[test]
    fn zero_length_domain_rejected() {
        let p = Problem::new(&exp_rhs, 1.0, 1.0, vec![1.0]);
        assert!(matches!(
            integrate(&p, &Options::default(), &[]),
            Err(OdeError::InvalidInput(_))
        ));
    }

    #[test]
    fn non_finite_rhs_reports_last_state() {
        let rhs = |t: f64, _y: &[f64], dy: &mut [f64]| {
            dy[0] = if t > 0.5 { f64::NAN } else { 1.0 };
        };
        let p = Problem::new(&rhs, 0.0, 1.0, vec![0.0]);
        // The NaN region makes every trial step fail until h underflows,
        // which is reported as blowup at the last good node.
        let traj = integrate(&p, &Options::default(), &[]).unwrap();
        match traj.termination {
            Termination::Blowup { location } => assert!(location <= 0.5 + 1e-9),
            other => panic!("unexpected termination {other:?}"),
        }
    }

    #[test]
    fn tolerance_halving_converges() {
        // Halving tolerances moves the terminal state by less than 10x the
        // original tolerance.
        let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0] * (1.0 + 0.3 * t.sin());
        };
        for &(rel, abs) in &[(1e-8, 1e-10), (1e-10, 1e-12)] {
            let p = Problem::new(&rhs, 0.0, 20.0, vec![1.0, 0.0]);
            let a = integrate(&p, &Options::with_tols(rel, abs), &[]).unwrap();
            let b = integrate(&p, &Options::with_tols(rel / 2.0, abs / 2.0), &[]).unwrap();
            let (_, ya) = a.last_state();
            let (_, yb) = b.last_state();
            let scale = 1.0_f64.max(ya[0].abs());
            assert!((ya[0] - yb[0]).abs() < 10.0 * (rel * scale + abs));
        }
    }

    #[test]
    fn event_location_invariant_under_restart() {
        let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let p = Problem::new(&rhs, 0.0, 10.0, vec![0.0, 1.0]);
        let ev = || EventSpec::sign_change(|_t, y: &[f64]| y[0], Direction::Down);
        let traj = integrate(&p, &Options::default(), &[ev()]).unwrap();
        let loc0 = match traj.termination {
            Termination::Event { location, .. } => location,
            _ => unreachable!(),
        };
        // Restart from a dense node before the event; the located event must
        // agree within tolerance.
        for &t0 in &[0.7, 1.9, 2.9] {
            let y0 = traj.eval(t0);
            let p2 = Problem::new(&rhs, t0, 10.0, y0);
            let t2 = integrate(&p2, &Options::default(), &[ev()]).unwrap();
            match t2.termination {
                Termination::Event { location, .. } => {
                    assert_relative_eq!(location, loc0, epsilon = 1e-9);
                }
                other => panic!("expected event, got {other:?}"),
            }
        }
    }

    #[test]
    fn backward_integration() {
        let p = Problem::new(&exp_rhs, 1.0, 0.0, vec![std::f64::consts::E]);
        let traj = integrate(&p, &Options::default(), &[]).unwrap();
        let (_, y) = traj.last_state();
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn generic_scalar_smoke_f32() {
        let rhs = |_t: f32, y: &[f32], dy: &mut [f32]| {
            dy[0] = y[0];
        };
        let p = Problem::new(&rhs, 0.0f32, 1.0f32, vec![1.0f32]);
        let opts = Options::with_tols(1e-5f32, 1e-6f32);
        let traj = integrate(&p, &opts, &[]).unwrap();
        let (_, y) = traj.last_state();
        assert!((y[0] - std::f32::consts::E).abs() < 1e-4);
    }
}
