//! Interior orbits of the profile equation f'' + f^3/sinh^2(x) = 0.
//!
//! The first-order form tracks b = f - x f', d = f' and the unwrapped phase
//! phi of (b, d). A c-orbit starts from the origin series with d(0) = c and
//! exists globally; b and d have finite limits at infinity which this module
//! extracts together with the total phase and the static energy.


use crate::ode::{self, Options, Problem, Termination, Trajectory};
use crate::quad::{self, QuadError};
use crate::Scalar;
use thiserror::Error;

/// Interior state at one abscissa: f is recovered as b + x d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    pub x: Scalar,
    pub b: Scalar,
    pub d: Scalar,
    /// Unwrapped phase of (b, d), non-decreasing along forward orbits.
    pub phi: Scalar,
}

impl OrbitState {
    #[inline]
    pub fn f(&self) -> Scalar {
        self.b + self.x * self.d
    }

    /// Monotone quantity G = 2 d^2 + f^4 / sinh^2 x (non-increasing in x).
    pub fn lyapunov(&self) -> Scalar {
        let s = self.x.sinh();
        2.0 * self.d * self.d + self.f().powi(4) / (s * s)
    }
}

/// One profile sample row: (x, f, b, d, phi, G).
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    pub x: Scalar,
    pub f: Scalar,
    pub b: Scalar,
    pub d: Scalar,
    pub phi: Scalar,
    pub lyapunov: Scalar,
}

/// A fully evolved c-orbit with its limits and dense profile.
#[derive(Debug, Clone)]
pub struct COrbitSummary {
    pub c: Scalar,
    /// Limit of b(x) as x -> infinity.
    pub b_limit: Scalar,
    /// Limit of d(x); zero (to tolerance) exactly for regular solutions.
    pub d_limit: Scalar,
    /// Total phase Phi(c) = phi(c, infinity).
    pub total_phase: Scalar,
    pub x_max: Scalar,
    /// Series-start abscissa; below it states come from the origin series.
    pub x_series: Scalar,
    traj: Trajectory<Scalar>,
}

#[derive(Debug, Error)]
pub enum InteriorError {
    #[error("series start x0 = {x0} too large (limit {limit} for c = {c})")]
    SeriesDomain { c: Scalar, x0: Scalar, limit: Scalar },
    #[error("shooting parameter must be positive, got {0}")]
    NonPositiveC(Scalar),
    #[error("energy is infinite: |d_limit| = {d_limit} exceeds the regularity tolerance")]
    InfiniteEnergy { d_limit: Scalar },
    #[error("interior integration failed unexpectedly: {0}")]
    Ode(#[from] ode::OdeError<Scalar>),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Origin series for f = c x + a3 x^3 + a5 x^5 + a7 x^7.
fn f_series_coeffs(c: Scalar) -> [Scalar; 4] {
    let c3 = c.powi(3);
    let c5 = c.powi(5);
    let c7 = c.powi(7);
    [
        c,
        -c3 / 6.0,
        c5 / 40.0 + c3 / 60.0,
        -19.0 * c7 / 5040.0 - 13.0 * c5 / 2520.0 - c3 / 630.0,
    ]
}

pub(crate) fn f_series(c: Scalar, x: Scalar) -> Scalar {
    let [a1, a3, a5, a7] = f_series_coeffs(c);
    let x2 = x * x;
    x * (a1 + x2 * (a3 + x2 * (a5 + x2 * a7)))
}

pub(crate) fn d_series(c: Scalar, x: Scalar) -> Scalar {
    let [a1, a3, a5, a7] = f_series_coeffs(c);
    let x2 = x * x;
    a1 + x2 * (3.0 * a3 + x2 * (5.0 * a5 + x2 * 7.0 * a7))
}

fn b_series(c: Scalar, x: Scalar) -> Scalar {
    let [_, a3, a5, a7] = f_series_coeffs(c);
    let x2 = x * x;
    -x * x2 * (2.0 * a3 + x2 * (4.0 * a5 + x2 * 6.0 * a7))
}

fn phi_series(c: Scalar, x: Scalar) -> Scalar {
    let c2 = c * c;
    c2 * x.powi(3) / 3.0 + c2 * (c2 - 1.0) * x.powi(5) / 15.0
}

fn series_limit(c: Scalar) -> Scalar {
    0.01 / c.abs().max(1.0)
}

/// Origin-series state of the c-orbit at x0.
///
/// Valid for x0 up to 0.01 / max(1, c); beyond that the truncation of the
/// O(x^7) series is not guaranteed below the integrator tolerances.
pub fn series_start(c: Scalar, x0: Scalar) -> Result<OrbitState, InteriorError> {
    if !(c > 0.0) {
        return Err(InteriorError::NonPositiveC(c));
    }
    let limit = series_limit(c);
    if !(x0 > 0.0 && x0 <= limit) {
        return Err(InteriorError::SeriesDomain { c, x0, limit });
    }
    Ok(OrbitState { x: x0, b: b_series(c, x0), d: d_series(c, x0), phi: phi_series(c, x0) })
}

fn rhs(x: Scalar, y: &[Scalar], dy: &mut [Scalar]) {
    let s = x.sinh();
    let f = y[0] + x * y[1];
    let src = f * f * f / (s * s);
    dy[0] = x * src;
    dy[1] = -src;
    dy[2] = src * f / (y[0] * y[0] + y[1] * y[1]);
}

/// Exponential integrals int_x^inf xi^k e^(-2 xi) d xi for k = 0..4.
fn exp_tails(x: Scalar) -> [Scalar; 5] {
    let e = (-2.0 * x).exp();
    [
        e / 2.0,
        e * (2.0 * x + 1.0) / 4.0,
        e * (2.0 * x * x + 2.0 * x + 1.0) / 4.0,
        e * (4.0 * x.powi(3) + 6.0 * x * x + 6.0 * x + 3.0) / 8.0,
        e * (2.0 * x.powi(4) + 4.0 * x.powi(3) + 6.0 * x * x + 6.0 * x + 3.0) / 4.0,
    ]
}

/// Tail corrections (delta_b, delta_d, delta_phi) for the interval
/// (x, infinity), with f frozen at b + d xi and csch^2 ~ 4 e^(-2 xi).
fn tail_corrections(x: Scalar, b: Scalar, d: Scalar) -> (Scalar, Scalar, Scalar) {
    let i = exp_tails(x);
    let infl = 1.0 + 2.2 * (-2.0 * x).exp();
    let b2 = b * b;
    let d2 = d * d;
    let cube = |k0: Scalar, k1: Scalar, k2: Scalar, k3: Scalar| {
        b * b2 * k0 + 3.0 * b2 * d * k1 + 3.0 * b * d2 * k2 + d * d2 * k3
    };
    let db = 4.0 * infl * cube(i[1], i[2], i[3], i[4]);
    let dd = -4.0 * infl * cube(i[0], i[1], i[2], i[3]);
    let quart = b2 * b2 * i[0]
        + 4.0 * b * b2 * d * i[1]
        + 6.0 * b2 * d2 * i[2]
        + 4.0 * b * d * d2 * i[3]
        + d2 * d2 * i[4];
    let dphi = 4.0 * infl * quart / (b2 + d2);
    (db, dd, dphi)
}

/// Evolve the c-orbit until the tail beyond x_max contributes less than
/// `tol` to b, d and phi; the remaining tail is added analytically.
pub fn evolve_c_orbit(c: Scalar, tol: Scalar) -> Result<COrbitSummary, InteriorError> {
    let x0 = series_limit(c) * 0.5;
    let start = series_start(c, x0)?;
    let rel = tol.min(1e-10).max(1e-13);
    let mut opts = Options::with_tols(rel, rel * 1e-2);
    opts.initial_step = Some(x0 * 0.5);

    for &x_end in &[15.0, 20.0, 25.0, 30.0, 40.0, 60.0, 80.0] {
        let p = Problem::new(&rhs, x0, x_end, vec![start.b, start.d, start.phi]);
        let traj = ode::integrate(&p, &opts, &[])?;
        debug_assert!(matches!(traj.termination, Termination::ReachedEnd));
        let (x, y) = traj.last_state();
        let (db, dd, dphi) = tail_corrections(x, y[0], y[1]);
        if db.abs().max(dd.abs()).max(dphi.abs()) < 0.5 * tol || x_end == 80.0 {
            return Ok(COrbitSummary {
                c,
                b_limit: y[0] + db,
                d_limit: y[1] + dd,
                total_phase: y[2] + dphi,
                x_max: x,
                x_series: x0,
                traj,
            });
        }
    }
    unreachable!("x_end schedule always returns");
}

impl COrbitSummary {
    /// State at any x in [0, x_max]: series below the start radius, dense
    /// output above.
    pub fn state_at(&self, x: Scalar) -> OrbitState {
        if x < self.x_series {
            OrbitState {
                x,
                b: b_series(self.c, x),
                d: d_series(self.c, x),
                phi: phi_series(self.c, x),
            }
        } else {
            let y = self.traj.eval(x.min(self.x_max));
            OrbitState { x, b: y[0], d: y[1], phi: y[2] }
        }
    }

    /// Profile value f(x) = b + x d, valid on [0, x_max]; beyond x_max the
    /// asymptotic tail b - b^3 e^(-2x) is used.
    pub fn f_at(&self, x: Scalar) -> Scalar {
        if x > self.x_max {
            let b = self.b_limit;
            b + self.d_limit * x - b.powi(3) * (-2.0 * x).exp()
        } else if x < self.x_series {
            f_series(self.c, x)
        } else {
            self.state_at(x).f()
        }
    }

    pub fn d_at(&self, x: Scalar) -> Scalar {
        if x > self.x_max {
            self.d_limit + 2.0 * self.b_limit.powi(3) * (-2.0 * x).exp()
        } else {
            self.state_at(x).d
        }
    }

    /// f(x)/sinh(x), finite down to x = 0 where it equals c.
    pub fn f_over_sinh(&self, x: Scalar) -> Scalar {
        if x == 0.0 {
            self.c
        } else {
            self.f_at(x) / x.sinh()
        }
    }

    /// Accepted integration nodes as profile rows (x, f, b, d, phi, G).
    pub fn profile(&self) -> Vec<ProfileSample> {
        self.traj
            .nodes
            .iter()
            .map(|(x, y)| {
                let st = OrbitState { x: *x, b: y[0], d: y[1], phi: y[2] };
                ProfileSample {
                    x: *x,
                    f: st.f(),
                    b: st.b,
                    d: st.d,
                    phi: st.phi,
                    lyapunov: st.lyapunov(),
                }
            })
            .collect()
    }

    /// Number of interior zeros of f on (0, x_max).
    pub fn zero_count(&self) -> usize {
        let mut count = 0;
        let mut prev = self.f_at(self.x_series);
        let nodes = &self.traj.nodes;
        for w in nodes.windows(2) {
            let (xa, _) = w[0];
            let (xb, _) = w[1];
            for j in 1..=4 {
                let x = xa + (xb - xa) * j as Scalar / 4.0;
                let f = self.f_at(x);
                if prev * f < 0.0 {
                    count += 1;
                }
                if f != 0.0 {
                    prev = f;
                }
            }
        }
        count
    }

    /// Largest increase of the Lyapunov function between consecutive nodes
    /// (should not exceed ~10x the integrator tolerance).
    pub fn lyapunov_violation(&self) -> Scalar {
        let prof = self.profile();
        prof.windows(2).map(|w| w[1].lyapunov - w[0].lyapunov).fold(0.0, Scalar::max)
    }

    /// Largest decrease of the phase between consecutive nodes.
    pub fn phase_violation(&self) -> Scalar {
        let prof = self.profile();
        prof.windows(2).map(|w| w[0].phi - w[1].phi).fold(0.0, Scalar::max)
    }

    /// Dense integration record underlying the profile.
    pub fn trajectory(&self) -> &Trajectory<Scalar> {
        &self.traj
    }
}

/// Regularity threshold on |d_limit| below which the energy integral
/// converges.
pub const REGULARITY_TOL: Scalar = 1e-6;

/// Static energy E = 1/2 int_0^inf (f'^2 - f^4 / (2 sinh^2 x)) dx of a
/// regular profile, by quadrature on the dense profile plus the analytic
/// head (origin series) and tail (b - b^3 e^(-2x)) pieces.
pub fn static_energy(orbit: &COrbitSummary) -> Result<Scalar, InteriorError> {
    if orbit.d_limit.abs() > REGULARITY_TOL * orbit.b_limit.abs().max(1.0) {
        return Err(InteriorError::InfiniteEnergy { d_limit: orbit.d_limit });
    }
    let c = orbit.c;
    let x0 = orbit.x_series;
    let xm = orbit.x_max;
    // Head: 1/2 int_0^x0 (c^2 - c^4 x^2 (1/1) ...) dx from the series.
    let head = 0.5 * c * c * x0 - 0.25 * c.powi(4) * x0.powi(3);
    let body = quad::quadrature(
        |x: Scalar| {
            let st = orbit.state_at(x);
            let fs = orbit.f_over_sinh(x);
            0.5 * (st.d * st.d - 0.5 * fs * fs * st.f() * st.f())
        },
        x0,
        xm,
        1e-10 * c.max(1.0),
    )?;
    let b = orbit.b_limit;
    let e2 = (-2.0 * xm).exp();
    let e4 = e2 * e2;
    let tail = 0.5 * (b.powi(6) * e4 - b.powi(4) * e2 - b.powi(4) * (1.0 - 2.0 * b * b) * e4);
    Ok(head + body + tail)
}

/// Scale parameter for the rescaled profile F(y) = f(y/c).
#[derive(Debug, Clone, Copy)]
pub enum Scale {
    Finite(Scalar),
    /// The c -> infinity limiting problem F'' + F^3/y^2 = 0.
    Limiting,
}

/// Rescaled profile on [0, y_max].
#[derive(Debug)]
pub struct RescaledProfile {
    pub scale: Scale,
    y_start: Scalar,
    traj: Trajectory<Scalar>,
    /// For the finite case the trajectory runs in x = y/c.
    c: Option<Scalar>,
}

fn limiting_rhs(y: Scalar, v: &[Scalar], dv: &mut [Scalar]) {
    dv[0] = v[1];
    dv[1] = -v[0].powi(3) / (y * y);
}

/// Integrate the rescaled profile; the limiting problem uses the series
/// F = y - y^3/6 + y^5/40 - 19 y^7/5040 near the origin.
pub fn rescaled_profile(scale: Scale, y_max: Scalar) -> Result<RescaledProfile, InteriorError> {
    match scale {
        Scale::Limiting => {
            let y0 = 1e-3;
            let y02 = y0 * y0;
            let f0 = y0 * (1.0 + y02 * (-1.0 / 6.0 + y02 * (1.0 / 40.0 - y02 * 19.0 / 5040.0)));
            let d0 = 1.0 + y02 * (-0.5 + y02 * (1.0 / 8.0 - y02 * 19.0 / 720.0));
            let p = Problem::new(&limiting_rhs, y0, y_max, vec![f0, d0]);
            let traj = ode::integrate(&p, &Options::default(), &[])?;
            Ok(RescaledProfile { scale, y_start: y0, traj, c: None })
        }
        Scale::Finite(c) => {
            if !(c > 0.0) {
                return Err(InteriorError::NonPositiveC(c));
            }
            let x0 = series_limit(c) * 0.5;
            let start = series_start(c, x0)?;
            let p = Problem::new(&rhs, x0, y_max / c, vec![start.b, start.d, start.phi]);
            let traj = ode::integrate(&p, &Options::default(), &[])?;
            Ok(RescaledProfile { scale, y_start: x0 * c, traj, c: Some(c) })
        }
    }
}

impl RescaledProfile {
    pub fn y_max(&self) -> Scalar {
        match self.c {
            Some(c) => self.traj.span().1 * c,
            None => self.traj.span().1,
        }
    }

    pub fn eval(&self, y: Scalar) -> Scalar {
        match self.c {
            Some(c) => {
                let x = (y / c).max(self.y_start / c);
                let st = self.traj.eval(x.min(self.traj.span().1));
                st[0] + x * st[1]
            }
            None => {
                let y = y.max(self.y_start);
                self.traj.eval(y.min(self.traj.span().1))[0]
            }
        }
    }

    pub fn sign_changes(&self) -> usize {
        let (ya, yb) = (self.y_start, self.y_max());
        let n = 4000;
        let mut count = 0;
        let mut prev = self.eval(ya);
        for i in 1..=n {
            let y = ya + (yb - ya) * i as Scalar / n as Scalar;
            let f = self.eval(y);
            if prev * f < 0.0 {
                count += 1;
            }
            if f != 0.0 {
                prev = f;
            }
        }
        count
    }

    pub fn samples(&self, n: usize) -> Vec<(Scalar, Scalar)> {
        let (ya, yb) = (self.y_start, self.y_max());
        (0..=n)
            .map(|i| {
                let y = ya + (yb - ya) * i as Scalar / n as Scalar;
                (y, self.eval(y))
            })
            .collect()
    }
}
