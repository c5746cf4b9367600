//! Dormand–Prince 5(4) embedded Runge–Kutta pair with adaptive step control.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// 5th-order weights minus the embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    pub max_step: T,
    pub min_step: T,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates `y′ = f(t, y)` from `t0` to `t1 > t0`.
///
/// `on_step(t, y)` runs after every accepted step and may rewrite the state
/// in place (the integrator re-evaluates `f` when it returns `true`).
pub fn integrate<T, const D: usize, F, S>(
    mut f: F,
    t0: T,
    y0: [T; D],
    t1: T,
    ctl: &StepControl<T>,
    mut on_step: S,
) -> Result<IntegrationStats>
where
    T: Scalar,
    F: FnMut(T, &[T; D]) -> [T; D],
    S: FnMut(T, &mut [T; D]) -> bool,
{
    if !(t1 > t0) {
        return Err(Error::Solver(format!(
            "empty integration interval [{}, {}]",
            t0.as_f64(),
            t1.as_f64()
        )));
    }
    let c: [T; 7] = C.map(T::lit);
    let a: [[T; 6]; 7] = A.map(|row| row.map(T::lit));
    let e: [T; 7] = E.map(T::lit);
    let safety = T::lit(0.9);
    let fac_min = T::lit(0.2);
    let fac_max = T::lit(5.0);
    let order_inv = T::lit(0.2);

    let mut stats = IntegrationStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k = [[T::zero(); D]; 7];
    k[0] = f(t, &y);
    stats.evaluations += 1;
    let mut h = ctl.max_step.min((t1 - t0) * T::lit(0.01));

    while t < t1 {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(Error::Solver(format!(
                "step budget of {} exhausted at t = {}",
                ctl.max_steps,
                t.as_f64()
            )));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let mut ys = y;
            for (d, slot) in ys.iter_mut().enumerate() {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + a[s][j] * kj[d];
                }
                *slot = *slot + h * acc;
            }
            k[s] = f(t + c[s] * h, &ys);
        }
        stats.evaluations += 6;

        // stage 7 is evaluated at the 5th-order solution itself
        let mut y_new = y;
        for (d, slot) in y_new.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate().take(6) {
                acc = acc + a[6][j] * kj[d];
            }
            *slot = *slot + h * acc;
        }
        let mut err_sq = T::zero();
        for d in 0..D {
            let mut est = T::zero();
            for (j, kj) in k.iter().enumerate() {
                est = est + e[j] * kj[d];
            }
            let scale = ctl.atol + ctl.rtol * y[d].abs().max(y_new[d].abs());
            let ratio = h * est / scale;
            err_sq = err_sq + ratio * ratio;
        }
        let err = (err_sq / T::from_usize_lossy(D)).sqrt();
        if !err.is_finite() {
            return Err(Error::Solver(format!(
                "non-finite state near t = {}",
                t.as_f64()
            )));
        }

        let factor = if err == T::zero() {
            fac_max
        } else {
            (safety * err.powf(-order_inv)).max(fac_min).min(fac_max)
        };

        if err <= T::one() {
            t = if last { t1 } else { t + h };
            y = y_new;
            stats.accepted += 1;
            k[0] = k[6];
            if on_step(t, &mut y) {
                k[0] = f(t, &y);
                stats.evaluations += 1;
            }
            h = (h * factor).min(ctl.max_step);
        } else {
            stats.rejected += 1;
            h = h * factor.min(T::one());
        }
        if t < t1 && h < ctl.min_step {
            return Err(Error::Solver(format!(
                "step size underflow (h = {:e}) at t = {}",
                h.as_f64(),
                t.as_f64()
            )));
        }
    }
    Ok(stats)
}
