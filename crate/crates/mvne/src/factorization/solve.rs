//! Closed-form-per-coordinate minimizer used by the multiplicative update.
//!
//! After majorizing the divergence, both the membership rows and the mass
//! vector reduce to the same problem: for weights `w_p >= 0`, curvatures
//! `q_p > 0` and signals `b_p >= 0`, find ratios `t_p > 0` and a multiplier
//! `mu` such that
//!
//! ```text
//! q_p t_p^3 + mu t_p - b_p = 0   for every p
//! sum_p w_p t_p = target
//! ```
//!
//! The new coordinates are `w_p t_p`. For fixed `mu` each `t_p` is the
//! unique positive root of an increasing cubic; the sum is strictly
//! decreasing in `mu`, so `mu` is found by safeguarded Newton.

use crate::scalar::Scalar;

/// Positive root of `q t^3 + mu t - b = 0` (or `0` when `b == 0 && mu >= 0`).
pub(crate) fn cubic_ratio<T: Scalar>(q: T, mu: T, b: T) -> T {
    let zero = T::zero();
    if b <= zero {
        return if mu < zero { (-mu / q).sqrt() } else { zero };
    }
    // start at an upper bound so Newton descends monotonically onto the root
    let base = (b / q).cbrt();
    let mut t = if mu >= zero {
        if mu > zero {
            base.min(b / mu)
        } else {
            return base;
        }
    } else {
        base + (-mu / q).sqrt()
    };
    let tol = T::epsilon() * T::of(4.0);
    for _ in 0..200 {
        let f = (q * t * t + mu) * t - b;
        if f <= zero {
            break;
        }
        let slope = T::of(3.0) * q * t * t + mu;
        if !(slope > zero) {
            break;
        }
        let step = f / slope;
        let next = t - step;
        if !(next < t) || next <= zero {
            break;
        }
        t = next;
        if step <= t * tol {
            break;
        }
    }
    t
}

/// Solves the weighted system above, writing `w_p t_p` into `out`, rescaled
/// so that `out` sums to `target` exactly up to one rounding.
pub(crate) fn constrained_step<T: Scalar>(w: &[T], q: &[T], b: &[T], target: T, out: &mut [T]) {
    let d = w.len();
    debug_assert!(q.len() == d && b.len() == d && out.len() == d);
    let zero = T::zero();
    let tiny = T::min_positive_value();

    // Phi(mu) = sum w t(mu) - target and its derivative
    let eval = |mu: T, out: &mut [T]| -> (T, T) {
        let mut sum = zero;
        let mut slope = zero;
        for p in 0..d {
            if w[p] <= zero {
                out[p] = zero;
                continue;
            }
            let qp = q[p].max(tiny);
            let t = cubic_ratio(qp, mu, b[p]);
            out[p] = t;
            sum += w[p] * t;
            if t > zero {
                // dt/dmu = -t / (3 q t^2 + mu) = -t / (2 q t^2 + b / t)
                slope -= w[p] * t / (T::of(2.0) * qp * t * t + b[p] / t);
            }
        }
        (sum - target, slope)
    };

    // Phi is decreasing in mu. Dead coordinates (q, b ~ 1e-60) move the
    // root to tiny |mu|, so bisection runs over the float ordering rather
    // than linearly; plain Newton is used while it stays inside the bracket.
    let tol = T::epsilon() * T::of(4.0) * target;
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut mu = 0.0f64;
    for iter in 0..400 {
        let (phi, slope) = eval(T::of(mu), out);
        if phi.abs() <= tol {
            break;
        }
        if phi > zero {
            lo = mu;
        } else {
            hi = mu;
        }
        let bracketed = lo.is_finite() && hi.is_finite();
        if bracketed && ordered_key(hi) - ordered_key(lo) <= 1 {
            // adjacent floats: keep whichever end is closer
            let (plo, _) = eval(T::of(lo), out);
            let (phi_hi, _) = eval(T::of(hi), out);
            if plo.abs() < phi_hi.abs() {
                eval(T::of(lo), out);
            }
            break;
        }
        let newton = mu - (phi / slope).as_f64();
        let next = if iter % 3 != 2 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else if bracketed {
            ordered_midpoint(lo, hi)
        } else if lo.is_finite() {
            lo + lo.abs().max(1.0)
        } else {
            hi - hi.abs().max(1.0)
        };
        if T::of(next) == T::of(mu) {
            break;
        }
        mu = next;
    }
    // `out` holds ratios for the last evaluated mu
    let mut total = zero;
    for p in 0..d {
        out[p] = w[p] * out[p];
        total += out[p];
    }
    if total > zero {
        let scale = target / total;
        for x in out.iter_mut() {
            *x *= scale;
        }
    }
}

/// Monotone map from finite floats to integers (both zeros map to 0).
fn ordered_key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        -(bits & i64::MAX)
    } else {
        bits
    }
}

fn from_key(k: i64) -> f64 {
    if k < 0 {
        f64::from_bits(k.unsigned_abs() | (1 << 63))
    } else {
        f64::from_bits(k as u64)
    }
}

/// Midpoint in float ordering, so that `[-1, 0]` reaches `-1e-60` in about
/// 64 halvings.
fn ordered_midpoint(lo: f64, hi: f64) -> f64 {
    let (a, b) = (ordered_key(lo) as i128, ordered_key(hi) as i128);
    from_key(((a + b) / 2) as i64)
}
