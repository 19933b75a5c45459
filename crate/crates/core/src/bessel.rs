//! Bessel functions of the first kind for integer order.
//!
//! All orders `0..=n` at one argument come from a single downward recurrence
//! (Miller's algorithm) normalised with `J₀ + 2ΣJ₂ₖ = 1`. The recurrence is
//! stable downward for every order, so tiny high-order values keep their
//! relative accuracy, which the kick operator relies on.

/// `J_0(x), …, J_nmax(x)`.
pub fn bessel_j_orders(x: f64, nmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let big = nmax.max(ax.ceil() as usize);
    let mut start = big + 60 + (8.0 * (big as f64).cbrt()).ceil() as usize;
    start += start % 2;

    const RESCALE: f64 = 1e250;
    let two_over_x = 2.0 / ax;
    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds J_{k-1}
        let order = k - 1;
        if order <= nmax {
            out[order] = j_cur;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE {
            j_cur /= RESCALE;
            j_next /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    norm += j_cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// `J_n(x)` for any integer order.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let order = n.unsigned_abs() as usize;
    let v = bessel_j_orders(x, order)[order];
    if n < 0 && order % 2 == 1 {
        -v
    } else {
        v
    }
}

pub fn bessel_j0(x: f64) -> f64 {
    bessel_j_orders(x, 0)[0]
}

/// Orders `0..=d_max` of `J_Δ(x)`, cut after the last order above the
/// `threshold` once Δ has passed |x|.
pub fn bessel_j_truncated(x: f64, threshold: f64) -> Vec<f64> {
    let guess = x.abs().ceil() as usize + 40 + (4.0 * x.abs().cbrt()).ceil() as usize;
    let mut vals = bessel_j_orders(x, guess);
    let floor = x.abs().ceil() as usize;
    let cut = (floor..vals.len())
        .find(|&n| vals[n].abs() < threshold)
        .unwrap_or(vals.len());
    vals.truncate(cut.max(1));
    vals
}

/// Smallest positive root of `J₀(x)² = 1/2`, i.e. the half-maximum argument of
/// the `J₀²` line shape.
pub fn j0_squared_half_point() -> f64 {
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let (mut lo, mut hi) = (1.0, 1.3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
