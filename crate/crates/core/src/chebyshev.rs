//! Scalar Chebyshev polynomials of the first kind.

/// `T_k(x)` for any real `x`.
///
/// Uses `cos(k·acos x)` inside `[-1, 1]` and `±cosh(k·acosh|x|)` outside,
/// which stays accurate (and saturates to ±∞) for large `k`.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    match k {
        0 => return 1.0,
        1 => return x,
        _ => {}
    }
    let kf = k as f64;
    if x.abs() <= 1.0 {
        (kf * x.acos()).cos()
    } else {
        let mag = (kf * x.abs().acosh()).cosh();
        if x < 0.0 && k % 2 == 1 {
            -mag
        } else {
            mag
        }
    }
}

/// `T_0(x), …, T_{count-1}(x)` by the three-term recurrence.
pub fn chebyshev_series(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let next = match k {
            0 => 1.0,
            1 => x,
            _ => 2.0 * x * out[k - 1] - out[k - 2],
        };
        out.push(next);
    }
    out
}
