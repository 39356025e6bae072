//! Chebyshev-basis primitives on the reference interval `[-1, 1]`.
//!
//! Coefficient vectors are indexed by degree: `coeffs[i]` multiplies the
//! Chebyshev polynomial of the first kind `T_i`.

/// Clamps `x` into `[-1, 1]`; inputs up to `1e-12` outside are accepted.
#[inline]
pub fn clamp_unit(x: f64) -> f64 {
    debug_assert!(
        x >= -1.0 - 1e-9 && x <= 1.0 + 1e-9,
        "point {x} far outside [-1,1]"
    );
    x.clamp(-1.0, 1.0)
}

/// Evaluates `sum_i coeffs[i] * T_i(x)` by the Clenshaw recurrence.
pub fn cheb_eval(coeffs: &[f64], x: f64) -> f64 {
    let x = clamp_unit(x);
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Values `T_0(x), ..., T_n(x)` by the three-term recurrence.
pub fn cheb_values(n: usize, x: f64) -> Vec<f64> {
    let x = clamp_unit(x);
    let mut t = Vec::with_capacity(n + 1);
    t.push(1.0);
    if n >= 1 {
        t.push(x);
    }
    for i in 2..=n {
        t.push(2.0 * x * t[i - 1] - t[i - 2]);
    }
    t
}

/// Values `T_0'(x), ..., T_n'(x)` via `T_i' = i U_{i-1}` with the
/// second-kind recurrence.
pub fn cheb_deriv_values(n: usize, x: f64) -> Vec<f64> {
    let x = clamp_unit(x);
    let mut d = Vec::with_capacity(n + 1);
    d.push(0.0);
    if n >= 1 {
        d.push(1.0); // U_0 = 1
    }
    // u holds U_{i-1}
    let mut u_prev = 1.0; // U_0
    let mut u = 2.0 * x; // U_1
    for i in 2..=n {
        d.push(i as f64 * u);
        let u_next = 2.0 * x * u - u_prev;
        u_prev = u;
        u = u_next;
    }
    d
}

/// Coefficients of the derivative of `sum coeffs[i] T_i`.
pub fn cheb_derivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n - 1];
    // d[k] = d[k+2] + 2(k+1) c[k+1], downward recurrence; d[0] halved.
    let mut acc_even = 0.0;
    let mut acc_odd = 0.0;
    for k in (0..n - 1).rev() {
        let acc = if (n - 1 - k) % 2 == 1 {
            &mut acc_odd
        } else {
            &mut acc_even
        };
        *acc += 2.0 * (k as f64 + 1.0) * coeffs[k + 1];
        d[k] = *acc;
    }
    d[0] *= 0.5;
    d
}

/// Coefficients of the antiderivative of `sum coeffs[i] T_i`, with the
/// constant chosen so the antiderivative vanishes at `-1`.
///
/// Uses `∫T_0 = T_1`, `∫T_1 = T_2/4`, and
/// `∫T_n = T_{n+1}/(2(n+1)) - T_{n-1}/(2(n-1))` for `n >= 2`.
pub fn cheb_antiderivative(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut a = vec![0.0; n + 1];
    for (i, &c) in coeffs.iter().enumerate() {
        match i {
            0 => a[1] += c,
            1 => a[2] += c / 4.0,
            _ => {
                let i_f = i as f64;
                a[i + 1] += c / (2.0 * (i_f + 1.0));
                a[i - 1] -= c / (2.0 * (i_f - 1.0));
            }
        }
    }
    // T_k(-1) = (-1)^k; pick a[0] so the antiderivative is 0 at -1.
    let mut at_minus_one = 0.0;
    for (k, &ak) in a.iter().enumerate().skip(1) {
        at_minus_one += if k % 2 == 0 { ak } else { -ak };
    }
    a[0] = -at_minus_one;
    a
}

/// Fits Chebyshev coefficients of degree `< n` to `f` by interpolation at
/// the `n` Chebyshev nodes `cos(pi (k + 1/2) / n)`.
///
/// Exact (up to rounding) when `f` is a polynomial of degree `< n`.
pub fn cheb_fit(n: usize, mut f: impl FnMut(f64) -> f64) -> Vec<f64> {
    assert!(n >= 1);
    let vals: Vec<f64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            f(theta.cos())
        })
        .collect();
    let mut coeffs = vec![0.0; n];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut s = 0.0;
        for (k, &v) in vals.iter().enumerate() {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            s += v * (j as f64 * theta).cos();
        }
        *c = 2.0 * s / n as f64;
    }
    coeffs[0] *= 0.5;
    coeffs
}

/// Affine map from `[a, b)` onto `[-1, 1)`.
#[inline]
pub fn domain_map(interval: (f64, f64), y: f64) -> f64 {
    let (a, b) = interval;
    -1.0 + 2.0 * (y - a) / (b - a)
}

/// Inverse of [`domain_map`].
#[inline]
pub fn domain_unmap(interval: (f64, f64), x: f64) -> f64 {
    let (a, b) = interval;
    a + (x + 1.0) * 0.5 * (b - a)
}
