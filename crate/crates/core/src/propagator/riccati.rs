//! Riccati-Bessel functions ĵ_L(x) = x j_L(x), n̂_L(x) = −x y_L(x) and the
//! log-derivative of the decaying modified function.

/// (ĵ_L, ĵ_L', n̂_L, n̂_L') with derivatives with respect to x.
pub fn riccati_bessel(l: u32, x: f64) -> (f64, f64, f64, f64) {
    let (s, c) = x.sin_cos();
    let l = l as usize;
    // n̂ by upward recurrence (stable)
    let mut n = vec![0.0; l + 1];
    n[0] = c;
    if l >= 1 {
        n[1] = c / x + s;
    }
    for k in 1..l {
        n[k + 1] = (2 * k + 1) as f64 / x * n[k] - n[k - 1];
    }
    let j = if (l as f64) < x {
        let mut j = vec![0.0; l + 1];
        j[0] = s;
        if l >= 1 {
            j[1] = s / x - c;
        }
        for k in 1..l {
            j[k + 1] = (2 * k + 1) as f64 / x * j[k] - j[k - 1];
        }
        j
    } else {
        miller_downward(l, x, s)
    };
    let (jl, nl) = (j[l], n[l]);
    let (jp, np) = if l == 0 {
        (c, -s)
    } else {
        let lf = l as f64;
        (j[l - 1] - lf / x * jl, n[l - 1] - lf / x * nl)
    };
    (jl, jp, nl, np)
}

fn miller_downward(l: usize, x: f64, sin_x: f64) -> Vec<f64> {
    let start = l + 20 + (x.abs().sqrt() * 4.0) as usize + (x as usize);
    let mut f = vec![0.0; start + 2];
    f[start + 1] = 0.0;
    f[start] = 1e-300;
    for k in (1..=start).rev() {
        f[k - 1] = (2 * k + 1) as f64 / x * f[k] - f[k + 1];
        if f[k - 1].abs() > 1e250 {
            for v in f.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    // normalize with ĵ_0 = sin x, or ĵ_1 when sin x is tiny
    let scale = if sin_x.abs() > 0.1 {
        sin_x / f[0]
    } else {
        (sin_x / x - x.cos()) / f[1]
    };
    f.truncate(l + 1);
    f.iter().map(|v| v * scale).collect()
}

/// d/dx ln k̂_L(x) for the decaying solution k̂_L ∝ e^{−x}(1 + …).
pub fn decaying_log_derivative(l: u32, x: f64) -> f64 {
    if l == 0 {
        return -1.0;
    }
    // s_L = e^x k̂_L: s_0 = 1, s_1 = 1 + 1/x, s_{L+1} = s_{L−1} + (2L+1)/x s_L
    let mut sm = 1.0;
    let mut s = 1.0 + 1.0 / x;
    for k in 1..l {
        let next = sm + (2 * k + 1) as f64 / x * s;
        sm = s;
        s = next;
    }
    -sm / s - l as f64 / x
}
