//! Independent oracles shared by the integration tests: exact Racah sums in
//! rational arithmetic and direct quadrature over spherical harmonics.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::PI;

fn fact(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn ratio(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Value sign·sqrt(square) evaluated once in floating point.
fn signed_sqrt(square: &BigRational, sum: &BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let v = (square * sum * sum).to_f64().unwrap().sqrt();
    if sum.is_negative() {
        -v
    } else {
        v
    }
}

/// Triangle coefficient for doubled arguments; `None` if the triangle fails.
fn delta2(a: i64, b: i64, c: i64) -> Option<BigRational> {
    let s = [a + b - c, a - b + c, -a + b + c];
    if s.iter().any(|x| *x < 0 || x % 2 != 0) {
        return None;
    }
    let num = fact(s[0] / 2) * fact(s[1] / 2) * fact(s[2] / 2);
    Some(BigRational::new(num, fact((a + b + c) / 2 + 1)))
}

/// 3j symbol from the Racah formula; all arguments doubled.
pub fn racah_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j - m) % 2 != 0 {
            return 0.0;
        }
    }
    let Some(d) = delta2(j1, j2, j3) else {
        return 0.0;
    };
    let h = |x: i64| x / 2;
    let pre = d * ratio(
        fact(h(j1 + m1))
            * fact(h(j1 - m1))
            * fact(h(j2 + m2))
            * fact(h(j2 - m2))
            * fact(h(j3 + m3))
            * fact(h(j3 - m3)),
    );
    let mut sum = BigRational::zero();
    for k in 0..=(j1 + j2 + j3) {
        let den = [
            k,
            h(j3 - j2 + m1) + k,
            h(j3 - j1 - m2) + k,
            h(j1 + j2 - j3) - k,
            h(j1 - m1) - k,
            h(j2 + m2) - k,
        ];
        if den.iter().any(|x| *x < 0) {
            continue;
        }
        let d: BigInt = den.iter().map(|&x| fact(x)).product();
        let term = BigRational::new(BigInt::one(), d);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let phase = h(j1 - j2 - m3);
    let v = signed_sqrt(&pre, &sum);
    if phase.rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

/// 6j symbol from the Racah formula; arguments doubled.
pub fn racah_6j(a: i64, b: i64, c: i64, d: i64, e: i64, f: i64) -> f64 {
    let tri = [(a, b, c), (a, e, f), (d, b, f), (d, e, c)];
    let mut pre = BigRational::one();
    for (x, y, z) in tri {
        match delta2(x, y, z) {
            Some(t) => pre *= t,
            None => return 0.0,
        }
    }
    let h = |x: i64| x / 2;
    let lo = [a + b + c, a + e + f, d + b + f, d + e + c]
        .into_iter()
        .max()
        .unwrap()
        / 2;
    let hi = [a + b + d + e, a + c + d + f, b + c + e + f]
        .into_iter()
        .min()
        .unwrap()
        / 2;
    let mut sum = BigRational::zero();
    for t in lo..=hi {
        let den = [
            t - h(a + b + c),
            t - h(a + e + f),
            t - h(d + b + f),
            t - h(d + e + c),
            h(a + b + d + e) - t,
            h(a + c + d + f) - t,
            h(b + c + e + f) - t,
        ];
        let dd: BigInt = den.iter().map(|&x| fact(x)).product();
        let term = BigRational::new(fact(t + 1), dd);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    signed_sqrt(&pre, &sum)
}

/// Clebsch-Gordan ⟨j1 m1 j2 m2|j m⟩ via the 3j symbol; arguments doubled.
pub fn racah_cg(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    let phase = (j1 - j2 + m) / 2;
    let v = ((j + 1) as f64).sqrt() * racah_3j(j1, j2, j, m1, m2, -m);
    if phase.rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Spherical harmonic with the Condon-Shortley phase.
pub fn ylm(l: i32, m: i32, cos_t: f64, phi: f64) -> Complex64 {
    if m < 0 {
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        return ylm(l, -m, cos_t, phi).conj() * s;
    }
    if m > l {
        return Complex64::new(0.0, 0.0);
    }
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * sin_t;
    }
    let p = if l == m {
        pmm
    } else {
        let mut p0 = pmm;
        let mut p1 = cos_t * (2 * m + 1) as f64 * pmm;
        for ll in (m + 2)..=l {
            let p2 =
                ((2 * ll - 1) as f64 * cos_t * p1 - (ll + m - 1) as f64 * p0) / (ll - m) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| k as f64).product();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) / ratio).sqrt();
    Complex64::from_polar(norm * p, m as f64 * phi)
}

/// Product grid over the sphere, exact for low-order harmonics.
pub struct SphereGrid {
    pub points: Vec<(f64, f64, f64)>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let mut points = Vec::new();
        for (x, w) in gauss_legendre(n_theta) {
            for k in 0..n_phi {
                let phi = 2.0 * PI * k as f64 / n_phi as f64;
                points.push((x, phi, w * 2.0 * PI / n_phi as f64));
            }
        }
        Self { points }
    }

    /// ∫ Y*_{l'm'} f Y_{lm} dΩ.
    pub fn element(
        &self,
        lp: i32,
        mp: i32,
        f: impl Fn(f64, f64) -> Complex64,
        l: i32,
        m: i32,
    ) -> Complex64 {
        self.points
            .iter()
            .map(|&(x, phi, w)| ylm(lp, mp, x, phi).conj() * f(x, phi) * ylm(l, m, x, phi) * w)
            .sum()
    }
}

/// Cartesian components of the unit vector.
pub fn unit(i: usize, cos_t: f64, phi: f64) -> f64 {
    let s = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    match i {
        0 => s * phi.cos(),
        1 => s * phi.sin(),
        _ => cos_t,
    }
}
