use super::exact::{signed_sqrt_sum, PrimePower};
use super::HalfIntegerAM;
use dashmap::DashMap;
use std::sync::LazyLock;

static THREEJ_CACHE: LazyLock<DashMap<[i32; 6], f64>> = LazyLock::new(DashMap::new);
static SIXJ_CACHE: LazyLock<DashMap<[i32; 6], f64>> = LazyLock::new(DashMap::new);

fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && c <= a + b && a <= b + c && b <= a + c && (a + b + c) % 2 == 0
}

fn projection_ok(j: i32, m: i32) -> bool {
    m.abs() <= j && (j - m) % 2 == 0
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner_3j(
    j1: HalfIntegerAM,
    j2: HalfIntegerAM,
    j3: HalfIntegerAM,
    m1: HalfIntegerAM,
    m2: HalfIntegerAM,
    m3: HalfIntegerAM,
) -> f64 {
    threej_twice([
        j1.twice(),
        j2.twice(),
        j3.twice(),
        m1.twice(),
        m2.twice(),
        m3.twice(),
    ])
}

/// 3j symbol with integer arguments.
pub fn wigner_3j_int(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    threej_twice([2 * j1, 2 * j2, 2 * j3, 2 * m1, 2 * m2, 2 * m3])
}

fn threej_twice(a: [i32; 6]) -> f64 {
    let [j1, j2, j3, m1, m2, m3] = a;
    if m1 + m2 + m3 != 0
        || !triangle(j1, j2, j3)
        || !projection_ok(j1, m1)
        || !projection_ok(j2, m2)
        || !projection_ok(j3, m3)
    {
        return 0.0;
    }
    let jsum = (j1 + j2 + j3) / 2;
    if m1 == 0 && m2 == 0 && m3 == 0 && jsum % 2 == 1 {
        return 0.0;
    }
    let odd = if jsum % 2 == 0 { 1.0 } else { -1.0 };
    let cols = [(j1, m1), (j2, m2), (j3, m3)];
    let perms: [([usize; 3], f64); 6] = [
        ([0, 1, 2], 1.0),
        ([1, 2, 0], 1.0),
        ([2, 0, 1], 1.0),
        ([1, 0, 2], odd),
        ([0, 2, 1], odd),
        ([2, 1, 0], odd),
    ];
    let mut best: Option<([i32; 6], f64)> = None;
    for (p, ph) in perms {
        for flip in [1, -1] {
            let key = [
                cols[p[0]].0,
                cols[p[1]].0,
                cols[p[2]].0,
                flip * cols[p[0]].1,
                flip * cols[p[1]].1,
                flip * cols[p[2]].1,
            ];
            let phase = if flip == 1 { ph } else { ph * odd };
            if best.map_or(true, |(b, _)| key < b) {
                best = Some((key, phase));
            }
        }
    }
    let (key, phase) = best.unwrap();
    if let Some(v) = THREEJ_CACHE.get(&key) {
        return phase * *v;
    }
    let v = threej_racah(key);
    THREEJ_CACHE.insert(key, v);
    phase * v
}

fn threej_racah(a: [i32; 6]) -> f64 {
    // Work with integers: all combinations below are integers for valid input.
    let [j1, j2, j3, m1, m2, m3] = a;
    let h = |x: i32| {
        debug_assert!(x % 2 == 0);
        x / 2
    };
    let max_arg = ((j1 + j2 + j3) / 2 + 1) as usize;
    let mut pre = PrimePower::one(max_arg);
    pre.mul_factorial(h(j1 + j2 - j3), 1);
    pre.mul_factorial(h(j1 - j2 + j3), 1);
    pre.mul_factorial(h(-j1 + j2 + j3), 1);
    pre.mul_factorial(h(j1 + j2 + j3) + 1, -1);
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        pre.mul_factorial(h(j + m), 1);
        pre.mul_factorial(h(j - m), 1);
    }
    let kmin = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let kmax = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut terms = Vec::new();
    for k in kmin..=kmax {
        let mut t = PrimePower::one(max_arg);
        t.mul_factorial(k, -1);
        t.mul_factorial(h(j3 - j2 + m1) + k, -1);
        t.mul_factorial(h(j3 - j1 - m2) + k, -1);
        t.mul_factorial(h(j1 + j2 - j3) - k, -1);
        t.mul_factorial(h(j1 - m1) - k, -1);
        t.mul_factorial(h(j2 + m2) - k, -1);
        terms.push((if k % 2 == 0 { 1 } else { -1 }, t));
    }
    let phase_exp = h(j1 - j2 - m3);
    let phase = if phase_exp.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    phase * signed_sqrt_sum(&pre, &terms)
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
pub fn wigner_6j(
    j1: HalfIntegerAM,
    j2: HalfIntegerAM,
    j3: HalfIntegerAM,
    j4: HalfIntegerAM,
    j5: HalfIntegerAM,
    j6: HalfIntegerAM,
) -> f64 {
    sixj_twice([
        j1.twice(),
        j2.twice(),
        j3.twice(),
        j4.twice(),
        j5.twice(),
        j6.twice(),
    ])
}

/// 6j symbol with integer arguments.
pub fn wigner_6j_int(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> f64 {
    sixj_twice([2 * j1, 2 * j2, 2 * j3, 2 * j4, 2 * j5, 2 * j6])
}

fn sixj_twice(a: [i32; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = a;
    if !triangle(j1, j2, j3)
        || !triangle(j1, j5, j6)
        || !triangle(j4, j2, j6)
        || !triangle(j4, j5, j3)
    {
        return 0.0;
    }
    let cols = [(j1, j4), (j2, j5), (j3, j6)];
    let perms = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
    ];
    let mut best: Option<[i32; 6]> = None;
    for p in perms {
        // swapping upper and lower entries in two columns
        for swap in [
            [false, false, false],
            [true, true, false],
            [true, false, true],
            [false, true, true],
        ] {
            let c: Vec<(i32, i32)> = (0..3)
                .map(|i| {
                    let (u, l) = cols[p[i]];
                    if swap[i] {
                        (l, u)
                    } else {
                        (u, l)
                    }
                })
                .collect();
            let key = [c[0].0, c[1].0, c[2].0, c[0].1, c[1].1, c[2].1];
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
    }
    let key = best.unwrap();
    if let Some(v) = SIXJ_CACHE.get(&key) {
        return *v;
    }
    let v = sixj_racah(key);
    SIXJ_CACHE.insert(key, v);
    v
}

fn sixj_racah(a: [i32; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = a;
    let h = |x: i32| x / 2;
    let a1 = h(j1 + j2 + j3);
    let a2 = h(j1 + j5 + j6);
    let a3 = h(j4 + j2 + j6);
    let a4 = h(j4 + j5 + j3);
    let b1 = h(j1 + j2 + j4 + j5);
    let b2 = h(j2 + j3 + j5 + j6);
    let b3 = h(j3 + j1 + j6 + j4);
    let max_arg = (b1.max(b2).max(b3) + 1) as usize;
    let mut pre = PrimePower::one(max_arg);
    for (x, y, z) in [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)] {
        pre.mul_factorial(h(x + y - z), 1);
        pre.mul_factorial(h(x - y + z), 1);
        pre.mul_factorial(h(-x + y + z), 1);
        pre.mul_factorial(h(x + y + z) + 1, -1);
    }
    let tmin = a1.max(a2).max(a3).max(a4);
    let tmax = b1.min(b2).min(b3);
    let mut terms = Vec::new();
    for t in tmin..=tmax {
        let mut p = PrimePower::one(max_arg);
        p.mul_factorial(t + 1, 1);
        for ai in [a1, a2, a3, a4] {
            p.mul_factorial(t - ai, -1);
        }
        for bi in [b1, b2, b3] {
            p.mul_factorial(bi - t, -1);
        }
        terms.push((if t % 2 == 0 { 1 } else { -1 }, p));
    }
    signed_sqrt_sum(&pre, &terms)
}

/// Clebsch-Gordan coefficient ⟨j1 m1 j2 m2 | j m⟩ (Condon-Shortley phases).
pub fn clebsch_gordan(
    j1: HalfIntegerAM,
    m1: HalfIntegerAM,
    j2: HalfIntegerAM,
    m2: HalfIntegerAM,
    j: HalfIntegerAM,
    m: HalfIntegerAM,
) -> f64 {
    if m1 + m2 != m {
        return 0.0;
    }
    let w = threej_twice([
        j1.twice(),
        j2.twice(),
        j.twice(),
        m1.twice(),
        m2.twice(),
        -m.twice(),
    ]);
    if w == 0.0 {
        return 0.0;
    }
    let e = (j1.twice() - j2.twice() + m.twice()) / 2;
    let phase = if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * ((j.twice() + 1) as f64).sqrt() * w
}

/// Clebsch-Gordan coefficient with integer arguments.
pub fn clebsch_gordan_int(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    clebsch_gordan(
        j1.into(),
        m1.into(),
        j2.into(),
        m2.into(),
        j.into(),
        m.into(),
    )
}

/// ⟨n' m'| C^k_q |n m⟩ for Racah-normalized spherical harmonics.
pub fn c_tensor_element(np: i32, mp: i32, k: i32, q: i32, n: i32, m: i32) -> f64 {
    if k < 0 || mp != q + m {
        return 0.0;
    }
    let a = wigner_3j_int(np, k, n, 0, 0, 0);
    if a == 0.0 {
        return 0.0;
    }
    let b = wigner_3j_int(np, k, n, -mp, q, m);
    let phase = if mp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * (((2 * n + 1) * (2 * np + 1)) as f64).sqrt() * a * b
}
