mod common;

use common::{racah_3j, racah_6j, racah_cg, unit, SphereGrid};
use dipolar_shield::angular::{
    c_tensor_element, clebsch_gordan, wigner_3j, wigner_6j, HalfIntegerAM,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SAMPLES: usize = 10_000;
const TWICE_J_MAX: i64 = 40;

fn am(twice: i64) -> HalfIntegerAM {
    HalfIntegerAM::from_twice(twice as i32)
}

/// Random projection of `j` (doubled), same parity.
fn proj(rng: &mut StdRng, j: i64) -> i64 {
    -j + 2 * rng.random_range(0..=j)
}

/// Random third angular momentum mostly inside the triangle, sometimes outside.
fn third(rng: &mut StdRng, a: i64, b: i64) -> i64 {
    let lo = (a - b).abs();
    let hi = a + b;
    if rng.random_bool(0.05) {
        return hi + 2;
    }
    lo + 2 * rng.random_range(0..=(hi - lo) / 2)
}

#[test]
fn three_j_matches_racah_sum() {
    let mut rng = StdRng::seed_from_u64(1);
    let mut nonzero = 0;
    for _ in 0..SAMPLES {
        let j1 = rng.random_range(0..=TWICE_J_MAX);
        let j2 = rng.random_range(0..=TWICE_J_MAX);
        let j3 = third(&mut rng, j1, j2);
        let m1 = proj(&mut rng, j1);
        let m2 = proj(&mut rng, j2);
        let m3 = -m1 - m2;
        let exact = racah_3j(j1, j2, j3, m1, m2, m3);
        let got = wigner_3j(am(j1), am(j2), am(j3), am(m1), am(m2), am(m3));
        assert!(
            (got - exact).abs() < 1e-12,
            "3j({j1} {j2} {j3}; {m1} {m2} {m3})/2: {got} vs {exact}"
        );
        nonzero += usize::from(exact != 0.0);
    }
    assert!(nonzero > SAMPLES / 2);
}

#[test]
fn six_j_matches_racah_sum() {
    let mut rng = StdRng::seed_from_u64(2);
    let mut nonzero = 0;
    for _ in 0..SAMPLES {
        let a = rng.random_range(0..=TWICE_J_MAX / 2);
        let b = rng.random_range(0..=TWICE_J_MAX / 2);
        let c = third(&mut rng, a, b);
        let d = rng.random_range(0..=TWICE_J_MAX / 2);
        let e = third(&mut rng, d, c);
        let f = third(&mut rng, a, e);
        let exact = racah_6j(a, b, c, d, e, f);
        let got = wigner_6j(am(a), am(b), am(c), am(d), am(e), am(f));
        assert!(
            (got - exact).abs() < 1e-12,
            "6j{{{a} {b} {c}; {d} {e} {f}}}/2: {got} vs {exact}"
        );
        nonzero += usize::from(exact != 0.0);
    }
    assert!(nonzero > SAMPLES / 4, "{nonzero}");
}

#[test]
fn clebsch_gordan_matches_racah_sum() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..SAMPLES {
        let j1 = rng.random_range(0..=TWICE_J_MAX);
        let j2 = rng.random_range(0..=TWICE_J_MAX);
        let j = third(&mut rng, j1, j2);
        let m1 = proj(&mut rng, j1);
        let m2 = proj(&mut rng, j2);
        let exact = racah_cg(j1, m1, j2, m2, j, m1 + m2);
        let got = clebsch_gordan(am(j1), am(m1), am(j2), am(m2), am(j), am(m1 + m2));
        assert!(
            (got - exact).abs() < 1e-12,
            "CG {j1} {m1} {j2} {m2} {j}: {got} vs {exact}"
        );
    }
}

#[test]
fn c_tensor_matches_quadrature() {
    let grid = SphereGrid::new(24, 24);
    let mut checked = 0;
    for k in 0..=3 {
        for q in -k..=k {
            let ck = |x: f64, phi: f64| {
                common::ylm(k, q, x, phi) * (4.0 * std::f64::consts::PI / (2 * k + 1) as f64).sqrt()
            };
            for n in 0..=5 {
                for m in -n..=n {
                    for np in 0..=5 {
                        let mp = m + q;
                        if mp.abs() > np {
                            continue;
                        }
                        let quad = grid.element(np, mp, ck, n, m);
                        let got = c_tensor_element(np, mp, k, q, n, m);
                        assert!(quad.im.abs() < 1e-12);
                        assert!(
                            (got - quad.re).abs() < 1e-10,
                            "<{np} {mp}|C{k}{q}|{n} {m}>: {got} vs {}",
                            quad.re
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn unit_vector_is_rank_one_tensor() {
    // z = C^1_0 and (x ± iy) = ∓√2 C^1_{±1}
    let grid = SphereGrid::new(16, 16);
    for (n, m) in [(1, 0), (2, 1), (3, -2)] {
        for np in [n - 1, n + 1] {
            let z = grid.element(np, m, |x, p| Complex64::new(unit(2, x, p), 0.0), n, m);
            assert!((z.re - c_tensor_element(np, m, 1, 0, n, m)).abs() < 1e-12);
        }
    }
}

proptest! {
    #[test]
    fn three_j_column_and_sign_symmetry(j1 in 0i32..12, j2 in 0i32..12, dj in 0i32..24, a in 0i32..25, b in 0i32..25) {
        let j3 = (j1 - j2).abs() + dj % ((j1 + j2 - (j1 - j2).abs()) + 1);
        let m1 = -j1 + a % (2 * j1 + 1);
        let m2 = -j2 + b % (2 * j2 + 1);
        let m3 = -m1 - m2;
        let w = |a: i32, b: i32, c: i32, d: i32, e: i32, f: i32| wigner_3j(a.into(), b.into(), c.into(), d.into(), e.into(), f.into());
        let v = w(j1, j2, j3, m1, m2, m3);
        let odd = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((w(j2, j3, j1, m2, m3, m1) - v).abs() < 1e-13);
        prop_assert!((w(j2, j1, j3, m2, m1, m3) - odd * v).abs() < 1e-13);
        prop_assert!((w(j1, j2, j3, -m1, -m2, -m3) - odd * v).abs() < 1e-13);
    }

    #[test]
    fn clebsch_gordan_orthonormal(j1 in 0i32..6, j2 in 0i32..6, m in -12i32..12) {
        let mut states = Vec::new();
        for j in (j1 - j2).abs()..=(j1 + j2) {
            if m.abs() <= j {
                states.push(j);
            }
        }
        for &ja in &states {
            for &jb in &states {
                let mut s = 0.0;
                for m1 in -j1..=j1 {
                    let m2 = m - m1;
                    if m2.abs() > j2 {
                        continue;
                    }
                    let c = |j: i32| clebsch_gordan(j1.into(), m1.into(), j2.into(), m2.into(), j.into(), m.into());
                    s += c(ja) * c(jb);
                }
                let expect = if ja == jb { 1.0 } else { 0.0 };
                prop_assert!((s - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn six_j_orthogonality(j1 in 0i32..5, j2 in 0i32..5, j3 in 0i32..5, j4 in 0i32..5) {
        // Σ_x (2x+1)(2j6+1) {j1 j2 x; j3 j4 j6}{j1 j2 x; j3 j4 j6'} = δ
        let w = |a: i32, b: i32, c: i32, d: i32, e: i32, f: i32| wigner_6j(a.into(), b.into(), c.into(), d.into(), e.into(), f.into());
        for j6 in 0..6 {
            for j6p in 0..6 {
                let mut s = 0.0;
                for x in 0..12 {
                    s += (2 * x + 1) as f64 * (2 * j6 + 1) as f64 * w(j1, j2, x, j3, j4, j6) * w(j1, j2, x, j3, j4, j6p);
                }
                let allowed = |f: i32| (j1 - j4).abs() <= f && f <= j1 + j4 && (j2 - j3).abs() <= f && f <= j2 + j3;
                let expect = if j6 == j6p && allowed(j6) { 1.0 } else { 0.0 };
                prop_assert!((s - expect).abs() < 1e-11, "{s} vs {expect}");
            }
        }
    }
}
