//! Exact evaluation of sums of signed factorial ratios in prime-exponent form.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

const PRIME_LIMIT: usize = 4096;

fn primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; PRIME_LIMIT + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= PRIME_LIMIT {
            if sieve[i] {
                let mut j = i * i;
                while j <= PRIME_LIMIT {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=PRIME_LIMIT)
            .filter(|&k| sieve[k])
            .map(|k| k as u32)
            .collect()
    })
}

/// Vector of prime exponents representing a positive rational number.
#[derive(Clone, Debug)]
pub(crate) struct PrimePower {
    exps: Vec<i32>,
}

impl PrimePower {
    pub fn one(max_arg: usize) -> Self {
        assert!(
            max_arg <= PRIME_LIMIT,
            "factorial argument {max_arg} too large"
        );
        let n = primes().partition_point(|&p| p as usize <= max_arg.max(2));
        Self { exps: vec![0; n] }
    }

    /// Multiply by (n!)^sign.
    pub fn mul_factorial(&mut self, n: i32, sign: i32) {
        debug_assert!(n >= 0);
        let n = n as u32;
        for (e, &p) in self.exps.iter_mut().zip(primes()) {
            if p > n {
                break;
            }
            let mut q = n / p;
            let mut count = 0;
            while q > 0 {
                count += q as i32;
                q /= p;
            }
            *e += sign * count;
        }
    }
}

fn pow_product(exps: impl Iterator<Item = (u32, i32)>) -> BigInt {
    let mut acc = BigInt::one();
    for (p, e) in exps {
        if e > 0 {
            acc *= BigInt::from(p).pow(e as u32);
        }
    }
    acc
}

/// Ratio of two positive big integers as f64.
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << (shift as u64)) / den
    } else {
        num / (den << ((-shift) as u64))
    };
    q.to_f64().unwrap() * 2f64.powi(-(shift as i32))
}

/// Evaluates `phase * sqrt(prefactor) * Σ_t sign_t * term_t` exactly and rounds once.
pub(crate) fn signed_sqrt_sum(prefactor: &PrimePower, terms: &[(i32, PrimePower)]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    let np = prefactor.exps.len();
    let mut min = vec![i32::MAX; np];
    for (_, t) in terms {
        for (m, &e) in min.iter_mut().zip(&t.exps) {
            *m = (*m).min(e);
        }
    }
    let ps = primes();
    let mut sum = BigInt::zero();
    for (s, t) in terms {
        let v = pow_product(
            t.exps
                .iter()
                .zip(&min)
                .enumerate()
                .map(|(i, (&e, &m))| (ps[i], e - m)),
        );
        if *s >= 0 {
            sum += v;
        } else {
            sum -= v;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let negative = sum.is_negative();
    let total: Vec<i32> = prefactor
        .exps
        .iter()
        .zip(&min)
        .map(|(&p, &m)| p + 2 * m)
        .collect();
    let mut num = &sum * &sum;
    num *= pow_product(total.iter().enumerate().map(|(i, &e)| (ps[i], e)));
    let den = pow_product(total.iter().enumerate().map(|(i, &e)| (ps[i], -e)));
    let v = ratio_to_f64(&num, &den).sqrt();
    if negative {
        -v
    } else {
        v
    }
}
