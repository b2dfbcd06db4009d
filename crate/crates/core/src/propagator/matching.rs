use super::riccati::{decaying_log_derivative, riccati_bessel};
use super::CMatrix;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Incoming/outgoing radial functions I, O and R-derivatives, flux-normalized.
pub fn traveling_waves(l: u32, k: f64, r: f64) -> (Complex64, Complex64, Complex64, Complex64) {
    let (j, jp, n, np) = riccati_bessel(l, k * r);
    let s = k.sqrt();
    let inc = (n - I * j) / s;
    let out = (n + I * j) / s;
    let inc_p = (np - I * jp) * s;
    let out_p = (np + I * jp) * s;
    (inc, inc_p, out, out_p)
}

/// Log-derivative of the outgoing (open) or decaying (closed) free solution.
pub fn outgoing_log_derivative(l: u32, e_kin: f64, two_mu: f64, r: f64) -> Complex64 {
    if e_kin > 0.0 {
        let k = (two_mu * e_kin).sqrt();
        let (_, _, o, op) = traveling_waves(l, k, r);
        op / o
    } else {
        let kappa = (-two_mu * e_kin).sqrt();
        Complex64::new(kappa * decaying_log_derivative(l, kappa * r), 0.0)
    }
}

/// Solves for S (open × incoming) given Y at R.
///
/// `e_kin[i]` = E − E_th,i; `incoming` are indices of channels carrying incoming waves.
pub fn match_log_derivative(
    y: &CMatrix,
    ls: &[u32],
    e_kin: &[f64],
    two_mu: f64,
    r: f64,
    incoming: &[usize],
) -> Result<(Vec<usize>, CMatrix)> {
    let n = y.nrows();
    let open: Vec<usize> = (0..n).filter(|&i| e_kin[i] > 0.0).collect();
    let closed: Vec<usize> = (0..n).filter(|&i| e_kin[i] <= 0.0).collect();
    if open.is_empty() {
        return Err(Error::Matching("all channels closed".into()));
    }
    let no = open.len();
    let mut m = CMatrix::zeros(n, n);
    let mut rhs = CMatrix::zeros(n, incoming.len());
    let mut waves = vec![
        (
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
            Complex64::default()
        );
        n
    ];
    for &i in &open {
        let k = (two_mu * e_kin[i]).sqrt();
        waves[i] = traveling_waves(ls[i], k, r);
    }
    for (col, &o) in open.iter().enumerate() {
        let (_, _, out, out_p) = waves[o];
        for row in 0..n {
            let mut v = y[(row, o)] * out;
            if row == o {
                v -= out_p;
            }
            m[(row, col)] = -v;
        }
    }
    for (cc, &c) in closed.iter().enumerate() {
        let kappa = (-two_mu * e_kin[c]).sqrt();
        let yc = kappa * decaying_log_derivative(ls[c], kappa * r);
        for row in 0..n {
            let mut v = y[(row, c)];
            if row == c {
                v -= yc;
            }
            m[(row, no + cc)] = v;
        }
    }
    for (col, &i) in incoming.iter().enumerate() {
        if e_kin[i] <= 0.0 {
            return Err(Error::Matching(format!("incoming channel {i} is closed")));
        }
        let (inc, inc_p, _, _) = waves[i];
        for row in 0..n {
            let mut v = y[(row, i)] * inc;
            if row == i {
                v -= inc_p;
            }
            rhs[(row, col)] = -v;
        }
    }
    let lu = m.lu();
    let x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Matching("singular matching system".into()))?;
    let s = x.rows(0, no).into_owned();
    Ok((open, s))
}

/// Largest off-diagonal |W_ij| relative to the smallest open kinetic energy.
pub fn matching_ratio(w: &DMatrix<f64>, e_kin: &[f64]) -> f64 {
    let n = w.nrows();
    let min_open = e_kin
        .iter()
        .copied()
        .filter(|e| *e > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                worst = worst.max(w[(i, j)].abs());
            }
        }
    }
    worst / min_open
}
