//! Diabatic-reference log-derivative propagation: Y = ψ'ψ⁻¹ obeys Y' = Q − Y²
//! with Q = 2μ(W − E).

use super::RadialProblem;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Workspace for propagating one problem at one energy.
pub struct Sector<'a, P: RadialProblem + ?Sized> {
    problem: &'a P,
    energy: f64,
    two_mu: f64,
    w: DMatrix<f64>,
    /// Q at the end of the last sector (reused as the start of the next).
    q_end: Option<(f64, DMatrix<f64>)>,
    pub sectors: usize,
}

fn half_sector_coefficients(p2: f64, h: f64) -> (f64, f64) {
    let x2 = p2 * h * h;
    if x2.abs() < 1e-8 {
        ((1.0 + x2 / 3.0) / h, (1.0 - x2 / 6.0) / h)
    } else if p2 > 0.0 {
        let p = p2.sqrt();
        let x = p * h;
        if x > 350.0 {
            (p, 0.0)
        } else {
            (p / x.tanh(), p / x.sinh())
        }
    } else {
        let k = (-p2).sqrt();
        let x = k * h;
        (k / x.tan(), k / x.sin())
    }
}

impl<'a, P: RadialProblem + ?Sized> Sector<'a, P> {
    pub fn new(problem: &'a P, energy: f64) -> Self {
        let n = problem.dim();
        Self {
            problem,
            energy,
            two_mu: 2.0 * problem.reduced_mass(),
            w: DMatrix::zeros(n, n),
            q_end: None,
            sectors: 0,
        }
    }

    fn q_at(&mut self, r: f64) -> DMatrix<f64> {
        self.problem.w_into(r, &mut self.w);
        let mut q = self.w.clone();
        for i in 0..q.nrows() {
            q[(i, i)] -= self.energy;
        }
        q *= self.two_mu;
        q
    }

    /// Advances Y across [a, b]. If `amplitude` is given, right-multiplies it by the
    /// transfer matrix with ψ(a) = T ψ(b).
    pub fn step(
        &mut self,
        y: &mut CMatrix,
        a: f64,
        b: f64,
        amplitude: Option<&mut CMatrix>,
    ) -> Result<()> {
        let n = y.nrows();
        let h = 0.5 * (b - a);
        let c = a + h;
        let qa = match self.q_end.take() {
            Some((r, q)) if r == a => q,
            _ => self.q_at(a),
        };
        let qc = self.q_at(c);
        let qb = self.q_at(b);
        let p2: Vec<f64> = (0..n).map(|i| qc[(i, i)]).collect();
        let (y1, y2): (Vec<f64>, Vec<f64>) =
            p2.iter().map(|&p| half_sector_coefficients(p, h)).unzip();

        for j in 0..n {
            for i in 0..n {
                let mut u = qa[(i, j)];
                if i == j {
                    u -= p2[i];
                }
                y[(i, j)] += Complex64::new(h / 3.0 * u, 0.0);
            }
        }
        let t1 = self.half_sector(y, &y1, &y2, a)?;

        // midpoint: (4h/3) [I − (h²/6) U]⁻¹ U
        let mut u = qc.clone();
        for i in 0..n {
            u[(i, i)] -= p2[i];
        }
        let mut m = DMatrix::<f64>::identity(n, n) - (h * h / 6.0) * &u;
        if !m.try_inverse_mut() {
            return Err(Error::NonFinite { r: c });
        }
        let corr = (4.0 * h / 3.0) * (m * u);
        for j in 0..n {
            for i in 0..n {
                y[(i, j)] += Complex64::new(corr[(i, j)], 0.0);
            }
        }
        let t2 = self.half_sector(y, &y1, &y2, c)?;

        for j in 0..n {
            for i in 0..n {
                let mut u = qb[(i, j)];
                if i == j {
                    u -= p2[i];
                }
                y[(i, j)] += Complex64::new(h / 3.0 * u, 0.0);
            }
        }
        if let Some(amp) = amplitude {
            *amp = &*amp * t1 * t2;
        }
        self.q_end = Some((b, qb));
        self.sectors += 1;
        Ok(())
    }

    /// Y ← y1 − y2 (Y + y1)⁻¹ y2; returns the transfer (Y + y1)⁻¹ y2.
    fn half_sector(&self, y: &mut CMatrix, y1: &[f64], y2: &[f64], r: f64) -> Result<CMatrix> {
        let n = y.nrows();
        let mut x = y.clone();
        for i in 0..n {
            x[(i, i)] += y1[i];
        }
        if !x.try_inverse_mut() {
            return Err(Error::NonFinite { r });
        }
        for j in 0..n {
            for i in 0..n {
                x[(i, j)] *= y2[j];
            }
        }
        for j in 0..n {
            for i in 0..n {
                let v = -y2[i] * x[(i, j)];
                y[(i, j)] = if i == j { v + y1[i] } else { v };
            }
        }
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite { r });
        }
        Ok(x)
    }
}
