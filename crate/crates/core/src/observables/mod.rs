//! Cross sections, rate coefficients, scattering lengths and simple
//! analytic references computed from block S matrices.

use crate::monomer::{field_dressed_states, induced_dipole, MoleculeParams, MonomerLabel};
use crate::pair_basis::PairLevel;
use crate::propagator::ScatteringSolution;
use crate::{units, Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Statistical factor for identical bosons.
pub const G_BOSONS: f64 = 2.0;

/// Born elastic cross section for fixed dipoles, in units of D².
pub const BORN_TOTAL: f64 = 2.234;
/// Part of [`BORN_TOTAL`] from M_tot = 0.
pub const BORN_MTOT0: f64 = 1.396;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialSigma {
    pub el: f64,
    pub inel: f64,
    pub short: f64,
    pub loss: f64,
}

/// Cross sections (a0²) for one incoming pair level at one set of conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub field_kv_cm: f64,
    pub b_gauss: f64,
    /// E_h.
    pub e_coll: f64,
    /// a0⁻¹.
    pub k0: f64,
    pub reduced_mass: f64,
    pub m_tot: Vec<i32>,
    pub sigma_el: f64,
    pub sigma_inel: f64,
    pub sigma_short: f64,
    /// σ_inel + σ_short.
    pub sigma_loss: f64,
    /// Loss from the elastic block alone; equal to `sigma_loss` up to rounding.
    pub sigma_loss_direct: f64,
    /// Elastic contribution excluding the diagonal L = 0 → 0 term.
    pub sigma_el_higher: f64,
    /// Final pair level → σ_inel,if.
    pub state_to_state: BTreeMap<String, f64>,
    /// L_in → contributions.
    pub partial: BTreeMap<u32, PartialSigma>,
    /// S for L = 0 → 0 in the M_tot = 0 block, if present.
    pub s00: Option<(f64, f64)>,
}

impl ObservableSet {
    /// Relative mismatch between the two loss routes.
    pub fn loss_identity_error(&self) -> f64 {
        let scale = self
            .sigma_loss
            .abs()
            .max(self.sigma_loss_direct.abs())
            .max(f64::MIN_POSITIVE);
        (self.sigma_loss - self.sigma_loss_direct).abs() / scale
    }

    /// Rate coefficient in cm³ s⁻¹ for a cross section in a0².
    pub fn rate(&self, sigma: f64) -> f64 {
        rate_coefficient(sigma, self.e_coll, self.reduced_mass)
    }

    pub fn scattering_length(&self) -> Option<Result<ScatteringLength>> {
        self.s00
            .map(|(re, im)| scattering_length(Complex64::new(re, im), self.k0))
    }
}

/// M_tot blocks needed for a cross section, with their weights.
///
/// Without a magnetic field, blocks ±M give identical cross sections, so only M ≥ 0 is
/// solved and M > 0 is counted twice.
pub fn mtot_weights(m_list: &[i32], b_gauss: f64) -> Vec<(i32, f64)> {
    if b_gauss != 0.0 {
        let mut v: Vec<i32> = m_list.to_vec();
        v.sort_unstable();
        v.dedup();
        return v.into_iter().map(|m| (m, 1.0)).collect();
    }
    let mut v: Vec<i32> = m_list.iter().map(|m| m.abs()).collect();
    v.sort_unstable();
    v.dedup();
    v.into_iter()
        .map(|m| (m, if m == 0 { 1.0 } else { 2.0 }))
        .collect()
}

/// Accumulates cross sections over weighted blocks solved at identical conditions.
pub fn cross_sections(
    blocks: &[(f64, &ScatteringSolution)],
    reduced_mass: f64,
) -> Result<ObservableSet> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::InvalidInput("no blocks".into()))?
        .1;
    let e_coll = first.e_coll;
    if e_coll <= 0.0 {
        return Err(Error::InvalidInput("incoming level not open".into()));
    }
    let k0 = (2.0 * reduced_mass * e_coll).sqrt();
    let pref = G_BOSONS * PI / (k0 * k0);
    let mut out = ObservableSet {
        field_kv_cm: first.field_kv_cm,
        b_gauss: first.b_gauss,
        e_coll,
        k0,
        reduced_mass,
        m_tot: blocks.iter().map(|b| b.1.m_tot).collect(),
        sigma_el: 0.0,
        sigma_inel: 0.0,
        sigma_short: 0.0,
        sigma_loss: 0.0,
        sigma_loss_direct: 0.0,
        sigma_el_higher: 0.0,
        state_to_state: BTreeMap::new(),
        partial: BTreeMap::new(),
        s00: None,
    };
    let mut incoming: Option<PairLevel> = None;
    for &(weight, sol) in blocks {
        if sol.e_coll != e_coll
            || sol.field_kv_cm != first.field_kv_cm
            || sol.b_gauss != first.b_gauss
        {
            return Err(Error::InvalidInput(
                "blocks solved at different conditions".into(),
            ));
        }
        let s = sol.s();
        let chans = &sol.channels;
        for (q, &col) in sol.raw.columns.iter().enumerate() {
            let cin = &chans[col];
            match incoming {
                None => incoming = Some(cin.level),
                Some(l) if l != cin.level => {
                    return Err(Error::InvalidInput(
                        "blocks have different incoming levels".into(),
                    ))
                }
                _ => {}
            }
            let w = weight * pref;
            let mut el = 0.0;
            let mut inel = 0.0;
            let mut same = 0.0;
            for (row, c) in chans.iter().enumerate() {
                let v = s[(row, q)];
                if c.level == cin.level {
                    let d = if row == col {
                        Complex64::new(1.0, 0.0) - v
                    } else {
                        -v
                    };
                    el += d.norm_sqr();
                    same += v.norm_sqr();
                    if sol.m_tot == 0 && cin.l == 0 && c.l == 0 && row == col {
                        out.s00 = Some((v.re, v.im));
                    } else {
                        out.sigma_el_higher += w * d.norm_sqr();
                    }
                } else {
                    inel += v.norm_sqr();
                    *out.state_to_state.entry(c.level.to_string()).or_insert(0.0) +=
                        w * v.norm_sqr();
                }
            }
            let short = 1.0 - same - inel;
            let part = out.partial.entry(cin.l).or_default();
            part.el += w * el;
            part.inel += w * inel;
            part.short += w * short;
            part.loss += w * (1.0 - same);
            out.sigma_el += w * el;
            out.sigma_inel += w * inel;
            out.sigma_short += w * short;
            out.sigma_loss_direct += w * (1.0 - same);
        }
    }
    out.sigma_loss = out.sigma_inel + out.sigma_short;
    Ok(out)
}

/// k = vσ with v = (2E/μ)^{1/2}; σ in a0², result in cm³ s⁻¹.
pub fn rate_coefficient(sigma: f64, e_coll: f64, reduced_mass: f64) -> f64 {
    let v = (2.0 * e_coll / reduced_mass).sqrt();
    units::rate_au_to_cm3_s(v * sigma)
}

/// Complex scattering length a = α − iβ, a0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringLength {
    pub alpha: f64,
    pub beta: f64,
}

impl ScatteringLength {
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.alpha, -self.beta)
    }
}

/// a(k₀) = (1/ik₀)(1 − S₀₀)/(1 + S₀₀).
pub fn scattering_length(s00: Complex64, k0: f64) -> Result<ScatteringLength> {
    let den = Complex64::new(1.0, 0.0) + s00;
    if den.norm() < 1e-14 {
        return Err(Error::InvalidInput(
            "S00 = -1: scattering length has a pole".into(),
        ));
    }
    let a = (Complex64::new(1.0, 0.0) - s00) / den / Complex64::new(0.0, k0);
    let beta = -a.im;
    if beta < -1e-9 * a.norm().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "negative imaginary scattering length {beta:e}"
        )));
    }
    Ok(ScatteringLength {
        alpha: a.re,
        beta: beta.max(0.0),
    })
}

/// Diagonal s-wave elastic and inelastic cross sections from a(k₀).
///
/// The inelastic value includes L-changing elastic flux, so it overestimates loss where
/// that dominates.
pub fn swave_cross_sections(a: ScatteringLength, k0: f64) -> (f64, f64) {
    let a2 = a.alpha * a.alpha + a.beta * a.beta;
    let den = 1.0 + k0 * k0 * a2 + 2.0 * k0 * a.beta;
    let el = 4.0 * PI * G_BOSONS * a2 / den;
    let inel = if a.beta == 0.0 {
        0.0
    } else {
        4.0 * PI * G_BOSONS * a.beta / (k0 * den)
    };
    (el, inel)
}

/// Dipole length D = d₁d₂μ (atomic units, a0).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DipoleLength {
    pub d1: f64,
    pub d2: f64,
    pub reduced_mass: f64,
    pub length: f64,
}

impl DipoleLength {
    /// Dipoles in atomic units. Only the magnitude of d₁d₂ enters.
    pub fn new(d1: f64, d2: f64, reduced_mass: f64) -> Self {
        Self {
            d1,
            d2,
            reduced_mass,
            length: (d1 * d2).abs() * reduced_mass,
        }
    }

    /// Both molecules in the same dressed state at `field_kv_cm`.
    pub fn for_state(
        params: &MoleculeParams,
        field_kv_cm: f64,
        state: MonomerLabel,
        n_max: u32,
    ) -> Result<Self> {
        let states = field_dressed_states(params, field_kv_cm, n_max)?;
        let s = states
            .iter()
            .find(|s| s.label.ntilde == state.ntilde && s.label.mn == state.mn)
            .ok_or_else(|| Error::InvalidInput(format!("no state {state}")))?;
        let d = induced_dipole(s, params);
        Ok(Self::new(d, d, params.reduced_mass()))
    }
}

/// Born elastic cross sections (total, M_tot = 0 part), a0².
pub fn born_elastic(d: &DipoleLength) -> (f64, f64) {
    let d2 = d.length * d.length;
    (BORN_TOTAL * d2, BORN_MTOT0 * d2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta_loss: f64,
    pub slope: f64,
    /// slope / (D²/45)
    pub slope_ratio: f64,
    pub rms_residual: f64,
    pub warnings: Vec<String>,
}

/// Fits β(k₀) = β_loss + slope·k₀.
pub fn beta_decomposition(k0: &[f64], beta: &[f64], d: &DipoleLength) -> Result<BetaFit> {
    if k0.len() != beta.len() || k0.len() < 3 {
        return Err(Error::InvalidInput(
            "need at least 3 (k0, beta) samples".into(),
        ));
    }
    let (b0, b1, rms) = linear_fit(k0, beta);
    let mut warnings = Vec::new();
    let rising = beta.windows(2).all(|w| w[1] >= w[0]);
    let falling = beta.windows(2).all(|w| w[1] <= w[0]);
    if !(rising || falling) {
        warnings.push("beta samples are not monotone".into());
    }
    let span = beta.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - beta.iter().cloned().fold(f64::INFINITY, f64::min);
    if rms > 0.01 * span.abs() {
        warnings.push(format!(
            "curvature: rms residual {rms:e} exceeds 1% of range"
        ));
    }
    let mut beta_loss = b0;
    if beta_loss < 0.0 {
        warnings.push(format!("negative intercept {b0:e} clamped to zero"));
        beta_loss = 0.0;
    }
    let reference = d.length * d.length / 45.0;
    Ok(BetaFit {
        beta_loss,
        slope: b1,
        slope_ratio: b1 / reference,
        rms_residual: rms,
        warnings,
    })
}

/// Least squares y = a + b x; returns (a, b, rms residual).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(u, v)| (v - a - b * u).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, rms)
}

/// Exponent p of y ∝ x^p from a log-log fit.
pub fn power_law_exponent(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::ModelChannel;
    use crate::pair_basis::Parity;
    use crate::propagator::{CMatrix, Diagnostics, RawSolution};

    fn level(n1: u32, n2: u32) -> PairLevel {
        PairLevel::new(MonomerLabel::rotor(n1, 0), MonomerLabel::rotor(n2, 0))
    }

    fn block(s: CMatrix, chans: Vec<(PairLevel, u32)>, columns: Vec<usize>) -> ScatteringSolution {
        let channels: Vec<ModelChannel> = chans
            .iter()
            .map(|&(level, l)| ModelChannel {
                level,
                l,
                ml: 0,
                threshold: 0.0,
            })
            .collect();
        let raw: RawSolution = serde_json::from_value(serde_json::json!({
            "open": (0..channels.len()).collect::<Vec<_>>(),
            "k": vec![1.0; channels.len()],
            "l": channels.iter().map(|c| c.l).collect::<Vec<_>>(),
            "columns": columns,
            "s_re": s.iter().map(|v| v.re).collect::<Vec<_>>(),
            "s_im": s.iter().map(|v| v.im).collect::<Vec<_>>(),
            "diagnostics": Diagnostics::default(),
        }))
        .unwrap();
        let mut raw = raw;
        raw.restore();
        ScatteringSolution {
            m_tot: 0,
            parity: Parity::Even,
            field_kv_cm: 23.0,
            b_gauss: 0.0,
            e_coll: 1e-12,
            channels,
            raw,
        }
    }

    #[test]
    fn identity_gives_nothing() {
        let b = block(
            CMatrix::identity(2, 2),
            vec![(level(1, 1), 0), (level(1, 1), 2)],
            vec![0, 1],
        );
        let o = cross_sections(&[(1.0, &b)], 1000.0).unwrap();
        assert_eq!(o.sigma_el, 0.0);
        assert_eq!(o.sigma_loss, 0.0);
        assert_eq!(o.sigma_short, 0.0);
    }

    #[test]
    fn unitary_has_no_short_range_loss() {
        let (c, s) = (0.6f64, 0.8f64);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(c, 0.0),
                Complex64::new(0.0, s),
                Complex64::new(0.0, s),
                Complex64::new(c, 0.0),
            ],
        );
        let b = block(
            m.columns(0, 1).into_owned(),
            vec![(level(1, 1), 0), (level(0, 2), 2)],
            vec![0],
        );
        let mu = 1000.0;
        let o = cross_sections(&[(1.0, &b)], mu).unwrap();
        assert!(o.sigma_short.abs() < 1e-12 * o.sigma_inel);
        let k2 = 2.0 * mu * 1e-12;
        assert!((o.sigma_inel - 2.0 * PI / k2 * 0.64).abs() < 1e-12 * o.sigma_inel);
        assert!((o.sigma_el - 2.0 * PI / k2 * 0.16).abs() < 1e-12 * o.sigma_el);
        assert!(o.loss_identity_error() < 1e-10);
        assert_eq!(o.state_to_state.len(), 1);
    }

    #[test]
    fn weights_and_s00() {
        let z = Complex64::new(0.5, 0.1);
        let m = CMatrix::from_element(1, 1, z);
        let b = block(m, vec![(level(1, 1), 0)], vec![0]);
        let one = cross_sections(&[(1.0, &b)], 1000.0).unwrap();
        let two = cross_sections(&[(2.0, &b)], 1000.0).unwrap();
        assert!((two.sigma_loss - 2.0 * one.sigma_loss).abs() < 1e-12 * one.sigma_loss);
        assert_eq!(one.s00, Some((0.5, 0.1)));
        assert_eq!(one.sigma_el_higher, 0.0);
        // diagonal s-wave route reproduces the S-matrix value
        let a = one.scattering_length().unwrap().unwrap();
        let (el, inel) = swave_cross_sections(a, one.k0);
        assert!((el - one.sigma_el).abs() < 1e-10 * el);
        assert!((inel - one.sigma_loss).abs() < 1e-10 * inel);
    }

    #[test]
    fn mtot_reflection() {
        assert_eq!(
            mtot_weights(&[-1, 0, 1, 2], 0.0),
            vec![(0, 1.0), (1, 2.0), (2, 2.0)]
        );
        assert_eq!(mtot_weights(&[1, -1], 10.0), vec![(-1, 1.0), (1, 1.0)]);
    }

    #[test]
    fn rates() {
        assert_eq!(rate_coefficient(0.0, 1e-10, 1e5), 0.0);
        let r1 = rate_coefficient(100.0, 1e-10, 1e5);
        let r4 = rate_coefficient(100.0, 4e-10, 1e5);
        assert!((r4 / r1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn scattering_length_limits() {
        let a = scattering_length(Complex64::new(1.0, 0.0), 0.01).unwrap();
        assert_eq!((a.alpha, a.beta), (0.0, 0.0));
        let (k, a0) = (1e-5, 120.0);
        let s = Complex64::new(0.0, -2.0 * k * a0).exp();
        let a = scattering_length(s, k).unwrap();
        assert!((a.alpha - a0).abs() < 1e-3 && a.beta.abs() < 1e-9);
        assert!(scattering_length(Complex64::new(-1.0, 0.0), k).is_err());
        assert!(scattering_length(
            Complex64::new(0.5, 0.0) * Complex64::new(0.0, -2.0 * k * a0).exp() * 3.0,
            k
        )
        .is_err());
    }

    #[test]
    fn swave_limits() {
        let a = ScatteringLength {
            alpha: 50.0,
            beta: 0.0,
        };
        let (el, inel) = swave_cross_sections(a, 1e-9);
        assert!((el - 8.0 * PI * 2500.0).abs() < 1e-9 * el);
        assert_eq!(inel, 0.0);
    }

    #[test]
    fn born_values() {
        let zero = DipoleLength::new(0.0, 1.0, 1e5);
        assert_eq!(born_elastic(&zero), (0.0, 0.0));
        let d = DipoleLength::new(0.17, 0.17, 5e4);
        let (t, m0) = born_elastic(&d);
        assert!((m0 / t - 1.396 / 2.234).abs() < 1e-15);
    }

    #[test]
    fn beta_fit_recovers_line() {
        let d = DipoleLength::new(0.1, 0.1, 1e5);
        let slope = d.length * d.length / 45.0;
        let k: Vec<f64> = (1..6).map(|i| i as f64 * 1e-5).collect();
        let b: Vec<f64> = k.iter().map(|x| 3e-4 + slope * x).collect();
        let f = beta_decomposition(&k, &b, &d).unwrap();
        assert!((f.slope_ratio - 1.0).abs() < 1e-10);
        assert!((f.beta_loss - 3e-4).abs() < 1e-12);
        assert!(f.warnings.is_empty());
        let neg: Vec<f64> = k.iter().map(|x| -1e-3 + slope * x).collect();
        let f = beta_decomposition(&k, &neg, &d).unwrap();
        assert_eq!(f.beta_loss, 0.0);
        assert!(!f.warnings.is_empty());
    }

    #[test]
    fn power_law() {
        let x = [1.0, 10.0, 100.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.5)).collect();
        assert!((power_law_exponent(&x, &y) - 0.5).abs() < 1e-12);
    }
}
