//! Coupled radial equations: absorbing (or hard-wall) inner boundary,
//! log-derivative propagation and asymptotic matching.

mod logderiv;
mod matching;
mod riccati;

pub use logderiv::{CMatrix, Sector};
pub use matching::{
    match_log_derivative, matching_ratio, outgoing_log_derivative, traveling_waves,
};
pub use riccati::{decaying_log_derivative, riccati_bessel};

use crate::interaction::{CouplingModel, InteractionOptions, ModelChannel};
use crate::monomer::MoleculeParams;
use crate::pair_basis::{BasisSpec, MonomerSet, Parity};
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A set of coupled radial equations −ψ''/(2μ) + W(R)ψ = Eψ.
pub trait RadialProblem {
    fn dim(&self) -> usize;
    fn reduced_mass(&self) -> f64;
    fn thresholds(&self) -> Vec<f64>;
    fn l_values(&self) -> Vec<u32>;
    fn w_into(&self, r: f64, w: &mut DMatrix<f64>);
    fn dw_dr(&self, r: f64) -> DMatrix<f64>;
}

impl RadialProblem for CouplingModel {
    fn dim(&self) -> usize {
        CouplingModel::dim(self)
    }
    fn reduced_mass(&self) -> f64 {
        self.reduced_mass
    }
    fn thresholds(&self) -> Vec<f64> {
        self.thresholds.clone()
    }
    fn l_values(&self) -> Vec<u32> {
        self.channels.iter().map(|c| c.l).collect()
    }
    fn w_into(&self, r: f64, w: &mut DMatrix<f64>) {
        self.assemble_w_into(r, w).expect("positive radius");
    }
    fn dw_dr(&self, r: f64) -> DMatrix<f64> {
        CouplingModel::dw_dr(self, r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationConfig {
    /// Inner boundary, a0.
    pub r_absorb: f64,
    /// End of the fixed-step region, a0.
    pub r_mid: f64,
    /// Minimum outer radius, a0; extended to `kr_max / k_incoming` when larger.
    pub r_max: f64,
    pub kr_max: f64,
    /// Sector width in the inner region, a0 (reduced further by the energy criterion).
    pub inner_step: f64,
    /// max|Q| h² bound used to cap the inner step.
    pub step_energy_bound: f64,
    pub outer_step_growth: f64,
    /// Outer sectors are capped at this fraction of the local open-channel wavelength.
    pub wavelength_fraction: f64,
    /// Outer sectors are also capped at this fraction of R.
    pub radial_fraction: f64,
    /// Incoming-wave (true) or hard-wall (false) inner boundary.
    pub absorbing: bool,
    /// Drop channels that have decoupled from the incoming threshold before R_max.
    pub eliminate_decoupled: bool,
    pub decoupling_tolerance: f64,
    pub matching_tolerance: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            r_absorb: 50.0,
            r_mid: 300.0,
            r_max: 1e4,
            kr_max: 50.0,
            inner_step: 0.02,
            step_energy_bound: 1e-3,
            outer_step_growth: 1.02,
            wavelength_fraction: 0.1,
            radial_fraction: 0.01,
            absorbing: true,
            eliminate_decoupled: true,
            decoupling_tolerance: 1e-6,
            matching_tolerance: 1e-3,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_absorb > 0.0 && self.r_absorb < self.r_mid && self.r_mid < self.r_max) {
            return Err(Error::Config("need 0 < r_absorb < r_mid < r_max".into()));
        }
        if !(self.inner_step > 0.0
            && self.outer_step_growth >= 1.0
            && self.wavelength_fraction > 0.0
            && self.radial_fraction > 0.0)
        {
            return Err(Error::Config(
                "steps must be positive and growth ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

/// Y(R_absorb) for purely incoming WKB waves in the locally adiabatic frame.
pub fn absorbing_initial_condition<P: RadialProblem + ?Sized>(
    problem: &P,
    r: f64,
    energy: f64,
) -> Result<CMatrix> {
    let n = problem.dim();
    let mut w = DMatrix::zeros(n, n);
    problem.w_into(r, &mut w);
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { r });
    }
    let mu = problem.reduced_mass();
    let eig = SymmetricEigen::new(w);
    let t = eig.eigenvectors;
    let dw = t.transpose() * problem.dw_dr(r) * &t;
    let mut y = CMatrix::zeros(n, n);
    let tc = t.map(|x| Complex64::new(x, 0.0));
    let mut d = CMatrix::zeros(n, n);
    for j in 0..n {
        let k2 = 2.0 * mu * (energy - eig.eigenvalues[j]);
        let wp = dw[(j, j)];
        d[(j, j)] = if k2 > 0.0 {
            Complex64::new(mu * wp / (2.0 * k2), -k2.sqrt())
        } else {
            let kappa2 = -k2;
            Complex64::new(kappa2.sqrt() - mu * wp / (2.0 * kappa2), 0.0)
        };
    }
    y += &tc * d * tc.transpose();
    Ok(y)
}

/// Hard wall ψ(R) = 0.
pub fn hard_wall_initial_condition(n: usize) -> CMatrix {
    CMatrix::identity(n, n) * Complex64::new(1e20, 0.0)
}

/// Propagates Y from `r_start` to `r_end` with the configured grid.
pub fn propagate<P: RadialProblem + ?Sized>(
    y_start: &CMatrix,
    problem: &P,
    energy: f64,
    r_start: f64,
    r_end: f64,
    config: &PropagationConfig,
) -> Result<CMatrix> {
    let mut y = y_start.clone();
    let mut sector = Sector::new(problem, energy);
    let h_in = inner_step(problem, energy, r_start, config);
    let mut grid = Grid::new(r_start, r_end, config.r_mid.max(r_start), h_in, config);
    while let Some((a, b)) = grid.next(problem, energy) {
        sector.step(&mut y, a, b, None)?;
    }
    Ok(y)
}

fn inner_step<P: RadialProblem + ?Sized>(
    problem: &P,
    energy: f64,
    r: f64,
    config: &PropagationConfig,
) -> f64 {
    let n = problem.dim();
    let mut w = DMatrix::zeros(n, n);
    problem.w_into(r, &mut w);
    let mut norm = 0.0f64;
    for i in 0..n {
        let row: f64 = (0..n)
            .map(|j| (w[(i, j)] - if i == j { energy } else { 0.0 }).abs())
            .sum();
        norm = norm.max(row);
    }
    let q = 2.0 * problem.reduced_mass() * norm;
    // half-sector h with q h² < bound
    let h = (config.step_energy_bound / q.max(1e-300)).sqrt();
    config.inner_step.min(2.0 * h)
}

struct Grid {
    r: f64,
    r_end: f64,
    r_mid: f64,
    width: f64,
    growth: f64,
    fraction: f64,
    radial: f64,
}

impl Grid {
    fn new(r: f64, r_end: f64, r_mid: f64, width: f64, config: &PropagationConfig) -> Self {
        Self {
            r,
            r_end,
            r_mid,
            width,
            growth: config.outer_step_growth,
            fraction: config.wavelength_fraction,
            radial: config.radial_fraction,
        }
    }

    fn next<P: RadialProblem + ?Sized>(&mut self, problem: &P, energy: f64) -> Option<(f64, f64)> {
        if self.r >= self.r_end - 1e-12 * self.r_end {
            return None;
        }
        let a = self.r;
        let mut b;
        if a < self.r_mid - 1e-9 {
            b = (a + self.width).min(self.r_mid);
            if self.r_mid - b < 1e-3 * self.width {
                b = self.r_mid;
            }
        } else {
            let th = problem.thresholds();
            let ls = problem.l_values();
            let two_mu = 2.0 * problem.reduced_mass();
            let kmax = th
                .iter()
                .zip(&ls)
                .map(|(e, &l)| two_mu * (energy - e) - (l * (l + 1)) as f64 / (a * a))
                .fold(0.0f64, f64::max)
                .sqrt();
            let cap = if kmax > 0.0 {
                self.fraction * std::f64::consts::TAU / kmax
            } else {
                f64::INFINITY
            };
            self.width = (self.width * self.growth).min(cap).min(self.radial * a);
            b = a + self.width;
        }
        if b > self.r_end || self.r_end - b < 0.1 * self.width {
            b = self.r_end;
        }
        self.r = b;
        Some((a, b))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// 1 − Σ_rows |S|² per column.
    pub unitarity_deficit: Vec<f64>,
    pub sectors: usize,
    pub r_max: f64,
    pub inner_step: f64,
    /// Radius where decoupled channels were eliminated.
    pub r_decoupled: Option<f64>,
    pub matching_ratio: f64,
}

/// S matrix of one block: rows are open channels, columns are incoming channels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawSolution {
    /// Problem channel index of each open channel.
    pub open: Vec<usize>,
    pub k: Vec<f64>,
    pub l: Vec<u32>,
    /// Position within `open` of the channel feeding each S column.
    pub columns: Vec<usize>,
    pub s_re: Vec<f64>,
    pub s_im: Vec<f64>,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub s: CMatrix,
}

impl RawSolution {
    fn new(
        open: Vec<usize>,
        k: Vec<f64>,
        l: Vec<u32>,
        columns: Vec<usize>,
        s: CMatrix,
        d: Diagnostics,
    ) -> Self {
        Self {
            s_re: s.iter().map(|v| v.re).collect(),
            s_im: s.iter().map(|v| v.im).collect(),
            open,
            k,
            l,
            columns,
            s,
            diagnostics: d,
        }
    }

    /// Restores `s` after deserialization.
    pub fn restore(&mut self) {
        let (r, c) = (self.open.len(), self.columns.len());
        self.s = CMatrix::from_iterator(
            r,
            c,
            self.s_re
                .iter()
                .zip(&self.s_im)
                .map(|(a, b)| Complex64::new(*a, *b)),
        );
    }
}

fn unitarity(s: &CMatrix) -> Vec<f64> {
    (0..s.ncols())
        .map(|j| 1.0 - s.column(j).iter().map(|v| v.norm_sqr()).sum::<f64>())
        .collect()
}

/// Full calculation at energy `energy` (E_h, thresholds are relative to the same zero).
/// The channels with threshold equal to `incoming_threshold` carry incoming waves.
pub fn solve_problem<P: RadialProblem + ?Sized>(
    problem: &P,
    energy: f64,
    incoming_threshold: f64,
    config: &PropagationConfig,
) -> Result<RawSolution> {
    config.validate()?;
    let n = problem.dim();
    let two_mu = 2.0 * problem.reduced_mass();
    let th = problem.thresholds();
    let ls = problem.l_values();
    let e_kin: Vec<f64> = th.iter().map(|t| energy - t).collect();
    let degenerate = |t: f64| {
        (t - incoming_threshold).abs() <= (1e-12 * (energy - incoming_threshold).abs()).max(1e-18)
    };
    let slow: Vec<usize> = (0..n).filter(|&i| degenerate(th[i])).collect();
    if slow.is_empty() || energy <= incoming_threshold {
        return Err(Error::Matching("incoming channels are not open".into()));
    }
    let k_in = (two_mu * (energy - incoming_threshold)).sqrt();
    let r_max = config.r_max.max(config.kr_max / k_in);
    let fast: Vec<usize> = (0..n).filter(|i| !slow.contains(i)).collect();

    let mut y = if config.absorbing {
        absorbing_initial_condition(problem, config.r_absorb, energy)?
    } else {
        hard_wall_initial_condition(n)
    };
    let h_in = inner_step(problem, energy, config.r_absorb, config);
    let mut sector = Sector::new(problem, energy);
    let mut grid = Grid::new(config.r_absorb, r_max, config.r_mid, h_in, config);
    let try_eliminate = config.eliminate_decoupled && !fast.is_empty();
    let mut w = DMatrix::zeros(n, n);
    let mut r_dec = None;
    let mut count = 0usize;
    while let Some((a, b)) = grid.next(problem, energy) {
        sector.step(&mut y, a, b, None)?;
        count += 1;
        if try_eliminate && b >= config.r_mid && count % 10 == 0 {
            problem.w_into(b, &mut w);
            if decoupled(&w, &th, &slow, &fast, energy, config.decoupling_tolerance) {
                r_dec = Some((b, grid.width));
                break;
            }
        }
    }
    let mut diag = Diagnostics {
        r_max,
        inner_step: h_in,
        ..Default::default()
    };

    let Some((rd, width)) = r_dec else {
        problem.w_into(r_max, &mut w);
        for i in 0..n {
            w[(i, i)] -= th[i];
        }
        diag.matching_ratio = matching_ratio(&w, &e_kin);
        if diag.matching_ratio > config.matching_tolerance {
            return Err(Error::Matching(format!(
                "off-diagonal coupling ratio {:.2e} at R_max = {r_max:.1} a0 exceeds tolerance; increase r_max",
                diag.matching_ratio
            )));
        }
        let (open, s) = match_log_derivative(&y, &ls, &e_kin, two_mu, r_max, &slow)?;
        diag.sectors = sector.sectors;
        diag.unitarity_deficit = unitarity(&s);
        let columns = slow
            .iter()
            .map(|i| open.iter().position(|o| o == i).unwrap())
            .collect();
        let k = open.iter().map(|&i| (two_mu * e_kin[i]).sqrt()).collect();
        let l = open.iter().map(|&i| ls[i]).collect();
        return Ok(RawSolution::new(open, k, l, columns, s, diag));
    };

    // Eliminate fast channels with their free asymptotic log-derivatives.
    diag.r_decoupled = Some(rd);
    let nf = fast.len();
    let ns = slow.len();
    let mut a_ff = CMatrix::zeros(nf, nf);
    for (p, &f) in fast.iter().enumerate() {
        for (q, &g) in fast.iter().enumerate() {
            a_ff[(p, q)] = -y[(f, g)];
        }
        a_ff[(p, p)] += outgoing_log_derivative(ls[f], e_kin[f], two_mu, rd);
    }
    let y_fs = CMatrix::from_fn(nf, ns, |p, q| y[(fast[p], slow[q])]);
    let y_sf = CMatrix::from_fn(ns, nf, |p, q| y[(slow[p], fast[q])]);
    let lu = a_ff.lu();
    let g = lu.solve(&y_fs).ok_or(Error::NonFinite { r: rd })?;
    let mut ys = CMatrix::from_fn(ns, ns, |p, q| y[(slow[p], slow[q])]);
    ys += &y_sf * &g;

    let sub = SubProblem {
        parent: problem,
        keep: &slow,
    };
    let mut sector_s = Sector::new(&sub, energy);
    let mut amp = CMatrix::identity(ns, ns);
    let mut grid_s = Grid::new(rd, r_max, rd, width, config);
    while let Some((a, b)) = grid_s.next(&sub, energy) {
        sector_s.step(&mut ys, a, b, Some(&mut amp))?;
    }
    let mut ws = DMatrix::zeros(ns, ns);
    sub.w_into(r_max, &mut ws);
    let e_s: Vec<f64> = slow.iter().map(|&i| e_kin[i]).collect();
    for i in 0..ns {
        ws[(i, i)] -= th[slow[i]];
    }
    diag.matching_ratio = matching_ratio(&ws, &e_s);
    if diag.matching_ratio > config.matching_tolerance {
        return Err(Error::Matching(format!(
            "off-diagonal coupling ratio {:.2e} at R_max = {r_max:.1} a0 exceeds tolerance; increase r_max",
            diag.matching_ratio
        )));
    }
    let ls_s: Vec<u32> = slow.iter().map(|&i| ls[i]).collect();
    let all: Vec<usize> = (0..ns).collect();
    let (_, s_ss) = match_log_derivative(&ys, &ls_s, &e_s, two_mu, r_max, &all)?;

    // ψ_s(R_max) = I − O S, carried back to R_d
    let mut psi = CMatrix::zeros(ns, ns);
    for (p, &i) in slow.iter().enumerate() {
        let k = (two_mu * e_kin[i]).sqrt();
        let (inc, _, out, _) = traveling_waves(ls[i], k, r_max);
        for q in 0..ns {
            psi[(p, q)] = -out * s_ss[(p, q)] + if p == q { inc } else { Complex64::default() };
        }
    }
    let psi_d = &amp * psi;
    let psi_f = lu
        .solve(&(&y_fs * &psi_d))
        .ok_or(Error::NonFinite { r: rd })?;

    let open: Vec<usize> = (0..n).filter(|&i| e_kin[i] > 0.0).collect();
    let mut s = CMatrix::zeros(open.len(), ns);
    for (row, &o) in open.iter().enumerate() {
        if let Some(p) = slow.iter().position(|&x| x == o) {
            for q in 0..ns {
                s[(row, q)] = s_ss[(p, q)];
            }
        } else {
            let p = fast.iter().position(|&x| x == o).unwrap();
            let k = (two_mu * e_kin[o]).sqrt();
            let (_, _, out, _) = traveling_waves(ls[o], k, rd);
            for q in 0..ns {
                s[(row, q)] = -psi_f[(p, q)] / out;
            }
        }
    }
    diag.sectors = sector.sectors + sector_s.sectors;
    diag.unitarity_deficit = unitarity(&s);
    let columns = slow
        .iter()
        .map(|i| open.iter().position(|o| o == i).unwrap())
        .collect();
    let k = open.iter().map(|&i| (two_mu * e_kin[i]).sqrt()).collect();
    let l = open.iter().map(|&i| ls[i]).collect();
    Ok(RawSolution::new(open, k, l, columns, s, diag))
}

fn decoupled(
    w: &DMatrix<f64>,
    th: &[f64],
    slow: &[usize],
    fast: &[usize],
    energy: f64,
    tol: f64,
) -> bool {
    for &f in fast {
        let gap_f = (energy - th[f]).abs();
        // residual diagonal interaction of the fast channel (centrifugal is treated exactly)
        for &s in slow {
            let gap = (th[f] - th[s]).abs();
            if w[(f, s)].abs() > tol * gap {
                return false;
            }
        }
        let _ = gap_f;
    }
    true
}

struct SubProblem<'a, P: RadialProblem + ?Sized> {
    parent: &'a P,
    keep: &'a [usize],
}

impl<P: RadialProblem + ?Sized> RadialProblem for SubProblem<'_, P> {
    fn dim(&self) -> usize {
        self.keep.len()
    }
    fn reduced_mass(&self) -> f64 {
        self.parent.reduced_mass()
    }
    fn thresholds(&self) -> Vec<f64> {
        let t = self.parent.thresholds();
        self.keep.iter().map(|&i| t[i]).collect()
    }
    fn l_values(&self) -> Vec<u32> {
        let l = self.parent.l_values();
        self.keep.iter().map(|&i| l[i]).collect()
    }
    fn w_into(&self, r: f64, w: &mut DMatrix<f64>) {
        let n = self.parent.dim();
        let mut full = DMatrix::zeros(n, n);
        self.parent.w_into(r, &mut full);
        for (p, &i) in self.keep.iter().enumerate() {
            for (q, &j) in self.keep.iter().enumerate() {
                w[(p, q)] = full[(i, j)];
            }
        }
    }
    fn dw_dr(&self, r: f64) -> DMatrix<f64> {
        let d = self.parent.dw_dr(r);
        DMatrix::from_fn(self.keep.len(), self.keep.len(), |p, q| {
            d[(self.keep[p], self.keep[q])]
        })
    }
}

/// S matrix of one (M_tot, parity) block with channel metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScatteringSolution {
    pub m_tot: i32,
    pub parity: Parity,
    pub field_kv_cm: f64,
    pub b_gauss: f64,
    /// Collision energy, E_h.
    pub e_coll: f64,
    /// Metadata for each open channel (row of S).
    pub channels: Vec<ModelChannel>,
    pub raw: RawSolution,
}

impl ScatteringSolution {
    pub fn s(&self) -> &CMatrix {
        &self.raw.s
    }
}

/// Propagates and matches one coupling model at collision energy `e_coll` (E_h above the incoming threshold).
pub fn solve_model(
    model: &CouplingModel,
    e_coll: f64,
    field_kv_cm: f64,
    b_gauss: f64,
    config: &PropagationConfig,
) -> Result<ScatteringSolution> {
    let raw = solve_problem(model, e_coll, 0.0, config)?;
    let in_level = model.incoming;
    let channels: Vec<ModelChannel> = raw
        .open
        .iter()
        .map(|&i| model.channels[i].clone())
        .collect();
    for &c in &raw.columns {
        if channels[c].level != in_level {
            return Err(Error::Matching(format!(
                "channel {} is degenerate with the incoming level but belongs to {}",
                c, channels[c].level
            )));
        }
    }
    Ok(ScatteringSolution {
        m_tot: model.m_tot,
        parity: model.parity,
        field_kv_cm,
        b_gauss,
        e_coll,
        channels,
        raw,
    })
}

/// End-to-end solve of one (M_tot, parity) block: monomers, basis, couplings, propagation.
pub fn solve_block(
    params: &MoleculeParams,
    field_kv_cm: f64,
    b_gauss: f64,
    e_coll: f64,
    spec: &BasisSpec,
    opts: &InteractionOptions,
    config: &PropagationConfig,
) -> Result<ScatteringSolution> {
    let ms = MonomerSet::new(
        params,
        field_kv_cm,
        b_gauss,
        spec.ntilde_max,
        spec.ntilde_max,
        spec.include_spin,
    )?;
    let model = CouplingModel::build(&ms, spec, opts)?;
    solve_model(&model, e_coll, field_kv_cm, b_gauss, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Diagonal thresholds + centrifugal + user potential.
    struct Toy<F: Fn(f64) -> DMatrix<f64>> {
        mu: f64,
        th: Vec<f64>,
        ls: Vec<u32>,
        v: F,
    }

    impl<F: Fn(f64) -> DMatrix<f64>> RadialProblem for Toy<F> {
        fn dim(&self) -> usize {
            self.th.len()
        }
        fn reduced_mass(&self) -> f64 {
            self.mu
        }
        fn thresholds(&self) -> Vec<f64> {
            self.th.clone()
        }
        fn l_values(&self) -> Vec<u32> {
            self.ls.clone()
        }
        fn w_into(&self, r: f64, w: &mut DMatrix<f64>) {
            w.copy_from(&(self.v)(r));
            for i in 0..self.th.len() {
                let l = self.ls[i] as f64;
                w[(i, i)] += self.th[i] + l * (l + 1.0) / (2.0 * self.mu * r * r);
            }
        }
        fn dw_dr(&self, r: f64) -> DMatrix<f64> {
            let d = 1e-5 * r;
            let n = self.dim();
            let (mut a, mut b) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
            self.w_into(r + d, &mut a);
            self.w_into(r - d, &mut b);
            (a - b) / (2.0 * d)
        }
    }

    fn free(n: usize) -> impl Fn(f64) -> DMatrix<f64> {
        move |_| DMatrix::zeros(n, n)
    }

    fn cfg() -> PropagationConfig {
        PropagationConfig {
            r_absorb: 5.0,
            r_mid: 40.0,
            r_max: 200.0,
            inner_step: 0.01,
            ..Default::default()
        }
    }

    #[test]
    fn free_plane_wave_is_invariant() {
        let p = Toy {
            mu: 1.0,
            th: vec![0.0],
            ls: vec![0],
            v: free(1),
        };
        let e = 0.3;
        let y0 = absorbing_initial_condition(&p, 5.0, e).unwrap();
        let k = (2.0 * e).sqrt();
        assert!((y0[(0, 0)] - Complex64::new(0.0, -k)).norm() < 1e-14);
        let y = propagate(&y0, &p, e, 5.0, 120.0, &cfg()).unwrap();
        assert!(
            (y[(0, 0)] - Complex64::new(0.0, -k)).norm() < 1e-10,
            "{}",
            y[(0, 0)]
        );
    }

    #[test]
    fn uncoupled_absorbing_condition_is_per_channel_wkb() {
        // V_j = -c_j / r^3 on distinct thresholds
        let p = Toy {
            mu: 2.0,
            th: vec![0.0, -0.01],
            ls: vec![0, 0],
            v: |r: f64| {
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    -3.0 / r.powi(3),
                    -5.0 / r.powi(3),
                ]))
            },
        };
        let (r, e) = (6.0, 0.001);
        let y = absorbing_initial_condition(&p, r, e).unwrap();
        assert!(y[(0, 1)].norm() < 1e-14 && y[(1, 0)].norm() < 1e-14);
        for (j, (c, t)) in [(3.0, 0.0), (5.0, -0.01)].into_iter().enumerate() {
            let w = t - c / r.powi(3);
            let wp = 3.0 * c / r.powi(4);
            let k2 = 4.0 * (e - w);
            let expect = Complex64::new(2.0 * wp / (2.0 * k2), -k2.sqrt());
            assert!(
                (y[(j, j)] - expect).norm() < 1e-8 * expect.norm(),
                "{j}: {} vs {expect}",
                y[(j, j)]
            );
        }
    }

    #[test]
    fn hard_wall_reflection_phase() {
        let p = Toy {
            mu: 1.0,
            th: vec![0.0],
            ls: vec![0],
            v: free(1),
        };
        let e: f64 = 0.05;
        let k = (2.0 * e).sqrt();
        let c = PropagationConfig {
            absorbing: false,
            ..cfg()
        };
        let sol = solve_problem(&p, e, 0.0, &c).unwrap();
        let expect = Complex64::new(0.0, -2.0 * k * c.r_absorb).exp();
        assert!(
            (sol.s[(0, 0)] - expect).norm() < 1e-8,
            "{} vs {expect}",
            sol.s[(0, 0)]
        );
    }

    fn square_well(v0: f64, edge: f64) -> impl Fn(f64) -> DMatrix<f64> {
        move |r: f64| {
            let v = if (r - edge).abs() < 1e-9 {
                -0.5 * v0
            } else if r < edge {
                -v0
            } else {
                0.0
            };
            DMatrix::from_element(1, 1, v)
        }
    }

    #[test]
    fn square_well_phase_shift() {
        let (v0, e, mu) = (0.8, 0.02, 1.0);
        let r0 = 5.0;
        let edge = r0 + 400.0 * 0.01; // on a sector boundary
        let p = Toy {
            mu,
            th: vec![0.0],
            ls: vec![0],
            v: square_well(v0, edge),
        };
        let c = PropagationConfig {
            absorbing: false,
            inner_step: 0.01,
            ..cfg()
        };
        let sol = solve_problem(&p, e, 0.0, &c).unwrap();
        let k = (2.0 * mu * e).sqrt();
        let kk = (2.0 * mu * (e + v0)).sqrt();
        let delta = (k * (kk * (edge - r0)).tan() / kk).atan() - k * edge;
        let expect = Complex64::new(0.0, 2.0 * delta).exp();
        assert!(
            (sol.s[(0, 0)] - expect).norm() < 1e-8,
            "{} vs {expect}",
            sol.s[(0, 0)]
        );
    }

    #[test]
    fn step_halving_fourth_order() {
        let p = coupled_problem();
        let e = 0.001;
        let s = |h: f64| {
            let c = PropagationConfig {
                inner_step: h,
                step_energy_bound: 10.0,
                ..cfg()
            };
            let y0 = absorbing_initial_condition(&p, c.r_absorb, e).unwrap();
            let y = propagate(&y0, &p, e, c.r_absorb, c.r_mid, &c).unwrap();
            y[(0, 0)]
        };
        let (a, b, c) = (s(0.05), s(0.025), s(0.0125));
        let ratio = (a - b).norm() / (b - c).norm();
        assert!(ratio > 12.0 && ratio < 20.0, "convergence ratio {ratio}");
    }

    fn coupled(n: usize) -> impl Fn(f64) -> DMatrix<f64> {
        move |r: f64| {
            DMatrix::from_fn(n, n, |i, j| {
                let c = 1.0 + 0.3 * (i + j) as f64;
                if i == j {
                    -c * 40.0 / r.powi(3) - 2.0 * (-(r - 8.0)).exp()
                } else {
                    0.5 * c * 10.0 / r.powi(3) + 0.1 * (-(r - 8.0) * 0.7).exp()
                }
            })
        }
    }

    fn coupled_problem() -> Toy<impl Fn(f64) -> DMatrix<f64>> {
        Toy {
            mu: 5.0,
            th: vec![0.0, 0.0, -0.004, -0.01],
            ls: vec![0, 2, 2, 4],
            v: coupled(4),
        }
    }

    fn all_incoming(absorbing: bool) -> CMatrix {
        let p = coupled_problem();
        let c = PropagationConfig { absorbing, ..cfg() };
        let (e, r_max) = (0.001, 3000.0);
        let y0 = if absorbing {
            absorbing_initial_condition(&p, c.r_absorb, e).unwrap()
        } else {
            hard_wall_initial_condition(4)
        };
        let y = propagate(&y0, &p, e, c.r_absorb, r_max, &c).unwrap();
        let e_kin: Vec<f64> = p.th.iter().map(|t| e - t).collect();
        let (open, s) =
            match_log_derivative(&y, &p.ls, &e_kin, 2.0 * p.mu, r_max, &[0, 1, 2, 3]).unwrap();
        assert_eq!(open.len(), 4);
        s
    }

    #[test]
    fn hard_wall_is_unitary_and_symmetric() {
        let s = all_incoming(false);
        for d in unitarity(&s) {
            assert!(d.abs() < 1e-8, "{d}");
        }
        assert!((&s - s.transpose()).camax() < 1e-6);
    }

    #[test]
    fn absorbing_removes_flux_and_stays_symmetric() {
        let s = all_incoming(true);
        for d in unitarity(&s) {
            assert!(d > 0.0 && d < 1.0, "{d}");
        }
        assert!((&s - s.transpose()).camax() < 1e-6);
    }

    #[test]
    fn elimination_matches_full_propagation() {
        let p = coupled_problem();
        let full = PropagationConfig {
            eliminate_decoupled: false,
            r_max: 3000.0,
            ..cfg()
        };
        let elim = PropagationConfig {
            eliminate_decoupled: true,
            decoupling_tolerance: 1e-7,
            ..full.clone()
        };
        let a = solve_problem(&p, 0.001, 0.0, &full).unwrap();
        let b = solve_problem(&p, 0.001, 0.0, &elim).unwrap();
        assert!(b.diagnostics.r_decoupled.is_some());
        assert_eq!(a.columns, b.columns);
        for (q, &col) in a.columns.iter().enumerate() {
            for row in 0..a.open.len() {
                let d = (a.s[(row, col)] - b.s[(row, q)]).norm();
                assert!(
                    d < 1e-6,
                    "row {row} col {q}: {} vs {}",
                    a.s[(row, col)],
                    b.s[(row, q)]
                );
            }
        }
    }

    #[test]
    fn coupling_at_r_max_is_reported() {
        let p = Toy {
            mu: 1.0,
            th: vec![0.0, 0.0],
            ls: vec![0, 0],
            v: |_r: f64| DMatrix::from_element(2, 2, 0.01),
        };
        let c = PropagationConfig {
            eliminate_decoupled: false,
            ..cfg()
        };
        assert!(matches!(
            solve_problem(&p, 0.001, 0.0, &c),
            Err(Error::Matching(_))
        ));
    }
}
