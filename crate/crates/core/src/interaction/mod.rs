//! R-dependent coupled-channel interaction: dipole-dipole C₃ couplings,
//! electronic dispersion, Van Vleck terms and centrifugal energies.

mod adiabats;
mod elements;
mod vanvleck;

pub use adiabats::{adiabatic_energies, adiabats, Adiabats};
pub use elements::{ElementEvaluator, RotorDipoles};
pub use vanvleck::{vanvleck_dd, vanvleck_spin};

use crate::pair_basis::{
    build_pair_basis, partition_classes, BasisSpec, Channel, MonomerSet, PairLevel, Parity,
};
use crate::{units, Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionOptions {
    /// Isotropic electronic dispersion C₆, E_h a0⁶.
    pub c6_elec: f64,
    /// Smallest allowed Van Vleck energy denominator, E_h.
    pub vv_floor: f64,
    /// Include class-2 channels through the Van Vleck transformation.
    pub vanvleck: bool,
}

impl Default for InteractionOptions {
    fn default() -> Self {
        Self {
            c6_elec: 2300.0,
            vv_floor: units::ghz_to_au(1.0),
            vanvleck: true,
        }
    }
}

/// One explicit channel of a coupling model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelChannel {
    /// Pair level with the largest weight (exact in spin-free runs).
    pub level: PairLevel,
    pub l: u32,
    pub ml: i32,
    /// Asymptotic energy relative to the incoming pair level, E_h.
    pub threshold: f64,
}

/// R-independent coefficient matrices whose contraction gives W(R).
#[derive(Clone, Debug)]
pub struct CouplingModel {
    pub channels: Vec<ModelChannel>,
    pub thresholds: Vec<f64>,
    pub c3: DMatrix<f64>,
    pub c6: DMatrix<f64>,
    pub c3_spin: DMatrix<f64>,
    pub centrifugal: Vec<f64>,
    pub reduced_mass: f64,
    pub m_tot: i32,
    pub parity: Parity,
    pub incoming: PairLevel,
    pub warnings: Vec<String>,
}

fn same_block(channels: &[Channel]) -> Result<()> {
    if let Some(c0) = channels.first() {
        let (m, p) = (c0.m_tot(), Parity::of(c0.l));
        if channels
            .iter()
            .any(|c| c.m_tot() != m || Parity::of(c.l) != p)
        {
            return Err(Error::InvalidInput(
                "channels from different (M_tot, parity) blocks".into(),
            ));
        }
    }
    Ok(())
}

/// H_dd coefficients of R⁻³ over one block of channels.
pub fn hdd_matrix(ms: &MonomerSet, channels: &[Channel]) -> Result<DMatrix<f64>> {
    same_block(channels)?;
    let l_max = channels.iter().map(|c| c.l).max().unwrap_or(0);
    let ev = ElementEvaluator::new(ms, l_max);
    let n = channels.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = ev.hdd(&channels[i], &channels[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

/// H_dd coefficients between two channel lists of one block.
pub fn hdd_cross(ms: &MonomerSet, rows: &[Channel], cols: &[Channel]) -> Result<DMatrix<f64>> {
    let all: Vec<Channel> = rows.iter().chain(cols).cloned().collect();
    same_block(&all)?;
    let l_max = all.iter().map(|c| c.l).max().unwrap_or(0);
    let ev = ElementEvaluator::new(ms, l_max);
    Ok(DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        ev.hdd(&rows[i], &cols[j])
    }))
}

/// W(R) = thresholds + centrifugal/R² + (C₃ + C₃^spin)/R³ + C₆/R⁶.
pub fn assemble_w(model: &CouplingModel, r: f64) -> Result<DMatrix<f64>> {
    model.assemble_w(r)
}

impl CouplingModel {
    pub fn dim(&self) -> usize {
        self.thresholds.len()
    }

    /// Builds the explicit-channel model of one block from a basis specification.
    pub fn build(ms: &MonomerSet, spec: &BasisSpec, opts: &InteractionOptions) -> Result<Self> {
        let channels = build_pair_basis(spec, ms)?;
        let part = partition_classes(&channels, spec)?;
        let (c1, c2) = (&part.class1, &part.class2);
        let l_max = channels.iter().map(|c| c.l).max().unwrap_or(0);
        let ev = ElementEvaluator::new(ms, l_max);
        let n = c1.len();
        let mut c3 = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = ev.hdd(&c1[i], &c1[j]);
                c3[(i, j)] = v;
                c3[(j, i)] = v;
            }
        }
        let mut c6 = DMatrix::zeros(n, n);
        let mut c3_spin = DMatrix::zeros(n, n);
        if opts.vanvleck && !c2.is_empty() {
            let v12 = DMatrix::from_fn(n, c2.len(), |i, k| ev.hdd(&c1[i], &c2[k]));
            c6 += vanvleck_dd(c1, c2, &v12, opts.vv_floor)?;
            if let Some(ops) = &ms.spin_ops {
                let s_op = &ops.spin_rotation + &ops.anisotropic;
                let s12 = DMatrix::from_fn(n, c2.len(), |i, k| ev.one_body(&s_op, &c1[i], &c2[k]));
                c3_spin += vanvleck_spin(c1, c2, &v12, &s12, opts.vv_floor)?;
            }
        }
        for i in 0..n {
            c6[(i, i)] -= opts.c6_elec;
        }
        let mu = ms.params.reduced_mass();
        let mut model = CouplingModel {
            channels: c1
                .iter()
                .map(|c| ModelChannel {
                    level: c.level(),
                    l: c.l,
                    ml: c.ml,
                    threshold: c.threshold,
                })
                .collect(),
            thresholds: c1.iter().map(|c| c.threshold).collect(),
            c3,
            c6,
            c3_spin,
            centrifugal: c1
                .iter()
                .map(|c| (c.l * (c.l + 1)) as f64 / (2.0 * mu))
                .collect(),
            reduced_mass: mu,
            m_tot: spec.m_tot,
            parity: spec.parity,
            incoming: spec.incoming,
            warnings: part.warnings,
        };
        if let Some(ops) = &ms.spin_ops {
            let h1 = ops.total();
            let internal = DMatrix::from_fn(n, n, |i, j| {
                ev.one_body(&h1, &c1[i], &c1[j]) + if i == j { c1[i].threshold } else { 0.0 }
            });
            model.to_internal_eigenbasis(&internal, c1)?;
        }
        Ok(model)
    }

    /// Rotates to eigenvectors of the asymptotic internal Hamiltonian, separately per (L, M_L).
    fn to_internal_eigenbasis(&mut self, internal: &DMatrix<f64>, c1: &[Channel]) -> Result<()> {
        let n = c1.len();
        let mut blocks: BTreeMap<(u32, i32), Vec<usize>> = BTreeMap::new();
        for (i, c) in c1.iter().enumerate() {
            blocks.entry((c.l, c.ml)).or_default().push(i);
        }
        let mut t = DMatrix::zeros(n, n);
        let mut new_thresholds = vec![0.0; n];
        let mut new_channels = self.channels.clone();
        for ((l, ml), idx) in blocks {
            let m = idx.len();
            let hb = DMatrix::from_fn(m, m, |r, c| internal[(idx[r], idx[c])]);
            let e = SymmetricEigen::new(hb);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
            for (k, &o) in order.iter().enumerate() {
                let col = e.eigenvectors.column(o);
                let (dom, big) = col
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                    .unwrap();
                let sign = if *big < 0.0 { -1.0 } else { 1.0 };
                let target = idx[k];
                for (r, &src) in idx.iter().enumerate() {
                    t[(src, target)] = sign * col[r];
                }
                new_thresholds[target] = e.eigenvalues[o];
                new_channels[target] = ModelChannel {
                    level: c1[idx[dom]].level(),
                    l,
                    ml,
                    threshold: e.eigenvalues[o],
                };
            }
        }
        let e_ref = new_channels
            .iter()
            .find(|c| c.level == self.incoming)
            .map(|c| c.threshold)
            .ok_or_else(|| {
                Error::InvalidInput("incoming pair level lost in the spin eigenbasis".into())
            })?;
        for (c, th) in new_channels.iter_mut().zip(new_thresholds.iter_mut()) {
            *th -= e_ref;
            c.threshold = *th;
        }
        let tt = t.transpose();
        self.c3 = &tt * &self.c3 * &t;
        self.c6 = &tt * &self.c6 * &t;
        self.c3_spin = &tt * &self.c3_spin * &t;
        self.thresholds = new_thresholds;
        self.channels = new_channels;
        Ok(())
    }

    pub fn assemble_w(&self, r: f64) -> Result<DMatrix<f64>> {
        let mut w = DMatrix::zeros(self.dim(), self.dim());
        self.assemble_w_into(r, &mut w)?;
        Ok(w)
    }

    pub fn assemble_w_into(&self, r: f64, w: &mut DMatrix<f64>) -> Result<()> {
        if !(r > 0.0) {
            return Err(Error::InvalidInput(format!("R must be positive, got {r}")));
        }
        let (r3, r6) = (r.powi(-3), r.powi(-6));
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                w[(i, j)] = (self.c3[(i, j)] + self.c3_spin[(i, j)]) * r3 + self.c6[(i, j)] * r6;
            }
            w[(j, j)] += self.thresholds[j] + self.centrifugal[j] / (r * r);
        }
        Ok(())
    }

    /// dW/dR.
    pub fn dw_dr(&self, r: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut w = DMatrix::zeros(n, n);
        let (r4, r7) = (r.powi(-4), r.powi(-7));
        for j in 0..n {
            for i in 0..n {
                w[(i, j)] = -3.0 * (self.c3[(i, j)] + self.c3_spin[(i, j)]) * r4
                    - 6.0 * self.c6[(i, j)] * r7;
            }
            w[(j, j)] -= 2.0 * self.centrifugal[j] / (r * r * r);
        }
        w
    }

    /// Channels belonging to the incoming pair level.
    pub fn incoming_channels(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.channels[i].level == self.incoming)
            .collect()
    }

    /// Model restricted to a subset of channels (no Van Vleck correction for the removed ones).
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let sub = |m: &DMatrix<f64>| {
            DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
        };
        CouplingModel {
            channels: keep.iter().map(|&i| self.channels[i].clone()).collect(),
            thresholds: keep.iter().map(|&i| self.thresholds[i]).collect(),
            c3: sub(&self.c3),
            c6: sub(&self.c6),
            c3_spin: sub(&self.c3_spin),
            centrifugal: keep.iter().map(|&i| self.centrifugal[i]).collect(),
            reduced_mass: self.reduced_mass,
            m_tot: self.m_tot,
            parity: self.parity,
            incoming: self.incoming,
            warnings: self.warnings.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomer::{MoleculeParams, MonomerLabel};
    use crate::pair_basis::{preset, Class1Selector};

    fn minimal(field: f64, l_max: u32) -> (MonomerSet, BasisSpec) {
        let ms = MonomerSet::new(&MoleculeParams::caf(), field, 0.0, 5, 5, false).unwrap();
        let spec = BasisSpec::new(5, l_max, 0, Parity::Even, preset("minimal").unwrap().0);
        (ms, spec)
    }

    #[test]
    fn c3_selection_rules() {
        let (ms, spec) = minimal(24.5, 6);
        let ch = build_pair_basis(&spec, &ms).unwrap();
        let m = hdd_matrix(&ms, &ch).unwrap();
        for i in 0..ch.len() {
            for j in 0..ch.len() {
                let (a, b) = (&ch[i], &ch[j]);
                let dl = (a.l as i32 - b.l as i32).abs();
                if dl > 2 || dl == 1 || (a.ml - b.ml).abs() > 2 || (a.l == 0 && b.l == 0) {
                    assert_eq!(m[(i, j)], 0.0);
                }
                assert!((m[(i, j)] - m[(j, i)]).abs() < 1e-14 * m[(i, j)].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn vv_selection_rules_and_symmetry() {
        let (ms, spec) = minimal(24.5, 8);
        let model = CouplingModel::build(&ms, &spec, &InteractionOptions::default()).unwrap();
        let n = model.dim();
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&model.channels[i], &model.channels[j]);
                let dl = (a.l as i32 - b.l as i32).abs();
                if dl > 4 || dl % 2 == 1 || (a.ml - b.ml).abs() > 4 {
                    assert_eq!(model.c6[(i, j)], 0.0);
                }
                assert!(
                    (model.c6[(i, j)] - model.c6[(j, i)]).abs() <= 1e-10 * model.c6[(i, j)].abs()
                );
            }
        }
    }

    #[test]
    fn full_partition_has_no_vanvleck() {
        let ms = MonomerSet::new(&MoleculeParams::caf(), 23.0, 0.0, 3, 3, false).unwrap();
        let spec = BasisSpec::new(3, 2, 0, Parity::Even, Class1Selector::All);
        let model = CouplingModel::build(&ms, &spec, &InteractionOptions::default()).unwrap();
        for i in 0..model.dim() {
            for j in 0..model.dim() {
                let expect = if i == j { -2300.0 } else { 0.0 };
                assert_eq!(model.c6[(i, j)], expect);
            }
        }
    }

    #[test]
    fn w_limits() {
        let (ms, spec) = minimal(23.0, 4);
        let model = CouplingModel::build(&ms, &spec, &InteractionOptions::default()).unwrap();
        let w = model.assemble_w(1e9).unwrap();
        for i in 0..model.dim() {
            assert!((w[(i, i)] - model.thresholds[i]).abs() < 1e-15);
        }
        assert!(model.assemble_w(0.0).is_err());
        let inc = model.incoming_channels();
        assert_eq!(
            model.channels[inc[0]].level,
            PairLevel::new(MonomerLabel::rotor(1, 0), MonomerLabel::rotor(1, 0))
        );
        assert_eq!(model.thresholds[inc[0]], 0.0);
    }
}
