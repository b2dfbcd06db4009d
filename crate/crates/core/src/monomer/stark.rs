use super::{Composition, FieldDressedState, FieldPoint, MoleculeParams, MonomerLabel};
use crate::angular::c_tensor_element;
use crate::{units, Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Rotor + Stark Hamiltonian in the m_n block over |n m_n⟩, n = |m_n|..=n_max.
pub fn stark_hamiltonian(
    params: &MoleculeParams,
    field_kv_cm: f64,
    mn: i32,
    n_max: u32,
) -> Result<DMatrix<f64>> {
    if (n_max as i32) < mn.abs() {
        return Err(Error::InvalidInput(format!(
            "n_max = {n_max} < |m_n| = {}",
            mn.abs()
        )));
    }
    if !(field_kv_cm >= 0.0) {
        return Err(Error::InvalidInput(format!("negative field {field_kv_cm}")));
    }
    let f = units::kv_cm_to_au(field_kv_cm);
    let n_min = mn.unsigned_abs();
    let dim = (n_max - n_min + 1) as usize;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let n = (n_min as usize + i) as f64;
        h[(i, i)] = params.b * n * (n + 1.0);
        if i + 1 < dim {
            let n = (n_min as usize + i) as i32;
            let v = -params.mu * f * c_tensor_element(n + 1, mn, 1, 0, n, mn);
            h[(i + 1, i)] = v;
            h[(i, i + 1)] = v;
        }
    }
    Ok(h)
}

/// Eigenvalues ascending with eigenvectors fixed to a positive largest component.
pub(crate) fn sorted_eigen(h: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = h.nrows();
    if h.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen("non-finite matrix".into()));
    }
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).clone_owned();
        let big = col
            .iter()
            .copied()
            .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            col.neg_mut();
        }
        vecs.set_column(k, &col);
    }
    Ok((vals, vecs))
}

fn block_states(
    params: &MoleculeParams,
    field_kv_cm: f64,
    mn: i32,
    n_max: u32,
) -> Result<Vec<FieldDressedState>> {
    let h = stark_hamiltonian(params, field_kv_cm, mn, n_max)?;
    let (vals, vecs) = sorted_eigen(h)?;
    let n_min = mn.unsigned_abs();
    Ok(vals
        .iter()
        .enumerate()
        .map(|(k, &e)| FieldDressedState {
            label: MonomerLabel::rotor(n_min + k as u32, mn),
            energy: e,
            composition: Composition::FreeRotor {
                n_min,
                coeffs: vecs.column(k).iter().copied().collect(),
            },
            field: FieldPoint {
                e_kv_cm: field_kv_cm,
                b_gauss: 0.0,
            },
            mf: None,
            ambiguous: false,
        })
        .collect())
}

/// All Stark-dressed rotor states with n ≤ n_max, sorted by (ñ, m_n).
pub fn field_dressed_states(
    params: &MoleculeParams,
    field_kv_cm: f64,
    n_max: u32,
) -> Result<Vec<FieldDressedState>> {
    params.validate()?;
    let mut out = Vec::new();
    let nm = n_max as i32;
    for mn in -nm..=nm {
        out.extend(block_states(params, field_kv_cm, mn, n_max)?);
    }
    out.sort_by_key(|s| (s.label.ntilde, s.label.mn));
    Ok(out)
}

/// Space-fixed dipole μ⟨C¹₀⟩ = −∂E/∂F in e·a0.
pub fn induced_dipole(state: &FieldDressedState, params: &MoleculeParams) -> f64 {
    match &state.composition {
        Composition::FreeRotor { n_min, coeffs } => {
            let m = state.label.mn;
            let mut d = 0.0;
            for (i, ci) in coeffs.iter().enumerate() {
                let n = (*n_min as usize + i) as i32;
                for (j, cj) in coeffs.iter().enumerate().skip(i.saturating_sub(1)).take(3) {
                    let np = (*n_min as usize + j) as i32;
                    d += ci * cj * c_tensor_element(np, m, 1, 0, n, m);
                }
            }
            params.mu * d
        }
        Composition::Product { .. } => {
            panic!("induced_dipole expects a spin-free dressed state")
        }
    }
}

pub(crate) fn rotor_energy(
    params: &MoleculeParams,
    field_kv_cm: f64,
    label: MonomerLabel,
    n_max: u32,
) -> Result<f64> {
    let h = stark_hamiltonian(params, field_kv_cm, label.mn, n_max)?;
    let (vals, _) = sorted_eigen(h)?;
    let k = (label.ntilde as i32 - label.mn.abs()) as usize;
    vals.get(k).copied().ok_or_else(|| {
        Error::InvalidInput(format!("state {label} not in basis with n_max = {n_max}"))
    })
}

/// Field where two pair thresholds cross, found by bisection to 1e-5 kV/cm.
pub fn pair_threshold_crossing(
    params: &MoleculeParams,
    pair_a: (MonomerLabel, MonomerLabel),
    pair_b: (MonomerLabel, MonomerLabel),
    bracket: (f64, f64),
) -> Result<f64> {
    pair_threshold_crossing_at(params, pair_a, pair_b, bracket, 0.0, 20)
}

/// As [`pair_threshold_crossing`] with a magnetic field (G) and monomer basis size.
pub fn pair_threshold_crossing_at(
    params: &MoleculeParams,
    pair_a: (MonomerLabel, MonomerLabel),
    pair_b: (MonomerLabel, MonomerLabel),
    bracket: (f64, f64),
    b_gauss: f64,
    n_max: u32,
) -> Result<f64> {
    let spin = [pair_a.0, pair_a.1, pair_b.0, pair_b.1]
        .iter()
        .any(|l| l.spin.is_some());
    let diff = |f: f64| -> Result<f64> {
        if spin {
            let states = super::spin_dressed_states(params, f, b_gauss, n_max)?;
            let e = |l: MonomerLabel| -> Result<f64> {
                states
                    .iter()
                    .find(|s| s.label == l)
                    .map(|s| s.energy)
                    .ok_or_else(|| Error::InvalidInput(format!("no spin-dressed state {l}")))
            };
            Ok(e(pair_a.0)? + e(pair_a.1)? - e(pair_b.0)? - e(pair_b.1)?)
        } else {
            let e = |l| rotor_energy(params, f, l, n_max);
            Ok(e(pair_a.0)? + e(pair_a.1)? - e(pair_b.0)? - e(pair_b.1)?)
        }
    };
    let (mut lo, mut hi) = bracket;
    let mut flo = diff(lo)?;
    let fhi = diff(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        let fm = diff(mid)?;
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fields in `bracket` where a spin-changing (0,0)+(2,0) pair threshold crosses the
/// pair `incoming`+`incoming`, sorted by field. Pairs whose spin functions both equal
/// the incoming one are left out.
pub fn spin_channel_openings(
    params: &MoleculeParams,
    incoming: MonomerLabel,
    bracket: (f64, f64),
    b_gauss: f64,
    n_max: u32,
) -> Result<Vec<(MonomerLabel, MonomerLabel, f64)>> {
    let spin_in = incoming.spin.ok_or_else(|| {
        Error::InvalidInput(format!("incoming state {incoming} carries no spin label"))
    })?;
    let states = super::spin_dressed_states(params, 0.5 * (bracket.0 + bracket.1), b_gauss, n_max)?;
    let pick = |n: u32| {
        states
            .iter()
            .filter(move |s| s.label.ntilde == n && s.label.mn == 0)
            .map(|s| s.label)
    };
    let mut out = Vec::new();
    for a in pick(0) {
        for b in pick(2) {
            if a.spin == Some(spin_in) && b.spin == Some(spin_in) {
                continue;
            }
            match pair_threshold_crossing_at(
                params,
                (incoming, incoming),
                (a, b),
                bracket,
                b_gauss,
                n_max,
            ) {
                Ok(f) => out.push((a, b, f)),
                Err(Error::NoSignChange { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.sort_by(|x, y| x.2.total_cmp(&y.2));
    Ok(out)
}
