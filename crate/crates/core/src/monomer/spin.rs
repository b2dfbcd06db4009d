use super::stark::sorted_eigen;
use super::{Composition, FieldDressedState, FieldPoint, MoleculeParams, MonomerLabel, SpinLabel};
use crate::angular::{c_tensor_element, clebsch_gordan, clebsch_gordan_int, HalfIntegerAM};
use crate::{units, Error, Result};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// The four |g m_g⟩ functions of two spins ½, in the order used by every product basis.
pub fn spin_labels() -> [SpinLabel; 4] {
    [
        SpinLabel { g: 0, mg: 0 },
        SpinLabel { g: 1, mg: -1 },
        SpinLabel { g: 1, mg: 0 },
        SpinLabel { g: 1, mg: 1 },
    ]
}

fn spin_half_component(q: i32) -> [[f64; 2]; 2] {
    // index 0: m = +1/2, index 1: m = -1/2
    let r = std::f64::consts::FRAC_1_SQRT_2;
    match q {
        0 => [[0.5, 0.0], [0.0, -0.5]],
        1 => [[0.0, -r], [0.0, 0.0]],
        -1 => [[0.0, 0.0], [r, 0.0]],
        _ => unreachable!(),
    }
}

fn kron(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |r, c| a[r / 2][c / 2] * b[r % 2][c % 2])
}

const ID2: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// Uncoupled |m_s m_i⟩ → coupled |g m_g⟩ transformation (columns are |g m_g⟩).
fn coupling_matrix() -> DMatrix<f64> {
    let h = HalfIntegerAM::HALF;
    let ms = [h, -h];
    DMatrix::from_fn(4, 4, |r, c| {
        let l = spin_labels()[c];
        clebsch_gordan(
            h,
            ms[r / 2],
            h,
            ms[r % 2],
            HalfIntegerAM::integer(l.g as i32),
            HalfIntegerAM::integer(l.mg),
        )
    })
}

/// Spin-space operators in the |g m_g⟩ basis: s_q, i_q, T²_q(i,s) and i·s.
struct SpinSpace {
    s: [DMatrix<f64>; 3],
    i: [DMatrix<f64>; 3],
    t2: [DMatrix<f64>; 5],
    i_dot_s: DMatrix<f64>,
}

fn qi(q: i32) -> usize {
    (q + 1) as usize
}

impl SpinSpace {
    fn new() -> Self {
        let u = coupling_matrix();
        let tr = |m: DMatrix<f64>| u.transpose() * m * &u;
        let s: [DMatrix<f64>; 3] =
            std::array::from_fn(|k| kron(&spin_half_component(k as i32 - 1), &ID2));
        let i: [DMatrix<f64>; 3] =
            std::array::from_fn(|k| kron(&ID2, &spin_half_component(k as i32 - 1)));
        let t2: [DMatrix<f64>; 5] = std::array::from_fn(|k| {
            let q = k as i32 - 2;
            let mut m = DMatrix::zeros(4, 4);
            for q1 in -1..=1 {
                let q2 = q - q1;
                if q2.abs() > 1 {
                    continue;
                }
                let cg = clebsch_gordan_int(1, q1, 1, q2, 2, q);
                m += cg * &i[qi(q1)] * &s[qi(q2)];
            }
            m
        });
        let mut i_dot_s = DMatrix::zeros(4, 4);
        for q in -1..=1 {
            let ph = if q % 2 == 0 { 1.0 } else { -1.0 };
            i_dot_s += ph * &i[qi(q)] * &s[qi(-q)];
        }
        Self {
            s: s.map(tr),
            i: i.map(tr),
            t2: t2.map(tr),
            i_dot_s: tr(i_dot_s),
        }
    }
}

/// ⟨a'|n_q|a⟩ between spin-free dressed rotor states.
fn rotor_n_q(a: &FieldDressedState, b: &FieldDressedState, q: i32) -> f64 {
    let (
        Composition::FreeRotor {
            n_min: na,
            coeffs: ca,
        },
        Composition::FreeRotor {
            n_min: nb,
            coeffs: cb,
        },
    ) = (&a.composition, &b.composition)
    else {
        panic!("rotor operators need spin-free dressed states");
    };
    let (ma, mb) = (a.label.mn, b.label.mn);
    if ma != mb + q {
        return 0.0;
    }
    let mut acc = 0.0;
    for (i, c) in cb.iter().enumerate() {
        let n = *nb as i64 + i as i64;
        let j = n - *na as i64;
        if j < 0 || j as usize >= ca.len() {
            continue;
        }
        let nn = (n * (n + 1)) as f64;
        let m = mb as f64;
        let el = match q {
            0 => m,
            1 => -std::f64::consts::FRAC_1_SQRT_2 * (nn - m * (m + 1.0)).max(0.0).sqrt(),
            -1 => std::f64::consts::FRAC_1_SQRT_2 * (nn - m * (m - 1.0)).max(0.0).sqrt(),
            _ => unreachable!(),
        };
        acc += ca[j as usize] * c * el;
    }
    acc
}

/// ⟨a'|C^k_q|a⟩ between spin-free dressed rotor states.
pub(crate) fn rotor_c_q(a: &FieldDressedState, b: &FieldDressedState, k: i32, q: i32) -> f64 {
    let (
        Composition::FreeRotor {
            n_min: na,
            coeffs: ca,
        },
        Composition::FreeRotor {
            n_min: nb,
            coeffs: cb,
        },
    ) = (&a.composition, &b.composition)
    else {
        panic!("rotor operators need spin-free dressed states");
    };
    let (ma, mb) = (a.label.mn, b.label.mn);
    if ma != mb + q {
        return 0.0;
    }
    let mut acc = 0.0;
    for (j, cp) in ca.iter().enumerate() {
        let np = (*na as usize + j) as i32;
        if *cp == 0.0 {
            continue;
        }
        for (i, c) in cb.iter().enumerate() {
            let n = (*nb as usize + i) as i32;
            if (np - n).abs() > k || (np + n + k) % 2 != 0 {
                continue;
            }
            acc += cp * c * c_tensor_element(np, ma, k, q, n, mb);
        }
    }
    acc
}

/// Individual spin operators over the product basis of dressed rotor states ⊗ |g m_g⟩.
/// Index of |a⟩|σ⟩ is `4 a + σ` with σ in [`spin_labels`] order.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub labels: Vec<MonomerLabel>,
    /// γ ŝ·n̂
    pub spin_rotation: DMatrix<f64>,
    /// t√6 T²(C)·T²(î,ŝ)
    pub anisotropic: DMatrix<f64>,
    /// ζ_F î·ŝ
    pub isotropic: DMatrix<f64>,
    /// c_F î·n̂
    pub nuclear_rotation: DMatrix<f64>,
    /// g_S μ_B B ŝ_z
    pub zeeman: DMatrix<f64>,
}

impl SpinOperators {
    pub fn build(
        params: &MoleculeParams,
        rotor_states: &[FieldDressedState],
        b_gauss: f64,
    ) -> Result<Self> {
        if let Some(first) = rotor_states.first() {
            if rotor_states
                .iter()
                .any(|s| s.field.e_kv_cm != first.field.e_kv_cm)
            {
                return Err(Error::InvalidInput(
                    "rotor states from different electric fields".into(),
                ));
            }
        }
        if rotor_states.iter().any(|s| s.label.spin.is_some()) {
            return Err(Error::InvalidInput(
                "spin operators need spin-free rotor states".into(),
            ));
        }
        let sp = SpinSpace::new();
        let nr = rotor_states.len();
        let dim = 4 * nr;
        let mut labels = Vec::with_capacity(dim);
        for s in rotor_states {
            for l in spin_labels() {
                labels.push(MonomerLabel::with_spin(
                    s.label.ntilde,
                    s.label.mn,
                    l.g,
                    l.mg,
                ));
            }
        }
        let mut sr = DMatrix::zeros(dim, dim);
        let mut an = DMatrix::zeros(dim, dim);
        let mut iso = DMatrix::zeros(dim, dim);
        let mut nr_op = DMatrix::zeros(dim, dim);
        let mut zee = DMatrix::zeros(dim, dim);
        let zb = params.g_s * units::gauss_to_bohr_magneton_energy(b_gauss);
        let sp6 = 6f64.sqrt();
        for (ap, sa) in rotor_states.iter().enumerate() {
            for (a, sb) in rotor_states.iter().enumerate() {
                let dq = sa.label.mn - sb.label.mn;
                let mut nq = [0.0; 3];
                if dq.abs() <= 1 {
                    nq[qi(dq)] = rotor_n_q(sa, sb, dq);
                }
                let c2 = if dq.abs() <= 2 {
                    rotor_c_q(sa, sb, 2, dq)
                } else {
                    0.0
                };
                for s1 in 0..4 {
                    for s2 in 0..4 {
                        let r = 4 * ap + s1;
                        let c = 4 * a + s2;
                        // Σ_q (-1)^q n_{-q} s_q with n_{-q} nonzero only for -q = dq
                        if dq.abs() <= 1 {
                            let q = -dq;
                            let ph = if q % 2 == 0 { 1.0 } else { -1.0 };
                            let n = nq[qi(dq)];
                            sr[(r, c)] += params.spin.gamma * ph * n * sp.s[qi(q)][(s1, s2)];
                            nr_op[(r, c)] += params.spin.c_f * ph * n * sp.i[qi(q)][(s1, s2)];
                        }
                        if dq.abs() <= 2 && c2 != 0.0 {
                            let q = -dq;
                            let ph = if q % 2 == 0 { 1.0 } else { -1.0 };
                            an[(r, c)] +=
                                params.spin.t * sp6 * ph * c2 * sp.t2[(q + 2) as usize][(s1, s2)];
                        }
                        if ap == a {
                            iso[(r, c)] += params.spin.zeta_f * sp.i_dot_s[(s1, s2)];
                            zee[(r, c)] += zb * sp.s[1][(s1, s2)];
                        }
                    }
                }
            }
        }
        Ok(Self {
            labels,
            spin_rotation: sr,
            anisotropic: an,
            isotropic: iso,
            nuclear_rotation: nr_op,
            zeeman: zee,
        })
    }

    pub fn total(&self) -> DMatrix<f64> {
        &self.spin_rotation
            + &self.anisotropic
            + &self.isotropic
            + &self.nuclear_rotation
            + &self.zeeman
    }
}

#[derive(Clone, Debug)]
pub struct SpinHamiltonian {
    pub basis: Vec<MonomerLabel>,
    pub matrix: DMatrix<f64>,
}

impl SpinHamiltonian {
    /// m_f = m_n + m_g of each basis function.
    pub fn mf(&self) -> Vec<i32> {
        self.basis.iter().map(|l| l.projection()).collect()
    }
}

/// Fine, hyperfine and Zeeman Hamiltonian over dressed rotor states ⊗ |g m_g⟩.
pub fn spin_hamiltonian(
    params: &MoleculeParams,
    rotor_states: &[FieldDressedState],
    b_gauss: f64,
) -> Result<SpinHamiltonian> {
    let ops = SpinOperators::build(params, rotor_states, b_gauss)?;
    let m = ops.total();
    Ok(SpinHamiltonian {
        basis: ops.labels,
        matrix: m,
    })
}

/// Eigenstates of the Stark + spin Hamiltonian using dressed rotor states with ñ ≤ min(n_max, 6).
pub fn spin_dressed_states(
    params: &MoleculeParams,
    field_kv_cm: f64,
    b_gauss: f64,
    n_max: u32,
) -> Result<Vec<FieldDressedState>> {
    spin_dressed_states_with(params, field_kv_cm, b_gauss, n_max, n_max.min(6))
}

/// As [`spin_dressed_states`] with an explicit rotor cutoff ñ ≤ `ntilde_cut`.
pub fn spin_dressed_states_with(
    params: &MoleculeParams,
    field_kv_cm: f64,
    b_gauss: f64,
    n_max: u32,
    ntilde_cut: u32,
) -> Result<Vec<FieldDressedState>> {
    let rotor: Vec<FieldDressedState> = super::field_dressed_states(params, field_kv_cm, n_max)?
        .into_iter()
        .filter(|s| s.label.ntilde <= ntilde_cut)
        .collect();
    let h = spin_hamiltonian(params, &rotor, b_gauss)?;
    let mf = h.mf();
    let mut blocks: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &m) in mf.iter().enumerate() {
        blocks.entry(m).or_default().push(i);
    }
    let mut out = Vec::new();
    for (m, idx) in blocks {
        let n = idx.len();
        let mut hb = DMatrix::from_fn(n, n, |r, c| h.matrix[(idx[r], idx[c])]);
        for (k, &i) in idx.iter().enumerate() {
            hb[(k, k)] += rotor[i / 4].energy;
        }
        let (vals, vecs) = sorted_eigen(hb)?;
        for k in 0..n {
            let col = vecs.column(k);
            let mut rotor_w: BTreeMap<(u32, i32), f64> = BTreeMap::new();
            let mut spin_w = [0.0; 4];
            for (r, &i) in idx.iter().enumerate() {
                let w = col[r] * col[r];
                let l = h.basis[i];
                *rotor_w.entry((l.ntilde, l.mn)).or_default() += w;
                spin_w[i % 4] += w;
            }
            let (&(nt, mn), _) = rotor_w.iter().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
            let (si, &sw) = spin_w
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            let sl = spin_labels()[si];
            out.push(FieldDressedState {
                label: MonomerLabel::with_spin(nt, mn, sl.g, sl.mg),
                energy: vals[k],
                composition: Composition::Product {
                    labels: idx.iter().map(|&i| h.basis[i]).collect(),
                    coeffs: col.iter().copied().collect(),
                },
                field: FieldPoint {
                    e_kv_cm: field_kv_cm,
                    b_gauss,
                },
                mf: Some(m),
                ambiguous: sw < 0.5,
            });
        }
    }
    out.sort_by(|a, b| a.label.cmp(&b.label).then(a.energy.total_cmp(&b.energy)));
    Ok(out)
}
