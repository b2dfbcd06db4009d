//! Matrix elements between symmetrized channels.

use crate::angular::{c_tensor_element, clebsch_gordan_int};
use crate::monomer::FieldDressedState;
use crate::pair_basis::{Channel, MonomerSet};
use nalgebra::DMatrix;

/// ⟨a'|C¹_q|a⟩ over dressed rotor states for q = −1, 0, 1.
#[derive(Clone, Debug)]
pub struct RotorDipoles {
    d: [DMatrix<f64>; 3],
}

impl RotorDipoles {
    pub fn new(rotor: &[FieldDressedState]) -> Self {
        let n = rotor.len();
        let d = std::array::from_fn(|k| {
            let q = k as i32 - 1;
            DMatrix::from_fn(n, n, |i, j| {
                crate::monomer::rotor_c_q(&rotor[i], &rotor[j], 1, q)
            })
        });
        Self { d }
    }

    pub fn get(&self, q: i32, ap: usize, a: usize) -> f64 {
        self.d[(q + 1) as usize][(ap, a)]
    }
}

/// ⟨L' M'|C²_{−q}|L M⟩ for |ΔL|, |ΔM| ≤ 2.
#[derive(Clone, Debug)]
struct PartialWaveTable {
    l_max: u32,
    v: Vec<f64>,
}

impl PartialWaveTable {
    fn new(l_max: u32) -> Self {
        let nm = 2 * l_max as usize + 1;
        let mut v = vec![0.0; (l_max as usize + 1) * nm * 25];
        for l in 0..=l_max as i32 {
            for m in -l..=l {
                for dl in -2..=2 {
                    for dm in -2..=2 {
                        let (lp, mp) = (l + dl, m + dm);
                        if lp < 0 || mp.abs() > lp {
                            continue;
                        }
                        // M' = M − q  →  −q = dm
                        let idx = Self::index(l_max, l as u32, m, dl, dm);
                        v[idx] = c_tensor_element(lp, mp, 2, dm, l, m);
                    }
                }
            }
        }
        Self { l_max, v }
    }

    fn index(l_max: u32, l: u32, m: i32, dl: i32, dm: i32) -> usize {
        let nm = 2 * l_max as usize + 1;
        ((l as usize * nm + (m + l_max as i32) as usize) * 5 + (dl + 2) as usize) * 5
            + (dm + 2) as usize
    }

    fn get(&self, lp: u32, mp: i32, l: u32, m: i32) -> f64 {
        let dl = lp as i32 - l as i32;
        let dm = mp - m;
        if dl.abs() > 2 || dm.abs() > 2 || l > self.l_max {
            return 0.0;
        }
        self.v[Self::index(self.l_max, l, m, dl, dm)]
    }
}

/// Evaluates H_dd (R⁻³ coefficient) and one-body spin operators between channels.
pub struct ElementEvaluator<'a> {
    ms: &'a MonomerSet,
    dip: RotorDipoles,
    pw: PartialWaveTable,
    cg: [[f64; 3]; 3],
    mu2: f64,
}

impl<'a> ElementEvaluator<'a> {
    pub fn new(ms: &'a MonomerSet, l_max: u32) -> Self {
        let cg = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let (q1, q2) = (i as i32 - 1, j as i32 - 1);
                clebsch_gordan_int(1, q1, 1, q2, 2, q1 + q2)
            })
        });
        Self {
            ms,
            dip: RotorDipoles::new(&ms.rotor),
            pw: PartialWaveTable::new(l_max + 2),
            cg,
            mu2: ms.params.mu * ms.params.mu,
        }
    }

    fn same_spin(&self, x: usize, y: usize) -> bool {
        self.ms.labels[x].spin == self.ms.labels[y].spin
    }

    /// Unsymmetrized ⟨a' b' L' M'|H_dd R³|a b L M⟩.
    #[allow(clippy::too_many_arguments)]
    fn hdd_product(
        &self,
        ap: usize,
        bp: usize,
        lp: u32,
        mp: i32,
        a: usize,
        b: usize,
        l: u32,
        m: i32,
    ) -> f64 {
        if !self.same_spin(ap, a) || !self.same_spin(bp, b) {
            return 0.0;
        }
        let la = &self.ms.labels;
        let q1 = la[ap].mn - la[a].mn;
        let q2 = la[bp].mn - la[b].mn;
        if q1.abs() > 1 || q2.abs() > 1 {
            return 0.0;
        }
        let q = q1 + q2;
        if mp != m - q {
            return 0.0;
        }
        let ang = self.pw.get(lp, mp, l, m);
        if ang == 0.0 {
            return 0.0;
        }
        let ro = &self.ms.rotor_of;
        let d1 = self.dip.get(q1, ro[ap], ro[a]);
        let d2 = self.dip.get(q2, ro[bp], ro[b]);
        let ph = if q % 2 == 0 { 1.0 } else { -1.0 };
        -(6f64.sqrt())
            * self.mu2
            * ph
            * self.cg[(q1 + 1) as usize][(q2 + 1) as usize]
            * d1
            * d2
            * ang
    }

    /// ⟨c'|H_dd|c⟩·R³ between symmetrized channels.
    pub fn hdd(&self, cp: &Channel, c: &Channel) -> f64 {
        if (cp.l as i32 - c.l as i32).abs() > 2 || (cp.ml - c.ml).abs() > 2 {
            return 0.0;
        }
        let first = self.hdd_product(cp.idx1, cp.idx2, cp.l, cp.ml, c.idx1, c.idx2, c.l, c.ml);
        let second = self.hdd_product(cp.idx1, cp.idx2, cp.l, cp.ml, c.idx2, c.idx1, c.l, c.ml);
        2.0 * cp.norm() * c.norm() * (first + c.exchange_phase as f64 * second)
    }

    /// ⟨c'|h(1) + h(2)|c⟩ for a one-body operator `op` over monomer functions.
    pub fn one_body(&self, op: &DMatrix<f64>, cp: &Channel, c: &Channel) -> f64 {
        if cp.l != c.l || cp.ml != c.ml {
            return 0.0;
        }
        let x = |ap: usize, bp: usize, a: usize, b: usize| {
            let mut v = 0.0;
            if bp == b {
                v += op[(ap, a)];
            }
            if ap == a {
                v += op[(bp, b)];
            }
            v
        };
        let first = x(cp.idx1, cp.idx2, c.idx1, c.idx2);
        let second = x(cp.idx1, cp.idx2, c.idx2, c.idx1);
        2.0 * cp.norm() * c.norm() * (first + c.exchange_phase as f64 * second)
    }
}
