//! Symmetrized two-molecule channel bases and the class-1/class-2 partition.

mod presets;

pub use presets::{preset, PRESET_NAMES};

use crate::monomer::{
    field_dressed_states, spin_labels, FieldDressedState, MoleculeParams, MonomerLabel,
    SpinOperators,
};
use crate::{units, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(l: u32) -> Self {
        if l % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Unordered pair of monomer labels, stored with `a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairLevel {
    pub a: MonomerLabel,
    pub b: MonomerLabel,
}

impl PairLevel {
    pub fn new(x: MonomerLabel, y: MonomerLabel) -> Self {
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    pub fn rotor_part(&self) -> Self {
        Self::new(self.a.rotor_part(), self.b.rotor_part())
    }
}

impl fmt::Display for PairLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.a, self.b)
    }
}

/// Monomer pattern: spin `None` matches every spin function in spin mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomerSelector {
    pub ntilde: u32,
    pub mn: i32,
    pub spin: Option<crate::monomer::SpinLabel>,
}

impl MonomerSelector {
    pub fn matches(&self, l: &MonomerLabel) -> bool {
        self.ntilde == l.ntilde && self.mn == l.mn && (self.spin.is_none() || self.spin == l.spin)
    }
}

impl From<MonomerLabel> for MonomerSelector {
    fn from(l: MonomerLabel) -> Self {
        Self {
            ntilde: l.ntilde,
            mn: l.mn,
            spin: l.spin,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Class1Selector {
    /// Every generated pair level (no Van Vleck partition).
    All,
    /// Pair levels whose monomers both have ñ ≤ the given value.
    MaxNtilde(u32),
    /// Explicit unordered pairs of monomer patterns.
    Levels(Vec<(MonomerSelector, MonomerSelector)>),
}

impl Class1Selector {
    pub fn selects(&self, level: &PairLevel) -> bool {
        match self {
            Class1Selector::All => true,
            Class1Selector::MaxNtilde(n) => level.a.ntilde <= *n && level.b.ntilde <= *n,
            Class1Selector::Levels(v) => v.iter().any(|(x, y)| {
                (x.matches(&level.a) && y.matches(&level.b))
                    || (x.matches(&level.b) && y.matches(&level.a))
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub ntilde_max: u32,
    pub l_max: u32,
    pub m_tot: i32,
    pub parity: Parity,
    pub class1: Class1Selector,
    pub include_spin: bool,
    pub incoming: PairLevel,
    /// Warn when a class-2 threshold lies closer than this (E_h) to a class-1 threshold.
    pub margin: f64,
}

impl BasisSpec {
    pub fn new(
        ntilde_max: u32,
        l_max: u32,
        m_tot: i32,
        parity: Parity,
        class1: Class1Selector,
    ) -> Self {
        Self {
            ntilde_max,
            l_max,
            m_tot,
            parity,
            class1,
            include_spin: false,
            incoming: PairLevel::new(MonomerLabel::rotor(1, 0), MonomerLabel::rotor(1, 0)),
            margin: units::ghz_to_au(3.0),
        }
    }

    pub fn has_partition(&self) -> bool {
        self.class1 != Class1Selector::All
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelClass {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub mono1: MonomerLabel,
    pub mono2: MonomerLabel,
    /// Indices of the monomer functions in the [`MonomerSet`].
    pub idx1: usize,
    pub idx2: usize,
    pub l: u32,
    pub ml: i32,
    /// (−1)^L multiplying the exchanged product.
    pub exchange_phase: i32,
    /// Threshold relative to the incoming pair level, E_h.
    pub threshold: f64,
    pub class: ChannelClass,
}

impl Channel {
    pub fn level(&self) -> PairLevel {
        PairLevel::new(self.mono1, self.mono2)
    }

    pub fn m_tot(&self) -> i32 {
        self.mono1.projection() + self.mono2.projection() + self.ml
    }

    pub fn norm(&self) -> f64 {
        if self.idx1 == self.idx2 {
            0.5
        } else {
            std::f64::consts::FRAC_1_SQRT_2
        }
    }

    /// Expansion over unsymmetrized products |a b L M_L⟩.
    pub fn expansion(&self) -> Vec<((MonomerLabel, MonomerLabel, u32, i32), f64)> {
        let n = self.norm();
        let mut v = vec![((self.mono1, self.mono2, self.l, self.ml), n)];
        let other = (
            (self.mono2, self.mono1, self.l, self.ml),
            n * self.exchange_phase as f64,
        );
        if other.0 == v[0].0 {
            v[0].1 += other.1;
        } else {
            v.push(other);
        }
        v
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}+{} L={} M_L={}",
            self.mono1, self.mono2, self.l, self.ml
        )
    }
}

/// Monomer functions at one field point: dressed rotor states, optionally ⊗ |g m_g⟩.
#[derive(Clone, Debug)]
pub struct MonomerSet {
    pub params: MoleculeParams,
    pub field_kv_cm: f64,
    pub b_gauss: f64,
    pub rotor: Vec<FieldDressedState>,
    pub spin: bool,
    pub labels: Vec<MonomerLabel>,
    /// Spin-free energy of each function.
    pub energies: Vec<f64>,
    /// Rotor state index of each function.
    pub rotor_of: Vec<usize>,
    pub spin_ops: Option<SpinOperators>,
    index: HashMap<MonomerLabel, usize>,
}

impl MonomerSet {
    /// Dressed rotor states from an n_max free-rotor diagonalization, keeping ñ ≤ ntilde_max.
    pub fn new(
        params: &MoleculeParams,
        field_kv_cm: f64,
        b_gauss: f64,
        n_max: u32,
        ntilde_max: u32,
        spin: bool,
    ) -> Result<Self> {
        if n_max < ntilde_max {
            return Err(Error::InvalidInput(format!(
                "n_max {n_max} < ntilde_max {ntilde_max}"
            )));
        }
        let rotor: Vec<FieldDressedState> = field_dressed_states(params, field_kv_cm, n_max)?
            .into_iter()
            .filter(|s| s.label.ntilde <= ntilde_max)
            .collect();
        Self::from_rotor_states(params, rotor, b_gauss, spin)
    }

    pub fn from_rotor_states(
        params: &MoleculeParams,
        rotor: Vec<FieldDressedState>,
        b_gauss: f64,
        spin: bool,
    ) -> Result<Self> {
        let field_kv_cm = rotor.first().map_or(0.0, |s| s.field.e_kv_cm);
        let mut labels = Vec::new();
        let mut energies = Vec::new();
        let mut rotor_of = Vec::new();
        for (i, s) in rotor.iter().enumerate() {
            if spin {
                for sl in spin_labels() {
                    labels.push(MonomerLabel::with_spin(
                        s.label.ntilde,
                        s.label.mn,
                        sl.g,
                        sl.mg,
                    ));
                    energies.push(s.energy);
                    rotor_of.push(i);
                }
            } else {
                labels.push(s.label);
                energies.push(s.energy);
                rotor_of.push(i);
            }
        }
        let spin_ops = if spin {
            Some(SpinOperators::build(params, &rotor, b_gauss)?)
        } else {
            None
        };
        let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        Ok(Self {
            params: *params,
            field_kv_cm,
            b_gauss,
            rotor,
            spin,
            labels,
            energies,
            rotor_of,
            spin_ops,
            index,
        })
    }

    pub fn index_of(&self, l: &MonomerLabel) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn pair_energy(&self, level: &PairLevel) -> Result<f64> {
        let e = |l: &MonomerLabel| {
            self.index_of(l)
                .map(|i| self.energies[i])
                .ok_or_else(|| Error::InvalidInput(format!("monomer state {l} not in the basis")))
        };
        Ok(e(&level.a)? + e(&level.b)?)
    }
}

fn quantize(e: f64) -> i64 {
    (e * 1e15).round() as i64
}

/// All boson-symmetric channels of the block, sorted by threshold, L, M_L and labels.
pub fn build_pair_basis(spec: &BasisSpec, monomers: &MonomerSet) -> Result<Vec<Channel>> {
    if spec.include_spin != monomers.spin {
        return Err(Error::InvalidInput(
            "spin flag of basis and monomer set differ".into(),
        ));
    }
    let e_in = monomers.pair_energy(&spec.incoming)?;
    let class1_rotor: Vec<PairLevel> = if spec.include_spin {
        let mut v = Vec::new();
        for i in 0..monomers.len() {
            for j in i..monomers.len() {
                let lv = PairLevel::new(monomers.labels[i], monomers.labels[j]);
                if spec.class1.selects(&lv) && !v.contains(&lv.rotor_part()) {
                    v.push(lv.rotor_part());
                }
            }
        }
        v
    } else {
        Vec::new()
    };
    let mut out = Vec::new();
    let n = monomers.len();
    for i in 0..n {
        let li = monomers.labels[i];
        if li.ntilde > spec.ntilde_max {
            continue;
        }
        for j in i..n {
            let lj = monomers.labels[j];
            if lj.ntilde > spec.ntilde_max {
                continue;
            }
            let level = PairLevel::new(li, lj);
            let selected = spec.class1.selects(&level);
            if spec.include_spin && !selected && class1_rotor.contains(&level.rotor_part()) {
                continue;
            }
            let class = if selected {
                ChannelClass::One
            } else {
                ChannelClass::Two
            };
            let ml = spec.m_tot - li.projection() - lj.projection();
            let l0 = ml.unsigned_abs();
            for l in l0..=spec.l_max {
                if Parity::of(l) != spec.parity || (i == j && l % 2 == 1) {
                    continue;
                }
                let (a, b, ia, ib) = if li <= lj {
                    (li, lj, i, j)
                } else {
                    (lj, li, j, i)
                };
                out.push(Channel {
                    mono1: a,
                    mono2: b,
                    idx1: ia,
                    idx2: ib,
                    l,
                    ml,
                    exchange_phase: if l % 2 == 0 { 1 } else { -1 },
                    threshold: monomers.energies[i] + monomers.energies[j] - e_in,
                    class,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyBasis(format!(
            "no channel with M_tot = {}, parity {:?}, L_max = {}",
            spec.m_tot, spec.parity, spec.l_max
        )));
    }
    out.sort_by(|x, y| {
        quantize(x.threshold)
            .cmp(&quantize(y.threshold))
            .then(x.l.cmp(&y.l))
            .then(x.ml.cmp(&y.ml))
            .then(x.mono1.cmp(&y.mono1))
            .then(x.mono2.cmp(&y.mono2))
    });
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct Partition {
    pub class1: Vec<Channel>,
    pub class2: Vec<Channel>,
    /// Class-2 channels closer than the margin to a class-1 threshold.
    pub warnings: Vec<String>,
}

pub fn partition_classes(channels: &[Channel], spec: &BasisSpec) -> Result<Partition> {
    let mut p = Partition::default();
    for c in channels {
        match c.class {
            ChannelClass::One => p.class1.push(c.clone()),
            ChannelClass::Two => {
                if c.level() == spec.incoming {
                    return Err(Error::IncomingInClass2(c.to_string()));
                }
                p.class2.push(c.clone())
            }
        }
    }
    if !p.class1.iter().any(|c| c.level() == spec.incoming) {
        return Err(Error::InvalidInput(format!(
            "incoming pair level {} not in class 1",
            spec.incoming
        )));
    }
    let mut t1: Vec<f64> = p.class1.iter().map(|c| c.threshold).collect();
    t1.sort_by(f64::total_cmp);
    t1.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut seen = std::collections::HashSet::new();
    for c in &p.class2 {
        if !seen.insert(c.level()) {
            continue;
        }
        if let Some(t) = t1.iter().find(|t| (c.threshold - **t).abs() < spec.margin) {
            p.warnings.push(format!(
                "class-2 level {} lies {:.3} GHz from a class-1 threshold",
                c.level(),
                units::au_to_ghz(c.threshold - t)
            ));
        }
    }
    Ok(p)
}
