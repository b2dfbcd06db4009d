//! Single-molecule Hamiltonians: rigid rotor + Stark, fine and hyperfine
//! structure and electron-spin Zeeman term.

mod spin;
mod stark;

pub(crate) use spin::rotor_c_q;
pub use spin::{
    spin_dressed_states, spin_dressed_states_with, spin_hamiltonian, spin_labels, SpinHamiltonian,
    SpinOperators,
};
pub use stark::{
    field_dressed_states, induced_dipole, pair_threshold_crossing, pair_threshold_crossing_at,
    spin_channel_openings, stark_hamiltonian,
};

use crate::units;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Fine and hyperfine constants, in E_h.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinConstants {
    /// Electron spin-rotation γ.
    pub gamma: f64,
    /// Isotropic Fermi-contact + dipolar scalar part ζ_F.
    pub zeta_f: f64,
    /// Anisotropic hyperfine t.
    pub t: f64,
    /// Nuclear spin-rotation c_F.
    pub c_f: f64,
}

impl SpinConstants {
    /// CaF X²Σ⁺(v=0), Childs et al. (1981): γ = 39.65891 MHz, b = 109.1839 MHz,
    /// c = 40.1190 MHz, C = 0.0288 MHz, with ζ_F = b + c/3 and t = c/3.
    pub fn caf() -> Self {
        let b = 109.1839;
        let c = 40.1190;
        Self {
            gamma: units::mhz_to_au(39.65891),
            zeta_f: units::mhz_to_au(b + c / 3.0),
            t: units::mhz_to_au(c / 3.0),
            c_f: units::mhz_to_au(0.0288),
        }
    }

    pub fn zero() -> Self {
        Self {
            gamma: 0.0,
            zeta_f: 0.0,
            t: 0.0,
            c_f: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    /// Rotational constant b, E_h.
    pub b: f64,
    /// Body-frame dipole μ, e·a0.
    pub mu: f64,
    pub spin: SpinConstants,
    pub g_s: f64,
    /// Molecular mass, u.
    pub mass: f64,
}

impl MoleculeParams {
    /// ⁴⁰Ca¹⁹F.
    pub fn caf() -> Self {
        Self {
            b: units::ghz_to_au(10.267),
            mu: units::debye_to_au(3.07),
            spin: SpinConstants::caf(),
            g_s: 2.002_319_3,
            mass: 39.962_590_863 + 18.998_403_163,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.b > 0.0) || !(self.mu >= 0.0) || !(self.mass > 0.0) {
            return Err(crate::Error::InvalidInput(format!(
                "molecule parameters need b > 0, mu >= 0, mass > 0 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Reduced mass of an identical pair in electron masses.
    pub fn reduced_mass(&self) -> f64 {
        0.5 * units::amu_to_au(self.mass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinLabel {
    pub g: u32,
    pub mg: i32,
}

/// (ñ, m_n) and optionally (g, m_g).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonomerLabel {
    pub ntilde: u32,
    pub mn: i32,
    pub spin: Option<SpinLabel>,
}

impl MonomerLabel {
    pub fn rotor(ntilde: u32, mn: i32) -> Self {
        Self {
            ntilde,
            mn,
            spin: None,
        }
    }

    pub fn with_spin(ntilde: u32, mn: i32, g: u32, mg: i32) -> Self {
        Self {
            ntilde,
            mn,
            spin: Some(SpinLabel { g, mg }),
        }
    }

    pub fn rotor_part(&self) -> Self {
        Self::rotor(self.ntilde, self.mn)
    }

    /// Space-fixed projection carried by the monomer.
    pub fn projection(&self) -> i32 {
        self.mn + self.spin.map_or(0, |s| s.mg)
    }
}

impl fmt::Display for MonomerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.spin {
            None => write!(f, "({},{})", self.ntilde, self.mn),
            Some(s) => write!(f, "({},{},{},{})", self.ntilde, self.mn, s.g, s.mg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint {
    pub e_kv_cm: f64,
    pub b_gauss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Composition {
    /// Coefficients over free-rotor functions |n m_n⟩, n = n_min, n_min+1, ...
    FreeRotor { n_min: u32, coeffs: Vec<f64> },
    /// Coefficients over products of spin-free dressed rotor states and |g m_g⟩.
    Product {
        labels: Vec<MonomerLabel>,
        coeffs: Vec<f64>,
    },
}

impl Composition {
    pub fn coeffs(&self) -> &[f64] {
        match self {
            Composition::FreeRotor { coeffs, .. } | Composition::Product { coeffs, .. } => coeffs,
        }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDressedState {
    pub label: MonomerLabel,
    /// Energy in E_h relative to the field-free ground rotor level.
    pub energy: f64,
    pub composition: Composition,
    pub field: FieldPoint,
    /// m_f = m_n + m_g for spin-dressed states.
    pub mf: Option<i32>,
    /// Spin character of the label below 0.5.
    pub ambiguous: bool,
}
