//! Conversion table between laboratory units and atomic units.
//!
//! Everything inside the crate is in Hartree atomic units.

/// Hartree energy in Hz (E_h / h).
pub const HARTREE_HZ: f64 = 6.579_683_920_502e15;
/// Debye in e·a0.
pub const DEBYE_AU: f64 = 0.393_430_269_7;
/// Atomic unit of electric field in kV/cm.
pub const FIELD_AU_KV_CM: f64 = 5.142_206_747_63e6;
/// Bohr magneton in E_h / T.
pub const BOHR_MAGNETON_AU: f64 = 2.127_191_057_2e-6;
/// Boltzmann constant in E_h / K.
pub const BOLTZMANN_AU: f64 = 3.166_811_563_455_6e-6;
/// Unified atomic mass unit in electron masses.
pub const AMU_ME: f64 = 1_822.888_486_209;
/// Bohr radius in cm.
pub const BOHR_CM: f64 = 5.291_772_109_03e-9;
/// Atomic unit of time in s.
pub const TIME_AU_S: f64 = 2.418_884_326_585_7e-17;
/// Gauss in tesla.
pub const GAUSS_T: f64 = 1e-4;

pub fn ghz_to_au(x: f64) -> f64 {
    x * 1e9 / HARTREE_HZ
}

pub fn au_to_ghz(x: f64) -> f64 {
    x * HARTREE_HZ / 1e9
}

pub fn mhz_to_au(x: f64) -> f64 {
    x * 1e6 / HARTREE_HZ
}

pub fn au_to_mhz(x: f64) -> f64 {
    x * HARTREE_HZ / 1e6
}

pub fn kv_cm_to_au(f: f64) -> f64 {
    f / FIELD_AU_KV_CM
}

pub fn au_to_kv_cm(f: f64) -> f64 {
    f * FIELD_AU_KV_CM
}

pub fn debye_to_au(d: f64) -> f64 {
    d * DEBYE_AU
}

pub fn au_to_debye(d: f64) -> f64 {
    d / DEBYE_AU
}

pub fn kelvin_to_au(t: f64) -> f64 {
    t * BOLTZMANN_AU
}

pub fn microkelvin_to_au(t: f64) -> f64 {
    t * 1e-6 * BOLTZMANN_AU
}

pub fn au_to_microkelvin(e: f64) -> f64 {
    e / BOLTZMANN_AU * 1e6
}

pub fn amu_to_au(m: f64) -> f64 {
    m * AMU_ME
}

/// Magnetic field in gauss to the Zeeman energy scale μ_B·B in E_h.
pub fn gauss_to_bohr_magneton_energy(b: f64) -> f64 {
    b * GAUSS_T * BOHR_MAGNETON_AU
}

/// a0² to cm².
pub fn area_au_to_cm2(s: f64) -> f64 {
    s * BOHR_CM * BOHR_CM
}

/// a0³/t_au to cm³/s.
pub fn rate_au_to_cm3_s(k: f64) -> f64 {
    k * BOHR_CM.powi(3) / TIME_AU_S
}
