//! Second-order Van Vleck couplings among class-1 channels through class 2.

use crate::pair_basis::Channel;
use crate::{units, Error, Result};
use nalgebra::DMatrix;

fn check_gap(a: &Channel, alpha: &Channel, floor: f64) -> Result<f64> {
    let gap = a.threshold - alpha.threshold;
    if gap.abs() < floor {
        return Err(Error::DegenerateDenominator {
            a: a.to_string(),
            b: alpha.to_string(),
            gap_ghz: units::au_to_ghz(gap),
        });
    }
    Ok(gap)
}

/// ½ Σ_α V_aα V_αb [1/(E_a−E_α) + 1/(E_b−E_α)] with `v` the class-1 × class-2 H_dd block.
pub fn vanvleck_dd(
    class1: &[Channel],
    class2: &[Channel],
    v: &DMatrix<f64>,
    floor: f64,
) -> Result<DMatrix<f64>> {
    let n1 = class1.len();
    let mut out = DMatrix::zeros(n1, n1);
    let mut nz: Vec<(usize, f64, f64)> = Vec::new();
    for (k, alpha) in class2.iter().enumerate() {
        nz.clear();
        for (a, ca) in class1.iter().enumerate() {
            let x = v[(a, k)];
            if x != 0.0 {
                let gap = check_gap(ca, alpha, floor)?;
                nz.push((a, x, 1.0 / gap));
            }
        }
        for &(a, va, ia) in &nz {
            for &(b, vb, ib) in &nz {
                out[(a, b)] += 0.5 * va * vb * (ia + ib);
            }
        }
    }
    Ok(out)
}

/// ½ Σ_α (V_aα S_αb + S_aα V_αb)[1/(E_a−E_α) + 1/(E_b−E_α)].
pub fn vanvleck_spin(
    class1: &[Channel],
    class2: &[Channel],
    v: &DMatrix<f64>,
    s: &DMatrix<f64>,
    floor: f64,
) -> Result<DMatrix<f64>> {
    let n1 = class1.len();
    let mut out = DMatrix::zeros(n1, n1);
    let mut nz: Vec<(usize, f64, f64, f64)> = Vec::new();
    for (k, alpha) in class2.iter().enumerate() {
        nz.clear();
        for (a, ca) in class1.iter().enumerate() {
            let (x, y) = (v[(a, k)], s[(a, k)]);
            if x != 0.0 || y != 0.0 {
                let gap = check_gap(ca, alpha, floor)?;
                nz.push((a, x, y, 1.0 / gap));
            }
        }
        for &(a, va, sa, ia) in &nz {
            for &(b, vb, sb, ib) in &nz {
                out[(a, b)] += 0.5 * (va * sb + sa * vb) * (ia + ib);
            }
        }
    }
    Ok(out)
}
