//! Elastic cross section from partial waves L > 0 against the Born result for two aligned dipoles.

use dipolar_shield::interaction::InteractionOptions;
use dipolar_shield::monomer::{MoleculeParams, MonomerLabel};
use dipolar_shield::observables::{born_elastic, cross_sections, mtot_weights, DipoleLength};
use dipolar_shield::pair_basis::{preset, BasisSpec, Parity};
use dipolar_shield::propagator::{solve_block, PropagationConfig, ScatteringSolution};
use dipolar_shield::units;

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    let (field, e) = (24.5, units::microkelvin_to_au(0.01));
    let l_max = std::env::args()
        .nth(1)
        .map_or(12, |s| s.parse().expect("L_max"));
    let mut blocks = Vec::new();
    for (m, w) in mtot_weights(&(0..=6).collect::<Vec<_>>(), 0.0) {
        let spec = BasisSpec::new(5, l_max, m, Parity::Even, preset("minimal").unwrap().0);
        blocks.push((
            w,
            solve_block(
                &p,
                field,
                0.0,
                e,
                &spec,
                &InteractionOptions::default(),
                &PropagationConfig::default(),
            )?,
        ));
    }
    let refs: Vec<(f64, &ScatteringSolution)> = blocks.iter().map(|(w, s)| (*w, s)).collect();
    let o = cross_sections(&refs, p.reduced_mass())?;
    let d = DipoleLength::for_state(&p, field, MonomerLabel::rotor(1, 0), 20)?;
    let (born, born0) = born_elastic(&d);
    println!("D = {:.2} a0, L_max = {l_max}", d.length);
    println!(
        "sigma_el(L>0) = {:.4e} a0^2, Born {:.4e} (ratio {:.4})",
        o.sigma_el_higher,
        born,
        o.sigma_el_higher / born
    );
    println!("Born M_tot = 0 share = {:.4e} a0^2", born0);
    Ok(())
}
