//! Rate coefficients at one field and energy, summed over M_tot blocks.

use dipolar_shield::interaction::InteractionOptions;
use dipolar_shield::monomer::MoleculeParams;
use dipolar_shield::observables::{cross_sections, mtot_weights};
use dipolar_shield::pair_basis::{preset, BasisSpec, Parity};
use dipolar_shield::propagator::{solve_block, PropagationConfig, ScatteringSolution};
use dipolar_shield::units;

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    let (field, e) = (23.0, units::microkelvin_to_au(10.0));
    let mut blocks = Vec::new();
    for (m, w) in mtot_weights(&[0, 1, 2], 0.0) {
        let spec = BasisSpec::new(5, 6, m, Parity::Even, preset("small").unwrap().0);
        let s = solve_block(
            &p,
            field,
            0.0,
            e,
            &spec,
            &InteractionOptions::default(),
            &PropagationConfig::default(),
        )?;
        println!("M_tot = {m}: {} open channels", s.channels.len());
        blocks.push((w, s));
    }
    let refs: Vec<(f64, &ScatteringSolution)> = blocks.iter().map(|(w, s)| (*w, s)).collect();
    let o = cross_sections(&refs, p.reduced_mass())?;
    println!("k_el    = {:.4e} cm3/s", o.rate(o.sigma_el));
    println!("k_inel  = {:.4e} cm3/s", o.rate(o.sigma_inel));
    println!("k_short = {:.4e} cm3/s", o.rate(o.sigma_short));
    println!(
        "k_loss  = {:.4e} cm3/s  (elastic/loss = {:.3e})",
        o.rate(o.sigma_loss),
        o.sigma_el / o.sigma_loss
    );
    for (level, s) in &o.state_to_state {
        println!("  to {level}: {:.4e} cm3/s", o.rate(*s));
    }
    Ok(())
}
