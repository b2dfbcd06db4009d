//! Complex scattering length at low energy and the linear k0 dependence of its imaginary part.

use dipolar_shield::interaction::InteractionOptions;
use dipolar_shield::monomer::{MoleculeParams, MonomerLabel};
use dipolar_shield::observables::{beta_decomposition, cross_sections, DipoleLength};
use dipolar_shield::pair_basis::{preset, BasisSpec, Parity};
use dipolar_shield::propagator::{solve_block, PropagationConfig};
use dipolar_shield::units;

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    let field = 23.0;
    let spec = BasisSpec::new(5, 10, 0, Parity::Even, preset("minimal").unwrap().0);
    let (mut k0, mut beta) = (Vec::new(), Vec::new());
    for nk in [0.1, 0.2, 0.4, 0.7, 1.0] {
        let e = units::microkelvin_to_au(nk * 1e-3);
        let s = solve_block(
            &p,
            field,
            0.0,
            e,
            &spec,
            &InteractionOptions::default(),
            &PropagationConfig::default(),
        )?;
        let o = cross_sections(&[(1.0, &s)], p.reduced_mass())?;
        let a = o.scattering_length().expect("M_tot = 0 block")?;
        println!(
            "{nk:4} nK: alpha = {:10.2} a0, beta = {:8.4} a0",
            a.alpha, a.beta
        );
        k0.push(o.k0);
        beta.push(a.beta);
    }
    let d = DipoleLength::for_state(&p, field, MonomerLabel::rotor(1, 0), 20)?;
    let fit = beta_decomposition(&k0, &beta, &d)?;
    println!(
        "D = {:.1} a0; slope / (D^2/45) = {:.4}; beta_loss = {:.4} a0",
        d.length, fit.slope_ratio, fit.beta_loss
    );
    for w in &fit.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
