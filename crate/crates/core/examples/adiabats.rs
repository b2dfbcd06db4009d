//! Incoming L = 0 adiabat across the shielding crossing.

use dipolar_shield::interaction::{adiabats, CouplingModel, InteractionOptions};
use dipolar_shield::monomer::MoleculeParams;
use dipolar_shield::pair_basis::{preset, BasisSpec, MonomerSet, Parity};
use dipolar_shield::units;

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    let r: Vec<f64> = (0..40).map(|i| 60.0 * 1.08f64.powi(i)).collect();
    for field in [20.0, 24.5] {
        let ms = MonomerSet::new(&p, field, 0.0, 5, 5, false)?;
        let spec = BasisSpec::new(5, 6, 0, Parity::Even, preset("small").unwrap().0);
        let model = CouplingModel::build(&ms, &spec, &InteractionOptions::default())?;
        let ad = adiabats(&model, &r)?;
        // the curve ending in the incoming L = 0 channel
        let curve = (0..model.dim())
            .find(|&c| {
                let ch = &model.channels[*ad.dominant[c].last().unwrap()];
                ch.level == model.incoming && ch.l == 0
            })
            .expect("incoming curve");
        println!("{field} kV/cm, {} channels", model.dim());
        for (i, ri) in r.iter().enumerate().step_by(4) {
            println!(
                "  R = {ri:8.1} a0   E = {:12.3} uK",
                units::au_to_microkelvin(ad.energies[curve][i])
            );
        }
    }
    Ok(())
}
