//! Field-dressed rotor levels, induced dipoles and pair-threshold crossings.

use dipolar_shield::monomer::{
    field_dressed_states, induced_dipole, pair_threshold_crossing, MoleculeParams, MonomerLabel,
};
use dipolar_shield::units;

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    for field in [0.0, 10.0, 20.0, 24.5, 30.0] {
        let states = field_dressed_states(&p, field, 20)?;
        print!("{field:5.1} kV/cm:");
        for s in states
            .iter()
            .filter(|s| s.label.ntilde <= 2 && s.label.mn >= 0)
        {
            print!(
                "  {} {:8.3} GHz ({:+.3} D)",
                s.label,
                units::au_to_ghz(s.energy),
                units::au_to_debye(induced_dipole(s, &p))
            );
        }
        println!();
    }
    let r = MonomerLabel::rotor;
    for mn in [0, 1, 2] {
        let f = pair_threshold_crossing(&p, (r(1, 0), r(1, 0)), (r(0, 0), r(2, mn)), (15.0, 30.0))?;
        println!("(1,0)+(1,0) crosses (0,0)+(2,{mn}) at {f:.4} kV/cm");
    }
    Ok(())
}
