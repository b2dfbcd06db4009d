//! Hyperfine-resolved monomer levels near the shielding region, with and without a magnetic field.

use dipolar_shield::monomer::{spin_dressed_states, MoleculeParams};
use dipolar_shield::units;

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    for b in [0.0, 10.0] {
        println!("B = {b} G");
        let states = spin_dressed_states(&p, 21.66, b, 10)?;
        let base = states
            .iter()
            .map(|s| s.energy)
            .fold(f64::INFINITY, f64::min);
        for s in states.iter().filter(|s| s.label.ntilde <= 1) {
            let mf = s.mf.map_or("?".to_string(), |m| m.to_string());
            println!(
                "  {:<14} m_F = {mf:>2}  {:12.6} GHz",
                s.label.to_string(),
                units::au_to_ghz(s.energy - base)
            );
        }
    }
    Ok(())
}
