//! Size of the pair basis and of each class-1 preset.

use dipolar_shield::monomer::{MoleculeParams, MonomerLabel};
use dipolar_shield::pair_basis::{
    build_pair_basis, partition_classes, preset, BasisSpec, MonomerSet, PairLevel, Parity,
    PRESET_NAMES,
};

fn main() -> dipolar_shield::Result<()> {
    let p = MoleculeParams::caf();
    let rotor = MonomerSet::new(&p, 24.5, 0.0, 5, 5, false)?;
    let spin = MonomerSet::new(&p, 24.5, 0.0, 5, 5, true)?;
    for name in PRESET_NAMES {
        let (class1, with_spin) = preset(name).expect("known preset");
        let mut spec = BasisSpec::new(5, 20, 0, Parity::Even, class1);
        spec.include_spin = with_spin;
        if with_spin {
            // the spin product basis is large; a short L range shows the class-1 sizes
            spec.l_max = 2;
        }
        let ms = if with_spin { &spin } else { &rotor };
        if with_spin {
            let s = MonomerLabel::with_spin(1, 0, 0, 0);
            spec.incoming = PairLevel::new(s, s);
        }
        let channels = build_pair_basis(&spec, ms)?;
        let part = partition_classes(&channels, &spec)?;
        let mut levels: Vec<_> = part.class1.iter().map(|c| c.level()).collect();
        levels.sort();
        levels.dedup();
        println!(
            "{name:>10}: L_max={:2}  total {:5}  class 1 {:4} channels in {:3} pair levels",
            spec.l_max,
            channels.len(),
            part.class1.len(),
            levels.len()
        );
    }
    Ok(())
}
