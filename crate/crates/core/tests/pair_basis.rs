use dipolar_shield::monomer::{MoleculeParams, MonomerLabel};
use dipolar_shield::pair_basis::{
    build_pair_basis, partition_classes, preset, BasisSpec, Class1Selector, MonomerSet, PairLevel,
    Parity,
};
use proptest::prelude::*;
use std::collections::BTreeSet;

fn rotor_set(f: f64, ntilde_max: u32) -> MonomerSet {
    MonomerSet::new(
        &MoleculeParams::caf(),
        f,
        0.0,
        ntilde_max,
        ntilde_max,
        false,
    )
    .unwrap()
}

/// Symmetrized boson channels counted directly from the quantum numbers.
fn brute_force_count(ntilde_max: i32, l_max: i32, m_tot: i32, even: bool) -> usize {
    let mut mono = Vec::new();
    for n in 0..=ntilde_max {
        for m in -n..=n {
            mono.push((n, m));
        }
    }
    let mut count = 0;
    for i in 0..mono.len() {
        for j in i..mono.len() {
            for l in (0..=l_max).filter(|l| (l % 2 == 0) == even) {
                // identical monomer functions need an even exchange phase (-1)^L
                if i == j && l % 2 == 1 {
                    continue;
                }
                let ml = m_tot - mono[i].1 - mono[j].1;
                if ml.abs() <= l {
                    count += 1;
                }
            }
        }
    }
    count
}

#[test]
fn full_basis_channel_count() {
    let ms = rotor_set(24.5, 5);
    let spec = BasisSpec::new(5, 20, 0, Parity::Even, Class1Selector::All);
    let ch = build_pair_basis(&spec, &ms).unwrap();
    assert_eq!(ch.len(), 6240);
    assert_eq!(ch.len(), brute_force_count(5, 20, 0, true));
}

#[test]
fn large_preset_class1_count() {
    let ms = rotor_set(24.5, 5);
    let spec = BasisSpec::new(5, 20, 0, Parity::Even, preset("large").unwrap().0);
    let part = partition_classes(&build_pair_basis(&spec, &ms).unwrap(), &spec).unwrap();
    assert_eq!(part.class1.len(), 455);
    assert_eq!(part.class1.len(), brute_force_count(2, 20, 0, true));
}

#[test]
fn spin_n13_has_thirteen_pair_levels() {
    let ms = MonomerSet::new(&MoleculeParams::caf(), 21.7, 0.0, 5, 5, true).unwrap();
    let (class1, spin) = preset("spin-N13").unwrap();
    assert!(spin);
    let mut spec = BasisSpec::new(5, 2, 0, Parity::Even, class1);
    spec.include_spin = true;
    let s = MonomerLabel::with_spin(1, 0, 0, 0);
    spec.incoming = PairLevel::new(s, s);
    let part = partition_classes(&build_pair_basis(&spec, &ms).unwrap(), &spec).unwrap();
    let levels: BTreeSet<PairLevel> = part.class1.iter().map(|c| c.level()).collect();
    assert_eq!(levels.len(), 13, "{levels:?}");
}

#[test]
fn odd_parity_counts() {
    let ms = rotor_set(24.5, 3);
    for m in [0, 1, 3] {
        let spec = BasisSpec::new(3, 9, m, Parity::Odd, Class1Selector::All);
        assert_eq!(
            build_pair_basis(&spec, &ms).unwrap().len(),
            brute_force_count(3, 9, m, false)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn channels_conserve_mtot_and_parity(ntilde in 1u32..4, l_max in 0u32..9, m in -4i32..5, odd in any::<bool>()) {
        let ms = rotor_set(22.0, ntilde);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let spec = BasisSpec::new(ntilde, l_max, m, parity, Class1Selector::All);
        let expected = brute_force_count(ntilde as i32, l_max as i32, m, !odd);
        let built = build_pair_basis(&spec, &ms);
        if expected == 0 {
            prop_assert!(built.is_err());
            return Ok(());
        }
        let ch = built.unwrap();
        prop_assert_eq!(ch.len(), expected);
        let mut seen = BTreeSet::new();
        for c in &ch {
            prop_assert_eq!(c.m_tot(), m);
            prop_assert_eq!(c.l % 2 == 1, odd);
            prop_assert_eq!(c.exchange_phase, if c.l % 2 == 0 { 1 } else { -1 });
            // expansion is normalized and symmetric under exchange
            let norm: f64 = c.expansion().iter().map(|(_, x)| x * x).sum();
            prop_assert!((norm - 1.0).abs() < 1e-14);
            prop_assert!(seen.insert((c.level(), c.l, c.ml)));
        }
    }

    #[test]
    fn thresholds_are_relative_to_incoming(f in 19.0f64..30.0) {
        let ms = rotor_set(f, 3);
        let spec = BasisSpec::new(3, 4, 0, Parity::Even, preset("small").unwrap().0);
        let ch = build_pair_basis(&spec, &ms).unwrap();
        let e_in = ms.pair_energy(&spec.incoming).unwrap();
        for c in &ch {
            let e = ms.pair_energy(&c.level()).unwrap() - e_in;
            prop_assert!((c.threshold - e).abs() < 1e-15);
            if c.level() == spec.incoming {
                prop_assert_eq!(c.threshold, 0.0);
            }
        }
    }
}
