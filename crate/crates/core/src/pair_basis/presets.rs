use super::{Class1Selector, MonomerSelector};
use crate::monomer::SpinLabel;

pub const PRESET_NAMES: &[&str] = &[
    "full",
    "large",
    "small",
    "minimal",
    "spin-N13",
    "small-spin",
    "large-spin",
];

fn rot(ntilde: u32, mn: i32) -> MonomerSelector {
    MonomerSelector {
        ntilde,
        mn,
        spin: None,
    }
}

fn spin(ntilde: u32, mn: i32, g: u32, mg: i32) -> MonomerSelector {
    MonomerSelector {
        ntilde,
        mn,
        spin: Some(SpinLabel { g, mg }),
    }
}

fn small_levels() -> Vec<(MonomerSelector, MonomerSelector)> {
    vec![
        (rot(1, 0), rot(1, 0)),
        (rot(0, 0), rot(2, 0)),
        (rot(0, 0), rot(2, 1)),
        (rot(0, 0), rot(2, -1)),
    ]
}

/// Named class-1 selections. Returns the selector and whether spin functions are included.
pub fn preset(name: &str) -> Option<(Class1Selector, bool)> {
    Some(match name {
        "full" => (Class1Selector::All, false),
        "large" => (Class1Selector::MaxNtilde(2), false),
        "small" => (Class1Selector::Levels(small_levels()), false),
        "minimal" => (
            Class1Selector::Levels(vec![(rot(1, 0), rot(1, 0)), (rot(0, 0), rot(2, 0))]),
            false,
        ),
        "spin-N13" => {
            let mut v = vec![(spin(1, 0, 0, 0), spin(1, 0, 0, 0))];
            for mn in [0, 1, -1] {
                v.push((spin(0, 0, 0, 0), rot(2, mn)));
            }
            (Class1Selector::Levels(v), true)
        }
        "small-spin" => (Class1Selector::Levels(small_levels()), true),
        "large-spin" => (Class1Selector::MaxNtilde(2), true),
        _ => return None,
    })
}
