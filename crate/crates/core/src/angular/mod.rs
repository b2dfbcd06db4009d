//! Angular momentum algebra: Wigner 3j/6j symbols, Clebsch-Gordan
//! coefficients and matrix elements of Racah-normalized spherical harmonics.

mod exact;
mod symbols;

pub use symbols::{
    c_tensor_element, clebsch_gordan, clebsch_gordan_int, wigner_3j, wigner_3j_int, wigner_6j,
    wigner_6j_int,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Integer or half-integer angular momentum quantum number, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfIntegerAM {
    twice_value: i32,
}

impl HalfIntegerAM {
    pub const ZERO: Self = Self { twice_value: 0 };
    pub const HALF: Self = Self { twice_value: 1 };

    pub const fn from_twice(twice_value: i32) -> Self {
        Self { twice_value }
    }

    pub const fn integer(n: i32) -> Self {
        Self { twice_value: 2 * n }
    }

    pub const fn twice(self) -> i32 {
        self.twice_value
    }

    pub fn value(self) -> f64 {
        0.5 * self.twice_value as f64
    }

    pub fn is_integer(self) -> bool {
        self.twice_value % 2 == 0
    }

    /// True when `self` is a valid projection of `j`.
    pub fn is_projection_of(self, j: Self) -> bool {
        j.twice_value >= 0
            && self.twice_value.abs() <= j.twice_value
            && (j.twice_value - self.twice_value) % 2 == 0
    }
}

impl From<i32> for HalfIntegerAM {
    fn from(n: i32) -> Self {
        Self::integer(n)
    }
}

impl Add for HalfIntegerAM {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_twice(self.twice_value + o.twice_value)
    }
}

impl Sub for HalfIntegerAM {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_twice(self.twice_value - o.twice_value)
    }
}

impl Neg for HalfIntegerAM {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_twice(-self.twice_value)
    }
}

impl fmt::Display for HalfIntegerAM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_value / 2)
        } else {
            write!(f, "{}/2", self.twice_value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_arithmetic() {
        let h = HalfIntegerAM::HALF;
        assert_eq!(h + h, HalfIntegerAM::integer(1));
        assert_eq!((h - h).twice(), 0);
        assert_eq!((-h).twice(), -1);
        assert!(h.is_projection_of(h));
        assert!(!HalfIntegerAM::integer(1).is_projection_of(h));
        assert_eq!(format!("{}", h), "1/2");
        assert_eq!(format!("{}", HalfIntegerAM::integer(3)), "3");
    }
}
