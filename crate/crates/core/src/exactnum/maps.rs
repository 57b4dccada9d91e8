//! The two branch maps of the recursion and their inverses.
//!
//! A win sends the normalized wealth `y` to `(y + 1) / 2`, a loss sends it to
//! `2y - 2`. Both are increasing affine bijections of the dyadics.

use super::DyadicRational;

/// `(x + 1) / 2`
pub fn map_win(x: &DyadicRational) -> DyadicRational {
    (x + &DyadicRational::one()).half()
}

/// `2x - 2`
pub fn map_lose(x: &DyadicRational) -> DyadicRational {
    &x.double() - &DyadicRational::from_int(2)
}

/// Inverse of [`map_win`]: `2b - 1`.
pub fn premap_win(b: &DyadicRational) -> DyadicRational {
    &b.double() - &DyadicRational::one()
}

/// Inverse of [`map_lose`]: `(b + 2) / 2`.
pub fn premap_lose(b: &DyadicRational) -> DyadicRational {
    (b + &DyadicRational::from_int(2)).half()
}
