//! Exact plane vectors and the orientation/angle predicates built on them.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use crate::exact::{ArithError, ExactReal, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct V2 {
    pub x: ExactReal,
    pub y: ExactReal,
}

impl V2 {
    pub fn new(x: ExactReal, y: ExactReal) -> Self {
        V2 { x, y }
    }

    pub fn ints(x: i64, y: i64) -> Self {
        V2 { x: x.into(), y: y.into() }
    }

    pub fn zero() -> Self {
        V2::ints(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn field(&self) -> Result<Field, ArithError> {
        self.x.field().join(self.y.field())
    }

    pub fn cross(&self, o: &V2) -> ExactReal {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }

    pub fn dot(&self, o: &V2) -> ExactReal {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    pub fn norm_sq(&self) -> ExactReal {
        self.dot(self)
    }

    pub fn scale(&self, s: &ExactReal) -> V2 {
        V2 { x: &self.x * s, y: &self.y * s }
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }

    /// 0 for the half-open upper half plane `y > 0 or (y = 0, x > 0)`, 1 otherwise.
    fn half(&self) -> u8 {
        let sy = self.y.signum();
        if sy > 0 || (sy == 0 && self.x.signum() > 0) {
            0
        } else {
            1
        }
    }

    /// Compares directions by angle in `[0, 2π)`, measured from the positive x-axis.
    pub fn angle_cmp(&self, o: &V2) -> Ordering {
        self.half().cmp(&o.half()).then_with(|| 0.cmp(&self.cross(o).signum()))
    }

    /// Same direction (positive multiple).
    pub fn same_direction(&self, o: &V2) -> bool {
        self.cross(o).is_zero() && self.dot(o).is_positive()
    }

    pub fn parallel(&self, o: &V2) -> bool {
        self.cross(o).is_zero()
    }
}

/// `w` in the half-open sector from `e` counter-clockwise to `f`, where the
/// sector angle is strictly between 0 and π.
pub fn in_sector(e: &V2, f: &V2, w: &V2) -> bool {
    let c = e.cross(w).signum();
    (c > 0 || (c == 0 && e.dot(w).is_positive())) && w.cross(f).is_positive()
}

impl Add for &V2 {
    type Output = V2;
    fn add(self, o: &V2) -> V2 {
        V2 { x: &self.x + &o.x, y: &self.y + &o.y }
    }
}

impl Sub for &V2 {
    type Output = V2;
    fn sub(self, o: &V2) -> V2 {
        V2 { x: &self.x - &o.x, y: &self.y - &o.y }
    }
}

impl Neg for &V2 {
    type Output = V2;
    fn neg(self) -> V2 {
        V2 { x: -&self.x, y: -&self.y }
    }
}

impl Add for V2 {
    type Output = V2;
    fn add(self, o: V2) -> V2 {
        &self + &o
    }
}

impl Sub for V2 {
    type Output = V2;
    fn sub(self, o: V2) -> V2 {
        &self - &o
    }
}

impl Neg for V2 {
    type Output = V2;
    fn neg(self) -> V2 {
        -&self
    }
}

impl fmt::Display for V2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Float orientation helper used by float-mode surfaces.
pub fn cross_f(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    #[test]
    fn angle_order() {
        let mut vs: Vec<V2> = vec![V2::ints(0, -1), V2::ints(-1, 0), V2::ints(1, 1), V2::ints(1, 0), V2::ints(1, -1)];
        vs.sort_by(|a, b| a.angle_cmp(b));
        assert_eq!(vs, vec![V2::ints(1, 0), V2::ints(1, 1), V2::ints(-1, 0), V2::ints(0, -1), V2::ints(1, -1)]);
    }

    #[test]
    fn sector() {
        let e = V2::ints(1, 0);
        let f = V2::ints(0, 1);
        assert!(in_sector(&e, &f, &V2::ints(2, 0)));
        assert!(in_sector(&e, &f, &V2::ints(1, 1)));
        assert!(!in_sector(&e, &f, &V2::ints(0, 1)));
        assert!(!in_sector(&e, &f, &V2::ints(-1, 0)));
        assert!(!in_sector(&e, &f, &V2::ints(1, -1)));
    }
}
