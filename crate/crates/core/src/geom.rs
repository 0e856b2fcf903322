//! Planar geometry over `F_p`: points, the algebraic distance
//! `||x - y|| = (x1-y1)^2 + (x2-y2)^2`, corners, rectangles, collinearity,
//! perpendicular bisectors and the paraboloid lift.
//!
//! None of this is Euclidean: the "distance" is a field scalar, and for
//! `p = 1 (mod 4)` there are nonzero vectors with `||v|| = 0` (isotropic
//! directions). Everything downstream that needs anisotropy is gated on
//! `p = 3 (mod 4)`.

use crate::field::{fp_inv, PrimeModulus, Scalar};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    /// The bisector line is only defined for pairs with `||a - b|| != 0`.
    #[error("pair has ||a-b|| = 0 (equal points, or an isotropic difference)")]
    IsotropicOrEqualPair,
}

/// A point of `F_p^2` in canonical residue coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point2 { x, y }
    }

    /// `||a|| = x^2 + y^2`, the squared norm used throughout.
    #[inline]
    pub fn norm(&self, m: &PrimeModulus) -> Scalar {
        m.reduce(self.x * self.x + self.y * self.y)
    }
}

/// An affine line `{(X, Y) : a X + b Y = c}` in normalized form.
///
/// The first nonzero normal coordinate is scaled to 1, so two proportional
/// coefficient triples always normalize identically and line equality is
/// plain field-by-field equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalLine {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl CanonicalLine {
    /// Normalizes `(a, b, c)` with `(a, b) != (0, 0)`.
    pub fn new(a: Scalar, b: Scalar, c: Scalar, m: &PrimeModulus) -> Self {
        assert!(a != 0 || b != 0, "degenerate line coefficients");
        if a != 0 {
            let inv = fp_inv(a, m).expect("nonzero");
            CanonicalLine {
                a: 1,
                b: m.mul(b, inv),
                c: m.mul(c, inv),
            }
        } else {
            let inv = fp_inv(b, m).expect("nonzero");
            CanonicalLine {
                a: 0,
                b: 1,
                c: m.mul(c, inv),
            }
        }
    }
}

/// The paraboloid lift `(x, y, x^2 + y^2)` of a planar point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiftedPoint {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

/// `||x - y|| = (x1-y1)^2 + (x2-y2)^2` as a field scalar.
#[inline]
pub fn dist2(x: Point2, y: Point2, m: &PrimeModulus) -> Scalar {
    let dx = m.sub(x.x, y.x);
    let dy = m.sub(x.y, y.y);
    m.reduce(dx * dx + dy * dy)
}

/// True iff `(b - a) . (c - a) = 0`, i.e. the triple has a right angle at `a`.
#[inline]
pub fn is_corner(a: Point2, b: Point2, c: Point2, m: &PrimeModulus) -> bool {
    let ux = m.sub(b.x, a.x);
    let uy = m.sub(b.y, a.y);
    let vx = m.sub(c.x, a.x);
    let vy = m.sub(c.y, a.y);
    m.reduce(ux * vx + uy * vy) == 0
}

/// True iff the triples `(a,b,d)`, `(b,a,c)`, `(c,b,d)`, `(d,a,c)` are all
/// corners.
pub fn is_rectangle(a: Point2, b: Point2, c: Point2, d: Point2, m: &PrimeModulus) -> bool {
    is_corner(a, b, d, m) && is_corner(b, a, c, m) && is_corner(c, b, d, m) && is_corner(d, a, c, m)
}

/// True iff all four points lie on a single affine line. Quadruples with at
/// most two distinct points are always degenerate.
pub fn is_degenerate_quad(a: Point2, b: Point2, c: Point2, d: Point2, m: &PrimeModulus) -> bool {
    points_collinear(&[a, b, c, d], m)
}

/// All-on-one-line test for an arbitrary slice of points.
pub fn points_collinear(pts: &[Point2], m: &PrimeModulus) -> bool {
    // Find two distinct anchors; fewer than 2 distinct points is collinear.
    let Some(&first) = pts.first() else {
        return true;
    };
    let Some(&second) = pts.iter().find(|&&q| q != first) else {
        return true;
    };
    let ux = m.sub(second.x, first.x);
    let uy = m.sub(second.y, first.y);
    pts.iter().all(|&q| {
        let vx = m.sub(q.x, first.x);
        let vy = m.sub(q.y, first.y);
        // cross product ux*vy - uy*vx = 0
        m.reduce(ux * vy) == m.reduce(uy * vx)
    })
}

/// The perpendicular bisector of `a` and `b`: the canonical form of
/// `2(b - a) . x = ||b|| - ||a||`, the locus of points equidistant from
/// `a` and `b`. Errors when `||a - b|| = 0` (the line is undefined there).
pub fn bisector(a: Point2, b: Point2, m: &PrimeModulus) -> Result<CanonicalLine, GeomError> {
    if dist2(a, b, m) == 0 {
        return Err(GeomError::IsotropicOrEqualPair);
    }
    let na = m.reduce(2 * m.sub(b.x, a.x));
    let nb = m.reduce(2 * m.sub(b.y, a.y));
    let c = m.sub(b.norm(m), a.norm(m));
    Ok(CanonicalLine::new(na, nb, c, m))
}

/// True iff `c` satisfies the line equation.
#[inline]
pub fn on_line(c: Point2, l: &CanonicalLine, m: &PrimeModulus) -> bool {
    m.reduce(l.a * c.x + l.b * c.y) == l.c
}

/// Lifts `a` onto the paraboloid `z = x^2 + y^2`.
#[inline]
pub fn lift(a: Point2, m: &PrimeModulus) -> LiftedPoint {
    LiftedPoint {
        x: a.x,
        y: a.y,
        z: a.norm(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_modulus;

    fn pt(x: u64, y: u64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn dist_examples() {
        let m7 = make_modulus(7).unwrap();
        assert_eq!(dist2(pt(0, 0), pt(0, 0), &m7), 0);
        assert_eq!(dist2(pt(1, 2), pt(3, 5), &m7), 6);
        // p = 5 is 1 mod 4: isotropic pair at distance zero.
        let m5 = make_modulus(5).unwrap();
        assert_eq!(dist2(pt(0, 0), pt(1, 2), &m5), 0);
    }

    #[test]
    fn anisotropy_exhaustive_small() {
        // For p = 3 (mod 4), ||x - y|| = 0 iff x = y.
        for q in [3u64, 7, 11] {
            let m = make_modulus(q).unwrap();
            for x1 in 0..q {
                for y1 in 0..q {
                    let v = pt(x1, y1);
                    assert_eq!(dist2(v, pt(0, 0), &m) == 0, v == pt(0, 0));
                }
            }
        }
    }

    #[test]
    fn corner_examples() {
        let m = make_modulus(7).unwrap();
        assert!(is_corner(pt(2, 3), pt(2, 3), pt(5, 1), &m));
        assert!(is_corner(pt(0, 0), pt(1, 0), pt(0, 1), &m));
        assert!(!is_corner(pt(0, 0), pt(1, 0), pt(1, 1), &m));
    }

    #[test]
    fn rectangle_examples() {
        let m = make_modulus(7).unwrap();
        assert!(is_rectangle(pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1), &m));
        let a = pt(3, 4);
        assert!(is_rectangle(a, a, a, a, &m));
        assert!(!is_rectangle(pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 1), &m));
    }

    #[test]
    fn degenerate_quad_examples() {
        let m = make_modulus(7).unwrap();
        let a = pt(2, 2);
        assert!(is_degenerate_quad(a, a, a, a, &m));
        assert!(is_degenerate_quad(pt(0, 0), pt(1, 0), pt(2, 0), pt(3, 0), &m));
        assert!(!is_degenerate_quad(pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1), &m));
    }

    #[test]
    fn bisector_examples() {
        let m = make_modulus(7).unwrap();
        assert_eq!(
            bisector(pt(0, 0), pt(2, 0), &m),
            Ok(CanonicalLine { a: 1, b: 0, c: 1 })
        );
        assert_eq!(
            bisector(pt(0, 0), pt(0, 2), &m),
            Ok(CanonicalLine { a: 0, b: 1, c: 1 })
        );
        let m5 = make_modulus(5).unwrap();
        assert_eq!(
            bisector(pt(0, 0), pt(1, 2), &m5),
            Err(GeomError::IsotropicOrEqualPair)
        );
    }

    #[test]
    fn bisector_symmetry_and_characterization() {
        // bisector(a,b) = bisector(b,a), and c lies on it iff c is
        // equidistant from a and b. Exhaustive over F_7^2 pairs with a
        // fixed probe batch.
        let m = make_modulus(7).unwrap();
        let all: Vec<Point2> = (0..7)
            .flat_map(|x| (0..7).map(move |y| pt(x, y)))
            .collect();
        for &a in &all {
            for &b in &all {
                if dist2(a, b, &m) == 0 {
                    continue;
                }
                let l = bisector(a, b, &m).unwrap();
                assert_eq!(l, bisector(b, a, &m).unwrap());
                for &c in &all {
                    assert_eq!(on_line(c, &l, &m), dist2(c, a, &m) == dist2(c, b, &m));
                }
            }
        }
    }

    #[test]
    fn on_line_examples() {
        let m = make_modulus(7).unwrap();
        let l = CanonicalLine { a: 1, b: 0, c: 1 };
        assert!(on_line(pt(1, 3), &l, &m));
        assert!(!on_line(pt(2, 0), &l, &m));
    }

    #[test]
    fn lift_examples() {
        let m = make_modulus(7).unwrap();
        assert_eq!(lift(pt(0, 0), &m), LiftedPoint { x: 0, y: 0, z: 0 });
        assert_eq!(lift(pt(1, 2), &m), LiftedPoint { x: 1, y: 2, z: 5 });
        assert_eq!(lift(pt(3, 5), &m), LiftedPoint { x: 3, y: 5, z: 6 });
    }

    #[test]
    fn line_normalization_collapses_proportional_triples() {
        let m = make_modulus(11).unwrap();
        let l1 = CanonicalLine::new(3, 5, 7, &m);
        let l2 = CanonicalLine::new(6, 10, 3, &m); // same triple scaled by 2
        assert_eq!(l1, l2);
        let v1 = CanonicalLine::new(0, 4, 8, &m);
        let v2 = CanonicalLine::new(0, 1, 2, &m);
        assert_eq!(v1, v2);
    }

    #[test]
    fn rectangle_diagonal_characterization_exhaustive_f3() {
        // (a,b,c,d) is a rectangle iff a + c = b + d and ||a-c|| = ||b-d||,
        // for p = 3 (mod 4). Checked on every quadruple of F_3^2.
        let m = make_modulus(3).unwrap();
        let all: Vec<Point2> = (0..3)
            .flat_map(|x| (0..3).map(move |y| pt(x, y)))
            .collect();
        for &a in &all {
            for &b in &all {
                for &c in &all {
                    for &d in &all {
                        let by_corners = is_rectangle(a, b, c, d, &m);
                        let by_diagonals = m.add(a.x, c.x) == m.add(b.x, d.x)
                            && m.add(a.y, c.y) == m.add(b.y, d.y)
                            && dist2(a, c, &m) == dist2(b, d, &m);
                        assert_eq!(by_corners, by_diagonals);
                    }
                }
            }
        }
    }
}
