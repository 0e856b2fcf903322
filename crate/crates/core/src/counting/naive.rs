//! Brute-force reference enumerators for every counting engine.
//!
//! These spell out the defining quantifiers directly (O(n^3) and O(n^4)
//! loops) and share no code path with the fast engines; the test suites
//! require exact agreement between the two on exhaustive small cases and
//! randomized sets.

use super::PlaneSet;
use crate::geom::{self, CanonicalLine};

/// `#{(a,b,c,d) : ||a-b|| = ||c-d||}`, the second moment by definition.
pub fn equal_distance_quadruples(set: &PlaneSet) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let mut count = 0u128;
    for &a in pts {
        for &b in pts {
            let d1 = geom::dist2(a, b, m);
            for &c in pts {
                for &d in pts {
                    if geom::dist2(c, d, m) == d1 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// `#{(a,b,c) : ||a-c|| = ||b-c|| != 0}` by definition.
pub fn isosceles_count(set: &PlaneSet) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let mut count = 0u128;
    for &a in pts {
        for &b in pts {
            for &c in pts {
                let d1 = geom::dist2(a, c, m);
                if d1 != 0 && d1 == geom::dist2(b, c, m) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Ordered quadruples passing the four-corner rectangle test and not all
/// collinear.
pub fn rectangle_count(set: &PlaneSet) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let mut count = 0u128;
    for &a in pts {
        for &b in pts {
            for &c in pts {
                for &d in pts {
                    if geom::is_rectangle(a, b, c, d, m) && !geom::is_degenerate_quad(a, b, c, d, m)
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Ordered quadruples with `a != b`, `c != d` and equal lifted differences.
pub fn paraboloid_quadruples(set: &PlaneSet) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let lifted: Vec<_> = pts.iter().map(|&q| geom::lift(q, m)).collect();
    let mut count = 0u128;
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let dx = m.sub(lifted[j].x, lifted[i].x);
            let dy = m.sub(lifted[j].y, lifted[i].y);
            let dz = m.sub(lifted[j].z, lifted[i].z);
            for k in 0..pts.len() {
                for l in 0..pts.len() {
                    if k == l {
                        continue;
                    }
                    if m.sub(lifted[l].x, lifted[k].x) == dx
                        && m.sub(lifted[l].y, lifted[k].y) == dy
                        && m.sub(lifted[l].z, lifted[k].z) == dz
                    {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Sum of squared bisector-line multiplicities, by comparing canonical
/// lines across all pair-of-pair combinations.
pub fn bisector_energy(set: &PlaneSet) -> u128 {
    let lines = pair_bisectors(set);
    let mut count = 0u128;
    for l1 in &lines {
        for l2 in &lines {
            if l1 == l2 {
                count += 1;
            }
        }
    }
    count
}

/// `#{(a,b,c) : a != b, ||a-b|| != 0, c on the bisector of (a,b)}`.
pub fn bisector_incidences(set: &PlaneSet) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let mut count = 0u128;
    for &a in pts {
        for &b in pts {
            if a == b {
                continue;
            }
            let Ok(line) = geom::bisector(a, b, m) else {
                continue;
            };
            for &c in pts {
                if geom::on_line(c, &line, m) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Canonical bisector lines of all ordered pairs with a defined bisector.
fn pair_bisectors(set: &PlaneSet) -> Vec<CanonicalLine> {
    let m = set.modulus();
    let pts = set.points();
    let mut lines = Vec::new();
    for &a in pts {
        for &b in pts {
            if a == b {
                continue;
            }
            if let Ok(line) = geom::bisector(a, b, m) {
                lines.push(line);
            }
        }
    }
    lines
}
