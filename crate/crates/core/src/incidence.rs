//! Exact point-plane incidence counting in `F_p^3`, collinear-richness
//! profiling, and the incidence encoding that turns the quadratic-shift
//! equation `(x+u)^2 - t = (x'+u')^2 - t'` into a point-plane problem.

use crate::checks::{CheckMode, CheckReport, CheckValue};
use crate::field::{fp_inv, PrimeModulus, Scalar};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error("encoding inputs must be nonempty")]
    EmptyInput,
}

/// A point of `F_p^3` in canonical residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point3 {
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl Point3 {
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Self {
        Point3 { x, y, z }
    }
}

/// A plane `{X : a X1 + b X2 + c X3 = d}` with the first nonzero normal
/// coordinate scaled to 1, so plane equality is raw field equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalPlane {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl CanonicalPlane {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar, m: &PrimeModulus) -> Self {
        assert!(
            a != 0 || b != 0 || c != 0,
            "degenerate plane coefficients"
        );
        let scale = if a != 0 {
            a
        } else if b != 0 {
            b
        } else {
            c
        };
        let inv = fp_inv(scale, m).expect("nonzero");
        CanonicalPlane {
            a: m.mul(a, inv),
            b: m.mul(b, inv),
            c: m.mul(c, inv),
            d: m.mul(d, inv),
        }
    }

    /// True iff the point satisfies the plane equation.
    #[inline]
    pub fn contains(&self, r: Point3, m: &PrimeModulus) -> bool {
        let lhs = m.reduce(m.reduce(self.a * r.x + self.b * r.y) + m.reduce(self.c * r.z));
        lhs == self.d
    }
}

/// A deduplicated point set and plane set sharing one modulus.
#[derive(Debug, Clone)]
pub struct IncidenceConfig {
    m: PrimeModulus,
    points: Vec<Point3>,
    planes: Vec<CanonicalPlane>,
}

/// Above this many point-plane combinations, `incidence_count` switches
/// from the direct double loop to keyed aggregation per plane normal.
const DIRECT_LOOP_LIMIT: u128 = 10_000_000;

impl IncidenceConfig {
    pub fn new(
        m: PrimeModulus,
        points: impl IntoIterator<Item = Point3>,
        planes: impl IntoIterator<Item = CanonicalPlane>,
    ) -> Self {
        let mut points: Vec<Point3> = points.into_iter().collect();
        points.sort_unstable();
        points.dedup();
        let mut planes: Vec<CanonicalPlane> = planes.into_iter().collect();
        planes.sort_unstable();
        planes.dedup();
        IncidenceConfig { m, points, planes }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.m
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn planes(&self) -> &[CanonicalPlane] {
        &self.planes
    }

    /// `|{(r, s) : r in s}|`, exact.
    pub fn incidence_count(&self) -> u128 {
        let product = self.points.len() as u128 * self.planes.len() as u128;
        if product <= DIRECT_LOOP_LIMIT {
            self.incidence_count_direct()
        } else {
            self.incidence_count_keyed()
        }
    }

    fn incidence_count_direct(&self) -> u128 {
        let m = &self.m;
        let mut count = 0u128;
        for s in &self.planes {
            for &r in &self.points {
                if s.contains(r, m) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Groups planes by normal; for each normal, histograms the constants
    /// and evaluates every point once per normal.
    fn incidence_count_keyed(&self) -> u128 {
        let m = &self.m;
        let mut by_normal: BTreeMap<(Scalar, Scalar, Scalar), BTreeMap<Scalar, u64>> =
            BTreeMap::new();
        for s in &self.planes {
            *by_normal
                .entry((s.a, s.b, s.c))
                .or_default()
                .entry(s.d)
                .or_insert(0) += 1;
        }
        let mut count = 0u128;
        for ((a, b, c), consts) in &by_normal {
            for &r in &self.points {
                let v = m.reduce(m.reduce(a * r.x + b * r.y) + m.reduce(c * r.z));
                if let Some(&mult) = consts.get(&v) {
                    count += mult as u128;
                }
            }
        }
        count
    }

    /// `max` over affine lines of `min(points of R on the line, planes of S
    /// containing the line)`, floored at 1. Lines are enumerated through
    /// point pairs of R; a line meeting R in at most one point contributes
    /// at most 1 to the max and is covered by the floor.
    pub fn collinear_rich_k(&self) -> u64 {
        let m = &self.m;
        let pts = &self.points;
        if pts.len() < 2 {
            return 1;
        }
        // Canonical line through two distinct points: normalized direction
        // plus the anchored base point with the direction component removed.
        let mut lines: BTreeMap<(Point3, Point3), u64> = BTreeMap::new();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let key = line_key(pts[i], pts[j], m);
                *lines.entry(key).or_insert(0) += 1;
            }
        }
        let mut best = 1u64;
        for (base, dir) in lines.into_keys() {
            let points_on = pts
                .iter()
                .filter(|r| {
                    // r = base + t*dir for the parameter read off at the
                    // normalized direction axis
                    let t = if dir.x == 1 {
                        r.x
                    } else if dir.y == 1 {
                        r.y
                    } else {
                        r.z
                    };
                    r.x == m.add(base.x, m.mul(t, dir.x))
                        && r.y == m.add(base.y, m.mul(t, dir.y))
                        && r.z == m.add(base.z, m.mul(t, dir.z))
                })
                .count() as u64;
            if points_on <= best {
                continue;
            }
            let planes_containing = self
                .planes
                .iter()
                .filter(|s| {
                    // normal orthogonal to the direction, and the base on it
                    let dot = m.reduce(m.reduce(s.a * dir.x + s.b * dir.y) + m.reduce(s.c * dir.z));
                    dot == 0 && s.contains(base, m)
                })
                .count() as u64;
            best = best.max(points_on.min(planes_containing));
        }
        best
    }

    /// Incidence count against the three-term point-plane bound
    /// `|R||S|/p + |R|^(1/2)|S| + k|S|` with `k = collinear_rich_k() + 1`;
    /// when `|R| > |S|` the roles are swapped (the richness parameter is
    /// self-dual). The ratio is informational: the bound's constant is
    /// unspecified.
    pub fn richness_bound_report(&self) -> CheckReport {
        let m = &self.m;
        let (nr, ns, swapped) = if self.points.len() <= self.planes.len() {
            (self.points.len() as f64, self.planes.len() as f64, false)
        } else {
            (self.planes.len() as f64, self.points.len() as f64, true)
        };
        let i = self.incidence_count() as f64;
        let k = (self.collinear_rich_k() + 1) as f64;
        let bound = nr * ns / m.p() as f64 + nr.sqrt() * ns + k * ns;
        let ratio = if bound == 0.0 { 0.0 } else { i / bound };
        CheckReport {
            name: "incidence_richness_bound".into(),
            lhs: CheckValue::Real(i),
            rhs: CheckValue::Real(bound),
            ratio: CheckValue::Real(ratio),
            mode: CheckMode::Report,
            pass: true,
            context: format!(
                "p={} |R|={} |S|={} k={} swapped={}",
                m.p(),
                self.points.len(),
                self.planes.len(),
                k,
                swapped
            ),
        }
    }
}

/// Canonical (base, direction) key of the line through two distinct points.
fn line_key(p: Point3, q: Point3, m: &PrimeModulus) -> (Point3, Point3) {
    let d = Point3::new(m.sub(q.x, p.x), m.sub(q.y, p.y), m.sub(q.z, p.z));
    // Scale the first nonzero coordinate of the direction to 1.
    let scale = if d.x != 0 {
        d.x
    } else if d.y != 0 {
        d.y
    } else {
        d.z
    };
    let inv = fp_inv(scale, m).expect("distinct points");
    let dir = Point3::new(m.mul(d.x, inv), m.mul(d.y, inv), m.mul(d.z, inv));
    // Anchor: remove the direction component at the first normalized axis.
    let t = if dir.x == 1 {
        p.x
    } else if dir.y == 1 {
        p.y
    } else {
        p.z
    };
    let base = Point3::new(
        m.sub(p.x, m.mul(t, dir.x)),
        m.sub(p.y, m.mul(t, dir.y)),
        m.sub(p.z, m.mul(t, dir.z)),
    );
    (base, dir)
}

/// Builds the point and plane families whose incidences count the
/// solutions of `(x+u)^2 - t = (x'+u')^2 - t'`:
/// points `(2x, u', x^2 - u'^2 - t)` and planes
/// `u X - 2x' Y + Z = x'^2 - u^2 - t'`.
///
/// Both parameterizations are injective, so deduplication never collapses
/// anything and the incidence count equals the six-fold solution count.
pub fn build_shift_config(
    m: PrimeModulus,
    xs: &[Scalar],
    us: &[Scalar],
    ts: &[Scalar],
) -> Result<IncidenceConfig, IncidenceError> {
    if xs.is_empty() || us.is_empty() || ts.is_empty() {
        return Err(IncidenceError::EmptyInput);
    }
    let mut points = Vec::with_capacity(xs.len() * us.len() * ts.len());
    let mut planes = Vec::with_capacity(points.capacity());
    for &x in xs {
        let x = m.canon(x);
        for &u in us {
            let u = m.canon(u);
            for &t in ts {
                let t = m.canon(t);
                let z = m.sub(m.sub(m.mul(x, x), m.mul(u, u)), t);
                points.push(Point3::new(m.reduce(2 * x), u, z));
            }
        }
    }
    for &u in us {
        let u = m.canon(u);
        for &x in xs {
            let x = m.canon(x);
            for &t in ts {
                let t = m.canon(t);
                let d = m.sub(m.sub(m.mul(x, x), m.mul(u, u)), t);
                planes.push(CanonicalPlane::new(u, m.neg(m.reduce(2 * x)), 1, d, &m));
            }
        }
    }
    Ok(IncidenceConfig::new(m, points, planes))
}

/// Reference enumerators for the incidence module.
pub mod naive {
    use super::*;

    /// Direct six-fold count of `(x, u, t, x', u', t')` with
    /// `(x+u)^2 - t = (x'+u')^2 - t'`.
    pub fn shift_solutions(m: &PrimeModulus, xs: &[Scalar], us: &[Scalar], ts: &[Scalar]) -> u128 {
        let value = |x: Scalar, u: Scalar, t: Scalar| {
            let s = m.add(m.canon(x), m.canon(u));
            m.sub(m.mul(s, s), m.canon(t))
        };
        let mut count = 0u128;
        for &x in xs {
            for &u in us {
                for &t in ts {
                    let v = value(x, u, t);
                    for &x2 in xs {
                        for &u2 in us {
                            for &t2 in ts {
                                if value(x2, u2, t2) == v {
                                    count += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_modulus;

    fn m7() -> PrimeModulus {
        make_modulus(7).unwrap()
    }

    #[test]
    fn incidence_examples() {
        let m = m7();
        let empty = IncidenceConfig::new(m, [], [CanonicalPlane::new(0, 0, 1, 0, &m)]);
        assert_eq!(empty.incidence_count(), 0);

        let one = IncidenceConfig::new(
            m,
            [Point3::new(0, 0, 0)],
            [CanonicalPlane::new(0, 0, 1, 0, &m)],
        );
        assert_eq!(one.incidence_count(), 1);

        // Cube corners against the planes X1 = 0 and X1 = 1.
        let corners = (0..8).map(|i| Point3::new(i & 1, (i >> 1) & 1, (i >> 2) & 1));
        let planes = [
            CanonicalPlane::new(1, 0, 0, 0, &m),
            CanonicalPlane::new(1, 0, 0, 1, &m),
        ];
        let cfg = IncidenceConfig::new(m, corners, planes);
        assert_eq!(cfg.incidence_count(), 8);
    }

    #[test]
    fn keyed_and_direct_counting_agree() {
        let m = m7();
        let points: Vec<Point3> = (0..7)
            .flat_map(|x| (0..7).map(move |y| Point3::new(x, y, (x * y) % 7)))
            .collect();
        let planes: Vec<CanonicalPlane> = (1..7)
            .flat_map(|a| (0..7).map(move |d| (a, d)))
            .map(|(a, d)| CanonicalPlane::new(a, 3, 1, d, &m))
            .collect();
        let cfg = IncidenceConfig::new(m, points, planes);
        assert_eq!(cfg.incidence_count_direct(), cfg.incidence_count_keyed());
        assert_eq!(cfg.incidence_count(), cfg.incidence_count_direct());
    }

    #[test]
    fn richness_report_on_shift_configs() {
        let m = make_modulus(11).unwrap();
        let cfg = build_shift_config(m, &[0, 1, 4], &[2, 3], &[0, 6]).unwrap();
        let report = cfg.richness_bound_report();
        assert!(report.pass);
        assert!(report.ratio.as_f64().is_finite());

        // Cube corners against X1 = 0 / X1 = 1: I = 8, terms exact.
        let m = m7();
        let corners = (0..8).map(|i| Point3::new(i & 1, (i >> 1) & 1, (i >> 2) & 1));
        let planes = [
            CanonicalPlane::new(1, 0, 0, 0, &m),
            CanonicalPlane::new(1, 0, 0, 1, &m),
        ];
        let cfg = IncidenceConfig::new(m, corners, planes);
        let report = cfg.richness_bound_report();
        assert_eq!(report.lhs.as_f64(), 8.0);
        // roles swapped: |R| = 8 > |S| = 2
        assert!(report.context.contains("swapped=true"));
    }

    #[test]
    fn collinear_rich_examples() {
        let m = m7();
        let cfg = IncidenceConfig::new(
            m,
            (0..4).map(|t| Point3::new(t, 0, 0)),
            [
                CanonicalPlane::new(0, 1, 0, 0, &m), // X2 = 0
                CanonicalPlane::new(0, 0, 1, 0, &m), // X3 = 0
            ],
        );
        assert_eq!(cfg.collinear_rich_k(), 2);

        let single = IncidenceConfig::new(m, [Point3::new(1, 2, 3)], []);
        assert_eq!(single.collinear_rich_k(), 1);

        // No plane contains any point-pair line: k = 1.
        let cfg = IncidenceConfig::new(
            m,
            [Point3::new(0, 0, 0), Point3::new(1, 0, 0)],
            [CanonicalPlane::new(0, 0, 1, 5, &m)],
        );
        assert_eq!(cfg.collinear_rich_k(), 1);
    }

    #[test]
    fn shift_config_examples() {
        let m = m7();
        let cfg = build_shift_config(m, &[3], &[2], &[1]).unwrap();
        assert_eq!(cfg.points().len(), 1);
        assert_eq!(cfg.planes().len(), 1);
        assert_eq!(cfg.incidence_count(), 1);

        let cfg = build_shift_config(m, &[0, 1], &[0], &[0]).unwrap();
        assert_eq!(cfg.incidence_count(), 2);
        assert_eq!(naive::shift_solutions(&m, &[0, 1], &[0], &[0]), 2);

        assert!(matches!(
            build_shift_config(m, &[], &[0], &[0]),
            Err(IncidenceError::EmptyInput)
        ));
    }

    #[test]
    fn shift_encoding_matches_brute_force() {
        let m = make_modulus(11).unwrap();
        let xs = [0, 1, 4, 9];
        let us = [2, 3, 5];
        let ts = [0, 6];
        let cfg = build_shift_config(m, &xs, &us, &ts).unwrap();
        assert_eq!(
            cfg.incidence_count(),
            naive::shift_solutions(&m, &xs, &us, &ts)
        );
    }

    #[test]
    fn richness_report_trivial() {
        let m = m7();
        let empty = IncidenceConfig::new(m, [], []);
        let report = empty.richness_bound_report();
        assert!(report.pass);
    }
}
