//! Counting quantities over a planar point set: the distance set and its
//! histogram, the second moment, isosceles triples, non-degenerate
//! rectangles, bisector energy with its class partition, bisector
//! incidences and paraboloid (lifted-difference) quadruples.
//!
//! All tuple counts are over ordered tuples and accumulate in 128-bit
//! integers. Every fast engine has an independent brute-force counterpart
//! in [`naive`], and the test suites require exact agreement.

mod engines;
pub mod naive;

use crate::exec::Driver;
use crate::field::{PrimeModulus, Scalar};
use crate::geom::{bisector, points_collinear, CanonicalLine, Point2};
use std::collections::{BTreeMap, BTreeSet};

/// A deduplicated subset of `F_p^2` with deterministic (sorted) iteration
/// order, plus the precomputed norms and column index the engines use.
#[derive(Debug, Clone)]
pub struct PlaneSet {
    m: PrimeModulus,
    pts: Vec<Point2>,
    norms: Vec<Scalar>,
    /// Distinct `x` values with the matching index range in `pts`.
    columns: Vec<(Scalar, std::ops::Range<u32>)>,
    /// Dense start-offset table per `x` (only for small moduli).
    col_dense: Option<Vec<u32>>,
}

/// Dense column tables are built when `p` is at most this.
const DENSE_COLUMN_LIMIT: u64 = 1 << 22;

impl PlaneSet {
    /// Builds a set from arbitrary points: coordinates are canonicalized,
    /// duplicates dropped, order fixed to sorted `(x, y)`.
    pub fn new(m: PrimeModulus, points: impl IntoIterator<Item = Point2>) -> Self {
        let mut pts: Vec<Point2> = points
            .into_iter()
            .map(|q| Point2::new(m.canon(q.x), m.canon(q.y)))
            .collect();
        pts.sort_unstable();
        pts.dedup();
        assert!(pts.len() < u32::MAX as usize, "point set too large");
        let norms = pts.iter().map(|q| q.norm(&m)).collect();
        let mut columns: Vec<(Scalar, std::ops::Range<u32>)> = Vec::new();
        let mut i = 0;
        while i < pts.len() {
            let mut j = i + 1;
            while j < pts.len() && pts[j].x == pts[i].x {
                j += 1;
            }
            columns.push((pts[i].x, i as u32..j as u32));
            i = j;
        }
        let col_dense = (m.p() <= DENSE_COLUMN_LIMIT).then(|| {
            let mut table = vec![0u32; m.p() as usize + 1];
            let mut next = 0usize;
            for x in 0..=m.p() {
                while next < columns.len() && columns[next].0 < x {
                    next += 1;
                }
                table[x as usize] = match columns.get(next) {
                    Some((cx, r)) if *cx < x => r.end,
                    Some((_, r)) => r.start,
                    None => pts.len() as u32,
                };
            }
            table
        });
        PlaneSet {
            m,
            pts,
            norms,
            columns,
            col_dense,
        }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &[Point2] {
        &self.pts
    }

    pub(crate) fn norms(&self) -> &[Scalar] {
        &self.norms
    }

    pub(crate) fn columns(&self) -> &[(Scalar, std::ops::Range<u32>)] {
        &self.columns
    }

    /// Index range of the points with the given `x` coordinate (empty when
    /// the column is unoccupied).
    pub(crate) fn column_range(&self, x: Scalar) -> std::ops::Range<usize> {
        if let Some(table) = &self.col_dense {
            // table[x] is the index of the first point with coordinate
            // >= x, so the occupied range is exactly table[x]..table[x+1].
            table[x as usize] as usize..table[x as usize + 1] as usize
        } else {
            match self.columns.binary_search_by_key(&x, |(k, _)| *k) {
                Ok(i) => {
                    let r = &self.columns[i].1;
                    r.start as usize..r.end as usize
                }
                Err(_) => 0..0,
            }
        }
    }


    /// The distance set: every value of `||x - y||` over ordered pairs,
    /// including 0 whenever the set is nonempty.
    pub fn distance_set(&self) -> BTreeSet<Scalar> {
        self.distance_histogram().counts.keys().copied().collect()
    }

    /// `|distance_set() \ {0}|`, a convenience for diagnostics.
    pub fn nonzero_distance_count(&self) -> u64 {
        let d = self.distance_set();
        (d.len() - usize::from(d.contains(&0))) as u64
    }

    /// Multiplicity of every distance value over ordered pairs.
    pub fn distance_histogram(&self) -> DistanceHistogram {
        DistanceHistogram {
            counts: engines::distance_histogram(self, Driver::Auto),
        }
    }

    /// Second moment of the distance histogram: the number of ordered
    /// quadruples `(a, b, c, d)` with `||a - b|| = ||c - d||`.
    pub fn second_moment(&self) -> u128 {
        self.distance_histogram().second_moment()
    }

    /// Ordered triples `(a, b, c)` with `||a - c|| = ||b - c|| != 0`.
    pub fn isosceles_count(&self) -> u128 {
        engines::isosceles_count(self, Driver::Auto)
    }

    /// Ordered quadruples `(a, b, c, d)` that form a rectangle (four
    /// designated corner triples) and are not all collinear.
    pub fn rectangle_count(&self) -> u128 {
        rectangle_count_impl(self, Driver::Auto)
    }

    /// Ordered quadruples `(a, b, c, d)` with `a != b`, `c != d` and equal
    /// lifted differences `(b - a, ||b|| - ||a||) = (d - c, ||d|| - ||c||)`.
    pub fn paraboloid_quadruples(&self) -> u128 {
        engines::paraboloid_quadruples(self, Driver::Auto)
    }

    /// Ordered pairs of ordered pairs sharing a bisector line; equals the
    /// sum of squared class sizes of [`PlaneSet::bisector_partition`].
    pub fn bisector_energy(&self) -> u128 {
        engines::bisector_energy(self, Driver::Auto)
    }

    /// Triples `(a, b, c)` with `a != b`, `||a - b|| != 0` and `c` on the
    /// bisector of `(a, b)`.
    pub fn bisector_incidences(&self) -> u128 {
        engines::bisector_incidences(self, Driver::Auto)
    }

    /// The full partition of ordered pairs by bisector line, each class
    /// refined by the exact lifted difference vector. Built directly from
    /// per-pair bisector computations; intended for small sets and as a
    /// structural cross-check of [`PlaneSet::bisector_energy`].
    pub fn bisector_partition(&self) -> BisectorPartition {
        let m = &self.m;
        let mut classes: BTreeMap<CanonicalLine, BisectorClass> = BTreeMap::new();
        for (i, &a) in self.pts.iter().enumerate() {
            for (j, &b) in self.pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let Ok(line) = bisector(a, b, m) else {
                    continue;
                };
                let nx = m.reduce(2 * m.sub(b.x, a.x));
                let ny = m.reduce(2 * m.sub(b.y, a.y));
                let w = m.sub(self.norms[j], self.norms[i]);
                let class = classes.entry(line).or_default();
                class.size += 1;
                *class.subclasses.entry((nx, ny, w)).or_insert(0) += 1;
            }
        }
        BisectorPartition { classes }
    }
}

/// Distance multiplicities `t -> nu(t)` over ordered pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DistanceHistogram {
    counts: BTreeMap<Scalar, u64>,
}

impl DistanceHistogram {
    pub fn counts(&self) -> &BTreeMap<Scalar, u64> {
        &self.counts
    }

    pub fn get(&self, t: Scalar) -> u64 {
        self.counts.get(&t).copied().unwrap_or(0)
    }

    /// Total mass; always `|E|^2`.
    pub fn total(&self) -> u128 {
        self.counts.values().map(|&v| v as u128).sum()
    }

    /// `sum_t nu(t)^2`.
    pub fn second_moment(&self) -> u128 {
        self.counts
            .values()
            .map(|&v| (v as u128) * (v as u128))
            .sum()
    }
}

/// One bisector-line class: its ordered-pair count and the refinement by
/// exact lifted difference vector `(2(b-a), ||b|| - ||a||)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BisectorClass {
    pub size: u64,
    pub subclasses: BTreeMap<(Scalar, Scalar, Scalar), u64>,
}

/// Partition of `{(a, b) : ||a - b|| != 0}` by common bisector line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BisectorPartition {
    classes: BTreeMap<CanonicalLine, BisectorClass>,
}

impl BisectorPartition {
    pub fn classes(&self) -> &BTreeMap<CanonicalLine, BisectorClass> {
        &self.classes
    }

    /// Total ordered pairs covered by the partition.
    pub fn pair_count(&self) -> u128 {
        self.classes.values().map(|c| c.size as u128).sum()
    }

    /// Sum of squared class sizes.
    pub fn energy(&self) -> u128 {
        self.classes
            .values()
            .map(|c| (c.size as u128) * (c.size as u128))
            .sum()
    }
}

fn rectangle_count_impl(set: &PlaneSet, driver: Driver) -> u128 {
    let n = set.len() as u128;
    if n < 3 {
        return 0;
    }
    if set.modulus().is_three_mod_four() {
        // Every key coincidence beyond the forced (a,c)/(c,a) ones is a
        // non-degenerate rectangle, so the degenerate mass has the closed
        // form 2|E|^2 - |E|.
        engines::diagonal_coincidences(set, driver) - (2 * n * n - n)
    } else {
        // Isotropic lines break the closed form: enumerate each key class
        // and subtract its collinear coincidences explicitly.
        rectangle_count_scanning(set)
    }
}

/// Keyed aggregation with per-class collinearity scanning; used when
/// `p = 1 (mod 4)`.
fn rectangle_count_scanning(set: &PlaneSet) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let mut classes: BTreeMap<(Scalar, Scalar, Scalar), Vec<(u32, u32)>> = BTreeMap::new();
    for (i, &a) in pts.iter().enumerate() {
        for (j, &c) in pts.iter().enumerate() {
            let key = (
                m.add(a.x, c.x),
                m.add(a.y, c.y),
                crate::geom::dist2(a, c, m),
            );
            classes.entry(key).or_default().push((i as u32, j as u32));
        }
    }
    let mut total = 0u128;
    for pairs in classes.values() {
        for &(i1, j1) in pairs {
            for &(i2, j2) in pairs {
                let (a, c) = (pts[i1 as usize], pts[j1 as usize]);
                let (b, d) = (pts[i2 as usize], pts[j2 as usize]);
                if !points_collinear(&[a, b, c, d], m) {
                    total += 1;
                }
            }
        }
    }
    total
}

/// Always-sequential entry points for the heavy counters. These drive the
/// same chunked engines as the default API but fold the chunks in order;
/// the bench suite and the determinism tests compare the two.
pub mod seq {
    use super::*;

    pub fn isosceles_count(set: &PlaneSet) -> u128 {
        engines::isosceles_count(set, Driver::Sequential)
    }

    pub fn rectangle_count(set: &PlaneSet) -> u128 {
        rectangle_count_impl(set, Driver::Sequential)
    }

    pub fn paraboloid_quadruples(set: &PlaneSet) -> u128 {
        engines::paraboloid_quadruples(set, Driver::Sequential)
    }

    pub fn bisector_energy(set: &PlaneSet) -> u128 {
        engines::bisector_energy(set, Driver::Sequential)
    }

    pub fn bisector_incidences(set: &PlaneSet) -> u128 {
        engines::bisector_incidences(set, Driver::Sequential)
    }

    pub fn distance_histogram(set: &PlaneSet) -> DistanceHistogram {
        DistanceHistogram {
            counts: engines::distance_histogram(set, Driver::Sequential),
        }
    }
}
