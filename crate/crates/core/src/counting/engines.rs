//! Chunked exact engines behind the counting operations.
//!
//! The bisector-energy counter groups ordered pairs by the direction of
//! `b - a`: pairs sharing a bisector line necessarily share a direction,
//! and within one direction the line is pinned by a single residue (the
//! doubled midpoint evaluation). Each direction is swept with O(p + n)
//! scratch and version-stamped buckets, accumulating the sum of squared
//! class sizes incrementally so no per-direction teardown is needed.
//!
//! The rectangle and paraboloid counters group ordered pairs by one
//! coordinate of their key (the `x`-sum of the pair, resp. the `x`-step of
//! the difference) and aggregate the remaining key components by sorting a
//! per-class buffer; partner points are found through the column index of
//! the set, so enumeration never touches empty classes' points.
//!
//! Dense `O(p)` scratch tables are used when `p` is small enough; larger
//! moduli fall back to sorted-key aggregation (memory proportional to the
//! pair count) or to realized-class lists. All partial results merge by
//! exact integer addition, so parallel and sequential drivers agree
//! bit-for-bit.

use super::PlaneSet;
use crate::exec::{self, Driver};
use crate::field::{fp_inv, PrimeModulus, Scalar};

/// Largest modulus for which per-worker dense scratch tables of size `p`
/// are considered cheap (a few dozen MB per worker).
const DENSE_P_LIMIT: u64 = 1 << 22;

/// Cost cap for scanning every residue class of slopes / coordinate sums.
const SCAN_ALL_COST_CAP: u128 = 20_000_000_000;

/// Largest realized-class list worth materializing; beyond it the sweep
/// scans every residue class even when that is the slower option.
const LIST_CAP: u128 = 50_000_000;

/// Which residue classes a sweep visits.
enum ClassPlan {
    /// Visit all of `0..p`.
    All,
    /// Visit only the listed classes (sorted, deduplicated).
    List(Vec<Scalar>),
}

impl ClassPlan {
    fn len(&self, p: u64) -> usize {
        match self {
            ClassPlan::All => p as usize,
            ClassPlan::List(v) => v.len(),
        }
    }

    fn get(&self, i: usize) -> Scalar {
        match self {
            ClassPlan::All => i as Scalar,
            ClassPlan::List(v) => v[i],
        }
    }

    fn is_all(&self) -> bool {
        matches!(self, ClassPlan::All)
    }
}

fn scan_all_affordable(p: u64, n: usize) -> bool {
    (p as u128) * (n as u128 + 1) <= SCAN_ALL_COST_CAP
}

/// Realized slopes of point differences: `(y_j - y_i) / (x_j - x_i)` over
/// unordered pairs with distinct `x`. Vertical pairs are handled separately
/// by every sweep.
fn realized_slopes(set: &PlaneSet) -> Vec<Scalar> {
    let m = set.modulus();
    let pts = set.points();
    let mut slopes = Vec::new();
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let dx = m.sub(pts[j].x, pts[i].x);
            if dx == 0 {
                continue;
            }
            let dy = m.sub(pts[j].y, pts[i].y);
            slopes.push(m.mul(dy, fp_inv(dx, m).expect("nonzero")));
        }
    }
    slopes.sort_unstable();
    slopes.dedup();
    slopes
}

fn slope_plan(set: &PlaneSet) -> ClassPlan {
    let n = set.len() as u128;
    if scan_all_affordable(set.modulus().p(), set.len()) || n * n > LIST_CAP {
        ClassPlan::All
    } else {
        ClassPlan::List(realized_slopes(set))
    }
}

/// Whether pairs are matched through the sum or the difference of their
/// `x` coordinates.
#[derive(Clone, Copy, PartialEq, Eq)]
enum PairBy {
    /// Key class `a.x + b.x`; pairs include `a = b`. Subkey
    /// `(a.y + b.y, ||a - b||)` — the rectangle-diagonal key.
    ColumnSum,
    /// Key class `b.x - a.x`; pairs exclude `a = b`. Subkey
    /// `(b.y - a.y, ||b|| - ||a||)` — the lifted-difference key.
    ColumnDiff,
}

/// Realized key classes of the column-pair scan: the sumset or difference
/// set of the occupied column keys.
fn column_plan(set: &PlaneSet, by: PairBy) -> ClassPlan {
    let k = set.columns().len() as u128;
    if scan_all_affordable(set.modulus().p(), set.len()) || k * k > LIST_CAP {
        return ClassPlan::All;
    }
    let m = set.modulus();
    let keys: Vec<Scalar> = set.columns().iter().map(|(k, _)| *k).collect();
    let mut classes = Vec::with_capacity(keys.len() * keys.len());
    for &a in &keys {
        for &b in &keys {
            classes.push(match by {
                PairBy::ColumnSum => m.add(a, b),
                PairBy::ColumnDiff => m.sub(b, a),
            });
        }
    }
    classes.sort_unstable();
    classes.dedup();
    ClassPlan::List(classes)
}

/// Sum over key classes of the squared ordered-pair multiplicity, with the
/// class structure of [`PairBy`]. One `x`-class is processed at a time:
/// partner columns come from the set's column index and the remaining key
/// components are aggregated by sorting a packed buffer.
fn column_pair_scan(set: &PlaneSet, by: PairBy, driver: Driver) -> u128 {
    let n = set.len();
    let min_n = if by == PairBy::ColumnSum { 1 } else { 2 };
    if n < min_n {
        return 0;
    }
    let m = set.modulus();
    let bits = 64 - (m.p() - 1).max(1).leading_zeros() as u64;
    let plan = column_plan(set, by);
    // Contiguous class chunks let the scan walk each ordered column pair
    // exactly once; needs three key fields packed into a u64.
    if plan.is_all() && 3 * bits <= 64 {
        return arc_column_scan(set, by, bits, driver);
    }
    per_class_column_scan(set, by, &plan, driver)
}

/// Subkey of an ordered pair for the column-pair scans.
#[inline]
fn pair_subkey(
    by: PairBy,
    m: &PrimeModulus,
    set: &PlaneSet,
    i: usize,
    j: usize,
) -> (Scalar, Scalar) {
    let a = set.points()[i];
    let b = set.points()[j];
    match by {
        PairBy::ColumnSum => {
            let dx = m.sub(a.x, b.x);
            let dy = m.sub(a.y, b.y);
            (m.add(a.y, b.y), m.reduce(dx * dx + dy * dy))
        }
        PairBy::ColumnDiff => (m.sub(b.y, a.y), m.sub(set.norms()[j], set.norms()[i])),
    }
}

fn squared_runs(buf: &mut [u64]) -> u128 {
    buf.sort_unstable();
    let mut acc = 0u128;
    let mut i = 0;
    while i < buf.len() {
        let mut j = i + 1;
        while j < buf.len() && buf[j] == buf[i] {
            j += 1;
        }
        let run = (j - i) as u128;
        acc += run * run;
        i = j;
    }
    acc
}

/// Scans class values `[v0, v1)` per chunk: for every occupied column the
/// partner keys of the whole chunk form one contiguous arc mod p, so the
/// occupied partner columns come straight off the sorted column list.
fn arc_column_scan(set: &PlaneSet, by: PairBy, bits: u64, driver: Driver) -> u128 {
    let m = set.modulus();
    let p = m.p();
    let pts = set.points();
    let columns = set.columns();
    // Size chunks so the per-chunk pair buffer stays cache-friendly.
    let pairs = set.len() as u128 * set.len() as u128;
    let chunks = ((pairs / 500_000) as usize).clamp(exec::chunk_count(p as usize), p as usize);
    let ranges = exec::split_ranges(p as usize, chunks);
    let map = |r: std::ops::Range<usize>| {
        let v0 = r.start as u64;
        let width = (r.end - r.start) as u64;
        let mut buf: Vec<u64> = Vec::new();
        for (c, arange) in columns {
            // Partner-key arc for this column across the whole chunk.
            let lo = match by {
                PairBy::ColumnSum => m.sub(v0, *c),
                PairBy::ColumnDiff => m.add(*c, v0),
            };
            // The arc [lo, lo + width) may wrap; split it.
            let parts = if lo + width <= p {
                [(lo, lo + width), (0, 0)]
            } else {
                [(lo, p), (0, lo + width - p)]
            };
            for (sub_lo, sub_hi) in parts {
                if sub_lo >= sub_hi {
                    continue;
                }
                let start = columns.partition_point(|(k, _)| *k < sub_lo);
                for (pc, brange) in &columns[start..] {
                    if *pc >= sub_hi {
                        break;
                    }
                    let class = match by {
                        PairBy::ColumnSum => m.add(*c, *pc),
                        PairBy::ColumnDiff => m.sub(*pc, *c),
                    };
                    let local = class - v0;
                    let tag = local << (2 * bits);
                    for i in arange.start as usize..arange.end as usize {
                        for j in brange.start as usize..brange.end as usize {
                            if by == PairBy::ColumnDiff && i == j {
                                continue;
                            }
                            let (k1, k2) = pair_subkey(by, m, set, i, j);
                            buf.push(tag | (k1 << bits) | k2);
                        }
                    }
                }
            }
        }
        squared_runs(&mut buf)
    };
    let _ = pts;
    exec::merge_sums(driver, ranges, &map)
}

/// One class at a time with partner lookups through the column index; used
/// for sparse realized-class lists and for moduli too large to pack three
/// key fields into a u64.
fn per_class_column_scan(set: &PlaneSet, by: PairBy, plan: &ClassPlan, driver: Driver) -> u128 {
    let m = set.modulus();
    let plan_slots = plan.len(m.p());
    let ranges = exec::split_ranges(plan_slots, exec::chunk_count(plan_slots));
    let columns = set.columns();
    let map = |r: std::ops::Range<usize>| {
        let mut acc = 0u128;
        let mut buf: Vec<u64> = Vec::new();
        for idx in r {
            let class = plan.get(idx);
            buf.clear();
            for (cx, arange) in columns {
                let partner = match by {
                    PairBy::ColumnSum => m.sub(class, *cx),
                    PairBy::ColumnDiff => m.add(*cx, class),
                };
                let brange = set.column_range(partner);
                if brange.is_empty() {
                    continue;
                }
                for i in arange.start as usize..arange.end as usize {
                    for j in brange.clone() {
                        if by == PairBy::ColumnDiff && i == j {
                            continue;
                        }
                        let (k1, k2) = pair_subkey(by, m, set, i, j);
                        buf.push((k1 << 32) | k2);
                    }
                }
            }
            acc += squared_runs(&mut buf);
        }
        acc
    };
    exec::merge_sums(driver, ranges, &map)
}

/// Version-stamped scratch for the bisector-energy sweep. Stale entries
/// are recognized by their stamp, so nothing is cleared between
/// directions.
struct EnergyScratch {
    /// Per line id: stamp << 32 | (point index + 1).
    head: Vec<u64>,
    /// Linked-list next pointers (point index + 1, 0 terminates).
    next: Vec<u32>,
    /// Per pair key: stamp << 64 | ordered-pair count.
    counts: Vec<u128>,
    /// Current line id per point, updated incrementally across slopes.
    ids: Vec<Scalar>,
}

impl EnergyScratch {
    fn new(p: u64, n: usize) -> Self {
        EnergyScratch {
            head: vec![0; p as usize],
            next: vec![0; n],
            counts: vec![0; p as usize],
            ids: vec![0; n],
        }
    }
}

/// One direction of the bisector-energy sweep: buckets points into
/// parallel lines, and pairs each point against the earlier points on its
/// line as it is inserted. Every unordered pair bumps its line-key count
/// by 2 (both orders share the key), growing the squared-class-size sum by
/// `4c + 4`.
fn energy_direction(
    set: &PlaneSet,
    m: &PrimeModulus,
    scr: &mut EnergyScratch,
    slope: Option<Scalar>,
    stamp: u64,
    acc: &mut u128,
) {
    let pts = set.points();
    let head_stamp = stamp << 32;
    let count_stamp = (stamp as u128) << 64;
    for (i, a) in pts.iter().enumerate() {
        let id = match slope {
            Some(_) => scr.ids[i] as usize,
            None => a.x as usize,
        };
        let entry = scr.head[id];
        let mut cur = if entry & !0xffff_ffff == head_stamp {
            (entry & 0xffff_ffff) as u32
        } else {
            0
        };
        scr.next[i] = cur;
        scr.head[id] = head_stamp | (i as u64 + 1);
        while cur != 0 {
            let j = (cur - 1) as usize;
            let b = pts[j];
            // Doubled constant of the common bisector line: determined by
            // the midpoint evaluated against the direction normal.
            let key = match slope {
                Some(s) => m.reduce(s * (a.y + b.y) + (a.x + b.x)),
                None => m.reduce(a.y + b.y),
            } as usize;
            let c = scr.counts[key];
            let c_val = if c & !0xffff_ffff_ffff_ffff == count_stamp {
                c as u64
            } else {
                0
            };
            scr.counts[key] = count_stamp | (c_val + 2) as u128;
            *acc += 4 * c_val as u128 + 4;
            cur = scr.next[j];
        }
    }
}

fn energy_chunk(
    set: &PlaneSet,
    plan: &ClassPlan,
    range: std::ops::Range<usize>,
    include_vertical: bool,
) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let n = pts.len();
    let mut scr = EnergyScratch::new(m.p(), n);
    let mut acc = 0u128;
    let mut stamp = 1u64;

    if include_vertical {
        energy_direction(set, m, &mut scr, None, stamp, &mut acc);
    }
    if range.is_empty() {
        return acc;
    }

    let mut prev: Option<Scalar> = None;
    for idx in range {
        let s = plan.get(idx);
        match prev {
            Some(ps) if plan.is_all() && s == ps + 1 => {
                for (i, a) in pts.iter().enumerate() {
                    scr.ids[i] = m.sub(scr.ids[i], a.x);
                }
            }
            Some(ps) if s == ps => {}
            _ => {
                for (i, a) in pts.iter().enumerate() {
                    scr.ids[i] = m.sub(a.y, m.reduce(s * a.x));
                }
            }
        }
        prev = Some(s);
        // Isotropic directions carry no bisectors: all their pairs have
        // ||a - b|| = 0.
        if m.add(1, m.mul(s, s)) == 0 {
            continue;
        }
        stamp += 1;
        energy_direction(set, m, &mut scr, Some(s), stamp, &mut acc);
    }
    acc
}

/// Q(E): ordered pairs of ordered pairs sharing a bisector line.
pub(super) fn bisector_energy(set: &PlaneSet, driver: Driver) -> u128 {
    let n = set.len();
    if n < 2 {
        return 0;
    }
    let m = set.modulus();
    if m.p() > DENSE_P_LIMIT {
        return sorted_key_sweep(set, LineKind::Energy);
    }
    let plan = slope_plan(set);
    let slots = plan.len(m.p());
    let mut ranges = exec::split_ranges(slots, exec::chunk_count(slots));
    if ranges.is_empty() {
        // No slope classes (all pairs vertical): still run the vertical one.
        ranges.push(0..0);
    }
    let map = |r: std::ops::Range<usize>| {
        let include_vertical = r.start == 0;
        energy_chunk(set, &plan, r, include_vertical)
    };
    exec::merge_sums(driver, ranges, &map)
}

/// Scratch for the incidence sweep; this one walks each direction's
/// buckets after building them, so it keeps explicit touched lists.
struct IncidenceScratch {
    head: Vec<u32>,
    next: Vec<u32>,
    touched: Vec<u32>,
    chain: Vec<u32>,
    ids: Vec<Scalar>,
    counts: Vec<u64>,
    ckeys: Vec<u32>,
    evals: Vec<u64>,
    ekeys: Vec<u32>,
    evs: Vec<Scalar>,
}

const NONE32: u32 = u32::MAX;

impl IncidenceScratch {
    fn new(p: u64, n: usize) -> Self {
        IncidenceScratch {
            head: vec![NONE32; p as usize],
            next: vec![NONE32; n],
            touched: Vec::new(),
            chain: Vec::new(),
            ids: vec![0; n],
            counts: vec![0; p as usize],
            ckeys: Vec::new(),
            evals: vec![0; p as usize],
            ekeys: Vec::new(),
            evs: vec![0; n],
        }
    }
}

/// One direction of the incidence sweep: pair multiplicities per bisector
/// line, times the number of set points on that line.
fn incidence_direction(
    set: &PlaneSet,
    m: &PrimeModulus,
    scr: &mut IncidenceScratch,
    slope: Option<Scalar>,
    acc: &mut u128,
) {
    let pts = set.points();

    scr.touched.clear();
    for (i, a) in pts.iter().enumerate() {
        let id = match slope {
            Some(_) => scr.ids[i] as usize,
            None => a.x as usize,
        };
        if scr.head[id] == NONE32 {
            scr.touched.push(id as u32);
        }
        scr.next[i] = scr.head[id];
        scr.head[id] = i as u32;
    }

    // A point c lies on the bisector of (a, b) in this direction iff its
    // doubled evaluation matches the pair key.
    scr.ekeys.clear();
    for (i, a) in pts.iter().enumerate() {
        let e = match slope {
            Some(_) => scr.evs[i] as usize,
            None => m.reduce(2 * a.y) as usize,
        };
        if scr.evals[e] == 0 {
            scr.ekeys.push(e as u32);
        }
        scr.evals[e] += 1;
    }

    scr.ckeys.clear();
    for ti in 0..scr.touched.len() {
        let id = scr.touched[ti] as usize;
        scr.chain.clear();
        let mut cur = scr.head[id];
        while cur != NONE32 {
            scr.chain.push(cur);
            cur = scr.next[cur as usize];
        }
        scr.head[id] = NONE32;
        if scr.chain.len() < 2 {
            continue;
        }
        for (ci, &iu) in scr.chain.iter().enumerate() {
            let u = pts[iu as usize];
            for &iv in scr.chain.iter().skip(ci + 1) {
                let v = pts[iv as usize];
                let key = match slope {
                    Some(s) => m.reduce(s * (u.y + v.y) + (u.x + v.x)),
                    None => m.reduce(u.y + v.y),
                } as usize;
                if scr.counts[key] == 0 {
                    scr.ckeys.push(key as u32);
                }
                // both orders of the unordered pair share the line
                scr.counts[key] += 2;
            }
        }
    }

    for &k in &scr.ckeys {
        *acc += scr.counts[k as usize] as u128 * scr.evals[k as usize] as u128;
        scr.counts[k as usize] = 0;
    }
    for &e in &scr.ekeys {
        scr.evals[e as usize] = 0;
    }
    scr.touched.clear();
}

fn incidence_chunk(
    set: &PlaneSet,
    plan: &ClassPlan,
    range: std::ops::Range<usize>,
    include_vertical: bool,
) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let n = pts.len();
    let mut scr = IncidenceScratch::new(m.p(), n);
    let mut acc = 0u128;

    if include_vertical {
        incidence_direction(set, m, &mut scr, None, &mut acc);
    }
    if range.is_empty() {
        return acc;
    }

    let mut prev: Option<Scalar> = None;
    for idx in range {
        let s = plan.get(idx);
        match prev {
            Some(ps) if plan.is_all() && s == ps + 1 => {
                for (i, a) in pts.iter().enumerate() {
                    scr.ids[i] = m.sub(scr.ids[i], a.x);
                    scr.evs[i] = m.add(scr.evs[i], m.reduce(2 * a.y));
                }
            }
            Some(ps) if s == ps => {}
            _ => {
                for (i, a) in pts.iter().enumerate() {
                    scr.ids[i] = m.sub(a.y, m.reduce(s * a.x));
                    scr.evs[i] = m.reduce(2 * a.x + m.reduce(s * m.reduce(2 * a.y)));
                }
            }
        }
        prev = Some(s);
        if m.add(1, m.mul(s, s)) == 0 {
            continue;
        }
        incidence_direction(set, m, &mut scr, Some(s), &mut acc);
    }
    acc
}

/// Triples `(a, b, c)` with `a != b`, `||a - b|| != 0` and `c` on the
/// bisector of `(a, b)`.
pub(super) fn bisector_incidences(set: &PlaneSet, driver: Driver) -> u128 {
    let n = set.len();
    if n < 2 {
        return 0;
    }
    let m = set.modulus();
    if m.p() > DENSE_P_LIMIT {
        return sorted_key_sweep(set, LineKind::Incidences);
    }
    let plan = slope_plan(set);
    let slots = plan.len(m.p());
    let mut ranges = exec::split_ranges(slots, exec::chunk_count(slots));
    if ranges.is_empty() {
        // No slope classes (all pairs vertical): still run the vertical one.
        ranges.push(0..0);
    }
    let map = |r: std::ops::Range<usize>| {
        let include_vertical = r.start == 0;
        incidence_chunk(set, &plan, r, include_vertical)
    };
    exec::merge_sums(driver, ranges, &map)
}

/// Ordered quadruples `(a, b, c, d)` with `a != b`, `c != d` and equal
/// lifted differences.
pub(super) fn paraboloid_quadruples(set: &PlaneSet, driver: Driver) -> u128 {
    column_pair_scan(set, PairBy::ColumnDiff, driver)
}

/// Sum over keys `(a + c, ||a - c||)` of the squared ordered-pair
/// multiplicity, including the `a = c` pairs — the rectangle-diagonal
/// coincidence count.
pub(super) fn diagonal_coincidences(set: &PlaneSet, driver: Driver) -> u128 {
    column_pair_scan(set, PairBy::ColumnSum, driver)
}

#[derive(Clone, Copy)]
enum LineKind {
    Energy,
    Incidences,
}

/// Fallback for large moduli: materializes one bisector-line key per
/// ordered pair and aggregates by sorting. Exact, but memory grows with
/// the pair count.
fn sorted_key_sweep(set: &PlaneSet, kind: LineKind) -> u128 {
    let m = set.modulus();
    let pts = set.points();
    let n = pts.len();
    let vertical_tag = u128::from(u64::MAX);
    let mut keys: Vec<u128> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in (i + 1)..n {
            let (u, v) = (pts[i], pts[j]);
            if crate::geom::dist2(u, v, m) == 0 {
                continue;
            }
            let dx = m.sub(v.x, u.x);
            let (dir, cpp) = if dx == 0 {
                (vertical_tag, m.reduce(u.y + v.y))
            } else {
                let s = m.mul(m.sub(v.y, u.y), fp_inv(dx, m).expect("nonzero"));
                (s as u128, m.reduce(s * (u.y + v.y) + (u.x + v.x)))
            };
            keys.push((dir << 32) | cpp as u128);
        }
    }
    keys.sort_unstable();
    let mut acc = 0u128;
    let mut i = 0;
    while i < keys.len() {
        let mut j = i + 1;
        while j < keys.len() && keys[j] == keys[i] {
            j += 1;
        }
        // unordered run: both orders share the key
        let run = 2 * (j - i) as u128;
        match kind {
            LineKind::Energy => acc += run * run,
            LineKind::Incidences => {
                let dir = keys[i] >> 32;
                let cpp = (keys[i] & 0xffff_ffff) as u64;
                let on = pts
                    .iter()
                    .filter(|c| {
                        let e = if dir == vertical_tag {
                            m.reduce(2 * c.y)
                        } else {
                            let s = dir as u64;
                            m.reduce(2 * c.x + m.reduce(s * m.reduce(2 * c.y)))
                        };
                        e == cpp
                    })
                    .count();
                acc += run * on as u128;
            }
        }
        i = j;
    }
    acc
}

/// T(E) = sum over apexes c of the squared multiplicities of nonzero
/// distances from c.
pub(super) fn isosceles_count(set: &PlaneSet, driver: Driver) -> u128 {
    let n = set.len();
    if n < 2 {
        return 0;
    }
    let m = set.modulus();
    let pts = set.points();
    let ranges = exec::split_ranges(n, exec::chunk_count(n));
    if m.p() <= DENSE_P_LIMIT {
        let map = |r: std::ops::Range<usize>| {
            let mut hist = vec![0u64; m.p() as usize];
            let mut touched: Vec<u32> = Vec::with_capacity(n);
            let mut acc = 0u128;
            for ci in r {
                let c = pts[ci];
                touched.clear();
                for a in pts {
                    let dx = m.sub(a.x, c.x);
                    let dy = m.sub(a.y, c.y);
                    let d = m.reduce(dx * dx + dy * dy);
                    if d != 0 {
                        if hist[d as usize] == 0 {
                            touched.push(d as u32);
                        }
                        hist[d as usize] += 1;
                    }
                }
                for &t in &touched {
                    let v = hist[t as usize];
                    acc += (v as u128) * (v as u128);
                    hist[t as usize] = 0;
                }
            }
            acc
        };
        exec::merge_sums(driver, ranges, &map)
    } else {
        let map = |r: std::ops::Range<usize>| {
            let mut ds: Vec<u64> = Vec::with_capacity(n);
            let mut acc = 0u128;
            for ci in r {
                let c = pts[ci];
                ds.clear();
                ds.extend(pts.iter().filter_map(|a| {
                    let d = crate::geom::dist2(*a, c, m);
                    (d != 0).then_some(d)
                }));
                ds.sort_unstable();
                let mut i = 0;
                while i < ds.len() {
                    let mut j = i + 1;
                    while j < ds.len() && ds[j] == ds[i] {
                        j += 1;
                    }
                    let run = (j - i) as u128;
                    acc += run * run;
                    i = j;
                }
            }
            acc
        };
        exec::merge_sums(driver, ranges, &map)
    }
}

/// Full ordered-pair distance histogram, merged across chunks.
pub(super) fn distance_histogram(
    set: &PlaneSet,
    driver: Driver,
) -> std::collections::BTreeMap<Scalar, u64> {
    use std::collections::BTreeMap;
    let n = set.len();
    if n == 0 {
        return BTreeMap::new();
    }
    let m = set.modulus();
    let pts = set.points();
    let ranges = exec::split_ranges(n, exec::chunk_count(n));
    let dense = m.p() <= DENSE_P_LIMIT;
    let map = |r: std::ops::Range<usize>| -> BTreeMap<Scalar, u64> {
        if dense {
            let mut hist = vec![0u64; m.p() as usize];
            for xi in r {
                let x = pts[xi];
                for y in pts {
                    let dx = m.sub(x.x, y.x);
                    let dy = m.sub(x.y, y.y);
                    hist[m.reduce(dx * dx + dy * dy) as usize] += 1;
                }
            }
            hist.iter()
                .enumerate()
                .filter(|(_, &v)| v > 0)
                .map(|(t, &v)| (t as Scalar, v))
                .collect()
        } else {
            let mut map = BTreeMap::new();
            for xi in r {
                let x = pts[xi];
                for y in pts {
                    *map.entry(crate::geom::dist2(x, *y, m)).or_insert(0u64) += 1;
                }
            }
            map
        }
    };
    let merge = |mut a: BTreeMap<Scalar, u64>, b: BTreeMap<Scalar, u64>| {
        for (k, v) in b {
            *a.entry(k).or_insert(0) += v;
        }
        a
    };
    exec::map_merge_driver(driver, ranges, &map, &merge).unwrap_or_default()
}
