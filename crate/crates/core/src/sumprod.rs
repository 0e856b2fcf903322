//! Residue-set machinery: difference and square sets, representation
//! functions, fourth-order energy of the square set, level sets, the
//! popular difference set with its shifted intersections, and the
//! aggregated popularity energy.
//!
//! All popularity thresholds are compared in exact rational arithmetic by
//! cross-multiplication; membership never goes through floating point.

use crate::field::{PrimeModulus, Scalar};
use num::rational::Ratio;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumprodError {
    #[error("operands use different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),
}

/// A deduplicated, sorted subset of `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    m: PrimeModulus,
    elems: Vec<Scalar>,
}

impl ResidueSet {
    pub fn new(m: PrimeModulus, elems: impl IntoIterator<Item = Scalar>) -> Self {
        let mut elems: Vec<Scalar> = elems.into_iter().map(|x| m.canon(x)).collect();
        elems.sort_unstable();
        elems.dedup();
        ResidueSet { m, elems }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.m
    }

    pub fn elems(&self) -> &[Scalar] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: Scalar) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    fn same_modulus(&self, other: &ResidueSet) -> Result<(), SumprodError> {
        if self.m.p() != other.m.p() {
            return Err(SumprodError::ModulusMismatch(self.m.p(), other.m.p()));
        }
        Ok(())
    }
}

/// `{x - y : x in X, y in Y}`.
pub fn difference_set(x: &ResidueSet, y: &ResidueSet) -> Result<ResidueSet, SumprodError> {
    x.same_modulus(y)?;
    let m = x.m;
    Ok(ResidueSet::new(
        m,
        x.elems
            .iter()
            .flat_map(|&a| y.elems.iter().map(move |&b| m.sub(a, b))),
    ))
}

/// `{x + y : x in X, y in Y}`.
pub fn sum_set(x: &ResidueSet, y: &ResidueSet) -> Result<ResidueSet, SumprodError> {
    x.same_modulus(y)?;
    let m = x.m;
    Ok(ResidueSet::new(
        m,
        x.elems
            .iter()
            .flat_map(|&a| y.elems.iter().map(move |&b| m.add(a, b))),
    ))
}

/// `{a^2 : a in A}` as a set; the collisions `a^2 = (-a)^2` collapse.
pub fn square_set(a: &ResidueSet) -> ResidueSet {
    let m = a.m;
    ResidueSet::new(m, a.elems.iter().map(|&x| m.mul(x, x)))
}

/// The difference-quotient family built from `A`, plus the shifted set for
/// a caller-supplied `X`.
#[derive(Debug, Clone)]
pub struct DistLikeSets {
    /// `(A - A)^2`
    pub diff_squares: ResidueSet,
    /// `(A - A)^2 - (A - A)^2`
    pub diff_squares_diff: ResidueSet,
    /// `(A - A)^2 + (A - A)^2`
    pub diff_squares_sum: ResidueSet,
    /// `A^2 - A^2`
    pub square_diff: ResidueSet,
    /// `X - (A - A)^2` when `X` was supplied
    pub x_shift: Option<ResidueSet>,
}

pub fn dist_like_sets(a: &ResidueSet, x: Option<&ResidueSet>) -> Result<DistLikeSets, SumprodError> {
    if let Some(x) = x {
        a.same_modulus(x)?;
    }
    let diff = difference_set(a, a)?;
    let diff_squares = square_set(&diff);
    let squares = square_set(a);
    Ok(DistLikeSets {
        diff_squares_diff: difference_set(&diff_squares, &diff_squares)?,
        diff_squares_sum: sum_set(&diff_squares, &diff_squares)?,
        square_diff: difference_set(&squares, &squares)?,
        x_shift: x.map(|x| difference_set(x, &diff_squares)).transpose()?,
        diff_squares,
    })
}

/// A representation function `x -> #{(y, z) in X x Y : y - z = x}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RFunction {
    m: PrimeModulus,
    counts: BTreeMap<Scalar, u64>,
}

impl RFunction {
    pub fn get(&self, x: Scalar) -> u64 {
        self.counts.get(&x).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<Scalar, u64> {
        &self.counts
    }

    /// Total mass, always `|X| * |Y|`.
    pub fn total(&self) -> u128 {
        self.counts.values().map(|&v| v as u128).sum()
    }

    pub fn support(&self) -> ResidueSet {
        ResidueSet::new(self.m, self.counts.keys().copied())
    }

    /// `{x : r(x) >= threshold}` with the comparison done by
    /// cross-multiplication, never in floating point.
    pub fn level_set(&self, threshold: Ratio<u128>) -> ResidueSet {
        assert!(*threshold.numer() > 0, "threshold must be positive");
        ResidueSet::new(
            self.m,
            self.counts
                .iter()
                .filter(|(_, &c)| c as u128 * threshold.denom() >= *threshold.numer())
                .map(|(&x, _)| x),
        )
    }
}

/// `r_{X - Y}`: exact representation counts of every difference.
pub fn r_function(x: &ResidueSet, y: &ResidueSet) -> Result<RFunction, SumprodError> {
    x.same_modulus(y)?;
    let m = x.m;
    let mut counts = BTreeMap::new();
    for &a in &x.elems {
        for &b in &y.elems {
            *counts.entry(m.sub(a, b)).or_insert(0u64) += 1;
        }
    }
    Ok(RFunction { m, counts })
}

/// Fourth-order energy of the square set: the number of 8-tuples in
/// `(A^2)^8` with `x1 - y1 = x2 - y2 = x3 - y3 = x4 - y4`, computed as
/// `sum_d r_{A^2 - A^2}(d)^4`.
pub fn e4_energy(a: &ResidueSet) -> u128 {
    let squares = square_set(a);
    let r = r_function(&squares, &squares).expect("same modulus");
    r.counts
        .values()
        .map(|&v| {
            let v = v as u128;
            v * v * v * v
        })
        .sum()
}

/// Size profile `M = |A - A| / |A|`, `K = |A^2 - A^2| / |A|` as exact
/// rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MKProfile {
    pub size: u64,
    pub m_ratio: Ratio<u128>,
    pub k_ratio: Ratio<u128>,
}

pub fn mk_profile(a: &ResidueSet) -> MKProfile {
    assert!(!a.is_empty(), "profile of an empty set");
    let n = a.len() as u128;
    let diff = difference_set(a, a).expect("same modulus");
    let squares = square_set(a);
    let sq_diff = difference_set(&squares, &squares).expect("same modulus");
    MKProfile {
        size: a.len() as u64,
        m_ratio: Ratio::new(diff.len() as u128, n),
        k_ratio: Ratio::new(sq_diff.len() as u128, n),
    }
}

/// The popular subset of `A^2 - A^2`: elements whose representation count
/// is at least `|A| / (2K) = |A|^2 / (2 |A^2 - A^2|)`.
pub fn popular_set(a: &ResidueSet) -> ResidueSet {
    assert!(!a.is_empty(), "popular set of an empty set");
    let squares = square_set(a);
    let sq_diff = difference_set(&squares, &squares).expect("same modulus");
    let r = r_function(&squares, &squares).expect("same modulus");
    let n = a.len() as u128;
    r.level_set(Ratio::new(n * n, 2 * sq_diff.len() as u128))
}

/// `P_w = (A^2 - A^2) n (P - w)`.
pub fn p_shifted(a: &ResidueSet, w: Scalar) -> ResidueSet {
    let m = a.m;
    let w = m.canon(w);
    let squares = square_set(a);
    let sq_diff = difference_set(&squares, &squares).expect("same modulus");
    let p_set = popular_set(a);
    shifted_intersection(&sq_diff, &p_set, w)
}

/// `{d in D : d + w in P}`.
fn shifted_intersection(d: &ResidueSet, p_set: &ResidueSet, w: Scalar) -> ResidueSet {
    let m = d.m;
    ResidueSet::new(
        m,
        d.elems
            .iter()
            .copied()
            .filter(|&x| p_set.contains(m.add(x, w))),
    )
}

/// `T_w = #{(u, v) in P_w x P_w : u - v in P}`.
pub fn t_w(a: &ResidueSet, w: Scalar) -> u128 {
    let ctx = PopularContext::new(a);
    ctx.t_w(a.m.canon(w))
}

/// Shared state for the per-shift statistics: the square-difference set,
/// the popular set, and the shift representation function
/// `r_{P - (A^2 - A^2)}`.
pub struct PopularContext {
    m: PrimeModulus,
    pub square_diff: ResidueSet,
    pub popular: ResidueSet,
}

impl PopularContext {
    pub fn new(a: &ResidueSet) -> Self {
        let squares = square_set(a);
        PopularContext {
            m: a.m,
            square_diff: difference_set(&squares, &squares).expect("same modulus"),
            popular: popular_set(a),
        }
    }

    pub fn p_shifted(&self, w: Scalar) -> ResidueSet {
        shifted_intersection(&self.square_diff, &self.popular, w)
    }

    /// `{w in A^2 - A^2 : r_{P - (A^2 - A^2)}(w) >= t}` — the level set of
    /// the shift representation function, restricted to the
    /// square-difference domain. [`RFunction::level_set`] is the
    /// unrestricted variant.
    pub fn w_level_set(&self, t: Ratio<u128>) -> ResidueSet {
        let r = r_function(&self.popular, &self.square_diff).expect("same modulus");
        let unrestricted = r.level_set(t);
        ResidueSet::new(
            self.m,
            self.square_diff
                .elems()
                .iter()
                .copied()
                .filter(|&w| unrestricted.contains(w)),
        )
    }

    pub fn t_w(&self, w: Scalar) -> u128 {
        let pw = self.p_shifted(w);
        let m = &self.m;
        let mut count = 0u128;
        for &u in pw.elems() {
            for &v in pw.elems() {
                if self.popular.contains(m.sub(u, v)) {
                    count += 1;
                }
            }
        }
        count
    }
}

/// The aggregated popularity energy `sum over w in A^2 - A^2 of T_w`.
pub fn chi(a: &ResidueSet) -> u128 {
    let ctx = PopularContext::new(a);
    ctx.square_diff
        .elems()
        .iter()
        .map(|&w| ctx.t_w(w))
        .sum()
}

/// One row of the sorted shift profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WProfileRow {
    pub w: Scalar,
    /// `r_{P - (A^2 - A^2)}(w)`
    pub shift_count: u64,
    /// `|P_w|`; always equal to `shift_count`, carried as a checked column.
    pub shifted_size: u64,
}

/// The elements of `A^2 - A^2` sorted by `r_{P - (A^2 - A^2)}` descending
/// (ties broken by ascending residue), with the shifted-set size alongside.
pub fn sorted_w_profile(a: &ResidueSet) -> Vec<WProfileRow> {
    let ctx = PopularContext::new(a);
    let r = r_function(&ctx.popular, &ctx.square_diff).expect("same modulus");
    let mut rows: Vec<WProfileRow> = ctx
        .square_diff
        .elems()
        .iter()
        .map(|&w| WProfileRow {
            w,
            shift_count: r.get(w),
            shifted_size: ctx.p_shifted(w).len() as u64,
        })
        .collect();
    rows.sort_by(|a, b| b.shift_count.cmp(&a.shift_count).then(a.w.cmp(&b.w)));
    rows
}

/// `#{(a1, a2) in A x A : a1^2 - a2^2 in P}`, a diagnostic for the
/// popular-pair mass.
pub fn popular_pair_count(a: &ResidueSet) -> u128 {
    let m = a.m;
    let p_set = popular_set(a);
    let mut count = 0u128;
    for &a1 in a.elems() {
        for &a2 in a.elems() {
            if p_set.contains(m.sub(m.mul(a1, a1), m.mul(a2, a2))) {
                count += 1;
            }
        }
    }
    count
}

/// Brute-force reference enumerators.
pub mod naive {
    use super::*;

    /// Literal 8-tuple count over `(A^2)^8` with the three equality
    /// constraints checked pairwise.
    pub fn e4_energy(a: &ResidueSet) -> u128 {
        let m = a.m;
        let sq = square_set(a);
        let s = sq.elems();
        let mut count = 0u128;
        for &x1 in s {
            for &y1 in s {
                let d = m.sub(x1, y1);
                for &x2 in s {
                    for &y2 in s {
                        if m.sub(x2, y2) != d {
                            continue;
                        }
                        for &x3 in s {
                            for &y3 in s {
                                if m.sub(x3, y3) != d {
                                    continue;
                                }
                                for &x4 in s {
                                    for &y4 in s {
                                        if m.sub(x4, y4) == d {
                                            count += 1;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        count
    }

    /// Quadruple form of the popularity energy: `(x, y, u, v)` in
    /// `P x P x (A^2-A^2)^2` with `x - u = y - v`, the common shift lying
    /// in `A^2 - A^2`, and `u - v` popular.
    pub fn chi_quadruples(a: &ResidueSet) -> u128 {
        let m = a.m;
        let ctx = PopularContext::new(a);
        let p_set = &ctx.popular;
        let d_set = &ctx.square_diff;
        let mut count = 0u128;
        for &x in p_set.elems() {
            for &y in p_set.elems() {
                for &u in d_set.elems() {
                    for &v in d_set.elems() {
                        let w = m.sub(x, u);
                        if w == m.sub(y, v) && d_set.contains(w) && p_set.contains(m.sub(u, v)) {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }
}
