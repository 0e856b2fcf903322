//! Named identity and inequality checks binding the counting engines
//! together.
//!
//! Two-tier semantics: ASSERT checks carry an explicit constant extracted
//! from an exact argument and must pass on every input (their failure is a
//! bug or a falsified constant); REPORT checks are ratio dashboards for
//! asymptotic bounds whose constants are unspecified, and always "pass".
//! ASSERT rows never touch floating point; REPORT rows evaluate their
//! real-valued bounds in double precision from exact integer inputs.

pub mod exponents;

use crate::counting::PlaneSet;
use crate::field::Scalar;
use crate::sumprod::{
    self, difference_set, dist_like_sets, mk_profile, popular_pair_count, r_function, square_set,
    PopularContext, ResidueSet,
};
use num::{BigInt, BigRational, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("check requires p = 3 (mod 4), got p = {0}")]
    Mod4Mismatch(u64),
    #[error("check requires a nonempty set")]
    EmptySet,
}

/// An exactly-represented or real-valued side of a check.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckValue {
    Exact(BigRational),
    Real(f64),
}

impl CheckValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            CheckValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            CheckValue::Real(x) => *x,
        }
    }

    pub fn render(&self) -> String {
        match self {
            CheckValue::Exact(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            CheckValue::Real(x) => format!("{x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Assert,
    Report,
}

/// Outcome of one named check: both sides, their ratio, and whether the
/// check passed (always true in REPORT mode).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub lhs: CheckValue,
    pub rhs: CheckValue,
    pub ratio: CheckValue,
    pub mode: CheckMode,
    pub pass: bool,
    pub context: String,
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} [{}] lhs={} rhs={} ratio={} {} ({})",
            self.name,
            match self.mode {
                CheckMode::Assert => "assert",
                CheckMode::Report => "report",
            },
            self.lhs.render(),
            self.rhs.render(),
            self.ratio.render(),
            if self.pass { "pass" } else { "FAIL" },
            self.context
        )
    }
}

fn big(x: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn exact_ratio(lhs: &BigRational, rhs: &BigRational) -> BigRational {
    if rhs.is_zero() {
        BigRational::zero()
    } else {
        lhs / rhs
    }
}

/// ASSERT `lhs <= rhs` with exact values.
fn assert_le(name: &str, lhs: BigRational, rhs: BigRational, context: String) -> CheckReport {
    let pass = lhs <= rhs;
    let ratio = exact_ratio(&lhs, &rhs);
    CheckReport {
        name: name.into(),
        lhs: CheckValue::Exact(lhs),
        rhs: CheckValue::Exact(rhs),
        ratio: CheckValue::Exact(ratio),
        mode: CheckMode::Assert,
        pass,
        context,
    }
}

/// ASSERT `lhs = rhs` with exact values (both inequalities at once).
fn assert_eq_exact(name: &str, lhs: BigRational, rhs: BigRational, context: String) -> CheckReport {
    let pass = lhs == rhs;
    let ratio = exact_ratio(&lhs, &rhs);
    CheckReport {
        name: name.into(),
        lhs: CheckValue::Exact(lhs),
        rhs: CheckValue::Exact(rhs),
        ratio: CheckValue::Exact(ratio),
        mode: CheckMode::Assert,
        pass,
        context,
    }
}

/// REPORT row with real-valued sides.
fn report_row(name: &str, lhs: f64, rhs: f64, context: String) -> CheckReport {
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    CheckReport {
        name: name.into(),
        lhs: CheckValue::Real(lhs),
        rhs: CheckValue::Real(rhs),
        ratio: CheckValue::Real(ratio),
        mode: CheckMode::Report,
        pass: true,
        context,
    }
}

/// REPORT row with exact sides (used for hypothesis flags).
fn flag_row(name: &str, lhs: BigRational, rhs: BigRational, context: String) -> CheckReport {
    let ratio = exact_ratio(&lhs, &rhs);
    CheckReport {
        name: name.into(),
        lhs: CheckValue::Exact(lhs),
        rhs: CheckValue::Exact(rhs),
        ratio: CheckValue::Exact(ratio),
        mode: CheckMode::Report,
        pass: true,
        context,
    }
}

fn plane_context(set: &PlaneSet) -> String {
    format!("p={} |E|={}", set.modulus().p(), set.len())
}

fn require_three_mod_four(set: &PlaneSet) -> Result<(), CheckError> {
    if set.modulus().is_three_mod_four() {
        Ok(())
    } else {
        Err(CheckError::Mod4Mismatch(set.modulus().p()))
    }
}

/// Natural log of the set size with the convention ln(1) = 1, so that
/// degenerate inputs never zero a denominator.
fn ln_size(n: usize) -> f64 {
    if n <= 1 {
        1.0
    } else {
        (n as f64).ln()
    }
}

/// ASSERT: bisector energy is at most `2 |D| (R + |E|^2)`, the explicit
/// constant coming from the Cauchy-Schwarz step (each admissible scaling
/// factor is a square root of a distance ratio, and squaring is 2-to-1).
pub fn check_bisector_energy_bound(set: &PlaneSet) -> Result<CheckReport, CheckError> {
    require_three_mod_four(set)?;
    let q = set.bisector_energy();
    let delta = set.distance_set().len() as u128;
    let rect = set.rectangle_count();
    let n = set.len() as u128;
    Ok(assert_le(
        "bisector_energy_bound",
        big(q),
        big(2) * big(delta) * (big(rect) + big(n * n)),
        plane_context(set),
    ))
}

/// ASSERT equality: lifted-difference quadruples equal the rectangle count
/// plus `|E|^2 - |E|` (the diagonal solutions are exactly the degenerate
/// ones when the form is anisotropic).
pub fn check_paraboloid_identity(set: &PlaneSet) -> Result<CheckReport, CheckError> {
    require_three_mod_four(set)?;
    let n = set.len() as u128;
    let para = set.paraboloid_quadruples();
    let rect = set.rectangle_count();
    Ok(assert_eq_exact(
        "paraboloid_rectangle_identity",
        big(para),
        big(rect) + big(n * n) - big(n),
        plane_context(set),
    ))
}

/// ASSERT equality: the isosceles count equals the bisector incidences
/// plus `|E|^2 - |E|` (the apex-equal triples).
pub fn check_isosceles_identity(set: &PlaneSet) -> Result<CheckReport, CheckError> {
    require_three_mod_four(set)?;
    let n = set.len() as u128;
    Ok(assert_eq_exact(
        "isosceles_incidence_identity",
        big(set.isosceles_count()),
        big(set.bisector_incidences()) + big(n * n) - big(n),
        plane_context(set),
    ))
}

/// ASSERT: the distance second moment is at most `|E| (T + |E|)`; the
/// `+|E|` houses the fully-degenerate triples `a = b = c`.
pub fn check_second_moment_bound(set: &PlaneSet) -> Result<CheckReport, CheckError> {
    require_three_mod_four(set)?;
    let n = set.len() as u128;
    Ok(assert_le(
        "second_moment_isosceles_bound",
        big(set.second_moment()),
        big(n) * (big(set.isosceles_count()) + big(n)),
        plane_context(set),
    ))
}

/// ASSERT: `|D| >= |E|^4 / sum nu^2`, the constant-1 Cauchy-Schwarz lower
/// bound; encoded as `|E|^4 / sum nu^2 <= |D|`.
pub fn check_distance_lower_bound(set: &PlaneSet) -> Result<CheckReport, CheckError> {
    if set.is_empty() {
        return Err(CheckError::EmptySet);
    }
    let n = set.len() as u128;
    let sm = set.second_moment();
    let delta = set.distance_set().len() as u128;
    Ok(assert_le(
        "distance_set_cauchy_schwarz",
        big(n * n) * big(n * n) / big(sm),
        big(delta),
        plane_context(set),
    ))
}

/// REPORT: isosceles count against `|E|^2 ln|E| + |E|^(5/3) Q^(4/15)`.
pub fn report_isosceles_bound(set: &PlaneSet) -> CheckReport {
    let n = set.len() as f64;
    let t = set.isosceles_count() as f64;
    let q = set.bisector_energy() as f64;
    let bound = n * n * ln_size(set.len()) + n.powf(5.0 / 3.0) * q.powf(4.0 / 15.0);
    report_row("isosceles_energy_dashboard", t, bound, plane_context(set))
}

/// REPORT rows: the isosceles count against its three-term bound in
/// `(|E|, |D|, rectangles)`, and `|D|` against the min-expression the
/// chain solves to.
pub fn report_distance_chain(set: &PlaneSet) -> Result<Vec<CheckReport>, CheckError> {
    require_three_mod_four(set)?;
    let n = set.len() as f64;
    let t = set.isosceles_count() as f64;
    let delta = set.distance_set().len() as f64;
    let rect = set.rectangle_count() as f64;
    let three_term = n * n * ln_size(set.len())
        + delta.powf(4.0 / 15.0) * n.powf(33.0 / 15.0)
        + n.powf(5.0 / 3.0) * delta.powf(4.0 / 15.0) * rect.powf(4.0 / 15.0);
    let min_expr = (n.powf(12.0 / 19.0)).min(n.powf(20.0 / 19.0) / rect.powf(4.0 / 19.0));
    Ok(vec![
        report_row(
            "isosceles_chain_dashboard",
            t,
            three_term,
            plane_context(set),
        ),
        report_row(
            "distance_exponent_dashboard",
            delta,
            min_expr,
            plane_context(set),
        ),
    ])
}

/// The whole ASSERT battery for a planar set. Mod-4-gated checks are
/// simply absent when `p = 1 (mod 4)`; the distance lower bound runs for
/// any nonempty set.
pub fn plane_assert_suite(set: &PlaneSet) -> Vec<CheckReport> {
    let mut out = Vec::new();
    if set.modulus().is_three_mod_four() {
        out.push(check_bisector_energy_bound(set).expect("gated"));
        out.push(check_paraboloid_identity(set).expect("gated"));
        out.push(check_isosceles_identity(set).expect("gated"));
        out.push(check_second_moment_bound(set).expect("gated"));
    }
    if !set.is_empty() {
        out.push(check_distance_lower_bound(set).expect("nonempty"));
    }
    out
}

fn residue_context(a: &ResidueSet) -> String {
    format!("p={} |A|={}", a.modulus().p(), a.len())
}

/// The residue-set dashboard: ratio rows for every energy and popularity
/// bound, exact hypothesis flags, and the internal identities asserted
/// exactly.
pub fn residue_suite(a: &ResidueSet) -> Vec<CheckReport> {
    assert!(!a.is_empty(), "suite requires a nonempty set");
    let m = a.modulus();
    let p = m.p() as f64;
    let ctx_str = residue_context(a);
    let n = a.len() as u128;
    let nf = a.len() as f64;

    let prof = mk_profile(a);
    let mf = prof.m_ratio.to_f64().unwrap();
    let kf = prof.k_ratio.to_f64().unwrap();

    let e4 = sumprod::e4_energy(a);
    let chi = sumprod::chi(a);
    let ctx = PopularContext::new(a);
    let diff = difference_set(a, a).expect("same modulus");
    let mut out = Vec::new();

    // E4(A^2) against |A|^4 M^3.
    out.push(report_row(
        "square_energy_dashboard",
        e4 as f64,
        nf.powi(4) * mf.powi(3),
        ctx_str.clone(),
    ));

    // |A|^4 against sqrt(E4) sqrt(chi).
    out.push(report_row(
        "popularity_cs_dashboard",
        nf.powi(4),
        (e4 as f64).sqrt() * (chi as f64).sqrt(),
        ctx_str.clone(),
    ));

    // Per-shift pair bound: max over w of T_w against
    // M^(3/2) K |P_w|^(3/2) + M^2 K |P_w|.
    let mut best_ratio = 0.0f64;
    let mut best = (0 as Scalar, 0.0f64, 0.0f64);
    for &w in ctx.square_diff.elems() {
        let tw = ctx.t_w(w) as f64;
        let pw = ctx.p_shifted(w).len() as f64;
        let bound = mf.powf(1.5) * kf * pw.powf(1.5) + mf * mf * kf * pw;
        let ratio = if bound == 0.0 { 0.0 } else { tw / bound };
        if ratio >= best_ratio {
            best_ratio = ratio;
            best = (w, tw, bound);
        }
    }
    out.push(report_row(
        "shift_pair_bound_dashboard",
        best.1,
        best.2,
        format!("{ctx_str} max at w={}", best.0),
    ));

    // Sorted-shift profile bound: |P_(w_i)| against M^(3/2) K^2 |A| i^(-1/2).
    let rows = sumprod::sorted_w_profile(a);
    let mut worst = (0usize, 0.0f64, 0.0f64, 0.0f64);
    for (i, row) in rows.iter().enumerate() {
        let rank = (i + 1) as f64;
        let bound = mf.powf(1.5) * kf * kf * nf / rank.sqrt();
        let ratio = if bound == 0.0 {
            0.0
        } else {
            row.shifted_size as f64 / bound
        };
        if ratio >= worst.3 {
            worst = (i + 1, row.shifted_size as f64, bound, ratio);
        }
    }
    out.push(report_row(
        "sorted_shift_bound_dashboard",
        worst.1,
        worst.2,
        format!("{ctx_str} max at rank={}", worst.0),
    ));

    // chi against M^(15/4) K^(17/4) |A|^(7/4) + M^(7/2) K^(7/2) |A|^(3/2).
    out.push(report_row(
        "popularity_energy_dashboard",
        chi as f64,
        mf.powf(15.0 / 4.0) * kf.powf(17.0 / 4.0) * nf.powf(7.0 / 4.0)
            + mf.powf(3.5) * kf.powf(3.5) * nf.powf(1.5),
        ctx_str.clone(),
    ));

    // The disjunction M^27 K^17 >~ |A|^9 or M^13 K^7 >~ |A|^5: report the
    // larger of the two ratios.
    let r1 = mf.powi(27) * kf.powi(17) / nf.powi(9);
    let r2 = mf.powi(13) * kf.powi(7) / nf.powi(5);
    out.push(report_row(
        "ratio_disjunction_dashboard",
        r1.max(r2),
        1.0,
        format!("{ctx_str} branch={}", if r1 >= r2 { 1 } else { 2 }),
    ));

    // |X - (A-A)^2| against min(p, |X|^(1/2) |A|) with X = (A-A)^2.
    let sets = dist_like_sets(a, None).expect("same modulus");
    let x_size = sets.diff_squares.len() as f64;
    out.push(report_row(
        "difference_square_lower_dashboard",
        sets.diff_squares_diff.len() as f64,
        p.min(x_size.sqrt() * nf),
        ctx_str.clone(),
    ));

    // |(A-A)^2 - (A-A)^2| against |A|^(3/2 + 1/142).
    let variant_exp = 1.5 + 1.0 / 142.0;
    out.push(report_row(
        "variant_distance_dashboard",
        sets.diff_squares_diff.len() as f64,
        nf.powf(variant_exp),
        ctx_str.clone(),
    ));

    // Hypothesis flags (exact, informational): the incidence-regime
    // condition and the popular-pair mass.
    let squares = square_set(a);
    let sq_diff = difference_set(&squares, &squares).expect("same modulus");
    let product = n * diff.len() as u128 * sq_diff.len() as u128;
    let p_int = m.p() as u128;
    out.push(flag_row(
        "incidence_regime_flag",
        big(product),
        big(p_int * p_int),
        format!("{ctx_str} within={}", product <= p_int * p_int),
    ));
    let pairs = popular_pair_count(a);
    out.push(flag_row(
        "popular_pair_flag",
        big(pairs),
        big(n * n) / big(4),
        format!("{ctx_str} below_quarter={}", big(pairs) < big(n * n) / big(4)),
    ));

    // Internal identities, exact asserts: the shift representation counts
    // equal the shifted-set sizes, and chi is the sum of the per-shift
    // counts.
    let r_shift = r_function(&ctx.popular, &ctx.square_diff).expect("same modulus");
    let mismatches = ctx
        .square_diff
        .elems()
        .iter()
        .filter(|&&w| r_shift.get(w) != ctx.p_shifted(w).len() as u64)
        .count() as u128;
    out.push(assert_eq_exact(
        "shift_count_identity",
        big(mismatches),
        big(0),
        ctx_str.clone(),
    ));
    let chi_sum: u128 = ctx.square_diff.elems().iter().map(|&w| ctx.t_w(w)).sum();
    out.push(assert_eq_exact(
        "popularity_energy_identity",
        big(chi),
        big(chi_sum),
        ctx_str,
    ));

    out
}
