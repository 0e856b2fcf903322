//! Deterministic, seedable generators for point sets and residue sets,
//! plus exhaustive small-case enumeration.
//!
//! `generate` is a pure function of its spec: the stream cipher behind the
//! random families is keyed by `(seed, family, p, size)`, so regenerating
//! with the same spec yields the identical set regardless of what else ran
//! before, and parallel sweeps stay reproducible.

use crate::counting::PlaneSet;
use crate::field::{fp_sqrt, make_modulus, FieldError, PrimeModulus, Scalar};
use crate::geom::Point2;
use crate::sumprod::ResidueSet;
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("requested size {size} exceeds the ground set ({ground})")]
    SizeTooLarge { size: u64, ground: u64 },
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("bad generator spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    RandomPlane,
    Cartesian,
    Circle,
    LineSubset,
    RandomResidue,
    ArithmeticProgression,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::RandomPlane => "random_plane",
            Family::Cartesian => "cartesian",
            Family::Circle => "circle",
            Family::LineSubset => "line_subset",
            Family::RandomResidue => "random_residue",
            Family::ArithmeticProgression => "arithmetic_progression",
        }
    }

    fn from_name(s: &str) -> Result<Self, GenError> {
        match s {
            "random_plane" => Ok(Family::RandomPlane),
            "cartesian" => Ok(Family::Cartesian),
            "circle" => Ok(Family::Circle),
            "line_subset" => Ok(Family::LineSubset),
            "random_residue" => Ok(Family::RandomResidue),
            "arithmetic_progression" => Ok(Family::ArithmeticProgression),
            other => Err(GenError::BadSpec(format!("unknown family '{other}'"))),
        }
    }

    fn id(&self) -> u64 {
        match self {
            Family::RandomPlane => 1,
            Family::Cartesian => 2,
            Family::Circle => 3,
            Family::LineSubset => 4,
            Family::RandomResidue => 5,
            Family::ArithmeticProgression => 6,
        }
    }

    /// Whether the family produces a planar set (vs a residue set).
    pub fn is_plane(&self) -> bool {
        matches!(self, Family::RandomPlane | Family::Cartesian | Family::Circle | Family::LineSubset)
    }
}

/// A fully-determined generation request.
///
/// `size` is the target cardinality for the random families, the residue
/// count for progressions, `|A|` for the Cartesian family (which emits
/// `|A|^2` points), and a truncation limit for the circle family (0 keeps
/// the whole circle). Family-specific scalars live in `params`:
/// circle `cx, cy, r`; line `slope, icept` or `vert, c`; progression
/// `start, step`; cartesian `start, step` (progression-backed when given).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub family: Family,
    pub p: u64,
    pub size: u64,
    pub seed: u64,
    pub params: BTreeMap<String, u64>,
}

impl GenSpec {
    pub fn new(family: Family, p: u64, size: u64, seed: u64) -> Self {
        GenSpec {
            family,
            p,
            size,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: u64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    /// Parses the CLI form `family:p:size:seed[:k=v,k=v,...]`.
    pub fn parse(s: &str) -> Result<Self, GenError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 4 || parts.len() > 5 {
            return Err(GenError::BadSpec(format!(
                "expected family:p:size:seed[:k=v,...], got '{s}'"
            )));
        }
        let family = Family::from_name(parts[0])?;
        let num = |field: &str, v: &str| {
            v.parse::<u64>()
                .map_err(|_| GenError::BadSpec(format!("bad {field} '{v}'")))
        };
        let mut spec = GenSpec::new(
            family,
            num("p", parts[1])?,
            num("size", parts[2])?,
            num("seed", parts[3])?,
        );
        if let Some(kvs) = parts.get(4) {
            for kv in kvs.split(',').filter(|s| !s.is_empty()) {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| GenError::BadSpec(format!("bad param '{kv}'")))?;
                spec.params.insert(k.to_string(), num(k, v)?);
            }
        }
        Ok(spec)
    }

    pub fn render(&self) -> String {
        let base = format!(
            "{}:{}:{}:{}",
            self.family.name(),
            self.p,
            self.size,
            self.seed
        );
        if self.params.is_empty() {
            base
        } else {
            let kvs = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .join(",");
            format!("{base}:{kvs}")
        }
    }

    fn param(&self, key: &str) -> Option<u64> {
        self.params.get(key).copied()
    }

    /// The stream cipher keyed by the full spec identity.
    fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let words = [
            splitmix(self.seed),
            splitmix(self.family.id() ^ 0x9e37_79b9_7f4a_7c15),
            splitmix(self.p),
            splitmix(self.size),
        ];
        for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Output of [`generate`]: a planar or a residue set depending on family.
#[derive(Debug, Clone)]
pub enum Generated {
    Plane(PlaneSet),
    Residue(ResidueSet),
}

impl Generated {
    pub fn as_plane(&self) -> Option<&PlaneSet> {
        match self {
            Generated::Plane(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_residue(&self) -> Option<&ResidueSet> {
        match self {
            Generated::Residue(s) => Some(s),
            _ => None,
        }
    }
}

/// Deterministically generates the set a spec describes.
pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    let m = make_modulus(spec.p)?;
    match spec.family {
        Family::RandomPlane => Ok(Generated::Plane(random_plane(spec, m)?)),
        Family::Cartesian => Ok(Generated::Plane(cartesian(spec, m)?)),
        Family::Circle => Ok(Generated::Plane(circle(spec, m)?)),
        Family::LineSubset => Ok(Generated::Plane(line_subset(spec, m)?)),
        Family::RandomResidue => Ok(Generated::Residue(ResidueSet::new(
            m,
            random_distinct(spec, m.p(), spec.size)?,
        ))),
        Family::ArithmeticProgression => Ok(Generated::Residue(progression_set(spec, m)?)),
    }
}

/// `size` distinct values below `ground`, by rejection when the target is
/// at most half the ground set and by partial shuffle otherwise.
fn random_distinct(spec: &GenSpec, ground: u64, size: u64) -> Result<Vec<u64>, GenError> {
    if size > ground {
        return Err(GenError::SizeTooLarge { size, ground });
    }
    let mut rng = spec.rng();
    if size <= ground / 2 {
        let mut chosen = BTreeSet::new();
        while (chosen.len() as u64) < size {
            chosen.insert(rng.gen_range(0..ground));
        }
        Ok(chosen.into_iter().collect())
    } else {
        let mut all: Vec<u64> = (0..ground).collect();
        for i in 0..size as usize {
            let j = rng.gen_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(size as usize);
        Ok(all)
    }
}

fn random_plane(spec: &GenSpec, m: PrimeModulus) -> Result<PlaneSet, GenError> {
    let ground = m.p() * m.p();
    let idxs = random_distinct(spec, ground, spec.size)?;
    Ok(PlaneSet::new(
        m,
        idxs.into_iter().map(|i| Point2::new(i / m.p(), i % m.p())),
    ))
}

fn residue_part(spec: &GenSpec, m: PrimeModulus) -> Result<Vec<Scalar>, GenError> {
    if spec.param("start").is_some() || spec.param("step").is_some() {
        Ok(progression_set(spec, m)?.elems().to_vec())
    } else {
        random_distinct(spec, m.p(), spec.size)
    }
}

fn cartesian(spec: &GenSpec, m: PrimeModulus) -> Result<PlaneSet, GenError> {
    let a = residue_part(spec, m)?;
    Ok(PlaneSet::new(
        m,
        a.iter()
            .flat_map(|&x| a.iter().map(move |&y| Point2::new(x, y))),
    ))
}

fn circle(spec: &GenSpec, m: PrimeModulus) -> Result<PlaneSet, GenError> {
    let cx = m.canon(spec.param("cx").unwrap_or(0));
    let cy = m.canon(spec.param("cy").unwrap_or(0));
    let r = m.canon(spec.param("r").unwrap_or(1));
    let mut pts = Vec::new();
    for x in 0..m.p() {
        let dx = m.sub(x, cx);
        let rem = m.sub(r, m.mul(dx, dx));
        if let Some(y0) = fp_sqrt(rem, &m) {
            pts.push(Point2::new(x, m.add(cy, y0)));
            pts.push(Point2::new(x, m.sub(cy, y0)));
        }
    }
    let full = PlaneSet::new(m, pts);
    if spec.size == 0 || spec.size as usize >= full.len() {
        Ok(full)
    } else {
        // Deterministic truncation: keep the first `size` points in sorted
        // order.
        Ok(PlaneSet::new(
            m,
            full.points().iter().copied().take(spec.size as usize),
        ))
    }
}

fn line_subset(spec: &GenSpec, m: PrimeModulus) -> Result<PlaneSet, GenError> {
    if spec.size > m.p() {
        return Err(GenError::SizeTooLarge {
            size: spec.size,
            ground: m.p(),
        });
    }
    if spec.param("vert").unwrap_or(0) != 0 {
        let c = m.canon(spec.param("c").unwrap_or(0));
        return Ok(PlaneSet::new(m, (0..spec.size).map(|t| Point2::new(c, t))));
    }
    let slope = m.canon(spec.param("slope").unwrap_or(1));
    let icept = m.canon(spec.param("icept").unwrap_or(0));
    Ok(PlaneSet::new(
        m,
        (0..spec.size).map(|t| Point2::new(t, m.add(m.mul(slope, t), icept))),
    ))
}

fn progression_set(spec: &GenSpec, m: PrimeModulus) -> Result<ResidueSet, GenError> {
    if spec.size > m.p() {
        return Err(GenError::SizeTooLarge {
            size: spec.size,
            ground: m.p(),
        });
    }
    let start = m.canon(spec.param("start").unwrap_or(0));
    let step = m.canon(spec.param("step").unwrap_or(1));
    if step == 0 && spec.size > 1 {
        return Err(GenError::BadSpec(
            "step 0 cannot reach the requested cardinality".into(),
        ));
    }
    let mut x = start;
    let set = ResidueSet::new(
        m,
        (0..spec.size).map(|_| {
            let v = x;
            x = m.add(x, step);
            v
        }),
    );
    Ok(set)
}

fn binomial_capped(n: u64, k: u64, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

/// All 2^(p^2) subsets of `F_p^2` in mask order; only feasible for `p = 3`
/// (512 subsets).
pub fn all_plane_subsets(
    m: PrimeModulus,
) -> Result<impl Iterator<Item = PlaneSet>, GenError> {
    if m.p() * m.p() > 16 {
        return Err(GenError::TooLarge(format!(
            "full subset enumeration needs p^2 <= 16, got p = {}",
            m.p()
        )));
    }
    let ground: Vec<Point2> = (0..m.p())
        .flat_map(|x| (0..m.p()).map(move |y| Point2::new(x, y)))
        .collect();
    let total: u32 = 1 << ground.len();
    Ok((0..total).map(move |mask| {
        PlaneSet::new(
            m,
            ground
                .iter()
                .enumerate()
                .filter(move |(i, _)| mask >> i & 1 == 1)
                .map(|(_, &q)| q),
        )
    }))
}

/// All `k`-subsets of a declared ground set, lexicographic by index;
/// guarded at one million subsets.
pub fn plane_k_subsets(
    m: PrimeModulus,
    ground: &PlaneSet,
    k: u64,
) -> Result<impl Iterator<Item = PlaneSet> + '_, GenError> {
    if binomial_capped(ground.len() as u64, k, 1_000_000) > 1_000_000 {
        return Err(GenError::TooLarge(format!(
            "C({}, {k}) exceeds 10^6",
            ground.len()
        )));
    }
    Ok(ground
        .points()
        .iter()
        .copied()
        .combinations(k as usize)
        .map(move |pts| PlaneSet::new(m, pts)))
}

/// All `k`-subsets of `F_p`, lexicographic; guarded at one million subsets.
pub fn residue_k_subsets(
    m: PrimeModulus,
    k: u64,
) -> Result<impl Iterator<Item = ResidueSet>, GenError> {
    if binomial_capped(m.p(), k, 1_000_000) > 1_000_000 {
        return Err(GenError::TooLarge(format!("C({}, {k}) exceeds 10^6", m.p())));
    }
    Ok((0..m.p())
        .combinations(k as usize)
        .map(move |elems| ResidueSet::new(m, elems)))
}
