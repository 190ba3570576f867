//! The strong F-conjecture verification engine: PBD supports, critical
//! subsets, F-curve cone membership, and the pruned symmetric search
//! establishing that every subset of boundary coordinates is either
//! critical or does not support an effective pairwise balanced design.
//!
//! All decisions are exact-rational linear programs whose outcomes carry
//! verified certificates. The search deduplicates by canonical orbit
//! representatives under the full marking symmetry and persists resumable
//! checkpoints of finished nodes.

pub mod critical;
pub mod pbdcone;
pub mod perms;
pub mod search;

pub use critical::{is_critical, CriticalCert};
pub use pbdcone::{pbd_extremal_rays, ray_index_values, supports_effective_pbd, SupportCert};
pub use search::{
    verify_all_supports, FailureWitness, NodeStatus, SearchOptions, VerifyReport,
};

use crate::curves::{self, CurveClass, CurveError, FCurve};
use crate::groundset::{self, GroundError, Sigma};
use crate::picard::{self, DivisorClass, PicardError};
use crate::ratlp::{self, ConeMembership, LpError};
use crate::rational::{as_i64, int, Rat};
use num::{Signed, Zero};
use perms::PermTables;
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StrongFError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("marking counts differ: {0} vs {1}")]
    MixedN(usize, usize),
    #[error("index {0} outside the {1} boundary coordinates")]
    BadIndex(usize, usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(&'static str),
    #[error("checkpoint corrupt: {0}")]
    CheckpointCorrupt(String),
    #[error("internal invariant failed: {0}")]
    Internal(&'static str),
}

/// A set of boundary coordinates (proper subsets of `[n-1]`), stored as a
/// bitset over proper indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SupportSet {
    n: usize,
    mask: u128,
}

impl SupportSet {
    pub fn empty(n: usize) -> Result<Self, StrongFError> {
        let _ = groundset::sigma(n)?;
        Ok(SupportSet { n, mask: 0 })
    }

    pub fn full(n: usize) -> Result<Self, StrongFError> {
        let sig = groundset::sigma(n)?;
        let rho = sig.proper_count();
        Ok(SupportSet { n, mask: ones(rho) })
    }

    pub fn from_bits(n: usize, mask: u128) -> Result<Self, StrongFError> {
        let sig = groundset::sigma(n)?;
        let rho = sig.proper_count();
        if mask & !ones(rho) != 0 {
            return Err(StrongFError::BadIndex(127 - mask.leading_zeros() as usize, rho));
        }
        Ok(SupportSet { n, mask })
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self, StrongFError> {
        let sig = groundset::sigma(n)?;
        let rho = sig.proper_count();
        let mut mask = 0u128;
        for &p in indices {
            if p >= rho {
                return Err(StrongFError::BadIndex(p, rho));
            }
            mask |= 1 << p;
        }
        Ok(SupportSet { n, mask })
    }

    /// The support set of the given proper-subset masks.
    pub fn from_subset_masks(n: usize, masks: &[u32]) -> Result<Self, StrongFError> {
        let sig = groundset::sigma(n)?;
        let mut mask = 0u128;
        for &m in masks {
            let p = sig
                .proper_index_of_mask(m)
                .ok_or(StrongFError::Internal("mask is not a proper subset"))?;
            mask |= 1 << p;
        }
        Ok(SupportSet { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u128 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, p: usize) -> bool {
        p < 128 && self.mask & (1 << p) != 0
    }

    pub fn with(&self, p: usize) -> Self {
        SupportSet { n: self.n, mask: self.mask | (1 << p) }
    }

    pub fn without(&self, p: usize) -> Self {
        SupportSet { n: self.n, mask: self.mask & !(1 << p) }
    }

    pub fn indices(&self) -> Vec<usize> {
        bit_indices(self.mask)
    }
}

impl serde::Serialize for SupportSet {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("SupportSet", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("mask", &format!("{:032x}", self.mask))?;
        st.end()
    }
}

pub(crate) fn ones(k: usize) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

pub(crate) fn bit_indices(mut mask: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let p = mask.trailing_zeros() as usize;
        out.push(p);
        mask &= mask - 1;
    }
    out
}

/// Shared per-`n` search context: the curve list with integer boundary
/// pairings, per-coordinate pair coverage, and the symmetry tables.
pub struct StrongFCtx {
    n: usize,
    sigma: Arc<Sigma>,
    rho: usize,
    full: u128,
    curves: Vec<FCurve>,
    /// Integer boundary pairings, curve-major: `delta[a * rho + p]`.
    delta: Vec<i64>,
    /// Per curve, the coordinates it pairs positively with.
    pos_mask: Vec<u128>,
    /// Per proper coordinate, the ground pairs its subset covers.
    pair_mask: Vec<u32>,
    all_pairs: u32,
    n_pairs: usize,
    perms: PermTables,
}

impl StrongFCtx {
    /// Builds (or returns the cached) context; `4 <= n <= 8`.
    pub fn new(n: usize) -> Result<Arc<StrongFCtx>, StrongFError> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<StrongFCtx>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(ctx) = cache.lock().expect("ctx cache").get(&n) {
            return Ok(ctx.clone());
        }
        let ctx = Arc::new(StrongFCtx::build(n)?);
        cache.lock().expect("ctx cache").insert(n, ctx.clone());
        Ok(ctx)
    }

    fn build(n: usize) -> Result<StrongFCtx, StrongFError> {
        if n > groundset::MAX_ORBIT_N {
            return Err(StrongFError::BudgetExceeded("symmetry tables limited to n <= 8"));
        }
        let sigma = groundset::sigma(n)?;
        let rho = sigma.proper_count();
        let curves = curves::all_fcurves(n)?;
        let mut delta = vec![0i64; curves.len() * rho];
        let mut pos_mask = vec![0u128; curves.len()];
        for (a, curve) in curves.iter().enumerate() {
            let class = curve.class();
            for (p, v) in class.delta().iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let v = as_i64(v).ok_or(StrongFError::Internal("non-integer pairing"))?;
                delta[a * rho + p] = v;
                if v > 0 {
                    pos_mask[a] |= 1 << p;
                }
            }
        }
        let m = n - 1;
        let n_pairs = m * (m - 1) / 2;
        let pair_of = |i: usize, j: usize| -> usize {
            // Ground elements 1..=m, i < j.
            (i - 1) * m - i * (i - 1) / 2 + (j - i - 1)
        };
        let mut pair_mask = vec![0u32; rho];
        for (p, s) in sigma.proper().iter().enumerate() {
            let members = s.members();
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    pair_mask[p] |= 1 << pair_of(i, j);
                }
            }
        }
        let perms = PermTables::build(&sigma)?;
        Ok(StrongFCtx {
            n,
            sigma,
            rho,
            full: ones(rho),
            curves,
            delta,
            pos_mask,
            pair_mask,
            all_pairs: (1u32 << n_pairs) - 1,
            n_pairs,
            perms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn curves(&self) -> &[FCurve] {
        &self.curves
    }

    pub fn full_mask(&self) -> u128 {
        self.full
    }

    pub(crate) fn perms(&self) -> &PermTables {
        &self.perms
    }

    pub(crate) fn delta_row(&self, a: usize) -> &[i64] {
        &self.delta[a * self.rho..(a + 1) * self.rho]
    }

    pub(crate) fn pos_mask(&self, a: usize) -> u128 {
        self.pos_mask[a]
    }

    pub(crate) fn pair_masks(&self) -> &[u32] {
        &self.pair_mask
    }

    pub(crate) fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    /// Whether every ground pair is covered by some coordinate in `j` —
    /// a necessary condition for supporting an effective design.
    pub(crate) fn covers_all_pairs(&self, j: u128) -> bool {
        let mut seen = 0u32;
        let mut rest = j;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            seen |= self.pair_mask[p];
            if seen == self.all_pairs {
                return true;
            }
        }
        false
    }
}

/// Outcome of an F-curve cone membership test.
#[derive(Clone, Debug)]
pub enum FconeOutcome {
    /// Coefficients (curve index, weight) expressing the class as a
    /// nonnegative combination of F-curves.
    Member { combination: Vec<(usize, Rat)> },
    /// An F-nef divisor pairing nonnegatively with every F-curve and
    /// negatively with the queried class.
    Separated { divisor: DivisorClass },
}

impl FconeOutcome {
    pub fn is_member(&self) -> bool {
        matches!(self, FconeOutcome::Member { .. })
    }
}

fn class_coords(c: &CurveClass) -> Vec<Rat> {
    let mut coords = c.delta().to_vec();
    coords.extend_from_slice(c.psi());
    coords
}

fn divisor_from_functional(n: usize, rho: usize, y: &[Rat]) -> Result<DivisorClass, StrongFError> {
    let sig = groundset::sigma(n)?;
    Ok(DivisorClass::from_fn(n, |s| {
        if s.is_proper() {
            -&y[sig.proper_index_of_mask(s.mask()).expect("proper")]
        } else if s.size() == 1 {
            y[rho + s.mask().trailing_zeros() as usize - 1].clone()
        } else {
            y[rho + n - 1].clone()
        }
    })?)
}

/// Decides whether a curve class lies in the cone spanned by all
/// F-curves, with a verified certificate either way: a combination, or a
/// separating divisor re-checked to be F-nef and negative on the class.
pub fn fcone_member(c: &CurveClass) -> Result<FconeOutcome, StrongFError> {
    let n = c.n();
    let sig = groundset::sigma(n)?;
    let rho = sig.proper_count();
    let curves = curves::all_fcurves(n)?;
    let gens: Vec<Vec<Rat>> = curves.iter().map(|f| class_coords(&f.class())).collect();
    let target = class_coords(c);
    match ratlp::cone_member(&gens, &target)? {
        ConeMembership::Member(t) => {
            let combination: Vec<(usize, Rat)> = t
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect();
            Ok(FconeOutcome::Member { combination })
        }
        ConeMembership::Separated(y) => {
            let divisor = divisor_from_functional(n, rho, &y)?;
            for curve in &curves {
                if curves::pair_divisor_curve(&divisor, &curve.class())?.is_negative() {
                    return Err(StrongFError::Internal("separator is not F-nef"));
                }
            }
            if !curves::pair_divisor_curve(&divisor, c)?.is_negative() {
                return Err(StrongFError::Internal("separator not negative on class"));
            }
            Ok(FconeOutcome::Separated { divisor })
        }
    }
}

/// Outcome of the size-symmetrized membership test: feasibility of the
/// aggregated system proves nothing about the full cone, but an
/// aggregated separation lifts to a symmetric divisor that is re-verified
/// against every F-curve individually.
#[derive(Clone, Debug)]
pub enum SymmetrizedOutcome {
    Inconclusive,
    Separated { divisor: DivisorClass },
}

/// Size class of a proper-subset mask: the smaller side of its 2-part
/// partition of `[n]`.
fn size_class(n: usize, mask: u32) -> usize {
    let s = mask.count_ones() as usize;
    s.min(n - s)
}

fn aggregate_coords(n: usize, c: &CurveClass) -> Result<Vec<Rat>, StrongFError> {
    let sig = groundset::sigma(n)?;
    let h = n / 2 - 1;
    let mut coords = vec![Rat::zero(); h + 1];
    for (p, v) in c.delta().iter().enumerate() {
        if !v.is_zero() {
            coords[size_class(n, sig.proper()[p].mask()) - 2] += v;
        }
    }
    for v in c.psi() {
        coords[h] += v;
    }
    Ok(coords)
}

/// One representative F-curve per four-part partition type of `n`.
fn type_representatives(n: usize) -> Result<Vec<FCurve>, StrongFError> {
    let mut reps = Vec::new();
    for a in 1..=n / 4 {
        for b in a..=(n - a) / 3 {
            for c in b..=(n - a - b) / 2 {
                let d = n - a - b - c;
                debug_assert!(d >= c);
                let range_mask = |lo: usize, len: usize| -> u32 { ((1u32 << len) - 1) << lo };
                let x = range_mask(1, a);
                let y = range_mask(1 + a, b);
                let z = range_mask(1 + a + b, c);
                reps.push(FCurve::from_masks(n, x, y, z)?);
            }
        }
    }
    Ok(reps)
}

/// Membership test in the size-symmetrized quotient: coordinates are the
/// per-size-class boundary pairing totals plus the total cotangent
/// pairing, and generators are one F-curve per partition type. Used when
/// the full system is out of reach (611501 curves at n = 12); a
/// separation is still a complete certificate because the lifted divisor
/// is checked against every F-curve by exact integer arithmetic.
pub fn fcone_member_symmetrized(c: &CurveClass) -> Result<SymmetrizedOutcome, StrongFError> {
    let n = c.n();
    let reps = type_representatives(n)?;
    let gens: Vec<Vec<Rat>> = reps
        .iter()
        .map(|f| aggregate_coords(n, &f.class()))
        .collect::<Result<_, _>>()?;
    let target = aggregate_coords(n, c)?;
    match ratlp::cone_member(&gens, &target)? {
        ConeMembership::Member(_) => Ok(SymmetrizedOutcome::Inconclusive),
        ConeMembership::Separated(y) => {
            let h = n / 2 - 1;
            let divisor = DivisorClass::from_fn(n, |s| {
                if s.is_proper() {
                    -&y[size_class(n, s.mask()) - 2]
                } else {
                    y[h].clone()
                }
            })?;
            if min_curve_pairing(&divisor)?.is_negative() {
                return Err(StrongFError::Internal("lifted separator is not F-nef"));
            }
            if !curves::pair_divisor_curve(&divisor, c)?.is_negative() {
                return Err(StrongFError::Internal("separator not negative on class"));
            }
            Ok(SymmetrizedOutcome::Separated { divisor })
        }
    }
}

/// Membership test in the subspace of divisors constant on the orbits
/// of a group of marking symmetries (permutations of `1..n-1`, given as
/// generators; the last marking stays fixed).  Aggregation loses
/// information, so feasibility of the aggregated system only returns
/// [`SymmetrizedOutcome::Inconclusive`]; an aggregated separation lifts
/// to an orbit-constant divisor that is re-verified against every
/// F-curve by exact arithmetic, so a `Separated` answer is a complete
/// certificate.  When the group fixes the queried class, restricting to
/// invariant divisors loses no separating power (average any separator
/// over the group), which makes this the right tool for large `n` where
/// the full system is out of reach.
///
/// The aggregated system is solved by column generation: curve columns
/// are deduplicated orbit-sum vectors (seven nonzero entries each), the
/// master problem runs over a working set, and every candidate
/// functional is priced exactly against all remaining columns.
pub fn fcone_member_invariant(
    c: &CurveClass,
    group: &[Vec<usize>],
) -> Result<SymmetrizedOutcome, StrongFError> {
    let n = c.n();
    let sig = groundset::sigma(n)?;
    let size = 1usize << (n - 1);
    for g in group {
        let mut seen = 0u32;
        if g.len() == n - 1 {
            for &img in g {
                if (1..n).contains(&img) {
                    seen |= 1 << img;
                }
            }
        }
        if seen != groundset::mask_all(n) {
            return Err(StrongFError::Internal(
                "symmetry generator is not a permutation of the markings",
            ));
        }
    }

    // Orbits of the subset coordinates, indexed by `mask >> 1`.
    let mut orbit_id: Vec<u16> = vec![u16::MAX; size];
    let mut n_orbits = 0usize;
    let mut queue: Vec<usize> = Vec::new();
    for start in 1..size {
        if orbit_id[start] != u16::MAX {
            continue;
        }
        orbit_id[start] = n_orbits as u16;
        queue.push(start);
        while let Some(idx) = queue.pop() {
            for g in group {
                let mut img = 0usize;
                let mut rest = idx;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    img |= 1 << (g[i] - 1);
                }
                if orbit_id[img] == u16::MAX {
                    orbit_id[img] = n_orbits as u16;
                    queue.push(img);
                }
            }
        }
        n_orbits += 1;
    }

    // Aggregated target: orbit sums of the class's pairing coefficients.
    let mut target = vec![Rat::zero(); n_orbits];
    for s in sig.subsets() {
        let o = orbit_id[(s.mask() >> 1) as usize] as usize;
        let m = if s.is_proper() {
            -&c.delta()[sig.proper_index_of_mask(s.mask()).expect("proper index")]
        } else if s.size() == 1 {
            c.psi()[s.mask().trailing_zeros() as usize - 1].clone()
        } else {
            c.psi()[n - 1].clone()
        };
        target[o] += m;
    }

    // Deduplicated aggregated curve columns, sparse over orbits.
    let mut distinct: HashSet<Vec<(u16, i8)>> = HashSet::new();
    groundset::for_each_four_partition(n, |x, y, z| {
        let xyz = x | y | z;
        let slots =
            [(x, 1i8), (y, 1), (z, 1), (xyz, 1), (x | y, -1), (x | z, -1), (y | z, -1)];
        let mut col: Vec<(u16, i8)> = slots
            .iter()
            .map(|&(mask, w)| (orbit_id[(mask >> 1) as usize], w))
            .collect();
        col.sort_unstable_by_key(|e| e.0);
        let mut merged: Vec<(u16, i8)> = Vec::with_capacity(7);
        for (o, w) in col {
            match merged.last_mut() {
                Some(last) if last.0 == o => last.1 += w,
                _ => merged.push((o, w)),
            }
        }
        merged.retain(|e| e.1 != 0);
        distinct.insert(merged);
    });
    let mut columns: Vec<Vec<(u16, i8)>> = distinct.into_iter().collect();
    columns.sort();

    let dense = |col: &[(u16, i8)]| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); n_orbits];
        for &(o, w) in col {
            v[o as usize] = int(w as i64);
        }
        v
    };
    let mut active: Vec<usize> = (0..columns.len().min(64)).collect();
    let mut in_active = vec![false; columns.len()];
    for &a in &active {
        in_active[a] = true;
    }
    for _round in 0..200 {
        let gens: Vec<Vec<Rat>> = active.iter().map(|&a| dense(&columns[a])).collect();
        match ratlp::cone_member(&gens, &target)? {
            ConeMembership::Member(_) => return Ok(SymmetrizedOutcome::Inconclusive),
            ConeMembership::Separated(y) => {
                let mut violated: Vec<(Rat, usize)> = Vec::new();
                for (idx, col) in columns.iter().enumerate() {
                    if in_active[idx] {
                        continue;
                    }
                    let mut s = Rat::zero();
                    for &(o, w) in col {
                        s += &y[o as usize] * int(w as i64);
                    }
                    if s.is_negative() {
                        violated.push((s, idx));
                    }
                }
                if violated.is_empty() {
                    let divisor = DivisorClass::from_fn(n, |s| {
                        y[orbit_id[(s.mask() >> 1) as usize] as usize].clone()
                    })?;
                    if min_curve_pairing(&divisor)?.is_negative() {
                        return Err(StrongFError::Internal("lifted separator is not F-nef"));
                    }
                    if !curves::pair_divisor_curve(&divisor, c)?.is_negative() {
                        return Err(StrongFError::Internal("separator not negative on class"));
                    }
                    return Ok(SymmetrizedOutcome::Separated { divisor });
                }
                violated.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
                for (_, idx) in violated.into_iter().take(32) {
                    active.push(idx);
                    in_active[idx] = true;
                }
            }
        }
    }
    Err(StrongFError::BudgetExceeded("invariant-subspace separation did not converge"))
}

/// The minimum pairing of a divisor with any F-curve, by exact integer
/// scan over every four-part partition when the coefficients scale to
/// machine integers, falling back to rational arithmetic otherwise.
pub fn min_curve_pairing(d: &DivisorClass) -> Result<Rat, StrongFError> {
    let n = d.n();
    if let Some((table, denom)) = integer_value_table(d) {
        let mut min: Option<i64> = None;
        groundset::for_each_four_partition(n, |x, y, z| {
            let v = table[x as usize >> 1]
                + table[y as usize >> 1]
                + table[z as usize >> 1]
                + table[(x | y | z) as usize >> 1]
                - table[(x | y) as usize >> 1]
                - table[(x | z) as usize >> 1]
                - table[(y | z) as usize >> 1];
            min = Some(min.map_or(v, |m: i64| m.min(v)));
        });
        let min = min.ok_or(StrongFError::Internal("no curves"))?;
        return Ok(Rat::new(min.into(), denom.into()));
    }
    let mut min: Option<Rat> = None;
    groundset::for_each_four_partition(n, |x, y, z| {
        let v = picard::pair_fcurve_masks(d, x, y, z);
        min = Some(match min.take() {
            None => v,
            Some(m) => m.min(v),
        });
    });
    min.ok_or(StrongFError::Internal("no curves"))
}

/// Values of a divisor on every subset mask, scaled to integers by the
/// common denominator; indexed by `mask >> 1`. `None` if any magnitude
/// does not fit comfortably in machine range.
fn integer_value_table(d: &DivisorClass) -> Option<(Vec<i64>, i64)> {
    use num::Integer;
    let n = d.n();
    let size = 1usize << (n - 1);
    let mut denom = num::BigInt::from(1);
    for s in d.sigma().subsets() {
        denom = denom.lcm(d.value(s).denom());
    }
    let denom_i = as_i64(&Rat::new(denom.clone(), 1.into()))?;
    let mut table = vec![0i64; size];
    let limit = i64::MAX / 16;
    for s in d.sigma().subsets() {
        let scaled = d.value(s) * Rat::new(denom.clone(), 1.into());
        let v = as_i64(&scaled)?;
        if v.abs() > limit {
            return None;
        }
        table[s.mask() as usize >> 1] = v;
    }
    Some((table, denom_i))
}

/// Checks the counterexample format: `x` pairs nonnegatively with every
/// boundary divisor, `y` pairs nonnegatively with every F-curve, and the
/// two pair strictly negatively with each other — a certified witness
/// that `x` lies outside the F-curve cone.
pub fn witness_pair_check(x: &CurveClass, y: &DivisorClass) -> Result<bool, StrongFError> {
    if x.n() != y.n() {
        return Err(StrongFError::MixedN(x.n(), y.n()));
    }
    if x.delta().iter().any(|v| v.is_negative()) {
        return Ok(false);
    }
    if min_curve_pairing(y)?.is_negative() {
        return Ok(false);
    }
    Ok(curves::pair_divisor_curve(y, x)?.is_negative())
}

/// Results of the once-per-`n` degeneracy guards on the two cones.
#[derive(Clone, Copy, Debug)]
pub struct ConeGuards {
    /// The F-curve cone contains no line: the all-ones size profile pairs
    /// to one with every F-curve, so it is strictly positive on the cone.
    pub p_pointed: bool,
    /// The F-curve classes span the full numerical space (modular rank
    /// equals the Picard rank — a one-sided certificate).
    pub p_full_dim: bool,
    /// The PBD cone sits inside the nonnegative orthant of multiplicity
    /// space, hence contains no line.
    pub q_pointed: bool,
    /// Effective designs span the balance subspace.
    pub q_full_dim: bool,
}

impl ConeGuards {
    pub fn all_ok(&self) -> bool {
        self.p_pointed && self.p_full_dim && self.q_pointed && self.q_full_dim
    }
}

const RANK_PRIME: u64 = (1 << 61) - 1;

/// Verifies that both cones are pointed and full-dimensional for this
/// `n`, as required before any dual search is meaningful.
pub fn degenerate_cone_guards(n: usize) -> Result<ConeGuards, StrongFError> {
    let sig = groundset::sigma(n)?;
    let curves = curves::all_fcurves(n)?;
    let ones_divisor = DivisorClass::from_fn(n, |_| int(1))?;
    let one = int(1);
    let p_pointed = curves
        .iter()
        .map(|f| curves::pair_divisor_curve(&ones_divisor, &f.class()))
        .all(|v| matches!(v, Ok(ref x) if *x == one));
    let expected = picard::picard_rank(n)?;
    let rows: Vec<Vec<Rat>> = curves.iter().map(|f| class_coords(&f.class())).collect();
    let p_full_dim = ratlp::rank_mod_p(&rows, RANK_PRIME)? == expected;
    // Multiplicity vectors of certified effective designs.
    let mut design_rows: Vec<Vec<Rat>> = Vec::new();
    let mut mult_row = |pbd: &curves::Pbd| {
        let mut row = vec![Rat::zero(); sig.proper_count()];
        for (mask, mult) in pbd.blocks() {
            row[sig.proper_index_of_mask(*mask).expect("proper block")] = mult.clone();
        }
        design_rows.push(row);
    };
    mult_row(&curves::all_pairs_design(n)?);
    for s in sig.proper() {
        mult_row(&curves::block_completion_design(n, s.mask())?);
    }
    let q_full_dim = ratlp::rank_mod_p(&design_rows, RANK_PRIME)? == expected;
    Ok(ConeGuards { p_pointed, p_full_dim, q_pointed: true, q_full_dim })
}

#[cfg(test)]
mod tests;
