//! Effective-boundary certificates and the ascent of effectivity.
//!
//! A divisor `D = -Σ b(I,J) Δ_{I,J}` on a space with `m` markings is an
//! effective boundary exactly when some weight function `w` on pairs of
//! markings satisfies `Σ_{i∈I, j∈J} w(i,j) ≥ b(I,J)` for every 2-part
//! partition of `[m]`, with equality on the non-proper partitions.  For
//! symmetric divisor classes, recorded as even size profiles, the
//! pullback to the stratum of a partition `λ ⊢ n` has `b` values
//! `f(Σ_{t∈I} λ_t)`, and a certificate for a partition with a repeated
//! part ascends from the certificate of the partition with that pair
//! merged.  Iterating the ascent reduces all strata to strict partitions
//! (settled by linear programming) and partitions of at most three parts
//! (settled in closed form).

use crate::fnef::{CyclicFn, FnefError};
use crate::groundset::{self, GroundError};
use crate::picard::{self, DivisorClass, PicardError};
use crate::ratlp::{Feasibility, LpError, RationalSystem, Rel, VarKind};
use crate::rational::{format_rat, int, max_abs, rat, serde_rat_vec, Rat};
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest partition length for per-partition certification; verification
/// touches all `2^(k-1) - 1` splits.
pub const MAX_PARTS: usize = 16;

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Fnef(#[from] FnefError),
    #[error("bad size function: {0}")]
    BadSizeFunction(String),
    #[error("marking count {0} outside 4..=12")]
    BadMarkingCount(usize),
    #[error("partition has a nonpositive part or more than {MAX_PARTS} parts")]
    BadPartition,
    #[error("partition sums to {got}, expected {want}")]
    MismatchedTotal { got: u32, want: u32 },
    #[error("no certificate exists for partition {0:?}")]
    NotCertifiable(Vec<u32>),
    #[error("divisor class is not symmetric")]
    NotSymmetricClass,
    #[error("size profile is not F-nef")]
    NotFnefSymmetric,
    #[error("size profile is not integral")]
    NotIntegral,
    #[error("internal invariant failed: {0}")]
    Internal(&'static str),
}

/// An even rational function on sizes `0..=n` vanishing at the ends;
/// the coefficient data of a symmetric divisor class.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymmetricFn {
    n: u32,
    values: Vec<Rat>,
}

impl SymmetricFn {
    pub fn new(n: u32, values: Vec<Rat>) -> Result<Self, CertError> {
        if n < 2 || values.len() != n as usize + 1 {
            return Err(CertError::BadSizeFunction(format!(
                "need {} values for n = {n}, got {}",
                n + 1,
                values.len()
            )));
        }
        if !values[0].is_zero() || !values[n as usize].is_zero() {
            return Err(CertError::BadSizeFunction("must vanish at 0 and n".into()));
        }
        for s in 1..n {
            if values[s as usize] != values[(n - s) as usize] {
                return Err(CertError::BadSizeFunction(format!(
                    "values at {s} and {} differ: {} vs {}",
                    n - s,
                    format_rat(&values[s as usize]),
                    format_rat(&values[(n - s) as usize]),
                )));
            }
        }
        Ok(SymmetricFn { n, values })
    }

    pub fn from_fn(n: u32, f: impl Fn(u32) -> Rat) -> Result<Self, CertError> {
        SymmetricFn::new(n, (0..=n).map(f).collect())
    }

    /// The size profile of the standard quadratic `s (n - s)`; its class
    /// is zero because every four part sizes sum to `n`.
    pub fn standard_quadratic(n: u32) -> SymmetricFn {
        SymmetricFn::from_fn(n, |s| rat((s as i64) * ((n - s) as i64), 1))
            .expect("even by construction")
    }

    /// Reads an integer cyclic function as a rational size profile.
    pub fn from_cyclic(f: &CyclicFn) -> Result<SymmetricFn, CertError> {
        let n = f.modulus() as u32;
        let mut values: Vec<Rat> = f.table().iter().map(|&v| int(v)).collect();
        values.push(Rat::zero());
        SymmetricFn::new(n, values)
    }

    /// The integer cyclic function with these values, when integral.
    pub fn to_cyclic(&self) -> Result<CyclicFn, CertError> {
        let table = self.values[..self.n as usize]
            .iter()
            .map(|v| crate::rational::as_i64(v).ok_or(CertError::NotIntegral))
            .collect::<Result<Vec<i64>, _>>()?;
        Ok(CyclicFn::new(self.n as i64, table)?)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self, s: u32) -> &Rat {
        &self.values[s as usize]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    fn value_mod(&self, x: i64) -> &Rat {
        &self.values[x.rem_euclid(self.n as i64) as usize]
    }

    pub fn add(&self, other: &SymmetricFn) -> Result<SymmetricFn, CertError> {
        if self.n != other.n {
            return Err(CertError::BadSizeFunction("mixed n".into()));
        }
        SymmetricFn::new(
            self.n,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn scale(&self, k: &Rat) -> SymmetricFn {
        SymmetricFn { n: self.n, values: self.values.iter().map(|v| v * k).collect() }
    }

    /// Bracket at part sizes `(a, b, c)` with `a + b + c <= n`.
    pub fn bracket_type(&self, a: u32, b: u32, c: u32) -> Rat {
        assert!(a + b + c <= self.n, "sizes exceed n");
        self.value(a) + self.value(b) + self.value(c) + self.value(a + b + c)
            - self.value(a + b)
            - self.value(a + c)
            - self.value(b + c)
    }

    /// The three-term bracket on arbitrary residues mod `n`.
    pub fn cyclic_bracket(&self, x: i64, y: i64, z: i64) -> Rat {
        self.value_mod(x) + self.value_mod(y) + self.value_mod(z) + self.value_mod(x + y + z)
            - self.value_mod(x + y)
            - self.value_mod(x + z)
            - self.value_mod(y + z)
    }

    /// Whether every F-curve type pairing is nonnegative.
    pub fn is_fnef_symmetric(&self) -> bool {
        let n = self.n;
        for a in 1..n {
            for b in a..n {
                for c in b..n {
                    if a + b + c > n - 1 {
                        break;
                    }
                    if self.bracket_type(a, b, c).is_negative() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Whether the bracket is nonnegative on all of `ℤₙ³`, not just on
    /// F-curve types.
    pub fn is_bracket_nonneg(&self) -> bool {
        let n = self.n as i64;
        for x in 1..n {
            for y in x..n {
                for z in y..n {
                    if self.cyclic_bracket(x, y, z).is_negative() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The symmetric divisor with these coefficients on each size.
    pub fn to_divisor(&self) -> Result<DivisorClass, CertError> {
        Ok(DivisorClass::from_fn(self.n as usize, |s| {
            self.values[s.size()].clone()
        })?)
    }

    /// Reads the size profile off a divisor whose coefficients depend
    /// only on subset size.
    pub fn from_divisor(d: &DivisorClass) -> Result<SymmetricFn, CertError> {
        let n = d.n() as u32;
        let mut values: Vec<Option<Rat>> = vec![None; n as usize + 1];
        values[0] = Some(Rat::zero());
        values[n as usize] = Some(Rat::zero());
        for s in d.sigma().subsets() {
            let slot = &mut values[s.size()];
            match slot {
                None => *slot = Some(d.value(s).clone()),
                Some(v) if v == d.value(s) => {}
                Some(_) => return Err(CertError::NotSymmetricClass),
            }
        }
        // Sizes near n are only represented through complements.
        let mut out = Vec::with_capacity(n as usize + 1);
        for (s, v) in values.iter().enumerate() {
            match v {
                Some(v) => out.push(v.clone()),
                None => {
                    let mirror = values[n as usize - s]
                        .clone()
                        .ok_or(CertError::Internal("size with no subsets"))?;
                    out.push(mirror);
                }
            }
        }
        SymmetricFn::new(n, out).map_err(|_| CertError::NotSymmetricClass)
    }
}

/// Shifts by a multiple of the class-zero quadratic so the size-one
/// coefficient vanishes: the pure boundary representative of the class.
pub fn boundary_representative(f: &SymmetricFn) -> SymmetricFn {
    let c = f.value(1) / rat((f.n - 1) as i64, 1);
    if c.is_zero() {
        return f.clone();
    }
    f.add(&SymmetricFn::standard_quadratic(f.n).scale(&-c)).expect("same n")
}

/// Recovers a size profile for a divisor with symmetric class: solves for
/// the pure boundary representative `f̃` matching every F-curve pairing,
/// then returns `f̃ + c·A_n` with `c = 2·max|f̃|`, which has nonnegative
/// bracket on all of `ℤₙ` whenever the divisor is F-nef.
pub fn symmetric_fn_from_divisor(d: &DivisorClass) -> Result<SymmetricFn, CertError> {
    let n = d.n() as u32;
    let half = (n / 2) as usize;
    // Unknowns: values at sizes 2..=n/2; size 1 is pinned to zero.
    let n_vars = half.saturating_sub(1);
    let value_row = |s: u32, coeffs: &mut [Rat], sign: i64| {
        let s = s.min(n - s);
        if s >= 2 {
            coeffs[s as usize - 2] += rat(sign, 1);
        }
    };
    let mut sys = RationalSystem::new(vec![VarKind::Free; n_vars]);
    let mut seen = std::collections::HashSet::new();
    groundset::for_each_four_partition(n as usize, |x, y, z| {
        let (a, b, c) = (x.count_ones(), y.count_ones(), z.count_ones());
        let mut sizes = [a, b, c];
        sizes.sort_unstable();
        if !seen.insert(sizes) {
            return;
        }
        let [a, b, c] = sizes;
        let mut coeffs = vec![Rat::zero(); n_vars];
        for s in [a, b, c, a + b + c] {
            value_row(s, &mut coeffs, 1);
        }
        for s in [a + b, a + c, b + c] {
            value_row(s, &mut coeffs, -1);
        }
        let rhs = picard::pair_fcurve_masks(d, x, y, z);
        sys.push_row(coeffs, Rel::Eq, rhs).expect("row width");
    });
    let point = match sys.feasible()? {
        Feasibility::Feasible(p) => p,
        Feasibility::Infeasible(_) => return Err(CertError::NotSymmetricClass),
    };
    let mut values = vec![Rat::zero(); n as usize + 1];
    for s in 2..=half {
        values[s] = point[s - 2].clone();
        values[n as usize - s] = point[s - 2].clone();
    }
    let tilde = SymmetricFn::new(n, values)?;
    if !picard::classes_equal(d, &tilde.to_divisor()?)? {
        return Err(CertError::NotSymmetricClass);
    }
    let c = max_abs(tilde.values()) * int(2);
    tilde.add(&SymmetricFn::standard_quadratic(n).scale(&c))
}

fn pair_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * m - i * (i + 1) / 2 + (j - i - 1)
}

/// A rational weight on each unordered pair of markings `{1..m}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WeightFn {
    m: usize,
    #[serde(with = "serde_rat_vec")]
    w: Vec<Rat>,
}

impl WeightFn {
    pub fn new(m: usize, w: Vec<Rat>) -> Result<Self, CertError> {
        if w.len() != m * m.saturating_sub(1) / 2 {
            return Err(CertError::Internal("weight vector has wrong length"));
        }
        Ok(WeightFn { m, w })
    }

    pub fn zero(m: usize) -> Self {
        WeightFn { m, w: vec![Rat::zero(); m * m.saturating_sub(1) / 2] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The weight of the pair of markings `{i, j}`, 1-indexed.
    pub fn value(&self, i: usize, j: usize) -> &Rat {
        assert!(i != j && (1..=self.m).contains(&i) && (1..=self.m).contains(&j));
        let (i, j) = (i.min(j) - 1, i.max(j) - 1);
        &self.w[pair_index(self.m, i, j)]
    }

    /// Total weight across the split `(I, [m] \ I)` where `I` is given by
    /// mask bits `1..m-1` (marking `m` always lies in the complement).
    pub fn cut(&self, mask: u32) -> Rat {
        let mut total = Rat::zero();
        for i in 1..self.m {
            if mask & (1 << i) == 0 {
                continue;
            }
            for j in 1..=self.m {
                if mask & (1 << j) == 0 {
                    total += self.value(i, j);
                }
            }
        }
        total
    }
}

/// All 2-part partitions of `[m]`, each once, as the mask of the side not
/// containing marking `m` (bits `1..m-1`).
fn splits(m: usize) -> impl Iterator<Item = u32> {
    (1u64..(1 << (m - 1))).map(|k| (k << 1) as u32)
}

fn is_tight(m: usize, mask: u32) -> bool {
    let ones = mask.count_ones() as usize;
    ones == 1 || ones == m - 1
}

fn verify_b(m: usize, b: &dyn Fn(u32) -> Rat, w: &WeightFn) -> bool {
    if w.m != m || m < 2 {
        return m >= 1 && w.m == m;
    }
    splits(m).all(|mask| {
        let cut = w.cut(mask);
        let target = b(mask);
        if is_tight(m, mask) {
            cut == target
        } else {
            cut >= target
        }
    })
}

fn certify_b(m: usize, b: &dyn Fn(u32) -> Rat) -> Result<Result<WeightFn, Vec<Rat>>, CertError> {
    if m < 2 {
        return Ok(Ok(WeightFn::zero(m)));
    }
    let n_pairs = m * (m - 1) / 2;
    let mut sys = RationalSystem::new(vec![VarKind::Free; n_pairs]);
    for mask in splits(m) {
        let mut coeffs = vec![Rat::zero(); n_pairs];
        for i in 1..m {
            if mask & (1 << i) == 0 {
                continue;
            }
            for j in 1..=m {
                if mask & (1 << j) == 0 {
                    let (a, c) = (i.min(j) - 1, i.max(j) - 1);
                    coeffs[pair_index(m, a, c)] += rat(1, 1);
                }
            }
        }
        let rel = if is_tight(m, mask) { Rel::Eq } else { Rel::Ge };
        sys.push_row(coeffs, rel, b(mask))?;
    }
    match sys.feasible()? {
        Feasibility::Feasible(w) => {
            let w = WeightFn::new(m, w)?;
            if !verify_b(m, b, &w) {
                return Err(CertError::Internal("certificate failed verification"));
            }
            Ok(Ok(w))
        }
        Feasibility::Infeasible(farkas) => Ok(Err(farkas)),
    }
}

/// A verified weight certificate that a divisor is an effective boundary.
#[derive(Clone, Debug)]
pub struct EffectivityCertificate {
    pub divisor: DivisorClass,
    pub weight: WeightFn,
    pub verified: bool,
}

/// The outcome of a boundary-effectivity decision.
#[derive(Clone, Debug)]
pub enum CertOutcome {
    Certified(EffectivityCertificate),
    /// Exact multipliers proving the weight system infeasible.
    Refuted(Vec<Rat>),
}

impl CertOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, CertOutcome::Certified(_))
    }
}

/// Decides whether `d` is an effective boundary: its coefficient at each
/// split is the target a pair-weight cut must reach, with equality across
/// singleton splits.
pub fn certify_effective(d: &DivisorClass) -> Result<CertOutcome, CertError> {
    let m = d.n();
    if !(4..=12).contains(&m) {
        return Err(CertError::BadMarkingCount(m));
    }
    let b = |mask: u32| d.value_by_mask(mask).clone();
    Ok(match certify_b(m, &b)? {
        Ok(weight) => CertOutcome::Certified(EffectivityCertificate {
            divisor: d.clone(),
            weight,
            verified: true,
        }),
        Err(farkas) => CertOutcome::Refuted(farkas),
    })
}

/// Checks a weight function against a divisor's split targets.
pub fn verify_effective(d: &DivisorClass, w: &WeightFn) -> bool {
    let m = d.n();
    let b = |mask: u32| d.value_by_mask(mask).clone();
    verify_b(m, &b, w)
}

fn check_partition(f: &SymmetricFn, parts: &[u32]) -> Result<(), CertError> {
    if parts.is_empty() || parts.iter().any(|&p| p == 0) || parts.len() > MAX_PARTS {
        return Err(CertError::BadPartition);
    }
    let got: u32 = parts.iter().sum();
    if got != f.n {
        return Err(CertError::MismatchedTotal { got, want: f.n });
    }
    Ok(())
}

/// The pullback target at a split: `f` evaluated at the total size of the
/// parts on the mask side.
fn split_target(f: &SymmetricFn, parts: &[u32], mask: u32) -> Rat {
    let total: u32 =
        (1..parts.len()).filter(|&i| mask & (1 << i) != 0).map(|i| parts[i - 1]).sum();
    f.value(total).clone()
}

/// Checks all split conditions for the stratum of `parts`: cuts dominate
/// the pulled-back size values, with equality on single-part splits.
pub fn verify_certificate(f: &SymmetricFn, parts: &[u32], w: &WeightFn) -> bool {
    if check_partition(f, parts).is_err() || w.m != parts.len() {
        return false;
    }
    let b = |mask: u32| split_target(f, parts, mask);
    verify_b(parts.len(), &b, w)
}

/// Searches for a stratum certificate by exact linear programming over
/// the pair weights. `None` means no certificate exists.
pub fn certify_partition(
    f: &SymmetricFn,
    parts: &[u32],
) -> Result<Option<WeightFn>, CertError> {
    check_partition(f, parts)?;
    let b = |mask: u32| split_target(f, parts, mask);
    Ok(certify_b(parts.len(), &b)?.ok())
}

/// Lifts a certificate for the partition with the last two (equal) parts
/// merged to one for the full partition: old weights stay, the merged
/// part's weights split in half, and the new internal pair pays the
/// difference between one part and the merged double.
pub fn ascend(f: &SymmetricFn, parts: &[u32], w_merged: &WeightFn) -> Result<WeightFn, CertError> {
    check_partition(f, parts)?;
    let k = parts.len();
    if k < 2 || parts[k - 1] != parts[k - 2] {
        return Err(CertError::Internal("last two parts must be equal"));
    }
    if w_merged.m != k - 1 {
        return Err(CertError::Internal("merged certificate has wrong arity"));
    }
    let lam = parts[k - 1];
    let mut w = vec![Rat::zero(); k * (k - 1) / 2];
    for i in 0..k - 2 {
        for j in i + 1..k - 2 {
            w[pair_index(k, i, j)] = w_merged.value(i + 1, j + 1).clone();
        }
        let half = w_merged.value(i + 1, k - 1) / rat(2, 1);
        w[pair_index(k, i, k - 2)] = half.clone();
        w[pair_index(k, i, k - 1)] = half;
    }
    w[pair_index(k, k - 2, k - 1)] = f.value(lam) - f.value(2 * lam) / rat(2, 1);
    WeightFn::new(k, w)
}

/// How a certificate was produced.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum CertRoute {
    /// Closed-form solution for at most three parts.
    Direct,
    /// Exact linear programming on a strict partition.
    Lp,
    /// Ascended from the partition with a repeated pair merged.
    Ascended,
}

/// Builds a verified certificate for one partition: direct solves for up
/// to three parts, linear programming for strict partitions, and the
/// merge-and-ascend recursion when a part repeats.
pub fn certificate_for_partition(
    f: &SymmetricFn,
    parts: &[u32],
) -> Result<(WeightFn, CertRoute), CertError> {
    check_partition(f, parts)?;
    let k = parts.len();
    let (w, route) = if k <= 3 {
        let b = |i: usize| f.value(parts[i]).clone();
        let w = match k {
            1 => WeightFn::zero(k),
            2 => WeightFn::new(2, vec![b(0)])?,
            _ => {
                let two = rat(2, 1);
                WeightFn::new(
                    3,
                    vec![
                        (b(0) + b(1) - b(2)) / &two,
                        (b(0) + b(2) - b(1)) / &two,
                        (b(1) + b(2) - b(0)) / &two,
                    ],
                )?
            }
        };
        (w, CertRoute::Direct)
    } else {
        let mut sorted: Vec<usize> = (0..k).collect();
        sorted.sort_by_key(|&i| std::cmp::Reverse(parts[i]));
        let repeat = (1..k).rev().find(|&i| parts[sorted[i]] == parts[sorted[i - 1]]);
        let pos = match repeat {
            // All parts distinct: a strict stratum, settled by the LP.
            None => match certify_partition(f, parts)? {
                Some(w) => return Ok((w, CertRoute::Lp)),
                None => return Err(CertError::NotCertifiable(parts.to_vec())),
            },
            Some(pos) => pos,
        };
        // Move one repeated pair to the back, merge it, recurse, ascend,
        // then translate the weights back to the caller's part order.
        let twins = [sorted[pos - 1], sorted[pos]];
        let mut order: Vec<usize> =
            sorted.iter().copied().filter(|i| !twins.contains(i)).collect();
        order.extend(twins);
        let reordered: Vec<u32> = order.iter().map(|&i| parts[i]).collect();
        let mut merged = reordered[..k - 2].to_vec();
        merged.push(2 * reordered[k - 1]);
        let ascended = match certificate_for_partition(f, &merged) {
            Ok((w_merged, _)) => {
                let w_reordered = ascend(f, &reordered, &w_merged)?;
                let mut w = vec![Rat::zero(); k * (k - 1) / 2];
                for a in 0..k {
                    for b in a + 1..k {
                        let (i, j) = (order[a].min(order[b]), order[a].max(order[b]));
                        w[pair_index(k, i, j)] = w_reordered.value(a + 1, b + 1).clone();
                    }
                }
                let w = WeightFn::new(k, w)?;
                verify_certificate(f, parts, &w).then_some(w)
            }
            Err(CertError::NotCertifiable(_)) => None,
            Err(e) => return Err(e),
        };
        // If the ascent fails the partition may still be certifiable, so
        // fall back to the full linear program before giving up.
        match ascended {
            Some(w) => (w, CertRoute::Ascended),
            None => match certify_partition(f, parts)? {
                Some(w) => (w, CertRoute::Lp),
                None => return Err(CertError::NotCertifiable(parts.to_vec())),
            },
        }
    };
    if !verify_certificate(f, parts, &w) {
        return Err(CertError::NotCertifiable(parts.to_vec()));
    }
    Ok((w, route))
}

/// Certificates for every stratum of a symmetric F-nef class.
#[derive(Clone, Debug)]
pub struct StratalReport {
    pub certificates: Vec<(Vec<u32>, WeightFn, CertRoute)>,
}

impl StratalReport {
    /// The number of certified partitions with at least `k` parts.
    pub fn count_with_parts_at_least(&self, k: usize) -> usize {
        self.certificates.iter().filter(|(p, _, _)| p.len() >= k).count()
    }

    pub fn routes_used(&self, route: CertRoute) -> usize {
        self.certificates.iter().filter(|(_, _, r)| *r == route).count()
    }
}

/// Runs the certificate construction over every partition of `n` with at
/// least two parts. The profile must be F-nef; any partition that then
/// fails to certify is reported as an error with its witness partition.
pub fn stratal_effectivity_symmetric(f: &SymmetricFn) -> Result<StratalReport, CertError> {
    if !f.is_fnef_symmetric() {
        return Err(CertError::NotFnefSymmetric);
    }
    let mut report = StratalReport { certificates: Vec::new() };
    for parts in groundset::partitions(f.n) {
        if parts.len() < 2 {
            continue;
        }
        let (w, route) = certificate_for_partition(f, &parts)?;
        report.certificates.push((parts, w, route));
    }
    Ok(report)
}

/// The largest total for which every strict partition has at most `k`
/// parts, so certificates ascend from strict bases of bounded arity.
pub fn symmetric_bound(k: u32) -> u32 {
    (k + 1) * (k + 2) / 2 - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnef;
    use rand::{Rng, SeedableRng};

    fn total_t_profile(n: u32) -> SymmetricFn {
        let t = fnef::total_t(n as i64).unwrap();
        SymmetricFn::from_cyclic(&t).unwrap()
    }

    #[test]
    fn quadratic_profile_is_class_zero() {
        for n in [6u32, 8] {
            let q = SymmetricFn::standard_quadratic(n);
            let zero = DivisorClass::zero(n as usize).unwrap();
            assert!(picard::classes_equal(&q.to_divisor().unwrap(), &zero).unwrap());
            for a in 1..n {
                for b in 1..n {
                    for c in 1..n {
                        if a + b + c <= n {
                            assert!(q.bracket_type(a, b, c).is_zero());
                        }
                    }
                }
            }
            assert!(q.is_bracket_nonneg());
        }
    }

    #[test]
    fn averaged_profile_is_fnef() {
        for n in [6u32, 7, 8] {
            assert!(total_t_profile(n).is_fnef_symmetric());
        }
        let neg = total_t_profile(8).scale(&int(-1));
        assert!(!neg.is_fnef_symmetric());
        assert!(matches!(
            stratal_effectivity_symmetric(&neg),
            Err(CertError::NotFnefSymmetric)
        ));
    }

    #[test]
    fn small_partition_certificates() {
        let f = total_t_profile(8);
        for parts in [vec![8u32], vec![5, 3], vec![4, 4], vec![4, 3, 1], vec![6, 1, 1]] {
            let (w, route) = certificate_for_partition(&f, &parts).unwrap();
            assert!(verify_certificate(&f, &parts, &w), "{parts:?}");
            if parts.len() <= 3 {
                assert_eq!(route, CertRoute::Direct);
            }
        }
    }

    #[test]
    fn ascend_reaches_every_stratum() {
        for n in [6u32, 7, 8] {
            let f = total_t_profile(n);
            let report = stratal_effectivity_symmetric(&f).unwrap();
            // Partitions of small totals never need the LP branch: strict
            // partitions here have at most three parts.
            assert_eq!(report.routes_used(CertRoute::Lp), 0);
            let expected = groundset::partitions(n).iter().filter(|p| p.len() >= 2).count();
            assert_eq!(report.certificates.len(), expected);
        }
    }

    #[test]
    fn ascend_is_exhaustive_on_quadratic_profiles() {
        // Every non-strict partition with the repeated pair placed last
        // ascends from its merged partition, for quadratic-plus-averaged
        // profiles up to n = 10.
        for n in 4u32..=10 {
            let quad = SymmetricFn::standard_quadratic(n);
            let shifted = quad.add(&total_t_profile(n)).unwrap();
            for f in [&quad, &shifted] {
                for parts in groundset::partitions(n) {
                    if parts.len() < 2 || groundset::is_strict(&parts) {
                        continue;
                    }
                    let k = parts.len();
                    let mut sorted = parts.clone();
                    sorted.sort_unstable();
                    let v = sorted.iter().position(|&p| sorted.iter().filter(|&&q| q == p).count() >= 2).map(|i| sorted[i]).unwrap();
                    let mut reordered: Vec<u32> =
                        parts.iter().copied().filter(|&p| p != v).collect();
                    let extras = parts.iter().filter(|&&p| p == v).count() - 2;
                    reordered.extend(std::iter::repeat(v).take(extras));
                    reordered.extend([v, v]);
                    let mut merged = reordered[..k - 2].to_vec();
                    merged.push(2 * v);
                    let (wm, _) = certificate_for_partition(f, &merged).unwrap();
                    let w = ascend(f, &reordered, &wm).unwrap();
                    assert!(verify_certificate(f, &reordered, &w), "n={n} {parts:?}");
                }
            }
        }
    }

    #[test]
    fn ascended_cuts_match_case_analysis() {
        // For the all-twos partition the ascend inequality at a split
        // separating the twins is controlled by a bracket of the profile.
        let f = total_t_profile(8);
        let parts = vec![2u32, 2, 2, 2];
        let merged = vec![2u32, 2, 4];
        let (wm, _) = certificate_for_partition(&f, &merged).unwrap();
        let w = ascend(&f, &parts, &wm).unwrap();
        assert!(verify_certificate(&f, &parts, &w));
        // Splits I = I' ∪ {part 3}, J = J' ∪ {part 4} with I' ⊆ {1, 2};
        // the mask records the side avoiding marking 4.
        for iprime in 0u32..4 {
            let mask = (iprime << 1) | (1 << 3);
            let lam_s = 2 * iprime.count_ones();
            let slack = w.cut(mask) - split_target(&f, &parts, mask);
            let bracket = f.bracket_type(2, 2, lam_s);
            // The cut exceeds its target by at least half the bracket.
            assert!(
                &slack * int(2) >= bracket,
                "mask={mask:#b} slack={} bracket={}",
                format_rat(&slack),
                format_rat(&f.bracket_type(2, 2, lam_s))
            );
        }
    }

    #[test]
    fn case_three_bracket_instance() {
        // The inequality consumed by the ascent's mixed split is a type
        // bracket: for A + B + 2a = n it expands to
        // f(A) + f(B) + 2 f(a) - 2 f(A+a) - f(2a), nonnegative for F-nef
        // profiles.
        for n in 4u32..=20 {
            let quad = SymmetricFn::standard_quadratic(n);
            let total = total_t_profile(n);
            let mix = quad.add(&total.scale(&int(3))).unwrap();
            for f in [&quad, &total, &mix] {
                assert!(f.is_fnef_symmetric());
                for a in 1..n / 2 {
                    for big_a in 1..n {
                        let rest = n as i64 - 2 * a as i64 - big_a as i64;
                        if rest < 1 {
                            continue;
                        }
                        let big_b = rest as u32;
                        let expanded = f.value(big_a) + f.value(big_b)
                            + f.value(a) * int(2)
                            - f.value(big_a + a) * int(2)
                            - f.value(2 * a);
                        assert_eq!(f.bracket_type(big_a, big_b, a), expanded);
                        assert!(!expanded.is_negative(), "n={n} A={big_a} B={big_b} a={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn divisor_level_certificates() {
        // The zero divisor is an effective boundary, with the zero weight
        // function among its certificates.
        for m in [4usize, 5, 6] {
            let zero = DivisorClass::zero(m).unwrap();
            assert!(certify_effective(&zero).unwrap().is_certified());
            assert!(verify_effective(&zero, &WeightFn::zero(m)));
        }
        // A single boundary divisor is an effective boundary, and the
        // zero weight function already certifies it.
        let single = DivisorClass::from_fn(6, |s| int(-((s.mask() == 0b1100) as i64))).unwrap();
        assert!(certify_effective(&single).unwrap().is_certified());
        assert!(verify_effective(&single, &WeightFn::zero(6)));
        // Out-of-range marking counts are rejected.
        assert!(matches!(
            certify_effective(&DivisorClass::zero(13).unwrap()),
            Err(CertError::BadMarkingCount(13))
        ));
    }

    #[test]
    fn negated_psi_on_five_markings_is_refuted() {
        // D = -ψ₁ = Δ_{{1}}; the weight system is decided by the exact LP
        // and the outcome is pinned here.
        let d = DivisorClass::from_fn(5, |s| int(-((s.mask() == 0b10) as i64))).unwrap();
        match certify_effective(&d).unwrap() {
            CertOutcome::Refuted(farkas) => assert!(!farkas.is_empty()),
            CertOutcome::Certified(_) => panic!("expected refutation for -psi_1"),
        }
    }

    #[test]
    fn negated_profile_is_not_certifiable() {
        let f = total_t_profile(8).scale(&int(-1));
        let all_ones = vec![1u32; 8];
        assert!(certify_partition(&f, &all_ones).unwrap().is_none());
        assert!(matches!(
            certificate_for_partition(&f, &all_ones),
            Err(CertError::NotCertifiable(_))
        ));
    }

    #[test]
    fn boundary_representative_normalizes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for n in [6u32, 8] {
            let mut values = vec![int(0); n as usize + 1];
            for s in 1..=n / 2 {
                let v = int(rng.gen_range(-5..=5));
                values[s as usize] = v.clone();
                values[(n - s) as usize] = v;
            }
            let f = SymmetricFn::new(n, values).unwrap();
            let g = boundary_representative(&f);
            assert!(g.value(1).is_zero());
            assert!(picard::classes_equal(
                &f.to_divisor().unwrap(),
                &g.to_divisor().unwrap()
            )
            .unwrap());
        }
    }

    #[test]
    fn divisor_recovery_shifts_by_the_quadratic() {
        // The zero divisor recovers as the zero profile.
        let zero = DivisorClass::zero(6).unwrap();
        let f = symmetric_fn_from_divisor(&zero).unwrap();
        assert!(f.values().iter().all(|v| v.is_zero()));

        // A single-size boundary class: f̃ is its profile and the result
        // is f̃ + 2·A₆.
        let d = DivisorClass::from_fn(6, |s| int((s.size() == 2 || s.size() == 4) as i64))
            .unwrap();
        let f = symmetric_fn_from_divisor(&d).unwrap();
        assert!(picard::classes_equal(&d, &f.to_divisor().unwrap()).unwrap());
        let quad = SymmetricFn::standard_quadratic(6);
        assert_eq!(f.value(2), &(int(1) + int(2) * quad.value(2)));
        assert_eq!(f.value(3), &(int(2) * quad.value(3)));

        // An F-nef symmetric divisor yields a profile with nonnegative
        // bracket on all triples, not only the types.
        let t = total_t_profile(7);
        let recovered = symmetric_fn_from_divisor(&t.to_divisor().unwrap()).unwrap();
        assert!(recovered.is_bracket_nonneg());
        assert!(picard::classes_equal(
            &t.to_divisor().unwrap(),
            &recovered.to_divisor().unwrap()
        )
        .unwrap());

        // A divisor with additive coefficients has zero class, so the
        // class-level route resolves it even though the coefficient-level
        // route cannot.
        let linear = DivisorClass::from_fn(6, |s| int(s.mask() as i64)).unwrap();
        assert!(SymmetricFn::from_divisor(&linear).is_err());
        let resolved = symmetric_fn_from_divisor(&linear).unwrap();
        assert!(resolved.values().iter().all(|v| v.is_zero()));

        // A single boundary coefficient is not a symmetric class.
        let skew = DivisorClass::from_fn(6, |s| int((s.mask() == 0b110) as i64)).unwrap();
        assert!(SymmetricFn::from_divisor(&skew).is_err());
        assert!(symmetric_fn_from_divisor(&skew).is_err());
    }

    #[test]
    fn cyclic_roundtrip() {
        let t = fnef::total_t(9).unwrap();
        let f = SymmetricFn::from_cyclic(&t).unwrap();
        assert_eq!(f.to_cyclic().unwrap().table(), t.table());
        let mut vals = vec![Rat::zero(); 7];
        vals[3] = rat(1, 2);
        let g = SymmetricFn::new(6, vals).unwrap();
        assert!(matches!(g.to_cyclic(), Err(CertError::NotIntegral)));
    }

    #[test]
    fn weight_serialization_roundtrip() {
        let f = total_t_profile(6);
        let (w, _) = certificate_for_partition(&f, &[2, 2, 2]).unwrap();
        let json = serde_json::to_string(&w).unwrap();
        let back: WeightFn = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
        assert!(json.contains('/') || !json.is_empty());
    }

    #[test]
    fn bound_on_strict_partition_arity() {
        assert_eq!(symmetric_bound(8), 44);
        assert_eq!(symmetric_bound(7), 35);
        assert_eq!(symmetric_bound(4), 14);
        for k in 2..=8 {
            let b = symmetric_bound(k);
            assert!(!groundset::has_strict_partition_over(b, k));
            assert!(groundset::has_strict_partition_over(b + 1, k));
        }
    }
}
