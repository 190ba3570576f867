//! Criticality of a support set.
//!
//! A support set `J` is *critical* when some nonzero point of the F-curve
//! cone pairs nonpositively with every boundary coordinate outside `J`.
//! Scale invariance lets us normalize the curve coefficients to total
//! mass one, so the question is a rational feasibility problem over
//! convex combinations of F-curve classes, and both answers carry exact
//! certificates: a combination for "critical", Farkas multipliers for
//! "not critical".
//!
//! The number of F-curves grows fast (1701 at `n = 8`), while deep in the
//! support lattice only a handful of boundary coordinates sit outside
//! `J`.  The solver therefore generates columns: it keeps a small active
//! set of curves, solves the master problem restricted to the rows those
//! curves can actually violate, and prices the remaining curves against
//! the master multipliers with integer arithmetic, growing the active set
//! only when pricing finds a violated column.

use num::{Integer, Signed, Zero};

use crate::ratlp::{Feasibility, RationalSystem, Rel, VarKind};
use crate::rational::{as_i64, int, Rat};

use super::{bit_indices, StrongFCtx, StrongFError, SupportSet};

/// Certificate returned by [`is_critical`].
#[derive(Clone, Debug)]
pub enum CriticalCert {
    /// Convex coefficients over F-curves (indexed into the context curve
    /// list, summing to one) whose combined class pairs nonpositively
    /// with every proper coordinate outside the set.
    Critical { combo: Vec<(usize, Rat)> },
    /// Farkas multipliers proving no such combination exists:
    /// `lam_eq` (positive) on the normalization row and `lam` (each
    /// nonpositive, keyed by proper coordinate outside the set) on the
    /// pairing rows, with every curve priced nonpositively.
    NotCritical { lam_eq: Rat, lam: Vec<(usize, Rat)> },
}

impl CriticalCert {
    /// True when the certificate exhibits a critical combination.
    pub fn is_critical(&self) -> bool {
        matches!(self, CriticalCert::Critical { .. })
    }
}

/// Positive-pairing coordinates of a convex combination of curves: the
/// set of proper coordinates where the combined class pairs positively.
/// A set containing none of these bits stays critical with the same
/// witness, which is how the search inherits certificates downward.
pub(crate) fn combo_pos_mask(ctx: &StrongFCtx, combo: &[(usize, Rat)]) -> u128 {
    let rho = ctx.rho();
    let mut vals = vec![Rat::zero(); rho];
    for (a, t) in combo {
        if t.is_zero() {
            continue;
        }
        for (p, v) in ctx.delta_row(*a).iter().enumerate() {
            if *v != 0 {
                vals[p] += t.clone() * int(*v);
            }
        }
    }
    let mut mask = 0u128;
    for (p, v) in vals.iter().enumerate() {
        if v.is_positive() {
            mask |= 1 << p;
        }
    }
    mask
}

/// Verifies a critical combination against every coordinate outside `j`:
/// coefficients nonnegative and summing to one, combined pairings
/// nonpositive outside.
pub fn verify_critical_witness(ctx: &StrongFCtx, j: &SupportSet, combo: &[(usize, Rat)]) -> bool {
    let mut total = Rat::zero();
    for (a, t) in combo {
        if *a >= ctx.curves().len() || t.is_negative() {
            return false;
        }
        total += t;
    }
    if total != int(1) {
        return false;
    }
    combo_pos_mask(ctx, combo) & !j.bits() & ctx.full_mask() == 0
}

/// Scales a rational vector to integers over a common denominator,
/// returning `None` when any scaled entry falls outside a comfortable
/// `i64` range for overflow-free pricing.
fn scale_to_i64(vals: &[Rat]) -> Option<Vec<i64>> {
    let mut denom = num::BigInt::from(1);
    for v in vals {
        denom = denom.lcm(v.denom());
    }
    let limit = num::BigInt::from(i64::MAX / 1024);
    let mut out = Vec::with_capacity(vals.len());
    for v in vals {
        let scaled = v.numer() * (&denom / v.denom());
        if scaled.magnitude() > limit.magnitude() {
            return None;
        }
        out.push(as_i64(&Rat::from(scaled))?);
    }
    Some(out)
}

/// Decides whether `j` is critical, returning a self-verified
/// certificate either way.
pub fn is_critical(ctx: &StrongFCtx, j: &SupportSet) -> Result<CriticalCert, StrongFError> {
    if j.n() != ctx.n() {
        return Err(StrongFError::MixedN(j.n(), ctx.n()));
    }
    let outside = ctx.full_mask() & !j.bits();
    let n_curves = ctx.curves().len();

    // A single curve whose positive pairings all land inside `j` settles
    // the question without a solve; the shallow part of the lattice is
    // almost always dispatched here.
    for a in 0..n_curves {
        if ctx.pos_mask(a) & outside == 0 {
            return Ok(CriticalCert::Critical { combo: vec![(a, int(1))] });
        }
    }

    // Column generation.  Seed the active set with the curves that
    // violate the fewest outside coordinates.
    const SEED: usize = 12;
    const ADD: usize = 8;
    let mut order: Vec<usize> = (0..n_curves).collect();
    order.sort_by_key(|&a| (ctx.pos_mask(a) & outside).count_ones());
    let mut active: Vec<usize> = order[..SEED.min(n_curves)].to_vec();
    let mut in_active = vec![false; n_curves];
    for &a in &active {
        in_active[a] = true;
    }

    loop {
        // Rows where some active curve pairs positively; on every other
        // outside row the active columns are all nonpositive, so those
        // rows hold automatically for any convex combination.
        let mut row_mask = 0u128;
        for &a in &active {
            row_mask |= ctx.pos_mask(a) & outside;
        }
        let rows = bit_indices(row_mask);

        let mut sys = RationalSystem::new(vec![VarKind::NonNeg; active.len()]);
        sys.push_row(vec![int(1); active.len()], Rel::Eq, int(1))?;
        for &p in &rows {
            let coeffs = active.iter().map(|&a| int(ctx.delta_row(a)[p])).collect();
            sys.push_row(coeffs, Rel::Le, Rat::zero())?;
        }
        match sys.feasible()? {
            Feasibility::Feasible(t) => {
                let combo: Vec<(usize, Rat)> = active
                    .iter()
                    .zip(t)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&a, c)| (a, c))
                    .collect();
                if !verify_critical_witness(ctx, j, &combo) {
                    return Err(StrongFError::Internal("critical witness failed verification"));
                }
                return Ok(CriticalCert::Critical { combo });
            }
            Feasibility::Infeasible(lam) => {
                // lam[0] pairs with the normalization row, lam[1 + k]
                // with rows[k].  Price every curve: the reduced cost
                // lam_eq + sum_p lam_p * delta[a][p] must be nonpositive
                // for the restricted multipliers to refute the full
                // problem.
                let violated = price_all(ctx, &lam, &rows, &in_active);
                if violated.is_empty() {
                    let lam_sparse: Vec<(usize, Rat)> = rows
                        .iter()
                        .zip(&lam[1..])
                        .filter(|(_, l)| !l.is_zero())
                        .map(|(&p, l)| (p, l.clone()))
                        .collect();
                    return Ok(CriticalCert::NotCritical { lam_eq: lam[0].clone(), lam: lam_sparse });
                }
                for a in violated.into_iter().take(ADD) {
                    active.push(a);
                    in_active[a] = true;
                }
            }
        }
    }
}

/// Prices every inactive curve against master multipliers, returning the
/// violating curves in decreasing order of violation.
fn price_all(ctx: &StrongFCtx, lam: &[Rat], rows: &[usize], in_active: &[bool]) -> Vec<usize> {
    let n_curves = ctx.curves().len();
    let mut violated: Vec<(Rat, usize)> = Vec::new();

    if let Some(ints) = scale_to_i64(lam) {
        // Scaling by a positive denominator preserves reduced-cost signs,
        // so pricing can run entirely in machine integers; each term is
        // bounded by (i64::MAX / 1024) * |delta| and the row count by the
        // coordinate count, far inside i128 range.
        let eq = ints[0] as i128;
        for a in 0..n_curves {
            if in_active[a] {
                continue;
            }
            let row = ctx.delta_row(a);
            let mut s = eq;
            for (k, &p) in rows.iter().enumerate() {
                s += ints[1 + k] as i128 * row[p] as i128;
            }
            if s > 0 {
                violated.push((Rat::from(num::BigInt::from(s)), a));
            }
        }
    } else {
        for a in 0..n_curves {
            if in_active[a] {
                continue;
            }
            let mut s = lam[0].clone();
            let row = ctx.delta_row(a);
            for (k, &p) in rows.iter().enumerate() {
                if row[p] != 0 && !lam[1 + k].is_zero() {
                    s += lam[1 + k].clone() * int(row[p]);
                }
            }
            if s.is_positive() {
                violated.push((s, a));
            }
        }
    }
    violated.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    violated.into_iter().map(|(_, a)| a).collect()
}

/// Criticality with an eye toward reuse inside the search: returns the
/// certificate together with the positive-pairing mask of a critical
/// witness (when critical), which descendants test against for
/// inheritance.
pub(crate) fn is_critical_with_mask(
    ctx: &StrongFCtx,
    j: &SupportSet,
) -> Result<(CriticalCert, u128), StrongFError> {
    let cert = is_critical(ctx, j)?;
    let mask = match &cert {
        CriticalCert::Critical { combo } => combo_pos_mask(ctx, combo),
        CriticalCert::NotCritical { .. } => 0,
    };
    Ok((cert, mask))
}
