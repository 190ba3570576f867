//! The cone of effective pairwise balanced designs.
//!
//! A multiplicity vector over the proper subsets is *balanced* when every
//! pair of ground elements is covered with the same total weight.  This
//! module answers two questions about that cone:
//!
//! * does a given support set carry a nonzero effective balanced design
//!   (with a feasibility witness or infeasibility multipliers either way),
//! * and what are the extremal rays of the cone, listed up to the action
//!   of the symmetric group on the ground set.

use std::collections::HashSet;

use num::{Signed, Zero};

use crate::curves::Pbd;
use crate::ratlp::{self, DdOptions, Feasibility, RationalSystem, Rel, VarKind};
use crate::rational::{int, Rat};

use super::{bit_indices, StrongFCtx, StrongFError, SupportSet};

/// Certificate returned by [`supports_effective_pbd`].
#[derive(Clone, Debug)]
pub enum SupportCert {
    /// Multiplicities of a nonzero effective balanced design supported
    /// inside the queried set, indexed by proper-subset position and
    /// normalized to total mass one.
    Witness(Vec<Rat>),
    /// Multipliers over the balance rows (pair `q` against pair `0`, for
    /// `q = 1..`) followed by the normalization row, proving that no such
    /// design exists.
    Farkas(Vec<Rat>),
}

impl SupportCert {
    /// True when the certificate is a feasibility witness.
    pub fn is_witness(&self) -> bool {
        matches!(self, SupportCert::Witness(_))
    }
}

/// Checks that `mult` is a nonzero effective balanced design supported
/// inside `j`: entrywise nonnegative, zero outside `j`, equal coverage on
/// every pair, and positive total mass.
pub fn verify_support_witness(ctx: &StrongFCtx, j: &SupportSet, mult: &[Rat]) -> bool {
    if mult.len() != ctx.rho() {
        return false;
    }
    let mut total = Rat::zero();
    let mut cover = vec![Rat::zero(); ctx.n_pairs()];
    for (p, m) in mult.iter().enumerate() {
        if m.is_negative() {
            return false;
        }
        if m.is_zero() {
            continue;
        }
        if !j.contains(p) {
            return false;
        }
        total += m;
        let pm = ctx.pair_masks()[p];
        for q in bit_indices(pm as u128) {
            cover[q] += m;
        }
    }
    if !total.is_positive() {
        return false;
    }
    cover.iter().all(|c| *c == cover[0])
}

/// Decides whether the support set `j` carries a nonzero effective
/// balanced design, returning a self-verified certificate either way.
///
/// The feasibility system keeps one nonnegative variable per member of
/// `j`, one balance row per ground pair beyond the first, and a
/// normalization row fixing the total mass to one (the cone is scale
/// invariant, so this loses no generality).
pub fn supports_effective_pbd(
    ctx: &StrongFCtx,
    j: &SupportSet,
) -> Result<SupportCert, StrongFError> {
    if j.n() != ctx.n() {
        return Err(StrongFError::MixedN(j.n(), ctx.n()));
    }
    let n_rows = ctx.n_pairs(); // n_pairs - 1 balance rows plus normalization
    let cols = bit_indices(j.bits());
    if cols.is_empty() {
        // No variables: the normalization row `0 = 1` refutes feasibility
        // on its own, so the multiplier vector is deterministic.
        let mut lam = vec![Rat::zero(); n_rows];
        lam[n_rows - 1] = int(1);
        return Ok(SupportCert::Farkas(lam));
    }
    let mut sys = RationalSystem::new(vec![VarKind::NonNeg; cols.len()]);
    for q in 1..ctx.n_pairs() {
        let coeffs = cols
            .iter()
            .map(|&p| {
                let pm = ctx.pair_masks()[p];
                int(((pm >> q) & 1) as i64 - (pm & 1) as i64)
            })
            .collect();
        sys.push_row(coeffs, Rel::Eq, Rat::zero())?;
    }
    sys.push_row(vec![int(1); cols.len()], Rel::Eq, int(1))?;
    match sys.feasible()? {
        Feasibility::Feasible(x) => {
            let mut mult = vec![Rat::zero(); ctx.rho()];
            for (k, &p) in cols.iter().enumerate() {
                mult[p] = x[k].clone();
            }
            if !verify_support_witness(ctx, j, &mult) {
                return Err(StrongFError::Internal("support witness failed verification"));
            }
            Ok(SupportCert::Witness(mult))
        }
        Feasibility::Infeasible(lam) => Ok(SupportCert::Farkas(lam)),
    }
}

/// Extremal rays of the effective balanced-design cone for ground size
/// `n`, one representative per orbit of the symmetric group, each scaled
/// to a primitive integer multiplicity vector.
///
/// The design index is not constant on an orbit: the group action is by
/// two-part partitions, so a permutation can trade small blocks for their
/// complements and change every pair coverage.  Each representative is
/// therefore chosen to minimize the index within its orbit (ties broken
/// lexicographically), which matches the usual tabulated normal forms,
/// and the list is returned in deterministic order (by index, then by
/// the block vector).  Enumeration is a double-description run over the
/// balance kernel intersected with the nonnegative orthant; `n >= 8` is
/// rejected up front because the ray count there is out of reach of a
/// desk machine, and `opts.max_rays` bounds intermediate blow-up for the
/// sizes that remain.
pub fn pbd_extremal_rays(n: usize, opts: &DdOptions) -> Result<Vec<Pbd>, StrongFError> {
    if n >= 8 {
        return Err(StrongFError::BudgetExceeded(
            "extremal-ray enumeration is limited to n <= 7",
        ));
    }
    let ctx = StrongFCtx::new(n)?;
    let rho = ctx.rho();
    let eqs: Vec<Vec<Rat>> = (1..ctx.n_pairs())
        .map(|q| {
            (0..rho)
                .map(|p| {
                    let pm = ctx.pair_masks()[p];
                    int(((pm >> q) & 1) as i64 - (pm & 1) as i64)
                })
                .collect()
        })
        .collect();
    let rays = ratlp::extreme_rays_nonneg_kernel(rho, &eqs, opts)?;

    // Deduplicate orbits by the lexicographically least permuted copy,
    // but keep the minimal-index image as the representative.  The
    // entries of a primitive ray are tiny, so the orbit scan runs on
    // i64 images; the image of a balanced vector is balanced, so its
    // index is its coverage of the first pair.
    let perms = ctx.perms();
    let index_of = |v: &[i64]| -> i64 {
        (0..rho).filter(|&p| ctx.pair_masks()[p] & 1 == 1).map(|p| v[p]).sum()
    };
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut reps: Vec<Vec<i64>> = Vec::new();
    for ray in &rays {
        let vals: Vec<i64> = ray
            .iter()
            .map(|v| crate::rational::as_i64(v).ok_or(StrongFError::Internal("ray entry overflow")))
            .collect::<Result<_, _>>()?;
        let mut key = vals.clone();
        let mut rep = vals.clone();
        let mut rep_index = index_of(&vals);
        let mut image = vec![0i64; rho];
        for g in 0..perms.n_perms() {
            for p in 0..rho {
                image[perms.image_of(g, p)] = vals[p];
            }
            if image < key {
                key.copy_from_slice(&image);
            }
            let idx = index_of(&image);
            if idx < rep_index || (idx == rep_index && image < rep) {
                rep.copy_from_slice(&image);
                rep_index = idx;
            }
        }
        if seen.insert(key) {
            reps.push(rep);
        }
    }

    let mut out = Vec::with_capacity(reps.len());
    for rep in reps {
        let blocks: Vec<(u32, Rat)> = rep
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(p, &v)| (ctx.sigma().proper()[p].mask(), int(v)))
            .collect();
        out.push(Pbd::from_masks(n, blocks)?);
    }
    out.sort_by(|a, b| {
        (a.index(), a.blocks()).cmp(&(b.index(), b.blocks()))
    });
    Ok(out)
}

/// All index values the design realizes across its orbit, sorted.
///
/// Relabelings act on two-part partitions, so they can exchange a block
/// for its complement and change the index; the set of attainable values
/// is the orbit invariant that the tabulated index ranges refer to.
pub fn ray_index_values(n: usize, ray: &Pbd) -> Result<Vec<i64>, StrongFError> {
    let ctx = StrongFCtx::new(n)?;
    let rho = ctx.rho();
    let perms = ctx.perms();
    let mut vals = vec![0i64; rho];
    for (mask, m) in ray.blocks() {
        let p = ctx
            .sigma()
            .proper_index_of_mask(*mask)
            .ok_or(StrongFError::Internal("ray block outside the proper range"))?;
        vals[p] = crate::rational::as_i64(m).ok_or(StrongFError::Internal("ray entry overflow"))?;
    }
    let mut indices = std::collections::BTreeSet::new();
    let mut image = vec![0i64; rho];
    for g in 0..perms.n_perms() {
        for p in 0..rho {
            image[perms.image_of(g, p)] = vals[p];
        }
        indices.insert(
            (0..rho).filter(|&p| ctx.pair_masks()[p] & 1 == 1).map(|p| image[p]).sum::<i64>(),
        );
    }
    Ok(indices.into_iter().collect())
}
