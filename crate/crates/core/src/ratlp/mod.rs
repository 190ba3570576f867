//! Exact rational linear programming with self-verifying certificates.
//!
//! Every answer carries its own proof: feasibility comes with a point
//! that is checked against the rows, infeasibility with row multipliers
//! satisfying the sign conditions of a separating functional, and
//! unboundedness with an explicit improving ray. The solver re-verifies
//! each certificate before returning it, so downstream callers can treat
//! the outcomes as established facts rather than floating-point guesses.

mod dd;
mod simplex;

pub use dd::{extreme_rays_nonneg_kernel, DdOptions};

use crate::rational::Rat;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rel {
    Eq,
    Ge,
    Le,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    NonNeg,
    Free,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("row has {got} coefficients, expected {want}")]
    BadRow { got: usize, want: usize },
    #[error("objective has {got} coefficients, expected {want}")]
    BadObjective { got: usize, want: usize },
    #[error("generator has {got} coordinates, expected {want}")]
    BadGenerator { got: usize, want: usize },
    #[error("certificate failed its self-check: {0}")]
    Internal(&'static str),
    #[error("ray budget of {0} exceeded")]
    RayBudget(usize),
    #[error("cone is not pointed")]
    NotPointed,
    #[error("at most 128 halfspaces are supported")]
    TooManyHalfspaces,
}

/// A finite system of exact linear rows over typed variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSystem {
    kinds: Vec<VarKind>,
    rows: Vec<(Vec<Rat>, Rel, Rat)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// A point satisfying every row and every variable bound.
    Feasible(Vec<Rat>),
    /// Row multipliers proving emptiness: nonnegative on `Ge` rows,
    /// nonpositive on `Le` rows, with the combined left side nonpositive
    /// on every nonnegative variable, zero on free ones, and a positive
    /// combined right side.
    Infeasible(Vec<Rat>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<Rat>, value: Rat },
    Infeasible { farkas: Vec<Rat> },
    Unbounded { point: Vec<Rat>, ray: Vec<Rat> },
}

impl RationalSystem {
    pub fn new(kinds: Vec<VarKind>) -> Self {
        RationalSystem { kinds, rows: Vec::new() }
    }

    pub fn push_row(&mut self, coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Result<(), LpError> {
        if coeffs.len() != self.kinds.len() {
            return Err(LpError::BadRow { got: coeffs.len(), want: self.kinds.len() });
        }
        self.rows.push((coeffs, rel, rhs));
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn rows(&self) -> &[(Vec<Rat>, Rel, Rat)] {
        &self.rows
    }

    /// Whether `x` satisfies every row and every variable bound.
    pub fn check_point(&self, x: &[Rat]) -> bool {
        if x.len() != self.kinds.len() {
            return false;
        }
        for (kind, v) in self.kinds.iter().zip(x) {
            if *kind == VarKind::NonNeg && v.is_negative() {
                return false;
            }
        }
        self.rows.iter().all(|(coeffs, rel, rhs)| {
            let lhs = dot(coeffs, x);
            match rel {
                Rel::Eq => lhs == *rhs,
                Rel::Ge => lhs >= *rhs,
                Rel::Le => lhs <= *rhs,
            }
        })
    }

    /// Whether `lam` proves the system infeasible.
    pub fn check_farkas(&self, lam: &[Rat]) -> bool {
        if lam.len() != self.rows.len() {
            return false;
        }
        for ((_, rel, _), l) in self.rows.iter().zip(lam) {
            let ok = match rel {
                Rel::Eq => true,
                Rel::Ge => !l.is_negative(),
                Rel::Le => !l.is_positive(),
            };
            if !ok {
                return false;
            }
        }
        let mut combined = vec![Rat::zero(); self.kinds.len()];
        let mut rhs = Rat::zero();
        for ((coeffs, _, b), l) in self.rows.iter().zip(lam) {
            if l.is_zero() {
                continue;
            }
            for (c, v) in combined.iter_mut().zip(coeffs) {
                *c += l * v;
            }
            rhs += l * b;
        }
        if !rhs.is_positive() {
            return false;
        }
        combined.iter().zip(&self.kinds).all(|(c, kind)| match kind {
            VarKind::NonNeg => !c.is_positive(),
            VarKind::Free => c.is_zero(),
        })
    }

    /// Whether `ray` is a recession direction along which `obj` decreases.
    pub fn check_improving_ray(&self, obj: &[Rat], ray: &[Rat]) -> bool {
        if ray.len() != self.kinds.len() || !dot(obj, ray).is_negative() {
            return false;
        }
        for (kind, v) in self.kinds.iter().zip(ray) {
            if *kind == VarKind::NonNeg && v.is_negative() {
                return false;
            }
        }
        self.rows.iter().all(|(coeffs, rel, _)| {
            let lhs = dot(coeffs, ray);
            match rel {
                Rel::Eq => lhs.is_zero(),
                Rel::Ge => !lhs.is_negative(),
                Rel::Le => !lhs.is_positive(),
            }
        })
    }

    /// Decides feasibility, returning a verified certificate either way.
    pub fn feasible(&self) -> Result<Feasibility, LpError> {
        let std_form = simplex::Standardized::build(&self.kinds, &self.rows);
        match simplex::Tableau::phase1(&std_form) {
            simplex::Phase1::Infeasible(farkas) => {
                if !self.check_farkas(&farkas) {
                    return Err(LpError::Internal("infeasibility multipliers"));
                }
                Ok(Feasibility::Infeasible(farkas))
            }
            simplex::Phase1::Feasible(t) => {
                let point = std_form.original_point(&t.solution());
                if !self.check_point(&point) {
                    return Err(LpError::Internal("feasible point"));
                }
                Ok(Feasibility::Feasible(point))
            }
        }
    }

    /// Minimizes `obj` over the system, returning a verified outcome.
    pub fn minimize(&self, obj: &[Rat]) -> Result<LpOutcome, LpError> {
        if obj.len() != self.kinds.len() {
            return Err(LpError::BadObjective { got: obj.len(), want: self.kinds.len() });
        }
        let std_form = simplex::Standardized::build(&self.kinds, &self.rows);
        let mut t = match simplex::Tableau::phase1(&std_form) {
            simplex::Phase1::Infeasible(farkas) => {
                if !self.check_farkas(&farkas) {
                    return Err(LpError::Internal("infeasibility multipliers"));
                }
                return Ok(LpOutcome::Infeasible { farkas });
            }
            simplex::Phase1::Feasible(t) => t,
        };
        let mut c_std = vec![Rat::zero(); std_form.n_cols];
        for (j, c) in obj.iter().enumerate() {
            let (pos, neg) = std_form.var_cols[j];
            c_std[pos] = c.clone();
            if let Some(neg) = neg {
                c_std[neg] = -c.clone();
            }
        }
        match t.phase2(&c_std) {
            simplex::Phase2::Optimal => {
                let point = std_form.original_point(&t.solution());
                let value = dot(obj, &point);
                if !self.check_point(&point) || value != *t.objective() {
                    return Err(LpError::Internal("optimal point"));
                }
                Ok(LpOutcome::Optimal { point, value })
            }
            simplex::Phase2::Unbounded(enter) => {
                let point = std_form.original_point(&t.solution());
                let ray = std_form.original_point(&t.ray(enter));
                if !self.check_point(&point) || !self.check_improving_ray(obj, &ray) {
                    return Err(LpError::Internal("unbounded ray"));
                }
                Ok(LpOutcome::Unbounded { point, ray })
            }
        }
    }

    /// Maximizes `obj`; certificates are reported for the maximization.
    pub fn maximize(&self, obj: &[Rat]) -> Result<LpOutcome, LpError> {
        let neg: Vec<Rat> = obj.iter().map(|c| -c.clone()).collect();
        Ok(match self.minimize(&neg)? {
            LpOutcome::Optimal { point, value } => LpOutcome::Optimal { point, value: -value },
            other => other,
        })
    }
}

pub(crate) fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    let mut total = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            total += x * y;
        }
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeMembership {
    /// Nonnegative combination coefficients expressing the target.
    Member(Vec<Rat>),
    /// A functional nonnegative on every generator and negative on the
    /// target.
    Separated(Vec<Rat>),
}

/// Decides whether `target` lies in the cone spanned by `gens`, with a
/// verified certificate either way.
pub fn cone_member(gens: &[Vec<Rat>], target: &[Rat]) -> Result<ConeMembership, LpError> {
    let dim = target.len();
    for g in gens {
        if g.len() != dim {
            return Err(LpError::BadGenerator { got: g.len(), want: dim });
        }
    }
    let mut sys = RationalSystem::new(vec![VarKind::NonNeg; gens.len()]);
    for d in 0..dim {
        let coeffs = gens.iter().map(|g| g[d].clone()).collect();
        sys.push_row(coeffs, Rel::Eq, target[d].clone())?;
    }
    match sys.feasible()? {
        Feasibility::Feasible(t) => Ok(ConeMembership::Member(t)),
        Feasibility::Infeasible(lam) => {
            let y: Vec<Rat> = lam.iter().map(|l| -l.clone()).collect();
            let ok = gens.iter().all(|g| !dot(&y, g).is_negative())
                && dot(&y, target).is_negative();
            if !ok {
                return Err(LpError::Internal("separating functional"));
            }
            Ok(ConeMembership::Separated(y))
        }
    }
}

/// Rank of a rational matrix reduced modulo the prime `p`. The modular
/// rank never exceeds the true rank, so matching an expected full rank
/// is a one-sided certificate of spanning. Fails if any denominator is
/// divisible by `p`.
pub fn rank_mod_p(rows: &[Vec<Rat>], p: u64) -> Result<usize, LpError> {
    use num::bigint::BigInt;
    use num::{Integer, ToPrimitive};
    let n_cols = rows.first().map_or(0, |r| r.len());
    let big_p = BigInt::from(p);
    let reduce = |x: &num::BigInt| -> Option<u64> { x.mod_floor(&big_p).to_u64() };
    let mulmod = |a: u64, b: u64| -> u64 { ((a as u128 * b as u128) % p as u128) as u64 };
    let powmod = |mut base: u64, mut exp: u64| -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    let mut mat: Vec<Vec<u64>> = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != n_cols {
            return Err(LpError::BadRow { got: row.len(), want: n_cols });
        }
        let mut out = Vec::with_capacity(n_cols);
        for v in row {
            let num = reduce(v.numer()).ok_or(LpError::Internal("residue overflow"))?;
            let den = reduce(v.denom()).ok_or(LpError::Internal("residue overflow"))?;
            if den == 0 {
                return Err(LpError::Internal("denominator divisible by modulus"));
            }
            out.push(mulmod(num, powmod(den, p - 2)));
        }
        mat.push(out);
    }
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pivot) = (rank..mat.len()).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(rank, pivot);
        let inv = powmod(mat[rank][col], p - 2);
        for r in 0..mat.len() {
            if r != rank && mat[r][col] != 0 {
                let factor = mulmod(mat[r][col], inv);
                for c in col..n_cols {
                    let sub = mulmod(factor, mat[rank][c]);
                    mat[r][c] = (mat[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == mat.len() {
            break;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn sys(kinds: Vec<VarKind>, rows: Vec<(Vec<Rat>, Rel, Rat)>) -> RationalSystem {
        let mut s = RationalSystem::new(kinds);
        for (c, rel, b) in rows {
            s.push_row(c, rel, b).unwrap();
        }
        s
    }

    #[test]
    fn feasibility_depends_on_variable_kinds() {
        let rows = vec![
            (vec![int(1), int(1)], Rel::Eq, int(2)),
            (vec![int(1), int(-1)], Rel::Ge, int(3)),
        ];
        // Solution needs y = -1/2 < 0.
        let s = sys(vec![VarKind::NonNeg; 2], rows.clone());
        match s.feasible().unwrap() {
            Feasibility::Infeasible(lam) => assert!(s.check_farkas(&lam)),
            other => panic!("expected infeasible, got {other:?}"),
        }
        let s = sys(vec![VarKind::Free; 2], rows);
        match s.feasible().unwrap() {
            Feasibility::Feasible(x) => {
                assert!(s.check_point(&x));
                assert_eq!(&x[0] + &x[1], int(2));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn optimization_outcomes() {
        let s = sys(
            vec![VarKind::NonNeg; 2],
            vec![(vec![int(1), int(2)], Rel::Ge, int(3))],
        );
        match s.minimize(&[int(1), int(1)]).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(3, 2));
                assert!(s.check_point(&point));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
        match s.maximize(&[int(1), int(1)]).unwrap() {
            LpOutcome::Unbounded { point, ray } => {
                assert!(s.check_point(&point));
                assert!(s.check_improving_ray(&[int(-1), int(-1)], &ray));
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_are_harmless() {
        let s = sys(
            vec![VarKind::NonNeg; 2],
            vec![
                (vec![int(1), int(1)], Rel::Eq, int(1)),
                (vec![int(2), int(2)], Rel::Eq, int(2)),
                (vec![int(1), int(1)], Rel::Eq, int(1)),
            ],
        );
        match s.feasible().unwrap() {
            Feasibility::Feasible(x) => assert!(s.check_point(&x)),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn zero_variable_systems() {
        let s = sys(vec![], vec![(vec![], Rel::Ge, int(-1)), (vec![], Rel::Eq, int(0))]);
        assert!(matches!(s.feasible().unwrap(), Feasibility::Feasible(_)));
        let s = sys(vec![], vec![(vec![], Rel::Eq, int(2))]);
        match s.feasible().unwrap() {
            Feasibility::Infeasible(lam) => assert!(s.check_farkas(&lam)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn mixed_relations_and_free_variables() {
        // x free, y >= 0: x + y <= 1, x - y >= 4 forces y <= -3/2.
        let s = sys(
            vec![VarKind::Free, VarKind::NonNeg],
            vec![
                (vec![int(1), int(1)], Rel::Le, int(1)),
                (vec![int(1), int(-1)], Rel::Ge, int(4)),
            ],
        );
        match s.feasible().unwrap() {
            Feasibility::Infeasible(lam) => assert!(s.check_farkas(&lam)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn cone_membership_examples() {
        let gens = vec![vec![int(1), int(0)], vec![int(1), int(1)]];
        match cone_member(&gens, &[int(3), int(1)]).unwrap() {
            ConeMembership::Member(t) => {
                assert_eq!(&t[0] + &t[1], int(3));
                assert_eq!(t[1], int(1));
            }
            other => panic!("expected member, got {other:?}"),
        }
        match cone_member(&gens, &[int(0), int(1)]).unwrap() {
            ConeMembership::Separated(y) => {
                assert!(dot(&y, &[int(0), int(1)]).is_negative());
                for g in &gens {
                    assert!(!dot(&y, g).is_negative());
                }
            }
            other => panic!("expected separated, got {other:?}"),
        }
        // The zero cone contains exactly the zero vector.
        assert!(matches!(
            cone_member(&[], &[int(0), int(0)]).unwrap(),
            ConeMembership::Member(_)
        ));
        assert!(matches!(
            cone_member(&[], &[int(1), int(0)]).unwrap(),
            ConeMembership::Separated(_)
        ));
    }

    #[test]
    fn modular_rank_matches_exact_rank() {
        const P: u64 = (1 << 61) - 1;
        let rows = vec![
            vec![int(1), int(2), int(3)],
            vec![int(2), int(4), int(6)],
            vec![rat(1, 2), int(0), int(-1)],
        ];
        assert_eq!(rank_mod_p(&rows, P).unwrap(), 2);
        let id = vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), rat(3, 7), int(0)],
            vec![int(0), int(0), int(-5)],
        ];
        assert_eq!(rank_mod_p(&id, P).unwrap(), 3);
        assert_eq!(rank_mod_p(&[vec![int(0), int(0)]], P).unwrap(), 0);
        assert_eq!(rank_mod_p(&[], P).unwrap(), 0);
    }
}
