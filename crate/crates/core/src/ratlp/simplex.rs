//! Two-phase primal simplex over exact rationals with Bland's rule.
//!
//! The public entry points live in the parent module; this file owns the
//! standard-form conversion and the tableau. Bland's smallest-index rule
//! makes every run terminate, and exact arithmetic makes the outcomes
//! certificates rather than estimates: an infeasible phase one hands back
//! the multipliers that prove infeasibility, an unbounded phase two hands
//! back the improving ray.

use super::{Rel, VarKind};
use crate::rational::Rat;
use num::{One, Signed, Zero};

/// A system rewritten over nonnegative columns with equality rows and a
/// nonnegative right-hand side, remembering how to translate points and
/// row multipliers back to the caller's original variables and rows.
pub(crate) struct Standardized {
    pub n_cols: usize,
    /// Original variable -> (column, negated column when the variable is free).
    pub var_cols: Vec<(usize, Option<usize>)>,
    /// Net sign applied to each original row on its way to equality form.
    pub row_sign: Vec<Rat>,
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
}

impl Standardized {
    pub fn build(kinds: &[VarKind], rows: &[(Vec<Rat>, Rel, Rat)]) -> Standardized {
        let mut var_cols = Vec::with_capacity(kinds.len());
        let mut n_cols = 0;
        for kind in kinds {
            match kind {
                VarKind::NonNeg => {
                    var_cols.push((n_cols, None));
                    n_cols += 1;
                }
                VarKind::Free => {
                    var_cols.push((n_cols, Some(n_cols + 1)));
                    n_cols += 2;
                }
            }
        }
        let n_slacks = rows.iter().filter(|(_, rel, _)| *rel != Rel::Eq).count();
        let mut slack_next = n_cols;
        n_cols += n_slacks;

        let mut a = Vec::with_capacity(rows.len());
        let mut b = Vec::with_capacity(rows.len());
        let mut row_sign = Vec::with_capacity(rows.len());
        for (coeffs, rel, rhs) in rows {
            // Le rows become Ge rows by negation; Ge rows get a surplus
            // column; rows with a negative right side are negated whole.
            let le_sign = if *rel == Rel::Le { -Rat::one() } else { Rat::one() };
            let mut row = vec![Rat::zero(); n_cols];
            for (j, v) in coeffs.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let signed = v * &le_sign;
                let (pos, neg) = var_cols[j];
                row[pos] = signed.clone();
                if let Some(neg) = neg {
                    row[neg] = -signed;
                }
            }
            if *rel != Rel::Eq {
                row[slack_next] = -Rat::one();
                slack_next += 1;
            }
            let mut rhs = rhs * &le_sign;
            let mut sign = le_sign;
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -std::mem::take(v);
                }
                rhs = -rhs;
                sign = -sign;
            }
            a.push(row);
            b.push(rhs);
            row_sign.push(sign);
        }
        Standardized { n_cols, var_cols, row_sign, a, b }
    }

    /// Translates a standardized point back to the original variables.
    pub fn original_point(&self, x_std: &[Rat]) -> Vec<Rat> {
        self.var_cols
            .iter()
            .map(|(pos, neg)| match neg {
                None => x_std[*pos].clone(),
                Some(neg) => &x_std[*pos] - &x_std[*neg],
            })
            .collect()
    }
}

pub(crate) enum Phase1 {
    Feasible(Tableau),
    /// Multipliers per original row proving infeasibility.
    Infeasible(Vec<Rat>),
}

pub(crate) enum Phase2 {
    Optimal,
    /// Entering column with no blocking row.
    Unbounded(usize),
}

pub(crate) struct Tableau {
    /// Rows of the constraint matrix, artificial columns included.
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    /// Reduced-cost row over all columns.
    z: Vec<Rat>,
    obj: Rat,
    basis: Vec<usize>,
    /// Real (non-artificial) column count.
    n_real: usize,
}

impl Tableau {
    /// Runs phase one on a standardized system.
    pub fn phase1(std_form: &Standardized) -> Phase1 {
        let m = std_form.a.len();
        let n_real = std_form.n_cols;
        let mut a = Vec::with_capacity(m);
        for (i, row) in std_form.a.iter().enumerate() {
            let mut full = row.clone();
            full.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
            a.push(full);
        }
        let b = std_form.b.clone();
        let basis: Vec<usize> = (0..m).map(|i| n_real + i).collect();
        // Phase-one costs are 1 on artificials; reducing by the basic rows
        // leaves z_j = -sum_i a_ij on real columns and value sum(b).
        let mut z = vec![Rat::zero(); n_real + m];
        let mut obj = Rat::zero();
        for (row, rhs) in a.iter().zip(&b) {
            for (j, v) in row.iter().take(n_real).enumerate() {
                z[j] -= v;
            }
            obj += rhs;
        }
        let mut t = Tableau { a, b, z, obj, basis, n_real };
        t.bland_min();
        if t.obj.is_positive() {
            // Duals: y_i = 1 - reduced cost of the i-th artificial column.
            let y: Vec<Rat> = (0..m).map(|i| Rat::one() - &t.z[n_real + i]).collect();
            let farkas = std_form
                .row_sign
                .iter()
                .zip(&y)
                .map(|(s, y)| s * y)
                .collect();
            return Phase1::Infeasible(farkas);
        }
        t.evict_artificials();
        Phase1::Feasible(t)
    }

    /// Replaces the objective with `c` over real columns and reoptimizes.
    pub fn phase2(&mut self, c_std: &[Rat]) -> Phase2 {
        debug_assert_eq!(c_std.len(), self.n_real);
        self.z = c_std.to_vec();
        self.obj = Rat::zero();
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = c_std[bj].clone();
            if cb.is_zero() {
                continue;
            }
            self.obj += &cb * &self.b[i];
            for (zj, aj) in self.z.iter_mut().zip(&self.a[i]) {
                *zj -= &cb * aj;
            }
        }
        match self.bland_min_real() {
            Some(col) => Phase2::Unbounded(col),
            None => Phase2::Optimal,
        }
    }

    pub fn objective(&self) -> &Rat {
        &self.obj
    }

    /// Basic solution over the real columns.
    pub fn solution(&self) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); self.n_real];
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.n_real {
                x[bj] = self.b[i].clone();
            }
        }
        x
    }

    /// The improving ray for an unbounded entering column.
    pub fn ray(&self, enter: usize) -> Vec<Rat> {
        let mut d = vec![Rat::zero(); self.n_real];
        d[enter] = Rat::one();
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.n_real {
                d[bj] = -self.a[i][enter].clone();
            }
        }
        d
    }

    fn n_cols(&self) -> usize {
        self.z.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let mut pivot_row = std::mem::take(&mut self.a[row]);
        let pivot = pivot_row[col].clone();
        for v in pivot_row.iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        self.b[row] /= &pivot;
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let factor = self.a[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, p) in self.a[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.b[i] = &self.b[i] - &factor * &self.b[row];
        }
        let factor = self.z[col].clone();
        if !factor.is_zero() {
            for (v, p) in self.z.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.obj += &factor * &self.b[row];
        }
        self.a[row] = pivot_row;
        self.basis[row] = col;
    }

    /// Bland's rule over every column; artificial columns participate in
    /// phase one. Phase one can never be unbounded (costs are nonnegative).
    fn bland_min(&mut self) {
        loop {
            let Some(enter) = (0..self.n_cols()).find(|&j| self.z[j].is_negative()) else {
                return;
            };
            let Some(row) = self.blocking_row(enter) else {
                unreachable!("phase one objective is bounded below by zero");
            };
            self.pivot(row, enter);
        }
    }

    /// Bland's rule restricted to real columns; returns an unbounded
    /// entering column if one appears.
    fn bland_min_real(&mut self) -> Option<usize> {
        loop {
            let Some(enter) = (0..self.n_real).find(|&j| self.z[j].is_negative()) else {
                return None;
            };
            let Some(row) = self.blocking_row(enter) else {
                return Some(enter);
            };
            self.pivot(row, enter);
        }
    }

    fn blocking_row(&self, enter: usize) -> Option<usize> {
        let mut best: Option<(usize, Rat)> = None;
        for i in 0..self.a.len() {
            if !self.a[i][enter].is_positive() {
                continue;
            }
            let ratio = &self.b[i] / &self.a[i][enter];
            let better = match &best {
                None => true,
                Some((row, r)) => {
                    ratio < *r || (ratio == *r && self.basis[i] < self.basis[*row])
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    /// After a zero-cost phase one, pivots basic artificials out on any
    /// real column, deleting rows that turn out redundant, then drops the
    /// artificial columns entirely.
    fn evict_artificials(&mut self) {
        let mut drop_rows = Vec::new();
        for i in 0..self.a.len() {
            if self.basis[i] < self.n_real {
                continue;
            }
            debug_assert!(self.b[i].is_zero(), "artificial basic at nonzero value");
            match (0..self.n_real).find(|&j| !self.a[i][j].is_zero()) {
                Some(j) => self.pivot(i, j),
                None => drop_rows.push(i),
            }
        }
        for &i in drop_rows.iter().rev() {
            self.a.remove(i);
            self.b.remove(i);
            self.basis.remove(i);
        }
        for row in self.a.iter_mut() {
            row.truncate(self.n_real);
        }
        self.z.truncate(self.n_real);
    }
}
