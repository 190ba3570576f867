//! Extreme rays of pointed cones `{x >= 0, E x = 0}` by double description.
//!
//! The cone is parametrized by a basis of the kernel of `E`, turning each
//! coordinate bound into a halfspace of the parameter space. Halfspaces
//! are inserted one at a time: while the current representation still has
//! lineality, a halfspace touching it splits off one new ray; afterwards
//! the usual ray-combination step runs with the combinatorial adjacency
//! test over tight-set bitmasks. Output rays are primitive integer
//! vectors, deduplicated, checked for extremality, and sorted.

use super::{dot, LpError};
use crate::rational::Rat;
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

/// Options for the double-description run.
#[derive(Clone, Debug)]
pub struct DdOptions {
    /// Abort when an intermediate representation exceeds this many rays.
    pub max_rays: usize,
}

impl Default for DdOptions {
    fn default() -> Self {
        DdOptions { max_rays: 500_000 }
    }
}

/// Reduced row echelon form in place; returns pivot (row, col) pairs.
fn rref(m: &mut [Vec<Rat>]) -> Vec<(usize, usize)> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = m[r][c].clone();
        for v in m[r].iter_mut() {
            if !v.is_zero() {
                *v /= &inv;
            }
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            let (head, tail) = m.split_at_mut(r.max(i));
            let (row_i, row_r) = if i < r { (&mut head[i], &tail[0]) } else { (&mut tail[0], &head[r]) };
            for (v, p) in row_i.iter_mut().zip(row_r.iter()) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// A basis of `{x : rows . x = 0}` in `n`-dimensional space.
pub(crate) fn kernel_basis(rows: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let pivots = rref(&mut m);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in 0..n {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![Rat::zero(); n];
        v[f] = Rat::one();
        for &(pr, pc) in &pivots {
            v[pc] = -m[pr][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Scales to a primitive integer vector, preserving direction.
fn primitive(v: &mut [Rat]) {
    let mut denom_lcm = BigInt::one();
    for x in v.iter() {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let mut num_gcd = BigInt::zero();
    for x in v.iter_mut() {
        *x *= Rat::from(denom_lcm.clone());
        debug_assert!(x.denom().is_one());
        num_gcd = num_gcd.gcd(x.numer());
    }
    if num_gcd.is_zero() || num_gcd.is_one() {
        return;
    }
    let g = Rat::from(num_gcd);
    for x in v.iter_mut() {
        *x /= &g;
    }
}

struct Ray {
    u: Vec<Rat>,
    tight: u128,
}

/// Extreme rays of `{x in R^n : x >= 0, eqs . x = 0}`, as primitive
/// integer vectors in deterministic (lexicographic) order. The cone must
/// be pointed, which holds automatically here since it sits inside the
/// nonnegative orthant.
pub fn extreme_rays_nonneg_kernel(
    n_vars: usize,
    eqs: &[Vec<Rat>],
    opts: &DdOptions,
) -> Result<Vec<Vec<Rat>>, LpError> {
    if n_vars > 128 {
        return Err(LpError::TooManyHalfspaces);
    }
    for row in eqs {
        if row.len() != n_vars {
            return Err(LpError::BadRow { got: row.len(), want: n_vars });
        }
    }
    let basis = kernel_basis(eqs, n_vars);
    let dim = basis.len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    // Halfspace i in parameter space: x_i = sum_j u_j basis[j][i] >= 0.
    let hs: Vec<Vec<Rat>> = (0..n_vars)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();

    let mut lineality: Vec<Vec<Rat>> = (0..dim)
        .map(|j| (0..dim).map(|k| if k == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut remaining: Vec<usize> = (0..n_vars).collect();
    let mut inserted_mask: u128 = 0;

    while !remaining.is_empty() {
        let pick = if lineality.is_empty() {
            // Fewest pos x neg products keeps intermediate growth small.
            let (pick, _) = remaining
                .iter()
                .enumerate()
                .map(|(idx, &i)| {
                    let (mut pos, mut neg) = (0usize, 0usize);
                    for r in &rays {
                        let d = dot(&hs[i], &r.u);
                        if d.is_positive() {
                            pos += 1;
                        } else if d.is_negative() {
                            neg += 1;
                        }
                    }
                    (idx, pos.saturating_mul(neg))
                })
                .min_by_key(|&(_, cost)| cost)
                .unwrap();
            pick
        } else {
            match remaining
                .iter()
                .position(|&i| lineality.iter().any(|l| !dot(&hs[i], l).is_zero()))
            {
                Some(p) => p,
                None => return Err(LpError::NotPointed),
            }
        };
        let i = remaining.swap_remove(pick);
        let h = &hs[i];
        let bit = 1u128 << i;

        if let Some(li) = lineality.iter().position(|l| !dot(h, l).is_zero()) {
            // Split one lineality direction into a new ray, projecting
            // everything else onto the hyperplane of h.
            let mut l = lineality.swap_remove(li);
            if dot(h, &l).is_negative() {
                for v in l.iter_mut() {
                    *v = -std::mem::take(v);
                }
            }
            let hl = dot(h, &l);
            for v in lineality.iter_mut() {
                let c = dot(h, v) / &hl;
                if !c.is_zero() {
                    for (a, b) in v.iter_mut().zip(&l) {
                        *a -= &c * b;
                    }
                }
            }
            for r in rays.iter_mut() {
                let c = dot(h, &r.u) / &hl;
                if !c.is_zero() {
                    for (a, b) in r.u.iter_mut().zip(&l) {
                        *a -= &c * b;
                    }
                    primitive(&mut r.u);
                }
                r.tight |= bit;
            }
            primitive(&mut l);
            rays.push(Ray { u: l, tight: inserted_mask });
        } else {
            debug_assert!(lineality.is_empty());
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut keep = Vec::new();
            let mut vals: Vec<Rat> = Vec::with_capacity(rays.len());
            for r in &rays {
                vals.push(dot(h, &r.u));
            }
            for (idx, v) in vals.iter().enumerate() {
                if v.is_positive() {
                    pos.push(idx);
                } else if v.is_negative() {
                    neg.push(idx);
                } else {
                    keep.push(idx);
                }
            }
            let mut new_rays: Vec<Ray> = Vec::new();
            for &p in &pos {
                for &q in &neg {
                    let meet = rays[p].tight & rays[q].tight;
                    // Combinatorial adjacency: no third ray is tight on
                    // everything both parents are tight on.
                    let adjacent = rays
                        .iter()
                        .enumerate()
                        .all(|(k, r)| k == p || k == q || meet & !r.tight != 0);
                    if !adjacent {
                        continue;
                    }
                    let (vp, vq) = (&vals[p], &vals[q]);
                    let mut u: Vec<Rat> = rays[p]
                        .u
                        .iter()
                        .zip(&rays[q].u)
                        .map(|(a, b)| vp * b - vq * a)
                        .collect();
                    primitive(&mut u);
                    new_rays.push(Ray { u, tight: meet | bit });
                }
            }
            let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + keep.len() + new_rays.len());
            let mut old = std::mem::take(&mut rays);
            for (idx, r) in old.drain(..).enumerate() {
                if pos.contains(&idx) {
                    next.push(r);
                } else if keep.contains(&idx) {
                    next.push(Ray { u: r.u, tight: r.tight | bit });
                }
            }
            next.extend(new_rays);
            rays = next;
            if rays.len() > opts.max_rays {
                return Err(LpError::RayBudget(opts.max_rays));
            }
        }
        inserted_mask |= bit;
    }

    // Back to coordinate space; x_i is exactly the i-th halfspace value.
    let mut out: Vec<Vec<Rat>> = Vec::with_capacity(rays.len());
    for r in &rays {
        let mut x: Vec<Rat> = hs.iter().map(|h| dot(h, &r.u)).collect();
        primitive(&mut x);
        if x.iter().all(|v| v.is_zero()) {
            continue;
        }
        out.push(x);
    }
    out.sort();
    out.dedup();

    for x in &out {
        if x.iter().any(|v| v.is_negative()) || eqs.iter().any(|e| !dot(e, x).is_zero()) {
            return Err(LpError::Internal("ray outside the cone"));
        }
        // Extremality: the tight coordinates together with the equalities
        // must pin the ray down to a single line.
        let mut tight_rows: Vec<Vec<Rat>> = eqs.to_vec();
        for (idx, v) in x.iter().enumerate() {
            if v.is_zero() {
                let mut e = vec![Rat::zero(); n_vars];
                e[idx] = Rat::one();
                tight_rows.push(e);
            }
        }
        if kernel_basis(&tight_rows, n_vars).len() != 1 {
            return Err(LpError::Internal("ray not extremal"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn rays(n: usize, eqs: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        extreme_rays_nonneg_kernel(n, eqs, &DdOptions::default()).unwrap()
    }

    #[test]
    fn kernel_basis_dimensions() {
        let b = kernel_basis(&[vec![int(1), int(1), int(-1)]], 3);
        assert_eq!(b.len(), 2);
        let b = kernel_basis(&[], 2);
        assert_eq!(b.len(), 2);
        let b = kernel_basis(&[vec![int(1), int(0)], vec![int(0), int(1)]], 2);
        assert!(b.is_empty());
    }

    #[test]
    fn sum_cone_rays() {
        // {x >= 0 : x1 + x2 = x3}: two extreme rays.
        let got = rays(3, &[vec![int(1), int(1), int(-1)]]);
        assert_eq!(got, vec![vec![int(0), int(1), int(1)], vec![int(1), int(0), int(1)]]);
    }

    #[test]
    fn orthant_rays() {
        let got = rays(3, &[]);
        assert_eq!(got.len(), 3);
        for r in &got {
            assert_eq!(r.iter().filter(|v| !v.is_zero()).count(), 1);
        }
    }

    #[test]
    fn zero_cone_has_no_rays() {
        // x1 + x2 = 0 with x >= 0 forces x = 0.
        let got = rays(2, &[vec![int(1), int(1)]]);
        assert!(got.is_empty());
    }

    #[test]
    fn scaled_simplex_rays() {
        // x1 + x2 + x3 = 3 x4.
        let got = rays(4, &[vec![int(1), int(1), int(1), int(-3)]]);
        assert_eq!(
            got,
            vec![
                vec![int(0), int(0), int(3), int(1)],
                vec![int(0), int(3), int(0), int(1)],
                vec![int(3), int(0), int(0), int(1)],
            ]
        );
    }

    #[test]
    fn primitive_scaling() {
        let mut v = vec![crate::rational::rat(2, 3), crate::rational::rat(-4, 9)];
        primitive(&mut v);
        assert_eq!(v, vec![int(3), int(-2)]);
    }
}
