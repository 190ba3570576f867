//! Symmetry tables for the action of the marking permutations on the
//! boundary coordinates, with a fused canonical-form and stabilizer
//! computation tuned for the support search.

use super::StrongFError;
use crate::groundset::{self, Sigma};

/// Per-`n` image tables: for every permutation `g` and proper index `p`,
/// `table[g * rho + p]` is the proper index of the permuted coordinate.
pub struct PermTables {
    rho: usize,
    n_perms: usize,
    table: Vec<u8>,
}

/// The symmetry data of one support set: its orbit-canonical key and the
/// permutations fixing it.
pub struct NodeSym {
    pub canonical: u128,
    stab: Vec<u32>,
}

impl PermTables {
    pub fn build(sigma: &Sigma) -> Result<PermTables, StrongFError> {
        let rho = sigma.proper_count();
        if rho > 119 {
            return Err(StrongFError::Internal("more than 119 coordinates"));
        }
        let perms = groundset::Permutation::all(sigma.n())?;
        let mut table = vec![0u8; perms.len() * rho];
        for (g, perm) in perms.iter().enumerate() {
            let row = &mut table[g * rho..(g + 1) * rho];
            for (p, s) in sigma.proper().iter().enumerate() {
                let image = groundset::act(perm, s);
                let q = sigma
                    .proper_index_of_mask(image.mask())
                    .ok_or(StrongFError::Internal("action left the proper range"))?;
                row[p] = q as u8;
            }
        }
        Ok(PermTables { rho, n_perms: perms.len(), table })
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    pub fn n_perms(&self) -> usize {
        self.n_perms
    }

    fn row(&self, g: usize) -> &[u8] {
        &self.table[g * self.rho..(g + 1) * self.rho]
    }

    /// The image of one proper coordinate under one permutation.
    pub fn image_of(&self, g: usize, p: usize) -> usize {
        self.table[g * self.rho + p] as usize
    }

    /// The image of a coordinate bitset under one permutation.
    pub fn apply(&self, g: usize, mask: u128) -> u128 {
        let row = self.row(g);
        let mut out = 0u128;
        let mut rest = mask;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << row[p];
        }
        out
    }

    /// Canonical key and stabilizer of a support set, in one pass over
    /// the group. The key is the minimum of the set's images under all
    /// permutations. A scan may stop early once its partial image holds
    /// a coordinate outside the set and already exceeds the running
    /// minimum: the full image only gains bits, so it cannot win. Scans
    /// whose image stays inside the set always run to completion, which
    /// makes stabilizer detection exact: an injective map into the set
    /// fills it, so image equals set.
    pub fn analyze(&self, j: u128) -> NodeSym {
        let members: Vec<u8> = {
            let mut v = Vec::with_capacity(j.count_ones() as usize);
            let mut rest = j;
            while rest != 0 {
                v.push(rest.trailing_zeros() as u8);
                rest &= rest - 1;
            }
            v
        };
        let mut best = j;
        let mut stab: Vec<u32> = Vec::new();
        for g in 0..self.n_perms {
            let row = self.row(g);
            let mut acc = 0u128;
            let mut inside = true;
            let mut complete = true;
            for &p in &members {
                acc |= 1 << row[p as usize];
                if acc & !j != 0 {
                    inside = false;
                    if acc > best {
                        complete = false;
                        break;
                    }
                }
            }
            if complete {
                if acc < best {
                    best = acc;
                }
                if inside {
                    stab.push(g as u32);
                }
            }
        }
        NodeSym { canonical: best, stab }
    }

    /// Orbit representatives of the elements of `j` under the stabilizer
    /// found by `analyze`, in increasing index order: the children the
    /// search needs to descend into, one per orbit.
    pub fn child_reps(&self, j: u128, sym: &NodeSym) -> Vec<u8> {
        let members: Vec<u8> = super::bit_indices(j).iter().map(|&p| p as u8).collect();
        if sym.stab.len() <= 1 {
            return members;
        }
        // Union-find over the coordinates appearing in j.
        let mut parent: Vec<u8> = (0..self.rho as u8).collect();
        fn find(parent: &mut [u8], mut x: u8) -> u8 {
            while parent[x as usize] != x {
                let up = parent[parent[x as usize] as usize];
                parent[x as usize] = up;
                x = up;
            }
            x
        }
        for &g in &sym.stab {
            let row = self.row(g as usize);
            for &p in &members {
                let a = find(&mut parent, p);
                let b = find(&mut parent, row[p as usize]);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        let mut reps: Vec<u8> = members
            .iter()
            .copied()
            .filter(|&p| find(&mut parent, p) == p)
            .collect();
        reps.sort_unstable();
        reps
    }

    /// Convenience: the canonical key alone.
    pub fn canonical(&self, j: u128) -> u128 {
        self.analyze(j).canonical
    }
}
