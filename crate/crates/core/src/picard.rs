//! Divisor classes on the `n`-marked moduli space, encoded as rational
//! functions on the boundary index set.
//!
//! A function `f` stands for the divisor `D(f) = -sum_S f(S) * Delta_S`,
//! where `Delta_S` for a singleton `{k}` is `-psi_k` and for `S = [n-1]` is
//! `-psi_n`. Two functions give the same class exactly when they differ by a
//! combination of the vertex functions `K_i` (indicator of `i in S`) and the
//! pair functions `K_{i,j}` (indicator of `{i,j} <= S`); those combinations
//! pair to zero against every F-curve, so class equality is decided by
//! comparing all F-curve pairings.

use crate::groundset::{self, for_each_four_partition, GroundError, Sigma, Subset};
use crate::rational::{format_rat, parse_rat, Rat};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PicardError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("divisors live on different marking sets: n = {0} vs {1}")]
    MixedN(usize, usize),
    #[error("malformed divisor JSON: {0}")]
    BadJson(String),
}

/// A divisor class represented by its coefficient function on the boundary
/// index set, densely indexed in size-then-lex order.
#[derive(Clone)]
pub struct DivisorClass {
    n: usize,
    sigma: Arc<Sigma>,
    coeff: Vec<Rat>,
}

impl PartialEq for DivisorClass {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.coeff == other.coeff
    }
}

impl Eq for DivisorClass {}

impl std::fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DivisorClass(n={}, ", self.n)?;
        let mut first = true;
        for (i, c) in self.coeff.iter().enumerate() {
            if !c.is_zero() {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{}*{:?}", format_rat(c), self.sigma.subsets()[i])?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl DivisorClass {
    pub fn zero(n: usize) -> Result<Self, PicardError> {
        let sigma = groundset::sigma(n)?;
        let coeff = vec![Rat::zero(); sigma.len()];
        Ok(DivisorClass { n, sigma, coeff })
    }

    /// Builds the class of `-sum_S f(S) Delta_S` from a coefficient function.
    pub fn from_fn(n: usize, mut f: impl FnMut(&Subset) -> Rat) -> Result<Self, PicardError> {
        let sigma = groundset::sigma(n)?;
        let coeff = sigma.subsets().iter().map(&mut f).collect();
        Ok(DivisorClass { n, sigma, coeff })
    }

    pub fn from_coeffs(n: usize, coeff: Vec<Rat>) -> Result<Self, PicardError> {
        let sigma = groundset::sigma(n)?;
        assert_eq!(coeff.len(), sigma.len());
        Ok(DivisorClass { n, sigma, coeff })
    }

    /// The coefficient of one proper `S`: `f = indicator of S` encodes
    /// `-Delta_S`.
    pub fn indicator(n: usize, s: &Subset) -> Result<Self, PicardError> {
        let mut d = Self::zero(n)?;
        let i = d.sigma.index(s);
        d.coeff[i] = Rat::one();
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeff
    }

    pub fn value(&self, s: &Subset) -> &Rat {
        &self.coeff[self.sigma.index(s)]
    }

    pub fn value_by_mask(&self, mask: u32) -> &Rat {
        &self.coeff[self.sigma.index_of_mask(mask)]
    }

    pub fn add(&self, other: &Self) -> Result<Self, PicardError> {
        if self.n != other.n {
            return Err(PicardError::MixedN(self.n, other.n));
        }
        let coeff = self.coeff.iter().zip(&other.coeff).map(|(a, b)| a + b).collect();
        Ok(DivisorClass { n: self.n, sigma: self.sigma.clone(), coeff })
    }

    pub fn scale(&self, k: &Rat) -> Self {
        DivisorClass {
            n: self.n,
            sigma: self.sigma.clone(),
            coeff: self.coeff.iter().map(|c| c * k).collect(),
        }
    }

    /// Relabels markings: `(sigma . f)(S) = f(sigma^{-1} S)`.
    pub fn permute(&self, p: &groundset::Permutation) -> Self {
        let inv = p.inverse();
        let coeff = self
            .sigma
            .subsets()
            .iter()
            .map(|s| self.coeff[self.sigma.index(&groundset::act(&inv, s))].clone())
            .collect();
        DivisorClass { n: self.n, sigma: self.sigma.clone(), coeff }
    }

    pub fn max_abs_coeff(&self) -> Rat {
        crate::rational::max_abs(&self.coeff)
    }
}

/// The vertex relation function `K_i` (`i` in `[n-1]`): 1 iff `i in S`.
pub fn keel_vertex(n: usize, i: usize) -> Result<DivisorClass, PicardError> {
    assert!((1..n).contains(&i));
    DivisorClass::from_fn(n, |s| if s.contains(i) { Rat::one() } else { Rat::zero() })
}

/// The pair relation function `K_{i,j}` (`i < j` in `[n-1]`): 1 iff both in `S`.
pub fn keel_pair(n: usize, i: usize, j: usize) -> Result<DivisorClass, PicardError> {
    assert!(i < j && j < n);
    DivisorClass::from_fn(n, |s| if s.contains(i) && s.contains(j) { Rat::one() } else { Rat::zero() })
}

/// Pairing of `D(f)` with the F-curve of the partition `{X, Y, Z, W}`,
/// given by the three parts avoiding `n` as masks:
/// `f(X)+f(Y)+f(Z)+f(XYZ) - f(XY) - f(XZ) - f(YZ)`.
pub fn pair_fcurve_masks(f: &DivisorClass, x: u32, y: u32, z: u32) -> Rat {
    let sig = &f.sigma;
    let v = |m: u32| &f.coeff[sig.index_of_mask(m)];
    v(x) + v(y) + v(z) + v(x | y | z) - v(x | y) - v(x | z) - v(y | z)
}

pub fn pair_fcurve(f: &DivisorClass, x: &Subset, y: &Subset, z: &Subset) -> Rat {
    debug_assert!(x.mask() & y.mask() == 0 && x.mask() & z.mask() == 0 && y.mask() & z.mask() == 0);
    pair_fcurve_masks(f, x.mask(), y.mask(), z.mask())
}

/// First F-curve with a negative pairing, if any, as part masks.
pub fn first_fnef_violation(f: &DivisorClass) -> Option<(u32, u32, u32)> {
    let mut found = None;
    for_each_four_partition(f.n, |x, y, z| {
        if found.is_none() && pair_fcurve_masks(f, x, y, z).is_negative() {
            found = Some((x, y, z));
        }
    });
    found
}

/// F-nef: pairs nonnegatively with every F-curve.
pub fn is_fnef_divisor(f: &DivisorClass) -> bool {
    first_fnef_violation(f).is_none()
}

/// Classes are equal iff all F-curve pairings agree (the F-curves span the
/// dual space).
pub fn classes_equal(f: &DivisorClass, g: &DivisorClass) -> Result<bool, PicardError> {
    if f.n != g.n {
        return Err(PicardError::MixedN(f.n, g.n));
    }
    let mut equal = true;
    for_each_four_partition(f.n, |x, y, z| {
        if equal && pair_fcurve_masks(f, x, y, z) != pair_fcurve_masks(g, x, y, z) {
            equal = false;
        }
    });
    Ok(equal)
}

/// Exact rank of the span of the relation functions, by Gaussian elimination
/// over the rationals.
fn keel_rank(n: usize) -> Result<usize, PicardError> {
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for i in 1..n {
        rows.push(keel_vertex(n, i)?.coeff);
    }
    for i in 1..n {
        for j in (i + 1)..n {
            rows.push(keel_pair(n, i, j)?.coeff);
        }
    }
    Ok(rank(rows))
}

pub(crate) fn rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = &rows[i][c] / &inv;
                for k in c..cols {
                    let sub = &rows[r][k] * &factor;
                    rows[i][k] -= sub;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Rank of the Picard group: number of boundary indices minus the exact rank
/// of the relation span. Equals `2^(n-1) - 1 - n(n-1)/2` because the
/// relations are independent.
pub fn picard_rank(n: usize) -> Result<usize, PicardError> {
    let sigma = groundset::sigma(n)?;
    Ok(sigma.len() - keel_rank(n)?)
}

// ---------------------------------------------------------------------------
// JSON form: sparse list of (subset, value), absent entries are zero.

#[derive(Serialize, Deserialize)]
struct DivisorJson {
    n: usize,
    coeff: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    subset: Vec<usize>,
    value: String,
}

impl Serialize for DivisorClass {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let coeff = self
            .sigma
            .subsets()
            .iter()
            .zip(&self.coeff)
            .filter(|(_, v)| !v.is_zero())
            .map(|(s, v)| CoeffJson { subset: s.members(), value: format_rat(v) })
            .collect();
        DivisorJson { n: self.n, coeff }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DivisorJson::deserialize(de)?;
        let mut d = DivisorClass::zero(raw.n).map_err(D::Error::custom)?;
        for e in &raw.coeff {
            let s = Subset::new(raw.n, &e.subset).map_err(D::Error::custom)?;
            let v = parse_rat(&e.value).map_err(D::Error::custom)?;
            d.coeff[d.sigma.index(&s)] = v;
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundset::Permutation;
    use crate::rational::int;
    use rand::{Rng, SeedableRng};

    #[test]
    fn keel_functions_pair_to_zero() {
        for n in 5..=7 {
            let mut relations = Vec::new();
            for i in 1..n {
                relations.push(keel_vertex(n, i).unwrap());
                for j in (i + 1)..n {
                    relations.push(keel_pair(n, i, j).unwrap());
                }
            }
            for rel in &relations {
                for_each_four_partition(n, |x, y, z| {
                    assert!(pair_fcurve_masks(rel, x, y, z).is_zero(), "n={n} {x:#b} {y:#b} {z:#b}");
                });
            }
        }
    }

    #[test]
    fn pairing_invariant_under_relations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [5usize, 6] {
            for _ in 0..5 {
                let f = DivisorClass::from_fn(n, |_| int(rng.gen_range(-4..=4))).unwrap();
                let mut g = f.clone();
                for i in 1..n {
                    g = g.add(&keel_vertex(n, i).unwrap().scale(&int(rng.gen_range(-3..=3)))).unwrap();
                    for j in (i + 1)..n {
                        g = g
                            .add(&keel_pair(n, i, j).unwrap().scale(&int(rng.gen_range(-3..=3))))
                            .unwrap();
                    }
                }
                assert!(classes_equal(&f, &g).unwrap());
                for_each_four_partition(n, |x, y, z| {
                    assert_eq!(pair_fcurve_masks(&f, x, y, z), pair_fcurve_masks(&g, x, y, z));
                });
            }
        }
    }

    #[test]
    fn action_invariance_of_pairing() {
        // pairing(p.f, p.curve) == pairing(f, curve): push the whole 4-part
        // partition of [n] through p and read off the three parts avoiding n.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let full_n = (1u32 << (n + 1)) - 2; // bits 1..=n
        let perms = Permutation::all(n).unwrap();
        for _ in 0..3 {
            let f = DivisorClass::from_fn(n, |_| int(rng.gen_range(-4..=4))).unwrap();
            for p in perms.iter().step_by(97) {
                let pf = f.permute(p);
                let map_part = |m: u32| {
                    let mut out = 0u32;
                    for i in 1..=n {
                        if m & (1 << i) != 0 {
                            out |= 1 << p.apply(i);
                        }
                    }
                    out
                };
                for_each_four_partition(n, |x, y, z| {
                    let w = full_n & !(x | y | z);
                    let mut img: Vec<u32> =
                        [x, y, z, w].iter().map(|&m| map_part(m)).filter(|&m| m & (1 << n) == 0).collect();
                    img.sort_by_key(|m| m.trailing_zeros());
                    assert_eq!(img.len(), 3);
                    assert_eq!(
                        pair_fcurve_masks(&pf, img[0], img[1], img[2]),
                        pair_fcurve_masks(&f, x, y, z)
                    );
                });
            }
        }
    }

    #[test]
    fn fnef_examples() {
        // Constant 1 encodes psi - delta, which pairs to 1 with every F-curve.
        for n in 5..=7 {
            let one = DivisorClass::from_fn(n, |_| Rat::one()).unwrap();
            for_each_four_partition(n, |x, y, z| {
                assert!(pair_fcurve_masks(&one, x, y, z).is_one());
            });
            assert!(is_fnef_divisor(&one));
        }
        // -psi_1 on n = 5 pairs negatively with curves keeping 1 on a moving leg.
        let minus_psi1 = DivisorClass::from_fn(5, |s| {
            if s.mask() == 0b10 {
                -Rat::one()
            } else {
                Rat::zero()
            }
        })
        .unwrap();
        assert!(!is_fnef_divisor(&minus_psi1));
    }

    #[test]
    fn class_equality_examples() {
        let n = 6;
        let k1 = keel_vertex(n, 1).unwrap();
        assert!(classes_equal(&k1, &DivisorClass::zero(n).unwrap()).unwrap());
        for n in 5..=6 {
            let z = DivisorClass::zero(n).unwrap();
            for s in groundset::sigma(n).unwrap().proper() {
                let ind = DivisorClass::indicator(n, s).unwrap();
                assert!(!classes_equal(&z, &ind).unwrap(), "indicator of {s:?} should move the class");
            }
        }
    }

    #[test]
    fn picard_ranks_match_closed_form() {
        for n in 4..=9 {
            let expect = (1usize << (n - 1)) - 1 - n * (n - 1) / 2;
            assert_eq!(picard_rank(n).unwrap(), expect, "n = {n}");
        }
    }

    #[test]
    fn divisor_json_roundtrip() {
        let f = DivisorClass::from_fn(5, |s| int(s.size() as i64 - 2)).unwrap();
        let js = serde_json::to_string(&f).unwrap();
        let back: DivisorClass = serde_json::from_str(&js).unwrap();
        assert_eq!(f, back);
        // Sparse: zeros are dropped.
        assert!(!js.contains("\"value\":\"0\""));
    }
}
