//! F-curves, their numerical classes, and pairwise balanced designs.
//!
//! An F-curve is determined by a partition of `[n]` into four nonempty blocks
//! `X, Y, Z, W` where `W` is the block containing `n`; we store the three
//! `n`-avoiding blocks as bitmasks. Its numerical class pairs with a divisor
//! class through [`crate::picard::pair_fcurve_masks`], and the same data can
//! be repackaged as a signed pairwise balanced design: every block collection
//! on `[n-1]` covering each pair a constant number of times determines a curve
//! class, and F-curves are exactly the classes of the simplest such designs.

use crate::groundset::{self, GroundError, Subset};
use crate::picard::DivisorClass;
use crate::rational::{format_rat, Rat};
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("F-curve part is empty")]
    EmptyPart,
    #[error("F-curve parts overlap or leave [n] uncovered incorrectly")]
    BadParts,
    #[error("block {0:?} is not a proper subset (need 2 <= size <= n-2)")]
    BadBlock(Vec<usize>),
    #[error("pair {{{i},{j}}} is covered {got} times, expected {want}")]
    NotBalanced { i: usize, j: usize, got: String, want: String },
    #[error("mixed ambient sizes: {0} vs {1}")]
    MixedN(usize, usize),
    #[error("invalid serialized form: {0}")]
    BadJson(String),
}

/// The curve determined by a four-block partition of `[n]`; the three masks
/// are the blocks avoiding `n`, ordered by their smallest element.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FCurve {
    n: usize,
    x: u32,
    y: u32,
    z: u32,
}

impl FCurve {
    pub fn from_masks(n: usize, a: u32, b: u32, c: u32) -> Result<Self, CurveError> {
        if !(groundset::MIN_N..=groundset::MAX_N).contains(&n) {
            return Err(GroundError::BadN(n).into());
        }
        if a == 0 || b == 0 || c == 0 {
            return Err(CurveError::EmptyPart);
        }
        let full = groundset::mask_all(n);
        if a & b != 0 || a & c != 0 || b & c != 0 || (a | b | c) & !full != 0 {
            return Err(CurveError::BadParts);
        }
        let mut parts = [a, b, c];
        parts.sort_by_key(|m| m.trailing_zeros());
        Ok(FCurve { n, x: parts[0], y: parts[1], z: parts[2] })
    }

    pub fn new(n: usize, x: &[usize], y: &[usize], z: &[usize]) -> Result<Self, CurveError> {
        let mask = |elems: &[usize]| -> Result<u32, CurveError> {
            Ok(Subset::new(n, elems)?.mask())
        };
        FCurve::from_masks(n, mask(x)?, mask(y)?, mask(z)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The three blocks avoiding `n`, as masks over bits `1..n`.
    pub fn parts(&self) -> [u32; 3] {
        [self.x, self.y, self.z]
    }

    /// The block containing `n`, as a mask over bits `1..=n`.
    pub fn w_mask(&self) -> u32 {
        let full = ((1u32 << (self.n + 1)) - 2) & !0;
        full & !(self.x | self.y | self.z) & ((1 << (self.n + 1)) - 1)
    }

    /// Intersection numbers of this curve with every boundary divisor and
    /// every cotangent class.
    pub fn class(&self) -> CurveClass {
        let sig = groundset::sigma(self.n).expect("validated n");
        let mut delta = vec![Rat::zero(); sig.proper_count()];
        let mut psi = vec![Rat::zero(); self.n];
        for union in [self.x | self.y, self.x | self.z, self.y | self.z] {
            let idx = sig.proper_index_of_mask(union).expect("pair unions are proper");
            delta[idx] += Rat::one();
        }
        let mut bump = |mask: u32| match sig.proper_index_of_mask(mask) {
            Some(idx) => delta[idx] -= Rat::one(),
            None => {
                // A singleton block {k} contributes through psi_k, and the
                // block containing n contributes through psi_n when it is {n}.
                if mask == groundset::mask_all(self.n) {
                    psi[self.n - 1] += Rat::one();
                } else {
                    psi[mask.trailing_zeros() as usize - 1] += Rat::one();
                }
            }
        };
        bump(self.x);
        bump(self.y);
        bump(self.z);
        bump(self.x | self.y | self.z);
        CurveClass { n: self.n, delta, psi }
    }

    /// The signed design with the same curve class: pair unions enter with
    /// multiplicity `+1` and proper blocks of the partition with `-1`.
    pub fn to_pbd(&self) -> Pbd {
        let sig = groundset::sigma(self.n).expect("validated n");
        let mut blocks: Vec<(u32, Rat)> = Vec::with_capacity(7);
        for union in [self.x | self.y, self.x | self.z, self.y | self.z] {
            blocks.push((union, Rat::one()));
        }
        for mask in [self.x, self.y, self.z, self.x | self.y | self.z] {
            if sig.proper_index_of_mask(mask).is_some() {
                blocks.push((mask, -Rat::one()));
            }
        }
        Pbd::from_masks(self.n, blocks).expect("F-curve designs are balanced")
    }
}

/// All F-curves on `[n]`, one per four-block partition.
pub fn all_fcurves(n: usize) -> Result<Vec<FCurve>, GroundError> {
    if !(groundset::MIN_N..=groundset::MAX_N).contains(&n) {
        return Err(GroundError::BadN(n));
    }
    let mut out = Vec::new();
    groundset::for_each_four_partition(n, |x, y, z| {
        out.push(FCurve { n, x, y, z });
    });
    Ok(out)
}

/// A pairwise balanced design on `[n-1]` with rational multiplicities:
/// a collection of proper blocks covering every pair the same number of
/// times (the index). Blocks are kept sorted with zero multiplicities
/// dropped, so equal designs compare equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pbd {
    n: usize,
    blocks: Vec<(u32, Rat)>,
    index: Rat,
}

impl Pbd {
    pub fn from_masks(n: usize, blocks: Vec<(u32, Rat)>) -> Result<Self, CurveError> {
        let sig = groundset::sigma(n)?;
        let mut merged: std::collections::BTreeMap<(u32, u32), Rat> = Default::default();
        for (mask, mult) in blocks {
            if sig.proper_index_of_mask(mask).is_none() {
                let members = Subset::from_mask(n, mask)
                    .map(|s| s.members())
                    .unwrap_or_default();
                return Err(CurveError::BadBlock(members));
            }
            if !mult.is_zero() {
                let key = (mask.count_ones(), mask);
                *merged.entry(key).or_insert_with(Rat::zero) += mult;
            }
        }
        let blocks: Vec<(u32, Rat)> = merged
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|((_, mask), m)| (mask, m))
            .collect();

        // Balance: every pair of points must be covered index-many times.
        let cover = |i: usize, j: usize| -> Rat {
            let pair = (1u32 << i) | (1 << j);
            blocks
                .iter()
                .filter(|(mask, _)| mask & pair == pair)
                .map(|(_, m)| m.clone())
                .fold(Rat::zero(), |a, b| a + b)
        };
        let index = cover(1, 2);
        for i in 1..n {
            for j in i + 1..n {
                let got = cover(i, j);
                if got != index {
                    return Err(CurveError::NotBalanced {
                        i,
                        j,
                        got: format_rat(&got),
                        want: format_rat(&index),
                    });
                }
            }
        }
        Ok(Pbd { n, blocks, index })
    }

    pub fn new(n: usize, blocks: &[(Vec<usize>, Rat)]) -> Result<Self, CurveError> {
        let mut masked = Vec::with_capacity(blocks.len());
        for (elems, mult) in blocks {
            masked.push((Subset::new(n, elems)?.mask(), mult.clone()));
        }
        Pbd::from_masks(n, masked)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Common pair coverage of the design.
    pub fn index(&self) -> &Rat {
        &self.index
    }

    /// Blocks with nonzero multiplicity, in size-then-lex mask order.
    pub fn blocks(&self) -> &[(u32, Rat)] {
        &self.blocks
    }

    pub fn multiplicity(&self, mask: u32) -> Rat {
        self.blocks
            .iter()
            .find(|(m, _)| *m == mask)
            .map(|(_, mult)| mult.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Total multiplicity of blocks containing the point `i`.
    pub fn degree(&self, i: usize) -> Rat {
        assert!((1..self.n).contains(&i), "point out of range");
        self.blocks
            .iter()
            .filter(|(mask, _)| mask & (1 << i) != 0)
            .map(|(_, m)| m.clone())
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// Whether all multiplicities are nonnegative.
    pub fn is_effective(&self) -> bool {
        self.blocks.iter().all(|(_, m)| !m.is_negative())
    }

    /// The curve class of the design: boundary pairings are the block
    /// multiplicities, cotangent pairings come from point degrees and the
    /// index.
    pub fn class(&self) -> CurveClass {
        let sig = groundset::sigma(self.n).expect("validated n");
        let mut delta = vec![Rat::zero(); sig.proper_count()];
        for (mask, mult) in &self.blocks {
            delta[sig.proper_index_of_mask(*mask).expect("proper block")] = mult.clone();
        }
        let mut psi = vec![Rat::zero(); self.n];
        for (i, slot) in psi.iter_mut().enumerate().take(self.n - 1) {
            *slot = self.degree(i + 1) - &self.index;
        }
        psi[self.n - 1] = self.index.clone();
        CurveClass { n: self.n, delta, psi }
    }
}

/// A curve class recorded by its intersection numbers: one per proper
/// boundary divisor (in proper-index order) and one per cotangent class
/// `psi_1, ..., psi_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveClass {
    n: usize,
    delta: Vec<Rat>,
    psi: Vec<Rat>,
}

impl CurveClass {
    pub fn zero(n: usize) -> Result<Self, CurveError> {
        let sig = groundset::sigma(n)?;
        Ok(CurveClass {
            n,
            delta: vec![Rat::zero(); sig.proper_count()],
            psi: vec![Rat::zero(); n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Boundary pairings in proper-index order.
    pub fn delta(&self) -> &[Rat] {
        &self.delta
    }

    /// Cotangent pairings; entry `i` is the pairing with `psi_{i+1}`.
    pub fn psi(&self) -> &[Rat] {
        &self.psi
    }

    pub fn delta_of_mask(&self, mask: u32) -> &Rat {
        let sig = groundset::sigma(self.n).expect("validated n");
        &self.delta[sig.proper_index_of_mask(mask).expect("proper mask")]
    }
}

/// Pairing of a divisor class with a curve class. Coefficients on
/// singletons and on the full set contribute through the cotangent
/// pairings with opposite sign, matching the boundary convention.
pub fn pair_divisor_curve(f: &DivisorClass, c: &CurveClass) -> Result<Rat, CurveError> {
    if f.n() != c.n {
        return Err(CurveError::MixedN(f.n(), c.n));
    }
    let sig = f.sigma();
    let mut total = Rat::zero();
    for (s, d) in sig.proper().iter().zip(&c.delta) {
        if !d.is_zero() {
            total -= f.value(s) * d;
        }
    }
    for k in 1..c.n {
        let p = &c.psi[k - 1];
        if !p.is_zero() {
            total += f.value_by_mask(1 << k) * p;
        }
    }
    let pn = &c.psi[c.n - 1];
    if !pn.is_zero() {
        total += f.value_by_mask(groundset::mask_all(c.n)) * pn;
    }
    Ok(total)
}

/// The design consisting of every pair once; its index is 1.
pub fn all_pairs_design(n: usize) -> Result<Pbd, CurveError> {
    let mut blocks = Vec::new();
    for i in 1..n {
        for j in i + 1..n {
            blocks.push(((1u32 << i) | (1 << j), Rat::one()));
        }
    }
    Pbd::from_masks(n, blocks)
}

/// The index-1 design made of one proper block together with all pairs not
/// inside it: pairs inside the block are covered by the block, the rest by
/// themselves.
pub fn block_completion_design(n: usize, block: u32) -> Result<Pbd, CurveError> {
    let mut blocks = vec![(block, Rat::one())];
    for i in 1..n {
        for j in i + 1..n {
            let pair = (1u32 << i) | (1 << j);
            if block & pair != pair {
                blocks.push((pair, Rat::one()));
            }
        }
    }
    Pbd::from_masks(n, blocks)
}

/// The biplane on 11 points built from quadratic residues mod 11: the 11
/// translates of {1, 3, 4, 5, 9}, with residue 0 relabeled as point 11.
/// Every pair lies in exactly two blocks and every point in exactly five.
pub fn paley_biplane() -> Pbd {
    let qr = [1u32, 3, 4, 5, 9];
    let mut blocks = Vec::with_capacity(11);
    for t in 0..11u32 {
        let mut mask = 0u32;
        for q in qr {
            let r = (q + t) % 11;
            let label = if r == 0 { 11 } else { r };
            mask |= 1 << label;
        }
        blocks.push((mask, Rat::one()));
    }
    Pbd::from_masks(12, blocks).expect("the biplane is balanced")
}

/// Generators of a group of point relabelings preserving the biplane's
/// block set: the residue shift `r -> r + 1` and the quadratic-residue
/// multiplier `r -> 3 r` modulo 11 (marking 11 stands for the zero
/// residue), generating the affine maps `r -> 3^a r + b` of order 55.
/// Each generator maps marking `k` to entry `k - 1`.
pub fn paley_symmetries() -> Vec<Vec<usize>> {
    let to_marking = |r: usize| if r == 0 { 11 } else { r };
    let shift: Vec<usize> = (1..=11).map(|k| to_marking((k % 11 + 1) % 11)).collect();
    let mult: Vec<usize> = (1..=11).map(|k| to_marking(3 * (k % 11) % 11)).collect();
    vec![shift, mult]
}

#[derive(Serialize, Deserialize)]
struct BlockJson {
    set: Vec<usize>,
    mult: MultJson,
}

/// Multiplicities print as plain integers when they are integral and as
/// "p/q" strings otherwise; both forms parse.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MultJson {
    Int(i64),
    Frac(String),
}

impl From<&Rat> for MultJson {
    fn from(v: &Rat) -> MultJson {
        match crate::rational::as_i64(v) {
            Some(i) => MultJson::Int(i),
            None => MultJson::Frac(crate::rational::format_rat(v)),
        }
    }
}

impl MultJson {
    fn to_rat(&self) -> Result<Rat, crate::rational::RatParseError> {
        match self {
            MultJson::Int(i) => Ok(crate::rational::int(*i)),
            MultJson::Frac(s) => crate::rational::parse_rat(s),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PbdJson {
    n: usize,
    blocks: Vec<BlockJson>,
}

impl Serialize for Pbd {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let blocks = self
            .blocks
            .iter()
            .map(|(mask, mult)| BlockJson {
                set: Subset::from_mask(self.n, *mask).expect("valid block").members(),
                mult: MultJson::from(mult),
            })
            .collect();
        PbdJson { n: self.n, blocks }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Pbd {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = PbdJson::deserialize(de)?;
        let mut blocks: Vec<(Vec<usize>, Rat)> = Vec::with_capacity(raw.blocks.len());
        for b in raw.blocks {
            blocks.push((b.set, b.mult.to_rat().map_err(D::Error::custom)?));
        }
        Pbd::new(raw.n, &blocks).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundset::count_four_partitions;
    use crate::picard::{pair_fcurve_masks, picard_rank};
    use crate::rational::int;
    use rand::{Rng, SeedableRng};

    #[test]
    fn fcurve_counts_match_partition_counts() {
        for n in 4..=8 {
            let curves = all_fcurves(n).unwrap();
            assert_eq!(curves.len() as u64, count_four_partitions(n));
        }
    }

    #[test]
    fn fcurve_validation() {
        assert!(FCurve::new(6, &[1], &[2], &[3]).is_ok());
        // overlapping parts
        assert!(FCurve::new(6, &[1, 2], &[2], &[3]).is_err());
        // part mentions n
        assert!(FCurve::new(6, &[1], &[2], &[6]).is_err());
        // empty part
        assert!(FCurve::from_masks(6, 0, 0b100, 0b1000).is_err());
    }

    #[test]
    fn class_pairing_agrees_with_direct_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for n in 4..=7 {
            let f = DivisorClass::from_fn(n, |_| int(rng.gen_range(-5..=5))).unwrap();
            for curve in all_fcurves(n).unwrap() {
                let [x, y, z] = curve.parts();
                let direct = pair_fcurve_masks(&f, x, y, z);
                let via_class = pair_divisor_curve(&f, &curve.class()).unwrap();
                assert_eq!(direct, via_class, "n={n} curve={curve:?}");
            }
        }
    }

    #[test]
    fn fcurve_pbd_roundtrip() {
        for n in 4..=7 {
            for curve in all_fcurves(n).unwrap() {
                let pbd = curve.to_pbd();
                assert_eq!(pbd.class(), curve.class(), "n={n} curve={curve:?}");
                // Index records whether the block containing n is {n} itself.
                let expected =
                    if curve.w_mask() == 1 << n { Rat::one() } else { Rat::zero() };
                assert_eq!(*pbd.index(), expected);
            }
        }
    }

    #[test]
    fn pbd_balance_validation() {
        // All pairs of [4]: balanced with index 1.
        let d = all_pairs_design(5).unwrap();
        assert_eq!(*d.index(), int(1));
        assert_eq!(d.blocks().len(), 6);
        assert!(d.is_effective());
        for i in 1..5 {
            assert_eq!(d.degree(i), int(3));
        }

        // A single proper block is not balanced.
        assert!(Pbd::new(5, &[(vec![1, 2], int(1))]).is_err());
        // Improper blocks are rejected.
        assert!(Pbd::new(5, &[(vec![1], int(1))]).is_err());
        assert!(Pbd::new(5, &[(vec![1, 2, 3, 4], int(1))]).is_err());
        // Duplicate blocks merge; cancelling copies leave the empty design.
        let e = Pbd::new(5, &[(vec![1, 2], int(1)), (vec![1, 2], int(-1))]).unwrap();
        assert!(e.blocks().is_empty());
        assert_eq!(*e.index(), int(0));
    }

    #[test]
    fn block_completion_designs() {
        for n in 5..=7 {
            let sig = groundset::sigma(n).unwrap();
            for s in sig.proper() {
                let d = block_completion_design(n, s.mask()).unwrap();
                assert_eq!(*d.index(), int(1), "n={n} block={s:?}");
                assert!(d.is_effective());
                assert_eq!(d.multiplicity(s.mask()), int(1));
            }
        }
    }

    #[test]
    fn biplane_properties() {
        let b = paley_biplane();
        assert_eq!(b.n(), 12);
        assert_eq!(*b.index(), int(2));
        assert_eq!(b.blocks().len(), 11);
        assert!(b.is_effective());
        for (mask, mult) in b.blocks() {
            assert_eq!(mask.count_ones(), 5);
            assert_eq!(*mult, int(1));
        }
        for i in 1..12 {
            assert_eq!(b.degree(i), int(5));
        }
        let class = b.class();
        // Balanced degrees make every cotangent pairing 5 - 2 = 3, except
        // the distinguished point which sees the index.
        for i in 0..11 {
            assert_eq!(class.psi()[i], int(3));
        }
        assert_eq!(class.psi()[11], int(2));
    }

    #[test]
    fn curves_span_the_dual_space() {
        for n in 4..=6 {
            let sig = groundset::sigma(n).unwrap();
            let rows: Vec<Vec<Rat>> = all_fcurves(n)
                .unwrap()
                .iter()
                .map(|c| {
                    let [x, y, z] = c.parts();
                    sig.subsets()
                        .iter()
                        .map(|s| {
                            let m = s.mask();
                            let mut v = Rat::zero();
                            if m == x || m == y || m == z || m == (x | y | z) {
                                v += Rat::one();
                            }
                            if m == (x | y) || m == (x | z) || m == (y | z) {
                                v -= Rat::one();
                            }
                            v
                        })
                        .collect()
                })
                .collect();
            assert_eq!(crate::picard::rank(rows), picard_rank(n).unwrap());
        }
    }

    #[test]
    fn pbd_json_roundtrip() {
        let b = paley_biplane();
        let text = serde_json::to_string(&b).unwrap();
        let back: Pbd = serde_json::from_str(&text).unwrap();
        assert_eq!(back, b);

        // The wire format is {"set": [...], "mult": int} per block.
        let mut val: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(val["blocks"][0]["set"].is_array());
        assert!(val["blocks"][0]["mult"].is_i64());

        // Tampering with a block breaks balance on the way back in.
        val["blocks"][0]["set"] = serde_json::json!([1, 2]);
        assert!(serde_json::from_value::<Pbd>(val).is_err());
    }
}
