//! The combinatorial ground set.
//!
//! For `n` marked points, a boundary index is a two-part partition of `[n]`;
//! we store the part that does not contain `n`, i.e. a nonempty subset of
//! `[n-1]`. The full index set has `2^(n-1) - 1` elements, the *proper* ones
//! (both parts of size >= 2) are those of size `2..=n-2`. Size-1 subsets and
//! the whole of `[n-1]` stand for the cotangent classes of the markings they
//! single out.

use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

pub const MIN_N: usize = 4;
/// Masks are `u32`, indices `u16`; enough for every scale this crate handles.
pub const MAX_N: usize = 16;
/// Exhaustive orbit enumeration walks all of `S_n`.
pub const MAX_ORBIT_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("n = {0} out of range {MIN_N}..={MAX_N}")]
    BadN(usize),
    #[error("member {member} out of range 1..={max} for n = {n}")]
    BadMember { n: usize, member: usize, max: usize },
    #[error("subsets must be nonempty")]
    Empty,
    #[error("images {0:?} are not a bijection of [n]")]
    NotBijection(Vec<usize>),
    #[error("exhaustive orbit enumeration supports n <= {MAX_ORBIT_N}, got {0}")]
    OrbitTooLarge(usize),
}

/// A nonempty subset of `[n-1]`, standing for the partition `{S, [n] \ S}`.
/// Bit `i` of the mask is membership of `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    n: u8,
    mask: u32,
}

impl Subset {
    pub fn new(n: usize, members: &[usize]) -> Result<Self, GroundError> {
        check_n(n)?;
        let mut mask = 0u32;
        for &m in members {
            if m < 1 || m > n - 1 {
                return Err(GroundError::BadMember { n, member: m, max: n - 1 });
            }
            mask |= 1 << m;
        }
        if mask == 0 {
            return Err(GroundError::Empty);
        }
        Ok(Subset { n: n as u8, mask })
    }

    pub fn from_mask(n: usize, mask: u32) -> Result<Self, GroundError> {
        check_n(n)?;
        if mask == 0 {
            return Err(GroundError::Empty);
        }
        if mask & !mask_all(n) != 0 || mask & 1 != 0 {
            return Err(GroundError::BadMember {
                n,
                member: if mask & 1 != 0 { 0 } else { (31 - mask.leading_zeros()) as usize },
                max: n - 1,
            });
        }
        Ok(Subset { n: n as u8, mask })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.n() - 1 && self.mask & (1 << i) != 0
    }

    pub fn members(&self) -> Vec<usize> {
        (1..self.n()).filter(|&i| self.mask & (1 << i) != 0).collect()
    }

    /// Proper means both parts of the partition have at least two elements,
    /// i.e. `2 <= |S| <= n-2`.
    pub fn is_proper(&self) -> bool {
        let s = self.size();
        s >= 2 && s <= self.n() - 2
    }

    /// The other part of the partition, minus the marking `n`: `[n-1] \ S`.
    /// Empty exactly when `S = [n-1]`.
    pub fn complement_mask(&self) -> u32 {
        mask_all(self.n()) & !self.mask
    }
}

fn check_n(n: usize) -> Result<(), GroundError> {
    if !(MIN_N..=MAX_N).contains(&n) {
        return Err(GroundError::BadN(n));
    }
    Ok(())
}

/// Bits `1..=n-1`.
pub fn mask_all(n: usize) -> u32 {
    ((1u32 << n) - 1) & !1
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, m) in self.members().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

/// Size first, then lexicographic on the ascending member list. For equal
/// sizes the lexicographically smaller set is the one owning the lowest
/// differing bit.
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.n, other.n);
        match self.size().cmp(&other.size()) {
            Ordering::Equal => {
                if self.mask == other.mask {
                    Ordering::Equal
                } else {
                    let low = (self.mask ^ other.mask).trailing_zeros();
                    if self.mask & (1 << low) != 0 {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                }
            }
            ord => ord,
        }
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(self.members())
    }
}

/// All `2^(n-1) - 1` indices in size-then-lex order.
pub fn sigma_elements(n: usize) -> Result<Vec<Subset>, GroundError> {
    check_n(n)?;
    let mut v: Vec<Subset> =
        (1..=mask_all(n)).filter(|m| m & 1 == 0 && *m != 0).map(|m| Subset { n: n as u8, mask: m }).collect();
    v.sort();
    Ok(v)
}

// ---------------------------------------------------------------------------
// Permutations and the action on partition representatives.

/// A permutation of `[n]`, 1-indexed: `img[i-1] = sigma(i)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    img: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { img: (1..=n as u8).collect() }
    }

    pub fn from_images(images: &[usize]) -> Result<Self, GroundError> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in images {
            if v < 1 || v > n || seen[v] {
                return Err(GroundError::NotBijection(images.to_vec()));
            }
            seen[v] = true;
        }
        Ok(Permutation { img: images.iter().map(|&v| v as u8).collect() })
    }

    pub fn n(&self) -> usize {
        self.img.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.img[i - 1] as usize
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n());
        Permutation { img: (1..=self.n()).map(|i| self.img[other.apply(i) - 1]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut img = vec![0u8; self.n()];
        for i in 1..=self.n() {
            img[self.apply(i) - 1] = i as u8;
        }
        Permutation { img }
    }

    /// All of `S_n` in lexicographic order of image tuples (`n <= 8`).
    pub fn all(n: usize) -> Result<Vec<Permutation>, GroundError> {
        if n > MAX_ORBIT_N {
            return Err(GroundError::OrbitTooLarge(n));
        }
        let mut out = Vec::new();
        let mut cur: Vec<u8> = Vec::with_capacity(n);
        let mut used = vec![false; n + 1];
        fn rec(n: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if cur.len() == n {
                out.push(Permutation { img: cur.clone() });
                return;
            }
            for v in 1..=n {
                if !used[v] {
                    used[v] = true;
                    cur.push(v as u8);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        Ok(out)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm{:?}", self.img)
    }
}

/// The action on partition representatives: push the partition `{S, comp}`
/// forward and keep the part not containing `n`.
pub fn act(sigma: &Permutation, s: &Subset) -> Subset {
    debug_assert_eq!(sigma.n(), s.n());
    let n = s.n();
    let mut image = 0u32;
    for i in 1..n {
        if s.mask & (1 << i) != 0 {
            image |= 1 << sigma.apply(i);
        }
    }
    if image & (1 << n) != 0 {
        // The image contains n; represent by the complementary part.
        image = !image & mask_all(n);
    }
    Subset { n: s.n, mask: image }
}

/// Full orbit of `s` under `S_n` (`n <= 8`).
pub fn orbit(s: &Subset) -> Result<BTreeSet<Subset>, GroundError> {
    let perms = Permutation::all(s.n())?;
    Ok(perms.iter().map(|p| act(p, s)).collect())
}

/// Canonical representative (size-then-lex minimum of the orbit) together
/// with the full stabilizer of `s` as a list of permutations; the list
/// generates the stabilizer since it is the stabilizer.
pub fn orbit_canonical(s: &Subset) -> Result<(Subset, Vec<Permutation>), GroundError> {
    let perms = Permutation::all(s.n())?;
    let mut best = *s;
    let mut stab = Vec::new();
    for p in perms {
        let t = act(&p, s);
        if t < best {
            best = t;
        }
        if t == *s {
            stab.push(p);
        }
    }
    Ok((best, stab))
}

// ---------------------------------------------------------------------------
// Integer partitions.

/// All partitions of `n` as nonincreasing part lists, lexicographically
/// descending (`[n]` first).
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let hi = rest.min(max);
        for p in (1..=hi).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

pub fn is_strict(parts: &[u32]) -> bool {
    parts.windows(2).all(|w| w[0] > w[1])
}

/// Partitions of `n` into pairwise distinct parts. Strictness is enforced by
/// capping each next part at one less than the previous.
pub fn strict_partitions(n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let hi = rest.min(max);
        for p in (1..=hi).rev() {
            cur.push(p);
            rec(rest - p, p.saturating_sub(1), cur, out);
            cur.pop();
        }
    }
    rec(n, n, &mut cur, &mut out);
    out
}

/// Largest number of parts over strict partitions of `n`: the maximal `k`
/// with `1 + 2 + ... + k <= n`.
pub fn strict_partition_max_parts(n: u32) -> u32 {
    let mut k = 0u32;
    while (k + 1) * (k + 2) / 2 <= n {
        k += 1;
    }
    k
}

/// `n` admits a strict partition with more than `k` parts iff
/// `n >= (k+1)(k+2)/2` (take `1, 2, ..., k, k+1` and absorb the slack in the
/// largest part).
pub fn has_strict_partition_over(n: u32, k: u32) -> bool {
    n >= (k + 1) * (k + 2) / 2
}

// ---------------------------------------------------------------------------
// Partitions of [n] into four blocks.

/// Visits every partition of `[n]` into four nonempty unordered blocks once.
/// The callback receives the three blocks not containing `n` as masks over
/// bits `1..=n-1`, ordered by smallest element.
pub fn for_each_four_partition<F: FnMut(u32, u32, u32)>(n: usize, mut f: F) {
    // Distribute 1..n-1 over the block of n ("w") and up to three further
    // blocks opened in order of their minimal element.
    fn rec<F: FnMut(u32, u32, u32)>(next: usize, n: usize, blocks: &mut [u32; 3], opened: usize, f: &mut F) {
        if next == n {
            if opened == 3 {
                f(blocks[0], blocks[1], blocks[2]);
            }
            return;
        }
        // Cheap prune: not enough elements left to open the remaining blocks.
        if 3 - opened > n - next {
            return;
        }
        let bit = 1u32 << next;
        // Into w.
        rec(next + 1, n, blocks, opened, f);
        // Into an already-open block.
        for b in 0..opened {
            blocks[b] |= bit;
            rec(next + 1, n, blocks, opened, f);
            blocks[b] &= !bit;
        }
        // Open the next block.
        if opened < 3 {
            blocks[opened] = bit;
            rec(next + 1, n, blocks, opened + 1, f);
            blocks[opened] = 0;
        }
    }
    let mut blocks = [0u32; 3];
    rec(1, n, &mut blocks, 0, &mut f);
}

pub fn count_four_partitions(n: usize) -> u64 {
    let mut c = 0u64;
    for_each_four_partition(n, |_, _, _| c += 1);
    c
}

// ---------------------------------------------------------------------------
// Per-n index tables.

/// Precomputed index structure for one value of `n`: all indices size-lex
/// sorted, plus the proper sublist, with O(1) mask lookups both ways.
pub struct Sigma {
    n: usize,
    subsets: Vec<Subset>,
    index_by_mask: Vec<u16>,
    proper: Vec<Subset>,
    proper_index_by_mask: Vec<u16>,
}

impl Sigma {
    pub fn new(n: usize) -> Result<Self, GroundError> {
        let subsets = sigma_elements(n)?;
        let mut index_by_mask = vec![u16::MAX; 1 << n];
        for (i, s) in subsets.iter().enumerate() {
            index_by_mask[s.mask as usize] = i as u16;
        }
        let proper: Vec<Subset> = subsets.iter().copied().filter(Subset::is_proper).collect();
        let mut proper_index_by_mask = vec![u16::MAX; 1 << n];
        for (i, s) in proper.iter().enumerate() {
            proper_index_by_mask[s.mask as usize] = i as u16;
        }
        Ok(Sigma { n, subsets, index_by_mask, proper, proper_index_by_mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of_mask(&self, mask: u32) -> usize {
        let i = self.index_by_mask[mask as usize];
        debug_assert_ne!(i, u16::MAX, "mask {mask:#b} is not an index");
        i as usize
    }

    pub fn index(&self, s: &Subset) -> usize {
        self.index_of_mask(s.mask)
    }

    /// Proper indices, size-lex sorted; their position is the coordinate used
    /// by the support search.
    pub fn proper(&self) -> &[Subset] {
        &self.proper
    }

    pub fn proper_count(&self) -> usize {
        self.proper.len()
    }

    pub fn proper_index_of_mask(&self, mask: u32) -> Option<usize> {
        match self.proper_index_by_mask[mask as usize] {
            u16::MAX => None,
            i => Some(i as usize),
        }
    }
}

/// Shared per-`n` table; building one is cheap but hot paths look indices up
/// constantly, so they are cached for the process lifetime.
pub fn sigma(n: usize) -> Result<std::sync::Arc<Sigma>, GroundError> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Sigma>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(s) = guard.get(&n) {
        return Ok(s.clone());
    }
    let s = Arc::new(Sigma::new(n)?);
    guard.insert(n, s.clone());
    Ok(s)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u64;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}
