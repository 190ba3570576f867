//! Lifting integer F-nef divisors to bracket-nonnegative functions on a
//! cyclic group.
//!
//! With one prime per marked point except the last, the weight vector
//! assembled by the Chinese remainder theorem sends a subset of points to
//! the sum of its weights in `Z_N`, and sends disjoint subsets to elements
//! with disjoint prime supports. Pulling a symmetric function `g` on `Z_N`
//! back along this map produces a divisor whose F-curve pairings are
//! brackets of `g`; conversely every integer F-nef divisor is corrected by
//! a multiple of the [`Supertotal`] into a function that is
//! bracket-nonnegative on the whole group while keeping the same class.

use crate::fnef::{CyclicFn, FnefError, Supertotal};
use crate::groundset::{self, GroundError};
use crate::picard::{self, DivisorClass, PicardError};
use crate::rational::{as_i64, int};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error(transparent)]
    Fnef(#[from] FnefError),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error("need at least three primes (marked points minus one)")]
    TooFewPrimes,
    #[error("divisor coefficient {0} is not an integer")]
    NonInteger(String),
    #[error("divisor is not F-nef; violated on parts {0:?}")]
    NotFnef([u32; 3]),
    #[error("negative multiplier {0}")]
    NegativeMultiplier(i64),
    #[error("modulus {0} too large for an exhaustive scan")]
    ScanTooLarge(i64),
    #[error("bracket {bracket} at ({x}, {y}, {z}) cannot be repaired by any multiplier")]
    Unrepairable { x: i64, y: i64, z: i64, bracket: i64 },
}

/// The first `r` primes.
pub fn first_primes(r: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(r);
    let mut p = 2;
    while out.len() < r {
        if (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            out.push(p);
        }
        p += 1;
    }
    out
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    // Extended Euclid; gcd(a, m) = 1 is guaranteed by the callers.
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m)
}

/// Weights for `n` marked points over `N = p_1 ... p_{n-1}`: weight `i < n`
/// is 1 modulo its own prime and 0 modulo the others, and the last weight
/// is `N - 1`, so the weights of all `n` points sum to a multiple of `N`.
#[derive(Clone, Debug)]
pub struct CrtWeights {
    primes: Vec<i64>,
    n: usize,
    modulus: i64,
    weights: Vec<i64>,
    total: i64,
}

impl CrtWeights {
    pub fn new(primes: &[i64]) -> Result<Self, LiftError> {
        if primes.len() < 3 {
            return Err(LiftError::TooFewPrimes);
        }
        let n = primes.len() + 1;
        if n > groundset::MAX_N {
            return Err(GroundError::BadN(n).into());
        }
        // Validation (primality, distinctness, overflow) is shared with the
        // supertotal construction.
        let st = Supertotal::new(primes)?;
        let sorted = st.primes().to_vec();
        let modulus = st.modulus();
        let mut weights = Vec::with_capacity(n);
        for &p in &sorted {
            let q = modulus / p;
            weights.push(q * mod_inverse(q % p, p) % modulus);
        }
        weights.push(modulus - 1);
        let total = weights.iter().sum();
        Ok(CrtWeights { primes: sorted, n, modulus, weights, total })
    }

    /// Weights built from the first `n - 1` primes.
    pub fn for_n(n: usize) -> Result<Self, LiftError> {
        if n < groundset::MIN_N {
            return Err(GroundError::BadN(n).into());
        }
        CrtWeights::new(&first_primes(n - 1))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn primes(&self) -> &[i64] {
        &self.primes
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// Weights of the points `1, ..., n` in order.
    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// Sum of all `n` weights; always a multiple of the modulus.
    pub fn total(&self) -> i64 {
        self.total
    }

    /// Weight sum of a subset of `[n-1]`, reduced modulo `N`.
    pub fn subset_sum(&self, mask: u32) -> i64 {
        debug_assert_eq!(mask & !groundset::mask_all(self.n), 0);
        let mut total = 0;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            total = (total + self.weights[i - 1]) % self.modulus;
            rest &= rest - 1;
        }
        total
    }
}

/// An integer F-nef divisor together with the data of its cyclic lift
/// `g = g_0 + c T`, where `g_0` places the divisor coefficients on the
/// signed weight sums and `T` is the supertotal correction.
#[derive(Clone, Debug)]
pub struct Lift {
    weights: CrtWeights,
    st: Supertotal,
    values: Vec<i64>,
    c: i64,
}

impl Lift {
    pub fn n(&self) -> usize {
        self.weights.n
    }

    pub fn weights(&self) -> &CrtWeights {
        &self.weights
    }

    pub fn supertotal(&self) -> &Supertotal {
        &self.st
    }

    pub fn multiplier(&self) -> i64 {
        self.c
    }

    /// The base function: the divisor coefficient of `S` at `x = ±A(S)`,
    /// zero elsewhere. Well defined because the weight sum determines the
    /// subset through its prime support.
    pub fn base_value(&self, x: i64) -> i64 {
        let modulus = self.weights.modulus;
        let x = x.rem_euclid(modulus);
        if x == 0 {
            return 0;
        }
        let mask = self.st.support_mask(x) << 1;
        let a = self.weights.subset_sum(mask);
        if x == a || x == (modulus - a) % modulus {
            let sig = groundset::sigma(self.n()).expect("validated n");
            self.values[sig.index_of_mask(mask)]
        } else {
            0
        }
    }

    /// The lifted function `g(x) = g_0(x) + c T(x)`.
    pub fn g_value(&self, x: i64) -> i64 {
        self.base_value(x) + self.c * self.st.value(x)
    }

    /// The divisor pulled back from the lift: `S -> g(A(S))`.
    pub fn pullback(&self) -> DivisorClass {
        DivisorClass::from_fn(self.n(), |s| int(self.g_value(self.weights.subset_sum(s.mask()))))
            .expect("validated n")
    }

    /// Materializes `g` as a table on `Z_N` for exhaustive scans.
    pub fn as_cyclic_fn(&self) -> Result<CyclicFn, FnefError> {
        CyclicFn::from_fn(self.weights.modulus, |x| self.g_value(x))
    }
}

fn integer_values(f: &DivisorClass) -> Result<Vec<i64>, LiftError> {
    f.coeffs()
        .iter()
        .map(|v| as_i64(v).ok_or_else(|| LiftError::NonInteger(crate::rational::format_rat(v))))
        .collect()
}

/// Lifts an integer F-nef divisor with the default multiplier
/// `c = 2 max |f|`, which dominates every bracket the base function can
/// reach on triples the supertotal improves.
pub fn lift(f: &DivisorClass) -> Result<Lift, LiftError> {
    let values = integer_values(f)?;
    let c = 2 * values.iter().map(|v| v.abs()).max().unwrap_or(0);
    lift_with_multiplier(f, c)
}

/// Lifts with an explicit multiplier; the divisor must still be F-nef.
pub fn lift_with_multiplier(f: &DivisorClass, c: i64) -> Result<Lift, LiftError> {
    if c < 0 {
        return Err(LiftError::NegativeMultiplier(c));
    }
    let values = integer_values(f)?;
    if let Some((x, y, z)) = picard::first_fnef_violation(f) {
        return Err(LiftError::NotFnef([x, y, z]));
    }
    let weights = CrtWeights::for_n(f.n())?;
    let st = Supertotal::new(weights.primes())?;
    Ok(Lift { weights, st, values, c })
}

/// The divisor pulled back from the supertotal alone: `S -> T(A(S))`.
/// Its class is zero because the supertotal bracket vanishes on every
/// triple of pairwise disjointly supported elements.
pub fn supertotal_divisor(n: usize) -> Result<DivisorClass, LiftError> {
    let weights = CrtWeights::for_n(n)?;
    let st = Supertotal::new(weights.primes())?;
    Ok(DivisorClass::from_fn(n, |s| int(st.value(weights.subset_sum(s.mask()))))?)
}

/// Outcome of the structured verification of one lift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftReport {
    /// Every F-curve pairing of the original divisor is nonnegative.
    pub fnef: bool,
    /// The pullback of the lift has the same class as the divisor.
    pub class_match: bool,
    /// On every F-curve, the bracket of `g` at the three weight sums
    /// equals the pairing of the divisor with the curve.
    pub curve_identities: bool,
    /// The supertotal bracket vanishes on every F-curve image.
    pub st_vanishing: bool,
    /// `4c >= 7 max |f|`, covering all triples the supertotal improves.
    pub dominated: bool,
}

impl LiftReport {
    pub fn all_ok(&self) -> bool {
        self.fnef && self.class_match && self.curve_identities && self.st_vanishing && self.dominated
    }
}

/// Structured verification: exhaustive per-F-curve identities plus the
/// domination inequality. Together with the supertotal characterization
/// these imply the lift is bracket-nonnegative on the entire group.
pub fn verify_lift(f: &DivisorClass, l: &Lift) -> Result<LiftReport, LiftError> {
    let values = integer_values(f)?;
    let pb = l.pullback();
    let class_match = picard::classes_equal(f, &pb)?;
    let mut fnef = true;
    let mut curve_identities = true;
    let mut st_vanishing = true;
    groundset::for_each_four_partition(f.n(), |x, y, z| {
        let pairing = picard::pair_fcurve_masks(f, x, y, z);
        if pairing < int(0) {
            fnef = false;
        }
        let (ax, ay, az) =
            (l.weights.subset_sum(x), l.weights.subset_sum(y), l.weights.subset_sum(z));
        let bracket_g = {
            let m = l.weights.modulus;
            l.g_value(ax) + l.g_value(ay) + l.g_value(az) + l.g_value((ax + ay + az) % m)
                - l.g_value((ax + ay) % m)
                - l.g_value((ax + az) % m)
                - l.g_value((ay + az) % m)
        };
        if int(bracket_g) != pairing {
            curve_identities = false;
        }
        if l.st.bracket(ax, ay, az) != 0 {
            st_vanishing = false;
        }
    });
    let max_abs = values.iter().map(|v| v.abs()).max().unwrap_or(0);
    let dominated = 4 * l.c >= 7 * max_abs;
    Ok(LiftReport { fnef, class_match, curve_identities, st_vanishing, dominated })
}

/// Largest modulus accepted by the exhaustive multiplier scan.
pub const MAX_SCAN_MODULUS: i64 = 1 << 10;

/// The least multiplier making the lift bracket-nonnegative, found by
/// scanning all triples: on triples the supertotal leaves fixed the base
/// bracket must already be nonnegative, and elsewhere the deficit is
/// divided by the supertotal bracket. O(N^3).
pub fn minimal_multiplier(f: &DivisorClass) -> Result<i64, LiftError> {
    let l = lift_with_multiplier(f, 0)?;
    let n = l.weights.modulus;
    if n > MAX_SCAN_MODULUS {
        return Err(LiftError::ScanTooLarge(n));
    }
    let base: Vec<i64> = (0..n).map(|x| l.base_value(x)).collect();
    let stv: Vec<i64> = (0..n).map(|x| l.st.value(x)).collect();
    let bracket = |t: &[i64], x: i64, y: i64, z: i64| {
        t[x as usize] + t[y as usize] + t[z as usize] + t[((x + y + z) % n) as usize]
            - t[((x + y) % n) as usize]
            - t[((x + z) % n) as usize]
            - t[((y + z) % n) as usize]
    };
    let mut c = 0;
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                let b0 = bracket(&base, x, y, z);
                if b0 >= 0 {
                    continue;
                }
                let bst = bracket(&stv, x, y, z);
                if bst == 0 {
                    return Err(LiftError::Unrepairable { x, y, z, bracket: b0 });
                }
                c = c.max((-b0 + bst - 1) / bst);
            }
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnef::is_bracket_nonneg;
    use crate::groundset::Subset;
    use crate::picard::classes_equal;
    use crate::rational::rat;

    #[test]
    fn weight_examples() {
        let w = CrtWeights::new(&[2, 3, 5]).unwrap();
        assert_eq!(w.weights(), &[15, 10, 6, 29]);
        assert_eq!(w.modulus(), 30);
        assert_eq!(w.total(), 60);

        let w = CrtWeights::for_n(5).unwrap();
        assert_eq!(w.primes(), &[2, 3, 5, 7]);
        assert_eq!(w.weights(), &[105, 70, 126, 120, 209]);
        assert_eq!(w.modulus(), 210);
        assert_eq!(w.total(), 630);
    }

    #[test]
    fn weight_sums_have_matching_supports() {
        for n in 4..=6 {
            let w = CrtWeights::for_n(n).unwrap();
            let st = Supertotal::new(w.primes()).unwrap();
            let mut seen = std::collections::HashSet::new();
            for mask in 1..=groundset::mask_all(n) {
                if mask & 1 != 0 {
                    continue;
                }
                let a = w.subset_sum(mask);
                assert_eq!(st.support_mask(a) << 1, mask, "n={n} mask={mask:#b}");
                assert!(seen.insert(a), "weight sums must be distinct");
            }
        }
    }

    #[test]
    fn supertotal_pullback_is_class_zero() {
        for n in 4..=5 {
            let d = supertotal_divisor(n).unwrap();
            let zero = DivisorClass::zero(n).unwrap();
            assert!(classes_equal(&d, &zero).unwrap(), "n={n}");
            // Equivalent statement: every F-curve pairing vanishes.
            groundset::for_each_four_partition(n, |x, y, z| {
                assert_eq!(picard::pair_fcurve_masks(&d, x, y, z), int(0));
            });
        }
    }

    #[test]
    fn lift_of_constant_divisor() {
        // The all-ones divisor pairs to 1 with every F-curve.
        for n in 4..=5 {
            let f = DivisorClass::from_fn(n, |_| int(1)).unwrap();
            let l = lift(&f).unwrap();
            assert_eq!(l.multiplier(), 2);
            let report = verify_lift(&f, &l).unwrap();
            assert!(report.all_ok(), "n={n} report={report:?}");
        }
        // Exhaustive nonnegativity over the full group for n = 4.
        let f = DivisorClass::from_fn(4, |_| int(1)).unwrap();
        let g = lift(&f).unwrap().as_cyclic_fn().unwrap();
        assert!(is_bracket_nonneg(&g));
    }

    #[test]
    fn lift_rejections() {
        let n = 5;
        let half = DivisorClass::from_fn(n, |_| rat(1, 2)).unwrap();
        assert!(matches!(lift(&half), Err(LiftError::NonInteger(_))));

        // Minus a cotangent class is not F-nef.
        let s1 = Subset::new(n, &[1]).unwrap();
        let neg_psi = DivisorClass::indicator(n, &s1).unwrap().scale(&int(-1));
        assert!(matches!(lift(&neg_psi), Err(LiftError::NotFnef(_))));

        let ones = DivisorClass::from_fn(n, |_| int(1)).unwrap();
        assert!(matches!(
            lift_with_multiplier(&ones, -1),
            Err(LiftError::NegativeMultiplier(-1))
        ));
    }

    #[test]
    fn minimal_multiplier_is_tight() {
        let f = DivisorClass::from_fn(4, |_| int(1)).unwrap();
        let c = minimal_multiplier(&f).unwrap();
        assert!(c <= 2, "minimal multiplier never beats the default");
        let g = lift_with_multiplier(&f, c).unwrap().as_cyclic_fn().unwrap();
        assert!(is_bracket_nonneg(&g));
        if c > 0 {
            let worse = lift_with_multiplier(&f, c - 1).unwrap().as_cyclic_fn().unwrap();
            assert!(!is_bracket_nonneg(&worse));
        }
    }
}
