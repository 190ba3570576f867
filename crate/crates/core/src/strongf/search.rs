//! Exhaustive verification over the support lattice.
//!
//! The claim being checked: every support set either is critical or does
//! not support a nonzero effective balanced design.  The search walks the
//! lattice of support sets downward from the full set by depth-first
//! search, one canonical representative per symmetry orbit:
//!
//! * a set that fails the support check prunes its entire down-set
//!   (support of a design is monotone under inclusion),
//! * a supporting set that is critical recurses into the children
//!   `J \ {s}`, one `s` per orbit of the stabilizer of `J`,
//! * a supporting set that is *not* critical is a counterexample; the
//!   search emits a verified witness pair and does not recurse.
//!
//! Certificates are reused downward where soundness allows: a support
//! witness that puts no mass on the removed coordinate still witnesses
//! the child, and a critical combination that pairs nonpositively with
//! the removed coordinate stays critical for the child.  Every
//! certificate that is *not* inherited is produced and self-verified by
//! the solvers in the sibling modules, and a deterministic sample of
//! visited nodes is exposed for independent re-verification by direct
//! solves.
//!
//! Progress is checkpointed as line records `canonical-hex status` so a
//! budgeted run can resume: finished orbits are skipped on restart
//! without consuming budget.  Only finished nodes are recorded, so a
//! checkpoint is always a sound partial transcript no matter where a
//! previous run stopped.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use num::{Signed, Zero};
use serde::Serialize;

use crate::curves::{pair_divisor_curve, Pbd};
use crate::picard::DivisorClass;
use crate::rational::{int, Rat};

use super::critical::{is_critical_with_mask, CriticalCert};
use super::pbdcone::{supports_effective_pbd, SupportCert};
use super::perms::NodeSym;
use super::{min_curve_pairing, StrongFCtx, StrongFError, SupportSet};

/// Resolution of one support-lattice node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeStatus {
    /// Supports no nonzero effective design; down-set pruned.
    Pruned,
    /// Supports a design and is critical; children visited.
    Critical,
    /// Supports a design but is not critical: a counterexample.
    Failed,
}

impl NodeStatus {
    fn to_char(self) -> char {
        match self {
            NodeStatus::Pruned => 'P',
            NodeStatus::Critical => 'C',
            NodeStatus::Failed => 'F',
        }
    }

    fn from_char(c: char) -> Option<NodeStatus> {
        match c {
            'P' => Some(NodeStatus::Pruned),
            'C' => Some(NodeStatus::Critical),
            'F' => Some(NodeStatus::Failed),
            _ => None,
        }
    }
}

/// Options for [`verify_all_supports`].
#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Stop after evaluating this many fresh nodes (resumable via the
    /// checkpoint); `None` runs to completion.
    pub node_budget: Option<u64>,
    /// Checkpoint file, loaded on start and appended to as nodes finish.
    pub checkpoint: Option<PathBuf>,
    /// Records per checkpoint sync.
    pub checkpoint_batch: usize,
    /// Keep every `sample_stride`-th evaluated node (up to 64, rolling)
    /// for external re-verification.
    pub sample_stride: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: None,
            checkpoint: None,
            checkpoint_batch: 10_000,
            sample_stride: 997,
        }
    }
}

/// A verified counterexample: a support set carrying an effective design
/// while failing to be critical.
#[derive(Clone, Debug, Serialize)]
pub struct FailureWitness {
    /// The support set as reached by the search.
    pub support: SupportSet,
    /// Canonical orbit key of the support set.
    #[serde(serialize_with = "ser_hex")]
    pub canonical: u128,
    /// Nonzero effective design supported inside the set.
    pub pbd: Pbd,
    /// Divisor pairing positively with every F-curve; when `strict_pair`
    /// it also pairs strictly negatively with the design class, and
    /// otherwise pairs zero with it (which still separates the design
    /// class from the F-curve cone).
    pub separator: DivisorClass,
    /// Whether the separator was shifted to pair strictly negatively
    /// with the design class.
    pub strict_pair: bool,
}

/// Outcome of a [`verify_all_supports`] run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    /// Fresh nodes evaluated by this run (excludes checkpoint-resumed).
    pub nodes_visited: u64,
    pub pruned: u64,
    pub critical: u64,
    pub failures: Vec<FailureWitness>,
    /// True when the node budget ran out before the lattice was done.
    pub budget_exhausted: bool,
    /// Finished orbits loaded from the checkpoint at start.
    pub resumed: u64,
    /// Deterministic sample of (canonical key, status) for re-checks.
    #[serde(serialize_with = "ser_samples")]
    pub samples: Vec<(u128, NodeStatus)>,
}

impl VerifyReport {
    /// True when the whole lattice was verified with no counterexample.
    pub fn succeeded(&self) -> bool {
        !self.budget_exhausted && self.failures.is_empty()
    }
}

fn ser_hex<S: serde::Serializer>(v: &u128, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&format!("{v:032x}"))
}

fn ser_samples<S: serde::Serializer>(
    samples: &[(u128, NodeStatus)],
    ser: S,
) -> Result<S::Ok, S::Error> {
    let rows: Vec<(String, NodeStatus)> =
        samples.iter().map(|(m, st)| (format!("{m:032x}"), *st)).collect();
    rows.serialize(ser)
}

// ---------------------------------------------------------------------------
// Checkpointing.

struct Checkpoint {
    file: Option<File>,
    pending: usize,
    batch: usize,
}

impl Checkpoint {
    /// Opens (creating if absent) and replays a checkpoint.  A malformed
    /// final line is treated as a torn write and ignored; malformed or
    /// conflicting records anywhere else fail as corruption.
    fn open(
        path: Option<&PathBuf>,
        batch: usize,
    ) -> Result<(Checkpoint, HashMap<u128, NodeStatus>), StrongFError> {
        let mut finished = HashMap::new();
        let Some(path) = path else {
            return Ok((Checkpoint { file: None, pending: 0, batch }, finished));
        };
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let lines: Vec<&str> =
                text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            for (i, line) in lines.iter().enumerate() {
                let parsed = (|| {
                    let (hex, status) = line.split_once(' ')?;
                    let mask = u128::from_str_radix(hex, 16).ok()?;
                    let mut chars = status.chars();
                    let st = NodeStatus::from_char(chars.next()?)?;
                    if chars.next().is_some() {
                        return None;
                    }
                    Some((mask, st))
                })();
                match parsed {
                    Some((mask, st)) => {
                        if let Some(old) = finished.insert(mask, st) {
                            if old != st {
                                return Err(StrongFError::CheckpointCorrupt(format!(
                                    "conflicting records for {mask:032x}"
                                )));
                            }
                        }
                    }
                    None if i + 1 == lines.len() => break, // torn final write
                    None => {
                        return Err(StrongFError::CheckpointCorrupt(format!(
                            "unreadable record: {line:?}"
                        )));
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok((Checkpoint { file: Some(file), pending: 0, batch }, finished))
    }

    fn record(&mut self, mask: u128, status: NodeStatus) -> Result<(), StrongFError> {
        if let Some(f) = self.file.as_mut() {
            writeln!(f, "{mask:032x} {}", status.to_char())?;
            self.pending += 1;
            if self.pending >= self.batch {
                f.sync_data()?;
                self.pending = 0;
            }
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), StrongFError> {
        if let Some(f) = self.file.as_mut() {
            f.flush()?;
            f.sync_data()?;
            self.pending = 0;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The search.

struct Frame {
    raw: u128,
    canonical: u128,
    /// Support witness multiplicities for this node (shared with any
    /// descendant that inherits it).
    witness: Arc<Vec<Rat>>,
    /// Positive-pairing coordinates of this node's critical combination.
    crit_pos: u128,
    children: Vec<u8>,
    next: usize,
}

enum Eval {
    Pruned,
    Critical { witness: Arc<Vec<Rat>>, crit_pos: u128 },
    Failed(Box<FailureWitness>),
}

fn evaluate(
    ctx: &StrongFCtx,
    raw: u128,
    canonical: u128,
    inherit: Option<(&Arc<Vec<Rat>>, u128, usize)>,
) -> Result<Eval, StrongFError> {
    let j = SupportSet::from_bits(ctx.n(), raw)?;

    // Support: inherit the parent witness when it avoids the removed
    // coordinate; otherwise the cheap pair-cover test, then the solver.
    let witness: Arc<Vec<Rat>> = match inherit {
        Some((w, _, s)) if w[s].is_zero() => w.clone(),
        _ => {
            if !ctx.covers_all_pairs(raw) {
                return Ok(Eval::Pruned);
            }
            match supports_effective_pbd(ctx, &j)? {
                SupportCert::Witness(m) => Arc::new(m),
                SupportCert::Farkas(_) => return Ok(Eval::Pruned),
            }
        }
    };

    // Criticality: the parent combination survives when it pairs
    // nonpositively with the removed coordinate.
    if let Some((_, pos, s)) = inherit {
        if pos >> s & 1 == 0 {
            return Ok(Eval::Critical { witness, crit_pos: pos });
        }
    }
    match is_critical_with_mask(ctx, &j)? {
        (CriticalCert::Critical { .. }, crit_pos) => Ok(Eval::Critical { witness, crit_pos }),
        (CriticalCert::NotCritical { lam_eq, lam }, _) => {
            let fw = build_failure(ctx, j, canonical, &witness, &lam_eq, &lam)?;
            Ok(Eval::Failed(Box::new(fw)))
        }
    }
}

/// Assembles and verifies the counterexample pair for a supporting,
/// non-critical node: the witnessed design plus a separating divisor
/// built from the criticality refutation.
fn build_failure(
    ctx: &StrongFCtx,
    j: SupportSet,
    canonical: u128,
    witness: &[Rat],
    lam_eq: &Rat,
    lam: &[(usize, Rat)],
) -> Result<FailureWitness, StrongFError> {
    let n = ctx.n();
    let blocks: Vec<(u32, Rat)> = witness
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_zero())
        .map(|(p, m)| (ctx.sigma().proper()[p].mask(), m.clone()))
        .collect();
    let pbd = Pbd::from_masks(n, blocks)?;
    let x = pbd.class();

    // The refutation multipliers, placed as boundary coefficients on the
    // coordinates outside the support, give a divisor pairing at least
    // `lam_eq > 0` with every F-curve and exactly zero with the design.
    let mut coeff = vec![Rat::zero(); ctx.rho()];
    for (p, l) in lam {
        coeff[*p] = l.clone();
    }
    let sigma = ctx.sigma();
    let separator0 = DivisorClass::from_fn(n, |s| {
        sigma.proper_index_of_mask(s.mask()).map_or_else(Rat::zero, |p| coeff[p].clone())
    })?;
    let floor = min_curve_pairing(&separator0)?;
    if !floor.is_positive() || &floor < lam_eq {
        return Err(StrongFError::Internal("separator lost positivity"));
    }
    if !pair_divisor_curve(&separator0, &x)?.is_zero() {
        return Err(StrongFError::Internal("separator does not annihilate the design"));
    }

    // Shift by the profile that pairs one with every curve to make the
    // pairing with the design strictly negative, whenever the design
    // pairs positively with that profile.
    let ones = DivisorClass::from_fn(n, |_| int(1))?;
    let mu = pair_divisor_curve(&ones, &x)?;
    let (separator, strict_pair) = if mu.is_positive() {
        let t = floor / int(2);
        let shifted =
            DivisorClass::from_fn(n, |s| separator0.value(s) - t.clone() * ones.value(s))?;
        if !super::witness_pair_check(&x, &shifted)? {
            return Err(StrongFError::Internal("shifted separator failed the pair check"));
        }
        (shifted, true)
    } else {
        (separator0, false)
    };
    Ok(FailureWitness { support: j, canonical, pbd, separator, strict_pair })
}

/// Walks the support lattice for ground size `n` and verifies that every
/// orbit is pruned or critical, returning counts, any counterexamples,
/// and a deterministic node sample.  See the module docs for the search
/// discipline and the checkpoint format.
pub fn verify_all_supports(n: usize, opts: &SearchOptions) -> Result<VerifyReport, StrongFError> {
    let ctx = StrongFCtx::new(n)?;
    let perms = ctx.perms();
    let (mut ckpt, mut finished) =
        Checkpoint::open(opts.checkpoint.as_ref(), opts.checkpoint_batch.max(1))?;
    let mut report = VerifyReport {
        n,
        nodes_visited: 0,
        pruned: 0,
        critical: 0,
        failures: Vec::new(),
        budget_exhausted: false,
        resumed: finished.len() as u64,
        samples: Vec::new(),
    };
    let budget = opts.node_budget.unwrap_or(u64::MAX);
    let stride = opts.sample_stride.max(1);

    let mut stack: Vec<Frame> = Vec::new();
    let root_raw = ctx.full_mask();
    let root_sym: NodeSym = perms.analyze(root_raw);
    if !finished.contains_key(&root_sym.canonical) {
        report.nodes_visited += 1;
        match evaluate(&ctx, root_raw, root_sym.canonical, None)? {
            Eval::Pruned => {
                report.pruned += 1;
                finished.insert(root_sym.canonical, NodeStatus::Pruned);
                ckpt.record(root_sym.canonical, NodeStatus::Pruned)?;
            }
            Eval::Failed(fw) => {
                report.failures.push(*fw);
                finished.insert(root_sym.canonical, NodeStatus::Failed);
                ckpt.record(root_sym.canonical, NodeStatus::Failed)?;
            }
            Eval::Critical { witness, crit_pos } => {
                report.critical += 1;
                let children = perms.child_reps(root_raw, &root_sym);
                stack.push(Frame {
                    raw: root_raw,
                    canonical: root_sym.canonical,
                    witness,
                    crit_pos,
                    children,
                    next: 0,
                });
            }
        }
    }

    while let Some(top) = stack.last_mut() {
        if top.next >= top.children.len() {
            // Every child orbit finished: the subtree is done.
            finished.insert(top.canonical, NodeStatus::Critical);
            ckpt.record(top.canonical, NodeStatus::Critical)?;
            stack.pop();
            continue;
        }
        let s = top.children[top.next] as usize;
        top.next += 1;
        let child_raw = top.raw & !(1u128 << s);
        let parent_witness = top.witness.clone();
        let parent_pos = top.crit_pos;

        let child_sym = perms.analyze(child_raw);
        let canonical = child_sym.canonical;
        if finished.contains_key(&canonical) {
            continue;
        }
        if report.nodes_visited >= budget {
            // Out of budget: leave in-progress ancestors unrecorded (they
            // are re-derived cheaply on resume) and stop cleanly.
            report.budget_exhausted = true;
            break;
        }
        report.nodes_visited += 1;
        let eval = evaluate(&ctx, child_raw, canonical, Some((&parent_witness, parent_pos, s)))?;
        let status = match eval {
            Eval::Pruned => {
                report.pruned += 1;
                finished.insert(canonical, NodeStatus::Pruned);
                ckpt.record(canonical, NodeStatus::Pruned)?;
                NodeStatus::Pruned
            }
            Eval::Failed(fw) => {
                report.failures.push(*fw);
                finished.insert(canonical, NodeStatus::Failed);
                ckpt.record(canonical, NodeStatus::Failed)?;
                NodeStatus::Failed
            }
            Eval::Critical { witness, crit_pos } => {
                report.critical += 1;
                let children = perms.child_reps(child_raw, &child_sym);
                stack.push(Frame { raw: child_raw, canonical, witness, crit_pos, children, next: 0 });
                NodeStatus::Critical
            }
        };
        if report.nodes_visited % stride == 0 {
            let slot = ((report.nodes_visited / stride - 1) % 64) as usize;
            if slot < report.samples.len() {
                report.samples[slot] = (canonical, status);
            } else {
                report.samples.push((canonical, status));
            }
        }
    }

    ckpt.flush()?;
    Ok(report)
}
