//! Independent oracles that certify a constructed code: a span-rank oracle
//! and a run-the-decoder oracle for the minimum distance, the worst-case
//! erasure-pattern generator behind the optimality proof, and algebraic
//! sweeps of the bound identities.
//!
//! Both distance oracles are exhaustive within a hard combinatorial budget
//! and refuse larger instances with [`Error::TooLarge`]; sampled probing is
//! a separate, clearly labeled mode. Erasure decodability is monotone
//! (removing an erasure only adds observations), so each oracle pins the
//! smallest failing pattern size `f` by checking that some size-`f` pattern
//! fails and every size-`f-1` pattern succeeds; sizes below need no
//! enumeration.

use itertools::Itertools;
use rayon::iter::{ParallelBridge, ParallelIterator};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::{FieldElem, FqSpan};
use crate::lrc::{CodeParams, Codeword, ErasurePattern, LrcCode};
use crate::lrc::{dmin_bound, dmin_delta2_bound, dmin_scalar_bound, derive_params};

/// Default cap on per-size pattern enumeration.
pub const DEFAULT_PATTERN_BUDGET: u64 = 10_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

fn check_budget(n: usize, k: usize, budget: u64) -> Result<()> {
    if binomial(n, k) > budget as u128 {
        return Err(Error::TooLarge { n, k, budget });
    }
    Ok(())
}

/// Dependency-free deterministic filler for oracle test files.
fn xorshift_file(code: &LrcCode, seed: u64) -> Vec<FieldElem> {
    let ext = code.ext();
    let q = ext.base().q() as u64;
    let mut state = seed | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    (0..code.params().file_symbols)
        .map(|_| {
            let coeffs: Vec<u16> = (0..ext.degree()).map(|_| (next() % q) as u16).collect();
            ext.elem_from_coeffs(&coeffs).expect("coords below q")
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Parameter decomposition (the rank-erasure budget identity)
// ---------------------------------------------------------------------------

/// The integer decomposition `N = alpha(alpha0 r + beta0)`,
/// `M = alpha(alpha1 r + beta1) + gamma1` behind the worst-case accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDecomposition {
    pub alpha0: usize,
    pub beta0: usize,
    pub alpha1: usize,
    pub beta1: usize,
    pub gamma1: usize,
}

pub fn decompose(params: &CodeParams) -> ParamDecomposition {
    let data_total = params.total_data_nodes();
    let t = params.file_symbols / params.alpha;
    ParamDecomposition {
        alpha0: data_total / params.r,
        beta0: data_total % params.r,
        alpha1: t / params.r,
        beta1: t % params.r,
        gamma1: params.file_symbols % params.alpha,
    }
}

impl ParamDecomposition {
    /// Reassembled `N`.
    pub fn code_len(&self, params: &CodeParams) -> usize {
        params.alpha * (self.alpha0 * params.r + self.beta0)
    }

    /// Reassembled `M`.
    pub fn file_symbols(&self, params: &CodeParams) -> usize {
        params.alpha * (self.alpha1 * params.r + self.beta1) + self.gamma1
    }

    /// `D - 1 = r*alpha(alpha0-alpha1) + alpha(beta0-beta1) - gamma1`.
    pub fn rank_erasure_budget(&self, params: &CodeParams) -> i64 {
        let r = params.r as i64;
        let alpha = params.alpha as i64;
        r * alpha * (self.alpha0 as i64 - self.alpha1 as i64)
            + alpha * (self.beta0 as i64 - self.beta1 as i64)
            - self.gamma1 as i64
    }
}

// ---------------------------------------------------------------------------
// Rank-erasure accounting
// ---------------------------------------------------------------------------

/// Realized rank-erasure count of a pattern: `N` minus the `F_q`-span of
/// the surviving evaluation points.
pub fn node_to_rank_erasures(code: &LrcCode, pattern: &ErasurePattern) -> usize {
    let p = code.params();
    let mut span = FqSpan::new(code.ext());
    for node in 0..p.n {
        if pattern.contains(node) {
            continue;
        }
        for t in 0..p.alpha {
            span.insert(&code.eval_point_of(node, t));
        }
    }
    p.gab_len - span.dim()
}

/// Per-group accounting of the same quantity: a group with `e >= delta-1`
/// erasures loses `(e - (delta-1)) * alpha` dimensions, capped at its data
/// span; fewer erasures lose nothing.
pub fn rank_erasure_formula(params: &CodeParams, pattern: &ErasurePattern) -> usize {
    pattern
        .per_group_counts(params)
        .iter()
        .zip(&params.groups)
        .map(|(&e, g)| {
            let beyond = e.saturating_sub(params.delta - 1);
            beyond.min(g.data_nodes) * params.alpha
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Distance oracles
// ---------------------------------------------------------------------------

/// True when the surviving points of `pattern` span at least `M` dims.
fn pattern_spans_file(code: &LrcCode, pattern: &ErasurePattern) -> bool {
    let p = code.params();
    let mut span = FqSpan::new(code.ext());
    for node in 0..p.n {
        if pattern.contains(node) {
            continue;
        }
        for t in 0..p.alpha {
            if span.insert(&code.eval_point_of(node, t)) && span.dim() >= p.file_symbols {
                return true;
            }
        }
    }
    false
}

fn pattern_decodes(code: &LrcCode, cw: &Codeword, file: &[FieldElem], pattern: &ErasurePattern) -> bool {
    match code.reconstruct(&cw.surviving(pattern)) {
        Ok(got) => got == file,
        Err(_) => false,
    }
}

/// Patterns of a given size concentrated in as few groups as possible: the
/// worst-case shape, tried before full enumeration so failing levels exit
/// early.
fn concentrated_candidates(params: &CodeParams, size: usize) -> Vec<ErasurePattern> {
    let g = params.group_count();
    let mut orders: Vec<Vec<usize>> = vec![
        (0..g).collect(),
        (0..g).rev().collect(),
    ];
    let mut by_size: Vec<usize> = (0..g).collect();
    by_size.sort_by_key(|&gi| params.groups[gi].size());
    orders.push(by_size.clone());
    by_size.reverse();
    orders.push(by_size);

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for order in orders {
        let mut erased = Vec::new();
        let mut remaining = size;
        for gi in order {
            if remaining == 0 {
                break;
            }
            let range = params.node_range(gi);
            let take = remaining.min(range.len());
            erased.extend(range.take(take));
            remaining -= take;
        }
        if remaining > 0 {
            continue;
        }
        erased.sort_unstable();
        if seen.insert(erased.clone()) {
            out.push(ErasurePattern::new(erased));
        }
    }
    out
}

/// Does any erasure pattern of exactly `size` nodes defeat `check`?
/// `check(pattern) == true` means the pattern is survivable.
fn any_pattern_fails<F>(code: &LrcCode, size: usize, budget: u64, parallel: bool, check: F) -> Result<bool>
where
    F: Fn(&ErasurePattern) -> bool + Sync,
{
    let n = code.params().n;
    check_budget(n, size, budget)?;
    for cand in concentrated_candidates(code.params(), size) {
        if !check(&cand) {
            return Ok(true);
        }
    }
    let combos = (0..n).combinations(size);
    let found = if parallel {
        combos
            .par_bridge()
            .any(|nodes| !check(&ErasurePattern::new(nodes)))
    } else {
        combos.into_iter().any(|nodes| !check(&ErasurePattern::new(nodes)))
    };
    Ok(found)
}

/// Smallest pattern size at which `check` fails somewhere; starts at the
/// caller's guess and settles by monotonicity.
fn smallest_failing_size<F>(code: &LrcCode, guess: usize, budget: u64, parallel: bool, check: F) -> Result<usize>
where
    F: Fn(&ErasurePattern) -> bool + Sync,
{
    let n = code.params().n;
    let mut d = guess.clamp(1, n);
    while !any_pattern_fails(code, d, budget, parallel, &check)? {
        d += 1;
        assert!(d <= n, "erasing all nodes must defeat any check");
    }
    while d > 1 && any_pattern_fails(code, d - 1, budget, parallel, &check)? {
        d -= 1;
    }
    Ok(d)
}

/// Minimum distance by the algebraic route: the smallest erasure count
/// whose surviving evaluation points no longer span `M` dimensions.
pub fn algebraic_dmin(code: &LrcCode, budget: u64) -> Result<usize> {
    smallest_failing_size(code, code.params().dmin, budget, false, |pat| {
        pattern_spans_file(code, pat)
    })
}

/// Minimum distance by the operational route: the smallest erasure count
/// at which the actual decoder fails to return the encoded file.
pub fn operational_dmin(code: &LrcCode, budget: u64) -> Result<usize> {
    let file = xorshift_file(code, 0xC0DE_C0DE);
    let cw = code.encode(&file)?;
    smallest_failing_size(code, code.params().dmin, budget, true, |pat| {
        pattern_decodes(code, &cw, &file, pat)
    })
}

/// Joint report of both oracles against the bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DminReport {
    pub bound: usize,
    pub operational_dmin: usize,
    pub algebraic_dmin: usize,
    /// Decoder tightness: the two oracles agree.
    pub agree: bool,
    /// True when the oracle values equal the bound.
    pub achieves_bound: bool,
}

pub fn dmin_report(code: &LrcCode, budget: u64) -> Result<DminReport> {
    let algebraic = algebraic_dmin(code, budget)?;
    let operational = operational_dmin(code, budget)?;
    let bound = code.params().dmin;
    Ok(DminReport {
        bound,
        operational_dmin: operational,
        algebraic_dmin: algebraic,
        agree: operational == algebraic,
        achieves_bound: operational == bound && algebraic == bound,
    })
}

/// Sampled, non-exhaustive check for desk-scale-exceeding instances.
/// Clearly labeled: `exhaustive` is always false.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub bound: usize,
    pub samples_per_size: u64,
    pub survivals_below_bound: u64,
    pub failure_found_at_bound: bool,
    pub exhaustive: bool,
}

/// Random-sampling probe: draws patterns of size `bound - 1` (all must
/// survive) and size `bound` (hunting one failure, concentrated candidates
/// first). Never a substitute for the exhaustive oracles.
pub fn probe_dmin(code: &LrcCode, samples_per_size: u64, seed: u64) -> Result<ProbeReport> {
    let p = code.params();
    let bound = p.dmin;
    let file = xorshift_file(code, seed ^ 0x9E37_79B9);
    let cw = code.encode(&file)?;

    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let sample_pattern = |size: usize, nextf: &mut dyn FnMut() -> u64| {
        let mut nodes = BTreeSet::new();
        while nodes.len() < size {
            nodes.insert((nextf() % p.n as u64) as usize);
        }
        ErasurePattern::new(nodes)
    };

    let mut survivals = 0;
    if bound >= 2 {
        for _ in 0..samples_per_size {
            let pat = sample_pattern(bound - 1, &mut next);
            if !pattern_decodes(code, &cw, &file, &pat) {
                return Ok(ProbeReport {
                    bound,
                    samples_per_size,
                    survivals_below_bound: survivals,
                    failure_found_at_bound: false,
                    exhaustive: false,
                });
            }
            survivals += 1;
        }
    }

    let mut failure = concentrated_candidates(p, bound)
        .iter()
        .any(|pat| !pattern_decodes(code, &cw, &file, pat));
    if !failure {
        for _ in 0..samples_per_size {
            let pat = sample_pattern(bound, &mut next);
            if !pattern_decodes(code, &cw, &file, &pat) {
                failure = true;
                break;
            }
        }
    }
    Ok(ProbeReport {
        bound,
        samples_per_size,
        survivals_below_bound: survivals,
        failure_found_at_bound: failure,
        exhaustive: false,
    })
}

// ---------------------------------------------------------------------------
// Worst-case pattern generator
// ---------------------------------------------------------------------------

/// One pattern from the optimality proof: `pattern` has size `dmin - 1`,
/// costs at most `D - 1` rank erasures, and extending it by
/// `failing_extension` (one more node in its partially-erased group)
/// defeats reconstruction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstCasePattern {
    pub pattern: ErasurePattern,
    pub failing_extension: usize,
    pub subcase: String,
}

/// Emits the worst-case erasure patterns of the applicable proof subcase.
///
/// Requires a certified parameter set; the patterns distinguish the six
/// subcases of the accounting by `(beta0, beta1, gamma1)`.
pub fn worst_case_patterns(params: &CodeParams) -> Result<Vec<WorstCasePattern>> {
    if !params.certified {
        return Err(Error::ConditionsNotMet(
            "worst-case accounting applies only to certified parameter sets".into(),
        ));
    }
    let d = decompose(params);
    let full_groups = d.alpha0;

    // whole groups first, then a partial erasure in `partial_group`
    let build = |wholes: &[usize], partial_group: usize, partial: usize, subcase: &str| {
        let mut erased: Vec<usize> = Vec::new();
        for &gi in wholes {
            erased.extend(params.node_range(gi));
        }
        let range = params.node_range(partial_group);
        assert!(
            partial < range.len(),
            "partial erasure must leave a node free in the group"
        );
        erased.extend(range.clone().take(partial));
        let failing_extension = range.start + partial;
        let pattern = ErasurePattern::new(erased);
        assert_eq!(
            pattern.len(),
            params.dmin - 1,
            "worst-case pattern size must be dmin - 1 ({subcase})"
        );
        WorstCasePattern {
            pattern,
            failing_extension,
            subcase: subcase.to_string(),
        }
    };

    let delta = params.delta;
    let mut out = Vec::new();
    if d.beta0 == 0 {
        if d.gamma1 == 0 && d.beta1 == 0 {
            let w = d.alpha0 - d.alpha1;
            let wholes: Vec<usize> = (0..w).collect();
            out.push(build(&wholes, w, delta - 1, "1a: whole groups + delta-1"));
        } else if d.gamma1 == 0 {
            let w = d.alpha0 - d.alpha1 - 1;
            let wholes: Vec<usize> = (0..w).collect();
            out.push(build(
                &wholes,
                w,
                params.r - d.beta1 + delta - 1,
                "1b: whole groups + (r - beta1 + delta - 1)",
            ));
        } else {
            let w = d.alpha0 - d.alpha1 - 1;
            let wholes: Vec<usize> = (0..w).collect();
            out.push(build(
                &wholes,
                w,
                params.r - d.beta1 - 1 + delta - 1,
                "1c: whole groups + (r - beta1 - 1 + delta - 1)",
            ));
        }
    } else {
        // remainder group present: it is the last group, index full_groups
        let rem = full_groups;
        let reduction = if d.gamma1 == 0 { 0 } else { 1 };
        let tag = if d.gamma1 == 0 { "2a" } else { "2b" };
        let w = d.alpha0 - d.alpha1;
        let partial = d.beta0 - d.beta1 - reduction + delta - 1;

        // variant: partial erasures land in one more full group
        if w < full_groups {
            let wholes: Vec<usize> = (0..w).collect();
            out.push(build(
                &wholes,
                w,
                partial,
                &format!("{tag}: whole full groups + partial full group"),
            ));
        }
        // variant: partial erasures land in the remainder group
        {
            let wholes: Vec<usize> = (0..w).collect();
            out.push(build(
                &wholes,
                rem,
                partial,
                &format!("{tag}: whole full groups + partial remainder group"),
            ));
        }
        // variant: the remainder group fully erased, partial in a full group
        if w >= 1 {
            let mut wholes: Vec<usize> = (0..w - 1).collect();
            wholes.push(rem);
            out.push(build(
                &wholes,
                w - 1,
                params.r - d.beta1 - reduction + delta - 1,
                &format!("{tag}: whole remainder group + partial full group"),
            ));
        }
    }
    Ok(out)
}

/// Checked outcome of one emitted worst-case pattern against a live code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorstCaseOutcome {
    pub subcase: String,
    pub size: usize,
    pub rank_erasures: usize,
    /// `D - 1`, the correctable budget.
    pub budget: usize,
    pub decodes: bool,
    pub extension_fails: bool,
}

impl WorstCaseOutcome {
    pub fn valid(&self, dmin: usize) -> bool {
        self.size == dmin - 1
            && self.rank_erasures <= self.budget
            && self.decodes
            && self.extension_fails
    }
}

/// Runs every emitted worst-case pattern against an encoded file: the
/// pattern itself must decode within the rank-erasure budget and its
/// one-node extension must fail.
pub fn check_worst_cases(code: &LrcCode) -> Result<Vec<WorstCaseOutcome>> {
    let params = code.params();
    let patterns = worst_case_patterns(params)?;
    let file = xorshift_file(code, 0x5EED_5EED);
    let cw = code.encode(&file)?;
    let budget = params.gab_len - params.file_symbols;
    Ok(patterns
        .into_iter()
        .map(|wc| {
            let decodes = pattern_decodes(code, &cw, &file, &wc.pattern);
            let mut extended: Vec<usize> = wc.pattern.erased.iter().copied().collect();
            extended.push(wc.failing_extension);
            let extension_fails =
                !pattern_decodes(code, &cw, &file, &ErasurePattern::new(extended));
            WorstCaseOutcome {
                subcase: wc.subcase,
                size: wc.pattern.len(),
                rank_erasures: node_to_rank_erasures(code, &wc.pattern),
                budget,
                decodes,
                extension_fails,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Bound identity sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSweepReport {
    pub checked: u64,
    pub delta2_mismatches: u64,
    pub scalar_mismatches: u64,
}

impl BoundSweepReport {
    pub fn clean(&self) -> bool {
        self.delta2_mismatches == 0 && self.scalar_mismatches == 0
    }
}

/// Sweeps the bound identities: at `delta = 2` the general bound must equal
/// the single-parity form, and at `alpha = 1` the scalar form, across
/// `n <= max_n`, `M <= n*alpha`, `r <= n`, `delta <= max_delta`,
/// `alpha <= max_alpha`. Mismatches are counted, not thrown.
pub fn verify_bound_sweep(max_n: usize, max_delta: usize, max_alpha: usize) -> BoundSweepReport {
    let mut report = BoundSweepReport::default();
    for n in 1..=max_n {
        for alpha in 1..=max_alpha {
            for file_symbols in 1..=n * alpha {
                for r in 1..=n {
                    for delta in 2..=max_delta {
                        report.checked += 1;
                        if delta == 2
                            && dmin_bound(n, file_symbols, r, 2, alpha)
                                != dmin_delta2_bound(n, file_symbols, r, alpha)
                        {
                            report.delta2_mismatches += 1;
                        }
                        if alpha == 1
                            && dmin_bound(n, file_symbols, r, delta, 1)
                                != dmin_scalar_bound(n, file_symbols, r, delta)
                        {
                            report.scalar_mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    report
}

/// All certified parameter sets in a small range, for optimality sweeps.
pub fn conforming_params(
    max_n: usize,
    max_file_symbols: usize,
    max_alpha: usize,
    qs: &[usize],
) -> Vec<CodeParams> {
    let mut out = Vec::new();
    for &q in qs {
        for n in 2..=max_n {
            for alpha in 1..=max_alpha {
                for file_symbols in 1..=max_file_symbols {
                    for r in 1..=n {
                        for delta in 2..=5 {
                            if let Ok(p) = derive_params(n, file_symbols, r, delta, alpha, q) {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}
