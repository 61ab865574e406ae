//! The composed locally repairable code: Gabidulin precoding of the file,
//! folding into local groups of storage nodes, and a per-group MDS array
//! layer that adds `delta - 1` parity nodes.
//!
//! Node layout is fixed so share files are bit-reproducible: groups occupy
//! consecutive node ids, data nodes before parity nodes inside each group,
//! the smaller remainder group (when `r` does not divide `N/alpha`) last.
//! Each data node stores `alpha` consecutive Gabidulin codeword symbols.
//!
//! Parameter derivation refuses parameter sets whose optimality is not
//! certified by the divisibility / remainder conditions on `n`; a separate
//! `forced` path builds the code anyway and marks the distance value as a
//! bound only.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gabidulin::GabidulinCode;
use crate::gf::{BaseParams, ExtParams, FieldElem, MAX_EXT_DEGREE};
use crate::mds::{MdsLayer, NodeBlock};

/// Which certification clause produced the parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimalityCase {
    /// `(r + delta - 1) | n`: equal-size groups, distance provably optimal.
    FullGroups,
    /// The remainder condition
    /// `n mod (r+delta-1) - (delta-1) >= ceil(M/alpha) mod r > 0` holds.
    RemainderGroup,
    /// Built by the escape hatch; the distance value is a bound only.
    Forced,
}

/// One local group: `data_nodes` systematic nodes plus `parity_nodes`
/// (always `delta - 1`) MDS parity nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLayout {
    pub data_nodes: usize,
    pub parity_nodes: usize,
}

impl GroupLayout {
    pub fn size(&self) -> usize {
        self.data_nodes + self.parity_nodes
    }
}

/// The full parameter record of one code instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Storage nodes.
    pub n: usize,
    /// File size in `F_{q^m}` symbols.
    #[serde(rename = "M")]
    pub file_symbols: usize,
    pub r: usize,
    pub delta: usize,
    /// Symbols per node.
    pub alpha: usize,
    /// Base field order (a power of two).
    pub q: usize,
    /// `q = 2^s`.
    pub s: u32,
    /// Gabidulin code length.
    #[serde(rename = "N")]
    pub gab_len: usize,
    /// Extension degree; equals `gab_len` unless explicitly overridden.
    pub m: usize,
    /// Minimum rank distance `D = N - M + 1` of the precode.
    #[serde(rename = "D")]
    pub rank_dist: usize,
    /// Number of local groups.
    pub g: usize,
    /// `(N / alpha) mod r`; zero means no remainder group.
    pub beta0: usize,
    pub groups: Vec<GroupLayout>,
    /// The distance bound value; the operational minimum distance when
    /// `certified`.
    pub dmin: usize,
    pub optimality_case: OptimalityCase,
    pub certified: bool,
}

fn div_ceil(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Distance bound for an `(r, delta, alpha)` locally repairable code:
/// `n - ceil(M/alpha) + 1 - (ceil(M/(r*alpha)) - 1)(delta - 1)`.
pub fn dmin_bound(n: usize, file_symbols: usize, r: usize, delta: usize, alpha: usize) -> i64 {
    n as i64 - div_ceil(file_symbols, alpha) as i64 + 1
        - (div_ceil(file_symbols, r * alpha) as i64 - 1) * (delta as i64 - 1)
}

/// The scalar (`alpha = 1`) specialization:
/// `n - M + 1 - (ceil(M/r) - 1)(delta - 1)`.
pub fn dmin_scalar_bound(n: usize, file_symbols: usize, r: usize, delta: usize) -> i64 {
    n as i64 - file_symbols as i64 + 1 - (div_ceil(file_symbols, r) as i64 - 1) * (delta as i64 - 1)
}

/// The `delta = 2` specialization:
/// `n - ceil(M/alpha) - ceil(M/(r*alpha)) + 2`.
pub fn dmin_delta2_bound(n: usize, file_symbols: usize, r: usize, alpha: usize) -> i64 {
    n as i64 - div_ceil(file_symbols, alpha) as i64 - div_ceil(file_symbols, r * alpha) as i64 + 2
}

fn validate_inputs(
    n: usize,
    file_symbols: usize,
    r: usize,
    delta: usize,
    alpha: usize,
    q: usize,
) -> Result<u32> {
    if n == 0 || file_symbols == 0 || r == 0 || alpha == 0 {
        return Err(Error::InvalidParams(
            "n, M, r and alpha must be positive".into(),
        ));
    }
    if delta < 2 {
        return Err(Error::InvalidParams(format!("delta must be >= 2, got {delta}")));
    }
    if !q.is_power_of_two() || q < 2 {
        return Err(Error::InvalidParams(format!(
            "q must be a power of two >= 2, got {q}"
        )));
    }
    let s = q.trailing_zeros();
    if s > crate::gf::MAX_BASE_BITS {
        return Err(Error::InvalidParams(format!(
            "q = {q} exceeds the supported base field size"
        )));
    }
    if file_symbols < r * alpha {
        return Err(Error::InvalidParams(format!(
            "file size M = {file_symbols} must be at least r*alpha = {}",
            r * alpha
        )));
    }
    if delta > 2 && q < r + delta - 1 {
        return Err(Error::FieldTooSmall {
            q,
            needed: r + delta - 1,
        });
    }
    if n < r + delta - 1 {
        return Err(Error::InvalidParams(format!(
            "n = {n} cannot hold even one group of size r+delta-1 = {}",
            r + delta - 1
        )));
    }
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn build_params(
    n: usize,
    file_symbols: usize,
    r: usize,
    delta: usize,
    alpha: usize,
    q: usize,
    s: u32,
    gab_len: usize,
    optimality_case: OptimalityCase,
) -> Result<CodeParams> {
    if gab_len < file_symbols {
        return Err(Error::InvalidParams(format!(
            "derived Gabidulin length N = {gab_len} is below the file size M = {file_symbols}"
        )));
    }
    if gab_len > MAX_EXT_DEGREE {
        return Err(Error::InvalidParams(format!(
            "derived N = {gab_len} needs extension degree m = {gab_len} > {MAX_EXT_DEGREE}"
        )));
    }
    debug_assert!(gab_len.is_multiple_of(alpha));
    let data_total = gab_len / alpha;
    let beta0 = data_total % r;
    let g = div_ceil(data_total, r);
    let mut groups = vec![
        GroupLayout {
            data_nodes: r,
            parity_nodes: delta - 1,
        };
        if beta0 == 0 { g } else { g - 1 }
    ];
    if beta0 > 0 {
        groups.push(GroupLayout {
            data_nodes: beta0,
            parity_nodes: delta - 1,
        });
    }
    let node_total: usize = groups.iter().map(|gr| gr.size()).sum();
    if node_total != n {
        return Err(Error::InvalidParams(format!(
            "layout re-derivation produced {node_total} nodes, expected {n}"
        )));
    }
    let dmin = dmin_bound(n, file_symbols, r, delta, alpha);
    if dmin < 1 {
        return Err(Error::InvalidParams(format!(
            "distance bound {dmin} is not positive"
        )));
    }
    Ok(CodeParams {
        n,
        file_symbols,
        r,
        delta,
        alpha,
        q,
        s,
        gab_len,
        m: gab_len,
        rank_dist: gab_len - file_symbols + 1,
        g,
        beta0,
        groups,
        dmin: dmin as usize,
        optimality_case,
        certified: optimality_case != OptimalityCase::Forced,
    })
}

/// Derives a certified-optimal parameter set from the system parameters,
/// picking the Gabidulin length by whichever optimality clause applies.
///
/// Fails with [`Error::NotOptimalConfiguration`] when neither clause holds;
/// see [`derive_params_forced`] for the uncertified escape hatch.
pub fn derive_params(
    n: usize,
    file_symbols: usize,
    r: usize,
    delta: usize,
    alpha: usize,
    q: usize,
) -> Result<CodeParams> {
    let s = validate_inputs(n, file_symbols, r, delta, alpha, q)?;
    let group_size = r + delta - 1;
    if n.is_multiple_of(group_size) {
        let gab_len = (n / group_size) * r * alpha;
        return build_params(
            n,
            file_symbols,
            r,
            delta,
            alpha,
            q,
            s,
            gab_len,
            OptimalityCase::FullGroups,
        );
    }
    let rho = n % group_size;
    let mceil = div_ceil(file_symbols, alpha) % r;
    if mceil == 0 {
        return Err(Error::NotOptimalConfiguration(format!(
            "(r+delta-1) = {group_size} does not divide n = {n}, and \
             ceil(M/alpha) mod r = 0 violates ceil(M/alpha) mod r > 0"
        )));
    }
    if rho < delta - 1 || rho - (delta - 1) < mceil {
        return Err(Error::NotOptimalConfiguration(format!(
            "(r+delta-1) = {group_size} does not divide n = {n}, and \
             n mod (r+delta-1) - (delta-1) = {} violates >= ceil(M/alpha) mod r = {mceil}",
            rho as i64 - (delta as i64 - 1)
        )));
    }
    let gab_len = alpha * (n - delta + 1 - (delta - 1) * (n / group_size));
    build_params(
        n,
        file_symbols,
        r,
        delta,
        alpha,
        q,
        s,
        gab_len,
        OptimalityCase::RemainderGroup,
    )
}

/// Builds an uncertified parameter set when neither optimality clause
/// holds: picks the largest data-node count `v` with
/// `v + ceil(v/r)(delta-1) = n`, so the resulting distance value is only
/// the upper bound, not a certified achievement.
pub fn derive_params_forced(
    n: usize,
    file_symbols: usize,
    r: usize,
    delta: usize,
    alpha: usize,
    q: usize,
) -> Result<CodeParams> {
    let s = validate_inputs(n, file_symbols, r, delta, alpha, q)?;
    for v in (1..=n).rev() {
        if v + div_ceil(v, r) * (delta - 1) != n {
            continue;
        }
        let gab_len = v * alpha;
        if gab_len < file_symbols || gab_len > MAX_EXT_DEGREE {
            continue;
        }
        return build_params(
            n,
            file_symbols,
            r,
            delta,
            alpha,
            q,
            s,
            gab_len,
            OptimalityCase::Forced,
        );
    }
    Err(Error::InvalidParams(format!(
        "no group layout fits n = {n} nodes with r = {r}, delta = {delta}"
    )))
}

impl CodeParams {
    /// Override the minimal `m = N` with a larger extension degree
    /// (interop testing); the code itself only needs `m >= N`.
    pub fn with_ext_degree(mut self, m: usize) -> Result<Self> {
        if m < self.gab_len || m > MAX_EXT_DEGREE {
            return Err(Error::InvalidParams(format!(
                "extension degree override {m} outside {}..={MAX_EXT_DEGREE}",
                self.gab_len
            )));
        }
        self.m = m;
        Ok(self)
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn total_data_nodes(&self) -> usize {
        self.gab_len / self.alpha
    }

    /// Node ids occupied by group `gi` (data nodes first, then parity).
    pub fn node_range(&self, gi: usize) -> std::ops::Range<usize> {
        let start: usize = self.groups[..gi].iter().map(|g| g.size()).sum();
        start..start + self.groups[gi].size()
    }

    pub fn group_of(&self, node: usize) -> usize {
        let mut start = 0;
        for (gi, g) in self.groups.iter().enumerate() {
            if node < start + g.size() {
                return gi;
            }
            start += g.size();
        }
        panic!("node {node} out of range for n = {}", self.n);
    }

    pub fn is_parity_node(&self, node: usize) -> bool {
        let gi = self.group_of(node);
        let range = self.node_range(gi);
        node - range.start >= self.groups[gi].data_nodes
    }

    /// Global data-node index (0-based across groups) of a data node.
    pub fn data_index(&self, node: usize) -> Option<usize> {
        let gi = self.group_of(node);
        let range = self.node_range(gi);
        let offset = node - range.start;
        if offset >= self.groups[gi].data_nodes {
            return None;
        }
        let before: usize = self.groups[..gi].iter().map(|g| g.data_nodes).sum();
        Some(before + offset)
    }

    /// Structural consistency of a (possibly deserialized) record.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.q != 1usize << self.s {
            return fail(format!("q = {} is not 2^s for s = {}", self.q, self.s));
        }
        if self.m < self.gab_len {
            return fail(format!("m = {} below N = {}", self.m, self.gab_len));
        }
        if self.gab_len < self.file_symbols || self.file_symbols < self.r * self.alpha {
            return fail("need N >= M >= r*alpha".into());
        }
        if !self.gab_len.is_multiple_of(self.alpha) {
            return fail(format!(
                "alpha = {} does not divide N = {}",
                self.alpha, self.gab_len
            ));
        }
        if self.rank_dist != self.gab_len - self.file_symbols + 1 {
            return fail("rank distance D must equal N - M + 1".into());
        }
        let node_total: usize = self.groups.iter().map(|g| g.size()).sum();
        if node_total != self.n {
            return fail(format!("groups sum to {node_total} nodes, n = {}", self.n));
        }
        let data_total: usize = self.groups.iter().map(|g| g.data_nodes).sum();
        if data_total != self.total_data_nodes() {
            return fail("group data nodes do not sum to N/alpha".into());
        }
        if self.beta0 != data_total % self.r {
            return fail("beta0 does not match (N/alpha) mod r".into());
        }
        if self.groups.len() != div_ceil(data_total, self.r) || self.g != self.groups.len() {
            return fail("group count does not match ceil(N/(r*alpha))".into());
        }
        for g in &self.groups {
            if g.parity_nodes != self.delta - 1 || g.size() > self.r + self.delta - 1 {
                return fail("malformed group layout".into());
            }
        }
        if self.certified && self.dmin as i64 != dmin_bound(
            self.n,
            self.file_symbols,
            self.r,
            self.delta,
            self.alpha,
        ) {
            return fail("certified dmin does not equal the bound".into());
        }
        Ok(())
    }
}

/// A set of failed node indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasurePattern {
    pub erased: BTreeSet<usize>,
}

impl ErasurePattern {
    pub fn new<I: IntoIterator<Item = usize>>(nodes: I) -> Self {
        Self {
            erased: nodes.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.erased.contains(&node)
    }

    /// Erasure count per group.
    pub fn per_group_counts(&self, params: &CodeParams) -> Vec<usize> {
        let mut counts = vec![0; params.group_count()];
        for &node in &self.erased {
            counts[params.group_of(node)] += 1;
        }
        counts
    }
}

/// An encoded file: one [`NodeBlock`] per storage node, with global ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub shares: Vec<NodeBlock>,
}

impl Codeword {
    /// The blocks that survive an erasure pattern.
    pub fn surviving(&self, pattern: &ErasurePattern) -> Vec<&NodeBlock> {
        self.shares
            .iter()
            .filter(|b| !pattern.contains(b.node_id))
            .collect()
    }
}

/// Report of one local repair: the rebuilt block plus the traffic it cost.
#[derive(Debug, Clone)]
pub struct LocalRepair {
    pub block: NodeBlock,
    pub nodes_contacted: Vec<usize>,
    pub symbols_downloaded: usize,
}

/// A fully instantiated code: parameters plus the field tower, the
/// Gabidulin precode and the per-group MDS layers.
#[derive(Debug, Clone)]
pub struct LrcCode {
    params: CodeParams,
    ext: ExtParams,
    gab: GabidulinCode,
    layers: Vec<MdsLayer>,
}

impl LrcCode {
    pub fn new(params: CodeParams) -> Result<Self> {
        params.validate()?;
        let base = BaseParams::new(params.s)?;
        let layers = params
            .groups
            .iter()
            .map(|g| MdsLayer::build(&base, g.data_nodes, params.delta))
            .collect::<Result<Vec<_>>>()?;
        let ext = ExtParams::new(base, params.m)?;
        let gab = GabidulinCode::new(ext.clone(), params.gab_len, params.file_symbols)?;
        Ok(Self {
            params,
            ext,
            gab,
            layers,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn ext(&self) -> &ExtParams {
        &self.ext
    }

    pub fn gabidulin(&self) -> &GabidulinCode {
        &self.gab
    }

    pub fn layer(&self, gi: usize) -> &MdsLayer {
        &self.layers[gi]
    }

    /// Encodes `file` (exactly `M` symbols) into `n` node shares.
    pub fn encode(&self, file: &[FieldElem]) -> Result<Codeword> {
        let p = &self.params;
        if file.len() != p.file_symbols {
            return Err(Error::ShapeMismatch {
                expected: p.file_symbols,
                got: file.len(),
            });
        }
        let codeword = self.gab.encode(file)?;
        let mut shares = Vec::with_capacity(p.n);
        let mut sym = 0;
        for (gi, group) in p.groups.iter().enumerate() {
            let range = p.node_range(gi);
            let mut data = Vec::with_capacity(group.data_nodes);
            for d in 0..group.data_nodes {
                data.push(NodeBlock {
                    node_id: range.start + d,
                    group_id: gi,
                    is_parity: false,
                    symbols: codeword[sym..sym + p.alpha].to_vec(),
                });
                sym += p.alpha;
            }
            let views: Vec<&[FieldElem]> = data.iter().map(|b| b.symbols.as_slice()).collect();
            let parities = self.layers[gi].parity_symbols(&self.ext, &views)?;
            shares.extend(data);
            for (pi, symbols) in parities.into_iter().enumerate() {
                shares.push(NodeBlock {
                    node_id: range.start + group.data_nodes + pi,
                    group_id: gi,
                    is_parity: true,
                    symbols,
                });
            }
        }
        debug_assert_eq!(sym, p.gab_len);
        Ok(Codeword { shares })
    }

    /// The Gabidulin evaluation point that `(node, symbol_index)` stores an
    /// evaluation at: the basis point itself for a data node, the parity
    /// row's `F_q`-combination of its group's points for a parity node.
    pub fn eval_point_of(&self, node: usize, symbol_index: usize) -> FieldElem {
        let p = &self.params;
        assert!(symbol_index < p.alpha, "symbol index out of range");
        let gi = p.group_of(node);
        let range = p.node_range(gi);
        let offset = node - range.start;
        let data_nodes = p.groups[gi].data_nodes;
        let first_data: usize = p.groups[..gi].iter().map(|g| g.data_nodes).sum();
        if offset < data_nodes {
            return self
                .ext
                .basis_elem((first_data + offset) * p.alpha + symbol_index);
        }
        let row = &self.layers[gi].coeff_matrix()[offset - data_nodes];
        let mut acc = self.ext.zero();
        for (j, &c) in row.iter().enumerate() {
            if c != 0 {
                let point = self
                    .ext
                    .basis_elem((first_data + j) * p.alpha + symbol_index);
                self.ext
                    .add_assign(&mut acc, &self.ext.base_scalar_mul(c, &point));
            }
        }
        acc
    }

    /// All `alpha` evaluation points of one node.
    pub fn node_points(&self, node: usize) -> Vec<FieldElem> {
        (0..self.params.alpha)
            .map(|t| self.eval_point_of(node, t))
            .collect()
    }

    /// Rebuilds `target` from surviving blocks of its own group, reading at
    /// most `r` of them.
    pub fn local_repair(&self, surviving: &[&NodeBlock], target: usize) -> Result<LocalRepair> {
        let p = &self.params;
        let gi = p.group_of(target);
        let range = p.node_range(gi);
        let mut in_group: Vec<&NodeBlock> = surviving
            .iter()
            .copied()
            .filter(|b| range.contains(&b.node_id) && b.node_id != target)
            .collect();
        in_group.sort_by_key(|b| b.node_id);
        in_group.dedup_by_key(|b| b.node_id);

        let erased_in_group = p.groups[gi].size() - in_group.len();
        if erased_in_group > p.delta - 1 {
            return Err(Error::GroupOverwhelmed {
                group: gi,
                erased: erased_in_group,
                max: p.delta - 1,
            });
        }

        // Re-key to in-group positions for the MDS layer.
        let local: Vec<NodeBlock> = in_group
            .iter()
            .map(|b| NodeBlock {
                node_id: b.node_id - range.start,
                group_id: gi,
                is_parity: b.is_parity,
                symbols: b.symbols.clone(),
            })
            .collect();
        let local_refs: Vec<&NodeBlock> = local.iter().collect();
        let repair = self.layers[gi].repair(&self.ext, &local_refs, &[target - range.start])?;

        let nodes_contacted: Vec<usize> = repair
            .read_positions
            .iter()
            .map(|pos| pos + range.start)
            .collect();
        debug_assert!(nodes_contacted.len() <= p.r);
        let mut block = repair.repaired.into_iter().next().expect("one target");
        block.node_id = target;
        block.group_id = gi;
        Ok(LocalRepair {
            block,
            symbols_downloaded: nodes_contacted.len() * p.alpha,
            nodes_contacted,
        })
    }

    /// Reconstructs the original file from any share subset whose
    /// evaluation points span at least `M` dimensions over `F_q`. Every
    /// surviving symbol, data or parity, contributes an observation.
    pub fn reconstruct(&self, surviving: &[&NodeBlock]) -> Result<Vec<FieldElem>> {
        let p = &self.params;
        let mut points = Vec::with_capacity(surviving.len() * p.alpha);
        let mut values = Vec::with_capacity(surviving.len() * p.alpha);
        for block in surviving {
            for (t, v) in block.symbols.iter().enumerate() {
                points.push(self.eval_point_of(block.node_id, t));
                values.push(v.clone());
            }
        }
        self.gab.erasure_decode(&points, &values)
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Scalar reference instance: (M, n, r, delta, alpha, q) = (9, 14, 4, 2, 1, 2).
    pub(crate) fn example1() -> LrcCode {
        LrcCode::new(derive_params(14, 9, 4, 2, 1, 2).unwrap()).unwrap()
    }

    /// Vector reference instance: (M, n, r, delta, alpha, q) = (28, 15, 3, 3, 4, 8).
    pub(crate) fn example2() -> LrcCode {
        LrcCode::new(derive_params(15, 28, 3, 3, 4, 8).unwrap()).unwrap()
    }
}
