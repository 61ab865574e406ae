//! The per-group `[alpha x (k + delta - 1), k, delta]` MDS array layer over
//! `F_q`: systematic encoding of `k` data nodes into `k + delta - 1` nodes,
//! and repair of up to `delta - 1` erased nodes from any `k` survivors.
//!
//! The array code is `alpha` stacked copies of one scalar MDS code with the
//! same `F_q` coefficients in every row, so parity symbols stay `F_q`-linear
//! combinations of the group's `F_{q^m}` symbols. For `delta = 2` the single
//! parity row is all ones (plain XOR, valid over any field); for larger
//! `delta` the parity rows form a Cauchy matrix, whose square submatrices
//! are all nonsingular, with labels `x_j = j` and `y_p = k + p` in the value
//! enumeration of `F_q`.

use crate::error::{Error, Result};
use crate::gf::{BaseElem, BaseParams, ExtParams, FieldElem};

/// One storage node's content: `alpha` symbols plus placement metadata.
/// Inside this module `node_id` is the position within the group
/// (`0..k` data, `k..k+delta-1` parity); the composed code re-labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeBlock {
    pub node_id: usize,
    pub group_id: usize,
    pub is_parity: bool,
    pub symbols: Vec<FieldElem>,
}

/// Systematic generator of one local group: `delta - 1` parity rows of
/// `F_q` coefficients over `k` data nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsLayer {
    q: usize,
    k_local: usize,
    delta: usize,
    coeff_matrix: Vec<Vec<BaseElem>>,
}

/// Outcome of a group repair: the rebuilt blocks and the positions read.
#[derive(Debug, Clone)]
pub struct GroupRepair {
    pub repaired: Vec<NodeBlock>,
    pub read_positions: Vec<usize>,
}

impl MdsLayer {
    pub fn build(base: &BaseParams, k_local: usize, delta: usize) -> Result<Self> {
        if k_local == 0 || delta < 2 {
            return Err(Error::InvalidParams(format!(
                "need k >= 1 and delta >= 2, got k = {k_local}, delta = {delta}"
            )));
        }
        let q = base.q();
        let coeff_matrix = if delta == 2 {
            vec![vec![1; k_local]]
        } else {
            // Cauchy labels must be k + delta - 1 distinct field values.
            if q < k_local + delta - 1 {
                return Err(Error::FieldTooSmall {
                    q,
                    needed: k_local + delta - 1,
                });
            }
            (0..delta - 1)
                .map(|p| {
                    let y = (k_local + p) as BaseElem;
                    (0..k_local)
                        .map(|j| base.inv(j as BaseElem ^ y).expect("distinct labels"))
                        .collect()
                })
                .collect()
        };
        Ok(Self {
            q,
            k_local,
            delta,
            coeff_matrix,
        })
    }

    pub fn k_local(&self) -> usize {
        self.k_local
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Group size `k + delta - 1`.
    pub fn n_local(&self) -> usize {
        self.k_local + self.delta - 1
    }

    /// Parity rows of the systematic generator, `(delta-1) x k`.
    pub fn coeff_matrix(&self) -> &[Vec<BaseElem>] {
        &self.coeff_matrix
    }

    fn check_ext(&self, ext: &ExtParams) -> Result<()> {
        if ext.base().q() != self.q {
            return Err(Error::InvalidParams(format!(
                "layer built for q = {}, field has q = {}",
                self.q,
                ext.base().q()
            )));
        }
        Ok(())
    }

    /// Parity symbol vectors for the given data symbol vectors: parity `p`,
    /// symbol `t` is `sum_j coeff[p][j] * data[j][t]`.
    pub fn parity_symbols(
        &self,
        ext: &ExtParams,
        data: &[&[FieldElem]],
    ) -> Result<Vec<Vec<FieldElem>>> {
        self.check_ext(ext)?;
        if data.len() != self.k_local {
            return Err(Error::ShapeMismatch {
                expected: self.k_local,
                got: data.len(),
            });
        }
        let alpha = data[0].len();
        if data.iter().any(|d| d.len() != alpha) {
            return Err(Error::InvalidParams(
                "data blocks have unequal symbol counts".into(),
            ));
        }
        Ok(self
            .coeff_matrix
            .iter()
            .map(|row| {
                (0..alpha)
                    .map(|t| {
                        let mut acc = ext.zero();
                        for (j, &c) in row.iter().enumerate() {
                            if c != 0 {
                                ext.add_assign(&mut acc, &ext.base_scalar_mul(c, &data[j][t]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect())
    }

    /// Systematic group encoding: the `k` data blocks followed by
    /// `delta - 1` parity blocks, positions `0..n_local`.
    pub fn encode(&self, ext: &ExtParams, data: &[NodeBlock]) -> Result<Vec<NodeBlock>> {
        let views: Vec<&[FieldElem]> = data.iter().map(|b| b.symbols.as_slice()).collect();
        let parities = self.parity_symbols(ext, &views)?;
        let group_id = data[0].group_id;
        let mut out: Vec<NodeBlock> = data.to_vec();
        for (p, symbols) in parities.into_iter().enumerate() {
            out.push(NodeBlock {
                node_id: self.k_local + p,
                group_id,
                is_parity: true,
                symbols,
            });
        }
        Ok(out)
    }

    /// Rebuilds the blocks at `erased` positions from surviving blocks,
    /// reading exactly `k` of them (the locality contract).
    ///
    /// Surviving blocks are identified by `node_id` as the in-group
    /// position; the first `k` in the given order are read.
    pub fn repair(
        &self,
        ext: &ExtParams,
        surviving: &[&NodeBlock],
        erased: &[usize],
    ) -> Result<GroupRepair> {
        self.check_ext(ext)?;
        if erased.len() > self.delta - 1 {
            return Err(Error::TooManyErasures {
                erased: erased.len(),
                max: self.delta - 1,
            });
        }
        if surviving.len() < self.k_local {
            return Err(Error::TooManyErasures {
                erased: self.n_local() - surviving.len(),
                max: self.delta - 1,
            });
        }
        let chosen = &surviving[..self.k_local];
        let read_positions: Vec<usize> = chosen.iter().map(|b| b.node_id).collect();
        let alpha = chosen[0].symbols.len();

        // k x k system over F_q whose unknowns are the data blocks; any k
        // rows of a systematic MDS generator are independent.
        let k = self.k_local;
        let mut mat = vec![vec![0 as BaseElem; k]; k];
        for (row, block) in mat.iter_mut().zip(chosen) {
            if block.node_id < k {
                row[block.node_id] = 1;
            } else {
                row.copy_from_slice(&self.coeff_matrix[block.node_id - k]);
            }
        }
        let inv = fq_invert(ext.base(), &mat)
            .expect("any k rows of an MDS systematic generator are nonsingular");

        let data: Vec<Vec<FieldElem>> = (0..k)
            .map(|j| {
                (0..alpha)
                    .map(|t| {
                        let mut acc = ext.zero();
                        for (sel, block) in chosen.iter().enumerate() {
                            let c = inv[j][sel];
                            if c != 0 {
                                ext.add_assign(
                                    &mut acc,
                                    &ext.base_scalar_mul(c, &block.symbols[t]),
                                );
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        let group_id = chosen[0].group_id;
        let repaired = erased
            .iter()
            .map(|&pos| {
                let symbols = if pos < k {
                    data[pos].clone()
                } else {
                    let row = &self.coeff_matrix[pos - k];
                    (0..alpha)
                        .map(|t| {
                            let mut acc = ext.zero();
                            for (j, &c) in row.iter().enumerate() {
                                if c != 0 {
                                    ext.add_assign(
                                        &mut acc,
                                        &ext.base_scalar_mul(c, &data[j][t]),
                                    );
                                }
                            }
                            acc
                        })
                        .collect()
                };
                NodeBlock {
                    node_id: pos,
                    group_id,
                    is_parity: pos >= k,
                    symbols,
                }
            })
            .collect();

        Ok(GroupRepair {
            repaired,
            read_positions,
        })
    }
}

/// Gauss-Jordan inversion of a small matrix over `F_q`.
fn fq_invert(base: &BaseParams, mat: &[Vec<BaseElem>]) -> Option<Vec<Vec<BaseElem>>> {
    let k = mat.len();
    let mut work: Vec<Vec<BaseElem>> = mat.to_vec();
    let mut inv: Vec<Vec<BaseElem>> = (0..k)
        .map(|i| {
            let mut row = vec![0; k];
            row[i] = 1;
            row
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k).find(|&r| work[r][col] != 0)?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let pinv = base.inv(work[col][col]).ok()?;
        for c in 0..k {
            work[col][c] = base.mul(pinv, work[col][c]);
            inv[col][c] = base.mul(pinv, inv[col][c]);
        }
        for r in 0..k {
            if r != col && work[r][col] != 0 {
                let f = work[r][col];
                for c in 0..k {
                    let wc = base.mul(f, work[col][c]);
                    work[r][c] ^= wc;
                    let ic = base.mul(f, inv[col][c]);
                    inv[r][c] ^= ic;
                }
            }
        }
    }
    Some(inv)
}
