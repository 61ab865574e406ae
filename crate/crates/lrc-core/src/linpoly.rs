//! Linearized polynomials over `F_{q^m}`: `f(x) = sum_i a_i x^(q^i)`.
//!
//! Evaluation is an `F_q`-linear map of the extension field, which is what
//! makes every parity symbol downstream another evaluation of the same
//! polynomial. Interpolation solves the Moore system of a full-span subset
//! of the observation points and then checks the leftover observations, so
//! corrupted inputs surface as [`Error::Inconsistent`] instead of a wrong
//! answer.

use crate::error::{Error, Result};
use crate::gf::{ExtParams, FieldElem, FqSpan};

/// Coefficients of `f(x) = sum_{i} coeffs[i] * x^(q^i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    pub coeffs: Vec<FieldElem>,
}

impl LinearizedPoly {
    pub fn new(coeffs: Vec<FieldElem>) -> Self {
        assert!(!coeffs.is_empty(), "coefficient vector must be non-empty");
        Self { coeffs }
    }

    /// Index of the last nonzero coefficient, or `None` for the zero
    /// polynomial.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }
}

/// Evaluates `f` at `x`: `sum_i a_i * x^(q^i)`.
pub fn lp_eval(ext: &ExtParams, f: &LinearizedPoly, x: &FieldElem) -> FieldElem {
    let mut acc = ext.zero();
    let mut pow = x.clone();
    for (i, a) in f.coeffs.iter().enumerate() {
        if !a.is_zero() {
            ext.mul_acc(&mut acc, a, &pow);
        }
        if i + 1 < f.coeffs.len() {
            pow = ext.frobenius_once(&pow);
        }
    }
    acc
}

/// Recovers the unique linearized polynomial of q-degree `< k` with
/// `f(points[j]) = values[j]` for all `j`.
///
/// A greedy scan keeps the first `k` points that enlarge the `F_q`-span
/// (deterministic tie-breaking), solves the k-by-k Moore system by Gaussian
/// elimination over `F_{q^m}`, and then verifies every remaining
/// observation against the result.
pub fn lp_interpolate(
    ext: &ExtParams,
    points: &[FieldElem],
    values: &[FieldElem],
    k: usize,
) -> Result<LinearizedPoly> {
    if points.len() != values.len() {
        return Err(Error::ShapeMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    assert!(k >= 1, "interpolation needs at least one coefficient");

    let mut span = FqSpan::new(ext);
    let mut selected = Vec::with_capacity(k);
    for (j, p) in points.iter().enumerate() {
        if span.insert(p) {
            selected.push(j);
            if selected.len() == k {
                break;
            }
        }
    }
    if selected.len() < k {
        // The scan saw every point, so span.dim() is the full span.
        return Err(Error::RankDeficient {
            span: span.dim(),
            required: k,
        });
    }

    // Augmented Moore system: row j is (p_j, p_j^q, ..., p_j^(q^(k-1)) | v_j).
    let mut rows: Vec<Vec<FieldElem>> = selected
        .iter()
        .map(|&j| {
            let mut row = Vec::with_capacity(k + 1);
            let mut pow = points[j].clone();
            for i in 0..k {
                row.push(pow.clone());
                if i + 1 < k {
                    pow = ext.frobenius_once(&pow);
                }
            }
            row.push(values[j].clone());
            row
        })
        .collect();

    // Gauss-Jordan over F_{q^m}. The Moore matrix of F_q-independent points
    // is nonsingular, so a missing pivot is an internal invariant violation.
    for col in 0..k {
        let pivot_row = (col..k)
            .find(|&r| !rows[r][col].is_zero())
            .expect("Moore matrix of independent points is nonsingular");
        rows.swap(col, pivot_row);
        let inv = ext.inv(&rows[col][col])?;
        for cell in rows[col][col..=k].iter_mut() {
            *cell = ext.mul(&inv, cell);
        }
        for r in 0..k {
            if r != col && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                let (pivot, target) = if r < col {
                    let (a, b) = rows.split_at_mut(col);
                    (&b[0], &mut a[r])
                } else {
                    let (a, b) = rows.split_at_mut(r);
                    (&a[col], &mut b[0])
                };
                for c in col..=k {
                    ext.mul_acc(&mut target[c], &factor, &pivot[c]);
                }
            }
        }
    }

    let f = LinearizedPoly::new((0..k).map(|i| rows[i][k].clone()).collect());

    // Leftover observations must agree; anything else is corruption, which
    // this pipeline does not attempt to correct.
    for (j, (p, v)) in points.iter().zip(values).enumerate() {
        if selected.contains(&j) {
            continue;
        }
        if &lp_eval(ext, &f, p) != v {
            return Err(Error::Inconsistent { index: j });
        }
    }
    Ok(f)
}
