//! Two-level finite field tower: a base field `F_q = GF(2^s)` of bit
//! polynomials, and an extension `F_{q^m}` in a polynomial basis over it.
//!
//! Extension elements are kept as length-`m` coordinate vectors over `F_q`
//! rather than flat `GF(2^{sm})` values, so the `F_q`-linear structure the
//! outer codes rely on (scalar action, Frobenius, rank of a symbol vector)
//! is explicit. Both irreducible moduli are chosen deterministically as the
//! smallest candidate (coefficient vectors compared from the highest-degree
//! coefficient down), so codewords are reproducible across runs and
//! implementations.

use crate::error::{Error, Result};

/// Upper bound on the base-field exponent `s` (so `q = 2^s <= 65536`).
pub const MAX_BASE_BITS: u32 = 16;
/// Upper bound on the extension degree `m`.
pub const MAX_EXT_DEGREE: usize = 64;

/// A base field value; always `< q`.
pub type BaseElem = u16;

// ---------------------------------------------------------------------------
// GF(2) polynomial helpers (bit-encoded: bit i = coefficient of x^i)
// ---------------------------------------------------------------------------

fn poly2_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly2_mulmod(mut a: u64, mut b: u64, modulus: u64) -> u64 {
    let deg = poly2_degree(modulus);
    let mut acc = 0u64;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if poly2_degree(a) == deg {
            a ^= modulus;
        }
    }
    acc
}

fn poly2_mod(mut a: u64, modulus: u64) -> u64 {
    let deg = poly2_degree(modulus);
    while poly2_degree(a) >= deg {
        a ^= modulus << (poly2_degree(a) - deg);
    }
    a
}

fn poly2_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly2_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// Irreducibility of a bit-encoded binary polynomial: x^(2^s) must return
/// to x, and x^(2^i) - x must stay coprime for i up to s/2.
fn poly2_is_irreducible(p: u64) -> bool {
    let s = poly2_degree(p);
    if s < 1 {
        return false;
    }
    if s == 1 {
        return true;
    }
    let mut t = 2u64; // x
    for i in 1..=s {
        t = poly2_mulmod(t, t, p);
        if i <= s / 2 && poly2_gcd(t ^ 2, p) != 1 {
            return false;
        }
    }
    t == 2
}

/// Smallest irreducible binary polynomial of exact degree `s`.
fn smallest_irreducible_poly2(s: u32) -> u64 {
    let top = 1u64 << s;
    for low in 0..top {
        let cand = top | low;
        if poly2_is_irreducible(cand) {
            return cand;
        }
    }
    unreachable!("an irreducible polynomial of degree {s} over GF(2) exists")
}

// ---------------------------------------------------------------------------
// Base field GF(2^s)
// ---------------------------------------------------------------------------

/// The base field `F_q`, `q = 2^s`, with its reduction polynomial and
/// multiplication tables. Immutable after construction.
#[derive(Debug, Clone)]
pub struct BaseParams {
    s: u32,
    q: usize,
    irreducible: u64,
    /// Full q*q product table when q <= 256.
    mul_table: Option<Vec<BaseElem>>,
    /// log/exp tables w.r.t. a fixed generator (exp doubled to skip a mod).
    log: Vec<u16>,
    exp: Vec<BaseElem>,
    inv: Vec<BaseElem>,
}

impl PartialEq for BaseParams {
    fn eq(&self, other: &Self) -> bool {
        self.s == other.s && self.irreducible == other.irreducible
    }
}
impl Eq for BaseParams {}

impl BaseParams {
    /// Builds `GF(2^s)` with the smallest irreducible modulus of degree `s`.
    pub fn new(s: u32) -> Result<Self> {
        if s == 0 || s > MAX_BASE_BITS {
            return Err(Error::InvalidParams(format!(
                "base field exponent s must be in 1..={MAX_BASE_BITS}, got {s}"
            )));
        }
        let irreducible = smallest_irreducible_poly2(s);
        let q = 1usize << s;

        // Generator of the unit group, found by direct order computation.
        let order = (q - 1) as u64;
        let mut generator = 1u64;
        if q > 2 {
            'search: for cand in 2..q as u64 {
                let mut v = 1u64;
                for step in 1..=order {
                    v = poly2_mulmod(v, cand, irreducible);
                    if v == 1 {
                        if step == order {
                            generator = cand;
                            break 'search;
                        }
                        continue 'search;
                    }
                }
            }
            assert!(generator != 1, "no generator found for GF(2^{s})");
        }

        let mut exp = vec![0 as BaseElem; 2 * (q - 1)];
        let mut log = vec![0u16; q];
        let mut v = 1u64;
        for (i, slot) in exp.iter_mut().take(q - 1).enumerate() {
            *slot = v as BaseElem;
            log[v as usize] = i as u16;
            v = poly2_mulmod(v, generator, irreducible);
        }
        for i in 0..(q - 1) {
            exp[q - 1 + i] = exp[i];
        }

        let mut inv = vec![0 as BaseElem; q];
        for a in 1..q {
            inv[a] = exp[(q - 1 - log[a] as usize) % (q - 1)];
        }

        let mul_table = if q <= 256 {
            let mut t = vec![0 as BaseElem; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = poly2_mulmod(a as u64, b as u64, irreducible) as BaseElem;
                }
            }
            Some(t)
        } else {
            None
        };

        Ok(Self {
            s,
            q,
            irreducible,
            mul_table,
            log,
            exp,
            inv,
        })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Field order `q = 2^s`.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Bit-encoded reduction polynomial (bit `i` = coefficient of `x^i`).
    pub fn irreducible(&self) -> u64 {
        self.irreducible
    }

    #[inline]
    pub fn add(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        debug_assert!((a as usize) < self.q && (b as usize) < self.q);
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        debug_assert!((a as usize) < self.q && (b as usize) < self.q);
        if let Some(t) = &self.mul_table {
            t[a as usize * self.q + b as usize]
        } else if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: BaseElem) -> Result<BaseElem> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.inv[a as usize])
    }

    /// Schoolbook carry-less multiply-and-reduce, kept as an independent
    /// route for cross-checking the tables.
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) fn mul_slow(&self, a: BaseElem, b: BaseElem) -> BaseElem {
        poly2_mulmod(a as u64, b as u64, self.irreducible) as BaseElem
    }
}

// ---------------------------------------------------------------------------
// Dense polynomials over F_q (setup-time only: modulus search, inversion)
// ---------------------------------------------------------------------------

fn pq_trim(p: &mut Vec<BaseElem>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn pq_degree(p: &[BaseElem]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

/// Product of two F_q polynomials reduced modulo a monic `modulus`.
fn pq_mulmod(
    base: &BaseParams,
    a: &[BaseElem],
    b: &[BaseElem],
    modulus: &[BaseElem],
) -> Vec<BaseElem> {
    let m = pq_degree(modulus).expect("monic modulus");
    let mut prod = vec![0 as BaseElem; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                prod[i + j] ^= base.mul(ai, bj);
            }
        }
    }
    for d in (m..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            prod[d] = 0;
            for t in 0..m {
                if modulus[t] != 0 {
                    prod[d - m + t] ^= base.mul(c, modulus[t]);
                }
            }
        }
    }
    prod.truncate(m);
    prod
}

fn pq_gcd(base: &BaseParams, a: &[BaseElem], b: &[BaseElem]) -> Vec<BaseElem> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    pq_trim(&mut a);
    pq_trim(&mut b);
    while !b.is_empty() {
        let db = pq_degree(&b).unwrap();
        let lead_inv = base.inv(b[db]).unwrap();
        while let Some(da) = pq_degree(&a) {
            if da < db {
                break;
            }
            let factor = base.mul(a[da], lead_inv);
            for t in 0..=db {
                if b[t] != 0 {
                    a[da - db + t] ^= base.mul(factor, b[t]);
                }
            }
            pq_trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
        pq_trim(&mut b);
    }
    a
}

/// Rabin's irreducibility test for a monic degree-`m` polynomial over F_q.
fn pq_is_irreducible(base: &BaseParams, f: &[BaseElem], m: usize) -> bool {
    if m == 1 {
        return true;
    }
    let mut prime_divs = Vec::new();
    let mut rem = m;
    let mut d = 2;
    while d * d <= rem {
        if rem.is_multiple_of(d) {
            prime_divs.push(d);
            while rem.is_multiple_of(d) {
                rem /= d;
            }
        }
        d += 1;
    }
    if rem > 1 {
        prime_divs.push(rem);
    }

    // t_i = x^(q^i) mod f; one q-th power is s successive squarings mod f.
    let x: Vec<BaseElem> = vec![0, 1];
    let mut t = x.clone();
    for i in 1..=m {
        for _ in 0..base.s() {
            t = pq_mulmod(base, &t, &t, f);
        }
        if prime_divs.iter().any(|&p| i == m / p) {
            let mut diff = t.clone();
            if diff.len() < 2 {
                diff.resize(2, 0);
            }
            diff[1] ^= 1; // t - x
            let g = pq_gcd(base, &diff, f);
            if pq_degree(&g) != Some(0) {
                return false;
            }
        }
    }
    pq_trim(&mut t);
    t == x
}

// ---------------------------------------------------------------------------
// Extension field F_{q^m}
// ---------------------------------------------------------------------------

/// The extension field `F_{q^m}` over a [`BaseParams`] base, with a monic
/// irreducible reduction polynomial of degree `m`.
#[derive(Debug, Clone)]
pub struct ExtParams {
    base: BaseParams,
    m: usize,
    /// Monic: `irreducible[m] == 1`, length `m + 1`.
    irreducible: Vec<BaseElem>,
}

impl PartialEq for ExtParams {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.m == other.m && self.irreducible == other.irreducible
    }
}
impl Eq for ExtParams {}

/// An element of `F_{q^m}`: `m` coordinates over `F_q` in the polynomial
/// basis `1, x, ..., x^{m-1}`, lowest coordinate first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub(crate) coeffs: Vec<BaseElem>,
}

impl FieldElem {
    /// Coordinates in the polynomial basis, lowest first.
    pub fn coeffs(&self) -> &[BaseElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl ExtParams {
    /// Builds `F_{q^m}` with the smallest monic irreducible modulus of
    /// degree `m` over the given base field.
    pub fn new(base: BaseParams, m: usize) -> Result<Self> {
        if m == 0 || m > MAX_EXT_DEGREE {
            return Err(Error::InvalidParams(format!(
                "extension degree m must be in 1..={MAX_EXT_DEGREE}, got {m}"
            )));
        }
        let q = base.q() as u64;
        // Enumerate lower-coefficient vectors as base-q counters, smallest
        // first; a zero constant term means x divides the candidate.
        let mut counter = vec![0 as BaseElem; m];
        let irreducible = loop {
            let mut i = 0;
            loop {
                counter[i] = counter[i].wrapping_add(1);
                if (counter[i] as u64) < q {
                    break;
                }
                counter[i] = 0;
                i += 1;
                assert!(i < m, "no irreducible of degree {m} found over GF({q})");
            }
            if counter[0] == 0 {
                continue;
            }
            let mut cand = counter.clone();
            cand.push(1);
            if pq_is_irreducible(&base, &cand, m) {
                break cand;
            }
        };
        Ok(Self {
            base,
            m,
            irreducible,
        })
    }

    pub fn base(&self) -> &BaseParams {
        &self.base
    }

    /// Extension degree `m`.
    pub fn degree(&self) -> usize {
        self.m
    }

    /// Reduction polynomial coefficients, length `m + 1`, monic.
    pub fn irreducible(&self) -> &[BaseElem] {
        &self.irreducible
    }

    /// Number of field elements `q^m`, if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.m {
            acc = acc.checked_mul(self.base.q() as u64)?;
        }
        Some(acc)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.m],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.embed_base(1)
    }

    /// The basis element `x^i`.
    pub fn basis_elem(&self, i: usize) -> FieldElem {
        assert!(i < self.m, "basis index {i} out of range for m = {}", self.m);
        let mut coeffs = vec![0; self.m];
        coeffs[i] = 1;
        FieldElem { coeffs }
    }

    /// Embeds a base field value as a constant-coordinate element.
    pub fn embed_base(&self, c: BaseElem) -> FieldElem {
        assert!((c as usize) < self.base.q(), "base value {c} out of range");
        let mut coeffs = vec![0; self.m];
        coeffs[0] = c;
        FieldElem { coeffs }
    }

    /// Element from explicit coordinates (length `m`, each `< q`).
    pub fn elem_from_coeffs(&self, coeffs: &[BaseElem]) -> Result<FieldElem> {
        if coeffs.len() != self.m {
            return Err(Error::ShapeMismatch {
                expected: self.m,
                got: coeffs.len(),
            });
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c as usize >= self.base.q()) {
            return Err(Error::InvalidParams(format!(
                "coordinate {c} not below q = {}",
                self.base.q()
            )));
        }
        Ok(FieldElem {
            coeffs: coeffs.to_vec(),
        })
    }

    /// The `idx`-th element in the base-q little-endian enumeration of
    /// coordinate vectors. Panics if `idx >= q^m`.
    pub fn elem_from_index(&self, mut idx: u64) -> FieldElem {
        let q = self.base.q() as u64;
        let mut coeffs = vec![0; self.m];
        for slot in coeffs.iter_mut() {
            *slot = (idx % q) as BaseElem;
            idx /= q;
        }
        assert!(idx == 0, "element index out of range");
        FieldElem { coeffs }
    }

    #[inline]
    fn check(&self, a: &FieldElem) {
        assert!(
            a.coeffs.len() == self.m,
            "element has {} coordinates, field expects {}",
            a.coeffs.len(),
            self.m
        );
    }

    /// Coordinate-wise sum; characteristic 2, so this is also subtraction.
    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.check(a);
        self.check(b);
        FieldElem {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| x ^ y)
                .collect(),
        }
    }

    pub fn add_assign(&self, a: &mut FieldElem, b: &FieldElem) {
        self.check(a);
        self.check(b);
        for (x, &y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x ^= y;
        }
    }

    #[inline]
    fn reduce(&self, buf: &mut [BaseElem]) {
        let m = self.m;
        for d in (m..buf.len()).rev() {
            let c = buf[d];
            if c != 0 {
                buf[d] = 0;
                for t in 0..m {
                    let p = self.irreducible[t];
                    if p != 0 {
                        buf[d - m + t] ^= self.base.mul(c, p);
                    }
                }
            }
        }
    }

    /// Schoolbook product into a stack buffer, then reduction.
    #[inline]
    fn raw_mul(&self, a: &[BaseElem], b: &[BaseElem]) -> [BaseElem; 2 * MAX_EXT_DEGREE] {
        let mut buf = [0 as BaseElem; 2 * MAX_EXT_DEGREE];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    buf[i + j] ^= self.base.mul(ai, bj);
                }
            }
        }
        self.reduce(&mut buf[..2 * self.m - 1]);
        buf
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.check(a);
        self.check(b);
        let buf = self.raw_mul(&a.coeffs, &b.coeffs);
        FieldElem {
            coeffs: buf[..self.m].to_vec(),
        }
    }

    /// `dst += a * b` without allocating; the workhorse of the solvers.
    pub fn mul_acc(&self, dst: &mut FieldElem, a: &FieldElem, b: &FieldElem) {
        self.check(dst);
        self.check(a);
        self.check(b);
        let buf = self.raw_mul(&a.coeffs, &b.coeffs);
        for (x, &y) in dst.coeffs.iter_mut().zip(&buf[..self.m]) {
            *x ^= y;
        }
    }

    /// Squaring; in characteristic 2 only the `m` coefficient squares survive.
    pub fn square(&self, a: &FieldElem) -> FieldElem {
        self.check(a);
        let mut buf = [0 as BaseElem; 2 * MAX_EXT_DEGREE];
        for (i, &ai) in a.coeffs.iter().enumerate() {
            if ai != 0 {
                buf[2 * i] = self.base.mul(ai, ai);
            }
        }
        self.reduce(&mut buf[..2 * self.m - 1]);
        FieldElem {
            coeffs: buf[..self.m].to_vec(),
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm over `F_q[x]`.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        self.check(a);
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        // Invariant: u*a == r and v*a == s (mod irreducible).
        let mut r: Vec<BaseElem> = self.irreducible.clone();
        let mut s: Vec<BaseElem> = a.coeffs.clone();
        pq_trim(&mut r);
        pq_trim(&mut s);
        let mut u: Vec<BaseElem> = vec![];
        let mut v: Vec<BaseElem> = vec![1];
        loop {
            let ds = pq_degree(&s).expect("s stays nonzero for irreducible modulus");
            if ds == 0 {
                // s is a nonzero constant: v/s is the inverse.
                let c = self.base.inv(s[0])?;
                let mut coeffs = vec![0; self.m];
                for (i, &vc) in v.iter().enumerate() {
                    coeffs[i] = self.base.mul(vc, c);
                }
                return Ok(FieldElem { coeffs });
            }
            // r -= (r div s) * s, mirrored on u -= (r div s) * v.
            let lead_inv = self.base.inv(s[ds])?;
            while let Some(dr) = pq_degree(&r) {
                if dr < ds {
                    break;
                }
                let factor = self.base.mul(r[dr], lead_inv);
                let shift = dr - ds;
                for t in 0..=ds {
                    if s[t] != 0 {
                        r[shift + t] ^= self.base.mul(factor, s[t]);
                    }
                }
                if u.len() < v.len() + shift {
                    u.resize(v.len() + shift, 0);
                }
                for t in 0..v.len() {
                    if v[t] != 0 {
                        u[shift + t] ^= self.base.mul(factor, v[t]);
                    }
                }
                pq_trim(&mut r);
            }
            std::mem::swap(&mut r, &mut s);
            std::mem::swap(&mut u, &mut v);
        }
    }

    /// Scalar action of `F_q` on the extension: coordinate-wise scaling.
    pub fn base_scalar_mul(&self, c: BaseElem, a: &FieldElem) -> FieldElem {
        self.check(a);
        assert!((c as usize) < self.base.q(), "scalar {c} out of range");
        FieldElem {
            coeffs: a.coeffs.iter().map(|&x| self.base.mul(c, x)).collect(),
        }
    }

    /// `a^(q^i)`. `F_q`-linear; the identity when `i` is a multiple of `m`.
    pub fn frobenius(&self, a: &FieldElem, i: usize) -> FieldElem {
        self.check(a);
        let mut v = a.clone();
        for _ in 0..(i % self.m) {
            v = self.frobenius_once(&v);
        }
        v
    }

    /// `a^q` via `s` successive squarings.
    pub fn frobenius_once(&self, a: &FieldElem) -> FieldElem {
        let mut v = a.clone();
        for _ in 0..self.base.s() {
            v = self.square(&v);
        }
        v
    }

    /// Packed size of one element: coordinate `i` occupies bits
    /// `[i*s, (i+1)*s)` of a little-endian bit stream.
    pub fn elem_byte_len(&self) -> usize {
        (self.base.s() as usize * self.m).div_ceil(8)
    }

    pub fn pack(&self, a: &FieldElem) -> Vec<u8> {
        self.check(a);
        let s = self.base.s() as usize;
        let mut bytes = vec![0u8; self.elem_byte_len()];
        for (i, &c) in a.coeffs.iter().enumerate() {
            for j in 0..s {
                if (c >> j) & 1 != 0 {
                    let bit = i * s + j;
                    bytes[bit / 8] |= 1 << (bit % 8);
                }
            }
        }
        bytes
    }

    pub fn unpack(&self, bytes: &[u8]) -> Result<FieldElem> {
        if bytes.len() != self.elem_byte_len() {
            return Err(Error::ShapeMismatch {
                expected: self.elem_byte_len(),
                got: bytes.len(),
            });
        }
        let s = self.base.s() as usize;
        let mut coeffs = vec![0 as BaseElem; self.m];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            for j in 0..s {
                let bit = i * s + j;
                if bytes[bit / 8] >> (bit % 8) & 1 != 0 {
                    *slot |= 1 << j;
                }
            }
        }
        // Slack bits past m*s must be clear.
        for bit in self.m * s..bytes.len() * 8 {
            if bytes[bit / 8] >> (bit % 8) & 1 != 0 {
                return Err(Error::InvalidParams(
                    "nonzero padding bits in packed element".into(),
                ));
            }
        }
        Ok(FieldElem { coeffs })
    }
}

// ---------------------------------------------------------------------------
// F_q-span of extension elements (rank computations)
// ---------------------------------------------------------------------------

/// Incrementally tracked `F_q`-span of coordinate vectors in `F_q^m`.
/// Rows are kept reduced; a bit-matrix path handles the q = 2 case.
pub struct FqSpan<'a> {
    ext: &'a ExtParams,
    rows: Vec<Vec<BaseElem>>,
    pivots: Vec<usize>,
    bit_rows: Vec<u64>,
    use_bits: bool,
}

impl<'a> FqSpan<'a> {
    pub fn new(ext: &'a ExtParams) -> Self {
        let use_bits = ext.base().q() == 2 && ext.degree() <= 64;
        Self {
            ext,
            rows: Vec::new(),
            pivots: Vec::new(),
            bit_rows: Vec::new(),
            use_bits,
        }
    }

    #[cfg(test)]
    fn new_generic(ext: &'a ExtParams) -> Self {
        let mut s = Self::new(ext);
        s.use_bits = false;
        s
    }

    pub fn dim(&self) -> usize {
        if self.use_bits {
            self.bit_rows.len()
        } else {
            self.rows.len()
        }
    }

    /// Adds a vector to the span; returns true iff the dimension grew.
    pub fn insert(&mut self, v: &FieldElem) -> bool {
        self.ext.check(v);
        if self.use_bits {
            let mut w: u64 = 0;
            for (i, &c) in v.coeffs.iter().enumerate() {
                if c != 0 {
                    w |= 1 << i;
                }
            }
            for &row in &self.bit_rows {
                let pivot = 1u64 << (63 - row.leading_zeros());
                if w & pivot != 0 {
                    w ^= row;
                }
            }
            if w == 0 {
                return false;
            }
            self.bit_rows.push(w);
            return true;
        }

        let base = self.ext.base();
        let mut w = v.coeffs.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = w[p];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(row) {
                    *x ^= base.mul(c, y);
                }
            }
        }
        match w.iter().rposition(|&c| c != 0) {
            None => false,
            Some(p) => {
                let inv = base.inv(w[p]).expect("nonzero pivot");
                for x in w.iter_mut() {
                    *x = base.mul(inv, *x);
                }
                self.rows.push(w);
                self.pivots.push(p);
                true
            }
        }
    }
}

/// Rank over `F_q` of the `m x N` matrix whose columns are the coordinate
/// vectors of `v`.
pub fn rank_over_base(ext: &ExtParams, v: &[FieldElem]) -> usize {
    let mut span = FqSpan::new(ext);
    for e in v {
        span.insert(e);
    }
    span.dim()
}

/// Dimension of the `F_q`-span of `v`; alias of [`rank_over_base`], named
/// for callers that reason about evaluation-point spans.
pub fn span_dim_over_base(ext: &ExtParams, v: &[FieldElem]) -> usize {
    rank_over_base(ext, v)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::Rng;

    pub(crate) fn rand_elem(ext: &ExtParams, rng: &mut impl Rng) -> FieldElem {
        let coeffs: Vec<BaseElem> = (0..ext.degree())
            .map(|_| rng.gen_range(0..ext.base().q()) as BaseElem)
            .collect();
        ext.elem_from_coeffs(&coeffs).unwrap()
    }
}
