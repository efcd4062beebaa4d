//! Arithmetic in `GF(p^m)` with an optional sub-field tower `GF(q) ⊂ GF(q^r)`.
//!
//! Elements live in a polynomial basis over `GF(p)`; their canonical integer
//! encoding is the base-`p` value of the coefficient vector (`c_0 + c_1 p + ...`).
//! Internally an [`FElem`] stores a discrete logarithm with respect to a fixed
//! primitive element, so multiplication is index addition and addition goes
//! through a Zech table. Conversion to the canonical encoding is a table lookup.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field the table-driven backend accepts.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

/// A field element. The payload is `0` for zero and `k + 1` for `g^k`.
///
/// The derived `Eq`/`Hash` are exact; there is intentionally no `Ord`, since
/// canonical ordering is defined by [`FieldCtx::to_int`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FElem(u32);

impl FElem {
    pub const ZERO: FElem = FElem(0);
    pub const ONE: FElem = FElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The sub-field tower `q = p^s`, `m = s * r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub s: u32,
    pub r: u32,
}

/// Serialized form of a field: `{"p", "m", "tower": [s, r] | null, "modulus"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub tower: Option<[u32; 2]>,
    pub modulus: Vec<u32>,
}

#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    m: u32,
    size: u32,
    tower: Option<Tower>,
    /// Ascending coefficients, length `m + 1`, leading entry 1.
    modulus: Vec<u32>,
    /// `exp[k]` = canonical integer of `g^k`, `k < size - 1`.
    exp: Vec<u32>,
    /// canonical integer -> internal representation.
    log: Vec<u32>,
    /// `zech[d]` = representation of `1 + g^d`.
    zech: Vec<u32>,
    minus_one: FElem,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("tower", &self.tower)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.m == other.m
            && self.modulus == other.modulus
            && self.tower == other.tower
    }
}

impl Eq for FieldCtx {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q = p^s` into `(p, s)`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut s = 0;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        s += 1;
    }
    (rest == 1).then_some((p as u32, s))
}

impl FieldCtx {
    /// Builds `GF(p^m)` with the smallest monic irreducible modulus, where
    /// candidate moduli are ordered by the base-`p` integer of their
    /// non-leading coefficients (constant term is the least significant digit).
    pub fn new(p: u32, m: u32, tower: Option<(u32, u32)>) -> Result<Self> {
        Self::check_params(p, m, tower)?;
        let count = (p as u64).pow(m);
        for v in 0..count {
            let mut modulus = digits(v, p, m);
            modulus.push(1);
            if fp::is_irreducible(&modulus, p) {
                return Self::with_modulus(p, m, tower, modulus);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Builds `GF(q^r)` with the tower `GF(q) ⊂ GF(q^r)` declared.
    pub fn tower(q: u64, r: u32) -> Result<Self> {
        let (p, s) = prime_power(q).ok_or(Error::NonPrimeCharacteristic(q as u32))?;
        Self::new(p, s * r, Some((s, r)))
    }

    pub fn with_modulus(p: u32, m: u32, tower: Option<(u32, u32)>, modulus: Vec<u32>) -> Result<Self> {
        Self::check_params(p, m, tower)?;
        if modulus.len() != m as usize + 1 || modulus[m as usize] != 1 {
            return Err(Error::InvalidModulus(format!(
                "expected {} monic coefficients, got {:?}",
                m + 1,
                modulus
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus("coefficient out of range".into()));
        }
        if !fp::is_irreducible(&modulus, p) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
        }
        let size = (p as u64).pow(m) as u32;
        let (exp, log) = build_log_tables(p, m, size, &modulus);
        let order = size - 1;
        let mut zech = vec![0u32; order as usize];
        for d in 0..order {
            let v = exp[d as usize];
            let c0 = v % p;
            let w = v - c0 + (c0 + 1) % p;
            zech[d as usize] = log[w as usize];
        }
        let minus_one = if p == 2 { FElem::ONE } else { FElem(order / 2 + 1) };
        Ok(FieldCtx {
            p,
            m,
            size,
            tower: tower.map(|(s, r)| Tower { s, r }),
            modulus,
            exp,
            log,
            zech,
            minus_one,
        })
    }

    fn check_params(p: u32, m: u32, tower: Option<(u32, u32)>) -> Result<()> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if m == 0 {
            return Err(Error::InvalidSpec("extension degree m must be >= 1".into()));
        }
        if let Some((s, r)) = tower {
            if s.checked_mul(r) != Some(m) {
                return Err(Error::TowerMismatch { s, r, m });
            }
        }
        let size = (p as f64).powi(m as i32);
        if size > MAX_FIELD_SIZE as f64 {
            return Err(Error::FieldTooLarge { p, m });
        }
        Ok(())
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::with_modulus(spec.p, spec.m, spec.tower.map(|[s, r]| (s, r)), spec.modulus.clone())
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            m: self.m,
            tower: self.tower.map(|t| [t.s, t.r]),
            modulus: self.modulus.clone(),
        }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn tower_info(&self) -> Option<Tower> {
        self.tower
    }

    /// `q` of the declared tower.
    pub fn subfield_size(&self) -> Result<u32> {
        let t = self.tower.ok_or(Error::NoTowerDeclared)?;
        Ok(self.p.pow(t.s))
    }

    pub fn ext_degree(&self) -> Result<u32> {
        Ok(self.tower.ok_or(Error::NoTowerDeclared)?.r)
    }

    // -- encoding ---------------------------------------------------------

    #[inline]
    pub fn to_int(&self, a: FElem) -> u32 {
        if a.0 == 0 {
            0
        } else {
            self.exp[(a.0 - 1) as usize]
        }
    }

    #[inline]
    pub fn from_int(&self, v: u32) -> Result<FElem> {
        if v >= self.size {
            return Err(Error::ContextMismatch(format!(
                "element {v} outside a field of size {}",
                self.size
            )));
        }
        Ok(FElem(self.log[v as usize]))
    }

    /// Unchecked variant of [`from_int`](Self::from_int) for values known to be in range.
    #[inline]
    pub fn elem(&self, v: u32) -> FElem {
        FElem(self.log[v as usize])
    }

    /// Validates that `a` is a representation produced by this field.
    pub fn check(&self, a: FElem) -> Result<FElem> {
        if a.0 >= self.size {
            return Err(Error::ContextMismatch(format!(
                "element repr {} does not belong to a field of size {}",
                a.0, self.size
            )));
        }
        Ok(a)
    }

    pub fn coeffs(&self, a: FElem) -> Vec<u32> {
        digits(self.to_int(a) as u64, self.p, self.m)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FElem> {
        if coeffs.len() != self.m as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::ContextMismatch(format!(
                "coefficient vector {coeffs:?} is not an element of GF({}^{})",
                self.p, self.m
            )));
        }
        let v = coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64);
        self.from_int(v as u32)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FElem> + '_ {
        (0..self.size).map(move |v| self.elem(v))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FElem> + '_ {
        (1..self.size).map(move |v| self.elem(v))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FElem {
        FElem(rng.gen_range(0..self.size))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FElem {
        FElem(rng.gen_range(1..self.size))
    }

    /// A fixed primitive element (the generator of the log tables).
    pub fn primitive(&self) -> FElem {
        FElem(if self.size == 2 { 1 } else { 2 })
    }

    // -- arithmetic -------------------------------------------------------

    #[inline]
    fn order(&self) -> u32 {
        self.size - 1
    }

    #[inline]
    pub fn mul(&self, a: FElem, b: FElem) -> FElem {
        if a.0 == 0 || b.0 == 0 {
            return FElem::ZERO;
        }
        let s = (a.0 - 1) + (b.0 - 1);
        let n = self.order();
        FElem(if s >= n { s - n } else { s } + 1)
    }

    #[inline]
    pub fn add(&self, a: FElem, b: FElem) -> FElem {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let n = self.order();
        let (i, j) = (a.0 - 1, b.0 - 1);
        let d = if j >= i { j - i } else { j + n - i };
        let z = self.zech[d as usize];
        if z == 0 {
            return FElem::ZERO;
        }
        let s = i + (z - 1);
        FElem(if s >= n { s - n } else { s } + 1)
    }

    #[inline]
    pub fn neg(&self, a: FElem) -> FElem {
        self.mul(a, self.minus_one)
    }

    #[inline]
    pub fn sub(&self, a: FElem, b: FElem) -> FElem {
        self.add(a, self.neg(b))
    }

    /// `a - c * b`, the inner step of every elimination loop.
    #[inline]
    pub fn sub_mul(&self, a: FElem, c: FElem, b: FElem) -> FElem {
        self.add(a, self.mul(self.neg(c), b))
    }

    pub fn inv(&self, a: FElem) -> Result<FElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let k = a.0 - 1;
        Ok(FElem(if k == 0 { 0 } else { self.order() - k } + 1))
    }

    pub fn div(&self, a: FElem, b: FElem) -> Result<FElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for arbitrary non-negative `e`; `0^0 = 1`.
    #[inline]
    pub fn pow(&self, a: FElem, e: u128) -> FElem {
        if e == 0 {
            return FElem::ONE;
        }
        if a.0 == 0 {
            return FElem::ZERO;
        }
        let n = self.order() as u128;
        let k = ((a.0 - 1) as u128 * (e % n)) % n;
        FElem(k as u32 + 1)
    }

    /// Square-and-multiply power computed in the polynomial basis without the
    /// log tables. Used to cross-check [`pow`](Self::pow).
    pub fn pow_by_squaring(&self, a: FElem, mut e: u128) -> FElem {
        let mut base = self.coeffs(a);
        let mut acc = vec![0u32; self.m as usize];
        acc[0] = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp::mul_mod(&acc, &base, &self.modulus, self.p);
            }
            base = fp::mul_mod(&base, &base, &self.modulus, self.p);
            e >>= 1;
        }
        self.from_coeffs(&acc).expect("reduced coefficient vector")
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: FElem, k: u32) -> FElem {
        self.pow(a, (self.p as u128).pow(k))
    }

    // -- tower maps -------------------------------------------------------

    fn tower_q_r(&self) -> Result<(u128, u32)> {
        let t = self.tower.ok_or(Error::NoTowerDeclared)?;
        Ok(((self.p as u128).pow(t.s), t.r))
    }

    /// `a^q == a`.
    pub fn in_subfield(&self, a: FElem) -> Result<bool> {
        let (q, _) = self.tower_q_r()?;
        Ok(self.pow(a, q) == a)
    }

    /// Relative trace `sum_{i<r} a^(q^i)`.
    pub fn rel_trace(&self, a: FElem) -> Result<FElem> {
        let (q, r) = self.tower_q_r()?;
        let mut acc = FElem::ZERO;
        let mut qi = 1u128;
        for _ in 0..r {
            acc = self.add(acc, self.pow(a, qi));
            qi *= q;
        }
        Ok(acc)
    }

    /// Relative norm `a^((q^r - 1)/(q - 1))`.
    pub fn rel_norm(&self, a: FElem) -> Result<FElem> {
        let (q, r) = self.tower_q_r()?;
        let e = (q.pow(r) - 1) / (q - 1);
        Ok(self.pow(a, e))
    }

    /// Number of `γ` in the field with `Tr(γ) = a` and `Norm(γ) = b`,
    /// by exhaustive enumeration.
    pub fn fiber_count(&self, a: FElem, b: FElem) -> Result<usize> {
        if !self.in_subfield(a)? || !self.in_subfield(b)? {
            return Err(Error::ArgNotInSubfield);
        }
        let mut count = 0;
        for g in self.elements() {
            if self.rel_trace(g)? == a && self.rel_norm(g)? == b {
                count += 1;
            }
        }
        Ok(count)
    }

    /// The elements of the sub-field `GF(q)` in canonical order.
    pub fn subfield_elements(&self) -> Result<Vec<FElem>> {
        let (q, _) = self.tower_q_r()?;
        Ok(self.elements().filter(|&a| self.pow(a, q) == a).collect())
    }

    /// Tables of `(Norm(a), Tr(a))` indexed by canonical integer.
    pub fn norm_trace_tables(&self) -> Result<(Vec<FElem>, Vec<FElem>)> {
        let mut norms = Vec::with_capacity(self.size as usize);
        let mut traces = Vec::with_capacity(self.size as usize);
        for a in self.elements() {
            norms.push(self.rel_norm(a)?);
            traces.push(self.rel_trace(a)?);
        }
        Ok((norms, traces))
    }
}

/// Base-`p` digits of `v`, least significant first, padded to `m`.
fn digits(mut v: u64, p: u32, m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push((v % p as u64) as u32);
        v /= p as u64;
    }
    out
}

fn build_log_tables(p: u32, m: u32, size: u32, modulus: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let order = size - 1;
    let to_int = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    // try x first, then every other element in canonical order
    let first = if m >= 2 { p } else { 1.min(order) };
    let candidates = std::iter::once(first).chain((1..size).filter(move |&v| v != first));
    for g in candidates {
        let gc = digits(g as u64, p, m);
        let mut exp = Vec::with_capacity(order as usize);
        let mut cur = digits(1, p, m);
        let mut ok = true;
        for k in 0..order {
            let v = to_int(&cur);
            if k > 0 && v == 1 {
                ok = false;
                break;
            }
            exp.push(v);
            cur = fp::mul_mod(&cur, &gc, modulus, p);
        }
        if !ok {
            continue;
        }
        let mut log = vec![0u32; size as usize];
        for (k, &v) in exp.iter().enumerate() {
            log[v as usize] = k as u32 + 1;
        }
        return (exp, log);
    }
    unreachable!("the multiplicative group of a finite field is cyclic")
}

/// Small dense polynomial arithmetic over the prime field, used only while
/// constructing a field.
mod fp {
    fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    fn rem(a: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let f = trim(f.to_vec());
        let df = f.len() - 1;
        let lead_inv = inv(f[df], p) as u64;
        while a.len() > df {
            let top = a.len() - 1;
            let c = a[top] as u64 * lead_inv % p as u64;
            if c != 0 {
                for (i, &fi) in f.iter().enumerate() {
                    let idx = top - df + i;
                    let sub = c * fi as u64 % p as u64;
                    a[idx] = ((a[idx] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
            a = trim(a);
        }
        a
    }

    /// `a * b mod f`, result padded to `deg f`.
    pub fn mul_mod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
        let mut prod = vec![0u64; a.len() + b.len()];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let prod: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
        let mut r = rem(&prod, f, p);
        r.resize(f.len() - 1, 0);
        r
    }

    fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or: `f` of degree `m` is irreducible iff `gcd(f, x^(p^i) - x) = 1`
    /// for `1 <= i <= m/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        if f[0] == 0 {
            return false;
        }
        let mut h = vec![0u32; m];
        h[1] = 1;
        for _ in 0..m / 2 {
            // h <- h^p mod f
            let mut acc = vec![0u32; m];
            acc[0] = 1;
            let mut base = h.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_mod(&acc, &base, f, p);
                }
                base = mul_mod(&base, &base, f, p);
                e >>= 1;
            }
            h = acc;
            let mut d = h.clone();
            d[1] = (d[1] + p - 1) % p;
            let g = gcd(f, &d, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}
