//! Dense univariate polynomials over a [`FieldCtx`].

use crate::error::{Error, Result};
use crate::field::{FElem, FieldCtx};

/// Ascending coefficients with trailing zeros stripped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<FElem>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FElem::ONE)
    }

    pub fn constant(c: FElem) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: FElem, k: usize) -> Self {
        let mut v = vec![FElem::ZERO; k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn x() -> Self {
        Self::monomial(FElem::ONE, 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<FElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(field: &FieldCtx, ints: &[u32]) -> Result<Self> {
        let coeffs = ints.iter().map(|&v| field.from_int(v)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    pub fn to_ints(&self, field: &FieldCtx) -> Vec<u32> {
        self.coeffs.iter().map(|&c| field.to_int(c)).collect()
    }

    pub fn coeffs(&self) -> &[FElem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FElem {
        self.coeffs.get(k).copied().unwrap_or(FElem::ZERO)
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> FElem {
        self.coeffs.last().copied().unwrap_or(FElem::ZERO)
    }

    pub fn add(&self, other: &Self, f: &FieldCtx) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(v)
    }

    pub fn sub(&self, other: &Self, f: &FieldCtx) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(v)
    }

    pub fn scale(&self, c: FElem, f: &FieldCtx) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Schoolbook product.
    pub fn mul(&self, other: &Self, f: &FieldCtx) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![FElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::from_coeffs(out)
    }

    pub fn eval(&self, x: FElem, f: &FieldCtx) -> FElem {
        self.coeffs.iter().rev().fold(FElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn monic(&self, f: &FieldCtx) -> Self {
        match f.inv(self.leading()) {
            Ok(inv) => self.scale(inv, f),
            Err(_) => Self::zero(),
        }
    }

    /// `(quotient, remainder)` with `deg remainder < deg divisor`.
    pub fn divmod(&self, divisor: &Self, f: &FieldCtx) -> Result<(Self, Self)> {
        if divisor.is_zero() {
            return Err(Error::DivisionByZeroPoly);
        }
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = f.inv(divisor.leading())?;
        // nonzero lower terms of the divisor; sparse divisors reduce in O(n * nnz)
        let terms: Vec<(usize, FElem)> = divisor.coeffs[..dd]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (i, c))
            .collect();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FElem::ZERO; rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            let c = f.mul(rem[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            quot[top - dd] = c;
            rem[top] = FElem::ZERO;
            let shift = top - dd;
            for &(i, d) in &terms {
                rem[shift + i] = f.sub_mul(rem[shift + i], c, d);
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, divisor: &Self, f: &FieldCtx) -> Result<Self> {
        Ok(self.divmod(divisor, f)?.1)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self, f: &FieldCtx) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn powmod(&self, mut e: u128, modulus: &Self, f: &FieldCtx) -> Result<Self> {
        let mut base = self.rem(modulus, f)?;
        let mut acc = Self::one().rem(modulus, f)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(modulus, f)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f).rem(modulus, f)?;
            }
        }
        Ok(acc)
    }

    /// `self^p` using the characteristic-`p` identity
    /// `(sum c_i x^i)^p = sum c_i^p x^(ip)`.
    pub fn frobenius(&self, f: &FieldCtx) -> Self {
        let p = f.characteristic() as usize;
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![FElem::ZERO; (self.coeffs.len() - 1) * p + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * p] = f.pow(c, p as u128);
        }
        Self::from_coeffs(out)
    }

    /// `self^(p^k) mod modulus` through `k` Frobenius steps. Each step costs
    /// one linear pass plus one reduction, so `x^(p^k) mod m` is cheap even
    /// when `p^k` is far beyond anything square-and-multiply could expand.
    pub fn pow_p_power_mod(&self, k: u32, modulus: &Self, f: &FieldCtx) -> Result<Self> {
        let mut acc = self.rem(modulus, f)?;
        for _ in 0..k {
            acc = acc.frobenius(f).rem(modulus, f)?;
        }
        Ok(acc)
    }

    /// Number of distinct roots in the whole field, via
    /// `deg gcd(self, x^Q - x)` with `x^Q` reduced modulo `self`.
    pub fn count_field_roots(&self, f: &FieldCtx) -> Result<usize> {
        if self.is_zero() {
            return Ok(f.size() as usize);
        }
        if self.degree() == 0 {
            return Ok(0);
        }
        let xq = Self::x().pow_p_power_mod(f.degree(), self, f)?;
        let h = xq.sub(&Self::x(), f);
        Ok(self.gcd(&h, f).degree() as usize)
    }

    /// Roots counted by evaluating at every field element.
    pub fn count_field_roots_brute(&self, f: &FieldCtx) -> usize {
        f.elements().filter(|&x| self.eval(x, f).is_zero()).count()
    }

    /// Lagrange interpolation through `(x_i, y_i)` with distinct `x_i`.
    pub fn interpolate(points: &[(FElem, FElem)], f: &FieldCtx) -> Result<Self> {
        let mut acc = Self::zero();
        for (i, &(xi, yi)) in points.iter().enumerate() {
            let mut basis = Self::one();
            let mut denom = FElem::ONE;
            for (j, &(xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = basis.mul(&Self::from_coeffs(vec![f.neg(xj), FElem::ONE]), f);
                denom = f.mul(denom, f.sub(xi, xj));
            }
            let c = f.div(yi, denom)?;
            acc = acc.add(&basis.scale(c, f), f);
        }
        Ok(acc)
    }
}
