use std::collections::BTreeMap;

use crate::error::Result;
use crate::field::{FElem, FieldCtx};
use crate::poly::UniPoly;

/// Sparse bivariate polynomial `sum c_{a,b} x^a y^b`; zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u64, u64), FElem>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(a: u64, b: u64) -> Self {
        let mut p = Self::zero();
        p.terms.insert((a, b), FElem::ONE);
        p
    }

    pub fn constant(c: FElem) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0), c);
        }
        p
    }

    /// Adds `c x^a y^b` to the polynomial.
    pub fn add_term(&mut self, a: u64, b: u64, c: FElem, f: &FieldCtx) {
        let cur = self.terms.get(&(a, b)).copied().unwrap_or(FElem::ZERO);
        let next = f.add(cur, c);
        if next.is_zero() {
            self.terms.remove(&(a, b));
        } else {
            self.terms.insert((a, b), next);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u64, u64), FElem)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|&(a, b)| (a + b) as i64).max().unwrap_or(-1)
    }

    pub fn eval(&self, x: FElem, y: FElem, f: &FieldCtx) -> FElem {
        self.terms.iter().fold(FElem::ZERO, |acc, (&(a, b), &c)| {
            let t = f.mul(c, f.mul(f.pow(x, a as u128), f.pow(y, b as u128)));
            f.add(acc, t)
        })
    }

    /// `self(x, alpha x + beta)` expanded exactly.
    pub fn substitute_line(&self, alpha: FElem, beta: FElem, f: &FieldCtx) -> UniPoly {
        let max_deg = self.total_degree().max(0) as usize;
        let mut out = vec![FElem::ZERO; max_deg + 1];
        for (&(a, b), &c) in &self.terms {
            for (k, coeff) in linear_power_terms(alpha, beta, b, f) {
                let idx = a as usize + k as usize;
                out[idx] = f.add(out[idx], f.mul(c, coeff));
            }
        }
        UniPoly::from_coeffs(out)
    }

    pub fn check(&self, f: &FieldCtx) -> Result<()> {
        for &c in self.terms.values() {
            f.check(c)?;
        }
        Ok(())
    }
}

/// Nonzero terms `(k, C(b,k) alpha^k beta^(b-k))` of `(alpha x + beta)^b`.
/// Only `k` whose base-`p` digits are dominated by those of `b` survive
/// (Lucas), so `(alpha x + beta)^(q^i)` has two terms.
pub fn linear_power_terms(alpha: FElem, beta: FElem, b: u64, f: &FieldCtx) -> Vec<(u64, FElem)> {
    let p = f.characteristic() as u64;
    let mut digits = Vec::new();
    let mut rest = b;
    while rest > 0 {
        digits.push(rest % p);
        rest /= p;
    }
    // enumerate digit-dominated k with their Lucas binomial residues
    let mut acc: Vec<(u64, u64)> = vec![(0, 1)];
    let mut place = 1u64;
    for &d in &digits {
        let mut next = Vec::with_capacity(acc.len() * (d as usize + 1));
        for &(k, binom) in &acc {
            for j in 0..=d {
                next.push((k + j * place, binom * small_binomial(d, j, p) % p));
            }
        }
        acc = next;
        place *= p;
    }
    acc.into_iter()
        .filter_map(|(k, binom)| {
            let c = f.mul(
                f.mul(f.pow(alpha, k as u128), f.pow(beta, (b - k) as u128)),
                int_elem(binom, f),
            );
            (!c.is_zero()).then_some((k, c))
        })
        .collect()
}

fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r % p
}

/// The image of the integer `n` in the prime field.
pub fn int_elem(n: u64, f: &FieldCtx) -> FElem {
    f.elem((n % f.characteristic() as u64) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_product_evaluation() {
        let f = FieldCtx::new(3, 2, None).unwrap();
        let c = f.elem(5);
        let k = BiPoly::constant(c);
        for x in f.elements() {
            assert_eq!(k.eval(x, f.elem(7), &f), c);
        }
        let xy = BiPoly::monomial(1, 1);
        for x in f.elements() {
            for y in f.elements() {
                assert_eq!(xy.eval(x, y, &f), f.mul(x, y));
            }
        }
    }

    #[test]
    fn linear_power_matches_repeated_multiplication() {
        let f = FieldCtx::new(3, 2, None).unwrap();
        let alpha = f.elem(4);
        let beta = f.elem(7);
        let lin = UniPoly::from_coeffs(vec![beta, alpha]);
        let mut pow = UniPoly::one();
        for b in 0..30u64 {
            let mut v = vec![FElem::ZERO; b as usize + 1];
            for (k, c) in linear_power_terms(alpha, beta, b, &f) {
                v[k as usize] = c;
            }
            assert_eq!(UniPoly::from_coeffs(v), pow, "b = {b}");
            pow = pow.mul(&lin, &f);
        }
    }

    #[test]
    fn substitution_matches_pointwise_evaluation() {
        let f = FieldCtx::new(2, 3, None).unwrap();
        let mut p = BiPoly::zero();
        p.add_term(2, 3, f.elem(3), &f);
        p.add_term(0, 4, FElem::ONE, &f);
        p.add_term(5, 0, f.elem(6), &f);
        let alpha = f.elem(5);
        let beta = f.elem(2);
        let m = p.substitute_line(alpha, beta, &f);
        for x in f.elements() {
            let y = f.add(f.mul(alpha, x), beta);
            assert_eq!(m.eval(x, &f), p.eval(x, y, &f));
        }
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let f = FieldCtx::new(2, 1, None).unwrap();
        let mut p = BiPoly::monomial(1, 1);
        p.add_term(1, 1, FElem::ONE, &f);
        assert!(p.is_zero());
        assert_eq!(p.total_degree(), -1);
    }
}
