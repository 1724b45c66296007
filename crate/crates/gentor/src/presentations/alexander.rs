//! Alexander polynomials by Fox calculus: free derivatives of relators,
//! evaluated through the abelianization onto Z, then the gcd of maximal
//! minors of the Alexander matrix, unit-normalized.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An integer Laurent polynomial in one variable `t`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(0, BigInt::one())
    }

    pub fn monomial(exp: i64, coeff: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        LaurentPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_assign(&mut self, other: &LaurentPoly) {
        for (e, c) in &other.coeffs {
            let entry = self.coeffs.entry(*e).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                self.coeffs.remove(e);
            }
        }
    }

    pub fn sub_assign(&mut self, other: &LaurentPoly) {
        self.add_assign(&other.neg());
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let entry = out.coeffs.entry(e1 + e2).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn degree_span(&self) -> Option<i64> {
        Some(self.max_exp()? - self.min_exp()?)
    }

    pub fn coefficient(&self, exp: i64) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn evaluate_at_int(&self, x: i64) -> BigRational {
        let x = BigRational::from(BigInt::from(x));
        let mut total = BigRational::zero();
        for (e, c) in &self.coeffs {
            let mut term = BigRational::from(c.clone());
            let mut p = *e;
            while p > 0 {
                term *= &x;
                p -= 1;
            }
            while p < 0 {
                term /= &x;
                p += 1;
            }
            total += term;
        }
        total
    }

    /// Removes the `t`-power factor and makes the leading coefficient
    /// positive: the unique unit-normal representative.
    pub fn normalized(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let shift = self.min_exp().unwrap();
        let leading = self.coeffs.values().next_back().unwrap();
        let flip = leading.is_negative();
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e - shift, if flip { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Ascending coefficient vector starting at `t^0`; meaningful after
    /// `normalized`.
    fn dense(&self) -> Vec<BigInt> {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo..=hi).map(|e| self.coefficient(e)).collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            match (*e, mag == BigInt::one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}*t")?,
                (_, true) => write!(f, "t^{e}")?,
                (_, false) => write!(f, "{mag}*t^{e}")?,
            }
        }
        Ok(())
    }
}

fn bigint_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn content(poly: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in poly {
        g = bigint_gcd(&g, c);
    }
    g
}

/// Gcd of two Laurent polynomials up to units: Euclid over Q on the
/// primitive parts, times the gcd of the contents, unit-normalized.
pub fn laurent_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    let da = a.normalized().dense();
    let db = b.normalized().dense();
    let ca = content(&da);
    let cb = content(&db);
    let cg = bigint_gcd(&ca, &cb);

    let to_q = |p: &[BigInt]| -> Vec<BigRational> {
        p.iter().map(|c| BigRational::from(c.clone())).collect()
    };
    let trim = |p: &mut Vec<BigRational>| {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    };
    let mut u = to_q(&da);
    let mut v = to_q(&db);
    trim(&mut u);
    trim(&mut v);
    while !v.is_empty() {
        // u mod v over Q
        while u.len() >= v.len() && !u.is_empty() {
            let factor = u.last().unwrap() / v.last().unwrap();
            let shift = u.len() - v.len();
            for (i, c) in v.iter().enumerate() {
                let sub = &factor * c;
                u[shift + i] -= sub;
            }
            trim(&mut u);
        }
        std::mem::swap(&mut u, &mut v);
    }
    // u is the gcd over Q; rescale to a primitive integer polynomial
    if u.is_empty() {
        return LaurentPoly::zero();
    }
    let mut denom_lcm = BigInt::one();
    for c in &u {
        let d = c.denom();
        denom_lcm = &denom_lcm / bigint_gcd(&denom_lcm, d) * d;
    }
    let ints: Vec<BigInt> = u
        .iter()
        .map(|c| (c * BigRational::from(denom_lcm.clone())).to_integer())
        .collect();
    let cont = content(&ints);
    let mut out = LaurentPoly::zero();
    for (e, c) in ints.iter().enumerate() {
        out.add_assign(&LaurentPoly::monomial(e as i64, c / &cont * &cg));
    }
    out.normalized()
}

/// Determinant by cofactor expansion; matrix sizes here are tiny.
pub fn determinant(matrix: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = matrix.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    if n == 1 {
        return matrix[0][0].clone();
    }
    let mut total = LaurentPoly::zero();
    for j in 0..n {
        if matrix[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<LaurentPoly>> = matrix[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = matrix[0][j].mul(&determinant(&minor));
        if j % 2 == 0 {
            total.add_assign(&term);
        } else {
            total.sub_assign(&term);
        }
    }
    total
}

/// Fox derivative of a free word (syllable form) with respect to
/// generator `gen`, evaluated at `x_j -> t^{weights[j]}`.
///
/// Uses `d(uv) = du + ab(u) dv`, `d(x^e)` summed letterwise.
pub fn fox_derivative_evaluated(
    word: &[(usize, i64)],
    gen: usize,
    weights: &[i64],
) -> LaurentPoly {
    let mut result = LaurentPoly::zero();
    let mut prefix_weight: i64 = 0; // abelianized image of the processed prefix
    for &(g, e) in word {
        if g == gen {
            // d(x^e) = sum_{i=0..e-1} x^i  (e > 0)
            //        = -sum_{i=1..-e} x^{-i} (e < 0)
            if e > 0 {
                for i in 0..e {
                    result.add_assign(&LaurentPoly::monomial(
                        prefix_weight + i * weights[g],
                        BigInt::one(),
                    ));
                }
            } else {
                for i in 1..=(-e) {
                    result.sub_assign(&LaurentPoly::monomial(
                        prefix_weight - i * weights[g],
                        BigInt::one(),
                    ));
                }
            }
        }
        prefix_weight += e * weights[g];
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[(i64, i64)]) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for &(e, c) in coeffs {
            p.add_assign(&LaurentPoly::monomial(e, BigInt::from(c)));
        }
        p
    }

    #[test]
    fn fox_derivative_of_commutator() {
        // r = a b a^-1 b^-1 over weights (1, 1):
        // dr/da = 1 - t, dr/db = t - 1
        let r = vec![(0usize, 1i64), (1, 1), (0, -1), (1, -1)];
        let da = fox_derivative_evaluated(&r, 0, &[1, 1]);
        let db = fox_derivative_evaluated(&r, 1, &[1, 1]);
        assert_eq!(da, poly(&[(0, 1), (1, -1)]));
        assert_eq!(db, poly(&[(1, 1), (0, -1)]));
    }

    #[test]
    fn fox_derivative_of_power() {
        // r = a^3: dr/da = 1 + t + t^2
        let r = vec![(0usize, 3i64)];
        let da = fox_derivative_evaluated(&r, 0, &[1]);
        assert_eq!(da, poly(&[(0, 1), (1, 1), (2, 1)]));
    }

    #[test]
    fn gcd_examples() {
        // gcd(t^2 - 1, t^3 - 1) = t - 1
        let a = poly(&[(2, 1), (0, -1)]);
        let b = poly(&[(3, 1), (0, -1)]);
        assert_eq!(laurent_gcd(&a, &b), poly(&[(1, 1), (0, -1)]));

        // content is respected: gcd(2t - 2, 4) = 2
        let c = poly(&[(1, 2), (0, -2)]);
        let d = poly(&[(0, 4)]);
        assert_eq!(laurent_gcd(&c, &d), poly(&[(0, 2)]));

        // gcd with zero
        assert_eq!(laurent_gcd(&LaurentPoly::zero(), &a), a.normalized());
    }

    #[test]
    fn normalization() {
        // -t^-2 + t^-1 normalizes to t - 1
        let p = poly(&[(-2, -1), (-1, 1)]);
        assert_eq!(p.normalized(), poly(&[(1, 1), (0, -1)]));
    }

    #[test]
    fn determinant_small() {
        let t = poly(&[(1, 1)]);
        let one = LaurentPoly::one();
        let m = vec![vec![t.clone(), one.clone()], vec![one.clone(), t.clone()]];
        assert_eq!(determinant(&m), poly(&[(2, 1), (0, -1)]));
    }
}
