//! Dense univariate polynomials over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients stored lowest degree first, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly(Vec<BigRational>);

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        Self::new(coeffs.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub fn zero() -> Self {
        Self(Vec::new())
    }

    pub fn one() -> Self {
        Self(vec![BigRational::one()])
    }

    /// `x - r`.
    pub fn linear(r: i64) -> Self {
        Self::from_ints(&[-r, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn lead(&self) -> BigRational {
        self.0.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        let dd = d.degree();
        let lead = d.lead();
        if self.0.len() < d.0.len() {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.0.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        Poly::new(self.0.iter().map(|c| c / &l).collect())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.to_f64()
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// `x^deg p(1/x)`.
    pub fn reverse(&self) -> Poly {
        let mut c = self.0.clone();
        c.reverse();
        Poly::new(c)
    }

    /// Multiplicity of the root `r`, dividing it out.
    pub fn strip_root(&self, r: i64) -> (Poly, usize) {
        let lin = Poly::linear(r);
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() && p.degree() > 0 {
            let (quot, rem) = p.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            p = quot;
            k += 1;
        }
        (p, k)
    }

    /// Yun's square-free factorisation: `(factor, multiplicity)` pairs with
    /// square-free, pairwise coprime, non-constant factors.
    pub fn square_free(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_rem(&a0).0;
        let mut c = df.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            chain.push(r.scale(&q(-1)));
        }
        chain.pop();
        chain
    }

    fn sign_variations(chain: &[Poly], x: &BigRational) -> usize {
        let signs: Vec<i8> = chain
            .iter()
            .map(|p| {
                let v = p.eval(x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct real roots in the half-open `(a, b]` (Sturm's theorem).
    pub fn count_real_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        let chain = self.sturm_chain();
        Self::sign_variations(&chain, a).saturating_sub(Self::sign_variations(&chain, b))
    }

    /// Real roots in the open `(a, b)`, counted with multiplicity.
    pub fn count_real_roots_with_multiplicity(&self, a: &BigRational, b: &BigRational) -> usize {
        self.square_free()
            .iter()
            .map(|(f, m)| {
                let mut n = f.count_real_roots(a, b);
                if f.eval(b).is_zero() {
                    n -= 1;
                }
                n * m
            })
            .sum()
    }

    /// Sign changes in the coefficient sequence.
    pub fn descartes_variations(&self) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            if !unit || i == 0 {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Characteristic polynomial `det(xI - A)` of a rational matrix by
/// Faddeev-LeVerrier; coefficients lowest degree first.
pub fn char_poly_rational(a: &[Vec<BigRational>]) -> Poly {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = mat_mul(a, &mk);
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -tr / q(k as i64);
    }
    Poly::new(coeffs)
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Roots of `p` strictly inside the unit circle, counted with multiplicity,
/// for `p` without roots on the circle and without reciprocal root pairs.
///
/// Uses the Schur-Cohn matrix `J = B^T B - A^T A`, whose count of positive
/// eigenvalues equals the number of interior roots.
pub fn schur_cohn_interior(p: &Poly) -> usize {
    let n = p.degree();
    if n == 0 {
        return 0;
    }
    let a: Vec<BigRational> = p.coeffs().to_vec();
    let lower = |seq: &dyn Fn(usize) -> BigRational| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if j <= i { seq(i - j) } else { BigRational::zero() })
                    .collect()
            })
            .collect()
    };
    let am = lower(&|k| a[k].clone());
    let bm = lower(&|k| a[n - k].clone());
    let mut j = vec![vec![BigRational::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            let mut s = BigRational::zero();
            for k in 0..n {
                s += &bm[k][r] * &bm[k][c] - &am[k][r] * &am[k][c];
            }
            j[r][c] = s;
        }
    }
    // J is symmetric, so its characteristic polynomial has only real roots
    // and Descartes' count of positive roots is exact.
    char_poly_rational(&j).descartes_variations()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn division_and_gcd() {
        let p = Poly::from_ints(&[-1, 0, 1]); // x^2 - 1
        let (quot, rem) = p.div_rem(&Poly::linear(1));
        assert_eq!(quot, Poly::from_ints(&[1, 1]));
        assert!(rem.is_zero());
        let g = p.gcd(&Poly::from_ints(&[1, 2, 1]));
        assert_eq!(g, Poly::from_ints(&[1, 1]));
    }

    #[test]
    fn square_free_multiplicities() {
        // (x-1)^2 (x+2)^3 x
        let p = Poly::linear(1)
            .mul(&Poly::linear(1))
            .mul(&Poly::linear(-2).mul(&Poly::linear(-2)).mul(&Poly::linear(-2)))
            .mul(&Poly::linear(0));
        let sf = p.square_free();
        let mults: Vec<usize> = sf.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 2, 3]);
        assert_eq!(p.count_real_roots_with_multiplicity(&r(-3, 1), &r(3, 1)), 6);
        assert_eq!(p.count_real_roots_with_multiplicity(&r(-1, 2), &r(3, 1)), 3);
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        let p = Poly::from_ints(&[-2, 0, 1]); // roots +-sqrt 2
        assert_eq!(p.count_real_roots(&r(-2, 1), &r(2, 1)), 2);
        assert_eq!(p.count_real_roots(&r(0, 1), &r(2, 1)), 1);
        assert_eq!(Poly::from_ints(&[1, 0, 1]).count_real_roots(&r(-9, 1), &r(9, 1)), 0);
    }

    #[test]
    fn faddeev_leverrier() {
        let m = vec![vec![r(2, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        assert_eq!(char_poly_rational(&m), Poly::from_ints(&[1, -3, 1]));
    }

    #[test]
    fn schur_cohn_small_cases() {
        assert_eq!(schur_cohn_interior(&Poly::from_ints(&[-1, -2, 1])), 1);
        assert_eq!(schur_cohn_interior(&Poly::from_ints(&[-4, -2, 1])), 0);
        // (2x - 1)(3x + 1)(x - 5)
        let p = Poly::from_ints(&[-1, 2]).mul(&Poly::from_ints(&[1, 3])).mul(&Poly::linear(5));
        assert_eq!(schur_cohn_interior(&p), 2);
        assert_eq!(schur_cohn_interior(&Poly::from_ints(&[-1, -4, -1, 1])), 1);
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(&[-1, -4, -1, 1]).to_string(), "x^3 - x^2 - 4x - 1");
        assert_eq!(Poly::from_ints(&[1, -3, 1]).to_string(), "x^2 - 3x + 1");
    }
}
