//! Eigenstructure of incidence matrices: characteristic polynomials, exact
//! root counts relative to the unit circle, Perron data, the balance verdict
//! for fixed points, and lengths making a geometric representation bounded
//! distance to a lattice.

pub mod poly;
pub mod roots;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::morphisms::IncidenceMatrix;
use crate::quadfield::{squarefree_split, QuadElem, QuadField};
pub use poly::Poly;

/// Monic integer polynomial `det(xI - M)`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharPoly {
    coeffs: Vec<BigInt>,
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.last().map(|c| c.is_one()) != Some(true) {
            return Err(Error::Degenerate("characteristic polynomial must be monic".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_bigints(&self.coeffs)
    }

    /// `p(M)` computed exactly.
    pub fn eval_matrix(&self, m: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        let n = m.len();
        let mut acc = vec![vec![BigInt::zero(); n]; n];
        for c in self.coeffs.iter().rev() {
            let mut next = vec![vec![BigInt::zero(); n]; n];
            for i in 0..n {
                for k in 0..n {
                    if acc[i][k].is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        next[i][j] += &acc[i][k] * m[k][j];
                    }
                }
                next[i][i] += c;
            }
            acc = next;
        }
        acc
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_poly().fmt(f)
    }
}

impl Serialize for CharPoly {
    /// Integer coefficients, highest degree first.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().rev().map(|c| c.to_string()).collect();
        v.serialize(s)
    }
}

pub fn char_poly(m: &IncidenceMatrix) -> CharPoly {
    let rows: Vec<Vec<BigRational>> = m
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let p = poly::char_poly_rational(&rows);
    let coeffs = p
        .coeffs()
        .iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect();
    CharPoly { coeffs }
}

/// The largest real root of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Dominant {
    Integer(BigInt),
    Quadratic(QuadElem),
    /// Interval `[lo, hi]` proven by Sturm sequences to hold exactly one
    /// root and no larger one.
    Enclosure { lo: f64, hi: f64 },
}

impl Dominant {
    pub fn value(&self) -> f64 {
        match self {
            Dominant::Integer(n) => n.to_f64().unwrap_or(f64::NAN),
            Dominant::Quadratic(q) => q.to_f64(),
            Dominant::Enclosure { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

impl Serialize for Dominant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        match self {
            Dominant::Integer(n) => {
                map.serialize_entry("exact", &n.to_string())?;
                map.serialize_entry("decimal", &format!("{n}"))?;
            }
            Dominant::Quadratic(q) => {
                map.serialize_entry("exact", &q.to_string())?;
                map.serialize_entry("decimal", &q.to_decimal(30))?;
            }
            Dominant::Enclosure { lo, hi } => {
                map.serialize_entry("lo", lo)?;
                map.serialize_entry("hi", hi)?;
            }
        }
        map.end()
    }
}

/// Root counts inside, on and outside the unit circle, with multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusClassification {
    pub n_lt: usize,
    pub n_eq: usize,
    pub n_gt: usize,
    pub dominant: Option<Dominant>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn rat_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Exact root counts relative to the unit circle.
///
/// Roots at `0` and `+-1` are divided out, the self-reciprocal part
/// `gcd(p, rev p)` is mapped to `y = z + 1/z` where unit-modulus roots become
/// real roots in `(-2, 2)`, and the rest is counted by a Schur-Cohn test.
pub fn classify_moduli(p: &CharPoly) -> ModulusClassification {
    let full = p.to_poly();
    let (mut n_lt, mut n_eq, mut n_gt) = (0, 0, 0);
    let (rest, k0) = full.strip_root(0);
    n_lt += k0;
    let (rest, k1) = rest.strip_root(1);
    let (rest, k2) = rest.strip_root(-1);
    n_eq += k1 + k2;

    let g = rest.gcd(&rest.reverse());
    let mut q = rest.clone();
    if g.degree() > 0 {
        let k = g.degree() / 2;
        debug_assert_eq!(g.degree() % 2, 0);
        let h = reciprocal_to_trace(&g);
        let s = h.count_real_roots_with_multiplicity(&rat(-2), &rat(2));
        n_eq += 2 * s;
        n_lt += k - s;
        n_gt += k - s;
        q = rest.div_rem(&g).0;
    }
    if q.degree() > 0 {
        let inside = poly::schur_cohn_interior(&q);
        n_lt += inside;
        n_gt += q.degree() - inside;
    }
    ModulusClassification {
        n_lt,
        n_eq,
        n_gt,
        dominant: dominant_root(&full),
    }
}

/// For a palindromic `g` of degree `2k`, the `h` with `z^{-k} g(z) = h(z + 1/z)`.
fn reciprocal_to_trace(g: &Poly) -> Poly {
    let k = g.degree() / 2;
    // P_0 = 2, P_1 = y, P_{j+1} = y P_j - P_{j-1}
    let y = Poly::from_ints(&[0, 1]);
    let mut prev = Poly::from_ints(&[2]);
    let mut cur = y.clone();
    let mut h = Poly::new(vec![g.coeff(k)]);
    for j in 1..=k {
        h = h.add(&cur.scale(&g.coeff(k + j)));
        let next = y.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    h
}

fn cauchy_bound(p: &Poly) -> BigRational {
    let lead = p.lead().abs();
    let m = p.coeffs()[..p.degree()]
        .iter()
        .map(|c| c.abs() / &lead)
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
    m + rat(1)
}

fn dominant_root(p: &Poly) -> Option<Dominant> {
    if p.degree() == 0 {
        return None;
    }
    let sf: Poly = p
        .square_free()
        .into_iter()
        .fold(Poly::one(), |acc, (f, _)| acc.mul(&f));
    let bound = cauchy_bound(&sf);
    if sf.count_real_roots(&-bound.clone(), &bound) == 0 {
        return None;
    }
    // Largest integer root, if any, is exact.
    let rts = roots::complex_roots(&sf.to_f64());
    let best = rts
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let rounded = best.round();
    if best.is_finite() && sf.eval(&rat_f64(rounded)).is_zero() && sf.count_real_roots(&rat_f64(rounded), &bound) == 0 {
        return Some(Dominant::Integer(BigInt::from(rounded as i64)));
    }
    if p.degree() == 2 {
        let c1 = p.coeff(1);
        let c0 = p.coeff(0);
        if c1.is_integer() && c0.is_integer() {
            let disc = (&c1 * &c1 - rat(4) * &c0).to_integer();
            if disc.is_positive() {
                let disc_u = disc.to_u64()?;
                let (s, core) = squarefree_split(disc_u);
                if core > 1 {
                    let field = QuadField::new(core as i64).ok()?;
                    let a = -c1 / rat(2);
                    let b = BigRational::new(BigInt::from(s), BigInt::from(2));
                    return Some(Dominant::Quadratic(QuadElem::from_parts(field, a, b)));
                }
            }
        }
    }
    let mut delta = 1e-12 * best.abs().max(1.0);
    for _ in 0..12 {
        let lo = rat_f64(best - delta);
        let hi = rat_f64(best + delta);
        if !sf.eval(&lo).is_zero()
            && !sf.eval(&hi).is_zero()
            && sf.count_real_roots(&lo, &hi) == 1
            && sf.count_real_roots(&hi, &bound) == 0
        {
            return Some(Dominant::Enclosure {
                lo: best - delta,
                hi: best + delta,
            });
        }
        delta *= 10.0;
    }
    None
}

/// Balance verdict for fixed points of a primitive substitution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Balanced,
    NotBalanced,
    /// Some non-dominant eigenvalue lies on the unit circle.
    Indeterminate,
}

/// Classifies by the moduli of the eigenvalues other than the Perron root.
pub fn adamczewski_verdict(m: &IncidenceMatrix) -> Result<(Verdict, ModulusClassification)> {
    if !m.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let p = char_poly(m);
    let c = classify_moduli(&p);
    let poly = p.to_poly();
    let bound = cauchy_bound(&poly);
    let perron_above_one = poly
        .square_free()
        .iter()
        .any(|(f, _)| f.count_real_roots(&rat(1), &bound) > 0);
    let (gt, eq) = if perron_above_one {
        (c.n_gt - 1, c.n_eq)
    } else {
        (c.n_gt, c.n_eq - 1)
    };
    let v = if gt > 0 {
        Verdict::NotBalanced
    } else if eq > 0 {
        Verdict::Indeterminate
    } else {
        Verdict::Balanced
    };
    Ok((v, c))
}

/// Exact Perron data of a 2x2 matrix with irrational eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPerron {
    pub value: QuadElem,
    pub right: Vec<QuadElem>,
    pub left: Vec<QuadElem>,
}

/// Perron root with right eigenvector summing to 1 (the letter frequencies)
/// and left eigenvector with first entry 1 (self-similar lengths).
#[derive(Debug, Clone)]
pub struct PerronData {
    pub value: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub residual: f64,
    pub exact: Option<ExactPerron>,
}

/// Both eigenvalues of a 2x2 integer matrix when its discriminant is not a
/// square, smaller one first.
fn quadratic_eigen(m: &[Vec<i64>]) -> Option<(QuadField, [QuadElem; 2])> {
    if m.len() != 2 {
        return None;
    }
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4 * det;
    if disc <= 0 {
        return None;
    }
    let (s, core) = squarefree_split(disc as u64);
    if core == 1 {
        return None;
    }
    let field = QuadField::new(core as i64).ok()?;
    let lo = field.elem(tr, 2, -(s as i64), 2);
    let hi = field.elem(tr, 2, s as i64, 2);
    Some((field, [lo, hi]))
}

/// Left eigenvector `(1, (mu - m00)/m10)`; `m10 != 0` whenever the
/// eigenvalues are irrational.
fn left_eigvec_2x2(m: &[Vec<i64>], mu: &QuadElem) -> Vec<QuadElem> {
    let f = mu.field();
    let second = (mu - &f.int(m[0][0])).scale(&BigRational::new(1.into(), m[1][0].into()));
    vec![f.one(), second]
}

fn right_eigvec_2x2(m: &[Vec<i64>], mu: &QuadElem) -> Vec<QuadElem> {
    let f = mu.field();
    let second = (mu - &f.int(m[0][0])).scale(&BigRational::new(1.into(), m[0][1].into()));
    vec![f.one(), second]
}

/// Exact eigenpairs `(mu, left eigenvector)` of a 2x2 matrix with
/// irrational eigenvalues, by increasing modulus.
pub fn exact_left_eigenpairs_2x2(m: &IncidenceMatrix) -> Option<Vec<(QuadElem, Vec<QuadElem>)>> {
    let mi = m.to_i64();
    let (_, [lo, hi]) = quadratic_eigen(&mi)?;
    let mut v: Vec<(QuadElem, Vec<QuadElem>)> =
        [lo, hi].into_iter().map(|mu| (mu.clone(), left_eigvec_2x2(&mi, &mu))).collect();
    v.sort_by_key(|a| a.0.abs());
    Some(v)
}

pub fn perron_data(m: &IncidenceMatrix) -> Result<PerronData> {
    if !m.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let mi = m.to_i64();
    if let Some((_, [_, r])) = quadratic_eigen(&mi) {
        let right = right_eigvec_2x2(&mi, &r);
        let total = &right[0] + &right[1];
        let right: Vec<QuadElem> = right.iter().map(|x| x / &total).collect();
        let left = left_eigvec_2x2(&mi, &r);
        return Ok(PerronData {
            value: r.to_f64(),
            right: right.iter().map(QuadElem::to_f64).collect(),
            left: left.iter().map(QuadElem::to_f64).collect(),
            residual: 0.0,
            exact: Some(ExactPerron { value: r, right, left }),
        });
    }
    let mf = m.to_f64();
    let p = char_poly(m).to_poly();
    let r = roots::complex_roots(&p.to_f64())
        .into_iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let right = null_vector(&mf, r);
    let total: f64 = right.iter().sum();
    let right: Vec<f64> = right.iter().map(|x| x / total).collect();
    let left = null_vector(&transpose(&mf), r);
    let left: Vec<f64> = left.iter().map(|x| x / left[0]).collect();
    let residual = eig_residual(&mf, &right, r).max(eig_residual(&transpose(&mf), &left, r) / norm_inf(&left));
    let tolerance = 1e-12 * r.max(1.0);
    if residual > tolerance || right.iter().any(|&x| x <= 0.0) {
        return Err(Error::Residual { residual, tolerance });
    }
    Ok(PerronData {
        value: r,
        right,
        left,
        residual,
        exact: None,
    })
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn eig_residual(m: &[Vec<f64>], v: &[f64], r: f64) -> f64 {
    m.iter()
        .zip(v)
        .map(|(row, vi)| (row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() - r * vi).abs())
        .fold(0.0, f64::max)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut r = r.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let p = if m[col][col] == 0.0 { f64::MIN_POSITIVE } else { m[col][col] };
        for row in col + 1..n {
            let factor = m[row][col] / p;
            for k in col..=n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        let p = if m[i][i] == 0.0 { f64::MIN_POSITIVE } else { m[i][i] };
        x[i] = (m[i][n] - s) / p;
    }
    x
}

/// Inverse iteration for the eigenvector of `m` at the simple eigenvalue `r`.
fn null_vector(m: &[Vec<f64>], r: f64) -> Vec<f64> {
    let n = m.len();
    let shift = r + 1e-10 * r.abs().max(1.0);
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| m[i][j] - if i == j { shift } else { 0.0 }).collect())
        .collect();
    let mut x = vec![1.0; n];
    for _ in 0..4 {
        x = solve(&a, &x);
        let s = norm_inf(&x);
        x.iter_mut().for_each(|v| *v /= s);
    }
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

/// Exact counterpart of [`BdlConstruction`] for 2x2 matrices with irrational
/// eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactBdl {
    pub f: Vec<QuadElem>,
    pub eta: QuadElem,
    pub lengths: Vec<QuadElem>,
}

/// `f` annihilates the generalised eigenspace of eigenvalues of modulus at
/// least 1; the lengths `f + eta` give a representation bounded distance to
/// `eta Z`.
#[derive(Debug, Clone)]
pub struct BdlConstruction {
    pub f: Vec<f64>,
    pub eta: f64,
    pub lengths: Vec<f64>,
    pub lattice_step: f64,
    pub stable_dim: usize,
    /// The stable eigenvalue when it is unique.
    pub stable_eigenvalue: Option<f64>,
    pub residual: f64,
    pub exact: Option<ExactBdl>,
}

pub const BDL_RESIDUAL_TOLERANCE: f64 = 1e-10;

fn mat_mul_f64(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `prod (M - mu I)` over the given roots, conjugate pairs folded into real
/// quadratics.
fn matrix_poly(m: &[Vec<f64>], roots: &[Complex64]) -> Vec<Vec<f64>> {
    let n = m.len();
    let eye: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as u8 as f64).collect()).collect();
    let mut acc = eye.clone();
    let m2 = mat_mul_f64(m, m);
    for z in roots {
        let factor: Vec<Vec<f64>> = if z.im == 0.0 {
            (0..n).map(|i| (0..n).map(|j| m[i][j] - z.re * eye[i][j]).collect()).collect()
        } else if z.im > 0.0 {
            let (s, p) = (2.0 * z.re, z.norm_sqr());
            (0..n)
                .map(|i| (0..n).map(|j| m2[i][j] - s * m[i][j] + p * eye[i][j]).collect())
                .collect()
        } else {
            continue;
        };
        acc = mat_mul_f64(&acc, &factor);
    }
    acc
}

/// Reduced row echelon form; rows below `tol` relative to the largest entry
/// are dropped.
fn rref(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    let tol = 1e-9 * scale.max(f64::MIN_POSITIVE);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let piv = (r..rows).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        if m[piv][c].abs() <= tol {
            continue;
        }
        m.swap(r, piv);
        let p = m[r][c];
        m[r].iter_mut().for_each(|x| *x /= p);
        for i in 0..rows {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    for k in 0..cols {
                        m[i][k] -= f * m[r][k];
                    }
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

fn normalize_first_nonzero(v: &mut [f64]) {
    let s = norm_inf(v);
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-12 * s) {
        v.iter_mut().for_each(|x| *x /= first);
    }
}

/// Builds `f`, `eta` and positive lengths `f + eta` from a matrix with an
/// eigenvalue inside the unit circle. `margin` defaults to a sixteenth of
/// the spread of `f`.
pub fn construct_bdl_lengths(m: &IncidenceMatrix, margin: Option<BigRational>) -> Result<BdlConstruction> {
    let p = char_poly(m);
    let class = classify_moduli(&p);
    if class.n_lt == 0 {
        return Err(Error::NoStableEigenvalue);
    }
    if let Some(pairs) = exact_left_eigenpairs_2x2(m) {
        let (mu, f) = pairs[0].clone();
        let (min, max) = if f[0] <= f[1] { (&f[0], &f[1]) } else { (&f[1], &f[0]) };
        let zero = mu.field().zero();
        let margin = match margin {
            Some(q) => zero.add_rational(&q),
            None => (max - min).scale(&BigRational::new(1.into(), 16.into())),
        };
        let neg_min = -min;
        let shift = if neg_min.is_positive() { neg_min } else { zero };
        let eta = &shift + &margin;
        let lengths: Vec<QuadElem> = f.iter().map(|x| x + &eta).collect();
        return Ok(BdlConstruction {
            f: f.iter().map(QuadElem::to_f64).collect(),
            eta: eta.to_f64(),
            lengths: lengths.iter().map(QuadElem::to_f64).collect(),
            lattice_step: eta.to_f64(),
            stable_dim: 1,
            stable_eigenvalue: Some(mu.to_f64()),
            residual: 0.0,
            exact: Some(ExactBdl { f, eta, lengths }),
        });
    }

    let mf = m.to_f64();
    let rts = roots::complex_roots(&p.to_poly().to_f64());
    let (stable, unstable) = rts.split_at(class.n_lt);
    let qu = matrix_poly(&mf, unstable);
    let basis = rref(qu);
    if basis.len() != class.n_lt {
        return Err(Error::Residual {
            residual: (basis.len() as f64 - class.n_lt as f64).abs(),
            tolerance: 0.0,
        });
    }
    let support = |r: &Vec<f64>| r.iter().filter(|x| x.abs() > 1e-9).count();
    let mut f = basis.iter().min_by_key(|r| support(r)).unwrap().clone();
    normalize_first_nonzero(&mut f);

    let qs = matrix_poly(&mf, stable);
    let ft_qs: Vec<f64> = (0..f.len()).map(|j| f.iter().zip(&qs).map(|(fi, row)| fi * row[j]).sum()).collect();
    let qs_norm = qs.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let residual = norm_inf(&ft_qs) / (qs_norm * norm_inf(&f));
    if residual > BDL_RESIDUAL_TOLERANCE {
        return Err(Error::Residual {
            residual,
            tolerance: BDL_RESIDUAL_TOLERANCE,
        });
    }
    let min = f.iter().copied().fold(f64::INFINITY, f64::min);
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min <= 1e-12 * norm_inf(&f) {
        return Err(Error::Degenerate("annihilating vector is constant".into()));
    }
    let margin = margin
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .unwrap_or((max - min) / 16.0);
    let eta = (-min).max(0.0) + margin;
    let lengths: Vec<f64> = f.iter().map(|x| x + eta).collect();
    Ok(BdlConstruction {
        lengths,
        lattice_step: eta,
        eta,
        stable_dim: class.n_lt,
        stable_eigenvalue: (class.n_lt == 1).then(|| stable[0].re),
        residual,
        exact: None,
        f,
    })
}

/// `f^T M^n e_letter`, exactly.
pub fn orbit_functional(m: &IncidenceMatrix, f: &[QuadElem], letter: usize, n: u32) -> QuadElem {
    let mn = m.pow_big(n);
    let field = f[0].field();
    f.iter().enumerate().fold(field.zero(), |acc, (b, fb)| {
        let count = BigRational::from_integer(mn[b][letter].clone());
        &acc + &fb.scale(&count)
    })
}
