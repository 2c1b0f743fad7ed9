//! One-dimensional cut-and-project sets `{a + b eta : a + b eps in [c, d)}`,
//! their symmetries, Kesten's bounded-remainder criterion and gap coding.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{Approx, QuadElem, QuadField};
use crate::words::{Alphabet, WordWindow};

const ULP: f64 = f64::EPSILON;

/// Parameters `eps`, `eta` and the half-open window `[c, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CapSpec {
    epsilon: QuadElem,
    eta: QuadElem,
    c: QuadElem,
    d: QuadElem,
}

impl CapSpec {
    pub fn new(epsilon: QuadElem, eta: QuadElem, c: QuadElem, d: QuadElem) -> Result<Self> {
        let field = epsilon.field();
        for x in [&eta, &c, &d] {
            if x.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.d(),
                    right: x.field().d(),
                });
            }
        }
        if epsilon.is_rational() || eta.is_rational() {
            return Err(Error::InvalidCap("eps and eta must be irrational".into()));
        }
        if epsilon == eta {
            return Err(Error::InvalidCap("eps equals eta".into()));
        }
        if c >= d {
            return Err(Error::InvalidCap(format!("empty window [{c}, {d})")));
        }
        Ok(Self { epsilon, eta, c, d })
    }

    pub fn epsilon(&self) -> &QuadElem {
        &self.epsilon
    }

    pub fn eta(&self) -> &QuadElem {
        &self.eta
    }

    pub fn window(&self) -> (&QuadElem, &QuadElem) {
        (&self.c, &self.d)
    }

    pub fn field(&self) -> QuadField {
        self.epsilon.field()
    }

    pub fn window_length(&self) -> QuadElem {
        &self.d - &self.c
    }

    /// Whether the star map is the field conjugation, i.e. `eps = eta'`.
    pub fn star_is_conjugation(&self) -> bool {
        self.epsilon == self.eta.conjugate()
    }

    /// `x = p + q eps` with rational `p, q`.
    pub fn eps_coordinates(&self, x: &QuadElem) -> (BigRational, BigRational) {
        let q = x.b() / self.epsilon.b();
        let p = x.a() - &q * self.epsilon.a();
        (p, q)
    }

    /// `x = a + b eta` with integers `a, b`, if `x` lies in `Z + Z eta`.
    pub fn eta_coordinates(&self, x: &QuadElem) -> Option<(i64, i64)> {
        let b = x.b() / self.eta.b();
        let a = x.a() - &b * self.eta.a();
        if a.is_integer() && b.is_integer() {
            Some((a.to_integer().to_i64()?, b.to_integer().to_i64()?))
        } else {
            None
        }
    }

    /// `|eta - eps| / |Omega|`, the step of the lattice with the same density.
    pub fn density_step(&self) -> QuadElem {
        (&self.eta - &self.epsilon).abs() / self.window_length()
    }

    pub fn contains_star(&self, a: i64, b: i64) -> bool {
        let star = self.star_exact(a, b);
        star >= self.c && star < self.d
    }

    pub fn value_exact(&self, a: i64, b: i64) -> QuadElem {
        self.eta.scale_int(b).add_rational(&BigRational::from_integer(a.into()))
    }

    pub fn star_exact(&self, a: i64, b: i64) -> QuadElem {
        self.epsilon.scale_int(b).add_rational(&BigRational::from_integer(a.into()))
    }
}

/// `floor(u + b v)` for a fixed pair `u, v` and many integers `b`.
struct AffineFloor {
    u: QuadElem,
    v: QuadElem,
    ua: Approx,
    va: Approx,
}

impl AffineFloor {
    fn new(u: QuadElem, v: QuadElem) -> Self {
        let (ua, va) = (u.approx(), v.approx());
        Self { u, v, ua, va }
    }

    fn floor(&self, b: i64) -> BigInt {
        let bf = b as f64;
        let prod = bf * self.va.value;
        let value = self.ua.value + prod;
        let err = self.ua.err + bf.abs() * self.va.err + 2.0 * ULP * (self.ua.value.abs() + prod.abs());
        if let Some(n) = (Approx { value, err }).floor() {
            return BigInt::from(n);
        }
        (&self.u + &self.v.scale_int(b)).floor_exact()
    }

    fn ceil(&self, b: i64) -> BigInt {
        let neg = AffineFloor::new(-&self.u, -&self.v);
        -neg.floor(b)
    }
}

/// `a + b eta` with star image `a + b eps`; floats are for display and
/// ordering, exact values come from [`CapSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapPoint {
    pub a: i64,
    pub b: i64,
    pub value: f64,
    pub star: f64,
}

/// Exact sign of `(a1 - a2) + (b1 - b2) x` for irrational `x`.
fn cmp_combination(da: i64, db: i64, x: &QuadElem, xf: f64) -> Ordering {
    if db == 0 {
        return da.cmp(&0);
    }
    let v = da as f64 + db as f64 * xf;
    let slack = 16.0 * ULP * (da.unsigned_abs() as f64 + (db as f64 * xf).abs()) + 1e-300;
    if v > slack {
        Ordering::Greater
    } else if v < -slack {
        Ordering::Less
    } else {
        x.scale_int(db).add_rational(&BigRational::from_integer(da.into())).signum()
    }
}

/// Points of a cut-and-project set, sorted by value.
#[derive(Debug, Clone)]
pub struct CapSet {
    spec: CapSpec,
    points: Vec<CapPoint>,
}

impl CapSet {
    /// Wraps points already sorted by value and satisfying the window.
    pub(crate) fn from_sorted(spec: CapSpec, points: Vec<CapPoint>) -> Self {
        Self { spec, points }
    }

    pub fn spec(&self) -> &CapSpec {
        &self.spec
    }

    pub fn points(&self) -> &[CapPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values_f64(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn value_exact(&self, i: usize) -> QuadElem {
        let p = &self.points[i];
        self.spec.value_exact(p.a, p.b)
    }

    pub fn values_exact(&self) -> Vec<QuadElem> {
        (0..self.len()).map(|i| self.value_exact(i)).collect()
    }

    /// Exact order of two points.
    pub fn cmp_points(&self, p: &CapPoint, q: &CapPoint) -> Ordering {
        cmp_combination(p.a - q.a, p.b - q.b, &self.spec.eta, self.spec.eta.to_f64())
    }

    /// Index of the smallest non-negative point.
    pub fn origin_index(&self) -> usize {
        let eta = &self.spec.eta;
        let ef = eta.to_f64();
        self.points
            .partition_point(|p| cmp_combination(p.a, p.b, eta, ef) == Ordering::Less)
    }

    /// Translated copy `Sigma + x` for `x` in `Z + Z eta`, given as `(a, b)`.
    pub fn translated(&self, a: i64, b: i64) -> Result<CapSet> {
        let spec = translate(&self.spec, a, b)?;
        let (ef, etaf) = (spec.epsilon.to_f64(), spec.eta.to_f64());
        let points = self
            .points
            .iter()
            .map(|p| {
                let (na, nb) = (p.a + a, p.b + b);
                CapPoint {
                    a: na,
                    b: nb,
                    value: na as f64 + nb as f64 * etaf,
                    star: na as f64 + nb as f64 * ef,
                }
            })
            .collect();
        Ok(CapSet { spec, points })
    }
}

/// All points with `lo <= a + b eta <= hi`, sorted.
pub fn generate(spec: &CapSpec, lo: &QuadElem, hi: &QuadElem) -> Result<CapSet> {
    let field = spec.field();
    if lo.field() != field || hi.field() != field {
        return Err(Error::FieldMismatch {
            left: field.d(),
            right: if lo.field() != field { lo.field().d() } else { hi.field().d() },
        });
    }
    if lo > hi {
        return Ok(CapSet {
            spec: spec.clone(),
            points: Vec::new(),
        });
    }
    let (eps, eta, c, d) = (&spec.epsilon, &spec.eta, &spec.c, &spec.d);
    let delta = eta - eps;
    // b (eta - eps) lies in (lo - d, hi - c]
    let low = (lo - d) / &delta;
    let high = (hi - c) / &delta;
    let (b_min, b_max) = if delta.is_positive() {
        (low.floor() + BigInt::from(1), high.floor())
    } else {
        (high.ceil(), low.ceil() - BigInt::from(1))
    };
    let (b_min, b_max) = match (b_min.to_i64(), b_max.to_i64()) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::BudgetExceeded("range too large".into())),
    };
    let win_lo = AffineFloor::new(c.clone(), -eps);
    let win_hi = AffineFloor::new(d.clone(), -eps);
    let rng_lo = AffineFloor::new(lo.clone(), -eta);
    let rng_hi = AffineFloor::new(hi.clone(), -eta);
    let (ef, etaf) = (eps.to_f64(), eta.to_f64());
    let mut points = Vec::new();
    for b in b_min..=b_max {
        let a_min = win_lo.ceil(b).max(rng_lo.ceil(b));
        let a_max = (win_hi.ceil(b) - BigInt::from(1)).min(rng_hi.floor(b));
        let (Some(a_min), Some(a_max)) = (a_min.to_i64(), a_max.to_i64()) else {
            return Err(Error::BudgetExceeded("coordinates overflow".into()));
        };
        for a in a_min..=a_max {
            points.push(CapPoint {
                a,
                b,
                value: a as f64 + b as f64 * etaf,
                star: a as f64 + b as f64 * ef,
            });
        }
    }
    points.sort_by(|p, q| cmp_combination(p.a - q.a, p.b - q.b, eta, etaf));
    Ok(CapSet {
        spec: spec.clone(),
        points,
    })
}

/// Points around the origin: at least `count` on each side of 0.
pub fn generate_count(spec: &CapSpec, count: usize) -> Result<CapSet> {
    let step = spec.density_step();
    let field = spec.field();
    let mut radius = (&step * &field.int(count as i64 + 2)).ceil() + BigInt::from(2);
    loop {
        let r = QuadElem::from_integer(field, radius.clone());
        let set = generate(spec, &-&r, &r)?;
        let origin = set.origin_index();
        if origin >= count && set.len() - origin >= count {
            return Ok(set);
        }
        radius *= BigInt::from(2);
    }
}

/// Kesten's criterion outcome.
#[derive(Debug, Clone, PartialEq)]
pub enum KestenVerdict {
    Bdl { lattice_step: QuadElem },
    NotBdl,
}

/// Decision with the coordinates of `d - c = p + q eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct KestenDecision {
    pub verdict: KestenVerdict,
    pub p: BigRational,
    pub q: BigRational,
}

impl KestenDecision {
    pub fn is_bdl(&self) -> bool {
        matches!(self.verdict, KestenVerdict::Bdl { .. })
    }

    pub fn lattice_step(&self) -> Option<&QuadElem> {
        match &self.verdict {
            KestenVerdict::Bdl { lattice_step } => Some(lattice_step),
            KestenVerdict::NotBdl => None,
        }
    }
}

/// BDL iff `d - c` lies in `Z + Z eps`; the lattice step is then
/// `|eta - eps| / (d - c)`.
pub fn kesten_decide(spec: &CapSpec) -> KestenDecision {
    let (p, q) = spec.eps_coordinates(&spec.window_length());
    let verdict = if p.is_integer() && q.is_integer() {
        KestenVerdict::Bdl {
            lattice_step: spec.density_step(),
        }
    } else {
        KestenVerdict::NotBdl
    };
    KestenDecision { verdict, p, q }
}

/// Parameters after the integer matrix `(A B; C D)` acts on `(1, eps)` and
/// `(1, eta)`; returns the new spec and the factor `s = A + C eta` with
/// `Sigma_old = s * Sigma_new`.
///
/// `A + C eps` must be positive so that the window stays half-open on the
/// right.
pub fn unimodular_transform(spec: &CapSpec, m: [i64; 4]) -> Result<(CapSpec, QuadElem)> {
    let [a, b, c, d] = m;
    let det = a as i128 * d as i128 - b as i128 * c as i128;
    if det.abs() != 1 {
        return Err(Error::InvalidCap(format!("determinant {det} is not +-1")));
    }
    let field = spec.field();
    let (eps, eta) = (&spec.epsilon, &spec.eta);
    let den_e = &field.int(a) + &eps.scale_int(c);
    let den_h = &field.int(a) + &eta.scale_int(c);
    if den_e.is_zero() || den_h.is_zero() {
        return Err(Error::InvalidCap("degenerate denominator".into()));
    }
    if den_e.is_negative() {
        return Err(Error::InvalidCap(
            "A + C eps < 0 would reverse the window orientation".into(),
        ));
    }
    let new_eps = (&field.int(b) + &eps.scale_int(d)) / &den_e;
    let new_eta = (&field.int(b) + &eta.scale_int(d)) / &den_h;
    let new_c = &spec.c / &den_e;
    let new_d = &spec.d / &den_e;
    Ok((CapSpec::new(new_eps, new_eta, new_c, new_d)?, den_h))
}

/// `Sigma(Omega) + x = Sigma(Omega + x*)` for `x = a + b eta`.
pub fn translate(spec: &CapSpec, a: i64, b: i64) -> Result<CapSpec> {
    let shift = spec.star_exact(a, b);
    CapSpec::new(
        spec.epsilon.clone(),
        spec.eta.clone(),
        &spec.c + &shift,
        &spec.d + &shift,
    )
}

/// A spec with `eps` in `(0, 1)` and `c` in `[0, 1)`, and the integer
/// `shift` with `Sigma(spec) = Sigma(normalized) + shift`.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub spec: CapSpec,
    pub shift: i64,
}

pub fn normalize(spec: &CapSpec) -> Result<Normalized> {
    let k = spec.epsilon.floor().to_i64().ok_or_else(|| Error::InvalidCap("eps too large".into()))?;
    let (reduced, _) = unimodular_transform(spec, [1, -k, 0, 1])?;
    let n = reduced.c.floor().to_i64().ok_or_else(|| Error::InvalidCap("window too far".into()))?;
    let shifted = translate(&reduced, -n, 0)?;
    Ok(Normalized { spec: shifted, shift: n })
}

/// Distinct gaps (largest first, lettered `A, B, C`) and the coding word.
#[derive(Debug, Clone)]
pub struct GapCoding {
    pub gaps: Vec<QuadElem>,
    pub word: WordWindow,
}

/// Codes consecutive distances; `u_0` is the gap following the smallest
/// non-negative point.
pub fn gap_code(set: &CapSet) -> Result<GapCoding> {
    let pts = set.points();
    if pts.len() < 2 {
        return Err(Error::Degenerate("gap coding needs at least two points".into()));
    }
    let mut distinct: Vec<(i64, i64)> = Vec::new();
    let mut idx = Vec::with_capacity(pts.len() - 1);
    for w in pts.windows(2) {
        let g = (w[1].a - w[0].a, w[1].b - w[0].b);
        let pos = match distinct.iter().position(|&x| x == g) {
            Some(i) => i,
            None => {
                distinct.push(g);
                distinct.len() - 1
            }
        };
        idx.push(pos);
    }
    if distinct.len() > 3 {
        return Err(Error::TooManyGaps(distinct.len()));
    }
    let eta = set.spec.eta();
    let ef = eta.to_f64();
    let mut order: Vec<usize> = (0..distinct.len()).collect();
    order.sort_by(|&i, &j| {
        let (gi, gj) = (distinct[i], distinct[j]);
        cmp_combination(gj.0 - gi.0, gj.1 - gi.1, eta, ef)
    });
    let mut letter_of = vec![0u8; distinct.len()];
    for (letter, &i) in order.iter().enumerate() {
        letter_of[i] = letter as u8;
    }
    let letters: Vec<u8> = idx.iter().map(|&i| letter_of[i]).collect();
    let alphabet = Alphabet::latin(distinct.len());
    let origin = set.origin_index().min(letters.len());
    let gaps = order
        .iter()
        .map(|&i| set.spec.value_exact(distinct[i].0, distinct[i].1))
        .collect();
    Ok(GapCoding {
        gaps,
        word: WordWindow::new(alphabet, letters, origin)?,
    })
}

/// Rational helper for building windows like `[0, 1/2)`.
pub fn rational(field: QuadField, num: i64, den: i64) -> QuadElem {
    QuadElem::from_rational(field, BigRational::new(num.into(), den.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> (QuadField, QuadElem, QuadElem) {
        let f = QuadField::new(5).unwrap();
        let tau = f.elem(1, 2, 1, 2);
        let tau_c = tau.conjugate();
        (f, tau, tau_c)
    }

    fn golden_spec(window_len: QuadElem) -> CapSpec {
        let (f, tau, tc) = golden();
        CapSpec::new(&tc * &tc, &tau * &tau, f.zero(), window_len).unwrap()
    }

    #[test]
    fn example_points_around_zero() {
        let (f, tau, _) = golden();
        let spec = golden_spec(f.one());
        let set = generate(&spec, &f.int(-5), &f.int(8)).unwrap();
        let vals = set.values_exact();
        let t2 = &tau * &tau;
        let expected = [
            -(&t2 + &tau),
            -tau.clone(),
            f.zero(),
            t2.clone(),
            t2.scale_int(2),
            &t2.scale_int(2) + &tau,
        ];
        let i0 = set.origin_index();
        assert_eq!(vals[i0], f.zero());
        assert_eq!(&vals[i0 - 2..i0 + 4], &expected);
    }

    #[test]
    fn unit_window_matches_floor_formula() {
        let (f, _, _) = golden();
        let spec = golden_spec(f.one());
        let (eps, eta) = (spec.epsilon().clone(), spec.eta().clone());
        let set = generate(&spec, &f.int(-60), &f.int(60)).unwrap();
        let mut oracle: Vec<QuadElem> = (-40i64..=40)
            .map(|b| {
                let fl = eps.scale_int(b).floor();
                eta.scale_int(b).add_rational(&BigRational::from_integer(-fl))
            })
            .filter(|x| x >= &f.int(-60) && x <= &f.int(60))
            .collect();
        oracle.sort();
        assert_eq!(set.values_exact(), oracle);
    }

    #[test]
    fn brute_force_box() {
        let (f, tau, tc) = golden();
        let spec = CapSpec::new(tc.clone(), tau.clone(), rational(f, -1, 3), rational(f, 4, 5)).unwrap();
        let (lo, hi) = (f.int(-7), f.int(9));
        let set = generate(&spec, &lo, &hi).unwrap();
        let mut brute = Vec::new();
        for a in -40..=40 {
            for b in -40..=40 {
                let v = spec.value_exact(a, b);
                if spec.contains_star(a, b) && v >= lo && v <= hi {
                    brute.push(v);
                }
            }
        }
        brute.sort();
        assert_eq!(set.values_exact(), brute);
    }

    #[test]
    fn kesten_examples() {
        let (f, tau, tc) = golden();
        assert!(kesten_decide(&golden_spec(f.one())).is_bdl());
        assert!(!kesten_decide(&golden_spec(rational(f, 1, 2))).is_bdl());
        let spec = CapSpec::new(tc.clone(), tau.clone(), f.zero(), &tau * &tau).unwrap();
        let d = kesten_decide(&spec);
        let xi = &tau.pow(-1).unwrap() + &tau.pow(-3).unwrap();
        assert_eq!(d.lattice_step(), Some(&xi));
    }

    #[test]
    fn unimodular_example() {
        let (f, tau, tc) = golden();
        let spec = golden_spec(f.one());
        let (new, scale) = unimodular_transform(&spec, [0, -1, 1, 2]).unwrap();
        assert_eq!(new.epsilon(), &tc);
        assert_eq!(new.eta(), &tau);
        assert_eq!(new.window(), (&f.zero(), &(&tau * &tau)));
        assert_eq!(scale, &tau * &tau);
        let old = generate(&spec, &f.int(-30), &f.int(30)).unwrap().values_exact();
        let lo = f.int(-30) / &scale;
        let hi = f.int(30) / &scale;
        let scaled: Vec<QuadElem> = generate(&new, &lo, &hi)
            .unwrap()
            .values_exact()
            .iter()
            .map(|x| x * &scale)
            .collect();
        assert_eq!(old, scaled);
        let (id, s) = unimodular_transform(&spec, [1, 0, 0, 1]).unwrap();
        assert_eq!(id, spec);
        assert_eq!(s, f.one());
        assert!(unimodular_transform(&spec, [2, 0, 0, 1]).is_err());
    }

    #[test]
    fn translation_shifts_points() {
        let (f, _, _) = golden();
        let spec = golden_spec(f.one());
        let set = generate(&spec, &f.int(-20), &f.int(20)).unwrap();
        let moved = set.translated(3, -2).unwrap();
        let regenerated = generate(moved.spec(), &(&f.int(-20) + &spec.value_exact(3, -2)), &(&f.int(20) + &spec.value_exact(3, -2))).unwrap();
        assert_eq!(moved.values_exact(), regenerated.values_exact());
    }

    #[test]
    fn normalisation_preserves_the_set() {
        let (f, tau, _) = golden();
        let spec = CapSpec::new(&tau + &f.int(2), -&tau, f.int(-3), rational(f, -5, 2)).unwrap();
        let n = normalize(&spec).unwrap();
        let eps = n.spec.epsilon();
        assert!(eps.is_positive() && eps < &f.one());
        let orig = generate(&spec, &f.int(-20), &f.int(20)).unwrap().values_exact();
        let shift = f.int(n.shift);
        let lo = &f.int(-20) - &shift;
        let hi = &f.int(20) - &shift;
        let back: Vec<QuadElem> = generate(&n.spec, &lo, &hi)
            .unwrap()
            .values_exact()
            .iter()
            .map(|x| x + &shift)
            .collect();
        assert_eq!(orig, back);
    }

    #[test]
    fn gap_codings() {
        let (f, tau, tc) = golden();
        let spec = golden_spec(f.one());
        let set = generate(&spec, &f.int(-50), &f.int(50)).unwrap();
        let g = gap_code(&set).unwrap();
        assert_eq!(g.gaps, vec![&tau * &tau, tau.clone()]);
        let generic = CapSpec::new(tc, tau, f.zero(), rational(f, 9, 10)).unwrap();
        let g = gap_code(&generate(&generic, &f.int(-80), &f.int(80)).unwrap()).unwrap();
        assert_eq!(g.gaps.len(), 3);
        let two = generate(&spec, &f.zero(), &f.int(3)).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(gap_code(&two).unwrap().gaps.len(), 1);
    }

    #[test]
    fn decoding_reproduces_points() {
        let (f, _, _) = golden();
        let spec = golden_spec(f.one());
        let set = generate(&spec, &f.int(-40), &f.int(40)).unwrap();
        let g = gap_code(&set).unwrap();
        let vals = set.values_exact();
        let mut x = vals[0].clone();
        for (i, &l) in g.word.letters().iter().enumerate() {
            x = &x + &g.gaps[l as usize];
            assert_eq!(x, vals[i + 1]);
        }
    }
}
