//! Spectra `X^D(alpha) = { sum a_i alpha^i : a_i in D }` of quadratic Pisot
//! units `alpha = +-beta` over alphabets of consecutive integers.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cutproject::{self, CapSet, CapSpec, KestenDecision};
use crate::error::{Error, Result};
use crate::quadfield::{PisotUnit, QuadElem, UnitFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Default cap on the digit-string length for direct generation.
pub const DEFAULT_MAX_DEGREE: u32 = 12;

/// Limit on intermediate set sizes during direct generation.
pub const DIRECT_POINT_BUDGET: usize = 20_000_000;

/// Base `alpha = sign * beta` and digits `{m, ..., big_m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpectrumSpec {
    unit: PisotUnit,
    sign: Sign,
    m: i64,
    big_m: i64,
}

impl SpectrumSpec {
    /// Checks `m <= 0 < M`, `#D > beta`, and `{-1, 0, 1} in D` for `alpha = beta`.
    pub fn new(unit: PisotUnit, sign: Sign, m: i64, big_m: i64) -> Result<Self> {
        if m > 0 || big_m <= 0 {
            return Err(Error::InvalidSpectrum(format!(
                "digits {m}..{big_m} must satisfy m <= 0 < M"
            )));
        }
        let size = big_m - m + 1;
        if unit.field().int(size) <= *unit.beta() {
            return Err(Error::InvalidSpectrum(format!(
                "#D = {size} does not exceed beta = {}",
                unit.beta().to_decimal(6)
            )));
        }
        if sign == Sign::Plus && m > -1 {
            return Err(Error::InvalidSpectrum(
                "alpha = beta requires {-1, 0, 1} in D".into(),
            ));
        }
        Ok(Self {
            unit,
            sign,
            m,
            big_m,
        })
    }

    pub fn unit(&self) -> &PisotUnit {
        &self.unit
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn digits(&self) -> (i64, i64) {
        (self.m, self.big_m)
    }

    pub fn digit_count(&self) -> i64 {
        self.big_m - self.m + 1
    }

    pub fn alpha(&self) -> QuadElem {
        self.unit.beta().scale_int(self.sign.factor())
    }

    pub fn alpha_conj(&self) -> QuadElem {
        self.unit.beta_conj().scale_int(self.sign.factor())
    }

    pub fn in_ring(&self, x: ZBeta) -> QuadElem {
        self.unit
            .beta()
            .scale_int(x.b)
            .add_rational(&BigRational::from_integer(x.a.into()))
    }

    /// `beta^2 = p beta + n`.
    fn n(&self) -> i64 {
        -self.unit.norm()
    }

    /// `alpha * x` in `Z[beta]` coordinates.
    fn times_alpha(&self, x: ZBeta) -> Option<ZBeta> {
        let p = self.unit.p();
        let a = x.b.checked_mul(self.n())?;
        let b = x.a.checked_add(x.b.checked_mul(p)?)?;
        let s = self.sign.factor();
        Some(ZBeta { a: a * s, b: b * s })
    }

    /// `2(a + b beta) = X + Y sqrt(core)` with integer `X, Y`.
    fn doubled(&self, x: ZBeta) -> (i128, i128) {
        let s2 = (self.unit.beta().b() * BigRational::from_integer(2.into()))
            .to_integer()
            .to_i128()
            .expect("small");
        (2 * x.a as i128 + x.b as i128 * self.unit.p() as i128, x.b as i128 * s2)
    }

    /// Exact order of elements of `Z[beta]`.
    pub fn cmp_ring(&self, x: ZBeta, y: ZBeta) -> Ordering {
        let (xx, yy) = self.doubled(ZBeta {
            a: x.a - y.a,
            b: x.b - y.b,
        });
        let core = self.unit.field().d() as i128;
        match (xx.cmp(&0), yy.cmp(&0)) {
            (s, Ordering::Equal) | (Ordering::Equal, s) => s,
            (s, t) if s == t => s,
            (s, t) => match (xx * xx).cmp(&(yy * yy * core)) {
                Ordering::Greater => s,
                Ordering::Less => t,
                Ordering::Equal => Ordering::Equal,
            },
        }
    }

    pub fn ring_f64(&self, x: ZBeta) -> f64 {
        x.a as f64 + x.b as f64 * self.unit.beta().to_f64()
    }
}

impl fmt::Display for SpectrumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.unit.family() {
            UnitFamily::MinusOne => "x^2 - px - 1",
            UnitFamily::PlusOne => "x^2 - px + 1",
        };
        let s = match self.sign {
            Sign::Plus => "+",
            Sign::Minus => "-",
        };
        write!(f, "alpha = {s}beta, beta root of {fam} with p = {}, D = {{{}..{}}}", self.unit.p(), self.m, self.big_m)
    }
}

/// `a + b beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ZBeta {
    pub a: i64,
    pub b: i64,
}

/// The closed interval of conjugate values `I_{1/alpha', D}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepInterval {
    pub lo: QuadElem,
    pub hi: QuadElem,
}

/// `[m/(1-a'), M/(1-a')]` when `1/a' > 1`, otherwise
/// `[(M a' + m)/(1-a'^2), (M + m a')/(1-a'^2)]`.
pub fn rep_interval(spec: &SpectrumSpec) -> Result<RepInterval> {
    let field = spec.unit.field();
    let ac = spec.alpha_conj();
    let gamma = ac.inverse()?;
    let one = field.one();
    if field.int(spec.big_m - spec.m) <= &gamma.abs() - &one {
        return Err(Error::InvalidSpectrum("alphabet too small for the closed form".into()));
    }
    let (m, big_m) = (field.int(spec.m), field.int(spec.big_m));
    if gamma > one {
        let den = &one - &ac;
        Ok(RepInterval {
            lo: &m / &den,
            hi: &big_m / &den,
        })
    } else {
        let den = &one - &(&ac * &ac);
        Ok(RepInterval {
            lo: (&(&big_m * &ac) + &m) / &den,
            hi: (&big_m + &(&m * &ac)) / &den,
        })
    }
}

/// The cut-and-project parameters `eps = beta'`, `eta = beta`, window
/// `[inf I, sup I)`.
pub fn identify_cap(spec: &SpectrumSpec) -> Result<CapSpec> {
    let i = rep_interval(spec)?;
    CapSpec::new(spec.unit.beta_conj().clone(), spec.unit.beta().clone(), i.lo, i.hi)
}

/// Every value of a digit polynomial of degree `<= max_degree`, sorted.
pub fn generate_direct(spec: &SpectrumSpec, max_degree: u32) -> Result<Vec<ZBeta>> {
    generate_direct_impl(spec, max_degree, None, false)
}

/// As [`generate_direct`] without the degree guard.
pub fn generate_direct_unchecked(spec: &SpectrumSpec, max_degree: u32) -> Result<Vec<ZBeta>> {
    generate_direct_impl(spec, max_degree, None, true)
}

/// The values of [`generate_direct`] inside `[-radius, radius]`.
///
/// Branches whose value exceeds both `radius` and `max|D| / (beta - 1)` in
/// modulus only grow under `x -> d + alpha x`, so they are pruned.
pub fn generate_direct_within(spec: &SpectrumSpec, max_degree: u32, radius: i64) -> Result<Vec<ZBeta>> {
    generate_direct_impl(spec, max_degree, Some(radius), false)
}

fn generate_direct_impl(
    spec: &SpectrumSpec,
    max_degree: u32,
    radius: Option<i64>,
    unchecked: bool,
) -> Result<Vec<ZBeta>> {
    if max_degree > DEFAULT_MAX_DEGREE && !unchecked && radius.is_none() {
        return Err(Error::BudgetExceeded(format!(
            "max degree {max_degree} above the guard {DEFAULT_MAX_DEGREE}"
        )));
    }
    let beta = spec.unit.beta().to_f64();
    let dmax = spec.m.abs().max(spec.big_m) as f64;
    let keep = |x: ZBeta| -> bool {
        match radius {
            None => true,
            Some(r) => {
                let v = spec.ring_f64(x).abs();
                // generous float slack; the final filter is exact
                v <= (r as f64).max(dmax / (beta - 1.0)) + 1.0
            }
        }
    };
    let digits: Vec<ZBeta> = (spec.m..=spec.big_m).map(|a| ZBeta { a, b: 0 }).collect();
    let mut level: HashSet<ZBeta> = digits.iter().copied().collect();
    for _ in 0..max_degree {
        let mut next = HashSet::with_capacity(level.len() * digits.len());
        for &x in &level {
            let ax = spec
                .times_alpha(x)
                .ok_or_else(|| Error::BudgetExceeded("coordinates overflow".into()))?;
            for d in &digits {
                let y = ZBeta {
                    a: ax.a + d.a,
                    b: ax.b,
                };
                if keep(y) {
                    next.insert(y);
                }
            }
        }
        if next.len() > DIRECT_POINT_BUDGET {
            return Err(Error::BudgetExceeded(format!("{} points", next.len())));
        }
        level = next;
    }
    let mut out: Vec<ZBeta> = level.into_iter().collect();
    if let Some(r) = radius {
        let (lo, hi) = (ZBeta { a: -r, b: 0 }, ZBeta { a: r, b: 0 });
        out.retain(|&x| spec.cmp_ring(x, lo) != Ordering::Less && spec.cmp_ring(x, hi) != Ordering::Greater);
    }
    out.sort_by(|&x, &y| spec.cmp_ring(x, y));
    Ok(out)
}

/// The spectrum inside `[lo, hi]` as the cut-and-project set with window
/// `I° ∪ {0}`.
pub fn generate_cap(spec: &SpectrumSpec, lo: &QuadElem, hi: &QuadElem) -> Result<CapSet> {
    let cap = identify_cap(spec)?;
    let set = cutproject::generate(&cap, lo, hi)?;
    Ok(drop_lower_endpoint(set))
}

/// Spectrum points around 0, at least `count` on each side.
pub fn generate_cap_count(spec: &SpectrumSpec, count: usize) -> Result<CapSet> {
    let cap = identify_cap(spec)?;
    let set = cutproject::generate_count(&cap, count + 1)?;
    Ok(drop_lower_endpoint(set))
}

/// `[inf I, sup I)` admits the point whose conjugate is `inf I`; the open
/// interior does not, unless that endpoint is 0.
fn drop_lower_endpoint(set: CapSet) -> CapSet {
    let spec = set.spec().clone();
    let (lo, _) = spec.window();
    if lo.is_zero() {
        return set;
    }
    let lof = lo.to_f64();
    let points = set
        .points()
        .iter()
        .filter(|p| (p.star - lof).abs() > 1e-6 * (1.0 + lof.abs()) || spec.star_exact(p.a, p.b) != *lo)
        .copied()
        .collect();
    CapSet::from_sorted(spec, points)
}

pub fn to_ring(set: &CapSet) -> Vec<ZBeta> {
    set.points().iter().map(|p| ZBeta { a: p.a, b: p.b }).collect()
}

/// Verdict of the divisibility criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumDecision {
    pub bdl: bool,
    pub reason: String,
    pub divisor: i64,
    pub digits_minus_one: i64,
}

/// BDL iff `floor(beta)` divides `#D - 1` when `beta' < 0`, or
/// `floor(beta) - 1` divides it when `beta' > 0`.
pub fn bdl_decide(spec: &SpectrumSpec) -> SpectrumDecision {
    bdl_criterion(&spec.unit, spec.digit_count())
}

/// The divisibility condition alone, for any unit and alphabet size.
pub fn bdl_criterion(unit: &PisotUnit, digit_count: i64) -> SpectrumDecision {
    let fb = unit.floor_beta();
    let negative = unit.beta_conj().is_negative();
    let divisor = if negative { fb } else { fb - 1 };
    let k = digit_count - 1;
    let bdl = k % divisor == 0;
    let rel = if bdl { "|" } else { "∤" };
    let which = if negative {
        "beta' < 0, floor(beta)"
    } else {
        "beta' > 0, floor(beta) - 1"
    };
    SpectrumDecision {
        bdl,
        reason: format!("{which} = {divisor}, #D - 1 = {k}: {divisor} {rel} {k}"),
        divisor,
        digits_minus_one: k,
    }
}

/// `xi = (beta - beta')(1 - |beta'|) / (#D - 1)`.
pub fn average_lattice_xi(spec: &SpectrumSpec) -> Result<QuadElem> {
    let d = bdl_decide(spec);
    if !d.bdl {
        return Err(Error::NotBdl(d.reason));
    }
    Ok(xi_formula(spec))
}

fn xi_formula(spec: &SpectrumSpec) -> QuadElem {
    let (b, bc) = (spec.unit.beta(), spec.unit.beta_conj());
    let field = spec.unit.field();
    let k = BigRational::new(BigInt::from(1), BigInt::from(spec.digit_count() - 1));
    (&(b - bc) * &(&field.one() - &bc.abs())).scale(&k)
}

/// The Kesten verdict for the identified cut-and-project set.
pub fn kesten_for(spec: &SpectrumSpec) -> Result<KestenDecision> {
    Ok(cutproject::kesten_decide(&identify_cap(spec)?))
}

/// Valid specs over the parameter grid used for sweeps: `MinusOne`
/// with `p` in `minus_ps`, `PlusOne` with `p` in `plus_ps`, both signs,
/// `#D` in `sizes`, and every placement of `0` in the digit range.
pub fn sweep(minus_ps: &[i64], plus_ps: &[i64], sizes: std::ops::RangeInclusive<i64>) -> Vec<SpectrumSpec> {
    let mut out = Vec::new();
    let units = minus_ps
        .iter()
        .map(|&p| (UnitFamily::MinusOne, p))
        .chain(plus_ps.iter().map(|&p| (UnitFamily::PlusOne, p)));
    for (fam, p) in units {
        let Ok(unit) = PisotUnit::new(fam, p) else { continue };
        for sign in [Sign::Minus, Sign::Plus] {
            for n in sizes.clone() {
                for m in -(n - 2)..=0 {
                    if let Ok(s) = SpectrumSpec::new(unit.clone(), sign, m, m + n - 1) {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;

    fn golden_minus() -> SpectrumSpec {
        SpectrumSpec::new(PisotUnit::golden(), Sign::Minus, 0, 1).unwrap()
    }

    fn tau() -> QuadElem {
        PisotUnit::golden().beta().clone()
    }

    #[test]
    fn validation() {
        assert!(SpectrumSpec::new(PisotUnit::golden(), Sign::Minus, 0, 1).is_ok());
        assert!(SpectrumSpec::new(PisotUnit::golden(), Sign::Plus, 0, 1).is_err());
        let p3 = PisotUnit::new(UnitFamily::PlusOne, 3).unwrap();
        assert!(SpectrumSpec::new(p3.clone(), Sign::Minus, 0, 2).is_ok());
        assert!(SpectrumSpec::new(p3, Sign::Minus, 0, 1).is_err());
        assert!(SpectrumSpec::new(PisotUnit::golden(), Sign::Minus, 1, 2).is_err());
    }

    #[test]
    fn golden_interval() {
        let i = rep_interval(&golden_minus()).unwrap();
        let t = tau();
        assert!(i.lo.is_zero());
        assert_eq!(i.hi, &t * &t);
    }

    #[test]
    fn symmetric_digits_give_symmetric_interval() {
        let s = SpectrumSpec::new(PisotUnit::golden(), Sign::Plus, -1, 1).unwrap();
        let i = rep_interval(&s).unwrap();
        assert_eq!(i.lo, -&i.hi);
        // extreme strings alternate between M and m against alpha' = tau' < 0
        let ac = s.alpha_conj();
        let mut sup = 0.0;
        for k in 0..80 {
            let d = if k % 2 == 0 { 1.0 } else { -1.0 };
            sup += d * ac.to_f64().powi(k);
        }
        assert!((sup - i.hi.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn direct_degree_two() {
        let s = golden_minus();
        let got: Vec<QuadElem> = generate_direct(&s, 2).unwrap().into_iter().map(|x| s.in_ring(x)).collect();
        let t = tau();
        let f = t.field();
        let t2 = &t * &t;
        let mut expected = vec![
            &f.one() - &t,
            -&t,
            f.zero(),
            f.one(),
            t2.clone(),
            &t2 + &f.one(),
            &t2 - &t,
            &(&t2 - &t) + &f.one(),
        ];
        expected.sort();
        expected.dedup();
        assert_eq!(expected.len(), 7);
        assert_eq!(got, expected);
        let d0: Vec<ZBeta> = generate_direct(&s, 0).unwrap();
        assert_eq!(d0, vec![ZBeta { a: 0, b: 0 }, ZBeta { a: 1, b: 0 }]);
    }

    #[test]
    fn degree_guard() {
        assert!(matches!(generate_direct(&golden_minus(), 13), Err(Error::BudgetExceeded(_))));
        assert!(generate_direct_unchecked(&golden_minus(), 13).is_ok());
    }

    #[test]
    fn self_similarity() {
        let s = golden_minus();
        let small: HashSet<ZBeta> = generate_direct(&s, 6).unwrap().into_iter().collect();
        let big: HashSet<ZBeta> = generate_direct(&s, 7).unwrap().into_iter().collect();
        for x in small {
            assert!(big.contains(&s.times_alpha(x).unwrap()));
        }
    }

    #[test]
    fn cap_matches_direct_golden() {
        let s = golden_minus();
        let f = s.unit().field();
        let direct = generate_direct_within(&s, 12, 6).unwrap();
        let cap = to_ring(&generate_cap(&s, &f.int(-6), &f.int(6)).unwrap());
        assert_eq!(direct, cap);
    }

    #[test]
    fn golden_gaps_and_coding() {
        let s = golden_minus();
        let f = s.unit().field();
        let set = generate_cap(&s, &f.int(-30), &f.int(30)).unwrap();
        let g = cutproject::gap_code(&set).unwrap();
        let t = tau();
        assert_eq!(g.gaps, vec![f.one(), &t - &f.one()]);
        assert_eq!(g.word.char_at(-1), Some('B'));
        assert_eq!(g.word.char_at(0), Some('A'));
    }

    #[test]
    fn decisions() {
        assert!(bdl_decide(&golden_minus()).bdl);
        let silver = PisotUnit::new(UnitFamily::MinusOne, 2).unwrap();
        let d = bdl_criterion(&silver, 2);
        assert!(!d.bdl);
        assert!(d.reason.contains("2 ∤ 1"));
        assert!(SpectrumSpec::new(silver.clone(), Sign::Minus, 0, 1).is_err());
        assert!(!bdl_decide(&SpectrumSpec::new(silver.clone(), Sign::Minus, 0, 3).unwrap()).bdl);
        assert!(bdl_decide(&SpectrumSpec::new(silver, Sign::Minus, 0, 2).unwrap()).bdl);
        let p3 = PisotUnit::new(UnitFamily::PlusOne, 3).unwrap();
        for top in 2..6 {
            assert!(bdl_decide(&SpectrumSpec::new(p3.clone(), Sign::Minus, 0, top).unwrap()).bdl);
        }
    }

    #[test]
    fn xi_values() {
        let s = golden_minus();
        let t = tau();
        let xi = average_lattice_xi(&s).unwrap();
        assert_eq!(xi, &t.pow(-1).unwrap() + &t.pow(-3).unwrap());
        assert_eq!(kesten_for(&s).unwrap().lattice_step(), Some(&xi));
        let wide = SpectrumSpec::new(PisotUnit::golden(), Sign::Minus, 0, 2).unwrap();
        assert_eq!(average_lattice_xi(&wide).unwrap().scale_int(2), xi);
        let p3 = PisotUnit::new(UnitFamily::PlusOne, 3).unwrap();
        let s3 = SpectrumSpec::new(p3.clone(), Sign::Minus, 0, 2).unwrap();
        let (b, bc) = (p3.beta(), p3.beta_conj());
        let f: QuadField = p3.field();
        let expected = (&(b - bc) * &(&f.one() - bc)).scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(average_lattice_xi(&s3).unwrap(), expected);
        assert_eq!(kesten_for(&s3).unwrap().lattice_step(), Some(&expected));
    }

    #[test]
    fn ring_order_is_exact() {
        let s = golden_minus();
        let x = ZBeta { a: 1, b: 0 };
        let y = ZBeta { a: -1, b: 1 }; // tau - 1 < 1
        assert_eq!(s.cmp_ring(x, y), Ordering::Greater);
        assert_eq!(s.cmp_ring(x, x), Ordering::Equal);
    }
}
