//! Empirical bounded-distance machinery: discrepancy profiles against a
//! lattice `xi Z`, a boundedness heuristic, the bijection `x_n -> xi n`,
//! and a planar grid emitter.

use std::cmp::Ordering;
use std::io::Write;

use num_rational::BigRational;
use serde::Serialize;

use crate::cutproject::CapSet;
use crate::error::{Error, Result};
use crate::morphisms::{Morphism, Seed};
use crate::quadfield::{Approx, QuadElem};
use crate::words::geometric_points_f64;

/// A sorted point sequence that can be compared exactly to float thresholds.
pub trait PointSeq {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn approx(&self, i: usize) -> f64;

    /// Exact sign of `x_i - t`, `t` read as an exact dyadic rational.
    fn cmp_to(&self, i: usize, t: f64) -> Ordering;
}

impl PointSeq for [f64] {
    fn len(&self) -> usize {
        <[f64]>::len(self)
    }

    fn approx(&self, i: usize) -> f64 {
        self[i]
    }

    fn cmp_to(&self, i: usize, t: f64) -> Ordering {
        self[i].total_cmp(&t)
    }
}

impl PointSeq for Vec<f64> {
    fn len(&self) -> usize {
        self.as_slice().len()
    }

    fn approx(&self, i: usize) -> f64 {
        self[i]
    }

    fn cmp_to(&self, i: usize, t: f64) -> Ordering {
        self[i].total_cmp(&t)
    }
}

fn cmp_quad(x: &QuadElem, t: f64) -> Ordering {
    let tt = Approx { value: t, err: 0.0 };
    x.approx()
        .cmp_certain(&tt)
        .unwrap_or_else(|| x.cmp_rational(&BigRational::from_float(t).expect("finite threshold")))
}

impl PointSeq for [QuadElem] {
    fn len(&self) -> usize {
        <[QuadElem]>::len(self)
    }

    fn approx(&self, i: usize) -> f64 {
        self[i].to_f64()
    }

    fn cmp_to(&self, i: usize, t: f64) -> Ordering {
        cmp_quad(&self[i], t)
    }
}

impl PointSeq for Vec<QuadElem> {
    fn len(&self) -> usize {
        self.as_slice().len()
    }

    fn approx(&self, i: usize) -> f64 {
        self[i].to_f64()
    }

    fn cmp_to(&self, i: usize, t: f64) -> Ordering {
        cmp_quad(&self[i], t)
    }
}

impl PointSeq for CapSet {
    fn len(&self) -> usize {
        CapSet::len(self)
    }

    fn approx(&self, i: usize) -> f64 {
        self.points()[i].value
    }

    fn cmp_to(&self, i: usize, t: f64) -> Ordering {
        let v = self.points()[i].value;
        let slack = 1e-9 * (1.0 + v.abs());
        if v - t > slack {
            Ordering::Greater
        } else if t - v > slack {
            Ordering::Less
        } else {
            cmp_quad(&self.value_exact(i), t)
        }
    }
}

/// First index with `x_i >= t`.
fn lower_bound<P: PointSeq + ?Sized>(pts: &P, t: f64) -> usize {
    let (mut lo, mut hi) = (0, pts.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pts.cmp_to(mid, t) == Ordering::Less {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Running deviations `sup_{N' <= N} |#(Lambda ∩ [0, N')) - N'/xi|` and the
/// mirrored left-hand quantity, at each horizon `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyProfile {
    pub xi: f64,
    pub horizons: Vec<f64>,
    pub right_dev: Vec<f64>,
    /// `None` for one-sided data.
    pub left_dev: Option<Vec<f64>>,
}

impl DiscrepancyProfile {
    /// Two-sided profile; the points must reach `+-max(horizons)`.
    pub fn compute<P: PointSeq + ?Sized>(points: &P, xi: f64, horizons: &[f64]) -> Result<Self> {
        Self::compute_impl(points, xi, horizons, true)
    }

    /// Profile of `[0, N)` only, for right-infinite data.
    pub fn compute_right<P: PointSeq + ?Sized>(points: &P, xi: f64, horizons: &[f64]) -> Result<Self> {
        Self::compute_impl(points, xi, horizons, false)
    }

    fn compute_impl<P: PointSeq + ?Sized>(points: &P, xi: f64, horizons: &[f64], two_sided: bool) -> Result<Self> {
        if !(xi > 0.0) {
            return Err(Error::Degenerate(format!("lattice step {xi} is not positive")));
        }
        if horizons.windows(2).any(|w| w[0] >= w[1]) || horizons.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::Degenerate("horizons must be positive and increasing".into()));
        }
        let Some(&max_h) = horizons.last() else {
            return Ok(Self {
                xi,
                horizons: Vec::new(),
                right_dev: Vec::new(),
                left_dev: two_sided.then(Vec::new),
            });
        };
        let n = points.len();
        if n == 0 || points.cmp_to(n - 1, max_h) == Ordering::Less {
            return Err(Error::InsufficientCoverage(format!("no point at or beyond {max_h}")));
        }
        if two_sided && points.cmp_to(0, -max_h) == Ordering::Greater {
            return Err(Error::InsufficientCoverage(format!("no point at or below {}", -max_h)));
        }
        let origin = lower_bound(points, 0.0);

        let mut right_dev = Vec::with_capacity(horizons.len());
        let mut sup = 0.0f64;
        let mut k = 0usize; // points of [0, N') counted so far
        let mut prev = 0.0f64; // left end of the current constancy interval
        for &h in horizons {
            // intervals (x_{k-1}, x_k] fully below h
            while origin + k < n && points.cmp_to(origin + k, h) == Ordering::Less {
                let x = points.approx(origin + k);
                let kf = k as f64;
                sup = sup.max((kf - prev / xi).abs()).max((kf - x / xi).abs());
                prev = x;
                k += 1;
            }
            let kf = k as f64;
            let here = sup.max((kf - prev / xi).abs()).max((kf - h / xi).abs());
            right_dev.push(here);
        }

        let left_dev = if two_sided {
            let mut dev = Vec::with_capacity(horizons.len());
            let mut sup = 0.0f64;
            let mut j = 0usize; // points of [-N', 0) counted so far
            let mut prev = 0.0f64;
            for &h in horizons {
                // points y with -h < y < 0 change the count before N' reaches h
                while j < origin && points.cmp_to(origin - 1 - j, -h) == Ordering::Greater {
                    let y = -points.approx(origin - 1 - j);
                    let jf = j as f64;
                    sup = sup.max((jf - prev / xi).abs()).max((jf - y / xi).abs());
                    prev = y;
                    j += 1;
                }
                let jf = j as f64;
                dev.push(sup.max((jf - prev / xi).abs()).max((jf - h / xi).abs()));
            }
            Some(dev)
        } else {
            None
        };
        Ok(Self {
            xi,
            horizons: horizons.to_vec(),
            right_dev,
            left_dev,
        })
    }

    /// `max(right, left)` per horizon.
    pub fn combined(&self) -> Vec<f64> {
        match &self.left_dev {
            Some(l) => self.right_dev.iter().zip(l).map(|(a, b)| a.max(*b)).collect(),
            None => self.right_dev.clone(),
        }
    }

    pub fn max_deviation(&self) -> f64 {
        self.combined().into_iter().fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "N,right_dev,left_dev")?;
        for (i, h) in self.horizons.iter().enumerate() {
            let left = self
                .left_dev
                .as_ref()
                .map(|l| format!("{:.12}", l[i]))
                .unwrap_or_default();
            writeln!(w, "{:.12},{:.12},{}", h, self.right_dev[i], left)?;
        }
        Ok(())
    }
}

/// Horizons `2^k xi` for `k` in `k_min..=k_max`; roughly `2^k` points each.
pub fn doubling_horizons(xi: f64, k_min: u32, k_max: u32) -> Vec<f64> {
    (k_min..=k_max).map(|k| xi * f64::from(2u32).powi(k as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundedness {
    LooksBounded,
    LooksUnbounded,
    Inconclusive,
}

/// Advisory reading of a profile over doubling horizons.
///
/// Unbounded: the deviation rose at each of the last three doublings and
/// by a factor of at least 1.5 over them, or it rose by at least 0.5 over
/// a later half spanning four or more doublings (logarithmic growth).
/// Bounded: the last value is within three times the median of the first
/// half and within 0.1 of the value at the middle horizon.
pub fn classify_boundedness(p: &DiscrepancyProfile) -> Boundedness {
    let d = p.combined();
    let n = d.len();
    if n < 4 {
        return Boundedness::Inconclusive;
    }
    let last = d[n - 1];
    let rising = (n - 4..n - 1).all(|i| d[i + 1] > d[i]);
    if rising && last >= 1.5 * d[n - 4] {
        return Boundedness::LooksUnbounded;
    }
    let mid = d[n / 2];
    if n - n / 2 >= 4 && last - mid >= 0.5 {
        return Boundedness::LooksUnbounded;
    }
    let mut early = d[..n / 2].to_vec();
    early.sort_by(f64::total_cmp);
    let median = if early.len() % 2 == 1 {
        early[early.len() / 2]
    } else {
        0.5 * (early[early.len() / 2 - 1] + early[early.len() / 2])
    };
    if last <= 3.0 * median && last - mid <= 0.1 {
        Boundedness::LooksBounded
    } else {
        Boundedness::Inconclusive
    }
}

/// One pairing `x_n <-> xi n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pairing {
    pub n: i64,
    pub x: f64,
    pub lattice: f64,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BijectionWitness {
    pub xi: f64,
    pub pairs: Vec<Pairing>,
    pub max_displacement: f64,
}

impl BijectionWitness {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,x_n,xi_n,displacement")?;
        for p in &self.pairs {
            writeln!(w, "{},{:.12},{:.12},{:.12}", p.n, p.x, p.lattice, p.displacement)?;
        }
        Ok(())
    }
}

/// Pairs `x_n` with `xi n` for `-count <= n < count` (as far as the data
/// reaches), indexed so that `x_{-1} < 0 <= x_0`.
pub fn bijection_witness<P: PointSeq + ?Sized>(points: &P, xi: f64, count: usize) -> Result<BijectionWitness> {
    let origin = lower_bound(points, 0.0);
    if origin == 0 || origin == points.len() {
        return Err(Error::Degenerate("no pair of points straddles 0".into()));
    }
    let lo = origin.saturating_sub(count);
    let hi = (origin + count).min(points.len());
    let mut pairs = Vec::with_capacity(hi - lo);
    let mut max_displacement = 0.0f64;
    for i in lo..hi {
        let n = i as i64 - origin as i64;
        let x = points.approx(i);
        let lattice = xi * n as f64;
        let displacement = (x - lattice).abs();
        max_displacement = max_displacement.max(displacement);
        pairs.push(Pairing {
            n,
            x,
            lattice,
            displacement,
        });
    }
    Ok(BijectionWitness {
        xi,
        pairs,
        max_displacement,
    })
}

/// `{x u + y v : x in l1, y in l2}` clipped to `[-bound, bound]^2`.
pub fn grid_points(l1: &[f64], l2: &[f64], u: [f64; 2], v: [f64; 2], bound: f64) -> Result<Vec<[f64; 2]>> {
    let det = u[0] * v[1] - u[1] * v[0];
    let scale = u[0].hypot(u[1]) * v[0].hypot(v[1]);
    if !(det.abs() > 1e-12 * scale) {
        return Err(Error::Degenerate("generating vectors are linearly dependent".into()));
    }
    let mut out = Vec::new();
    for &x in l1 {
        for &y in l2 {
            let p = [x * u[0] + y * v[0], x * u[1] + y * v[1]];
            if p[0].abs() <= bound && p[1].abs() <= bound {
                out.push(p);
            }
        }
    }
    Ok(out)
}

pub fn write_grid_csv<W: Write>(pts: &[[f64; 2]], mut w: W) -> Result<()> {
    writeln!(w, "x,y")?;
    for p in pts {
        writeln!(w, "{:.12},{:.12}", p[0], p[1])?;
    }
    Ok(())
}

/// Two-sided Fibonacci chain with tiles `tau` and `1`, built from the
/// fixed point of `A -> ABA, B -> AB` seeded at `A|A`; `2 radius + 1` points.
pub fn fibonacci_chain(radius: usize) -> Vec<f64> {
    let phi = Morphism::parse("A->ABA;B->AB").expect("valid rules");
    let window = phi
        .fixed_point_window(Seed::two_sided('A', 'A'), radius)
        .expect("admissible seed");
    let tau = 0.5 * (1.0 + 5f64.sqrt());
    geometric_points_f64(&window, &[tau, 1.0]).expect("positive lengths")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(offset: f64, n: i64) -> Vec<f64> {
        (-n..=n).map(|k| k as f64 + offset).collect()
    }

    fn profile(devs: &[f64]) -> DiscrepancyProfile {
        DiscrepancyProfile {
            xi: 1.0,
            horizons: (0..devs.len()).map(|k| f64::from(2u32).powi(k as i32)).collect(),
            right_dev: devs.to_vec(),
            left_dev: None,
        }
    }

    #[test]
    fn lattice_against_itself() {
        let pts = lattice(0.0, 5000);
        let p = DiscrepancyProfile::compute(&pts, 1.0, &doubling_horizons(1.0, 2, 12)).unwrap();
        assert!(p.max_deviation() <= 1.0);
        assert_eq!(classify_boundedness(&p), Boundedness::LooksBounded);
    }

    #[test]
    fn constructed_profiles() {
        assert_eq!(classify_boundedness(&profile(&[2.0, 4.0, 8.0, 16.0])), Boundedness::LooksUnbounded);
        assert_eq!(classify_boundedness(&profile(&[2.0, 2.0, 2.0, 5.0])), Boundedness::Inconclusive);
        assert_eq!(classify_boundedness(&profile(&[1.0, 1.0, 1.0])), Boundedness::Inconclusive);
    }

    #[test]
    fn logarithmic_growth_is_unbounded() {
        let devs: Vec<f64> = (4..=20).map(|k| 0.25 * k as f64).collect();
        assert_eq!(classify_boundedness(&profile(&devs)), Boundedness::LooksUnbounded);
    }

    #[test]
    fn coverage_is_checked() {
        let pts = lattice(0.0, 10);
        assert!(matches!(
            DiscrepancyProfile::compute(&pts, 1.0, &[4.0, 20.0]),
            Err(Error::InsufficientCoverage(_))
        ));
        let right: Vec<f64> = (0..100).map(f64::from).collect();
        assert!(DiscrepancyProfile::compute(&right, 1.0, &[4.0, 50.0]).is_err());
        let p = DiscrepancyProfile::compute_right(&right, 1.0, &[4.0, 50.0]).unwrap();
        assert!(p.left_dev.is_none());
    }

    #[test]
    fn witness_on_shifted_lattice() {
        let pts = lattice(0.3, 100);
        let w = bijection_witness(&pts, 1.0, 50).unwrap();
        assert!((w.max_displacement - 0.3).abs() < 1e-12);
        assert_eq!(w.pairs.first().unwrap().n, -50);
        let positive: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(bijection_witness(&positive, 1.0, 5).is_err());
    }

    #[test]
    fn grids() {
        let z: Vec<f64> = (-3..=3).map(f64::from).collect();
        let g = grid_points(&z, &z, [1.0, 0.0], [0.0, 1.0], 10.0).unwrap();
        assert_eq!(g.len(), 49);
        assert!(grid_points(&[], &z, [1.0, 0.0], [0.0, 1.0], 10.0).unwrap().is_empty());
        assert!(grid_points(&z, &z, [1.0, 1.0], [2.0, 2.0], 10.0).is_err());
    }

    #[test]
    fn fibonacci_chain_density() {
        let pts = fibonacci_chain(2000);
        assert_eq!(pts.len(), 4001);
        let tau = 0.5 * (1.0 + 5f64.sqrt());
        // mean spacing tau rho_A + rho_B = (tau^2 + 1) / (tau + 1)
        let xi = (tau * tau + 1.0) / (tau + 1.0);
        let p = DiscrepancyProfile::compute(&pts, xi, &doubling_horizons(xi, 2, 10)).unwrap();
        assert!(p.max_deviation() < 2.0);
    }

    #[test]
    fn exact_and_float_inputs_agree() {
        use crate::quadfield::QuadField;
        let f = QuadField::new(5).unwrap();
        let tau = f.elem(1, 2, 1, 2);
        let exact: Vec<QuadElem> = (-300..=300).map(|k| tau.scale_int(k)).collect();
        let approx: Vec<f64> = exact.iter().map(QuadElem::to_f64).collect();
        let hs = doubling_horizons(tau.to_f64(), 1, 7);
        let a = DiscrepancyProfile::compute(&exact, tau.to_f64(), &hs).unwrap();
        let b = DiscrepancyProfile::compute(&approx, tau.to_f64(), &hs).unwrap();
        for (x, y) in a.combined().iter().zip(b.combined()) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
