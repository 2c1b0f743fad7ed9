use aperiodic::bdl::{bijection_witness, doubling_horizons, DiscrepancyProfile};
use aperiodic::cutproject::{self, CapSpec};
use aperiodic::morphisms::{IncidenceMatrix, Morphism, Seed};
use aperiodic::quadfield::{QuadElem, QuadField};
use aperiodic::spectral;
use aperiodic::words::{geometric_points_f64, Alphabet, ParikhVec, WordWindow};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = QuadField> {
    prop::sample::select(vec![2i64, 3, 5, 6, 7, 11, 13, 17]).prop_map(|d| QuadField::new(d).unwrap())
}

fn elem(f: QuadField) -> impl Strategy<Value = QuadElem> {
    (-10_000i64..10_000, 1i64..200, -10_000i64..10_000, 1i64..200).prop_map(move |(a, b, c, d)| f.elem(a, b, c, d))
}

fn pair() -> impl Strategy<Value = (QuadElem, QuadElem)> {
    field().prop_flat_map(|f| (elem(f), elem(f)))
}

fn mechanical(alpha: f64, rho: f64, radius: i64, k: usize) -> WordWindow {
    let letters = (-radius..radius)
        .map(|n| {
            let n = n as f64;
            (((n + 1.0) * alpha + rho).floor() - (n * alpha + rho).floor()) as u8
        })
        .collect();
    WordWindow::new(Alphabet::latin(k), letters, radius as usize).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn field_identities((x, y) in pair()) {
        let f = x.field();
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!(&x * &(&y + &f.one()), &(&x * &y) + &x);
        if !y.is_zero() {
            prop_assert_eq!(&(&x / &y) * &y, x.clone());
        }
        let fl = f.zero().add_rational(&BigRational::from_integer(x.floor()));
        prop_assert!(fl <= x && x < &fl + &f.one());
        if (x.to_f64() - y.to_f64()).abs() > 1e-6 {
            prop_assert_eq!(x < y, x.to_f64() < y.to_f64());
        }
        prop_assert_eq!(QuadElem::parse(&x.to_string(), Some(f)).unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parikh_is_additive(alpha in 0.05f64..0.95, rho in 0.0f64..1.0, cuts in prop::array::uniform3(-2_000i64..=2_000)) {
        let w = mechanical(alpha, rho, 2_000, 2);
        let mut c = cuts;
        c.sort();
        let [lo, mid, hi] = c;
        let whole = ParikhVec::of(w.factor(lo, hi).unwrap(), 2);
        let parts = &ParikhVec::of(w.factor(lo, mid).unwrap(), 2) + &ParikhVec::of(w.factor(mid, hi).unwrap(), 2);
        prop_assert_eq!(&whole, &parts);
        prop_assert_eq!(&whole, &(&w.parikh_prefix(hi).unwrap() - &w.parikh_prefix(lo).unwrap()));
    }

    #[test]
    fn geometric_representation_tracks_eta(alpha in 0.05f64..0.95, rho in 0.0f64..1.0, la in 0.1f64..5.0, lb in 0.1f64..5.0) {
        // a mechanical word is 1-balanced with frequencies (1 - alpha, alpha)
        let w = mechanical(alpha, rho, 3_000, 2);
        let pts = geometric_points_f64(&w, &[la, lb]).unwrap();
        let eta = la * (1.0 - alpha) + lb * alpha;
        let bound = la + lb;
        for (i, x) in pts.iter().enumerate() {
            let n = w.lo() + i as i64;
            prop_assert!((x - n as f64 * eta).abs() <= bound + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn morphic_image_stays_balanced(
        alpha in 0.05f64..0.95,
        rho in 0.0f64..1.0,
        k in 2usize..=3,
        raw in prop::collection::vec(prop::collection::vec(0u8..3, 1..=4), 3),
    ) {
        let w = mechanical(alpha, rho, 1_500, k);
        let images: Vec<Vec<u8>> = raw.into_iter().take(k).map(|v| v.into_iter().map(|x| x % k as u8).collect()).collect();
        let psi = Morphism::new(Alphabet::latin(k), images).unwrap();
        let v = psi.apply(&w).unwrap();

        let freq = [1.0 - alpha, alpha];
        let mu = (0..2u8).map(|a| psi.image(a).len()).max().unwrap() as f64;
        let count = |b: u8, a: u8| psi.image(a).iter().filter(|&&x| x == b).count() as f64;
        let lambda: f64 = (0..2u8).map(|a| psi.image(a).len() as f64 * freq[a as usize]).sum();
        let kappa = 2.0 * mu + (psi.image(0).len() + psi.image(1).len()) as f64;
        let bound = (0..k as u8)
            .map(|b| {
                let lb = count(b, 0) * freq[0] + count(b, 1) * freq[1];
                let kb = 2.0 * mu + count(b, 0) + count(b, 1);
                (lb / lambda * 2.0 * kappa + 2.0 * kb).ceil()
            })
            .fold(0.0, f64::max);
        prop_assert!(v.balance_constant(300) as f64 <= bound);
    }

    #[test]
    fn cayley_hamilton(n in 1usize..=6, seed in prop::collection::vec(0u64..8, 36)) {
        let rows: Vec<Vec<u64>> = (0..n).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
        let m = IncidenceMatrix::from_rows(rows).unwrap();
        let cp = spectral::char_poly(&m);
        prop_assert_eq!(cp.degree(), n);
        prop_assert!(cp.eval_matrix(&m.to_i64()).iter().flatten().all(BigInt::is_zero));
    }

    #[test]
    fn unimodular_round_trip(word in prop::collection::vec(0usize..3, 1..6), c in 0i64..3, len in 1i64..4) {
        // products of orientation-preserving generators
        let gens = [[1i64, 1, 0, 1], [1, -1, 0, 1], [1, 0, 1, 1]];
        let mul = |p: [i64; 4], q: [i64; 4]| [
            p[0] * q[0] + p[1] * q[2],
            p[0] * q[1] + p[1] * q[3],
            p[2] * q[0] + p[3] * q[2],
            p[2] * q[1] + p[3] * q[3],
        ];
        let m = word.iter().fold([1, 0, 0, 1], |acc, &g| mul(acc, gens[g]));
        let f = QuadField::new(5).unwrap();
        let spec = CapSpec::new(f.elem(3, 2, -1, 2), f.elem(3, 2, 1, 2), f.int(c), f.int(c + len)).unwrap();
        if let Ok((moved, scale)) = cutproject::unimodular_transform(&spec, m) {
            let inv = [m[3], -m[1], -m[2], m[0]];
            let (back, scale_back) = cutproject::unimodular_transform(&moved, inv).unwrap();
            prop_assert_eq!(back.epsilon(), spec.epsilon());
            prop_assert_eq!(back.eta(), spec.eta());
            prop_assert_eq!(back.window(), spec.window());
            prop_assert_eq!(&scale * &scale_back, f.one());
        }
    }
}

fn cap_points() -> (Vec<f64>, f64) {
    let f = QuadField::new(5).unwrap();
    let spec = CapSpec::new(f.elem(3, 2, -1, 2), f.elem(3, 2, 1, 2), f.zero(), f.one()).unwrap();
    let set = cutproject::generate_count(&spec, 5_000).unwrap();
    (set.values_f64(), spec.density_step().to_f64())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_moves_counts_boundedly(t in -3.0f64..3.0) {
        let (pts, xi) = cap_points();
        let hs = doubling_horizons(xi, 2, 10);
        let base = DiscrepancyProfile::compute(&pts, xi, &hs).unwrap();
        let moved: Vec<f64> = pts.iter().map(|x| x + t).collect();
        let p = DiscrepancyProfile::compute(&moved, xi, &hs).unwrap();
        // each count of [0, N') changes by at most |t| / xi + 1
        let slack = 2.0 * (t.abs() / xi + 1.0);
        for (a, b) in base.combined().iter().zip(p.combined()) {
            prop_assert!((a - b).abs() <= slack);
        }
    }

    #[test]
    fn scaling_leaves_counts_identical(k in 0i32..6) {
        let s = 2f64.powi(k - 2);
        let (pts, xi) = cap_points();
        let hs = doubling_horizons(xi, 2, 10);
        let base = DiscrepancyProfile::compute(&pts, xi, &hs).unwrap();
        let scaled: Vec<f64> = pts.iter().map(|x| x * s).collect();
        let hs_s: Vec<f64> = hs.iter().map(|h| h * s).collect();
        let p = DiscrepancyProfile::compute(&scaled, xi * s, &hs_s).unwrap();
        for (a, b) in base.combined().iter().zip(p.combined()) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn witness_and_profile_agree(offset in 0.0f64..1.0, step in 0.5f64..2.0, jitter in prop::collection::vec(-0.4f64..0.4, 401)) {
        // xi Z + offset with bounded jitter, sorted
        let mut pts: Vec<f64> = jitter.iter().enumerate().map(|(i, j)| ((i as f64 - 200.0) + offset + j) * step).collect();
        pts.sort_by(f64::total_cmp);
        let h = 150.0 * step;
        let profile = DiscrepancyProfile::compute(&pts, step, &[h]).unwrap();
        let w = bijection_witness(&pts, step, 200).unwrap();
        let inside = w.pairs.iter().filter(|p| p.x.abs() < h).map(|p| p.displacement).fold(0.0, f64::max);
        prop_assert!(profile.max_deviation() <= w.max_displacement / step + 1.0 + 1e-9);
        prop_assert!(inside / step <= profile.max_deviation() + 1.0 + 1e-9);
    }
}

#[test]
fn fixed_points_satisfy_their_equation() {
    let cases = [
        ("A->AAB;B->AB", "B|A"),
        ("A->ABA;B->AB", "A|A"),
        ("A->ABBA;B->AA", "A|A"),
    ];
    for (rules, seed) in cases {
        let phi = Morphism::parse(rules).unwrap();
        let u = phi.fixed_point_window(Seed::parse(seed).unwrap(), 10_000).unwrap();
        let image = phi.apply(&u).unwrap();
        assert_eq!(u.len(), 20_000);
        for n in -10_000..10_000 {
            assert_eq!(image.at(n), u.at(n), "{rules} at {n}");
        }
    }
    let cubic = Morphism::parse("A->C;B->ACCCC;C->CB").unwrap().power(2);
    let u = cubic.fixed_point_window(Seed::parse("B|C").unwrap(), 10_000).unwrap();
    let image = cubic.apply(&u).unwrap();
    assert!((-10_000..10_000).all(|n| image.at(n) == u.at(n)));
}
