//! Incidence matrix, spectrum, balance verdict and BDL lengths for the
//! three classic morphisms.

use aperiodic::bdl::{classify_boundedness, doubling_horizons, DiscrepancyProfile};
use aperiodic::morphisms::Morphism;
use aperiodic::spectral::{adamczewski_verdict, char_poly, construct_bdl_lengths, perron_data};
use aperiodic::words::geometric_points_f64;

fn main() -> aperiodic::Result<()> {
    for rules in ["A->AAB;B->AB", "A->ABBA;B->AA", "A->C;B->ACCCC;C->CB"] {
        let phi = Morphism::parse(rules)?;
        let fp = phi.fixed_point_auto(None, 50_000)?;
        let m = fp.morphism.incidence_matrix();
        let (verdict, moduli) = adamczewski_verdict(&m)?;
        let perron = perron_data(&m)?;

        println!("{rules}");
        println!("  power {} seed {}", fp.power, fp.seed);
        println!("  char poly   {}", char_poly(&m));
        println!("  |z|<1, =1, >1: {} {} {}", moduli.n_lt, moduli.n_eq, moduli.n_gt);
        println!("  verdict     {verdict:?}");
        println!("  frequencies {:?}", perron.right);

        match construct_bdl_lengths(&m, None) {
            Ok(c) => {
                let pts = geometric_points_f64(&fp.window, &c.lengths)?;
                let hs = doubling_horizons(c.lattice_step, 4, 14);
                let profile = DiscrepancyProfile::compute(&pts, c.lattice_step, &hs)?;
                println!("  f = {:?}, lengths = {:?}", c.f, c.lengths);
                println!(
                    "  deviation from {:.6} Z: {:.4} ({:?})",
                    c.lattice_step,
                    profile.max_deviation(),
                    classify_boundedness(&profile)
                );
            }
            Err(e) => println!("  no BDL lengths: {e}"),
        }
    }
    Ok(())
}
