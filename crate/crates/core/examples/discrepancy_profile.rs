//! Running discrepancy of cut-and-project sets against their average
//! lattice: bounded for window length 1, logarithmic growth for 1/2.

use aperiodic::bdl::{classify_boundedness, doubling_horizons, DiscrepancyProfile};
use aperiodic::cutproject::{self, CapSpec};
use aperiodic::quadfield::QuadField;

fn main() -> aperiodic::Result<()> {
    let f = QuadField::new(5)?;
    let eps = f.parse("3/2 - 1/2*sqrt(5)")?;
    let eta = f.parse("3/2 + 1/2*sqrt(5)")?;

    for d in [f.one(), f.rational(1, 2)] {
        let spec = CapSpec::new(eps.clone(), eta.clone(), f.zero(), d.clone())?;
        let xi = spec.density_step().to_f64();
        let set = cutproject::generate_count(&spec, 1 << 17)?;
        let profile = DiscrepancyProfile::compute(&set, xi, &doubling_horizons(xi, 4, 16))?;
        println!("|Omega| = {d}, xi = {xi:.6}");
        for (h, dev) in profile.horizons.iter().zip(profile.combined()) {
            println!("  N = {h:>12.2}  deviation {dev:.4}");
        }
        println!("  -> {:?}", classify_boundedness(&profile));
    }
    Ok(())
}
