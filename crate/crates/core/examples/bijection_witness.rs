//! The pairing x_n -> xi n for the (-tau) spectrum with digits {0, 1}.

use aperiodic::bdl::bijection_witness;
use aperiodic::quadfield::PisotUnit;
use aperiodic::spectra::{self, Sign, SpectrumSpec};

fn main() -> aperiodic::Result<()> {
    let spec = SpectrumSpec::new(PisotUnit::golden(), Sign::Minus, 0, 1)?;
    let xi = spectra::average_lattice_xi(&spec)?;
    let set = spectra::generate_cap_count(&spec, 10_000)?;

    let w = bijection_witness(&set, xi.to_f64(), 8)?;
    println!("xi = {xi}");
    for p in &w.pairs {
        println!("  x_{:<3} = {:>9.5}  ->  {:>9.5}   |d| = {:.5}", p.n, p.x, p.lattice, p.displacement);
    }
    let far = bijection_witness(&set, xi.to_f64(), 10_000)?;
    println!("max displacement over {} pairs: {:.6}", far.pairs.len(), far.max_displacement);
    Ok(())
}
