//! Spectra X^D(alpha) of quadratic Pisot units: two generation paths, the
//! divisibility verdict and the average lattice.

use aperiodic::quadfield::{PisotUnit, UnitFamily};
use aperiodic::spectra::{self, Sign, SpectrumSpec};

fn main() -> aperiodic::Result<()> {
    let golden = SpectrumSpec::new(PisotUnit::golden(), Sign::Minus, 0, 1)?;
    let field = golden.unit().field();

    let direct = spectra::generate_direct_within(&golden, 12, 20)?;
    let cap = spectra::generate_cap(&golden, &field.int(-20), &field.int(20))?;
    println!("{golden}");
    println!("  direct: {} points, cut-and-project: {} points", direct.len(), cap.len());
    assert_eq!(direct, spectra::to_ring(&cap));

    let d = spectra::bdl_decide(&golden);
    let xi = spectra::average_lattice_xi(&golden)?;
    println!("  {}: BDL {}, xi = {xi} = {}", d.reason, d.bdl, xi.to_decimal(20));

    let near = spectra::generate_cap(&golden, &field.int(-3), &field.int(3))?;
    let coding = aperiodic::cutproject::gap_code(&near)?;
    println!("  gaps {:?}, word {}", coding.gaps.iter().map(ToString::to_string).collect::<Vec<_>>(), coding.word);

    println!();
    for (family, p) in [(UnitFamily::MinusOne, 2), (UnitFamily::PlusOne, 3), (UnitFamily::PlusOne, 5)] {
        let unit = PisotUnit::new(family, p)?;
        for size in 3..=6 {
            let Ok(spec) = SpectrumSpec::new(unit.clone(), Sign::Plus, -1, size - 2) else {
                continue;
            };
            let d = spectra::bdl_decide(&spec);
            let k = spectra::kesten_for(&spec)?;
            println!("  beta = {:<22} #D = {size}: {:<5} kesten {:<5} {}", unit.beta().to_string(), d.bdl, k.is_bdl(), d.reason);
        }
    }
    Ok(())
}
