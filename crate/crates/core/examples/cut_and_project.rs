//! Cut-and-project sets with eps = tau'^2, eta = tau^2: Kesten's criterion,
//! gap coding and a unimodular change of parameters.

use aperiodic::cutproject::{self, CapSpec};
use aperiodic::quadfield::QuadField;

fn main() -> aperiodic::Result<()> {
    let f = QuadField::new(5)?;
    let eps = f.parse("3/2 - 1/2*sqrt(5)")?;
    let eta = f.parse("3/2 + 1/2*sqrt(5)")?;

    for d in ["1", "1/2", "-1/2 + 1/2*sqrt(5)"] {
        let spec = CapSpec::new(eps.clone(), eta.clone(), f.zero(), f.parse(d)?)?;
        let k = cutproject::kesten_decide(&spec);
        let step = k.lattice_step().map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        println!("window [0, {d}): |Omega| = {} + {} eps, BDL {}, step {step}", k.p, k.q, k.is_bdl());
    }

    let spec = CapSpec::new(eps.clone(), eta.clone(), f.zero(), f.one())?;
    let set = cutproject::generate(&spec, &f.int(-10), &f.int(10))?;
    for p in set.points().iter().take(5) {
        println!("  {} + {} eta = {:.6}   (star {:.6})", p.a, p.b, p.value, p.star);
    }
    let coding = cutproject::gap_code(&set)?;
    let gaps: Vec<String> = coding.gaps.iter().map(ToString::to_string).collect();
    println!("gaps {gaps:?}");
    println!("word {}", coding.word);

    let (moved, scale) = cutproject::unimodular_transform(&spec, [0, -1, 1, 2])?;
    let (c, d) = moved.window();
    println!(
        "after (0 -1; 1 2): eps = {}, eta = {}, window [{c}, {d}), scale {scale}",
        moved.epsilon(),
        moved.eta()
    );
    Ok(())
}
