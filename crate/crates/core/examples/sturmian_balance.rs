//! Balance and letter frequencies of a Sturmian window, and of its image
//! under a morphism.

use aperiodic::morphisms::{Morphism, Seed};

fn main() -> aperiodic::Result<()> {
    let fib = Morphism::parse("A->AB;B->A")?;
    // phi^2 admits a two-sided fixed point
    let phi2 = fib.power(2);
    let u = phi2.fixed_point_window(Seed::parse("A|A")?, 5_000)?;

    let freqs = u.letter_frequencies();
    println!("window length {}", u.len());
    println!("frequencies   {:?}", freqs.iter().map(ToString::to_string).collect::<Vec<_>>());
    println!("balance       {}", u.balance_constant(500));

    let psi = Morphism::parse("A->AAB;B->AB")?;
    let v = psi.apply(&u)?;
    println!("image length  {}", v.len());
    println!("image balance {}", v.balance_constant(500));

    let p = u.parikh_prefix(1000)?;
    println!("Parikh vector of u[0,1000): {:?}", p.0);
    Ok(())
}
