//! Exact arithmetic in Q(sqrt 5): the golden ratio and its powers.

use aperiodic::quadfield::{PisotUnit, QuadElem, QuadField};

fn main() -> aperiodic::Result<()> {
    let field = QuadField::new(5)?;
    let tau = field.parse("1/2 + 1/2*sqrt(5)")?;
    let tau_conj = tau.conjugate();

    println!("tau        = {tau}");
    println!("tau'       = {tau_conj}");
    println!("norm, trace = {}, {}", tau.norm(), tau.trace());

    // tau^n = F_n tau + F_{n-1}
    for n in [2, 5, 10, 20] {
        let p = tau.pow(n)?;
        println!("tau^{n:<2} = {:<28} floor = {}", p.to_string(), p.floor());
    }

    let inv = tau.inverse()?;
    assert_eq!(&inv, &(&tau - &field.one()));
    println!("1/tau      = {inv} = {}", inv.to_decimal(40));

    // -tau'^40, about -4.4e-9
    let tiny = &tau.pow(40)? - &field.int(228_826_127);
    println!("tau^40 - 228826127 = {tiny} ~ {}, sign {:?}", tiny.to_decimal(12), tiny.signum());

    let unit = PisotUnit::new(aperiodic::quadfield::UnitFamily::PlusOne, 3)?;
    println!("beta = {} (x^2 - 3x + 1), beta' = {}", unit.beta(), unit.beta_conj());

    let x = QuadElem::parse("-7/3 + 2*sqrt(5)", None)?;
    println!("{x} ~ {}, floor {}, ceil {}", x.to_decimal(20), x.floor(), x.ceil());
    Ok(())
}
