//! Truncated arithmetic in Q2, Q2(√2) and F4((t)).
use dyadic_sl2::field::{parse_scalar, FieldSpec, Ring, TruncatedScalar};

fn main() -> dyadic_sl2::Result<()> {
    for f in [FieldSpec::q2(12), FieldSpec::q2_sqrt2(12), FieldSpec::laurent(2, 12)?] {
        let x = parse_scalar(&f, "d:1011")?;
        let y = TruncatedScalar::from_int(&f, -3);
        println!("{}: q = {}, e = {:?}", f.name(), f.q(), f.e().finite());
        println!("  x = {}", x.render());
        println!("  x·(-3) = {}", x.mul(&y).render());
        println!("  1/x = {}", x.inverse()?.render());
        let r = Ring::new(&f, 4);
        println!("  |R/P^4| = {}, units {}", r.size(), r.unit_count());
    }
    Ok(())
}
