//! Square-class representatives and the image of ρ.
use dyadic_sl2::field::{FieldSpec, TruncatedScalar};
use dyadic_sl2::squares::{canonicalize, rho_image, square_class_reps, Level};

fn main() -> dyadic_sl2::Result<()> {
    let f = FieldSpec::q2(16);
    let full = square_class_reps(&f, Level::Full)?;
    println!("Q2 unit square classes: {:?}", full.digit_strings());
    for v in [1, 5, -1, -5, 17, 21] {
        let c = canonicalize(&f, &TruncatedScalar::from_int(&f, v), Level::Full)?;
        println!("  {v:>3} ~ {}", c.digits_string());
    }
    let g = FieldSpec::laurent(2, 16)?;
    for k in 1..=6 {
        println!("F4((t)) |S_{k}| = {}", square_class_reps(&g, Level::Finite(k))?.len());
    }
    for delta in 1..=4 {
        let (case, img) = rho_image(&FieldSpec::q2_sqrt2(16), delta)?;
        println!("Q2(√2) ρ at δ={delta}: {case:?} {img:?}");
    }
    Ok(())
}
