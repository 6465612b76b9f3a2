//! Double cosets of the Iwahori-type subgroup, checked by orbit enumeration.
use dyadic_sl2::field::FieldSpec;
use dyadic_sl2::matgroups::{double_cosets_bell, double_cosets_bell_brute, normalizer_check_int};

fn main() -> dyadic_sl2::Result<()> {
    let f = FieldSpec::q2(12);
    for ell in 1..=4 {
        let labels: Vec<String> = double_cosets_bell(&f, ell)?.iter().map(|r| r.label.to_string()).collect();
        let brute = double_cosets_bell_brute(&f, ell, 5_000_000)?;
        println!("ℓ={ell}: {} (orbits {}) {}", labels.join(" "), brute.orbit_count, brute.passed());
    }
    let n = normalizer_check_int(&f, 1, 4, 5_000_000)?;
    println!("normalizer ℓ=4: {} / {} ({})", n.gl_closed_form, n.sl_closed_form, n.passed());
    Ok(())
}
