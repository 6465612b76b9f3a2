//! Nilpotent orbits, degenerate cosets and the sets T_{u,ℓ}.
use dyadic_sl2::field::{FieldSpec, TruncatedScalar};
use dyadic_sl2::nilpotent::{orbits_meeting, t_set, wavefront};

fn main() -> dyadic_sl2::Result<()> {
    let f = FieldSpec::q2(16);
    let one = TruncatedScalar::one(&f);
    for gap in 1..=3 {
        let m = orbits_meeting(&f, &one, 0, gap, None)?;
        let names: Vec<String> = m.orbits.iter().map(|o| o.to_string()).collect();
        println!("gap {gap}: {} orbits {}", m.count, names.join(" "));
    }
    let wf: Vec<String> = wavefront(&f, 1, None)?.iter().map(|o| o.to_string()).collect();
    println!("odd-parity orbits: {}", wf.join(" "));
    for e in t_set(&f, &one, 3, 9)? {
        println!("T(1,3) ∋ ({}, {})", e.unit, e.depth);
    }
    let g = FieldSpec::laurent(1, 16)?;
    println!("F2((t)) gap 2: {}", orbits_meeting(&g, &TruncatedScalar::one(&g), 0, 2, None)?.count);
    Ok(())
}
