//! Branching tables, fixed vectors and the local expansion certificates.
use dyadic_sl2::branching::{branching_table, fixed_dim, gl2_lce, lce_expand, n_pi, render_table_md};
use dyadic_sl2::field::FieldSpec;

fn main() -> dyadic_sl2::Result<()> {
    let f = FieldSpec::q2(16);
    print!("{}", render_table_md(&branching_table(&f, 0, 6)?, &branching_table(&f, 1, 5)?));
    for n in 1..=4 {
        println!("fixed n={n}: {} {}", fixed_dim(&f, 0, n)?.formula, fixed_dim(&f, 1, n)?.formula);
    }
    println!("n_π = {}, {}", n_pi(&f, 0)?, n_pi(&f, 1)?);
    let c = lce_expand(&FieldSpec::q2_sqrt2(16), 0, None)?;
    println!("Q2(√2) expansion passes {} with collision at depth {:?}", c.passed(), c.collision_depth);
    println!("GL(2) coefficient {}", gl2_lce(&f, 10)?.coefficient);
    Ok(())
}
