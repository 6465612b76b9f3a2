//! The q = 2 Hecke operators: commutators, shapes and the permutation group.
use dyadic_sl2::field::FieldSpec;
use dyadic_sl2::hecke::commutativity_certificate;

fn main() -> dyadic_sl2::Result<()> {
    let f = FieldSpec::q2(12);
    for ell in 3..=5 {
        let r = commutativity_certificate(&f, ell, 3, 5_000_000)?;
        println!(
            "ℓ={ell}: dim {} on {} cosets, commutators max {}, group order {} cyclic {}",
            r.dimension, r.basis_size, r.max_off_diagonal_commutator, r.permutation_group_order, r.permutation_group_cyclic
        );
        for op in &r.operators {
            println!("  {} monomial {} order {:?}", op.coset, op.monomial, op.order);
        }
    }
    Ok(())
}
