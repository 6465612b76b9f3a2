//! Intertwining dimensions per double coset and dim End σ(ℓ).
use dyadic_sl2::field::FieldSpec;
use dyadic_sl2::intertwining::{intertwine_table, sigma_end_dim_report};

fn main() -> dyadic_sl2::Result<()> {
    let f = FieldSpec::q2(12);
    for ell in 1..=5 {
        let rows = intertwine_table(&f, ell, true, 5_000_000)?;
        let cells: Vec<String> = rows.iter().map(|r| format!("{}:{}", r.coset, r.formula)).collect();
        let end = sigma_end_dim_report(&f, ell, false, 5_000_000)?;
        println!("ℓ={ell} Σ={} [{}]", end.closed_form, cells.join(" "));
    }
    Ok(())
}
