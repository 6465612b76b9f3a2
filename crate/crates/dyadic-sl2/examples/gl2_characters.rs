//! Character table of GL(2, F_4) and its orthogonality.
use dyadic_sl2::finchar::{count_cuspidals, Gl2Table};

fn main() -> dyadic_sl2::Result<()> {
    let t = Gl2Table::new(2)?;
    let classes = t.classes();
    println!("{} classes, {} characters", classes.len(), t.rows().len());
    for row in t.rows().into_iter().take(6) {
        let vals: Vec<String> = classes.iter().map(|(c, _)| t.value(row, *c).map(|v| v.render())).collect::<Result<_, _>>()?;
        println!("{row:?}: {}", vals.join(", "));
    }
    println!("orthogonality defects: {}", t.orthogonality_defects()?);
    let c = count_cuspidals(4)?;
    println!("cuspidals of GL(2,F_4): {} of degree {}", c.count, c.degree);
    Ok(())
}
