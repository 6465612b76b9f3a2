//! Runs the full verification ledger for F2((t)) and prints it as markdown.
use dyadic_sl2::field::FieldConfig;
use dyadic_sl2::verify::{run_verify, RunConfig};

fn main() -> dyadic_sl2::Result<()> {
    let config = RunConfig::new(FieldConfig::laurent(1, 20));
    let ledger = run_verify(&config)?;
    print!("{}", ledger.report().to_md());
    println!("exit code {}", ledger.exit_code());
    Ok(())
}
