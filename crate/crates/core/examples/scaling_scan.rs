//! Total variance of every strategy against N, written as CSV to stdout.

use fieldmetro::scan::{self, loglog_slope, ReportFormat, ScanConfig};

fn main() -> fieldmetro::Result<()> {
    let cfg = ScanConfig::default();
    let records = scan::run_scan(&cfg)?;
    print!("{}", scan::render_report(&records, ReportFormat::Csv)?);

    let ns: Vec<f64> = records.iter().map(|r| r.n as f64).collect();
    let sim: Vec<f64> = records.iter().map(|r| r.var_ent_sim.unwrap()).collect();
    let pauli: Vec<f64> = records.iter().map(|r| r.var_fim_povm2.unwrap()).collect();
    println!("slope of the simultaneous bound: {:.3}", loglog_slope(&ns, &sim));
    println!("slope with Pauli strings: {:.3}", loglog_slope(&ns, &pauli));
    Ok(())
}
