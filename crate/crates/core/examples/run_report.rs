//! Build a run configuration in code, execute it and write JSON and CSV
//! reports, as the `talagrand` binary does.

use talagrand_kit::run::{emit_csv, emit_json, run, Command, RunConfig};

fn main() -> talagrand_kit::Result<()> {
    let mut cfg = RunConfig::new(Command::PhiScan);
    cfg.params.l_grid = Some(vec![1.05, 1.1, 1.12, 1.3]);
    let report = run(&cfg)?;
    let dir = std::env::temp_dir();
    emit_json(&report, &dir.join("phi-scan.json"))?;
    emit_csv(&report, &dir.join("phi-scan.csv"))?;
    println!("{}", serde_json::to_string_pretty(&report.config).expect("serializable"));
    for item in &report.items {
        println!("{}: phi_max = {:.12}, pass {}", item.label, item.values["phi_max"], item.pass);
    }
    println!("reports written to {}", dir.display());

    let again = run(&report.config)?;
    assert_eq!(again.without_timing(), report.without_timing());
    Ok(())
}
