//! Programmatic batch run: a resumable field sweep written to CSV.

use dipolar_shield::cli::{run_field_sweep, RunConfig};

fn main() -> dipolar_shield::Result<()> {
    let dir = std::env::temp_dir().join("dipolar-shield-field-sweep");
    let mut cfg = RunConfig::load(
        None,
        &[
            "basis.preset=minimal".into(),
            "basis.l_max=6".into(),
            "sweep.fields_kv_cm=[21.0, 22.0, 23.0, 24.0, 25.0, 26.0, 27.0]".into(),
            "sweep.energies_uk=[10.0]".into(),
        ],
    )?;
    cfg.output.dir = dir.clone();
    let summary = run_field_sweep(&cfg, 0)?;
    println!(
        "{} points, {} failures",
        summary.points,
        summary.failures.len()
    );
    for f in &summary.failures {
        println!("  {f}");
    }
    let csv = std::fs::read_to_string(&summary.outputs[0])?;
    for line in csv.lines().filter(|l| l.contains(",k_loss,")) {
        println!("{line}");
    }
    println!("point cache in {}", dir.join("points").display());
    Ok(())
}
