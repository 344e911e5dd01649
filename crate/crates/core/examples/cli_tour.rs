// Drives the harness the way the `tlbounds` binary does and writes
// report.json and trials.csv for each command into a scratch directory.
//
// cargo run --release --example cli_tour

use tlbounds::bounds::TheoremId;
use tlbounds::harness::output::load_config;
use tlbounds::harness::{run_command, Command, Overrides};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let out = std::env::temp_dir().join(format!("tlbounds-tour-{}", std::process::id()));
    let runs = [
        (Command::Divergence, "hostile_shift.json", None),
        (Command::Erm, "three_source_asymmetric.json", None),
        (Command::Bound, "benign_shift.json", Some(TheoremId::Thm2)),
        (Command::Verify, "benign_shift.json", Some(TheoremId::Thm1)),
        (Command::Compare, "three_source_asymmetric.json", None),
        (Command::Htl, "htl_stability.json", None),
    ];
    for (command, file, theorem) in runs {
        let config = load_config(std::path::Path::new(&format!("{fixtures}/{file}")))?;
        let overrides = Overrides { theorem, trials: Some(30), ..Overrides::default() };
        let result = run_command(command, config, &overrides, None)?;
        let written = result.write(&out.join(command.as_str()), None)?;
        println!("{:<10} {} csv rows -> {}", command.as_str(), result.csv_rows.len(), written[0].parent().unwrap().display());
    }
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
