//! Sum throughput against rate for growing user pools, written as CSV.
//!
//! ```bash
//! cargo run -p underlay --release --example multiuser_sweep > sweep.csv
//! ```

use underlay::analytics::FormulaTier;
use underlay::cli::{parse_rate_range, sweep_rate};
use underlay::scenario::ScenarioFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = ScenarioFile::bundled("fig4")?;
    let rates = parse_rate_range("0.5:8", 16)?;
    let table = sweep_rate(&file, &rates, &[1, 3, 10], FormulaTier::Exact, 20_000, 1)?;
    table.write_csv(std::io::stdout().lock())?;
    Ok(())
}
