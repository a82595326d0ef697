//! Scenarios as plain `key = value` text. Geometry is turned into channel
//! statistics with mean gain distance^-phi.

use underlay::analytics::{sum_throughput, FormulaTier};
use underlay::scenario::ScenarioFile;

const TEXT: &str = "
# two short links, primary receiver far away
d11 = 1.5
d22 = 1.5
r12 = 5
r21 = 5
r1P = 6
r2P = 4
phi = 3
L = 4
M = 2
ip_db = 15
rate_bpcu = 1.5
alpha = 0.4
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = ScenarioFile::parse(TEXT, "inline")?;
    println!("{:#?}", file.scenario.stats);
    let rate = file.rate.expect("file sets a rate");
    let tau = sum_throughput(&file.scenario, &rate, &file.power, FormulaTier::Exact)?;
    println!("tau at alpha = {}: {tau:.4} bpcu", file.power.alpha());

    // Malformed input is reported with its line.
    if let Err(e) = ScenarioFile::parse("d11 = 1\nbogus = 3\n", "inline") {
        println!("error: {e}");
    }
    Ok(())
}
