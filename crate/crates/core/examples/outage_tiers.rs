//! Exact outage against the two high-ITL approximations as the ITL grows.

use underlay::analytics::{outage, FormulaTier, OutageParams};
use underlay::scenario::{Network, PowerPolicy, RatePolicy, Scenario, ScenarioFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = ScenarioFile::bundled("fig2")?.scenario;
    let rate = RatePolicy::new(1.0)?;
    let power = PowerPolicy::concurrent(0.5)?;

    println!("{:>7}{:>12}{:>12}{:>12}", "ip_db", "exact", "highitl", "rational");
    for ip_db in [0.0, 10.0, 20.0, 30.0, 40.0] {
        let scenario = Scenario { ip_db, ..base };
        let p = OutageParams::for_network(&scenario, &rate, &power, Network::One)?;
        print!("{ip_db:>7}");
        for tier in [FormulaTier::Exact, FormulaTier::HighItl, FormulaTier::Rational] {
            print!("{:>12.6}", outage(&p, tier)?);
        }
        println!();
    }
    Ok(())
}
