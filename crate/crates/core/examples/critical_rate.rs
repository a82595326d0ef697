//! When does running both networks stop paying off?

use underlay::analytics::{critical_rate_closed_form, FormulaTier};
use underlay::optimizer::{critical_rate_numeric, Crossover};
use underlay::scenario::ScenarioFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["fig2", "fig3a", "fig3b"] {
        let s = ScenarioFile::bundled(name)?.scenario;
        print!("{name:<6} closed {:.4}", critical_rate_closed_form(&s.stats));
        for tier in [FormulaTier::Rational, FormulaTier::Exact] {
            let rc = critical_rate_numeric(&s, tier)?;
            match rc.crossover {
                Crossover::Found => print!("  {tier} {:.4}", rc.rate_bpcu),
                other => print!("  {tier} {other:?}"),
            }
        }
        println!();
    }
    Ok(())
}
