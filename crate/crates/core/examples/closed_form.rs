//! Closed-form apportioning and critical rate for the bundled scenarios.
//!
//! ```bash
//! cargo run -p underlay --example closed_form
//! ```

use underlay::analytics::{alpha_star_closed_form, critical_rate_closed_form};
use underlay::scenario::ScenarioFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<8}{:>10}{:>12}", "", "alpha*", "R_c (bpcu)");
    for name in ["fig2", "fig3a", "fig3b", "fig4"] {
        let stats = ScenarioFile::bundled(name)?.scenario.stats;
        println!(
            "{name:<8}{:>10.4}{:>12.4}",
            alpha_star_closed_form(&stats),
            critical_rate_closed_form(&stats)
        );
    }
    Ok(())
}
