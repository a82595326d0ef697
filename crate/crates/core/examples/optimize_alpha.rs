//! Numerical apportioning search for several user counts, where no closed
//! form exists beyond one user per network.

use underlay::analytics::{alpha_star_closed_form, FormulaTier};
use underlay::optimizer::alpha_star_numeric;
use underlay::scenario::{RatePolicy, ScenarioFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = ScenarioFile::bundled("fig3a")?.scenario;
    let rate = RatePolicy::new(1.0)?;
    println!("closed form (L = M = 1): {:.4}", alpha_star_closed_form(&base.stats));

    for (l, m) in [(1, 1), (2, 2), (5, 1), (1, 5), (8, 8)] {
        let s = base.with_users(l, m)?;
        let opt = alpha_star_numeric(&s, &rate, FormulaTier::Exact)?;
        println!("L={l} M={m}: alpha* {:.4}, tau {:.4} bpcu", opt.alpha, opt.tau);
    }
    Ok(())
}
