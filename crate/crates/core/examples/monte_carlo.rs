//! Monte Carlo outage and throughput next to the exact values.
//! Same seed, same numbers, regardless of thread count.

use underlay::analytics::{network_outage, sum_throughput, FormulaTier};
use underlay::scenario::{Network, PowerPolicy, RatePolicy, ScenarioFile};
use underlay::simulator::simulate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = ScenarioFile::bundled("fig2")?;
    let s = &file.scenario;
    let rate = RatePolicy::new(2.0)?;
    let power = PowerPolicy::concurrent(0.3)?;

    let sim = simulate(s, &rate, &power, 1_000_000, 42)?;
    for network in [Network::One, Network::Two] {
        let mc = sim.outage(network)?;
        let exact = network_outage(s, &rate, &power, network, FormulaTier::Exact)?;
        println!(
            "S{} outage: MC {:.5} +/- {:.5}, exact {exact:.5}",
            network.index(),
            mc.mean,
            mc.std_error
        );
    }
    let tau = sim.sum_throughput();
    println!(
        "sum throughput: MC {:.4} +/- {:.4}, exact {:.4} bpcu",
        tau.mean,
        tau.std_error,
        sum_throughput(s, &rate, &power, FormulaTier::Exact)?
    );
    Ok(())
}
