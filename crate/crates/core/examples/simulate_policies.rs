//! Simulated cost of the optimal and heuristic policies on the 4-period example.
//!
//! cargo run --release --example simulate_policies [replications] [seed]

use sspolicy::heuristics::{bs_policy, mp_policy, HeuristicConfig};
use sspolicy::sdp::{solve_sdp_auto, SdpOptions};
use sspolicy::simulate::{estimate_gap, DEFAULT_REPLICATIONS};
use sspolicy::solver::ExactBackend;
use sspolicy::Instance;

fn main() -> sspolicy::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps = args.next().and_then(|a| a.parse().ok()).unwrap_or(DEFAULT_REPLICATIONS * 10);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let inst = Instance::worked_example();
    let sdp = solve_sdp_auto(&inst, 0.25, &SdpOptions { truncation: 1.0 - 1e-8 })?;
    let oracle = sdp.expected_cost();
    let backend = ExactBackend::default();
    let mp = mp_policy(&inst, &HeuristicConfig::default(), &backend)?;
    let bs = bs_policy(&inst, &HeuristicConfig::default(), &backend)?;

    println!("optimal expected cost {oracle:.3}  ({reps} replications, seed {seed})");
    for (name, policy) in [("sdp", sdp.policy()), ("mp", &mp.policy), ("bs", &bs.policy)] {
        let g = estimate_gap(&inst, policy, oracle, reps, seed)?;
        println!(
            "{name:3}  mean {:8.3}  se {:.3}  gap {:6.3}% +- {:.3}",
            g.simulation.mean, g.simulation.std_error, g.gap_pct, g.std_error_pct
        );
    }
    Ok(())
}
