//! Reorder points by bisection on the fixed-inventory reorder-point model.

use sspolicy::heuristics::{bs_policy, HeuristicConfig};
use sspolicy::solver::ExactBackend;
use sspolicy::Instance;

fn main() -> sspolicy::Result<()> {
    let inst = Instance::worked_example();
    let config = HeuristicConfig {
        bs_step: Some(0.01),
        bs_lower_bound: Some(-200.0),
        ..Default::default()
    };
    let result = bs_policy(&inst, &config, &ExactBackend::default())?;
    println!("t     s_t        S_t   G_t(s_t)  solves");
    for t in 1..=inst.horizon() {
        let (s, big_s) = result.policy.period(t);
        println!(
            "{t}  {s:6.2}  {big_s:9.5}  {:9.3}  {:6}{}",
            result.linked_costs[t - 1],
            result.evaluations[t - 1],
            if result.approximate[t - 1] { "  bracket emptied" } else { "" }
        );
    }
    Ok(())
}
