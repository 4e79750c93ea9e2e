//! (s,S) parameters from the joint model solved once per suffix of the horizon.

use sspolicy::heuristics::{mp_policy, HeuristicConfig};
use sspolicy::solver::ExactBackend;
use sspolicy::Instance;

fn main() -> sspolicy::Result<()> {
    let inst = Instance::worked_example();
    let result = mp_policy(&inst, &HeuristicConfig::default(), &ExactBackend::default())?;
    println!("t       s_t        S_t   G_t(s_t)");
    for t in 1..=inst.horizon() {
        let (s, big_s) = result.policy.period(t);
        println!(
            "{t}  {s:9.5}  {big_s:9.5}  {:9.3}{}",
            result.linked_costs[t - 1],
            if result.multiple_roots[t - 1] { "  (more roots below)" } else { "" }
        );
    }
    Ok(())
}
