//! Optimal (s,S) policy of the 4-period example by dynamic programming.
//!
//! cargo run --release --example worked_example_sdp [g.csv]

use sspolicy::sdp::{check_k_convexity, scarf_g, solve_sdp_auto, SdpOptions};
use sspolicy::Instance;

fn main() -> sspolicy::Result<()> {
    let inst = Instance::worked_example();
    let sol = solve_sdp_auto(&inst, 1.0, &SdpOptions::default())?;
    println!("t   s_t   S_t   K+G_t(S_t)");
    for t in 1..=inst.horizon() {
        let (s, big_s) = sol.policy().period(t);
        let g = scarf_g(&sol, t, big_s)?;
        println!("{t}  {s:5}  {big_s:5}  {:.3}", inst.costs.fixed + g);
    }
    println!("C_1(0) = {:.4}", sol.expected_cost());
    for y in [0.0, 14.0, 15.0, 40.0, 70.0, 100.0] {
        println!("G_1({y}) = {:.3}", scarf_g(&sol, 1, y)?);
    }
    for t in 1..=inst.horizon() {
        match check_k_convexity(sol.g_table(t), sol.grid(), inst.costs.fixed, 1e-7) {
            None => println!("G_{t} is K-convex on the grid"),
            Some(v) => println!("G_{t} violates K-convexity at {v:?}"),
        }
    }
    if let Some(path) = std::env::args().nth(1) {
        sol.write_g_csv(&path)?;
        println!("wrote {path}");
    }
    Ok(())
}
