//! Cost of the reorder-point model as a function of the opening inventory,
//! next to the exact G_1 from dynamic programming.
//!
//! cargo run --release --example minlp_s_curve > curve.csv

use sspolicy::loss::{make_partition, PartitionStrategy};
use sspolicy::model::{build_minlp_s, ModelOptions, SegmentTable};
use sspolicy::sdp::{scarf_g, solve_sdp_auto, SdpOptions};
use sspolicy::solver::{solve_exact, SolveOptions};
use sspolicy::Instance;

fn main() -> sspolicy::Result<()> {
    let inst = Instance::worked_example();
    let partition = make_partition(10, PartitionStrategy::Minimax)?;
    let segs = SegmentTable::new(&inst, &partition);
    let sdp = solve_sdp_auto(&inst, 1.0, &SdpOptions::default())?;
    let opts = SolveOptions::default();
    println!("y,G_exact,G_model");
    for y in (-20..=120).step_by(5) {
        let y = y as f64;
        let model = build_minlp_s(&inst, &segs, Some(y), &ModelOptions::default())?;
        let approx = solve_exact(&model, &opts)?.objective;
        println!("{y},{:.4},{:.4}", scarf_g(&sdp, 1, y)?, approx);
    }
    let free = build_minlp_s(&inst, &segs, None, &ModelOptions::default())?;
    let best = solve_exact(&free, &opts)?;
    eprintln!(
        "model minimum {:.4} at y = {:.5}",
        best.objective,
        best.value(&free, "I_s_0").unwrap_or(f64::NAN)
    );
    Ok(())
}
