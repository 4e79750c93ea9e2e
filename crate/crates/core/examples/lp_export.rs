//! Writes the joint model in CPLEX LP format, then reads back the in-repo
//! optimum as a solution file to show the import path used for external solvers.

use std::io::Write;

use sspolicy::loss::{make_partition, PartitionStrategy};
use sspolicy::model::{build_joint, ModelOptions, SegmentTable};
use sspolicy::solver::{import_solution, solve_exact, SolveOptions};
use sspolicy::Instance;

fn main() -> sspolicy::Result<()> {
    let inst = Instance::worked_example();
    let segs = SegmentTable::new(&inst, &make_partition(10, PartitionStrategy::Minimax)?);
    let model = build_joint(&inst, &segs, &ModelOptions::default())?;

    let dir = std::env::temp_dir().join("sspolicy-lp");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let lp = dir.join("joint.lp");
    model.export_lp(&lp)?;
    let text = std::fs::read_to_string(&lp).expect("just written");
    println!("{} ({} lines)", lp.display(), text.lines().count());
    for line in text.lines().take(12) {
        println!("  {line}");
    }

    let solved = solve_exact(&model, &SolveOptions::default())?;
    let sol = dir.join("joint.sol");
    let mut f = std::fs::File::create(&sol).expect("solution file");
    for (v, x) in model.variables.iter().zip(&solved.values) {
        writeln!(f, "{} {x}", v.name).expect("write");
    }
    drop(f);
    let back = import_solution(&model, &sol)?;
    println!(
        "objective {:.6} (imported {:.6}), status {:?}",
        solved.objective, back.objective, back.status
    );
    Ok(())
}
