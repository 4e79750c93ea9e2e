//! Piecewise-linear bounds on the normal loss functions.

use sspolicy::loss::{
    approximation_error, complementary_loss, loss, make_partition, PartitionStrategy, PiecewiseLoss,
};

fn main() -> sspolicy::Result<()> {
    println!("cells  equal-probability e_W  minimax e_W");
    for cells in [2, 4, 6, 10] {
        let eq = make_partition(cells, PartitionStrategy::EqualProbability)?;
        let mm = make_partition(cells, PartitionStrategy::Minimax)?;
        println!(
            "{cells:5}  {:22.6}  {:11.6}",
            approximation_error(&eq),
            approximation_error(&mm)
        );
    }

    // demand ~ N(40, 10^2): expected leftover stock E[x-d]+ is bracketed by
    // the Jensen bound and the same bound shifted by sd * e_W
    let partition = make_partition(10, PartitionStrategy::Minimax)?;
    let pw = PiecewiseLoss::new(&partition, 40.0, 10.0);
    println!("\nshift {:.5}", pw.error_bound());
    println!("   x    lower   E[x-d]+    upper   E[d-x]+");
    for x in [20.0, 35.0, 40.0, 45.0, 60.0] {
        println!(
            "{x:4}  {:7.4}  {:8.4}  {:7.4}  {:8.4}",
            pw.lower(x),
            complementary_loss(x, 40.0, 10.0),
            pw.upper(x),
            loss(x, 40.0, 10.0)
        );
    }
    Ok(())
}
