//! Prints the increment table for a synthetic collection.

use trelkit::reliability::{increment_analysis, ReliabilityConfig};
use trelkit::synthetic::{generate, SyntheticSpec};

fn main() {
    let c = generate(&SyntheticSpec::default());
    let config = ReliabilityConfig::default();
    let table = increment_analysis::<f64>(&c.systems, &c.qrels, &c.pooling_inputs(), &config).expect("valid synthetic inputs");
    print!("pool size");
    for m in &config.measures {
        print!("\t{m} mean\t{m} max");
    }
    println!();
    for row in &table.rows {
        print!("{} → {}", row.from_size, row.to_size);
        for cell in &row.cells {
            match (cell.mean_pct, cell.max_pct) {
                (Some(mean), Some(max)) => print!("\t{mean:.2}%\t{max:.2}%"),
                _ => print!("\tNA\tNA"),
            }
        }
        println!();
    }
}
