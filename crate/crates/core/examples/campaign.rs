//! Seeded search for low-degree layers (`2hp < n/2`) that sign-represent parity.

use attnrat::parity::{admissible_shapes, falsification_campaign, CampaignConfig};

fn main() -> attnrat::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(9);
    println!("n={n}, admissible (h, p): {:?}", admissible_shapes(n));
    let cfg = CampaignConfig {
        n,
        trials: 500,
        seed: 42,
        max_d: 3,
    };
    let report = falsification_campaign(&cfg)?;
    for s in &report.shapes {
        println!("  h={} p={}: {} trials, {} hits", s.h, s.p, s.trials, s.sign_representations);
    }
    println!(
        "found {} sign-representations, {} rejected draws, satisfied = {}",
        report.sign_representations_found, report.rejected_layers, report.satisfied
    );
    println!("{}", report.note);
    Ok(())
}
