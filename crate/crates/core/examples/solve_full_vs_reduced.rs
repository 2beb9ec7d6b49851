//! Solves the same instance over every feasible action and over the
//! best-response catalog, then checks both schemes exactly.

use persuasion::json::parse_instance;
use persuasion::persuasion::{check_persuasive, solve_full, solve_reduced, uninformative};

fn main() -> persuasion::Result<()> {
    for (name, text) in [
        ("toy2", include_str!("../data/toy2.json")),
        ("three_states", include_str!("../data/three_states.json")),
        ("k4", include_str!("../data/k4.json")),
    ] {
        let inst = parse_instance(text)?;
        let plain = uninformative(&inst)?;
        println!("{name}: no information {}", plain.sender_value);
        for res in [solve_full(&inst)?, solve_reduced(&inst)?] {
            println!(
                "  {:8} value {:>6} over {:>3} actions, {} pivots, persuasive: {}",
                res.method.name(),
                res.sender_value.to_string(),
                res.catalog_size,
                res.stats.pivots,
                check_persuasive(&inst, &res.scheme)?.is_persuasive()
            );
            for (action, probs) in res.scheme.entries() {
                let p: Vec<String> = probs.iter().map(ToString::to_string).collect();
                println!("    recommend {:?}: [{}]", action.elements(), p.join(", "));
            }
        }
    }
    Ok(())
}
