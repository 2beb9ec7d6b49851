//! Solves an instance, then replays the scheme by simulation and compares the
//! empirical sender value with the exact one.

use persuasion::cli::monte_carlo;
use persuasion::json::parse_instance;
use persuasion::persuasion::{solve_full, DEFAULT_MAX_ACTIONS};

fn main() -> persuasion::Result<()> {
    let inst = parse_instance(include_str!("../data/k4.json"))?;
    let res = solve_full(&inst)?;
    println!("exact value {}", res.sender_value);
    for seed in 0..5 {
        let est = monte_carlo(&inst, &res.scheme, 10_000, seed, DEFAULT_MAX_ACTIONS)?;
        let (lo, hi) = est.interval();
        println!(
            "seed {seed}: mean {:.4} ci95 [{lo:.4}, {hi:.4}] deviations {}",
            est.mean, est.deviations
        );
    }
    Ok(())
}
