//! Persuasion against a receiver who only compares following the signal with
//! acting on the prior. Compares the exact cutting-plane solver, the
//! ellipsoid search with exact and half-approximate oracles, and brute force.

use persuasion::cce::{
    prior_best_value, solve_cce_approx, solve_cce_brute_force, solve_cce_exact, ApproxOracle, CceView,
};
use persuasion::field::ratio;
use persuasion::json::parse_instance;
use persuasion::persuasion::{enumerate_actions, solve_full};

fn main() -> persuasion::Result<()> {
    let inst = parse_instance(include_str!("../data/three_states.json"))?;
    let (c, fallback) = prior_best_value(&inst)?;
    println!("receiver value at the prior {c}, attained by {:?}", fallback.elements());
    println!("persuasive optimum {}", solve_full(&inst)?.sender_value);

    let actions = enumerate_actions(&inst.constraint, inst.n())?;
    println!(
        "brute force        {}",
        solve_cce_brute_force(&inst, &actions)?.sender_value
    );

    let eps = ratio(1, 10);
    let view = CceView::new(&inst, ApproxOracle::exact(&inst)?, eps.clone())?;
    let exact = solve_cce_exact(&view)?;
    println!(
        "cutting plane      {} ({} LP solves)",
        exact.sender_value, exact.stats.solves
    );
    let approx = solve_cce_approx(&view)?;
    println!("ellipsoid, alpha 1 {}", approx.sender_value);
    for (k, v) in &approx.stats.notes {
        println!("  {k}: {v}");
    }

    let greedy = CceView::new(&inst, ApproxOracle::half_greedy(&inst)?, eps)?;
    println!("ellipsoid, alpha 1/2 {}", solve_cce_approx(&greedy)?.sender_value);
    Ok(())
}
