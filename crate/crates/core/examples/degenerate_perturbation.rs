//! Spanning trees of K4 with tied receiver utilities. The audit finds the ties,
//! the catalog is built on a slightly perturbed copy, and the catalog optimum
//! still matches the full LP.

use persuasion::best_response::{check_nondegeneracy, enumerate_best_responses, DegeneracyReport, Nondegeneracy};
use persuasion::json::parse_instance;
use persuasion::persuasion::{solve_full, solve_with_catalog};

fn main() -> persuasion::Result<()> {
    let inst = parse_instance(include_str!("../data/k4.json"))?;
    if let Nondegeneracy::Violations(found, count) = check_nondegeneracy(&inst)? {
        println!("{count} violations, e.g. {:?}", found.first());
    }
    let catalog = enumerate_best_responses(&inst)?;
    if let DegeneracyReport::Perturbed { epsilon, .. } = &catalog.report {
        println!("perturbed with epsilon = {epsilon}");
    }
    println!("{} cells, {} actions", catalog.cells, catalog.actions.len());
    println!("catalog value {}", solve_with_catalog(&inst, &catalog)?.sender_value);
    println!("full value    {}", solve_full(&inst)?.sender_value);
    Ok(())
}
