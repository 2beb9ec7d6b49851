//! Three states, three elements, pick two. The three pairwise comparison
//! hyperplanes meet at the uniform belief and cut the simplex into six cells.

use persuasion::arrangement::enumerate_cells;
use persuasion::best_response::{enumerate_best_responses, receiver_hyperplanes};
use persuasion::json::parse_instance;
use persuasion::matroid::{greedy_basis, MatroidOracle};
use persuasion::Posterior;

fn main() -> persuasion::Result<()> {
    let inst = parse_instance(include_str!("../data/three_states.json"))?;
    let planes = receiver_hyperplanes(&inst)?;
    for h in &planes {
        let normal: Vec<String> = h.normal.iter().map(ToString::to_string).collect();
        println!("h{:?}: normal [{}]", h.label, normal.join(", "));
    }
    let oracle = MatroidOracle::new(&inst.constraint)?;
    for cell in enumerate_cells(inst.num_states(), &planes, true)? {
        let w = inst.expected_receiver_weights(&Posterior::new(cell.interior.clone())?)?;
        let point: Vec<String> = cell.interior.iter().map(ToString::to_string).collect();
        println!(
            "signs {:?} at ({}) -> {:?}",
            cell.signs,
            point.join(", "),
            greedy_basis(&oracle, &w).elements()
        );
    }
    let catalog = enumerate_best_responses(&inst)?;
    println!(
        "catalog: {:?}",
        catalog.actions.iter().map(|a| a.elements()).collect::<Vec<_>>()
    );
    Ok(())
}
