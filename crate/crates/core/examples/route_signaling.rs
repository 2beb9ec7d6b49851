//! A traffic authority sees whether a road is jammed and wants drivers off the
//! direct link. Drivers pick a shortest route under their posterior.

use persuasion::json::parse_instance;
use persuasion::persuasion::{shortest_path, solve_full, uninformative};

fn main() -> persuasion::Result<()> {
    let inst = parse_instance(include_str!("../data/path.json"))?;
    let route = |a: &persuasion::ActionSet| {
        a.elements()
            .iter()
            .map(|&i| inst.elements[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    };
    let plain = uninformative(&inst)?;
    println!("no information: cost {}", plain.sender_value);
    let best = solve_full(&inst)?;
    println!("optimal signaling: cost {}", best.sender_value);
    for (action, probs) in best.scheme.entries() {
        let p: Vec<String> = probs.iter().map(ToString::to_string).collect();
        println!("  recommend {}: [{}]", route(action), p.join(", "));
    }
    if let persuasion::ConstraintSpec::Path {
        vertices,
        arcs,
        source,
        sink,
    } = &inst.constraint
    {
        let jam = &inst.receiver.linear().unwrap()[1];
        let path = shortest_path(vertices.len(), arcs, *source, *sink, jam)?;
        println!("shortest route when jammed: {}", route(&path));
    }
    Ok(())
}
