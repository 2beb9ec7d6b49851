//! Greedy optimization over each supported matroid, checked against exhaustive
//! search.

use persuasion::field::int;
use persuasion::matroid::{self, greedy_max_weight, MatroidOracle};
use persuasion::model::OracleMatroid;
use persuasion::persuasion::enumerate_actions;
use persuasion::{ConstraintSpec, Rational};

fn main() -> persuasion::Result<()> {
    let weights: Vec<Rational> = [5, 1, 2, 3, 7, 4].iter().map(|&w| int(w)).collect();
    let constraints = vec![
        ("uniform k=3", ConstraintSpec::Uniform { k: 3 }),
        (
            "partition",
            ConstraintSpec::Partition {
                blocks: vec![vec![0, 1, 2], vec![3, 4, 5]],
                caps: vec![1, 2],
            },
        ),
        ("graphic K4", matroid::k4()),
        (
            "oracle",
            ConstraintSpec::Oracle(OracleMatroid::wrapping("two-of-six", ConstraintSpec::Uniform { k: 2 })?),
        ),
    ];
    for (name, c) in constraints {
        let oracle = MatroidOracle::new(&c)?;
        let best = greedy_max_weight(&oracle, &weights);
        let total = |a: &persuasion::ActionSet| a.elements().iter().map(|&i| weights[i].clone()).sum::<Rational>();
        let brute = enumerate_actions(&c, weights.len())?.iter().map(total).max().unwrap();
        println!(
            "{name:12} greedy {:?} weight {} (exhaustive {brute})",
            best.elements(),
            total(&best)
        );
    }
    Ok(())
}
