//! The exact simplex solver on its own: a small production problem with an
//! equality row and a bounded variable.

use persuasion::field::{int, ratio};
use persuasion::lp::{solve, LpModel, Objective, Relation};
use persuasion::Rational;

fn main() -> persuasion::Result<()> {
    let mut lp: LpModel<Rational> = LpModel::new(Objective::Maximize);
    let x = lp.add_var("x", int(3));
    let y = lp.add_var("y", int(2));
    let z = lp.add_bounded_var("z", int(1), None, Some(ratio(1, 2)));
    lp.add_row(vec![(x, int(1)), (y, int(1)), (z, int(1))], Relation::Le, int(4));
    lp.add_row(vec![(x, int(1)), (y, int(3))], Relation::Le, int(6));
    lp.add_row(vec![(x, int(1)), (y, int(-1))], Relation::Eq, int(1));
    let sol = solve(&lp)?.optimal()?;
    println!(
        "value {} at x = {}, y = {}, z = {}",
        sol.value, sol.x[x], sol.x[y], sol.x[z]
    );
    let duals: Vec<String> = sol.duals.iter().map(ToString::to_string).collect();
    println!("row duals [{}], {} pivots", duals.join(", "), sol.pivots);
    Ok(())
}
