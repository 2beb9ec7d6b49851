//! Builds the three gadget families from a random satisfiable 0/1 linear
//! system and evaluates the planted scheme on each.

use persuasion::field::int;
use persuasion::persuasion::check_persuasive;
use persuasion::reductions::{
    completeness_scheme, gen_partition_from_public, LineqMaSpec, PublicPersuasionSpec, Target,
};
use persuasion::Rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> persuasion::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let spec = LineqMaSpec::random_satisfiable(2, 10, &mut rng);
    let n_var = Rational::from_integer((spec.n_var() as i64).into());
    println!(
        "{} equations over {} variables, tau = {}",
        spec.n_eq(),
        spec.n_var(),
        spec.tau()
    );
    println!(
        "target bounds: value >= {}, path cost <= {}",
        (&n_var - int(1)) / &n_var,
        int(1) / &n_var * (int(1) + int(1) / &n_var)
    );
    for target in [Target::Uniform, Target::Graphic, Target::Path] {
        let (inst, scheme) = completeness_scheme(&spec, target)?;
        println!(
            "{target:?}: {} elements, {} states, planted value {}, persuasive {}",
            inst.n(),
            inst.num_states(),
            inst.sender_value(&scheme)?,
            check_persuasive(&inst, &scheme)?.is_persuasive()
        );
    }

    let public = PublicPersuasionSpec::random(2, 3, 10, &mut rng);
    let inst = gen_partition_from_public(&public)?;
    println!(
        "public persuasion with {} receivers -> partition matroid on {} elements",
        public.n_rec(),
        inst.n()
    );
    Ok(())
}
