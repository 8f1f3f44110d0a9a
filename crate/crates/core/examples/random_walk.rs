// Sampling the length cocycle and its defect under the uniform generator measure.

use lampwalk::base::FreeGroup;
use lampwalk::lamp::FiniteLampGroup;
use lampwalk::walk::{self, batch, BatchOutput, BatchSpec, JobKind, StepDistribution};
use lampwalk::wreath::Wreath;

pub fn run_example() -> lampwalk::Result<()> {
    let w = Wreath::new(FiniteLampGroup::cyclic(2)?, FreeGroup::new(2)?);
    let mu = StepDistribution::uniform_generators(&w)?;

    let traj = walk::run_trajectory(&w, &mu, 1024, 42, 0, &walk::default_checkpoints(1024))?;
    for c in &traj.checkpoints {
        println!("k = {:>4}  Q_k = {:>4}  base depth = {:>4}", c.k, c.q, c.base_depth);
    }

    let d = walk::sample_defect(&w, &mu, 256, 256, 42, 1)?;
    println!("Q_m = {}, Q_n∘θ^m = {}, Q_(m+n) = {}, defect {}", d.q_m, d.shifted, d.q_mn, d.psi);

    // records come back in sample order whatever the thread count
    let spec = BatchSpec {
        kind: JobKind::Cocycle { horizons: vec![500, 1000] },
        samples: 200,
        seed: 7,
    };
    let BatchOutput::Cocycle(recs) = batch(&w, &mu, &spec, 2)? else {
        unreachable!()
    };
    let at = |n: u64| {
        let v: Vec<_> = recs.iter().filter(|r| r.n == n).collect();
        v.iter().map(|r| r.q as f64).sum::<f64>() / (v.len() as f64 * n as f64)
    };
    println!("Q_n / n: {:.4} at 500, {:.4} at 1000", at(500), at(1000));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
