// How far the projected walk strays from the geodesic to its endpoint.

use lampwalk::base::FreeGroup;
use lampwalk::lamp::FiniteLampGroup;
use lampwalk::stats::{self, ProgressSpec};
use lampwalk::walk::{batch, BatchOutput, BatchSpec, JobKind, StepDistribution};
use lampwalk::wreath::Wreath;

pub fn run_example() -> lampwalk::Result<()> {
    let w = Wreath::new(FiniteLampGroup::cyclic(2)?, FreeGroup::new(2)?);
    let mu = StepDistribution::uniform_generators(&w)?;
    let horizons = vec![128, 512, 2048];
    let spec = BatchSpec {
        kind: JobKind::Tracking {
            horizons: horizons.clone(),
            progress: Some(ProgressSpec { k0: 5.0, window: 64, stride: 16 }),
        },
        samples: 100,
        seed: 3,
    };
    let BatchOutput::Tracking(recs) = batch(&w, &mu, &spec, 0)? else {
        unreachable!()
    };
    for n in horizons {
        let rows: Vec<_> = recs.iter().filter(|r| r.n == n).collect();
        let dev: Vec<u64> = rows.iter().map(|r| r.max_deviation).collect();
        let pairs: u64 = rows.iter().map(|r| r.pairs).sum();
        let bad: u64 = rows.iter().map(|r| r.violations).sum();
        println!(
            "n = {n:>4}: median deviation {:.1}, progress violations {bad}/{pairs}",
            stats::median(&dev)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
