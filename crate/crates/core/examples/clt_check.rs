// Drift, variance and a normality check of the standardised word length.

use lampwalk::base::FreeGroup;
use lampwalk::lamp::FiniteLampGroup;
use lampwalk::stats;
use lampwalk::walk::{batch, BatchOutput, BatchSpec, JobKind, StepDistribution};
use lampwalk::wreath::Wreath;

fn lengths(out: BatchOutput, n: u64) -> Vec<u64> {
    match out {
        BatchOutput::Cocycle(r) => r.into_iter().filter(|r| r.n == n).map(|r| r.q).collect(),
        _ => unreachable!(),
    }
}

pub fn run_example() -> lampwalk::Result<()> {
    let w = Wreath::new(FiniteLampGroup::cyclic(2)?, FreeGroup::new(2)?);
    let mu = StepDistribution::uniform_generators(&w)?;
    let n = 400;
    let run = |seed, samples| {
        let spec = BatchSpec {
            kind: JobKind::Cocycle { horizons: vec![n / 2, n] },
            samples,
            seed,
        };
        batch(&w, &mu, &spec, 0)
    };

    let calib = run(1, 4000)?;
    let half = lengths(calib.clone(), n / 2);
    let full = lengths(calib, n);
    let drift = stats::estimate_drift(&[(n / 2, half), (n, full.clone())])?;
    let sigma = stats::estimate_sigma(&full, n)?;

    let sample = lengths(run(2, 2000)?, n);
    let report = stats::clt_report(&sample, n, drift.ell, sigma)?;
    print!("{report}");
    println!("rejected at 0.01: {}", report.rejects(0.01));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
