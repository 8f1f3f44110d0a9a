// Lamp groups beyond Z/2: a table-defined S_3 and integer lamps on a lattice base.

use lampwalk::base::{BaseGroup, FreeGroup, Lattice};
use lampwalk::lamp::{FiniteLampGroup, IntegerLamps, LampTable};
use lampwalk::walk::{StepDistribution, Walker};
use lampwalk::walk::sample_rng;
use lampwalk::wreath::Wreath;

pub fn run_example() -> lampwalk::Result<()> {
    // S_3 as permutations of {0,1,2}; index 0 is the identity
    let perms = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let mul = perms
        .iter()
        .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    let s3 = FiniteLampGroup::from_table(&LampTable { order: 6, mul })?;
    let w = Wreath::new(s3, FreeGroup::new(2)?);
    let g = w.parse_element("a=4,b=1;ab")?;
    println!("S_3 lamps: {} has length {}", w.format_element(&g), w.word_length(&g)?);

    let z = Wreath::new(IntegerLamps::new(1)?, Lattice::new(1)?);
    let mu = StepDistribution::uniform_generators(&z)?;
    let mut walker = Walker::new(&z);
    let mut rng = sample_rng(11, 0);
    for _ in 0..1000 {
        walker.step(&mu, &mut rng);
    }
    let e = walker.element();
    println!(
        "Z wr Z after 1000 steps: cursor {}, lamp cost {}, length {}",
        z.base().format(&e.position),
        walker.lamp_cost(),
        walker.word_length()?
    );
    assert_eq!(walker.word_length()?, z.word_length(&e)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
