// Fixed-endpoint TSP on the Cayley graph of the base group.
//
// Free groups use the tree formula; the lattice control falls back to the
// Held–Karp subset DP, and a nearest-neighbour heuristic is available past
// the DP cap.

use lampwalk::base::{BaseGroup, FreeGroup, Lattice};
use lampwalk::tsp::{self, TspInstance};

pub fn run_example() -> lampwalk::Result<()> {
    let f2 = FreeGroup::new(2)?;
    let points = ["b", "ab", "aBa", "BB"].map(|s| f2.parse(s).unwrap());
    let inst = TspInstance::new(f2.identity(), points, f2.parse("a")?);

    let tree = tsp::solve_tree(&f2, &inst)?;
    let dp = tsp::solve_dp(&f2, &inst, 20)?;
    let brute = tsp::brute_force(&f2, &inst)?;
    let order: Vec<String> = tree.order.iter().map(|x| f2.format(x)).collect();
    println!("tree {} via {order:?}, dp {}, brute force {}", tree.value, dp.value, brute.value);
    assert!(tree.value == dp.value && dp.value == brute.value);

    let z2 = Lattice::new(2)?;
    let pts: Vec<_> = [[2, 1], [-1, 3], [0, -2], [3, 3]]
        .iter()
        .map(|c| z2.point(c).unwrap())
        .collect();
    let inst = TspInstance::new(z2.identity(), pts, z2.point(&[1, 0])?);
    let exact = tsp::solve_dp(&z2, &inst, 20)?;
    let rough = tsp::solve_heuristic(&z2, &inst);
    println!("lattice: exact {}, heuristic {} (exact: {})", exact.value, rough.value, rough.exact);
    assert!(rough.value >= exact.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
