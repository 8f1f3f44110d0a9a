// Word lengths in the lamplighter group Z/2 ≀ F_2, checked against a BFS ball.

use lampwalk::base::{BaseGroup, FreeGroup};
use lampwalk::lamp::FiniteLampGroup;
use lampwalk::wreath::Wreath;

pub fn run_example() -> lampwalk::Result<()> {
    let w = Wreath::new(FiniteLampGroup::cyclic(2)?, FreeGroup::new(2)?);

    // lamps lit at b and ab, cursor ending at a
    let g = w.parse_element("b=1,ab=1;a")?;
    let detail = w.word_length_detail(&g)?;
    println!("{} has length {}", w.format_element(&g), detail.total());
    assert_eq!(detail.total(), 7);

    let h = w.multiply(&g, &w.invert(&g));
    assert_eq!(h, w.identity());

    let t = w.translation(w.base().parse("ab")?);
    println!("d(g, g*ab) = {}", w.distance(&g, &w.multiply(&g, &t))?);

    let ball = w.bfs_oracle(4)?;
    let agree = ball.iter().all(|(x, &d)| w.word_length(x).unwrap() == d);
    println!("radius-4 ball: {} elements, formula agrees with BFS: {agree}", ball.len());
    assert!(agree);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
