// The TSP defect bound along a geodesic axis, with the explicit path surgery.

use lampwalk::base::{BaseGroup, FreeGroup};
use lampwalk::lemma::{self, InstanceParams, LemmaInstance, NodePath};
use lampwalk::tsp::{self, TspInstance};

pub fn run_example() -> lampwalk::Result<()> {
    let g = FreeGroup::new(2)?;
    let w = |s: &str| g.parse(s).unwrap();

    // points hanging off the axis a^10 at distance at most 1
    let a = g.identity();
    let c = w("aaaaaaaaaa");
    let gamma = g.geodesic(&a, &c);
    let inst = LemmaInstance::new(
        a.clone(),
        w("aaaaa"),
        c.clone(),
        gamma,
        [w("aab")],
        [w("aaaaaaab")],
        1,
    );
    let cert = lemma::certify_hypotheses(&g, &inst);
    println!("certified: {} (R = {}, N = {})", cert.certified(), cert.r, cert.n);

    let rep = lemma::defect_sandwich(&g, &inst, &inst.symmetric_difference())?;
    println!("t1 = {}, t2 = {}, t3 = {}, defect {} <= {}", rep.t1, rep.t2, rep.t3, rep.defect, rep.bound);

    let sol = tsp::solve_tree(&g, &TspInstance::new(a.clone(), inst.symmetric_difference(), c.clone()))?;
    let alpha = NodePath::from_order(&g, &a, &sol.order, &c);
    let beta = lemma::surgery(&g, &inst, &alpha)?;
    let nodes: Vec<String> = beta.path.nodes().iter().map(|x| g.format(x)).collect();
    println!("beta visits {nodes:?}, length {}", beta.path.length());
    assert!(beta.satisfies_visit_contract(&inst));

    let checks: Vec<_> = (0..200)
        .map(|seed| lemma::check_random_instance(&g, &InstanceParams::default(), seed))
        .collect::<lampwalk::Result<_>>()?;
    let worst = checks.iter().map(|c| c.defect as f64 / c.bound as f64).fold(0.0, f64::max);
    println!("200 random instances: all within bound: {}, worst ratio {worst:.3}",
        checks.iter().all(|c| c.verdict && c.beta_ok));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lampwalk::Result<()> {
    run_example()
}
