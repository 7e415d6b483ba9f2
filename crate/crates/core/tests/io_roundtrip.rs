use std::sync::Arc;

use proptest::prelude::*;
use ulamlab::group::{build_group, CosetSystem};
use ulamlab::induction::induce;
use ulamlab::io::{read_induced, read_quasirep, write_induced, write_quasirep};
use ulamlab::random::seeded;
use ulamlab::reps::{perturb, random_representation};
use ulamlab::witnesses::rolli;
use ulamlab::{Error, GroupSpec, QuasiRep};

fn same_bits(a: &QuasiRep, b: &QuasiRep) -> bool {
    a.dim() == b.dim()
        && a.values().len() == b.values().len()
        && a.values().iter().zip(b.values()).all(|(x, y)| {
            x.matrix().iter().zip(y.matrix().iter()).all(|(p, q)| {
                p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits()
            })
        })
}

fn group(spec: &str) -> Arc<ulamlab::FiniteGroup> {
    Arc::new(build_group(&spec.parse::<GroupSpec>().unwrap()).unwrap())
}

#[test]
fn free_domain_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mu = rolli(3, 0.3, 11, 3).unwrap();
    let path = dir.path().join("rolli.json");
    write_quasirep(&path, &mu).unwrap();
    let back = read_quasirep(&path).unwrap();
    assert!(same_bits(&mu, &back));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"L\": 3"));
    assert!(text.contains("\"\": {"), "identity keyed by the empty word");
}

#[test]
fn induced_round_trip_keeps_layout() {
    let dir = tempfile::tempdir().unwrap();
    let g = group("dihedral:3");
    let cs = CosetSystem::new(g.clone(), &g.generated_subgroup(&[1])).unwrap();
    let mut rng = seeded(4);
    let mu = random_representation(&mut rng, cs.subgroup_group(), 2).unwrap();
    let ind = induce(&mu, &cs).unwrap();
    let path = dir.path().join("induced.json");
    write_induced(&path, &ind).unwrap();
    let (back, layout) = read_induced(&path).unwrap();
    assert!(same_bits(&ind.total, &back));
    assert_eq!(layout, ind.block_layout());
    assert!(dir.path().join("induced.cayley.txt").exists());
}

#[test]
fn missing_value_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"domain": {"kind": "free", "k": 2, "L": 1}, "dim": 1, "values": {}}"#).unwrap();
    assert!(matches!(read_quasirep(&path), Err(Error::Parse(_))));
}

#[test]
fn non_unitary_value_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.json");
    let body = r#"{"domain": {"kind": "free", "k": 1, "L": 0}, "dim": 1,
        "values": {"": {"rows": 1, "cols": 1, "data": [[2.0, 0.0]]}}}"#;
    std::fs::write(&path, body).unwrap();
    assert!(read_quasirep(&path).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_round_trip_is_bit_exact(seed in any::<u64>(), which in 0usize..4, d in 1usize..4, eps in 0.0f64..0.3) {
        let spec = ["cyclic:5", "symmetric:3", "dihedral:4", "cyclic:2"][which];
        let g = group(spec);
        let mut rng = seeded(seed);
        let rho = random_representation(&mut rng, &g, d).unwrap();
        let mu = perturb(&mut rng, &rho, eps).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.json");
        write_quasirep(&path, &mu).unwrap();
        let back = read_quasirep(&path).unwrap();
        prop_assert!(same_bits(&mu, &back));
        prop_assert!(back.group().unwrap().same_table(&g));
    }
}
