//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use ulamlab::correct::{average_step, conjugating_unitary, kazhdan_correct, stabilize_projection, DEFAULT_MAX_ITER};
use ulamlab::deformation::{continuity_terms, ps_structural_checks, DeformationOps};
use ulamlab::experiment::{invariant_projection, run_experiment, Command, ExperimentConfig, Format};
use ulamlab::group::{build_group, permutations_lex, CosetSystem, FiniteGroup, GroupHom};
use ulamlab::induction::{compress, induce};
use ulamlab::linalg::{dist, hermitian_part, identity, op_norm, polar};
use ulamlab::quasirep::{kernel_triviality_check, root_of_unity_power_gap, sqrt3, KernelVerdict};
use ulamlab::random::{below, random_matrix, random_unitary, seeded, uniform, unitary_at_distance, LabRng};
use ulamlab::reps::{perturb, random_representation};
use ulamlab::witnesses::{brooks_phi, coboundary_sup, distance_to_hom, exp_circle, nearest_circle_hom, Rolli, RolliData};
use ulamlab::word::enumerate_ball;
use ulamlab::{Domain, GroupSpec, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn group(spec: &str) -> Arc<FiniteGroup> {
    Arc::new(build_group(&spec.parse::<GroupSpec>().unwrap()).unwrap())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Criteria 1 and 2 share their runs.
fn correction_runs() -> Result<(Outcome, Outcome)> {
    let start = Instant::now();
    let mut rng = seeded(1001);
    let (mut runs, mut bad_correct, mut bad_step) = (0usize, 0usize, 0usize);
    let (mut worst_ratio, mut worst_step): (f64, f64) = (0.0, 0.0);
    for spec in ["cyclic:5", "cyclic:7", "symmetric:3", "dihedral:4"] {
        let g = group(spec);
        for d in 2..=4 {
            for eps in [0.002, 0.01, 0.05] {
                for _ in 0..50 {
                    let rho = random_representation(&mut rng, &g, d)?;
                    let mu = perturb(&mut rng, &rho, eps / 3.0)?;
                    let trace = kazhdan_correct(&mu, 1e-12, DEFAULT_MAX_ITER)?;
                    let e = trace.initial_defect;
                    let bound = e + 120.0 * e * e + 1e-8;
                    if !(trace.converged && trace.final_defect <= 1e-12 && trace.distance_to_input <= bound) {
                        bad_correct += 1;
                    }
                    if e > 0.0 {
                        worst_ratio = worst_ratio.max(trace.distance_to_input / (e + 120.0 * e * e));
                    }
                    if e <= 0.05 {
                        let step = average_step(&mu)?.defect(None)?.value;
                        if step > 11.0 * e * e {
                            bad_step += 1;
                        }
                        if e > 0.0 {
                            worst_step = worst_step.max(step / (e * e));
                        }
                    }
                    runs += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        Outcome {
            pass: bad_correct == 0 && secs < 30.0,
            detail: format!(
                "{runs} runs, {bad_correct} failures, max distance/(ε+120ε²) = {worst_ratio:.4}, {secs:.1}s"
            ),
        },
        Outcome {
            pass: bad_step == 0,
            detail: format!("{bad_step} failures, max one-step defect/ε² = {worst_step:.4} (bound 11)"),
        },
    ))
}

fn random_subgroup_pair(rng: &mut LabRng) -> (Arc<FiniteGroup>, CosetSystem) {
    let pool = ["cyclic:4", "cyclic:6", "cyclic:8", "symmetric:3", "dihedral:4", "dihedral:5", "dihedral:6", "symmetric:4"];
    loop {
        let g = group(pool[below(rng, pool.len())]);
        let gens: Vec<usize> = (0..1 + below(rng, 2)).map(|_| below(rng, g.order())).collect();
        let h = g.generated_subgroup(&gens);
        let index = g.order() / h.len();
        if (2..=6).contains(&index) {
            let cs = CosetSystem::new(g.clone(), &h).unwrap();
            return (g, cs);
        }
    }
}

fn criterion_3() -> Result<Outcome> {
    let mut rng = seeded(1003);
    let (mut worst_def, mut worst_iso): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let (_, cs) = random_subgroup_pair(&mut rng);
        let d = 1 + below(&mut rng, 3);
        let base = random_representation(&mut rng, cs.subgroup_group(), d)?;
        let (e1, e2) = (uniform(&mut rng, 0.0, 0.3), uniform(&mut rng, 0.0, 0.3));
        let m1 = perturb(&mut rng, &base, e1)?;
        let m2 = perturb(&mut rng, &base, e2)?;
        let (i1, i2) = (induce(&m1, &cs)?, induce(&m2, &cs)?);
        worst_def = worst_def.max((i1.total.defect(None)?.value - m1.defect(None)?.value).abs());
        worst_iso = worst_iso
            .max((i1.total.uniform_distance(&i2.total)?.value - m1.uniform_distance(&m2)?.value).abs());
    }
    Ok(Outcome {
        pass: worst_def <= 1e-12 && worst_iso <= 1e-12,
        detail: format!("20 pairs, max |def gap| = {worst_def:e}, max |distance gap| = {worst_iso:e}"),
    })
}

fn criterion_4() -> Result<Outcome> {
    let mut rng = seeded(1004);
    let (mut cases, mut failures) = (0usize, Vec::new());
    let (mut r_pq, mut r_pv, mut r_fin): (f64, f64, f64) = (0.0, 0.0, 0.0);
    while cases < 100 {
        let (_, cs) = random_subgroup_pair(&mut rng);
        let d = 1 + below(&mut rng, 2);
        if cs.index() * d > 12 {
            continue;
        }
        let mu = random_representation(&mut rng, cs.subgroup_group(), d)?;
        let ind = induce(&mu, &cs)?;
        let size = uniform(&mut rng, 0.001, 0.025);
        let u = unitary_at_distance(&mut rng, ind.total.dim(), size);
        let nu = ind.total.conjugate(&u);
        let measured = nu.uniform_distance(&ind.total)?.value;
        if measured > 0.05 || measured == 0.0 {
            continue;
        }
        cases += 1;
        let delta = measured * (1.0 + 1e-9);
        match compress(&nu, &mu, &cs, delta) {
            Ok(r) => {
                r_pq = r_pq.max(r.p_minus_q / delta);
                r_pv = r_pv.max(r.p_minus_v / delta);
                r_fin = r_fin.max(r.final_distance / delta);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{cases} cases, {} failures, max ‖P−Q‖/δ = {r_pq:.3} (4), ‖P−V‖/δ = {r_pv:.3} (8), final/δ = {r_fin:.3} (16){}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    })
}

fn criterion_5() -> Result<Outcome> {
    let mut rng = seeded(1005);
    let pool = ["cyclic:5", "cyclic:12", "symmetric:3", "dihedral:4", "dihedral:6", "cyclic:8"];
    let (mut cases, mut bad) = (0usize, 0usize);
    let (mut worst_ratio, mut worst_comm, mut worst_idem): (f64, f64, f64) = (0.0, 0.0, 0.0);
    while cases < 100 {
        let g = group(pool[below(&mut rng, pool.len())]);
        let d = 2 + below(&mut rng, 5);
        let nu = random_representation(&mut rng, &g, d)?;
        let rank = 1 + below(&mut rng, d - 1);
        let Ok(p0) = invariant_projection(&mut rng, &nu, rank) else { continue };
        let size = uniform(&mut rng, 0.0, 0.1);
        let u = unitary_at_distance(&mut rng, d, size);
        let p = hermitian_part(&(u.matrix() * &p0 * u.matrix().adjoint()));
        let measured = g
            .elements()
            .map(|x| dist(&p, &(nu.value(x) * &p * nu.value(x).adjoint())))
            .fold(0.0, f64::max);
        if measured > 0.2 {
            continue;
        }
        cases += 1;
        let delta = measured.max(1e-15);
        match stabilize_projection(&nu, &p, delta) {
            Ok(s) => {
                let idem = dist(&(&s.q * &s.q), &s.q);
                let comm = g
                    .elements()
                    .map(|x| dist(&(nu.value(x) * &s.q), &(&s.q * nu.value(x))))
                    .fold(0.0, f64::max);
                if !(comm <= 1e-8 && idem <= 1e-9 && s.p_minus_q <= 2.0 * delta + 1e-8) {
                    bad += 1;
                }
                worst_ratio = worst_ratio.max(s.p_minus_q / delta);
                worst_comm = worst_comm.max(comm);
                worst_idem = worst_idem.max(idem);
            }
            Err(_) => bad += 1,
        }
    }
    Ok(Outcome {
        pass: bad == 0,
        detail: format!(
            "{cases} cases, {bad} failures, max ‖P−Q‖/δ = {worst_ratio:.3} (2), max commutator {worst_comm:e}, max ‖Q²−Q‖ {worst_idem:e}"
        ),
    })
}

fn criterion_6() -> Result<Outcome> {
    let mut rng = seeded(1006);
    let (mut bad, mut worst): (usize, f64) = (0, 0.0);
    for _ in 0..500 {
        let d = 1 + below(&mut rng, 6);
        let eps = uniform(&mut rng, 1e-4, 0.5);
        let e = random_matrix(&mut rng, d, d);
        let t = identity(d) + e.unscale(op_norm(&e)).scale(eps);
        let measured = dist(&t, &identity(d));
        let u = polar(&t)?.unitary;
        let gap = dist(u.matrix(), &identity(d));
        worst = worst.max(gap / measured);
        if gap > 2.0 * measured + 1e-9 {
            bad += 1;
        }
    }
    Ok(Outcome { pass: bad == 0, detail: format!("500 cases, {bad} failures, max ‖U−Id‖/ε = {worst:.4} (2)") })
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = seeded(1007);
    let pool = ["cyclic:5", "cyclic:7", "symmetric:3", "dihedral:4", "symmetric:4", "dihedral:5"];
    let (mut cases, mut bad) = (0usize, Vec::new());
    let (mut worst_const, mut worst_int): (f64, f64) = (0.0, 0.0);
    while cases < 100 {
        let g = group(pool[below(&mut rng, pool.len())]);
        let d = 1 + below(&mut rng, 6);
        let pi = random_representation(&mut rng, &g, d)?;
        let size = uniform(&mut rng, 0.0, 0.4 / (d as f64).sqrt());
        let u = unitary_at_distance(&mut rng, d, size);
        let omega = pi.conjugate(&u);
        let eps = pi.uniform_distance(&omega)?.value;
        if !(eps * (d as f64).sqrt() < 1.0) {
            continue;
        }
        cases += 1;
        match conjugating_unitary(&pi, &omega, eps.max(1e-300)) {
            Ok(c) => {
                if eps > 0.0 {
                    worst_const = worst_const.max(c.measured_constant(eps));
                }
                worst_int = worst_int.max(c.intertwining_error);
                if c.intertwining_error > 1e-8 || c.u_minus_id > 3.0 * (d as f64).sqrt() * eps + 1e-8 {
                    bad.push(format!("d = {d}, ε = {eps:e}"));
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
    }
    Ok(Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{cases} cases, {} failures, max ‖u−Id‖/(√d·ε) = {worst_const:.4} (3), max intertwining error {worst_int:e}{}",
            bad.len(),
            bad.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    })
}

fn criterion_8() -> Result<Outcome> {
    let mut rng = seeded(1008);
    let (mut bad, mut worst_ratio): (usize, f64) = (0, 0.0);
    let mut observations = Vec::new();
    for n in 2..=4 {
        for delta in [0.1, 0.3, 1.0] {
            let r = Rolli::new(RolliData::new(n, delta, 8))?;
            let small = r.tabulate(4)?;
            let exhaustive = small.defect(Some(4))?.value;
            let big = r.tabulate(6)?;
            let Domain::Free(ball) = big.domain() else { unreachable!() };
            let mut sampled: f64 = 0.0;
            let mut pairs = 0;
            while pairs < 4000 {
                let (x, y) = (below(&mut rng, ball.len()), below(&mut rng, ball.len()));
                if let Some(xy) = ball.product(x, y) {
                    sampled = sampled.max(dist(big.value(xy), &(big.value(x) * big.value(y))));
                    pairs += 1;
                }
            }
            let worst = exhaustive.max(sampled);
            if worst > delta + 1e-10 {
                bad += 1;
            }
            worst_ratio = worst_ratio.max(worst / delta);
            let mut best = distance_to_hom(&big, &[big.value(1).clone(), big.value(3).clone()], 6)?.value;
            for _ in 0..20 {
                let images = [random_unitary(&mut rng, n).into_matrix(), random_unitary(&mut rng, n).into_matrix()];
                best = best.min(distance_to_hom(&big, &images, 6)?.value);
            }
            observations.push(format!("n={n} δ={delta}: D̂₆ {best:.3}"));
        }
    }
    Ok(Outcome {
        pass: bad == 0,
        detail: format!(
            "9 maps, {bad} failures, max defect/δ = {worst_ratio:.4}; observed candidate distances (not asserted): {}",
            observations.join(", ")
        ),
    })
}

fn criterion_9() -> Result<Outcome> {
    let phi = brooks_phi(&"ab".parse().unwrap())?;
    let cob = coboundary_sup(&phi, 8)?;
    let mut bad = 0;
    let mut obs = Vec::new();
    for t in [0.1, 0.01, 0.001] {
        let mu = exp_circle(&phi, t, 8)?;
        let def = mu.defect(Some(8))?.value;
        if def > 2.0 * PI * t * cob.value + 1e-12 {
            bad += 1;
        }
        let fit = nearest_circle_hom(&mu, 8, 64)?;
        obs.push(format!("t={t}: def {def:.4e}, D̂₈ {:.4e}", fit.distance));
    }
    Ok(Outcome {
        pass: bad == 0,
        detail: format!(
            "sup|dφ| on |g|,|h| ≤ 8 = {}, {bad} failures; trend (not asserted): {}",
            cob.value,
            obs.join(", ")
        ),
    })
}

fn sign_hom(n: usize) -> GroupHom {
    let perms = permutations_lex(n);
    let map = perms
        .iter()
        .map(|p| {
            let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            inversions % 2
        })
        .collect();
    GroupHom::new(group(&format!("symmetric:{n}")), group("cyclic:2"), map).unwrap()
}

fn quotient_scenario(rng: &mut LabRng) -> GroupHom {
    match below(rng, 4) {
        0 => {
            let m = 2 + below(rng, 4);
            let n = m * (1 + below(rng, 3));
            GroupHom::new(group(&format!("cyclic:{n}")), group(&format!("cyclic:{m}")), (0..n).map(|i| i % m).collect())
                .unwrap()
        }
        1 => {
            let m = 2 + below(rng, 3);
            let n = m * (1 + below(rng, 2));
            let map = (0..2 * n).map(|x| x % n % m + m * (x / n)).collect();
            GroupHom::new(group(&format!("dihedral:{n}")), group(&format!("dihedral:{m}")), map).unwrap()
        }
        2 => {
            let n = 3 + below(rng, 3);
            let map = (0..2 * n).map(|x| x / n).collect();
            GroupHom::new(group(&format!("dihedral:{n}")), group("cyclic:2"), map).unwrap()
        }
        _ => sign_hom(3 + below(rng, 2)),
    }
}

fn criterion_10() -> Result<Outcome> {
    let mut worst_gap = f64::INFINITY;
    for m in 2..=24 {
        for j in (1..m).filter(|&j| gcd(j, m) == 1) {
            worst_gap = worst_gap.min(root_of_unity_power_gap(j, m));
        }
    }
    let roots_ok = worst_gap >= sqrt3() - 1e-12;
    let mut rng = seeded(1010);
    let mut forced = 0usize;
    let mut bad = 0usize;
    for _ in 0..20 {
        let q = quotient_scenario(&mut rng);
        let d = 1 + below(&mut rng, 3);
        let rho = random_representation(&mut rng, q.target(), d)?;
        let nu = rho.pullback(&q)?.conjugate(&random_unitary(&mut rng, d));
        let kernel: BTreeSet<usize> = q.kernel();
        let bound = uniform(&mut rng, 0.0, sqrt3() - 1e-6);
        for v in kernel_triviality_check(&nu, &kernel, bound)? {
            match v {
                KernelVerdict::ForcedTrivial { element, .. } => {
                    forced += 1;
                    if dist(nu.value(element), &identity(d)) > 1e-8 {
                        bad += 1;
                    }
                }
                KernelVerdict::Violation { .. } => bad += 1,
            }
        }
    }
    Ok(Outcome {
        pass: roots_ok && bad == 0,
        detail: format!(
            "min over primitive roots of order 2..24 of max|zⁿ−1| = {worst_gap:.15}; 20 scenarios, {forced} kernel elements forced trivial, {bad} failures"
        ),
    })
}

fn disk_point(rng: &mut LabRng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * uniform(rng, 0.0, 1.0).sqrt(), uniform(rng, 0.0, 2.0 * PI))
}

fn criterion_11() -> Result<Outcome> {
    let start = Instant::now();
    let ops = DeformationOps::new(2, 8)?;
    let words = enumerate_ball(2, 3)?;
    let mut structural_bad = 0;
    for a in &words {
        if ps_structural_checks(&ops, a).is_err() {
            structural_bad += 1;
        }
    }
    let mut rng = seeded(1011);
    let (mut checked, mut violations, mut corrected_bad) = (0usize, 0usize, 0usize);
    let mut worst_ratio: f64 = 0.0;
    let mut worst_by_len = [0.0f64; 4];
    let mut first = None;
    for _ in 0..50 {
        let z = disk_point(&mut rng, 0.9);
        let w = disk_point(&mut rng, 0.9);
        for a in &words {
            let gap = continuity_terms(&ops, z, w, a)?;
            checked += 1;
            if gap.lhs > gap.rhs + 1e-9 {
                violations += 1;
                first.get_or_insert_with(|| format!("a = {a}, z = {z:.4}, w = {w:.4}: {:.6} > {:.6}", gap.lhs, gap.rhs));
            }
            if gap.lhs > gap.corrected_rhs() + 1e-9 {
                corrected_bad += 1;
            }
            if gap.rhs > 0.0 {
                worst_ratio = worst_ratio.max(gap.lhs / gap.rhs);
                worst_by_len[a.len()] = worst_by_len[a.len()].max(gap.lhs / gap.rhs);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: violations == 0 && structural_bad == 0 && secs < 60.0,
        detail: format!(
            "structural: {} words, {structural_bad} failures; continuity: {checked} checks, {violations} with lhs > Σ|zⁿ−wⁿ| + 1e-9 (max ratio {worst_ratio:.4}; by |a| = 0..3: {:.3} {:.3} {:.3} {:.3}){}; with the factor ‖P − λ(a)Pλ(a)⁻¹‖ = 2cos(π/(|a|+2)) kept: {corrected_bad} failures; {secs:.1}s",
            words.len(),
            worst_by_len[0],
            worst_by_len[1],
            worst_by_len[2],
            worst_by_len[3],
            first.map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    })
}

fn criterion_12() -> Result<Outcome> {
    let mut differing = Vec::new();
    for command in Command::ALL {
        let mut config = ExperimentConfig { command: Some(command), seed: 12, ..Default::default() };
        if command == Command::Quasimorphism {
            config.trunc = Some(6);
        }
        for format in [Format::Json, Format::Csv] {
            let a = run_experiment(&config)?.render(format)?;
            let b = run_experiment(&config)?.render(format)?;
            if a != b {
                differing.push(format!("{command}/{format:?}"));
            }
        }
    }
    Ok(Outcome {
        pass: differing.is_empty(),
        detail: format!("{} commands × 2 formats, differing: {:?}", Command::ALL.len(), differing),
    })
}

fn report(n: usize, name: &str, outcome: Result<Outcome>) -> bool {
    let (pass, detail) = match outcome {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!("criterion {n:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() -> ExitCode {
    let mut all = true;
    match correction_runs() {
        Ok((c1, c2)) => {
            all &= report(1, "Kazhdan correction bound", Ok(c1));
            all &= report(2, "one-step contraction", Ok(c2));
        }
        Err(e) => {
            let msg = e.to_string();
            report(1, "Kazhdan correction bound", Err(e));
            println!("criterion  2 [FAIL] one-step contraction: error: {msg}");
            all = false;
        }
    }
    all &= report(3, "induction equalities", criterion_3());
    all &= report(4, "compression chain", criterion_4());
    all &= report(5, "projection stabilization", criterion_5());
    all &= report(6, "polar bound", criterion_6());
    all &= report(7, "conjugating unitary", criterion_7());
    all &= report(8, "Rolli defect", criterion_8());
    all &= report(9, "circle witnesses", criterion_9());
    all &= report(10, "roots of unity and kernel triviality", criterion_10());
    all &= report(11, "Pytlik–Szwarc continuity", criterion_11());
    all &= report(12, "determinism", criterion_12());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
