//! Genuine unitary representations of finite groups and seeded perturbations
//! of them, used as inputs for the correction and induction experiments.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{CosetSystem, FiniteGroup};
use crate::induction::induce;
use crate::linalg::{direct_sum, CMatrix, UnitaryMatrix};
use crate::quasirep::{Domain, QuasiRep};
use crate::random::{below, random_unitary, unitary_at_distance, LabRng};

/// Character `g^j ↦ e^{2πi·k·j/n}` of a cyclic group, in terms of its
/// smallest-index generator.
pub fn cyclic_character(group: Arc<FiniteGroup>, k: usize) -> Result<QuasiRep> {
    let n = group.order();
    let gen = group
        .elements()
        .find(|&g| group.element_order(g) == n)
        .ok_or_else(|| Error::Usage("group is not cyclic".into()))?;
    let mut exponent = vec![0usize; n];
    let mut x = group.identity();
    for j in 0..n {
        exponent[x] = j;
        x = group.mul(x, gen);
    }
    QuasiRep::from_fn_finite(group, 1, |g| {
        let z = Complex64::from_polar(1.0, 2.0 * PI * ((k * exponent[g]) % n) as f64 / n as f64);
        UnitaryMatrix::new(CMatrix::from_element(1, 1, z))
    })
}

/// Character of the cyclic subgroup `⟨h⟩`, expressed on that subgroup as a
/// standalone group, together with the coset system of `⟨h⟩` in `group`.
pub fn subgroup_character(group: &Arc<FiniteGroup>, h: usize, k: usize) -> Result<(QuasiRep, CosetSystem)> {
    let sub = group.generated_subgroup(&[h]);
    let cs = CosetSystem::new(group.clone(), &sub)?;
    let chi = cyclic_character(cs.subgroup_group().clone(), k)?;
    Ok((chi, cs))
}

/// Representation induced from a character of a cyclic subgroup.
pub fn monomial_representation(group: &Arc<FiniteGroup>, h: usize, k: usize) -> Result<QuasiRep> {
    let (chi, cs) = subgroup_character(group, h, k)?;
    Ok(induce(&chi, &cs)?.total)
}

/// Block-diagonal sum of representations of the same group.
pub fn direct_sum_reps(parts: &[QuasiRep]) -> Result<QuasiRep> {
    let first = parts.first().ok_or_else(|| Error::Usage("empty direct sum".into()))?;
    let domain = first.domain().clone();
    let dim = parts.iter().map(|p| p.dim()).sum();
    let values = (0..domain.size())
        .map(|g| {
            let blocks: Vec<&CMatrix> = parts.iter().map(|p| p.value(g)).collect();
            UnitaryMatrix::new(direct_sum(&blocks))
        })
        .collect::<Result<Vec<_>>>()?;
    QuasiRep::new(domain, dim, values)
}

/// A genuine representation of dimension `d`: a direct sum of monomial
/// representations induced from random characters of random cyclic
/// subgroups (index at most the remaining dimension), conjugated by a Haar
/// unitary.
pub fn random_representation(rng: &mut LabRng, group: &Arc<FiniteGroup>, d: usize) -> Result<QuasiRep> {
    if d == 0 {
        return Err(Error::Usage("dimension must be positive".into()));
    }
    let n = group.order();
    // cyclic subgroups by generator, with their index
    let mut seen = BTreeSet::new();
    let mut cyclic: Vec<(usize, usize, usize)> = Vec::new(); // (generator, order, index)
    for g in group.elements() {
        let sub = group.generated_subgroup(&[g]);
        if seen.insert(sub.clone()) {
            cyclic.push((g, sub.len(), n / sub.len()));
        }
    }
    let mut parts = Vec::new();
    let mut remaining = d;
    while remaining > 0 {
        let options: Vec<&(usize, usize, usize)> = cyclic.iter().filter(|c| c.2 <= remaining).collect();
        let part = if options.is_empty() {
            QuasiRep::trivial(Domain::Finite(group.clone()), 1)
        } else {
            let &(g, order, _) = options[below(rng, options.len())];
            monomial_representation(group, g, below(rng, order))?
        };
        remaining -= part.dim();
        parts.push(part);
    }
    let rho = direct_sum_reps(&parts)?;
    Ok(rho.conjugate(&random_unitary(rng, d)))
}

/// `g ↦ μ(g)·W_g` with `‖W_g − Id‖ = eps` exactly for `g ≠ e`, so the
/// result sits at uniform distance `eps` from `μ`.
pub fn perturb(rng: &mut LabRng, mu: &QuasiRep, eps: f64) -> Result<QuasiRep> {
    if eps == 0.0 {
        return Ok(mu.clone());
    }
    let d = mu.dim();
    let e = mu.domain().identity();
    mu.map_values(|g, m| {
        if g == e {
            Ok(m.clone())
        } else {
            Ok(m * unitary_at_distance(rng, d, eps).matrix())
        }
    })
}

/// All one-dimensional unitary characters of a finite group.
///
/// Values on a greedy generating set range over the roots of unity of order
/// the group exponent; each assignment is extended along the Cayley graph
/// and kept when it is multiplicative. Characters come out in
/// lexicographic order of their exponents on the generators.
pub fn one_dim_characters(group: &Arc<FiniteGroup>) -> Result<Vec<QuasiRep>> {
    let n = group.order();
    let mut gens = Vec::new();
    let mut span = group.generated_subgroup(&[]);
    for g in group.elements() {
        if !span.contains(&g) {
            gens.push(g);
            span = group.generated_subgroup(&gens);
        }
    }
    let exponent = group.elements().map(|g| group.element_order(g)).fold(1, lcm);
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        // exponents mod `exponent`, propagated by breadth-first search
        let mut val: Vec<Option<usize>> = vec![None; n];
        val[group.identity()] = Some(0);
        let mut queue = std::collections::VecDeque::from([group.identity()]);
        while let Some(x) = queue.pop_front() {
            for (gi, &g) in gens.iter().enumerate() {
                let y = group.mul(x, g);
                if val[y].is_none() {
                    val[y] = Some((val[x].expect("visited") + choice[gi]) % exponent);
                    queue.push_back(y);
                }
            }
        }
        let val: Vec<usize> = val.into_iter().map(|v| v.expect("generators span")).collect();
        let multiplicative = group
            .elements()
            .all(|x| group.elements().all(|y| val[group.mul(x, y)] == (val[x] + val[y]) % exponent));
        if multiplicative {
            out.push(QuasiRep::from_fn_finite(group.clone(), 1, |g| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * val[g] as f64 / exponent as f64);
                UnitaryMatrix::new(CMatrix::from_element(1, 1, z))
            })?);
        }
        // next assignment, odometer style
        let mut i = gens.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < exponent {
                break;
            }
            choice[i] = 0;
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}
