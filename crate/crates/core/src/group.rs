//! Finite groups stored as Cayley tables, homomorphisms between them,
//! coset systems for finite-index subgroups, and quotients.
//!
//! Elements are indices `0..order`. Every built-in family places the identity
//! at index 0; groups read from a Cayley file keep the file's labelling and
//! infer the identity.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest symmetric group the builder accepts (720 elements).
pub const MAX_SYMMETRIC_DEGREE: usize = 6;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    /// Row-major: `table[a * order + b] = a·b`.
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("identity", &self.identity)
            .finish_non_exhaustive()
    }
}

impl FiniteGroup {
    /// Validates a full Cayley table (rows are `g·h` for `h = 0..n`).
    ///
    /// Checks that every row and column is a permutation, that an identity
    /// exists, and associativity over all triples.
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let group = Self::from_rows_unchecked_assoc(rows)?;
        group.check_associative()?;
        Ok(group)
    }

    /// Same as [`from_table`](Self::from_table) but skips the cubic
    /// associativity scan. Used by the built-in families, which are
    /// associative by construction.
    fn from_rows_unchecked_assoc(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::GroupLoad("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (g, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::GroupLoad(format!(
                    "row {g} has {} entries, expected {n}",
                    row.len()
                )));
            }
            check_permutation(row, n).map_err(|why| Error::GroupLoad(format!("row {g}: {why}")))?;
            table.extend_from_slice(row);
        }
        for h in 0..n {
            let col: Vec<usize> = (0..n).map(|g| table[g * n + h]).collect();
            check_permutation(&col, n)
                .map_err(|why| Error::GroupLoad(format!("column {h}: {why}")))?;
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e * n + g] == g && table[g * n + e] == g))
            .ok_or_else(|| Error::GroupLoad("no identity element".into()))?;
        // Rows are permutations, so each g has exactly one right inverse.
        let mut inverses = vec![0; n];
        for (g, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..n).find(|&h| table[g * n + h] == identity).unwrap();
            if table[*inv * n + g] != identity {
                return Err(Error::GroupLoad(format!("element {g} has no two-sided inverse")));
            }
        }
        Ok(Self { order: n, table, identity, inverses, labels: None })
    }

    pub fn check_associative(&self) -> Result<()> {
        let n = self.order;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::GroupLoad(format!(
                            "associativity fails for triple ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Equality of multiplication tables, ignoring labels.
    pub fn same_table(&self, other: &FiniteGroup) -> bool {
        self.order == other.order && self.table == other.table
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order);
        self.labels = Some(labels);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverses
    }

    pub fn row(&self, a: usize) -> &[usize] {
        &self.table[a * self.order..(a + 1) * self.order]
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// `g^n` for any integer `n`.
    pub fn pow(&self, g: usize, n: i64) -> usize {
        let base = if n < 0 { self.inv(g) } else { g };
        let mut acc = self.identity;
        for _ in 0..n.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Smallest subgroup containing `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut set = BTreeSet::from([self.identity]);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// Center of the group.
    pub fn center(&self) -> BTreeSet<usize> {
        self.elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Rejects sets that are not closed under product and inverse, naming a
    /// violating pair.
    pub fn check_subgroup(&self, set: &BTreeSet<usize>) -> Result<()> {
        if let Some(&bad) = set.iter().find(|&&x| x >= self.order) {
            return Err(Error::NotSubgroup(format!("element {bad} out of range")));
        }
        if !set.contains(&self.identity) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in set {
            if !set.contains(&self.inv(a)) {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::NotSubgroup(format!(
                        "product of pair ({a}, {b}) = {} leaves the set",
                        self.mul(a, b)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_normal(&self, set: &BTreeSet<usize>) -> Result<()> {
        self.check_subgroup(set)?;
        for g in self.elements() {
            for &n in set {
                let c = self.mul(self.mul(g, n), self.inv(g));
                if !set.contains(&c) {
                    return Err(Error::NotNormal(format!(
                        "conjugate of {n} by {g} is {c}, outside the subgroup"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Plain-text Cayley file: order on the first line, then one row per element.
    pub fn to_cayley_text(&self) -> String {
        let mut out = format!("{}\n", self.order);
        for a in self.elements() {
            let row: Vec<String> = self.row(a).iter().map(|x| x.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_cayley_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::GroupLoad("empty file".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::GroupLoad(format!("bad order line {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| {
                        Error::GroupLoad(format!("row {i}: bad entry {t:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::GroupLoad(format!("expected {n} rows, found {}", rows.len())));
        }
        Self::from_table(rows)
    }

    pub fn read_cayley_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_cayley_text(&std::fs::read_to_string(path)?)
    }

    pub fn write_cayley_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_cayley_text())?;
        Ok(())
    }
}

fn check_permutation(row: &[usize], n: usize) -> std::result::Result<(), String> {
    let mut seen = vec![false; n];
    for &x in row {
        if x >= n {
            return Err(format!("entry {x} out of range"));
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(format!("entry {x} repeated"));
        }
    }
    Ok(())
}

/// Recipe for a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    /// ℤ/n; element `i` is the residue `i`.
    Cyclic(usize),
    /// Dihedral group of order 2n; element `i + n·j` is `r^i s^j`.
    Dihedral(usize),
    /// S_n; elements are permutations of `0..n` in lexicographic order of
    /// their image lists, composed as `(σ·τ)(i) = σ(τ(i))`.
    Symmetric(usize),
    CayleyFile(PathBuf),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Symmetric(n) => write!(f, "symmetric:{n}"),
            GroupSpec::CayleyFile(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Accepts `cyclic:5`, `dihedral:4`, `symmetric:3`, `file:path`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group spec {s:?} must look like kind:arg")))?;
        let num = || {
            arg.parse::<usize>()
                .map_err(|_| Error::Parse(format!("group spec {s:?}: bad size")))
        };
        match kind {
            "cyclic" | "Z" => Ok(GroupSpec::Cyclic(num()?)),
            "dihedral" | "D" => Ok(GroupSpec::Dihedral(num()?)),
            "symmetric" | "S" => Ok(GroupSpec::Symmetric(num()?)),
            "file" => Ok(GroupSpec::CayleyFile(PathBuf::from(arg))),
            _ => Err(Error::Parse(format!("unknown group family {kind:?}"))),
        }
    }
}

pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    match *spec {
        GroupSpec::Cyclic(n) => cyclic(n),
        GroupSpec::Dihedral(n) => dihedral(n),
        GroupSpec::Symmetric(n) => symmetric(n),
        GroupSpec::CayleyFile(ref path) => FiniteGroup::read_cayley_file(path),
    }
}

pub fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Usage("cyclic group needs n >= 1".into()));
    }
    let rows = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let labels = (0..n).map(|i| i.to_string()).collect();
    Ok(FiniteGroup::from_rows_unchecked_assoc(rows)?.with_labels(labels))
}

pub fn dihedral(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Usage("dihedral group needs n >= 1".into()));
    }
    let idx = |i: usize, j: usize| i % n + n * (j % 2);
    let mut rows = Vec::with_capacity(2 * n);
    for x in 0..2 * n {
        let (i, j) = (x % n, x / n);
        let row = (0..2 * n)
            .map(|y| {
                let (k, l) = (y % n, y / n);
                // r^i s^j r^k s^l = r^(i ± k) s^(j + l)
                let rot = if j == 0 { i + k } else { i + n - k };
                idx(rot, j + l)
            })
            .collect();
        rows.push(row);
    }
    let labels = (0..2 * n)
        .map(|x| {
            let (i, j) = (x % n, x / n);
            match (i, j) {
                (0, 0) => "e".to_string(),
                (i, 0) => format!("r{i}"),
                (0, _) => "s".to_string(),
                (i, _) => format!("r{i}s"),
            }
        })
        .collect();
    Ok(FiniteGroup::from_rows_unchecked_assoc(rows)?.with_labels(labels))
}

pub fn symmetric(n: usize) -> Result<FiniteGroup> {
    if n == 0 || n > MAX_SYMMETRIC_DEGREE {
        return Err(Error::Usage(format!(
            "symmetric group degree must be in 1..={MAX_SYMMETRIC_DEGREE}, got {n}"
        )));
    }
    let perms = permutations_lex(n);
    let index: std::collections::HashMap<&[usize], usize> =
        perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let rows = perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| {
                    let st: Vec<usize> = t.iter().map(|&i| s[i]).collect();
                    index[st.as_slice()]
                })
                .collect()
        })
        .collect();
    let labels = perms
        .iter()
        .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
        .collect();
    Ok(FiniteGroup::from_rows_unchecked_assoc(rows)?.with_labels(labels))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations_lex(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

#[derive(Debug, Clone)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<usize>,
}

impl GroupHom {
    /// Checks the homomorphism law on all pairs.
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::Usage("homomorphism table has wrong length".into()));
        }
        if map.iter().any(|&x| x >= target.order()) {
            return Err(Error::Usage("homomorphism table points outside the target".into()));
        }
        if map[source.identity()] != target.identity() {
            return Err(Error::Usage("identity is not mapped to identity".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(Error::Usage(format!("map is not multiplicative at pair ({a}, {b})")));
                }
            }
        }
        Ok(Self { source, target, map })
    }

    pub fn identity_on(group: Arc<FiniteGroup>) -> Self {
        let map = group.elements().collect();
        Self { source: group.clone(), target: group, map }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.order()];
        for &x in &self.map {
            hit[x] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn kernel(&self) -> BTreeSet<usize> {
        self.source
            .elements()
            .filter(|&g| self.map[g] == self.target.identity())
            .collect()
    }
}

/// Representatives and retraction for the cosets `Λγ` of a subgroup `Λ`.
#[derive(Debug, Clone)]
pub struct CosetSystem {
    group: Arc<FiniteGroup>,
    subgroup: Vec<usize>,
    /// The subgroup as a group in its own right; element `i` is `subgroup[i]`.
    subgroup_group: Arc<FiniteGroup>,
    in_subgroup: Vec<bool>,
    reps: Vec<usize>,
    retract: Vec<usize>,
    /// Position of `retract[g]` within `reps`.
    coset_of: Vec<usize>,
}

impl CosetSystem {
    pub fn new(group: Arc<FiniteGroup>, subgroup: &BTreeSet<usize>) -> Result<Self> {
        group.check_subgroup(subgroup)?;
        let n = group.order();
        let mut retract = vec![usize::MAX; n];
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        // The identity coset is listed first and represented by the identity.
        let mut seeds: Vec<usize> = vec![group.identity()];
        seeds.extend(group.elements().filter(|&g| g != group.identity()));
        for g in seeds {
            if retract[g] != usize::MAX {
                continue;
            }
            let coset: Vec<usize> = subgroup.iter().map(|&l| group.mul(l, g)).collect();
            let rep = if g == group.identity() { g } else { *coset.iter().min().unwrap() };
            for &c in &coset {
                retract[c] = rep;
                coset_of[c] = reps.len();
            }
            reps.push(rep);
        }
        let mut in_subgroup = vec![false; n];
        for &l in subgroup {
            in_subgroup[l] = true;
        }
        let elems: Vec<usize> = subgroup.iter().copied().collect();
        let subgroup_group = Arc::new(restrict(&group, &elems)?);
        Ok(Self {
            group,
            subgroup: elems,
            subgroup_group,
            in_subgroup,
            reps,
            retract,
            coset_of,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Subgroup elements in increasing index order.
    pub fn subgroup(&self) -> &[usize] {
        &self.subgroup
    }

    pub fn subgroup_group(&self) -> &Arc<FiniteGroup> {
        &self.subgroup_group
    }

    pub fn contains(&self, g: usize) -> bool {
        self.in_subgroup[g]
    }

    pub fn reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    #[inline]
    pub fn retract(&self, g: usize) -> usize {
        self.retract[g]
    }

    /// Position in [`reps`](Self::reps) of the representative of `Λg`.
    #[inline]
    pub fn coset_index(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// `x·γ·r(xγ)⁻¹`, which lies in the subgroup.
    #[inline]
    pub fn cocycle(&self, x: usize, gamma: usize) -> usize {
        let g = &self.group;
        let xg = g.mul(x, gamma);
        g.mul(xg, g.inv(self.retract[xg]))
    }

    /// Position of an element within [`subgroup`](Self::subgroup).
    pub fn subgroup_position(&self, l: usize) -> Option<usize> {
        self.subgroup.binary_search(&l).ok()
    }
}

/// A subgroup (sorted element list, already checked closed) as a standalone
/// group; element `i` is `elems[i]`.
pub fn restrict(group: &FiniteGroup, elems: &[usize]) -> Result<FiniteGroup> {
    let pos = |g: usize| elems.binary_search(&g).expect("subgroup is closed");
    let rows = elems
        .iter()
        .map(|&a| elems.iter().map(|&b| pos(group.mul(a, b))).collect())
        .collect();
    let labels = elems.iter().map(|&g| group.label(g)).collect();
    Ok(FiniteGroup::from_rows_unchecked_assoc(rows)?.with_labels(labels))
}

/// Quotient by a normal subgroup.
///
/// Cosets are numbered in increasing order of their smallest element, so the
/// identity coset comes first whenever the identity has index 0.
pub fn quotient(group: &Arc<FiniteGroup>, normal: &BTreeSet<usize>) -> Result<(Arc<FiniteGroup>, GroupHom)> {
    group.check_normal(normal)?;
    let n = group.order();
    let mut class = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for g in group.elements() {
        if class[g] != usize::MAX {
            continue;
        }
        for &k in normal {
            class[group.mul(g, k)] = reps.len();
        }
        reps.push(g);
    }
    let rows = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| class[group.mul(a, b)]).collect())
        .collect();
    let labels = reps.iter().map(|&r| format!("[{}]", group.label(r))).collect();
    let q = Arc::new(FiniteGroup::from_rows_unchecked_assoc(rows)?.with_labels(labels));
    let hom = GroupHom { source: group.clone(), target: q.clone(), map: class };
    Ok((q, hom))
}
