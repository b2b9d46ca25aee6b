//! Structural analysis: the nucleus, Moufang center, commutant, center and
//! M-set, subalgebra generation, NK-loop decomposition, congruences and
//! quotients, regular permutation pairs and the congruence they induce.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::laws::{self, LawId};
use crate::perm::Permutation;
use crate::table::{CayleyTable, FiniteLoop, Side};

/// Orders above this are refused by the simplicity test.
pub const SIMPLE_CAP: usize = 64;

/// Orders above this are refused by the isomorphism search.
pub const ISO_CAP: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(&'static str),
    #[error("element {0} has no decomposition as nucleus + Moufang center")]
    NotNK(usize),
    #[error("subset is not a block of any congruence")]
    NotNormal,
    #[error("partition is not compatible with the quasigroup operations")]
    NotCongruence,
    #[error("table is not an F-quasigroup")]
    NotF,
    #[error("subset is not closed under the quasigroup operations")]
    NotClosed,
    #[error("closure would exceed the cap of {cap}")]
    SizeCapExceeded { cap: usize },
}

/// Least subset containing `gens` closed under `*`, `\\` and `/`, sorted.
pub fn generate_sub(q: &CayleyTable, gens: &[usize]) -> Vec<usize> {
    let n = q.order();
    let mut member = vec![false; n];
    let mut list: Vec<usize> = Vec::new();
    for &g in gens {
        if !member[g] {
            member[g] = true;
            list.push(g);
        }
    }
    let mut next = 0;
    while next < list.len() {
        let x = list[next];
        next += 1;
        for i in 0..list.len() {
            let y = list[i];
            for v in [
                q.mul(x, y),
                q.mul(y, x),
                q.ldiv(x, y),
                q.ldiv(y, x),
                q.rdiv(x, y),
                q.rdiv(y, x),
            ] {
                if !member[v] {
                    member[v] = true;
                    list.push(v);
                }
            }
        }
    }
    list.sort_unstable();
    list
}

pub fn is_closed(q: &CayleyTable, members: &[usize]) -> bool {
    let mut inside = vec![false; q.order()];
    for &m in members {
        inside[m] = true;
    }
    members.iter().all(|&x| {
        members
            .iter()
            .all(|&y| inside[q.mul(x, y)] && inside[q.ldiv(x, y)] && inside[q.rdiv(x, y)])
    })
}

/// Re-indexes a closed subset as a standalone table. Element `i` of the
/// result is `members[i]` of `q` (members sorted ascending).
pub fn subtable(q: &CayleyTable, members: &[usize]) -> Result<CayleyTable, StructureError> {
    let mut members: Vec<usize> = members.to_vec();
    members.sort_unstable();
    members.dedup();
    if !is_closed(q, &members) {
        return Err(StructureError::NotClosed);
    }
    let mut local = HashMap::new();
    for (i, &m) in members.iter().enumerate() {
        local.insert(m, i);
    }
    let m = members.len();
    let mut flat = Vec::with_capacity(m * m);
    for &x in &members {
        for &y in &members {
            flat.push(local[&q.mul(x, y)] as u16);
        }
    }
    CayleyTable::from_flat(m, flat).map_err(|_| StructureError::NotClosed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetKind {
    Nucleus,
    MoufangCenter,
    Commutant,
    Center,
    MSet,
}

/// A named structural subset together with its closure and normality status.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SubsetReport {
    pub kind: SubsetKind,
    pub members: Vec<usize>,
    pub is_subloop: bool,
    pub is_normal: Option<bool>,
}

fn finish_report(q: &CayleyTable, kind: SubsetKind, members: Vec<usize>) -> SubsetReport {
    let is_subloop = !members.is_empty() && is_closed(q, &members);
    let is_normal =
        if is_subloop { Some(congruence_from_subloop(q, &members).is_ok()) } else { None };
    SubsetReport { kind, members, is_subloop, is_normal }
}

/// Elements associating with all pairs in all three positions.
pub fn nucleus(l: &FiniteLoop) -> SubsetReport {
    let n = l.order();
    let mut members = Vec::new();
    'cand: for a in 0..n {
        for x in 0..n {
            for y in 0..n {
                if l.add(l.add(a, x), y) != l.add(a, l.add(x, y))
                    || l.add(l.add(x, a), y) != l.add(x, l.add(a, y))
                    || l.add(x, l.add(y, a)) != l.add(l.add(x, y), a)
                {
                    continue 'cand;
                }
            }
        }
        members.push(a);
    }
    finish_report(l.base(), SubsetKind::Nucleus, members)
}

/// Elements `a` with `(a+a)+(x+y) = (a+x)+(a+y)`. Both defining displays
/// are swept and must agree.
pub fn moufang_center(l: &FiniteLoop) -> Result<SubsetReport, StructureError> {
    let n = l.order();
    let in_k1 = |a: usize| {
        let aa = l.add(a, a);
        (0..n).all(|x| (0..n).all(|y| l.add(aa, l.add(x, y)) == l.add(l.add(a, x), l.add(a, y))))
    };
    let in_k2 = |a: usize| {
        let aa = l.add(a, a);
        (0..n).all(|x| (0..n).all(|y| l.add(l.add(x, y), aa) == l.add(l.add(x, a), l.add(y, a))))
    };
    let mut members = Vec::new();
    for a in 0..n {
        let (k1, k2) = (in_k1(a), in_k2(a));
        if k1 != k2 {
            return Err(StructureError::InternalInconsistency(
                "the two defining displays of the Moufang center disagree",
            ));
        }
        if k1 {
            members.push(a);
        }
    }
    Ok(finish_report(l.base(), SubsetKind::MoufangCenter, members))
}

/// Elements commuting with everything. Not necessarily a subloop.
pub fn commutant(l: &FiniteLoop) -> SubsetReport {
    let n = l.order();
    let members: Vec<usize> =
        (0..n).filter(|&a| (0..n).all(|x| l.add(a, x) == l.add(x, a))).collect();
    finish_report(l.base(), SubsetKind::Commutant, members)
}

/// `Z = N intersect C`, cross-checked against `N intersect K`.
pub fn center(l: &FiniteLoop) -> Result<SubsetReport, StructureError> {
    let n_set: BTreeSet<usize> = nucleus(l).members.into_iter().collect();
    let c_set: BTreeSet<usize> = commutant(l).members.into_iter().collect();
    let k_set: BTreeSet<usize> = moufang_center(l)?.members.into_iter().collect();
    let z1: Vec<usize> = n_set.intersection(&c_set).copied().collect();
    let z2: Vec<usize> = n_set.intersection(&k_set).copied().collect();
    if z1 != z2 {
        return Err(StructureError::InternalInconsistency(
            "N intersect C differs from N intersect K",
        ));
    }
    Ok(finish_report(l.base(), SubsetKind::Center, z1))
}

/// Elements `a` with `xa.yx = xy.ax` for all `x`, `y`.
pub fn m_set(q: &CayleyTable) -> SubsetReport {
    let n = q.order();
    let members: Vec<usize> = (0..n)
        .filter(|&a| {
            (0..n).all(|x| {
                (0..n).all(|y| {
                    q.mul(q.mul(x, a), q.mul(y, x)) == q.mul(q.mul(x, y), q.mul(a, x))
                })
            })
        })
        .collect();
    finish_report(q, SubsetKind::MSet, members)
}

/// Whether every element decomposes as `n + k` with `n` in the nucleus and
/// `k` in the Moufang center.
pub fn is_nk(l: &FiniteLoop) -> Result<bool, StructureError> {
    let nuc = nucleus(l).members;
    let k = moufang_center(l)?.members;
    let n = l.order();
    let mut covered = vec![false; n];
    for &a in &nuc {
        for &b in &k {
            covered[l.add(a, b)] = true;
        }
    }
    Ok(covered.iter().all(|&c| c))
}

/// The lexicographically least `(n, k)` with `x = n + k`.
pub fn nk_decompose(l: &FiniteLoop, x: usize) -> Result<(usize, usize), StructureError> {
    let nuc = nucleus(l).members;
    let kset: BTreeSet<usize> = moufang_center(l)?.members.into_iter().collect();
    for &a in &nuc {
        // n + k = x  =>  k = n \ x
        let b = l.ldiv(a, x);
        if kset.contains(&b) {
            return Ok((a, b));
        }
    }
    Err(StructureError::NotNK(x))
}

pub fn is_moufang(l: &FiniteLoop) -> bool {
    [LawId::Moufang1, LawId::Moufang2, LawId::Moufang3, LawId::Moufang4]
        .into_iter()
        .all(|law| laws::holds(l.base(), law))
}

/// The two sides of the NK characterization for a mapping `a`:
/// the identity `(x+A(x))+(y+z) = (x+y)+(A(x)+z)`, and
/// `Moufang and A(x) in K and -x+A(x) in N for all x`.
pub fn nk_char_holds(l: &FiniteLoop, a: &[usize]) -> Result<(bool, bool), StructureError> {
    let n = l.order();
    debug_assert_eq!(a.len(), n);
    let cond1 = (0..n).all(|x| {
        let xa = l.add(x, a[x]);
        (0..n).all(|y| {
            let xy = l.add(x, y);
            (0..n).all(|z| l.add(xa, l.add(y, z)) == l.add(xy, l.add(a[x], z)))
        })
    });
    let cond2 = if !is_moufang(l) {
        false
    } else {
        let kset: BTreeSet<usize> = moufang_center(l)?.members.into_iter().collect();
        let nset: BTreeSet<usize> = nucleus(l).members.into_iter().collect();
        (0..n).all(|x| kset.contains(&a[x]) && nset.contains(&l.add(l.neg(x), a[x])))
    };
    Ok((cond1, cond2))
}

/// The two identities of Pflugfelder's criterion and its structural side:
/// `Moufang and -x+A(x) in N for all x`.
pub fn pflug_char(l: &FiniteLoop, a: &[usize]) -> (bool, bool, bool) {
    let n = l.order();
    debug_assert_eq!(a.len(), n);
    let id1 = (0..n).all(|x| {
        (0..n).all(|y| {
            let xy = l.add(x, y);
            (0..n).all(|z| l.add(xy, l.add(z, a[x])) == l.add(x, l.add(l.add(y, z), a[x])))
        })
    });
    let id2 = (0..n).all(|x| {
        (0..n).all(|y| {
            let xy = l.add(x, y);
            (0..n).all(|z| l.add(xy, l.add(z, a[x])) == l.add(l.add(x, l.add(y, z)), a[x]))
        })
    });
    let cond3 = is_moufang(l) && {
        let nset: BTreeSet<usize> = nucleus(l).members.into_iter().collect();
        (0..n).all(|x| nset.contains(&l.add(l.neg(x), a[x])))
    };
    (id1, id2, cond3)
}

/// A partition of the carrier compatible with `*`, `\\` and `/`.
///
/// Blocks are listed in order of their least element and each block is
/// sorted, so two equal congruences compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Congruence {
    pub block_of: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl Congruence {
    /// Normalizes an arbitrary block assignment into canonical form.
    pub fn from_assignment(assignment: &[usize]) -> Congruence {
        let n = assignment.len();
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut block_of = vec![0usize; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let id = *relabel.entry(assignment[x]).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            block_of[x] = id;
            blocks[id].push(x);
        }
        Congruence { block_of, blocks }
    }

    pub fn identity(n: usize) -> Congruence {
        Congruence::from_assignment(&(0..n).collect::<Vec<_>>())
    }

    pub fn universal(n: usize) -> Congruence {
        Congruence::from_assignment(&vec![0; n])
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn is_universal(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Full compatibility check against the three quasigroup operations.
    pub fn is_congruence_of(&self, q: &CayleyTable) -> bool {
        let n = q.order();
        if self.block_of.len() != n {
            return false;
        }
        let b = &self.block_of;
        for block in &self.blocks {
            let x0 = block[0];
            for &x in &block[1..] {
                for z in 0..n {
                    if b[q.mul(x, z)] != b[q.mul(x0, z)]
                        || b[q.mul(z, x)] != b[q.mul(z, x0)]
                        || b[q.ldiv(x, z)] != b[q.ldiv(x0, z)]
                        || b[q.ldiv(z, x)] != b[q.ldiv(z, x0)]
                        || b[q.rdiv(x, z)] != b[q.rdiv(x0, z)]
                        || b[q.rdiv(z, x)] != b[q.rdiv(z, x0)]
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Returns true when the classes were distinct.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

/// Pair-closure under the six translation-compatibility rules: the least
/// congruence containing all the seed pairs.
fn close_pairs(q: &CayleyTable, seeds: &[(usize, usize)]) -> Congruence {
    let n = q.order();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = Vec::new();
    for &(x, y) in seeds {
        if uf.union(x, y) {
            work.push((x, y));
        }
    }
    while let Some((x, y)) = work.pop() {
        for z in 0..n {
            for (u, v) in [
                (q.mul(x, z), q.mul(y, z)),
                (q.mul(z, x), q.mul(z, y)),
                (q.ldiv(x, z), q.ldiv(y, z)),
                (q.ldiv(z, x), q.ldiv(z, y)),
                (q.rdiv(x, z), q.rdiv(y, z)),
                (q.rdiv(z, x), q.rdiv(z, y)),
            ] {
                if uf.union(u, v) {
                    work.push((u, v));
                }
            }
        }
    }
    let assignment: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    Congruence::from_assignment(&assignment)
}

/// The least congruence identifying `x` and `y`.
pub fn principal_congruence(q: &CayleyTable, x: usize, y: usize) -> Congruence {
    close_pairs(q, &[(x, y)])
}

/// The least congruence having `members` as one block; fails if the pair
/// closure grows that block beyond `members`.
pub fn congruence_from_subloop(
    q: &CayleyTable,
    members: &[usize],
) -> Result<Congruence, StructureError> {
    if members.is_empty() {
        return Err(StructureError::NotNormal);
    }
    let seeds: Vec<(usize, usize)> = members[1..].iter().map(|&m| (members[0], m)).collect();
    let cong = close_pairs(q, &seeds);
    let want: BTreeSet<usize> = members.iter().copied().collect();
    let got: BTreeSet<usize> =
        cong.blocks[cong.block_of[members[0]]].iter().copied().collect();
    if want != got {
        return Err(StructureError::NotNormal);
    }
    Ok(cong)
}

/// The factor table on block ids; fails when the partition is incompatible.
pub fn quotient(q: &CayleyTable, c: &Congruence) -> Result<CayleyTable, StructureError> {
    let n = q.order();
    if c.block_of.len() != n {
        return Err(StructureError::NotCongruence);
    }
    let m = c.blocks.len();
    let mut flat = vec![0u16; m * m];
    for (bi, bx) in c.blocks.iter().enumerate() {
        for (bj, by) in c.blocks.iter().enumerate() {
            flat[bi * m + bj] = c.block_of[q.mul(bx[0], by[0])] as u16;
        }
    }
    // the representative products must be reproduced by every pair choice
    for x in 0..n {
        for y in 0..n {
            if c.block_of[q.mul(x, y)] as u16 != flat[c.block_of[x] * m + c.block_of[y]] {
                return Err(StructureError::NotCongruence);
            }
        }
    }
    CayleyTable::from_flat(m, flat).map_err(|_| StructureError::NotCongruence)
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum RegularFamily {
    A,
    B,
    C,
}

/// A pair `(p, q)` of one of the three regular families:
/// `A: p(xy) = q(x)y`, `B: p(xy) = x q(y)`, `C: p(x)y = x q(y)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RegularPair {
    pub family: RegularFamily,
    pub p: Permutation,
    pub q: Permutation,
}

impl RegularFamily {
    fn satisfied(self, t: &CayleyTable, p: &Permutation, q: &Permutation) -> bool {
        let n = t.order();
        match self {
            RegularFamily::A => (0..n)
                .all(|x| (0..n).all(|y| p.apply(t.mul(x, y)) == t.mul(q.apply(x), y))),
            RegularFamily::B => (0..n)
                .all(|x| (0..n).all(|y| p.apply(t.mul(x, y)) == t.mul(x, q.apply(y)))),
            RegularFamily::C => (0..n)
                .all(|x| (0..n).all(|y| t.mul(p.apply(x), y) == t.mul(x, q.apply(y)))),
        }
    }
}

/// All pairs of the given family, found by fixing the value of `q` (resp.
/// the determining image) at a base point, reconstructing both maps, and
/// verifying the defining identity exhaustively.
pub fn regular_pairs(t: &CayleyTable, family: RegularFamily) -> Vec<RegularPair> {
    let n = t.order();
    let base = 0usize;
    let mut out: Vec<RegularPair> = Vec::new();
    for v in 0..n {
        let (p, q) = match family {
            RegularFamily::A => {
                // q(base) = v determines p via p(base t) = v t, then q via q(x) = p(x*base)/base
                let p = Permutation::from_fn(n, |w| t.mul(v, t.ldiv(base, w)));
                let p = match p {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let q = Permutation::from_fn(n, |x| t.rdiv(p.apply(t.mul(x, base)), base));
                match q {
                    Ok(q) => (p, q),
                    Err(_) => continue,
                }
            }
            RegularFamily::B => {
                let p = Permutation::from_fn(n, |w| t.mul(t.rdiv(w, base), v));
                let p = match p {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let q = Permutation::from_fn(n, |y| t.ldiv(base, p.apply(t.mul(base, y))));
                match q {
                    Ok(q) => (p, q),
                    Err(_) => continue,
                }
            }
            RegularFamily::C => {
                // q(base) = v: p(x)*base = x*v
                let p = Permutation::from_fn(n, |x| t.rdiv(t.mul(x, v), base));
                let p = match p {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                let q = Permutation::from_fn(n, |y| t.ldiv(base, t.mul(p.apply(base), y)));
                match q {
                    Ok(q) => (p, q),
                    Err(_) => continue,
                }
            }
        };
        if family.satisfied(t, &p, &q) {
            out.push(RegularPair { family, p, q });
        }
    }
    out.sort();
    out.dedup();
    debug_assert!(pairs_closed_under_composition(t, family, &out));
    out
}

fn pairs_closed_under_composition(
    t: &CayleyTable,
    family: RegularFamily,
    pairs: &[RegularPair],
) -> bool {
    pairs.iter().all(|a| {
        pairs.iter().all(|b| {
            let comp = RegularPair {
                family,
                p: a.p.compose(&b.p),
                q: a.q.compose(&b.q),
            };
            family.satisfied(t, &comp.p, &comp.q) && pairs.binary_search(&comp).is_ok()
        })
    })
}

/// The congruence whose classes are the orbits of the regular permutations
/// (the left components of families A and B suffice). Requires an
/// F-quasigroup; the result is verified to be a congruence.
pub fn rho_congruence(t: &CayleyTable) -> Result<Congruence, StructureError> {
    if !laws::is_f_quasigroup(t) {
        return Err(StructureError::NotF);
    }
    let n = t.order();
    let mut uf = UnionFind::new(n);
    for family in [RegularFamily::A, RegularFamily::B] {
        for pair in regular_pairs(t, family) {
            for x in 0..n {
                uf.union(x, pair.p.apply(x));
            }
        }
    }
    let assignment: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    let cong = Congruence::from_assignment(&assignment);
    if !cong.is_congruence_of(t) {
        return Err(StructureError::InternalInconsistency(
            "regular-permutation orbits do not form a congruence",
        ));
    }
    Ok(cong)
}

/// Whether the F-quasigroup is linear over a group, decided by the three
/// equivalent four-variable identities (swept and checked for agreement).
pub fn is_fg(t: &CayleyTable) -> Result<bool, StructureError> {
    if !laws::is_f_quasigroup(t) {
        return Err(StructureError::NotF);
    }
    let n = t.order();
    let alphas: BTreeSet<usize> = (0..n).map(|x| t.alpha(x)).collect();
    let betas: BTreeSet<usize> = (0..n).map(|x| t.beta(x)).collect();
    let c4 = alphas.iter().all(|&a| {
        (0..n).all(|x| {
            let xa = t.mul(x, a);
            (0..n).all(|y| {
                let xy = t.mul(x, y);
                (0..n).all(|z| t.mul(xa, t.mul(y, z)) == t.mul(xy, t.mul(a, z)))
            })
        })
    });
    let c5 = betas.iter().all(|&b| {
        (0..n).all(|x| {
            let xb = t.mul(x, b);
            (0..n).all(|y| {
                let xy = t.mul(x, y);
                (0..n).all(|z| t.mul(xb, t.mul(y, z)) == t.mul(xy, t.mul(b, z)))
            })
        })
    });
    let c6 = alphas.iter().all(|&a| {
        betas.iter().all(|&b| {
            (0..n).all(|x| {
                let (xa, xb) = (t.mul(x, a), t.mul(x, b));
                (0..n).all(|z| t.mul(xa, t.mul(b, z)) == t.mul(xb, t.mul(a, z)))
            })
        })
    });
    if c4 != c5 || c5 != c6 {
        return Err(StructureError::InternalInconsistency(
            "the equivalent linearity-over-a-group conditions disagree",
        ));
    }
    Ok(c4)
}

/// Pointwise check that `map` carries products of `src` to products of `dst`.
pub fn is_homomorphism(src: &CayleyTable, dst: &CayleyTable, map: &[usize]) -> bool {
    let n = src.order();
    if map.len() != n || map.iter().any(|&v| v >= dst.order()) {
        return false;
    }
    (0..n).all(|x| (0..n).all(|y| map[src.mul(x, y)] == dst.mul(map[x], map[y])))
}

fn element_fingerprints(q: &CayleyTable) -> Vec<Vec<u32>> {
    let n = q.order();
    let mut alpha_pre = vec![0u32; n];
    let mut beta_pre = vec![0u32; n];
    for x in 0..n {
        alpha_pre[q.alpha(x)] += 1;
        beta_pre[q.beta(x)] += 1;
    }
    (0..n)
        .map(|x| {
            let mut f: Vec<u32> = Vec::with_capacity(8 + 2 * n);
            f.push((q.mul(x, x) == x) as u32);
            f.push((q.alpha(x) == x) as u32);
            f.push((q.beta(x) == x) as u32);
            f.push((0..n).filter(|&y| q.mul(x, y) == q.mul(y, x)).count() as u32);
            f.push(alpha_pre[x]);
            f.push(beta_pre[x]);
            // tail and cycle length of the squaring orbit
            let mut seen: HashMap<usize, u32> = HashMap::new();
            let mut cur = x;
            let mut step = 0u32;
            let (tail, cyc) = loop {
                if let Some(&at) = seen.get(&cur) {
                    break (at, step - at);
                }
                seen.insert(cur, step);
                cur = q.mul(cur, cur);
                step += 1;
            };
            f.push(tail);
            f.push(cyc);
            // cycle types of the two translations
            for side in [Side::Left, Side::Right] {
                let p = q.translation(x, side);
                let mut lens: Vec<u32> = Vec::new();
                let mut done = vec![false; n];
                for s in 0..n {
                    if done[s] {
                        continue;
                    }
                    let mut len = 0u32;
                    let mut c = s;
                    while !done[c] {
                        done[c] = true;
                        c = p.apply(c);
                        len += 1;
                    }
                    lens.push(len);
                }
                lens.sort_unstable();
                f.extend(lens);
            }
            f
        })
        .collect()
}

/// Exact backtracking isomorphism search with invariant pruning.
/// Returns a witness bijection with `w(x*y) = w(x)*w(y)`, or `None`.
pub fn is_isomorphic(
    q1: &CayleyTable,
    q2: &CayleyTable,
) -> Result<Option<Permutation>, StructureError> {
    let n = q1.order();
    if n != q2.order() {
        return Ok(None);
    }
    if n > ISO_CAP {
        return Err(StructureError::SizeCapExceeded { cap: ISO_CAP });
    }
    let f1 = element_fingerprints(q1);
    let f2 = element_fingerprints(q2);
    let mut sorted1 = f1.clone();
    let mut sorted2 = f2.clone();
    sorted1.sort();
    sorted2.sort();
    if sorted1 != sorted2 {
        return Ok(None);
    }
    // rarest fingerprints first
    let mut class_size: HashMap<&Vec<u32>, usize> = HashMap::new();
    for f in &f1 {
        *class_size.entry(f).or_insert(0) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (class_size[&f1[x]], x));

    let mut map = vec![usize::MAX; n];
    let mut inv = vec![usize::MAX; n];

    fn consistent(
        q1: &CayleyTable,
        q2: &CayleyTable,
        map: &[usize],
        inv: &[usize],
        x: usize,
    ) -> bool {
        let n = q1.order();
        for u in 0..n {
            if map[u] == usize::MAX {
                continue;
            }
            for (a, b) in [(u, x), (x, u)] {
                let p = q1.mul(a, b);
                let qv = q2.mul(map[a], map[b]);
                if map[p] != usize::MAX {
                    if map[p] != qv {
                        return false;
                    }
                } else if inv[qv] != usize::MAX {
                    return false;
                }
            }
        }
        true
    }

    fn rec(
        q1: &CayleyTable,
        q2: &CayleyTable,
        f1: &[Vec<u32>],
        f2: &[Vec<u32>],
        order: &[usize],
        depth: usize,
        map: &mut [usize],
        inv: &mut [usize],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let x = order[depth];
        for y in 0..q2.order() {
            if inv[y] != usize::MAX || f1[x] != f2[y] {
                continue;
            }
            map[x] = y;
            inv[y] = x;
            if consistent(q1, q2, map, inv, x)
                && rec(q1, q2, f1, f2, order, depth + 1, map, inv)
            {
                return true;
            }
            map[x] = usize::MAX;
            inv[y] = usize::MAX;
        }
        false
    }

    if rec(q1, q2, &f1, &f2, &order, 0, &mut map, &mut inv) {
        debug_assert!(is_homomorphism(q1, q2, &map));
        let w = Permutation::from_images(map)
            .expect("completed isomorphism search produces a bijection");
        Ok(Some(w))
    } else {
        Ok(None)
    }
}

/// Closure of all translations under composition, sorted.
pub fn multiplication_group(
    q: &CayleyTable,
    cap: usize,
) -> Result<Vec<Permutation>, StructureError> {
    let n = q.order();
    let mut gens: Vec<Permutation> = Vec::with_capacity(2 * n);
    for a in 0..n {
        gens.push(q.translation(a, Side::Left));
        gens.push(q.translation(a, Side::Right));
    }
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut frontier: Vec<Permutation> = vec![Permutation::identity(n)];
    seen.insert(frontier[0].clone());
    while let Some(p) = frontier.pop() {
        for g in &gens {
            let next = g.compose(&p);
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(StructureError::SizeCapExceeded { cap });
                }
                seen.insert(next.clone());
                frontier.push(next);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// True when the only congruences are the identity and the universal one,
/// decided by generating the principal congruence of every pair.
pub fn is_simple(q: &CayleyTable) -> Result<bool, StructureError> {
    let n = q.order();
    if n > SIMPLE_CAP {
        return Err(StructureError::SizeCapExceeded { cap: SIMPLE_CAP });
    }
    for x in 0..n {
        for y in x + 1..n {
            if !principal_congruence(q, x, y).is_universal() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: usize) -> CayleyTable {
        let rows: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        CayleyTable::from_rows(n, &rows).unwrap()
    }

    fn q5() -> CayleyTable {
        let rows: Vec<Vec<usize>> =
            (0..5).map(|x| (0..5).map(|y| (2 * x + 3 * y + 1) % 5).collect()).collect();
        CayleyTable::from_rows(5, &rows).unwrap()
    }

    #[test]
    fn generate_sub_of_group_identity() {
        assert_eq!(generate_sub(&cyclic(3), &[0]), vec![0]);
        assert_eq!(generate_sub(&cyclic(6), &[2]), vec![0, 2, 4]);
    }

    #[test]
    fn generate_sub_matches_brute_force_fixed_point() {
        let q = q5();
        let fast = generate_sub(&q, &[0]);
        // brute force: repeatedly apply all operations until stable
        let mut set: BTreeSet<usize> = [0].into();
        loop {
            let mut next = set.clone();
            for &x in &set {
                for &y in &set {
                    next.insert(q.mul(x, y));
                    next.insert(q.ldiv(x, y));
                    next.insert(q.rdiv(x, y));
                }
            }
            if next == set {
                break;
            }
            set = next;
        }
        assert_eq!(fast, set.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn nucleus_of_group_is_everything() {
        let l = FiniteLoop::from_table(cyclic(4)).unwrap();
        let rep = nucleus(&l);
        assert_eq!(rep.members, vec![0, 1, 2, 3]);
        assert!(rep.is_subloop);
        assert_eq!(rep.is_normal, Some(true));
    }

    #[test]
    fn center_of_abelian_group_is_everything() {
        let l = FiniteLoop::from_table(cyclic(5)).unwrap();
        assert_eq!(center(&l).unwrap().members, vec![0, 1, 2, 3, 4]);
        assert_eq!(moufang_center(&l).unwrap().members, vec![0, 1, 2, 3, 4]);
        assert_eq!(commutant(&l).members, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn m_set_of_q5_is_everything() {
        assert_eq!(m_set(&q5()).members, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn groups_are_nk() {
        let l = FiniteLoop::from_table(cyclic(6)).unwrap();
        assert!(is_nk(&l).unwrap());
        for x in 0..6 {
            let (a, b) = nk_decompose(&l, x).unwrap();
            assert_eq!(l.add(a, b), x);
        }
        // lexicographically least pair: nucleus member 0 works whenever
        // x itself is in the Moufang center, which here is everything
        assert_eq!(nk_decompose(&l, 3).unwrap(), (0, 3));
    }

    #[test]
    fn congruence_basics() {
        let q = cyclic(4);
        let all = congruence_from_subloop(&q, &[0, 1, 2, 3]).unwrap();
        assert!(all.is_universal());
        let id = congruence_from_subloop(&q, &[0]).unwrap();
        assert!(id.is_identity());
        let half = congruence_from_subloop(&q, &[0, 2]).unwrap();
        assert_eq!(half.blocks, vec![vec![0, 2], vec![1, 3]]);
        let quot = quotient(&q, &half).unwrap();
        assert_eq!(quot.order(), 2);
        assert!(is_isomorphic(&quot, &cyclic(2)).unwrap().is_some());
    }

    #[test]
    fn quotient_rejects_incompatible_partition() {
        let q = cyclic(4);
        let c = Congruence::from_assignment(&[0, 0, 1, 1]);
        assert_eq!(quotient(&q, &c), Err(StructureError::NotCongruence));
    }

    #[test]
    fn regular_pairs_of_group_are_translations() {
        let q = cyclic(3);
        let pairs = regular_pairs(&q, RegularFamily::A);
        assert_eq!(pairs.len(), 3);
        for pair in &pairs {
            assert_eq!(pair.p, pair.q);
        }
    }

    #[test]
    fn rho_of_medial_q5_is_universal() {
        assert!(rho_congruence(&q5()).unwrap().is_universal());
    }

    #[test]
    fn rho_requires_f() {
        // a non-F latin square: x*y = x+2y mod 4 is not even latin; build
        // a small non-F quasigroup by swapping two rows of Z4
        let rows = vec![
            vec![1, 0, 3, 2],
            vec![0, 1, 2, 3],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ];
        let q = CayleyTable::from_rows(4, &rows).unwrap();
        if !laws::is_f_quasigroup(&q) {
            assert_eq!(rho_congruence(&q), Err(StructureError::NotF));
        }
    }

    #[test]
    fn fg_basics() {
        assert!(is_fg(&cyclic(5)).unwrap());
        assert!(is_fg(&q5()).unwrap());
    }

    #[test]
    fn iso_distinguishes_z4_and_klein() {
        let klein = CayleyTable::from_rows(
            4,
            &[vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]],
        )
        .unwrap();
        assert!(is_isomorphic(&cyclic(4), &klein).unwrap().is_none());
        assert!(is_isomorphic(&klein, &klein).unwrap().is_some());
    }

    #[test]
    fn iso_finds_shift_witness() {
        // the q5 form loop x(+)y = x+y+1 with zero 4, against Z5
        let rows: Vec<Vec<usize>> =
            (0..5).map(|x| (0..5).map(|y| (x + y + 1) % 5).collect()).collect();
        let shifted = CayleyTable::from_rows(5, &rows).unwrap();
        let w = is_isomorphic(&shifted, &cyclic(5)).unwrap().unwrap();
        assert!(is_homomorphism(&shifted, &cyclic(5), &w.images()));
        assert_eq!(w.apply(4), 0);
    }

    #[test]
    fn mlt_sizes() {
        assert_eq!(multiplication_group(&cyclic(3), 1000).unwrap().len(), 3);
        assert_eq!(
            multiplication_group(&CayleyTable::from_rows(1, &[vec![0]]).unwrap(), 10)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn simplicity_of_small_groups() {
        assert!(is_simple(&cyclic(5)).unwrap());
        assert!(!is_simple(&cyclic(4)).unwrap());
    }
}
