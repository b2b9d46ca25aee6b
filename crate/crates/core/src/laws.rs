//! Decidable checkers for the named quasigroup and loop identities.
//!
//! Every law is decided by an exhaustive quantifier sweep in lexicographic
//! order with early exit, so the first counterexample reported is
//! deterministic. Large sweeps may be partitioned by the leading variable;
//! a final lexicographic min-reduce keeps the result independent of the
//! partitioning.

use rayon::prelude::*;

use crate::perm::Permutation;
use crate::structure::{self, generate_sub};
use crate::table::{CayleyTable, FiniteLoop, Side};

/// Default budget: number of law evaluations allowed per call.
pub const DEFAULT_WORK_CAP: u64 = 100_000_000;

/// Closure sizes above this are refused by the mapping-group computations.
pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

const PAR_THRESHOLD: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LawsError {
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("sweep needs {needed} law evaluations, cap is {cap}")]
    SizeCapExceeded { needed: u64, cap: u64 },
}

/// The identities of the registry, with their stable lowercase names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawId {
    FLeft,
    FRight,
    Moufang1,
    Moufang2,
    Moufang3,
    Moufang4,
    Medial,
    Distributive,
    Symmetric,
    Idempotent,
    Unipotent,
    Associative,
    Commutative,
}

impl LawId {
    pub const ALL: [LawId; 13] = [
        LawId::FLeft,
        LawId::FRight,
        LawId::Moufang1,
        LawId::Moufang2,
        LawId::Moufang3,
        LawId::Moufang4,
        LawId::Medial,
        LawId::Distributive,
        LawId::Symmetric,
        LawId::Idempotent,
        LawId::Unipotent,
        LawId::Associative,
        LawId::Commutative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawId::FLeft => "f_left",
            LawId::FRight => "f_right",
            LawId::Moufang1 => "moufang1",
            LawId::Moufang2 => "moufang2",
            LawId::Moufang3 => "moufang3",
            LawId::Moufang4 => "moufang4",
            LawId::Medial => "medial",
            LawId::Distributive => "distributive",
            LawId::Symmetric => "symmetric",
            LawId::Idempotent => "idempotent",
            LawId::Unipotent => "unipotent",
            LawId::Associative => "associative",
            LawId::Commutative => "commutative",
        }
    }

    pub fn parse(s: &str) -> Result<LawId, LawsError> {
        LawId::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| LawsError::UnknownLaw(s.to_string()))
    }

    /// Number of quantified variables.
    pub fn arity(self) -> usize {
        match self {
            LawId::Medial => 4,
            LawId::FLeft
            | LawId::FRight
            | LawId::Moufang1
            | LawId::Moufang2
            | LawId::Moufang3
            | LawId::Moufang4
            | LawId::Distributive
            | LawId::Associative => 3,
            LawId::Symmetric | LawId::Unipotent | LawId::Commutative => 2,
            LawId::Idempotent => 1,
        }
    }

    /// Evaluates the law at one assignment of its variables.
    pub fn eval_at(self, q: &CayleyTable, t: &[usize]) -> bool {
        debug_assert_eq!(t.len(), self.arity());
        match self {
            LawId::FLeft => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(x, q.mul(y, z)) == q.mul(q.mul(x, y), q.mul(q.alpha(x), z))
            }
            LawId::FRight => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(q.mul(z, y), x) == q.mul(q.mul(z, q.beta(x)), q.mul(y, x))
            }
            LawId::Moufang1 => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(x, q.mul(y, q.mul(x, z))) == q.mul(q.mul(q.mul(x, y), x), z)
            }
            LawId::Moufang2 => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(x, q.mul(q.mul(y, z), x)) == q.mul(q.mul(x, y), q.mul(z, x))
            }
            LawId::Moufang3 => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(q.mul(q.mul(z, x), y), x) == q.mul(z, q.mul(x, q.mul(y, x)))
            }
            LawId::Moufang4 => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(q.mul(x, q.mul(y, z)), x) == q.mul(q.mul(x, y), q.mul(z, x))
            }
            LawId::Medial => {
                let (x, a, b, y) = (t[0], t[1], t[2], t[3]);
                q.mul(q.mul(x, a), q.mul(b, y)) == q.mul(q.mul(x, b), q.mul(a, y))
            }
            LawId::Distributive => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(x, q.mul(y, z)) == q.mul(q.mul(x, y), q.mul(x, z))
                    && q.mul(q.mul(z, y), x) == q.mul(q.mul(z, x), q.mul(y, x))
            }
            LawId::Symmetric => {
                let (x, y) = (t[0], t[1]);
                q.mul(x, y) == q.mul(y, x) && q.mul(x, q.mul(x, y)) == y
            }
            LawId::Idempotent => q.mul(t[0], t[0]) == t[0],
            LawId::Unipotent => q.mul(t[0], t[0]) == q.mul(t[1], t[1]),
            LawId::Associative => {
                let (x, y, z) = (t[0], t[1], t[2]);
                q.mul(q.mul(x, y), z) == q.mul(x, q.mul(y, z))
            }
            LawId::Commutative => q.mul(t[0], t[1]) == q.mul(t[1], t[0]),
        }
    }
}

impl std::fmt::Display for LawId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a law sweep. When `holds` is false, `witness` is the
/// lexicographically first variable assignment violating the law.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LawReport {
    pub law: String,
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
}

impl LawReport {
    fn holds(law: impl Into<String>) -> Self {
        LawReport { law: law.into(), holds: true, witness: None }
    }

    fn fails(law: impl Into<String>, witness: Vec<usize>) -> Self {
        LawReport { law: law.into(), holds: false, witness: Some(witness) }
    }
}

fn first_witness_in(
    q: &CayleyTable,
    law: LawId,
    lead: usize,
    arity: usize,
) -> Option<Vec<usize>> {
    let n = q.order();
    let mut t = vec![0usize; arity];
    t[0] = lead;
    loop {
        if !law.eval_at(q, &t) {
            return Some(t);
        }
        // advance the tail t[1..] odometer-style
        let mut i = arity - 1;
        loop {
            if i == 0 {
                return None;
            }
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
            i -= 1;
        }
    }
}

fn sweep(q: &CayleyTable, law: LawId, cap: u64) -> Result<Option<Vec<usize>>, LawsError> {
    let n = q.order() as u64;
    let arity = law.arity();
    let total: u64 = n.checked_pow(arity as u32).unwrap_or(u64::MAX);
    if total > cap {
        return Err(LawsError::SizeCapExceeded { needed: total, cap });
    }
    if arity == 1 {
        let mut t = [0usize];
        for x in 0..q.order() {
            t[0] = x;
            if !law.eval_at(q, &t) {
                return Ok(Some(vec![x]));
            }
        }
        return Ok(None);
    }
    if total >= PAR_THRESHOLD {
        // partition by leading variable; min-reduce keeps the first witness
        let witness = (0..q.order())
            .into_par_iter()
            .filter_map(|lead| first_witness_in(q, law, lead, arity))
            .min();
        return Ok(witness);
    }
    for lead in 0..q.order() {
        if let Some(w) = first_witness_in(q, law, lead, arity) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

pub fn check_law(q: &CayleyTable, law: LawId) -> Result<LawReport, LawsError> {
    check_law_capped(q, law, DEFAULT_WORK_CAP)
}

pub fn check_law_capped(q: &CayleyTable, law: LawId, cap: u64) -> Result<LawReport, LawsError> {
    let report = match sweep(q, law, cap)? {
        None => LawReport::holds(law.name()),
        Some(w) => {
            debug_assert!(!law.eval_at(q, &w));
            LawReport::fails(law.name(), w)
        }
    };
    Ok(report)
}

/// Parses a law name and checks it; `UnknownLaw` for names outside the registry.
pub fn check_law_by_name(q: &CayleyTable, name: &str) -> Result<LawReport, LawsError> {
    check_law(q, LawId::parse(name)?)
}

pub fn holds(q: &CayleyTable, law: LawId) -> bool {
    check_law(q, law).map(|r| r.holds).unwrap_or(false)
}

pub fn is_f_quasigroup(q: &CayleyTable) -> bool {
    holds(q, LawId::FLeft) && holds(q, LawId::FRight)
}

fn k_medial_name(k: usize) -> &'static str {
    match k {
        1 => "monomedial",
        2 => "dimedial",
        _ => "trimedial",
    }
}

/// Whether every (at most) `k`-generated subquasigroup is medial, `k <= 3`.
///
/// For verified F-quasigroups with `k >= 2` this reduces to the O(n^2)
/// identity `xx.yx = xy.xx`; a failing pair `(x, y)` yields the medial
/// counterexample `(x, x, y, x)` inside the subquasigroup generated by
/// `{x, y}`. The reduction itself is exercised against
/// [`k_medial_exhaustive`] in the test suites rather than assumed.
pub fn k_medial(q: &CayleyTable, k: usize) -> Result<LawReport, LawsError> {
    k_medial_capped(q, k, DEFAULT_WORK_CAP)
}

pub fn k_medial_capped(q: &CayleyTable, k: usize, cap: u64) -> Result<LawReport, LawsError> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    if !is_f_quasigroup(q) {
        return k_medial_exhaustive(q, k, cap);
    }
    let n = q.order();
    let name = k_medial_name(k);
    for x in 0..n {
        for y in 0..n {
            let xx = q.mul(x, x);
            if q.mul(xx, q.mul(y, x)) != q.mul(q.mul(x, y), xx) {
                if k == 1 {
                    // the failing pair only rules out dimediality
                    return k_medial_exhaustive(q, k, cap);
                }
                let w = vec![x, x, y, x];
                debug_assert!(!LawId::Medial.eval_at(q, &w));
                return Ok(LawReport::fails(name, w));
            }
        }
    }
    Ok(LawReport::holds(name))
}

/// Direct definition of `k`-mediality: generate every subquasigroup on at
/// most `k` generators and sweep the medial law inside it.
pub fn k_medial_exhaustive(q: &CayleyTable, k: usize, cap: u64) -> Result<LawReport, LawsError> {
    assert!((1..=3).contains(&k), "k must be 1, 2 or 3");
    let n = q.order();
    let name = k_medial_name(k);
    let mut work: u64 = 0;
    let mut gens: Vec<usize> = Vec::with_capacity(k);
    let mut stack: Vec<usize> = vec![0];
    // iterate subsets of size 1..=k in lexicographic order
    while let Some(&g) = stack.last() {
        if g < n {
            gens = stack.clone();
            let members = generate_sub(q, &gens);
            let m = members.len() as u64;
            work = work.saturating_add(m * m * m * m);
            if work > cap {
                return Err(LawsError::SizeCapExceeded { needed: work, cap });
            }
            for &x in &members {
                for &a in &members {
                    for &b in &members {
                        for &y in &members {
                            let w = [x, a, b, y];
                            if !LawId::Medial.eval_at(q, &w) {
                                return Ok(LawReport::fails(name, w.to_vec()));
                            }
                        }
                    }
                }
            }
            if stack.len() < k {
                stack.push(g + 1);
            } else {
                *stack.last_mut().unwrap() += 1;
            }
        } else {
            stack.pop();
            if let Some(last) = stack.last_mut() {
                *last += 1;
            }
        }
    }
    let _ = gens;
    Ok(LawReport::holds(name))
}

/// The stabilizer of the neutral element inside the multiplication group.
pub fn inner_mappings(l: &FiniteLoop) -> Result<Vec<Permutation>, LawsError> {
    inner_mappings_capped(l, DEFAULT_CLOSURE_CAP)
}

pub fn inner_mappings_capped(l: &FiniteLoop, cap: usize) -> Result<Vec<Permutation>, LawsError> {
    let mlt = structure::multiplication_group(l.base(), cap)
        .map_err(|_| LawsError::SizeCapExceeded { needed: cap as u64 + 1, cap: cap as u64 })?;
    let zero = l.zero();
    Ok(mlt.into_iter().filter(|p| p.apply(zero) == zero).collect())
}

pub fn is_loop_automorphism(l: &FiniteLoop, f: &Permutation) -> bool {
    let n = l.order();
    if f.degree() != n {
        return false;
    }
    (0..n).all(|x| (0..n).all(|y| f.apply(l.add(x, y)) == l.add(f.apply(x), f.apply(y))))
}

/// Whether every inner mapping is a loop automorphism.
pub fn is_a_loop(l: &FiniteLoop) -> Result<LawReport, LawsError> {
    is_a_loop_capped(l, DEFAULT_CLOSURE_CAP)
}

pub fn is_a_loop_capped(l: &FiniteLoop, cap: usize) -> Result<LawReport, LawsError> {
    let inner = inner_mappings_capped(l, cap)?;
    let n = l.order();
    for f in &inner {
        for x in 0..n {
            for y in 0..n {
                if f.apply(l.add(x, y)) != l.add(f.apply(x), f.apply(y)) {
                    return Ok(LawReport::fails("a_loop", vec![x, y]));
                }
            }
        }
    }
    Ok(LawReport::holds("a_loop"))
}

/// `c + f(x+y) = (c + f(x)) + f(y)` (left) or `f(x+y) + c = f(x) + (f(y) + c)` (right).
pub fn is_pseudoautomorphism(l: &FiniteLoop, f: &Permutation, c: usize, side: Side) -> bool {
    let n = l.order();
    if f.degree() != n {
        return false;
    }
    match side {
        Side::Left => (0..n).all(|x| {
            (0..n).all(|y| {
                l.add(c, f.apply(l.add(x, y))) == l.add(l.add(c, f.apply(x)), f.apply(y))
            })
        }),
        Side::Right => (0..n).all(|x| {
            (0..n).all(|y| {
                l.add(f.apply(l.add(x, y)), c) == l.add(f.apply(x), l.add(f.apply(y), c))
            })
        }),
    }
}

/// Whether every two-generated subloop is a group.
pub fn is_diassociative(l: &FiniteLoop) -> Result<LawReport, LawsError> {
    is_diassociative_capped(l, DEFAULT_WORK_CAP)
}

pub fn is_diassociative_capped(l: &FiniteLoop, cap: u64) -> Result<LawReport, LawsError> {
    let n = l.order();
    let q = l.base();
    let mut work: u64 = 0;
    for x in 0..n {
        for y in 0..n {
            let members = generate_sub(q, &[x, y]);
            let m = members.len() as u64;
            work = work.saturating_add(m * m * m);
            if work > cap {
                return Err(LawsError::SizeCapExceeded { needed: work, cap });
            }
            for &a in &members {
                for &b in &members {
                    for &c in &members {
                        if q.mul(q.mul(a, b), c) != q.mul(a, q.mul(b, c)) {
                            return Ok(LawReport::fails("diassociative", vec![a, b, c]));
                        }
                    }
                }
            }
        }
    }
    Ok(LawReport::holds("diassociative"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::CayleyTable;

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
    fn law_names_roundtrip() {
        for law in LawId::ALL {
            assert_eq!(LawId::parse(law.name()).unwrap(), law);
        }
        assert!(matches!(LawId::parse("frobnicate"), Err(LawsError::UnknownLaw(_))));
    }

    #[test]
    fn groups_are_f_quasigroups() {
        let z6 = cyclic(6);
        assert!(check_law(&z6, LawId::FLeft).unwrap().holds);
        assert!(check_law(&z6, LawId::FRight).unwrap().holds);
        assert!(check_law(&z6, LawId::Associative).unwrap().holds);
    }

    #[test]
    fn q5_is_medial_and_unipotent() {
        let q = q5();
        assert!(check_law(&q, LawId::Medial).unwrap().holds);
        assert!(check_law(&q, LawId::Unipotent).unwrap().holds);
        assert!(check_law(&q, LawId::FLeft).unwrap().holds);
        assert!(check_law(&q, LawId::FRight).unwrap().holds);
        assert!(!check_law(&q, LawId::Associative).unwrap().holds);
        assert!(!check_law(&q, LawId::Idempotent).unwrap().holds);
    }

    #[test]
    fn witness_is_first_and_refails() {
        let q = q5();
        let rep = check_law(&q, LawId::Commutative).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        // 0*1 = 4 and 1*0 = 3, so (0, 1) is the lexicographic first failure
        assert_eq!(w, vec![0, 1]);
        assert!(!LawId::Commutative.eval_at(&q, &w));
    }

    #[test]
    fn cap_is_enforced() {
        let q = q5();
        let err = check_law_capped(&q, LawId::Medial, 100).unwrap_err();
        assert!(matches!(err, LawsError::SizeCapExceeded { .. }));
    }

    #[test]
    fn k_medial_on_medial_table_holds() {
        let q = q5();
        for k in 1..=3 {
            assert!(k_medial(&q, k).unwrap().holds);
            assert!(k_medial_exhaustive(&q, k, DEFAULT_WORK_CAP).unwrap().holds);
        }
    }

    #[test]
    fn inner_mappings_of_abelian_group_are_trivial() {
        let l = FiniteLoop::from_table(cyclic(3)).unwrap();
        let inner = inner_mappings(&l).unwrap();
        assert_eq!(inner.len(), 1);
        assert!(inner[0].is_identity());
    }

    #[test]
    fn groups_are_a_loops() {
        let l = FiniteLoop::from_table(cyclic(4)).unwrap();
        assert!(is_a_loop(&l).unwrap().holds);
        assert!(is_diassociative(&l).unwrap().holds);
    }

    #[test]
    fn identity_is_pseudoautomorphism_with_zero_companion() {
        let l = FiniteLoop::from_table(cyclic(5)).unwrap();
        let id = Permutation::identity(5);
        assert!(is_pseudoautomorphism(&l, &id, l.zero(), Side::Left));
        assert!(is_pseudoautomorphism(&l, &id, l.zero(), Side::Right));
    }
}
