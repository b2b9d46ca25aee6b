//! Loop isotopes of F-quasigroups and their arithmetic forms.
//!
//! An arithmetic form packages an NK-loop `(Q,+)` with commuting
//! automorphisms `f, g` and a nuclear constant `e` so that the quasigroup
//! product is recovered as `x*y = f(x) + e + g(y)`; the form is *strong*
//! when `e` is central. [`form_at`] extracts a strong form from an
//! F-quasigroup at a chosen basepoint, [`psi`] rebuilds the quasigroup
//! from a form, and [`phi`] produces the unique form whose loop has a
//! prescribed neutral element.

use crate::laws;
use crate::perm::Permutation;
use crate::structure::{self, StructureError};
use crate::table::{CayleyTable, FiniteLoop, Side};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormsError {
    #[error("table is not an F-quasigroup")]
    NotF,
    #[error("form fails its axioms (first failure: {0})")]
    InvalidForm(String),
    #[error("operation requires a strong form (central e)")]
    NotStrongInput,
    #[error("bad shift: {0}")]
    BadShift(&'static str),
    #[error("internal assertion failed: {0}")]
    InternalAssertionFailed(&'static str),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `(Q, +, f, g, e)` with a claimed strongness flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticForm {
    pub base: FiniteLoop,
    pub f: Permutation,
    pub g: Permutation,
    pub e: usize,
    pub strong: bool,
}

/// The intermediate data of the form extraction: basepoint `r`, local
/// units `a`, `b`, translations `h = R_a`, `k = L_b`, their images of the
/// loop zero `c`, `d`, and the companion maps `p = hk.alpha.h^-1`,
/// `q = kh.beta.k^-1` (plain maps; alpha and beta need not be injective).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormTrace {
    pub r: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub h: Permutation,
    pub k: Permutation,
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

/// A table with a distinguished element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedTable {
    pub table: CayleyTable,
    pub point: usize,
}

/// One axiom of the form definition, checked independently.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AxiomCheck {
    pub axiom: &'static str,
    pub holds: bool,
    pub witness: Option<Vec<usize>>,
}

/// Per-axiom verification outcome.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FormReport {
    pub checks: Vec<AxiomCheck>,
}

impl FormReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.holds)
    }
}

/// The loop `x + y = (x/a)(b\y)` with neutral element `ba`.
pub fn principal_isotope(q: &CayleyTable, a: usize, b: usize) -> FiniteLoop {
    let n = q.order();
    let mut flat = Vec::with_capacity(n * n);
    for x in 0..n {
        let xa = q.rdiv(x, a);
        for y in 0..n {
            flat.push(q.mul(xa, q.ldiv(b, y)) as u16);
        }
    }
    let table = CayleyTable::from_flat(n, flat).expect("principal isotopes are Latin");
    FiniteLoop::new(table, q.mul(b, a)).expect("ba is neutral in a principal isotope")
}

fn automorphism_witness(l: &FiniteLoop, f: &Permutation) -> Option<Vec<usize>> {
    let n = l.order();
    for x in 0..n {
        for y in 0..n {
            if f.apply(l.add(x, y)) != l.add(f.apply(x), f.apply(y)) {
                return Some(vec![x, y]);
            }
        }
    }
    None
}

/// Checks the form axioms one by one. Axiom 7 (`e` central) is only
/// demanded when `strong` is set; for strong forms the two product
/// orderings `f(x)+e+g(y)` and `f(x)+g(y)+e` are also compared.
pub fn verify_form(form: &ArithmeticForm, strong: bool) -> Result<FormReport, FormsError> {
    let l = &form.base;
    let n = l.order();
    let mut checks = Vec::new();

    let nuc: Vec<bool> = {
        let members = structure::nucleus(l).members;
        let mut v = vec![false; n];
        for m in members {
            v[m] = true;
        }
        v
    };
    let kset: Vec<bool> = {
        let members = structure::moufang_center(l)?.members;
        let mut v = vec![false; n];
        for m in members {
            v[m] = true;
        }
        v
    };
    let zset: Vec<bool> = {
        let members = structure::center(l)?.members;
        let mut v = vec![false; n];
        for m in members {
            v[m] = true;
        }
        v
    };

    // 1: the loop is an NK-loop
    let nk_witness = (0..n)
        .find(|&x| !(0..n).any(|a| nuc[a] && kset[l.ldiv(a, x)]))
        .map(|x| vec![x]);
    checks.push(AxiomCheck { axiom: "loop_is_nk", holds: nk_witness.is_none(), witness: nk_witness });

    // 2: f, g are commuting automorphisms
    let w2 = automorphism_witness(l, &form.f)
        .or_else(|| automorphism_witness(l, &form.g))
        .or_else(|| {
            (0..n)
                .find(|&x| form.f.apply(form.g.apply(x)) != form.g.apply(form.f.apply(x)))
                .map(|x| vec![x])
        });
    checks.push(AxiomCheck {
        axiom: "commuting_automorphisms",
        holds: w2.is_none(),
        witness: w2,
    });

    // 3: x + f(x) and x + g(x) are nuclear
    let w3 = (0..n)
        .find(|&x| !nuc[l.add(x, form.f.apply(x))] || !nuc[l.add(x, form.g.apply(x))])
        .map(|x| vec![x]);
    checks.push(AxiomCheck { axiom: "x_plus_fx_in_nucleus", holds: w3.is_none(), witness: w3 });

    // 4: -x + f(x) and -x + g(x) lie in the Moufang center
    let w4 = (0..n)
        .find(|&x| {
            let m = l.neg(x);
            !kset[l.add(m, form.f.apply(x))] || !kset[l.add(m, form.g.apply(x))]
        })
        .map(|x| vec![x]);
    checks.push(AxiomCheck {
        axiom: "neg_x_plus_fx_in_moufang_center",
        holds: w4.is_none(),
        witness: w4,
    });

    // 5: e is nuclear
    let holds5 = form.e < n && nuc[form.e];
    checks.push(AxiomCheck {
        axiom: "e_in_nucleus",
        holds: holds5,
        witness: if holds5 { None } else { Some(vec![form.e]) },
    });

    // 6: the induced product is association-independent
    let w6 = (0..n)
        .find_map(|x| {
            let fx = form.f.apply(x);
            (0..n).find_map(|y| {
                let gy = form.g.apply(y);
                if l.add(l.add(fx, form.e), gy) != l.add(fx, l.add(form.e, gy)) {
                    Some(vec![x, y])
                } else {
                    None
                }
            })
        });
    checks.push(AxiomCheck {
        axiom: "reconstruction_association_free",
        holds: w6.is_none(),
        witness: w6,
    });

    if strong {
        // 7: e is central, and then placing e last gives the same product
        let mut w7 = if form.e < n && zset[form.e] { None } else { Some(vec![form.e]) };
        if w7.is_none() {
            w7 = (0..n).find_map(|x| {
                let fx = form.f.apply(x);
                (0..n).find_map(|y| {
                    let gy = form.g.apply(y);
                    if l.add(l.add(fx, form.e), gy) != l.add(l.add(fx, gy), form.e) {
                        Some(vec![x, y])
                    } else {
                        None
                    }
                })
            });
        }
        checks.push(AxiomCheck { axiom: "e_in_center", holds: w7.is_none(), witness: w7 });
    }

    Ok(FormReport { checks })
}

/// Extracts the strong arithmetic form of an F-quasigroup at basepoint `r`
/// via `a = alpha(r)`, `b = beta(r)`, `h = R_a`, `k = L_b`. All of the
/// conclusions of the extraction theorem are asserted before returning.
pub fn form_at(q: &CayleyTable, r: usize) -> Result<(ArithmeticForm, FormTrace), FormsError> {
    if !laws::is_f_quasigroup(q) {
        return Err(FormsError::NotF);
    }
    let n = q.order();
    let a = q.alpha(r);
    let b = q.beta(r);
    let h = q.translation(a, Side::Right);
    let k = q.translation(b, Side::Left);
    if h.compose(&k) != k.compose(&h) {
        return Err(FormsError::InternalAssertionFailed("R_a and L_b must commute"));
    }
    let lp = principal_isotope(q, a, b);
    let zero = lp.zero();
    debug_assert_eq!(zero, q.mul(b, a));

    let h_inv = h.inverse();
    let k_inv = k.inverse();
    let f = h.compose(&q.translation(q.beta(a), Side::Right)).compose(&h_inv);
    let g = k.compose(&q.translation(q.alpha(b), Side::Left)).compose(&k_inv);
    let p: Vec<usize> = (0..n).map(|x| h.apply(k.apply(q.alpha(h_inv.apply(x))))).collect();
    let pq: Vec<usize> = (0..n).map(|x| k.apply(h.apply(q.beta(k_inv.apply(x))))).collect();
    let c = h.apply(zero);
    let d = k.apply(zero);
    let e = q.mul(zero, zero);

    let form = ArithmeticForm { base: lp, f, g, e, strong: true };
    let trace = FormTrace { r, a, b, c, d, h, k, p, q: pq };

    // conclusions of the extraction theorem
    let report = verify_form(&form, true)?;
    if !report.passed() {
        return Err(FormsError::InternalAssertionFailed("extracted form fails its axioms"));
    }
    if form.base.add(c, d) != e {
        return Err(FormsError::InternalAssertionFailed("e must equal c + d"));
    }
    for x in 0..n {
        for y in 0..n {
            let fx = form.f.apply(x);
            let gy = form.g.apply(y);
            let prod = form.base.add(form.base.add(fx, e), gy);
            if q.mul(x, y) != prod
                || prod != form.base.add(form.base.add(fx, gy), e)
                || prod != form.base.add(fx, form.base.add(e, gy))
            {
                return Err(FormsError::InternalAssertionFailed(
                    "product is not recovered by f(x) + e + g(y)",
                ));
            }
        }
    }
    Ok((form, trace))
}

/// Rebuilds the pointed quasigroup `x*y = (f(x)+e)+g(y)` from a form.
pub fn psi(form: &ArithmeticForm) -> Result<PointedTable, FormsError> {
    let report = verify_form(form, false)?;
    if !report.passed() {
        let failing = report.first_failure().expect("unpassed report has a failure");
        return Err(FormsError::InvalidForm(failing.axiom.to_string()));
    }
    let l = &form.base;
    let n = l.order();
    let mut flat = Vec::with_capacity(n * n);
    for x in 0..n {
        let fe = l.add(form.f.apply(x), form.e);
        for y in 0..n {
            flat.push(l.add(fe, form.g.apply(y)) as u16);
        }
    }
    let table = CayleyTable::from_flat(n, flat)
        .map_err(|_| FormsError::InternalAssertionFailed("induced product is not Latin"))?;
    if !laws::is_f_quasigroup(&table) {
        return Err(FormsError::InternalAssertionFailed("induced product is not an F-quasigroup"));
    }
    // closed forms for the local units
    let f_inv = form.f.inverse();
    let g_inv = form.g.inverse();
    for x in 0..n {
        let t1 = l.neg(g_inv.apply(form.e));
        let t2 = l.neg(g_inv.apply(form.f.apply(x)));
        let t3 = g_inv.apply(x);
        let alpha_closed = l.add(l.add(t1, t2), t3);
        if alpha_closed != l.add(t1, l.add(t2, t3)) || alpha_closed != table.alpha(x) {
            return Err(FormsError::InternalAssertionFailed("alpha closed form mismatch"));
        }
        let beta_closed = l.add(
            l.sub(f_inv.apply(x), f_inv.apply(form.g.apply(x))),
            l.neg(f_inv.apply(form.e)),
        );
        if beta_closed != table.beta(x) {
            return Err(FormsError::InternalAssertionFailed("beta closed form mismatch"));
        }
    }
    Ok(PointedTable { table, point: l.zero() })
}

fn member_flags(members: &[usize], n: usize) -> Vec<bool> {
    let mut v = vec![false; n];
    for &m in members {
        v[m] = true;
    }
    v
}

/// Shift of a strong form by `a` in the Moufang center and `b` in the
/// nucleus: `tau(x) = (x+b)+a` transports the loop to `x*y = ((x-b)+y)-a`,
/// whose neutral element is `a+b`. The new constant is solved from the
/// reconstruction identity at the new zero and then verified globally.
/// The result is strong exactly when `b` is central.
pub fn basepoint_shift(
    form: &ArithmeticForm,
    a: usize,
    b: usize,
) -> Result<ArithmeticForm, FormsError> {
    let l = &form.base;
    let n = l.order();
    if !form.strong {
        return Err(FormsError::NotStrongInput);
    }
    let zset = member_flags(&structure::center(l)?.members, n);
    if !zset[form.e] {
        return Err(FormsError::NotStrongInput);
    }
    let kset = member_flags(&structure::moufang_center(l)?.members, n);
    let nset = member_flags(&structure::nucleus(l).members, n);
    if a >= n || !kset[a] {
        return Err(FormsError::BadShift("a must lie in the Moufang center"));
    }
    if b >= n || !nset[b] {
        return Err(FormsError::BadShift("b must lie in the nucleus"));
    }

    let tau = Permutation::from_fn(n, |x| l.add(l.add(x, b), a))
        .expect("translations compose to a bijection");
    let tau_inv = tau.inverse();
    let neg_b = l.neg(b);
    let neg_a = l.neg(a);
    let mut flat = Vec::with_capacity(n * n);
    for x in 0..n {
        let xb = l.add(x, neg_b);
        for y in 0..n {
            flat.push(l.add(l.add(xb, y), neg_a) as u16);
        }
    }
    let star_table = CayleyTable::from_flat(n, flat)
        .map_err(|_| FormsError::InternalAssertionFailed("shifted product is not Latin"))?;
    let new_zero = l.add(b, a);
    if new_zero != l.add(a, b) {
        return Err(FormsError::InternalAssertionFailed("a + b must equal b + a"));
    }
    let star = FiniteLoop::new(star_table, new_zero)
        .map_err(|_| FormsError::InternalAssertionFailed("a + b is not neutral after the shift"))?;

    // (i) tau is an isomorphism onto the shifted loop
    for x in 0..n {
        for y in 0..n {
            if tau.apply(l.add(x, y)) != star.add(tau.apply(x), tau.apply(y)) {
                return Err(FormsError::InternalAssertionFailed("tau is not an isomorphism"));
            }
        }
    }
    // (ii) the structural subsets transport along tau
    let star_nuc = structure::nucleus(&star).members;
    let star_k = structure::moufang_center(&star)?.members;
    let mut tau_n: Vec<usize> =
        (0..n).filter(|&x| nset[x]).map(|x| tau.apply(x)).collect();
    tau_n.sort_unstable();
    let mut tau_k: Vec<usize> =
        (0..n).filter(|&x| kset[x]).map(|x| tau.apply(x)).collect();
    tau_k.sort_unstable();
    if star_nuc != tau_n || star_k != tau_k {
        return Err(FormsError::InternalAssertionFailed("N and K do not transport along tau"));
    }

    let h = tau.compose(&form.f).compose(&tau_inv);
    let k = tau.compose(&form.g).compose(&tau_inv);
    // (iv)
    if h.compose(&k) != k.compose(&h) {
        return Err(FormsError::InternalAssertionFailed("shifted automorphisms do not commute"));
    }

    // e1 solved from x*y = h(x) (*) e1 (*) k(y) at x = y = new zero, where
    // the left side is the product of the input form
    let old_prod =
        |x: usize, y: usize| l.add(l.add(form.f.apply(x), form.e), form.g.apply(y));
    let e1 = old_prod(new_zero, new_zero);
    for x in 0..n {
        for y in 0..n {
            let hx = h.apply(x);
            let ky = k.apply(y);
            let lhs = old_prod(x, y);
            if lhs != star.add(star.add(hx, e1), ky) || lhs != star.add(hx, star.add(e1, ky)) {
                return Err(FormsError::InternalAssertionFailed(
                    "shifted form does not reconstruct the product",
                ));
            }
        }
    }

    let zold = member_flags(&structure::center(l)?.members, n);
    let strong = zold[b];
    let shifted = ArithmeticForm { base: star, f: h, g: k, e: e1, strong };
    let report = verify_form(&shifted, false)?;
    if !report.passed() {
        return Err(FormsError::InternalAssertionFailed("shifted form fails its axioms"));
    }
    // (viii) e1 is central in the shifted loop exactly when b was central
    let star_z = member_flags(&structure::center(&shifted.base)?.members, n);
    if star_z[e1] != strong {
        return Err(FormsError::InternalAssertionFailed(
            "centrality of e1 must match centrality of b",
        ));
    }
    Ok(shifted)
}

/// All `(n, k)` decompositions of `w` over nucleus and Moufang center.
fn decompositions(l: &FiniteLoop, w: usize) -> Result<Vec<(usize, usize)>, FormsError> {
    let kset = member_flags(&structure::moufang_center(l)?.members, l.order());
    let nuc = structure::nucleus(l).members;
    Ok(nuc
        .into_iter()
        .filter_map(|a| {
            let b = l.ldiv(a, w);
            if kset[b] {
                Some((a, b))
            } else {
                None
            }
        })
        .collect())
}

/// The unique arithmetic form of `q` whose loop has neutral element `w`,
/// built by shifting the basepoint-0 strong form. Every decomposition of
/// `w` is tried and must produce the identical form.
pub fn phi(q: &CayleyTable, w: usize) -> Result<ArithmeticForm, FormsError> {
    let (base_form, _) = form_at(q, 0)?;
    let decs = decompositions(&base_form.base, w)?;
    let mut result: Option<ArithmeticForm> = None;
    for (bn, bk) in decs {
        // w = bn + bk with bn nuclear and bk in K; the shift wants the K
        // part first, and bk + bn = bn + bk since K commutes
        let shifted = basepoint_shift(&base_form, bk, bn)?;
        if shifted.base.zero() != w {
            return Err(FormsError::InternalAssertionFailed("shift missed the neutral element"));
        }
        match &result {
            None => result = Some(shifted),
            Some(first) => {
                if *first != shifted {
                    return Err(FormsError::InternalAssertionFailed(
                        "different decompositions produced different forms",
                    ));
                }
            }
        }
    }
    result.ok_or(FormsError::InternalAssertionFailed("NK-loop admits no decomposition"))
}

/// The companion product `x.y = f(x) + g(y)` of a strong form; its table
/// is an F-quasigroup with the loop zero idempotent.
pub fn companion_quasigroup(form: &ArithmeticForm) -> Result<CayleyTable, FormsError> {
    let report = verify_form(form, true)?;
    if !report.passed() {
        let failing = report.first_failure().expect("unpassed report has a failure");
        return Err(FormsError::InvalidForm(failing.axiom.to_string()));
    }
    let l = &form.base;
    let n = l.order();
    let mut flat = Vec::with_capacity(n * n);
    for x in 0..n {
        let fx = form.f.apply(x);
        for y in 0..n {
            flat.push(l.add(fx, form.g.apply(y)) as u16);
        }
    }
    let table = CayleyTable::from_flat(n, flat)
        .map_err(|_| FormsError::InternalAssertionFailed("companion product is not Latin"))?;
    if !laws::is_f_quasigroup(&table) {
        return Err(FormsError::InternalAssertionFailed("companion product is not F"));
    }
    let z = l.zero();
    if table.mul(z, z) != z {
        return Err(FormsError::InternalAssertionFailed("loop zero is not idempotent"));
    }
    Ok(table)
}

/// Wire representation of a form: field names are part of the CLI schema.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FormJson {
    pub e: usize,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub loop_table: Vec<Vec<usize>>,
    pub order: usize,
    pub strong: bool,
    pub zero: usize,
}

impl From<&ArithmeticForm> for FormJson {
    fn from(form: &ArithmeticForm) -> Self {
        let n = form.base.order();
        let loop_table = form
            .base
            .base()
            .rows()
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect();
        FormJson {
            e: form.e,
            f: form.f.images(),
            g: form.g.images(),
            loop_table,
            order: n,
            strong: form.strong,
            zero: form.base.zero(),
        }
    }
}

impl TryFrom<FormJson> for ArithmeticForm {
    type Error = FormsError;

    fn try_from(json: FormJson) -> Result<Self, FormsError> {
        let table = CayleyTable::from_rows(json.order, &json.loop_table)
            .map_err(|_| FormsError::InvalidForm("loop_table".into()))?;
        let base = FiniteLoop::new(table, json.zero)
            .map_err(|_| FormsError::InvalidForm("zero".into()))?;
        let f = Permutation::from_images(json.f)
            .map_err(|_| FormsError::InvalidForm("f".into()))?;
        let g = Permutation::from_images(json.g)
            .map_err(|_| FormsError::InvalidForm("g".into()))?;
        if json.e >= json.order {
            return Err(FormsError::InvalidForm("e".into()));
        }
        Ok(ArithmeticForm { base, f, g, e: json.e, strong: json.strong })
    }
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
    fn isotope_at_identity_is_the_group() {
        let z5 = cyclic(5);
        let l = principal_isotope(&z5, 0, 0);
        assert_eq!(l.zero(), 0);
        assert_eq!(l.base(), &z5);
    }

    #[test]
    fn q5_isotope_is_shifted_addition() {
        let l = principal_isotope(&q5(), 3, 2);
        assert_eq!(l.zero(), 4);
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(l.add(x, y), (x + y + 1) % 5);
            }
        }
    }

    #[test]
    fn form_of_group_is_trivial() {
        let (form, trace) = form_at(&cyclic(3), 0).unwrap();
        assert_eq!(form.base.zero(), 0);
        assert!(form.f.is_identity());
        assert!(form.g.is_identity());
        assert_eq!(form.e, 0);
        assert!(form.strong);
        assert_eq!((trace.a, trace.b), (0, 0));
    }

    #[test]
    fn form_of_q5_matches_hand_computation() {
        // independent derivation in mod-5 arithmetic: a = alpha(0) = 3,
        // b = beta(0) = 2, h = R_3: x -> 2x, k = L_2: y -> 3y,
        // f(x) = 2x+1, g(y) = 3y+2, zero = 4, e = 1
        let (form, trace) = form_at(&q5(), 0).unwrap();
        assert_eq!((trace.a, trace.b), (3, 2));
        assert_eq!(form.base.zero(), 4);
        assert_eq!(form.e, 1);
        for x in 0..5 {
            assert_eq!(trace.h.apply(x), 2 * x % 5);
            assert_eq!(trace.k.apply(x), 3 * x % 5);
            assert_eq!(form.f.apply(x), (2 * x + 1) % 5);
            assert_eq!(form.g.apply(x), (3 * x + 2) % 5);
        }
        assert_eq!(trace.c, (4 * 2 + 3 * 3 + 1) % 5); // c = (ba).a = 4.3
        assert_eq!(trace.d, (2 * 2 + 3 * 4 + 1) % 5); // d = b.(ba) = 2.4
    }

    #[test]
    fn trace_reconstructs_elements() {
        for q in [q5(), cyclic(6)] {
            for r in 0..q.order() {
                let (form, trace) = form_at(&q, r).unwrap();
                for x in 0..q.order() {
                    assert_eq!(form.base.add(form.f.apply(x), trace.p[x]), x);
                    assert_eq!(form.base.add(trace.q[x], form.g.apply(x)), x);
                }
            }
        }
    }

    #[test]
    fn psi_round_trips_form_at() {
        for q in [q5(), cyclic(4)] {
            for r in 0..q.order() {
                let (form, _) = form_at(&q, r).unwrap();
                let pointed = psi(&form).unwrap();
                assert_eq!(pointed.table, q);
                assert_eq!(pointed.point, form.base.zero());
            }
        }
    }

    #[test]
    fn invalid_form_is_reported() {
        // identity maps over a group pass; a non-nuclear e is caught
        let base = FiniteLoop::from_table(cyclic(3)).unwrap();
        let ok = ArithmeticForm {
            base: base.clone(),
            f: Permutation::identity(3),
            g: Permutation::identity(3),
            e: 0,
            strong: true,
        };
        assert!(verify_form(&ok, true).unwrap().passed());
        let bad = ArithmeticForm { e: 7, ..ok };
        assert!(!verify_form(&bad, true).unwrap().passed());
        assert!(matches!(psi(&bad), Err(FormsError::InvalidForm(_))));
    }

    #[test]
    fn zero_shift_is_identity() {
        let (form, _) = form_at(&q5(), 0).unwrap();
        let z = form.base.zero();
        let shifted = basepoint_shift(&form, z, z).unwrap();
        assert_eq!(shifted, form);
    }

    #[test]
    fn all_q5_shifts_rebuild_q5() {
        let q = q5();
        let (form, _) = form_at(&q, 0).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let shifted = basepoint_shift(&form, a, b).unwrap();
                assert!(shifted.strong);
                assert_eq!(psi(&shifted).unwrap().table, q);
            }
        }
    }

    #[test]
    fn phi_fixes_base_neutral() {
        let q = q5();
        let (form, _) = form_at(&q, 0).unwrap();
        let again = phi(&q, form.base.zero()).unwrap();
        assert_eq!(again, form);
    }

    #[test]
    fn companion_of_q5_has_idempotent_zero() {
        let (form, _) = form_at(&q5(), 0).unwrap();
        let comp = companion_quasigroup(&form).unwrap();
        assert_eq!(comp.mul(4, 4), 4);
    }

    #[test]
    fn companion_of_group_form_is_the_group() {
        let z5 = cyclic(5);
        let (form, _) = form_at(&z5, 0).unwrap();
        assert_eq!(companion_quasigroup(&form).unwrap(), z5);
    }

    #[test]
    fn form_json_round_trips() {
        let (form, _) = form_at(&q5(), 0).unwrap();
        let json = FormJson::from(&form);
        let back = ArithmeticForm::try_from(json.clone()).unwrap();
        assert_eq!(back, form);
        assert_eq!(FormJson::from(&back), json);
    }
}
