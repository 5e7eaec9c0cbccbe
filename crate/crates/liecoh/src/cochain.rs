//! Graded bases of super-skew-symmetric cochain monomials and the sparse
//! differential matrices of the trivial-module complex.
//!
//! A `k`-cochain monomial is a sorted wedge of `k` duals of basis elements:
//! duals of even elements are strictly increasing, duals of odd elements may
//! repeat. Swapping two adjacent arguments flips the sign unless both are odd.
//! The differential acts pointwise as
//!
//! ```text
//! (d c)(a_0..a_k) = -sum_{i<j} (-1)^{s(a_i)+s(a_j)+p(a_i)p(a_j)}
//!                      c([a_i,a_j], a_0.. a_i^ .. a_j^ ..a_k)
//! ```
//!
//! where `s(a)` is the position for even arguments and the count of even
//! arguments before it for odd ones. Matrix columns are produced by evaluating
//! this formula on the canonical argument tuple of each codomain monomial.

use crate::algebra::{Algebra, Coeff};
use crate::field::Field;
use crate::linalg::{SparseMatrix, SparseVec};
use num::rational::Ratio;
use num::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CochainMonomial {
    /// Basis indices of the wedged duals, sorted ascending.
    pub duals: Vec<u32>,
}

impl CochainMonomial {
    pub fn new(duals: Vec<u32>) -> Self {
        debug_assert!(duals.windows(2).all(|w| w[0] <= w[1]));
        CochainMonomial { duals }
    }

    pub fn empty() -> Self {
        CochainMonomial { duals: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.duals.len()
    }

    pub fn grade(&self, alg: &Algebra) -> i64 {
        self.duals.iter().map(|&i| alg.grade(i)).sum()
    }

    /// Product of `r!` over duals repeated `r` times (only duals of odd
    /// elements can repeat).
    pub fn norm(&self) -> u64 {
        let mut norm = 1u64;
        let mut run = 1u64;
        for w in self.duals.windows(2) {
            if w[0] == w[1] {
                run += 1;
                norm *= run;
            } else {
                run = 1;
            }
        }
        norm
    }

    pub fn max_multiplicity(&self) -> u64 {
        let mut best = 1u64;
        let mut run = 1u64;
        for w in self.duals.windows(2) {
            if w[0] == w[1] {
                run += 1;
                best = best.max(run);
            } else {
                run = 1;
            }
        }
        best
    }

    pub fn display(&self, alg: &Algebra) -> String {
        if self.duals.is_empty() {
            return "1".into();
        }
        self.duals
            .iter()
            .map(|&i| format!("{}'", alg.name(i)))
            .collect::<Vec<_>>()
            .join("^")
    }
}

/// A sparse cochain of fixed degree and grade.
#[derive(Clone, Debug)]
pub struct CochainVector<T> {
    pub degree: usize,
    pub grade: i64,
    pub terms: BTreeMap<CochainMonomial, T>,
}

impl<T> CochainVector<T> {
    pub fn zero(degree: usize, grade: i64) -> Self {
        CochainVector {
            degree,
            grade,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// An ordered argument list for pointwise evaluation; `s` values and parities
/// are always recomputed from the algebra, never stored.
#[derive(Clone, Debug)]
pub struct ArgumentTuple {
    pub args: Vec<u32>,
}

impl ArgumentTuple {
    pub fn new(args: Vec<u32>) -> Self {
        ArgumentTuple { args }
    }

    /// `s(a_i)`: the position for even arguments, the number of even
    /// arguments before position `i` for odd ones.
    pub fn s_values(&self, alg: &Algebra) -> Vec<u32> {
        let mut evens_before = 0u32;
        self.args
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if alg.parity(a) == 0 {
                    evens_before += 1;
                    i as u32
                } else {
                    evens_before
                }
            })
            .collect()
    }

    pub fn parities(&self, alg: &Algebra) -> Vec<u8> {
        self.args.iter().map(|&a| alg.parity(a)).collect()
    }

    pub fn grade(&self, alg: &Algebra) -> i64 {
        self.args.iter().map(|&a| alg.grade(a)).sum()
    }
}

#[derive(Debug, Error)]
pub enum CochainError {
    #[error("grade window [{have_lo}, {have_hi}] cannot enumerate degree-{k} monomials of grade {g}; required window [{need_lo}, {need_hi}]")]
    InsufficientWindow {
        k: usize,
        g: i64,
        have_lo: i64,
        have_hi: i64,
        need_lo: i64,
        need_hi: i64,
    },
    #[error("argument tuple has length {got}, expected {expected}")]
    TupleLength { expected: usize, got: usize },
    #[error("differential image leaves a codomain declared complete (escaping monomial: {0})")]
    CodomainIncomplete(String),
    #[error("prime modulus {p} must exceed the largest odd-dual multiplicity {mult}")]
    PrimeTooSmall { p: u64, mult: u64 },
}

/// Sort a dual-index list into canonical order, accumulating the super sign.
/// `None` when a dual of an even element repeats.
pub fn normalize_arguments(alg: &Algebra, raw: &[u32]) -> Option<(CochainMonomial, i32)> {
    let mut v = raw.to_vec();
    let mut sign = 1i32;
    // insertion sort; each adjacent swap contributes -1 unless both odd
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if !(alg.parity(v[j - 1]) == 1 && alg.parity(v[j]) == 1) {
                sign = -sign;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] && alg.parity(w[0]) == 0 {
            return None;
        }
    }
    Some((CochainMonomial::new(v), sign))
}

/// All degree-`k` grade-`g` monomials in lexicographic order of their index
/// lists. Degree 0 gives the single empty monomial, at grade 0 only.
pub fn generate_monomials(
    alg: &Algebra,
    k: usize,
    g: i64,
) -> Result<Vec<CochainMonomial>, CochainError> {
    if !alg.covers(k, g) {
        let (need_lo, need_hi) = alg.required_window(k, g).unwrap();
        return Err(CochainError::InsufficientWindow {
            k,
            g,
            have_lo: alg.window.0,
            have_hi: alg.window.1,
            need_lo,
            need_hi,
        });
    }
    if k == 0 {
        return Ok(if g == 0 {
            vec![CochainMonomial::empty()]
        } else {
            Vec::new()
        });
    }
    let nb = alg.len();
    if nb == 0 {
        return Ok(Vec::new());
    }
    let grades: Vec<i64> = (0..nb as u32).map(|i| alg.grade(i)).collect();
    let parities: Vec<u8> = (0..nb as u32).map(|i| alg.parity(i)).collect();
    let max_grade = *grades.last().unwrap();

    fn recurse(
        start: usize,
        slots: usize,
        grade_left: i64,
        grades: &[i64],
        parities: &[u8],
        max_grade: i64,
        current: &mut Vec<u32>,
        out: &mut Vec<CochainMonomial>,
    ) {
        if slots == 0 {
            if grade_left == 0 {
                out.push(CochainMonomial::new(current.clone()));
            }
            return;
        }
        if (slots as i64) * max_grade < grade_left {
            return;
        }
        for idx in start..grades.len() {
            if grades[idx] * slots as i64 > grade_left {
                break; // grades ascend with the index
            }
            current.push(idx as u32);
            let next = if parities[idx] == 0 { idx + 1 } else { idx };
            recurse(
                next,
                slots - 1,
                grade_left - grades[idx],
                grades,
                parities,
                max_grade,
                current,
                out,
            );
            current.pop();
        }
    }
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(k);
    recurse(0, k, g, &grades, &parities, max_grade, &mut current, &mut out);
    Ok(out)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Closed-form `dim C^k` for an `(n|m)`-dimensional superalgebra and a
/// `p`-dimensional module: `p * sum_i C(n, k-i) C(m+i-1, i)`.
pub fn total_dimension(n: u64, m: u64, p: u64, k: u64) -> u128 {
    let mut sum: u128 = 0;
    for i in 0..=k {
        let odd_factor = if i == 0 { 1 } else { binomial(m + i - 1, i) };
        sum += binomial(n, k - i) * odd_factor;
    }
    p as u128 * sum
}

/// Multilinear super-skew-symmetric evaluation of a cochain on a tuple: a
/// basis monomial gives the signed permutation indicator times its
/// multiplicity factor.
pub fn evaluate_cochain<F: Field>(
    f: &F,
    alg: &Algebra,
    c: &CochainVector<F::Elem>,
    t: &ArgumentTuple,
) -> Result<F::Elem, CochainError> {
    if t.args.len() != c.degree {
        return Err(CochainError::TupleLength {
            expected: c.degree,
            got: t.args.len(),
        });
    }
    let Some((mono, sign)) = normalize_arguments(alg, &t.args) else {
        return Ok(f.zero());
    };
    match c.terms.get(&mono) {
        None => Ok(f.zero()),
        Some(coeff) => {
            let factor = f.from_i128(sign as i128 * mono.norm() as i128);
            Ok(f.mul(coeff, &factor))
        }
    }
}

/// Pointwise differential: evaluate `(d c)` on an arbitrary tuple straight
/// from the defining formula. This is the oracle the matrix route is checked
/// against.
pub fn apply_differential_at<F: Field>(
    f: &F,
    alg: &Algebra,
    c: &CochainVector<F::Elem>,
    t: &ArgumentTuple,
) -> Result<F::Elem, CochainError> {
    if t.args.len() != c.degree + 1 {
        return Err(CochainError::TupleLength {
            expected: c.degree + 1,
            got: t.args.len(),
        });
    }
    // every term preserves total grade; a mismatched tuple evaluates to zero
    if t.grade(alg) != c.grade {
        return Ok(f.zero());
    }
    let s = t.s_values(alg);
    let p = t.parities(alg);
    let n = t.args.len();
    let mut total = f.zero();
    for i in 0..n {
        for j in i + 1..n {
            // an escaping bracket has a grade no window element carries, so
            // its terms vanish against every monomial of c
            let Some(terms) = alg.bracket_opt(t.args[i].min(t.args[j]), t.args[i].max(t.args[j]))
            else {
                continue;
            };
            if terms.is_empty() {
                continue;
            }
            let mut pair_sign: i128 = if (s[i] + s[j]) % 2 == 0 { 1 } else { -1 };
            if p[i] == 1 && p[j] == 1 {
                pair_sign = -pair_sign;
            }
            let flip = alg.bracket_sign(t.args[i], t.args[j]);
            let mut rest: Vec<u32> = Vec::with_capacity(n - 1);
            rest.push(0); // placeholder for the bracket component
            for (idx, &a) in t.args.iter().enumerate() {
                if idx != i && idx != j {
                    rest.push(a);
                }
            }
            for (l, coeff) in terms {
                rest[0] = *l;
                let val = evaluate_cochain(f, alg, c, &ArgumentTuple::new(rest.clone()))?;
                if f.is_zero(&val) {
                    continue;
                }
                let scalar = f.from_ratio(coeff * Ratio::from_integer(pair_sign * flip));
                total = f.add(&total, &f.mul(&scalar, &val));
            }
        }
    }
    Ok(f.neg(&total))
}

/// Coefficient of `d(mono)` on the codomain monomial with canonical tuple
/// `target`, in exact rational arithmetic.
fn column_coefficient(alg: &Algebra, mono: &CochainMonomial, target: &CochainMonomial) -> Coeff {
    let args = &target.duals;
    let n = args.len();
    let tuple = ArgumentTuple::new(args.clone());
    let s = tuple.s_values(alg);
    let p = tuple.parities(alg);
    let mut total = Coeff::zero();
    for i in 0..n {
        for j in i + 1..n {
            let Some(terms) = alg.bracket_opt(args[i], args[j]) else {
                continue;
            };
            if terms.is_empty() {
                continue;
            }
            let mut pair_sign: i128 = if (s[i] + s[j]) % 2 == 0 { 1 } else { -1 };
            if p[i] == 1 && p[j] == 1 {
                pair_sign = -pair_sign;
            }
            // args[i] <= args[j] (canonical tuple), so no antisymmetry flip
            let mut rest: Vec<u32> = Vec::with_capacity(n - 2);
            for (idx, &a) in args.iter().enumerate() {
                if idx != i && idx != j {
                    rest.push(a);
                }
            }
            for (l, coeff) in terms {
                // mono(l, rest...) = match_sign * norm(mono) on multiset match
                let pos = rest.partition_point(|&e| e < *l);
                let matches = {
                    let d = &mono.duals;
                    d.len() == rest.len() + 1
                        && d[..pos] == rest[..pos]
                        && d[pos] == *l
                        && d[pos + 1..] == rest[pos..]
                };
                if !matches {
                    continue;
                }
                // sign from moving l rightward past rest[..pos]
                let mut match_sign = 1i128;
                if alg.parity(*l) == 1 {
                    for &e in &rest[..pos] {
                        if alg.parity(e) == 0 {
                            match_sign = -match_sign;
                        }
                    }
                } else if pos % 2 == 1 {
                    match_sign = -match_sign;
                }
                total += coeff * Ratio::from_integer(pair_sign * match_sign);
            }
        }
    }
    -total * Ratio::new(mono.norm() as i128, target.norm() as i128)
}

/// Candidate codomain monomials of `d(mono)`: replace one constituent `a` by
/// a pair `(x, y)` whose bracket has a component on `a`.
fn column_candidates(alg: &Algebra, mono: &CochainMonomial) -> Vec<CochainMonomial> {
    let mut set: std::collections::BTreeSet<Vec<u32>> = Default::default();
    let duals = &mono.duals;
    for (pos, &a) in duals.iter().enumerate() {
        if pos > 0 && duals[pos - 1] == a {
            continue; // repeated dual: same replacement set
        }
        'pairs: for &(x, y) in alg.cobracket_pairs(a) {
            let mut v: Vec<u32> = Vec::with_capacity(duals.len() + 1);
            v.extend_from_slice(&duals[..pos]);
            v.extend_from_slice(&duals[pos + 1..]);
            let ix = v.partition_point(|&e| e < x);
            v.insert(ix, x);
            let iy = v.partition_point(|&e| e < y);
            v.insert(iy, y);
            for w in v.windows(2) {
                if w[0] == w[1] && alg.parity(w[0]) == 0 {
                    continue 'pairs;
                }
            }
            set.insert(v);
        }
    }
    set.into_iter().map(CochainMonomial::new).collect()
}

/// Sparse matrix of the differential from `domain` (degree `k`, grade `g`)
/// into `codomain` (degree `k+1`, same grade), one column per domain monomial.
///
/// With `codomain_complete` set, a nonzero image component outside the
/// codomain list is an internal-consistency error; otherwise such components
/// are dropped (partial codomains serve targeted column evaluations).
pub fn differential_matrix<F: Field>(
    f: &F,
    alg: &Algebra,
    domain: &[CochainMonomial],
    codomain: &[CochainMonomial],
    codomain_complete: bool,
) -> Result<SparseMatrix<F::Elem>, CochainError> {
    if let Some(p) = f.characteristic() {
        let max_mult = domain
            .iter()
            .chain(codomain.iter())
            .map(|m| m.max_multiplicity())
            .max()
            .unwrap_or(1);
        if p <= max_mult {
            return Err(CochainError::PrimeTooSmall { p, mult: max_mult });
        }
    }
    let index: BTreeMap<&[u32], u32> = codomain
        .iter()
        .enumerate()
        .map(|(i, m)| (m.duals.as_slice(), i as u32))
        .collect();

    let columns: Result<Vec<SparseVec<F::Elem>>, CochainError> = domain
        .par_iter()
        .map(|mono| {
            let mut col: SparseVec<F::Elem> = Vec::new();
            for cand in column_candidates(alg, mono) {
                let coeff = column_coefficient(alg, mono, &cand);
                if coeff.is_zero() {
                    continue;
                }
                match index.get(cand.duals.as_slice()) {
                    Some(&row) => col.push((row, f.from_ratio(coeff))),
                    None if codomain_complete => {
                        return Err(CochainError::CodomainIncomplete(format!(
                            "{:?}",
                            cand.duals
                        )))
                    }
                    None => {}
                }
            }
            col.sort_unstable_by_key(|e| e.0);
            Ok(col)
        })
        .collect();

    Ok(SparseMatrix::from_columns(codomain.len(), columns?))
}

/// Wedge with a 1-cochain: bilinear concatenation followed by normalization.
pub fn wedge<F: Field>(
    f: &F,
    alg: &Algebra,
    c1: &CochainVector<F::Elem>,
    c2: &CochainVector<F::Elem>,
) -> CochainVector<F::Elem> {
    assert_eq!(c2.degree, 1, "wedge factor must be a 1-cochain");
    let mut out = CochainVector::zero(c1.degree + 1, c1.grade + c2.grade);
    for (m1, a) in &c1.terms {
        for (m2, b) in &c2.terms {
            let mut raw = m1.duals.clone();
            raw.push(m2.duals[0]);
            let Some((mono, sign)) = normalize_arguments(alg, &raw) else {
                continue;
            };
            let term = f.mul(a, &f.mul(b, &f.from_i128(sign as i128)));
            if f.is_zero(&term) {
                continue;
            }
            match out.terms.entry(mono) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(term);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = f.add(e.get(), &term);
                    if f.is_zero(&sum) {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
    }
    out
}

/// A single basis monomial as a cochain vector.
pub fn monomial_cochain<F: Field>(
    f: &F,
    alg: &Algebra,
    mono: &CochainMonomial,
) -> CochainVector<F::Elem> {
    let mut c = CochainVector::zero(mono.degree(), mono.grade(alg));
    c.terms.insert(mono.clone(), f.one());
    c
}

/// Interpret a solution vector over `basis` as a cochain vector.
pub fn vector_to_cochain<F: Field>(
    f: &F,
    basis: &[CochainMonomial],
    degree: usize,
    grade: i64,
    v: &SparseVec<F::Elem>,
) -> CochainVector<F::Elem> {
    let mut c = CochainVector::zero(degree, grade);
    for (i, val) in v {
        if !f.is_zero(val) {
            c.terms.insert(basis[*i as usize].clone(), val.clone());
        }
    }
    c
}
