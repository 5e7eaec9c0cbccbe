//! Graded Lie (super)algebra bases and structure constants.
//!
//! Built-in families are the hamiltonian algebras `H(2n|m)` (generating-
//! function monomials in `p_i, q_i, theta_j` except the constant) and their
//! central extensions `Po(2n|m)` (constant included as the central element).
//! Explicit algebras come from structure-constant files.

use num::rational::Ratio;
use num::Zero;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

pub type Coeff = Ratio<i128>;

/// A monomial in the even variables `p_1..p_n, q_1..q_n` and odd variables
/// `theta_1..theta_m` (odd exponents are 0 or 1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorMonomial {
    pub even: Vec<u16>,
    pub odd: Vec<bool>,
}

impl GeneratorMonomial {
    pub fn constant(n: usize, m: usize) -> Self {
        GeneratorMonomial {
            even: vec![0; 2 * n],
            odd: vec![false; m],
        }
    }

    pub fn is_constant(&self) -> bool {
        self.even.iter().all(|&e| e == 0) && self.odd.iter().all(|&b| !b)
    }

    pub fn degree(&self) -> i64 {
        self.even.iter().map(|&e| e as i64).sum::<i64>()
            + self.odd.iter().filter(|&&b| b).count() as i64
    }

    pub fn parity(&self) -> u8 {
        (self.odd.iter().filter(|&&b| b).count() % 2) as u8
    }

    /// Weighted degree minus the pairing weight (2 under the standard
    /// grading).
    pub fn grade(&self, weights: &[u32], offset: i64) -> i64 {
        let ne = self.even.len();
        let mut d = 0i64;
        for (i, &e) in self.even.iter().enumerate() {
            d += weights[i] as i64 * e as i64;
        }
        for (j, &b) in self.odd.iter().enumerate() {
            if b {
                d += weights[ne + j] as i64;
            }
        }
        d - offset
    }

    /// Partial derivative by even variable `v` (index into `even`).
    fn diff_even(&self, v: usize) -> Option<(GeneratorMonomial, i128)> {
        if self.even[v] == 0 {
            return None;
        }
        let mut out = self.clone();
        out.even[v] -= 1;
        Some((out, self.even[v] as i128))
    }

    /// Left derivative by odd variable `j`: sign from moving `theta_j` to the
    /// front past the odd factors before it.
    fn diff_odd(&self, j: usize) -> Option<(GeneratorMonomial, i128)> {
        if !self.odd[j] {
            return None;
        }
        let before = self.odd[..j].iter().filter(|&&b| b).count();
        let mut out = self.clone();
        out.odd[j] = false;
        Some((out, if before % 2 == 0 { 1 } else { -1 }))
    }

    /// Product with the Koszul sign from interleaving odd factors; `None` when
    /// an odd variable repeats.
    fn mul(&self, other: &GeneratorMonomial) -> Option<(GeneratorMonomial, i128)> {
        let mut out = self.clone();
        for (a, b) in out.even.iter_mut().zip(&other.even) {
            *a += b;
        }
        // sign: each odd factor of `other` passes the odd factors of `self`
        // that sit to its right in the canonical order
        let mut sign = 1i128;
        for (j, &b) in other.odd.iter().enumerate() {
            if !b {
                continue;
            }
            if self.odd[j] {
                return None;
            }
            let passed = self.odd[j + 1..].iter().filter(|&&x| x).count();
            if passed % 2 == 1 {
                sign = -sign;
            }
            out.odd[j] = true;
        }
        Some((out, sign))
    }
}

/// Basis order: grade-major ascending, then descending lexicographic on the
/// exponent vector (so `p` before `q`, `p^2` before `pq` before `q^2`).
pub fn basis_cmp(
    a: &GeneratorMonomial,
    b: &GeneratorMonomial,
    weights: &[u32],
    offset: i64,
) -> std::cmp::Ordering {
    a.grade(weights, offset)
        .cmp(&b.grade(weights, offset))
        .then_with(|| b.even.cmp(&a.even))
        .then_with(|| b.odd.cmp(&a.odd))
}

/// The grading offset a weight assignment induces: every symplectic pair must
/// carry the same total weight, and each odd variable half of it (the bracket
/// loses exactly one pair of derivatives per term). All-ones weights give 2.
fn grading_offset(n: usize, m: usize, weights: &[u32]) -> Result<i64, AlgebraError> {
    let offset = if n > 0 {
        (weights[0] + weights[n]) as i64
    } else {
        2 * weights[2 * n] as i64
    };
    for i in 0..n {
        if (weights[i] + weights[n + i]) as i64 != offset {
            return Err(AlgebraError::BadWeights(format!(
                "pair {} has total weight {}, expected {offset}",
                i + 1,
                weights[i] + weights[n + i]
            )));
        }
    }
    for j in 0..m {
        if 2 * weights[2 * n + j] as i64 != offset {
            return Err(AlgebraError::BadWeights(format!(
                "odd variable {} has weight {}, expected {}",
                j + 1,
                weights[2 * n + j],
                offset / 2
            )));
        }
    }
    Ok(offset)
}

/// The super Poisson bracket of two generating-function monomials:
/// `sum_i (df/dp_i dg/dq_i - df/dq_i dg/dp_i) - (-1)^{p(f)} sum_j df/dt_j dg/dt_j`.
pub fn poisson_bracket(
    f: &GeneratorMonomial,
    g: &GeneratorMonomial,
) -> Vec<(GeneratorMonomial, i128)> {
    let n = f.even.len() / 2;
    let m = f.odd.len();
    assert_eq!(g.even.len(), 2 * n);
    assert_eq!(g.odd.len(), m);
    let mut acc: BTreeMap<GeneratorMonomial, i128> = BTreeMap::new();
    fn add(acc: &mut BTreeMap<GeneratorMonomial, i128>, mono: GeneratorMonomial, c: i128) {
        use std::collections::btree_map::Entry;
        if c == 0 {
            return;
        }
        match acc.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }
    for i in 0..n {
        if let (Some((fp, cf)), Some((gq, cg))) = (f.diff_even(i), g.diff_even(n + i)) {
            if let Some((prod, s)) = fp.mul(&gq) {
                add(&mut acc, prod, cf * cg * s);
            }
        }
        if let (Some((fq, cf)), Some((gp, cg))) = (f.diff_even(n + i), g.diff_even(i)) {
            if let Some((prod, s)) = fq.mul(&gp) {
                add(&mut acc, prod, -cf * cg * s);
            }
        }
    }
    let outer = if f.parity() == 0 { -1i128 } else { 1 };
    for j in 0..m {
        if let (Some((ft, cf)), Some((gt, cg))) = (f.diff_odd(j), g.diff_odd(j)) {
            if let Some((prod, s)) = ft.mul(&gt) {
                add(&mut acc, prod, outer * cf * cg * s);
            }
        }
    }
    acc.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraKind {
    Hamiltonian,
    Poisson,
    Explicit,
}

#[derive(Clone, Debug)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub n: usize,
    pub m: usize,
    pub grade_window: (i64, i64),
    /// Positive weight per variable (`p_1..p_n, q_1..q_n, theta_1..theta_m`);
    /// `None` means the standard all-ones grading.
    pub grading_weights: Option<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub name: String,
    pub monomial: Option<GeneratorMonomial>,
    pub parity: u8,
    pub grade: i64,
}

#[derive(Clone, Debug)]
enum BracketEntry {
    Terms(Vec<(u32, Coeff)>),
    /// Nonzero bracket whose grade lies outside the materialized window.
    Escapes,
}

#[derive(Clone, Debug)]
pub struct Algebra {
    pub label: String,
    pub kind: AlgebraKind,
    pub basis: Vec<BasisElement>,
    pub window: (i64, i64),
    pub central_index: Option<u32>,
    /// The basis is the whole algebra, not a window truncation.
    pub complete: bool,
    /// Lowest grade the full family contains (`-1` for `H`, `-2` for `Po`).
    pub family_min_grade: Option<i64>,
    brackets: Vec<BracketEntry>,
    /// For each basis index `a`, the pairs `(i, j)` with `i <= j` whose
    /// bracket has a nonzero component on `a`.
    cobracket: Vec<Vec<(u32, u32)>>,
}

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("empty grade window [{0}, {1}]")]
    EmptyWindow(i64, i64),
    #[error("a hamiltonian/Poisson family needs n + m >= 1")]
    EmptyFamily,
    #[error("explicit algebras are built from a structure-constant file, not from make_algebra")]
    ExplicitWithoutTable,
    #[error("bracket [{i}, {j}] has grade {grade}, outside the window [{lo}, {hi}]; widen the window")]
    WindowUnderflow {
        i: u32,
        j: u32,
        grade: i64,
        lo: i64,
        hi: i64,
    },
    #[error("malformed algebra file: {0}")]
    Malformed(String),
    #[error("grading weights do not induce a consistent grading: {0}")]
    BadWeights(String),
    #[error("antisymmetry/schema violation at pair ({i}, {j}): {msg}")]
    Antisymmetry { i: u32, j: u32, msg: String },
    #[error("grade or parity additivity fails at bracket ({i}, {j}) term {k}")]
    Additivity { i: u32, j: u32, k: u32 },
    #[error("super Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    Jacobi(u32, u32, u32),
}

fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

fn monomial_name(mono: &GeneratorMonomial, n: usize, m: usize) -> String {
    let var = |idx: usize| -> String {
        if idx < n {
            if n == 1 { "p".into() } else { format!("p{}", idx + 1) }
        } else if idx < 2 * n {
            if n == 1 { "q".into() } else { format!("q{}", idx - n + 1) }
        } else if m == 1 {
            "t".into()
        } else {
            format!("t{}", idx - 2 * n + 1)
        }
    };
    let mut parts = Vec::new();
    for (i, &e) in mono.even.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(var(i)),
            _ => parts.push(format!("{}^{}", var(i), e)),
        }
    }
    for (j, &b) in mono.odd.iter().enumerate() {
        if b {
            parts.push(var(2 * n + j));
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// All monomials with weighted degree in `[lo, hi]`.
fn monomials_with_degree(n: usize, m: usize, weights: &[u32], lo: i64, hi: i64) -> Vec<GeneratorMonomial> {
    let mut out = Vec::new();
    let mut current = GeneratorMonomial::constant(n, m);
    fn recurse(
        var: usize,
        acc: i64,
        n: usize,
        m: usize,
        weights: &[u32],
        lo: i64,
        hi: i64,
        current: &mut GeneratorMonomial,
        out: &mut Vec<GeneratorMonomial>,
    ) {
        if var == 2 * n + m {
            if acc >= lo {
                out.push(current.clone());
            }
            return;
        }
        let w = weights[var] as i64;
        if var < 2 * n {
            let max_e = (hi - acc) / w;
            for e in 0..=max_e.max(0) as u16 {
                current.even[var] = e;
                recurse(var + 1, acc + w * e as i64, n, m, weights, lo, hi, current, out);
            }
            current.even[var] = 0;
        } else {
            recurse(var + 1, acc, n, m, weights, lo, hi, current, out);
            if acc + w <= hi {
                current.odd[var - 2 * n] = true;
                recurse(var + 1, acc + w, n, m, weights, lo, hi, current, out);
                current.odd[var - 2 * n] = false;
            }
        }
    }
    recurse(0, 0, n, m, weights, lo, hi, &mut current, &mut out);
    out
}

/// Build a hamiltonian or Poisson family algebra over a grade window.
pub fn make_algebra(spec: &AlgebraSpec) -> Result<Algebra, AlgebraError> {
    let (lo, hi) = spec.grade_window;
    if lo > hi {
        return Err(AlgebraError::EmptyWindow(lo, hi));
    }
    match spec.kind {
        AlgebraKind::Explicit => return Err(AlgebraError::ExplicitWithoutTable),
        AlgebraKind::Hamiltonian | AlgebraKind::Poisson if spec.n + spec.m == 0 => {
            return Err(AlgebraError::EmptyFamily)
        }
        _ => {}
    }
    let weights = spec
        .grading_weights
        .clone()
        .unwrap_or_else(|| vec![1; 2 * spec.n + spec.m]);
    assert_eq!(weights.len(), 2 * spec.n + spec.m, "one weight per variable");
    assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
    let offset = grading_offset(spec.n, spec.m, &weights)?;

    let mut monos = monomials_with_degree(spec.n, spec.m, &weights, lo + offset, hi + offset);
    monos.retain(|mono| match spec.kind {
        AlgebraKind::Hamiltonian => !mono.is_constant(),
        _ => true,
    });
    monos.sort_by(|a, b| basis_cmp(a, b, &weights, offset));

    let mut central_index = None;
    let basis: Vec<BasisElement> = monos
        .into_iter()
        .enumerate()
        .map(|(idx, mono)| {
            let central = spec.kind == AlgebraKind::Poisson && mono.is_constant();
            if central {
                central_index = Some(idx as u32);
            }
            BasisElement {
                name: if central {
                    "Z".into()
                } else {
                    monomial_name(&mono, spec.n, spec.m)
                },
                parity: mono.parity(),
                grade: mono.grade(&weights, offset),
                monomial: Some(mono),
            }
        })
        .collect();

    let label = match spec.kind {
        AlgebraKind::Hamiltonian => format!("H({}|{})", 2 * spec.n, spec.m),
        AlgebraKind::Poisson => format!("Po({}|{})", 2 * spec.n, spec.m),
        AlgebraKind::Explicit => unreachable!(),
    };
    let family_min = match spec.kind {
        AlgebraKind::Hamiltonian => {
            // lowest weighted degree of a non-constant monomial
            let min_w = weights.iter().min().copied().unwrap() as i64;
            min_w - offset
        }
        _ => -offset,
    };

    let nb = basis.len();
    let mut index_of: BTreeMap<&GeneratorMonomial, u32> = BTreeMap::new();
    for (i, be) in basis.iter().enumerate() {
        index_of.insert(be.monomial.as_ref().unwrap(), i as u32);
    }

    let mut brackets = vec![BracketEntry::Terms(Vec::new()); nb * (nb + 1) / 2];
    let mut cobracket = vec![Vec::new(); nb];
    for i in 0..nb {
        for j in i..nb {
            let fi = basis[i].monomial.as_ref().unwrap();
            let fj = basis[j].monomial.as_ref().unwrap();
            let raw = poisson_bracket(fi, fj);
            let mut terms: Vec<(u32, Coeff)> = Vec::new();
            let mut escapes = false;
            for (mono, c) in raw {
                let target = if mono.is_constant() {
                    match (spec.kind, central_index) {
                        (AlgebraKind::Hamiltonian, _) => continue,
                        (AlgebraKind::Poisson, Some(z)) => z,
                        (AlgebraKind::Poisson, None) => {
                            // window excludes grade -2; constant component escapes
                            escapes = true;
                            break;
                        }
                        _ => unreachable!(),
                    }
                } else {
                    match index_of.get(&mono) {
                        Some(&t) => t,
                        None => {
                            escapes = true;
                            break;
                        }
                    }
                };
                terms.push((target, Coeff::from_integer(c)));
            }
            let entry = if escapes {
                BracketEntry::Escapes
            } else {
                terms.sort_unstable_by_key(|(t, _)| *t);
                for (t, _) in &terms {
                    cobracket[*t as usize].push((i as u32, j as u32));
                }
                BracketEntry::Terms(terms)
            };
            brackets[tri_index(nb, i, j)] = entry;
        }
    }

    Ok(Algebra {
        label,
        kind: spec.kind,
        basis,
        window: (lo, hi),
        central_index,
        complete: false,
        family_min_grade: Some(family_min),
        brackets,
        cobracket,
    })
}

impl Algebra {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn grade(&self, i: u32) -> i64 {
        self.basis[i as usize].grade
    }

    pub fn parity(&self, i: u32) -> u8 {
        self.basis[i as usize].parity
    }

    pub fn name(&self, i: u32) -> &str {
        &self.basis[i as usize].name
    }

    /// Stored half of the bracket table (`i <= j`).
    fn entry(&self, i: u32, j: u32) -> &BracketEntry {
        &self.brackets[tri_index(self.len(), i as usize, j as usize)]
    }

    /// `[a_i, a_j]` as a sparse coefficient vector over basis indices,
    /// honoring super-anticommutativity for `i > j`.
    pub fn bracket(&self, i: u32, j: u32) -> Result<Vec<(u32, Coeff)>, AlgebraError> {
        let (a, b, flip) = if i <= j { (i, j, false) } else { (j, i, true) };
        match self.entry(a, b) {
            BracketEntry::Escapes => Err(AlgebraError::WindowUnderflow {
                i,
                j,
                grade: self.grade(i) + self.grade(j),
                lo: self.window.0,
                hi: self.window.1,
            }),
            BracketEntry::Terms(t) => {
                if !flip || (self.parity(i) == 1 && self.parity(j) == 1) {
                    // [j,i] = +[i,j] when both odd
                    Ok(t.clone())
                } else {
                    Ok(t.iter().map(|(k, c)| (*k, -c)).collect())
                }
            }
        }
    }

    /// Like [`Algebra::bracket`] but with escaping brackets surfaced as `None`
    /// instead of an error (callers that can prove the escaping grade is
    /// irrelevant use this).
    pub fn bracket_opt(&self, i: u32, j: u32) -> Option<&[(u32, Coeff)]> {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match self.entry(a, b) {
            BracketEntry::Escapes => None,
            BracketEntry::Terms(t) => Some(t),
        }
    }

    /// Sign relating `[i,j]` to the stored `[min,max]` entry.
    pub fn bracket_sign(&self, i: u32, j: u32) -> i128 {
        if i <= j || (self.parity(i) == 1 && self.parity(j) == 1) {
            1
        } else {
            -1
        }
    }

    pub fn cobracket_pairs(&self, target: u32) -> &[(u32, u32)] {
        &self.cobracket[target as usize]
    }

    /// Grade window needed to enumerate all `k`-wedges of grade `g` (families
    /// only; a complete algebra has no requirement).
    pub fn required_window(&self, k: usize, g: i64) -> Option<(i64, i64)> {
        let fm = self.family_min_grade?;
        if self.complete {
            return None;
        }
        if k == 0 {
            return Some((fm, fm));
        }
        Some((fm, (g - (k as i64 - 1) * fm).max(fm)))
    }

    pub fn covers(&self, k: usize, g: i64) -> bool {
        match self.required_window(k, g) {
            None => true,
            Some((lo, hi)) => self.window.0 <= lo && self.window.1 >= hi,
        }
    }

    /// Construct an explicit algebra without invariant validation, normalizing
    /// the basis into canonical grade-major order (stable within a grade) and
    /// remapping the bracket table accordingly.
    pub fn from_parts_unchecked(
        label: String,
        basis: Vec<BasisElement>,
        bracket_list: Vec<(u32, u32, Vec<(u32, Coeff)>)>,
    ) -> Algebra {
        let nb = basis.len();
        let mut order: Vec<usize> = (0..nb).collect();
        order.sort_by_key(|&i| basis[i].grade);
        let mut remap = vec![0u32; nb];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new as u32;
        }
        let basis: Vec<BasisElement> = order.into_iter().map(|i| basis[i].clone()).collect();

        let mut brackets = vec![BracketEntry::Terms(Vec::new()); nb * (nb + 1) / 2];
        let mut cobracket = vec![Vec::new(); nb];
        for (i, j, terms) in bracket_list {
            assert!(i <= j);
            let (a, b) = (remap[i as usize], remap[j as usize]);
            let mut terms: Vec<(u32, Coeff)> =
                terms.into_iter().map(|(k, c)| (remap[k as usize], c)).collect();
            let (a, b) = if a <= b {
                (a, b)
            } else {
                // reordering flipped the pair; store the antisymmetric half
                let both_odd = basis[a as usize].parity == 1 && basis[b as usize].parity == 1;
                if !both_odd {
                    for (_, c) in &mut terms {
                        *c = -*c;
                    }
                }
                (b, a)
            };
            terms.sort_unstable_by_key(|(t, _)| *t);
            terms.retain(|(_, c)| !c.is_zero());
            for (t, _) in &terms {
                cobracket[*t as usize].push((a, b));
            }
            brackets[tri_index(nb, a as usize, b as usize)] = BracketEntry::Terms(terms);
        }
        let window = basis
            .iter()
            .map(|b| b.grade)
            .fold((i64::MAX, i64::MIN), |(lo, hi), g| (lo.min(g), hi.max(g)));
        Algebra {
            label,
            kind: AlgebraKind::Explicit,
            basis,
            window,
            central_index: None,
            complete: true,
            family_min_grade: None,
            brackets,
            cobracket,
        }
    }

    /// Super-antisymmetry `[x,y] + (-1)^{p(x)p(y)} [y,x] = 0`.
    ///
    /// For family algebras this exercises the raw Poisson bracket on both
    /// orders; for explicit tables the derived half is antisymmetric by
    /// construction and there is nothing further to test.
    pub fn check_antisymmetry(&self) -> Result<(), AlgebraError> {
        for i in 0..self.len() as u32 {
            for j in 0..self.len() as u32 {
                let (Some(mi), Some(mj)) = (
                    self.basis[i as usize].monomial.as_ref(),
                    self.basis[j as usize].monomial.as_ref(),
                ) else {
                    continue;
                };
                let mut acc: BTreeMap<GeneratorMonomial, i128> = BTreeMap::new();
                for (mono, c) in poisson_bracket(mi, mj) {
                    *acc.entry(mono).or_insert(0) += c;
                }
                let sgn: i128 = if self.parity(i) == 1 && self.parity(j) == 1 {
                    -1
                } else {
                    1
                };
                for (mono, c) in poisson_bracket(mj, mi) {
                    *acc.entry(mono).or_insert(0) += sgn * c;
                }
                if acc.values().any(|c| *c != 0) {
                    return Err(AlgebraError::Antisymmetry {
                        i,
                        j,
                        msg: "bracket(x,y) + (-1)^{p(x)p(y)} bracket(y,x) != 0".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `[i, j]` with the antisymmetry sign applied, `None` when it escapes
    /// the window.
    fn bracket_pair(&self, i: u32, j: u32) -> Option<Vec<(u32, Coeff)>> {
        let terms = self.bracket_opt(i, j)?;
        let sgn = Coeff::from_integer(self.bracket_sign(i, j));
        Some(terms.iter().map(|(k, c)| (*k, c * sgn)).collect())
    }

    /// `[a_i, v]` for a sparse vector `v`, `None` when any needed bracket
    /// escapes.
    fn bracket_elem_vec(&self, i: u32, v: &[(u32, Coeff)]) -> Option<BTreeMap<u32, Coeff>> {
        let mut out = BTreeMap::new();
        for (l, c) in v {
            for (k, t) in self.bracket_pair(i, *l)? {
                let e = out.entry(k).or_insert_with(Coeff::zero);
                *e += t * c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Some(out)
    }

    /// `[v, a_j]` for a sparse vector `v`, `None` when any needed bracket
    /// escapes.
    fn bracket_vec_elem(&self, v: &[(u32, Coeff)], j: u32) -> Option<BTreeMap<u32, Coeff>> {
        let mut out = BTreeMap::new();
        for (l, c) in v {
            for (k, t) in self.bracket_pair(*l, j)? {
                let e = out.entry(k).or_insert_with(Coeff::zero);
                *e += t * c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Some(out)
    }

    /// Super Jacobi `[a,[b,c]] = [[a,b],c] + (-1)^{p(a)p(b)} [b,[a,c]]` on
    /// every basis triple whose intermediate brackets stay inside the window.
    /// Returns `(checked, skipped)` on success.
    pub fn check_jacobi(&self) -> Result<(usize, usize), AlgebraError> {
        let nb = self.len() as u32;
        let mut checked = 0usize;
        let mut skipped = 0usize;
        for a in 0..nb {
            for b in 0..nb {
                for c in 0..nb {
                    let pieces = (|| {
                        let bc = self.bracket_pair(b, c)?;
                        let lhs = self.bracket_elem_vec(a, &bc)?;
                        let ab = self.bracket_pair(a, b)?;
                        let rhs1 = self.bracket_vec_elem(&ab, c)?;
                        let ac = self.bracket_pair(a, c)?;
                        let rhs2 = self.bracket_elem_vec(b, &ac)?;
                        Some((lhs, rhs1, rhs2))
                    })();
                    let Some((mut acc, rhs1, rhs2)) = pieces else {
                        skipped += 1;
                        continue;
                    };
                    for (k, v) in rhs1 {
                        let e = acc.entry(k).or_insert_with(Coeff::zero);
                        *e -= v;
                    }
                    let koszul = if self.parity(a) == 1 && self.parity(b) == 1 {
                        Coeff::from_integer(-1)
                    } else {
                        Coeff::from_integer(1)
                    };
                    for (k, v) in rhs2 {
                        let e = acc.entry(k).or_insert_with(Coeff::zero);
                        *e -= v * koszul;
                    }
                    acc.retain(|_, v| !v.is_zero());
                    if !acc.is_empty() {
                        return Err(AlgebraError::Jacobi(a, b, c));
                    }
                    checked += 1;
                }
            }
        }
        Ok((checked, skipped))
    }

    /// Grade and parity additivity of every stored structure constant.
    pub fn check_additivity(&self) -> Result<(), AlgebraError> {
        for i in 0..self.len() as u32 {
            for j in i..self.len() as u32 {
                if let Some(terms) = self.bracket_opt(i, j) {
                    for (k, _) in terms {
                        let ok = self.grade(*k) == self.grade(i) + self.grade(j)
                            && self.parity(*k) == (self.parity(i) + self.parity(j)) % 2;
                        if !ok {
                            return Err(AlgebraError::Additivity { i, j, k: *k });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct AlgebraFile {
    basis: Vec<FileBasisElem>,
    brackets: Vec<FileBracket>,
}

#[derive(Deserialize)]
struct FileBasisElem {
    name: String,
    parity: u8,
    grade: i64,
}

#[derive(Deserialize)]
struct FileBracket {
    i: u32,
    j: u32,
    terms: Vec<FileTerm>,
}

#[derive(Deserialize)]
struct FileTerm {
    k: u32,
    coeff: String,
}

/// Parse and fully validate an explicit structure-constant document (JSON).
pub fn parse_structure_constants(text: &str, label: &str) -> Result<Algebra, AlgebraError> {
    let file: AlgebraFile =
        serde_json::from_str(text).map_err(|e| AlgebraError::Malformed(e.to_string()))?;
    let nb = file.basis.len();
    for (i, be) in file.basis.iter().enumerate() {
        if be.parity > 1 {
            return Err(AlgebraError::Malformed(format!(
                "basis element {i} has parity {}, expected 0 or 1",
                be.parity
            )));
        }
    }
    let basis: Vec<BasisElement> = file
        .basis
        .into_iter()
        .map(|b| BasisElement {
            name: b.name,
            monomial: None,
            parity: b.parity,
            grade: b.grade,
        })
        .collect();

    let mut seen = std::collections::BTreeSet::new();
    let mut bracket_list = Vec::new();
    for fb in file.brackets {
        if fb.i >= fb.j {
            return Err(AlgebraError::Antisymmetry {
                i: fb.i,
                j: fb.j,
                msg: "only pairs with i < j may be listed; the other half is derived".into(),
            });
        }
        if fb.j as usize >= nb {
            return Err(AlgebraError::Malformed(format!(
                "bracket pair ({}, {}) out of range",
                fb.i, fb.j
            )));
        }
        if !seen.insert((fb.i, fb.j)) {
            return Err(AlgebraError::Antisymmetry {
                i: fb.i,
                j: fb.j,
                msg: "pair listed twice".into(),
            });
        }
        let mut terms = Vec::new();
        for t in fb.terms {
            if t.k as usize >= nb {
                return Err(AlgebraError::Malformed(format!(
                    "bracket ({}, {}) targets out-of-range index {}",
                    fb.i, fb.j, t.k
                )));
            }
            let r = crate::field::parse_rational(&t.coeff)
                .map_err(AlgebraError::Malformed)?;
            let num: i128 = r
                .numer()
                .try_into()
                .map_err(|_| AlgebraError::Malformed(format!("coefficient `{}` too large", t.coeff)))?;
            let den: i128 = r
                .denom()
                .try_into()
                .map_err(|_| AlgebraError::Malformed(format!("coefficient `{}` too large", t.coeff)))?;
            let c = Coeff::new(num, den);
            if !c.is_zero() {
                terms.push((t.k, c));
            }
        }
        bracket_list.push((fb.i, fb.j, terms));
    }

    let mut alg = Algebra::from_parts_unchecked(label.to_string(), basis, bracket_list);
    alg.kind = AlgebraKind::Explicit;
    alg.check_additivity()?;
    alg.check_antisymmetry()?;
    alg.check_jacobi()?;
    Ok(alg)
}

/// Human-readable rendering of a sparse bracket result, for messages/tests.
pub fn format_bracket(alg: &Algebra, terms: &[(u32, Coeff)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (idx, (k, c)) in terms.iter().enumerate() {
        if idx > 0 {
            s.push_str(" + ");
        }
        let _ = write!(s, "{}*{}", c, alg.name(*k));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(n: usize, m: usize, even: &[u16], odd: &[bool]) -> GeneratorMonomial {
        let mut g = GeneratorMonomial::constant(n, m);
        g.even.copy_from_slice(even);
        g.odd.copy_from_slice(odd);
        g
    }

    fn h2_spec(lo: i64, hi: i64) -> AlgebraSpec {
        AlgebraSpec {
            kind: AlgebraKind::Hamiltonian,
            n: 1,
            m: 0,
            grade_window: (lo, hi),
            grading_weights: None,
        }
    }

    fn po2_spec(lo: i64, hi: i64) -> AlgebraSpec {
        AlgebraSpec {
            kind: AlgebraKind::Poisson,
            n: 1,
            m: 0,
            grade_window: (lo, hi),
            grading_weights: None,
        }
    }

    #[test]
    fn poisson_bracket_examples() {
        // {p^2, q} = 2p
        let p2 = mono(1, 0, &[2, 0], &[]);
        let q = mono(1, 0, &[0, 1], &[]);
        let p = mono(1, 0, &[1, 0], &[]);
        assert_eq!(poisson_bracket(&p2, &q), vec![(p.clone(), 2)]);
        // {p, q} = 1
        let one = GeneratorMonomial::constant(1, 0);
        assert_eq!(poisson_bracket(&p, &q), vec![(one, 1)]);
        // {p, p} = 0
        assert!(poisson_bracket(&p, &p).is_empty());
    }

    #[test]
    fn poisson_bracket_odd_square() {
        // {t*p, t*p} = p^2 in H(2|1)
        let tp = mono(1, 1, &[1, 0], &[true]);
        let p2 = mono(1, 1, &[2, 0], &[false]);
        assert_eq!(poisson_bracket(&tp, &tp), vec![(p2, 1)]);
    }

    #[test]
    fn make_algebra_examples() {
        let alg = make_algebra(&h2_spec(-1, -1)).unwrap();
        assert_eq!(alg.len(), 2);
        assert_eq!(alg.name(0), "p");
        assert_eq!(alg.name(1), "q");

        let empty = make_algebra(&h2_spec(-2, -2)).unwrap();
        assert!(empty.is_empty());

        let po = make_algebra(&po2_spec(-2, -2)).unwrap();
        assert_eq!(po.len(), 1);
        assert_eq!(po.central_index, Some(0));
        assert!(po.basis[0].monomial.as_ref().unwrap().is_constant());

        assert!(make_algebra(&h2_spec(0, -1)).is_err());
    }

    #[test]
    fn basis_order_grade_major_then_descending_lex() {
        let alg = make_algebra(&h2_spec(-1, 0)).unwrap();
        let names: Vec<&str> = (0..alg.len() as u32).map(|i| alg.name(i)).collect();
        assert_eq!(names, vec!["p", "q", "p^2", "p*q", "q^2"]);
    }

    #[test]
    fn bracket_examples() {
        let alg = make_algebra(&h2_spec(-1, 2)).unwrap();
        // [p, q] = 0 in H
        assert!(alg.bracket(0, 1).unwrap().is_empty());
        // [p^2, q] = 2p
        let terms = alg.bracket(2, 1).unwrap();
        assert_eq!(format_bracket(&alg, &terms), "2*p");

        let po = make_algebra(&po2_spec(-2, 1)).unwrap();
        let z = po.central_index.unwrap();
        // [p, q] = Z in Po
        let pq = po.bracket(z + 1, z + 2).unwrap();
        assert_eq!(pq, vec![(z, Coeff::from_integer(1))]);
        // Z is central
        for x in 0..po.len() as u32 {
            assert!(po.bracket(z, x).unwrap().is_empty());
        }
    }

    #[test]
    fn window_underflow_is_reported() {
        let alg = make_algebra(&h2_spec(-1, 1)).unwrap();
        // p^3 and p^2*q have grade 1; their bracket has grade 2, outside
        let i = (0..alg.len() as u32).find(|&i| alg.name(i) == "p^3").unwrap();
        let j = (0..alg.len() as u32).find(|&i| alg.name(i) == "p^2*q").unwrap();
        match alg.bracket(i, j) {
            Err(AlgebraError::WindowUnderflow { grade: 2, .. }) => {}
            other => panic!("expected window underflow, got {other:?}"),
        }
    }

    #[test]
    fn h_basis_count_per_grade() {
        let alg = make_algebra(&h2_spec(-1, 8)).unwrap();
        for g in -1..=8i64 {
            let count = alg.basis.iter().filter(|b| b.grade == g).count() as i64;
            assert_eq!(count, g + 3, "grade {g}");
        }
    }

    #[test]
    fn po_is_h_plus_center() {
        let h = make_algebra(&h2_spec(-1, 3)).unwrap();
        let po = make_algebra(&po2_spec(-2, 3)).unwrap();
        assert_eq!(po.len(), h.len() + 1);
        assert_eq!(po.central_index, Some(0));
    }

    #[test]
    fn nonstandard_weights() {
        // one symplectic pair: any positive pair weights induce a grading
        let alg = make_algebra(&AlgebraSpec {
            kind: AlgebraKind::Hamiltonian,
            n: 1,
            m: 0,
            grade_window: (-3, 2),
            grading_weights: Some(vec![3, 1]),
        })
        .unwrap();
        let p = (0..alg.len() as u32).find(|&i| alg.name(i) == "p").unwrap();
        let q = (0..alg.len() as u32).find(|&i| alg.name(i) == "q").unwrap();
        assert_eq!(alg.grade(p), -1); // weight 3 minus pairing weight 4
        assert_eq!(alg.grade(q), -3);
        alg.check_additivity().unwrap();
        alg.check_antisymmetry().unwrap();
        alg.check_jacobi().unwrap();

        // inconsistent weights are rejected: the odd weight must be half the
        // pairing weight
        let bad = make_algebra(&AlgebraSpec {
            kind: AlgebraKind::Hamiltonian,
            n: 1,
            m: 1,
            grade_window: (-2, 1),
            grading_weights: Some(vec![1, 1, 2]),
        });
        assert!(matches!(bad, Err(AlgebraError::BadWeights(_))));
    }

    #[test]
    fn family_invariants_hold() {
        for alg in [
            make_algebra(&h2_spec(-1, 3)).unwrap(),
            make_algebra(&po2_spec(-2, 3)).unwrap(),
            make_algebra(&AlgebraSpec {
                kind: AlgebraKind::Hamiltonian,
                n: 1,
                m: 1,
                grade_window: (-1, 2),
                grading_weights: None,
            })
            .unwrap(),
        ] {
            alg.check_additivity().unwrap();
            alg.check_antisymmetry().unwrap();
            let (checked, _) = alg.check_jacobi().unwrap();
            assert!(checked > 0);
        }
    }

    const SL2: &str = r#"{
        "basis": [
            {"name": "h", "parity": 0, "grade": 0},
            {"name": "e", "parity": 0, "grade": 1},
            {"name": "f", "parity": 0, "grade": -1}
        ],
        "brackets": [
            {"i": 0, "j": 1, "terms": [{"k": 1, "coeff": "2"}]},
            {"i": 0, "j": 2, "terms": [{"k": 2, "coeff": "-2"}]},
            {"i": 1, "j": 2, "terms": [{"k": 0, "coeff": "1"}]}
        ]
    }"#;

    #[test]
    fn parse_explicit_tables() {
        let abelian = r#"{
            "basis": [
                {"name": "e1", "parity": 0, "grade": 0},
                {"name": "e2", "parity": 0, "grade": 1}
            ],
            "brackets": []
        }"#;
        let alg = parse_structure_constants(abelian, "abelian").unwrap();
        assert_eq!(alg.len(), 2);
        assert!(alg.bracket(0, 1).unwrap().is_empty());

        let sl2 = parse_structure_constants(SL2, "sl2").unwrap();
        assert_eq!(sl2.len(), 3);
        // basis is re-sorted grade-major: f, h, e
        let names: Vec<&str> = (0..3u32).map(|i| sl2.name(i)).collect();
        assert_eq!(names, vec!["f", "h", "e"]);
        let (h, e, fi) = (1u32, 2u32, 0u32);
        assert_eq!(format_bracket(&sl2, &sl2.bracket(e, fi).unwrap()), "1*h");
        assert_eq!(format_bracket(&sl2, &sl2.bracket(h, e).unwrap()), "2*e");
        // derived half: [e, h] = -2e
        assert_eq!(format_bracket(&sl2, &sl2.bracket(e, h).unwrap()), "-2*e");
    }

    #[test]
    fn parse_rejects_reversed_pair() {
        let bad = r#"{
            "basis": [
                {"name": "e1", "parity": 0, "grade": 0},
                {"name": "e2", "parity": 0, "grade": 0},
                {"name": "e3", "parity": 0, "grade": 0}
            ],
            "brackets": [
                {"i": 0, "j": 1, "terms": [{"k": 2, "coeff": "1"}]},
                {"i": 1, "j": 0, "terms": [{"k": 2, "coeff": "1"}]}
            ]
        }"#;
        match parse_structure_constants(bad, "bad") {
            Err(AlgebraError::Antisymmetry { i: 1, j: 0, .. }) => {}
            other => panic!("expected antisymmetry error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_jacobi_violation() {
        // sl2 with [h,e] = 3e breaks Jacobi on (h, e, f)
        let bad = SL2.replace("\"coeff\": \"2\"", "\"coeff\": \"3\"");
        match parse_structure_constants(&bad, "bad") {
            Err(AlgebraError::Jacobi(..)) => {}
            other => panic!("expected Jacobi error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_additivity_violation() {
        let bad = r#"{
            "basis": [
                {"name": "e1", "parity": 0, "grade": 0},
                {"name": "e2", "parity": 0, "grade": 1},
                {"name": "e3", "parity": 0, "grade": 5}
            ],
            "brackets": [
                {"i": 0, "j": 1, "terms": [{"k": 2, "coeff": "1"}]}
            ]
        }"#;
        match parse_structure_constants(bad, "bad") {
            Err(AlgebraError::Additivity { .. }) => {}
            other => panic!("expected additivity error, got {other:?}"),
        }
    }
}
