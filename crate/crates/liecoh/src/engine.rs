//! Orchestration: per-cell cohomology in straightforward and split mode,
//! grade/degree grids, the central-element wedge check, and the self-test
//! suites.

use crate::algebra::{make_algebra, Algebra, AlgebraError, AlgebraKind, AlgebraSpec};
use crate::cochain::{
    differential_matrix, generate_monomials, monomial_cochain, total_dimension, vector_to_cochain,
    wedge, CochainError, CochainMonomial, CochainVector,
};
use crate::field::Field;
use crate::linalg::{
    eliminate, mat_mul, mat_vec, reduce_echelon, reduce_vec, rref_rows, three_term_cohomology,
    LinalgError, SparseMatrix, SparseVec,
};
use crate::subcomplex::{partition_complex, Subcomplex};
use rayon::prelude::*;
use std::time::Instant;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Split,
    Straightforward,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Split => write!(f, "split"),
            Mode::Straightforward => write!(f, "straightforward"),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("algebra has no central element")]
    MissingCentral,
    #[error("unrecognized algebra descriptor `{0}` (expected H:<even>|<odd> or Po:<even>|<odd>)")]
    BadDescriptor(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Where cells get their algebra from: a built-in family materialized with a
/// derived window per request, or a fixed explicit table.
#[derive(Clone, Debug)]
pub enum AlgebraSource {
    Family {
        kind: AlgebraKind,
        n: usize,
        m: usize,
    },
    Explicit(Algebra),
}

/// Window needed so that all three layers of the `(k, g)` cell enumerate: a
/// `j`-wedge of grade `g` over elements of grade at least `fm` has every
/// constituent grade bounded by `g - (j-1) fm`.
pub fn derived_window(family_min: i64, k: usize, g: i64) -> (i64, i64) {
    let mut hi = family_min;
    for j in [k.saturating_sub(1), k, k + 1] {
        if j >= 1 {
            hi = hi.max(g - (j as i64 - 1) * family_min);
        }
    }
    (family_min, hi)
}

impl AlgebraSource {
    /// Parse `H:<even>|<odd>` or `Po:<even>|<odd>` (the even dimension must
    /// be even: `H:2|0` is the hamiltonian algebra on one `p, q` pair).
    pub fn parse_family(s: &str) -> Result<AlgebraSource, EngineError> {
        let (kind, rest) = if let Some(r) = s.strip_prefix("Po:") {
            (AlgebraKind::Poisson, r)
        } else if let Some(r) = s.strip_prefix("H:") {
            (AlgebraKind::Hamiltonian, r)
        } else {
            return Err(EngineError::BadDescriptor(s.to_string()));
        };
        let (even, odd) = rest
            .split_once('|')
            .ok_or_else(|| EngineError::BadDescriptor(s.to_string()))?;
        let even: usize = even
            .parse()
            .map_err(|_| EngineError::BadDescriptor(s.to_string()))?;
        let odd: usize = odd
            .parse()
            .map_err(|_| EngineError::BadDescriptor(s.to_string()))?;
        if even % 2 != 0 || even + odd == 0 {
            return Err(EngineError::BadDescriptor(s.to_string()));
        }
        Ok(AlgebraSource::Family {
            kind,
            n: even / 2,
            m: odd,
        })
    }

    pub fn label(&self) -> String {
        match self {
            AlgebraSource::Family { kind, n, m } => match kind {
                AlgebraKind::Hamiltonian => format!("H({}|{})", 2 * n, m),
                AlgebraKind::Poisson => format!("Po({}|{})", 2 * n, m),
                AlgebraKind::Explicit => unreachable!(),
            },
            AlgebraSource::Explicit(a) => a.label.clone(),
        }
    }

    fn family_min(kind: AlgebraKind) -> i64 {
        match kind {
            AlgebraKind::Hamiltonian => -1,
            _ => -2,
        }
    }

    /// Materialize with exactly the window the `(k, g)` cell needs.
    pub fn materialize(&self, k: usize, g: i64) -> Result<Algebra, EngineError> {
        self.materialize_many(&[(k, g)])
    }

    /// Materialize with the union of the windows a set of cells needs.
    pub fn materialize_many(&self, cells: &[(usize, i64)]) -> Result<Algebra, EngineError> {
        match self {
            AlgebraSource::Explicit(a) => Ok(a.clone()),
            AlgebraSource::Family { kind, n, m } => {
                let fm = Self::family_min(*kind);
                let mut hi = fm;
                for &(k, g) in cells {
                    hi = hi.max(derived_window(fm, k, g).1);
                }
                Ok(make_algebra(&AlgebraSpec {
                    kind: *kind,
                    n: *n,
                    m: *m,
                    grade_window: (fm, hi),
                    grading_weights: None,
                })?)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct SubStats {
    pub dim_ckm1: usize,
    pub dim_ck: usize,
    pub dim_ckp1: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    pub basis_ms: u128,
    pub matrix_ms: u128,
    pub partition_ms: u128,
    pub elim_ms: u128,
    pub reps_ms: u128,
    pub total_ms: u128,
}

/// Everything one cell computation produced; representatives are kept as
/// vectors over the middle-layer basis stored alongside.
pub struct CellOutcome<F: Field> {
    pub k: usize,
    pub g: i64,
    pub mode: Mode,
    pub dim_c: [usize; 3],
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub basis_k: Vec<CochainMonomial>,
    pub rep_vectors: Vec<SparseVec<F::Elem>>,
    /// Raw per-subcomplex rows in seed order; empty in straightforward mode.
    pub stats: Vec<SubStats>,
    pub n_subcomplexes: usize,
    pub max_block: usize,
    pub timings: PhaseTimings,
}

impl<F: Field> CellOutcome<F> {
    pub fn rep_cochains(&self, f: &F) -> Vec<CochainVector<F::Elem>> {
        self.rep_vectors
            .iter()
            .map(|v| vector_to_cochain(f, &self.basis_k, self.k, self.g, v))
            .collect()
    }
}

/// Bases and differentials of one `(k, g)` cell.
pub struct CellContext<F: Field> {
    pub basis_km1: Vec<CochainMonomial>,
    pub basis_k: Vec<CochainMonomial>,
    pub basis_kp1: Vec<CochainMonomial>,
    pub d_in: SparseMatrix<F::Elem>,
    pub d_out: SparseMatrix<F::Elem>,
    basis_ms: u128,
    matrix_ms: u128,
}

pub fn build_cell<F: Field>(
    f: &F,
    alg: &Algebra,
    k: usize,
    g: i64,
) -> Result<CellContext<F>, EngineError> {
    let t0 = Instant::now();
    let basis_km1 = if k == 0 {
        Vec::new()
    } else {
        generate_monomials(alg, k - 1, g)?
    };
    let basis_k = generate_monomials(alg, k, g)?;
    let basis_kp1 = generate_monomials(alg, k + 1, g)?;
    let basis_ms = t0.elapsed().as_millis();

    let t1 = Instant::now();
    let d_in = differential_matrix(f, alg, &basis_km1, &basis_k, true)?;
    let d_out = differential_matrix(f, alg, &basis_k, &basis_kp1, true)?;
    let matrix_ms = t1.elapsed().as_millis();
    Ok(CellContext {
        basis_km1,
        basis_k,
        basis_kp1,
        d_in,
        d_out,
        basis_ms,
        matrix_ms,
    })
}

/// Full-complex computation: both differentials eliminated whole.
pub fn compute_straightforward<F: Field>(
    f: &F,
    alg: &Algebra,
    k: usize,
    g: i64,
    want_reps: bool,
) -> Result<CellOutcome<F>, EngineError> {
    let t0 = Instant::now();
    let ctx = build_cell(f, alg, k, g)?;
    let t1 = Instant::now();
    let tt = three_term_cohomology(f, &ctx.d_in, &ctx.d_out, want_reps)?;
    let elim_ms = t1.elapsed().as_millis();
    Ok(CellOutcome {
        k,
        g,
        mode: Mode::Straightforward,
        dim_c: [ctx.basis_km1.len(), ctx.basis_k.len(), ctx.basis_kp1.len()],
        dim_z: tt.dim_z,
        dim_b: tt.dim_b,
        dim_h: tt.dim_h,
        basis_k: ctx.basis_k,
        rep_vectors: tt.reps,
        stats: Vec::new(),
        n_subcomplexes: 0,
        max_block: ctx.d_in.n_rows,
        timings: PhaseTimings {
            basis_ms: ctx.basis_ms,
            matrix_ms: ctx.matrix_ms,
            partition_ms: 0,
            elim_ms,
            reps_ms: 0,
            total_ms: t0.elapsed().as_millis(),
        },
    })
}

/// Split computation: partition into minimal subcomplexes, solve each block,
/// merge in seed order.
pub fn compute_split<F: Field>(
    f: &F,
    alg: &Algebra,
    k: usize,
    g: i64,
    want_reps: bool,
) -> Result<CellOutcome<F>, EngineError> {
    let t0 = Instant::now();
    let ctx = build_cell(f, alg, k, g)?;
    let t1 = Instant::now();
    let blocks = partition_complex(&ctx.d_in, &ctx.d_out);
    let partition_ms = t1.elapsed().as_millis();

    let t2 = Instant::now();
    let stats: Vec<SubStats> = blocks
        .par_iter()
        .map(|b| {
            let tt = three_term_cohomology(f, &b.d_in, &b.d_out, false)?;
            Ok(SubStats {
                dim_ckm1: b.shape.layer_km1.len(),
                dim_ck: b.shape.layer_k.len(),
                dim_ckp1: b.shape.layer_kp1.len(),
                dim_z: tt.dim_z,
                dim_b: tt.dim_b,
                dim_h: tt.dim_h,
            })
        })
        .collect::<Result<_, LinalgError>>()?;
    let elim_ms = t2.elapsed().as_millis();

    let t3 = Instant::now();
    let mut rep_vectors = Vec::new();
    if want_reps {
        let positive: Vec<&Subcomplex<F::Elem>> = blocks
            .iter()
            .zip(&stats)
            .filter(|(_, s)| s.dim_h > 0)
            .map(|(b, _)| b)
            .collect();
        let per_block: Vec<Vec<SparseVec<F::Elem>>> = positive
            .par_iter()
            .map(|b| {
                let tt = three_term_cohomology(f, &b.d_in, &b.d_out, true)?;
                // lift block coordinates to the full middle layer
                Ok(tt
                    .reps
                    .into_iter()
                    .map(|rep| {
                        rep.into_iter()
                            .map(|(i, v)| (b.shape.layer_k[i as usize], v))
                            .collect()
                    })
                    .collect())
            })
            .collect::<Result<_, LinalgError>>()?;
        for mut reps in per_block {
            rep_vectors.append(&mut reps);
        }
    }
    let reps_ms = t3.elapsed().as_millis();

    let dim_z: usize = stats.iter().map(|s| s.dim_z).sum();
    let dim_b: usize = stats.iter().map(|s| s.dim_b).sum();
    let dim_h: usize = stats.iter().map(|s| s.dim_h).sum();
    let max_block = stats.iter().map(|s| s.dim_ck).max().unwrap_or(0);
    Ok(CellOutcome {
        k,
        g,
        mode: Mode::Split,
        dim_c: [ctx.basis_km1.len(), ctx.basis_k.len(), ctx.basis_kp1.len()],
        dim_z,
        dim_b,
        dim_h,
        basis_k: ctx.basis_k,
        rep_vectors,
        n_subcomplexes: stats.len(),
        stats,
        max_block,
        timings: PhaseTimings {
            basis_ms: ctx.basis_ms,
            matrix_ms: ctx.matrix_ms,
            partition_ms,
            elim_ms,
            reps_ms,
            total_ms: t0.elapsed().as_millis(),
        },
    })
}

pub fn compute<F: Field>(
    f: &F,
    alg: &Algebra,
    k: usize,
    g: i64,
    mode: Mode,
    want_reps: bool,
) -> Result<CellOutcome<F>, EngineError> {
    match mode {
        Mode::Split => compute_split(f, alg, k, g, want_reps),
        Mode::Straightforward => compute_straightforward(f, alg, k, g, want_reps),
    }
}

/// Group identical stat rows, sorted ascending by dimensions, with a
/// repetition count.
pub fn group_stats(stats: &[SubStats]) -> Vec<(SubStats, usize)> {
    let mut sorted: Vec<SubStats> = stats.to_vec();
    sorted.sort_by_key(|s| (s.dim_ck, s.dim_ckm1, s.dim_ckp1, s.dim_z, s.dim_b, s.dim_h));
    let mut out: Vec<(SubStats, usize)> = Vec::new();
    for s in sorted {
        match out.last_mut() {
            Some((prev, count)) if *prev == s => *count += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct GridCell {
    pub k: usize,
    pub g: i64,
    pub dim_c: usize,
    pub n_subcomplexes: usize,
    pub max_subdim: usize,
    pub dim_h: usize,
}

/// One cell per `(k, g)` with `dim C^k_g > 0`, ordered by `(k, g)`.
/// Differentials are shared between vertically adjacent cells.
pub fn grid_report<F: Field>(
    f: &F,
    alg: &Algebra,
    ks: std::ops::RangeInclusive<usize>,
    gs: std::ops::RangeInclusive<i64>,
    mode: Mode,
) -> Result<Vec<GridCell>, EngineError> {
    use std::collections::BTreeMap;
    use std::rc::Rc;
    let mut basis_cache: BTreeMap<(usize, i64), Rc<Vec<CochainMonomial>>> = BTreeMap::new();
    let mut matrix_cache: BTreeMap<(usize, i64), Rc<SparseMatrix<F::Elem>>> = BTreeMap::new();
    let mut cells = Vec::new();
    for k in ks {
        for g in gs.clone() {
            let basis_for = |cache: &mut BTreeMap<(usize, i64), Rc<Vec<CochainMonomial>>>,
                             k: usize,
                             g: i64|
             -> Result<Rc<Vec<CochainMonomial>>, EngineError> {
                if let Some(b) = cache.get(&(k, g)) {
                    return Ok(b.clone());
                }
                let b = Rc::new(generate_monomials(alg, k, g)?);
                cache.insert((k, g), b.clone());
                Ok(b)
            };
            let b_k = basis_for(&mut basis_cache, k, g)?;
            if b_k.is_empty() {
                continue;
            }
            let b_km1 = if k == 0 {
                Rc::new(Vec::new())
            } else {
                basis_for(&mut basis_cache, k - 1, g)?
            };
            let b_kp1 = basis_for(&mut basis_cache, k + 1, g)?;

            let mut matrix_for = |deg: usize,
                                  dom: &[CochainMonomial],
                                  cod: &[CochainMonomial]|
             -> Result<Rc<SparseMatrix<F::Elem>>, EngineError> {
                if let Some(m) = matrix_cache.get(&(deg, g)) {
                    return Ok(m.clone());
                }
                let m = Rc::new(differential_matrix(f, alg, dom, cod, true)?);
                matrix_cache.insert((deg, g), m.clone());
                Ok(m)
            };
            let d_in = if k == 0 {
                Rc::new(SparseMatrix::zero(b_k.len(), 0))
            } else {
                matrix_for(k - 1, &b_km1, &b_k)?
            };
            let d_out = matrix_for(k, &b_k, &b_kp1)?;

            let (n_sub, max_sub, dim_h) = match mode {
                Mode::Split => {
                    let blocks = partition_complex(&d_in, &d_out);
                    let dims: Vec<_> = blocks
                        .par_iter()
                        .map(|b| three_term_cohomology(f, &b.d_in, &b.d_out, false))
                        .collect::<Result<_, LinalgError>>()?;
                    let h: usize = dims.iter().map(|t| t.dim_h).sum();
                    let max_sub = blocks
                        .iter()
                        .map(|b| b.shape.layer_k.len())
                        .max()
                        .unwrap_or(0);
                    (blocks.len(), max_sub, h)
                }
                Mode::Straightforward => {
                    let tt = three_term_cohomology(f, &d_in, &d_out, false)?;
                    (1, b_k.len(), tt.dim_h)
                }
            };
            cells.push(GridCell {
                k,
                g,
                dim_c: b_k.len(),
                n_subcomplexes: n_sub,
                max_subdim: max_sub,
                dim_h,
            });
        }
    }
    Ok(cells)
}

fn vectorize_in_cell<F: Field>(
    ctx: &CellContext<F>,
    k: usize,
    g: i64,
    w: &CochainVector<F::Elem>,
) -> Result<SparseVec<F::Elem>, EngineError> {
    let index: std::collections::BTreeMap<&[u32], u32> = ctx
        .basis_k
        .iter()
        .enumerate()
        .map(|(i, m)| (m.duals.as_slice(), i as u32))
        .collect();
    let mut w_vec: SparseVec<F::Elem> = Vec::new();
    for (mono, coeff) in &w.terms {
        let Some(&i) = index.get(mono.duals.as_slice()) else {
            return Err(EngineError::Internal(format!(
                "cochain leaves the ({k}, {g}) basis at {:?}",
                mono.duals
            )));
        };
        w_vec.push((i, coeff.clone()));
    }
    w_vec.sort_unstable_by_key(|e| e.0);
    Ok(w_vec)
}

/// Cocycle and non-coboundary test of a vector over the middle layer;
/// membership is reduced block by block, eliminating only the blocks the
/// vector touches.
fn nontrivial_in_cell<F: Field>(
    f: &F,
    ctx: &CellContext<F>,
    blocks: &[Subcomplex<F::Elem>],
    home: &[usize],
    w_vec: &SparseVec<F::Elem>,
) -> bool {
    if w_vec.is_empty() || !mat_vec(f, &ctx.d_out, w_vec).is_empty() {
        return false;
    }
    let mut touched: Vec<usize> = w_vec
        .iter()
        .map(|(i, _)| home[*i as usize])
        .filter(|&s| s != usize::MAX)
        .collect();
    touched.sort_unstable();
    touched.dedup();
    for s in touched {
        let b = &blocks[s];
        let local: std::collections::BTreeMap<u32, u32> = b
            .shape
            .layer_k
            .iter()
            .enumerate()
            .map(|(loc, &glob)| (glob, loc as u32))
            .collect();
        let w_local: SparseVec<F::Elem> = w_vec
            .iter()
            .filter_map(|(i, v)| local.get(i).map(|&l| (l, v.clone())))
            .collect();
        let b_ech = reduce_echelon(f, eliminate(f, &b.d_in.transpose()));
        let idx = b_ech.col_index();
        if !reduce_vec(f, &b_ech, &idx, &w_local).is_empty() {
            return true;
        }
    }
    false
}

fn block_homes<F: Field>(ctx: &CellContext<F>) -> (Vec<Subcomplex<F::Elem>>, Vec<usize>) {
    let blocks = partition_complex(&ctx.d_in, &ctx.d_out);
    let mut home = vec![usize::MAX; ctx.basis_k.len()];
    for (s, b) in blocks.iter().enumerate() {
        for &i in &b.shape.layer_k {
            home[i as usize] = s;
        }
    }
    (blocks, home)
}

/// Is `w` a nontrivial class at `(k, g)`: nonzero, an exact cocycle, and not
/// reducible to zero against the coboundary space?
pub fn verify_nontrivial_class<F: Field>(
    f: &F,
    alg: &Algebra,
    k: usize,
    g: i64,
    w: &CochainVector<F::Elem>,
) -> Result<bool, EngineError> {
    if w.is_zero() {
        return Ok(false);
    }
    if w.degree != k || w.grade != g {
        return Err(EngineError::Internal(format!(
            "cochain of degree {} grade {} checked at ({k}, {g})",
            w.degree, w.grade
        )));
    }
    let ctx = build_cell(f, alg, k, g)?;
    let w_vec = vectorize_in_cell(&ctx, k, g, w)?;
    let (blocks, home) = block_homes(&ctx);
    Ok(nontrivial_in_cell(f, &ctx, &blocks, &home, &w_vec))
}

/// A cohomologous representative with no component on monomials containing
/// the central dual, when the class admits one (its central-dual component
/// must be exact). The input and output are vectors over `ctx.basis_k`.
fn central_free_representative<F: Field>(
    f: &F,
    ctx: &CellContext<F>,
    z: u32,
    r: &SparseVec<F::Elem>,
) -> Option<SparseVec<F::Elem>> {
    let z_rows: Vec<u32> = ctx
        .basis_k
        .iter()
        .enumerate()
        .filter(|(_, m)| m.duals.contains(&z))
        .map(|(i, _)| i as u32)
        .collect();
    let r_central: SparseVec<F::Elem> = {
        let in_z: std::collections::BTreeMap<u32, u32> = z_rows
            .iter()
            .enumerate()
            .map(|(loc, &glob)| (glob, loc as u32))
            .collect();
        r.iter()
            .filter_map(|(i, v)| in_z.get(i).map(|&l| (l, v.clone())))
            .collect()
    };
    if r_central.is_empty() {
        return Some(r.clone());
    }
    // solve d(v) = r on the central rows only; subtracting d(v) then clears
    // the central-dual component without leaving the class
    let all_cols: Vec<u32> = (0..ctx.d_in.n_cols as u32).collect();
    let restricted = ctx.d_in.submatrix(&z_rows, &all_cols);
    let v = crate::linalg::solve(f, &restricted, &r_central)?;
    let dv = mat_vec(f, &ctx.d_in, &v);
    let cleaned = crate::linalg::sub_scaled(f, r, &f.one(), &dv);
    debug_assert!(cleaned
        .iter()
        .all(|(i, _)| !ctx.basis_k[*i as usize].duals.contains(&z)));
    Some(cleaned)
}

/// Verify that wedging every class of `lower` (a cell at `(k-1, g+2)`) with
/// the dual central 1-cochain gives a nontrivial class at `(k, g)`.
///
/// A zero wedge fails the check outright. Because the central dual is not
/// itself a cocycle (its differential is the extension 2-cocycle), the raw
/// wedge of a representative carrying central-dual components need not be
/// closed; in that case the representative is first replaced by the
/// cohomologous central-free one (when the class admits it) and the wedge is
/// retried. The final product must be an exact cocycle that does not reduce
/// to zero against the coboundary space.
pub fn central_wedge_check<F: Field>(
    f: &F,
    alg: &Algebra,
    lower: &CellOutcome<F>,
    k: usize,
    g: i64,
) -> Result<bool, EngineError> {
    let z = alg.central_index.ok_or(EngineError::MissingCentral)?;
    if lower.k + 1 != k || lower.g + alg.grade(z) != g {
        return Err(EngineError::Internal(format!(
            "wedge source ({}, {}) does not target ({}, {})",
            lower.k, lower.g, k, g
        )));
    }
    if lower.dim_h == 0 {
        return Err(EngineError::Internal(
            "wedge source carries no classes".into(),
        ));
    }
    let z_cochain = monomial_cochain(f, alg, &CochainMonomial::new(vec![z]));
    let ctx = build_cell(f, alg, k, g)?;
    let (blocks, home) = block_homes(&ctx);
    let lower_ctx = build_cell(f, alg, lower.k, lower.g)?;
    for rep in lower.rep_cochains(f) {
        // wedge from the central-free representative of the class whenever
        // one exists; a class whose every representative carries the central
        // dual wedges to zero below and fails
        let r_vec = vectorize_in_cell(&lower_ctx, lower.k, lower.g, &rep)?;
        let r_vec = central_free_representative(f, &lower_ctx, z, &r_vec).unwrap_or(r_vec);
        let rep = vector_to_cochain(f, &lower_ctx.basis_k, lower.k, lower.g, &r_vec);
        let w = wedge(f, alg, &rep, &z_cochain);
        if w.is_zero() {
            return Ok(false);
        }
        let w_vec = vectorize_in_cell(&ctx, k, g, &w)?;
        if !nontrivial_in_cell(f, &ctx, &blocks, &home, &w_vec) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct SelfTestReport {
    pub entries: Vec<CheckEntry>,
}

impl SelfTestReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    fn push(&mut self, name: &str, passed: bool, details: String) {
        self.entries.push(CheckEntry {
            name: name.to_string(),
            passed,
            details,
        });
    }
}

/// Run the bracket, differential, dimension, partition, and mode-equivalence
/// suites; failures become report entries, not errors.
pub fn self_test<F: Field>(
    f: &F,
    alg: &Algebra,
    k_max: usize,
    gs: std::ops::RangeInclusive<i64>,
) -> SelfTestReport {
    let mut report = SelfTestReport::default();

    match alg.check_additivity() {
        Ok(()) => report.push(
            "grade-parity-additivity",
            true,
            "all structure constants additive".into(),
        ),
        Err(e) => report.push("grade-parity-additivity", false, e.to_string()),
    }
    match alg.check_antisymmetry() {
        Ok(()) => report.push(
            "super-antisymmetry",
            true,
            "bracket antisymmetric on all pairs".into(),
        ),
        Err(e) => report.push("super-antisymmetry", false, e.to_string()),
    }
    match alg.check_jacobi() {
        Ok((checked, skipped)) => report.push(
            "super-jacobi",
            true,
            format!("{checked} triples checked, {skipped} outside the window"),
        ),
        Err(e) => report.push("super-jacobi", false, e.to_string()),
    }

    // d^2 = 0 on every representable cell
    let mut dd_failures = Vec::new();
    let mut dd_checked = 0usize;
    for k in 0..=k_max {
        for g in gs.clone() {
            let ok = (|| -> Result<bool, EngineError> {
                if !alg.covers(k + 2, g) {
                    return Ok(true);
                }
                let b1 = generate_monomials(alg, k, g)?;
                let b2 = generate_monomials(alg, k + 1, g)?;
                let b3 = generate_monomials(alg, k + 2, g)?;
                if b1.is_empty() || b2.is_empty() {
                    return Ok(true);
                }
                let d1 = differential_matrix(f, alg, &b1, &b2, true)?;
                let d2 = differential_matrix(f, alg, &b2, &b3, true)?;
                dd_checked += 1;
                Ok(mat_mul(f, &d2, &d1).is_zero())
            })()
            .unwrap_or(false);
            if !ok {
                dd_failures.push((k, g));
            }
        }
    }
    report.push(
        "d-squared-zero",
        dd_failures.is_empty(),
        if dd_failures.is_empty() {
            format!("{dd_checked} cells checked")
        } else {
            format!("failing cells: {dd_failures:?}")
        },
    );

    // enumeration vs closed-form dimension on a small whole-algebra
    // truncation (a basis prefix is a lower grade window)
    let cap = alg.basis.len().min(24);
    let whole = Algebra::from_parts_unchecked(
        alg.label.clone(),
        alg.basis[..cap].to_vec(),
        Vec::new(),
    );
    let n_even = whole.basis.iter().filter(|b| b.parity == 0).count() as u64;
    let n_odd = whole.len() as u64 - n_even;
    let mut dim_ok = true;
    let mut dim_details = String::new();
    for k in 0..=(if cap == 0 { 0 } else { k_max }) {
        let (lo, hi) = whole.window;
        let mut total = 0u128;
        for g in (k as i64 * lo)..=(k as i64 * hi).max(0) {
            total += generate_monomials(&whole, k, g).map(|v| v.len()).unwrap_or(0) as u128;
        }
        let expect = total_dimension(n_even, n_odd, 1, k as u64);
        if total != expect {
            dim_ok = false;
            dim_details = format!("degree {k}: enumerated {total}, closed form {expect}");
            break;
        }
    }
    report.push(
        "dimension-formula",
        dim_ok,
        if dim_ok {
            format!("degrees 0..={k_max} match the closed form")
        } else {
            dim_details
        },
    );

    // partition invariants and split-vs-straightforward agreement
    let mut partition_ok = true;
    let mut equiv_ok = true;
    let mut details = String::new();
    let mut cells_checked = 0usize;
    for k in 1..=k_max {
        for g in gs.clone() {
            if !alg.covers(k + 1, g) {
                continue;
            }
            let ctx = match build_cell::<F>(f, alg, k, g) {
                Ok(c) => c,
                Err(e) => {
                    partition_ok = false;
                    details = e.to_string();
                    continue;
                }
            };
            if ctx.basis_k.is_empty() || ctx.basis_k.len() > 300 {
                continue;
            }
            let blocks = partition_complex(&ctx.d_in, &ctx.d_out);
            let mut covered = vec![false; ctx.basis_k.len()];
            for b in &blocks {
                for &i in &b.shape.layer_k {
                    if covered[i as usize] {
                        partition_ok = false;
                        details = format!("({k},{g}): middle monomial {i} in two blocks");
                    }
                    covered[i as usize] = true;
                }
            }
            if !covered.iter().all(|&b| b) {
                partition_ok = false;
                details = format!("({k},{g}): middle layer not covered");
            }

            match (
                compute_split(f, alg, k, g, true),
                compute_straightforward(f, alg, k, g, true),
            ) {
                (Ok(a), Ok(b)) => {
                    cells_checked += 1;
                    if (a.dim_z, a.dim_b, a.dim_h) != (b.dim_z, b.dim_b, b.dim_h) {
                        equiv_ok = false;
                        details = format!(
                            "({k},{g}): split ({},{},{}) vs straightforward ({},{},{})",
                            a.dim_z, a.dim_b, a.dim_h, b.dim_z, b.dim_b, b.dim_h
                        );
                    } else if !same_quotient_span(f, &ctx, &a.rep_vectors, &b.rep_vectors) {
                        equiv_ok = false;
                        details = format!("({k},{g}): representative spans differ modulo B");
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    equiv_ok = false;
                    details = e.to_string();
                }
            }
        }
    }
    report.push(
        "subcomplex-partition",
        partition_ok,
        if partition_ok {
            "middle layers partition every cell".into()
        } else {
            details.clone()
        },
    );
    report.push(
        "split-equivalence",
        equiv_ok,
        if equiv_ok {
            format!("{cells_checked} cells agree in both modes")
        } else {
            details
        },
    );

    report
}

/// Do two representative sets span the same quotient modulo the coboundary
/// space of the cell? Tested by comparing reduced echelons of `B + reps`
/// (the reduced echelon of a subspace is canonical).
pub fn same_quotient_span<F: Field>(
    f: &F,
    ctx: &CellContext<F>,
    reps_a: &[SparseVec<F::Elem>],
    reps_b: &[SparseVec<F::Elem>],
) -> bool {
    let b_rows: Vec<SparseVec<F::Elem>> = ctx.d_in.transpose().rows().to_vec();
    let n = ctx.basis_k.len();
    let mut rows_a = b_rows.clone();
    rows_a.extend(reps_a.iter().cloned());
    let mut rows_b = b_rows;
    rows_b.extend(reps_b.iter().cloned());
    let ra = rref_rows(f, rows_a, n);
    let rb = rref_rows(f, rows_b, n);
    let mut a_sorted: Vec<_> = ra.pivots.iter().zip(&ra.rows).collect();
    a_sorted.sort_by_key(|(p, _)| **p);
    let mut b_sorted: Vec<_> = rb.pivots.iter().zip(&rb.rows).collect();
    b_sorted.sort_by_key(|(p, _)| **p);
    a_sorted == b_sorted
}
