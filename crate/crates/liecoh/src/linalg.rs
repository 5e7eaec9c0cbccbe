//! Sparse exact linear algebra: Gaussian elimination with Markowitz pivoting,
//! kernel/image/quotient bases, and the three-term cohomology solve.
//!
//! Vectors are sorted `(index, value)` lists with no explicit zeros. All
//! routines are deterministic: identical input produces identical output.

use crate::field::Field;
use thiserror::Error;

pub type SparseVec<T> = Vec<(u32, T)>;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("coboundary space is not contained in the cocycle space (differential pair is not a complex)")]
    NotAComplex,
    #[error("matrix dimensions do not chain: d_in is {in_rows}x{in_cols}, d_out is {out_rows}x{out_cols}")]
    DimensionMismatch {
        in_rows: usize,
        in_cols: usize,
        out_rows: usize,
        out_cols: usize,
    },
}

/// Density at or above which elimination switches to a dense kernel.
const DENSE_FILL: f64 = 0.2;
/// Never allocate dense storage beyond this many cells.
const DENSE_CELL_CAP: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct SparseMatrix<T> {
    pub n_rows: usize,
    pub n_cols: usize,
    rows: Vec<SparseVec<T>>,
}

impl<T> SparseMatrix<T> {
    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            rows: (0..n_rows).map(|_| Vec::new()).collect(),
        }
    }

    /// Assemble from per-column sparse vectors (entries indexed by row).
    pub fn from_columns(n_rows: usize, columns: Vec<SparseVec<T>>) -> Self {
        let n_cols = columns.len();
        let mut rows: Vec<SparseVec<T>> = (0..n_rows).map(|_| Vec::new()).collect();
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col {
                rows[i as usize].push((j as u32, v));
            }
        }
        SparseMatrix { n_rows, n_cols, rows }
    }

    pub fn from_rows(n_cols: usize, rows: Vec<SparseVec<T>>) -> Self {
        let n_rows = rows.len();
        for r in &rows {
            debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(r.iter().all(|(c, _)| (*c as usize) < n_cols));
        }
        SparseMatrix { n_rows, n_cols, rows }
    }

    pub fn row(&self, i: usize) -> &SparseVec<T> {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseVec<T>] {
        &self.rows
    }

    pub fn n_nonzero(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        let cells = self.n_rows * self.n_cols;
        if cells == 0 {
            0.0
        } else {
            self.n_nonzero() as f64 / cells as f64
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        let row = &self.rows[i];
        row.binary_search_by_key(&(j as u32), |e| e.0)
            .ok()
            .map(|k| &row[k].1)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }
}

impl<T: Clone> SparseMatrix<T> {
    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SparseVec<T>> = vec![Vec::new(); self.n_cols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                cols[*j as usize].push((i as u32, v.clone()));
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            rows: cols,
        }
    }

    /// Restriction to `keep_rows` x `keep_cols`, reindexed to 0..len.
    pub fn submatrix(&self, keep_rows: &[u32], keep_cols: &[u32]) -> Self {
        let mut col_map: Vec<i64> = vec![-1; self.n_cols];
        for (new, &old) in keep_cols.iter().enumerate() {
            col_map[old as usize] = new as i64;
        }
        let rows = keep_rows
            .iter()
            .map(|&old_row| {
                self.rows[old_row as usize]
                    .iter()
                    .filter_map(|(c, v)| {
                        let m = col_map[*c as usize];
                        (m >= 0).then(|| (m as u32, v.clone()))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix {
            n_rows: keep_rows.len(),
            n_cols: keep_cols.len(),
            rows,
        }
    }

    pub fn select_cols(&self, keep_cols: &[u32]) -> Self {
        let all_rows: Vec<u32> = (0..self.n_rows as u32).collect();
        self.submatrix(&all_rows, keep_cols)
    }
}

pub fn mat_vec<F: Field>(
    f: &F,
    m: &SparseMatrix<F::Elem>,
    v: &SparseVec<F::Elem>,
) -> SparseVec<F::Elem> {
    let mut out = Vec::new();
    for (i, row) in m.rows.iter().enumerate() {
        let d = dot(f, row, v);
        if !f.is_zero(&d) {
            out.push((i as u32, d));
        }
    }
    out
}

pub fn mat_mul<F: Field>(
    f: &F,
    a: &SparseMatrix<F::Elem>,
    b: &SparseMatrix<F::Elem>,
) -> SparseMatrix<F::Elem> {
        assert_eq!(a.n_cols, b.n_rows);
        let rows = a
            .rows
            .iter()
            .map(|arow| {
                let mut acc: std::collections::BTreeMap<u32, F::Elem> = Default::default();
                for (k, av) in arow {
                    for (j, bv) in &b.rows[*k as usize] {
                        let term = f.mul(av, bv);
                        match acc.entry(*j) {
                            std::collections::btree_map::Entry::Vacant(e) => {
                                e.insert(term);
                            }
                            std::collections::btree_map::Entry::Occupied(mut e) => {
                                let s = f.add(e.get(), &term);
                                if f.is_zero(&s) {
                                    e.remove();
                                } else {
                                    *e.get_mut() = s;
                                }
                            }
                        }
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
    SparseMatrix {
        n_rows: a.n_rows,
        n_cols: b.n_cols,
        rows,
    }
}

pub fn dot<F: Field>(f: &F, a: &SparseVec<F::Elem>, b: &SparseVec<F::Elem>) -> F::Elem {
    let mut acc = f.zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc = f.add(&acc, &f.mul(&a[i].1, &b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// `a - factor * b`, merging two sorted sparse vectors.
pub fn sub_scaled<F: Field>(
    f: &F,
    a: &SparseVec<F::Elem>,
    factor: &F::Elem,
    b: &SparseVec<F::Elem>,
) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            let v = f.neg(&f.mul(factor, &b[j].1));
            if !f.is_zero(&v) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = f.mul_sub(&a[i].1, factor, &b[j].1);
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_vec<F: Field>(f: &F, s: &F::Elem, v: &SparseVec<F::Elem>) -> SparseVec<F::Elem> {
    v.iter().map(|(i, x)| (*i, f.mul(s, x))).collect()
}

/// Row echelon form produced by [`eliminate`]; reduced form by [`rref`].
///
/// Rows are stored in pivot order: row `i` has a nonzero at `pivots[i]` and
/// zeros at every earlier pivot column (at every other pivot column when
/// `reduced` is set, with pivot entries normalized to one).
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub n_cols: usize,
    pub rank: usize,
    pub rows: Vec<SparseVec<T>>,
    pub pivots: Vec<u32>,
    pub reduced: bool,
}

impl<T> Echelon<T> {
    /// Column -> echelon row position, or -1 for non-pivot columns.
    pub fn col_index(&self) -> Vec<i64> {
        let mut idx = vec![-1i64; self.n_cols];
        for (r, &c) in self.pivots.iter().enumerate() {
            idx[c as usize] = r as i64;
        }
        idx
    }

    /// Ascending list of non-pivot columns.
    pub fn free_cols(&self) -> Vec<u32> {
        let idx = self.col_index();
        (0..self.n_cols as u32)
            .filter(|&c| idx[c as usize] < 0)
            .collect()
    }
}

/// Exact forward elimination.
///
/// Pivots minimize `(nnz(row)-1) * (nnz(col)-1)`, ties to the lowest
/// `(row, col)` in the original indexing. Inputs at or above 20% fill run on a
/// dense kernel instead.
pub fn eliminate<F: Field>(f: &F, m: &SparseMatrix<F::Elem>) -> Echelon<F::Elem> {
    if m.n_rows * m.n_cols <= DENSE_CELL_CAP && m.density() >= DENSE_FILL {
        return eliminate_dense(f, m);
    }
    eliminate_rows(f, m.rows.clone(), m.n_cols)
}

/// Echelonize a list of row vectors (the matrix they stack to).
pub fn eliminate_rows<F: Field>(
    f: &F,
    rows: Vec<SparseVec<F::Elem>>,
    n_cols: usize,
) -> Echelon<F::Elem> {
    // active rows keyed by original index
    let mut active: Vec<(u32, SparseVec<F::Elem>)> = rows
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !r.is_empty())
        .map(|(i, r)| (i as u32, r))
        .collect();
    let mut col_count = vec![0u32; n_cols];
    for (_, r) in &active {
        for (c, _) in r {
            col_count[*c as usize] += 1;
        }
    }

    let mut ech_rows = Vec::new();
    let mut pivots = Vec::new();

    while !active.is_empty() {
        let min_cc = active
            .iter()
            .flat_map(|(_, r)| r.iter())
            .map(|(c, _)| col_count[*c as usize])
            .min()
            .unwrap();
        // best (score, original row, col, position in `active`)
        let mut best: Option<(u128, u32, u32, usize)> = None;
        for (pos, (rid, row)) in active.iter().enumerate() {
            let row_w = (row.len() - 1) as u128;
            if let Some((bscore, ..)) = best {
                if row_w * (min_cc as u128 - 1) >= bscore {
                    continue;
                }
            }
            for (c, _) in row {
                let score = row_w * (col_count[*c as usize] - 1) as u128;
                let better = match best {
                    None => true,
                    Some((bscore, ..)) => score < bscore,
                };
                if better {
                    best = Some((score, *rid, *c, pos));
                }
            }
        }
        let (_, _, pivot_col, pos) = best.expect("non-empty active set has a pivot");
        let (_, pivot_row) = active.remove(pos);
        for (c, _) in &pivot_row {
            col_count[*c as usize] -= 1;
        }
        let pivot_val = pivot_row
            .iter()
            .find(|(c, _)| *c == pivot_col)
            .map(|(_, v)| v.clone())
            .unwrap();

        let mut updated = Vec::with_capacity(active.len());
        for (rid, row) in active.into_iter() {
            let hit = row.binary_search_by_key(&pivot_col, |e| e.0).is_ok();
            if !hit {
                updated.push((rid, row));
                continue;
            }
            for (c, _) in &row {
                col_count[*c as usize] -= 1;
            }
            let val = row
                .iter()
                .find(|(c, _)| *c == pivot_col)
                .map(|(_, v)| v.clone())
                .unwrap();
            let factor = f.div(&val, &pivot_val);
            let new_row = sub_scaled(f, &row, &factor, &pivot_row);
            if !new_row.is_empty() {
                for (c, _) in &new_row {
                    col_count[*c as usize] += 1;
                }
                updated.push((rid, new_row));
            }
        }
        active = updated;
        ech_rows.push(pivot_row);
        pivots.push(pivot_col);
    }

    Echelon {
        n_cols,
        rank: pivots.len(),
        rows: ech_rows,
        pivots,
        reduced: false,
    }
}

fn eliminate_dense<F: Field>(f: &F, m: &SparseMatrix<F::Elem>) -> Echelon<F::Elem> {
    let mut data: Vec<Vec<F::Elem>> = vec![vec![f.zero(); m.n_cols]; m.n_rows];
    for (i, row) in m.rows.iter().enumerate() {
        for (c, v) in row {
            data[i][*c as usize] = v.clone();
        }
    }
    let mut used = vec![false; m.n_rows];
    let mut ech_rows = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..m.n_cols {
        let Some(pr) = (0..m.n_rows).find(|&r| !used[r] && !f.is_zero(&data[r][col])) else {
            continue;
        };
        used[pr] = true;
        let pivot_val = data[pr][col].clone();
        for r in 0..m.n_rows {
            if used[r] || f.is_zero(&data[r][col]) {
                continue;
            }
            let factor = f.div(&data[r][col], &pivot_val);
            for c in col..m.n_cols {
                if !f.is_zero(&data[pr][c]) {
                    data[r][c] = f.mul_sub(&data[r][c], &factor, &data[pr][c]);
                }
            }
        }
        let sparse: SparseVec<F::Elem> = data[pr]
            .iter()
            .enumerate()
            .filter(|(_, v)| !f.is_zero(v))
            .map(|(c, v)| (c as u32, v.clone()))
            .collect();
        ech_rows.push(sparse);
        pivots.push(col as u32);
    }
    Echelon {
        n_cols: m.n_cols,
        rank: pivots.len(),
        rows: ech_rows,
        pivots,
        reduced: false,
    }
}

/// Back-substitute an echelon into reduced form: pivot entries one, pivot
/// columns cleared from all other rows.
pub fn reduce_echelon<F: Field>(f: &F, mut ech: Echelon<F::Elem>) -> Echelon<F::Elem> {
    if ech.reduced {
        return ech;
    }
    for i in 0..ech.rank {
        let piv = ech.pivots[i];
        let pv = ech.rows[i]
            .iter()
            .find(|(c, _)| *c == piv)
            .map(|(_, v)| v.clone())
            .unwrap();
        let inv = f.inv(&pv);
        ech.rows[i] = scale_vec(f, &inv, &ech.rows[i]);
    }
    for i in (0..ech.rank).rev() {
        let piv = ech.pivots[i];
        let pivot_row = ech.rows[i].clone();
        for j in 0..i {
            if let Ok(k) = ech.rows[j].binary_search_by_key(&piv, |e| e.0) {
                let factor = ech.rows[j][k].1.clone();
                ech.rows[j] = sub_scaled(f, &ech.rows[j], &factor, &pivot_row);
            }
        }
    }
    ech.reduced = true;
    ech
}

pub fn rref<F: Field>(f: &F, m: &SparseMatrix<F::Elem>) -> Echelon<F::Elem> {
    reduce_echelon(f, eliminate(f, m))
}

pub fn rref_rows<F: Field>(
    f: &F,
    rows: Vec<SparseVec<F::Elem>>,
    n_cols: usize,
) -> Echelon<F::Elem> {
    reduce_echelon(f, eliminate_rows(f, rows, n_cols))
}

/// Reduce `v` against the echelon, clearing every pivot coordinate.
pub fn reduce_vec<F: Field>(
    f: &F,
    ech: &Echelon<F::Elem>,
    col_index: &[i64],
    v: &SparseVec<F::Elem>,
) -> SparseVec<F::Elem> {
    let mut v = v.clone();
    loop {
        let mut hit = None;
        for (c, val) in &v {
            let r = col_index[*c as usize];
            if r >= 0 {
                hit = Some((r as usize, val.clone()));
                break;
            }
        }
        let Some((r, val)) = hit else {
            return v;
        };
        let piv = ech.pivots[r];
        let pv = ech.rows[r]
            .iter()
            .find(|(c, _)| *c == piv)
            .map(|(_, x)| x.clone())
            .unwrap();
        let factor = f.div(&val, &pv);
        v = sub_scaled(f, &v, &factor, &ech.rows[r]);
    }
}

/// Basis of the null space `{x : Mx = 0}`, one vector per free column, each
/// verified by multiplication.
pub fn kernel_basis<F: Field>(f: &F, m: &SparseMatrix<F::Elem>) -> Vec<SparseVec<F::Elem>> {
    let r = rref(f, m);
    let basis = kernel_from_rref(f, &r);
    for v in &basis {
        debug_assert!(!v.is_empty());
        let prod = mat_vec(f, m, v);
        assert!(prod.is_empty(), "kernel vector fails verification");
    }
    basis
}

/// Kernel vectors read off a reduced echelon (free column -> one vector).
pub fn kernel_from_rref<F: Field>(f: &F, r: &Echelon<F::Elem>) -> Vec<SparseVec<F::Elem>> {
    assert!(r.reduced);
    r.free_cols()
        .into_iter()
        .map(|fc| {
            let mut v: SparseVec<F::Elem> = vec![(fc, f.one())];
            for (i, row) in r.rows.iter().enumerate() {
                if let Ok(k) = row.binary_search_by_key(&fc, |e| e.0) {
                    v.push((r.pivots[i], f.neg(&row[k].1)));
                }
            }
            v.sort_unstable_by_key(|e| e.0);
            v
        })
        .collect()
}

/// Basis of the column space, size `rank(M)`.
pub fn image_basis<F: Field>(f: &F, m: &SparseMatrix<F::Elem>) -> Vec<SparseVec<F::Elem>> {
    eliminate(f, &m.transpose()).rows
}

/// A particular solution of `M x = u` (free variables zero), or `None` when
/// the system is inconsistent. Solved by reducing the augmented system.
pub fn solve<F: Field>(
    f: &F,
    m: &SparseMatrix<F::Elem>,
    u: &SparseVec<F::Elem>,
) -> Option<SparseVec<F::Elem>> {
    let aug_col = m.n_cols as u32;
    let mut rows: Vec<SparseVec<F::Elem>> = m.rows().to_vec();
    for (i, v) in u {
        rows[*i as usize].push((aug_col, v.clone()));
    }
    let r = reduce_echelon(f, eliminate_rows(f, rows, m.n_cols + 1));
    let mut x: SparseVec<F::Elem> = Vec::new();
    for (i, &piv) in r.pivots.iter().enumerate() {
        if piv == aug_col {
            return None;
        }
        if let Ok(idx) = r.rows[i].binary_search_by_key(&aug_col, |e| e.0) {
            x.push((piv, r.rows[i][idx].1.clone()));
        }
    }
    x.sort_unstable_by_key(|e| e.0);
    let residual = sub_scaled(f, u, &f.one(), &mat_vec(f, m, &x));
    assert!(residual.is_empty(), "solver returned a non-solution");
    Some(x)
}

/// Representatives of `span(Z) / span(B)`.
///
/// `B` is echelonized, the `Z` vectors are reduced against it, and a maximal
/// independent set of the reduced vectors is returned with leading
/// coefficients normalized to one. Errors if `span(B)` is not inside `span(Z)`.
pub fn quotient_basis<F: Field>(
    f: &F,
    z: &[SparseVec<F::Elem>],
    b: &[SparseVec<F::Elem>],
    n_cols: usize,
) -> Result<Vec<SparseVec<F::Elem>>, LinalgError> {
    let z_ech = rref_rows(f, z.to_vec(), n_cols);
    let z_idx = z_ech.col_index();
    for bv in b {
        if !reduce_vec(f, &z_ech, &z_idx, bv).is_empty() {
            return Err(LinalgError::NotAComplex);
        }
    }
    let b_ech = rref_rows(f, b.to_vec(), n_cols);
    let b_idx = b_ech.col_index();

    let mut reps = Vec::new();
    let mut seen = rref_rows(f, Vec::new(), n_cols);
    let mut seen_idx = seen.col_index();
    for zv in z {
        let reduced = reduce_vec(f, &b_ech, &b_idx, zv);
        if reduced.is_empty() {
            continue;
        }
        let fully = reduce_vec(f, &seen, &seen_idx, &reduced);
        if fully.is_empty() {
            continue;
        }
        let lead = f.inv(&fully[0].1);
        let fully = scale_vec(f, &lead, &fully);
        seen.rows.push(fully.clone());
        seen.pivots.push(fully[0].0);
        seen.rank += 1;
        seen_idx[fully[0].0 as usize] = (seen.rank - 1) as i64;

        let lead = f.inv(&reduced[0].1);
        reps.push(scale_vec(f, &lead, &reduced));
    }
    debug_assert_eq!(reps.len(), z_ech.rank - b_ech.rank);
    Ok(reps)
}

/// Output of the three-term solve over one block
/// `C^{k-1} -> C^k -> C^{k+1}`.
pub struct ThreeTerm<T> {
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub reps: Vec<SparseVec<T>>,
    /// Reduced echelon spanning the coboundary space, kept when representatives
    /// were requested (for membership tests against `B`).
    pub b_rref: Option<Echelon<T>>,
}

/// Cocycle/coboundary/cohomology dimensions of a three-term block, with
/// optional representatives.
///
/// Ranks alone settle the dimensions. Representatives come from the kernel of
/// `d_out` restricted to the non-pivot columns of the echelonized coboundary
/// space: those kernel vectors are exact cocycles, already reduced against
/// `B`, and their count is `dim H`.
pub fn three_term_cohomology<F: Field>(
    f: &F,
    d_in: &SparseMatrix<F::Elem>,
    d_out: &SparseMatrix<F::Elem>,
    want_reps: bool,
) -> Result<ThreeTerm<F::Elem>, LinalgError> {
    if d_in.n_rows != d_out.n_cols {
        return Err(LinalgError::DimensionMismatch {
            in_rows: d_in.n_rows,
            in_cols: d_in.n_cols,
            out_rows: d_out.n_rows,
            out_cols: d_out.n_cols,
        });
    }
    let dim_ck = d_in.n_rows;

    if !want_reps {
        let rank_in = eliminate(f, d_in).rank;
        let rank_out = eliminate(f, d_out).rank;
        let dim_z = dim_ck - rank_out;
        if rank_in > dim_z {
            return Err(LinalgError::NotAComplex);
        }
        return Ok(ThreeTerm {
            dim_z,
            dim_b: rank_in,
            dim_h: dim_z - rank_in,
            reps: Vec::new(),
            b_rref: None,
        });
    }

    let b = reduce_echelon(f, eliminate(f, &d_in.transpose()));
    let free = b.free_cols();
    let sub = d_out.select_cols(&free);
    let sub_rref = rref(f, &sub);
    let rank_out = sub_rref.rank;
    let dim_z = dim_ck - rank_out;
    let dim_b = b.rank;
    if dim_b > dim_z {
        return Err(LinalgError::NotAComplex);
    }
    let dim_h = dim_z - dim_b;

    let reps: Vec<SparseVec<F::Elem>> = kernel_from_rref(f, &sub_rref)
        .into_iter()
        .map(|kv| {
            let mut v: SparseVec<F::Elem> = kv
                .into_iter()
                .map(|(c, val)| (free[c as usize], val))
                .collect();
            v.sort_unstable_by_key(|e| e.0);
            let lead = f.inv(&v[0].1);
            scale_vec(f, &lead, &v)
        })
        .collect();
    assert_eq!(reps.len(), dim_h, "kernel of restricted map must match dim H");
    for rep in &reps {
        let img = mat_vec(f, d_out, rep);
        assert!(img.is_empty(), "representative is not a cocycle");
    }

    Ok(ThreeTerm {
        dim_z,
        dim_b,
        dim_h,
        reps,
        b_rref: Some(b),
    })
}
