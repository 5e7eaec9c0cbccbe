//! Decomposition of a three-term graded complex into minimal direct summands.
//!
//! A minimal subcomplex is a connected component of the tripartite interaction
//! graph whose nodes are the monomials of the three layers and whose edges are
//! the nonzero entries of the two differentials. Components are extracted
//! seed-by-seed from the lowest-index unconsumed middle-layer monomial, which
//! makes the partition deterministic.

use crate::linalg::SparseMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SubcomplexError {
    #[error("seed monomial {0} already consumed by an earlier subcomplex")]
    SeedConsumed(u32),
}

/// Adjacency structure over the monomials of layers `k-1`, `k`, `k+1`.
pub struct InteractionGraph {
    pub n_km1: usize,
    pub n_k: usize,
    pub n_kp1: usize,
    k_to_km1: Vec<Vec<u32>>,
    km1_to_k: Vec<Vec<u32>>,
    k_to_kp1: Vec<Vec<u32>>,
    kp1_to_k: Vec<Vec<u32>>,
}

/// Index lists (into the full layer bases) of one subcomplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcomplexShape {
    pub seed: u32,
    pub layer_km1: Vec<u32>,
    pub layer_k: Vec<u32>,
    pub layer_kp1: Vec<u32>,
}

/// A minimal subcomplex with its two restricted differentials.
pub struct Subcomplex<T> {
    pub shape: SubcomplexShape,
    pub d_in: SparseMatrix<T>,
    pub d_out: SparseMatrix<T>,
}

/// Build the interaction graph of `d_in: C^{k-1} -> C^k` (rows indexed by
/// `C^k`) and `d_out: C^k -> C^{k+1}` (rows indexed by `C^{k+1}`).
pub fn interaction_graph<T>(d_in: &SparseMatrix<T>, d_out: &SparseMatrix<T>) -> InteractionGraph {
    assert_eq!(d_in.n_rows, d_out.n_cols, "layers must chain");
    let (n_km1, n_k, n_kp1) = (d_in.n_cols, d_in.n_rows, d_out.n_rows);
    let mut k_to_km1 = vec![Vec::new(); n_k];
    let mut km1_to_k = vec![Vec::new(); n_km1];
    for (row, entries) in d_in.rows().iter().enumerate() {
        for (col, _) in entries {
            k_to_km1[row].push(*col);
            km1_to_k[*col as usize].push(row as u32);
        }
    }
    let mut k_to_kp1 = vec![Vec::new(); n_k];
    let mut kp1_to_k = vec![Vec::new(); n_kp1];
    for (row, entries) in d_out.rows().iter().enumerate() {
        for (col, _) in entries {
            k_to_kp1[*col as usize].push(row as u32);
            kp1_to_k[row].push(*col);
        }
    }
    InteractionGraph {
        n_km1,
        n_k,
        n_kp1,
        k_to_km1,
        km1_to_k,
        k_to_kp1,
        kp1_to_k,
    }
}

/// The connected component of `seed` (a middle-layer monomial), as sorted
/// index lists per layer. `consumed` tracks middle-layer monomials already
/// assigned to earlier subcomplexes.
pub fn construct_subcomplex(
    graph: &InteractionGraph,
    seed: u32,
    consumed: &mut [bool],
) -> Result<SubcomplexShape, SubcomplexError> {
    if consumed[seed as usize] {
        return Err(SubcomplexError::SeedConsumed(seed));
    }
    let mut in_km1 = vec![false; graph.n_km1];
    let mut in_kp1 = vec![false; graph.n_kp1];
    let mut layer_k = Vec::new();
    let mut queue = vec![seed];
    consumed[seed as usize] = true;
    while let Some(v) = queue.pop() {
        layer_k.push(v);
        for &u in &graph.k_to_km1[v as usize] {
            if !in_km1[u as usize] {
                in_km1[u as usize] = true;
                for &w in &graph.km1_to_k[u as usize] {
                    if !consumed[w as usize] {
                        consumed[w as usize] = true;
                        queue.push(w);
                    }
                }
            }
        }
        for &u in &graph.k_to_kp1[v as usize] {
            if !in_kp1[u as usize] {
                in_kp1[u as usize] = true;
                for &w in &graph.kp1_to_k[u as usize] {
                    if !consumed[w as usize] {
                        consumed[w as usize] = true;
                        queue.push(w);
                    }
                }
            }
        }
    }
    layer_k.sort_unstable();
    let layer_km1 = (0..graph.n_km1 as u32)
        .filter(|&i| in_km1[i as usize])
        .collect();
    let layer_kp1 = (0..graph.n_kp1 as u32)
        .filter(|&i| in_kp1[i as usize])
        .collect();
    Ok(SubcomplexShape {
        seed,
        layer_km1,
        layer_k,
        layer_kp1,
    })
}

/// Partition the middle layer into minimal subcomplexes, seeded at the
/// lowest-index unconsumed monomial each round.
pub fn partition_shapes(graph: &InteractionGraph) -> Vec<SubcomplexShape> {
    let mut consumed = vec![false; graph.n_k];
    let mut out = Vec::new();
    for seed in 0..graph.n_k as u32 {
        if !consumed[seed as usize] {
            out.push(construct_subcomplex(graph, seed, &mut consumed).unwrap());
        }
    }
    out
}

/// Partition and extract the restricted differentials per subcomplex.
pub fn partition_complex<T: Clone + PartialEq>(
    d_in: &SparseMatrix<T>,
    d_out: &SparseMatrix<T>,
) -> Vec<Subcomplex<T>> {
    let graph = interaction_graph(d_in, d_out);
    partition_shapes(&graph)
        .into_iter()
        .map(|shape| {
            let block_in = d_in.submatrix(&shape.layer_k, &shape.layer_km1);
            let block_out = d_out.submatrix(&shape.layer_kp1, &shape.layer_k);
            Subcomplex {
                shape,
                d_in: block_in,
                d_out: block_out,
            }
        })
        .collect()
}
