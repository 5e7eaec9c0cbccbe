//! Acceptance suite: pins the engine against the known exact cohomology of
//! H(2|0) and Po(2|0) up to grade 8, the reference subcomplex decomposition
//! of the (7, 8) cell, prime-field/rational agreement, and the performance
//! ordering of the two algorithms.
//!
//! Run with `--nocapture` to see one PASS line per criterion; the heavy cells
//! take tens of minutes of single-core time.

use liecoh::algebra::Algebra;
use liecoh::cochain::{
    differential_matrix, generate_monomials, monomial_cochain, wedge, CochainMonomial,
    CochainVector,
};
use liecoh::engine::{
    build_cell, central_wedge_check, compute_split, compute_straightforward, grid_report,
    group_stats, same_quotient_span, self_test, verify_nontrivial_class, AlgebraSource, CellOutcome,
    GridCell, Mode,
};
use liecoh::field::{Field, PrimeField, Rationals, DEFAULT_PRIME};
use liecoh::linalg::mat_vec;
use num::BigRational;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::Instant;

fn h_source() -> AlgebraSource {
    AlgebraSource::parse_family("H:2|0").unwrap()
}

fn po_source() -> AlgebraSource {
    AlgebraSource::parse_family("Po:2|0").unwrap()
}

fn pass(n: usize, name: &str, details: String) {
    println!("[acceptance] criterion {n} ({name}): PASS - {details}");
}

/// H(2|0) split-mode grid over degrees 1..=12 and grades -2..=4, shared by
/// criteria 2, 6, and 8.
fn h_grid_q() -> &'static Vec<GridCell> {
    static GRID: OnceLock<Vec<GridCell>> = OnceLock::new();
    GRID.get_or_init(|| {
        let f = Rationals;
        let src = h_source();
        let alg = src.materialize_many(&[(12, 4), (12, -2)]).unwrap();
        grid_report(&f, &alg, 1..=12, -2..=4, Mode::Split).unwrap()
    })
}

/// The (7, 8) cell of H(2|0) with representatives, shared by criteria 3 and 5.
fn h78() -> &'static (Algebra, CellOutcome<Rationals>) {
    static CELL: OnceLock<(Algebra, CellOutcome<Rationals>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = Rationals;
        let alg = h_source().materialize(7, 8).unwrap();
        let out = compute_split(&f, &alg, 7, 8, true).unwrap();
        (alg, out)
    })
}

/// The (10, 8) cell of H(2|0) with representatives, shared by criteria 4 and 5.
fn h108() -> &'static (Algebra, CellOutcome<Rationals>) {
    static CELL: OnceLock<(Algebra, CellOutcome<Rationals>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = Rationals;
        let alg = h_source().materialize(10, 8).unwrap();
        let out = compute_split(&f, &alg, 10, 8, true).unwrap();
        (alg, out)
    })
}

#[test]
fn criterion_1_central_extension_cell() {
    let f = Rationals;
    let alg = h_source().materialize(2, -2).unwrap();
    let t0 = Instant::now();
    let split = compute_split(&f, &alg, 2, -2, true).unwrap();
    let straight = compute_straightforward(&f, &alg, 2, -2, true).unwrap();
    let elapsed = t0.elapsed();

    for out in [&split, &straight] {
        assert_eq!(out.dim_c[1], 1, "dim C^2_-2");
        assert_eq!(out.dim_h, 1, "dim H^2_-2");
        let reps = out.rep_cochains(&f);
        assert_eq!(reps.len(), 1);
        let (mono, coeff) = reps[0].terms.iter().next().unwrap();
        assert_eq!(mono.display(&alg), "p'^q'");
        assert_eq!(coeff, &f.one());
        assert_eq!(reps[0].terms.len(), 1);
    }
    assert_eq!(split.n_subcomplexes, 1);
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "both modes took {elapsed:?}, budget 1 s"
    );
    pass(
        1,
        "central extension cell",
        format!("dim C = 1, 1 subcomplex, dim H = 1, representative p'^q', {elapsed:?}"),
    );
}

#[test]
fn criterion_2_nontrivial_class_set() {
    let grid = h_grid_q();
    let classes: BTreeSet<(usize, i64)> = grid
        .iter()
        .filter(|c| c.dim_h > 0)
        .map(|c| (c.k, c.g))
        .collect();
    let expected: BTreeSet<(usize, i64)> = [(2usize, -2i64), (5, -2), (7, 0)].into_iter().collect();
    assert_eq!(
        classes, expected,
        "classes over k in [1,12], g in [-2,4] must be exactly (2,-2), (5,-2), (7,0)"
    );
    for c in grid.iter().filter(|c| c.dim_h > 0) {
        assert_eq!(c.dim_h, 1, "({}, {}) class is 1-dimensional", c.k, c.g);
    }
    pass(
        2,
        "nontrivial class set",
        format!(
            "dim H = 1 exactly at (2,-2), (5,-2), (7,0) across {} nonempty cells",
            grid.len()
        ),
    );
}

#[test]
fn criterion_3_grade_eight_degree_seven_structure() {
    let (_, out) = h78();
    assert_eq!(out.dim_c[1], 25488, "dim C^7_8");
    assert_eq!(out.n_subcomplexes, 21, "number of subcomplexes");
    assert_eq!(out.max_block, 3148, "largest middle layer");
    assert_eq!(out.dim_h, 1, "dim H^7_8");

    let grouped: Vec<([usize; 6], usize)> = group_stats(&out.stats)
        .into_iter()
        .map(|(s, c)| {
            (
                [s.dim_ckm1, s.dim_ck, s.dim_ckp1, s.dim_z, s.dim_b, s.dim_h],
                c,
            )
        })
        .collect();
    let expected: Vec<([usize; 6], usize)> = vec![
        ([0, 1, 1, 0, 0, 0], 2),
        ([12, 17, 11, 9, 9, 0], 2),
        ([72, 80, 54, 43, 43, 0], 2),
        ([223, 243, 167, 130, 130, 0], 2),
        ([507, 540, 375, 292, 292, 0], 2),
        ([909, 976, 702, 520, 520, 0], 2),
        ([1406, 1536, 1120, 813, 813, 0], 2),
        ([1928, 2117, 1578, 1114, 1114, 0], 2),
        ([2382, 2652, 1992, 1387, 1387, 0], 2),
        ([2695, 3008, 2286, 1568, 1568, 0], 2),
        ([2806, 3148, 2391, 1640, 1639, 1], 1),
    ];
    assert_eq!(grouped, expected, "subcomplex stat rows with repetitions");
    pass(
        3,
        "(7,8) subcomplex structure",
        format!(
            "dim C = 25488, 21 subcomplexes, max block 3148, dim H = 1, all 11 stat rows match ({} ms)",
            out.timings.total_ms
        ),
    );
}

#[test]
fn criterion_4_degree_ten_class_location() {
    let f = Rationals;
    let alg6 = h_source().materialize(10, 6).unwrap();
    let at6 = compute_split(&f, &alg6, 10, 6, false).unwrap();
    let (_, at8) = h108();

    // the computation resolves the grade ambiguity for the degree-10 class
    assert_eq!(
        (at6.dim_h == 1) as u8 + (at8.dim_h == 1) as u8,
        1,
        "exactly one of (10,6), (10,8) carries the class (got H^10_6 = {}, H^10_8 = {})",
        at6.dim_h,
        at8.dim_h
    );
    let location = if at6.dim_h == 1 { (10, 6) } else { (10, 8) };
    assert_eq!(
        location,
        (10, 8),
        "resolved location regressed from the verified computation"
    );
    assert_eq!((at6.dim_c[1], at6.dim_h), (217, 0));
    assert_eq!((at8.dim_c[1], at8.dim_h), (2578, 1));
    pass(
        4,
        "degree-10 class location",
        format!(
            "resolved by computation: dim H^10_6 = {} and dim H^10_8 = {}; the degree-10 class \
             sits at grade 8 (cell 2578/17/358), so the prose location \"grade 6\" is flagged \
             as a typo, consistent with the grade-6 degree-11 consequence for Po(2|0)",
            at6.dim_h, at8.dim_h
        ),
    );
}

/// Lift a cochain over an H(2|0) window into a Po(2|0) window by matching
/// generator monomials.
fn lift_to_po(
    h_alg: &Algebra,
    po_alg: &Algebra,
    c: &CochainVector<BigRational>,
) -> CochainVector<BigRational> {
    let index: BTreeMap<_, u32> = po_alg
        .basis
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.monomial.as_ref().map(|m| (m.clone(), i as u32)))
        .collect();
    let mut out = CochainVector::zero(c.degree, c.grade);
    for (mono, v) in &c.terms {
        let duals: Vec<u32> = mono
            .duals
            .iter()
            .map(|&i| index[h_alg.basis[i as usize].monomial.as_ref().unwrap()])
            .collect();
        out.terms.insert(CochainMonomial::new(duals), v.clone());
    }
    out
}

/// Exact cocycle check at `(k, g)` via differential columns over the
/// cochain's own support.
fn is_exact_cocycle(
    f: &Rationals,
    alg: &Algebra,
    k: usize,
    g: i64,
    w: &CochainVector<BigRational>,
) -> bool {
    let codomain = generate_monomials(alg, k + 1, g).unwrap();
    let support: Vec<CochainMonomial> = w.terms.keys().cloned().collect();
    let cols = differential_matrix(f, alg, &support, &codomain, true).unwrap();
    let w_local: Vec<(u32, BigRational)> = w
        .terms
        .values()
        .cloned()
        .enumerate()
        .map(|(i, v)| (i as u32, v))
        .collect();
    mat_vec(f, &cols, &w_local).is_empty()
}

#[test]
fn criterion_5_poisson_delta() {
    let f = Rationals;
    let src = po_source();

    // mandatory subrange: grid over k in [1,12], g in [-4,0]
    let alg = src.materialize_many(&[(12, 0), (12, -4)]).unwrap();
    let grid = grid_report(&f, &alg, 1..=12, -4..=0, Mode::Split).unwrap();
    let classes: BTreeSet<(usize, i64)> = grid
        .iter()
        .filter(|c| c.dim_h > 0)
        .map(|c| (c.k, c.g))
        .collect();
    // The published containment claims: the classes inherited from H(2|0)
    // minus (2,-2), plus (6,-4) and (8,-2). The computation finds one more
    // grade -4 class, at (3,-4): the wedge of the dual central 1-cochain with
    // the extension 2-cocycle p'^q' (which is exact in Po, so C^2_-4 = 0 makes
    // Z'^p'^q' a nontrivial cocycle). It is flagged below; it contradicts no
    // containment, only the impression that the published list was complete.
    assert!(!classes.contains(&(2, -2)), "(2,-2) must die in Po");
    for must in [(5usize, -2i64), (7, 0), (6, -4), (8, -2)] {
        assert!(classes.contains(&must), "{must:?} must be present in Po");
    }
    let expected: BTreeSet<(usize, i64)> = [(3usize, -4i64), (5, -2), (6, -4), (7, 0), (8, -2)]
        .into_iter()
        .collect();
    assert_eq!(
        classes, expected,
        "the exact class set for g <= 0 (including the (3,-4) consequence of the extension class)"
    );
    println!(
        "[acceptance] criterion 5 note: the computation also finds dim H^3_-4(Po(2|0)) = 1, \
         represented by Z'^p'^q' (= c(Z) wedged with the extension cocycle); it is absent from \
         the published additional-class list, which states containment only"
    );

    // the two low-grade classes are central wedges of the lower classes
    let lower52 = compute_split(&f, &alg, 5, -2, true).unwrap();
    assert_eq!(lower52.dim_h, 1);
    assert!(
        central_wedge_check(&f, &alg, &lower52, 6, -4).unwrap(),
        "H^6_-4 = H^5_-2 ^ c(Z)"
    );
    let lower70 = compute_split(&f, &alg, 7, 0, true).unwrap();
    assert_eq!(lower70.dim_h, 1);
    assert!(
        central_wedge_check(&f, &alg, &lower70, 8, -2).unwrap(),
        "H^8_-2 = H^7_0 ^ c(Z)"
    );

    // stretch: the grade-6 classes at degrees 8 and 11 are present; each is
    // exhibited as an exact cocycle built from the corresponding H(2|0)
    // class (with the central-extension correction term where needed) and
    // verified not to reduce to zero against the coboundary space over Q.
    let (h78_alg, h78_out) = h78();
    let po86 = src.materialize(8, 6).unwrap();
    let w86 = wedge_class_with_correction(&f, h78_alg, &h78_out.rep_cochains(&f)[0], &po86, 8, 6);
    assert!(is_exact_cocycle(&f, &po86, 8, 6, &w86));
    assert!(
        verify_nontrivial_class(&f, &po86, 8, 6, &w86).unwrap(),
        "H^8_6(Po) class survives reduction against the coboundary space"
    );

    let (h108_alg, h108_out) = h108();
    let po116 = src.materialize(11, 6).unwrap();
    let w116 =
        wedge_class_with_correction(&f, h108_alg, &h108_out.rep_cochains(&f)[0], &po116, 11, 6);
    assert!(is_exact_cocycle(&f, &po116, 11, 6, &w116));
    assert!(
        verify_nontrivial_class(&f, &po116, 11, 6, &w116).unwrap(),
        "H^11_6(Po) class survives reduction against the coboundary space"
    );

    pass(
        5,
        "Po(2|0) class delta",
        format!(
            "g <= 0 classes are (5,-2), (7,0), (6,-4), (8,-2) plus the flagged (3,-4), \
             (2,-2) absent, over {} cells; central wedge checks pass at (6,-4) and (8,-2); \
             grade-6 classes exhibited at (8,6) and (11,6) by exact nontrivial cocycles",
            grid.len()
        ),
    );
}

/// Build a representative of the central-wedge class `[b] ^ [Z']` at
/// `(k, g)`: `w = a + b ^ Z'` where the correction `a` (supported on the
/// central-free sector) solves `d a = -d(b ^ Z')`. For a cocycle `b` the
/// defect `d(b ^ Z')` lives in the central-free sector, and it is a
/// coboundary there whenever the H-cohomology vanishes in the defect's cell.
fn wedge_class_with_correction(
    f: &Rationals,
    h_alg: &Algebra,
    b: &CochainVector<BigRational>,
    po_alg: &Algebra,
    k: usize,
    g: i64,
) -> CochainVector<BigRational> {
    let z = po_alg.central_index.unwrap();
    let b_po = lift_to_po(h_alg, po_alg, b);
    let zc = monomial_cochain(f, po_alg, &CochainMonomial::new(vec![z]));
    let bz = wedge(f, po_alg, &b_po, &zc);
    assert!(!bz.is_zero());

    // defect v = d(b ^ Z') over the full codomain
    let codomain = generate_monomials(po_alg, k + 1, g).unwrap();
    let support: Vec<CochainMonomial> = bz.terms.keys().cloned().collect();
    let cols = differential_matrix(f, po_alg, &support, &codomain, true).unwrap();
    let bz_local: Vec<(u32, BigRational)> = bz
        .terms
        .values()
        .cloned()
        .enumerate()
        .map(|(i, v)| (i as u32, v))
        .collect();
    let v = mat_vec(f, &cols, &bz_local);
    if v.is_empty() {
        return bz;
    }

    // map the defect into the H(2|0) cell at (k, g): it cannot touch Z'
    let h_cell = AlgebraSource::parse_family("H:2|0")
        .unwrap()
        .materialize_many(&[(k + 1, g), (k, g)])
        .unwrap();
    let h_index: BTreeMap<_, u32> = h_cell
        .basis
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.monomial.as_ref().map(|m| (m.clone(), i as u32)))
        .collect();
    let h_dom = generate_monomials(&h_cell, k, g).unwrap();
    let h_cod = generate_monomials(&h_cell, k + 1, g).unwrap();
    let h_cod_index: BTreeMap<&[u32], u32> = h_cod
        .iter()
        .enumerate()
        .map(|(i, m)| (m.duals.as_slice(), i as u32))
        .collect();
    let mut u: Vec<(u32, BigRational)> = Vec::new();
    for (i, val) in &v {
        let mono = &codomain[*i as usize];
        assert!(
            !mono.duals.contains(&z),
            "wedge defect must stay in the central-free sector"
        );
        let h_duals: Vec<u32> = mono
            .duals
            .iter()
            .map(|&j| h_index[po_alg.basis[j as usize].monomial.as_ref().unwrap()])
            .collect();
        u.push((h_cod_index[h_duals.as_slice()], f.neg(val)));
    }
    u.sort_unstable_by_key(|e| e.0);

    let m = differential_matrix(f, &h_cell, &h_dom, &h_cod, true).unwrap();
    let a = liecoh::linalg::solve(f, &m, &u)
        .expect("correction exists: the defect class vanishes in the H cell");
    let a_cochain = liecoh::cochain::vector_to_cochain(f, &h_dom, k, g, &a);
    let mut w = lift_to_po(&h_cell, po_alg, &a_cochain);
    for (mono, val) in &bz.terms {
        w.terms.insert(mono.clone(), val.clone());
    }
    w
}

#[test]
fn criterion_6_mode_equivalence() {
    let f = Rationals;
    let src = h_source();
    let grid = h_grid_q();
    let mut checked = 0usize;
    for cell in grid.iter().filter(|c| c.dim_c <= 300) {
        let alg = src.materialize(cell.k, cell.g).unwrap();
        let a = compute_split(&f, &alg, cell.k, cell.g, true).unwrap();
        let b = compute_straightforward(&f, &alg, cell.k, cell.g, true).unwrap();
        assert_eq!(
            (a.dim_z, a.dim_b, a.dim_h),
            (b.dim_z, b.dim_b, b.dim_h),
            "({}, {})",
            cell.k,
            cell.g
        );
        assert_eq!(a.dim_h, cell.dim_h, "grid agrees at ({}, {})", cell.k, cell.g);
        let ctx = build_cell::<Rationals>(&f, &alg, cell.k, cell.g).unwrap();
        assert!(
            same_quotient_span(&f, &ctx, &a.rep_vectors, &b.rep_vectors),
            "representative spans at ({}, {})",
            cell.k,
            cell.g
        );
        checked += 1;
    }
    assert!(checked > 20, "expected a substantial set of small cells");
    pass(
        6,
        "mode equivalence",
        format!("split and straightforward agree on {checked} cells with dim <= 300"),
    );
}

#[test]
fn criterion_7_property_suites() {
    let f = Rationals;
    let t0 = Instant::now();
    let fixtures_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut summaries = Vec::new();

    for (label, source) in [
        ("H(2|0)", h_source()),
        ("Po(2|0)", po_source()),
        ("H(2|1)", AlgebraSource::parse_family("H:2|1").unwrap()),
    ] {
        let alg = source.materialize_many(&[(7, 3)]).unwrap();
        let report = self_test(&f, &alg, 5, -2..=3);
        assert!(report.all_passed(), "{label}: {:#?}", report.entries);
        summaries.push(format!("{label} ok"));
    }
    for file in ["abelian.json", "sl2.json"] {
        let text = std::fs::read_to_string(fixtures_dir.join(file)).unwrap();
        let alg = liecoh::parse_structure_constants(&text, file).unwrap();
        let report = self_test(&f, &alg, 5, -2..=3);
        assert!(report.all_passed(), "{file}: {:#?}", report.entries);
        summaries.push(format!("{file} ok"));
    }
    let elapsed = t0.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "property suites took {elapsed:?}, budget 5 min"
    );
    pass(
        7,
        "property suites",
        format!("{} in {elapsed:?}", summaries.join(", ")),
    );
}

#[test]
fn criterion_8_finite_field_hint_mode() {
    let fp = PrimeField::new(DEFAULT_PRIME).unwrap();
    let src = h_source();
    let alg = src.materialize_many(&[(12, 4), (12, -2)]).unwrap();
    let fp_grid = grid_report(&fp, &alg, 1..=12, -2..=4, Mode::Split).unwrap();
    let q_grid = h_grid_q();

    let q_dims: BTreeMap<(usize, i64), usize> =
        q_grid.iter().map(|c| ((c.k, c.g), c.dim_h)).collect();
    let mut mismatches = Vec::new();
    assert_eq!(fp_grid.len(), q_grid.len(), "same nonempty cells");
    for c in &fp_grid {
        let qh = q_dims[&(c.k, c.g)];
        if c.dim_h != qh {
            // a mismatch is reported and flags the instance, never a panic
            println!(
                "[acceptance] criterion 8 flag: ({}, {}) dim H over F_{} = {} vs {} over Q",
                c.k, c.g, DEFAULT_PRIME, c.dim_h, qh
            );
            mismatches.push((c.k, c.g));
        }
    }
    assert!(
        mismatches.is_empty(),
        "hint mode disagreed with the rational result on {mismatches:?}"
    );
    pass(
        8,
        "finite-field hint mode",
        format!(
            "dim H over F_{DEFAULT_PRIME} matches Q on all {} instances",
            fp_grid.len()
        ),
    );
}

/// Supplementary: the low-grade columns of the reference table, cell by cell
/// (dim C, subcomplex count, largest block).
#[test]
fn reference_table_low_grades() {
    let grid = h_grid_q();
    let by_pos: BTreeMap<(usize, i64), (usize, usize, usize)> = grid
        .iter()
        .map(|c| ((c.k, c.g), (c.dim_c, c.n_subcomplexes, c.max_subdim)))
        .collect();
    let expected: &[(usize, i64, usize, usize, usize)] = &[
        (2, -2, 1, 1, 1),
        (3, -2, 3, 3, 1),
        (4, -2, 3, 3, 1),
        (5, -2, 1, 1, 1),
        (1, -1, 2, 2, 1),
        (2, -1, 6, 4, 2),
        (3, -1, 10, 4, 3),
        (4, -1, 14, 6, 4),
        (5, -1, 12, 6, 3),
        (6, -1, 4, 4, 1),
        (1, 0, 3, 3, 1),
        (2, 0, 11, 5, 3),
        (3, 0, 30, 7, 8),
        (4, 0, 45, 7, 11),
        (5, 0, 41, 7, 9),
        (6, 0, 23, 7, 5),
        (7, 0, 6, 5, 2),
        (1, 1, 4, 4, 1),
        (2, 1, 22, 6, 5),
        (3, 1, 60, 8, 13),
        (4, 1, 108, 8, 22),
        (5, 1, 128, 10, 25),
        (6, 1, 90, 10, 18),
        (7, 1, 32, 8, 7),
        (8, 1, 4, 4, 1),
    ];
    // exactly these cells are nonempty in the four low-grade columns
    let nonempty: Vec<(usize, i64)> = grid
        .iter()
        .filter(|c| c.g <= 1)
        .map(|c| (c.k, c.g))
        .collect();
    assert_eq!(nonempty.len(), expected.len());
    for &(k, g, dim_c, n_sub, max_sub) in expected {
        assert_eq!(
            by_pos.get(&(k, g)),
            Some(&(dim_c, n_sub, max_sub)),
            "cell ({k}, {g})"
        );
    }
    println!(
        "[acceptance] supplementary (reference table, low grades): PASS - {} cells match dimC/nSub/maxDim exactly",
        expected.len()
    );
}

#[test]
fn criterion_9_split_performance() {
    let f = Rationals;
    let alg = h_source().materialize(6, 5).unwrap();
    let split = compute_split(&f, &alg, 6, 5, false).unwrap();
    let straight = compute_straightforward(&f, &alg, 6, 5, false).unwrap();
    assert_eq!(
        (split.dim_z, split.dim_b, split.dim_h),
        (straight.dim_z, straight.dim_b, straight.dim_h)
    );
    assert_eq!(split.dim_c[1], 3382);
    assert!(
        split.max_block < split.dim_c[1],
        "largest split block {} must undercut dim C^6_5 = {}",
        split.max_block,
        split.dim_c[1]
    );
    assert!(
        split.timings.total_ms < straight.timings.total_ms,
        "split ({} ms) must beat straightforward ({} ms)",
        split.timings.total_ms,
        straight.timings.total_ms
    );
    pass(
        9,
        "split performance",
        format!(
            "split {} ms < straightforward {} ms; largest block {} < 3382",
            split.timings.total_ms, straight.timings.total_ms, split.max_block
        ),
    );
}
