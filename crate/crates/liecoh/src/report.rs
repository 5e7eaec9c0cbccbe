//! Result documents and renderings: exact JSON, aligned text tables, CSV.
//!
//! All numbers in documents are exact (rationals as `"n"` or `"n/d"`
//! strings). JSON output is deterministic except for the single `timing`
//! member, which carries the timestamp and wall times.

use crate::algebra::Algebra;
use crate::engine::{group_stats, CellOutcome, GridCell, PhaseTimings, SelfTestReport};
use crate::field::Field;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RepTerm {
    pub monomial: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StatsRow {
    pub dim_ckm1: usize,
    pub dim_ck: usize,
    pub dim_ckp1: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub repeated: usize,
}

/// One cell's result with every number exact; mirrors the engine outcome.
#[derive(Clone, Debug, Serialize)]
pub struct ResultDoc {
    pub mode: String,
    pub k: usize,
    pub g: i64,
    pub dim_c: [usize; 3],
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub n_subcomplexes: usize,
    pub max_block: usize,
    pub subcomplexes: Vec<StatsRow>,
    pub representatives: Vec<Vec<RepTerm>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TimingDoc {
    pub timestamp_ms: u128,
    pub phases: Vec<PhaseDoc>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseDoc {
    pub mode: String,
    pub basis_ms: u128,
    pub matrix_ms: u128,
    pub partition_ms: u128,
    pub elim_ms: u128,
    pub reps_ms: u128,
    pub total_ms: u128,
}

impl PhaseDoc {
    pub fn new(mode: &str, t: &PhaseTimings) -> Self {
        PhaseDoc {
            mode: mode.to_string(),
            basis_ms: t.basis_ms,
            matrix_ms: t.matrix_ms,
            partition_ms: t.partition_ms,
            elim_ms: t.elim_ms,
            reps_ms: t.reps_ms,
            total_ms: t.total_ms,
        }
    }
}

#[derive(Serialize)]
pub struct ComputeDocument {
    pub version: String,
    pub algebra: String,
    pub field: String,
    pub results: Vec<ResultDoc>,
    pub timing: TimingDoc,
}

#[derive(Serialize)]
pub struct GridDocument {
    pub version: String,
    pub algebra: String,
    pub field: String,
    pub mode: String,
    pub cells: Vec<GridCell>,
    pub timing: TimingDoc,
}

#[derive(Serialize)]
pub struct CheckDocument {
    pub version: String,
    pub algebra: String,
    pub field: String,
    pub passed: bool,
    pub entries: Vec<crate::engine::CheckEntry>,
    pub timing: TimingDoc,
}

pub fn now_ms() -> u128 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

pub fn result_doc<F: Field>(f: &F, alg: &Algebra, out: &CellOutcome<F>) -> ResultDoc {
    let representatives = out
        .rep_cochains(f)
        .iter()
        .map(|c| {
            c.terms
                .iter()
                .map(|(mono, coeff)| RepTerm {
                    monomial: mono.duals.iter().map(|&i| alg.name(i).to_string()).collect(),
                    coeff: f.exact_string(coeff),
                })
                .collect()
        })
        .collect();
    let subcomplexes = group_stats(&out.stats)
        .into_iter()
        .map(|(s, repeated)| StatsRow {
            dim_ckm1: s.dim_ckm1,
            dim_ck: s.dim_ck,
            dim_ckp1: s.dim_ckp1,
            dim_z: s.dim_z,
            dim_b: s.dim_b,
            dim_h: s.dim_h,
            repeated,
        })
        .collect();
    ResultDoc {
        mode: out.mode.to_string(),
        k: out.k,
        g: out.g,
        dim_c: out.dim_c,
        dim_z: out.dim_z,
        dim_b: out.dim_b,
        dim_h: out.dim_h,
        n_subcomplexes: out.n_subcomplexes,
        max_block: out.max_block,
        subcomplexes,
        representatives,
    }
}

fn rep_to_string(rep: &[RepTerm]) -> String {
    rep.iter()
        .map(|t| {
            let mono = t
                .monomial
                .iter()
                .map(|n| format!("{n}'"))
                .collect::<Vec<_>>()
                .join("^");
            match t.coeff.as_str() {
                "1" => mono,
                "-1" => format!("-{mono}"),
                c => format!("{c}*{mono}"),
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn render_result_text(doc: &ResultDoc, algebra: &str, field: &str) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{algebra}  field {field}  mode {}  (k, g) = ({}, {})\n",
        doc.mode, doc.k, doc.g
    ));
    s.push_str(&format!(
        "dim C^(k-1)/C^k/C^(k+1) = {} / {} / {}\n",
        doc.dim_c[0], doc.dim_c[1], doc.dim_c[2]
    ));
    s.push_str(&format!(
        "dim Z = {}   dim B = {}   dim H = {}\n",
        doc.dim_z, doc.dim_b, doc.dim_h
    ));
    if doc.mode == "split" {
        s.push_str(&format!(
            "subcomplexes: {}   largest middle layer: {}\n",
            doc.n_subcomplexes, doc.max_block
        ));
        if !doc.subcomplexes.is_empty() {
            s.push_str("  dimC(k-1)  dimC(k)  dimC(k+1)   dimZ   dimB  dimH  repeated\n");
            for r in &doc.subcomplexes {
                s.push_str(&format!(
                    "  {:>9}  {:>7}  {:>9}  {:>5}  {:>5}  {:>4}  {:>8}\n",
                    r.dim_ckm1, r.dim_ck, r.dim_ckp1, r.dim_z, r.dim_b, r.dim_h, r.repeated
                ));
            }
        }
    }
    if !doc.representatives.is_empty() {
        s.push_str("representatives:\n");
        for (i, rep) in doc.representatives.iter().enumerate() {
            s.push_str(&format!("  [{}] {}\n", i + 1, rep_to_string(rep)));
        }
    }
    s
}

pub fn render_timing_text(t: &PhaseTimings) -> String {
    format!(
        "timing: basis {} ms, matrices {} ms, partition {} ms, elimination {} ms, representatives {} ms, total {} ms",
        t.basis_ms, t.matrix_ms, t.partition_ms, t.elim_ms, t.reps_ms, t.total_ms
    )
}

/// Aligned table with degrees down and grades across; each nonempty cell is
/// `dimC/nSub/maxDim` with a `*` marker when `dim H > 0`.
pub fn render_grid_text(
    cells: &[GridCell],
    ks: std::ops::RangeInclusive<usize>,
    gs: std::ops::RangeInclusive<i64>,
) -> String {
    use std::collections::BTreeMap;
    let by_pos: BTreeMap<(usize, i64), &GridCell> =
        cells.iter().map(|c| ((c.k, c.g), c)).collect();
    let fmt_cell = |c: &GridCell| {
        format!(
            "{}/{}/{}{}",
            c.dim_c,
            c.n_subcomplexes,
            c.max_subdim,
            if c.dim_h > 0 { "*" } else { "" }
        )
    };
    let g_list: Vec<i64> = gs.collect();
    let mut widths: Vec<usize> = g_list.iter().map(|g| g.to_string().len()).collect();
    for c in cells {
        if let Some(pos) = g_list.iter().position(|&g| g == c.g) {
            widths[pos] = widths[pos].max(fmt_cell(c).len());
        }
    }
    let mut s = String::new();
    s.push_str("  k\\g |");
    for (g, w) in g_list.iter().zip(&widths) {
        s.push_str(&format!(" {:>w$} |", g, w = w));
    }
    s.push('\n');
    let total: usize = 7 + widths.iter().map(|w| w + 3).sum::<usize>();
    s.push_str(&"-".repeat(total));
    s.push('\n');
    for k in ks {
        s.push_str(&format!("{k:>5} |"));
        for (g, w) in g_list.iter().zip(&widths) {
            match by_pos.get(&(k, *g)) {
                Some(c) => s.push_str(&format!(" {:>w$} |", fmt_cell(c), w = w)),
                None => s.push_str(&format!(" {:>w$} |", "", w = w)),
            }
        }
        s.push('\n');
    }
    s
}

pub fn render_grid_csv(cells: &[GridCell]) -> String {
    let mut s = String::from("k,g,dim_c,n_subcomplexes,max_subdim,dim_h\n");
    for c in cells {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.k, c.g, c.dim_c, c.n_subcomplexes, c.max_subdim, c.dim_h
        ));
    }
    s
}

pub fn render_result_csv(docs: &[ResultDoc]) -> String {
    let mut s = String::from(
        "mode,k,g,dim_c_km1,dim_c_k,dim_c_kp1,dim_z,dim_b,dim_h,n_subcomplexes,max_block\n",
    );
    for d in docs {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            d.mode,
            d.k,
            d.g,
            d.dim_c[0],
            d.dim_c[1],
            d.dim_c[2],
            d.dim_z,
            d.dim_b,
            d.dim_h,
            d.n_subcomplexes,
            d.max_block
        ));
    }
    s
}

pub fn render_check_text(report: &SelfTestReport) -> String {
    let mut s = String::new();
    for e in &report.entries {
        s.push_str(&format!(
            "{} {:<24} {}\n",
            if e.passed { "PASS" } else { "FAIL" },
            e.name,
            e.details
        ));
    }
    s.push_str(if report.all_passed() {
        "all checks passed\n"
    } else {
        "CHECKS FAILED\n"
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{compute_split, AlgebraSource, Mode};
    use crate::field::Rationals;

    #[test]
    fn result_doc_round_trip() {
        let f = Rationals;
        let src = AlgebraSource::parse_family("H:2|0").unwrap();
        let alg = src.materialize(2, -2).unwrap();
        let out = compute_split(&f, &alg, 2, -2, true).unwrap();
        let doc = result_doc(&f, &alg, &out);
        assert_eq!(doc.dim_h, 1);
        assert_eq!(doc.representatives.len(), 1);
        assert_eq!(doc.representatives[0][0].monomial, vec!["p", "q"]);
        assert_eq!(doc.representatives[0][0].coeff, "1");
        let text = render_result_text(&doc, "H(2|0)", "Q");
        assert!(text.contains("dim H = 1"));
        assert!(text.contains("p'^q'"));
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"dim_h\":1"));
    }

    #[test]
    fn grid_text_marks_classes() {
        let f = Rationals;
        let src = AlgebraSource::parse_family("H:2|0").unwrap();
        let alg = src.materialize_many(&[(6, -2)]).unwrap();
        let cells = crate::engine::grid_report(&f, &alg, 1..=5, -2..=-2, Mode::Split).unwrap();
        let text = render_grid_text(&cells, 1..=5, -2..=-2);
        // (2,-2) and (5,-2) carry classes in this column
        assert_eq!(text.matches('*').count(), 2);
        let csv = render_grid_csv(&cells);
        assert!(csv.lines().count() >= 4);
    }
}
