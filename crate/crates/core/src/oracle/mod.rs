//! Reference implementations for checking the clique pipeline.
//!
//! Nothing here reuses the pipeline's permutation, graph or grid code: designs
//! are plain row-major `Vec<u8>` cell vectors and the enumerators are ordinary
//! cell-by-cell backtracking with row/column/box bitmasks. The only pipeline
//! entry point is [`uniformity_test`], which samples through it on purpose.

mod chisq;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

pub use chisq::{chi_square_sf, chi_square_uniform, gamma_q, ln_gamma, ChiSquareReport};

use crate::assembler::sampler::Sampler;
use crate::clique::{enumerate_maximum_cliques, SearchOptions};
use crate::derange::{enumerate_derangements, enumerate_sudoku_derangements, DesignKind};
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::Limits;

/// Largest Latin order the brute-force enumerator accepts.
pub const MAX_BRUTE_LATIN: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub kind: DesignKind,
    pub order: usize,
    #[serde(serialize_with = "as_decimal")]
    pub total: BigUint,
    /// SHA-256 of the sorted cell vectors, hex.
    pub digest: Option<String>,
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl EnumerationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Cell-by-cell backtracking. `box_side` adds the box constraint.
fn backtrack(n: usize, box_side: Option<usize>) -> Vec<Vec<u8>> {
    struct St {
        n: usize,
        p: Option<usize>,
        cells: Vec<u8>,
        rows: Vec<u32>,
        cols: Vec<u32>,
        boxes: Vec<u32>,
        out: Vec<Vec<u8>>,
    }
    fn rec(st: &mut St, i: usize) {
        let n = st.n;
        if i == n * n {
            st.out.push(st.cells.clone());
            return;
        }
        let (r, c) = (i / n, i % n);
        let b = st.p.map(|p| (r / p) * p + c / p);
        let used = st.rows[r] | st.cols[c] | b.map_or(0, |b| st.boxes[b]);
        for s in 1..=n {
            let bit = 1u32 << s;
            if used & bit != 0 {
                continue;
            }
            st.rows[r] |= bit;
            st.cols[c] |= bit;
            if let Some(b) = b {
                st.boxes[b] |= bit;
            }
            st.cells[i] = s as u8;
            rec(st, i + 1);
            st.rows[r] &= !bit;
            st.cols[c] &= !bit;
            if let Some(b) = b {
                st.boxes[b] &= !bit;
            }
        }
    }
    let mut st = St {
        n,
        p: box_side,
        cells: vec![0; n * n],
        rows: vec![0; n],
        cols: vec![0; n],
        boxes: vec![0; n],
        out: Vec::new(),
    };
    rec(&mut st, 0);
    st.out
}

/// Every Latin square of order `n <= 5`, as sorted row-major cell vectors.
pub fn latin_squares(n: usize) -> Result<Vec<Vec<u8>>> {
    if n > MAX_BRUTE_LATIN {
        return Err(Error::OrderTooLarge(format!(
            "brute-force Latin enumeration stops at order {MAX_BRUTE_LATIN}"
        )));
    }
    let mut v = backtrack(n, None);
    v.sort_unstable();
    Ok(v)
}

/// Every Sudoku with `p x p` boxes; only `p = 2` is accepted.
pub fn sudoku_grids(p: usize) -> Result<Vec<Vec<u8>>> {
    if p != 2 {
        return Err(Error::OrderTooLarge(format!(
            "brute-force Sudoku enumeration only supports p = 2, got {p}"
        )));
    }
    let mut v = backtrack(p * p, Some(p));
    v.sort_unstable();
    Ok(v)
}

/// Hash of a set of designs, independent of the order they were listed in.
pub fn set_digest(grids: &[Vec<u8>]) -> String {
    let mut sorted: Vec<&Vec<u8>> = grids.iter().collect();
    sorted.sort_unstable();
    let mut h = Sha256::new();
    for g in sorted {
        h.update((g.len() as u32).to_le_bytes());
        h.update(g);
    }
    hex::encode(h.finalize())
}

pub fn brute_force_latin(n: usize) -> Result<EnumerationReport> {
    let grids = latin_squares(n)?;
    Ok(EnumerationReport {
        kind: DesignKind::Latin,
        order: n,
        total: BigUint::from(grids.len()),
        digest: Some(set_digest(&grids)),
    })
}

pub fn brute_force_sudoku(p: usize) -> Result<EnumerationReport> {
    let grids = sudoku_grids(p)?;
    Ok(EnumerationReport {
        kind: DesignKind::Sudoku,
        order: p * p,
        total: BigUint::from(grids.len()),
        digest: Some(set_digest(&grids)),
    })
}

/// Row-major cells form a Latin square (and a Sudoku, given a box side).
pub fn cells_are_valid(n: usize, cells: &[u8], box_side: Option<usize>) -> bool {
    if cells.len() != n * n || cells.iter().any(|&v| v == 0 || v as usize > n) {
        return false;
    }
    let mut rows = vec![0u64; n];
    let mut cols = vec![0u64; n];
    let mut boxes = vec![0u64; n];
    for (i, &v) in cells.iter().enumerate() {
        let (r, c) = (i / n, i % n);
        let bit = 1u64 << v;
        if rows[r] & bit != 0 || cols[c] & bit != 0 {
            return false;
        }
        rows[r] |= bit;
        cols[c] |= bit;
        if let Some(p) = box_side {
            let b = (r / p) * p + c / p;
            if boxes[b] & bit != 0 {
                return false;
            }
            boxes[b] |= bit;
        }
    }
    true
}

/// Draws `draws` designs from `sampler` (called with the draw number) and
/// tests their frequencies over `population` (sorted) against uniformity.
pub fn uniformity_test_with<F>(
    population: &[Vec<u8>],
    draws: u64,
    mut sampler: F,
) -> Result<ChiSquareReport>
where
    F: FnMut(u64) -> Result<Vec<u8>>,
{
    if draws < 20 * population.len() as u64 {
        return Err(Error::InvalidArgument(format!(
            "{draws} draws is fewer than 20 per design over {} designs",
            population.len()
        )));
    }
    let mut counts = vec![0u64; population.len()];
    for i in 0..draws {
        let cells = sampler(i)?;
        let at = population.binary_search(&cells).map_err(|_| {
            Error::Verification(format!("draw {i} produced a design outside the population"))
        })?;
        counts[at] += 1;
    }
    Ok(chi_square_uniform(&counts))
}

/// Pipeline sampler over the full graph of the given design family, as used
/// by the uniformity harness. `order` is `n` for Latin squares, `p` for Sudoku.
pub fn full_population_sampler(
    kind: DesignKind,
    order: usize,
    seed: u64,
) -> Result<(Vec<Vec<u8>>, crate::graph::CompatibilityGraph, u64)> {
    let limits = Limits::default();
    let (population, vs) = match kind {
        DesignKind::Latin if (1..=4).contains(&order) => (
            latin_squares(order)?,
            enumerate_derangements(order, &limits)?,
        ),
        DesignKind::Sudoku if order == 2 => (
            sudoku_grids(order)?,
            enumerate_sudoku_derangements(order, &limits)?,
        ),
        _ => {
            return Err(Error::PopulationTooLarge(format!(
                "uniformity testing covers Latin n <= 4 and Sudoku p = 2, not {kind} {order}"
            )))
        }
    };
    let g = build_graph(vs, &limits)?;
    Ok((population, g, seed))
}

/// Chi-square test of the full pipeline over the whole population: Latin
/// squares of order `order <= 4` or Sudoku grids with `p = order = 2`.
pub fn uniformity_test(
    kind: DesignKind,
    order: usize,
    draws: u64,
    seed: u64,
) -> Result<ChiSquareReport> {
    let (population, g, seed) = full_population_sampler(kind, order, seed)?;
    let n = g.vertex_set().order();
    let cs = enumerate_maximum_cliques(&g, Some(n - 1), &SearchOptions::default())?;
    let sampler = Sampler::new(cs, None, seed)?;
    uniformity_test_with(&population, draws, |i| {
        Ok(sampler.sample(i)?.design.grid().cells().to_vec())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latin_counts() {
        let expected = [1u64, 1, 2, 12, 576];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(latin_squares(n).unwrap().len() as u64, e, "n={n}");
        }
        assert!(matches!(latin_squares(6), Err(Error::OrderTooLarge(_))));
    }

    #[test]
    fn sudoku_count() {
        let all = sudoku_grids(2).unwrap();
        assert_eq!(all.len(), 288);
        assert!(all.iter().all(|g| cells_are_valid(4, g, Some(2))));
        assert!(sudoku_grids(3).is_err());
    }

    #[test]
    fn digest_ignores_order() {
        let mut a = latin_squares(3).unwrap();
        let d = set_digest(&a);
        a.reverse();
        assert_eq!(set_digest(&a), d);
        a.pop();
        assert_ne!(set_digest(&a), d);
    }

    #[test]
    fn validity_checker() {
        assert!(cells_are_valid(2, &[1, 2, 2, 1], None));
        assert!(!cells_are_valid(2, &[1, 2, 1, 2], None));
        assert!(!cells_are_valid(
            4,
            &[1, 2, 3, 4, 2, 3, 4, 1, 3, 4, 1, 2, 4, 1, 2, 3],
            Some(2)
        ));
    }

    #[test]
    fn report_json() {
        let r = brute_force_latin(3).unwrap();
        let json = r.to_json();
        assert!(json.contains("\"total\":\"12\""));
        assert!(json.contains("\"kind\":\"latin\""));
    }

    #[test]
    fn too_few_draws_rejected() {
        let pop = latin_squares(3).unwrap();
        assert!(uniformity_test_with(&pop, 100, |_| Ok(pop[0].clone())).is_err());
        assert!(matches!(
            uniformity_test(DesignKind::Latin, 5, 10_000_000, 1),
            Err(Error::PopulationTooLarge(_))
        ));
    }
}
