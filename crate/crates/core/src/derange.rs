//! Vertex sets of the compatibility graphs: derangements of the identity, and
//! S-permutations disjoint from `sigma0(p)`.

use std::io::Write;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::perm::{sigma0, BoxPartition, Permutation, MAX_ORDER};
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignKind {
    Latin,
    Sudoku,
}

impl std::fmt::Display for DesignKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DesignKind::Latin => "latin",
            DesignKind::Sudoku => "sudoku",
        })
    }
}

/// Lexicographically sorted vertices, all disjoint from `base`. Vertex ids are
/// positions in `vertices`.
#[derive(Clone, Debug)]
pub struct VertexSet {
    kind: DesignKind,
    base: Permutation,
    partition: Option<BoxPartition>,
    vertices: Vec<Permutation>,
}

impl VertexSet {
    /// Wraps an arbitrary vertex list, re-checking every invariant.
    pub fn new(
        kind: DesignKind,
        base: Permutation,
        partition: Option<BoxPartition>,
        vertices: Vec<Permutation>,
    ) -> Result<Self> {
        for v in &vertices {
            if !v.is_disjoint(&base)? {
                return Err(Error::InvalidPermutation(format!(
                    "{v} is not disjoint from base {base}"
                )));
            }
            if let Some(part) = &partition {
                if !v.is_s_permutation(part)? {
                    return Err(Error::InvalidPermutation(format!(
                        "{v} is not an S-permutation"
                    )));
                }
            }
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPermutation(
                "vertices are not strictly increasing".into(),
            ));
        }
        Ok(VertexSet {
            kind,
            base,
            partition,
            vertices,
        })
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &Permutation {
        &self.base
    }

    pub fn partition(&self) -> Option<BoxPartition> {
        self.partition
    }

    pub fn vertices(&self) -> &[Permutation] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn get(&self, id: usize) -> &Permutation {
        &self.vertices[id]
    }

    /// Id of a vertex, by binary search.
    pub fn id_of(&self, v: &Permutation) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    /// Sub-collection with the given ids (must be strictly increasing).
    pub fn select(&self, ids: &[usize]) -> VertexSet {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet {
            kind: self.kind,
            base: self.base.clone(),
            partition: self.partition,
            vertices: ids.iter().map(|&i| self.vertices[i].clone()).collect(),
        }
    }

    /// One vertex per line, space-separated 1-based images.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.vertices {
            let line: Vec<String> = v.one_based().iter().map(|x| x.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

/// `d(n) = (n-1)(d(n-1) + d(n-2))` with `d(0) = 1`, `d(1) = 0`.
pub fn derangement_count(n: usize) -> BigUint {
    let (mut prev, mut cur) = (BigUint::from(1u32), BigUint::from(0u32));
    if n == 0 {
        return prev;
    }
    for k in 2..=n {
        let next = BigUint::from(k - 1) * (&cur + &prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// All derangements of `(1..n)` in lexicographic order.
pub fn enumerate_derangements(n: usize, limits: &Limits) -> Result<VertexSet> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooLarge(format!(
            "order {n} exceeds {MAX_ORDER}"
        )));
    }
    let expected = derangement_count(n);
    if expected > BigUint::from(limits.max_vertex_set) {
        return Err(Error::OrderTooLarge(format!(
            "order {n} has {expected} derangements, above the vertex budget of {}",
            limits.max_vertex_set
        )));
    }
    let base = Permutation::identity(n);
    let vertices = derangements_of(&base);
    Ok(VertexSet {
        kind: DesignKind::Latin,
        base,
        partition: None,
        vertices,
    })
}

/// Lexicographic backtracking over positions, forbidding `base[r]` at row `r`.
fn derangements_of(base: &Permutation) -> Vec<Permutation> {
    let n = base.n();
    let mut out = Vec::new();
    let mut image = vec![0u8; n];
    let mut used = vec![false; n];
    fn rec(
        r: usize,
        base: &Permutation,
        image: &mut [u8],
        used: &mut [bool],
        out: &mut Vec<Permutation>,
    ) {
        let n = image.len();
        if r == n {
            out.push(Permutation::from_raw(image.into()));
            return;
        }
        for v in 0..n {
            if used[v] || v == base.at(r) {
                continue;
            }
            used[v] = true;
            image[r] = v as u8;
            rec(r + 1, base, image, used, out);
            used[v] = false;
        }
    }
    rec(0, base, &mut image, &mut used, &mut out);
    out
}

/// All permutations of `0..n` that keep each block of `p` consecutive
/// positions in place (permute within bands or within stacks).
fn block_preserving(p: usize) -> Vec<Permutation> {
    let n = p * p;
    let local = permutations_of(p);
    let mut out = Vec::new();
    let mut choice = vec![0usize; p];
    loop {
        let mut image = vec![0u8; n];
        for (b, &c) in choice.iter().enumerate() {
            for (i, &v) in local[c].iter().enumerate() {
                image[b * p + i] = (b * p + v) as u8;
            }
        }
        out.push(Permutation::from_raw(image.into()));
        // odometer over p independent block choices
        let mut b = 0;
        loop {
            if b == p {
                return out;
            }
            choice[b] += 1;
            if choice[b] < local.len() {
                break;
            }
            choice[b] = 0;
            b += 1;
        }
    }
}

/// All permutations of `0..k` as plain vectors.
pub(crate) fn permutations_of(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(k, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(k, &mut cur, &mut used, &mut out);
    out
}

/// Every S-permutation of order `p²`, obtained by permuting the rows of
/// `sigma0(p)` within bands and its columns within stacks. Sorted, deduplicated.
pub fn s_permutations_by_product(p: usize) -> Result<Vec<Permutation>> {
    let base = sigma0(p)?.into_permutation();
    let blocks = block_preserving(p);
    let mut out = Vec::with_capacity(blocks.len() * blocks.len());
    for rows in &blocks {
        let shifted = base.compose(rows)?;
        for cols in &blocks {
            out.push(cols.compose(&shifted)?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Lexicographic backtracking for S-permutations disjoint from `base`. Within
/// a band every row must land in a different stack. Stops with
/// `OrderTooLarge` once more than `cap` results have been found.
pub fn s_permutations_by_search(
    part: BoxPartition,
    base: Option<&Permutation>,
    cap: usize,
) -> Result<Vec<Permutation>> {
    let n = part.n();
    let p = part.p();
    let mut st = SearchState {
        part,
        base,
        cap,
        image: vec![0u8; n],
        used_col: vec![false; n],
        used_stack: vec![false; p * p],
        out: Vec::new(),
    };
    if !st.rec(0) {
        return Err(Error::OrderTooLarge(format!(
            "more than {cap} S-permutations for p={p}"
        )));
    }
    Ok(st.out)
}

struct SearchState<'a> {
    part: BoxPartition,
    base: Option<&'a Permutation>,
    cap: usize,
    image: Vec<u8>,
    used_col: Vec<bool>,
    // (band, stack) pairs already hit
    used_stack: Vec<bool>,
    out: Vec<Permutation>,
}

impl SearchState<'_> {
    fn rec(&mut self, r: usize) -> bool {
        let n = self.part.n();
        let p = self.part.p();
        if r == n {
            if self.out.len() >= self.cap {
                return false;
            }
            self.out
                .push(Permutation::from_raw(self.image.clone().into()));
            return true;
        }
        let band = self.part.band(r);
        for c in 0..n {
            if self.used_col[c] || self.base.is_some_and(|b| b.at(r) == c) {
                continue;
            }
            let slot = band * p + self.part.stack(c);
            if self.used_stack[slot] {
                continue;
            }
            self.used_col[c] = true;
            self.used_stack[slot] = true;
            self.image[r] = c as u8;
            let ok = self.rec(r + 1);
            self.used_col[c] = false;
            self.used_stack[slot] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// S-permutations of order `p²` disjoint from `sigma0(p)`, sorted.
///
/// For `p <= 3` the candidates come from the band/stack product generator
/// (`p!^(2p)` of them) and are filtered; larger `p` falls back to pruned
/// backtracking bounded by the vertex budget.
pub fn enumerate_sudoku_derangements(p: usize, limits: &Limits) -> Result<VertexSet> {
    let s0 = sigma0(p)?;
    let part = s0.partition();
    let base = s0.into_permutation();
    let vertices = if p <= 3 {
        let mut v: Vec<Permutation> = s_permutations_by_product(p)?
            .into_iter()
            .filter(|s| s.disjoint_unchecked(&base))
            .collect();
        v.sort_unstable();
        if v.len() > limits.max_vertex_set {
            return Err(Error::OrderTooLarge(format!(
                "{} Sudoku-derangements exceed the vertex budget",
                v.len()
            )));
        }
        v
    } else {
        s_permutations_by_search(part, Some(&base), limits.max_vertex_set)?
    };
    Ok(VertexSet {
        kind: DesignKind::Sudoku,
        base,
        partition: Some(part),
        vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Permutation> {
        permutations_of(n)
            .into_iter()
            .map(|v| Permutation::from_zero_based(&v).unwrap())
            .collect()
    }

    #[test]
    fn counts_by_recurrence() {
        let table = [1u64, 0, 1, 2, 9, 44, 265, 1854, 14833, 133496];
        for (n, &d) in table.iter().enumerate() {
            assert_eq!(derangement_count(n), BigUint::from(d), "n={n}");
        }
        assert_eq!(derangement_count(12), BigUint::from(176_214_841u64));
    }

    #[test]
    fn recurrence_matches_inclusion_exclusion() {
        // d(n) = Σ_k (-1)^k n!/k!
        for n in 0..=15usize {
            let nf = factorial(n);
            let mut pos = BigUint::from(0u32);
            let mut neg = BigUint::from(0u32);
            for k in 0..=n {
                let term = &nf / factorial(k);
                if k % 2 == 0 {
                    pos += term;
                } else {
                    neg += term;
                }
            }
            assert_eq!(derangement_count(n), pos - neg, "n={n}");
        }
    }

    #[test]
    fn small_derangement_sets() {
        let l = Limits::default();
        let d2 = enumerate_derangements(2, &l).unwrap();
        assert_eq!(
            d2.vertices(),
            &[Permutation::from_one_based(&[2, 1]).unwrap()]
        );
        assert_eq!(enumerate_derangements(5, &l).unwrap().len(), 44);
        assert_eq!(enumerate_derangements(0, &l).unwrap().len(), 1);
        assert_eq!(enumerate_derangements(1, &l).unwrap().len(), 0);
    }

    #[test]
    fn derangements_match_filtered_permutations() {
        for n in 1..=6 {
            let id = Permutation::identity(n);
            let brute: Vec<Permutation> = all_perms(n)
                .into_iter()
                .filter(|p| p.is_derangement_of(&id).unwrap())
                .collect();
            let mut sorted = brute.clone();
            sorted.sort();
            assert_eq!(
                enumerate_derangements(n, &Limits::default())
                    .unwrap()
                    .vertices(),
                &sorted[..]
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        let tight = Limits {
            max_vertex_set: 100,
            ..Limits::default()
        };
        assert!(matches!(
            enumerate_derangements(6, &tight),
            Err(Error::OrderTooLarge(_))
        ));
        assert!(matches!(
            enumerate_sudoku_derangements(3, &tight),
            Err(Error::OrderTooLarge(_))
        ));
    }

    #[test]
    fn s_matrices_order_four_brute_force() {
        let part = BoxPartition::new(2).unwrap();
        let brute: Vec<Permutation> = all_perms(4)
            .into_iter()
            .filter(|p| p.is_s_permutation(&part).unwrap())
            .collect();
        assert_eq!(brute.len(), 16);
        assert_eq!(s_permutations_by_product(2).unwrap(), brute);
        assert_eq!(
            s_permutations_by_search(part, None, usize::MAX).unwrap(),
            brute
        );
    }

    #[test]
    fn sudoku_derangements_order_four() {
        let vs = enumerate_sudoku_derangements(2, &Limits::default()).unwrap();
        assert_eq!(vs.len(), 7);
        let s0 = sigma0(2).unwrap();
        let part = s0.partition();
        for v in vs.vertices() {
            assert!(v.is_disjoint(s0.permutation()).unwrap());
            assert!(v.is_s_permutation(&part).unwrap());
        }
        // subset of all derangements of sigma0 among all 4! permutations
        let of_base: Vec<Permutation> = all_perms(4)
            .into_iter()
            .filter(|p| p.is_derangement_of(s0.permutation()).unwrap())
            .collect();
        assert!(vs.vertices().iter().all(|v| of_base.contains(v)));
        assert_eq!(of_base.len(), 9);
    }

    #[test]
    fn write_text_one_based() {
        let vs = enumerate_derangements(3, &Limits::default()).unwrap();
        let mut buf = Vec::new();
        vs.write_text(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2 3 1\n3 1 2\n");
    }

    #[test]
    fn vertex_set_new_checks_invariants() {
        let id = Permutation::identity(3);
        let good = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let bad = Permutation::from_one_based(&[1, 3, 2]).unwrap();
        assert!(VertexSet::new(DesignKind::Latin, id.clone(), None, vec![good.clone()]).is_ok());
        assert!(VertexSet::new(DesignKind::Latin, id.clone(), None, vec![bad]).is_err());
        assert!(VertexSet::new(DesignKind::Latin, id, None, vec![good.clone(), good]).is_err());
    }
}
