//! Permutations in one-line form, their 0/1 matrices, and the box geometry of
//! Sudoku grids.
//!
//! Indices are 0-based internally. Anything printed or parsed uses 1-based
//! symbols, so `Permutation::from_one_based(&[2, 3, 4, 1])` maps row 1 to
//! column 2, and so on.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported order; symbols are stored as `u8`.
pub const MAX_ORDER: usize = 255;

/// A bijection of `{0..n-1}` stored as its image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Box<[u8]>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_ORDER);
        Permutation {
            image: (0..n).map(|i| i as u8).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_zero_based(image: &[usize]) -> Result<Self> {
        let n = image.len();
        if n > MAX_ORDER {
            return Err(Error::OrderTooLarge(format!(
                "order {n} exceeds {MAX_ORDER}"
            )));
        }
        let mut seen = vec![false; n];
        for &v in image {
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{:?} is not a bijection of 0..{n}",
                    image
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation {
            image: image.iter().map(|&v| v as u8).collect(),
        })
    }

    /// Builds a permutation from 1-based images, e.g. `(2, 3, 4, 1)`.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        let zero: Vec<usize> = image
            .iter()
            .map(|&v| {
                v.checked_sub(1)
                    .ok_or_else(|| Error::InvalidPermutation(format!("{image:?} contains 0")))
            })
            .collect::<Result<_>>()?;
        Self::from_zero_based(&zero)
    }

    /// Trusted constructor for generators that produce bijections by construction.
    pub(crate) fn from_raw(image: Box<[u8]>) -> Self {
        debug_assert!(Self::from_zero_based(
            &image.iter().map(|&v| v as usize).collect::<Vec<_>>()
        )
        .is_ok());
        Permutation { image }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    /// 0-based image of 0-based position `r`.
    #[inline]
    pub fn at(&self, r: usize) -> usize {
        self.image[r] as usize
    }

    pub fn image(&self) -> &[u8] {
        &self.image
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.image.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (r, &v) in self.image.iter().enumerate() {
            inv[v as usize] = r as u8;
        }
        Permutation { image: inv.into() }
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_order(self, other)?;
        Ok(Permutation {
            image: other
                .image
                .iter()
                .map(|&v| self.image[v as usize])
                .collect(),
        })
    }

    /// The 0/1 matrix with `M[r][c] = 1` iff `c = π(r)`.
    pub fn to_matrix(&self) -> PermutationMatrix {
        let n = self.n();
        let mut cells = vec![0u8; n * n];
        for (r, &c) in self.image.iter().enumerate() {
            cells[r * n + c as usize] = 1;
        }
        PermutationMatrix { n, cells }
    }

    /// Reads the permutation back off a matrix: `π = M·1`, i.e. the column of
    /// the single 1 in each row.
    pub fn from_matrix(m: &PermutationMatrix) -> Result<Self> {
        let n = m.n;
        let mut col_sums = vec![0u32; n];
        let mut image = Vec::with_capacity(n);
        for r in 0..n {
            let row = m.row(r);
            let ones: Vec<usize> = (0..n).filter(|&c| row[c] != 0).collect();
            if ones.len() != 1 || row.iter().any(|&x| x > 1) {
                return Err(Error::NotAPermutationMatrix(format!(
                    "row {} has sum {}",
                    r + 1,
                    row.iter().map(|&x| x as u32).sum::<u32>()
                )));
            }
            col_sums[ones[0]] += 1;
            image.push(ones[0]);
        }
        if let Some(c) = col_sums.iter().position(|&s| s != 1) {
            return Err(Error::NotAPermutationMatrix(format!(
                "column {} has sum {}",
                c + 1,
                col_sums[c]
            )));
        }
        Self::from_zero_based(&image)
    }

    /// True iff the two permutations disagree at every position.
    pub fn is_disjoint(&self, other: &Permutation) -> Result<bool> {
        check_order(self, other)?;
        Ok(self.disjoint_unchecked(other))
    }

    #[inline]
    pub(crate) fn disjoint_unchecked(&self, other: &Permutation) -> bool {
        self.image
            .iter()
            .zip(other.image.iter())
            .all(|(a, b)| a != b)
    }

    /// A derangement relative to `base`: disjoint from it everywhere. With
    /// `base` the identity this is the classical fixed-point-free notion.
    pub fn is_derangement_of(&self, base: &Permutation) -> Result<bool> {
        self.is_disjoint(base)
    }

    pub fn is_s_permutation(&self, part: &BoxPartition) -> Result<bool> {
        if self.n() != part.n() {
            return Err(Error::OrderMismatch {
                left: self.n(),
                right: part.n(),
            });
        }
        Ok(self.s_permutation_unchecked(part))
    }

    pub(crate) fn s_permutation_unchecked(&self, part: &BoxPartition) -> bool {
        let p = part.p();
        let mut boxes = vec![0u32; p * p];
        for (r, &c) in self.image.iter().enumerate() {
            boxes[part.band(r) * p + part.stack(c as usize)] += 1;
        }
        boxes.iter().all(|&b| b == 1)
    }

    pub fn lex_compare(&self, other: &Permutation) -> Result<Ordering> {
        check_order(self, other)?;
        Ok(self.image.cmp(&other.image))
    }
}

fn check_order(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::OrderMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", *v as usize + 1)?;
        }
        write!(f, ")")
    }
}

/// Dense `n x n` 0/1 matrix, materialized only when asked for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMatrix {
    n: usize,
    cells: Vec<u8>,
}

impl PermutationMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotAPermutationMatrix("matrix is not square".into()));
        }
        Ok(PermutationMatrix {
            n,
            cells: rows.concat(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.n..(r + 1) * self.n]
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }
}

/// Partition of an `n x n` grid, `n = p²`, into `p x p` boxes. Box `B(k, m)`
/// covers rows `k·p..(k+1)·p` and columns `m·p..(m+1)·p`; row-of-boxes `k` is
/// a band and column-of-boxes `m` a stack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoxPartition {
    p: usize,
}

impl BoxPartition {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 || p * p > MAX_ORDER {
            return Err(Error::InvalidOrder(format!("box side {p} out of range")));
        }
        Ok(BoxPartition { p })
    }

    /// Partition for order `n`; fails unless `n` is a perfect square.
    pub fn from_order(n: usize) -> Result<Self> {
        let p = (1..=n).find(|p| p * p >= n).unwrap_or(0);
        if p * p != n {
            return Err(Error::InvalidOrder(format!(
                "order {n} is not a perfect square"
            )));
        }
        Self::new(p)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.p * self.p
    }

    #[inline]
    pub fn band(&self, r: usize) -> usize {
        r / self.p
    }

    #[inline]
    pub fn stack(&self, c: usize) -> usize {
        c / self.p
    }

    /// Index `k·p + m` of the box holding cell `(r, c)`.
    #[inline]
    pub fn box_of(&self, r: usize, c: usize) -> usize {
        self.band(r) * self.p + self.stack(c)
    }
}

/// A permutation whose matrix has exactly one 1 in every box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPermutation {
    underlying: Permutation,
    partition: BoxPartition,
}

impl SPermutation {
    pub fn new(underlying: Permutation, partition: BoxPartition) -> Result<Self> {
        if !underlying.is_s_permutation(&partition)? {
            return Err(Error::InvalidPermutation(format!(
                "{underlying} is not an S-permutation for p={}",
                partition.p()
            )));
        }
        Ok(SPermutation {
            underlying,
            partition,
        })
    }

    pub fn permutation(&self) -> &Permutation {
        &self.underlying
    }

    pub fn partition(&self) -> BoxPartition {
        self.partition
    }

    pub fn into_permutation(self) -> Permutation {
        self.underlying
    }
}

/// The base S-permutation that takes the identity's place for Sudoku grids.
///
/// Its compact form puts the 1 of box `(k, m)` at in-box position `(m, k)`,
/// so row `k·p + m` maps to column `m·p + k`. For `p = 2` this is `(1, 3, 2, 4)`.
pub fn sigma0(p: usize) -> Result<SPermutation> {
    if p < 2 {
        return Err(Error::InvalidOrder(format!("sigma0 needs p >= 2, got {p}")));
    }
    let part = BoxPartition::new(p)?;
    let mut image = vec![0usize; p * p];
    for k in 0..p {
        for m in 0..p {
            image[k * p + m] = m * p + k;
        }
    }
    SPermutation::new(Permutation::from_zero_based(&image)?, part)
}
