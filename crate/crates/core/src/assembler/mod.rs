//! From an ordered clique to a design, and the random symbol and geometry
//! moves that spread one reduced design over its whole class.

pub mod format;
mod grid;
pub mod sampler;

use num_bigint::BigUint;

use crate::clique::OrderedClique;
use crate::derange::{factorial, permutations_of, DesignKind};
use crate::error::{Error, Result};
use crate::perm::{sigma0, BoxPartition, Permutation};
use crate::rng::DesignRng;

pub use grid::{Design, Grid, LatinSquare, SudokuGrid, Violation};

fn check_clique(members: &[Permutation], n: usize) -> Result<()> {
    if members.len() + 1 != n {
        return Err(Error::WrongCliqueSize {
            expected: n.saturating_sub(1),
            got: members.len(),
        });
    }
    if let Some(m) = members.iter().find(|m| m.n() != n) {
        return Err(Error::OrderMismatch {
            left: m.n(),
            right: n,
        });
    }
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            if !a.disjoint_unchecked(b) {
                return Err(Error::NotDisjoint(a.to_string(), b.to_string()));
            }
        }
    }
    Ok(())
}

/// Symbol 1 on `base`, symbol `k + 2` on the `k`-th clique member.
fn superpose(base: &Permutation, members: &[Permutation]) -> Grid {
    let n = base.n();
    let mut grid = Grid::filled(n, 0);
    for (symbol, perm) in std::iter::once(base).chain(members).enumerate() {
        for r in 0..n {
            grid.set(r, perm.at(r), symbol as u8 + 1);
        }
    }
    grid
}

/// `I + 2·φ(δ₂) + … + n·φ(δₙ)` for a clique of `n - 1` pairwise disjoint
/// derangements, taken in lexicographic order.
pub fn assemble_latin(clique: &OrderedClique, n: usize) -> Result<LatinSquare> {
    let members = clique.members();
    let id = Permutation::identity(n);
    check_clique(members, n)?;
    if let Some(m) = members.iter().find(|m| !m.disjoint_unchecked(&id)) {
        return Err(Error::NotDisjointFromIdentity(m.to_string()));
    }
    Ok(LatinSquare::new_unchecked(superpose(&id, members)))
}

/// `S₀ + 2·φ(δ₂) + … + n·φ(δₙ)` with `S₀` the matrix of `sigma0(p)`, for a
/// clique of `n - 1` pairwise disjoint Sudoku-derangements.
pub fn assemble_sudoku(clique: &OrderedClique, p: usize) -> Result<SudokuGrid> {
    let s0 = sigma0(p)?;
    let part = s0.partition();
    let n = part.n();
    let members = clique.members();
    if members.len() + 1 != n {
        return Err(Error::WrongCliqueSize {
            expected: n - 1,
            got: members.len(),
        });
    }
    for m in members {
        if m.n() != n
            || !m.disjoint_unchecked(s0.permutation())
            || !m.s_permutation_unchecked(&part)
        {
            return Err(Error::NotSudokuDerangement(m.to_string()));
        }
    }
    check_clique(members, n)?;
    Ok(SudokuGrid::new_unchecked(
        superpose(s0.permutation(), members),
        part,
    ))
}

/// Replaces symbol `k` (for `k >= 2`) by `symbols[k - 2]`; symbol 1 stays.
/// `symbols` must be a permutation of `2..=n`.
pub fn relabel_symbols(design: &Design, symbols: &[usize]) -> Result<Design> {
    let n = design.grid().n();
    let mut check: Vec<usize> = symbols.to_vec();
    check.sort_unstable();
    if check != (2..=n).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!(
            "{symbols:?} is not a permutation of 2..={n}"
        )));
    }
    let cells = design
        .grid()
        .cells()
        .iter()
        .map(|&v| {
            if v == 1 {
                1
            } else {
                symbols[v as usize - 2] as u8
            }
        })
        .collect();
    Ok(design.with_grid(Grid::new(n, cells)?))
}

/// Output column `c` is input column `columns[c]`, both 1-based.
pub fn permute_columns(square: &LatinSquare, columns: &[usize]) -> Result<LatinSquare> {
    let g = square.grid();
    let n = g.n();
    let gamma = Permutation::from_one_based(columns)?;
    if gamma.n() != n {
        return Err(Error::OrderMismatch {
            left: gamma.n(),
            right: n,
        });
    }
    let mut out = Grid::filled(n, 0);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, g.get(r, gamma.at(c)));
        }
    }
    Ok(LatinSquare::new_unchecked(out))
}

/// Row and column moves that keep the box structure: `rows[b]` permutes the
/// rows of band `b`, `cols[s]` the columns of stack `s` (1-based local
/// positions). Output row `b·p + i` is input row `b·p + rows[b][i]`, and
/// likewise for columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BandStackMoves {
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
}

impl BandStackMoves {
    pub fn identity(p: usize) -> Self {
        let id: Vec<usize> = (1..=p).collect();
        BandStackMoves {
            rows: vec![id.clone(); p],
            cols: vec![id; p],
        }
    }

    fn zero_based(&self, p: usize) -> Result<(Vec<Permutation>, Vec<Permutation>)> {
        let conv = |v: &Vec<Vec<usize>>| -> Result<Vec<Permutation>> {
            if v.len() != p {
                return Err(Error::InvalidArgument(format!(
                    "expected {p} local permutations, got {}",
                    v.len()
                )));
            }
            v.iter()
                .map(|x| {
                    let perm = Permutation::from_one_based(x)?;
                    if perm.n() != p {
                        return Err(Error::InvalidArgument(format!(
                            "{x:?} is not a permutation of 1..={p}"
                        )));
                    }
                    Ok(perm)
                })
                .collect()
        };
        Ok((conv(&self.rows)?, conv(&self.cols)?))
    }
}

pub fn permute_bands_stacks(sudoku: &SudokuGrid, moves: &BandStackMoves) -> Result<SudokuGrid> {
    let p = sudoku.p();
    let (rows, cols) = moves.zero_based(p)?;
    let g = sudoku.grid();
    let n = g.n();
    let mut out = Grid::filled(n, 0);
    for r in 0..n {
        let src_r = (r / p) * p + rows[r / p].at(r % p);
        for c in 0..n {
            let src_c = (c / p) * p + cols[c / p].at(c % p);
            out.set(r, c, g.get(src_r, src_c));
        }
    }
    Ok(SudokuGrid::new_unchecked(out, sudoku.partition()))
}

/// A uniform permutation of `2..=n`, by Fisher–Yates.
pub fn draw_symbols(rng: &mut DesignRng, n: usize) -> Vec<usize> {
    let mut s: Vec<usize> = (2..=n).collect();
    rng.shuffle(&mut s);
    s
}

/// A uniform permutation of `1..=n`.
pub fn draw_columns(rng: &mut DesignRng, n: usize) -> Vec<usize> {
    let mut c: Vec<usize> = (1..=n).collect();
    rng.shuffle(&mut c);
    c
}

/// One uniform local permutation per band, then one per stack:
/// `p!^(2p)` equally likely outcomes.
pub fn draw_band_stack_moves(rng: &mut DesignRng, p: usize) -> BandStackMoves {
    let mut local = || {
        let mut v: Vec<usize> = (1..=p).collect();
        rng.shuffle(&mut v);
        v
    };
    let rows = (0..p).map(|_| local()).collect();
    let cols = (0..p).map(|_| local()).collect();
    BandStackMoves { rows, cols }
}

/// Uniform relabelling of symbols `2..n`; returns the design and the labels used.
pub fn randomize_symbols(design: &Design, rng: &mut DesignRng) -> (Design, Vec<usize>) {
    let symbols = draw_symbols(rng, design.grid().n());
    let out = relabel_symbols(design, &symbols).expect("drawn labels are a permutation");
    (out, symbols)
}

pub fn randomize_columns_latin(
    square: &LatinSquare,
    rng: &mut DesignRng,
) -> (LatinSquare, Vec<usize>) {
    let columns = draw_columns(rng, square.grid().n());
    let out = permute_columns(square, &columns).expect("drawn columns are a permutation");
    (out, columns)
}

pub fn randomize_sudoku_geometry(
    sudoku: &SudokuGrid,
    rng: &mut DesignRng,
) -> (SudokuGrid, BandStackMoves) {
    let moves = draw_band_stack_moves(rng, sudoku.p());
    let out = permute_bands_stacks(sudoku, &moves).expect("drawn moves are permutations");
    (out, moves)
}

/// Every grid the sampler can reach from `reduced` once its clique is fixed:
/// all relabellings of symbols `2..n` combined with all column permutations
/// (Latin) or all band and stack moves (Sudoku). The list has
/// `(n-1)!·n!` or `(n-1)!·p!^(2p)` entries, so this is for small orders only.
pub fn expand_class(reduced: &Design) -> Vec<Grid> {
    let n = reduced.grid().n();
    let one_based = |k: usize, offset: usize| -> Vec<Vec<usize>> {
        permutations_of(k)
            .into_iter()
            .map(|v| v.into_iter().map(|x| x + offset).collect())
            .collect()
    };
    let symbols = one_based(n.saturating_sub(1), 2);
    let mut out = Vec::new();
    for s in &symbols {
        match relabel_symbols(reduced, s).expect("symbol labels are a permutation") {
            Design::Latin(sq) => {
                for c in one_based(n, 1) {
                    let moved = permute_columns(&sq, &c).expect("columns are a permutation");
                    out.push(moved.into_grid());
                }
            }
            Design::Sudoku(sg) => {
                let p = sg.p();
                let local = one_based(p, 1);
                let mut choice = vec![0usize; 2 * p];
                loop {
                    let pick = |range: std::ops::Range<usize>| {
                        choice[range].iter().map(|&i| local[i].clone()).collect()
                    };
                    let moves = BandStackMoves {
                        rows: pick(0..p),
                        cols: pick(p..2 * p),
                    };
                    let moved = permute_bands_stacks(&sg, &moves).expect("moves are permutations");
                    out.push(moved.into_grid());
                    // odometer over the 2p local permutations
                    let Some(pos) = choice.iter().rposition(|&i| i + 1 < local.len()) else {
                        break;
                    };
                    choice[pos] += 1;
                    choice[pos + 1..].fill(0);
                }
            }
        }
    }
    out
}

/// Number of designs of order `n` given the number of reduced ones (the
/// maximum clique count): `n!·(n-1)!·c` for Latin squares and
/// `(n-1)!·p!^(2p)·c` for Sudoku grids with `n = p²`.
pub fn total_design_count(kind: DesignKind, n: usize, clique_count: &BigUint) -> Result<BigUint> {
    let symbol_moves = factorial(n.saturating_sub(1));
    match kind {
        DesignKind::Latin => Ok(factorial(n) * symbol_moves * clique_count),
        DesignKind::Sudoku => {
            let part = BoxPartition::from_order(n)?;
            let p = part.p();
            let geometry = factorial(p).pow(2 * p as u32);
            Ok(symbol_moves * geometry * clique_count)
        }
    }
}
