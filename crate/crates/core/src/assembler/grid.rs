use std::fmt;

use crate::derange::DesignKind;
use crate::error::{Error, Result};
use crate::perm::BoxPartition;

/// An `n x n` array of 1-based symbols, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grid {
    n: usize,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(n: usize, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != n * n {
            return Err(Error::Parse(format!(
                "{} cells do not form a {n}x{n} grid",
                cells.len()
            )));
        }
        Ok(Grid { n, cells })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {n}",
                r + 1,
                row.len()
            )));
        }
        Grid::new(n, rows.concat())
    }

    pub(crate) fn filled(n: usize, value: u8) -> Self {
        Grid {
            n,
            cells: vec![value; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, c: usize, v: u8) {
        self.cells[r * self.n + c] = v;
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.cells[r * self.n..(r + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|r| self.row(r).to_vec()).collect()
    }

    /// First Latin violation in row, column, then symbol-range order.
    pub fn latin_violation(&self) -> Option<Violation> {
        let n = self.n;
        for (i, &v) in self.cells.iter().enumerate() {
            if v == 0 || v as usize > n {
                return Some(Violation::BadSymbol {
                    row: i / n,
                    col: i % n,
                    symbol: v,
                });
            }
        }
        for r in 0..n {
            if let Some(s) = duplicate((0..n).map(|c| self.get(r, c)), n) {
                return Some(Violation::Row { row: r, symbol: s });
            }
        }
        for c in 0..n {
            if let Some(s) = duplicate((0..n).map(|r| self.get(r, c)), n) {
                return Some(Violation::Column { col: c, symbol: s });
            }
        }
        None
    }

    pub fn sudoku_violation(&self, part: BoxPartition) -> Option<Violation> {
        if part.n() != self.n {
            return Some(Violation::Shape {
                n: self.n,
                p: part.p(),
            });
        }
        if let Some(v) = self.latin_violation() {
            return Some(v);
        }
        let p = part.p();
        for k in 0..p {
            for m in 0..p {
                let cells = (0..self.n).map(|i| self.get(k * p + i / p, m * p + i % p));
                if let Some(s) = duplicate(cells, self.n) {
                    return Some(Violation::Box {
                        band: k,
                        stack: m,
                        symbol: s,
                    });
                }
            }
        }
        None
    }

    pub fn is_latin(&self) -> bool {
        self.latin_violation().is_none()
    }

    pub fn is_sudoku(&self, part: BoxPartition) -> bool {
        self.sudoku_violation(part).is_none()
    }
}

fn duplicate(mut values: impl Iterator<Item = u8>, n: usize) -> Option<u8> {
    let mut seen = vec![false; n + 1];
    values.find(|&v| std::mem::replace(&mut seen[v as usize], true))
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Why a grid is not a valid design; indices are 0-based, `Display` is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadSymbol {
        row: usize,
        col: usize,
        symbol: u8,
    },
    Row {
        row: usize,
        symbol: u8,
    },
    Column {
        col: usize,
        symbol: u8,
    },
    Box {
        band: usize,
        stack: usize,
        symbol: u8,
    },
    Shape {
        n: usize,
        p: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::BadSymbol { row, col, symbol } => write!(
                f,
                "symbol {symbol} at row {}, column {} is out of range",
                row + 1,
                col + 1
            ),
            Violation::Row { row, symbol } => {
                write!(f, "symbol {symbol} appears twice in row {}", row + 1)
            }
            Violation::Column { col, symbol } => {
                write!(f, "symbol {symbol} appears twice in column {}", col + 1)
            }
            Violation::Box {
                band,
                stack,
                symbol,
            } => write!(
                f,
                "symbol {symbol} appears twice in box ({}, {})",
                band + 1,
                stack + 1
            ),
            Violation::Shape { n, p } => write!(f, "order {n} does not match box side {p}"),
        }
    }
}

/// A Latin square: every symbol once per row and once per column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatinSquare(Grid);

impl LatinSquare {
    pub fn new(grid: Grid) -> Result<Self> {
        match grid.latin_violation() {
            None => Ok(LatinSquare(grid)),
            Some(v) => Err(Error::Verification(v.to_string())),
        }
    }

    pub(crate) fn new_unchecked(grid: Grid) -> Self {
        debug_assert!(grid.is_latin());
        LatinSquare(grid)
    }

    pub fn grid(&self) -> &Grid {
        &self.0
    }

    pub fn into_grid(self) -> Grid {
        self.0
    }
}

/// A Sudoku (gerechte design with `p x p` boxes).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SudokuGrid {
    part: BoxPartition,
    grid: Grid,
}

impl SudokuGrid {
    pub fn new(grid: Grid, part: BoxPartition) -> Result<Self> {
        match grid.sudoku_violation(part) {
            None => Ok(SudokuGrid { part, grid }),
            Some(v) => Err(Error::Verification(v.to_string())),
        }
    }

    pub(crate) fn new_unchecked(grid: Grid, part: BoxPartition) -> Self {
        debug_assert!(grid.is_sudoku(part));
        SudokuGrid { part, grid }
    }

    pub fn p(&self) -> usize {
        self.part.p()
    }

    pub fn partition(&self) -> BoxPartition {
        self.part
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn into_grid(self) -> Grid {
        self.grid
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Design {
    Latin(LatinSquare),
    Sudoku(SudokuGrid),
}

impl Design {
    pub fn grid(&self) -> &Grid {
        match self {
            Design::Latin(l) => l.grid(),
            Design::Sudoku(s) => s.grid(),
        }
    }

    pub fn kind(&self) -> DesignKind {
        match self {
            Design::Latin(_) => DesignKind::Latin,
            Design::Sudoku(_) => DesignKind::Sudoku,
        }
    }

    pub fn partition(&self) -> Option<BoxPartition> {
        match self {
            Design::Latin(_) => None,
            Design::Sudoku(s) => Some(s.partition()),
        }
    }

    /// Same design kind and geometry, new cells. Used by the relabelling and
    /// row/column moves, which preserve validity.
    pub(crate) fn with_grid(&self, grid: Grid) -> Design {
        match self {
            Design::Latin(_) => Design::Latin(LatinSquare::new_unchecked(grid)),
            Design::Sudoku(s) => Design::Sudoku(SudokuGrid::new_unchecked(grid, s.partition())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&[u8]]) -> Grid {
        Grid::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn detects_each_violation() {
        assert!(g(&[&[1, 2], &[2, 1]]).is_latin());
        assert_eq!(
            g(&[&[1, 1], &[2, 2]]).latin_violation(),
            Some(Violation::Row { row: 0, symbol: 1 })
        );
        assert_eq!(
            g(&[&[1, 2], &[1, 2]]).latin_violation(),
            Some(Violation::Column { col: 0, symbol: 1 })
        );
        assert_eq!(
            g(&[&[1, 3], &[2, 1]]).latin_violation(),
            Some(Violation::BadSymbol {
                row: 0,
                col: 1,
                symbol: 3
            })
        );
        let cyclic = g(&[&[1, 2, 3, 4], &[2, 3, 4, 1], &[3, 4, 1, 2], &[4, 1, 2, 3]]);
        let part = BoxPartition::new(2).unwrap();
        assert!(cyclic.is_latin());
        assert_eq!(
            cyclic.sudoku_violation(part),
            Some(Violation::Box {
                band: 0,
                stack: 0,
                symbol: 2
            })
        );
        assert!(Grid::from_rows(&[vec![1, 2], vec![1]]).is_err());
    }

    #[test]
    fn violation_messages_are_one_based() {
        let v = Violation::Column { col: 2, symbol: 5 };
        assert_eq!(v.to_string(), "symbol 5 appears twice in column 3");
    }
}
