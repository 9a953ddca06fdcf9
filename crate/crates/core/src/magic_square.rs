//! Deterministic magic square construction, used as the pixel visiting order
//! for magic-order LSB embedding.
//!
//! Odd orders use the Siamese (de la Loubère) walk, doubly even orders use
//! the complemented-diagonal fill and singly even orders use Conway's LUX
//! method. The same order always yields the same grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagicSquare {
    order: usize,
    /// Row-major values in 1..=n².
    grid: Vec<usize>,
    /// `inverse[v - 1]` is the row-major index holding v.
    inverse: Vec<usize>,
}

impl MagicSquare {
    /// Wraps an arbitrary n×n row-major grid without checking it.
    ///
    /// Use [`validate_magic`] to inspect the result. Values outside 1..=n²
    /// are kept in the grid but left out of the inverse map.
    pub fn from_grid(order: usize, grid: Vec<usize>) -> Result<Self> {
        if grid.len() != order * order {
            return Err(Error::InvalidArgument(format!(
                "grid of {} cells is not {order}x{order}",
                grid.len()
            )));
        }
        let cells = grid.len();
        let mut inverse = vec![usize::MAX; cells];
        for (idx, &v) in grid.iter().enumerate() {
            if (1..=cells).contains(&v) && inverse[v - 1] == usize::MAX {
                inverse[v - 1] = idx;
            }
        }
        Ok(Self {
            order,
            grid,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn magic_constant(&self) -> usize {
        let n = self.order;
        n * (n * n + 1) / 2
    }

    /// Value at 0-indexed (row, col).
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.grid[row * self.order + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.grid.chunks(self.order)
    }

    pub fn as_row_major(&self) -> &[usize] {
        &self.grid
    }

    /// 1-indexed (row, col) of value `v`.
    pub fn position_of(&self, v: usize) -> Result<(usize, usize)> {
        let idx = self.linear_index_of(v)?;
        Ok((idx / self.order + 1, idx % self.order + 1))
    }

    /// 0-indexed row-major cell holding `v`.
    pub fn linear_index_of(&self, v: usize) -> Result<usize> {
        let max = self.grid.len();
        match v.checked_sub(1).and_then(|i| self.inverse.get(i)) {
            Some(&idx) if idx != usize::MAX => Ok(idx),
            _ => Err(Error::ValueOutOfRange { value: v, max }),
        }
    }

    /// Space-separated rows, one per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

pub fn build_magic(n: usize) -> Result<MagicSquare> {
    if n < 3 {
        return Err(Error::OrderTooSmall(n));
    }
    let grid = if n % 2 == 1 {
        siamese(n)
    } else if n.is_multiple_of(4) {
        doubly_even(n)
    } else {
        lux(n)
    };
    MagicSquare::from_grid(n, grid)
}

fn siamese(n: usize) -> Vec<usize> {
    let mut grid = vec![0; n * n];
    let (mut row, mut col) = (0, n / 2);
    for v in 1..=n * n {
        grid[row * n + col] = v;
        let up = (row + n - 1) % n;
        let right = (col + 1) % n;
        if grid[up * n + right] == 0 {
            row = up;
            col = right;
        } else {
            row = (row + 1) % n;
        }
    }
    grid
}

fn doubly_even(n: usize) -> Vec<usize> {
    let cells = n * n;
    (0..cells)
        .map(|idx| {
            let (r, c) = (idx / n % 4, idx % n % 4);
            let v = idx + 1;
            if r == c || r + c == 3 {
                cells + 1 - v
            } else {
                v
            }
        })
        .collect()
}

fn lux(n: usize) -> Vec<usize> {
    let m = (n - 2) / 4;
    let k = 2 * m + 1;
    let base = siamese(k);

    #[derive(Clone, Copy, PartialEq)]
    enum Pattern {
        L,
        U,
        X,
    }

    let mut letters = vec![Pattern::X; k * k];
    for r in 0..k {
        let letter = if r <= m {
            Pattern::L
        } else if r == m + 1 {
            Pattern::U
        } else {
            Pattern::X
        };
        letters[r * k..(r + 1) * k].fill(letter);
    }
    // Centre U trades places with the L directly above it.
    letters.swap((m + 1) * k + m, m * k + m);

    let mut grid = vec![0; n * n];
    for r in 0..k {
        for c in 0..k {
            let offset = 4 * (base[r * k + c] - 1);
            // [top-left, top-right, bottom-left, bottom-right]
            let quad = match letters[r * k + c] {
                Pattern::L => [4, 1, 2, 3],
                Pattern::U => [1, 4, 2, 3],
                Pattern::X => [1, 4, 3, 2],
            };
            let (top, left) = (2 * r, 2 * c);
            grid[top * n + left] = offset + quad[0];
            grid[top * n + left + 1] = offset + quad[1];
            grid[(top + 1) * n + left] = offset + quad[2];
            grid[(top + 1) * n + left + 1] = offset + quad[3];
        }
    }
    grid
}

/// Outcome of checking each magic-square invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub order: usize,
    pub magic_constant: usize,
    pub is_permutation: bool,
    pub rows_ok: bool,
    pub columns_ok: bool,
    pub diagonals_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.is_permutation && self.rows_ok && self.columns_ok && self.diagonals_ok
    }
}

pub fn validate_magic(square: &MagicSquare) -> ValidationReport {
    let n = square.order();
    let target = square.magic_constant();
    let grid = square.as_row_major();

    let mut seen = vec![false; n * n];
    let is_permutation = grid.iter().all(|&v| {
        (1..=n * n).contains(&v) && !std::mem::replace(&mut seen[v - 1], true)
    });
    let rows_ok = (0..n).all(|r| (0..n).map(|c| grid[r * n + c]).sum::<usize>() == target);
    let columns_ok = (0..n).all(|c| (0..n).map(|r| grid[r * n + c]).sum::<usize>() == target);
    let main: usize = (0..n).map(|i| grid[i * n + i]).sum();
    let anti: usize = (0..n).map(|i| grid[i * n + (n - 1 - i)]).sum();

    ValidationReport {
        order: n,
        magic_constant: target,
        is_permutation,
        rows_ok,
        columns_ok,
        diagonals_ok: main == target && anti == target,
    }
}
