//! Dynamic time warping baselines: exact DTW and FastDTW.
//!
//! Local cost is the (unsquared) Euclidean distance between samples, so
//! [`normalized_error`] is in the same units as
//! [`pairwise_error`](crate::signal::pairwise_error).

mod fast;
mod window;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use fast::{coarsen, expand_window, fastdtw};
pub use window::Window;

use crate::error::{Error, Result};
use crate::signal::{euclidean, Signal};

/// A monotone, continuous alignment from `(0, 0)` to the terminal corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarpingPath(Vec<(usize, usize)>);

impl WarpingPath {
    /// Validates boundary conditions and unit steps for sequences of lengths
    /// `len1` and `len2`.
    pub fn new(pairs: Vec<(usize, usize)>, len1: usize, len2: usize) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInput(format!("warping path: {msg}")));
        match (pairs.first(), pairs.last()) {
            (Some(&(0, 0)), Some(&end)) if end == (len1.wrapping_sub(1), len2.wrapping_sub(1)) => {}
            _ => {
                return invalid(format!(
                    "must run from (0, 0) to ({}, {})",
                    len1 - 1,
                    len2 - 1
                ))
            }
        }
        for (k, w) in pairs.windows(2).enumerate() {
            let (di, dj) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if di > 1 || dj > 1 || di + dj == 0 {
                return invalid(format!("illegal step at position {}", k + 1));
            }
        }
        Ok(Self(pairs))
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same path with the roles of the two sequences swapped.
    pub fn transposed(&self) -> Self {
        Self(self.0.iter().map(|&(i, j)| (j, i)).collect())
    }

    /// Two-column `i,j` CSV.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        for (i, j) in &self.0 {
            writeln!(out, "{i},{j}")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Accumulated cost and the backtracked optimal path.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwAlignment {
    pub cost: f64,
    pub path: WarpingPath,
}

impl DtwAlignment {
    pub fn normalized_error(&self) -> f64 {
        normalized_error(self.cost, &self.path)
    }
}

/// Accumulated cost divided by the number of matched pairs.
pub fn normalized_error(cost: f64, path: &WarpingPath) -> f64 {
    cost / path.len() as f64
}

/// Exact DTW over the full `T1 x T2` grid.
pub fn dtw_full(s1: &Signal, s2: &Signal) -> Result<DtwAlignment> {
    dtw_windowed(s1, s2, &Window::full(s1.len(), s2.len()))
}

/// DTW restricted to the cells of `window`; cells outside count as `+inf`.
pub fn dtw_windowed(s1: &Signal, s2: &Signal, window: &Window) -> Result<DtwAlignment> {
    if s1.dim() != s2.dim() {
        return Err(s1.mismatch(s2));
    }
    if window.rows() != s1.len() || window.cols() != s2.len() {
        return Err(Error::InvalidWindow(format!(
            "window is {}x{}, signals are {}x{}",
            window.rows(),
            window.cols(),
            s1.len(),
            s2.len()
        )));
    }
    let matrix = CostMatrix::accumulate(s1, s2, window);
    let (last_i, last_j) = (s1.len() - 1, s2.len() - 1);
    let cost = matrix.get(last_i, last_j);
    if !cost.is_finite() {
        return Err(Error::InvalidWindow(
            "terminal cell is unreachable inside the window".into(),
        ));
    }
    let path = matrix.backtrack(last_i, last_j);
    Ok(DtwAlignment {
        cost,
        path: WarpingPath(path),
    })
}

/// Accumulated costs stored row by row over the window cells only.
struct CostMatrix<'w> {
    window: &'w Window,
    offsets: Vec<usize>,
    cells: Vec<f64>,
}

impl<'w> CostMatrix<'w> {
    fn accumulate(s1: &Signal, s2: &Signal, window: &'w Window) -> Self {
        let mut offsets = Vec::with_capacity(window.rows());
        let mut total = 0;
        for i in 0..window.rows() {
            offsets.push(total);
            let (lo, hi) = window.range(i);
            total += hi - lo + 1;
        }
        let mut matrix = CostMatrix {
            window,
            offsets,
            cells: Vec::with_capacity(total),
        };
        for i in 0..window.rows() {
            let a = s1.row(i);
            let (lo, hi) = window.range(i);
            for j in lo..=hi {
                let d = euclidean(a, s2.row(j));
                let best = if i == 0 && j == 0 {
                    0.0
                } else {
                    let left = if j > lo {
                        matrix.cells[matrix.cells.len() - 1]
                    } else {
                        f64::INFINITY
                    };
                    if i == 0 {
                        left
                    } else {
                        let up = matrix.get(i - 1, j);
                        let diag = if j > 0 {
                            matrix.get(i - 1, j - 1)
                        } else {
                            f64::INFINITY
                        };
                        left.min(up).min(diag)
                    }
                };
                matrix.cells.push(d + best);
            }
        }
        matrix
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = self.window.range(i);
        if j < lo || j > hi {
            f64::INFINITY
        } else {
            self.cells[self.offsets[i] + j - lo]
        }
    }

    /// Walks back from `(i, j)`; ties prefer the diagonal, then the
    /// vertical `(i - 1, j)`, then the horizontal `(i, j - 1)` step.
    fn backtrack(&self, mut i: usize, mut j: usize) -> Vec<(usize, usize)> {
        let mut path = vec![(i, j)];
        while (i, j) != (0, 0) {
            let diag = if i > 0 && j > 0 {
                self.get(i - 1, j - 1)
            } else {
                f64::INFINITY
            };
            let up = if i > 0 {
                self.get(i - 1, j)
            } else {
                f64::INFINITY
            };
            let left = if j > 0 {
                self.get(i, j - 1)
            } else {
                f64::INFINITY
            };
            if diag <= up && diag <= left {
                i -= 1;
                j -= 1;
            } else if up <= left {
                i -= 1;
            } else {
                j -= 1;
            }
            path.push((i, j));
        }
        path.reverse();
        path
    }
}
