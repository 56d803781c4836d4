use crate::error::{Error, Result};

/// Per-row inclusive column ranges of the DTW search region.
///
/// Ranges are non-empty with non-decreasing bounds, contain both corner
/// cells, and consecutive rows overlap or touch diagonally so that every
/// row is reachable from the one above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    ranges: Vec<(usize, usize)>,
    cols: usize,
}

impl Window {
    pub fn new(ranges: Vec<(usize, usize)>, cols: usize) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidWindow(msg));
        let rows = ranges.len();
        if rows == 0 || cols == 0 {
            return invalid("window must have at least one row and column".into());
        }
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            if lo > hi || hi >= cols {
                return invalid(format!("row {i} has range [{lo}, {hi}] in {cols} columns"));
            }
        }
        if ranges[0].0 != 0 || ranges[rows - 1].1 != cols - 1 {
            return invalid("window excludes a corner cell".into());
        }
        for (i, w) in ranges.windows(2).enumerate() {
            let ((lo0, hi0), (lo1, hi1)) = (w[0], w[1]);
            if lo1 < lo0 || hi1 < hi0 {
                return invalid(format!("bounds decrease between rows {i} and {}", i + 1));
            }
            if lo1 > hi0 + 1 {
                return invalid(format!("gap between rows {i} and {}", i + 1));
            }
        }
        Ok(Self { ranges, cols })
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            ranges: vec![(0, cols - 1); rows],
            cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.ranges.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn range(&self, row: usize) -> (usize, usize) {
        self.ranges[row]
    }

    pub fn ranges(&self) -> &[(usize, usize)] {
        &self.ranges
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.rows() && (self.ranges[i].0..=self.ranges[i].1).contains(&j)
    }

    pub fn cell_count(&self) -> usize {
        self.ranges.iter().map(|(lo, hi)| hi - lo + 1).sum()
    }

    pub fn is_full(&self) -> bool {
        self.ranges.iter().all(|&r| r == (0, self.cols - 1))
    }
}
