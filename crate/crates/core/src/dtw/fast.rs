//! FastDTW: solve at half resolution, project the path back up, widen it by
//! `radius` cells, and run DTW inside that window.

use crate::error::{Error, Result};
use crate::signal::Signal;

use super::{dtw_full, dtw_windowed, DtwAlignment, Window};

/// Halves the resolution by averaging adjacent sample pairs. An odd final
/// sample is carried over unchanged.
pub fn coarsen(signal: &Signal) -> Result<Signal> {
    let len = signal.len();
    if len < 3 {
        return Err(Error::InvalidSize {
            what: "length of a signal to coarsen",
            min: 3,
            got: len,
        });
    }
    let dim = signal.dim();
    let mut data = Vec::with_capacity(len.div_ceil(2) * dim);
    let mut i = 0;
    while i + 1 < len {
        let (a, b) = (signal.row(i), signal.row(i + 1));
        data.extend(a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)));
        i += 2;
    }
    if len % 2 == 1 {
        data.extend_from_slice(signal.row(len - 1));
    }
    Signal::new(len.div_ceil(2), dim, data)
}

/// Projects a half-resolution path onto a `len1 x len2` grid and dilates it.
///
/// Each low-resolution cell covers its 2x2 block (clipped at odd tails). The
/// block union is widened by `radius` cells in every direction, clipped to
/// the grid, and any gap between consecutive rows is closed.
pub fn expand_window(
    path: &[(usize, usize)],
    radius: usize,
    len1: usize,
    len2: usize,
) -> Result<Window> {
    if len1 == 0 || len2 == 0 {
        return Err(Error::InvalidWindow("empty target grid".into()));
    }
    let mut lo = vec![usize::MAX; len1];
    let mut hi = vec![0usize; len1];
    for &(i, j) in path {
        for a in [2 * i, 2 * i + 1] {
            if a >= len1 {
                continue;
            }
            for b in [2 * j, 2 * j + 1] {
                if b < len2 {
                    lo[a] = lo[a].min(b);
                    hi[a] = hi[a].max(b);
                }
            }
        }
    }
    // Rows the projection missed inherit the previous row's upper bound.
    for a in 0..len1 {
        if lo[a] == usize::MAX {
            let prev = if a == 0 { 0 } else { hi[a - 1] };
            lo[a] = prev;
            hi[a] = prev;
        }
    }
    for a in 1..len1 {
        hi[a] = hi[a].max(hi[a - 1]);
    }
    for a in (0..len1 - 1).rev() {
        lo[a] = lo[a].min(lo[a + 1]);
    }

    let last_col = len2 - 1;
    let mut ranges: Vec<(usize, usize)> = (0..len1)
        .map(|a| {
            let top = a.saturating_sub(radius);
            let bottom = (a + radius).min(len1 - 1);
            let l = lo[top].saturating_sub(radius).min(last_col);
            let h = hi[bottom].saturating_add(radius).min(last_col);
            (l, h)
        })
        .collect();
    ranges[0].0 = 0;
    ranges[len1 - 1].1 = last_col;
    for a in 1..len1 {
        ranges[a].1 = ranges[a].1.max(ranges[a - 1].1);
        ranges[a].0 = ranges[a].0.max(ranges[a - 1].0).min(ranges[a - 1].1 + 1);
    }
    Window::new(ranges, len2)
}

/// Approximate DTW with search radius `radius` at every resolution.
pub fn fastdtw(s1: &Signal, s2: &Signal, radius: usize) -> Result<DtwAlignment> {
    if s1.dim() != s2.dim() {
        return Err(s1.mismatch(s2));
    }
    if s1.len().min(s2.len()) <= radius + 2 {
        return dtw_full(s1, s2);
    }
    let low = fastdtw(&coarsen(s1)?, &coarsen(s2)?, radius)?;
    let window = expand_window(low.path.pairs(), radius, s1.len(), s2.len())?;
    dtw_windowed(s1, s2, &window)
}
