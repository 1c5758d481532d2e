//! Locality-preserving linear order over arbitrary rectangular grids.
//!
//! This is a generalized Hilbert traversal built from recursive rectangle
//! splits. Consecutive cells are at Chebyshev distance 1; every step is a
//! unit Manhattan step except at most one diagonal, which can only occur
//! when both grid dimensions are odd. The traversal starts at (0, 0) and the
//! initial major axis is the longer dimension (ties go to the row axis), so
//! encoder and decoder derive identical orders from the grid shape alone.

use crate::error::{Error, Result};
use crate::pixels::{ColorTag, QuantizedChannel};

/// A deterministic visiting order over all cells of an `height x width` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOrder {
    height: usize,
    width: usize,
    coords: Vec<(u32, u32)>,
}

impl ScanOrder {
    pub fn new(height: usize, width: usize) -> Result<ScanOrder> {
        if height == 0 || width == 0 {
            return Err(Error::invalid("grid dimensions must be at least 1x1"));
        }
        if height > u32::MAX as usize || width > u32::MAX as usize {
            return Err(Error::invalid("grid dimension exceeds u32"));
        }
        let mut coords = Vec::with_capacity(height * width);
        let (w, h) = (width as i64, height as i64);
        // (x, y) = (column, row); the major axis goes to the longer side.
        // The recursive split alone leaves one diagonal step on mixed-parity
        // rectangles, so those peel one line first: the remaining grid is
        // even-by-even and splits with unit steps throughout.
        if width >= 2 && height >= 2 && width % 2 == 1 && height.is_multiple_of(2) {
            for r in 0..height {
                coords.push((r as u32, 0));
            }
            // Remaining (width-1) x height, entered at its bottom-left.
            if width > height {
                fill(&mut coords, 1, h - 1, w - 1, 0, 0, -h);
            } else {
                fill(&mut coords, 1, h - 1, 0, -h, w - 1, 0);
            }
        } else if width >= 2 && height >= 2 && height % 2 == 1 && width.is_multiple_of(2) {
            for c in 0..width {
                coords.push((0, c as u32));
            }
            // Remaining width x (height-1), entered at its top-right.
            if width >= height - 1 {
                fill(&mut coords, w - 1, 1, -w, 0, 0, h - 1);
            } else {
                fill(&mut coords, w - 1, 1, 0, h - 1, -w, 0);
            }
        } else if width >= height {
            fill(&mut coords, 0, 0, w, 0, 0, h);
        } else {
            fill(&mut coords, 0, 0, 0, h, w, 0);
        }
        debug_assert_eq!(coords.len(), height * width);
        Ok(ScanOrder {
            height,
            width,
            coords,
        })
    }

    /// Plain row-major order, used as the locality baseline.
    pub fn row_major(height: usize, width: usize) -> Result<ScanOrder> {
        if height == 0 || width == 0 {
            return Err(Error::invalid("grid dimensions must be at least 1x1"));
        }
        let coords = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r as u32, c as u32)))
            .collect();
        Ok(ScanOrder {
            height,
            width,
            coords,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Visiting order as (row, col) pairs.
    pub fn coords(&self) -> &[(u32, u32)] {
        &self.coords
    }

    /// Reads grid values out in scan order.
    pub fn linearize<T: Copy>(&self, values: &[T]) -> Vec<T> {
        assert_eq!(values.len(), self.len(), "value count must match the grid");
        self.coords
            .iter()
            .map(|&(r, c)| values[r as usize * self.width + c as usize])
            .collect()
    }

    /// Exact inverse of [`ScanOrder::linearize`].
    pub fn delinearize<T: Copy + Default>(&self, vector: &[T]) -> Result<Vec<T>> {
        if vector.len() != self.len() {
            return Err(Error::invalid(format!(
                "vector length {} does not match {}x{} grid",
                vector.len(),
                self.height,
                self.width
            )));
        }
        let mut out = vec![T::default(); self.len()];
        for (k, &(r, c)) in self.coords.iter().enumerate() {
            out[r as usize * self.width + c as usize] = vector[k];
        }
        Ok(out)
    }

    /// Mean Manhattan distance between consecutively scanned cells: how far
    /// apart neighboring indices land on the grid. Row-major pays a full row
    /// width at every wrap; a unit-step traversal stays at 1.
    pub fn mean_step_distance(&self) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        let total: u64 = self
            .coords
            .windows(2)
            .map(|p| (p[0].0.abs_diff(p[1].0) + p[0].1.abs_diff(p[1].1)) as u64)
            .sum();
        total as f64 / (self.len() - 1) as f64
    }

    /// Mean |scan index difference| over all 4-connected neighbor pairs.
    pub fn mean_neighbor_index_distance(&self) -> f64 {
        let mut pos = vec![0usize; self.len()];
        for (k, &(r, c)) in self.coords.iter().enumerate() {
            pos[r as usize * self.width + c as usize] = k;
        }
        let mut total = 0f64;
        let mut pairs = 0usize;
        for r in 0..self.height {
            for c in 0..self.width {
                let here = pos[r * self.width + c];
                if c + 1 < self.width {
                    total += here.abs_diff(pos[r * self.width + c + 1]) as f64;
                    pairs += 1;
                }
                if r + 1 < self.height {
                    total += here.abs_diff(pos[(r + 1) * self.width + c]) as f64;
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            0.0
        } else {
            total / pairs as f64
        }
    }
}

/// Converts a quantized channel to its scan-order vector.
pub fn linearize_channel(order: &ScanOrder, channel: &QuantizedChannel) -> Vec<u8> {
    assert_eq!(order.height(), channel.height());
    assert_eq!(order.width(), channel.width());
    order.linearize(channel.levels())
}

/// Rebuilds a quantized channel from its scan-order vector.
pub fn delinearize_channel(
    order: &ScanOrder,
    vector: &[u8],
    color: ColorTag,
) -> Result<QuantizedChannel> {
    let values = order.delinearize(vector)?;
    QuantizedChannel::new(order.width(), order.height(), color, values)
}

fn sgn(x: i64) -> i64 {
    x.signum()
}

/// Recursive rectangle fill; (ax, ay) is the major axis vector, (bx, by) the
/// minor. Emits (row, col) pairs.
fn fill(coords: &mut Vec<(u32, u32)>, mut x: i64, mut y: i64, ax: i64, ay: i64, bx: i64, by: i64) {
    let w = (ax + ay).abs();
    let h = (bx + by).abs();
    let (dax, day) = (sgn(ax), sgn(ay));
    let (dbx, dby) = (sgn(bx), sgn(by));

    if h == 1 {
        for _ in 0..w {
            coords.push((y as u32, x as u32));
            x += dax;
            y += day;
        }
        return;
    }
    if w == 1 {
        for _ in 0..h {
            coords.push((y as u32, x as u32));
            x += dbx;
            y += dby;
        }
        return;
    }

    let (mut ax2, mut ay2) = (ax / 2, ay / 2);
    let (mut bx2, mut by2) = (bx / 2, by / 2);
    let w2 = (ax2 + ay2).abs();
    let h2 = (bx2 + by2).abs();

    if 2 * w > 3 * h {
        if w2 % 2 != 0 && w > 2 {
            ax2 += dax;
            ay2 += day;
        }
        // Long rectangle: split along the major axis only.
        fill(coords, x, y, ax2, ay2, bx, by);
        fill(coords, x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by);
    } else {
        if h2 % 2 != 0 && h > 2 {
            bx2 += dbx;
            by2 += dby;
        }
        fill(coords, x, y, bx2, by2, ax2, ay2);
        fill(coords, x + bx2, y + by2, ax, ay, bx - bx2, by - by2);
        fill(
            coords,
            x + (ax - dax) + (bx2 - dbx),
            y + (ay - day) + (by2 - dby),
            -bx2,
            -by2,
            -(ax - ax2),
            -(ay - ay2),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Checks the permutation and step-size invariants for one shape.
    fn assert_valid_order(order: &ScanOrder) {
        let (h, w) = (order.height(), order.width());
        let mut seen = vec![false; h * w];
        assert_eq!(order.coords().len(), h * w);
        for &(r, c) in order.coords() {
            let idx = r as usize * w + c as usize;
            assert!((r as usize) < h && (c as usize) < w, "cell out of grid");
            assert!(!seen[idx], "cell visited twice");
            seen[idx] = true;
        }
        let mut diagonal_steps = 0;
        for pair in order.coords().windows(2) {
            let dr = pair[0].0.abs_diff(pair[1].0) as usize;
            let dc = pair[0].1.abs_diff(pair[1].1) as usize;
            assert_eq!(dr.max(dc), 1, "step is not Chebyshev distance 1");
            if dr + dc == 2 {
                diagonal_steps += 1;
            }
        }
        if h % 2 == 0 || w % 2 == 0 {
            assert_eq!(diagonal_steps, 0, "diagonal step on non-odd shape {h}x{w}");
        } else {
            assert!(diagonal_steps <= 1, "{diagonal_steps} diagonals on {h}x{w}");
        }
        assert_eq!(order.coords()[0], (0, 0), "must start at the origin");
    }

    #[test]
    fn one_row_is_plain_row_order() {
        let order = ScanOrder::new(1, 5).unwrap();
        assert_eq!(
            order.coords(),
            &[(0, 0), (0, 1), (0, 2), (0, 3), (0, 4)]
        );
    }

    #[test]
    fn one_column_is_plain_column_order() {
        let order = ScanOrder::new(4, 1).unwrap();
        assert_eq!(order.coords(), &[(0, 0), (1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn two_by_two_is_a_unit_step_u_walk() {
        let order = ScanOrder::new(2, 2).unwrap();
        assert_valid_order(&order);
        // Orientation fixed by the tie rule: major axis along the row.
        assert_eq!(order.coords(), &[(0, 0), (1, 0), (1, 1), (0, 1)]);
    }

    #[test]
    fn four_by_four_recursive_structure() {
        let order = ScanOrder::new(4, 4).unwrap();
        assert_valid_order(&order);
        // First quadrant (2x2 block) is exhausted before leaving it.
        let first4: Vec<_> = order.coords()[..4].to_vec();
        for &(r, c) in &first4 {
            assert!(r < 2 && c < 2, "first four cells must stay in one quadrant");
        }
        // Endpoints of the curve sit on grid corners adjacent to the start.
        assert_eq!(order.coords()[0], (0, 0));
        assert_eq!(order.coords()[15], (0, 3));
    }

    #[test]
    fn adjacency_invariant_holds_for_all_small_shapes() {
        for h in 1..=32 {
            for w in 1..=32 {
                assert_valid_order(&ScanOrder::new(h, w).unwrap());
            }
        }
    }

    #[test]
    fn odd_by_odd_allows_at_most_one_diagonal() {
        // The split rule happens to avoid the diagonal entirely here; the
        // contract only permits one, and only on odd-by-odd grids.
        for (h, w) in [(17, 23), (23, 17), (5, 5), (63, 61)] {
            let order = ScanOrder::new(h, w).unwrap();
            assert_valid_order(&order);
            let diagonals = order
                .coords()
                .windows(2)
                .filter(|p| p[0].0.abs_diff(p[1].0) + p[0].1.abs_diff(p[1].1) == 2)
                .count();
            assert!(diagonals <= 1);
        }
    }

    #[test]
    fn rejects_zero_dimension() {
        assert!(ScanOrder::new(0, 3).is_err());
        assert!(ScanOrder::new(3, 0).is_err());
    }

    #[test]
    fn constant_matrix_linearizes_to_constant_vector() {
        let order = ScanOrder::new(3, 4).unwrap();
        let v = order.linearize(&[9u8; 12]);
        assert_eq!(v, vec![9u8; 12]);
    }

    #[test]
    fn single_row_matrix_is_unchanged() {
        let order = ScanOrder::new(1, 6).unwrap();
        let values: Vec<u8> = (0..6).collect();
        assert_eq!(order.linearize(&values), values);
    }

    #[test]
    fn locality_beats_row_major_on_random_shapes() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut wins = 0;
        let mut eligible = 0;
        for _ in 0..120 {
            let h = rng.random_range(2..=64);
            let w = rng.random_range(2..=64);
            let hil = ScanOrder::new(h, w).unwrap().mean_step_distance();
            let row = ScanOrder::row_major(h, w).unwrap().mean_step_distance();
            eligible += 1;
            if hil < row {
                wins += 1;
            }
        }
        assert_eq!(wins, eligible, "scan order must beat row-major everywhere");
    }

    #[test]
    fn neighbor_runs_stay_short_compared_to_row_major_wraps() {
        // The codec cares about same-level pixels landing consecutively:
        // under the scan order the fraction of 4-connected neighbor pairs
        // that are also index-adjacent is far higher than under row-major.
        let close_fraction = |order: &ScanOrder| {
            let (h, w) = (order.height(), order.width());
            let mut pos = vec![0usize; h * w];
            for (k, &(r, c)) in order.coords().iter().enumerate() {
                pos[r as usize * w + c as usize] = k;
            }
            let mut close = 0usize;
            let mut pairs = 0usize;
            for r in 0..h {
                for c in 0..w {
                    let here = pos[r * w + c];
                    if c + 1 < w {
                        pairs += 1;
                        close += (here.abs_diff(pos[r * w + c + 1]) == 1) as usize;
                    }
                    if r + 1 < h {
                        pairs += 1;
                        close += (here.abs_diff(pos[(r + 1) * w + c]) == 1) as usize;
                    }
                }
            }
            close as f64 / pairs as f64
        };
        let hil = close_fraction(&ScanOrder::new(32, 48).unwrap());
        let row = close_fraction(&ScanOrder::row_major(32, 48).unwrap());
        assert!(hil > row, "{hil} vs {row}");
    }

    proptest! {
        #[test]
        fn linearize_round_trips(h in 1usize..=64, w in 1usize..=64, seed in any::<u64>()) {
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<u8> = (0..h * w).map(|_| rng.random_range(0..8)).collect();
            let order = ScanOrder::new(h, w).unwrap();
            let vector = order.linearize(&values);
            prop_assert_eq!(order.delinearize(&vector).unwrap(), values);
        }
    }

    #[test]
    fn delinearize_rejects_length_mismatch() {
        let order = ScanOrder::new(2, 2).unwrap();
        assert!(order.delinearize(&[1u8, 2, 3]).is_err());
    }
}
