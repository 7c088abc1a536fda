//! Uniform-grid index for fixed-radius neighbor queries in the unit square.

use crate::params::SimParams;
use crate::state::Point;

/// Upper bound on cells per side.
pub const MAX_CELLS_PER_SIDE: usize = 64;

/// Bucketed point set over [0,1]². Buckets are stored contiguously
/// (counting sort), so a cell is a slice of `entries`.
#[derive(Debug, Clone)]
pub struct NeighborIndex {
    cells_per_side: usize,
    cell_side: f64,
    cell_start: Vec<u32>,
    entries: Vec<(Point, u32)>,
}

/// Closed-disk membership shared by the index and its brute-force checks.
#[inline]
pub fn within(a: Point, b: Point, radius: f64) -> bool {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy <= radius * radius
}

impl NeighborIndex {
    /// Cell side `max(rho0, dr, 1/64)`, rounded up so an integral number of
    /// cells (at most 64 per side) tiles the square.
    pub fn cells_per_side_for(params: &SimParams) -> usize {
        let side = params.rho0.max(params.dr).max(1.0 / MAX_CELLS_PER_SIDE as f64);
        ((1.0 / side).floor() as usize).clamp(1, MAX_CELLS_PER_SIDE)
    }

    pub fn for_params<I>(params: &SimParams, points: I) -> Self
    where
        I: IntoIterator<Item = (u32, Point)>,
    {
        Self::build(Self::cells_per_side_for(params), points)
    }

    pub fn build<I>(cells_per_side: usize, points: I) -> Self
    where
        I: IntoIterator<Item = (u32, Point)>,
    {
        let cps = cells_per_side.clamp(1, MAX_CELLS_PER_SIDE);
        let cell_side = 1.0 / cps as f64;
        let items: Vec<(Point, u32)> = points.into_iter().map(|(id, p)| (p, id)).collect();

        let mut cell_start = vec![0u32; cps * cps + 1];
        let keys: Vec<usize> = items
            .iter()
            .map(|(p, _)| Self::cell_of(cps, p[0]) + cps * Self::cell_of(cps, p[1]))
            .collect();
        for &k in &keys {
            cell_start[k + 1] += 1;
        }
        for c in 0..cps * cps {
            cell_start[c + 1] += cell_start[c];
        }
        let mut fill: Vec<u32> = cell_start[..cps * cps].to_vec();
        let mut entries = vec![([0.0, 0.0], 0u32); items.len()];
        for (item, &k) in items.into_iter().zip(&keys) {
            entries[fill[k] as usize] = item;
            fill[k] += 1;
        }
        Self {
            cells_per_side: cps,
            cell_side,
            cell_start,
            entries,
        }
    }

    #[inline]
    fn cell_of(cps: usize, x: f64) -> usize {
        let c = (x * cps as f64).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(cps - 1)
        }
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn cell_side(&self) -> f64 {
        self.cell_side
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Visits the candidate buckets covering the disk; `f` returns `true` to stop.
    #[inline]
    fn scan(&self, p: Point, radius: f64, mut f: impl FnMut(Point, u32) -> bool) {
        if self.entries.is_empty() {
            return;
        }
        let cps = self.cells_per_side;
        let reach = ((radius / self.cell_side).ceil() as usize).max(1);
        let cx = Self::cell_of(cps, p[0]);
        let cy = Self::cell_of(cps, p[1]);
        let (x0, x1) = (cx.saturating_sub(reach), (cx + reach).min(cps - 1));
        let (y0, y1) = (cy.saturating_sub(reach), (cy + reach).min(cps - 1));
        for y in y0..=y1 {
            let row = y * cps;
            let lo = self.cell_start[row + x0] as usize;
            let hi = self.cell_start[row + x1 + 1] as usize;
            // Cells of one row are contiguous, so the whole x-range is one slice.
            for &(q, id) in &self.entries[lo..hi] {
                if f(q, id) {
                    return;
                }
            }
        }
    }

    /// Ids of all indexed points within Euclidean distance `radius` (inclusive).
    pub fn query(&self, p: Point, radius: f64) -> Vec<u32> {
        let mut out = Vec::new();
        self.scan(p, radius, |q, id| {
            if within(p, q, radius) {
                out.push(id);
            }
            false
        });
        out
    }

    /// Whether any indexed point lies within `radius` of `p`.
    #[inline]
    pub fn any_within(&self, p: Point, radius: f64) -> bool {
        let mut hit = false;
        self.scan(p, radius, |q, _| {
            hit = within(p, q, radius);
            hit
        });
        hit
    }
}
