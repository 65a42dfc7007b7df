//! Independent grid-graph distance oracle, for tests only.
//!
//! Shortest path in the (3^d - 1)-neighbor graph over grid cells whose
//! centers lie safely inside the domain. Overestimates the intrinsic distance
//! by at most a metrication factor (≤ 8% for the 26/8-neighbor stencils) plus
//! O(resolution). Deliberately simple and entirely independent of the
//! polyline-shortening code path it cross-checks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::domain::ImplicitDomain;
use crate::geom::Point;

use super::GeodesyError;

/// Cell cap for the oracle grid.
pub const DEFAULT_CELL_CAP: usize = 30_000_000;

struct Grid {
    dims: Vec<usize>,
    origin: Point,
    res: f64,
    dim: usize,
}

impl Grid {
    fn index(&self, cell: &[usize]) -> usize {
        let mut idx = 0;
        for (i, &c) in cell.iter().enumerate() {
            idx = idx * self.dims[i] + c;
        }
        idx
    }

    fn center(&self, cell: &[usize]) -> Point {
        let mut p = self.origin;
        for i in 0..self.dim {
            p[i] += (cell[i] as f64 + 0.5) * self.res;
        }
        p
    }

    fn cell_of(&self, p: &Point) -> Option<Vec<usize>> {
        let mut cell = vec![0usize; self.dim];
        for i in 0..self.dim {
            let c = ((p[i] - self.origin[i]) / self.res).floor();
            if c < 0.0 || c >= self.dims[i] as f64 {
                return None;
            }
            cell[i] = c as usize;
        }
        Some(cell)
    }
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    idx: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance.
        other.dist.partial_cmp(&self.dist).unwrap().then(other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Grid-Dijkstra distance between v and z.
///
/// `window` restricts the grid to an axis box (intersected with the domain
/// bounding box); without it the full bounding box is used, which is only
/// viable for desk-sized domains.
pub fn grid_distance_oracle(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    resolution: f64,
    window: Option<(Point, Point)>,
    cell_cap: usize,
) -> Result<f64, GeodesyError> {
    assert!(resolution > 0.0);
    let d = domain.dim;
    let (mut lo, mut hi) = window.unwrap_or((domain.bbox_min, domain.bbox_max));
    for i in 0..d {
        lo[i] = lo[i].max(domain.bbox_min[i]) - resolution;
        hi[i] = hi[i].min(domain.bbox_max[i]) + resolution;
        // Anchor the lattice so cell centers fall on integer multiples of the
        // resolution (centers then hit coordinate planes such as x_i = 0,
        // where narrow channels above pinch corners open up).
        lo[i] = (lo[i] / resolution).floor() * resolution - 0.5 * resolution;
    }
    let mut dims = Vec::with_capacity(d);
    let mut total: usize = 1;
    for i in 0..d {
        let n = (((hi[i] - lo[i]) / resolution).ceil() as usize).max(1);
        total = total.saturating_mul(n);
        dims.push(n);
    }
    if total > cell_cap {
        return Err(GeodesyError::GridTooLarge);
    }
    let grid = Grid { dims, origin: lo, res: resolution, dim: d };

    // Cells whose centers sit clear of the boundary; the res²/6 clearance
    // keeps crossings of pinch sets out of the graph while leaving the
    // channels just above pinch corners traversable.
    let h_g = resolution * resolution / 6.0;
    let valid = |cell: &[usize]| -> bool {
        let c = grid.center(cell);
        domain.phi(&c) <= -h_g
    };

    let snap = |p: &Point| -> Option<(Vec<usize>, f64)> {
        // Nearest valid cell center within a few cells of p.
        let base = grid.cell_of(p)?;
        let mut best: Option<(Vec<usize>, f64)> = None;
        let r = 3i64;
        let mut stack = vec![Vec::<i64>::new()];
        while let Some(prefix) = stack.pop() {
            if prefix.len() == d {
                let mut cell = Vec::with_capacity(d);
                let mut ok = true;
                for i in 0..d {
                    let c = base[i] as i64 + prefix[i];
                    if c < 0 || c >= grid.dims[i] as i64 {
                        ok = false;
                        break;
                    }
                    cell.push(c as usize);
                }
                if ok && valid(&cell) {
                    let dist = grid.center(&cell).dist(p);
                    if best.as_ref().map_or(true, |(_, bd)| dist < *bd) {
                        best = Some((cell, dist));
                    }
                }
                continue;
            }
            for off in -r..=r {
                let mut next = prefix.clone();
                next.push(off);
                stack.push(next);
            }
        }
        best
    };

    let (start, snap_in) = snap(v).ok_or(GeodesyError::AllSeedsFailed)?;
    let (goal, snap_out) = snap(z).ok_or(GeodesyError::AllSeedsFailed)?;
    let goal_idx = grid.index(&goal);

    // Neighbor offsets: all nonzero {-1,0,1}^d.
    let mut offsets: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::new();
        for o in &offsets {
            for v in [-1i64, 0, 1] {
                let mut oo = o.clone();
                oo.push(v);
                next.push(oo);
            }
        }
        offsets = next;
    }
    offsets.retain(|o| o.iter().any(|&x| x != 0));
    let offset_len: Vec<f64> = offsets
        .iter()
        .map(|o| (o.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt() * resolution)
        .collect();

    let mut dist = vec![f64::INFINITY; total];
    let start_idx = grid.index(&start);
    dist[start_idx] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem { dist: 0.0, idx: start_idx });

    // Decode an index back to a cell.
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut cell = vec![0usize; d];
        for i in (0..d).rev() {
            cell[i] = idx % grid.dims[i];
            idx /= grid.dims[i];
        }
        cell
    };

    while let Some(HeapItem { dist: du, idx: u }) = heap.pop() {
        if du > dist[u] {
            continue;
        }
        if u == goal_idx {
            break;
        }
        let cell = decode(u);
        for (k, off) in offsets.iter().enumerate() {
            let mut ncell = Vec::with_capacity(d);
            let mut ok = true;
            for i in 0..d {
                let c = cell[i] as i64 + off[i];
                if c < 0 || c >= grid.dims[i] as i64 {
                    ok = false;
                    break;
                }
                ncell.push(c as usize);
            }
            if !ok || !valid(&ncell) {
                continue;
            }
            // Edge midpoint must not poke outside the domain (blocks diagonal
            // hops across thin obstacles).
            let mid = grid.center(&cell).lerp(&grid.center(&ncell), 0.5);
            if domain.phi(&mid) > 0.0 {
                continue;
            }
            let nidx = grid.index(&ncell);
            let nd = du + offset_len[k];
            if nd < dist[nidx] {
                dist[nidx] = nd;
                heap.push(HeapItem { dist: nd, idx: nidx });
            }
        }
    }

    let du = dist[goal_idx];
    if du.is_finite() {
        Ok(snap_in + du + snap_out)
    } else {
        Err(GeodesyError::AllSeedsFailed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{catalog_domain, catalog_domain_with};

    #[test]
    fn unit_square_diagonal_within_metrication() {
        let d = catalog_domain_with("box", &[("dim", 2.0), ("half_width", 0.5)]).unwrap();
        let a = Point::of2(-0.45, -0.45);
        let b = Point::of2(0.45, 0.45);
        let got = grid_distance_oracle(&d, &a, &b, 0.01, None, DEFAULT_CELL_CAP).unwrap();
        let exact = a.dist(&b);
        assert!(got >= exact - 1e-9);
        assert!((got - exact) / exact < 0.08, "oracle {got} vs exact {exact}");
    }

    #[test]
    fn corridor_axis_distance_is_exact_up_to_snapping() {
        let d = catalog_domain_with("box", &[("dim", 2.0), ("half_width", 1.0)]).unwrap();
        let a = Point::of2(-0.9, 0.0);
        let b = Point::of2(0.9, 0.0);
        let got = grid_distance_oracle(&d, &a, &b, 0.05, None, DEFAULT_CELL_CAP).unwrap();
        assert!((got - 1.8).abs() < 0.1, "got {got}");
    }

    #[test]
    fn eroded_cube_brackets_geodesic_from_above() {
        let d = catalog_domain("eroded_cube").unwrap();
        let a = Point::of3(0.0, 0.1, 0.0);
        let b = Point::of3(0.0, -0.1, 0.0);
        let expected = (1.04f64).sqrt();
        let win = (Point::of3(-0.4, -0.4, -0.9), Point::of3(0.4, 0.4, 0.9));
        let got = grid_distance_oracle(&d, &a, &b, 0.02, Some(win), DEFAULT_CELL_CAP).unwrap();
        assert!(got >= expected - 0.02, "oracle must not undercut: {got}");
        assert!((got - expected) / expected < 0.08, "got {got} vs {expected}");
    }

    #[test]
    fn cell_cap_is_enforced() {
        let d = catalog_domain("dumbbell_removed").unwrap();
        let r = grid_distance_oracle(
            &d,
            &Point::of3(0.0, 1.0, 0.0),
            &Point::of3(0.0, -1.0, 0.0),
            0.02,
            None,
            1_000_000,
        );
        assert!(matches!(r, Err(GeodesyError::GridTooLarge)));
    }
}
