use rayon::prelude::*;

use super::pair::{bloat_table, pair_regions, PairRegions};
use crate::geom::{Aabb, Approx, ConvexPolyhedron, PolyUnion, Vec3};
use crate::index::{diff_raw, intersect_raw, simplify, IndexedUnion, OpStats};
use crate::scenario::{Deployment, Placed, Scenario};
use crate::{Error, Result};

/// Piece count above which a running intersection is simplified.
const SIMPLIFY_ABOVE: usize = 64;

/// Settings of the closed-form uncovered-region computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncoveredConfig {
    /// Approximation tolerance for curved regions.
    pub rho: f64,
    /// Number of cells; `None` picks about 20 cells along the longest axis.
    pub cells: Option<usize>,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for UncoveredConfig {
    fn default() -> Self {
        UncoveredConfig {
            rho: 10.0,
            cells: None,
            workers: 0,
        }
    }
}

/// Under- and over-approximation of one `U^{j,q}`.
#[derive(Debug, Clone)]
pub struct UncoveredEntry {
    pub j: usize,
    pub q: usize,
    pub under: IndexedUnion,
    pub over: IndexedUnion,
}

#[derive(Debug, Clone, Default)]
pub struct UncoveredResult {
    pub entries: Vec<UncoveredEntry>,
    /// Over-approximated regions of the useful pairs, per quality.
    pub pairs: Vec<PairRegions>,
}

impl UncoveredResult {
    pub fn entry(&self, j: usize, q: usize) -> Option<&UncoveredEntry> {
        self.entries.iter().find(|e| e.j == j && e.q == q)
    }
}

/// Cell counts per axis for `m` congruent cells over `b`: the factorization
/// of `m` whose cells are closest to cubes.
pub fn cell_grid(b: &Aabb, m: usize) -> Result<[usize; 3]> {
    if m == 0 {
        return Err(Error::domain("cell count must be >= 1"));
    }
    let e = b.extent();
    let mut best = ([m, 1, 1], f64::INFINITY);
    for nx in (1..=m).filter(|d| m % d == 0) {
        let rest = m / nx;
        for ny in (1..=rest).filter(|d| rest % d == 0) {
            let nz = rest / ny;
            let sides = [e.x / nx as f64, e.y / ny as f64, e.z / nz as f64];
            let hi = sides.iter().cloned().fold(0.0, f64::max);
            let lo = sides.iter().cloned().fold(f64::INFINITY, f64::min);
            let aspect = if lo > 0.0 { hi / lo } else { f64::INFINITY };
            if aspect < best.1 {
                best = ([nx, ny, nz], aspect);
            }
        }
    }
    Ok(best.0)
}

fn default_grid(b: &Aabb) -> [usize; 3] {
    let e = b.extent();
    let side = e.x.max(e.y).max(e.z) / 20.0;
    [e.x, e.y, e.z].map(|l| ((l / side).round() as usize).max(1))
}

/// The congruent cells of `b`, in x-major order.
pub fn cells(b: &Aabb, grid: [usize; 3]) -> Vec<Aabb> {
    let e = b.extent();
    let step = Vec3::new(e.x / grid[0] as f64, e.y / grid[1] as f64, e.z / grid[2] as f64);
    let coord = |i: usize, n: usize, lo: f64, hi: f64, s: f64| {
        if i == n {
            hi
        } else {
            lo + s * i as f64
        }
    };
    let mut out = Vec::with_capacity(grid[0] * grid[1] * grid[2]);
    for i in 0..grid[0] {
        for k in 0..grid[1] {
            for l in 0..grid[2] {
                let lo = Vec3::new(
                    coord(i, grid[0], b.min.x, b.max.x, step.x),
                    coord(k, grid[1], b.min.y, b.max.y, step.y),
                    coord(l, grid[2], b.min.z, b.max.z, step.z),
                );
                let hi = Vec3::new(
                    coord(i + 1, grid[0], b.min.x, b.max.x, step.x),
                    coord(k + 1, grid[1], b.min.y, b.max.y, step.y),
                    coord(l + 1, grid[2], b.min.z, b.max.z, step.z),
                );
                out.push(Aabb::new(lo, hi));
            }
        }
    }
    out
}

fn run<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Solver(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Regions of every pair of deployed sensors that can cover some point,
/// in pair order.
pub fn useful_pairs(
    placed: &[Placed],
    q: usize,
    sc: &Scenario,
    rho: f64,
    mode: Approx,
) -> Result<Vec<PairRegions>> {
    let table = bloat_table(sc, q, rho, mode)?;
    let mut candidates = Vec::new();
    for i in 0..placed.len() {
        for k in i + 1..placed.len() {
            let (a, b) = (&placed[i], &placed[k]);
            let reach = sc.sensors[a.sensor].capabilities[q].range + sc.sensors[b.sensor].capabilities[q].range;
            if a.pos.dist(b.pos) < reach {
                candidates.push((a, b));
            }
        }
    }
    let regions: Result<Vec<PairRegions>> = candidates
        .par_iter()
        .map(|(a, b)| pair_regions(a, b, q, sc, rho, mode, &table))
        .collect();
    Ok(regions?.into_iter().filter(|p| !p.is_useless()).collect())
}

/// Sets of `size` elements of `0..n`, in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

fn cell_region(
    cell: &Aabb,
    j: usize,
    placed: &[Placed],
    pairs: &[PairRegions],
    sc: &Scenario,
    mode: Approx,
) -> Vec<ConvexPolyhedron> {
    let Some(box_poly) = ConvexPolyhedron::from_aabb(cell) else {
        return Vec::new();
    };
    let base = sc.roi.clipped(&box_poly);
    if base.is_empty() {
        return Vec::new();
    }
    let base = IndexedUnion::new(base);
    let eligible: Vec<&PairRegions> = pairs
        .iter()
        .filter(|p| {
            let r = p.r_pair.pieces();
            p.r_pair
                .query(cell)
                .into_iter()
                .any(|i| r[i].intersect(&box_poly).is_some())
        })
        .collect();

    let mut acc: Vec<ConvexPolyhedron> = Vec::new();
    let mut stats = OpStats::default();
    for faults in combinations(placed.len(), j.min(placed.len())) {
        let failed = |s: usize| faults.iter().any(|&f| placed[f].sensor == s);
        let survivors: Vec<&&PairRegions> = eligible.iter().filter(|p| !failed(p.a) && !failed(p.b)).collect();
        if survivors.is_empty() {
            // no pair left: the whole cell is uncovered, other fault sets add nothing
            acc = base.pieces().to_vec();
            break;
        }
        let mut cur = base.clone();
        for p in survivors {
            let mut next = intersect_raw(&cur, &p.u_pair, &mut stats);
            if next.len() > SIMPLIFY_ABOVE {
                next = simplify(&PolyUnion::new(next)).into_pieces();
            }
            cur = IndexedUnion::from_pieces(next);
            if cur.is_empty() {
                break;
            }
        }
        acc.extend(cur.into_union().into_pieces());
    }
    if acc.is_empty() {
        return acc;
    }
    let free = diff_raw(&IndexedUnion::from_pieces(acc), &sc.obstacles, mode, &mut stats);
    simplify(&PolyUnion::new(free)).into_pieces()
}

fn assemble(
    j: usize,
    placed: &[Placed],
    pairs: &[PairRegions],
    sc: &Scenario,
    grid: [usize; 3],
    mode: Approx,
) -> IndexedUnion {
    let cs = cells(&sc.roi.bbox(), grid);
    let parts: Vec<Vec<ConvexPolyhedron>> = cs
        .par_iter()
        .map(|c| cell_region(c, j, placed, pairs, sc, mode))
        .collect();
    IndexedUnion::from_pieces(parts.into_iter().flatten().collect())
}

fn grid_for(sc: &Scenario, cfg: &UncoveredConfig) -> Result<[usize; 3]> {
    match cfg.cells {
        Some(m) => cell_grid(&sc.roi.bbox(), m),
        None => Ok(default_grid(&sc.roi.bbox())),
    }
}

fn check(sc: &Scenario, j: usize, q: usize, cfg: &UncoveredConfig) -> Result<()> {
    if j > sc.k {
        return Err(Error::domain(format!("fault count {j} exceeds k = {}", sc.k)));
    }
    if q >= sc.qualities.len() {
        return Err(Error::domain(format!("no quality level with index {q}")));
    }
    if !(cfg.rho > 0.0) {
        return Err(Error::domain(format!("rho must be > 0, got {}", cfg.rho)));
    }
    Ok(())
}

/// Approximation of `U^{j,q}` for deployment `d`: contained in the true
/// region for `Under`, containing it for `Over`.
pub fn uncovered_region(
    d: &Deployment,
    j: usize,
    q: usize,
    sc: &Scenario,
    mode: Approx,
    cfg: &UncoveredConfig,
) -> Result<IndexedUnion> {
    check(sc, j, q, cfg)?;
    let placed = sc.placed(d)?;
    let grid = grid_for(sc, cfg)?;
    run(cfg.workers, || {
        let pairs = useful_pairs(&placed, q, sc, cfg.rho, mode)?;
        Ok(assemble(j, &placed, &pairs, sc, grid, mode))
    })?
}

/// Both approximations of `U^{j,q}` for every requested `(j, q)`, plus the
/// over-approximated pair regions of each requested quality.
pub fn uncovered(
    d: &Deployment,
    js: &[usize],
    qs: &[usize],
    sc: &Scenario,
    cfg: &UncoveredConfig,
) -> Result<UncoveredResult> {
    for &j in js {
        for &q in qs {
            check(sc, j, q, cfg)?;
        }
    }
    let placed = sc.placed(d)?;
    let grid = grid_for(sc, cfg)?;
    run(cfg.workers, || {
        let mut result = UncoveredResult::default();
        for &q in qs {
            let under_pairs = useful_pairs(&placed, q, sc, cfg.rho, Approx::Under)?;
            let over_pairs = useful_pairs(&placed, q, sc, cfg.rho, Approx::Over)?;
            for &j in js {
                result.entries.push(UncoveredEntry {
                    j,
                    q,
                    under: assemble(j, &placed, &under_pairs, sc, grid, Approx::Under),
                    over: assemble(j, &placed, &over_pairs, sc, grid, Approx::Over),
                });
            }
            result.pairs.extend(over_pairs);
        }
        Ok(result)
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_prefers_cubes() {
        let b = Aabb::new(Vec3::ZERO, Vec3::new(400.0, 400.0, 100.0));
        assert_eq!(cell_grid(&b, 128).unwrap(), [8, 8, 2]);
        assert_eq!(cell_grid(&b, 16).unwrap(), [4, 4, 1]);
        assert_eq!(cell_grid(&b, 1).unwrap(), [1, 1, 1]);
        assert!(cell_grid(&b, 0).is_err());
        assert_eq!(default_grid(&b), [20, 20, 5]);
    }

    #[test]
    fn cells_tile_the_box() {
        let b = Aabb::new(Vec3::new(-1.0, 0.0, 2.0), Vec3::new(2.0, 1.0, 3.0));
        let cs = cells(&b, [3, 2, 1]);
        assert_eq!(cs.len(), 6);
        let vol: f64 = cs.iter().map(|c| c.volume()).sum();
        assert!((vol - 3.0).abs() < 1e-12);
        assert_eq!(cs.last().unwrap().max, b.max);
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }
}
