//! Truncated δ-lattices and the joint coarse/fine construction.
//!
//! Centers come from a greedy pass over a deterministic candidate grid whose
//! rings are evenly spaced in hyperbolic radius. In the disc the remaining
//! holes are closed exactly: the points farthest from the center set are
//! Voronoi vertices or bisector crossings of the circle `|z| = R`, and any such
//! point farther than δ from every center is added until none remain.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::index::CenterIndex;
use super::metric::phi;
use super::BallPoint;

/// Relative tolerance for membership in the closed truncated ball.
const EDGE: f64 = 1e-12;

/// Measured lattice constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeStats<T> {
    /// Smallest pairwise distance, `None` for a single center.
    pub min_separation: Option<T>,
    /// Largest distance from a test node to its nearest center.
    pub covering_radius: T,
    /// Largest number of balls `D(a_k, 2δ)` containing a test node.
    pub overlap: usize,
    pub greedy_centers: usize,
    pub filled_holes: usize,
    pub test_nodes: usize,
}

#[derive(Clone, Debug)]
pub struct Lattice<T> {
    pub centers: Vec<BallPoint<T>>,
    pub delta: T,
    pub truncation_radius: T,
    pub dim: usize,
    pub stats: LatticeStats<T>,
    index: CenterIndex<T>,
}

/// Candidate or test grid: the origin plus rings evenly spaced in hyperbolic
/// radius up to exactly `radius`, each sampled at spacing about `h`.
pub fn ring_grid<T: Real>(radius: T, h: T, n: usize, phase: T) -> Vec<BallPoint<T>> {
    let two_pi = T::of(2.0) * T::PI();
    let rho_max = radius.atanh();
    let rings = (rho_max / h).ceil().to_usize().unwrap_or(1).max(1);
    let mut out = vec![BallPoint::origin(n)];
    for i in 1..=rings {
        let r = if i == rings { radius } else { (rho_max * T::nat(i) / T::nat(rings)).tanh() };
        let scale = r / (T::one() - r * r);
        let shift = phase + if i % 2 == 1 { T::of(0.5) } else { T::zero() };
        if n == 1 {
            let m = (two_pi * scale / h).ceil().to_usize().unwrap_or(3).max(3);
            let step = two_pi / T::nat(m);
            for j in 0..m {
                out.push(BallPoint::raw1(C::from_polar(r, step * (T::nat(j) + shift))));
            }
        } else {
            let step = h / scale;
            let half_pi = T::FRAC_PI_2();
            let nchi = (half_pi / step).ceil().to_usize().unwrap_or(1).max(1) + 1;
            for k in 0..nchi {
                let chi = half_pi * T::nat(k) / T::nat(nchi - 1);
                let (s, c) = chi.sin_cos();
                let n1 = (two_pi * c / step).ceil().to_usize().unwrap_or(1).max(1);
                let n2 = (two_pi * s / step).ceil().to_usize().unwrap_or(1).max(1);
                for j1 in 0..n1 {
                    let p1 = two_pi * (T::nat(j1) + shift) / T::nat(n1);
                    for j2 in 0..n2 {
                        let p2 = two_pi * (T::nat(j2) + phase) / T::nat(n2);
                        out.push(BallPoint::raw2(C::from_polar(r * c, p1), C::from_polar(r * s, p2)));
                    }
                }
            }
        }
    }
    out
}

fn validate<T: Real>(delta: T, radius: T, n: usize) -> Result<()> {
    if !(delta > T::zero()) {
        return Err(Error::domain(format!("separation must be positive, got {delta}")));
    }
    if !(radius > T::zero() && radius < T::one()) {
        return Err(Error::domain(format!("truncation radius must lie in (0, 1), got {radius}")));
    }
    if n != 1 && n != 2 {
        return Err(Error::domain(format!("dimension {n} not supported (n must be 1 or 2)")));
    }
    Ok(())
}

/// Greedy packing over `candidates`, in order.
fn greedy<T: Real>(index: &mut CenterIndex<T>, candidates: &[BallPoint<T>], delta: T) {
    for c in candidates {
        if !index.any_closer(c, delta) {
            index.insert(*c);
        }
    }
}

/// Hyperbolic circumcenter of three disc points, if their circumcircle lies in the disc.
fn circumcenter<T: Real>(a: &BallPoint<T>, b: &BallPoint<T>, c: &BallPoint<T>) -> Option<BallPoint<T>> {
    let (p, q) = (phi(a, b).z1(), phi(a, c).z1());
    let det = T::of(2.0) * (p.re * q.im - p.im * q.re);
    if det.abs() < T::epsilon() * T::of(16.0) * p.norm() * q.norm() {
        return None;
    }
    let (pp, qq) = (p.norm_sqr(), q.norm_sqr());
    let cen = C::new((pp * q.im - qq * p.im) / det, (qq * p.re - pp * q.re) / det);
    let s = T::of(2.0) * cen.norm();
    if !(s < T::one()) {
        return None;
    }
    let t = (T::one() - (T::one() - s * s).sqrt()) / s;
    let w0 = BallPoint::raw1(cen * (T::one() + t * t));
    Some(phi(a, &w0))
}

/// Angles where the bisector of `a`, `b` meets the circle `|z| = r`.
fn bisector_on_circle<T: Real>(a: C<T>, b: C<T>, r: T) -> Vec<T> {
    let (ua, ub) = (T::one() - a.norm_sqr(), T::one() - b.norm_sqr());
    let r2 = r * r;
    let two_r = r + r;
    let k0 = ub * (T::one() + r2 * a.norm_sqr()) - ua * (T::one() + r2 * b.norm_sqr());
    let kc = -two_r * (ub * a.re - ua * b.re);
    let ks = -two_r * (ub * a.im - ua * b.im);
    let amp = kc.hypot(ks);
    if amp == T::zero() || k0.abs() > amp {
        return Vec::new();
    }
    let base = ks.atan2(kc);
    let spread = (-k0 / amp).max(-T::one()).min(T::one()).acos();
    vec![base + spread, base - spread]
}

/// Adds every Voronoi vertex or boundary crossing farther than δ from all centers.
fn fill_holes_disc<T: Real>(index: &mut CenterIndex<T>, delta: T, radius: T) -> usize {
    let reach = delta * T::of(2.5);
    let mut active: Vec<usize> = (0..index.len()).collect();
    let mut added = 0;
    let inside = |v: &BallPoint<T>| v.norm() <= radius * (T::one() + T::of(EDGE));
    while !active.is_empty() {
        let mut fresh = Vec::new();
        for &ia in &active {
            let a = index.points()[ia];
            let mut nbrs = Vec::new();
            index.for_each_within(&a, reach, |j, _| {
                if j != ia {
                    nbrs.push(j)
                }
            });
            nbrs.sort_unstable();
            let mut probes = Vec::new();
            for (x, &ib) in nbrs.iter().enumerate() {
                for &ic in &nbrs[x + 1..] {
                    let (b, c) = (index.points()[ib], index.points()[ic]);
                    if let Some(v) = circumcenter(&a, &b, &c) {
                        probes.push(v);
                    }
                }
                for th in bisector_on_circle(a.z1(), index.points()[ib].z1(), radius) {
                    probes.push(BallPoint::raw1(C::from_polar(radius, th)));
                }
            }
            let back = if a.norm() > T::zero() { a.z1().arg() + T::PI() } else { T::zero() };
            probes.push(BallPoint::raw1(C::from_polar(radius, back)));
            for v in probes {
                if inside(&v) && !index.any_within(&v, delta) {
                    fresh.push(index.insert(v));
                    added += 1;
                }
            }
        }
        active = fresh;
    }
    added
}

/// Adds uncovered nodes of `grid` as new centers (used in ℂ², where no exact vertex search exists).
fn fill_holes_grid<T: Real>(index: &mut CenterIndex<T>, delta: T, grid: &[BallPoint<T>]) -> usize {
    let mut added = 0;
    for z in grid {
        if !index.any_within(z, delta) {
            index.insert(*z);
            added += 1;
        }
    }
    added
}

/// Covering radius and overlap over a test grid, failing at the first uncovered node.
fn certify<T: Real>(index: &CenterIndex<T>, delta: T, grid: &[BallPoint<T>]) -> Result<(T, usize)> {
    let tol = delta * (T::one() + T::of(1e-9));
    let worst = grid
        .par_iter()
        .map(|z| match index.nearest_within(z, tol) {
            Some((_, d)) => Ok((d, index.count_within(z, delta + delta))),
            None => {
                let d = index.nearest(z).map(|x| x.1).unwrap_or(T::infinity());
                let w = z.z1();
                Err(Error::Uncovered { re: w.re.f64(), im: w.im.f64(), distance: d.f64() })
            }
        })
        .collect::<Vec<_>>();
    let mut cover = T::zero();
    let mut overlap = 0;
    for r in worst {
        let (d, k) = r?;
        cover = cover.max(d);
        overlap = overlap.max(k);
    }
    Ok((cover, overlap))
}

fn min_separation<T: Real>(index: &CenterIndex<T>, reach: T) -> Option<T> {
    let pts = index.points();
    let best = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut m: Option<T> = None;
            index.for_each_within(&pts[i], reach, |j, d| {
                if j != i {
                    m = Some(m.map_or(d, |x: T| x.min(d)));
                }
            });
            m
        })
        .collect::<Vec<_>>();
    best.into_iter().flatten().fold(None, |acc: Option<T>, d| Some(acc.map_or(d, |x| x.min(d))))
}

impl<T: Real> Lattice<T> {
    /// δ-lattice of the truncated ball `{|z| ≤ truncation_radius}`.
    pub fn build(delta: T, truncation_radius: T, n: usize) -> Result<Self> {
        validate(delta, truncation_radius, n)?;
        let h = delta / T::of(8.0);
        let candidates = ring_grid(truncation_radius, h, n, T::zero());
        let mut index = CenterIndex::new(delta, n);
        greedy(&mut index, &candidates, delta);
        let greedy_centers = index.len();
        let filled = if n == 1 {
            fill_holes_disc(&mut index, delta, truncation_radius)
        } else {
            fill_holes_grid(&mut index, delta, &ring_grid(truncation_radius, delta / T::of(6.0), n, T::of(0.29)))
        };
        let test = ring_grid(truncation_radius, delta / T::of(6.0), n, T::of(0.37));
        let (covering_radius, overlap) = certify(&index, delta, &test)?;
        let stats = LatticeStats {
            min_separation: min_separation(&index, delta * T::of(3.0)),
            covering_radius,
            overlap,
            greedy_centers,
            filled_holes: filled,
            test_nodes: test.len(),
        };
        Ok(Lattice { centers: index.points().to_vec(), delta, truncation_radius, dim: n, stats, index })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Re-checks covering on a test grid of spacing `spacing`; returns the covering radius and overlap.
    pub fn verify_covering(&self, spacing: T, phase: T) -> Result<(T, usize)> {
        let grid = ring_grid(self.truncation_radius, spacing, self.dim, phase);
        certify(&self.index, self.delta, &grid)
    }

    /// Nearest center, ties to the lower index.
    pub fn nearest(&self, z: &BallPoint<T>) -> Option<(usize, T)> {
        self.index
            .nearest_within(z, self.delta * (T::one() + T::of(1e-6)))
            .or_else(|| self.index.nearest(z))
    }

    /// Cell of `z`: nearest center, or `None` outside the truncated ball.
    pub fn cell_of(&self, z: &BallPoint<T>) -> Option<usize> {
        if z.norm() > self.truncation_radius * (T::one() + T::of(EDGE)) {
            return None;
        }
        self.nearest(z).map(|x| x.0)
    }

    pub fn assign_cells(&self, nodes: &[BallPoint<T>]) -> Vec<Option<usize>> {
        nodes.par_iter().map(|z| self.cell_of(z)).collect()
    }

    /// Number of centers within distance `r` of `z`.
    pub fn count_within(&self, z: &BallPoint<T>, r: T) -> usize {
        self.index.count_within(z, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointStats<T> {
    /// Largest fine-group size.
    pub j_max: usize,
    pub fine_total: usize,
    /// Smallest distance between fine centers of the same group.
    pub min_separation_in_group: Option<T>,
    /// Smallest distance between fine centers of different groups.
    pub min_separation_across: Option<T>,
    /// Largest distance from a test node of the truncated ball to the nearest fine center.
    pub fine_covering_radius: T,
}

/// A coarse 1-lattice with an η-lattice refinement of each of its cells.
#[derive(Clone, Debug)]
pub struct JointLattice<T> {
    pub coarse: Lattice<T>,
    pub eta: T,
    pub groups: Vec<Vec<BallPoint<T>>>,
    pub stats: JointStats<T>,
    offsets: Vec<usize>,
    group_index: Vec<CenterIndex<T>>,
}

impl<T: Real> JointLattice<T> {
    pub fn build(eta: T, truncation_radius: T, n: usize) -> Result<Self> {
        validate(eta, truncation_radius, n)?;
        if eta > T::one() {
            return Err(Error::domain(format!("fine separation must lie in (0, 1], got {eta}")));
        }
        let coarse = Lattice::build(T::one(), truncation_radius, n)?;
        let mut group_index: Vec<CenterIndex<T>> = coarse
            .centers
            .iter()
            .map(|a| {
                let mut ix = CenterIndex::new(eta, n);
                ix.insert(*a);
                ix
            })
            .collect();
        let candidates = ring_grid(truncation_radius, eta / T::of(6.0), n, T::of(0.21));
        let owners = coarse.assign_cells(&candidates);
        for (c, k) in candidates.iter().zip(owners) {
            let k = k.expect("candidates lie in the truncated ball");
            if !group_index[k].any_closer(c, eta) {
                group_index[k].insert(*c);
            }
        }
        let groups: Vec<Vec<BallPoint<T>>> = group_index.iter().map(|ix| ix.points().to_vec()).collect();
        let mut offsets = Vec::with_capacity(groups.len() + 1);
        let mut acc = 0;
        for g in &groups {
            offsets.push(acc);
            acc += g.len();
        }
        offsets.push(acc);

        let mut all = CenterIndex::new(eta, n);
        let mut owner = Vec::with_capacity(acc);
        for (k, g) in groups.iter().enumerate() {
            for p in g {
                all.insert(*p);
                owner.push(k);
            }
        }
        let test = ring_grid(truncation_radius, eta / T::of(3.0), n, T::of(0.43));
        let reach = eta + eta;
        let mut fine_cover = T::zero();
        for z in &test {
            match all.nearest_within(z, reach * (T::one() + T::of(1e-9))) {
                Some((_, d)) => fine_cover = fine_cover.max(d),
                None => {
                    let d = all.nearest(z).map(|x| x.1).unwrap_or(T::infinity());
                    let w = z.z1();
                    return Err(Error::Uncovered { re: w.re.f64(), im: w.im.f64(), distance: d.f64() });
                }
            }
        }
        let mut within: Option<T> = None;
        let mut across: Option<T> = None;
        let pts = all.points();
        for i in 0..pts.len() {
            all.for_each_within(&pts[i], eta * T::of(3.0), |j, d| {
                if j <= i {
                    return;
                }
                let slot = if owner[i] == owner[j] { &mut within } else { &mut across };
                *slot = Some(slot.map_or(d, |x| x.min(d)));
            });
        }
        let stats = JointStats {
            j_max: groups.iter().map(Vec::len).max().unwrap_or(0),
            fine_total: acc,
            min_separation_in_group: within,
            min_separation_across: across,
            fine_covering_radius: fine_cover,
        };
        Ok(JointLattice { coarse, eta, groups, stats, offsets, group_index })
    }

    pub fn fine_len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// All fine centers in `(k, j)` order.
    pub fn fine_centers(&self) -> Vec<BallPoint<T>> {
        self.groups.iter().flatten().copied().collect()
    }

    /// `(k, j)` of a flat fine index.
    pub fn split_index(&self, flat: usize) -> (usize, usize) {
        let k = self.offsets.partition_point(|&o| o <= flat) - 1;
        (k, flat - self.offsets[k])
    }

    /// Flat fine cell of `z`: coarse cell first, then the nearest center of that group.
    pub fn fine_cell_of(&self, z: &BallPoint<T>) -> Option<usize> {
        let k = self.coarse.cell_of(z)?;
        let (j, _) = self.group_index[k].nearest(z)?;
        Some(self.offsets[k] + j)
    }

    pub fn assign_fine_cells(&self, nodes: &[BallPoint<T>]) -> Vec<Option<usize>> {
        nodes.par_iter().map(|z| self.fine_cell_of(z)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::dist;

    #[test]
    fn circumcenter_is_equidistant() {
        let pts = [C::new(0.6, 0.2), C::new(0.75, 0.1), C::new(0.65, -0.05)].map(BallPoint::raw1);
        let v = circumcenter(&pts[0], &pts[1], &pts[2]).unwrap();
        let d: Vec<f64> = pts.iter().map(|p| dist(&v, p)).collect();
        assert!((d[0] - d[1]).abs() < 1e-12 && (d[0] - d[2]).abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn bisector_points_are_equidistant() {
        let (a, b) = (C::new(0.5, 0.1), C::new(0.2, 0.7));
        let th = bisector_on_circle(a, b, 0.9);
        assert_eq!(th.len(), 2);
        for t in th {
            let z = BallPoint::raw1(C::from_polar(0.9, t));
            let (da, db): (f64, f64) = (dist(&z, &BallPoint::raw1(a)), dist(&z, &BallPoint::raw1(b)));
            assert!((da - db).abs() < 1e-12);
        }
    }

    #[test]
    fn small_lattice_invariants() {
        let lat = Lattice::<f64>::build(0.5, 0.9, 1).unwrap();
        assert!(lat.stats.min_separation.unwrap() >= 0.5);
        assert!(lat.stats.covering_radius <= 0.5 * (1.0 + 1e-9));
        let (cov, _) = lat.verify_covering(0.5 / 11.0, 0.77).unwrap();
        assert!(cov <= 0.5 * (1.0 + 1e-9));
    }

    #[test]
    fn single_center_when_delta_is_huge() {
        let lat = Lattice::<f64>::build(10.0, 0.9, 1).unwrap();
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.centers[0].norm(), 0.0);
        assert!(lat.stats.min_separation.is_none());
    }

    #[test]
    fn joint_lattice_degenerate_eta() {
        let j = JointLattice::<f64>::build(1.0, 0.9, 1).unwrap();
        assert!(j.groups.iter().all(|g| g.len() == 1));
        for (k, g) in j.groups.iter().enumerate() {
            assert_eq!(g[0], j.coarse.centers[k]);
        }
    }

    #[test]
    fn lattice_in_c2() {
        let lat = Lattice::<f64>::build(1.0, 0.7, 2).unwrap();
        assert!(lat.stats.min_separation.map_or(true, |d| d >= 1.0));
        assert!(lat.stats.covering_radius <= 1.0 + 1e-9);
    }
}
