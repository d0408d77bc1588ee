//! Neighbor queries over a growing set of centers.
//!
//! In the disc, points are bucketed by hyperbolic radius from the origin and
//! by angle; a query for `D(c, r)` visits only bins meeting
//! `[d(0,c) − r, d(0,c) + r]` and sectors meeting the angular shadow of the
//! Euclidean disc of `D(c, r)`. In ℂ² queries fall back to a linear scan.

use crate::scalar::Real;

use super::metric::{dist, EuclidDisc};
use super::BallPoint;

#[derive(Clone, Debug)]
struct Bin {
    sectors: usize,
    cells: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub(crate) struct CenterIndex<T> {
    points: Vec<BallPoint<T>>,
    bin_width: T,
    bins: Vec<Bin>,
    dim: usize,
}

const SLACK: f64 = 1e-9;

impl<T: Real> CenterIndex<T> {
    /// Buckets sized for queries of radius about `scale`.
    pub fn new(scale: T, dim: usize) -> Self {
        CenterIndex { points: Vec::new(), bin_width: scale, bins: Vec::new(), dim }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[BallPoint<T>] {
        &self.points
    }

    fn bin_of(&self, rho: T) -> usize {
        (rho / self.bin_width).floor().to_usize().unwrap_or(usize::MAX / 2)
    }

    fn sector_count(&self, bin: usize) -> usize {
        let outer = (T::nat(bin + 1) * self.bin_width).tanh();
        let circ = T::of(2.0) * T::PI() * outer / (T::one() - outer * outer).max(T::min_positive_value());
        (circ / self.bin_width).ceil().to_usize().unwrap_or(1 << 16).clamp(1, 1 << 16)
    }

    fn sector_of(sectors: usize, theta: T) -> usize {
        let two_pi = T::of(2.0) * T::PI();
        let mut u = theta / two_pi;
        u = u - u.floor();
        (u * T::nat(sectors)).floor().to_usize().unwrap_or(0).min(sectors - 1)
    }

    pub fn insert(&mut self, p: BallPoint<T>) -> usize {
        let id = self.points.len();
        self.points.push(p);
        if self.dim == 1 {
            let z = p.z1();
            let b = self.bin_of(z.norm().atanh());
            while self.bins.len() <= b {
                let s = self.sector_count(self.bins.len());
                self.bins.push(Bin { sectors: s, cells: vec![Vec::new(); s] });
            }
            let bin = &mut self.bins[b];
            let s = Self::sector_of(bin.sectors, z.arg());
            bin.cells[s].push(id as u32);
        }
        id
    }

    /// Calls `f(id, distance)` for every point within distance `r` of `c`, in no particular order.
    pub fn for_each_within(&self, c: &BallPoint<T>, r: T, mut f: impl FnMut(usize, T)) {
        if self.dim != 1 {
            for (i, p) in self.points.iter().enumerate() {
                let d = dist(c, p);
                if d <= r {
                    f(i, d);
                }
            }
            return;
        }
        let z = c.z1();
        let rho = z.norm().atanh();
        let slack = T::of(SLACK) * (T::one() + r);
        let lo = rho - r - slack;
        let lo_bin = if lo <= T::zero() { 0 } else { self.bin_of(lo) };
        let hi_bin = self.bin_of(rho + r + slack).min(self.bins.len().saturating_sub(1));
        if self.bins.is_empty() || lo_bin > hi_bin {
            return;
        }
        let disc = EuclidDisc::of(z, r);
        let cn = disc.center.norm();
        let half = if cn <= disc.radius * (T::one() + T::of(SLACK)) {
            None
        } else {
            Some((disc.radius / cn).min(T::one()).asin() * (T::one() + T::of(1e-7)) + T::of(1e-12))
        };
        let theta = if cn > T::zero() { disc.center.arg() } else { T::zero() };
        for b in lo_bin..=hi_bin {
            let bin = &self.bins[b];
            let visit = |s: usize, f: &mut dyn FnMut(usize, T)| {
                for &id in &bin.cells[s] {
                    let d = dist(c, &self.points[id as usize]);
                    if d <= r {
                        f(id as usize, d);
                    }
                }
            };
            match half {
                Some(h) if h < T::PI() => {
                    let width = T::of(2.0) * T::PI() / T::nat(bin.sectors);
                    let span = ((h + h) / width).ceil().to_usize().unwrap_or(bin.sectors) + 2;
                    if span >= bin.sectors {
                        (0..bin.sectors).for_each(|s| visit(s, &mut f));
                    } else {
                        let start = Self::sector_of(bin.sectors, theta - h);
                        (0..span).for_each(|k| visit((start + k) % bin.sectors, &mut f));
                    }
                }
                _ => (0..bin.sectors).for_each(|s| visit(s, &mut f)),
            }
        }
    }

    /// Nearest point within `r`; ties go to the lower id.
    pub fn nearest_within(&self, c: &BallPoint<T>, r: T) -> Option<(usize, T)> {
        let mut best: Option<(usize, T)> = None;
        self.for_each_within(c, r, |i, d| match best {
            Some((j, e)) if e < d || (e == d && j < i) => {}
            _ => best = Some((i, d)),
        });
        best
    }

    pub fn any_within(&self, c: &BallPoint<T>, r: T) -> bool {
        let mut hit = false;
        self.for_each_within(c, r, |_, _| hit = true);
        hit
    }

    /// True if some point is at distance strictly less than `r`.
    pub fn any_closer(&self, c: &BallPoint<T>, r: T) -> bool {
        let mut hit = false;
        self.for_each_within(c, r, |_, d| hit |= d < r);
        hit
    }

    pub fn count_within(&self, c: &BallPoint<T>, r: T) -> usize {
        let mut n = 0;
        self.for_each_within(c, r, |_, _| n += 1);
        n
    }

    /// Nearest point overall, widening the search radius as needed.
    pub fn nearest(&self, c: &BallPoint<T>) -> Option<(usize, T)> {
        if self.points.is_empty() {
            return None;
        }
        let mut r = self.bin_width;
        loop {
            if let Some(hit) = self.nearest_within(c, r) {
                return Some(hit);
            }
            r = r + r;
            if r > T::of(1e3) {
                let mut best = (0, dist(c, &self.points[0]));
                for (i, p) in self.points.iter().enumerate().skip(1) {
                    let d = dist(c, p);
                    if d < best.1 {
                        best = (i, d);
                    }
                }
                return Some(best);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C;
    use rand::{Rng, SeedableRng};

    #[test]
    fn index_agrees_with_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut idx = CenterIndex::new(0.3_f64, 1);
        let mut pts = Vec::new();
        for _ in 0..2000 {
            let r = rng.gen_range(0.0..0.999f64).sqrt();
            let p = BallPoint::raw1(C::from_polar(r, rng.gen_range(-3.2..3.2)));
            idx.insert(p);
            pts.push(p);
        }
        for _ in 0..300 {
            let r = rng.gen_range(0.0..0.999f64).sqrt();
            let q = BallPoint::raw1(C::from_polar(r, rng.gen_range(-3.2..3.2)));
            for rad in [0.05, 0.3, 1.0, 2.5] {
                let brute = pts.iter().filter(|p| dist(&q, p) <= rad).count();
                assert_eq!(idx.count_within(&q, rad), brute);
            }
            let brute = pts
                .iter()
                .enumerate()
                .map(|(i, p)| (i, dist(&q, p)))
                .fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            assert_eq!(idx.nearest(&q).unwrap().0, brute.0);
        }
    }
}
