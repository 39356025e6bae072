//! Piecewise polynomials in the Chebyshev basis: evaluation, calculus,
//! distances, sampling, and mixture flattening.
//!
//! A density piece on `[a, b)` with mapped coefficients `c` takes the value
//! `(2/(b-a)) * sum_i c_i T_i(phi(y))`, where `phi` is the affine map of the
//! interval onto `[-1, 1)`. The `2/(b-a)` factor makes the map preserve
//! masses; CDF-valued polynomials opt out of it via `mapped_scaling = false`.

use crate::cheb;
use crate::empirical::EmpiricalDistribution;
use crate::quadrature;
use crate::rng::SeedStream;
use crate::zoo::TargetDistribution;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A polynomial on one interval, stored as Chebyshev coefficients of the
/// mapped reference coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebPoly {
    pub interval: (f64, f64),
    pub coeffs: Vec<f64>,
    /// Whether the `2/(b-a)` density-scaling factor applies.
    pub mapped_scaling: bool,
}

impl ChebPoly {
    pub fn new(interval: (f64, f64), coeffs: Vec<f64>, mapped_scaling: bool) -> Self {
        assert!(
            interval.0 < interval.1,
            "interval [{}, {}) is empty",
            interval.0,
            interval.1
        );
        assert!(!coeffs.is_empty(), "coefficient vector must be nonempty");
        ChebPoly {
            interval,
            coeffs,
            mapped_scaling,
        }
    }

    /// Constant density piece with total mass `mass` over `interval`.
    pub fn constant_mass(interval: (f64, f64), mass: f64) -> Self {
        // value = (2/len) * c0, integral = 2 c0.
        ChebPoly::new(interval, vec![mass / 2.0], true)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn scale(&self) -> f64 {
        if self.mapped_scaling {
            2.0 / (self.interval.1 - self.interval.0)
        } else {
            1.0
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let x = cheb::domain_map(self.interval, y);
        self.scale() * cheb::cheb_eval(&self.coeffs, x)
    }

    /// Exact integral over `[a, b] ⊆ interval`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        let (lo, hi) = self.interval;
        let tol = 1e-9 * (hi - lo);
        if a < lo - tol || b > hi + tol || a > b + tol {
            return Err(Error::IntervalOutOfRange { a, b, lo, hi });
        }
        let anti = cheb::cheb_antiderivative(&self.coeffs);
        let xa = cheb::domain_map(self.interval, a.max(lo));
        let xb = cheb::domain_map(self.interval, b.min(hi));
        let raw = cheb::cheb_eval(&anti, xb) - cheb::cheb_eval(&anti, xa);
        // For density pieces the map Jacobian cancels the 2/(b-a) scaling.
        if self.mapped_scaling {
            Ok(raw)
        } else {
            Ok(raw * 0.5 * (hi - lo))
        }
    }

    pub fn mass(&self) -> f64 {
        self.integral(self.interval.0, self.interval.1)
            .expect("own interval")
    }

    /// Re-expands this piece on a subinterval `[a, b) ⊆ interval`, preserving
    /// pointwise values.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        let (lo, hi) = self.interval;
        let tol = 1e-9 * (hi - lo);
        if a < lo - tol || b > hi + tol || a >= b {
            return Err(Error::IntervalOutOfRange { a, b, lo, hi });
        }
        let n = self.coeffs.len();
        let half_len = 0.5 * (b - a);
        let coeffs = cheb::cheb_fit(n, |x| {
            let y = cheb::domain_unmap((a, b), x);
            self.eval(y.clamp(lo, hi)) * half_len
        });
        Ok(ChebPoly::new((a, b), coeffs, true))
    }
}

fn wire_error(msg: &str) -> Error {
    Error::InvalidParams(format!("piecewise polynomial wire format: {msg}"))
}

#[derive(Serialize, Deserialize)]
struct PieceWire {
    coeffs: Vec<f64>,
    mapped_scaling: bool,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseWire {
    breakpoints: Vec<f64>,
    pieces: Vec<PieceWire>,
    is_distribution: bool,
}

/// A piecewise polynomial over `[breakpoints[0], breakpoints[t])`, with piece
/// `j` living on `[breakpoints[j], breakpoints[j+1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<ChebPoly>,
    is_distribution: bool,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<ChebPoly>) -> Self {
        assert_eq!(breakpoints.len(), pieces.len() + 1);
        assert!(!pieces.is_empty());
        for w in breakpoints.windows(2) {
            assert!(w[0] < w[1], "breakpoints must be strictly increasing");
        }
        for (j, p) in pieces.iter().enumerate() {
            let want = (breakpoints[j], breakpoints[j + 1]);
            assert!(
                (p.interval.0 - want.0).abs() < 1e-12 * (1.0 + want.0.abs())
                    && (p.interval.1 - want.1).abs() < 1e-12 * (1.0 + want.1.abs()),
                "piece {j} interval {:?} does not match breakpoints {:?}",
                p.interval,
                want
            );
        }
        PiecewisePolynomial {
            breakpoints,
            pieces,
            is_distribution: false,
        }
    }

    pub fn uniform(interval: (f64, f64)) -> Self {
        let mut pp = PiecewisePolynomial::new(
            vec![interval.0, interval.1],
            vec![ChebPoly::constant_mass(interval, 1.0)],
        );
        pp.is_distribution = true;
        pp
    }

    /// The zero function on `interval`, as a single piece.
    pub fn zero(interval: (f64, f64)) -> Self {
        PiecewisePolynomial::new(
            vec![interval.0, interval.1],
            vec![ChebPoly::new(interval, vec![0.0], true)],
        )
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[ChebPoly] {
        &self.pieces
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn is_distribution(&self) -> bool {
        self.is_distribution
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        if x >= *self.breakpoints.last().unwrap() {
            return Some(self.pieces.len() - 1);
        }
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        Some(idx.saturating_sub(1).min(self.pieces.len() - 1))
    }

    /// Pointwise value; zero outside the domain.
    pub fn eval(&self, x: f64) -> f64 {
        match self.piece_index(x) {
            Some(j) => self.pieces[j].eval(x),
            None => 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.pieces.iter().map(|p| p.mass()).sum()
    }

    /// Mass of `[a, b)` intersected with the domain.
    pub fn mass_between(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.domain();
        let a = a.max(lo);
        let b = b.min(hi);
        if a >= b {
            return 0.0;
        }
        let mut total = 0.0;
        for (j, p) in self.pieces.iter().enumerate() {
            let pa = a.max(self.breakpoints[j]);
            let pb = b.min(self.breakpoints[j + 1]);
            if pa < pb {
                total += p.integral(pa, pb).expect("clipped to piece");
            }
        }
        total
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.mass_between(self.domain().0, x)
    }

    /// Divides all pieces by the total mass and validates the result.
    pub fn normalized(mut self) -> Result<Self> {
        let total = self.total_mass();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NotADistribution);
        }
        for p in &mut self.pieces {
            for c in &mut p.coeffs {
                *c /= total;
            }
        }
        self.into_distribution()
    }

    /// Flags the function as a distribution after checking total mass 1 and
    /// nonnegativity on a validation grid of `1000 * t` points.
    pub fn into_distribution(mut self) -> Result<Self> {
        let total = self.total_mass();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotADistribution);
        }
        let n = 1000 * self.pieces.len();
        let (lo, hi) = self.domain();
        for k in 0..n {
            let x = lo + (hi - lo) * (k as f64 + 0.5) / n as f64;
            if self.eval(x) < -1e-9 {
                return Err(Error::NotADistribution);
            }
        }
        self.is_distribution = true;
        Ok(self)
    }

    /// Inverse-CDF sampling: selects a piece proportionally to its mass, then
    /// bisects the piece CDF to relative tolerance `1e-12`.
    pub fn sample(&self, rng: &mut SeedStream) -> Result<f64> {
        if !self.is_distribution {
            return Err(Error::NotADistribution);
        }
        let masses: Vec<f64> = self.pieces.iter().map(|p| p.mass().max(0.0)).collect();
        let total: f64 = masses.iter().sum();
        let u = rng.next_f64() * total;
        let mut acc = 0.0;
        let mut j = masses.len() - 1;
        for (i, &m) in masses.iter().enumerate() {
            if u < acc + m {
                j = i;
                break;
            }
            acc += m;
        }
        let target = u - acc;
        let piece = &self.pieces[j];
        let (mut a, mut b) = piece.interval;
        let tol = 1e-12 * (b - a);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if piece.integral(piece.interval.0, mid).expect("within piece") < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    pub fn to_json(&self) -> String {
        let wire = PiecewiseWire {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceWire {
                    coeffs: p.coeffs.clone(),
                    mapped_scaling: p.mapped_scaling,
                })
                .collect(),
            is_distribution: self.is_distribution,
        };
        serde_json::to_string(&wire).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: PiecewiseWire = serde_json::from_str(s)?;
        if wire.breakpoints.len() != wire.pieces.len() + 1 || wire.pieces.is_empty() {
            return Err(wire_error("piece/breakpoint count mismatch"));
        }
        for w in wire.breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(wire_error("breakpoints not strictly increasing"));
            }
        }
        let pieces = wire
            .pieces
            .iter()
            .enumerate()
            .map(|(j, p)| {
                if p.coeffs.is_empty() {
                    return Err(wire_error("empty coefficient vector"));
                }
                Ok(ChebPoly::new(
                    (wire.breakpoints[j], wire.breakpoints[j + 1]),
                    p.coeffs.clone(),
                    p.mapped_scaling,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut pp = PiecewisePolynomial::new(wire.breakpoints, pieces);
        if wire.is_distribution {
            pp = pp.into_distribution()?;
        }
        Ok(pp)
    }

    /// Signed difference `self - other` over the common refinement.
    pub fn difference(&self, other: &PiecewisePolynomial) -> Result<PiecewisePolynomial> {
        check_same_domain(self, other)?;
        let cuts = merge_breakpoints(&self.breakpoints, &other.breakpoints);
        let mut pieces = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let deg = self.eval_degree(a, b).max(other.eval_degree(a, b));
            let half_len = 0.5 * (b - a);
            let coeffs = cheb::cheb_fit(deg + 1, |x| {
                let y = cheb::domain_unmap((a, b), x);
                (self.eval(y) - other.eval(y)) * half_len
            });
            pieces.push(ChebPoly::new((a, b), coeffs, true));
        }
        Ok(PiecewisePolynomial::new(cuts, pieces))
    }

    fn eval_degree(&self, a: f64, b: f64) -> usize {
        let mid = 0.5 * (a + b);
        self.piece_index(mid)
            .map(|j| self.pieces[j].degree())
            .unwrap_or(0)
    }

    /// Points in the open domain where the function changes sign, found by
    /// bracketed bisection on a Chebyshev-extrema grid per piece.
    pub fn sign_changes(&self) -> Vec<f64> {
        let mut roots = Vec::new();
        for p in &self.pieces {
            piece_sign_changes(p, &mut roots);
        }
        roots
    }
}

impl Serialize for PiecewisePolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = PiecewiseWire {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceWire {
                    coeffs: p.coeffs.clone(),
                    mapped_scaling: p.mapped_scaling,
                })
                .collect(),
            is_distribution: self.is_distribution,
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewisePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let wire = PiecewiseWire::deserialize(deserializer)?;
        let json = serde_json::to_string(&wire).map_err(serde::de::Error::custom)?;
        PiecewisePolynomial::from_json(&json).map_err(serde::de::Error::custom)
    }
}

fn check_same_domain(p: &PiecewisePolynomial, q: &PiecewisePolynomial) -> Result<()> {
    let (a, b) = p.domain();
    let (c, d) = q.domain();
    let tol = 1e-9 * (1.0 + b.abs().max(d.abs()));
    if (a - c).abs() > tol || (b - d).abs() > tol {
        return Err(Error::DomainMismatch(a, b, c, d));
    }
    Ok(())
}

fn merge_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup_by(|p, q| (*p - *q).abs() <= 1e-12 * (1.0 + q.abs()));
    cuts
}

fn piece_sign_changes(p: &ChebPoly, out: &mut Vec<f64>) {
    let grid = 64 * p.coeffs.len();
    let (a, b) = p.interval;
    let mut prev_x = a;
    let mut prev_v = p.eval(a);
    for k in 1..=grid {
        // Chebyshev extrema cluster near the endpoints where polynomials wiggle.
        let theta = std::f64::consts::PI * (1.0 - k as f64 / grid as f64);
        let x = cheb::domain_unmap((a, b), theta.cos());
        let v = p.eval(x);
        if prev_v == 0.0 {
            // Grid point exactly on a root: record and move on.
            if prev_x > a {
                out.push(prev_x);
            }
        } else if prev_v * v < 0.0 {
            let (mut lo, mut hi) = (prev_x, x);
            let (mut flo, _fhi) = (prev_v, v);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let fm = p.eval(mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
}

/// Total variation distance between two piecewise polynomial distributions,
/// computed exactly up to root isolation on the common refinement.
pub fn tv_distance_pp(p: &PiecewisePolynomial, q: &PiecewisePolynomial) -> Result<f64> {
    if !p.is_distribution || !q.is_distribution {
        return Err(Error::NotADistribution);
    }
    let diff = p.difference(q)?;
    let mut l1 = 0.0;
    for piece in &diff.pieces {
        let mut roots = Vec::new();
        piece_sign_changes(piece, &mut roots);
        let mut cuts = vec![piece.interval.0];
        cuts.extend(roots);
        cuts.push(piece.interval.1);
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                l1 += piece.integral(w[0], w[1])?.abs();
            }
        }
    }
    Ok(0.5 * l1)
}

/// Total variation distance between a piecewise polynomial distribution and a
/// synthetic target, by adaptive quadrature of `(1/2)∫|p - f|` plus half the
/// target's atom mass (the polynomial is atomless).
pub fn tv_distance_density(p: &PiecewisePolynomial, f: &TargetDistribution) -> Result<f64> {
    if !p.is_distribution {
        return Err(Error::NotADistribution);
    }
    let (plo, phi) = p.domain();
    let (flo, fhi) = f.domain();
    let lo = plo.min(flo);
    let hi = phi.max(fhi);
    let mut splits: Vec<f64> = p.breakpoints.clone();
    splits.extend(f.nonsmooth_points());
    splits.extend(f.atoms().iter().map(|a| a.0));
    splits.push(plo);
    splits.push(phi);
    splits.push(flo);
    splits.push(fhi);
    let integrand = |x: f64| (p.eval(x) - f.density(x)).abs();
    let l1 = quadrature::integrate(integrand, lo, hi, &splits, 1e-6, 1_000_000)?;
    let atom_mass: f64 = f.atoms().iter().map(|a| a.1).sum();
    Ok(0.5 * (l1 + atom_mass))
}

/// A signed measure assembled from a polynomial part, point atoms, and an
/// optional signed empirical part. Used by the distance routines.
#[derive(Clone, Debug)]
pub struct SignedMeasureDiff {
    pub poly_part: PiecewisePolynomial,
    pub atoms: Vec<(f64, f64)>,
    pub empirical_part: Option<(EmpiricalDistribution, f64)>,
}

impl SignedMeasureDiff {
    pub fn from_poly(poly_part: PiecewisePolynomial) -> Self {
        SignedMeasureDiff {
            poly_part,
            atoms: Vec::new(),
            empirical_part: None,
        }
    }

    pub fn with_atoms(mut self, mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in atoms.windows(2) {
            assert!(w[0].0 < w[1].0, "atom locations must be strictly increasing");
        }
        self.atoms = atoms;
        self
    }

    pub fn with_empirical(mut self, emp: EmpiricalDistribution, sign: f64) -> Self {
        self.empirical_part = Some((emp, sign));
        self
    }

    fn domain(&self) -> (f64, f64) {
        self.poly_part.domain()
    }

    fn cell_mass(&self, a: f64, b: f64) -> f64 {
        let mut m = self.poly_part.mass_between(a, b);
        for &(loc, mass) in &self.atoms {
            if loc >= a && loc < b {
                m += mass;
            }
        }
        if let Some((emp, sign)) = &self.empirical_part {
            m += sign * emp.interval_mass(a, b);
        }
        m
    }
}

/// Approximates `sup |mu(A)|` over unions of at most `k` intervals by a
/// dynamic program over a grid made of uniform points, atom locations,
/// empirical sample points, and polynomial sign changes. A lower bound on the
/// true supremum that converges as the grid refines.
pub fn ak_distance(mu: &SignedMeasureDiff, k: usize, grid_size: usize) -> f64 {
    assert!(k >= 1);
    assert!(grid_size >= 10 * k, "grid_size must be at least 10k");
    let (lo, hi) = mu.domain();
    let mut grid: Vec<f64> = (0..=grid_size)
        .map(|i| lo + (hi - lo) * i as f64 / grid_size as f64)
        .collect();
    grid.extend(mu.atoms.iter().map(|a| a.0));
    if let Some((emp, _)) = &mu.empirical_part {
        grid.extend(emp.samples().iter().copied());
    }
    grid.extend(mu.poly_part.sign_changes());
    grid.retain(|&x| (lo..=hi).contains(&x));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));

    let cells: Vec<f64> = grid
        .windows(2)
        .map(|w| mu.cell_mass(w[0], w[1]))
        .collect();
    best_k_segments(&cells, k).max(best_k_segments(
        &cells.iter().map(|v| -v).collect::<Vec<_>>(),
        k,
    ))
}

/// Maximum total of at most `k` disjoint contiguous runs of `cells`.
fn best_k_segments(cells: &[f64], k: usize) -> f64 {
    // open[j]: best with j segments, last one still extendable;
    // closed[j]: best with at most j segments, all closed.
    let mut open = vec![f64::NEG_INFINITY; k + 1];
    let mut closed = vec![f64::NEG_INFINITY; k + 1];
    closed[0] = 0.0;
    for &v in cells {
        for j in (1..=k).rev() {
            let start_here = closed[j - 1];
            let extend = open[j];
            open[j] = start_here.max(extend) + v;
            closed[j] = closed[j].max(open[j]);
        }
    }
    let best = closed.iter().cloned().fold(0.0_f64, f64::max);
    best.max(0.0)
}

/// Flattens a mixture of piecewise polynomial distributions into a single
/// piecewise polynomial over the common refinement of the parts.
pub fn mixture_flatten(components: &[(f64, PiecewisePolynomial)]) -> Result<PiecewisePolynomial> {
    if components.is_empty() {
        return Err(Error::WeightsInvalid("no components".into()));
    }
    let wsum: f64 = components.iter().map(|c| c.0).sum();
    if components.iter().any(|c| c.0 < 0.0) {
        return Err(Error::WeightsInvalid("negative weight".into()));
    }
    if (wsum - 1.0).abs() > 1e-9 {
        return Err(Error::WeightsInvalid(format!("weights sum to {wsum}")));
    }
    for (_, pp) in components.iter().skip(1) {
        check_same_domain(&components[0].1, pp)?;
    }
    let mut cuts = components[0].1.breakpoints.clone();
    for (_, pp) in components.iter().skip(1) {
        cuts = merge_breakpoints(&cuts, &pp.breakpoints);
    }
    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let deg = components
            .iter()
            .map(|(_, pp)| pp.eval_degree(a, b))
            .max()
            .unwrap();
        let half_len = 0.5 * (b - a);
        let coeffs = cheb::cheb_fit(deg + 1, |x| {
            let y = cheb::domain_unmap((a, b), x);
            let v: f64 = components.iter().map(|(wt, pp)| wt * pp.eval(y)).sum();
            v * half_len
        });
        pieces.push(ChebPoly::new((a, b), coeffs, true));
    }
    PiecewisePolynomial::new(cuts, pieces).into_distribution()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle() -> PiecewisePolynomial {
        // density (1 + x) / 2 on [-1, 1)
        let piece = ChebPoly::new((-1.0, 1.0), vec![0.5, 0.5], true);
        PiecewisePolynomial::new(vec![-1.0, 1.0], vec![piece])
            .into_distribution()
            .unwrap()
    }

    fn uniform_right_half() -> PiecewisePolynomial {
        // zero on [-1, 0), density 1 on [0, 1)
        let left = ChebPoly::new((-1.0, 0.0), vec![0.0], true);
        let right = ChebPoly::constant_mass((0.0, 1.0), 1.0);
        PiecewisePolynomial::new(vec![-1.0, 0.0, 1.0], vec![left, right])
            .into_distribution()
            .unwrap()
    }

    #[test]
    fn constant_piece_integral() {
        let p = ChebPoly::constant_mass((-1.0, 1.0), 1.0);
        assert!((p.integral(-1.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.eval(0.3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn t1_piece_integral() {
        // Unmapped coefficients [0, 1] on [-1, 1): value T_1(x) = x,
        // so the integral over [0, 1) is x^2/2 evaluated at 1, i.e. 1/2.
        let p = ChebPoly::new((-1.0, 1.0), vec![0.0, 1.0], false);
        assert!((p.integral(0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        // The triangle density (1+x)/2 over the left half has mass 1/4.
        let t = ChebPoly::new((-1.0, 1.0), vec![0.5, 0.5], true);
        assert!((t.integral(-1.0, 0.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn triangle_left_mass() {
        let t = triangle();
        assert!((t.mass_between(-1.0, 0.0) - 0.25).abs() < 1e-12);
        assert!((t.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_integral_is_error() {
        let p = ChebPoly::constant_mass((0.0, 1.0), 1.0);
        assert!(matches!(
            p.integral(-0.5, 0.5),
            Err(Error::IntervalOutOfRange { .. })
        ));
    }

    #[test]
    fn tv_identical_is_zero() {
        let u = PiecewisePolynomial::uniform((-1.0, 1.0));
        assert!(tv_distance_pp(&u, &u).unwrap() < 1e-12);
    }

    #[test]
    fn tv_uniform_vs_half() {
        let u = PiecewisePolynomial::uniform((-1.0, 1.0));
        let h = uniform_right_half();
        assert!((tv_distance_pp(&u, &h).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn tv_triangle_vs_uniform_closed_form() {
        // (1/2) ∫ |x| / 2 dx = 1/4 over [-1, 1)
        let u = PiecewisePolynomial::uniform((-1.0, 1.0));
        let t = triangle();
        assert!((tv_distance_pp(&u, &t).unwrap() - 0.25).abs() < 1e-8);
        assert!((tv_distance_pp(&t, &u).unwrap() - 0.25).abs() < 1e-8);
    }

    #[test]
    fn sampling_stays_in_domain_and_matches_mean() {
        let u = PiecewisePolynomial::uniform((-1.0, 1.0));
        let mut rng = SeedStream::new(11);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = u.sample(&mut rng).unwrap();
            assert!((-1.0..1.0).contains(&x));
            sum += x;
        }
        assert!((sum / n as f64).abs() < 0.02);

        let t = triangle();
        let mut sum = 0.0;
        for _ in 0..n {
            sum += t.sample(&mut rng).unwrap();
        }
        // E[X] = ∫ x (1+x)/2 dx = 1/3
        assert!((sum / n as f64 - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn sample_requires_distribution_flag() {
        let z = PiecewisePolynomial::zero((-1.0, 1.0));
        let mut rng = SeedStream::new(1);
        assert!(matches!(z.sample(&mut rng), Err(Error::NotADistribution)));
    }

    #[test]
    fn mixture_flatten_refinement_size_and_values() {
        let a = uniform_right_half(); // breakpoint {0}
        let left = ChebPoly::constant_mass((-1.0, 0.5), 0.6);
        let right = ChebPoly::constant_mass((0.5, 1.0), 0.4);
        let b = PiecewisePolynomial::new(vec![-1.0, 0.5, 1.0], vec![left, right])
            .into_distribution()
            .unwrap(); // breakpoint {0.5}
        let mix = mixture_flatten(&[(0.5, a.clone()), (0.5, b.clone())]).unwrap();
        assert!(mix.num_pieces() <= 4);
        for k in 0..1000 {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / 1000.0;
            let want = 0.5 * a.eval(x) + 0.5 * b.eval(x);
            assert!((mix.eval(x) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn mixture_flatten_single_component_identity() {
        let t = triangle();
        let mix = mixture_flatten(&[(1.0, t.clone())]).unwrap();
        assert!(tv_distance_pp(&mix, &t).unwrap() < 1e-10);
    }

    #[test]
    fn mixture_flatten_uniforms_is_uniform() {
        let u = PiecewisePolynomial::uniform((-1.0, 1.0));
        let mix = mixture_flatten(&[(0.5, u.clone()), (0.5, u.clone())]).unwrap();
        assert!(tv_distance_pp(&mix, &u).unwrap() < 1e-10);
    }

    #[test]
    fn mixture_flatten_rejects_bad_weights() {
        let u = PiecewisePolynomial::uniform((-1.0, 1.0));
        assert!(matches!(
            mixture_flatten(&[(0.7, u.clone()), (0.7, u.clone())]),
            Err(Error::WeightsInvalid(_))
        ));
    }

    #[test]
    fn ak_zero_measure() {
        let mu = SignedMeasureDiff::from_poly(PiecewisePolynomial::zero((-1.0, 1.0)));
        assert!(ak_distance(&mu, 3, 100).abs() < 1e-12);
    }

    #[test]
    fn ak_two_atoms_single_interval() {
        let mu = SignedMeasureDiff::from_poly(PiecewisePolynomial::zero((-1.0, 1.0)))
            .with_atoms(vec![(0.1, 0.3), (0.2, -0.3)]);
        assert!((ak_distance(&mu, 1, 100) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn ak_signed_density_best_interval() {
        // density x/2 on [-1, 1): best single interval is [0, 1) with mass 1/4.
        let piece = ChebPoly::new((-1.0, 1.0), vec![0.0, 0.5], true);
        let mu = SignedMeasureDiff::from_poly(PiecewisePolynomial::new(
            vec![-1.0, 1.0],
            vec![piece],
        ));
        let got = ak_distance(&mu, 1, 200);
        // Brute-force oracle over grid interval pairs.
        let grid: Vec<f64> = (0..=200).map(|i| -1.0 + 2.0 * i as f64 / 200.0).collect();
        let mut best = 0.0_f64;
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let m = (grid[j] * grid[j] - grid[i] * grid[i]) / 4.0;
                best = best.max(m.abs());
            }
        }
        assert!((got - best).abs() < 1e-10);
        assert!((got - 0.25).abs() < 1e-6);
    }

    #[test]
    fn ak_monotone_in_k_and_bounded() {
        // Difference of two distributions plus an atom pair: integrates to 0.05.
        let diff = triangle()
            .difference(&PiecewisePolynomial::uniform((-1.0, 1.0)))
            .unwrap();
        let mu = SignedMeasureDiff::from_poly(diff).with_atoms(vec![(0.33, 0.05)]);
        let mut prev = 0.0;
        for k in 1..=4 {
            let v = ak_distance(&mu, k, 200);
            assert!(v + 1e-12 >= prev, "not monotone at k = {k}");
            prev = v;
        }
        // Upper bound: half the L1 norm of the polynomial part plus atom mass.
        let mut l1 = 0.0;
        let mut cuts = vec![-1.0];
        cuts.extend(mu.poly_part.sign_changes());
        cuts.push(1.0);
        for w in cuts.windows(2) {
            l1 += mu.poly_part.mass_between(w[0], w[1]).abs();
        }
        assert!(prev <= 0.5 * l1 + 0.05 + 1e-9);
    }

    #[test]
    fn restrict_preserves_values() {
        let p = ChebPoly::new((-1.0, 1.0), vec![0.4, 0.3, -0.2, 0.1], true);
        let r = p.restrict(-0.25, 0.6).unwrap();
        let mut rng = SeedStream::new(5);
        for _ in 0..100 {
            let y = rng.next_in(-0.25, 0.6);
            assert!((p.eval(y) - r.eval(y)).abs() < 1e-10);
        }
    }

    #[test]
    fn integral_derivative_consistency() {
        let p = ChebPoly::new((-1.0, 1.0), vec![0.5, 0.1, 0.2, -0.05], true);
        let h = 1e-5;
        for k in 1..20 {
            let b = -1.0 + 2.0 * k as f64 / 20.0;
            let num =
                (p.integral(-1.0, b + h).unwrap() - p.integral(-1.0, b - h).unwrap()) / (2.0 * h);
            assert!((num - p.eval(b)).abs() < 1e-6);
        }
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let t = triangle();
        let s = t.to_json();
        assert!(s.starts_with("{\"breakpoints\""));
        let back = PiecewisePolynomial::from_json(&s).unwrap();
        assert_eq!(t, back);
    }
}
