//! The learning algorithms: LP-based single-polynomial fitting, DP-based
//! piecewise fitting, and the wrapper that removes the well-behavedness
//! requirement by excising heavy atoms.

use crate::cheb;
use crate::empirical::{
    approximately_equal_partition, find_heavy, ConditionalSampler, EmpiricalDistribution,
    IntervalPartition, Sampler,
};
use crate::lp::{self, Bounds, LinearProgram, LpStatus, Relation};
use crate::poly::{ChebPoly, PiecewisePolynomial};
use crate::rng::SeedStream;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const RNG_TAG_PARTITION: u64 = 1;
const RNG_TAG_SAMPLES: u64 = 2;
const RNG_TAG_HEAVY: u64 = 3;

/// Learner configuration. `t`, `d`, `epsilon` drive the derived sample and
/// grid sizes; the caps keep desk-scale LPs small.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LearnConfig {
    pub t: usize,
    pub d: usize,
    pub epsilon: f64,
    /// Overrides the main sample draw (used by scaling sweeps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_override: Option<usize>,
    /// Cap on the CDF-bounds grid.
    #[serde(default = "default_cdf_grid_cap")]
    pub cdf_grid_cap: usize,
    /// Cap on the density-nonnegativity grid.
    #[serde(default = "default_deriv_grid_cap")]
    pub deriv_grid_cap: usize,
    /// Above this per-block cell count the pair family is thinned to dyadic
    /// distances plus all prefix/suffix pairs.
    #[serde(default = "default_thinning_threshold")]
    pub thinning_threshold: usize,
    /// Re-solve each block LP on every DP consultation instead of memoizing
    /// (diagnostics; outputs must not change).
    #[serde(default)]
    pub disable_memo: bool,
}

fn default_cdf_grid_cap() -> usize {
    2000
}

fn default_deriv_grid_cap() -> usize {
    5000
}

fn default_thinning_threshold() -> usize {
    300
}

impl LearnConfig {
    pub fn new(t: usize, d: usize, epsilon: f64) -> Self {
        assert!(t >= 1);
        assert!(
            epsilon > 0.0 && epsilon < 0.5,
            "epsilon must lie in (0, 0.5)"
        );
        LearnConfig {
            t,
            d,
            epsilon,
            sample_override: None,
            cdf_grid_cap: default_cdf_grid_cap(),
            deriv_grid_cap: default_deriv_grid_cap(),
            thinning_threshold: default_thinning_threshold(),
            disable_memo: false,
        }
    }

    /// Fine-partition cell count: `ceil(4 t (d+1) / eps)` rounded up to a
    /// multiple of `d+1`.
    pub fn fine_cells(&self) -> usize {
        let raw = (4.0 * self.t as f64 * (self.d as f64 + 1.0) / self.epsilon).ceil() as usize;
        raw.div_ceil(self.d + 1) * (self.d + 1)
    }

    /// Main sample budget `ceil(32 t (d+1) ln(4 t (d+1) / eps) / eps^2)`.
    pub fn sample_budget(&self) -> usize {
        if let Some(m) = self.sample_override {
            return m;
        }
        let td = self.t as f64 * (self.d as f64 + 1.0);
        (32.0 * td * (4.0 * td / self.epsilon).ln() / (self.epsilon * self.epsilon)).ceil()
            as usize
    }

    /// Heavy-atom threshold for the full (non-well-behaved) pipeline.
    pub fn heavy_gamma(&self) -> f64 {
        self.epsilon / (8.0 * self.t as f64 * (self.d as f64 + 1.0))
    }
}

/// Output of the single-polynomial LP fit on one interval.
#[derive(Clone, Debug)]
pub struct SinglePolyFit {
    /// LP objective; a lower-bound proxy for the distance to the best
    /// degree-`d` subdistribution on the interval.
    pub tau: f64,
    /// Post-processed subdistribution of degree `d`.
    pub q: ChebPoly,
    /// The raw quasi-distribution `F'` before post-processing.
    pub f_raw: ChebPoly,
}

/// Grid caps and row-family knobs for the block LP.
#[derive(Clone, Debug)]
pub struct LpGrids {
    pub cdf_grid_cap: usize,
    pub deriv_grid_cap: usize,
    pub thinning_threshold: usize,
}

impl Default for LpGrids {
    fn default() -> Self {
        LpGrids {
            cdf_grid_cap: default_cdf_grid_cap(),
            deriv_grid_cap: default_deriv_grid_cap(),
            thinning_threshold: default_thinning_threshold(),
        }
    }
}

impl LpGrids {
    fn from_config(cfg: &LearnConfig) -> Self {
        LpGrids {
            cdf_grid_cap: cfg.cdf_grid_cap,
            deriv_grid_cap: cfg.deriv_grid_cap,
            thinning_threshold: cfg.thinning_threshold,
        }
    }
}

/// Builds and solves the Chebyshev-CDF linear program on the block covered by
/// `partition`, then post-processes `q = eps * f(I)/|I| + (1 - eps) * f`.
///
/// The LP has variables `c_0..c_{d+1}` (CDF coefficients), `w_0..w_{z-1}`,
/// `y_0..y_{z-1}`, and `tau`, minimizing `tau` under: endpoint values of the
/// CDF; the pair inequalities
/// `|phat([i_j, i_k)) + sum_{j<=l<k} w_l - (F(i_k) - F(i_j))| <= sqrt(eps (k-j)) eta`;
/// `sum w = 0`, `-y <= w <= y`, `sum y <= 2 tau (1+eps)`; coefficient bounds
/// `|c_i| <= sqrt(2)(1+eps)`; `0 <= F <= 1` on a grid; and `F' >= 0` on a grid.
pub fn find_single_polynomial(
    d: usize,
    epsilon: f64,
    eta: f64,
    partition: &IntervalPartition,
    phat: &EmpiricalDistribution,
    opts: &LpGrids,
) -> Result<SinglePolyFit> {
    let z = partition.num_intervals();
    let lhs = (epsilon * z as f64).sqrt() * eta;
    if lhs > epsilon / 2.0 + 1e-12 {
        return Err(Error::PreconditionViolated {
            lhs,
            rhs: epsilon / 2.0,
        });
    }
    let interval = partition.domain();
    let m_total = phat.len() as f64;
    // Exact prefix masses of the block cells.
    let mut prefix = Vec::with_capacity(z + 1);
    prefix.push(0.0);
    let mut count = 0usize;
    for j in 0..z {
        let (a, b) = partition.interval(j);
        count += phat.count_between(a, b);
        prefix.push(count as f64 / m_total);
    }
    let block_mass = prefix[z];

    let builder = BlockLp::new(d, epsilon, eta, partition, &prefix, opts);
    let solution = builder.solve()?;

    let coeff_bound = std::f64::consts::SQRT_2 * (1.0 + epsilon);
    let c: Vec<f64> = solution.x[..d + 2]
        .iter()
        .map(|v| v.clamp(-coeff_bound, coeff_bound))
        .collect();
    let tau = solution.x[builder.tau_col()].max(0.0);

    let f_phi = cheb::cheb_derivative(&c);
    let mut q_phi: Vec<f64> = f_phi.iter().map(|v| (1.0 - epsilon) * v).collect();
    // eps * f(I)/|I| in mapped coordinates is the constant eps * f(I) / 2.
    q_phi[0] += epsilon * block_mass / 2.0;
    Ok(SinglePolyFit {
        tau,
        q: ChebPoly::new(interval, q_phi, true),
        f_raw: ChebPoly::new(interval, f_phi, true),
    })
}

/// Assembles the block LP and solves it by deterministic row generation over
/// the pair family: the working program starts with the structural rows plus
/// adjacent, dyadic-stride, prefix, and suffix pairs; after each solve every
/// family pair is checked and the most violated ones are added, until the
/// full family holds. The returned solution is then optimal for the complete
/// program (the working program only relaxes it).
struct BlockLp<'a> {
    d: usize,
    epsilon: f64,
    eta: f64,
    z: usize,
    tvals: Vec<Vec<f64>>,
    prefix: &'a [f64],
    pairs: Vec<(usize, usize)>,
    opts: &'a LpGrids,
}

impl<'a> BlockLp<'a> {
    fn new(
        d: usize,
        epsilon: f64,
        eta: f64,
        partition: &IntervalPartition,
        prefix: &'a [f64],
        opts: &'a LpGrids,
    ) -> Self {
        let z = partition.num_intervals();
        let interval = partition.domain();
        let mut mapped: Vec<f64> = partition
            .breakpoints()
            .iter()
            .map(|&b| cheb::domain_map(interval, b))
            .collect();
        mapped[0] = -1.0;
        mapped[z] = 1.0;
        let tvals: Vec<Vec<f64>> = mapped
            .iter()
            .map(|&x| cheb::cheb_values(d + 1, x))
            .collect();
        let pairs = pair_family(z, opts.thinning_threshold);
        BlockLp {
            d,
            epsilon,
            eta,
            z,
            tvals,
            prefix,
            pairs,
            opts,
        }
    }

    fn num_vars(&self) -> usize {
        self.d + 2 + 2 * self.z + 1
    }

    fn w_col(&self, l: usize) -> usize {
        self.d + 2 + l
    }

    fn y_col(&self, l: usize) -> usize {
        self.d + 2 + self.z + l
    }

    fn tau_col(&self) -> usize {
        self.d + 2 + 2 * self.z
    }

    fn pair_bound(&self, j: usize, k: usize) -> f64 {
        (self.epsilon * (k - j) as f64).sqrt() * self.eta
    }

    /// Adds the two inequality rows of pair `(j, k)`.
    fn push_pair(&self, lp: &mut LinearProgram, j: usize, k: usize) {
        let n = self.num_vars();
        let bound = self.pair_bound(j, k);
        let gap = self.prefix[k] - self.prefix[j];
        let mut row = vec![0.0; n];
        for i in 0..=self.d + 1 {
            row[i] = -(self.tvals[k][i] - self.tvals[j][i]);
        }
        for l in j..k {
            row[self.w_col(l)] = 1.0;
        }
        let neg: Vec<f64> = row.iter().map(|v| -v).collect();
        lp.add(row, Relation::Le, bound - gap);
        lp.add(neg, Relation::Le, bound + gap);
    }

    fn base_program(&self) -> LinearProgram {
        let n = self.num_vars();
        let d = self.d;
        let z = self.z;
        let mut lp = LinearProgram::new({
            let mut c = vec![0.0; n];
            c[self.tau_col()] = 1.0;
            c
        });
        let coeff_bound = std::f64::consts::SQRT_2 * (1.0 + self.epsilon);
        for i in 0..=d + 1 {
            lp.bounds[i] = Bounds::range(-coeff_bound, coeff_bound);
        }
        for l in 0..z {
            lp.bounds[self.w_col(l)] = Bounds::free();
            lp.bounds[self.y_col(l)] = Bounds::nonneg();
        }
        lp.bounds[self.tau_col()] = Bounds::nonneg();

        // (a) endpoint values of the CDF.
        let mut row = vec![0.0; n];
        for i in 0..=d + 1 {
            row[i] = self.tvals[0][i];
        }
        lp.add(row, Relation::Eq, 0.0);
        let mut row = vec![0.0; n];
        for i in 0..=d + 1 {
            row[i] = self.tvals[self.z][i];
        }
        lp.add(row, Relation::Eq, self.prefix[self.z]);

        // (c) robustness block.
        let mut row = vec![0.0; n];
        for l in 0..z {
            row[self.w_col(l)] = 1.0;
        }
        lp.add(row, Relation::Eq, 0.0);
        for l in 0..z {
            let mut row = vec![0.0; n];
            row[self.w_col(l)] = 1.0;
            row[self.y_col(l)] = -1.0;
            lp.add(row, Relation::Le, 0.0);
            let mut row = vec![0.0; n];
            row[self.w_col(l)] = -1.0;
            row[self.y_col(l)] = -1.0;
            lp.add(row, Relation::Le, 0.0);
        }
        let mut row = vec![0.0; n];
        for l in 0..z {
            row[self.y_col(l)] = 1.0;
        }
        row[self.tau_col()] = -2.0 * (1.0 + self.epsilon);
        lp.add(row, Relation::Le, 0.0);

        // (e) CDF range on the grid J (endpoints included).
        let jn = (10 * (d + 1) * (d + 1)).min(self.opts.cdf_grid_cap).max(2);
        for g in 0..=jn {
            let x = -1.0 + 2.0 * g as f64 / jn as f64;
            let tv = cheb::cheb_values(d + 1, x);
            let mut row = vec![0.0; n];
            for i in 0..=d + 1 {
                row[i] = tv[i];
            }
            let neg: Vec<f64> = row.iter().map(|v| -v).collect();
            lp.add(row, Relation::Le, 1.0);
            lp.add(neg, Relation::Le, 0.0);
        }

        // (f) density nonnegativity on the grid K (right endpoint included).
        let kn = ((10.0 * ((d + 1) * (d + 1)) as f64 / self.epsilon).ceil() as usize)
            .min(self.opts.deriv_grid_cap)
            .max(2);
        for g in 0..=kn {
            let x = -1.0 + 2.0 * g as f64 / kn as f64;
            let dv = cheb::cheb_deriv_values(d + 1, x);
            let mut row = vec![0.0; n];
            for i in 0..=d + 1 {
                row[i] = -dv[i];
            }
            lp.add(row, Relation::Le, 0.0);
        }
        lp
    }

    fn initial_pairs(&self) -> Vec<(usize, usize)> {
        let z = self.z;
        let mut set = std::collections::BTreeSet::new();
        for j in 0..z {
            set.insert((j, j + 1));
        }
        for k in 1..=z {
            set.insert((0, k));
            set.insert((k - 1, z));
        }
        let mut dist = 2;
        while dist < z {
            let mut j = 0;
            while j + dist <= z {
                set.insert((j, j + dist));
                j += (dist / 2).max(1);
            }
            dist *= 2;
        }
        set.retain(|p| self.pairs.binary_search(p).is_ok());
        set.into_iter().collect()
    }

    fn solve(&self) -> Result<lp::LpSolution> {
        let mut program = self.base_program();
        let mut active: std::collections::BTreeSet<(usize, usize)> =
            self.initial_pairs().into_iter().collect();
        for &(j, k) in &active {
            self.push_pair(&mut program, j, k);
        }
        let max_rounds = 60;
        for _round in 0..max_rounds {
            let max_iters = program.default_max_iters().max(20_000);
            let sol = lp::solve(&program, max_iters);
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible | LpStatus::Unbounded => return Err(Error::LpInfeasible),
                LpStatus::IterationLimit => return Err(Error::LpIterationLimit),
            }
            // Verify the whole pair family against this solution.
            let mut w_prefix = vec![0.0; self.z + 1];
            for l in 0..self.z {
                w_prefix[l + 1] = w_prefix[l] + sol.x[self.w_col(l)];
            }
            let f_at: Vec<f64> = (0..=self.z)
                .map(|j| {
                    (0..=self.d + 1)
                        .map(|i| sol.x[i] * self.tvals[j][i])
                        .sum::<f64>()
                })
                .collect();
            let mut violated: Vec<(f64, usize, usize)> = Vec::new();
            for &(j, k) in &self.pairs {
                if active.contains(&(j, k)) {
                    continue;
                }
                let gap = self.prefix[k] - self.prefix[j];
                let wsum = w_prefix[k] - w_prefix[j];
                let df = f_at[k] - f_at[j];
                let v = (gap + wsum - df).abs() - self.pair_bound(j, k);
                if v > 1e-9 {
                    violated.push((v, j, k));
                }
            }
            if violated.is_empty() {
                return Ok(sol);
            }
            violated.sort_by(|a, b| {
                b.0.partial_cmp(&a.0)
                    .unwrap()
                    .then(a.1.cmp(&b.1))
                    .then(a.2.cmp(&b.2))
            });
            for &(_, j, k) in violated.iter().take(256) {
                active.insert((j, k));
                self.push_pair(&mut program, j, k);
            }
        }
        Err(Error::LpIterationLimit)
    }
}

/// The pair family over `z` cells: full `0 <= j < k <= z` up to the thinning
/// threshold; above it, dyadic distances plus all prefix and suffix pairs,
/// preserving the telescoping structure.
fn pair_family(z: usize, threshold: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if z <= threshold {
        for j in 0..z {
            for k in j + 1..=z {
                pairs.push((j, k));
            }
        }
    } else {
        let mut set = std::collections::BTreeSet::new();
        let mut dist = 1;
        while dist <= z {
            for j in 0..=z.saturating_sub(dist) {
                set.insert((j, j + dist));
            }
            dist *= 2;
        }
        for k in 1..=z {
            set.insert((0, k));
            set.insert((k - 1, z));
        }
        pairs.extend(set);
    }
    pairs.sort_unstable();
    pairs
}

// ---------------------------------------------------------------------------
// Dynamic program over super-interval blocks.
// ---------------------------------------------------------------------------

/// DP cost table with backpointers. Entry `(i, j)` is the least total block
/// cost when `[i'_0, i'_j)` is covered by exactly `i` blocks.
#[derive(Clone, Debug)]
pub struct DpTable {
    pub t_table: Vec<Vec<f64>>,
    pub backpointers: Vec<Vec<Option<usize>>>,
}

impl DpTable {
    pub fn num_segments(&self) -> usize {
        self.t_table[0].len() - 1
    }

    /// `(piece count, total cost)` minimizing the final column; smaller piece
    /// counts win ties.
    pub fn best(&self) -> Option<(usize, f64)> {
        let s = self.num_segments();
        let mut best: Option<(usize, f64)> = None;
        for i in 1..self.t_table.len() {
            let v = self.t_table[i][s];
            if v.is_finite() && best.is_none_or(|(_, cur)| v < cur) {
                best = Some((i, v));
            }
        }
        best
    }

    /// Cut positions `0 = j_0 < ... < j_i = s` of the best `i`-block path.
    pub fn path(&self, pieces: usize) -> Vec<usize> {
        let mut cuts = vec![self.num_segments()];
        let mut i = pieces;
        let mut j = self.num_segments();
        while i > 0 {
            let l = self.backpointers[i][j].expect("finite entries have backpointers");
            cuts.push(l);
            j = l;
            i -= 1;
        }
        cuts.reverse();
        cuts
    }
}

/// Fills the DP table over `s` segments with at most `max_pieces` blocks.
/// `tau(l, j)` is the block cost on `[i'_l, i'_j)`. Ties keep the smaller
/// `l`, making reconstruction deterministic.
pub fn dp_fill(tau: &mut dyn FnMut(usize, usize) -> f64, s: usize, max_pieces: usize) -> DpTable {
    let mut t_table = vec![vec![f64::INFINITY; s + 1]; max_pieces + 1];
    let mut backpointers = vec![vec![None; s + 1]; max_pieces + 1];
    t_table[0][0] = 0.0;
    for i in 1..=max_pieces {
        for j in 1..=s {
            for l in 0..j {
                let base = t_table[i - 1][l];
                if !base.is_finite() {
                    continue;
                }
                let cand = base + tau(l, j);
                if cand < t_table[i][j] {
                    t_table[i][j] = cand;
                    backpointers[i][j] = Some(l);
                }
            }
        }
    }
    DpTable {
        t_table,
        backpointers,
    }
}

const ORACLE_LIMIT: usize = 14;

/// Exhaustive-enumeration reference for the DP: minimum total cost over all
/// partitions of `{0..s}` into at most `max_pieces` contiguous blocks.
/// `block_taus[l][j]` is the cost of the block `[l, j)`.
pub fn dp_bruteforce_oracle(block_taus: &[Vec<f64>], max_pieces: usize) -> Result<f64> {
    let s = block_taus.len();
    if s > ORACLE_LIMIT {
        return Err(Error::TooLargeForOracle(s, ORACLE_LIMIT));
    }
    fn rec(taus: &[Vec<f64>], from: usize, pieces_left: usize, acc: f64, best: &mut f64) {
        let s = taus.len();
        if from == s {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        if pieces_left == 0 {
            return;
        }
        for to in from + 1..=s {
            rec(taus, to, pieces_left - 1, acc + taus[from][to], best);
        }
    }
    let mut best = f64::INFINITY;
    rec(block_taus, 0, max_pieces, 0.0, &mut best);
    Ok(best)
}

// ---------------------------------------------------------------------------
// Learners.
// ---------------------------------------------------------------------------

/// Diagnostics from a learning run, for run reports.
#[derive(Clone, Debug, Serialize)]
pub struct LearnStats {
    pub m: usize,
    pub z: usize,
    pub s: usize,
    pub blocks_solved: usize,
    pub blocks_failed: usize,
    pub tau_total: f64,
    pub pieces: usize,
}

#[derive(Clone, Debug)]
pub struct LearnOutcome {
    pub hypothesis: PiecewisePolynomial,
    pub stats: LearnStats,
}

/// Learns a single degree-`d` polynomial density from a well-behaved target:
/// equal-mass partition at parameter `eps/(d+1)`, one LP fit over the whole
/// domain, renormalized. The piecewise learner with `t = 1`.
pub fn learn_wb_single_poly(
    sampler: &dyn Sampler,
    d: usize,
    epsilon: f64,
    rng: &mut SeedStream,
) -> Result<PiecewisePolynomial> {
    let cfg = LearnConfig::new(1, d, epsilon);
    Ok(learn_wb_piecewise_poly_with(sampler, &cfg, rng)?.hypothesis)
}

pub fn learn_wb_piecewise_poly(
    sampler: &dyn Sampler,
    t: usize,
    d: usize,
    epsilon: f64,
    rng: &mut SeedStream,
) -> Result<PiecewisePolynomial> {
    let cfg = LearnConfig::new(t, d, epsilon);
    Ok(learn_wb_piecewise_poly_with(sampler, &cfg, rng)?.hypothesis)
}

type BlockResult = std::result::Result<SinglePolyFit, BlockFailure>;

/// The well-behaved piecewise learner: equal-mass partition into `z` fine
/// cells, coarsening into `s = z/(d+1)` super-intervals, one sample draw,
/// an LP fit for every candidate block `[i'_l, i'_j)` (memoized and solved
/// concurrently), a DP over the block costs, and renormalization of the
/// concatenated block subdistributions to total mass 1.
pub fn learn_wb_piecewise_poly_with(
    sampler: &dyn Sampler,
    cfg: &LearnConfig,
    rng: &mut SeedStream,
) -> Result<LearnOutcome> {
    let z_target = cfg.fine_cells();
    let mut partition_rng = rng.derive(RNG_TAG_PARTITION);
    let partition =
        approximately_equal_partition(sampler, 1.0 / z_target as f64, &mut partition_rng)?;
    let fine = partition.breakpoints().to_vec();
    let z = partition.num_intervals();

    // Coarsen: every d+1 consecutive fine cells form a super-interval; a
    // short remainder merges into the last one.
    let step = cfg.d + 1;
    let mut coarse_idx: Vec<usize> = (0..=z / step).map(|j| j * step).collect();
    if *coarse_idx.last().unwrap() != z {
        *coarse_idx.last_mut().unwrap() = z;
    }
    if coarse_idx.len() < 2 {
        coarse_idx = vec![0, z];
    }
    let s = coarse_idx.len() - 1;

    let m = cfg.sample_budget();
    let mut sample_rng = rng.derive(RNG_TAG_SAMPLES);
    let phat = EmpiricalDistribution::draw_from(sampler, m, &mut sample_rng)?;

    let grids = LpGrids::from_config(cfg);
    let max_pieces = 2 * cfg.t - 1;

    // Candidate blocks the DP can consult; with one piece, only prefix blocks
    // are reachable.
    let mut needed: Vec<(usize, usize)> = Vec::new();
    for l in 0..s {
        if l > 0 && max_pieces == 1 {
            break;
        }
        for j in l + 1..=s {
            needed.push((l, j));
        }
    }

    let solve_block = |l: usize, j: usize| -> Result<SinglePolyFit> {
        let a = coarse_idx[l];
        let b = coarse_idx[j];
        let block = IntervalPartition::new(fine[a..=b].to_vec());
        let r = b - a;
        let block_mass = phat.interval_mass(fine[a], fine[b]);
        let eta = block_mass / r as f64;
        find_single_polynomial(cfg.d, cfg.epsilon, eta, &block, &phat, &grids)
    };

    let memo: Vec<Option<BlockResult>> = if cfg.disable_memo {
        vec![None; (s + 1) * (s + 1)]
    } else {
        let mut slots = vec![None; (s + 1) * (s + 1)];
        let solved: Vec<((usize, usize), BlockResult)> = needed
            .par_iter()
            .map(|&(l, j)| ((l, j), run_block(&solve_block, l, j)))
            .collect();
        for ((l, j), fit) in solved {
            slots[l * (s + 1) + j] = Some(fit);
        }
        slots
    };
    let fetch = |l: usize, j: usize| -> BlockResult {
        match &memo[l * (s + 1) + j] {
            Some(res) => res.clone(),
            None => run_block(&solve_block, l, j),
        }
    };

    let mut blocks_failed = 0usize;
    let mut tau_of = |l: usize, j: usize| -> f64 {
        match fetch(l, j) {
            Ok(f) => f.tau,
            Err(BlockFailure::Skippable) => {
                blocks_failed += 1;
                f64::INFINITY
            }
        }
    };
    let table = dp_fill(&mut tau_of, s, max_pieces);
    let Some((pieces, tau_total)) = table.best() else {
        return Err(Error::LpInfeasible);
    };
    let cuts = table.path(pieces);

    let mut breakpoints = Vec::with_capacity(cuts.len());
    let mut hyp_pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (l, j) = (w[0], w[1]);
        let fit = fetch(l, j).map_err(|_| Error::LpInfeasible)?;
        breakpoints.push(fine[coarse_idx[l]]);
        hyp_pieces.push(fit.q);
    }
    breakpoints.push(fine[coarse_idx[*cuts.last().unwrap()]]);
    let hypothesis = PiecewisePolynomial::new(breakpoints, hyp_pieces).normalized()?;

    Ok(LearnOutcome {
        stats: LearnStats {
            m,
            z,
            s,
            blocks_solved: needed.len(),
            blocks_failed,
            tau_total,
            pieces: hypothesis.num_pieces(),
        },
        hypothesis,
    })
}

#[derive(Clone, Copy, Debug)]
enum BlockFailure {
    /// Infeasible or iteration-limited block LPs cost infinity instead of
    /// aborting the run.
    Skippable,
}

fn run_block(
    solve_block: &(dyn Fn(usize, usize) -> Result<SinglePolyFit> + Sync),
    l: usize,
    j: usize,
) -> BlockResult {
    match solve_block(l, j) {
        Ok(fit) => Ok(fit),
        Err(Error::LpInfeasible) | Err(Error::LpIterationLimit) => Err(BlockFailure::Skippable),
        Err(e) => panic!("block LP construction failed: {e}"),
    }
}

/// The full pipeline for arbitrary targets: remove `gamma`-heavy atoms with
/// `gamma = eps / (8 t (d+1))`, then learn the conditional distribution.
/// The hypothesis assigns no mass to the removed points.
pub fn learn_piecewise_poly(
    sampler: &dyn Sampler,
    t: usize,
    d: usize,
    epsilon: f64,
    rng: &mut SeedStream,
) -> Result<PiecewisePolynomial> {
    let cfg = LearnConfig::new(t, d, epsilon);
    Ok(learn_piecewise_poly_with(sampler, &cfg, rng)?.hypothesis)
}

pub fn learn_piecewise_poly_with(
    sampler: &dyn Sampler,
    cfg: &LearnConfig,
    rng: &mut SeedStream,
) -> Result<LearnOutcome> {
    let mut heavy_rng = rng.derive(RNG_TAG_HEAVY);
    let heavy = find_heavy(sampler, cfg.heavy_gamma(), &mut heavy_rng)?;
    let conditional = ConditionalSampler::new(sampler, &heavy);
    learn_wb_piecewise_poly_with(&conditional, cfg, rng).map_err(|e| match e {
        Error::ExcludedMassTooLarge(n) => {
            Error::TargetDegenerate(format!("excluded set keeps rejecting ({n} draws)"))
        }
        other => other,
    })
}

/// Learns a `k`-mixture of `t`-piecewise degree-`d` distributions by learning
/// a single `(k t)`-piecewise distribution; the hypothesis has at most
/// `2 k t - 1` pieces.
pub fn learn_mixture(
    sampler: &dyn Sampler,
    k: usize,
    t: usize,
    d: usize,
    epsilon: f64,
    rng: &mut SeedStream,
) -> Result<PiecewisePolynomial> {
    assert!(k * t >= 1);
    learn_piecewise_poly(sampler, k * t, d, epsilon, rng)
}
