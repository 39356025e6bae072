//! Sampling infrastructure: empirical distributions, approximately-equal-mass
//! partitioning, and heavy-atom detection.

use crate::rng::SeedStream;
use crate::{Error, Result};

/// Sample access to a distribution on a known interval. All randomness comes
/// from the explicit seed stream, so samplers are duplicable and pure.
pub trait Sampler: Sync {
    fn domain(&self) -> (f64, f64);
    fn draw(&self, rng: &mut SeedStream) -> Result<f64>;
}

/// Sorted samples with O(log m) interval-mass queries.
#[derive(Clone, Debug)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalDistribution { samples })
    }

    pub fn draw_from(sampler: &dyn Sampler, m: usize, rng: &mut SeedStream) -> Result<Self> {
        let mut samples = Vec::with_capacity(m);
        for _ in 0..m {
            samples.push(sampler.draw(rng)?);
        }
        EmpiricalDistribution::from_samples(samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Number of samples in `[a, b)`.
    pub fn count_between(&self, a: f64, b: f64) -> usize {
        let lo = self.samples.partition_point(|&x| x < a);
        let hi = self.samples.partition_point(|&x| x < b);
        hi - lo
    }

    /// Empirical mass of `[a, b)`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        self.count_between(a, b) as f64 / self.samples.len() as f64
    }

    /// Newline-delimited decimal export.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in &self.samples {
            s.push_str(&format!("{x}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let samples = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParams(format!("bad sample line `{l}`: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        EmpiricalDistribution::from_samples(samples)
    }
}

/// Ordered breakpoints of a partition of a domain into half-open intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalPartition {
    breakpoints: Vec<f64>,
}

impl IntervalPartition {
    pub fn new(breakpoints: Vec<f64>) -> Self {
        assert!(breakpoints.len() >= 2, "need at least one interval");
        for w in breakpoints.windows(2) {
            assert!(w[0] < w[1], "breakpoints must be strictly increasing");
        }
        IntervalPartition { breakpoints }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn interval(&self, j: usize) -> (f64, f64) {
        (self.breakpoints[j], self.breakpoints[j + 1])
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.breakpoints).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let breakpoints: Vec<f64> = serde_json::from_str(s)?;
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "partition breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(IntervalPartition { breakpoints })
    }
}

/// Partitions the sampler's domain into at most `ceil(1/kappa)` intervals of
/// approximately equal mass using order statistics of `O((1/kappa) log(1/kappa))`
/// samples. The guarantee (every interval mass within a constant factor of
/// `kappa`) requires the target to be `kappa/64`-well-behaved.
pub fn approximately_equal_partition(
    sampler: &dyn Sampler,
    kappa: f64,
    rng: &mut SeedStream,
) -> Result<IntervalPartition> {
    assert!(kappa > 0.0 && kappa < 1.0, "kappa must lie in (0, 1)");
    let n = (1.0 / kappa).ceil() as usize;
    let (lo, hi) = sampler.domain();
    if n <= 1 {
        return Ok(IntervalPartition::new(vec![lo, hi]));
    }
    let mut m = (8.0 * n as f64 * (200.0 * n as f64).ln()).ceil() as usize;
    m = m.div_ceil(n) * n; // multiple of n so order-statistic indices are whole
    let emp = EmpiricalDistribution::draw_from(sampler, m, rng)?;
    let sorted = emp.samples();
    let mut breakpoints = vec![lo];
    for j in 1..n {
        let cut = sorted[j * m / n - 1];
        if cut > *breakpoints.last().unwrap() && cut < hi {
            breakpoints.push(cut);
        }
    }
    // The region above the top order statistic merges into the last interval.
    breakpoints.push(hi);
    Ok(IntervalPartition::new(breakpoints))
}

/// Returns every point whose empirical frequency among
/// `ceil(64 ln(100/gamma) / gamma)` draws is at least `gamma`. Output size is
/// at most `1/gamma` by construction. Atom detection relies on exact equality
/// of repeated sample values.
pub fn find_heavy(sampler: &dyn Sampler, gamma: f64, rng: &mut SeedStream) -> Result<Vec<f64>> {
    assert!(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
    let m = (64.0 * (100.0 / gamma).ln() / gamma).ceil() as usize;
    let mut counts: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
    for _ in 0..m {
        let x = sampler.draw(rng)?;
        *counts.entry(x.to_bits()).or_insert(0) += 1;
    }
    let threshold = gamma * m as f64;
    let mut heavy: Vec<f64> = counts
        .into_iter()
        .filter(|&(_, c)| c as f64 >= threshold)
        .map(|(bits, _)| f64::from_bits(bits))
        .collect();
    heavy.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(heavy)
}

const MAX_REJECTIONS: usize = 10_000;

/// Draws from the base sampler conditioned on avoiding a finite excluded set,
/// by rejection. A draw attempt aborts after `10^4` consecutive rejections,
/// which signals that the excluded set carries almost all the mass.
pub struct ConditionalSampler<'a> {
    base: &'a dyn Sampler,
    excluded: Vec<u64>,
}

impl<'a> ConditionalSampler<'a> {
    pub fn new(base: &'a dyn Sampler, excluded: &[f64]) -> Self {
        let mut excluded: Vec<u64> = excluded.iter().map(|x| x.to_bits()).collect();
        excluded.sort_unstable();
        excluded.dedup();
        ConditionalSampler { base, excluded }
    }
}

impl Sampler for ConditionalSampler<'_> {
    fn domain(&self) -> (f64, f64) {
        self.base.domain()
    }

    fn draw(&self, rng: &mut SeedStream) -> Result<f64> {
        for _ in 0..MAX_REJECTIONS {
            let x = self.base.draw(rng)?;
            if self.excluded.binary_search(&x.to_bits()).is_err() {
                return Ok(x);
            }
        }
        Err(Error::ExcludedMassTooLarge(MAX_REJECTIONS))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_cdf;
    use crate::zoo::{make_target, TargetKind};

    #[test]
    fn empirical_masses_match_examples() {
        let e = EmpiricalDistribution::from_samples(vec![0.5]).unwrap();
        assert_eq!(e.interval_mass(0.0, 1.0), 1.0);

        let e = EmpiricalDistribution::from_samples(vec![-0.5, 0.5]).unwrap();
        assert_eq!(e.interval_mass(0.0, 1.0), 0.5);

        let e = EmpiricalDistribution::from_samples(vec![0.3, 0.3, 0.9, -0.1]).unwrap();
        assert_eq!(e.interval_mass(0.25, 0.35), 0.5);
    }

    #[test]
    fn empty_sample_is_error() {
        assert!(matches!(
            EmpiricalDistribution::from_samples(vec![]),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn interval_mass_agrees_with_naive_count() {
        let mut rng = SeedStream::new(99);
        let raw: Vec<f64> = (0..500).map(|_| rng.next_in(-1.0, 1.0)).collect();
        let emp = EmpiricalDistribution::from_samples(raw.clone()).unwrap();
        for _ in 0..200 {
            let a = rng.next_in(-1.2, 1.2);
            let b = rng.next_in(-1.2, 1.2);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let naive = raw.iter().filter(|&&x| x >= a && x < b).count();
            assert_eq!(emp.count_between(a, b), naive);
        }
    }

    #[test]
    fn text_round_trip() {
        let e = EmpiricalDistribution::from_samples(vec![0.25, -0.5, 0.125]).unwrap();
        let back = EmpiricalDistribution::from_text(&e.to_text()).unwrap();
        assert_eq!(e.samples(), back.samples());
    }

    #[test]
    fn partition_uniform_masses_in_range() {
        let target = make_target(TargetKind::Uniform).unwrap();
        for seed in 0..5 {
            let mut rng = SeedStream::new(seed);
            let part = approximately_equal_partition(&target, 0.25, &mut rng).unwrap();
            assert_eq!(part.num_intervals(), 4);
            for j in 0..part.num_intervals() {
                let (a, b) = part.interval(j);
                let mass = (b - a) / 2.0; // exact uniform CDF
                assert!(
                    (0.125..=0.75).contains(&mass),
                    "seed {seed} interval {j} mass {mass}"
                );
            }
        }
    }

    #[test]
    fn partition_degenerate_kappa() {
        let target = make_target(TargetKind::Uniform).unwrap();
        let mut rng = SeedStream::new(0);
        let part = approximately_equal_partition(&target, 0.999, &mut rng).unwrap();
        assert!(part.num_intervals() == 1 || part.num_intervals() == 2);
        assert_eq!(part.domain(), (-1.0, 1.0));
    }

    #[test]
    fn partition_truncated_normal_mass_bounds() {
        let target = make_target(TargetKind::TruncatedGaussian {
            mean: 0.0,
            std_dev: 1.0,
        })
        .unwrap();
        let z = normal_cdf(1.0) - normal_cdf(-1.0);
        let cdf = |x: f64| (normal_cdf(x) - normal_cdf(-1.0)) / z;
        let kappa = 0.1;
        let mut good_runs = 0;
        for seed in 0..20 {
            let mut rng = SeedStream::new(1000 + seed);
            let part = approximately_equal_partition(&target, kappa, &mut rng).unwrap();
            let ok = (0..part.num_intervals()).all(|j| {
                let (a, b) = part.interval(j);
                let mass = cdf(b) - cdf(a);
                (kappa / 2.0..=3.0 * kappa).contains(&mass)
            });
            if ok {
                good_runs += 1;
            }
        }
        assert!(good_runs >= 19, "only {good_runs}/20 runs in range");
    }

    #[test]
    fn partition_breakpoints_span_domain() {
        let target = make_target(TargetKind::Triangle).unwrap();
        let mut rng = SeedStream::new(5);
        let part = approximately_equal_partition(&target, 0.05, &mut rng).unwrap();
        let bps = part.breakpoints();
        assert_eq!(bps[0], -1.0);
        assert_eq!(*bps.last().unwrap(), 1.0);
        assert!(bps.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn find_heavy_on_atomless_target_is_empty() {
        let target = make_target(TargetKind::Uniform).unwrap();
        let mut rng = SeedStream::new(7);
        let heavy = find_heavy(&target, 0.1, &mut rng).unwrap();
        assert!(heavy.is_empty());
    }

    #[test]
    fn find_heavy_detects_half_mass_atom() {
        let base = make_target(TargetKind::Uniform).unwrap();
        let target = crate::zoo::atom_mixture(base, vec![(0.3, 0.5)]).unwrap();
        let mut detected = 0;
        for seed in 0..100 {
            let mut rng = SeedStream::new(seed);
            let heavy = find_heavy(&target, 0.1, &mut rng).unwrap();
            if heavy == vec![0.3] {
                detected += 1;
            }
        }
        assert!(detected >= 99, "detected {detected}/100");
    }

    #[test]
    fn find_heavy_pure_atom() {
        let base = make_target(TargetKind::Uniform).unwrap();
        let target = crate::zoo::atom_mixture(base, vec![(0.0, 1.0)]).unwrap();
        let mut rng = SeedStream::new(3);
        let heavy = find_heavy(&target, 0.5, &mut rng).unwrap();
        assert_eq!(heavy, vec![0.0]);
    }

    #[test]
    fn find_heavy_output_size_bound() {
        let base = make_target(TargetKind::Uniform).unwrap();
        let atoms: Vec<(f64, f64)> = (0..8).map(|i| (-0.8 + 0.2 * i as f64, 0.1)).collect();
        let target = crate::zoo::atom_mixture(base, atoms).unwrap();
        for seed in 0..10 {
            let mut rng = SeedStream::new(seed);
            let gamma = 0.05;
            let heavy = find_heavy(&target, gamma, &mut rng).unwrap();
            assert!(heavy.len() <= (1.0 / gamma) as usize);
        }
    }

    #[test]
    fn find_heavy_two_sided_guarantee() {
        let base = make_target(TargetKind::Uniform).unwrap();
        let gamma = 0.1;
        // Atom at 2*gamma must be detected in at least 199/200 seeded runs.
        let strong = crate::zoo::atom_mixture(base, vec![(0.4, 2.0 * gamma)]).unwrap();
        let mut hits = 0;
        for seed in 0..200 {
            let mut rng = SeedStream::new(40_000 + seed);
            if find_heavy(&strong, gamma, &mut rng).unwrap().contains(&0.4) {
                hits += 1;
            }
        }
        assert!(hits >= 198, "detection rate {hits}/200");

        // Atom below gamma/2 must almost never be included.
        let base = make_target(TargetKind::Uniform).unwrap();
        let weak = crate::zoo::atom_mixture(base, vec![(0.4, gamma / 2.5)]).unwrap();
        let mut false_hits = 0;
        for seed in 0..200 {
            let mut rng = SeedStream::new(80_000 + seed);
            if find_heavy(&weak, gamma, &mut rng).unwrap().contains(&0.4) {
                false_hits += 1;
            }
        }
        assert!(false_hits <= 2, "false inclusion rate {false_hits}/200");
    }

    #[test]
    fn conditional_sampler_passthrough_and_exclusion() {
        let base = make_target(TargetKind::Uniform).unwrap();
        let target = crate::zoo::atom_mixture(base, vec![(0.3, 0.5)]).unwrap();
        let cond = ConditionalSampler::new(&target, &[0.3]);
        let mut rng = SeedStream::new(2);
        for _ in 0..2_000 {
            assert_ne!(cond.draw(&mut rng).unwrap(), 0.3);
        }

        let plain = make_target(TargetKind::Uniform).unwrap();
        let empty = ConditionalSampler::new(&plain, &[]);
        let mut a = SeedStream::new(9);
        let mut b = SeedStream::new(9);
        for _ in 0..100 {
            assert_eq!(empty.draw(&mut a).unwrap(), plain.draw(&mut b).unwrap());
        }
    }

    #[test]
    fn conditional_sampler_detects_degenerate_target() {
        let base = make_target(TargetKind::Uniform).unwrap();
        let target = crate::zoo::atom_mixture(base, vec![(0.0, 1.0)]).unwrap();
        let cond = ConditionalSampler::new(&target, &[0.0]);
        let mut rng = SeedStream::new(4);
        assert!(matches!(
            cond.draw(&mut rng),
            Err(Error::ExcludedMassTooLarge(_))
        ));
    }
}
