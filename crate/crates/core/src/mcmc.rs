//! Seeded Markov-chain sampling of constrained finite-volume Gibbs measures.
//!
//! Two update schemes share one state representation:
//!
//! * sequential-scan single-spin Metropolis with cached local fields, and
//! * a Swendsen-Wang cluster update for long-range couplings. Bonds are
//!   proposed with a cumulative-coupling jump search, and the site-dependent
//!   fields are bonds to a ghost spin that never flips.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`. Independent
//! chains use distinct ChaCha stream ids of the same seed.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{BoundObservable, Observable};
use crate::lattice::{ConstrainedModel, FrozenConstraint, ModelParams};
use crate::math::{exp, ln, pairwise_sum, sqrt};
use crate::{Error, Result};

/// Identifier of the random number generator, recorded in every output.
pub const RNG_ALGORITHM: &str = "chacha8-stream/rand_chacha-0.9";

/// Local fields are recomputed from scratch this often (in sweeps) to stop
/// rounding drift from incremental updates.
const LOCAL_FIELD_REFRESH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Metropolis,
    Cluster,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Metropolis => "metropolis",
            Algorithm::Cluster => "cluster",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "metropolis" => Some(Algorithm::Metropolis),
            "cluster" => Some(Algorithm::Cluster),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainConfig {
    pub sweeps: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub measure_every: u64,
}

impl ChainConfig {
    pub fn new(sweeps: u64, burn_in: u64, seed: u64, algorithm: Algorithm, measure_every: u64) -> Result<Self> {
        let c = Self { sweeps, burn_in, seed, algorithm, measure_every };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidChain("sweeps must be positive"));
        }
        if self.measure_every == 0 {
            return Err(Error::InvalidChain("measure_every must be positive"));
        }
        if self.burn_in >= self.sweeps {
            return Err(Error::InvalidChain("burn_in must be smaller than sweeps"));
        }
        if self.n_samples() < 2 {
            return Err(Error::InvalidChain("fewer than two measurements after burn-in"));
        }
        Ok(())
    }

    /// `floor((sweeps - burn_in) / measure_every)`.
    pub fn n_samples(&self) -> u64 {
        (self.sweeps - self.burn_in) / self.measure_every
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_algorithm(self, algorithm: Algorithm) -> Self {
        Self { algorithm, ..self }
    }
}

/// A mean with a batch-means standard error.
///
/// `n_samples == 0` marks a value computed exactly rather than sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// Integrated autocorrelation time estimate (0.5 for independent samples).
    pub autocorr_hint: f64,
}

/// Smallest number of batches used for batch-means errors.
pub const MIN_BATCHES: usize = 20;

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { mean: value, std_error: 0.0, n_samples: 0, autocorr_hint: 0.0 }
    }

    pub fn is_exact(&self) -> bool {
        self.n_samples == 0
    }

    /// Batch means with `max(20, floor(sqrt(n)))` batches (or one sample per
    /// batch when `n < 20`).
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n >= 2, "need at least two samples");
        let mean = pairwise_sum(samples) / n as f64;
        let batches = if n < MIN_BATCHES { n } else { (crate::math::floor(sqrt(n as f64)) as usize).max(MIN_BATCHES) };
        let size = n / batches;
        let means: Vec<f64> = samples.chunks_exact(size).take(batches).map(|c| pairwise_sum(c) / size as f64).collect();
        let bm = pairwise_sum(&means) / batches as f64;
        let var_bm = means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (batches - 1) as f64;
        let var_x = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let autocorr_hint = if var_x > 0.0 { 0.5 * size as f64 * var_bm / var_x } else { 0.0 };
        Self { mean, std_error: sqrt(var_bm / batches as f64), n_samples: n as u64, autocorr_hint }
    }

    /// `self - other` for independent estimates.
    pub fn minus(&self, other: &Estimate) -> Estimate {
        Estimate {
            mean: self.mean - other.mean,
            std_error: sqrt(self.std_error * self.std_error + other.std_error * other.std_error),
            n_samples: self.n_samples.min(other.n_samples),
            autocorr_hint: self.autocorr_hint.max(other.autocorr_hint),
        }
    }

    /// Combined standard error of `self` and `other`.
    pub fn combined_error(&self, other: &Estimate) -> f64 {
        self.minus(other).std_error
    }
}

/// Generator for chain number `stream` of a run seeded with `seed`.
pub fn chain_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Metropolis acceptance `min(1, exp(-beta dE))`.
#[inline]
pub fn acceptance_probability(delta_e: f64, beta: f64) -> f64 {
    if delta_e <= 0.0 {
        1.0
    } else {
        exp(-beta * delta_e)
    }
}

/// One Markov chain state plus its update rule.
pub trait Sampler {
    fn sweep<R: Rng>(&mut self, rng: &mut R);
    fn spins(&self) -> &[i8];
}

/// Lowest-energy state among all-plus, all-minus and the sign of each
/// site's field (ties go to the earlier candidate). Starting near the
/// dominant phase matters: with strong competing fields a chain started in
/// the wrong phase stays there for any practical run length.
fn initial_spins(model: &ConstrainedModel) -> Vec<i8> {
    let n = model.len();
    let candidates = [
        alloc::vec![1i8; n],
        alloc::vec![-1i8; n],
        model.fields().iter().map(|&h| if h < 0.0 { -1 } else { 1 }).collect(),
    ];
    let mut best = 0;
    let mut best_energy = f64::INFINITY;
    for (k, c) in candidates.iter().enumerate() {
        let e = model.energy(c);
        if e < best_energy {
            best = k;
            best_energy = e;
        }
    }
    let [plus, minus, signs] = candidates;
    match best {
        0 => plus,
        1 => minus,
        _ => signs,
    }
}

/// Sequential-scan single-spin-flip Metropolis.
pub struct Metropolis<'m> {
    model: &'m ConstrainedModel,
    spins: Vec<i8>,
    local: Vec<f64>,
    sweeps_done: u64,
}

impl<'m> Metropolis<'m> {
    pub fn new(model: &'m ConstrainedModel) -> Self {
        Self::with_spins(model, initial_spins(model))
    }

    pub fn with_spins(model: &'m ConstrainedModel, spins: Vec<i8>) -> Self {
        let mut m = Self { model, spins, local: alloc::vec![0.0; model.len()], sweeps_done: 0 };
        m.refresh();
        m
    }

    fn refresh(&mut self) {
        let n = self.model.len();
        for a in 0..n {
            let mut acc = 0.0;
            for b in 0..n {
                if b != a {
                    acc += self.model.coupling(a, b) * self.spins[b] as f64;
                }
            }
            self.local[a] = acc;
        }
    }
}

impl Sampler for Metropolis<'_> {
    fn sweep<R: Rng>(&mut self, rng: &mut R) {
        let beta = self.model.beta();
        let fields = self.model.fields();
        let n = self.model.len();
        for a in 0..n {
            let s = self.spins[a] as f64;
            let de = 2.0 * s * (self.local[a] + fields[a]);
            let accept = de <= 0.0 || rng.random::<f64>() < acceptance_probability(de, beta);
            if accept {
                self.spins[a] = -self.spins[a];
                let ds = -2.0 * s;
                for b in 0..n {
                    if b != a {
                        self.local[b] += ds * self.model.coupling(a, b);
                    }
                }
            }
        }
        self.sweeps_done += 1;
        if self.sweeps_done.is_multiple_of(LOCAL_FIELD_REFRESH) {
            self.refresh();
        }
    }

    fn spins(&self) -> &[i8] {
        &self.spins
    }
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: alloc::vec![1; n] }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.iter_mut().for_each(|s| *s = 1);
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
    }
}

/// Swendsen-Wang updates with a ghost spin carrying the effective fields.
///
/// Bond `(a, b)` is active with probability `1 - exp(-2 beta J_ab)` when the
/// spins agree; site `a` bonds to the ghost with probability
/// `1 - exp(-2 beta |h_a|)` when it is aligned with its field. Clusters that
/// contain the ghost are kept, every other cluster flips with probability 1/2.
pub struct ClusterSampler<'m> {
    model: &'m ConstrainedModel,
    spins: Vec<i8>,
    /// Row `a` holds `sum_{c=a+1}^{b} J_ac` for `b = a+1 .. n-1`.
    cumulative: Vec<f64>,
    row_start: Vec<usize>,
    ghost_prob: Vec<f64>,
    uf: UnionFind,
    decision: Vec<i8>,
    last_clusters: usize,
}

impl<'m> ClusterSampler<'m> {
    pub fn new(model: &'m ConstrainedModel) -> Result<Self> {
        Self::with_spins(model, initial_spins(model))
    }

    pub fn with_spins(model: &'m ConstrainedModel, spins: Vec<i8>) -> Result<Self> {
        let n = model.len();
        let beta = model.beta();
        let ghost_prob: Vec<f64> = model.fields().iter().map(|&h| -libm::expm1(-2.0 * beta * h.abs())).collect();
        // exp(-2 beta |h|) == 0 exactly for every site: ghost bonds are certain everywhere.
        if n > 0 && model.fields().iter().all(|&h| exp(-2.0 * beta * h.abs()) == 0.0) {
            return Err(Error::GhostFrozen);
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cumulative = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for a in 0..n {
            row_start.push(cumulative.len());
            let mut acc = 0.0;
            for b in a + 1..n {
                acc += model.coupling(a, b);
                cumulative.push(acc);
            }
        }
        row_start.push(cumulative.len());
        Ok(Self {
            model,
            spins,
            cumulative,
            row_start,
            ghost_prob,
            uf: UnionFind::new(n + 1),
            decision: alloc::vec![0; n + 1],
            last_clusters: 0,
        })
    }

    /// Number of flippable clusters built by the most recent sweep.
    pub fn last_cluster_count(&self) -> usize {
        self.last_clusters
    }
}

impl Sampler for ClusterSampler<'_> {
    fn sweep<R: Rng>(&mut self, rng: &mut R) {
        let n = self.model.len();
        let ghost = n;
        let beta = self.model.beta();
        let fields = self.model.fields();
        self.uf.reset();

        for a in 0..n {
            let aligned = fields[a] * self.spins[a] as f64 > 0.0;
            if aligned && rng.random::<f64>() < self.ghost_prob[a] {
                self.uf.union(a, ghost);
            }
        }

        if beta > 0.0 {
            let scale = 1.0 / (2.0 * beta);
            for a in 0..n {
                let row = &self.cumulative[self.row_start[a]..self.row_start[a + 1]];
                let mut pos = 0usize;
                let mut reached = 0.0;
                loop {
                    // Bonds in (current, b] are all inactive with probability
                    // exp(-2 beta (S(b) - S(current))).
                    let u = 1.0 - rng.random::<f64>();
                    let threshold = reached - ln(u) * scale;
                    let k = pos + row[pos..].partition_point(|&s| s <= threshold);
                    if k >= row.len() {
                        break;
                    }
                    let b = a + 1 + k;
                    if self.spins[a] == self.spins[b] {
                        self.uf.union(a, b);
                    }
                    reached = row[k];
                    pos = k + 1;
                }
            }
        }

        let ghost_root = self.uf.find(ghost);
        self.decision.iter_mut().for_each(|d| *d = 0);
        let mut clusters = 0;
        for a in 0..n {
            let r = self.uf.find(a);
            if r == ghost_root {
                continue;
            }
            if self.decision[r] == 0 {
                clusters += 1;
                self.decision[r] = if rng.random::<bool>() { 1 } else { -1 };
            }
            if self.decision[r] == 1 {
                self.spins[a] = -self.spins[a];
            }
        }
        self.last_clusters = clusters;
    }

    fn spins(&self) -> &[i8] {
        &self.spins
    }
}

fn collect<S: Sampler, R: Rng>(sampler: &mut S, rng: &mut R, f: &BoundObservable, chain: &ChainConfig) -> Estimate {
    let mut samples = Vec::with_capacity(chain.n_samples() as usize);
    for _ in 0..chain.burn_in {
        sampler.sweep(rng);
    }
    for t in 1..=chain.sweeps - chain.burn_in {
        sampler.sweep(rng);
        if t % chain.measure_every == 0 {
            samples.push(f.eval(sampler.spins()));
        }
    }
    Estimate::from_samples(&samples)
}

/// Run one chain on a prepared model using stream `stream` of `chain.seed`.
pub fn run_model(
    model: &ConstrainedModel,
    observable: &Observable,
    chain: &ChainConfig,
    stream: u64,
) -> Result<Estimate> {
    chain.validate()?;
    let f = observable.bind(model)?;
    let mut rng = chain_rng(chain.seed, stream);
    Ok(match chain.algorithm {
        Algorithm::Metropolis => collect(&mut Metropolis::new(model), &mut rng, &f, chain),
        Algorithm::Cluster => collect(&mut ClusterSampler::new(model)?, &mut rng, &f, chain),
    })
}

/// Metropolis estimate of `observable` under the constrained measure.
pub fn metropolis_run(
    params: &ModelParams,
    constraint: &FrozenConstraint,
    observable: &Observable,
    chain: &ChainConfig,
    cutoff: u64,
) -> Result<Estimate> {
    let model = ConstrainedModel::new(params, constraint, cutoff)?;
    run_model(&model, observable, &chain.with_algorithm(Algorithm::Metropolis), 0)
}

/// Cluster-algorithm estimate of `observable` under the constrained measure.
pub fn cluster_run(
    params: &ModelParams,
    constraint: &FrozenConstraint,
    observable: &Observable,
    chain: &ChainConfig,
    cutoff: u64,
) -> Result<Estimate> {
    let model = ConstrainedModel::new(params, constraint, cutoff)?;
    run_model(&model, observable, &chain.with_algorithm(Algorithm::Cluster), 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub a: Estimate,
    pub b: Estimate,
    /// `a - b` with combined error.
    pub gap: Estimate,
}

/// Independent chains (streams 0 and 1 of the seed) under two constraints on
/// the same free sites.
pub fn two_run_gap(
    params: &ModelParams,
    constraint_a: &FrozenConstraint,
    constraint_b: &FrozenConstraint,
    observable: &Observable,
    chain: &ChainConfig,
    cutoff: u64,
) -> Result<GapEstimate> {
    if constraint_a.free_sites() != constraint_b.free_sites() {
        return Err(Error::InvalidGeometry("both constraints must free the same sites"));
    }
    let ma = ConstrainedModel::new(params, constraint_a, cutoff)?;
    let mb = ConstrainedModel::new(params, constraint_b, cutoff)?;
    let a = run_model(&ma, observable, chain, 0)?;
    let b = run_model(&mb, observable, chain, 1)?;
    Ok(GapEstimate { a, b, gap: a.minus(&b) })
}

/// Transition matrix (row-major, `2^n x 2^n`, bit `a` set means `+1`) of
/// the random-site Metropolis kernel: pick a site uniformly, flip it with
/// probability [`acceptance_probability`].
pub fn metropolis_transition_matrix(model: &ConstrainedModel) -> Vec<f64> {
    let n = model.len();
    assert!(n <= 12, "transition matrix is only built for tiny models");
    let states = 1usize << n;
    let mut p = alloc::vec![0.0; states * states];
    let mut spins = alloc::vec![0i8; n];
    for s in 0..states {
        for (a, v) in spins.iter_mut().enumerate() {
            *v = if s >> a & 1 == 1 { 1 } else { -1 };
        }
        let mut stay = 1.0;
        for a in 0..n {
            let de = 2.0 * spins[a] as f64 * model.local_field(&spins, a);
            let move_p = acceptance_probability(de, model.beta()) / n as f64;
            p[s * states + (s ^ (1 << a))] += move_p;
            stay -= move_p;
        }
        p[s * states + s] += stay;
    }
    p
}
