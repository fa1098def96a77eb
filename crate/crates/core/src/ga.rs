//! Genetic-algorithm baseline with augmented chromosomes.
//!
//! A chromosome pairs a permutation of subpath indices with one direction bit
//! per position: bit 0 traverses the subpath forward (its end connects to the
//! next subpath), bit 1 in reverse. Operators: order crossover, region
//! inversion, region rotation, two-gene exchange and direction flips. Flags
//! travel with their genes. Selection is a size-2 tournament with elitism of
//! one.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::batch;
use crate::cspp::{Orientation, SppSolution, Step};
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::workspace::Workspace;

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_rate: f64,
    pub inversion_rate: f64,
    pub rotation_rate: f64,
    pub mutation_rate: f64,
    pub subpath_reversal_rate: f64,
    pub max_generations: usize,
    /// Stop after this many generations without improvement.
    pub stagnation_window: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 100,
            crossover_rate: 0.5,
            inversion_rate: 0.25,
            rotation_rate: 0.25,
            mutation_rate: 0.5,
            subpath_reversal_rate: 0.5,
            max_generations: 150,
            stagnation_window: 50,
            seed: 0,
        }
    }
}

impl GaConfig {
    /// Population and generation caps by workspace size: 100/150 up to 20
    /// subpaths, 200/300 up to 50, 300/500 beyond.
    pub fn for_size(n: usize, seed: u64) -> Self {
        let (population_size, max_generations) = match n {
            0..=20 => (100, 150),
            21..=50 => (200, 300),
            _ => (300, 500),
        };
        GaConfig { population_size, max_generations, seed, ..GaConfig::default() }
    }

    fn validate(&self) -> Result<()> {
        let rates = [
            self.crossover_rate,
            self.inversion_rate,
            self.rotation_rate,
            self.mutation_rate,
            self.subpath_reversal_rate,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Invalid("GA rates must lie in [0, 1]".into()));
        }
        if self.population_size < 2 {
            return Err(Error::Invalid("GA population must hold at least 2 chromosomes".into()));
        }
        Ok(())
    }
}

/// Permutation `c` plus direction bits `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chromosome {
    pub c: Vec<usize>,
    pub d: Vec<bool>,
}

impl Chromosome {
    pub fn new(c: Vec<usize>, d: Vec<bool>) -> Self {
        Chromosome { c, d }
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut c: Vec<usize> = (0..n).collect();
        c.shuffle(rng);
        let d = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        Chromosome { c, d }
    }

    pub fn is_valid(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        self.c.len() == n
            && self.d.len() == n
            && self.c.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
    }

    pub fn order(&self) -> Vec<Step> {
        self.c
            .iter()
            .zip(&self.d)
            .map(|(&i, &rev)| Step::new(i, if rev { Orientation::Reverse } else { Orientation::Forward }))
            .collect()
    }
}

/// Tour length of the decoded chromosome, closing back to the first subpath.
pub fn fitness(chrom: &Chromosome, ws: &Workspace) -> f64 {
    let n = chrom.c.len();
    let ends = |k: usize| {
        let sp = ws.subpath(chrom.c[k]);
        if chrom.d[k] {
            (sp.end, sp.start)
        } else {
            (sp.start, sp.end)
        }
    };
    let mut total = 0.0;
    for k in 0..n {
        total += ws.subpath(chrom.c[k]).arc_length;
        total += ends(k).1.distance(&ends((k + 1) % n).0);
    }
    total
}

fn region(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    (a.min(b), a.max(b))
}

/// Order crossover: a slice of `a` is kept in place, the remaining genes are
/// filled in the cyclic order they have in `b`. Direction bits are taken
/// position-wise from the parent that supplied the slot.
pub fn order_crossover(a: &Chromosome, b: &Chromosome, rng: &mut impl Rng) -> Chromosome {
    let n = a.c.len();
    let (lo, hi) = region(n, rng);
    let mut c = vec![usize::MAX; n];
    let mut d = b.d.clone();
    let mut taken = vec![false; n];
    for k in lo..=hi {
        c[k] = a.c[k];
        d[k] = a.d[k];
        taken[a.c[k]] = true;
    }
    let mut slot = (hi + 1) % n;
    for step in 0..n {
        let gene = b.c[(hi + 1 + step) % n];
        if taken[gene] {
            continue;
        }
        c[slot] = gene;
        slot = (slot + 1) % n;
    }
    Chromosome { c, d }
}

pub fn invert(ch: &mut Chromosome, rng: &mut impl Rng) {
    let (lo, hi) = region(ch.c.len(), rng);
    ch.c[lo..=hi].reverse();
    ch.d[lo..=hi].reverse();
}

pub fn rotate(ch: &mut Chromosome, rng: &mut impl Rng) {
    let (lo, hi) = region(ch.c.len(), rng);
    let len = hi - lo + 1;
    if len > 1 {
        let shift = rng.gen_range(1..len);
        ch.c[lo..=hi].rotate_left(shift);
        ch.d[lo..=hi].rotate_left(shift);
    }
}

pub fn exchange(ch: &mut Chromosome, rng: &mut impl Rng) {
    let n = ch.c.len();
    let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
    ch.c.swap(i, j);
    ch.d.swap(i, j);
}

/// Flips each direction bit with probability 1/n, and at least one.
pub fn reverse_subpaths(ch: &mut Chromosome, rng: &mut impl Rng) {
    let n = ch.d.len();
    let forced = rng.gen_range(0..n);
    for k in 0..n {
        if k == forced || rng.gen_bool(1.0 / n as f64) {
            ch.d[k] = !ch.d[k];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaStats {
    pub generations: Vec<GenerationStats>,
    pub elapsed: Duration,
}

impl GaStats {
    /// `generation,best,mean` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,best,mean\n");
        for g in &self.generations {
            out.push_str(&format!("{},{},{}\n", g.generation, sig9(g.best), sig9(g.mean)));
        }
        out
    }
}

fn tournament<'a>(pop: &'a [Chromosome], fit: &[f64], rng: &mut impl Rng) -> &'a Chromosome {
    let i = rng.gen_range(0..pop.len());
    let j = rng.gen_range(0..pop.len());
    if fit[j] < fit[i] {
        &pop[j]
    } else {
        &pop[i]
    }
}

fn argmin(fit: &[f64]) -> usize {
    let mut best = 0;
    for (k, &f) in fit.iter().enumerate() {
        if f < fit[best] {
            best = k;
        }
    }
    best
}

fn summarize(generation: usize, fit: &[f64]) -> GenerationStats {
    GenerationStats {
        generation,
        best: fit[argmin(fit)],
        mean: fit.iter().sum::<f64>() / fit.len() as f64,
    }
}

/// Evolves until `stagnation_window` generations pass without improvement or
/// `max_generations` is reached. Same seed, same result.
pub fn run_ga(ws: &Workspace, cfg: &GaConfig) -> Result<(SppSolution, GaStats)> {
    cfg.validate()?;
    let clock = Instant::now();
    let n = ws.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pop: Vec<Chromosome> = (0..cfg.population_size).map(|_| Chromosome::random(n, &mut rng)).collect();
    let mut fit = batch::map(&pop, |ch| fitness(ch, ws));
    let mut stats = vec![summarize(0, &fit)];
    let mut best_so_far = stats[0].best;
    let mut last_improvement = 0;

    for generation in 1..=cfg.max_generations {
        let elite = argmin(&fit);
        let mut next = Vec::with_capacity(cfg.population_size);
        next.push(pop[elite].clone());
        while next.len() < cfg.population_size {
            let first = tournament(&pop, &fit, &mut rng);
            let mut child = if rng.gen_bool(cfg.crossover_rate) {
                let second = tournament(&pop, &fit, &mut rng);
                order_crossover(first, second, &mut rng)
            } else {
                first.clone()
            };
            if rng.gen_bool(cfg.inversion_rate) {
                invert(&mut child, &mut rng);
            }
            if rng.gen_bool(cfg.rotation_rate) {
                rotate(&mut child, &mut rng);
            }
            if rng.gen_bool(cfg.mutation_rate) {
                exchange(&mut child, &mut rng);
            }
            if rng.gen_bool(cfg.subpath_reversal_rate) {
                reverse_subpaths(&mut child, &mut rng);
            }
            next.push(child);
        }
        pop = next;
        fit = batch::map(&pop, |ch| fitness(ch, ws));
        let summary = summarize(generation, &fit);
        stats.push(summary);
        if summary.best < best_so_far {
            best_so_far = summary.best;
            last_improvement = generation;
        }
        if generation - last_improvement >= cfg.stagnation_window {
            break;
        }
    }

    let winner = &pop[argmin(&fit)];
    let solution = SppSolution::from_order(ws, winner.order())?;
    Ok((solution, GaStats { generations: stats, elapsed: clock.elapsed() }))
}
