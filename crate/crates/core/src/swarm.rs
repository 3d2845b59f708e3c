//! Bound-constrained chicken swarm optimization.
//!
//! The swarm is split by fitness rank into roosters (best), hens and chicks
//! (worst); the hierarchy, group membership and mother links are re-drawn
//! every `reorg_period` generations. Each generation every chicken proposes
//! a move from its personal best according to its role, the proposal is
//! clamped to the box and evaluated, and personal/global bests are updated.
//!
//! Two chick rules are available: the original one, where a chick only
//! follows its mother, and the improved one, where it also follows the
//! rooster of its group and keeps a decaying self-learning weight of its own
//! position.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chick update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Chicks follow their mother only.
    Cso,
    /// Chicks follow mother and rooster with a self-learning weight.
    Icso,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Cso => "cso",
            Variant::Icso => "icso",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub population: usize,
    pub rooster_count: usize,
    pub hen_count: usize,
    pub chick_count: usize,
    pub mother_count: usize,
    /// Generations between hierarchy reorganizations (G).
    pub reorg_period: usize,
    pub max_iters: usize,
    /// Chick attraction to the group rooster (F), improved variant only.
    pub chick_follow_rooster: f64,
    /// Interval FL is drawn from, once per chick per generation.
    pub mother_follow_range: (f64, f64),
    pub s_min: f64,
    pub s_max: f64,
    pub epsilon: f64,
    pub lower_bound: Vec<f64>,
    pub upper_bound: Vec<f64>,
    pub seed: u64,
    pub variant: Variant,
    /// Use a constant hen weight S2 = 1 instead of the fitness-based one.
    pub literal_s2: bool,
    /// Draw the hen's uniform factors per dimension instead of one per term.
    pub per_dimension_rand: bool,
    /// Draw the rooster's Gaussian factor per dimension instead of once.
    pub per_dimension_randn: bool,
}

/// Role counts `(roosters, hens, chicks, mothers)` for a population of `n`:
/// 5% roosters, 75% hens, mothers 10% of the hens (at least one), the rest
/// chicks.
pub fn role_counts(n: usize) -> (usize, usize, usize, usize) {
    let rn = (0.05 * n as f64).round().max(1.0) as usize;
    let hn = (0.75 * n as f64).round() as usize;
    let cn = n.saturating_sub(rn + hn);
    let mn = ((0.1 * hn as f64).floor() as usize).max(1);
    (rn, hn, cn, mn)
}

impl SwarmConfig {
    /// Default settings for `population` chickens in the box
    /// `[lower, upper]`.
    pub fn new(population: usize, lower_bound: Vec<f64>, upper_bound: Vec<f64>) -> Self {
        let (rn, hn, cn, mn) = role_counts(population);
        Self {
            population,
            rooster_count: rn,
            hen_count: hn,
            chick_count: cn,
            mother_count: mn,
            reorg_period: 10,
            max_iters: 1000,
            chick_follow_rooster: 0.4,
            mother_follow_range: (0.4, 1.0),
            s_min: 0.4,
            s_max: 0.9,
            epsilon: 1e-10,
            lower_bound,
            upper_bound,
            seed: 0,
            variant: Variant::Icso,
            literal_s2: false,
            per_dimension_rand: false,
            per_dimension_randn: true,
        }
    }

    /// Same box `[lower, upper]` in every one of `dimension` coordinates.
    pub fn uniform_box(population: usize, dimension: usize, lower: f64, upper: f64) -> Self {
        Self::new(population, vec![lower; dimension], vec![upper; dimension])
    }

    /// Recomputes the role counts for a new population size.
    pub fn with_population(mut self, population: usize) -> Self {
        let (rn, hn, cn, mn) = role_counts(population);
        self.population = population;
        self.rooster_count = rn;
        self.hen_count = hn;
        self.chick_count = cn;
        self.mother_count = mn;
        self
    }

    pub fn dimension(&self) -> usize {
        self.lower_bound.len()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population == 0 {
            return fail("population must be positive".into());
        }
        if self.rooster_count == 0 || self.hen_count == 0 || self.chick_count == 0 {
            return fail(format!(
                "role counts must be positive (RN={}, HN={}, CN={})",
                self.rooster_count, self.hen_count, self.chick_count
            ));
        }
        if self.rooster_count + self.hen_count + self.chick_count != self.population {
            return fail(format!(
                "RN + HN + CN = {} + {} + {} != N = {}",
                self.rooster_count, self.hen_count, self.chick_count, self.population
            ));
        }
        if self.rooster_count >= self.hen_count {
            return fail(format!(
                "RN < HN violated ({} >= {})",
                self.rooster_count, self.hen_count
            ));
        }
        if self.mother_count == 0 || self.mother_count > self.hen_count {
            return fail(format!(
                "need 1 <= MN <= HN, got MN={} HN={}",
                self.mother_count, self.hen_count
            ));
        }
        if self.reorg_period == 0 || self.max_iters == 0 {
            return fail("reorg_period and max_iters must be positive".into());
        }
        if self.dimension() == 0 || self.lower_bound.len() != self.upper_bound.len() {
            return fail(format!(
                "bounds must be non-empty and of equal length ({} vs {})",
                self.lower_bound.len(),
                self.upper_bound.len()
            ));
        }
        for (j, (lo, hi)) in self.lower_bound.iter().zip(&self.upper_bound).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return fail(format!("bound {j}: need finite lower < upper, got [{lo}, {hi}]"));
            }
        }
        if !(self.s_min > 0.0 && self.s_min <= self.s_max) {
            return fail(format!(
                "need 0 < s_min <= s_max, got {} and {}",
                self.s_min, self.s_max
            ));
        }
        let (fl_lo, fl_hi) = self.mother_follow_range;
        if !fl_lo.is_finite() || !fl_hi.is_finite() || fl_lo > fl_hi {
            return fail(format!("invalid FL range [{fl_lo}, {fl_hi}]"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return fail("epsilon must be positive".into());
        }
        if !self.chick_follow_rooster.is_finite() {
            return fail("F must be finite".into());
        }
        Ok(())
    }
}

/// Self-learning weight of the improved chick rule at generation `t`:
/// `s_min * (s_max / s_min)^(1 / (1 + 10 t / max_iters))`.
pub fn self_learning_coefficient(t: usize, config: &SwarmConfig) -> f64 {
    let ratio = config.s_max / config.s_min;
    let exponent = 1.0 / (1.0 + 10.0 * t as f64 / config.max_iters as f64);
    config.s_min * ratio.powf(exponent)
}

/// Variance of a rooster's multiplicative noise given its fitness and that
/// of a competing rooster.
pub fn rooster_variance(f_self: f64, f_other: f64, epsilon: f64) -> f64 {
    if f_self <= f_other {
        1.0
    } else {
        ((f_other - f_self) / (f_self.abs() + epsilon)).exp()
    }
}

/// Hen attraction to its own rooster.
pub fn hen_rooster_weight(f_self: f64, f_rooster: f64, epsilon: f64) -> f64 {
    ((f_self - f_rooster) / (f_self.abs() + epsilon)).exp()
}

/// Hen attraction to the randomly chosen chicken `r2`:
/// `exp(f_r2 - f_self)`, or 1 in literal mode. The exponent is not scaled,
/// so for large fitness magnitudes the weight saturates at `f64::MAX`
/// (the move is then cut short by the bounds).
pub fn hen_social_weight(f_self: f64, f_other: f64, literal: bool) -> f64 {
    if literal {
        1.0
    } else {
        (f_other - f_self).exp().min(f64::MAX)
    }
}

/// Chick move from `x` given its mother and group rooster positions.
/// `self_weight = 1, rooster_weight = 0` gives the original rule.
pub fn chick_move(
    x: &[f64],
    mother: &[f64],
    rooster: &[f64],
    follow_mother: f64,
    self_weight: f64,
    rooster_weight: f64,
) -> Vec<f64> {
    x.iter()
        .zip(mother)
        .zip(rooster)
        .map(|((&xi, &m), &r)| self_weight * xi + follow_mother * (m - xi) + rooster_weight * (r - xi))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Rooster,
    Hen,
    Chick,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chicken {
    /// Last evaluated position.
    pub position: Vec<f64>,
    pub fitness: f64,
    pub role: Role,
    /// Index of the rooster leading this chicken's group.
    pub group: usize,
    /// Mother hen (chicks only).
    pub mother: Option<usize>,
    pub is_mother: bool,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

#[derive(Debug, Clone)]
pub struct SwarmState {
    pub chickens: Vec<Chicken>,
    pub global_best_position: Vec<f64>,
    pub global_best_fitness: f64,
    /// Completed generations.
    pub generation: usize,
    roosters: Vec<usize>,
    hens: Vec<usize>,
    chicks: Vec<usize>,
    rng: ChaCha8Rng,
}

fn evaluate<F: Fn(&[f64]) -> f64>(objective: &F, x: &[f64]) -> Result<f64> {
    let value = objective(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective {
            value,
            position: x.to_vec(),
        })
    }
}

fn clamp_into(x: &mut [f64], config: &SwarmConfig) {
    for ((v, &lo), &hi) in x.iter_mut().zip(&config.lower_bound).zip(&config.upper_bound) {
        *v = v.clamp(lo, hi);
    }
}

impl SwarmState {
    /// Random initial population within the bounds.
    pub fn initialize<F: Fn(&[f64]) -> f64>(config: &SwarmConfig, objective: &F) -> Result<Self> {
        Self::initialize_with_anchors(config, objective, &[])
    }

    /// Like [`initialize`](Self::initialize), but the first chickens start at
    /// the given anchor positions (clamped to the bounds) instead of their
    /// random draws. The random draws are made regardless, so the remaining
    /// chickens are the same with or without anchors.
    pub fn initialize_with_anchors<F: Fn(&[f64]) -> f64>(
        config: &SwarmConfig,
        objective: &F,
        anchors: &[Vec<f64>],
    ) -> Result<Self> {
        config.validate()?;
        if anchors.len() > config.population {
            return Err(Error::InvalidConfig(format!(
                "{} anchors for a population of {}",
                anchors.len(),
                config.population
            )));
        }
        let dim = config.dimension();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut positions: Vec<Vec<f64>> = (0..config.population)
            .map(|_| {
                config
                    .lower_bound
                    .iter()
                    .zip(&config.upper_bound)
                    .map(|(&lo, &hi)| lo + (hi - lo) * rng.random::<f64>())
                    .collect()
            })
            .collect();
        for (slot, anchor) in positions.iter_mut().zip(anchors) {
            if anchor.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    actual: anchor.len(),
                });
            }
            slot.clone_from(anchor);
            clamp_into(slot, config);
        }

        let mut chickens = Vec::with_capacity(config.population);
        for position in positions {
            let fitness = evaluate(objective, &position)?;
            chickens.push(Chicken {
                best_position: position.clone(),
                best_fitness: fitness,
                position,
                fitness,
                role: Role::Hen,
                group: 0,
                mother: None,
                is_mother: false,
            });
        }
        let best = (0..chickens.len())
            .min_by(|&a, &b| chickens[a].fitness.total_cmp(&chickens[b].fitness))
            .expect("population is non-empty");
        let mut state = Self {
            global_best_position: chickens[best].position.clone(),
            global_best_fitness: chickens[best].fitness,
            chickens,
            generation: 0,
            roosters: Vec::new(),
            hens: Vec::new(),
            chicks: Vec::new(),
            rng,
        };
        state.assign_roles(config);
        Ok(state)
    }

    pub fn roosters(&self) -> &[usize] {
        &self.roosters
    }

    pub fn hens(&self) -> &[usize] {
        &self.hens
    }

    pub fn chicks(&self) -> &[usize] {
        &self.chicks
    }

    /// Ranks chickens by personal-best fitness (ties broken by index) and
    /// re-draws roles, groups and mother links.
    pub fn assign_roles(&mut self, config: &SwarmConfig) {
        let mut order: Vec<usize> = (0..self.chickens.len()).collect();
        order.sort_by(|&a, &b| {
            self.chickens[a]
                .best_fitness
                .total_cmp(&self.chickens[b].best_fitness)
                .then(a.cmp(&b))
        });
        let rn = config.rooster_count;
        let hn = config.hen_count;
        self.roosters = order[..rn].to_vec();
        self.hens = order[rn..rn + hn].to_vec();
        self.chicks = order[rn + hn..].to_vec();

        for &r in &self.roosters {
            let c = &mut self.chickens[r];
            c.role = Role::Rooster;
            c.group = r;
            c.mother = None;
            c.is_mother = false;
        }
        for &h in &self.hens {
            let group = self.roosters[self.rng.random_range(0..rn)];
            let c = &mut self.chickens[h];
            c.role = Role::Hen;
            c.group = group;
            c.mother = None;
            c.is_mother = false;
        }
        let mothers: Vec<usize> = index::sample(&mut self.rng, hn, config.mother_count)
            .into_iter()
            .map(|k| self.hens[k])
            .collect();
        for &m in &mothers {
            self.chickens[m].is_mother = true;
        }
        for &k in &self.chicks {
            let mother = mothers[self.rng.random_range(0..mothers.len())];
            let group = self.chickens[mother].group;
            let c = &mut self.chickens[k];
            c.role = Role::Chick;
            c.group = group;
            c.mother = Some(mother);
            c.is_mother = false;
        }
    }

    /// Proposed rooster move (unclamped bookkeeping is done by the caller).
    pub fn update_rooster(&mut self, i: usize, config: &SwarmConfig) -> Vec<f64> {
        let others = self.roosters.len() - 1;
        let variance = if others == 0 {
            1.0
        } else {
            let pick = self.rng.random_range(0..others);
            let k = self.roosters.iter().copied().filter(|&r| r != i).nth(pick).unwrap();
            rooster_variance(
                self.chickens[i].best_fitness,
                self.chickens[k].best_fitness,
                config.epsilon,
            )
        };
        let sd = variance.sqrt();
        let x = &self.chickens[i].best_position;
        let mut out = Vec::with_capacity(x.len());
        if config.per_dimension_randn {
            for &xj in x {
                let z: f64 = self.rng.sample(StandardNormal);
                out.push(xj + sd * z * xj);
            }
        } else {
            let z: f64 = self.rng.sample(StandardNormal);
            out.extend(x.iter().map(|&xj| xj + sd * z * xj));
        }
        clamp_into(&mut out, config);
        out
    }

    pub fn update_hen(&mut self, i: usize, config: &SwarmConfig) -> Vec<f64> {
        let r1 = self.chickens[i].group;
        let candidates = self.roosters.len() + self.hens.len() - 2;
        let r2 = if candidates == 0 {
            None
        } else {
            let pick = self.rng.random_range(0..candidates);
            self.roosters
                .iter()
                .chain(&self.hens)
                .copied()
                .filter(|&c| c != i && c != r1)
                .nth(pick)
        };

        let me = &self.chickens[i];
        let s1 = hen_rooster_weight(me.best_fitness, self.chickens[r1].best_fitness, config.epsilon);
        let s2 = r2.map_or(0.0, |r2| {
            hen_social_weight(me.best_fitness, self.chickens[r2].best_fitness, config.literal_s2)
        });
        let x = &me.best_position;
        let xr1 = &self.chickens[r1].best_position;
        let xr2 = r2.map(|r| &self.chickens[r].best_position);
        let dim = x.len();

        let mut out = x.clone();
        if config.per_dimension_rand {
            for j in 0..dim {
                let a: f64 = self.rng.random();
                let b: f64 = self.rng.random();
                out[j] += s1 * a * (xr1[j] - x[j]);
                if let Some(xr2) = xr2 {
                    out[j] += s2 * b * (xr2[j] - x[j]);
                }
            }
        } else {
            let a: f64 = self.rng.random();
            let b: f64 = self.rng.random();
            for j in 0..dim {
                out[j] += s1 * a * (xr1[j] - x[j]);
                if let Some(xr2) = xr2 {
                    out[j] += s2 * b * (xr2[j] - x[j]);
                }
            }
        }
        clamp_into(&mut out, config);
        out
    }

    /// Chick move for generation `t` (the schedule only matters for the
    /// improved variant).
    pub fn update_chick(&mut self, i: usize, t: usize, config: &SwarmConfig) -> Vec<f64> {
        let (lo, hi) = config.mother_follow_range;
        let follow_mother = lo + (hi - lo) * self.rng.random::<f64>();
        let me = &self.chickens[i];
        let mother = me.mother.expect("chick has a mother");
        let x = &me.best_position;
        let xm = &self.chickens[mother].best_position;
        let xr = &self.chickens[me.group].best_position;
        let mut out = match config.variant {
            Variant::Cso => chick_move(x, xm, xr, follow_mother, 1.0, 0.0),
            Variant::Icso => chick_move(
                x,
                xm,
                xr,
                follow_mother,
                self_learning_coefficient(t, config),
                config.chick_follow_rooster,
            ),
        };
        clamp_into(&mut out, config);
        out
    }

    /// One generation: optional reorganization, a synchronous move of every
    /// chicken from its personal best, evaluation and best bookkeeping.
    pub fn step<F: Fn(&[f64]) -> f64>(&mut self, config: &SwarmConfig, objective: &F) -> Result<()> {
        let t = self.generation;
        if t.is_multiple_of(config.reorg_period) {
            self.assign_roles(config);
        }
        let proposals: Vec<Vec<f64>> = (0..self.chickens.len())
            .map(|i| match self.chickens[i].role {
                Role::Rooster => self.update_rooster(i, config),
                Role::Hen => self.update_hen(i, config),
                Role::Chick => self.update_chick(i, t, config),
            })
            .collect();
        for (chicken, position) in self.chickens.iter_mut().zip(proposals) {
            let fitness = evaluate(objective, &position)?;
            if fitness < chicken.best_fitness {
                chicken.best_fitness = fitness;
                chicken.best_position.clone_from(&position);
            }
            if fitness < self.global_best_fitness {
                self.global_best_fitness = fitness;
                self.global_best_position.clone_from(&position);
            }
            chicken.position = position;
            chicken.fitness = fitness;
        }
        self.generation += 1;
        Ok(())
    }
}

/// Result of a full optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub position: Vec<f64>,
    pub fitness: f64,
    /// Global best fitness after each generation.
    pub history: Vec<f64>,
}

pub fn minimize<F: Fn(&[f64]) -> f64>(objective: F, config: &SwarmConfig) -> Result<Minimum> {
    minimize_with_anchors(objective, config, &[])
}

/// Runs `max_iters` generations starting from a population seeded with the
/// given anchors.
pub fn minimize_with_anchors<F: Fn(&[f64]) -> f64>(
    objective: F,
    config: &SwarmConfig,
    anchors: &[Vec<f64>],
) -> Result<Minimum> {
    let mut state = SwarmState::initialize_with_anchors(config, &objective, anchors)?;
    let mut history = Vec::with_capacity(config.max_iters);
    for _ in 0..config.max_iters {
        state.step(config, &objective)?;
        history.push(state.global_best_fitness);
    }
    Ok(Minimum {
        position: state.global_best_position,
        fitness: state.global_best_fitness,
        history,
    })
}
