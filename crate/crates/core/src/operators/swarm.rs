//! Particle swarm (PSO) and competitive swarm (CSO) updates.
//!
//! Both draw per-dimension uniforms, so their realized maps are
//! translation and scale equivariant but not rotation equivariant.

use super::{check_parents, same_len, VariationOperator};
use crate::numerics::RandomStream;
use crate::problems::Bounds;
use crate::{Error, Result};

pub const CSO_SOCIAL_FACTOR: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct PsoParams {
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            inertia: 0.4,
            cognitive: 2.0,
            social: 2.0,
        }
    }
}

/// Swarm positions and velocities with their fitness. PSO additionally
/// tracks personal and global bests; CSO uses only the first block.
#[derive(Clone, Debug)]
pub struct SwarmState {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub fitness: Vec<f64>,
    pub pbest: Vec<Vec<f64>>,
    pub pbest_fitness: Vec<f64>,
    pub gbest: Vec<f64>,
    pub gbest_fitness: f64,
}

impl SwarmState {
    /// Builds a state with zero velocities from evaluated positions.
    pub fn new(positions: Vec<Vec<f64>>, fitness: Vec<f64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::EmptyInput("swarm"));
        }
        same_len(positions.len(), fitness.len())?;
        let dim = positions[0].len();
        for p in &positions {
            same_len(dim, p.len())?;
        }
        let best = argmin(&fitness);
        Ok(Self {
            velocities: vec![vec![0.0; dim]; positions.len()],
            pbest: positions.clone(),
            pbest_fitness: fitness.clone(),
            gbest: positions[best].clone(),
            gbest_fitness: fitness[best],
            positions,
            fitness,
        })
    }

    pub fn size(&self) -> usize {
        self.positions.len()
    }

    pub fn dim(&self) -> usize {
        self.positions[0].len()
    }

    /// Swarm centroid.
    pub fn mean_position(&self) -> Vec<f64> {
        let n = self.size() as f64;
        let mut m = vec![0.0; self.dim()];
        for p in &self.positions {
            for (a, v) in m.iter_mut().zip(p) {
                *a += v;
            }
        }
        m.iter_mut().for_each(|a| *a /= n);
        m
    }

    /// Index and value of the best current position.
    pub fn best_current(&self) -> (usize, f64) {
        let i = argmin(&self.fitness);
        (i, self.fitness[i])
    }
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, f) in v.iter().enumerate() {
        if f.total_cmp(&v[best]).is_lt() {
            best = i;
        }
    }
    best
}

/// One synchronous PSO generation. Per particle and dimension draws `r1`
/// then `r2`; positions are clamped to `bounds` and evaluated once each.
pub fn pso_step(
    state: &mut SwarmState,
    params: &PsoParams,
    bounds: &Bounds,
    mut objective: impl FnMut(&[f64]) -> Result<f64>,
    stream: &mut RandomStream,
) -> Result<()> {
    same_len(bounds.dim(), state.dim())?;
    for i in 0..state.size() {
        let x = &mut state.positions[i];
        let v = &mut state.velocities[i];
        for d in 0..x.len() {
            let r1 = stream.uniform();
            let r2 = stream.uniform();
            v[d] = params.inertia * v[d]
                + params.cognitive * r1 * (state.pbest[i][d] - x[d])
                + params.social * r2 * (state.gbest[d] - x[d]);
            x[d] += v[d];
        }
        bounds.clamp(x);
        let f = objective(x)?;
        state.fitness[i] = f;
        if f < state.pbest_fitness[i] {
            state.pbest_fitness[i] = f;
            state.pbest[i] = x.clone();
        }
    }
    let i = argmin(&state.pbest_fitness);
    if state.pbest_fitness[i] < state.gbest_fitness {
        state.gbest_fitness = state.pbest_fitness[i];
        state.gbest = state.pbest[i].clone();
    }
    Ok(())
}

/// One CSO generation: shuffle, pair consecutive indices, and let each
/// loser learn from its winner and the swarm mean. Only losers are
/// re-evaluated, so a step costs `n / 2` evaluations.
pub fn cso_step(
    state: &mut SwarmState,
    phi: f64,
    bounds: &Bounds,
    mut objective: impl FnMut(&[f64]) -> Result<f64>,
    stream: &mut RandomStream,
) -> Result<()> {
    if !state.size().is_multiple_of(2) {
        return Err(Error::Config(format!(
            "CSO needs an even swarm, got {}",
            state.size()
        )));
    }
    same_len(bounds.dim(), state.dim())?;
    let mean = state.mean_position();
    let mut order: Vec<usize> = (0..state.size()).collect();
    stream.shuffle(&mut order);
    for pair in order.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        let (w, l) = if state.fitness[b] < state.fitness[a] {
            (b, a)
        } else {
            (a, b)
        };
        let winner = state.positions[w].clone();
        let x = &mut state.positions[l];
        let v = &mut state.velocities[l];
        for d in 0..x.len() {
            let r1 = stream.uniform();
            let r2 = stream.uniform();
            let r3 = stream.uniform();
            v[d] = r1 * v[d] + r2 * (winner[d] - x[d]) + phi * r3 * (mean[d] - x[d]);
            x[d] += v[d];
        }
        bounds.clamp(x);
        let f = objective(x)?;
        state.fitness[l] = f;
        if f < state.gbest_fitness {
            state.gbest_fitness = f;
            state.gbest = x.clone();
        }
    }
    Ok(())
}

/// The PSO move as an operator over `(x, x_prev, pbest, gbest)`; the
/// velocity is `x - x_prev`.
pub struct PsoMove {
    pub params: PsoParams,
}

impl VariationOperator for PsoMove {
    fn name(&self) -> &str {
        "pso"
    }

    fn arity(&self) -> usize {
        4
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(
        &self,
        parents: &[&[f64]],
        _: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>> {
        let dim = check_parents(parents, 4)?;
        let (x, prev, p, g) = (parents[0], parents[1], parents[2], parents[3]);
        let c = &self.params;
        Ok(vec![(0..dim)
            .map(|d| {
                let r1 = stream.uniform();
                let r2 = stream.uniform();
                x[d] + c.inertia * (x[d] - prev[d])
                    + c.cognitive * r1 * (p[d] - x[d])
                    + c.social * r2 * (g[d] - x[d])
            })
            .collect()])
    }
}

/// The CSO loser move as an operator over `(loser, loser_prev, winner, mean)`.
pub struct CsoMove {
    pub phi: f64,
}

impl VariationOperator for CsoMove {
    fn name(&self) -> &str {
        "cso"
    }

    fn arity(&self) -> usize {
        4
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(
        &self,
        parents: &[&[f64]],
        _: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>> {
        let dim = check_parents(parents, 4)?;
        let (x, prev, w, m) = (parents[0], parents[1], parents[2], parents[3]);
        Ok(vec![(0..dim)
            .map(|d| {
                let r1 = stream.uniform();
                let r2 = stream.uniform();
                let r3 = stream.uniform();
                x[d] + r1 * (x[d] - prev[d]) + r2 * (w[d] - x[d]) + self.phi * r3 * (m[d] - x[d])
            })
            .collect()])
    }
}
