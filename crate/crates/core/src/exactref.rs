//! Exact enumeration over all configurations of a small graph.
//!
//! Configurations are packed in a `u64`, bit `i` being state edge `i`.

use std::sync::Arc;

use crate::boundary::BoundaryCondition;
use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::graph::FkGraph;
use crate::lattice::{DualLattice, EdgeId, Lattice};
use crate::params::FkParams;

/// Largest edge count for exact distributions.
pub const DISTRIBUTION_GUARD: usize = 22;
/// Largest edge count for exact chain computations.
pub const CHAIN_GUARD: usize = 12;

/// Unnormalised weight `p^|w| (1-p)^(m-|w|) q^k(w)`.
pub fn weight(graph: &FkGraph, params: FkParams, omega: &EdgeConfig) -> f64 {
    log_weight(graph.num_edges(), params, omega.count_open(), graph.cluster_count(omega)).exp()
}

fn log_weight(m: usize, params: FkParams, open: usize, k: usize) -> f64 {
    open as f64 * params.p.ln() + (m - open) as f64 * (1.0 - params.p).ln() + k as f64 * params.q.ln()
}

/// Heat-bath update probabilities: open with `p_connected` when the
/// endpoints are joined elsewhere, with `p_disconnected` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatBath {
    pub p_connected: f64,
    pub p_disconnected: f64,
}

impl HeatBath {
    pub fn of(params: FkParams) -> Self {
        HeatBath { p_connected: params.p, p_disconnected: params.p_hat() }
    }
}

/// Which edges may be updated at each step of a uniformised chain.
#[derive(Clone, Debug)]
pub enum Censoring {
    None,
    /// Blocks are visited in order, `phase_len` steps each, cyclically.
    /// A step whose edge lies outside the active block is discarded.
    Blocks { masks: Vec<u64>, phase_len: usize },
}

#[derive(Clone, Debug)]
pub struct ExactModel {
    params: FkParams,
    m: usize,
    k: Vec<u16>,
    probs: Vec<f64>,
    log_z: f64,
}

impl ExactModel {
    pub fn new(graph: &FkGraph, params: FkParams) -> Result<Self> {
        let m = graph.num_edges();
        if m > DISTRIBUTION_GUARD {
            return Err(Error::SizeGuard { edges: m, limit: DISTRIBUTION_GUARD });
        }
        let size = 1usize << m;
        let k: Vec<u16> = (0..size as u64).map(|b| graph.cluster_count_bits(b) as u16).collect();
        let lw: Vec<f64> = (0..size)
            .map(|b| log_weight(m, params, (b as u64).count_ones() as usize, k[b] as usize))
            .collect();
        let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = lw.iter().map(|&x| (x - max).exp()).sum();
        let log_z = max + sum.ln();
        let probs = lw.iter().map(|&x| (x - log_z).exp()).collect();
        Ok(ExactModel { params, m, k, probs, log_z })
    }

    pub fn params(&self) -> FkParams {
        self.params
    }

    pub fn num_edges(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, bits: u64) -> f64 {
        self.probs[bits as usize]
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    pub fn cluster_count(&self, bits: u64) -> usize {
        self.k[bits as usize] as usize
    }

    pub fn event_prob(&self, mut event: impl FnMut(u64) -> bool) -> f64 {
        event_prob(&self.probs, &mut event)
    }

    pub fn edge_marginal(&self, e: usize) -> f64 {
        self.event_prob(|b| b >> e & 1 == 1)
    }

    /// Whether the endpoints of `e` are joined without using `e`.
    #[inline]
    pub fn connected_without(&self, bits: u64, e: usize) -> bool {
        let with = bits | 1 << e;
        let without = bits & !(1 << e);
        self.k[with as usize] == self.k[without as usize]
    }

    fn check_chain_guard(&self) -> Result<()> {
        if self.m > CHAIN_GUARD {
            Err(Error::SizeGuard { edges: self.m, limit: CHAIN_GUARD })
        } else {
            Ok(())
        }
    }

    /// One step of the uniformised chain: a uniform edge among all `m`,
    /// resampled by `kernel` if it lies in `active`.
    pub fn step(&self, mu: &[f64], kernel: HeatBath, active: u64) -> Vec<f64> {
        let mut out = vec![0.0; mu.len()];
        let inv_m = 1.0 / self.m as f64;
        for (b, &w) in mu.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let b = b as u64;
            let share = w * inv_m;
            for e in 0..self.m {
                if active >> e & 1 == 0 {
                    out[b as usize] += share;
                    continue;
                }
                let po = if self.connected_without(b, e) { kernel.p_connected } else { kernel.p_disconnected };
                out[(b | 1 << e) as usize] += share * po;
                out[(b & !(1 << e)) as usize] += share * (1.0 - po);
            }
        }
        out
    }

    fn all_edges(&self) -> u64 {
        if self.m == 64 {
            !0
        } else {
            (1u64 << self.m) - 1
        }
    }

    /// Exact law after `steps` uniformised steps from the point mass at `init`.
    pub fn chain_distribution(&self, init: u64, steps: usize, censoring: &Censoring) -> Result<Vec<f64>> {
        self.check_chain_guard()?;
        let mut mu = vec![0.0; 1 << self.m];
        mu[init as usize] = 1.0;
        let kernel = HeatBath::of(self.params);
        for t in 0..steps {
            let active = match censoring {
                Censoring::None => self.all_edges(),
                Censoring::Blocks { masks, phase_len } => masks[(t / (*phase_len).max(1)) % masks.len()],
            };
            mu = self.step(&mu, kernel, active);
        }
        Ok(mu)
    }

    /// Largest `|pi(w) P(w, w') - pi(w') P(w', w)|` over single-edge moves.
    pub fn detailed_balance_residual(&self, kernel: HeatBath) -> Result<f64> {
        self.check_chain_guard()?;
        let inv_m = 1.0 / self.m as f64;
        let mut worst: f64 = 0.0;
        for b in 0..(1u64 << self.m) {
            for e in 0..self.m {
                if b >> e & 1 == 1 {
                    continue;
                }
                let up = b | 1 << e;
                let po = if self.connected_without(b, e) { kernel.p_connected } else { kernel.p_disconnected };
                let fwd = self.probs[b as usize] * inv_m * po;
                let back = self.probs[up as usize] * inv_m * (1.0 - po);
                worst = worst.max((fwd - back).abs());
            }
        }
        Ok(worst)
    }

    /// Replace the edges in `block` by an exact sample from the conditional
    /// law given all other edges.
    pub fn block_resample(&self, mu: &[f64], block: u64) -> Vec<f64> {
        let size = 1usize << self.m;
        let outside = !block & self.all_edges();
        let mut mass = vec![0.0; size];
        let mut norm = vec![0.0; size];
        for b in 0..size {
            let o = b & outside as usize;
            mass[o] += mu[b];
            norm[o] += self.probs[b];
        }
        (0..size)
            .map(|b| {
                let o = b & outside as usize;
                if norm[o] > 0.0 {
                    mass[o] * self.probs[b] / norm[o]
                } else {
                    0.0
                }
            })
            .collect()
    }
}

pub fn event_prob(mu: &[f64], event: &mut impl FnMut(u64) -> bool) -> f64 {
    mu.iter().enumerate().filter(|(b, _)| event(*b as u64)).map(|(_, &w)| w).sum()
}

/// Total variation distance between two distributions on the same space.
pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Total variation between the law of the dual of a sample of the free
/// measure on every edge of `primal` at `params`, and the wired measure on
/// the dual rectangle at the dual parameter.
pub fn duality_tv(primal: &Lattice, params: FkParams) -> Result<f64> {
    let dual = DualLattice::of(primal)?;
    let dl = Arc::new(dual.lattice().clone());
    let wired = BoundaryCondition::wired(&dl)?;
    let primal_model = ExactModel::new(&FkGraph::bare(primal), params)?;
    let dual_model = ExactModel::new(&FkGraph::from_lattice(&dl, Some(&wired))?, params.dual())?;
    if primal_model.num_edges() != dual_model.num_edges() {
        return Err(Error::InvalidParams("dual rectangle does not match the primal edge count".into()));
    }
    let slot: Vec<usize> = (0..primal.num_edges() as EdgeId)
        .map(|e| dl.state_index(dual.dual_of(e)).expect("dual of a primal edge is updatable"))
        .collect();
    let mut pushed = vec![0.0; primal_model.probs().len()];
    for (b, &w) in primal_model.probs().iter().enumerate() {
        let d = slot
            .iter()
            .enumerate()
            .filter(|&(e, _)| b >> e & 1 == 0)
            .fold(0usize, |acc, (_, &s)| acc | 1 << s);
        pushed[d] += w;
    }
    Ok(tv(&pushed, dual_model.probs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(spec: &str, params: FkParams) -> (Arc<Lattice>, FkGraph, ExactModel) {
        let l = Arc::new(Lattice::rectangle(2, 2).unwrap());
        let xi = BoundaryCondition::parse(&l, spec).unwrap();
        let g = FkGraph::from_lattice(&l, Some(&xi)).unwrap();
        let m = ExactModel::new(&g, params).unwrap();
        (l, g, m)
    }

    #[test]
    fn all_closed_weight() {
        let (_, g, _) = model("free", FkParams::new(0.5, 2.0).unwrap());
        let w = weight(&g, FkParams::new(0.5, 2.0).unwrap(), &EdgeConfig::all_closed(4));
        assert!((w - 0.5f64.powi(4) * 2f64.powi(9)).abs() < 1e-12);
    }

    #[test]
    fn normalised() {
        for spec in ["free", "wired", "sides:1,0,1,0"] {
            let (_, _, m) = model(spec, FkParams::critical(2.0).unwrap());
            let s: f64 = m.probs().iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(m.probs().iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn adding_an_edge_changes_weight_by_ratio() {
        let params = FkParams::new(0.3, 2.5).unwrap();
        let l = Arc::new(Lattice::rectangle(3, 2).unwrap());
        let xi = BoundaryCondition::parse(&l, "sides:1,0,2,0").unwrap();
        let g = FkGraph::from_lattice(&l, Some(&xi)).unwrap();
        let m = g.num_edges();
        for b in 0..1u64 << m {
            let w = EdgeConfig::from_bits(m, b);
            for e in 0..m {
                if b >> e & 1 == 1 {
                    continue;
                }
                let up = EdgeConfig::from_bits(m, b | 1 << e);
                let dk = g.cluster_count(&up) as i32 - g.cluster_count(&w) as i32;
                let ratio = weight(&g, params, &up) / weight(&g, params, &w);
                let expect = params.p / (1.0 - params.p) * params.q.powi(dk);
                assert!((ratio / expect - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn guards() {
        let l = Lattice::rectangle(10, 10).unwrap();
        let xi = BoundaryCondition::free(&Arc::new(l.clone())).unwrap();
        let g = FkGraph::from_lattice(&l, Some(&xi)).unwrap();
        assert!(matches!(ExactModel::new(&g, FkParams::new(0.5, 2.0).unwrap()), Err(Error::SizeGuard { .. })));
        let l = Arc::new(Lattice::rectangle(4, 3).unwrap());
        let xi = BoundaryCondition::free(&l).unwrap();
        let g = FkGraph::from_lattice(&l, Some(&xi)).unwrap();
        let m = ExactModel::new(&g, FkParams::new(0.5, 2.0).unwrap()).unwrap();
        assert!(m.chain_distribution(0, 1, &Censoring::None).is_err());
    }

    #[test]
    fn chain_starts_at_point_mass_and_converges() {
        let (_, _, m) = model("wired", FkParams::critical(1.5).unwrap());
        let mu0 = m.chain_distribution(0b1010, 0, &Censoring::None).unwrap();
        assert_eq!(mu0[0b1010], 1.0);
        let mu = m.chain_distribution(0b1111, 10_000, &Censoring::None).unwrap();
        assert!(tv(&mu, m.probs()) <= 1e-6);
    }

    #[test]
    fn detailed_balance_and_fault_detection() {
        let (_, _, m) = model("sides:1,0,1,0", FkParams::critical(2.0).unwrap());
        let ok = HeatBath::of(m.params());
        assert!(m.detailed_balance_residual(ok).unwrap() <= 1e-12);
        let bad = HeatBath { p_disconnected: ok.p_disconnected * 1.01, ..ok };
        assert!(m.detailed_balance_residual(bad).unwrap() > 1e-6);
    }

    #[test]
    fn block_resample_preserves_stationary_law() {
        let (_, _, m) = model("free", FkParams::critical(4.0).unwrap());
        let out = m.block_resample(m.probs(), 0b0011);
        assert!(tv(&out, m.probs()) < 1e-12);
    }

    #[test]
    fn duality_of_free_and_wired() {
        for (n, np) in [(2, 1), (2, 2)] {
            let l = Lattice::rectangle(n, np).unwrap();
            for (p, q) in [(0.3, 1.5), (crate::params::p_critical(2.0), 2.0), (0.7, 4.0)] {
                let d = duality_tv(&l, FkParams::new(p, q).unwrap()).unwrap();
                assert!(d <= 1e-10, "{n}x{np} p={p} q={q}: {d}");
            }
        }
        // Pairing with the wrong parameter is visible.
        let l = Lattice::rectangle(2, 1).unwrap();
        let dual = DualLattice::of(&l).unwrap();
        let dl = Arc::new(dual.lattice().clone());
        let wired = BoundaryCondition::wired(&dl).unwrap();
        let a = ExactModel::new(&FkGraph::from_lattice(&dl, Some(&wired)).unwrap(), FkParams::new(0.3, 1.5).unwrap()).unwrap();
        let b = ExactModel::new(&FkGraph::from_lattice(&dl, Some(&wired)).unwrap(), FkParams::new(0.3, 1.5).unwrap().dual()).unwrap();
        assert!(tv(a.probs(), b.probs()) > 1e-3);
    }
}
