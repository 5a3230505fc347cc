//! Exact-enumeration self checks of the sampler and the model.
//!
//! Each check compares a computed quantity against a tolerance on a lattice
//! small enough to enumerate. The suite is what `fklab validate` runs.

use std::sync::Arc;

use serde::Serialize;

use crate::boundary::BoundaryCondition;
use crate::connectivity::BackendKind;
use crate::dynamics::{block_graph, halves, Block, Cftp, UpdateStream};
use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::exactref::{duality_tv, tv, Censoring, ExactModel, HeatBath, CHAIN_GUARD};
use crate::graph::FkGraph;
use crate::lattice::Lattice;
use crate::observables::{crossing, full_config, Direction, Plane};
use crate::params::{p_critical, FkParams};
use crate::stats::chi_square;

pub const EXACT_TOL: f64 = 1e-12;
pub const DUALITY_TOL: f64 = 1e-10;
pub const CHI_SQUARE_LEVEL: f64 = 0.01;

pub const BOUNDARY_SPECS: [&str; 3] = ["free", "wired", "sides:1,0,1,0"];
pub const Q_VALUES: [f64; 4] = [1.0, 1.5, 2.0, 4.0];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub case: String,
    pub value: f64,
    pub tolerance: f64,
    /// `true` when the value must not exceed the tolerance, `false` when it
    /// must be at least the tolerance.
    pub upper: bool,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, case: String, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), case, value, tolerance, upper: true, passed: value <= tolerance }
    }

    pub fn at_least(name: &str, case: String, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), case, value, tolerance, upper: false, passed: value >= tolerance }
    }
}

/// A small rectangle with a boundary condition and its exact law.
pub struct ExactCase {
    pub lattice: Arc<Lattice>,
    pub xi: BoundaryCondition,
    pub graph: FkGraph,
    pub model: ExactModel,
}

impl ExactCase {
    pub fn new(n: usize, n_prime: usize, spec: &str, params: FkParams) -> Result<Self> {
        let lattice = Arc::new(Lattice::rectangle(n, n_prime)?);
        let xi = BoundaryCondition::parse(&lattice, spec)?;
        let graph = FkGraph::from_lattice(&lattice, Some(&xi))?;
        let model = ExactModel::new(&graph, params)?;
        Ok(ExactCase { lattice, xi, graph, model })
    }

    /// Whether the state `bits` has the crossing in `dir`.
    pub fn crosses(&self, bits: u64, dir: Direction) -> bool {
        let state = EdgeConfig::from_bits(self.graph.num_edges(), bits);
        crossing(&self.lattice, &full_config(&self.lattice, &state), dir, Plane::Primal).expect("rectangle")
    }
}

fn case_name(n: usize, spec: &str, q: f64) -> String {
    format!("L{n}x{n} {spec} q={q}")
}

/// Detailed balance and one-step invariance of the uniformised kernel.
pub fn stationarity_checks(n: usize, specs: &[&str], qs: &[f64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &q in qs {
        for spec in specs {
            let case = ExactCase::new(n, n, spec, FkParams::critical(q)?)?;
            if case.graph.num_edges() > CHAIN_GUARD {
                return Err(Error::SizeGuard { edges: case.graph.num_edges(), limit: CHAIN_GUARD });
            }
            let kernel = HeatBath::of(case.model.params());
            let residual = case.model.detailed_balance_residual(kernel)?;
            out.push(Check::at_most("detailed_balance", case_name(n, spec, q), residual, EXACT_TOL));
            let pi = case.model.probs();
            let moved = case.model.step(pi, kernel, u64::MAX);
            out.push(Check::at_most("stationarity", case_name(n, spec, q), tv(&moved, pi), EXACT_TOL));
        }
    }
    Ok(out)
}

/// The free measure on every edge of `L2x1` and `L2x2` against the wired
/// measure on the dual rectangle at the dual parameter.
pub fn duality_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (n, np) in [(2, 1), (2, 2)] {
        let l = Lattice::rectangle(n, np)?;
        for (p, q) in [(0.3, 1.5), (p_critical(2.0), 2.0), (0.7, 4.0)] {
            let d = duality_tv(&l, FkParams::new(p, q)?)?;
            out.push(Check::at_most("duality", format!("L{n}x{np} p={p} q={q}"), d, DUALITY_TOL));
        }
    }
    Ok(out)
}

/// Increasing events used by the correlation checks: every single edge
/// open, then the vertical and horizontal crossings.
pub fn increasing_events(case: &ExactCase) -> Vec<(String, Vec<bool>)> {
    let m = case.graph.num_edges();
    let size = 1u64 << m;
    let mut events: Vec<(String, Vec<bool>)> =
        (0..m).map(|e| (format!("edge{e}"), (0..size).map(|b| b >> e & 1 == 1).collect())).collect();
    events.push(("Cv".into(), (0..size).map(|b| case.crosses(b, Direction::Vertical)).collect()));
    events.push(("Ch".into(), (0..size).map(|b| case.crosses(b, Direction::Horizontal)).collect()));
    events
}

fn prob_of(mu: &[f64], event: &[bool]) -> f64 {
    mu.iter().zip(event).filter(|(_, &x)| x).map(|(w, _)| w).sum()
}

/// Positive association: the worst `P(A)P(B) - P(A and B)` over pairs of
/// increasing events.
pub fn fkg_checks(n: usize, specs: &[&str], qs: &[f64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &q in qs {
        for spec in specs {
            let case = ExactCase::new(n, n, spec, FkParams::critical(q)?)?;
            let pi = case.model.probs();
            let events = increasing_events(&case);
            let mut worst = f64::NEG_INFINITY;
            for (_, a) in &events {
                for (_, b) in &events {
                    let both: Vec<bool> = a.iter().zip(b).map(|(x, y)| *x && *y).collect();
                    worst = worst.max(prob_of(pi, a) * prob_of(pi, b) - prob_of(pi, &both));
                }
            }
            out.push(Check::at_most("fkg", case_name(n, spec, q), worst, EXACT_TOL));
        }
    }
    Ok(out)
}

/// Conditional law of a block given the rest against the law of the block
/// graph in which open outside edges are contracted.
pub fn domain_markov_checks(n: usize, specs: &[&str], qs: &[f64]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &q in qs {
        for spec in specs {
            let params = FkParams::critical(q)?;
            let case = ExactCase::new(n, n, spec, params)?;
            let m = case.graph.num_edges();
            let block = Block::from_mask("pair", (0..m).map(|e| e < 2).collect());
            let inside = block.bits();
            let pi = case.model.probs();
            let mut worst: f64 = 0.0;
            for outside in (0..1u64 << m).filter(|b| b & inside == 0) {
                let omega = EdgeConfig::from_bits(m, outside);
                let (bg, ids) = block_graph(&case.graph, &omega, &block);
                let local = ExactModel::new(&bg, params)?;
                let norm: f64 = (0..1u64 << ids.len()).map(|l| pi[(outside | spread(l, &ids)) as usize]).sum();
                for l in 0..1u64 << ids.len() {
                    let cond = pi[(outside | spread(l, &ids)) as usize] / norm;
                    worst = worst.max((cond - local.prob(l)).abs());
                }
            }
            out.push(Check::at_most("domain_markov", case_name(n, spec, q), worst, EXACT_TOL));
        }
    }
    Ok(out)
}

fn spread(local: u64, ids: &[usize]) -> u64 {
    ids.iter().enumerate().filter(|(i, _)| local >> i & 1 == 1).fold(0, |acc, (_, &e)| acc | 1 << e)
}

/// Outcome of the censoring comparison at one horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensoringComparison {
    pub steps: usize,
    pub tv_plain: f64,
    pub tv_censored: f64,
    /// Largest `P_plain(A) - P_censored(A)` over the increasing events.
    pub domination_gap: f64,
}

/// Phase length used when censoring a horizon of `steps`.
pub fn censoring_phase(steps: usize) -> usize {
    (steps / 8).max(1)
}

/// Plain and halves-censored uniformised chains from all open.
pub fn censoring_comparison(case: &ExactCase, steps: usize) -> Result<CensoringComparison> {
    let masks: Vec<u64> = halves(&case.lattice)?.iter().map(Block::bits).collect();
    let m = case.graph.num_edges();
    let top = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let plain = case.model.chain_distribution(top, steps, &Censoring::None)?;
    let censored =
        case.model.chain_distribution(top, steps, &Censoring::Blocks { masks, phase_len: censoring_phase(steps) })?;
    let pi = case.model.probs();
    let gap = increasing_events(case)
        .iter()
        .map(|(_, a)| prob_of(&plain, a) - prob_of(&censored, a))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CensoringComparison { steps, tv_plain: tv(&plain, pi), tv_censored: tv(&censored, pi), domination_gap: gap })
}

pub fn censoring_checks(n: usize, specs: &[&str], q: f64, horizons: &[usize]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for spec in specs {
        let case = ExactCase::new(n, n, spec, FkParams::critical(q)?)?;
        for &t in horizons {
            let c = censoring_comparison(&case, t)?;
            let name = format!("{} T={t}", case_name(n, spec, q));
            out.push(Check::at_most("censoring_tv", name.clone(), c.tv_plain - c.tv_censored, EXACT_TOL));
            out.push(Check::at_most("censoring_domination", name, c.domination_gap, EXACT_TOL));
        }
    }
    Ok(out)
}

/// Count of configurations of the full rectangle where the primal crossing
/// and the dual crossing in the other direction fail to exclude each other.
pub fn crossing_xor_violations(n: usize, n_prime: usize) -> Result<u64> {
    let l = Lattice::rectangle(n, n_prime)?;
    let m = l.num_edges();
    if m > 24 {
        return Err(Error::SizeGuard { edges: m, limit: 24 });
    }
    let mut bad = 0;
    for b in 0..1u64 << m {
        let w = EdgeConfig::from_bits(m, b);
        for (primal, dual) in [(Direction::Vertical, Direction::Horizontal), (Direction::Horizontal, Direction::Vertical)] {
            if crossing(&l, &w, primal, Plane::Primal)? == crossing(&l, &w, dual, Plane::Dual)? {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

/// Histogram of CFTP draws over the state space of a small case.
pub fn cftp_histogram(case: &ExactCase, samples: usize, seed: u64, backend: BackendKind) -> Result<Vec<u64>> {
    let graph = Arc::new(case.graph.clone());
    let m = graph.num_edges();
    let cftp = Cftp::new(graph, HeatBath::of(case.model.params()), backend);
    let mut counts = vec![0u64; 1 << m];
    for r in 0..samples as u64 {
        let s = cftp.sample(&UpdateStream::new(seed, r, m))?;
        counts[s.config.bits() as usize] += 1;
    }
    Ok(counts)
}

pub fn cftp_checks(n: usize, specs: &[&str], q: f64, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for spec in specs {
        let case = ExactCase::new(n, n, spec, FkParams::critical(q)?)?;
        let counts = cftp_histogram(&case, samples, seed, BackendKind::Fast)?;
        let c = chi_square(&counts, case.model.probs(), 5.0);
        out.push(Check::at_least("cftp_chi_square", case_name(n, spec, q), c.p_value, CHI_SQUARE_LEVEL));
    }
    Ok(out)
}

/// The whole suite on `LnXn`. Sizes beyond the enumeration guards fail
/// with a size-guard error.
pub fn run_suite(n: usize, extra_q: Option<f64>, seed: u64) -> Result<Vec<Check>> {
    let mut qs = Q_VALUES.to_vec();
    if let Some(q) = extra_q {
        if !qs.contains(&q) {
            qs.push(q);
        }
    }
    let mut out = stationarity_checks(n, &BOUNDARY_SPECS, &qs)?;
    out.extend(duality_checks()?);
    out.extend(fkg_checks(n, &BOUNDARY_SPECS, &qs)?);
    out.extend(domain_markov_checks(n, &BOUNDARY_SPECS, &qs)?);
    out.extend(censoring_checks(n, &BOUNDARY_SPECS, 1.5, &[4, 16, 64, 256])?);
    for (a, b) in [(2, 2), (3, 2)] {
        let v = crossing_xor_violations(a, b)?;
        out.push(Check::at_most("crossing_xor", format!("L{a}x{b}"), v as f64, 0.0));
    }
    out.extend(cftp_checks(n, &BOUNDARY_SPECS, 1.5, 100_000, seed)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let checks = stationarity_checks(2, &BOUNDARY_SPECS, &[1.5]).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert!(duality_checks().unwrap().iter().all(|c| c.passed));
        assert!(fkg_checks(2, &["free", "wired"], &[2.0]).unwrap().iter().all(|c| c.passed));
        assert!(domain_markov_checks(2, &BOUNDARY_SPECS, &[4.0]).unwrap().iter().all(|c| c.passed));
        assert!(censoring_checks(2, &["wired"], 1.5, &[4, 16]).unwrap().iter().all(|c| c.passed));
        assert_eq!(crossing_xor_violations(2, 2).unwrap(), 0);
    }

    #[test]
    fn oversized_request_hits_the_guard() {
        assert!(matches!(stationarity_checks(10, &["wired"], &[1.5]), Err(Error::SizeGuard { .. })));
        assert!(matches!(run_suite(10, None, 0), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn corrupted_kernel_fails_detailed_balance() {
        let case = ExactCase::new(2, 2, "free", FkParams::critical(2.0).unwrap()).unwrap();
        let good = HeatBath::of(case.model.params());
        let bad = HeatBath { p_disconnected: good.p_disconnected * 1.01, ..good };
        assert!(case.model.detailed_balance_residual(bad).unwrap() > 1e-6);
    }
}
