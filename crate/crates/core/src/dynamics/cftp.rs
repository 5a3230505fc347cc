use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::stream::UpdateStream;
use crate::connectivity::{Backend, BackendKind, Connectivity};
use crate::edgeconfig::EdgeConfig;
use crate::error::{Error, Result};
use crate::exactref::HeatBath;
use crate::graph::FkGraph;

/// Default bound on the look-back horizon.
pub const DEFAULT_CAP: u64 = 1 << 30;

const CHUNK: u64 = 4096;

/// One shared update applied to an ordered pair `bottom <= top`.
///
/// When the bottom chain sees a connection the top one does too, so both
/// open; otherwise the bottom closes and only the top needs a query.
#[inline]
pub fn pair_step(top: &mut Backend, bottom: &mut Backend, e: usize, u: f64, k: HeatBath) {
    if u <= k.p_disconnected {
        top.open(e);
        bottom.open(e);
    } else if u > k.p_connected {
        top.close(e);
        bottom.close(e);
    } else if bottom.query(e) {
        top.open(e);
        bottom.open(e);
    } else {
        bottom.close(e);
        let c = top.query(e);
        top.set(e, c);
    }
}

#[derive(Clone, Debug)]
pub struct CftpSample {
    pub config: EdgeConfig,
    /// Number of updates looked back when the extremal chains coalesced.
    pub horizon: u64,
}

/// Monotone coupling from the past with a doubling horizon.
///
/// Element `i` of the stream is the update at the `i`-th step before time
/// zero, so every epoch reuses exactly the randomness of the previous ones
/// near time zero and only adds older updates.
#[derive(Clone, Debug)]
pub struct Cftp {
    graph: Arc<FkGraph>,
    kernel: HeatBath,
    backend: BackendKind,
    cap: u64,
}

impl Cftp {
    pub fn new(graph: Arc<FkGraph>, kernel: HeatBath, backend: BackendKind) -> Self {
        Cftp { graph, kernel, backend, cap: DEFAULT_CAP }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap.max(1);
        self
    }

    pub fn graph(&self) -> &Arc<FkGraph> {
        &self.graph
    }

    pub fn sample(&self, stream: &UpdateStream) -> Result<CftpSample> {
        let m = self.graph.num_edges();
        if m == 0 {
            return Ok(CftpSample { config: EdgeConfig::all_closed(0), horizon: 0 });
        }
        let open = EdgeConfig::all_open(m);
        let closed = EdgeConfig::all_closed(m);
        let mut top = Backend::new(self.backend, self.graph.clone(), &open);
        let mut bottom = Backend::new(self.backend, self.graph.clone(), &closed);
        let mut buf = Vec::with_capacity(CHUNK as usize);
        let mut horizon = 1u64;
        loop {
            top.reset(&open);
            bottom.reset(&closed);
            let mut end = horizon;
            while end > 0 {
                let start = end.saturating_sub(CHUNK);
                buf.clear();
                buf.extend(stream.cursor(start).take((end - start) as usize));
                for up in buf.iter().rev() {
                    pair_step(&mut top, &mut bottom, up.edge, up.u, self.kernel);
                }
                end = start;
            }
            if top.config() == bottom.config() {
                return Ok(CftpSample { config: top.config().clone(), horizon });
            }
            if horizon >= self.cap {
                return Err(Error::NoCoalescence { cap: self.cap });
            }
            horizon = (horizon * 2).min(self.cap);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingEstimate {
    pub t: f64,
    pub replicas: usize,
    /// Fraction of replicas whose extremal pair still differs at time `t`.
    pub disagreement: f64,
    pub std_err: f64,
    pub edges: usize,
    /// `|E|` times the disagreement.
    pub tv_bound: f64,
    /// `2|E|` times the disagreement.
    pub dbar_bound: f64,
}

/// First time at which the extremal pair driven by `stream` agrees, if it
/// does so by time `horizon`. Only the updated edge can change, so the
/// number of disagreeing edges is tracked incrementally.
pub fn coupling_time(graph: &Arc<FkGraph>, kernel: HeatBath, backend: BackendKind, horizon: f64, stream: &UpdateStream) -> Option<f64> {
    let m = graph.num_edges();
    if m == 0 {
        return Some(0.0);
    }
    let mut top = Backend::new(backend, graph.clone(), &EdgeConfig::all_open(m));
    let mut bottom = Backend::new(backend, graph.clone(), &EdgeConfig::all_closed(m));
    let mut differ = m;
    let mut clock = 0.0;
    for up in stream.cursor(0) {
        clock += up.gap;
        if clock > horizon {
            return None;
        }
        let before = top.is_open(up.edge) != bottom.is_open(up.edge);
        pair_step(&mut top, &mut bottom, up.edge, up.u, kernel);
        let after = top.is_open(up.edge) != bottom.is_open(up.edge);
        differ = differ + usize::from(after) - usize::from(before);
        if differ == 0 {
            return Some(clock);
        }
    }
    unreachable!("update streams are infinite")
}

/// Run the extremal pair forward for time `t` in each replica and report how
/// often it has not coalesced.
pub fn coupling_tv_upper(
    graph: &Arc<FkGraph>,
    kernel: HeatBath,
    backend: BackendKind,
    t: f64,
    replicas: usize,
    seed: u64,
) -> CouplingEstimate {
    let m = graph.num_edges();
    let differ: Vec<bool> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| m > 0 && coupling_time(graph, kernel, backend, t, &UpdateStream::new(seed, r, m)).is_none())
        .collect();
    let d = differ.iter().filter(|&&x| x).count() as f64 / replicas.max(1) as f64;
    CouplingEstimate {
        t,
        replicas,
        disagreement: d,
        std_err: (d * (1.0 - d) / replicas.max(1) as f64).sqrt(),
        edges: m,
        tv_bound: m as f64 * d,
        dbar_bound: 2.0 * m as f64 * d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryCondition;
    use crate::lattice::Lattice;
    use crate::params::FkParams;

    fn setup(n: usize, spec: &str) -> Arc<FkGraph> {
        let l = Arc::new(Lattice::rectangle(n, n).unwrap());
        let xi = BoundaryCondition::parse(&l, spec).unwrap();
        Arc::new(FkGraph::from_lattice(&l, Some(&xi)).unwrap())
    }

    #[test]
    fn deterministic_and_capped() {
        let g = setup(6, "wired");
        let k = HeatBath::of(FkParams::critical(2.0).unwrap());
        let c = Cftp::new(g.clone(), k, BackendKind::Fast);
        let s = UpdateStream::new(3, 1, g.num_edges());
        let a = c.sample(&s).unwrap();
        let b = c.sample(&s).unwrap();
        assert_eq!(a.config, b.config);
        assert_eq!(a.horizon, b.horizon);
        let capped = Cftp::new(g, k, BackendKind::Fast).with_cap(2);
        assert!(matches!(capped.sample(&s), Err(Error::NoCoalescence { cap: 2 })));
    }

    #[test]
    fn backends_give_same_sample() {
        let g = setup(5, "sides:1,0,1,0");
        let k = HeatBath::of(FkParams::critical(3.0).unwrap());
        for r in 0..5 {
            let s = UpdateStream::new(9, r, g.num_edges());
            let a = Cftp::new(g.clone(), k, BackendKind::Fast).sample(&s).unwrap();
            let b = Cftp::new(g.clone(), k, BackendKind::Naive).sample(&s).unwrap();
            assert_eq!(a.config, b.config);
        }
    }

    #[test]
    fn coupling_starts_apart() {
        let g = setup(3, "free");
        let k = HeatBath::of(FkParams::critical(1.5).unwrap());
        let est = coupling_tv_upper(&g, k, BackendKind::Fast, 0.0, 20, 1);
        assert_eq!(est.disagreement, 1.0);
        let late = coupling_tv_upper(&g, k, BackendKind::Fast, 200.0, 50, 1);
        assert_eq!(late.disagreement, 0.0);
    }
}
