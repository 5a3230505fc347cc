use std::sync::Arc;

use super::stream::{StreamCursor, Update, UpdateStream};
use crate::connectivity::{Backend, BackendKind, Connectivity};
use crate::edgeconfig::EdgeConfig;
use crate::exactref::HeatBath;
use crate::graph::FkGraph;

/// Resample edge `e` with uniform `u`: open if `u <= p_disconnected`,
/// closed if `u > p_connected`, and otherwise open exactly when the
/// endpoints are joined elsewhere.
#[inline]
pub fn heat_bath_step<C: Connectivity>(c: &mut C, e: usize, u: f64, kernel: HeatBath) {
    let open = if u <= kernel.p_disconnected {
        true
    } else if u > kernel.p_connected {
        false
    } else {
        c.query(e)
    };
    c.set(e, open);
}

/// A single heat-bath chain driven by an update stream.
pub struct Chain {
    backend: Backend,
    kernel: HeatBath,
    stream: UpdateStream,
    cursor: StreamCursor,
    pending: Update,
    next_time: f64,
    elapsed: f64,
}

impl Chain {
    pub fn new(graph: Arc<FkGraph>, kernel: HeatBath, backend: BackendKind, omega0: &EdgeConfig, stream: UpdateStream) -> Self {
        assert_eq!(stream.num_edges(), graph.num_edges());
        let mut cursor = stream.cursor(0);
        let pending = cursor.next_update();
        Chain {
            backend: Backend::new(backend, graph, omega0),
            kernel,
            stream,
            cursor,
            next_time: pending.gap,
            pending,
            elapsed: 0.0,
        }
    }

    pub fn config(&self) -> &EdgeConfig {
        self.backend.config()
    }

    pub fn backend_mut(&mut self) -> &mut Backend {
        &mut self.backend
    }

    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    /// Number of stream elements consumed so far.
    pub fn position(&self) -> u64 {
        self.cursor.index() - 1
    }

    pub fn stream(&self) -> &UpdateStream {
        &self.stream
    }

    fn advance(&mut self) -> Update {
        let up = self.pending;
        self.elapsed = self.next_time;
        self.pending = self.cursor.next_update();
        self.next_time += self.pending.gap;
        up
    }

    /// Apply every update whose arrival time falls within the next `t`.
    /// Returns the number of updates applied.
    pub fn run(&mut self, t: f64) -> u64 {
        self.run_filtered(t, |_| true)
    }

    /// Like [`Chain::run`], but updates to edges outside `keep` are
    /// discarded. The stream still advances past them.
    pub fn run_censored(&mut self, t: f64, keep: &[bool]) -> u64 {
        self.run_filtered(t, |e| keep[e])
    }

    fn run_filtered(&mut self, t: f64, keep: impl Fn(usize) -> bool) -> u64 {
        let end = self.elapsed + t;
        let mut applied = 0;
        while self.next_time <= end {
            let up = self.advance();
            if keep(up.edge) {
                heat_bath_step(&mut self.backend, up.edge, up.u, self.kernel);
                applied += 1;
            }
        }
        self.elapsed = end;
        applied
    }

    /// Apply exactly `k` updates, ignoring arrival times except to keep the
    /// clock in step.
    pub fn run_steps(&mut self, k: u64) {
        for _ in 0..k {
            let up = self.advance();
            heat_bath_step(&mut self.backend, up.edge, up.u, self.kernel);
        }
    }

    /// Overwrite the configuration on the edges of `mask`.
    pub fn restore(&mut self, omega0: &EdgeConfig, mask: &[bool]) {
        for (e, &m) in mask.iter().enumerate() {
            if m {
                self.backend.set(e, omega0.get(e));
            }
        }
    }

    pub fn set_config(&mut self, omega: &EdgeConfig) {
        self.backend.reset(omega);
    }
}

/// Several chains on one shared stream.
pub struct GrandCoupling {
    chains: Vec<Backend>,
    kernel: HeatBath,
    cursor: StreamCursor,
}

impl GrandCoupling {
    pub fn new(graph: Arc<FkGraph>, kernel: HeatBath, backend: BackendKind, initial: &[EdgeConfig], stream: &UpdateStream) -> Self {
        let chains = initial.iter().map(|w| Backend::new(backend, graph.clone(), w)).collect();
        GrandCoupling { chains, kernel, cursor: stream.cursor(0) }
    }

    pub fn configs(&self) -> Vec<&EdgeConfig> {
        self.chains.iter().map(|c| c.config()).collect()
    }

    pub fn step(&mut self) -> usize {
        let up = self.cursor.next_update();
        for c in &mut self.chains {
            heat_bath_step(c, up.edge, up.u, self.kernel);
        }
        up.edge
    }

    pub fn run_steps(&mut self, k: u64) {
        for _ in 0..k {
            self.step();
        }
    }

    /// Run `k` updates and count edgewise order violations among pairs that
    /// were ordered at the start. Only the updated edge can change, so it is
    /// the only one checked after each update.
    pub fn run_checking_order(&mut self, k: u64) -> u64 {
        let n = self.chains.len();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.chains[a].config().leq(self.chains[b].config()) {
                    pairs.push((a, b));
                }
            }
        }
        let mut violations = 0;
        for _ in 0..k {
            let e = self.step();
            for &(a, b) in &pairs {
                if self.chains[a].config().get(e) && !self.chains[b].config().get(e) {
                    violations += 1;
                }
            }
        }
        for &(a, b) in &pairs {
            if !self.chains[a].config().leq(self.chains[b].config()) {
                violations += 1;
            }
        }
        violations
    }

    pub fn coalesced(&self) -> bool {
        self.chains.windows(2).all(|w| w[0].config() == w[1].config())
    }
}
