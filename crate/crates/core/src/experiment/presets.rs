use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::{ExperimentKind, Instance, Plan, Report};
use crate::boundary::{induced_boundary, is_typical};
use crate::dynamics::{block_graph, coupling_time, systematic_block_step, Cftp, CftpSample, Chain, HeatBath, UpdateStream};
use crate::edgeconfig::EdgeConfig;
use crate::error::Result;
use crate::graph::FkGraph;
use crate::lattice::{LatticeKind, Rect};
use crate::observables::{bridge_stats, crossing, full_config, psi_count, Direction, Plane};
use crate::stats::{empirical_tv, linear_fit, mean, std_err};
use crate::validation;

pub(super) fn dispatch(plan: &Plan) -> Result<Report> {
    match plan.experiment {
        ExperimentKind::Validate => validate(plan),
        ExperimentKind::Sample => sample(plan),
        ExperimentKind::Bridges => bridges(plan),
        ExperimentKind::Psi => psi(plan),
        ExperimentKind::Crossing => crossings(plan),
        ExperimentKind::Mix => mix(plan),
        ExperimentKind::Block => block(plan),
    }
}

/// Seed for one lattice size, so different sizes use unrelated streams.
fn size_seed(seed: u64, n: usize, salt: u64) -> u64 {
    let mut z = seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt.wrapping_mul(0xd1b5_4a32_d192_ed03);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Setup {
    inst: Instance,
    graph: Arc<FkGraph>,
    kernel: HeatBath,
    seed: u64,
}

impl Setup {
    fn new(plan: &Plan, n: usize) -> Result<Self> {
        let inst = plan.instance(n)?;
        let graph = Arc::new(FkGraph::from_lattice(&inst.lattice, inst.xi.as_ref())?);
        Ok(Setup { graph, kernel: HeatBath::of(plan.params()), seed: size_seed(plan.seed, n, 0), inst })
    }

    fn draw(&self, plan: &Plan, replica: u64) -> Result<CftpSample> {
        let m = self.graph.num_edges();
        if m == 0 {
            return Ok(CftpSample { config: EdgeConfig::all_closed(0), horizon: 0 });
        }
        Cftp::new(self.graph.clone(), self.kernel, plan.backend)
            .with_cap(plan.cftp_cap)
            .sample(&UpdateStream::new(self.seed, replica, m))
    }

    fn full(&self, state: &EdgeConfig) -> EdgeConfig {
        full_config(&self.inst.lattice, state)
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        String::new()
    }
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

fn status<T>(r: &Result<T>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => e.to_string(),
    }
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn report(plan: &Plan, header: &[&str], rows: Vec<Vec<String>>, summary: Value) -> Report {
    Report { plan: plan.clone(), header: header.iter().map(|s| s.to_string()).collect(), rows, summary, passed: true }
}

/// Run `f` for every replica of every size, in parallel, keeping order.
fn per_replica<T: Send>(plan: &Plan, setups: &[Setup], f: impl Fn(&Setup, u64) -> T + Sync) -> Vec<Vec<T>> {
    setups
        .iter()
        .map(|s| (0..plan.replicas as u64).into_par_iter().map(|r| f(s, r)).collect())
        .collect()
}

fn setups(plan: &Plan) -> Result<Vec<Setup>> {
    plan.ns.iter().map(|&n| Setup::new(plan, n)).collect()
}

fn validate(plan: &Plan) -> Result<Report> {
    let mut checks = Vec::new();
    for &n in &plan.ns {
        checks.extend(validation::run_suite(n, Some(plan.q), plan.seed)?);
    }
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.case.clone(),
                format!("{:e}", c.value),
                format!("{:e}", c.tolerance),
                if c.upper { "<=".into() } else { ">=".into() },
                flag(c.passed),
            ]
        })
        .collect();
    let failed: Vec<&validation::Check> = checks.iter().filter(|c| !c.passed).collect();
    let summary = json!({
        "checks": checks.len(),
        "failed": failed.len(),
        "first_failure": failed.first().map(|c| format!("{} [{}]", c.name, c.case)),
    });
    let mut r = report(plan, &["check", "case", "value", "tolerance", "comparison", "passed"], rows, summary);
    r.passed = failed.is_empty();
    Ok(r)
}

fn sample(plan: &Plan) -> Result<Report> {
    let setups = setups(plan)?;
    let results = per_replica(plan, &setups, |s, r| {
        s.draw(plan, r).map(|d| {
            let clusters = s.graph.cluster_count(&d.config);
            (d.horizon, d.config.count_open(), clusters)
        })
    });
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for (s, res) in setups.iter().zip(&results) {
        let m = s.graph.num_edges();
        for (r, x) in res.iter().enumerate() {
            let mut row = vec![s.inst.n.to_string(), r.to_string(), status(x)];
            match x {
                Ok((h, open, k)) => row.extend([h.to_string(), open.to_string(), num(*open as f64 / m.max(1) as f64), k.to_string()]),
                Err(_) => row.extend(vec![String::new(); 4]),
            }
            rows.push(row);
        }
        let ok: Vec<&(u64, usize, usize)> = res.iter().filter_map(|x| x.as_ref().ok()).collect();
        let dens: Vec<f64> = ok.iter().map(|x| x.1 as f64 / m.max(1) as f64).collect();
        let hor: Vec<f64> = ok.iter().map(|x| x.0 as f64).collect();
        per_n.push(json!({
            "n": s.inst.n,
            "edges": m,
            "ok": ok.len(),
            "failed": res.len() - ok.len(),
            "mean_density": finite_or_null(mean(&dens)),
            "density_std_err": finite_or_null(std_err(&dens)),
            "mean_horizon": finite_or_null(mean(&hor)),
            "max_horizon": ok.iter().map(|x| x.0).max(),
        }));
    }
    Ok(report(
        plan,
        &["n", "replica", "status", "horizon", "open_edges", "density", "clusters"],
        rows,
        json!({ "sizes": per_n }),
    ))
}

fn bridges(plan: &Plan) -> Result<Report> {
    let setups = setups(plan)?;
    let results = per_replica(plan, &setups, |s, r| {
        let d = s.draw(plan, r)?;
        let l = &s.inst.lattice;
        let half = Rect::new(0, l.n(), 0, l.n_prime() / 2);
        let b = bridge_stats(l, &d.config, s.inst.xi.as_ref(), half)?;
        Ok((b, d.horizon))
    });
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    let (mut logs, mut means) = (Vec::new(), Vec::new());
    for (s, res) in setups.iter().zip(&results) {
        let n = s.inst.n;
        for (r, x) in res.iter().enumerate() {
            let mut row = vec![n.to_string(), r.to_string(), status(x)];
            match x {
                Ok((b, h)) => row.extend([
                    b.max.to_string(),
                    num(b.mean),
                    b.max_gamma1.to_string(),
                    b.max_gamma2.to_string(),
                    h.to_string(),
                ]),
                Err(_) => row.extend(vec![String::new(); 5]),
            }
            rows.push(row);
        }
        let ok: Vec<f64> = res.iter().filter_map(|x| x.as_ref().ok()).map(|(b, _)| b.max as f64).collect();
        let m = mean(&ok);
        if m.is_finite() {
            logs.push((n as f64).ln());
            means.push(m);
        }
        per_n.push(json!({
            "n": n,
            "ok": ok.len(),
            "failed": res.len() - ok.len(),
            "mean_max_bridges": finite_or_null(m),
            "std_err": finite_or_null(std_err(&ok)),
            "max_max_bridges": ok.iter().cloned().fold(None, |a: Option<f64>, x| Some(a.map_or(x, |a| a.max(x)))),
            "bound_30_log_n": 30.0 * (n as f64).ln(),
        }));
    }
    let increasing = means.windows(2).all(|w| w[1] > w[0]);
    let fit = linear_fit(&logs, &means);
    Ok(report(
        plan,
        &["n", "replica", "status", "max_bridges", "mean_bridges", "max_gamma1", "max_gamma2", "horizon"],
        rows,
        json!({ "sizes": per_n, "strictly_increasing": increasing, "fit_vs_log_n": fit }),
    ))
}

/// Empirical tail `P(X >= m)` for `m = 1..=top` and the least-squares slope
/// of its logarithm over the points where it is positive.
fn tail(values: &[usize], top: usize) -> (Vec<(usize, f64)>, Option<f64>) {
    let total = values.len().max(1) as f64;
    let points: Vec<(usize, f64)> =
        (1..=top).map(|m| (m, values.iter().filter(|&&v| v >= m).count() as f64 / total)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().filter(|p| p.1 > 0.0).map(|&(m, p)| (m as f64, p.ln())).unzip();
    (points, linear_fit(&xs, &ys).map(|f| f.slope))
}

fn psi(plan: &Plan) -> Result<Report> {
    let setups = setups(plan)?;
    let results = per_replica(plan, &setups, |s, r| {
        let d = s.draw(plan, r)?;
        let [y0, y1] = plan.band_rows(&s.inst.lattice);
        Ok((psi_count(&s.inst.lattice, &s.full(&d.config), y0, y1)?, d.horizon))
    });
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for (s, res) in setups.iter().zip(&results) {
        let n = s.inst.n;
        for (r, x) in res.iter().enumerate() {
            let mut row = vec![n.to_string(), r.to_string(), status(x)];
            match x {
                Ok((v, h)) => row.extend([v.to_string(), h.to_string()]),
                Err(_) => row.extend(vec![String::new(); 2]),
            }
            rows.push(row);
        }
        let ok: Vec<usize> = res.iter().filter_map(|x| x.as_ref().ok()).map(|x| x.0).collect();
        let top = ok.iter().copied().max().unwrap_or(0).max(12);
        let (points, slope) = tail(&ok, top);
        let f: Vec<f64> = ok.iter().map(|&v| v as f64).collect();
        per_n.push(json!({
            "n": n,
            "band": plan.band_rows(&s.inst.lattice),
            "ok": ok.len(),
            "failed": res.len() - ok.len(),
            "mean_psi": finite_or_null(mean(&f)),
            "tail": points.iter().map(|&(m, p)| json!({"m": m, "prob": p})).collect::<Vec<_>>(),
            "p_ge_12": points.iter().find(|p| p.0 == 12).map(|p| p.1),
            "log_tail_slope": slope,
        }));
    }
    Ok(report(plan, &["n", "replica", "status", "psi", "horizon"], rows, json!({ "sizes": per_n })))
}

fn crossings(plan: &Plan) -> Result<Report> {
    let setups = setups(plan)?;
    let results = per_replica(plan, &setups, |s, r| {
        let d = s.draw(plan, r)?;
        let w = s.full(&d.config);
        let l = &s.inst.lattice;
        Ok((
            crossing(l, &w, Direction::Vertical, Plane::Primal)?,
            crossing(l, &w, Direction::Horizontal, Plane::Primal)?,
            d.horizon,
        ))
    });
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for (s, res) in setups.iter().zip(&results) {
        for (r, x) in res.iter().enumerate() {
            let mut row = vec![s.inst.n.to_string(), r.to_string(), status(x)];
            match x {
                Ok((v, h, t)) => row.extend([flag(*v), flag(*h), t.to_string()]),
                Err(_) => row.extend(vec![String::new(); 3]),
            }
            rows.push(row);
        }
        let ok: Vec<&(bool, bool, u64)> = res.iter().filter_map(|x| x.as_ref().ok()).collect();
        let cv: Vec<f64> = ok.iter().map(|x| f64::from(u8::from(x.0))).collect();
        let ch: Vec<f64> = ok.iter().map(|x| f64::from(u8::from(x.1))).collect();
        let fv = mean(&cv);
        per_n.push(json!({
            "n": s.inst.n,
            "n_prime": s.inst.lattice.n_prime(),
            "ok": ok.len(),
            "failed": res.len() - ok.len(),
            "freq_vertical": finite_or_null(fv),
            "std_err_vertical": finite_or_null((fv * (1.0 - fv) / ok.len().max(1) as f64).sqrt()),
            "freq_horizontal": finite_or_null(mean(&ch)),
        }));
    }
    Ok(report(plan, &["n", "replica", "status", "cv", "ch", "horizon"], rows, json!({ "sizes": per_n })))
}

fn mix(plan: &Plan) -> Result<Report> {
    let setups = setups(plan)?;
    let horizon = plan.times.last().copied().unwrap_or(plan.time);
    let results = per_replica(plan, &setups, |s, r| {
        let m = s.graph.num_edges();
        if m == 0 {
            return Some(0.0);
        }
        coupling_time(&s.graph, s.kernel, plan.backend, horizon, &UpdateStream::new(s.seed, r, m))
    });
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for (s, res) in setups.iter().zip(&results) {
        let m = s.graph.num_edges();
        for (r, t) in res.iter().enumerate() {
            rows.push(vec![s.inst.n.to_string(), r.to_string(), t.map(num).unwrap_or_default()]);
        }
        let curve: Vec<Value> = plan
            .times
            .iter()
            .map(|&t| {
                let d = res.iter().filter(|x| x.is_none_or(|c| c > t)).count() as f64 / res.len() as f64;
                json!({
                    "t": t,
                    "disagreement": d,
                    "std_err": (d * (1.0 - d) / res.len() as f64).sqrt(),
                    "tv_bound": m as f64 * d,
                    "dbar_bound": 2.0 * m as f64 * d,
                })
            })
            .collect();
        per_n.push(json!({ "n": s.inst.n, "edges": m, "curve": curve }));
    }
    Ok(report(plan, &["n", "replica", "coupling_time"], rows, json!({ "sizes": per_n })))
}

struct BlockTrace {
    x_open: Vec<usize>,
    y_open: Vec<usize>,
    x_cv: Vec<Option<bool>>,
    y_cv: Vec<Option<bool>>,
    /// Whether the boundary seen by each block update was atypical, when the
    /// block is a rectangle.
    atypical: Vec<Option<bool>>,
    /// Whether the extremal pair on the block still differed after a phase.
    differ: Vec<bool>,
}

fn block_trace(plan: &Plan, s: &Setup, r: u64) -> Result<BlockTrace> {
    let l = &s.inst.lattice;
    let blocks = plan.block_list(l)?;
    let m = s.graph.num_edges();
    let omega0 = EdgeConfig::all_open(m);
    let cv = |w: &EdgeConfig| {
        (l.kind() == LatticeKind::Rectangle)
            .then(|| crossing(l, &s.full(w), Direction::Vertical, Plane::Primal).expect("rectangle"))
    };
    let big_n = plan.typicality.big_n.unwrap_or(l.n().max(2) as f64);
    let mut chain = Chain::new(s.graph.clone(), s.kernel, plan.backend, &omega0, UpdateStream::new(s.seed, 3 * r, m));
    let mut y = omega0.clone();
    let mut t = BlockTrace { x_open: vec![], y_open: vec![], x_cv: vec![], y_cv: vec![], atypical: vec![], differ: vec![] };
    for k in 0..plan.phases {
        let b = &blocks[k % blocks.len()];
        chain.run_censored(plan.time, &b.mask);
        let phase_seed = size_seed(s.seed, k, 1);
        t.atypical.push(match b.rect {
            Some(rect) => {
                let z = induced_boundary(l, rect, &y, s.inst.xi.as_ref())?;
                Some(!is_typical(&z, plan.typicality.k1, plan.typicality.k2, big_n)?.typical)
            }
            None => None,
        });
        let (bg, ids) = block_graph(&s.graph, &y, b);
        let block_time = coupling_time(
            &Arc::new(bg),
            s.kernel,
            plan.backend,
            plan.time,
            &UpdateStream::new(phase_seed, 3 * r + 2, ids.len().max(1)),
        );
        t.differ.push(!ids.is_empty() && block_time.is_none());
        systematic_block_step(&s.graph, &mut y, b, s.kernel, plan.backend, phase_seed, 3 * r + 1, plan.cftp_cap)?;
        t.x_open.push(chain.config().count_open());
        t.y_open.push(y.count_open());
        t.x_cv.push(cv(chain.config()));
        t.y_cv.push(cv(&y));
    }
    Ok(t)
}

/// Bin counts into ten equal-width bins over their joint range.
fn bin10(a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let lo = a.iter().chain(b).copied().min().unwrap_or(0);
    let hi = a.iter().chain(b).copied().max().unwrap_or(0);
    let width = ((hi - lo) / 10 + 1).max(1);
    let f = |v: &[usize]| v.iter().map(|&x| (x - lo) / width).collect();
    (f(a), f(b))
}

fn block(plan: &Plan) -> Result<Report> {
    let setups = setups(plan)?;
    let results = per_replica(plan, &setups, |s, r| block_trace(plan, s, r));
    let opt = |x: Option<bool>| x.map(flag).unwrap_or_default();
    let mut rows = Vec::new();
    let mut per_n = Vec::new();
    for (s, res) in setups.iter().zip(&results) {
        let n = s.inst.n;
        for (r, x) in res.iter().enumerate() {
            match x {
                Ok(t) => {
                    for k in 0..plan.phases {
                        rows.push(vec![
                            n.to_string(),
                            r.to_string(),
                            (k + 1).to_string(),
                            "ok".into(),
                            t.x_open[k].to_string(),
                            t.y_open[k].to_string(),
                            opt(t.x_cv[k]),
                            opt(t.y_cv[k]),
                            opt(t.atypical[k]),
                            flag(t.differ[k]),
                        ]);
                    }
                }
                Err(e) => {
                    let mut row = vec![n.to_string(), r.to_string(), String::new(), e.to_string()];
                    row.extend(vec![String::new(); 6]);
                    rows.push(row);
                }
            }
        }
        let ok: Vec<&BlockTrace> = res.iter().filter_map(|x| x.as_ref().ok()).collect();
        let reps = ok.len().max(1) as f64;
        let mut phases = Vec::new();
        let (mut atyp, mut measured, mut differ) = (0usize, 0usize, 0usize);
        for k in 0..plan.phases {
            for t in &ok {
                if let Some(a) = t.atypical[k] {
                    measured += 1;
                    atyp += usize::from(a);
                }
                differ += usize::from(t.differ[k]);
            }
            let xo: Vec<usize> = ok.iter().map(|t| t.x_open[k]).collect();
            let yo: Vec<usize> = ok.iter().map(|t| t.y_open[k]).collect();
            let (xb, yb) = bin10(&xo, &yo);
            let mut tv_hat = empirical_tv(&xb, &yb);
            let bins = xb.iter().chain(&yb).collect::<std::collections::BTreeSet<_>>().len();
            if ok.iter().all(|t| t.x_cv[k].is_some()) {
                let xc: Vec<bool> = ok.iter().map(|t| t.x_cv[k].unwrap_or(false)).collect();
                let yc: Vec<bool> = ok.iter().map(|t| t.y_cv[k].unwrap_or(false)).collect();
                tv_hat = tv_hat.max(empirical_tv(&xc, &yc));
            }
            let rho = if measured > 0 { atyp as f64 / measured as f64 } else { 0.0 };
            let eps = differ as f64 / (reps * (k + 1) as f64);
            let bound = (k + 1) as f64 * (rho + eps);
            let sigma = (bins.max(2) as f64 / reps).sqrt() / 2.0;
            phases.push(json!({
                "k": k + 1,
                "tv_hat": tv_hat,
                "rho_hat": rho,
                "rho_measured": measured > 0,
                "eps_hat": eps,
                "bound": bound,
                "sigma": sigma,
                "consistent": tv_hat <= bound + 3.0 * sigma,
            }));
        }
        per_n.push(json!({ "n": n, "ok": ok.len(), "failed": res.len() - ok.len(), "phases": phases }));
    }
    Ok(report(
        plan,
        &["n", "replica", "phase", "status", "x_open", "y_open", "x_cv", "y_cv", "atypical", "block_differ"],
        rows,
        json!({ "sizes": per_n }),
    ))
}
