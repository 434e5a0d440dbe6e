//! The maximal-entropy geodesic flow on a finite graph, as the Parry Markov
//! chain on directed edges (darts) built from the non-backtracking operator.
//!
//! Edge `i` of the input gives darts `2i` (as written) and `2i + 1`
//! (reversed), so reversal is `d ^ 1`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use libm::{fabs, log};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error("graph has no edges")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {vertex} has degree {degree} < 3")]
    LowDegree { vertex: String, degree: usize },
    #[error("transition structure is not irreducible")]
    Reducible,
    #[error("power iteration did not reach tolerance {0:e}")]
    NoConvergence(f64),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cycle: {0}")]
    BadCycle(String),
}

/// A finite graph; every undirected edge is a pair of darts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientGraph {
    names: Vec<String>,
    edges: Vec<(u32, u32)>,
}

impl QuotientGraph {
    /// Checks connectivity and minimum degree 3. Loops and multiple edges are
    /// allowed.
    pub fn new(names: Vec<String>, edges: Vec<(u32, u32)>) -> Result<Self, FlowError> {
        if edges.is_empty() {
            return Err(FlowError::Empty);
        }
        let n = names.len();
        let mut deg = alloc::vec![0usize; n];
        let mut adj: Vec<Vec<u32>> = alloc::vec![Vec::new(); n];
        for &(u, v) in &edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![0u32];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u as usize] {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    stack.push(v);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(FlowError::Disconnected);
        }
        if let Some(v) = (0..n).find(|&v| deg[v] < 3) {
            return Err(FlowError::LowDegree { vertex: names[v].clone(), degree: deg[v] });
        }
        Ok(QuotientGraph { names, edges })
    }

    /// Parses `u v` per line; `#` starts a comment. Vertex names are arbitrary
    /// tokens, numbered in order of first appearance.
    pub fn parse_edge_list(text: &str) -> Result<Self, FlowError> {
        let mut ids: BTreeMap<String, u32> = BTreeMap::new();
        let mut names = Vec::new();
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(FlowError::Parse { line: i + 1, msg: "expected two vertex names".into() });
            }
            let mut id = |t: &str| {
                *ids.entry(t.to_string()).or_insert_with(|| {
                    names.push(t.to_string());
                    names.len() as u32 - 1
                })
            };
            let (u, v) = (id(toks[0]), id(toks[1]));
            edges.push((u, v));
        }
        QuotientGraph::new(names, edges)
    }

    pub fn complete(n: u32) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        QuotientGraph::new(names, edges).expect("complete graph on ≥ 4 vertices")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        QuotientGraph::new((0..10).map(|i: u32| i.to_string()).collect(), edges).expect("petersen")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn vertex_id(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn name(&self, v: u32) -> &str {
        &self.names[v as usize]
    }

    pub fn tail(&self, d: u32) -> u32 {
        let (u, v) = self.edges[(d / 2) as usize];
        if d.is_multiple_of(2) {
            u
        } else {
            v
        }
    }

    pub fn head(&self, d: u32) -> u32 {
        self.tail(d ^ 1)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().map(|&(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    /// Adjacency matrix (loops count twice).
    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        let n = self.vertex_count();
        let mut a = alloc::vec![alloc::vec![0.0; n]; n];
        for &(u, v) in &self.edges {
            a[u as usize][v as usize] += 1.0;
            a[v as usize][u as usize] += 1.0;
        }
        a
    }

    /// Darts leaving `head(d)` other than `d ^ 1`.
    pub fn successors(&self) -> Vec<Vec<u32>> {
        let mut out_of: Vec<Vec<u32>> = alloc::vec![Vec::new(); self.vertex_count()];
        for d in 0..self.dart_count() as u32 {
            out_of[self.tail(d) as usize].push(d);
        }
        (0..self.dart_count() as u32)
            .map(|d| out_of[self.head(d) as usize].iter().copied().filter(|&f| f != d ^ 1).collect())
            .collect()
    }

    /// The dart from `u` to `v` with the smallest index.
    pub fn dart(&self, u: u32, v: u32) -> Option<u32> {
        (0..self.dart_count() as u32).find(|&d| self.tail(d) == u && self.head(d) == v)
    }
}

/// The Parry chain: `p(d → f) = r_f / (λ r_d)` for the Perron right vector
/// `r`, stationary law `π_d ∝ l_d r_d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParryChain {
    pub lambda: f64,
    pub entropy: f64,
    pub pi: Vec<f64>,
    succ: Vec<Vec<u32>>,
    prob: Vec<Vec<f64>>,
    cum: Vec<Vec<f64>>,
    cum_pi: Vec<f64>,
    pub iterations: usize,
}

const MAX_ITER: usize = 1_000_000;

/// Power iteration on `M + I` from the all-ones vector; `apply` computes `Mx`.
fn power(n: usize, tol: f64, apply: impl Fn(&[f64]) -> Vec<f64>) -> Result<(f64, Vec<f64>, usize), FlowError> {
    let mut x = alloc::vec![1.0 / n as f64; n];
    for it in 1..=MAX_ITER {
        let mx = apply(&x);
        let y: Vec<f64> = mx.iter().zip(&x).map(|(a, b)| a + b).collect();
        let s: f64 = y.iter().sum();
        let y: Vec<f64> = y.iter().map(|v| v / s).collect();
        let diff: f64 = y.iter().zip(&x).map(|(a, b)| fabs(a - b)).sum();
        x = y;
        if diff <= tol {
            let mx = apply(&x);
            let lambda = mx.iter().sum::<f64>() / x.iter().sum::<f64>();
            return Ok((lambda, x, it));
        }
    }
    Err(FlowError::NoConvergence(tol))
}

/// Solves the Perron problem of the non-backtracking operator and builds the
/// Parry chain.
pub fn perron(g: &QuotientGraph, tol: f64) -> Result<ParryChain, FlowError> {
    let succ = g.successors();
    let n = succ.len();
    if !strongly_connected(&succ) {
        return Err(FlowError::Reducible);
    }
    let (lambda, r, it1) = power(n, tol, |x| succ.iter().map(|fs| fs.iter().map(|&f| x[f as usize]).sum()).collect())?;
    let (_, l, it2) = power(n, tol, |x| {
        let mut y = alloc::vec![0.0; n];
        for (d, fs) in succ.iter().enumerate() {
            for &f in fs {
                y[f as usize] += x[d];
            }
        }
        y
    })?;
    let prob: Vec<Vec<f64>> =
        succ.iter().enumerate().map(|(d, fs)| fs.iter().map(|&f| r[f as usize] / (lambda * r[d])).collect()).collect();
    let z: f64 = l.iter().zip(&r).map(|(a, b)| a * b).sum();
    let pi: Vec<f64> = l.iter().zip(&r).map(|(a, b)| a * b / z).collect();
    let cum = prob.iter().map(|ps| cumulative(ps)).collect();
    let cum_pi = cumulative(&pi);
    Ok(ParryChain { lambda, entropy: log(lambda), pi, succ, prob, cum, cum_pi, iterations: it1 + it2 })
}

fn cumulative(ps: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = ps.iter().map(|p| {
        acc += p;
        acc
    }).collect();
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

fn strongly_connected(succ: &[Vec<u32>]) -> bool {
    let n = succ.len();
    let reach = |adj: &dyn Fn(usize) -> Vec<usize>| {
        let mut seen = alloc::vec![false; n];
        let mut stack = alloc::vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in adj(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().all(|s| *s)
    };
    let mut pred: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (d, fs) in succ.iter().enumerate() {
        for &f in fs {
            pred[f as usize].push(d);
        }
    }
    reach(&|u| succ[u].iter().map(|&f| f as usize).collect()) && reach(&|u| pred[u].clone())
}

impl ParryChain {
    pub fn successors(&self, d: u32) -> &[u32] {
        &self.succ[d as usize]
    }

    pub fn transition(&self, d: u32) -> &[f64] {
        &self.prob[d as usize]
    }

    /// `‖πP − π‖₁`.
    pub fn stationarity_defect(&self) -> f64 {
        let mut y = alloc::vec![0.0; self.pi.len()];
        for (d, fs) in self.succ.iter().enumerate() {
            for (k, &f) in fs.iter().enumerate() {
                y[f as usize] += self.pi[d] * self.prob[d][k];
            }
        }
        y.iter().zip(&self.pi).map(|(a, b)| fabs(a - b)).sum()
    }

    /// An endless sample path; stream `stream` of `seed` keeps paths of one
    /// experiment independent of scheduling.
    pub fn walker(&self, seed: u64, stream: u64) -> Walker<'_> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Walker { chain: self, rng, cur: None }
    }
}

fn pick(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

pub struct Walker<'a> {
    chain: &'a ParryChain,
    rng: ChaCha8Rng,
    cur: Option<u32>,
}

impl Iterator for Walker<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let u: f64 = self.rng.gen();
        let d = match self.cur {
            None => pick(&self.chain.cum_pi, u) as u32,
            Some(c) => {
                let k = pick(&self.chain.cum[c as usize], u);
                self.chain.succ[c as usize][k]
            }
        };
        self.cur = Some(d);
        Some(d)
    }
}

/// A sampled trajectory of `T` darts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub darts: Vec<u32>,
    pub seed: u64,
    pub stream: u64,
}

pub fn sample_path(chain: &ParryChain, t: usize, seed: u64, stream: u64) -> GeodesicPath {
    GeodesicPath { darts: chain.walker(seed, stream).take(t).collect(), seed, stream }
}

impl GeodesicPath {
    /// First index where the path backtracks or jumps, if any.
    pub fn defect(&self, g: &QuotientGraph) -> Option<usize> {
        self.darts.windows(2).position(|w| g.head(w[0]) != g.tail(w[1]) || w[1] == w[0] ^ 1).map(|i| i + 1)
    }
}

/// A closed non-backtracking loop, traversable in either direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    darts: Vec<u32>,
    /// The dart following each dart of the cycle, in its own direction.
    next: BTreeMap<u32, u32>,
}

impl Cycle {
    pub fn from_darts(g: &QuotientGraph, darts: Vec<u32>) -> Result<Self, FlowError> {
        let l = darts.len();
        if l == 0 {
            return Err(FlowError::BadCycle("empty".into()));
        }
        let mut next = BTreeMap::new();
        for i in 0..l {
            let (a, b) = (darts[i], darts[(i + 1) % l]);
            if g.head(a) != g.tail(b) {
                return Err(FlowError::BadCycle(alloc::format!("darts {a} and {b} do not meet")));
            }
            if b == a ^ 1 {
                return Err(FlowError::BadCycle(alloc::format!("backtracks at position {}", (i + 1) % l)));
            }
            if next.insert(a, b).is_some() || next.insert(b ^ 1, a ^ 1).is_some() {
                return Err(FlowError::BadCycle("a dart is used twice".into()));
            }
        }
        if next.len() != 2 * l {
            return Err(FlowError::BadCycle("a dart is used in both directions".into()));
        }
        Ok(Cycle { darts, next })
    }

    /// Ordered vertex names `v₀ v₁ … v_{L−1}`, closing back to `v₀`.
    pub fn parse(g: &QuotientGraph, text: &str) -> Result<Self, FlowError> {
        let vs: Vec<u32> = text
            .split_whitespace()
            .map(|t| g.vertex_id(t).ok_or_else(|| FlowError::BadCycle(alloc::format!("unknown vertex {t}"))))
            .collect::<Result<_, _>>()?;
        let l = vs.len();
        let darts = (0..l)
            .map(|i| {
                g.dart(vs[i], vs[(i + 1) % l])
                    .ok_or_else(|| FlowError::BadCycle(alloc::format!("no edge {} {}", g.name(vs[i]), g.name(vs[(i + 1) % l]))))
            })
            .collect::<Result<_, _>>()?;
        Cycle::from_darts(g, darts)
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn darts(&self) -> &[u32] {
        &self.darts
    }
}

/// Maximal runs `(t_n, p_n)` of a path along a lift of a cycle; `t_n` counts
/// darts from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenetrationRecord {
    pub runs: Vec<(u64, u64)>,
}

impl PenetrationRecord {
    pub fn total(&self) -> u64 {
        self.runs.iter().map(|r| r.1).sum()
    }

    /// Complete turns around a cycle of length `l` in each run.
    pub fn turns(&self, l: usize) -> Vec<u64> {
        self.runs.iter().map(|r| r.1 / l as u64).collect()
    }
}

/// Incremental run detector.
#[derive(Clone, Debug)]
pub struct RunTracker<'a> {
    cycle: &'a Cycle,
    t: u64,
    prev: Option<u32>,
    open: Option<(u64, u64)>,
}

impl<'a> RunTracker<'a> {
    pub fn new(cycle: &'a Cycle) -> Self {
        RunTracker { cycle, t: 0, prev: None, open: None }
    }

    /// Feeds one dart; returns a run that just closed.
    pub fn push(&mut self, d: u32) -> Option<(u64, u64)> {
        self.t += 1;
        let on = self.cycle.next.contains_key(&d);
        let cont = on && self.prev.is_some_and(|p| self.cycle.next.get(&p) == Some(&d));
        self.prev = Some(d);
        let mut closed = None;
        if cont {
            if let Some(r) = self.open.as_mut() {
                r.1 += 1;
            }
        } else {
            closed = self.open.take();
            if on {
                self.open = Some((self.t, 1));
            }
        }
        closed
    }

    pub fn finish(self) -> Option<(u64, u64)> {
        self.open
    }
}

pub fn penetration(path: &[u32], cycle: &Cycle) -> PenetrationRecord {
    let mut tr = RunTracker::new(cycle);
    let mut runs: Vec<(u64, u64)> = path.iter().filter_map(|&d| tr.push(d)).collect();
    runs.extend(tr.finish());
    PenetrationRecord { runs }
}

/// `sup p_n / log t_n` over runs entering in `[lo, hi]`; `None` if there are none.
pub fn loglaw_window(rec: &PenetrationRecord, lo: u64, hi: u64) -> Option<f64> {
    rec.runs
        .iter()
        .filter(|r| r.0 >= lo && r.0 <= hi && r.0 > 1)
        .map(|r| r.1 as f64 / log(r.0 as f64))
        .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

/// The window `[√T, T]`.
pub fn default_window(t: u64) -> (u64, u64) {
    (libm::ceil(libm::sqrt(t as f64)) as u64, t)
}

pub fn loglaw_statistic(rec: &PenetrationRecord, t: u64) -> Option<f64> {
    let (lo, hi) = default_window(t);
    loglaw_window(rec, lo, hi)
}

/// Rate function `g(t)` for the Khintchine events `p_n ≥ g(t_n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Rate {
    /// `κ log(1 + t)`.
    KappaLog(f64),
    Zero,
    /// Never satisfied.
    Infinite,
}

impl Rate {
    pub fn threshold(self, t: u64) -> f64 {
        match self {
            Rate::KappaLog(k) => k * log(1.0 + t as f64),
            Rate::Zero => 0.0,
            Rate::Infinite => f64::INFINITY,
        }
    }
}

/// Whether some run entering in `[T/2, T]` has `p_n ≥ g(t_n)`.
///
/// With `g ≡ 0` every visit counts, so a path meeting the cycle in the window
/// is an event.
pub fn khintchine_event(rec: &PenetrationRecord, g: Rate, t: u64) -> bool {
    rec.runs.iter().any(|r| r.0 >= t / 2 && r.0 <= t && r.1 as f64 >= g.threshold(r.0))
}

/// Fraction of `n_paths` sampled paths with an event (sequential; see the
/// runner for the parallel version, which gives identical results).
pub fn khintchine_event_rate(chain: &ParryChain, cycle: &Cycle, g: Rate, t: u64, n_paths: u64, seed: u64) -> f64 {
    let hits = (0..n_paths)
        .filter(|&i| {
            let path = sample_path(chain, t as usize, seed, i);
            khintchine_event(&penetration(&path.darts, cycle), g, t)
        })
        .count();
    hits as f64 / n_paths as f64
}

/// The designated ray from `x₀`: always the smallest admissible dart.
pub fn greedy_ray(g: &QuotientGraph, x0: u32, len: usize) -> Vec<u32> {
    let succ = g.successors();
    let first = (0..g.dart_count() as u32).find(|&d| g.tail(d) == x0).expect("vertex has darts");
    let mut ray = alloc::vec![first];
    while ray.len() < len {
        let last = *ray.last().unwrap();
        ray.push(*succ[last as usize].iter().min().expect("degree ≥ 3"));
    }
    ray
}

/// Closest-approach statistic for a vertex target: at each visit to `x₀` at
/// time `t` (a dart leaving `x₀`), `a(t)` is the number of steps the path
/// follows the designated ray from there. Returns `sup a(t)/log t` over
/// visits with `t ∈ [lo, hi]`, and the number of visits seen.
///
/// This is the tree form of approximating a boundary point by the orbit of
/// the ray `ρ(+∞)`: the path passes through a lift of `x₀` and then stays
/// inside the visual ball around that lift's copy of the ray for `a(t)` steps.
pub fn closest_approach(g: &QuotientGraph, path: &[u32], x0: u32, lo: u64, hi: u64) -> (Option<f64>, u64) {
    let ray = greedy_ray(g, x0, 64);
    // The greedy ray is eventually periodic; extend it lazily by its rule.
    let succ = g.successors();
    let step = |k: usize, ray: &Vec<u32>| -> u32 {
        if k < ray.len() {
            ray[k]
        } else {
            let mut d = *ray.last().unwrap();
            for _ in ray.len()..=k {
                d = *succ[d as usize].iter().min().unwrap();
            }
            d
        }
    };
    let mut best: Option<f64> = None;
    let mut visits = 0;
    for (i, &d) in path.iter().enumerate() {
        let t = i as u64 + 1;
        if t > hi {
            break;
        }
        if g.tail(d) != x0 {
            continue;
        }
        visits += 1;
        if t < lo || t < 2 {
            continue;
        }
        let a = path[i..].iter().enumerate().take_while(|(k, &e)| step(*k, &ray) == e).count();
        let v = a as f64 / log(t as f64);
        best = Some(best.map_or(v, |b| b.max(v)));
    }
    (best, visits)
}
