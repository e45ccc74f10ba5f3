//! Front tracking: fronts move at constant speed and every collision of two
//! neighbours is resolved by the interaction solvers.

pub mod init;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::admissibility::{AdmissibilityReport, PhasePair};
use crate::data::{InitialData, PhaseLayout};
use crate::error::{Error, Result};
use crate::front::{Front, FrontKind, Region};
use crate::functionals::{compute_snapshot, monitor_interaction, FunctionalSetup, FunctionalSnapshot, Parameters};
use crate::interaction::{
    c_o, interact_composite_accurate, interact_composite_simplified, interact_cross_family, interact_same_family,
    InteractionOutcome, Outgoing, SolverUsed,
};
use crate::riemann::CompositeWave;
use crate::waves::{apply, ACoefficients, CurveKind, Family, State};

pub use init::{approximate_initial_data, split_rarefaction, InitialApprox, PlacedFront, SampledData};

/// Two events closer than this are treated as simultaneous.
pub const TIE_WINDOW: f64 = 1e-13;
/// Relative size of the speed perturbation used to separate ties.
pub const PERTURBATION: f64 = 1e-10;

/// What to do when a monitor fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strictness {
    /// Record the breach and keep going.
    Warn,
    /// Stop at the first breach.
    Fail,
}

/// Fixed ingredients of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub coeffs: ACoefficients,
    pub layout: PhaseLayout,
    /// `sigma` and `rho` are the values used by the run.
    pub params: Parameters,
    pub merge_left: bool,
}

impl Scheme {
    /// Scheme with the parameters picked by the admissibility check and the
    /// rarefaction mesh `sigma`.
    pub fn from_report(report: &AdmissibilityReport, coeffs: ACoefficients, layout: PhaseLayout, sigma: f64) -> Result<Scheme> {
        let mut params = report
            .parameters
            .ok_or_else(|| Error::Inadmissible(format!("weighted variation {} vs threshold {}", report.weighted_tv, report.k_threshold)))?;
        params.sigma = sigma;
        Ok(Scheme {
            coeffs,
            layout,
            params,
            merge_left: report.merge_left,
        })
    }

    pub fn pair(&self) -> PhasePair {
        PhasePair::from_coeffs(&self.coeffs)
    }

    pub fn setup(&self) -> FunctionalSetup {
        let (eta, zeta) = self.pair().abs();
        FunctionalSetup {
            params: self.params,
            eta_abs: eta,
            zeta_abs: zeta,
            merge_left: self.merge_left,
        }
    }
}

/// Knobs of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub horizon: f64,
    pub snapshot_times: Vec<f64>,
    pub strictness: Strictness,
    pub max_events: usize,
    /// Outgoing waves weaker than this are discarded.
    pub drop_tol: f64,
    pub record_segments: bool,
    /// When set, the composite mass at the end must stay below this bound.
    pub composite_bound: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            horizon: 1.0,
            snapshot_times: Vec::new(),
            strictness: Strictness::Fail,
            max_events: 1_000_000,
            drop_tol: 1e-14,
            record_segments: true,
            composite_bound: None,
        }
    }
}

/// A failed monitor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breach {
    pub check: String,
    pub time: f64,
    pub x: f64,
    /// Index into the event log, if the breach happened at an event.
    pub event: Option<usize>,
    pub excess: f64,
    pub detail: String,
}

/// Short description of an incoming front.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontTag {
    pub id: u64,
    /// `1`, `3` or `C` for a composite.
    pub family: char,
    /// Signed strength, or the composite size.
    pub strength: f64,
    pub generation: u32,
}

impl FrontTag {
    fn of(f: &Front) -> FrontTag {
        match &f.kind {
            FrontKind::Wave { family, strength } => FrontTag {
                id: f.id,
                family: if *family == Family::One { '1' } else { '3' },
                strength: *strength,
                generation: f.generation,
            },
            FrontKind::Composite(c) => FrontTag {
                id: f.id,
                family: 'C',
                strength: c.size(),
                generation: f.generation,
            },
        }
    }
}

/// One entry of the event log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub x: f64,
    pub incoming: [FrontTag; 2],
    pub outgoing: Vec<u64>,
    pub solver: SolverUsed,
    pub h: Option<u32>,
    pub delta_f: f64,
    pub delta_f_h: f64,
    pub delta_f_h1: f64,
    /// `Σ_{ℓ<h} ΔF_ℓ`.
    pub delta_f_lower: f64,
    pub transmitted: f64,
    pub reflected: f64,
    pub monitors_ok: bool,
}

/// Life of a front between two changes, for quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub id: u64,
    pub x0: f64,
    pub t0: f64,
    pub t1: f64,
    pub speed: f64,
    pub left: State,
    pub right: State,
    pub composite: bool,
}

impl Segment {
    pub fn position(&self, t: f64) -> f64 {
        self.x0 + self.speed * (t - self.t0)
    }
}

/// A front as seen in a solution slice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceFront {
    pub id: u64,
    pub x: f64,
    pub kind: FrontKind,
    pub generation: u32,
    pub region: Region,
}

/// The piecewise-constant solution at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Slice {
    pub t: f64,
    pub fronts: Vec<SliceFront>,
    /// `states[i]` lies left of `fronts[i]`; one more entry than `fronts`.
    pub states: Vec<State>,
    pub functionals: FunctionalSnapshot,
}

impl Slice {
    pub fn state_at(&self, x: f64) -> State {
        self.states[self.fronts.partition_point(|f| f.x <= x)]
    }

    /// `TV(log p)` counting every stationary component of a composite as
    /// its own jump.
    pub fn tv_log_p(&self) -> f64 {
        let mut tv = 0.0;
        for (i, f) in self.fronts.iter().enumerate() {
            let (l, r) = (self.states[i], self.states[i + 1]);
            match &f.kind {
                FrontKind::Composite(c) => {
                    let mid = apply(&l, Family::One, CurveKind::Integral, c.d1);
                    tv += (mid.p().ln() - l.p().ln()).abs() + (r.p().ln() - mid.p().ln()).abs();
                }
                FrontKind::Wave { .. } => tv += (r.p().ln() - l.p().ln()).abs(),
            }
        }
        tv
    }

    /// `TV(log p)` treating each front as a single jump.
    pub fn tv_log_p_jumps(&self) -> f64 {
        self.states.windows(2).map(|w| (w[1].p().ln() - w[0].p().ln()).abs()).sum()
    }

    /// `Σ|δ|` over moving fronts plus the composite mass.
    pub fn wave_mass(&self) -> f64 {
        self.fronts
            .iter()
            .map(|f| match &f.kind {
                FrontKind::Wave { strength, .. } => strength.abs(),
                FrontKind::Composite(c) => c.size(),
            })
            .sum()
    }

    pub fn composite_mass(&self) -> f64 {
        self.fronts.iter().filter_map(|f| f.kind_composite()).map(CompositeWave::size).sum()
    }
}

impl SliceFront {
    fn kind_composite(&self) -> Option<&CompositeWave> {
        match &self.kind {
            FrontKind::Composite(c) => Some(c),
            FrontKind::Wave { .. } => None,
        }
    }
}

/// Summary of the initial approximation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialSummary {
    pub fronts: usize,
    pub cells: usize,
    pub l1_error: f64,
    pub tv_log_p_exact: f64,
    pub tv_log_p_sampled: f64,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub nu: u32,
    pub params: Parameters,
    pub eta: f64,
    pub zeta: f64,
    pub horizon: f64,
    pub initial: InitialSummary,
    pub events: Vec<EventRecord>,
    pub slices: Vec<Slice>,
    pub segments: Vec<Segment>,
    pub breaches: Vec<Breach>,
    pub aborted: bool,
    /// `F(0)` and `F₁(0)`.
    pub f0: f64,
    pub f1_0: f64,
    /// Largest rarefaction and shock seen.
    pub max_rarefaction: f64,
    pub max_shock: f64,
    /// Simplified-solver hits per incident generation.
    pub simplified_hits: BTreeMap<u32, usize>,
    pub perturbations: usize,
    pub simultaneous_events: usize,
    pub composite_mass: f64,
    /// Layout, kept for residual checks.
    pub layout: PhaseLayout,
}

impl Trajectory {
    pub fn final_slice(&self) -> &Slice {
        self.slices.last().expect("a trajectory always holds the final slice")
    }

    pub fn clean(&self) -> bool {
        self.breaches.is_empty()
    }

    /// `Err(MonitorBreach)` describing the first breach, if any.
    pub fn ensure_clean(&self) -> Result<()> {
        match self.breaches.first() {
            None => Ok(()),
            Some(b) => Err(Error::MonitorBreach(format!(
                "{} at t = {}, x = {} (excess {:e}): {}",
                b.check, b.time, b.x, b.excess, b.detail
            ))),
        }
    }

    /// Number of simplified hits by waves of order below `k`.
    pub fn simplified_below(&self, k: u32) -> usize {
        self.simplified_hits.range(..k).map(|(_, n)| n).sum()
    }
}

#[derive(Debug, Clone)]
struct Node {
    front: Front,
    prev: Option<usize>,
    next: Option<usize>,
    alive: bool,
    rev: u32,
    left: State,
    right: State,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    time: f64,
    key: u64,
    l: usize,
    r: usize,
    rev_l: u32,
    rev_r: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Candidate {
    // Reversed so that the max-heap pops the earliest `(time, min id)`.
    fn cmp(&self, o: &Self) -> Ordering {
        o.time.total_cmp(&self.time).then(o.key.cmp(&self.key)).then(o.l.cmp(&self.l))
    }
}

fn unit_hash(id: u64) -> f64 {
    let x = (id as f64 + 1.0) * 0.618_033_988_749_894_8;
    0.5 + 0.5 * (x - x.floor())
}

/// Collision time of two neighbours, if they approach.
fn collision(l: &Front, r: &Front, now: f64) -> Option<f64> {
    if l.speed <= r.speed {
        return None;
    }
    let gap = (r.position(now) - l.position(now)).max(0.0);
    Some(now + gap / (l.speed - r.speed))
}

/// Event-driven evolution of one approximate solution.
pub struct Tracker {
    scheme: Scheme,
    setup: FunctionalSetup,
    opts: RunOptions,
    nodes: Vec<Node>,
    head: Option<usize>,
    queue: BinaryHeap<Candidate>,
    now: f64,
    slack: f64,
    f_running: f64,
    f_by_gen: BTreeMap<u32, f64>,
    traj: Trajectory,
    pending_snapshots: Vec<f64>,
}

impl Tracker {
    /// Places the initial fronts.
    pub fn new(scheme: Scheme, init: &InitialApprox, nu: u32, opts: RunOptions) -> Result<Tracker> {
        let setup = scheme.setup();
        let pair = scheme.pair();
        let mut nodes: Vec<Node> = Vec::with_capacity(init.fronts.len() * 4);
        for (i, p) in init.fronts.iter().enumerate() {
            if p.front.id as usize != i {
                return Err(Error::Structural("initial front ids must be 0, 1, 2, ...".into()));
            }
            nodes.push(Node {
                front: p.front.clone(),
                prev: i.checked_sub(1),
                next: if i + 1 < init.fronts.len() { Some(i + 1) } else { None },
                alive: true,
                rev: 0,
                left: p.left,
                right: p.right,
            });
        }
        let snap0 = compute_snapshot(nodes.iter().map(|n| &n.front), &setup);
        let f0 = snap0.f_total;
        let f1_0 = snap0.f_by_generation.get(&1).copied().unwrap_or(0.0);
        let mut pending: Vec<f64> = opts
            .snapshot_times
            .iter()
            .copied()
            .filter(|&t| t >= 0.0 && t < opts.horizon)
            .collect();
        pending.push(opts.horizon);
        pending.sort_by(|a, b| b.total_cmp(a));
        pending.dedup();
        let traj = Trajectory {
            nu,
            params: scheme.params,
            eta: pair.eta,
            zeta: pair.zeta,
            horizon: opts.horizon,
            initial: InitialSummary {
                fronts: init.fronts.len(),
                cells: init.sampled.states.len(),
                l1_error: init.l1_error,
                tv_log_p_exact: init.tv_log_p_exact,
                tv_log_p_sampled: init.tv_log_p_sampled,
            },
            events: Vec::new(),
            slices: Vec::new(),
            segments: Vec::new(),
            breaches: Vec::new(),
            aborted: false,
            f0,
            f1_0,
            max_rarefaction: 0.0,
            max_shock: 0.0,
            simplified_hits: BTreeMap::new(),
            perturbations: 0,
            simultaneous_events: 0,
            composite_mass: 0.0,
            layout: scheme.layout,
        };
        let mut t = Tracker {
            slack: 1e-9 * f0 + 1e-15,
            f_running: f0,
            f_by_gen: snap0.f_by_generation.clone(),
            head: if nodes.is_empty() { None } else { Some(0) },
            nodes,
            queue: BinaryHeap::new(),
            now: 0.0,
            scheme,
            setup,
            opts,
            traj,
            pending_snapshots: pending,
        };
        for i in 0..t.nodes.len() {
            let f = t.nodes[i].front.clone();
            t.check_front(&f, None);
        }
        let mut i = t.head;
        while let Some(a) = i {
            t.schedule(t.nodes[a].prev, Some(a));
            i = t.nodes[a].next;
        }
        Ok(t)
    }

    fn schedule(&mut self, l: Option<usize>, r: Option<usize>) {
        let (Some(l), Some(r)) = (l, r) else { return };
        let (fl, fr) = (&self.nodes[l].front, &self.nodes[r].front);
        if let Some(time) = collision(fl, fr, self.now) {
            self.queue.push(Candidate {
                time,
                key: fl.id.min(fr.id),
                l,
                r,
                rev_l: self.nodes[l].rev,
                rev_r: self.nodes[r].rev,
            });
        }
    }

    fn valid(&self, c: &Candidate) -> bool {
        let (nl, nr) = (&self.nodes[c.l], &self.nodes[c.r]);
        nl.alive && nr.alive && nl.next == Some(c.r) && nl.rev == c.rev_l && nr.rev == c.rev_r
    }

    fn breach(&mut self, check: &str, x: f64, event: Option<usize>, excess: f64, detail: String) {
        self.traj.breaches.push(Breach {
            check: check.to_string(),
            time: self.now,
            x,
            event,
            excess,
            detail,
        });
    }

    fn check_front(&mut self, f: &Front, event: Option<usize>) {
        let Some((family, eps)) = f.wave() else { return };
        let x = f.position(self.now);
        let p = &self.scheme.params;
        let (eta, zeta) = (self.setup.eta_abs, self.setup.zeta_abs);
        if eps > 0.0 {
            self.traj.max_rarefaction = self.traj.max_rarefaction.max(eps);
            let cap = p.sigma * (1.0 + 0.5 * eta.max(zeta));
            if !(eps < cap) {
                self.breach("rarefaction_size", x, event, eps - cap, format!("front {} strength {eps}", f.id));
            } else if !(eps < 2.0 * p.sigma) {
                self.breach("rarefaction_2sigma", x, event, eps - 2.0 * p.sigma, format!("front {}", f.id));
            }
        } else {
            self.traj.max_shock = self.traj.max_shock.max(-eps);
            if -eps > p.m_o {
                self.breach("shock_size", x, event, -eps - p.m_o, format!("front {} strength {eps}", f.id));
            }
        }
        let ok = match family {
            Family::One => f.speed < 0.0,
            Family::Three => f.speed > 0.0,
        };
        if !ok {
            self.breach("speed_sign", x, event, f.speed.abs(), format!("front {} family {family:?}", f.id));
        }
    }

    fn stop_requested(&self) -> bool {
        self.opts.strictness == Strictness::Fail && !self.traj.breaches.is_empty()
    }

    /// Runs to the horizon and returns the trajectory.
    pub fn run(mut self) -> Result<Trajectory> {
        while !self.stop_requested() {
            let Some(c) = self.queue.pop() else { break };
            if !self.valid(&c) {
                continue;
            }
            if c.time > self.opts.horizon {
                break;
            }
            self.separate_ties(&c);
            self.emit_snapshots_before(c.time);
            let prev_time = self.traj.events.last().map(|e| e.time);
            if prev_time.map_or(false, |p| c.time <= p) {
                self.traj.simultaneous_events += 1;
            }
            self.now = c.time.max(self.now);
            if self.traj.events.len() >= self.opts.max_events {
                self.breach("event_cap", 0.0, None, self.traj.events.len() as f64, format!("cap {}", self.opts.max_events));
                break;
            }
            self.process(c.l, c.r)?;
        }
        if !self.traj.aborted {
            self.traj.aborted = self.stop_requested();
        }
        let end = if self.traj.aborted { self.now } else { self.opts.horizon };
        self.emit_snapshots_before(f64::INFINITY.min(end + f64::MIN_POSITIVE));
        if self.traj.slices.last().map_or(true, |s| s.t < end) {
            let s = self.slice(end);
            self.traj.slices.push(s);
        }
        self.finish(end)
    }

    fn finish(mut self, end: f64) -> Result<Trajectory> {
        let slice = self.traj.slices.last().cloned().expect("final slice");
        self.traj.composite_mass = slice.composite_mass();
        if let Some(bound) = self.opts.composite_bound {
            if !(self.traj.composite_mass < bound) {
                let m = self.traj.composite_mass;
                self.breach("composite_mass", 0.0, None, m - bound, format!("total composite mass {m} vs bound {bound}"));
            }
        }
        if self.opts.record_segments {
            let mut i = self.head;
            while let Some(a) = i {
                let n = &self.nodes[a];
                let seg = Segment {
                    id: n.front.id,
                    x0: n.front.x0,
                    t0: n.front.t0,
                    t1: end,
                    speed: n.front.speed,
                    left: n.left,
                    right: n.right,
                    composite: n.front.is_composite(),
                };
                self.traj.segments.push(seg);
                i = n.next;
            }
        }
        Ok(self.traj)
    }

    fn emit_snapshots_before(&mut self, t: f64) {
        while let Some(&ts) = self.pending_snapshots.last() {
            if ts < t {
                self.pending_snapshots.pop();
                let s = self.slice(ts);
                self.check_slice(&s);
                self.traj.slices.push(s);
            } else {
                break;
            }
        }
    }

    fn slice(&self, t: f64) -> Slice {
        let mut fronts = Vec::new();
        let mut states = Vec::new();
        let mut i = self.head;
        let mut last_right = None;
        while let Some(a) = i {
            let n = &self.nodes[a];
            states.push(n.left);
            fronts.push(SliceFront {
                id: n.front.id,
                x: n.front.position(t),
                kind: n.front.kind.clone(),
                generation: n.front.generation,
                region: n.front.region,
            });
            last_right = Some(n.right);
            i = n.next;
        }
        match last_right {
            Some(r) => states.push(r),
            None => states.push(State {
                v: f64::NAN,
                u: f64::NAN,
                lambda: f64::NAN,
                a: f64::NAN,
            }),
        }
        let functionals = compute_snapshot(self.alive_fronts(), &self.setup);
        Slice {
            t,
            fronts,
            states,
            functionals,
        }
    }

    fn alive_fronts(&self) -> impl Iterator<Item = &Front> {
        let mut i = self.head;
        std::iter::from_fn(move || {
            let a = i?;
            i = self.nodes[a].next;
            Some(&self.nodes[a].front)
        })
    }

    /// Phase field must equal the initial layout at every gap.
    fn check_slice(&mut self, s: &Slice) {
        let layout = self.scheme.layout;
        for (i, st) in s.states.iter().enumerate() {
            if st.lambda.is_nan() {
                continue;
            }
            let lo = if i == 0 { f64::NEG_INFINITY } else { s.fronts[i - 1].x };
            let hi = s.fronts.get(i).map_or(f64::INFINITY, |f| f.x);
            let probe = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            };
            if hi > lo && st.lambda != layout.lambda_at(probe) {
                let expected = layout.lambda_at(probe);
                self.breach("lambda_constant", probe, None, (st.lambda - expected).abs(), format!("slice t = {}", s.t));
            }
        }
        for f in &s.fronts {
            if f.kind_composite().is_some() && f.x != layout.a && f.x != layout.b {
                self.breach("composite_position", f.x, None, 0.0, format!("composite {} moved", f.id));
            }
        }
    }

    /// Perturbs fronts involved in other candidates tied with `chosen`.
    fn separate_ties(&mut self, chosen: &Candidate) {
        let mut tied = Vec::new();
        while let Some(c) = self.queue.peek().copied() {
            if c.time > chosen.time + TIE_WINDOW {
                break;
            }
            self.queue.pop();
            if self.valid(&c) {
                tied.push(c);
            }
        }
        let now = chosen.time;
        for c in tied {
            let pick = [(c.r, 1.0), (c.l, -1.0)]
                .into_iter()
                .find(|&(i, _)| i != chosen.l && i != chosen.r && !self.nodes[i].front.is_composite() && self.nodes[i].front.t0 < now);
            match pick {
                Some((i, dir)) => {
                    let n = &mut self.nodes[i];
                    let s = n.front.speed;
                    n.front.speed = s + dir * PERTURBATION * s.abs() * unit_hash(n.front.id);
                    n.rev += 1;
                    self.traj.perturbations += 1;
                    let (p, q) = (n.prev, n.next);
                    self.schedule(p, Some(i));
                    self.schedule(Some(i), q);
                }
                None => self.queue.push(c),
            }
        }
    }

    fn close_segment(&mut self, i: usize, t1: f64) {
        if !self.opts.record_segments {
            return;
        }
        let n = &self.nodes[i];
        self.traj.segments.push(Segment {
            id: n.front.id,
            x0: n.front.x0,
            t0: n.front.t0,
            t1,
            speed: n.front.speed,
            left: n.left,
            right: n.right,
            composite: n.front.is_composite(),
        });
    }

    fn process(&mut self, l: usize, r: usize) -> Result<()> {
        let now = self.now;
        let (fl, fr) = (self.nodes[l].front.clone(), self.nodes[r].front.clone());
        let left = self.nodes[l].left;
        let right = self.nodes[r].right;
        let rho = self.scheme.params.rho;
        let context = |e: Error| match e {
            Error::Numerical { what, residual } => Error::Numerical {
                what: format!("{what} (event at t = {now}, fronts {} and {})", fl.id, fr.id),
                residual,
            },
            other => other,
        };
        let (x, outcome, h, inc_gen, transmitted_family): (f64, InteractionOutcome, Option<u32>, u32, Option<Family>) =
            match (&fl.kind, &fr.kind) {
                (FrontKind::Wave { family: Family::Three, strength: a }, FrontKind::Wave { family: Family::One, strength: b }) => {
                    let x = 0.5 * (fl.position(now) + fr.position(now));
                    (x, interact_cross_family(*b, *a, &left), None, 0, None)
                }
                (FrontKind::Wave { family: f1, strength: a }, FrontKind::Wave { family: f2, strength: b }) if f1 == f2 => {
                    let x = 0.5 * (fl.position(now) + fr.position(now));
                    let out = interact_same_family(*a, *b, *f1, &left).map_err(context)?;
                    (x, out, Some(fl.generation.max(fr.generation)), 0, Some(*f1))
                }
                (FrontKind::Wave { family: Family::Three, strength: a }, FrontKind::Composite(c)) => {
                    let out = if a.abs() >= rho {
                        interact_composite_accurate(c, Family::Three, *a, &left, &right, rho)
                    } else {
                        interact_composite_simplified(c, Family::Three, *a, &left, &right, rho)
                    }
                    .map_err(context)?;
                    (c.position, out, Some(fl.generation), fl.generation, Some(Family::Three))
                }
                (FrontKind::Composite(c), FrontKind::Wave { family: Family::One, strength: b }) => {
                    let out = if b.abs() >= rho {
                        interact_composite_accurate(c, Family::One, *b, &left, &right, rho)
                    } else {
                        interact_composite_simplified(c, Family::One, *b, &left, &right, rho)
                    }
                    .map_err(context)?;
                    (c.position, out, Some(fr.generation), fr.generation, Some(Family::One))
                }
                _ => {
                    return Err(Error::Structural(format!(
                        "fronts {} and {} cannot collide ({:?} vs {:?})",
                        fl.id, fr.id, fl.kind, fr.kind
                    )))
                }
            };

        if outcome.solver_used == SolverUsed::Simplified {
            *self.traj.simplified_hits.entry(inc_gen).or_insert(0) += 1;
        }

        // Orders of outgoing waves.
        let gen_of = |family: Family| -> u32 {
            match outcome.solver_used {
                SolverUsed::CrossFamily => {
                    if family == Family::One {
                        fr.generation
                    } else {
                        fl.generation
                    }
                }
                SolverUsed::SameFamily => {
                    if Some(family) == transmitted_family {
                        fl.generation.min(fr.generation)
                    } else {
                        fl.generation.max(fr.generation) + 1
                    }
                }
                SolverUsed::Accurate | SolverUsed::Simplified => {
                    if Some(family) == transmitted_family {
                        inc_gen
                    } else {
                        inc_gen + 1
                    }
                }
            }
        };

        // Build outgoing fronts with consistent states.
        let mut states = outcome.states.clone();
        let last = states.len() - 1;
        states[0] = left;
        states[last] = right;
        let mut new_fronts: Vec<(Front, State, State)> = Vec::new();
        let mut cur_left = left;
        let composite_id = if fl.is_composite() {
            Some(fl.id)
        } else if fr.is_composite() {
            Some(fr.id)
        } else {
            None
        };
        let sigma = self.scheme.params.sigma;
        for (k, o) in outcome.outgoing.iter().enumerate() {
            let st_right = states[k + 1];
            match o {
                Outgoing::Composite(c) => {
                    let mut c = c.clone();
                    if outcome.solver_used == SolverUsed::Simplified && outcome.reflected_strength != 0.0 {
                        let g = inc_gen + 1;
                        *c.absorbed.entry(g).or_insert(0.0) += outcome.reflected_strength.abs();
                        if transmitted_family == Some(Family::Three) {
                            c.gen1 = g;
                        } else {
                            c.gen3 = g;
                        }
                    }
                    let id = composite_id.expect("composite outcome without composite");
                    let front = Front {
                        id,
                        kind: FrontKind::Composite(c),
                        x0: x,
                        t0: now,
                        speed: 0.0,
                        generation: 1,
                        birth_time: now,
                        region: Region::M,
                    };
                    new_fronts.push((front, cur_left, st_right));
                    cur_left = st_right;
                }
                Outgoing::Moving(p) => {
                    if p.strength.abs() < self.opts.drop_tol {
                        continue;
                    }
                    let family = init::proto_family(p);
                    let generation = gen_of(family);
                    let reflected = Some(family) != transmitted_family && transmitted_family.is_some();
                    let mut proto = *p;
                    proto.left = cur_left;
                    proto.right = st_right;
                    let pieces = if reflected { split_rarefaction(&proto, sigma) } else { vec![proto] };
                    for q in pieces {
                        let front = Front {
                            id: 0,
                            kind: FrontKind::Wave { family, strength: q.strength },
                            x0: x,
                            t0: now,
                            speed: q.speed,
                            generation,
                            birth_time: now,
                            region: Region::of(x, q.speed, self.scheme.layout.a, self.scheme.layout.b),
                        };
                        new_fronts.push((front, q.left, q.right));
                    }
                    cur_left = st_right;
                }
            }
        }
        if let Some(last) = new_fronts.last_mut() {
            last.2 = right;
        }

        // Monitors on the functionals.
        let before = compute_snapshot([&fl, &fr], &self.setup);
        let after = compute_snapshot(new_fronts.iter().map(|(f, _, _)| f), &self.setup);
        let report = monitor_interaction(&before, &after, h, self.scheme.params.mu, self.slack);

        // Splice into the list.
        let prev = self.nodes[l].prev;
        let next = self.nodes[r].next;
        self.close_segment(l, now);
        self.close_segment(r, now);
        self.nodes[l].alive = false;
        self.nodes[r].alive = false;
        let mut ids = Vec::with_capacity(new_fronts.len());
        let mut last_idx = prev;
        for (mut front, ls, rs) in new_fronts {
            let idx = if Some(front.id) == composite_id && front.is_composite() {
                front.id as usize
            } else {
                let idx = self.nodes.len();
                front.id = idx as u64;
                self.nodes.push(Node {
                    front: front.clone(),
                    prev: None,
                    next: None,
                    alive: true,
                    rev: 0,
                    left: ls,
                    right: rs,
                });
                idx
            };
            let n = &mut self.nodes[idx];
            n.front = front;
            n.alive = true;
            n.rev += 1;
            n.left = ls;
            n.right = rs;
            n.prev = last_idx;
            n.next = None;
            match last_idx {
                Some(p) => self.nodes[p].next = Some(idx),
                None => self.head = Some(idx),
            }
            last_idx = Some(idx);
            ids.push(idx as u64);
        }
        match last_idx {
            Some(p) => self.nodes[p].next = next,
            None => self.head = next,
        }
        if let Some(nx) = next {
            self.nodes[nx].prev = last_idx;
        }
        if ids.is_empty() {
            // Every outgoing wave vanished: glue the neighbours.
            if let Some(nx) = next {
                self.nodes[nx].left = left;
            }
        }

        // Event record and monitors.
        let ev_index = self.traj.events.len();
        let hh = h.unwrap_or(0);
        let lower: f64 = report.delta_f_by_generation.range(..hh.max(1)).map(|(_, v)| v).sum();
        self.traj.events.push(EventRecord {
            time: now,
            x,
            incoming: [FrontTag::of(&fl), FrontTag::of(&fr)],
            outgoing: ids.clone(),
            solver: outcome.solver_used,
            h,
            delta_f: report.delta_f,
            delta_f_h: report.delta(hh),
            delta_f_h1: report.delta(hh + 1),
            delta_f_lower: if h.is_some() { lower } else { 0.0 },
            transmitted: outcome.transmitted_strength,
            reflected: outcome.reflected_strength,
            monitors_ok: report.passed(),
        });
        for c in report.failures() {
            self.breach(c.name, x, Some(ev_index), c.excess, format!("fronts {} and {}", fl.id, fr.id));
        }
        for &id in &ids {
            let f = self.nodes[id as usize].front.clone();
            self.check_front(&f, Some(ev_index));
        }
        self.check_order(prev, next, x, ev_index);

        self.f_running += report.delta_f;
        for (&k, &d) in &report.delta_f_by_generation {
            *self.f_by_gen.entry(k).or_insert(0.0) += d;
        }
        self.check_decay(x, ev_index);

        // New neighbour pairs.
        let mut a = prev;
        let mut b = match prev {
            Some(p) => self.nodes[p].next,
            None => self.head,
        };
        loop {
            self.schedule(a, b);
            if b == next || b.is_none() {
                break;
            }
            a = b;
            b = b.and_then(|i| self.nodes[i].next);
        }
        Ok(())
    }

    fn check_order(&mut self, prev: Option<usize>, next: Option<usize>, x: f64, ev: usize) {
        let now = self.now;
        let tol = 1e-12 * (1.0 + x.abs());
        if let Some(p) = prev {
            let xp = self.nodes[p].front.position(now);
            if xp > x + tol {
                self.breach("front_order", x, Some(ev), xp - x, format!("left neighbour {} at {xp}", p));
            }
        }
        if let Some(n) = next {
            let xn = self.nodes[n].front.position(now);
            if xn < x - tol {
                self.breach("front_order", x, Some(ev), x - xn, format!("right neighbour {} at {xn}", n));
            }
        }
    }

    fn check_decay(&mut self, x: f64, ev: usize) {
        let mu = self.scheme.params.mu;
        let f1_0 = self.traj.f1_0;
        let mut tail = 0.0;
        let mut worst: Option<(u32, f64)> = None;
        for (&k, &v) in self.f_by_gen.iter().rev() {
            tail += v;
            let bound = mu.powi(k as i32 - 1) * f1_0 * (1.0 + 1e-9) + 1e-15;
            if tail > bound {
                let ex = tail - bound;
                if worst.map_or(true, |(_, e)| ex > e) {
                    worst = Some((k, ex));
                }
            }
        }
        if let Some((k, ex)) = worst {
            self.breach("generation_decay", x, Some(ev), ex, format!("tail of order {k}"));
        }
    }
}

/// Solves one approximate problem with fixed parameters.
pub fn run(data: &InitialData, nu: u32, scheme: Scheme, opts: RunOptions) -> Result<Trajectory> {
    let init = approximate_initial_data(data, &scheme.coeffs, nu, scheme.params.sigma)?;
    Tracker::new(scheme, &init, nu, opts)?.run()
}

/// `σ_ν = σ₀ 2^{−ν}`.
pub fn sigma_nu(sigma0: f64, nu: u32) -> f64 {
    sigma0 * 0.5f64.powi(nu as i32)
}

/// Smallest `k` with `μ^{k−1} m ≤ 1/(2ν)`, and the largest `ρ` (capped by
/// `rho_cap`) with `C_o(ρ) (ρ/2)(|η|+|ζ|) n ≤ 1/(2ν)`, where `n` counts the
/// absorptions by waves of order below `k`.
pub fn choose_k_rho(nu: u32, m: f64, mu: f64, eta_zeta: f64, n: usize, rho_cap: f64) -> Result<(u32, f64)> {
    if !(mu < 1.0 && mu >= 0.0) {
        return Err(Error::Contract(format!("μ = {mu} must lie in [0, 1)")));
    }
    let target = 0.5 / nu as f64;
    let mut k = 1u32;
    while mu.powi(k as i32 - 1) * m > target {
        k += 1;
        if k > 100_000 {
            return Err(Error::numerical("choose_k_rho", mu));
        }
    }
    let load = |rho: f64| c_o(rho) * 0.5 * rho * eta_zeta * n as f64;
    let rho = if load(rho_cap) <= target {
        rho_cap
    } else {
        crate::roots::largest_true(|r| load(r) <= target, 0.0, rho_cap)
    };
    Ok((k, rho))
}

/// Outcome of [`run_consistent`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistentRun {
    pub trajectory: Trajectory,
    pub k: u32,
    pub rho: f64,
    pub passes: usize,
}

/// Repeats the run until `ρ_ν` agrees with the number of absorptions that
/// the run actually performed.
pub fn run_consistent(data: &InitialData, nu: u32, mut scheme: Scheme, opts: RunOptions, max_passes: usize) -> Result<ConsistentRun> {
    let (eta, zeta) = scheme.pair().abs();
    let rho_cap = scheme.params.rho;
    let p = scheme.params;
    let init = approximate_initial_data(data, &scheme.coeffs, nu, p.sigma)?;
    let mut n = init.fronts.len();
    let mut last = None;
    for pass in 1..=max_passes.max(1) {
        // F₁(0) only depends on the initial fronts, not on ρ.
        let setup = scheme.setup();
        let f1_0 = compute_snapshot(init.fronts.iter().map(|f| &f.front), &setup).f_total;
        let (k, rho) = choose_k_rho(nu, p.m_o.max(f1_0), p.mu, eta + zeta, n, rho_cap)?;
        scheme.params.rho = rho;
        let mut o = opts.clone();
        o.composite_bound = Some(1.0 / nu as f64);
        let traj = Tracker::new(scheme.clone(), &init, nu, o)?.run()?;
        let used = traj.simplified_below(k);
        let consistent = used <= n;
        last = Some(ConsistentRun {
            trajectory: traj,
            k,
            rho,
            passes: pass,
        });
        if consistent {
            break;
        }
        n = used.max(2 * n);
    }
    Ok(last.expect("at least one pass"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::check_admissible;
    use crate::data::Profile;

    fn layout(a: f64, b: f64) -> PhaseLayout {
        PhaseLayout {
            lambda_l: 0.2,
            lambda_m: 0.5,
            lambda_r: 0.3,
            a,
            b,
        }
    }

    fn prepare(data: &InitialData, coeffs: ACoefficients, nu: u32) -> Scheme {
        let rep = check_admissible(data, &coeffs).unwrap();
        assert!(rep.admissible, "{rep:?}");
        Scheme::from_report(&rep, coeffs, data.phases, sigma_nu(0.1, nu)).unwrap()
    }

    fn jumpy(n: usize) -> InitialData {
        let bps: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / n as f64 + 0.013).collect();
        let v: Vec<f64> = (0..=n).map(|i| 1.0 + 0.04 * ((i * 7 % 5) as f64 - 2.0)).collect();
        let u: Vec<f64> = (0..=n).map(|i| 0.03 * ((i * 3 % 4) as f64 - 1.5)).collect();
        InitialData {
            v: Profile::Piecewise {
                breakpoints: bps.clone(),
                values: v,
            },
            u: Profile::Piecewise { breakpoints: bps, values: u },
            phases: layout(-0.3, 0.4),
            v_lower: 0.5,
        }
    }

    #[test]
    fn constant_pressure_has_no_events() {
        let data = InitialData {
            v: Profile::Piecewise {
                breakpoints: vec![-1.0, 1.0],
                values: vec![1.44, 1.0, 1.21],
            },
            u: Profile::constant(0.0),
            phases: layout(-1.0, 1.0),
            v_lower: 0.5,
        };
        let coeffs = ACoefficients::new(1.2, 1.0, 1.1).unwrap();
        let t = run(&data, 2, prepare(&data, coeffs, 2), RunOptions::default()).unwrap();
        assert!(t.events.is_empty(), "{:?} {:?}", t.events, t.final_slice().fronts);
        assert!(t.clean());
        assert_eq!(t.final_slice().fronts.len(), 2);
    }

    #[test]
    fn collision_time_is_gap_over_closing_speed() {
        let mk = |x0: f64, speed: f64| Front {
            id: 0,
            kind: FrontKind::Wave {
                family: Family::One,
                strength: -0.1,
            },
            x0,
            t0: 0.0,
            speed,
            generation: 1,
            birth_time: 0.0,
            region: Region::L,
        };
        assert_eq!(collision(&mk(0.0, 1.0), &mk(3.0, -0.5), 0.0), Some(2.0));
        assert_eq!(collision(&mk(0.0, -1.0), &mk(3.0, 0.5), 0.0), None);
    }

    #[test]
    fn two_interface_run_is_clean_and_deterministic() {
        let data = jumpy(20);
        let coeffs = ACoefficients::new(1.2, 1.0, 1.1).unwrap();
        let opts = RunOptions {
            horizon: 2.0,
            snapshot_times: vec![0.5, 1.0, 1.5],
            ..RunOptions::default()
        };
        let a = run(&data, 2, prepare(&data, coeffs, 2), opts.clone()).unwrap();
        assert!(a.clean(), "{:?}", a.breaches.first());
        assert!(a.events.len() > 20);
        assert!(a.events.windows(2).all(|w| w[0].time <= w[1].time));
        assert_eq!(a.slices.len(), 4);
        let b = run(&data, 2, prepare(&data, coeffs, 2), opts).unwrap();
        assert_eq!(a.events, b.events);
    }

    #[test]
    fn phase_field_is_preserved() {
        let data = jumpy(12);
        let coeffs = ACoefficients::new(1.3, 1.0, 1.1).unwrap();
        let opts = RunOptions {
            horizon: 3.0,
            snapshot_times: vec![1.0, 2.0],
            ..RunOptions::default()
        };
        let t = run(&data, 1, prepare(&data, coeffs, 1), opts).unwrap();
        for s in &t.slices {
            for x in [-2.0, -0.31, 0.0, 0.39, 0.41, 3.0] {
                assert_eq!(s.state_at(x).lambda, data.phases.lambda_at(x));
            }
        }
    }

    #[test]
    fn choose_k_rho_examples() {
        assert_eq!(choose_k_rho(1, 1.0, 0.5, 0.3, 0, 0.2).unwrap(), (2, 0.2));
        let (k, _) = choose_k_rho(4, 1.0, 0.9, 0.3, 0, 0.2).unwrap();
        let expected = ((8.0f64).ln() / (1.0 / 0.9f64).ln()).ceil() as u32 + 1;
        assert_eq!(k, expected);
        let (_, rho) = choose_k_rho(4, 1.0, 0.5, 0.3, 1000, 0.2).unwrap();
        assert!(rho < 0.2);
        assert!(c_o(rho) * 0.5 * rho * 0.3 * 1000.0 <= 0.125 * (1.0 + 1e-9));
    }
}
