use super::EngineError;
use crate::automata::{successors, Amplitude, Config, Halt, QcfaMachine, Tape};
use crate::numerics::Prob;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use std::collections::{BTreeMap, HashMap, VecDeque};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum NodeKind {
    Halt(Halt),
    Marker,
    Inner,
}

/// Lazily expanded configuration graph of one machine on one tape. Exact
/// configurations are interned; dense (interval) ones never are, so a cycle
/// through a dense state shows up as unbounded growth rather than an
/// unsound merge.
pub(crate) struct ConfigGraph<'a> {
    pub machine: &'a QcfaMachine,
    pub tape: &'a Tape,
    precision: u32,
    cap: usize,
    /// Whether regions carry the expected-steps column.
    pub track_steps: bool,
    nodes: Vec<Config>,
    index: HashMap<Config, usize>,
    succ: Vec<Option<Vec<(usize, Prob)>>>,
}

impl<'a> ConfigGraph<'a> {
    pub fn new(machine: &'a QcfaMachine, tape: &'a Tape, precision: u32, cap: usize) -> Self {
        ConfigGraph { machine, tape, precision, cap, track_steps: true, nodes: Vec::new(), index: HashMap::new(), succ: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn intern(&mut self, c: Config) -> Result<usize, EngineError> {
        let dense = matches!(c.quantum, Amplitude::Dense { .. });
        if !dense {
            if let Some(&i) = self.index.get(&c) {
                return Ok(i);
            }
        }
        if self.nodes.len() >= self.cap {
            return Err(EngineError::NodeCap(self.cap));
        }
        let i = self.nodes.len();
        if !dense {
            self.index.insert(c.clone(), i);
        }
        self.nodes.push(c);
        self.succ.push(None);
        Ok(i)
    }

    pub fn config(&self, v: usize) -> &Config {
        &self.nodes[v]
    }

    pub fn kind(&self, v: usize) -> NodeKind {
        let s = self.nodes[v].classical;
        match self.machine.halting(s) {
            Some(h) => NodeKind::Halt(h),
            None if self.machine.is_round_start(s) => NodeKind::Marker,
            None => NodeKind::Inner,
        }
    }

    /// Successors of a non-halting node, computed on first use.
    pub fn successors(&mut self, v: usize) -> Result<&[(usize, Prob)], EngineError> {
        if self.succ[v].is_none() {
            let next = successors(&self.nodes[v], self.machine, self.tape, self.precision)?;
            let mut out: Vec<(usize, Prob)> = Vec::with_capacity(next.len());
            for (c, p) in next {
                let u = self.intern(c)?;
                match out.iter_mut().find(|(w, _)| *w == u) {
                    Some((_, q)) => *q = q.add(&p),
                    None => out.push((u, p)),
                }
            }
            self.succ[v] = Some(out);
        }
        Ok(self.succ[v].as_deref().expect("just filled"))
    }

    /// Expands every node reachable from `root`.
    pub fn explore_all(&mut self, root: usize) -> Result<(), EngineError> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            if seen.len() <= v {
                seen.resize(self.len(), false);
            }
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if matches!(self.kind(v), NodeKind::Halt(_)) {
                continue;
            }
            let next: Vec<usize> = self.successors(v)?.iter().map(|&(u, _)| u).collect();
            queue.extend(next);
        }
        Ok(())
    }

    pub fn expanded(&self, v: usize) -> Option<&[(usize, Prob)]> {
        self.succ[v].as_deref()
    }
}

/// Where a round can end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Exit {
    Accept,
    Marker(usize),
}

/// Absorption data for one round, started at `source`.
#[derive(Clone, Debug)]
pub(crate) struct RegionSolution {
    pub source_is_marker: bool,
    /// Absolute probability of rejecting before the round ends.
    pub reject: Prob,
    /// Absolute probability of each exit other than a return to `source`.
    pub exits: Vec<(Exit, Prob)>,
    /// Expected number of steps until the round ends.
    pub steps: Prob,
    /// Probability of leaving through `exits`, conditioned on not
    /// rejecting.
    pub p_advance: Prob,
    /// How the advancing mass splits over `exits` (fractions summing to 1).
    pub split: Vec<(Exit, Prob)>,
    /// The configuration every non-rejected path passes through, if any.
    pub frontier: Option<usize>,
    pub nodes: usize,
}

const REJECT: usize = 0;
const ACCEPT: usize = 1;
const STEPS: usize = 2;

fn pivot_error(g: &ConfigGraph<'_>, v: usize, p: &Prob) -> EngineError {
    if p.is_exact_zero() {
        EngineError::NeverHalts(format!("{:?} (closed cycle)", g.config(v).classical))
    } else {
        EngineError::Inconclusive(format!("pivot {} may vanish", p))
    }
}

/// Solves the round started at `source`: the chain runs until it halts or
/// reaches a restart configuration (including `source` itself).
pub(crate) fn solve_region(g: &mut ConfigGraph<'_>, source: usize) -> Result<RegionSolution, EngineError> {
    // breadth-first discovery of the non-sink part of the round
    let is_sink = |g: &ConfigGraph<'_>, v: usize| v != source && !matches!(g.kind(v), NodeKind::Inner);
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![source];
    local.insert(source, 0);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        if let NodeKind::Halt(h) = g.kind(v) {
            return Err(EngineError::Step(crate::automata::StepError::Halted(h)));
        }
        let next: Vec<usize> = g.successors(v)?.iter().map(|&(u, _)| u).collect();
        for u in next {
            if !is_sink(g, u) && u != source && !local.contains_key(&u) {
                local.insert(u, order.len());
                order.push(u);
            }
        }
    }
    let n = order.len();

    // sink columns: reject, accept, steps, then markers in discovery order
    let mut marker_col: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edges: Vec<Vec<(Target, Prob)>> = Vec::with_capacity(n);
    for &v in &order {
        let mut row = Vec::new();
        for (u, p) in g.expanded(v).expect("expanded during discovery") {
            let t = match g.kind(*u) {
                NodeKind::Halt(Halt::Reject) => Target::Sink(REJECT),
                NodeKind::Halt(Halt::Accept) => Target::Sink(ACCEPT),
                NodeKind::Marker => {
                    let next = 3 + marker_col.len();
                    Target::Sink(*marker_col.entry(*u).or_insert(next))
                }
                NodeKind::Inner => Target::Inner(local[u]),
            };
            row.push((t, p.clone()));
        }
        edges.push(row);
    }
    let ncols = 3 + marker_col.len();
    let unit_step = if g.track_steps { Prob::one() } else { Prob::zero() };

    let mut dg: DiGraph<(), ()> = DiGraph::with_capacity(n, n * 2);
    for _ in 0..n {
        dg.add_node(());
    }
    for (v, row) in edges.iter().enumerate() {
        for (t, _) in row {
            if let Target::Inner(u) = t {
                dg.add_edge(NodeIndex::new(v), NodeIndex::new(*u), ());
            }
        }
    }
    let sccs = tarjan_scc(&dg);

    let mut vals: Vec<Option<Vec<Prob>>> = vec![None; n];
    let mut can_reject = vec![false; n];
    let mut scc_of = vec![usize::MAX; n];
    for (k, scc) in sccs.iter().enumerate() {
        for ix in scc {
            scc_of[ix.index()] = k;
        }
    }

    for (k, scc) in sccs.iter().enumerate() {
        let mut members: Vec<usize> = scc.iter().map(|ix| ix.index()).collect();
        members.sort_unstable();

        let reject_here = members.iter().any(|&v| {
            edges[v].iter().any(|(t, _)| match t {
                Target::Sink(c) => *c == REJECT,
                Target::Inner(u) => scc_of[*u] != k && can_reject[*u],
            })
        });
        for &v in &members {
            can_reject[v] = reject_here;
        }

        // right-hand side from sinks and already-solved SCCs
        let rhs = |v: usize, vals: &Vec<Option<Vec<Prob>>>| -> Vec<Prob> {
            let mut r = vec![Prob::zero(); ncols];
            r[STEPS] = unit_step.clone();
            for (t, p) in &edges[v] {
                match t {
                    Target::Sink(c) => r[*c] = r[*c].add(p),
                    Target::Inner(u) if scc_of[*u] != k => {
                        let uv = vals[*u].as_ref().expect("solved earlier");
                        for c in 0..ncols {
                            if !uv[c].is_exact_zero() {
                                r[c] = r[c].add(&p.mul(&uv[c]));
                            }
                        }
                    }
                    Target::Inner(_) => {}
                }
            }
            r
        };

        let self_loop = edges[members[0]].iter().any(|(t, _)| *t == Target::Inner(members[0]));
        if members.len() == 1 && !self_loop {
            let v = members[0];
            vals[v] = Some(rhs(v, &vals));
            continue;
        }

        // (I - P) x = b restricted to the SCC, sparse Gaussian elimination
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let m = members.len();
        let mut rows: Vec<BTreeMap<usize, Prob>> = Vec::with_capacity(m);
        let mut b: Vec<Vec<Prob>> = Vec::with_capacity(m);
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (i, &v) in members.iter().enumerate() {
            let mut row: BTreeMap<usize, Prob> = BTreeMap::new();
            row.insert(i, Prob::one());
            for (t, p) in &edges[v] {
                if let Target::Inner(u) = t {
                    if let Some(&j) = pos.get(u) {
                        let e = row.entry(j).or_insert_with(Prob::zero);
                        *e = e.sub(p);
                    }
                }
            }
            for &j in row.keys() {
                if j != i {
                    col_rows[j].push(i);
                }
            }
            rows.push(row);
            b.push(rhs(v, &vals));
        }
        for i in 0..m {
            let pivot = rows[i].get(&i).cloned().unwrap_or_else(Prob::zero);
            if pivot.is_exact_zero() || !pivot.is_exact() && !pivot.certainly_positive() {
                return Err(pivot_error(g, order[members[i]], &pivot));
            }
            let below: Vec<usize> = col_rows[i].iter().copied().filter(|&j| j > i).collect();
            let pivot_row: Vec<(usize, Prob)> =
                rows[i].iter().filter(|(&c, _)| c > i).map(|(&c, p)| (c, p.clone())).collect();
            let pivot_b = b[i].clone();
            for j in below {
                let Some(a) = rows[j].remove(&i) else { continue };
                if a.is_exact_zero() {
                    continue;
                }
                let f = a.div(&pivot).ok_or_else(|| pivot_error(g, order[members[i]], &pivot))?;
                for (c, p) in &pivot_row {
                    let e = rows[j].entry(*c).or_insert_with(|| {
                        col_rows[*c].push(j);
                        Prob::zero()
                    });
                    *e = e.sub(&f.mul(p));
                }
                for c in 0..ncols {
                    if !pivot_b[c].is_exact_zero() {
                        b[j][c] = b[j][c].sub(&f.mul(&pivot_b[c]));
                    }
                }
            }
        }
        let mut x: Vec<Vec<Prob>> = vec![Vec::new(); m];
        for i in (0..m).rev() {
            let mut r = b[i].clone();
            for (&c, p) in rows[i].range(i + 1..) {
                for col in 0..ncols {
                    if !x[c][col].is_exact_zero() {
                        r[col] = r[col].sub(&p.mul(&x[c][col]));
                    }
                }
            }
            let pivot = &rows[i][&i];
            x[i] = r
                .into_iter()
                .map(|v| {
                    if pivot.is_exact_one() {
                        Ok(v)
                    } else {
                        v.div(pivot).ok_or_else(|| EngineError::Inconclusive("back substitution".into()))
                    }
                })
                .collect::<Result<_, _>>()?;
        }
        for (i, &v) in members.iter().enumerate() {
            let xi = std::mem::take(&mut x[i]);
            vals[v] = Some(xi.into_iter().map(|p| p.clamp_nonneg()).collect());
        }
    }

    let vs = vals[0].clone().expect("source solved");
    let source_is_marker = g.kind(source) == NodeKind::Marker;
    let source_col = marker_col.get(&source).copied();
    let exit_cols: Vec<(Exit, usize)> = std::iter::once((Exit::Accept, ACCEPT))
        .chain(marker_col.iter().filter(|(&z, _)| z != source).map(|(&z, &c)| (Exit::Marker(z), c)))
        .collect();
    let advance_of = |row: &[Prob]| exit_cols.iter().fold(Prob::zero(), |acc, &(_, c)| acc.add(&row[c]));

    let reject = vs[REJECT].clone();
    let restart = source_col.map(|c| vs[c].clone()).unwrap_or_else(Prob::zero);
    let exits: Vec<(Exit, Prob)> =
        exit_cols.iter().filter(|(_, c)| !vs[*c].is_exact_zero()).map(|&(e, c)| (e, vs[c].clone())).collect();

    // the unique configuration through which all non-rejected mass leaves
    // the reject-reachable part of the round
    let frontier = if !can_reject[0] {
        Some(0)
    } else {
        let mut targets: Vec<Target> = Vec::new();
        for v in 0..n {
            if !can_reject[v] {
                continue;
            }
            for (t, _) in &edges[v] {
                let safe = match t {
                    Target::Sink(c) => *c != REJECT,
                    Target::Inner(u) => !can_reject[*u],
                };
                if safe && !targets.contains(t) {
                    targets.push(*t);
                }
            }
        }
        match targets.as_slice() {
            [] => None,
            [Target::Inner(y)] => Some(*y),
            _ => None,
        }
    };
    let no_escape = can_reject[0] && frontier.is_none() && advance_of(&vs).is_exact_zero() && restart.is_exact_zero();

    let (p_advance, base) = match frontier {
        Some(y) => (advance_of(vals[y].as_ref().unwrap()), Some(y)),
        None if no_escape => (Prob::zero(), None),
        None => {
            let adv = advance_of(&vs);
            let p = if adv.is_exact_zero() {
                Prob::zero()
            } else {
                adv.div(&reject.one_minus())
                    .ok_or_else(|| EngineError::Inconclusive("1 - P_r may vanish".into()))?
                    .clamp_unit()
            };
            (p, Some(0))
        }
    };
    let mut split = Vec::new();
    if let Some(bi) = base {
        let row = vals[bi].as_ref().unwrap();
        let adv = advance_of(row);
        if !adv.is_exact_zero() {
            for &(e, c) in &exit_cols {
                if row[c].is_exact_zero() {
                    continue;
                }
                let f = if exit_cols.iter().filter(|(_, c2)| !row[*c2].is_exact_zero()).count() == 1 {
                    Prob::one()
                } else {
                    row[c].div(&adv).ok_or_else(|| EngineError::Inconclusive("split".into()))?.clamp_unit()
                };
                split.push((e, f));
            }
        }
    }

    Ok(RegionSolution {
        source_is_marker,
        reject,
        exits,
        steps: vs[STEPS].clone(),
        p_advance,
        split,
        frontier: frontier.map(|y| order[y]),
        nodes: n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Sink(usize),
    Inner(usize),
}
