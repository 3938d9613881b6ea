//! Depth-first search for a globally consistent layout assignment.
//!
//! The base scheme picks variables and values at random (from a seeded stream)
//! and backtracks chronologically. The enhanced scheme turns on three
//! independent improvements: most-constraining variable selection,
//! option-maximizing value ordering, and graph-based backjumping. Each can be
//! toggled on its own through [`SolverConfig`].

use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::LayoutMatrix;
use crate::network::ConstraintNetwork;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` instantiated twice")]
    DuplicateVariable(String),
    #[error("{layout} is not in the domain of `{var}`")]
    DomainError { var: String, layout: LayoutMatrix },
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
}

/// Default ceiling on the Cartesian product enumerated by [`brute_force`].
pub const BRUTE_FORCE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarOrder {
    /// Position in the variable list.
    Static,
    /// Seeded-random choice among uninstantiated variables.
    Random,
    /// Most constraint edges to uninstantiated variables; ties by smaller
    /// domain, then variable position.
    MostConstraining,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueOrder {
    Domain,
    /// Fresh seeded permutation every time a variable is instantiated.
    Random,
    /// Values leaving the most compatible options to uninstantiated neighbors
    /// first; ties keep domain order.
    OptionMaximizing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub var_order: VarOrder,
    pub val_order: ValueOrder,
    pub backjump: bool,
    pub seed: u64,
}

impl SolverConfig {
    pub fn base(seed: u64) -> Self {
        SolverConfig {
            var_order: VarOrder::Random,
            val_order: ValueOrder::Random,
            backjump: false,
            seed,
        }
    }

    pub fn enhanced(seed: u64) -> Self {
        SolverConfig {
            var_order: VarOrder::MostConstraining,
            val_order: ValueOrder::OptionMaximizing,
            backjump: true,
            seed,
        }
    }

    /// Static variable order, domain value order.
    pub fn chronological() -> Self {
        SolverConfig {
            var_order: VarOrder::Static,
            val_order: ValueOrder::Domain,
            backjump: false,
            seed: 0,
        }
    }
}

/// Variables instantiated so far, in instantiation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialInstantiation {
    entries: Vec<(String, LayoutMatrix)>,
}

impl PartialInstantiation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, var: impl Into<String>, layout: LayoutMatrix) {
        self.entries.push((var.into(), layout));
    }

    pub fn with(mut self, var: impl Into<String>, layout: LayoutMatrix) -> Self {
        self.push(var, layout);
        self
    }

    pub fn entries(&self) -> &[(String, LayoutMatrix)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn resolve(&self, net: &ConstraintNetwork) -> Result<Vec<(usize, usize)>, SolverError> {
        let mut seen = vec![false; net.len()];
        self.entries
            .iter()
            .map(|(name, layout)| {
                let var = net
                    .var_index(name)
                    .ok_or_else(|| SolverError::UnknownVariable(name.clone()))?;
                if std::mem::replace(&mut seen[var], true) {
                    return Err(SolverError::DuplicateVariable(name.clone()));
                }
                let val = net
                    .domain(var)
                    .iter()
                    .position(|l| l == layout)
                    .ok_or_else(|| SolverError::DomainError {
                        var: name.clone(),
                        layout: layout.clone(),
                    })?;
                Ok((var, val))
            })
            .collect()
    }
}

/// One layout per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(IndexMap<String, LayoutMatrix>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: impl Into<String>, layout: LayoutMatrix) {
        self.0.insert(var.into(), layout);
    }

    pub fn get(&self, var: &str) -> Option<&LayoutMatrix> {
        self.0.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &LayoutMatrix)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_partial(&self) -> PartialInstantiation {
        PartialInstantiation {
            entries: self.0.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }
}

impl FromIterator<(String, LayoutMatrix)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, LayoutMatrix)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    /// Value instantiations attempted, consistent or not.
    pub nodes_visited: u64,
    /// Backward steps of any length.
    pub backtracks: u64,
    /// Backward steps that skipped at least one instantiated variable.
    pub backjumps: u64,
    pub max_depth: usize,
    pub elapsed: Duration,
}

impl SolverStats {
    /// Counters only, for comparisons that must ignore wall-clock time.
    pub fn counters(&self) -> (u64, u64, u64, usize) {
        (self.nodes_visited, self.backtracks, self.backjumps, self.max_depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution {
        assignment: Assignment,
        stats: SolverStats,
    },
    Unsat {
        stats: SolverStats,
        /// Deepest consistent partial instantiation reached.
        deepest: PartialInstantiation,
    },
}

impl SolveOutcome {
    pub fn stats(&self) -> &SolverStats {
        match self {
            SolveOutcome::Solution { stats, .. } | SolveOutcome::Unsat { stats, .. } => stats,
        }
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        match self {
            SolveOutcome::Solution { assignment, .. } => Some(assignment),
            SolveOutcome::Unsat { .. } => None,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, SolveOutcome::Solution { .. })
    }
}

/// True iff every constrained pair among the instantiated variables is allowed.
pub fn is_consistent(net: &ConstraintNetwork, p: &PartialInstantiation) -> Result<bool, SolverError> {
    let resolved = p.resolve(net)?;
    for (x, &(i, a)) in resolved.iter().enumerate() {
        for &(j, b) in &resolved[x + 1..] {
            if !net.allows(i, &net.domain(i)[a], j, &net.domain(j)[b]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Index-based view of a network for the search loop.
struct Compiled {
    n: usize,
    dom: Vec<usize>,
    neighbors: Vec<Vec<usize>>,
    // tables[i * n + j][a * dom[j] + b]
    tables: Vec<Option<Vec<bool>>>,
}

impl Compiled {
    fn new(net: &ConstraintNetwork) -> Self {
        let n = net.len();
        let dom: Vec<usize> = (0..n).map(|i| net.domain(i).len()).collect();
        let mut tables = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j || net.constraint(i, j).is_none() {
                    continue;
                }
                let mut t = vec![false; dom[i] * dom[j]];
                for (a, la) in net.domain(i).iter().enumerate() {
                    for (b, lb) in net.domain(j).iter().enumerate() {
                        t[a * dom[j] + b] = net.allows(i, la, j, lb);
                    }
                }
                tables[i * n + j] = Some(t);
            }
        }
        let neighbors = (0..n).map(|i| net.neighbors(i)).collect();
        Compiled {
            n,
            dom,
            neighbors,
            tables,
        }
    }

    fn compatible(&self, i: usize, a: usize, j: usize, b: usize) -> bool {
        match &self.tables[i * self.n + j] {
            Some(t) => t[a * self.dom[j] + b],
            None => true,
        }
    }
}

/// Chooses the next variable to instantiate given which are already assigned.
fn pick_variable(c: &Compiled, assigned: &[Option<usize>], order: VarOrder, rng: &mut ChaCha8Rng) -> usize {
    let free = (0..c.n).filter(|&v| assigned[v].is_none());
    match order {
        VarOrder::Static => free.min().expect("a free variable"),
        VarOrder::Random => {
            let free: Vec<usize> = free.collect();
            free[rng.gen_range(0..free.len())]
        }
        VarOrder::MostConstraining => free
            .map(|v| {
                let degree = c.neighbors[v].iter().filter(|&&w| assigned[w].is_none()).count();
                (v, degree)
            })
            // max degree, then min domain, then min position
            .min_by_key(|&(v, degree)| (std::cmp::Reverse(degree), c.dom[v], v))
            .map(|(v, _)| v)
            .expect("a free variable"),
    }
}

fn order_values(
    c: &Compiled,
    assigned: &[Option<usize>],
    var: usize,
    order: ValueOrder,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut values: Vec<usize> = (0..c.dom[var]).collect();
    match order {
        ValueOrder::Domain => {}
        ValueOrder::Random => values.shuffle(rng),
        ValueOrder::OptionMaximizing => {
            let options = |a: usize| -> usize {
                c.neighbors[var]
                    .iter()
                    .filter(|&&w| assigned[w].is_none())
                    .map(|&w| (0..c.dom[w]).filter(|&b| c.compatible(var, a, w, b)).count())
                    .sum()
            };
            let scores: Vec<usize> = values.iter().map(|&a| options(a)).collect();
            values.sort_by_key(|&a| std::cmp::Reverse(scores[a]));
        }
    }
    values
}

fn assigned_from(net: &ConstraintNetwork, p: &PartialInstantiation) -> Result<Vec<Option<usize>>, SolverError> {
    let mut assigned = vec![None; net.len()];
    for (var, val) in p.resolve(net)? {
        assigned[var] = Some(val);
    }
    Ok(assigned)
}

/// The variable the search would instantiate next after `p`.
///
/// Random selection draws from a generator seeded with `config.seed`.
pub fn select_variable(
    net: &ConstraintNetwork,
    p: &PartialInstantiation,
    config: &SolverConfig,
) -> Result<Option<String>, SolverError> {
    let assigned = assigned_from(net, p)?;
    if assigned.iter().all(Option::is_some) {
        return Ok(None);
    }
    let c = Compiled::new(net);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let v = pick_variable(&c, &assigned, config.var_order, &mut rng);
    Ok(Some(net.variables()[v].clone()))
}

/// Domain values of `var` in the order the search would try them after `p`.
pub fn rank_values(
    net: &ConstraintNetwork,
    p: &PartialInstantiation,
    var: &str,
    config: &SolverConfig,
) -> Result<Vec<LayoutMatrix>, SolverError> {
    let assigned = assigned_from(net, p)?;
    let v = net
        .var_index(var)
        .ok_or_else(|| SolverError::UnknownVariable(var.to_string()))?;
    let c = Compiled::new(net);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(order_values(&c, &assigned, v, config.val_order, &mut rng)
        .into_iter()
        .map(|a| net.domain(v)[a].clone())
        .collect())
}

/// Position in `p` of the most recently instantiated variable sharing a
/// constraint with `deadend`, or `None` when no instantiated variable does
/// (the search then stops with no solution).
pub fn backjump_target(
    net: &ConstraintNetwork,
    p: &PartialInstantiation,
    deadend: &str,
) -> Result<Option<usize>, SolverError> {
    let d = net
        .var_index(deadend)
        .ok_or_else(|| SolverError::UnknownVariable(deadend.to_string()))?;
    let resolved = p.resolve(net)?;
    Ok(resolved
        .iter()
        .rposition(|&(v, _)| v != d && net.constraint(v, d).is_some()))
}

struct Frame {
    var: usize,
    order: Vec<usize>,
    next: usize,
    // induced conflict set: variables whose current values explain the
    // failures seen below this frame
    conflicts: Vec<bool>,
}

/// Runs the depth-first search described by `config`.
pub fn solve(net: &ConstraintNetwork, config: &SolverConfig) -> SolveOutcome {
    let start = Instant::now();
    let c = Compiled::new(net);
    let n = c.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = SolverStats::default();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut stack: Vec<Frame> = Vec::with_capacity(n);
    let mut deepest: Vec<(usize, usize)> = Vec::new();

    let snapshot = |stack: &[Frame], assigned: &[Option<usize>]| -> Vec<(usize, usize)> {
        stack
            .iter()
            .map(|f| (f.var, assigned[f.var].expect("frame is instantiated")))
            .collect()
    };

    'forward: loop {
        if stack.len() == n {
            stats.elapsed = start.elapsed();
            let assignment = (0..n)
                .map(|v| (net.variables()[v].clone(), net.domain(v)[assigned[v].expect("complete")].clone()))
                .collect();
            return SolveOutcome::Solution { assignment, stats };
        }
        let var = pick_variable(&c, &assigned, config.var_order, &mut rng);
        let order = order_values(&c, &assigned, var, config.val_order, &mut rng);
        stack.push(Frame {
            var,
            order,
            next: 0,
            conflicts: vec![false; n],
        });

        loop {
            let top = stack.last_mut().expect("non-empty stack");
            if let Some(&a) = top.order.get(top.next) {
                top.next += 1;
                stats.nodes_visited += 1;
                let x = top.var;
                let ok = c.neighbors[x]
                    .iter()
                    .all(|&w| assigned[w].is_none_or(|b| c.compatible(x, a, w, b)));
                if ok {
                    assigned[x] = Some(a);
                    stats.max_depth = stats.max_depth.max(stack.len());
                    if stack.len() > deepest.len() {
                        deepest = snapshot(&stack, &assigned);
                    }
                    continue 'forward;
                }
                continue;
            }

            // dead end: every value of the top variable is exhausted
            let dead = stack.pop().expect("non-empty stack");
            let target = if config.backjump {
                let mut conflicts = dead.conflicts;
                for &w in &c.neighbors[dead.var] {
                    if assigned[w].is_some() {
                        conflicts[w] = true;
                    }
                }
                stack
                    .iter()
                    .rposition(|f| conflicts[f.var])
                    .map(|t| (t, conflicts))
            } else {
                stack.len().checked_sub(1).map(|t| (t, Vec::new()))
            };
            let Some((t, conflicts)) = target else {
                stats.elapsed = start.elapsed();
                let deepest = PartialInstantiation {
                    entries: deepest
                        .iter()
                        .map(|&(v, a)| (net.variables()[v].clone(), net.domain(v)[a].clone()))
                        .collect(),
                };
                return SolveOutcome::Unsat { stats, deepest };
            };
            stats.backtracks += 1;
            if t + 1 < stack.len() {
                stats.backjumps += 1;
            }
            while stack.len() > t + 1 {
                let f = stack.pop().expect("above target");
                assigned[f.var] = None;
            }
            let culprit = stack.last_mut().expect("target frame");
            assigned[culprit.var] = None;
            if config.backjump {
                for (w, &hit) in conflicts.iter().enumerate() {
                    if hit && w != culprit.var {
                        culprit.conflicts[w] = true;
                    }
                }
            }
        }
    }
}

/// Every full consistent assignment, by plain Cartesian enumeration.
pub fn brute_force(net: &ConstraintNetwork, cap: u128) -> Result<Vec<Assignment>, SolverError> {
    let n = net.len();
    let size = (0..n).try_fold(1u128, |acc, v| acc.checked_mul(net.domain(v).len() as u128));
    let size = size.unwrap_or(u128::MAX);
    if size > cap {
        return Err(SolverError::CapExceeded { size, cap });
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    'odometer: loop {
        let ok = (0..n).all(|i| {
            (i + 1..n).all(|j| net.allows(i, &net.domain(i)[digits[i]], j, &net.domain(j)[digits[j]]))
        });
        if ok {
            out.push(
                (0..n)
                    .map(|v| (net.variables()[v].clone(), net.domain(v)[digits[v]].clone()))
                    .collect(),
            );
        }
        for v in (0..n).rev() {
            digits[v] += 1;
            if digits[v] < net.domain(v).len() {
                continue 'odometer;
            }
            digits[v] = 0;
        }
        break;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDoc {
    pub nodes: u64,
    pub backtracks: u64,
    pub backjumps: u64,
    pub max_depth: usize,
    pub elapsed_ms: u64,
}

impl From<&SolverStats> for StatsDoc {
    fn from(s: &SolverStats) -> Self {
        StatsDoc {
            nodes: s.nodes_visited,
            backtracks: s.backtracks,
            backjumps: s.backjumps,
            max_depth: s.max_depth,
            elapsed_ms: s.elapsed.as_millis() as u64,
        }
    }
}

/// JSON form of a solver (or heuristic) result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    pub status: String,
    pub assignment: Assignment,
    pub stats: StatsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deepest_partial: Option<Assignment>,
}

impl SolveReport {
    pub fn from_outcome(scheme: Option<&str>, outcome: &SolveOutcome) -> Self {
        let (status, assignment, deepest_partial) = match outcome {
            SolveOutcome::Solution { assignment, .. } => ("sat", assignment.clone(), None),
            SolveOutcome::Unsat { deepest, .. } => (
                "unsat",
                Assignment::new(),
                Some(deepest.entries().iter().cloned().collect()),
            ),
        };
        SolveReport {
            scheme: scheme.map(str::to_string),
            status: status.to_string(),
            assignment,
            stats: outcome.stats().into(),
            deepest_partial,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::LayoutMatrix;

    const FOUR_ARRAYS: &str = include_str!("../tests/fixtures/four_array_network.json");

    fn lm(rows: &[&[i64]]) -> LayoutMatrix {
        LayoutMatrix::from_rows(rows).unwrap()
    }

    fn four_arrays() -> ConstraintNetwork {
        ConstraintNetwork::from_json(FOUR_ARRAYS).unwrap().0
    }

    fn witness() -> Assignment {
        [
            ("Q1", lm(&[&[1, 0]])),
            ("Q2", lm(&[&[1, 1]])),
            ("Q3", lm(&[&[0, 1]])),
            ("Q4", lm(&[&[1, 0]])),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Tiny network over opaque 2-D layouts, built from a JSON literal.
    fn net(text: &str) -> ConstraintNetwork {
        ConstraintNetwork::from_json(text).unwrap().0
    }

    #[test]
    fn consistency_examples() {
        let n = four_arrays();
        let p = PartialInstantiation::new()
            .with("Q1", lm(&[&[1, 0]]))
            .with("Q2", lm(&[&[1, 1]]));
        assert!(is_consistent(&n, &p).unwrap());
        let p = PartialInstantiation::new()
            .with("Q1", lm(&[&[1, 0]]))
            .with("Q2", lm(&[&[1, -1]]));
        assert!(!is_consistent(&n, &p).unwrap());
        assert!(is_consistent(&n, &PartialInstantiation::new()).unwrap());
        let p = PartialInstantiation::new().with("Q2", lm(&[&[1, 0]]));
        assert!(matches!(is_consistent(&n, &p), Err(SolverError::DomainError { .. })));
        assert!(is_consistent(&n, &witness().to_partial()).unwrap());
    }

    #[test]
    fn select_variable_examples() {
        let n = four_arrays();
        let cfg = SolverConfig::enhanced(0);
        assert_eq!(select_variable(&n, &PartialInstantiation::new(), &cfg).unwrap().as_deref(), Some("Q2"));
        let p = PartialInstantiation::new()
            .with("Q1", lm(&[&[1, 0]]))
            .with("Q2", lm(&[&[1, 1]]))
            .with("Q3", lm(&[&[0, 1]]));
        assert_eq!(select_variable(&n, &p, &cfg).unwrap().as_deref(), Some("Q4"));
        let star = net(
            r#"{"variables":["L1","L2","H","L3"],
                "domains":{"L1":[[[1,0]]],"L2":[[[1,0]]],"H":[[[1,0]],[[0,1]]],"L3":[[[1,0]]]},
                "constraints":[{"pair":["H","L1"],"allowed":[[[[1,0]],[[1,0]]]]},
                               {"pair":["H","L2"],"allowed":[[[[1,0]],[[1,0]]]]},
                               {"pair":["H","L3"],"allowed":[[[[1,0]],[[1,0]]]]}]}"#,
        );
        assert_eq!(select_variable(&star, &PartialInstantiation::new(), &cfg).unwrap().as_deref(), Some("H"));
    }

    #[test]
    fn rank_values_examples() {
        let n = four_arrays();
        let cfg = SolverConfig::enhanced(0);
        let ranked = rank_values(&n, &PartialInstantiation::new(), "Q2", &cfg).unwrap();
        assert_eq!(ranked, vec![lm(&[&[1, 1]]), lm(&[&[1, -1]])]);

        // Q4 with every neighbor instantiated keeps domain order
        let p = PartialInstantiation::new()
            .with("Q1", lm(&[&[1, 0]]))
            .with("Q2", lm(&[&[1, 1]]))
            .with("Q3", lm(&[&[0, 1]]));
        assert_eq!(rank_values(&n, &p, "Q4", &cfg).unwrap(), n.domain(3).to_vec());

        // equal counts keep domain order
        let flat = net(
            r#"{"variables":["A","B"],"domains":{"A":[[[1,0]],[[0,1]]],"B":[[[1,1]]]},
                "constraints":[{"pair":["A","B"],"allowed":[[[[1,0]],[[1,1]]],[[[0,1]],[[1,1]]]]}]}"#,
        );
        assert_eq!(
            rank_values(&flat, &PartialInstantiation::new(), "A", &cfg).unwrap(),
            flat.domain(0).to_vec()
        );
    }

    #[test]
    fn option_counts_match_enumeration() {
        // recount compatible neighbor values for every Q2 candidate directly
        let n = four_arrays();
        let q2 = n.var_index("Q2").unwrap();
        let count = |a: &LayoutMatrix| -> usize {
            n.neighbors(q2)
                .into_iter()
                .map(|w| n.domain(w).iter().filter(|b| n.allows(q2, a, w, b)).count())
                .sum()
        };
        assert_eq!(count(&lm(&[&[1, 1]])), 3);
        assert_eq!(count(&lm(&[&[1, -1]])), 2);
    }

    #[test]
    fn backjump_target_examples() {
        let chain = net(
            r#"{"variables":["Q1","Q2","Q3","Q4"],
                "domains":{"Q1":[[[1,0]]],"Q2":[[[1,0]]],"Q3":[[[1,0]]],"Q4":[[[1,0]]]},
                "constraints":[{"pair":["Q1","Q4"],"allowed":[]},{"pair":["Q3","Q4"],"allowed":[]}]}"#,
        );
        let p = PartialInstantiation::new()
            .with("Q1", lm(&[&[1, 0]]))
            .with("Q2", lm(&[&[1, 0]]))
            .with("Q3", lm(&[&[1, 0]]));
        assert_eq!(backjump_target(&chain, &p, "Q4").unwrap(), Some(2));

        let only_q1 = net(
            r#"{"variables":["Q1","Q2","Q3","Q4"],
                "domains":{"Q1":[[[1,0]]],"Q2":[[[1,0]]],"Q3":[[[1,0]]],"Q4":[[[1,0]]]},
                "constraints":[{"pair":["Q1","Q4"],"allowed":[]}]}"#,
        );
        assert_eq!(backjump_target(&only_q1, &p, "Q4").unwrap(), Some(0));

        let isolated = net(
            r#"{"variables":["Q1","Q2","Q3","Q4"],
                "domains":{"Q1":[[[1,0]]],"Q2":[[[1,0]]],"Q3":[[[1,0]]],"Q4":[[[1,0]]]},
                "constraints":[]}"#,
        );
        assert_eq!(backjump_target(&isolated, &p, "Q4").unwrap(), None);
    }

    #[test]
    fn solve_four_array_all_corners() {
        let n = four_arrays();
        for var_order in [VarOrder::Static, VarOrder::Random, VarOrder::MostConstraining] {
            for val_order in [ValueOrder::Domain, ValueOrder::Random, ValueOrder::OptionMaximizing] {
                for backjump in [false, true] {
                    let cfg = SolverConfig {
                        var_order,
                        val_order,
                        backjump,
                        seed: 11,
                    };
                    let out = solve(&n, &cfg);
                    let a = out.assignment().expect("sat");
                    assert!(is_consistent(&n, &a.to_partial()).unwrap());
                    assert_eq!(a.len(), 4);
                }
            }
        }
    }

    #[test]
    fn empty_constraint_is_unsat() {
        let n = net(
            r#"{"variables":["A","B"],"domains":{"A":[[[1,0]]],"B":[[[0,1]]]},
                "constraints":[{"pair":["A","B"],"allowed":[]}]}"#,
        );
        for cfg in [SolverConfig::base(3), SolverConfig::enhanced(3), SolverConfig::chronological()] {
            let out = solve(&n, &cfg);
            assert!(!out.is_sat());
            match out {
                SolveOutcome::Unsat { deepest, .. } => assert_eq!(deepest.len(), 1),
                _ => unreachable!(),
            }
        }
        assert!(brute_force(&n, BRUTE_FORCE_CAP).unwrap().is_empty());
    }

    #[test]
    fn unconstrained_network_takes_first_values() {
        let n = net(
            r#"{"variables":["A","B"],"domains":{"A":[[[0,1]],[[1,0]]],"B":[[[1,1]],[[1,0]]]},"constraints":[]}"#,
        );
        let out = solve(&n, &SolverConfig::chronological());
        let a = out.assignment().unwrap();
        assert_eq!(a.get("A"), Some(&lm(&[&[0, 1]])));
        assert_eq!(a.get("B"), Some(&lm(&[&[1, 1]])));
        assert_eq!(out.stats().nodes_visited, 2);
        assert_eq!(out.stats().backtracks, 0);
    }

    #[test]
    fn brute_force_examples() {
        let n = net(
            r#"{"variables":["A","B"],"domains":{"A":[[[1,0]],[[0,1]]],"B":[[[1,1]]]},
                "constraints":[{"pair":["A","B"],"allowed":[[[[1,0]],[[1,1]]]]}]}"#,
        );
        let all = brute_force(&n, BRUTE_FORCE_CAP).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].get("A"), Some(&lm(&[&[1, 0]])));
        let sols = brute_force(&four_arrays(), BRUTE_FORCE_CAP).unwrap();
        assert!(sols.contains(&witness()));
        assert!(matches!(brute_force(&four_arrays(), 10), Err(SolverError::CapExceeded { size: 54, cap: 10 })));
    }

    #[test]
    fn no_backjumps_when_disabled() {
        let n = four_arrays();
        for seed in 0..20 {
            let mut cfg = SolverConfig::base(seed);
            assert_eq!(solve(&n, &cfg).stats().backjumps, 0);
            cfg = SolverConfig { backjump: false, ..SolverConfig::enhanced(seed) };
            assert_eq!(solve(&n, &cfg).stats().backjumps, 0);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let n = four_arrays();
        for seed in 0..10 {
            let a = solve(&n, &SolverConfig::base(seed));
            let b = solve(&n, &SolverConfig::base(seed));
            assert_eq!(a.assignment(), b.assignment());
            assert_eq!(a.stats().counters(), b.stats().counters());
        }
    }

    #[test]
    fn report_json_shape() {
        let out = solve(&four_arrays(), &SolverConfig::enhanced(0));
        let v: serde_json::Value = serde_json::to_value(SolveReport::from_outcome(None, &out)).unwrap();
        assert_eq!(v["status"], "sat");
        assert!(v["assignment"]["Q1"].is_array());
        for key in ["nodes", "backtracks", "backjumps", "max_depth", "elapsed_ms"] {
            assert!(v["stats"][key].is_u64(), "{key}");
        }
    }
}
