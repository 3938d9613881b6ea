//! Greedy nest-by-nest baseline: optimize the most important nest first, fix
//! the layouts it chooses, and propagate them to the remaining nests.

use serde::Serialize;

use crate::layout::LayoutMatrix;
use crate::network::{derive_for_nest, NestDerivation};
use crate::program::{innermost_step_delta, Program};
use crate::solver::Assignment;

/// Nest positions by descending weight; equal weights keep declaration order.
pub fn order_nests(program: &Program) -> Vec<usize> {
    let mut order: Vec<usize> = (0..program.nests.len()).collect();
    order.sort_by(|&a, &b| program.nests[b].weight.total_cmp(&program.nests[a].weight));
    order
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeuristicResult {
    pub assignment: Assignment,
    /// Chosen innermost loop position per nest, in declaration order.
    pub innermost: Vec<usize>,
    /// Nest positions in processing order.
    pub order: Vec<usize>,
}

pub fn heuristic_solve(program: &Program) -> HeuristicResult {
    let order = order_nests(program);
    let mut fixed: Vec<Option<LayoutMatrix>> = vec![None; program.arrays.len()];
    let mut innermost = vec![0; program.nests.len()];

    for &ni in &order {
        let nest = &program.nests[ni];
        let mut best: Option<((usize, usize), usize, NestDerivation)> = None;
        for pos in nest.innermost_candidates() {
            let derivation = derive_for_nest(program, ni, pos).expect("candidate is allowed");
            let satisfied = nest
                .references
                .iter()
                .filter(|r| {
                    let a = program.array_index(&r.array).expect("declared");
                    fixed[a].as_ref().is_some_and(|l| {
                        l.annihilates(&innermost_step_delta(r, pos).expect("validated depth"))
                    })
                })
                .count();
            let newly = derivation
                .layouts
                .iter()
                .filter(|al| {
                    al.layout.is_some() && fixed[program.array_index(&al.array).expect("declared")].is_none()
                })
                .count();
            let score = (satisfied, newly);
            if best.as_ref().is_none_or(|(s, _, _)| score > *s) {
                best = Some((score, pos, derivation));
            }
        }
        // a nest whose allowed set is empty keeps its original order and fixes nothing
        let Some((_, pos, derivation)) = best else {
            innermost[ni] = nest.depth() - 1;
            continue;
        };
        log::debug!("heuristic: nest {} runs {} innermost", nest.name, nest.loops[pos].index);
        innermost[ni] = pos;
        for al in &derivation.layouts {
            let a = program.array_index(&al.array).expect("declared");
            if fixed[a].is_none() {
                fixed[a] = al.layout.clone();
            }
        }
    }

    let assignment = program
        .arrays
        .iter()
        .zip(fixed)
        .map(|(decl, l)| (decl.name.clone(), l.unwrap_or_else(|| LayoutMatrix::row_major(decl.dims))))
        .collect();
    HeuristicResult {
        assignment,
        innermost,
        order,
    }
}
