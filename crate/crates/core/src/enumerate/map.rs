//! A small clause store over at most 64 selector variables.
//!
//! Variable `i` true means "feature i is fixed". Blocking clauses from MARCO
//! are either all-negative (an AXp was found) or all-positive (a CXp was
//! found), but the solver handles arbitrary clauses.

/// A disjunction: some variable of `pos` true, or some variable of `neg` false.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clause {
    pub pos: u64,
    pub neg: u64,
}

impl Clause {
    pub fn satisfied_by(self, model: u64) -> bool {
        self.pos & model != 0 || self.neg & !model != 0
    }
}

#[derive(Clone, Debug, Default)]
pub struct MapSolver {
    vars: usize,
    clauses: Vec<Clause>,
}

impl MapSolver {
    pub fn new(vars: usize) -> Self {
        assert!(vars <= 64);
        MapSolver { vars, clauses: Vec::new() }
    }

    pub fn add(&mut self, clause: Clause) {
        self.clauses.push(clause);
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    fn mask(&self) -> u64 {
        if self.vars == 64 {
            u64::MAX
        } else {
            (1u64 << self.vars) - 1
        }
    }

    /// A satisfying assignment that is maximal (no false variable can be
    /// flipped to true), or `None` when the clauses are unsatisfiable.
    pub fn maximal_model(&self) -> Option<u64> {
        let model = self.search(0, 0)?;
        let mut model = model;
        for i in 0..self.vars {
            let bit = 1u64 << i;
            if model & bit == 0 && self.clauses.iter().all(|c| c.satisfied_by(model | bit)) {
                model |= bit;
            }
        }
        Some(model)
    }

    /// DPLL with unit propagation, branching on the lowest unassigned
    /// variable and trying `true` first.
    fn search(&self, mut assigned: u64, mut value: u64) -> Option<u64> {
        let all = self.mask();
        loop {
            let mut changed = false;
            for c in &self.clauses {
                if c.pos & assigned & value != 0 || c.neg & assigned & !value != 0 {
                    continue;
                }
                let open_pos = c.pos & !assigned;
                let open_neg = c.neg & !assigned;
                match (open_pos | open_neg).count_ones() {
                    0 => return None,
                    1 => {
                        assigned |= open_pos | open_neg;
                        value |= open_pos;
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        if assigned & all == all {
            return Some(value & all);
        }
        let bit = 1u64 << (!assigned & all).trailing_zeros();
        self.search(assigned | bit, value | bit).or_else(|| self.search(assigned | bit, value & !bit))
    }
}
