//! Vertex-level simulation of polynomial filtering and CIPA with synchronous
//! one-hop message rounds.
//!
//! Each filter is compiled once into a register program: a list of local
//! linear combinations and shift steps. A shift step is one round: every agent
//! sends one register value to each neighbor in that shift's row support,
//! then combines the received values with its own row weights. Agents only
//! ever see their own state and their inbox; the bus refuses to route a
//! message along a non-edge.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::solve::{norm2, DIVERGENCE_GROWTH};

/// Largest network for which [`Network::dump_state`] is allowed.
pub const DUMP_LIMIT: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    H,
    C,
}

/// Register slots in a compiled program: 0 is the input, 1 the output, the
/// rest are scratch.
type Reg = usize;
const IN: Reg = 0;
const OUT: Reg = 1;

#[derive(Debug, Clone, PartialEq)]
enum Op {
    /// `dst = Ŝ_k src` with `Ŝ = (2 S − sum·I)/width`; one round.
    Shift {
        k: usize,
        src: Reg,
        dst: Reg,
        sum: f64,
        width: f64,
    },
    /// `dst = Σ c·reg`, evaluated left to right; empty means zero.
    Combine { dst: Reg, terms: Vec<(f64, Reg)> },
}

/// A filter compiled to the nested Clenshaw schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    ops: Vec<Op>,
    registers: usize,
}

impl Program {
    pub fn compile(filter: &FilterSpec) -> Self {
        let poly = filter.poly();
        let d = poly.dims();
        let frames: Vec<(f64, f64)> = poly
            .cube()
            .intervals()
            .iter()
            .map(|iv| (iv.hi + iv.lo, iv.hi - iv.lo))
            .collect();
        let mut prog = Program {
            ops: Vec::new(),
            registers: 2 + 4 * d,
        };
        prog.emit(poly.coeffs(), poly.degree(), 0, &frames, OUT);
        prog
    }

    /// Number of communication rounds per application.
    pub fn rounds(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Shift { .. })).count()
    }

    /// Registers per agent, input and output included.
    pub fn registers(&self) -> usize {
        self.registers
    }

    fn fetch(&mut self, coeffs: &[f64], degree: usize, level: usize, frames: &[(f64, f64)], k: usize, target: Reg) {
        if level + 1 == frames.len() {
            self.ops.push(Op::Combine {
                dst: target,
                terms: vec![(coeffs[k], IN)],
            });
        } else {
            let stride = coeffs.len() / (degree + 1);
            self.emit(&coeffs[k * stride..(k + 1) * stride], degree, level + 1, frames, target);
        }
    }

    fn emit(&mut self, coeffs: &[f64], degree: usize, level: usize, frames: &[(f64, f64)], out: Reg) {
        if degree == 0 {
            self.fetch(coeffs, degree, level, frames, 0, out);
            return;
        }
        let base = 2 + 4 * level;
        let (mut b1, mut b2, v, tmp) = (base, base + 1, base + 2, base + 3);
        let (sum, width) = frames[level];
        let shift = |src: Reg, dst: Reg| Op::Shift {
            k: level,
            src,
            dst,
            sum,
            width,
        };
        self.fetch(coeffs, degree, level, frames, degree, b1);
        self.ops.push(Op::Combine { dst: b2, terms: vec![] });
        for k in (1..degree).rev() {
            self.fetch(coeffs, degree, level, frames, k, v);
            self.ops.push(shift(b1, tmp));
            self.ops.push(Op::Combine {
                dst: b2,
                terms: vec![(1.0, v), (2.0, tmp), (-1.0, b2)],
            });
            std::mem::swap(&mut b1, &mut b2);
        }
        self.fetch(coeffs, degree, level, frames, 0, v);
        self.ops.push(shift(b1, tmp));
        self.ops.push(Op::Combine {
            dst: out,
            terms: vec![(1.0, v), (1.0, tmp), (-1.0, b2)],
        });
    }
}

/// State held by one vertex.
#[derive(Debug, Clone)]
pub struct Agent {
    pub id: usize,
    neighbors: Vec<usize>,
    /// Row `id` of each shift: `(j, S_k(id, j))`, `j` ascending.
    shift_rows: Vec<Vec<(usize, f64)>>,
    y: f64,
    registers: Vec<f64>,
}

impl Agent {
    pub fn neighbors(&self) -> &[usize] {
        &self.neighbors
    }

    /// Stored entries of row `id` of shift `k`.
    pub fn row_entries(&self, k: usize) -> usize {
        self.shift_rows[k].len()
    }

    pub fn scratch_registers(&self) -> usize {
        self.registers.len()
    }

    /// Applies the shift row to `own` and the values received this round.
    fn combine_row(&self, k: usize, own: f64, inbox: &[(usize, f64)]) -> Result<f64> {
        let mut acc = 0.0;
        for &(j, w) in &self.shift_rows[k] {
            let v = if j == self.id {
                own
            } else {
                match inbox.binary_search_by_key(&j, |m| m.0) {
                    Ok(p) => inbox[p].1,
                    Err(_) => {
                        return Err(Error::InvalidInput(format!(
                            "agent {} missing message from neighbor {j}",
                            self.id
                        )))
                    }
                }
            };
            acc += w * v;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: usize,
    pub iteration: usize,
    pub messages: usize,
}

/// Communication accounting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundLedger {
    pub rounds: usize,
    /// Scalars sent in total.
    pub messages: usize,
    /// Most scalars any single agent sent in any single round.
    pub per_agent_max_messages: usize,
    pub log: Vec<RoundRecord>,
}

impl RoundLedger {
    /// CSV with columns `round,iteration,messages_this_round`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,iteration,messages_this_round\n");
        for r in &self.log {
            let _ = writeln!(out, "{},{},{}", r.round, r.iteration, r.messages);
        }
        out
    }
}

/// Reserved solver registers ahead of the program registers.
const X: usize = 0;
const E: usize = 1;
const T: usize = 2;
const SOLVER_REGS: usize = 3;

#[derive(Debug, Clone)]
pub struct Network {
    agents: Vec<Agent>,
    h: Program,
    c: Program,
    audit: Option<BTreeSet<(usize, usize)>>,
}

/// Hands every agent its shift rows, its sample of `y` and both compiled
/// coefficient programs.
pub fn distribute(h: &FilterSpec, c: &FilterSpec, y: &[f64]) -> Result<Network> {
    if !h.family().same_as(c.family()) {
        return Err(Error::ShiftFamilyMismatch);
    }
    let n = h.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    let hp = Program::compile(h);
    let cp = Program::compile(c);
    let regs = SOLVER_REGS + hp.registers.max(cp.registers);
    let agents = (0..n)
        .map(|i| {
            let shift_rows: Vec<Vec<(usize, f64)>> = h
                .family()
                .shifts()
                .iter()
                .map(|s| {
                    let (cols, vals) = s.row(i);
                    cols.iter().copied().zip(vals.iter().copied()).collect()
                })
                .collect();
            let neighbors: BTreeSet<usize> = shift_rows
                .iter()
                .flat_map(|r| r.iter().map(|&(j, _)| j))
                .filter(|&j| j != i)
                .collect();
            Agent {
                id: i,
                neighbors: neighbors.into_iter().collect(),
                shift_rows,
                y: y[i],
                registers: vec![0.0; regs],
            }
        })
        .collect();
    Ok(Network {
        agents,
        h: hp,
        c: cp,
        audit: None,
    })
}

/// Outcome of a distributed CIPA run.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub x: Vec<f64>,
    pub ledger: RoundLedger,
    /// Aggregated `‖H x(m) − y‖₂` for `m = 0..iterations`; a harness
    /// convenience, agents never see it.
    pub residual_norms: Vec<f64>,
}

impl Network {
    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn program(&self, which: Which) -> &Program {
        match which {
            Which::H => &self.h,
            Which::C => &self.c,
        }
    }

    /// Registers each agent holds, identical for every agent.
    pub fn registers_per_agent(&self) -> usize {
        self.agents[0].registers.len()
    }

    /// Starts recording every `(sender, receiver)` pair the bus routes.
    pub fn enable_audit(&mut self) {
        self.audit = Some(BTreeSet::new());
    }

    pub fn audit_log(&self) -> Option<&BTreeSet<(usize, usize)>> {
        self.audit.as_ref()
    }

    fn map_reg(r: Reg, input: usize, output: usize) -> usize {
        match r {
            IN => input,
            OUT => output,
            s => SOLVER_REGS + s - 2,
        }
    }

    fn round(&mut self, k: usize, src: usize, dst: usize, frame: (f64, f64), iteration: usize, ledger: &mut RoundLedger) -> Result<()> {
        let (sum, width) = frame;
        let n = self.agents.len();
        // send phase
        let mut inboxes: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut sent_total = 0;
        for agent in &self.agents {
            let value = agent.registers[src];
            let mut sent = 0;
            for &(j, _) in &agent.shift_rows[k] {
                if j == agent.id {
                    continue;
                }
                if agent.neighbors.binary_search(&j).is_err() {
                    return Err(Error::InvalidInput(format!("bus refused route {} -> {j}", agent.id)));
                }
                inboxes[j].push((agent.id, value));
                if let Some(a) = self.audit.as_mut() {
                    a.insert((agent.id, j));
                }
                sent += 1;
            }
            ledger.per_agent_max_messages = ledger.per_agent_max_messages.max(sent);
            sent_total += sent;
        }
        // compute phase; senders were visited in ascending order so inboxes are sorted
        self.agents
            .par_iter_mut()
            .zip(inboxes.par_iter())
            .try_for_each(|(agent, inbox)| -> Result<()> {
                let own = agent.registers[src];
                let sv = agent.combine_row(k, own, inbox)?;
                agent.registers[dst] = (2.0 * sv - sum * own) / width;
                Ok(())
            })?;
        ledger.rounds += 1;
        ledger.messages += sent_total;
        ledger.log.push(RoundRecord {
            round: ledger.rounds,
            iteration,
            messages: sent_total,
        });
        Ok(())
    }

    fn run(&mut self, which: Which, input: usize, output: usize, iteration: usize, ledger: &mut RoundLedger) -> Result<()> {
        let ops = self.program(which).ops.clone();
        for op in &ops {
            match op {
                Op::Shift { k, src, dst, sum, width } => {
                    let (s, d) = (Self::map_reg(*src, input, output), Self::map_reg(*dst, input, output));
                    self.round(*k, s, d, (*sum, *width), iteration, ledger)?;
                }
                Op::Combine { dst, terms } => {
                    let d = Self::map_reg(*dst, input, output);
                    let terms: Vec<(f64, usize)> = terms.iter().map(|&(c, r)| (c, Self::map_reg(r, input, output))).collect();
                    self.agents.par_iter_mut().for_each(|a| {
                        let v = terms.iter().fold(0.0, |acc, &(c, r)| acc + c * a.registers[r]);
                        a.registers[d] = v;
                    });
                }
            }
        }
        Ok(())
    }

    /// Loads `input` into the agents, applies H or C, and collects the
    /// per-agent outputs.
    pub fn apply_filter(&mut self, which: Which, input: &[f64]) -> Result<(Vec<f64>, RoundLedger)> {
        if input.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: input.len(),
            });
        }
        for (a, &v) in self.agents.iter_mut().zip(input) {
            a.registers[X] = v;
        }
        let mut ledger = RoundLedger::default();
        self.run(which, X, T, 0, &mut ledger)?;
        Ok((self.agents.iter().map(|a| a.registers[T]).collect(), ledger))
    }

    /// `m` CIPA iterations from `x(0) = 0`: `e = H x − y`, `x ← x − C e`.
    pub fn cipa(&mut self, m: usize) -> Result<SimOutcome> {
        if m == 0 {
            return Err(Error::InvalidInput("at least one iteration is required".into()));
        }
        for a in &mut self.agents {
            a.registers.iter_mut().for_each(|r| *r = 0.0);
            a.registers[E] = a.y;
        }
        let mut ledger = RoundLedger::default();
        let mut residuals = Vec::with_capacity(m + 1);
        let mut min_res = f64::INFINITY;
        for it in 1..=m + 1 {
            self.run(Which::H, X, E, it, &mut ledger)?;
            self.agents.par_iter_mut().for_each(|a| a.registers[E] -= a.y);
            let r = norm2(&self.agents.iter().map(|a| a.registers[E]).collect::<Vec<_>>());
            residuals.push(r);
            min_res = min_res.min(r);
            if !r.is_finite() || (min_res > 0.0 && r / min_res > DIVERGENCE_GROWTH) {
                return Err(Error::Diverged {
                    iteration: it - 1,
                    growth: r / min_res,
                });
            }
            if it > m {
                // the final H application only measures the residual
                let extra = self.h.rounds();
                ledger.rounds -= extra;
                let dropped: usize = ledger.log.drain(ledger.log.len() - extra..).map(|r| r.messages).sum();
                ledger.messages -= dropped;
                break;
            }
            self.run(Which::C, E, T, it, &mut ledger)?;
            self.agents.par_iter_mut().for_each(|a| a.registers[X] -= a.registers[T]);
        }
        Ok(SimOutcome {
            x: self.agents.iter().map(|a| a.registers[X]).collect(),
            ledger,
            residual_norms: residuals,
        })
    }

    /// Text dump of each agent's `y`, `x` and scratch registers.
    pub fn dump_state(&self) -> Result<String> {
        if self.n() > DUMP_LIMIT {
            return Err(Error::SizeCap {
                n: self.n(),
                cap: DUMP_LIMIT,
            });
        }
        let mut out = String::from("agent,y,x,registers\n");
        for a in &self.agents {
            let regs: Vec<String> = a.registers.iter().map(|r| format!("{r:.17e}")).collect();
            let _ = writeln!(out, "{},{:.17e},{:.17e},{}", a.id, a.y, a.registers[X], regs.join(" "));
        }
        Ok(out)
    }
}

/// Distributed filter application on a freshly distributed network.
pub fn sim_apply_filter(network: &mut Network, which: Which, input: &[f64]) -> Result<(Vec<f64>, RoundLedger)> {
    network.apply_filter(which, input)
}

/// Distributed CIPA.
pub fn sim_cipa(network: &mut Network, m: usize) -> Result<SimOutcome> {
    network.cipa(m)
}
