//! Two-counter register machines, dovetailed enumeration of the halting
//! programs, and the sequence families built from that enumeration.
//!
//! # Gödel numbering
//!
//! A program index `p >= 1` is read in bijective base 35: the digits
//! `d_0, d_1, ...` (each in `1..=35`) satisfy `p = Σ d_i 35^i`, and digit
//! `d_i` encodes instruction `i` (least significant digit first):
//!
//! | digit     | instruction                                      |
//! |-----------|--------------------------------------------------|
//! | 1         | `HALT`                                           |
//! | 2         | `INC 0`                                          |
//! | 3         | `INC 1`                                          |
//! | 4..=35    | `DECJZ r k` with `d - 4 = 2k + r`, `k < 16`      |
//!
//! Every index decodes to exactly one instruction list and every list with
//! jump targets below 16 has exactly one index. A jump target at or past the
//! end of the program lands on the implicit `HALT` that follows the last
//! instruction.
//!
//! # Semantics
//!
//! Counters start at zero and the program counter at 0. Each executed
//! instruction is one step, `HALT` included. `INC r` increments and falls
//! through. `DECJZ r k` jumps to `k` when counter `r` is zero, otherwise it
//! decrements and falls through.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{Dyadic, Interval, Rational};
use crate::error::{Error, Result};
use crate::seq::{DoubleBuiltin, DoubleSeqDef, Modulus2, SeqStandardDescription, DEFAULT_BUDGET};

const BASE: u64 = 35;
/// Jump targets representable in one digit.
pub const MAX_TARGET: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instr {
    Inc(u8),
    DecJz(u8, usize),
    Halt,
}

impl Instr {
    fn digit(self) -> Option<u64> {
        match self {
            Instr::Halt => Some(1),
            Instr::Inc(r) if r < 2 => Some(2 + r as u64),
            Instr::DecJz(r, k) if r < 2 && k < MAX_TARGET => Some(4 + 2 * k as u64 + r as u64),
            _ => None,
        }
    }

    fn from_digit(d: u64) -> Instr {
        match d {
            1 => Instr::Halt,
            2 | 3 => Instr::Inc((d - 2) as u8),
            _ => {
                let c = d - 4;
                Instr::DecJz((c % 2) as u8, (c / 2) as usize)
            }
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Inc(r) => write!(f, "INC {r}"),
            Instr::DecJz(r, k) => write!(f, "DECJZ {r} {k}"),
            Instr::Halt => f.write_str("HALT"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub instrs: Vec<Instr>,
}

impl Program {
    /// Total decoding of a program index.
    pub fn decode(index: u64) -> Program {
        assert!(index >= 1, "program indices start at 1");
        let mut n = index;
        let mut instrs = Vec::new();
        while n > 0 {
            let d = (n - 1) % BASE + 1;
            instrs.push(Instr::from_digit(d));
            n = (n - d) / BASE;
        }
        Program { instrs }
    }

    /// Index of this program, if it is non-empty, uses registers 0 and 1
    /// only, has targets below [`MAX_TARGET`] and fits in `u64`.
    pub fn encode(&self) -> Option<u64> {
        if self.instrs.is_empty() {
            return None;
        }
        let mut n: u64 = 0;
        for ins in self.instrs.iter().rev() {
            n = n.checked_mul(BASE)?.checked_add(ins.digit()?)?;
        }
        Some(n)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, ins) in self.instrs.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{ins}")?;
        }
        Ok(())
    }
}

/// Listing format: one instruction per line; blank lines and `#` comments
/// are ignored.
impl FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut instrs = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Invalid(format!("line {}: {msg}", lineno + 1));
            let parts: Vec<&str> = line.split_whitespace().collect();
            let reg = |t: &str| match t {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                _ => Err(bad("register must be 0 or 1")),
            };
            let ins = match parts.as_slice() {
                ["HALT"] => Instr::Halt,
                ["INC", r] => Instr::Inc(reg(r)?),
                ["DECJZ", r, k] => {
                    let k: usize = k.parse().map_err(|_| bad("bad jump target"))?;
                    Instr::DecJz(reg(r)?, k)
                }
                _ => return Err(bad("expected INC r, DECJZ r k or HALT")),
            };
            instrs.push(ins);
        }
        if instrs.is_empty() {
            return Err(Error::Invalid("empty program".into()));
        }
        Ok(Program { instrs })
    }
}

/// Interpreter state.
#[derive(Clone, Debug)]
pub struct Machine {
    program: Program,
    pc: usize,
    regs: [u64; 2],
    steps: u64,
    halted: bool,
}

impl Machine {
    pub fn new(program: Program) -> Self {
        Machine {
            program,
            pc: 0,
            regs: [0, 0],
            steps: 0,
            halted: false,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn halted(&self) -> bool {
        self.halted
    }

    pub fn registers(&self) -> [u64; 2] {
        self.regs
    }

    /// Executes one instruction; a no-op once halted.
    pub fn step(&mut self) {
        if self.halted {
            return;
        }
        self.steps += 1;
        let len = self.program.instrs.len();
        match self.program.instrs.get(self.pc).copied().unwrap_or(Instr::Halt) {
            Instr::Halt => self.halted = true,
            Instr::Inc(r) => {
                self.regs[r as usize] += 1;
                self.pc += 1;
            }
            Instr::DecJz(r, k) => {
                let c = &mut self.regs[r as usize];
                if *c == 0 {
                    self.pc = k.min(len);
                } else {
                    *c -= 1;
                    self.pc += 1;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "step", rename_all = "snake_case")]
pub enum RunOutcome {
    HaltedAt(u64),
    StillRunning,
}

pub fn run_program(program: &Program, max_steps: u64) -> RunOutcome {
    let mut m = Machine::new(program.clone());
    while m.steps() < max_steps && !m.halted() {
        m.step();
    }
    if m.halted() {
        RunOutcome::HaltedAt(m.steps())
    } else {
        RunOutcome::StillRunning
    }
}

/// Runs program `index` for at most `max_steps` steps from empty counters.
pub fn run(index: u64, max_steps: u64) -> RunOutcome {
    run_program(&Program::decode(index), max_steps)
}

/// `l(n, m)`: the halting step `m0` if program `n` halts in `m0 < m` steps,
/// otherwise `m`.
pub fn halting_steps_l(n: u64, m: u64) -> u64 {
    match run(n, m.saturating_sub(1)) {
        RunOutcome::HaltedAt(s) => s,
        RunOutcome::StillRunning => m,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltRecord {
    pub program_index: u64,
    pub halt_step: u64,
}

/// Prefix of the dovetailed enumeration of halting programs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedSet {
    pub records: Vec<HaltRecord>,
    pub tick_budget: u64,
    pub ticks_used: u64,
}

impl EnumeratedSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.records.iter().map(|r| r.program_index)
    }

    /// 1-based position of `program` in the enumeration.
    pub fn position(&self, program: u64) -> Option<u64> {
        self.records
            .iter()
            .position(|r| r.program_index == program)
            .map(|p| p as u64 + 1)
    }

    fn require(&self, n: u64) -> Result<()> {
        if n > self.len() as u64 {
            return Err(Error::InsufficientEnumeration {
                needed: n,
                available: self.len() as u64,
            });
        }
        Ok(())
    }
}

/// Dovetails over all programs: tick `k` visits `(p, s) = cantor_unpair(k)`
/// and emits `p` if it halts within `s` steps and was not emitted before.
///
/// Visiting `(p, s)` right after `(p, s - 1)` lets each program keep its
/// interpreter state, so a tick costs one step.
pub fn enumerate_re(count: u64, tick_budget: u64) -> Result<EnumeratedSet> {
    let mut records = Vec::new();
    let mut machines: Vec<Machine> = Vec::new();
    let mut emitted: Vec<bool> = Vec::new();
    let mut ticks = 0u64;
    let done = |records: Vec<HaltRecord>, ticks| EnumeratedSet {
        records,
        tick_budget,
        ticks_used: ticks,
    };
    if count == 0 {
        return Ok(done(records, 0));
    }
    // diagonal d holds k with p + s = d + 1, visited in order s = 1..=d
    for d in 1u64.. {
        machines.push(Machine::new(Program::decode(d)));
        emitted.push(false);
        for p in (1..=d).rev() {
            if ticks == tick_budget {
                return Err(Error::budget(
                    format!("dovetailing found {} of {count} halting programs", records.len()),
                    tick_budget,
                ));
            }
            ticks += 1;
            let i = (p - 1) as usize;
            if emitted[i] {
                continue;
            }
            let m = &mut machines[i];
            m.step();
            if m.halted() {
                emitted[i] = true;
                records.push(HaltRecord {
                    program_index: p,
                    halt_step: m.steps(),
                });
                if records.len() as u64 == count {
                    return Ok(done(records, ticks));
                }
            }
        }
    }
    unreachable!()
}

/// `Σ_{k ∈ A_n} 2^{-k}` over the first `n` enumerated programs.
pub fn specker_term(n: u64, e: &EnumeratedSet) -> Result<Rational> {
    Ok(specker_prefix(n, e)?
        .pop()
        .map(|d| d.to_rational())
        .unwrap_or_else(Rational::zero))
}

/// Partial sums for `n = 1..=len`, exact and cheap to compare.
pub fn specker_prefix(len: u64, e: &EnumeratedSet) -> Result<Vec<Dyadic>> {
    e.require(len)?;
    let mut acc = Dyadic::zero();
    let mut out = Vec::with_capacity(len as usize);
    for k in e.indices().take(len as usize) {
        acc = &acc + &Dyadic::pow2(-(k as i64));
        out.push(acc.clone());
    }
    Ok(out)
}

/// 1 if program `m` is among the first `n` enumerated, else 0.
pub fn t15_family(m: u64, n: u64, e: &EnumeratedSet) -> Result<Rational> {
    e.require(n)?;
    let hit = e.indices().take(n as usize).any(|k| k == m);
    Ok(if hit { Rational::one() } else { Rational::zero() })
}

/// `n * t15_family(m, n)`.
pub fn t17_family(m: u64, n: u64, e: &EnumeratedSet) -> Result<Rational> {
    Ok(t15_family(m, n, e)?.mul_index(n))
}

/// `2 - 2^{-l(n, m)}`.
pub fn foo_double(n: u64, m: u64) -> Rational {
    Rational::from(2i64) - Rational::pow2_neg(halting_steps_l(n, m))
}

/// The sequences of the halting-time construction: `x_n = lim_m (2 - 2^{-l(n, m)})`
/// with modulus `M + 1`, `w_n = 1 - 1/n + x_n / (2n(n+1))` and `a_n = n w_n`.
///
/// `w` and `a` are only available as certified intervals.
#[derive(Clone, Debug)]
pub struct FooSequences {
    pub n_limit: u64,
    pub x: SeqStandardDescription,
}

pub fn foo_sequences(n_limit: u64) -> Result<FooSequences> {
    if n_limit == 0 {
        return Err(Error::Precondition("n_limit must be >= 1".into()));
    }
    Ok(FooSequences {
        n_limit,
        x: SeqStandardDescription {
            dseq: DoubleSeqDef::Builtin(DoubleBuiltin::Foo {}),
            modulus: Modulus2::expr("M + 1", DEFAULT_BUDGET)?,
        },
    })
}

impl FooSequences {
    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.n_limit {
            return Err(Error::Precondition(format!(
                "index {n} outside 1..={}",
                self.n_limit
            )));
        }
        Ok(())
    }

    /// `r_{n, M+1}`.
    pub fn x_approx(&self, n: u64, big_m: u64) -> Result<Rational> {
        self.check(n)?;
        crate::seq::approx_member(&self.x, n, big_m)
    }

    /// Closed interval containing `x_n`, of radius `2^{-M}`.
    pub fn x_interval(&self, n: u64, big_m: u64) -> Result<Interval> {
        let r = self.x_approx(n, big_m)?;
        Ok(Interval::ball(&r, &Rational::pow2_neg(big_m)))
    }

    /// Interval containing `w_n`, width at most `2^{-M}`.
    pub fn w_interval(&self, n: u64, big_m: u64) -> Result<Interval> {
        let x = self.x_interval(n, big_m)?;
        let scale = Rational::one().div_index(2 * n * (n + 1));
        let base = Rational::one() - Rational::one().div_index(n);
        Ok(x.scale_nonneg(&scale).add_scalar(&base))
    }

    /// Interval containing `a_n = n w_n`, width below `2^{-M}`.
    pub fn a_interval(&self, n: u64, big_m: u64) -> Result<Interval> {
        Ok(self
            .w_interval(n, big_m)?
            .scale_nonneg(&Rational::from(n)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuessEntry {
    /// Prefix length used as the guessed modulus.
    pub guess: u64,
    /// First program enumerated after the prefix.
    pub misclassified_program: u64,
    pub enumeration_position: u64,
    pub halt_step: u64,
    /// `t15` at the guess (0) against the true limit (1).
    pub t15_at_guess: Rational,
    pub t15_limit: Rational,
}

/// What happens when the enumeration prefix up to some length is taken as a
/// modulus for the `t15`/`t17` limits without a converse sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonUniformityReport {
    pub enumeration_size: u64,
    pub entries: Vec<GuessEntry>,
    /// Last enumerated program; every guess shorter than the enumeration
    /// classifies it as non-halting.
    pub latest: HaltRecord,
    pub misclassified_by_every_guess: bool,
}

pub fn non_uniformity_report(e: &EnumeratedSet, guesses: &[u64]) -> Result<NonUniformityReport> {
    let latest = *e
        .records
        .last()
        .ok_or_else(|| Error::Precondition("empty enumeration".into()))?;
    let size = e.len() as u64;
    let mut entries = Vec::new();
    for &g in guesses {
        if g == 0 || g >= size {
            return Err(Error::Precondition(format!(
                "guess {g} must lie in 1..{size}"
            )));
        }
        let rec = e.records[g as usize];
        entries.push(GuessEntry {
            guess: g,
            misclassified_program: rec.program_index,
            enumeration_position: g + 1,
            halt_step: rec.halt_step,
            t15_at_guess: t15_family(rec.program_index, g, e)?,
            t15_limit: t15_family(rec.program_index, size, e)?,
        });
    }
    let mut every = true;
    for &g in guesses {
        every &= t15_family(latest.program_index, g, e)?.is_zero();
    }
    Ok(NonUniformityReport {
        enumeration_size: size,
        entries,
        latest,
        misclassified_by_every_guess: every,
    })
}
