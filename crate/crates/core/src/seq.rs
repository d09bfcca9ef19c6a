//! Sequences, moduli of convergence and standard descriptions.
//!
//! Everything is 1-based: sequences are indexed by `n >= 1`, double sequences
//! by `(n, m)` with `m` the approximation index, and moduli map a precision
//! `M >= 0` to an index. Properties of limits (monotonicity of the true values,
//! a common limit, boundedness) are caller-declared contracts; this module
//! only evaluates.

use std::fmt;
use std::marker::PhantomData;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Rational;
use crate::dsl::{self, Bindings, Expr, Var};
use crate::error::{Error, Result};
use crate::machines::{self, EnumeratedSet};
use crate::transforms::{self, ZwRepresentation};

/// Default search budget for moduli read from JSON without one.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

pub trait VarSet {
    const VARS: &'static [Var];
}

/// `n`
#[derive(Clone, Copy, Debug)]
pub struct SingleVars;
/// `n, m`
#[derive(Clone, Copy, Debug)]
pub struct DoubleVars;
/// `M`
#[derive(Clone, Copy, Debug)]
pub struct PrecisionVars;
/// `n, M`
#[derive(Clone, Copy, Debug)]
pub struct MemberPrecisionVars;

impl VarSet for SingleVars {
    const VARS: &'static [Var] = &[Var::N];
}
impl VarSet for DoubleVars {
    const VARS: &'static [Var] = &[Var::N, Var::SmallM];
}
impl VarSet for PrecisionVars {
    const VARS: &'static [Var] = &[Var::BigM];
}
impl VarSet for MemberPrecisionVars {
    const VARS: &'static [Var] = &[Var::N, Var::BigM];
}

/// A DSL expression checked against the variable set `V`. Serializes as its
/// source text.
pub struct Formula<V> {
    text: String,
    expr: Expr,
    _vars: PhantomData<fn() -> V>,
}

impl<V: VarSet> Formula<V> {
    pub fn parse(text: &str) -> Result<Self> {
        let expr = dsl::parse(text, V::VARS)?;
        Ok(Formula {
            text: text.to_string(),
            expr,
            _vars: PhantomData,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, b: &Bindings) -> Result<Rational> {
        dsl::eval_expr(&self.expr, b)
    }
}

impl<V> Clone for Formula<V> {
    fn clone(&self) -> Self {
        Formula {
            text: self.text.clone(),
            expr: self.expr.clone(),
            _vars: PhantomData,
        }
    }
}

impl<V> fmt::Debug for Formula<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.text)
    }
}

impl<V> Serialize for Formula<V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de, V: VarSet> Deserialize<'de> for Formula<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Formula::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Prefix memo shared between clones. Filled strictly in index order so the
/// cached prefix is exactly what direct evaluation would produce.
#[derive(Clone, Default)]
pub struct PrefixCache(Arc<Mutex<Vec<Rational>>>);

impl PrefixCache {
    /// Value at 1-based `n`, extending the prefix with `next(k, previous)`.
    pub(crate) fn get_or_extend(
        &self,
        n: u64,
        mut next: impl FnMut(u64, Option<&Rational>) -> Result<Rational>,
    ) -> Result<Rational> {
        let mut cache = self.0.lock().unwrap_or_else(|p| p.into_inner());
        while (cache.len() as u64) < n {
            let k = cache.len() as u64 + 1;
            let v = next(k, cache.last())?;
            cache.push(v);
        }
        Ok(cache[(n - 1) as usize].clone())
    }
}

impl fmt::Debug for PrefixCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PrefixCache")
    }
}

/// Lazily computed enumeration of halting programs, shared between clones.
#[derive(Clone, Default)]
pub struct EnumerationCache(Arc<OnceLock<Result<EnumeratedSet>>>);

impl EnumerationCache {
    pub(crate) fn get(&self, count: u64, tick_budget: u64) -> Result<&EnumeratedSet> {
        self.0
            .get_or_init(|| machines::enumerate_re(count, tick_budget))
            .as_ref()
            .map_err(Clone::clone)
    }
}

impl fmt::Debug for EnumerationCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("EnumerationCache")
    }
}

/// A total map `n -> Rational`, `n >= 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeqDef {
    Expr { text: Formula<SingleVars> },
    Builtin(SeqBuiltin),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum SeqBuiltin {
    /// Termwise sum.
    Sum { a: Box<SeqDef>, b: Box<SeqDef> },
    /// Termwise product.
    Product { a: Box<SeqDef>, b: Box<SeqDef> },
    /// Rational sequence with the same sup (inf) as a ZW representation.
    ZwFlatten { source: Box<ZwRepresentation> },
    /// Partial sums of `2^{-k}` over the first `n` enumerated programs.
    Specker {
        count: u64,
        tick_budget: u64,
        #[serde(skip)]
        cache: EnumerationCache,
    },
    /// Indicator of "program `m` is among the first `n` enumerated".
    T15 {
        m: u64,
        count: u64,
        tick_budget: u64,
        #[serde(skip)]
        cache: EnumerationCache,
    },
    /// `n` times the T15 indicator.
    T17 {
        m: u64,
        count: u64,
        tick_budget: u64,
        #[serde(skip)]
        cache: EnumerationCache,
    },
}

impl SeqDef {
    pub fn expr(text: &str) -> Result<Self> {
        Ok(SeqDef::Expr {
            text: Formula::parse(text)?,
        })
    }

    pub fn eval(&self, n: u64) -> Result<Rational> {
        if n == 0 {
            return Err(Error::Precondition("sequence index must be >= 1".into()));
        }
        match self {
            SeqDef::Expr { text } => text.eval(&Bindings::n(n)),
            SeqDef::Builtin(b) => match b {
                SeqBuiltin::Sum { a, b } => Ok(a.eval(n)? + b.eval(n)?),
                SeqBuiltin::Product { a, b } => Ok(a.eval(n)? * b.eval(n)?),
                SeqBuiltin::ZwFlatten { source } => transforms::zw_term(source, n),
                SeqBuiltin::Specker {
                    count,
                    tick_budget,
                    cache,
                } => machines::specker_term(n, cache.get(*count, *tick_budget)?),
                SeqBuiltin::T15 {
                    m,
                    count,
                    tick_budget,
                    cache,
                } => machines::t15_family(*m, n, cache.get(*count, *tick_budget)?),
                SeqBuiltin::T17 {
                    m,
                    count,
                    tick_budget,
                    cache,
                } => machines::t17_family(*m, n, cache.get(*count, *tick_budget)?),
            },
        }
    }
}

/// Evaluates `def` at `n >= 1`.
pub fn eval_seq(def: &SeqDef, n: u64) -> Result<Rational> {
    def.eval(n)
}

/// A total map `(n, m) -> Rational`, `n, m >= 1`; `m` is the approximation index.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DoubleSeqDef {
    Expr { text: Formula<DoubleVars> },
    Builtin(DoubleBuiltin),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum DoubleBuiltin {
    /// `n * max_{k <= n} flatten_k`, constant in `m`.
    ZwToSuper {
        source: Box<ZwRepresentation>,
        #[serde(skip)]
        cache: PrefixCache,
    },
    /// `n * min_{k <= n} flatten_k`, constant in `m`.
    ZwToSub {
        source: Box<ZwRepresentation>,
        #[serde(skip)]
        cache: PrefixCache,
    },
    /// `r_{n,m} / n` of an additive representation.
    AdditiveToZw {
        source: Box<crate::seq::AdditiveRepresentation>,
    },
    /// `2 - 2^{-l(n, m)}` with `l` the bounded halting time of program `n`.
    Foo {},
}

impl DoubleSeqDef {
    pub fn expr(text: &str) -> Result<Self> {
        Ok(DoubleSeqDef::Expr {
            text: Formula::parse(text)?,
        })
    }

    pub fn eval(&self, n: u64, m: u64) -> Result<Rational> {
        if n == 0 || m == 0 {
            return Err(Error::Precondition(
                "double sequence indices must be >= 1".into(),
            ));
        }
        match self {
            DoubleSeqDef::Expr { text } => text.eval(&Bindings::nm(n, m)),
            DoubleSeqDef::Builtin(b) => match b {
                DoubleBuiltin::ZwToSuper { source, cache } => {
                    Ok(transforms::running_extreme(source, cache, n)?.mul_index(n))
                }
                DoubleBuiltin::ZwToSub { source, cache } => {
                    Ok(transforms::running_extreme(source, cache, n)?.mul_index(n))
                }
                DoubleBuiltin::AdditiveToZw { source } => {
                    Ok(source.desc.dseq.eval(n, m)?.div_index(n))
                }
                DoubleBuiltin::Foo {} => Ok(machines::foo_double(n, m)),
            },
        }
    }
}

/// Converts an evaluated modulus value to an index in `[1, budget]`.
fn to_index(v: &Rational, budget: u64, what: &str) -> Result<u64> {
    let c = v.ceil().to_integer().unwrap_or_default();
    if c.sign() != num_bigint::Sign::Plus {
        return Ok(1);
    }
    match c.to_u64() {
        Some(k) if k <= budget => Ok(k),
        _ => Err(Error::budget(
            format!("{what} requested index {c}"),
            budget,
        )),
    }
}

/// `M -> index`, normalized to be non-decreasing by a running max.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Modulus {
    #[serde(flatten)]
    pub map: ModulusMap,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModulusMap {
    Expr { text: Formula<PrecisionVars> },
    /// `max(a(M), b(M))`
    Max { a: Box<Modulus>, b: Box<Modulus> },
    /// `inner(M + by)`
    Shift { inner: Box<Modulus>, by: u64 },
}

impl Modulus {
    pub fn expr(text: &str, budget: u64) -> Result<Self> {
        Ok(Modulus {
            map: ModulusMap::Expr {
                text: Formula::parse(text)?,
            },
            budget,
        })
    }

    fn raw(&self, big_m: u64) -> Result<u64> {
        match &self.map {
            ModulusMap::Expr { text } => to_index(
                &text.eval(&Bindings::precision(big_m))?,
                self.budget,
                "modulus",
            ),
            ModulusMap::Max { a, b } => Ok(a.eval(big_m)?.max(b.eval(big_m)?)),
            ModulusMap::Shift { inner, by } => inner.eval(big_m + by),
        }
    }

    /// `max_{M' <= M} raw(M')`, checked against the budget.
    pub fn eval(&self, big_m: u64) -> Result<u64> {
        let mut best = 1;
        match self.map {
            // children of composites are already non-decreasing
            ModulusMap::Max { .. } | ModulusMap::Shift { .. } => best = best.max(self.raw(big_m)?),
            ModulusMap::Expr { .. } => {
                for k in 0..=big_m {
                    best = best.max(self.raw(k)?);
                }
            }
        }
        if best > self.budget {
            return Err(Error::budget(
                format!("modulus at M={big_m} requested index {best}"),
                self.budget,
            ));
        }
        Ok(best)
    }
}

/// `(n, M) -> index`, non-decreasing in `M` for each `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Modulus2 {
    #[serde(flatten)]
    pub map: Modulus2Map,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Modulus2Map {
    Expr { text: Formula<MemberPrecisionVars> },
}

impl Modulus2 {
    pub fn expr(text: &str, budget: u64) -> Result<Self> {
        Ok(Modulus2 {
            map: Modulus2Map::Expr {
                text: Formula::parse(text)?,
            },
            budget,
        })
    }

    /// The modulus of an exact description, `κ ≡ 1`.
    pub fn exact() -> Self {
        Modulus2::expr("1", DEFAULT_BUDGET).unwrap_or_else(|_| unreachable!())
    }

    pub fn eval(&self, n: u64, big_m: u64) -> Result<u64> {
        let Modulus2Map::Expr { text } = &self.map;
        let mut best = 1;
        for k in 0..=big_m {
            let v = text.eval(&Bindings::n_precision(n, k))?;
            best = best.max(to_index(&v, self.budget, "modulus")?);
        }
        Ok(best)
    }
}

/// A computable real: approximations `r_n` and a modulus `κ` with
/// `|x - r_n| < 2^{-M}` for `n >= κ(M)` (declared).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StandardDescription {
    pub seq: SeqDef,
    pub modulus: Modulus,
}

impl StandardDescription {
    /// An exact rational, `r_n = value`, `κ ≡ 1`.
    pub fn constant(value: &Rational) -> Self {
        StandardDescription {
            seq: SeqDef::expr(&dsl::literal_text(value)).unwrap_or_else(|_| unreachable!()),
            modulus: Modulus::expr("1", DEFAULT_BUDGET).unwrap_or_else(|_| unreachable!()),
        }
    }
}

/// A computable sequence of computable reals: `|x_n - r_{n,m}| < 2^{-M}` for
/// `m >= κ(n, M)` (declared).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeqStandardDescription {
    pub dseq: DoubleSeqDef,
    pub modulus: Modulus2,
}

impl SeqStandardDescription {
    /// Exact description of the rational sequence given by `text` in `n`.
    pub fn exact(text: &str) -> Result<Self> {
        Ok(SeqStandardDescription {
            dseq: DoubleSeqDef::expr(text)?,
            modulus: Modulus2::exact(),
        })
    }

    pub fn new(dseq: &str, modulus: &str, budget: u64) -> Result<Self> {
        Ok(SeqStandardDescription {
            dseq: DoubleSeqDef::expr(dseq)?,
            modulus: Modulus2::expr(modulus, budget)?,
        })
    }
}

/// Non-decreasing lower and non-increasing upper sequence with a common limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotoneRepresentation {
    pub lower: SeqStandardDescription,
    pub upper: SeqStandardDescription,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdditiveKind {
    Superadditive,
    Subadditive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdditiveRepresentation {
    pub kind: AdditiveKind,
    pub desc: SeqStandardDescription,
}

/// `r_{κ(M)}`.
pub fn approx_real(d: &StandardDescription, big_m: u64) -> Result<Rational> {
    let k = d.modulus.eval(big_m)?;
    d.seq.eval(k)
}

/// `r_{n, κ(n, M)}`.
pub fn approx_member(d: &SeqStandardDescription, n: u64, big_m: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Precondition("member index must be >= 1".into()));
    }
    let k = d.modulus.eval(n, big_m)?;
    d.dseq.eval(n, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldOp {
    Add,
    Mul,
}

/// Standard description of `x_a + x_b` or `x_a * x_b`.
///
/// Addition shifts both moduli by one bit. Multiplication bounds both factors
/// by `B = max(|a_{κ(0)}|, |b_{κ(0)}|) + 1` and shifts by `2 + ceil(log2 B)`.
pub fn real_field_op(
    op: FieldOp,
    a: &StandardDescription,
    b: &StandardDescription,
) -> Result<StandardDescription> {
    let shift = match op {
        FieldOp::Add => 1,
        FieldOp::Mul => {
            let ma = approx_real(a, 0)?.abs();
            let mb = approx_real(b, 0)?.abs();
            let bound = ma.max(mb) + Rational::one();
            2 + bound.ceil_log2_abs()
        }
    };
    let (x, y) = (Box::new(a.seq.clone()), Box::new(b.seq.clone()));
    let seq = SeqDef::Builtin(match op {
        FieldOp::Add => SeqBuiltin::Sum { a: x, b: y },
        FieldOp::Mul => SeqBuiltin::Product { a: x, b: y },
    });
    let shifted = |m: &Modulus| {
        Box::new(Modulus {
            map: ModulusMap::Shift {
                inner: Box::new(m.clone()),
                by: shift,
            },
            budget: m.budget,
        })
    };
    let modulus = Modulus {
        map: ModulusMap::Max {
            a: shifted(&a.modulus),
            b: shifted(&b.modulus),
        },
        budget: a.modulus.budget.max(b.modulus.budget),
    };
    Ok(StandardDescription { seq, modulus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn desc(seq: &str, modulus: &str, budget: u64) -> StandardDescription {
        StandardDescription {
            seq: SeqDef::expr(seq).unwrap(),
            modulus: Modulus::expr(modulus, budget).unwrap(),
        }
    }

    #[test]
    fn eval_seq_examples() {
        assert_eq!(eval_seq(&SeqDef::expr("1 - 1/n").unwrap(), 4).unwrap(), q(3, 4));
        assert_eq!(
            eval_seq(&SeqDef::expr("floor(3*n/2)").unwrap(), 5).unwrap(),
            q(7, 1)
        );
        assert!(matches!(
            eval_seq(&SeqDef::expr("1/(n-3)").unwrap(), 3),
            Err(Error::Eval(_))
        ));
        assert!(matches!(
            eval_seq(&SeqDef::expr("n").unwrap(), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn approx_real_examples() {
        let d = desc("1 - 1/n", "pow2neg(0 - M) + 1", 1_000_000);
        // κ(3) = 9
        assert_eq!(approx_real(&d, 3).unwrap(), q(8, 9));
        assert!((Rational::one() - approx_real(&d, 3).unwrap()) < q(1, 8));

        let c = desc("5", "1", 10);
        assert_eq!(approx_real(&c, 20).unwrap(), q(5, 1));

        let tight = desc("1 - 1/n", "pow2neg(0 - M)", 10);
        assert!(matches!(
            approx_real(&tight, 5),
            Err(Error::BudgetExhausted { budget: 10, .. })
        ));
    }

    #[test]
    fn approx_member_examples() {
        let exact = SeqStandardDescription::new("1 - 1/n", "1", 100).unwrap();
        assert_eq!(approx_member(&exact, 2, 10).unwrap(), q(1, 2));

        let d = SeqStandardDescription::new("(1 - 1/n) * (1 - pow2neg(m))", "M + 1", 100)
            .unwrap();
        let v = approx_member(&d, 2, 1).unwrap();
        assert_eq!(v, q(3, 8));
        assert!((q(1, 2) - v).abs() < q(1, 2));

        assert!(matches!(
            approx_member(&exact, 0, 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn modulus_is_running_max() {
        // raw values 5, 4, 3, 2, ... normalize to 5 everywhere
        let m = Modulus::expr("max(5 - M, 1)", 100).unwrap();
        for k in 0..=32 {
            assert_eq!(m.eval(k).unwrap(), 5);
        }
        let g = Modulus::expr("M * M + 1", 10_000).unwrap();
        for k in 0..32 {
            assert!(g.eval(k + 1).unwrap() >= g.eval(k).unwrap());
        }
        // fractional and non-positive values round to valid indices
        let f = Modulus::expr("0 - 7/2", 10).unwrap();
        assert_eq!(f.eval(3).unwrap(), 1);
    }

    #[test]
    fn field_ops_on_constants() {
        let half = StandardDescription::constant(&q(1, 2));
        let third = StandardDescription::constant(&q(1, 3));
        let s = real_field_op(FieldOp::Add, &half, &third).unwrap();
        assert_eq!(approx_real(&s, 20).unwrap(), q(5, 6));

        let two = StandardDescription::constant(&q(2, 1));
        let three = StandardDescription::constant(&q(3, 1));
        let p = real_field_op(FieldOp::Mul, &two, &three).unwrap();
        assert_eq!(approx_real(&p, 20).unwrap(), q(6, 1));
    }

    #[test]
    fn field_add_of_converging_sequences() {
        let a = desc("1 - 1/n", "pow2neg(0 - M) + 1", 1 << 20);
        let b = desc("1/n", "pow2neg(0 - M) + 1", 1 << 20);
        let s = real_field_op(FieldOp::Add, &a, &b).unwrap();
        assert_eq!(s.modulus.eval(4).unwrap(), 33);
        let v = approx_real(&s, 4).unwrap();
        assert!((Rational::one() - v).abs() < q(1, 16));
    }

    #[test]
    fn field_mul_of_converging_sequences() {
        // x = 3, y = -2 approached from different sides
        let a = desc("3 - 1/n", "pow2neg(0 - M) + 1", 1 << 24);
        let b = desc("0 - 2 + 1/n", "pow2neg(0 - M) + 1", 1 << 24);
        let p = real_field_op(FieldOp::Mul, &a, &b).unwrap();
        for big_m in 0..=12 {
            let v = approx_real(&p, big_m).unwrap();
            assert!((q(-6, 1) - v).abs() < Rational::pow2_neg(big_m), "M={big_m}");
        }
    }

    #[test]
    fn json_schema_shapes() {
        let d = desc("1 - 1/n", "M + 1", 500);
        let j = serde_json::to_value(&d).unwrap();
        assert_eq!(j["seq"]["kind"], "expr");
        assert_eq!(j["seq"]["text"], "1 - 1/n");
        assert_eq!(j["modulus"]["kind"], "expr");
        assert_eq!(j["modulus"]["text"], "M + 1");
        assert_eq!(j["modulus"]["budget"], 500);

        let back: StandardDescription = serde_json::from_value(j).unwrap();
        assert_eq!(approx_real(&back, 3).unwrap(), q(3, 4));

        let no_budget: Modulus =
            serde_json::from_str(r#"{"kind":"expr","text":"M"}"#).unwrap();
        assert_eq!(no_budget.budget, DEFAULT_BUDGET);

        let bad = serde_json::from_str::<SeqDef>(r#"{"kind":"expr","text":"n + m"}"#);
        assert!(bad.is_err());

        let spk: SeqDef = serde_json::from_str(
            r#"{"kind":"builtin","name":"specker","params":{"count":3,"tick_budget":1000}}"#,
        )
        .unwrap();
        let round = serde_json::to_value(&spk).unwrap();
        assert_eq!(round["kind"], "builtin");
        assert_eq!(round["name"], "specker");
        assert_eq!(round["params"]["count"], 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // fixtures with known rational limits honour their declared contracts
            #[test]
            fn declared_contracts_hold(c_num in -50i64..50, c_den in 1i64..20, big_m in 0u64..=16, off in 0u64..=50) {
                let c = q(c_num, c_den);
                let fixtures = [
                    (format!("{} + 1/n", dsl::literal_text(&c)), "pow2neg(0 - M) + 1"),
                    (format!("{} - pow2neg(n)", dsl::literal_text(&c)), "M + 1"),
                    (format!("{} - 3 * pow2neg(n)", dsl::literal_text(&c)), "M + 3"),
                ];
                for (seq, modulus) in fixtures {
                    let d = desc(&seq, modulus, 1 << 20);
                    let k = d.modulus.eval(big_m).unwrap();
                    let r = d.seq.eval(k + off).unwrap();
                    prop_assert!((&c - r).abs() < Rational::pow2_neg(big_m));
                }
            }

            #[test]
            fn field_ops_within_radius(a_num in -40i64..40, a_den in 1i64..12, b_num in -40i64..40, b_den in 1i64..12) {
                let a = q(a_num, a_den);
                let b = q(b_num, b_den);
                let da = desc(&format!("{} + 1/n", dsl::literal_text(&a)), "pow2neg(0 - M) + 1", 1 << 32);
                let db = StandardDescription::constant(&b);
                let radius = Rational::pow2_neg(20);
                let s = approx_real(&real_field_op(FieldOp::Add, &da, &db).unwrap(), 20).unwrap();
                prop_assert!((&(&a + &b) - s).abs() < radius);
                let p = approx_real(&real_field_op(FieldOp::Mul, &da, &db).unwrap(), 20).unwrap();
                prop_assert!((&(&a * &b) - p).abs() < radius);
            }
        }
    }
}
