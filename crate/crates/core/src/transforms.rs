//! Conversions between ZW representations (sup/inf of a computable sequence
//! of computable reals) and super/subadditive representations.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::seq::{
    approx_member, AdditiveKind, AdditiveRepresentation, DoubleBuiltin, DoubleSeqDef,
    PrefixCache, SeqBuiltin, SeqDef, SeqStandardDescription,
};

/// 1-based diagonal pairing: `π(i, j) = (i+j-2)(i+j-1)/2 + j`.
pub fn cantor_pair(i: u64, j: u64) -> u64 {
    assert!(i >= 1 && j >= 1, "pairing is defined on indices >= 1");
    let d = i + j - 1;
    (d - 1) * d / 2 + j
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(k: u64) -> (u64, u64) {
    assert!(k >= 1, "unpairing is defined on indices >= 1");
    // smallest diagonal d with d(d+1)/2 >= k
    let kk = k as u128;
    let mut d = (((8 * kk + 1) as f64).sqrt() as u128).saturating_sub(1) / 2;
    while d * (d + 1) / 2 < kk {
        d += 1;
    }
    while d > 1 && (d - 1) * d / 2 >= kk {
        d -= 1;
    }
    let j = (kk - (d - 1) * d / 2) as u64;
    let i = d as u64 + 1 - j;
    (i, j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZwKind {
    /// Represents the supremum.
    Lower,
    /// Represents the infimum.
    Upper,
}

/// Standard description of a bounded sequence `z_n` of computable reals whose
/// supremum (lower) or infimum (upper) is the represented number.
///
/// Boundedness is declared, not checked.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZwRepresentation {
    pub kind: ZwKind,
    pub desc: SeqStandardDescription,
}

/// `r_{π1(n), κ(π1(n), π2(n))} ∓ 2^{-π2(n)}`: every term sits below (above)
/// the true `z_{π1(n)}`, and the error radius shrinks along the enumeration.
/// The comparison target is taken to be `z_{π1(n)}` itself; no other reading
/// of it is used anywhere.
pub fn zw_term(z: &ZwRepresentation, n: u64) -> Result<Rational> {
    let (i, j) = cantor_unpair(n);
    let r = approx_member(&z.desc, i, j)?;
    let radius = Rational::pow2_neg(j);
    Ok(match z.kind {
        ZwKind::Lower => r - radius,
        ZwKind::Upper => r + radius,
    })
}

/// Running max (lower) or min (upper) of [`zw_term`] over `1..=n`, in index order.
pub(crate) fn running_extreme(
    z: &ZwRepresentation,
    cache: &PrefixCache,
    n: u64,
) -> Result<Rational> {
    cache.get_or_extend(n, |k, prev| {
        let t = zw_term(z, k)?;
        Ok(match (prev, z.kind) {
            (None, _) => t,
            (Some(p), ZwKind::Lower) => t.max(p.clone()),
            (Some(p), ZwKind::Upper) => t.min(p.clone()),
        })
    })
}

/// Rational sequence with the same sup (inf) as `z`.
pub fn zw_flatten(z: &ZwRepresentation) -> SeqDef {
    SeqDef::Builtin(SeqBuiltin::ZwFlatten {
        source: Box::new(z.clone()),
    })
}

/// `a_n = n * max_{k <= n} flatten_k`, exact in `m` (`κ' ≡ 1`).
pub fn zw_to_superadditive(z: &ZwRepresentation) -> Result<AdditiveRepresentation> {
    if z.kind != ZwKind::Lower {
        return Err(Error::Precondition(
            "superadditive construction needs a lower ZW representation".into(),
        ));
    }
    Ok(AdditiveRepresentation {
        kind: AdditiveKind::Superadditive,
        desc: SeqStandardDescription {
            dseq: DoubleSeqDef::Builtin(DoubleBuiltin::ZwToSuper {
                source: Box::new(z.clone()),
                cache: PrefixCache::default(),
            }),
            modulus: crate::seq::Modulus2::exact(),
        },
    })
}

/// `a_n = n * min_{k <= n} flatten_k`, exact in `m` (`κ' ≡ 1`).
pub fn zw_to_subadditive(z: &ZwRepresentation) -> Result<AdditiveRepresentation> {
    if z.kind != ZwKind::Upper {
        return Err(Error::Precondition(
            "subadditive construction needs an upper ZW representation".into(),
        ));
    }
    Ok(AdditiveRepresentation {
        kind: AdditiveKind::Subadditive,
        desc: SeqStandardDescription {
            dseq: DoubleSeqDef::Builtin(DoubleBuiltin::ZwToSub {
                source: Box::new(z.clone()),
                cache: PrefixCache::default(),
            }),
            modulus: crate::seq::Modulus2::exact(),
        },
    })
}

/// `z_n = a_n / n`. Dividing by `n >= 1` only shrinks errors, so the modulus
/// of `a` carries over unchanged.
pub fn additive_to_zw(a: &AdditiveRepresentation) -> ZwRepresentation {
    let kind = match a.kind {
        AdditiveKind::Superadditive => ZwKind::Lower,
        AdditiveKind::Subadditive => ZwKind::Upper,
    };
    ZwRepresentation {
        kind,
        desc: SeqStandardDescription {
            dseq: DoubleSeqDef::Builtin(DoubleBuiltin::AdditiveToZw {
                source: Box::new(a.clone()),
            }),
            modulus: a.desc.modulus.clone(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::approx_member;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn zw(kind: ZwKind, text: &str) -> ZwRepresentation {
        ZwRepresentation {
            kind,
            desc: SeqStandardDescription::exact(text).unwrap(),
        }
    }

    fn member(a: &AdditiveRepresentation, n: u64) -> Rational {
        approx_member(&a.desc, n, 0).unwrap()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(cantor_pair(1, 1), 1);
        assert_eq!(cantor_pair(2, 1), 2);
        assert_eq!(cantor_pair(1, 2), 3);
        assert_eq!(cantor_pair(3, 1), 4);
        assert_eq!(cantor_pair(2, 2), 5);
        assert_eq!(cantor_pair(1, 3), 6);
        assert_eq!(cantor_unpair(1), (1, 1));
        assert_eq!(cantor_unpair(5), (2, 2));
    }

    #[test]
    fn pairing_round_trip() {
        for i in 1..=100 {
            for j in 1..=100 {
                assert_eq!(cantor_unpair(cantor_pair(i, j)), (i, j));
            }
        }
        for k in 1..=10_000 {
            let (i, j) = cantor_unpair(k);
            assert_eq!(cantor_pair(i, j), k);
        }
    }

    #[test]
    fn unpair_large_values() {
        for k in [u32::MAX as u64, 1 << 40, (1 << 50) + 12345] {
            let (i, j) = cantor_unpair(k);
            assert_eq!(cantor_pair(i, j), k);
        }
    }

    #[test]
    fn flatten_examples() {
        let lower = zw_flatten(&zw(ZwKind::Lower, "1"));
        let got: Vec<_> = (1..=3).map(|n| lower.eval(n).unwrap()).collect();
        assert_eq!(got, vec![q(1, 2), q(1, 2), q(3, 4)]);

        let upper = zw_flatten(&zw(ZwKind::Upper, "0"));
        let got: Vec<_> = (1..=3).map(|n| upper.eval(n).unwrap()).collect();
        assert_eq!(got, vec![q(1, 2), q(1, 2), q(1, 4)]);

        let zero = zw_flatten(&zw(ZwKind::Lower, "0"));
        for k in 0..8u64 {
            let mut best: Option<Rational> = None;
            for n in 1..=(1u64 << k) {
                let t = zero.eval(n).unwrap();
                assert!(t.is_negative());
                best = Some(best.map_or(t.clone(), |b| b.max(t)));
            }
            assert!(best.unwrap() >= -Rational::pow2_neg(k));
        }
    }

    #[test]
    fn superadditive_examples() {
        let a = zw_to_superadditive(&zw(ZwKind::Lower, "1")).unwrap();
        let got: Vec<_> = (1..=3).map(|n| member(&a, n)).collect();
        assert_eq!(got, vec![q(1, 2), q(1, 1), q(9, 4)]);
        // constant in m
        assert_eq!(a.desc.dseq.eval(3, 1).unwrap(), a.desc.dseq.eval(3, 40).unwrap());

        let z = zw_to_superadditive(&zw(ZwKind::Lower, "0")).unwrap();
        assert_eq!(member(&z, 1), q(-1, 2));
        for n in 1..=50 {
            assert!(!member(&z, n).is_positive());
        }
    }

    #[test]
    fn subadditive_examples() {
        let a = zw_to_subadditive(&zw(ZwKind::Upper, "0")).unwrap();
        let got: Vec<_> = (1..=3).map(|n| member(&a, n)).collect();
        assert_eq!(got, vec![q(1, 2), q(1, 1), q(3, 4)]);

        let one = zw_to_subadditive(&zw(ZwKind::Upper, "1")).unwrap();
        let mut prev: Option<Rational> = None;
        for n in 1..=60 {
            let ratio = member(&one, n).div_index(n);
            assert!(ratio > Rational::one());
            if let Some(p) = prev {
                assert!(ratio <= p);
            }
            prev = Some(ratio);
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        assert!(matches!(
            zw_to_superadditive(&zw(ZwKind::Upper, "1")),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            zw_to_subadditive(&zw(ZwKind::Lower, "1")),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn additive_to_zw_examples() {
        let sup = |text: &str| AdditiveRepresentation {
            kind: AdditiveKind::Superadditive,
            desc: SeqStandardDescription::exact(text).unwrap(),
        };
        let z = additive_to_zw(&sup("n"));
        assert_eq!(z.kind, ZwKind::Lower);
        for n in 1..=20 {
            assert_eq!(approx_member(&z.desc, n, 5).unwrap(), Rational::one());
        }

        let z = additive_to_zw(&sup("floor(3*n/2)"));
        let got: Vec<_> = (1..=4).map(|n| approx_member(&z.desc, n, 0).unwrap()).collect();
        assert_eq!(got, vec![q(1, 1), q(3, 2), q(4, 3), q(3, 2)]);
        assert_eq!(got.iter().max().unwrap(), &q(3, 2));

        let sub = AdditiveRepresentation {
            kind: AdditiveKind::Subadditive,
            desc: SeqStandardDescription::exact("n + 1").unwrap(),
        };
        let z = additive_to_zw(&sub);
        assert_eq!(z.kind, ZwKind::Upper);
        let inf = (1..=100)
            .map(|n| approx_member(&z.desc, n, 0).unwrap())
            .min()
            .unwrap();
        assert_eq!(inf, q(101, 100));
    }

    #[test]
    fn cached_and_direct_evaluation_agree() {
        let z = zw(ZwKind::Lower, "1 - pow2neg(n)");
        let a = zw_to_superadditive(&z).unwrap();
        // evaluate out of order to exercise the memo
        let late = member(&a, 40);
        let fresh = zw_to_superadditive(&z).unwrap();
        for n in 1..=40 {
            let direct = (1..=n)
                .map(|k| zw_term(&z, k).unwrap())
                .max()
                .unwrap()
                .mul_index(n);
            assert_eq!(member(&fresh, n), direct);
        }
        assert_eq!(late, member(&fresh, 40));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn pair_unpair_inverse(i in 1u64..1_000_000, j in 1u64..1_000_000) {
                prop_assert_eq!(cantor_unpair(cantor_pair(i, j)), (i, j));
            }
        }
    }
}
