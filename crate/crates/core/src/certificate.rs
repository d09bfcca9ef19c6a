//! Self-contained, exactly replayable records of a modulus computation.

use serde::{Deserialize, Serialize};

use crate::arith::{Interval, Rational};
use crate::error::{Error, Result};
use crate::fekete::{fekete_modulus, fekete_modulus_rational, monotone_modulus, sandwich_modulus};
use crate::seq::{approx_member, AdditiveRepresentation, MonotoneRepresentation, SeqDef, SeqStandardDescription};

pub const SCHEMA: &str = "fekete-cert/1";

/// Width of the replay window past the modulus.
pub const SANDWICH_WINDOW: u64 = 50;
pub const FEKETE_WINDOW: u64 = 100;

/// Extra bits asked of inexact members during replay.
const REPLAY_GUARD_BITS: u64 = 8;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Subject {
    Sandwich {
        lower: SeqDef,
        upper: SeqDef,
    },
    FeketeRational {
        a: SeqDef,
        converse: SeqDef,
    },
    Fekete {
        superadditive: AdditiveRepresentation,
        subadditive: AdditiveRepresentation,
    },
    Monotone {
        w: MonotoneRepresentation,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub subject: Subject,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub n0: u64,
    pub kappa: u64,
    /// Claimed limit; when absent the replay uses the gap between the two
    /// sides instead.
    pub limit: Option<Rational>,
    pub checked_window: [u64; 2],
    pub verified: bool,
}

impl Certificate {
    /// Runs the modulus search for `subject` and replays the window.
    pub fn issue(subject: Subject, big_m: u64, budget: u64, limit: Option<Rational>) -> Result<Self> {
        let (n0, kappa, width) = match &subject {
            Subject::Sandwich { lower, upper } => {
                let n0 = sandwich_modulus(lower, upper, big_m, budget)?;
                (n0, n0, SANDWICH_WINDOW)
            }
            Subject::Monotone { w } => {
                let n0 = monotone_modulus(w, big_m, budget)?;
                (n0, n0, SANDWICH_WINDOW)
            }
            Subject::FeketeRational { a, converse } => {
                let r = fekete_modulus_rational(a, converse, big_m, budget)?;
                (r.n0, r.kappa, FEKETE_WINDOW)
            }
            Subject::Fekete {
                superadditive,
                subadditive,
            } => {
                let r = fekete_modulus(superadditive, subadditive, big_m, budget)?;
                (r.n0, r.kappa, FEKETE_WINDOW)
            }
        };
        let mut cert = Certificate {
            schema: SCHEMA.to_string(),
            subject,
            big_m,
            n0,
            kappa,
            limit,
            checked_window: [kappa, kappa + width],
            verified: false,
        };
        cert.verified = cert.replay()?.is_none();
        Ok(cert)
    }

    /// Checks the claimed inequality at every index of the window. Returns
    /// the first failing index, if any.
    pub fn replay(&self) -> Result<Option<u64>> {
        if self.schema != SCHEMA {
            return Err(Error::Invalid(format!("unknown schema `{}`", self.schema)));
        }
        let [lo, hi] = self.checked_window;
        if lo > hi || lo == 0 {
            return Err(Error::Invalid("empty checked window".into()));
        }
        let radius = Rational::pow2_neg(self.big_m);
        for n in lo..=hi {
            if !self.holds_at(n, &radius)? {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Replays the window and fails unless it holds and matches the
    /// recorded verdict.
    pub fn verify(&self) -> Result<()> {
        match self.replay()? {
            None if self.verified => Ok(()),
            None => Err(Error::CertificateViolation(
                "window holds but certificate is marked unverified".into(),
            )),
            Some(n) => Err(Error::CertificateViolation(format!(
                "claimed bound fails at n={n}"
            ))),
        }
    }

    fn holds_at(&self, n: u64, radius: &Rational) -> Result<bool> {
        let limit = self.limit.as_ref();
        Ok(match &self.subject {
            Subject::Sandwich { lower, upper } => {
                let (l, u) = (lower.eval(n)?, upper.eval(n)?);
                match limit {
                    Some(x) => (x - &l).abs() < *radius && (x - &u).abs() < *radius,
                    None => l <= u && &u - &l < *radius,
                }
            }
            Subject::Monotone { w } => {
                let l = member_interval(&w.lower, n, self.big_m, 1)?;
                let u = member_interval(&w.upper, n, self.big_m, 1)?;
                match limit {
                    Some(x) => l.within_of(x, radius) && u.within_of(x, radius),
                    None => &u.hi - &l.lo < *radius,
                }
            }
            Subject::FeketeRational { a, converse } => {
                let ratio = a.eval(n)?.div_index(n);
                match limit {
                    Some(x) => (x - &ratio).abs() < *radius,
                    None => {
                        let c = converse.eval(n)?;
                        ratio <= c && &c - &ratio < *radius
                    }
                }
            }
            Subject::Fekete {
                superadditive,
                subadditive,
            } => {
                let s = member_interval(&superadditive.desc, n, self.big_m, n)?;
                match limit {
                    Some(x) => s.within_of(x, radius),
                    None => {
                        let b = member_interval(&subadditive.desc, n, self.big_m, n)?;
                        &b.hi - &s.lo < *radius
                    }
                }
            }
        })
    }
}

/// Interval containing `x_n / scale`, from an approximation a few bits
/// finer than `2^{-M}`.
fn member_interval(d: &SeqStandardDescription, n: u64, big_m: u64, scale: u64) -> Result<Interval> {
    let prec = big_m + REPLAY_GUARD_BITS;
    let r = approx_member(d, n, prec)?;
    Ok(Interval::ball(&r, &Rational::pow2_neg(prec)).scale_nonneg(&Rational::one().div_index(scale)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> SeqDef {
        SeqDef::expr(text).unwrap()
    }

    #[test]
    fn sandwich_certificate_round_trip() {
        let subject = Subject::Sandwich {
            lower: s("1 - 1/n"),
            upper: s("1 + 1/n"),
        };
        let cert = Certificate::issue(subject, 3, 1000, Some(Rational::one())).unwrap();
        assert_eq!((cert.n0, cert.kappa), (17, 17));
        assert_eq!(cert.checked_window, [17, 67]);
        assert!(cert.verified);
        let json = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&json).unwrap();
        back.verify().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["M"], 3);
        assert_eq!(v["subject"]["kind"], "sandwich");
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let subject = Subject::Sandwich {
            lower: s("1 - 1/n"),
            upper: s("1 + 1/n"),
        };
        let mut cert = Certificate::issue(subject, 3, 1000, None).unwrap();
        assert!(cert.verified);
        cert.checked_window = [10, 60];
        assert!(matches!(cert.verify(), Err(Error::CertificateViolation(_))));
        cert.checked_window = [17, 67];
        cert.limit = Some(Rational::new(9, 8).unwrap());
        assert!(matches!(cert.verify(), Err(Error::CertificateViolation(_))));
        cert.schema = "other".into();
        assert!(matches!(cert.verify(), Err(Error::Invalid(_))));
    }

    #[test]
    fn fekete_certificates() {
        let subject = Subject::FeketeRational {
            a: s("floor(3*n/2)"),
            converse: s("3/2 + 1/n"),
        };
        let cert = Certificate::issue(subject, 1, 1000, Some(Rational::new(3, 2).unwrap())).unwrap();
        assert_eq!((cert.n0, cert.kappa), (7, 49));
        assert_eq!(cert.checked_window, [49, 149]);
        assert!(cert.verified);

        let rep = |kind, text| AdditiveRepresentation {
            kind,
            desc: SeqStandardDescription::exact(text).unwrap(),
        };
        use crate::seq::AdditiveKind::*;
        let subject = Subject::Fekete {
            superadditive: rep(Superadditive, "floor(3*n/2)"),
            subadditive: rep(Subadditive, "ceil(3*n/2)"),
        };
        let cert = Certificate::issue(subject, 2, 100_000, None).unwrap();
        assert!(cert.verified);
        cert.verify().unwrap();
    }

    #[test]
    fn monotone_certificate() {
        let subject = Subject::Monotone {
            w: MonotoneRepresentation {
                lower: SeqStandardDescription::exact("1 - pow2neg(n)").unwrap(),
                upper: SeqStandardDescription::exact("1 + pow2neg(n)").unwrap(),
            },
        };
        let cert = Certificate::issue(subject, 5, 1000, Some(Rational::one())).unwrap();
        assert!(cert.verified);
    }
}
