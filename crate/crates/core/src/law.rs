//! Finite-weight laws `F` supported on `[0, ∞)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightLaw {
    Dirac(f64),
    /// Atoms `(value, mass)` sorted by value, masses summing to one.
    Atoms(Vec<(f64, f64)>),
    Uniform { lo: f64, hi: f64 },
}

impl WeightLaw {
    pub fn dirac(v: f64) -> Result<Self> {
        Self::validate(WeightLaw::Dirac(v))
    }

    pub fn atoms(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().filter(|a| a.1 > 0.0).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Merge repeated values.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        Self::validate(WeightLaw::Atoms(merged))
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::validate(WeightLaw::Uniform { lo, hi })
    }

    fn validate(law: Self) -> Result<Self> {
        match &law {
            WeightLaw::Dirac(v) => {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(Error::Config(format!("dirac atom {v} must be finite and ≥ 0")));
                }
            }
            WeightLaw::Atoms(atoms) => {
                if atoms.is_empty() {
                    return Err(Error::Config("atom list is empty".into()));
                }
                if atoms.iter().any(|(v, m)| !(v.is_finite() && *v >= 0.0) || !m.is_finite()) {
                    return Err(Error::Config("atoms must have finite values ≥ 0".into()));
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > MASS_TOLERANCE {
                    return Err(Error::Config(format!("atom masses sum to {total}, not 1")));
                }
            }
            WeightLaw::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo < hi) {
                    return Err(Error::Config(format!("uniform support [{lo}, {hi}] is invalid")));
                }
            }
        }
        Ok(law)
    }

    /// `F([0, t])`.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            WeightLaw::Dirac(v) => {
                if t >= *v {
                    1.0
                } else {
                    0.0
                }
            }
            WeightLaw::Atoms(atoms) => atoms.iter().take_while(|a| a.0 <= t).map(|a| a.1).sum::<f64>().min(1.0),
            WeightLaw::Uniform { lo, hi } => ((t - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    /// Left-continuous generalized inverse `inf{x : F(x) ≥ u}` for `u ∈ (0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            WeightLaw::Dirac(v) => *v,
            WeightLaw::Atoms(atoms) => {
                let mut acc = 0.0;
                for (v, m) in atoms {
                    acc += m;
                    if acc >= u {
                        return *v;
                    }
                }
                atoms[atoms.len() - 1].0
            }
            WeightLaw::Uniform { lo, hi } => lo + u.clamp(0.0, 1.0) * (hi - lo),
        }
    }

    /// `F({0})`.
    pub fn mass_at_zero(&self) -> f64 {
        match self {
            WeightLaw::Uniform { .. } => 0.0,
            _ => self.cdf(0.0),
        }
    }

    /// Finite support atoms, if the law is discrete.
    pub fn atom_list(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            WeightLaw::Dirac(v) => Some(alloc::vec![(*v, 1.0)]),
            WeightLaw::Atoms(a) => Some(a.clone()),
            WeightLaw::Uniform { .. } => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, WeightLaw::Uniform { .. })
    }

    pub fn mean(&self) -> f64 {
        match self {
            WeightLaw::Dirac(v) => *v,
            WeightLaw::Atoms(a) => a.iter().map(|(v, m)| v * m).sum(),
            WeightLaw::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }
}

impl fmt::Display for WeightLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightLaw::Dirac(v) => write!(f, "dirac:{v}"),
            WeightLaw::Atoms(atoms) => {
                f.write_str("atoms:")?;
                for (i, (v, m)) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}:{m}")?;
                }
                Ok(())
            }
            WeightLaw::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("`{s}` is not a number")))
}

impl FromStr for WeightLaw {
    type Err = Error;

    /// `dirac:1.0`, `atoms:0:0.5,3:0.5` or `uniform:0:1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("law `{s}` lacks a `kind:` prefix")))?;
        match kind {
            "dirac" => WeightLaw::dirac(number(rest)?),
            "atoms" => {
                let atoms = rest
                    .split(',')
                    .map(|pair| {
                        let (v, m) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::Config(format!("atom `{pair}` is not value:mass")))?;
                        Ok((number(v)?, number(m)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                WeightLaw::atoms(atoms)
            }
            "uniform" => {
                let (lo, hi) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Config(format!("uniform law `{rest}` is not lo:hi")))?;
                WeightLaw::uniform(number(lo)?, number(hi)?)
            }
            other => Err(Error::Config(format!("unknown law kind `{other}`"))),
        }
    }
}

impl WeightLaw {
    pub fn spec_string(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("dirac:1.0".parse::<WeightLaw>().unwrap(), WeightLaw::Dirac(1.0));
        assert_eq!(
            "atoms:0:0.5,3:0.5".parse::<WeightLaw>().unwrap(),
            WeightLaw::Atoms(alloc::vec![(0.0, 0.5), (3.0, 0.5)])
        );
        assert_eq!(
            "uniform:0:1".parse::<WeightLaw>().unwrap(),
            WeightLaw::Uniform { lo: 0.0, hi: 1.0 }
        );
        assert!("atoms:1:0.3".parse::<WeightLaw>().is_err());
        assert!("gamma:1".parse::<WeightLaw>().is_err());
        assert!("dirac:-1".parse::<WeightLaw>().is_err());
        assert!("uniform:2:1".parse::<WeightLaw>().is_err());
    }

    #[test]
    fn display_roundtrips() {
        for s in ["dirac:1", "atoms:0:0.5,3:0.5", "uniform:0:1"] {
            let law: WeightLaw = s.parse().unwrap();
            assert_eq!(law.to_string().parse::<WeightLaw>().unwrap(), law);
        }
    }

    #[test]
    fn quantile_is_left_continuous_inverse() {
        let law = WeightLaw::atoms([(1.0, 0.25), (2.0, 0.25), (5.0, 0.5)]).unwrap();
        assert_eq!(law.quantile(0.25), 1.0);
        assert_eq!(law.quantile(0.2500001), 2.0);
        assert_eq!(law.quantile(0.5), 2.0);
        assert_eq!(law.quantile(0.99), 5.0);
        // P(Q(V) ≤ λ) = F(λ) for an atom at λ.
        assert_eq!(law.cdf(2.0), 0.5);
        let u = WeightLaw::uniform(0.0, 2.0).unwrap();
        assert_eq!(u.quantile(0.25), 0.5);
        assert_eq!(u.cdf(0.5), 0.25);
    }

    #[test]
    fn atoms_merge_and_sort() {
        let law = WeightLaw::atoms([(3.0, 0.25), (1.0, 0.5), (3.0, 0.25)]).unwrap();
        assert_eq!(law, WeightLaw::Atoms(alloc::vec![(1.0, 0.5), (3.0, 0.5)]));
        assert_eq!(law.mass_at_zero(), 0.0);
        assert_eq!(WeightLaw::atoms([(0.0, 0.5), (3.0, 0.5)]).unwrap().mass_at_zero(), 0.5);
    }
}
