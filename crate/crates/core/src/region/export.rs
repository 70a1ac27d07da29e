//! Serializable forms of inequalities and verdicts. Rationals travel as
//! `"p/q"` strings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_list, parse};
use crate::resolution::LambdaVector;

use super::{Inequality, MembershipVerdict, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequalityRecord {
    pub lambda: Vec<String>,
    pub f: Vec<String>,
    pub theta: u32,
}

impl From<&Inequality> for InequalityRecord {
    fn from(q: &Inequality) -> Self {
        InequalityRecord {
            lambda: format_list(q.lambda.components()),
            f: format_list(&q.f.values),
            theta: q.theta,
        }
    }
}

impl InequalityRecord {
    /// Rebuilds the inequality, recomputing `f` and rejecting a record whose
    /// stored `f` or θ disagrees.
    pub fn to_inequality(&self) -> Result<Inequality> {
        let lambda = LambdaVector::new(
            self.lambda.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?,
        )?;
        let stored = self.f.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        let q = Inequality::new(lambda);
        if q.f.values != stored || q.theta != self.theta {
            return Err(Error::Property(format!(
                "record does not match recomputed inequality {q}"
            )));
        }
        Ok(q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessRecord {
    Violated {
        lambda: Vec<String>,
        f: Vec<String>,
        theta: u32,
    },
    Allocation {
        r: Vec<Vec<String>>,
    },
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        match w {
            Witness::Violated(q) => {
                let rec = InequalityRecord::from(q);
                WitnessRecord::Violated {
                    lambda: rec.lambda,
                    f: rec.f,
                    theta: rec.theta,
                }
            }
            Witness::Allocation(a) => WitnessRecord::Allocation {
                r: a.r.iter().map(|row| format_list(row)).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub achievable: bool,
    pub method: String,
    pub witness: Option<WitnessRecord>,
}

impl From<&MembershipVerdict> for VerdictRecord {
    fn from(v: &MembershipVerdict) -> Self {
        VerdictRecord {
            achievable: v.achievable,
            method: v.method.as_str().to_string(),
            witness: v.witness.as_ref().map(WitnessRecord::from),
        }
    }
}
