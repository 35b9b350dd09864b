//! Named properties of whole loops: catalog identities, their conjunctions,
//! universal and semi-universal versions of identities, and the structural
//! predicates. Search specs and the CLI refer to properties by these names.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::identity::{self, eval_identity, CheckResult, Compiled, EvalError, EvalOptions, Identity};
use crate::isotopy::{check_isotopes, isotope_identity, isotope_specs, rl_automorphism_check, Side};
use crate::structure::{is_diassociative, is_power_associative, is_simple, stepping_up_check};
use crate::table::LoopTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropertyError {
    #[error("unknown property {0:?}")]
    Unknown(String),
    #[error("property {0:?}: {1}")]
    Syntax(String, String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Which principal isotopes a quantified property ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    /// Every principal isotope.
    Universal,
    /// Every left isotope.
    LeftSemi,
    /// Every right isotope.
    RightSemi,
    /// Every left and every right isotope.
    Semi,
}

impl Quantifier {
    fn side(self) -> Option<Side> {
        match self {
            Quantifier::Universal => None,
            Quantifier::LeftSemi => Some(Side::Left),
            Quantifier::RightSemi => Some(Side::Right),
            Quantifier::Semi => Some(Side::Both),
        }
    }

    fn prefix(self) -> &'static str {
        match self {
            Quantifier::Universal => "UF",
            Quantifier::LeftSemi => "left-SUF",
            Quantifier::RightSemi => "right-SUF",
            Quantifier::Semi => "SUF",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Property {
    /// A catalog entry or an inline identity.
    Equation { name: String, identity: Identity },
    /// LIP, RIP and AAIP.
    InverseProperty,
    /// LALT and RALT.
    Alternative,
    /// Any of M1, M2, N1, N2.
    Moufang,
    /// `name` holds in every isotope selected by the quantifier.
    Isotopic {
        quantifier: Quantifier,
        name: String,
        identity: Identity,
    },
    Diassociative,
    PowerAssociative,
    SteppingUp,
    RlAutomorphic,
    Simple,
}

fn annotate(r: CheckResult, name: &str) -> CheckResult {
    let detail = match &r.detail {
        Some(d) => format!("{name} fails: {d}"),
        None => format!("{name} fails"),
    };
    r.with_detail(detail)
}

fn catalog_equation(name: &str) -> Property {
    Property::Equation {
        name: name.to_string(),
        identity: identity::lookup(name).expect("catalog name").clone(),
    }
}

impl Property {
    pub fn parse(text: &str) -> Result<Property, PropertyError> {
        text.parse()
    }

    /// Evaluates the property on a complete table.
    pub fn check(&self, l: &LoopTable) -> Result<CheckResult, PropertyError> {
        let all = |names: &[&str]| -> Result<CheckResult, PropertyError> {
            for &name in names {
                let r = eval_identity(l, identity::lookup(name).expect("catalog name"))?;
                if !r.holds {
                    return Ok(annotate(r, name));
                }
            }
            Ok(CheckResult::pass())
        };
        Ok(match self {
            Property::Equation { identity, .. } => eval_identity(l, identity)?,
            Property::InverseProperty => all(&["LIP", "RIP", "AAIP"])?,
            Property::Alternative => all(&["LALT", "RALT"])?,
            Property::Moufang => {
                let mut first_failure = None;
                for name in ["M1", "M2", "N1", "N2"] {
                    let r = eval_identity(l, identity::lookup(name).expect("catalog name"))?;
                    if r.holds {
                        return Ok(CheckResult::pass());
                    }
                    first_failure.get_or_insert(annotate(r, name));
                }
                first_failure.expect("four checks ran")
            }
            Property::Isotopic {
                quantifier, identity, ..
            } => {
                let specs = isotope_specs(l, quantifier.side());
                let r = check_isotopes(l, &Compiled::new(identity), &specs, EvalOptions::default())?;
                match (r.failing_isotope, r.inner) {
                    (Some(s), Some(inner)) => {
                        let mut witness = vec![("a".to_string(), s.a), ("b".to_string(), s.b)];
                        witness.extend(inner.witness.unwrap_or_default());
                        CheckResult {
                            holds: false,
                            witness: Some(witness),
                            detail: inner.detail,
                        }
                    }
                    _ => CheckResult::pass(),
                }
            }
            Property::Diassociative => is_diassociative(l),
            Property::PowerAssociative => is_power_associative(l),
            Property::SteppingUp => stepping_up_check(l),
            Property::RlAutomorphic => rl_automorphism_check(l),
            Property::Simple => CheckResult::from_bool(is_simple(l)),
        })
    }

    /// Identities whose conjunction is equivalent to the property on every
    /// loop, when such a finite list is known. Used for search pruning.
    pub fn equations(&self) -> Option<Vec<(String, Identity)>> {
        let named = |names: &[&str]| {
            names
                .iter()
                .map(|&n| (n.to_string(), identity::lookup(n).expect("catalog name").clone()))
                .collect()
        };
        match self {
            Property::Equation { name, identity } => Some(vec![(name.clone(), identity.clone())]),
            Property::InverseProperty => Some(named(&["LIP", "RIP", "AAIP"])),
            Property::Alternative => Some(named(&["LALT", "RALT"])),
            Property::Isotopic {
                quantifier: Quantifier::Semi,
                name,
                identity,
            } => {
                let left = isotope_identity(identity, Some(Side::Left))?;
                let right = isotope_identity(identity, Some(Side::Right))?;
                Some(vec![(format!("left-SUF({name})"), left), (format!("right-SUF({name})"), right)])
            }
            Property::Isotopic {
                quantifier,
                name,
                identity,
            } => {
                let t = isotope_identity(identity, quantifier.side())?;
                Some(vec![(format!("{}({name})", quantifier.prefix()), t)])
            }
            _ => None,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Equation { name, .. } => f.write_str(name),
            Property::InverseProperty => f.write_str("IP"),
            Property::Alternative => f.write_str("ALT"),
            Property::Moufang => f.write_str("MOUFANG"),
            Property::Isotopic { quantifier, name, .. } => write!(f, "{}({name})", quantifier.prefix()),
            Property::Diassociative => f.write_str("DIASSOC"),
            Property::PowerAssociative => f.write_str("POWER-ASSOC"),
            Property::SteppingUp => f.write_str("STEPPING-UP"),
            Property::RlAutomorphic => f.write_str("RL-AUT"),
            Property::Simple => f.write_str("SIMPLE"),
        }
    }
}

fn equation(text: &str) -> Result<(String, Identity), PropertyError> {
    if let Some(id) = identity::lookup(text) {
        return Ok((text.to_string(), id.clone()));
    }
    if text.contains('=') {
        let id = identity::parse_identity(text).map_err(|e| PropertyError::Syntax(text.into(), e.to_string()))?;
        return Ok((id.to_string(), id));
    }
    Err(PropertyError::Unknown(text.to_string()))
}

impl FromStr for Property {
    type Err = PropertyError;

    /// Accepts catalog names, inline identities (`x*y = y*x`), `IP`, `ALT`,
    /// `MOUFANG`, `DIASSOC`, `POWER-ASSOC`, `STEPPING-UP`, `RL-AUT`, `SIMPLE`,
    /// and `UF(X)`, `left-SUF(X)`, `right-SUF(X)`, `SUF(X)` where `X` is an
    /// equation and defaults to `FLEX` when the parenthesis is omitted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        match text {
            "IP" => return Ok(Property::InverseProperty),
            "ALT" => return Ok(Property::Alternative),
            "MOUFANG" => return Ok(Property::Moufang),
            "DIASSOC" => return Ok(Property::Diassociative),
            "POWER-ASSOC" => return Ok(Property::PowerAssociative),
            "STEPPING-UP" => return Ok(Property::SteppingUp),
            "RL-AUT" => return Ok(Property::RlAutomorphic),
            "SIMPLE" => return Ok(Property::Simple),
            _ => {}
        }
        for quantifier in [
            Quantifier::LeftSemi,
            Quantifier::RightSemi,
            Quantifier::Semi,
            Quantifier::Universal,
        ] {
            let Some(rest) = text.strip_prefix(quantifier.prefix()) else {
                continue;
            };
            let inner = if rest.is_empty() {
                "FLEX"
            } else if let Some(inner) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                inner.trim()
            } else {
                continue;
            };
            let (name, identity) = equation(inner)?;
            return Ok(Property::Isotopic {
                quantifier,
                name,
                identity,
            });
        }
        let (name, identity) = equation(text)?;
        Ok(match name.as_str() {
            n if identity::lookup(n).is_some() => catalog_equation(n),
            _ => Property::Equation { name, identity },
        })
    }
}
