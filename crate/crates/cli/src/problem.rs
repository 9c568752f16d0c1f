//! JSON problem and solver-option files.

use std::path::Path;

use fracvar::solver::SolveOptions;
use fracvar::{
    BoundaryConditions, Constraint, ConstraintKind, EndCondition, FractionalParams, Grid,
    LagrangianExpr, ProblemSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fractional {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RightEnd {
    Fixed(f64),
    Free,
    Capped(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub left: Vec<f64>,
    pub right: Vec<RightEnd>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Equality,
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintEntry {
    pub integrand: String,
    pub target: f64,
    pub kind: Kind,
}

/// On-disk form of a variational problem.
///
/// ```json
/// {
///   "interval": {"a": 0, "b": 1},
///   "n": 1000,
///   "N": 1,
///   "fractional": {"alpha": 0.5, "beta": 0.5, "gamma": 1},
///   "lagrangian": "(dy1+Dy1)^2",
///   "boundary": {"left": [0], "right": [{"fixed": 0.556}]},
///   "constraints": [{"integrand": "dy1+Dy1", "target": 1, "kind": "equality"}]
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub interval: Interval,
    pub n: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    pub fractional: Fractional,
    pub lagrangian: String,
    pub boundary: Boundary,
    #[serde(default)]
    pub constraints: Vec<ConstraintEntry>,
}

impl ProblemFile {
    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let parse = |text: &str, what: &str| {
            LagrangianExpr::parse(text, self.dim)
                .map_err(|e| CliError::invalid(format!("{what} `{text}`: {e}")))
        };
        let lagrangian = parse(&self.lagrangian, "lagrangian")?;
        let f = &self.fractional;
        let params = FractionalParams::new(f.alpha, f.beta, f.gamma)?;
        let grid = Grid::new(self.interval.a, self.interval.b, self.n)?;
        if self.boundary.left.len() != self.dim || self.boundary.right.len() != self.dim {
            return Err(CliError::invalid(format!(
                "boundary needs {} left and right entries, got {} and {}",
                self.dim,
                self.boundary.left.len(),
                self.boundary.right.len()
            )));
        }
        let right = self
            .boundary
            .right
            .iter()
            .map(|r| match *r {
                RightEnd::Fixed(v) => EndCondition::Fixed(v),
                RightEnd::Free => EndCondition::Free,
                RightEnd::Capped(v) => EndCondition::Capped(v),
            })
            .collect();
        let bc = BoundaryConditions::new(self.boundary.left.clone(), right)?;
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(j, c)| {
                Ok(Constraint {
                    integrand: parse(&c.integrand, &format!("constraint {}", j + 1))?,
                    target: c.target,
                    kind: match c.kind {
                        Kind::Equality => ConstraintKind::Equality,
                        Kind::Inequality => ConstraintKind::Inequality,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemSpec::new(lagrangian, params, grid, bc, constraints)?)
    }

    pub fn from_spec(spec: &ProblemSpec) -> Self {
        let grid = spec.grid();
        let p = spec.params();
        ProblemFile {
            interval: Interval {
                a: grid.a(),
                b: grid.b(),
            },
            n: grid.n(),
            dim: spec.dim(),
            fractional: Fractional {
                alpha: p.alpha(),
                beta: p.beta(),
                gamma: p.gamma(),
            },
            lagrangian: spec.lagrangian().to_string(),
            boundary: Boundary {
                left: spec.bc().left().to_vec(),
                right: spec
                    .bc()
                    .right()
                    .iter()
                    .map(|e| match *e {
                        EndCondition::Fixed(v) => RightEnd::Fixed(v),
                        EndCondition::Free => RightEnd::Free,
                        EndCondition::Capped(v) => RightEnd::Capped(v),
                    })
                    .collect(),
            },
            constraints: spec
                .constraints()
                .iter()
                .map(|c| ConstraintEntry {
                    integrand: c.integrand.to_string(),
                    target: c.target,
                    kind: match c.kind {
                        ConstraintKind::Equality => Kind::Equality,
                        ConstraintKind::Inequality => Kind::Inequality,
                    },
                })
                .collect(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// Solver options file; every key is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsFile {
    pub max_iterations: Option<usize>,
    pub gradient_tolerance: Option<f64>,
    pub constraint_tolerance: Option<f64>,
    pub penalty_initial: Option<f64>,
    pub penalty_growth: Option<f64>,
    pub penalty_max: Option<f64>,
    pub memory: Option<usize>,
    pub seed: Option<u64>,
    pub perturbation: Option<f64>,
}

impl OptionsFile {
    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn to_options(&self) -> Result<SolveOptions> {
        let d = SolveOptions::default();
        let opts = SolveOptions {
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            gradient_tolerance: self.gradient_tolerance.or(d.gradient_tolerance),
            constraint_tolerance: self.constraint_tolerance.unwrap_or(d.constraint_tolerance),
            penalty_initial: self.penalty_initial.unwrap_or(d.penalty_initial),
            penalty_growth: self.penalty_growth.unwrap_or(d.penalty_growth),
            penalty_max: self.penalty_max.unwrap_or(d.penalty_max),
            memory: self.memory.unwrap_or(d.memory),
            seed: self.seed.unwrap_or(d.seed),
            perturbation: self.perturbation.or(d.perturbation),
        };
        opts.validate()?;
        Ok(opts)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = r#"{
        "interval": {"a": 0, "b": 1},
        "n": 100,
        "N": 1,
        "fractional": {"alpha": 0.5, "beta": 0.5, "gamma": 1},
        "lagrangian": "(dy1 + Dy1)^2",
        "boundary": {"left": [0], "right": [{"fixed": 0.556}]},
        "constraints": [{"integrand": "dy1 + Dy1", "target": 1, "kind": "equality"}]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let file: ProblemFile = serde_json::from_str(GOLDEN).unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.constraints().len(), 1);
        let again = ProblemFile::from_spec(&spec);
        let text = serde_json::to_string(&again).unwrap();
        let back: ProblemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_spec().unwrap(), spec);
    }

    #[test]
    fn boundary_variants() {
        let right: Vec<RightEnd> =
            serde_json::from_str(r#"[{"fixed": 1.5}, "free", {"capped": -2}]"#).unwrap();
        assert_eq!(right, vec![RightEnd::Fixed(1.5), RightEnd::Free, RightEnd::Capped(-2.0)]);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = GOLDEN.replace("\"n\": 100", "\"n\": 100, \"grid\": 3");
        assert!(serde_json::from_str::<ProblemFile>(&text).is_err());
        assert!(serde_json::from_str::<OptionsFile>(r#"{"tolerance": 1}"#).is_err());
    }

    #[test]
    fn invalid_problems_are_reported() {
        let mut file: ProblemFile = serde_json::from_str(GOLDEN).unwrap();
        file.lagrangian = "dy2^2".into();
        assert!(file.to_spec().is_err());
        let mut file: ProblemFile = serde_json::from_str(GOLDEN).unwrap();
        file.fractional.alpha = 1.5;
        assert!(file.to_spec().is_err());
    }

    #[test]
    fn options_default_and_validate() {
        let opts: OptionsFile = serde_json::from_str(r#"{"seed": 4}"#).unwrap();
        let o = opts.to_options().unwrap();
        assert_eq!(o.seed, 4);
        assert_eq!(o.max_iterations, 5000);
        let bad: OptionsFile = serde_json::from_str(r#"{"penalty_growth": 0.5}"#).unwrap();
        assert!(bad.to_options().is_err());
    }
}
