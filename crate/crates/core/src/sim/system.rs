use std::fmt::Debug;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::graph::{Stability, VertexId, WeightedDigraph};

/// One member of the family `x(t+1) = f_i(x, v)`, `y = h_i(x)`.
pub trait Subsystem: Debug + Send + Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn step(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64>;
    fn output(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// `x ↦ A x + B v`, `y = C x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSubsystem {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

impl LinearSubsystem {
    pub fn scalar(a: f64, b: f64, c: f64) -> Self {
        Self { a: DMatrix::from_element(1, 1, a), b: DMatrix::from_element(1, 1, b), c: DMatrix::from_element(1, 1, c) }
    }

    pub fn diagonal(diag: &[f64], input_gain: &[f64], output_gain: &[f64]) -> Self {
        Self {
            a: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
            b: DMatrix::from_diagonal(&DVector::from_column_slice(input_gain)),
            c: DMatrix::from_diagonal(&DVector::from_column_slice(output_gain)),
        }
    }
}

impl Subsystem for LinearSubsystem {
    fn state_dim(&self) -> usize {
        self.a.nrows()
    }
    fn input_dim(&self) -> usize {
        self.b.ncols()
    }
    fn output_dim(&self) -> usize {
        self.c.nrows()
    }
    fn step(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b * v
    }
    fn output(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.c * x
    }
}

/// Componentwise `x_k ↦ g_k · x_k / (1 + |x_k|) + b_k v_k`, output `y = x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaturatingSubsystem {
    pub gain: Vec<f64>,
    pub input_gain: Vec<f64>,
}

impl Subsystem for SaturatingSubsystem {
    fn state_dim(&self) -> usize {
        self.gain.len()
    }
    fn input_dim(&self) -> usize {
        self.input_gain.len()
    }
    fn output_dim(&self) -> usize {
        self.gain.len()
    }
    fn step(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            x.len(),
            x.iter()
                .zip(v.iter())
                .zip(self.gain.iter().zip(&self.input_gain))
                .map(|((&xk, &vk), (&g, &b))| g * xk / (1.0 + xk.abs()) + b * vk),
        )
    }
    fn output(&self, x: &DVector<f64>) -> DVector<f64> {
        x.clone()
    }
}

/// Serializable description of a built-in subsystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubsystemSpec {
    /// `x ↦ a x + b v`, `y = c x` on ℝ.
    Scalar {
        a: f64,
        #[serde(default)]
        b: f64,
        #[serde(default)]
        c: f64,
    },
    /// Diagonal dynamics with diagonal input and output gains (default zero).
    Diagonal {
        diag: Vec<f64>,
        #[serde(default)]
        b: Option<Vec<f64>>,
        #[serde(default)]
        c: Option<Vec<f64>>,
    },
    /// Dense matrices given row by row; `b` and `c` default to `d × d` zeros.
    Linear {
        a: Vec<Vec<f64>>,
        #[serde(default)]
        b: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        c: Option<Vec<Vec<f64>>>,
    },
    Saturating {
        gain: Vec<f64>,
        #[serde(default)]
        b: Option<Vec<f64>>,
    },
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, SimError> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(SimError::Spec(format!("{what}: matrix rows must be nonempty and of equal length")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

impl SubsystemSpec {
    pub fn build(&self) -> Result<Box<dyn Subsystem>, SimError> {
        Ok(match self {
            SubsystemSpec::Scalar { a, b, c } => Box::new(LinearSubsystem::scalar(*a, *b, *c)),
            SubsystemSpec::Diagonal { diag, b, c } => {
                let d = diag.len();
                if d == 0 {
                    return Err(SimError::Spec("diagonal: empty diag".into()));
                }
                let zeros = vec![0.0; d];
                let b = b.as_ref().unwrap_or(&zeros);
                let c = c.as_ref().unwrap_or(&zeros);
                if b.len() != d || c.len() != d {
                    return Err(SimError::Spec("diagonal: b and c must match diag length".into()));
                }
                Box::new(LinearSubsystem::diagonal(diag, b, c))
            }
            SubsystemSpec::Linear { a, b, c } => {
                let a = matrix(a, "linear.a")?;
                let d = a.nrows();
                if a.ncols() != d {
                    return Err(SimError::Spec("linear.a must be square".into()));
                }
                let b = b.as_ref().map(|m| matrix(m, "linear.b")).transpose()?.unwrap_or_else(|| DMatrix::zeros(d, d));
                let c = c.as_ref().map(|m| matrix(m, "linear.c")).transpose()?.unwrap_or_else(|| DMatrix::zeros(d, d));
                if b.nrows() != d || c.ncols() != d {
                    return Err(SimError::Spec("linear: b needs d rows and c needs d columns".into()));
                }
                Box::new(LinearSubsystem { a, b, c })
            }
            SubsystemSpec::Saturating { gain, b } => {
                if gain.is_empty() {
                    return Err(SimError::Spec("saturating: empty gain".into()));
                }
                let b = b.clone().unwrap_or_else(|| vec![0.0; gain.len()]);
                if b.len() != gain.len() {
                    return Err(SimError::Spec("saturating: b must match gain length".into()));
                }
                Box::new(SaturatingSubsystem { gain: gain.clone(), input_gain: b })
            }
        })
    }
}

/// The family of subsystems, indexed by vertex id.
#[derive(Debug)]
pub struct SwitchedSystem {
    subsystems: Vec<Box<dyn Subsystem>>,
    tags: Vec<Option<Stability>>,
    state_dim: usize,
    input_dim: usize,
    output_dim: usize,
}

impl SwitchedSystem {
    pub fn new(subsystems: Vec<Box<dyn Subsystem>>) -> Result<Self, SimError> {
        let first = subsystems.first().ok_or_else(|| SimError::Spec("system has no subsystems".into()))?;
        let (d, m, p) = (first.state_dim(), first.input_dim(), first.output_dim());
        for (i, s) in subsystems.iter().enumerate() {
            for (what, expected, got) in
                [("state", d, s.state_dim()), ("input", m, s.input_dim()), ("output", p, s.output_dim())]
            {
                if expected != got {
                    return Err(SimError::Dimension { what: format!("subsystem {i} {what}"), expected, got });
                }
            }
        }
        let tags = vec![None; subsystems.len()];
        Ok(Self { subsystems, tags, state_dim: d, input_dim: m, output_dim: p })
    }

    pub fn from_specs(specs: &[SubsystemSpec]) -> Result<Self, SimError> {
        Self::new(specs.iter().map(SubsystemSpec::build).collect::<Result<_, _>>()?)
    }

    /// Declares the stability of each subsystem (checked against a graph later).
    pub fn with_tags(mut self, tags: Vec<Option<Stability>>) -> Result<Self, SimError> {
        if tags.len() != self.subsystems.len() {
            return Err(SimError::Spec(format!("{} tags for {} subsystems", tags.len(), self.subsystems.len())));
        }
        self.tags = tags;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn subsystem(&self, v: VertexId) -> Result<&dyn Subsystem, SimError> {
        self.subsystems.get(v.0).map(|b| b.as_ref()).ok_or(SimError::UnknownSubsystem(v))
    }

    pub fn tag(&self, v: VertexId) -> Option<Stability> {
        self.tags.get(v.0).copied().flatten()
    }

    /// The index set must match the graph's vertex set, and declared stability
    /// tags must agree with the graph's partition.
    pub fn check_against(&self, g: &WeightedDigraph) -> Result<(), SimError> {
        if self.len() != g.vertex_count() {
            return Err(SimError::Dimension {
                what: "subsystem count vs graph vertices".into(),
                expected: g.vertex_count(),
                got: self.len(),
            });
        }
        for i in 0..self.len() {
            let v = VertexId(i);
            if let Some(tag) = self.tag(v) {
                if Some(tag) != g.stability(v) {
                    return Err(SimError::Spec(format!("subsystem {i} is tagged {tag:?} but the graph disagrees")));
                }
            }
        }
        Ok(())
    }
}
