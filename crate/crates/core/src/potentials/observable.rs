use super::{dot, norm};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Cos(usize),
    Sin(usize),
    Tanh(usize),
    Constant(f64),
    Sigmoid(Vec<f64>),
}

/// A bounded Lipschitz test function phi.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    kind: Kind,
    name: String,
    lipschitz_k: f64,
    bound: f64,
}

impl Observable {
    pub fn cos(coord: usize) -> Self {
        Observable { kind: Kind::Cos(coord), name: format!("cos_x{coord}"), lipschitz_k: 1.0, bound: 1.0 }
    }

    pub fn sin(coord: usize) -> Self {
        Observable { kind: Kind::Sin(coord), name: format!("sin_x{coord}"), lipschitz_k: 1.0, bound: 1.0 }
    }

    pub fn tanh(coord: usize) -> Self {
        Observable { kind: Kind::Tanh(coord), name: format!("tanh_x{coord}"), lipschitz_k: 1.0, bound: 1.0 }
    }

    /// phi = c; Lipschitz constant reported as the smallest positive float.
    pub fn constant(c: f64) -> Self {
        Observable { kind: Kind::Constant(c), name: "constant".into(), lipschitz_k: f64::MIN_POSITIVE, bound: c.abs() }
    }

    /// Predictive probability sigmoid(x_new^T w); K = |x_new| / 4.
    pub fn sigmoid(x_new: Vec<f64>) -> Self {
        let k = (norm(&x_new) / 4.0).max(f64::MIN_POSITIVE);
        Observable { kind: Kind::Sigmoid(x_new), name: "sigmoid".into(), lipschitz_k: k, bound: 1.0 }
    }

    /// Observable by config name.
    pub fn by_name(name: &str, coord: usize, value: f64, d: usize) -> Result<Self> {
        if coord >= d && name != "constant" && name != "sigmoid" {
            return Err(Error::param("observable.coord", format!("coordinate {coord} outside dimension {d}")));
        }
        Ok(match name {
            "cos" => Observable::cos(coord),
            "sin" => Observable::sin(coord),
            "tanh" => Observable::tanh(coord),
            "constant" => Observable::constant(value),
            "sigmoid" => Observable::sigmoid(vec![1.0; d]),
            other => return Err(Error::UnknownObservable(other.to_string())),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz_k(&self) -> f64 {
        self.lipschitz_k
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Cos(i) => x[*i].cos(),
            Kind::Sin(i) => x[*i].sin(),
            Kind::Tanh(i) => x[*i].tanh(),
            Kind::Constant(c) => *c,
            Kind::Sigmoid(v) => 1.0 / (1.0 + (-dot(v, x)).exp()),
        }
    }
}
