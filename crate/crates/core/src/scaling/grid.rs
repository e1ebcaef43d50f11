use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform, strictly increasing axis `min, min + step, ...` with `len` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    /// Axis covering `[min, max]`; `max` is snapped to the nearest grid point.
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 || !min.is_finite() || !max.is_finite() || max < min {
            return Err(Error::Grid(format!("bad axis [{min}, {max}] step {step}")));
        }
        let len = ((max - min) / step).round() as usize + 1;
        Ok(Self { min, step, len })
    }

    /// `len` points spread evenly over `[min, max]`.
    pub fn linspace(min: f64, max: f64, len: usize) -> Result<Self> {
        if len < 2 || !min.is_finite() || !max.is_finite() || max <= min {
            return Err(Error::Grid(format!("bad linspace [{min}, {max}] with {len} points")));
        }
        Ok(Self { min, step: (max - min) / (len - 1) as f64, len })
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn max(&self) -> f64 {
        self.value(self.len - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction1D {
    pub axis: Axis,
    #[serde(with = "extended_reals")]
    pub values: Vec<f64>,
}

impl GridFunction1D {
    pub fn new(axis: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != axis.len {
            return Err(Error::Grid(format!("{} values for {} grid points", values.len(), axis.len)));
        }
        Ok(Self { axis, values })
    }

    pub fn sample(axis: Axis, f: impl Fn(f64) -> f64 + Sync) -> Self {
        let values = (0..axis.len).into_par_iter().map(|i| f(axis.value(i))).collect();
        Self { axis, values }
    }

    pub fn write_csv<W: Write>(&self, mut w: W, names: [&str; 2]) -> io::Result<()> {
        writeln!(w, "{},{}", names[0], names[1])?;
        for (i, &v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", fmt17(self.axis.value(i)), fmt17(v))?;
        }
        Ok(())
    }
}

/// Values on `x × y`, stored row-major (`x` outer).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction2D {
    pub x: Axis,
    pub y: Axis,
    #[serde(with = "extended_reals")]
    pub values: Vec<f64>,
}

impl GridFunction2D {
    pub fn new(x: Axis, y: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != x.len * y.len {
            return Err(Error::Grid(format!("{} values for {}x{} grid", values.len(), x.len, y.len)));
        }
        Ok(Self { x, y, values })
    }

    pub fn sample(x: Axis, y: Axis, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let values = (0..x.len * y.len)
            .into_par_iter()
            .map(|n| f(x.value(n / y.len), y.value(n % y.len)))
            .collect();
        Self { x, y, values }
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.y.len + k]
    }

    pub fn write_csv<W: Write>(&self, mut w: W, names: [&str; 3]) -> io::Result<()> {
        writeln!(w, "{},{},{}", names[0], names[1], names[2])?;
        for i in 0..self.x.len {
            for k in 0..self.y.len {
                writeln!(w, "{},{},{}", fmt17(self.x.value(i)), fmt17(self.y.value(k)), fmt17(self.get(i, k)))?;
            }
        }
        Ok(())
    }
}

/// 17 significant digits; non-finite values as `-inf`, `inf`, `nan`.
pub fn fmt17(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

/// JSON has no infinities: non-finite entries travel as the strings of [`fmt17`].
pub mod extended_reals {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|&x| if x.is_finite() { Repr::Num(x) } else { Repr::Text(super::fmt17(x)) })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Num(x) => Ok(x),
                Repr::Text(t) => match t.as_str() {
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "inf" => Ok(f64::INFINITY),
                    "nan" => Ok(f64::NAN),
                    other => Err(D::Error::custom(format!("bad number {other:?}"))),
                },
            })
            .collect()
    }
}
