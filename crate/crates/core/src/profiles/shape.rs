use std::fmt;
use std::sync::Arc;

use exmex::prelude::*;

use crate::error::{Error, Result};
use crate::real::{sech, Real};

/// Closure-backed segment value.
pub type Closure<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// The functional form carried by a segment, evaluated in local time.
#[derive(Clone)]
pub enum Shape<T> {
    Constant(T),
    /// `from + (to - from) * (1 + tanh((t - center) / width)) / 2`
    Tanh {
        from: T,
        to: T,
        center: T,
        width: T,
    },
    /// `base + amplitude * sech^2(kappa * (t - center))`
    Sech2 {
        base: T,
        amplitude: T,
        kappa: T,
        center: T,
    },
    Samples(Samples<T>),
    Expr(Expr),
    Closure(Closure<T>),
}

impl<T: Real> Shape<T> {
    pub fn eval(&self, t: T) -> T {
        match self {
            Shape::Constant(v) => *v,
            Shape::Tanh { from, to, center, width } => {
                let half = T::lit(0.5);
                *from + (*to - *from) * half * (T::one() + ((t - *center) / *width).tanh())
            }
            Shape::Sech2 { base, amplitude, kappa, center } => {
                let s = sech(*kappa * (t - *center));
                *base + *amplitude * s * s
            }
            Shape::Samples(s) => s.eval(t),
            Shape::Expr(e) => T::lit(e.eval(t.as_f64())),
            Shape::Closure(f) => f(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Shape::Constant(_))
    }
}

impl<T: fmt::Debug> fmt::Debug for Shape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Shape::Tanh { from, to, center, width } => f
                .debug_struct("Tanh")
                .field("from", from)
                .field("to", to)
                .field("center", center)
                .field("width", width)
                .finish(),
            Shape::Sech2 { base, amplitude, kappa, center } => f
                .debug_struct("Sech2")
                .field("base", base)
                .field("amplitude", amplitude)
                .field("kappa", kappa)
                .field("center", center)
                .finish(),
            Shape::Samples(s) => f.debug_struct("Samples").field("len", &s.values.len()).finish(),
            Shape::Expr(e) => f.debug_tuple("Expr").field(&e.source).finish(),
            Shape::Closure(_) => f.write_str("Closure"),
        }
    }
}

/// Uniformly sampled values with C¹ cubic Hermite interpolation.
///
/// Node slopes come from fourth-order finite differences (one-sided near the
/// ends), so interpolation error is O(dt⁴) for smooth data.
#[derive(Clone)]
pub struct Samples<T> {
    start: T,
    dt: T,
    values: Arc<Vec<T>>,
    slopes: Arc<Vec<T>>,
}

impl<T: Real> Samples<T> {
    pub fn new(start: T, dt: T, values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidProfile("a sampled segment needs at least two values".into()));
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::InvalidProfile(format!("sample spacing must be positive, got {}", dt.as_f64())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("sampled values must be finite".into()));
        }
        let slopes = node_slopes(&values, dt);
        Ok(Samples { start, dt, values: Arc::new(values), slopes: Arc::new(slopes) })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn eval(&self, t: T) -> T {
        let n = self.values.len();
        let x = (t - self.start) / self.dt;
        let i = x.floor().to_isize().unwrap_or(0).clamp(0, n as isize - 2) as usize;
        let s = x - T::lit(i as f64);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * self.dt, self.slopes[i + 1] * self.dt);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }
}

fn node_slopes<T: Real>(v: &[T], dt: T) -> Vec<T> {
    let n = v.len();
    let l = T::lit;
    (0..n)
        .map(|i| {
            let d = if n < 5 {
                if n == 2 {
                    v[1] - v[0]
                } else if i == 0 {
                    (l(-3.0) * v[0] + l(4.0) * v[1] - v[2]) / l(2.0)
                } else if i == n - 1 {
                    (l(3.0) * v[n - 1] - l(4.0) * v[n - 2] + v[n - 3]) / l(2.0)
                } else {
                    (v[i + 1] - v[i - 1]) / l(2.0)
                }
            } else if i >= 2 && i + 2 < n {
                (v[i - 2] - l(8.0) * v[i - 1] + l(8.0) * v[i + 1] - v[i + 2]) / l(12.0)
            } else if i < 2 {
                // forward fourth-order stencil at offset i
                let w: [f64; 5] =
                    if i == 0 { [-25.0, 48.0, -36.0, 16.0, -3.0] } else { [-3.0, -10.0, 18.0, -6.0, 1.0] };
                (0..5).fold(T::zero(), |acc, k| acc + l(w[k]) * v[k]) / l(12.0)
            } else {
                let w: [f64; 5] =
                    if i == n - 1 { [3.0, -16.0, 36.0, -48.0, 25.0] } else { [-1.0, 6.0, -18.0, 10.0, 3.0] };
                (0..5).fold(T::zero(), |acc, k| acc + l(w[k]) * v[n - 5 + k]) / l(12.0)
            };
            d / dt
        })
        .collect()
}

/// A parsed expression in the single variable `t`.
#[derive(Clone)]
pub struct Expr {
    source: String,
    compiled: Arc<FlatEx<f64>>,
    uses_t: bool,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let compiled = exmex::parse::<f64>(source).map_err(|e| Error::Expression(e.to_string()))?;
        let vars: Vec<String> = compiled.var_names().to_vec();
        let uses_t = match vars.as_slice() {
            [] => false,
            [v] if v == "t" => true,
            other => {
                return Err(Error::Expression(format!("expressions may only use the variable `t`, found {:?}", other)))
            }
        };
        Ok(Expr { source: source.to_string(), compiled: Arc::new(compiled), uses_t })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, t: f64) -> f64 {
        let res = if self.uses_t { self.compiled.eval(&[t]) } else { self.compiled.eval(&[]) };
        res.unwrap_or(f64::NAN)
    }
}
