//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson).

use crate::error::{invalid, Error, Result};

/// Shape-preserving interpolant through `(xs[i], ys[i])`, `xs` strictly increasing.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(invalid("interpolation needs at least two matching samples"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("interpolation abscissae must be strictly increasing"));
        }
        let secants: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes = vec![secants[0]; 2];
        } else {
            for i in 1..n - 1 {
                let (d0, d1) = (secants[i - 1], secants[i]);
                if d0 * d1 > 0.0 {
                    // weighted harmonic mean, Fritsch–Butland form
                    let h0 = xs[i] - xs[i - 1];
                    let h1 = xs[i + 1] - xs[i];
                    let w0 = 2.0 * h1 + h0;
                    let w1 = h1 + 2.0 * h0;
                    slopes[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
                }
            }
            slopes[0] = end_slope(xs[1] - xs[0], xs[2] - xs[1], secants[0], secants[1]);
            slopes[n - 1] = end_slope(xs[n - 1] - xs[n - 2], xs[n - 2] - xs[n - 3], secants[n - 2], secants[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Evaluates at `x`; points outside the sampled range by more than a
    /// relative `1e-12` are a domain error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let slack = 1e-12 * (hi - lo).abs().max(hi.abs());
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::Domain(format!("{x} outside interpolation range [{lo}, {hi}]")));
        }
        let x = x.clamp(lo, hi);
        let i = match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => return Ok(self.ys[i]),
            Err(i) => i.clamp(1, self.xs.len() - 1) - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok(h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1])
    }
}

/// Three-point end slope, limited to preserve monotonicity.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproduces_nodes_and_linears() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let p = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(p.eval(*x).unwrap(), *y);
        }
        assert!((p.eval(0.45).unwrap() - (-0.1)).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let p = MonotoneCubic::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert!(matches!(p.eval(2.5), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn preserves_monotone_data(steps in prop::collection::vec(0.0f64..2.0, 3..12), t in 0.0f64..1.0) {
            let xs: Vec<f64> = (0..=steps.len()).map(|i| i as f64).collect();
            let mut ys = vec![0.0];
            for s in &steps {
                ys.push(ys.last().unwrap() + s);
            }
            let p = MonotoneCubic::new(xs.clone(), ys.clone()).unwrap();
            let x = t * steps.len() as f64;
            let i = (x.floor() as usize).min(steps.len() - 1);
            let v = p.eval(x).unwrap();
            prop_assert!(v >= ys[i] - 1e-12 && v <= ys[i + 1] + 1e-12);
        }
    }
}
