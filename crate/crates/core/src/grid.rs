//! Uniform space and time meshes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform mesh on `(x_a, x_b)` with `x_a > 0`, endpoints included as nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    x_a: f64,
    x_b: f64,
    nx: usize,
    h: f64,
}

impl SpatialGrid {
    pub fn new(x_a: f64, x_b: f64, nx: usize) -> Result<Self> {
        if !(x_a.is_finite() && x_b.is_finite()) {
            return Err(invalid("domain endpoints must be finite"));
        }
        if x_a <= 0.0 {
            return Err(invalid(format!("x_a must be positive, got {x_a}")));
        }
        if x_b <= x_a {
            return Err(invalid(format!("x_b ({x_b}) must exceed x_a ({x_a})")));
        }
        if nx < 3 {
            return Err(invalid(format!("nx must be at least 3, got {nx}")));
        }
        Ok(Self { x_a, x_b, nx, h: (x_b - x_a) / (nx - 1) as f64 })
    }

    /// Same as [`SpatialGrid::new`] without the positivity requirement on `x_a`.
    ///
    /// Only used for auxiliary axes such as quadrature checks on `[0, 1]`.
    pub fn unanchored(x_a: f64, x_b: f64, nx: usize) -> Result<Self> {
        if !(x_a.is_finite() && x_b.is_finite()) || x_b <= x_a || nx < 3 {
            return Err(invalid(format!("bad interval [{x_a}, {x_b}] with {nx} nodes")));
        }
        Ok(Self { x_a, x_b, nx, h: (x_b - x_a) / (nx - 1) as f64 })
    }

    pub fn x_a(&self) -> f64 {
        self.x_a
    }

    pub fn x_b(&self) -> f64 {
        self.x_b
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn length(&self) -> f64 {
        self.x_b - self.x_a
    }

    /// Coordinate of node `i`. The last node is pinned to `x_b` exactly.
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_b
        } else {
            self.x_a + i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    /// Grid with twice the resolution (`2(nx-1)+1` nodes) on the same interval.
    pub fn refined(&self) -> Self {
        Self { nx: 2 * (self.nx - 1) + 1, h: self.h / 2.0, ..*self }
    }
}

/// Uniform partition of `[0, T]` into `nt` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    nt: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, nt: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(invalid(format!("time horizon must be positive, got {horizon}")));
        }
        if nt < 1 {
            return Err(invalid("nt must be at least 1"));
        }
        Ok(Self { horizon, nt, dt: horizon / nt as f64 })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of stored time levels, `nt + 1`.
    pub fn levels(&self) -> usize {
        self.nt + 1
    }

    pub fn t(&self, m: usize) -> f64 {
        if m == self.nt {
            self.horizon
        } else {
            m as f64 * self.dt
        }
    }

    pub fn refined(&self) -> Self {
        Self { nt: 2 * self.nt, dt: self.dt / 2.0, ..*self }
    }
}
