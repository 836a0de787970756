//! Probe grids for certification sweeps.

use serde::{Deserialize, Serialize};

/// Uniform 1-D grid on `[lo, hi]` with `n` nodes. `include_lo = false` drops
/// the left endpoint (used for regions like `t ∈ (0, ε]` that must avoid the
/// degeneracy itself).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub include_lo: bool,
}

impl Axis {
    pub fn closed(lo: f64, hi: f64, n: usize) -> Self {
        Axis {
            lo,
            hi,
            n,
            include_lo: true,
        }
    }

    /// Grid on `(lo, hi]`: first node one spacing in from `lo`.
    pub fn half_open(lo: f64, hi: f64, n: usize) -> Self {
        Axis {
            lo,
            hi,
            n,
            include_lo: false,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        if self.n == 0 {
            return vec![];
        }
        if self.n == 1 {
            return vec![if self.include_lo { self.lo } else { self.hi }];
        }
        if self.include_lo {
            let h = (self.hi - self.lo) / (self.n - 1) as f64;
            (0..self.n).map(|k| self.lo + h * k as f64).collect()
        } else {
            let h = (self.hi - self.lo) / self.n as f64;
            (1..=self.n).map(|k| self.lo + h * k as f64).collect()
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.n <= 1 {
            return self.hi - self.lo;
        }
        if self.include_lo {
            (self.hi - self.lo) / (self.n - 1) as f64
        } else {
            (self.hi - self.lo) / self.n as f64
        }
    }

    /// Same extent, twice the node count (the refinement oracle's companion grid).
    pub fn refined(&self) -> Axis {
        Axis {
            n: self.n * 2,
            ..*self
        }
    }
}

/// Rectangular probe grid: tensor product of a `t` axis and a `y` axis.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub t: Axis,
    pub y: Axis,
}

impl GridSpec {
    pub fn points(&self) -> Vec<(f64, f64)> {
        let ts = self.t.nodes();
        let ys = self.y.nodes();
        let mut out = Vec::with_capacity(ts.len() * ys.len());
        for &y in &ys {
            for &t in &ts {
                out.push((t, y));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.t.n * self.y.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn refined(&self) -> GridSpec {
        GridSpec {
            t: self.t.refined(),
            y: self.y.refined(),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "t:[{:.6},{:.6}]x{}{} y:[{:.6},{:.6}]x{}",
            self.t.lo,
            self.t.hi,
            self.t.n,
            if self.t.include_lo { "" } else { " (open lo)" },
            self.y.lo,
            self.y.hi,
            self.y.n
        )
    }
}
