use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One piece `a x^2/2 + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Piece {
    pub fn eval(&self, x: f64) -> f64 {
        (0.5 * self.a * x + self.b) * x + self.c
    }

    pub fn slope(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

/// Continuous piecewise quadratic on the real line.
///
/// `pieces[i]` is active on `[breaks[i-1], breaks[i]]`, the outer pieces
/// extend to infinity. Slopes may jump upward at breakpoints (kinks).
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise1d {
    breaks: Vec<f64>,
    pieces: Vec<Piece>,
}

/// Selection inside the interval `[f'(x-), f'(x+)]` at a kink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubgradientPolicy {
    #[default]
    Canonical,
    Left,
    Right,
}

impl std::str::FromStr for SubgradientPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "canonical" => Ok(Self::Canonical),
            "left" => Ok(Self::Left),
            "right" => Ok(Self::Right),
            _ => Err(format!("unknown policy {s:?} (expected canonical, left or right)")),
        }
    }
}

impl std::fmt::Display for SubgradientPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Canonical => "canonical",
            Self::Left => "left",
            Self::Right => "right",
        })
    }
}

const MATCH_TOL: f64 = 1e-9;

impl Piecewise1d {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Piece>) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::InvalidOracle(format!(
                "{} breakpoints need {} pieces, got {}",
                breaks.len(),
                breaks.len() + 1,
                pieces.len()
            )));
        }
        if breaks.iter().any(|t| !t.is_finite())
            || pieces.iter().any(|p| !(p.a.is_finite() && p.b.is_finite() && p.c.is_finite()))
        {
            return Err(Error::InvalidOracle("non-finite coefficient".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidOracle("breakpoints must be strictly increasing".into()));
        }
        let f = Self { breaks, pieces };
        for (i, &t) in f.breaks.iter().enumerate() {
            let (l, r) = (f.pieces[i], f.pieces[i + 1]);
            let scale = 1.0 + l.eval(t).abs().max(r.eval(t).abs());
            if (l.eval(t) - r.eval(t)).abs() > MATCH_TOL * scale {
                return Err(Error::InvalidOracle(format!("discontinuous at breakpoint {t}")));
            }
            let sscale = 1.0 + l.slope(t).abs().max(r.slope(t).abs());
            if r.slope(t) - l.slope(t) < -MATCH_TOL * sscale {
                return Err(Error::InvalidOracle(format!("slope decreases at breakpoint {t}")));
            }
        }
        Ok(f)
    }

    /// Builds a function from per-piece curvatures and slope jumps.
    ///
    /// The first piece has slope `slope0` and value `value0` at `x = 0`.
    pub fn from_curvatures(
        breaks: &[f64],
        curvatures: &[f64],
        jumps: &[f64],
        slope0: f64,
        value0: f64,
    ) -> Result<Self> {
        if curvatures.len() != breaks.len() + 1 || jumps.len() != breaks.len() {
            return Err(Error::InvalidOracle("inconsistent piece counts".into()));
        }
        let mut pieces = Vec::with_capacity(curvatures.len());
        pieces.push(Piece { a: curvatures[0], b: slope0, c: value0 });
        for (i, &t) in breaks.iter().enumerate() {
            let prev = pieces[i];
            let a = curvatures[i + 1];
            let b = prev.slope(t) + jumps[i] - a * t;
            let c = prev.eval(t) - (0.5 * a * t + b) * t;
            pieces.push(Piece { a, b, c });
        }
        Self::new(breaks.to_vec(), pieces)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Largest slope jump over all breakpoints.
    pub fn max_jump(&self) -> f64 {
        self.breaks
            .iter()
            .enumerate()
            .map(|(i, &t)| self.pieces[i + 1].slope(t) - self.pieces[i].slope(t))
            .fold(0.0, f64::max)
    }

    /// True if some slope jump exceeds rounding level.
    pub fn has_kinks(&self) -> bool {
        self.breaks.iter().enumerate().any(|(i, &t)| {
            let (l, r) = (self.pieces[i].slope(t), self.pieces[i + 1].slope(t));
            r - l > MATCH_TOL * (1.0 + l.abs().max(r.abs()))
        })
    }

    pub fn curvature_range(&self) -> (f64, f64) {
        let lo = self.pieces.iter().map(|p| p.a).fold(f64::INFINITY, f64::min);
        let hi = self.pieces.iter().map(|p| p.a).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn locate(&self, x: f64) -> usize {
        self.breaks.partition_point(|&t| t < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.locate(x)].eval(x)
    }

    pub fn subgradient(&self, x: f64, policy: SubgradientPolicy) -> f64 {
        let i = self.locate(x);
        if i < self.breaks.len() && self.breaks[i] == x {
            let left = self.pieces[i].slope(x);
            let right = self.pieces[i + 1].slope(x);
            match policy {
                SubgradientPolicy::Canonical => 0.5 * (left + right),
                SubgradientPolicy::Left => left,
                SubgradientPolicy::Right => right,
            }
        } else {
            self.pieces[i].slope(x)
        }
    }

    /// A point `w` with `g` in the subdifferential at `w`, nearest to `anchor`.
    pub fn tilt_argmin_near(&self, g: f64, anchor: f64) -> Result<f64> {
        let (lo, hi) = (self.subgradient(anchor, SubgradientPolicy::Left), self.subgradient(anchor, SubgradientPolicy::Right));
        if lo <= g && g <= hi {
            return Ok(anchor);
        }
        let mut best: Option<f64> = None;
        let mut consider = |w: f64| {
            best = Some(match best {
                Some(b) if (b - anchor).abs() < (w - anchor).abs() => b,
                Some(b) if (b - anchor).abs() == (w - anchor).abs() && b < w => b,
                _ => w,
            });
        };
        let m = self.pieces.len();
        for (i, p) in self.pieces.iter().enumerate() {
            let lo = if i == 0 { f64::NEG_INFINITY } else { self.breaks[i - 1] };
            let hi = if i + 1 == m { f64::INFINITY } else { self.breaks[i] };
            if p.a != 0.0 {
                let w = (g - p.b) / p.a;
                if w >= lo && w <= hi {
                    consider(w);
                }
            } else if p.b == g {
                consider(anchor.clamp(lo, hi));
            }
        }
        for (i, &t) in self.breaks.iter().enumerate() {
            let left = self.pieces[i].slope(t);
            let right = self.pieces[i + 1].slope(t);
            if left <= g && g <= right {
                consider(t);
            }
        }
        best.ok_or_else(|| Error::Range(format!("{g}")))
    }

    pub fn shifted(&self, lambda: f64) -> Result<Self> {
        let pieces = self.pieces.iter().map(|p| Piece { a: p.a - lambda, ..*p }).collect();
        Self::new(self.breaks.clone(), pieces)
    }

    pub fn negated(&self) -> Result<Self> {
        if self.has_kinks() {
            return Err(Error::InvalidOracle("cannot negate a function with kinks".into()));
        }
        let pieces = self.pieces.iter().map(|p| Piece { a: -p.a, b: -p.b, c: -p.c }).collect();
        Self::new(self.breaks.clone(), pieces)
    }
}
