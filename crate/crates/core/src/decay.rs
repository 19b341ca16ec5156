//! Decay functions `f: ℕ₊ → ℝ₊` with `f(1) = 1`.
//!
//! A decay function defines the lower-triangular Toeplitz matrix `M_f` with
//! `M_f[i, j] = f(i − j + 1)` for `i ≥ j`, so that `(M_f x)[t]` is the decaying
//! sum `Σ_{i ≤ t} x_i f(t − i + 1)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::SeriesInput;

#[derive(Debug, Clone, PartialEq)]
pub enum DecayFunction {
    /// `f(n) = 1`: continual counting.
    Constant,
    /// `f(n) = n^{−c}`.
    Polynomial { c: u32 },
    /// `f(n) = α^{−(n−1)}`, normalized so that `f(1) = 1`.
    Exponential { alpha: f64 },
    /// `f(n) = 1` for `n ≤ w`, else 0.
    SlidingWindow { w: usize },
    /// Explicit weights `f(1), f(2), …`; zero past the end of the table.
    Custom(Vec<f64>),
}

impl DecayFunction {
    pub fn polynomial(c: u32) -> Result<Self> {
        if c == 0 {
            return Err(Error::Domain("polynomial decay needs c ≥ 1".into()));
        }
        Ok(Self::Polynomial { c })
    }

    pub fn exponential(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::Domain(format!(
                "exponential decay needs finite α ≥ 1, got {alpha}"
            )));
        }
        Ok(Self::Exponential { alpha })
    }

    pub fn sliding_window(w: usize) -> Result<Self> {
        if w == 0 {
            return Err(Error::Domain("window size must be at least 1".into()));
        }
        Ok(Self::SlidingWindow { w })
    }

    /// Validates `f(1) = 1`, finiteness, non-negativity and monotonicity.
    pub fn custom(table: Vec<f64>) -> Result<Self> {
        match table.first() {
            None => return Err(Error::EmptyInput),
            Some(&first) if first != 1.0 => return Err(Error::NotNormalized(first)),
            _ => {}
        }
        if let Some(bad) = table.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!(
                "custom weights must be finite and non-negative, got {bad}"
            )));
        }
        if table.windows(2).any(|p| p[1] > p[0]) {
            return Err(Error::Domain(
                "custom weights must be non-increasing".into(),
            ));
        }
        Ok(Self::Custom(table))
    }

    /// `f(n)` for `n ≥ 1`.
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1, "decay functions are indexed from 1");
        match self {
            Self::Constant => 1.0,
            Self::Polynomial { c } => (n as f64).powi(-(*c as i32)),
            Self::Exponential { alpha } => alpha.powi(-((n - 1) as i32)),
            Self::SlidingWindow { w } => {
                if n <= *w {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Custom(table) => table.get(n - 1).copied().unwrap_or(0.0),
        }
    }

    /// `f(1), …, f(len)`.
    pub fn weights(&self, len: usize) -> Vec<f64> {
        (1..=len).map(|n| self.value(n)).collect()
    }

    pub fn is_window(&self) -> bool {
        matches!(self, Self::SlidingWindow { .. })
    }

    /// Symbol coefficients `g_n = f(n + 1)` for `n < horizon`.
    ///
    /// Sliding windows are routed through the block factorization and are
    /// rejected here.
    pub fn series_input(&self, horizon: usize) -> Result<SeriesInput> {
        if self.is_window() {
            return Err(Error::UnsupportedDecay(format!(
                "{self}: use the block factorization for sliding windows"
            )));
        }
        SeriesInput::new(self.weights(horizon))
    }

    /// Dense `M_f` (row-major, `horizon × horizon`).
    pub fn matrix(&self, horizon: usize) -> Vec<f64> {
        let w = self.weights(horizon);
        let mut m = vec![0.0; horizon * horizon];
        for i in 0..horizon {
            for j in 0..=i {
                m[i * horizon + j] = w[i - j];
            }
        }
        m
    }
}

impl fmt::Display for DecayFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant => write!(f, "const"),
            Self::Polynomial { c } => write!(f, "poly:{c}"),
            Self::Exponential { alpha } => write!(f, "exp:{alpha}"),
            Self::SlidingWindow { w } => write!(f, "window:{w}"),
            Self::Custom(table) => {
                write!(f, "custom:")?;
                for (i, v) in table.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `const`, `poly:<c>`, `exp:<α>`, `window:<w>` and
/// `custom:<f1>;<f2>;…` (commas are accepted as separators too).
impl FromStr for DecayFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s, None),
        };
        let need = |what: &str| {
            arg.ok_or_else(|| Error::Config(format!("decay `{kind}` needs a {what} argument")))
        };
        let bad = |e: &dyn fmt::Display| Error::Config(format!("invalid decay `{s}`: {e}"));
        match kind {
            "const" | "constant" => match arg {
                None => Ok(Self::Constant),
                Some(_) => Err(Error::Config("`const` takes no argument".into())),
            },
            "poly" | "polynomial" => {
                let c = need("degree")?.parse::<u32>().map_err(|e| bad(&e))?;
                Self::polynomial(c)
            }
            "exp" | "exponential" => {
                let alpha = need("base")?.parse::<f64>().map_err(|e| bad(&e))?;
                Self::exponential(alpha)
            }
            "window" | "sliding" => {
                let w = need("width")?.parse::<usize>().map_err(|e| bad(&e))?;
                Self::sliding_window(w)
            }
            "custom" => {
                let table = need("weight list")?
                    .split([';', ','])
                    .map(|v| v.trim().parse::<f64>().map_err(|e| bad(&e)))
                    .collect::<Result<Vec<_>>>()?;
                Self::custom(table)
            }
            other => Err(Error::Config(format!("unknown decay kind `{other}`"))),
        }
    }
}
