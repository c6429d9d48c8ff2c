//! Text forms of the command-line parameters.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::Truncation;

fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let x: f64 = t
        .parse()
        .map_err(|_| Error::Parse(format!("`{t}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("`{t}` is not finite")));
    }
    Ok(x)
}

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let mut parts = s.split(',');
    let re = parse_real(parts.next().unwrap_or(""))?;
    let im = match parts.next() {
        Some(p) => parse_real(p)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(Error::Parse(format!("`{s}`: expected re[,im]")));
    }
    Ok(C64::new(re, im))
}

/// Upper bound on grid points, to keep a typo from exhausting memory.
pub const MAX_GRID_STEPS: usize = 1_000_000;

/// An inclusive, evenly spaced grid `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Grid> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        if steps > MAX_GRID_STEPS {
            return Err(Error::InvalidParameter(format!(
                "grid has {steps} steps, limit {MAX_GRID_STEPS}"
            )));
        }
        if min > max {
            return Err(Error::InvalidParameter(format!(
                "grid min {min} exceeds max {max}"
            )));
        }
        if !(max - min).is_finite() {
            return Err(Error::InvalidParameter("grid span overflows".into()));
        }
        Ok(Grid { min, max, steps })
    }

    /// Grid points; the last one is exactly `max`.
    pub fn values(&self) -> Vec<f64> {
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + h * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Grid> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, steps] = parts[..] else {
            return Err(Error::Parse(format!("`{s}`: expected min:max:steps")));
        };
        let steps = steps
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("`{steps}` is not a step count")))?;
        Grid::new(parse_real(min)?, parse_real(max)?, steps)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)
    }
}

pub fn parse_grid(s: &str) -> Result<Grid> {
    s.parse()
}

/// `N` (positive) or `auto`.
pub fn parse_truncation(s: &str) -> Result<Truncation> {
    let t = s.trim();
    if t == "auto" {
        return Ok(Truncation::Auto);
    }
    match t.parse::<usize>() {
        Ok(0) => Err(Error::InvalidParameter(
            "truncation must be positive".into(),
        )),
        Ok(n) => Ok(Truncation::Fixed(n)),
        Err(_) => Err(Error::Parse(format!(
            "`{t}`: expected a positive integer or `auto`"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    Standard,
    Lambda,
}

pub fn parse_basis(s: &str) -> Result<BasisChoice> {
    match s.trim() {
        "standard" => Ok(BasisChoice::Standard),
        "lambda" => Ok(BasisChoice::Lambda),
        other => Err(Error::Parse(format!(
            "`{other}`: expected standard or lambda"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("-1,2e-1").unwrap(), C64::new(-1.0, 0.2));
        assert_eq!(parse_complex(" 0 , -3 ").unwrap(), C64::new(0.0, -3.0));
        for bad in ["", "a", "1,2,3", "1,", "nan", "inf,0"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grid_forms() {
        let g = parse_grid("0:5:200").unwrap();
        let v = g.values();
        assert_eq!(v.len(), 200);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[199], 5.0);
        assert_eq!(parse_grid("0.02:0.9:150").unwrap().values()[149], 0.9);
        for bad in [
            "0:1",
            "0:1:1",
            "1:0:5",
            "0:1:x",
            "0:1:2:3",
            "a:1:3",
            "0:1:1000001",
            "-1e308:1e308:3",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn truncation_and_basis() {
        assert_eq!(parse_truncation("auto").unwrap(), Truncation::Auto);
        assert_eq!(parse_truncation("64").unwrap(), Truncation::Fixed(64));
        assert!(parse_truncation("0").is_err());
        assert!(parse_truncation("-3").is_err());
        assert_eq!(parse_basis("lambda").unwrap(), BasisChoice::Lambda);
        assert!(parse_basis("fock").is_err());
    }

    proptest! {
        #[test]
        fn grid_display_round_trips(min in -1e3f64..1e3, span in 0.0f64..1e3, steps in 2usize..1000) {
            let g = Grid::new(min, min + span, steps).unwrap();
            prop_assert_eq!(parse_grid(&g.to_string()).unwrap(), g);
        }

        #[test]
        fn grid_is_monotone(min in -10.0f64..10.0, span in 0.0f64..10.0, steps in 2usize..300) {
            let v = Grid::new(min, min + span, steps).unwrap().values();
            prop_assert!(v.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn parsers_never_panic(s in "\\PC*") {
            let _ = parse_complex(&s);
            let _ = parse_grid(&s);
            let _ = parse_truncation(&s);
            let _ = parse_basis(&s);
        }
    }
}
