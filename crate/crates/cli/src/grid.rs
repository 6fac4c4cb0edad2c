use std::str::FromStr;

use crate::error::CliError;

/// Sweep grid, either over reliability `r` or over control-mode error `P_EC`.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Reliability(Vec<f64>),
    ControlError(Vec<f64>),
}

impl Default for Grid {
    /// 101 evenly spaced reliabilities in `[0, 1]`.
    fn default() -> Self {
        Grid::Reliability(linspace(0.0, 1.0, 101))
    }
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

/// `start:stop:count`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl RangeSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.stop, self.count)
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(format!("expected start:stop:count, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let count = count
            .trim()
            .parse::<usize>()
            .map_err(|e| format!("`{count}`: {e}"))?;
        if count == 0 {
            return Err("grid needs at least one point".into());
        }
        Ok(RangeSpec {
            start: num(start)?,
            stop: num(stop)?,
            count,
        })
    }
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        match self {
            Grid::Reliability(v) | Grid::ControlError(v) => v,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let (values, hi, name) = match self {
            Grid::Reliability(v) => (v, 1.0, "r"),
            Grid::ControlError(v) => (v, 0.5, "P_EC"),
        };
        if values.is_empty() {
            return Err(CliError::Config("empty grid".into()));
        }
        if let Some(bad) = values.iter().find(|x| !(0.0..=hi).contains(*x)) {
            return Err(CliError::Config(format!(
                "{name} = {bad} outside [0, {hi}]"
            )));
        }
        Ok(())
    }
}
