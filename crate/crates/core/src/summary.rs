use std::fmt;

use serde::{Deserialize, Serialize};

/// Mean and population standard deviation, shown as `7.70±0.95`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    /// `None` for an empty input.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Self {
            mean,
            std: var.sqrt(),
            n: values.len(),
        })
    }
}

impl fmt::Display for MeanStd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(2);
        write!(f, "{:.prec$}±{:.prec$}", self.mean, self.std)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std() {
        assert_eq!(MeanStd::of(&[7.0, 7.0, 7.0]).unwrap().to_string(), "7.00±0.00");
        assert_eq!(MeanStd::of(&[6.0, 8.0]).unwrap().to_string(), "7.00±1.00");
        assert_eq!(MeanStd::of(&[5.0, 4.0, 5.0, 4.0]).unwrap().to_string(), "4.50±0.50");
        assert_eq!(format!("{:.1}", MeanStd::of(&[1.0]).unwrap()), "1.0±0.0");
        assert!(MeanStd::of(&[]).is_none());
    }
}
