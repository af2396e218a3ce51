//! Order statistics for sweep aggregation.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stat {
    Median,
    Min,
    Max,
}

impl Stat {
    pub const ALL: [Stat; 3] = [Stat::Median, Stat::Min, Stat::Max];

    pub fn name(self) -> &'static str {
        match self {
            Stat::Median => "median",
            Stat::Min => "min",
            Stat::Max => "max",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Summary {
    /// `None` for an empty sample. The median of an even count is the
    /// mean of the two middle values.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Some(Summary {
            median,
            min: v[0],
            max: v[n - 1],
            samples: n,
        })
    }

    pub fn get(&self, stat: Stat) -> f64 {
        match stat {
            Stat::Median => self.median,
            Stat::Min => self.min,
            Stat::Max => self.max,
        }
    }
}
