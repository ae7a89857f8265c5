//! Spreading-time measurements over a single run.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Infected-count series of one run plus per-node first-infection times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    n: usize,
    counts: Vec<u32>,
    infection_time: Vec<Option<usize>>,
    max_steps: usize,
}

impl Trajectory {
    pub(crate) fn new(
        n: usize,
        counts: Vec<u32>,
        infection_time: Vec<Option<usize>>,
        max_steps: usize,
    ) -> Self {
        debug_assert!(!counts.is_empty());
        debug_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        Trajectory {
            n,
            counts,
            infection_time,
            max_steps,
        }
    }

    /// Builds a trajectory from a bare count series (no per-node times).
    pub fn from_counts(n: usize, counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("counts", "count series must not be empty"));
        }
        if counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid(
                "counts",
                "count series must be non-decreasing",
            ));
        }
        if counts.iter().any(|&c| c as usize > n) {
            return Err(Error::invalid("counts", format!("count exceeds n = {n}")));
        }
        let max_steps = counts.len() - 1;
        Ok(Trajectory {
            n,
            counts,
            infection_time: Vec::new(),
            max_steps,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// `counts[t]` = infected nodes after step `t`; `counts[0]` is the seed count.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Last step index covered by the series.
    pub fn steps(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn final_count(&self) -> usize {
        *self.counts.last().unwrap() as usize
    }

    pub fn is_complete(&self) -> bool {
        self.final_count() == self.n
    }

    pub fn infection_time(&self, u: NodeId) -> Option<usize> {
        self.infection_time.get(u.index()).copied().flatten()
    }

    pub fn infection_times(&self) -> &[Option<usize>] {
        &self.infection_time
    }
}

/// A step count, or a censoring marker carrying the last observed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricResult {
    Value(usize),
    Censored(usize),
}

impl MetricResult {
    pub fn value(self) -> Option<usize> {
        match self {
            MetricResult::Value(v) => Some(v),
            MetricResult::Censored(_) => None,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, MetricResult::Censored(_))
    }
}

impl PartialOrd for MetricResult {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Values order numerically; any censored result ranks above every value.
impl Ord for MetricResult {
    fn cmp(&self, other: &Self) -> Ordering {
        use MetricResult::*;
        match (self, other) {
            (Value(a), Value(b)) => a.cmp(b),
            (Value(_), Censored(_)) => Ordering::Less,
            (Censored(_), Value(_)) => Ordering::Greater,
            (Censored(a), Censored(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for MetricResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricResult::Value(v) => write!(f, "{v}"),
            MetricResult::Censored(h) => write!(f, "censored({h})"),
        }
    }
}

/// Node count that "fraction `f` of `n` nodes" refers to: `ceil(f * n)`,
/// at least 1.
///
/// Products within 1e-9 (relative) of an integer snap to it first, so that
/// `0.07 * 100` means 7 nodes rather than 8.
pub fn threshold_count(f: f64, n: usize) -> usize {
    let x = f * n as f64;
    let nearest = x.round();
    let c = if (x - nearest).abs() <= 1e-9 * x.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    (c as usize).max(1)
}

fn check_fraction(name: &str, f: f64) -> Result<()> {
    if f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("fraction must lie in (0, 1], got {f}"),
        ))
    }
}

/// First step at which at least `ceil(f * n)` nodes are infected.
pub fn time_to_fraction(traj: &Trajectory, f: f64) -> Result<MetricResult> {
    check_fraction("f", f)?;
    let target = threshold_count(f, traj.n);
    Ok(traj
        .counts
        .iter()
        .position(|&c| c as usize >= target)
        .map_or(MetricResult::Censored(traj.steps()), MetricResult::Value))
}

/// Steps between reaching `f_lo` and reaching `f_hi`.
pub fn spread_time(traj: &Trajectory, f_lo: f64, f_hi: f64) -> Result<MetricResult> {
    check_fraction("f_lo", f_lo)?;
    check_fraction("f_hi", f_hi)?;
    if f_lo >= f_hi {
        return Err(Error::invalid(
            "f_lo",
            format!("must be smaller than f_hi ({f_lo} >= {f_hi})"),
        ));
    }
    let lo = time_to_fraction(traj, f_lo)?;
    let hi = time_to_fraction(traj, f_hi)?;
    Ok(match (lo, hi) {
        (MetricResult::Value(a), MetricResult::Value(b)) => MetricResult::Value(b - a),
        _ => MetricResult::Censored(traj.steps()),
    })
}

/// Infected fraction per step.
pub fn adoption_curve(traj: &Trajectory) -> Vec<f64> {
    let n = traj.n as f64;
    traj.counts.iter().map(|&c| f64::from(c) / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run, ModelKind, SeedSet, UpdateScheme};
    use crate::graph::directed_cycle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tr(n: usize, counts: &[u32]) -> Trajectory {
        Trajectory::from_counts(n, counts.to_vec()).unwrap()
    }

    #[test]
    fn fraction_examples() {
        let t = tr(100, &[1, 5, 12]);
        assert_eq!(time_to_fraction(&t, 0.01).unwrap(), MetricResult::Value(0));
        assert_eq!(time_to_fraction(&t, 0.05).unwrap(), MetricResult::Value(1));
        let slow = tr(100, &[1, 2, 3]);
        assert_eq!(
            time_to_fraction(&slow, 0.99).unwrap(),
            MetricResult::Censored(2)
        );
    }

    #[test]
    fn fraction_rejects_out_of_range() {
        let t = tr(100, &[1]);
        assert!(time_to_fraction(&t, 0.0).is_err());
        assert!(time_to_fraction(&t, 1.5).is_err());
        assert!(time_to_fraction(&t, f64::NAN).is_err());
    }

    #[test]
    fn threshold_snapping() {
        assert_eq!(threshold_count(0.07, 100), 7);
        assert_eq!(threshold_count(0.99, 100), 99);
        assert_eq!(threshold_count(0.01, 1000), 10);
        assert_eq!(threshold_count(0.015, 100), 2);
        assert_eq!(threshold_count(1.0, 13), 13);
        assert_eq!(threshold_count(1e-12, 100), 1);
    }

    #[test]
    fn spread_examples() {
        let mut counts = vec![0u32; 601];
        for (t, c) in counts.iter_mut().enumerate() {
            *c = if t < 120 {
                0
            } else if t < 520 {
                1
            } else {
                100
            };
        }
        let t = tr(100, &counts);
        assert_eq!(
            spread_time(&t, 0.01, 0.99).unwrap(),
            MetricResult::Value(400)
        );

        let full = tr(100, &[100]);
        assert_eq!(
            spread_time(&full, 0.01, 0.99).unwrap(),
            MetricResult::Value(0)
        );

        let stuck = tr(100, &[1, 40, 60]);
        assert_eq!(
            spread_time(&stuck, 0.01, 0.99).unwrap(),
            MetricResult::Censored(2)
        );

        assert!(spread_time(&full, 0.5, 0.5).is_err());
        assert!(spread_time(&full, 0.9, 0.1).is_err());
    }

    #[test]
    fn adoption_examples() {
        assert_eq!(adoption_curve(&tr(100, &[50, 100])), vec![0.5, 1.0]);
        assert_eq!(adoption_curve(&tr(7, &[7])), vec![1.0]);

        let g = directed_cycle(4).unwrap();
        let seeds = SeedSet::explicit(4, [NodeId(0)]).unwrap();
        let t = run(
            ModelKind::Group,
            &g,
            &seeds,
            UpdateScheme::Synchronous,
            100,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap();
        assert_eq!(adoption_curve(&t), vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn metric_ordering() {
        assert!(MetricResult::Value(10) < MetricResult::Value(11));
        assert!(MetricResult::Value(usize::MAX) < MetricResult::Censored(0));
    }

    #[test]
    fn from_counts_validation() {
        assert!(Trajectory::from_counts(10, vec![]).is_err());
        assert!(Trajectory::from_counts(10, vec![3, 2]).is_err());
        assert!(Trajectory::from_counts(10, vec![3, 11]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_traj() -> impl Strategy<Value = Trajectory> {
            (1usize..200).prop_flat_map(|n| {
                prop::collection::vec(0u32..=n as u32, 1..60).prop_map(move |mut c| {
                    c.sort_unstable();
                    Trajectory::from_counts(n, c).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn monotone_in_fraction(t in arb_traj(), a in 0.001f64..1.0, b in 0.001f64..1.0) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(time_to_fraction(&t, lo).unwrap() <= time_to_fraction(&t, hi).unwrap());
            }

            #[test]
            fn spread_non_negative_and_curve_bounded(t in arb_traj(), a in 0.001f64..0.5, b in 0.5f64..1.0) {
                prop_assume!(a < b);
                // Value(_) carries usize, so only the subtraction order can fail
                let _ = spread_time(&t, a, b).unwrap();
                let curve = adoption_curve(&t);
                prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
                prop_assert!(curve.iter().all(|&x| (0.0..=1.0).contains(&x)));
            }
        }
    }
}
