use rayon::prelude::*;

use super::{coupled_conditions, uncoupled_conditions, Mode};
use crate::error::{domain, Result};
use crate::model::{ParameterSet, SteadyState};

/// One axis of a parameter sweep: `count` evenly spaced values of `name`
/// from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self { name: name.to_string(), min, max, count }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
        }
    }

    fn validate(&self) -> Result<()> {
        ParameterSet::default().get(&self.name)?;
        if self.count < 2 {
            return domain(format!("axis {} needs at least 2 points", self.name));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return domain(format!("axis {} needs finite min < max", self.name));
        }
        Ok(())
    }
}

/// Condition flags of one cell; `None` marks a failed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellFlags {
    pub uc1: Option<bool>,
    pub uc2: Option<bool>,
    pub uc3: Option<bool>,
    pub c1: Option<bool>,
    pub c2: Option<bool>,
    pub c3: Option<bool>,
    pub disc: Option<bool>,
    pub patterning_uncoupled: Option<bool>,
    pub patterning_coupled: Option<bool>,
}

impl CellFlags {
    pub const NAMES: [&'static str; 9] = [
        "condUC1",
        "condUC2",
        "condUC3",
        "condC1",
        "condC2",
        "condC3",
        "condCDisc",
        "patterning_uncoupled",
        "patterning_coupled",
    ];

    pub fn as_array(&self) -> [Option<bool>; 9] {
        [
            self.uc1,
            self.uc2,
            self.uc3,
            self.c1,
            self.c2,
            self.c3,
            self.disc,
            self.patterning_uncoupled,
            self.patterning_coupled,
        ]
    }

    fn evaluate(p: &ParameterSet, k2_max: f64) -> Result<Self> {
        let s = SteadyState::new(p)?;
        let u = uncoupled_conditions(p, &s, k2_max)?;
        let c = coupled_conditions(p, &s, k2_max)?;
        Ok(Self {
            uc1: Some(u.uc1_holds),
            uc2: Some(u.uc2_holds),
            uc3: Some(u.uc3_holds),
            c1: Some(c.c1_holds),
            c2: Some(c.c2_holds),
            c3: Some(c.c3_holds),
            disc: Some(c.disc_holds),
            patterning_uncoupled: Some(u.patterning),
            patterning_coupled: Some(c.patterning),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpaceGrid {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    pub mode: Mode,
    /// Row-major, axis1 outer: cell (i1, i2) is at `i1 * axis2.count + i2`.
    pub cells: Vec<CellFlags>,
}

impl PatternSpaceGrid {
    pub fn cell(&self, i1: usize, i2: usize) -> &CellFlags {
        &self.cells[i1 * self.axis2.count + i2]
    }

    /// The patterning flag selected by `mode`.
    pub fn patterning(&self, i1: usize, i2: usize) -> Option<bool> {
        let c = self.cell(i1, i2);
        match self.mode {
            Mode::Uncoupled => c.patterning_uncoupled,
            Mode::Coupled => c.patterning_coupled,
        }
    }
}

/// Evaluate every condition on a 2D grid of parameter values. The steady
/// state is recomputed per cell. Cells are processed in parallel on the
/// current rayon pool; the output order does not depend on the pool size.
pub fn pattern_space(
    base: &ParameterSet,
    axis1: &AxisSpec,
    axis2: &AxisSpec,
    mode: Mode,
    k2_max: f64,
) -> Result<PatternSpaceGrid> {
    axis1.validate()?;
    axis2.validate()?;
    let n2 = axis2.count;
    let cells = (0..axis1.count * n2)
        .into_par_iter()
        .map(|idx| {
            let mut p = base.clone();
            p.set(&axis1.name, axis1.value(idx / n2)).expect("validated axis");
            p.set(&axis2.name, axis2.value(idx % n2)).expect("validated axis");
            CellFlags::evaluate(&p, k2_max).unwrap_or_default()
        })
        .collect();
    Ok(PatternSpaceGrid { axis1: axis1.clone(), axis2: axis2.clone(), mode, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::DEFAULT_K2_MAX;

    #[test]
    fn grid_has_every_cell() {
        let p = ParameterSet::default();
        let g = pattern_space(
            &p,
            &AxisSpec::new("m0", 0.1, 5.0, 7),
            &AxisSpec::new("alpha", 0.0, 12.0, 5),
            Mode::Uncoupled,
            DEFAULT_K2_MAX,
        )
        .unwrap();
        assert_eq!(g.cells.len(), 35);
        assert_eq!(g.axis1.value(6), 5.0);
        // alpha = 0 column never patterns
        for i in 0..7 {
            assert_eq!(g.patterning(i, 0), Some(false));
        }
    }

    #[test]
    fn invalid_cells_become_missing() {
        let p = ParameterSet::default();
        let g = pattern_space(
            &p,
            &AxisSpec::new("D_m", -0.01, 0.01, 3),
            &AxisSpec::new("alpha", 1.0, 2.0, 2),
            Mode::Coupled,
            DEFAULT_K2_MAX,
        )
        .unwrap();
        assert_eq!(g.cell(0, 0).patterning_coupled, None);
        assert_eq!(g.cell(1, 0).patterning_coupled, None);
        assert!(g.cell(2, 1).patterning_coupled.is_some());
    }

    #[test]
    fn axis_validation() {
        let p = ParameterSet::default();
        let ok = AxisSpec::new("alpha", 0.0, 1.0, 3);
        assert!(pattern_space(&p, &AxisSpec::new("bogus", 0.0, 1.0, 3), &ok, Mode::Coupled, 50.0).is_err());
        assert!(pattern_space(&p, &AxisSpec::new("m0", 0.0, 1.0, 1), &ok, Mode::Coupled, 50.0).is_err());
    }

    #[test]
    fn result_independent_of_pool_size() {
        let p = ParameterSet::default();
        let a1 = AxisSpec::new("m0", 0.1, 5.0, 20);
        let a2 = AxisSpec::new("kappa4", 0.0, 3.0, 20);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| pattern_space(&p, &a1, &a2, Mode::Uncoupled, DEFAULT_K2_MAX).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn raising_inactivation_shrinks_region() {
        let p = ParameterSet { alpha: 0.5, ..ParameterSet::default() };
        let a1 = AxisSpec::new("kappa1", 0.0, 0.2, 21);
        let a2 = AxisSpec::new("kappa4", 0.0, 4.0, 5);
        let g = pattern_space(&p, &a1, &a2, Mode::Uncoupled, DEFAULT_K2_MAX).unwrap();
        let counts: Vec<usize> = (0..5)
            .map(|j| (0..21).filter(|&i| g.patterning(i, j) == Some(true)).count())
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
        assert!(counts[4] < counts[0], "{counts:?}");
    }
}
