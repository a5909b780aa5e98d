use std::str::FromStr;

use crate::error::{Error, Result};
use crate::primitives::PrimitiveSet;
use crate::problem::{Family, ProblemSpec, TrapParams};
use crate::tree::minimum_optimum_depth;

use super::{bisect_population_size, Algorithm, SizingSettings};

/// The built-in experiment families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanKind {
    /// Basic ORDER over increasing `l`.
    Order,
    /// Basic TRAP over increasing `l`.
    Trap,
    /// ORDER with `NEG_JOIN` over increasing `l`.
    OrderNeg,
    /// ORDER with `l / 5` junk terminals over increasing `l`.
    OrderJunk,
    /// ORDER at fixed `l` over increasing junk counts, at two depth limits.
    JunkFixedL,
}

impl PlanKind {
    pub const ALL: [PlanKind; 5] = [
        PlanKind::Order,
        PlanKind::Trap,
        PlanKind::OrderNeg,
        PlanKind::OrderJunk,
        PlanKind::JunkFixedL,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlanKind::Order => "order",
            PlanKind::Trap => "trap",
            PlanKind::OrderNeg => "order-neg",
            PlanKind::OrderJunk => "order-junk",
            PlanKind::JunkFixedL => "junk-fixed-l",
        }
    }

    /// Problem sizes `l`, or junk counts for [`PlanKind::JunkFixedL`].
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            PlanKind::Order | PlanKind::OrderNeg | PlanKind::OrderJunk => {
                vec![5, 10, 20, 40, 60, 80, 100]
            }
            PlanKind::Trap => vec![6, 12, 18, 21, 24, 33],
            PlanKind::JunkFixedL => vec![5, 10, 15, 20, 40],
        }
    }

    /// True when the swept quantity is the junk count rather than `l`.
    pub fn sweeps_junk(self) -> bool {
        self == PlanKind::JunkFixedL
    }
}

impl FromStr for PlanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlanKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown plan `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub kind: PlanKind,
    pub sizes: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Used by the TRAP plan.
    pub trap: TrapParams,
    /// Problem size for the fixed-`l` junk study.
    pub fixed_l: usize,
    /// Replaces the derived depth limit (or the 6 and 7 pair of the junk study).
    pub max_depth: Option<usize>,
    /// Run and sizing knobs; `max_depth` is filled in per row.
    pub sizing: SizingSettings,
    pub seed_base: u64,
}

impl SweepPlan {
    pub fn new(kind: PlanKind) -> Self {
        Self {
            kind,
            sizes: kind.default_sizes(),
            algorithms: vec![Algorithm::Gp, Algorithm::Pipe],
            trap: TrapParams::new(3, 1.0).expect("valid trap"),
            fixed_l: 20,
            max_depth: None,
            sizing: SizingSettings::new(0),
            seed_base: 1,
        }
    }

    /// Problem instances in sweep order, each with its depth limit.
    pub fn instances(&self) -> Result<Vec<(ProblemSpec, usize)>> {
        let derived = |l: usize| -> Result<usize> {
            Ok(match self.max_depth {
                Some(d) => d,
                None => minimum_optimum_depth(l)? + 1,
            })
        };
        let mut out = Vec::new();
        match self.kind {
            PlanKind::Order => {
                for &l in &self.sizes {
                    out.push((ProblemSpec::order(PrimitiveSet::basic(l)?), derived(l)?));
                }
            }
            PlanKind::Trap => {
                for &l in &self.sizes {
                    let spec = ProblemSpec::trap(PrimitiveSet::basic(l)?, self.trap)?;
                    out.push((spec, derived(l)?));
                }
            }
            PlanKind::OrderNeg => {
                for &l in &self.sizes {
                    let ps = PrimitiveSet::new(l, 0, true)?;
                    out.push((ProblemSpec::order(ps), derived(l)?));
                }
            }
            PlanKind::OrderJunk => {
                for &l in &self.sizes {
                    let ps = PrimitiveSet::new(l, l / 5, false)?;
                    out.push((ProblemSpec::order(ps), derived(l)?));
                }
            }
            PlanKind::JunkFixedL => {
                let depths = match self.max_depth {
                    Some(d) => vec![d],
                    None => vec![6, 7],
                };
                for depth in depths {
                    for &junk in &self.sizes {
                        let ps = PrimitiveSet::new(self.fixed_l, junk, false)?;
                        out.push((ProblemSpec::order(ps), depth));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One sized (algorithm, instance) combination.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub problem: String,
    pub l: usize,
    pub num_junk: usize,
    pub neg_join: bool,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub max_depth: usize,
    /// Sized population, or the ceiling when sizing gave up.
    pub pop_size: usize,
    pub avg_evaluations: f64,
    /// 1.0 for sized rows; the last batch's rate when sizing gave up.
    pub success_rate: f64,
    pub seed_base: u64,
}

impl SweepRow {
    pub fn sized(&self) -> bool {
        self.success_rate >= 1.0
    }
}

/// Sizes every algorithm on every instance of `plan`, calling `on_row` as rows complete.
pub fn scalability_sweep(
    plan: &SweepPlan,
    on_row: &mut dyn FnMut(&SweepRow),
) -> Result<Vec<SweepRow>> {
    let instances = plan.instances()?;
    let mut rows = Vec::with_capacity(instances.len() * plan.algorithms.len());
    for &algo in &plan.algorithms {
        for (spec, max_depth) in &instances {
            let settings = SizingSettings {
                max_depth: *max_depth,
                ..plan.sizing.clone()
            };
            let (pop_size, avg_evaluations, success_rate) =
                match bisect_population_size(spec, algo, &settings, plan.seed_base) {
                    Ok(sized) => (sized.min_pop_size, sized.avg_evaluations, 1.0),
                    Err(Error::SizingCeiling(failure)) => (
                        failure.last_pop_size,
                        failure.last_batch.avg_evaluations(),
                        failure.last_batch.success_rate(settings.runs),
                    ),
                    Err(e) => return Err(e),
                };
            let ps = spec.primitive_set();
            let (k, delta) = match spec.family() {
                Family::Order => (None, None),
                Family::Trap(tp) => (Some(tp.k()), Some(tp.delta())),
            };
            let row = SweepRow {
                algorithm: algo,
                problem: spec.family().to_string(),
                l: ps.pairs(),
                num_junk: ps.num_junk(),
                neg_join: ps.neg_join_enabled(),
                k,
                delta,
                max_depth: *max_depth,
                pop_size,
                avg_evaluations,
                success_rate,
                seed_base: plan.seed_base,
            };
            on_row(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}
