//! Optimal power pmfs under an average-power budget.
//!
//! Both sides face the same one-dimensional problem: optimize a linear
//! objective `sum_i w[i] g[i]` over the budget polytope
//! `{pmf w : sum_i w[i] p[i] <= budget}`; the base station maximizes its
//! expected success, the adversary minimizes it. The optimum sits at a
//! vertex of the polytope: either a point mass on a level within budget or
//! a two-point mixture that meets the budget with equality.
//!
//! [`algorithm1`]/[`algorithm2`] implement the published coefficient-
//! traversal procedure; [`oracle_best_e`]/[`oracle_best_d`] solve the same
//! problem by exhaustive vertex enumeration and exist solely to check them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Pmf, PowerLevels, ValidatedConfig};
use crate::scalar::{real, Real};

/// Coefficients within this band of zero are treated as zero: the traversal
/// only moves on a strictly positive (base station) or strictly negative
/// (adversary) coefficient.
pub const COEFF_GUARD_BAND: f64 = 1e-12;

/// Which reading of the published traversal to run.
///
/// The prose and the pseudocode of the procedure disagree on the direction
/// of the second traversal and on whether coefficients are recomputed with
/// the updated pivot pair. `Prose` (the default) follows the prose
/// (descending second traversal, coefficients always evaluated at the
/// current pivot pair) and additionally repeats the two traversals until
/// neither moves, which is required for vertex optimality when a pivot
/// update on one side re-exposes levels on the other. `PseudocodeLiteral`
/// runs the two loops exactly once, ascending, as the pseudocode reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraversalMode {
    #[default]
    Prose,
    PseudocodeLiteral,
}

/// The feasible set of power pmfs for one side: pmfs over the grid whose
/// expected power respects the average-power budget.
#[derive(Debug, Clone, Serialize)]
pub struct BudgetPolytope<T> {
    levels: PowerLevels<T>,
}

impl<T: Real> BudgetPolytope<T> {
    pub fn new(levels: PowerLevels<T>) -> Self {
        BudgetPolytope { levels }
    }

    pub fn levels(&self) -> &PowerLevels<T> {
        &self.levels
    }

    /// Non-empty iff the budget covers the cheapest level.
    pub fn is_feasible(&self) -> bool {
        self.levels.budget() >= self.levels.levels()[0]
    }

    pub fn contains(&self, pmf: &Pmf<T>, tol: T) -> bool {
        pmf.len() == self.levels.len() && self.levels.within_budget(pmf, tol)
    }

    pub fn vertices(&self) -> Result<Vec<Pmf<T>>> {
        polytope_vertices(&self.levels)
    }
}

/// Per-power expected success against a fixed opponent pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalVector<T> {
    values: Vec<T>,
}

impl<T: Real> MarginalVector<T> {
    /// Base-station marginals `g[i] = sum_j d[j] f[i][j]` against blocking
    /// pmf `d`.
    pub fn bs(d: &Pmf<T>, cfg: &ValidatedConfig<T>) -> Result<Self> {
        if d.len() != cfg.num_adv_levels() {
            return Err(Error::Dimension(format!(
                "blocking pmf has {} entries, instance has {} blocking powers",
                d.len(),
                cfg.num_adv_levels()
            )));
        }
        Ok(MarginalVector {
            values: cfg.success().bs_marginals(d),
        })
    }

    /// Adversary marginals `g[j] = sum_i e[i] f[i][j]` against transmit
    /// pmf `e`.
    pub fn adv(e: &Pmf<T>, cfg: &ValidatedConfig<T>) -> Result<Self> {
        if e.len() != cfg.num_bs_levels() {
            return Err(Error::Dimension(format!(
                "transmit pmf has {} entries, instance has {} transmit powers",
                e.len(),
                cfg.num_bs_levels()
            )));
        }
        Ok(MarginalVector {
            values: cfg.success().adv_marginals(e),
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Enumerates every vertex of the budget polytope: each point mass on a
/// level within budget, plus for every level pair straddling the budget the
/// unique two-point pmf meeting it with equality. Order: singletons by
/// ascending level, then pairs in lexicographic order.
pub fn polytope_vertices<T: Real>(levels: &PowerLevels<T>) -> Result<Vec<Pmf<T>>> {
    let p = levels.levels();
    let budget = levels.budget();
    if budget < p[0] {
        return Err(Error::infeasible(format!(
            "budget {budget} is below the cheapest power {}",
            p[0]
        )));
    }
    let n = p.len();
    let mut vertices = Vec::new();
    for (i, &pi) in p.iter().enumerate() {
        if pi <= budget {
            vertices.push(Pmf::basis(n, i));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if p[i] < budget && budget < p[j] {
                let w = (p[j] - budget) / (p[j] - p[i]);
                vertices.push(Pmf::two_point(n, i, j, w));
            }
        }
    }
    Ok(vertices)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    fn improves<T: Real>(self, coeff: T) -> bool {
        let band = real::<T>(COEFF_GUARD_BAND);
        match self {
            Sense::Maximize => coeff > band,
            Sense::Minimize => coeff < -band,
        }
    }

    fn prefers<T: Real>(self, candidate: T, incumbent: T) -> bool {
        match self {
            Sense::Maximize => candidate > incumbent,
            Sense::Minimize => candidate < incumbent,
        }
    }
}

/// The shared traversal. `g` is the per-level objective, `p` the strictly
/// increasing grid.
fn optimize_power_pmf<T: Real>(
    g: &[T],
    levels: &PowerLevels<T>,
    sense: Sense,
    mode: TraversalMode,
) -> Result<Pmf<T>> {
    let p = levels.levels();
    let budget = levels.budget();
    let n = p.len();

    if budget < p[0] {
        return Err(Error::infeasible(format!(
            "budget {budget} is below the cheapest power {}",
            p[0]
        )));
    }
    // At or above the top level the grid's extreme point is optimal on both
    // sides (marginals are monotone in the level index for a valid matrix).
    if budget >= p[n - 1] {
        return Ok(Pmf::basis(n, n - 1));
    }
    // Budget exactly on the cheapest level: the only feasible pmf.
    if budget == p[0] {
        return Ok(Pmf::basis(n, 0));
    }

    // Bracketing pivots: last level strictly below and first strictly above.
    let x0 = p.iter().rposition(|&v| v < budget).expect("budget > p[0]");
    let y0 = p.iter().position(|&v| v > budget).expect("budget < p[n-1]");
    let mut x = x0;
    let mut y = y0;

    // Height of g[i] above (Maximize) or below (Minimize) the chord through
    // the current pivot pair.
    let coeff = |i: usize, x: usize, y: usize| {
        g[i] + g[x] * (p[y] - p[i]) / (p[x] - p[y]) - g[y] * (p[x] - p[i]) / (p[x] - p[y])
    };

    match mode {
        TraversalMode::Prose => loop {
            let mut moved = false;
            for j in (y + 1)..n {
                if sense.improves(coeff(j, x, y)) {
                    y = j;
                    moved = true;
                }
            }
            for l in (0..x).rev() {
                if sense.improves(coeff(l, x, y)) {
                    x = l;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        },
        TraversalMode::PseudocodeLiteral => {
            for j in (y0 + 1)..n {
                if sense.improves(coeff(j, x, y)) {
                    y = j;
                }
            }
            for l in 0..x0 {
                if sense.improves(coeff(l, x, y)) {
                    x = l;
                }
            }
        }
    }

    let w = (p[y] - budget) / (p[y] - p[x]);
    let mix = Pmf::two_point(n, x, y, w);

    // When the budget sits exactly on the level between the original pivots,
    // compare the mixture against that pure level and keep the better one;
    // ties go to the pure level for the base station and to the mixture for
    // the adversary, matching the published comparison. The prose compares
    // against the original in-between level even after the pivots moved; the
    // literal mode returns the vector the pseudocode names.
    if x0 + 1 == y0 - 1 {
        let k = x0 + 1;
        debug_assert!(p[k] == budget);
        let mix_val = mix.expectation(g);
        let keep_mix = match sense {
            Sense::Maximize => mix_val > g[k],
            Sense::Minimize => mix_val <= g[k],
        };
        if !keep_mix {
            let pure_index = match mode {
                TraversalMode::Prose => k,
                TraversalMode::PseudocodeLiteral => x + 1,
            };
            return Ok(Pmf::basis(n, pure_index));
        }
    }
    Ok(mix)
}

/// Optimal transmit power pmf against blocking pmf `d` (prose traversal).
pub fn algorithm1<T: Real>(d: &Pmf<T>, cfg: &ValidatedConfig<T>) -> Result<Pmf<T>> {
    algorithm1_with_mode(d, cfg, TraversalMode::default())
}

/// [`algorithm1`] with an explicit traversal mode.
pub fn algorithm1_with_mode<T: Real>(
    d: &Pmf<T>,
    cfg: &ValidatedConfig<T>,
    mode: TraversalMode,
) -> Result<Pmf<T>> {
    let g = MarginalVector::bs(d, cfg)?;
    optimize_power_pmf(g.values(), cfg.bs_powers(), Sense::Maximize, mode)
}

/// Optimal blocking power pmf against transmit pmf `e` (prose traversal).
pub fn algorithm2<T: Real>(e: &Pmf<T>, cfg: &ValidatedConfig<T>) -> Result<Pmf<T>> {
    algorithm2_with_mode(e, cfg, TraversalMode::default())
}

/// [`algorithm2`] with an explicit traversal mode.
pub fn algorithm2_with_mode<T: Real>(
    e: &Pmf<T>,
    cfg: &ValidatedConfig<T>,
    mode: TraversalMode,
) -> Result<Pmf<T>> {
    let g = MarginalVector::adv(e, cfg)?;
    optimize_power_pmf(g.values(), cfg.adv_powers(), Sense::Minimize, mode)
}

fn oracle_optimize<T: Real>(g: &[T], levels: &PowerLevels<T>, sense: Sense) -> Result<(Pmf<T>, T)> {
    let vertices = polytope_vertices(levels)?;
    let mut best: Option<(Pmf<T>, T)> = None;
    // Vertex order (singletons first, then pairs, both ascending) makes the
    // strict comparison break ties toward smaller support, then lower index.
    for v in vertices {
        let val = v.expectation(g);
        match &best {
            Some((_, incumbent)) if !sense.prefers(val, *incumbent) => {}
            _ => best = Some((v, val)),
        }
    }
    Ok(best.expect("feasible polytope has at least one vertex"))
}

/// Independent check for [`algorithm1`]: maximizes the expected success over
/// all polytope vertices by enumeration. Ties break toward smaller support,
/// then lower index.
pub fn oracle_best_e<T: Real>(d: &Pmf<T>, cfg: &ValidatedConfig<T>) -> Result<(Pmf<T>, T)> {
    let g = MarginalVector::bs(d, cfg)?;
    oracle_optimize(g.values(), cfg.bs_powers(), Sense::Maximize)
}

/// Independent check for [`algorithm2`]: minimizes the expected success over
/// all polytope vertices by enumeration.
pub fn oracle_best_d<T: Real>(e: &Pmf<T>, cfg: &ValidatedConfig<T>) -> Result<(Pmf<T>, T)> {
    let g = MarginalVector::adv(e, cfg)?;
    oracle_optimize(g.values(), cfg.adv_powers(), Sense::Minimize)
}
