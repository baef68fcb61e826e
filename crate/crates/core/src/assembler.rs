//! Full matrix construction for arbitrary target spaces.
//!
//! The target is cut into maximal equal-degree sections. Each section starts
//! either as a conventional space (identity matrices) or, for groups of
//! consecutive sections, as the output of reverse degree elevation. The
//! remaining boundaries are then closed by `C^r` joins, highest continuity
//! first.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::join::{cr_join_traced, JoinTelemetry, JoinTrace, Level, SectionBundle};
use crate::matrix::Matrix;
use crate::rde::{rde_build_full, rde_order, rde_schedule, RdeMode};
use crate::scalar::Scalar;
use crate::spaces::{MDSpace, SectionDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Rki,
    Rde,
    Mixed,
    /// Derivative-based insertion coefficients, kept for comparison.
    Derivative,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Rki => "rki",
            Strategy::Rde => "rde",
            Strategy::Mixed => "mixed",
            Strategy::Derivative => "derivative",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rki" | "greville" => Ok(Strategy::Rki),
            "rde" => Ok(Strategy::Rde),
            "mixed" => Ok(Strategy::Mixed),
            "derivative" => Ok(Strategy::Derivative),
            _ => Err(Error::Input(format!("unknown method `{s}`"))),
        }
    }
}

/// How a section enters the mixed construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionChoice {
    Rki,
    Rde,
}

/// Representation of a target space together with its derivative orders.
#[derive(Clone, Debug)]
pub struct RepMatrixBundle<T> {
    pub strategy: Strategy,
    pub space: MDSpace,
    /// `levels[0]` is the target itself; higher levels are kept for Greville.
    pub bundle: SectionBundle<T>,
    pub telemetry: Vec<JoinTelemetry>,
    pub traces: Vec<JoinTrace<T>>,
}

impl<T: Scalar> RepMatrixBundle<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.bundle.levels[0].matrix
    }

    pub fn reference(&self) -> &MDSpace {
        &self.bundle.levels[0].reference
    }

    pub fn level(&self, order: usize) -> Result<&Level<T>> {
        self.bundle.level(order)
    }

    pub fn dim(&self) -> usize {
        self.matrix().rows()
    }
}

fn check_public(space: &MDSpace) -> Result<()> {
    if space.internal {
        return Err(Error::InvalidSpace(
            "matrix construction needs a public space".into(),
        ));
    }
    Ok(())
}

pub fn build<T: Scalar>(space: &MDSpace, strategy: Strategy) -> Result<RepMatrixBundle<T>> {
    match strategy {
        Strategy::Rki => build_matrix_rki(space),
        Strategy::Rde => build_matrix_rde(space),
        Strategy::Mixed => build_matrix_mixed(space, &auto_plan(space)),
        Strategy::Derivative => crate::legacy::build_matrix_rki_derivative(space),
    }
}

pub fn build_matrix_rki<T: Scalar>(space: &MDSpace) -> Result<RepMatrixBundle<T>> {
    build_matrix_rki_traced(space, false)
}

/// RKI build that optionally keeps every cell of every join.
pub fn build_matrix_rki_traced<T: Scalar>(space: &MDSpace, keep_trace: bool) -> Result<RepMatrixBundle<T>> {
    check_public(space)?;
    let plan = vec![SectionChoice::Rki; space.section_decomposition().sections.len()];
    let mut out = assemble(space, &plan, keep_trace)?;
    out.strategy = Strategy::Rki;
    Ok(out)
}

pub fn build_matrix_rde<T: Scalar>(space: &MDSpace) -> Result<RepMatrixBundle<T>> {
    build_matrix_rde_mode(space, RdeMode::default())
}

pub fn build_matrix_rde_mode<T: Scalar>(space: &MDSpace, mode: RdeMode) -> Result<RepMatrixBundle<T>> {
    check_public(space)?;
    let out = rde_build_full(space, mode, 0)?;
    Ok(RepMatrixBundle {
        strategy: Strategy::Rde,
        space: space.clone(),
        bundle: out.bundle,
        telemetry: vec![],
        traces: vec![],
    })
}

pub fn build_matrix_mixed<T: Scalar>(space: &MDSpace, plan: &[SectionChoice]) -> Result<RepMatrixBundle<T>> {
    check_public(space)?;
    let mut out = assemble(space, plan, false)?;
    out.strategy = Strategy::Mixed;
    Ok(out)
}

/// A run of consecutive sections that enters the joins as one block.
#[derive(Clone, Debug)]
struct Group {
    first_section: usize,
    last_section: usize,
    rde: bool,
}

fn groups_of(plan: &[SectionChoice]) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    for (s, &c) in plan.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if g.rde && c == SectionChoice::Rde => g.last_section = s,
            _ => groups.push(Group {
                first_section: s,
                last_section: s,
                rde: c == SectionChoice::Rde,
            }),
        }
    }
    groups
}

/// Highest continuity among the joins on the outer edges of a group.
fn edge_order(space: &MDSpace, dec: &SectionDecomposition, g: &Group) -> usize {
    let left = dec.boundaries[g.first_section];
    let right = dec.boundaries[g.last_section + 1];
    let mut r = 0;
    if left > 0 {
        r = r.max(space.k(left));
    }
    if right <= space.q() {
        r = r.max(space.k(right));
    }
    r.max(0) as usize
}

fn assemble<T: Scalar>(space: &MDSpace, plan: &[SectionChoice], keep_trace: bool) -> Result<RepMatrixBundle<T>> {
    let dec = space.section_decomposition();
    if plan.len() != dec.sections.len() {
        return Err(Error::Plan(format!(
            "{} choices for {} sections",
            plan.len(),
            dec.sections.len()
        )));
    }

    // blocks: (first interval, last interval, bundle), kept left to right
    let mut blocks: Vec<(usize, usize, SectionBundle<T>)> = Vec::new();
    for g in groups_of(plan) {
        let first = dec.sections[g.first_section].first;
        let last = dec.sections[g.last_section].last;
        let sub = space.restrict(first, last);
        let order = edge_order(space, &dec, &g);
        let bundle = if g.rde {
            rde_build_full(&sub, RdeMode::default(), order)?.bundle
        } else {
            // order 1 as well, so Greville abscissae are available
            let order = order.max((sub.degrees[0] >= 1) as usize);
            SectionBundle::identity(&sub, order)?
        };
        blocks.push((first, last, bundle));
    }

    let mut telemetry = Vec::new();
    let mut traces = Vec::new();
    for &(b, k) in &dec.join_order {
        // boundaries inside a degree-elevated group are already closed
        let Some(i) = blocks.iter().position(|blk| blk.1 + 1 == b) else {
            continue;
        };
        if i + 1 >= blocks.len() || blocks[i + 1].0 != b {
            continue;
        }
        let (first, _, left) = blocks.remove(i);
        let (_, last, right) = blocks.remove(i);
        let out = cr_join_traced(&left, &right, k.max(0) as usize, keep_trace)?;
        telemetry.push(out.telemetry);
        if let Some(t) = out.trace {
            traces.push(t);
        }
        blocks.insert(i, (first, last, out.bundle));
    }
    if blocks.len() != 1 {
        return Err(Error::Plan("sections were not joined into a single block".into()));
    }
    let (_, _, bundle) = blocks.pop().unwrap();
    Ok(RepMatrixBundle {
        strategy: Strategy::Mixed,
        space: space.clone(),
        bundle,
        telemetry,
        traces,
    })
}

/// Nontrivial coefficients of a `C^r` join.
pub fn rki_cost(r: usize) -> usize {
    JoinTelemetry::expected_alphas(r)
}

/// Nontrivial coefficients of a subtraction-free degree elevation run on
/// `space`, carried up to derivative order `min_order` at least.
pub fn rde_cost(space: &MDSpace, min_order: usize) -> usize {
    let r = rde_order(space, RdeMode::SubtractionFree, min_order) as i64;
    let sched = rde_schedule(space);
    let mut total = 0;
    for k in 1..=r {
        let rho = r - k;
        for &(_, h) in &sched.steps {
            total += (h - rho).max(0) as usize;
        }
    }
    total
}

/// Total coefficient count of a plan.
pub fn plan_cost(space: &MDSpace, plan: &[SectionChoice]) -> Result<usize> {
    let dec = space.section_decomposition();
    if plan.len() != dec.sections.len() {
        return Err(Error::Plan(format!(
            "{} choices for {} sections",
            plan.len(),
            dec.sections.len()
        )));
    }
    let groups = groups_of(plan);
    let mut cost = 0;
    for g in &groups {
        if g.rde {
            let first = dec.sections[g.first_section].first;
            let last = dec.sections[g.last_section].last;
            cost += rde_cost(&space.restrict(first, last), edge_order(space, &dec, g));
        }
    }
    for g in &groups[1..] {
        let b = dec.boundaries[g.first_section];
        cost += rki_cost(space.k(b).max(0) as usize);
    }
    Ok(cost)
}

/// Cheapest plan under the coefficient count, found by dynamic programming
/// over the positions where a join remains. Ties favour joins.
pub fn auto_plan(space: &MDSpace) -> Vec<SectionChoice> {
    let dec = space.section_decomposition();
    let p = dec.sections.len();
    let join_cost = |s: usize| rki_cost(space.k(dec.boundaries[s]).max(0) as usize);
    // best[i]: cheapest cover of sections 0..i with a join at boundary i
    let mut best: Vec<(usize, usize)> = vec![(usize::MAX, 0); p + 1];
    best[0] = (0, 0);
    for i in 1..=p {
        for j in 0..i {
            if best[j].0 == usize::MAX {
                continue;
            }
            let block = if i - j == 1 {
                0
            } else {
                let g = Group {
                    first_section: j,
                    last_section: i - 1,
                    rde: true,
                };
                let sub = space.restrict(dec.sections[j].first, dec.sections[i - 1].last);
                rde_cost(&sub, edge_order(space, &dec, &g))
            };
            let edge = if j > 0 { join_cost(j) } else { 0 };
            let c = best[j].0 + block + edge;
            // strict comparison keeps the shortest block on ties
            if c < best[i].0 || (c == best[i].0 && j > best[i].1) {
                best[i] = (c, j);
            }
        }
    }
    let mut plan = vec![SectionChoice::Rki; p];
    let mut i = p;
    while i > 0 {
        let j = best[i].1;
        if i - j > 1 {
            plan[j..i].fill(SectionChoice::Rde);
        }
        i = j;
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_fraction, Rational};

    fn example1() -> MDSpace {
        MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn example1_full_matrix() {
        let b = build_matrix_rki::<Rational>(&example1()).unwrap();
        let m = b.matrix();
        assert_eq!((m.rows(), m.cols()), (6, 11));
        for s in m.column_sums() {
            assert_eq!(s, Rational::from_integer(1.into()));
        }
        assert_eq!(b.telemetry.len(), 2);
        assert_eq!(b.telemetry[0].r, 3);
        assert_eq!(b.telemetry[1].r, 2);
        assert_eq!(*b.reference(), example1().associated_c0());
        // first row is untouched by either join
        assert_eq!(m.get(0, 0), &parse_fraction("1").unwrap());
    }

    #[test]
    fn c0_space_gives_identity() {
        let s = MDSpace::new(0.0, 3.0, vec![1.0, 2.0], vec![2, 3, 1], vec![0, 0]).unwrap();
        let b = build_matrix_rki::<f64>(&s).unwrap();
        assert_eq!(*b.matrix(), Matrix::identity(s.dim()));
    }

    #[test]
    fn plans() {
        let s = example1();
        let all_rki = vec![SectionChoice::Rki; 3];
        let a = build_matrix_mixed::<Rational>(&s, &all_rki).unwrap();
        let b = build_matrix_rki::<Rational>(&s).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(build_matrix_mixed::<f64>(&s, &all_rki[..2]).is_err());

        let all_rde = vec![SectionChoice::Rde; 3];
        let a = build_matrix_mixed::<Rational>(&s, &all_rde).unwrap();
        let b = build_matrix_rde::<Rational>(&s).unwrap();
        assert_eq!(a.matrix(), b.matrix());

        let plan = auto_plan(&s);
        assert_eq!(plan.len(), 3);
        let best = plan_cost(&s, &plan).unwrap();
        for p in [all_rki, all_rde] {
            assert!(best <= plan_cost(&s, &p).unwrap());
        }
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [Strategy::Rki, Strategy::Rde, Strategy::Mixed, Strategy::Derivative] {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("nope".parse::<Strategy>().is_err());
    }
}
