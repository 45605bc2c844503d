//! Exact two-dimensional rate regions: inner hulls of achievable corners,
//! outer bounds as half-planes, and the comparisons between them.
//!
//! Rates are normalized by n, so everything here depends on the channel
//! only through `(M, L, alpha)`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, frac, int, Rational};
use crate::schemes::{Corner, Setup};

/// A rate pair: `(R_L, R_0)` in the R0RL setup, `(R_M, R_L)` in RLRM.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatePoint {
    pub x: Rational,
    pub y: Rational,
}

impl RatePoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        RatePoint { x, y }
    }

    pub fn origin() -> Self {
        RatePoint::new(int(0), int(0))
    }

    pub fn scaled(&self, by: Rational) -> Self {
        RatePoint::new(self.x * by, self.y * by)
    }
}

impl fmt::Display for RatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", rational::format(&self.x), rational::format(&self.y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundStatus {
    Proven,
    Conjectured,
}

impl BoundStatus {
    pub fn name(self) -> &'static str {
        match self {
            BoundStatus::Proven => "proven",
            BoundStatus::Conjectured => "conjectured",
        }
    }
}

/// `a·x + b·y <= c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub status: BoundStatus,
    pub label: String,
}

impl HalfPlane {
    pub fn new(a: Rational, b: Rational, c: Rational, status: BoundStatus, label: &str) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::InvalidParams(format!("half-plane {label} has a zero normal")));
        }
        Ok(HalfPlane {
            a,
            b,
            c,
            status,
            label: label.to_string(),
        })
    }

    fn unchecked(a: Rational, b: Rational, c: Rational, status: BoundStatus, label: &str) -> Self {
        HalfPlane::new(a, b, c, status, label).expect("nonzero normal")
    }

    pub fn value(&self, p: &RatePoint) -> Rational {
        self.a * p.x + self.b * p.y
    }

    pub fn satisfied(&self, p: &RatePoint) -> bool {
        self.value(p) <= self.c
    }

    /// `a·x + b·y - c`; positive when `p` is outside.
    pub fn excess(&self, p: &RatePoint) -> Rational {
        self.value(p) - self.c
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}x + {}y <= {} [{}]",
            self.label,
            rational::format(&self.a),
            rational::format(&self.b),
            rational::format(&self.c),
            self.status.name()
        )
    }
}

/// Convex polygon, vertices counterclockwise starting from the
/// lexicographically smallest one (the origin for downward-closed regions).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RateRegion2D {
    vertices: Vec<RatePoint>,
}

impl RateRegion2D {
    pub fn origin() -> Self {
        RateRegion2D {
            vertices: vec![RatePoint::origin()],
        }
    }

    pub fn vertices(&self) -> &[RatePoint] {
        &self.vertices
    }

    /// Twice the signed area, halved.
    pub fn area(&self) -> Rational {
        let v = &self.vertices;
        if v.len() < 3 {
            return int(0);
        }
        let mut twice = int(0);
        for i in 0..v.len() {
            let (p, q) = (v[i], v[(i + 1) % v.len()]);
            twice += p.x * q.y - q.x * p.y;
        }
        twice / int(2)
    }
}

impl fmt::Display for RateRegion2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn cross(o: &RatePoint, a: &RatePoint, b: &RatePoint) -> Rational {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain; drops collinear points.
fn convex_hull(mut pts: Vec<RatePoint>) -> Vec<RatePoint> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<RatePoint> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= int(0) {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<RatePoint> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= int(0) {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Time-sharing closure of `points` together with silence: the convex hull
/// after adjoining the origin and each point's projections on the axes.
pub fn hull(points: &[RatePoint]) -> RateRegion2D {
    let zero = int(0);
    let mut all = vec![RatePoint::origin()];
    for p in points {
        all.push(*p);
        all.push(RatePoint::new(p.x, zero));
        all.push(RatePoint::new(zero, p.y));
    }
    RateRegion2D {
        vertices: convex_hull(all),
    }
}

/// Intersection of `planes` with the nonnegative quadrant. An empty
/// intersection gives the origin region; an unbounded one is an error.
pub fn intersect(planes: &[HalfPlane]) -> Result<RateRegion2D> {
    let zero = int(0);
    let one = int(1);
    let mut all: Vec<HalfPlane> = planes.to_vec();
    all.push(HalfPlane::unchecked(-one, zero, zero, BoundStatus::Proven, "x>=0"));
    all.push(HalfPlane::unchecked(zero, -one, zero, BoundStatus::Proven, "y>=0"));

    let mut candidates = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let (p, q) = (&all[i], &all[j]);
            let det = p.a * q.b - p.b * q.a;
            if det.is_zero() {
                continue;
            }
            let v = RatePoint::new((p.c * q.b - p.b * q.c) / det, (p.a * q.c - p.c * q.a) / det);
            if all.iter().all(|h| h.satisfied(&v)) {
                candidates.push(v);
            }
        }
    }
    if candidates.is_empty() {
        return Ok(RateRegion2D::origin());
    }
    // The recession cone is polyhedral, so if it is nontrivial one of its
    // extreme rays lies along some boundary direction.
    let mut directions = vec![(one, zero), (zero, one)];
    for h in &all {
        directions.push((h.b, -h.a));
        directions.push((-h.b, h.a));
    }
    for (dx, dy) in directions {
        if all.iter().all(|h| h.a * dx + h.b * dy <= zero) {
            return Err(Error::InvalidParams(format!(
                "half-plane intersection is unbounded along ({}, {})",
                rational::format(&dx),
                rational::format(&dy)
            )));
        }
    }
    Ok(RateRegion2D {
        vertices: convex_hull(candidates),
    })
}

pub fn region_equal(a: &RateRegion2D, b: &RateRegion2D) -> bool {
    a.vertices == b.vertices
}

pub fn contains(region: &RateRegion2D, p: &RatePoint) -> bool {
    let v = &region.vertices;
    match v.len() {
        0 => false,
        1 => v[0] == *p,
        2 => {
            cross(&v[0], &v[1], p).is_zero()
                && rational::min(v[0].x, v[1].x) <= p.x
                && p.x <= rational::max(v[0].x, v[1].x)
                && rational::min(v[0].y, v[1].y) <= p.y
                && p.y <= rational::max(v[0].y, v[1].y)
        }
        n => (0..n).all(|i| cross(&v[i], &v[(i + 1) % n], p) >= int(0)),
    }
}

/// Is every vertex of `inner` inside `outer`?
pub fn contains_region(outer: &RateRegion2D, inner: &RateRegion2D) -> bool {
    inner.vertices.iter().all(|p| contains(outer, p))
}

/// Position of L relative to M/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LSide {
    Low,
    Boundary,
    High,
}

impl LSide {
    pub fn of(subcarriers: usize, interfered: usize) -> Self {
        match (2 * interfered).cmp(&subcarriers) {
            std::cmp::Ordering::Less => LSide::Low,
            std::cmp::Ordering::Equal => LSide::Boundary,
            std::cmp::Ordering::Greater => LSide::High,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LSide::Low => "low",
            LSide::Boundary => "boundary",
            LSide::High => "high",
        }
    }

    fn is_low(self) -> bool {
        self != LSide::High
    }

    fn is_high(self) -> bool {
        self != LSide::Low
    }
}

/// Closed interference-strength bands delimited by 1/2, 2/3, 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlphaBand {
    Weak,
    Moderate,
    Mid,
    Strong,
}

impl AlphaBand {
    pub const ALL: [AlphaBand; 4] = [AlphaBand::Weak, AlphaBand::Moderate, AlphaBand::Mid, AlphaBand::Strong];

    pub fn range(self) -> (Rational, Rational) {
        match self {
            AlphaBand::Weak => (int(0), frac(1, 2)),
            AlphaBand::Moderate => (frac(1, 2), frac(2, 3)),
            AlphaBand::Mid => (frac(2, 3), int(1)),
            AlphaBand::Strong => (int(1), int(2)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlphaBand::Weak => "0-1/2",
            AlphaBand::Moderate => "1/2-2/3",
            AlphaBand::Mid => "2/3-1",
            AlphaBand::Strong => "1-2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegimeId {
    pub l_side: LSide,
    /// Every band containing alpha; two at a breakpoint.
    pub bands: Vec<AlphaBand>,
}

impl fmt::Display for RegimeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bands: Vec<&str> = self.bands.iter().map(|b| b.name()).collect();
        write!(f, "{}@{}", self.l_side.name(), bands.join("+"))
    }
}

fn check_args(subcarriers: usize, interfered: usize, alpha: Rational) -> Result<()> {
    if interfered == 0 || interfered > subcarriers {
        return Err(Error::InvalidParams(format!(
            "need 1 <= L <= M, got L={interfered}, M={subcarriers}"
        )));
    }
    if alpha < int(0) || alpha > int(2) {
        return Err(Error::InvalidParams(format!(
            "alpha={} outside [0, 2]",
            rational::format(&alpha)
        )));
    }
    Ok(())
}

pub fn classify_regime(subcarriers: usize, interfered: usize, alpha: Rational) -> Result<RegimeId> {
    check_args(subcarriers, interfered, alpha)?;
    let bands = AlphaBand::ALL
        .into_iter()
        .filter(|b| {
            let (lo, hi) = b.range();
            lo <= alpha && alpha <= hi
        })
        .collect();
    Ok(RegimeId {
        l_side: LSide::of(subcarriers, interfered),
        bands,
    })
}

/// Every corner family achievable at `alpha`, with its normalized rate.
pub fn corner_list(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> Result<Vec<(Corner, RatePoint)>> {
    check_args(subcarriers, interfered, alpha)?;
    Ok(Corner::for_setup(setup)
        .into_iter()
        .filter(|c| c.applies(alpha))
        .map(|c| (c, c.rate(subcarriers, interfered, alpha)))
        .collect())
}

/// Distinct achievable corner rates at `alpha`, in corner-family order.
pub fn inner_corners(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> Result<Vec<RatePoint>> {
    let mut seen = BTreeSet::new();
    Ok(corner_list(setup, subcarriers, interfered, alpha)?
        .into_iter()
        .map(|(_, p)| p)
        .filter(|p| seen.insert(*p))
        .collect())
}

pub fn inner_region(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> Result<RateRegion2D> {
    Ok(hull(&inner_corners(setup, subcarriers, interfered, alpha)?))
}

/// Outer bounds from one side's family of formulas: (proven, conjectured).
fn bound_family(setup: Setup, high: bool, m: usize, l: usize, alpha: Rational) -> (Vec<HalfPlane>, Vec<HalfPlane>) {
    use BoundStatus::{Conjectured, Proven};
    let mr = int(m as i128);
    let lr = int(l as i128);
    let one = int(1);
    let zero = int(0);
    // Per-subcarrier interference-free sum-rate factor, and the
    // all-interfered single-user factor.
    let f = rational::max(one, alpha) + rational::max(one - alpha, zero);
    let g = rational::max(alpha, one - alpha);
    let hp = HalfPlane::unchecked;
    match (setup, high) {
        (Setup::R0RL, false) => (
            vec![
                hp(mr, mr - lr, mr * ((mr - int(2) * lr) + lr * f), Proven, "r0rl-weighted"),
                hp(one, one, mr, Proven, "r0rl-sum"),
            ],
            vec![],
        ),
        (Setup::R0RL, true) => (
            vec![
                hp(mr, mr - lr, mr * ((mr - lr) * f + (int(2) * lr - mr) * g), Proven, "r0rl-weighted"),
                hp(one, one, mr, Proven, "r0rl-sum"),
            ],
            vec![hp(int(2), one, mr * f, Conjectured, "r0rl-double")],
        ),
        (Setup::RLRM, false) => (
            vec![
                hp(one, one, (mr - int(2) * lr) + lr * f, Proven, "rlrm-sum"),
                hp(one, zero, mr * g, Proven, "rlrm-all-interfered"),
            ],
            vec![hp(int(2) * (mr - lr), mr, mr * (mr - lr) * f, Conjectured, "rlrm-weighted")],
        ),
        (Setup::RLRM, true) => (
            vec![
                hp(one, one, (mr - lr) * f + (int(2) * lr - mr) * g, Proven, "rlrm-sum"),
                hp(one, zero, mr * g, Proven, "rlrm-all-interfered"),
            ],
            vec![hp(one, one, mr * f / int(2), Conjectured, "rlrm-half-sum")],
        ),
    }
}

/// Outer-bound half-planes, each tagged proven or conjectured. At L = M/2
/// both formula families apply; their proven parts must describe the same
/// region, which is asserted.
pub fn outer_halfplanes(
    setup: Setup,
    subcarriers: usize,
    interfered: usize,
    alpha: Rational,
    include_conjectured: bool,
) -> Result<Vec<HalfPlane>> {
    check_args(subcarriers, interfered, alpha)?;
    let side = LSide::of(subcarriers, interfered);
    let mut proven = Vec::new();
    let mut conjectured: Vec<HalfPlane> = Vec::new();
    if side.is_low() {
        let (p, c) = bound_family(setup, false, subcarriers, interfered, alpha);
        proven = p;
        conjectured.extend(c);
    }
    if side.is_high() {
        let (p, c) = bound_family(setup, true, subcarriers, interfered, alpha);
        if side == LSide::Boundary {
            let low = intersect(&proven)?;
            let high = intersect(&p)?;
            assert!(
                region_equal(&low, &high),
                "bound families disagree at L = M/2 (M={subcarriers}, alpha={}): {low} vs {high}",
                rational::format(&alpha)
            );
        } else {
            proven = p;
        }
        conjectured.extend(c);
    }
    if include_conjectured {
        proven.extend(conjectured);
    }
    Ok(proven)
}

pub fn outer_region(
    setup: Setup,
    subcarriers: usize,
    interfered: usize,
    alpha: Rational,
    include_conjectured: bool,
) -> Result<RateRegion2D> {
    intersect(&outer_halfplanes(setup, subcarriers, interfered, alpha, include_conjectured)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    TightProven,
    TightIfConjecture,
    Gap,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::TightProven => "tight_proven",
            Verdict::TightIfConjecture => "tight_if_conjecture",
            Verdict::Gap => "gap",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct TightnessReport {
    pub verdict: Verdict,
    pub inner: RateRegion2D,
    pub proven: RateRegion2D,
    pub with_conjectures: RateRegion2D,
    /// Vertices of the proven outer region lying outside the inner hull.
    pub gap_vertices: Vec<RatePoint>,
}

impl TightnessReport {
    pub fn gap_area(&self) -> Rational {
        self.proven.area() - self.inner.area()
    }

    pub fn gap_area_conjectured(&self) -> Rational {
        self.with_conjectures.area() - self.inner.area()
    }

    pub fn inner_is_sound(&self) -> bool {
        contains_region(&self.proven, &self.inner)
    }
}

pub fn tightness_report(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> Result<TightnessReport> {
    let inner = inner_region(setup, subcarriers, interfered, alpha)?;
    let proven = outer_region(setup, subcarriers, interfered, alpha, false)?;
    let with_conjectures = outer_region(setup, subcarriers, interfered, alpha, true)?;
    let verdict = if region_equal(&inner, &proven) {
        Verdict::TightProven
    } else if region_equal(&inner, &with_conjectures) {
        Verdict::TightIfConjecture
    } else {
        Verdict::Gap
    };
    let gap_vertices = proven
        .vertices()
        .iter()
        .filter(|v| !contains(&inner, v))
        .copied()
        .collect();
    Ok(TightnessReport {
        verdict,
        inner,
        proven,
        with_conjectures,
        gap_vertices,
    })
}

/// Is `(setup, L, alpha)` inside a range where the conjectured bound is
/// known to follow from the proven ones?
pub fn in_corollary_range(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> bool {
    let side = LSide::of(subcarriers, interfered);
    match setup {
        Setup::R0RL => side.is_high() && alpha <= frac(1, 2),
        Setup::RLRM => {
            (side.is_low() && alpha <= frac(1, 2)) || (side.is_high() && alpha <= frac(2, 3))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dominance {
    /// Adding the conjectured planes leaves the proven region unchanged.
    pub redundant: bool,
    pub in_corollary_range: bool,
}

pub fn dominance_check(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> Result<Dominance> {
    let proven = outer_region(setup, subcarriers, interfered, alpha, false)?;
    let with_conjectures = outer_region(setup, subcarriers, interfered, alpha, true)?;
    Ok(Dominance {
        redundant: region_equal(&proven, &with_conjectures),
        in_corollary_range: in_corollary_range(setup, subcarriers, interfered, alpha),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureViolation {
    pub vertex: RatePoint,
    pub plane: HalfPlane,
    /// How far the vertex lies beyond the plane, `a·x + b·y - c > 0`.
    pub margin: Rational,
}

/// Vertices of the proven outer region cut off by a conjectured plane.
pub fn conjecture_gap(setup: Setup, subcarriers: usize, interfered: usize, alpha: Rational) -> Result<Vec<ConjectureViolation>> {
    let proven = outer_region(setup, subcarriers, interfered, alpha, false)?;
    let planes = outer_halfplanes(setup, subcarriers, interfered, alpha, true)?;
    let mut out = Vec::new();
    for v in proven.vertices() {
        for h in planes.iter().filter(|h| h.status == BoundStatus::Conjectured) {
            let margin = h.excess(v);
            if margin.is_positive() {
                out.push(ConjectureViolation {
                    vertex: *v,
                    plane: h.clone(),
                    margin,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: Rational, y: Rational) -> RatePoint {
        RatePoint::new(x, y)
    }

    fn ipt(x: i128, y: i128) -> RatePoint {
        pt(int(x), int(y))
    }

    fn proven(a: i128, b: i128, c: i128) -> HalfPlane {
        HalfPlane::new(int(a), int(b), int(c), BoundStatus::Proven, "t").unwrap()
    }

    #[test]
    fn hull_adds_projections() {
        let r = hull(&[ipt(1, 0), ipt(0, 2)]);
        assert_eq!(r.vertices(), &[ipt(0, 0), ipt(1, 0), ipt(0, 2)]);
        let r = hull(&[ipt(2, 1)]);
        assert_eq!(r.vertices(), &[ipt(0, 0), ipt(2, 0), ipt(2, 1), ipt(0, 1)]);
        assert_eq!(hull(&[]).vertices(), &[ipt(0, 0)]);
        assert_eq!(hull(&[ipt(3, 0)]).vertices(), &[ipt(0, 0), ipt(3, 0)]);
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let r = hull(&[ipt(2, 0), ipt(1, 1), ipt(0, 2), pt(frac(1, 2), frac(1, 2))]);
        assert_eq!(r.vertices(), &[ipt(0, 0), ipt(2, 0), ipt(0, 2)]);
    }

    #[test]
    fn toy_intersection() {
        let r = intersect(&[proven(2, 1, 2), proven(1, 1, 2)]).unwrap();
        assert_eq!(r.vertices(), &[ipt(0, 0), ipt(1, 0), ipt(0, 2)]);
        assert!(region_equal(&r, &hull(&[ipt(1, 0), ipt(0, 2)])));
        assert_eq!(r.area(), int(1));
    }

    #[test]
    fn empty_and_unbounded() {
        assert_eq!(intersect(&[proven(1, 1, -1)]).unwrap(), RateRegion2D::origin());
        assert!(intersect(&[proven(1, 0, 2)]).is_err());
        assert!(intersect(&[]).is_err());
        assert!(HalfPlane::new(int(0), int(0), int(1), BoundStatus::Proven, "z").is_err());
    }

    #[test]
    fn containment() {
        let r = hull(&[ipt(1, 0), ipt(0, 2)]);
        assert!(contains(&r, &ipt(0, 0)));
        assert!(contains(&r, &pt(frac(1, 2), int(1))));
        assert!(!contains(&r, &pt(frac(1, 2), frac(11, 10))));
        let seg = hull(&[ipt(3, 0)]);
        assert!(contains(&seg, &ipt(2, 0)));
        assert!(!contains(&seg, &ipt(4, 0)));
        assert!(!contains(&seg, &ipt(1, 1)));
    }

    #[test]
    fn regimes() {
        let r = classify_regime(2, 1, int(1)).unwrap();
        assert_eq!(r.l_side, LSide::Boundary);
        assert_eq!(r.bands, [AlphaBand::Mid, AlphaBand::Strong]);
        assert_eq!(r.to_string(), "boundary@2/3-1+1-2");
        let r = classify_regime(4, 1, frac(1, 4)).unwrap();
        assert_eq!((r.l_side, r.bands.as_slice()), (LSide::Low, &[AlphaBand::Weak][..]));
        let r = classify_regime(4, 3, frac(3, 5)).unwrap();
        assert_eq!((r.l_side, r.bands.as_slice()), (LSide::High, &[AlphaBand::Moderate][..]));
        assert!(classify_regime(4, 3, frac(5, 2)).is_err());
        assert!(classify_regime(4, 5, int(1)).is_err());
    }

    #[test]
    fn corner_examples() {
        let set = |v: Vec<RatePoint>| v.into_iter().collect::<BTreeSet<_>>();
        assert_eq!(
            set(inner_corners(Setup::R0RL, 2, 1, int(1)).unwrap()),
            set(vec![ipt(0, 2), ipt(1, 0)])
        );
        assert_eq!(
            set(inner_corners(Setup::R0RL, 3, 1, frac(1, 3)).unwrap()),
            set(vec![ipt(0, 3), ipt(2, 1), pt(frac(8, 3), int(0))])
        );
        assert_eq!(
            set(inner_corners(Setup::RLRM, 4, 1, frac(1, 2)).unwrap()),
            set(vec![pt(int(2), frac(3, 2)), pt(int(0), frac(7, 2))])
        );
    }

    #[test]
    fn bound_examples() {
        let toy = outer_halfplanes(Setup::R0RL, 2, 1, int(1), false).unwrap();
        assert_eq!(toy.len(), 2);
        assert_eq!((toy[0].a, toy[0].b, toy[0].c), (int(2), int(1), int(2)));
        assert_eq!((toy[1].a, toy[1].b, toy[1].c), (int(1), int(1), int(2)));

        let w = &outer_halfplanes(Setup::R0RL, 4, 1, frac(1, 2), false).unwrap()[0];
        assert_eq!((w.a, w.b, w.c), (int(4), int(3), int(14)));

        let planes = outer_halfplanes(Setup::RLRM, 2, 2, frac(1, 2), false).unwrap();
        let all = planes.iter().find(|h| h.label == "rlrm-all-interfered").unwrap();
        assert_eq!((all.a, all.b, all.c), (int(1), int(0), int(1)));
    }

    #[test]
    fn conjectures_only_on_request() {
        let without = outer_halfplanes(Setup::R0RL, 4, 3, int(1), false).unwrap();
        assert!(without.iter().all(|h| h.status == BoundStatus::Proven));
        let with = outer_halfplanes(Setup::R0RL, 4, 3, int(1), true).unwrap();
        let conj: Vec<_> = with.iter().filter(|h| h.status == BoundStatus::Conjectured).collect();
        assert_eq!(conj.len(), 1);
        assert_eq!((conj[0].a, conj[0].b, conj[0].c), (int(2), int(1), int(4)));
    }

    #[test]
    fn tightness_examples() {
        for k in 0..=8 {
            let a = frac(k, 4);
            let r = tightness_report(Setup::R0RL, 4, 1, a).unwrap();
            assert_eq!(r.verdict, Verdict::TightProven, "alpha={a}");
        }
        assert_eq!(tightness_report(Setup::R0RL, 2, 1, frac(1, 4)).unwrap().verdict, Verdict::TightProven);
        let r = tightness_report(Setup::R0RL, 4, 3, int(1)).unwrap();
        assert_eq!(r.verdict, Verdict::TightIfConjecture);
        assert!(r.inner.vertices().contains(&ipt(2, 0)));
        assert!(!r.gap_vertices.is_empty());
        assert!(r.gap_area() > int(0));
        assert_eq!(r.gap_area_conjectured(), int(0));

        let r = tightness_report(Setup::RLRM, 4, 3, int(1)).unwrap();
        assert_eq!(r.verdict, Verdict::TightIfConjecture);
    }

    #[test]
    fn dominance_examples() {
        let d = dominance_check(Setup::R0RL, 4, 3, frac(1, 2)).unwrap();
        assert!(d.redundant && d.in_corollary_range);
        let d = dominance_check(Setup::RLRM, 4, 2, frac(3, 5)).unwrap();
        assert!(d.redundant && d.in_corollary_range);
        let d = dominance_check(Setup::R0RL, 4, 3, int(1)).unwrap();
        assert!(!d.redundant && !d.in_corollary_range);
    }

    #[test]
    fn conjecture_gap_examples() {
        assert!(conjecture_gap(Setup::R0RL, 2, 1, frac(1, 4)).unwrap().is_empty());

        let g = conjecture_gap(Setup::RLRM, 4, 3, int(1)).unwrap();
        assert!(!g.is_empty());
        // Proven planes allow R_L + R_M = 3 where the conjecture caps it at 2.
        assert!(g.iter().all(|v| v.vertex.x + v.vertex.y == int(3) && v.margin == int(1)));

        let g = conjecture_gap(Setup::R0RL, 4, 4, int(1)).unwrap();
        assert!(g.iter().any(|v| v.vertex == ipt(4, 0) && v.margin == int(4)));
    }

    #[test]
    fn interference_free_degeneracy() {
        // At alpha = 0 only the per-user sum bound M remains active.
        for m in 1..=5usize {
            for l in 1..=m {
                let r0 = outer_region(Setup::R0RL, m, l, int(0), false).unwrap();
                let mr = m as i128;
                assert_eq!(r0.vertices(), &[ipt(0, 0), ipt(mr, 0), ipt(0, mr)], "M={m} L={l}");
                let r = outer_region(Setup::RLRM, m, l, int(0), false).unwrap();
                assert_eq!(r.vertices(), &[ipt(0, 0), ipt(mr, 0), ipt(0, mr)], "M={m} L={l}");
            }
        }
    }

    #[test]
    fn boundary_families_agree() {
        // outer_halfplanes asserts agreement; sweep a fine grid.
        for m in [2usize, 4, 6] {
            for step in 0..=48 {
                let a = frac(step, 24);
                for setup in Setup::ALL {
                    outer_halfplanes(setup, m, m / 2, a, true).unwrap();
                }
            }
        }
    }
}
