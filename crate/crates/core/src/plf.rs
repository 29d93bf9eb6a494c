//! Exact continuous piecewise linear functions.
//!
//! Functions are stored as their breakpoints; collinear interior points are
//! kept (so each integer step stays traceable to an item) until
//! [`Plf::normalize`] is called.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::Zero;

use crate::bsp::prefix_costs_by;
use crate::error::{Error, Result};
use crate::greedy::greedy_order;
use crate::model::{CostMap, ItemId, Policy};
use crate::rational::{format_pq, from_usize, half, Rational};

/// Whether an envelope or extremum looks for the largest or smallest value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Min,
    Max,
}

/// Sort key of a greedy order: primary cost ascending, secondary cost by
/// policy, then id.
#[derive(Debug, Clone, Copy)]
pub struct OrderKey<'a> {
    pub primary: &'a CostMap,
    pub secondary: &'a CostMap,
    pub policy: Policy,
}

impl<'a> OrderKey<'a> {
    /// Orders by a single cost, ties by id.
    pub fn by(cost: &'a CostMap) -> Self {
        OrderKey { primary: cost, secondary: cost, policy: Policy::Optimistic }
    }
}

/// A continuous piecewise linear function on a closed interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plf {
    points: Vec<(Rational, Rational)>,
}

/// A linear piece on `[x0, x1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub x0: Rational,
    pub y0: Rational,
    pub x1: Rational,
    pub y1: Rational,
}

impl Segment {
    pub fn new(x0: Rational, y0: Rational, x1: Rational, y1: Rational) -> Self {
        Segment { x0, y0, x1, y1 }
    }

    fn at(&self, x: &Rational) -> Rational {
        if self.x0 == self.x1 {
            return self.y0.clone();
        }
        &self.y0 + (&self.y1 - &self.y0) * (x - &self.x0) / (&self.x1 - &self.x0)
    }

    fn covers(&self, x: &Rational) -> bool {
        self.x0 <= *x && *x <= self.x1
    }
}

impl Plf {
    /// Builds a function from breakpoints with strictly increasing `x`.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInstance("a piecewise linear function needs a breakpoint".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidInstance("breakpoints must have strictly increasing x".into()));
        }
        Ok(Plf { points })
    }

    /// The function defined only at `x`.
    pub fn point(x: Rational, y: Rational) -> Self {
        Plf { points: alloc::vec![(x, y)] }
    }

    /// Constant zero on `[lo, hi]`.
    pub fn zero(lo: Rational, hi: Rational) -> Self {
        if lo == hi {
            Plf::point(lo, Rational::zero())
        } else {
            Plf { points: alloc::vec![(lo, Rational::zero()), (hi, Rational::zero())] }
        }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    /// `[first x, last x]`.
    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.points[0].0, &self.points[self.points.len() - 1].0)
    }

    /// Linear pieces between consecutive breakpoints.
    pub fn segments(&self) -> Vec<Segment> {
        if self.points.len() == 1 {
            let (x, y) = &self.points[0];
            return alloc::vec![Segment::new(x.clone(), y.clone(), x.clone(), y.clone())];
        }
        self.points
            .windows(2)
            .map(|w| Segment::new(w[0].0.clone(), w[0].1.clone(), w[1].0.clone(), w[1].1.clone()))
            .collect()
    }

    /// Value at `x`, or `None` outside the domain.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        let i = self.points.partition_point(|(px, _)| px < x);
        if self.points[i].0 == *x {
            return Some(self.points[i].1.clone());
        }
        let (x0, y0) = &self.points[i - 1];
        let (x1, y1) = &self.points[i];
        Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Drops interior breakpoints where the slope does not change.
    pub fn normalize(&self) -> Self {
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(self.points.len());
        for p in &self.points {
            while out.len() >= 2 {
                let (x0, y0) = &out[out.len() - 2];
                let (x1, y1) = &out[out.len() - 1];
                if (y1 - y0) * (&p.0 - x1) == (&p.1 - y1) * (x1 - x0) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p.clone());
        }
        Plf { points: out }
    }

    /// Breakpoints plus the midpoints of all pieces.
    pub fn sample_points(&self) -> Vec<Rational> {
        let mut xs: Vec<Rational> = Vec::with_capacity(2 * self.points.len());
        for (i, (x, _)) in self.points.iter().enumerate() {
            if i > 0 {
                xs.push((&self.points[i - 1].0 + x) * half());
            }
            xs.push(x.clone());
        }
        xs
    }

    /// The breakpoint dump: one `x y` pair of `p/q` rationals per line.
    pub fn to_dump(&self) -> String {
        let mut s = String::new();
        for (x, y) in &self.points {
            let _ = writeln!(s, "{} {}", format_pq(x), format_pq(y));
        }
        s
    }

    /// Restriction to `[lo, hi]` (which must lie in the domain).
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Result<Self> {
        let (a, b) = self.domain();
        if lo < a || hi > b || lo > hi {
            return Err(Error::InvalidInstance("restriction outside the domain".into()));
        }
        let mut pts = alloc::vec![(lo.clone(), self.eval(lo).unwrap())];
        pts.extend(self.points.iter().filter(|(x, _)| x > lo && x < hi).cloned());
        if hi > lo {
            pts.push((hi.clone(), self.eval(hi).unwrap()));
        }
        Ok(Plf { points: pts })
    }
}

/// `k ↦ Σ slope` over the first `k` items of the greedy order, on the
/// integers `lo..=hi` (linear in between).
pub fn plf_selection(
    items: impl IntoIterator<Item = ItemId>,
    key: OrderKey<'_>,
    slope: &CostMap,
    lo: usize,
    hi: usize,
) -> Result<Plf> {
    let order = greedy_order(items, key.primary, key.secondary, key.policy)?;
    if lo > hi || hi > order.len() {
        return Err(Error::InvalidInstance(alloc::format!(
            "range [{lo}, {hi}] out of bounds for {} items",
            order.len()
        )));
    }
    let sums = prefix_costs_by(slope, order.as_slice())?;
    Ok(Plf { points: (lo..=hi).map(|k| (from_usize(k), sums[k].clone())).collect() })
}

/// Mirrored selection function: `x ↦ Σ slope` over the first `total − x`
/// items of the greedy order, on the integers `lo..=hi`.
pub fn plf_mirrored(
    items: impl IntoIterator<Item = ItemId>,
    key: OrderKey<'_>,
    slope: &CostMap,
    lo: usize,
    hi: usize,
    total: usize,
) -> Result<Plf> {
    let order = greedy_order(items, key.primary, key.secondary, key.policy)?;
    if lo > hi || hi > total || total - lo > order.len() {
        return Err(Error::InvalidInstance(alloc::format!(
            "range [{lo}, {hi}] inconsistent with total {total} and {} items",
            order.len()
        )));
    }
    let sums = prefix_costs_by(slope, order.as_slice())?;
    Ok(Plf { points: (lo..=hi).map(|x| (from_usize(x), sums[total - x].clone())).collect() })
}

/// Pointwise sum of two functions with the same domain.
pub fn plf_sum(f: &Plf, g: &Plf) -> Result<Plf> {
    if f.domain() != g.domain() {
        return Err(Error::InvalidInstance("sum of functions with different domains".into()));
    }
    let mut xs: Vec<&Rational> = f.points.iter().chain(&g.points).map(|(x, _)| x).collect();
    xs.sort();
    xs.dedup();
    Ok(Plf { points: xs.into_iter().map(|x| (x.clone(), f.eval(x).unwrap() + g.eval(x).unwrap())).collect() })
}

/// Translates every breakpoint by `(dx, dy)`.
pub fn plf_shift(f: &Plf, dx: &Rational, dy: &Rational) -> Plf {
    Plf { points: f.points.iter().map(|(x, y)| (x + dx, y + dy)).collect() }
}

/// First breakpoint with the smallest (or largest) value.
pub fn plf_extremum(f: &Plf, mode: Mode) -> (Rational, Rational) {
    let mut best = &f.points[0];
    for p in &f.points[1..] {
        let better = match mode {
            Mode::Min => p.1 < best.1,
            Mode::Max => p.1 > best.1,
        };
        if better {
            best = p;
        }
    }
    best.clone()
}

/// Upper or lower envelope of functions sharing one domain.
pub fn plf_envelope(fs: &[Plf], mode: Mode) -> Result<Plf> {
    let first = fs.first().ok_or_else(|| Error::InvalidInstance("envelope of no functions".into()))?;
    if fs.iter().any(|f| f.domain() != first.domain()) {
        return Err(Error::InvalidInstance("envelope of functions with different domains".into()));
    }
    plf_envelope_partial(fs, mode)
}

/// Envelope of functions whose domains may differ; the result lives on the
/// union of the domains, which must be an interval on which the envelope is
/// continuous.
pub fn plf_envelope_partial(fs: &[Plf], mode: Mode) -> Result<Plf> {
    let segs: Vec<Segment> = fs.iter().flat_map(Plf::segments).collect();
    envelope_of_segments(&segs, mode)
}

/// Envelope of linear pieces. On each elementary cell between consecutive
/// piece endpoints the active pieces are lines, whose envelope is traced by
/// repeatedly jumping to the line that overtakes the current one first.
pub fn envelope_of_segments(segs: &[Segment], mode: Mode) -> Result<Plf> {
    if segs.is_empty() {
        return Err(Error::InvalidInstance("envelope of no pieces".into()));
    }
    let sign = match mode {
        Mode::Max => Rational::from_integer(1.into()),
        Mode::Min => Rational::from_integer((-1).into()),
    };
    // Work with the upper envelope of sign-adjusted pieces.
    let segs: Vec<Segment> =
        segs.iter().map(|s| Segment::new(s.x0.clone(), &s.y0 * &sign, s.x1.clone(), &s.y1 * &sign)).collect();
    let mut xs: Vec<&Rational> = segs.iter().flat_map(|s| [&s.x0, &s.x1]).collect();
    xs.sort();
    xs.dedup();
    let point_value = |x: &Rational| segs.iter().filter(|s| s.covers(x)).map(|s| s.at(x)).max();

    let mut points: Vec<(Rational, Rational)> = Vec::new();
    if xs.len() == 1 {
        points.push((xs[0].clone(), point_value(xs[0]).unwrap()));
    }
    for w in xs.windows(2) {
        let (xa, xb) = (w[0], w[1]);
        // Lines as (value at xa, slope).
        let lines: Vec<(Rational, Rational)> = segs
            .iter()
            .filter(|s| s.x0 < s.x1 && s.x0 <= *xa && s.x1 >= *xb)
            .map(|s| {
                let slope = (&s.y1 - &s.y0) / (&s.x1 - &s.x0);
                (s.at(xa), slope)
            })
            .collect();
        if lines.is_empty() {
            return Err(Error::InvalidInstance("pieces do not cover an interval".into()));
        }
        let start = point_value(xa).unwrap();
        let mut cur = lines.iter().max_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1))).unwrap();
        if cur.0 != start {
            return Err(Error::InvalidInstance("envelope is discontinuous".into()));
        }
        match points.last() {
            Some((x, y)) if x == xa => {
                if *y != start {
                    return Err(Error::InvalidInstance("envelope is discontinuous".into()));
                }
            }
            _ => points.push((xa.clone(), start)),
        }
        let mut at = Rational::zero(); // offset from xa of the current breakpoint
        let width = xb - xa;
        loop {
            let mut next: Option<(Rational, &(Rational, Rational))> = None;
            for l in &lines {
                if l.1 <= cur.1 {
                    continue;
                }
                let cross = (&cur.0 - &l.0) / (&l.1 - &cur.1);
                if cross <= at {
                    continue;
                }
                let better = match &next {
                    None => true,
                    Some((c, nl)) => cross < *c || (cross == *c && l.1 > nl.1),
                };
                if better {
                    next = Some((cross, l));
                }
            }
            match next {
                Some((cross, l)) if cross < width => {
                    points.push((xa + &cross, &cur.0 + &cur.1 * &cross));
                    at = cross;
                    cur = l;
                }
                _ => break,
            }
        }
        let end = &cur.0 + &cur.1 * &width;
        points.push((xb.clone(), end));
    }
    // The value at each cell boundary must agree with every covering piece
    // (including pieces that end there), otherwise the envelope jumps.
    for (x, y) in &points {
        if point_value(x).as_ref() != Some(y) {
            return Err(Error::InvalidInstance("envelope is discontinuous".into()));
        }
    }
    Ok(Plf { points: points.into_iter().map(|(x, y)| (x, y * &sign)).collect() })
}

/// Concatenates functions on adjacent domains; shared endpoints must agree.
pub fn plf_join(parts: &[Plf]) -> Result<Plf> {
    let mut points: Vec<(Rational, Rational)> = Vec::new();
    for f in parts {
        for p in &f.points {
            match points.last() {
                Some(last) if last.0 == p.0 => {
                    if last.1 != p.1 {
                        return Err(Error::InvalidInstance("joined functions disagree at a shared endpoint".into()));
                    }
                }
                Some(last) if last.0 > p.0 => {
                    return Err(Error::InvalidInstance("joined functions are not adjacent".into()));
                }
                _ => points.push(p.clone()),
            }
        }
    }
    Plf::new(points)
}
