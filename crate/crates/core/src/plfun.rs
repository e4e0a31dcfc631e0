//! Piecewise-linear slope ±1 functions ("folded paths") and the daughter fold.
//!
//! A [`FoldedPath`] is stored as its domain, the value and slope at the left
//! end, and the ordered list of interior turning points together with the
//! function value at each. Values are cached so evaluation is a binary search;
//! the image is cached because deep path walks query it at every node.

use crate::turnlist::{RawTurn, TurnList};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_exact, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Result<Self> {
        if lo > hi {
            return Err(Error::InconsistentIntervals(format!(
                "lo {} > hi {}",
                fmt_exact(&lo),
                fmt_exact(&hi)
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: Q::zero(), hi: Q::one() }
    }

    pub fn length(&self) -> Q {
        self.hi - self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_exact(&self.lo), fmt_exact(&self.hi))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slope {
    Up,
    Down,
}

impl Slope {
    pub fn flip(self) -> Slope {
        match self {
            Slope::Up => Slope::Down,
            Slope::Down => Slope::Up,
        }
    }

    /// Slope after `n` turns.
    pub fn after(self, n: usize) -> Slope {
        if n.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }

    pub fn sign(self) -> i128 {
        match self {
            Slope::Up => 1,
            Slope::Down => -1,
        }
    }

    /// Value reached from `y` after moving `dx` along this slope.
    #[inline]
    pub fn advance(self, y: &Q, dx: &Q) -> Q {
        match self {
            Slope::Up => y + dx,
            Slope::Down => y - dx,
        }
    }
}

/// Interior turning point with the function value there.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Turn {
    pub x: Q,
    pub y: Q,
}

/// Daughter clasp points `a <= b` inside a mother domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClaspChoice {
    pub a: Q,
    pub b: Q,
}

impl ClaspChoice {
    pub fn new(a: Q, b: Q) -> Self {
        ClaspChoice { a, b }
    }

    pub fn validate(&self, domain: &Interval) -> Result<()> {
        if domain.lo <= self.a && self.a <= self.b && self.b <= domain.hi {
            Ok(())
        } else {
            Err(Error::Clasp {
                a: fmt_exact(&self.a),
                b: fmt_exact(&self.b),
                c: fmt_exact(&domain.lo),
                d: fmt_exact(&domain.hi),
            })
        }
    }

    /// `(a - c, d - b)`.
    pub fn displacements(&self, domain: &Interval) -> (Q, Q) {
        (self.a - domain.lo, domain.hi - self.b)
    }
}

/// Which daughter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub fn bit(self) -> u8 {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }

    pub fn from_bit(bit: bool) -> Side {
        if bit {
            Side::One
        } else {
            Side::Zero
        }
    }
}

/// Slope ±1 piecewise-linear function on a closed interval.
///
/// Internally every coordinate is an integer numerator over one common
/// denominator `den`, so folds are plain integer work. The rational views
/// (`domain`, `start_value`, `image`) are kept in sync after each fold.
#[derive(Clone, Debug)]
pub struct FoldedPath {
    domain: Interval,
    start_value: Q,
    start_slope: Slope,
    image: Interval,
    den: i128,
    lo: i128,
    hi: i128,
    start: i128,
    // the turn list tracks its own value range, so folds never rescan it
    turns: TurnList,
}

impl PartialEq for FoldedPath {
    fn eq(&self, other: &FoldedPath) -> bool {
        self.domain == other.domain
            && self.start_value == other.start_value
            && self.start_slope == other.start_slope
            && self.image == other.image
            && self.turns.len() == other.turns.len()
            && self.turns().eq(other.turns())
    }
}

impl Eq for FoldedPath {}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

fn advance_raw(slope: Slope, y: i128, dx: i128) -> i128 {
    match slope {
        Slope::Up => y + dx,
        Slope::Down => y - dx,
    }
}

impl FoldedPath {
    /// The identity on `[0, 1]`.
    pub fn identity() -> Self {
        FoldedPath {
            domain: Interval::unit(),
            start_value: Q::zero(),
            start_slope: Slope::Up,
            image: Interval::unit(),
            den: 1,
            lo: 0,
            hi: 1,
            start: 0,
            turns: TurnList::new(),
        }
    }

    /// Builds a path from raw data, checking every invariant.
    pub fn from_parts(domain: Interval, start_value: Q, start_slope: Slope, turn_xs: &[Q]) -> Result<Self> {
        let mut prev_x = domain.lo;
        for x in turn_xs {
            if *x <= prev_x || *x >= domain.hi {
                return Err(Error::InconsistentIntervals(format!(
                    "turn {} not strictly inside and increasing in {}",
                    fmt_exact(x),
                    domain
                )));
            }
            prev_x = *x;
        }
        let mut den = 1i128;
        for v in [&domain.lo, &domain.hi, &start_value].into_iter().chain(turn_xs) {
            den = lcm_checked(den, *v.denom())?;
        }
        let mut path = FoldedPath {
            domain: domain.clone(),
            start_value,
            start_slope,
            image: Interval::unit(),
            den,
            lo: 0,
            hi: 0,
            start: 0,
            turns: TurnList::new(),
        };
        path.lo = path.scaled(&domain.lo)?;
        path.hi = path.scaled(&domain.hi)?;
        path.start = path.scaled(&start_value)?;
        let mut prev = path.lo;
        let mut y = path.start;
        let mut slope = start_slope;
        for x in turn_xs {
            let x = path.scaled(x)?;
            y = advance_raw(slope, y, x - prev);
            path.turns.push_back(RawTurn { x, y });
            slope = slope.flip();
            prev = x;
        }
        path.sync();
        if path.image.lo < Q::zero() || path.image.hi > Q::one() {
            return Err(Error::InconsistentIntervals(format!("image {} leaves [0, 1]", path.image)));
        }
        Ok(path)
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn start_value(&self) -> &Q {
        &self.start_value
    }

    pub fn start_slope(&self) -> Slope {
        self.start_slope
    }

    pub fn turns(&self) -> impl DoubleEndedIterator<Item = Turn> + '_ {
        self.turns.iter().map(|t| Turn { x: self.q_of(t.x), y: self.q_of(t.y) })
    }

    pub fn turn_count(&self) -> usize {
        self.turns.len()
    }

    pub fn end_slope(&self) -> Slope {
        self.start_slope.after(self.turns.len())
    }

    pub fn end_value(&self) -> Q {
        self.q_of(self.end_raw())
    }

    fn q_of(&self, n: i128) -> Q {
        Q::new(n, self.den)
    }

    /// Numerator of `x` over `den`, if `x` lies on this path's grid.
    fn try_scaled(&self, x: &Q) -> Option<i128> {
        let d = *x.denom();
        if self.den % d != 0 {
            return None;
        }
        x.numer().checked_mul(self.den / d)
    }

    fn scaled(&self, x: &Q) -> Result<i128> {
        self.try_scaled(x).ok_or_else(|| overflow(&fmt_exact(x)))
    }

    /// Refines the common denominator so that `x` is representable.
    fn admit(&mut self, x: &Q) -> Result<()> {
        if self.den % *x.denom() == 0 {
            return Ok(());
        }
        let den = lcm_checked(self.den, *x.denom())?;
        let k = den / self.den;
        let mul = |v: i128| v.checked_mul(k).ok_or_else(|| overflow("rescaling turns"));
        self.lo = mul(self.lo)?;
        self.hi = mul(self.hi)?;
        self.start = mul(self.start)?;
        self.turns
            .try_map(|t| Some(RawTurn { x: t.x.checked_mul(k)?, y: t.y.checked_mul(k)? }))
            .ok_or_else(|| overflow("rescaling turns"))?;
        self.den = den;
        Ok(())
    }

    fn end_raw(&self) -> i128 {
        match self.turns.back() {
            Some(t) => advance_raw(self.end_slope(), t.y, self.hi - t.x),
            None => advance_raw(self.start_slope, self.start, self.hi - self.lo),
        }
    }

    /// Index of the segment containing `x`: number of turns `<= x`.
    fn segment_of(&self, x: i128) -> usize {
        self.turns.partition_point(|t| t.x <= x)
    }

    fn value_in_segment(&self, seg: usize, x: i128) -> i128 {
        if seg == 0 {
            advance_raw(self.start_slope, self.start, x - self.lo)
        } else {
            let t = self.turns.get(seg - 1);
            advance_raw(self.start_slope.after(seg), t.y, x - t.x)
        }
    }

    fn slope_right_raw(&self, x: i128) -> Slope {
        if x >= self.hi {
            return self.end_slope();
        }
        self.start_slope.after(self.segment_of(x))
    }

    fn slope_left_raw(&self, x: i128) -> Slope {
        if x <= self.lo {
            return self.start_slope;
        }
        self.start_slope.after(self.turns.partition_point(|t| t.x < x))
    }

    /// Off-grid queries: the number of turns `<= x` (or `< x` when `strict`).
    fn segment_of_q(&self, x: &Q, strict: bool) -> usize {
        match self.try_scaled(x) {
            Some(n) if strict => self.turns.partition_point(|t| t.x < n),
            Some(n) => self.segment_of(n),
            None if strict => self.turns.partition_point(|t| self.q_of(t.x) < *x),
            None => self.turns.partition_point(|t| self.q_of(t.x) <= *x),
        }
    }

    fn value_at(&self, x: &Q) -> Q {
        if let Some(n) = self.try_scaled(x) {
            return self.q_of(self.value_in_segment(self.segment_of(n), n));
        }
        let seg = self.segment_of_q(x, false);
        if seg == 0 {
            self.start_slope.advance(&self.start_value, &(x - self.domain.lo))
        } else {
            let t = self.turns.get(seg - 1);
            self.start_slope.after(seg).advance(&self.q_of(t.y), &(x - self.q_of(t.x)))
        }
    }

    pub fn evaluate(&self, x: &Q) -> Result<Q> {
        if !self.domain.contains(x) {
            return Err(Error::Domain {
                x: fmt_exact(x),
                lo: fmt_exact(&self.domain.lo),
                hi: fmt_exact(&self.domain.hi),
            });
        }
        Ok(self.value_at(x))
    }

    /// Slope of the segment just right of `x` (just left at the right end).
    fn slope_right_of(&self, x: &Q) -> Slope {
        if *x >= self.domain.hi {
            return self.end_slope();
        }
        self.start_slope.after(self.segment_of_q(x, false))
    }

    pub fn image(&self) -> &Interval {
        &self.image
    }

    pub fn diameter(&self) -> Q {
        self.image.length()
    }

    /// Refreshes the rational views from the integer data.
    fn sync(&mut self) {
        let end = self.end_raw();
        let mut lo = self.start.min(end);
        let mut hi = self.start.max(end);
        if let Some((tlo, thi)) = self.turns.y_range() {
            lo = lo.min(tlo);
            hi = hi.max(thi);
        }
        self.domain = Interval { lo: self.q_of(self.lo), hi: self.q_of(self.hi) };
        self.start_value = self.q_of(self.start);
        self.image = Interval { lo: self.q_of(lo), hi: self.q_of(hi) };
    }

    /// Exact image of the restriction to `iv`.
    pub fn image_on(&self, iv: &Interval) -> Result<Interval> {
        if !self.domain.contains_interval(iv) {
            return Err(Error::Domain {
                x: iv.to_string(),
                lo: fmt_exact(&self.domain.lo),
                hi: fmt_exact(&self.domain.hi),
            });
        }
        let ylo = self.value_at(&iv.lo);
        let yhi = self.value_at(&iv.hi);
        let (mut lo, mut hi) = if ylo < yhi { (ylo, yhi) } else { (yhi, ylo) };
        let start = self.segment_of_q(&iv.lo, false);
        for t in self.turns.iter_from(start) {
            let (x, y) = (self.q_of(t.x), self.q_of(t.y));
            if x >= iv.hi {
                break;
            }
            lo = lo.min(y);
            hi = hi.max(y);
        }
        Ok(Interval { lo, hi })
    }

    /// Both daughters under `clasp`, with copy semantics.
    pub fn fold_daughters(&self, clasp: &ClaspChoice) -> Result<(FoldedPath, FoldedPath)> {
        Ok((self.daughter(clasp, Side::Zero)?, self.daughter(clasp, Side::One)?))
    }

    pub fn daughter(&self, clasp: &ClaspChoice, side: Side) -> Result<FoldedPath> {
        let mut out = self.clone();
        out.fold_in_place(clasp, side)?;
        Ok(out)
    }

    /// Replaces `self` by one of its daughters.
    pub fn fold_in_place(&mut self, clasp: &ClaspChoice, side: Side) -> Result<()> {
        clasp.validate(&self.domain)?;
        self.admit(&clasp.a)?;
        self.admit(&clasp.b)?;
        let a = self.scaled(&clasp.a)?;
        let b = self.scaled(&clasp.b)?;
        // mirrored coordinates reach 2d - c; keep them representable
        let span = self.hi.checked_mul(2).and_then(|v| v.checked_sub(self.lo));
        let low = self.lo.checked_mul(2).and_then(|v| v.checked_sub(self.hi));
        if span.is_none() || low.is_none() {
            return Err(overflow("mirrored domain"));
        }
        match side {
            Side::Zero => self.fold_zero(a, b),
            Side::One => self.fold_one(a, b),
        }
        self.sync();
        Ok(())
    }

    /// `f0 = f(2c - x)` on `[2c - a, c]`, `f` on `[c, b]`.
    fn fold_zero(&mut self, a: i128, b: i128) {
        let c = self.lo;
        let fb = self.value_in_segment(self.segment_of(b), b);
        let fa = self.value_in_segment(self.segment_of(a), a);
        let slope_into_a = self.slope_left_raw(a);
        let c_value = self.start;
        let c_slope = self.start_slope;

        // drop [b, d)
        while let Some(t) = self.turns.back() {
            if t.x >= b {
                self.turns.pop_back();
            } else {
                break;
            }
        }

        let left_len = a - c;
        let right_len = b - c;
        // turns strictly inside (c, a), mirrored in reverse order
        let k = self.turns.partition_point(|t| t.x < a);
        let mirrored: Vec<RawTurn> = (0..k).map(|i| self.turns.get(i)).map(|t| RawTurn { x: 2 * c - t.x, y: t.y }).collect();
        if left_len != 0 && right_len != 0 {
            self.turns.push_front(RawTurn { x: c, y: c_value });
        }
        for m in mirrored {
            self.turns.push_front(m);
        }

        if left_len == 0 {
            self.start = c_value;
            self.start_slope = c_slope;
        } else {
            self.start = fa;
            self.start_slope = slope_into_a.flip();
        }
        self.lo = 2 * c - a;
        self.hi = b;
        // a degenerate domain has no segment; keep slope data canonical
        if self.lo == self.hi {
            self.start = fb;
            self.start_slope = Slope::Up;
            self.turns.clear();
        }
    }

    /// `f1 = f` on `[a, d]`, `f(2d - x)` on `[d, 2d - b]`.
    fn fold_one(&mut self, a: i128, b: i128) {
        let d = self.hi;
        let fa = self.value_in_segment(self.segment_of(a), a);
        let slope_after_a = self.slope_right_raw(a);
        let d_value = self.end_raw();
        let mirror_slope = self.end_slope().flip();

        while let Some(t) = self.turns.front() {
            if t.x <= a {
                self.turns.pop_front();
            } else {
                break;
            }
        }

        let left_len = d - a;
        let right_len = d - b;
        // turns strictly inside (b, d); push their mirrors after d
        let k = self.turns.partition_point(|t| t.x <= b);
        let n = self.turns.len();
        if left_len != 0 && right_len != 0 {
            self.turns.push_back(RawTurn { x: d, y: d_value });
        }
        for i in (k..n).rev() {
            let t = self.turns.get(i);
            self.turns.push_back(RawTurn { x: 2 * d - t.x, y: t.y });
        }

        if left_len == 0 {
            // starts at d and only runs the mirrored part
            self.start = d_value;
            self.start_slope = mirror_slope;
        } else {
            self.start = fa;
            self.start_slope = slope_after_a;
        }
        self.lo = a;
        self.hi = 2 * d - b;
        if self.lo == self.hi {
            self.start = fa;
            self.start_slope = Slope::Up;
            self.turns.clear();
        }
    }

    /// Exact agreement of the two restrictions to `iv`.
    pub fn equal_on(&self, other: &FoldedPath, iv: &Interval) -> Result<bool> {
        for f in [self, other] {
            if !f.domain.contains_interval(iv) {
                return Err(Error::Domain {
                    x: iv.to_string(),
                    lo: fmt_exact(&f.domain.lo),
                    hi: fmt_exact(&f.domain.hi),
                });
            }
        }
        if self.value_at(&iv.lo) != other.value_at(&iv.lo) {
            return Ok(false);
        }
        if iv.lo == iv.hi {
            return Ok(true);
        }
        if self.slope_right_of(&iv.lo) != other.slope_right_of(&iv.lo) {
            return Ok(false);
        }
        let inner = |f: &FoldedPath| -> Vec<Q> {
            let start = f.segment_of_q(&iv.lo, false);
            f.turns
                .iter_from(start)
                .map(|t| f.q_of(t.x))
                .take_while(|x| *x < iv.hi)
                .collect()
        };
        Ok(inner(self) == inner(other))
    }

    /// Graph vertices `(x, f(x))`: left end, every turn, right end.
    pub fn vertices(&self) -> Vec<(Q, Q)> {
        let mut out = Vec::with_capacity(self.turns.len() + 2);
        out.push((self.domain.lo, self.start_value));
        out.extend(self.turns().map(|t| (t.x, t.y)));
        if self.domain.hi > self.domain.lo {
            out.push((self.domain.hi, self.end_value()));
        }
        out
    }

    /// Checks every structural invariant; used by tests and verifiers.
    pub fn check_invariants(&self) -> Result<()> {
        let xs: Vec<Q> = self.turns().map(|t| t.x).collect();
        let rebuilt = FoldedPath::from_parts(self.domain.clone(), self.start_value, self.start_slope, &xs)?;
        if rebuilt != *self {
            return Err(Error::InconsistentIntervals("cached values disagree with turn data".into()));
        }
        Ok(())
    }
}

fn lcm_checked(a: i128, b: i128) -> Result<i128> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or_else(|| overflow("common denominator"))
}

/// Recovers `(a, b)` from a mother domain and its child-0 domain.
pub fn derive_clasp(mother: &Interval, child0: &Interval) -> Result<ClaspChoice> {
    let c = mother.lo;
    let a = c + c - child0.lo;
    let b = child0.hi;
    let clasp = ClaspChoice { a, b };
    clasp.validate(mother).map_err(|_| {
        Error::InconsistentIntervals(format!("{child0} is not a child-0 domain of {mother}"))
    })?;
    Ok(clasp)
}

/// Domain of the daughter on `side` without building the function.
pub fn daughter_domain(mother: &Interval, clasp: &ClaspChoice, side: Side) -> Interval {
    match side {
        Side::Zero => Interval { lo: mother.lo + mother.lo - clasp.a, hi: clasp.b },
        Side::One => Interval { lo: clasp.a, hi: mother.hi + mother.hi - clasp.b },
    }
}

pub fn identity_path() -> FoldedPath {
    FoldedPath::identity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi};

    fn fold_example() -> (FoldedPath, FoldedPath) {
        identity_path()
            .fold_daughters(&ClaspChoice::new(q(1, 3), q(3, 4)))
            .unwrap()
    }

    // Independent oracle: evaluate a chain of folds by pulling x back through
    // the reflections and applying the identity at the root.
    fn pullback(chain: &[(Interval, ClaspChoice, Side)], x: Q) -> Q {
        let mut x = x;
        for (mother, _clasp, side) in chain.iter().rev() {
            match side {
                Side::Zero => {
                    if x < mother.lo {
                        x = mother.lo + mother.lo - x;
                    }
                }
                Side::One => {
                    if x > mother.hi {
                        x = mother.hi + mother.hi - x;
                    }
                }
            }
        }
        x
    }

    fn grid_image(chain: &[(Interval, ClaspChoice, Side)], dom: &Interval, n: i128) -> Interval {
        let mut lo = None::<Q>;
        let mut hi = None::<Q>;
        for k in 0..=n {
            let x = dom.lo + dom.length() * q(k, n);
            let y = pullback(chain, x);
            lo = Some(lo.map_or(y, |l| l.min(y)));
            hi = Some(hi.map_or(y, |h| h.max(y)));
        }
        Interval { lo: lo.unwrap(), hi: hi.unwrap() }
    }

    #[test]
    fn identity_basics() {
        let f = identity_path();
        assert_eq!(f.evaluate(&qi(0)).unwrap(), qi(0));
        assert_eq!(f.evaluate(&qi(1)).unwrap(), qi(1));
        assert_eq!(f.evaluate(&q(3, 10)).unwrap(), q(3, 10));
        assert_eq!(f.diameter(), qi(1));
        assert_eq!(f.turn_count(), 0);
    }

    #[test]
    fn evaluate_outside_domain_errors() {
        assert!(matches!(identity_path().evaluate(&q(-1, 3)), Err(Error::Domain { .. })));
    }

    #[test]
    fn fold_example_children() {
        let (f0, f1) = fold_example();
        assert_eq!(f0.domain(), &Interval::new(q(-1, 3), q(3, 4)).unwrap());
        assert_eq!(f1.domain(), &Interval::new(q(1, 3), q(5, 4)).unwrap());
        assert_eq!(f0.image(), &Interval::new(qi(0), q(3, 4)).unwrap());
        assert_eq!(f1.image(), &Interval::new(q(1, 3), qi(1)).unwrap());
        assert_eq!(f0.evaluate(&q(-1, 3)).unwrap(), q(1, 3));
        assert_eq!(f0.diameter(), q(3, 4));
        // grid oracle agrees on f1's image
        let chain = vec![(Interval::unit(), ClaspChoice::new(q(1, 3), q(3, 4)), Side::One)];
        // 1320 is a multiple of 11 and 12, so the grid hits every breakpoint
        assert_eq!(grid_image(&chain, f1.domain(), 1320), *f1.image());
    }

    #[test]
    fn second_generation_against_grid_oracle() {
        let (f0, _) = fold_example();
        let clasp = ClaspChoice::new(qi(0), q(1, 2));
        let (f00, _) = f0.fold_daughters(&clasp).unwrap();
        assert_eq!(f00.domain(), &Interval::new(q(-2, 3), q(1, 2)).unwrap());
        let xs: Vec<Q> = f00.turns().map(|t| t.x).collect();
        assert_eq!(xs, vec![q(-1, 3), qi(0)]);
        assert_eq!(f00.evaluate(&q(-2, 3)).unwrap(), qi(0));
        assert_eq!(f00.diameter(), q(1, 2));
        let chain = vec![
            (Interval::unit(), ClaspChoice::new(q(1, 3), q(3, 4)), Side::Zero),
            (f0.domain().clone(), clasp, Side::Zero),
        ];
        assert_eq!(grid_image(&chain, f00.domain(), 1200), *f00.image());
        for k in 0..=24 {
            let x = q(-2, 3) + q(k, 24) * f00.domain().length();
            assert_eq!(f00.evaluate(&x).unwrap(), pullback(&chain, x));
        }
    }

    #[test]
    fn degenerate_clasp_reproduces_mother() {
        let (f0, _) = fold_example();
        let clasp = ClaspChoice::new(f0.domain().lo, f0.domain().hi);
        let (a, b) = f0.fold_daughters(&clasp).unwrap();
        assert_eq!(a, f0);
        assert_eq!(b, f0);
    }

    #[test]
    fn invalid_clasp_rejected() {
        let f = identity_path();
        assert!(matches!(
            f.fold_daughters(&ClaspChoice::new(q(1, 2), q(1, 3))),
            Err(Error::Clasp { .. })
        ));
        assert!(f.fold_daughters(&ClaspChoice::new(q(-1, 2), q(1, 3))).is_err());
    }

    #[test]
    fn derive_clasp_examples() {
        let c = derive_clasp(&Interval::unit(), &Interval::new(q(-1, 3), q(3, 4)).unwrap()).unwrap();
        assert_eq!(c, ClaspChoice::new(q(1, 3), q(3, 4)));
        let c = derive_clasp(&Interval::unit(), &Interval::unit()).unwrap();
        assert_eq!(c, ClaspChoice::new(qi(0), qi(1)));
        assert!(derive_clasp(&Interval::unit(), &Interval::new(q(1, 3), q(3, 4)).unwrap()).is_err());
    }

    #[test]
    fn equal_on_examples() {
        let (f0, _) = fold_example();
        let id = identity_path();
        assert!(f0.equal_on(&f0, f0.domain()).unwrap());
        assert!(f0.equal_on(&id, &Interval::new(q(1, 3), q(3, 4)).unwrap()).unwrap());
        assert!(!f0.equal_on(&id, &Interval::new(qi(0), q(1, 2)).unwrap()).is_err());
        assert!(matches!(
            f0.equal_on(&id, &Interval::new(q(-1, 3), q(3, 4)).unwrap()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn equal_on_detects_difference() {
        let (f0, _) = fold_example();
        let (f00, _) = f0.fold_daughters(&ClaspChoice::new(qi(0), q(1, 2))).unwrap();
        assert!(f00.equal_on(&f0, &Interval::new(q(-1, 3), q(1, 2)).unwrap()).unwrap());
        // same domain and endpoint value, no fold
        let straight = FoldedPath::from_parts(f0.domain().clone(), q(1, 3), Slope::Down, &[]);
        assert!(straight.is_err()); // would leave [0, 1]
        let tent = FoldedPath::from_parts(f0.domain().clone(), q(1, 3), Slope::Down, &[q(-1, 6), q(1, 2)]).unwrap();
        let iv = Interval::new(q(-1, 3), qi(0)).unwrap();
        assert!(!tent.equal_on(&f0, &iv).unwrap());
        assert!(tent.equal_on(&f0, &Interval::new(q(-1, 3), q(-1, 6)).unwrap()).unwrap());
    }

    #[test]
    fn a_equals_d_edge() {
        let f = identity_path();
        let clasp = ClaspChoice::new(qi(1), qi(1));
        let one = f.daughter(&clasp, Side::One).unwrap();
        assert_eq!(one.domain(), &Interval::new(qi(1), qi(1)).unwrap());
        let clasp = ClaspChoice::new(qi(1), q(1, 2)); // invalid, a > b
        assert!(f.daughter(&clasp, Side::One).is_err());
        let clasp = ClaspChoice::new(q(1, 2), q(1, 2));
        let one = f.daughter(&clasp, Side::One).unwrap();
        one.check_invariants().unwrap();
        assert_eq!(one.domain(), &Interval::new(q(1, 2), q(3, 2)).unwrap());
        assert_eq!(one.evaluate(&q(3, 2)).unwrap(), q(1, 2));
    }

    #[test]
    fn from_parts_rejects_out_of_range() {
        let r = FoldedPath::from_parts(Interval::new(qi(0), qi(2)).unwrap(), qi(0), Slope::Up, &[]);
        assert!(r.is_err());
        let r = FoldedPath::from_parts(Interval::new(qi(0), qi(2)).unwrap(), qi(0), Slope::Up, &[qi(1)]);
        assert!(r.is_ok());
    }
}
