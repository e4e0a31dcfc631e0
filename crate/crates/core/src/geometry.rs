//! Plane picture of domains: the interval `[c, d]` is the point `(c, d)`
//! above the diagonal, and clasps are tangent steps around a far-away
//! bullseye of concentric circles.
//!
//! Everything here is binary64. Callers snap stepped points back to the
//! exact grid before folding.

use crate::error::{Error, Result};
use crate::exact::to_f64;
use crate::plfun::Interval;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    /// Height above the diagonal, i.e. the domain length.
    pub fn length(&self) -> f64 {
        self.y - self.x
    }

    pub fn dist2(&self, other: &PlanePoint) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &PlanePoint) -> f64 {
        self.dist2(other).sqrt()
    }
}

pub fn to_plane(iv: &Interval) -> PlanePoint {
    PlanePoint::new(to_f64(&iv.lo), to_f64(&iv.hi))
}

/// `p` lies in the closed NW quadrant of `q`.
pub fn nw_contains(p: &PlanePoint, q: &PlanePoint) -> bool {
    p.x <= q.x && p.y >= q.y
}

pub fn middle_third_point(c: f64, t: f64) -> Result<PlanePoint> {
    if !(t > c) {
        return Err(Error::Geometry(format!(
            "retrace boundary {t} must exceed {c}"
        )));
    }
    let w = t - c;
    Ok(PlanePoint::new(c + w / 3.0, c + 2.0 * w / 3.0))
}

/// Positive step lengths for Σ ε_i² divergence.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsSchedule {
    Constant(f64),
    /// `ε_i = k · i^(-p)`.
    Power { k: f64, p: f64 },
    /// Terms `ε_1, ε_2, ...`; the last term repeats forever.
    Explicit(Vec<f64>),
}

impl EpsSchedule {
    /// Checks positivity and, per kind, that the square sum diverges.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match self {
            EpsSchedule::Constant(e) if !(*e > 0.0 && e.is_finite()) => {
                bad(format!("constant schedule needs a positive value, got {e}"))
            }
            EpsSchedule::Power { k, p } if !(*k > 0.0 && k.is_finite()) => {
                bad(format!("power schedule needs k > 0, got {k}"))
            }
            EpsSchedule::Power { p, .. } if !(*p >= 0.0 && *p <= 0.5) => bad(format!(
                "power schedule needs 0 <= p <= 1/2 for a divergent square sum, got {p}"
            )),
            EpsSchedule::Explicit(v) if v.is_empty() => bad("explicit schedule is empty".into()),
            EpsSchedule::Explicit(v) if v.iter().any(|e| !(*e > 0.0 && e.is_finite())) => {
                bad("explicit schedule terms must be positive".into())
            }
            _ => Ok(()),
        }
    }

    /// `ε_i` for `i >= 1`; index 0 is treated as 1.
    pub fn term(&self, i: u64) -> f64 {
        let i = i.max(1);
        match self {
            EpsSchedule::Constant(e) => *e,
            EpsSchedule::Power { k, p } => k * (i as f64).powf(-p),
            EpsSchedule::Explicit(v) => v[((i - 1) as usize).min(v.len() - 1)],
        }
    }
}

/// Concentric circles around `center`. Only the running square sum of the
/// step lengths is kept, which is all the radius invariant needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bullseye {
    pub center: PlanePoint,
    pub base_radius: f64,
    pub steps: u64,
    pub step_sq_sum: f64,
}

impl Bullseye {
    pub fn new(center: PlanePoint, p: &PlanePoint) -> Self {
        Bullseye { center, base_radius: center.dist(p), steps: 0, step_sq_sum: 0.0 }
    }

    pub fn advanced(&self, h: f64) -> Self {
        Bullseye { steps: self.steps + 1, step_sq_sum: self.step_sq_sum + h * h, ..*self }
    }

    /// `√(r0² + Σ h²)`.
    pub fn radius(&self) -> f64 {
        (self.base_radius * self.base_radius + self.step_sq_sum).sqrt()
    }
}

/// Largest `y − x` on the arc through `p` around `center` that stays in the
/// NW quadrant of `q` dilated by `margin`. `None` when that arc is not a
/// short arc cut off by both quadrant edges.
pub fn arc_length_sup(center: &PlanePoint, p: &PlanePoint, q: &PlanePoint, margin: f64) -> Option<f64> {
    let r2 = center.dist2(p);
    let edge_x = q.x + margin;
    let edge_y = q.y - margin;
    let dx = edge_x - center.x;
    let dy = center.y - edge_y;
    if dx <= 0.0 || dy <= 0.0 || r2 <= dx * dx || r2 <= dy * dy {
        return None;
    }
    // lower crossing of the vertical edge, right crossing of the horizontal one
    let y_v = center.y - (r2 - dx * dx).sqrt();
    let x_h = center.x + (r2 - dy * dy).sqrt();
    if y_v < edge_y || x_h > edge_x {
        return None;
    }
    // y − x is linear, so on an arc avoiding the (−1,1) extreme its sup sits at an end
    Some((y_v - edge_x).max(edge_y - x_h).max(p.length()))
}

pub fn select_center(p: &PlanePoint, q: &PlanePoint, length_bound: f64, max_step: f64) -> Result<PlanePoint> {
    if !nw_contains(p, q) {
        return Err(Error::Geometry(format!(
            "({}, {}) is not in the NW quadrant of ({}, {})",
            p.x, p.y, q.x, q.y
        )));
    }
    if !(p.length() < length_bound) {
        return Err(Error::InfeasibleCenter(format!(
            "length {} already reaches bound {length_bound}",
            p.length()
        )));
    }
    let dir = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = 10.0 * p.length().max(q.dist(p)).max(f64::MIN_POSITIVE);
    for _ in 0..=60 {
        let o = PlanePoint::new(q.x - s * dir, q.y + s * dir);
        if o.x < p.x && o.y > p.y {
            if let Some(sup) = arc_length_sup(&o, p, q, max_step) {
                if sup < length_bound {
                    return Ok(o);
                }
            }
        }
        s *= 2.0;
    }
    Err(Error::InfeasibleCenter(format!(
        "no center within 60 doublings for bound {length_bound}"
    )))
}

/// Steps from `p` a distance `h` along the tangent in both directions.
/// Returns `(child0 point, child1 point)`.
pub fn tangent_step(center: &PlanePoint, p: &PlanePoint, h: f64) -> Result<(PlanePoint, PlanePoint)> {
    let vx = p.x - center.x;
    let vy = p.y - center.y;
    if !(vx > 0.0 && vy < 0.0) {
        return Err(Error::Geometry(format!(
            "center ({}, {}) is not strictly NW of ({}, {})",
            center.x, center.y, p.x, p.y
        )));
    }
    if !(h > 0.0) {
        return Err(Error::Geometry(format!("step length must be positive, got {h}")));
    }
    let norm = vx.hypot(vy);
    let (tx, ty) = (-vy / norm * h, vx / norm * h);
    Ok((PlanePoint::new(p.x - tx, p.y - ty), PlanePoint::new(p.x + tx, p.y + ty)))
}

pub fn radius_after(r0: f64, steps: &[f64]) -> f64 {
    (r0 * r0 + steps.iter().map(|h| h * h).sum::<f64>()).sqrt()
}

/// Iteration cap for schedules without a closed form.
pub const STEP_CAP: u64 = 1 << 32;

/// Least `k` with `r0² + Σ_{i=1..k} ε_i² ≥ target²`.
pub fn steps_to_radius(r0: f64, sched: &EpsSchedule, target: f64) -> Result<u64> {
    if target <= r0 {
        return Ok(0);
    }
    let need = target * target - r0 * r0;
    if let EpsSchedule::Constant(e) = sched {
        let mut k = (need / (e * e)).ceil() as u64;
        // guard the closed form against rounding in either direction
        while k > 0 && (k - 1) as f64 * e * e >= need {
            k -= 1;
        }
        while (k as f64) * e * e < need {
            k += 1;
        }
        return Ok(k);
    }
    let mut acc = 0.0;
    for k in 1..=STEP_CAP {
        let e = sched.term(k);
        acc += e * e;
        if acc >= need {
            return Ok(k);
        }
    }
    Err(Error::Divergence(STEP_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn plane_correspondence() {
        let p = to_plane(&Interval::new(q(-1, 3), q(3, 4)).unwrap());
        assert_eq!(p, PlanePoint::new(-1.0 / 3.0, 0.75));
        assert_eq!(to_plane(&Interval::unit()).length(), 1.0);
    }

    #[test]
    fn quadrant_and_middle_third() {
        let m = middle_third_point(0.0, 1.0).unwrap();
        assert_eq!(m, PlanePoint::new(1.0 / 3.0, 2.0 / 3.0));
        assert_eq!(middle_third_point(0.0, 0.75).unwrap(), PlanePoint::new(0.25, 0.5));
        assert!(middle_third_point(0.5, 0.5).is_err());
        assert!(nw_contains(&PlanePoint::new(0.0, 1.0), &m));
        assert!(nw_contains(&m, &m));
        assert!(!nw_contains(&PlanePoint::new(0.4, 1.0), &m));
    }

    #[test]
    fn tangent_step_example() {
        let c = PlanePoint::new(-10.0, 10.0);
        let p = PlanePoint::new(0.0, 0.0);
        let (c0, c1) = tangent_step(&c, &p, 0.1).unwrap();
        let s = 0.1 / 2f64.sqrt();
        assert!((c1.x - s).abs() < 1e-15 && (c1.y - s).abs() < 1e-15);
        assert!((c0.x + s).abs() < 1e-15 && (c0.y + s).abs() < 1e-15);
        assert!((c.dist2(&c1) - 200.01).abs() < 1e-12);
        assert!((c.dist2(&c0) - 200.01).abs() < 1e-12);
        assert!(tangent_step(&PlanePoint::new(1.0, 10.0), &p, 0.1).is_err());
    }

    #[test]
    fn radius_and_steps() {
        assert!((radius_after(1.0, &[1.0; 99]) - 10.0).abs() < 1e-12);
        assert!((radius_after(5.0, &[0.1]) - 25.01f64.sqrt()).abs() < 1e-12);
        assert_eq!(steps_to_radius(1.0, &EpsSchedule::Constant(1.0), 10.0).unwrap(), 99);
        let harm = EpsSchedule::Power { k: 1.0, p: 0.5 };
        assert_eq!(steps_to_radius(1.0, &harm, 2.0).unwrap(), 11);
        assert_eq!(steps_to_radius(1.0, &EpsSchedule::Constant(0.3), 2.0).unwrap(), 34);
    }

    #[test]
    fn schedule_validation() {
        assert!(EpsSchedule::Power { k: 1.0, p: 0.6 }.validate().is_err());
        assert!(EpsSchedule::Constant(0.0).validate().is_err());
        assert!(EpsSchedule::Explicit(vec![]).validate().is_err());
        assert!(EpsSchedule::Explicit(vec![0.1, 0.05]).validate().is_ok());
        assert_eq!(EpsSchedule::Explicit(vec![0.1, 0.05]).term(9), 0.05);
    }

    #[test]
    fn center_satisfies_predicate() {
        let p = PlanePoint::new(0.0, 1.0);
        let m = PlanePoint::new(1.0 / 3.0, 2.0 / 3.0);
        let o = select_center(&p, &m, 1.25, 0.05).unwrap();
        assert!(o.x < p.x && o.y > p.y);
        assert!(arc_length_sup(&o, &p, &m, 0.05).unwrap() < 1.25);
        assert!(select_center(&p, &m, 1.0, 0.05).is_err());
    }
}
