//! Minimisation of real functions of a unit vector `ξ ∈ ℂ²` modulo phase.
//!
//! Unit vectors up to phase are points of the Bloch sphere,
//! `ξ(θ, ϕ) = (cos θ/2, e^{iϕ} sin θ/2)`. A Fibonacci lattice gives a
//! near-uniform covering; the best few mutually separated lattice points are
//! then polished by alternating golden-section searches on `θ` and `ϕ`.

use std::f64::consts::PI;

use crate::linalg::C64;

/// Golden-section iterations per line search.
pub const GOLDEN_STEPS: usize = 50;
/// Alternating `θ`/`ϕ` rounds per refined candidate.
const REFINE_ROUNDS: usize = 6;
/// Number of lattice points that get refined.
const REFINED_CANDIDATES: usize = 8;
/// Minimum angle between refined candidates, in lattice spacings. Without it
/// all candidates can crowd around one shallow minimum (a pole where the
/// value is exactly zero, say) and miss a narrow dip nearby.
const CANDIDATE_SEPARATION: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
}

impl BlochPoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn xi(&self) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }

    /// Bloch angles of a unit vector (its global phase is discarded).
    pub fn from_xi(xi: &[C64; 2]) -> Self {
        let r0 = xi[0].norm();
        let r1 = xi[1].norm();
        let theta = 2.0 * r1.atan2(r0);
        let phi = if r0 > 0.0 && r1 > 0.0 {
            (xi[1] * xi[0].conj()).arg()
        } else {
            0.0
        };
        Self { theta, phi }
    }
}

/// `n` Fibonacci-lattice points followed by the two poles `e₁`, `e₂`.
pub fn fibonacci_grid(n: usize) -> Vec<BlochPoint> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let mut pts: Vec<BlochPoint> = (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let phi = (golden_angle * i as f64).rem_euclid(2.0 * PI);
            BlochPoint::new(z.clamp(-1.0, 1.0).acos(), phi)
        })
        .collect();
    pts.push(BlochPoint::new(0.0, 0.0));
    pts.push(BlochPoint::new(PI, 0.0));
    pts
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub point: BlochPoint,
    pub value: f64,
}

/// Approximate global minimum of `f` over the Bloch sphere.
///
/// Lattice ties are broken by the lowest lattice index, so the result is a
/// deterministic function of `f` and `grid`.
pub fn minimize(grid: usize, f: impl Fn(&[C64; 2]) -> f64) -> Minimum {
    let pts = fibonacci_grid(grid.max(1));
    let mut scored: Vec<(usize, f64)> = pts.iter().enumerate().map(|(i, p)| (i, f(&p.xi()))).collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let spacing = (4.0 * PI / grid.max(1) as f64).sqrt();
    let mut picked: Vec<[C64; 2]> = Vec::with_capacity(REFINED_CANDIDATES);
    let mut best: Option<Minimum> = None;
    for &(idx, value) in &scored {
        if picked.len() == REFINED_CANDIDATES {
            break;
        }
        let xi = pts[idx].xi();
        if picked.iter().any(|q| bloch_angle(q, &xi) < CANDIDATE_SEPARATION * spacing) {
            continue;
        }
        picked.push(xi);
        let m = refine(&f, Minimum { point: pts[idx], value }, 2.0 * spacing);
        if best.is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    best.expect("grid is never empty")
}

/// Angle between two unit vectors as points of the Bloch sphere.
fn bloch_angle(a: &[C64; 2], b: &[C64; 2]) -> f64 {
    let overlap = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm();
    2.0 * overlap.min(1.0).acos()
}

/// Alternating golden-section polish around `start`; never returns a worse point.
pub fn refine(f: &impl Fn(&[C64; 2]) -> f64, start: Minimum, half_width: f64) -> Minimum {
    let mut best = start;
    let mut h = half_width;
    for _ in 0..REFINE_ROUNDS {
        let p = best.point;
        let lo = (p.theta - h).max(0.0);
        let hi = (p.theta + h).min(PI);
        let (t, v) = golden(|t| f(&BlochPoint::new(t, p.phi).xi()), lo, hi);
        if v < best.value {
            best = Minimum {
                point: BlochPoint::new(t, p.phi),
                value: v,
            };
        }

        let p = best.point;
        // ϕ moves are scaled up near the poles where they matter less.
        let hp = (h / p.theta.sin().max(h)).min(PI);
        let (phi, v) = golden(|ph| f(&BlochPoint::new(p.theta, ph).xi()), p.phi - hp, p.phi + hp);
        if v < best.value {
            best = Minimum {
                point: BlochPoint::new(p.theta, phi.rem_euclid(2.0 * PI)),
                value: v,
            };
        }
        h *= 0.5;
    }
    best
}

/// Golden-section search for a minimum of `g` on `[lo, hi]`.
fn golden(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    let (mut bx, mut bf) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
            if f1 < bf {
                bx = x1;
                bf = f1;
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
            if f2 < bf {
                bx = x2;
                bf = f2;
            }
        }
    }
    (bx, bf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_sphere() {
        let g = fibonacci_grid(500);
        assert_eq!(g.len(), 502);
        for p in &g {
            let xi = p.xi();
            assert!((xi[0].norm_sqr() + xi[1].norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn angles_round_trip() {
        let p = BlochPoint::new(1.1, 2.3);
        let q = BlochPoint::from_xi(&p.xi());
        assert!((p.theta - q.theta).abs() < 1e-14 && (p.phi - q.phi).abs() < 1e-14);
    }

    #[test]
    fn finds_minimum_of_a_smooth_function() {
        // Minimum of −|⟨v, ξ⟩|² is −1, attained at ξ = v up to phase.
        let v = BlochPoint::new(2.0, 4.0).xi();
        let m = minimize(300, |xi| -(v[0].conj() * xi[0] + v[1].conj() * xi[1]).norm_sqr());
        assert!((m.value + 1.0).abs() < 1e-12, "{}", m.value);
    }

}
