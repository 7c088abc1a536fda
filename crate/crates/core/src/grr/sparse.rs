//! Front growth driven by the number of newly infected agents.
//!
//! The n newly infected agents are placed uniformly (angular spacing
//! θ = 2π/n) on the circle of radius r, the radial center of mass of the
//! last front increment. Agent i contributes the lens A_i of its
//! neighborhood disk lying outside the current front disk of radius ζ_t.
//! Adjacent lenses overlap, so the swept area is
//!
//! ```text
//! μ(∪ A_i) = n (μ(A) − μ(A₁ ∩ A₂))
//! ```
//!
//! and the new radius satisfies π ζ_{t+1}² = π ζ_t² + μ(∪ A_i).

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::{local_infected, recovered_next, FrontState, GrrState};
use crate::params::SimParams;
use crate::state::Trajectory;

/// Radial center of mass of the annulus between ζ_{t−1} and ζ_t.
pub fn radial_center(zeta_t: f64, zeta_prev: f64) -> f64 {
    (0.5 * (zeta_t * zeta_t + zeta_prev * zeta_prev)).sqrt()
}

/// Intermediate quantities of the single-lens area. The agent sits at
/// (0, r); the front circle x² + y² = ζ² and the agent circle
/// x² + (y − r)² = ρ₀² meet at (±α, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LensGeometry {
    pub r_com: f64,
    pub y_int: f64,
    pub alpha: f64,
    /// Angle subtended by the chord at the agent.
    pub phi: f64,
    /// Angle subtended by the chord at the front center.
    pub psi: f64,
    /// Segment of the agent disk beyond the chord.
    pub agent_segment: f64,
    /// Segment of the front disk beyond the chord.
    pub front_segment: f64,
}

impl LensGeometry {
    pub fn area(&self) -> f64 {
        (self.agent_segment - self.front_segment).max(0.0)
    }
}

/// Geometry of a properly intersecting agent/front pair, `None` when the
/// circles do not cross.
pub fn lens_geometry(zeta_t: f64, r_com: f64, rho0: f64) -> Option<LensGeometry> {
    if !(zeta_t > 0.0 && r_com > 0.0 && rho0 > 0.0) {
        return None;
    }
    if r_com + rho0 <= zeta_t || (r_com - rho0).abs() >= zeta_t {
        return None;
    }
    let y = (zeta_t * zeta_t - rho0 * rho0 + r_com * r_com) / (2.0 * r_com);
    let alpha = (zeta_t * zeta_t - y * y).max(0.0).sqrt();
    // Signed distance from the agent to the chord; negative when the agent
    // lies beyond it and the outer piece is the major segment.
    let d = y - r_com;
    let half_phi = (d / rho0).clamp(-1.0, 1.0).acos();
    let agent_segment = rho0 * rho0 * half_phi - d * alpha;
    let psi = 2.0 * alpha.atan2(y);
    let front_segment = 0.5 * psi * zeta_t * zeta_t - alpha * y;
    Some(LensGeometry {
        r_com,
        y_int: y,
        alpha,
        phi: 2.0 * half_phi,
        psi,
        agent_segment,
        front_segment,
    })
}

/// μ(A): area of the agent's neighborhood disk lying outside the front disk.
///
/// Zero when the disk is inside the front (including tangency); the whole
/// disk when it lies outside; disk minus front when the front is inside it.
pub fn sparse_mu_a(zeta_t: f64, r_com: f64, rho0: f64) -> f64 {
    let disk = PI * rho0 * rho0;
    if rho0 <= 0.0 || r_com + rho0 <= zeta_t {
        return 0.0;
    }
    if zeta_t <= 0.0 || r_com >= zeta_t + rho0 {
        return disk;
    }
    if rho0 >= r_com + zeta_t {
        return disk - PI * zeta_t * zeta_t;
    }
    lens_geometry(zeta_t, r_com, rho0).map_or(0.0, |g| g.area())
}

/// Intermediate quantities of the adjacent-lens overlap. Agents sit at
/// (∓h, k) with h = β/2, β = 2 r sin(θ/2) the chord between them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapGeometry {
    pub theta: f64,
    pub beta: f64,
    pub h: f64,
    pub k_off: f64,
    pub eta: f64,
    /// Larger root of the front/agent intersection quadratic.
    pub x_hat: Option<f64>,
}

pub fn overlap_geometry(zeta_t: f64, r_com: f64, rho0: f64, n: f64) -> OverlapGeometry {
    let theta = TAU / n;
    let beta = 2.0 * r_com * (0.5 * theta).sin();
    let h = 0.5 * beta;
    let k = (r_com * r_com - h * h).max(0.0).sqrt();
    let eta = h * h - k * k + zeta_t * zeta_t - rho0 * rho0;
    let qa = 4.0 * (h * h + k * k);
    let qb = 4.0 * h * (2.0 * k * k + eta);
    let qc = eta * eta - 4.0 * k * k * (rho0 * rho0 - h * h);
    let disc = qb * qb - 4.0 * qa * qc;
    let x_hat = (qa > 0.0 && disc >= 0.0).then(|| (-qb + disc.sqrt()) / (2.0 * qa));
    OverlapGeometry {
        theta,
        beta,
        h,
        k_off: k,
        eta,
        x_hat,
    }
}

/// μ(A₁ ∩ A₂): overlap of two adjacent outer lenses for agents spaced by
/// θ = 2π/n on the circle of radius `r_com`.
///
/// Closed form of 2∫₀^x̂ (k + √(ρ₀² − (x+h)²) − √(ζ² − x²)) dx; zero when
/// x̂ ≤ 0, the quadratic has no real root, or the disks' common part does
/// not reach outside the front.
pub fn sparse_mu_overlap(zeta_t: f64, r_com: f64, rho0: f64, n: f64) -> f64 {
    if n < 2.0 || rho0 <= 0.0 || zeta_t <= 0.0 || r_com <= 0.0 {
        return 0.0;
    }
    let g = overlap_geometry(zeta_t, r_com, rho0, n);
    let (h, k) = (g.h, g.k_off);
    if h >= rho0 {
        return 0.0;
    }
    // Top of the two-disk intersection, on the symmetry axis.
    if k + (rho0 * rho0 - h * h).sqrt() <= zeta_t {
        return 0.0;
    }
    let x = match g.x_hat {
        Some(x) if x > 0.0 => x.min(rho0 - h).min(zeta_t),
        _ => return 0.0,
    };
    let u = h + x;
    let agent_part = |u: f64| u * (rho0 * rho0 - u * u).max(0.0).sqrt() + rho0 * rho0 * (u / rho0).clamp(-1.0, 1.0).asin();
    let front_part = x * (zeta_t * zeta_t - x * x).max(0.0).sqrt()
        + zeta_t * zeta_t * (x / zeta_t).clamp(-1.0, 1.0).asin();
    let area = agent_part(u) - agent_part(h) - front_part + 2.0 * k * x;
    area.max(0.0)
}

/// Area swept by `n` new neighborhoods around the front, bounded by the
/// annulus the lenses can reach, π((r + ρ₀)² − ζ²).
pub fn union_area(zeta_t: f64, r_com: f64, rho0: f64, n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    let n = n.max(1.0);
    let single = sparse_mu_a(zeta_t, r_com, rho0);
    let pair = sparse_mu_overlap(zeta_t, r_com, rho0, n);
    let reach = r_com + rho0;
    let cap = (PI * (reach * reach - zeta_t * zeta_t)).max(0.0);
    (n * (single - pair)).clamp(0.0, cap)
}

/// Grows the front by the union of `n_new` neighborhoods. No growth when
/// `n_new` is zero or negative; fractional counts below one count as one.
pub fn sparse_front_update(f: &FrontState, n_new: f64, p: &SimParams) -> FrontState {
    if !(n_new > 0.0) {
        return f.advanced(f.zeta_t);
    }
    let r = radial_center(f.zeta_t, f.zeta_prev);
    let added = union_area(f.zeta_t, r, p.rho0, n_new);
    let next = (f.zeta_t * f.zeta_t + added / PI).sqrt();
    f.advanced(next)
}

/// Output of a sparse-front run.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRun {
    pub trajectory: Trajectory,
    pub fronts: Vec<FrontState>,
}

/// Locally homogeneous recurrence whose front grows with
/// n = Ĩ_t − Ĩ_{t−1} (clamped at 0; Ĩ_{−1} = 0).
pub fn sparse_local_run(p: &SimParams, m: usize) -> SparseRun {
    let n_agents = p.n_agents as f64;
    let mut s = GrrState::new(1.0, 0.0);
    let mut prev_i = 0.0;
    let mut f = FrontState::initial(p);
    let mut run = SparseRun {
        trajectory: Trajectory::with_capacity(m + 1),
        fronts: Vec::with_capacity(m + 1),
    };
    run.trajectory.push(s.counts(0, n_agents));
    run.fronts.push(f);
    for t in 1..=m {
        let (i, _) = local_infected(&s, p, f.area());
        let next = GrrState::new(i, recovered_next(&s, p));
        f = sparse_front_update(&f, (s.i - prev_i).max(0.0), p);
        prev_i = s.i;
        s = next;
        run.trajectory.push(s.counts(t, n_agents));
        run.fronts.push(f);
    }
    run
}

pub fn sparse_local_trajectory(p: &SimParams, m: usize) -> Trajectory {
    sparse_local_run(p, m).trajectory
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Standard area of intersection of two disks at distance d.
    fn disk_intersection(r1: f64, r2: f64, d: f64) -> f64 {
        if d >= r1 + r2 {
            return 0.0;
        }
        if d <= (r1 - r2).abs() {
            return PI * r1.min(r2).powi(2);
        }
        let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).acos();
        let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).acos();
        r1 * r1 * (a1 - a1.sin() * a1.cos()) + r2 * r2 * (a2 - a2.sin() * a2.cos())
    }

    #[test]
    fn tangent_disk_has_no_lens() {
        assert_eq!(sparse_mu_a(0.1, 0.06, 0.04), 0.0);
        assert_eq!(sparse_mu_a(0.1, 0.05, 0.04), 0.0);
    }

    #[test]
    fn lens_matches_disk_intersection() {
        for &(z, r, rho) in &[
            (0.08, 0.06, 0.04),
            (0.08, 0.079, 0.04),
            (0.2, 0.19, 0.02),
            (0.05, 0.04, 0.045),
            (0.3, 0.25, 0.16),
        ] {
            let expected = PI * rho * rho - disk_intersection(rho, z, r);
            let got = sparse_mu_a(z, r, rho);
            assert!((got - expected).abs() < 1e-15, "{z} {r} {rho}: {got} vs {expected}");
        }
    }

    #[test]
    fn lens_degenerate_cases() {
        let rho: f64 = 0.04;
        assert!((sparse_mu_a(0.02, 0.1, rho) - PI * rho * rho).abs() < 1e-18);
        assert!((sparse_mu_a(0.01, 0.02, rho) - PI * (rho * rho - 1e-4)).abs() < 1e-18);
    }

    #[test]
    fn chord_points_lie_on_both_circles() {
        let g = lens_geometry(0.08, 0.06, 0.04).unwrap();
        let (x, y) = (g.alpha, g.y_int);
        assert!((x * x + y * y - 0.0064).abs() < 1e-15);
        assert!((x * x + (y - 0.06).powi(2) - 0.0016).abs() < 1e-15);
        assert!((g.y_int - 0.07).abs() < 1e-15);
    }

    #[test]
    fn overlap_root_lies_on_both_circles() {
        let (z, r, rho, n) = (0.08, 0.06, 0.04, 6.0);
        let g = overlap_geometry(z, r, rho, n);
        let x = g.x_hat.unwrap();
        // Intersection ordinate from the radical line.
        let y = (2.0 * g.h * x + g.h * g.h + g.k_off * g.k_off + z * z - rho * rho) / (2.0 * g.k_off);
        assert!((x * x + y * y - z * z).abs() < 1e-14);
        assert!(((x + g.h).powi(2) + (y - g.k_off).powi(2) - rho * rho).abs() < 1e-14);
        assert!((g.beta - 2.0 * r * (PI / n).sin()).abs() < 1e-15);
    }

    #[test]
    fn far_apart_pair_has_no_overlap() {
        assert_eq!(sparse_mu_overlap(0.08, 0.06, 0.001, 2.0), 0.0);
        assert_eq!(sparse_mu_overlap(0.08, 0.06, 0.04, 1.0), 0.0);
    }

    #[test]
    fn overlap_below_single_lens() {
        for &n in &[2.0, 3.0, 6.0, 8.0, 20.0, 200.0] {
            for &(z, r, rho) in &[(0.08, 0.06, 0.04), (0.2, 0.18, 0.04), (0.1, 0.09, 0.08)] {
                let o = sparse_mu_overlap(z, r, rho, n);
                assert!(o >= 0.0 && o <= sparse_mu_a(z, r, rho) + 1e-15, "{n} {z} {r} {rho}");
            }
        }
    }

    #[test]
    fn empty_union_keeps_radius() {
        let p = SimParams::default();
        let f = FrontState {
            zeta_t: 0.08,
            zeta_prev: 0.04,
            saturated: false,
        };
        let g = sparse_front_update(&f, 0.0, &p);
        assert_eq!(g.zeta_t, 0.08);
        assert_eq!(g.zeta_prev, 0.08);
        // Neighborhoods centered at r = 0.3/√2 lie inside the front: μ(∪) = 0.
        let f = FrontState {
            zeta_t: 0.3,
            zeta_prev: 0.0,
            saturated: false,
        };
        assert_eq!(sparse_front_update(&f, 5.0, &p).zeta_t, 0.3);
    }

    #[test]
    fn front_update_formula() {
        let p = SimParams::default();
        let f = FrontState {
            zeta_t: 0.08,
            zeta_prev: 0.04,
            saturated: false,
        };
        let r = radial_center(0.08, 0.04);
        let union = 8.0 * (sparse_mu_a(0.08, r, 0.04) - sparse_mu_overlap(0.08, r, 0.04, 8.0));
        let g = sparse_front_update(&f, 8.0, &p);
        assert!((g.zeta_t - ((PI * 0.0064 + union) / PI).sqrt()).abs() < 1e-15);
        assert!(g.zeta_t > 0.08);
    }

    #[test]
    fn kappa_one_matches_local() {
        let p = SimParams {
            kappa: 1.0,
            n_iters: 200,
            ..Default::default()
        };
        assert_eq!(
            sparse_local_trajectory(&p, 200),
            super::super::local_trajectory(&p, 1.0, 0.0)
        );
    }

    #[test]
    fn sparse_fronts_nondecreasing() {
        let p = SimParams {
            kappa: 0.8,
            rho0: 0.02,
            n_iters: 400,
            ..Default::default()
        };
        let run = sparse_local_run(&p, 400);
        for w in run.fronts.windows(2) {
            assert!(w[1].zeta_t >= w[0].zeta_t);
            assert!(w[1].zeta_t >= w[1].zeta_prev);
        }
    }
}
