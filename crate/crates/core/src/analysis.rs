//! Fixed points and local stability of the globally homogeneous recurrence.
//!
//! Fixed points satisfy R = q I together with the scalar equation
//!
//! ```text
//! g(I) = (N − (1+q) I) (1 − (1 − μ)^I) (1 − κ) − I / T_I = 0
//! ```
//!
//! with μ = π ρ₀² the neighborhood area. I = 0 always solves it; a
//! nontrivial root is bracketed on a uniform grid and refined by bisection.

use serde::Serialize;

use crate::grr::{global_step, survival, GrrState};
use crate::params::{SimParams, DOMAIN_AREA};

/// Samples used to bracket sign changes of g.
pub const BRACKET_SAMPLES: usize = 512;
/// Bisection stops once |g| falls below this multiple of N.
pub const ROOT_TOL_REL: f64 = 1e-10;
/// Eigenvalue moduli this close to 1 are reported as nonhyperbolic.
pub const NONHYPERBOLIC_TOL: f64 = 1e-9;

/// ∂(H, G)/∂(I, R) of the map (I, R) ↦ (H, G).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jacobian2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Jacobian2 {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }
}

/// Closed-form Jacobian of the global recurrence at `s`.
pub fn jacobian_at(s: &GrrState, p: &SimParams) -> Jacobian2 {
    let n = p.n_agents as f64;
    let ti = f64::from(p.t_infect);
    let a = p.neighborhood_area() / DOMAIN_AREA;
    let u = survival(a, s.i);
    let ln = (-a).ln_1p();
    let infect = 1.0 - p.kappa;
    let susceptible = n - s.i - s.r;
    Jacobian2 {
        a11: -infect * (susceptible * u * ln + (1.0 - u)) + 1.0 - 1.0 / ti,
        a12: -infect * (1.0 - u),
        a21: 1.0 / ti,
        a22: 1.0 - 1.0 / (p.q() * ti),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Eigenvalues {
    /// Ascending.
    Real { values: [f64; 2] },
    /// re ± i·im, im > 0.
    Complex { re: f64, im: f64 },
}

impl Eigenvalues {
    pub fn moduli(&self) -> [f64; 2] {
        match *self {
            Eigenvalues::Real { values } => values.map(f64::abs),
            Eigenvalues::Complex { re, im } => {
                let m = re.hypot(im);
                [m, m]
            }
        }
    }

    pub fn real(&self) -> Option<[f64; 2]> {
        match *self {
            Eigenvalues::Real { values } => Some(values),
            Eigenvalues::Complex { .. } => None,
        }
    }
}

/// Eigenvalues of a 2×2 matrix. Triangular matrices return their diagonal.
pub fn eigen2(j: &Jacobian2) -> Eigenvalues {
    let sorted = |a: f64, b: f64| Eigenvalues::Real {
        values: if a <= b { [a, b] } else { [b, a] },
    };
    if j.a12 == 0.0 || j.a21 == 0.0 {
        return sorted(j.a11, j.a22);
    }
    let half_tr = 0.5 * j.trace();
    let half_diff = 0.5 * (j.a11 - j.a22);
    // (tr/2)² − det written without cancellation.
    let disc = half_diff * half_diff + j.a12 * j.a21;
    if disc >= 0.0 {
        let root = disc.sqrt();
        let big = if half_tr >= 0.0 { half_tr + root } else { half_tr - root };
        let small = if big != 0.0 { j.det() / big } else { half_tr - root };
        sorted(big, small)
    } else {
        Eigenvalues::Complex {
            re: half_tr,
            im: (-disc).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    Nonhyperbolic,
}

pub fn classify(ev: &Eigenvalues) -> Stability {
    let m = ev.moduli();
    if m.iter().any(|x| (x - 1.0).abs() < NONHYPERBOLIC_TOL) {
        Stability::Nonhyperbolic
    } else if m.iter().all(|&x| x < 1.0) {
        Stability::Stable
    } else if m.iter().all(|&x| x > 1.0) {
        Stability::Unstable
    } else {
        Stability::Saddle
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub location: GrrState,
    pub jacobian: Jacobian2,
    pub eigenvalues: Eigenvalues,
    pub classification: Stability,
    /// max(|H(x) − I|, |G(x) − R|).
    pub residual: f64,
}

impl FixedPointReport {
    pub fn at(location: GrrState, p: &SimParams) -> Self {
        let jacobian = jacobian_at(&location, p);
        let eigenvalues = eigen2(&jacobian);
        let next = global_step(&location, p);
        Self {
            location,
            jacobian,
            eigenvalues,
            classification: classify(&eigenvalues),
            residual: (next.i - location.i).abs().max((next.r - location.r).abs()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.location.i == 0.0 && self.location.r == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoints {
    pub points: Vec<FixedPointReport>,
    pub notes: Vec<String>,
}

impl FixedPoints {
    pub fn trivial(&self) -> &FixedPointReport {
        &self.points[0]
    }

    /// The nontrivial point with the largest I*, if any.
    pub fn nontrivial(&self) -> Option<&FixedPointReport> {
        self.points.iter().skip(1).last()
    }
}

/// g(I) along the line R = q I.
pub fn fixed_point_residual(i: f64, p: &SimParams) -> f64 {
    let n = p.n_agents as f64;
    let q = p.q();
    let a = p.neighborhood_area() / DOMAIN_AREA;
    (n - (1.0 + q) * i) * (1.0 - survival(a, i)) * (1.0 - p.kappa) - i / f64::from(p.t_infect)
}

/// Sign of g just above 0, from g'(0) = −N (1−κ) ln(1−μ) − 1/T_I.
fn slope_at_origin(p: &SimParams) -> f64 {
    let a = p.neighborhood_area() / DOMAIN_AREA;
    let n = p.n_agents as f64;
    if a >= 1.0 {
        return f64::INFINITY;
    }
    -n * (1.0 - p.kappa) * (-a).ln_1p() - 1.0 / f64::from(p.t_infect)
}

fn bisect(p: &SimParams, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = fixed_point_residual(lo, p);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        let g_mid = fixed_point_residual(mid, p);
        if g_mid.abs() < tol || mid == lo || mid == hi {
            break;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    mid
}

/// The trivial fixed point followed by every nontrivial root of g on
/// (0, N/(1+q)], each with its Jacobian and stability class.
pub fn find_fixed_points(p: &SimParams) -> FixedPoints {
    let n = p.n_agents as f64;
    let upper = n / (1.0 + p.q());
    let tol = ROOT_TOL_REL * n;
    let mut points = vec![FixedPointReport::at(GrrState::new(0.0, 0.0), p)];
    let mut notes = Vec::new();

    let mut prev_x = 0.0;
    let mut prev_g = slope_at_origin(p);
    for j in 1..=BRACKET_SAMPLES {
        let x = upper * j as f64 / BRACKET_SAMPLES as f64;
        let g = fixed_point_residual(x, p);
        let root = if g == 0.0 {
            Some(x)
        } else if prev_g != 0.0 && (g > 0.0) != (prev_g > 0.0) {
            Some(bisect(p, prev_x, x, tol))
        } else {
            None
        };
        if let Some(i) = root.filter(|&i| i > 0.0) {
            points.push(FixedPointReport::at(GrrState::new(i, p.q() * i), p));
        }
        prev_x = x;
        prev_g = g;
    }
    if points.len() == 1 {
        notes.push("no nontrivial fixed point detected".to_string());
    }
    FixedPoints { points, notes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> SimParams {
        SimParams::default()
    }

    fn fig3c_left() -> SimParams {
        SimParams {
            rho0: 0.02,
            kappa: 0.8,
            t_infect: 30,
            t_recover: 45,
            ..fig1()
        }
    }

    /// Central differences of the map, step `h` in both coordinates.
    fn numeric_jacobian(s: &GrrState, p: &SimParams, h: f64) -> Jacobian2 {
        let f = |i: f64, r: f64| global_step(&GrrState::new(i, r), p);
        let (ip, im) = (f(s.i + h, s.r), f(s.i - h, s.r));
        let (rp, rm) = (f(s.i, s.r + h), f(s.i, s.r - h));
        Jacobian2::new(
            (ip.i - im.i) / (2.0 * h),
            (rp.i - rm.i) / (2.0 * h),
            (ip.r - im.r) / (2.0 * h),
            (rp.r - rm.r) / (2.0 * h),
        )
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-12)
    }

    #[test]
    fn origin_entries() {
        let p = fig1();
        let j = jacobian_at(&GrrState::new(0.0, 0.0), &p);
        let mu = p.neighborhood_area();
        let expected = -10_000.0 * 0.05 * (1.0 - mu).ln() + 1.0 - 1.0 / 30.0;
        assert!(rel_err(j.a11, expected) < 1e-14);
        assert_eq!(j.a12, 0.0);
        assert_eq!(j.a21, 1.0 / 30.0);
        assert_eq!(j.a22, 1.0 - 1.0 / 30.0);
    }

    #[test]
    fn origin_eigenvalues() {
        let p = fig1();
        let ev = eigen2(&jacobian_at(&GrrState::new(0.0, 0.0), &p));
        let [l1, l2] = ev.real().unwrap();
        assert_eq!(l1, 29.0 / 30.0);
        // −N(1−κ) ln(1 − π ρ₀²) + 1 − 1/T_I at 40 digits.
        assert!((l2 - 3.486_278_583_426_508).abs() < 1e-12, "{l2}");
        assert_eq!(classify(&ev), Stability::Saddle);
    }

    #[test]
    fn kappa_one_jacobian_is_linear_part() {
        let p = SimParams {
            kappa: 1.0,
            ..fig1()
        };
        for &(i, r) in &[(0.0, 0.0), (100.0, 50.0), (3000.0, 2000.0)] {
            let s = GrrState::new(i, r);
            let j = jacobian_at(&s, &p);
            assert_eq!(j, Jacobian2::new(1.0 - 1.0 / 30.0, 0.0, 1.0 / 30.0, 1.0 - 1.0 / 30.0));
            let num = numeric_jacobian(&s, &p, 1e-2);
            for (a, b) in j.entries().iter().zip(num.entries()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn eigen_simple_matrices() {
        assert_eq!(
            eigen2(&Jacobian2::new(1.0, 0.0, 0.0, 1.0)),
            Eigenvalues::Real { values: [1.0, 1.0] }
        );
        assert_eq!(
            eigen2(&Jacobian2::new(0.5, 0.0, 0.0, 2.0)),
            Eigenvalues::Real { values: [0.5, 2.0] }
        );
        let rot = eigen2(&Jacobian2::new(0.0, -1.0, 1.0, 0.0));
        assert_eq!(rot, Eigenvalues::Complex { re: 0.0, im: 1.0 });
        assert_eq!(classify(&rot), Stability::Nonhyperbolic);
        let [a, b] = eigen2(&Jacobian2::new(2.0, 1.0, 1.0, 2.0)).real().unwrap();
        assert!((a - 1.0).abs() < 1e-15 && (b - 3.0).abs() < 1e-15);
    }

    #[test]
    fn classification_rules() {
        let c = |a, b| classify(&Eigenvalues::Real { values: [a, b] });
        assert_eq!(c(0.2, 0.9), Stability::Stable);
        assert_eq!(c(-0.5, 0.9), Stability::Stable);
        assert_eq!(c(1.2, 3.0), Stability::Unstable);
        assert_eq!(c(-1.5, 0.3), Stability::Saddle);
        assert_eq!(c(0.3, 1.0 + 1e-12), Stability::Nonhyperbolic);
        assert_eq!(
            classify(&Eigenvalues::Complex { re: 0.5, im: 0.5 }),
            Stability::Stable
        );
    }

    #[test]
    fn kappa_one_only_trivial() {
        let p = SimParams {
            kappa: 1.0,
            ..fig1()
        };
        let fp = find_fixed_points(&p);
        assert_eq!(fp.points.len(), 1);
        assert_eq!(fp.trivial().classification, Stability::Stable);
        assert_eq!(fp.notes, vec!["no nontrivial fixed point detected"]);
    }

    #[test]
    fn fig1_origin_saddle() {
        let fp = find_fixed_points(&fig1());
        assert_eq!(fp.trivial().classification, Stability::Saddle);
        assert_eq!(fp.points.len(), 2);
    }

    #[test]
    fn nontrivial_point_properties() {
        let p = fig3c_left();
        let fp = find_fixed_points(&p);
        let nt = fp.nontrivial().unwrap();
        let n = p.n_agents as f64;
        assert!(fixed_point_residual(nt.location.i, &p).abs() < ROOT_TOL_REL * n);
        assert!((nt.location.r - 1.5 * nt.location.i).abs() <= 1e-10 * n);
        assert!(nt.residual < 1e-6 * n);
        assert_eq!(nt.classification, Stability::Stable);
    }

    #[test]
    fn iteration_lands_on_solver_point() {
        for &(rho0, kappa, tr) in &[(0.02, 0.8, 45), (0.04, 0.6, 30), (0.16, 0.8, 45)] {
            let p = SimParams {
                rho0,
                kappa,
                t_recover: tr,
                ..fig1()
            };
            let target = find_fixed_points(&p).nontrivial().unwrap().location;
            let mut s = GrrState::new(1.0, 0.0);
            for _ in 0..10_000 {
                s = global_step(&s, &p);
            }
            let n = p.n_agents as f64;
            assert!((s.i - target.i).abs() <= 1e-6 * n, "{rho0} {kappa}");
            assert!((s.r - target.r).abs() <= 1e-6 * n);
        }
    }

    #[test]
    fn root_near_origin_is_found() {
        // g'(0) barely positive: the root sits below the first grid sample.
        let mut p = SimParams {
            n_agents: 1000,
            rho0: 0.02,
            kappa: 0.9,
            ..fig1()
        };
        let mu = p.neighborhood_area();
        p.kappa = 1.0 - 1.05 / (30.0 * 1000.0 * -(1.0 - mu).ln());
        assert!(slope_at_origin(&p) > 0.0);
        let fp = find_fixed_points(&p);
        let nt = fp.nontrivial().expect("root below first sample");
        assert!(nt.location.i > 0.0 && nt.location.i < 1000.0 / 2.0 / 512.0 * 20.0);
    }

    proptest! {
        #[test]
        fn analytic_matches_finite_differences(
            rho0 in 0.01f64..0.2,
            kappa in 0.0f64..1.0,
            ti in 5u32..60,
            tr in 5u32..90,
            fi in 0.0f64..1.0,
            fr in 0.0f64..1.0,
        ) {
            let p = SimParams { rho0, kappa, t_infect: ti, t_recover: tr, ..SimParams::default() };
            let n = p.n_agents as f64;
            let i = fi * n;
            let s = GrrState::new(i, fr * (n - i));
            let h = 1e-6 * n;
            let a = jacobian_at(&s, &p);
            let num = numeric_jacobian(&s, &p, h);
            for (x, y) in a.entries().iter().zip(num.entries()) {
                // Entries of order 1e-12 or below are compared absolutely.
                let scale = x.abs().max(1e-6);
                prop_assert!((x - y).abs() / scale < 1e-5, "{:?} vs {:?}", a, num);
            }
        }
    }
}
