//! The explicit 2-D trial state on the broken-line domain.
//!
//! The plane is split by the barrier (the positive x1-axis and the ray at
//! angle π+δ) and by the symmetry line at angle (π+δ)/2 into eight regions:
//! two T⁺ slab pieces carrying φ(x2)·exp(iξx1), their reflections T⁻, and
//! four narrow V sectors of angular width √δ/2 that interpolate the phase
//! between the two sides. The construction is continuous in the original
//! gauge and its Rayleigh quotient dips below the band infimum β by
//! approximately M₃²δ²/4 for small δ.
//!
//! Gauge bookkeeping: all energy densities are evaluated in the gauge where
//! the vector potential is (-σ(x)·x2, 0). In that gauge the function itself
//! jumps across the left barrier ray by exactly the jump of the gauge
//! generator ζ (ζ = ½(b1-b2)x1²·tanδ on the lower side for x1 < 0);
//! multiplying by exp(iζ) recovers the continuous, original-gauge function,
//! which is what [`TrialState::eval`] returns.

use crate::fiber1d::GroundState1D;
use crate::moments::moment;
use crate::util::interp::CubicHermite;
use crate::util::quad::{gl_on, gl_panels};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrialError {
    #[error("trial state needs a trapping ground state, got case {0:?}")]
    NotTrapping(crate::fiber1d::FieldCase),
    #[error("opening angle delta = {0} too large; construction needs delta < 0.25")]
    DeltaTooLarge(f64),
    #[error("eta plateau eps = {eps} too small; the V sectors reach x1 = {need:.3}")]
    EpsTooSmall { eps: f64, need: f64 },
    #[error("quadrature unresolved: energies at n and 2n nodes differ by {0:.2e} relative")]
    QuadratureUnresolved(f64),
    #[error("quadrature spec too coarse; need >= 8 radial and >= 8 angular nodes")]
    BadQuadSpec,
}

/// Wedge geometry: opening angle δ, sector half-width parameter γ = √δ and
/// transverse cutoff ℓ = 1/√δ, with the reflection across the symmetry line
/// x1 = -x2·tan(δ/2).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WedgeGeometry {
    pub delta: f64,
    pub gamma: f64,
    pub ell: f64,
}

impl WedgeGeometry {
    pub fn new(delta: f64) -> Self {
        assert!(
            delta > 0.0 && delta < std::f64::consts::FRAC_PI_2,
            "delta must lie in (0, pi/2)"
        );
        Self {
            delta,
            gamma: delta.sqrt(),
            ell: 1.0 / delta.sqrt(),
        }
    }

    /// The reflection matrix [[-cos δ, -sin δ], [-sin δ, cos δ]] (symmetric,
    /// involutive).
    pub fn s_matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.delta.sin_cos();
        [[-c, -s], [-s, c]]
    }

    /// Apply the reflection S_δ to a point.
    pub fn reflect(&self, x: [f64; 2]) -> [f64; 2] {
        let (s, c) = self.delta.sin_cos();
        [-c * x[0] - s * x[1], -s * x[0] + c * x[1]]
    }

    /// Sector boundary angles, ascending from the positive x1-axis.
    fn angles(&self) -> SectorAngles {
        let (d, g) = (self.delta, self.gamma);
        let pi = std::f64::consts::PI;
        SectorAngles {
            t2p_v2p: 0.5 * (pi + d - g),
            sym_up: 0.5 * (pi + d),
            v2m_t2m: 0.5 * (pi + d + g),
            barrier_left: pi + d,
            t1m_v1m: 0.5 * (3.0 * pi + d - g),
            sym_down: 0.5 * (3.0 * pi + d),
            v1p_t1p: 0.5 * (3.0 * pi + d + g),
        }
    }
}

struct SectorAngles {
    t2p_v2p: f64,
    sym_up: f64,
    v2m_t2m: f64,
    barrier_left: f64,
    t1m_v1m: f64,
    sym_down: f64,
    v1p_t1p: f64,
}

/// The eight regions of the partition (and the exterior).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionTag {
    T1Plus,
    T2Plus,
    T1Minus,
    T2Minus,
    V1Plus,
    V2Plus,
    V1Minus,
    V2Minus,
    Outside,
}

impl RegionTag {
    /// Field intensity index: lower half (b1) or upper half (b2).
    fn uses_b1(self) -> bool {
        matches!(
            self,
            RegionTag::T1Plus | RegionTag::T1Minus | RegionTag::V1Plus | RegionTag::V1Minus
        )
    }

    pub fn is_plus(self) -> bool {
        matches!(
            self,
            RegionTag::T1Plus | RegionTag::T2Plus | RegionTag::V1Plus | RegionTag::V2Plus
        )
    }
}

fn in_t1_plus(x: [f64; 2], g: &WedgeGeometry) -> bool {
    x[0] > 0.0
        && x[1] <= 0.0
        && x[1] > -g.ell
        && x[0] >= -x[1] * (0.5 * (g.gamma + g.delta)).tan()
}

fn in_t2_plus(x: [f64; 2], g: &WedgeGeometry) -> bool {
    x[0] > 0.0 && x[1] >= 0.0 && x[1] < g.ell && x[0] >= x[1] * (0.5 * (g.gamma - g.delta)).tan()
}

fn in_v_plus(x: [f64; 2], g: &WedgeGeometry, lower: bool) -> bool {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return false;
    }
    let theta = x[1].atan2(x[0]).rem_euclid(std::f64::consts::TAU);
    let a = g.angles();
    let (lo, hi) = if lower {
        (a.sym_down, a.v1p_t1p)
    } else {
        (a.t2p_v2p, a.sym_up)
    };
    theta >= lo && theta <= hi && r * theta.sin().abs() < g.ell
}

/// Deterministic region lookup. Boundary points resolve to the plus side
/// first and to T before V; this is a measure-zero convention and cannot
/// move any integral.
pub fn region_of(x: [f64; 2], geom: &WedgeGeometry) -> RegionTag {
    if in_t1_plus(x, geom) {
        return RegionTag::T1Plus;
    }
    if in_t2_plus(x, geom) {
        return RegionTag::T2Plus;
    }
    if in_v_plus(x, geom, true) {
        return RegionTag::V1Plus;
    }
    if in_v_plus(x, geom, false) {
        return RegionTag::V2Plus;
    }
    let y = geom.reflect(x);
    if in_t1_plus(y, geom) {
        return RegionTag::T1Minus;
    }
    if in_t2_plus(y, geom) {
        return RegionTag::T2Minus;
    }
    if in_v_plus(y, geom, true) {
        return RegionTag::V1Minus;
    }
    if in_v_plus(y, geom, false) {
        return RegionTag::V2Minus;
    }
    RegionTag::Outside
}

/// Phase data of the V-sector interpolation.
///
/// In each V double-sector the phase is α(r, θ) = d·r² - h(θ)(c·r - d·r²),
/// where h sweeps linearly from -1 on the T⁺ edge to +1 on the T⁻ edge.
/// The endpoint values are forced by continuity with the neighbouring T
/// branches; the slope is ±2/γ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseSpec {
    pub c1: f64,
    pub d1: f64,
    pub c2: f64,
    pub d2: f64,
    gamma: f64,
    delta: f64,
}

impl PhaseSpec {
    fn new(geom: &WedgeGeometry, b1: f64, b2: f64, xi: f64) -> Self {
        let (g, d) = (geom.gamma, geom.delta);
        PhaseSpec {
            c1: xi * (0.5 * (g + d)).sin(),
            c2: xi * (0.5 * (g - d)).sin(),
            d1: 0.25 * b1 * d.sin() * g.cos(),
            d2: 0.25 * b2 * d.sin() * g.cos(),
            gamma: g,
            delta: d,
        }
    }

    /// Lower-sector sweep: +1 at the T⁻ edge θ = (3π+δ-γ)/2, -1 at the T⁺
    /// edge θ = (3π+δ+γ)/2.
    pub fn h1(&self, theta: f64) -> f64 {
        (3.0 * std::f64::consts::PI + self.delta - 2.0 * theta) / self.gamma
    }

    /// Upper-sector sweep: -1 at the T⁺ edge θ = (π+δ-γ)/2, +1 at the T⁻
    /// edge θ = (π+δ+γ)/2.
    pub fn h2(&self, theta: f64) -> f64 {
        (2.0 * theta - std::f64::consts::PI - self.delta) / self.gamma
    }

    pub fn dh1(&self) -> f64 {
        -2.0 / self.gamma
    }

    pub fn dh2(&self) -> f64 {
        2.0 / self.gamma
    }

    fn alpha(&self, lower: bool, r: f64, theta: f64) -> f64 {
        let (c, d, h) = if lower {
            (self.c1, self.d1, self.h1(theta))
        } else {
            (self.c2, self.d2, self.h2(theta))
        };
        d * r * r - h * (c * r - d * r * r)
    }

    /// (∂α/∂r, ∂α/∂θ).
    fn alpha_grad(&self, lower: bool, r: f64, theta: f64) -> (f64, f64) {
        let (c, d, h, dh) = if lower {
            (self.c1, self.d1, self.h1(theta), self.dh1())
        } else {
            (self.c2, self.d2, self.h2(theta), self.dh2())
        };
        (
            2.0 * d * r - h * (c - 2.0 * d * r),
            -dh * (c * r - d * r * r),
        )
    }
}

/// Smooth cutoff profile: 1 on [-plateau, plateau], 0 outside [-1, 1], with
/// a C-infinity transition. Satisfies the required "1 on [-1/2, 1/2]" since
/// plateau >= 1/2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiBump {
    pub plateau: f64,
}

impl ChiBump {
    pub fn new(plateau: f64) -> Self {
        assert!((0.5..1.0).contains(&plateau));
        Self { plateau }
    }

    fn ramp(s: f64) -> f64 {
        // f(s) = exp(-1/s) extended by 0
        if s <= 0.0 {
            0.0
        } else {
            (-1.0 / s).exp()
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        let a = u.abs();
        if a <= self.plateau {
            1.0
        } else if a >= 1.0 {
            0.0
        } else {
            let s = (a - self.plateau) / (1.0 - self.plateau);
            let g = Self::ramp(1.0 - s);
            g / (g + Self::ramp(s))
        }
    }

    pub fn deriv(&self, u: f64) -> f64 {
        let a = u.abs();
        if a <= self.plateau || a >= 1.0 {
            return 0.0;
        }
        let s = (a - self.plateau) / (1.0 - self.plateau);
        let g = Self::ramp(1.0 - s);
        let h = Self::ramp(s);
        let dg = -g / ((1.0 - s) * (1.0 - s));
        let dh = h / (s * s);
        let v = (dg * h - g * dh) / ((g + h) * (g + h)) / (1.0 - self.plateau);
        if u >= 0.0 {
            v
        } else {
            -v
        }
    }
}

/// The assembled trial state: geometry, 1-D ground state (with its
/// interpolant), phases, cutoffs and the longitudinal decay profile η.
#[derive(Debug, Clone)]
pub struct TrialState {
    pub geom: WedgeGeometry,
    pub gs: GroundState1D,
    pub phase: PhaseSpec,
    /// Plateau length of η (η = 1 on [0, eps]).
    pub eps: f64,
    /// Decay rate of η beyond the plateau: |M₃|δ/2.
    pub eta_rate: f64,
    /// Third moment of the ground state (sign decides the gain direction).
    pub m3: f64,
    pub chi: ChiBump,
    phi: CubicHermite,
}

/// Quadrature resolution for the region integrals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadSpec {
    /// Gauss-Legendre nodes per panel (radial / slab directions).
    pub gl_nodes: usize,
    /// Gauss-Legendre nodes per V sub-sector in the angle.
    pub theta_nodes: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            gl_nodes: 48,
            theta_nodes: 24,
        }
    }
}

/// Energy, squared norm and Rayleigh quotient, with the node-doubling
/// consistency estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RayleighReport {
    pub energy: f64,
    pub norm2: f64,
    pub quotient: f64,
    /// Relative change of the quotient when all node counts double.
    pub refinement_diff: f64,
}

impl TrialState {
    /// Build the trial state for a trapping ground state at opening angle
    /// `delta`. `eps` is the η plateau length (default 1).
    pub fn new(gs: GroundState1D, delta: f64, eps: Option<f64>) -> Result<Self, TrialError> {
        if !gs.field.is_trapping() {
            return Err(TrialError::NotTrapping(gs.field.case));
        }
        if delta >= 0.25 {
            return Err(TrialError::DeltaTooLarge(delta));
        }
        let geom = WedgeGeometry::new(delta);
        let eps = eps.unwrap_or(1.0);
        let need = geom.ell * (0.5 * (geom.gamma + geom.delta)).tan();
        if eps < need {
            return Err(TrialError::EpsTooSmall { eps, need });
        }
        let m3 = moment(&gs, 3).value;
        let eta_rate = 0.5 * m3.abs() * delta;
        let phase = PhaseSpec::new(&geom, gs.field.b1, gs.field.b2, gs.xi_b);
        let phi = CubicHermite::from_values(gs.grid.t_min, gs.grid.spacing(), gs.phi.clone());
        Ok(Self {
            geom,
            gs,
            phase,
            eps,
            eta_rate,
            m3,
            chi: ChiBump::new(0.85),
            phi,
        })
    }

    /// Transverse profile φ_ℓ(m) = χ(m/ℓ)·φ(m).
    pub fn phi_ell(&self, m: f64) -> f64 {
        if m <= self.phi.x_min() || m >= self.phi.x_max() {
            return 0.0;
        }
        let c = self.chi.eval(m / self.geom.ell);
        if c == 0.0 {
            0.0
        } else {
            c * self.phi.eval(m)
        }
    }

    fn phi_ell_deriv(&self, m: f64) -> f64 {
        if m <= self.phi.x_min() || m >= self.phi.x_max() {
            return 0.0;
        }
        let u = m / self.geom.ell;
        let c = self.chi.eval(u);
        if c == 0.0 {
            return 0.0;
        }
        c * self.phi.eval_deriv(m) + self.chi.deriv(u) / self.geom.ell * self.phi.eval(m)
    }

    /// Longitudinal profile η₊: 1 on [0, eps], decaying exponential beyond.
    pub fn eta_plus(&self, s: f64) -> f64 {
        if s <= self.eps {
            1.0
        } else {
            (-self.eta_rate * (s - self.eps)).exp()
        }
    }

    fn eta_plus_deriv(&self, s: f64) -> f64 {
        if s <= self.eps {
            0.0
        } else {
            -self.eta_rate * (-self.eta_rate * (s - self.eps)).exp()
        }
    }

    /// Closed forms of the η norms: (‖η₊‖², ‖η₊'‖²) = (eps + 1/(|M₃|δ),
    /// |M₃|δ/4).
    pub fn eta_norms_closed(&self) -> (f64, f64) {
        (
            self.eps + 0.5 / self.eta_rate,
            0.5 * self.eta_rate,
        )
    }

    /// Quadrature values of the η norms (panel Gauss-Legendre on the decay
    /// tail); matches the closed forms to near machine precision.
    pub fn eta_norms_quadrature(&self) -> (f64, f64) {
        let (xs, ws) = self.eta_tail_panels(64);
        let mut n2 = self.eps; // exact integral over the plateau
        let mut d2 = 0.0;
        for (&x, &w) in xs.iter().zip(&ws) {
            let e = self.eta_plus(x);
            let de = self.eta_plus_deriv(x);
            n2 += w * e * e;
            d2 += w * de * de;
        }
        (n2, d2)
    }

    /// Geometric panels covering the η tail [eps, eps + 38/(2·rate)].
    fn eta_tail_panels(&self, nodes: usize) -> (Vec<f64>, Vec<f64>) {
        let span = 19.0 / self.eta_rate;
        let mut edges = vec![self.eps];
        let mut step = span / 512.0;
        let mut x = self.eps;
        while x < self.eps + span {
            x += step;
            edges.push(x);
            step *= 2.0;
        }
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        for pair in edges.windows(2) {
            let (x, w) = gl_on(pair[0], pair[1], nodes);
            xs.extend(x);
            ws.extend(w);
        }
        (xs, ws)
    }

    /// Gauge generator whose jump across the left barrier ray the piecewise
    /// phases compensate; ζ = ½(b1-b2)x1²·tanδ on the lower region for
    /// x1 < 0, else 0.
    pub fn zeta(&self, x: [f64; 2], lower_side: bool) -> f64 {
        if lower_side && x[0] < 0.0 {
            0.5 * (self.gs.field.b1 - self.gs.field.b2) * x[0] * x[0] * self.geom.delta.tan()
        } else {
            0.0
        }
    }

    /// Quadratic reflection phase φ_g(x) = (sin2δ/4)(x1²-x2²) + x1·x2·sin²δ,
    /// invariant under S_δ.
    fn phi_gauge(&self, x: [f64; 2]) -> f64 {
        let d = self.geom.delta;
        0.25 * (2.0 * d).sin() * (x[0] * x[0] - x[1] * x[1]) + x[0] * x[1] * d.sin() * d.sin()
    }

    /// Branch value in the σ·(-x2, 0) gauge, including η.
    pub fn value_in_region(&self, x: [f64; 2], tag: RegionTag) -> Complex64 {
        let (sd, cd) = self.geom.delta.sin_cos();
        let xi = self.gs.xi_b;
        match tag {
            RegionTag::Outside => Complex64::new(0.0, 0.0),
            RegionTag::T1Plus | RegionTag::T2Plus => {
                let a = self.eta_plus(x[0]) * self.phi_ell(x[1]);
                Complex64::from_polar(a, xi * x[0])
            }
            RegionTag::V1Plus | RegionTag::V1Minus | RegionTag::V2Plus | RegionTag::V2Minus => {
                let lower = tag.uses_b1();
                let r = x[0].hypot(x[1]);
                let theta = x[1].atan2(x[0]).rem_euclid(std::f64::consts::TAU);
                let m = if tag.is_plus() {
                    x[1]
                } else {
                    -sd * x[0] + cd * x[1]
                };
                let eta_arg = if tag.is_plus() {
                    x[0]
                } else {
                    -cd * x[0] - sd * x[1]
                };
                let a = self.eta_plus(eta_arg) * self.phi_ell(m);
                Complex64::from_polar(a, self.phase.alpha(lower, r, theta))
            }
            RegionTag::T1Minus | RegionTag::T2Minus => {
                let b = if tag.uses_b1() {
                    self.gs.field.b1
                } else {
                    self.gs.field.b2
                };
                let w = -cd * x[0] - sd * x[1];
                let m = -sd * x[0] + cd * x[1];
                let a = self.eta_plus(w) * self.phi_ell(m);
                let phase = xi * (cd * x[0] + sd * x[1]) - b * self.phi_gauge(x);
                Complex64::from_polar(a, phase)
            }
        }
    }

    /// Trial-state value in the original gauge (continuous across every
    /// interface): exp(iζ) times the branch value.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let tag = region_of(x, &self.geom);
        if tag == RegionTag::Outside {
            return Complex64::new(0.0, 0.0);
        }
        let v = self.value_in_region(x, tag);
        let z = self.zeta(x, tag.uses_b1());
        v * Complex64::from_polar(1.0, z)
    }

    /// Branch value in the original gauge (for two-sided interface checks).
    pub fn eval_in_region(&self, x: [f64; 2], tag: RegionTag) -> Complex64 {
        let v = self.value_in_region(x, tag);
        v * Complex64::from_polar(1.0, self.zeta(x, tag.uses_b1()))
    }

    /// |u|² of the branch at x.
    pub fn norm_density(&self, x: [f64; 2], tag: RegionTag) -> f64 {
        self.value_in_region(x, tag).norm_sqr()
    }

    /// |(∇ - i·b·A)u|² of the branch at x, with A = (-x2, 0) and b the
    /// region's field intensity. Analytic per-branch gradients; the phases
    /// are closed-form so no numerical differentiation enters.
    pub fn energy_density(&self, x: [f64; 2], tag: RegionTag) -> f64 {
        let field = &self.gs.field;
        let b = if tag.uses_b1() { field.b1 } else { field.b2 };
        let xi = self.gs.xi_b;
        let (sd, cd) = self.geom.delta.sin_cos();
        match tag {
            RegionTag::Outside => 0.0,
            RegionTag::T1Plus | RegionTag::T2Plus => {
                let p = self.phi_ell(x[1]);
                let dp = self.phi_ell_deriv(x[1]);
                let e = self.eta_plus(x[0]);
                let de = self.eta_plus_deriv(x[0]);
                let k = xi + b * x[1];
                de * de * p * p + e * e * (dp * dp + k * k * p * p)
            }
            RegionTag::V1Plus | RegionTag::V1Minus | RegionTag::V2Plus | RegionTag::V2Minus => {
                let lower = tag.uses_b1();
                let r = x[0].hypot(x[1]);
                let theta = x[1].atan2(x[0]).rem_euclid(std::f64::consts::TAU);
                let (st, ct) = theta.sin_cos();
                let m = if tag.is_plus() {
                    x[1]
                } else {
                    -sd * x[0] + cd * x[1]
                };
                let p = self.phi_ell(m);
                let dp = self.phi_ell_deriv(m);
                let (dar, dat) = self.phase.alpha_grad(lower, r, theta);
                // vector potential in polar components
                let a_r = -r * st * ct;
                let a_t = r * st * st;
                let fr = dar - b * a_r;
                let ft = dat / r - b * a_t;
                dp * dp + (fr * fr + ft * ft) * p * p
            }
            RegionTag::T1Minus | RegionTag::T2Minus => {
                let w = -cd * x[0] - sd * x[1];
                let m = -sd * x[0] + cd * x[1];
                let p = self.phi_ell(m);
                let dp = self.phi_ell_deriv(m);
                let e = self.eta_plus(w);
                let de = self.eta_plus_deriv(w);
                // phase gradient: ∇[ξ(c·x1 + s·x2) - b·φ_g]
                let dphig = [
                    0.5 * (2.0 * self.geom.delta).sin() * x[0] + sd * sd * x[1],
                    sd * sd * x[0] - 0.5 * (2.0 * self.geom.delta).sin() * x[1],
                ];
                let gb = [xi * cd - b * dphig[0], xi * sd - b * dphig[1]];
                // subtract b·A with A = (-x2, 0)
                let f = [gb[0] + b * x[1], gb[1]];
                de * de * p * p + e * e * (dp * dp + (f[0] * f[0] + f[1] * f[1]) * p * p)
            }
        }
    }
}

/// Tensor quadrature nodes (points and weights) adapted to one region.
fn region_nodes(ts: &TrialState, tag: RegionTag, quad: &QuadSpec) -> (Vec<[f64; 2]>, Vec<f64>) {
    let g = &ts.geom;
    let lim = g.ell.min(ts.gs.grid.t_max);
    let a = g.angles();
    match tag {
        RegionTag::Outside => (Vec::new(), Vec::new()),
        RegionTag::T1Plus | RegionTag::T2Plus => {
            t_slab_nodes(ts, tag == RegionTag::T1Plus, lim, quad)
        }
        RegionTag::T1Minus | RegionTag::T2Minus => {
            let plus = if tag == RegionTag::T1Minus {
                RegionTag::T1Plus
            } else {
                RegionTag::T2Plus
            };
            let (pts, ws) = t_slab_nodes(ts, plus == RegionTag::T1Plus, lim, quad);
            (pts.into_iter().map(|p| g.reflect(p)).collect(), ws)
        }
        RegionTag::V2Plus => v_sector_nodes(ts, a.t2p_v2p, a.sym_up, false, lim, quad),
        RegionTag::V2Minus => v_sector_nodes(ts, a.sym_up, a.v2m_t2m, true, lim, quad),
        RegionTag::V1Minus => v_sector_nodes(ts, a.t1m_v1m, a.sym_down, true, lim, quad),
        RegionTag::V1Plus => v_sector_nodes(ts, a.sym_down, a.v1p_t1p, false, lim, quad),
    }
}

/// Nodes for a T⁺ slab: x2 panels across the profile kinks, and per-x2 an
/// x1 ladder from the wedge edge through the η plateau and its
/// geometrically growing decay tail.
fn t_slab_nodes(
    ts: &TrialState,
    lower: bool,
    lim: f64,
    quad: &QuadSpec,
) -> (Vec<[f64; 2]>, Vec<f64>) {
    let g = &ts.geom;
    let wedge_slope = if lower {
        (0.5 * (g.gamma + g.delta)).tan()
    } else {
        (0.5 * (g.gamma - g.delta)).tan()
    };
    let (x2_lo, x2_hi) = if lower { (-lim, 0.0) } else { (0.0, lim) };
    let breaks = [
        -g.ell * ts.chi.plateau,
        -0.5 * g.ell,
        0.5 * g.ell,
        g.ell * ts.chi.plateau,
    ];
    let (x2s, w2s) = gl_panels(x2_lo, x2_hi, &breaks, quad.gl_nodes);
    let span = 19.0 / ts.eta_rate;
    let mut pts = Vec::new();
    let mut ws = Vec::new();
    for (&x2, &w2) in x2s.iter().zip(&w2s) {
        let x1_min = x2.abs() * wedge_slope;
        let mut edges = vec![x1_min, ts.eps];
        let mut step = span / 512.0;
        let mut x = ts.eps;
        while x < ts.eps + span {
            x += step;
            edges.push(x);
            step *= 2.0;
        }
        for pair in edges.windows(2) {
            if pair[1] <= pair[0] {
                continue;
            }
            let (x1s, w1s) = gl_on(pair[0], pair[1], quad.gl_nodes);
            for (&x1, &w1) in x1s.iter().zip(&w1s) {
                pts.push([x1, x2]);
                ws.push(w1 * w2);
            }
        }
    }
    (pts, ws)
}

/// Polar nodes for one V sub-sector; the radial limit is where the
/// transverse profile argument reaches the cutoff.
fn v_sector_nodes(
    ts: &TrialState,
    th_lo: f64,
    th_hi: f64,
    minus: bool,
    lim: f64,
    quad: &QuadSpec,
) -> (Vec<[f64; 2]>, Vec<f64>) {
    let g = &ts.geom;
    let (ths, wts) = gl_on(th_lo, th_hi, quad.theta_nodes);
    let mut pts = Vec::new();
    let mut ws = Vec::new();
    let pi_d = std::f64::consts::PI + g.delta;
    for (&th, &wt) in ths.iter().zip(&wts) {
        // slope of the transverse argument m(r) along this ray
        let slope = if minus { (pi_d - th).sin() } else { th.sin() }.abs();
        let r_max = lim / slope;
        let breaks = [
            0.5 * g.ell / slope,
            ts.chi.plateau * g.ell / slope,
        ];
        let (rs, wrs) = gl_panels(0.0, r_max, &breaks, quad.gl_nodes);
        let (st, ct) = th.sin_cos();
        for (&r, &wr) in rs.iter().zip(&wrs) {
            pts.push([r * ct, r * st]);
            ws.push(wt * wr * r);
        }
    }
    (pts, ws)
}

/// Energy integral over one region.
pub fn region_energy(ts: &TrialState, tag: RegionTag, quad: &QuadSpec) -> f64 {
    let (pts, ws) = region_nodes(ts, tag, quad);
    pts.iter()
        .zip(&ws)
        .map(|(&p, &w)| w * ts.energy_density(p, tag))
        .sum()
}

/// Squared-norm integral over one region.
pub fn region_norm(ts: &TrialState, tag: RegionTag, quad: &QuadSpec) -> f64 {
    let (pts, ws) = region_nodes(ts, tag, quad);
    pts.iter()
        .zip(&ws)
        .map(|(&p, &w)| w * ts.norm_density(p, tag))
        .sum()
}

const ALL_REGIONS: [RegionTag; 8] = [
    RegionTag::T1Plus,
    RegionTag::T2Plus,
    RegionTag::T1Minus,
    RegionTag::T2Minus,
    RegionTag::V1Plus,
    RegionTag::V2Plus,
    RegionTag::V1Minus,
    RegionTag::V2Minus,
];

fn rayleigh_at(ts: &TrialState, quad: &QuadSpec) -> (f64, f64) {
    let mut energy = 0.0;
    let mut norm2 = 0.0;
    for tag in ALL_REGIONS {
        energy += region_energy(ts, tag, quad);
        norm2 += region_norm(ts, tag, quad);
    }
    (energy, norm2)
}

/// Rayleigh quotient of the trial state by per-region tensor quadrature,
/// with a node-doubling consistency check.
pub fn rayleigh(ts: &TrialState, quad: &QuadSpec) -> Result<RayleighReport, TrialError> {
    if quad.gl_nodes < 8 || quad.theta_nodes < 8 {
        return Err(TrialError::BadQuadSpec);
    }
    let (energy, norm2) = rayleigh_at(ts, quad);
    let fine = QuadSpec {
        gl_nodes: 2 * quad.gl_nodes,
        theta_nodes: 2 * quad.theta_nodes,
    };
    let (e2, n2) = rayleigh_at(ts, &fine);
    let q1 = energy / norm2;
    let q2 = e2 / n2;
    let diff = ((q1 - q2) / q2).abs();
    if (energy - e2).abs() > 0.01 * e2.abs() {
        return Err(TrialError::QuadratureUnresolved((energy - e2).abs() / e2));
    }
    Ok(RayleighReport {
        energy: e2,
        norm2: n2,
        quotient: q2,
        refinement_diff: diff,
    })
}

/// Squared norm split into the plus side, the minus side, and the total.
pub fn l2_breakdown(ts: &TrialState, quad: &QuadSpec) -> (f64, f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for tag in ALL_REGIONS {
        let v = region_norm(ts, tag, quad);
        if tag.is_plus() {
            plus += v;
        } else {
            minus += v;
        }
    }
    (plus, minus, plus + minus)
}

/// Largest two-sided mismatch of the original-gauge value across all eight
/// region interfaces, sampled at `n_per_interface` radii each.
pub fn continuity_residual(ts: &TrialState, n_per_interface: usize, seed: u64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = &ts.geom;
    let a = g.angles();
    // (angle, tag on the smaller-angle side, tag on the larger-angle side)
    let interfaces = [
        (a.t2p_v2p, RegionTag::T2Plus, RegionTag::V2Plus),
        (a.sym_up, RegionTag::V2Plus, RegionTag::V2Minus),
        (a.v2m_t2m, RegionTag::V2Minus, RegionTag::T2Minus),
        (a.barrier_left, RegionTag::T2Minus, RegionTag::T1Minus),
        (a.t1m_v1m, RegionTag::T1Minus, RegionTag::V1Minus),
        (a.sym_down, RegionTag::V1Minus, RegionTag::V1Plus),
        (a.v1p_t1p, RegionTag::V1Plus, RegionTag::T1Plus),
        (std::f64::consts::TAU, RegionTag::T1Plus, RegionTag::T2Plus),
    ];
    let mut worst: f64 = 0.0;
    for &(theta, ta, tb) in &interfaces {
        let (st, ct) = theta.sin_cos();
        // stay inside both regions' radial extent along the ray
        let r_cap = if st.abs() < 1e-12 {
            ts.gs.grid.t_max.min(10.0 * g.ell)
        } else {
            g.ell.min(ts.gs.grid.t_max) / st.abs()
        };
        for _ in 0..n_per_interface {
            let r = rng.gen_range(0.02..0.95) * r_cap;
            let x = [r * ct, r * st];
            let va = ts.eval_in_region(x, ta);
            let vb = ts.eval_in_region(x, tb);
            worst = worst.max((va - vb).norm());
        }
    }
    worst
}
