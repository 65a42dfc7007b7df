//! Implicitly-defined bounded domains D ⊂ R^d.
//!
//! A domain is a scalar field φ with the sign convention φ < 0 inside D,
//! φ = 0 on ∂D, φ > 0 outside, plus a gradient and a bounding box. CSG
//! combinations use min/max of fields, so φ is *not* a signed distance in
//! general; every geometric query in this crate relies only on the sign of φ
//! and its local gradient.
//!
//! The catalog covers the builtin shapes used throughout the experiments:
//! balls and boxes, a star-shaped cross polytope, a slit disk, an eroded cube
//! whose removed ball families pinch together along a segment, a large ball
//! with a dumbbell-shaped solid removed (carrying a free-sliding waist loop),
//! a box with a doorknob-shaped solid removed (carrying a pinned waist loop),
//! a dented dumbbell, a ball with a long thin cuboid appended, a ball with two
//! tangent balls removed, and a ball with an accumulating sequence of pinching
//! ball pairs removed.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::geom::Point;
use crate::rng::{trial_rng, uniform_in_box};
use rand::Rng;

/// Default projection iteration cap.
pub const PROJ_MAX_ITER: usize = 200;
/// Projection convergence tolerance on |φ|.
pub const PROJ_TOL: f64 = 1e-10;
/// Gradient norms below this are treated as degenerate.
pub const GRAD_EPS: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("non-finite coordinates in input point")]
    InvalidInput,
    #[error("projection failed to converge after {0} iterations (point may exceed the reach)")]
    ProjectionFailed(usize),
    #[error("gradient degenerate at boundary point (|∇φ| < {GRAD_EPS:e}); non-smooth boundary")]
    DegenerateNormal,
    #[error("unknown catalog domain `{0}`")]
    UnknownDomain(String),
    #[error("invalid parameters for domain `{0}`: {1}")]
    InvalidParameters(String, String),
    #[error("boundary sampling failed: no sign changes found")]
    SamplingFailed,
}

/// Classification of a point relative to D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
}

/// CSG shape tree. `eval` returns φ; `eval_grad` returns (φ, ∇φ) with the
/// gradient taken from the active min/max branch (a subgradient on the
/// non-smooth locus).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Shape {
    Ball { center: Point, radius: f64 },
    /// Axis-aligned box; φ = max_i max(min_i - x_i, x_i - max_i).
    Box { min: Point, max: Point },
    /// Points within `radius` of the segment [a, b].
    Capsule { a: Point, b: Point, radius: f64 },
    /// Solid of revolution about the x_axis coordinate axis for x ∈ [t0, t1]:
    /// points with r² ≤ radius_sq(x), where radius_sq is the quadratic
    /// c0 + c1 x + c2 x². φ = max(r² - radius_sq(x), t0 - x, x - t1).
    Revolution { axis: usize, t0: f64, t1: f64, c0: f64, c1: f64, c2: f64 },
    Union(Vec<Shape>),
    Intersection(Vec<Shape>),
    /// Set difference A \ B via max(φ_A, -φ_B).
    Difference(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn eval(&self, p: &Point) -> f64 {
        match self {
            Shape::Ball { center, radius } => p.dist(center) - radius,
            Shape::Box { min, max } => {
                let mut worst = f64::NEG_INFINITY;
                for i in 0..p.dim() {
                    worst = worst.max(min[i] - p[i]).max(p[i] - max[i]);
                }
                worst
            }
            Shape::Capsule { a, b, radius } => dist_to_segment(p, a, b) - radius,
            Shape::Revolution { axis, t0, t1, c0, c1, c2 } => {
                let x = p[*axis];
                let mut r2 = 0.0;
                for i in 0..p.dim() {
                    if i != *axis {
                        r2 += p[i] * p[i];
                    }
                }
                let prof = c0 + c1 * x + c2 * x * x;
                (r2 - prof).max(t0 - x).max(x - t1)
            }
            Shape::Union(parts) => {
                parts.iter().map(|s| s.eval(p)).fold(f64::INFINITY, f64::min)
            }
            Shape::Intersection(parts) => {
                parts.iter().map(|s| s.eval(p)).fold(f64::NEG_INFINITY, f64::max)
            }
            Shape::Difference(a, b) => a.eval(p).max(-b.eval(p)),
        }
    }

    pub fn eval_grad(&self, p: &Point) -> (f64, Point) {
        match self {
            Shape::Ball { center, radius } => {
                let d = *p - *center;
                let n = d.norm();
                if n < 1e-300 {
                    (-radius, Point::zeros(p.dim()))
                } else {
                    (n - radius, d * (1.0 / n))
                }
            }
            Shape::Box { min, max } => {
                let mut worst = f64::NEG_INFINITY;
                let mut g = Point::zeros(p.dim());
                for i in 0..p.dim() {
                    let lo = min[i] - p[i];
                    let hi = p[i] - max[i];
                    if lo > worst {
                        worst = lo;
                        g = Point::zeros(p.dim());
                        g[i] = -1.0;
                    }
                    if hi > worst {
                        worst = hi;
                        g = Point::zeros(p.dim());
                        g[i] = 1.0;
                    }
                }
                (worst, g)
            }
            Shape::Capsule { a, b, radius } => {
                let q = closest_on_segment(p, a, b);
                let d = *p - q;
                let n = d.norm();
                if n < 1e-300 {
                    (-radius, Point::zeros(p.dim()))
                } else {
                    (n - radius, d * (1.0 / n))
                }
            }
            Shape::Revolution { axis, t0, t1, c0, c1, c2 } => {
                let x = p[*axis];
                let mut r2 = 0.0;
                for i in 0..p.dim() {
                    if i != *axis {
                        r2 += p[i] * p[i];
                    }
                }
                let prof = c0 + c1 * x + c2 * x * x;
                let surf = r2 - prof;
                let lo = t0 - x;
                let hi = x - t1;
                let mut g = Point::zeros(p.dim());
                let best = surf.max(lo).max(hi);
                if best == surf {
                    for i in 0..p.dim() {
                        if i != *axis {
                            g[i] = 2.0 * p[i];
                        }
                    }
                    g[*axis] = -(c1 + 2.0 * c2 * x);
                } else if best == lo {
                    g[*axis] = -1.0;
                } else {
                    g[*axis] = 1.0;
                }
                (best, g)
            }
            Shape::Union(parts) => {
                let mut best = f64::INFINITY;
                let mut g = Point::zeros(p.dim());
                for s in parts {
                    let (v, gv) = s.eval_grad(p);
                    if v < best {
                        best = v;
                        g = gv;
                    }
                }
                (best, g)
            }
            Shape::Intersection(parts) => {
                let mut best = f64::NEG_INFINITY;
                let mut g = Point::zeros(p.dim());
                for s in parts {
                    let (v, gv) = s.eval_grad(p);
                    if v > best {
                        best = v;
                        g = gv;
                    }
                }
                (best, g)
            }
            Shape::Difference(a, b) => {
                let (va, ga) = a.eval_grad(p);
                let (vb, gb) = b.eval_grad(p);
                if va >= -vb {
                    (va, ga)
                } else {
                    (-vb, -gb)
                }
            }
        }
    }
}

fn closest_on_segment(p: &Point, a: &Point, b: &Point) -> Point {
    let ab = *b - *a;
    let len_sq = ab.norm_sq();
    if len_sq < 1e-300 {
        return *a;
    }
    let t = ((*p - *a).dot(&ab) / len_sq).clamp(0.0, 1.0);
    *a + ab * t
}

fn dist_to_segment(p: &Point, a: &Point, b: &Point) -> f64 {
    p.dist(&closest_on_segment(p, a, b))
}

/// A bounded domain given implicitly by a scalar field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImplicitDomain {
    pub name: String,
    pub dim: usize,
    pub shape: Shape,
    pub bbox_min: Point,
    pub bbox_max: Point,
}

impl ImplicitDomain {
    pub fn new(name: impl Into<String>, dim: usize, shape: Shape, bbox_min: Point, bbox_max: Point) -> Self {
        ImplicitDomain { name: name.into(), dim, shape, bbox_min, bbox_max }
    }

    #[inline]
    pub fn phi(&self, p: &Point) -> f64 {
        self.shape.eval(p)
    }

    #[inline]
    pub fn phi_grad(&self, p: &Point) -> (f64, Point) {
        self.shape.eval_grad(p)
    }

    pub fn bbox_diag(&self) -> f64 {
        self.bbox_max.dist(&self.bbox_min)
    }

    /// Default half-width of the band around φ = 0 treated as boundary.
    pub fn boundary_band(&self) -> f64 {
        1e-6 * self.bbox_diag()
    }

    pub fn classify_point(&self, p: &Point, tol: f64) -> Result<PointClass, DomainError> {
        if !p.is_finite() {
            return Err(DomainError::InvalidInput);
        }
        assert!(tol > 0.0, "classification tolerance must be positive");
        let v = self.phi(p);
        Ok(if v.abs() <= tol {
            PointClass::Boundary
        } else if v < 0.0 {
            PointClass::Interior
        } else {
            PointClass::Exterior
        })
    }

    /// Is p in the closure D̄ (up to the default boundary band)?
    pub fn contains_closure(&self, p: &Point) -> bool {
        self.phi(p) <= self.boundary_band()
    }

    /// Nearest-point projection onto D̄, by damped Newton descent on φ along
    /// ∇φ with step clamping. Identity for points already in D̄.
    pub fn project_to_closure(&self, p: &Point) -> Result<Point, DomainError> {
        if !p.is_finite() {
            return Err(DomainError::InvalidInput);
        }
        if self.phi(p) <= 0.0 {
            return Ok(*p);
        }
        self.descend_to_level(p, 0.0, PROJ_TOL, PROJ_MAX_ITER)
    }

    /// Descend φ to the target level set (used for projection and for the
    /// interior-clearance nudges of the geodesic engine).
    ///
    /// Succeeds when φ(q) ∈ [level - tol, level + tol] or φ(q) < level
    /// already holds (we never push points *outward* toward the level set).
    pub fn descend_to_level(
        &self,
        p: &Point,
        level: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<Point, DomainError> {
        let mut q = *p;
        let max_step = 0.25 * self.bbox_diag().max(1.0);
        for _ in 0..max_iter {
            let (v, g) = self.phi_grad(&q);
            if v <= level + tol {
                return Ok(q);
            }
            let gn2 = g.norm_sq();
            if gn2 < GRAD_EPS * GRAD_EPS {
                // Stuck on a gradient plateau; bail out below.
                break;
            }
            // Newton step for φ = level along ∇φ, damped.
            let mut step = (v - level) / gn2;
            let glen = gn2.sqrt();
            if step * glen > max_step {
                step = max_step / glen;
            }
            q = q - g * (0.8 * step);
        }
        let v = self.phi(&q);
        if v <= level + tol {
            Ok(q)
        } else {
            Err(DomainError::ProjectionFailed(max_iter))
        }
    }

    /// Outward unit normal at a boundary point (gradient direction).
    pub fn outward_normal(&self, p: &Point) -> Result<Point, DomainError> {
        if !p.is_finite() {
            return Err(DomainError::InvalidInput);
        }
        let (_, g) = self.phi_grad(p);
        let n = g.norm();
        if n < GRAD_EPS {
            return Err(DomainError::DegenerateNormal);
        }
        Ok(g * (1.0 / n))
    }

    /// Newton descent of |φ| to the zero level set from an arbitrary start
    /// (exterior starts descend φ, interior starts ascend it).
    fn descend_to_zero_abs(&self, p: &Point) -> Result<Point, DomainError> {
        let mut q = *p;
        let max_step = 0.25 * self.bbox_diag().max(1.0);
        for _ in 0..PROJ_MAX_ITER {
            let (v, g) = self.phi_grad(&q);
            if v.abs() <= 1e-12 * self.bbox_diag() {
                return Ok(q);
            }
            let gn2 = g.norm_sq();
            if gn2 < GRAD_EPS * GRAD_EPS {
                break;
            }
            let mut step = v / gn2;
            let glen = gn2.sqrt();
            if step.abs() * glen > max_step {
                step = step.signum() * max_step / glen;
            }
            q = q - g * (0.8 * step);
        }
        if self.phi(&q).abs() <= 1e-9 * self.bbox_diag() {
            Ok(q)
        } else {
            Err(DomainError::ProjectionFailed(PROJ_MAX_ITER))
        }
    }

    /// Sample a boundary point by bisecting between an interior and an
    /// exterior sample.
    fn bisect_boundary(&self, inside: &Point, outside: &Point) -> Point {
        let mut a = *inside;
        let mut b = *outside;
        for _ in 0..80 {
            let m = a.lerp(&b, 0.5);
            if self.phi(&m) <= 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        a
    }
}

/// Estimated boundary-regularity parameters (exterior sphere radius,
/// interior cone, reach). These are sampled estimates, not certificates.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    pub r_ext: f64,
    pub cone_delta: f64,
    pub cone_alpha: f64,
    pub reach_estimate: f64,
    pub sample_count: usize,
    pub notes: Vec<String>,
}

impl ImplicitDomain {
    /// Estimate regularity parameters from `n_samples` boundary samples.
    ///
    /// r_ext: largest dyadic r such that every sampled exterior tangent ball
    /// B(z + r·ν(z), r) avoids all sampled interior points and a local φ probe.
    /// reach: largest dyadic r at which two perturbed projection starts from
    /// offset points agree. cone: largest dyadic (δ, α) passing a sampled
    /// containment test of Def-style interior cones.
    pub fn estimate_regularity(&self, n_samples: usize, rng_seed: u64) -> Result<RegularityReport, DomainError> {
        assert!(n_samples >= 100, "need at least 100 samples");
        let mut rng = trial_rng(rng_seed, 0);
        let diag = self.bbox_diag();
        let pad = Point::from_slice(&vec![0.05 * diag; self.dim]);
        let lo = self.bbox_min - pad;
        let hi = self.bbox_max + pad;

        // Interior and exterior pools.
        let mut interior = Vec::new();
        let mut exterior = Vec::new();
        for _ in 0..20 * n_samples {
            if interior.len() >= n_samples && exterior.len() >= n_samples {
                break;
            }
            let p = uniform_in_box(&mut rng, &lo, &hi);
            let v = self.phi(&p);
            if v < 0.0 && interior.len() < n_samples {
                interior.push(p);
            } else if v > 0.0 && exterior.len() < n_samples {
                exterior.push(p);
            }
        }
        if interior.is_empty() || exterior.is_empty() {
            return Err(DomainError::SamplingFailed);
        }

        // Boundary samples with usable normals, from three generators:
        // interior/exterior bisection, gradient descent of |φ| to the zero
        // level (catches boundary pieces of removed solids, e.g. cusps), and
        // sign-change scans along segments between interior pairs (catches
        // thin obstacles such as slits).
        let mut boundary = Vec::new();
        let want = n_samples.min(400);
        let mut push = |d: &ImplicitDomain, z: Point, boundary: &mut Vec<(Point, Point)>| {
            if d.phi(&z).abs() <= 1e-7 * diag {
                if let Ok(nu) = d.outward_normal(&z) {
                    boundary.push((z, nu));
                }
            }
        };
        let mut attempts = 0;
        while boundary.len() < want && attempts < 40 * want {
            attempts += 1;
            let a = interior[rng.gen_range(0..interior.len())];
            let b = exterior[rng.gen_range(0..exterior.len())];
            push(self, self.bisect_boundary(&a, &b), &mut boundary);
        }
        for _ in 0..want {
            let p = uniform_in_box(&mut rng, &lo, &hi);
            if let Ok(z) = self.descend_to_zero_abs(&p) {
                push(self, z, &mut boundary);
            }
        }
        for _ in 0..want {
            let a = interior[rng.gen_range(0..interior.len())];
            let b = interior[rng.gen_range(0..interior.len())];
            // March along the segment; bisect the first sign-change bracket.
            let steps = 64;
            let mut prev = a;
            for k in 1..=steps {
                let q = a.lerp(&b, k as f64 / steps as f64);
                if self.phi(&q) > 0.0 {
                    push(self, self.bisect_boundary(&prev, &q), &mut boundary);
                    break;
                }
                prev = q;
            }
        }
        if boundary.is_empty() {
            return Err(DomainError::SamplingFailed);
        }

        // Exterior sphere radius on a dyadic grid.
        let mut r_ext = 0.0;
        let mut r = 0.5 * diag;
        while r > 1e-6 * diag {
            if boundary.iter().all(|(z, nu)| self.exterior_ball_clear(z, nu, r, &interior, &mut rng)) {
                r_ext = r;
                break;
            }
            r *= 0.5;
        }

        // Reach estimate: projections from offset points, two perturbed starts.
        let mut reach = 0.0;
        let mut r = 0.5 * diag;
        'reach: while r > 1e-6 * diag {
            let mut ok = true;
            for (z, nu) in boundary.iter().take(120) {
                let p = *z + *nu * r;
                let h = 1e-5 * diag;
                let mut tang = Point::zeros(self.dim);
                tang[(0..self.dim).min_by_key(|&i| (nu[i].abs() * 1e6) as i64).unwrap()] = 1.0;
                let q1 = self.project_to_closure(&p);
                let q2 = self.project_to_closure(&(p + tang * h));
                match (q1, q2) {
                    (Ok(q1), Ok(q2)) => {
                        if q1.dist(&q2) > 10.0 * h + 1e-6 * diag {
                            ok = false;
                        }
                    }
                    _ => ok = false,
                }
                if !ok {
                    r *= 0.5;
                    continue 'reach;
                }
            }
            reach = r;
            break;
        }

        // Interior cone: test candidate axes m = -ν(z) on dyadic (δ, α).
        let alphas = [
            std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_8,
            std::f64::consts::FRAC_PI_8 / 2.0,
            std::f64::consts::FRAC_PI_8 / 4.0,
        ];
        let mut cone_alpha = 0.0;
        let mut cone_delta = 0.0;
        let mut delta = 0.25 * diag;
        'cone: while delta > 1e-4 * diag {
            for &alpha in &alphas {
                let ok = boundary.iter().take(150).all(|(z, nu)| {
                    self.cone_contained(z, &(-*nu), alpha, delta, &mut rng)
                });
                if ok {
                    cone_alpha = alpha;
                    cone_delta = delta;
                    break 'cone;
                }
            }
            delta *= 0.5;
        }

        let mut notes = Vec::new();
        if r_ext <= 1e-5 * diag {
            notes.push("exterior sphere test failed at all grid radii".into());
        }
        if cone_alpha <= alphas[alphas.len() - 1] + 1e-12 || cone_alpha == 0.0 {
            notes.push("interior cone test failed or passed only at the smallest grid angle".into());
        }
        if self.name == "accumulating_pinches" {
            notes.push("infinite removed family truncated (see n_max parameter)".into());
        }
        Ok(RegularityReport {
            r_ext,
            cone_delta,
            cone_alpha,
            reach_estimate: reach,
            sample_count: boundary.len(),
            notes,
        })
    }

    fn exterior_ball_clear<R: Rng>(
        &self,
        z: &Point,
        nu: &Point,
        r: f64,
        interior: &[Point],
        rng: &mut R,
    ) -> bool {
        let c = *z + *nu * r;
        // No sampled interior point may fall in the ball (small slack for the
        // tangency at z itself).
        let slack = 1e-9 * self.bbox_diag();
        if interior.iter().any(|p| p.dist(&c) < r - slack) {
            return false;
        }
        // Local φ probe: random points in the ball near the tangency must not
        // be interior.
        for _ in 0..24 {
            let dir = crate::rng::unit_vec(rng, self.dim);
            let rad = r * rng.gen::<f64>().powf(1.0 / self.dim as f64);
            let q = c + dir * rad;
            if q.dist(z) < 0.5 * r && self.phi(&q) < -slack {
                return false;
            }
        }
        true
    }

    fn cone_contained<R: Rng>(
        &self,
        z: &Point,
        m: &Point,
        alpha: f64,
        delta: f64,
        rng: &mut R,
    ) -> bool {
        // Base points w ∈ D ∩ B(z, δ), sampled locally so that thin features
        // near z are represented; sampled points of w + C(m) within B(z, δ)
        // must stay in D.
        let cos_a = alpha.cos();
        let mut bases = Vec::new();
        for _ in 0..200 {
            if bases.len() >= 10 {
                break;
            }
            let dir = crate::rng::unit_vec(rng, self.dim);
            let w = *z + dir * (rng.gen::<f64>() * delta);
            if self.phi(&w) < 0.0 {
                bases.push(w);
            }
        }
        for w in &bases {
            for _ in 0..16 {
                // Random direction within angle alpha of m: mix m with a
                // random unit vector so the sample stays inside the cone.
                let v = crate::rng::unit_vec(rng, self.dim);
                let frac = rng.gen::<f64>();
                let spread = (alpha * frac).tan().min(1e6);
                let perp = (v - *m * v.dot(m)).normalized_or_zero(1e-12);
                let dir = (*m + perp * spread).normalized_or_zero(1e-12);
                if dir.dot(m) <= cos_a - 1e-12 {
                    continue;
                }
                let t = rng.gen::<f64>() * delta;
                let q = *w + dir * t;
                if q.dist(z) < delta && self.phi(&q) > 1e-12 * self.bbox_diag() {
                    return false;
                }
            }
        }
        true
    }
}

/// Specification for `make_domain`: a catalog entry or an explicit CSG tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum DomainSpec {
    Catalog { name: String, params: BTreeMap<String, f64> },
    Csg { dim: usize, shape: Shape, bbox_min: Point, bbox_max: Point },
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

/// Build a domain from a catalog name plus parameters, or from a CSG tree.
pub fn make_domain(spec: &DomainSpec) -> Result<ImplicitDomain, DomainError> {
    match spec {
        DomainSpec::Csg { dim, shape, bbox_min, bbox_max } => Ok(ImplicitDomain::new(
            "csg",
            *dim,
            shape.clone(),
            *bbox_min,
            *bbox_max,
        )),
        DomainSpec::Catalog { name, params } => build_catalog(name, params),
    }
}

/// Catalog entry names understood by [`make_domain`].
pub const CATALOG: &[&str] = &[
    "ball",
    "box",
    "star_shaped_poly",
    "slit_disk",
    "eroded_cube",
    "dumbbell_removed",
    "doorknob",
    "dented_dumbbell",
    "cuboid_appendage",
    "tangent_balls_removed",
    "annulus",
    "accumulating_pinches",
];

fn build_catalog(name: &str, params: &BTreeMap<String, f64>) -> Result<ImplicitDomain, DomainError> {
    let bad = |msg: &str| Err(DomainError::InvalidParameters(name.to_string(), msg.to_string()));
    match name {
        "ball" => {
            let d = param(params, "dim", 3.0) as usize;
            let r = param(params, "r", 1.0);
            if r <= 0.0 {
                return bad("radius must be positive");
            }
            let c = Point::zeros(d);
            let pad = Point::from_slice(&vec![r; d]);
            Ok(ImplicitDomain::new(
                "ball",
                d,
                Shape::Ball { center: c, radius: r },
                c - pad,
                c + pad,
            ))
        }
        "box" => {
            let d = param(params, "dim", 3.0) as usize;
            let hw = param(params, "half_width", 1.0);
            if hw <= 0.0 {
                return bad("half_width must be positive");
            }
            let hi = Point::from_slice(&vec![hw; d]);
            Ok(ImplicitDomain::new("box", d, Shape::Box { min: -hi, max: hi }, -hi, hi))
        }
        "star_shaped_poly" => {
            // Cross of overlapping boxes: star-shaped about the origin but not
            // convex. Arm half-length 1, arm half-width w.
            let d = param(params, "dim", 3.0) as usize;
            let w = param(params, "arm_half_width", 0.3);
            if !(0.0..1.0).contains(&w) {
                return bad("arm_half_width must be in (0,1)");
            }
            let mut arms = Vec::new();
            for axis in 0..d {
                let mut lo = Point::from_slice(&vec![-w; d]);
                let mut hi = Point::from_slice(&vec![w; d]);
                lo[axis] = -1.0;
                hi[axis] = 1.0;
                arms.push(Shape::Box { min: lo, max: hi });
            }
            let one = Point::from_slice(&vec![1.0; d]);
            Ok(ImplicitDomain::new("star_shaped_poly", d, Shape::Union(arms), -one, one))
        }
        "slit_disk" => {
            // Unit disk minus the segment from (0,0) to (1,0), thickened to
            // half-width `slit_half_width` so crossings are detectable.
            let w = param(params, "slit_half_width", 1e-3);
            if w <= 0.0 || w >= 0.5 {
                return bad("slit_half_width must be in (0, 0.5)");
            }
            let disk = Shape::Ball { center: Point::of2(0.0, 0.0), radius: 1.0 };
            let slit = Shape::Capsule { a: Point::of2(0.0, 0.0), b: Point::of2(1.0, 0.0), radius: w };
            let one = Point::of2(1.0, 1.0);
            Ok(ImplicitDomain::new(
                "slit_disk",
                2,
                Shape::Difference(Box::new(disk), Box::new(slit)),
                -one,
                one,
            ))
        }
        "eroded_cube" => {
            // Cube [-1,1]^3 minus the two swept closed-ball families
            // {B̄((±1,0,u),1) : |u| ≤ 1/2}; the families touch along the
            // segment {(0,0,u) : |u| ≤ 1/2}.
            let one = Point::of3(1.0, 1.0, 1.0);
            let cube = Shape::Box { min: -one, max: one };
            let fam = |x: f64| Shape::Capsule {
                a: Point::of3(x, 0.0, -0.5),
                b: Point::of3(x, 0.0, 0.5),
                radius: 1.0,
            };
            let removed = Shape::Union(vec![fam(1.0), fam(-1.0)]);
            Ok(ImplicitDomain::new(
                "eroded_cube",
                3,
                Shape::Difference(Box::new(cube), Box::new(removed)),
                -one,
                one,
            ))
        }
        "dumbbell_removed" => {
            // B(0,100) minus (B((-10,0,0),2) ∪ B((10,0,0),2) ∪ bar of radius 1
            // swept along the segment (-10,0,0)..(10,0,0)).
            let big = Shape::Ball { center: Point::zeros(3), radius: 100.0 };
            let bell = |x: f64| Shape::Ball { center: Point::of3(x, 0.0, 0.0), radius: 2.0 };
            let bar = Shape::Capsule {
                a: Point::of3(-10.0, 0.0, 0.0),
                b: Point::of3(10.0, 0.0, 0.0),
                radius: 1.0,
            };
            let removed = Shape::Union(vec![bell(-10.0), bell(10.0), bar]);
            let hi = Point::from_slice(&[100.0, 100.0, 100.0]);
            Ok(ImplicitDomain::new(
                "dumbbell_removed",
                3,
                Shape::Difference(Box::new(big), Box::new(removed)),
                -hi,
                hi,
            ))
        }
        "doorknob" => {
            // Box (0,10)×(-10,20)² minus a doorknob-shaped solid: neck of
            // revolution r² ≤ 1+(x-1)² on 0 ≤ x ≤ 2 and knob r² ≤ -4(x-3)(x-3/2)
            // on 2 ≤ x ≤ 3. The neck's narrowest circle (x=1, r=1) pins a
            // stable waist loop.
            let lo = Point::of3(0.0, -10.0, -10.0);
            let hi = Point::of3(10.0, 20.0, 20.0);
            let the_box = Shape::Box { min: lo, max: hi };
            // 1 + (x-1)² = 2 - 2x + x²
            let neck = Shape::Revolution { axis: 0, t0: 0.0, t1: 2.0, c0: 2.0, c1: -2.0, c2: 1.0 };
            // -4(x-3)(x-3/2) = -4x² + 18x - 18
            let knob = Shape::Revolution { axis: 0, t0: 2.0, t1: 3.0, c0: -18.0, c1: 18.0, c2: -4.0 };
            let removed = Shape::Union(vec![neck, knob]);
            Ok(ImplicitDomain::new(
                "doorknob",
                3,
                Shape::Difference(Box::new(the_box), Box::new(removed)),
                lo,
                hi,
            ))
        }
        "dented_dumbbell" => {
            // Two unit balls at (±1.5, 0, 0) joined by a neck capsule, with a
            // shallow spherical dent removed from the far end of the +x ball.
            // Star-shaped about the on-axis point (0.5, 0, 0) (the boundary
            // point of the +x ball antipodal to the dent).
            let depth = param(params, "dent_depth", 0.1);
            if !(0.0..0.5).contains(&depth) {
                return bad("dent_depth must be in (0, 0.5)");
            }
            let ball = |x: f64| Shape::Ball { center: Point::of3(x, 0.0, 0.0), radius: 1.0 };
            let neck = Shape::Capsule {
                a: Point::of3(-1.5, 0.0, 0.0),
                b: Point::of3(1.5, 0.0, 0.0),
                radius: 0.35,
            };
            let r_dent = 0.5;
            let dent_center = Point::of3(2.5 + r_dent - depth, 0.0, 0.0);
            let body = Shape::Union(vec![ball(-1.5), ball(1.5), neck]);
            let shape = Shape::Difference(Box::new(body), Box::new(Shape::Ball { center: dent_center, radius: r_dent }));
            let hi = Point::of3(2.6, 1.1, 1.1);
            Ok(ImplicitDomain::new("dented_dumbbell", 3, shape, -hi, hi))
        }
        "cuboid_appendage" => {
            // Ball B((0,…,0,-(R+1/2)), R) with the long thin cuboid
            // (-1/2,1/2)^{d-1} × (-1, L) appended along the last coordinate.
            // R > d/4 makes the cuboid bottom end inside the ball.
            let d = param(params, "dim", 2.0) as usize;
            let l = param(params, "l", 48.0);
            let r = param(params, "ball_radius", if d == 2 { 0.75 } else { 1.0 });
            if l <= 0.0 {
                return bad("L must be positive");
            }
            if r <= d as f64 / 4.0 {
                return bad("ball_radius must exceed d/4");
            }
            let mut center = Point::zeros(d);
            center[d - 1] = -(r + 0.5);
            let ball = Shape::Ball { center, radius: r };
            let mut lo = Point::from_slice(&vec![-0.5; d]);
            let mut hi = Point::from_slice(&vec![0.5; d]);
            lo[d - 1] = -1.0;
            hi[d - 1] = l;
            let cuboid = Shape::Box { min: lo, max: hi };
            let mut bb_lo = Point::from_slice(&vec![-r; d]);
            let mut bb_hi = Point::from_slice(&vec![r; d]);
            bb_lo[d - 1] = -(2.0 * r + 0.5);
            bb_hi[d - 1] = l;
            Ok(ImplicitDomain::new(
                "cuboid_appendage",
                d,
                Shape::Union(vec![ball, cuboid]),
                bb_lo,
                bb_hi,
            ))
        }
        "tangent_balls_removed" => {
            // B(0,10) minus the two closed unit balls tangent at the origin.
            let big = Shape::Ball { center: Point::zeros(3), radius: 10.0 };
            let b1 = Shape::Ball { center: Point::of3(0.0, 0.0, 1.0), radius: 1.0 };
            let b2 = Shape::Ball { center: Point::of3(0.0, 0.0, -1.0), radius: 1.0 };
            let hi = Point::from_slice(&[10.0, 10.0, 10.0]);
            Ok(ImplicitDomain::new(
                "tangent_balls_removed",
                3,
                Shape::Difference(Box::new(big), Box::new(Shape::Union(vec![b1, b2]))),
                -hi,
                hi,
            ))
        }
        "annulus" => {
            let r_in = param(params, "r_inner", 1.0);
            let r_out = param(params, "r_outer", 1.2);
            if !(r_in > 0.0 && r_out > r_in) {
                return bad("need 0 < r_inner < r_outer");
            }
            let outer = Shape::Ball { center: Point::zeros(2), radius: r_out };
            let inner = Shape::Ball { center: Point::zeros(2), radius: r_in };
            let hi = Point::of2(r_out, r_out);
            Ok(ImplicitDomain::new(
                "annulus",
                2,
                Shape::Difference(Box::new(outer), Box::new(inner)),
                -hi,
                hi,
            ))
        }
        "accumulating_pinches" => {
            // B(0,10) minus ball pairs B_n^± of radius 1 whose boundary
            // spheres meet the plane z=0 in the circles of radius
            // r_n = ((1/n) - 1/(n+1))/3 centered at (1/n, 0, 0). The family is
            // truncated at n_max pairs (flagged in the regularity report).
            let n_max = param(params, "n_max", 20.0) as usize;
            if n_max == 0 {
                return bad("n_max must be at least 1");
            }
            let big = Shape::Ball { center: Point::zeros(3), radius: 10.0 };
            let mut removed = Vec::new();
            for n in 1..=n_max {
                let nf = n as f64;
                let r_n = (1.0 / nf - 1.0 / (nf + 1.0)) / 3.0;
                let h = (1.0 - r_n * r_n).sqrt();
                for sign in [1.0, -1.0] {
                    removed.push(Shape::Ball {
                        center: Point::of3(1.0 / nf, 0.0, sign * h),
                        radius: 1.0,
                    });
                }
            }
            let hi = Point::from_slice(&[10.0, 10.0, 10.0]);
            Ok(ImplicitDomain::new(
                "accumulating_pinches",
                3,
                Shape::Difference(Box::new(big), Box::new(Shape::Union(removed))),
                -hi,
                hi,
            ))
        }
        other => Err(DomainError::UnknownDomain(other.to_string())),
    }
}

/// Convenience constructor for catalog domains with default parameters.
pub fn catalog_domain(name: &str) -> Result<ImplicitDomain, DomainError> {
    make_domain(&DomainSpec::Catalog { name: name.to_string(), params: BTreeMap::new() })
}

/// Catalog domain with parameter overrides.
pub fn catalog_domain_with(name: &str, params: &[(&str, f64)]) -> Result<ImplicitDomain, DomainError> {
    let map = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    make_domain(&DomainSpec::Catalog { name: name.to_string(), params: map })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ball() -> ImplicitDomain {
        catalog_domain("ball").unwrap()
    }

    #[test]
    fn classify_unit_ball() {
        let d = unit_ball();
        assert_eq!(d.classify_point(&Point::zeros(3), 1e-9).unwrap(), PointClass::Interior);
        assert_eq!(d.classify_point(&Point::of3(1.0, 0.0, 0.0), 1e-9).unwrap(), PointClass::Boundary);
        assert_eq!(d.classify_point(&Point::of3(2.0, 0.0, 0.0), 1e-9).unwrap(), PointClass::Exterior);
        assert!(matches!(
            d.classify_point(&Point::of3(f64::NAN, 0.0, 0.0), 1e-9),
            Err(DomainError::InvalidInput)
        ));
    }

    #[test]
    fn project_ball_and_halfspace_like_box() {
        let d = unit_ball();
        let q = d.project_to_closure(&Point::of3(2.0, 0.0, 0.0)).unwrap();
        assert!(q.dist(&Point::of3(1.0, 0.0, 0.0)) < 1e-8);
        // Interior points project to themselves.
        let p = Point::of3(0.3, -0.2, 0.1);
        assert_eq!(d.project_to_closure(&p).unwrap(), p);

        // Half-space behaviour via a box face: project (0.3, -0.1) onto x2 ≥ 0
        // modeled as box [-10,10]×[0,10].
        let bx = ImplicitDomain::new(
            "halfspace",
            2,
            Shape::Box { min: Point::of2(-10.0, 0.0), max: Point::of2(10.0, 10.0) },
            Point::of2(-10.0, 0.0),
            Point::of2(10.0, 10.0),
        );
        let q = bx.project_to_closure(&Point::of2(0.3, -0.1)).unwrap();
        assert!(q.dist(&Point::of2(0.3, 0.0)) < 1e-8);
    }

    #[test]
    fn projection_is_idempotent() {
        let d = catalog_domain("eroded_cube").unwrap();
        let mut rng = trial_rng(3, 0);
        for _ in 0..200 {
            let p = uniform_in_box(&mut rng, &(d.bbox_min * 1.3), &(d.bbox_max * 1.3));
            if let Ok(q) = d.project_to_closure(&p) {
                let q2 = d.project_to_closure(&q).unwrap();
                assert!(q.dist(&q2) <= 1e-10, "projection not idempotent: {q:?} -> {q2:?}");
                assert!(d.phi(&q) <= PROJ_TOL);
            }
        }
    }

    #[test]
    fn convex_projection_matches_analytic() {
        let d = unit_ball();
        let mut rng = trial_rng(4, 0);
        for _ in 0..200 {
            let p = uniform_in_box(
                &mut rng,
                &Point::from_slice(&[-2.0, -2.0, -2.0]),
                &Point::from_slice(&[2.0, 2.0, 2.0]),
            );
            if p.norm() <= 1.0 {
                continue;
            }
            let q = d.project_to_closure(&p).unwrap();
            let exact = p * (1.0 / p.norm());
            assert!(q.dist(&exact) < 1e-8, "ball projection off by {}", q.dist(&exact));
        }
    }

    #[test]
    fn tangent_balls_projection_matches_brute_force() {
        // Project (0,0,0.5), inside the removed upper ball, and compare with a
        // dense sample of the removed ball's boundary sphere.
        let d = catalog_domain("tangent_balls_removed").unwrap();
        let p = Point::of3(0.0, 0.0, 0.5);
        let q = d.project_to_closure(&p).unwrap();
        let c = Point::of3(0.0, 0.0, 1.0);
        let mut best = f64::INFINITY;
        let mut rng = trial_rng(5, 0);
        for _ in 0..1_000_000 {
            let dir = crate::rng::unit_vec(&mut rng, 3);
            let s = c + dir; // radius-1 sphere around the removed ball center
            if d.phi(&s) <= 1e-9 {
                best = best.min(p.dist(&s));
            }
        }
        // Post-condition of projection: no sampled closure point is closer
        // (one-sided; the random sphere sample itself overshoots by its own
        // angular granularity, bounded here by 1e-4).
        assert!(d.phi(&q) <= 1e-9, "projection landed outside the closure");
        assert!(
            p.dist(&q) <= best + 1e-6,
            "projection distance {} beats no sampled point ({})",
            p.dist(&q),
            best
        );
        assert!(
            best - p.dist(&q) <= 1e-4,
            "projection much worse than brute force: {} vs {}",
            p.dist(&q),
            best
        );
        // The projected point must be the removed ball's tangency-side
        // surface point (0,0,0) here.
        assert!(q.dist(&Point::zeros(3)) < 1e-6);
    }

    #[test]
    fn normals() {
        let d = unit_ball();
        let n = d.outward_normal(&Point::of3(0.0, 1.0, 0.0)).unwrap();
        assert!(n.dist(&Point::of3(0.0, 1.0, 0.0)) < 1e-12);

        let bx = catalog_domain("box").unwrap();
        let n = bx.outward_normal(&Point::of3(1.0, 0.2, -0.3)).unwrap();
        assert!(n.dist(&Point::of3(1.0, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn doorknob_neck_normal_matches_finite_differences() {
        let d = catalog_domain("doorknob").unwrap();
        let p = Point::of3(1.0, 1.0, 0.0);
        assert!(d.phi(&p).abs() < 1e-12, "point should be on the neck surface");
        let n = d.outward_normal(&p).unwrap();
        // Finite-difference gradient oracle.
        let h = 1e-6;
        let mut fd = Point::zeros(3);
        for i in 0..3 {
            let mut a = p;
            let mut b = p;
            a[i] += h;
            b[i] -= h;
            fd[i] = (d.phi(&a) - d.phi(&b)) / (2.0 * h);
        }
        let fd = fd * (1.0 / fd.norm());
        assert!(n.dist(&fd) < 1e-6, "normal {n:?} vs fd {fd:?}");
        // Points into the removed solid: toward the axis.
        assert!(n[1] < -0.9);
    }

    #[test]
    fn doorknob_matches_set_definition() {
        let d = catalog_domain("doorknob").unwrap();
        let inside_box_outside_solid = Point::of3(5.0, 5.0, 5.0);
        assert!(d.phi(&inside_box_outside_solid) < 0.0);
        // On the neck surface at x = 1: r = 1.
        assert!(d.phi(&Point::of3(1.0, 0.0, 1.0)).abs() < 1e-12);
        // Inside the knob bulge at x = 2.25: r² < 2.25.
        assert!(d.phi(&Point::of3(2.25, 1.0, 0.0)) > 0.0);
        // Beyond the knob tip.
        assert!(d.phi(&Point::of3(3.1, 0.5, 0.0)) < 0.0);
    }

    #[test]
    fn csg_difference_sign_agrees_with_membership() {
        // D = B(0,1) \ B((0.5,0,0), 0.4): φ = max(φ1, -φ2) must agree in sign
        // with direct membership on random points.
        let b1 = Shape::Ball { center: Point::zeros(3), radius: 1.0 };
        let b2 = Shape::Ball { center: Point::of3(0.5, 0.0, 0.0), radius: 0.4 };
        let d = ImplicitDomain::new(
            "diff",
            3,
            Shape::Difference(Box::new(b1), Box::new(b2)),
            Point::from_slice(&[-1.0; 3]),
            Point::from_slice(&[1.0; 3]),
        );
        let mut rng = trial_rng(6, 0);
        for _ in 0..100_000 {
            let p = uniform_in_box(
                &mut rng,
                &Point::from_slice(&[-1.2; 3]),
                &Point::from_slice(&[1.2; 3]),
            );
            let member = p.norm() < 1.0 && p.dist(&Point::of3(0.5, 0.0, 0.0)) > 0.4;
            let v = d.phi(&p);
            if v.abs() < 1e-12 {
                continue;
            }
            assert_eq!(member, v < 0.0, "sign mismatch at {p:?}");
        }
    }

    #[test]
    fn make_domain_rejects_bad_input() {
        assert!(matches!(catalog_domain("no_such"), Err(DomainError::UnknownDomain(_))));
        assert!(matches!(
            catalog_domain_with("cuboid_appendage", &[("l", -3.0)]),
            Err(DomainError::InvalidParameters(..))
        ));
    }

    #[test]
    fn regularity_ball_vs_slit() {
        let ball = unit_ball();
        let rep = ball.estimate_regularity(300, 11).unwrap();
        assert!(rep.r_ext >= 0.9, "convex domain should pass large exterior spheres, got {}", rep.r_ext);
        assert!(rep.reach_estimate > 0.1);

        let slit = catalog_domain("slit_disk").unwrap();
        let rep = slit.estimate_regularity(300, 11).unwrap();
        assert!(
            rep.r_ext < 0.02,
            "slit forces tiny exterior sphere radius, got {}",
            rep.r_ext
        );
    }

    #[test]
    fn regularity_tangent_balls_cone_fails() {
        let d = catalog_domain("tangent_balls_removed").unwrap();
        let rep = d.estimate_regularity(400, 13).unwrap();
        assert!(rep.reach_estimate > 0.0, "tangent balls still have positive reach");
        // The interior cone test must fail near the tangency point: the
        // passing angle can only be tiny (or the grid is exhausted).
        assert!(
            rep.cone_alpha <= std::f64::consts::FRAC_PI_8,
            "cone angle should be small near the pinch, got {}",
            rep.cone_alpha
        );
    }

    #[test]
    fn eroded_cube_pinch_plane_is_nonnegative() {
        // On the plane y = 0 with |z| ≤ 1/2 the field satisfies φ = |x| ≥ 0:
        // the two removed families leave no open channel.
        let d = catalog_domain("eroded_cube").unwrap();
        for &x in &[-0.3, -0.01, 0.0, 0.01, 0.3] {
            for &z in &[0.0, 0.2, 0.45] {
                let v = d.phi(&Point::of3(x, 0.0, z));
                assert!(v >= -1e-12, "phi({x},0,{z}) = {v}");
                assert!((v - x.abs()).abs() < 1e-9);
            }
        }
        // Just above the family the channel opens.
        assert!(d.phi(&Point::of3(0.0, 0.0, 0.6)) < 0.0);
    }
}
