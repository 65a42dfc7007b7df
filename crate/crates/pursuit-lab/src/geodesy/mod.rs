//! Intrinsic distances and geodesic polylines in implicit domains.
//!
//! Geodesics are computed by iterative polyline shortening: every interior
//! vertex moves toward the midpoint of its neighbors and is then projected
//! back into a thin interior clearance band {φ ≤ -h}, coarse-to-fine, with
//! periodic resampling to uniform arc length. Moves are accepted only if they
//! do not increase the local length, so the length sequence is nonincreasing
//! sweep by sweep.
//!
//! Intrinsic distance is the infimum over arcs inside the *open* domain. A
//! converged polyline is therefore certified by a push-off test: wherever a
//! dense sample of the polyline leaves the clearance band, it must be movable
//! back into the band by a displacement of at most `PUSH_OFF_FACTOR · h`.
//! Chords that sag slightly inward while hugging a smooth boundary pass the
//! test; paths that thread a pinch (two boundary sheets meeting along a
//! contact set, where nearby in-domain curves simply do not exist) need a
//! push-off on the order of √h and are rejected. Uncertified local minima are
//! discarded by the multi-seed search.

pub mod oracle;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{DomainError, ImplicitDomain};
use crate::geom::Point;
use crate::rng::{trial_rng, unit_vec};
use rand::Rng;

/// Push-off certificate budget, in units of the clearance h.
pub const PUSH_OFF_FACTOR: f64 = 50.0;
/// Loops and paths shorter than this are treated as collapsed/degenerate.
pub const COLLAPSE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GeodesyError {
    #[error("path must have at least {0} vertices")]
    TooFewVertices(usize),
    #[error("degenerate path/loop (length < {COLLAPSE_TOL:e})")]
    DegenerateLoop,
    #[error("no initial path could be projected into the domain")]
    AllSeedsFailed,
    #[error("two geodesics of equal length but diverging directions (lengths {0} and {1})")]
    AmbiguousGeodesic(f64, f64),
    #[error("geodesic longer than the configured uniqueness horizon")]
    HorizonExceeded,
    #[error("endpoints mismatch for concatenation")]
    ConcatMismatch,
    #[error("grid exceeds configured cell cap")]
    GridTooLarge,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// An arc-length parametrized polyline in D̄ (open or closed).
#[derive(Debug, Clone, Serialize)]
pub struct Path {
    verts: Vec<Point>,
    cum: Vec<f64>,
    closed: bool,
}

impl Path {
    /// Build from vertices. For closed paths the closing segment from the
    /// last vertex back to the first is implicit (do not repeat the first).
    pub fn new(verts: Vec<Point>, closed: bool) -> Result<Self, GeodesyError> {
        if verts.len() < 2 {
            return Err(GeodesyError::TooFewVertices(2));
        }
        let mut p = Path { verts, cum: Vec::new(), closed };
        p.recompute_lengths();
        Ok(p)
    }

    pub fn segment(a: Point, b: Point) -> Self {
        Path::new(vec![a, b], false).unwrap()
    }

    fn recompute_lengths(&mut self) {
        let n = self.verts.len();
        self.cum.clear();
        self.cum.reserve(n + 1);
        self.cum.push(0.0);
        let mut acc = 0.0;
        for i in 1..n {
            acc += self.verts[i].dist(&self.verts[i - 1]);
            self.cum.push(acc);
        }
        if self.closed {
            acc += self.verts[0].dist(&self.verts[n - 1]);
            self.cum.push(acc);
        }
    }

    #[inline]
    pub fn verts(&self) -> &[Point] {
        &self.verts
    }

    #[inline]
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.verts[0].dim()
    }

    /// Total length (including the closing segment for closed paths).
    pub fn length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Cumulative arc lengths (one entry per vertex; closed paths carry an
    /// extra final entry equal to the total length).
    pub fn cumulative_lengths(&self) -> &[f64] {
        &self.cum
    }

    /// Point at arc-length parameter s. Closed paths wrap modulo the length;
    /// open paths clamp to the ends.
    pub fn point_at(&self, s: f64) -> Point {
        let total = self.length();
        if total <= 0.0 {
            return self.verts[0];
        }
        let s = if self.closed {
            s.rem_euclid(total)
        } else {
            s.clamp(0.0, total)
        };
        // cum is sorted; find segment containing s.
        let idx = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let idx = idx.min(self.cum.len() - 2);
        let seg_len = self.cum[idx + 1] - self.cum[idx];
        let a = self.verts[idx];
        let b = self.verts[(idx + 1) % self.verts.len()];
        if seg_len <= 0.0 {
            a
        } else {
            a.lerp(&b, (s - self.cum[idx]) / seg_len)
        }
    }

    /// Resample to n vertices equally spaced in arc length. Endpoints of an
    /// open path are preserved exactly.
    pub fn resample(&self, n: usize) -> Result<Path, GeodesyError> {
        if n < 2 || (self.closed && n < 3) {
            return Err(GeodesyError::TooFewVertices(if self.closed { 3 } else { 2 }));
        }
        let total = self.length();
        if total < COLLAPSE_TOL {
            return Err(GeodesyError::DegenerateLoop);
        }
        let mut verts = Vec::with_capacity(n);
        if self.closed {
            for k in 0..n {
                verts.push(self.point_at(total * k as f64 / n as f64));
            }
        } else {
            for k in 0..n {
                verts.push(self.point_at(total * k as f64 / (n - 1) as f64));
            }
            verts[0] = self.verts[0];
            *verts.last_mut().unwrap() = *self.verts.last().unwrap();
        }
        Path::new(verts, self.closed)
    }

    /// Arc-length parameter of the vertex nearest (in Euclidean distance) to p.
    pub fn nearest_param(&self, p: &Point) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for (i, v) in self.verts.iter().enumerate() {
            let d = v.dist(p);
            if d < best.0 {
                best = (d, self.cum[i]);
            }
        }
        best.1
    }

    /// Euclidean distance from p to the polyline (over segments, not just
    /// vertices).
    pub fn euclid_dist_to(&self, p: &Point) -> f64 {
        let n = self.verts.len();
        let m = if self.closed { n } else { n - 1 };
        let mut best = f64::INFINITY;
        for i in 0..m {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let ab = b - a;
            let len2 = ab.norm_sq();
            let t = if len2 > 0.0 { ((*p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            best = best.min(p.dist(&(a + ab * t)));
        }
        best
    }

    /// Nearest point on the polyline (over segments) to p.
    pub fn nearest_point(&self, p: &Point) -> Point {
        let n = self.verts.len();
        let m = if self.closed { n } else { n - 1 };
        let mut best = (f64::INFINITY, self.verts[0]);
        for i in 0..m {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let ab = b - a;
            let len2 = ab.norm_sq();
            let t = if len2 > 0.0 { ((*p - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let q = a + ab * t;
            let d = p.dist(&q);
            if d < best.0 {
                best = (d, q);
            }
        }
        best.1
    }

    /// Verify the Lipschitz-1 arc-length parametrization on sampled pairs:
    /// |P(s) - P(t)| ≤ |s - t| (+slack).
    pub fn is_lipschitz_1(&self, n_pairs: usize, slack: f64) -> bool {
        let total = self.length();
        for k in 0..n_pairs {
            let s = total * (k as f64 + 0.5) / n_pairs as f64;
            for j in 0..4 {
                let t = total * (j as f64 + 0.25) / 4.0;
                if self.point_at(s).dist(&self.point_at(t)) > (s - t).abs() + slack {
                    return false;
                }
            }
        }
        true
    }

    /// Write one vertex per row: s, x1..xd (CSV, stable format).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "s")?;
        for i in 0..self.dim() {
            write!(w, ",x{}", i + 1)?;
        }
        writeln!(w)?;
        for (i, v) in self.verts.iter().enumerate() {
            write!(w, "{}", self.cum[i])?;
            for c in v.coords() {
                write!(w, ",{c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Write one vertex per line as JSON {"s": .., "x": [..]}.
    pub fn write_jsonl<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (i, v) in self.verts.iter().enumerate() {
            let line = serde_json::json!({ "s": self.cum[i], "x": v.coords() });
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Sum of segment lengths.
pub fn path_length(path: &Path) -> f64 {
    path.length()
}

/// Tuning knobs for the geodesic engine.
#[derive(Debug, Clone)]
pub struct GeodesyParams {
    /// Interior clearance as a fraction of the bounding-box diagonal.
    pub clearance_rel: f64,
    /// Vertices per unit length at the finest level.
    pub verts_per_unit: f64,
    pub max_verts: usize,
    pub min_verts: usize,
    /// Total sweep budget across all levels.
    pub max_iters: usize,
    /// Relative length-change convergence tolerance at the finest level.
    pub rel_tol: f64,
    /// Number of random detour seeds (beyond chord and axis detours).
    pub random_seeds: usize,
    /// v = z cutoff for pursuit direction.
    pub dir_tol: f64,
    /// Relative length tie tolerance for ambiguity detection.
    pub tie_tol: f64,
    /// Direction divergence (radians) flagged as ambiguous.
    pub ambiguous_angle: f64,
    /// Uniqueness horizon (π/√κ̂ when a curvature estimate is set).
    pub horizon: f64,
}

impl Default for GeodesyParams {
    fn default() -> Self {
        GeodesyParams {
            clearance_rel: 1e-6,
            verts_per_unit: 256.0,
            max_verts: 8192,
            min_verts: 16,
            max_iters: 10_000,
            rel_tol: 1e-10,
            random_seeds: 2,
            dir_tol: 1e-7,
            tie_tol: 1e-6,
            ambiguous_angle: 0.1,
            horizon: f64::INFINITY,
        }
    }
}

impl GeodesyParams {
    /// Coarser, cheaper settings for inner loops (hot pursuit, Hausdorff
    /// fallbacks) where millimetric precision is not needed.
    pub fn fast() -> Self {
        GeodesyParams {
            verts_per_unit: 64.0,
            max_verts: 512,
            rel_tol: 1e-8,
            random_seeds: 0,
            ..GeodesyParams::default()
        }
    }

    pub fn clearance(&self, domain: &ImplicitDomain) -> f64 {
        self.clearance_rel * domain.bbox_diag()
    }

    fn target_verts(&self, len: f64) -> usize {
        ((len * self.verts_per_unit).round() as usize)
            .clamp(self.min_verts, self.max_verts)
    }
}

/// Result of a shortening run.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicResult {
    pub path: Path,
    pub length: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Final relative length change per sweep block.
    pub residual: f64,
    /// Push-off certificate: the polyline is approximable by arcs inside the
    /// open domain (see module docs). Uncertified results are not valid
    /// intrinsic-distance witnesses.
    pub interior_certified: bool,
    /// Loop shortening only: the loop contracted below [`COLLAPSE_TOL`].
    pub collapsed: bool,
}

/// Move p into the clearance band {φ ≤ -h}. Points already inside deeper than
/// h are returned unchanged.
fn clamp_inside(domain: &ImplicitDomain, p: &Point, h: f64) -> Option<Point> {
    if domain.phi(p) <= -h {
        return Some(*p);
    }
    domain.descend_to_level(p, -1.5 * h, 0.4 * h, 60).ok()
}

/// One Gauss-Seidel shortening sweep. Returns the new total length.
/// Accept-only-improving vertex moves keep the sweep monotone.
fn sweep(domain: &ImplicitDomain, verts: &mut [Point], closed: bool, h: f64) {
    let n = verts.len();
    let (lo, hi) = if closed { (0, n) } else { (1, n - 1) };
    for i in lo..hi {
        let prev = verts[(i + n - 1) % n];
        let next = verts[(i + 1) % n];
        let cur = verts[i];
        let mid = prev.lerp(&next, 0.5);
        if let Some(cand) = clamp_inside(domain, &mid, h) {
            let old_len = prev.dist(&cur) + cur.dist(&next);
            let new_len = prev.dist(&cand) + cand.dist(&next);
            if new_len <= old_len + 1e-15 * (1.0 + old_len) {
                verts[i] = cand;
            }
        }
    }
}

fn polyline_len(verts: &[Point], closed: bool) -> f64 {
    let mut acc = 0.0;
    for i in 1..verts.len() {
        acc += verts[i].dist(&verts[i - 1]);
    }
    if closed {
        acc += verts[0].dist(&verts[verts.len() - 1]);
    }
    acc
}

/// Extra per-vertex constraint applied after the clearance projection
/// (tube constraints in the stability tests use this hook).
pub type VertexConstraint<'a> = dyn Fn(&Point) -> Option<Point> + 'a;

/// Core shortening loop shared by paths and loops. `constraint`, when given,
/// re-projects vertices after each resample (e.g. into a tube).
pub fn shorten_core(
    domain: &ImplicitDomain,
    path: &Path,
    params: &GeodesyParams,
    constraint: Option<&VertexConstraint>,
) -> Result<GeodesicResult, GeodesyError> {
    let h = params.clearance(domain);
    let closed = path.is_closed();

    // Project the seed into the clearance band (endpoints of open paths are
    // only required to lie in the closure).
    let mut verts = path.verts().to_vec();
    let (lo, hi) = if closed { (0, verts.len()) } else { (1, verts.len() - 1) };
    for v in &mut verts[lo..hi] {
        *v = clamp_inside(domain, v, h).ok_or(GeodesyError::AllSeedsFailed)?;
        if let Some(c) = constraint {
            *v = c(v).ok_or(GeodesyError::AllSeedsFailed)?;
        }
    }
    if !closed {
        let n = verts.len();
        verts[0] = domain.project_to_closure(&verts[0])?;
        verts[n - 1] = domain.project_to_closure(&verts[n - 1])?;
    }

    let mut total_iters = 0usize;
    let mut collapsed = false;
    let mut residual = f64::INFINITY;

    let final_n = params.target_verts(polyline_len(&verts, closed));
    let mut level_n = 32.min(final_n).max(if closed { 8 } else { 2 });

    'levels: loop {
        let at_final = level_n >= final_n;
        let tol = if at_final { params.rel_tol } else { 1e-8 };
        // Resample to the level resolution.
        let cur = Path::new(verts.clone(), closed)?;
        if cur.length() < COLLAPSE_TOL {
            collapsed = true;
            break;
        }
        let resampled = cur.resample(level_n.min(params.target_verts(cur.length())))?;
        verts = resampled.verts().to_vec();
        let (lo, hi) = if closed { (0, verts.len()) } else { (1, verts.len() - 1) };
        for v in &mut verts[lo..hi] {
            if let Some(q) = clamp_inside(domain, v, h) {
                *v = q;
            }
            if let Some(c) = constraint {
                if let Some(q) = c(v) {
                    *v = q;
                }
            }
        }

        let mut len = polyline_len(&verts, closed);
        loop {
            if total_iters >= params.max_iters {
                break 'levels;
            }
            // A block of sweeps between resamples.
            let mut block_prev = len;
            for _ in 0..10 {
                sweep(domain, &mut verts, closed, h);
                total_iters += 1;
                let new_len = polyline_len(&verts, closed);
                debug_assert!(
                    new_len <= block_prev * (1.0 + 1e-12) + 1e-15,
                    "shortening sweep increased length: {block_prev} -> {new_len}"
                );
                block_prev = new_len;
            }
            let new_len = polyline_len(&verts, closed);
            if new_len < COLLAPSE_TOL {
                collapsed = true;
                break 'levels;
            }
            residual = (len - new_len).abs() / new_len.max(COLLAPSE_TOL);
            len = new_len;
            // Resample within the level to keep spacing uniform.
            let cur = Path::new(verts.clone(), closed)?;
            let n_now = level_n.min(params.target_verts(cur.length()));
            if let Ok(r) = cur.resample(n_now) {
                verts = r.verts().to_vec();
                let (lo, hi) = if closed { (0, verts.len()) } else { (1, verts.len() - 1) };
                for v in &mut verts[lo..hi] {
                    if let Some(q) = clamp_inside(domain, v, h) {
                        *v = q;
                    }
                    if let Some(c) = constraint {
                        if let Some(q) = c(v) {
                            *v = q;
                        }
                    }
                }
                len = polyline_len(&verts, closed);
            }
            if residual < tol {
                break;
            }
        }
        if at_final {
            break;
        }
        level_n = (level_n * 2).min(final_n);
    }

    let mut out = Path::new(verts, closed)?;
    let mut interior_certified = false;
    if !collapsed {
        match certify_polish(domain, &out, h) {
            Some(polished) => {
                interior_certified = true;
                out = polished;
            }
            None => interior_certified = false,
        }
    }
    let length = out.length();
    Ok(GeodesicResult {
        length,
        converged: residual <= params.rel_tol * 10.0 || collapsed,
        iterations: total_iters,
        residual,
        interior_certified,
        collapsed,
        path: out,
    })
}

/// Maximum subdivision depth of the certificate polish.
const CERT_MAX_DEPTH: usize = 14;
/// Relative length growth at which the polish declares the path
/// non-approximable (a pinch crossing blows up under refinement).
const CERT_GROWTH_BUDGET: f64 = 0.02;

/// Push-off certificate with corner polishing.
///
/// Offending segment samples (φ > -h/2) are moved into the clearance band and
/// inserted as new vertices; refinement repeats until the polyline is clean.
/// A path hugging a smooth or convex-corner boundary converges in a few
/// rounds with negligible length growth; a path threading a pinch cannot be
/// repaired (the push-off either fails outright or inflates the length) and
/// is rejected. On success the refined polyline itself is the witness.
pub fn certify_polish(domain: &ImplicitDomain, path: &Path, h: f64) -> Option<Path> {
    let base_len = path.length();
    if base_len <= 0.0 {
        return None;
    }
    let abs_budget = base_len * CERT_GROWTH_BUDGET + 100.0 * h;
    let mut verts = path.verts().to_vec();
    let closed = path.is_closed();
    for _ in 0..CERT_MAX_DEPTH {
        let n = verts.len();
        let m = if closed { n } else { n - 1 };
        let mut next = Vec::with_capacity(2 * n);
        let mut clean = true;
        for i in 0..m {
            let a = verts[i];
            let b = verts[(i + 1) % n];
            next.push(a);
            let seg = a.dist(&b);
            // Probe up to three interior samples per segment.
            let probes = if seg > (2.0 * h).sqrt() { 3 } else { 1 };
            let mut worst: Option<(f64, Point)> = None;
            for k in 1..=probes {
                let p = a.lerp(&b, k as f64 / (probes + 1) as f64);
                let v = domain.phi(&p);
                if v > -0.5 * h && worst.as_ref().map_or(true, |(w, _)| v > *w) {
                    worst = Some((v, p));
                }
            }
            if let Some((_, p)) = worst {
                clean = false;
                // Push the offending sample into the band; an unpushable
                // sample means no nearby in-domain curve exists. Pushes far
                // beyond any geometric sag of the segment are rejected
                // outright; pinch crossings that push successfully still
                // never come clean and run into the depth/growth caps.
                let q = domain.descend_to_level(&p, -1.5 * h, 0.4 * h, 60).ok()?;
                if q.dist(&p) > 0.75 * seg + PUSH_OFF_FACTOR * h {
                    return None;
                }
                next.push(q);
            }
        }
        if !closed {
            next.push(verts[n - 1]);
        }
        verts = next;
        let len = polyline_len(&verts, closed);
        if len > base_len + abs_budget {
            return None;
        }
        if clean {
            return Path::new(verts, closed).ok();
        }
    }
    None
}

/// Non-polishing certificate check (used by the chord fast path).
pub fn certify_interior(domain: &ImplicitDomain, path: &Path, h: f64) -> bool {
    certify_polish(domain, path, h).is_some()
}

/// Shorten an open path with fixed endpoints to a local geodesic.
pub fn shorten_path(
    domain: &ImplicitDomain,
    path: &Path,
    params: &GeodesyParams,
) -> Result<GeodesicResult, GeodesyError> {
    if path.is_closed() {
        return Err(GeodesyError::TooFewVertices(2));
    }
    let before = path.length();
    let res = shorten_core(domain, path, params, None)?;
    debug_assert!(res.length <= before * (1.0 + 1e-9) + 1e-12);
    Ok(res)
}

/// Local-geodesic test: moving any single vertex by step `h_step` along the
/// 2d axis directions (then projecting into the domain) must not shorten the
/// path by more than `h_step² · curvature_budget`.
pub fn is_locally_geodesic(
    domain: &ImplicitDomain,
    path: &Path,
    h_step: f64,
    curvature_budget: f64,
) -> bool {
    let h = 1e-6 * domain.bbox_diag();
    let n = path.verts().len();
    let closed = path.is_closed();
    let (lo, hi) = if closed { (0, n) } else { (1, n - 1) };
    let gain_allowed = h_step * h_step * curvature_budget;
    for i in lo..hi {
        let prev = path.verts()[(i + n - 1) % n];
        let next = path.verts()[(i + 1) % n];
        let cur = path.verts()[i];
        let base = prev.dist(&cur) + cur.dist(&next);
        for axis in 0..cur.dim() {
            for sign in [-1.0, 1.0] {
                let mut moved = cur;
                moved[axis] += sign * h_step;
                let Some(moved) = clamp_inside(domain, &moved, h) else { continue };
                let len = prev.dist(&moved) + moved.dist(&next);
                if len < base - gain_allowed {
                    return false;
                }
            }
        }
    }
    true
}

/// Seed polylines for a multi-seed geodesic search between v and z.
fn build_seeds(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    params: &GeodesyParams,
    local_only: bool,
) -> Vec<Path> {
    let mut seeds = Vec::new();
    let chord = Path::new(vec![*v, *z], false).unwrap();
    seeds.push(chord.resample(9).unwrap());

    let mid = v.lerp(z, 0.5);
    let dist = v.dist(z);
    let d = v.dim();
    let mut scales = vec![0.6 * dist];
    if !local_only {
        scales.push(0.25 * domain.bbox_diag());
    }
    for axis in 0..d {
        for sign in [1.0, -1.0] {
            for &s in &scales {
                let mut w = mid;
                w[axis] += sign * s;
                seeds.push(Path::new(vec![*v, w, *z], false).unwrap().resample(9).unwrap());
            }
        }
    }
    if !local_only {
        let mut rng = trial_rng(0x9e0d_e51c, 0);
        for _ in 0..params.random_seeds {
            let dir = unit_vec(&mut rng, d);
            let w = mid + dir * (rng.gen::<f64>() * 0.8 * dist.max(0.2 * domain.bbox_diag()));
            seeds.push(Path::new(vec![*v, w, *z], false).unwrap().resample(9).unwrap());
        }
    }
    seeds
}

/// All certified local geodesics found from the seed family, sorted by length.
pub fn geodesic_candidates(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    params: &GeodesyParams,
    local_only: bool,
) -> Vec<GeodesicResult> {
    let mut out: Vec<GeodesicResult> = build_seeds(domain, v, z, params, local_only)
        .iter()
        .filter_map(|s| shorten_core(domain, s, params, None).ok())
        .filter(|r| r.converged && r.interior_certified)
        .collect();
    out.sort_by(|a, b| a.length.partial_cmp(&b.length).unwrap());
    out
}

/// Intrinsic distance dist_I(v, z): minimum over a multi-seed geodesic search
/// run in both directions.
pub fn intrinsic_distance(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    params: &GeodesyParams,
) -> Result<f64, GeodesyError> {
    if v.dist(z) <= params.dir_tol {
        return Ok(0.0);
    }
    let fwd = geodesic_candidates(domain, v, z, params, false);
    let bwd = geodesic_candidates(domain, z, v, params, false);
    let best = fwd
        .iter()
        .chain(bwd.iter())
        .map(|r| r.length)
        .fold(f64::INFINITY, f64::min);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(GeodesyError::AllSeedsFailed)
    }
}

/// Chord fast path: if the straight segment between two closure points passes
/// the push-off certificate, the intrinsic distance equals the Euclidean one
/// up to O(h). Returns None when the chord is not certifiable.
pub fn chord_certified_distance(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    params: &GeodesyParams,
) -> Option<f64> {
    let h = params.clearance(domain);
    let chord = Path::new(vec![*v, *z], false).ok()?;
    let n = ((v.dist(z) / (2.0 * h).sqrt()).ceil() as usize).clamp(2, 1024);
    let chord = chord.resample(n).ok()?;
    if certify_interior(domain, &chord, h) {
        Some(v.dist(z))
    } else {
        None
    }
}

/// Intrinsic distance with the chord fast path, falling back to a local
/// geodesic search. Used by inner loops (Hausdorff, pursuit integration).
pub fn intrinsic_distance_fast(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    params: &GeodesyParams,
) -> Result<f64, GeodesyError> {
    if v.dist(z) <= params.dir_tol {
        return Ok(0.0);
    }
    if let Some(d) = chord_certified_distance(domain, v, z, params) {
        return Ok(d);
    }
    let cands = geodesic_candidates(domain, v, z, params, true);
    cands.first().map(|r| r.length).ok_or(GeodesyError::AllSeedsFailed)
}

/// Unit tangent at v of the geodesic from v to z (the pursuit direction).
/// Returns the zero vector when v and z coincide within `dir_tol`.
pub fn pursuit_direction(
    domain: &ImplicitDomain,
    v: &Point,
    z: &Point,
    params: &GeodesyParams,
) -> Result<Point, GeodesyError> {
    if v.dist(z) <= params.dir_tol {
        return Ok(Point::zeros(v.dim()));
    }
    let cands = geodesic_candidates(domain, v, z, params, false);
    let Some(best) = cands.first() else {
        return Err(GeodesyError::AllSeedsFailed);
    };
    if best.length > params.horizon {
        return Err(GeodesyError::HorizonExceeded);
    }
    let dir = tangent_at_start(&best.path);
    // Ambiguity: a near-tie in length with a diverging start direction.
    for other in cands.iter().skip(1) {
        if (other.length - best.length).abs() <= params.tie_tol * best.length.max(1e-12) {
            let dir2 = tangent_at_start(&other.path);
            let cos = dir.dot(&dir2).clamp(-1.0, 1.0);
            if cos.acos() > params.ambiguous_angle {
                return Err(GeodesyError::AmbiguousGeodesic(best.length, other.length));
            }
        }
    }
    Ok(dir)
}

fn tangent_at_start(path: &Path) -> Point {
    let v0 = path.verts()[0];
    let v1 = path.verts()[1];
    (v1 - v0).normalized_or_zero(1e-300)
}

/// Intrinsic Hausdorff distance between the vertex samples of two paths.
///
/// Exact over the sampled vertex sets: for each sample the candidate set is
/// scanned in order of Euclidean distance, and since dist_I ≥ Euclidean the
/// scan stops once no remaining candidate can beat the best intrinsic value.
pub fn intrinsic_hausdorff(
    domain: &ImplicitDomain,
    a: &Path,
    b: &Path,
    params: &GeodesyParams,
) -> Result<f64, GeodesyError> {
    let d1 = directed_hausdorff(domain, a, b, params)?;
    let d2 = directed_hausdorff(domain, b, a, params)?;
    Ok(d1.max(d2))
}

fn directed_hausdorff(
    domain: &ImplicitDomain,
    a: &Path,
    b: &Path,
    params: &GeodesyParams,
) -> Result<f64, GeodesyError> {
    let mut sup = 0.0f64;
    for p in a.verts() {
        // Candidates ordered by Euclidean distance.
        let mut order: Vec<(f64, &Point)> = b.verts().iter().map(|q| (p.dist(q), q)).collect();
        order.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut best = f64::INFINITY;
        for (eucl, q) in order {
            if eucl >= best {
                break;
            }
            let d = intrinsic_distance_fast(domain, p, q, params)?;
            best = best.min(d);
        }
        sup = sup.max(best);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::catalog_domain;

    fn params() -> GeodesyParams {
        GeodesyParams::default()
    }

    #[test]
    fn path_length_examples() {
        let seg = Path::segment(Point::of2(0.0, 0.0), Point::of2(3.0, 4.0));
        assert!((path_length(&seg) - 5.0).abs() < 1e-12);

        // Unit circle at 256 vertices: inscribed polygon length within 3e-4 of 2π.
        let n = 256;
        let verts: Vec<Point> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::of2(t.cos(), t.sin())
            })
            .collect();
        let circle = Path::new(verts, true).unwrap();
        assert!((circle.length() - 2.0 * std::f64::consts::PI).abs() < 3e-4);

        // Doubled segment: out and back has twice the length.
        let t = 2.5;
        let out_back = Path::new(
            vec![Point::of2(0.0, 0.0), Point::of2(t, 0.0), Point::of2(0.0, 0.0)],
            false,
        )
        .unwrap();
        assert!((out_back.length() - 2.0 * t).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_parametrization() {
        let n = 128;
        let verts: Vec<Point> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::of2(t.cos(), t.sin())
            })
            .collect();
        let circle = Path::new(verts, true).unwrap();
        assert!(circle.is_lipschitz_1(64, 1e-9));
    }

    #[test]
    fn shorten_in_ball_gives_straight_segment() {
        let d = catalog_domain("ball").unwrap();
        let a = Point::of3(-0.5, 0.0, 0.0);
        let b = Point::of3(0.5, 0.0, 0.0);
        // Detoured initial path.
        let seed = Path::new(vec![a, Point::of3(0.0, 0.6, 0.3), b], false).unwrap();
        let res = shorten_path(&d, &seed, &params()).unwrap();
        assert!(res.converged);
        assert!(res.interior_certified);
        assert!((res.length - 1.0).abs() < 1e-6, "length {}", res.length);
        assert!(is_locally_geodesic(&d, &res.path, 1e-4, 10.0));
    }

    #[test]
    fn intrinsic_distance_convex_equals_euclidean() {
        let d = catalog_domain("ball").unwrap();
        let a = Point::of3(-0.3, 0.4, 0.1);
        let b = Point::of3(0.5, -0.2, -0.3);
        let dist = intrinsic_distance(&d, &a, &b, &params()).unwrap();
        assert!((dist - a.dist(&b)).abs() < 1e-6);
        // Lower bound property.
        assert!(dist >= a.dist(&b) - 1e-9);
    }

    #[test]
    fn eroded_cube_geodesic_goes_over_the_pinch() {
        let d = catalog_domain("eroded_cube").unwrap();
        let a = Point::of3(0.0, 0.1, 0.0);
        let b = Point::of3(0.0, -0.1, 0.0);
        let expected = (1.0f64 + 4.0 * 0.01).sqrt();
        let dist = intrinsic_distance(&d, &a, &b, &params()).unwrap();
        assert!(
            (dist - expected).abs() / expected < 0.01,
            "got {dist}, want {expected} within 1%"
        );
    }

    #[test]
    fn chord_through_pinch_is_rejected() {
        let d = catalog_domain("eroded_cube").unwrap();
        let a = Point::of3(0.0, 0.1, 0.0);
        let b = Point::of3(0.0, -0.1, 0.0);
        assert!(chord_certified_distance(&d, &a, &b, &params()).is_none());
        // A chord on the same side of the pinch is certified.
        let c = Point::of3(0.0, 0.1, 0.3);
        assert!(chord_certified_distance(&d, &a, &c, &params()).is_some());
    }

    #[test]
    fn slit_disk_distance_goes_around_the_slit_end() {
        let d = catalog_domain("slit_disk").unwrap();
        let e = 0.1;
        let a = Point::of2(e, e);
        let b = Point::of2(e, -e);
        let dist = intrinsic_distance(&d, &a, &b, &params()).unwrap();
        // Around the inner end of the slit: roughly 2√(2)·0.1; the slit has a
        // small numerical half-width so allow a few percent.
        let approx = 2.0 * (2.0f64).sqrt() * e;
        assert!(
            dist > 1.5 * (2.0 * e),
            "must exceed the straight crossing 2e = {}, got {dist}",
            2.0 * e
        );
        assert!((dist - approx).abs() / approx < 0.08, "got {dist}, expected about {approx}");
    }

    #[test]
    fn pursuit_direction_basics() {
        let d = catalog_domain("ball").unwrap();
        let v = Point::zeros(3);
        let z = Point::of3(0.0, 0.5, 0.0);
        let dir = pursuit_direction(&d, &v, &z, &params()).unwrap();
        assert!(dir.dist(&Point::of3(0.0, 1.0, 0.0)) < 1e-6);
        assert!((dir.norm() - 1.0).abs() < 1e-9);
        // v = z: zero vector by convention.
        let zero = pursuit_direction(&d, &v, &v, &params()).unwrap();
        assert_eq!(zero.norm(), 0.0);
    }

    #[test]
    fn hausdorff_concentric_circles() {
        let d = catalog_domain_with_radius(5.0);
        let circ = |r: f64| {
            let n = 128;
            let verts: Vec<Point> = (0..n)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    Point::of3(r * t.cos(), r * t.sin(), 0.0)
                })
                .collect();
            Path::new(verts, true).unwrap()
        };
        let a = circ(1.0);
        let b = circ(1.2);
        let dh = intrinsic_hausdorff(&d, &a, &b, &params()).unwrap();
        assert!((dh - 0.2).abs() < 1e-3, "got {dh}");
        assert_eq!(intrinsic_hausdorff(&d, &a, &a, &params()).unwrap(), 0.0);

        // Translated circle: Hausdorff = translation distance.
        let mut verts = a.verts().to_vec();
        for v in &mut verts {
            *v += Point::of3(0.3, 0.0, 0.0);
        }
        let c = Path::new(verts, true).unwrap();
        let dh = intrinsic_hausdorff(&d, &a, &c, &params()).unwrap();
        assert!((dh - 0.3).abs() < 1e-2, "got {dh}");
    }

    fn catalog_domain_with_radius(r: f64) -> ImplicitDomain {
        crate::domain::catalog_domain_with("ball", &[("r", r)]).unwrap()
    }

    #[test]
    fn triangle_inequality_sampled() {
        let d = catalog_domain("eroded_cube").unwrap();
        let pts = [
            Point::of3(0.0, 0.3, 0.0),
            Point::of3(0.5, -0.3, 0.2),
            Point::of3(-0.4, 0.5, -0.5),
        ];
        let p = params();
        let dab = intrinsic_distance(&d, &pts[0], &pts[1], &p).unwrap();
        let dbc = intrinsic_distance(&d, &pts[1], &pts[2], &p).unwrap();
        let dac = intrinsic_distance(&d, &pts[0], &pts[2], &p).unwrap();
        assert!(dac <= dab + dbc + 3.0 * 1e-6);
    }
}
