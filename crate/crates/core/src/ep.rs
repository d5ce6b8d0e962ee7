//! Level degeneracies and exceptional points.
//!
//! A degeneracy sits on the `I = 0` set of the discriminant. Its kind is read
//! off the sign of `R` there: `R < 0` is a level degeneracy (real parts merge,
//! level attraction), `R > 0` a damping degeneracy, and `R = I = 0` an
//! exceptional point. One-dimensional sweeps bracket sign changes of `I` and
//! bisect; planes march the `I = 0` contour cell by cell and bisect `R` along
//! it.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::ray_angle;
use crate::params::Scenario;
use crate::spectrum::{discriminant, eigenmodes, spectrum_at};
use crate::sweep::SweepSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegeneracyKind {
    LevelDegeneracy,
    DampingDegeneracy,
    ExceptionalPoint,
}

impl DegeneracyKind {
    pub fn name(self) -> &'static str {
        match self {
            DegeneracyKind::LevelDegeneracy => "level_degeneracy",
            DegeneracyKind::DampingDegeneracy => "damping_degeneracy",
            DegeneracyKind::ExceptionalPoint => "exceptional_point",
        }
    }

    /// Kind for a point on the `I = 0` set; `None` if `|I| > tol`.
    pub fn classify(r: f64, i: f64, tol: f64) -> Option<Self> {
        if i.abs() > tol {
            None
        } else if r <= -tol {
            Some(DegeneracyKind::LevelDegeneracy)
        } else if r >= tol {
            Some(DegeneracyKind::DampingDegeneracy)
        } else {
            Some(DegeneracyKind::ExceptionalPoint)
        }
    }
}

impl fmt::Display for DegeneracyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyLocus {
    pub kind: DegeneracyKind,
    /// Axis values; one entry for 1-D sweeps, two for planes.
    pub location: Vec<f64>,
    /// `|R|` at the refined point, MHz^2.
    pub r_residual: f64,
    /// `|I|` at the refined point, MHz^2.
    pub i_residual: f64,
    /// Final bracket width per axis.
    pub refinement_width: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpOptions {
    /// Residual tolerance on `R` and `I`, MHz^2.
    pub tol_disc: f64,
    /// Bisection depth cap.
    pub max_depth: usize,
}

impl Default for EpOptions {
    fn default() -> Self {
        EpOptions {
            tol_disc: 1e-9,
            max_depth: 80,
        }
    }
}

fn disc_at(sc: &Scenario) -> Result<(f64, f64)> {
    Ok(discriminant(&sc.model()?))
}

/// True when `H - tr(H)/2` is not (numerically) zero. At `R = I = 0` this
/// separates a defective matrix (exceptional point) from a multiple of the
/// identity (diabolic point).
pub fn is_defective(sc: &Scenario, tol_disc: f64) -> bool {
    sc.model().is_ok_and(|m| {
        let h = m.h_non;
        let half = h.trace() * 0.5;
        let n = h - crate::linalg::Mat2::diag(half, half);
        n.norm() > 10.0 * tol_disc.sqrt()
    })
}

/// Bisect a sign change of `f` on `[a, b]`. Returns the end with the smaller
/// `|f|` and the final bracket width.
fn bisect(mut a: f64, mut b: f64, max_depth: usize, f: impl Fn(f64) -> Option<f64>) -> Option<(f64, f64)> {
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Some((a, 0.0));
    }
    if fb == 0.0 {
        return Some((b, 0.0));
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..max_depth {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Some((m, 0.0));
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let x = if fa.abs() <= fb.abs() { a } else { b };
    Some((x, (b - a).abs()))
}

fn sort_and_dedup(mut loci: Vec<DegeneracyLocus>, merge: &[f64]) -> Vec<DegeneracyLocus> {
    loci.sort_by(|a, b| {
        a.location
            .iter()
            .zip(&b.location)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    });
    let mut out: Vec<DegeneracyLocus> = Vec::with_capacity(loci.len());
    for l in loci {
        let close = |o: &DegeneracyLocus| {
            o.kind == l.kind
                && o.location
                    .iter()
                    .zip(&l.location)
                    .zip(merge)
                    .all(|((x, y), d)| (x - y).abs() <= *d)
        };
        match out.iter_mut().rev().take(8).find(|o| close(o)) {
            Some(o) => {
                if l.r_residual.max(l.i_residual) < o.r_residual.max(o.i_residual) {
                    *o = l;
                }
            }
            None => out.push(l),
        }
    }
    out
}

/// Degeneracies along a 1-D sweep.
///
/// Sign changes of `I` between consecutive nodes are bisected and classified
/// by `R` at the refined point. Stretches where `|I| <= tol` at both nodes are
/// treated as lying on the `I = 0` set, and sign changes of `R` there are
/// bisected into exceptional points. An empty list means nothing was
/// bracketed.
pub fn find_degeneracies_1d(
    base: &Scenario,
    axis: &SweepSpec,
    opts: &EpOptions,
) -> Result<Vec<DegeneracyLocus>> {
    axis.require_len(16)?;
    let tol = opts.tol_disc;
    let eval = |x: f64| -> Option<(f64, f64)> {
        let mut sc = *base;
        axis.axis.apply(&mut sc, x);
        disc_at(&sc).ok()
    };
    let nodes: Vec<Option<(f64, f64)>> = axis.values.iter().map(|&x| eval(x)).collect();
    let mut loci = Vec::new();
    let mut push = |x: f64, width: f64| {
        if let Some((r, i)) = eval(x) {
            let mut sc = *base;
            axis.axis.apply(&mut sc, x);
            let kind = DegeneracyKind::classify(r, i, tol)
                .filter(|k| *k != DegeneracyKind::ExceptionalPoint || is_defective(&sc, tol));
            if let Some(kind) = kind {
                loci.push(DegeneracyLocus {
                    kind,
                    location: vec![x],
                    r_residual: r.abs(),
                    i_residual: i.abs(),
                    refinement_width: vec![width],
                });
            } else {
                log::debug!("bracket at {x} did not refine below tolerance (|I| = {:e})", i.abs());
            }
        }
    };

    for (k, node) in nodes.iter().enumerate() {
        let Some((r, i)) = *node else { continue };
        let on_line = |n: Option<&Option<(f64, f64)>>| matches!(n, Some(Some((_, j))) if j.abs() <= tol);
        let isolated_zero = i.abs() <= tol
            && !on_line(k.checked_sub(1).map(|p| &nodes[p]))
            && !on_line(nodes.get(k + 1));
        if isolated_zero || (i.abs() <= tol && r.abs() <= tol) {
            push(axis.values[k], 0.0);
        }
    }
    for k in 0..axis.len() - 1 {
        let (Some((r0, i0)), Some((r1, i1))) = (nodes[k], nodes[k + 1]) else {
            continue;
        };
        let (a, b) = (axis.values[k], axis.values[k + 1]);
        if i0.abs() <= tol && i1.abs() <= tol {
            if r0.abs() > tol && r1.abs() > tol && r0.signum() != r1.signum() {
                if let Some((x, w)) = bisect(a, b, opts.max_depth, |x| eval(x).map(|v| v.0)) {
                    push(x, w);
                }
            }
        } else if i0.abs() > tol && i1.abs() > tol && i0.signum() != i1.signum() {
            if let Some((x, w)) = bisect(a, b, opts.max_depth, |x| eval(x).map(|v| v.1)) {
                push(x, w);
            }
        }
    }
    let merge = [axis.span().abs() * 1e-9];
    Ok(sort_and_dedup(loci, &merge))
}

/// Damping exchange across a level degeneracy: `delta_gamma` (the signed
/// imaginary gap under the branch rule) changes sign between `x - h` and
/// `x + h`, i.e. the higher-frequency mode swaps from the more to the less
/// damped one.
pub fn damping_exchange(base: &Scenario, axis: &SweepSpec, x: f64, h: f64) -> Result<bool> {
    let gap = |v: f64| {
        let mut sc = *base;
        axis.axis.apply(&mut sc, v);
        spectrum_at(&sc).map(|p| p.delta_gamma)
    };
    Ok(gap(x - h)? * gap(x + h)? < 0.0)
}

/// Contour point on the `I = 0` set inside a plane scan.
#[derive(Debug, Clone, Copy)]
struct ContourPoint {
    u: [f64; 2],
    r: f64,
    width: f64,
}

struct Plane<'a> {
    base: &'a Scenario,
    axis1: &'a SweepSpec,
    axis2: &'a SweepSpec,
    /// Grid spacing per axis, used to scale directions.
    h: [f64; 2],
}

impl Plane<'_> {
    fn eval(&self, u: [f64; 2]) -> Option<(f64, f64)> {
        let mut sc = *self.base;
        self.axis1.axis.apply(&mut sc, u[0]);
        self.axis2.axis.apply(&mut sc, u[1]);
        disc_at(&sc).ok()
    }

    fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    /// Root of component `c` (0 = R, 1 = I) on the segment `a -> b`.
    fn segment_root(&self, a: [f64; 2], b: [f64; 2], c: usize, depth: usize) -> Option<([f64; 2], f64)> {
        let (t, w) = bisect(0.0, 1.0, depth, |t| {
            self.eval(Self::lerp(a, b, t)).map(|v| if c == 0 { v.0 } else { v.1 })
        })?;
        let len = ((b[0] - a[0]) / self.h[0]).hypot((b[1] - a[1]) / self.h[1]);
        Some((Self::lerp(a, b, t), w * len))
    }

    /// Project `p` onto `I = 0` along the normal of the chord `a -> b`,
    /// searching up to `reach` cell sizes either side.
    fn project(&self, p: [f64; 2], a: [f64; 2], b: [f64; 2], reach: f64, depth: usize) -> Option<[f64; 2]> {
        let d = [(b[0] - a[0]) / self.h[0], (b[1] - a[1]) / self.h[1]];
        let n = d[0].hypot(d[1]);
        if n == 0.0 {
            return None;
        }
        let normal = [-d[1] / n * self.h[0], d[0] / n * self.h[1]];
        let (_, ip) = self.eval(p)?;
        if ip == 0.0 {
            return Some(p);
        }
        let mut step = (reach * 1e-3).max(1e-12);
        while step <= reach {
            for s in [1.0, -1.0] {
                let q = [p[0] + s * step * normal[0], p[1] + s * step * normal[1]];
                if let Some((_, iq)) = self.eval(q) {
                    if iq.signum() != ip.signum() {
                        return self.segment_root(p, q, 1, depth).map(|(x, _)| x);
                    }
                }
            }
            step *= 2.0;
        }
        None
    }

    /// Bisect `R` along the contour between two `I = 0` points with opposite
    /// signs of `R`.
    fn refine_along(&self, mut neg: ContourPoint, mut pos: ContourPoint, opts: &EpOptions) -> Option<ContourPoint> {
        for _ in 0..opts.max_depth {
            let chord = ((pos.u[0] - neg.u[0]) / self.h[0]).hypot((pos.u[1] - neg.u[1]) / self.h[1]);
            let mid = Self::lerp(neg.u, pos.u, 0.5);
            if chord < 1e-14 || mid == neg.u || mid == pos.u {
                break;
            }
            let u = self.project(mid, neg.u, pos.u, chord.max(1e-12), opts.max_depth)?;
            let (r, _) = self.eval(u)?;
            let cp = ContourPoint { u, r, width: chord / 2.0 };
            if r.abs() < opts.tol_disc * 1e-3 {
                return Some(cp);
            }
            if r < 0.0 {
                neg = cp;
            } else {
                pos = cp;
            }
        }
        let best = if neg.r.abs() <= pos.r.abs() { neg } else { pos };
        let chord = ((pos.u[0] - neg.u[0]) / self.h[0]).hypot((pos.u[1] - neg.u[1]) / self.h[1]);
        Some(ContourPoint { width: chord, ..best })
    }
}

/// Exceptional points in a parameter plane.
///
/// The `I = 0` contour is located on every grid edge with a sign change of
/// `I` (edges with `|I| <= tol` at both ends lie on a degenerate contour and
/// are searched for sign changes of `R` directly). Within each cell, pairs of
/// contour points with opposite `R` are refined by bisecting `R` along the
/// contour. Only points with both residuals within tolerance are returned,
/// sorted by axis 1 then axis 2.
pub fn find_ep_2d(
    base: &Scenario,
    axis1: &SweepSpec,
    axis2: &SweepSpec,
    opts: &EpOptions,
    exec: Execution,
) -> Result<Vec<DegeneracyLocus>> {
    axis1.require_len(2)?;
    axis2.require_len(2)?;
    let (n1, n2) = (axis1.len(), axis2.len());
    let h = [
        (axis1.span() / (n1 - 1) as f64).abs().max(f64::MIN_POSITIVE),
        (axis2.span() / (n2 - 1) as f64).abs().max(f64::MIN_POSITIVE),
    ];
    let plane = Plane { base, axis1, axis2, h };
    let tol = opts.tol_disc;
    let coord = |i: usize, j: usize| [axis1.values[i], axis2.values[j]];
    let nodes: Vec<Option<(f64, f64)>> = exec.map(n1 * n2, |k| plane.eval(coord(k / n2, k % n2)));
    let node = |i: usize, j: usize| nodes[i * n2 + j];

    // Cells are processed independently; each returns its EP candidates.
    let cells = exec.map((n1 - 1) * (n2 - 1), |k| {
        let (i, j) = (k / (n2 - 1), k % (n2 - 1));
        let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let mut pts: Vec<ContourPoint> = Vec::new();
        let mut found: Vec<ContourPoint> = Vec::new();
        for e in 0..4 {
            let (pa, pb) = (corners[e], corners[(e + 1) % 4]);
            let (Some((ra, ia)), Some((rb, ib))) = (node(pa.0, pa.1), node(pb.0, pb.1)) else {
                continue;
            };
            let (ua, ub) = (coord(pa.0, pa.1), coord(pb.0, pb.1));
            if ia.abs() <= tol {
                pts.push(ContourPoint { u: ua, r: ra, width: 0.0 });
            }
            if ia.abs() <= tol && ib.abs() <= tol {
                if ra.abs() > tol && rb.abs() > tol && ra.signum() != rb.signum() {
                    if let Some((u, w)) = plane.segment_root(ua, ub, 0, opts.max_depth) {
                        if let Some((r, _)) = plane.eval(u) {
                            found.push(ContourPoint { u, r, width: w });
                        }
                    }
                }
            } else if ia.abs() > tol && ib.abs() > tol && ia.signum() != ib.signum() {
                if let Some((u, w)) = plane.segment_root(ua, ub, 1, opts.max_depth) {
                    if let Some((r, _)) = plane.eval(u) {
                        pts.push(ContourPoint { u, r, width: w });
                    }
                }
            }
        }
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                let (p, q) = (pts[a], pts[b]);
                if p.r.abs() <= tol && p.r.abs() <= q.r.abs() {
                    found.push(p);
                } else if q.r.abs() <= tol {
                    found.push(q);
                } else if p.r.signum() != q.r.signum() {
                    let (neg, pos) = if p.r < 0.0 { (p, q) } else { (q, p) };
                    if let Some(cp) = plane.refine_along(neg, pos, opts) {
                        found.push(cp);
                    }
                }
            }
        }
        found
    });

    let mut loci = Vec::new();
    for cp in cells.into_iter().flatten() {
        let Some((r, i)) = plane.eval(cp.u) else { continue };
        let mut sc = *base;
        axis1.axis.apply(&mut sc, cp.u[0]);
        axis2.axis.apply(&mut sc, cp.u[1]);
        if DegeneracyKind::classify(r, i, tol) == Some(DegeneracyKind::ExceptionalPoint)
            && is_defective(&sc, tol)
        {
            loci.push(DegeneracyLocus {
                kind: DegeneracyKind::ExceptionalPoint,
                location: cp.u.to_vec(),
                r_residual: r.abs(),
                i_residual: i.abs(),
                refinement_width: vec![cp.width * h[0], cp.width * h[1]],
            });
        } else {
            log::debug!(
                "contour candidate at ({}, {}) left residuals |R| = {:e}, |I| = {:e}",
                cp.u[0],
                cp.u[1],
                r.abs(),
                i.abs()
            );
        }
    }
    Ok(sort_and_dedup(loci, &[h[0] * 1e-3, h[1] * 1e-3]))
}

/// Angle between the two right eigenvectors at a locus; small at a genuine
/// exceptional point, `pi/2` at a diabolic point of a normal matrix.
pub fn eigenvector_angle(base: &Scenario, axes: &[&SweepSpec], locus: &DegeneracyLocus) -> Result<f64> {
    if axes.len() != locus.location.len() {
        return Err(Error::InvalidSpec(format!(
            "locus has {} coordinates but {} axes were given",
            locus.location.len(),
            axes.len()
        )));
    }
    let mut sc = *base;
    for (a, &x) in axes.iter().zip(&locus.location) {
        a.axis.apply(&mut sc, x);
    }
    let sp = eigenmodes(&sc.model()?)?;
    Ok(ray_angle(sp.eigvecs[0], sp.eigvecs[1]))
}
