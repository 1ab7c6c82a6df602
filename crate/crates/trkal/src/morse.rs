//! Critical points of the energy density on the torus, separatrices and the
//! invariant curved-polygon partition.
//!
//! Stationary points of `C0` are the endpoints of every gradient line:
//! maxima act as sources of the descending flow, minima as sinks, and each
//! nondegenerate saddle carries four separatrix branches along its Hessian
//! eigendirections. The separatrices cut the torus into curved polygons whose
//! interiors contain pairwise homotopic trajectories; [`partition_polygons`]
//! recovers those faces from the embedded graph of critical points and
//! separatrices.

use crate::energy::EnergyDensity;
use crate::error::{Error, Result};
use crate::geom::Mat2Sym;
use crate::tracer::{torus_dist, trace_gradient_line, Direction, Termination, TraceOptions, Trajectory};
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::io::Write;

/// Default merge radius for coincident Newton roots.
pub const DEDUP_RADIUS: f64 = 1e-6 * TAU;

const NEWTON_MAX_ITER: usize = 50;

/// Morse type of a nondegenerate stationary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Maximum,
    Minimum,
    Saddle,
}

impl CriticalKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CriticalKind::Maximum => "maximum",
            CriticalKind::Minimum => "minimum",
            CriticalKind::Saddle => "saddle",
        }
    }
}

/// A classified stationary point of `C0` in the fundamental domain `[0,2π)²`.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub xi: f64,
    pub eta: f64,
    pub kind: CriticalKind,
    pub hessian: Mat2Sym,
    /// Eigenvalues `λ₁ ≥ λ₂`.
    pub eigvals: (f64, f64),
    /// Unit eigenvectors matching `eigvals`.
    pub eigvecs: ((f64, f64), (f64, f64)),
}

impl CriticalPoint {
    pub fn position(&self) -> (f64, f64) {
        (self.xi, self.eta)
    }

    /// Strictly inside the open square `(0,2π)²` (the fundamental square
    /// minus its boundary lines).
    pub fn in_open_square(&self) -> bool {
        let m = 1e-9;
        self.xi > m && self.xi < TAU - m && self.eta > m && self.eta < TAU - m
    }
}

/// Result of a critical-point scan: classified nondegenerate points plus any
/// roots whose Hessian was singular (flagged, never classified).
#[derive(Debug, Clone, Default)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
    pub degenerate: Vec<(f64, f64)>,
}

impl CriticalSet {
    pub fn count_kind(&self, kind: CriticalKind) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }

    pub fn saddles(&self) -> impl Iterator<Item = (usize, &CriticalPoint)> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.kind == CriticalKind::Saddle)
    }

    /// Index of the point nearest to `p` on the torus, with its distance.
    pub fn nearest(&self, p: (f64, f64)) -> Option<(usize, f64)> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, c)| (i, torus_dist(p, c.position())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// CSV table `xi,eta,kind,lambda1,lambda2,detB`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "xi,eta,kind,lambda1,lambda2,detB")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                p.xi,
                p.eta,
                p.kind.as_str(),
                p.eigvals.0,
                p.eigvals.1,
                p.hessian.det()
            )?;
        }
        Ok(())
    }
}

fn wrap_torus(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

/// Locate and classify every stationary point of `C0` on the torus.
///
/// Newton's method on `∇C0 = 0` (analytic Hessian as Jacobian, damped by
/// halving) is seeded from a `scan_n × scan_n` grid; roots are wrapped into
/// the fundamental domain and merged within [`DEDUP_RADIUS`].
pub fn find_critical_points(
    e: &EnergyDensity,
    scan_n: usize,
    newton_tol: f64,
) -> Result<CriticalSet> {
    let min_scan = 8 * e.degree().max(1) as usize;
    if scan_n < min_scan {
        return Err(Error::InvalidResolution(scan_n, min_scan));
    }
    if e.degree() == 0 {
        return Err(Error::NoCriticalPoints);
    }

    let mut set = CriticalSet::default();
    for i in 0..scan_n {
        for j in 0..scan_n {
            let seed = (TAU * i as f64 / scan_n as f64, TAU * j as f64 / scan_n as f64);
            let Some(root) = newton_root(e, seed, newton_tol) else {
                continue;
            };
            let root = (wrap_torus(root.0), wrap_torus(root.1));
            let dup = set
                .points
                .iter()
                .map(|p| p.position())
                .chain(set.degenerate.iter().copied())
                .any(|p| torus_dist(p, root) < DEDUP_RADIUS);
            if dup {
                continue;
            }
            match classify(e, root) {
                Ok(point) => set.points.push(point),
                Err(Error::DegenerateHessian { .. }) => set.degenerate.push(root),
                Err(other) => return Err(other),
            }
        }
    }
    if set.points.is_empty() && set.degenerate.is_empty() {
        return Err(Error::NoCriticalPoints);
    }
    // Deterministic ordering regardless of which seed found a root first.
    set.points
        .sort_by(|a, b| (a.xi, a.eta).partial_cmp(&(b.xi, b.eta)).unwrap());
    Ok(set)
}

fn newton_root(e: &EnergyDensity, seed: (f64, f64), tol: f64) -> Option<(f64, f64)> {
    let mut x = seed;
    let mut g = e.grad(x.0, x.1);
    let mut gn = g.0.hypot(g.1);
    for _ in 0..NEWTON_MAX_ITER {
        if gn < tol {
            return Some(x);
        }
        let h = e.hessian(x.0, x.1);
        let step = h.solve(g)?;
        // Damping: halve until |∇C0| decreases.
        let mut s = 1.0;
        loop {
            let cand = (x.0 - s * step.0, x.1 - s * step.1);
            let gc = e.grad(cand.0, cand.1);
            let gcn = gc.0.hypot(gc.1);
            if gcn < gn {
                x = cand;
                g = gc;
                gn = gcn;
                break;
            }
            s *= 0.5;
            if s < 1e-6 {
                return None;
            }
        }
    }
    if gn < tol {
        Some(x)
    } else {
        None
    }
}

fn classify(e: &EnergyDensity, p: (f64, f64)) -> Result<CriticalPoint> {
    let h = e.hessian(p.0, p.1);
    let ((l1, v1), (l2, v2)) = h.eigen();
    let scale = l1.abs().max(l2.abs());
    if h.det().abs() <= 1e-8 * scale * scale || scale == 0.0 {
        return Err(Error::DegenerateHessian {
            xi: p.0,
            eta: p.1,
            det: h.det(),
        });
    }
    let kind = if l1 < 0.0 {
        CriticalKind::Maximum
    } else if l2 > 0.0 {
        CriticalKind::Minimum
    } else {
        CriticalKind::Saddle
    };
    Ok(CriticalPoint {
        xi: p.0,
        eta: p.1,
        kind,
        hessian: h,
        eigvals: (l1, l2),
        eigvecs: (v1, v2),
    })
}

/// Morse–Euler count `#max + #min - #saddle`; zero for every nondegenerate
/// doubly-periodic field (torus Euler characteristic).
pub fn euler_check(set: &CriticalSet) -> Result<i64> {
    if let Some(&(xi, eta)) = set.degenerate.first() {
        let h = Mat2Sym::default();
        let _ = h;
        return Err(Error::DegenerateHessian {
            xi,
            eta,
            det: 0.0,
        });
    }
    Ok(set.count_kind(CriticalKind::Maximum) as i64 + set.count_kind(CriticalKind::Minimum) as i64
        - set.count_kind(CriticalKind::Saddle) as i64)
}

/// The four separatrix branches of a saddle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `+` unstable eigendirection (ascending).
    UnstablePlus,
    UnstableMinus,
    /// `+` stable eigendirection (descending).
    StablePlus,
    StableMinus,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch::UnstablePlus,
        Branch::UnstableMinus,
        Branch::StablePlus,
        Branch::StableMinus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::UnstablePlus => "unstable+",
            Branch::UnstableMinus => "unstable-",
            Branch::StablePlus => "stable+",
            Branch::StableMinus => "stable-",
        }
    }
}

/// One traced separatrix: a gradient line from a saddle to an extremum.
#[derive(Debug, Clone)]
pub struct Separatrix {
    pub saddle_id: usize,
    pub branch: Branch,
    pub path: Trajectory,
    /// Critical point the branch terminated at.
    pub endpoint_id: usize,
}

/// Launch the four separatrices of `set.points[saddle_id]`.
///
/// Unstable branches start at `saddle ± seed_offset·v₊` and ascend to maxima;
/// stable branches start along `v₋` and descend to minima. The endpoint is
/// snapped to the critical point whose stop ball terminated the trace.
pub fn trace_separatrices(
    e: &EnergyDensity,
    set: &CriticalSet,
    saddle_id: usize,
    seed_offset: f64,
    opts: &TraceOptions,
) -> Result<Vec<Separatrix>> {
    let saddle = &set.points[saddle_id];
    if saddle.kind != CriticalKind::Saddle {
        return Err(Error::InvalidInput(format!(
            "critical point {saddle_id} is a {}, not a saddle",
            saddle.kind.as_str()
        )));
    }
    let (v_unstable, v_stable) = (saddle.eigvecs.0, saddle.eigvecs.1);
    let mut opts = *opts;
    opts.arm_radius = (2.0 * opts.stop_radius).max(4.0 * seed_offset);

    let mut out = Vec::with_capacity(4);
    for (bi, branch) in Branch::ALL.into_iter().enumerate() {
        let (v, sign, dir) = match branch {
            Branch::UnstablePlus => (v_unstable, 1.0, Direction::Ascend),
            Branch::UnstableMinus => (v_unstable, -1.0, Direction::Ascend),
            Branch::StablePlus => (v_stable, 1.0, Direction::Descend),
            Branch::StableMinus => (v_stable, -1.0, Direction::Descend),
        };
        let start = (
            saddle.xi + sign * seed_offset * v.0,
            saddle.eta + sign * seed_offset * v.1,
        );
        let path = trace_gradient_line(e, start, dir, &opts)?;
        let endpoint_id = match path.termination {
            Termination::EnteredCriticalBall { xi, eta } => {
                match set.nearest((xi, eta)) {
                    Some((id, d)) if d < opts.stop_radius.max(DEDUP_RADIUS) => id,
                    _ => {
                        return Err(Error::UnresolvedSeparatrix {
                            xi: saddle.xi,
                            eta: saddle.eta,
                            branch: bi,
                        })
                    }
                }
            }
            _ => {
                return Err(Error::UnresolvedSeparatrix {
                    xi: saddle.xi,
                    eta: saddle.eta,
                    branch: bi,
                })
            }
        };
        out.push(Separatrix {
            saddle_id,
            branch,
            path,
            endpoint_id,
        });
    }
    Ok(out)
}

/// A face of the separatrix graph on the torus.
#[derive(Debug, Clone)]
pub struct Polygon {
    /// Boundary vertices (critical-point ids) in traversal order; repeats are
    /// possible when a vertex is visited twice by the boundary walk.
    pub vertices: Vec<usize>,
    /// Boundary edges (separatrix ids) in traversal order.
    pub edges: Vec<usize>,
    /// Maxima on the boundary (gradient-flow sources of the cell).
    pub sources: Vec<usize>,
    /// Minima on the boundary (sinks).
    pub sinks: Vec<usize>,
}

/// The invariant curved-polygon partition of the torus.
#[derive(Debug, Clone)]
pub struct PolygonPartition {
    pub polygons: Vec<Polygon>,
    pub vertex_count: usize,
    pub edge_count: usize,
}

impl PolygonPartition {
    /// `V - E + F`, which must vanish on the torus for a cellular embedding.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count as i64 + self.polygons.len() as i64
    }

    /// Adjacency document: polygons with their vertex/edge cycles.
    pub fn to_json(&self) -> Value {
        json!({
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "face_count": self.polygons.len(),
            "euler_characteristic": self.euler_characteristic(),
            "polygons": self.polygons.iter().map(|p| json!({
                "vertices": p.vertices,
                "edges": p.edges,
                "sources": p.sources,
                "sinks": p.sinks,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Assemble the toroidal graph of critical points and separatrices and trace
/// its faces.
///
/// Faces are orbits of the "next edge counter-clockwise after the reversal"
/// permutation on directed edge-ends, with the rotation at each vertex taken
/// from the geometric departure angles of the traced paths.
pub fn partition_polygons(set: &CriticalSet, separatrices: &[Separatrix]) -> Result<PolygonPartition> {
    let v_count = set.points.len();
    let e_count = separatrices.len();
    if e_count == 0 {
        // No saddles: the whole torus is one invariant cell.
        return Ok(PolygonPartition {
            polygons: vec![Polygon {
                vertices: (0..v_count).collect(),
                edges: vec![],
                sources: kind_ids(set, CriticalKind::Maximum),
                sinks: kind_ids(set, CriticalKind::Minimum),
            }],
            vertex_count: v_count,
            edge_count: 0,
        });
    }

    // Darts: (edge, false) departs the saddle, (edge, true) departs the
    // endpoint. Compute departure angles from the traced geometry.
    let dart_vertex = |edge: usize, rev: bool| -> usize {
        if rev {
            separatrices[edge].endpoint_id
        } else {
            separatrices[edge].saddle_id
        }
    };
    let mut angle = vec![[0.0f64; 2]; e_count];
    for (i, sep) in separatrices.iter().enumerate() {
        let saddle = set.points[sep.saddle_id].position();
        let first = sep.path.start();
        angle[i][0] = departure_angle(saddle, (first.xi, first.eta), &sep.path, false);
        let endpoint = set.points[sep.endpoint_id].position();
        let last = sep.path.end();
        angle[i][1] = departure_angle(endpoint, (last.xi, last.eta), &sep.path, true);
    }

    // Rotation system: outgoing darts sorted counter-clockwise per vertex.
    let mut rotation: Vec<Vec<(usize, bool)>> = vec![Vec::new(); v_count];
    for i in 0..e_count {
        rotation[dart_vertex(i, false)].push((i, false));
        rotation[dart_vertex(i, true)].push((i, true));
    }
    for (v, darts) in rotation.iter_mut().enumerate() {
        darts.sort_by(|a, b| {
            let aa = angle[a.0][a.1 as usize];
            let ab = angle[b.0][b.1 as usize];
            aa.partial_cmp(&ab).unwrap()
        });
        if set.points[v].kind == CriticalKind::Saddle && darts.len() != 4 {
            return Err(Error::Topology(format!(
                "saddle {v} has {} incident separatrices, expected 4",
                darts.len()
            )));
        }
    }

    // Face tracing: next(d) = CCW successor of α(d) at the head of d.
    let mut visited = vec![[false; 2]; e_count];
    let mut polygons = Vec::new();
    for start_edge in 0..e_count {
        for start_rev in [false, true] {
            if visited[start_edge][start_rev as usize] {
                continue;
            }
            let mut face_vertices = Vec::new();
            let mut face_edges = Vec::new();
            let mut d = (start_edge, start_rev);
            loop {
                if visited[d.0][d.1 as usize] {
                    break;
                }
                visited[d.0][d.1 as usize] = true;
                face_vertices.push(dart_vertex(d.0, d.1));
                face_edges.push(d.0);
                let alpha = (d.0, !d.1);
                let v = dart_vertex(alpha.0, alpha.1);
                let darts = &rotation[v];
                let pos = darts
                    .iter()
                    .position(|&x| x == alpha)
                    .expect("dart registered at its vertex");
                d = darts[(pos + 1) % darts.len()];
                if face_edges.len() > 4 * e_count {
                    return Err(Error::Topology(
                        "face walk failed to close; embedding is inconsistent".into(),
                    ));
                }
            }
            let mut sources: Vec<usize> = face_vertices
                .iter()
                .copied()
                .filter(|&v| set.points[v].kind == CriticalKind::Maximum)
                .collect();
            sources.dedup();
            let mut sinks: Vec<usize> = face_vertices
                .iter()
                .copied()
                .filter(|&v| set.points[v].kind == CriticalKind::Minimum)
                .collect();
            sinks.dedup();
            polygons.push(Polygon {
                vertices: face_vertices,
                edges: face_edges,
                sources,
                sinks,
            });
        }
    }

    let partition = PolygonPartition {
        polygons,
        vertex_count: v_count,
        edge_count: e_count,
    };
    if partition.euler_characteristic() != 0 {
        return Err(Error::Topology(format!(
            "V - E + F = {} (torus requires 0); separatrices may cross",
            partition.euler_characteristic()
        )));
    }
    Ok(partition)
}

fn kind_ids(set: &CriticalSet, kind: CriticalKind) -> Vec<usize> {
    set.points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.kind == kind)
        .map(|(i, _)| i)
        .collect()
}

/// Angle of the path's departure from a vertex. `rev` walks the path from its
/// terminal end.
///
/// Arrivals at an extremum are generically tangent to the slow
/// eigendirection, so angles taken right at the vertex collapse together.
/// Distinct gradient lines never cross, which makes the cyclic order of
/// their crossings of a *larger* circle around the vertex the true rotation
/// order; the angle is therefore measured where the path first leaves a
/// finite probe radius.
fn departure_angle(vertex: (f64, f64), near: (f64, f64), path: &Trajectory, rev: bool) -> f64 {
    const PROBE_RADIUS: f64 = 0.25;
    let mut probe = near;
    let iter: Box<dyn Iterator<Item = &crate::tracer::Sample>> = if rev {
        Box::new(path.samples.iter().rev())
    } else {
        Box::new(path.samples.iter())
    };
    for s in iter {
        probe = (s.xi, s.eta);
        if torus_dist(probe, vertex) >= PROBE_RADIUS {
            break;
        }
    }
    fn wrap(d: f64) -> f64 {
        (d + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
    }
    wrap(probe.1 - vertex.1).atan2(wrap(probe.0 - vertex.0))
}
