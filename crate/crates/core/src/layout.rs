//! Development of flat labels into the plane and realization as M-weighted
//! points.
//!
//! Faces are placed one at a time across shared edges. For the augmented
//! disk the apex goes to the origin and the augmented faces are laid out
//! with reversed orientation, so the second sheet folds back over the disk.
//! Whenever a face reaches a vertex that is already placed, the mismatch is
//! recorded in the consistency residual.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::f64::consts::TAU;
use std::str::FromStr;

use crate::complex::{AugmentedDisk, Complex, VertexId};
use crate::conformal::{curvature, edge_length_sq, metric_data, ConformalStructure, Label};
use crate::error::{LayoutError, MetricError};
use crate::minkowski::{canonical_lift, project, MPoint, WeightedPoint};

pub type Point = [f64; 2];

/// Largest `|K|` accepted as flat by the layout routines.
pub const FLAT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Traversal {
    #[default]
    BreadthFirst,
    DepthFirst,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneLayout {
    /// One position per laid-out vertex; the apex, when present, is last.
    pub positions: Vec<Point>,
    /// Largest disagreement between two placements of the same vertex,
    /// divided by the layout diameter.
    pub consistency_residual: f64,
    /// Largest `| |P(v) − P(w)| − ℓ_vw | / ℓ_vw` over laid-out edges.
    pub edge_error: f64,
    pub diameter: f64,
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Third corner of a triangle on the side of `a→b` given by `sign`
/// (`+1` left, `−1` right).
fn place_third(pa: Point, pb: Point, l_bc: f64, l_ca: f64, sign: f64) -> Point {
    let d = dist(pa, pb);
    let u = [(pb[0] - pa[0]) / d, (pb[1] - pa[1]) / d];
    let n = [-u[1], u[0]];
    let x = (l_ca * l_ca - l_bc * l_bc + d * d) / (2.0 * d);
    let h = (l_ca * l_ca - x * x).max(0.0).sqrt();
    [pa[0] + x * u[0] + sign * h * n[0], pa[1] + x * u[1] + sign * h * n[1]]
}

fn edge_len(c: &impl Complex, cs: &ConformalStructure, f: &Label, a: usize, b: usize) -> f64 {
    let e = c.edge_index(a, b).expect("face edge");
    edge_length_sq(cs, f, e, [a, b]).sqrt()
}

struct Development {
    positions: Vec<Option<Point>>,
    residual: f64,
}

/// Develops `faces` (each with its orientation sign) starting from
/// `faces[0]`, whose first vertex is put at the origin and second on the
/// positive x-axis.
fn develop(
    c: &impl Complex,
    cs: &ConformalStructure,
    f: &Label,
    faces: &[([usize; 3], f64)],
    n_vertices: usize,
    traversal: Traversal,
) -> Development {
    let mut by_edge: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for (i, (t, _)) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            by_edge.entry([a.min(b), a.max(b)]).or_default().push(i);
        }
    }

    let mut pos: Vec<Option<Point>> = vec![None; n_vertices];
    let (t0, s0) = faces[0];
    let l01 = edge_len(c, cs, f, t0[0], t0[1]);
    pos[t0[0]] = Some([0.0, 0.0]);
    pos[t0[1]] = Some([l01, 0.0]);
    pos[t0[2]] = Some(place_third(
        [0.0, 0.0],
        [l01, 0.0],
        edge_len(c, cs, f, t0[1], t0[2]),
        edge_len(c, cs, f, t0[2], t0[0]),
        s0,
    ));

    let mut visited = vec![false; faces.len()];
    visited[0] = true;
    let mut frontier = VecDeque::from([0usize]);
    let mut residual = 0.0_f64;
    loop {
        let next = match traversal {
            Traversal::BreadthFirst => frontier.pop_front(),
            Traversal::DepthFirst => frontier.pop_back(),
        };
        let Some(fi) = next else { break };
        let t = faces[fi].0;
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            for &g in &by_edge[&[a.min(b), a.max(b)]] {
                if visited[g] {
                    continue;
                }
                visited[g] = true;
                let (tg, sg) = faces[g];
                // rotate g so the shared edge comes first, keeping its orientation
                let r = (0..3).find(|&r| !(tg[r] == a || tg[r] == b)).expect("shared edge");
                let (p, q, apex) = (tg[(r + 1) % 3], tg[(r + 2) % 3], tg[r]);
                let pred = place_third(
                    pos[p].expect("placed"),
                    pos[q].expect("placed"),
                    edge_len(c, cs, f, q, apex),
                    edge_len(c, cs, f, apex, p),
                    sg,
                );
                match pos[apex] {
                    Some(existing) => residual = residual.max(dist(existing, pred)),
                    None => pos[apex] = Some(pred),
                }
                frontier.push_back(g);
            }
        }
    }
    Development { positions: pos, residual }
}

fn diameter(points: &[Point]) -> f64 {
    let mut d = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(dist(*a, *b));
        }
    }
    d
}

fn finish(
    c: &impl Complex,
    cs: &ConformalStructure,
    f: &Label,
    dev: Development,
    edges: impl Iterator<Item = [usize; 2]>,
) -> PlaneLayout {
    let positions: Vec<Point> = dev.positions.into_iter().map(|p| p.expect("connected complex")).collect();
    let diam = diameter(&positions);
    let mut edge_error = 0.0_f64;
    for [a, b] in edges {
        let l = edge_len(c, cs, f, a, b);
        edge_error = edge_error.max((dist(positions[a], positions[b]) - l).abs() / l);
    }
    PlaneLayout {
        consistency_residual: if diam > 0.0 { dev.residual / diam } else { dev.residual },
        edge_error,
        diameter: diam,
        positions,
    }
}

fn max_curvature(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Result<f64, MetricError> {
    Ok(curvature(aug, cs, f)?.max_abs())
}

/// Largest interior angle defect using disk faces only, so the augmented
/// faces need not be admissible.
fn interior_defect(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Result<f64, MetricError> {
    let base = aug.base();
    let n = base.vertex_count();
    if f.0.len() != aug.vertex_count() {
        return Err(MetricError::LabelSize { expected: aug.vertex_count(), got: f.0.len() });
    }
    let m = metric_data(base, cs, &Label(f.0[..n].to_vec()), |v| base.id(v))?;
    let mut sums = vec![0.0; n];
    for (t, th) in base.faces().iter().zip(&m.angles) {
        for c in 0..3 {
            sums[t[c]] += th[c];
        }
    }
    Ok((0..n)
        .filter(|&v| !base.is_boundary_vertex(v))
        .fold(0.0_f64, |acc, v| acc.max((TAU - sums[v]).abs())))
}

/// Lays out the disk alone. Requires zero curvature at interior vertices
/// only. The first face is placed with its first vertex at the origin, the
/// second on the positive x-axis and the third in the upper half-plane.
pub fn layout_disk(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f: &Label,
    traversal: Traversal,
) -> Result<PlaneLayout, LayoutError> {
    let kmax = interior_defect(aug, cs, f)?;
    if kmax > FLAT_TOL {
        return Err(LayoutError::NotFlat(kmax));
    }
    let faces: Vec<([usize; 3], f64)> = aug.base().faces().iter().map(|t| (*t, 1.0)).collect();
    let dev = develop(aug, cs, f, &faces, aug.base().vertex_count(), traversal);
    Ok(finish(aug, cs, f, dev, aug.base().edges().iter().copied()))
}

/// Lays out the whole augmented disk: apex at the origin, augmented faces
/// fanned around it with reversed orientation, disk faces folded back
/// inside.
pub fn layout_augmented(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f: &Label,
    traversal: Traversal,
) -> Result<PlaneLayout, LayoutError> {
    let kmax = max_curvature(aug, cs, f)?;
    if kmax > FLAT_TOL {
        return Err(LayoutError::NotFlat(kmax));
    }
    let apex = aug.apex();
    let nb = aug.base_face_count();
    let mut faces: Vec<([usize; 3], f64)> = Vec::with_capacity(aug.faces().len());
    // augmented faces first so the fan around the apex is developed first
    for (i, t) in aug.faces().iter().enumerate().skip(nb) {
        let mut t = *t;
        if faces.is_empty() {
            let r = t.iter().position(|&v| v == apex).expect("augmented face has the apex");
            t.rotate_left(r);
        }
        faces.push((t, aug.face_sign(i)));
    }
    faces.extend(aug.faces()[..nb].iter().map(|t| (*t, 1.0)));
    let dev = develop(aug, cs, f, &faces, aug.vertex_count(), traversal);
    Ok(finish(aug, cs, f, dev, aug.edges().iter().copied()))
}

/// Orientation sign of every face of `aug` in `layout` (`+1` counter-clockwise).
pub fn orientation_signs(aug: &AugmentedDisk, layout: &PlaneLayout) -> Vec<f64> {
    aug.faces()
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|v| layout.positions[v]);
            let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            cross.signum()
        })
        .collect()
}

/// `ξ_v = e^{−f_v}·(p_v, ½(|p_v|² − α_v e^{2f_v} − 1), ½(|p_v|² − α_v e^{2f_v} + 1))`,
/// so that `ξ_v∗ξ_v = α_v`, `−ξ_v∗ξ_w = η_vw` and `f_v = −log(ξ⁴_v − ξ³_v)`.
pub fn realize_mpoints(layout: &PlaneLayout, cs: &ConformalStructure, f: &Label) -> Vec<MPoint> {
    layout
        .positions
        .iter()
        .enumerate()
        .map(|(v, &p)| {
            let w = cs.alpha[v] * (2.0 * f.0[v]).exp();
            canonical_lift(&WeightedPoint::new(p, w)).scale((-f.0[v]).exp())
        })
        .collect()
}

/// A laid-out augmented disk scaled so the apex circle is the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedConfiguration {
    pub layout: PlaneLayout,
    pub label: Label,
    pub mpoints: Vec<MPoint>,
}

/// Scales an augmented layout (apex at the origin) by the inverse apex
/// radius `1/(√α_apex · e^{f_apex})` and shifts the label to match.
pub fn normalize_to_unit_disk(
    aug: &AugmentedDisk,
    layout: &PlaneLayout,
    cs: &ConformalStructure,
    f: &Label,
) -> Result<NormalizedConfiguration, LayoutError> {
    let apex = aug.apex();
    let alpha = cs.alpha[apex];
    if !(alpha > 0.0) {
        return Err(LayoutError::DegenerateApex(alpha));
    }
    let radius = alpha.sqrt() * f.0[apex].exp();
    let origin = layout.positions[apex];
    let s = 1.0 / radius;
    let positions: Vec<Point> =
        layout.positions.iter().map(|p| [(p[0] - origin[0]) * s, (p[1] - origin[1]) * s]).collect();
    let scaled = PlaneLayout { positions, diameter: layout.diameter * s, ..layout.clone() };
    let label = f.shifted(-radius.ln());
    let mpoints = realize_mpoints(&scaled, cs, &label);
    Ok(NormalizedConfiguration { layout: scaled, label, mpoints })
}

/// Breadth-first augmented layout followed by unit-disk normalization.
pub fn realize_unit_disk(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f: &Label,
) -> Result<NormalizedConfiguration, LayoutError> {
    let l = layout_augmented(aug, cs, f, Traversal::BreadthFirst)?;
    normalize_to_unit_disk(aug, &l, cs, f)
}

/// Boundary behaviour prescribed by `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryScenario {
    /// Boundary circles internally tangent to the unit circle.
    Tangency,
    /// Boundary circles orthogonal to the unit circle.
    Orthogonal,
    /// Boundary points on the unit circle.
    Inscribed,
}

impl FromStr for BoundaryScenario {
    type Err = LayoutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tangency" | "tangent" => Ok(BoundaryScenario::Tangency),
            "orthogonal" => Ok(BoundaryScenario::Orthogonal),
            "inscribed" => Ok(BoundaryScenario::Inscribed),
            other => Err(LayoutError::UnknownScenario(other.to_string())),
        }
    }
}

impl fmt::Display for BoundaryScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryScenario::Tangency => "tangency",
            BoundaryScenario::Orthogonal => "orthogonal",
            BoundaryScenario::Inscribed => "inscribed",
        })
    }
}

/// Tolerance of the geometric boundary checks.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub scenario: BoundaryScenario,
    pub residuals: Vec<(VertexId, f64)>,
    pub max_residual: f64,
    pub passed: bool,
}

/// Checks the unit-disk boundary condition on every boundary circle of a
/// normalized configuration.
pub fn verify_boundary_condition(
    aug: &AugmentedDisk,
    mpoints: &[MPoint],
    scenario: BoundaryScenario,
) -> Result<BoundaryReport, LayoutError> {
    let mut residuals = Vec::new();
    for &v in aug.base().boundary_cycle() {
        let wp = project(&mpoints[v])?;
        let d = wp.p[0].hypot(wp.p[1]);
        let r2 = wp.w.max(0.0);
        let res = match scenario {
            BoundaryScenario::Tangency => (d + r2.sqrt() - 1.0).abs(),
            BoundaryScenario::Orthogonal => (d * d - 1.0 - r2).abs(),
            BoundaryScenario::Inscribed => (d - 1.0).abs(),
        };
        residuals.push((aug.id(v), res));
    }
    let max_residual = residuals.iter().fold(0.0_f64, |m, (_, r)| m.max(*r));
    Ok(BoundaryReport { scenario, residuals, passed: max_residual <= BOUNDARY_TOL, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{augment, validate_disk};
    use crate::conformal::tests::{hex_aug, packing_structure};
    use crate::complex::SimplexClass;
    use crate::minkowski::mprod;

    fn hex_flat(apex: f64) -> Label {
        let mut f = vec![0.0; 8];
        f[7] = apex;
        Label(f)
    }

    #[test]
    fn single_triangle_canonical_placement() {
        let aug = augment(&validate_disk(&[0, 1, 2], &[[0, 1, 2]]).unwrap());
        let cs = ConformalStructure { alpha: vec![0.0, 0.0, 0.0, 1.0], eta: vec![0.5; 6] };
        let l = layout_disk(&aug, &cs, &Label(vec![0.0; 4]), Traversal::BreadthFirst).unwrap();
        let expect = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
        for (p, e) in l.positions.iter().zip(expect) {
            assert!(dist(*p, e) < 1e-15);
        }
    }

    #[test]
    fn hex_disk_is_regular_hexagon() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        for tr in [Traversal::BreadthFirst, Traversal::DepthFirst] {
            let l = layout_disk(&aug, &cs, &hex_flat(0.3), tr).unwrap();
            // center at origin, ring at radius 2
            assert!(dist(l.positions[0], [0.0, 0.0]) < 1e-15);
            for v in 1..7 {
                assert!((dist(l.positions[v], [0.0, 0.0]) - 2.0).abs() < 1e-12);
            }
            assert!(l.consistency_residual < 1e-12);
            assert!(l.edge_error < 1e-12);
        }
    }

    #[test]
    fn hex_augmented_folds_back() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let f = hex_flat(3f64.ln());
        let l = layout_augmented(&aug, &cs, &f, Traversal::BreadthFirst).unwrap();
        assert_eq!(l.positions[7], [0.0, 0.0]);
        for v in 1..7 {
            assert!((dist(l.positions[v], [0.0, 0.0]) - 2.0).abs() < 1e-12);
        }
        assert!(dist(l.positions[0], [0.0, 0.0]) < 1e-12);
        assert!(l.positions.iter().all(|p| dist(*p, [0.0, 0.0]) < 3.0));
        let signs = orientation_signs(&aug, &l);
        for (i, s) in signs.iter().enumerate() {
            assert_eq!(*s, if aug.is_augmented_face(i) { -1.0 } else { 1.0 });
        }

        let dfs = layout_augmented(&aug, &cs, &f, Traversal::DepthFirst).unwrap();
        let gap = l.positions.iter().zip(&dfs.positions).fold(0.0_f64, |m, (a, b)| m.max(dist(*a, *b)));
        assert!(gap < 1e-12);
    }

    #[test]
    fn flattened_tetrahedron() {
        // inscribed structure on one triangle: flat when the side is √3 × apex radius
        let aug = augment(&validate_disk(&[0, 1, 2], &[[0, 1, 2]]).unwrap());
        let mut eta = vec![0.5; 6];
        for e in 3..6 {
            eta[e] = 0.0;
        }
        let cs = ConformalStructure { alpha: vec![0.0, 0.0, 0.0, 1.0], eta };
        let f = Label(vec![0.0, 0.0, 0.0, -0.5 * 3f64.ln()]);
        let l = layout_augmented(&aug, &cs, &f, Traversal::BreadthFirst).unwrap();
        let r = (-0.5 * 3f64.ln()).exp();
        for v in 0..3 {
            assert!((dist(l.positions[v], [0.0, 0.0]) - r).abs() < 1e-14);
        }
        let disk = layout_disk(&aug, &cs, &f, Traversal::BreadthFirst).unwrap();
        // same triangle up to isometry
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let d1 = dist(l.positions[a], l.positions[b]);
            let d2 = dist(disk.positions[a], disk.positions[b]);
            assert!((d1 - d2).abs() < 1e-14);
        }
    }

    #[test]
    fn layout_requires_flatness() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let f = hex_flat(2.5f64.ln());
        assert!(matches!(layout_augmented(&aug, &cs, &f, Traversal::BreadthFirst), Err(LayoutError::NotFlat(_))));
        // the disk alone only needs interior flatness
        assert!(layout_disk(&aug, &cs, &f, Traversal::BreadthFirst).is_ok());
        let mut bent = f.clone();
        bent.0[0] = 0.2;
        assert!(matches!(layout_disk(&aug, &cs, &bent, Traversal::BreadthFirst), Err(LayoutError::NotFlat(_))));
    }

    #[test]
    fn realization_reproduces_structure() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let f = hex_flat(3f64.ln());
        let l = layout_augmented(&aug, &cs, &f, Traversal::BreadthFirst).unwrap();
        let xi = realize_mpoints(&l, &cs, &f);
        for (v, x) in xi.iter().enumerate() {
            assert!((mprod(x, x) - cs.alpha[v]).abs() < 1e-12);
            assert!((-x.height().ln() - f.0[v]).abs() < 1e-14);
            let wp = project(x).unwrap();
            assert!((wp.w - cs.alpha[v] * (2.0 * f.0[v]).exp()).abs() < 1e-12);
        }
        for (e, [a, b]) in aug.edges().iter().enumerate() {
            let expected = if aug.edge_class(e) == SimplexClass::Augmented { -1.0 } else { 1.0 };
            assert!((-mprod(&xi[*a], &xi[*b]) - expected).abs() < 1e-12);
        }
        // unit circle at the origin with f = 0
        let single = PlaneLayout { positions: vec![[0.0, 0.0]], consistency_residual: 0.0, edge_error: 0.0, diameter: 0.0 };
        let one = ConformalStructure { alpha: vec![1.0], eta: vec![] };
        assert_eq!(realize_mpoints(&single, &one, &Label(vec![0.0]))[0].xi, [0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn normalization_and_boundary_checks() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let f = hex_flat(3f64.ln());
        let l = layout_augmented(&aug, &cs, &f, Traversal::BreadthFirst).unwrap();
        let n = normalize_to_unit_disk(&aug, &l, &cs, &f).unwrap();
        let apex = project(&n.mpoints[7]).unwrap();
        assert!(apex.p[0].abs() < 1e-15 && apex.p[1].abs() < 1e-15 && (apex.w - 1.0).abs() < 1e-15);
        for v in 1..7 {
            let wp = project(&n.mpoints[v]).unwrap();
            assert!((wp.w.sqrt() - 1.0 / 3.0).abs() < 1e-12);
            assert!((wp.p[0].hypot(wp.p[1]) - 2.0 / 3.0).abs() < 1e-12);
        }
        let rep = verify_boundary_condition(&aug, &n.mpoints, BoundaryScenario::Tangency).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(!verify_boundary_condition(&aug, &n.mpoints, BoundaryScenario::Inscribed).unwrap().passed);

        let again = normalize_to_unit_disk(&aug, &n.layout, &cs, &n.label).unwrap();
        assert_eq!(again.label, n.label);
        for (a, b) in again.layout.positions.iter().zip(&n.layout.positions) {
            assert!(dist(*a, *b) < 1e-15);
        }
    }

    #[test]
    fn orthogonal_closed_form() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, 0.0);
        let f = hex_flat(0.5 * 3f64.ln());
        let l = layout_augmented(&aug, &cs, &f, Traversal::BreadthFirst).unwrap();
        let n = normalize_to_unit_disk(&aug, &l, &cs, &f).unwrap();
        let wp = project(&n.mpoints[1]).unwrap();
        assert!((wp.p[0].hypot(wp.p[1]) - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((wp.w - 1.0 / 3.0).abs() < 1e-12);
        assert!(verify_boundary_condition(&aug, &n.mpoints, BoundaryScenario::Orthogonal).unwrap().passed);
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!("tangency".parse::<BoundaryScenario>().unwrap(), BoundaryScenario::Tangency);
        assert!(matches!("spiral".parse::<BoundaryScenario>(), Err(LayoutError::UnknownScenario(_))));
        assert_eq!(BoundaryScenario::Inscribed.to_string(), "inscribed");
    }
}
