//! Discrete conformal structures `C_{α,η}`: lengths
//! `ℓ²_ij = α_i e^{2f_i} + α_j e^{2f_j} + 2η_ij e^{f_i+f_j}`, face angles, the
//! augmented-disk curvature and its Jacobian with respect to the label.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::complex::{AugmentedDisk, Complex, SimplexClass};
use crate::error::MetricError;

/// `α` per vertex and `η` per edge of a complex, indexed like the complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalStructure {
    pub alpha: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Log conformal factor per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Label(pub Vec<f64>);

impl Label {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn shifted(&self, c: f64) -> Label {
        Label(self.0.iter().map(|x| x + c).collect())
    }
}

/// Curvature per vertex, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureVector(pub Vec<f64>);

impl CurvatureVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, k| m.max(k.abs()))
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Edge lengths and per-face corner angles of a labelled complex.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricData {
    pub lengths: Vec<f64>,
    /// Angle at each corner, in the face's vertex order.
    pub angles: Vec<[f64; 3]>,
}

fn check_label<C: Complex + ?Sized>(c: &C, f: &Label, id: impl Fn(usize) -> u32) -> Result<(), MetricError> {
    if f.0.len() != c.vertex_count() {
        return Err(MetricError::LabelSize { expected: c.vertex_count(), got: f.0.len() });
    }
    match f.0.iter().position(|x| !x.is_finite()) {
        Some(v) => Err(MetricError::NonFiniteLabel(id(v))),
        None => Ok(()),
    }
}

pub fn edge_length_sq(cs: &ConformalStructure, f: &Label, edge: usize, ends: [usize; 2]) -> f64 {
    let [i, j] = ends;
    let (fi, fj) = (f.0[i], f.0[j]);
    cs.alpha[i] * (2.0 * fi).exp() + cs.alpha[j] * (2.0 * fj).exp() + 2.0 * cs.eta[edge] * (fi + fj).exp()
}

/// Length of edge `e` of the augmented disk under label `f`.
pub fn edge_length(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label, e: usize) -> Result<f64, MetricError> {
    check_label(aug, f, |v| aug.id(v))?;
    let ends = aug.edges()[e];
    let l2 = edge_length_sq(cs, f, e, ends);
    if l2 > 0.0 {
        Ok(l2.sqrt())
    } else {
        Err(MetricError::DegenerateEdge(aug.id(ends[0]), aug.id(ends[1]), l2))
    }
}

/// Corner angles of a triangle with side lengths `[ℓ_ij, ℓ_jk, ℓ_ki]`,
/// returned in the order `(θ_i, θ_j, θ_k)`. `None` unless the strict
/// triangle inequalities hold.
pub fn angles_from_lengths(l: [f64; 3]) -> Option<[f64; 3]> {
    let [c, a, b] = l; // a opposite i, b opposite j, c opposite k
    let s = [a + b + c, -a + b + c, a - b + c, a + b - c];
    if s.iter().any(|x| !(*x > 0.0)) {
        return None;
    }
    let four_area = (s[0] * s[1] * s[2] * s[3]).sqrt();
    let (a2, b2, c2) = (a * a, b * b, c * c);
    Some([
        four_area.atan2(b2 + c2 - a2),
        four_area.atan2(a2 + c2 - b2),
        four_area.atan2(a2 + b2 - c2),
    ])
}

/// Side lengths `[ℓ_ij, ℓ_jk, ℓ_ki]` of face `(i, j, k)`.
fn face_lengths<C: Complex + ?Sized>(c: &C, cs: &ConformalStructure, f: &Label, face: usize) -> Result<[f64; 3], (usize, usize, f64)> {
    let t = c.faces()[face];
    let mut out = [0.0; 3];
    for k in 0..3 {
        let (i, j) = (t[k], t[(k + 1) % 3]);
        let e = c.edge_index(i, j).expect("face edges belong to the complex");
        let l2 = edge_length_sq(cs, f, e, [i, j]);
        if !(l2 > 0.0) {
            return Err((i, j, l2));
        }
        out[k] = l2.sqrt();
    }
    Ok(out)
}

fn face_angles_by<C: Complex + ?Sized>(
    c: &C,
    cs: &ConformalStructure,
    f: &Label,
    face: usize,
    id: &impl Fn(usize) -> u32,
) -> Result<[f64; 3], MetricError> {
    let l = face_lengths(c, cs, f, face).map_err(|(i, j, l2)| MetricError::DegenerateEdge(id(i), id(j), l2))?;
    angles_from_lengths(l).ok_or_else(|| {
        let t = c.faces()[face];
        MetricError::InadmissibleFace(id(t[0]), id(t[1]), id(t[2]))
    })
}

/// Corner angles of `face`, in the face's vertex order.
pub fn face_angles(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label, face: usize) -> Result<[f64; 3], MetricError> {
    check_label(aug, f, |v| aug.id(v))?;
    face_angles_by(aug, cs, f, face, &|v| aug.id(v))
}

/// Lengths and angles of any complex carrying a conformal structure.
pub fn metric_data<C: Complex + ?Sized>(
    c: &C,
    cs: &ConformalStructure,
    f: &Label,
    id: impl Fn(usize) -> u32,
) -> Result<MetricData, MetricError> {
    check_label(c, f, &id)?;
    let mut lengths = Vec::with_capacity(c.edges().len());
    for (e, ends) in c.edges().iter().enumerate() {
        let l2 = edge_length_sq(cs, f, e, *ends);
        if !(l2 > 0.0) {
            return Err(MetricError::DegenerateEdge(id(ends[0]), id(ends[1]), l2));
        }
        lengths.push(l2.sqrt());
    }
    let angles = (0..c.faces().len())
        .map(|face| face_angles_by(c, cs, f, face, &id))
        .collect::<Result<_, _>>()?;
    Ok(MetricData { lengths, angles })
}

/// First violation of admissibility, or `None` when every edge has positive
/// squared length and every face satisfies the strict triangle inequalities.
pub fn check_admissible(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Option<MetricError> {
    metric_data(aug, cs, f, |v| aug.id(v)).err()
}

pub fn admissible(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> bool {
    check_admissible(aug, cs, f).is_none()
}

/// Constant part of the curvature: 2π inside, 0 on the boundary, −2π at the apex.
fn base_curvature(aug: &AugmentedDisk, v: usize) -> f64 {
    match aug.vertex_class(v) {
        SimplexClass::Interior => TAU,
        SimplexClass::Boundary => 0.0,
        SimplexClass::Augmented => -TAU,
    }
}

/// Augmented-disk curvature: `2π − Σ_S θ` inside, `Σ_aug θ − Σ_S θ` on the
/// boundary, `Σ θ − 2π` at the apex.
pub fn curvature(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Result<CurvatureVector, MetricError> {
    check_label(aug, f, |v| aug.id(v))?;
    let mut k: Vec<f64> = (0..aug.vertex_count()).map(|v| base_curvature(aug, v)).collect();
    for (face, t) in aug.faces().iter().enumerate() {
        let th = face_angles_by(aug, cs, f, face, &|v| aug.id(v))?;
        let sign = -aug.face_sign(face);
        for c in 0..3 {
            k[t[c]] += sign * th[c];
        }
    }
    Ok(CurvatureVector(k))
}

/// `∂θ_a/∂ℓ_e` for a triangle with sides `[ℓ_ij, ℓ_jk, ℓ_ki]`: row `a` is the
/// corner `(i, j, k)[a]`, column `e` the side.
fn angle_length_derivatives(l: [f64; 3], th: [f64; 3]) -> [[f64; 3]; 3] {
    // side index opposite each corner: i ↔ jk (1), j ↔ ki (2), k ↔ ij (0)
    let opposite = [1usize, 2, 0];
    let [c, a, b] = l;
    let s = (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c);
    let two_area = 0.5 * s.sqrt();
    let mut d = [[0.0; 3]; 3];
    for corner in 0..3 {
        let opp = opposite[corner];
        let lo = l[opp];
        d[corner][opp] = lo / two_area;
        for side in (0..3).filter(|&s| s != opp) {
            // angle between the opposite side and `side` sits at the corner
            // shared by both, i.e. the one that is neither `corner` nor the
            // corner opposite `side`
            let other = (0..3).find(|&x| x != corner && opposite[x] != side).expect("three corners");
            d[corner][side] = -lo * th[other].cos() / two_area;
        }
    }
    d
}

/// `∂K_v/∂f_w` over all vertices of the augmented disk.
pub fn curvature_jacobian(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Result<DMatrix<f64>, MetricError> {
    check_label(aug, f, |v| aug.id(v))?;
    let n = aug.vertex_count();
    let mut jac = DMatrix::zeros(n, n);
    for (face, t) in aug.faces().iter().enumerate() {
        let l = face_lengths(aug, cs, f, face)
            .map_err(|(i, j, l2)| MetricError::DegenerateEdge(aug.id(i), aug.id(j), l2))?;
        let th = angles_from_lengths(l).ok_or(MetricError::InadmissibleFace(aug.id(t[0]), aug.id(t[1]), aug.id(t[2])))?;
        let dth_dl = angle_length_derivatives(l, th);

        // ∂ℓ_side/∂f_corner
        let mut dl_df = [[0.0; 3]; 3];
        for side in 0..3 {
            let (p, q) = (t[side], t[(side + 1) % 3]);
            let e = aug.edge_index(p, q).expect("face edge");
            let cross = cs.eta[e] * (f.0[p] + f.0[q]).exp();
            dl_df[side][side] = (cs.alpha[p] * (2.0 * f.0[p]).exp() + cross) / l[side];
            dl_df[side][(side + 1) % 3] = (cs.alpha[q] * (2.0 * f.0[q]).exp() + cross) / l[side];
        }

        let sign = -aug.face_sign(face);
        for a in 0..3 {
            for b in 0..3 {
                let d: f64 = (0..3).map(|s| dth_dl[a][s] * dl_df[s][b]).sum();
                jac[(t[a], t[b])] += sign * d;
            }
        }
    }
    Ok(jac)
}

/// Angle sum per face is π; used by tests and diagnostics.
pub fn angle_sum_defect(th: [f64; 3]) -> f64 {
    (th.iter().sum::<f64>() - PI).abs()
}
