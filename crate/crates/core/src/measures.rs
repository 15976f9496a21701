//! Curvature of polyhedral surfaces with integer multiplicities.
//!
//! Each simplex `σ` containing a vertex `v` contributes `2π` (the vertex
//! itself), `π` (an edge) or `π − θ_{v<f}` (a face), weighted by `μ(σ)`.
//! With the folded-disk multiplicity table this reproduces the three-case
//! augmented curvature.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use crate::complex::{standard_multiplicities, AugmentedDisk, Complex, MultiplicityAssignment, Simplex};
use crate::conformal::{curvature, metric_data, ConformalStructure, Label, MetricData};
use crate::error::MeasureError;

/// A complex with multiplicities and a metric.
#[derive(Debug, Clone)]
pub struct MultiplicitySurface<'a, C: Complex + ?Sized> {
    pub complex: &'a C,
    pub mu: MultiplicityAssignment,
    pub metric: MetricData,
}

impl<'a, C: Complex + ?Sized> MultiplicitySurface<'a, C> {
    pub fn new(complex: &'a C, mu: MultiplicityAssignment, metric: MetricData) -> Self {
        MultiplicitySurface { complex, mu, metric }
    }

    fn multiplicity(&self, s: Simplex) -> Result<i32, MeasureError> {
        self.mu.get(s).ok_or_else(|| MeasureError::MissingMultiplicity(format!("{s:?}")))
    }

    /// Unweighted contribution of `s` to the curvature at `v`; zero when `v ∉ s`.
    pub fn contribution(&self, v: usize, s: Simplex) -> f64 {
        match s {
            Simplex::Vertex(w) if w == v => TAU,
            Simplex::Edge(e) if self.complex.edges()[e].contains(&v) => PI,
            Simplex::Face(f) => match self.complex.faces()[f].iter().position(|&w| w == v) {
                Some(corner) => PI - self.metric.angles[f][corner],
                None => 0.0,
            },
            _ => 0.0,
        }
    }

    /// `K_v(X) = Σ_{σ∈X} μ(σ)·contribution(v, σ)`.
    pub fn measure_on(&self, v: usize, set: &BTreeSet<Simplex>) -> Result<f64, MeasureError> {
        let mut total = 0.0;
        for &s in set {
            let c = self.contribution(v, s);
            if c != 0.0 {
                total += f64::from(self.multiplicity(s)?) * c;
            }
        }
        Ok(total)
    }
}

/// `K_v = 2π μ(v) + Σ_{e>v} π μ(e) + Σ_{f>v} (π − θ_{v<f}) μ(f)`.
pub fn measure_curvature<C: Complex + ?Sized>(ms: &MultiplicitySurface<'_, C>, v: usize) -> Result<f64, MeasureError> {
    let c = ms.complex;
    let mut k = TAU * f64::from(ms.multiplicity(Simplex::Vertex(v))?);
    for (e, ends) in c.edges().iter().enumerate() {
        if ends.contains(&v) {
            k += PI * f64::from(ms.multiplicity(Simplex::Edge(e))?);
        }
    }
    for (f, t) in c.faces().iter().enumerate() {
        if let Some(corner) = t.iter().position(|&w| w == v) {
            k += (PI - ms.metric.angles[f][corner]) * f64::from(ms.multiplicity(Simplex::Face(f))?);
        }
    }
    Ok(k)
}

/// The standard-multiplicity surface of a labelled augmented disk.
pub fn folded_surface<'a>(
    aug: &'a AugmentedDisk,
    cs: &ConformalStructure,
    f: &Label,
) -> Result<MultiplicitySurface<'a, AugmentedDisk>, MeasureError> {
    let metric = metric_data(aug, cs, f, |v| aug.id(v))?;
    Ok(MultiplicitySurface::new(aug, standard_multiplicities(aug), metric))
}

/// `max_v |K_v(measure) − K_v(augmented)|`.
pub fn measure_equivalence_check(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Result<f64, MeasureError> {
    let ms = folded_surface(aug, cs, f)?;
    let direct = curvature(aug, cs, f)?;
    let mut worst = 0.0_f64;
    for (v, k) in direct.values().iter().enumerate() {
        worst = worst.max((measure_curvature(&ms, v)? - k).abs());
    }
    Ok(worst)
}

/// Smallest sub-complex containing `simplices`.
pub fn closure<C: Complex + ?Sized>(c: &C, simplices: impl IntoIterator<Item = Simplex>) -> BTreeSet<Simplex> {
    let mut out = BTreeSet::new();
    for s in simplices {
        out.insert(s);
        let vs = c.vertices_of(s);
        for &v in &vs {
            out.insert(Simplex::Vertex(v));
        }
        if let Simplex::Face(_) = s {
            for k in 0..3 {
                let e = c.edge_index(vs[k], vs[(k + 1) % 3]).expect("face edge");
                out.insert(Simplex::Edge(e));
            }
        }
    }
    out
}

pub fn is_sub_complex<C: Complex + ?Sized>(c: &C, set: &BTreeSet<Simplex>) -> bool {
    closure(c, set.iter().copied()) == *set
}

/// Checks `K_v(A ∪ B) = K_v(A) + K_v(B) − K_v(A ∩ B)` to `1e−12`.
pub fn valuation_check<C: Complex + ?Sized>(
    ms: &MultiplicitySurface<'_, C>,
    v: usize,
    a: &BTreeSet<Simplex>,
    b: &BTreeSet<Simplex>,
) -> Result<bool, MeasureError> {
    for set in [a, b] {
        if !is_sub_complex(ms.complex, set) {
            let missing = closure(ms.complex, set.iter().copied())
                .difference(set)
                .next()
                .map(|s| format!("{s:?}"))
                .unwrap_or_default();
            return Err(MeasureError::NotSubComplex(missing));
        }
    }
    let union: BTreeSet<Simplex> = a.union(b).copied().collect();
    let inter: BTreeSet<Simplex> = a.intersection(b).copied().collect();
    let lhs = ms.measure_on(v, &union)?;
    let rhs = ms.measure_on(v, a)? + ms.measure_on(v, b)? - ms.measure_on(v, &inter)?;
    Ok((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{augment, validate_disk, CombinatorialDisk};
    use crate::conformal::tests::{hex_aug, packing_structure};

    fn flower() -> CombinatorialDisk {
        // irregular petals so the angles differ
        let faces: Vec<[u32; 3]> = (0..5).map(|k| [0, 1 + k, 1 + (k + 1) % 5]).collect();
        validate_disk(&[0, 1, 2, 3, 4, 5], &faces).unwrap()
    }

    fn flower_surface(d: &CombinatorialDisk) -> MultiplicitySurface<'_, CombinatorialDisk> {
        let cs = ConformalStructure {
            alpha: vec![1.0, 0.8, 1.3, 0.9, 1.1, 1.0],
            eta: (0..d.edges().len()).map(|e| 0.5 + 0.1 * e as f64).collect(),
        };
        let f = Label(vec![0.1, 0.0, -0.2, 0.15, 0.05, -0.1]);
        let m = metric_data(d, &cs, &f, |v| v as u32).unwrap();
        MultiplicitySurface::new(d, MultiplicityAssignment::plain(d), m)
    }

    #[test]
    fn plain_flower_gives_angle_deficit() {
        let d = flower();
        let ms = flower_surface(&d);
        let angle_sum: f64 = d
            .faces()
            .iter()
            .enumerate()
            .map(|(f, t)| ms.metric.angles[f][t.iter().position(|&w| w == 0).unwrap()])
            .sum();
        assert!((measure_curvature(&ms, 0).unwrap() - (TAU - angle_sum)).abs() < 1e-13);
    }

    #[test]
    fn valuation_on_adjacent_triangles() {
        let d = flower();
        let ms = flower_surface(&d);
        let a = closure(&d, [Simplex::Face(0)]);
        let b = closure(&d, [Simplex::Face(1)]);
        assert!(valuation_check(&ms, 0, &a, &b).unwrap());
        assert!(valuation_check(&ms, 0, &a, &a).unwrap());
        let inter: BTreeSet<_> = a.intersection(&b).copied().collect();
        // shared closed spoke: its two vertices and the edge
        assert_eq!(inter.len(), 3);
        assert!((ms.measure_on(0, &inter).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn flower_assembled_triangle_by_triangle() {
        let d = flower();
        let ms = flower_surface(&d);
        let mut acc = BTreeSet::new();
        let mut k = 0.0;
        for f in 0..d.faces().len() {
            let piece = closure(&d, [Simplex::Face(f)]);
            let inter: BTreeSet<_> = acc.intersection(&piece).copied().collect();
            k += ms.measure_on(0, &piece).unwrap() - ms.measure_on(0, &inter).unwrap();
            acc.extend(piece);
        }
        assert!((k - measure_curvature(&ms, 0).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn valuation_rejects_non_subcomplex() {
        let d = flower();
        let ms = flower_surface(&d);
        let bare: BTreeSet<_> = [Simplex::Face(0)].into();
        assert!(matches!(
            valuation_check(&ms, 0, &bare, &bare),
            Err(MeasureError::NotSubComplex(_))
        ));
    }

    #[test]
    fn missing_multiplicity_is_reported() {
        let d = flower();
        let mut ms = flower_surface(&d);
        ms.mu.face.pop();
        assert!(matches!(measure_curvature(&ms, 0), Err(MeasureError::MissingMultiplicity(_))));
    }

    #[test]
    fn folded_curvature_matches_direct() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let f = Label(vec![0.05, -0.02, 0.1, 0.0, 0.03, -0.07, 0.02, 1.2]);
        let dev = measure_equivalence_check(&aug, &cs, &f).unwrap();
        assert!(dev <= 1e-12, "{dev}");

        let tri = augment(&validate_disk(&[0, 1, 2], &[[0, 1, 2]]).unwrap());
        let cs = ConformalStructure { alpha: vec![0.0, 0.0, 0.0, 1.0], eta: vec![0.5, 0.5, 0.5, 0.0, 0.0, 0.0] };
        let f = Label(vec![0.0, 0.0, 0.0, -0.2]);
        assert!(measure_equivalence_check(&tri, &cs, &f).unwrap() <= 1e-12);
    }

    #[test]
    fn folded_total_vanishes() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, 0.0);
        let f = Label(vec![0.1, 0.0, -0.05, 0.02, 0.0, 0.03, -0.01, 0.6]);
        let ms = folded_surface(&aug, &cs, &f).unwrap();
        let total: f64 = (0..aug.vertex_count()).map(|v| measure_curvature(&ms, v).unwrap()).sum();
        assert!(total.abs() < 1e-12);
    }
}
