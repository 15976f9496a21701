//! Möbius invariance and the rank experiment for the constraint map
//! `ξ ↦ (ξ_v∗ξ_v, ξ_v∗ξ_w)`.

use nalgebra::{DMatrix, Vector4};

use crate::complex::{AugmentedDisk, Complex};
use crate::conformal::{curvature, ConformalStructure, Label};
use crate::error::{GeometryError, LayoutError};
use crate::layout::realize_unit_disk;
use crate::minkowski::{infinitesimal_generator, induced_label_variation, metric, project, InfinitesimalMobius, MPoint};

/// Differential of the product constraints at `xi`.
///
/// One row per vertex (block `(Gξ_v)ᵀ` under column `v`; the factor 2 of
/// `d(ξ∗ξ)` is dropped, which does not change the rank), then one row per
/// edge `vw` with `(Gξ_w)ᵀ` under `v` and `(Gξ_v)ᵀ` under `w`.
pub fn constraint_matrix<C: Complex + ?Sized>(c: &C, xi: &[MPoint]) -> DMatrix<f64> {
    let n = c.vertex_count();
    let g = metric();
    let gx: Vec<Vector4<f64>> = xi.iter().map(|x| g * x.to_vector()).collect();
    let mut m = DMatrix::zeros(n + c.edges().len(), 4 * n);
    for v in 0..n {
        for k in 0..4 {
            m[(v, 4 * v + k)] = gx[v][k];
        }
    }
    for (e, [v, w]) in c.edges().iter().enumerate() {
        for k in 0..4 {
            m[(n + e, 4 * v + k)] = gx[*w][k];
            m[(n + e, 4 * w + k)] = gx[*v][k];
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
}

/// `rank = #{σ_i > cutoff·σ_max}`.
pub fn numerical_rank(m: &DMatrix<f64>, cutoff: f64) -> RankReport {
    let mut sv: Vec<f64> = if m.is_empty() { Vec::new() } else { m.singular_values().iter().copied().collect() };
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = if smax > 0.0 { sv.iter().filter(|&&s| s > cutoff * smax).count() } else { 0 };
    RankReport { rows: m.nrows(), cols: m.ncols(), rank, singular_values: sv }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobiusReport {
    /// Normalized flat label the generator acts on.
    pub label: Label,
    /// Label after applying `I + εM`.
    pub transported: Label,
    /// `max |K(f')|`.
    pub max_curvature: f64,
    /// `max |(f' − f)/ε − δf(p_v)|`.
    pub max_variation_error: f64,
}

/// Applies `I + εM` to the unit-disk realization of a flat label and
/// measures how far the transported label is from flat and from the
/// predicted first-order variation.
pub fn mobius_orbit_check(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f_flat: &Label,
    g: &InfinitesimalMobius,
    eps: f64,
) -> Result<MobiusReport, LayoutError> {
    let cfg = realize_unit_disk(aug, cs, f_flat)?;
    let step = infinitesimal_generator(g, eps);
    let mut moved = Vec::with_capacity(cfg.mpoints.len());
    let mut max_variation_error = 0.0_f64;
    for (v, xi) in cfg.mpoints.iter().enumerate() {
        let xi2 = step.apply(xi);
        if !xi2.is_proper() {
            return Err(GeometryError::NotProper(xi2.height()).into());
        }
        // relative form keeps f' = f exact when the map is the identity
        let f2 = cfg.label.0[v] - (xi2.height() / xi.height()).ln();
        let predicted = induced_label_variation(g, project(xi)?.p);
        let f = cfg.label.0[v];
        if eps != 0.0 {
            max_variation_error = max_variation_error.max(((f2 - f) / eps - predicted).abs());
        }
        moved.push(f2);
    }
    let transported = Label(moved);
    let max_curvature = curvature(aug, cs, &transported)?.max_abs();
    Ok(MobiusReport { label: cfg.label, transported, max_curvature, max_variation_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{augment, validate_disk};
    use crate::conformal::tests::{hex_aug, packing_structure};

    fn hex_config() -> (AugmentedDisk, ConformalStructure, Label) {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let mut f = vec![0.0; 8];
        f[7] = 3f64.ln();
        (aug, cs, Label(f))
    }

    #[test]
    fn hex_constraint_matrix_has_expected_shape_and_rank() {
        let (aug, cs, f) = hex_config();
        let cfg = realize_unit_disk(&aug, &cs, &f).unwrap();
        let m = constraint_matrix(&aug, &cfg.mpoints);
        assert_eq!((m.nrows(), m.ncols()), (26, 32));
        assert_eq!(m.nrows(), 4 * aug.vertex_count() - 6);
        for v in 0..8 {
            let blocks = (0..8).filter(|&w| (0..4).any(|k| m[(v, 4 * w + k)] != 0.0)).count();
            assert_eq!(blocks, 1);
        }
        // Lorentz algebra directions M·ξ lie in the kernel
        for gen in InfinitesimalMobius::basis() {
            let gm = gen.generator_matrix();
            let dx = nalgebra::DVector::from_iterator(32, cfg.mpoints.iter().flat_map(|x| (gm * x.to_vector()).iter().copied().collect::<Vec<_>>()));
            assert!((&m * dx).amax() < 1e-12);
        }
        let r = numerical_rank(&m, 1e-10);
        assert!(r.rank <= 26);
        assert_eq!(r.singular_values.len(), 26);
    }

    #[test]
    fn tetrahedron_shape() {
        let aug = augment(&validate_disk(&[0, 1, 2], &[[0, 1, 2]]).unwrap());
        let xi = vec![MPoint::new([0.0, 0.0, -1.0, 0.0]); 4];
        let m = constraint_matrix(&aug, &xi);
        assert_eq!((m.nrows(), m.ncols()), (10, 16));
    }

    #[test]
    fn rank_of_trivial_matrices() {
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 4), 1e-10).rank, 0);
        let mut padded = DMatrix::zeros(5, 7);
        for i in 0..5 {
            padded[(i, i)] = 1.0;
        }
        assert_eq!(numerical_rank(&padded, 1e-10).rank, 5);
    }

    #[test]
    fn zero_generator_is_identity() {
        let (aug, cs, f) = hex_config();
        let r = mobius_orbit_check(&aug, &cs, &f, &InfinitesimalMobius::default(), 1e-4).unwrap();
        assert_eq!(r.label, r.transported);
        assert_eq!(r.max_variation_error, 0.0);
    }

    #[test]
    fn dilation_and_translation_generators() {
        let (aug, cs, f) = hex_config();
        let t = InfinitesimalMobius { t: 1.0, ..Default::default() };
        let r = mobius_orbit_check(&aug, &cs, &f, &t, 1e-4).unwrap();
        for (a, b) in r.transported.0.iter().zip(&r.label.0) {
            assert!(((a - b) / 1e-4 - 1.0).abs() < 1e-3);
        }
        assert!(r.max_curvature < 1e-8);

        let ab = InfinitesimalMobius { a: 0.5, b: 0.5, ..Default::default() };
        let r = mobius_orbit_check(&aug, &cs, &f, &ab, 1e-4).unwrap();
        assert!(r.max_variation_error < 1e-3);
        assert!(r.max_curvature <= 100.0 * 1e-8, "{}", r.max_curvature);
    }

    #[test]
    fn large_step_can_leave_the_proper_cone() {
        let (aug, cs, f) = hex_config();
        let t = InfinitesimalMobius { t: 1.0, ..Default::default() };
        assert!(matches!(
            mobius_orbit_check(&aug, &cs, &f, &t, 2.0),
            Err(LayoutError::Geometry(GeometryError::NotProper(_)))
        ));
    }
}
