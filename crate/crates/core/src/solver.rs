//! Numerical search for flat labels on the augmented disk.
//!
//! The curvature Jacobian is singular at every flat label (constants and
//! the Möbius directions lie in its kernel), so Newton steps go through a
//! truncated pseudoinverse rather than an inverse.

use std::time::{Duration, Instant};

use nalgebra::DVector;

use crate::complex::{AugmentedDisk, Complex};
use crate::conformal::{check_admissible, curvature, curvature_jacobian, ConformalStructure, CurvatureVector, Label};
use crate::error::SolveError;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    /// Convergence threshold on `‖K‖∞`.
    pub tol: f64,
    pub max_iter: usize,
    /// Singular values below `svd_cutoff · σ_max` are treated as zero.
    pub svd_cutoff: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-10, max_iter: 100, svd_cutoff: 1e-10, max_halvings: 40 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub label: Label,
    pub curvature: CurvatureVector,
    pub iterations: usize,
    /// `‖K‖∞` at the start and after every accepted step.
    pub residuals: Vec<f64>,
    pub elapsed: Duration,
}

fn sup(k: &CurvatureVector) -> f64 {
    k.max_abs()
}

/// Minimum-norm solution of `J·x = b`, truncating small singular values.
pub fn pseudo_solve(j: &nalgebra::DMatrix<f64>, b: &DVector<f64>, cutoff: f64) -> Result<DVector<f64>, SolveError> {
    let svd = j.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Ok(DVector::zeros(j.ncols()));
    }
    svd.solve(b, cutoff * smax).map_err(|_| SolveError::Svd)
}

/// Newton's method on `K(f) = 0` with step `−J⁺K` and a halving line search
/// that keeps every iterate admissible and strictly lowers `‖K‖∞`.
pub fn newton_flat(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f0: &Label,
    opts: &NewtonOptions,
) -> Result<NewtonReport, SolveError> {
    let start = Instant::now();
    if let Some(err) = check_admissible(aug, cs, f0) {
        return Err(SolveError::InadmissibleStart(err));
    }
    let mut f = f0.clone();
    let mut k = curvature(aug, cs, &f).map_err(SolveError::InadmissibleStart)?;
    let mut residuals = vec![sup(&k)];
    let mut iterations = 0;

    while sup(&k) > opts.tol {
        if iterations == opts.max_iter {
            return Err(SolveError::MaxIterations(opts.max_iter, sup(&k)));
        }
        let j = curvature_jacobian(aug, cs, &f).map_err(SolveError::InadmissibleStart)?;
        let rhs = DVector::from_column_slice(k.values());
        let step = pseudo_solve(&j, &rhs, opts.svd_cutoff)?;

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = Label(f.0.iter().zip(step.iter()).map(|(x, s)| x - scale * s).collect());
            if let Ok(kt) = curvature(aug, cs, &trial) {
                if sup(&kt) < sup(&k) {
                    accepted = Some((trial, kt));
                    break;
                }
            }
            scale *= 0.5;
        }
        let Some((nf, nk)) = accepted else {
            return Err(SolveError::LineSearchStalled { iteration: iterations, residual: sup(&k) });
        };
        f = nf;
        k = nk;
        iterations += 1;
        residuals.push(sup(&k));
    }

    Ok(NewtonReport { label: f, curvature: k, iterations, residuals, elapsed: start.elapsed() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    pub dt: f64,
    pub t_end: f64,
    pub max_halvings: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { dt: 0.01, t_end: 50.0, max_halvings: 30 }
    }
}

/// One recorded state of the curvature flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub time: f64,
    pub label: Label,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowReport {
    pub trajectory: Vec<FlowState>,
    pub elapsed: Duration,
}

impl FlowReport {
    pub fn last(&self) -> &FlowState {
        self.trajectory.last().expect("trajectory starts with the initial state")
    }
}

/// `df_v/dt = −K_v` off the apex, `df_apex/dt = +K_apex`.
fn flow_velocity(aug: &AugmentedDisk, cs: &ConformalStructure, f: &Label) -> Option<(Vec<f64>, CurvatureVector)> {
    let k = curvature(aug, cs, f).ok()?;
    let apex = aug.apex();
    let v = k.values().iter().enumerate().map(|(i, &kv)| if i == apex { kv } else { -kv }).collect();
    Some((v, k))
}

fn axpy(f: &Label, h: f64, v: &[f64]) -> Label {
    Label(f.0.iter().zip(v).map(|(x, d)| x + h * d).collect())
}

/// Classical RK4 integration of the curvature flow with fixed step `dt`;
/// a step whose stages leave the admissible region is retried with half
/// the step, at most `max_halvings` times.
pub fn curvature_flow(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f0: &Label,
    opts: &FlowOptions,
) -> Result<FlowReport, SolveError> {
    let start = Instant::now();
    if let Some(err) = check_admissible(aug, cs, f0) {
        return Err(SolveError::InadmissibleStart(err));
    }
    let (mut vel, k0) = flow_velocity(aug, cs, f0).expect("admissible start");
    let mut f = f0.clone();
    let mut t = 0.0;
    let mut trajectory = vec![FlowState { time: 0.0, label: f.clone(), residual: k0.max_abs() }];

    while t < opts.t_end - 1e-12 * opts.dt {
        let full = opts.dt.min(opts.t_end - t);
        let mut h = full;
        let mut halvings = 0;
        let (next, next_vel, next_k) = loop {
            if let Some(res) = rk4_step(aug, cs, &f, &vel, h) {
                break res;
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(SolveError::StepCollapse { time: t });
            }
            h *= 0.5;
        };
        f = next;
        vel = next_vel;
        t += h;
        trajectory.push(FlowState { time: t, label: f.clone(), residual: next_k.max_abs() });
    }
    Ok(FlowReport { trajectory, elapsed: start.elapsed() })
}

fn rk4_step(
    aug: &AugmentedDisk,
    cs: &ConformalStructure,
    f: &Label,
    k1: &[f64],
    h: f64,
) -> Option<(Label, Vec<f64>, CurvatureVector)> {
    let (k2, _) = flow_velocity(aug, cs, &axpy(f, 0.5 * h, k1))?;
    let (k3, _) = flow_velocity(aug, cs, &axpy(f, 0.5 * h, &k2))?;
    let (k4, _) = flow_velocity(aug, cs, &axpy(f, h, &k3))?;
    let incr: Vec<f64> = (0..k1.len()).map(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0).collect();
    let next = axpy(f, h, &incr);
    let (vel, k) = flow_velocity(aug, cs, &next)?;
    Some((next, vel, k))
}

/// Shifts the label so that the apex entry is zero. Curvature is unchanged.
pub fn gauge_normalize(aug: &AugmentedDisk, f: &Label) -> Label {
    f.shifted(-f.0[aug.apex()])
}

/// `f_apex − mean_{∂S} f_v`. Invariant under uniform shifts, and under
/// infinitesimal Möbius motion whenever the boundary is centred on the
/// apex, as for symmetric configurations.
pub fn boundary_gap(aug: &AugmentedDisk, f: &Label) -> f64 {
    let cyc = aug.base().boundary_cycle();
    let mean = cyc.iter().map(|&v| f.0[v]).sum::<f64>() / cyc.len() as f64;
    f.0[aug.apex()] - mean
}

/// `f ≡ f_S` on the disk and `f_apex = log(2·max_{∂S} e^{f_v} + 1)`.
pub fn initial_label(aug: &AugmentedDisk, disk_values: Option<&[f64]>) -> Label {
    let n = aug.vertex_count() - 1;
    let mut f: Vec<f64> = match disk_values {
        Some(v) => v[..n].to_vec(),
        None => vec![0.0; n],
    };
    let rim = aug
        .base()
        .boundary_cycle()
        .iter()
        .map(|&v| f[v].exp())
        .fold(f64::NEG_INFINITY, f64::max);
    f.push((2.0 * rim + 1.0).ln());
    Label(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::tests::{hex_aug, packing_structure};

    fn gap(aug: &AugmentedDisk, f: &Label) -> f64 {
        boundary_gap(aug, f)
    }

    #[test]
    fn newton_hex_tangent() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let mut f0 = vec![0.0; 8];
        f0[7] = 2.8f64.ln();
        let rep = newton_flat(&aug, &cs, &Label(f0), &NewtonOptions::default()).unwrap();
        assert!(rep.curvature.max_abs() <= 1e-10);
        assert!((gap(&aug, &rep.label) - 3f64.ln()).abs() < 1e-8);
        // the pseudoinverse may slide along the Möbius orbit by O(residual)
        let ring = rep.label.0[1];
        assert!(rep.label.0[..7].iter().all(|x| (x - ring).abs() < 1e-6));
        assert!(rep.residuals.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn newton_hex_orthogonal() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, 0.0);
        let rep = newton_flat(&aug, &cs, &initial_label(&aug, None), &NewtonOptions::default()).unwrap();
        assert!((gap(&aug, &rep.label) - 0.5 * 3f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn newton_from_flat_is_idle() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let mut f = vec![0.0; 8];
        f[7] = 3f64.ln();
        let rep = newton_flat(&aug, &cs, &Label(f.clone()), &NewtonOptions::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.label.0, f);
    }

    #[test]
    fn newton_rejects_inadmissible_start() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let mut f = vec![0.0; 8];
        f[7] = -10.0;
        assert!(matches!(
            newton_flat(&aug, &cs, &Label(f), &NewtonOptions::default()),
            Err(SolveError::InadmissibleStart(_))
        ));
    }

    #[test]
    fn newton_reports_max_iterations() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let opts = NewtonOptions { max_iter: 1, ..Default::default() };
        let mut f0 = vec![0.0; 8];
        f0[7] = 2.8f64.ln();
        assert!(matches!(
            newton_flat(&aug, &cs, &Label(f0), &opts),
            Err(SolveError::MaxIterations(1, _))
        ));
    }

    #[test]
    fn flow_is_stationary_at_flat_label() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let mut f = vec![0.0; 8];
        f[7] = 3f64.ln();
        let opts = FlowOptions { t_end: 1.0, ..Default::default() };
        let rep = curvature_flow(&aug, &cs, &Label(f), &opts).unwrap();
        assert!(rep.trajectory.iter().all(|s| s.residual <= 1e-12));
        assert!((rep.last().time - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flow_is_gauge_invariant() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let f = Label(vec![0.02, -0.03, 0.01, 0.0, 0.04, -0.01, 0.03, 3f64.ln() + 0.02]);
        let opts = FlowOptions { t_end: 0.5, ..Default::default() };
        let a = curvature_flow(&aug, &cs, &f, &opts).unwrap();
        let b = curvature_flow(&aug, &cs, &f.shifted(0.7), &opts).unwrap();
        for (x, y) in a.trajectory.iter().zip(&b.trajectory) {
            assert!((x.residual - y.residual).abs() < 1e-12);
        }
    }

    #[test]
    fn gauge_normalization() {
        let aug = hex_aug();
        let cs = packing_structure(&aug, -1.0);
        let mut f = vec![0.0; 8];
        f[7] = 3f64.ln();
        let g = gauge_normalize(&aug, &Label(f.clone()));
        assert_eq!(g.0[7], 0.0);
        assert!((g.0[0] + 3f64.ln()).abs() < 1e-15);
        assert_eq!(gauge_normalize(&aug, &g), g);
        let ka = curvature(&aug, &cs, &Label(f)).unwrap();
        let kb = curvature(&aug, &cs, &g).unwrap();
        assert!(ka.0.iter().zip(&kb.0).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn initial_label_default() {
        let aug = hex_aug();
        let f = initial_label(&aug, None);
        assert!((f.0[7] - 3f64.ln()).abs() < 1e-15);
        assert!(f.0[..7].iter().all(|x| *x == 0.0));
    }
}
