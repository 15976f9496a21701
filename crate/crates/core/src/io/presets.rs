//! Built-in problem instances.

use std::fmt;
use std::str::FromStr;

use crate::complex::{augment, validate_disk, Complex, VertexId};
use crate::conformal::ConformalStructure;
use crate::error::ProblemError;
use crate::io::problem::Problem;
use crate::layout::BoundaryScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    HexTangent,
    HexOrthogonal,
    HexInscribed,
    /// Hexagonal patch of the triangular lattice with `n` rings around a
    /// centre vertex.
    RingLattice(usize),
    Triangle,
}

impl FromStr for Preset {
    type Err = ProblemError;

    /// Accepts `ring_lattice`, `ring_lattice:3` and `ring_lattice(3)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || ProblemError::UnknownPreset(s.to_string());
        match s {
            "hex_tangent" => return Ok(Preset::HexTangent),
            "hex_orthogonal" => return Ok(Preset::HexOrthogonal),
            "hex_inscribed" => return Ok(Preset::HexInscribed),
            "triangle" => return Ok(Preset::Triangle),
            "ring_lattice" => return Ok(Preset::RingLattice(2)),
            _ => {}
        }
        let arg = s
            .strip_prefix("ring_lattice:")
            .or_else(|| s.strip_prefix("ring_lattice(").and_then(|r| r.strip_suffix(')')))
            .ok_or_else(unknown)?;
        match arg.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Preset::RingLattice(n)),
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::HexTangent => f.write_str("hex_tangent"),
            Preset::HexOrthogonal => f.write_str("hex_orthogonal"),
            Preset::HexInscribed => f.write_str("hex_inscribed"),
            Preset::RingLattice(n) => write!(f, "ring_lattice({n})"),
            Preset::Triangle => f.write_str("triangle"),
        }
    }
}

impl Preset {
    pub fn fixed_scenario(&self) -> Option<BoundaryScenario> {
        match self {
            Preset::HexTangent => Some(BoundaryScenario::Tangency),
            Preset::HexOrthogonal => Some(BoundaryScenario::Orthogonal),
            Preset::HexInscribed => Some(BoundaryScenario::Inscribed),
            Preset::RingLattice(_) | Preset::Triangle => None,
        }
    }

    /// Boundary scenario this preset is built with, given an optional
    /// override.
    pub fn scenario(&self, requested: Option<BoundaryScenario>) -> Result<BoundaryScenario, ProblemError> {
        match (self.fixed_scenario(), requested) {
            (Some(fixed), Some(r)) if fixed != r => Err(ProblemError::FixedScenario(self.to_string())),
            (Some(fixed), _) => Ok(fixed),
            (None, r) => Ok(r.unwrap_or(BoundaryScenario::Tangency)),
        }
    }
}

/// `(vertices, faces)` of the `n`-ring hexagonal lattice patch. Vertex ids
/// run row by row from the bottom.
pub fn ring_lattice(n: usize) -> (Vec<VertexId>, Vec<[VertexId; 3]>) {
    let n = n as i64;
    let inside = |q: i64, r: i64| q.abs().max(r.abs()).max((q + r).abs()) <= n;
    let mut coords = Vec::new();
    for r in -n..=n {
        for q in -n..=n {
            if inside(q, r) {
                coords.push((q, r));
            }
        }
    }
    let id = |q: i64, r: i64| coords.iter().position(|&c| c == (q, r)).map(|i| i as VertexId);
    let mut faces = Vec::new();
    // anchors outside the patch can still carry a second-kind triangle
    for (q, r) in (-n - 1..=n).flat_map(|r| (-n - 1..=n).map(move |q| (q, r))) {
        // with e1 = (1, 0) and e2 = (½, √3/2) both triangles are counter-clockwise
        if let (Some(a), Some(b), Some(c)) = (id(q, r), id(q + 1, r), id(q, r + 1)) {
            faces.push([a, b, c]);
        }
        if let (Some(a), Some(b), Some(c)) = (id(q + 1, r), id(q + 1, r + 1), id(q, r + 1)) {
            faces.push([a, b, c]);
        }
    }
    ((0..coords.len() as VertexId).collect(), faces)
}

fn hex_flower() -> (Vec<VertexId>, Vec<[VertexId; 3]>) {
    let faces = (1..=6).map(|k| [0, k, k % 6 + 1]).collect();
    ((0..7).collect(), faces)
}

/// `(α on the disk, η on disk edges, μ)` for a boundary scenario.
fn scenario_values(s: BoundaryScenario) -> (f64, f64, f64) {
    match s {
        BoundaryScenario::Tangency => (1.0, 1.0, -1.0),
        BoundaryScenario::Orthogonal => (1.0, 1.0, 0.0),
        BoundaryScenario::Inscribed => (0.0, 0.5, 0.0),
    }
}

/// Builds a preset. `scenario` applies to `ring_lattice` and `triangle`
/// (default tangency); the hexagonal presets only accept their own.
pub fn preset(p: Preset, scenario: Option<BoundaryScenario>) -> Result<Problem, ProblemError> {
    let s = p.scenario(scenario)?;
    let (ids, faces) = match p {
        Preset::HexTangent | Preset::HexOrthogonal | Preset::HexInscribed => hex_flower(),
        Preset::RingLattice(n) => ring_lattice(n),
        Preset::Triangle => (vec![0, 1, 2], vec![[0, 1, 2]]),
    };
    let aug = augment(&validate_disk(&ids, &faces)?);
    let (alpha, eta, mu) = scenario_values(s);
    let mut a = vec![alpha; aug.vertex_count()];
    a[aug.apex()] = 1.0;
    let e = (0..aug.edges().len()).map(|e| if e < aug.base_edge_count() { eta } else { mu }).collect();
    Ok(Problem { aug, structure: ConformalStructure { alpha: a, eta: e }, f_init: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in [Preset::HexTangent, Preset::HexOrthogonal, Preset::HexInscribed, Preset::RingLattice(3), Preset::Triangle] {
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
        assert_eq!("ring_lattice:4".parse::<Preset>().unwrap(), Preset::RingLattice(4));
        assert!(matches!("ring_lattice(0)".parse::<Preset>(), Err(ProblemError::UnknownPreset(_))));
        assert!(matches!("square".parse::<Preset>(), Err(ProblemError::UnknownPreset(_))));
    }

    #[test]
    fn lattice_counts() {
        for n in 1..5usize {
            let (v, f) = ring_lattice(n);
            assert_eq!(v.len(), 1 + 3 * n * (n + 1));
            assert_eq!(f.len(), 6 * n * n);
            let d = validate_disk(&v, &f).unwrap();
            assert_eq!(d.boundary_cycle().len(), 6 * n);
            // validation keeps the input orientation
            assert_eq!(d.faces().iter().map(|t| t.map(|x| x as VertexId)).collect::<Vec<_>>(), f);
        }
    }

    #[test]
    fn scenario_tables() {
        let p = preset(Preset::HexTangent, None).unwrap();
        assert_eq!(p.structure.alpha, vec![1.0; 8]);
        assert_eq!(&p.structure.eta[..12], &[1.0; 12]);
        assert_eq!(&p.structure.eta[12..], &[-1.0; 6]);

        let p = preset(Preset::HexOrthogonal, None).unwrap();
        assert_eq!(&p.structure.eta[12..], &[0.0; 6]);

        let p = preset(Preset::HexInscribed, Some(BoundaryScenario::Inscribed)).unwrap();
        assert_eq!(&p.structure.alpha[..7], &[0.0; 7]);
        assert_eq!(p.structure.alpha[7], 1.0);
        assert_eq!(&p.structure.eta[..12], &[0.5; 12]);
        assert_eq!(&p.structure.eta[12..], &[0.0; 6]);

        assert!(matches!(
            preset(Preset::HexTangent, Some(BoundaryScenario::Orthogonal)),
            Err(ProblemError::FixedScenario(_))
        ));
        let t = preset(Preset::Triangle, Some(BoundaryScenario::Inscribed)).unwrap();
        assert_eq!(t.aug.vertex_count(), 4);
        assert_eq!(preset(Preset::RingLattice(2), None).unwrap().aug.vertex_count(), 20);
    }
}
