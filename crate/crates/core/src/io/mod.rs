//! Problem files, presets and SVG output.

mod json;
mod presets;
mod problem;
mod svg;

pub use json::{to_canonical_json, CanonicalFormatter};
pub use presets::{preset, ring_lattice, Preset};
pub use problem::{parse_problem, problem_from_value, problem_to_value, serialize_problem, Problem, APEX_KEY};
pub use svg::{render_svg, SvgOptions};
