//! Combinatorial closed disks, their augmentation by an apex vertex, and
//! simplex classification with multiplicities.

use std::collections::{HashMap, VecDeque};

use crate::error::MeshError;

/// Opaque external vertex identifier.
pub type VertexId = u32;

/// A simplex of a 2-complex, by index into the complex's vertex, edge or
/// face list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Simplex {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

/// Read access shared by plain and augmented disks.
pub trait Complex {
    fn vertex_count(&self) -> usize;
    fn edges(&self) -> &[[usize; 2]];
    fn faces(&self) -> &[[usize; 3]];
    fn edge_index(&self, a: usize, b: usize) -> Option<usize>;

    /// Vertex set of a simplex, sorted.
    fn vertices_of(&self, s: Simplex) -> Vec<usize> {
        let mut v = match s {
            Simplex::Vertex(i) => vec![i],
            Simplex::Edge(i) => self.edges()[i].to_vec(),
            Simplex::Face(i) => self.faces()[i].to_vec(),
        };
        v.sort_unstable();
        v
    }

    /// Every simplex: vertices, then edges, then faces.
    fn simplices(&self) -> Vec<Simplex> {
        (0..self.vertex_count())
            .map(Simplex::Vertex)
            .chain((0..self.edges().len()).map(Simplex::Edge))
            .chain((0..self.faces().len()).map(Simplex::Face))
            .collect()
    }

    /// `x ⊆ σ̄`: `x` is `σ` or one of its faces.
    fn is_face_of(&self, x: Simplex, sigma: Simplex) -> bool {
        let vs = self.vertices_of(sigma);
        self.vertices_of(x).iter().all(|v| vs.contains(v))
    }
}

fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

/// A validated triangulated closed disk with coherently oriented faces.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinatorialDisk {
    ids: Vec<VertexId>,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<[usize; 2], usize>,
    boundary_cycle: Vec<usize>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
}

impl CombinatorialDisk {
    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> VertexId {
        self.ids[v]
    }

    pub fn index_of(&self, id: VertexId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Boundary vertices in cyclic order, following the face orientation.
    pub fn boundary_cycle(&self) -> &[usize] {
        &self.boundary_cycle
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn interior_vertex_count(&self) -> usize {
        self.boundary_vertex.iter().filter(|b| !**b).count()
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.boundary_edge.iter().filter(|b| **b).count()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ids.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

impl Complex for CombinatorialDisk {
    fn vertex_count(&self) -> usize {
        self.ids.len()
    }
    fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&edge_key(a, b)).copied()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Validates raw vertex and face lists as a combinatorial closed disk.
///
/// Faces are reoriented coherently, keeping the orientation of the first
/// face.
pub fn validate_disk(
    vertices: &[VertexId],
    faces: &[[VertexId; 3]],
) -> Result<CombinatorialDisk, MeshError> {
    if faces.is_empty() {
        return Err(MeshError::NoFaces);
    }
    let mut index: HashMap<VertexId, usize> = HashMap::with_capacity(vertices.len());
    for (i, &id) in vertices.iter().enumerate() {
        if index.insert(id, i).is_some() {
            return Err(MeshError::DuplicateVertex(id));
        }
    }
    let n = vertices.len();

    let mut tris = Vec::with_capacity(faces.len());
    let mut seen: HashMap<[usize; 3], usize> = HashMap::new();
    for (fi, face) in faces.iter().enumerate() {
        let mut t = [0usize; 3];
        for (k, id) in face.iter().enumerate() {
            t[k] = *index
                .get(id)
                .ok_or(MeshError::UnknownVertex { face: fi, vertex: *id })?;
        }
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(MeshError::DegenerateFace(fi));
        }
        let mut key = t;
        key.sort_unstable();
        if let Some(&other) = seen.get(&key) {
            return Err(MeshError::DuplicateFace(other, fi));
        }
        seen.insert(key, fi);
        tris.push(t);
    }

    let mut edge_faces: HashMap<[usize; 2], Vec<usize>> = HashMap::new();
    for (fi, t) in tris.iter().enumerate() {
        for k in 0..3 {
            edge_faces.entry(edge_key(t[k], t[(k + 1) % 3])).or_default().push(fi);
        }
    }
    let mut edges: Vec<[usize; 2]> = edge_faces.keys().copied().collect();
    edges.sort_unstable();
    for e in &edges {
        if edge_faces[e].len() > 2 {
            return Err(MeshError::NonManifoldEdge(vertices[e[0]], vertices[e[1]]));
        }
    }

    let mut used = vec![false; n];
    for t in &tris {
        for &v in t {
            used[v] = true;
        }
    }
    if let Some(v) = used.iter().position(|u| !u) {
        return Err(MeshError::IsolatedVertex(vertices[v]));
    }

    let mut uf = UnionFind::new(n);
    for e in &edges {
        uf.union(e[0], e[1]);
    }
    let root = uf.find(0);
    if (1..n).any(|v| uf.find(v) != root) {
        return Err(MeshError::Disconnected);
    }

    // each vertex star must be a single fan of faces
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (fi, t) in tris.iter().enumerate() {
        for &v in t {
            star[v].push(fi);
        }
    }
    for v in 0..n {
        let faces_at = &star[v];
        let slot = |f: usize| faces_at.iter().position(|&g| g == f).expect("face in star");
        let mut local = UnionFind::new(faces_at.len());
        for &f in faces_at {
            let t = tris[f];
            for &w in t.iter().filter(|&&w| w != v) {
                let fs = &edge_faces[&edge_key(v, w)];
                if fs.len() == 2 {
                    local.union(slot(fs[0]), slot(fs[1]));
                }
            }
        }
        let r = local.find(0);
        if (1..faces_at.len()).any(|k| local.find(k) != r) {
            return Err(MeshError::PinchedVertex(vertices[v]));
        }
    }

    // boundary: edges in exactly one face must form one simple cycle
    let boundary: Vec<[usize; 2]> =
        edges.iter().copied().filter(|e| edge_faces[e].len() == 1).collect();
    let mut bdeg = vec![0usize; n];
    for e in &boundary {
        bdeg[e[0]] += 1;
        bdeg[e[1]] += 1;
    }
    if boundary.is_empty() || bdeg.iter().any(|&d| d != 0 && d != 2) {
        return Err(MeshError::BoundaryNotSimpleCycle);
    }
    let mut buf = UnionFind::new(n);
    for e in &boundary {
        buf.union(e[0], e[1]);
    }
    let broot = buf.find(boundary[0][0]);
    if (0..n).any(|v| bdeg[v] > 0 && buf.find(v) != broot) {
        return Err(MeshError::BoundaryNotSimpleCycle);
    }

    let chi = n as i64 - edges.len() as i64 + tris.len() as i64;
    if chi != 1 {
        return Err(MeshError::EulerCharacteristic(chi));
    }

    orient(&mut tris, &edge_faces)?;

    // directed boundary edges a→b as they appear in their face
    let mut next = vec![usize::MAX; n];
    for t in &tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if edge_faces[&edge_key(a, b)].len() == 1 {
                next[a] = b;
            }
        }
    }
    let start = (0..n).find(|&v| bdeg[v] > 0).expect("boundary is non-empty");
    let mut boundary_cycle = vec![start];
    let mut v = next[start];
    while v != start {
        boundary_cycle.push(v);
        v = next[v];
    }

    let edge_lookup: HashMap<[usize; 2], usize> =
        edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let boundary_edge = edges.iter().map(|e| edge_faces[e].len() == 1).collect();
    let boundary_vertex = bdeg.iter().map(|&d| d > 0).collect();

    Ok(CombinatorialDisk {
        ids: vertices.to_vec(),
        faces: tris,
        edges,
        edge_lookup,
        boundary_cycle,
        boundary_vertex,
        boundary_edge,
    })
}

fn has_directed(t: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|k| t[k] == a && t[(k + 1) % 3] == b)
}

fn orient(
    tris: &mut [[usize; 3]],
    edge_faces: &HashMap<[usize; 2], Vec<usize>>,
) -> Result<(), MeshError> {
    let mut done = vec![false; tris.len()];
    let mut queue = VecDeque::from([0usize]);
    done[0] = true;
    while let Some(f) = queue.pop_front() {
        let t = tris[f];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            for &g in &edge_faces[&edge_key(a, b)] {
                if g == f {
                    continue;
                }
                if done[g] {
                    if has_directed(&tris[g], a, b) {
                        return Err(MeshError::NonOrientable);
                    }
                    continue;
                }
                if has_directed(&tris[g], a, b) {
                    tris[g].swap(1, 2);
                }
                done[g] = true;
                queue.push_back(g);
            }
        }
    }
    if done.iter().all(|d| *d) {
        Ok(())
    } else {
        Err(MeshError::Disconnected)
    }
}

/// Which sheet a simplex of the augmented disk belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimplexClass {
    Interior,
    Boundary,
    Augmented,
}

/// The disk together with an apex joined to every boundary vertex.
///
/// Indices: base vertices `0..n`, apex `n`; base edges first, then one
/// augmented edge per boundary vertex in boundary-cycle order; base faces
/// first, then one augmented face per boundary edge. Augmented faces are
/// stored as `(b, a, apex)` for the boundary edge `a→b`, the orientation
/// that makes the whole complex a coherently oriented sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDisk {
    base: CombinatorialDisk,
    apex_id: VertexId,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    edge_lookup: HashMap<[usize; 2], usize>,
}

pub fn augment(disk: &CombinatorialDisk) -> AugmentedDisk {
    let n = disk.vertex_count();
    let apex = n;
    let mut edges = disk.edges.clone();
    let mut faces = disk.faces.clone();
    for &v in &disk.boundary_cycle {
        edges.push([v, apex]);
    }
    let cyc = &disk.boundary_cycle;
    for k in 0..cyc.len() {
        let (a, b) = (cyc[k], cyc[(k + 1) % cyc.len()]);
        faces.push([b, a, apex]);
    }
    let edge_lookup = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let apex_id = disk.ids.iter().max().map_or(0, |m| m + 1);
    AugmentedDisk { base: disk.clone(), apex_id, edges, faces, edge_lookup }
}

impl AugmentedDisk {
    pub fn base(&self) -> &CombinatorialDisk {
        &self.base
    }

    pub fn apex(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn apex_id(&self) -> VertexId {
        self.apex_id
    }

    /// External id of any vertex, apex included.
    pub fn id(&self, v: usize) -> VertexId {
        if v == self.apex() {
            self.apex_id
        } else {
            self.base.id(v)
        }
    }

    pub fn base_edge_count(&self) -> usize {
        self.base.edges.len()
    }

    pub fn base_face_count(&self) -> usize {
        self.base.faces.len()
    }

    pub fn is_augmented_face(&self, f: usize) -> bool {
        f >= self.base_face_count()
    }

    /// `+1` for faces of the disk, `−1` for the folded augmented faces.
    pub fn face_sign(&self, f: usize) -> f64 {
        if self.is_augmented_face(f) {
            -1.0
        } else {
            1.0
        }
    }

    /// Augmented edge joining the apex to boundary vertex `v`.
    pub fn apex_edge(&self, v: usize) -> Option<usize> {
        self.edge_index(v, self.apex())
    }

    pub fn vertex_class(&self, v: usize) -> SimplexClass {
        if v == self.apex() {
            SimplexClass::Augmented
        } else if self.base.is_boundary_vertex(v) {
            SimplexClass::Boundary
        } else {
            SimplexClass::Interior
        }
    }

    pub fn edge_class(&self, e: usize) -> SimplexClass {
        if e >= self.base_edge_count() {
            SimplexClass::Augmented
        } else if self.base.is_boundary_edge(e) {
            SimplexClass::Boundary
        } else {
            SimplexClass::Interior
        }
    }

    pub fn face_class(&self, f: usize) -> SimplexClass {
        if self.is_augmented_face(f) {
            SimplexClass::Augmented
        } else {
            SimplexClass::Interior
        }
    }

    pub fn classify(&self, s: Simplex) -> SimplexClass {
        match s {
            Simplex::Vertex(v) => self.vertex_class(v),
            Simplex::Edge(e) => self.edge_class(e),
            Simplex::Face(f) => self.face_class(f),
        }
    }
}

impl Complex for AugmentedDisk {
    fn vertex_count(&self) -> usize {
        self.base.vertex_count() + 1
    }
    fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&edge_key(a, b)).copied()
    }
}

/// Class of every simplex, in [`Complex::simplices`] order.
pub fn classify(aug: &AugmentedDisk) -> Vec<(Simplex, SimplexClass)> {
    aug.simplices().into_iter().map(|s| (s, aug.classify(s))).collect()
}

/// Integer multiplicity per simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityAssignment {
    pub vertex: Vec<i32>,
    pub edge: Vec<i32>,
    pub face: Vec<i32>,
}

impl MultiplicityAssignment {
    pub fn get(&self, s: Simplex) -> Option<i32> {
        match s {
            Simplex::Vertex(i) => self.vertex.get(i).copied(),
            Simplex::Edge(i) => self.edge.get(i).copied(),
            Simplex::Face(i) => self.face.get(i).copied(),
        }
    }

    /// Vertex 1, edge −1, face 1 on every simplex: a plain surface of
    /// multiplicity one.
    pub fn plain<C: Complex + ?Sized>(c: &C) -> Self {
        MultiplicityAssignment {
            vertex: vec![1; c.vertex_count()],
            edge: vec![-1; c.edges().len()],
            face: vec![1; c.faces().len()],
        }
    }
}

fn standard_value(class: SimplexClass, dim: usize) -> i32 {
    use SimplexClass::*;
    match (dim, class) {
        (0, Interior) => 1,
        (0, Boundary) => 0,
        (0, Augmented) => -1,
        (1, Interior) => -1,
        (1, Boundary) => 0,
        (1, Augmented) => 1,
        (2, Interior) => 1,
        (2, Augmented) => -1,
        _ => unreachable!("faces are interior or augmented"),
    }
}

/// The multiplicity table for the folded double disk.
pub fn standard_multiplicities(aug: &AugmentedDisk) -> MultiplicityAssignment {
    MultiplicityAssignment {
        vertex: (0..aug.vertex_count()).map(|v| standard_value(aug.vertex_class(v), 0)).collect(),
        edge: (0..aug.edges().len()).map(|e| standard_value(aug.edge_class(e), 1)).collect(),
        face: (0..aug.faces().len()).map(|f| standard_value(aug.face_class(f), 2)).collect(),
    }
}

/// `μ(x) = Σ μ(σ)` over the closed star of `x` (every `σ` with `x ⊆ σ̄`,
/// `x` itself included).
pub fn pointwise_multiplicity<C: Complex + ?Sized>(
    c: &C,
    mu: &MultiplicityAssignment,
    x: Simplex,
) -> i32 {
    c.simplices()
        .into_iter()
        .filter(|&s| c.is_face_of(x, s))
        .map(|s| mu.get(s).unwrap_or(0))
        .sum()
}
