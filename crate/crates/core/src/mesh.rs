//! Triangulations of the two model domains with a single global edge orientation.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::{Point2, Vector2};

use crate::error::{Error, Result};
use crate::geometry::TriangleGeometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainId {
    UnitSquare,
    QuarterDisk,
}

impl DomainId {
    /// Area of the continuous domain.
    pub fn area(self) -> f64 {
        match self {
            DomainId::UnitSquare => 1.0,
            DomainId::QuarterDisk => std::f64::consts::FRAC_PI_4,
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainId::UnitSquare => f.write_str("unit_square"),
            DomainId::QuarterDisk => f.write_str("quarter_disk"),
        }
    }
}

/// Boundary condition attached to an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeMarker {
    Interior,
    /// `u = 0`, imposed naturally by the discrete forms.
    DirichletZero,
    /// Zero normal flux, imposed essentially on the edge DOF.
    FluxZero,
}

impl fmt::Display for EdgeMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeMarker::Interior => "interior",
            EdgeMarker::DirichletZero => "dirichlet_zero",
            EdgeMarker::FluxZero => "flux_zero",
        })
    }
}

impl FromStr for EdgeMarker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(EdgeMarker::Interior),
            "dirichlet_zero" => Ok(EdgeMarker::DirichletZero),
            "flux_zero" => Ok(EdgeMarker::FluxZero),
            other => Err(Error::Parse(format!("unknown edge marker `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    /// Endpoint vertex indices, lower index first.
    pub vertices: [usize; 2],
    /// Unit normal shared by both adjacent triangles.
    pub normal: Vector2<f64>,
    pub triangles: [Option<usize>; 2],
    pub marker: EdgeMarker,
    pub length: f64,
}

impl EdgeRecord {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }

    pub fn adjacent(&self) -> impl Iterator<Item = usize> + '_ {
        self.triangles.iter().flatten().copied()
    }
}

/// Vertices and counterclockwise triangles before edge enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<Point2<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub domain: DomainId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point2<f64>>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<EdgeRecord>,
    /// `triangle_edges[t][i]` is the edge opposite local vertex `i`.
    triangle_edges: Vec<[usize; 3]>,
    domain: DomainId,
}

impl Mesh {
    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn domain(&self) -> DomainId {
        self.domain
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point2<f64>; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    /// Geometry of triangle `t`, including the orientation signs of its edges
    /// relative to the global edge normals.
    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        // Triangles were validated on construction.
        let mut geom = TriangleGeometry::new(self.triangle_vertices(t))
            .expect("mesh triangles are nondegenerate");
        let edges = self.triangle_edges[t];
        for i in 0..3 {
            let n_f = self.edges[edges[i]].normal;
            geom.signs[i] = if geom.normals[i].dot(&n_f) > 0.0 { 1.0 } else { -1.0 };
        }
        geom
    }

    /// Maximum element diameter.
    pub fn h(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| self.geometry(t).diameter())
            .fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.geometry(t).area).sum()
    }

    /// Writes the plain-text dump: `nv nt ne`, then vertices, triangles and edges.
    pub fn write_dump<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {} {}", self.num_vertices(), self.num_triangles(), self.num_edges())?;
        for v in &self.vertices {
            writeln!(out, "{:.17e} {:.17e}", v.x, v.y)?;
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.vertices[0], e.vertices[1], e.marker)?;
        }
        Ok(())
    }

    /// Parses a dump written by [`Mesh::write_dump`]. Edges are re-derived from the
    /// triangles and checked against the listed edge records.
    pub fn read_dump<R: BufRead>(input: R, domain: DomainId) -> Result<Mesh> {
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("unexpected end of input".into()))?
                .map_err(Error::from)
        };
        let header = next()?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad header `{header}`"))))
            .collect::<Result<_>>()?;
        let [nv, nt, ne] = counts[..] else {
            return Err(Error::Parse(format!("bad header `{header}`")));
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = next()?;
            let xy: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad vertex `{line}`"))))
                .collect::<Result<_>>()?;
            if xy.len() != 2 {
                return Err(Error::Parse(format!("bad vertex `{line}`")));
            }
            vertices.push(Point2::new(xy[0], xy[1]));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let line = next()?;
            let ids: Vec<usize> = line
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad triangle `{line}`"))))
                .collect::<Result<_>>()?;
            if ids.len() != 3 || ids.iter().any(|&i| i >= nv) {
                return Err(Error::Parse(format!("bad triangle `{line}`")));
            }
            triangles.push([ids[0], ids[1], ids[2]]);
        }
        let mesh = build_edge_topology(RawMesh { vertices, triangles, domain })?;
        if mesh.num_edges() != ne {
            return Err(Error::Parse(format!("expected {ne} edges, topology has {}", mesh.num_edges())));
        }
        for e in &mesh.edges {
            let line = next()?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("bad edge `{line}`")));
            }
            let i: usize = parts[0].parse().map_err(|_| Error::Parse(format!("bad edge `{line}`")))?;
            let j: usize = parts[1].parse().map_err(|_| Error::Parse(format!("bad edge `{line}`")))?;
            let marker: EdgeMarker = parts[2].parse()?;
            if [i, j] != e.vertices || marker != e.marker {
                return Err(Error::Parse(format!("edge `{line}` disagrees with topology")));
            }
        }
        Ok(mesh)
    }
}

fn square_lattice(l: usize) -> (Vec<Point2<f64>>, Vec<[usize; 3]>) {
    let n = l + 1;
    let step = 1.0 / l as f64;
    let vertices = (0..n)
        .flat_map(|j| (0..n).map(move |i| Point2::new(i as f64 * step, j as f64 * step)))
        .collect();
    let mut triangles = Vec::with_capacity(2 * l * l);
    for j in 0..l {
        for i in 0..l {
            let v00 = j * n + i;
            let v10 = v00 + 1;
            let v01 = v00 + n;
            let v11 = v01 + 1;
            // split along the diagonal parallel to x1 = x2
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    (vertices, triangles)
}

/// Uniform mesh of `[0,1]^2` with `2 L^2` triangles.
pub fn build_square_mesh(l: usize) -> Result<Mesh> {
    if l == 0 {
        return Err(Error::Config("L must be at least 1".into()));
    }
    let (vertices, triangles) = square_lattice(l);
    build_edge_topology(RawMesh { vertices, triangles, domain: DomainId::UnitSquare })
}

/// Maps a node of the unit square onto the quarter disk: concentric squares
/// `max(x1, x2) = m` go to concentric arcs of radius `m`.
pub fn map_to_quarter_disk(p: Point2<f64>) -> Point2<f64> {
    let m = p.x.max(p.y);
    if m == 0.0 {
        return Point2::origin();
    }
    let rho = p.coords.norm();
    Point2::from(p.coords * (m / rho))
}

/// Quarter of the unit disk in the first quadrant, `2 L^2` triangles.
pub fn build_quarter_disk_mesh(l: usize) -> Result<Mesh> {
    if l == 0 {
        return Err(Error::Config("L must be at least 1".into()));
    }
    let (vertices, triangles) = square_lattice(l);
    let vertices = vertices.into_iter().map(map_to_quarter_disk).collect();
    build_edge_topology(RawMesh { vertices, triangles, domain: DomainId::QuarterDisk })
}

fn boundary_marker(domain: DomainId, a: Point2<f64>, b: Point2<f64>) -> EdgeMarker {
    match domain {
        DomainId::UnitSquare => EdgeMarker::DirichletZero,
        DomainId::QuarterDisk => {
            if (a.x == 0.0 && b.x == 0.0) || (a.y == 0.0 && b.y == 0.0) {
                EdgeMarker::FluxZero
            } else {
                EdgeMarker::DirichletZero
            }
        }
    }
}

/// Enumerates edges sorted by `(min vertex, max vertex)` and fills normals,
/// adjacency and boundary markers.
pub fn build_edge_topology(raw: RawMesh) -> Result<Mesh> {
    let RawMesh { vertices, triangles, domain } = raw;
    for (index, tri) in triangles.iter().enumerate() {
        let [a, b, c] = tri.map(|v| vertices[v]);
        let area = 0.5 * (b - a).perp(&(c - a));
        if !(area > 0.0) {
            return Err(Error::DegenerateElement { index, area });
        }
    }

    let mut adjacency: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (p, q) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
            let key = (p.min(q), p.max(q));
            let entry = adjacency.entry(key).or_default();
            entry.push(t);
            if entry.len() > 2 {
                return Err(Error::NonManifoldEdge(key.0, key.1));
            }
        }
    }

    let mut index_of = BTreeMap::new();
    let edges: Vec<EdgeRecord> = adjacency
        .into_iter()
        .enumerate()
        .map(|(k, ((i, j), tris))| {
            index_of.insert((i, j), k);
            let tangent = vertices[j] - vertices[i];
            let length = tangent.norm();
            let t = tangent / length;
            let marker = if tris.len() == 2 {
                EdgeMarker::Interior
            } else {
                boundary_marker(domain, vertices[i], vertices[j])
            };
            EdgeRecord {
                vertices: [i, j],
                normal: Vector2::new(t.y, -t.x),
                triangles: [Some(tris[0]), tris.get(1).copied()],
                marker,
                length,
            }
        })
        .collect();

    let triangle_edges = triangles
        .iter()
        .map(|tri| {
            std::array::from_fn(|i| {
                let (p, q) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                index_of[&(p.min(q), p.max(q))]
            })
        })
        .collect();

    Ok(Mesh { vertices, triangles, edges, triangle_edges, domain })
}
