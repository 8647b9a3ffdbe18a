use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryTag, GeometryError, UnfittedMesh, Vec2};

/// Plain-text mesh: vertex coordinates, 0-based element triples, and
/// `edge-id tag` rows for boundary edges (0 = `Γ_h`, 1 = `Γ_{0,h}`).
pub fn mesh_to_string(mesh: &UnfittedMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices {}", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {}", v.x, v.y);
    }
    let _ = writeln!(s, "elements {}", mesh.elements.len());
    for t in &mesh.elements {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let bnd: Vec<(usize, BoundaryTag)> = mesh
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.tag.map(|t| (i, t)))
        .collect();
    let _ = writeln!(s, "boundary {}", bnd.len());
    for (i, t) in bnd {
        let _ = writeln!(s, "{} {}", i, t.code());
    }
    s
}

pub fn write_mesh(mesh: &UnfittedMesh, path: &Path) -> Result<(), GeometryError> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<UnfittedMesh, GeometryError> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn parse_mesh(text: &str) -> Result<UnfittedMesh, GeometryError> {
    let mut rows = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let nv = count_row(rows.next(), "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = rows.next().ok_or_else(|| parse_err(0, "truncated vertex block".into()))?;
        let v = numbers::<f64>(n, l, 2)?;
        vertices.push(Vec2::new(v[0], v[1]));
    }
    let ne = count_row(rows.next(), "elements")?;
    let mut elements = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (n, l) = rows.next().ok_or_else(|| parse_err(0, "truncated element block".into()))?;
        let v = numbers::<usize>(n, l, 3)?;
        elements.push([v[0], v[1], v[2]]);
    }
    let nb = count_row(rows.next(), "boundary")?;
    let mut tags = HashMap::new();
    for _ in 0..nb {
        let (n, l) = rows.next().ok_or_else(|| parse_err(0, "truncated boundary block".into()))?;
        let v = numbers::<usize>(n, l, 2)?;
        let t = u8::try_from(v[1])
            .ok()
            .and_then(BoundaryTag::from_code)
            .ok_or_else(|| parse_err(n + 1, format!("unknown boundary tag {}", v[1])))?;
        tags.insert(v[0], t);
    }
    // edge ids follow the lexicographic vertex-pair order, so rebuild with a placeholder and retag
    let mut mesh = UnfittedMesh::from_triangles(vertices, elements, |_, _| BoundaryTag::Gamma)?;
    for (i, e) in mesh.edges.iter_mut().enumerate() {
        if e.is_boundary() {
            e.tag = Some(*tags.get(&i).ok_or_else(|| parse_err(0, format!("boundary edge {i} has no tag")))?);
        } else if tags.contains_key(&i) {
            return Err(parse_err(0, format!("edge {i} is interior but tagged")));
        }
    }
    Ok(mesh)
}

fn count_row(row: Option<(usize, &str)>, name: &str) -> Result<usize, GeometryError> {
    let (n, l) = row.ok_or_else(|| parse_err(0, format!("missing '{name}' header")))?;
    let mut it = l.split_whitespace();
    if it.next() != Some(name) {
        return Err(parse_err(n + 1, format!("expected '{name}' header")));
    }
    it.next()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| parse_err(n + 1, "bad count".into()))
}

fn numbers<T: std::str::FromStr>(n: usize, line: &str, count: usize) -> Result<Vec<T>, GeometryError> {
    let v: Vec<T> = line
        .split_whitespace()
        .map(|t| t.parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| parse_err(n + 1, format!("cannot parse '{line}'")))?;
    if v.len() != count {
        return Err(parse_err(n + 1, format!("expected {count} values")));
    }
    Ok(v)
}

fn parse_err(line: usize, msg: String) -> GeometryError {
    GeometryError::Parse { line, msg }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_header() {
        assert!(matches!(parse_mesh("points 3\n"), Err(GeometryError::Parse { .. })));
    }
}
