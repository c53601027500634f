//! Line-oriented parser for the native `atri` text format.
//!
//! ```text
//! atri 1
//! # comment
//! name fig8
//! tetrahedra 2
//! tet 0: 1 0132  1 1230  1 2310  1 2103
//! tet 1: 0 0132  0 3201  0 3012  0 2103
//! peripheral 0 meridian: (0,0,1,2) (1,0,3,1)
//! peripheral 0 longitude: (0,1,0,2) (1,1,3,0)
//! ```
//!
//! Gluing permutations are four digits giving the images of vertices 0..3.
//! Peripheral segments are `(tet, vertex, enter-side, exit-side)` with sides
//! named by the opposite corner's vertex.

use super::{Gluing, Perm4, RawPeripheral, TriangulationError};

pub struct Document {
    pub name: String,
    pub gluings: Vec<[Gluing; 4]>,
    pub peripherals: Vec<RawPeripheral>,
}

fn syntax(line: usize, message: impl Into<String>) -> TriangulationError {
    TriangulationError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_document(text: &str) -> Result<Document, TriangulationError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (lno, header) = lines
        .next()
        .ok_or_else(|| syntax(0, "empty document"))?;
    if header != "atri 1" {
        return Err(syntax(lno, format!("expected header 'atri 1', got '{header}'")));
    }

    let mut name = String::new();
    let mut tet_count: Option<usize> = None;
    let mut gluings: Vec<Option<[Gluing; 4]>> = Vec::new();
    let mut peripherals: Vec<RawPeripheral> = Vec::new();

    for (lno, line) in lines {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("name") => {
                name = words.collect::<Vec<_>>().join(" ");
            }
            Some("tetrahedra") => {
                let count: usize = words
                    .next()
                    .ok_or_else(|| syntax(lno, "missing tetrahedron count"))?
                    .parse()
                    .map_err(|_| syntax(lno, "tetrahedron count is not a number"))?;
                if count == 0 {
                    return Err(syntax(lno, "tetrahedron count must be positive"));
                }
                tet_count = Some(count);
                gluings = vec![None; count];
            }
            Some("tet") => {
                let n = tet_count.ok_or_else(|| syntax(lno, "'tet' before 'tetrahedra'"))?;
                let rest = line["tet".len()..].trim();
                let (idx_str, data) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(lno, "expected 'tet <i>: ...'"))?;
                let idx: usize = idx_str
                    .trim()
                    .parse()
                    .map_err(|_| syntax(lno, "bad tetrahedron index"))?;
                if idx >= n {
                    return Err(syntax(lno, format!("tetrahedron index {idx} out of range")));
                }
                let fields: Vec<&str> = data.split_whitespace().collect();
                if fields.len() != 8 {
                    return Err(syntax(lno, "expected 4 neighbor/permutation pairs"));
                }
                let mut row = [Gluing {
                    neighbor: 0,
                    perm: Perm4([0, 1, 2, 3]),
                }; 4];
                for f in 0..4 {
                    let neighbor: usize = fields[2 * f]
                        .parse()
                        .map_err(|_| syntax(lno, "bad neighbor index"))?;
                    if neighbor >= n {
                        return Err(syntax(lno, format!("neighbor {neighbor} out of range")));
                    }
                    let perm = parse_perm(fields[2 * f + 1])
                        .ok_or_else(|| syntax(lno, format!("bad permutation '{}'", fields[2 * f + 1])))?;
                    row[f] = Gluing { neighbor, perm };
                }
                if gluings[idx].is_some() {
                    return Err(syntax(lno, format!("duplicate 'tet {idx}' line")));
                }
                gluings[idx] = Some(row);
            }
            Some("peripheral") => {
                tet_count.ok_or_else(|| syntax(lno, "'peripheral' before 'tetrahedra'"))?;
                let rest = line["peripheral".len()..].trim();
                let (head, data) = rest
                    .split_once(':')
                    .ok_or_else(|| syntax(lno, "expected 'peripheral <cusp> <kind>: ...'"))?;
                let mut hw = head.split_whitespace();
                let cusp: usize = hw
                    .next()
                    .ok_or_else(|| syntax(lno, "missing cusp index"))?
                    .parse()
                    .map_err(|_| syntax(lno, "bad cusp index"))?;
                let kind = hw.next().ok_or_else(|| syntax(lno, "missing curve kind"))?;
                let is_meridian = match kind {
                    "meridian" => true,
                    "longitude" => false,
                    _ => return Err(syntax(lno, "curve kind must be 'meridian' or 'longitude'")),
                };
                let segments = parse_segments(data, lno, tet_count.unwrap())?;
                if segments.is_empty() {
                    return Err(syntax(lno, "peripheral curve has no segments"));
                }
                peripherals.push(RawPeripheral {
                    cusp,
                    is_meridian,
                    segments,
                });
            }
            Some(other) => {
                return Err(syntax(lno, format!("unknown directive '{other}'")));
            }
            None => unreachable!(),
        }
    }

    let n = tet_count.ok_or_else(|| syntax(0, "missing 'tetrahedra' line"))?;
    let mut resolved = Vec::with_capacity(n);
    for (i, g) in gluings.into_iter().enumerate() {
        resolved.push(g.ok_or_else(|| syntax(0, format!("missing 'tet {i}' line")))?);
    }

    Ok(Document {
        name,
        gluings: resolved,
        peripherals,
    })
}

fn parse_perm(s: &str) -> Option<Perm4> {
    let bytes = s.as_bytes();
    if bytes.len() != 4 {
        return None;
    }
    let mut images = [0u8; 4];
    for (i, &b) in bytes.iter().enumerate() {
        if !(b'0'..=b'3').contains(&b) {
            return None;
        }
        images[i] = b - b'0';
    }
    let p = Perm4(images);
    p.is_valid().then_some(p)
}

fn parse_segments(
    data: &str,
    lno: usize,
    tet_count: usize,
) -> Result<Vec<(usize, u8, u8, u8)>, TriangulationError> {
    let mut out = Vec::new();
    for tok in data.split_whitespace() {
        let inner = tok
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| syntax(lno, format!("bad segment '{tok}'")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(syntax(lno, format!("segment '{tok}' needs 4 fields")));
        }
        let tet: usize = parts[0]
            .parse()
            .map_err(|_| syntax(lno, "bad segment tetrahedron"))?;
        if tet >= tet_count {
            return Err(syntax(lno, format!("segment tetrahedron {tet} out of range")));
        }
        let mut small = [0u8; 3];
        for (i, p) in parts[1..].iter().enumerate() {
            let v: u8 = p.parse().map_err(|_| syntax(lno, "bad segment field"))?;
            if v > 3 {
                return Err(syntax(lno, "segment vertex/side out of range"));
            }
            small[i] = v;
        }
        let (vertex, enter, exit) = (small[0], small[1], small[2]);
        if enter == vertex || exit == vertex || enter == exit {
            return Err(syntax(lno, format!("degenerate segment '{tok}'")));
        }
        out.push((tet, vertex, enter, exit));
    }
    Ok(out)
}
