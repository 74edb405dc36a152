//! Line-oriented text formats.
//!
//! All formats are UTF-8, one record per line; blank lines and lines starting
//! with `#` are ignored.
//!
//! ```text
//! # complex
//! simplex 0 1 2
//! simplex 2 3
//!
//! # map (paths relative to the map file)
//! source: k.cplx
//! target: l.cplx
//! map 0 -> 0
//! map 1 -> 0
//!
//! # tower: `levels: N`, then N level blocks, then N-1 bond blocks
//! levels: 2
//! level 0
//! simplex 0
//! end
//! level 1
//! simplex 0 1
//! end
//! bond 0
//! map 0 -> 0
//! map 1 -> 0
//! end
//!
//! # subcomplex family: `family: N`, then N member blocks
//! family: 2
//! member 0
//! end
//! member 1
//! simplex 0
//! end
//!
//! # collapse certificate
//! collapse start=Q(0,1) finish=Q(0,0)
//! step {1} < {0,1}
//! ```
//!
//! Simplex lines must list strictly increasing vertices; duplicates and
//! unsorted lists are rejected. A complex file may list generators only; the
//! reader takes the downward closure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::collapse::{CollapseSequence, CollapseStep, Face};
use crate::complex::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
use crate::error::{Error, Result};
use crate::towers::{SubcomplexFamily, Tower};

fn err<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Input(format!("line {line}: {msg}")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Which simplexes a writer lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Listing {
    All,
    Maximal,
}

fn parse_simplex_line(lineno: usize, rest: &str) -> Result<Simplex> {
    let mut vs = Vec::new();
    for tok in rest.split_whitespace() {
        match tok.parse::<u32>() {
            Ok(v) => vs.push(v),
            Err(_) => return err(lineno, format!("`{tok}` is not a vertex id")),
        }
    }
    Simplex::new(vs).map_err(|e| Error::Input(format!("line {lineno}: {e}")))
}

pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    let mut gens = Vec::new();
    for (n, line) in content_lines(text) {
        match line.split_once(char::is_whitespace) {
            Some(("simplex", rest)) => gens.push(parse_simplex_line(n, rest)?),
            _ => return err(n, format!("expected `simplex v0 v1 ...`, found `{line}`")),
        }
    }
    Ok(SimplicialComplex::from_generators(gens))
}

fn write_simplex_lines(out: &mut String, k: &SimplicialComplex, listing: Listing) {
    let list = match listing {
        Listing::All => k.simplexes().to_vec(),
        Listing::Maximal => k.maximal_simplexes(),
    };
    for s in list {
        out.push_str("simplex");
        for v in s.vertices() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
}

pub fn write_complex(k: &SimplicialComplex, listing: Listing) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# simplicial complex: dim {} f-vector {:?}", k.dim(), k.f_vector());
    write_simplex_lines(&mut out, k, listing);
    out
}

/// Short content hash of the canonical listing of all simplexes.
pub fn complex_digest(k: &SimplicialComplex) -> String {
    let mut body = String::new();
    write_simplex_lines(&mut body, k, Listing::All);
    hex::encode(Sha256::digest(body.as_bytes()))[..16].to_string()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_map_line(n: usize, rest: &str) -> Result<(VertexId, VertexId)> {
    let Some((a, b)) = rest.split_once("->") else { return err(n, "expected `map v -> w`") };
    match (a.trim().parse::<u32>(), b.trim().parse::<u32>()) {
        (Ok(a), Ok(b)) => Ok((VertexId(a), VertexId(b))),
        _ => err(n, "expected `map v -> w` with integer vertices"),
    }
}

fn insert_assignment(n: usize, map: &mut BTreeMap<VertexId, VertexId>, (v, w): (VertexId, VertexId)) -> Result<()> {
    if map.insert(v, w).is_some() {
        return err(n, format!("vertex {v} assigned twice"));
    }
    Ok(())
}

/// Header paths and the vertex assignment of a map file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapText {
    pub source: String,
    pub target: String,
    pub assignment: BTreeMap<VertexId, VertexId>,
}

pub fn parse_map_text(text: &str) -> Result<MapText> {
    let (mut source, mut target) = (None, None);
    let mut assignment = BTreeMap::new();
    for (n, line) in content_lines(text) {
        if let Some(p) = line.strip_prefix("source:") {
            source = Some(p.trim().to_string());
        } else if let Some(p) = line.strip_prefix("target:") {
            target = Some(p.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("map ") {
            insert_assignment(n, &mut assignment, parse_map_line(n, rest)?)?;
        } else {
            return err(n, format!("unexpected `{line}`"));
        }
    }
    match (source, target) {
        (Some(source), Some(target)) => Ok(MapText { source, target, assignment }),
        _ => Err(Error::Input("map file needs `source:` and `target:` headers".into())),
    }
}

pub fn write_map(f: &SimplicialMap, source_path: &str, target_path: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "source: {source_path}");
    let _ = writeln!(out, "target: {target_path}");
    write_assignment(&mut out, f);
    out
}

fn write_assignment(out: &mut String, f: &SimplicialMap) {
    for (v, w) in f.assignment() {
        let _ = writeln!(out, "map {v} -> {w}");
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    parse_complex(&read(path)?).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Reads a map file and the two complexes it names.
pub fn read_map(path: &Path) -> Result<SimplicialMap> {
    let mt = parse_map_text(&read(path)?)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let source = Arc::new(read_complex(&dir.join(&mt.source))?);
    let target = Arc::new(read_complex(&dir.join(&mt.target))?);
    SimplicialMap::new(source, target, mt.assignment)
}

pub fn write_tower(t: &Tower) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "levels: {}", t.levels().len());
    for (i, k) in t.levels().iter().enumerate() {
        let _ = writeln!(out, "level {i}");
        write_simplex_lines(&mut out, k, Listing::Maximal);
        out.push_str("end\n");
    }
    for (i, b) in t.bonds().iter().enumerate() {
        let _ = writeln!(out, "bond {i}");
        write_assignment(&mut out, b);
        out.push_str("end\n");
    }
    out
}

/// `(keyword, index, numbered lines)` of one `keyword i ... end` block.
type Block<'a> = (String, usize, Vec<(usize, &'a str)>);

/// Parses `header: N` followed by blocks `keyword i ... end`.
fn parse_blocks<'a>(text: &'a str, header: &str, keywords: &[&str]) -> Result<(usize, Vec<Block<'a>>)> {
    let mut lines = content_lines(text);
    let count = match lines.next() {
        Some((n, l)) => match l.strip_prefix(header).map(|r| r.trim().parse::<usize>()) {
            Some(Ok(c)) => c,
            _ => return err(n, format!("expected `{header} N`")),
        },
        None => return Err(Error::Input(format!("empty file, expected `{header} N`"))),
    };
    let mut blocks = Vec::new();
    let mut current: Option<Block> = None;
    for (n, line) in lines {
        if line == "end" {
            match current.take() {
                Some(b) => blocks.push(b),
                None => return err(n, "`end` outside a block"),
            }
            continue;
        }
        if current.is_none() {
            let mut parts = line.split_whitespace();
            let kw = parts.next().unwrap_or("");
            if !keywords.contains(&kw) {
                return err(n, format!("expected one of {keywords:?}, found `{line}`"));
            }
            let idx = match parts.next().map(str::parse::<usize>) {
                Some(Ok(i)) => i,
                _ => return err(n, format!("`{kw}` needs an index")),
            };
            current = Some((kw.to_string(), idx, Vec::new()));
        } else if let Some(c) = current.as_mut() {
            c.2.push((n, line));
        }
    }
    if current.is_some() {
        return Err(Error::Input("unterminated block at end of file".into()));
    }
    Ok((count, blocks))
}

fn block_complex(lines: &[(usize, &str)]) -> Result<SimplicialComplex> {
    let mut gens = Vec::new();
    for &(n, line) in lines {
        match line.split_once(char::is_whitespace) {
            Some(("simplex", rest)) => gens.push(parse_simplex_line(n, rest)?),
            _ => return err(n, format!("expected a simplex line, found `{line}`")),
        }
    }
    Ok(SimplicialComplex::from_generators(gens))
}

pub fn parse_tower(text: &str) -> Result<Tower> {
    let (count, blocks) = parse_blocks(text, "levels:", &["level", "bond"])?;
    let mut levels = Vec::new();
    let mut bonds = Vec::new();
    for (kw, idx, lines) in blocks {
        if kw == "level" {
            if idx != levels.len() {
                return Err(Error::Input(format!("level {idx} out of order")));
            }
            levels.push(Arc::new(block_complex(&lines)?));
        } else {
            if idx != bonds.len() || idx + 1 >= levels.len() {
                return Err(Error::Input(format!("bond {idx} out of order or before its levels")));
            }
            let mut assignment = BTreeMap::new();
            for &(n, line) in &lines {
                let Some(rest) = line.strip_prefix("map ") else { return err(n, "expected `map v -> w`") };
                insert_assignment(n, &mut assignment, parse_map_line(n, rest)?)?;
            }
            bonds.push(SimplicialMap::new(levels[idx + 1].clone(), levels[idx].clone(), assignment)?);
        }
    }
    if levels.len() != count || bonds.len() + 1 != count.max(1) {
        return Err(Error::Input(format!(
            "declared {count} levels, found {} levels and {} bonds",
            levels.len(),
            bonds.len()
        )));
    }
    Tower::new(levels, bonds)
}

pub fn read_tower(path: &Path) -> Result<Tower> {
    parse_tower(&read(path)?).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn write_family(f: &SubcomplexFamily) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "family: {}", f.members.len());
    for (i, m) in f.members.iter().enumerate() {
        let _ = writeln!(out, "member {i}");
        write_simplex_lines(&mut out, m, Listing::Maximal);
        out.push_str("end\n");
    }
    out
}

pub fn parse_family(text: &str) -> Result<SubcomplexFamily> {
    let (count, blocks) = parse_blocks(text, "family:", &["member"])?;
    let mut members = Vec::new();
    for (_, idx, lines) in blocks {
        if idx != members.len() {
            return Err(Error::Input(format!("member {idx} out of order")));
        }
        members.push(block_complex(&lines)?);
    }
    if members.len() != count {
        return Err(Error::Input(format!("declared {count} members, found {}", members.len())));
    }
    Ok(SubcomplexFamily { members })
}

pub fn write_certificate<T: Face>(seq: &CollapseSequence<T>) -> String {
    let mut out = String::with_capacity(32 * seq.steps.len() + 64);
    let _ = writeln!(out, "collapse start={} finish={}", seq.start, seq.finish);
    for st in &seq.steps {
        let _ = writeln!(out, "step {} < {}", st.free_face, st.cofacet);
    }
    out
}

/// Reads only the `start`/`finish` descriptors of a certificate.
pub fn certificate_header(text: &str) -> Result<(String, String)> {
    let Some((n, first)) = content_lines(text).next() else {
        return Err(Error::Input("empty certificate".into()));
    };
    let mut start = None;
    let mut finish = None;
    let Some(rest) = first.strip_prefix("collapse ") else { return err(n, "expected `collapse start=.. finish=..`") };
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("start=") {
            start = Some(v.to_string());
        } else if let Some(v) = tok.strip_prefix("finish=") {
            finish = Some(v.to_string());
        } else {
            return err(n, format!("unexpected `{tok}` in header"));
        }
    }
    match (start, finish) {
        (Some(s), Some(f)) => Ok((s, f)),
        _ => err(n, "header needs start= and finish="),
    }
}

pub fn parse_certificate<T: Face>(text: &str) -> Result<CollapseSequence<T>> {
    let (start, finish) = certificate_header(text)?;
    let mut steps = Vec::new();
    for (n, line) in content_lines(text).skip(1) {
        let Some(rest) = line.strip_prefix("step ") else { return err(n, format!("expected a step, found `{line}`")) };
        let Some((a, b)) = rest.split_once(" < ") else { return err(n, "expected `step <face> < <cofacet>`") };
        let free_face = a.trim().parse::<T>().map_err(|e| Error::Input(format!("line {n}: {e}")))?;
        let cofacet = b.trim().parse::<T>().map_err(|e| Error::Input(format!("line {n}: {e}")))?;
        steps.push(CollapseStep { free_face, cofacet });
    }
    Ok(CollapseSequence { start, finish, steps })
}
