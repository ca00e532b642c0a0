//! Fixed-column PDB parsing and residue-residue distances.
//!
//! Only `ATOM` records of the first model are read. Column positions follow
//! the PDB 3.3 layout (1-indexed, inclusive):
//!
//! | columns | field        |
//! |---------|--------------|
//! | 13-16   | atom name    |
//! | 17      | altLoc       |
//! | 18-20   | residue name |
//! | 22      | chain id     |
//! | 23-26   | residue seq  |
//! | 27      | insertion    |
//! | 31-54   | x, y, z      |

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::amino::AminoAcid;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StructureError {
    #[error("line {line}: malformed ATOM record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("structure {0:?} contains no standard amino-acid residues")]
    EmptyStructure(String),
    #[error("residue {chain}:{seq} has no {atom} atom")]
    MissingAtom {
        chain: char,
        seq: i32,
        atom: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub atom_name: String,
    pub residue_name: String,
    pub chain_id: char,
    pub residue_seq: i32,
    /// Cartesian coordinates in Ångström.
    pub position: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub amino: AminoAcid,
    pub chain_id: char,
    pub seq_index: i32,
    pub atoms: Vec<AtomRecord>,
}

impl Residue {
    pub fn atom(&self, name: &str) -> Option<&AtomRecord> {
        self.atoms.iter().find(|a| a.atom_name == name)
    }

    pub fn centroid(&self) -> [f64; 3] {
        let mut sum = [0.0; 3];
        for atom in &self.atoms {
            for (s, p) in sum.iter_mut().zip(atom.position) {
                *s += p;
            }
        }
        let n = self.atoms.len() as f64;
        sum.map(|s| s / n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub id: char,
    /// Strictly increasing in `seq_index`.
    pub residues: Vec<Residue>,
}

/// Counters for records dropped during parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipCounts {
    pub hetatm: usize,
    pub nonstandard_residue: usize,
    pub alt_loc: usize,
    pub duplicate_residue: usize,
    pub later_models: usize,
}

impl SkipCounts {
    pub fn total(&self) -> usize {
        self.hetatm
            + self.nonstandard_residue
            + self.alt_loc
            + self.duplicate_residue
            + self.later_models
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProteinStructure {
    pub id: String,
    pub chains: Vec<Chain>,
    pub skipped: SkipCounts,
}

impl ProteinStructure {
    pub fn residue_count(&self) -> usize {
        self.chains.iter().map(|c| c.residues.len()).sum()
    }

    pub fn residues(&self) -> impl Iterator<Item = &Residue> {
        self.chains.iter().flat_map(|c| c.residues.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    CAlpha,
    Centroid,
    HeavyMin,
}

impl std::str::FromStr for DistanceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c_alpha" | "ca" => Ok(DistanceMode::CAlpha),
            "centroid" => Ok(DistanceMode::Centroid),
            "heavy_min" => Ok(DistanceMode::HeavyMin),
            other => Err(format!(
                "unknown distance mode {other:?} (expected c_alpha, centroid or heavy_min)"
            )),
        }
    }
}

/// 1-indexed inclusive column slice; short lines yield a shorter (possibly empty) slice.
fn columns(line: &str, start: usize, end: usize) -> &str {
    let len = line.len();
    if start > len {
        return "";
    }
    line.get(start - 1..end.min(len)).unwrap_or("")
}

fn parse_field<T: std::str::FromStr>(
    line: &str,
    lineno: usize,
    start: usize,
    end: usize,
    what: &str,
) -> Result<T, StructureError> {
    let raw = columns(line, start, end).trim();
    raw.parse().map_err(|_| StructureError::MalformedRecord {
        line: lineno,
        reason: format!("bad {what} {raw:?} in columns {start}-{end}"),
    })
}

struct RawAtom {
    atom_name: String,
    alt_loc: char,
    residue_name: String,
    chain_id: char,
    residue_seq: i32,
    insertion: char,
    position: [f64; 3],
}

fn parse_atom_line(line: &str, lineno: usize) -> Result<RawAtom, StructureError> {
    if line.len() < 54 {
        return Err(StructureError::MalformedRecord {
            line: lineno,
            reason: format!("record is {} columns wide, coordinates need 54", line.len()),
        });
    }
    if !line.is_char_boundary(54) {
        return Err(StructureError::MalformedRecord {
            line: lineno,
            reason: "non-ASCII text in fixed columns".into(),
        });
    }
    let residue_seq: i32 = parse_field(line, lineno, 23, 26, "residue sequence number")?;
    let x: f64 = parse_field(line, lineno, 31, 38, "x coordinate")?;
    let y: f64 = parse_field(line, lineno, 39, 46, "y coordinate")?;
    let z: f64 = parse_field(line, lineno, 47, 54, "z coordinate")?;
    if ![x, y, z].iter().all(|v| v.is_finite()) {
        return Err(StructureError::MalformedRecord {
            line: lineno,
            reason: "non-finite coordinate".into(),
        });
    }
    let atom_name = columns(line, 13, 16).trim().to_string();
    if atom_name.is_empty() {
        return Err(StructureError::MalformedRecord {
            line: lineno,
            reason: "empty atom name".into(),
        });
    }
    let char_at = |col: usize| columns(line, col, col).chars().next().unwrap_or(' ');
    Ok(RawAtom {
        atom_name,
        alt_loc: char_at(17),
        residue_name: columns(line, 18, 20).trim().to_string(),
        chain_id: char_at(22),
        residue_seq,
        insertion: char_at(27),
        position: [x, y, z],
    })
}

/// Parses PDB text into a [`ProteinStructure`].
///
/// Reads `ATOM` records of the first model only. HETATM records, altLoc values
/// other than blank or `A`, nonstandard residues and repeated `(chain, resSeq)`
/// residues are skipped and counted in [`ProteinStructure::skipped`].
pub fn parse_pdb(text: &str, id: &str) -> Result<ProteinStructure, StructureError> {
    let mut chain_order: Vec<char> = Vec::new();
    let mut chains: BTreeMap<char, BTreeMap<i32, Residue>> = BTreeMap::new();
    let mut skipped = SkipCounts::default();
    // (chain, seq, insertion, name) of the residue block currently being read
    let mut current: Option<(char, i32, char, String)> = None;
    let mut current_rejected = false;
    let mut seen: HashSet<(char, i32)> = HashSet::new();
    let mut finished_model = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let record = columns(line, 1, 6).trim_end();
        match record {
            "ENDMDL" => {
                finished_model = true;
                continue;
            }
            "HETATM" => {
                skipped.hetatm += 1;
                continue;
            }
            "ATOM" => {}
            _ => continue,
        }
        if finished_model {
            skipped.later_models += 1;
            continue;
        }
        let raw = parse_atom_line(line, lineno)?;
        let Some(amino) = AminoAcid::from_three_letter(&raw.residue_name) else {
            skipped.nonstandard_residue += 1;
            continue;
        };
        if raw.alt_loc != ' ' && raw.alt_loc != 'A' {
            skipped.alt_loc += 1;
            continue;
        }

        let key = (raw.chain_id, raw.residue_seq, raw.insertion, raw.residue_name.clone());
        if current.as_ref() != Some(&key) {
            current_rejected = !seen.insert((raw.chain_id, raw.residue_seq));
            current = Some(key);
        }
        if current_rejected {
            skipped.duplicate_residue += 1;
            continue;
        }

        let atom = AtomRecord {
            atom_name: raw.atom_name,
            residue_name: raw.residue_name,
            chain_id: raw.chain_id,
            residue_seq: raw.residue_seq,
            position: raw.position,
        };
        if !chains.contains_key(&raw.chain_id) {
            chain_order.push(raw.chain_id);
        }
        let residues = chains.entry(raw.chain_id).or_default();
        match residues.entry(raw.residue_seq) {
            Entry::Occupied(mut e) => {
                let residue = e.get_mut();
                // same residue block; keep the first copy of a repeated atom name
                if residue.atom(&atom.atom_name).is_none() {
                    residue.atoms.push(atom);
                }
            }
            Entry::Vacant(e) => {
                e.insert(Residue {
                    amino,
                    chain_id: raw.chain_id,
                    seq_index: raw.residue_seq,
                    atoms: vec![atom],
                });
            }
        }
    }

    let chains: Vec<Chain> = chain_order
        .into_iter()
        .map(|id| Chain {
            id,
            residues: chains.remove(&id).unwrap_or_default().into_values().collect(),
        })
        .filter(|c| !c.residues.is_empty())
        .collect();
    if chains.is_empty() {
        return Err(StructureError::EmptyStructure(id.to_string()));
    }
    Ok(ProteinStructure {
        id: id.to_string(),
        chains,
        skipped,
    })
}

fn euclidean(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn ca(residue: &Residue) -> Result<[f64; 3], StructureError> {
    residue
        .atom("CA")
        .map(|a| a.position)
        .ok_or(StructureError::MissingAtom {
            chain: residue.chain_id,
            seq: residue.seq_index,
            atom: "CA",
        })
}

/// Distance in Ångström between two residues under the given mode.
pub fn residue_distance(a: &Residue, b: &Residue, mode: DistanceMode) -> Result<f64, StructureError> {
    match mode {
        DistanceMode::CAlpha => Ok(euclidean(ca(a)?, ca(b)?)),
        DistanceMode::Centroid => Ok(euclidean(a.centroid(), b.centroid())),
        DistanceMode::HeavyMin => {
            let mut best = f64::INFINITY;
            for x in &a.atoms {
                for y in &b.atoms {
                    best = best.min(euclidean(x.position, y.position));
                }
            }
            Ok(best)
        }
    }
}

/// Formats a single fixed-column ATOM record. Used for fixtures and tests.
pub fn format_atom_line(
    serial: u32,
    atom_name: &str,
    residue_name: &str,
    chain_id: char,
    residue_seq: i32,
    position: [f64; 3],
) -> String {
    format!(
        "ATOM  {serial:>5} {atom_name:<4} {residue_name:>3} {chain_id}{residue_seq:>4}    {:>8.3}{:>8.3}{:>8.3}  1.00  0.00",
        position[0], position[1], position[2]
    )
}
