//! Interaction classes, contact detection under a distance threshold, and
//! per-contact energetic scores.

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::amino::AminoAcid;
use crate::structure_io::{residue_distance, DistanceMode, ProteinStructure, Residue, StructureError};

#[derive(Debug, thiserror::Error)]
pub enum ContactsError {
    #[error("invalid contact configuration: {0}")]
    BadConfig(String),
    #[error("bad score table: {0}")]
    BadTable(String),
    #[error("bad interaction class {0:?} (expected two amino-acid letters like A-V)")]
    BadClass(String),
    #[error("bad instance CSV: {0}")]
    BadInstances(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// An unordered pair of amino acids, stored canonically with `first <= second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InteractionClass {
    first: AminoAcid,
    second: AminoAcid,
}

impl InteractionClass {
    pub fn new(a: AminoAcid, b: AminoAcid) -> Self {
        if a <= b {
            InteractionClass { first: a, second: b }
        } else {
            InteractionClass { first: b, second: a }
        }
    }

    pub fn first(self) -> AminoAcid {
        self.first
    }

    pub fn second(self) -> AminoAcid {
        self.second
    }

    pub fn is_homopair(self) -> bool {
        self.first == self.second
    }
}

impl fmt::Display for InteractionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.first, self.second)
    }
}

impl FromStr for InteractionClass {
    type Err = ContactsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ContactsError::BadClass(s.to_string());
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let a: AminoAcid = a.parse().map_err(|_| bad())?;
        let b: AminoAcid = b.parse().map_err(|_| bad())?;
        Ok(InteractionClass::new(a, b))
    }
}

impl Serialize for InteractionClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InteractionClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All interaction classes in lexicographic order: 210 with homopairs, 190 without.
pub fn class_universe(include_homopairs: bool) -> Vec<InteractionClass> {
    let mut out = Vec::with_capacity(210);
    for (i, &a) in AminoAcid::ALL.iter().enumerate() {
        let start = if include_homopairs { i } else { i + 1 };
        for &b in &AminoAcid::ALL[start..] {
            out.push(InteractionClass::new(a, b));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactConfig {
    /// Contact threshold in Ångström.
    pub threshold_tau: f64,
    pub mode: DistanceMode,
    /// Minimum |seq_i - seq_j| for two residues of the same chain.
    pub min_seq_separation: u32,
    pub cross_chain: bool,
}

impl Default for ContactConfig {
    fn default() -> Self {
        ContactConfig {
            threshold_tau: 8.0,
            mode: DistanceMode::CAlpha,
            min_seq_separation: 3,
            cross_chain: false,
        }
    }
}

impl ContactConfig {
    pub fn validate(&self) -> Result<(), ContactsError> {
        if !(self.threshold_tau.is_finite() && self.threshold_tau > 0.0) {
            return Err(ContactsError::BadConfig(format!(
                "threshold_tau must be finite and positive, got {}",
                self.threshold_tau
            )));
        }
        Ok(())
    }
}

/// Symmetric 20x20 table indexed by [`AminoAcid::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable([[f64; 20]; 20]);

impl ScoreTable {
    pub fn from_fn(f: impl Fn(AminoAcid, AminoAcid) -> f64) -> Result<Self, ContactsError> {
        let mut t = [[0.0; 20]; 20];
        for a in AminoAcid::ALL {
            for b in AminoAcid::ALL {
                t[a.index()][b.index()] = f(a, b);
            }
        }
        Self::checked(t)
    }

    fn checked(t: [[f64; 20]; 20]) -> Result<Self, ContactsError> {
        for i in 0..20 {
            for j in 0..20 {
                if !t[i][j].is_finite() {
                    return Err(ContactsError::BadTable(format!(
                        "non-finite entry at ({}, {})",
                        AminoAcid::ALL[i],
                        AminoAcid::ALL[j]
                    )));
                }
                if (t[i][j] - t[j][i]).abs() > 1e-9 {
                    return Err(ContactsError::BadTable(format!(
                        "asymmetric entries ({0},{1})={2} vs ({1},{0})={3}",
                        AminoAcid::ALL[i],
                        AminoAcid::ALL[j],
                        t[i][j],
                        t[j][i]
                    )));
                }
            }
        }
        Ok(ScoreTable(t))
    }

    pub fn get(&self, a: AminoAcid, b: AminoAcid) -> f64 {
        self.0[a.index()][b.index()]
    }
}

/// Assigns the energetic score of each contact.
#[derive(Debug, Clone, PartialEq)]
pub enum Scorer {
    /// Every contact scores 1.0.
    UnitCount,
    /// Table lookup by residue pair, optionally negated so that lower energy
    /// means higher utility.
    Table { table: ScoreTable, negate: bool },
}

impl Scorer {
    pub fn score(&self, class: InteractionClass) -> f64 {
        match self {
            Scorer::UnitCount => 1.0,
            Scorer::Table { table, negate } => {
                let v = table.get(class.first(), class.second());
                if *negate {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn with_negate(self, negate: bool) -> Self {
        match self {
            Scorer::Table { table, .. } => Scorer::Table { table, negate },
            other => other,
        }
    }
}

/// Reads a score table from CSV: a header `,A,C,...,Y` followed by 20 rows
/// `letter,v1,...,v20`. The returned scorer negates by default.
pub fn load_score_table<R: io::Read>(reader: R) -> Result<Scorer, ContactsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ContactsError::BadTable(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(rec);
    }
    let Some((header, body)) = rows.split_first() else {
        return Err(ContactsError::BadTable("empty input".into()));
    };
    if header.len() != 21 {
        return Err(ContactsError::BadTable(format!(
            "header has {} columns, expected 21",
            header.len()
        )));
    }
    let letter = |s: &str| {
        s.parse::<AminoAcid>()
            .map_err(|_| ContactsError::BadTable(format!("unknown amino-acid letter {s:?}")))
    };
    let cols: Vec<AminoAcid> = header.iter().skip(1).map(letter).collect::<Result<_, _>>()?;
    if body.len() != 20 {
        return Err(ContactsError::BadTable(format!(
            "{} data rows, expected 20",
            body.len()
        )));
    }
    let mut filled = [[false; 20]; 20];
    let mut t = [[0.0; 20]; 20];
    for row in body {
        if row.len() != 21 {
            return Err(ContactsError::BadTable(format!(
                "row {:?} has {} columns, expected 21",
                row.get(0).unwrap_or(""),
                row.len()
            )));
        }
        let r = letter(&row[0])?;
        for (c, field) in cols.iter().zip(row.iter().skip(1)) {
            let v: f64 = field
                .parse()
                .map_err(|_| ContactsError::BadTable(format!("bad number {field:?}")))?;
            if filled[r.index()][c.index()] {
                return Err(ContactsError::BadTable(format!("duplicate entry ({r},{c})")));
            }
            filled[r.index()][c.index()] = true;
            t[r.index()][c.index()] = v;
        }
    }
    if filled.iter().flatten().any(|f| !f) {
        return Err(ContactsError::BadTable("table does not cover all 20 letters".into()));
    }
    Ok(Scorer::Table {
        table: ScoreTable::checked(t)?,
        negate: true,
    })
}

/// Identifies a residue by chain and sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidueId {
    pub chain: char,
    pub seq: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionInstance {
    pub protein_id: String,
    pub class: InteractionClass,
    pub residues: (ResidueId, ResidueId),
    pub distance: f64,
    pub score: f64,
}

fn residue_id(r: &Residue) -> ResidueId {
    ResidueId {
        chain: r.chain_id,
        seq: r.seq_index,
    }
}

/// Every residue pair of `structure` within `config.threshold_tau` of each
/// other, in chain order and then residue order.
///
/// Same-chain pairs must be at least `min_seq_separation` apart in sequence.
/// Pairs from different chains are only considered when `cross_chain` is set.
pub fn extract_instances(
    structure: &ProteinStructure,
    config: &ContactConfig,
    scorer: &Scorer,
) -> Result<Vec<InteractionInstance>, ContactsError> {
    config.validate()?;
    let residues: Vec<&Residue> = structure.residues().collect();
    let mut out = Vec::new();
    for (i, a) in residues.iter().enumerate() {
        for b in &residues[i + 1..] {
            let same_chain = a.chain_id == b.chain_id;
            if !same_chain && !config.cross_chain {
                continue;
            }
            if same_chain && a.seq_index.abs_diff(b.seq_index) < config.min_seq_separation {
                continue;
            }
            let distance = residue_distance(a, b, config.mode)?;
            if distance <= config.threshold_tau {
                let class = InteractionClass::new(a.amino, b.amino);
                out.push(InteractionInstance {
                    protein_id: structure.id.clone(),
                    class,
                    residues: (residue_id(a), residue_id(b)),
                    distance,
                    score: scorer.score(class),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct InstanceRow {
    protein_id: String,
    class: String,
    chain_i: char,
    seq_i: i32,
    chain_j: char,
    seq_j: i32,
    distance: f64,
    score: f64,
}

/// Writes `protein_id,class,chain_i,seq_i,chain_j,seq_j,distance,score` rows.
pub fn write_instances_csv<W: io::Write>(
    writer: W,
    instances: &[InteractionInstance],
) -> Result<(), ContactsError> {
    let mut wtr = csv::Writer::from_writer(writer);
    // header is written explicitly so that an empty instance list still has one
    wtr.write_record([
        "protein_id", "class", "chain_i", "seq_i", "chain_j", "seq_j", "distance", "score",
    ])
    .map_err(|e| ContactsError::BadInstances(e.to_string()))?;
    for inst in instances {
        let (a, b) = inst.residues;
        wtr.write_record([
            inst.protein_id.clone(),
            inst.class.to_string(),
            a.chain.to_string(),
            a.seq.to_string(),
            b.chain.to_string(),
            b.seq.to_string(),
            inst.distance.to_string(),
            inst.score.to_string(),
        ])
        .map_err(|e| ContactsError::BadInstances(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_instances_csv<R: io::Read>(reader: R) -> Result<Vec<InteractionInstance>, ContactsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in rdr.deserialize::<InstanceRow>() {
        let row = row.map_err(|e| ContactsError::BadInstances(e.to_string()))?;
        out.push(InteractionInstance {
            protein_id: row.protein_id,
            class: row.class.parse()?,
            residues: (
                ResidueId {
                    chain: row.chain_i,
                    seq: row.seq_i,
                },
                ResidueId {
                    chain: row.chain_j,
                    seq: row.seq_j,
                },
            ),
            distance: row.distance,
            score: row.score,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure_io::{parse_pdb, format_atom_line};

    fn ca_chain(specs: &[(&str, i32, f64)]) -> ProteinStructure {
        let text: Vec<String> = specs
            .iter()
            .map(|&(resn, seq, x)| format_atom_line(seq as u32, "CA", resn, 'A', seq, [x, 0.0, 0.0]))
            .collect();
        parse_pdb(&text.join("\n"), "toy").unwrap()
    }

    fn four_residue() -> ProteinStructure {
        ca_chain(&[("ALA", 1, 0.0), ("VAL", 2, 4.0), ("GLY", 5, 6.0), ("LEU", 9, 30.0)])
    }

    #[test]
    fn universe_sizes_by_enumeration() {
        // independent count: every ordered pair of letters, deduplicated by sorting
        let mut seen = std::collections::BTreeSet::new();
        for a in "ACDEFGHIKLMNPQRSTVWY".chars() {
            for b in "ACDEFGHIKLMNPQRSTVWY".chars() {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                seen.insert((x, y));
            }
        }
        let hetero = seen.iter().filter(|(x, y)| x != y).count();
        assert_eq!(seen.len(), 210);
        assert_eq!(hetero, 190);

        let with = class_universe(true);
        assert_eq!(with.len(), seen.len());
        assert_eq!(with[0].to_string(), "A-A");
        assert!(with.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(class_universe(false).len(), hetero);
        assert!(class_universe(false).iter().all(|c| !c.is_homopair()));
    }

    #[test]
    fn class_canonicalization() {
        let va: InteractionClass = "V-A".parse().unwrap();
        assert_eq!(va, InteractionClass::new(AminoAcid::A, AminoAcid::V));
        assert_eq!(va.to_string(), "A-V");
        assert!(class_universe(true).contains(&va));
        assert!("A-B".parse::<InteractionClass>().is_err());
        assert!("AV".parse::<InteractionClass>().is_err());
    }

    #[test]
    fn four_residue_fixture_contacts() {
        let s = four_residue();
        let inst = extract_instances(&s, &ContactConfig::default(), &Scorer::UnitCount).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!((inst[0].residues.0.seq, inst[0].residues.1.seq), (1, 5));
        assert_eq!(inst[0].distance, 6.0);
        assert_eq!(inst[0].class.to_string(), "A-G");
        assert_eq!((inst[1].residues.0.seq, inst[1].residues.1.seq), (2, 5));
        assert_eq!(inst[1].distance, 2.0);
        assert_eq!(inst[1].class.to_string(), "G-V");
        assert!(inst.iter().all(|i| i.score == 1.0));

        let tight = ContactConfig {
            threshold_tau: 0.5,
            ..ContactConfig::default()
        };
        assert!(extract_instances(&s, &tight, &Scorer::UnitCount).unwrap().is_empty());
    }

    #[test]
    fn invalid_tau_rejected() {
        let s = four_residue();
        for tau in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let cfg = ContactConfig {
                threshold_tau: tau,
                ..ContactConfig::default()
            };
            assert!(matches!(
                extract_instances(&s, &cfg, &Scorer::UnitCount),
                Err(ContactsError::BadConfig(_))
            ));
        }
    }

    #[test]
    fn cross_chain_pairs_ignore_separation() {
        let text = [
            format_atom_line(1, "CA", "ALA", 'A', 1, [0.0, 0.0, 0.0]),
            format_atom_line(2, "CA", "TRP", 'B', 1, [1.0, 0.0, 0.0]),
        ]
        .join("\n");
        let s = parse_pdb(&text, "dimer").unwrap();
        let cfg = ContactConfig::default();
        assert!(extract_instances(&s, &cfg, &Scorer::UnitCount).unwrap().is_empty());
        let cross = ContactConfig {
            cross_chain: true,
            ..cfg
        };
        let inst = extract_instances(&s, &cross, &Scorer::UnitCount).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].class.to_string(), "A-W");
    }

    fn table_csv(f: impl Fn(usize, usize) -> f64, rows: usize) -> String {
        let letters: Vec<char> = "ACDEFGHIKLMNPQRSTVWY".chars().collect();
        let mut s = String::new();
        for l in &letters {
            s.push(',');
            s.push(*l);
        }
        s.push('\n');
        for (i, l) in letters.iter().enumerate().take(rows) {
            s.push(*l);
            for j in 0..20 {
                s.push_str(&format!(",{}", f(i, j)));
            }
            s.push('\n');
        }
        s
    }

    #[test]
    fn score_table_loading() {
        let csv = table_csv(|i, j| (i + j) as f64 / 10.0 - 2.0, 20);
        let scorer = load_score_table(csv.as_bytes()).unwrap();
        let Scorer::Table { table, negate } = &scorer else {
            panic!("expected table scorer");
        };
        assert!(*negate);
        assert_eq!(
            table.get(AminoAcid::A, AminoAcid::V),
            table.get(AminoAcid::V, AminoAcid::A)
        );
        let x = table.get(AminoAcid::A, AminoAcid::V);
        let av = InteractionClass::new(AminoAcid::A, AminoAcid::V);
        assert_eq!(scorer.score(av), -x);
        assert_eq!(scorer.clone().with_negate(false).score(av), x);
    }

    #[test]
    fn score_table_rejections() {
        let short = table_csv(|_, _| 1.0, 19);
        assert!(matches!(load_score_table(short.as_bytes()), Err(ContactsError::BadTable(_))));
        let asym = table_csv(|i, j| if i < j { 1.0 } else { 2.0 }, 20);
        assert!(matches!(load_score_table(asym.as_bytes()), Err(ContactsError::BadTable(_))));
        let bad_letter = table_csv(|_, _| 1.0, 20).replacen(",A,", ",B,", 1);
        assert!(matches!(
            load_score_table(bad_letter.as_bytes()),
            Err(ContactsError::BadTable(_))
        ));
        let tiny_asym = table_csv(|i, j| if i < j { 1.0 } else { 1.0 + 1e-12 }, 20);
        assert!(load_score_table(tiny_asym.as_bytes()).is_ok());
    }

    #[test]
    fn instance_csv_round_trip() {
        let s = four_residue();
        let inst = extract_instances(&s, &ContactConfig::default(), &Scorer::UnitCount).unwrap();
        let mut buf = Vec::new();
        write_instances_csv(&mut buf, &inst).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("protein_id,class,chain_i,seq_i,chain_j,seq_j,distance,score\n"));
        assert!(text.contains("toy,A-G,A,1,A,5,6,1\n"));
        assert_eq!(read_instances_csv(buf.as_slice()).unwrap(), inst);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const NAMES: [&str; 5] = ["ALA", "VAL", "GLY", "LEU", "TRP"];

        fn structure() -> impl Strategy<Value = ProteinStructure> {
            prop::collection::vec((0usize..5, prop::array::uniform3(-12.0f64..12.0), 0u8..2), 2..20)
                .prop_map(|rs| {
                    let text: Vec<String> = rs
                        .iter()
                        .enumerate()
                        .map(|(i, &(n, p, ch))| {
                            let chain = if ch == 0 { 'A' } else { 'B' };
                            format_atom_line(i as u32, "CA", NAMES[n], chain, i as i32 + 1, p)
                        })
                        .collect();
                    parse_pdb(&text.join("\n"), "rand").unwrap()
                })
        }

        fn key(i: &InteractionInstance) -> (ResidueId, ResidueId) {
            i.residues
        }

        proptest! {
            #[test]
            fn monotone_in_tau(s in structure(), t1 in 0.5f64..15.0, dt in 0.0f64..10.0) {
                let c1 = ContactConfig { threshold_tau: t1, ..ContactConfig::default() };
                let c2 = ContactConfig { threshold_tau: t1 + dt, ..ContactConfig::default() };
                let small = extract_instances(&s, &c1, &Scorer::UnitCount).unwrap();
                let big: Vec<_> = extract_instances(&s, &c2, &Scorer::UnitCount)
                    .unwrap().iter().map(key).collect();
                for inst in &small {
                    prop_assert!(big.contains(&key(inst)));
                    prop_assert!(inst.distance <= t1);
                }
            }

            #[test]
            fn matches_all_pairs_oracle(
                s in structure(),
                tau in 1.0f64..20.0,
                sep in 0u32..4,
                cross in any::<bool>(),
            ) {
                let cfg = ContactConfig { threshold_tau: tau, min_seq_separation: sep, cross_chain: cross, ..ContactConfig::default() };
                let got = extract_instances(&s, &cfg, &Scorer::UnitCount).unwrap();

                // O(n^2) over ordered pairs, deduplicated by keeping a < b in residue order
                let mut flat = Vec::new();
                for c in &s.chains {
                    for r in &c.residues {
                        let p = r.atoms[0].position;
                        flat.push((c.id, r.seq_index, r.amino, p));
                    }
                }
                let mut want = Vec::new();
                for x in 0..flat.len() {
                    for y in 0..flat.len() {
                        if x >= y { continue; }
                        let (ca, sa, aa, pa) = flat[x];
                        let (cb, sb, ab, pb) = flat[y];
                        if ca != cb && !cross { continue; }
                        if ca == cb && (sa - sb).unsigned_abs() < sep { continue; }
                        let d = ((pa[0]-pb[0]).powi(2) + (pa[1]-pb[1]).powi(2) + (pa[2]-pb[2]).powi(2)).sqrt();
                        if d <= tau {
                            want.push((ResidueId { chain: ca, seq: sa }, ResidueId { chain: cb, seq: sb }, InteractionClass::new(ab, aa)));
                        }
                    }
                }
                let got: Vec<_> = got.iter().map(|i| (i.residues.0, i.residues.1, i.class)).collect();
                prop_assert_eq!(got, want);
            }
        }
    }
}
