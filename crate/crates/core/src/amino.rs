//! The 20 standard amino acids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One of the 20 standard amino acids, ordered alphabetically by one-letter code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AminoAcid {
    A,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    K,
    L,
    M,
    N,
    P,
    Q,
    R,
    S,
    T,
    V,
    W,
    Y,
}

impl AminoAcid {
    pub const ALL: [AminoAcid; 20] = [
        AminoAcid::A,
        AminoAcid::C,
        AminoAcid::D,
        AminoAcid::E,
        AminoAcid::F,
        AminoAcid::G,
        AminoAcid::H,
        AminoAcid::I,
        AminoAcid::K,
        AminoAcid::L,
        AminoAcid::M,
        AminoAcid::N,
        AminoAcid::P,
        AminoAcid::Q,
        AminoAcid::R,
        AminoAcid::S,
        AminoAcid::T,
        AminoAcid::V,
        AminoAcid::W,
        AminoAcid::Y,
    ];

    /// Position in [`AminoAcid::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        "ACDEFGHIKLMNPQRSTVWY".as_bytes()[self.index()] as char
    }

    pub fn from_letter(c: char) -> Option<Self> {
        let c = c.to_ascii_uppercase();
        Self::ALL.iter().copied().find(|aa| aa.letter() == c)
    }

    /// Maps a PDB residue name (`ALA`, `VAL`, ...) to the amino acid. Anything
    /// outside the 20 standard residues yields `None`.
    pub fn from_three_letter(code: &str) -> Option<Self> {
        let aa = match code.trim().to_ascii_uppercase().as_str() {
            "ALA" => AminoAcid::A,
            "CYS" => AminoAcid::C,
            "ASP" => AminoAcid::D,
            "GLU" => AminoAcid::E,
            "PHE" => AminoAcid::F,
            "GLY" => AminoAcid::G,
            "HIS" => AminoAcid::H,
            "ILE" => AminoAcid::I,
            "LYS" => AminoAcid::K,
            "LEU" => AminoAcid::L,
            "MET" => AminoAcid::M,
            "ASN" => AminoAcid::N,
            "PRO" => AminoAcid::P,
            "GLN" => AminoAcid::Q,
            "ARG" => AminoAcid::R,
            "SER" => AminoAcid::S,
            "THR" => AminoAcid::T,
            "VAL" => AminoAcid::V,
            "TRP" => AminoAcid::W,
            "TYR" => AminoAcid::Y,
            _ => return None,
        };
        Some(aa)
    }

    pub fn three_letter(self) -> &'static str {
        const CODES: [&str; 20] = [
            "ALA", "CYS", "ASP", "GLU", "PHE", "GLY", "HIS", "ILE", "LYS", "LEU", "MET", "ASN",
            "PRO", "GLN", "ARG", "SER", "THR", "VAL", "TRP", "TYR",
        ];
        CODES[self.index()]
    }
}

impl fmt::Display for AminoAcid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown amino-acid letter {0:?}")]
pub struct UnknownAminoAcid(pub String);

impl FromStr for AminoAcid {
    type Err = UnknownAminoAcid;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Self::from_letter(c).ok_or_else(|| UnknownAminoAcid(s.to_string())),
            _ => Err(UnknownAminoAcid(s.to_string())),
        }
    }
}

impl Serialize for AminoAcid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_char(self.letter())
    }
}

impl<'de> Deserialize<'de> for AminoAcid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
