//! Coupling graphs and sublattice frequency patterns.
//!
//! Edge-list files hold one `i j` pair per line (0-indexed), with `#`
//! starting a comment. An optional third column assigns sublattice labels:
//! one letter labels site `i`, two letters label `i` and `j` in order.
//! Either every site carries a label or none does.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

const HEAVY_HEX_AB: &str = include_str!("../resources/heavy_hex_ab.edges");
const HEAVY_HEX_ABAC: &str = include_str!("../resources/heavy_hex_abac.edges");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
    C,
}

impl Sublattice {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(Self::A),
            'B' => Some(Self::B),
            'C' => Some(Self::C),
            _ => None,
        }
    }
}

impl fmt::Display for Sublattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for Sublattice {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Self::from_char), chars.next()) {
            (Some(label), None) => Ok(label),
            _ => Err(ModelError::InvalidLattice(format!("unknown sublattice label `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryTag {
    Chain,
    Surface7,
    Grid3x3,
    HeavyHex,
    Custom,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeavyHexPattern {
    #[default]
    Ab,
    Abac,
}

/// Declarative lattice request, as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    Chain { sites: usize },
    Surface7,
    /// 3x3 square array; `pattern` adds the A-B checkerboard.
    Grid3x3 {
        #[serde(default)]
        pattern: bool,
    },
    HeavyHex {
        #[serde(default)]
        pattern: HeavyHexPattern,
    },
    Custom { path: String },
}

impl Geometry {
    /// Parses the CLI shorthand: `chain:10`, `surface7`, `grid3x3`,
    /// `grid3x3:ab`, `heavy_hex`, `heavy_hex:abac`, `custom:<path>`.
    pub fn parse(text: &str) -> Result<Self> {
        let (tag, arg) = match text.split_once(':') {
            Some((t, a)) => (t, Some(a)),
            None => (text, None),
        };
        match (tag.trim().to_ascii_lowercase().as_str(), arg) {
            ("chain", Some(n)) => n
                .trim()
                .parse()
                .map(|sites| Self::Chain { sites })
                .map_err(|_| ModelError::UnknownGeometry(text.to_string())),
            ("surface7" | "s7", None) => Ok(Self::Surface7),
            ("grid3x3", None) => Ok(Self::Grid3x3 { pattern: false }),
            ("grid3x3", Some(p)) if p.eq_ignore_ascii_case("ab") => Ok(Self::Grid3x3 { pattern: true }),
            ("heavy_hex", None) => Ok(Self::HeavyHex { pattern: HeavyHexPattern::Ab }),
            ("heavy_hex", Some(p)) if p.eq_ignore_ascii_case("ab") => {
                Ok(Self::HeavyHex { pattern: HeavyHexPattern::Ab })
            }
            ("heavy_hex", Some(p)) if p.eq_ignore_ascii_case("abac") => {
                Ok(Self::HeavyHex { pattern: HeavyHexPattern::Abac })
            }
            ("custom", Some(path)) => Ok(Self::Custom { path: path.to_string() }),
            _ => Err(ModelError::UnknownGeometry(text.to_string())),
        }
    }

    pub fn tag(&self) -> GeometryTag {
        match self {
            Self::Chain { .. } => GeometryTag::Chain,
            Self::Surface7 => GeometryTag::Surface7,
            Self::Grid3x3 { .. } => GeometryTag::Grid3x3,
            Self::HeavyHex { .. } => GeometryTag::HeavyHex,
            Self::Custom { .. } => GeometryTag::Custom,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
    pattern: Option<Vec<Sublattice>>,
    geometry: GeometryTag,
}

pub fn build_lattice(geometry: &Geometry) -> Result<Lattice> {
    match geometry {
        Geometry::Chain { sites } => Lattice::chain(*sites),
        Geometry::Surface7 => Lattice::surface7(),
        Geometry::Grid3x3 { pattern: false } => Lattice::grid3x3(),
        Geometry::Grid3x3 { pattern: true } => Lattice::grid3x3_ab(),
        Geometry::HeavyHex { pattern } => Lattice::heavy_hex(*pattern),
        Geometry::Custom { path } => load_lattice_from_file(path),
    }
}

impl Lattice {
    pub fn new(
        n_sites: usize,
        edges: Vec<(usize, usize)>,
        pattern: Option<Vec<Sublattice>>,
        geometry: GeometryTag,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(ModelError::InvalidLattice("lattice needs at least one site".into()));
        }
        let mut seen = BTreeSet::new();
        let edges: Vec<(usize, usize)> = edges.into_iter().map(|(i, j)| (i.min(j), i.max(j))).collect();
        for &(i, j) in &edges {
            if j >= n_sites {
                return Err(ModelError::InvalidLattice(format!("edge ({i},{j}) references a missing site")));
            }
            if i == j {
                return Err(ModelError::InvalidLattice(format!("self-loop on site {i}")));
            }
            if !seen.insert((i, j)) {
                return Err(ModelError::InvalidLattice(format!("duplicate edge ({i},{j})")));
            }
        }
        if let Some(labels) = &pattern {
            if labels.len() != n_sites {
                return Err(ModelError::InvalidLattice(format!(
                    "{} pattern labels for {n_sites} sites",
                    labels.len()
                )));
            }
        }
        Ok(Self { n_sites, edges, pattern, geometry })
    }

    pub fn chain(sites: usize) -> Result<Self> {
        let edges = (1..sites).map(|i| (i - 1, i)).collect();
        Self::new(sites, edges, None, GeometryTag::Chain)
    }

    /// Seven-site chain closed into two square plaquettes sharing the middle
    /// site: chain edges plus (0,3) and (3,6).
    pub fn surface7() -> Result<Self> {
        let mut edges: Vec<_> = (1..7).map(|i| (i - 1, i)).collect();
        edges.extend([(0, 3), (3, 6)]);
        Self::new(7, edges, None, GeometryTag::Surface7)
    }

    /// 3x3 nearest-neighbour square array, site index `3 * row + col`.
    pub fn grid3x3() -> Result<Self> {
        let mut edges = Vec::with_capacity(12);
        for r in 0..3 {
            for c in 0..3 {
                let s = 3 * r + c;
                if c + 1 < 3 {
                    edges.push((s, s + 1));
                }
                if r + 1 < 3 {
                    edges.push((s, s + 3));
                }
            }
        }
        Self::new(9, edges, None, GeometryTag::Grid3x3)
    }

    /// 3x3 array with A on the checkerboard sites containing the corners
    /// (five A sites) and B on the remaining four.
    pub fn grid3x3_ab() -> Result<Self> {
        let mut lattice = Self::grid3x3()?;
        let labels = (0..9)
            .map(|s| if (s / 3 + s % 3) % 2 == 0 { Sublattice::A } else { Sublattice::B })
            .collect();
        lattice.pattern = Some(labels);
        Ok(lattice)
    }

    pub fn heavy_hex(pattern: HeavyHexPattern) -> Result<Self> {
        let text = match pattern {
            HeavyHexPattern::Ab => HEAVY_HEX_AB,
            HeavyHexPattern::Abac => HEAVY_HEX_ABAC,
        };
        parse_edge_list(text, GeometryTag::HeavyHex)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn pattern(&self) -> Option<&[Sublattice]> {
        self.pattern.as_deref()
    }

    pub fn geometry(&self) -> GeometryTag {
        self.geometry
    }

    pub fn with_pattern(mut self, labels: Vec<Sublattice>) -> Result<Self> {
        if labels.len() != self.n_sites {
            return Err(ModelError::InvalidLattice(format!(
                "{} pattern labels for {} sites",
                labels.len(),
                self.n_sites
            )));
        }
        self.pattern = Some(labels);
        Ok(self)
    }

    /// Applies a site relabeling `old -> permutation[old]`.
    pub fn relabeled(&self, permutation: &[usize]) -> Result<Self> {
        if permutation.len() != self.n_sites {
            return Err(ModelError::DimensionMismatch("permutation length".into()));
        }
        let edges = self.edges.iter().map(|&(i, j)| (permutation[i], permutation[j])).collect();
        let pattern = self.pattern.as_ref().map(|labels| {
            let mut out = labels.clone();
            for (old, &new) in permutation.iter().enumerate() {
                out[new] = labels[old];
            }
            out
        });
        Self::new(self.n_sites, edges, pattern, self.geometry)
    }

    /// Serializes in the edge-list file format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# {} sites, {} edges\n", self.n_sites, self.edges.len());
        for &(i, j) in &self.edges {
            match &self.pattern {
                Some(p) => out.push_str(&format!("{i} {j} {}{}\n", p[i], p[j])),
                None => out.push_str(&format!("{i} {j}\n")),
            }
        }
        out
    }
}

pub fn load_lattice_from_file(path: impl AsRef<Path>) -> Result<Lattice> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::MalformedEdgeFile {
        line: 0,
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_edge_list(&text, GeometryTag::Custom)
}

pub fn parse_edge_list(text: &str, geometry: GeometryTag) -> Result<Lattice> {
    let mut edges = Vec::new();
    let mut labels: Vec<Option<Sublattice>> = Vec::new();
    let mut any_label = false;
    let mut n_sites = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let bad = |reason: String| ModelError::MalformedEdgeFile { line: line_no, reason };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(bad(format!("expected `i j [labels]`, found `{content}`")));
        }
        let i: usize = fields[0].parse().map_err(|_| bad(format!("bad site index `{}`", fields[0])))?;
        let j: usize = fields[1].parse().map_err(|_| bad(format!("bad site index `{}`", fields[1])))?;
        if i == j {
            return Err(bad(format!("self-loop on site {i}")));
        }
        n_sites = n_sites.max(i + 1).max(j + 1);
        if labels.len() < n_sites {
            labels.resize(n_sites, None);
        }
        if let Some(tag) = fields.get(2) {
            any_label = true;
            let parsed: Option<Vec<Sublattice>> = tag.chars().map(Sublattice::from_char).collect();
            let parsed = parsed
                .filter(|p| !p.is_empty() && p.len() <= 2)
                .ok_or_else(|| bad(format!("bad label column `{tag}`")))?;
            for (&site, &label) in [i, j].iter().zip(&parsed) {
                match labels[site] {
                    Some(prev) if prev != label => {
                        return Err(bad(format!("site {site} labeled both {prev} and {label}")));
                    }
                    _ => labels[site] = Some(label),
                }
            }
        }
        edges.push((i, j));
    }
    if n_sites == 0 {
        return Err(ModelError::MalformedEdgeFile { line: 0, reason: "no edges".into() });
    }
    let pattern = if any_label {
        let complete: Option<Vec<Sublattice>> = labels.iter().copied().collect();
        Some(complete.ok_or_else(|| ModelError::MalformedEdgeFile {
            line: 0,
            reason: "labels given for some sites but not all".into(),
        })?)
    } else {
        None
    };
    Lattice::new(n_sites, edges, pattern, geometry).map_err(|e| match e {
        ModelError::InvalidLattice(reason) => ModelError::MalformedEdgeFile { line: 0, reason },
        other => other,
    })
}
