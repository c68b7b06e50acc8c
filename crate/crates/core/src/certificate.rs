//! Machine-checkable certificates: either a packing of even A-cycles or an
//! edge hitting set with per-edge provenance.

use serde::{Deserialize, Serialize};

use crate::graph::Cycle;

/// Where a hitting-set edge came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Edge incident with the hitting vertex z.
    ZIncident,
    /// Contributed by the per-block cover of the given block.
    Block(usize),
    /// Contributed by the per-string cover of the given string.
    BlockString(usize),
    /// Found by the exact oracle (general-mode fallback).
    Oracle,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::ZIncident => write!(f, "z-incident"),
            Provenance::Block(i) => write!(f, "block:{i}"),
            Provenance::BlockString(i) => write!(f, "string:{i}"),
            Provenance::Oracle => write!(f, "oracle"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "z-incident" {
            return Ok(Provenance::ZIncident);
        }
        if s == "oracle" {
            return Ok(Provenance::Oracle);
        }
        if let Some(i) = s.strip_prefix("block:") {
            return i.parse().map(Provenance::Block).map_err(|e| e.to_string());
        }
        if let Some(i) = s.strip_prefix("string:") {
            return i.parse().map(Provenance::BlockString).map_err(|e| e.to_string());
        }
        Err(format!("unknown provenance tag '{s}'"))
    }
}

/// Output of a solve: `k` edge-disjoint even A-cycles, or an edge set that
/// meets every even A-cycle.
#[derive(Clone, Debug)]
pub enum Certificate {
    Packing {
        k: usize,
        cycles: Vec<Cycle>,
        bound_claimed: u64,
    },
    HittingSet {
        k: usize,
        edges: Vec<(u32, u32)>,
        provenance: Vec<Provenance>,
        bound_claimed: u64,
    },
}

impl Certificate {
    pub fn k(&self) -> usize {
        match self {
            Certificate::Packing { k, .. } | Certificate::HittingSet { k, .. } => *k,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Packing { .. } => "packing",
            Certificate::HittingSet { .. } => "hitting",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    kind: String,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles: Option<Vec<Vec<u32>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(u32, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<String>>,
    bound_claimed: u64,
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let j = match self {
            Certificate::Packing { k, cycles, bound_claimed } => CertificateJson {
                kind: "packing".into(),
                k: *k,
                cycles: Some(cycles.iter().map(|c| c.vertices().to_vec()).collect()),
                edges: None,
                provenance: None,
                bound_claimed: *bound_claimed,
            },
            Certificate::HittingSet { k, edges, provenance, bound_claimed } => CertificateJson {
                kind: "hitting".into(),
                k: *k,
                cycles: None,
                edges: Some(edges.clone()),
                provenance: Some(provenance.iter().map(|p| p.to_string()).collect()),
                bound_claimed: *bound_claimed,
            },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = CertificateJson::deserialize(d)?;
        match j.kind.as_str() {
            "packing" => {
                let cycles = j
                    .cycles
                    .ok_or_else(|| D::Error::custom("packing certificate without cycles"))?;
                let mut out = Vec::new();
                for vs in cycles {
                    if vs.len() < 3 {
                        return Err(D::Error::custom("cycle with fewer than three vertices"));
                    }
                    out.push(Cycle::canonical(vs));
                }
                Ok(Certificate::Packing { k: j.k, cycles: out, bound_claimed: j.bound_claimed })
            }
            "hitting" => {
                let edges = j
                    .edges
                    .ok_or_else(|| D::Error::custom("hitting certificate without edges"))?;
                let provenance = match j.provenance {
                    None => vec![Provenance::Oracle; edges.len()],
                    Some(tags) => {
                        let mut out = Vec::new();
                        for t in tags {
                            out.push(t.parse().map_err(D::Error::custom)?);
                        }
                        out
                    }
                };
                if provenance.len() != edges.len() {
                    return Err(D::Error::custom("provenance length mismatch"));
                }
                Ok(Certificate::HittingSet {
                    k: j.k,
                    edges,
                    provenance,
                    bound_claimed: j.bound_claimed,
                })
            }
            other => Err(D::Error::custom(format!("unknown certificate kind '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let cert = Certificate::HittingSet {
            k: 2,
            edges: vec![(0, 1), (2, 3)],
            provenance: vec![Provenance::ZIncident, Provenance::Block(4)],
            bound_claimed: 34560,
        };
        let s = serde_json::to_string(&cert).unwrap();
        assert!(s.contains("\"kind\":\"hitting\""));
        assert!(s.contains("z-incident"));
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn packing_serializes_canonical_cycles() {
        let cert = Certificate::Packing {
            k: 1,
            cycles: vec![Cycle::canonical(vec![2, 1, 0, 3])],
            bound_claimed: 1,
        };
        let s = serde_json::to_string(&cert).unwrap();
        assert!(s.contains("[0,1,2,3]") || s.contains("[0,3,2,1]"));
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back.kind(), "packing");
    }
}
