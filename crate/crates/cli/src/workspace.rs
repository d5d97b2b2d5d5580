//! The batch file format: a UTF-8 JSON document naming objects, morphisms,
//! double sequences and 3x3 diagrams over one declared ring. Integers are
//! serialized as decimal strings so arbitrary precision survives the trip;
//! maps are ordered, so serialization is canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use k1wb_core::category::{well_defined, Morphism, PresentedObject};
use k1wb_core::diagrams::{validate_3x3, validate_dses, DoubleSes, Edge, Report, ThreeByThree};
use k1wb_core::linalg::{BaseRing, Matrix};

/// Errors at the parse/resolve layer (exit code 3 territory): syntax,
/// unresolved references, structural mismatches.
#[derive(Debug)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

fn err<T>(msg: impl Into<String>) -> PResult<T> {
    Err(ParseError(msg.into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RingDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ObjectDoc {
    generators: usize,
    relations: MatrixDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MorphismDoc {
    src: String,
    dst: String,
    matrix: MatrixDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DsesDoc {
    #[serde(rename = "aP")]
    a_p: String,
    a: String,
    #[serde(rename = "aPP")]
    a_pp: String,
    f1: String,
    f2: String,
    g1: String,
    g2: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeDoc {
    f1: String,
    f2: String,
    g1: String,
    g2: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiagramDoc {
    objects: Vec<Vec<String>>,
    rows: Vec<EdgeDoc>,
    cols: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FileDoc {
    ring: RingDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    objects: BTreeMap<String, ObjectDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    morphisms: BTreeMap<String, MorphismDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    dses: BTreeMap<String, DsesDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    diagrams: BTreeMap<String, DiagramDoc>,
}

/// A fully resolved batch file.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub ring: Option<BaseRing>,
    pub objects: BTreeMap<String, PresentedObject>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub dses: BTreeMap<String, DoubleSes>,
    pub diagrams: BTreeMap<String, ThreeByThree>,
}

impl Workspace {
    pub fn new(ring: BaseRing) -> Workspace {
        Workspace {
            ring: Some(ring),
            ..Workspace::default()
        }
    }

    fn ring(&self) -> BaseRing {
        self.ring.unwrap_or(BaseRing::Integers)
    }

    /// Add a double sequence under `name`, creating prefixed object and
    /// morphism entries.
    pub fn insert_dses(&mut self, name: &str, d: &DoubleSes) {
        self.objects.insert(format!("{name}.aP"), d.a_prime.clone());
        self.objects.insert(format!("{name}.a"), d.a.clone());
        self.objects
            .insert(format!("{name}.aPP"), d.a_dprime.clone());
        self.morphisms.insert(format!("{name}.f1"), d.f1.clone());
        self.morphisms.insert(format!("{name}.f2"), d.f2.clone());
        self.morphisms.insert(format!("{name}.g1"), d.g1.clone());
        self.morphisms.insert(format!("{name}.g2"), d.g2.clone());
        self.dses.insert(name.to_string(), d.clone());
    }

    /// Add a 3x3 diagram under `name`, creating prefixed entries for its
    /// nine objects and twenty-four arrows.
    pub fn insert_diagram(&mut self, name: &str, t: &ThreeByThree) {
        for i in 0..3 {
            for j in 0..3 {
                self.objects
                    .insert(format!("{name}.o{i}{j}"), t.objects[i][j].clone());
            }
        }
        for (kind, edges) in [("row", &t.rows), ("col", &t.cols)] {
            for (i, (f, g)) in edges.iter().enumerate() {
                self.morphisms
                    .insert(format!("{name}.{kind}{i}.f1"), f.m1.clone());
                self.morphisms
                    .insert(format!("{name}.{kind}{i}.f2"), f.m2.clone());
                self.morphisms
                    .insert(format!("{name}.{kind}{i}.g1"), g.m1.clone());
                self.morphisms
                    .insert(format!("{name}.{kind}{i}.g2"), g.m2.clone());
            }
        }
        self.diagrams.insert(name.to_string(), t.clone());
    }

    /// Mathematical validation of every entity; structural problems were
    /// already rejected at parse time.
    pub fn validate(&self) -> Report {
        let mut report = Report::new();
        for (name, f) in &self.morphisms {
            if !well_defined(f) {
                report.push(
                    format!("morphisms.{name}"),
                    "matrix does not carry relations into relations",
                );
            }
        }
        for (name, d) in &self.dses {
            report.absorb(&format!("dses.{name}"), validate_dses(d));
        }
        for (name, t) in &self.diagrams {
            report.absorb(&format!("diagrams.{name}"), validate_3x3(t));
        }
        report
    }
}

fn ring_to_doc(ring: BaseRing) -> RingDoc {
    match ring {
        BaseRing::Integers => RingDoc {
            kind: "Integers".into(),
            modulus: None,
        },
        BaseRing::PrimeField(p) => RingDoc {
            kind: "PrimeField".into(),
            modulus: Some(p.to_string()),
        },
    }
}

fn ring_from_doc(doc: &RingDoc) -> PResult<BaseRing> {
    match doc.kind.as_str() {
        "Integers" => Ok(BaseRing::Integers),
        "PrimeField" => {
            let m = doc
                .modulus
                .as_ref()
                .ok_or(ParseError("PrimeField needs a modulus".into()))?;
            let p: u64 = m
                .parse()
                .map_err(|_| ParseError(format!("bad modulus {m}")))?;
            BaseRing::prime_field(p).map_err(|e| ParseError(e.to_string()))
        }
        other => err(format!("unknown ring kind {other}")),
    }
}

fn matrix_to_doc(m: &Matrix) -> MatrixDoc {
    MatrixDoc {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.entries().iter().map(|e| e.to_string()).collect(),
    }
}

fn matrix_from_doc(ring: BaseRing, doc: &MatrixDoc, what: &str) -> PResult<Matrix> {
    if doc.entries.len() != doc.rows * doc.cols {
        return err(format!(
            "{what}: matrix has {} entries, expected {}",
            doc.entries.len(),
            doc.rows * doc.cols
        ));
    }
    let mut entries = Vec::with_capacity(doc.entries.len());
    for e in &doc.entries {
        let v = BigInt::from_str(e).map_err(|_| ParseError(format!("{what}: bad integer {e}")))?;
        entries.push(v);
    }
    Ok(Matrix::new(ring, doc.rows, doc.cols, entries))
}

/// Parse a document; syntax errors, unresolved references and structural
/// mismatches are all [`ParseError`]s.
pub fn parse(text: &str) -> PResult<Workspace> {
    let doc: FileDoc = serde_json::from_str(text).map_err(|e| {
        ParseError(format!(
            "syntax error at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let ring = ring_from_doc(&doc.ring)?;
    let mut ws = Workspace::new(ring);
    for (name, od) in &doc.objects {
        let rel = matrix_from_doc(ring, &od.relations, &format!("objects.{name}"))?;
        if rel.rows() != od.generators {
            return err(format!(
                "objects.{name}: relations have {} rows for {} generators",
                rel.rows(),
                od.generators
            ));
        }
        ws.objects
            .insert(name.clone(), PresentedObject::new(ring, od.generators, rel));
    }
    let lookup_obj = |objects: &BTreeMap<String, PresentedObject>, n: &str, what: &str| {
        objects
            .get(n)
            .cloned()
            .ok_or_else(|| ParseError(format!("{what}: unresolved object reference {n}")))
    };
    for (name, md) in &doc.morphisms {
        let what = format!("morphisms.{name}");
        let src = lookup_obj(&ws.objects, &md.src, &what)?;
        let dst = lookup_obj(&ws.objects, &md.dst, &what)?;
        let map = matrix_from_doc(ring, &md.matrix, &what)?;
        let m = Morphism::new_unchecked(src, dst, map)
            .map_err(|e| ParseError(format!("{what}: {e}")))?;
        ws.morphisms.insert(name.clone(), m);
    }
    let lookup_mor = |morphisms: &BTreeMap<String, Morphism>, n: &str, what: &str| {
        morphisms
            .get(n)
            .cloned()
            .ok_or_else(|| ParseError(format!("{what}: unresolved morphism reference {n}")))
    };
    for (name, dd) in &doc.dses {
        let what = format!("dses.{name}");
        let d = DoubleSes::new(
            lookup_obj(&ws.objects, &dd.a_p, &what)?,
            lookup_obj(&ws.objects, &dd.a, &what)?,
            lookup_obj(&ws.objects, &dd.a_pp, &what)?,
            lookup_mor(&ws.morphisms, &dd.f1, &what)?,
            lookup_mor(&ws.morphisms, &dd.f2, &what)?,
            lookup_mor(&ws.morphisms, &dd.g1, &what)?,
            lookup_mor(&ws.morphisms, &dd.g2, &what)?,
        );
        ws.dses.insert(name.clone(), d);
    }
    for (name, td) in &doc.diagrams {
        let what = format!("diagrams.{name}");
        if td.objects.len() != 3 || td.objects.iter().any(|r| r.len() != 3) {
            return err(format!("{what}: objects must form a 3x3 grid"));
        }
        if td.rows.len() != 3 || td.cols.len() != 3 {
            return err(format!(
                "{what}: rows and cols must each have 3 edge groups"
            ));
        }
        let mut grid: Vec<Vec<PresentedObject>> = Vec::new();
        for r in &td.objects {
            let mut row = Vec::new();
            for n in r {
                row.push(lookup_obj(&ws.objects, n, &what)?);
            }
            grid.push(row);
        }
        let edge = |e: &EdgeDoc| -> PResult<(Edge, Edge)> {
            Ok((
                Edge::new(
                    lookup_mor(&ws.morphisms, &e.f1, &what)?,
                    lookup_mor(&ws.morphisms, &e.f2, &what)?,
                ),
                Edge::new(
                    lookup_mor(&ws.morphisms, &e.g1, &what)?,
                    lookup_mor(&ws.morphisms, &e.g2, &what)?,
                ),
            ))
        };
        let t = ThreeByThree {
            objects: [
                [grid[0][0].clone(), grid[0][1].clone(), grid[0][2].clone()],
                [grid[1][0].clone(), grid[1][1].clone(), grid[1][2].clone()],
                [grid[2][0].clone(), grid[2][1].clone(), grid[2][2].clone()],
            ],
            rows: [edge(&td.rows[0])?, edge(&td.rows[1])?, edge(&td.rows[2])?],
            cols: [edge(&td.cols[0])?, edge(&td.cols[1])?, edge(&td.cols[2])?],
        };
        ws.diagrams.insert(name.clone(), t);
    }
    Ok(ws)
}

/// Canonical serialization: ordered maps, fixed field order, decimal-string
/// integers, trailing newline.
pub fn serialize(ws: &Workspace) -> String {
    let mut doc = FileDoc {
        ring: ring_to_doc(ws.ring()),
        objects: BTreeMap::new(),
        morphisms: BTreeMap::new(),
        dses: BTreeMap::new(),
        diagrams: BTreeMap::new(),
    };
    for (name, o) in &ws.objects {
        doc.objects.insert(
            name.clone(),
            ObjectDoc {
                generators: o.generators(),
                relations: matrix_to_doc(o.relations()),
            },
        );
    }
    let name_of = |needle: &Morphism, what: &str| -> String {
        ws.morphisms
            .iter()
            .find(|(_, m)| *m == needle)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| panic!("serialize: {what} references an unnamed morphism"))
    };
    let obj_name = |needle: &PresentedObject, what: &str| -> String {
        ws.objects
            .iter()
            .find(|(_, o)| *o == needle)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| panic!("serialize: {what} references an unnamed object"))
    };
    for (name, m) in &ws.morphisms {
        doc.morphisms.insert(
            name.clone(),
            MorphismDoc {
                src: obj_name(m.src(), name),
                dst: obj_name(m.dst(), name),
                matrix: matrix_to_doc(m.map()),
            },
        );
    }
    for (name, d) in &ws.dses {
        doc.dses.insert(
            name.clone(),
            DsesDoc {
                a_p: obj_name(&d.a_prime, name),
                a: obj_name(&d.a, name),
                a_pp: obj_name(&d.a_dprime, name),
                f1: name_of(&d.f1, name),
                f2: name_of(&d.f2, name),
                g1: name_of(&d.g1, name),
                g2: name_of(&d.g2, name),
            },
        );
    }
    for (name, t) in &ws.diagrams {
        let edge = |pair: &(Edge, Edge)| EdgeDoc {
            f1: name_of(&pair.0.m1, name),
            f2: name_of(&pair.0.m2, name),
            g1: name_of(&pair.1.m1, name),
            g2: name_of(&pair.1.m2, name),
        };
        doc.diagrams.insert(
            name.clone(),
            DiagramDoc {
                objects: t
                    .objects
                    .iter()
                    .map(|r| r.iter().map(|o| obj_name(o, name)).collect())
                    .collect(),
                rows: t.rows.iter().map(&edge).collect(),
                cols: t.cols.iter().map(&edge).collect(),
            },
        );
    }
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable document");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use k1wb_core::gen::{self, GenConfig, Strategy};

    #[test]
    fn serialize_is_canonical() {
        // serialize . parse . serialize = serialize, byte for byte
        let ring = BaseRing::prime_field(5).unwrap();
        let cfg = GenConfig::new(ring, 19);
        let mut ws = Workspace::new(ring);
        ws.insert_dses("sample", &gen::random_free_dses(&cfg, 0, 2, 1));
        ws.insert_diagram("diagram", &gen::random_3x3(&cfg, 1, Strategy::C));
        let once = serialize(&ws);
        let twice = serialize(&parse(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn empty_workspace_round_trips() {
        let ws = Workspace::new(BaseRing::Integers);
        let text = serialize(&ws);
        let back = parse(&text).unwrap();
        assert!(back.objects.is_empty() && back.dses.is_empty());
        assert_eq!(serialize(&back), text);
    }

    #[test]
    fn parse_rejects_non_prime_modulus() {
        let text = r#"{"ring": {"kind": "PrimeField", "modulus": "6"}}"#;
        assert!(parse(text).is_err());
    }
}
