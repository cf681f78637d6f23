//! JSON documents for cyclotomic numbers, fusion rings and modular data.
//!
//! Every document carries `"format": 1` and a `"kind"`. Unknown fields are
//! rejected. Rationals are `[exponent, numerator, denominator]` triples whose
//! integers are JSON numbers when they fit in `i64` and decimal strings otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::fusion::{FusionError, FusionRing};
use crate::moddata::{ModDataError, ModularData};
use crate::Cyclo;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u64),
    #[error("missing or unknown document kind {0:?}")]
    Kind(String),
    #[error("expected a {expected} document, found {found}")]
    WrongKind { expected: &'static str, found: String },
    #[error(transparent)]
    ModData(#[from] ModDataError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    fn from_big(x: &BigInt) -> Int {
        x.to_i64().map_or_else(|| Int::Big(x.to_string()), Int::Small)
    }

    fn to_big<E: serde::de::Error>(&self) -> Result<BigInt, E> {
        match self {
            Int::Small(v) => Ok(BigInt::from(*v)),
            Int::Big(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CycloJson {
    conductor: usize,
    terms: Vec<(i64, Int, Int)>,
}

impl Serialize for Cyclo {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .terms()
            .map(|(k, c)| (k as i64, Int::from_big(c.numer()), Int::from_big(c.denom())))
            .collect();
        CycloJson { conductor: self.conductor(), terms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cyclo {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = CycloJson::deserialize(deserializer)?;
        let terms = raw
            .terms
            .iter()
            .map(|(k, n, d)| {
                let d: BigInt = d.to_big()?;
                if d.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok((*k, BigRational::new(n.to_big()?, d)))
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        Cyclo::from_terms(raw.conductor, terms).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingBody {
    rank: usize,
    dual: Vec<usize>,
    names: Vec<String>,
    coeffs: Vec<[u32; 4]>,
}

impl RingBody {
    fn from_ring(ring: &FusionRing) -> Self {
        RingBody {
            rank: ring.rank(),
            dual: ring.duals().to_vec(),
            names: ring.names().to_vec(),
            coeffs: ring.nonzero().map(|(a, b, c, v)| [a as u32, b as u32, c as u32, v]).collect(),
        }
    }

    fn into_ring(self) -> Result<FusionRing, FusionError> {
        let r = self.rank;
        let coeffs = self.coeffs;
        if let Some(bad) = coeffs.iter().flat_map(|e| e[..3].iter()).find(|&&x| x as usize >= r) {
            return Err(FusionError::LabelOutOfRange(*bad as usize));
        }
        FusionRing::from_rule(r, self.dual, Some(self.names), |a, b| {
            coeffs
                .iter()
                .filter(|e| e[0] as usize == a && e[1] as usize == b)
                .map(|e| (e[2] as usize, e[3]))
                .collect()
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RingDoc {
    format: u32,
    kind: String,
    rank: usize,
    dual: Vec<usize>,
    names: Vec<String>,
    coeffs: Vec<[u32; 4]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataDoc {
    format: u32,
    kind: String,
    rank: usize,
    names: Vec<String>,
    dual: Vec<usize>,
    modular: bool,
    #[serde(rename = "S")]
    s: Vec<Vec<Cyclo>>,
    #[serde(rename = "T")]
    t: Vec<Cyclo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fusion: Option<RingBody>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ListDoc {
    format: u32,
    kind: String,
    members: Vec<DataDoc>,
}

const DATA: &str = "modular_data";
const RING: &str = "fusion_ring";
const LIST: &str = "modular_data_list";

fn data_doc(md: &ModularData) -> DataDoc {
    DataDoc {
        format: FORMAT_VERSION,
        kind: DATA.into(),
        rank: md.rank(),
        names: md.names().to_vec(),
        dual: md.duals().to_vec(),
        modular: md.claims_modular(),
        s: md.s_rows().map(<[Cyclo]>::to_vec).collect(),
        t: md.twists().to_vec(),
        fusion: md.attached_fusion().map(RingBody::from_ring),
    }
}

fn data_from_doc(doc: DataDoc) -> Result<ModularData, FormatError> {
    if doc.kind != DATA {
        return Err(FormatError::WrongKind { expected: DATA, found: doc.kind });
    }
    if doc.rank != doc.t.len() {
        return Err(ModDataError::Shape { what: "T", got: doc.t.len(), expected: doc.rank }.into());
    }
    let md = ModularData::new(doc.names, doc.s, doc.t, doc.dual, doc.modular)?;
    Ok(match doc.fusion {
        Some(body) => md.with_fusion(body.into_ring()?)?,
        None => md,
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable document");
    s.push('\n');
    s
}

pub fn data_to_json(md: &ModularData) -> String {
    pretty(&data_doc(md))
}

pub fn data_list_to_json(list: &[ModularData]) -> String {
    pretty(&ListDoc { format: FORMAT_VERSION, kind: LIST.into(), members: list.iter().map(data_doc).collect() })
}

pub fn ring_to_json(ring: &FusionRing) -> String {
    let body = RingBody::from_ring(ring);
    pretty(&RingDoc {
        format: FORMAT_VERSION,
        kind: RING.into(),
        rank: body.rank,
        dual: body.dual,
        names: body.names,
        coeffs: body.coeffs,
    })
}

/// A parsed document of any kind.
#[derive(Debug, Clone)]
pub enum Document {
    Data(ModularData),
    DataList(Vec<ModularData>),
    Ring(FusionRing),
}

pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    match value.get("format").and_then(Value::as_u64) {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        Some(v) => return Err(FormatError::Version(v)),
        None => return Err(FormatError::Version(0)),
    }
    let kind = value.get("kind").and_then(Value::as_str).unwrap_or_default().to_string();
    match kind.as_str() {
        DATA => Ok(Document::Data(data_from_doc(serde_json::from_value(value)?)?)),
        RING => {
            let doc: RingDoc = serde_json::from_value(value)?;
            let body = RingBody { rank: doc.rank, dual: doc.dual, names: doc.names, coeffs: doc.coeffs };
            Ok(Document::Ring(body.into_ring()?))
        }
        LIST => {
            let doc: ListDoc = serde_json::from_value(value)?;
            let members = doc.members.into_iter().map(data_from_doc).collect::<Result<_, _>>()?;
            Ok(Document::DataList(members))
        }
        _ => Err(FormatError::Kind(kind)),
    }
}

pub fn data_from_json(text: &str) -> Result<ModularData, FormatError> {
    match parse_document(text)? {
        Document::Data(md) => Ok(md),
        Document::DataList(_) => Err(FormatError::WrongKind { expected: DATA, found: LIST.into() }),
        Document::Ring(_) => Err(FormatError::WrongKind { expected: DATA, found: RING.into() }),
    }
}

pub fn ring_from_json(text: &str) -> Result<FusionRing, FormatError> {
    match parse_document(text)? {
        Document::Ring(r) => Ok(r),
        Document::Data(_) => Err(FormatError::WrongKind { expected: RING, found: DATA.into() }),
        Document::DataList(_) => Err(FormatError::WrongKind { expected: RING, found: LIST.into() }),
    }
}
