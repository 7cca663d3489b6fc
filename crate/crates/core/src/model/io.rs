//! JSON instance files.
//!
//! ```json
//! {"m":2,"n":1,"field":"real","kind":"gaussian","A":[[1.0],[1.0]],"b":[1.0,1.0],"x0":[1.0]}
//! ```
//!
//! Complex entries are written as `[re, im]` pairs. Floats are emitted in
//! shortest round-trip form, so a write/read cycle is bit-exact.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AnyInstance, Instance, InstanceKind};
use crate::error::{Error, Result};
use crate::scalar::{real, to_f64, Field, Scalar};

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    n: usize,
    field: Field,
    kind: String,
    #[serde(rename = "A")]
    a: Vec<Vec<Entry>>,
    b: Vec<f64>,
    #[serde(default)]
    x0: Option<Vec<Entry>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn from_scalar<S: Scalar>(v: S) -> Self {
        let (re, im) = v.parts();
        match S::FIELD {
            Field::Real => Entry::Real(re),
            Field::Complex => Entry::Complex([re, im]),
        }
    }

    fn to_scalar<S: Scalar>(self, field: &'static str) -> Result<S> {
        match (S::FIELD, self) {
            (_, Entry::Real(re)) => Ok(S::from_parts(re, 0.0)),
            (Field::Complex, Entry::Complex([re, im])) => Ok(S::from_parts(re, im)),
            (Field::Real, Entry::Complex(_)) => {
                Err(Error::invalid(field, "complex entry in a real-field instance"))
            }
        }
    }
}

pub fn serialize_instance<S: Scalar>(inst: &Instance<S>) -> Vec<u8> {
    let a = inst
        .matrix()
        .row_iter()
        .map(|row| row.iter().map(|v| Entry::from_scalar(v.clone())).collect())
        .collect();
    let file = InstanceFile {
        m: inst.m(),
        n: inst.n(),
        field: S::FIELD,
        kind: inst.kind().to_string(),
        a,
        b: inst.magnitudes().iter().map(|v| to_f64(v.clone())).collect(),
        x0: inst
            .ground_truth()
            .map(|x| x.iter().map(|v| Entry::from_scalar(v.clone())).collect()),
    };
    serde_json::to_vec(&file).expect("instance serialization cannot fail")
}

/// Reads an instance whose field is decided by the file.
pub fn deserialize_instance(bytes: &[u8]) -> Result<AnyInstance> {
    let file = parse(bytes)?;
    match file.field {
        Field::Real => Ok(AnyInstance::Real(build::<f64>(file)?)),
        Field::Complex => Ok(AnyInstance::Complex(build::<Complex64>(file)?)),
    }
}

/// Reads an instance into a specific scalar type; the file's field must match.
pub fn deserialize_instance_as<S: Scalar>(bytes: &[u8]) -> Result<Instance<S>> {
    build(parse(bytes)?)
}

fn parse(bytes: &[u8]) -> Result<InstanceFile> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        offset: byte_offset(bytes, e.line(), e.column()),
        reason: e.to_string(),
    })
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let line_start: usize = bytes
        .split_inclusive(|&c| c == b'\n')
        .take(line.saturating_sub(1))
        .map(<[u8]>::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}

fn build<S: Scalar>(file: InstanceFile) -> Result<Instance<S>> {
    if file.field != S::FIELD {
        return Err(Error::FieldMismatch { expected: S::FIELD, found: file.field });
    }
    let (m, n) = (file.m, file.n);
    if file.a.len() != m {
        return Err(Error::invalid("A", format!("expected {m} rows, found {}", file.a.len())));
    }
    if let Some(i) = file.a.iter().position(|r| r.len() != n) {
        return Err(Error::invalid("A", format!("row {i} has {} entries, expected {n}", file.a[i].len())));
    }
    if file.b.len() != m {
        return Err(Error::invalid("b", format!("expected {m} entries, found {}", file.b.len())));
    }
    let kind: InstanceKind = file.kind.parse()?;

    let mut entries = Vec::with_capacity(m * n);
    for row in &file.a {
        for e in row {
            entries.push(e.to_scalar::<S>("A")?);
        }
    }
    let a = DMatrix::from_row_slice(m, n, &entries);
    let b = DVector::from_iterator(m, file.b.iter().map(|&v| real::<S::RealField>(v)));
    let x0 = match file.x0 {
        Some(x) => {
            if x.len() != n {
                return Err(Error::invalid("x0", format!("expected {n} entries, found {}", x.len())));
            }
            let v = x.into_iter().map(|e| e.to_scalar::<S>("x0")).collect::<Result<Vec<_>>>()?;
            Some(DVector::from_vec(v))
        }
        None => None,
    };
    Instance::new(a, b, x0, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_points_into_input() {
        let text = b"{\"m\": 2,\n \"n\": oops}";
        match deserialize_instance(text) {
            Err(Error::Parse { offset, .. }) => assert_eq!(text[offset], b'o'),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn negative_b_is_a_validation_error() {
        let text = br#"{"m":2,"n":1,"field":"real","kind":"gaussian","A":[[1.0],[1.0]],"b":[1.0,-1.0],"x0":null}"#;
        assert!(matches!(deserialize_instance(text), Err(Error::Validation { field: "b", .. })));
    }

    #[test]
    fn complex_entry_in_real_file() {
        let text = br#"{"m":2,"n":1,"field":"real","kind":"gaussian","A":[[[1.0,0.5]],[1.0]],"b":[1.0,1.0]}"#;
        assert!(matches!(deserialize_instance(text), Err(Error::Validation { field: "A", .. })));
    }

    #[test]
    fn ragged_rows_rejected() {
        let text = br#"{"m":2,"n":2,"field":"real","kind":"gaussian","A":[[1.0,0.0],[1.0]],"b":[1.0,1.0]}"#;
        assert!(matches!(deserialize_instance(text), Err(Error::Validation { field: "A", .. })));
    }

    #[test]
    fn field_mismatch_for_typed_read() {
        let text = br#"{"m":2,"n":1,"field":"real","kind":"gaussian","A":[[1.0],[1.0]],"b":[1.0,1.0]}"#;
        assert!(matches!(
            deserialize_instance_as::<Complex64>(text),
            Err(Error::FieldMismatch { .. })
        ));
        assert!(deserialize_instance_as::<f64>(text).is_ok());
    }
}
