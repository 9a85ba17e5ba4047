//! One-hot encoding of categorical records.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::focal::argmax;
use crate::object::DataObject;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub levels: Vec<String>,
}

/// Ordered attribute list; each attribute becomes one one-hot block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CategoricalSchema {
    pub attributes: Vec<Attribute>,
}

impl CategoricalSchema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self> {
        for a in &attributes {
            if a.levels.is_empty() {
                return Err(invalid(alloc::format!(
                    "attribute {:?} has no levels",
                    a.name
                )));
            }
            let mut seen: Vec<&String> = a.levels.iter().collect();
            seen.sort();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(alloc::format!(
                    "attribute {:?} lists a level twice",
                    a.name
                )));
            }
        }
        Ok(Self { attributes })
    }

    /// Levels in order of first appearance, attributes named `a1, a2, …`
    /// unless `names` is given.
    pub fn infer<S: AsRef<str>>(rows: &[Vec<S>], names: Option<&[String]>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let mut attributes: Vec<Attribute> = (0..width)
            .map(|j| Attribute {
                name: names
                    .and_then(|n| n.get(j).cloned())
                    .unwrap_or_else(|| alloc::format!("a{}", j + 1)),
                levels: Vec::new(),
            })
            .collect();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DataFormat {
                    row: i,
                    column: row.len().min(width),
                    message: alloc::format!("expected {width} fields, found {}", row.len()),
                });
            }
            for (attr, cell) in attributes.iter_mut().zip(row) {
                let cell = cell.as_ref();
                if !attr.levels.iter().any(|l| l == cell) {
                    attr.levels.push(cell.to_string());
                }
            }
        }
        Self::new(attributes)
    }

    /// Width of an encoded record.
    pub fn dimension(&self) -> usize {
        self.attributes.iter().map(|a| a.levels.len()).sum()
    }

    /// Start offset and width of each attribute block.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.attributes.iter().scan(0usize, |off, a| {
            let start = *off;
            *off += a.levels.len();
            Some((start, a.levels.len()))
        })
    }

    pub fn encode_row<S: AsRef<str>>(&self, row: &[S], row_index: usize) -> Result<DataObject> {
        if row.len() != self.attributes.len() {
            return Err(Error::DataFormat {
                row: row_index,
                column: row.len().min(self.attributes.len()),
                message: alloc::format!(
                    "expected {} fields, found {}",
                    self.attributes.len(),
                    row.len()
                ),
            });
        }
        let mut values = alloc::vec![0.0; self.dimension()];
        for (col, ((attr, (start, _)), cell)) in self
            .attributes
            .iter()
            .zip(self.blocks())
            .zip(row)
            .enumerate()
        {
            let cell = cell.as_ref();
            let level =
                attr.levels
                    .iter()
                    .position(|l| l == cell)
                    .ok_or_else(|| Error::DataFormat {
                        row: row_index,
                        column: col,
                        message: alloc::format!(
                            "unknown level {cell:?} for attribute {:?}",
                            attr.name
                        ),
                    })?;
            values[start + level] = 1.0;
        }
        Ok(DataObject::vector(values))
    }

    /// Most weighted level of each block.
    pub fn decode(&self, object: &DataObject) -> Result<Vec<String>> {
        if object.len() != self.dimension() {
            return Err(invalid("object width does not match the schema"));
        }
        let v = object.as_slice();
        Ok(self
            .attributes
            .iter()
            .zip(self.blocks())
            .map(|(a, (start, len))| a.levels[argmax(&v[start..start + len])].clone())
            .collect())
    }
}

/// One-hot encodes a table of attribute strings.
pub fn encode_categorical<S: AsRef<str>>(
    rows: &[Vec<S>],
    schema: &CategoricalSchema,
) -> Result<Vec<DataObject>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| schema.encode_row(r, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn schema() -> CategoricalSchema {
        CategoricalSchema::new(vec![
            Attribute {
                name: "colour".into(),
                levels: vec!["a".into(), "b".into()],
            },
            Attribute {
                name: "size".into(),
                levels: vec!["a".into(), "b".into(), "c".into()],
            },
        ])
        .unwrap()
    }

    #[test]
    fn encodes_blocks_in_schema_order() {
        let s = schema();
        assert_eq!(s.dimension(), 5);
        let objs = encode_categorical(&[vec!["b", "b"], vec!["a", "c"]], &s).unwrap();
        assert_eq!(objs[0].as_slice(), &[0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(objs[1].as_slice(), &[1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.decode(&objs[1]).unwrap(), vec!["a", "c"]);
    }

    #[test]
    fn unknown_level_names_row_and_column() {
        let err = encode_categorical(&[vec!["a", "a"], vec!["a", "z"]], &schema()).unwrap_err();
        match err {
            Error::DataFormat { row, column, .. } => assert_eq!((row, column), (1, 1)),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn infer_keeps_first_appearance_order() {
        let rows = vec![vec!["x", "p"], vec!["y", "q"], vec!["x", "r"]];
        let s = CategoricalSchema::infer(&rows, None).unwrap();
        assert_eq!(s.attributes[0].levels, vec!["x", "y"]);
        assert_eq!(s.attributes[1].levels, vec!["p", "q", "r"]);
        assert_eq!(s.dimension(), 5);
        let ragged = vec![vec!["x", "p"], vec!["y"]];
        assert!(CategoricalSchema::infer(&ragged, None).is_err());
    }

    #[test]
    fn duplicate_levels_rejected() {
        let bad = CategoricalSchema::new(vec![Attribute {
            name: "a".into(),
            levels: vec!["x".into(), "x".into()],
        }]);
        assert!(bad.is_err());
    }
}
