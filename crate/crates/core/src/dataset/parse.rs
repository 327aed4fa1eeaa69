use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::{AttrKind, Attributes, Dataset};
use crate::error::{Error, Result};

/// Parse headerless, comma-separated `text` into a dataset whose attributes
/// are all of `kind`. When `label_column` is given, that column holds the
/// ground-truth class of each row and is excluded from the attributes.
///
/// Fields are trimmed; blank lines are skipped. Symbols and class names are
/// numbered in order of first appearance.
pub fn parse_csv(text: &str, kind: AttrKind, label_column: Option<usize>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut width = None;
    let mut numeric = Vec::new();
    let mut codes = Vec::new();
    let mut alphabets: Vec<(HashMap<String, u32>, Vec<String>)> = Vec::new();
    let mut class_ids: HashMap<String, u32> = HashMap::new();
    let mut class_names = Vec::new();
    let mut labels = Vec::new();

    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                row,
                expected,
                found: record.len(),
            });
        }
        if let Some(col) = label_column {
            if col >= expected {
                return Err(Error::LabelColumnOutOfRange {
                    column: col,
                    width: expected,
                });
            }
        }
        let attr_count = expected - usize::from(label_column.is_some());
        if attr_count == 0 {
            return Err(Error::NoAttributes);
        }
        if alphabets.is_empty() && kind == AttrKind::Categorical {
            alphabets = vec![Default::default(); attr_count];
        }

        let mut attr = 0;
        for (column, token) in record.iter().enumerate() {
            if Some(column) == label_column {
                let next = class_names.len() as u32;
                let id = *class_ids.entry(token.to_owned()).or_insert_with(|| {
                    class_names.push(token.to_owned());
                    next
                });
                labels.push(id);
                continue;
            }
            match kind {
                AttrKind::Numeric => {
                    let value = token
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::BadNumber {
                            row,
                            column,
                            token: token.to_owned(),
                        })?;
                    numeric.push(value);
                }
                AttrKind::Categorical => {
                    let (index, names) = &mut alphabets[attr];
                    let next = names.len() as u32;
                    let code = *index.entry(token.to_owned()).or_insert_with(|| {
                        names.push(token.to_owned());
                        next
                    });
                    codes.push(code);
                }
            }
            attr += 1;
        }
    }

    let Some(width) = width else {
        return Err(Error::EmptyInput);
    };
    let d = width - usize::from(label_column.is_some());
    let labels = label_column.map(|_| labels);
    let ds = match kind {
        AttrKind::Numeric => Dataset::numeric("", d, numeric, labels)?,
        AttrKind::Categorical => Dataset::categorical(
            "",
            alphabets.into_iter().map(|(_, names)| names).collect(),
            codes,
            labels,
        )?,
    };
    Ok(ds.with_label_names(class_names))
}

/// Stable identifier for a dataset parsed from `text` with the given options.
/// Identical bytes and options always map to the same id, whichever path
/// (file or upload) delivered them.
pub fn content_id(text: &str, kind: AttrKind, label_column: Option<usize>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"itmap-dataset/1\n");
    hasher.update(kind.to_string().as_bytes());
    hasher.update(b"\n");
    hasher.update(label_column.map_or_else(|| "-".to_owned(), |c| c.to_string()));
    hasher.update(b"\n");
    hasher.update(text.as_bytes());
    hex::encode(&hasher.finalize()[..8])
}

/// Serialize `ds` as CSV. Labels, when present, go in the first column.
pub fn to_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    for i in 0..ds.len() {
        let mut fields: Vec<String> = Vec::with_capacity(ds.dim() + 1);
        if let Some(labels) = ds.labels() {
            fields.push(ds.label_names()[labels[i] as usize].clone());
        }
        match ds.attributes() {
            Attributes::Numeric(_) => {
                fields.extend(ds.numeric_row(i).unwrap().iter().map(|v| v.to_string()))
            }
            Attributes::Categorical(_) => fields.extend(
                ds.categorical_row(i)
                    .unwrap()
                    .iter()
                    .enumerate()
                    .map(|(c, &code)| ds.symbols()[c][code as usize].clone()),
            ),
        }
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_numeric_parse() {
        let ds = parse_csv("0,0\n3,4", AttrKind::Numeric, None).unwrap();
        assert_eq!((ds.len(), ds.dim()), (2, 2));
        assert_eq!(ds.numeric_row(1), Some(&[3.0, 4.0][..]));
        assert!(ds.labels().is_none());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = parse_csv("a,b\na", AttrKind::Categorical, None).unwrap_err();
        assert!(matches!(
            err,
            Error::RaggedRow {
                row: 1,
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn non_numeric_token_is_rejected_in_numeric_mode() {
        let err = parse_csv("1,2\n3,x", AttrKind::Numeric, None).unwrap_err();
        assert!(matches!(
            err,
            Error::BadNumber {
                row: 1,
                column: 1,
                ..
            }
        ));
        assert!(parse_csv("1,inf", AttrKind::Numeric, None).is_err());
    }

    #[test]
    fn empty_text_is_rejected() {
        assert!(matches!(
            parse_csv("", AttrKind::Numeric, None),
            Err(Error::EmptyInput)
        ));
        assert!(matches!(
            parse_csv("\n\n", AttrKind::Numeric, None),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn label_column_is_split_off() {
        let ds = parse_csv("p,x,s\ne,y,s\np,x,f", AttrKind::Categorical, Some(0)).unwrap();
        assert_eq!((ds.len(), ds.dim()), (3, 2));
        assert_eq!(ds.labels(), Some(&[0, 1, 0][..]));
        assert_eq!(ds.label_names(), ["p", "e"]);
        assert_eq!(ds.categorical_row(2), Some(&[0, 1][..]));
        assert!(matches!(
            parse_csv("1,2", AttrKind::Numeric, Some(2)),
            Err(Error::LabelColumnOutOfRange { .. })
        ));
        assert!(matches!(
            parse_csv("1\n2", AttrKind::Numeric, Some(0)),
            Err(Error::NoAttributes)
        ));
    }

    #[test]
    fn csv_export_parses_back() {
        let ds = parse_csv("b,0.5,-1\na,2,3e-3", AttrKind::Numeric, Some(0)).unwrap();
        let again = parse_csv(&to_csv(&ds), AttrKind::Numeric, Some(0)).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn content_id_depends_on_bytes_and_options() {
        let a = content_id("1,2", AttrKind::Numeric, None);
        assert_eq!(a, content_id("1,2", AttrKind::Numeric, None));
        assert_eq!(a.len(), 16);
        assert_ne!(a, content_id("1,2", AttrKind::Numeric, Some(0)));
        assert_ne!(a, content_id("1,3", AttrKind::Numeric, None));
    }
}
