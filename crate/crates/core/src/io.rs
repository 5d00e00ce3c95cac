// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! File formats.
//!
//! * Incidence CSV: UTF-8, header `actor,attribute,kind,weight`, `kind` one
//!   of `affiliation` / `attitude`. The `weight` column (and any individual
//!   weight cell) may be omitted and defaults to 1.
//! * Catalog sidecar: labels one per line under `[affiliations]` and
//!   `[attitudes]` section headers. Blank lines and `#` comments are ignored.
//! * Membership CSV: header `attribute,kind,<dataset>...`, one row per
//!   attribute holding 1-based community indices (empty cell = attribute
//!   absent), plus an optional row of kind `modularity` holding each column's
//!   Q.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::analysis::{DatasetAssignment, MembershipTable};
use crate::builder::{AttributeCatalog, AttributeKind, IncidenceRecord};
use crate::error::{Error, Result};

pub const INCIDENCE_HEADER: [&str; 4] = ["actor", "attribute", "kind", "weight"];
pub const MODULARITY_KIND: &str = "modularity";
pub const MODULARITY_LABEL: &str = "Computed Modularity";

/// One survey's incidence records with their attribute catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurveyDataset {
    pub name: String,
    pub records: Vec<IncidenceRecord>,
    pub catalog: AttributeCatalog,
}

impl SurveyDataset {
    pub fn new(
        name: impl Into<String>,
        records: Vec<IncidenceRecord>,
        catalog: AttributeCatalog,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::BadConfig("dataset name must not be empty".into()));
        }
        for r in &records {
            catalog.validate(r)?;
        }
        Ok(Self {
            name,
            records,
            catalog,
        })
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "dataset".to_owned())
}

/// Sidecar used when none is given: the CSV path with a `.catalog` extension.
pub fn default_catalog_path(csv: &Path) -> PathBuf {
    csv.with_extension("catalog")
}

/// Reads an incidence CSV. The catalog comes from `catalog` if given, else
/// from the default sidecar if it exists, else from the records themselves
/// in order of first appearance.
pub fn parse_incidence_csv(path: &Path, catalog: Option<&Path>) -> Result<SurveyDataset> {
    let text = fs::read_to_string(path)?;
    let records = parse_incidence(&text, path)?;
    let sidecar = catalog
        .map(Path::to_path_buf)
        .or_else(|| Some(default_catalog_path(path)).filter(|p| p.is_file()));
    let catalog = match sidecar {
        Some(p) => read_catalog(&p)?,
        None => catalog_from_records(&records)?,
    };
    SurveyDataset::new(dataset_name(path), records, catalog)
}

/// Parses incidence CSV text; `origin` is only used in error messages.
pub fn parse_incidence(text: &str, origin: &Path) -> Result<Vec<IncidenceRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyInput),
        Some(row) => row.map_err(|e| csv_error(e, origin))?,
    };
    let columns: Vec<&str> = header.iter().collect();
    let has_weight = match columns.as_slice() {
        [a, b, c] if [*a, *b, *c] == INCIDENCE_HEADER[..3] => false,
        cols if cols == INCIDENCE_HEADER => true,
        _ => {
            return Err(Error::parse(
                origin,
                1,
                format!("expected header {:?}", INCIDENCE_HEADER.join(",")),
            ))
        }
    };
    let width = if has_weight { 4 } else { 3 };

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(e, origin))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != width && !(has_weight && row.len() == 3) {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {width} fields, found {}", row.len()),
            ));
        }
        let (actor, attribute) = (&row[0], &row[1]);
        if actor.is_empty() || attribute.is_empty() {
            return Err(Error::parse(
                origin,
                line,
                "actor and attribute must be non-empty",
            ));
        }
        let kind: AttributeKind = row[2].parse().map_err(|m| Error::parse(origin, line, m))?;
        let weight = match row.get(3) {
            None | Some("") => 1,
            Some(w) => match w.parse::<u64>() {
                Ok(w) if w >= 1 => w,
                _ => {
                    return Err(Error::parse(
                        origin,
                        line,
                        format!("weight must be a positive integer, got {w:?}"),
                    ))
                }
            },
        };
        records.push(IncidenceRecord::new(actor, attribute, kind).with_weight(weight));
    }
    Ok(records)
}

fn csv_error(e: csv::Error, origin: &Path) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::parse(origin, line, e.to_string())
}

/// Canonical incidence CSV: full header, every weight written.
pub fn write_incidence(records: &[IncidenceRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(INCIDENCE_HEADER)?;
    for r in records {
        w.write_record([
            r.actor.as_str(),
            r.attribute.as_str(),
            r.kind.as_str(),
            &r.weight.to_string(),
        ])?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8 from utf-8 input"))
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}

/// Catalog in first-appearance order.
pub fn catalog_from_records(records: &[IncidenceRecord]) -> Result<AttributeCatalog> {
    let mut catalog = AttributeCatalog::default();
    for r in records {
        match catalog.kind_of(&r.attribute) {
            None => catalog.push(r.attribute.clone(), r.kind)?,
            Some(k) if k != r.kind => {
                return Err(Error::KindMismatch {
                    label: r.attribute.clone(),
                    expected: k.as_str(),
                    found: r.kind.as_str(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(catalog)
}

pub fn read_catalog(path: &Path) -> Result<AttributeCatalog> {
    parse_catalog(&fs::read_to_string(path)?, path)
}

pub fn parse_catalog(text: &str, origin: &Path) -> Result<AttributeCatalog> {
    let mut catalog = AttributeCatalog::default();
    let mut section: Option<AttributeKind> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[affiliations]" => section = Some(AttributeKind::Affiliation),
            "[attitudes]" => section = Some(AttributeKind::Attitude),
            label => {
                let kind = section.ok_or_else(|| {
                    Error::parse(origin, i as u64 + 1, "label before any section header")
                })?;
                catalog.push(label.to_owned(), kind)?;
            }
        }
    }
    Ok(catalog)
}

pub fn write_catalog(catalog: &AttributeCatalog) -> String {
    let mut out = String::from("[affiliations]\n");
    for l in catalog.affiliations() {
        out.push_str(l);
        out.push('\n');
    }
    out.push_str("[attitudes]\n");
    for l in catalog.attitudes() {
        out.push_str(l);
        out.push('\n');
    }
    out
}

/// Memberships as read from a membership CSV: the row catalog and one
/// assignment per dataset column.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipFile {
    pub catalog: AttributeCatalog,
    pub datasets: Vec<DatasetAssignment>,
}

pub fn read_memberships(path: &Path) -> Result<MembershipFile> {
    parse_memberships(&fs::read_to_string(path)?, path)
}

pub fn parse_memberships(text: &str, origin: &Path) -> Result<MembershipFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(Error::EmptyInput),
        Some(row) => row.map_err(|e| csv_error(e, origin))?,
    };
    if header.len() < 3 || &header[0] != "attribute" || &header[1] != "kind" {
        return Err(Error::parse(
            origin,
            1,
            "expected header attribute,kind,<dataset>...",
        ));
    }
    let mut datasets: Vec<DatasetAssignment> = header
        .iter()
        .skip(2)
        .map(|name| DatasetAssignment {
            name: name.to_owned(),
            ..Default::default()
        })
        .collect();
    let mut seen_names = HashMap::new();
    for d in &datasets {
        if d.name.is_empty() || seen_names.insert(d.name.clone(), ()).is_some() {
            return Err(Error::parse(
                origin,
                1,
                format!("bad dataset name {:?}", d.name),
            ));
        }
    }

    let mut catalog = AttributeCatalog::default();
    let mut seen_modularity = false;
    for row in rows {
        let row = row.map_err(|e| csv_error(e, origin))?;
        let line = row.position().map_or(0, |p| p.line());
        let label = &row[0];
        let cells = row.iter().skip(2);
        if &row[1] == MODULARITY_KIND {
            if seen_modularity {
                return Err(Error::parse(origin, line, "duplicate modularity row"));
            }
            seen_modularity = true;
            for (d, cell) in datasets.iter_mut().zip(cells) {
                d.q = match cell {
                    "" => None,
                    v => Some(v.parse::<f64>().map_err(|_| {
                        Error::parse(origin, line, format!("bad modularity value {v:?}"))
                    })?),
                };
            }
            continue;
        }
        let kind: AttributeKind = row[1].parse().map_err(|m| Error::parse(origin, line, m))?;
        if label.is_empty() {
            return Err(Error::parse(origin, line, "empty attribute label"));
        }
        catalog.push(label.to_owned(), kind)?;
        for (d, cell) in datasets.iter_mut().zip(cells) {
            match cell {
                "" => d.dropped.push(label.to_owned()),
                v => {
                    let c = v.parse::<usize>().map_err(|_| {
                        Error::parse(origin, line, format!("bad community index {v:?}"))
                    })?;
                    d.communities.insert(label.to_owned(), c);
                }
            }
        }
    }
    if catalog.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(MembershipFile { catalog, datasets })
}

/// Canonical membership CSV. The modularity row is written only when some
/// column has a value.
pub fn write_memberships(table: &MembershipTable) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["attribute".to_owned(), "kind".to_owned()];
    header.extend(table.datasets.iter().cloned());
    w.write_record(&header)?;
    for (r, (label, kind)) in table.rows.iter().enumerate() {
        let mut record = vec![label.clone(), kind.as_str().to_owned()];
        record.extend(
            table
                .columns
                .iter()
                .map(|col| col[r].map(|c| c.to_string()).unwrap_or_default()),
        );
        w.write_record(&record)?;
    }
    if table.modularity.iter().any(Option::is_some) {
        let mut record = vec![MODULARITY_LABEL.to_owned(), MODULARITY_KIND.to_owned()];
        record.extend(
            table
                .modularity
                .iter()
                .map(|q| q.map(|q| q.to_string()).unwrap_or_default()),
        );
        w.write_record(&record)?;
    }
    finish_csv(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn p() -> &'static Path {
        Path::new("test.csv")
    }

    #[test]
    fn three_records() {
        let text = "actor,attribute,kind,weight\nr1,Church,affiliation,1\nr1,Oil,attitude,\nr2,Church,affiliation,3\n";
        let recs = parse_incidence(text, p()).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1].weight, 1);
        assert_eq!(recs[2].weight, 3);
        assert_eq!(recs[1].kind, AttributeKind::Attitude);
    }

    #[test]
    fn weight_column_optional() {
        let recs = parse_incidence("actor,attribute,kind\na,b,attitude\n", p()).unwrap();
        assert_eq!(
            recs,
            [IncidenceRecord::new("a", "b", AttributeKind::Attitude)]
        );
    }

    #[test]
    fn misspelled_kind_names_line() {
        let text = "actor,attribute,kind,weight\nr1,Church,affiliation,1\nr2,Church,affil,1\n";
        match parse_incidence(text, p()) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("affil"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_weights_and_headers() {
        for w in ["0", "2.5", "-1", "x"] {
            let text = format!("actor,attribute,kind,weight\na,b,attitude,{w}\n");
            assert!(
                matches!(
                    parse_incidence(&text, p()),
                    Err(Error::Parse { line: 2, .. })
                ),
                "{w}"
            );
        }
        assert!(matches!(
            parse_incidence("who,what\n", p()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_incidence("", p()), Err(Error::EmptyInput)));
    }

    #[test]
    fn catalog_sections() {
        let cat = parse_catalog(
            "# c\n[affiliations]\nChurch\n\nUnion\n[attitudes]\nOil\n",
            p(),
        )
        .unwrap();
        assert_eq!(cat.affiliations(), ["Church", "Union"]);
        assert_eq!(cat.attitudes(), ["Oil"]);
        assert_eq!(parse_catalog(&write_catalog(&cat), p()).unwrap(), cat);
        assert!(matches!(
            parse_catalog("[affiliations]\nA\n[attitudes]\nA\n", p()),
            Err(Error::DuplicateCatalogLabel(_))
        ));
        assert!(matches!(
            parse_catalog("A\n", p()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn sidecar_resolution_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("italy.csv");
        fs::write(
            &csv,
            "actor,attribute,kind,weight\nr1,Church,affiliation,1\nr1,Oil,attitude,1\n",
        )
        .unwrap();
        let ds = parse_incidence_csv(&csv, None).unwrap();
        assert_eq!(ds.name, "italy");
        assert_eq!(ds.catalog.affiliations(), ["Church"]);

        let mut f = fs::File::create(default_catalog_path(&csv)).unwrap();
        writeln!(f, "[affiliations]\nUnion\nChurch\n[attitudes]\nOil").unwrap();
        let ds = parse_incidence_csv(&csv, None).unwrap();
        assert_eq!(ds.catalog.affiliations(), ["Union", "Church"]);

        let other = dir.path().join("other.catalog");
        fs::write(&other, "[affiliations]\nChurch\nOil\n[attitudes]\n").unwrap();
        assert!(matches!(
            parse_incidence_csv(&csv, Some(&other)),
            Err(Error::KindMismatch { .. })
        ));
    }

    fn arb_records() -> impl Strategy<Value = Vec<IncidenceRecord>> {
        let label = "[A-Za-z][A-Za-z ,\"-]{0,8}";
        prop::collection::vec((label, label, any::<bool>(), 1u64..20), 0..20).prop_map(|v| {
            v.into_iter()
                .map(|(a, t, k, w)| {
                    let kind = if k {
                        AttributeKind::Affiliation
                    } else {
                        AttributeKind::Attitude
                    };
                    IncidenceRecord::new(a, t, kind).with_weight(w)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn incidence_round_trip(records in arb_records()) {
            let text = write_incidence(&records).unwrap();
            let parsed = parse_incidence(&text, p()).unwrap();
            prop_assert_eq!(&parsed, &records);
            prop_assert_eq!(write_incidence(&parsed).unwrap(), text);
        }
    }
}
