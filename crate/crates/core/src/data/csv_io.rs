use std::path::Path;

use super::Dataset;
use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};

/// Reads a headed numeric CSV. `label_column`, when given, is parsed as an
/// integer label and excluded from the features. Row indices in errors are
/// 0-based data rows (header excluded).
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| GeomError::Config(format!("label column '{name}' not in header")))?,
        ),
        None => None,
    };
    let feature_names: Vec<String> =
        headers.iter().enumerate().filter(|(i, _)| Some(*i) != label_idx).map(|(_, h)| h.clone()).collect();
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut n = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(GeomError::Data { row, col: record.len(), msg: format!("expected {} fields", headers.len()) });
        }
        for (col, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if Some(col) == label_idx {
                let label = cell
                    .parse::<i64>()
                    .ok()
                    .or_else(|| cell.parse::<f64>().ok().filter(|v| v.fract() == 0.0).map(|v| v as i64))
                    .ok_or_else(|| GeomError::Data { row, col, msg: format!("label '{cell}' is not an integer") })?;
                labels.push(label);
            } else {
                let v: f64 =
                    cell.parse().map_err(|_| GeomError::Data { row, col, msg: format!("'{cell}' is not numeric") })?;
                data.push(v);
            }
        }
        n += 1;
    }
    let rows = Tensor::from_vec(n, feature_names.len(), data)?;
    Dataset::new(rows, label_idx.map(|_| labels), Some(feature_names), format!("csv {}", path.display()))
}

/// Writes features (named `f0..` when the dataset has no names) followed by
/// a `label` column when labels are present. Floats use shortest round-trip form.
pub fn save_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = match d.feature_names() {
        Some(names) => names.to_vec(),
        None => (0..d.dim()).map(|i| format!("f{i}")).collect(),
    };
    if d.labels().is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for (i, row) in d.rows().iter_rows().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        if let Some(l) = d.labels() {
            rec.push(l[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_values_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        let rows = Tensor::from_vec(2, 2, vec![0.1 + 0.2, -1e-300, 1.0 / 3.0, 123456789.123456789]).unwrap();
        let d = Dataset::new(rows, Some(vec![4, -1]), Some(vec!["a".into(), "b".into()]), "t").unwrap();
        save_csv(&d, &p).unwrap();
        let back = load_csv(&p, Some("label")).unwrap();
        assert_eq!(back.rows(), d.rows());
        assert_eq!(back.labels(), d.labels());
        assert_eq!(back.feature_names(), d.feature_names());
    }

    #[test]
    fn non_numeric_cell_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "x,y\n1,2\n3,abc\n").unwrap();
        match load_csv(&p, None) {
            Err(GeomError::Data { row, col, .. }) => assert_eq!((row, col), (1, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn label_column_extracted_from_middle() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "x,cls,y\n1,0,2\n3,1,4\n").unwrap();
        let d = load_csv(&p, Some("cls")).unwrap();
        assert_eq!(d.rows().data(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.labels().unwrap(), &[0, 1]);
        assert_eq!(d.feature_names().unwrap(), &["x".to_string(), "y".to_string()]);
        assert!(load_csv(&p, Some("nope")).is_err());
    }
}
