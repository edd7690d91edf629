//! Dataset loading, missing-value imputation, and seeded train/test
//! splitting.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{LinguisticScale, ScaleRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

/// Per-column description. Categorical columns are label-encoded at load;
/// `categories` keeps the code-to-string mapping, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    pub categories: Vec<String>,
}

/// One cell: a numeric value (or categorical code) or a flagged gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Missing,
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Missing => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub values: Vec<Cell>,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<FeatureSpec>,
    pub class_scale: ScaleRef,
    pub records: Vec<Record>,
}

impl Dataset {
    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_missing(&self) -> bool {
        self.records
            .iter()
            .any(|r| r.values.iter().any(Cell::is_missing))
    }

    /// Observed (non-missing) values of one feature column.
    pub fn column_values(&self, col: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter_map(|r| r.values[col].value())
            .collect()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_scale.arity()];
        for r in &self.records {
            counts[r.class] += 1;
        }
        counts
    }

    fn with_records(&self, records: Vec<Record>) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.clone(),
            class_scale: self.class_scale.clone(),
            records,
        }
    }
}

/// How a delimiter-separated file maps onto a dataset.
#[derive(Debug, Clone)]
pub struct DatasetSchema {
    /// Header name of the class column.
    pub class_column: String,
    /// Class labels in grade order; inferred (sorted) when absent.
    pub classes: Option<Vec<String>>,
    /// Header names of categorical feature columns; all others are numeric.
    pub categorical: Vec<String>,
    pub delimiter: u8,
    /// Cell contents treated as missing.
    pub missing_markers: Vec<String>,
}

impl DatasetSchema {
    pub fn new(class_column: impl Into<String>) -> Self {
        DatasetSchema {
            class_column: class_column.into(),
            classes: None,
            categorical: Vec::new(),
            delimiter: b',',
            missing_markers: vec![String::new(), "?".into(), "NA".into()],
        }
    }

    fn is_missing(&self, cell: &str) -> bool {
        self.missing_markers.iter().any(|m| m == cell.trim())
    }
}

/// Parses a delimiter-separated file with a header row. Missing cells are
/// flagged, not dropped; malformed rows report their line number.
pub fn load_dataset(path: &Path, name: &str, schema: &DatasetSchema) -> Result<Dataset> {
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::io(&display, into_io(e)))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::io(&display, into_io(e)))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() {
        return Err(Error::EmptyDataset(name.to_string()));
    }
    let class_col = headers
        .iter()
        .position(|h| h == &schema.class_column)
        .ok_or_else(|| {
            Error::Config(format!(
                "class column `{}` not found in {display}",
                schema.class_column
            ))
        })?;

    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != class_col).collect();
    let kinds: Vec<FeatureKind> = feature_cols
        .iter()
        .map(|&c| {
            if schema.categorical.iter().any(|n| n == &headers[c]) {
                FeatureKind::Categorical
            } else {
                FeatureKind::Numeric
            }
        })
        .collect();

    // First pass: arity and numeric checks row by row; categorical cells
    // stay textual until the dictionaries cover the whole file.
    let mut raw_rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2; // header is line 1
        let record = record.map_err(|e| Error::MalformedRow {
            path: display.clone(),
            line,
            reason: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::MalformedRow {
                path: display.clone(),
                line,
                reason: format!("{} fields, expected {}", record.len(), headers.len()),
            });
        }
        for (j, &c) in feature_cols.iter().enumerate() {
            let cell = record.get(c).unwrap_or("").trim();
            if kinds[j] == FeatureKind::Numeric
                && !schema.is_missing(cell)
                && cell.parse::<f64>().is_err()
            {
                return Err(Error::MalformedRow {
                    path: display.clone(),
                    line,
                    reason: format!("column `{}`: non-numeric value `{cell}`", headers[c]),
                });
            }
        }
        raw_rows.push((line, record.iter().map(str::to_string).collect()));
    }
    if raw_rows.is_empty() {
        return Err(Error::EmptyDataset(name.to_string()));
    }

    // Class scale: declared order, or observed labels sorted.
    let class_labels: Vec<String> = match &schema.classes {
        Some(declared) => declared.clone(),
        None => {
            let mut seen: Vec<String> = Vec::new();
            for (_, row) in &raw_rows {
                let label = row[class_col].trim().to_string();
                if !seen.contains(&label) {
                    seen.push(label);
                }
            }
            seen.sort();
            seen
        }
    };
    if class_labels.len() < 2 {
        return Err(Error::Config(format!(
            "dataset `{name}` needs at least 2 distinct class labels, found {}",
            class_labels.len()
        )));
    }
    let class_scale = LinguisticScale::new(class_labels)?;

    // Categorical dictionaries, sorted for deterministic codes.
    let mut dictionaries: HashMap<usize, Vec<String>> = HashMap::new();
    for (j, &c) in feature_cols.iter().enumerate() {
        if kinds[j] == FeatureKind::Categorical {
            let mut cats: Vec<String> = Vec::new();
            for (_, row) in &raw_rows {
                let cell = row[c].trim();
                if !schema.is_missing(cell) && !cats.iter().any(|x| x == cell) {
                    cats.push(cell.to_string());
                }
            }
            cats.sort();
            dictionaries.insert(j, cats);
        }
    }

    let mut records = Vec::with_capacity(raw_rows.len());
    for (line, row) in &raw_rows {
        let class_label = row[class_col].trim();
        let class = class_scale
            .index_of(class_label)
            .ok_or_else(|| Error::MalformedRow {
                path: display.clone(),
                line: *line,
                reason: format!("unknown class label `{class_label}`"),
            })?;
        let mut values = Vec::with_capacity(feature_cols.len());
        for (j, &c) in feature_cols.iter().enumerate() {
            let cell = row[c].trim();
            if schema.is_missing(cell) {
                values.push(Cell::Missing);
                continue;
            }
            let v = match kinds[j] {
                FeatureKind::Numeric => cell.parse::<f64>().map_err(|_| Error::MalformedRow {
                    path: display.clone(),
                    line: *line,
                    reason: format!("column `{}`: non-numeric value `{cell}`", headers[c]),
                })?,
                FeatureKind::Categorical => {
                    let dict = &dictionaries[&j];
                    dict.iter()
                        .position(|x| x == cell)
                        .expect("dictionary covers file") as f64
                }
            };
            values.push(Cell::Num(v));
        }
        records.push(Record { values, class });
    }

    let features = feature_cols
        .iter()
        .enumerate()
        .map(|(j, &c)| FeatureSpec {
            name: headers[c].clone(),
            kind: kinds[j],
            categories: dictionaries.get(&j).cloned().unwrap_or_default(),
        })
        .collect();

    Ok(Dataset {
        name: name.to_string(),
        features,
        class_scale,
        records,
    })
}

fn into_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImputeStrategy {
    /// Numeric gaps take the column mean, categorical gaps the column mode.
    MeanMode,
    /// Remove every record with any missing cell.
    DropRecords,
}

/// Column fill statistics, fitted on one dataset (typically the training
/// split) and applicable to any dataset with the same columns.
#[derive(Debug, Clone)]
pub struct Imputer {
    strategy: ImputeStrategy,
    fill: Vec<Option<f64>>,
}

impl Imputer {
    pub fn fit(ds: &Dataset, strategy: ImputeStrategy) -> Result<Self> {
        let mut fill = vec![None; ds.n_features()];
        if strategy == ImputeStrategy::MeanMode {
            for (col, spec) in ds.features.iter().enumerate() {
                let observed = ds.column_values(col);
                let column_has_gap = ds.records.iter().any(|r| r.values[col].is_missing());
                if observed.is_empty() {
                    if column_has_gap {
                        return Err(Error::UnimputableColumn(spec.name.clone()));
                    }
                    continue;
                }
                let value = match spec.kind {
                    FeatureKind::Numeric => observed.iter().sum::<f64>() / observed.len() as f64,
                    FeatureKind::Categorical => {
                        let mut counts: HashMap<i64, usize> = HashMap::new();
                        for v in &observed {
                            *counts.entry(*v as i64).or_insert(0) += 1;
                        }
                        // Mode; ties resolve to the smallest code.
                        let mut best = (i64::MAX, 0usize);
                        for (code, n) in counts {
                            if n > best.1 || (n == best.1 && code < best.0) {
                                best = (code, n);
                            }
                        }
                        best.0 as f64
                    }
                };
                fill[col] = Some(value);
            }
        }
        Ok(Imputer { strategy, fill })
    }

    pub fn transform(&self, ds: &Dataset) -> Result<Dataset> {
        match self.strategy {
            ImputeStrategy::DropRecords => {
                let records = ds
                    .records
                    .iter()
                    .filter(|r| !r.values.iter().any(Cell::is_missing))
                    .cloned()
                    .collect();
                Ok(ds.with_records(records))
            }
            ImputeStrategy::MeanMode => {
                let mut records = ds.records.clone();
                for r in &mut records {
                    for (col, cell) in r.values.iter_mut().enumerate() {
                        if cell.is_missing() {
                            let value = self.fill[col].ok_or_else(|| {
                                Error::UnimputableColumn(ds.features[col].name.clone())
                            })?;
                            *cell = Cell::Num(value);
                        }
                    }
                }
                Ok(ds.with_records(records))
            }
        }
    }
}

/// Fits on `ds` and transforms it in one step.
pub fn impute(ds: &Dataset, strategy: ImputeStrategy) -> Result<Dataset> {
    Imputer::fit(ds, strategy)?.transform(ds)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64, stratified: bool) -> Result<Self> {
        if !(train_fraction.is_finite() && 0.0 < train_fraction && train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "train fraction must be in (0, 1), got {train_fraction}"
            )));
        }
        Ok(SplitSpec {
            train_fraction,
            seed,
            stratified,
        })
    }
}

/// Seeded shuffle-then-partition. The train split holds
/// `floor(n * fraction)` records; stratified mode keeps per-class
/// proportions within one record of ideal. The two splits are disjoint and
/// exhaustive.
pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    SplitSpec::new(spec.train_fraction, spec.seed, spec.stratified)?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset(ds.name.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let target_train = (ds.len() as f64 * spec.train_fraction).floor() as usize;

    let train_idx: Vec<usize>;
    let test_idx: Vec<usize>;
    if spec.stratified {
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.class_scale.arity()];
        for (i, r) in ds.records.iter().enumerate() {
            by_class[r.class].push(i);
        }
        for (c, members) in by_class.iter().enumerate() {
            if !members.is_empty() && members.len() < 2 {
                return Err(Error::TooFewPerClass(
                    ds.class_scale.label(c).to_string(),
                    members.len(),
                ));
            }
        }
        // Base allocation floors each class's ideal share; leftovers go to
        // the largest fractional remainders so every class ends within one
        // record of ideal.
        let ideals: Vec<f64> = by_class
            .iter()
            .map(|m| m.len() as f64 * spec.train_fraction)
            .collect();
        let mut take: Vec<usize> = ideals.iter().map(|&x| x.floor() as usize).collect();
        let mut leftover = target_train.saturating_sub(take.iter().sum::<usize>());
        let mut order: Vec<usize> = (0..by_class.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = ideals[a] - ideals[a].floor();
            let rb = ideals[b] - ideals[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for &c in &order {
            if leftover == 0 {
                break;
            }
            if take[c] < by_class[c].len() {
                take[c] += 1;
                leftover -= 1;
            }
        }
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (c, members) in by_class.iter().enumerate() {
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            train.extend_from_slice(&shuffled[..take[c]]);
            test.extend_from_slice(&shuffled[take[c]..]);
        }
        train_idx = train;
        test_idx = test;
    } else {
        let mut indices: Vec<usize> = (0..ds.len()).collect();
        indices.shuffle(&mut rng);
        train_idx = indices[..target_train].to_vec();
        test_idx = indices[target_train..].to_vec();
    }

    let train = ds.with_records(train_idx.iter().map(|&i| ds.records[i].clone()).collect());
    let test = ds.with_records(test_idx.iter().map(|&i| ds.records[i].clone()).collect());
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    /// The scale always carries at least two labels; records only populate
    /// the first `classes` of them.
    fn toy(n_per_class: usize, classes: usize) -> Dataset {
        let scale = LinguisticScale::new((0..classes.max(2)).map(|c| format!("c{c}"))).unwrap();
        let records = (0..classes)
            .flat_map(|c| {
                (0..n_per_class).map(move |i| Record {
                    values: vec![Cell::Num(c as f64 * 1000.0 + i as f64)],
                    class: c,
                })
            })
            .collect();
        Dataset {
            name: "toy".into(),
            features: vec![FeatureSpec {
                name: "x".into(),
                kind: FeatureKind::Numeric,
                categories: vec![],
            }],
            class_scale: scale,
            records,
        }
    }

    #[test]
    fn load_parses_header_numeric_and_classes() {
        let f = write_csv("a,b,label\n1.0,2.0,yes\n3.0,4.5,no\n0.5,?,yes\n");
        let ds = load_dataset(f.path(), "t", &DatasetSchema::new("label")).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.class_scale.labels(), &["no", "yes"]);
        assert!(ds.records[2].values[1].is_missing());
        assert_eq!(ds.records[0].class, 1);
    }

    #[test]
    fn load_rejects_empty_file() {
        let f = write_csv("a,b,label\n");
        assert!(matches!(
            load_dataset(f.path(), "t", &DatasetSchema::new("label")),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn load_reports_line_numbers_for_bad_cells() {
        let f = write_csv("a,label\n1.0,x\noops,x\n");
        let err = load_dataset(f.path(), "t", &DatasetSchema::new("label"));
        match err {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed row, got {other:?}"),
        }
    }

    #[test]
    fn load_rejects_unknown_class_label() {
        let f = write_csv("a,label\n1.0,weird\n");
        let mut schema = DatasetSchema::new("label");
        schema.classes = Some(vec!["yes".into(), "no".into()]);
        assert!(matches!(
            load_dataset(f.path(), "t", &schema),
            Err(Error::MalformedRow { .. })
        ));
    }

    #[test]
    fn load_encodes_categorical_columns() {
        let f = write_csv("color,label\nred,a\nblue,a\nred,b\n");
        let mut schema = DatasetSchema::new("label");
        schema.categorical = vec!["color".into()];
        let ds = load_dataset(f.path(), "t", &schema).unwrap();
        assert_eq!(ds.features[0].categories, vec!["blue", "red"]);
        assert_eq!(ds.records[0].values[0], Cell::Num(1.0)); // red
        assert_eq!(ds.records[1].values[0], Cell::Num(0.0)); // blue
    }

    #[test]
    fn load_handles_wine_shaped_tables() {
        // Same shape as the 6497-record, 11-input, 7-class quality table;
        // values generated since the original is not vendored.
        let mut content = String::from("f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,f10,quality\n");
        for i in 0..6497usize {
            let cells: Vec<String> = (0..11).map(|j| format!("{}", (i * 7 + j) % 100)).collect();
            content.push_str(&format!("{},q{}\n", cells.join(","), i % 7));
        }
        let f = write_csv(&content);
        let ds = load_dataset(f.path(), "wine", &DatasetSchema::new("quality")).unwrap();
        assert_eq!(ds.len(), 6497);
        assert_eq!(ds.n_features(), 11);
        assert_eq!(ds.class_scale.arity(), 7);
    }

    #[test]
    fn impute_is_identity_without_gaps() {
        let ds = toy(5, 2);
        let out = impute(&ds, ImputeStrategy::MeanMode).unwrap();
        assert_eq!(out, ds);
    }

    #[test]
    fn impute_fills_numeric_gap_with_column_mean() {
        let mut ds = toy(2, 1); // values 0, 1
        ds.records.push(Record {
            values: vec![Cell::Missing],
            class: 0,
        });
        ds.records.push(Record {
            values: vec![Cell::Num(14.0)],
            class: 0,
        });
        // Observed: 0, 1, 14 -> mean 5.0.
        let out = impute(&ds, ImputeStrategy::MeanMode).unwrap();
        assert_eq!(out.records[2].values[0], Cell::Num(5.0));
    }

    #[test]
    fn impute_mode_fills_categorical_gap() {
        let mut ds = toy(0, 1);
        ds.features[0].kind = FeatureKind::Categorical;
        ds.features[0].categories = vec!["a".into(), "b".into()];
        for code in [0.0, 1.0, 1.0] {
            ds.records.push(Record {
                values: vec![Cell::Num(code)],
                class: 0,
            });
        }
        ds.records.push(Record {
            values: vec![Cell::Missing],
            class: 0,
        });
        let out = impute(&ds, ImputeStrategy::MeanMode).unwrap();
        assert_eq!(out.records[3].values[0], Cell::Num(1.0));
    }

    #[test]
    fn drop_records_removes_rows_with_gaps() {
        let mut ds = toy(3, 1);
        ds.records[1].values[0] = Cell::Missing;
        let out = impute(&ds, ImputeStrategy::DropRecords).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn impute_errors_on_fully_missing_column() {
        let mut ds = toy(2, 1);
        for r in &mut ds.records {
            r.values[0] = Cell::Missing;
        }
        assert!(matches!(
            impute(&ds, ImputeStrategy::MeanMode),
            Err(Error::UnimputableColumn(_))
        ));
    }

    #[test]
    fn split_sizes_match_fraction_floor() {
        let ds = toy(50, 3); // 150 records, like the classic flower set
        let spec = SplitSpec::new(0.8, 1, true).unwrap();
        let (train, test) = split(&ds, &spec).unwrap();
        assert_eq!((train.len(), test.len()), (120, 30));

        // 858 records: floor(858 * 0.8) = 686.
        let ds = toy(429, 2);
        let (train, test) = split(&ds, &SplitSpec::new(0.8, 1, true).unwrap()).unwrap();
        assert_eq!((train.len(), test.len()), (686, 172));
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let ds = toy(40, 3);
        let spec = SplitSpec::new(0.7, 99, true).unwrap();
        let (tr1, te1) = split(&ds, &spec).unwrap();
        let (tr2, te2) = split(&ds, &spec).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
        let other = SplitSpec::new(0.7, 100, true).unwrap();
        let (tr3, _) = split(&ds, &other).unwrap();
        assert_ne!(tr1.records, tr3.records);
    }

    #[test]
    fn split_rejects_tiny_classes_under_stratification() {
        let mut ds = toy(5, 2);
        ds.records.truncate(6); // second class keeps one record
        assert!(matches!(
            split(&ds, &SplitSpec::new(0.5, 0, true).unwrap()),
            Err(Error::TooFewPerClass(_, 1))
        ));
    }

    #[test]
    fn split_rejects_bad_fraction() {
        assert!(SplitSpec::new(0.0, 0, false).is_err());
        assert!(SplitSpec::new(1.0, 0, false).is_err());
        assert!(SplitSpec::new(f64::NAN, 0, false).is_err());
    }

    proptest! {
        #[test]
        fn split_is_disjoint_exhaustive_and_stratified_within_one(
            per_class in 3usize..40,
            classes in 2usize..5,
            frac in 0.2f64..0.9,
            seed in 0u64..500,
        ) {
            let ds = toy(per_class, classes);
            let spec = SplitSpec { train_fraction: frac, seed, stratified: true };
            let (train, test) = split(&ds, &spec).unwrap();
            prop_assert_eq!(train.len() + test.len(), ds.len());
            prop_assert_eq!(train.len(), (ds.len() as f64 * frac).floor() as usize);

            // Values are unique in `toy`, so membership checks are exact.
            let train_vals: std::collections::HashSet<i64> = train
                .records.iter().map(|r| r.values[0].value().unwrap() as i64).collect();
            let test_vals: std::collections::HashSet<i64> = test
                .records.iter().map(|r| r.values[0].value().unwrap() as i64).collect();
            prop_assert!(train_vals.is_disjoint(&test_vals));

            for (c, &n_train) in train.class_counts().iter().enumerate() {
                let ideal = per_class as f64 * frac;
                prop_assert!(
                    (n_train as f64 - ideal).abs() <= 1.0,
                    "class {} got {} vs ideal {}", c, n_train, ideal
                );
            }
        }
    }
}
