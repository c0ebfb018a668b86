//! Attributes, objects, conditions and selections.
//!
//! A [`Dataset`] is stored column-wise. Rows are addressed by their 0-based
//! position, which is also how the outlier is identified everywhere else.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Numeric,
    Categorical,
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeKind::Numeric => f.write_str("numeric"),
            AttributeKind::Categorical => f.write_str("categorical"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub index: usize,
    pub kind: AttributeKind,
}

/// A single cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Numeric(f64),
    Categorical(String),
}

impl Value {
    pub fn kind(&self) -> AttributeKind {
        match self {
            Value::Numeric(_) => AttributeKind::Numeric,
            Value::Categorical(_) => AttributeKind::Categorical,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Numeric(x) => write!(f, "{x}"),
            Value::Categorical(s) => f.write_str(s),
        }
    }
}

/// One row, materialized. Cells are aligned to the dataset schema.
#[derive(Debug, Clone, PartialEq)]
pub struct DataObject {
    pub values: Vec<Value>,
}

/// Column storage. Categorical columns are dictionary encoded; `levels` keeps
/// first-appearance order so encoding is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical { levels: Vec<String>, codes: Vec<u32> },
}

impl Column {
    pub fn categorical<S: AsRef<str>>(cells: &[S]) -> Column {
        let mut levels: Vec<String> = Vec::new();
        let mut lookup: HashMap<String, u32> = HashMap::new();
        let codes = cells
            .iter()
            .map(|c| {
                let c = c.as_ref();
                *lookup.entry(c.to_string()).or_insert_with(|| {
                    levels.push(c.to_string());
                    (levels.len() - 1) as u32
                })
            })
            .collect();
        Column::Categorical { levels, codes }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> AttributeKind {
        match self {
            Column::Numeric(_) => AttributeKind::Numeric,
            Column::Categorical { .. } => AttributeKind::Categorical,
        }
    }

    pub fn value(&self, row: usize) -> Value {
        match self {
            Column::Numeric(v) => Value::Numeric(v[row]),
            Column::Categorical { levels, codes } => {
                Value::Categorical(levels[codes[row] as usize].clone())
            }
        }
    }
}

/// A rectangular multiset of objects over typed attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<Attribute>,
    columns: Vec<Column>,
    rows: usize,
}

impl Dataset {
    /// Builds a dataset from named columns, checking that names are unique,
    /// columns have equal length, there is at least one row and numeric cells
    /// are finite.
    pub fn from_columns(columns: Vec<(String, Column)>) -> Result<Dataset> {
        if columns.is_empty() {
            return Err(Error::Schema("dataset has no attributes".into()));
        }
        let rows = columns[0].1.len();
        if rows == 0 {
            return Err(Error::EmptySample);
        }
        let mut seen = HashSet::new();
        let mut schema = Vec::with_capacity(columns.len());
        let mut cols = Vec::with_capacity(columns.len());
        for (index, (name, col)) in columns.into_iter().enumerate() {
            if !seen.insert(name.clone()) {
                return Err(Error::Schema(format!("duplicate attribute name `{name}`")));
            }
            if col.len() != rows {
                return Err(Error::Schema(format!(
                    "column `{name}` has {} cells, expected {rows}",
                    col.len()
                )));
            }
            if let Column::Numeric(v) = &col {
                if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::Schema(format!(
                        "column `{name}` row {pos} is not a finite number"
                    )));
                }
            }
            schema.push(Attribute { name, index, kind: col.kind() });
            cols.push(col);
        }
        Ok(Dataset { schema, columns: cols, rows })
    }

    pub fn schema(&self) -> &[Attribute] {
        &self.schema
    }

    pub fn attribute(&self, index: usize) -> Option<&Attribute> {
        self.schema.get(index)
    }

    pub fn attribute_by_name(&self, name: &str) -> Option<&Attribute> {
        self.schema.iter().find(|a| a.name == name)
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn numeric_column(&self, index: usize) -> Option<&[f64]> {
        match self.columns.get(index)? {
            Column::Numeric(v) => Some(v),
            Column::Categorical { .. } => None,
        }
    }

    /// Number of objects, `n`.
    pub fn len(&self) -> usize {
        self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    /// Number of attributes, `m`.
    pub fn width(&self) -> usize {
        self.schema.len()
    }

    pub fn object(&self, row: usize) -> Option<DataObject> {
        (row < self.rows).then(|| DataObject {
            values: self.columns.iter().map(|c| c.value(row)).collect(),
        })
    }

    /// Checks that every condition refers to an existing attribute of the
    /// matching kind.
    pub fn check_explanation(&self, explanation: &Explanation) -> Result<()> {
        for c in explanation.conditions() {
            let attr = self.attribute(c.attribute).ok_or_else(|| {
                Error::Schema(format!("condition on unknown attribute #{}", c.attribute))
            })?;
            if attr.kind != c.kind() {
                return Err(Error::Schema(format!(
                    "{} condition on {} attribute `{}`",
                    c.kind(),
                    attr.kind,
                    attr.name
                )));
            }
        }
        Ok(())
    }

    /// Rows satisfying a single condition, in increasing order.
    pub fn matching_rows(&self, condition: &Condition) -> Result<Vec<usize>> {
        match (&self.columns.get(condition.attribute), &condition.body) {
            (Some(Column::Numeric(v)), Bound::Interval { lo, hi }) => Ok(v
                .iter()
                .enumerate()
                .filter(|(_, x)| *lo <= **x && **x <= *hi)
                .map(|(i, _)| i)
                .collect()),
            (Some(Column::Categorical { levels, codes }), Bound::Equals(value)) => {
                match levels.iter().position(|l| l == value) {
                    Some(code) => Ok(codes
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c as usize == code)
                        .map(|(i, _)| i)
                        .collect()),
                    None => Ok(Vec::new()),
                }
            }
            (None, _) => Err(Error::Schema(format!(
                "condition on unknown attribute #{}",
                condition.attribute
            ))),
            _ => Err(Error::Schema(format!(
                "condition kind does not match attribute #{}",
                condition.attribute
            ))),
        }
    }

    pub fn row_satisfies(&self, row: usize, condition: &Condition) -> bool {
        match (&self.columns[condition.attribute], &condition.body) {
            (Column::Numeric(v), Bound::Interval { lo, hi }) => *lo <= v[row] && v[row] <= *hi,
            (Column::Categorical { levels, codes }, Bound::Equals(value)) => {
                levels[codes[row] as usize] == *value
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    /// Closed interval `[lo, hi]` on a numeric attribute.
    Interval { lo: f64, hi: f64 },
    /// Equality on a categorical attribute.
    Equals(String),
}

/// A predicate on one attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub attribute: usize,
    pub body: Bound,
}

impl Condition {
    pub fn interval(attribute: usize, lo: f64, hi: f64) -> Result<Condition> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Schema(format!("non-finite interval [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(Error::Schema(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Condition { attribute, body: Bound::Interval { lo, hi } })
    }

    pub fn equals(attribute: usize, value: impl Into<String>) -> Condition {
        Condition { attribute, body: Bound::Equals(value.into()) }
    }

    pub fn kind(&self) -> AttributeKind {
        match self.body {
            Bound::Interval { .. } => AttributeKind::Numeric,
            Bound::Equals(_) => AttributeKind::Categorical,
        }
    }

    /// Renders the condition with the attribute name, e.g. `a2 ∈ [0.13, 0.38]`.
    pub fn describe(&self, db: &Dataset) -> String {
        let name = db
            .attribute(self.attribute)
            .map(|a| a.name.as_str())
            .unwrap_or("?");
        match &self.body {
            Bound::Interval { lo, hi } => format!("{name} ∈ [{lo}, {hi}]"),
            Bound::Equals(v) => format!("{name} = {v}"),
        }
    }
}

/// A set of conditions, at most one per attribute, ordered by attribute.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Explanation {
    conditions: Vec<Condition>,
}

impl Explanation {
    pub fn empty() -> Explanation {
        Explanation::default()
    }

    pub fn new(mut conditions: Vec<Condition>) -> Result<Explanation> {
        conditions.sort_by_key(|c| c.attribute);
        if let Some(w) = conditions.windows(2).find(|w| w[0].attribute == w[1].attribute) {
            return Err(Error::Schema(format!(
                "more than one condition on attribute #{}",
                w[0].attribute
            )));
        }
        Ok(Explanation { conditions })
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn attributes(&self) -> impl Iterator<Item = usize> + '_ {
        self.conditions.iter().map(|c| c.attribute)
    }

    pub fn constrains(&self, attribute: usize) -> bool {
        self.conditions.iter().any(|c| c.attribute == attribute)
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn is_subset_of(&self, other: &Explanation) -> bool {
        self.conditions.iter().all(|c| other.conditions.contains(c))
    }

    pub fn describe(&self, db: &Dataset) -> String {
        if self.is_empty() {
            return "∅".to_string();
        }
        let parts: Vec<String> = self.conditions.iter().map(|c| c.describe(db)).collect();
        format!("{{ {} }}", parts.join(", "))
    }
}

/// Whether `object` satisfies every condition of `explanation`.
pub fn satisfies(object: &DataObject, explanation: &Explanation) -> Result<bool> {
    for c in explanation.conditions() {
        let cell = object.values.get(c.attribute).ok_or_else(|| {
            Error::Schema(format!("condition on unknown attribute #{}", c.attribute))
        })?;
        let ok = match (cell, &c.body) {
            (Value::Numeric(x), Bound::Interval { lo, hi }) => *lo <= *x && *x <= *hi,
            (Value::Categorical(s), Bound::Equals(v)) => s == v,
            (cell, _) => {
                return Err(Error::Schema(format!(
                    "{} condition applied to {} value on attribute #{}",
                    c.kind(),
                    cell.kind(),
                    c.attribute
                )))
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The objects of a dataset satisfying an explanation, as sorted row indices
/// into the base dataset.
#[derive(Debug, Clone)]
pub struct SelectionView<'a> {
    base: &'a Dataset,
    members: Vec<usize>,
}

impl<'a> SelectionView<'a> {
    pub fn all(base: &'a Dataset) -> SelectionView<'a> {
        SelectionView { base, members: (0..base.len()).collect() }
    }

    /// Wraps an explicit member list. Rows must be strictly increasing and in
    /// range.
    pub fn from_rows(base: &'a Dataset, members: Vec<usize>) -> Result<SelectionView<'a>> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("selection rows must be strictly increasing".into()));
        }
        if members.last().is_some_and(|&r| r >= base.len()) {
            return Err(Error::Precondition("selection row out of range".into()));
        }
        Ok(SelectionView { base, members })
    }

    pub fn base(&self) -> &'a Dataset {
        self.base
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.members.binary_search(&row).is_ok()
    }

    /// Fraction of the *base* dataset covered by this view.
    pub fn support(&self) -> f64 {
        self.members.len() as f64 / self.base.len() as f64
    }
}

pub fn select<'a>(db: &'a Dataset, explanation: &Explanation) -> Result<SelectionView<'a>> {
    db.check_explanation(explanation)?;
    let members = (0..db.len())
        .filter(|&row| explanation.conditions().iter().all(|c| db.row_satisfies(row, c)))
        .collect();
    Ok(SelectionView { base: db, members })
}

/// `|DB_C| / |DB|`.
pub fn support(db: &Dataset, explanation: &Explanation) -> Result<f64> {
    Ok(select(db, explanation)?.support())
}

/// Per-column kind overrides, keyed by attribute name.
pub type SchemaHint = HashMap<String, AttributeKind>;

/// Parses a sidecar schema: one `name:numeric|categorical` entry per line.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_schema(text: &str) -> Result<SchemaHint> {
    let mut hint = SchemaHint::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, kind) = line.rsplit_once(':').ok_or_else(|| Error::Parse {
            line: i as u64 + 1,
            msg: format!("expected `name:kind`, got `{line}`"),
        })?;
        let kind = match kind.trim() {
            "numeric" => AttributeKind::Numeric,
            "categorical" => AttributeKind::Categorical,
            other => {
                return Err(Error::Parse {
                    line: i as u64 + 1,
                    msg: format!("unknown attribute kind `{other}`"),
                })
            }
        };
        if hint.insert(name.trim().to_string(), kind).is_some() {
            return Err(Error::Parse {
                line: i as u64 + 1,
                msg: format!("attribute `{}` listed twice", name.trim()),
            });
        }
    }
    Ok(hint)
}

/// Parses comma-separated text with a header row.
///
/// Column kinds are inferred (every cell parses as a number → numeric) unless
/// `hint` names the column. Lines starting with `#` are comments.
pub fn parse_csv(text: &str, hint: Option<&SchemaHint>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header_err = |e: csv::Error| Error::Parse { line: 1, msg: e.to_string() };
    let header: Vec<String> = reader
        .headers()
        .map_err(header_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::Parse { line: 1, msg: "missing header row".into() });
    }
    let mut seen = HashSet::new();
    for name in &header {
        if name.is_empty() {
            return Err(Error::Parse { line: 1, msg: "empty attribute name".into() });
        }
        if !seen.insert(name) {
            return Err(Error::Parse { line: 1, msg: format!("duplicate attribute `{name}`") });
        }
    }
    if let Some(hint) = hint {
        if let Some(unknown) = hint.keys().find(|k| !header.contains(k)) {
            return Err(Error::Schema(format!("schema names unknown attribute `{unknown}`")));
        }
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    let mut lines: Vec<u64> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        for (col, cell) in record.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::MissingValue { line, column: header[col].clone() });
            }
            cells[col].push(cell.to_string());
        }
        lines.push(line);
    }
    if lines.is_empty() {
        return Err(Error::EmptySample);
    }

    let mut columns = Vec::with_capacity(header.len());
    for (name, col) in header.into_iter().zip(cells) {
        let parsed: Option<Vec<f64>> = col.iter().map(|c| c.parse::<f64>().ok()).collect();
        let kind = hint.and_then(|h| h.get(&name).copied()).unwrap_or(if parsed.is_some() {
            AttributeKind::Numeric
        } else {
            AttributeKind::Categorical
        });
        let column = match kind {
            AttributeKind::Categorical => Column::categorical(&col),
            AttributeKind::Numeric => {
                let mut values = Vec::with_capacity(col.len());
                for (i, cell) in col.iter().enumerate() {
                    match cell.parse::<f64>() {
                        Ok(x) if x.is_finite() => values.push(x),
                        Ok(_) => {
                            return Err(Error::Parse {
                                line: lines[i],
                                msg: format!("non-finite value `{cell}` in `{name}`"),
                            })
                        }
                        Err(_) => {
                            return Err(Error::Parse {
                                line: lines[i],
                                msg: format!("`{cell}` is not a number (column `{name}`)"),
                            })
                        }
                    }
                }
                Column::Numeric(values)
            }
        };
        columns.push((name, column));
    }
    Dataset::from_columns(columns)
}

/// Reads a CSV file and, optionally, a sidecar schema file.
pub fn read_csv_file(path: &Path, schema: Option<&Path>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    let hint = match schema {
        Some(p) => Some(parse_schema(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    parse_csv(&text, hint.as_ref())
}
