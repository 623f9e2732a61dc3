//! ARFF subset reader and writer.
//!
//! Supported header lines are `@relation`, `@attribute <name> numeric`
//! (also `real`/`integer`), `@attribute <name> {v1,...}` and
//! `@attribute <name> hierarchical p1,p2,...`. Data rows are dense and
//! comma-separated, `?` marks a missing value, and an HMLC label field lists
//! class paths separated by `@`.

use std::sync::Arc;

use super::{
    build_hierarchy, AttributeKind, AttributeSchema, ClassHierarchy, Dataset, Example, HierarchyShape, Role, Schema,
    Target, Task, Value, DEFAULT_OMEGA0,
};
use crate::error::{PctError, Result};

/// Which attributes hold the targets.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    Names(Vec<String>),
    /// The last `n` attributes of the header.
    Last(usize),
}

impl std::str::FromStr for TargetSpec {
    type Err = PctError;

    /// `last:3` or a comma-separated list of attribute names.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(n) = s.strip_prefix("last:") {
            let n = n
                .trim()
                .parse()
                .map_err(|_| PctError::config(format!("bad target count in `{s}`")))?;
            return Ok(TargetSpec::Last(n));
        }
        let names: Vec<String> = s.split(',').map(|n| n.trim().to_string()).filter(|n| !n.is_empty()).collect();
        if names.is_empty() {
            return Err(PctError::config("empty target specification"));
        }
        Ok(TargetSpec::Names(names))
    }
}

#[derive(Clone, Debug)]
pub struct ParseConfig {
    pub task: Task,
    pub targets: TargetSpec,
    pub omega0: f64,
    pub shape: HierarchyShape,
}

impl ParseConfig {
    pub fn new(task: Task, targets: TargetSpec) -> Self {
        ParseConfig {
            task,
            targets,
            omega0: DEFAULT_OMEGA0,
            shape: HierarchyShape::Tree,
        }
    }
}

enum RawKind {
    Numeric,
    Nominal(Vec<String>),
    Hierarchical(Vec<String>),
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    if s.len() >= 2 && ((s.starts_with('\'') && s.ends_with('\'')) || (s.starts_with('"') && s.ends_with('"'))) {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Splits on commas that are not inside quotes.
fn split_fields(line: &str) -> Vec<&str> {
    let mut fields = Vec::new();
    let mut start = 0;
    let mut quote: Option<char> = None;
    for (i, ch) in line.char_indices() {
        match (quote, ch) {
            (None, '\'' | '"') => quote = Some(ch),
            (Some(q), c) if c == q => quote = None,
            (None, ',') => {
                fields.push(line[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    fields.push(line[start..].trim());
    fields
}

/// Splits `@attribute <name> <rest>` where the name may be quoted.
fn split_name(rest: &str) -> Option<(&str, &str)> {
    let rest = rest.trim_start();
    let first = rest.chars().next()?;
    if first == '\'' || first == '"' {
        let end = rest[1..].find(first)? + 1;
        Some((&rest[1..end], rest[end + 1..].trim()))
    } else {
        let end = rest.find(char::is_whitespace)?;
        Some((&rest[..end], rest[end..].trim()))
    }
}

fn parse_attribute(line_no: usize, rest: &str) -> Result<(String, RawKind)> {
    let (name, ty) = split_name(rest).ok_or_else(|| PctError::parse(line_no, "malformed @attribute line"))?;
    let lower = ty.to_ascii_lowercase();
    let kind = if matches!(lower.as_str(), "numeric" | "real" | "integer") {
        RawKind::Numeric
    } else if ty.starts_with('{') {
        let inner = ty
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| PctError::parse(line_no, "unterminated nominal value list"))?;
        let values: Vec<String> = split_fields(inner).into_iter().map(|v| unquote(v).to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(PctError::parse(line_no, "empty nominal value"));
        }
        RawKind::Nominal(values)
    } else if lower.starts_with("hierarchical") {
        let paths: Vec<String> = ty["hierarchical".len()..]
            .split(',')
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect();
        if paths.is_empty() {
            return Err(PctError::parse(line_no, "hierarchical attribute without class paths"));
        }
        RawKind::Hierarchical(paths)
    } else {
        return Err(PctError::parse(line_no, format!("unsupported attribute type `{ty}`")));
    };
    Ok((name.to_string(), kind))
}

/// Index of the positive value of a binary MLC target.
fn positive_index(attr: &AttributeSchema) -> usize {
    match &attr.kind {
        AttributeKind::Nominal(values) if values[0] == "1" && values[1] == "0" => 0,
        _ => 1,
    }
}

/// Parses a dataset from ARFF text.
pub fn parse_dataset(text: &str, config: &ParseConfig) -> Result<Dataset> {
    let mut relation = String::new();
    let mut raw: Vec<(String, RawKind)> = Vec::new();
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut in_data = false;

    for (line_no, line) in lines.by_ref() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = unquote(&line["@relation".len()..]).to_string();
        } else if lower.starts_with("@attribute") {
            raw.push(parse_attribute(line_no, &line["@attribute".len()..])?);
        } else if lower.starts_with("@data") {
            in_data = true;
            break;
        } else {
            return Err(PctError::parse(line_no, format!("unexpected header line `{line}`")));
        }
    }
    if !in_data {
        return Err(PctError::parse(0, "missing @data section"));
    }

    let n_attr = raw.len();
    let is_target: Vec<bool> = match &config.targets {
        TargetSpec::Last(t) => {
            if *t == 0 || *t >= n_attr {
                return Err(PctError::config(format!("cannot use the last {t} of {n_attr} attributes as targets")));
            }
            (0..n_attr).map(|i| i >= n_attr - t).collect()
        }
        TargetSpec::Names(names) => {
            let mut flags = vec![false; n_attr];
            for name in names {
                let pos = raw
                    .iter()
                    .position(|(n, _)| n == name)
                    .ok_or_else(|| PctError::config(format!("target attribute `{name}` not found")))?;
                flags[pos] = true;
            }
            flags
        }
    };

    let mut hierarchy: Option<Arc<ClassHierarchy>> = None;
    let mut attributes = Vec::with_capacity(n_attr);
    for (i, (name, kind)) in raw.into_iter().enumerate() {
        let role = if is_target[i] { Role::Target } else { Role::Descriptive };
        let kind = match kind {
            RawKind::Numeric => AttributeKind::Numeric,
            RawKind::Nominal(values) => AttributeKind::Nominal(values),
            RawKind::Hierarchical(paths) => {
                if role == Role::Target && config.task == Task::Hmlc {
                    hierarchy = Some(Arc::new(build_hierarchy(&paths, config.omega0, config.shape)?));
                }
                AttributeKind::Hierarchical(paths)
            }
        };
        attributes.push(AttributeSchema { name, kind, role });
    }
    let schema = Arc::new(Schema::new(relation, config.task, attributes)?);

    let mut examples = Vec::new();
    for (line_no, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if line.starts_with('{') {
            return Err(PctError::parse(line_no, "sparse rows are not supported"));
        }
        let fields = split_fields(line);
        if fields.len() != n_attr {
            return Err(PctError::parse(
                line_no,
                format!("expected {n_attr} fields, found {}", fields.len()),
            ));
        }
        let id = examples.len();
        examples.push(parse_row(line_no, id, &fields, &schema, hierarchy.as_deref())?);
    }
    Dataset::new(schema, hierarchy, examples)
}

fn parse_row(
    line_no: usize,
    id: usize,
    fields: &[&str],
    schema: &Schema,
    hierarchy: Option<&ClassHierarchy>,
) -> Result<Example> {
    let mut values = Vec::with_capacity(schema.n_descriptive());
    for &pos in schema.descriptive_positions() {
        let attr = &schema.attributes[pos];
        let field = unquote(fields[pos]);
        let value = if field == "?" {
            Value::Missing
        } else {
            match &attr.kind {
                AttributeKind::Numeric => Value::Numeric(field.parse::<f64>().map_err(|_| {
                    PctError::parse(line_no, format!("`{field}` is not numeric (attribute `{}`)", attr.name))
                })?),
                AttributeKind::Nominal(list) => Value::Nominal(list.iter().position(|v| v == field).ok_or_else(|| {
                    PctError::parse(line_no, format!("`{field}` is not a value of attribute `{}`", attr.name))
                })?),
                AttributeKind::Hierarchical(_) => unreachable!("schema rejects descriptive hierarchies"),
            }
        };
        values.push(value);
    }

    let target_fields: Vec<&str> = schema.target_positions().iter().map(|&p| unquote(fields[p])).collect();
    let n_missing = target_fields.iter().filter(|f| **f == "?").count();
    let target = if n_missing == target_fields.len() {
        Target::Unlabeled
    } else if n_missing > 0 {
        return Err(PctError::parse(line_no, "partially missing targets are not supported"));
    } else {
        match (schema.task, hierarchy) {
            (Task::Hmlc, Some(h)) => {
                let field = target_fields[0];
                let paths: Vec<&str> = field.split('@').map(str::trim).filter(|p| !p.is_empty()).collect();
                let members = paths
                    .iter()
                    .map(|p| h.class_index(p))
                    .collect::<Result<Vec<_>>>()?;
                let mut direct = vec![false; h.len()];
                for &m in &members {
                    direct[m] = true;
                }
                let closed = h.close(&members);
                if closed != direct {
                    log::warn!("line {line_no}: label set `{field}` is not closed under ancestors; closing it");
                }
                Target::Labeled(closed)
            }
            _ => {
                let mut bits = Vec::with_capacity(target_fields.len());
                for (&pos, field) in schema.target_positions().iter().zip(&target_fields) {
                    let attr = &schema.attributes[pos];
                    let bit = match &attr.kind {
                        AttributeKind::Nominal(list) => {
                            let idx = list.iter().position(|v| v == field).ok_or_else(|| {
                                PctError::parse(line_no, format!("`{field}` is not a value of target `{}`", attr.name))
                            })?;
                            idx == positive_index(attr)
                        }
                        _ => match field.parse::<f64>() {
                            Ok(1.0) => true,
                            Ok(0.0) => false,
                            _ => {
                                return Err(PctError::parse(
                                    line_no,
                                    format!("target `{}` must be 0 or 1, found `{field}`", attr.name),
                                ))
                            }
                        },
                    };
                    bits.push(bit);
                }
                Target::Labeled(bits)
            }
        }
    };
    Ok(Example { id, values, target })
}

fn quote_if_needed(s: &str) -> String {
    if s.is_empty() || s.chars().any(|c| c.is_whitespace() || matches!(c, ',' | '{' | '}' | '%' | '\'' | '"')) {
        if s.contains('\'') {
            format!("\"{s}\"")
        } else {
            format!("'{s}'")
        }
    } else {
        s.to_string()
    }
}

/// Serializes a dataset as ARFF text that [`parse_dataset`] reads back unchanged.
pub fn write_arff(dataset: &Dataset) -> String {
    let schema = &dataset.schema;
    let mut out = String::new();
    out.push_str(&format!("@relation {}\n\n", quote_if_needed(&schema.relation)));
    for attr in &schema.attributes {
        let ty = match &attr.kind {
            AttributeKind::Numeric => "numeric".to_string(),
            AttributeKind::Nominal(values) => format!(
                "{{{}}}",
                values.iter().map(|v| quote_if_needed(v)).collect::<Vec<_>>().join(",")
            ),
            AttributeKind::Hierarchical(paths) => format!("hierarchical {}", paths.join(",")),
        };
        out.push_str(&format!("@attribute {} {}\n", quote_if_needed(&attr.name), ty));
    }
    out.push_str("\n@data\n");

    let desc_slot: Vec<Option<usize>> = {
        let mut slots = vec![None; schema.attributes.len()];
        for (i, &p) in schema.descriptive_positions().iter().enumerate() {
            slots[p] = Some(i);
        }
        slots
    };
    let target_slot: Vec<Option<usize>> = {
        let mut slots = vec![None; schema.attributes.len()];
        for (i, &p) in schema.target_positions().iter().enumerate() {
            slots[p] = Some(i);
        }
        slots
    };

    for e in &dataset.examples {
        let mut fields = Vec::with_capacity(schema.attributes.len());
        for (pos, attr) in schema.attributes.iter().enumerate() {
            let field = if let Some(d) = desc_slot[pos] {
                match (e.values[d], &attr.kind) {
                    (Value::Missing, _) => "?".to_string(),
                    (Value::Numeric(x), _) => format!("{x}"),
                    (Value::Nominal(k), AttributeKind::Nominal(list)) => quote_if_needed(&list[k]),
                    (Value::Nominal(k), _) => k.to_string(),
                }
            } else {
                let t = target_slot[pos].expect("attribute is either descriptive or target");
                match (&e.target, &dataset.hierarchy) {
                    (Target::Unlabeled, _) => "?".to_string(),
                    (Target::Labeled(bits), Some(h)) => {
                        let members: Vec<&str> = bits
                            .iter()
                            .enumerate()
                            .filter(|(_, &b)| b)
                            .map(|(c, _)| h.names()[c].as_str())
                            .collect();
                        if members.is_empty() {
                            "''".to_string()
                        } else {
                            members.join("@")
                        }
                    }
                    (Target::Labeled(bits), None) => match &attr.kind {
                        AttributeKind::Nominal(list) => {
                            let pos_idx = positive_index(attr);
                            let idx = if bits[t] { pos_idx } else { 1 - pos_idx };
                            quote_if_needed(&list[idx])
                        }
                        _ => if bits[t] { "1" } else { "0" }.to_string(),
                    },
                }
            };
            fields.push(field);
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
