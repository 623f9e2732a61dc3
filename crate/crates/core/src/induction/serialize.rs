//! Deterministic line-based text format for trees.
//!
//! ```text
//! pct-model 1
//! task mlc
//! w 5.00000000000e-1
//! pruned false
//! size 3
//! schema {...}
//! hierarchy null
//! node internal attr=0 gt=1.50000000000e0 fallback=no nl=4 nu=2 proto=5.00000000000e-1
//! node leaf nl=2 nu=1 proto=1.00000000000e0
//! node leaf nl=2 nu=1 proto=0.00000000000e0
//! ```
//!
//! Nodes are listed in pre-order, YES child before NO child. Reals use 12
//! significant digits.

use std::fmt::Write as _;
use std::sync::Arc;

use super::tree::{Branch, InternalNode, NodeSummary, PctModel, SplitTest, TestKind, TreeNode};
use crate::dataset::{ClassHierarchy, LabelVector, Schema};
use crate::error::{PctError, Result};

const MAGIC: &str = "pct-model 1";

pub(crate) fn real(x: f64) -> String {
    format!("{x:.11e}")
}

fn invalid(line: usize, message: impl Into<String>) -> PctError {
    PctError::InvalidModel {
        line,
        message: message.into(),
    }
}

impl PctModel {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        writeln!(out, "task {}", self.task()).unwrap();
        writeln!(out, "w {}", real(self.w)).unwrap();
        writeln!(out, "pruned {}", self.pruned).unwrap();
        writeln!(out, "size {}", self.size()).unwrap();
        writeln!(out, "schema {}", serde_json::to_string(&*self.schema).expect("schema serializes")).unwrap();
        let hierarchy = serde_json::to_string(&self.hierarchy.as_deref()).expect("hierarchy serializes");
        writeln!(out, "hierarchy {hierarchy}").unwrap();
        write_nodes(&self.root, &mut out);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        lines.expect_exact(MAGIC)?;
        let task = lines.field("task")?;
        let (ln, w) = lines.field("w")?;
        let w: f64 = parse_num(ln, &w)?;
        let (ln, pruned) = lines.field("pruned")?;
        let pruned = match pruned.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(invalid(ln, format!("bad flag `{other}`"))),
        };
        let (size_line, size) = lines.field("size")?;
        let size: usize = parse_num(size_line, &size)?;
        let (ln, schema_json) = lines.field("schema")?;
        let schema: Schema = serde_json::from_str(&schema_json).map_err(|e| invalid(ln, e.to_string()))?;
        let schema = Schema::new(schema.relation, schema.task, schema.attributes).map_err(|e| invalid(ln, e.to_string()))?;
        if schema.task.to_string() != task.1 {
            return Err(invalid(task.0, "task does not match the schema"));
        }
        let (ln, hierarchy_json) = lines.field("hierarchy")?;
        let hierarchy: Option<ClassHierarchy> =
            serde_json::from_str(&hierarchy_json).map_err(|e| invalid(ln, e.to_string()))?;
        let root = read_node(&mut lines, &schema)?;
        if let Some((ln, _)) = lines.next_nonempty() {
            return Err(invalid(ln, "trailing content after the last node"));
        }
        let model = PctModel {
            root,
            schema: Arc::new(schema),
            hierarchy: hierarchy.map(Arc::new),
            w,
            pruned,
        };
        if model.size() != size {
            return Err(invalid(size_line, format!("declared size {size}, found {} nodes", model.size())));
        }
        Ok(model)
    }
}

fn write_summary(s: &NodeSummary, out: &mut String) {
    let proto: Vec<String> = s.prototype.0.iter().map(|&p| real(p)).collect();
    writeln!(out, "nl={} nu={} proto={}", s.n_labeled, s.n_unlabeled, proto.join(",")).unwrap();
}

fn write_nodes(node: &TreeNode, out: &mut String) {
    match node {
        TreeNode::Leaf(s) => {
            out.push_str("node leaf ");
            write_summary(s, out);
        }
        TreeNode::Internal(n) => {
            let test = match n.test.kind {
                TestKind::GreaterThan(theta) => format!("gt={}", real(theta)),
                TestKind::Equals(v) => format!("eq={v}"),
            };
            let fallback = match n.fallback {
                Branch::Yes => "yes",
                Branch::No => "no",
            };
            write!(out, "node internal attr={} {test} fallback={fallback} ", n.test.attribute).unwrap();
            write_summary(&n.summary, out);
            write_nodes(&n.yes, out);
            write_nodes(&n.no, out);
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    fn next_nonempty(&mut self) -> Option<(usize, &'a str)> {
        self.inner
            .by_ref()
            .map(|(i, l)| (i + 1, l.trim()))
            .find(|(_, l)| !l.is_empty())
    }

    fn expect_exact(&mut self, want: &str) -> Result<()> {
        match self.next_nonempty() {
            Some((_, l)) if l == want => Ok(()),
            Some((ln, l)) => Err(invalid(ln, format!("expected `{want}`, found `{l}`"))),
            None => Err(invalid(0, "empty model file")),
        }
    }

    fn field(&mut self, key: &str) -> Result<(usize, String)> {
        match self.next_nonempty() {
            Some((ln, l)) => match l.split_once(' ') {
                Some((k, v)) if k == key => Ok((ln, v.to_string())),
                _ => Err(invalid(ln, format!("expected `{key} ...`"))),
            },
            None => Err(invalid(0, format!("missing `{key}` line"))),
        }
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| invalid(line, format!("bad number `{s}`")))
}

fn read_node(lines: &mut Lines<'_>, schema: &Schema) -> Result<TreeNode> {
    let (ln, l) = lines.next_nonempty().ok_or_else(|| invalid(0, "missing node line"))?;
    let mut parts = l.split_whitespace();
    if parts.next() != Some("node") {
        return Err(invalid(ln, "expected a node line"));
    }
    let kind = parts.next().ok_or_else(|| invalid(ln, "missing node kind"))?;
    let mut fields = std::collections::HashMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| invalid(ln, format!("bad field `{p}`")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| invalid(ln, format!("missing `{k}`")));
    let prototype: Vec<f64> = get("proto")?
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(ln, s))
        .collect::<Result<_>>()?;
    let summary = NodeSummary {
        prototype: LabelVector(prototype),
        n_labeled: parse_num(ln, get("nl")?)?,
        n_unlabeled: parse_num(ln, get("nu")?)?,
    };
    match kind {
        "leaf" => Ok(TreeNode::Leaf(summary)),
        "internal" => {
            let attribute: usize = parse_num(ln, get("attr")?)?;
            if attribute >= schema.n_descriptive() {
                return Err(invalid(ln, format!("attribute {attribute} out of range")));
            }
            let kind = match (fields.get("gt"), fields.get("eq")) {
                (Some(t), None) => TestKind::GreaterThan(parse_num(ln, t)?),
                (None, Some(v)) => TestKind::Equals(parse_num(ln, v)?),
                _ => return Err(invalid(ln, "internal node needs exactly one of gt= or eq=")),
            };
            let fallback = match get("fallback")? {
                "yes" => Branch::Yes,
                "no" => Branch::No,
                other => return Err(invalid(ln, format!("bad fallback `{other}`"))),
            };
            let yes = read_node(lines, schema)?;
            let no = read_node(lines, schema)?;
            Ok(TreeNode::Internal(Box::new(InternalNode {
                test: SplitTest { attribute, kind },
                yes,
                no,
                fallback,
                summary,
            })))
        }
        other => Err(invalid(ln, format!("unknown node kind `{other}`"))),
    }
}
