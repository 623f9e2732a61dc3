use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{PctError, Result};

pub const DEFAULT_OMEGA0: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HierarchyShape {
    /// Classes are identified by their full `/`-separated path.
    Tree,
    /// Classes are identified by the last path segment; a class listed under
    /// several parent paths has several parents.
    Dag,
}

/// Label hierarchy below a virtual root, with depth-decayed class weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "HierarchyRepr", try_from = "HierarchyRepr")]
pub struct ClassHierarchy {
    shape: HierarchyShape,
    omega0: f64,
    names: Vec<String>,
    /// True when the virtual root is a parent.
    top_level: Vec<bool>,
    parents: Vec<Vec<usize>>,
    /// Proper ancestors, sorted.
    ancestors: Vec<Vec<usize>>,
    weights: Vec<f64>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct HierarchyRepr {
    shape: HierarchyShape,
    omega0: f64,
    /// (class, parent classes); an empty parent string stands for the root.
    classes: Vec<(String, Vec<String>)>,
}

impl From<ClassHierarchy> for HierarchyRepr {
    fn from(h: ClassHierarchy) -> Self {
        let classes = (0..h.len())
            .map(|c| {
                let mut ps: Vec<String> = Vec::new();
                if h.top_level[c] {
                    ps.push(String::new());
                }
                ps.extend(h.parents[c].iter().map(|&p| h.names[p].clone()));
                (h.names[c].clone(), ps)
            })
            .collect();
        HierarchyRepr {
            shape: h.shape,
            omega0: h.omega0,
            classes,
        }
    }
}

impl TryFrom<HierarchyRepr> for ClassHierarchy {
    type Error = PctError;

    fn try_from(repr: HierarchyRepr) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, (name, _)) in repr.classes.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(PctError::DuplicateClass(name.clone()));
            }
        }
        let mut top_level = vec![false; repr.classes.len()];
        let mut parents = vec![Vec::new(); repr.classes.len()];
        for (i, (_, ps)) in repr.classes.iter().enumerate() {
            for p in ps {
                if p.is_empty() {
                    top_level[i] = true;
                } else {
                    let pi = *index.get(p).ok_or_else(|| PctError::UnknownClass(p.clone()))?;
                    parents[i].push(pi);
                }
            }
        }
        let names = repr.classes.into_iter().map(|(n, _)| n).collect();
        ClassHierarchy::assemble(repr.shape, repr.omega0, names, top_level, parents, index)
    }
}

impl ClassHierarchy {
    fn assemble(
        shape: HierarchyShape,
        omega0: f64,
        names: Vec<String>,
        top_level: Vec<bool>,
        parents: Vec<Vec<usize>>,
        index: HashMap<String, usize>,
    ) -> Result<Self> {
        if !(omega0 > 0.0 && omega0 < 1.0) {
            return Err(PctError::config(format!("omega0 must lie in (0,1), got {omega0}")));
        }
        let n = names.len();
        for c in 0..n {
            let n_parents = parents[c].len() + usize::from(top_level[c]);
            if n_parents == 0 {
                return Err(PctError::config(format!("class `{}` has no parent", names[c])));
            }
            if shape == HierarchyShape::Tree && n_parents != 1 {
                return Err(PctError::config(format!(
                    "class `{}` has {n_parents} parents in a tree hierarchy",
                    names[c]
                )));
            }
        }

        // Kahn's algorithm over parent -> child edges.
        let mut children = vec![Vec::new(); n];
        let mut pending: Vec<usize> = parents.iter().map(Vec::len).collect();
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut order = Vec::with_capacity(n);
        let mut queue: Vec<usize> = (0..n).filter(|&c| pending[c] == 0).collect();
        while let Some(c) = queue.pop() {
            order.push(c);
            for &ch in &children[c] {
                pending[ch] -= 1;
                if pending[ch] == 0 {
                    queue.push(ch);
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&c| pending[c] > 0).unwrap();
            return Err(PctError::HierarchyCycle(names[stuck].clone()));
        }

        // Path counts and sums of omega0^length over all root-to-class paths.
        let mut path_count = vec![0f64; n];
        let mut path_sum = vec![0f64; n];
        let mut depth = vec![0i32; n];
        let mut ancestors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &c in &order {
            let mut count = if top_level[c] { 1.0 } else { 0.0 };
            let mut sum = if top_level[c] { 1.0 } else { 0.0 };
            let mut anc = Vec::new();
            for &p in &parents[c] {
                count += path_count[p];
                sum += path_sum[p];
                depth[c] = depth[p] + 1;
                anc.push(p);
                anc.extend_from_slice(&ancestors[p]);
            }
            if top_level[c] {
                depth[c] = 1;
            }
            anc.sort_unstable();
            anc.dedup();
            ancestors[c] = anc;
            path_count[c] = count;
            path_sum[c] = omega0 * sum;
        }
        let weights = (0..n)
            .map(|c| match shape {
                HierarchyShape::Tree => omega0.powi(depth[c]),
                HierarchyShape::Dag => path_sum[c] / path_count[c],
            })
            .collect();

        Ok(ClassHierarchy {
            shape,
            omega0,
            names,
            top_level,
            parents,
            ancestors,
            weights,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn shape(&self) -> HierarchyShape {
        self.shape
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, class: usize) -> f64 {
        self.weights[class]
    }

    /// Direct parents of `class`, excluding the virtual root.
    pub fn parents(&self, class: usize) -> &[usize] {
        &self.parents[class]
    }

    pub fn is_top_level(&self, class: usize) -> bool {
        self.top_level[class]
    }

    /// All proper ancestors of `class`, excluding the virtual root.
    pub fn ancestors(&self, class: usize) -> &[usize] {
        &self.ancestors[class]
    }

    /// Index of a class given as a path (tree) or path/name (DAG).
    pub fn class_index(&self, path: &str) -> Result<usize> {
        let key = match self.shape {
            HierarchyShape::Tree => path.trim(),
            HierarchyShape::Dag => path.trim().rsplit('/').next().unwrap_or(""),
        };
        self.index
            .get(key)
            .copied()
            .ok_or_else(|| PctError::UnknownClass(path.to_string()))
    }

    /// Membership vector of `members` closed under ancestors.
    pub fn close(&self, members: &[usize]) -> Vec<bool> {
        let mut bits = vec![false; self.len()];
        for &c in members {
            bits[c] = true;
            for &a in &self.ancestors[c] {
                bits[a] = true;
            }
        }
        bits
    }

    pub fn is_closed(&self, bits: &[bool]) -> bool {
        (0..self.len()).all(|c| !bits[c] || self.ancestors[c].iter().all(|&a| bits[a]))
    }

    /// Membership vector of the given class paths, closed under ancestors.
    pub fn encode_paths<S: AsRef<str>>(&self, paths: &[S]) -> Result<Vec<bool>> {
        let members = paths
            .iter()
            .map(|p| self.class_index(p.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.close(&members))
    }
}

/// Builds a hierarchy from `/`-separated class paths.
///
/// In tree mode every prefix of a path is a class of its own, identified by
/// the prefix. In DAG mode each path contributes the edges between its
/// consecutive segments, so a class listed under several parent paths ends up
/// with several parents.
pub fn build_hierarchy<S: AsRef<str>>(paths: &[S], omega0: f64, shape: HierarchyShape) -> Result<ClassHierarchy> {
    if paths.is_empty() {
        return Err(PctError::config("class hierarchy needs at least one path"));
    }
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut top_level: Vec<bool> = Vec::new();
    let mut parents: Vec<Vec<usize>> = Vec::new();
    let mut declared = std::collections::HashSet::new();

    let mut intern = |name: &str,
                      names: &mut Vec<String>,
                      top_level: &mut Vec<bool>,
                      parents: &mut Vec<Vec<usize>>|
     -> usize {
        if let Some(&i) = index.get(name) {
            return i;
        }
        let i = names.len();
        names.push(name.to_string());
        top_level.push(false);
        parents.push(Vec::new());
        index.insert(name.to_string(), i);
        i
    };

    for raw in paths {
        let path = raw.as_ref().trim();
        let segments: Vec<&str> = path.split('/').map(str::trim).collect();
        if segments.iter().any(|s| s.is_empty()) {
            return Err(PctError::config(format!("malformed class path `{path}`")));
        }
        let canonical = segments.join("/");
        if !declared.insert(canonical.clone()) {
            return Err(PctError::DuplicateClass(canonical));
        }
        let mut prev: Option<usize> = None;
        for k in 0..segments.len() {
            let key = match shape {
                HierarchyShape::Tree => segments[..=k].join("/"),
                HierarchyShape::Dag => segments[k].to_string(),
            };
            let c = intern(&key, &mut names, &mut top_level, &mut parents);
            match prev {
                None => top_level[c] = true,
                Some(p) => {
                    if !parents[c].contains(&p) {
                        parents[c].push(p);
                    }
                }
            }
            prev = Some(c);
        }
    }
    let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    ClassHierarchy::assemble(shape, omega0, names, top_level, parents, index)
}
