//! Plain-text serialisation of a trained random forest.
//!
//! ```text
//! caponef-forest 1
//! classes 0 1
//! features P1 P2 P9
//! params <n_trees> <max_depth|none> <min_samples_split> <features_per_split|none> <bootstrap> <seed>
//! importances 0.5 0.25 0.25
//! tree 0 3
//! 0 split 2 0.125 1 2 40 0.5
//! 1 leaf 20 0 20 0
//! 2 leaf 20 0 0 20
//! end
//! ```
//!
//! Floats are written with the shortest representation that parses back to
//! the same bits, so a round trip reproduces predictions exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::{DecisionTree, ForestParams, Node, NodeKind, RandomForestModel};

pub const FORMAT_HEADER: &str = "caponef-forest 1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelIoError {
    #[error("not a forest model file (expected header {FORMAT_HEADER:?})")]
    BadHeader,
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("unexpected end of model file")]
    Truncated,
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

pub fn serialize_forest(model: &RandomForestModel) -> String {
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
    writeln!(out, "{FORMAT_HEADER}").unwrap();
    writeln!(out, "classes {}", join(&mut model.classes.iter().map(u32::to_string))).unwrap();
    writeln!(out, "features {}", model.feature_names.join(" ")).unwrap();
    let p = &model.params;
    writeln!(
        out,
        "params {} {} {} {} {} {}",
        p.n_trees,
        opt(p.max_depth),
        p.min_samples_split,
        opt(p.features_per_split),
        p.bootstrap,
        model.seed
    )
    .unwrap();
    writeln!(out, "importances {}", join(&mut model.importances.iter().map(|v| format!("{v:?}")))).unwrap();
    for (i, tree) in model.trees.iter().enumerate() {
        writeln!(out, "tree {i} {}", tree.nodes.len()).unwrap();
        for (id, node) in tree.nodes.iter().enumerate() {
            match &node.kind {
                NodeKind::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => writeln!(
                    out,
                    "{id} split {feature} {threshold:?} {left} {right} {} {:?}",
                    node.n_samples, node.impurity
                ),
                NodeKind::Leaf { counts } => writeln!(
                    out,
                    "{id} leaf {} {:?} {}",
                    node.n_samples,
                    node.impurity,
                    join(&mut counts.iter().map(u32::to_string))
                ),
            }
            .unwrap();
        }
    }
    out.push_str("end\n");
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<Vec<&'a str>, ModelIoError> {
        loop {
            let (i, l) = self.inner.next().ok_or(ModelIoError::Truncated)?;
            self.line = i + 1;
            if !l.trim().is_empty() {
                return Ok(l.split_whitespace().collect());
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> ModelIoError {
        ModelIoError::Malformed {
            line: self.line,
            message: message.into(),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>, ModelIoError> {
        let fields = self.next()?;
        if fields.first() != Some(&key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(fields[1..].to_vec())
    }

    fn parse<T: FromStr>(&self, s: &str) -> Result<T, ModelIoError> {
        s.parse().map_err(|_| self.err(format!("cannot parse {s:?}")))
    }

    fn parse_opt(&self, s: &str) -> Result<Option<usize>, ModelIoError> {
        if s == "none" {
            Ok(None)
        } else {
            self.parse(s).map(Some)
        }
    }
}

pub fn parse_forest(text: &str) -> Result<RandomForestModel, ModelIoError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    if lines.next().map_err(|_| ModelIoError::BadHeader)?.join(" ") != FORMAT_HEADER {
        return Err(ModelIoError::BadHeader);
    }
    let classes = lines
        .keyed("classes")?
        .iter()
        .map(|s| lines.parse::<u32>(s))
        .collect::<Result<Vec<_>, _>>()?;
    if classes.is_empty() || classes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(lines.err("classes must be non-empty and strictly ascending"));
    }
    let feature_names: Vec<String> = lines.keyed("features")?.iter().map(|s| s.to_string()).collect();
    if feature_names.is_empty() {
        return Err(lines.err("no features"));
    }
    let p = lines.keyed("params")?;
    if p.len() != 6 {
        return Err(lines.err("params needs 6 fields"));
    }
    let params = ForestParams {
        n_trees: lines.parse(p[0])?,
        max_depth: lines.parse_opt(p[1])?,
        min_samples_split: lines.parse(p[2])?,
        features_per_split: lines.parse_opt(p[3])?,
        bootstrap: lines.parse(p[4])?,
    };
    let seed = lines.parse(p[5])?;
    let importances = lines
        .keyed("importances")?
        .iter()
        .map(|s| lines.parse::<f64>(s))
        .collect::<Result<Vec<_>, _>>()?;
    if importances.len() != feature_names.len() {
        return Err(lines.err("importance count differs from feature count"));
    }

    let mut trees = Vec::with_capacity(params.n_trees);
    loop {
        let fields = lines.next()?;
        match fields.first() {
            Some(&"end") => break,
            Some(&"tree") if fields.len() == 3 => {}
            _ => return Err(lines.err("expected `tree` or `end`")),
        }
        if lines.parse::<usize>(fields[1])? != trees.len() {
            return Err(lines.err("trees out of order"));
        }
        let count: usize = lines.parse(fields[2])?;
        if count == 0 {
            return Err(lines.err("tree without nodes"));
        }
        let mut nodes = Vec::with_capacity(count);
        for id in 0..count {
            let f = lines.next()?;
            if f.len() < 2 || lines.parse::<usize>(f[0])? != id {
                return Err(lines.err("node ids must be consecutive"));
            }
            let node = match f[1] {
                "split" if f.len() == 8 => {
                    let feature: usize = lines.parse(f[2])?;
                    let left: usize = lines.parse(f[4])?;
                    let right: usize = lines.parse(f[5])?;
                    if feature >= feature_names.len() {
                        return Err(lines.err("split feature out of range"));
                    }
                    if left <= id || right <= id || left >= count || right >= count {
                        return Err(lines.err("child index out of range"));
                    }
                    Node {
                        kind: NodeKind::Split {
                            feature,
                            threshold: lines.parse(f[3])?,
                            left,
                            right,
                        },
                        n_samples: lines.parse(f[6])?,
                        impurity: lines.parse(f[7])?,
                    }
                }
                "leaf" if f.len() == 4 + classes.len() => Node {
                    n_samples: lines.parse(f[2])?,
                    impurity: lines.parse(f[3])?,
                    kind: NodeKind::Leaf {
                        counts: f[4..].iter().map(|s| lines.parse(s)).collect::<Result<_, _>>()?,
                    },
                },
                _ => return Err(lines.err("malformed node")),
            };
            nodes.push(node);
        }
        trees.push(DecisionTree {
            nodes,
            n_classes: classes.len(),
            n_features: feature_names.len(),
        });
    }
    if trees.len() != params.n_trees {
        return Err(lines.err(format!("expected {} trees, found {}", params.n_trees, trees.len())));
    }
    Ok(RandomForestModel {
        classes,
        feature_names,
        params,
        seed,
        trees,
        importances,
    })
}
