//! Plain-text model persistence. Every number prints in shortest
//! round-trip form, so a load returns bit-identical parameters. Circuit
//! models use a fixed header layout (`qubits=`, `depth=`, `reps=`,
//! `scale=`, `offset=`, then one parameter per line); all other kinds
//! start with a `kind=` line. A fitted scaler rides in a sidecar file
//! next to the model.

use std::fmt::Write as FmtWrite;
use std::path::Path;

use crate::bench::report::{ModelInner, TrainedModel};
use crate::classical::boost::{AdaBoostModel, GbrtModel};
use crate::classical::forest::ForestModel;
use crate::classical::stump::Stump;
use crate::classical::svm::{SvmKernel, SvmModel};
use crate::classical::tree::{TreeModel, TreeNode, TreeTask};
use crate::error::{Error, Result};
use crate::hydrodata::transform::{ColumnStats, ScaleMode, Scaler};
use crate::qboost::{Ensemble, QboostVariant};
use crate::qkernel::{Entanglement, FeatureMapSpec};
use crate::vqml::{AnsatzSpec, Encoding, Readout, VariationalModel};

fn bad(reason: impl Into<String>) -> Error {
    Error::Format {
        reason: reason.into(),
        samples: Vec::new(),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

// ---------------------------------------------------------------- writing

fn push_vec(out: &mut String, key: &str, values: &[f64]) {
    let _ = writeln!(out, "{key}={}", values.len());
    for v in values {
        let _ = writeln!(out, "{v}");
    }
}

fn push_matrix(out: &mut String, key: &str, rows: &[Vec<f64>]) {
    let cols = rows.first().map_or(0, Vec::len);
    let _ = writeln!(out, "{key}={} {cols}", rows.len());
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
}

fn push_tree_node(out: &mut String, node: &TreeNode) {
    match node {
        TreeNode::Leaf { value } => {
            let _ = writeln!(out, "leaf {value}");
        }
        TreeNode::Split { feature, threshold, left, right } => {
            let _ = writeln!(out, "split {feature} {threshold}");
            push_tree_node(out, left);
            push_tree_node(out, right);
        }
    }
}

fn task_name(task: TreeTask) -> &'static str {
    match task {
        TreeTask::Classify => "classify",
        TreeTask::Regress => "regress",
    }
}

fn push_tree(out: &mut String, tree: &TreeModel) {
    let _ = writeln!(out, "task={}", task_name(tree.task));
    let _ = writeln!(out, "max_depth={}", tree.max_depth);
    push_tree_node(out, &tree.root);
}

fn push_stump_line(out: &mut String, stump: &Stump) {
    let _ = writeln!(out, "{} {} {}", stump.feature, stump.threshold, stump.polarity);
}

fn push_svm_body(out: &mut String, svm: &SvmModel) {
    match svm.kernel {
        SvmKernel::Rbf { gamma } => {
            let _ = writeln!(out, "kernel=rbf {gamma}");
        }
        SvmKernel::Linear => {
            let _ = writeln!(out, "kernel=linear");
        }
        SvmKernel::Precomputed => {
            let _ = writeln!(out, "kernel=precomputed");
        }
    }
    let _ = writeln!(out, "c={}", svm.c);
    let _ = writeln!(out, "bias={}", svm.bias);
    push_vec(out, "alphas", &svm.alphas);
    push_vec(out, "labels", &svm.labels);
    push_matrix(out, "train_x", &svm.train_x);
}

fn entanglement_convention(n_features: usize) -> Entanglement {
    if n_features > 2 {
        Entanglement::Ring
    } else {
        Entanglement::Linear
    }
}

fn render_model(inner: &ModelInner) -> Result<String> {
    let mut out = String::new();
    match inner {
        ModelInner::Vqc(model) => {
            let spec = match &model.encoding {
                Encoding::ZzMap(spec) => spec,
                _ => {
                    return Err(Error::Config(
                        "only circuit models with the standard encoding can be saved".into(),
                    ))
                }
            };
            if model.readout != Readout::AffineZ0 {
                return Err(Error::Config(
                    "only circuit models with the affine readout can be saved".into(),
                ));
            }
            if spec.entanglement != entanglement_convention(spec.n_features) {
                return Err(Error::Config(
                    "circuit model entanglement deviates from the width convention".into(),
                ));
            }
            let _ = writeln!(out, "qubits={}", model.ansatz.n_qubits);
            let _ = writeln!(out, "depth={}", model.ansatz.depth);
            let _ = writeln!(out, "reps={}", spec.reps);
            let _ = writeln!(out, "scale={}", model.output_scale);
            let _ = writeln!(out, "offset={}", model.output_offset);
            for p in &model.params {
                let _ = writeln!(out, "{p}");
            }
        }
        ModelInner::Majority { label } => {
            let _ = writeln!(out, "kind=majority");
            let _ = writeln!(out, "label={label}");
        }
        ModelInner::AlwaysPositive => {
            let _ = writeln!(out, "kind=always_positive");
        }
        ModelInner::Knn { k, xs, ys } => {
            let _ = writeln!(out, "kind=knn");
            let _ = writeln!(out, "k={k}");
            push_matrix(&mut out, "train_x", xs);
            push_vec(&mut out, "labels", ys);
        }
        ModelInner::Tree(tree) => {
            let _ = writeln!(out, "kind=tree");
            push_tree(&mut out, tree);
        }
        ModelInner::Forest(forest) => {
            let _ = writeln!(out, "kind=forest");
            let _ = writeln!(out, "n_trees={}", forest.trees.len());
            for tree in &forest.trees {
                push_tree(&mut out, tree);
            }
        }
        ModelInner::AdaBoost(model) => {
            let _ = writeln!(out, "kind=adaboost");
            let _ = writeln!(out, "members={}", model.members.len());
            for (stump, alpha) in &model.members {
                let _ = writeln!(
                    out,
                    "{} {} {} {alpha}",
                    stump.feature, stump.threshold, stump.polarity
                );
            }
        }
        ModelInner::Gbrt(model) => {
            let _ = writeln!(out, "kind=gbrt");
            let _ = writeln!(out, "base={}", model.base);
            let _ = writeln!(out, "shrinkage={}", model.shrinkage);
            let _ = writeln!(out, "n_trees={}", model.trees.len());
            for tree in &model.trees {
                push_tree(&mut out, tree);
            }
        }
        ModelInner::Svm(svm) => {
            let _ = writeln!(out, "kind=svm");
            push_svm_body(&mut out, svm);
        }
        ModelInner::Qsvm { model, map, train_x } => {
            let _ = writeln!(out, "kind=qsvm");
            let _ = writeln!(out, "features={}", map.n_features);
            let _ = writeln!(out, "reps={}", map.reps);
            let ent = match map.entanglement {
                Entanglement::Linear => "linear",
                Entanglement::Ring => "ring",
            };
            let _ = writeln!(out, "entanglement={ent}");
            push_svm_body(&mut out, model);
            push_matrix(&mut out, "map_train_x", train_x);
        }
        ModelInner::Qboost(ensemble) => {
            let _ = writeln!(out, "kind=qboost");
            let variant = match ensemble.variant {
                QboostVariant::Qboost => "qboost",
                QboostVariant::QboostPlus => "qboost_plus",
            };
            let _ = writeln!(out, "variant={variant}");
            let _ = writeln!(out, "fallback_used={}", ensemble.fallback_used);
            let _ = writeln!(out, "train_accuracy={}", ensemble.train_accuracy);
            let _ = writeln!(out, "polarity_warning={}", ensemble.polarity_warning);
            let _ = writeln!(out, "selected={}", ensemble.selected.len());
            for index in &ensemble.selected {
                let _ = writeln!(out, "{index}");
            }
            let _ = writeln!(out, "members={}", ensemble.members.len());
            for stump in &ensemble.members {
                push_stump_line(&mut out, stump);
            }
        }
    }
    Ok(out)
}

fn render_scaler(scaler: &Scaler) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "mode={}", scaler.mode.name());
    let _ = writeln!(out, "columns={}", scaler.columns.len());
    for c in &scaler.columns {
        let _ = writeln!(out, "{} {} {} {}", c.min, c.max, c.mean, c.std);
    }
    let _ = writeln!(out, "warnings={}", scaler.warnings.len());
    for w in &scaler.warnings {
        let _ = writeln!(out, "{w}");
    }
    out
}

/// Writes `<name>.model.txt` (plus `<name>.scaler.txt` when the model
/// carries a scaler) into `dir`.
pub fn save_model(dir: &Path, name: &str, model: &TrainedModel) -> Result<()> {
    write_file(&dir.join(format!("{name}.model.txt")), &render_model(&model.inner)?)?;
    if let Some(scaler) = &model.scaler {
        write_file(&dir.join(format!("{name}.scaler.txt")), &render_scaler(scaler))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- reading

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor {
            lines: text.lines().collect(),
            pos: 0,
        }
    }

    fn next_line(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .ok_or_else(|| bad("model file ended early"))?;
        self.pos += 1;
        Ok(line)
    }

    fn done(&self) -> bool {
        self.pos >= self.lines.len()
    }

    fn expect_key(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| bad(format!("expected `{key}=`, found `{line}`")))
    }

    fn expect_usize(&mut self, key: &str) -> Result<usize> {
        let raw = self.expect_key(key)?;
        raw.parse()
            .map_err(|_| bad(format!("`{key}` is not an integer: `{raw}`")))
    }

    fn expect_f64(&mut self, key: &str) -> Result<f64> {
        let raw = self.expect_key(key)?;
        parse_f64(raw)
    }

    fn expect_bool(&mut self, key: &str) -> Result<bool> {
        let raw = self.expect_key(key)?;
        raw.parse()
            .map_err(|_| bad(format!("`{key}` is not a boolean: `{raw}`")))
    }

    fn read_vec(&mut self, key: &str) -> Result<Vec<f64>> {
        let len = self.expect_usize(key)?;
        (0..len).map(|_| parse_f64(self.next_line()?)).collect()
    }

    fn read_matrix(&mut self, key: &str) -> Result<Vec<Vec<f64>>> {
        let header = self.expect_key(key)?;
        let (rows, cols) = header
            .split_once(' ')
            .ok_or_else(|| bad(format!("`{key}` header needs `rows cols`: `{header}`")))?;
        let rows: usize = rows
            .parse()
            .map_err(|_| bad(format!("bad row count `{rows}`")))?;
        let cols: usize = cols
            .parse()
            .map_err(|_| bad(format!("bad column count `{cols}`")))?;
        let mut out = Vec::with_capacity(rows);
        for _ in 0..rows {
            let line = self.next_line()?;
            let row: Vec<f64> = line
                .split(' ')
                .map(parse_f64)
                .collect::<Result<_>>()?;
            if row.len() != cols {
                return Err(bad(format!(
                    "matrix row has {} cells, header says {cols}",
                    row.len()
                )));
            }
            out.push(row);
        }
        Ok(out)
    }
}

fn parse_f64(raw: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| bad(format!("not a number: `{raw}`")))?;
    if !v.is_finite() {
        return Err(bad(format!("non-finite value: `{raw}`")));
    }
    Ok(v)
}

fn parse_task(raw: &str) -> Result<TreeTask> {
    match raw {
        "classify" => Ok(TreeTask::Classify),
        "regress" => Ok(TreeTask::Regress),
        other => Err(bad(format!("unknown tree task `{other}`"))),
    }
}

fn read_tree_node(cursor: &mut Cursor) -> Result<TreeNode> {
    let line = cursor.next_line()?;
    if let Some(rest) = line.strip_prefix("leaf ") {
        return Ok(TreeNode::Leaf {
            value: parse_f64(rest)?,
        });
    }
    if let Some(rest) = line.strip_prefix("split ") {
        let (feature, threshold) = rest
            .split_once(' ')
            .ok_or_else(|| bad(format!("split line needs `feature threshold`: `{line}`")))?;
        let feature: usize = feature
            .parse()
            .map_err(|_| bad(format!("bad split feature `{feature}`")))?;
        let threshold = parse_f64(threshold)?;
        let left = Box::new(read_tree_node(cursor)?);
        let right = Box::new(read_tree_node(cursor)?);
        return Ok(TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        });
    }
    Err(bad(format!("expected `leaf` or `split`, found `{line}`")))
}

fn read_tree(cursor: &mut Cursor) -> Result<TreeModel> {
    let task = parse_task(cursor.expect_key("task")?)?;
    let max_depth = cursor.expect_usize("max_depth")?;
    let root = read_tree_node(cursor)?;
    Ok(TreeModel {
        root,
        task,
        max_depth,
    })
}

fn read_stump(line: &str) -> Result<Stump> {
    let cells: Vec<&str> = line.split(' ').collect();
    if cells.len() != 3 {
        return Err(bad(format!("stump line needs 3 fields: `{line}`")));
    }
    Ok(Stump {
        feature: cells[0]
            .parse()
            .map_err(|_| bad(format!("bad stump feature `{}`", cells[0])))?,
        threshold: parse_f64(cells[1])?,
        polarity: cells[2]
            .parse()
            .map_err(|_| bad(format!("bad stump polarity `{}`", cells[2])))?,
    })
}

fn read_svm_body(cursor: &mut Cursor) -> Result<SvmModel> {
    let kernel_raw = cursor.expect_key("kernel")?;
    let kernel = if let Some(gamma) = kernel_raw.strip_prefix("rbf ") {
        SvmKernel::Rbf {
            gamma: parse_f64(gamma)?,
        }
    } else {
        match kernel_raw {
            "linear" => SvmKernel::Linear,
            "precomputed" => SvmKernel::Precomputed,
            other => return Err(bad(format!("unknown kernel `{other}`"))),
        }
    };
    let c = cursor.expect_f64("c")?;
    let bias = cursor.expect_f64("bias")?;
    let alphas = cursor.read_vec("alphas")?;
    let labels = cursor.read_vec("labels")?;
    let train_x = cursor.read_matrix("train_x")?;
    Ok(SvmModel {
        kernel,
        c,
        alphas,
        bias,
        train_x,
        labels,
    })
}

fn parse_model(text: &str) -> Result<ModelInner> {
    let mut cursor = Cursor::new(text);
    let first = *cursor
        .lines
        .first()
        .ok_or_else(|| bad("model file is empty"))?;
    if first.starts_with("qubits=") {
        let qubits = cursor.expect_usize("qubits")?;
        let depth = cursor.expect_usize("depth")?;
        let reps = cursor.expect_usize("reps")?;
        let scale = cursor.expect_f64("scale")?;
        let offset = cursor.expect_f64("offset")?;
        let mut params = Vec::new();
        while !cursor.done() {
            params.push(parse_f64(cursor.next_line()?)?);
        }
        if params.len() != qubits * depth {
            return Err(bad(format!(
                "circuit model lists {} parameters, layout needs {}",
                params.len(),
                qubits * depth
            )));
        }
        let map = FeatureMapSpec::new(qubits, reps, entanglement_convention(qubits))?;
        let ansatz = AnsatzSpec::new(qubits, depth)?;
        let mut model =
            VariationalModel::new(Encoding::ZzMap(map), ansatz, params, Readout::AffineZ0)?;
        model.output_scale = scale;
        model.output_offset = offset;
        return Ok(ModelInner::Vqc(model));
    }

    let kind = cursor.expect_key("kind")?;
    let inner = match kind {
        "majority" => {
            let label = cursor.expect_usize("label")?;
            if label > 1 {
                return Err(bad(format!("majority label must be 0 or 1, found {label}")));
            }
            ModelInner::Majority { label: label as u8 }
        }
        "always_positive" => ModelInner::AlwaysPositive,
        "knn" => {
            let k = cursor.expect_usize("k")?;
            let xs = cursor.read_matrix("train_x")?;
            let ys = cursor.read_vec("labels")?;
            ModelInner::Knn { k, xs, ys }
        }
        "tree" => ModelInner::Tree(read_tree(&mut cursor)?),
        "forest" => {
            let n_trees = cursor.expect_usize("n_trees")?;
            let trees: Vec<TreeModel> = (0..n_trees)
                .map(|_| read_tree(&mut cursor))
                .collect::<Result<_>>()?;
            let task = trees.first().map_or(TreeTask::Classify, |t| t.task);
            ModelInner::Forest(ForestModel { trees, task })
        }
        "adaboost" => {
            let count = cursor.expect_usize("members")?;
            let mut members = Vec::with_capacity(count);
            for _ in 0..count {
                let line = cursor.next_line()?;
                let (stump_part, alpha) = line
                    .rsplit_once(' ')
                    .ok_or_else(|| bad(format!("member line needs 4 fields: `{line}`")))?;
                members.push((read_stump(stump_part)?, parse_f64(alpha)?));
            }
            ModelInner::AdaBoost(AdaBoostModel { members })
        }
        "gbrt" => {
            let base = cursor.expect_f64("base")?;
            let shrinkage = cursor.expect_f64("shrinkage")?;
            let n_trees = cursor.expect_usize("n_trees")?;
            let trees = (0..n_trees)
                .map(|_| read_tree(&mut cursor))
                .collect::<Result<_>>()?;
            ModelInner::Gbrt(GbrtModel {
                base,
                shrinkage,
                trees,
            })
        }
        "svm" => ModelInner::Svm(read_svm_body(&mut cursor)?),
        "qsvm" => {
            let features = cursor.expect_usize("features")?;
            let reps = cursor.expect_usize("reps")?;
            let ent = match cursor.expect_key("entanglement")? {
                "linear" => Entanglement::Linear,
                "ring" => Entanglement::Ring,
                other => return Err(bad(format!("unknown entanglement `{other}`"))),
            };
            let map = FeatureMapSpec::new(features, reps, ent)?;
            let model = read_svm_body(&mut cursor)?;
            let train_x = cursor.read_matrix("map_train_x")?;
            ModelInner::Qsvm {
                model,
                map,
                train_x,
            }
        }
        "qboost" => {
            let variant = match cursor.expect_key("variant")? {
                "qboost" => QboostVariant::Qboost,
                "qboost_plus" => QboostVariant::QboostPlus,
                other => return Err(bad(format!("unknown ensemble variant `{other}`"))),
            };
            let fallback_used = cursor.expect_bool("fallback_used")?;
            let train_accuracy = cursor.expect_f64("train_accuracy")?;
            let polarity_warning = cursor.expect_bool("polarity_warning")?;
            let n_selected = cursor.expect_usize("selected")?;
            let selected: Vec<usize> = (0..n_selected)
                .map(|_| {
                    let line = cursor.next_line()?;
                    line.parse()
                        .map_err(|_| bad(format!("bad pool index `{line}`")))
                })
                .collect::<Result<_>>()?;
            let n_members = cursor.expect_usize("members")?;
            let members: Vec<Stump> = (0..n_members)
                .map(|_| read_stump(cursor.next_line()?))
                .collect::<Result<_>>()?;
            ModelInner::Qboost(Ensemble {
                members,
                selected,
                variant,
                fallback_used,
                train_accuracy,
                polarity_warning,
            })
        }
        other => return Err(bad(format!("unknown model kind `{other}`"))),
    };
    if !cursor.done() {
        return Err(bad(format!(
            "trailing content at line {}",
            cursor.pos + 1
        )));
    }
    Ok(inner)
}

fn parse_scaler(text: &str) -> Result<Scaler> {
    let mut cursor = Cursor::new(text);
    let mode_raw = cursor.expect_key("mode")?;
    let mode = ScaleMode::parse(mode_raw)
        .ok_or_else(|| bad(format!("unknown scaling mode `{mode_raw}`")))?;
    let n_columns = cursor.expect_usize("columns")?;
    let mut columns = Vec::with_capacity(n_columns);
    for _ in 0..n_columns {
        let line = cursor.next_line()?;
        let cells: Vec<f64> = line
            .split(' ')
            .map(parse_f64)
            .collect::<Result<_>>()?;
        if cells.len() != 4 {
            return Err(bad(format!("column line needs 4 fields: `{line}`")));
        }
        columns.push(ColumnStats {
            min: cells[0],
            max: cells[1],
            mean: cells[2],
            std: cells[3],
        });
    }
    let n_warnings = cursor.expect_usize("warnings")?;
    let warnings: Vec<String> = (0..n_warnings)
        .map(|_| cursor.next_line().map(str::to_string))
        .collect::<Result<_>>()?;
    Ok(Scaler {
        mode,
        columns,
        warnings,
    })
}

/// Loads `<name>.model.txt` from `dir`, plus `<name>.scaler.txt` when that
/// sidecar exists.
pub fn load_model(dir: &Path, name: &str) -> Result<TrainedModel> {
    let inner = parse_model(&read_file(&dir.join(format!("{name}.model.txt")))?)?;
    let scaler_path = dir.join(format!("{name}.scaler.txt"));
    let scaler = if scaler_path.exists() {
        Some(parse_scaler(&read_file(&scaler_path)?)?)
    } else {
        None
    };
    Ok(TrainedModel {
        name: name.to_string(),
        scaler,
        inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::report::{fit_model, predict_model, ModelKind, ModelSpec};

    fn toy_rows(n: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
        let xs: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                vec![
                    (i as f64 * 0.37).sin().abs(),
                    (i as f64 * 0.11).cos().abs(),
                ]
            })
            .collect();
        let ys = xs.iter().map(|r| u8::from(r[0] > 0.6)).collect();
        (xs, ys)
    }

    fn round_trip(kind: ModelKind, rows: usize) {
        let (xs, ys) = toy_rows(rows);
        let spec = ModelSpec {
            name: "m".into(),
            kind,
            max_rows: None,
        };
        let model = fit_model(&spec, &xs, &ys, 13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_model(dir.path(), "m", &model).unwrap();
        let loaded = load_model(dir.path(), "m").unwrap();
        assert_eq!(loaded.inner, model.inner);
        assert_eq!(loaded.scaler, model.scaler);
        assert_eq!(
            predict_model(&loaded, &xs).unwrap(),
            predict_model(&model, &xs).unwrap()
        );
    }

    #[test]
    fn every_model_kind_round_trips() {
        round_trip(ModelKind::Majority, 30);
        round_trip(ModelKind::AlwaysPositive, 30);
        round_trip(ModelKind::Knn { k: 3 }, 30);
        round_trip(ModelKind::Tree { max_depth: 4, min_leaf: 1 }, 40);
        round_trip(
            ModelKind::Forest { n_trees: 4, max_depth: 3, min_leaf: 1 },
            40,
        );
        round_trip(ModelKind::AdaBoost { rounds: 5 }, 40);
        round_trip(ModelKind::Gbrt { rounds: 5, shrinkage: 0.2 }, 40);
        round_trip(ModelKind::SvmRbf { c: 5.0, gamma: None }, 30);
        round_trip(ModelKind::SvmLinear { c: 1.0 }, 30);
        round_trip(ModelKind::Qsvm { c: 5.0, reps: 1 }, 16);
        round_trip(
            ModelKind::Qboost { pool: 6, lambda_factor: 0.0, plus: true },
            40,
        );
    }

    #[test]
    fn circuit_model_round_trips_and_header_is_pinned() {
        let (xs, ys) = toy_rows(14);
        let spec = ModelSpec {
            name: "vqc".into(),
            kind: ModelKind::Vqc { depth: 2, reps: 1, learning_rate: 0.3, iters: 4 },
            max_rows: None,
        };
        let model = fit_model(&spec, &xs, &ys, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_model(dir.path(), "vqc", &model).unwrap();

        let text = std::fs::read_to_string(dir.path().join("vqc.model.txt")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("qubits="));
        assert!(lines[1].starts_with("depth="));
        assert!(lines[2].starts_with("reps="));
        assert!(lines[3].starts_with("scale="));
        assert!(lines[4].starts_with("offset="));
        assert_eq!(lines.len(), 5 + 2 * 2);

        let loaded = load_model(dir.path(), "vqc").unwrap();
        assert_eq!(loaded.inner, model.inner);
        assert_eq!(
            predict_model(&loaded, &xs).unwrap(),
            predict_model(&model, &xs).unwrap()
        );
    }

    #[test]
    fn wrong_parameter_count_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.model.txt");
        std::fs::write(&path, "qubits=2\ndepth=2\nreps=1\nscale=1\noffset=0\n0.1\n0.2\n").unwrap();
        assert!(matches!(
            load_model(dir.path(), "bad").unwrap_err(),
            Error::Format { .. }
        ));
    }

    #[test]
    fn corrupted_and_missing_files_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("junk.model.txt"), "kind=starfish\n").unwrap();
        assert!(matches!(
            load_model(dir.path(), "junk").unwrap_err(),
            Error::Format { .. }
        ));
        assert!(matches!(
            load_model(dir.path(), "absent").unwrap_err(),
            Error::Io { .. }
        ));
        std::fs::write(dir.path().join("trail.model.txt"), "kind=always_positive\nextra\n")
            .unwrap();
        assert!(matches!(
            load_model(dir.path(), "trail").unwrap_err(),
            Error::Format { .. }
        ));
    }

    #[test]
    fn scaler_sidecar_preserves_stats_and_warnings() {
        let rows = vec![vec![1.0, 5.0], vec![1.0, 9.0], vec![1.0, 7.0]];
        let scaler = Scaler::fit(&rows, ScaleMode::ZScore).unwrap();
        assert!(!scaler.warnings.is_empty(), "constant column should warn");
        let model = TrainedModel {
            name: "s".into(),
            scaler: Some(scaler.clone()),
            inner: ModelInner::AlwaysPositive,
        };
        let dir = tempfile::tempdir().unwrap();
        save_model(dir.path(), "s", &model).unwrap();
        let loaded = load_model(dir.path(), "s").unwrap();
        assert_eq!(loaded.scaler.unwrap(), scaler);
    }
}
