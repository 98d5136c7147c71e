//! JSON configuration files accepted by the subcommands that need more than
//! a couple of flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use lattice_median::corpus::{read_json, KacInstance};
use lattice_median::induction::{ActionFile, FiniteGroup, PermAction};
use lattice_median::metric::{FiniteMetricSpace, Graph, GraphFile, MetricFile};
use lattice_median::walks::HomogeneousSpace;
use lattice_median::{Error, Result};
use serde::Deserialize;

/// `drift --config`: the walk whose displacement is tracked.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriftConfig {
    FreeGroup { rank: usize },
    Integer,
    /// Simple walk on a graph, measured from `basepoint`.
    Graph { graph: PathBuf, basepoint: usize },
    /// Lattice generators of an induction instance acting on its space.
    Lattice { instance: PathBuf },
    /// Orbit-return walk of a homogeneous graph pushed to a lattice space.
    Discretized {
        homogeneous: PathBuf,
        space: PathBuf,
        action: PathBuf,
        #[serde(default = "default_budget_factor")]
        budget_factor: usize,
    },
}

fn default_budget_factor() -> usize {
    64
}

/// `translation --config`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranslationConfig {
    Line { shift: i64, half_width: i64 },
    FreeWord { word: Vec<usize>, depth_cap: usize },
    Group { instance: PathBuf, element: usize, point: usize },
}

/// `quasi-check --input`: a self-contained candidate quasi-action.
#[derive(Debug, Clone, Deserialize)]
pub struct QuasiInput {
    pub mul: Vec<Vec<usize>>,
    pub gens: Vec<usize>,
    #[serde(default)]
    pub graph: Option<GraphFile>,
    #[serde(default)]
    pub metric: Option<MetricFile>,
    /// `action[g][x] = g . x`.
    pub action: Vec<Vec<usize>>,
    #[serde(default)]
    pub triples: Option<Vec<[usize; 3]>>,
    #[serde(default)]
    pub pairs: Option<Vec<[usize; 3]>>,
}

impl QuasiInput {
    pub fn space(&self) -> Result<FiniteMetricSpace> {
        match (&self.graph, &self.metric) {
            (Some(g), None) => Graph::try_from(g.clone())?.metric(),
            (None, Some(m)) => FiniteMetricSpace::from_file(m.clone()),
            _ => Err(Error::InvalidInput("give exactly one of \"graph\" and \"metric\"".into())),
        }
    }
}

/// Resolves `path` against the directory of the file that named it.
pub fn relative(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(path)
    }
}

pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    read_json(path)
}

pub fn graph(path: &Path) -> Result<Graph> {
    Graph::try_from(load::<GraphFile>(path)?)
}

pub fn homogeneous(group: &Path, graph_path: &Path, action: &Path) -> Result<HomogeneousSpace> {
    KacInstance {
        name: String::new(),
        group: load(group)?,
        graph: load(graph_path)?,
        action: load(action)?,
    }
    .build()
}

/// The lattice of `hs` acting on `space` through the listed generators.
pub fn lattice_action(
    hs: &HomogeneousSpace,
    space: &FiniteMetricSpace,
    action: &ActionFile,
    gens: &[usize],
) -> Result<PermAction> {
    let given: BTreeMap<usize, Vec<usize>> = action.permutations()?;
    let act = PermAction::generate(&hs.group, space.len(), &given, gens, &hs.lattice)?;
    if let Some((g, x, y)) = act.isometry_violation(space, &hs.lattice) {
        return Err(Error::InvalidInput(format!(
            "lattice element {g} does not act isometrically on ({x},{y})"
        )));
    }
    Ok(act)
}

pub fn group_from_rows(rows: &[Vec<usize>]) -> Result<FiniteGroup> {
    FiniteGroup::from_table(rows.to_vec())
}
