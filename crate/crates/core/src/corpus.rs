//! Bundled instances: trees, small hyperbolic graphs, group actions for
//! induction and homogeneous graphs for the return-time check.
//!
//! Directory layout written by [`Corpus::write`] and read by [`Corpus::load`]:
//!
//! ```text
//! graphs/<name>.json                 GraphFile
//! induction/<name>/group.json        GroupFile
//! induction/<name>/space.json        GraphFile
//! induction/<name>/action.json       ActionFile (lattice generators on the space)
//! kac/<name>/group.json              GroupFile
//! kac/<name>/graph.json              GraphFile
//! kac/<name>/action.json             ActionFile (group generators on the graph)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::induction::{ActionFile, FiniteGroup, FiniteGroupAction, GroupFile};
use crate::metric::{Graph, GraphFile};
use crate::walks::HomogeneousSpace;

/// Largest tree size enumerated.
pub const MAX_TREE_VERTICES: usize = 12;

/// Every unlabeled tree on `n` vertices, one representative each, in a
/// deterministic order.
pub fn trees(n: usize) -> Vec<Graph> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: BTreeMap<String, Vec<(usize, usize)>> = BTreeMap::from([(String::from("()"), vec![])]);
    for size in 1..n {
        let mut next = BTreeMap::new();
        for edges in level.values() {
            for v in 0..size {
                let mut e = edges.clone();
                e.push((v, size));
                next.entry(canonical(size + 1, &e)).or_insert(e);
            }
        }
        level = next;
    }
    level
        .into_values()
        .map(|e| Graph::new(n, &e).expect("generated trees are simple"))
        .collect()
}

/// Smallest rooted encoding over all roots.
fn canonical(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    (0..n).map(|r| encode(&adj, r, usize::MAX)).min().unwrap_or_default()
}

fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| encode(adj, w, v)).collect();
    kids.sort_unstable();
    format!("({})", kids.concat())
}

fn is_even(p: &[usize]) -> bool {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    inversions % 2 == 0
}

fn position(perms: &[Vec<usize>], p: &[usize]) -> usize {
    perms.iter().position(|q| q == p).expect("permutation lies in the group")
}

/// Permutation group with its natural action on a graph, and a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductionInstance {
    pub name: String,
    pub group: GroupFile,
    pub space: GraphFile,
    pub action: ActionFile,
}

impl InductionInstance {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(Self {
            name: dir_name(dir),
            group: read_json(&dir.join("group.json"))?,
            space: read_json(&dir.join("space.json"))?,
            action: read_json(&dir.join("action.json"))?,
        })
    }

    pub fn build(&self) -> Result<FiniteGroupAction> {
        FiniteGroupAction::from_files(&self.group, Graph::try_from(self.space.clone())?, &self.action)
    }

    /// A permutation group acting naturally on `graph`, with the lattice of
    /// elements passing `in_lattice`.
    fn natural(
        name: &str,
        graph: Graph,
        group_gens: &[Vec<usize>],
        lattice_gens: &[Vec<usize>],
        in_lattice: impl Fn(&[usize]) -> bool,
    ) -> Self {
        let (g, perms) = FiniteGroup::from_permutations(group_gens).expect("valid generators");
        let lattice: Vec<usize> = (0..g.order()).filter(|&i| in_lattice(&perms[i])).collect();
        let gens_lattice: Vec<usize> = lattice_gens.iter().map(|p| position(&perms, p)).collect();
        let action = gens_lattice.iter().map(|&i| (i.to_string(), perms[i].clone())).collect();
        Self {
            name: name.into(),
            group: GroupFile {
                order: g.order(),
                mul: g.to_rows(),
                lattice,
                gens_lattice,
                gens_group: group_gens.iter().map(|p| position(&perms, p)).collect(),
            },
            space: graph.to_file(),
            action: ActionFile {
                space: name.into(),
                action,
                basepoint: 0,
            },
        }
    }
}

/// A group acting on a graph by automorphisms with a lattice, for walks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KacInstance {
    pub name: String,
    pub group: GroupFile,
    pub graph: GraphFile,
    pub action: ActionFile,
}

impl KacInstance {
    pub fn load(dir: &Path) -> Result<Self> {
        Ok(Self {
            name: dir_name(dir),
            group: read_json(&dir.join("group.json"))?,
            graph: read_json(&dir.join("graph.json"))?,
            action: read_json(&dir.join("action.json"))?,
        })
    }

    pub fn build(&self) -> Result<HomogeneousSpace> {
        let group = self.group.group()?;
        let given = self.action.permutations()?;
        HomogeneousSpace::new(
            group,
            Graph::try_from(self.graph.clone())?,
            &given,
            &self.group.gens_group,
            self.group.lattice.clone(),
            self.action.basepoint,
        )
    }
}

fn cyclic_file(n: usize, lattice: Vec<usize>, gens_lattice: Vec<usize>) -> GroupFile {
    GroupFile {
        order: n,
        mul: FiniteGroup::cyclic(n).to_rows(),
        lattice,
        gens_lattice,
        gens_group: if n > 1 { vec![1] } else { vec![] },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    /// Small hyperbolic graphs for the approximation-tree distortion check.
    pub graphs: Vec<(String, Graph)>,
    pub induction: Vec<InductionInstance>,
    pub kac: Vec<KacInstance>,
}

impl Corpus {
    pub fn builtin() -> Self {
        Self {
            graphs: hyperbolic_graphs(),
            induction: induction_instances(),
            kac: kac_instances(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        for (name, g) in &self.graphs {
            write_json(&dir.join("graphs").join(format!("{name}.json")), &g.to_file())?;
        }
        for inst in &self.induction {
            let d = dir.join("induction").join(&inst.name);
            write_json(&d.join("group.json"), &inst.group)?;
            write_json(&d.join("space.json"), &inst.space)?;
            write_json(&d.join("action.json"), &inst.action)?;
        }
        for inst in &self.kac {
            let d = dir.join("kac").join(&inst.name);
            write_json(&d.join("group.json"), &inst.group)?;
            write_json(&d.join("graph.json"), &inst.graph)?;
            write_json(&d.join("action.json"), &inst.action)?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let mut graphs = Vec::new();
        for name in names(&dir.join("graphs"), true)? {
            let file: GraphFile = read_json(&dir.join("graphs").join(format!("{name}.json")))?;
            graphs.push((name, Graph::try_from(file)?));
        }
        let mut induction = Vec::new();
        for name in names(&dir.join("induction"), false)? {
            induction.push(InductionInstance::load(&dir.join("induction").join(name))?);
        }
        let mut kac = Vec::new();
        for name in names(&dir.join("kac"), false)? {
            kac.push(KacInstance::load(&dir.join("kac").join(name))?);
        }
        Ok(Self { graphs, induction, kac })
    }
}

/// Sorted entry names: `.json` stems when `files`, subdirectories otherwise.
fn names(dir: &Path, files: bool) -> Result<Vec<String>> {
    let mut out = BTreeSet::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if files && path.extension().is_some_and(|e| e == "json") {
            out.extend(path.file_stem().and_then(|s| s.to_str()).map(String::from));
        } else if !files && path.is_dir() {
            out.extend(path.file_name().and_then(|s| s.to_str()).map(String::from));
        }
    }
    Ok(out.into_iter().collect())
}

fn dir_name(dir: &Path) -> String {
    dir.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string()
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn petersen() -> Graph {
    let mut e: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
    e.extend((0..5).map(|i| (i, i + 5)));
    e.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
    Graph::new(10, &e).expect("petersen graph")
}

fn hyperbolic_graphs() -> Vec<(String, Graph)> {
    let wheel = {
        let mut e: Vec<(usize, usize)> = (1..=6).map(|i| (0, i)).collect();
        e.extend((1..=6).map(|i| (i, i % 6 + 1)));
        Graph::new(7, &e).expect("wheel")
    };
    // Three pentagons glued in a chain along single vertices, plus a pendant path.
    let pentagons = {
        let mut e = Vec::new();
        for k in 0..3 {
            let base = 4 * k;
            e.extend((0..5).map(|i| (base + i, base + (i + 1) % 5)));
        }
        e.extend([(12, 13), (13, 14), (14, 15)]);
        Graph::new(16, &e).expect("pentagon chain")
    };
    let ladder = Graph::path(6).box_product(&Graph::path(2));
    vec![
        ("cycle7".into(), Graph::cycle(7).expect("cycle")),
        ("cycle9".into(), Graph::cycle(9).expect("cycle")),
        ("petersen".into(), petersen()),
        ("wheel6".into(), wheel),
        ("pentagon_chain".into(), pentagons),
        ("ladder6".into(), ladder),
        ("grid4x4".into(), Graph::grid(4, 4)),
    ]
}

fn induction_instances() -> Vec<InductionInstance> {
    let rot3 = vec![1, 2, 0];
    let rot4 = vec![1, 2, 3, 0];
    let z6_on_triangle = InductionInstance {
        name: "z6_over_z3_triangle".into(),
        group: cyclic_file(6, vec![0, 2, 4], vec![2]),
        space: Graph::complete(3).to_file(),
        action: ActionFile {
            space: "z6_over_z3_triangle".into(),
            action: BTreeMap::from([("2".into(), rot3.clone())]),
            basepoint: 0,
        },
    };
    vec![
        InductionInstance::natural(
            "s3_over_a3_triangle",
            Graph::complete(3),
            &[vec![1, 0, 2], vec![0, 2, 1]],
            std::slice::from_ref(&rot3),
            is_even,
        ),
        InductionInstance::natural(
            "d4_over_z4_square",
            Graph::cycle(4).expect("cycle"),
            &[rot4.clone(), vec![0, 3, 2, 1]],
            &[rot4],
            // Rotations are the elements preserving the cyclic orientation.
            |p| (p[1] + 4 - p[0]) % 4 == 1,
        ),
        InductionInstance::natural(
            "s4_over_a4_tetrahedron",
            Graph::complete(4),
            &[vec![1, 0, 2, 3], vec![1, 2, 3, 0]],
            &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]],
            is_even,
        ),
        z6_on_triangle,
    ]
}

fn kac_instances() -> Vec<KacInstance> {
    // Z6 rotating the cycle factor of C6 x P3; the lattice is {0, 2, 4}.
    let graph = Graph::cycle(6).expect("cycle").box_product(&Graph::path(3));
    let rot: Vec<usize> = (0..18).map(|v| ((v / 3 + 1) % 6) * 3 + v % 3).collect();
    let prism = KacInstance {
        name: "z6_prism".into(),
        group: cyclic_file(6, vec![0, 2, 4], vec![2]),
        graph: graph.to_file(),
        action: ActionFile {
            space: "z6_prism".into(),
            action: BTreeMap::from([("1".into(), rot)]),
            basepoint: 0,
        },
    };
    let petersen = KacInstance {
        name: "petersen_trivial".into(),
        group: cyclic_file(1, vec![0], vec![]),
        graph: petersen().to_file(),
        action: ActionFile {
            space: "petersen_trivial".into(),
            action: BTreeMap::new(),
            basepoint: 0,
        },
    };
    vec![petersen, prism]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_match_the_known_sequence() {
        let known = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551];
        for (n, &count) in (1..=MAX_TREE_VERTICES).zip(&known) {
            let t = trees(n);
            assert_eq!(t.len(), count, "n = {n}");
            assert!(t.iter().all(|g| g.is_connected() && g.edge_count() == n - 1));
        }
    }

    #[test]
    fn builtin_instances_build() {
        let c = Corpus::builtin();
        for inst in &c.induction {
            let fga = inst.build().unwrap();
            assert!(fga.group.order() <= 48);
        }
        for inst in &c.kac {
            inst.build().unwrap();
        }
        let prism = c.kac[1].build().unwrap();
        assert_eq!(prism.quotient_classes().1, 6);
    }

    #[test]
    fn corpus_round_trips_through_files() {
        let dir = std::env::temp_dir().join(format!("lattice-median-corpus-{}", std::process::id()));
        let c = Corpus::builtin();
        c.write(&dir).unwrap();
        let back = Corpus::load(&dir).unwrap();
        fs::remove_dir_all(&dir).ok();
        let mut sorted = c.clone();
        sorted.graphs.sort_by(|a, b| a.0.cmp(&b.0));
        sorted.induction.sort_by(|a, b| a.name.cmp(&b.name));
        sorted.kac.sort_by(|a, b| a.name.cmp(&b.name));
        assert_eq!(back, sorted);
    }
}
