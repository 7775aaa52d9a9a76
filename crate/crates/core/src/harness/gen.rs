//! Seeded synthetic fixtures with planted attribute-cohesive communities.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, GraphBuilder, NodeId};
use crate::rng;

/// A random background graph with dense, attribute-homogeneous clusters.
///
/// Each cluster is a clique of `clique` nodes plus `extra` nodes linked to
/// `extra_links` clique members. The query of a cluster sits at its attribute
/// center; other members share three of its four tokens and scatter around
/// the center with standard deviation `sigma_attr` per numeric dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantedConfig {
    pub seed: u64,
    pub nodes: usize,
    /// Expected average degree of the background G(n, p).
    pub background_degree: f64,
    pub clusters: usize,
    pub clique: usize,
    pub extra: usize,
    pub extra_links: usize,
    pub sigma_attr: f64,
    pub numeric_dim: usize,
    pub vocabulary: usize,
    pub background_tokens: usize,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            seed: 1,
            nodes: 1000,
            background_degree: 2.0,
            clusters: 4,
            clique: 8,
            extra: 2,
            extra_links: 4,
            sigma_attr: 0.01,
            numeric_dim: 3,
            vocabulary: 40,
            background_tokens: 3,
        }
    }
}

impl PlantedConfig {
    pub fn validate(&self) -> Result<()> {
        let cluster = self.clique + self.extra;
        if self.clique < 2 {
            return Err(Error::Config("clique must have at least 2 nodes".into()));
        }
        if self.extra > 0 && (self.extra_links == 0 || self.extra_links > self.clique) {
            return Err(Error::Config("extra_links must lie in [1, clique]".into()));
        }
        if self.clusters * cluster > self.nodes {
            return Err(Error::Config(format!(
                "{} clusters of {cluster} nodes do not fit in {} nodes",
                self.clusters, self.nodes
            )));
        }
        if self.background_degree < 0.0 || self.sigma_attr < 0.0 {
            return Err(Error::Config(
                "degrees and spreads must be non-negative".into(),
            ));
        }
        if self.vocabulary < self.background_tokens {
            return Err(Error::Config(
                "vocabulary smaller than background_tokens".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub graph: AttributedGraph,
    /// One query node per planted cluster.
    pub queries: Vec<NodeId>,
    edges: Vec<(String, String, Option<String>)>,
    attrs: Vec<(String, Vec<String>, Vec<f64>)>,
    types: Vec<(String, String)>,
}

impl Fixture {
    /// Writes `edges.tsv`, `attrs.tsv`, `queries.txt` and, for typed
    /// fixtures, `types.tsv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut f = fs::File::create(dir.join("edges.tsv"))?;
        for (u, v, t) in &self.edges {
            match t {
                Some(t) => writeln!(f, "{u}\t{v}\t{t}")?,
                None => writeln!(f, "{u}\t{v}")?,
            }
        }
        let mut f = fs::File::create(dir.join("attrs.tsv"))?;
        for (name, tokens, values) in &self.attrs {
            let values: Vec<String> = values.iter().map(|x| format!("{x}")).collect();
            writeln!(f, "{name}\t{}\t{}", tokens.join(","), values.join(","))?;
        }
        if !self.types.is_empty() {
            let mut f = fs::File::create(dir.join("types.tsv"))?;
            for (name, ty) in &self.types {
                writeln!(f, "{name}\t{ty}")?;
            }
        }
        let mut f = fs::File::create(dir.join("queries.txt"))?;
        for &q in &self.queries {
            writeln!(f, "{}", self.graph.name(q))?;
        }
        Ok(())
    }

    fn build(
        edges: Vec<(String, String, Option<String>)>,
        attrs: Vec<(String, Vec<String>, Vec<f64>)>,
        types: Vec<(String, String)>,
        query_names: &[String],
    ) -> Result<Fixture> {
        let mut b = GraphBuilder::new();
        for (u, v, t) in &edges {
            match t {
                Some(t) => b.typed_edge(u, v, t),
                None => b.edge(u, v),
            }
        }
        for (name, tokens, values) in &attrs {
            b.attributes(name, tokens.iter().map(String::as_str), values)?;
        }
        for (name, ty) in &types {
            b.node_type(name, ty);
        }
        let (graph, _) = b.build()?;
        let queries = query_names
            .iter()
            .map(|n| graph.id(n).expect("query names are nodes"))
            .collect();
        Ok(Fixture {
            graph,
            queries,
            edges,
            attrs,
            types,
        })
    }
}

fn background_edges(n: usize, degree: f64, rng: &mut rng::Rng) -> Vec<(usize, usize)> {
    if n < 2 || degree <= 0.0 {
        return Vec::new();
    }
    let p = (degree / (n - 1) as f64).min(1.0);
    let mut edges = Vec::new();
    // Geometric skipping over the n(n-1)/2 pairs.
    let log_q = (1.0 - p).ln();
    let (mut u, mut v) = (0usize, 0usize);
    loop {
        let r: f64 = rng.random();
        let skip = if p >= 1.0 {
            0
        } else {
            ((1.0 - r).ln() / log_q).floor() as usize
        };
        v += 1 + skip;
        while v >= n && u < n {
            u += 1;
            v = v - n + u + 1;
        }
        if u >= n - 1 {
            break;
        }
        edges.push((u, v));
    }
    edges
}

pub fn planted_fixture(config: &PlantedConfig) -> Result<Fixture> {
    config.validate()?;
    let mut rng = rng::stream(config.seed, &[0x6e6]);
    let n = config.nodes;
    let name = |i: usize| format!("n{i}");
    let noise = Normal::new(0.0, config.sigma_attr.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Config(e.to_string()))?;

    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(&mut rng);
    let cluster_size = config.clique + config.extra;
    let mut owner = vec![None; n];
    let mut clusters = Vec::new();
    for c in 0..config.clusters {
        let members = ids[c * cluster_size..(c + 1) * cluster_size].to_vec();
        for &m in &members {
            owner[m] = Some(c);
        }
        clusters.push(members);
    }

    let mut attrs = Vec::with_capacity(n);
    let mut center = vec![Vec::new(); config.clusters];
    for (c, members) in clusters.iter().enumerate() {
        center[c] = (0..config.numeric_dim)
            .map(|_| rng.random_range(0.2..0.8))
            .collect();
        for (i, &m) in members.iter().enumerate() {
            let mut tokens: Vec<String> = (0..3).map(|t| format!("c{c}_{t}")).collect();
            let values = if i == 0 {
                tokens.push(format!("c{c}_3"));
                center[c].clone()
            } else {
                tokens.push(format!("c{c}_u{i}"));
                center[c]
                    .iter()
                    .map(|&x| (x + noise.sample(&mut rng)).clamp(0.0, 1.0))
                    .collect()
            };
            attrs.push((m, tokens, values));
        }
    }
    for (v, o) in owner.iter().enumerate() {
        if o.is_none() {
            let mut vocab: Vec<usize> = (0..config.vocabulary).collect();
            let (chosen, _) = vocab.partial_shuffle(&mut rng, config.background_tokens);
            let tokens = chosen.iter().map(|t| format!("w{t}")).collect();
            let values = (0..config.numeric_dim)
                .map(|_| rng.random::<f64>())
                .collect();
            attrs.push((v, tokens, values));
        }
    }
    attrs.sort_by_key(|a| a.0);

    // Clusters stay apart: a single edge between two cliques would merge
    // their cores.
    let mut edges: Vec<(usize, usize)> = background_edges(n, config.background_degree, &mut rng)
        .into_iter()
        .filter(|&(u, v)| owner[u].is_none() || owner[v].is_none() || owner[u] == owner[v])
        .collect();
    for members in &clusters {
        let (core, extra) = members.split_at(config.clique);
        for i in 0..core.len() {
            for j in i + 1..core.len() {
                edges.push((core[i], core[j]));
            }
        }
        for &x in extra {
            let mut targets = core.to_vec();
            let (chosen, _) = targets.partial_shuffle(&mut rng, config.extra_links);
            for &t in chosen.iter() {
                edges.push((x, t));
            }
        }
    }
    // Every node gets at least one edge so that the edge file names it.
    let mut touched = vec![false; n];
    for &(u, v) in &edges {
        touched[u] = true;
        touched[v] = true;
    }
    for (v, &hit) in touched.iter().enumerate() {
        if !hit && n > 1 {
            let mut w = rng.random_range(0..n - 1);
            if w >= v {
                w += 1;
            }
            edges.push((v, w));
        }
    }

    let queries: Vec<String> = clusters.iter().map(|m| name(m[0])).collect();
    Fixture::build(
        edges
            .into_iter()
            .map(|(u, v)| (name(u), name(v), None))
            .collect(),
        attrs.into_iter().map(|(v, t, x)| (name(v), t, x)).collect(),
        Vec::new(),
        &queries,
    )
}

/// A bibliographic-style typed graph: authors (`A`) write papers (`P`) and
/// papers appear at venues (`V`). Each planted group of authors co-writes
/// many papers; the group's first author is its query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TypedConfig {
    pub seed: u64,
    pub authors: usize,
    pub papers: usize,
    pub venues: usize,
    pub authors_per_paper: usize,
    pub groups: usize,
    pub group_size: usize,
    pub group_papers: usize,
    pub sigma_attr: f64,
}

impl Default for TypedConfig {
    fn default() -> Self {
        TypedConfig {
            seed: 1,
            authors: 60,
            papers: 80,
            venues: 5,
            authors_per_paper: 2,
            groups: 2,
            group_size: 6,
            group_papers: 12,
            sigma_attr: 0.05,
        }
    }
}

pub fn typed_fixture(config: &TypedConfig) -> Result<Fixture> {
    if config.groups * config.group_size > config.authors || config.authors_per_paper < 2 {
        return Err(Error::Config("typed fixture parameters do not fit".into()));
    }
    if config.groups * config.group_papers > config.papers || config.venues == 0 {
        return Err(Error::Config("typed fixture parameters do not fit".into()));
    }
    let mut rng = rng::stream(config.seed, &[0x7e9]);
    let noise = Normal::new(0.0, config.sigma_attr.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Config(e.to_string()))?;
    let author = |i: usize| format!("a{i}");
    let paper = |i: usize| format!("p{i}");
    let venue = |i: usize| format!("v{i}");

    let mut attrs = Vec::new();
    let mut types = Vec::new();
    for g in 0..config.groups {
        let center: f64 = rng.random_range(0.2..0.8);
        for i in 0..config.group_size {
            let a = g * config.group_size + i;
            let tokens = vec![format!("g{g}"), format!("t{}", rng.random_range(0..4))];
            let x = if i == 0 {
                center
            } else {
                (center + noise.sample(&mut rng)).clamp(0.0, 1.0)
            };
            attrs.push((author(a), tokens, vec![x, rng.random::<f64>()]));
        }
    }
    for a in config.groups * config.group_size..config.authors {
        let tokens = vec![
            format!("t{}", rng.random_range(0..4)),
            format!("w{}", rng.random_range(0..10)),
        ];
        attrs.push((
            author(a),
            tokens,
            vec![rng.random::<f64>(), rng.random::<f64>()],
        ));
    }
    for a in 0..config.authors {
        types.push((author(a), "A".to_string()));
    }
    for p in 0..config.papers {
        attrs.push((paper(p), vec!["paper".into()], vec![0.5, 0.5]));
        types.push((paper(p), "P".to_string()));
    }
    for v in 0..config.venues {
        attrs.push((venue(v), vec!["venue".into()], vec![0.5, 0.5]));
        types.push((venue(v), "V".to_string()));
    }

    let mut edges = Vec::new();
    let mut p = 0;
    for g in 0..config.groups {
        let members: Vec<usize> = (0..config.group_size)
            .map(|i| g * config.group_size + i)
            .collect();
        for _ in 0..config.group_papers {
            let mut m = members.clone();
            let k = config.authors_per_paper.clamp(2, m.len());
            let (chosen, _) = m.partial_shuffle(&mut rng, k);
            for &a in chosen.iter() {
                edges.push((author(a), paper(p), Some("writes".to_string())));
            }
            p += 1;
        }
    }
    let mut pool: Vec<usize> = (0..config.authors).collect();
    while p < config.papers {
        let (chosen, _) = pool.partial_shuffle(&mut rng, config.authors_per_paper);
        for &a in chosen.iter() {
            edges.push((author(a), paper(p), Some("writes".to_string())));
        }
        p += 1;
    }
    for p in 0..config.papers {
        let v = rng.random_range(0..config.venues);
        edges.push((paper(p), venue(v), Some("at".to_string())));
    }
    let queries: Vec<String> = (0..config.groups)
        .map(|g| author(g * config.group_size))
        .collect();
    Fixture::build(edges, attrs, types, &queries)
}

/// The `attrcs gen` file: an output directory and exactly one generator.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub out: PathBuf,
    pub planted: Option<PlantedConfig>,
    pub typed: Option<TypedConfig>,
}

impl GenConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut c: GenConfig = toml::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("gen config: {e}")))?;
        if c.out.is_relative() {
            c.out = path.parent().unwrap_or(Path::new(".")).join(&c.out);
        }
        Ok(c)
    }

    pub fn generate(&self) -> Result<Fixture> {
        match (&self.planted, &self.typed) {
            (Some(p), None) => planted_fixture(p),
            (None, Some(t)) => typed_fixture(t),
            _ => Err(Error::Config(
                "gen config needs exactly one of [planted] or [typed]".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn background_degree_is_close() {
        let mut rng = rng::stream(3, &[]);
        let edges = background_edges(2000, 4.0, &mut rng);
        let avg = 2.0 * edges.len() as f64 / 2000.0;
        assert!((avg - 4.0).abs() < 0.3, "{avg}");
        assert!(edges.iter().all(|&(u, v)| u < v && v < 2000));
    }

    #[test]
    fn planted_is_seeded() {
        let c = PlantedConfig {
            nodes: 200,
            clusters: 2,
            ..Default::default()
        };
        let a = planted_fixture(&c).unwrap();
        let b = planted_fixture(&c).unwrap();
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.queries.len(), 2);
        for &q in &a.queries {
            assert!(a.graph.degree(q) >= c.clique - 1);
        }
    }

    #[test]
    fn typed_fixture_has_types() {
        let f = typed_fixture(&TypedConfig::default()).unwrap();
        assert!(f.graph.is_heterogeneous());
        let a = f.graph.node_type_id("A").unwrap();
        assert_eq!(f.graph.count_of_type(a), 60);
    }

    #[test]
    fn write_round_trip() {
        let c = PlantedConfig {
            nodes: 60,
            clusters: 1,
            ..Default::default()
        };
        let f = planted_fixture(&c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        f.write(dir.path()).unwrap();
        let (g, _) = crate::graph::load_graph_files(
            &dir.path().join("edges.tsv"),
            Some(&dir.path().join("attrs.tsv")),
            None,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(g.node_count(), f.graph.node_count());
        assert_eq!(g.edge_count(), f.graph.edge_count());
        let q = f.graph.name(f.queries[0]);
        let (a, b) = (g.id(q).unwrap(), f.queries[0]);
        assert_eq!(g.numeric(a), f.graph.numeric(b));
    }
}
