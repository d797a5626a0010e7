//! Cayley graphs `Cay(G,S)` with adjacency generated on the fly: the
//! neighbours of `x` are `x·s` for `s ∈ S`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::par::{self, AtomicBitSet};

/// Default vertex cap for DOT export.
pub const DEFAULT_DOT_CAP: usize = 5000;
/// Per-component diameters are reported up to this many vertices.
pub const DIAMETER_LIMIT: usize = 10_000;

const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct CayleyGraph {
    group: Group,
    connection: Vec<usize>,
}

/// Validates `1 ∉ S` and `S = S^-1`.
pub fn build_cayley(group: &Group, connection: &[usize], max_order: u64) -> Result<CayleyGraph> {
    if group.order() as u64 > max_order {
        return Err(Error::OrderCap {
            order: group.order().to_string(),
            cap: max_order,
        });
    }
    let mut s = connection.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&bad) = s.iter().find(|&&x| x >= group.order()) {
        return Err(Error::ConnectionSet(format!(
            "{bad} is not an element of {}",
            group.name()
        )));
    }
    if s.binary_search(&group.identity()).is_ok() {
        return Err(Error::ConnectionSet("contains the identity".into()));
    }
    if let Some(&x) = s.iter().find(|&&x| s.binary_search(&group.inv(x)).is_err()) {
        return Err(Error::ConnectionSet(format!(
            "not symmetric: inverse of {} missing",
            group.format_element(x)
        )));
    }
    Ok(CayleyGraph {
        group: group.clone(),
        connection: s,
    })
}

/// Vertex partition into connected components, numbered in order of their
/// smallest vertex.
#[derive(Debug, Clone)]
pub struct Components {
    labels: Vec<u32>,
    sizes: Vec<usize>,
    roots: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    /// Smallest vertex of each component.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn equal_sizes(&self) -> bool {
        self.sizes.windows(2).all(|w| w[0] == w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub components: usize,
    pub sizes: Vec<usize>,
    /// `None` above [`DIAMETER_LIMIT`] vertices.
    pub diameters: Option<Vec<usize>>,
}

impl CayleyGraph {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn connection(&self) -> &[usize] {
        &self.connection
    }

    pub fn vertex_count(&self) -> usize {
        self.group.order()
    }

    pub fn degree(&self) -> usize {
        self.connection.len()
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_count() * self.degree() / 2
    }

    pub fn neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.connection.iter().map(move |&s| self.group.mul(x, s))
    }

    pub fn is_adjacent(&self, x: usize, y: usize) -> bool {
        self.connection
            .binary_search(&self.group.mul(self.group.inv(x), y))
            .is_ok()
    }

    /// Level-synchronous BFS from `start` over the vertices not yet in
    /// `seen`; calls `visit(v, level)` for each vertex reached. Returns the
    /// number reached and the last level.
    fn bfs(&self, start: usize, seen: &AtomicBitSet, mut visit: impl FnMut(usize, u32)) -> (usize, u32) {
        seen.insert(start);
        visit(start, 0);
        let mut frontier = vec![start];
        let (mut reached, mut level) = (1, 0);
        loop {
            let next = par::expand_level(&frontier, &self.connection, seen, |x, s| self.group.mul(x, s));
            if next.is_empty() {
                return (reached, level);
            }
            level += 1;
            reached += next.len();
            for &y in &next {
                visit(y, level);
            }
            frontier = next;
        }
    }

    /// BFS distance of every vertex from `start`; `None` when unreachable.
    pub fn distances_from(&self, start: usize) -> Vec<Option<usize>> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        self.bfs(start, &AtomicBitSet::new(self.vertex_count()), |v, d| dist[v] = d);
        dist.into_iter()
            .map(|d| (d != UNREACHED).then_some(d as usize))
            .collect()
    }

    /// Minimal word length of `x` over `S`.
    pub fn distance_from_identity(&self, x: usize) -> Option<usize> {
        self.distances_from(self.group.identity())[x]
    }

    pub fn connected_components(&self) -> Components {
        let n = self.vertex_count();
        let seen = AtomicBitSet::new(n);
        let mut labels = vec![u32::MAX; n];
        let (mut sizes, mut roots) = (Vec::new(), Vec::new());
        for v in 0..n {
            if seen.contains(v) {
                continue;
            }
            let label = sizes.len() as u32;
            let (size, _) = self.bfs(v, &seen, |y, _| labels[y] = label);
            sizes.push(size);
            roots.push(v);
        }
        Components { labels, sizes, roots }
    }

    /// Shortest word over `S` whose product is `x`; the lexicographically
    /// least by position in `S` among shortest words ending in each letter.
    pub fn shortest_word(&self, x: usize) -> Option<Vec<usize>> {
        let dist = self.distances_from(self.group.identity());
        let mut d = dist[x]?;
        let mut word = Vec::with_capacity(d);
        let mut cur = x;
        while d > 0 {
            let (prev, s) = self
                .connection
                .iter()
                .map(|&s| (self.group.mul(cur, self.group.inv(s)), s))
                .find(|&(y, _)| dist[y] == Some(d - 1))
                .expect("BFS predecessor exists");
            word.push(s);
            cur = prev;
            d -= 1;
        }
        word.reverse();
        Some(word)
    }

    /// Prefix products `[1, x_1, x_1x_2, …]`.
    pub fn factorization_to_path(&self, word: &[usize]) -> Result<Vec<usize>> {
        let mut path = Vec::with_capacity(word.len() + 1);
        let mut cur = self.group.identity();
        path.push(cur);
        for &s in word {
            if self.connection.binary_search(&s).is_err() {
                return Err(Error::InvalidPath(format!(
                    "letter {} is not in the connection set",
                    self.group.format_element(s)
                )));
            }
            cur = self.group.mul(cur, s);
            path.push(cur);
        }
        Ok(path)
    }

    /// Letters `x_{i-1}^-1 x_i` of a path starting at the identity.
    pub fn path_to_factorization(&self, path: &[usize]) -> Result<Vec<usize>> {
        match path.first() {
            Some(&v) if v == self.group.identity() => {}
            _ => return Err(Error::InvalidPath("path must start at the identity".into())),
        }
        path.windows(2)
            .map(|w| {
                let s = self.group.mul(self.group.inv(w[0]), w[1]);
                if self.connection.binary_search(&s).is_ok() {
                    Ok(s)
                } else {
                    Err(Error::InvalidPath(format!(
                        "{} and {} are not adjacent",
                        self.group.format_element(w[0]),
                        self.group.format_element(w[1])
                    )))
                }
            })
            .collect()
    }

    pub fn summary(&self) -> ComponentSummary {
        let comps = self.connected_components();
        let diameters = (self.vertex_count() <= DIAMETER_LIMIT).then(|| {
            // Cayley graphs are vertex-transitive: every vertex of a
            // component has the same eccentricity.
            let n = self.vertex_count();
            comps
                .roots()
                .iter()
                .map(|&r| self.bfs(r, &AtomicBitSet::new(n), |_, _| {}).1 as usize)
                .collect()
        });
        ComponentSummary {
            components: comps.count(),
            sizes: comps.sizes().to_vec(),
            diameters,
        }
    }

    /// Undirected DOT, one edge per unordered pair, in vertex-id order.
    pub fn export_dot<W: Write>(&self, mut sink: W, cap: usize) -> Result<()> {
        if self.vertex_count() > cap {
            return Err(Error::ExportCap {
                vertices: self.vertex_count(),
                cap,
            });
        }
        let label = |v: usize| self.group.format_element(v);
        writeln!(sink, "graph cayley {{")?;
        for v in 0..self.vertex_count() {
            writeln!(sink, "  \"{}\";", label(v))?;
        }
        for x in 0..self.vertex_count() {
            let mut ys: Vec<usize> = self.neighbors(x).filter(|&y| y > x).collect();
            ys.sort_unstable();
            for y in ys {
                writeln!(sink, "  \"{}\" -- \"{}\";", label(x), label(y))?;
            }
        }
        writeln!(sink, "}}")?;
        Ok(())
    }
}
