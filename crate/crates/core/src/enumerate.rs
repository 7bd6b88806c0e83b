//! Exhaustive generation of comparative probability orders with
//! `{1} ≺ {2} ≺ … ≺ {n}`, their flip graph and census statistics.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::fibonacci;
use crate::cone::{cone_from_order, irreducible_elements};
use crate::error::{Error, Result};
use crate::flips::{bottom_pair_flippable, neighbors_with_pairs};
use crate::order::{validate_order, ComparativeOrder};
use crate::represent::is_representable;
use crate::subset::full_mask;

/// Largest atom count accepted by [`enumerate_orders`].
pub const MAX_ENUMERATION_ATOMS: usize = 6;

/// An edge of the flip graph, stored against canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipEdge {
    pub target: usize,
    /// The flipped pair `(A, B)` in the source order.
    pub lower: u32,
    pub upper: u32,
    /// Atom `i` of the raw flipped order is atom `relabel[i - 1]` of the
    /// target. Identity when the flip stays canonical.
    pub relabel: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct OrderCensus {
    pub n: usize,
    pub orders: Vec<ComparativeOrder>,
    pub representable: Vec<bool>,
    pub irr_counts: Vec<usize>,
    pub flip_edges: Vec<Vec<FlipEdge>>,
}

/// Forward-only enumeration of ranked prefixes.
struct Enumerator {
    n: usize,
    size: usize,
    ranked: Vec<u32>,
    placed: Vec<bool>,
    /// `known[plus << n | minus]`: `minus ≺ plus` is forced.
    known: Vec<bool>,
    log: Vec<usize>,
    deadline: Option<Instant>,
    nodes: u64,
    out: Vec<Vec<u32>>,
}

impl Enumerator {
    fn key(&self, plus: u32, minus: u32) -> usize {
        ((plus as usize) << self.n) | minus as usize
    }

    /// Records `lower ≺ upper` in reduced form. False on contradiction.
    fn assert_below(&mut self, lower: u32, upper: u32) -> bool {
        let (minus, plus) = (lower & !upper, upper & !lower);
        if self.known[self.key(minus, plus)] {
            return false;
        }
        let k = self.key(plus, minus);
        if !self.known[k] {
            self.known[k] = true;
            self.log.push(k);
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let k = self.log.pop().unwrap();
            self.known[k] = false;
        }
    }

    /// Places `s` next; every unplaced set must then lie above it.
    fn place(&mut self, s: u32) -> bool {
        for y in 0..self.size as u32 {
            if y != s && !self.placed[y as usize] && !self.assert_below(s, y) {
                return false;
            }
        }
        self.placed[s as usize] = true;
        self.ranked.push(s);
        true
    }

    fn unplace(&mut self, s: u32) {
        self.placed[s as usize] = false;
        self.ranked.pop();
    }

    fn candidates(&self) -> Vec<u32> {
        (1..self.size as u32)
            .filter(|&s| {
                !self.placed[s as usize]
                    && (0..self.n).all(|i| s >> i & 1 == 0 || self.placed[(s & !(1 << i)) as usize])
            })
            .collect()
    }

    fn run(&mut self) -> Result<()> {
        if self.ranked.len() == self.size {
            self.out.push(self.ranked.clone());
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(Error::Resource {
                        completed: self.out.len(),
                    });
                }
            }
        }
        for s in self.candidates() {
            let mark = self.log.len();
            if self.place(s) {
                self.run()?;
                self.unplace(s);
            }
            self.undo_to(mark);
        }
        Ok(())
    }
}

/// Every order in `P_n^*`, in depth-first order (smallest mask first).
pub fn enumerate_rankings(n: usize, budget: Option<Duration>) -> Result<Vec<ComparativeOrder>> {
    if !(1..=MAX_ENUMERATION_ATOMS).contains(&n) {
        return Err(Error::AtomCount(n));
    }
    let size = 1usize << n;
    let mut e = Enumerator {
        n,
        size,
        ranked: Vec::with_capacity(size),
        placed: vec![false; size],
        known: vec![false; size * size],
        log: Vec::new(),
        deadline: budget.map(|b| Instant::now() + b),
        nodes: 0,
        out: Vec::new(),
    };
    for i in 1..n {
        e.assert_below(1 << (i - 1), 1 << i);
    }
    assert!(e.place(0));
    e.run()?;
    Ok(e.out
        .into_iter()
        .map(|r| ComparativeOrder::from_ranked_unchecked(n, r))
        .collect())
}

/// Atom relabelling that sorts singletons by rank, or `None` if already sorted.
pub fn canonical_relabel(o: &ComparativeOrder) -> Option<Vec<usize>> {
    let n = o.n();
    let mut atoms: Vec<usize> = (1..=n).collect();
    atoms.sort_by_key(|&a| o.rank_of_mask(1 << (a - 1)));
    if atoms.iter().enumerate().all(|(i, &a)| a == i + 1) {
        return None;
    }
    let mut perm = vec![0; n];
    for (new, &old) in atoms.iter().enumerate() {
        perm[old - 1] = new + 1;
    }
    Some(perm)
}

pub fn is_canonical(o: &ComparativeOrder) -> bool {
    o.ranked_masks()[0] == 0 && canonical_relabel(o).is_none()
}

fn irreducible_count(o: &ComparativeOrder) -> usize {
    irreducible_elements(&cone_from_order(o).expect("census orders are valid")).len()
}

/// Per-order data of a census record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Flags {
    representable: bool,
    irr: usize,
}

fn analyse(o: &ComparativeOrder) -> Flags {
    Flags {
        representable: is_representable(o).is_representable(),
        irr: irreducible_count(o),
    }
}

impl OrderCensus {
    fn assemble(n: usize, orders: Vec<ComparativeOrder>, flags: Vec<Flags>) -> Result<Self> {
        let index: HashMap<&[u32], usize> = orders
            .iter()
            .enumerate()
            .map(|(i, o)| (o.ranked_masks(), i))
            .collect();
        if index.len() != orders.len() {
            return Err(Error::Verification("duplicate orders in census".into()));
        }
        let flip_edges = orders
            .par_iter()
            .map(|o| {
                neighbors_with_pairs(o)
                    .into_iter()
                    .map(|(p, raw)| {
                        let relabel = canonical_relabel(&raw);
                        let canon = match &relabel {
                            Some(perm) => raw.relabel(perm),
                            None => raw,
                        };
                        let target = *index.get(canon.ranked_masks()).ok_or_else(|| {
                            Error::Verification(format!("flip of {:?} leaves the census", o))
                        })?;
                        Ok(FlipEdge {
                            target,
                            lower: p.a().mask(),
                            upper: p.b().mask(),
                            relabel: relabel.unwrap_or_else(|| (1..=n).collect()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OrderCensus {
            n,
            representable: flags.iter().map(|f| f.representable).collect(),
            irr_counts: flags.iter().map(|f| f.irr).collect(),
            orders,
            flip_edges,
        })
    }

    fn from_orders(n: usize, orders: Vec<ComparativeOrder>) -> Result<Self> {
        let flags = orders.par_iter().map(analyse).collect();
        Self::assemble(n, orders, flags)
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn index_of(&self, o: &ComparativeOrder) -> Option<usize> {
        self.orders.iter().position(|x| x == o)
    }

    /// Facet count of every representable order, read off the flip graph.
    pub fn facet_counts(&self) -> Vec<Option<usize>> {
        (0..self.len())
            .map(|i| {
                self.representable[i].then(|| {
                    let friendly = self.flip_edges[i]
                        .iter()
                        .filter(|e| self.representable[e.target])
                        .count();
                    friendly + usize::from(bottom_pair_flippable(&self.orders[i]))
                })
            })
            .collect()
    }

    /// Each edge has a reverse edge after canonicalisation.
    pub fn edges_symmetric(&self) -> bool {
        (0..self.len()).all(|i| {
            self.flip_edges[i]
                .iter()
                .all(|e| self.flip_edges[e.target].iter().any(|b| b.target == i))
        })
    }

    fn connected(&self, keep: impl Fn(usize) -> bool) -> bool {
        let nodes: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        let Some(&start) = nodes.first() else {
            return true;
        };
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(i) = queue.pop_front() {
            for e in &self.flip_edges[i] {
                if keep(e.target) && !seen[e.target] {
                    seen[e.target] = true;
                    reached += 1;
                    queue.push_back(e.target);
                }
            }
        }
        reached == nodes.len()
    }
}

/// Enumerates `P_n^*` and analyses each order.
pub fn enumerate_orders(n: usize, budget: Option<Duration>) -> Result<OrderCensus> {
    let deadline = budget.map(|b| Instant::now() + b);
    let orders = enumerate_rankings(n, budget)?;
    let mut flags = Vec::with_capacity(orders.len());
    for chunk in orders.chunks(1024) {
        if deadline.is_some_and(|d| Instant::now() > d) {
            return Err(Error::Resource {
                completed: flags.len(),
            });
        }
        flags.par_extend(chunk.par_iter().map(analyse));
    }
    OrderCensus::assemble(n, orders, flags)
}

/// Filters every permutation of the `2^n` subsets; `n ≤ 3`.
pub fn brute_force_oracle(n: usize) -> Result<OrderCensus> {
    if !(1..=3).contains(&n) {
        return Err(Error::AtomCount(n));
    }
    let size = 1u32 << n;
    let orders: Vec<ComparativeOrder> = (0..size)
        .permutations(size as usize)
        .map(|perm| ComparativeOrder::from_ranked_unchecked(n, perm))
        .filter(|o| validate_order(o).is_valid() && is_canonical(o))
        .collect();
    OrderCensus::from_orders(n, orders)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusStats {
    pub n: usize,
    pub orders: usize,
    pub representable: usize,
    pub irr_histogram: BTreeMap<usize, usize>,
    pub min_irr: usize,
    pub max_irr: usize,
    /// Largest `|Irr|` over representable orders.
    pub m: usize,
    /// Largest facet count over representable orders.
    pub facets_max: usize,
    pub facets_min: usize,
    pub min_irr_nonrepresentable: Option<usize>,
    /// Orders attaining `max_irr` are all representable with friendly flips.
    pub max_irr_orders_friendly: bool,
    pub edges: usize,
    pub edges_symmetric: bool,
    pub graph_connected: bool,
    pub representable_subgraph_connected: bool,
    /// `F_{n+1}`.
    pub fibonacci: String,
    /// `CONSISTENT` when `m = facets_max = F_{n+1}`.
    pub searles: String,
}

pub fn census_stats(c: &OrderCensus) -> CensusStats {
    let mut hist = BTreeMap::new();
    for &k in &c.irr_counts {
        *hist.entry(k).or_insert(0) += 1;
    }
    let max_irr = c.irr_counts.iter().copied().max().unwrap_or(0);
    let rep = |i: usize| c.representable[i];
    let m = (0..c.len())
        .filter(|&i| rep(i))
        .map(|i| c.irr_counts[i])
        .max()
        .unwrap_or(0);
    let facets: Vec<usize> = c.facet_counts().into_iter().flatten().collect();
    let facets_max = facets.iter().copied().max().unwrap_or(0);
    let fib = fibonacci(c.n + 1);
    let consistent = fib == m.into() && fib == facets_max.into();
    CensusStats {
        n: c.n,
        orders: c.len(),
        representable: c.representable.iter().filter(|&&r| r).count(),
        irr_histogram: hist,
        min_irr: c.irr_counts.iter().copied().min().unwrap_or(0),
        max_irr,
        m,
        facets_max,
        facets_min: facets.iter().copied().min().unwrap_or(0),
        min_irr_nonrepresentable: (0..c.len())
            .filter(|&i| !rep(i))
            .map(|i| c.irr_counts[i])
            .min(),
        max_irr_orders_friendly: (0..c.len())
            .filter(|&i| c.irr_counts[i] == max_irr)
            .all(|i| rep(i) && c.flip_edges[i].iter().all(|e| rep(e.target))),
        edges: c.flip_edges.iter().map(Vec::len).sum(),
        edges_symmetric: c.edges_symmetric(),
        graph_connected: c.connected(|_| true),
        representable_subgraph_connected: c.connected(rep),
        fibonacci: fib.to_string(),
        searles: if consistent {
            "CONSISTENT"
        } else {
            "INCONSISTENT"
        }
        .into(),
    }
}

/// One NDJSON census line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: usize,
    pub order: String,
    pub representable: bool,
    pub irr: usize,
}

impl OrderCensus {
    pub fn records(&self) -> Vec<CensusRecord> {
        (0..self.len())
            .map(|i| CensusRecord {
                n: self.n,
                order: self.orders[i].to_line(),
                representable: self.representable[i],
                irr: self.irr_counts[i],
            })
            .collect()
    }

    pub fn write_ndjson(&self, mut w: impl Write) -> Result<()> {
        for r in self.records() {
            writeln!(
                w,
                "{}",
                serde_json::to_string(&r).expect("record serialises")
            )?;
        }
        Ok(())
    }

    /// Rebuilds a census from NDJSON records, recomputing the flip graph.
    pub fn read_ndjson(r: impl BufRead) -> Result<Self> {
        let mut n = None;
        let mut orders = Vec::new();
        let mut flags = Vec::new();
        for line in r.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CensusRecord =
                serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?;
            if *n.get_or_insert(rec.n) != rec.n {
                return Err(Error::Parse("mixed atom counts in census".into()));
            }
            orders.push(ComparativeOrder::parse_line(rec.n, &rec.order)?);
            flags.push(Flags {
                representable: rec.representable,
                irr: rec.irr,
            });
        }
        let n = n.ok_or_else(|| Error::Parse("empty census".into()))?;
        Self::assemble(n, orders, flags)
    }
}

/// Enumerates into an NDJSON file, resuming after any complete records
/// already present. Stops with [`Error::Resource`] once `budget` elapses.
pub fn enumerate_to_file(n: usize, path: &Path, budget: Option<Duration>) -> Result<usize> {
    let start = Instant::now();
    let orders = enumerate_rankings(n, budget)?;
    let done = match File::open(path) {
        Ok(f) => {
            let mut done = 0;
            for (line, o) in BufReader::new(f).lines().zip(&orders) {
                let rec: CensusRecord = match serde_json::from_str(&line?) {
                    Ok(r) => r,
                    Err(_) => break,
                };
                if rec.n != n || rec.order != o.to_line() {
                    return Err(Error::Parse(format!(
                        "checkpoint {} does not match the enumeration at record {done}",
                        path.display()
                    )));
                }
                done += 1;
            }
            done
        }
        Err(_) => 0,
    };
    // drop a trailing partial line before appending
    let kept: Vec<String> = match File::open(path) {
        Ok(f) => BufReader::new(f)
            .lines()
            .take(done)
            .collect::<std::io::Result<_>>()?,
        Err(_) => Vec::new(),
    };
    let mut file = File::create(path)?;
    for l in &kept {
        writeln!(file, "{l}")?;
    }
    drop(file);
    let mut w = BufWriter::new(OpenOptions::new().append(true).open(path)?);
    const CHUNK: usize = 256;
    let mut completed = done;
    for chunk in orders[done..].chunks(CHUNK) {
        if let Some(b) = budget {
            if start.elapsed() > b {
                w.flush()?;
                return Err(Error::Resource { completed });
            }
        }
        let flags: Vec<Flags> = chunk.par_iter().map(analyse).collect();
        for (o, f) in chunk.iter().zip(flags) {
            let rec = CensusRecord {
                n,
                order: o.to_line(),
                representable: f.representable,
                irr: f.irr,
            };
            writeln!(
                w,
                "{}",
                serde_json::to_string(&rec).expect("record serialises")
            )?;
        }
        w.flush()?;
        completed += chunk.len();
    }
    Ok(completed)
}

/// Mask image of `relabel` applied to a raw flipped order's subset.
pub fn relabel_mask(mask: u32, perm: &[usize]) -> u32 {
    (0..perm.len())
        .filter(|i| mask >> i & 1 == 1)
        .fold(0, |acc, i| acc | 1 << (perm[i] - 1))
        & full_mask(perm.len())
}
