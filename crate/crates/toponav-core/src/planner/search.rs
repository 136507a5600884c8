//! A* and Dijkstra over adjacency lists with deterministic tie-breaking.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub path: Vec<u32>,
    pub cost: f64,
}

#[derive(Copy, Clone, Debug)]
struct HeapEntry {
    priority: f64,
    node: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority && self.node == other.node
    }
}
impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we pop the smallest priority,
        // ties broken by the smallest node id.
        other
            .priority
            .total_cmp(&self.priority)
            .then_with(|| other.node.cmp(&self.node))
    }
}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* with a consistent heuristic. `heuristic(goal)` must be zero and edge
/// weights non-negative; with `heuristic = |_| 0` this is Dijkstra.
pub fn astar<H>(
    adjacency: &[Vec<(u32, f64)>],
    start: u32,
    goal: u32,
    heuristic: H,
) -> Option<SearchResult>
where
    H: Fn(u32) -> f64,
{
    let n = adjacency.len();
    if start as usize >= n || goal as usize >= n {
        return None;
    }
    let mut g = alloc::vec![f64::INFINITY; n];
    let mut parent = alloc::vec![u32::MAX; n];
    let mut closed = alloc::vec![false; n];
    let mut heap = BinaryHeap::new();
    g[start as usize] = 0.0;
    heap.push(HeapEntry {
        priority: heuristic(start),
        node: start,
    });
    while let Some(HeapEntry { node, .. }) = heap.pop() {
        if closed[node as usize] {
            continue;
        }
        closed[node as usize] = true;
        if node == goal {
            let mut path = alloc::vec![goal];
            let mut cur = goal;
            while cur != start {
                cur = parent[cur as usize];
                path.push(cur);
            }
            path.reverse();
            return Some(SearchResult {
                path,
                cost: g[goal as usize],
            });
        }
        for &(next, w) in &adjacency[node as usize] {
            let cand = g[node as usize] + w;
            if cand < g[next as usize] {
                g[next as usize] = cand;
                parent[next as usize] = node;
                heap.push(HeapEntry {
                    priority: cand + heuristic(next),
                    node: next,
                });
            }
        }
    }
    None
}

/// Single-source shortest paths: `(distances, parents)`.
pub fn dijkstra_all(adjacency: &[Vec<(u32, f64)>], start: u32) -> (Vec<f64>, Vec<u32>) {
    let n = adjacency.len();
    let mut dist = alloc::vec![f64::INFINITY; n];
    let mut parent = alloc::vec![u32::MAX; n];
    let mut closed = alloc::vec![false; n];
    let mut heap = BinaryHeap::new();
    if (start as usize) < n {
        dist[start as usize] = 0.0;
        heap.push(HeapEntry {
            priority: 0.0,
            node: start,
        });
    }
    while let Some(HeapEntry { node, .. }) = heap.pop() {
        if closed[node as usize] {
            continue;
        }
        closed[node as usize] = true;
        for &(next, w) in &adjacency[node as usize] {
            let cand = dist[node as usize] + w;
            if cand < dist[next as usize] {
                dist[next as usize] = cand;
                parent[next as usize] = node;
                heap.push(HeapEntry {
                    priority: cand,
                    node: next,
                });
            }
        }
    }
    (dist, parent)
}

/// Reconstruct the path to `goal` from a Dijkstra parent array.
pub fn path_from_parents(parents: &[u32], start: u32, goal: u32) -> Option<Vec<u32>> {
    let mut path = alloc::vec![goal];
    let mut cur = goal;
    while cur != start {
        cur = *parents.get(cur as usize)?;
        if cur == u32::MAX {
            return None;
        }
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> Vec<Vec<(u32, f64)>> {
        // 0 -> {1, 2} -> 3, with unequal branch costs.
        alloc::vec![
            alloc::vec![(1, 1.0), (2, 2.0)],
            alloc::vec![(0, 1.0), (3, 2.5)],
            alloc::vec![(0, 2.0), (3, 1.0)],
            alloc::vec![(1, 2.5), (2, 1.0)],
        ]
    }

    #[test]
    fn astar_finds_min_cost_path() {
        let adj = diamond();
        let r = astar(&adj, 0, 3, |_| 0.0).unwrap();
        assert_eq!(r.path, alloc::vec![0, 2, 3]);
        assert_eq!(r.cost, 3.0);
    }

    #[test]
    fn unreachable_goal_is_none() {
        let adj = alloc::vec![alloc::vec![], alloc::vec![]];
        assert!(astar(&adj, 0, 1, |_| 0.0).is_none());
    }

    #[test]
    fn dijkstra_matches_astar_on_diamond() {
        let adj = diamond();
        let (dist, parents) = dijkstra_all(&adj, 0);
        assert_eq!(dist[3], 3.0);
        assert_eq!(path_from_parents(&parents, 0, 3).unwrap(), alloc::vec![0, 2, 3]);
    }
}
