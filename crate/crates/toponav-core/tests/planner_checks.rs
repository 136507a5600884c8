//! Planner oracle checks: A*/Dijkstra equivalence on random graphs and the
//! exploration pipeline over a small hierarchical fixture.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toponav_core::geom::{Frame, Point, Pose2};
use toponav_core::planner::{
    astar, dense_topology_adjacency, dijkstra_all, frontier_utility, plan_backtracing,
    plan_exploration, select_mode, select_waypoint, CostWeights, FrontierRef, PlanError,
    PlannerMode, PlannerParams, PlannerState,
};
use toponav_core::roadmap::{FrontierOrigin, Roadmap, RoadmapEdge, RoadmapVertex};
use toponav_core::submap::{
    compose_local_area, merge_local_into_submap, reconcile_frontiers, ComposeParams, Submap,
    SubmapStore,
};
use toponav_core::topology::GlobalTopology;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, extra_edges: usize) -> Vec<Vec<(u32, f64)>> {
    let positions: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.random::<f64>() * 50.0, rng.random::<f64>() * 50.0))
        .collect();
    let mut adj = vec![Vec::new(); n];
    let add = |adj: &mut Vec<Vec<(u32, f64)>>, a: usize, b: usize| {
        let w = positions[a].dist(&positions[b]);
        adj[a].push((b as u32, w));
        adj[b].push((a as u32, w));
    };
    // Random spanning tree, then extra chords.
    for i in 1..n {
        let j = rng.random_range(0..i);
        add(&mut adj, i, j);
    }
    for _ in 0..extra_edges {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            add(&mut adj, a, b);
        }
    }
    (positions, adj).1
}

/// Independent reference Dijkstra (linear scan, no heap).
fn reference_dijkstra(adj: &[Vec<(u32, f64)>], start: u32, goal: u32) -> Option<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[start as usize] = 0.0;
    loop {
        let mut u = usize::MAX;
        let mut best = f64::INFINITY;
        for i in 0..n {
            if !done[i] && dist[i] < best {
                best = dist[i];
                u = i;
            }
        }
        if u == usize::MAX {
            break;
        }
        done[u] = true;
        if u == goal as usize {
            return Some(dist[u]);
        }
        for &(v, w) in &adj[u] {
            let cand = dist[u] + w;
            if cand < dist[v as usize] {
                dist[v as usize] = cand;
            }
        }
    }
    None
}

#[test]
fn astar_cost_equals_dijkstra_on_random_roadmap_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..100 {
        let n = rng.random_range(10..=500);
        let adj = random_graph(&mut rng, n, n / 2);
        let start = rng.random_range(0..n) as u32;
        let goal = rng.random_range(0..n) as u32;
        let got = astar(&adj, start, goal, |_| 0.0).map(|r| r.cost);
        let want = reference_dijkstra(&adj, start, goal);
        match (got, want) {
            (Some(a), Some(b)) => assert_eq!(a, b, "round {round}"),
            (None, None) => {}
            other => panic!("round {round}: {other:?}"),
        }
    }
}

#[test]
fn astar_with_euclidean_heuristic_stays_optimal() {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    for round in 0..100 {
        let n = rng.random_range(10..=300);
        // Geometric graph so the Euclidean heuristic is admissible.
        let positions: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random::<f64>() * 30.0, rng.random::<f64>() * 30.0))
            .collect();
        let mut adj = vec![Vec::new(); n];
        for i in 1..n {
            let j = rng.random_range(0..i);
            let w = positions[i].dist(&positions[j]);
            adj[i].push((j as u32, w));
            adj[j].push((i as u32, w));
        }
        for _ in 0..n {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b {
                let w = positions[a].dist(&positions[b]);
                adj[a].push((b as u32, w));
                adj[b].push((a as u32, w));
            }
        }
        let start = rng.random_range(0..n) as u32;
        let goal = rng.random_range(0..n) as u32;
        let goal_pos = positions[goal as usize];
        let with_h = astar(&adj, start, goal, |v| positions[v as usize].dist(&goal_pos));
        let without_h = astar(&adj, start, goal, |_| 0.0);
        assert_eq!(
            with_h.map(|r| r.cost),
            without_h.map(|r| r.cost),
            "round {round}"
        );
    }
}

#[test]
fn select_waypoint_matches_exhaustive_argmin() {
    let mut rng = ChaCha8Rng::seed_from_u64(151);
    for _ in 0..1000 {
        let goal = Point::new(rng.random::<f64>() * 20.0, rng.random::<f64>() * 20.0);
        let mut state = PlannerState::new(goal);
        if rng.random::<bool>() {
            state.last_waypoint = Some(Point::new(
                rng.random::<f64>() * 20.0,
                rng.random::<f64>() * 20.0,
            ));
        }
        let w = CostWeights::default();
        let frontiers: Vec<FrontierRef> = (0..rng.random_range(1..=50))
            .map(|i| FrontierRef {
                submap_id: i / 7,
                vertex_id: i % 7,
                position: Point::new(rng.random::<f64>() * 20.0, rng.random::<f64>() * 20.0),
            })
            .collect();

        // Exhaustive oracle with an independently written utility.
        let mut best: Option<(f64, (u32, u32))> = None;
        for f in &frontiers {
            let shift = state
                .last_waypoint
                .map(|l| ((l.x - f.position.x).powi(2) + (l.y - f.position.y).powi(2)).sqrt())
                .unwrap_or(0.0);
            let dist =
                ((f.position.x - goal.x).powi(2) + (f.position.y - goal.y).powi(2)).sqrt();
            let u = 0.8 * dist + 0.2 * shift;
            let key = (f.submap_id, f.vertex_id);
            match best {
                Some((bu, bk)) if (bu, bk) <= (u, key) => {}
                _ => best = Some((u, key)),
            }
        }
        let (want_u, want_key) = best.unwrap();
        let got = select_waypoint(&frontiers, &goal, &mut state, &w).unwrap();
        assert_eq!((got.submap_id, got.vertex_id), want_key);
        let got_u = frontier_utility(&got.position, &goal, &state, &w);
        // state.last_waypoint was updated; recompute utility with the
        // pre-update shift basis via the oracle value instead.
        assert!((got_u - want_u).abs() < 1.0 + want_u); // sanity only
    }
}

fn grid_patch(center: Point, pitch: f64, half: i64, frontiers: &[(i64, i64)]) -> Roadmap {
    let mut roadmap = Roadmap::new(pitch);
    for j in -half..=half {
        for i in -half..=half {
            let id = roadmap.vertices.len() as u32;
            roadmap.vertices.push(RoadmapVertex {
                id,
                position: Point::new(center.x + i as f64 * pitch, center.y + j as f64 * pitch),
                is_frontier: frontiers.contains(&(i, j)),
                frontier_origin: FrontierOrigin::Local,
            });
        }
    }
    let cols = (2 * half + 1) as u32;
    for j in 0..cols {
        for i in 0..cols {
            let id = j * cols + i;
            if i + 1 < cols {
                let (pa, pb) = (
                    roadmap.vertices[id as usize].position,
                    roadmap.vertices[(id + 1) as usize].position,
                );
                roadmap.edges.push(RoadmapEdge {
                    a: id,
                    b: id + 1,
                    length: pa.dist(&pb),
                });
            }
            if j + 1 < cols {
                let (pa, pb) = (
                    roadmap.vertices[id as usize].position,
                    roadmap.vertices[(id + cols) as usize].position,
                );
                roadmap.edges.push(RoadmapEdge {
                    a: id,
                    b: id + cols,
                    length: pa.dist(&pb),
                });
            }
        }
    }
    roadmap
}

/// Chain of submaps along +x, each holding a 5x5 patch of pitch 0.3, with a
/// frontier on the far edge of the last submap.
fn chain_world(n: u32, spacing: f64) -> (GlobalTopology, SubmapStore) {
    let mut topology = GlobalTopology::new();
    let mut store = SubmapStore::new();
    for id in 0..n {
        let odom = Pose2::new(id as f64 * spacing, 0.0, 0.0, Frame::Odometry);
        let mut s = Submap::new(id, odom.with_frame(Frame::Corrected), odom, 0.3);
        let frontier_marks: &[(i64, i64)] = if id == n - 1 { &[(2, 0)] } else { &[] };
        let local = grid_patch(odom.position(), 0.3, 2, frontier_marks);
        merge_local_into_submap(&mut s, &local, &odom, 0.1);
        topology.add_node(id);
        store.insert(s);
        if id > 0 {
            topology.add_sequential_edge(&store, id - 1, id).unwrap();
        }
    }
    (topology, store)
}

fn params() -> PlannerParams {
    PlannerParams {
        attach_radius: 0.3,
        coverage_radius: 0.25,
        weights: CostWeights::default(),
    }
}

fn compose_params() -> ComposeParams {
    ComposeParams {
        connect_radius: 0.5,
        dedup_epsilon: 0.1,
        coverage_radius: 0.25,
        check_segments: true,
    }
}

#[test]
fn backtracing_identity_plan_costs_zero() {
    let (topology, store) = chain_world(1, 1.0);
    let area = compose_local_area(&topology, &store, 0, &compose_params()).unwrap();
    let v = area.merged_roadmap.vertices[4].position;
    let plan = plan_backtracing(&area, &v, &v, &params()).unwrap();
    assert_eq!(plan.cost, 0.0);
    assert_eq!(plan.graph_path.len(), 1);
    assert_eq!(plan.mode, PlannerMode::Backtracing);
}

#[test]
fn goal_on_vertex_selects_backtracing_far_goal_selects_exploration() {
    let (topology, store) = chain_world(1, 1.0);
    let area = compose_local_area(&topology, &store, 0, &compose_params()).unwrap();
    let on_vertex = area.merged_roadmap.vertices[0].position;
    assert_eq!(
        select_mode(&area, &on_vertex, &params()),
        PlannerMode::Backtracing
    );
    assert_eq!(
        select_mode(&area, &Point::new(50.0, 50.0), &params()),
        PlannerMode::Exploration
    );
}

#[test]
fn goal_in_disconnected_component_is_no_path() {
    // Two disjoint patches in one "submap": goal attaches but no route.
    let mut topology = GlobalTopology::new();
    let mut store = SubmapStore::new();
    let odom = Pose2::identity(Frame::Odometry);
    let mut s = Submap::new(0, odom.with_frame(Frame::Corrected), odom, 0.3);
    let near = grid_patch(Point::new(0.0, 0.0), 0.3, 1, &[]);
    merge_local_into_submap(&mut s, &near, &odom, 0.1);
    let far = grid_patch(Point::new(10.0, 0.0), 0.3, 1, &[]);
    merge_local_into_submap(&mut s, &far, &odom, 0.1);
    topology.add_node(0);
    store.insert(s);
    let area = compose_local_area(&topology, &store, 0, &compose_params()).unwrap();
    let start = Point::new(0.0, 0.0);
    let goal = Point::new(10.0, 0.0);
    assert_eq!(select_mode(&area, &goal, &params()), PlannerMode::Backtracing);
    assert!(matches!(
        plan_backtracing(&area, &start, &goal, &params()),
        Err(PlanError::NoPath)
    ));
}

#[test]
fn exploration_inside_local_area_is_direct() {
    let (topology, mut store) = chain_world(1, 1.0);
    // Mark a frontier on submap 0 itself.
    {
        let s = store.get_mut(0).unwrap();
        s.roadmap.vertices[0].is_frontier = true;
        s.frontier_vertex_ids.insert(0);
    }
    let area = compose_local_area(&topology, &store, 0, &compose_params()).unwrap();
    let area = reconcile_frontiers(area, &mut store).unwrap();
    let frontiers = store
        .global_frontiers()
        .into_iter()
        .map(|(s, v, p)| FrontierRef {
            submap_id: s,
            vertex_id: v,
            position: p,
        })
        .collect::<Vec<_>>();
    let mut state = PlannerState::new(Point::new(-30.0, 0.0));
    let start = Point::new(0.0, 0.0);
    let plan = plan_exploration(
        &topology,
        &store,
        &area,
        &frontiers,
        &start,
        &state.goal.clone(),
        &mut state,
        &params(),
    )
    .unwrap();
    assert_eq!(plan.mode, PlannerMode::Exploration);
    assert_eq!(plan.topo_path, vec![0]);
    let last = *plan.graph_path.last().unwrap();
    assert!(area.merged_roadmap.vertices[last as usize].is_frontier);
}

#[test]
fn exploration_chain_cost_matches_topology_dijkstra() {
    // Frontier owned by a submap 3+ hops beyond the local area.
    let (topology, mut store) = chain_world(6, 2.0);
    {
        // Only the far submap holds a frontier (chain_world already marked
        // it); double-check.
        let far = store.get(5).unwrap();
        assert!(!far.frontier_vertex_ids.is_empty());
    }
    let area = compose_local_area(&topology, &store, 0, &compose_params()).unwrap();
    let area = reconcile_frontiers(area, &mut store).unwrap();
    let frontiers: Vec<FrontierRef> = store
        .global_frontiers()
        .into_iter()
        .map(|(s, v, p)| FrontierRef {
            submap_id: s,
            vertex_id: v,
            position: p,
        })
        .collect();
    assert_eq!(frontiers.len(), 1);
    let goal = Point::new(40.0, 0.0);
    let mut state = PlannerState::new(goal);
    let start = Point::new(0.0, 0.0);
    let plan = plan_exploration(
        &topology,
        &store,
        &area,
        &frontiers,
        &start,
        &goal,
        &mut state,
        &params(),
    )
    .unwrap();
    assert_eq!(plan.topo_path, vec![0, 1, 2, 3, 4, 5]);
    // Topology chain cost matches a Dijkstra oracle over the topology.
    let adj = dense_topology_adjacency(&topology);
    let (dist, _) = dijkstra_all(&adj, 0);
    let chain_cost: f64 = plan
        .topo_path
        .windows(2)
        .map(|w| {
            adj[w[0] as usize]
                .iter()
                .find(|(n, _)| *n == w[1])
                .unwrap()
                .1
        })
        .sum();
    assert_eq!(chain_cost, dist[5]);
}

#[test]
fn emitted_plans_satisfy_edge_and_cost_invariants() {
    let (topology, store) = chain_world(3, 1.2);
    let area = compose_local_area(&topology, &store, 1, &compose_params()).unwrap();
    let start = Point::new(0.0, 0.0);
    let goal = Point::new(2.35, 0.55);
    let plan = plan_backtracing(&area, &start, &goal, &params()).unwrap();

    // Cost additivity over graph edges.
    let mut cost = 0.0;
    for w in plan.graph_path.windows(2) {
        let edge = area
            .merged_roadmap
            .edges
            .iter()
            .find(|e| {
                (e.a == w[0] && e.b == w[1]) || (e.a == w[1] && e.b == w[0])
            })
            .unwrap_or_else(|| panic!("missing edge {w:?}"));
        cost += edge.length;
    }
    assert!((cost - plan.cost).abs() < 1e-9);
    // Waypoints follow the graph path; the final segment attaches the goal.
    assert_eq!(plan.waypoints.len(), plan.graph_path.len() + 1);
    assert_eq!(*plan.waypoints.last().unwrap(), goal);
}

#[test]
fn identical_inputs_produce_identical_plans() {
    let (topology, store) = chain_world(4, 1.2);
    let area = compose_local_area(&topology, &store, 2, &compose_params()).unwrap();
    let start = Point::new(0.05, -0.03);
    let goal = Point::new(3.6, 0.3);
    let a = plan_backtracing(&area, &start, &goal, &params()).unwrap();
    let b = plan_backtracing(&area, &start, &goal, &params()).unwrap();
    assert_eq!(a.graph_path, b.graph_path);
    assert_eq!(a.cost, b.cost);
}
