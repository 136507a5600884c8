//! Submap store and topology persistence.
//!
//! Append-friendly directory layout: one JSON file per submap under `map/`
//! plus a `topology.json` index (nodes with anchors, edges with kinds, in
//! canonical id order). Reload reproduces canonical serialization bit-exactly
//! (`serde_json` runs with `float_roundtrip`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toponav_core::geom::Pose2;
use toponav_core::submap::{Submap, SubmapId, SubmapStore};
use toponav_core::topology::{GlobalTopology, TopoEdge};

#[derive(Debug, thiserror::Error)]
pub enum StoreIoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreIoError + '_ {
    move |source| StoreIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn submap_file_name(id: SubmapId) -> String {
    format!("submap_{id:05}.json")
}

/// Write every submap as `map/submap_XXXXX.json` under `dir`.
pub fn save_store(dir: &Path, store: &SubmapStore) -> Result<(), StoreIoError> {
    let map_dir = dir.join("map");
    fs::create_dir_all(&map_dir).map_err(io_err(&map_dir))?;
    for submap in store.iter() {
        let path = map_dir.join(submap_file_name(submap.id));
        let json = serde_json::to_string(submap).expect("submap serializes");
        fs::write(&path, json).map_err(io_err(&path))?;
    }
    Ok(())
}

pub fn load_store(dir: &Path) -> Result<SubmapStore, StoreIoError> {
    let map_dir = dir.join("map");
    let mut store = SubmapStore::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(&map_dir)
        .map_err(io_err(&map_dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("submap_") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    for path in paths {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let submap: Submap = serde_json::from_str(&text).map_err(|source| StoreIoError::Parse {
            path: path.clone(),
            source,
        })?;
        store.insert(submap);
    }
    Ok(store)
}

#[derive(Serialize, Deserialize)]
struct TopologyNodeRecord {
    id: SubmapId,
    anchor: Pose2,
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<TopologyNodeRecord>,
    edges: Vec<TopoEdge>,
}

/// Write `topology.json`: node ids with their (store-held) anchors plus all
/// edges, in canonical order.
pub fn save_topology(
    dir: &Path,
    topology: &GlobalTopology,
    store: &SubmapStore,
) -> Result<(), StoreIoError> {
    let path = dir.join("topology.json");
    let nodes = topology
        .nodes()
        .iter()
        .map(|&id| TopologyNodeRecord {
            id,
            anchor: store.get(id).expect("topology node in store").anchor,
        })
        .collect();
    let file = TopologyFile {
        nodes,
        edges: topology.edges().to_vec(),
    };
    let json = serde_json::to_string(&file).expect("topology serializes");
    fs::write(&path, json).map_err(io_err(&path))
}

/// Load `topology.json`; returns the graph and the stored anchors.
pub fn load_topology(dir: &Path) -> Result<(GlobalTopology, Vec<(SubmapId, Pose2)>), StoreIoError> {
    let path = dir.join("topology.json");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let file: TopologyFile = serde_json::from_str(&text).map_err(|source| StoreIoError::Parse {
        path: path.clone(),
        source,
    })?;
    let mut topology = GlobalTopology::new();
    let mut anchors = Vec::new();
    for node in &file.nodes {
        topology.add_node(node.id);
        anchors.push((node.id, node.anchor));
    }
    topology.restore_edges(file.edges);
    Ok((topology, anchors))
}
