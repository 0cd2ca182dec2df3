use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QramError, Result};

/// Deepest tree the sparse engine accepts.
pub const MAX_SPARSE_DEPTH: usize = 10;

/// Deepest tree the dense oracles accept.
pub const MAX_DENSE_DEPTH: usize = 3;

/// Orientation of a two-state router. `Left` is `|0>`, `Right` is `|1>`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum NodeOrientation {
    #[default]
    Left,
    Right,
}

impl NodeOrientation {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            NodeOrientation::Right
        } else {
            NodeOrientation::Left
        }
    }

    pub fn is_right(self) -> bool {
        self == NodeOrientation::Right
    }

    pub fn flipped(self) -> Self {
        match self {
            NodeOrientation::Left => NodeOrientation::Right,
            NodeOrientation::Right => NodeOrientation::Left,
        }
    }
}

impl fmt::Display for NodeOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeOrientation::Left => "L",
            NodeOrientation::Right => "R",
        })
    }
}

/// Position of a router in the tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub level: usize,
    pub offset: usize,
}

impl NodeId {
    pub fn root() -> Self {
        Self {
            level: 0,
            offset: 0,
        }
    }

    /// Index in the level-major node vector.
    pub fn index(self) -> usize {
        (1usize << self.level) - 1 + self.offset
    }

    pub fn child(self, side: NodeOrientation) -> Self {
        Self {
            level: self.level + 1,
            offset: 2 * self.offset + side.is_right() as usize,
        }
    }

    pub fn parent(self) -> Option<Self> {
        (self.level > 0).then(|| Self {
            level: self.level - 1,
            offset: self.offset / 2,
        })
    }

    pub fn from_index(index: usize) -> Self {
        let level = (usize::BITS - 1 - (index + 1).leading_zeros()) as usize;
        Self {
            level,
            offset: index + 1 - (1 << level),
        }
    }
}

/// Binary routing tree of depth `n` with `2^n` memory cells at the leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TreeTopology {
    depth: usize,
}

impl TreeTopology {
    pub fn new(depth: usize) -> Result<Self> {
        Self::with_max(depth, MAX_SPARSE_DEPTH)
    }

    pub fn with_max(depth: usize, max_depth: usize) -> Result<Self> {
        if depth == 0 || depth > max_depth {
            return Err(QramError::config(format!(
                "tree depth {depth} outside 1..={max_depth}"
            )));
        }
        Ok(Self { depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        (1 << self.depth) - 1
    }

    pub fn cell_count(&self) -> usize {
        1 << self.depth
    }

    /// Routers visited on the way to `cell`, root first.
    pub fn path_to(&self, cell: usize) -> Vec<NodeId> {
        let mut node = NodeId::root();
        let mut path = Vec::with_capacity(self.depth);
        for level in 0..self.depth {
            path.push(node);
            let bit = (cell >> (self.depth - 1 - level)) & 1 == 1;
            node = node.child(NodeOrientation::from_bit(bit));
        }
        path
    }

    /// Router a signal reaches at `level` by following the orientations of
    /// the levels above it.
    pub fn node_reached(&self, nodes: &[NodeOrientation], level: usize) -> NodeId {
        let mut node = NodeId::root();
        for _ in 0..level {
            node = node.child(nodes[node.index()]);
        }
        node
    }

    /// Cell a signal reaches by following every orientation from the root.
    pub fn selected_cell(&self, nodes: &[NodeOrientation]) -> usize {
        let mut node = NodeId::root();
        for _ in 0..self.depth {
            node = node.child(nodes[node.index()]);
        }
        node.offset
    }

    /// Leaf-level router that feeds `cell`.
    pub fn cell_parent(&self, cell: usize) -> NodeId {
        NodeId {
            level: self.depth - 1,
            offset: cell / 2,
        }
    }
}
