//! Regression-tree structure shared by training, prediction, and the model
//! format.

use thiserror::Error;

use crate::scalar::Scalar;

/// One node of a binary decision tree, stored in a flat arena.
///
/// A split routes a row left when `row[feature_index] < threshold`, right
/// otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Node<S> {
    Split {
        feature_index: usize,
        threshold: S,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: S,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeStructureError {
    #[error("tree has no nodes")]
    Empty,
    #[error("node {node}: child index {child} out of range")]
    ChildOutOfRange { node: usize, child: usize },
    #[error("node {node} is visited more than once (not a tree)")]
    NotATree { node: usize },
    #[error("{unreachable} node(s) unreachable from the root")]
    UnreachableNodes { unreachable: usize },
    #[error("node {node}: non-finite threshold or weight")]
    NonFiniteValue { node: usize },
    #[error("node {node}: feature index {feature_index} out of range for {arity} features")]
    FeatureOutOfRange {
        node: usize,
        feature_index: usize,
        arity: usize,
    },
}

/// A binary tree of split nodes and weighted leaves; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree<S> {
    nodes: Vec<Node<S>>,
}

impl<S: Scalar> Tree<S> {
    /// Assemble a tree from an arena, verifying it is a well-formed binary
    /// tree rooted at node 0 with finite values and in-range features.
    pub fn from_nodes(nodes: Vec<Node<S>>, arity: usize) -> Result<Self, TreeStructureError> {
        if nodes.is_empty() {
            return Err(TreeStructureError::Empty);
        }
        for (index, node) in nodes.iter().enumerate() {
            match node {
                Node::Split {
                    feature_index,
                    threshold,
                    ..
                } => {
                    if !threshold.is_finite() {
                        return Err(TreeStructureError::NonFiniteValue { node: index });
                    }
                    if *feature_index >= arity {
                        return Err(TreeStructureError::FeatureOutOfRange {
                            node: index,
                            feature_index: *feature_index,
                            arity,
                        });
                    }
                }
                Node::Leaf { weight } => {
                    if !weight.is_finite() {
                        return Err(TreeStructureError::NonFiniteValue { node: index });
                    }
                }
            }
        }
        // Walk from the root; every node must be reached exactly once.
        let mut visited = vec![false; nodes.len()];
        let mut stack = vec![0usize];
        let mut reached = 0usize;
        while let Some(index) = stack.pop() {
            if index >= nodes.len() {
                return Err(TreeStructureError::ChildOutOfRange {
                    node: index,
                    child: index,
                });
            }
            if visited[index] {
                return Err(TreeStructureError::NotATree { node: index });
            }
            visited[index] = true;
            reached += 1;
            if let Node::Split { left, right, .. } = nodes[index] {
                for child in [left, right] {
                    if child >= nodes.len() {
                        return Err(TreeStructureError::ChildOutOfRange { node: index, child });
                    }
                    stack.push(child);
                }
            }
        }
        if reached != nodes.len() {
            return Err(TreeStructureError::UnreachableNodes {
                unreachable: nodes.len() - reached,
            });
        }
        Ok(Self { nodes })
    }

    /// Arena constructor for the trainer, which builds well-formed trees by
    /// construction.
    pub(crate) fn from_builder(nodes: Vec<Node<S>>) -> Self {
        debug_assert!(!nodes.is_empty());
        Self { nodes }
    }

    /// A tree that outputs `weight` for every row.
    pub fn single_leaf(weight: S) -> Self {
        Self {
            nodes: vec![Node::Leaf { weight }],
        }
    }

    /// Margin contribution for one feature row.
    pub fn output(&self, row: &[S]) -> S {
        let mut index = 0;
        loop {
            match &self.nodes[index] {
                Node::Leaf { weight } => return *weight,
                Node::Split {
                    feature_index,
                    threshold,
                    left,
                    right,
                } => {
                    index = if row[*feature_index] < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[Node<S>] {
        &self.nodes
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }
}
