//! Balanced binary trees stored as a preorder arena.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedBinaryTree {
    nodes: Vec<TreeNode>,
    sizes: Vec<usize>,
    root: Option<usize>,
}

/// Nested form used by instance files: `{"left": ..., "right": ...}` with
/// `null` or a missing key for an empty child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct NestedTree {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Box<NestedTree>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Box<NestedTree>>,
}

impl BalancedBinaryTree {
    pub fn empty() -> Self {
        BalancedBinaryTree {
            nodes: Vec::new(),
            sizes: Vec::new(),
            root: None,
        }
    }

    /// Deterministic balanced tree; the left subtree gets ⌈(n−1)/2⌉ nodes.
    pub fn balanced(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        fn grow(nodes: &mut Vec<TreeNode>, n: usize) -> Option<usize> {
            if n == 0 {
                return None;
            }
            let id = nodes.len();
            nodes.push(TreeNode {
                left: None,
                right: None,
            });
            let left_n = n / 2; // ⌈(n−1)/2⌉
            let left = grow(nodes, left_n);
            let right = grow(nodes, n - 1 - left_n);
            nodes[id] = TreeNode { left, right };
            Some(id)
        }
        let root = grow(&mut nodes, n);
        Self::from_arena(nodes, root)
    }

    /// Builds from a nested description and checks the balance invariant.
    pub fn from_nested(t: &NestedTree) -> Result<Self> {
        let mut nodes = Vec::new();
        fn walk(nodes: &mut Vec<TreeNode>, t: &NestedTree) -> usize {
            let id = nodes.len();
            nodes.push(TreeNode {
                left: None,
                right: None,
            });
            let left = t.left.as_deref().map(|c| walk(nodes, c));
            let right = t.right.as_deref().map(|c| walk(nodes, c));
            nodes[id] = TreeNode { left, right };
            id
        }
        let root = walk(&mut nodes, t);
        let tree = Self::from_arena(nodes, Some(root));
        if let Some(bad) = tree.first_unbalanced() {
            return Err(Error::Validation(format!(
                "tree is not balanced at node {bad}"
            )));
        }
        Ok(tree)
    }

    pub fn to_nested(&self) -> Option<NestedTree> {
        fn go(t: &BalancedBinaryTree, id: usize) -> NestedTree {
            let n = t.nodes[id];
            NestedTree {
                left: n.left.map(|c| Box::new(go(t, c))),
                right: n.right.map(|c| Box::new(go(t, c))),
            }
        }
        self.root.map(|r| go(self, r))
    }

    fn from_arena(nodes: Vec<TreeNode>, root: Option<usize>) -> Self {
        let mut sizes = vec![1; nodes.len()];
        // Preorder ids: children always have larger ids than their parent.
        for id in (0..nodes.len()).rev() {
            let n = nodes[id];
            sizes[id] = 1 + n.left.map_or(0, |c| sizes[c]) + n.right.map_or(0, |c| sizes[c]);
        }
        BalancedBinaryTree { nodes, sizes, root }
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> TreeNode {
        self.nodes[id]
    }

    pub fn left(&self, id: usize) -> Option<usize> {
        self.nodes[id].left
    }

    pub fn right(&self, id: usize) -> Option<usize> {
        self.nodes[id].right
    }

    pub fn subtree_size(&self, id: Option<usize>) -> usize {
        id.map_or(0, |i| self.sizes[i])
    }

    /// Depth of the subtree rooted at `id`; an empty subtree has depth −1.
    pub fn depth(&self, id: Option<usize>) -> i64 {
        match id {
            None => -1,
            Some(i) => {
                1 + self
                    .depth(self.nodes[i].left)
                    .max(self.depth(self.nodes[i].right))
            }
        }
    }

    pub fn first_unbalanced(&self) -> Option<usize> {
        (0..self.nodes.len())
            .find(|&i| (self.depth(self.nodes[i].left) - self.depth(self.nodes[i].right)).abs() > 1)
    }

    /// Parent→child pairs in preorder.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.nodes.len().saturating_sub(1));
        for (id, n) in self.nodes.iter().enumerate() {
            out.extend(n.left.map(|c| (id, c)));
            out.extend(n.right.map(|c| (id, c)));
        }
        out
    }
}

pub fn build_balanced_tree(n: usize) -> BalancedBinaryTree {
    BalancedBinaryTree::balanced(n)
}
