//! Alternating AND-OR trees with indexed leaves.
//!
//! Nodes are named by their descent path from the root (the root is the
//! empty path). Leaves additionally carry a dense index in left-to-right
//! order, which coincides with the lexicographic order of their paths; that
//! index is how distributions and strategies refer to leaves.

use std::fmt;

use crate::error::Error;
use crate::Result;

/// Internal node label. AND is 1 iff all children are 1; OR is 1 iff some
/// child is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    And,
    Or,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::And => Label::Or,
            Label::Or => Label::And,
        }
    }

    /// The child value that resolves a node of this label on its own.
    pub fn short_circuit(self) -> bool {
        match self {
            Label::And => false,
            Label::Or => true,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::And => write!(f, "AND"),
            Label::Or => write!(f, "OR"),
        }
    }
}

/// Path of child indices from the root; the root is the empty path.
///
/// The derived `Ord` is lexicographic on the segment sequence, which for
/// leaves equals left-to-right tree order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodeId(Vec<u32>);

impl NodeId {
    pub fn root() -> NodeId {
        NodeId(Vec::new())
    }

    pub fn from_segments(segments: Vec<u32>) -> NodeId {
        NodeId(segments)
    }

    pub fn child(&self, k: u32) -> NodeId {
        let mut v = self.0.clone();
        v.push(k);
        NodeId(v)
    }

    pub fn parent(&self) -> Option<NodeId> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodeId(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn segments(&self) -> &[u32] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    /// True when `self` is an ancestor of `other` (proper or equal).
    pub fn is_prefix_of(&self, other: &NodeId) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Render with single digits when every segment fits one digit and
    /// `wide` is false, dot-separated decimal segments otherwise. The root
    /// renders as the empty string.
    pub fn render(&self, wide: bool) -> String {
        if wide {
            self.0
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(".")
        } else {
            self.0.iter().map(|s| s.to_string()).collect()
        }
    }

    /// Parse either rendering. `wide` selects the dot-separated form; the
    /// plain form treats every character as one digit.
    pub fn parse(text: &str, wide: bool) -> Result<NodeId> {
        if text.is_empty() {
            return Ok(NodeId::root());
        }
        let mut segments = Vec::new();
        if wide {
            for part in text.split('.') {
                let seg: u32 = part.parse().map_err(|_| Error::Parse {
                    pos: 0,
                    msg: format!("bad node id segment {part:?} in {text:?}"),
                })?;
                segments.push(seg);
            }
        } else {
            for ch in text.chars() {
                let seg = ch.to_digit(10).ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: format!("bad node id digit {ch:?} in {text:?}"),
                })?;
                segments.push(seg);
            }
        }
        Ok(NodeId(segments))
    }
}

/// Shape summary: balanced means same-depth internal nodes share arity and
/// all leaves share one depth; uniform additionally means one global arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShapeClass {
    pub balanced: bool,
    pub uniform_arity: Option<usize>,
    pub height: usize,
}

/// Knowledge about one leaf's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafStatus {
    Unknown,
    Zero,
    One,
}

impl LeafStatus {
    pub fn from_value(v: bool) -> LeafStatus {
        if v {
            LeafStatus::One
        } else {
            LeafStatus::Zero
        }
    }

    pub fn value(self) -> Option<bool> {
        match self {
            LeafStatus::Unknown => None,
            LeafStatus::Zero => Some(false),
            LeafStatus::One => Some(true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeKind {
    Leaf { leaf: usize },
    Internal { label: Label, children: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    id: NodeId,
    parent: Option<usize>,
    kind: NodeKind,
}

/// Immutable alternating AND-OR tree. Node index 0 is the root; children
/// have larger indices than their parent (preorder), so a reverse sweep is
/// a bottom-up pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<Node>,
    leaves: Vec<usize>,
    max_arity: usize,
}

/// Recursive build description used by the parser and the constructors.
enum Proto {
    Leaf,
    Internal(Label, Vec<Proto>),
}

const MAX_LEAVES: usize = 1 << 20;

impl Tree {
    /// Uniform `arity`-ary tree of the given height with alternating labels
    /// starting at `root_label`. Leaf count is `arity^height`.
    pub fn uniform(root_label: Label, arity: usize, height: usize) -> Result<Tree> {
        if arity < 2 {
            return Err(Error::Shape(format!("arity must be >= 2, got {arity}")));
        }
        if height < 1 {
            return Err(Error::Shape(format!("height must be >= 1, got {height}")));
        }
        let leaves = (arity as u128).checked_pow(height as u32);
        match leaves {
            Some(n) if n <= MAX_LEAVES as u128 => {}
            _ => {
                return Err(Error::Shape(format!(
                    "uniform({arity},{height}) exceeds the {MAX_LEAVES}-leaf limit"
                )))
            }
        }
        fn build(label: Label, arity: usize, levels_left: usize) -> Proto {
            if levels_left == 0 {
                Proto::Leaf
            } else {
                let children = (0..arity)
                    .map(|_| build(label.flip(), arity, levels_left - 1))
                    .collect();
                Proto::Internal(label, children)
            }
        }
        Tree::from_proto(build(root_label, arity, height))
    }

    /// Parse a tree spec: either the shorthand `uniform:LABEL:ARITY:HEIGHT`
    /// or the explicit form `LABEL(child,...)` with `l` for leaves.
    /// Whitespace is insignificant.
    pub fn parse(text: &str) -> Result<Tree> {
        Parser::new(text).parse()
    }

    /// Explicit-form rendering; `parse` round-trips it.
    pub fn render(&self) -> String {
        fn rec(tree: &Tree, node: usize, out: &mut String) {
            match &tree.nodes[node].kind {
                NodeKind::Leaf { .. } => out.push('l'),
                NodeKind::Internal { label, children } => {
                    out.push_str(&label.to_string());
                    out.push('(');
                    for (i, &c) in children.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        rec(tree, c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        rec(self, 0, &mut out);
        out
    }

    fn from_proto(proto: Proto) -> Result<Tree> {
        let mut tree = Tree {
            nodes: Vec::new(),
            leaves: Vec::new(),
            max_arity: 0,
        };
        tree.push(proto, NodeId::root(), None, None)?;
        if tree.leaves.len() > MAX_LEAVES {
            return Err(Error::Shape(format!(
                "tree exceeds the {MAX_LEAVES}-leaf limit"
            )));
        }
        Ok(tree)
    }

    fn push(
        &mut self,
        proto: Proto,
        id: NodeId,
        parent: Option<usize>,
        parent_label: Option<Label>,
    ) -> Result<usize> {
        let index = self.nodes.len();
        match proto {
            Proto::Leaf => {
                if parent.is_none() {
                    return Err(Error::Shape(
                        "a single leaf is not a tree; at least one internal node is required"
                            .into(),
                    ));
                }
                let leaf = self.leaves.len();
                self.nodes.push(Node {
                    id,
                    parent,
                    kind: NodeKind::Leaf { leaf },
                });
                self.leaves.push(index);
            }
            Proto::Internal(label, children) => {
                if let Some(pl) = parent_label {
                    if pl == label {
                        return Err(Error::Shape(format!(
                            "labels must alternate: {label} under {pl} at node {:?}",
                            id.render(true)
                        )));
                    }
                }
                if children.len() < 2 {
                    return Err(Error::Shape(format!(
                        "internal node {:?} has {} children; at least 2 required",
                        id.render(true),
                        children.len()
                    )));
                }
                self.max_arity = self.max_arity.max(children.len());
                self.nodes.push(Node {
                    id: id.clone(),
                    parent,
                    kind: NodeKind::Internal {
                        label,
                        children: Vec::new(),
                    },
                });
                let mut child_indices = Vec::with_capacity(children.len());
                for (k, child) in children.into_iter().enumerate() {
                    let cid = id.child(k as u32);
                    let ci = self.push(child, cid, Some(index), Some(label))?;
                    child_indices.push(ci);
                }
                if let NodeKind::Internal { children, .. } = &mut self.nodes[index].kind {
                    *children = child_indices;
                }
            }
        }
        Ok(index)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn root_label(&self) -> Label {
        match &self.nodes[0].kind {
            NodeKind::Internal { label, .. } => *label,
            NodeKind::Leaf { .. } => unreachable!("trees always have an internal root"),
        }
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        matches!(self.nodes[node].kind, NodeKind::Leaf { .. })
    }

    pub fn label(&self, node: usize) -> Option<Label> {
        match &self.nodes[node].kind {
            NodeKind::Internal { label, .. } => Some(*label),
            NodeKind::Leaf { .. } => None,
        }
    }

    pub fn children(&self, node: usize) -> &[usize] {
        match &self.nodes[node].kind {
            NodeKind::Internal { children, .. } => children,
            NodeKind::Leaf { .. } => &[],
        }
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.nodes[node].parent
    }

    pub fn node_id(&self, node: usize) -> &NodeId {
        &self.nodes[node].id
    }

    /// Leaf index of a node, if it is a leaf.
    pub fn leaf_index(&self, node: usize) -> Option<usize> {
        match self.nodes[node].kind {
            NodeKind::Leaf { leaf } => Some(leaf),
            NodeKind::Internal { .. } => None,
        }
    }

    /// Node index of a leaf by leaf index.
    pub fn leaf_node(&self, leaf: usize) -> usize {
        self.leaves[leaf]
    }

    pub fn leaf_id(&self, leaf: usize) -> &NodeId {
        &self.nodes[self.leaves[leaf]].id
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// True when node ids need the dot-separated rendering.
    pub fn wide_ids(&self) -> bool {
        self.max_arity > 10
    }

    pub fn render_node_id(&self, node: usize) -> String {
        self.nodes[node].id.render(self.wide_ids())
    }

    pub fn render_leaf_id(&self, leaf: usize) -> String {
        self.render_node_id(self.leaves[leaf])
    }

    /// Resolve a NodeId to a node index.
    pub fn node_index(&self, id: &NodeId) -> Result<usize> {
        let mut node = 0usize;
        for &seg in id.segments() {
            let children = self.children(node);
            node = *children
                .get(seg as usize)
                .ok_or_else(|| Error::UnknownNode(id.render(self.wide_ids())))?;
        }
        Ok(node)
    }

    pub fn parse_node_id(&self, text: &str) -> Result<NodeId> {
        let id = NodeId::parse(text, self.wide_ids() || text.contains('.'))?;
        self.node_index(&id)?;
        Ok(id)
    }

    /// Evaluate the root under a total assignment (indexed by leaf index).
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.leaf_count() {
            return Err(Error::Assignment(format!(
                "assignment covers {} leaves, tree has {}",
                assignment.len(),
                self.leaf_count()
            )));
        }
        let mut values = vec![false; self.nodes.len()];
        for index in (0..self.nodes.len()).rev() {
            values[index] = match &self.nodes[index].kind {
                NodeKind::Leaf { leaf } => assignment[*leaf],
                NodeKind::Internal { label, children } => match label {
                    Label::And => children.iter().all(|&c| values[c]),
                    Label::Or => children.iter().any(|&c| values[c]),
                },
            };
        }
        Ok(values[0])
    }

    /// Three-valued resolution from partial leaf knowledge: an AND node is 0
    /// as soon as some child is 0 and 1 once all children are 1; OR dually.
    /// Returns one entry per node index.
    pub fn resolve(&self, status: &[LeafStatus]) -> Vec<Option<bool>> {
        debug_assert_eq!(status.len(), self.leaf_count());
        let mut values: Vec<Option<bool>> = vec![None; self.nodes.len()];
        for index in (0..self.nodes.len()).rev() {
            values[index] = match &self.nodes[index].kind {
                NodeKind::Leaf { leaf } => status[*leaf].value(),
                NodeKind::Internal { label, children } => {
                    let sc = label.short_circuit();
                    if children.iter().any(|&c| values[c] == Some(sc)) {
                        Some(sc)
                    } else if children.iter().all(|&c| values[c] == Some(!sc)) {
                        Some(!sc)
                    } else {
                        None
                    }
                }
            };
        }
        values
    }

    /// Shape classification.
    pub fn classify(&self) -> ShapeClass {
        let mut leaf_depths = Vec::new();
        let mut internal_by_depth: Vec<Vec<usize>> = Vec::new();
        for (index, node) in self.nodes.iter().enumerate() {
            let depth = node.id.depth();
            match &node.kind {
                NodeKind::Leaf { .. } => leaf_depths.push(depth),
                NodeKind::Internal { .. } => {
                    if internal_by_depth.len() <= depth {
                        internal_by_depth.resize(depth + 1, Vec::new());
                    }
                    internal_by_depth[depth].push(self.children(index).len());
                }
            }
        }
        let height = leaf_depths.iter().copied().max().unwrap_or(0);
        let leaves_level = leaf_depths.iter().all(|&d| d == height);
        let layers_regular = internal_by_depth
            .iter()
            .all(|arities| arities.windows(2).all(|w| w[0] == w[1]));
        let balanced = leaves_level && layers_regular;
        let uniform_arity = if balanced {
            let mut arities = self
                .nodes
                .iter()
                .enumerate()
                .filter(|(_, n)| matches!(n.kind, NodeKind::Internal { .. }))
                .map(|(i, _)| self.children(i).len());
            let first = arities.next().unwrap_or(0);
            if arities.all(|a| a == first) {
                Some(first)
            } else {
                None
            }
        } else {
            None
        };
        ShapeClass {
            balanced,
            uniform_arity,
            height,
        }
    }

    /// True when this is the uniform tree with the given parameters.
    pub fn is_uniform(&self, root_label: Label, arity: usize, height: usize) -> bool {
        let shape = self.classify();
        self.root_label() == root_label
            && shape.uniform_arity == Some(arity)
            && shape.height == height
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn parse(mut self) -> Result<Tree> {
        self.skip_ws();
        let tree = if self.peek_keyword("uniform") {
            self.parse_shorthand()?
        } else {
            let proto = self.parse_node()?;
            Tree::from_proto(proto)?
        };
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.error("unexpected trailing input"));
        }
        Ok(tree)
    }

    fn parse_shorthand(&mut self) -> Result<Tree> {
        self.expect_keyword("uniform")?;
        self.expect_byte(b':')?;
        let label = self.parse_label()?;
        self.expect_byte(b':')?;
        let arity = self.parse_number("arity")?;
        self.expect_byte(b':')?;
        let height = self.parse_number("height")?;
        Tree::uniform(label, arity, height)
    }

    fn parse_node(&mut self) -> Result<Proto> {
        let label = self.parse_label()?;
        self.expect_byte(b'(')?;
        let mut children = vec![self.parse_child()?];
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                Some(b',') => {
                    self.pos += 1;
                    children.push(self.parse_child()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
        Ok(Proto::Internal(label, children))
    }

    fn parse_child(&mut self) -> Result<Proto> {
        self.skip_ws();
        match self.bytes.get(self.pos) {
            Some(b'l') => {
                self.pos += 1;
                Ok(Proto::Leaf)
            }
            Some(b'A') | Some(b'O') => self.parse_node(),
            _ => Err(self.error("expected 'l', 'AND' or 'OR'")),
        }
    }

    fn parse_label(&mut self) -> Result<Label> {
        self.skip_ws();
        if self.peek_keyword("AND") {
            self.pos += 3;
            Ok(Label::And)
        } else if self.peek_keyword("OR") {
            self.pos += 2;
            Ok(Label::Or)
        } else {
            Err(self.error("expected 'AND' or 'OR'"))
        }
    }

    fn parse_number(&mut self, what: &str) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(&format!("expected a number for {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error(&format!("bad number for {what}")))
    }

    fn peek_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        self.bytes[self.pos..].starts_with(kw.as_bytes())
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.peek_keyword(kw) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(self.error(&format!("expected {kw:?}")))
        }
    }

    fn expect_byte(&mut self, b: u8) -> Result<()> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {:?}", b as char)))
        }
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }
}
