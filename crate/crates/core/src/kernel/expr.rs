//! Hash-consed one-particle function expressions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::map::TimeLabel;

/// Handle into an [`ExprArena`]. Equal handles mean structurally equal
/// expressions after normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(u32);

impl ExprId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Phi,
    /// `|φ|²φ`.
    Cubic,
    Conj(ExprId),
    /// `U_{from,to} e = e^{i(t_from − t_to)Δ} e`.
    Prop {
        from: TimeLabel,
        to: TimeLabel,
        arg: ExprId,
    },
    /// Pointwise product, factors sorted by handle.
    Prod3([ExprId; 3]),
}

/// Interning arena. Constructors normalize eagerly:
///
/// * `U_{a,a} e = e` and `U_{a,b} U_{b,c} e = U_{a,c} e`;
/// * `conj conj e = e`;
/// * products are commutative and `φ·φ·conj φ` collapses to [`Node::Cubic`].
#[derive(Debug, Clone, Default)]
pub struct ExprArena {
    nodes: Vec<Node>,
    distinguished: Vec<bool>,
    index: BTreeMap<Node, ExprId>,
}

impl ExprArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: ExprId) -> Node {
        self.nodes[id.index()]
    }

    /// True iff the expression depends on `|φ|²φ`.
    pub fn is_distinguished(&self, id: ExprId) -> bool {
        self.distinguished[id.index()]
    }

    fn intern(&mut self, node: Node) -> ExprId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = ExprId(u32::try_from(self.nodes.len()).expect("arena overflow"));
        let dist = match node {
            Node::Phi => false,
            Node::Cubic => true,
            Node::Conj(e) | Node::Prop { arg: e, .. } => self.is_distinguished(e),
            Node::Prod3(fs) => fs.iter().any(|&f| self.is_distinguished(f)),
        };
        self.nodes.push(node);
        self.distinguished.push(dist);
        self.index.insert(node, id);
        id
    }

    pub fn phi(&mut self) -> ExprId {
        self.intern(Node::Phi)
    }

    pub fn cubic(&mut self) -> ExprId {
        self.intern(Node::Cubic)
    }

    pub fn conj(&mut self, e: ExprId) -> ExprId {
        match self.node(e) {
            Node::Conj(inner) => inner,
            _ => self.intern(Node::Conj(e)),
        }
    }

    pub fn prop(&mut self, from: TimeLabel, to: TimeLabel, e: ExprId) -> ExprId {
        let (to, arg) = match self.node(e) {
            Node::Prop { from: f, to: t, arg } if f == to => (t, arg),
            _ => (to, e),
        };
        if from == to {
            arg
        } else {
            self.intern(Node::Prop { from, to, arg })
        }
    }

    pub fn prod3(&mut self, a: ExprId, b: ExprId, c: ExprId) -> ExprId {
        let mut fs = [a, b, c];
        fs.sort_unstable();
        let phi = self.phi();
        let phi_bar = self.conj(phi);
        let mut cubic_pattern = [phi, phi, phi_bar];
        cubic_pattern.sort_unstable();
        if fs == cubic_pattern {
            return self.cubic();
        }
        self.intern(Node::Prod3(fs))
    }

    /// Occurrences of the cubic marker, counted as a tree (shared nodes
    /// count once per use).
    pub fn cubic_count(&self, id: ExprId) -> usize {
        match self.node(id) {
            Node::Phi => 0,
            Node::Cubic => 1,
            Node::Conj(e) | Node::Prop { arg: e, .. } => self.cubic_count(e),
            Node::Prod3(fs) => fs.iter().map(|&f| self.cubic_count(f)).sum(),
        }
    }

    /// Number of `φ` atoms in the tree expansion, cubic marker counting three.
    pub fn atom_count(&self, id: ExprId) -> usize {
        match self.node(id) {
            Node::Phi => 1,
            Node::Cubic => 3,
            Node::Conj(e) | Node::Prop { arg: e, .. } => self.atom_count(e),
            Node::Prod3(fs) => fs.iter().map(|&f| self.atom_count(f)).sum(),
        }
    }

    /// Renders with `U_{a,b}` for propagators and `\overline{…}` for conjugates.
    pub fn render(&self, id: ExprId) -> String {
        match self.node(id) {
            Node::Phi => String::from("φ"),
            Node::Cubic => String::from("|φ|²φ"),
            Node::Conj(e) => format!("\\overline{{{}}}", self.render(e)),
            Node::Prop { from, to, arg } => {
                let inner = self.render(arg);
                if matches!(self.node(arg), Node::Prod3(_) | Node::Phi) {
                    format!("U_{{{},{}}}{}", from.0, to.0, inner)
                } else {
                    format!("U_{{{},{}}}({})", from.0, to.0, inner)
                }
            }
            Node::Prod3(fs) => {
                // |g|²g when two factors agree and the third is their conjugate
                for i in 0..3 {
                    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                    if fs[a] == fs[b] && self.node(fs[i]) == Node::Conj(fs[a]) {
                        let g = self.render(fs[a]);
                        return format!("(|{g}|²{g})");
                    }
                }
                format!("({}·{}·{})", self.render(fs[0]), self.render(fs[1]), self.render(fs[2]))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_rules() {
        let mut a = ExprArena::new();
        let phi = a.phi();
        let t = |i| TimeLabel(i);
        assert_eq!(a.prop(t(2), t(2), phi), phi);
        let p34 = a.prop(t(3), t(4), phi);
        let p23 = a.prop(t(2), t(3), p34);
        assert_eq!(p23, a.prop(t(2), t(4), phi));
        let back = a.prop(t(4), t(3), p34);
        assert_eq!(back, phi);
        let c = a.conj(p34);
        assert_eq!(a.conj(c), p34);

        let pb = a.conj(phi);
        let cubic = a.prod3(pb, phi, phi);
        assert_eq!(a.node(cubic), Node::Cubic);
        assert!(a.is_distinguished(cubic));
        let x = a.prod3(p34, phi, c);
        assert_eq!(x, a.prod3(c, p34, phi));
        assert!(!a.is_distinguished(x));
    }

    #[test]
    fn sharing() {
        let mut a = ExprArena::new();
        let phi = a.phi();
        let p = a.prop(TimeLabel(1), TimeLabel(2), phi);
        let before = a.len();
        let q = a.prop(TimeLabel(1), TimeLabel(2), phi);
        assert_eq!(p, q);
        assert_eq!(a.len(), before);
    }

    #[test]
    fn render_regular_cubic() {
        let mut a = ExprArena::new();
        let phi = a.phi();
        let u = a.prop(TimeLabel(2), TimeLabel(4), phi);
        let ub = a.conj(u);
        let p = a.prod3(u, u, ub);
        assert_eq!(a.render(p), "(|U_{2,4}φ|²U_{2,4}φ)");
        assert_eq!(a.atom_count(p), 3);
        assert_eq!(a.cubic_count(p), 0);
    }
}
