//! Character-class lattice used to generalize slot contents.
//!
//! ```text
//! level 3              .  (any)
//!                    /   \______________________
//! level 2        word [0-9A-Za-z_]              \
//!               /   |    |     \            CJK  \s  punctuation
//! level 1    [0-9] [a-z] [A-Z]  '_'          |    |     |
//! level 0    digits lower upper '_'      ideographs ws  other literals
//! ```
//!
//! Every literal has exactly one parent and every chain ends at the top node,
//! which is its own parent.

use std::cmp::Ordering;

use crate::abstraction::is_cjk;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassNode {
    Literal(char),
    Digit,
    Lower,
    Upper,
    Cjk,
    Space,
    /// A level-1 class holding exactly one non-alphanumeric character.
    Single(char),
    Word,
    Any,
}

impl ClassNode {
    pub fn level(self) -> u8 {
        match self {
            ClassNode::Literal(_) => 0,
            ClassNode::Digit
            | ClassNode::Lower
            | ClassNode::Upper
            | ClassNode::Cjk
            | ClassNode::Space
            | ClassNode::Single(_) => 1,
            ClassNode::Word => 2,
            ClassNode::Any => 3,
        }
    }

    /// Position within a level for canonical ordering.
    fn kind_rank(self) -> u8 {
        match self {
            ClassNode::Any => 0,
            ClassNode::Word => 1,
            ClassNode::Cjk => 2,
            ClassNode::Lower => 3,
            ClassNode::Upper => 4,
            ClassNode::Digit => 5,
            ClassNode::Space => 6,
            ClassNode::Single(_) | ClassNode::Literal(_) => 7,
        }
    }

    fn literal_char(self) -> Option<char> {
        match self {
            ClassNode::Literal(c) | ClassNode::Single(c) => Some(c),
            _ => None,
        }
    }

    pub fn contains(self, c: char) -> bool {
        match self {
            ClassNode::Literal(x) | ClassNode::Single(x) => x == c,
            ClassNode::Digit => c.is_ascii_digit(),
            ClassNode::Lower => c.is_ascii_lowercase(),
            ClassNode::Upper => c.is_ascii_uppercase(),
            ClassNode::Cjk => is_cjk(c),
            ClassNode::Space => c.is_whitespace(),
            ClassNode::Word => c.is_ascii_alphanumeric() || c == '_',
            ClassNode::Any => c != '\n',
        }
    }

    /// Body of this node inside a bracket expression.
    fn bracket_body(self) -> String {
        match self {
            ClassNode::Literal(c) | ClassNode::Single(c) => escape_in_class(c),
            ClassNode::Digit => "0-9".into(),
            ClassNode::Lower => "a-z".into(),
            ClassNode::Upper => "A-Z".into(),
            ClassNode::Cjk => r"\x{4E00}-\x{9FFF}".into(),
            ClassNode::Space => r"\s".into(),
            ClassNode::Word => "0-9A-Za-z_".into(),
            ClassNode::Any => unreachable!("top node is never bracketed"),
        }
    }

    /// Standalone rendering of this node as a regex atom.
    pub fn render(self) -> String {
        match self {
            ClassNode::Literal(c) | ClassNode::Single(c) => crate::slot::escape_literal(&c.to_string()),
            ClassNode::Space => r"\s".into(),
            ClassNode::Any => ".".into(),
            other => format!("[{}]", other.bracket_body()),
        }
    }
}

impl Ord for ClassNode {
    /// Higher lattice levels first, then class kind, then code point.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .level()
            .cmp(&self.level())
            .then_with(|| self.kind_rank().cmp(&other.kind_rank()))
            .then_with(|| self.literal_char().cmp(&other.literal_char()))
    }
}

impl PartialOrd for ClassNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn escape_in_class(c: char) -> String {
    if c.is_ascii_punctuation() {
        format!("\\{c}")
    } else if c.is_control() {
        format!("\\x{{{:X}}}", c as u32)
    } else {
        c.to_string()
    }
}

/// Renders a set of atoms as one bracket expression, or a bare atom when the
/// set has a single element. `atoms` must already be in canonical order and
/// must not mix the top node with anything else.
pub(crate) fn render_bracket<'a>(atoms: impl IntoIterator<Item = &'a ClassNode>) -> String {
    let atoms: Vec<ClassNode> = atoms.into_iter().copied().collect();
    match atoms.as_slice() {
        [single] => single.render(),
        many => {
            debug_assert!(!many.contains(&ClassNode::Any));
            let body: String = many.iter().map(|a| a.bracket_body()).collect();
            format!("[{body}]")
        }
    }
}

/// The default hierarchical abstraction tree.
#[derive(Debug, Clone, Copy, Default)]
pub struct AbstractionTree;

impl AbstractionTree {
    pub fn depth(&self) -> u8 {
        ClassNode::Any.level()
    }

    pub fn top(&self) -> ClassNode {
        ClassNode::Any
    }

    pub fn leaf(&self, c: char) -> ClassNode {
        ClassNode::Literal(c)
    }

    pub fn parent(&self, node: ClassNode) -> ClassNode {
        match node {
            ClassNode::Literal(c) if c.is_ascii_digit() => ClassNode::Digit,
            ClassNode::Literal(c) if c.is_ascii_lowercase() => ClassNode::Lower,
            ClassNode::Literal(c) if c.is_ascii_uppercase() => ClassNode::Upper,
            ClassNode::Literal(c) if is_cjk(c) => ClassNode::Cjk,
            ClassNode::Literal(c) if c.is_whitespace() => ClassNode::Space,
            ClassNode::Literal(c) => ClassNode::Single(c),
            ClassNode::Digit | ClassNode::Lower | ClassNode::Upper | ClassNode::Single('_') => {
                ClassNode::Word
            }
            ClassNode::Cjk | ClassNode::Space | ClassNode::Single(_) => ClassNode::Any,
            ClassNode::Word | ClassNode::Any => ClassNode::Any,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn chain(tree: &AbstractionTree, c: char) -> Vec<ClassNode> {
        let mut out = vec![tree.leaf(c)];
        while *out.last().unwrap() != tree.top() {
            out.push(tree.parent(*out.last().unwrap()));
            assert!(out.len() <= 5, "chain did not terminate for {c:?}");
        }
        out
    }

    #[test]
    fn every_chain_reaches_top_with_increasing_levels() {
        let tree = AbstractionTree;
        for c in ['0', 'q', 'Q', '_', '-', ' ', '你', 'é', '\t', '.'] {
            let ch = chain(&tree, c);
            assert!(ch.windows(2).all(|w| w[0].level() < w[1].level()), "{ch:?}");
            for node in &ch {
                assert!(node.contains(c), "{node:?} should contain {c:?}");
            }
        }
        assert_eq!(tree.parent(tree.top()), tree.top());
    }

    #[test]
    fn digit_lifts_to_digit_class() {
        assert_eq!(AbstractionTree.parent(ClassNode::Literal('0')), ClassNode::Digit);
        assert_eq!(ClassNode::Digit.render(), "[0-9]");
    }

    #[test]
    fn canonical_order() {
        let set: BTreeSet<ClassNode> = [
            ClassNode::Digit,
            ClassNode::Single('-'),
            ClassNode::Lower,
            ClassNode::Word,
        ]
        .into_iter()
        .collect();
        let order: Vec<_> = set.into_iter().collect();
        assert_eq!(
            order,
            [
                ClassNode::Word,
                ClassNode::Lower,
                ClassNode::Digit,
                ClassNode::Single('-')
            ]
        );
    }

    #[test]
    fn bracket_rendering() {
        assert_eq!(render_bracket(&[ClassNode::Lower, ClassNode::Digit]), "[a-z0-9]");
        assert_eq!(
            render_bracket(&[ClassNode::Literal(']'), ClassNode::Literal('^')]),
            r"[\]\^]"
        );
        assert_eq!(render_bracket(&[ClassNode::Any]), ".");
        assert_eq!(render_bracket(&[ClassNode::Literal('.')]), r"\.");
    }
}
