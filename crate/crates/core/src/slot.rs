//! Slot generation: turns the set of strings observed in one template slot
//! into a regex fragment.
//!
//! Stages, in order: deduplicate and measure lengths, take the union of
//! characters as a coarse class, lift the class up the [`AbstractionTree`]
//! until it has fewer than [`MAX_ATOMS`] atoms, merge the atoms into one
//! bracket expression, then attach a quantifier derived from the lengths.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{render_bracket, AbstractionTree, ClassNode};
use crate::types::{Element, MatchMode, Quantifier, Slot, Template};

/// A consolidated atom set is valid when it has fewer than this many atoms.
pub const MAX_ATOMS: usize = 4;

const METACHARS: &[char] = &[
    '.', '^', '$', '*', '+', '?', '(', ')', '[', ']', '{', '}', '|', '\\', '/', '-',
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlotOptions {
    pub mode: MatchMode,
    /// Render an empty-permitting slot as `{0,max}` instead of `*`.
    pub bounded_star: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lengths {
    pub unique: BTreeSet<String>,
    pub min_len: usize,
    pub max_len: usize,
}

pub fn dedup_and_lengths<S: AsRef<str>>(fillings: &[S]) -> Lengths {
    let unique: BTreeSet<String> = fillings.iter().map(|s| s.as_ref().to_string()).collect();
    let lens = unique.iter().map(|s| s.chars().count());
    let min_len = lens.clone().min().unwrap_or(0);
    let max_len = lens.max().unwrap_or(0);
    Lengths {
        unique,
        min_len,
        max_len,
    }
}

/// Union of all characters across the fillings, as lattice leaves.
pub fn coarse_class<'a>(unique: impl IntoIterator<Item = &'a String>) -> BTreeSet<ClassNode> {
    unique
        .into_iter()
        .flat_map(|s| s.chars())
        .map(ClassNode::Literal)
        .collect()
}

pub fn is_valid(atoms: &BTreeSet<ClassNode>) -> bool {
    atoms.len() < MAX_ATOMS
}

/// One abstraction step: every atom on the lowest level present is replaced
/// by its parent. The top node absorbs everything else.
pub fn abstract_up(atoms: &BTreeSet<ClassNode>, tree: &AbstractionTree) -> BTreeSet<ClassNode> {
    let Some(lowest) = atoms.iter().map(|a| a.level()).min() else {
        return BTreeSet::new();
    };
    let lifted: BTreeSet<ClassNode> = atoms
        .iter()
        .map(|&a| if a.level() == lowest { tree.parent(a) } else { a })
        .collect();
    if lifted.contains(&tree.top()) {
        BTreeSet::from([tree.top()])
    } else {
        lifted
    }
}

/// Lifts until valid. Returns the final atoms and the number of lifts taken.
pub fn abstract_until_valid(
    mut atoms: BTreeSet<ClassNode>,
    tree: &AbstractionTree,
) -> (BTreeSet<ClassNode>, usize) {
    let mut lifts = 0;
    while !is_valid(&atoms) {
        atoms = abstract_up(&atoms, tree);
        lifts += 1;
    }
    (atoms, lifts)
}

/// Renders a valid atom set: one bracket expression, or a bare atom when
/// only one is left.
pub fn consolidate(atoms: &BTreeSet<ClassNode>) -> String {
    render_bracket(atoms)
}

pub fn gen_quantifier(min_len: usize, max_len: usize, bounded_star: bool) -> Quantifier {
    match (min_len, max_len) {
        (0, n) if bounded_star => Quantifier::Range(0, n),
        (0, _) => Quantifier::Star,
        (m, n) if m == n => Quantifier::Exact(n),
        (m, n) => Quantifier::Range(m, n),
    }
}

impl Slot {
    pub fn render(&self) -> String {
        let mut out = consolidate(&self.atoms);
        out.push_str(&self.quantifier.render());
        // a lazy marker on a bare atom would turn it into an optional one
        if self.mode == MatchMode::Lazy && self.quantifier != Quantifier::Exact(1) {
            out.push('?');
        }
        out
    }
}

/// Runs the whole slot pipeline on one slot's fillings.
pub fn generate_slot<S: AsRef<str>>(
    fillings: &[S],
    tree: &AbstractionTree,
    opts: SlotOptions,
) -> Slot {
    let lengths = dedup_and_lengths(fillings);
    debug_assert!(lengths.max_len > 0, "all-empty slots are dropped upstream");
    let (atoms, _) = abstract_until_valid(coarse_class(&lengths.unique), tree);
    Slot {
        atoms,
        quantifier: gen_quantifier(lengths.min_len, lengths.max_len, opts.bounded_star),
        mode: opts.mode,
    }
}

pub fn generate_slot_fragment<S: AsRef<str>>(
    fillings: &[S],
    tree: &AbstractionTree,
    opts: SlotOptions,
) -> String {
    generate_slot(fillings, tree, opts).render()
}

/// Backslash-escapes regex metacharacters.
pub fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if METACHARS.contains(&c) {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

/// Compiles `regex` for whole-string matching.
pub(crate) fn compile_full(regex: &str) -> Result<regex::Regex> {
    regex::Regex::new(&format!("^(?:{regex})$")).map_err(|e| Error::CompileFailure {
        regex: regex.to_string(),
        reason: e.to_string(),
    })
}

/// Concatenates escaped anchors and slot fragments, then checks that the
/// result compiles and fully matches every template member.
pub fn assemble_regex(template: &Template, fragments: &[String]) -> Result<String> {
    let mut regex = String::new();
    for e in &template.elements {
        match e {
            Element::Anchor(a) => regex.push_str(&escape_literal(a)),
            Element::Slot(s) => regex.push_str(&fragments[*s]),
        }
    }
    let full = compile_full(&regex)?;
    if let Some(bad) = template.members.iter().find(|m| !full.is_match(m)) {
        return Err(Error::Unsound {
            regex,
            member: bad.clone(),
        });
    }
    Ok(regex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::build_template;
    use proptest::prelude::*;

    fn lits(s: &str) -> BTreeSet<ClassNode> {
        s.chars().map(ClassNode::Literal).collect()
    }

    fn set(nodes: &[ClassNode]) -> BTreeSet<ClassNode> {
        nodes.iter().copied().collect()
    }

    const TREE: AbstractionTree = AbstractionTree;

    #[test]
    fn dedup_examples() {
        let l = dedup_and_lengths(&["12", "12", "345"]);
        assert_eq!(l.unique.len(), 2);
        assert_eq!((l.min_len, l.max_len), (2, 3));
        let l = dedup_and_lengths(&["", "ab"]);
        assert_eq!((l.min_len, l.max_len), (0, 2));
        let l = dedup_and_lengths(&["a"]);
        assert_eq!((l.min_len, l.max_len), (1, 1));
    }

    #[test]
    fn coarse_examples() {
        let u = dedup_and_lengths(&["12", "345"]).unique;
        assert_eq!(coarse_class(&u), lits("12345"));
        assert_eq!(coarse_class(&dedup_and_lengths(&["a"]).unique), lits("a"));
        assert_eq!(coarse_class(&dedup_and_lengths(&["", "7"]).unique), lits("7"));
    }

    #[test]
    fn validity_rule() {
        assert!(is_valid(&lits("123")));
        assert!(!is_valid(&lits("1234")));
        assert!(is_valid(&set(&[ClassNode::Digit])));
    }

    #[test]
    fn abstraction_examples() {
        assert_eq!(abstract_up(&lits("01257"), &TREE), set(&[ClassNode::Digit]));
        assert_eq!(
            abstract_up(&lits("ab1234"), &TREE),
            set(&[ClassNode::Lower, ClassNode::Digit])
        );
        assert_eq!(abstract_up(&set(&[ClassNode::Any]), &TREE), set(&[ClassNode::Any]));
        // punctuation reaches top on the second lift and absorbs the rest
        let step1 = abstract_up(&lits("aA1-"), &TREE);
        assert_eq!(step1.len(), 4);
        assert_eq!(abstract_up(&step1, &TREE), set(&[ClassNode::Any]));
    }

    #[test]
    fn consolidate_examples() {
        assert_eq!(consolidate(&set(&[ClassNode::Lower, ClassNode::Digit])), "[a-z0-9]");
        assert_eq!(consolidate(&lits("a")), "a");
        assert_eq!(consolidate(&set(&[ClassNode::Any])), ".");
        assert_eq!(consolidate(&lits("x19")), "[19x]");
    }

    #[test]
    fn quantifier_examples() {
        assert_eq!(gen_quantifier(0, 2, false), Quantifier::Star);
        assert_eq!(gen_quantifier(0, 2, true).render(), "{0,2}");
        assert_eq!(gen_quantifier(2, 3, false).render(), "{2,3}");
        assert_eq!(gen_quantifier(1, 1, false).render(), "");
        assert_eq!(gen_quantifier(4, 4, false).render(), "{4}");
    }

    #[test]
    fn fragment_examples() {
        let g = |f: &[&str]| generate_slot_fragment(f, &TREE, SlotOptions::default());
        assert_eq!(g(&["12", "345"]), "[0-9]{2,3}");
        assert_eq!(g(&["a", "b"]), "[ab]");
        assert_eq!(g(&["", "x1", "9"]), "[19x]*");

        let lazy = SlotOptions {
            mode: MatchMode::Lazy,
            ..Default::default()
        };
        assert_eq!(generate_slot_fragment(&["12", "345"], &TREE, lazy), "[0-9]{2,3}?");
        assert_eq!(generate_slot_fragment(&["a", "b"], &TREE, lazy), "[ab]");
    }

    #[test]
    fn escape_examples() {
        assert_eq!(escape_literal("a.b"), r"a\.b");
        assert_eq!(escape_literal("abc"), "abc");
        assert_eq!(escape_literal("($)"), r"\(\$\)");
        // every escaped metacharacter is accepted by the engine
        let all: String = METACHARS.iter().collect();
        let re = compile_full(&escape_literal(&all)).unwrap();
        assert!(re.is_match(&all));
    }

    #[test]
    fn assemble_examples() {
        let t = build_template(&["(021)64085875", "(010)64085875"]).unwrap();
        let frags: Vec<String> = (0..t.slot_count())
            .map(|s| generate_slot_fragment(&t.slot_fillings(s), &TREE, SlotOptions::default()))
            .collect();
        assert_eq!(assemble_regex(&t, &frags).unwrap(), r"\(02*10*\)64085875");

        let t = build_template(&["(021)64085875", "(055)64085875"]).unwrap();
        assert_eq!(t.elements.len(), 3);
        assert_eq!(
            assemble_regex(&t, &["[0-9]{2}".to_string()]).unwrap(),
            r"\(0[0-9]{2}\)64085875"
        );

        let t = build_template(&["abc"]).unwrap();
        assert_eq!(assemble_regex(&t, &[]).unwrap(), "abc");

        let t = build_template(&["ab", "cd"]).unwrap();
        assert_eq!(assemble_regex(&t, &["[a-z]*".to_string()]).unwrap(), "[a-z]*");
    }

    #[test]
    fn unsound_fragment_detected() {
        let t = build_template(&["ab", "cd"]).unwrap();
        assert!(matches!(
            assemble_regex(&t, &["[0-9]*".to_string()]),
            Err(Error::Unsound { .. })
        ));
        assert!(matches!(
            assemble_regex(&t, &["[".to_string()]),
            Err(Error::CompileFailure { .. })
        ));
    }

    proptest! {
        #[test]
        fn fragment_matches_every_filling(
            fillings in proptest::collection::vec("[a-zA-Z0-9_ .\\-你好#]{0,6}", 1..10),
            lazy in any::<bool>(),
            bounded in any::<bool>(),
        ) {
            prop_assume!(fillings.iter().any(|f| !f.is_empty()));
            let opts = SlotOptions {
                mode: if lazy { MatchMode::Lazy } else { MatchMode::Greedy },
                bounded_star: bounded,
            };
            let frag = generate_slot_fragment(&fillings, &TREE, opts);
            let re = compile_full(&frag).unwrap();
            for f in &fillings {
                prop_assert!(re.is_match(f), "{frag} vs {f:?}");
            }
        }

        #[test]
        fn lifting_never_loses_members(chars in "[a-zA-Z0-9_ .\\-你]{1,12}") {
            let atoms = lits(&chars);
            let lifted = abstract_up(&atoms, &TREE);
            for c in chars.chars() {
                prop_assert!(lifted.iter().any(|a| a.contains(c)));
            }
        }

        #[test]
        fn terminates_within_depth(chars in "\\PC{1,30}") {
            let (atoms, lifts) = abstract_until_valid(lits(&chars), &TREE);
            prop_assert!(lifts <= TREE.depth() as usize);
            prop_assert!(is_valid(&atoms));
        }
    }
}
