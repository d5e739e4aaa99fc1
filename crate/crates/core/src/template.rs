//! Template generation: LCS anchors interleaved with variable slots.

use crate::abstraction::common_subsequence;
use crate::error::{Error, Result};
use crate::types::{Element, Template};

/// Leftmost positions of `needle` as a subsequence of `hay`.
fn leftmost_positions(needle: &[char], hay: &[char]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(needle.len());
    let mut from = 0;
    for &c in needle {
        let at = from + hay[from..].iter().position(|&h| h == c)?;
        out.push(at);
        from = at + 1;
    }
    Some(out)
}

/// Builds a template for one cluster.
///
/// Anchors come from the common subsequence of the cluster's distinct members
/// in sorted order. Two consecutive anchor characters stay in one anchor only
/// if they are adjacent in every member under leftmost alignment; elsewhere a
/// slot separates them. Leading and trailing slots appear only when some
/// member has text there.
pub fn build_template<S: AsRef<str>>(members: &[S]) -> Result<Template> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut canonical: Vec<&str> = members.iter().map(AsRef::as_ref).collect();
    canonical.sort_unstable();
    canonical.dedup();
    let common: Vec<char> = common_subsequence(&canonical)
        .unwrap_or_default()
        .chars()
        .collect();

    let member_chars: Vec<Vec<char>> = canonical.iter().map(|m| m.chars().collect()).collect();
    let alignments = member_chars
        .iter()
        .zip(&canonical)
        .map(|(chars, m)| {
            leftmost_positions(&common, chars).ok_or_else(|| Error::AlignmentFailure {
                member: m.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let elements = if common.is_empty() {
        vec![Element::Slot(0)]
    } else {
        let leading = alignments.iter().any(|p| p[0] > 0);
        let trailing = alignments
            .iter()
            .zip(&member_chars)
            .any(|(p, chars)| p[p.len() - 1] + 1 < chars.len());

        let mut elements = Vec::new();
        let mut slots = 0;
        let mut push_slot = |elements: &mut Vec<Element>| {
            elements.push(Element::Slot(slots));
            slots += 1;
        };
        if leading {
            push_slot(&mut elements);
        }
        let mut anchor = String::from(common[0]);
        for t in 1..common.len() {
            let adjacent = alignments.iter().all(|p| p[t] == p[t - 1] + 1);
            if !adjacent {
                elements.push(Element::Anchor(std::mem::take(&mut anchor)));
                push_slot(&mut elements);
            }
            anchor.push(common[t]);
        }
        elements.push(Element::Anchor(anchor));
        if trailing {
            push_slot(&mut elements);
        }
        elements
    };

    let fillings = members
        .iter()
        .map(|m| align_member(m.as_ref(), &elements))
        .collect::<Result<Vec<_>>>()?;
    Ok(Template {
        elements,
        members: members.iter().map(|m| m.as_ref().to_string()).collect(),
        fillings,
    })
}

/// Splits `member` into per-slot fillings against a template's elements,
/// aligning anchor characters leftmost.
///
/// Fails when an anchor is not contiguous in `member`, or when text falls in
/// a gap the template has no slot for.
pub fn align_member(member: &str, elements: &[Element]) -> Result<Vec<String>> {
    let fail = || Error::AlignmentFailure {
        member: member.to_string(),
    };
    let chars: Vec<char> = member.chars().collect();
    let anchor_chars: Vec<char> = elements
        .iter()
        .filter_map(|e| match e {
            Element::Anchor(a) => Some(a.chars()),
            Element::Slot(_) => None,
        })
        .flatten()
        .collect();
    let positions = leftmost_positions(&anchor_chars, &chars).ok_or_else(fail)?;

    let mut fillings = Vec::new();
    let mut cursor = 0; // next unconsumed char in member
    let mut k = 0; // next anchor char
    let mut pending_slot = false;
    for e in elements {
        match e {
            Element::Slot(_) => pending_slot = true,
            Element::Anchor(a) => {
                let len = a.chars().count();
                let start = positions[k];
                if positions[k..k + len]
                    .iter()
                    .enumerate()
                    .any(|(off, &p)| p != start + off)
                {
                    return Err(fail());
                }
                if pending_slot {
                    fillings.push(chars[cursor..start].iter().collect());
                    pending_slot = false;
                } else if start != cursor {
                    return Err(fail());
                }
                cursor = start + len;
                k += len;
            }
        }
    }
    if pending_slot {
        fillings.push(chars[cursor..].iter().collect());
    } else if cursor != chars.len() {
        return Err(fail());
    }
    Ok(fillings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn anchor(s: &str) -> Element {
        Element::Anchor(s.to_string())
    }

    #[test]
    fn phone_pair_template() {
        // leftmost LCS "(01)64085875"; the 1 sits at different offsets
        let t = build_template(&["(021)64085875", "(010)64085875"]).unwrap();
        assert_eq!(
            t.elements,
            [
                anchor("(0"),
                Element::Slot(0),
                anchor("1"),
                Element::Slot(1),
                anchor(")64085875")
            ]
        );
        assert_eq!(t.slot_fillings(0), ["2", ""]);
        assert_eq!(t.slot_fillings(1), ["", "0"]);
    }

    #[test]
    fn shared_prefix_template() {
        let t = build_template(&["SMS_12", "SMS_345"]).unwrap();
        assert_eq!(t.elements, [anchor("SMS_"), Element::Slot(0)]);
        assert_eq!(t.slot_fillings(0), ["12", "345"]);
    }

    #[test]
    fn single_member_is_one_anchor() {
        let t = build_template(&["abc"]).unwrap();
        assert_eq!(t.elements, [anchor("abc")]);
        assert_eq!(t.slot_count(), 0);
    }

    #[test]
    fn disjoint_members_become_one_slot() {
        let t = build_template(&["12", "ab"]).unwrap();
        assert_eq!(t.elements, [Element::Slot(0)]);
        assert_eq!(t.slot_fillings(0), ["12", "ab"]);
    }

    #[test]
    fn empty_cluster_rejected() {
        assert!(matches!(
            build_template::<&str>(&[]),
            Err(Error::EmptyCluster)
        ));
    }

    #[test]
    fn align_examples() {
        let mid = [anchor("(0"), Element::Slot(0), anchor(")5")];
        assert_eq!(align_member("(021)5", &mid).unwrap(), ["21"]);
        assert_eq!(align_member("(0)5", &mid).unwrap(), [""]);

        let led = [Element::Slot(0), anchor("(0"), Element::Slot(1), anchor(")5")];
        assert_eq!(align_member("x(0y)5", &led).unwrap(), ["x", "y"]);

        // prefix text with no leading slot
        assert!(matches!(
            align_member("x(0y)5", &mid),
            Err(Error::AlignmentFailure { .. })
        ));
        // anchor split apart
        assert!(align_member("(x0)5", &mid).is_err());
    }

    proptest! {
        #[test]
        fn reconstruction_and_shape(v in proptest::collection::vec("[ab01()_-]{1,10}", 1..12)) {
            let t = build_template(&v).unwrap();
            for (i, m) in v.iter().enumerate() {
                prop_assert_eq!(&t.reconstruct(i), m);
            }
            for w in t.elements.windows(2) {
                let both_anchor = matches!(w, [Element::Anchor(_), Element::Anchor(_)]);
                let both_slot = matches!(w, [Element::Slot(_), Element::Slot(_)]);
                prop_assert!(!both_anchor && !both_slot);
            }
            let anchor_chars: usize = t.anchors().map(|a| a.chars().count()).sum();
            prop_assert!(t.slot_count() <= anchor_chars + 1);
            for s in 0..t.slot_count() {
                prop_assert!(t.slot_fillings(s).iter().any(|f| !f.is_empty()));
            }
        }
    }
}
