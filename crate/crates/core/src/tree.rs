//! Learned trees: classification, rule extraction, rendering and the
//! `SDT v1` text format.
//!
//! ```text
//! SDT v1
//! attrs 2
//! r0 center
//! class contained
//! class not_contained
//! node counts=70,70 <(Di,Di)>(A1 >= 9)
//!   node counts=70,35 <(D,D)>(A2 <= 0)
//!     leaf 0 counts=70,0 stop=pure
//!     leaf 1 counts=0,35 stop=pure
//!   leaf 1 counts=0,35 stop=pure
//! ```
//!
//! The first child of a `node` is its yes-branch.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::HyperRectangle;
use crate::logic::{Decision, Notation};
use crate::model::{refs_after, R0Policy, SpatialInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Entropy at or below `max_leaf_entropy`.
    Pure,
    /// Fewer than `2 * min_samples_leaf` instances.
    TooSmall,
    MaxDepth,
    /// No admissible decision with enough gain.
    NoSplit,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Pure => "pure",
            StopReason::TooSmall => "too_small",
            StopReason::MaxDepth => "max_depth",
            StopReason::NoSplit => "no_split",
        }
    }
}

impl FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            StopReason::Pure,
            StopReason::TooSmall,
            StopReason::MaxDepth,
            StopReason::NoSplit,
        ]
        .into_iter()
        .find(|r| r.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown stop reason `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf {
        class: usize,
        counts: Vec<u64>,
        reason: StopReason,
    },
    Internal {
        decision: Decision,
        counts: Vec<u64>,
        yes: Box<Node>,
        no: Box<Node>,
    },
}

impl Node {
    pub fn counts(&self) -> &[u64] {
        match self {
            Node::Leaf { counts, .. } | Node::Internal { counts, .. } => counts,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { yes, no, .. } => 1 + yes.depth().max(no.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Internal { yes, no, .. } => yes.leaf_count() + no.leaf_count(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Internal { yes, no, .. } => 1 + yes.internal_count() + no.internal_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpatialDecisionTree {
    root: Node,
    classes: Vec<String>,
    n_attributes: usize,
    r0: R0Policy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Dot,
    Rules,
}

impl FromStr for RenderFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "dot" => Ok(RenderFormat::Dot),
            "rules" => Ok(RenderFormat::Rules),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// One root-to-leaf path. `true` marks a satisfied decision.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub antecedent: Vec<(Decision, bool)>,
    pub consequent: usize,
}

impl Rule {
    /// Follows the antecedent from `{r0}` the way classification does.
    pub fn fires(&self, inst: &SpatialInstance, r0: &HyperRectangle) -> Result<bool> {
        let mut refs = vec![r0.clone()];
        for (d, polarity) in &self.antecedent {
            let next = refs_after(inst, &refs, d)?;
            if next.is_empty() == *polarity {
                return Ok(false);
            }
            if *polarity {
                refs = next;
            }
        }
        Ok(true)
    }

    /// Nested formula: literals after a satisfied modal decision are
    /// evaluated at its new refs, so they are written inside it.
    pub fn formula(&self, notation: Notation) -> String {
        fn go(lits: &[(Decision, bool)], notation: Notation) -> String {
            let Some(((d, polarity), rest)) = lits.split_first() else {
                return String::new();
            };
            let tail = go(rest, notation);
            let and = if notation == Notation::Unicode { " ∧ " } else { " & " };
            match (&d.operator, polarity) {
                (Some(_), true) => {
                    let head = d.display(notation);
                    let inner = head.strip_suffix(')').unwrap_or(&head);
                    if tail.is_empty() {
                        head.clone()
                    } else {
                        format!("{inner}{and}{tail})")
                    }
                }
                _ => {
                    let lit = if *polarity {
                        d.display(notation)
                    } else {
                        d.negated_display(notation)
                    };
                    if tail.is_empty() {
                        lit
                    } else {
                        format!("{lit}{and}{tail}")
                    }
                }
            }
        }
        let body = go(&self.antecedent, notation);
        if body.is_empty() {
            "⊤".to_string()
        } else {
            body
        }
    }

    fn machine_line(&self) -> String {
        let lits: Vec<String> = self
            .antecedent
            .iter()
            .map(|(d, p)| format!("{}{}", if *p { '+' } else { '-' }, d))
            .collect();
        let lhs = if lits.is_empty() {
            "true".to_string()
        } else {
            lits.join(" & ")
        };
        format!("{lhs} => {}", self.consequent)
    }
}

/// Parses the rules format: one `+d & -d => k` line per rule (`true` for
/// an empty antecedent); `#` lines and blank lines are ignored.
pub fn parse_rules(text: &str) -> Result<Vec<Rule>> {
    let mut rules = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| Error::Parse {
            line: i + 1,
            message: m,
        };
        let (lhs, rhs) = line.rsplit_once(" => ").ok_or_else(|| err("missing `=>`".into()))?;
        let consequent = rhs.trim().parse().map_err(|_| err(format!("bad class `{rhs}`")))?;
        let mut antecedent = Vec::new();
        if lhs.trim() != "true" {
            for lit in lhs.split(" & ") {
                let lit = lit.trim();
                let (polarity, d) = match lit.as_bytes().first() {
                    Some(b'+') => (true, &lit[1..]),
                    Some(b'-') => (false, &lit[1..]),
                    _ => return Err(err(format!("literal `{lit}` lacks a polarity"))),
                };
                let d = d.parse::<Decision>().map_err(|e| err(e.to_string()))?;
                antecedent.push((d, polarity));
            }
        }
        rules.push(Rule { antecedent, consequent });
    }
    Ok(rules)
}

fn counts_text(c: &[u64]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl SpatialDecisionTree {
    pub fn new(root: Node, classes: Vec<String>, n_attributes: usize, r0: R0Policy) -> Self {
        SpatialDecisionTree {
            root,
            classes,
            n_attributes,
            r0,
        }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_attributes(&self) -> usize {
        self.n_attributes
    }

    pub fn r0_policy(&self) -> &R0Policy {
        &self.r0
    }

    /// Classifies from the tree's own `r0` policy.
    pub fn classify(&self, inst: &SpatialInstance) -> Result<usize> {
        let r0 = self.r0.resolve(&inst.bounds())?;
        self.classify_from(inst, &r0)
    }

    /// The yes-branch continues from the decision's new refs; the
    /// no-branch keeps the current ones.
    pub fn classify_from(&self, inst: &SpatialInstance, r0: &HyperRectangle) -> Result<usize> {
        let mut refs = vec![r0.clone()];
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class, .. } => return Ok(*class),
                Node::Internal { decision, yes, no, .. } => {
                    let next = refs_after(inst, &refs, decision)?;
                    if next.is_empty() {
                        node = no;
                    } else {
                        refs = next;
                        node = yes;
                    }
                }
            }
        }
    }

    pub fn classify_batch<I: AsRef<SpatialInstance> + Sync>(&self, instances: &[I]) -> Result<Vec<usize>> {
        instances.par_iter().map(|i| self.classify(i.as_ref())).collect()
    }

    /// One rule per leaf, left to right.
    pub fn extract_rules(&self) -> Vec<Rule> {
        fn go(node: &Node, path: &mut Vec<(Decision, bool)>, out: &mut Vec<Rule>) {
            match node {
                Node::Leaf { class, .. } => out.push(Rule {
                    antecedent: path.clone(),
                    consequent: *class,
                }),
                Node::Internal { decision, yes, no, .. } => {
                    path.push((decision.clone(), true));
                    go(yes, path, out);
                    path.last_mut().expect("pushed").1 = false;
                    go(no, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(&self.root, &mut Vec::new(), &mut out);
        out
    }

    fn class_name(&self, c: usize) -> &str {
        self.classes.get(c).map_or("?", String::as_str)
    }

    pub fn render(&self, format: RenderFormat) -> String {
        match format {
            RenderFormat::Text => self.render_text(),
            RenderFormat::Dot => self.render_dot(),
            RenderFormat::Rules => self.render_rules(),
        }
    }

    pub fn render_named(&self, format: &str) -> Result<String> {
        Ok(self.render(format.parse()?))
    }

    fn render_text(&self) -> String {
        fn go(t: &SpatialDecisionTree, node: &Node, indent: usize, prefix: &str, out: &mut String) {
            let pad = "  ".repeat(indent);
            match node {
                Node::Leaf { class, counts, .. } => {
                    let _ = writeln!(
                        out,
                        "{pad}{prefix}leaf: {} (counts {})",
                        t.class_name(*class),
                        counts_text(counts)
                    );
                }
                Node::Internal {
                    decision,
                    counts,
                    yes,
                    no,
                } => {
                    let _ = writeln!(
                        out,
                        "{pad}{prefix}{} (counts {})",
                        decision.display(Notation::Unicode),
                        counts_text(counts)
                    );
                    go(t, yes, indent + 1, "yes: ", out);
                    go(t, no, indent + 1, "no: ", out);
                }
            }
        }
        let mut out = String::new();
        go(self, &self.root, 0, "", &mut out);
        out
    }

    fn render_dot(&self) -> String {
        fn go(t: &SpatialDecisionTree, node: &Node, next: &mut usize, out: &mut String) -> usize {
            let id = *next;
            *next += 1;
            match node {
                Node::Leaf { class, counts, .. } => {
                    let _ = writeln!(
                        out,
                        "  n{id} [shape=box, label=\"{}\\n{}\"];",
                        dot_escape(t.class_name(*class)),
                        counts_text(counts)
                    );
                }
                Node::Internal {
                    decision,
                    counts,
                    yes,
                    no,
                } => {
                    let _ = writeln!(out, "  n{id} [shape=ellipse, label=\"{}\"];", counts_text(counts));
                    let y = go(t, yes, next, out);
                    let n = go(t, no, next, out);
                    let _ = writeln!(
                        out,
                        "  n{id} -> n{y} [label=\"{}\"];",
                        dot_escape(&decision.display(Notation::Unicode))
                    );
                    let _ = writeln!(
                        out,
                        "  n{id} -> n{n} [label=\"{}\", style=dashed];",
                        dot_escape(&decision.negated_display(Notation::Unicode))
                    );
                }
            }
            id
        }
        let mut out = String::from("digraph tree {\n");
        go(self, &self.root, &mut 0, &mut out);
        out.push_str("}\n");
        out
    }

    fn render_rules(&self) -> String {
        let mut out = String::new();
        for rule in self.extract_rules() {
            let _ = writeln!(
                out,
                "# {} ⇒ {}",
                rule.formula(Notation::Unicode),
                self.class_name(rule.consequent)
            );
            let _ = writeln!(out, "{}", rule.machine_line());
        }
        out
    }

    pub fn to_text(&self) -> String {
        fn go(node: &Node, indent: usize, out: &mut String) {
            let pad = "  ".repeat(indent);
            match node {
                Node::Leaf { class, counts, reason } => {
                    let _ = writeln!(
                        out,
                        "{pad}leaf {class} counts={} stop={}",
                        counts_text(counts),
                        reason.name()
                    );
                }
                Node::Internal {
                    decision,
                    counts,
                    yes,
                    no,
                } => {
                    let _ = writeln!(out, "{pad}node counts={} {decision}", counts_text(counts));
                    go(yes, indent + 1, out);
                    go(no, indent + 1, out);
                }
            }
        }
        let mut out = String::from("SDT v1\n");
        let _ = writeln!(out, "attrs {}", self.n_attributes);
        let _ = writeln!(out, "r0 {}", self.r0);
        for c in &self.classes {
            let _ = writeln!(out, "class {c}");
        }
        go(&self.root, 0, &mut out);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .peekable();
        let err = |line: usize, m: &str| Error::Parse {
            line: line + 1,
            message: m.to_string(),
        };
        match lines.next() {
            Some((_, "SDT v1")) => {}
            _ => return Err(Error::MalformedHeader("expected `SDT v1`".into())),
        }
        let mut n_attributes = None;
        let mut r0 = R0Policy::Center;
        let mut classes = Vec::new();
        while let Some(&(i, line)) = lines.peek() {
            if let Some(v) = line.strip_prefix("attrs ") {
                n_attributes = Some(v.trim().parse().map_err(|_| err(i, "bad attrs"))?);
            } else if let Some(v) = line.strip_prefix("r0 ") {
                r0 = v.parse()?;
            } else if let Some(v) = line.strip_prefix("class ") {
                classes.push(v.to_string());
            } else {
                break;
            }
            lines.next();
        }
        let n_attributes = n_attributes.ok_or_else(|| Error::MalformedHeader("missing `attrs`".into()))?;

        fn counts(s: &str) -> Option<Vec<u64>> {
            s.strip_prefix("counts=")?.split(',').map(|v| v.parse().ok()).collect()
        }

        fn node<'a>(
            lines: &mut impl Iterator<Item = (usize, &'a str)>,
            depth: usize,
            n_classes: usize,
        ) -> Result<Node> {
            let (i, raw) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: "unexpected end of tree".into(),
            })?;
            let err = |m: &str| Error::Parse {
                line: i + 1,
                message: m.to_string(),
            };
            let body = raw
                .strip_prefix(&"  ".repeat(depth))
                .ok_or_else(|| err("bad indentation"))?;
            if body.starts_with(' ') {
                return Err(err("bad indentation"));
            }
            if let Some(rest) = body.strip_prefix("leaf ") {
                let mut parts = rest.split_whitespace();
                let class: usize = parts
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| err("bad leaf class"))?;
                let c = parts.next().and_then(counts).ok_or_else(|| err("bad counts"))?;
                let reason = parts
                    .next()
                    .and_then(|s| s.strip_prefix("stop="))
                    .ok_or_else(|| err("missing stop reason"))?
                    .parse()?;
                if class >= n_classes || c.len() != n_classes {
                    return Err(err("class index or counts do not match the class list"));
                }
                return Ok(Node::Leaf {
                    class,
                    counts: c,
                    reason,
                });
            }
            let rest = body
                .strip_prefix("node ")
                .ok_or_else(|| err("expected `node` or `leaf`"))?;
            let (c, d) = rest.split_once(' ').ok_or_else(|| err("missing decision"))?;
            let c = counts(c).ok_or_else(|| err("bad counts"))?;
            let decision: Decision = d.parse().map_err(|e: Error| err(&e.to_string()))?;
            let yes = node(lines, depth + 1, n_classes)?;
            let no = node(lines, depth + 1, n_classes)?;
            Ok(Node::Internal {
                decision,
                counts: c,
                yes: Box::new(yes),
                no: Box::new(no),
            })
        }

        let root = node(&mut lines, 0, classes.len())?;
        if let Some((i, _)) = lines.next() {
            return Err(err(i, "trailing content after tree"));
        }
        Ok(SpatialDecisionTree::new(root, classes, n_attributes, r0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Comparator, Gamma, OperatorSpec};

    fn leaf(class: usize, counts: Vec<u64>) -> Node {
        Node::Leaf {
            class,
            counts,
            reason: StopReason::Pure,
        }
    }

    fn internal(d: &str, counts: Vec<u64>, yes: Node, no: Node) -> Node {
        Node::Internal {
            decision: d.parse().unwrap(),
            counts,
            yes: Box::new(yes),
            no: Box::new(no),
        }
    }

    fn names() -> Vec<String> {
        vec!["C₁".into(), "C₂".into()]
    }

    #[test]
    fn leaf_tree() {
        let t = SpatialDecisionTree::new(leaf(1, vec![0, 3]), names(), 1, R0Policy::Center);
        let inst = SpatialInstance::new(1, 3, 3, vec![0.0; 9], 0).unwrap();
        assert_eq!(t.classify(&inst).unwrap(), 1);
        assert_eq!(t.render(RenderFormat::Text), "leaf: C₂ (counts 0,3)\n");
        let rules = t.extract_rules();
        assert_eq!(rules.len(), 1);
        assert!(rules[0].antecedent.is_empty());
        assert_eq!(parse_rules(&t.render(RenderFormat::Rules)).unwrap(), rules);
        assert!(t.render_named("svg").is_err());
    }

    #[test]
    fn tautology_goes_left() {
        let root = internal("A1 >= -1000", vec![1, 1], leaf(0, vec![1, 0]), leaf(1, vec![0, 1]));
        let t = SpatialDecisionTree::new(root, names(), 1, R0Policy::Center);
        for v in [-5.0, 0.0, 7.5] {
            let inst = SpatialInstance::new(1, 3, 3, vec![v; 9], 1).unwrap();
            assert_eq!(t.classify(&inst).unwrap(), 0);
        }
    }

    /// The spatial tree of the Salinas-A comparison figure.
    fn fig4_like() -> SpatialDecisionTree {
        let c = |k: usize| leaf(k - 1, vec![1; 6]);
        let root = internal(
            "<NTPPi>(A43 >=_0.8 1978)",
            vec![1; 6],
            internal(
                "A17 >= 1743",
                vec![1; 6],
                internal("A67 >=_0.6 2656", vec![1; 6], c(6), c(5)),
                c(1),
            ),
            internal(
                "<EC>(A83 >= 638)",
                vec![1; 6],
                internal("A6 <= 1625", vec![1; 6], c(2), c(3)),
                c(4),
            ),
        );
        let names = (1..=6)
            .map(|k| format!("C{}", char::from_u32('₀' as u32 + k).unwrap()))
            .collect();
        SpatialDecisionTree::new(root, names, 200, R0Policy::Center)
    }

    #[test]
    fn fig4_rule_path() {
        let t = fig4_like();
        let rules = t.extract_rules();
        assert_eq!(rules.len(), 6);
        assert_eq!(rules[3].consequent, 1);
        let pretty = t.render(RenderFormat::Rules);
        assert!(pretty.contains("# [NTPP⁻¹](A₄₃ <₀.₂ 1978) ∧ ⟨EC⟩(A₈₃ ≥ 638 ∧ A₆ ≤ 1625) ⇒ C₂\n"));
        let dual: Vec<String> = rules[3]
            .antecedent
            .iter()
            .map(|(d, p)| {
                if *p {
                    d.display(Notation::Unicode)
                } else {
                    d.negated_display(Notation::Unicode)
                }
            })
            .collect();
        assert_eq!(dual, ["[NTPP⁻¹](A₄₃ <₀.₂ 1978)", "⟨EC⟩(A₈₃ ≥ 638)", "A₆ ≤ 1625"]);
        let dot = t.render(RenderFormat::Dot);
        assert_eq!(dot.matches("shape=ellipse").count(), 5);
        assert_eq!(dot.matches("shape=box").count(), 6);
        assert!(dot.contains("label=\"A₁₇ < 1743\""));
        assert!(dot.contains("label=\"A₆₇ <₀.₄ 2656\""));
        assert_eq!(parse_rules(&pretty).unwrap(), rules);
    }

    #[test]
    fn serialization_round_trip() {
        let t = fig4_like();
        let text = t.to_text();
        let back = SpatialDecisionTree::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_text(), text);
        assert!(SpatialDecisionTree::from_text("SDT v2\n").is_err());
        assert!(SpatialDecisionTree::from_text(&text.replace("  leaf 1", "leaf 1")).is_err());
    }

    #[test]
    fn rules_match_classification() {
        let d = Decision::modal(
            "(Di,Di)".parse::<OperatorSpec>().unwrap(),
            0,
            Comparator::Ge,
            5.0,
            Gamma::ONE,
        );
        let root = Node::Internal {
            decision: d,
            counts: vec![1, 1],
            yes: Box::new(internal(
                "A1 <= 2",
                vec![1, 0],
                leaf(1, vec![0, 1]),
                leaf(0, vec![1, 0]),
            )),
            no: Box::new(leaf(1, vec![0, 1])),
        };
        let t = SpatialDecisionTree::new(root, names(), 1, R0Policy::Center);
        let r0 = HyperRectangle::unit_2d(2, 2);
        for vals in [[9.0f32; 9], [1.0; 9], [5.0, 5.0, 5.0, 5.0, 1.0, 5.0, 5.0, 5.0, 5.0]] {
            let inst = SpatialInstance::new(1, 3, 3, vals.to_vec(), 0).unwrap();
            let c = t.classify_from(&inst, &r0).unwrap();
            let fired: Vec<usize> = t
                .extract_rules()
                .iter()
                .filter(|r| r.fires(&inst, &r0).unwrap())
                .map(|r| r.consequent)
                .collect();
            assert_eq!(fired, vec![c]);
        }
    }
}
