use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::kripke::{ContextEnv, KripkeModel};
use crate::syntax::{formula_info, ContextFormula, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    T,
    F,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::T => Sign::F,
            Sign::F => Sign::T,
        }
    }
}

/// `sign formula` asserted at world `label`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedEntry {
    pub sign: Sign,
    pub formula: Formula,
    pub label: String,
}

/// A branch segment: the entries added on it, then how it ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTree {
    pub entries: Vec<SignedEntry>,
    pub end: ProofEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProofEnd {
    Closed {
        clash: String,
    },
    Split {
        on: SignedEntry,
        branches: Vec<ProofTree>,
    },
}

impl ProofTree {
    pub fn is_closed(&self) -> bool {
        match &self.end {
            ProofEnd::Closed { .. } => true,
            ProofEnd::Split { branches, .. } => {
                !branches.is_empty() && branches.iter().all(ProofTree::is_closed)
            }
        }
    }
}

impl std::fmt::Display for SignedEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = match self.sign {
            Sign::T => "T",
            Sign::F => "F",
        };
        write!(f, "{} {sign} {}", self.label, self.formula)
    }
}

impl ProofTree {
    /// Indented outline: entries one per line, branches nested under the
    /// entry they split on.
    pub fn to_text(&self) -> String {
        fn go(t: &ProofTree, depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            for e in &t.entries {
                out.push_str(&format!("{pad}{e}\n"));
            }
            match &t.end {
                ProofEnd::Closed { clash } => out.push_str(&format!("{pad}x {clash}\n")),
                ProofEnd::Split { on, branches } => {
                    for (k, b) in branches.iter().enumerate() {
                        out.push_str(&format!("{pad}branch {} on {on}\n", k + 1));
                        go(b, depth + 1, out);
                    }
                }
            }
        }
        let mut out = String::new();
        go(self, 0, &mut out);
        out
    }
}

type Id = usize;

#[derive(Clone, Debug)]
enum Node {
    Atom(String),
    Not(Id),
    And(Id, Id),
    Or(Id, Id),
    Imp(Id, Id),
    Iff(Id, Id),
    Know(usize, Id),
    Poss(usize, Id),
}

/// Subformulas of the input, interned.
struct Arena {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    ids: HashMap<Formula, Id>,
    agents: Vec<String>,
}

impl Arena {
    fn intern(&mut self, f: &Formula) -> Id {
        if let Some(&id) = self.ids.get(f) {
            return id;
        }
        let mut agent = |j: &String| match self.agents.iter().position(|a| a == j) {
            Some(k) => k,
            None => {
                self.agents.push(j.clone());
                self.agents.len() - 1
            }
        };
        let node = match f {
            Formula::Atom(p) => Node::Atom(p.clone()),
            Formula::Know(j, _, a) => {
                let k = agent(j);
                Node::Know(k, self.intern(a))
            }
            Formula::Poss(j, _, a) => {
                let k = agent(j);
                Node::Poss(k, self.intern(a))
            }
            Formula::Not(a) => Node::Not(self.intern(a)),
            Formula::And(a, b) => Node::And(self.intern(a), self.intern(b)),
            Formula::Or(a, b) => Node::Or(self.intern(a), self.intern(b)),
            Formula::Imp(a, b) => Node::Imp(self.intern(a), self.intern(b)),
            Formula::Iff(a, b) => Node::Iff(self.intern(a), self.intern(b)),
            Formula::Rel(..) => unreachable!("tableau input is relativization-free"),
        };
        self.nodes.push(node);
        self.formulas.push(f.clone());
        let id = self.nodes.len() - 1;
        self.ids.insert(f.clone(), id);
        id
    }
}

type Entry = (Sign, Id, usize);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Alpha,
    Beta,
    Modal,
    Done,
}

#[derive(Clone)]
struct Label {
    name: String,
    /// Cluster id per agent.
    cluster: Vec<usize>,
    children: usize,
}

#[derive(Clone)]
struct Branch {
    labels: Vec<Label>,
    next_cluster: usize,
    entries: Vec<Entry>,
    done: Vec<bool>,
    has: HashSet<Entry>,
}

enum Expansion {
    Add(Vec<Entry>),
    Split(Vec<Vec<Entry>>),
    Close(String),
    Nothing,
}

struct Prover<'a> {
    arena: Arena,
    env: &'a ContextEnv,
}

enum Outcome {
    Closed(ProofTree),
    Open(Box<Branch>),
}

impl Prover<'_> {
    fn kind(&self, (sign, id, _): Entry) -> Kind {
        match (&self.arena.nodes[id], sign) {
            (Node::Atom(p), sign) => match self.env.get(p) {
                Some(ContextFormula::Conj(lits)) if sign == Sign::F && lits.len() > 1 => Kind::Beta,
                Some(_) => Kind::Alpha,
                None => Kind::Done,
            },
            (Node::Not(_), _) => Kind::Alpha,
            (Node::And(..), Sign::T) | (Node::Or(..), Sign::F) | (Node::Imp(..), Sign::F) => {
                Kind::Alpha
            }
            (Node::And(..), Sign::F)
            | (Node::Or(..), Sign::T)
            | (Node::Imp(..), Sign::T)
            | (Node::Iff(..), _) => Kind::Beta,
            (Node::Know(..), _) | (Node::Poss(..), _) => Kind::Modal,
        }
    }

    fn literal(&mut self, atom: &str, positive: bool, w: usize) -> Entry {
        let id = self.arena.intern(&Formula::atom(atom));
        (if positive { Sign::T } else { Sign::F }, id, w)
    }

    fn expand(&mut self, b: &mut Branch, e: Entry) -> Expansion {
        let (sign, id, w) = e;
        use Sign::{F, T};
        match (self.arena.nodes[id].clone(), sign) {
            (Node::Atom(p), sign) => {
                let body = self.env.get(&p).cloned().expect("only bound atoms expand");
                match (body, sign) {
                    (ContextFormula::Top, T) | (ContextFormula::Bot, F) => Expansion::Nothing,
                    (ContextFormula::Top, F) => {
                        Expansion::Close(format!("F {p} at {} with {p} = true", b.labels[w].name))
                    }
                    (ContextFormula::Bot, T) => {
                        Expansion::Close(format!("T {p} at {} with {p} = false", b.labels[w].name))
                    }
                    (ContextFormula::Conj(lits), T) => Expansion::Add(
                        lits.iter()
                            .map(|l| self.literal(&l.atom, l.positive, w))
                            .collect(),
                    ),
                    (ContextFormula::Conj(lits), F) => Expansion::Split(
                        lits.iter()
                            .map(|l| vec![self.literal(&l.atom, !l.positive, w)])
                            .collect(),
                    ),
                }
            }
            (Node::Not(a), s) => Expansion::Add(vec![(s.flip(), a, w)]),
            (Node::And(a, c), T) => Expansion::Add(vec![(T, a, w), (T, c, w)]),
            (Node::Or(a, c), F) => Expansion::Add(vec![(F, a, w), (F, c, w)]),
            (Node::Imp(a, c), F) => Expansion::Add(vec![(T, a, w), (F, c, w)]),
            (Node::And(a, c), F) => Expansion::Split(vec![vec![(F, a, w)], vec![(F, c, w)]]),
            (Node::Or(a, c), T) => Expansion::Split(vec![vec![(T, a, w)], vec![(T, c, w)]]),
            (Node::Imp(a, c), T) => Expansion::Split(vec![vec![(F, a, w)], vec![(T, c, w)]]),
            (Node::Iff(a, c), T) => {
                Expansion::Split(vec![vec![(T, a, w), (T, c, w)], vec![(F, a, w), (F, c, w)]])
            }
            (Node::Iff(a, c), F) => {
                Expansion::Split(vec![vec![(T, a, w), (F, c, w)], vec![(F, a, w), (T, c, w)]])
            }
            // Universal: body at every member of the cluster, now and later.
            (Node::Know(j, a), T) => Expansion::Add(
                self.members(b, w, j)
                    .into_iter()
                    .map(|v| (T, a, v))
                    .collect(),
            ),
            (Node::Poss(j, a), F) => Expansion::Add(
                self.members(b, w, j)
                    .into_iter()
                    .map(|v| (F, a, v))
                    .collect(),
            ),
            // Existential: reuse a witness in the cluster if there is one.
            (Node::Know(j, a), F) => self.demand(b, w, j, (F, a)),
            (Node::Poss(j, a), T) => self.demand(b, w, j, (T, a)),
        }
    }

    fn members(&self, b: &Branch, w: usize, j: usize) -> Vec<usize> {
        let c = b.labels[w].cluster[j];
        (0..b.labels.len())
            .filter(|&v| b.labels[v].cluster[j] == c)
            .collect()
    }

    fn demand(&mut self, b: &mut Branch, w: usize, j: usize, (sign, a): (Sign, Id)) -> Expansion {
        if self
            .members(b, w, j)
            .into_iter()
            .any(|v| b.has.contains(&(sign, a, v)))
        {
            return Expansion::Nothing;
        }
        let v = self.new_label(b, w, j);
        let mut add = vec![(sign, a, v)];
        // Universal entries already in the cluster reach the newcomer.
        for &(s, id, u) in &b.entries {
            if b.labels[u].cluster[j] != b.labels[v].cluster[j] || u == v {
                continue;
            }
            match (&self.arena.nodes[id], s) {
                (Node::Know(k, body), Sign::T) if *k == j => add.push((Sign::T, *body, v)),
                (Node::Poss(k, body), Sign::F) if *k == j => add.push((Sign::F, *body, v)),
                _ => {}
            }
        }
        Expansion::Add(add)
    }

    fn new_label(&self, b: &mut Branch, w: usize, j: usize) -> usize {
        b.labels[w].children += 1;
        let mut name = format!(
            "{}{}{}",
            b.labels[w].name, self.arena.agents[j], b.labels[w].children
        );
        while b.labels.iter().any(|l| l.name == name) {
            name.push('\'');
        }
        let mut cluster = Vec::with_capacity(self.arena.agents.len());
        for k in 0..self.arena.agents.len() {
            if k == j {
                cluster.push(b.labels[w].cluster[j]);
            } else {
                cluster.push(b.next_cluster);
                b.next_cluster += 1;
            }
        }
        b.labels.push(Label {
            name,
            cluster,
            children: 0,
        });
        b.labels.len() - 1
    }

    /// Adds entries; returns a clash description if one arises.
    fn add(&self, b: &mut Branch, new: Vec<Entry>) -> Option<String> {
        for e in new {
            if !b.has.insert(e) {
                continue;
            }
            b.entries.push(e);
            b.done.push(false);
            let (s, id, w) = e;
            if b.has.contains(&(s.flip(), id, w)) {
                return Some(format!(
                    "{} at {}",
                    self.arena.formulas[id], b.labels[w].name
                ));
            }
        }
        None
    }

    fn entry(&self, b: &Branch, (sign, id, w): Entry) -> SignedEntry {
        SignedEntry {
            sign,
            formula: self.arena.formulas[id].clone(),
            label: b.labels[w].name.clone(),
        }
    }

    fn segment(&self, b: &Branch, from: usize) -> Vec<SignedEntry> {
        b.entries[from..]
            .iter()
            .map(|&e| self.entry(b, e))
            .collect()
    }

    fn run(&mut self, mut b: Branch, from: usize) -> Outcome {
        loop {
            let mut best: Option<(Kind, usize)> = None;
            for (k, &e) in b.entries.iter().enumerate() {
                if b.done[k] {
                    continue;
                }
                let kind = self.kind(e);
                if kind == Kind::Done {
                    b.done[k] = true;
                    continue;
                }
                if best.is_none_or(|(bk, _)| kind < bk) {
                    best = Some((kind, k));
                    if kind == Kind::Alpha {
                        break;
                    }
                }
            }
            let Some((_, k)) = best else {
                return Outcome::Open(Box::new(b));
            };
            b.done[k] = true;
            let e = b.entries[k];
            match self.expand(&mut b, e) {
                Expansion::Nothing => {}
                Expansion::Close(clash) => {
                    return Outcome::Closed(ProofTree {
                        entries: self.segment(&b, from),
                        end: ProofEnd::Closed { clash },
                    })
                }
                Expansion::Add(new) => {
                    if let Some(clash) = self.add(&mut b, new) {
                        return Outcome::Closed(ProofTree {
                            entries: self.segment(&b, from),
                            end: ProofEnd::Closed { clash },
                        });
                    }
                }
                Expansion::Split(options) => {
                    let mut branches = Vec::new();
                    for option in options {
                        let mut child = b.clone();
                        let start = child.entries.len();
                        let outcome = match self.add(&mut child, option) {
                            Some(clash) => Outcome::Closed(ProofTree {
                                entries: self.segment(&child, start),
                                end: ProofEnd::Closed { clash },
                            }),
                            None => self.run(child, start),
                        };
                        match outcome {
                            Outcome::Closed(t) => branches.push(t),
                            open => return open,
                        }
                    }
                    return Outcome::Closed(ProofTree {
                        entries: self.segment(&b, from),
                        end: ProofEnd::Split {
                            on: self.entry(&b, e),
                            branches,
                        },
                    });
                }
            }
        }
    }

    fn model(&self, b: &Branch) -> KripkeModel {
        let worlds: Vec<String> = b.labels.iter().map(|l| l.name.clone()).collect();
        let mut agents = BTreeMap::new();
        for (j, agent) in self.arena.agents.iter().enumerate() {
            let mut classes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
            for l in &b.labels {
                classes
                    .entry(l.cluster[j])
                    .or_default()
                    .push(l.name.clone());
            }
            agents.insert(agent.clone(), classes.into_values().collect());
        }
        let mut valuation: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for &(s, id, w) in &b.entries {
            if let Node::Atom(p) = &self.arena.nodes[id] {
                if self.env.get(p).is_none() {
                    let ws = valuation.entry(p.clone()).or_default();
                    if s == Sign::T {
                        ws.push(b.labels[w].name.clone());
                    }
                }
            }
        }
        for ws in valuation.values_mut() {
            ws.sort_by_key(|name| worlds.iter().position(|w| w == name));
            ws.dedup();
        }
        valuation.retain(|_, ws| !ws.is_empty());
        KripkeModel {
            worlds,
            agents,
            valuation,
        }
    }
}

pub(super) fn decide(f: &Formula, env: &ContextEnv) -> Verdict {
    let agents = formula_info(f).agents.into_iter().collect();
    let mut arena = Arena {
        nodes: Vec::new(),
        formulas: Vec::new(),
        ids: HashMap::new(),
        agents,
    };
    let root = arena.intern(f);
    let n_agents = arena.agents.len();
    let mut prover = Prover { arena, env };
    let mut b = Branch {
        labels: vec![Label {
            name: "1".into(),
            cluster: vec![0; n_agents],
            children: 0,
        }],
        next_cluster: 1,
        entries: Vec::new(),
        done: Vec::new(),
        has: HashSet::new(),
    };
    let outcome = match prover.add(&mut b, vec![(Sign::F, root, 0)]) {
        Some(clash) => Outcome::Closed(ProofTree {
            entries: prover.segment(&b, 0),
            end: ProofEnd::Closed { clash },
        }),
        None => prover.run(b, 0),
    };
    match outcome {
        Outcome::Closed(proof) => Verdict::Valid { proof },
        Outcome::Open(b) => Verdict::Invalid {
            model: prover.model(&b),
            world: "1".into(),
        },
    }
}
