use std::collections::BTreeSet;

use thiserror::Error;

use super::{CompiledModel, ContextEnv, EvalError, KripkeModel};
use crate::syntax::{formula_info, Formula};

/// Default bound on the number of models a single enumeration may visit.
pub const DEFAULT_CEILING: u128 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("max worlds must be at least 1")]
    NoWorlds,
    #[error("enumeration would visit {} models, above the ceiling of {ceiling}", count.map_or("too many".to_string(), |c| c.to_string()))]
    TooMany { count: Option<u128>, ceiling: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn bell(n: usize) -> u128 {
    // Bell triangle.
    let mut row = vec![1u128];
    for _ in 1..n.max(1) {
        let mut next = vec![*row.last().unwrap()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    *row.last().unwrap()
}

/// Σ_{n=1..max_worlds} Bell(n)^agents · 2^(n·atoms), or `None` on overflow.
pub fn model_count(max_worlds: usize, agents: usize, atoms: usize) -> Option<u128> {
    let mut total = 0u128;
    for n in 1..=max_worlds {
        let parts = bell(n).checked_pow(u32::try_from(agents).ok()?)?;
        let bits = u32::try_from(n.checked_mul(atoms)?).ok()?;
        let vals = 1u128.checked_shl(bits).filter(|_| bits < 127)?;
        total = total.checked_add(parts.checked_mul(vals)?)?;
    }
    Some(total)
}

/// Restricted growth strings of length `n`: every set partition exactly once,
/// in lexicographic order.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            go(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    go(&mut vec![0], 0, n, &mut out);
    out
}

/// Every model over worlds `w1..wn` (n = 1..=max_worlds), every partition
/// per agent, every valuation of the atoms.
///
/// Order: by n; then by the tuple of partitions (agents in name order,
/// partitions in restricted-growth order, first agent most significant);
/// then by valuation, read as a binary number whose bit `k·n + w` is the
/// value of the k-th atom (name order) at world `w`.
pub struct ModelIter {
    max_worlds: usize,
    agents: Vec<String>,
    atoms: Vec<String>,
    n: usize,
    parts: Vec<Vec<usize>>,
    choice: Vec<usize>,
    valuation: u128,
    done: bool,
}

impl ModelIter {
    fn start(&mut self, n: usize) {
        self.n = n;
        self.parts = partitions(n);
        self.choice = vec![0; self.agents.len()];
        self.valuation = 0;
    }

    fn advance(&mut self) {
        self.valuation += 1;
        if self.valuation < 1u128 << (self.n * self.atoms.len()) {
            return;
        }
        self.valuation = 0;
        for k in (0..self.choice.len()).rev() {
            self.choice[k] += 1;
            if self.choice[k] < self.parts.len() {
                return;
            }
            self.choice[k] = 0;
        }
        if self.n == self.max_worlds {
            self.done = true;
        } else {
            self.start(self.n + 1);
        }
    }

    fn current(&self) -> KripkeModel {
        let n = self.n;
        let worlds: Vec<String> = (1..=n).map(|k| format!("w{k}")).collect();
        let agents = self
            .agents
            .iter()
            .zip(&self.choice)
            .map(|(a, &c)| {
                let rgs = &self.parts[c];
                let blocks = rgs.iter().max().map_or(0, |m| m + 1);
                let mut classes = vec![Vec::new(); blocks];
                for (w, &b) in rgs.iter().enumerate() {
                    classes[b].push(worlds[w].clone());
                }
                (a.clone(), classes)
            })
            .collect();
        let valuation = self
            .atoms
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let ws = (0..n)
                    .filter(|w| self.valuation >> (k * n + w) & 1 == 1)
                    .map(|w| worlds[w].clone());
                (p.clone(), ws.collect())
            })
            .collect();
        KripkeModel {
            worlds,
            agents,
            valuation,
        }
    }
}

impl Iterator for ModelIter {
    type Item = KripkeModel;

    fn next(&mut self) -> Option<KripkeModel> {
        if self.done {
            return None;
        }
        let m = self.current();
        self.advance();
        Some(m)
    }
}

pub fn enumerate_models<A, P>(
    max_worlds: usize,
    agents: &[A],
    atoms: &[P],
) -> Result<ModelIter, EnumError>
where
    A: AsRef<str>,
    P: AsRef<str>,
{
    enumerate_models_with(max_worlds, agents, atoms, DEFAULT_CEILING)
}

pub fn enumerate_models_with<A, P>(
    max_worlds: usize,
    agents: &[A],
    atoms: &[P],
    ceiling: u128,
) -> Result<ModelIter, EnumError>
where
    A: AsRef<str>,
    P: AsRef<str>,
{
    if max_worlds == 0 {
        return Err(EnumError::NoWorlds);
    }
    let agents: Vec<String> = agents
        .iter()
        .map(|a| a.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let atoms: Vec<String> = atoms
        .iter()
        .map(|a| a.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let count = model_count(max_worlds, agents.len(), atoms.len());
    if count.is_none_or(|c| c > ceiling) {
        return Err(EnumError::TooMany { count, ceiling });
    }
    let mut it = ModelIter {
        max_worlds,
        agents,
        atoms,
        n: 1,
        parts: Vec::new(),
        choice: Vec::new(),
        valuation: 0,
        done: false,
    };
    it.start(1);
    Ok(it)
}

/// A model and a world of it.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Pointed {
    pub model: KripkeModel,
    pub world: String,
}

/// Atoms and agents a search for counter-models to `f` must range over.
pub fn search_vocabulary(f: &Formula, env: &ContextEnv) -> (BTreeSet<String>, BTreeSet<String>) {
    let info = formula_info(f);
    let mut atoms = BTreeSet::new();
    for name in info.atoms.iter().chain(&f.context_vocabulary()) {
        match env.get(name) {
            Some(body) => atoms.extend(body.atoms()),
            None => {
                atoms.insert(name.clone());
            }
        }
    }
    (info.agents, atoms)
}

/// The first pointed model (in enumeration order, then world order) that
/// falsifies `f`. `None` only means no counter-model up to `max_worlds`.
pub fn find_countermodel(
    f: &Formula,
    env: &ContextEnv,
    max_worlds: usize,
) -> Result<Option<Pointed>, SearchError> {
    find_countermodel_with(f, env, max_worlds, DEFAULT_CEILING)
}

pub fn find_countermodel_with(
    f: &Formula,
    env: &ContextEnv,
    max_worlds: usize,
    ceiling: u128,
) -> Result<Option<Pointed>, SearchError> {
    let (agents, atoms) = search_vocabulary(f, env);
    let agents: Vec<_> = agents.into_iter().collect();
    let atoms: Vec<_> = atoms.into_iter().collect();
    for m in enumerate_models_with(max_worlds, &agents, &atoms, ceiling)? {
        let cm = CompiledModel::new(&m).map_err(EvalError::Model)?;
        let ext = cm.extension(env, f)?;
        if let Some(w) = ext.complement(cm.world_count()).first() {
            let world = m.worlds[w].clone();
            return Ok(Some(Pointed { model: m, world }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::super::{check_model, satisfies};
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn bell_numbers() {
        let got: Vec<u128> = (1..=7).map(bell).collect();
        assert_eq!(got, vec![1, 2, 5, 15, 52, 203, 877]);
        for n in 1..=7 {
            assert_eq!(partitions(n).len() as u128, bell(n));
        }
    }

    #[test]
    fn counts_match_formula_and_enumeration() {
        let none: [&str; 0] = [];
        assert_eq!(enumerate_models(1, &["i"], &["p"]).unwrap().count(), 2);
        assert_eq!(model_count(2, 1, 1), Some(2 + 8));
        assert_eq!(
            enumerate_models(2, &["i"], &["p"])
                .unwrap()
                .filter(|m| m.worlds.len() == 2)
                .count(),
            8
        );
        let n3 = enumerate_models(3, &["i", "j"], &["p", "q"])
            .unwrap()
            .filter(|m| m.worlds.len() == 3)
            .count();
        assert_eq!(n3, 1600);
        assert_eq!(model_count(3, 2, 2), Some(4 + 64 + 1600));
        assert_eq!(enumerate_models(4, &none, &none).unwrap().count(), 4);
    }

    #[test]
    fn enumerated_models_are_distinct_partition_models() {
        let all: Vec<_> = enumerate_models(3, &["i"], &["p"]).unwrap().collect();
        for m in &all {
            assert!(check_model(m).is_empty());
        }
        let distinct: BTreeSet<String> = all
            .iter()
            .map(|m| serde_json::to_string(m).unwrap())
            .collect();
        assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn ceiling_guard() {
        assert!(matches!(
            enumerate_models_with(3, &["i", "j"], &["p", "q"], 100),
            Err(EnumError::TooMany {
                count: Some(1668),
                ..
            })
        ));
        assert!(matches!(
            enumerate_models(64, &["i"], &["p"]),
            Err(EnumError::TooMany { .. })
        ));
        assert_eq!(
            enumerate_models(0, &["i"], &["p"]).err(),
            Some(EnumError::NoWorlds)
        );
    }

    #[test]
    fn tautology_has_no_countermodel() {
        let f = parse_formula("a -> a").unwrap();
        assert_eq!(
            find_countermodel(&f, &ContextEnv::fresh(), 3).unwrap(),
            None
        );
    }

    #[test]
    fn countermodels_falsify() {
        let env = ContextEnv::fresh();
        for text in [
            "a -> K{i,1.1} a",
            "(K{j,1.2} K{k,1.2} p -> K{k,1.2} p)^ci",
            "(K{j,2.2} K{k,2.2} p -> K{k,2.2} p)^ci",
        ] {
            let f = parse_formula(text).unwrap();
            let pm = find_countermodel(&f, &env, 3).unwrap().expect(text);
            assert!(!satisfies(&pm.model, &pm.world, &env, &f).unwrap());
        }
        let f = parse_formula("a -> K{i,1.1} a").unwrap();
        assert_eq!(
            find_countermodel(&f, &env, 3)
                .unwrap()
                .unwrap()
                .model
                .worlds
                .len(),
            2
        );
    }

    #[test]
    fn vocabulary_replaces_bound_contexts_by_their_atoms() {
        let env: ContextEnv = serde_json::from_str(r#"{"ci":"p & ~q"}"#).unwrap();
        let f = parse_formula("(K{j,2.2} r)^ci").unwrap();
        let (agents, atoms) = search_vocabulary(&f, &env);
        assert_eq!(agents.into_iter().collect::<Vec<_>>(), vec!["j"]);
        assert_eq!(
            atoms.into_iter().collect::<Vec<_>>(),
            vec!["cj", "p", "q", "r"]
        );
    }
}
