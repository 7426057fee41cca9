//! Weighted deferred acceptance with acceptor capacities.
//!
//! Both stages of the pipeline reduce to the same problem: proposers rank
//! acceptors by pair weight, acceptors rank proposers by the same weight,
//! and a pair with no weight is never proposed. Equal weights are broken by
//! list position (earlier wins), so every instance has strict preferences
//! and a unique proposer-optimal stable matching.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Debug;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("duplicate proposer {0}")]
    DuplicateProposer(String),
    #[error("duplicate acceptor {0}")]
    DuplicateAcceptor(String),
    #[error("unknown proposer {0}")]
    UnknownProposer(String),
    #[error("unknown acceptor {0}")]
    UnknownAcceptor(String),
    #[error("acceptor {0} has zero capacity")]
    ZeroCapacity(String),
    #[error("weight for ({0}, {1}) is not finite")]
    NonFiniteWeight(String, String),
    #[error("matching does not fit instance: {0}")]
    Structural(String),
}

/// A matching problem. Proposer and acceptor order doubles as tie-break
/// priority.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchInstance<P, A> {
    proposers: Vec<P>,
    acceptors: Vec<A>,
    capacity: Vec<usize>,
    weights: BTreeMap<(usize, usize), f64>,
    proposer_index: BTreeMap<P, usize>,
    acceptor_index: BTreeMap<A, usize>,
}

impl<P, A> MatchInstance<P, A>
where
    P: Ord + Clone + Debug,
    A: Ord + Clone + Debug,
{
    pub fn new(
        proposers: impl IntoIterator<Item = P>,
        acceptors: impl IntoIterator<Item = (A, usize)>,
    ) -> Result<Self, MatchError> {
        let proposers: Vec<P> = proposers.into_iter().collect();
        let mut proposer_index = BTreeMap::new();
        for (i, p) in proposers.iter().enumerate() {
            if proposer_index.insert(p.clone(), i).is_some() {
                return Err(MatchError::DuplicateProposer(format!("{p:?}")));
            }
        }
        let mut acceptor_list = Vec::new();
        let mut capacity = Vec::new();
        let mut acceptor_index = BTreeMap::new();
        for (i, (a, cap)) in acceptors.into_iter().enumerate() {
            if cap == 0 {
                return Err(MatchError::ZeroCapacity(format!("{a:?}")));
            }
            if acceptor_index.insert(a.clone(), i).is_some() {
                return Err(MatchError::DuplicateAcceptor(format!("{a:?}")));
            }
            acceptor_list.push(a);
            capacity.push(cap);
        }
        Ok(Self {
            proposers,
            acceptors: acceptor_list,
            capacity,
            weights: BTreeMap::new(),
            proposer_index,
            acceptor_index,
        })
    }

    /// Permits `p` to propose to `a` with the given weight.
    pub fn allow(&mut self, p: &P, a: &A, weight: f64) -> Result<(), MatchError> {
        let pi = *self
            .proposer_index
            .get(p)
            .ok_or_else(|| MatchError::UnknownProposer(format!("{p:?}")))?;
        let ai = *self
            .acceptor_index
            .get(a)
            .ok_or_else(|| MatchError::UnknownAcceptor(format!("{a:?}")))?;
        if !weight.is_finite() {
            return Err(MatchError::NonFiniteWeight(format!("{p:?}"), format!("{a:?}")));
        }
        self.weights.insert((pi, ai), weight);
        Ok(())
    }

    pub fn proposers(&self) -> &[P] {
        &self.proposers
    }

    pub fn acceptors(&self) -> &[A] {
        &self.acceptors
    }

    pub fn capacity(&self, a: &A) -> Option<usize> {
        self.acceptor_index.get(a).map(|&i| self.capacity[i])
    }

    pub fn weight(&self, p: &P, a: &A) -> Option<f64> {
        let pi = self.proposer_index.get(p)?;
        let ai = self.acceptor_index.get(a)?;
        self.weights.get(&(*pi, *ai)).copied()
    }

    /// Number of permitted (proposer, acceptor) pairs.
    pub fn allowed_pairs(&self) -> usize {
        self.weights.len()
    }

    /// Allowed pairs as `(proposer, acceptor, weight)`.
    pub fn pairs(&self) -> impl Iterator<Item = (&P, &A, f64)> {
        self.weights
            .iter()
            .map(|(&(p, a), &w)| (&self.proposers[p], &self.acceptors[a], w))
    }

    /// Same instance with every weight passed through `f`.
    pub fn map_weights(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        for w in out.weights.values_mut() {
            *w = f(*w);
        }
        out
    }

    /// Proposer `p` ranks acceptor `a1` above `a2`.
    fn proposer_prefers(&self, p: usize, a1: usize, a2: usize) -> bool {
        let w1 = self.weights[&(p, a1)];
        let w2 = self.weights[&(p, a2)];
        match w1.total_cmp(&w2) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => a1 < a2,
        }
    }

    /// Acceptor `a` ranks proposer `p1` above `p2`.
    fn acceptor_prefers(&self, a: usize, p1: usize, p2: usize) -> bool {
        let w1 = self.weights[&(p1, a)];
        let w2 = self.weights[&(p2, a)];
        match w1.total_cmp(&w2) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => p1 < p2,
        }
    }

    fn preference_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.proposers.len()];
        for &(p, a) in self.weights.keys() {
            lists[p].push(a);
        }
        for (p, list) in lists.iter_mut().enumerate() {
            list.sort_by(|&x, &y| {
                if x == y {
                    Ordering::Equal
                } else if self.proposer_prefers(p, x, y) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            });
        }
        lists
    }
}

/// Final pairing. Each proposer is either matched once or unmatched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching<P: Ord, A> {
    pub assignment: BTreeMap<P, A>,
    pub unmatched: BTreeSet<P>,
}

impl<P: Ord + Clone, A: Ord + Clone> Matching<P, A> {
    pub fn partner(&self, p: &P) -> Option<&A> {
        self.assignment.get(p)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&P, &A)> {
        self.assignment.iter()
    }

    pub fn load(&self, a: &A) -> usize {
        self.assignment.values().filter(|x| *x == a).count()
    }
}

/// Protocol steps, reported to an observer as they happen.
#[derive(Clone, Debug, PartialEq)]
pub enum MatchEvent<'a, P, A> {
    Propose { proposer: &'a P, acceptor: &'a A, weight: f64 },
    /// `held` is the acceptor's tentative load after accepting.
    Accept { proposer: &'a P, acceptor: &'a A, held: usize },
    Reject { proposer: &'a P, acceptor: &'a A },
    /// Tentative match released to make room for a better proposal.
    Evict { proposer: &'a P, acceptor: &'a A, held: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchOutcome<P: Ord, A> {
    pub matching: Matching<P, A>,
    pub proposals: usize,
}

/// Proposer-optimal stable matching.
pub fn deferred_acceptance<P, A>(instance: &MatchInstance<P, A>) -> Matching<P, A>
where
    P: Ord + Clone + Debug,
    A: Ord + Clone + Debug,
{
    deferred_acceptance_observed(instance, |_| {}).matching
}

/// [`deferred_acceptance`] with a hook that sees every protocol step.
pub fn deferred_acceptance_observed<'a, P, A>(
    instance: &'a MatchInstance<P, A>,
    mut observe: impl FnMut(MatchEvent<'a, P, A>),
) -> MatchOutcome<P, A>
where
    P: Ord + Clone + Debug,
    A: Ord + Clone + Debug,
{
    let prefs = instance.preference_lists();
    let mut next = vec![0usize; instance.proposers.len()];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); instance.acceptors.len()];
    let mut partner: Vec<Option<usize>> = vec![None; instance.proposers.len()];
    let mut free: VecDeque<usize> = (0..instance.proposers.len()).collect();
    let mut proposals = 0usize;

    while let Some(p) = free.pop_front() {
        let Some(&a) = prefs[p].get(next[p]) else {
            continue;
        };
        next[p] += 1;
        proposals += 1;
        let (pid, aid) = (&instance.proposers[p], &instance.acceptors[a]);
        observe(MatchEvent::Propose {
            proposer: pid,
            acceptor: aid,
            weight: instance.weights[&(p, a)],
        });

        if held[a].len() < instance.capacity[a] {
            held[a].push(p);
            partner[p] = Some(a);
            observe(MatchEvent::Accept { proposer: pid, acceptor: aid, held: held[a].len() });
            continue;
        }

        let (slot, &weakest) = held[a]
            .iter()
            .enumerate()
            .min_by(|(_, &x), (_, &y)| {
                if x == y {
                    Ordering::Equal
                } else if instance.acceptor_prefers(a, x, y) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            })
            .expect("full acceptor holds at least one proposer");

        if instance.acceptor_prefers(a, p, weakest) {
            held[a].swap_remove(slot);
            partner[weakest] = None;
            observe(MatchEvent::Evict {
                proposer: &instance.proposers[weakest],
                acceptor: aid,
                held: held[a].len(),
            });
            held[a].push(p);
            partner[p] = Some(a);
            observe(MatchEvent::Accept { proposer: pid, acceptor: aid, held: held[a].len() });
            free.push_front(weakest);
        } else {
            observe(MatchEvent::Reject { proposer: pid, acceptor: aid });
            free.push_front(p);
        }
    }

    let mut assignment = BTreeMap::new();
    let mut unmatched = BTreeSet::new();
    for (p, id) in instance.proposers.iter().enumerate() {
        match partner[p] {
            Some(a) => {
                assignment.insert(id.clone(), instance.acceptors[a].clone());
            }
            None => {
                unmatched.insert(id.clone());
            }
        }
    }
    MatchOutcome {
        matching: Matching { assignment, unmatched },
        proposals,
    }
}

/// Every blocking pair of `matching`: an allowed pair whose proposer would
/// rather have that acceptor, and whose acceptor has room or would rather
/// have that proposer than its weakest current match.
pub fn is_stable<P, A>(
    instance: &MatchInstance<P, A>,
    matching: &Matching<P, A>,
) -> Result<Vec<(P, A)>, MatchError>
where
    P: Ord + Clone + Debug,
    A: Ord + Clone + Debug,
{
    let mut partner: Vec<Option<usize>> = vec![None; instance.proposers.len()];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); instance.acceptors.len()];
    for (p, a) in &matching.assignment {
        let pi = *instance
            .proposer_index
            .get(p)
            .ok_or_else(|| MatchError::UnknownProposer(format!("{p:?}")))?;
        let ai = *instance
            .acceptor_index
            .get(a)
            .ok_or_else(|| MatchError::UnknownAcceptor(format!("{a:?}")))?;
        if !instance.weights.contains_key(&(pi, ai)) {
            return Err(MatchError::Structural(format!("pair ({p:?}, {a:?}) is not allowed")));
        }
        if matching.unmatched.contains(p) {
            return Err(MatchError::Structural(format!("{p:?} both matched and unmatched")));
        }
        partner[pi] = Some(ai);
        held[ai].push(pi);
    }
    for p in &matching.unmatched {
        if !instance.proposer_index.contains_key(p) {
            return Err(MatchError::UnknownProposer(format!("{p:?}")));
        }
    }
    if matching.assignment.len() + matching.unmatched.len() != instance.proposers.len() {
        return Err(MatchError::Structural("not every proposer is accounted for".into()));
    }
    for (a, h) in held.iter().enumerate() {
        if h.len() > instance.capacity[a] {
            return Err(MatchError::Structural(format!(
                "acceptor {:?} over capacity",
                instance.acceptors[a]
            )));
        }
    }

    let mut blocking = Vec::new();
    for &(p, a) in instance.weights.keys() {
        if partner[p] == Some(a) {
            continue;
        }
        let proposer_wants = partner[p].is_none_or(|cur| instance.proposer_prefers(p, a, cur));
        if !proposer_wants {
            continue;
        }
        let acceptor_wants = held[a].len() < instance.capacity[a]
            || held[a].iter().any(|&q| instance.acceptor_prefers(a, p, q));
        if acceptor_wants {
            blocking.push((instance.proposers[p].clone(), instance.acceptors[a].clone()));
        }
    }
    Ok(blocking)
}
