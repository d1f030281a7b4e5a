//! One-step predecessor operators with action-level witnesses.
//!
//! The solver works with combined operators in which a single player-1
//! distribution must satisfy a disjunction of conditions against every
//! player-2 reply (this is strictly stronger than a union of operator
//! results). All conditions are support-characterizable:
//!
//! - A state satisfies the almost/pre family iff some nonempty "good set"
//!   `U` of its actions works: for every counter action `b`, the joint
//!   destination `Dest(s,U,b)` stays inside some `Y_j` while touching the
//!   matching `X_j`, or stays inside the trailing pre set. The uniform
//!   distribution over `U` is then a witness.
//! - A state satisfies the limit family iff some rank assignment over its
//!   actions works, where playing an action with rank `r` at weight
//!   proportional to `eps^r` realizes the required probability ratios as
//!   `eps` tends to 0.
//!
//! Player-2 operators are computed two ways: directly, by enumerating
//! player-1 supports against pure replies, and as complements of player-1
//! operators on complemented arguments. The two must agree, which the test
//! suite checks exhaustively on small instances.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::game::ConcurrentGame;
use crate::stateset::StateSet;

/// Argument list for a combined predecessor operator.
///
/// `pairs` is ordered outermost-first: `[(Y_n, X_n), ..., (Y_{n-i}, X_{n-i})]`.
/// `pre_set` is the trailing `Y_{n-i-1}` of the even forms. `lpre_pair` is the
/// `(Y', X')` of the appended limit disjunct.
///
/// The duality equalities additionally require the nesting
/// `X_n ⊆ ... ⊆ X_{n-i} ⊆ pre_set ⊆ Y_{n-i} ⊆ ... ⊆ Y_n`, with
/// `X' ⊆ X_n` and `Y_n ⊆ Y'`; membership itself is well-defined for
/// arbitrary arguments.
#[derive(Clone, Debug)]
pub struct ApreChain {
    pub pairs: Vec<(StateSet, StateSet)>,
    pub pre_set: Option<StateSet>,
    pub lpre_pair: Option<(StateSet, StateSet)>,
}

impl ApreChain {
    pub fn pre(pre_set: StateSet) -> Self {
        ApreChain {
            pairs: Vec::new(),
            pre_set: Some(pre_set),
            lpre_pair: None,
        }
    }

    pub fn apre(y: StateSet, x: StateSet) -> Self {
        ApreChain {
            pairs: vec![(y, x)],
            pre_set: None,
            lpre_pair: None,
        }
    }

    /// Check the player-1 nesting invariants; returns a description of the
    /// first violated inclusion.
    pub fn check_nesting(&self) -> Result<(), String> {
        // The inclusion chain runs X_n ⊆ ... ⊆ X_last ⊆ pre ⊆ Y_last ⊆ ...
        // ⊆ Y_n, wrapped by X' ⊆ head and tail ⊆ Y'.
        let mut seq: Vec<(&StateSet, String)> = Vec::new();
        for (j, (_, x)) in self.pairs.iter().enumerate() {
            seq.push((x, format!("X[{j}]")));
        }
        if let Some(p) = &self.pre_set {
            seq.push((p, "pre_set".into()));
        }
        for (j, (y, _)) in self.pairs.iter().enumerate().rev() {
            seq.push((y, format!("Y[{j}]")));
        }
        for w in seq.windows(2) {
            if !w[0].0.is_subset(w[1].0) {
                return Err(format!("{} is not a subset of {}", w[0].1, w[1].1));
            }
        }
        if let Some((yp, xp)) = &self.lpre_pair {
            if let Some((first, name)) = seq.first() {
                if !xp.is_subset(first) {
                    return Err(format!("lpre X' is not a subset of {name}"));
                }
            }
            if let Some((last, name)) = seq.last() {
                if !last.is_subset(yp) {
                    return Err(format!("{name} is not a subset of lpre Y'"));
                }
            }
            if !xp.is_subset(yp) {
                return Err("lpre X' is not a subset of lpre Y'".into());
            }
        }
        Ok(())
    }

    /// Exact content key for memoization tables.
    pub fn signature(&self) -> Vec<u64> {
        let mut sig = vec![
            self.pairs.len() as u64,
            self.pre_set.is_some() as u64,
            self.lpre_pair.is_some() as u64,
        ];
        for (y, x) in &self.pairs {
            sig.extend_from_slice(y.words());
            sig.extend_from_slice(x.words());
        }
        if let Some(p) = &self.pre_set {
            sig.extend_from_slice(p.words());
        }
        if let Some((y, x)) = &self.lpre_pair {
            sig.extend_from_slice(y.words());
            sig.extend_from_slice(x.words());
        }
        sig
    }
}

/// Ranks over a state's player-1 actions; instantiated at `eps` by playing
/// action `a` with weight proportional to `eps^rank(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankAssignment {
    /// action index -> rank; domain nonempty, used ranks contiguous from 0.
    pub ranks: BTreeMap<usize, u32>,
}

impl RankAssignment {
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.ranks.keys().copied()
    }

    pub fn max_rank(&self) -> u32 {
        self.ranks.values().copied().max().unwrap_or(0)
    }
}

/// Witness for one state's operator membership.
#[derive(Clone, Debug, PartialEq)]
pub enum StateWitness {
    /// Uniform play over this action subset works.
    GoodSet(Vec<usize>),
    /// The eps-power family over these ranks works.
    Ranks(RankAssignment),
}

/// Per-state witnesses for a whole operator evaluation.
#[derive(Clone, Debug, Default)]
pub struct PredWitness {
    pub per_state: Vec<Option<StateWitness>>,
}

// ---------------------------------------------------------------------------
// Support context
// ---------------------------------------------------------------------------

/// Precomputed per-(s,a,b) support bitsets.
pub(crate) struct SupportCtx<'g> {
    pub g: &'g ConcurrentGame,
    sup: Vec<Vec<Vec<StateSet>>>,
}

impl<'g> SupportCtx<'g> {
    pub fn new(g: &'g ConcurrentGame) -> Self {
        let n = g.n_states();
        let sup = (0..n)
            .map(|s| {
                (0..g.n1(s))
                    .map(|a| {
                        (0..g.n2(s))
                            .map(|b| StateSet::from_indices(n, g.dist(s, a, b).support()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SupportCtx { g, sup }
    }

    pub fn support(&self, s: usize, a: usize, b: usize) -> &StateSet {
        &self.sup[s][a][b]
    }

    /// Dest(s, U, b): joint destinations of an action subset.
    fn dest(&self, s: usize, actions: &[usize], b: usize) -> StateSet {
        let mut d = StateSet::empty(self.g.n_states());
        for &a in actions {
            d.union_with(&self.sup[s][a][b]);
        }
        d
    }
}

// ---------------------------------------------------------------------------
// Good-set operators (pre / apre / lpreodd / lpreeven)
// ---------------------------------------------------------------------------

/// One disjunct check for a good set: `d` is Dest(s,U,b).
fn good_disjunct(d: &StateSet, chain: &ApreChain) -> bool {
    for (y, x) in &chain.pairs {
        if d.is_subset(y) && d.intersects(x) {
            return true;
        }
    }
    if let Some(p) = &chain.pre_set {
        if d.is_subset(p) {
            return true;
        }
    }
    false
}

/// Does uniform play over `actions` witness the chain at `s`?
pub(crate) fn good_set_verifies(
    ctx: &SupportCtx,
    s: usize,
    actions: &[usize],
    chain: &ApreChain,
) -> bool {
    if actions.is_empty() {
        return false;
    }
    (0..ctx.g.n2(s)).all(|b| good_disjunct(&ctx.dest(s, actions, b), chain))
}

/// Nonempty action subsets at `s`, smallest first, lexicographic within a
/// cardinality. This is the witness tie-break order.
pub(crate) fn subsets_by_size(m: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    (1..=m)
        .flat_map(|size| (0..m).combinations(size))
        .collect()
}

/// Decide membership in a pre/apre/lpreodd/lpreeven combination.
///
/// A state is in the result iff some nonempty `U ⊆ Γ₁(s)` satisfies, for
/// every counter action, one of: `Dest(s,U,b) ⊆ Y_j` and `Dest(s,U,b) ∩ X_j
/// ≠ ∅` for a pair; or `Dest(s,U,b) ⊆ pre_set`. The witness is the first
/// such `U` by (cardinality, lexicographic) order.
pub fn combined_pred1(g: &ConcurrentGame, chain: &ApreChain) -> (StateSet, PredWitness) {
    let ctx = SupportCtx::new(g);
    combined_pred1_ctx(&ctx, chain)
}

pub(crate) fn combined_pred1_ctx(ctx: &SupportCtx, chain: &ApreChain) -> (StateSet, PredWitness) {
    debug_assert!(chain.lpre_pair.is_none(), "limit chains use combined_pred1_limit");
    let n = ctx.g.n_states();
    let mut result = StateSet::empty(n);
    let mut wit = PredWitness {
        per_state: vec![None; n],
    };
    for s in 0..n {
        if let Some(u) = first_good_set(ctx, s, chain) {
            result.insert(s);
            wit.per_state[s] = Some(StateWitness::GoodSet(u));
        }
    }
    (result, wit)
}

/// First good set at `s` in witness order, if any.
pub(crate) fn first_good_set(ctx: &SupportCtx, s: usize, chain: &ApreChain) -> Option<Vec<usize>> {
    subsets_by_size(ctx.g.n1(s))
        .into_iter()
        .find(|u| good_set_verifies(ctx, s, u, chain))
}

/// All good sets at `s`, in witness order.
pub(crate) fn all_good_sets(ctx: &SupportCtx, s: usize, chain: &ApreChain) -> Vec<Vec<usize>> {
    subsets_by_size(ctx.g.n1(s))
        .into_iter()
        .filter(|u| good_set_verifies(ctx, s, u, chain))
        .collect()
}

// ---------------------------------------------------------------------------
// Limit operators (lpre-combined)
// ---------------------------------------------------------------------------

/// Does the rank assignment witness the limit chain at `s`?
pub(crate) fn ranks_verify(
    ctx: &SupportCtx,
    s: usize,
    ranks: &RankAssignment,
    chain: &ApreChain,
) -> bool {
    if ranks.ranks.is_empty() {
        return false;
    }
    let (yp, xp) = chain
        .lpre_pair
        .as_ref()
        .expect("limit chains carry an lpre pair");
    let not_yp = yp.complement();
    let dom: Vec<usize> = ranks.domain().collect();
    (0..ctx.g.n2(s)).all(|b| {
        // minrank over the domain of actions whose support touches a set.
        let minrank = |z: &StateSet| -> Option<u32> {
            ranks
                .ranks
                .iter()
                .filter(|(&a, _)| ctx.support(s, a, b).intersects(z))
                .map(|(_, &r)| r)
                .min()
        };
        // Limit disjunct: progress to X' strictly outranks escape from Y'.
        if let Some(rx) = minrank(xp) {
            let escape = minrank(&not_yp);
            if escape.is_none_or(|ry| rx < ry) {
                return true;
            }
        }
        good_disjunct(&ctx.dest(s, &dom, b), chain)
    })
}

/// Rank assignments over `m` actions: nonempty domain by (cardinality,
/// lexicographic) order, then rank vectors in lexicographic order, keeping
/// only vectors whose used ranks are contiguous from 0. Ranks stay below `m`.
pub(crate) fn rank_assignments(m: usize) -> Vec<RankAssignment> {
    fn next_vec(vec: &mut [u32], m: usize) -> bool {
        for i in (0..vec.len()).rev() {
            if (vec[i] as usize) < m - 1 {
                vec[i] += 1;
                for v in vec[i + 1..].iter_mut() {
                    *v = 0;
                }
                return true;
            }
        }
        false
    }
    let mut out = Vec::new();
    for dom in subsets_by_size(m) {
        let mut vec = vec![0u32; dom.len()];
        loop {
            let used: u32 = vec.iter().fold(0, |acc, &v| acc | 1 << v);
            let max = *vec.iter().max().unwrap();
            if used == (1 << (max + 1)) - 1 {
                out.push(RankAssignment {
                    ranks: dom.iter().copied().zip(vec.iter().copied()).collect(),
                });
            }
            if !next_vec(&mut vec, m) {
                break;
            }
        }
    }
    out
}

/// Decide membership in an lpre-combined operator by exhaustive enumeration
/// of rank assignments.
///
/// A state qualifies iff some rank assignment satisfies, for every counter
/// action `b`, one of: the limit disjunct (the lowest rank reaching `X'`
/// strictly beats the lowest rank escaping `Y'`), an apre pair, or the pre
/// set, where the pair/pre disjuncts read Dest over the whole domain.
pub fn combined_pred1_limit(g: &ConcurrentGame, chain: &ApreChain) -> (StateSet, PredWitness) {
    let ctx = SupportCtx::new(g);
    combined_pred1_limit_ctx(&ctx, chain)
}

pub(crate) fn combined_pred1_limit_ctx(
    ctx: &SupportCtx,
    chain: &ApreChain,
) -> (StateSet, PredWitness) {
    assert!(chain.lpre_pair.is_some(), "limit chains need an lpre pair");
    let n = ctx.g.n_states();
    let mut result = StateSet::empty(n);
    let mut wit = PredWitness {
        per_state: vec![None; n],
    };
    for s in 0..n {
        if let Some(r) = rank_assignments(ctx.g.n1(s))
            .into_iter()
            .find(|r| ranks_verify(ctx, s, r, chain))
        {
            result.insert(s);
            wit.per_state[s] = Some(StateWitness::Ranks(r));
        }
    }
    (result, wit)
}

// ---------------------------------------------------------------------------
// Player-2 operators
// ---------------------------------------------------------------------------

/// Which expanded player-2 form an ApreChain encodes for [`fpre2_direct`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fpre2Mode {
    /// `epre(Y_n) ⩣ apre(X_n,Y_{n-1}) ⩣ ... ⩣ apre(X_{n-i+1},Y_{n-i}) ⩣ pre(X_{n-i})`
    Odd,
    /// `epre(Y_n) ⩣ apre(X_n,Y_{n-1}) ⩣ ... ⩣ apre(X_{n-i},Y_{n-i-1})`,
    /// with the trailing `Y_{n-i-1}` taken from the chain's `pre_set`.
    Even,
}

/// Direct player-2 computation of the fpreodd/fpreeven family.
///
/// The chain's `pairs` hold `[(Y_n,X_n), ..., (Y_{n-i},X_{n-i})]` in the
/// player-2 reading; `Even` additionally takes the trailing set from
/// `pre_set`. A state qualifies iff for every nonempty player-1 support `U`
/// some pure reply `b` satisfies one expanded disjunct with `D = Dest(s,U,b)`:
/// `D` meets the epre set, or `D ⊆ X` and `D` meets `Y` for an apre pair, or
/// `D ⊆ X` for the trailing pre set. Pure replies suffice because each
/// disjunct is support-level: any mixed reply satisfying one contains a pure
/// reply satisfying it.
pub fn fpre2_direct(g: &ConcurrentGame, chain: &ApreChain, mode: Fpre2Mode) -> StateSet {
    assert!(!chain.pairs.is_empty(), "fpre2 forms start with an epre pair");
    assert!(chain.lpre_pair.is_none(), "fractional forms have no direct computation");
    if mode == Fpre2Mode::Even {
        assert!(chain.pre_set.is_some(), "even form needs the trailing set");
    }
    let ctx = SupportCtx::new(g);
    let n = g.n_states();
    let mut result = StateSet::empty(n);
    for s in 0..n {
        let all_supports = subsets_by_size(g.n1(s));
        let ok = all_supports.iter().all(|u| {
            (0..g.n2(s)).any(|b| {
                let d = ctx.dest(s, u, b);
                // epre disjunct on the head pair's Y.
                if d.intersects(&chain.pairs[0].0) {
                    return true;
                }
                // apre disjuncts straddle consecutive pairs.
                for k in 1..chain.pairs.len() {
                    if d.is_subset(&chain.pairs[k - 1].1) && d.intersects(&chain.pairs[k].0) {
                        return true;
                    }
                }
                let last = &chain.pairs[chain.pairs.len() - 1].1;
                match mode {
                    Fpre2Mode::Odd => d.is_subset(last),
                    Fpre2Mode::Even => {
                        d.is_subset(last) && d.intersects(chain.pre_set.as_ref().unwrap())
                    }
                }
            })
        });
        if ok {
            result.insert(s);
        }
    }
    result
}

/// Which player-2 operator [`dual_complement`] computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualKind {
    FpreOdd,
    FpreEven,
    /// Fractional family: the chain's first pair is the fpre pair.
    FrpreOdd,
    FrpreEven,
}

/// Player-2 operators as complements of player-1 operators on complemented
/// arguments.
///
/// The chain is given in the player-2 reading of [`fpre2_direct`] (for the
/// fractional kinds the first pair is the `fpre` pair). Complementing every
/// set must restore the player-1 nesting invariants.
pub fn dual_complement(
    g: &ConcurrentGame,
    chain: &ApreChain,
    kind: DualKind,
) -> Result<StateSet, Error> {
    assert!(!chain.pairs.is_empty());
    let comp_pairs: Vec<(StateSet, StateSet)> = chain
        .pairs
        .iter()
        .map(|(y, x)| (y.complement(), x.complement()))
        .collect();
    let comp_pre = chain.pre_set.as_ref().map(|p| p.complement());
    let p1_chain = match kind {
        DualKind::FpreOdd => ApreChain {
            pairs: comp_pairs,
            pre_set: None,
            lpre_pair: None,
        },
        DualKind::FpreEven => ApreChain {
            pairs: comp_pairs,
            pre_set: Some(comp_pre.expect("even dual needs the trailing set")),
            lpre_pair: None,
        },
        DualKind::FrpreOdd => ApreChain {
            pairs: comp_pairs[1..].to_vec(),
            pre_set: None,
            lpre_pair: Some(comp_pairs[0].clone()),
        },
        DualKind::FrpreEven => ApreChain {
            pairs: comp_pairs[1..].to_vec(),
            pre_set: Some(comp_pre.expect("even dual needs the trailing set")),
            lpre_pair: Some(comp_pairs[0].clone()),
        },
    };
    p1_chain
        .check_nesting()
        .map_err(Error::NestingViolation)?;
    let (set, _) = match kind {
        DualKind::FpreOdd | DualKind::FpreEven => combined_pred1(g, &p1_chain),
        DualKind::FrpreOdd | DualKind::FrpreEven => combined_pred1_limit(g, &p1_chain),
    };
    Ok(set.complement())
}
