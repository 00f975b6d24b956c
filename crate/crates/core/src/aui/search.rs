use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action_set::ActionId;

use super::{AuiError, GenerationMode, Layout, ScoreBreakdown, Scorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub k: usize,
    /// Maximum number of layouts scored.
    pub budget: usize,
    /// Number of recent moves whose actions may not move again.
    pub tenure: usize,
    pub seed: u64,
    /// Iterations without a new best before restarting from a perturbed layout.
    pub patience: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            k: 3,
            budget: 10_000,
            tenure: 7,
            seed: 0,
            patience: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredAui {
    pub layout: Layout,
    pub score: ScoreBreakdown,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KBest {
    /// Best first; ties broken by fingerprint.
    pub items: Vec<ScoredAui>,
    /// Fewer than `k` distinct layouts were found.
    pub short: bool,
    pub evaluations: usize,
}

fn rank(a: &ScoredAui, b: &ScoredAui) -> Ordering {
    b.score
        .total
        .total_cmp(&a.score.total)
        .then_with(|| a.fingerprint.cmp(&b.fingerprint))
}

struct Pool {
    seen: HashMap<String, ScoredAui>,
    evaluations: usize,
}

impl Pool {
    fn evaluate(&mut self, scorer: &Scorer, layout: &Layout) -> ScoredAui {
        let fingerprint = layout.fingerprint();
        if let Some(s) = self.seen.get(&fingerprint) {
            return s.clone();
        }
        self.evaluations += 1;
        let scored = ScoredAui {
            score: scorer.score(layout),
            layout: layout.clone(),
            fingerprint: fingerprint.clone(),
        };
        self.seen.insert(fingerprint, scored.clone());
        scored
    }

    fn into_k_best(self, k: usize) -> KBest {
        let mut items: Vec<ScoredAui> = self.seen.into_values().collect();
        items.sort_by(rank);
        let short = items.len() < k;
        items.truncate(k);
        KBest {
            items,
            short,
            evaluations: self.evaluations,
        }
    }
}

/// Scores every valid layout and keeps the `k` best.
pub fn exhaustive_k_best(scorer: &Scorer, k: usize) -> Result<KBest, AuiError> {
    if k == 0 {
        return Err(AuiError::ZeroK);
    }
    let mut pool = Pool {
        seen: HashMap::new(),
        evaluations: 0,
    };
    scorer.reification().for_each(|l| {
        pool.evaluate(scorer, l);
        ControlFlow::Continue(())
    });
    if pool.seen.is_empty() {
        return Err(AuiError::Unsatisfiable);
    }
    Ok(pool.into_k_best(k))
}

/// A move, identified by the actions it relocates for the tabu list.
#[derive(Debug, Clone)]
struct Move {
    layout: Vec<Vec<ActionId>>,
    moved: Vec<ActionId>,
}

fn neighbors(right: &[Vec<ActionId>], free: bool, capacity: usize) -> Vec<Move> {
    let mut out = Vec::new();
    let flat: Vec<ActionId> = right.iter().flatten().copied().collect();
    let shape: Vec<usize> = right.iter().map(Vec::len).collect();
    let reshape = |order: &[ActionId], shape: &[usize]| {
        let mut containers = Vec::with_capacity(shape.len());
        let mut i = 0;
        for &len in shape {
            containers.push(order[i..i + len].to_vec());
            i += len;
        }
        containers
    };
    // Swap two actions, keeping container sizes.
    for i in 0..flat.len() {
        for j in i + 1..flat.len() {
            let mut order = flat.clone();
            order.swap(i, j);
            out.push(Move {
                layout: reshape(&order, &shape),
                moved: vec![flat[i], flat[j]],
            });
        }
    }
    // Move one action to another position, keeping container sizes.
    for i in 0..flat.len() {
        for j in 0..flat.len() {
            if j == i || j == i + 1 || j + 1 == i {
                continue;
            }
            let mut order = flat.clone();
            let a = order.remove(i);
            order.insert(j, a);
            out.push(Move {
                layout: reshape(&order, &shape),
                moved: vec![a],
            });
        }
    }
    if free {
        // Move one action into another container, or into a new one after its own.
        for (ci, c) in right.iter().enumerate() {
            for (pi, &a) in c.iter().enumerate() {
                for cj in 0..right.len() {
                    if cj == ci || right[cj].len() >= capacity {
                        continue;
                    }
                    for pj in 0..=right[cj].len() {
                        let mut l = right.to_vec();
                        l[ci].remove(pi);
                        l[cj].insert(pj, a);
                        l.retain(|c| !c.is_empty());
                        out.push(Move {
                            layout: l,
                            moved: vec![a],
                        });
                    }
                }
                if c.len() > 1 {
                    let mut l = right.to_vec();
                    l[ci].remove(pi);
                    l.insert(ci + 1, vec![a]);
                    out.push(Move {
                        layout: l,
                        moved: vec![a],
                    });
                }
            }
        }
        // Split a container, or merge two adjacent ones.
        for (ci, c) in right.iter().enumerate() {
            for cut in 1..c.len() {
                let mut l = right.to_vec();
                let tail = l[ci].split_off(cut);
                l.insert(ci + 1, tail);
                out.push(Move {
                    layout: l,
                    moved: vec![c[cut]],
                });
            }
            if ci + 1 < right.len() && c.len() + right[ci + 1].len() <= capacity {
                let mut l = right.to_vec();
                let next = l.remove(ci + 1);
                l[ci].extend(next);
                out.push(Move {
                    layout: l,
                    moved: vec![right[ci + 1][0]],
                });
            }
        }
    }
    out
}

/// Tabu search over valid layouts.
///
/// Starts from the first valid layout in enumeration order, moves to the best non-tabu
/// neighbor each iteration (a tabu move is allowed when it beats the best score so far), and
/// after `patience` iterations without improvement restarts from a random walk away from the
/// best layout. Every valid layout scored along the way is pooled, deduplicated by structure.
pub fn k_best_search(scorer: &Scorer, config: &SearchConfig) -> Result<KBest, AuiError> {
    if config.k == 0 {
        return Err(AuiError::ZeroK);
    }
    let reification = scorer.reification();
    let start = reification.first().ok_or(AuiError::Unsatisfiable)?;
    let free = matches!(reification.mode(), GenerationMode::FreeShape);
    let capacity = reification.capacity();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pool = Pool {
        seen: HashMap::new(),
        evaluations: 0,
    };

    let mut current = pool.evaluate(scorer, &start);
    let mut best = current.clone();
    let mut tabu: VecDeque<ActionId> = VecDeque::new();
    let mut stale = 0;
    let mut idle = 0;

    while pool.evaluations < config.budget {
        let before = pool.evaluations;
        let right = reification.right_part(&current.layout).to_vec();
        let mut chosen: Option<(ScoredAui, Vec<ActionId>)> = None;
        for mv in neighbors(&right, free, capacity) {
            if pool.evaluations >= config.budget {
                break;
            }
            let layout = reification.assemble(mv.layout);
            if reification.check(&layout).is_err() {
                continue;
            }
            let scored = pool.evaluate(scorer, &layout);
            let is_tabu = mv.moved.iter().any(|a| tabu.contains(a));
            let aspires = scored.score.total > best.score.total;
            if is_tabu && !aspires {
                continue;
            }
            let better = chosen
                .as_ref()
                .is_none_or(|(c, _)| rank(&scored, c) == Ordering::Less);
            if better {
                chosen = Some((scored, mv.moved));
            }
        }
        if pool.evaluations == before {
            idle += 1;
            if idle > 2 * config.patience {
                // Everything reachable has been scored.
                break;
            }
        } else {
            idle = 0;
        }

        match chosen {
            Some((next, moved)) => {
                for a in moved {
                    tabu.push_back(a);
                }
                while tabu.len() > config.tenure {
                    tabu.pop_front();
                }
                current = next;
                if rank(&current, &best) == Ordering::Less {
                    best = current.clone();
                    stale = 0;
                } else {
                    stale += 1;
                }
            }
            None => stale = config.patience,
        }

        if stale >= config.patience {
            current = perturb(scorer, &mut pool, &best, free, capacity, &mut rng);
            tabu.clear();
            stale = 0;
        }
    }
    Ok(pool.into_k_best(config.k))
}

/// A short random walk over valid neighbors.
fn perturb(
    scorer: &Scorer,
    pool: &mut Pool,
    from: &ScoredAui,
    free: bool,
    capacity: usize,
    rng: &mut ChaCha8Rng,
) -> ScoredAui {
    let reification = scorer.reification();
    let mut current = from.layout.clone();
    let steps = reification.right().len().max(2);
    for _ in 0..steps {
        let right = reification.right_part(&current).to_vec();
        let mut moves = neighbors(&right, free, capacity);
        moves.shuffle(rng);
        if let Some(layout) = moves
            .into_iter()
            .map(|m| reification.assemble(m.layout))
            .find(|l| reification.check(l).is_ok())
        {
            current = layout;
        }
    }
    pool.evaluate(scorer, &current)
}
