//! Template alignment in place of a statistical NLU model.
//!
//! An alignment walks a template and the tokenized utterance left to right.
//! Fixed words either match one identical utterance token or are dropped;
//! each slot takes a contiguous span of one to three tokens; utterance tokens
//! may also be passed over. A template scores `matched fixed / total fixed`.
//! Among alignments of one template with the same score, the one with the
//! lowest cost wins: each passed-over token costs 1 and each slot span costs
//! what its type says about how plausible the captured text is.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::clear::nearest_member;
use super::numbers::clear_number;
use super::registry::{SlotRegistry, SlotType};
use super::training::{tokenize, IntentSpec, TemplateToken};

pub const MAX_SLOT_TOKENS: usize = 3;
/// Acceptance threshold as the ratio `3/5`.
pub const THRESHOLD: (usize, usize) = (3, 5);

/// `matched / total` kept exact for comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Score {
    pub matched: usize,
    pub total: usize,
}

impl Score {
    pub fn value(&self) -> f64 {
        self.matched as f64 / self.total as f64
    }

    pub fn passes(&self) -> bool {
        self.matched * THRESHOLD.1 >= self.total * THRESHOLD.0
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.matched * other.total).cmp(&(other.matched * self.total))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParsedCommand {
    pub intent: String,
    pub raw_slots: BTreeMap<String, String>,
    pub score: Score,
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    matched: usize,
    cost: usize,
    step: Step,
}

#[derive(Clone, Copy, Debug)]
enum Step {
    End,
    MatchFixed,
    DropFixed,
    SkipToken,
    Slot(usize),
}

impl Cell {
    fn better_than(&self, other: &Cell) -> bool {
        self.matched > other.matched || (self.matched == other.matched && self.cost < other.cost)
    }
}

fn slot_cost(ty: Option<&SlotType>, span: &[String]) -> usize {
    let text = span.join(" ");
    match ty {
        Some(SlotType::Number) => {
            if clear_number(&text).is_ok() {
                0
            } else {
                2 * span.len()
            }
        }
        Some(SlotType::Enum(members)) => nearest_member(&text, members.iter().map(|m| m.name.as_str())).1,
        Some(SlotType::KgLabel { .. }) | None => 2 * (span.len() - 1),
    }
}

/// Slot costs for one utterance, shared by every template: for each slot
/// name, `[start][len - 1]`.
struct SpanCosts<'a> {
    registry: &'a SlotRegistry,
    words: &'a [String],
    memo: HashMap<&'a str, Vec<[usize; MAX_SLOT_TOKENS]>>,
}

impl<'a> SpanCosts<'a> {
    fn fill(&mut self, slot: &'a str) {
        let (registry, words) = (self.registry, self.words);
        self.memo.entry(slot).or_insert_with(|| {
            (0..words.len())
                .map(|j| {
                    let mut row = [usize::MAX; MAX_SLOT_TOKENS];
                    for k in 1..=MAX_SLOT_TOKENS.min(words.len() - j) {
                        row[k - 1] = slot_cost(registry.get(slot), &words[j..j + k]);
                    }
                    row
                })
                .collect()
        });
    }
}

/// Best alignment of one template, as (matched fixed words, slot spans).
fn align<'a>(tokens: &'a [TemplateToken], costs: &mut SpanCosts<'a>) -> Option<(usize, BTreeMap<String, String>)> {
    for t in tokens {
        if let TemplateToken::Slot(name) = t {
            costs.fill(name);
        }
    }
    let slot_costs: Vec<Option<&Vec<[usize; MAX_SLOT_TOKENS]>>> = tokens
        .iter()
        .map(|t| match t {
            TemplateToken::Slot(name) => costs.memo.get(name.as_str()),
            TemplateToken::Fixed(_) => None,
        })
        .collect();
    let words = costs.words;
    let (nt, nw) = (tokens.len(), words.len());
    let mut table: Vec<Vec<Option<Cell>>> = vec![vec![None; nw + 1]; nt + 1];
    for i in (0..=nt).rev() {
        for j in (0..=nw).rev() {
            let mut best: Option<Cell> = None;
            let mut offer = |c: Cell| {
                if best.is_none_or(|b| c.better_than(&b)) {
                    best = Some(c);
                }
            };
            if i == nt {
                offer(Cell { matched: 0, cost: nw - j, step: Step::End });
            } else {
                match &tokens[i] {
                    TemplateToken::Fixed(w) => {
                        if j < nw && words[j] == *w {
                            if let Some(n) = table[i + 1][j + 1] {
                                offer(Cell { matched: n.matched + 1, cost: n.cost, step: Step::MatchFixed });
                            }
                        }
                        if let Some(n) = table[i + 1][j] {
                            offer(Cell { matched: n.matched, cost: n.cost, step: Step::DropFixed });
                        }
                    }
                    TemplateToken::Slot(_) => {
                        for k in 1..=MAX_SLOT_TOKENS.min(nw - j) {
                            if let Some(n) = table[i + 1][j + k] {
                                let cost = slot_costs[i].map_or(0, |c| c[j][k - 1]);
                                offer(Cell { matched: n.matched, cost: n.cost + cost, step: Step::Slot(k) });
                            }
                        }
                    }
                }
                if j < nw {
                    if let Some(n) = table[i][j + 1] {
                        offer(Cell { matched: n.matched, cost: n.cost + 1, step: Step::SkipToken });
                    }
                }
            }
            table[i][j] = best;
        }
    }

    let root = table[0][0]?;
    let mut slots = BTreeMap::new();
    let (mut i, mut j) = (0, 0);
    while let Some(cell) = table[i][j] {
        match cell.step {
            Step::End => break,
            Step::MatchFixed => {
                i += 1;
                j += 1;
            }
            Step::DropFixed => i += 1,
            Step::SkipToken => j += 1,
            Step::Slot(k) => {
                if let TemplateToken::Slot(name) = &tokens[i] {
                    slots.insert(name.clone(), words[j..j + k].join(" "));
                }
                i += 1;
                j += k;
            }
        }
    }
    Some((root.matched, slots))
}

/// Best-scoring template across all intents, or `None` below the threshold.
///
/// Ties on score go to the template with more fixed words, then the smaller
/// intent name, then the earlier template in file order.
pub fn classify(utterance: &str, specs: &[IntentSpec], registry: &SlotRegistry) -> Option<ParsedCommand> {
    let words = tokenize(utterance);
    let mut costs = SpanCosts { registry, words: &words, memo: HashMap::new() };
    let mut best: Option<(Score, &str, ParsedCommand)> = None;
    for spec in specs {
        for template in &spec.templates {
            let total = template.fixed_count();
            let Some((matched, raw_slots)) = align(&template.tokens, &mut costs) else { continue };
            let score = Score { matched, total };
            let wins = match &best {
                None => true,
                Some((s, name, _)) => {
                    score.cmp(s).then_with(|| total.cmp(&s.total)).then_with(|| name.cmp(&spec.name.as_str())).is_gt()
                }
            };
            if wins {
                best = Some((score, spec.name.as_str(), ParsedCommand { intent: spec.name.clone(), raw_slots, score }));
            }
        }
    }
    best.map(|(_, _, cmd)| cmd).filter(|c| c.score.passes())
}
