//! Exclusive-or sum-of-products covers.
//!
//! An [`EsopCover`] reads its cubes XOR-wise: output bit `j` of `f(x)` is the
//! parity of bit `j` over every cube matching `x`. Covers come from
//! [`from_pla`], which first makes the source cover disjoint (on disjoint
//! covers OR and XOR agree), and are shrunk by [`minimize`].
//!
//! The minimizer works on pairs of cubes. Distance counts the input positions
//! whose literals differ, plus one when the output rows differ. Pairs at
//! distance 0 annihilate, pairs at distance 1 merge into a single cube, and
//! pairs at distance 2 or 3 are rewritten into an equivalent pair (or triple)
//! whenever the new cubes merge with other cubes of the cover. Rounds of
//! improving moves alternate with cost-neutral reshaping until a round ends
//! without a cheaper cover or the round budget runs out.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::pla::{self, Cube, Literal, PlaDocument, PlaFunction, Warning};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EsopCover {
    pub inputs: usize,
    pub outputs: usize,
    pub cubes: Vec<Cube>,
}

/// Size metrics of a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CoverCost {
    pub cube_count: usize,
    /// Non-dash input literals over all cubes.
    pub literal_count: usize,
    /// One-bits over all output rows; equals the number of gates synthesis emits.
    pub output_ones: usize,
}

impl CoverCost {
    fn key(&self) -> (usize, usize, usize) {
        (self.cube_count, self.output_ones, self.literal_count)
    }
}

impl EsopCover {
    /// Build a cover, cancelling identical cubes pairwise and dropping cubes
    /// with an all-zero output row.
    pub fn new(inputs: usize, outputs: usize, cubes: Vec<Cube>) -> Result<Self> {
        PlaFunction::new(inputs, outputs, Vec::new())?;
        let mut parity: HashMap<Cube, usize> = HashMap::new();
        let mut order = Vec::new();
        for c in cubes {
            if c.inputs.len() != inputs || c.outputs.len() != outputs {
                return Err(Error::Structure(format!(
                    "cube {c} does not fit a {inputs}x{outputs} cover"
                )));
            }
            if !c.has_output() {
                continue;
            }
            let count = parity.entry(c.clone()).or_insert(0);
            if *count == 0 {
                order.push(c);
            }
            *count += 1;
        }
        let cubes = order.into_iter().filter(|c| parity[c] % 2 == 1).collect();
        Ok(EsopCover {
            inputs,
            outputs,
            cubes,
        })
    }

    pub fn evaluate(&self, x: &Bits) -> Result<Bits> {
        evaluate_esop(self, x)
    }

    pub fn cost(&self) -> CoverCost {
        cost(self)
    }

    /// The same rows as a `.pla` function (whose own default reading is OR).
    pub fn to_pla(&self) -> PlaFunction {
        PlaFunction {
            inputs: self.inputs,
            outputs: self.outputs,
            cubes: self.cubes.clone(),
            name: None,
            input_labels: Vec::new(),
            output_labels: Vec::new(),
        }
    }

    /// Serialize as `.pla` text carrying the `#esop` marker line.
    pub fn write(&self) -> String {
        pla::write_pla_with_header(&self.to_pla(), &[pla::ESOP_MARKER])
    }

    /// Read rows of a parsed document as an XOR cover. Documents without the
    /// `#esop` marker are accepted with a warning.
    pub fn from_document(doc: &PlaDocument) -> Result<(EsopCover, Vec<Warning>)> {
        let mut warnings = doc.warnings.clone();
        if !doc.esop_marked {
            warnings.push(Warning {
                line: 0,
                message: "rows read as XOR terms without an #esop marker".into(),
            });
        }
        let f = &doc.function;
        Ok((
            EsopCover::new(f.inputs, f.outputs, f.cubes.clone())?,
            warnings,
        ))
    }
}

pub fn evaluate_esop(c: &EsopCover, x: &Bits) -> Result<Bits> {
    if x.len() != c.inputs {
        return Err(Error::Arity {
            expected: c.inputs,
            found: x.len(),
        });
    }
    let mut out = vec![false; c.outputs];
    for cube in c.cubes.iter().filter(|cube| cube.matches(x.as_slice())) {
        for (o, &b) in out.iter_mut().zip(&cube.outputs) {
            *o ^= b;
        }
    }
    Ok(Bits::from_bools(out))
}

pub fn cost(c: &EsopCover) -> CoverCost {
    CoverCost {
        cube_count: c.cubes.len(),
        literal_count: c.cubes.iter().map(Cube::literal_count).sum(),
        output_ones: c.cubes.iter().map(Cube::output_ones).sum(),
    }
}

/// Convert an OR-read cover into an equivalent XOR-read cover.
///
/// Zero-output rows are dropped, repeated minterms have their outputs ORed,
/// and overlapping cubes are split with the disjoint sharp operation so that
/// no input vector is matched twice.
pub fn from_pla(f: &PlaFunction, limits: &Limits) -> Result<EsopCover> {
    f.validate()?;
    let mut disjoint: Vec<Cube> = Vec::new();
    let mut minterm_slot: HashMap<Vec<Literal>, usize> = HashMap::new();
    let mut dashed = Vec::new();

    for c in f.cubes.iter().filter(|c| c.has_output()) {
        if c.dont_cares() > 0 {
            dashed.push(c.clone());
            continue;
        }
        match minterm_slot.get(&c.inputs) {
            Some(&slot) => or_into(&mut disjoint[slot].outputs, &c.outputs),
            None => {
                minterm_slot.insert(c.inputs.clone(), disjoint.len());
                disjoint.push(c.clone());
            }
        }
    }

    for c in dashed {
        let mut remainder = vec![c.clone()];
        let mut next = Vec::with_capacity(disjoint.len() + 1);
        for d in disjoint {
            if !d.intersects(&c) {
                next.push(d);
                continue;
            }
            let mut common = intersect(&d, &c);
            or_into(&mut common.outputs, &c.outputs);
            next.extend(sharp(&d, &c));
            next.push(common);
            remainder = remainder.iter().flat_map(|r| sharp(r, &d)).collect();
        }
        next.extend(remainder);
        if next.len() > limits.max_cubes {
            return Err(Error::Resource(format!(
                "disjoint cover needs more than {} cubes",
                limits.max_cubes
            )));
        }
        disjoint = next;
    }

    EsopCover::new(f.inputs, f.outputs, disjoint)
}

fn or_into(dst: &mut [bool], src: &[bool]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d |= s;
    }
}

fn intersect(a: &Cube, b: &Cube) -> Cube {
    let inputs = a
        .inputs
        .iter()
        .zip(&b.inputs)
        .map(|(&x, &y)| if x == Literal::DontCare { y } else { x })
        .collect();
    Cube::new(inputs, a.outputs.clone())
}

/// `a` minus `b` as pairwise disjoint cubes carrying `a`'s outputs.
fn sharp(a: &Cube, b: &Cube) -> Vec<Cube> {
    if !a.intersects(b) {
        return vec![a.clone()];
    }
    let mut pieces = Vec::new();
    let mut rest = a.clone();
    for i in 0..a.inputs.len() {
        if b.inputs[i].is_care() && rest.inputs[i] == Literal::DontCare {
            let mut piece = rest.clone();
            piece.inputs[i] = if b.inputs[i] == Literal::One {
                Literal::Zero
            } else {
                Literal::One
            };
            pieces.push(piece);
            rest.inputs[i] = b.inputs[i];
        }
    }
    pieces
}

/// Budget for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Effort {
    /// Maximum number of improvement rounds.
    pub max_rounds: usize,
}

impl Default for Effort {
    fn default() -> Self {
        Effort { max_rounds: 64 }
    }
}

/// Shrink a cover while preserving its XOR reading. The result never has
/// more cubes than the input and comes back in a fixed canonical order.
///
/// Two candidates are built from the current cover: a joint search over all
/// outputs, which drives the cube count down, and a per-output search whose
/// cubes are merged back where their input parts coincide. Each output 1-bit
/// becomes one gate, so the candidate with fewer output ones wins, provided
/// it stays within the input's cube count. This repeats while it improves.
pub fn minimize(c: &EsopCover, effort: Effort) -> EsopCover {
    let bound = c.cubes.len();
    let mut best = exorlink_search(c, 0);
    for _ in 0..effort.max_rounds {
        let joint = exorlink_search(&best, effort.max_rounds);
        let split = per_output_search(&best, effort.max_rounds);
        let candidate = [Some(joint), split]
            .into_iter()
            .flatten()
            .filter(|cand| cand.cubes.len() <= bound)
            .min_by_key(|cand| gate_key(&cand.cost()));
        match candidate {
            Some(cand) if gate_key(&cand.cost()) < gate_key(&best.cost()) => best = cand,
            _ => break,
        }
    }
    order_negative_runs(&mut best.cubes);
    best
}

const ORDER_PASSES: usize = 64;

/// Reorder cubes so that, on each input, the cubes using it negatively form
/// as few runs as possible. A run is broken only by a positive use; cubes
/// that ignore the input do not break it. Each run costs a NOT pair once the
/// cubes become gates, and gates built from a cover commute, so the order is
/// free. Cubes are moved one at a time to their best position until a pass
/// changes nothing.
fn order_negative_runs(cubes: &mut Vec<Cube>) {
    for _ in 0..ORDER_PASSES {
        let mut improved = false;
        for p in 0..cubes.len() {
            let c = cubes.remove(p);
            let deltas = insertion_deltas(cubes, &c);
            let (best_j, best) = deltas
                .iter()
                .copied()
                .enumerate()
                .min_by_key(|&(j, d)| (d, j))
                .expect("at least one gap");
            if best < deltas[p] {
                cubes.insert(best_j, c);
                improved = true;
            } else {
                cubes.insert(p, c);
            }
        }
        if !improved {
            break;
        }
    }
}

/// Change in the number of negative runs from inserting `c` at each gap.
fn insertion_deltas(cubes: &[Cube], c: &Cube) -> Vec<i64> {
    let gaps = cubes.len() + 1;
    let mut deltas = vec![0i64; gaps];
    let mut prev = vec![Literal::DontCare; gaps];
    let mut next = vec![Literal::DontCare; gaps];
    for (i, &v) in c.inputs.iter().enumerate() {
        if v == Literal::DontCare {
            continue;
        }
        let mut last = Literal::DontCare;
        for j in 0..gaps {
            prev[j] = last;
            if j < cubes.len() && cubes[j].inputs[i] != Literal::DontCare {
                last = cubes[j].inputs[i];
            }
        }
        let mut last = Literal::DontCare;
        for j in (0..gaps).rev() {
            if j < cubes.len() && cubes[j].inputs[i] != Literal::DontCare {
                last = cubes[j].inputs[i];
            }
            next[j] = last;
        }
        let neg = |l: Literal| i64::from(l == Literal::Zero);
        for j in 0..gaps {
            let (p, q, v) = (neg(prev[j]), neg(next[j]), neg(v));
            deltas[j] += v * (1 - p) + q * (1 - v) - q * (1 - p);
        }
    }
    deltas
}

fn gate_key(c: &CoverCost) -> (usize, usize, usize) {
    (c.output_ones, c.cube_count, c.literal_count)
}

/// Minimize each output on its own, then merge cubes with equal inputs.
/// `None` for single-output covers, where this is the joint search.
fn per_output_search(c: &EsopCover, rounds: usize) -> Option<EsopCover> {
    if c.outputs < 2 {
        return None;
    }
    let mut cubes = Vec::new();
    for j in 0..c.outputs {
        let part: Vec<Cube> = c
            .cubes
            .iter()
            .filter(|cube| cube.outputs[j])
            .map(|cube| {
                let mut out = vec![false; c.outputs];
                out[j] = true;
                Cube::new(cube.inputs.clone(), out)
            })
            .collect();
        let part = EsopCover {
            inputs: c.inputs,
            outputs: c.outputs,
            cubes: part,
        };
        cubes.extend(exorlink_search(&part, rounds).cubes);
    }
    let merged = EsopCover {
        inputs: c.inputs,
        outputs: c.outputs,
        cubes,
    };
    Some(exorlink_search(&merged, 0))
}

/// Rounds of distance-2 and distance-3 rewrites ordered by cube count.
fn exorlink_search(c: &EsopCover, rounds: usize) -> EsopCover {
    let mut work = Working::new(c.inputs);
    for cube in &c.cubes {
        let t = Term::from_cube(cube, c.inputs, c.outputs);
        work.insert(t);
    }
    let mut best = canonical(work.terms(), c.inputs);
    let mut best_cost = term_cost(&best);

    for _ in 0..rounds {
        let mut work = Working::new(c.inputs);
        for t in &best {
            work.add(t.clone());
        }
        work.improve();
        work.reshape();
        work.improve();
        let candidate = canonical(work.terms(), c.inputs);
        let cand_cost = term_cost(&candidate);
        if cand_cost.key() < best_cost.key() {
            best = candidate;
            best_cost = cand_cost;
        } else {
            break;
        }
    }

    let cubes = best
        .iter()
        .map(|t| t.to_cube(c.inputs, c.outputs))
        .collect();
    EsopCover {
        inputs: c.inputs,
        outputs: c.outputs,
        cubes,
    }
}

/// Packed cube: `words` holds the care mask, the value mask and the output
/// row, each `width` words long. Bit `i` of a mask is input (or output) `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Term {
    words: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Position {
    Input(usize),
    Output,
}

impl Term {
    fn from_cube(c: &Cube, n: usize, m: usize) -> Term {
        let w = words_for(n, m);
        let mut words = vec![0u64; 3 * w];
        for (i, l) in c.inputs.iter().enumerate() {
            let (word, bit) = (i / 64, 1u64 << (i % 64));
            match l {
                Literal::Zero => words[word] |= bit,
                Literal::One => {
                    words[word] |= bit;
                    words[w + word] |= bit;
                }
                Literal::DontCare => {}
            }
        }
        for (j, &o) in c.outputs.iter().enumerate() {
            if o {
                words[2 * w + j / 64] |= 1u64 << (j % 64);
            }
        }
        Term { words }
    }

    fn to_cube(&self, n: usize, m: usize) -> Cube {
        let inputs = (0..n).map(|i| self.literal(i)).collect();
        let w = self.width();
        let outputs = (0..m)
            .map(|j| self.words[2 * w + j / 64] >> (j % 64) & 1 == 1)
            .collect();
        Cube::new(inputs, outputs)
    }

    fn width(&self) -> usize {
        self.words.len() / 3
    }

    fn care(&self) -> &[u64] {
        &self.words[..self.width()]
    }

    fn out(&self) -> &[u64] {
        &self.words[2 * self.width()..]
    }

    fn inputs_key(&self) -> &[u64] {
        &self.words[..2 * self.width()]
    }

    fn literal(&self, i: usize) -> Literal {
        let (word, shift) = (i / 64, i % 64);
        let care = self.words[word] >> shift & 1 == 1;
        let value = self.words[self.width() + word] >> shift & 1 == 1;
        match (care, value) {
            (true, true) => Literal::One,
            (true, false) => Literal::Zero,
            _ => Literal::DontCare,
        }
    }

    fn set_literal(&mut self, i: usize, l: Literal) {
        let (word, bit) = (i / 64, 1u64 << (i % 64));
        let w = self.width();
        let (care, value) = match l {
            Literal::Zero => (true, false),
            Literal::One => (true, true),
            Literal::DontCare => (false, false),
        };
        self.words[word] = (self.words[word] & !bit) | if care { bit } else { 0 };
        self.words[w + word] = (self.words[w + word] & !bit) | if value { bit } else { 0 };
    }

    fn literal_count(&self) -> usize {
        self.care().iter().map(|w| w.count_ones() as usize).sum()
    }

    fn output_ones(&self) -> usize {
        self.out().iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Positions where `self` and `other` differ, or `None` once more than
    /// `limit` are found.
    fn differences(&self, other: &Term, limit: usize) -> Option<Vec<Position>> {
        let w = self.width();
        let mut diff = Vec::new();
        for k in 0..w {
            let mut mask =
                (self.words[k] ^ other.words[k]) | (self.words[w + k] ^ other.words[w + k]);
            while mask != 0 {
                let b = mask.trailing_zeros() as usize;
                diff.push(Position::Input(k * 64 + b));
                if diff.len() > limit {
                    return None;
                }
                mask &= mask - 1;
            }
        }
        if self.out() != other.out() {
            diff.push(Position::Output);
            if diff.len() > limit {
                return None;
            }
        }
        Some(diff)
    }

    /// Replace position `p` of `self` by the XOR of `self[p]` and `other[p]`.
    fn xor_at(&mut self, other: &Term, p: Position) {
        match p {
            Position::Input(i) => {
                let l = self
                    .literal(i)
                    .xor(other.literal(i))
                    .expect("xor of equal literals");
                self.set_literal(i, l);
            }
            Position::Output => {
                let w = self.width();
                for k in 0..w {
                    self.words[2 * w + k] ^= other.words[2 * w + k];
                }
            }
        }
    }

    fn set_from(&mut self, other: &Term, p: Position) {
        match p {
            Position::Input(i) => self.set_literal(i, other.literal(i)),
            Position::Output => {
                let w = self.width();
                self.words[2 * w..].copy_from_slice(&other.words[2 * w..]);
            }
        }
    }
}

fn words_for(n: usize, m: usize) -> usize {
    n.max(m).div_ceil(64).max(1)
}

/// Combine two terms at distance at most one. `None` means they cancel.
fn merge(a: &Term, b: &Term, diff: &[Position]) -> Option<Term> {
    match diff {
        [] => None,
        [p] => {
            let mut t = a.clone();
            t.xor_at(b, *p);
            Some(t)
        }
        _ => unreachable!("merge of distant terms"),
    }
}

/// Rewrite `a ^ b` over the differing positions taken in `order`:
/// the k-th cube keeps `b` before position k, XORs position k, and keeps `a`
/// after it. Each cube is a product, so the parities telescope back to `a ^ b`.
fn exorlink(a: &Term, b: &Term, order: &[Position]) -> Vec<Term> {
    (0..order.len())
        .map(|k| {
            let mut t = a.clone();
            for &p in &order[..k] {
                t.set_from(b, p);
            }
            t.xor_at(b, order[k]);
            t
        })
        .collect()
}

fn permutations(items: &[Position]) -> Vec<Vec<Position>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn term_cost(terms: &[Term]) -> CoverCost {
    CoverCost {
        cube_count: terms.len(),
        literal_count: terms.iter().map(Term::literal_count).sum(),
        output_ones: terms.iter().map(Term::output_ones).sum(),
    }
}

/// Sort terms so that runs of negative literals on each input stay
/// contiguous: positions rank `0 < 1 < -`, and the rank order reverses
/// below every `1`, as in a reflected Gray code.
fn canonical(mut terms: Vec<Term>, n: usize) -> Vec<Term> {
    terms.sort_by(|a, b| reflected_cmp(a, b, n));
    terms
}

fn reflected_cmp(a: &Term, b: &Term, n: usize) -> Ordering {
    fn rank(l: Literal) -> u8 {
        match l {
            Literal::Zero => 0,
            Literal::One => 1,
            Literal::DontCare => 2,
        }
    }
    let mut reversed = false;
    for i in 0..n {
        let (la, lb) = (a.literal(i), b.literal(i));
        if la != lb {
            let ord = rank(la).cmp(&rank(lb));
            return if reversed { ord.reverse() } else { ord };
        }
        if la == Literal::One {
            reversed = !reversed;
        }
    }
    a.out().cmp(b.out())
}

enum Undo {
    Added(usize),
    Removed(usize, Term),
}

/// Mutable cover with hash indexes for distance-one lookups. After every
/// public operation no two live terms are within distance one.
struct Working {
    inputs: usize,
    slots: Vec<Option<Term>>,
    live: usize,
    by_term: HashMap<Term, usize>,
    by_inputs: HashMap<Vec<u64>, usize>,
    log: Option<Vec<Undo>>,
}

impl Working {
    fn new(inputs: usize) -> Self {
        Working {
            inputs,
            slots: Vec::new(),
            live: 0,
            by_term: HashMap::new(),
            by_inputs: HashMap::new(),
            log: None,
        }
    }

    fn terms(&self) -> Vec<Term> {
        self.slots.iter().flatten().cloned().collect()
    }

    fn add(&mut self, t: Term) -> usize {
        let slot = self.slots.len();
        self.by_inputs.insert(t.inputs_key().to_vec(), slot);
        self.by_term.insert(t.clone(), slot);
        self.slots.push(Some(t));
        self.live += 1;
        if let Some(log) = &mut self.log {
            log.push(Undo::Added(slot));
        }
        slot
    }

    fn remove(&mut self, slot: usize) -> Term {
        let t = self.slots[slot].take().expect("removing a dead slot");
        self.by_inputs.remove(t.inputs_key());
        self.by_term.remove(&t);
        self.live -= 1;
        if let Some(log) = &mut self.log {
            log.push(Undo::Removed(slot, t.clone()));
        }
        t
    }

    fn begin(&mut self) {
        self.log = Some(Vec::new());
    }

    fn commit(&mut self) {
        self.log = None;
    }

    fn rollback(&mut self) {
        let log = self.log.take().unwrap_or_default();
        for op in log.into_iter().rev() {
            match op {
                Undo::Added(slot) => {
                    let t = self.slots[slot].take().expect("undo of a dead add");
                    self.by_inputs.remove(t.inputs_key());
                    self.by_term.remove(&t);
                    self.live -= 1;
                    debug_assert_eq!(slot + 1, self.slots.len());
                    self.slots.pop();
                }
                Undo::Removed(slot, t) => {
                    self.by_inputs.insert(t.inputs_key().to_vec(), slot);
                    self.by_term.insert(t.clone(), slot);
                    self.slots[slot] = Some(t);
                    self.live += 1;
                }
            }
        }
    }

    /// Lowest-index live term within distance one of `t`.
    fn neighbor(&self, t: &Term) -> Option<usize> {
        let mut best = self.by_inputs.get(t.inputs_key()).copied();
        let mut probe = t.clone();
        for i in 0..self.inputs {
            let original = t.literal(i);
            for l in [Literal::Zero, Literal::One, Literal::DontCare] {
                if l == original {
                    continue;
                }
                probe.set_literal(i, l);
                if let Some(&slot) = self.by_term.get(&probe) {
                    best = Some(best.map_or(slot, |b| b.min(slot)));
                }
            }
            probe.set_literal(i, original);
        }
        best
    }

    /// Add `t`, merging it with neighbours until none is left.
    fn insert(&mut self, mut t: Term) {
        while let Some(slot) = self.neighbor(&t) {
            let other = self.remove(slot);
            let diff = t
                .differences(&other, 1)
                .expect("neighbour within distance one");
            match merge(&t, &other, &diff) {
                Some(merged) => t = merged,
                None => return,
            }
        }
        self.add(t);
    }

    /// Replace the terms in slots `i` and `j` by `replacement`. The change is
    /// kept if the live count drops, or does not grow when `allow_equal`.
    fn try_replace(
        &mut self,
        i: usize,
        j: usize,
        replacement: Vec<Term>,
        allow_equal: bool,
    ) -> bool {
        let before = self.live;
        self.begin();
        self.remove(i);
        self.remove(j);
        for t in replacement {
            self.insert(t);
        }
        if self.live < before || (allow_equal && self.live == before) {
            self.commit();
            true
        } else {
            self.rollback();
            false
        }
    }

    /// Apply distance-2 and distance-3 rewrites that lower the cube count,
    /// sweeping until a full sweep finds nothing.
    fn improve(&mut self) {
        loop {
            let mut changed = false;
            let mut i = 0;
            while i < self.slots.len() {
                let mut j = i + 1;
                while j < self.slots.len() && self.slots[i].is_some() {
                    if self.slots[j].is_some() && self.try_improving_pair(i, j) {
                        changed = true;
                    }
                    j += 1;
                }
                i += 1;
            }
            if !changed {
                return;
            }
        }
    }

    fn try_improving_pair(&mut self, i: usize, j: usize) -> bool {
        let (a, b) = match (&self.slots[i], &self.slots[j]) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => return false,
        };
        let diff = match a.differences(&b, 3) {
            Some(d) if d.len() >= 2 => d,
            _ => return false,
        };
        for order in permutations(&diff) {
            let replacement = exorlink(&a, &b, &order);
            // a rewrite into k cubes only pays off if k - 1 of them merge away
            if replacement
                .iter()
                .filter(|t| self.neighbor_excluding(t, i, j))
                .count()
                + 1
                < replacement.len()
            {
                continue;
            }
            if self.try_replace(i, j, replacement, false) {
                return true;
            }
        }
        false
    }

    /// Whether `t` has a neighbour other than the terms in slots `i` and `j`.
    fn neighbor_excluding(&self, t: &Term, i: usize, j: usize) -> bool {
        if let Some(&slot) = self.by_inputs.get(t.inputs_key()) {
            if slot != i && slot != j {
                return true;
            }
        }
        let mut probe = t.clone();
        for p in 0..self.inputs {
            let original = t.literal(p);
            for l in [Literal::Zero, Literal::One, Literal::DontCare] {
                if l == original {
                    continue;
                }
                probe.set_literal(p, l);
                if let Some(&slot) = self.by_term.get(&probe) {
                    if slot != i && slot != j {
                        return true;
                    }
                }
            }
            probe.set_literal(p, original);
        }
        false
    }

    /// One sweep of cost-neutral distance-2 rewrites. A rewrite is kept when
    /// it does not raise the cube count or the combined literal and output
    /// weight. Pairs made only of terms created in this sweep are skipped so
    /// the sweep cannot immediately undo itself.
    fn reshape(&mut self) {
        let fresh_from = self.slots.len();
        let mut i = 0;
        while i < self.slots.len() {
            let mut j = i + 1;
            while j < self.slots.len() && self.slots[i].is_some() {
                if j >= fresh_from && i >= fresh_from {
                    break;
                }
                if let (Some(a), Some(b)) = (&self.slots[i], &self.slots[j]) {
                    let (a, b) = (a.clone(), b.clone());
                    if let Some(diff) = a.differences(&b, 2) {
                        if diff.len() == 2 {
                            let weight = |t: &Term| t.literal_count() + t.output_ones();
                            let old = weight(&a) + weight(&b);
                            for order in permutations(&diff) {
                                let replacement = exorlink(&a, &b, &order);
                                if replacement.iter().any(|t| *t == a || *t == b) {
                                    continue;
                                }
                                let new: usize = replacement.iter().map(weight).sum();
                                if new > old {
                                    continue;
                                }
                                if self.try_replace(i, j, replacement, true) {
                                    break;
                                }
                            }
                        }
                    }
                }
                j += 1;
            }
            i += 1;
        }
    }
}
