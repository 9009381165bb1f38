//! Thompson NFAs over character ranges and minimal complete DFAs.
//!
//! DFA transitions of every state partition the alphabet (all Unicode scalar
//! values) into ranges, so complement is a flip of the accepting set and
//! products walk two sorted range lists in lockstep.

use std::collections::{HashMap, VecDeque};

use super::charset::CharSet;
use super::parse::Ast;
use crate::error::{Error, Result};

const NFA_STATE_LIMIT: usize = 250_000;
const DFA_STATE_LIMIT: usize = 100_000;

#[derive(Debug, Default, Clone)]
struct NState {
    eps: Vec<usize>,
    start_eps: Vec<usize>,
    end_eps: Vec<usize>,
    edges: Vec<(CharSet, usize)>,
}

#[derive(Debug)]
pub struct Nfa {
    states: Vec<NState>,
    start: usize,
    accept: usize,
}

impl Nfa {
    pub fn build(ast: &Ast, src: &str) -> Result<Nfa> {
        let mut nfa = Nfa {
            states: Vec::new(),
            start: 0,
            accept: 0,
        };
        let start = nfa.add();
        let accept = nfa.add();
        nfa.fragment(ast, start, accept, src)?;
        nfa.start = start;
        nfa.accept = accept;
        Ok(nfa)
    }

    fn add(&mut self) -> usize {
        self.states.push(NState::default());
        self.states.len() - 1
    }

    fn fragment(&mut self, ast: &Ast, from: usize, to: usize, src: &str) -> Result<()> {
        if self.states.len() > NFA_STATE_LIMIT {
            return Err(Error::Capacity(format!("automaton for `{src}` too large")));
        }
        match ast {
            Ast::Empty => {}
            Ast::Epsilon => self.states[from].eps.push(to),
            Ast::Class(set) => {
                if !set.is_empty() {
                    self.states[from].edges.push((set.clone(), to));
                }
            }
            Ast::StartAnchor => self.states[from].start_eps.push(to),
            Ast::EndAnchor => self.states[from].end_eps.push(to),
            Ast::Concat(items) => {
                let mut cur = from;
                for (i, item) in items.iter().enumerate() {
                    let next = if i + 1 == items.len() { to } else { self.add() };
                    self.fragment(item, cur, next, src)?;
                    cur = next;
                }
                if items.is_empty() {
                    self.states[from].eps.push(to);
                }
            }
            Ast::Alt(branches) => {
                for b in branches {
                    let s = self.add();
                    let e = self.add();
                    self.states[from].eps.push(s);
                    self.fragment(b, s, e, src)?;
                    self.states[e].eps.push(to);
                }
            }
            Ast::Repeat { inner, min, max } => {
                let mut cur = from;
                for _ in 0..*min {
                    let next = self.add();
                    self.fragment(inner, cur, next, src)?;
                    cur = next;
                }
                match max {
                    None => {
                        let s = self.add();
                        let e = self.add();
                        self.states[cur].eps.push(s);
                        self.fragment(inner, s, e, src)?;
                        self.states[e].eps.push(s);
                        self.states[s].eps.push(to);
                    }
                    Some(max) => {
                        self.states[cur].eps.push(to);
                        for _ in *min..*max {
                            let next = self.add();
                            self.fragment(inner, cur, next, src)?;
                            self.states[next].eps.push(to);
                            cur = next;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn closure(&self, seeds: &[usize], at_start: bool, at_end: bool) -> Vec<usize> {
        let mut seen = vec![false; self.states.len()];
        let mut stack: Vec<usize> = seeds.to_vec();
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s], true) {
                continue;
            }
            out.push(s);
            let st = &self.states[s];
            stack.extend(st.eps.iter().copied());
            if at_start {
                stack.extend(st.start_eps.iter().copied());
            }
            if at_end {
                stack.extend(st.end_eps.iter().copied());
            }
        }
        out.sort_unstable();
        out
    }

    pub fn determinize(&self, src: &str) -> Result<Dfa> {
        let mut ids: HashMap<(bool, Vec<usize>), u32> = HashMap::new();
        let mut states: Vec<DState> = Vec::new();
        let mut queue = VecDeque::new();
        let init = self.closure(&[self.start], true, false);
        ids.insert((true, init.clone()), 0);
        states.push(DState::default());
        queue.push_back((true, init, 0u32));
        let universe = CharSet::any();
        while let Some((initial, set, id)) = queue.pop_front() {
            let accept = self.closure(&set, initial, true).binary_search(&self.accept).is_ok();
            let mut bounds: Vec<u32> = Vec::new();
            let mut edges: Vec<&(CharSet, usize)> = Vec::new();
            for &s in &set {
                for e in &self.states[s].edges {
                    for &(lo, hi) in e.0.ranges() {
                        bounds.push(lo);
                        bounds.push(hi + 1);
                    }
                    edges.push(e);
                }
            }
            for &(lo, hi) in universe.ranges() {
                bounds.push(lo);
                bounds.push(hi + 1);
            }
            bounds.sort_unstable();
            bounds.dedup();
            let mut trans = Vec::new();
            for w in bounds.windows(2) {
                let (lo, hi) = (w[0], w[1] - 1);
                if !universe.contains(lo) {
                    continue;
                }
                let mut targets: Vec<usize> = edges
                    .iter()
                    .filter(|(cs, _)| cs.contains(lo))
                    .map(|(_, t)| *t)
                    .collect();
                targets.sort_unstable();
                targets.dedup();
                let next = self.closure(&targets, false, false);
                let key = (false, next);
                let tid = match ids.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = states.len() as u32;
                        if states.len() >= DFA_STATE_LIMIT {
                            return Err(Error::Capacity(format!("automaton for `{src}` too large")));
                        }
                        states.push(DState::default());
                        ids.insert(key.clone(), t);
                        queue.push_back((false, key.1, t));
                        t
                    }
                };
                trans.push((lo, hi, tid));
            }
            states[id as usize] = DState {
                accept,
                trans: merge_adjacent(trans),
            };
        }
        Ok(Dfa { states }.minimize())
    }
}

fn merge_adjacent(trans: Vec<(u32, u32, u32)>) -> Vec<(u32, u32, u32)> {
    let mut out: Vec<(u32, u32, u32)> = Vec::with_capacity(trans.len());
    for (lo, hi, t) in trans {
        match out.last_mut() {
            Some(last) if last.2 == t && last.1 + 1 == lo => last.1 = hi,
            _ => out.push((lo, hi, t)),
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DState {
    pub accept: bool,
    pub trans: Vec<(u32, u32, u32)>,
}

/// A minimal complete DFA; state 0 is the start state and states are
/// numbered in breadth-first order, so equal languages have equal values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    pub states: Vec<DState>,
}

impl Dfa {
    pub fn universal(accept: bool) -> Dfa {
        let trans = CharSet::any()
            .ranges()
            .iter()
            .map(|&(lo, hi)| (lo, hi, 0))
            .collect();
        Dfa {
            states: vec![DState { accept, trans }],
        }
    }

    pub fn step(&self, state: u32, c: u32) -> Option<u32> {
        let trans = &self.states[state as usize].trans;
        trans
            .binary_search_by(|&(lo, hi, _)| {
                if hi < c {
                    std::cmp::Ordering::Less
                } else if lo > c {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .ok()
            .map(|i| trans[i].2)
    }

    pub fn accepts(&self, s: &str) -> bool {
        let mut state = 0u32;
        for c in s.chars() {
            match self.step(state, c as u32) {
                Some(n) => state = n,
                None => return false,
            }
        }
        self.states[state as usize].accept
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for s in &mut d.states {
            s.accept = !s.accept;
        }
        d.minimize()
    }

    pub fn product(&self, other: &Dfa, op: impl Fn(bool, bool) -> bool) -> Dfa {
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut states: Vec<DState> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert((0, 0), 0);
        states.push(DState::default());
        queue.push_back((0u32, 0u32));
        while let Some((a, b)) = queue.pop_front() {
            let id = ids[&(a, b)];
            let sa = &self.states[a as usize];
            let sb = &other.states[b as usize];
            let mut trans = Vec::new();
            let (mut i, mut j) = (0, 0);
            while i < sa.trans.len() && j < sb.trans.len() {
                let (alo, ahi, at) = sa.trans[i];
                let (blo, bhi, bt) = sb.trans[j];
                let lo = alo.max(blo);
                let hi = ahi.min(bhi);
                if lo <= hi {
                    let key = (at, bt);
                    let tid = match ids.get(&key) {
                        Some(&t) => t,
                        None => {
                            let t = states.len() as u32;
                            states.push(DState::default());
                            ids.insert(key, t);
                            queue.push_back(key);
                            t
                        }
                    };
                    trans.push((lo, hi, tid));
                }
                if ahi <= bhi {
                    i += 1;
                }
                if bhi <= ahi {
                    j += 1;
                }
            }
            states[id as usize] = DState {
                accept: op(sa.accept, sb.accept),
                trans: merge_adjacent(trans),
            };
        }
        Dfa { states }.minimize()
    }

    pub fn is_empty(&self) -> bool {
        !self.states.iter().any(|s| s.accept)
    }

    /// Moore partition refinement followed by breadth-first renumbering.
    pub fn minimize(&self) -> Dfa {
        let n = self.states.len();
        let mut class: Vec<u32> = self.states.iter().map(|s| s.accept as u32).collect();
        let mut count = {
            let mut c = class.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let mut sig_ids: HashMap<(u32, Vec<(u32, u32, u32)>), u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for (s, st) in self.states.iter().enumerate() {
                let sig: Vec<(u32, u32, u32)> = merge_adjacent(
                    st.trans
                        .iter()
                        .map(|&(lo, hi, t)| (lo, hi, class[t as usize]))
                        .collect(),
                );
                let len = sig_ids.len() as u32;
                next[s] = *sig_ids.entry((class[s], sig)).or_insert(len);
            }
            let new_count = sig_ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // Renumber reachable classes breadth-first from the start state.
        let mut order: HashMap<u32, u32> = HashMap::new();
        let mut rep: Vec<usize> = Vec::new();
        let mut queue = VecDeque::new();
        order.insert(class[0], 0);
        rep.push(0);
        queue.push_back(0usize);
        while let Some(s) = queue.pop_front() {
            for &(_, _, t) in &self.states[s].trans {
                let c = class[t as usize];
                if let std::collections::hash_map::Entry::Vacant(e) = order.entry(c) {
                    e.insert(rep.len() as u32);
                    rep.push(t as usize);
                    queue.push_back(t as usize);
                }
            }
        }
        let states = rep
            .iter()
            .map(|&s| DState {
                accept: self.states[s].accept,
                trans: merge_adjacent(
                    self.states[s]
                        .trans
                        .iter()
                        .map(|&(lo, hi, t)| (lo, hi, order[&class[t as usize]]))
                        .collect(),
                ),
            })
            .collect();
        Dfa { states }
    }

    /// States from which an accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, st) in self.states.iter().enumerate() {
            for &(_, _, t) in &st.trans {
                rev[t as usize].push(s);
            }
        }
        let mut live = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| self.states[s].accept).collect();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut live[s], true) {
                continue;
            }
            stack.extend(rev[s].iter().copied());
        }
        live
    }

    /// True when the language has infinitely many strings.
    pub fn is_infinite(&self) -> bool {
        let live = self.live_states();
        // A cycle among live states means unbounded lengths.
        let n = self.states.len();
        let mut color = vec![0u8; n];
        fn dfs(d: &Dfa, s: usize, live: &[bool], color: &mut [u8]) -> bool {
            color[s] = 1;
            for &(_, _, t) in &d.states[s].trans {
                let t = t as usize;
                if !live[t] {
                    continue;
                }
                if color[t] == 1 {
                    return true;
                }
                if color[t] == 0 && dfs(d, t, live, color) {
                    return true;
                }
            }
            color[s] = 2;
            false
        }
        live[0] && dfs(self, 0, &live, &mut color)
    }

    /// Number of accepted strings, saturating at `cap`.
    pub fn count(&self, cap: u64) -> u64 {
        if self.is_infinite() {
            return cap;
        }
        let live = self.live_states();
        if !live[0] {
            return 0;
        }
        // Acyclic over live states: count paths by memoised DFS.
        let mut memo: Vec<Option<u64>> = vec![None; self.states.len()];
        fn paths(d: &Dfa, s: usize, live: &[bool], memo: &mut [Option<u64>], cap: u64) -> u64 {
            if let Some(v) = memo[s] {
                return v;
            }
            let mut total: u64 = d.states[s].accept as u64;
            for &(lo, hi, t) in &d.states[s].trans {
                if !live[t as usize] {
                    continue;
                }
                let width = (hi - lo + 1) as u64;
                let sub = paths(d, t as usize, live, memo, cap);
                total = total.saturating_add(width.saturating_mul(sub)).min(cap);
            }
            memo[s] = Some(total);
            total
        }
        paths(self, 0, &live, &mut memo, cap)
    }

    /// Up to `limit` accepted strings in length-lexicographic order, trying
    /// only the first `per_range` characters of each transition range.
    pub fn sample(&self, limit: usize, max_len: usize, per_range: u32) -> Vec<String> {
        let live = self.live_states();
        let mut out = Vec::new();
        if !live[0] {
            return out;
        }
        let mut frontier: Vec<(u32, String)> = vec![(0, String::new())];
        for _ in 0..=max_len {
            let mut next = Vec::new();
            for (s, w) in &frontier {
                if self.states[*s as usize].accept {
                    out.push(w.clone());
                    if out.len() >= limit {
                        return out;
                    }
                }
                for &(lo, hi, t) in &self.states[*s as usize].trans {
                    if !live[t as usize] {
                        continue;
                    }
                    for c in (lo..=hi).take(per_range as usize).filter_map(char::from_u32) {
                        let mut w2 = w.clone();
                        w2.push(c);
                        next.push((t, w2));
                    }
                }
            }
            if next.len() > 4 * limit + 64 {
                next.truncate(4 * limit + 64);
            }
            frontier = next;
        }
        out
    }

    /// A shortest accepted string.
    pub fn shortest(&self) -> Option<String> {
        let n = self.states.len();
        let mut prev: Vec<Option<(u32, u32)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0u32);
        while let Some(s) = queue.pop_front() {
            if self.states[s as usize].accept {
                let mut out = Vec::new();
                let mut cur = s;
                while let Some((p, c)) = prev[cur as usize] {
                    out.push(char::from_u32(c).expect("scalar"));
                    cur = p;
                }
                return Some(out.into_iter().rev().collect());
            }
            for &(lo, _, t) in &self.states[s as usize].trans {
                if !std::mem::replace(&mut seen[t as usize], true) {
                    prev[t as usize] = Some((s, lo));
                    queue.push_back(t);
                }
            }
        }
        None
    }
}
