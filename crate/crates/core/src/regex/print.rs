//! DFA to pattern conversion by state elimination.

use std::collections::BTreeMap;

use super::automaton::Dfa;
use super::charset::CharSet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Re {
    Eps,
    Set(CharSet),
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    Star(Box<Re>),
    Opt(Box<Re>),
}

fn cat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Eps, x) | (x, Re::Eps) => x,
        (Re::Cat(mut xs), Re::Cat(ys)) => {
            xs.extend(ys);
            Re::Cat(xs)
        }
        (Re::Cat(mut xs), y) => {
            xs.push(y);
            Re::Cat(xs)
        }
        (x, Re::Cat(mut ys)) => {
            ys.insert(0, x);
            Re::Cat(ys)
        }
        (x, y) => Re::Cat(vec![x, y]),
    }
}

fn alt(a: Re, b: Re) -> Re {
    if a == b {
        return a;
    }
    match (a, b) {
        (Re::Set(x), Re::Set(y)) => Re::Set(x.union(&y)),
        (Re::Eps, x) | (x, Re::Eps) => match x {
            Re::Star(_) | Re::Opt(_) => x,
            x => Re::Opt(Box::new(x)),
        },
        (Re::Opt(x), y) | (y, Re::Opt(x)) => match alt(*x, y) {
            r @ (Re::Star(_) | Re::Opt(_)) => r,
            r => Re::Opt(Box::new(r)),
        },
        (Re::Alt(mut xs), Re::Alt(ys)) => {
            for y in ys {
                if !xs.contains(&y) {
                    xs.push(y);
                }
            }
            Re::Alt(xs)
        }
        (Re::Alt(mut xs), y) | (y, Re::Alt(mut xs)) => {
            if !xs.contains(&y) {
                xs.push(y);
            }
            Re::Alt(xs)
        }
        (x, y) => Re::Alt(vec![x, y]),
    }
}

fn star(a: Re) -> Re {
    match a {
        Re::Eps => Re::Eps,
        Re::Star(_) => a,
        Re::Opt(x) => star(*x),
        x => Re::Star(Box::new(x)),
    }
}

fn render(re: &Re, out: &mut String) {
    match re {
        Re::Eps => {}
        Re::Set(s) => out.push_str(&s.to_pattern()),
        Re::Cat(xs) => {
            for x in xs {
                if matches!(x, Re::Alt(_)) {
                    out.push_str("(?:");
                    render(x, out);
                    out.push(')');
                } else {
                    render(x, out);
                }
            }
        }
        Re::Alt(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push('|');
                }
                render(x, out);
            }
        }
        Re::Star(x) | Re::Opt(x) => {
            if matches!(**x, Re::Set(_)) {
                render(x, out);
            } else {
                out.push_str("(?:");
                render(x, out);
                out.push(')');
            }
            out.push(if matches!(re, Re::Star(_)) { '*' } else { '?' });
        }
    }
}

/// `^.{m,n}$` when acceptance depends only on the length and the accepted
/// lengths form an interval.
fn length_pattern(dfa: &Dfa, live: &[bool]) -> Option<String> {
    let any = CharSet::any();
    // Walk the chain of successors; `order[i]` is the state after i chars.
    let mut order: Vec<usize> = Vec::new();
    let mut state = 0usize;
    let cycle_start = loop {
        if let Some(i) = order.iter().position(|&q| q == state) {
            break Some(i);
        }
        order.push(state);
        let st = &dfa.states[state];
        let targets: Vec<usize> = st.trans.iter().map(|t| t.2 as usize).filter(|&t| live[t]).collect();
        let Some(&next) = targets.first() else { break None };
        let covered = CharSet::from_ranges(st.trans.iter().filter(|t| t.2 as usize == next).map(|t| (t.0, t.1)));
        if targets.iter().any(|&t| t != next) || covered != any {
            return None;
        }
        state = next;
    };
    let accepted: Vec<bool> = order.iter().map(|&q| dfa.states[q].accept).collect();
    let min = accepted.iter().position(|&a| a)?;
    let max = accepted.iter().rposition(|&a| a)?;
    if accepted[min..=max].iter().any(|&a| !a) {
        return None;
    }
    // Lengths past the walk repeat the cycle's acceptance.
    let unbounded = match cycle_start {
        Some(j) if accepted[j..].iter().all(|&a| a) => true,
        Some(j) if accepted[j..].iter().any(|&a| a) => return None,
        _ => false,
    };
    if unbounded && accepted[min..].iter().any(|&a| !a) {
        return None;
    }
    let upper = if unbounded { String::new() } else { max.to_string() };
    Some(match (min, upper.as_str()) {
        (0, "") => "^.*$".to_string(),
        (m, "") => format!("^.{{{m},}}$"),
        (m, u) if u == m.to_string() => format!("^.{{{m}}}$"),
        (m, u) => format!("^.{{{m},{u}}}$"),
    })
}

/// A pattern matching exactly the full strings accepted by `dfa`, anchored
/// with `^` and `$`.
pub fn to_pattern(dfa: &Dfa) -> String {
    let live = dfa.live_states();
    if !live[0] {
        return "[]".to_string();
    }
    if let Some(p) = length_pattern(dfa, &live) {
        return p;
    }
    let n = dfa.states.len();
    // Nodes: 0..n are DFA states, n is the fresh start, n+1 the fresh final.
    let start = n;
    let fin = n + 1;
    let mut edges: BTreeMap<(usize, usize), Re> = BTreeMap::new();
    let add = |edges: &mut BTreeMap<(usize, usize), Re>, k: (usize, usize), r: Re| {
        let v = match edges.remove(&k) {
            Some(old) => alt(old, r),
            None => r,
        };
        edges.insert(k, v);
    };
    add(&mut edges, (start, 0), Re::Eps);
    for (s, st) in dfa.states.iter().enumerate() {
        if !live[s] {
            continue;
        }
        if st.accept {
            add(&mut edges, (s, fin), Re::Eps);
        }
        let mut by_target: BTreeMap<usize, Vec<(u32, u32)>> = BTreeMap::new();
        for &(lo, hi, t) in &st.trans {
            if live[t as usize] {
                by_target.entry(t as usize).or_default().push((lo, hi));
            }
        }
        for (t, ranges) in by_target {
            add(&mut edges, (s, t), Re::Set(CharSet::from_ranges(ranges)));
        }
    }
    let mut remaining: Vec<usize> = (0..n).filter(|&s| live[s]).collect();
    while !remaining.is_empty() {
        // Eliminate the state with the fewest in/out edge combinations.
        let (idx, &q) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &q)| {
                let ins = edges.keys().filter(|k| k.1 == q && k.0 != q).count();
                let outs = edges.keys().filter(|k| k.0 == q && k.1 != q).count();
                ins * outs
            })
            .expect("nonempty");
        remaining.remove(idx);
        let loop_re = edges.remove(&(q, q)).map(star).unwrap_or(Re::Eps);
        let ins: Vec<(usize, Re)> = edges
            .iter()
            .filter(|(k, _)| k.1 == q)
            .map(|(k, v)| (k.0, v.clone()))
            .collect();
        let outs: Vec<(usize, Re)> = edges
            .iter()
            .filter(|(k, _)| k.0 == q)
            .map(|(k, v)| (k.1, v.clone()))
            .collect();
        edges.retain(|k, _| k.0 != q && k.1 != q);
        for (p, rin) in &ins {
            for (r, rout) in &outs {
                let re = cat(cat(rin.clone(), loop_re.clone()), rout.clone());
                add(&mut edges, (*p, *r), re);
            }
        }
    }
    let body = edges.remove(&(start, fin)).unwrap_or(Re::Set(CharSet::empty()));
    let mut out = String::from("^");
    match body {
        Re::Alt(_) => {
            out.push_str("(?:");
            render(&body, &mut out);
            out.push(')');
        }
        _ => render(&body, &mut out),
    }
    out.push('$');
    out
}
