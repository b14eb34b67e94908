//! Structural congruence by canonical forms.
//!
//! Both calculi are translated into one generic term shape. A term is flattened
//! into restriction groups and threads; unused restrictions are dropped, threads
//! equal to an unfolding of a sibling replication are absorbed into it, and the
//! remaining threads are rendered with binders named by position and sorted.
//! Restriction annotations are ignored.

use std::collections::{BTreeSet, HashMap};

use super::pi::step_pi;
use crate::syntax::*;

enum G {
    Nil,
    Par(Box<G>, Box<G>),
    Res(Vec<String>, Box<G>),
    Repl(Box<G>),
    /// A prefix: `head` holds one `@` per entry of `uses`; each continuation
    /// carries a label and the names it binds.
    Act {
        head: String,
        uses: Vec<String>,
        conts: Vec<(String, Vec<String>, G)>,
    },
}

fn from_session(p: &SessionProcess) -> G {
    use SessionProcess::*;
    let act = |head: String, uses: Vec<String>, conts| G::Act { head, uses, conts };
    match p {
        Nil => G::Nil,
        Par(a, b) => G::Par(Box::new(from_session(a)), Box::new(from_session(b))),
        Repl(q) => G::Repl(Box::new(from_session(q))),
        SessRes { x, y, body, .. } => G::Res(vec![x.clone(), y.clone()], Box::new(from_session(body))),
        ChanRes { name, body, .. } => G::Res(vec![name.clone()], Box::new(from_session(body))),
        Output { subject, payload, cont } => {
            let (head, uses) = match payload {
                SessionValue::Var(v) => ("@!@".to_string(), vec![subject.clone(), v.clone()]),
                SessionValue::Unit => ("@!()".to_string(), vec![subject.clone()]),
            };
            act(head, uses, vec![(String::new(), vec![], from_session(cont))])
        }
        Input { subject, binder, annot, cont } => {
            act(format!("@?:{annot}"), vec![subject.clone()], vec![(String::new(), vec![binder.clone()], from_session(cont))])
        }
        Selection { subject, label, cont } => {
            act(format!("@<{label}"), vec![subject.clone()], vec![(String::new(), vec![], from_session(cont))])
        }
        Branching { subject, arms } => {
            act("@>".to_string(), vec![subject.clone()], arms.iter().map(|(l, q)| (l.to_string(), vec![], from_session(q))).collect())
        }
    }
}

fn pi_value(v: &PiValue, head: &mut String, uses: &mut Vec<String>) {
    match v {
        PiValue::Var(x) => {
            head.push('@');
            uses.push(x.clone());
        }
        PiValue::Unit => head.push_str("()"),
        PiValue::Variant(l, w) => {
            head.push_str(&format!("{l}("));
            pi_value(w, head, uses);
            head.push(')');
        }
    }
}

fn from_pi(p: &PiProcess) -> G {
    use PiProcess::*;
    match p {
        Nil => G::Nil,
        Par(a, b) => G::Par(Box::new(from_pi(a)), Box::new(from_pi(b))),
        Repl(q) => G::Repl(Box::new(from_pi(q))),
        Res { name, body, .. } => G::Res(vec![name.clone()], Box::new(from_pi(body))),
        Output { subject, payloads, cont } => {
            let (mut head, mut uses) = ("@!(".to_string(), vec![subject.clone()]);
            for (i, v) in payloads.iter().enumerate() {
                if i > 0 {
                    head.push(',');
                }
                pi_value(v, &mut head, &mut uses);
            }
            head.push(')');
            G::Act { head, uses, conts: vec![(String::new(), vec![], from_pi(cont))] }
        }
        Input { subject, binders, cont } => G::Act {
            head: format!("@?/{}", binders.len()),
            uses: vec![subject.clone()],
            conts: vec![(String::new(), binders.clone(), from_pi(cont))],
        },
        Case { scrutinee, arms } => {
            let (mut head, mut uses) = ("case ".to_string(), vec![]);
            pi_value(scrutinee, &mut head, &mut uses);
            let conts = arms.iter().map(|(l, (x, q))| (l.to_string(), vec![x.clone()], from_pi(q))).collect();
            G::Act { head, uses, conts }
        }
    }
}

fn free_raw(g: &G) -> BTreeSet<String> {
    match g {
        G::Nil => BTreeSet::new(),
        G::Par(a, b) => free_raw(a).union(&free_raw(b)).cloned().collect(),
        G::Repl(q) => free_raw(q),
        G::Res(ns, body) => {
            let mut f = free_raw(body);
            for n in ns {
                f.remove(n);
            }
            f
        }
        G::Act { uses, conts, .. } => {
            let mut f: BTreeSet<String> = uses.iter().cloned().collect();
            for (_, bs, q) in conts {
                let mut fq = free_raw(q);
                for b in bs {
                    fq.remove(b);
                }
                f.extend(fq);
            }
            f
        }
    }
}

type Env = HashMap<String, String>;

/// Permutations tried when naming the restrictions of one level.
const BRUTE_FORCE_LIMIT: usize = 2000;

#[derive(Default)]
struct Canon {
    next: usize,
    display: HashMap<String, String>,
}

impl Canon {
    fn id(&mut self) -> String {
        self.next += 1;
        format!("#{}", self.next)
    }

    fn show(&self, name: &str, env: &Env) -> String {
        let id = env.get(name).map(String::as_str).unwrap_or(name);
        self.display.get(id).cloned().unwrap_or_else(|| id.to_string())
    }

    fn flatten<'a>(&mut self, g: &'a G, env: &Env, groups: &mut Vec<Vec<String>>, threads: &mut Vec<(&'a G, Env)>) {
        match g {
            G::Nil => {}
            G::Par(a, b) => {
                self.flatten(a, env, groups, threads);
                self.flatten(b, env, groups, threads);
            }
            G::Res(ns, body) => {
                let mut env2 = env.clone();
                let mut ids = Vec::new();
                for n in ns {
                    let id = self.id();
                    env2.insert(n.clone(), id.clone());
                    ids.push(id);
                }
                groups.push(ids);
                self.flatten(body, &env2, groups, threads);
            }
            _ => threads.push((g, env.clone())),
        }
    }

    fn thread(&mut self, g: &G, env: &Env, depth: usize) -> String {
        match g {
            G::Repl(q) => format!("*({})", self.canon(q, env, depth + 1)),
            G::Act { head, uses, conts } => {
                let mut out = String::new();
                let mut it = uses.iter();
                for ch in head.chars() {
                    if ch == '@' {
                        out.push_str(&self.show(it.next().expect("one use per placeholder"), env));
                    } else {
                        out.push(ch);
                    }
                }
                for (label, bs, q) in conts {
                    let mut env2 = env.clone();
                    let mut shown = Vec::new();
                    for (i, b) in bs.iter().enumerate() {
                        let id = self.id();
                        let d = format!("%{depth}_{i}");
                        self.display.insert(id.clone(), d.clone());
                        env2.insert(b.clone(), id);
                        shown.push(d);
                    }
                    out.push_str(&format!("{{{label}({}).{}}}", shown.join(","), self.canon(q, &env2, depth + 1)));
                }
                out
            }
            _ => unreachable!("flattened threads are prefixes or replications"),
        }
    }

    fn canon(&mut self, g: &G, env: &Env, depth: usize) -> String {
        let (groups, threads) = (&mut Vec::new(), &mut Vec::new());
        self.flatten(g, env, groups, threads);
        self.parts(std::mem::take(groups), std::mem::take(threads), depth)
    }

    /// Splits non-replicated threads into components linked by restrictions
    /// that no replicated thread mentions, and renders each component.
    fn components(&mut self, groups: &[Vec<String>], threads: &[(&G, Env)], depth: usize) -> Vec<(String, Vec<usize>)> {
        let uses: Vec<BTreeSet<String>> =
            threads.iter().map(|(t, e)| free_raw(t).into_iter().map(|n| e.get(&n).cloned().unwrap_or(n)).collect()).collect();
        let repl = |i: usize| matches!(threads[i].0, G::Repl(_));
        let shared: BTreeSet<&String> = (0..threads.len()).filter(|&i| repl(i)).flat_map(|i| &uses[i]).collect();
        let local: Vec<&Vec<String>> = groups.iter().filter(|ids| !ids.iter().any(|id| shared.contains(id))).collect();

        let mut comp: Vec<Vec<usize>> = (0..threads.len()).filter(|&i| !repl(i)).map(|i| vec![i]).collect();
        for ids in &local {
            let touches = |c: &Vec<usize>| c.iter().any(|&i| ids.iter().any(|id| uses[i].contains(id)));
            let (hit, rest): (Vec<_>, Vec<_>) = comp.into_iter().partition(touches);
            comp = rest;
            comp.push(hit.concat());
        }
        comp.retain(|c| !c.is_empty());
        comp.into_iter()
            .map(|c| {
                let cgroups = local
                    .iter()
                    .filter(|ids| ids.iter().any(|id| c.iter().any(|&i| uses[i].contains(id))))
                    .map(|ids| (*ids).clone())
                    .collect();
                (self.parts(cgroups, c.iter().map(|&i| threads[i].clone()).collect(), depth), c)
            })
            .collect()
    }

    /// Absorbs copies of a replication's body: a copy is a set of sibling
    /// components matching the body's components one to one.
    fn absorb<'a>(&mut self, groups: &[Vec<String>], threads: Vec<(&'a G, Env)>, depth: usize) -> Vec<(&'a G, Env)> {
        let mut comps = self.components(groups, &threads, depth);
        let mut drop = vec![false; threads.len()];
        for (t, e) in &threads {
            let G::Repl(body) = t else { continue };
            let (mut bgroups, mut bthreads) = (Vec::new(), Vec::new());
            self.flatten(body, e, &mut bgroups, &mut bthreads);
            if bthreads.is_empty() || bthreads.iter().any(|(t, _)| matches!(t, G::Repl(_))) {
                continue;
            }
            let copy: Vec<String> = self.components(&bgroups, &bthreads, depth).into_iter().map(|(c, _)| c).collect();
            loop {
                let mut taken: Vec<usize> = Vec::new();
                for c in &copy {
                    match (0..comps.len()).find(|k| !taken.contains(k) && comps[*k].0 == *c) {
                        Some(k) => taken.push(k),
                        None => break,
                    }
                }
                if taken.len() < copy.len() {
                    break;
                }
                taken.sort_unstable();
                for k in taken.into_iter().rev() {
                    for i in comps.remove(k).1 {
                        drop[i] = true;
                    }
                }
            }
        }
        threads.into_iter().zip(drop).filter(|(_, d)| !d).map(|(t, _)| t).collect()
    }

    fn parts(&mut self, mut groups: Vec<Vec<String>>, threads: Vec<(&G, Env)>, depth: usize) -> String {
        let threads = if threads.iter().any(|(t, _)| matches!(t, G::Repl(_))) { self.absorb(&groups, threads, depth) } else { threads };
        let rendered: Vec<String> = threads.iter().map(|(t, e)| self.thread(t, e, depth)).collect();

        // Drop restrictions no thread mentions.
        let mut live = BTreeSet::new();
        for (t, e) in &threads {
            for n in free_raw(t) {
                live.insert(e.get(&n).cloned().unwrap_or(n));
            }
        }
        groups.retain(|g| g.iter().any(|id| live.contains(id)));

        let orders = self.orders(&groups, &threads, &rendered);
        let mut best: Option<String> = None;
        for order in orders {
            for (k, ids) in order.iter().enumerate() {
                for (j, id) in ids.iter().enumerate() {
                    let d = if ids.len() == 1 { format!("^{depth}_{k}") } else { format!("^{depth}_{k}.{j}") };
                    self.display.insert(id.clone(), d);
                }
            }
            let mut ts: Vec<String> = threads.iter().map(|(t, e)| self.thread(t, e, depth)).collect();
            ts.sort();
            let mut gs: Vec<String> = order
                .iter()
                .map(|ids| {
                    let mut ns: Vec<String> = ids.iter().map(|id| self.display[id].clone()).collect();
                    ns.sort();
                    format!("({})", ns.join(" "))
                })
                .collect();
            gs.sort();
            let body = if ts.is_empty() { "0".to_string() } else { ts.join(" | ") };
            let s = format!("ν{}[{body}]", gs.join(""));
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
        for ids in &groups {
            for id in ids {
                self.display.remove(id);
            }
        }
        best.unwrap_or_else(|| "ν[0]".to_string())
    }

    /// Candidate namings of the groups: each is an ordering of the groups, with
    /// each multi-name group in one of its orientations.
    fn orders(&mut self, groups: &[Vec<String>], threads: &[(&G, Env)], rendered: &[String]) -> Vec<Vec<Vec<String>>> {
        let n = groups.len();
        let mut count: usize = 1;
        for i in 1..=n {
            count = count.saturating_mul(i);
        }
        for g in groups {
            if g.len() == 2 {
                count = count.saturating_mul(2);
            }
        }
        if count <= BRUTE_FORCE_LIMIT {
            let mut out = Vec::new();
            permute(groups.to_vec(), 0, &mut out);
            return out.into_iter().flat_map(orientations).collect();
        }
        // First-use order over threads sorted by their shape.
        let blank: Vec<String> = {
            for ids in groups {
                for id in ids {
                    self.display.insert(id.clone(), "_".to_string());
                }
            }
            let b = threads.iter().map(|(t, e)| self.thread(t, e, 0)).collect();
            for ids in groups {
                for id in ids {
                    self.display.remove(id);
                }
            }
            b
        };
        let mut idx: Vec<usize> = (0..threads.len()).collect();
        idx.sort_by(|&a, &b| blank[a].cmp(&blank[b]));
        let text: String = idx.iter().map(|&i| rendered[i].as_str()).collect::<Vec<_>>().join("|");
        let pos = |id: &String| {
            let needle = id.to_string();
            text.match_indices(&needle)
                .find(|(p, _)| !text[p + needle.len()..].starts_with(|c: char| c.is_ascii_digit()))
                .map_or(usize::MAX, |(p, _)| p)
        };
        let mut order: Vec<Vec<String>> = groups
            .iter()
            .map(|ids| {
                let mut ids = ids.clone();
                ids.sort_by_key(|id| pos(id));
                ids
            })
            .collect();
        order.sort_by_key(|ids| ids.iter().map(pos).min());
        vec![order]
    }
}

fn permute(mut items: Vec<Vec<String>>, k: usize, out: &mut Vec<Vec<Vec<String>>>) {
    if k >= items.len() {
        out.push(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items.clone(), k + 1, out);
        items.swap(k, i);
    }
}

fn orientations(order: Vec<Vec<String>>) -> Vec<Vec<Vec<String>>> {
    let mut out = vec![Vec::new()];
    for ids in order {
        let mut next = Vec::new();
        for prefix in &out {
            let mut a = prefix.clone();
            a.push(ids.clone());
            next.push(a);
            if ids.len() == 2 {
                let mut b = prefix.clone();
                b.push(vec![ids[1].clone(), ids[0].clone()]);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

pub fn canonical_session(p: &SessionProcess) -> String {
    Canon::default().canon(&from_session(p), &Env::new(), 0)
}

pub fn canonical_pi(p: &PiProcess) -> String {
    Canon::default().canon(&from_pi(p), &Env::new(), 0)
}

pub fn struct_equiv_session(p: &SessionProcess, q: &SessionProcess) -> bool {
    canonical_session(p) == canonical_session(q)
}

pub fn struct_equiv_pi(p: &PiProcess, q: &PiProcess) -> bool {
    canonical_pi(p) == canonical_pi(q)
}

/// `q1 ↪ q2`: structurally congruent, possibly after one case reduction of `q1`.
pub fn hook_equiv(q1: &PiProcess, q2: &PiProcess) -> bool {
    let target = canonical_pi(q2);
    if canonical_pi(q1) == target {
        return true;
    }
    step_pi(q1).map(|steps| steps.iter().any(|s| s.rule == "R-Case" && canonical_pi(&s.result) == target)).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_pi_process, parse_session_process};

    fn sp(src: &str) -> SessionProcess {
        parse_session_process(src).unwrap()
    }

    fn pp(src: &str) -> PiProcess {
        parse_pi_process(src).unwrap()
    }

    #[test]
    fn laws() {
        let p = "(new x y: !unit.end) (x!().0 | y?(z:unit).0)";
        assert!(struct_equiv_session(&sp(&format!("{p} | 0")), &sp(p)));
        assert!(struct_equiv_pi(&pp("(new a: #[unit]) (a!(()).0 | b?(x).0)"), &pp("((new a: #[unit]) a!(()).0) | b?(x).0")));
        assert!(struct_equiv_pi(&pp("*(a!(()).0)"), &pp("a!(()).0 | *(a!(()).0)")));
        assert!(struct_equiv_pi(&pp("(new a: #[unit]) (new b: #[unit]) a!(b).0"), &pp("(new b: #[unit]) (new a: #[unit]) a!(b).0")));
        assert!(struct_equiv_session(&sp("(new x y: end) (x!().0 | y?(z:unit).0)"), &sp("(new y x: end) (y?(k:unit).0 | x!().0)")));
    }

    #[test]
    fn distinctions() {
        assert!(!struct_equiv_pi(&pp("(new a: #[unit]) (new b: #[unit]) a!(b).0"), &pp("(new a: #[unit]) a!(a).0")));
        assert!(!struct_equiv_pi(&pp("a!(()).0 | a!(()).0"), &pp("a!(()).0")));
        assert!(!struct_equiv_pi(
            &pp("(new a: #[unit]) (a!(()).0 | a?(x).0)"),
            &pp("(new a: #[unit]) a!(()).0 | (new a: #[unit]) a?(x).0")
        ));
        assert!(!hook_equiv(&pp("c!(()).0"), &PiProcess::Nil));
    }

    #[test]
    fn hook_pair() {
        let q1 = pp("(new b: #[unit]) (new c: #[unit]) case l(c) of {l(k) => b!(k).0}");
        let q2 = pp("(new b: #[unit]) (new c: #[unit]) b!(c).0");
        assert!(hook_equiv(&q1, &q2));
        assert!(!hook_equiv(&q2, &q1));
        assert!(hook_equiv(&q1, &q1));
    }
}
