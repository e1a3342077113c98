//! Existing Conversation Threads: the grouping the messaging service itself
//! would show, built purely from header reference chains and iCalendar UIDs.
//! Subject text never influences ECT membership; linking threads that share
//! a topic is the linker's job.

use std::collections::HashMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, MessageKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ect {
    pub ect_id: String,
    /// Member message ids ordered by (sent_at, id).
    pub message_ids: Vec<String>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(len: usize) -> UnionFind {
        UnionFind {
            parent: (0..len).collect(),
            rank: vec![0; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return;
        }
        match self.rank[rx].cmp(&self.rank[ry]) {
            std::cmp::Ordering::Less => self.parent[rx] = ry,
            std::cmp::Ordering::Greater => self.parent[ry] = rx,
            std::cmp::Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
            }
        }
    }
}

/// Partition the corpus into ECTs.
///
/// Messages are joined when one references another via `References:` or
/// `In-Reply-To`, or when two calendar messages share an iCalendar UID.
/// References to ids missing from the corpus still act as join points
/// (phantom nodes), so two replies to a lost message end up together.
pub fn build_ects(corpus: &Corpus) -> Vec<Ect> {
    let n = corpus.len();
    // indices [0, n) are corpus messages; phantom reference ids and iCal UIDs
    // get indices appended after them
    let mut extra: HashMap<String, usize> = HashMap::new();
    let mut next = n;
    let mut edges: Vec<(usize, usize)> = Vec::new();

    let msg_index: HashMap<&str, usize> = corpus
        .messages()
        .iter()
        .enumerate()
        .map(|(i, m)| (m.id.as_str(), i))
        .collect();

    for (i, msg) in corpus.messages().iter().enumerate() {
        for r in msg.thread_references() {
            let j = match msg_index.get(r) {
                Some(&j) => j,
                None => *extra.entry(format!("ref:{r}")).or_insert_with(|| {
                    next += 1;
                    next - 1
                }),
            };
            edges.push((i, j));
        }
        if matches!(
            msg.kind,
            MessageKind::Meeting | MessageKind::MeetingNotification
        ) {
            if let Some(uid) = &msg.ical_uid {
                let j = *extra.entry(format!("uid:{uid}")).or_insert_with(|| {
                    next += 1;
                    next - 1
                });
                edges.push((i, j));
            }
        }
    }

    let mut uf = UnionFind::new(next);
    for (a, b) in edges {
        uf.union(a, b);
    }

    // group corpus messages by root; corpus iteration order is (sent_at, id),
    // so members and thread ordering come out deterministic
    let mut groups: HashMap<usize, Vec<&str>> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    for (i, msg) in corpus.messages().iter().enumerate() {
        let root = uf.find(i);
        let entry = groups.entry(root).or_default();
        if entry.is_empty() {
            order.push(root);
        }
        entry.push(&msg.id);
    }

    order
        .into_iter()
        .enumerate()
        .map(|(k, root)| Ect {
            ect_id: format!("ect-{k:03}"),
            message_ids: groups[&root].iter().map(|s| s.to_string()).collect(),
        })
        .collect()
}

/// Map from message id to the index of its ECT in `ects`.
pub fn ect_index(ects: &[Ect]) -> HashMap<&str, usize> {
    let mut map = HashMap::new();
    for (i, ect) in ects.iter().enumerate() {
        for id in &ect.message_ids {
            map.insert(id.as_str(), i);
        }
    }
    map
}

/// Strip leading reply/forward prefixes (RE:, FW:, FWD:, TR:, with optional
/// bracketed counts like "RE[2]:"), then collapse runs of whitespace. Used
/// only for semantic proximity, never for thread grouping.
pub fn normalize_subject(text: &str) -> String {
    static PREFIX: OnceLock<Regex> = OnceLock::new();
    let prefix = PREFIX
        .get_or_init(|| Regex::new(r"(?i)^\s*(re|fw|fwd|tr)(\[\d+\])?\s*:\s*").unwrap());
    let mut s = text.trim();
    loop {
        match prefix.find(s) {
            Some(m) if m.start() == 0 => s = &s[m.end()..],
            _ => break,
        }
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
