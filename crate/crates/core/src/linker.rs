//! Cross-thread linking: score every cross-ECT message pair, keep the links
//! above threshold, and merge the ECT graph into CCDPs.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::ect::{ect_index, Ect};
use crate::proximity::{global_proximity, ProximityBreakdown, ProximityConfig, SemanticContext};

/// An above-threshold weighted link between two messages of distinct ECTs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollaborativeLink {
    pub msg_a: String,
    pub msg_b: String,
    #[serde(flatten)]
    pub breakdown: ProximityBreakdown,
}

/// A connected set of ECTs joined by collaborative links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ccdp {
    pub ccdp_id: String,
    pub ect_ids: Vec<String>,
    pub links: Vec<CollaborativeLink>,
}

/// Score every unordered cross-ECT pair (within the optional time horizon)
/// and return links with gp >= threshold, sorted by descending gp then ids.
/// Pair scoring is pure, so the rayon schedule cannot change the result.
pub fn find_links(
    corpus: &Corpus,
    ects: &[Ect],
    cfg: &ProximityConfig,
    ctx: &SemanticContext,
) -> Vec<CollaborativeLink> {
    let by_ect = ect_index(ects);
    let messages = corpus.messages();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..messages.len() {
        for j in i + 1..messages.len() {
            if by_ect.get(messages[i].id.as_str()) == by_ect.get(messages[j].id.as_str()) {
                continue;
            }
            if let Some(h) = cfg.horizon_hours {
                let dt = (messages[j].sent_at - messages[i].sent_at)
                    .num_seconds()
                    .unsigned_abs() as f64
                    / 3600.0;
                if dt > h {
                    continue;
                }
            }
            pairs.push((i, j));
        }
    }

    let mut links: Vec<CollaborativeLink> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let breakdown = global_proximity(&messages[i], &messages[j], cfg, ctx);
            (breakdown.gp >= cfg.threshold).then(|| CollaborativeLink {
                msg_a: messages[i].id.clone(),
                msg_b: messages[j].id.clone(),
                breakdown,
            })
        })
        .collect();

    links.sort_by(|x, y| {
        y.breakdown
            .gp
            .total_cmp(&x.breakdown.gp)
            .then_with(|| x.msg_a.cmp(&y.msg_a))
            .then_with(|| x.msg_b.cmp(&y.msg_b))
    });
    links
}

/// Connected components over the ECT graph induced by the links. CCDPs are
/// numbered by their earliest member message; each link is attached to the
/// CCDP containing its endpoints.
pub fn build_ccdps(ects: &[Ect], links: &[CollaborativeLink]) -> Vec<Ccdp> {
    let by_ect = ect_index(ects);
    let mut parent: Vec<usize> = (0..ects.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for link in links {
        let (Some(&a), Some(&b)) = (
            by_ect.get(link.msg_a.as_str()),
            by_ect.get(link.msg_b.as_str()),
        ) else {
            continue;
        };
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }

    // ects are already ordered by earliest member, so grouping in ect order
    // yields ccdp ids ordered by earliest member message
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    for i in 0..ects.len() {
        let root = find(&mut parent, i);
        let entry = groups.entry(root).or_default();
        if entry.is_empty() {
            order.push(root);
        }
        entry.push(i);
    }

    let root_of: HashMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(k, &root)| (root, k))
        .collect();

    let mut ccdps: Vec<Ccdp> = order
        .iter()
        .enumerate()
        .map(|(k, &root)| Ccdp {
            ccdp_id: format!("ccdp-{k:03}"),
            ect_ids: groups[&root]
                .iter()
                .map(|&i| ects[i].ect_id.clone())
                .collect(),
            links: Vec::new(),
        })
        .collect();
    let mut parent_for_lookup = parent;
    for link in links {
        if let Some(&a) = by_ect.get(link.msg_a.as_str()) {
            let root = find(&mut parent_for_lookup, a);
            ccdps[root_of[&root]].links.push(link.clone());
        }
    }
    ccdps
}

/// Graphviz rendering: ECT nodes, links as edges labeled with gp.
pub fn to_dot(ects: &[Ect], links: &[CollaborativeLink]) -> String {
    let by_ect = ect_index(ects);
    let mut out = String::from("graph ccdp {\n");
    for ect in ects {
        out.push_str(&format!(
            "  \"{}\" [label=\"{} ({} msgs)\"];\n",
            ect.ect_id,
            ect.ect_id,
            ect.message_ids.len()
        ));
    }
    for link in links {
        let (Some(&a), Some(&b)) = (
            by_ect.get(link.msg_a.as_str()),
            by_ect.get(link.msg_b.as_str()),
        ) else {
            continue;
        };
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{:.3}\", weight={}];\n",
            ects[a].ect_id,
            ects[b].ect_id,
            link.breakdown.gp,
            (link.breakdown.gp * 100.0).round() as i64
        ));
    }
    out.push_str("}\n");
    out
}
