//! Seeded random generators shared by the property and acceptance suites.

use chrono::{DateTime, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use ccdp_core::corpus::{Corpus, DuplicatePolicy, Interlocutor, Message, MessageKind};
use ccdp_core::semantic::TokenBag;

const PEOPLE: [&str; 8] = [
    "ada@unit.test",
    "ben@unit.test",
    "cleo@unit.test",
    "dan@unit.test",
    "elif@unit.test",
    "finn@unit.test",
    "gia@unit.test",
    "hugo@unit.test",
];

const WORDS: [&str; 12] = [
    "budget", "closure", "launch", "review", "deck", "minutes", "planning", "report", "draft",
    "invoice", "teleconference", "gamma",
];

pub fn random_timestamp(rng: &mut impl Rng) -> DateTime<Utc> {
    let base = Utc.with_ymd_and_hms(2018, 1, 1, 0, 0, 0).unwrap();
    base + chrono::Duration::seconds(rng.random_range(0..400 * 24 * 3600))
}

fn random_subject(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..4);
    let mut words: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    if rng.random_bool(0.3) {
        words.insert(0, "RE:");
    }
    words.join(" ")
}

/// One random message. `earlier_ids` seeds the reference headers so threads of
/// varying depth appear.
pub fn random_message(rng: &mut impl Rng, seq: usize, earlier_ids: &[String]) -> Message {
    let mut people: Vec<&str> = PEOPLE.to_vec();
    people.shuffle(rng);
    let from = people[0];
    let n_to = rng.random_range(1..4);
    let n_cc = rng.random_range(0..3);
    let to: Vec<Interlocutor> = people[1..1 + n_to]
        .iter()
        .map(|p| Interlocutor::parse(p).unwrap())
        .collect();
    let cc: Vec<Interlocutor> = people[1 + n_to..1 + n_to + n_cc]
        .iter()
        .map(|p| Interlocutor::parse(p).unwrap())
        .collect();

    let mut references = Vec::new();
    let mut in_reply_to = None;
    if !earlier_ids.is_empty() && rng.random_bool(0.5) {
        let parent = earlier_ids.choose(rng).unwrap().clone();
        references.push(parent.clone());
        in_reply_to = Some(parent);
    }

    let (kind, ical_uid) = if rng.random_bool(0.15) {
        (
            MessageKind::MeetingNotification,
            Some(format!("uid-{}@unit.test", rng.random_range(0..4))),
        )
    } else {
        (MessageKind::Email, None)
    };

    let attachments = if rng.random_bool(0.4) {
        vec![format!("{}_v{}.docx", WORDS.choose(rng).unwrap(), rng.random_range(1..9))]
    } else {
        Vec::new()
    };

    Message {
        id: format!("m{seq}@unit.test"),
        kind,
        from: Interlocutor::parse(from).unwrap(),
        to,
        cc,
        sent_at: random_timestamp(rng),
        subject: random_subject(rng),
        attachments,
        references,
        in_reply_to,
        ical_uid,
        body: String::new(),
    }
}

pub fn random_corpus(rng: &mut impl Rng, size: usize) -> Corpus {
    let mut ids: Vec<String> = Vec::new();
    let mut messages = Vec::with_capacity(size);
    for seq in 0..size {
        let msg = random_message(rng, seq, &ids);
        ids.push(msg.id.clone());
        messages.push(msg);
    }
    let (corpus, _) = Corpus::build(messages, DuplicatePolicy::Reject).unwrap();
    corpus
}

pub fn random_bag(rng: &mut impl Rng, max_tokens: usize) -> TokenBag {
    let n = rng.random_range(0..=max_tokens);
    (0..n)
        .map(|_| {
            (
                (*WORDS.choose(rng).unwrap()).to_string(),
                rng.random_range(0.1..3.0),
            )
        })
        .collect()
}
