//! The three sub-proximities and their weighted combination into Global
//! Proximity, with the full per-pair breakdown retained for reporting.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{Interlocutor, Message, Role};
use crate::ect::normalize_subject;
use crate::error::{CcdpError, Result};
use crate::semantic::{IdfWeights, SimilarityProvider, TokenBag, Tokenizer};

/// Role-pair coefficient table W. Symmetric, entries in [0,1]; the
/// Absent/Absent cell is never consulted because an interlocutor absent from
/// both messages never enters the pair's interlocutor union.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleWeightMatrix {
    w: [[f64; 4]; 4],
}

impl Default for RoleWeightMatrix {
    /// The reference default coefficients:
    /// From/From=1, From/To=1, From/Cc=0.25, To/To=1, To/Cc=0.5, Cc/Cc=1,
    /// every pairing with Absent = 0.
    fn default() -> Self {
        RoleWeightMatrix::from_upper_triangle(1.0, 1.0, 0.25, 1.0, 0.5, 1.0)
            .expect("default matrix is valid")
    }
}

impl RoleWeightMatrix {
    /// Build from the six independent entries (ff, ft, fc, tt, tc, cc);
    /// symmetry is structural and Absent pairings are zero.
    pub fn from_upper_triangle(
        ff: f64,
        ft: f64,
        fc: f64,
        tt: f64,
        tc: f64,
        cc: f64,
    ) -> Result<RoleWeightMatrix> {
        for (name, v) in [("ff", ff), ("ft", ft), ("fc", fc), ("tt", tt), ("tc", tc), ("cc", cc)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(CcdpError::InvalidConfig(format!(
                    "role weight w_{name} = {v} outside [0,1]"
                )));
            }
        }
        let mut w = [[0.0; 4]; 4];
        let (f, t, c) = (Role::From.index(), Role::To.index(), Role::Cc.index());
        w[f][f] = ff;
        w[f][t] = ft;
        w[t][f] = ft;
        w[f][c] = fc;
        w[c][f] = fc;
        w[t][t] = tt;
        w[t][c] = tc;
        w[c][t] = tc;
        w[c][c] = cc;
        Ok(RoleWeightMatrix { w })
    }

    pub fn get(&self, a: Role, b: Role) -> f64 {
        self.w[a.index()][b.index()]
    }
}

/// All knobs of the proximity computation.
#[derive(Debug, Clone)]
pub struct ProximityConfig {
    /// GP weights for IP, TP and SP respectively.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Time constant of the exponential decay, in hours.
    pub k_hours: f64,
    pub weights: RoleWeightMatrix,
    /// Links require gp >= threshold.
    pub threshold: f64,
    /// Optional |Δt| cap (hours) on pair enumeration during linking.
    pub horizon_hours: Option<f64>,
    /// Re-weight token bags by corpus IDF before similarity.
    pub use_idf: bool,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        ProximityConfig {
            a: 1.0 / 3.0,
            b: 1.0 / 3.0,
            c: 1.0 / 3.0,
            k_hours: 360.0,
            weights: RoleWeightMatrix::default(),
            threshold: 0.5,
            horizon_hours: None,
            use_idf: false,
        }
    }
}

impl ProximityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.b >= 0.0 && self.c >= 0.0) {
            return Err(CcdpError::InvalidConfig(
                "GP weights a, b, c must be non-negative".into(),
            ));
        }
        if self.a + self.b + self.c <= 0.0 {
            return Err(CcdpError::InvalidConfig("a + b + c must be positive".into()));
        }
        if !(self.k_hours > 0.0) {
            return Err(CcdpError::InvalidConfig("k must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(CcdpError::InvalidConfig("threshold must be in [0,1]".into()));
        }
        if let Some(h) = self.horizon_hours {
            if !(h > 0.0) {
                return Err(CcdpError::InvalidConfig("horizon must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Per-pair result: the three sub-proximities, the semantic legs, and GP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityBreakdown {
    pub ip: f64,
    pub tp: f64,
    pub ssp: f64,
    pub asp: f64,
    pub csp: f64,
    pub sp: f64,
    pub gp: f64,
}

/// Text preparation shared by the semantic sub-proximities: subject
/// normalization, tokenization and optional IDF weighting, plus the
/// pluggable similarity provider.
pub struct SemanticContext<'a> {
    pub tokenizer: &'a Tokenizer,
    pub idf: Option<&'a IdfWeights>,
    pub provider: &'a dyn SimilarityProvider,
}

impl<'a> SemanticContext<'a> {
    pub fn new(tokenizer: &'a Tokenizer, provider: &'a dyn SimilarityProvider) -> Self {
        SemanticContext {
            tokenizer,
            idf: None,
            provider,
        }
    }

    fn bag(&self, text: &str) -> TokenBag {
        let bag = self.tokenizer.tokenize(text);
        match self.idf {
            Some(idf) => idf.apply(&bag),
            None => bag,
        }
    }

    pub fn subject_bag(&self, msg: &Message) -> TokenBag {
        self.bag(&normalize_subject(&msg.subject))
    }

    pub fn attachment_bag(&self, msg: &Message) -> TokenBag {
        if msg.attachments.is_empty() {
            return TokenBag::default();
        }
        self.bag(&msg.attachments.join(" "))
    }
}

/// IP: sum of role-pair coefficients over the union of interlocutors
/// appearing in either message, divided by the union size.
pub fn interlocutors_proximity(m_i: &Message, m_j: &Message, w: &RoleWeightMatrix) -> f64 {
    let mut union: Vec<&Interlocutor> = m_i.interlocutors();
    for p in m_j.interlocutors() {
        if !union.contains(&p) {
            union.push(p);
        }
    }
    if union.is_empty() {
        return 0.0;
    }
    let sum: f64 = union
        .iter()
        .map(|p| w.get(m_i.role_of(p), m_j.role_of(p)))
        .sum();
    sum / union.len() as f64
}

/// TP: e^(-|t2-t1|/k), Δt in hours at second resolution.
pub fn time_proximity(t1: DateTime<Utc>, t2: DateTime<Utc>, k_hours: f64) -> f64 {
    let delta_hours = (t2 - t1).num_seconds().unsigned_abs() as f64 / 3600.0;
    (-delta_hours / k_hours).exp()
}

/// SSP: similarity of normalized subjects; 0 when either side is empty.
pub fn subject_semantic_proximity(m_i: &Message, m_j: &Message, ctx: &SemanticContext) -> f64 {
    let a = ctx.subject_bag(m_i);
    let b = ctx.subject_bag(m_j);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    ctx.provider.similarity(&a, &b)
}

/// ASP: similarity of concatenated attachment names; 0 when either message
/// has no attachments.
pub fn attachment_semantic_proximity(m_i: &Message, m_j: &Message, ctx: &SemanticContext) -> f64 {
    let a = ctx.attachment_bag(m_i);
    let b = ctx.attachment_bag(m_j);
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    ctx.provider.similarity(&a, &b)
}

/// CSP: max of (subject of one vs attachments of the other) in both
/// directions; each leg is 0 when its text side is empty.
pub fn cross_semantic_proximity(m_i: &Message, m_j: &Message, ctx: &SemanticContext) -> f64 {
    let leg = |subj_of: &Message, att_of: &Message| -> f64 {
        let s = ctx.subject_bag(subj_of);
        let a = ctx.attachment_bag(att_of);
        if s.is_empty() || a.is_empty() {
            return 0.0;
        }
        ctx.provider.similarity(&s, &a)
    };
    leg(m_i, m_j).max(leg(m_j, m_i))
}

/// SP is the maximum of the three semantic sub-proximities.
pub fn semantic_proximity(
    m_i: &Message,
    m_j: &Message,
    ctx: &SemanticContext,
) -> (f64, f64, f64, f64) {
    let ssp = subject_semantic_proximity(m_i, m_j, ctx);
    let asp = attachment_semantic_proximity(m_i, m_j, ctx);
    let csp = cross_semantic_proximity(m_i, m_j, ctx);
    (ssp, asp, csp, ssp.max(asp).max(csp))
}

/// GP = (a*IP + b*TP + c*SP) / (a + b + c), full breakdown retained.
pub fn global_proximity(
    m_i: &Message,
    m_j: &Message,
    cfg: &ProximityConfig,
    ctx: &SemanticContext,
) -> ProximityBreakdown {
    let ip = interlocutors_proximity(m_i, m_j, &cfg.weights);
    let tp = time_proximity(m_i.sent_at, m_j.sent_at, cfg.k_hours);
    let (ssp, asp, csp, sp) = semantic_proximity(m_i, m_j, ctx);
    let gp = combine(ip, tp, sp, cfg);
    ProximityBreakdown {
        ip,
        tp,
        ssp,
        asp,
        csp,
        sp,
        gp,
    }
}

/// The bare weighted-mean combination, exposed for regression checks against the
/// pinned per-pair figures.
pub fn combine(ip: f64, tp: f64, sp: f64, cfg: &ProximityConfig) -> f64 {
    (cfg.a * ip + cfg.b * tp + cfg.c * sp) / (cfg.a + cfg.b + cfg.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::MessageKind;
    use crate::semantic::ExactCosine;
    use chrono::TimeZone;

    pub(crate) fn msg(from: &str, to: &[&str], cc: &[&str]) -> Message {
        Message {
            id: format!("{from}-msg"),
            kind: MessageKind::Email,
            from: Interlocutor::parse(from).unwrap(),
            to: to.iter().map(|a| Interlocutor::parse(a).unwrap()).collect(),
            cc: cc.iter().map(|a| Interlocutor::parse(a).unwrap()).collect(),
            sent_at: Utc.with_ymd_and_hms(2018, 3, 1, 9, 0, 0).unwrap(),
            subject: String::new(),
            attachments: vec![],
            references: vec![],
            in_reply_to: None,
            ical_uid: None,
            body: String::new(),
        }
    }

    #[test]
    fn default_matrix_is_table_two() {
        let w = RoleWeightMatrix::default();
        assert_eq!(w.get(Role::From, Role::From), 1.0);
        assert_eq!(w.get(Role::From, Role::To), 1.0);
        assert_eq!(w.get(Role::From, Role::Cc), 0.25);
        assert_eq!(w.get(Role::To, Role::To), 1.0);
        assert_eq!(w.get(Role::To, Role::Cc), 0.5);
        assert_eq!(w.get(Role::Cc, Role::Cc), 1.0);
        for r in Role::ALL {
            assert_eq!(w.get(r, Role::Absent), 0.0);
            assert_eq!(w.get(Role::Absent, r), 0.0);
        }
        for a in Role::ALL {
            for b in Role::ALL {
                assert_eq!(w.get(a, b), w.get(b, a));
            }
        }
    }

    #[test]
    fn ip_hand_worked_examples() {
        let w = RoleWeightMatrix::default();
        // Alice->Bob vs Bob->Alice: (W[From][To] + W[To][From]) / 2 = 1
        let m_i = msg("alice@x.fr", &["bob@x.fr"], &[]);
        let m_j = msg("bob@x.fr", &["alice@x.fr"], &[]);
        assert!((interlocutors_proximity(&m_i, &m_j, &w) - 1.0).abs() < 1e-9);
        // Alice->Bob cc Carol vs Alice->Bob: (1 + 1 + 0) / 3
        let m_i = msg("alice@x.fr", &["bob@x.fr"], &["carol@x.fr"]);
        let m_j = msg("alice@x.fr", &["bob@x.fr"], &[]);
        let got = interlocutors_proximity(&m_i, &m_j, &w);
        assert!((got - 2.0 / 3.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn ip_identical_messages_is_one() {
        let w = RoleWeightMatrix::default();
        let m = msg("alice@x.fr", &["bob@x.fr", "carol@x.fr"], &["dave@x.fr"]);
        assert!((interlocutors_proximity(&m, &m, &w) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tp_constants() {
        let t0 = Utc.with_ymd_and_hms(2018, 3, 1, 0, 0, 0).unwrap();
        assert_eq!(time_proximity(t0, t0, 360.0), 1.0);
        let t1 = t0 + chrono::Duration::hours(360);
        assert!((time_proximity(t0, t1, 360.0) - (-1.0f64).exp()).abs() < 1e-9);
        // symmetric in its arguments
        assert_eq!(time_proximity(t0, t1, 360.0), time_proximity(t1, t0, 360.0));
    }

    #[test]
    fn tp_reference_value_back_solved() {
        // e^(-Δt/360) = 0.977 at Δt ≈ 8.3768 hours
        let t0 = Utc.with_ymd_and_hms(2018, 3, 25, 11, 37, 24).unwrap();
        let t1 = Utc.with_ymd_and_hms(2018, 3, 25, 20, 0, 0).unwrap();
        assert!((time_proximity(t0, t1, 360.0) - 0.977).abs() < 0.0005);
    }

    fn ctx<'a>(tok: &'a Tokenizer, provider: &'a ExactCosine) -> SemanticContext<'a> {
        SemanticContext::new(tok, provider)
    }

    #[test]
    fn ssp_rules() {
        let tok = Tokenizer::default();
        let exact = ExactCosine;
        let c = ctx(&tok, &exact);
        let mut m_i = msg("a@x.fr", &["b@x.fr"], &[]);
        let mut m_j = msg("b@x.fr", &["a@x.fr"], &[]);
        m_i.subject = "Project closure".into();
        m_j.subject = "Project closure".into();
        assert_eq!(subject_semantic_proximity(&m_i, &m_j, &c), 1.0);
        m_j.subject = "RE: Project closure".into();
        assert_eq!(subject_semantic_proximity(&m_i, &m_j, &c), 1.0);
        m_j.subject = String::new();
        assert_eq!(subject_semantic_proximity(&m_i, &m_j, &c), 0.0);
    }

    #[test]
    fn asp_rules() {
        let tok = Tokenizer::default();
        let exact = ExactCosine;
        let c = ctx(&tok, &exact);
        let mut m_i = msg("a@x.fr", &["b@x.fr"], &[]);
        let mut m_j = msg("b@x.fr", &["a@x.fr"], &[]);
        assert_eq!(attachment_semantic_proximity(&m_i, &m_j, &c), 0.0);
        m_i.attachments = vec!["closure_v1.pptx".into()];
        m_j.attachments = vec!["closure_v1.pptx".into()];
        assert_eq!(attachment_semantic_proximity(&m_i, &m_j, &c), 1.0);
        // multi-attachment concatenation equals a direct similarity call
        m_i.attachments = vec!["budget.xlsx".into(), "report.docx".into()];
        m_j.attachments = vec!["report.docx".into()];
        let direct = ExactCosine.similarity(
            &tok.tokenize("budget.xlsx report.docx"),
            &tok.tokenize("report.docx"),
        );
        assert_eq!(attachment_semantic_proximity(&m_i, &m_j, &c), direct);
    }

    #[test]
    fn csp_pinned_tokenizer_oracle() {
        let tok = Tokenizer::default();
        let exact = ExactCosine;
        let c = ctx(&tok, &exact);
        let mut m_i = msg("a@x.fr", &["b@x.fr"], &[]);
        let mut m_j = msg("b@x.fr", &["a@x.fr"], &[]);
        m_i.subject = "project closure".into();
        m_j.attachments = vec!["project closure.pptx".into()];
        // {project, closure} vs {project, closure, pptx}: 2/sqrt(6)
        let got = cross_semantic_proximity(&m_i, &m_j, &c);
        assert!((got - 2.0 / 6.0f64.sqrt()).abs() < 1e-12, "got {got}");
        assert_eq!(
            cross_semantic_proximity(&m_j, &m_i, &c),
            got,
            "CSP must be symmetric"
        );
        // both legs empty
        let plain_i = msg("a@x.fr", &["b@x.fr"], &[]);
        let plain_j = msg("b@x.fr", &["a@x.fr"], &[]);
        assert_eq!(cross_semantic_proximity(&plain_i, &plain_j, &c), 0.0);
    }

    #[test]
    fn sp_is_max_of_legs() {
        let cfg = ProximityConfig::default();
        assert!((combine(1.0, 1.0, 1.0, &cfg) - 1.0).abs() < 1e-12);
        let tok = Tokenizer::default();
        let exact = ExactCosine;
        let c = ctx(&tok, &exact);
        let mut m_i = msg("a@x.fr", &["b@x.fr"], &[]);
        let mut m_j = msg("b@x.fr", &["a@x.fr"], &[]);
        m_i.subject = "quarterly budget".into();
        m_j.subject = "quarterly budget".into();
        let (ssp, asp, csp, sp) = semantic_proximity(&m_i, &m_j, &c);
        assert_eq!((ssp, asp, csp), (1.0, 0.0, 0.0));
        assert_eq!(sp, 1.0);
    }

    #[test]
    fn pinned_gp_regressions() {
        let cfg = ProximityConfig::default();
        assert!((combine(0.179, 0.977, 1.000, &cfg) - 0.719).abs() < 0.0005);
        assert!((combine(0.250, 0.040, 0.000, &cfg) - 0.097).abs() < 0.0005);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = ProximityConfig::default();
        cfg.k_hours = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ProximityConfig::default();
        cfg.a = 0.0;
        cfg.b = 0.0;
        cfg.c = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ProximityConfig::default();
        cfg.threshold = 1.5;
        assert!(cfg.validate().is_err());
        assert!(RoleWeightMatrix::from_upper_triangle(1.0, 1.0, 1.2, 1.0, 0.5, 1.0).is_err());
    }
}
