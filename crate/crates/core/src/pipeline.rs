//! End-to-end composition: threading, linking, CCDP construction and the
//! optional gold-standard evaluation, with manifest-carrying JSON reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::ect::{build_ects, Ect};
use crate::error::{CcdpError, Result};
use crate::eval::{evaluate, EvalReport, GoldStandard, PairKey};
use crate::linker::{build_ccdps, find_links, Ccdp, CollaborativeLink};
use crate::manifest::RunManifest;
use crate::proximity::{
    global_proximity, ProximityBreakdown, ProximityConfig, SemanticContext,
};
use crate::semantic::{
    ExactCosine, IdfWeights, SimilarityProvider, SoftCosine, TokenBag, Tokenizer,
    WordRelationModel,
};

/// Owns the tokenizer, optional IDF table and the similarity provider, and
/// hands out borrowed [`SemanticContext`]s for proximity calls.
pub struct SemanticEngine {
    tokenizer: Tokenizer,
    idf: Option<IdfWeights>,
    provider: Box<dyn SimilarityProvider>,
    provider_name: &'static str,
}

impl SemanticEngine {
    pub fn exact_cosine() -> SemanticEngine {
        SemanticEngine {
            tokenizer: Tokenizer::default(),
            idf: None,
            provider: Box::new(ExactCosine),
            provider_name: "exact_cosine",
        }
    }

    pub fn soft_cosine(model: WordRelationModel) -> SemanticEngine {
        SemanticEngine {
            tokenizer: Tokenizer::default(),
            idf: None,
            provider: Box::new(SoftCosine::new(model)),
            provider_name: "soft_cosine",
        }
    }

    pub fn provider_name(&self) -> &'static str {
        self.provider_name
    }

    /// Build per-corpus IDF weights from each message's normalized subject
    /// plus attachment names, treated as one document per message.
    pub fn fit_idf(&mut self, corpus: &Corpus) {
        let docs: Vec<TokenBag> = corpus
            .messages()
            .iter()
            .map(|m| {
                let text = format!(
                    "{} {}",
                    crate::ect::normalize_subject(&m.subject),
                    m.attachments.join(" ")
                );
                self.tokenizer.tokenize(&text)
            })
            .collect();
        self.idf = Some(IdfWeights::from_documents(docs.iter()));
    }

    pub fn context(&self) -> SemanticContext<'_> {
        SemanticContext {
            tokenizer: &self.tokenizer,
            idf: self.idf.as_ref(),
            provider: self.provider.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreadsReport {
    pub manifest: RunManifest,
    pub ects: Vec<Ect>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CcdpsReport {
    pub manifest: RunManifest,
    pub ccdps: Vec<Ccdp>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReportFile {
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub report: EvalReport,
}

pub struct PipelineOutput {
    pub ects: Vec<Ect>,
    pub links: Vec<CollaborativeLink>,
    pub ccdps: Vec<Ccdp>,
    pub eval: Option<EvalReport>,
}

/// Run threading, linking and CCDP construction; when a gold standard is
/// supplied, also score its pairs and compare.
pub fn run_pipeline(
    corpus: &Corpus,
    cfg: &ProximityConfig,
    engine: &mut SemanticEngine,
    gold: Option<&GoldStandard>,
) -> Result<PipelineOutput> {
    cfg.validate()?;
    if cfg.use_idf {
        engine.fit_idf(corpus);
    }
    let ects = build_ects(corpus);
    let ctx = engine.context();
    let links = find_links(corpus, &ects, cfg, &ctx);
    let ccdps = build_ccdps(&ects, &links);
    let eval = match gold {
        Some(gold) => {
            let cp = score_pairs(corpus, gold.ratings.keys(), cfg, &ctx)?;
            Some(evaluate(gold, &cp, &ects)?)
        }
        None => None,
    };
    Ok(PipelineOutput {
        ects,
        links,
        ccdps,
        eval,
    })
}

/// Compute GP for an explicit set of pairs (same- or cross-ECT).
pub fn score_pairs<'a, I: IntoIterator<Item = &'a PairKey>>(
    corpus: &Corpus,
    pairs: I,
    cfg: &ProximityConfig,
    ctx: &SemanticContext,
) -> Result<BTreeMap<PairKey, f64>> {
    let mut out = BTreeMap::new();
    for pair in pairs {
        out.insert(pair.clone(), explain_pair(corpus, &pair.0, &pair.1, cfg, ctx)?.gp);
    }
    Ok(out)
}

/// Full breakdown for one pair, by message id.
pub fn explain_pair(
    corpus: &Corpus,
    id_a: &str,
    id_b: &str,
    cfg: &ProximityConfig,
    ctx: &SemanticContext,
) -> Result<ProximityBreakdown> {
    let a = corpus
        .get(id_a)
        .ok_or_else(|| CcdpError::UnknownMessage(id_a.to_string()))?;
    let b = corpus
        .get(id_b)
        .ok_or_else(|| CcdpError::UnknownMessage(id_b.to_string()))?;
    Ok(global_proximity(a, b, cfg, ctx))
}
