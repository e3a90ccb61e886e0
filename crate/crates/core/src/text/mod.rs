//! Text primitives: cleaning, stemming, n-grams, collocations, POS tags and
//! dictionary-based entity recognition.

mod clean;
mod collocation;
mod dict;
mod entities;
mod ngrams;
pub mod porter;
mod pos;

pub use clean::{
    clean_tokens, fold, is_nonsensical, normalize, string_clean, tokenize, CleanToken, RawToken, Stopwords,
    TokenStream, DEFAULT_STOPWORDS,
};
pub use collocation::{bigram_scores, ranking_order, score_collocations, CollocationScore, Contingency};
pub use dict::{camel_case, AliasTable, DictError, Dictionaries};
pub use entities::{recognize_entities, CpeDictionary, EntityKind, EntityLabel, Gazetteer};
pub use ngrams::{extract_ngrams, most_common, Ngram, NgramSet};
pub use pos::{pos_tag, PosLexicon, PosTag, TaggedToken};
