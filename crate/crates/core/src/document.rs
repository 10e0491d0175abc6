use serde::{Deserialize, Serialize};

/// The unit that flows through curation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub dump: String,
    #[serde(default)]
    pub date: String,
    #[serde(default)]
    pub file_path: String,
    #[serde(default)]
    pub language: String,
    #[serde(default)]
    pub language_score: f64,
    #[serde(default)]
    pub token_count: Option<u64>,
}

/// One output row. Field order is the serialized key order and must not change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub text: String,
    pub id: String,
    pub dump: String,
    pub url: String,
    pub date: String,
    pub file_path: String,
    pub language: String,
    pub language_score: f64,
    pub token_count: u64,
}

impl OutputRecord {
    pub fn from_document(doc: &Document, token_count: u64) -> Self {
        OutputRecord {
            text: doc.text.clone(),
            id: doc.id.clone(),
            dump: doc.dump.clone(),
            url: doc.url.clone(),
            date: doc.date.clone(),
            file_path: doc.file_path.clone(),
            language: doc.language.clone(),
            language_score: doc.language_score,
            token_count,
        }
    }

    /// Single JSON line without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("output record serializes")
    }
}

impl From<OutputRecord> for Document {
    fn from(r: OutputRecord) -> Self {
        Document {
            id: r.id,
            text: r.text,
            url: r.url,
            dump: r.dump,
            date: r.date,
            file_path: r.file_path,
            language: r.language,
            language_score: r.language_score,
            token_count: Some(r.token_count),
        }
    }
}
