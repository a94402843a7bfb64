use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An information need. The title doubles as the query; `levels` maps each
/// grade (0, 1, 2) to its topic-specific description. Noise topics carry no
/// descriptions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topic {
    pub id: String,
    pub title: String,
    pub levels: BTreeMap<u8, String>,
    pub is_noise: bool,
}

impl Topic {
    pub fn noise(id: impl Into<String>, title: impl Into<String>) -> Self {
        Topic {
            id: id.into(),
            title: title.into(),
            levels: BTreeMap::new(),
            is_noise: true,
        }
    }
}

/// Checks the `YYYY-NNN` id shape. Ids are otherwise opaque.
pub fn is_valid_topic_id(id: &str) -> bool {
    let b = id.as_bytes();
    b.len() == 8
        && b[..4].iter().all(u8::is_ascii_digit)
        && b[4] == b'-'
        && b[5..].iter().all(u8::is_ascii_digit)
}

/// Parses a topics document. The root may be a single `<topic>` or any
/// element wrapping several of them.
pub fn parse_topics(xml: &str) -> Result<Vec<Topic>> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| Error::parse(e.pos().row as usize, e.to_string()))?;
    let line_of = |node: roxmltree::Node| doc.text_pos_at(node.range().start).row as usize;

    let mut topics = Vec::new();
    let mut seen = HashSet::new();
    for node in doc.descendants().filter(|n| n.has_tag_name("topic")) {
        let line = line_of(node);
        let id = node
            .attribute("id")
            .ok_or_else(|| Error::parse(line, "<topic> without id attribute"))?
            .trim()
            .to_string();
        if !is_valid_topic_id(&id) {
            return Err(Error::validation(format!("line {line}: topic id `{id}` does not match YYYY-NNN")));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::validation(format!("line {line}: duplicate topic id {id}")));
        }
        let title = node
            .children()
            .find(|c| c.has_tag_name("title"))
            .map(|t| t.text().unwrap_or("").trim().to_string())
            .unwrap_or_default();
        if title.is_empty() {
            return Err(Error::validation(format!("line {line}: topic {id} has an empty title")));
        }

        let Some(relevance) = node.children().find(|c| c.has_tag_name("relevance")) else {
            topics.push(Topic::noise(id, title));
            continue;
        };
        let mut levels = BTreeMap::new();
        for level in relevance.children().filter(|c| c.has_tag_name("level")) {
            let lline = line_of(level);
            let raw = level
                .attribute("value")
                .ok_or_else(|| Error::parse(lline, "<level> without value attribute"))?;
            let value: u8 = raw
                .trim()
                .parse()
                .ok()
                .filter(|v| *v <= 2)
                .ok_or_else(|| Error::validation(format!("line {lline}: topic {id} has level value `{raw}` outside 0..=2")))?;
            let text = level.text().unwrap_or("").trim().to_string();
            if levels.insert(value, text).is_some() {
                return Err(Error::validation(format!("line {lline}: topic {id} repeats level {value}")));
            }
        }
        for g in 0..=2u8 {
            if !levels.contains_key(&g) {
                return Err(Error::validation(format!("line {line}: topic {id} lacks a description for grade {g}")));
            }
        }
        topics.push(Topic {
            id,
            title,
            levels,
            is_noise: false,
        });
    }
    Ok(topics)
}

pub fn write_topics(topics: &[Topic]) -> String {
    let mut out = String::from("<topics>\n");
    for t in topics {
        let _ = writeln!(out, "<topic id=\"{}\">", escape(&t.id));
        let _ = writeln!(out, "<title>{}</title>", escape(&t.title));
        if !t.is_noise {
            out.push_str("<relevance>\n");
            for (value, text) in t.levels.iter().rev() {
                let _ = writeln!(out, "<level value=\"{value}\">{}</level>", escape(text));
            }
            out.push_str("</relevance>\n");
        }
        out.push_str("</topic>\n");
    }
    out.push_str("</topics>\n");
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}
