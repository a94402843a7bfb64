//! Reduction of crawled pages to plain structural HTML.
//!
//! Whatever survives is drawn from a fixed whitelist of structural tags.
//! Elements outside it are unwrapped (their text stays), block-level ones
//! become `<div>` so word boundaries are unchanged. Scripts, styles,
//! embedded objects and form controls are dropped with their content. The
//! only attributes kept are `href` on anchors and `colspan`/`rowspan` on
//! table cells, so no colour, font, style or event handler can survive.

use ego_tree::NodeRef;
use scraper::{Html, Node};
use trelkit::html::{is_block, is_non_content};

/// Tags copied through unchanged (minus attributes).
pub const ALLOWED_ELEMENTS: &[&str] = &[
    "a", "abbr", "b", "blockquote", "br", "caption", "cite", "code", "dd", "div", "dl", "dt", "em",
    "h1", "h2", "h3", "h4", "h5", "h6", "hr", "i", "li", "ol", "p", "pre", "q", "s", "section",
    "article", "small", "span", "strong", "sub", "sup", "table", "tbody", "td", "tfoot", "th",
    "thead", "tr", "u", "ul",
];

const VOID_ELEMENTS: &[&str] = &["br", "hr"];

const UNSAFE_SCHEMES: &[&str] = &["javascript:", "vbscript:", "data:"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanedDocument {
    pub html: String,
    /// The input was not valid UTF-8 and was decoded with replacement
    /// characters.
    pub lossy: bool,
}

pub fn clean_document(raw: &[u8]) -> CleanedDocument {
    let (text, lossy) = match std::str::from_utf8(raw) {
        Ok(s) => (std::borrow::Cow::Borrowed(s), false),
        Err(_) => (String::from_utf8_lossy(raw), true),
    };
    CleanedDocument { html: clean_html(&text), lossy }
}

const TABLE_CONTEXT: &[&str] = &["table", "thead", "tbody", "tfoot", "tr"];

/// Parser repairs (foster parenting, implied end tags) can leave a tree
/// whose serialization parses differently, so passes repeat until the
/// output is stable. Each pass preserves the extracted text. The first pass
/// sees the page in its own document mode; later ones see doctype-less
/// output, as does a browser showing [`wrap_page`].
const MAX_PASSES: usize = 8;

pub fn clean_html(html: &str) -> String {
    let mut current = clean_pass(html);
    for _ in 1..MAX_PASSES {
        let next = clean_pass(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn clean_pass(html: &str) -> String {
    let doc = Html::parse_document(html);
    let body = doc
        .tree
        .root()
        .descendants()
        .find(|n| matches!(n.value(), Node::Element(e) if e.name() == "body"));
    let mut out = String::new();
    for child in body.iter().flat_map(|b| b.children()) {
        emit(child, false, &mut out);
    }
    if out.trim().is_empty() {
        return String::new();
    }
    if !out.contains('<') {
        // nothing structural survived: keep the line breaks of the text
        return format!("<pre>\n{out}</pre>");
    }
    // a document parser discards leading whitespace, so keeping it would
    // break idempotence
    out.trim_start().to_string()
}

fn emit(node: NodeRef<'_, Node>, in_table: bool, out: &mut String) {
    match node.value() {
        Node::Text(t) => escape_text(&t.text, out),
        Node::Element(el) => {
            let name = el.name();
            if is_non_content(name) {
                return;
            }
            let tag = if ALLOWED_ELEMENTS.contains(&name) {
                if name == "a" && !el.attr("href").is_some_and(safe_href) {
                    None
                } else {
                    Some(name)
                }
            } else if is_block(name) && !in_table {
                // a <div> directly inside table structure would be moved
                // out of it on the next parse
                Some("div")
            } else {
                None
            };
            let Some(tag) = tag else {
                for child in node.children() {
                    emit(child, in_table, out);
                }
                return;
            };
            out.push('<');
            out.push_str(tag);
            if tag == "a" {
                push_attr(out, "href", el.attr("href").unwrap_or_default());
            }
            if tag == "td" || tag == "th" {
                for attr in ["colspan", "rowspan"] {
                    if let Some(v) = el.attr(attr).map(str::trim).filter(|v| is_span(v)) {
                        push_attr(out, attr, v);
                    }
                }
            }
            out.push('>');
            if VOID_ELEMENTS.contains(&tag) {
                return;
            }
            if tag == "pre" {
                // the parser swallows one newline right after <pre>
                out.push('\n');
            }
            let child_in_table = TABLE_CONTEXT.contains(&tag);
            for child in node.children() {
                emit(child, child_in_table, out);
            }
            out.push_str("</");
            out.push_str(tag);
            out.push('>');
        }
        _ => {}
    }
}

fn safe_href(href: &str) -> bool {
    let compact: String = href
        .chars()
        .filter(|c| !c.is_whitespace() && !c.is_control())
        .flat_map(char::to_lowercase)
        .collect();
    !UNSAFE_SCHEMES.iter().any(|s| compact.starts_with(s))
}

fn is_span(v: &str) -> bool {
    !v.is_empty() && v.len() <= 4 && v.bytes().all(|b| b.is_ascii_digit())
}

fn push_attr(out: &mut String, name: &str, value: &str) {
    out.push(' ');
    out.push_str(name);
    out.push_str("=\"");
    for c in value.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out.push('"');
}

fn escape_text(text: &str, out: &mut String) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\u{a0}' => out.push_str("&nbsp;"),
            _ => out.push(c),
        }
    }
}

/// Cleaned body inside a minimal page with default styling. No doctype:
/// the body must parse exactly as it did when it was cleaned.
pub fn wrap_page(title: &str, body: &str) -> String {
    let mut out = String::from("<html><head><meta charset=\"utf-8\"><title>");
    escape_text(title, &mut out);
    out.push_str("</title></head><body>\n");
    out.push_str(body);
    out.push_str("\n</body></html>\n");
    out
}
